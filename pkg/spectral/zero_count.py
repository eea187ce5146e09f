"""Zero counting for holomorphic functions: argument principle, Jensen bounds
and the boundary-flux comparison with (1/2 pi h) times the integral of the Laplacian of phi.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import pandas as pd
from loguru import logger

from config import ZERO_COUNT_CONFIG
from spectral.errors import DomainError, NumericalError, RefinementLimitError, ZeroNearContourError
from spectral.parallel import ordered_map
from spectral.regions import RegionSpec
from spectral.rng import make_generator

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ContourSpec:
    """Closed, positively oriented contour. Nodes are stored open (first node not repeated).

    Points between nodes come from the exact circle or from straight segments.
    """

    nodes: np.ndarray = field(repr=False)
    kind: str = "polygon"
    center: complex = 0j
    radius: float = 0.0
    refinement_limit: int = ZERO_COUNT_CONFIG["refinement_limit"]
    min_modulus_guard: float = ZERO_COUNT_CONFIG["min_modulus_guard"]

    @classmethod
    def circle(cls, center: complex, radius: float, nodes: int = 64, **kwargs) -> "ContourSpec":
        if radius <= 0 or nodes < 3:
            raise DomainError("circle needs radius > 0 and at least 3 nodes")
        pts = center + radius * np.exp(1j * TWO_PI * np.arange(nodes) / nodes)
        return cls(pts, "circle", complex(center), float(radius), **kwargs)

    @classmethod
    def from_region(cls, region: RegionSpec, spacing: float, **kwargs) -> "ContourSpec":
        return cls.polygon(region.boundary_points(spacing), **kwargs)

    @classmethod
    def polygon(cls, points, **kwargs) -> "ContourSpec":
        pts = np.asarray(points, dtype=complex)
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts = pts[:-1]
        if len(pts) < 3:
            raise DomainError("contour needs at least three nodes")
        if np.any(np.abs(np.roll(pts, -1) - pts) == 0):
            raise DomainError("consecutive contour nodes coincide")
        return cls(pts, "polygon", **kwargs)

    def point(self, s: float) -> complex:
        """Position at parameter s in [0, n): node i sits at s = i"""
        n = len(self.nodes)
        if self.kind == "circle":
            return self.center + self.radius * np.exp(1j * TWO_PI * s / n)
        i = int(np.floor(s)) % n
        t = s - np.floor(s)
        a, b = self.nodes[i], self.nodes[(i + 1) % n]
        return a + t * (b - a)

    def tangent(self, s: float, segment: int) -> complex:
        """dz/ds at parameter s, taken on the given segment (vertices belong to two)"""
        n = len(self.nodes)
        if self.kind == "circle":
            return 1j * (TWO_PI / n) * (self.point(s) - self.center)
        return complex(self.nodes[(segment + 1) % n] - self.nodes[segment % n])


class HolomorphicSampler:
    """Wraps z -> f(z). `log_func`, when given, returns log f(z) on any branch
    and is used instead of f to avoid overflow in long products.
    """

    def __init__(self, func: Optional[Callable] = None, log_func: Optional[Callable] = None,
                 name: str = "f"):
        if func is None and log_func is None:
            raise DomainError("need func or log_func")
        self.func = func
        self.log_func = log_func
        self.name = name

    def log_value(self, z) -> complex:
        if self.log_func is not None:
            return complex(self.log_func(z))
        value = complex(self.func(z))
        if value == 0:
            return complex(-np.inf, 0.0)
        return complex(np.log(abs(value)), np.angle(value))

    def value(self, z) -> complex:
        if self.func is not None:
            return complex(self.func(z))
        return complex(np.exp(self.log_value(z)))

    def cauchy_riemann_defect(self, center: complex, radius: float, points: int = 10,
                              step: float = 1e-5, seed: int = 0) -> float:
        """Max relative |f_x + i f_y| over random points of a disc (zero for holomorphic f)"""
        rng = make_generator(seed, "cauchy-riemann")
        worst = 0.0
        for _ in range(points):
            z = center + radius * np.sqrt(rng.uniform()) * np.exp(1j * TWO_PI * rng.uniform())
            fx = (self.value(z + step) - self.value(z - step)) / (2 * step)
            fy = (self.value(z + 1j * step) - self.value(z - 1j * step)) / (2 * step)
            scale = max(abs(fx), abs(fy), 1e-300)
            worst = max(worst, abs(fx + 1j * fy) / scale)
        return worst

    def check_holomorphy(self, center: complex, radius: float) -> bool:
        defect = self.cauchy_riemann_defect(center, radius)
        ok = defect <= ZERO_COUNT_CONFIG["holomorphy_tolerance"]
        if not ok:
            logger.warning(f"{self.name}: Cauchy-Riemann defect {defect:.2e} on the declared domain")
        return ok


@dataclass
class ZeroCountReport:
    count: int
    winding_total: float
    refinement_used: int
    weyl_compare: Optional[dict] = None
    flags: List[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        cmp = self.weyl_compare or {}
        return pd.DataFrame([{
            "count": self.count,
            "winding": self.winding_total,
            "mass": cmp.get("mass", np.nan),
            "bound": cmp.get("bound", np.nan),
            "deviation": cmp.get("deviation", np.nan),
            "flags": ";".join(self.flags),
        }])


def argument_count(sampler: HolomorphicSampler, contour: ContourSpec, workers: int = 1) -> ZeroCountReport:
    """Winding number of f along the contour by phase tracking with adaptive bisection.

    A sub-interval is accepted when its wrapped phase jump is small and agrees with the
    trapezoid rule applied to the phase rates d arg f / ds at its two ends.
    """
    n = len(contour.nodes)
    log_guard = np.log(contour.min_modulus_guard)
    max_jump = ZERO_COUNT_CONFIG["max_phase_jump"]
    mismatch = ZERO_COUNT_CONFIG["phase_rate_mismatch"]
    eta = ZERO_COUNT_CONFIG["phase_rate_step"]

    def evaluate(s, segment):
        z = contour.point(s)
        tangent = contour.tangent(s, segment)
        w = sampler.log_value(z)
        if not np.isfinite(w.real) or w.real < log_guard:
            raise ZeroNearContourError(f"|{sampler.name}| below guard at z={z:.6g}", s=s)
        ahead = sampler.log_value(z + eta * tangent).imag
        behind = sampler.log_value(z - eta * tangent).imag
        return w, _wrap_phase(ahead - behind) / (2 * eta)

    def segment_ends(i):
        return evaluate(float(i), i), evaluate(float(i + 1), i)

    ends = ordered_map(segment_ends, range(n), workers)
    deepest = 0
    total = 0.0

    for i in range(n):
        (la, ra), (lb, rb) = ends[i]
        # explicit stack of (s_a, s_b, log_a, rate_a, log_b, rate_b, depth)
        stack = [(float(i), float(i + 1), la, ra, lb, rb, 0)]
        while stack:
            sa, sb, la, ra, lb, rb, depth = stack.pop()
            jump = _wrap_phase(lb.imag - la.imag)
            predicted = 0.5 * (ra + rb) * (sb - sa)
            if abs(jump) < max_jump and abs(jump - predicted) < mismatch:
                total += jump
                deepest = max(deepest, depth)
                continue
            if depth >= contour.refinement_limit:
                raise RefinementLimitError(
                    f"phase jump {jump:.3f} (rate estimate {predicted:.3f}) unresolved after "
                    f"{depth} bisections near z={contour.point(sa):.6g}", depth=depth)
            sm = 0.5 * (sa + sb)
            lm, rm = evaluate(sm, i)
            stack.append((sm, sb, lm, rm, lb, rb, depth + 1))
            stack.append((sa, sm, la, ra, lm, rm, depth + 1))

    winding = total / TWO_PI
    count = int(round(winding))
    if abs(winding - count) > ZERO_COUNT_CONFIG["winding_tolerance"]:
        raise NumericalError(f"winding {winding:.4f} is not close to an integer")
    logger.debug(f"argument count of {sampler.name}: {count} (max depth {deepest})")
    return ZeroCountReport(count, float(winding), deepest)


def _wrap_phase(d):
    return float(np.angle(np.exp(1j * d)))


def jensen_bound(f: Callable, z0: complex, r: float, R: float, M: Optional[float] = None,
                 samples: int = 1024) -> float:
    """(ln M - ln|f(z0)|) / ln(R/r), an upper bound for the zeros of f in |z - z0| <= r"""
    if not 0 < r < R:
        raise DomainError(f"need 0 < r < R, got r={r}, R={R}")
    f0 = abs(complex(f(z0)))
    if f0 == 0:
        raise ZeroNearContourError(f"f(z0) = 0 at z0={z0}; Jensen bound undefined")
    if M is None:
        ring = z0 + R * np.exp(1j * TWO_PI * np.arange(samples) / samples)
        M = max(abs(complex(f(w))) for w in ring)
    return float((np.log(M) - np.log(f0)) / np.log(R / r))


def boundary_flux(phi: Callable, region: RegionSpec, step: float, order: int = 32) -> float:
    """Outward normal-derivative flux of phi through the region boundary (Gauss-Legendre per edge)"""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (nodes + 1.0)
    total = 0.0
    for a, b in region.edges():
        edge = b - a
        length = abs(edge)
        normal = -1j * edge / length
        pts = a + t * edge
        dn = (phi(pts + step * normal) - phi(pts - step * normal)) / (2 * step)
        total += 0.5 * length * float(np.sum(weights * np.real(dn)))
    return total


def delta_phi_mass(phi: Callable, region: RegionSpec, resolution: int = 200) -> float:
    """Integral of the Laplacian of phi over the region by the five-point stencil on cell centres"""
    x0, x1, y0, y1 = region.box
    dx = (x1 - x0) / resolution
    dy = (y1 - y0) / resolution
    xs = x0 + dx * (np.arange(resolution) + 0.5)
    ys = y0 + dy * (np.arange(resolution) + 0.5)
    z = xs[None, :] + 1j * ys[:, None]
    lap = ((phi(z + dx) - 2 * phi(z) + phi(z - dx)) / dx ** 2
           + (phi(z + 1j * dy) - 2 * phi(z) + phi(z - 1j * dy)) / dy ** 2)
    inside = region.contains(z)
    return float(np.sum(np.real(lap)[inside]) * dx * dy)


def hager_verify(sampler: HolomorphicSampler, phi: Callable, region: RegionSpec, h: float, eps: float,
                 boundary_points=None, calibration: Optional[float] = None,
                 interior_samples: int = 30, workers: int = 1) -> ZeroCountReport:
    """Count zeros of u in the region and compare with (1/2 pi h) * integral of the Laplacian of phi.

    Hypotheses |u| <= exp((phi + eps)/h) inside and |u(z_k)| >= exp((phi(z_k) - eps)/h) at
    the boundary points are sampled; violations are flagged, not fatal.
    """
    if h <= 0 or eps <= 0:
        raise DomainError("h and eps must be positive")
    calibration = ZERO_COUNT_CONFIG["calibration_constant"] if calibration is None else calibration
    spacing = np.sqrt(eps)
    flags = []

    if boundary_points is None:
        boundary_points = region.boundary_points(spacing)
    boundary_points = np.asarray(boundary_points, dtype=complex)
    gaps = np.abs(np.roll(boundary_points, -1) - boundary_points)
    if gaps.max() > spacing * (1 + 1e-9) or region.distance_to_boundary(boundary_points).max() > 1e-9:
        flags.append("coverage")

    phi_b = np.real(phi(boundary_points))
    log_b = np.array([sampler.log_value(z).real for z in boundary_points])
    if np.any(log_b < (phi_b - eps) / h):
        flags.append("lower_bound")

    x0, x1, y0, y1 = region.box
    grid = (np.linspace(x0, x1, interior_samples)[None, :]
            + 1j * np.linspace(y0, y1, interior_samples)[:, None]).ravel()
    grid = grid[region.contains(grid)]
    log_i = np.array([sampler.log_value(z).real for z in grid])
    if np.any(log_i > (np.real(phi(grid)) + eps) / h):
        flags.append("upper_bound")

    report = argument_count(sampler, ContourSpec.polygon(boundary_points), workers)
    flux = boundary_flux(phi, region, spacing / 4)
    mass = flux / (TWO_PI * h)
    bound = calibration * np.sqrt(eps) / h
    deviation = abs(report.count - mass)
    if deviation > bound:
        flags.append("deviation")
    if flags:
        logger.warning(f"hager_verify flags: {', '.join(flags)}")
    report.weyl_compare = {"mass": float(mass), "bound": float(bound), "deviation": float(deviation),
                           "calibration": float(calibration)}
    report.flags = flags
    return report


def lattice_product(h: float, window: RegionSpec):
    """log of u(z) = prod (z - w) over the offset lattice sqrt(pi h)(Z + iZ + (1+i)/2) in a window.

    The zero density is 1/(pi h), matching phi = |z|^2 / 2.
    """
    a = np.sqrt(np.pi * h)
    x0, x1, y0, y1 = window.box
    ms = np.arange(np.floor(x0 / a) - 1, np.ceil(x1 / a) + 1)
    ns = np.arange(np.floor(y0 / a) - 1, np.ceil(y1 / a) + 1)
    w = (a * (ms[None, :] + 0.5) + 1j * a * (ns[:, None] + 0.5)).ravel()
    w = w[window.contains(w)]

    def log_u(z):
        return complex(np.sum(np.log(z - w)))

    return HolomorphicSampler(log_func=log_u, name="lattice_product"), w
