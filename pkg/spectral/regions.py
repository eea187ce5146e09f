"""Bounded regions of the spectral plane (rectangles and polygons)."""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from spectral.errors import ConfigError


@dataclass(frozen=True)
class RegionSpec:
    """Positively oriented region; `vertices` is the counter-clockwise boundary.

    Rectangles keep their bounds (a, b, c, d) meaning [a,b] + i[c,d] so that
    membership tests stay exact on the boundary.
    """

    kind: str
    vertices: np.ndarray = field(repr=False)
    bounds: Optional[tuple] = None
    boundary_tolerance: float = 0.0

    @classmethod
    def rectangle(cls, a, b, c, d, boundary_tolerance=0.0):
        if not (a < b and c < d):
            raise ConfigError("rectangle needs a < b and c < d", key_path="region.bounds")
        verts = np.array([a + 1j * c, b + 1j * c, b + 1j * d, a + 1j * d])
        return cls("rectangle", verts, (float(a), float(b), float(c), float(d)),
                   float(boundary_tolerance))

    @classmethod
    def polygon(cls, vertices: Sequence[complex], boundary_tolerance=0.0):
        verts = np.asarray(vertices, dtype=complex)
        if len(verts) > 1 and verts[0] == verts[-1]:
            verts = verts[:-1]
        if len(verts) < 3:
            raise ConfigError("polygon needs at least three vertices", key_path="region.vertices")
        area = _signed_area(verts)
        if area == 0:
            raise ConfigError("polygon has empty interior", key_path="region.vertices")
        if area < 0:
            verts = verts[::-1].copy()
        if _self_intersects(verts):
            raise ConfigError("polygon is self-intersecting", key_path="region.vertices")
        return cls("polygon", verts, None, float(boundary_tolerance))

    @classmethod
    def from_config(cls, tree: dict):
        kind = tree.get("kind", "rectangle")
        tol = tree.get("boundary_tolerance", 0.0)
        if kind == "rectangle":
            return cls.rectangle(*tree["bounds"], boundary_tolerance=tol)
        if kind == "polygon":
            return cls.polygon([complex(re, im) for re, im in tree["vertices"]], boundary_tolerance=tol)
        raise ConfigError(f"unknown region kind '{kind}'", key_path="region.kind")

    def to_config(self) -> dict:
        if self.kind == "rectangle":
            return {"kind": "rectangle", "bounds": list(self.bounds),
                    "boundary_tolerance": self.boundary_tolerance}
        return {"kind": "polygon", "vertices": [[v.real, v.imag] for v in self.vertices],
                "boundary_tolerance": self.boundary_tolerance}

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.vertices)))

    @property
    def box(self):
        v = self.vertices
        return v.real.min(), v.real.max(), v.imag.min(), v.imag.max()

    def contains(self, z) -> np.ndarray:
        """Closed-region membership, vectorized"""
        z = np.asarray(z, dtype=complex)
        if self.kind == "rectangle":
            a, b, c, d = self.bounds
            return (z.real >= a) & (z.real <= b) & (z.imag >= c) & (z.imag <= d)
        inside = winding_numbers(self.vertices, z) != 0
        return inside | (self.distance_to_boundary(z) == 0.0)

    def distance_to_boundary(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1)
        best = np.full(flat.shape, np.inf)
        starts = self.vertices
        ends = np.roll(self.vertices, -1)
        for p, q in zip(starts, ends):
            edge = q - p
            t = np.clip(((flat - p) * np.conj(edge)).real / abs(edge) ** 2, 0.0, 1.0)
            best = np.minimum(best, np.abs(flat - (p + t * edge)))
        return best.reshape(z.shape)

    def boundary_points(self, spacing: float) -> np.ndarray:
        """Points along the boundary, counter-clockwise, at most `spacing` apart (open list)"""
        pts = []
        for p, q in zip(self.vertices, np.roll(self.vertices, -1)):
            n = max(1, int(np.ceil(abs(q - p) / spacing)))
            pts.append(p + (q - p) * np.arange(n) / n)
        return np.concatenate(pts)

    def edges(self):
        return list(zip(self.vertices, np.roll(self.vertices, -1)))


def winding_numbers(vertices: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Winding number of the closed polygon around each point (crossing rule)"""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    wn = np.zeros(z.shape, dtype=int)
    for p, q in zip(vertices, np.roll(vertices, -1)):
        cross = (q.real - p.real) * (y - p.imag) - (x - p.real) * (q.imag - p.imag)
        upward = (p.imag <= y) & (q.imag > y) & (cross > 0)
        downward = (p.imag > y) & (q.imag <= y) & (cross < 0)
        wn += upward.astype(int) - downward.astype(int)
    return wn


def _signed_area(v: np.ndarray) -> float:
    w = np.roll(v, -1)
    return 0.5 * float(np.sum(v.real * w.imag - w.real * v.imag))


def _self_intersects(v: np.ndarray) -> bool:
    n = len(v)
    segs = list(zip(v, np.roll(v, -1)))

    def orient(a, b, c):
        return np.sign((b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real))

    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            a, b = segs[i]
            c, d = segs[j]
            if orient(a, b, c) * orient(a, b, d) < 0 and orient(c, d, a) * orient(c, d, b) < 0:
                return True
    return False
