"""Pseudospectrum maps, level contours and the rank-one instability witness.

sigma_eps(P) = sigma(P) union {z : ||(z - P)^{-1}|| > 1/eps}; the stored field is
s_min(z - P) so that sigma_eps is the strict sub-level set {value < eps}.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy import ndimage

from config import PSEUDOSPEC_CONFIG, TOLERANCES
from spectral.errors import DomainError, NumericalError, SpectralLabError
from spectral.linalg import smallest_singular
from spectral.operators import FourierOperator
from spectral.parallel import ordered_map


@dataclass(frozen=True)
class GridSpec:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise DomainError("grid needs nx, ny >= 2")

    @classmethod
    def from_config(cls, tree: dict) -> "GridSpec":
        return cls(float(tree["re_min"]), float(tree["re_max"]), float(tree["im_min"]),
                   float(tree["im_max"]), int(tree["nx"]), int(tree["ny"]))

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.ny)

    @property
    def nodes(self) -> np.ndarray:
        """Complex nodes, shape (ny, nx), row-major by imaginary part"""
        return self.xs[None, :] + 1j * self.ys[:, None]

    @property
    def cell(self) -> Tuple[float, float]:
        return ((self.re_max - self.re_min) / (self.nx - 1),
                (self.im_max - self.im_min) / (self.ny - 1))


@dataclass(frozen=True)
class PseudospecField:
    grid: GridSpec
    values: np.ndarray = field(repr=False)
    h: float = None
    K: int = None
    failed_nodes: Tuple[int, ...] = ()

    def to_frame(self) -> pd.DataFrame:
        nodes = self.grid.nodes.ravel()
        return pd.DataFrame({"re": nodes.real, "im": nodes.imag, "smin": self.values.ravel()})

    def resolvent_norms(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 1.0 / self.values


def _matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, FourierOperator) else np.asarray(op, dtype=complex)


def scan(op, grid: GridSpec, workers: int = 1) -> PseudospecField:
    """s_min(zI - P) at every grid node; failed nodes become NaN and are listed"""
    M = _matrix(op)
    n = M.shape[0]
    identity = np.eye(n)
    scale = np.linalg.norm(M)
    nodes = grid.nodes.ravel()

    def node_value(z):
        try:
            A = z * identity - M
            triplet = smallest_singular(A)
            certified = np.linalg.norm(A @ triplet.right)
            if abs(certified - triplet.s_min) > TOLERANCES["tol_svd"] * max(scale, 1.0):
                raise NumericalError(f"uncertified singular value at z={z}")
            return triplet.s_min
        except SpectralLabError as exc:
            logger.warning(f"pseudospectrum node z={z:.4g} failed: {exc}")
            return None

    results = ordered_map(node_value, nodes, workers)
    failed = tuple(i for i, v in enumerate(results) if v is None)
    values = np.array([PSEUDOSPEC_CONFIG["nan_sentinel"] if v is None else v for v in results])
    values = values.reshape(grid.ny, grid.nx)
    values.setflags(write=False)
    h = getattr(op, "h", None)
    K = getattr(op, "K", None)
    logger.info(f"pseudospectrum scan: {grid.nx}x{grid.ny} nodes, {len(failed)} failed")
    return PseudospecField(grid, values, h, K, failed)


def instability_witness(op, z: complex):
    """Rank-one Q = -v u^H with ||Q|| = s_min(P - z) making z an eigenvalue of P + Q"""
    M = _matrix(op)
    A = M - z * np.eye(M.shape[0])
    triplet = smallest_singular(A)
    if triplet.s_min <= PSEUDOSPEC_CONFIG["eigen_tolerance"]:
        return np.zeros_like(A), 0.0
    u = triplet.right
    v = A @ u
    Q = -np.outer(v, u.conj())
    return Q, float(np.linalg.norm(v))


# Contours ----------------------------------------------------------------

def _edge_point(values, nodes, a, b, eps):
    va, vb = values[a], values[b]
    t = (eps - va) / (vb - va)
    return nodes[a] + t * (nodes[b] - nodes[a])


def _cell_segments(values, i, j, eps):
    """Marching-squares segments of cell (i, j) as pairs of edge keys"""
    corners = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j)]
    vals = [values[c] for c in corners]
    if any(np.isnan(v) for v in vals):
        return []
    below = [v < eps for v in vals]
    # edges: bottom, right, top, left; each is a pair of corner indices
    edge_corners = [(0, 1), (1, 2), (2, 3), (3, 0)]
    edge_keys = [("h", i, j), ("v", i, j + 1), ("h", i + 1, j), ("v", i, j)]
    crossing = [below[a] != below[b] for a, b in edge_corners]
    hits = [k for k in range(4) if crossing[k]]
    if len(hits) == 2:
        return [(edge_keys[hits[0]], edge_keys[hits[1]])]
    if len(hits) == 4:
        center_below = np.mean(vals) < eps
        if center_below == below[0]:
            return [(edge_keys[0], edge_keys[1]), (edge_keys[2], edge_keys[3])]
        return [(edge_keys[3], edge_keys[0]), (edge_keys[1], edge_keys[2])]
    return []


def _key_point(key, values, nodes, eps):
    kind, i, j = key
    a = (i, j)
    b = (i, j + 1) if kind == "h" else (i + 1, j)
    return _edge_point(values, nodes, a, b, eps)


def _chain(segments) -> List[List]:
    """Join segments sharing edge keys into polylines (open first, then closed loops)"""
    touching: Dict = {}
    for idx, (a, b) in enumerate(segments):
        touching.setdefault(a, []).append(idx)
        touching.setdefault(b, []).append(idx)
    used = [False] * len(segments)
    lines = []

    def walk(start_key, first_idx):
        path = [start_key]
        idx, key = first_idx, start_key
        while idx is not None and not used[idx]:
            used[idx] = True
            a, b = segments[idx]
            key = b if a == key else a
            path.append(key)
            nxt = [k for k in touching[key] if not used[k]]
            idx = nxt[0] if nxt else None
        return path

    ends = sorted(k for k, idxs in touching.items() if len(idxs) == 1)
    for key in ends:
        idx = touching[key][0]
        if not used[idx]:
            lines.append(walk(key, idx))
    for idx, (a, _) in enumerate(segments):
        if not used[idx]:
            lines.append(walk(a, idx))
    return lines


def level_contours(field_: PseudospecField, eps_list) -> Dict[float, List[np.ndarray]]:
    """Polylines (complex arrays) of value = eps with linear interpolation on cell edges.

    A closed polyline repeats its first point at the end.
    """
    values = np.asarray(field_.values, dtype=float)
    nodes = field_.grid.nodes
    ny, nx = values.shape
    out = {}
    for eps in eps_list:
        segments = []
        for i in range(ny - 1):
            for j in range(nx - 1):
                segments.extend(_cell_segments(values, i, j, eps))
        lines = []
        for keys in _chain(segments):
            lines.append(np.array([_key_point(k, values, nodes, eps) for k in keys]))
        out[eps] = lines
    return out


def components_without_eigenvalues(field_: PseudospecField, eigenvalues, eps: float) -> List[int]:
    """Labels of bounded components of {value < eps} holding no eigenvalue (one-cell tolerance)"""
    mask = np.nan_to_num(field_.values, nan=np.inf) < eps
    labels, count = ndimage.label(mask)
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])))
    dx, dy = field_.grid.cell
    nodes = field_.grid.nodes
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    missing = []
    for label in range(1, count + 1):
        if label in border:
            continue
        pts = nodes[labels == label]
        near = (np.abs(pts.real[:, None] - eigenvalues.real[None, :]) <= dx) & \
               (np.abs(pts.imag[:, None] - eigenvalues.imag[None, :]) <= dy)
        if not near.any():
            missing.append(label)
    return missing
