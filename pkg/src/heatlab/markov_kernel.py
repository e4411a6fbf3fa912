"""The reversible random walk: transition rows, heat kernels, cylinders.

Kernels are produced by repeated sparse application of the transition
operator starting from a point mass, never by matrix powers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, SourceOutsideDomain, TimeMismatch
from .graph_core import VertexSet, WeightedGraph, closure_and_boundary


@dataclass(frozen=True)
class KernelVector:
    """One row ``p_n(source, .)`` of a heat kernel.

    ``values`` is indexed by vertex id over the whole graph; for the
    ``dirichlet`` flavour it vanishes outside ``domain``.
    """

    source: int
    n: int
    values: np.ndarray
    flavor: str = "plain"
    domain: VertexSet | None = None

    def mass(self, g: WeightedGraph) -> float:
        return float(np.dot(self.values, g.measure))


def transition_row(g: WeightedGraph, x: int) -> dict[int, float]:
    """``P(x, .)`` as ``{y: mu_xy / mu(x)}``."""
    return {y: w / g.measure[x] for y, w in g.adjacency(x)}


def _domain_mask(g: WeightedGraph, B) -> np.ndarray | None:
    if B is None:
        return None
    ids = B.ids if isinstance(B, VertexSet) else np.asarray(B, dtype=np.int64)
    m = np.zeros(g.vertex_count, dtype=bool)
    m[ids] = True
    return m


def kernel_series(g: WeightedGraph, x: int, n_max: int, B=None, dtype=float) -> np.ndarray:
    """All rows ``p_k(x, .)`` (or ``p_k^B``) for ``k = 0..n_max`` as an array.

    ``dtype=np.longdouble`` runs the accumulation in extended precision.
    """
    mask = _domain_mask(g, B)
    if mask is not None and not mask[x]:
        raise SourceOutsideDomain(f"source {x} is outside the domain")
    PT = g.transition_matrix.T.tocsr().astype(dtype)
    out = np.empty((n_max + 1, g.vertex_count), dtype=dtype)
    dist = np.zeros(g.vertex_count, dtype=dtype)
    dist[x] = 1
    mu = g.measure.astype(dtype)
    out[0] = dist / mu
    for k in range(1, n_max + 1):
        dist = PT @ dist
        if mask is not None:
            dist[~mask] = 0
        out[k] = dist / mu
    return out


def heat_kernel(g: WeightedGraph, x: int, n: int, dtype=float) -> KernelVector:
    """``p_n(x, .) = P_n(x, .) / mu(.)``; ``p_0(x, x) = 1 / mu(x)``."""
    if n < 0:
        raise ValueError("time must be nonnegative")
    PT = g.transition_matrix.T.tocsr().astype(dtype)
    dist = np.zeros(g.vertex_count, dtype=dtype)
    dist[x] = 1
    for _ in range(n):
        dist = PT @ dist
    return KernelVector(x, n, np.asarray(dist / g.measure, dtype=float))


def dirichlet_kernel(g: WeightedGraph, B, x: int, n: int, dtype=float) -> KernelVector:
    """Kernel of the walk killed on leaving ``B``."""
    mask = _domain_mask(g, B)
    if not mask[x]:
        raise SourceOutsideDomain(f"source {x} is outside the domain")
    PT = g.transition_matrix.T.tocsr().astype(dtype)
    dist = np.zeros(g.vertex_count, dtype=dtype)
    dist[x] = 1
    for _ in range(n):
        dist = PT @ dist
        dist[~mask] = 0
    dom = B if isinstance(B, VertexSet) else VertexSet(np.flatnonzero(mask), "custom")
    return KernelVector(x, n, np.asarray(dist / g.measure, dtype=float), "dirichlet", dom)


def tilde(k1: KernelVector, k2: KernelVector) -> KernelVector:
    """``p~_n = p_n + p_{n+1}`` from two consecutive kernel rows."""
    if k2.n != k1.n + 1:
        raise TimeMismatch(f"need consecutive times, got {k1.n} and {k2.n}")
    if k1.source != k2.source or k1.flavor != k2.flavor:
        raise TimeMismatch("kernel rows come from different sources or flavours")
    return KernelVector(k1.source, k1.n, k1.values + k2.values, "tilde", k1.domain)


def apply_laplacian(g: WeightedGraph, f) -> np.ndarray:
    """``(P - I) f``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (g.vertex_count,):
        raise ShapeMismatch(f"expected {g.vertex_count} values, got {f.shape}")
    return g.transition_matrix @ f - f


@dataclass(frozen=True)
class SpaceTimeSolution:
    """Values ``u_n(y)`` on ``[0, T] x closure(B)``.

    ``values[n]`` is indexed like ``closure.ids``; ``interior`` marks the
    positions belonging to ``B`` itself.
    """

    domain: VertexSet
    closure: VertexSet
    values: np.ndarray
    interior: np.ndarray
    kind: str = "solution"

    @property
    def T(self) -> int:
        return self.values.shape[0] - 1

    def at(self, n: int, y: int) -> float:
        return float(self.values[n, np.searchsorted(self.closure.ids, y)])

    def residual(self, g: WeightedGraph) -> np.ndarray:
        """``Delta u_n - d_n u`` on ``B`` for every ``n < T``."""
        P = g.transition_matrix[self.closure.ids][:, self.closure.ids]
        lap = (P @ self.values[:-1].T).T - self.values[:-1]
        dt = self.values[1:] - self.values[:-1]
        return (lap - dt)[:, self.interior]

    def satisfies(self, g: WeightedGraph, tol: float = 1e-10) -> bool:
        r = self.residual(g)
        if self.kind == "solution":
            return bool(np.all(np.abs(r) <= tol))
        if self.kind == "subsolution":
            return bool(np.all(r >= -tol))
        return bool(np.all(r <= tol))


def evolve_cylinder(g: WeightedGraph, B, initial, lateral=None, T: int = 1,
                    nonnegative: bool = False) -> SpaceTimeSolution:
    """Solve ``d_n u = Delta u`` on ``[0, T] x B`` with data on ``closure(B)``.

    Parameters
    ----------
    initial : array, length ``|B|``
        ``u_0`` on ``B`` (ordered like ``B.ids``).
    lateral : array ``(T+1, |dB|)`` or None
        Values on the boundary at each time; ``None`` kills the walk.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    B = B if isinstance(B, VertexSet) else VertexSet(B)
    closure, bnd = closure_and_boundary(g, B)
    initial = np.asarray(initial, dtype=float)
    if initial.shape != (len(B),):
        raise ShapeMismatch(f"initial data has shape {initial.shape}, expected ({len(B)},)")
    if nonnegative and np.any(initial < 0):
        raise ValueError("initial data must be nonnegative")
    if lateral is None:
        lateral = np.zeros((T + 1, len(bnd)))
    lateral = np.asarray(lateral, dtype=float)
    if lateral.shape != (T + 1, len(bnd)):
        raise ShapeMismatch(f"lateral data has shape {lateral.shape}, expected {(T + 1, len(bnd))}")
    interior = np.isin(closure.ids, B.ids)
    pos_b = np.flatnonzero(~interior)
    P = g.transition_matrix[B.ids][:, closure.ids]
    u = np.zeros((T + 1, len(closure)))
    u[0, interior] = initial
    u[0, pos_b] = lateral[0]
    for n in range(T):
        u[n + 1, interior] = P @ u[n]
        u[n + 1, pos_b] = lateral[n + 1]
    return SpaceTimeSolution(B, closure, u, interior, "solution")
