"""Linear-solve potential theory on finite vertex sets.

All Dirichlet problems reduce to the symmetric positive-definite matrix
``L_A = diag(mu) - W`` restricted to ``A``: ``(I - P^A) = D^{-1} L_A``.  Hence

* Green kernel ``g^A(x, .) = L_A^{-1} e_x``,
* mean exit time ``L_A E = mu_A``,
* Poisson kernel ``K = L_A^{-1} W_{A, dA}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy import sparse
from scipy.sparse import linalg as spla

from .errors import (
    NonConvergence,
    OverlappingTerminals,
    RadiusOrderViolation,
    SingularSystem,
    SolverDivergence,
    SourceOutsideDomain,
)
from .graph_core import (
    VertexSet,
    WeightedGraph,
    ball,
    bfs_distances,
    closure_and_boundary,
)

DENSE_LIMIT = 2000
CG_RTOL = 1e-10


def _ids(A) -> np.ndarray:
    if isinstance(A, VertexSet):
        return A.ids
    return np.unique(np.asarray(A, dtype=np.int64))


def pcg(A, b, rtol: float = CG_RTOL, maxiter: int | None = None, x0=None):
    """Jacobi-preconditioned conjugate gradients for an SPD matrix.

    Returns ``(x, relative_residual, iterations)``.
    """
    b = np.asarray(b, dtype=float)
    n = len(b)
    maxiter = maxiter or 10 * n + 100
    dinv = 1.0 / A.diagonal()
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    bnorm = np.linalg.norm(b) or 1.0
    z = dinv * r
    p = z.copy()
    rz = r @ z
    for it in range(1, maxiter + 1):
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        res = np.linalg.norm(r) / bnorm
        if res <= rtol:
            return x, res, it
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverDivergence(f"CG stalled at relative residual {res:.3e} after {maxiter} steps")


class DirichletSolver:
    """Factorised ``L_A`` for repeated solves on one vertex set.

    ``method`` is ``"auto"`` (dense Cholesky below :data:`DENSE_LIMIT`
    unknowns, sparse LU above), ``"dense"``, ``"lu"`` or ``"cg"``.
    """

    def __init__(self, g: WeightedGraph, A, method: str = "auto"):
        self.g = g
        self.ids = _ids(A)
        n = len(self.ids)
        if n == 0:
            raise ValueError("empty domain")
        if n >= g.vertex_count:
            raise SingularSystem("the domain is the whole graph; the killed walk never dies")
        W = g.weight_matrix[self.ids][:, self.ids]
        self.L = (sparse.diags(g.measure[self.ids]) - W).tocsc()
        if method == "auto":
            method = "dense" if n < DENSE_LIMIT else "lu"
        self.method = method
        if method == "dense":
            try:
                self._chol = sla.cho_factor(self.L.toarray())
            except np.linalg.LinAlgError as exc:
                raise SingularSystem(str(exc)) from exc
        elif method == "lu":
            self._lu = spla.splu(self.L)
        elif method != "cg":
            raise ValueError(f"unknown solver method {method!r}")
        self.last_residual = 0.0

    def __len__(self):
        return len(self.ids)

    def position(self, x: int) -> int:
        i = int(np.searchsorted(self.ids, x))
        if i >= len(self.ids) or self.ids[i] != x:
            raise SourceOutsideDomain(f"vertex {x} is not in the domain")
        return i

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if self.method == "dense":
            x = sla.cho_solve(self._chol, b)
        elif self.method == "lu":
            x = self._lu.solve(b)
        else:
            cols = b.reshape(len(b), -1)
            x = np.column_stack([pcg(self.L, c)[0] for c in cols.T]).reshape(b.shape)
        r = self.L @ x - b
        self.last_residual = float(np.linalg.norm(r) / (np.linalg.norm(b) or 1.0))
        return x


# ---------------------------------------------------------------------------
# Dirichlet energy


def dirichlet_energy(g: WeightedGraph, f, check: bool = False) -> float:
    """``E(f, f) = 1/2 sum_{x,y} mu_xy (f(x) - f(y))^2``.

    With ``check`` the value is compared with ``-(Delta f, f)_mu``.
    """
    f = np.asarray(f, dtype=float)
    rows = np.repeat(np.arange(g.vertex_count), np.diff(g.indptr))
    e = 0.5 * float(np.sum(g.weights * (f[rows] - f[g.indices]) ** 2))
    if check:
        lap = g.transition_matrix @ f - f
        alt = -float(np.dot(lap * g.measure, f))
        if not np.isclose(e, alt, rtol=1e-9, atol=1e-12):
            raise AssertionError(f"energy mismatch {e} vs {alt}")
    return e


# ---------------------------------------------------------------------------
# Green kernel


@dataclass(frozen=True)
class GreenField:
    """``g^A(x, .)`` on the vertices of ``A`` (ordered like ``domain.ids``)."""

    domain: VertexSet
    source: int
    values: np.ndarray
    residual: float = 0.0

    def at(self, y: int) -> float:
        i = np.searchsorted(self.domain.ids, y)
        if i < len(self.domain.ids) and self.domain.ids[i] == y:
            return float(self.values[i])
        return 0.0


def green(g: WeightedGraph, A, x: int, solver: DirichletSolver | None = None) -> GreenField:
    """Green kernel of the walk killed outside ``A``: ``g^A(x, y) = G^A(x, y)/mu(y)``."""
    solver = solver or DirichletSolver(g, A)
    i = solver.position(x)
    e = np.zeros(len(solver))
    e[i] = 1.0
    vals = solver.solve(e)
    return GreenField(VertexSet(solver.ids, "custom"), x, vals, solver.last_residual)


# ---------------------------------------------------------------------------
# exit times


@dataclass(frozen=True)
class ExitTimeField:
    """Mean exit times ``E_z(x, R)`` for ``z`` in ``B(x, R)``."""

    center: int
    radius: float
    domain: VertexSet
    values: np.ndarray
    residual: float = 0.0

    @property
    def E(self) -> float:
        return float(self.values[np.searchsorted(self.domain.ids, self.center)])

    @property
    def E_bar(self) -> float:
        return float(self.values.max())

    def at(self, z: int) -> float:
        """``E_z``; zero outside the ball."""
        i = np.searchsorted(self.domain.ids, z)
        if i < len(self.domain.ids) and self.domain.ids[i] == z:
            return float(self.values[i])
        return 0.0


def exit_time_on(g: WeightedGraph, A, solver: DirichletSolver | None = None) -> np.ndarray:
    """``E_z(A)`` for ``z`` in ``A``: solves ``(I - P^A) E = 1``."""
    solver = solver or DirichletSolver(g, A)
    return solver.solve(g.measure[solver.ids])


def mean_exit_time(g: WeightedGraph, x: int, R: float, check_truncation: bool = True,
                   method: str = "auto") -> ExitTimeField:
    """Mean exit times from ``B(x, R)``; ``E(x, R)`` and ``max`` are exposed."""
    if check_truncation:
        g.require_untruncated(x, R)
    B = ball(g, x, R)
    solver = DirichletSolver(g, B, method=method)
    vals = exit_time_on(g, B, solver)
    return ExitTimeField(x, R, B, vals, solver.last_residual)


# ---------------------------------------------------------------------------
# resistance


@dataclass(frozen=True)
class ResistanceResult:
    """Effective resistance between two terminal sets with its potential."""

    A: VertexSet
    B: VertexSet
    resistance: float
    potential: np.ndarray
    energy: float
    residual: float = 0.0


def effective_resistance(g: WeightedGraph, A, B, method: str = "auto") -> ResistanceResult:
    """``rho(A, B) = 1 / min{E(f, f) : f = 1 on A, f = 0 on B}``.

    The minimiser is harmonic off ``A ∪ B``; it is found by an SPD solve on
    the free vertices (equivalently, after collapsing each terminal to a
    single node).
    """
    a, b = _ids(A), _ids(B)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("terminal sets must be nonempty")
    if np.intersect1d(a, b).size:
        raise OverlappingTerminals("terminal sets intersect")
    n = g.vertex_count
    v = np.zeros(n)
    v[a] = 1.0
    free = np.ones(n, dtype=bool)
    free[a] = False
    free[b] = False
    free_ids = np.flatnonzero(free)
    residual = 0.0
    if len(free_ids):
        solver = DirichletSolver(g, free_ids, method=method)
        rhs = np.asarray(g.weight_matrix[free_ids][:, a].sum(axis=1)).ravel()
        v[free_ids] = solver.solve(rhs)
        residual = solver.last_residual
    energy = dirichlet_energy(g, v)
    if not energy > 0:
        raise SolverDivergence("zero energy between terminals")
    return ResistanceResult(VertexSet(a, "custom"), VertexSet(b, "custom"), 1.0 / energy,
                            v, energy, residual)


def annulus_resistance(g: WeightedGraph, x: int, r: int, R: int, inner: str = "closure",
                       check_truncation: bool = True) -> ResistanceResult:
    """Resistance of the annulus between ``B(x, r)`` and ``Γ \\ B(x, R)``.

    ``inner="closure"`` (default) clamps the closed inner ball
    ``{d <= r}``, which gives ``(R - r)/2`` on ``Z``; ``inner="open"`` clamps
    ``B(x, r) = {d < r}`` literally, giving ``(R - r + 1)/2``.
    """
    if not R > r:
        raise RadiusOrderViolation(f"annulus needs R > r, got r={r}, R={R}")
    if r < 1:
        raise RadiusOrderViolation(f"inner radius must be >= 1, got {r}")
    if check_truncation:
        g.require_untruncated(x, R)
    dist = bfs_distances(g, [x], max_depth=R)
    inside = (dist >= 0) & (dist < R)
    if inner == "closure":
        core = (dist >= 0) & (dist <= r)
    elif inner == "open":
        core = (dist >= 0) & (dist < r)
    else:
        raise ValueError(f"inner must be 'closure' or 'open', got {inner!r}")
    outer = np.flatnonzero(~inside)
    if len(outer) == 0:
        raise SingularSystem(f"B({x}, {R}) covers the whole graph")
    return effective_resistance(g, np.flatnonzero(core), outer)


# ---------------------------------------------------------------------------
# eigenvalue


@dataclass(frozen=True)
class EigenResult:
    domain: VertexSet
    value: float
    vector: np.ndarray
    iterations: int
    residual: float


def smallest_eigenvalue(g: WeightedGraph, A, tol: float = 1e-8, max_iters: int = 10_000,
                        solver: DirichletSolver | None = None) -> EigenResult:
    """``lambda(A)``, the bottom of the spectrum of ``-Delta^A``, by inverse iteration.

    Iterates ``phi <- (I - P^A)^{-1} phi`` with ``mu``-normalisation until
    ``||(-Delta^A) phi - lambda phi||_mu <= tol ||phi||_mu``.
    """
    solver = solver or DirichletSolver(g, A)
    mu = g.measure[solver.ids]
    L = solver.L
    phi = np.ones(len(mu))
    lam = res = np.nan
    for it in range(1, max_iters + 1):
        phi = solver.solve(mu * phi)
        phi /= np.sqrt(np.dot(phi * phi, mu))
        Lphi = L @ phi
        lam = float(np.dot(phi, Lphi))
        r = Lphi / mu - lam * phi
        res = float(np.sqrt(np.dot(r * r, mu)))
        if res <= tol:
            return EigenResult(VertexSet(solver.ids), lam, phi, it, res)
    raise NonConvergence(f"inverse iteration residual {res:.2e} after {max_iters} iterations")


def rayleigh_quotient(g: WeightedGraph, f) -> float:
    """``E(f, f) / (f, f)_mu`` for a function on the whole graph."""
    f = np.asarray(f, dtype=float)
    return dirichlet_energy(g, f) / float(np.dot(f * f, g.measure))


# ---------------------------------------------------------------------------
# harmonic functions


@dataclass(frozen=True)
class PoissonKernel:
    """Exit distribution ``K(y, z)`` for ``y`` in ``A``, ``z`` in ``dA``."""

    domain: VertexSet
    boundary: VertexSet
    matrix: np.ndarray
    residual: float = 0.0

    def column(self, z: int) -> np.ndarray:
        return self.matrix[:, np.searchsorted(self.boundary.ids, z)]


def poisson_kernel(g: WeightedGraph, A, solver: DirichletSolver | None = None) -> PoissonKernel:
    A = A if isinstance(A, VertexSet) else VertexSet(A)
    _, bnd = closure_and_boundary(g, A)
    if len(bnd) == 0:
        raise SingularSystem("the set has an empty boundary")
    solver = solver or DirichletSolver(g, A)
    W = g.weight_matrix[A.ids][:, bnd.ids].toarray()
    K = solver.solve(W)
    return PoissonKernel(A, bnd, K, solver.last_residual)


def harmonic_solve(g: WeightedGraph, A, boundary) -> np.ndarray:
    """Harmonic extension into ``A`` of values on ``dA``.

    ``boundary`` is either an array ordered like the boundary ids or a
    mapping ``{z: value}``.  Returns a full-length array, NaN off the closure.
    """
    A = A if isinstance(A, VertexSet) else VertexSet(A)
    closure, bnd = closure_and_boundary(g, A)
    if len(bnd) == 0:
        raise SingularSystem("the set has an empty boundary")
    if isinstance(boundary, dict):
        b = np.array([boundary[z] for z in bnd.ids], dtype=float)
    else:
        b = np.asarray(boundary, dtype=float)
    solver = DirichletSolver(g, A)
    W = g.weight_matrix[A.ids][:, bnd.ids]
    out = np.full(g.vertex_count, np.nan)
    out[bnd.ids] = b
    out[A.ids] = solver.solve(W @ b)
    return out


@dataclass
class PotentialCache:
    """Memoised exit-time and volume computations on one graph."""

    g: WeightedGraph
    check_truncation: bool = True
    _E: dict = field(default_factory=dict)
    _fields: dict = field(default_factory=dict)

    def exit_field(self, x: int, R: int) -> ExitTimeField:
        key = (int(x), int(R))
        if key not in self._fields:
            self._fields[key] = mean_exit_time(self.g, x, R, self.check_truncation)
            self._E[key] = self._fields[key].E
        return self._fields[key]

    def E(self, x: int, R: int) -> float:
        key = (int(x), int(R))
        if key not in self._E:
            if R <= 0:
                return 0.0
            self._E[key] = self.exit_field(x, R).E
        return self._E[key]
