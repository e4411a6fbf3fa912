"""Space-time scaling functions, their inverses, exponent fits and scans.

A :class:`ScalingTable` holds ``F(x, R)`` on a grid of centres and radii.
Its source is the mean exit time ``E(x, R)``, the resistance-volume product
``rho(x, R, 2R) v(x, R, 2R)``, or user-supplied values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientGrid, OutOfTabulatedRange
from .graph_core import WeightedGraph, annulus_volume, bfs_distances, volume_profile
from .potential_theory import PotentialCache, annulus_resistance

SOURCES = ("exit_time", "rho_v", "user")


@dataclass(frozen=True)
class MonotonicityViolation:
    """Witness of ``F(x, R') - F(x, R) < R' - R`` for consecutive tabulated radii."""

    center: int
    radius: int
    next_radius: int
    value: float
    next_value: float


@dataclass
class ScalingTable:
    """``values[i, j] = F(centers[i], radii[j])``.

    ``center_distance[i, k]`` is the graph distance between centres ``i``
    and ``k``; it decides which pairs fall in each other's balls.
    """

    centers: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    source: str = "user"
    center_distance: np.ndarray | None = None
    monotone_completed: bool = False
    violations: list = field(default_factory=list)

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=np.int64)
        self.radii = np.asarray(self.radii, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.centers), len(self.radii)):
            raise ValueError("values must have shape (centres, radii)")
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be strictly increasing")
        if self.center_distance is None:
            self.center_distance = np.where(np.eye(len(self.centers), dtype=bool), 0, np.iinfo(np.int64).max)

    def row_index(self, x: int) -> int:
        hits = np.flatnonzero(self.centers == x)
        if not len(hits):
            raise KeyError(f"centre {x} is not tabulated")
        return int(hits[0])

    def row(self, x: int) -> np.ndarray:
        return self.values[self.row_index(x)]

    def value(self, x: int, R: int) -> float:
        """``F(x, R)``; ``F(x, 0) = 0`` by convention (empty ball)."""
        if R <= 0:
            return 0.0
        j = np.searchsorted(self.radii, R)
        if j >= len(self.radii) or self.radii[j] != R:
            raise OutOfTabulatedRange(f"radius {R} is not tabulated")
        return float(self.values[self.row_index(x), j])

    @property
    def contiguous(self) -> bool:
        return bool(self.radii[0] == 1 and np.all(np.diff(self.radii) == 1))

    def neighbours(self, x: int, R: float) -> np.ndarray:
        """Tabulated centres ``y`` with ``d(x, y) < R``."""
        i = self.row_index(x)
        return self.centers[self.center_distance[i] < R]

    def to_csv(self) -> str:
        lines = ["center,R,F"]
        for i, c in enumerate(self.centers):
            for j, R in enumerate(self.radii):
                lines.append(f"{int(c)},{int(R)},{float(self.values[i, j])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, source: str = "user") -> "ScalingTable":
        rows = [ln.split(",") for ln in text.strip().splitlines()[1:]]
        centers = sorted({int(r[0]) for r in rows})
        radii = sorted({int(r[1]) for r in rows})
        vals = np.full((len(centers), len(radii)), np.nan)
        for c, R, F in rows:
            vals[centers.index(int(c)), radii.index(int(R))] = float(F)
        return cls(np.array(centers), np.array(radii), vals, source)

    @classmethod
    def from_function(cls, F, centers, radii, center_distance=None, source="user"):
        vals = np.array([[F(c, R) for R in radii] for c in centers], dtype=float)
        return cls(np.asarray(centers), np.asarray(radii), vals, source, center_distance)


def _center_distances(g: WeightedGraph, centers) -> np.ndarray:
    out = np.empty((len(centers), len(centers)), dtype=np.int64)
    for i, c in enumerate(centers):
        d = bfs_distances(g, [c])
        out[i] = d[centers]
    return out


def check_monotone(table: ScalingTable, repair: bool = True) -> list[MonotonicityViolation]:
    """Check ``F(x, R') >= F(x, R) + (R' - R)`` between consecutive radii.

    With ``repair`` each violating value is raised to the bound; every
    repair is recorded as a violation on the table, never silently.
    """
    found = []
    for i, c in enumerate(table.centers):
        for j in range(len(table.radii) - 1):
            step = table.radii[j + 1] - table.radii[j]
            lo, hi = table.values[i, j], table.values[i, j + 1]
            if hi < lo + step - 1e-9 * max(1.0, abs(lo)):
                found.append(MonotonicityViolation(int(c), int(table.radii[j]),
                                                   int(table.radii[j + 1]), lo, hi))
                if repair:
                    table.values[i, j + 1] = lo + step
    table.violations.extend(found)
    table.monotone_completed = True
    return found


def build_scaling_table(g: WeightedGraph, source: str, centers, radii, values=None,
                        cache: PotentialCache | None = None,
                        check_truncation: bool = True) -> ScalingTable:
    """Tabulate ``F`` on ``centers x radii`` from the chosen source."""
    if source not in SOURCES:
        raise ValueError(f"source must be one of {SOURCES}")
    centers = np.asarray([g.vertex(c) for c in centers], dtype=np.int64)
    radii = np.asarray(radii, dtype=np.int64)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be increasing")
    if source == "user":
        vals = np.asarray(values, dtype=float)
    elif source == "exit_time":
        cache = cache or PotentialCache(g, check_truncation)
        vals = np.array([[cache.E(c, R) for R in radii] for c in centers])
    else:
        vals = np.array([[rho_v(g, c, int(R), check_truncation) for R in radii] for c in centers])
    table = ScalingTable(centers, radii, vals, source, _center_distances(g, centers))
    check_monotone(table)
    return table


def rho_v(g: WeightedGraph, x: int, R: int, check_truncation: bool = True) -> float:
    """``rho(x, R, 2R) * v(x, R, 2R)``."""
    rho = annulus_resistance(g, x, R, 2 * R, check_truncation=check_truncation).resistance
    return rho * annulus_volume(g, x, R, 2 * R)


def volume_table(g: WeightedGraph, centers, radii) -> ScalingTable:
    """Companion table of ``V(x, R)``."""
    centers = np.asarray([g.vertex(c) for c in centers], dtype=np.int64)
    radii = np.asarray(radii, dtype=np.int64)
    vals = np.array([volume_profile(g, c, int(radii.max()))[radii] for c in centers])
    return ScalingTable(centers, radii, vals, "user", _center_distances(g, centers))


def inverse_scaling(table: ScalingTable, x: int, n: float) -> int:
    """Generalised inverse ``f(x, n) = min{R : F(x, R) >= n}``.

    The row must be tabulated on ``R = 1..R_max``.  For ``n <= F(x, 1)``
    the answer is 1.
    """
    if not table.contiguous:
        raise InsufficientGrid("the inverse needs radii 1..R_max without gaps")
    row = table.row(x)
    if n > row[-1]:
        raise OutOfTabulatedRange(f"n={n} exceeds max tabulated F={row[-1]:g}")
    return int(np.searchsorted(row, n, side="left")) + 1


# ---------------------------------------------------------------------------
# exponent fits


@dataclass
class ScalingExponents:
    """Regularity exponents and constants of a scaling function.

    ``beta``/``beta_prime`` bound the growth of ``F``; ``c_F``/``C_F`` are the
    extremal constants of ``c (R/r)^beta' <= F(x,R)/F(y,r) <= C (R/r)^beta``
    over admissible grid pairs.  ``alpha``/``alpha_prime`` and
    ``c_V``/``C_V`` are the analogues for the volume.
    """

    beta: float
    beta_prime: float
    c_F: float
    C_F: float
    alpha: float = math.nan
    alpha_prime: float = math.nan
    c_V: float = math.nan
    C_V: float = math.nan
    quadratic_c: float = math.nan
    verdict: str = "not-W0"
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "beta", "beta_prime", "c_F", "C_F", "alpha", "alpha_prime", "c_V", "C_V",
            "quadratic_c", "verdict", "diagnostics")}


def _dyadic(radii) -> np.ndarray:
    r = np.asarray(radii)
    return r[(r >= 4) & ((r & (r - 1)) == 0)]


def _regularity(table: ScalingTable, radii) -> tuple[float, float, float, float, dict]:
    cols = np.searchsorted(table.radii, radii)
    vals = table.values[:, cols]
    logs = np.log(vals)
    span = math.log(radii[-1] / radii[0])
    slopes = (logs[:, -1] - logs[:, 0]) / span
    hi, lo = float(slopes.max()), float(slopes.min())
    pair_slopes = []
    ls_slopes = []
    lr = np.log(radii.astype(float))
    for i in range(len(table.centers)):
        ls_slopes.append(float(np.polyfit(lr, logs[i], 1)[0]))
        for a in range(len(radii)):
            for b in range(a + 1, len(radii)):
                pair_slopes.append((logs[i, b] - logs[i, a]) / (lr[b] - lr[a]))
    C, c = 0.0, math.inf
    worst_hi = worst_lo = None
    D = table.center_distance
    for i in range(len(table.centers)):
        for k in range(len(table.centers)):
            for b, R in enumerate(radii):
                if D[i, k] >= R:
                    continue
                for a, r in enumerate(radii):
                    if r > R or (r == R and i == k):
                        continue
                    q = vals[i, b] / vals[k, a]
                    up = q / (R / r) ** hi
                    dn = q / (R / r) ** lo
                    if up > C:
                        C, worst_hi = up, (int(table.centers[i]), int(R), int(table.centers[k]), int(r))
                    if r < R and dn < c:
                        c, worst_lo = dn, (int(table.centers[i]), int(R), int(table.centers[k]), int(r))
    diag = {
        "pairwise_slope_max": float(max(pair_slopes)) if pair_slopes else math.nan,
        "pairwise_slope_min": float(min(pair_slopes)) if pair_slopes else math.nan,
        "least_squares_slopes": ls_slopes,
        "span_slopes": slopes.tolist(),
        "radii": radii.tolist(),
        "upper_witness": worst_hi,
        "lower_witness": worst_lo,
    }
    return hi, lo, c, C, diag


def fit_exponents(table: ScalingTable, volumes: ScalingTable | None = None, radii=None,
                  quadratic_min: float = 0.0) -> ScalingExponents:
    """Fit regularity exponents on a dyadic grid (default: powers of two >= 4).

    Per centre the exponent is the log-slope across the full span of the
    grid; ``beta``/``beta'`` are the max/min over centres.  The constants
    ``C_F``/``c_F`` are worst-pair values at those exponents over all grid
    pairs ``r <= R`` with ``y in B(x, R)``.  Pairwise and least-squares slopes
    are reported as diagnostics.
    """
    radii = _dyadic(table.radii) if radii is None else np.asarray(radii, dtype=np.int64)
    if len(radii) < 3:
        raise InsufficientGrid(f"need >= 3 dyadic radii, got {radii.tolist()}")
    missing = set(radii.tolist()) - set(table.radii.tolist())
    if missing:
        raise InsufficientGrid(f"radii {sorted(missing)} are not tabulated")
    beta, beta_p, c_F, C_F, diag = _regularity(table, radii)
    quad = float(np.min(table.values / table.radii[None, :].astype(float) ** 2))
    out = ScalingExponents(beta, beta_p, c_F, C_F, quadratic_c=quad, diagnostics={"F": diag})
    if volumes is not None:
        a, a_p, c_V, C_V, vdiag = _regularity(volumes, radii)
        out.alpha, out.alpha_prime, out.c_V, out.C_V = a, a_p, c_V, C_V
        out.diagnostics["V"] = vdiag
    monotone_ok = not table.violations
    if beta > 1 and beta_p > 0 and quad > quadratic_min and monotone_ok:
        out.verdict = "W1" if beta_p > 1 else "W0"
    return out


# ---------------------------------------------------------------------------
# sub-Gaussian exponents


def _ball_min(table, x, R, r):
    ys = table.neighbours(x, R)
    return min(table.value(y, r) for y in ys)


def k_condition(table: ScalingTable, x: int, n: float, R: int, q: float, k: int) -> bool:
    """``n/k <= q min_{y in B(x,R)} F(y, floor(R/k))``."""
    return n / k <= q * _ball_min(table, x, R, R // k)


def sub_gaussian_k(table: ScalingTable, x: int, n: float, R: int, q: float = 1 / 16) -> int:
    """Largest ``k`` with ``n/k <= q min_{y in B(x,R)} F(y, floor(R/k))``; 1 if none."""
    for k in range(int(R), 1, -1):
        if k_condition(table, x, n, R, q, k):
            return k
    return 1


def l_condition(table: ScalingTable, x: int, n: float, R: int, Cl: float, l: int) -> bool:
    """``n/l >= C F(x, ceil(R/l))``."""
    return n / l >= Cl * table.value(x, -(-R // l))


def sub_gaussian_l(table: ScalingTable, x: int, n: int, R: int, Cl: float = 2.0) -> int:
    """Smallest ``l`` in ``1..n`` with ``n/l >= C F(x, ceil(R/l))``; ``n`` if none."""
    for l in range(1, int(n) + 1):
        if l_condition(table, x, n, R, Cl, l):
            return l
    return int(n)


def set_l_condition(table: ScalingTable, A, n: float, R: int, Cl: float, l: int) -> bool:
    r = -(-R // l)
    return n / l >= Cl * max(table.value(z, r) for z in A)


def sub_gaussian_l_set(table: ScalingTable, A, n: int, R: int, Cl: float = 2.0) -> int:
    """Largest ``l`` in ``1..n`` with ``n/l >= C max_{z in A} F(z, ceil(R/l))``; ``n`` if none."""
    for l in range(int(n), 0, -1):
        if set_l_condition(table, A, n, R, Cl, l):
            return l
    return int(n)


def m_condition(table: ScalingTable, n: float, R: int, q: float, m: int) -> bool:
    r = R // m
    return n / m <= q * min(table.value(y, r) for y in table.centers)


def global_m(table: ScalingTable, n: float, R: int, q: float = 1 / 16) -> int:
    """Largest ``m`` with ``n/m <= q min_y F(y, floor(R/m))`` over all centres; 1 if none."""
    for m in range(int(R), 1, -1):
        if m_condition(table, n, R, q, m):
            return m
    return 1
