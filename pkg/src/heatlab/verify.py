"""Empirical dashboard: each named condition becomes a measured constant.

Every verifier scans a grid of centres and dyadic radii, records the best
constant per sample, keeps the worst witness and applies a stability rule
to the curve ``R -> constant``.

For (H), (MV), PMV, PSMV and PH the supremum over an infinite cone of
functions is reduced to a finite scan over its extreme rays (Poisson-kernel
columns, space-time point sources).  The reduction is exact because the
quantities involved are ratios of linear functionals, or of a max/min of
linear functionals, whose extremes over a finitely generated cone are
attained on generators.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import (
    ConfigOrderViolation,
    CylinderTooSmall,
    NotApplicableBetaPrime,
    OutOfTabulatedRange,
    TruncationViolation,
)
from .graph_core import (
    WeightedGraph,
    annulus_volume,
    ball,
    bfs_distances,
    closure_and_boundary,
    volume,
)
from .markov_kernel import kernel_series
from .potential_theory import (
    annulus_resistance,
    green,
    poisson_kernel,
    smallest_eigenvalue,
)
from .scaling_laws import ScalingTable, fit_exponents, inverse_scaling

VERDICTS = ("holds-stably", "drifts", "fails", "skipped")
_RANK = {"holds-stably": 0, "skipped": 0, "drifts": 1, "fails": 2}

COHERENCE_GROUPS = {
    "g(F)": ("gue", "gle"),
    "wTC+H": ("wtc", "h"),
    "UE+PLE": ("ue", "ple"),
    "PMV+PSMV": ("pmv", "psmv"),
}


@dataclass
class VerifierConfig:
    """Sampling grid, cylinder shapes, scan constants and stability thresholds."""

    centers: tuple | None = None
    n_centers: int = 3
    radii: tuple = (4, 8, 16, 32)
    parabolic_max_radius: int = 16
    pmv_c: tuple = (0.125, 0.25, 0.5, 0.75, 1.0)
    pmv_delta: float = 1.0
    psmv_c: tuple = (0.0625, 0.125, 0.25, 0.28125, 0.28125)
    psmv_delta: float = 0.25
    psmv_eps: float = 0.25
    ndle_delta: float = 0.25
    ple_eps: float = 0.25
    q: float = 1 / 16
    Cl: float = 2.0
    beta: float | None = None
    beta_prime: float | None = None
    kernel_points: int = 4
    stability_factor: float = 2.0
    blowup_step: float = 0.05
    gate_rtol: float = 1e-9

    def __post_init__(self):
        self.radii = tuple(int(r) for r in self.radii)
        if self.centers is not None:
            self.centers = tuple(self.centers)
        self.pmv_c = tuple(float(c) for c in self.pmv_c)
        self.psmv_c = tuple(float(c) for c in self.psmv_c)

    def validate(self) -> None:
        for name, c in (("pmv_c", self.pmv_c), ("psmv_c", self.psmv_c)):
            if len(c) != 5:
                raise ConfigOrderViolation(f"{name} needs five constants")
            c1, c2, c3, c4, c5 = c
            if not (0 <= c1 < c2 < c3 < c4 <= c5):
                raise ConfigOrderViolation(f"{name} must satisfy 0 <= c1 < c2 < c3 < c4 <= c5, got {c}")
        for name, d in (("pmv_delta", self.pmv_delta), ("psmv_delta", self.psmv_delta),
                        ("ndle_delta", self.ndle_delta)):
            if not 0 < d <= 1:
                raise ConfigOrderViolation(f"{name} must lie in (0, 1], got {d}")
        if not 0 < self.psmv_eps < 1:
            raise ConfigOrderViolation(f"psmv_eps must lie in (0, 1), got {self.psmv_eps}")
        if not self.psmv_c[0] > 0:
            raise ConfigOrderViolation("psmv needs c1 > 0")
        if not self.psmv_c[3] - self.psmv_c[0] < self.psmv_eps:
            raise ConfigOrderViolation(
                f"psmv needs c4 - c1 < eps, got {self.psmv_c[3] - self.psmv_c[0]} >= {self.psmv_eps}")
        if self.stability_factor <= 1:
            raise ConfigOrderViolation("stability factor must exceed 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["radii"] = list(self.radii)
        d["centers"] = None if self.centers is None else list(self.centers)
        d["pmv_c"] = list(self.pmv_c)
        d["psmv_c"] = list(self.psmv_c)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VerifierConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        unknown = set(d) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Measure:
    """One measured constant with its stability curve and worst witness.

    ``direction`` is ``"upper"`` for constants that must stay bounded and
    ``"lower"`` for constants that must stay away from zero.
    """

    key: str
    direction: str
    constant: float = math.nan
    curve: dict = field(default_factory=dict)
    witness: dict | None = None
    verdict: str = "skipped"

    def offer(self, value: float, R: int, witness: dict) -> None:
        value = float(value)
        up = self.direction == "upper"

        def worse(a, b):
            return not math.isfinite(a) or (a > b if up else a < b)

        cur = self.curve.get(int(R))
        if cur is None or worse(value, cur):
            self.curve[int(R)] = value
        if self.witness is None or worse(value, self.constant):
            self.constant = value
            self.witness = dict(witness, R=int(R), value=value)

    def to_dict(self) -> dict:
        return {"key": self.key, "direction": self.direction, "constant": self.constant,
                "curve": {str(k): v for k, v in sorted(self.curve.items())},
                "witness": self.witness, "verdict": self.verdict}


@dataclass
class ConditionReport:
    """Result of one verifier: measures, per-sample rows, verdict and notes."""

    name: str
    grid: dict
    measures: list
    samples: list = field(default_factory=list)
    verdict: str = "skipped"
    notes: list = field(default_factory=list)
    hard_violations: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def measure(self, key: str) -> Measure:
        for m in self.measures:
            if m.key == key:
                return m
        raise KeyError(key)

    @property
    def constant(self) -> float:
        return self.measures[0].constant

    @property
    def stability_curve(self) -> dict:
        return self.measures[0].curve

    def to_dict(self) -> dict:
        return {"name": self.name, "grid": self.grid, "constant": self.constant,
                "stability_curve": {str(k): v for k, v in sorted(self.stability_curve.items())},
                "measures": [m.to_dict() for m in self.measures],
                "witnesses": [m.witness for m in self.measures],
                "verdict": self.verdict, "notes": list(self.notes),
                "hard_violations": list(self.hard_violations), "extra": self.extra,
                "samples": self.samples}


# ---------------------------------------------------------------------------
# stability rule


def stability_verdict(curve: dict, factor: float = 2.0, direction: str = "upper",
                      step: float = 0.05) -> str:
    """Verdict from a curve ``{R: constant}``.

    ``fails`` on a non-finite or non-positive value; ``drifts`` when two
    consecutive levels differ by ``factor`` or more, or when the curve runs
    away monotonically without slowing down (every log-increment above
    ``log(1 + step)`` and non-decreasing); ``holds-stably`` otherwise.
    """
    if not curve:
        return "skipped"
    vals = np.array([curve[R] for R in sorted(curve)], dtype=float)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        return "fails"
    w = np.log(vals) if direction == "upper" else -np.log(vals)
    d = np.diff(w)
    if np.any(np.abs(d) >= math.log(factor)):
        return "drifts"
    if len(d) >= 2 and np.all(d > math.log1p(step)) and np.all(np.diff(d) >= -1e-12):
        return "drifts"
    return "holds-stably"


def worst_verdict(verdicts) -> str:
    measured = [v for v in verdicts if v != "skipped"]
    if not measured:
        return "skipped"
    return max(measured, key=lambda v: _RANK[v])


def _finish(report: ConditionReport, cfg: VerifierConfig) -> ConditionReport:
    for m in report.measures:
        m.verdict = stability_verdict(m.curve, cfg.stability_factor, m.direction, cfg.blowup_step)
    report.verdict = worst_verdict(m.verdict for m in report.measures)
    if report.hard_violations:
        report.verdict = "fails"
    return report


# ---------------------------------------------------------------------------
# sampling helpers


def default_centers(g: WeightedGraph, cfg: VerifierConfig | None = None) -> list[int]:
    """Primary labelled vertex plus nearby vertices at distance 1, 2, ..."""
    cfg = cfg or VerifierConfig()
    if cfg.centers is not None:
        return [g.vertex(c) for c in cfg.centers]
    for name in ("center", "apex", "junction"):
        if name in g.labels:
            x0 = int(g.labels[name])
            break
    else:
        x0 = int(np.argmax(g.boundary_distance)) if len(g.truncation) else 0
    out = [x0]
    if cfg.n_centers > 1:
        d = bfs_distances(g, [x0], max_depth=cfg.n_centers)
        for k in range(1, cfg.n_centers):
            ring = np.flatnonzero(d == k)
            if len(ring):
                out.append(int(ring[0]))
    return out[: cfg.n_centers]


def _fits(g: WeightedGraph, x: int, R: float) -> bool:
    return bool(g.boundary_distance[x] >= R)


def _pos(ids: np.ndarray, sub: np.ndarray) -> np.ndarray:
    return np.searchsorted(ids, sub)


def _table_value(table: ScalingTable, x: int, R: int) -> float:
    try:
        return table.value(x, R)
    except (KeyError, OutOfTabulatedRange):
        raise OutOfTabulatedRange(f"F({x}, {R}) is not tabulated") from None


def _grid(g, cfg, centers, radii, reach):
    """Admissible (x, R) cells: ``B(x, reach * R)`` must avoid the truncation."""
    cells, skipped = [], 0
    for x in centers:
        for R in radii:
            if _fits(g, x, reach * R):
                cells.append((x, R))
            else:
                skipped += 1
    return cells, skipped


def _grid_desc(centers, radii, reach, skipped):
    return {"centers": [int(c) for c in centers], "radii": [int(r) for r in radii],
            "reach": reach, "skipped_cells": skipped}


# ---------------------------------------------------------------------------
# volume doubling


def verify_vd(g: WeightedGraph, cfg: VerifierConfig | None = None) -> ConditionReport:
    """``D_V = max V(x, 2R)/V(x, R)`` and the anti-doubling constant ``A_V``."""
    cfg = cfg or VerifierConfig()
    centers = default_centers(g, cfg)
    cells, skipped = _grid(g, cfg, centers, cfg.radii, 2)
    dv, av = Measure("vd", "upper"), Measure("av", "upper")
    rep = ConditionReport("vd", _grid_desc(centers, cfg.radii, 2, skipped), [dv, av])
    for x, R in cells:
        v1, v2 = volume(g, x, R), volume(g, x, 2 * R)
        dv.offer(v2 / v1, R, {"x": x})
        A = next((a for a in (2, 3, 4) if _fits(g, x, a * R) and 2 * v1 <= volume(g, x, a * R)), None)
        if A is not None:
            av.offer(A, R, {"x": x})
        rep.samples.append({"x": x, "R": R, "V_R": v1, "V_2R": v2, "ratio": v2 / v1, "A_V": A})
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# time comparison


def verify_tc(g: WeightedGraph, table: ScalingTable, cfg: VerifierConfig | None = None) -> ConditionReport:
    """``C_T = max E(x, 2R)/E(y, R)`` and the (wTC) ratio ``E(x, R)/E(y, R)`` for ``y in B(x, R)``."""
    cfg = cfg or VerifierConfig()
    tc, wtc = Measure("tc", "upper"), Measure("wtc", "upper")
    radii = [R for R in cfg.radii if 2 * R in set(table.radii.tolist())]
    rep = ConditionReport("tc", _grid_desc(table.centers, radii, 2, 0), [tc, wtc])
    for x in table.centers:
        for R in radii:
            for y in table.neighbours(x, R):
                a = table.value(x, 2 * R) / table.value(y, R)
                b = table.value(x, R) / table.value(y, R)
                tc.offer(a, R, {"x": int(x), "y": int(y)})
                wtc.offer(b, R, {"x": int(x), "y": int(y)})
                rep.samples.append({"x": int(x), "y": int(y), "R": R, "tc": a, "wtc": b})
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# elliptic Harnack and mean value


def harnack_constant(g: WeightedGraph, x: int, R: int) -> tuple[float, int]:
    """Best (H) constant on ``B(x, R)`` for harmonic ``u >= 0`` on ``B(x, 2R)``.

    Returns the constant and the boundary vertex whose Poisson column
    attains it.
    """
    B2, inner = ball(g, x, 2 * R), ball(g, x, R)
    K = poisson_kernel(g, B2)
    rows = K.matrix[_pos(B2.ids, inner.ids)]
    ratio = rows.max(axis=0) / rows.min(axis=0)
    j = int(np.argmax(ratio))
    return float(ratio[j]), int(K.boundary.ids[j])


def harnack_ratio_for(g: WeightedGraph, x: int, R: int, z: int) -> float:
    """(H) ratio of the single extremal ``K(., z)``; used to replay witnesses."""
    B2, inner = ball(g, x, 2 * R), ball(g, x, R)
    col = poisson_kernel(g, B2).column(z)[_pos(B2.ids, inner.ids)]
    return float(col.max() / col.min())


def verify_harnack(g: WeightedGraph, cfg: VerifierConfig | None = None) -> ConditionReport:
    cfg = cfg or VerifierConfig()
    centers = default_centers(g, cfg)
    cells, skipped = _grid(g, cfg, centers, cfg.radii, 2)
    h = Measure("h", "upper")
    rep = ConditionReport("h", _grid_desc(centers, cfg.radii, 2, skipped), [h])
    for x, R in cells:
        C, z = harnack_constant(g, x, R)
        h.offer(C, R, {"x": x, "z": z})
        rep.samples.append({"x": x, "R": R, "C": C, "z": z})
    return _finish(rep, cfg)


def mv_constant(g: WeightedGraph, x: int, R: int) -> tuple[float, int]:
    """Best (MV) constant over harmonic ``u >= 0`` on ``B(x, R)``."""
    B = ball(g, x, R)
    K = poisson_kernel(g, B)
    mass = g.measure[B.ids] @ K.matrix
    vals = K.matrix[_pos(B.ids, [x])[0]] * g.measure[B.ids].sum() / mass
    j = int(np.argmax(vals))
    return float(vals[j]), int(K.boundary.ids[j])


def verify_mv(g: WeightedGraph, cfg: VerifierConfig | None = None) -> ConditionReport:
    cfg = cfg or VerifierConfig()
    centers = default_centers(g, cfg)
    cells, skipped = _grid(g, cfg, centers, cfg.radii, 1)
    m = Measure("mv", "upper")
    rep = ConditionReport("mv", _grid_desc(centers, cfg.radii, 1, skipped), [m])
    for x, R in cells:
        C, z = mv_constant(g, x, R)
        m.offer(C, R, {"x": x, "z": z})
        rep.samples.append({"x": x, "R": R, "C": C, "z": z})
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# Green kernel bounds


def green_annulus(g: WeightedGraph, x: int, R: int) -> tuple[np.ndarray, np.ndarray]:
    """``g^B(x, y)`` for ``y`` in ``A = B(x, R) \\ B(x, ceil(R/2))``, ``B = B(x, 2R)``."""
    B = ball(g, x, 2 * R)
    gf = green(g, B, x)
    d = bfs_distances(g, [x], max_depth=R)[B.ids]
    sel = (d >= math.ceil(R / 2)) & (d < R)
    return B.ids[sel], gf.values[sel]


def verify_gF(g: WeightedGraph, table: ScalingTable, cfg: VerifierConfig | None = None) -> ConditionReport:
    """Two-sided Green kernel bounds on the annulus ``B(x,R) \\ B(x,R/2)``."""
    cfg = cfg or VerifierConfig()
    radii = [R for R in cfg.radii if 2 * R in set(table.radii.tolist())]
    cells, skipped = _grid(g, cfg, table.centers.tolist(), radii, 2)
    up, lo = Measure("gue", "upper"), Measure("gle", "lower")
    rep = ConditionReport("gf", _grid_desc(table.centers, radii, 2, skipped), [up, lo])
    for x, R in cells:
        ys, vals = green_annulus(g, x, R)
        scale = volume(g, x, 2 * R) / table.value(x, 2 * R)
        i, j = int(np.argmax(vals)), int(np.argmin(vals))
        up.offer(vals[i] * scale, R, {"x": x, "y": int(ys[i])})
        lo.offer(vals[j] * scale, R, {"x": x, "y": int(ys[j])})
        rep.samples.append({"x": x, "R": R, "C": vals[i] * scale, "c": vals[j] * scale})
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# Einstein relation and resistance


def rho_v_value(g: WeightedGraph, x: int, r: int, R: int) -> float:
    """``rho(x, r, R) v(x, r, R)``."""
    return annulus_resistance(g, x, r, R).resistance * annulus_volume(g, x, r, R)


def resistance_volume_slack(g: WeightedGraph, x: int, r: int, R: int) -> float:
    """Relative slack of ``rho(x,r,R) v(x,r,R) >= (R - r)^2``; negative means violated."""
    return rho_v_value(g, x, r, R) / (R - r) ** 2 - 1.0


def verify_einstein(g: WeightedGraph, table: ScalingTable, cfg: VerifierConfig | None = None) -> ConditionReport:
    """(ER) ratio, (RLE), resistance-volume growth and cross-centre uniformity."""
    cfg = cfg or VerifierConfig()
    radii = [R for R in cfg.radii if 2 * R in set(table.radii.tolist())]
    cells, skipped = _grid(g, cfg, table.centers.tolist(), radii, 2)
    hi, lo = Measure("er_max", "upper"), Measure("er_min", "lower")
    rle, spread = Measure("rle", "lower"), Measure("rho_v_spread", "upper")
    rep = ConditionReport("er", _grid_desc(table.centers, radii, 2, skipped), [hi, lo, rle, spread])
    by_R: dict[int, dict[int, float]] = {}
    for x, R in cells:
        res = annulus_resistance(g, x, R, 2 * R)
        v = annulus_volume(g, x, R, 2 * R)
        rv = res.resistance * v
        if rv < (R * R) * (1 - cfg.gate_rtol):
            rep.hard_violations.append({"x": x, "r": R, "R": 2 * R, "rho_v": rv})
        E2 = table.value(x, 2 * R)
        ratio = E2 / rv
        hi.offer(ratio, R, {"x": x})
        lo.offer(ratio, R, {"x": x})
        r = res.resistance * volume(g, x, 2 * R) / E2
        rle.offer(r, R, {"x": x})
        by_R.setdefault(R, {})[x] = rv
        rep.samples.append({"x": x, "R": R, "E_2R": E2, "rho": res.resistance, "v": v,
                            "ratio": ratio, "rle": r})
    for R, row in by_R.items():
        xs = list(row)
        vals = np.array([row[c] for c in xs])
        spread.offer(vals.max() / vals.min(), R,
                     {"x": xs[int(np.argmax(vals))], "y": xs[int(np.argmin(vals))]})
    slopes = {}
    for x in {c for c, _ in cells}:
        Rs = sorted(R for c, R in cells if c == x)
        if len(Rs) >= 2:
            slopes[str(x)] = math.log(by_R[Rs[-1]][x] / by_R[Rs[0]][x]) / math.log(Rs[-1] / Rs[0])
    rep.extra["rho_v_exponent"] = slopes
    if slopes:
        bp = min(slopes.values())
        rep.notes.append(f"rho*v growth exponent min {bp:.4g}"
                         + (" (> 1)" if bp > 1 else " (<= 1)"))
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# eigenvalue bound


def verify_lambda_bound(g: WeightedGraph, table: ScalingTable,
                        cfg: VerifierConfig | None = None) -> ConditionReport:
    """``c = min lambda(B(x, R)) F(x, R)``."""
    cfg = cfg or VerifierConfig()
    radii = [R for R in cfg.radii if R in set(table.radii.tolist())]
    cells, skipped = _grid(g, cfg, table.centers.tolist(), radii, 1)
    m = Measure("lambda", "lower")
    rep = ConditionReport("lambda", _grid_desc(table.centers, radii, 1, skipped), [m])
    for x, R in cells:
        lam = smallest_eigenvalue(g, ball(g, x, R)).value
        val = lam * table.value(x, R)
        m.offer(val, R, {"x": x})
        rep.samples.append({"x": x, "R": R, "lambda": lam, "lambda_F": val})
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# heat kernel estimates


def _fit_radii(table):
    """Dyadic radii >= 4 when there are three of them, else every tabulated power of two."""
    r = table.radii
    pow2 = r[(r & (r - 1)) == 0]
    return pow2[pow2 >= 4] if (pow2 >= 4).sum() >= 3 else pow2


def _exponents(table, cfg):
    beta, beta_p = cfg.beta, cfg.beta_prime
    if beta is None or beta_p is None:
        ex = fit_exponents(table, radii=_fit_radii(table))
        beta = ex.beta if beta is None else beta
        beta_p = ex.beta_prime if beta_p is None else beta_p
    return beta, beta_p


def _time_windows(table, x, radii, points):
    """Per radius ``R`` a few times ``n`` in ``(F(x, R/2), F(x, R)]``."""
    out = {}
    for R in radii:
        lo = table.value(x, R // 2) if R >= 2 else 0.0
        hi = table.value(x, R)
        ns = np.unique(np.round(np.geomspace(max(lo, 1.0), hi, points + 1)[1:]).astype(int))
        ns = ns[(ns > lo) & (ns <= hi)]
        if len(ns):
            out[R] = ns
    return out


def _volume_fn(g, x, max_r):
    from .graph_core import volume_profile
    prof = volume_profile(g, x, max_r)
    return lambda r: float(prof[min(int(r), max_r)])


def _kernel_radii(table, cfg):
    return [R for R in cfg.radii if R in set(table.radii.tolist())]


def verify_due_ue(g: WeightedGraph, table: ScalingTable, cfg: VerifierConfig | None = None) -> ConditionReport:
    """Diagonal bounds ``p~_n(x,x) V(x, f(x,n))`` and the sub-Gaussian decay rate.

    The decay measure is the smallest ``c`` with
    ``p~_n(x,y) <= C_DUE/V(x,f(x,n)) exp(-c (F(x,d)/n)^{1/(beta-1)})`` over
    samples where ``F(x, d) >= n``.
    """
    cfg = cfg or VerifierConfig()
    beta, _ = _exponents(table, cfg)
    radii = _kernel_radii(table, cfg)
    due, dle, ue = Measure("due", "upper"), Measure("dle", "lower"), Measure("ue", "lower")
    rep = ConditionReport("due", _grid_desc(table.centers, radii, 1, 0), [due, dle, ue])
    rep.extra["beta"] = beta
    rep.extra["fit_radii"] = _fit_radii(table).tolist()
    pending = []
    leak = 0.0
    for x in table.centers.tolist():
        wins = _time_windows(table, x, radii, cfg.kernel_points)
        if not wins:
            continue
        n_max = int(max(ns.max() for ns in wins.values()))
        P = kernel_series(g, x, n_max + 1)
        leak = max(leak, _truncation_leak(g, x, n_max + 1))
        Vf = _volume_fn(g, x, int(table.radii.max()))
        dist = bfs_distances(g, [x], max_depth=int(table.radii.max()))
        for R, ns in wins.items():
            for n in ns.tolist():
                f = inverse_scaling(table, x, n)
                V = Vf(f)
                pt = P[n, x] + P[n + 1, x]
                due.offer(pt * V, R, {"x": x, "y": x, "n": n})
                dle.offer(pt * V, R, {"x": x, "y": x, "n": n})
                rep.samples.append({"x": x, "y": x, "R": R, "n": n, "f": f, "pV": pt * V})
                for d in table.radii.tolist():
                    if d < 1 or table.value(x, d) < n or d > n + 1:
                        continue
                    ring = np.flatnonzero(dist == d)
                    if not len(ring):
                        continue
                    for y in ring[:: max(1, len(ring) // 4)][:4].tolist():
                        py = P[n, y] + P[n + 1, y]
                        if py > 0:
                            arg = (table.value(x, d) / n) ** (1 / (beta - 1))
                            pending.append((R, x, y, n, d, py * V, arg))
    C = due.constant
    for R, x, y, n, d, pv, arg in pending:
        c = math.log(C / pv) / arg
        ue.offer(c, R, {"x": x, "y": y, "n": n, "d": d, "C_due": C, "beta": beta})
    rep.extra["truncation_leak"] = leak
    return _finish(rep, cfg)


def _truncation_leak(g, x, n):
    """Probability that the walk from ``x`` meets the truncation set within ``n`` steps."""
    if not len(g.truncation):
        return 0.0
    r = g.boundary_distance[x]
    if not np.isfinite(r) or n < r:
        return 0.0
    U = np.flatnonzero(g.boundary_distance > 0)
    P = kernel_series(g, x, n, B=U)
    return float(1.0 - P[n] @ g.measure)


def verify_ndle_ple(g: WeightedGraph, table: ScalingTable, cfg: VerifierConfig | None = None) -> ConditionReport:
    """Near-diagonal lower bounds, plain (NDLE) and killed on ``B(x, R)`` (PLE)."""
    cfg = cfg or VerifierConfig()
    radii = _kernel_radii(table, cfg)
    nd, ple = Measure("ndle", "lower"), Measure("ple", "lower")
    rep = ConditionReport("ndle", _grid_desc(table.centers, radii, 1, 0), [nd, ple])
    rmax = int(table.radii.max())
    for x in table.centers.tolist():
        wins = _time_windows(table, x, radii, cfg.kernel_points)
        if not wins:
            continue
        Vf = _volume_fn(g, x, rmax)
        dist = bfs_distances(g, [x], max_depth=rmax)
        n_max = int(max(ns.max() for ns in wins.values()))
        P = kernel_series(g, x, n_max + 1)
        for R, ns in wins.items():
            for n in ns.tolist():
                f = inverse_scaling(table, x, n)
                ys = np.flatnonzero((dist >= 0) & (dist < min(cfg.ndle_delta * f, n)))
                vals = (P[n, ys] + P[n + 1, ys]) * Vf(f)
                k = int(np.argmin(vals))
                nd.offer(vals[k], R, {"x": x, "y": int(ys[k]), "n": n})
        for R in radii:
            if not _fits(g, x, R):
                continue
            B = ball(g, x, R)
            n_top = int(math.floor(cfg.ple_eps * table.value(x, R)))
            if n_top < 1:
                continue
            PB = kernel_series(g, x, n_top + 1, B=B)
            for n in np.unique(np.round(np.geomspace(1, n_top, cfg.kernel_points))).astype(int).tolist():
                f = inverse_scaling(table, x, n)
                ys = np.flatnonzero((dist >= 0) & (dist < min(cfg.ndle_delta * f, n)))
                if not len(ys):
                    continue
                vals = (PB[n, ys] + PB[n + 1, ys]) * Vf(f)
                k = int(np.argmin(vals))
                ple.offer(vals[k], R, {"x": x, "y": int(ys[k]), "n": n})
                rep.samples.append({"x": x, "R": R, "n": n, "ple": float(vals[k])})
    return _finish(rep, cfg)


def verify_le(g: WeightedGraph, table: ScalingTable, cfg: VerifierConfig | None = None) -> ConditionReport:
    """Sub-Gaussian lower bound: smallest ``C`` with
    ``p~_n(x,y) >= c/V(x,f(x,n)) exp(-C (F(x,d)/n)^{1/(beta'-1)})`` for ``n >= d``.

    ``c`` is the near-diagonal constant measured on the same grid.  The
    ``le_l`` measure is the analogous rate against ``l(n, R, A)``.
    """
    from .scaling_laws import sub_gaussian_l_set
    cfg = cfg or VerifierConfig()
    _, beta_p = _exponents(table, cfg)
    if not beta_p > 1:
        raise NotApplicableBetaPrime(f"fitted beta' = {beta_p:.4g} is not > 1")
    radii = _kernel_radii(table, cfg)
    le, lel = Measure("le", "upper"), Measure("le_l", "upper")
    rep = ConditionReport("le", _grid_desc(table.centers, radii, 1, 0), [le])
    rep.extra["beta_prime"] = beta_p
    nd = verify_ndle_ple(g, table, cfg).measure("ndle").constant
    c0 = min(1.0, nd)
    rep.extra["c_near_diagonal"] = c0
    rmax = int(table.radii.max())
    for x in table.centers.tolist():
        wins = _time_windows(table, x, radii, cfg.kernel_points)
        if not wins:
            continue
        Vf = _volume_fn(g, x, rmax)
        dist = bfs_distances(g, [x], max_depth=rmax)
        n_max = int(max(ns.max() for ns in wins.values()))
        P = kernel_series(g, x, n_max + 1)
        for R, ns in wins.items():
            for n in ns.tolist():
                f = inverse_scaling(table, x, n)
                for d in table.radii.tolist():
                    if d > n or table.value(x, d) < n:
                        continue
                    ring = np.flatnonzero(dist == d)
                    if not len(ring):
                        continue
                    y = int(ring[0])
                    pv = (P[n, y] + P[n + 1, y]) * Vf(f)
                    gap = max(0.0, math.log(c0 / pv))
                    arg = (table.value(x, d) / n) ** (1 / (beta_p - 1))
                    le.offer(gap / arg, R, {"x": x, "y": y, "n": n, "d": d})
                    A = [c for c in table.centers.tolist() if dist[c] >= 0 and dist[c] < d + f]
                    try:
                        l = sub_gaussian_l_set(table, A, n, d, cfg.Cl)
                    except OutOfTabulatedRange:
                        continue
                    lel.offer(gap / l, R, {"x": x, "y": y, "n": n, "d": d, "l": l})
                    rep.samples.append({"x": x, "y": y, "n": n, "d": d, "pV": pv, "rate": gap / arg})
    rep.extra["le_l"] = lel.to_dict()
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# parabolic mean value inequalities


def time_window(F: float, a: float, b: float, closed_right: bool = True) -> np.ndarray:
    """Integer times in ``[aF, bF]`` (or ``[aF, bF)``)."""
    lo = math.ceil(a * F - 1e-12)
    hi = math.floor(b * F + 1e-12)
    if not closed_right and hi >= b * F - 1e-12:
        hi = math.ceil(b * F) - 1
    return np.arange(lo, hi + 1)


def _iter_killed_rows(g, B, rows, steps):
    """Yield ``(P^B)^m`` restricted to ``rows`` x ``B`` for ``m = 0..steps``."""
    idx = _pos(B.ids, rows)
    PBT = g.transition_matrix[B.ids][:, B.ids].T.tocsr()
    M = np.zeros((len(rows), len(B)))
    M[np.arange(len(rows)), idx] = 1.0
    yield M
    for _ in range(steps):
        M = np.asarray((PBT @ M.T).T)
        yield M


def _killed_rows(g, B, rows, steps):
    return list(_iter_killed_rows(g, B, rows, steps))


def pmv_constant(g: WeightedGraph, x: int, R: int, F: float, c, delta: float = 1.0):
    """Best PMV constant over caloric solutions killed outside ``B(x, R)``.

    Extremals are the solutions started from a point mass at ``y in B``.
    ``nu(D^-)`` counts the integer times of the window.
    """
    c1, c2, c3, c4, c5 = c
    Im, Ip = time_window(F, c1, c2), time_window(F, c3, c4)
    if not len(Im) or not len(Ip):
        raise CylinderTooSmall(f"empty PMV window at F={F:g}")
    B, small = ball(g, x, R), ball(g, x, delta * R)
    M = _killed_rows(g, B, small.ids, int(Ip.max()))
    mu = g.measure[small.ids]
    nu = len(Im) * mu.sum()
    den = sum(mu @ M[i] for i in Im) / nu
    top = np.stack([M[k] for k in Ip])
    num = top.max(axis=(0, 1))
    ratio = np.where(den > 0, num / np.where(den > 0, den, 1), np.inf)
    j = int(np.argmax(ratio))
    k, r = np.unravel_index(np.argmax(top[:, :, j]), top.shape[:2])
    return float(ratio[j]), {"y": int(B.ids[j]), "n_plus": int(Ip[k]), "x_plus": int(small.ids[r])}


def psmv_constant(g: WeightedGraph, x: int, R: int, F: float, c, delta: float):
    """Best PSMV constant over Dirichlet super-solutions on ``B(x, R)``.

    A super-solution is ``u_n = sum_{t<=n} (P^B)^{n-t} s_t`` with sources
    ``s_t >= 0``, so point sources ``(t, y)`` generate the whole cone.
    """
    c1, c2, c3, c4, c5 = c
    Im, Ip = time_window(F, c1, c2), time_window(F, c3, c4)
    if not len(Im) or not len(Ip):
        raise CylinderTooSmall(f"empty PSMV window at F={F:g}")
    B, small = ball(g, x, R), ball(g, x, delta * R)
    lags = int(Ip.max()) + 2
    M = _killed_rows(g, B, small.ids, lags)
    mu = g.measure[small.ids]
    nu = len(Im) * mu.sum()
    # tilde rows by lag; index 0 is lag -1 (only u_t = source is seen)
    Mt = [M[0]] + [M[m] + M[m + 1] for m in range(lags)]
    S = np.stack([mu @ A for A in Mt])              # (lags+1, |B|)
    Mn = np.stack([A.min(axis=0) for A in Mt])
    best, wit = math.inf, None
    for t in range(0, int(Im.max()) + 2):
        lm = Im - t + 1
        lm = lm[lm >= 0]
        if not len(lm):
            continue
        den = S[lm].sum(axis=0) / nu
        lp = Ip - t + 1
        num = Mn[lp].min(axis=0) if (lp >= 0).all() else np.zeros(len(B))
        ok = den > 0
        if not ok.any():
            continue
        r = np.full(len(B), np.inf)
        r[ok] = num[ok] / den[ok]
        j = int(np.argmin(r))
        if r[j] < best:
            best, wit = float(r[j]), {"t": t, "y": int(B.ids[j])}
    if wit is None:
        raise CylinderTooSmall("no source reaches the lower window")
    return best, wit


def super_solution_from_source(g, B, t: int, y: int, T: int) -> np.ndarray:
    """``u_n = (P^B)^{n-t} 1_y`` for ``n >= t`` (zero before), as ``(T+1, |B|)``."""
    PB = g.transition_matrix[B.ids][:, B.ids].tocsr()
    u = np.zeros((T + 1, len(B)))
    if t <= T:
        u[t, _pos(B.ids, [y])[0]] = 1.0
        for n in range(t, T):
            u[n + 1] = PB @ u[n]
    return u


def pmv_ratio_of(u: np.ndarray, B, small_ids, mu_small, F: float, c) -> float:
    """PMV ratio ``max_{D+} u * nu(D-)/sum_{D-} u mu`` of one solution on ``B``."""
    c1, c2, c3, c4, _ = c
    Im, Ip = time_window(F, c1, c2), time_window(F, c3, c4)
    sel = _pos(B.ids, small_ids)
    num = u[np.ix_(Ip, sel)].max()
    den = (u[np.ix_(Im, sel)] @ mu_small).sum() / (len(Im) * mu_small.sum())
    return float(num / den)


def psmv_ratio_of(u: np.ndarray, B, small_ids, mu_small, F: float, c) -> float:
    """PSMV ratio ``min_{D+} u~ * nu(D-)/sum_{D-} u~ mu`` of one super-solution."""
    c1, c2, c3, c4, _ = c
    Im, Ip = time_window(F, c1, c2), time_window(F, c3, c4)
    sel = _pos(B.ids, small_ids)
    ut = u[:-1] + u[1:]
    num = ut[np.ix_(Ip, sel)].min()
    den = (ut[np.ix_(Im, sel)] @ mu_small).sum() / (len(Im) * mu_small.sum())
    return float(num / den)


def verify_pmv_psmv(g: WeightedGraph, table: ScalingTable, cfg: VerifierConfig | None = None) -> ConditionReport:
    """PMV over caloric solutions (exact) and PSMV over super-solutions (exact).

    PMV is stated for sub-solutions; solutions are a sub-cone, so the PMV
    constant reported here is a lower bound for the sub-solution constant.
    """
    cfg = cfg or VerifierConfig()
    cfg.validate()
    radii = [R for R in cfg.radii if R <= cfg.parabolic_max_radius and R in set(table.radii.tolist())]
    cells, skipped = _grid(g, cfg, table.centers.tolist(), radii, 1)
    pm, ps = Measure("pmv", "upper"), Measure("psmv", "lower")
    rep = ConditionReport("pmv", _grid_desc(table.centers, radii, 1, skipped), [pm, ps])
    rep.notes.append("pmv: exact over caloric solutions; sub-solutions checked in the necessary direction only")
    rep.notes.append("psmv: exact over super-solutions (point sources generate the cone)")
    small = 0
    for x, R in cells:
        F = table.value(x, R)
        try:
            C, w = pmv_constant(g, x, R, F, cfg.pmv_c, cfg.pmv_delta)
            pm.offer(C, R, dict(w, x=x, F=F))
            c, w2 = psmv_constant(g, x, R, F, cfg.psmv_c, cfg.psmv_delta)
            ps.offer(c, R, dict(w2, x=x, F=F))
            rep.samples.append({"x": x, "R": R, "F": F, "pmv": C, "psmv": c})
        except CylinderTooSmall:
            small += 1
    rep.extra["skipped_small_R"] = small
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# parabolic Harnack


def ph_windows(F: float) -> tuple[np.ndarray, np.ndarray]:
    """``D^-`` times ``[F/4, F/2]`` and ``D^+`` times ``[3F/4, F)`` with ``n + 1 <= F``."""
    Im = time_window(F, 0.25, 0.5)
    Ip = time_window(F, 0.75, 1.0, closed_right=False)
    Ip = Ip[Ip + 1 <= F + 1e-12]
    return Im, Ip


def smdist_ok(d_minus_plus, n_minus, n_plus) -> np.ndarray:
    """Admissible pairs: ``d(x-, x+) <= n+ - n-``."""
    return np.asarray(d_minus_plus) <= np.asarray(n_plus) - np.asarray(n_minus)


def _masked_max_ratio(A, Bt, allowed):
    """``max_{a, b: allowed[a, b]} A[a, j] / Bt[b, j]`` per column ``j``; with argmax info."""
    if allowed.all():
        lo = Bt.min(axis=0)
        hi = A.max(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(hi > 0, hi / lo, 0.0)
        return r, A.argmax(axis=0), Bt.argmin(axis=0)
    big = np.where(allowed[:, :, None], Bt[None, :, :], np.inf).min(axis=1)   # (a, j)
    arg_b = np.where(allowed[:, :, None], Bt[None, :, :], np.inf).argmin(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(A > 0, A / big, 0.0)
    ia = r.argmax(axis=0)
    cols = np.arange(A.shape[1])
    return r[ia, cols], ia, arg_b[ia, cols]


def ph_constant(g: WeightedGraph, x: int, R: int, F: float):
    """Best PH constant on ``[0, F] x B(x, 2R)`` over nonnegative solutions.

    Extremals: point-mass initial data at ``y in B(x, 2R)`` and point-mass
    lateral data at ``(t, z)``, ``z`` on the boundary of ``B(x, 2R)``.
    Only pairs satisfying ``d(x-, x+) <= n+ - n-`` are compared.
    """
    Im, Ip = ph_windows(F)
    if not len(Im) or not len(Ip):
        raise CylinderTooSmall(f"empty PH window at F={F:g}")
    B2, inner = ball(g, x, 2 * R), ball(g, x, R)
    _, bnd = closure_and_boundary(g, B2)
    T = int(Ip.max()) + 1
    D = np.stack([bfs_distances(g, [a], max_depth=2 * R)[inner.ids] for a in inner.ids])
    diam = int(D.max())
    active = int(Ip.min()) - int(Im.max()) < diam
    Pz = g.transition_matrix[B2.ids][:, bnd.ids].toarray()
    keep_m, keep_p = set(Im.tolist()), set(Ip.tolist())
    # stream M_m = rows of (P^B)^m; lateral extremal (t, z) has
    # u_{t+m}(x') = L[m][x', z] with L[m] = M_{m-1} Pz for m >= 1
    L = [np.zeros((len(inner), len(bnd)))]
    Mfull, Mtfull, hi, lo = {}, {}, {}, {}
    prev = None
    for m, M in enumerate(_iter_killed_rows(g, B2, inner.ids, T)):
        L.append(M @ Pz)
        if m in keep_m:
            if active:
                Mfull[m] = M
            else:
                hi[m] = M.max(axis=0)
        if m - 1 in keep_p:
            Mt = prev + M
            if active:
                Mtfull[m - 1] = Mt
            else:
                lo[m - 1] = Mt.min(axis=0)
        prev = M
    L.append(prev @ Pz)
    best, wit = -math.inf, None

    def take(val, info):
        nonlocal best, wit
        if val > best:
            best, wit = float(val), info

    if not active:
        # every pair is admissible: maximise the numerator and minimise the
        # denominator independently
        H = np.stack([hi[n] for n in Im])
        Lo = np.stack([lo[n] for n in Ip])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = H.max(axis=0) / Lo.min(axis=0)
        j = int(np.nanargmax(r))
        nm, npl = int(Im[H[:, j].argmax()]), int(Ip[Lo[:, j].argmin()])
        take(r[j], {"kind": "initial", "y": int(B2.ids[j]), "n_minus": nm, "n_plus": npl})
        Lmax = np.stack([A.max(axis=0) for A in L])
        Ltmin = np.stack([(L[m] + L[m + 1]).min(axis=0) for m in range(len(L) - 1)])
        for t in range(0, int(Im.max())):
            a = Im[Im > t] - t
            b = Ip - t
            num, den = Lmax[a], Ltmin[b]
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(num.max(axis=0) > 0, num.max(axis=0) / den.min(axis=0), 0.0)
            j = int(np.argmax(r))
            nm, npl = int(a[num[:, j].argmax()] + t), int(b[den[:, j].argmin()] + t)
            take(r[j], {"kind": "lateral", "z": int(bnd.ids[j]), "t": t, "n_minus": nm,
                        "n_plus": npl,
                        "x_minus": int(inner.ids[L[nm - t][:, j].argmax()]),
                        "x_plus": int(inner.ids[(L[npl - t] + L[npl - t + 1])[:, j].argmin()])})
        if wit["kind"] == "initial":
            # recover the attaining vertices for the initial-data witness
            y = _pos(B2.ids, [wit["y"]])[0]
            rows = {n: M[:, y] for n, M in enumerate(_iter_killed_rows(g, B2, inner.ids, T))}
            wit["x_minus"] = int(inner.ids[rows[wit["n_minus"]].argmax()])
            npl = wit["n_plus"]
            wit["x_plus"] = int(inner.ids[(rows[npl] + rows[npl + 1]).argmin()])
    else:
        for nm in Im.tolist():
            for npl in Ip.tolist():
                allowed = D <= npl - nm
                r, ia, ib = _masked_max_ratio(Mfull[nm], Mtfull[npl], allowed)
                j = int(np.argmax(r))
                take(r[j], {"kind": "initial", "y": int(B2.ids[j]), "n_minus": nm, "n_plus": npl,
                            "x_minus": int(inner.ids[ia[j]]), "x_plus": int(inner.ids[ib[j]])})
                for t in range(0, nm):
                    a, b = nm - t, npl - t
                    r, ia, ib = _masked_max_ratio(L[a], L[b] + L[b + 1], allowed)
                    j = int(np.argmax(r))
                    take(r[j], {"kind": "lateral", "z": int(bnd.ids[j]), "t": t, "n_minus": nm,
                                "n_plus": npl, "x_minus": int(inner.ids[ia[j]]),
                                "x_plus": int(inner.ids[ib[j]])})
    wit["smdist_active"] = bool(active)
    return best, wit


def ph_ratio_of(sol, x: int, R: int, F: float, g: WeightedGraph) -> float:
    """PH ratio ``max u_{n-}(x-)/u~_{n+}(x+)`` over admissible pairs for one solution."""
    Im, Ip = ph_windows(F)
    inner = ball(g, x, R)
    idx = _pos(sol.closure.ids, inner.ids)
    D = np.stack([bfs_distances(g, [a], max_depth=2 * R)[inner.ids] for a in inner.ids])
    best = -math.inf
    for nm in Im.tolist():
        for npl in Ip.tolist():
            allowed = D <= npl - nm
            a = sol.values[nm, idx][:, None]
            b = (sol.values[npl, idx] + sol.values[npl + 1, idx])[None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.where(a > 0, a / b, 0.0)
            best = max(best, float(r[allowed].max()))
    return best


def verify_ph(g: WeightedGraph, table: ScalingTable, cfg: VerifierConfig | None = None) -> ConditionReport:
    """Parabolic Harnack constant with ``k = 0`` (the equation is time-homogeneous)."""
    cfg = cfg or VerifierConfig()
    radii = [R for R in cfg.radii if R <= cfg.parabolic_max_radius and R in set(table.radii.tolist())]
    cells, skipped = _grid(g, cfg, table.centers.tolist(), radii, 2)
    ph = Measure("ph", "upper")
    rep = ConditionReport("ph", _grid_desc(table.centers, radii, 2, skipped), [ph])
    small = 0
    for x, R in cells:
        F = table.value(x, R)
        try:
            C, w = ph_constant(g, x, R, F)
        except CylinderTooSmall:
            small += 1
            continue
        ph.offer(C, R, dict(w, x=x, F=F))
        rep.samples.append({"x": x, "R": R, "F": F, "C": C})
    rep.extra["skipped_small_R"] = small
    return _finish(rep, cfg)


# ---------------------------------------------------------------------------
# witness replay


def replay_witness(g: WeightedGraph, key: str, witness: dict, table: ScalingTable | None = None,
                   cfg: VerifierConfig | None = None) -> float:
    """Recompute a reported constant from its stored witness alone."""
    from .markov_kernel import evolve_cylinder
    cfg = cfg or VerifierConfig()
    x, R = witness["x"], witness["R"]
    if key == "vd":
        return volume(g, x, 2 * R) / volume(g, x, R)
    if key in ("tc", "wtc"):
        top = table.value(x, 2 * R if key == "tc" else R)
        return top / table.value(witness["y"], R)
    if key == "h":
        return harnack_ratio_for(g, x, R, witness["z"])
    if key == "mv":
        B = ball(g, x, R)
        col = poisson_kernel(g, B).column(witness["z"])
        return float(col[_pos(B.ids, [x])[0]] * g.measure[B.ids].sum() / (g.measure[B.ids] @ col))
    if key in ("gue", "gle"):
        B = ball(g, x, 2 * R)
        return green(g, B, x).at(witness["y"]) * volume(g, x, 2 * R) / table.value(x, 2 * R)
    if key in ("er_max", "er_min"):
        return table.value(x, 2 * R) / rho_v_value(g, x, R, 2 * R)
    if key == "lambda":
        return smallest_eigenvalue(g, ball(g, x, R)).value * table.value(x, R)
    if key in ("due", "dle"):
        n = witness["n"]
        P = kernel_series(g, x, n + 1)
        f = inverse_scaling(table, x, n)
        return float((P[n, x] + P[n + 1, x]) * volume(g, x, f))
    if key == "pmv":
        B, small = ball(g, x, R), ball(g, x, cfg.pmv_delta * R)
        init = np.zeros(len(B))
        init[_pos(B.ids, [witness["y"]])[0]] = 1.0
        T = int(time_window(witness["F"], cfg.pmv_c[2], cfg.pmv_c[3]).max())
        sol = evolve_cylinder(g, B, init, T=T)
        u = sol.values[:, sol.interior]
        return pmv_ratio_of(u, B, small.ids, g.measure[small.ids], witness["F"], cfg.pmv_c)
    if key == "psmv":
        B, small = ball(g, x, R), ball(g, x, cfg.psmv_delta * R)
        T = int(time_window(witness["F"], cfg.psmv_c[2], cfg.psmv_c[3]).max()) + 1
        u = super_solution_from_source(g, B, witness["t"], witness["y"], T)
        return psmv_ratio_of(u, B, small.ids, g.measure[small.ids], witness["F"], cfg.psmv_c)
    if key == "ph":
        F = witness["F"]
        B2 = ball(g, x, 2 * R)
        _, bnd = closure_and_boundary(g, B2)
        T = int(ph_windows(F)[1].max()) + 1
        init = np.zeros(len(B2))
        lateral = np.zeros((T + 1, len(bnd)))
        if witness["kind"] == "initial":
            init[_pos(B2.ids, [witness["y"]])[0]] = 1.0
        else:
            lateral[witness["t"], _pos(bnd.ids, [witness["z"]])[0]] = 1.0
        sol = evolve_cylinder(g, B2, init, lateral, T=T)
        nm, npl = witness["n_minus"], witness["n_plus"]
        a = sol.at(nm, witness["x_minus"])
        b = sol.at(npl, witness["x_plus"]) + sol.at(npl + 1, witness["x_plus"])
        return a / b
    raise KeyError(f"no replay for {key!r}")


# ---------------------------------------------------------------------------
# dashboard


VERIFIERS = {
    "vd": ("vd", False), "tc": ("tc", True), "h": ("h", False), "gf": ("gf", True),
    "er": ("er", True), "due": ("due", True), "ue": ("due", True), "ndle": ("ndle", True),
    "ple": ("ndle", True), "le": ("le", True), "pmv": ("pmv", True), "psmv": ("pmv", True),
    "ph": ("ph", True), "mv": ("mv", False), "lambda": ("lambda", True),
}

_FUNCS = {
    "vd": verify_vd, "tc": verify_tc, "h": verify_harnack, "gf": verify_gF, "er": verify_einstein,
    "due": verify_due_ue, "ndle": verify_ndle_ple, "le": verify_le, "pmv": verify_pmv_psmv,
    "ph": verify_ph, "mv": verify_mv, "lambda": verify_lambda_bound,
}


def run_conditions(g: WeightedGraph, names, table: ScalingTable | None = None,
                   cfg: VerifierConfig | None = None) -> list[ConditionReport]:
    """Run the named verifiers once each (aliases such as ``ple`` share a run)."""
    cfg = cfg or VerifierConfig()
    done, out = set(), []
    for name in names:
        if name not in VERIFIERS:
            raise KeyError(f"unknown condition {name!r}")
        base, needs_table = VERIFIERS[name]
        if base in done:
            continue
        done.add(base)
        fn = _FUNCS[base]
        if needs_table:
            if table is None:
                raise ValueError(f"condition {name!r} needs a scaling table")
            try:
                out.append(fn(g, table, cfg))
            except NotApplicableBetaPrime as exc:
                out.append(ConditionReport(base, {}, [Measure(base, "upper")], verdict="skipped",
                                           notes=[f"not applicable: {exc}"]))
        else:
            out.append(fn(g, cfg))
    return out


def coherence(reports) -> dict:
    """Group verdicts for the four equivalent condition groups.

    Each group takes the worst verdict of its members; ``coherent`` is true
    when all measured groups agree.
    """
    by_key = {m.key: m for r in reports for m in r.measures}
    groups = {}
    for gname, keys in COHERENCE_GROUPS.items():
        present = [by_key[k] for k in keys if k in by_key]
        if len(present) < len(keys):
            groups[gname] = {"verdict": "skipped", "members": {m.key: m.verdict for m in present}}
            continue
        groups[gname] = {"verdict": worst_verdict(m.verdict for m in present),
                         "members": {m.key: m.verdict for m in present}}
    measured = {v["verdict"] for v in groups.values() if v["verdict"] != "skipped"}
    return {"groups": groups, "coherent": len(measured) <= 1,
            "split": sorted(measured) if len(measured) > 1 else []}


__all__ = [
    "VerifierConfig", "Measure", "ConditionReport", "stability_verdict", "worst_verdict",
    "default_centers", "verify_vd", "verify_tc", "verify_harnack", "verify_mv", "verify_gF",
    "verify_einstein", "verify_lambda_bound", "verify_due_ue", "verify_ndle_ple", "verify_le",
    "verify_pmv_psmv", "verify_ph", "harnack_constant", "mv_constant", "pmv_constant",
    "psmv_constant", "ph_constant", "ph_ratio_of", "ph_windows", "smdist_ok",
    "resistance_volume_slack", "rho_v_value", "replay_witness", "run_conditions", "coherence",
    "COHERENCE_GROUPS", "TruncationViolation",
]
