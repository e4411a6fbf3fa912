"""Simulated random walks as an independent check on the exact solvers.

Trials run in fixed-size blocks of lockstep walkers.  Block ``b`` draws from
a Philox stream keyed by ``(seed, b)``, so results do not depend on how the
blocks are scheduled.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph_core import WeightedGraph, ball, closure_and_boundary

BLOCK = 4096
Z95 = 1.96


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with a 95% half-width ``1.96 * sd / sqrt(trials)``."""

    target: str
    estimate: float
    half_width: float
    trials: int
    seed: int
    sd: float = 0.0
    meta: dict = field(default_factory=dict)

    def interval(self, k: float = 1.0) -> tuple[float, float]:
        """``estimate -/+ k * half_width``."""
        return self.estimate - k * self.half_width, self.estimate + k * self.half_width

    def covers(self, value: float, sigmas: float = 3.0) -> bool:
        """Whether ``value`` lies within ``sigmas`` standard errors."""
        se = self.sd / math.sqrt(self.trials)
        return abs(value - self.estimate) <= sigmas * se + 1e-12 * max(1.0, abs(value))

    def to_dict(self) -> dict:
        return {"target": self.target, "estimate": self.estimate, "half_width": self.half_width,
                "trials": self.trials, "seed": self.seed, "sd": self.sd, "meta": self.meta}


@dataclass(frozen=True)
class ExitSiteEstimate:
    """Empirical exit distribution on the boundary of a ball."""

    boundary: np.ndarray
    counts: np.ndarray
    trials: int
    seed: int

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.trials

    @property
    def half_widths(self) -> np.ndarray:
        p = self.frequencies
        return Z95 * np.sqrt(p * (1 - p) / self.trials)

    def as_dict(self) -> dict[int, float]:
        return {int(z): float(f) for z, f in zip(self.boundary, self.frequencies)}

    def to_dict(self) -> dict:
        return {"target": "exit_site", "boundary": self.boundary.tolist(),
                "counts": self.counts.tolist(), "frequencies": self.frequencies.tolist(),
                "trials": self.trials, "seed": self.seed}


class _Stepper:
    """Cumulative-weight inversion over CSR rows.

    Entry ``k`` of row ``x`` gets the key ``x + cum_k`` with ``cum`` the
    running transition probability, so one ``searchsorted`` on
    ``x + U`` samples a neighbour of every walker at once.
    """

    def __init__(self, g: WeightedGraph):
        rows = np.repeat(np.arange(g.vertex_count), np.diff(g.indptr))
        p = g.weights / g.measure[rows]
        cum = np.empty_like(p)
        for x in range(g.vertex_count):
            lo, hi = g.indptr[x], g.indptr[x + 1]
            c = np.cumsum(p[lo:hi])
            c[-1] = 1.0
            cum[lo:hi] = c
        self.keys = rows + cum
        self.indices = g.indices

    def __call__(self, pos: np.ndarray, u: np.ndarray) -> np.ndarray:
        k = np.searchsorted(self.keys, pos + u, side="right")
        return self.indices[k]


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _blocks(trials: int):
    out, start = [], 0
    while start < trials:
        out.append((len(out), min(BLOCK, trials - start)))
        start += BLOCK
    return out


def _threads(threads):
    if threads is None:
        threads = int(os.environ.get("HEATLAB_THREADS", "1") or 1)
    return max(1, int(threads))


def _run(fn, trials, threads):
    blocks = _blocks(trials)
    n = _threads(threads)
    if n == 1:
        return [fn(b, m) for b, m in blocks]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda bm: fn(*bm), blocks))


def _summarise(samples, target, trials, seed, meta=None) -> McEstimate:
    x = np.concatenate(samples).astype(float)
    mean = math.fsum(x) / len(x)
    sd = float(np.sqrt(math.fsum((x - mean) ** 2) / (len(x) - 1))) if len(x) > 1 else 0.0
    return McEstimate(target, mean, Z95 * sd / math.sqrt(len(x)), trials, seed, sd, meta or {})


def _check_trials(trials):
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")


def _exit_walk(g, x, inside, trials, seed, threads, max_steps):
    step = _Stepper(g)

    def block(b, m):
        rng = _rng(seed, b)
        pos = np.full(m, x, dtype=np.int64)
        T = np.zeros(m, dtype=np.int64)
        alive = np.arange(m)
        n = 0
        while len(alive):
            n += 1
            if n > max_steps:
                raise RuntimeError(f"walk exceeded {max_steps} steps")
            pos[alive] = step(pos[alive], rng.random(len(alive)))
            T[alive] += 1
            alive = alive[inside[pos[alive]]]
        return T, pos

    return _run(block, trials, threads)


def mc_exit_time(g: WeightedGraph, x: int, R: float, trials: int = 10_000, seed: int = 0,
                 threads: int | None = None, max_steps: int = 10 ** 7) -> McEstimate:
    """Mean of ``T = min{k : X_k not in B(x, R)}`` for the walk started at ``x``."""
    _check_trials(trials)
    inside = ball(g, x, R).mask(g.vertex_count)
    out = _exit_walk(g, x, inside, trials, seed, threads, max_steps)
    return _summarise([T for T, _ in out], f"exit_time(x={x},R={R})", trials, seed)


def mc_exit_site(g: WeightedGraph, x: int, R: float, trials: int = 10_000, seed: int = 0,
                 threads: int | None = None, max_steps: int = 10 ** 7, domain=None) -> ExitSiteEstimate:
    """Counts of the first vertex outside ``B(x, R)`` (or ``domain``) reached by the walk."""
    _check_trials(trials)
    A = ball(g, x, R) if domain is None else domain
    inside = A.mask(g.vertex_count) if hasattr(A, "mask") else np.isin(np.arange(g.vertex_count), A)
    _, bnd = closure_and_boundary(g, np.flatnonzero(inside))
    out = _exit_walk(g, x, inside, trials, seed, threads, max_steps)
    sites = np.concatenate([p for _, p in out])
    counts = np.bincount(np.searchsorted(bnd.ids, sites), minlength=len(bnd))
    return ExitSiteEstimate(bnd.ids, counts, trials, seed)


def mc_kernel(g: WeightedGraph, x: int, y: int, n: int, trials: int = 10_000, seed: int = 0,
              threads: int | None = None) -> McEstimate:
    """Estimate ``p~_n(x, y) = (P(X_n = y) + P(X_{n+1} = y)) / mu(y)``."""
    _check_trials(trials)
    step = _Stepper(g)
    mu = float(g.measure[y])

    def block(b, m):
        rng = _rng(seed, b)
        pos = np.full(m, x, dtype=np.int64)
        hits = np.zeros(m)
        for k in range(1, n + 2):
            pos = step(pos, rng.random(m))
            if k >= n:
                hits += pos == y
        if n == 0:
            hits += x == y
        return hits / mu

    return _summarise(_run(block, trials, threads), f"kernel_tilde(x={x},y={y},n={n})", trials, seed)


__all__ = ["McEstimate", "ExitSiteEstimate", "mc_exit_time", "mc_exit_site", "mc_kernel"]
