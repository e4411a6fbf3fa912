"""Finite weighted graphs with metric and measure primitives.

A :class:`WeightedGraph` stores a symmetric conductance structure in CSR
form together with the vertex measure ``mu(x) = sum_y mu_xy``.  Vertex ids
are dense integers ``0..n-1``.

Graphs produced by the generators are truncations of infinite graphs.  The
vertices whose neighbourhood was cut (the *truncation set*) are recorded so
that callers can check whether a ball is unaffected by the truncation: every
vertex of ``B(x, R)`` has its full neighbourhood iff ``d(x, T) >= R``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import (
    ConflictingDuplicateEdge,
    DisconnectedGraph,
    NonPositiveWeight,
    RadiusOrderViolation,
    SelfLoop,
    TruncationViolation,
)

UNREACHED = -1


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable symmetric weighted graph.

    Attributes
    ----------
    indptr, indices, weights : ndarray
        CSR adjacency; ``weights[k]`` is the conductance of the edge
        ``x -> indices[k]`` for ``indptr[x] <= k < indptr[x+1]``.
    measure : ndarray
        Vertex measure ``mu(x)``.
    truncation : ndarray
        Vertices whose neighbourhood was cut off by truncation of an
        infinite graph.  Empty for graphs taken as they are.
    interior_mask : ndarray of bool
        Vertices far enough from the truncation to serve as ball centres.
    labels : dict
        Named vertices (``"center"``, ``"apex"``, ...).
    coords : ndarray or None
        Optional coordinate label per vertex.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    measure: np.ndarray
    truncation: np.ndarray
    interior_mask: np.ndarray
    labels: dict = field(default_factory=dict)
    coords: np.ndarray | None = None
    family: str = "custom"

    @property
    def vertex_count(self) -> int:
        return len(self.measure)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, x: int) -> np.ndarray:
        return self.indices[self.indptr[x]:self.indptr[x + 1]]

    def adjacency(self, x: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[x], self.indptr[x + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.weights[lo:hi].tolist()))

    def edges(self) -> Iterable[tuple[int, int, float]]:
        """Each undirected edge once, as ``(u, v, w)`` with ``u < v``."""
        for u in range(self.vertex_count):
            for v, w in self.adjacency(u):
                if u < v:
                    yield u, v, w

    @cached_property
    def weight_matrix(self) -> sparse.csr_matrix:
        n = self.vertex_count
        return sparse.csr_matrix((self.weights, self.indices, self.indptr), shape=(n, n))

    @cached_property
    def transition_matrix(self) -> sparse.csr_matrix:
        """``P(x, y) = mu_xy / mu(x)`` as a CSR matrix."""
        return sparse.diags(1.0 / self.measure) @ self.weight_matrix

    @cached_property
    def _pattern(self) -> sparse.csr_matrix:
        n = self.vertex_count
        ones = np.ones(len(self.indices), dtype=np.int8)
        return sparse.csr_matrix((ones, self.indices, self.indptr), shape=(n, n))

    @cached_property
    def boundary_distance(self) -> np.ndarray:
        """Graph distance from each vertex to the truncation set (inf if empty)."""
        if len(self.truncation) == 0:
            return np.full(self.vertex_count, np.inf)
        d = bfs_distances(self, self.truncation).astype(float)
        d[d < 0] = np.inf
        return d

    def vertex(self, key) -> int:
        """Resolve a vertex given as an id or a label name."""
        if isinstance(key, str):
            if key in self.labels:
                return int(self.labels[key])
            return int(key)
        return int(key)

    def require_untruncated(self, x: int, R: float) -> None:
        """Raise if ``B(x, R)`` contains a truncated vertex."""
        if self.boundary_distance[x] < R:
            raise TruncationViolation(
                f"ball B({x}, {R}) reaches the truncation (distance "
                f"{self.boundary_distance[x]:g})"
            )

    def with_interior(self, margin: float, r_max: float) -> "WeightedGraph":
        """Copy with ``interior_mask = d(x, T) >= margin * r_max``."""
        mask = self.boundary_distance >= margin * r_max
        return WeightedGraph(
            self.indptr, self.indices, self.weights, self.measure, self.truncation,
            _frozen(mask, bool), dict(self.labels), self.coords, self.family,
        )


@dataclass(frozen=True)
class VertexSet:
    """Sorted vertex ids with a provenance tag."""

    ids: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        ids = np.unique(np.asarray(self.ids, dtype=np.int64))
        ids.setflags(write=False)
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids.tolist())

    def __contains__(self, x) -> bool:
        i = np.searchsorted(self.ids, x)
        return bool(i < len(self.ids) and self.ids[i] == x)

    def mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        m[self.ids] = True
        return m


def build_graph(
    edges: Iterable[Sequence],
    vertex_count: int | None = None,
    truncation: Iterable[int] = (),
    labels: dict | None = None,
    coords=None,
    family: str = "custom",
    margin: float = 4.0,
    r_max: float | None = None,
) -> WeightedGraph:
    """Build and validate a weighted graph from ``(u, v, w)`` triples.

    Duplicate entries for the same unordered pair are merged when their
    weights agree.  The graph must be connected.
    """
    merged: dict[tuple[int, int], float] = {}
    top = -1
    for e in edges:
        u, v, w = int(e[0]), int(e[1]), float(e[2])
        if u == v:
            raise SelfLoop(f"self loop at vertex {u}")
        if not w > 0:
            raise NonPositiveWeight(f"edge ({u}, {v}) has weight {w}")
        key = (u, v) if u < v else (v, u)
        if key in merged and merged[key] != w:
            raise ConflictingDuplicateEdge(
                f"edge {key} given with weights {merged[key]} and {w}"
            )
        merged[key] = w
        top = max(top, u, v)
    n = top + 1 if vertex_count is None else int(vertex_count)
    if n < top + 1:
        raise ValueError(f"edge endpoint {top} exceeds vertex count {n}")
    if not merged:
        raise DisconnectedGraph("graph has no edges")

    pairs = np.array(list(merged.keys()), dtype=np.int64)
    w = np.array(list(merged.values()), dtype=float)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    vals = np.concatenate([w, w])
    W = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    W.sort_indices()
    measure = np.asarray(W.sum(axis=1)).ravel()
    if np.any(measure <= 0):
        raise DisconnectedGraph(f"isolated vertex {int(np.argmin(measure))}")

    trunc = np.unique(np.asarray(list(truncation), dtype=np.int64))
    g = WeightedGraph(
        _frozen(W.indptr, np.int64),
        _frozen(W.indices, np.int64),
        _frozen(W.data, float),
        _frozen(measure, float),
        _frozen(trunc, np.int64),
        _frozen(np.ones(n, dtype=bool), bool),
        dict(labels or {}),
        None if coords is None else _frozen(coords, np.int64),
        family,
    )
    ncomp = sparse.csgraph.connected_components(g.weight_matrix, directed=False)[0]
    if ncomp != 1:
        raise DisconnectedGraph(f"graph has {ncomp} connected components")
    if len(trunc):
        if r_max is None:
            finite = g.boundary_distance[np.isfinite(g.boundary_distance)]
            r_max = max(1.0, np.floor(finite.max() / margin))
        g = g.with_interior(margin, r_max)
    return g


def check_p0(g: WeightedGraph) -> float:
    """Smallest one-step transition probability ``min mu_xy / mu(x)``."""
    rows = np.repeat(np.arange(g.vertex_count), np.diff(g.indptr))
    return float(np.min(g.weights / g.measure[rows]))


def bfs_distances(g: WeightedGraph, sources, max_depth: float | None = None) -> np.ndarray:
    """Hop distance from a source set; :data:`UNREACHED` beyond ``max_depth``."""
    n = g.vertex_count
    dist = np.full(n, UNREACHED, dtype=np.int64)
    frontier = np.zeros(n, dtype=bool)
    frontier[np.atleast_1d(np.asarray(sources, dtype=np.int64))] = True
    dist[frontier] = 0
    depth = 0
    A = g._pattern
    while frontier.any():
        if max_depth is not None and depth >= max_depth:
            break
        depth += 1
        reach = (A @ frontier.astype(np.int8)) > 0
        new = reach & (dist == UNREACHED)
        dist[new] = depth
        frontier = new
    return dist


def ball(g: WeightedGraph, x: int, R: float) -> VertexSet:
    """``B(x, R) = {y : d(x, y) < R}``; ``R = 1`` gives ``{x}``."""
    if R <= 0:
        return VertexSet(np.empty(0, dtype=np.int64), "ball")
    depth = int(np.ceil(R)) - 1
    dist = bfs_distances(g, [x], max_depth=depth)
    return VertexSet(np.flatnonzero((dist >= 0) & (dist < R)), "ball")


def volume(g: WeightedGraph, x: int, R: float) -> float:
    return float(g.measure[ball(g, x, R).ids].sum())


def annulus_volume(g: WeightedGraph, x: int, r: float, R: float) -> float:
    """``v(x, r, R) = V(x, R) - V(x, r)`` for ``R > r > 0``."""
    if not R > r:
        raise RadiusOrderViolation(f"annulus needs R > r, got r={r}, R={R}")
    return volume(g, x, R) - volume(g, x, r)


def volume_profile(g: WeightedGraph, x: int, R_max: int) -> np.ndarray:
    """``V(x, R)`` for ``R = 0..R_max`` by accumulating BFS layers."""
    dist = bfs_distances(g, [x], max_depth=R_max)
    layer = np.bincount(dist[dist >= 0], weights=g.measure[dist >= 0], minlength=R_max + 1)
    out = np.zeros(R_max + 1)
    out[1:] = np.cumsum(layer[:R_max])
    return out


def closure_and_boundary(g: WeightedGraph, A) -> tuple[VertexSet, VertexSet]:
    """Closure ``A ∪ {y : y ~ x for some x in A}`` and boundary ``closure \\ A``."""
    ids = A.ids if isinstance(A, VertexSet) else np.asarray(A, dtype=np.int64)
    if len(ids) == 0:
        raise ValueError("closure of an empty set")
    inside = np.zeros(g.vertex_count, dtype=bool)
    inside[ids] = True
    touched = (g._pattern @ inside.astype(np.int8)) > 0
    closure = inside | touched
    return VertexSet(np.flatnonzero(closure), "closure"), VertexSet(
        np.flatnonzero(closure & ~inside), "boundary"
    )


# ---------------------------------------------------------------------------
# edge-list interchange format


def write_edges(g: WeightedGraph, path, sidecar: bool = True) -> None:
    """Write ``vertices N`` then one ``u v w`` line per edge.

    With ``sidecar`` a ``<path>.json`` file carries labels, truncation set,
    interior mask and coordinates.
    """
    path = Path(path)
    lines = [f"# heatlab edge list ({g.family})", f"vertices {g.vertex_count}"]
    lines += [f"{u} {v} {w!r}" for u, v, w in g.edges()]
    path.write_text("\n".join(lines) + "\n")
    if sidecar:
        meta = {
            "family": g.family,
            "labels": {k: int(v) for k, v in g.labels.items()},
            "truncation": g.truncation.tolist(),
            "interior_mask": [int(b) for b in g.interior_mask],
            "coords": None if g.coords is None else g.coords.tolist(),
        }
        Path(str(path) + ".json").write_text(json.dumps(meta, sort_keys=True))


def read_edges(path) -> WeightedGraph:
    path = Path(path)
    n = None
    edges = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertices":
            n = int(parts[1])
            continue
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'u v w', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    side = Path(str(path) + ".json")
    if not side.exists():
        return build_graph(edges, vertex_count=n)
    meta = json.loads(side.read_text())
    g = build_graph(
        edges,
        vertex_count=n,
        truncation=meta.get("truncation", ()),
        labels=meta.get("labels", {}),
        coords=meta.get("coords"),
        family=meta.get("family", "file"),
    )
    mask = meta.get("interior_mask")
    if mask is not None:
        g = WeightedGraph(
            g.indptr, g.indices, g.weights, g.measure, g.truncation,
            _frozen(np.asarray(mask, dtype=bool), bool), g.labels, g.coords, g.family,
        )
    return g
