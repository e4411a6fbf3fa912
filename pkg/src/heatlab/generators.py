"""Graph families: Euclidean boxes, pre-Sierpinski gaskets, Vicsek trees.

Every generator records the truncation set of the infinite graph it
approximates, so that balls far from the cut are exact.
"""
from __future__ import annotations

import numpy as np

from .errors import LevelTooLarge, SizeTooSmall
from .graph_core import WeightedGraph, build_graph

GASKET_LEVEL_CAP = 8
VICSEK_LEVEL_CAP = 6
DEFAULT_MARGIN = 4.0


def lattice(d: int, side: int, margin: float = DEFAULT_MARGIN, r_max: float | None = None,
            weight=None) -> WeightedGraph:
    """Box ``{0..side-1}^d`` of ``Z^d`` with unit (or ``weight(u, v)``) conductances.

    The truncation set is the outer shell of the box; ``side`` must be odd
    so that the box has a centre vertex, labelled ``"center"``.
    """
    if d not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {d}")
    if side < 5:
        raise SizeTooSmall(f"side must be >= 5, got {side}")
    if side % 2 == 0:
        raise SizeTooSmall(f"side must be odd, got {side}")
    shape = (side,) * d
    ids = np.arange(side ** d).reshape(shape)
    edges = []
    for axis in range(d):
        lo = [slice(None)] * d
        hi = [slice(None)] * d
        lo[axis] = slice(0, side - 1)
        hi[axis] = slice(1, side)
        u = ids[tuple(lo)].ravel()
        v = ids[tuple(hi)].ravel()
        if weight is None:
            w = np.ones(len(u))
        else:
            w = np.array([weight(a, b) for a, b in zip(u, v)], dtype=float)
        edges.append(np.column_stack([u, v, w]))
    edges = np.vstack(edges)
    coords = np.stack(np.unravel_index(np.arange(side ** d), shape), axis=1) - side // 2
    shell = np.any((coords == -(side // 2)) | (coords == side // 2), axis=1)
    center = int(ids[(side // 2,) * d])
    return build_graph(
        edges, vertex_count=side ** d, truncation=np.flatnonzero(shell),
        labels={"center": center}, coords=coords, family=f"lattice{d}d",
        margin=margin, r_max=r_max,
    )


def path_graph(length: int) -> WeightedGraph:
    """Unit-weight path ``0 - 1 - ... - length`` taken as is (no truncation)."""
    return build_graph([(i, i + 1, 1.0) for i in range(length)], family="path")


def sierpinski_gasket(level: int, cap: int = GASKET_LEVEL_CAP, margin: float = DEFAULT_MARGIN,
                      r_max: float | None = None) -> WeightedGraph:
    """Level-``n`` pre-Sierpinski gasket with unit weights.

    Vertices carry triangular coordinates ``(row, col)`` with the apex at
    ``(0, 0)``; the side has ``2**level`` edges.  The graph is the top piece of
    the one-sided infinite gasket, so only the two bottom corners lose
    neighbours under truncation.  ``level=0`` is a single triangle.
    """
    if level < 0:
        raise SizeTooSmall(f"level must be >= 0, got {level}")
    if level > cap:
        raise LevelTooLarge(f"level {level} exceeds cap {cap}")
    size = 2 ** level
    edges = set()
    stack = [(0, 0, size)]
    while stack:
        i, j, s = stack.pop()
        if s == 1:
            a, b, c = (i, j), (i + 1, j), (i + 1, j + 1)
            edges.update({(a, b), (a, c), (b, c)})
            continue
        h = s // 2
        stack += [(i, j, h), (i + h, j, h), (i + h, j + h, h)]
    pts = sorted({p for e in edges for p in e})
    index = {p: k for k, p in enumerate(pts)}
    elist = [(index[a], index[b], 1.0) for a, b in edges]
    labels = {
        "apex": index[(0, 0)],
        "left": index[(size, 0)],
        "right": index[(size, size)],
    }
    if level >= 1:
        h = size // 2
        labels.update({"mid_left": index[(h, 0)], "mid_right": index[(h, h)],
                       "mid_bottom": index[(size, h)]})
    return build_graph(
        elist, vertex_count=len(pts), truncation=[labels["left"], labels["right"]],
        labels=labels, coords=np.array(pts), family="gasket", margin=margin, r_max=r_max,
    )


def vicsek_tree(level: int, cap: int = VICSEK_LEVEL_CAP, margin: float = DEFAULT_MARGIN,
                r_max: float | None = None) -> WeightedGraph:
    """Level-``n`` Vicsek tree: the plus-shaped cells of a ``3**n`` grid.

    Cells are joined when they are grid neighbours.  Level 1 is the 5-vertex
    star; each level replicates the previous one five times.  The truncation
    set is the four arm tips, where the next level attaches further copies.
    """
    if level < 1:
        raise SizeTooSmall(f"level must be >= 1, got {level}")
    if level > cap:
        raise LevelTooLarge(f"level {level} exceeds cap {cap}")
    plus = np.array([(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)])
    cells = np.zeros((1, 2), dtype=np.int64)
    for k in range(level):
        cells = (cells[None, :, :] + (3 ** k) * plus[:, None, :]).reshape(-1, 2)
    index = {tuple(c): k for k, c in enumerate(cells.tolist())}
    edges = []
    for (a, b), k in index.items():
        for nb in ((a + 1, b), (a, b + 1)):
            if nb in index:
                edges.append((k, index[nb], 1.0))
    reach = (3 ** level - 1) // 2
    tips = [index[t] for t in ((reach, 0), (-reach, 0), (0, reach), (0, -reach))]
    return build_graph(
        edges, vertex_count=len(cells), truncation=tips,
        labels={"center": index[(0, 0)]}, coords=cells, family="vicsek",
        margin=margin, r_max=r_max,
    )


def glue(g1: WeightedGraph, g2: WeightedGraph, x1, x2, margin: float = DEFAULT_MARGIN,
         r_max: float | None = None) -> WeightedGraph:
    """Disjoint union of ``g1`` and ``g2`` with ``x1`` and ``x2`` identified.

    The two arguments are always treated as disjoint copies, so
    ``glue(g, g, x, x)`` joins two copies of ``g`` at ``x``.  Vertices of
    ``g1`` keep their ids; ``g2`` is renumbered after them.  The junction
    keeps ``g1``'s id, its measure is the sum of both incident weight sums,
    and it is removed from the truncation set.
    """
    x1, x2 = g1.vertex(x1), g2.vertex(x2)
    n1 = g1.vertex_count
    remap = np.empty(g2.vertex_count, dtype=np.int64)
    others = [v for v in range(g2.vertex_count) if v != x2]
    remap[others] = n1 + np.arange(len(others))
    remap[x2] = x1
    edges = list(g1.edges()) + [(remap[u], remap[v], w) for u, v, w in g2.edges()]
    trunc = set(g1.truncation.tolist()) | {int(remap[t]) for t in g2.truncation}
    trunc.discard(x1)
    labels = {f"a.{k}": int(v) for k, v in g1.labels.items()}
    labels.update({f"b.{k}": int(remap[v]) for k, v in g2.labels.items()})
    labels["junction"] = x1
    return build_graph(
        edges, vertex_count=n1 + len(others), truncation=sorted(trunc), labels=labels,
        family=f"glue({g1.family},{g2.family})", margin=margin, r_max=r_max,
    )


def from_family(family: str, **kw) -> WeightedGraph:
    """Dispatch used by the CLI: ``lattice``, ``gasket``, ``vicsek``, ``path``."""
    if family == "lattice":
        return lattice(kw.get("dim", 2), kw.get("side", 33))
    if family == "gasket":
        return sierpinski_gasket(kw.get("level", 5))
    if family == "vicsek":
        return vicsek_tree(kw.get("level", 3))
    if family == "path":
        return path_graph(kw.get("side", 10))
    raise ValueError(f"unknown family {family!r}")


def gasket_counts(level: int) -> tuple[int, int]:
    """Closed-form vertex and edge counts ``3(3^n+1)/2`` and ``3^(n+1)``."""
    return 3 * (3 ** level + 1) // 2, 3 ** (level + 1)


__all__ = [
    "lattice", "path_graph", "sierpinski_gasket", "vicsek_tree", "glue",
    "from_family", "gasket_counts",
]
