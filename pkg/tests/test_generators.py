import networkx as nx
import numpy as np
import pytest

from heatlab.errors import LevelTooLarge, SizeTooSmall
from heatlab.generators import (
    gasket_counts,
    glue,
    lattice,
    path_graph,
    sierpinski_gasket,
    vicsek_tree,
)
from heatlab.graph_core import bfs_distances


def as_nx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.vertex_count))
    G.add_weighted_edges_from(g.edges())
    return G


@pytest.mark.parametrize("level", [0, 1, 2, 3, 4, 5])
def test_gasket_counts(level):
    g = sierpinski_gasket(level)
    assert (g.vertex_count, g.edge_count) == gasket_counts(level)


def test_gasket_degrees_and_corners():
    g = sierpinski_gasket(4)
    deg = np.diff(g.indptr)
    corners = [g.labels[k] for k in ("apex", "left", "right")]
    assert set(deg[corners]) == {2}
    assert set(np.delete(deg, corners)) == {4}
    d = bfs_distances(g, [g.labels["apex"]])
    assert d[g.labels["left"]] == d[g.labels["right"]] == 16
    assert sorted(g.truncation.tolist()) == sorted([g.labels["left"], g.labels["right"]])


def test_gasket_cap():
    with pytest.raises(LevelTooLarge):
        sierpinski_gasket(9)
    with pytest.raises(SizeTooSmall):
        sierpinski_gasket(-1)


@pytest.mark.parametrize("level", [1, 2, 3, 4])
def test_vicsek_is_tree(level):
    g = vicsek_tree(level)
    assert g.vertex_count == 5 ** level
    assert nx.is_tree(as_nx(g))
    c = g.labels["center"]
    d = bfs_distances(g, [c])
    assert d.max() == (3 ** level - 1) // 2
    assert len(g.truncation) == 4


def test_lattice_shape():
    g = lattice(2, 9)
    assert g.vertex_count == 81
    assert g.edge_count == 2 * 9 * 8
    assert len(g.truncation) == 81 - 49
    assert g.boundary_distance[g.labels["center"]] == 4
    g3 = lattice(3, 5)
    assert g3.vertex_count == 125


@pytest.mark.parametrize("side", [4, 3, 6])
def test_lattice_side_checks(side):
    with pytest.raises(SizeTooSmall):
        lattice(2, side)


def test_lattice_weights():
    g = lattice(1, 7, weight=lambda u, v: 1.0 + u)
    assert sorted(w for _, _, w in g.edges()) == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]


def test_path_graph():
    g = path_graph(5)
    assert g.vertex_count == 6
    assert len(g.truncation) == 0


def test_glue_two_copies():
    g = sierpinski_gasket(2)
    h = glue(g, g, "apex", "apex")
    assert h.vertex_count == 2 * g.vertex_count - 1
    assert h.edge_count == 2 * g.edge_count
    j = h.labels["junction"]
    assert h.measure[j] == 2 * g.measure[g.labels["apex"]]
    assert j not in set(h.truncation.tolist())
    assert len(h.truncation) == 4


def test_glue_lattice_gasket():
    h = glue(lattice(1, 21), sierpinski_gasket(3), "center", "apex")
    assert nx.is_connected(as_nx(h))
    assert h.labels["a.center"] == h.labels["junction"]
