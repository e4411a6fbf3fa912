import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatlab.errors import (
    ConflictingDuplicateEdge,
    DisconnectedGraph,
    NonPositiveWeight,
    RadiusOrderViolation,
    SelfLoop,
    TruncationViolation,
)
from heatlab.graph_core import (
    annulus_volume,
    ball,
    bfs_distances,
    build_graph,
    check_p0,
    closure_and_boundary,
    read_edges,
    volume,
    volume_profile,
    write_edges,
)


def triangle():
    return build_graph([(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)])


def test_measure_is_incident_weight_sum():
    g = triangle()
    assert g.measure.tolist() == [4.0, 3.0, 5.0]
    assert g.edge_count == 3


def test_transition_rows_sum_to_one():
    g = triangle()
    P = g.transition_matrix.toarray()
    assert np.allclose(P.sum(axis=1), 1.0)
    # reversibility: mu(x) P(x,y) = mu(y) P(y,x)
    M = g.measure[:, None] * P
    assert np.allclose(M, M.T)


def test_duplicate_edges():
    g = build_graph([(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0)])
    assert g.edge_count == 2
    with pytest.raises(ConflictingDuplicateEdge):
        build_graph([(0, 1, 1.0), (1, 0, 2.0)])


@pytest.mark.parametrize("edges, exc", [
    ([(0, 1, 0.0)], NonPositiveWeight),
    ([(0, 1, -1.0)], NonPositiveWeight),
    ([(0, 0, 1.0), (0, 1, 1.0)], SelfLoop),
    ([(0, 1, 1.0), (2, 3, 1.0)], DisconnectedGraph),
])
def test_invalid_input(edges, exc):
    with pytest.raises(exc):
        build_graph(edges)


def test_p0(z2_small):
    assert check_p0(z2_small) == pytest.approx(0.25)
    assert check_p0(triangle()) == pytest.approx(1 / 4)


def test_ball_is_strict(z1):
    x = z1.labels["center"]
    assert ball(z1, x, 1).ids.tolist() == [x]
    assert len(ball(z1, x, 3)) == 5
    assert len(ball(z1, x, 0)) == 0


def test_path_volume(z1):
    x = z1.labels["center"]
    for R in range(1, 10):
        assert volume(z1, x, R) == 2 * (2 * R - 1)


def test_lattice_volume(z2_small):
    x = z2_small.labels["center"]
    for R in range(1, 10):
        assert volume(z2_small, x, R) == 4 * (2 * R * R - 2 * R + 1)


def test_volume_profile_matches_balls(gasket5):
    x = gasket5.labels["apex"]
    prof = volume_profile(gasket5, x, 12)
    for R in range(13):
        assert prof[R] == volume(gasket5, x, R)


def test_annulus(z1):
    x = z1.labels["center"]
    assert annulus_volume(z1, x, 2, 5) == volume(z1, x, 5) - volume(z1, x, 2)
    with pytest.raises(RadiusOrderViolation):
        annulus_volume(z1, x, 5, 5)


def test_closure_and_boundary(z1):
    x = z1.labels["center"]
    B = ball(z1, x, 3)
    clo, bnd = closure_and_boundary(z1, B)
    assert bnd.ids.tolist() == [x - 3, x + 3]
    assert len(clo) == 7


def test_truncation_guard(z2_small):
    x = z2_small.labels["center"]
    z2_small.require_untruncated(x, 16)
    with pytest.raises(TruncationViolation):
        z2_small.require_untruncated(x, 17)


def test_edge_roundtrip(tmp_path, gasket5):
    p = tmp_path / "g.edges"
    write_edges(gasket5, p)
    h = read_edges(p)
    assert h.vertex_count == gasket5.vertex_count
    assert sorted(h.edges()) == sorted(gasket5.edges())
    assert h.labels == gasket5.labels
    assert h.truncation.tolist() == gasket5.truncation.tolist()


def test_edge_file_without_sidecar(tmp_path):
    p = tmp_path / "t.edges"
    p.write_text("vertices 3\n0 1 1.0\n1 2 2.5\n")
    g = read_edges(p)
    assert g.measure.tolist() == [1.0, 3.5, 2.5]


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 25), st.integers(0, 24), st.integers(1, 12))
def test_bfs_matches_path_metric(n, x, R):
    x = x % n
    g = build_graph([(i, i + 1, 1.0) for i in range(n - 1)])
    d = bfs_distances(g, [x])
    assert d.tolist() == [abs(i - x) for i in range(n)]
    assert ball(g, x, R).ids.tolist() == [i for i in range(n) if abs(i - x) < R]
