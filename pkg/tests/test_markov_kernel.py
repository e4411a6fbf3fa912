import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatlab.errors import ShapeMismatch, SourceOutsideDomain, TimeMismatch
from heatlab.graph_core import ball, build_graph
from heatlab.markov_kernel import (
    apply_laplacian,
    dirichlet_kernel,
    evolve_cylinder,
    heat_kernel,
    kernel_series,
    tilde,
    transition_row,
)
from math import comb


def test_transition_row(gasket5):
    x = gasket5.labels["apex"]
    row = transition_row(gasket5, x)
    assert sum(row.values()) == pytest.approx(1.0)
    assert all(v == pytest.approx(0.5) for v in row.values())


def test_path_kernel_is_binomial(z1):
    x = z1.labels["center"]
    for n in (0, 1, 6, 11):
        k = heat_kernel(z1, x, n)
        for j in range(-n, n + 1, 2):
            assert k.values[x + j] * 2 == pytest.approx(comb(n, (n + j) // 2) / 2 ** n)
        assert k.mass(z1) == pytest.approx(1.0)


def test_kernel_symmetry(gasket5):
    a, b = gasket5.labels["apex"], gasket5.labels["mid_left"]
    n = 9
    assert heat_kernel(gasket5, a, n).values[b] == pytest.approx(heat_kernel(gasket5, b, n).values[a])


def test_series_matches_single_rows(vicsek3):
    x = vicsek3.labels["center"]
    S = kernel_series(vicsek3, x, 7)
    for n in (0, 3, 7):
        assert np.allclose(S[n], heat_kernel(vicsek3, x, n).values)


def test_longdouble_series(vicsek3):
    x = vicsek3.labels["center"]
    a = kernel_series(vicsek3, x, 20)
    b = kernel_series(vicsek3, x, 20, dtype=np.longdouble)
    assert b.dtype == np.longdouble
    assert np.allclose(a, b.astype(float), rtol=1e-12, atol=0)


def test_dirichlet_kernel_dominated(z2_small):
    x = z2_small.labels["center"]
    B = ball(z2_small, x, 5)
    for n in (1, 5, 20):
        kd = dirichlet_kernel(z2_small, B, x, n)
        kp = heat_kernel(z2_small, x, n)
        assert np.all(kd.values <= kp.values + 1e-15)
        assert np.all(kd.values[~B.mask(z2_small.vertex_count)] == 0)
    assert dirichlet_kernel(z2_small, B, x, 40).mass(z2_small) < 1.0
    with pytest.raises(SourceOutsideDomain):
        dirichlet_kernel(z2_small, B, x + 10, 1)


def test_tilde(z1):
    x = z1.labels["center"]
    k = tilde(heat_kernel(z1, x, 4), heat_kernel(z1, x, 5))
    assert k.values[x] == pytest.approx(heat_kernel(z1, x, 4).values[x])
    assert k.values[x + 1] == pytest.approx(heat_kernel(z1, x, 5).values[x + 1])
    with pytest.raises(TimeMismatch):
        tilde(heat_kernel(z1, x, 4), heat_kernel(z1, x, 6))


def test_laplacian_of_linear_is_zero(z1):
    f = np.arange(z1.vertex_count, dtype=float)
    lap = apply_laplacian(z1, f)
    assert np.allclose(lap[1:-1], 0)
    with pytest.raises(ShapeMismatch):
        apply_laplacian(z1, f[:-1])


def test_cylinder_matches_dirichlet_kernel(gasket5):
    x = gasket5.labels["apex"]
    B = ball(gasket5, x, 6)
    init = (B.ids == x).astype(float) / gasket5.measure[x]
    sol = evolve_cylinder(gasket5, B, init, T=12)
    assert sol.satisfies(gasket5)
    kd = dirichlet_kernel(gasket5, B, x, 12)
    for y in B.ids[:10]:
        assert sol.at(12, y) == pytest.approx(kd.values[y], abs=1e-15)


def test_cylinder_constant_lateral(z1):
    x = z1.labels["center"]
    B = ball(z1, x, 4)
    sol = evolve_cylinder(z1, B, np.ones(len(B)), lateral=np.ones((11, 2)), T=10)
    assert np.allclose(sol.values, 1.0)
    with pytest.raises(ShapeMismatch):
        evolve_cylinder(z1, B, np.ones(len(B)), lateral=np.ones((10, 2)), T=10)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.1, 10), min_size=4, max_size=12), st.integers(0, 15))
def test_mass_conserved(ws, n):
    g = build_graph([(i, i + 1, w) for i, w in enumerate(ws)])
    k = heat_kernel(g, 0, n)
    assert k.mass(g) == pytest.approx(1.0)
    # reversibility of the weighted walk
    m = len(ws)
    assert heat_kernel(g, m, n).values[0] == pytest.approx(k.values[m], abs=1e-14)
