import numpy as np
import pytest

from heatlab.errors import (
    NonConvergence,
    OverlappingTerminals,
    RadiusOrderViolation,
    SingularSystem,
    SourceOutsideDomain,
)
from heatlab.generators import lattice
from heatlab.graph_core import ball, build_graph
from heatlab.potential_theory import (
    DirichletSolver,
    PotentialCache,
    annulus_resistance,
    dirichlet_energy,
    effective_resistance,
    green,
    harmonic_solve,
    mean_exit_time,
    poisson_kernel,
    rayleigh_quotient,
    smallest_eigenvalue,
)

# Frozen values from an independent networkx/numpy computation.
Z2_EXIT = {1: 1.0, 2: 2.666666666667, 3: 5.571428571429, 4: 9.680672268908,
           8: 37.956161306004}
GASKET_EXIT = {2: 3.5, 4: 15.25, 8: 72.875}
VICSEK_EXIT = {2: 4.0, 4: 12.0, 8: 92.0}


@pytest.mark.parametrize("R, E", sorted(Z2_EXIT.items()))
def test_z2_exit_time(z2_small, R, E):
    assert mean_exit_time(z2_small, z2_small.labels["center"], R).E == pytest.approx(E, rel=1e-10)


@pytest.mark.parametrize("R, E", sorted(GASKET_EXIT.items()))
def test_gasket_exit_time(gasket5, R, E):
    assert mean_exit_time(gasket5, gasket5.labels["apex"], R).E == pytest.approx(E, rel=1e-10)


@pytest.mark.parametrize("R, E", sorted(VICSEK_EXIT.items()))
def test_vicsek_exit_time(vicsek3, R, E):
    assert mean_exit_time(vicsek3, vicsek3.labels["center"], R).E == pytest.approx(E, rel=1e-10)


@pytest.mark.parametrize("R", [1, 2, 5, 9, 20])
def test_path_exit_time_is_square(z1, R):
    f = mean_exit_time(z1, z1.labels["center"], R)
    assert f.E == pytest.approx(R * R)
    assert f.E_bar == pytest.approx(R * R)
    x = z1.labels["center"]
    assert f.at(x + 1) == pytest.approx(R * R - 1)


@pytest.mark.parametrize("method", ["dense", "lu", "cg"])
def test_solver_methods_agree(gasket5, method):
    x = gasket5.labels["apex"]
    B = ball(gasket5, x, 8)
    s = DirichletSolver(gasket5, B, method=method)
    E = s.solve(gasket5.measure[s.ids])[s.position(x)]
    assert E == pytest.approx(72.875, rel=1e-8)
    assert s.last_residual < 1e-9


def test_solver_errors(z1):
    with pytest.raises(SingularSystem):
        DirichletSolver(z1, np.arange(z1.vertex_count))
    s = DirichletSolver(z1, [3, 4, 5])
    with pytest.raises(SourceOutsideDomain):
        s.position(10)
    with pytest.raises(ValueError):
        DirichletSolver(z1, [3, 4], method="qr")


def test_green_sums_to_exit_time(gasket5):
    x = gasket5.labels["apex"]
    B = ball(gasket5, x, 8)
    gf = green(gasket5, B, x)
    assert float(np.dot(gf.values, gasket5.measure[B.ids])) == pytest.approx(72.875)
    y = B.ids[7]
    assert gf.at(y) == pytest.approx(green(gasket5, B, y).at(x))
    assert gf.at(10 ** 6 % gasket5.vertex_count) >= 0


def test_path_green_on_diagonal(z1):
    x = z1.labels["center"]
    for R in (3, 6):
        # the walk on {-R+1..R-1} visits its start R times on average; mu = 2
        assert green(z1, ball(z1, x, R), x).at(x) == pytest.approx(R / 2)


def test_annulus_resistance_path(z1):
    x = z1.labels["center"]
    assert annulus_resistance(z1, x, 4, 8).resistance == pytest.approx(2.0)
    assert annulus_resistance(z1, x, 4, 8, inner="open").resistance == pytest.approx(2.5)
    with pytest.raises(RadiusOrderViolation):
        annulus_resistance(z1, x, 4, 4)
    with pytest.raises(RadiusOrderViolation):
        annulus_resistance(z1, x, 0, 4)


def test_annulus_resistance_z2(z2_small):
    x = z2_small.labels["center"]
    assert annulus_resistance(z2_small, x, 1, 4).resistance == pytest.approx(0.18697478991596633, rel=1e-9)
    assert annulus_resistance(z2_small, x, 2, 8).resistance == pytest.approx(0.19794432064870682, rel=1e-9)


def test_effective_resistance_series_parallel():
    g = build_graph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 0.5)])
    # 2 ohm in parallel with 2 ohm
    assert effective_resistance(g, [0], [2]).resistance == pytest.approx(1.0)
    with pytest.raises(OverlappingTerminals):
        effective_resistance(g, [0, 1], [1])


def test_energy_identity(vicsek3):
    f = np.sin(np.arange(vicsek3.vertex_count))
    e = dirichlet_energy(vicsek3, f, check=True)
    assert e > 0
    assert rayleigh_quotient(vicsek3, np.ones(vicsek3.vertex_count)) == 0


@pytest.mark.parametrize("R, lam", [(3, 0.13397459621556135), (6, 0.03407417371093169)])
def test_interval_eigenvalue(z1, R, lam):
    # B(x, R) on Z is a path of 2R-1 vertices: lambda = 1 - cos(pi / 2R)
    x = z1.labels["center"]
    res = smallest_eigenvalue(z1, ball(z1, x, R), tol=1e-11)
    assert res.value == pytest.approx(lam, rel=1e-8)
    assert res.value == pytest.approx(1 - np.cos(np.pi / (2 * R)), rel=1e-8)


def test_eigenvalue_nonconvergence(gasket5):
    with pytest.raises(NonConvergence):
        smallest_eigenvalue(gasket5, ball(gasket5, gasket5.labels["apex"], 8), tol=0.0, max_iters=3)


def test_eigenvalue_lower_bounds_exit_time(gasket5):
    x = gasket5.labels["apex"]
    B = ball(gasket5, x, 8)
    lam = smallest_eigenvalue(gasket5, B).value
    assert 1 / lam >= mean_exit_time(gasket5, x, 8).E_bar * 0.5


def test_poisson_kernel_rows_sum_to_one(gasket5):
    B = ball(gasket5, gasket5.labels["apex"], 5)
    K = poisson_kernel(gasket5, B)
    assert np.allclose(K.matrix.sum(axis=1), 1.0)
    assert np.all(K.matrix >= -1e-14)
    z = K.boundary.ids[0]
    bvals = (K.boundary.ids == z).astype(float)
    h = harmonic_solve(gasket5, B, bvals)
    assert np.allclose(h[B.ids], K.column(z))
    assert np.isnan(h).sum() == gasket5.vertex_count - len(B) - len(K.boundary)


def test_harmonic_solve_linear_on_path(z1):
    x = z1.labels["center"]
    B = ball(z1, x, 5)
    h = harmonic_solve(z1, B, {x - 5: 0.0, x + 5: 10.0})
    assert np.allclose(h[x - 5:x + 6], np.arange(11))


def test_cache(gasket5):
    c = PotentialCache(gasket5)
    x = gasket5.labels["apex"]
    assert c.E(x, 0) == 0.0
    assert c.E(x, 4) == pytest.approx(15.25)
    assert c.exit_field(x, 4) is c.exit_field(x, 4)


def test_larger_lattice_uses_lu():
    g = lattice(2, 129)
    x = g.labels["center"]
    B = ball(g, x, 40)
    assert DirichletSolver(g, B).method == "lu"
    E = mean_exit_time(g, x, 40).E
    assert 0.55 * 1600 < E < 0.62 * 1600
