import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from heatlab.errors import InsufficientGrid, OutOfTabulatedRange
from heatlab.generators import lattice, sierpinski_gasket
from heatlab.scaling_laws import (
    ScalingTable,
    build_scaling_table,
    check_monotone,
    fit_exponents,
    global_m,
    inverse_scaling,
    k_condition,
    rho_v,
    sub_gaussian_k,
    sub_gaussian_l,
    sub_gaussian_l_set,
    volume_table,
)


def power_table(beta=2.0, c=1.0, R_max=64, centers=(0,)):
    return ScalingTable.from_function(lambda x, R: c * R ** beta, list(centers), range(1, R_max + 1))


def test_value_and_neighbours():
    D = np.array([[0, 3], [3, 0]])
    t = ScalingTable.from_function(lambda x, R: R * R + x, [0, 1], [1, 2, 4], center_distance=D)
    assert t.value(1, 2) == 5
    assert t.value(0, 0) == 0.0
    with pytest.raises(OutOfTabulatedRange):
        t.value(0, 3)
    with pytest.raises(KeyError):
        t.row(7)
    assert t.neighbours(0, 3).tolist() == [0]
    assert t.neighbours(0, 4).tolist() == [0, 1]
    assert not t.contiguous


def test_csv_roundtrip():
    t = power_table(R_max=5, centers=(2, 9))
    u = ScalingTable.from_csv(t.to_csv())
    assert np.array_equal(u.values, t.values)
    assert u.centers.tolist() == [2, 9]


def test_monotone_repair_is_recorded():
    t = ScalingTable([0], [1, 2, 3], [[1.0, 1.5, 5.0]])
    found = check_monotone(t)
    assert len(found) == 1 and found[0].radius == 1
    assert t.values[0].tolist() == [1.0, 2.0, 5.0]
    assert t.violations == found and t.monotone_completed


def test_exit_time_table_path():
    g = lattice(1, 81)
    t = build_scaling_table(g, "exit_time", ["center"], range(1, 11))
    assert np.allclose(t.values[0], np.arange(1, 11) ** 2)
    assert not t.violations
    with pytest.raises(ValueError):
        build_scaling_table(g, "bogus", ["center"], [1, 2])


def test_rho_v_path():
    g = lattice(1, 81)
    x = g.labels["center"]
    # rho = R/2 with the closed inner ball, v = 4R
    assert rho_v(g, x, 5) == pytest.approx(2.5 * 20)


def test_inverse_scaling():
    t = power_table()
    assert inverse_scaling(t, 0, 0.5) == 1
    assert inverse_scaling(t, 0, 1) == 1
    assert inverse_scaling(t, 0, 26) == 6
    assert inverse_scaling(t, 0, 25) == 5
    with pytest.raises(OutOfTabulatedRange):
        inverse_scaling(t, 0, 64 ** 2 + 1)
    with pytest.raises(InsufficientGrid):
        inverse_scaling(ScalingTable([0], [1, 2, 4], [[1, 4, 16]]), 0, 3)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.2, 3.5), st.floats(0.1, 5.0), st.floats(0.5, 1e4))
def test_inverse_is_generalised_inverse(beta, c, n):
    t = power_table(beta, c, R_max=40)
    assume(n <= t.values[0, -1])
    R = inverse_scaling(t, 0, n)
    assert t.value(0, R) >= n
    assert R == 1 or t.value(0, R - 1) < n


def test_fit_exponents_power_law():
    t = power_table(2.5, 3.0)
    v = power_table(1.5, 2.0)
    e = fit_exponents(t, v)
    assert e.beta == pytest.approx(2.5) and e.beta_prime == pytest.approx(2.5)
    assert e.alpha == pytest.approx(1.5)
    assert e.C_F == pytest.approx(1.0) and e.c_F == pytest.approx(1.0)
    assert e.verdict == "W1"
    assert e.diagnostics["F"]["radii"] == [4, 8, 16, 32, 64]
    with pytest.raises(InsufficientGrid):
        fit_exponents(power_table(R_max=8))


def test_fit_exponents_z2():
    g = lattice(2, 33)
    t = build_scaling_table(g, "exit_time", ["center"], [4, 8, 16])
    v = volume_table(g, ["center"], [4, 8, 16])
    e = fit_exponents(t, v)
    assert abs(e.beta - 2) < 0.1
    assert e.alpha == pytest.approx(math.log(481 / 25) / math.log(4))


def test_gasket_volume_exponent():
    g = sierpinski_gasket(6)
    v = volume_table(g, ["apex"], [8, 16, 32])
    t = build_scaling_table(g, "exit_time", ["apex"], [8, 16, 32])
    e = fit_exponents(t, v)
    assert abs(e.alpha - math.log(3) / math.log(2)) < 0.1
    assert abs(e.beta - math.log(5) / math.log(2)) < 0.1


def test_frozen_k_and_l():
    t = power_table(R_max=64)
    assert sub_gaussian_k(t, 0, 25, 40, q=1 / 16) == 4
    assert sub_gaussian_l(t, 0, 64, 4, Cl=1.0) == 1


def brute_k(F, n, R, q):
    best = 1
    for k in range(2, R + 1):
        if n / k <= q * F(R // k):
            best = k
    return best


def brute_l(F, n, R, C):
    for l in range(1, n + 1):
        if n / l >= C * F(math.ceil(R / l)):
            return l
    return n


def brute_m(F, n, R, q):
    return brute_k(F, n, R, q)


@settings(max_examples=80, deadline=None)
@given(st.floats(1.1, 3.0), st.floats(0.3, 3.0), st.integers(1, 60), st.integers(1, 400),
       st.sampled_from([1 / 16, 1 / 8, 0.5]))
def test_scans_match_brute_force(beta, c, R, n, q):
    F = lambda r: 0.0 if r <= 0 else c * r ** beta  # noqa: E731
    t = power_table(beta, c, R_max=64)
    assert sub_gaussian_k(t, 0, n, R, q) == brute_k(F, n, R, q)
    assert sub_gaussian_l(t, 0, n, R, 2.0) == brute_l(F, n, R, 2.0)
    assert global_m(t, n, R, q) == brute_m(F, n, R, q)


def test_k_uses_worst_centre_in_ball():
    D = np.array([[0, 1], [1, 0]])
    t = ScalingTable.from_function(lambda x, R: (1 + x) * R * R, [0, 1], range(1, 41),
                                   center_distance=D)
    # the ball of radius 40 around centre 1 contains centre 0, which is slower
    assert sub_gaussian_k(t, 1, 25, 40) == sub_gaussian_k(t, 0, 25, 40) == 4
    assert k_condition(t, 1, 25, 40, 1 / 16, 4)


def test_set_l_is_maximal():
    t = power_table(R_max=64)
    l = sub_gaussian_l_set(t, [0], 100, 20, Cl=1.0)
    assert 100 / l >= math.ceil(20 / l) ** 2
    assert l == 100 or 100 / (l + 1) < math.ceil(20 / (l + 1)) ** 2
