import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmath.expr import parse
from localmath.field import Grid, parse_field
from localmath.gauge import (
    AnalyticSpinor,
    GAMMAS,
    GaugeConfig,
    clifford_defect,
    combined_connection,
    combined_connection_linear,
    covariant_derivative,
    dirac_bar,
    dirac_gammas,
    gauge_check,
    gauge_transform,
    lagrangian_density,
)

ETA = np.diag([1.0, -1, -1, -1])
points = st.lists(st.floats(-1, 1), min_size=4, max_size=4).map(np.array)
SMOOTH = parse_field("0.3*sin(y1) + 0.1*y0*y3")
PSI = AnalyticSpinor.parse(["cos(y1)", "y0", "1", "sin(y2)"], ["y3", "0", "cos(y0)", "0.5"])


def test_gamma_algebra():
    g, g5 = GAMMAS.gamma, GAMMAS.gamma5
    I = np.eye(4)
    for mu in range(4):
        for nu in range(4):
            np.testing.assert_allclose(g[mu] @ g[nu] + g[nu] @ g[mu], 2 * ETA[mu, nu] * I, atol=1e-15)
        np.testing.assert_allclose(g5 @ g[mu] + g[mu] @ g5, 0, atol=1e-15)
    np.testing.assert_allclose(g5 @ g5, I, atol=1e-15)
    assert clifford_defect(GAMMAS) < 1e-14
    assert clifford_defect(dirac_gammas(0.1)) > 0.1


def test_combined_connection():
    gauge = GaugeConfig()
    assert combined_connection(parse_field("2"), [0] * 4, 1, 0.1, gauge) == 1
    spec = parse_field("0.7*y1")
    for h in (1e-2, 1e-3):
        assert math.isclose(combined_connection(spec, [0] * 4, 1, h, gauge).real, math.exp(0.7 * h))


@given(points, st.integers(0, 3))
def test_combined_connection_linear_residual(y, mu):
    gauge = GaugeConfig(phi="0.4*y1*y2 + sin(y0)")
    res = [abs(combined_connection(SMOOTH, y, mu, h, gauge) - combined_connection_linear(SMOOTH, y, mu, h, gauge))
           for h in (1e-2, 1e-3)]
    assert res[1] <= res[0] / 50 + 1e-14


def test_covariant_derivative_examples():
    y = [0.1, 0.2, 0.3, 0.4]
    np.testing.assert_allclose(covariant_derivative(PSI, parse_field("0"), GaugeConfig(), y, 1),
                               PSI.partial_on(np.array(y), 1))
    const = AnalyticSpinor.parse(["1", "2", "0", "-1"])
    d = covariant_derivative(const, parse_field("0.8*y1"), GaugeConfig(), y, 1)
    np.testing.assert_allclose(d, 0.8 * np.array([1, 2, 0, -1]))


def test_pure_gauge_cancels():
    b = 0.3
    theta = parse("0.5*y1 + y0*y2")
    base = AnalyticSpinor.parse(["1", "0", "2", "0"])
    psi, gauge = gauge_transform(base, GaugeConfig(b=b), theta)
    for mu in range(4):
        d = covariant_derivative(psi, parse_field("0"), gauge, [0.2, 0.1, -0.4, 0.3], mu)
        np.testing.assert_allclose(d, 0, atol=1e-14)


def test_lagrangian_examples():
    zero = AnalyticSpinor.parse(["0"] * 4)
    assert lagrangian_density(zero, SMOOTH, GaugeConfig(m=1.0), [0] * 4) == 0
    const = AnalyticSpinor.parse(["1", "0.5", "0", "2"], ["0", "1", "0", "0"])
    c = np.array([1, 0.5 + 1j, 0, 2])
    for conv in ("gamma5", "standard"):
        L = lagrangian_density(const, parse_field("0"), GaugeConfig(m=2.0), [0] * 4, conv)
        assert np.isclose(L, -2.0 * dirac_bar(c, conv) @ c)


def test_dirac_bar():
    np.testing.assert_array_equal(dirac_bar(np.zeros(4)), 0)
    # real eigenvectors of gamma5 pick up its eigenvalue
    w, v = np.linalg.eigh(GAMMAS.gamma5)
    for k in range(4):
        np.testing.assert_allclose(dirac_bar(v[:, k]), w[k] * v[:, k], atol=1e-15)
    with pytest.raises(ValueError):
        dirac_bar(np.ones(4), "other")


@given(st.lists(st.complex_numbers(max_magnitude=10), min_size=4, max_size=4))
def test_dirac_bar_involution(c):
    c = np.array(c)
    for conv, M in (("gamma5", GAMMAS.gamma5), ("standard", GAMMAS.gamma[0])):
        back = np.conj(dirac_bar(c, conv)) @ np.linalg.inv(M).T
        np.testing.assert_allclose(back, c, atol=1e-12)


def test_gauge_transform_examples():
    g0 = GaugeConfig(B=("y1", "0", "0", "0"), b=0.5)
    psi, g1 = gauge_transform(PSI, g0, "0.7")
    y = np.array([0.1, 0.2, 0.3, 0.4])
    np.testing.assert_allclose(psi.value_on(y), np.exp(0.7j) * PSI.value_on(y))
    for mu in range(4):
        assert g1.B[mu].evaluate(y) == g0.B[mu].evaluate(y)
    _, g2 = gauge_transform(PSI, g0, "1.5*y1")
    assert g2.B[1].evaluate(y) == 0 - 1.5 / 0.5
    with pytest.raises(ValueError):
        gauge_transform(PSI, GaugeConfig(b=0.0), "y0")
    with pytest.raises(ValueError):
        GaugeConfig(m=-1.0)


@given(points)
def test_gauge_transform_additive(y):
    g0 = GaugeConfig(B=("y1", "y0*y2", "0", "1"), b=0.4)
    t1, t2 = "sin(y0)+y3", "0.3*y1*y2"
    pa, ga = gauge_transform(*gauge_transform(PSI, g0, t1), t2)
    pb, gb = gauge_transform(PSI, g0, f"({t1})+({t2})")
    np.testing.assert_allclose(pa.value_on(y), pb.value_on(y), atol=1e-12)
    for mu in range(4):
        assert math.isclose(ga.B[mu].evaluate(y), gb.B[mu].evaluate(y), rel_tol=1e-12, abs_tol=1e-12)


@pytest.mark.parametrize("conv", ["gamma5", "standard"])
def test_gauge_invariance_lattice(conv):
    grid = Grid([-1] * 4, [1] * 4, [4] * 4)
    gauge = GaugeConfig(B=("0.2*y1", "y0*y3", "sin(y2)", "0"), m=0.7)
    assert gauge_check(PSI, SMOOTH, gauge, "0.5*y1*y2 + cos(y0)", grid, conv) <= 1e-10
