import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmath.field import eval_g, parse_field
from localmath.paths import (
    Path,
    PathDomainError,
    discrete_length,
    discrete_length_gradient,
    minimize_path,
    path_length,
    shoot_geodesic,
    solve_geodesic,
)

SMOOTH = parse_field("0.2*sin(y1) + 0.1*y2")
points = st.lists(st.floats(-1, 1), min_size=4, max_size=4).map(np.array)


def test_proper_interval():
    p = Path.straight([0, 0, 0, 0], [3, 1, 1, 0.5])
    L = path_length(parse_field("0"), p)
    assert math.isclose(L.value, math.sqrt(9 - 1 - 1 - 0.25), rel_tol=1e-12)
    Lc = path_length(parse_field("1.3"), p, [1, 0, 0, 0])
    assert math.isclose(Lc.value, L.value, rel_tol=1e-12)


@pytest.mark.parametrize("k", [0.5, -1.2])
def test_euclidean_oracle(k):
    p = Path.straight([0] * 4, [0, 1, 0, 0])
    L = path_length(parse_field(f"{k}*y1"), p, [0] * 4, "euclidean")
    assert abs(L.value - (math.exp(k) - 1) / k) <= 1e-6


def test_spacelike_rejected():
    p = Path.polyline([[0, 0, 0, 0], [1, 0.1, 0, 0], [1.1, 2, 0, 0]])
    with pytest.raises(PathDomainError, match="s in"):
        path_length(parse_field("0"), p)


@given(points, points)
def test_length_reference_covariance(x, xp):
    p = Path.analytic(["2*s", "0.5*sin(s)", "0.5*s^2", "0"])
    a = path_length(SMOOTH, p, x, n=500)
    b = path_length(SMOOTH, p, xp, n=500)
    assert math.isclose(a.value * eval_g(SMOOTH, x), b.value * eval_g(SMOOTH, xp), rel_tol=1e-12)


def test_reparameterization_invariance():
    a = path_length(SMOOTH, Path.analytic(["2*s", "0.5*s", "0", "0"]), n=20_000)
    b = path_length(SMOOTH, Path.analytic(["2*s^2", "0.5*s^2", "0", "0"]), n=20_000)
    assert math.isclose(a.value, b.value, rel_tol=1e-7)


def test_triangle_sanity():
    y, z = [0, 0, 0, 0], [0, 1, 1, 0]
    w = [0, 1, 0, 0]
    direct = path_length(SMOOTH, Path.straight(y, z), y, "euclidean").value
    detour = (path_length(SMOOTH, Path.straight(y, w), y, "euclidean").value
              + path_length(SMOOTH, Path.straight(w, z), y, "euclidean").value)
    assert direct <= detour


def test_flat_geodesic_is_straight():
    y0, v0 = np.array([0.5, 1, -1, 2]), np.array([2.0, 0.3, 0.4, -0.5])
    sol = solve_geodesic(parse_field("3"), y0, v0, 5.0, 1000)
    v = v0 / math.sqrt(v0 @ np.diag([1, -1, -1, -1]) @ v0)
    affine = y0 + sol.tau[:, None] * v
    assert np.max(np.abs(sol.positions - affine)) <= 1e-10


def test_geodesic_rk4_order():
    spec = parse_field("0.5*sin(y1) + 0.3*y2^2 - 0.2*y0*y3")
    ends = [solve_geodesic(spec, [0, 0, 0, 0], [2, 0.5, 0.3, 0.1], 1.0, n).positions[-1] for n in (20, 40, 80)]
    ratio = np.linalg.norm(ends[0] - ends[1]) / np.linalg.norm(ends[1] - ends[2])
    assert 12 <= ratio <= 20


def test_geodesic_abort_and_bad_velocity():
    sol = solve_geodesic(parse_field("exp(exp(y1))"), [0] * 4, [0, 1, 0, 0], 10.0, 200, "euclidean")
    assert not sol.completed and len(sol.tau) < 201
    with pytest.raises(ValueError):
        solve_geodesic(parse_field("0"), [0] * 4, [0, 1, 0, 0], 1.0, 10)


def test_discrete_gradient_matches_differences():
    spec = parse_field("0.2*y1 + 0.1*sin(y2)")
    rng = np.random.default_rng(3)
    knots = np.linspace([0, 0, 0, 0], [0, 1, 2, 0.5], 9) + 0.05 * rng.standard_normal((9, 4))
    h = np.eye(4)
    g = discrete_length_gradient(spec, knots, h, 0.0)
    eps = 1e-6
    for i in (1, 4, 7):
        for mu in range(4):
            kp, km = knots.copy(), knots.copy()
            kp[i, mu] += eps
            km[i, mu] -= eps
            fd = (discrete_length(spec, kp, h, 0.0) - discrete_length(spec, km, h, 0.0)) / (2 * eps)
            assert abs(g[i, mu] - fd) <= 1e-6


def test_variational_cross_oracle():
    spec = parse_field("0.2*y1")
    y, z = np.zeros(4), np.array([0, 0, 3, 0])
    shot = shoot_geodesic(spec, y, z)
    L_shot = path_length(spec, shot.path, y, "euclidean").value
    res = minimize_path(spec, y, z, knots=64)
    assert res.converged
    assert abs(res.length.value - L_shot) <= 1e-3 * L_shot
    straight = path_length(spec, Path.straight(y, z), y, "euclidean").value
    assert res.length.value < straight


def test_minimize_rejects_spacelike():
    with pytest.raises(PathDomainError):
        minimize_path(parse_field("0"), [0] * 4, [0, 3, 0, 0], "minkowski")
