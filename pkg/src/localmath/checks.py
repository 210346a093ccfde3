"""Acceptance checks shared by ``localmath selftest`` and the test suite.

Each check draws its random inputs from the generator it is handed and
compares the library against a reference written out here without going
through the code path under test.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List

import numpy as np

from . import arithmetic as ar
from . import linear as lin
from .calculus import AnalyticScalar, scaled_derivative, scaled_integral, transported_difference_quotient
from .field import Grid, check_local_restriction, parse_field
from .gauge import (
    AnalyticSpinor,
    GaugeConfig,
    clifford_defect,
    dirac_gammas,
    gauge_transform,
    lagrangian_density_on,
)
from .paths import Path, minimize_path, path_length, shoot_geodesic, solve_geodesic


# Tolerance on observed convergence orders, same band as the quadrature order
# check.  A first-order quotient fits slopes just under 1 whenever its h^2
# term opposes the h term.
ORDER_TOL = 0.2


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:>2} {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _rel(a, b) -> float:
    a, b = complex(a), complex(b)
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _rand_scale(rng, exact: bool):
    sign = -1 if rng.random() < 0.3 else 1
    if exact:
        return sign * Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50)))
    return sign * float(10 ** rng.uniform(-3, 3))


# 1 ---------------------------------------------------------------------------

def check_value_table(rng=None) -> CheckResult:
    from .cli import main  # deferred: cli imports this module
    import contextlib
    import io

    t0 = time.perf_counter()
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["value-table", "30"])
    elapsed = time.perf_counter() - t0
    rows = buf.getvalue().strip().splitlines()
    got = [tuple(int(v) for v in r.split(",")) for r in rows[1:]]
    want = [(30, 1), (15, 2), (10, 3), (6, 5), (5, 6), (3, 10), (2, 15), (1, 30)]
    ok = code == 0 and rows[0] == "value,subset" and got == want and elapsed < 1.0
    return CheckResult(1, "value table of 30", ok, f"{len(got)} rows, {elapsed * 1e3:.1f} ms")


# 2 ---------------------------------------------------------------------------

def check_group_laws(rng, cases: int = 10_000) -> CheckResult:
    worst = 0.0
    exact_ok = True
    t0 = time.perf_counter()
    for k in range(cases):
        exact = k % 2 == 0
        s, s2, t = (_rand_scale(rng, exact) for _ in range(3))
        v = Fraction(int(rng.integers(-100, 100)), int(rng.integers(1, 30))) if exact else float(rng.normal() * 10)
        x = ar.make_number(v, t)

        zz = ar.z_map(s, ar.z_map(s2, x))
        zz_swap = ar.z_map(s2, ar.z_map(s, x))
        z1 = ar.z_map(s * s2, x)
        ww = ar.w_map(s, ar.w_map(s2, x))
        ww_swap = ar.w_map(s2, ar.w_map(s, x))
        w1 = ar.w_map(s * s2, x)
        pairs = [
            (zz.scale, z1.scale), (zz.value, z1.value), (zz_swap.value, z1.value),
            (ww.base, w1.base), (ww.value, w1.value), (ww_swap.base, w1.base),
            (ar.z_map(1, x).value, x.value), (ar.w_map(1, x).base, x.base),
            (ar.value_in(ar.z_map(s, x), t * s), x.value / s),
        ]
        base_kept = zz.base == x.base and z1.base == x.base
        value_kept = _rel(ww.value, x.value) <= 1e-12
        flags = zz.order_reversed == z1.order_reversed and ww.order_reversed == w1.order_reversed
        if not (base_kept and value_kept and flags):
            exact_ok = False
        for a, b in pairs:
            if exact and a != b:
                exact_ok = False
            worst = max(worst, _rel(a, b))
    ok = exact_ok and worst <= 1e-12 and time.perf_counter() - t0 < 5.0
    return CheckResult(2, "W/Z group laws", ok, f"{cases} cases, max rel err {worst:.2e}")


# 3 ---------------------------------------------------------------------------

def check_axioms(rng, cases: int = 10_000) -> CheckResult:
    worst = 0.0
    exact_ok = True
    for k in range(cases):
        exact = k % 2 == 0
        u, t = _rand_scale(rng, exact), _rand_scale(rng, exact)
        if exact:
            vals = [Fraction(int(rng.integers(-60, 60)), int(rng.integers(1, 20))) for _ in range(3)]
        else:
            vals = list(rng.normal(size=3) * 10 ** rng.uniform(-2, 2, size=3))
        x, y, z = (ar.make_number(v, u) for v in vals)
        one = ar.one(u)
        mag = abs(vals[0]) * (abs(vals[1]) + abs(vals[2])) or 1.0

        def err(a, b, scale):
            return abs(complex(a.value) - complex(b.value)) / scale

        checks = [
            (ar.mul_in(u, x, one), x, abs(vals[0]) or 1.0),
            (ar.mul_in(u, ar.mul_in(u, x, y), z), ar.mul_in(u, x, ar.mul_in(u, y, z)),
             abs(vals[0] * vals[1] * vals[2]) or 1.0),
            (ar.mul_in(u, x, ar.add_in(u, y, z)),
             ar.add_in(u, ar.mul_in(u, x, y), ar.mul_in(u, x, z)), mag),
            (ar.add_in(u, x, y), ar.add_in(u, y, x), abs(vals[0]) + abs(vals[1]) or 1.0),
            (ar.mul_in(u, x, y), ar.mul_in(u, y, x), abs(vals[0] * vals[1]) or 1.0),
            (ar.add_in(u, x, ar.zero(u)), x, abs(vals[0]) or 1.0),
            (ar.add_in(u, x, ar.neg_in(u, x)), ar.zero(u), abs(vals[0]) or 1.0),
        ]
        if vals[0] != 0:
            checks.append((ar.mul_in(u, x, ar.inv_in(u, x)), one, 1.0))
        # transported structure: Z_s carries t to u; its identity is ((t/u) 1)_u
        a = ar.make_number(vals[0], t)
        moved = ar.z_map(u / t, a)
        checks.append((ar.transported_mul(t, u, moved, ar.transported_one(t, u)), moved,
                       abs(moved.value) or 1.0))
        for lhs, rhs, scale in checks:
            if exact and lhs.base != rhs.base:
                exact_ok = False
            worst = max(worst, err(lhs, rhs, scale))
    ok = exact_ok and worst <= 1e-12
    return CheckResult(3, "field axioms in scaled structures", ok, f"{cases} cases, max rel err {worst:.2e}")


# 4 ---------------------------------------------------------------------------

def check_norm_transport(rng, cases: int = 1000) -> CheckResult:
    worst_norm = worst_gap = 0.0
    for _ in range(cases):
        dim = int(rng.integers(1, 6))
        sign = rng.choice([-1.0, 1.0])
        r = sign * 10 ** rng.uniform(-2, 2)
        q = sign * 10 ** rng.uniform(-2, 2)
        psi = lin.make_vector(rng.normal(size=dim) + 1j * rng.normal(size=dim), r)
        lhs, rhs = lin.norm_transport_sides(r, q, psi)
        worst_norm = max(worst_norm, _rel(lhs.value, rhs.value))
        first, second = lin.inner_product_transport_gap(r, q, psi)
        worst_gap = max(worst_gap, _rel(complex(second.value) / complex(first.value), r / q))
    ok = worst_norm <= 1e-12 and worst_gap <= 1e-12
    return CheckResult(4, "norm transport and scalar-product gap", ok,
                       f"{cases} cases, norm err {worst_norm:.2e}, gap ratio err {worst_gap:.2e}")


# 5 ---------------------------------------------------------------------------

def _random_smooth(rng):
    """A smooth real field with its gradient in closed form."""
    c = rng.normal(size=3)
    k = rng.normal(size=4) * 0.7
    i, j = rng.choice(4, size=2, replace=False)
    text = (f"{c[0]:.17g}*sin({k[0]:.17g}*y0 + {k[1]:.17g}*y1 + {k[2]:.17g}*y2 + {k[3]:.17g}*y3)"
            f" + {c[1]:.17g}*exp(0.3*y{i}) + {c[2]:.17g}*y{i}*y{j}")

    def value(y):
        return c[0] * math.sin(k @ y) + c[1] * math.exp(0.3 * y[i]) + c[2] * y[i] * y[j]

    def grad(y):
        g = c[0] * math.cos(k @ y) * k
        g[i] += 0.3 * c[1] * math.exp(0.3 * y[i]) + c[2] * y[j]
        g[j] += c[2] * y[i]
        return g

    return text, value, grad


def _reference_gammas():
    s = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]
    g = np.zeros((4, 4, 4), dtype=complex)
    g[0] = np.diag([1, 1, -1, -1])
    for k in range(3):
        g[k + 1][:2, 2:] = s[k]
        g[k + 1][2:, :2] = -s[k]
    g5 = np.zeros((4, 4), dtype=complex)
    g5[:2, 2:] = np.eye(2)
    g5[2:, :2] = np.eye(2)
    return g, g5


def check_reduction(rng, cases: int = 100) -> CheckResult:
    worst = {"integral": 0.0, "derivative": 0.0, "lagrangian": 0.0, "length": 0.0}
    g_ref, g5_ref = _reference_gammas()
    hmat = np.diag([1.0, -1.0, -1.0, -1.0])
    for _ in range(cases):
        c = float(rng.uniform(-2, 2))
        spec = parse_field(repr(c))
        text, value, grad = _random_smooth(rng)

        lo = rng.uniform(-1, 0, size=4)
        hi = lo + rng.uniform(0.5, 1.5, size=4)
        hi[3] = lo[3]
        n = (12, 10, 8, 1)
        grid = Grid(lo, hi, n)
        x = rng.uniform(lo, hi)
        got = scaled_integral(spec, text, grid, x).value
        hstep = (hi - lo) / np.array(n)
        axes = [lo[a] + (np.arange(n[a]) + 0.5) * hstep[a] for a in range(3)]
        total = 0.0
        for a0 in axes[0]:
            for a1 in axes[1]:
                for a2 in axes[2]:
                    total += value(np.array([a0, a1, a2, lo[3]]))
        ref = total * hstep[0] * hstep[1] * hstep[2]
        worst["integral"] = max(worst["integral"], _rel(got, ref))

        y = rng.uniform(-1, 1, size=4)
        mu = int(rng.integers(0, 4))
        worst["derivative"] = max(worst["derivative"], _rel(scaled_derivative(spec, text, y, mu), grad(y)[mu]))

        # plane-wave spinor u e^{i k.y}, constant B: d_mu psi = i k_mu psi
        u = rng.normal(size=4) + 1j * rng.normal(size=4)
        kv = rng.normal(size=4)
        Bv = rng.normal(size=4)
        a, b, m = 1.0, float(rng.uniform(0.05, 1.0)), float(rng.uniform(0, 2))
        phase = " + ".join(f"{kv[q]:.17g}*y{q}" for q in range(4))
        re = [f"{u[j].real:.17g}*cos({phase}) - {u[j].imag:.17g}*sin({phase})" for j in range(4)]
        im = [f"{u[j].real:.17g}*sin({phase}) + {u[j].imag:.17g}*cos({phase})" for j in range(4)]
        psi = AnalyticSpinor.parse(re, im)
        gauge = GaugeConfig(B=tuple(f"{v:.17g}" for v in Bv), a=a, b=b, m=m)
        got = complex(lagrangian_density_on(psi, spec, gauge, y))
        pv = u * np.exp(1j * (kv @ y))
        bar = g5_ref @ np.conj(pv)
        kin = sum(g_ref[q] @ ((1j * kv[q] + 1j * b * Bv[q]) * pv) for q in range(4))
        ref = bar @ (1j * kin) - m * (bar @ pv)
        worst["lagrangian"] = max(worst["lagrangian"], _rel(got, ref))

        # timelike polyline: exact proper length is the sum of segment intervals
        steps = np.zeros((5, 4))
        steps[:, 1:] = rng.normal(size=(5, 3)) * 0.3
        steps[:, 0] = np.linalg.norm(steps[:, 1:], axis=1) + rng.uniform(0.1, 1.0, size=5)
        pts = np.vstack([np.zeros(4), np.cumsum(steps, axis=0)]) + rng.normal(size=4)
        ref = sum(math.sqrt(d @ hmat @ d) for d in steps)
        got = path_length(spec, Path.polyline(pts), pts[2], "minkowski", n=50).value
        worst["length"] = max(worst["length"], _rel(got, ref))
    ok = all(v <= 1e-10 for v in worst.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return CheckResult(5, "constant alpha reduces to standard", ok, f"{cases} cases: {detail}")


# 6 ---------------------------------------------------------------------------

def check_derivative_oracle(rng, cases: int = 20) -> CheckResult:
    worst_slope = math.inf
    worst_grad = 0.0
    hs = np.array([1e-2, 1e-3, 1e-4])
    for _ in range(cases):
        a_text, _, a_grad = _random_smooth(rng)
        p_text, _, _ = _random_smooth(rng)
        spec = parse_field(a_text)
        y = rng.uniform(-1, 1, size=4)
        mu = int(rng.integers(0, 4))
        exact = scaled_derivative(spec, p_text, y, mu)
        errs = np.array([abs(transported_difference_quotient(spec, p_text, y, mu, h) - exact) for h in hs])
        slope = np.polyfit(np.log10(hs), np.log10(np.maximum(errs, 1e-300)), 1)[0]
        worst_slope = min(worst_slope, slope)
        # symbolic gradient against central differences, h = 1e-4
        step = 1e-4
        fd = np.empty(4)
        for q in range(4):
            e = np.zeros(4)
            e[q] = step
            fd[q] = (float(spec.alpha_on(y + e)) - float(spec.alpha_on(y - e))) / (2 * step)
        sym = spec.grad_on(y)
        worst_grad = max(worst_grad, np.max(np.abs(sym - fd)) / np.max(np.abs(sym)))
        worst_grad = max(worst_grad, np.max(np.abs(sym - a_grad(y))) / np.max(np.abs(sym)))
    ok = worst_slope >= 1.0 - ORDER_TOL and worst_grad <= 1e-6
    return CheckResult(6, "derivative oracle", ok,
                       f"min Richardson slope {worst_slope:.3f} (need >= {1 - ORDER_TOL:.1f}), gradient rel err {worst_grad:.2e}")


# 7 ---------------------------------------------------------------------------

def check_integral_oracle(rng=None) -> CheckResult:
    spec = parse_field("y1")
    x = np.zeros(4)

    def integral(n):
        grid = Grid([0, 0, 0, 0], [0, 1, 0, 0], [1, n, 1, 1])
        return scaled_integral(spec, "1", grid, x).value

    exact = math.e - 1.0
    err = abs(integral(10_000) - exact)
    ns = np.array([10, 20, 40, 80, 160])
    errs = np.array([abs(integral(int(n)) - exact) for n in ns])
    order = -np.polyfit(np.log(ns), np.log(errs), 1)[0]
    ok = err <= 1e-4 and abs(order - 2.0) <= ORDER_TOL
    return CheckResult(7, "scaled integral oracle", ok, f"|I - (e-1)| = {err:.2e}, order {order:.3f}")


# 8 ---------------------------------------------------------------------------

def check_gauge_invariance(rng) -> CheckResult:
    t0 = time.perf_counter()
    c = rng.uniform(0.2, 0.8, size=6)
    spec = parse_field(f"{c[0]:.17g}*sin(y0) + {c[1]:.17g}*y1*y2 - {c[2]:.17g}*y3")
    re = [f"cos({c[3]:.17g}*y1 + y0)", f"{c[4]:.17g}*y2*y3", "exp(0.1*y0)*sin(y3)", "1 + 0.2*y1^2"]
    im = ["sin(y2)*0.5", f"cos(y0 - {c[5]:.17g}*y3)", "0.3*y1", "y0*y2*0.1"]
    psi = AnalyticSpinor.parse(re, im)
    gauge = GaugeConfig(B=("0.2*y1", "sin(y0)*0.3", "0.1*y2*y3", "0.05"), a=1.0, m=0.5)
    theta = f"{c[0]:.17g}*y0*y1 + sin(y2) - 0.4*y3^2 + cos(y0*y3)"
    grid = Grid([-1, -1, -1, -1], [1, 1, 1, 1], [4, 4, 4, 4])
    pts = grid.nodes().reshape(-1, 4)
    A_before = spec.grad_on(pts)
    worst = 0.0
    for convention in ("gamma5", "standard"):
        L0 = lagrangian_density_on(psi, spec, gauge, pts, convention)
        psi2, gauge2 = gauge_transform(psi, gauge, theta)
        L1 = lagrangian_density_on(psi2, spec, gauge2, pts, convention)
        worst = max(worst, float(np.max(np.abs(L1 - L0))))
    A_after = spec.grad_on(pts)
    same_A = np.array_equal(A_before, A_after)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and same_A and elapsed < 30
    return CheckResult(8, "U(1) gauge invariance on 4^4 lattice", ok,
                       f"max |dL| {worst:.2e}, A unchanged: {same_A}")


# 9 ---------------------------------------------------------------------------

def check_geodesic_limit(rng) -> CheckResult:
    flat = parse_field("0")
    y0 = rng.uniform(-1, 1, size=4)
    v = rng.normal(size=4) * 0.3
    v[0] = math.sqrt(1 + v[1:] @ v[1:])  # unit timelike
    sol = solve_geodesic(flat, y0, v, 1.0, 1000, "minkowski")
    line = y0 + sol.tau[:, None] * v
    dev = float(np.max(np.abs(sol.positions - line)))

    spec = parse_field("0.5*sin(y1) + 0.3*y2*y2 - 0.2*y0*y3")
    v0 = np.array([1.0, 0.4, -0.3, 0.2])

    def end(steps):
        return solve_geodesic(spec, np.zeros(4), v0, 2.0, steps, "minkowski").positions[-1]

    p1, p2, p4 = end(20), end(40), end(80)
    ratio = float(np.linalg.norm(p1 - p2) / np.linalg.norm(p2 - p4))
    ok = dev <= 1e-10 and 12 <= ratio <= 20
    return CheckResult(9, "geodesic straight-line limit and RK4 order", ok,
                       f"affine deviation {dev:.2e}, step-halving ratio {ratio:.2f}")


# 10 --------------------------------------------------------------------------

def check_variational(rng=None) -> CheckResult:
    t0 = time.perf_counter()
    spec = parse_field("0.2*y1")
    y, z = np.zeros(4), np.array([0.0, 0.0, 3.0, 0.0])
    geo = shoot_geodesic(spec, y, z, "euclidean", steps=1000)
    shoot = path_length(spec, geo.path, y, "euclidean", n=20_000).value
    res = minimize_path(spec, y, z, "euclidean", knots=64)
    rel = _rel(shoot, res.length.value)
    elapsed = time.perf_counter() - t0
    ok = rel <= 1e-3 and elapsed < 60
    return CheckResult(10, "shooting vs discrete minimizer", ok,
                       f"L_shoot {shoot:.8f}, L_min {res.length.value:.8f}, rel {rel:.2e}")


# 11 --------------------------------------------------------------------------

def check_restriction(rng=None) -> CheckResult:
    grid = Grid([0, 0, 0, 0], [1, 1, 1, 1], [5, 5, 5, 5])
    flat = check_local_restriction(parse_field("2.5"), grid, 1e-15)
    sloped = check_local_restriction(parse_field("0.5*y1"), grid, 0.1)
    ok = flat.passed and not sloped.passed and abs(sloped.max_norm - 0.5) <= 1e-9
    return CheckResult(11, "local restriction validator", ok,
                       f"constant max {flat.max_norm:.1e} pass={flat.passed}; "
                       f"0.5*y1 max {sloped.max_norm:.12f} pass={sloped.passed}")


def check_gamma_algebra(perturb: float = 0.0) -> CheckResult:
    defect = clifford_defect(dirac_gammas(perturb))
    return CheckResult(0, "gamma matrix algebra", defect == 0.0, f"max defect {defect:.2e}")


CHECKS: List[Callable] = [
    check_value_table,
    check_group_laws,
    check_axioms,
    check_norm_transport,
    check_reduction,
    check_derivative_oracle,
    check_integral_oracle,
    check_gauge_invariance,
    check_geodesic_limit,
    check_variational,
    check_restriction,
]


def run_all(seed: int = 0, perturb_gamma: float = 0.0) -> List[CheckResult]:
    results = [check_gamma_algebra(perturb_gamma)]
    for check in CHECKS:
        rng = np.random.default_rng(seed)
        t0 = time.perf_counter()
        res = check(rng)
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
