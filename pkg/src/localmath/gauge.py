"""Dirac fields coupled to the scaling gradient A and the U(1) potential B.

The covariant derivative is ``D_mu = d_mu + a A_mu + i b B_mu`` and the
density is ``L = bar(psi) i gamma^mu D_mu psi - m bar(psi) psi``.  Two
conjugate-spinor conventions are available: ``"gamma5"`` uses
``gamma5 psi*`` and ``"standard"`` uses ``psi^dagger gamma0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from . import expr
from .calculus import AnalyticScalar, as_analytic
from .field import MINKOWSKI, FieldSpec, Grid, as_point, eval_alpha, sweep

FINE_STRUCTURE = 7.2973525693e-3
DEFAULT_B_COUPLING = math.sqrt(FINE_STRUCTURE)

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class GammaSet:
    gamma: np.ndarray  # shape (4, 4, 4): gamma^0 .. gamma^3
    gamma5: np.ndarray


def dirac_gammas(perturb: float = 0.0) -> GammaSet:
    """Gamma matrices in the Dirac representation.

    ``perturb`` adds a multiple of the identity to gamma^1; only useful to
    check that the algebra checks notice.
    """
    g0 = np.block([[_I2, _Z2], [_Z2, -_I2]])
    gk = [np.block([[_Z2, s], [-s, _Z2]]) for s in _PAULI]
    gamma = np.array([g0, *gk])
    if perturb:
        gamma[1] = gamma[1] + perturb * np.eye(4)
    g5 = 1j * gamma[0] @ gamma[1] @ gamma[2] @ gamma[3]
    return GammaSet(gamma, g5)


def clifford_defect(gs: GammaSet) -> float:
    """Largest entry of ``{g^mu, g^nu} - 2 h^{mu nu} I``, and of the gamma5 relations."""
    eye = np.eye(4)
    worst = 0.0
    for mu in range(4):
        for nu in range(4):
            ac = gs.gamma[mu] @ gs.gamma[nu] + gs.gamma[nu] @ gs.gamma[mu]
            worst = max(worst, np.abs(ac - 2 * MINKOWSKI[mu, nu] * eye).max())
        ac5 = gs.gamma5 @ gs.gamma[mu] + gs.gamma[mu] @ gs.gamma5
        worst = max(worst, np.abs(ac5).max())
    worst = max(worst, np.abs(gs.gamma5 @ gs.gamma5 - eye).max())
    return float(worst)


GAMMAS = dirac_gammas()


class AnalyticSpinor:
    """Four analytic complex components."""

    def __init__(self, components: Sequence):
        comps = tuple(as_analytic(c) for c in components)
        if len(comps) != 4:
            raise ValueError("a Dirac spinor has 4 components")
        self.components = comps

    @classmethod
    def parse(cls, re: Sequence[str], im: Optional[Sequence[str]] = None) -> "AnalyticSpinor":
        im = im if im is not None else ["0"] * len(re)
        if len(re) != 4 or len(im) != 4:
            raise ValueError("a Dirac spinor has 4 components")
        return cls([AnalyticScalar.parse(r, i) for r, i in zip(re, im)])

    def value_on(self, points) -> np.ndarray:
        return np.stack([c.value_on(points) for c in self.components], axis=-1)

    def partial_on(self, points, mu: int) -> np.ndarray:
        return np.stack([c.partial_on(points, mu) for c in self.components], axis=-1)


def _node(v) -> expr.Node:
    if isinstance(v, expr.Node):
        return v
    if isinstance(v, str):
        return expr.parse(v)
    return expr.Const(float(v))


@dataclass(frozen=True)
class GaugeConfig:
    """Photon field B, couplings, fermion mass, and the phase fields.

    ``phi`` is the U(1) phase entering the combined connection and ``theta``
    the accumulated gauge transformation phase.
    """

    B: Tuple[expr.Node, ...] = (expr.ZERO,) * 4
    a: float = 1.0
    b: float = DEFAULT_B_COUPLING
    m: float = 0.0
    phi: expr.Node = expr.ZERO
    theta: expr.Node = expr.ZERO

    def __post_init__(self):
        B = tuple(_node(c) for c in self.B)
        if len(B) != 4:
            raise ValueError("B needs 4 components")
        if self.m < 0:
            raise ValueError("mass must be nonnegative")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "phi", _node(self.phi))
        object.__setattr__(self, "theta", _node(self.theta))

    def B_on(self, points) -> np.ndarray:
        return np.stack([expr.evaluate_on(c, points) for c in self.B], axis=-1)


def combined_connection(spec: FieldSpec, y, mu: int, h: float, gauge: GaugeConfig) -> complex:
    """Transport factor ``e^{alpha(y+h e_mu) - alpha(y)} e^{i(phi(y+h e_mu) - phi(y))}``."""
    p = as_point(y)
    q = p.copy()
    q[mu] += h
    da = eval_alpha(spec, q) - eval_alpha(spec, p)
    dphi = float(expr.evaluate_on(gauge.phi, q) - expr.evaluate_on(gauge.phi, p))
    return complex(np.exp(da) * np.exp(1j * dphi))


def combined_connection_linear(spec: FieldSpec, y, mu: int, h: float, gauge: GaugeConfig) -> complex:
    """First-order form ``1 + h (A_mu + i d_mu phi)``."""
    p = as_point(y)
    a_mu = float(spec.grad_on(p)[mu])
    b_mu = float(expr.evaluate_on(gauge.phi.diff(mu), p))
    return 1.0 + h * (a_mu + 1j * b_mu)


def _partial(psi: AnalyticSpinor, pts, mu, method, h):
    if method == "symbolic":
        return psi.partial_on(pts, mu)
    if method == "central":
        step = np.zeros(4)
        step[mu] = h
        return (psi.value_on(pts + step) - psi.value_on(pts - step)) / (2 * h)
    raise ValueError(f"unknown derivative method {method!r}")


def covariant_derivative_on(psi: AnalyticSpinor, spec: FieldSpec, gauge: GaugeConfig,
                            points, mu: int, method: str = "symbolic",
                            h: float = 1e-3) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    A = spec.grad_on(pts)[..., mu]
    B = expr.evaluate_on(gauge.B[mu], pts)
    coeff = (gauge.a * A + 1j * gauge.b * B)[..., None]
    return _partial(psi, pts, mu, method, h) + coeff * psi.value_on(pts)


def covariant_derivative(psi: AnalyticSpinor, spec: FieldSpec, gauge: GaugeConfig, y, mu: int,
                         method: str = "symbolic", h: float = 1e-3) -> np.ndarray:
    return covariant_derivative_on(psi, spec, gauge, as_point(y), mu, method, h)


def dirac_bar(psi, convention: str = "gamma5", gammas: GammaSet = GAMMAS) -> np.ndarray:
    """Conjugate spinor as the coefficient vector contracted with ``M psi``.

    Works on a single spinor or on a stack with components on the last axis.
    """
    c = np.conj(np.asarray(psi, dtype=complex))
    if convention == "gamma5":
        return c @ gammas.gamma5.T
    if convention == "standard":
        # (psi^dagger gamma0)_j = sum_i psi*_i gamma0_ij
        return c @ gammas.gamma[0]
    raise ValueError(f"unknown convention {convention!r}; use 'gamma5' or 'standard'")


def lagrangian_density_on(psi: AnalyticSpinor, spec: FieldSpec, gauge: GaugeConfig, points,
                          convention: str = "gamma5", gammas: GammaSet = GAMMAS,
                          method: str = "symbolic", h: float = 1e-3) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    val = psi.value_on(pts)
    bar = dirac_bar(val, convention, gammas)
    kinetic = np.zeros(val.shape, dtype=complex)
    for mu in range(4):
        d = covariant_derivative_on(psi, spec, gauge, pts, mu, method, h)
        kinetic = kinetic + 1j * d @ gammas.gamma[mu].T
    return np.sum(bar * kinetic, axis=-1) - gauge.m * np.sum(bar * val, axis=-1)


def lagrangian_density(psi: AnalyticSpinor, spec: FieldSpec, gauge: GaugeConfig, y,
                       convention: str = "gamma5", gammas: GammaSet = GAMMAS,
                       method: str = "symbolic", h: float = 1e-3) -> complex:
    return complex(lagrangian_density_on(psi, spec, gauge, as_point(y), convention, gammas, method, h))


def lagrangian_on_grid(psi, spec, gauge, grid: Grid, convention="gamma5", gammas=GAMMAS,
                       method="symbolic", h=1e-3, threads=None):
    """Density at every lattice node; returns ``(points, values)`` flattened."""
    pts = grid.nodes().reshape(-1, 4)
    vals = sweep(
        lambda p: lagrangian_density_on(psi, spec, gauge, p, convention, gammas, method, h),
        pts, threads,
    )
    return pts, vals


def gauge_transform(psi: AnalyticSpinor, gauge: GaugeConfig, theta) -> Tuple[AnalyticSpinor, GaugeConfig]:
    """``psi -> e^{i theta} psi`` and ``B_mu -> B_mu - (1/b) d_mu theta``.

    A is untouched: the scaling field is not an argument.
    """
    if gauge.b == 0:
        raise ValueError("gauge transformations need a nonzero coupling b")
    th = _node(theta)
    c, s = expr.Func("cos", th), expr.Func("sin", th)
    rotated = []
    for comp in psi.components:
        re = expr.sub(expr.mul(c, comp.re), expr.mul(s, comp.im))
        im = expr.add(expr.mul(s, comp.re), expr.mul(c, comp.im))
        rotated.append(AnalyticScalar(re, im))
    inv_b = expr.Const(1.0 / gauge.b)
    B = tuple(expr.sub(Bmu, expr.mul(inv_b, th.diff(mu))) for mu, Bmu in enumerate(gauge.B))
    return AnalyticSpinor(rotated), replace(gauge, B=B, theta=expr.add(gauge.theta, th))


def gauge_check(psi, spec, gauge, theta, grid: Grid, convention="gamma5", method="symbolic",
                h=1e-3, threads=None) -> float:
    """Largest ``|L(psi', B') - L(psi, B)|`` over the lattice."""
    _, before = lagrangian_on_grid(psi, spec, gauge, grid, convention, GAMMAS, method, h, threads)
    psi2, gauge2 = gauge_transform(psi, gauge, theta)
    _, after = lagrangian_on_grid(psi2, spec, gauge2, grid, convention, GAMMAS, method, h, threads)
    return float(np.max(np.abs(after - before)))
