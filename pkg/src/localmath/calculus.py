"""Integrals and derivatives of fields whose values live in the local
structures of the scaling field.

A field value at ``y`` is a number of the structure scaled by ``g(y)``.
Integration first carries every integrand to the structure at a reference
point ``x``; differentiation carries the neighbouring value back to ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import expr
from .arithmetic import ScaledNumber
from .field import FieldSpec, Grid, as_point, eval_alpha
from .linear import ScaledVector


class AnalyticScalar:
    """Complex field ``re + i im`` given by two expression trees."""

    def __init__(self, re: expr.Node, im: expr.Node = expr.ZERO):
        self.re = re
        self.im = im
        self._d_re = expr.gradient(re, 4)
        self._d_im = expr.gradient(im, 4)

    @classmethod
    def parse(cls, re: str, im: str = "0") -> "AnalyticScalar":
        return cls(expr.parse(re), expr.parse(im))

    def value_on(self, points) -> np.ndarray:
        return expr.evaluate_on(self.re, points) + 1j * expr.evaluate_on(self.im, points)

    def partial_on(self, points, mu: int) -> np.ndarray:
        return (expr.evaluate_on(self._d_re[mu], points)
                + 1j * expr.evaluate_on(self._d_im[mu], points))

    def partial(self, mu: int) -> "AnalyticScalar":
        return AnalyticScalar(self._d_re[mu], self._d_im[mu])

    def __repr__(self):
        return f"AnalyticScalar({self.re.text()!r}, {self.im.text()!r})"


def as_analytic(psi) -> AnalyticScalar:
    if isinstance(psi, AnalyticScalar):
        return psi
    if isinstance(psi, expr.Node):
        return AnalyticScalar(psi)
    if isinstance(psi, str):
        return AnalyticScalar(expr.parse(psi))
    if np.isscalar(psi):
        c = complex(psi)
        return AnalyticScalar(expr.Const(c.real), expr.Const(c.imag))
    raise TypeError(f"cannot use {type(psi).__name__} as an analytic field")


@dataclass(frozen=True)
class SampledField:
    """Samples on a grid, either at the lattice nodes or at cell centers."""

    grid: Grid
    samples: np.ndarray
    layout: str = "nodes"

    def __post_init__(self):
        if self.layout not in ("nodes", "cells"):
            raise ValueError("layout must be 'nodes' or 'cells'")
        arr = np.asarray(self.samples, dtype=complex)
        if arr.shape[:4] != tuple(len(a) for a in self.axes()):
            raise ValueError("samples do not match the grid shape")
        object.__setattr__(self, "samples", arr)

    def axes(self):
        return self.grid._axes(self.layout == "cells")

    def points(self) -> np.ndarray:
        return self.grid.cell_centers() if self.layout == "cells" else self.grid.nodes()

    @classmethod
    def from_analytic(cls, grid: Grid, psi, layout: str = "nodes") -> "SampledField":
        pts = grid.cell_centers() if layout == "cells" else grid.nodes()
        return cls(grid, as_analytic(psi).value_on(pts), layout)


def _transport_weights(spec: FieldSpec, pts: np.ndarray, x) -> np.ndarray:
    # g(y)/g(x) written through alpha to stay clear of overflow
    return np.exp(spec.alpha_on(pts) - eval_alpha(spec, x))


def _integral_value(spec, psi, grid, x) -> complex:
    if isinstance(psi, SampledField):
        if psi.layout != "cells" or psi.grid != grid:
            raise ValueError("midpoint quadrature needs samples at the cell centers of this grid")
        pts, vals = grid.cell_centers(), psi.samples
    else:
        pts = grid.cell_centers()
        vals = as_analytic(psi).value_on(pts)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite field samples")
    w = _transport_weights(spec, pts, x)
    # contiguous ravel keeps numpy's pairwise summation, hence reproducible sums
    return complex(np.sum((w * vals).ravel()) * grid.cell_volume)


def _real_if_possible(v: complex):
    return v.real if v.imag == 0 else v


def scaled_integral(spec: FieldSpec, psi, grid: Grid, x) -> ScaledNumber:
    """Midpoint-rule integral of ``psi`` carried to the structure at ``x``."""
    x = as_point(x)
    gx = float(np.exp(eval_alpha(spec, x)))
    value = _integral_value(spec, psi, grid, x)
    return ScaledNumber(_real_if_possible(value) * gx, gx)


class IntegralReport(NamedTuple):
    result: ScaledNumber
    spacing: np.ndarray
    error_estimate: float


def scaled_integral_with_error(spec: FieldSpec, psi, grid: Grid, x) -> IntegralReport:
    """Integral plus a Richardson error estimate from a grid with half the cells."""
    fine = scaled_integral(spec, psi, grid, x)
    coarse = scaled_integral(spec, psi, grid.coarsened(2), x)
    err = abs(complex(fine.value) - complex(coarse.value)) / 3.0
    return IntegralReport(fine, grid.spacing, err)


def scaled_integral_vector(spec: FieldSpec, components: Sequence, grid: Grid, x) -> ScaledVector:
    x = as_point(x)
    gx = float(np.exp(eval_alpha(spec, x)))
    values = [_integral_value(spec, c, grid, x) for c in components]
    return ScaledVector(np.array(values) * gx, gx)


def scaled_derivative(spec: FieldSpec, psi, y, mu: int) -> complex:
    """``(d_mu + A_mu) psi`` at ``y`` for an analytic field."""
    p = as_point(y)
    f = as_analytic(psi)
    a_mu = float(spec.grad_on(p)[mu])
    return complex(f.partial_on(p, mu) + a_mu * f.value_on(p))


def transported_difference_quotient(spec: FieldSpec, psi, y, mu: int, h: float) -> complex:
    """``[(g(y+h e_mu)/g(y)) psi(y+h e_mu) - psi(y)] / h`` before the limit."""
    if not h > 0:
        raise ValueError("step must be positive")
    p = as_point(y)
    q = p.copy()
    q[mu] += h
    f = as_analytic(psi)
    ratio = np.exp(eval_alpha(spec, q) - eval_alpha(spec, p))
    return complex((ratio * f.value_on(q) - f.value_on(p)) / h)


class DerivativeEstimate(NamedTuple):
    value: complex
    one_sided: bool


def scaled_derivative_sampled(spec: FieldSpec, field: SampledField, index: Sequence[int],
                              mu: int) -> DerivativeEstimate:
    """Central-difference ``(d_mu + A_mu) psi`` at a grid index.

    Falls back to a one-sided first-order stencil at the boundary and says so.
    """
    index = tuple(int(i) for i in index)
    axis = field.axes()[mu]
    n = len(axis)
    if n < 2:
        raise ValueError(f"axis {mu} is collapsed; no derivative along it")
    k = index[mu]
    h = float(axis[1] - axis[0])

    def at(j):
        idx = list(index)
        idx[mu] = j
        return field.samples[tuple(idx)]

    if 0 < k < n - 1:
        d = (at(k + 1) - at(k - 1)) / (2 * h)
        one_sided = False
    elif k == 0:
        d = (at(1) - at(0)) / h
        one_sided = True
    else:
        d = (at(n - 1) - at(n - 2)) / h
        one_sided = True
    y = field.points()[index]
    a_mu = float(spec.grad_on(y)[mu])
    return DerivativeEstimate(complex(d + a_mu * at(k)), one_sided)


def product(f, g) -> AnalyticScalar:
    """Pointwise product of two analytic fields, as a new analytic field."""
    f, g = as_analytic(f), as_analytic(g)
    re = expr.sub(expr.mul(f.re, g.re), expr.mul(f.im, g.im))
    im = expr.add(expr.mul(f.re, g.im), expr.mul(f.im, g.re))
    return AnalyticScalar(re, im)
