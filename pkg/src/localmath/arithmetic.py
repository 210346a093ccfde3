"""Scaled real and complex number structures.

Every structure shares one base set of numbers.  A number is stored by its
base element together with the scaling factor of the structure it currently
lives in, and its value in that structure is ``base / scale``.  With this
representation the number-preserving maps only touch ``scale`` and the
value-preserving maps only touch ``base``.

Integer and :class:`~fractions.Fraction` inputs stay exact; anything else is
carried as ``float`` or ``complex``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Complex, Rational
from typing import List, NamedTuple, Union

Scalar = Union[int, Fraction, float, complex]

REL_TOL = 1e-12


class DegenerateStructureError(ValueError):
    """A scaling factor of zero was requested."""


class StructureMismatchError(ValueError):
    """Operands live in different structures."""


def _exact(x: Scalar) -> Scalar:
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, Rational) and not isinstance(x, Fraction):
        return Fraction(x)
    if isinstance(x, Complex) and not isinstance(x, (Fraction, float, complex)):
        # numpy scalars and friends
        c = complex(x)
        return c.real if c.imag == 0 else c
    return x


def _check_scale(t: Scalar) -> Scalar:
    t = _exact(t)
    if t == 0:
        raise DegenerateStructureError("degenerate structure: scaling factor must be nonzero")
    return t


def close(a: Scalar, b: Scalar, rel_tol: float = REL_TOL) -> bool:
    """Equality for exact inputs, relative closeness otherwise."""
    if a == b:
        return True
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return False
    return cmath.isclose(complex(a), complex(b), rel_tol=rel_tol, abs_tol=0.0)


def _is_negative_real(s: Scalar) -> bool:
    if isinstance(s, complex):
        return s.imag == 0 and s.real < 0
    return s < 0


@dataclass(frozen=True)
class StructureTag:
    scale: Scalar
    order_reversed: bool = False

    @property
    def is_real(self) -> bool:
        return not isinstance(self.scale, complex)


@dataclass(frozen=True)
class ScaledNumber:
    """A base-set number sitting in the structure with factor ``scale``."""

    base: Scalar
    scale: Scalar
    order_reversed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "base", _exact(self.base))
        object.__setattr__(self, "scale", _check_scale(self.scale))

    @property
    def value(self) -> Scalar:
        return self.base / self.scale

    @property
    def structure(self) -> StructureTag:
        return StructureTag(self.scale, self.order_reversed)

    def same_number(self, other: "ScaledNumber", rel_tol: float = REL_TOL) -> bool:
        """True when both carry the same base element, whatever their structures."""
        return close(self.base, other.base, rel_tol)

    def __repr__(self):
        return f"ScaledNumber(value={self.value!r}, scale={self.scale!r})"


class NaturalValueEntry(NamedTuple):
    value: int
    subset: int


def make_number(v: Scalar, t: Scalar) -> ScaledNumber:
    """The number with value ``v`` in the structure scaled by ``t``."""
    t = _check_scale(t)
    return ScaledNumber(_exact(v) * t, t)


def zero(t: Scalar) -> ScaledNumber:
    return make_number(0, t)


def one(t: Scalar) -> ScaledNumber:
    return make_number(1, t)


def value_in(n: ScaledNumber, u: Scalar) -> Scalar:
    """Value of the base number of ``n`` when viewed in structure ``u``."""
    return n.base / _check_scale(u)


def _require(u: Scalar, *numbers: ScaledNumber) -> Scalar:
    u = _check_scale(u)
    for n in numbers:
        if not close(n.scale, u):
            raise StructureMismatchError(
                f"operand lives in structure {n.scale!r}, not {u!r}; "
                "arithmetic is defined only within one structure"
            )
    return u


def add_in(u: Scalar, x: ScaledNumber, y: ScaledNumber) -> ScaledNumber:
    u = _require(u, x, y)
    return ScaledNumber(x.base + y.base, u, x.order_reversed)


def sub_in(u: Scalar, x: ScaledNumber, y: ScaledNumber) -> ScaledNumber:
    u = _require(u, x, y)
    return ScaledNumber(x.base - y.base, u, x.order_reversed)


def neg_in(u: Scalar, x: ScaledNumber) -> ScaledNumber:
    u = _require(u, x)
    return ScaledNumber(-x.base, u, x.order_reversed)


def mul_in(u: Scalar, x: ScaledNumber, y: ScaledNumber) -> ScaledNumber:
    u = _require(u, x, y)
    return ScaledNumber(x.base * y.base / u, u, x.order_reversed)


def div_in(u: Scalar, x: ScaledNumber, y: ScaledNumber) -> ScaledNumber:
    u = _require(u, x, y)
    if y.base == 0:
        raise ZeroDivisionError("division by a number of value 0")
    return ScaledNumber(u * x.base / y.base, u, x.order_reversed)


def inv_in(u: Scalar, x: ScaledNumber) -> ScaledNumber:
    return div_in(u, one(u), x)


def conj_in(d: Scalar, x: ScaledNumber) -> ScaledNumber:
    """Complex conjugation inside structure ``d``: conjugates the value."""
    d = _require(d, x)
    v = x.value
    cv = v.conjugate() if isinstance(v, complex) else v
    return ScaledNumber(cv * d, d, x.order_reversed)


def less_in(u: Scalar, x: ScaledNumber, y: ScaledNumber) -> bool:
    """Order relation of a real structure, read off the values."""
    _require(u, x, y)
    vx, vy = x.value, y.value
    if isinstance(vx, complex) or isinstance(vy, complex):
        raise TypeError("complex structures carry no order relation")
    return vx < vy


def w_map(s: Scalar, x: Union[ScaledNumber, Scalar], t: Scalar = None) -> ScaledNumber:
    """Number changing, value preserving map into structure ``t * s``.

    Accepts either a :class:`ScaledNumber` or a bare value with its source
    scale ``t``.  A negative real ``s`` flips the order flag.
    """
    s = _check_scale(s)
    if isinstance(x, ScaledNumber):
        v, t, flag = x.value, x.scale, x.order_reversed
    else:
        if t is None:
            raise TypeError("w_map needs the source scale when given a bare value")
        v, t, flag = _exact(x), _check_scale(t), False
    target = t * s
    return ScaledNumber(v * target, target, flag ^ _is_negative_real(s))


def z_map(s: Scalar, x: ScaledNumber) -> ScaledNumber:
    """Number preserving, value changing map into structure ``x.scale * s``."""
    s = _check_scale(s)
    return ScaledNumber(x.base, x.scale * s, x.order_reversed ^ _is_negative_real(s))


# Operations of structure t written in terms of structure u after Z transport.
# Operands are numbers of structure u.

def transported_one(t: Scalar, u: Scalar) -> ScaledNumber:
    """Image of ``1_t`` in structure ``u``: value ``t/u``."""
    t, u = _check_scale(t), _check_scale(u)
    return make_number(t / u, u)


def transported_mul(t: Scalar, u: Scalar, x: ScaledNumber, y: ScaledNumber) -> ScaledNumber:
    """``x (u/t ×)_u y``: multiplication of structure t carried to u."""
    t = _check_scale(t)
    u = _require(u, x, y)
    return ScaledNumber((u / t) * (x.base * y.base / u), u, x.order_reversed)


def transported_div(t: Scalar, u: Scalar, x: ScaledNumber, y: ScaledNumber) -> ScaledNumber:
    """``x (t/u ÷)_u y``: division of structure t carried to u."""
    t = _check_scale(t)
    u = _require(u, x, y)
    if y.base == 0:
        raise ZeroDivisionError("division by a number of value 0")
    return ScaledNumber((t / u) * (u * x.base / y.base), u, x.order_reversed)


def transported_conj(d: Scalar, e: Scalar, x: ScaledNumber) -> ScaledNumber:
    """Conjugation of structure d carried to e: value ``(d/e)(a*)`` for ``x = ((d/e)a)_e``."""
    d = _check_scale(d)
    e = _require(e, x)
    a = x.value * e / d
    ca = a.conjugate() if isinstance(a, complex) else a
    return make_number(d / e * ca, e)


def natural_value_table(n: int) -> List[NaturalValueEntry]:
    """All values the natural number ``n`` takes in the subsets N_d, d | n."""
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError("natural_value_table expects an int")
    if n == 0:
        raise ValueError("0 has value 0 in every subset; no divisor table exists")
    if n < 0:
        raise ValueError("natural numbers are nonnegative")
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    large = [n // d for d in reversed(small) if d * d != n]
    return [NaturalValueEntry(n // d, d) for d in small + large]
