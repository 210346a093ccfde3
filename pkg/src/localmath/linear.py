"""Scaled normed vector spaces over complex scalars with real scaling factors."""

from __future__ import annotations

import math

import numpy as np

from .arithmetic import (
    REL_TOL,
    DegenerateStructureError,
    ScaledNumber,
    StructureMismatchError,
    close,
    make_number,
)


def _real_scale(r) -> float:
    if isinstance(r, complex) or np.iscomplexobj(r):
        raise TypeError("vector space scaling factors are restricted to real values")
    r = float(r)
    if r == 0.0:
        raise DegenerateStructureError("degenerate structure: scaling factor must be nonzero")
    return r


class ScaledVector:
    """Base components of a vector plus the real factor of its space.

    The value of the vector in its space is ``base / scale``.
    """

    __slots__ = ("_base", "_scale")

    def __init__(self, base, scale):
        arr = np.array(base, dtype=complex).reshape(-1)
        if arr.size == 0:
            raise ValueError("vectors need at least one component")
        arr.flags.writeable = False
        self._base = arr
        self._scale = _real_scale(scale)

    @property
    def base(self) -> np.ndarray:
        return self._base

    @property
    def scale(self) -> float:
        return self._scale

    @property
    def value(self) -> np.ndarray:
        return self._base / self._scale

    @property
    def dim(self) -> int:
        return self._base.size

    def same_vector(self, other: "ScaledVector", rel_tol: float = REL_TOL) -> bool:
        return np.allclose(self._base, other._base, rtol=rel_tol, atol=0.0)

    def __repr__(self):
        return f"ScaledVector(value={self.value!r}, scale={self._scale!r})"


def make_vector(values, r) -> ScaledVector:
    r = _real_scale(r)
    return ScaledVector(np.asarray(values, dtype=complex) * r, r)


def zero_vector(dim: int, r) -> ScaledVector:
    return make_vector(np.zeros(dim), r)


def _require(r, *items):
    r = _real_scale(r)
    for item in items:
        if not close(item.scale, r):
            raise StructureMismatchError(
                f"operand lives in space {item.scale!r}, not {r!r}"
            )
    return r


def vec_add_in(r, phi: ScaledVector, psi: ScaledVector) -> ScaledVector:
    r = _require(r, phi, psi)
    if phi.dim != psi.dim:
        raise ValueError("dimension mismatch")
    return ScaledVector(phi.base + psi.base, r)


def vec_sub_in(r, phi: ScaledVector, psi: ScaledVector) -> ScaledVector:
    r = _require(r, phi, psi)
    if phi.dim != psi.dim:
        raise ValueError("dimension mismatch")
    return ScaledVector(phi.base - psi.base, r)


def scalar_mul_in(r, a: ScaledNumber, psi: ScaledVector) -> ScaledVector:
    r = _require(r, a, psi)
    return ScaledVector(complex(a.value) * psi.base, r)


def transported_scalar_mul(r, q, a: ScaledNumber, psi: ScaledVector) -> ScaledVector:
    """``a (q/r ·)_q psi``: scalar multiplication of space r carried to q."""
    r = _real_scale(r)
    q = _require(q, a, psi)
    return ScaledVector((q / r) * complex(a.value) * psi.base, q)


def norm_in(r, psi: ScaledVector) -> ScaledNumber:
    r = _require(r, psi)
    return make_number(math.hypot(*np.abs(psi.value)), r)


def inner_in(r, phi: ScaledVector, psi: ScaledVector) -> ScaledNumber:
    """Hermitian scalar product of the values, antilinear in ``phi``."""
    r = _require(r, phi, psi)
    return make_number(complex(np.vdot(phi.value, psi.value)), r)


def z_map_vector(p, psi: ScaledVector) -> ScaledVector:
    """Vector preserving, value changing map into space ``p * psi.scale``."""
    p = _real_scale(p)
    return ScaledVector(psi.base, psi.scale * p)


def w_map_vector(p, psi: ScaledVector) -> ScaledVector:
    """Vector changing, value preserving map into space ``p * psi.scale``."""
    p = _real_scale(p)
    q = psi.scale * p
    return ScaledVector(psi.value * q, q)


def norm_transport_sides(r, q, psi: ScaledVector):
    """Both sides of the norm transport identity, as numbers of space q.

    Returns ``((r/q)|psi|)_q`` and ``|(r/q)psi|_q`` where ``psi`` lives in r.
    The two agree whenever ``r/q > 0``.
    """
    r = _require(r, psi)
    q = _real_scale(q)
    lhs = make_number((r / q) * norm_in(r, psi).value, q)
    rhs = norm_in(q, z_map_vector(q / r, psi))
    return lhs, rhs


def inner_product_transport_gap(r, q, psi: ScaledVector):
    """``((r/q)<psi|psi>)_q`` and ``<(r/q)psi|(r/q)psi>_q``.

    The second equals the first times ``r/q``: the scalar product does not
    transport the way the norm does.
    """
    r = _require(r, psi)
    q = _real_scale(q)
    first = make_number((r / q) * inner_in(r, psi, psi).value, q)
    moved = z_map_vector(q / r, psi)
    second = inner_in(q, moved, moved)
    return first, second
