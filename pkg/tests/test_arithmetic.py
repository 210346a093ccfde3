import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmath.arithmetic import (
    DegenerateStructureError,
    StructureMismatchError,
    add_in,
    conj_in,
    div_in,
    inv_in,
    less_in,
    make_number,
    mul_in,
    natural_value_table,
    neg_in,
    one,
    sub_in,
    transported_conj,
    transported_div,
    transported_mul,
    transported_one,
    value_in,
    w_map,
    z_map,
    zero,
)

nonzero = st.fractions(min_value=-50, max_value=50, max_denominator=40).filter(lambda q: q != 0)
values = st.fractions(min_value=-100, max_value=100, max_denominator=40)
def _signed(lo, hi):
    return st.floats(min_value=lo, max_value=hi).flatmap(lambda m: st.sampled_from([m, -m]))


# normal-range magnitudes; subnormals lose relative precision on their own
floats = st.one_of(st.just(0.0), _signed(1e-6, 1e3))
scales = _signed(1e-3, 1e3)


# construction and values

def test_make_number_examples():
    n = make_number(1, 5)
    assert n.base == 5 and n.value == 1
    assert make_number(0, 7).base == 0
    assert make_number(15, 2).base == 30


def test_zero_scale_rejected():
    with pytest.raises(DegenerateStructureError, match="degenerate structure"):
        make_number(1, 0)


def test_value_in_examples():
    n = make_number(30, 1)
    assert value_in(n, 3) == 10
    assert value_in(n, 30) == 1
    assert value_in(n, 1) == 30


def test_exact_inputs_stay_exact():
    n = make_number(Fraction(1, 3), 3)
    assert n.base == 1 and isinstance(n.value, Fraction)


# structure-local operations

def test_add_and_mul_examples():
    x, y = make_number(3, 2), make_number(5, 2)
    s = add_in(2, x, y)
    assert s.value == 8 and s.base == 16
    p = mul_in(2, x, y)
    assert p.value == 15 and p.base == 30
    assert mul_in(1, make_number(3, 1), make_number(4, 1)).value == 12
    assert add_in(2, x, zero(2)) == x


def test_mixed_structures_rejected():
    with pytest.raises(StructureMismatchError):
        add_in(2, make_number(1, 2), make_number(1, 3))


def test_division_by_zero_value():
    with pytest.raises(ZeroDivisionError):
        div_in(3, one(3), zero(3))


def test_conjugation():
    assert conj_in(1, make_number(2.5, 1)).value == 2.5
    assert conj_in(1, make_number(1j, 1)).value == -1j


def test_order_follows_values():
    assert less_in(2, make_number(1, 2), make_number(3, 2))
    with pytest.raises(TypeError):
        less_in(1, make_number(1j, 1), make_number(1, 1))


@given(values, values, values, nonzero)
def test_field_axioms_exact(a, b, c, t):
    x, y, z = make_number(a, t), make_number(b, t), make_number(c, t)
    assert mul_in(t, x, one(t)) == x
    assert add_in(t, x, zero(t)) == x
    assert add_in(t, x, y) == add_in(t, y, x)
    assert mul_in(t, x, y) == mul_in(t, y, x)
    assert mul_in(t, mul_in(t, x, y), z) == mul_in(t, x, mul_in(t, y, z))
    assert add_in(t, add_in(t, x, y), z) == add_in(t, x, add_in(t, y, z))
    assert mul_in(t, x, add_in(t, y, z)) == add_in(t, mul_in(t, x, y), mul_in(t, x, z))
    assert add_in(t, x, neg_in(t, x)) == zero(t)
    assert sub_in(t, x, y) == add_in(t, x, neg_in(t, y))
    if a != 0:
        assert mul_in(t, x, inv_in(t, x)) == one(t)


@given(floats, floats, floats, scales)
def test_field_axioms_float(a, b, c, t):
    x, y, z = make_number(a, t), make_number(b, t), make_number(c, t)
    lhs = mul_in(t, mul_in(t, x, y), z).value
    rhs = mul_in(t, x, mul_in(t, y, z)).value
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12 * abs(a * b * c))
    lhs = mul_in(t, x, add_in(t, y, z)).value
    rhs = add_in(t, mul_in(t, x, y), mul_in(t, x, z)).value
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12 * abs(a) * (abs(b) + abs(c)))


# W and Z maps

def test_map_examples():
    n = w_map(3, 1, 1)
    assert n.base == 3 and n.value == 1 and n.scale == 3
    a = Fraction(7)
    z = z_map(2, make_number(a, 1))
    assert z.value == a / 2 and z.base == a


@given(values, nonzero, nonzero, nonzero)
def test_group_laws(v, t, s1, s2):
    x = make_number(v, t)
    assert z_map(s1, z_map(s2, x)) == z_map(s1 * s2, x)
    assert w_map(s1, w_map(s2, x)) == w_map(s1 * s2, x)
    assert z_map(s1, z_map(s2, x)) == z_map(s2, z_map(s1, x))
    assert z_map(s1, x).base == x.base
    assert w_map(s1, x).value == x.value


@given(values, nonzero, st.lists(nonzero, min_size=1, max_size=6))
def test_order_flag_counts_negative_maps(v, t, ss):
    x = make_number(v, t)
    for s in ss:
        x = z_map(s, x)
    assert x.order_reversed == (sum(s < 0 for s in ss) % 2 == 1)


def test_reversed_order_structure():
    # value order in structure -1 is the mirror of the base order
    x, y = make_number(1, 1), make_number(2, 1)
    zx, zy = z_map(-1, x), z_map(-1, y)
    assert zx.order_reversed
    assert less_in(-1, zy, zx)


# transported operations

@given(values, values, nonzero, nonzero)
def test_transported_operations(a, b, t, u):
    x, y = make_number(a, t), make_number(b, t)
    s = u / t
    zx, zy = z_map(s, x), z_map(s, y)

    def same(m, n):
        return (m.base, m.scale) == (n.base, n.scale)

    assert same(transported_mul(t, u, zx, zy), z_map(s, mul_in(t, x, y)))
    assert same(transported_one(t, u), z_map(s, one(t)))
    if b != 0:
        assert same(transported_div(t, u, zx, zy), z_map(s, div_in(t, x, y)))


def test_transported_one_value():
    assert transported_one(6, 2).value == 3


def test_transported_conj():
    d, e = 2.0, 0.5
    x = make_number(1 + 2j, d)
    moved = z_map(e / d, x)
    back = transported_conj(d, e, moved)
    assert back.same_number(z_map(e / d, conj_in(d, x)))


# natural value table

def test_value_table_thirty():
    assert [tuple(e) for e in natural_value_table(30)] == [
        (30, 1), (15, 2), (10, 3), (6, 5), (5, 6), (3, 10), (2, 15), (1, 30)]


@pytest.mark.parametrize("p", [2, 3, 13, 97, 7919])
def test_value_table_prime(p):
    assert [tuple(e) for e in natural_value_table(p)] == [(p, 1), (1, p)]


def test_value_table_one_and_errors():
    assert [tuple(e) for e in natural_value_table(1)] == [(1, 1)]
    with pytest.raises(ValueError):
        natural_value_table(0)
    with pytest.raises(ValueError):
        natural_value_table(-4)


@given(st.integers(min_value=1, max_value=10**6))
def test_value_table_products(n):
    table = natural_value_table(n)
    assert all(v * d == n for v, d in table)
    assert [d for _, d in table] == sorted(d for _, d in table)
    assert len(table) == sum(1 for d in range(1, n + 1) if n % d == 0) if n < 2000 else True
