from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from drforms.cinfty import (
    Accumulator,
    CInftyValue,
    PrecisionExhausted,
    canonical_beta,
    nth_root,
    theta,
    working_precision,
)


@st.composite
def values(draw, q=None, e=None):
    q = q or draw(st.sampled_from([2, 3, 4]))
    e = e or draw(st.sampled_from([1, 2, 3]))
    top = draw(st.integers(-6, 6))
    n = draw(st.integers(1, 6))
    x = CInftyValue.zero(q)
    lead = draw(st.integers(1, q - 1))
    x = x + CInftyValue.monomial(q, Fraction(top, e), lead)
    for k in range(1, n):
        c = draw(st.integers(0, q - 1))
        if c:
            x = x + CInftyValue.monomial(q, Fraction(top - k, e), c)
    return x


@st.composite
def value_pairs(draw):
    q = draw(st.sampled_from([2, 3, 4]))
    return draw(values(q=q)), draw(values(q=q)), draw(values(q=q))


def agree(a, b):
    return (a - b).is_zero_to_precision()


@given(value_pairs())
def test_ring_laws(abc):
    a, b, c = abc
    with working_precision(30):
        assert agree((a * b) * c, a * (b * c))
        assert agree(a * (b + c), a * b + a * c)
        assert agree(a + b - b, a)


@given(values())
def test_inverse(a):
    with working_precision(30):
        one = CInftyValue.constant(a.q, 1)
        prod = a * a.inverse()
        assert agree(prod, one)
        assert prod.err_deg is None or prod.err_deg <= -29


@given(value_pairs())
def test_frobenius_is_additive_and_multiplicative(abc):
    a, b, _ = abc
    with working_precision(30):
        assert agree((a + b).frobenius(), a.frobenius() + b.frobenius())
        assert agree((a * b).frobenius(), a.frobenius() * b.frobenius())
        assert agree(a.frobenius(1).frobenius(-1), a)


@given(values(), st.sampled_from([2, 3, 5, 7]))
def test_nth_root(a, n):
    if n % a.field.p == 0:
        return
    with working_precision(30):
        y = nth_root(a, n)
        assert agree(y**n, a)


@given(values())
def test_json_roundtrip(a):
    b = CInftyValue.from_json(a.to_json())
    assert agree(a, b) and a.err == b.err and a.e == b.e


def test_error_propagates_through_products():
    with working_precision(50):
        x = (theta(3) + 1).with_error(-10)
        y = theta(3) ** 4
        assert (x * y).err_deg == -6


def test_zero_to_precision_has_no_degree():
    x = CInftyValue.unknown(2, -5)
    assert x.is_zero_to_precision() and not x.is_exact_zero()
    with pytest.raises(PrecisionExhausted):
        x.deg
    with pytest.raises(PrecisionExhausted):
        x.inverse()


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_beta_power_is_minus_theta(q):
    b = canonical_beta(q)
    assert agree(b ** (q - 1), -theta(q))


@st.composite
def weighted_terms(draw):
    q = draw(st.sampled_from([2, 3, 4]))
    out = []
    for _ in range(draw(st.integers(0, 6))):
        v = draw(values(q=q))
        if draw(st.booleans()):
            v = v.with_error(Fraction(draw(st.integers(-40, -8)), draw(st.sampled_from([1, 2, 3]))))
        out.append((v, draw(st.integers(1, q - 1))))
    return q, out


@given(weighted_terms())
def test_accumulator_matches_chained_sums(case):
    q, terms = case
    with working_precision(30):
        acc = Accumulator(q)
        ref = CInftyValue.zero(q)
        for v, c in terms:
            acc.add(v, c)
            ref = ref + CInftyValue.constant(q, c) * v
        total = acc.value()
        assert agree(total, ref)
        if ref.err is not None and total.err is not None:
            assert total.err_deg <= ref.err_deg
