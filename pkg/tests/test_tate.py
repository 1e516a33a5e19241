from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from drforms.cinfty import CInftyValue, theta, theta_power, working_precision
from drforms.fields import Poly
from drforms.tate import (
    OutOfDomain,
    TateSeries,
    cofactor,
    det,
    geometric_kernel,
    inverse,
    mat_mul,
)

Q = 3
N = 8


@st.composite
def series(draw):
    coeffs = []
    for n in range(N):
        c = draw(st.integers(0, Q - 1))
        d = draw(st.integers(-3, 3)) - n
        coeffs.append(CInftyValue.monomial(Q, d, c) if c else CInftyValue.zero(Q))
    if coeffs[0].is_exact_zero():
        coeffs[0] = CInftyValue.constant(Q, 1)
    return TateSeries(Q, tuple(coeffs))


def close(a: TateSeries, b: TateSeries) -> bool:
    n = min(a.N, b.N)
    return all((x - y).is_zero_to_precision() for x, y in zip(a.coeffs[:n], b.coeffs[:n]))


@given(series(), series(), series())
def test_series_ring(f, g, h):
    with working_precision(30):
        assert close((f * g) * h, f * (g * h))
        assert close(f * (g + h), f * g + f * h)


@given(series())
def test_series_inverse(f):
    with working_precision(30):
        one = TateSeries.constant(CInftyValue.constant(Q, 1), N)
        assert close(f * f.inverse(), one)


@given(series(), series(), st.integers(1, 2))
def test_twist_is_a_ring_map(f, g, k):
    with working_precision(30):
        assert close((f * g).twist(k), f.twist(k) * g.twist(k))
        assert close(f.twist(k).twist(-k), f)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_geometric_kernel(j):
    with working_precision(40):
        k = geometric_kernel(Q, j, N)
        prod = k * TateSeries.linear_t_minus(theta_power(Q, Q**j), N)
        assert close(prod, TateSeries.constant(CInftyValue.from_int(Q, -1), N))


def test_eval_needs_the_certified_disk():
    with working_precision(40):
        k = geometric_kernel(Q, 0, N)
        v = k.eval_at(theta_power(Q, Fraction(1, 2)))
        expect = (theta(Q) - theta_power(Q, Fraction(1, 2))).inverse()
        assert (v - expect).is_zero_to_precision()
        with pytest.raises(OutOfDomain):
            k.eval_at(theta(Q))


def test_polynomial_series_is_exact():
    a = Poly(Q, (1, 2, 0, 1), "t")
    s = TateSeries.from_poly_t(a, N)
    assert s.tail_b is None and [c.leading_code() for c in s.coeffs[:4] if not c.is_exact_zero()] == [1, 2, 1]


@given(st.lists(st.integers(0, Q - 1), min_size=9, max_size=9))
def test_matrix_inverse(codes):
    with working_precision(30):
        A = [[CInftyValue.monomial(Q, i - j, c) if c else CInftyValue.zero(Q)
              for j, c in enumerate(codes[3 * i: 3 * i + 3])] for i in range(3)]
        d = det(A)
        if d.is_zero_to_precision():
            return
        Ainv = inverse(A)
        P = mat_mul(A, Ainv)
        for i in range(3):
            for j in range(3):
                expect = CInftyValue.constant(Q, 1 if i == j else 0)
                assert (P[i][j] - expect).is_zero_to_precision()
        # Laplace expansion along the first column
        col = sum((A[i][0] * cofactor(A, i, 0) for i in range(1, 3)), A[0][0] * cofactor(A, 0, 0))
        assert (col - d).is_zero_to_precision()
