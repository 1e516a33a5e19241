from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from drforms.cinfty import CInftyValue, theta, theta_power, working_precision
from drforms.drinfeld import (
    carlitz_alpha,
    carlitz_module_data,
    carlitz_pi,
    carlitz_pi_direct,
    module_from_point,
    power_sum_exp_coefficients,
)
from drforms.lattice import OmegaPoint, canonical_cm_point, lattice_vectors, perturbed_cm_point

CONFIGS = [(2, 2), (3, 2), (2, 3)]


def _gf2_pi_oracle(n_terms):
    """q = 2: pi~ = theta^2 prod_{i>=1} (1 - x^(2^i - 1))^(-1), x = 1/theta, as GF(2) bit polynomials."""
    mask = (1 << n_terms) - 1
    acc = 1
    i = 1
    while 2**i - 1 < n_terms:
        step = 2**i - 1
        geom = 0
        for k in range(0, n_terms, step):
            geom |= 1 << k
        # carry-less product truncated to n_terms bits
        prod, a = 0, acc
        while a:
            low = a & -a
            prod ^= geom << (low.bit_length() - 1)
            a ^= low
        acc = prod & mask
        i += 1
    return [2 - k for k in range(n_terms) if acc >> k & 1]


def test_carlitz_pi_q2_matches_bit_oracle():
    with working_precision(60):
        pi = carlitz_pi(2)
        got = [k for k, _ in pi.terms() if k > -50]
        assert got == [k for k in _gf2_pi_oracle(52) if k > -50]


def test_carlitz_pi_q2_frozen_head():
    with working_precision(40):
        head = [k for k, _ in carlitz_pi(2).terms()[:10]]
    assert head == [2, 1, 0, -4, -7, -10, -12, -13, -15, -16]


@pytest.mark.parametrize("q", [2, 3, 4])
def test_carlitz_pi_is_a_carlitz_period(q):
    """exp_C(pi~) = sum pi~^(q^j)/D_j vanishes and |pi~| = q^(q/(q-1))."""
    with working_precision(40):
        pi = carlitz_pi(q)
        assert pi.deg == Fraction(q, q - 1)
        assert (pi - carlitz_pi_direct(q)).is_zero_to_precision()
        acc = CInftyValue.zero(q)
        j = 0
        while q**j * (pi.deg - j - 1) + j * q**j > -60 and j < 8:
            acc = acc + carlitz_alpha(q, j) * pi.frobenius(j)
            j += 1
        assert acc.is_zero_to_precision()
        assert carlitz_module_data(q).eval_exp(pi).is_zero_to_precision()


@pytest.mark.parametrize("q,r", CONFIGS)
def test_alphas_match_power_sums(q, r):
    with working_precision(40):
        z = perturbed_cm_point(q, r)
        mod = module_from_point(z, 2 if r == 2 else 1)
        oracle, _ = power_sum_exp_coefficients(z, 3 if r == 2 else 2, r)
        for j in range(1, r + 1):
            assert (mod.alpha(j) - oracle[j]).is_zero_to_precision()
        # power sums converge slowly and the absolute error of alpha_1 feeds every
        # later alpha_j, so only alpha_1 is asked to carry several digits
        assert oracle[1].err_deg <= mod.alpha(1).deg - 2


@pytest.mark.parametrize("q,r", CONFIGS)
def test_module_structure(q, r):
    with working_precision(60):
        z = canonical_cm_point(q, r)
        mod = module_from_point(z, 3 if r == 2 else 2)
        for k in range(1, r + 4):
            assert mod.recursion_residual(k).is_zero_to_precision()
        # (theta^q - theta) alpha_1 = g_1
        assert ((theta_power(q, q) - theta(q)) * mod.alpha(1) - mod.g[0]).is_zero_to_precision()
        # exp vanishes on the lattice
        for a, v in list(lattice_vectors(z, 1))[:10]:
            assert mod.eval_exp(v).is_zero_to_precision()


@given(st.integers(-3, 1), st.lists(st.integers(0, 2), min_size=5, max_size=5))
def test_exp_intertwines_phi_theta(top, codes):
    with working_precision(40):
        q = 3
        mod = _module_32()
        x = CInftyValue.monomial(q, top, 1)
        for k, c in enumerate(codes, start=1):
            if c:
                x = x + CInftyValue.monomial(q, top - k, c)
        lhs = mod.phi_theta_apply(mod.eval_exp(x))
        rhs = mod.eval_exp(theta(q) * x)
        assert (lhs - rhs).is_zero_to_precision()


_cache = {}


def _module_32():
    if "m" not in _cache:
        _cache["m"] = module_from_point(canonical_cm_point(3, 2), 3)
    return _cache["m"]


@pytest.mark.parametrize("q", [2, 3])
def test_rank_one_lattice_A(q):
    """The lattice A gives phi_theta = theta + pi~^(q-1) tau."""
    with working_precision(40):
        z = OmegaPoint.from_entries(q, [CInftyValue.constant(q, 1)])
        mod = module_from_point(z, 4)
        assert (mod.delta - carlitz_pi(q) ** (q - 1)).is_zero_to_precision()
