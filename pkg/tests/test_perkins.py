import pytest
from hypothesis import given, strategies as st

import drforms.perkins as pk
from drforms.cinfty import theta
from drforms.suites import suite_gjr, suite_pol1, suite_proof5
from drforms.tate import geometric_kernel

from conftest import context


def _assert_all(reports):
    failed = [r.line() for r in reports if not r.passed]
    assert not failed, "\n".join(failed)


def test_constant_coefficient(ctx):
    hs = ctx.hseries()
    assert (hs.coeffs[0] - geometric_kernel(ctx.q, 0, ctx.N)).is_zero_to_precision()


def test_low_coefficients_vanish_for_q3(precision):
    c = context(3, 2)
    hs = c.hseries()
    assert hs.coeffs[1].is_exact_zero_series()
    assert hs.coeffs[3].is_exact_zero_series()


def test_first_nontrivial_coefficient(ctx):
    q, N = ctx.q, ctx.N
    hs = ctx.hseries()
    a1 = ctx.forms.mod.alpha(1)
    expect = (geometric_kernel(q, 1, N) - geometric_kernel(q, 0, N)).scale(a1)
    assert (hs.coeffs[q - 1] - expect).is_zero_to_precision()


def test_recurrence_matches_division(ctx):
    hs = ctx.hseries()
    other = pk.h_series_division(ctx.forms.mod, ctx.M, ctx.N)
    assert all((a - b).is_zero_to_precision() for a, b in zip(hs.coeffs, other.coeffs))


def test_zero_pattern(ctx):
    assert ctx.M == ctx.q**2 - 1
    assert pk.zero_pattern(ctx.hseries()) == []


@given(st.sampled_from([2, 3, 4, 5]), st.integers(0, 30))
def test_weights_are_homogeneous(q, M):
    for i, weights in pk.symbolic_weights(q, M).items():
        assert weights <= {i}
        if i % (q - 1) == 0 and i > 0:
            assert weights == {i}


def test_pol1_suite(ctx):
    _assert_all(suite_pol1(ctx))


def test_d_index_beyond_truncation_is_rejected(ctx):
    with pytest.raises(ValueError):
        ctx.hseries().D(3)


def test_g_forms_vanish(ctx):
    _assert_all(suite_gjr(ctx))


def test_g_form_index_range(ctx):
    with pytest.raises(ValueError):
        pk.g_jr(ctx.forms.mod, ctx.hseries(), ctx.r)


def test_transpose_identity_and_perkins_extraction(ctx):
    _assert_all(suite_proof5(ctx))


def test_transpose_identity_at_perturbed_point(perturbed_ctx):
    _assert_all(suite_proof5(perturbed_ctx))


def test_scaling_by_theta_is_not_trivial(ctx):
    hs = ctx.hseries()
    lam = theta(ctx.q)
    scaled = pk.scaled_h_series(ctx.forms.mod, ctx.M, ctx.N, lam)
    i = ctx.q - 1
    assert not (scaled.coeffs[i] - hs.coeffs[i]).is_zero_to_precision()
