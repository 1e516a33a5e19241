from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import drforms.eisenstein as eis
from drforms.cinfty import CInftyValue, working_precision
from drforms.fields import Poly
from drforms.lattice import shear_matrix
from drforms.suites import (
    suite_basson,
    suite_lu,
    suite_tegek,
    suite_tfe,
    suite_tfe3,
    suite_tmain,
    suite_weak,
)

from conftest import context


def _assert_all(reports):
    failed = [r.line() for r in reports if not r.passed]
    assert not failed, "\n".join(failed)


def test_scalar_sums_vanish_off_the_weight_lattice(ctx):
    q = ctx.q
    for k in range(1, 2 * q):
        if k % (q - 1):
            assert eis.eis_scalar(ctx.z, k, 1).is_exact_zero()


def test_tate_vector_vanishes_when_k_minus_one_is_off_the_lattice():
    c = context(3, 2)
    with working_precision(80):
        v = eis.eis_tate(c.z, 2, 2, 8)
    assert all(x.is_exact_zero_series() for x in v.coords)


def test_scalar_sum_is_stable_in_the_degree_bound(ctx):
    k = ctx.q - 1
    D = 1 if ctx.q == 3 else ctx.D
    lo = eis.eis_scalar(ctx.z, k, D)
    hi = eis.eis_scalar(ctx.z, k, D + 1)
    assert (lo - hi).is_zero_to_precision()
    assert hi.err_deg < lo.err_deg or ctx.q == 3


def test_torsion_representative_count():
    for q, r in [(2, 2), (3, 2), (2, 3)]:
        assert len(eis.torsion_representatives(q, r)) == (q**r - 1) // (q - 1)


def test_h_matches_shifted_lattice_sums(ctx):
    f = ctx.forms
    hb = eis.h_function_bruteforce(ctx.z, ctx.D, f.pi)
    diff = hb - f.h
    assert diff.is_zero_to_precision()
    assert diff.err_deg < f.h.size_deg()


def test_u_matches_carlitz_form_in_rank_two(ctx):
    if ctx.r != 2:
        pytest.skip("Carlitz form of u is rank two only")
    f = ctx.forms
    a = eis.u_value(ctx.z, f.tilde_mod, f.pi)
    b = eis.u_value_carlitz(ctx.z, f.pi)
    assert (a - b).is_zero_to_precision()
    assert (a - b).err_deg <= a.size_deg() - 20


def test_u_terms_decrease(ctx):
    f = ctx.forms
    bounds = [eis.u_term_bound(ctx.z, f.tilde_mod, f.pi, d) for d in range(6)]
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))


def test_u_expansion_records_terms(ctx):
    f = ctx.forms
    ux = eis.u_expansion(ctx.z, 2, f.tilde_mod, f.pi)
    assert len(ux.terms) == sum(ctx.q**d for d in range(3))
    assert ux.value.err_deg >= ux.tail


def test_false_eisenstein_routes_agree(ctx):
    _assert_all(suite_tegek(ctx))


def test_unknown_route_is_rejected(ctx):
    with pytest.raises(ValueError):
        eis.false_eisenstein(ctx.forms, "nope")


def test_bold_e_specializes_to_the_false_eisenstein_series(ctx):
    f = ctx.forms
    E = eis.false_eisenstein(f, "det")
    assert not E.is_zero_to_precision()
    at_theta = eis.false_eisenstein(f, "bold")
    assert (E - at_theta).is_zero_to_precision()


def test_cofactor_formula(ctx):
    _assert_all(suite_tmain(ctx))


def test_cofactor_formula_at_perturbed_point(perturbed_ctx):
    _assert_all(suite_tmain(perturbed_ctx))


def test_functional_equations(ctx):
    _assert_all(suite_tfe(ctx))


def test_tate_functional_equations(ctx):
    _assert_all(suite_tfe3(ctx))


def test_weak_modularity_and_j_invariants(ctx):
    _assert_all(suite_weak(ctx))


def test_basson_product(ctx):
    _assert_all(suite_basson(ctx))


def test_u_series_identity_at_short_truncation(ctx):
    short = eis.PointForms(ctx.z, ctx.D, 8)
    lhs = eis.eis_tate(ctx.z, 1, ctx.D, 8).coords[0]
    rhs = eis.bold_E_u_series(ctx.z, ctx.D, 8, short.tilde_mod, short.pi).scale(-short.pi)
    assert (lhs - rhs).is_zero_to_precision()
    _assert_all(suite_lu(ctx))


def test_normalized_module_has_signed_unit_discriminant(ctx):
    nm = eis.w_normalize(ctx.forms.mod)
    sign = CInftyValue.from_int(ctx.q, -1) ** (ctx.r - 1)
    assert (nm.delta - sign).is_zero_to_precision()


def test_lower_matrix_has_nonzero_corner():
    g = eis.lower_matrix(3, 2)
    assert not g.entry(1, 0).is_zero()
    assert g.det_code() == 1


@settings(max_examples=6)
@given(st.lists(st.integers(0, 1), min_size=2, max_size=2))
def test_functional_equation_for_random_shears(bits):
    c = context(2, 2)
    with working_precision(80):
        a = Poly(2, (bits[0], bits[1] or 1))
        g = shear_matrix(2, 2, [a])
        lhs, rhs = eis.tfe_sides(c.forms, g)
        assert (lhs - rhs).is_zero_to_precision()
        assert lhs.err_deg < lhs.size_deg() - Fraction(5)
