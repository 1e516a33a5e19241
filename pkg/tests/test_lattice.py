from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from drforms.cinfty import CInftyValue, theta_power, working_precision
from drforms.fields import Poly
from drforms.lattice import (
    GLrMatrix,
    OmegaPoint,
    UncertifiedPoint,
    canonical_cm_point,
    gamma_j_matrix,
    gl_action,
    lattice_vectors,
    parse_point,
    perturbed_cm_point,
    shear_matrix,
)


def th(q):
    return Poly(q, (0, 1))


@st.composite
def unimodular(draw, q=3, r=2):
    """Products of elementary matrices with small polynomial entries."""
    m = GLrMatrix.identity(q, r)
    for _ in range(draw(st.integers(1, 3))):
        i, j = draw(st.sampled_from([(a, b) for a in range(r) for b in range(r) if a != b]))
        coeffs = tuple(draw(st.integers(0, q - 1)) for _ in range(2))
        rows = [[Poly(q, (1,) if a == b else ()) for b in range(r)] for a in range(r)]
        rows[i][j] = Poly(q, coeffs)
        m = GLrMatrix.from_lists(q, rows) @ m
    return m


@given(unimodular(), unimodular())
def test_action_is_a_group_action(g1, g2):
    with working_precision(30):
        z = canonical_cm_point(3, 2)
        p12, j12 = gl_action(g1 @ g2, z)
        p2, j2 = gl_action(g2, z)
        p1, j1 = gl_action(g1, p2)
        for a, b in zip(p12.entries, p1.entries):
            assert (a - b).is_zero_to_precision()
        assert (j12 - j1 * j2).is_zero_to_precision()


@given(unimodular(r=3, q=2))
def test_inverse_matrix(g):
    assert (g @ g.inverse()) == GLrMatrix.identity(2, 3)


def test_gamma_j_and_shear_are_unimodular():
    g = gamma_j_matrix(2, 3, 2)
    assert g.det_code() == 1 and g.rows[1][0] == Poly(2, (1,))
    s = shear_matrix(3, 2, [th(3)])
    assert s.rows[0][1] == th(3)
    with pytest.raises(ValueError):
        GLrMatrix.from_lists(3, [[th(3), 0], [0, 1]])


@pytest.mark.parametrize("q,r", [(2, 2), (3, 2), (2, 3)])
def test_norm_certificate_matches_brute_force(q, r):
    """Certified |a.z| equals the computed size for every small vector."""
    with working_precision(30):
        for z in (canonical_cm_point(q, r), perturbed_cm_point(q, r)):
            for a, v in lattice_vectors(z, 2):
                assert v.deg == z.norm(a)
                assert v.deg >= z.floor(max(x.degree for x in a if not x.is_zero()))


def test_derived_norms():
    with working_precision(30):
        z = canonical_cm_point(2, 2)
        g = GLrMatrix.from_lists(2, [[1, 0], [th(2), 1]])
        gz, _ = gl_action(g, z)
        for a, v in lattice_vectors(gz, 2):
            assert v.deg == gz.norm(a)
            d = max(x.degree for x in a if not x.is_zero())
            assert v.deg >= gz.floor(d)


def test_uncertified_point_is_refused():
    one = CInftyValue.constant(2, 1)
    z = OmegaPoint.from_entries(2, [theta_power(2, 1), one])
    assert not z.certified
    with pytest.raises(UncertifiedPoint):
        z.profile
    trusted = OmegaPoint.from_entries(2, [theta_power(2, 1), one], trusted=True)
    assert trusted.certificate is not None and not trusted.certified


def test_parse_point():
    z = parse_point("canonical", 3, 2)
    assert z.entries[0].deg == Fraction(1, 2)
    assert parse_point("perturbed:q=2,r=3", 3, 2).r == 3
    with pytest.raises(ValueError):
        parse_point("nowhere", 2, 2)
