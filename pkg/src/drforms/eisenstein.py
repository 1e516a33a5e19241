"""Modular-form objects on Omega^r: Eisenstein series (scalar and Tate-valued),
Gekeler's h, u and u_a, the false Eisenstein series E_r by three routes,
E_r^[j], their t-deformations, and invariants J_l.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

from .agf import AGFMatrix, build_F, omega_twisted_inverse
from .cinfty import (
    Accumulator,
    CInftyValue,
    PrecisionExhausted,
    canonical_beta,
    difference_quotient,
    get_working_precision,
    nth_root,
    theta,
)
from .drinfeld import DrinfeldModuleData, carlitz_pi, module_from_point
from .fields import Poly, enumerate_polys, fq_elements
from .lattice import GLrMatrix, OmegaPoint, gl_action, lattice_vectors, representative_values
from .tate import TateSeries, cofactor


def default_degree_bound(r: int) -> int:
    return 3 if r == 2 else 2


def carlitz_weight(q: int, r: int) -> int:
    """1 + q + ... + q^(r-1) = (q^r - 1)/(q - 1)."""
    return (q**r - 1) // (q - 1)


def _minus_one(q: int) -> CInftyValue:
    return CInftyValue.from_int(q, -1)


def _orbit_sum(q: int, k: int) -> int:
    """sum_{c in F_q^x} c^k is -1 when (q-1) | k and 0 otherwise."""
    return -1 if k % (q - 1) == 0 else 0


# -- everything attached to one point ------------------------------------

@dataclass
class PointForms:
    """Lazily built objects at a point z, sharing one module and one F."""

    z: OmegaPoint
    D: int
    N: int = 24
    cache: dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.z.q

    @property
    def r(self) -> int:
        return self.z.r

    @cached_property
    def mod(self) -> DrinfeldModuleData:
        return module_from_point(self.z, self.D)

    @cached_property
    def pi(self) -> CInftyValue:
        return carlitz_pi(self.q)

    @cached_property
    def h(self) -> CInftyValue:
        return h_function(self.mod, self.pi)

    @cached_property
    def F(self) -> AGFMatrix:
        return build_F(self.mod, self.N)

    @cached_property
    def tilde_mod(self) -> DrinfeldModuleData:
        return module_from_point(self.z.tilde(), self.D)

    @cached_property
    def period_matrix(self):
        return self.mod.period_matrix()

    def at(self, gamma: GLrMatrix) -> "tuple[PointForms, CInftyValue]":
        gz, j = gl_action(gamma, self.z)
        return PointForms(gz, self.D, self.N), j


# -- Eisenstein series ---------------------------------------------------

def lattice_inverses(z: OmegaPoint, D: int):
    """(a, 1/(a.z)) over orbit representatives with max deg a_i <= D; shareable between sums."""
    return [(a, v.inverse()) for a, v in representative_values(z, D)]


def _inverses(z, D, inverses):
    if inverses is not None:
        return inverses
    return ((a, v.inverse()) for a, v in representative_values(z, D))


def eis_scalar(z: OmegaPoint, k: int, D: int, inverses=None) -> CInftyValue:
    """Sum' (a.z)^(-k) over max deg a_i <= D, with the omitted shells bounded.

    ``inverses`` may carry lattice_inverses(z, D) computed once for several sums.
    """
    if k < 1:
        raise ValueError("Eisenstein series need k >= 1")
    q = z.q
    if _orbit_sum(q, k) == 0:
        return CInftyValue.zero(q)
    acc = Accumulator(q)
    for _, inv in _inverses(z, D, inverses):
        acc.add(inv ** k)
    return (-acc.value()).with_error(-k * z.floor(D + 1))


@dataclass
class EisensteinVector:
    """Coordinates of the Tate-valued Eisenstein series of weight k."""

    k: int
    N: int
    D: int
    coords: list
    tail_error: Fraction | None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "N": self.N,
            "D": self.D,
            "coords": [c.to_json() for c in self.coords],
            "tail_error": None if self.tail_error is None else str(self.tail_error),
        }


def eis_tate(z: OmegaPoint, k: int, D: int, N: int, inverses=None) -> EisensteinVector:
    """Sum' a_j(t) (a.z)^(-k), j = 1..r, as t-series.

    Coefficient n only sees vectors with deg a_j >= n, so the omitted part
    of coefficient n is bounded by |a.z|^(-k) over max deg a_i >= max(D+1, n).
    """
    if k < 1:
        raise ValueError("Eisenstein series need k >= 1")
    q, r = z.q, z.r
    if _orbit_sum(q, k - 1) == 0:
        coords = [TateSeries.zero(q, N) for _ in range(r)]
        return EisensteinVector(k, N, D, coords, None)
    sums = [[Accumulator(q) for _ in range(N)] for _ in range(r)]
    for a, base in _inverses(z, D, inverses):
        inv = base ** k
        for j, aj in enumerate(a):
            for n, c in enumerate(aj.coeffs[:N]):
                if c:
                    sums[j][n].add(inv, c)
    coords = []
    for j in range(r):
        coeffs = tuple((-sums[j][n].value()).with_error(-k * z.floor(max(D + 1, n))) for n in range(N))
        # |c_n| <= q^(-k floor(n)) and floor(n) >= floor(N) + (n - N) for n >= N
        b = -k * (z.floor(N) - N)
        coords.append(TateSeries(q, coeffs, Fraction(b), Fraction(k)))
    return EisensteinVector(k, N, D, coords, -k * z.floor(D + 1))


# -- h ---------------------------------------------------------------------

def torsion_representatives(q: int, r: int):
    """Vectors c in F_q^r whose first nonzero entry is 1 (mu = c / theta)."""
    out = []
    for c in itertools.product(fq_elements(q), repeat=r):
        nz = [x for x in c if x]
        if nz and nz[0] == 1:
            out.append(c)
    return out


def _mu_dot(z: OmegaPoint, c) -> CInftyValue:
    q = z.q
    vals = [CInftyValue.constant(q, x) if x else CInftyValue.zero(q) for x in c]
    return z.dot_values(vals) / theta(q)


def e_mu_values(mod: DrinfeldModuleData, pi: CInftyValue):
    """pi~^(-1) E_mu(z) = pi~^(-1) / exp_{zA}(mu.z) for mu in S."""
    z = mod.point
    pinv = pi.inverse()
    return [pinv * mod.eval_exp(_mu_dot(z, c)).inverse() for c in torsion_representatives(z.q, z.r)]


def h_function(mod: DrinfeldModuleData, pi: CInftyValue | None = None) -> CInftyValue:
    """h_r = -beta prod_{mu in S} pi~^(-1) E_mu(z).

    The pi~^(-1) normalization of E_mu is the one under which
    Delta_r = pi~^(q^r-1) (-1)^(r-1) h_r^(q-1) and det F = pi~^(-w) h_r^(-1) omega hold.
    """
    q = mod.q
    pi = carlitz_pi(q) if pi is None else pi
    h = -canonical_beta(q)
    for v in e_mu_values(mod, pi):
        h = h * v
    if h.is_zero_to_precision():
        raise PrecisionExhausted("h_r is 0 to the tracked precision")
    return h


def h_function_bruteforce(z: OmegaPoint, D: int, pi: CInftyValue | None = None) -> CInftyValue:
    """Oracle for h_r: each E_mu as the shifted lattice sum over max deg a_i <= D.

    Omitted vectors satisfy |a.z + mu.z| >= floor(D+1) because |mu.z| is
    smaller than every norm in that range.
    """
    q = z.q
    pi = carlitz_pi(q) if pi is None else pi
    pinv = pi.inverse()
    err = -z.floor(D + 1)
    points = [v for _, v in lattice_vectors(z, D, exclude_zero=False)]
    h = -canonical_beta(q)
    for c in torsion_representatives(q, z.r):
        shift = _mu_dot(z, c)
        if shift.deg >= z.floor(D + 1):
            raise PrecisionExhausted("degree bound too small for the shifted sum")
        acc = CInftyValue.zero(q)
        for v in points:
            acc = acc + (v + shift).inverse()
        h = h * pinv * acc.with_error(err)
    return h


# -- u and u_a --------------------------------------------------------------

def _check_orthogonal_to_tilde(z: OmegaPoint, tmod: DrinfeldModuleData):
    if z.gamma is not None:
        raise PrecisionExhausted("u-expansions are evaluated at base points only")
    x = z.entries[0].deg
    fr = x - (x.numerator // x.denominator)
    for v in tmod.point.entry_degrees():
        if v - (v.numerator // v.denominator) == fr:
            raise PrecisionExhausted("z_1 is not orthogonal to the lattice of z~; |u_a| is not certified")


def u_a_value(z: OmegaPoint, a: Poly, tmod: DrinfeldModuleData, pi: CInftyValue) -> CInftyValue:
    """u_a = exp_{pi~ z~ A}(pi~ a z_1)^(-1) = (pi~ exp_{z~ A}(a z_1))^(-1)."""
    if a.is_zero():
        raise ValueError("u_a needs a != 0")
    x = CInftyValue.from_poly(a) * z.entries[0]
    return (pi * tmod.eval_exp(x)).inverse()


def u_value(z: OmegaPoint, tmod: DrinfeldModuleData, pi: CInftyValue) -> CInftyValue:
    return u_a_value(z, Poly(z.q, (1,)), tmod, pi)


def u_value_carlitz(z: OmegaPoint, pi: CInftyValue) -> CInftyValue:
    """r = 2 oracle: pi~ A is the Carlitz lattice, so u = 1/exp_C(pi~ z_1)."""
    from .drinfeld import carlitz_module_data

    if z.r != 2:
        raise ValueError("the Carlitz form of u needs r = 2")
    C = carlitz_module_data(z.q)
    return C.eval_exp(pi * z.entries[0]).inverse()


def u_term_bound(z: OmegaPoint, tmod: DrinfeldModuleData, pi: CInftyValue, d: int) -> Fraction:
    """log_q |a u_a| for every monic a of degree d (exact for orthogonal z_1)."""
    return d - pi.deg - tmod.profile.exp_abs(d + z.entries[0].deg)


@dataclass
class UExpansion:
    terms: list
    value: CInftyValue
    tail: Fraction

    def to_json(self) -> dict:
        return {
            "terms": [[list(a.coeffs), v.to_json()] for a, v in self.terms],
            "value": self.value.to_json(),
            "tail": str(self.tail),
        }


def _u_tail(z, tmod, pi, D) -> Fraction:
    """Bound for sum over deg a > D of a u_a; checks that the term bounds decrease."""
    bounds = [u_term_bound(z, tmod, pi, d) for d in range(D + 1, D + 4)]
    if any(b2 >= b1 for b1, b2 in zip(bounds, bounds[1:])):
        raise PrecisionExhausted("|a u_a| is not decreasing past the degree bound")
    return bounds[0]


def u_expansion(z: OmegaPoint, D: int, tmod: DrinfeldModuleData, pi: CInftyValue) -> UExpansion:
    """E_r = sum_{a monic} a u_a truncated at deg a <= D."""
    _check_orthogonal_to_tilde(z, tmod)
    q = z.q
    terms = []
    acc = CInftyValue.zero(q)
    for d in range(D + 1):
        for a in enumerate_polys(q, d, monic_only=True, exact_degree=True):
            ua = u_a_value(z, a, tmod, pi)
            terms.append((a, ua))
            acc = acc + CInftyValue.from_poly(a) * ua
    tail = _u_tail(z, tmod, pi, D)
    return UExpansion(terms, acc.with_error(tail), tail)


def bold_E_u_series(z: OmegaPoint, D: int, N: int, tmod: DrinfeldModuleData, pi: CInftyValue) -> TateSeries:
    """sum_{a monic} a(t) u_a as a t-series (slope 2, so t = theta is inside)."""
    _check_orthogonal_to_tilde(z, tmod)
    q = z.q
    zero = CInftyValue.zero(q)
    sums = [zero] * N
    for d in range(D + 1):
        for a in enumerate_polys(q, d, monic_only=True, exact_degree=True):
            ua = u_a_value(z, a, tmod, pi)
            for n, c in enumerate(a.coeffs[:N]):
                if c:
                    sums[n] = sums[n] + CInftyValue.constant(q, c) * ua
    # coefficient n misses a with deg a >= max(D+1, n); |u_a| decays faster than q^(-2 deg a)
    def ubound(d):
        return u_term_bound(z, tmod, pi, d) - d

    coeffs = tuple(s.with_error(ubound(max(D + 1, n))) for n, s in enumerate(sums))
    slope = Fraction(2)
    for n in range(N, N + 3):
        if ubound(n + 1) - ubound(n) > -slope:
            raise PrecisionExhausted("u-expansion tail does not decay fast enough for the envelope")
    b = ubound(N) + slope * N
    return TateSeries(q, coeffs, b, slope)


# -- E_r and E_r^[j] ------------------------------------------------------

def _Q(q: int, r: int) -> int:
    """q + q^2 + ... + q^(r-1)."""
    return sum(q**i for i in range(1, r))


def false_eisenstein_det(forms: PointForms, j: int = 1) -> CInftyValue:
    """pi~^(-1+q+...+q^(r-1)) h_r times the (j,1)-cofactor of the period matrix.

    For j = 1 this is the determinant of (F_{delta_k}(z_i))_{i >= 2, k >= 1}.
    """
    q, r = forms.q, forms.r
    P = forms.period_matrix
    c = cofactor(P, j - 1, 0)
    return forms.pi ** (_Q(q, r) - 1) * forms.h * c


def false_eisenstein_u(forms: PointForms) -> CInftyValue:
    return u_expansion(forms.z, forms.D, forms.tilde_mod, forms.pi).value


def default_step(z: OmegaPoint) -> int:
    return int(get_working_precision() // 2)


def log_derivative_delta(z: OmegaPoint, D: int, coord: int, step: int | None = None, gamma: GLrMatrix | None = None):
    """pi~^(-1) f^(-1) df/dz_coord for f = Delta_r(z), or Delta_r(gamma . z) when gamma is given.

    The difference quotient step is theta^(-step).  |Delta_r| only depends on
    the norm profile, which is constant on the disk of radius |z_coord|/q^(1/e),
    so sup|f| on that disk is |f(z)|.
    """
    q = z.q
    step = default_step(z) if step is None else step

    def f(p):
        if gamma is not None:
            p = gl_action(gamma, p)[0]
        return module_from_point(p, D).delta

    f0 = f(z)
    radius = None
    if gamma is not None:
        j = gl_action(gamma, z)[1]
        a = gamma.rows[-1][coord]
        zc = z.entries[coord]
        radius = zc.deg - Fraction(1, zc.e)
        if not a.is_zero():
            radius = min(radius, j.deg - a.degree - Fraction(1, zc.e))
    dq = difference_quotient(f, z, coord, step, sup_deg=f0.deg, radius_deg=radius)
    return carlitz_pi(q).inverse() * dq / f0


def false_eisenstein_dl(forms: PointForms, j: int = 1, step: int | None = None) -> CInftyValue:
    return log_derivative_delta(forms.z, forms.D, j - 1, step)


def false_eisenstein(forms: PointForms, route: str = "u", j: int = 1, step: int | None = None) -> CInftyValue:
    """E_r (j = 1) or E_r^[j] by route 'u', 'det', 'dL' or 'bold' (the deformation at t = theta)."""
    if route == "u":
        if j != 1:
            raise ValueError("the u-expansion route only gives E_r")
        return false_eisenstein_u(forms)
    if route == "det":
        return false_eisenstein_det(forms, j)
    if route == "dL":
        return false_eisenstein_dl(forms, j, step)
    if route == "bold":
        return bold_E_j(forms, j).eval_at(theta(forms.q))
    raise ValueError(f"unknown route {route!r}")


def bold_E_j(forms: PointForms, j: int = 1) -> TateSeries:
    """-pi~^(q+...+q^(r-1)) h_r C_j1 / omega^(1), with C_j1 the (j,1)-cofactor of F."""
    q, r = forms.q, forms.r
    C = forms.F.cofactor(j - 1, 0)
    inv = omega_twisted_inverse(q, forms.N)
    scale = -(forms.pi ** _Q(q, r) * forms.h)
    return (C * inv).scale(scale)


def bold_E(forms: PointForms) -> TateSeries:
    return bold_E_j(forms, 1)


def tmain_rhs(forms: PointForms):
    """pi~^((q^r-1)/(q-1)) h_r / ((t - theta) omega) (C_11, ..., C_r1), using (t-theta)omega = omega^(1)."""
    q, r = forms.q, forms.r
    inv = omega_twisted_inverse(q, forms.N)
    scale = forms.pi ** carlitz_weight(q, r) * forms.h
    return [(forms.F.cofactor(i, 0) * inv).scale(scale) for i in range(r)]


# -- modular-group data ------------------------------------------------------

def _poly_value(a: Poly) -> CInftyValue:
    return CInftyValue.from_poly(a)


def det_value(gamma: GLrMatrix) -> CInftyValue:
    return CInftyValue.constant(gamma.q, gamma.det_code())


def j_invariants(mod: DrinfeldModuleData):
    """J_l = g_l^((q^r-1)/(q^d-1)) / Delta^((q^l-1)/(q^d-1)), d = gcd(l, r)."""
    q, r = mod.q, mod.r
    out = []
    for l in range(1, r):
        d = gcd(l, r)
        num = mod.g[l - 1] ** ((q**r - 1) // (q**d - 1))
        den = mod.delta ** ((q**l - 1) // (q**d - 1))
        out.append(num / den)
    return out


@dataclass
class NormalizedModule:
    w: CInftyValue
    g: list
    delta: CInftyValue


def w_normalize(mod: DrinfeldModuleData) -> NormalizedModule:
    """w with w^(q^r-1) = (-1)^(r-1) Delta; the conjugate module w^(-1) phi w has
    coefficients g_l w^(1-q^l) and leading coefficient (-1)^(r-1)."""
    q, r = mod.q, mod.r
    sign = _minus_one(q) ** (r - 1)
    w = nth_root(sign * mod.delta, q**r - 1)
    g = [x * w ** (1 - q**l) for l, x in enumerate(mod.g, start=1)]
    delta = mod.delta * w ** (1 - q**r)
    return NormalizedModule(w, g, delta)


# -- Basson's product formula -------------------------------------------------

def _compose_phi(coeffs_a, coeffs_b, q):
    """Coefficients of phi_a o phi_b as tau-polynomials (lists of CInftyValue)."""
    out = [CInftyValue.zero(q)] * (len(coeffs_a) + len(coeffs_b) - 1)
    for i, x in enumerate(coeffs_a):
        for k, y in enumerate(coeffs_b):
            out[i + k] = out[i + k] + x * y.frobenius(i)
    return out


def phi_a_coefficients(theta_coeffs, a: Poly):
    """phi_a = sum a_i phi_theta^i for the module with phi_theta = theta_coeffs."""
    q = a.q
    one = [CInftyValue.constant(q, 1)]
    power = one
    total = [CInftyValue.zero(q)]
    for c in a.coeffs:
        if c:
            scaled = [CInftyValue.constant(q, c) * x for x in power]
            n = max(len(total), len(scaled))
            total = [(total[i] if i < len(total) else CInftyValue.zero(q))
                     + (scaled[i] if i < len(scaled) else CInftyValue.zero(q)) for i in range(n)]
        power = _compose_phi(theta_coeffs, power, q)
    return total


def basson_product(forms: PointForms):
    """Right side of pi~^(1-q^r) Delta_r = -Delta^(pi~z~)_(r-1)(theta)^q u^(q-1) prod_{a monic} f_a(u)^((q^r-1)(q-1)).

    f_a(u) = sum_k (phi_a)_k u^(d - q^k) / Delta(a), d = q^((r-1) deg a), for the
    module of pi~ z~ A.  Factors with deg a > D differ from 1 by at most
    (B |u|)^(d (q-1)/q), B bounding every torsion point of that module.
    Returns (lhs, rhs).
    """
    q, r, D = forms.q, forms.r, forms.D
    z, pi, tmod = forms.z, forms.pi, forms.tilde_mod
    _check_orthogonal_to_tilde(z, tmod)
    # phi^(pi~ z~): coefficients scale by pi~^(1 - q^i)
    theta_coeffs = [theta(q)] + [c * pi ** (1 - q**i) for i, c in enumerate(tmod.coefficients(), start=1)]
    u = u_value(z, tmod, pi)
    prod = CInftyValue.constant(q, 1)
    e = (q**r - 1) * (q - 1)
    for d in range(1, D + 1):
        for a in enumerate_polys(q, d, monic_only=True, exact_degree=True):
            phi_a = phi_a_coefficients(theta_coeffs, a)
            top = len(phi_a) - 1
            lead = phi_a[top]
            deg_d = q**top
            fa = CInftyValue.zero(q)
            for k, c in enumerate(phi_a):
                fa = fa + c * u ** (deg_d - q**k)
            prod = prod * (fa / lead) ** e
    # tail: max over deg a = D+1 of (B|u|)^(d(q-1)/q)
    tprof = tmod.profile
    B = pi.deg + tprof.exp_abs(max(tmod.point.entry_degrees()) - 1)
    x = B + u.deg
    if x >= 0:
        raise PrecisionExhausted("torsion bound times |u| is not below 1")
    d_next = q ** ((r - 1) * (D + 1))
    rel = Fraction(d_next * (q - 1), q) * x
    lead_tilde = tmod.delta * pi ** (1 - q ** (r - 1))
    rhs = -(lead_tilde ** q) * u ** (q - 1) * prod
    rhs = rhs.with_error(rhs.deg + rel)
    lhs = pi ** (1 - q**r) * forms.mod.delta
    return lhs, rhs


# -- functional equations -----------------------------------------------------

def lower_matrix(q: int, r: int, a: Poly | None = None) -> GLrMatrix:
    """Identity with a in the (r, 1) slot, so that a_r1 != 0 and j(gamma, z) = a z_1 + 1."""
    a = Poly(q, (0, 1)) if a is None else a
    rows = [[Poly(q, (1,) if i == k else ()) for k in range(r)] for i in range(r)]
    rows[r - 1][0] = a
    return GLrMatrix.from_lists(q, rows)


def test_matrices(q: int, r: int):
    """Named matrices: Id, every gamma_j, a shear iota(theta, ..., theta) and a lower matrix."""
    from .lattice import gamma_j_matrix, shear_matrix

    th = Poly(q, (0, 1))
    out = [("id", GLrMatrix.identity(q, r))]
    out += [(f"gamma_{j}", gamma_j_matrix(q, r, j)) for j in range(2, r)]
    out.append(("shear", shear_matrix(q, r, [th] * (r - 1))))
    out.append(("lower", lower_matrix(q, r)))
    return out


def weight_matrices(q: int, r: int):
    """Three matrices for weak-modularity checks."""
    from .lattice import shear_matrix

    th = Poly(q, (0, 1))
    s = shear_matrix(q, r, [th] * (r - 1))
    low = lower_matrix(q, r)
    return [("shear", s), ("lower", low), ("lower*shear", low @ s)]


def _cof_value(gamma: GLrMatrix, i: int, j: int) -> CInftyValue:
    return CInftyValue.from_poly(gamma.cofactor(i, j))


def tfe_sides(forms: PointForms, gamma: GLrMatrix, route: str = "det"):
    """E_r(gamma z) and det(gamma)^(-1) j (E_r(z)(c_11 - z_1 c_1r) + sum_j E^[j](z)(c_1j - z_j c_1r) + pi~^(-1) c_1r)."""
    r = forms.r
    moved, j = forms.at(gamma)
    lhs = false_eisenstein(moved, "det")
    c1r = _cof_value(gamma, 0, r - 1)
    acc = forms.pi.inverse() * c1r
    for k in range(r - 1):
        Ek = false_eisenstein(forms, route if k == 0 else "det", j=k + 1)
        acc = acc + Ek * (_cof_value(gamma, 0, k) - forms.z.entries[k] * c1r)
    rhs = det_value(gamma).inverse() * j * acc
    return lhs, rhs


def tfe3_sides(forms: PointForms, gamma: GLrMatrix):
    """Both sides of the t-deformed functional equation times (t - theta) s_r(z; t).

    Left: (t - theta) s_r E_r(gamma z, t).  Right: det^(-1) j ( sum_k E^[k] ((t - theta)(s_r cbar_1k - s_k cbar_1r)) - cbar_1r / pi~ ),
    with cbar the cofactors of gamma(t).
    """
    q, r, N = forms.q, forms.r, forms.N
    moved, j = forms.at(gamma)
    col = forms.F.column(0)
    th = theta(q)
    sr_lin = col[r - 1].times_t_minus(th)
    lhs = bold_E(moved) * sr_lin
    cbar = [TateSeries.from_poly_t(Poly(q, gamma.cofactor(0, k).coeffs, "t"), N) for k in range(r)]
    acc = cbar[r - 1].scale(-forms.pi.inverse())
    for k in range(r - 1):
        Ek = bold_E_j(forms, k + 1)
        inner = (col[r - 1] * cbar[k] - col[k] * cbar[r - 1]).times_t_minus(th)
        acc = acc + Ek * inner
    rhs = acc.scale(det_value(gamma).inverse() * j)
    return lhs, rhs


def gekeler_sides(forms: PointForms, gamma: GLrMatrix, route: str = "det"):
    """r = 2: E_2(gamma z) and det^(-1)(cz + d)(E_2(z)(cz + d) - c pi~^(-1))."""
    if forms.r != 2:
        raise ValueError("the GL_2 specialization needs r = 2")
    moved, j = forms.at(gamma)
    lhs = false_eisenstein(moved, "det")
    c = CInftyValue.from_poly(gamma.rows[1][0])
    E = false_eisenstein(forms, route)
    rhs = det_value(gamma).inverse() * j * (E * j - c * forms.pi.inverse())
    return lhs, rhs


def shear_sides(forms: PointForms, j: int, route: str = "det"):
    """E_r(gamma_j z) and E_r(z) + E^[j](z)."""
    from .lattice import gamma_j_matrix

    moved, _ = forms.at(gamma_j_matrix(forms.q, forms.r, j))
    lhs = false_eisenstein(moved, "det")
    rhs = false_eisenstein(forms, route) + false_eisenstein(forms, "det", j=j)
    return lhs, rhs


def fe4_sides(forms: PointForms, gamma: GLrMatrix, step: int | None = None):
    """pi~^(-1) dlog_{z_1} of z -> Delta_r(gamma z), and E_r(z) - j^(-1) pi~^(-1) a_r1."""
    z = forms.z
    lhs = log_derivative_delta(z, forms.D, 0, step, gamma=gamma)
    j = gl_action(gamma, z)[1]
    a = CInftyValue.from_poly(gamma.rows[-1][0])
    rhs = false_eisenstein(forms, "det") - j.inverse() * forms.pi.inverse() * a
    return lhs, rhs


def weak_modularity_sides(forms: PointForms, gamma: GLrMatrix, what: str):
    """(f(gamma z), factor * f(z)) for f in {'delta', 'h', 'eis'}; 'eis' is Eis_(q-1)."""
    q, r = forms.q, forms.r
    moved, j = forms.at(gamma)
    if what == "delta":
        return moved.mod.delta, j ** (q**r - 1) * forms.mod.delta
    if what == "h":
        return moved.h, j ** carlitz_weight(q, r) * det_value(gamma).inverse() * forms.h
    if what == "eis":
        k = q - 1
        return eis_scalar(moved.z, k, forms.D), j**k * eis_scalar(forms.z, k, forms.D)
    raise ValueError(f"unknown form {what!r}")


def j_invariant_sides(forms: PointForms, gamma: GLrMatrix):
    moved, _ = forms.at(gamma)
    return j_invariants(moved.mod), j_invariants(forms.mod)


def normalized_j_sides(forms: PointForms):
    """g~_l^((q^r-1)/(q^d-1)) against ((-1)^(r-1))^(-(q^l-1)/(q^d-1)) J_l."""
    q, r = forms.q, forms.r
    nm = w_normalize(forms.mod)
    J = j_invariants(forms.mod)
    sign = _minus_one(q) ** (r - 1)
    lhs, rhs = [], []
    for l in range(1, r):
        d = gcd(l, r)
        lhs.append(nm.g[l - 1] ** ((q**r - 1) // (q**d - 1)))
        e = (q**l - 1) // (q**d - 1)
        rhs.append(sign.inverse() ** e * J[l - 1] if e else J[l - 1])
    return lhs, rhs, nm.delta
