"""Drinfeld modules from lattices: exponential coefficients, g_i, Delta_r,
the Carlitz period, exponential evaluation and quasi-periodic functions.

The exponential of the full lattice is assembled as exp = e_W o e_D where
e_D is the exponential of the finite F_q-space Lambda_D = {a.z : deg a_i <= D}
and W = e_D(Lambda).  The coefficients of e_D are exact up to working
precision (built one basis vector at a time), and e_W only perturbs them by
amounts controlled by the smallest nonzero |w|, for which the lattice norm
certificate gives a lower bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .cinfty import (
    CInftyValue,
    PrecisionExhausted,
    canonical_beta,
    get_working_precision,
    theta,
    theta_power,
)
from .lattice import OmegaPoint, Orthogonal, representative_values


# -- the Carlitz module ---------------------------------------------------

def carlitz_pi(q: int) -> CInftyValue:
    """theta * beta * prod_{i>=1} (1 - theta^(1-q^i))^{-1}, truncated with certified error."""
    return _carlitz_pi(q, get_working_precision())


@lru_cache(maxsize=None)
def _carlitz_pi(q: int, W: Fraction) -> CInftyValue:
    value = theta(q) * canonical_beta(q)
    i = 1
    while q**i - 1 <= W + 1:
        factor = CInftyValue.constant(q, 1) - theta_power(q, 1 - q**i)
        value = value * factor.inverse()
        i += 1
    # every omitted factor is 1 + O(theta^(1 - q^i))
    return value.with_error(value.deg + 1 - q**i)


def carlitz_pi_direct(q: int) -> CInftyValue:
    """Second implementation of the product: expand the geometric series of
    each factor and multiply term by term, without inversion."""
    W = get_working_precision()
    value = theta(q) * canonical_beta(q)
    i = 1
    while q**i - 1 <= W + 1:
        step = q**i - 1
        series = CInftyValue.zero(q)
        k = 0
        while k * step <= W + 1:
            series = series + theta_power(q, -k * step)
            k += 1
        series = series.with_error(-k * step)
        value = value * series
        i += 1
    return value.with_error(value.deg + 1 - q**i)


def carlitz_alpha(q: int, j: int) -> CInftyValue:
    """Coefficient 1/D_j of exp_C, D_j = prod_{i<j} (theta^(q^j) - theta^(q^i))."""
    d = CInftyValue.constant(q, 1)
    for i in range(j):
        d = d * (theta_power(q, q**j) - theta_power(q, q**i))
    return d.inverse()


# -- the finite-lattice exponential ----------------------------------------

def _entry_degree_bounds(point: OmegaPoint):
    return [z.deg for z in point.entries]


def finite_lattice_exponential(point: OmegaPoint, D: int):
    """Coefficients of e_D(x) = x prod_{0 != mu in Lambda_D} (1 - x/mu).

    Built by e_{V + F_q v}(x) = e_V(x) - e_V(v)^(1-q) e_V(x)^q over the basis
    theta^k z_i in increasing norm.
    """
    q = point.q
    basis = []
    for i, z in enumerate(point.entries):
        for k in range(D + 1):
            basis.append(theta_power(q, k) * z)
    basis.sort(key=lambda v: v.deg)
    coeffs = [CInftyValue.constant(q, 1)]
    for v in basis:
        ev = CInftyValue.zero(q)
        for k, c in enumerate(coeffs):
            ev = ev + c * v.frobenius(k)
        if ev.is_zero_to_precision():
            raise PrecisionExhausted("finite lattice exponential vanished at a basis vector")
        c = ev.inverse() ** (q - 1)
        new = [coeffs[0]]
        for k in range(1, len(coeffs)):
            new.append(coeffs[k] - c * coeffs[k - 1].frobenius(1))
        new.append(-(c * coeffs[-1].frobenius(1)))
        coeffs = new
    return coeffs


def image_lattice_log_min(point: OmegaPoint, D: int) -> Fraction:
    """Lower bound for log_q min |w| over 0 != w in W = e_D(Lambda).

    For lambda outside Lambda_D, |lambda| >= F and |1 - lambda/mu| >= F/|mu|,
    so |e_D(lambda)| >= F prod_mu F/|mu|.  Norms |mu| are bounded above by
    max_i(deg a_i + deg z_i).
    """
    q = point.q
    F = point.floor(D + 1)
    vals = _entry_degree_bounds(point)
    choices = [None] + list(range(D + 1))
    total = F
    for degs in itertools.product(choices, repeat=point.r):
        if all(d is None for d in degs):
            continue
        mult = 1
        norm = None
        for d, v in zip(degs, vals):
            if d is None:
                continue
            mult *= (q - 1) * q**d
            x = d + v
            norm = x if norm is None else max(norm, x)
        total += mult * (F - norm)
    return total


# -- module data ----------------------------------------------------------

@dataclass
class DrinfeldModuleData:
    """phi^z_theta = theta + g_1 tau + ... + g_{r-1} tau^{r-1} + Delta tau^r."""

    point: OmegaPoint
    g: list
    delta: CInftyValue
    alphas: list
    D: int
    log_min_image: Fraction | None = None
    meta: dict = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.point.q

    @property
    def r(self) -> int:
        return self.point.r

    @property
    def profile(self):
        return self.point.profile

    def coefficients(self):
        """[g_1, ..., g_{r-1}, Delta]."""
        return list(self.g) + [self.delta]

    def alpha(self, j: int) -> CInftyValue:
        while len(self.alphas) <= j:
            k = len(self.alphas)
            gs = self.coefficients()
            acc = CInftyValue.zero(self.q)
            for i in range(1, min(k, self.r) + 1):
                acc = acc + gs[i - 1] * self.alphas[k - i].frobenius(i)
            denom = theta_power(self.q, self.q**k) - theta(self.q)
            self.alphas.append(acc / denom)
        return self.alphas[j]

    def recursion_residual(self, k: int) -> CInftyValue:
        """alpha_k theta^(q^k) - theta alpha_k - sum g_i alpha_{k-i}^(q^i)."""
        q = self.q
        gs = self.coefficients()
        a = self.alpha(k)
        res = a * theta_power(q, q**k) - theta(q) * a
        for i in range(1, min(k, self.r) + 1):
            res = res - gs[i - 1] * self.alpha(k - i).frobenius(i)
        return res

    # -- exponential ------------------------------------------------------

    def _terms_needed(self, x_deg: Fraction, shift: int = 0):
        """Pick J so that all terms j > J are below (largest term) - W.

        Term bounds are taken for |alpha_j y^(q^j)| with |y| <= q^x_deg; the
        sequence decreases once q^j - 1 reaches #{|lambda| < |y|}.
        Returns (J, bound for the largest omitted term).
        """
        prof = self.profile
        W = get_working_precision()
        start = prof.monotone_from(x_deg)
        best = None
        j = 0
        while True:
            tb = prof.exp_term_bound(x_deg, j)
            best = tb if best is None else max(best, tb)
            nxt = prof.exp_term_bound(x_deg, j + 1)
            if j + 1 >= start and nxt <= best - W - 1:
                return j, nxt
            j += 1
            if j > 40:
                raise PrecisionExhausted("exponential series did not reach the target precision")

    def eval_exp(self, x: CInftyValue) -> CInftyValue:
        if x.is_exact_zero():
            return x
        xd = x.size_deg()
        J, tail = self._terms_needed(xd)
        acc = CInftyValue.zero(self.q)
        for j in range(J + 1):
            acc = acc + self.alpha(j) * x.frobenius(j)
        return acc.with_error(tail)

    def exp_abs_deg(self, x_deg) -> Fraction:
        return self.profile.exp_abs(x_deg)

    def quasi_period_value(self, i: int, w: CInftyValue) -> CInftyValue:
        """F_{delta_i}(w) = sum_j alpha_j^(q^i) w^(q^(j+i)) / (theta^(q^(j+i)) - theta)."""
        q = self.q
        if i == 0:
            return w - self.eval_exp(w)
        if w.is_exact_zero():
            return w
        J, tail = self._terms_needed(w.size_deg() - 1)
        acc = CInftyValue.zero(q)
        for j in range(J + 1):
            term = (self.alpha(j) * w.frobenius(j)).frobenius(i)
            acc = acc + term / (theta_power(q, q ** (j + i)) - theta(q))
        return acc.with_error(tail * q**i)

    def period_matrix(self):
        rows = []
        for w in self.point.entries:
            rows.append([w] + [self.quasi_period_value(i, w) for i in range(1, self.r)])
        return rows

    def phi_theta_apply(self, y: CInftyValue) -> CInftyValue:
        q = self.q
        acc = theta(q) * y
        for i, g in enumerate(self.coefficients(), start=1):
            acc = acc + g * y.frobenius(i)
        return acc

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "r": self.r,
            "D": self.D,
            "g": [x.to_json() for x in self.g],
            "delta": self.delta.to_json(),
            "alpha": [a.to_json() for a in self.alphas],
        }


def coefficients_from_alphas(alphas, q: int, r: int):
    """Solve (theta^(q^j) - theta) alpha_j = g_j + sum_{k<j} g_k alpha_{j-k}^(q^k) for g_1..g_r."""
    gs = []
    for j in range(1, r + 1):
        val = (theta_power(q, q**j) - theta(q)) * alphas[j]
        for k in range(1, j):
            val = val - gs[k - 1] * alphas[j - k].frobenius(k)
        gs.append(val)
    return gs[:-1], gs[-1]


def exp_coefficients(z: OmegaPoint, J: int, D: int):
    """alpha_0..alpha_J of exp_{zA}; see module_from_point."""
    mod = module_from_point(z, D)
    return [mod.alpha(j) for j in range(J + 1)]


def _reduced_basis(z: OmegaPoint) -> OmegaPoint:
    """An orthogonal basis of zA.

    For z = gamma . z0 the lattice zA equals j(gamma, z0)^(-1) z0 A, and the
    scaled entries of z0 are orthogonal; boxes in the coordinates of z itself
    lose precision badly in the subspace recursion.
    """
    if z.gamma is None:
        return z
    base = z.base
    j = CInftyValue.zero(z.q)
    for x, w in zip(z.gamma.rows[-1], base.entries):
        if not x.is_zero():
            j = j + CInftyValue.from_poly(x) * w
    jinv = j.inverse()
    entries = tuple(jinv * w for w in base.entries)
    vals = tuple(w.deg for w in entries)
    return OmegaPoint(z.q, entries, Orthogonal(vals), f"basis({z.label})")


def module_from_point(z: OmegaPoint, D: int, J: int | None = None) -> DrinfeldModuleData:
    z.require_certificate()
    q, r = z.q, z.r
    basis = _reduced_basis(z)
    beta = finite_lattice_exponential(basis, D)
    log_min = image_lattice_log_min(basis, D)
    alphas = [beta[0]]
    for j in range(1, r + 1):
        bound = None
        for k in range(1, j + 1):
            size = beta[j - k].size_deg()
            if size is None:
                continue
            b = (1 - q**k) * log_min + q**k * size
            bound = b if bound is None else max(bound, b)
        alphas.append(beta[j].with_error(bound))
    g, delta = coefficients_from_alphas(alphas, q, r)
    if delta.is_zero_to_precision():
        raise PrecisionExhausted("Delta_r is 0 to the tracked precision")
    mod = DrinfeldModuleData(z, g, delta, alphas, D, log_min)
    for j in range(J if J is not None else r + 6):
        mod.alpha(j + 1)
    return mod


def carlitz_module_data(q: int) -> DrinfeldModuleData:
    """The Carlitz module C_theta = theta + tau with lattice pi~ A."""
    pi = carlitz_pi(q)
    point = OmegaPoint(q, (pi,), Orthogonal((pi.deg,)), "carlitz")
    alphas = [CInftyValue.constant(q, 1)]
    mod = DrinfeldModuleData(point, [], CInftyValue.constant(q, 1), alphas, D=-1)
    return mod


def power_sum_exp_coefficients(z: OmegaPoint, D: int, J: int):
    """Oracle route: alpha_k = sum_{j<k} alpha_j E_{q^k - q^j} from brute-force
    power sums E_n = sum' lambda^(-n) over deg a_i <= D.

    Each F_q^x orbit contributes -lambda^(-n) when (q-1) | n and 0 otherwise.
    The omitted part of E_n is at most q^(-n F), F = floor(D+1).
    """
    q = z.q
    top = q**J - 1
    F = z.floor(D + 1)
    ns = [n for n in range(1, top + 1) if n % (q - 1) == 0]
    sums = {n: CInftyValue.zero(q) for n in ns}
    for _, v in representative_values(z, D):
        inv = v.inverse()
        power = CInftyValue.constant(q, 1)
        for n in range(1, top + 1):
            power = power * inv
            if n in sums:
                sums[n] = sums[n] - power
    E = {n: sums[n].with_error(-n * F) for n in ns}
    alphas = [CInftyValue.constant(q, 1)]
    for k in range(1, J + 1):
        acc = CInftyValue.zero(q)
        for j in range(k):
            n = q**k - q**j
            if n in E:
                acc = acc + alphas[j] * E[n]
        alphas.append(acc)
    return alphas, E
