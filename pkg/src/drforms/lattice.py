"""Points of the period domain, lattice enumeration and the GL_r(A) action.

A point carries a norm certificate: a rule giving |a.z| (or an upper bound for
it) for a in A^r, together with lower bounds for |a.z| over all a whose
largest coordinate degree is a given d.  Lattice tail bounds are computed
from these rules only.

* ``Orthogonal``: the entries have pairwise distinct fractional parts of
  valuation, so |a.z| = max |a_i||z_i| for every a in K_inf^r.
* ``Derived``: the point is gamma.z0 for an orthogonal z0.  Then
  a.(gamma z0) = (a gamma).z0 / j(gamma, z0), which gives exact norms.
* ``Trusted``: a user point whose orthogonality was assumed, not checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import floor, ceil

from .cinfty import CInftyValue, PrecisionExhausted, theta_power
from .fields import Poly, enumerate_polys, factor_prime_power, prime_power_field


class UncertifiedPoint(ValueError):
    """The point has no norm certificate and was not marked trusted."""


# -- the group GL_r(A) ----------------------------------------------------

def _pconst(q, c, var="theta"):
    return Poly(q, (c,), var)


@dataclass(frozen=True)
class GLrMatrix:
    q: int
    rows: tuple  # tuple of tuples of Poly

    @staticmethod
    def from_lists(q: int, rows) -> "GLrMatrix":
        def conv(x):
            if isinstance(x, Poly):
                return x
            if isinstance(x, int):
                return Poly(q, (x % q,)) if q == factor_prime_power(q)[0] else Poly(q, (x,))
            return Poly(q, tuple(x))
        m = GLrMatrix(q, tuple(tuple(conv(x) for x in row) for row in rows))
        m.det_code()
        return m

    @staticmethod
    def identity(q: int, r: int) -> "GLrMatrix":
        return GLrMatrix.from_lists(q, [[1 if i == j else 0 for j in range(r)] for i in range(r)])

    @property
    def r(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> Poly:
        return self.rows[i][j]

    def _det_poly(self, rows) -> Poly:
        n = len(rows)
        if n == 1:
            return rows[0][0]
        total = Poly(self.q, ())
        for j in range(n):
            sub = [row[:j] + row[j + 1:] for row in rows[1:]]
            term = rows[0][j] * self._det_poly(sub)
            total = total - term if j % 2 else total + term
        return total

    def det_poly(self) -> Poly:
        return self._det_poly([list(r) for r in self.rows])

    def det_code(self) -> int:
        d = self.det_poly()
        if d.degree != 0:
            raise ValueError("matrix is not in GL_r(A): determinant is not a nonzero constant")
        return d.coeffs[0]

    def cofactor(self, i: int, j: int) -> Poly:
        """(i, j)-cofactor with 0-based indices."""
        rows = [list(r[:j] + r[j + 1:]) for k, r in enumerate(self.rows) if k != i]
        if not rows:
            return _pconst(self.q, 1)
        c = self._det_poly(rows)
        return -c if (i + j) % 2 else c

    def __matmul__(self, other: "GLrMatrix") -> "GLrMatrix":
        r = self.r
        out = []
        for i in range(r):
            row = []
            for j in range(r):
                acc = Poly(self.q, ())
                for k in range(r):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(tuple(row))
        return GLrMatrix(self.q, tuple(out))

    def inverse(self) -> "GLrMatrix":
        K = prime_power_field(*factor_prime_power(self.q))
        dinv = K.inv(self.det_code())
        r = self.r
        return GLrMatrix(self.q, tuple(tuple(self.cofactor(j, i).scale(dinv) for j in range(r)) for i in range(r)))

    def max_degree(self) -> int:
        return max(x.degree for row in self.rows for x in row)

    def at_t(self):
        """gamma(t): the same entries as polynomials in t."""
        return [[Poly(self.q, x.coeffs, "t") for x in row] for row in self.rows]

    def to_json(self):
        return [[list(x.coeffs) for x in row] for row in self.rows]


def gamma_j_matrix(q: int, r: int, j: int) -> GLrMatrix:
    """gamma_j with gamma_j^{-1} = Id + E_{j,1} (1-based j, 2 <= j <= r-1)."""
    if not 2 <= j <= r - 1:
        raise ValueError("gamma_j needs 2 <= j <= r-1")
    p, _ = factor_prime_power(q)
    rows = [[1 if a == b else 0 for b in range(r)] for a in range(r)]
    rows[j - 1][0] = p - 1  # -1
    return GLrMatrix.from_lists(q, rows)


def shear_matrix(q: int, r: int, coeffs) -> GLrMatrix:
    """iota(a_2, ..., a_r): first row (1, a_2, ..., a_r), identity elsewhere."""
    rows = [[Poly(q, (1,) if a == b else ()) for b in range(r)] for a in range(r)]
    for k, a in enumerate(coeffs):
        rows[0][k + 1] = a if isinstance(a, Poly) else Poly(q, tuple(a))
    return GLrMatrix.from_lists(q, rows)


# -- norm certificates ----------------------------------------------------

@dataclass(frozen=True)
class NormProfile:
    """Multiset of nonzero lattice norms: v_i are the entry valuations of an
    orthogonal basis, and every norm is shifted by ``shift``."""

    q: int
    valuations: tuple
    shift: Fraction = Fraction(0)

    def count_le(self, x) -> int:
        """#{lambda != 0 : log_q|lambda| <= x}."""
        x = Fraction(x) - self.shift
        total = 1
        for v in self.valuations:
            if x >= v:
                total *= self.q ** (floor(x - v) + 1)
        return total - 1

    def count_lt(self, x) -> int:
        x = Fraction(x) - self.shift
        total = 1
        for v in self.valuations:
            if x > v:
                total *= self.q ** (ceil(x - v) - 1 + 1)
        return total - 1

    def shells(self):
        """Yield (norm, multiplicity) in increasing norm order."""
        fracs = sorted({v - floor(v) for v in self.valuations})
        base = floor(min(self.valuations))
        k = base
        while True:
            for f in fracs:
                x = k + f + self.shift
                mult = self.count_le(x) - self.count_lt(x)
                if mult:
                    yield x, mult
            k += 1

    def smallest_sum(self, m: int) -> Fraction:
        """Sum of the logs of the m smallest nonzero norms."""
        total, left = Fraction(0), m
        for x, mult in self.shells():
            if left <= 0:
                break
            take = min(left, mult)
            total += take * x
            left -= take
        return total

    def min_norm(self) -> Fraction:
        return next(self.shells())[0]

    def alpha_bound(self, j: int) -> Fraction:
        """log_q upper bound for |alpha_j|: product of the q^j - 1 largest 1/|lambda|."""
        return -self.smallest_sum(self.q**j - 1)

    def exp_abs(self, x) -> Fraction:
        """log_q|exp(y)| for |y| = q^x when |y - lambda| = max(|y|, |lambda|) for all lambda."""
        x = Fraction(x)
        total = x
        for n, mult in self.shells():
            if n >= x:
                break
            total += mult * (x - n)
        return total

    def exp_term_bound(self, x, j: int) -> Fraction:
        """log_q bound for |alpha_j y^(q^j)| with |y| <= q^x."""
        return self.q**j * Fraction(x) + self.alpha_bound(j)

    def monotone_from(self, x) -> int:
        """Smallest j such that the term bounds decrease for all j' >= j."""
        need = self.count_lt(x)
        j = 0
        while self.q**j - 1 < need:
            j += 1
        return j


@dataclass(frozen=True)
class Orthogonal:
    valuations: tuple
    trusted_only: bool = False

    def norm(self, a) -> Fraction:
        return max(x.degree + v for x, v in zip(a, self.valuations) if not x.is_zero())

    def floor(self, d: int) -> Fraction:
        """Lower bound for |a.z| when max deg a_i >= d."""
        return d + min(self.valuations)

    def profile(self, q: int) -> NormProfile:
        return NormProfile(q, tuple(self.valuations))


@dataclass(frozen=True)
class Derived:
    base: Orthogonal
    gamma: GLrMatrix
    j_deg: Fraction

    def norm(self, a) -> Fraction:
        r = self.gamma.r
        b = []
        for k in range(r):
            acc = Poly(self.gamma.q, ())
            for i in range(r):
                acc = acc + a[i] * self.gamma.rows[i][k]
            b.append(acc)
        return self.base.norm(b) - self.j_deg

    def floor(self, d: int) -> Fraction:
        dinv = self.gamma.inverse().max_degree()
        return max(d - dinv, 0) + min(self.base.valuations) - self.j_deg

    def profile(self, q: int) -> NormProfile:
        return NormProfile(q, tuple(self.base.valuations), -self.j_deg)


# -- points ---------------------------------------------------------------

@dataclass(frozen=True)
class OmegaPoint:
    q: int
    entries: tuple
    certificate: object = None
    label: str = ""
    base: "OmegaPoint | None" = None
    gamma: GLrMatrix | None = None

    @property
    def r(self) -> int:
        return len(self.entries)

    @staticmethod
    def from_entries(q: int, entries, trusted: bool = False, label: str = "") -> "OmegaPoint":
        entries = tuple(entries)
        last = entries[-1]
        if not (last.exact and last.same_window(CInftyValue.constant(q, 1).lift(last.e, last.m))):
            raise ValueError("the last entry of a point of Omega^r must be exactly 1")
        vals = tuple(v.deg for v in entries)
        fracs = [v - floor(v) for v in vals]
        if len(set(fracs)) == len(fracs):
            return OmegaPoint(q, entries, Orthogonal(vals), label)
        if trusted:
            return OmegaPoint(q, entries, Orthogonal(vals, trusted_only=True), label)
        return OmegaPoint(q, entries, None, label)

    @property
    def certified(self) -> bool:
        return self.certificate is not None and not getattr(self.certificate, "trusted_only", False)

    def require_certificate(self):
        if self.certificate is None:
            raise UncertifiedPoint("point has no norm certificate; pass trusted=True to assume one")
        return self.certificate

    @cached_property
    def profile(self) -> NormProfile:
        return self.require_certificate().profile(self.q)

    def norm(self, a) -> Fraction:
        return self.require_certificate().norm(a)

    def floor(self, d: int) -> Fraction:
        return self.require_certificate().floor(d)

    def entry_degrees(self):
        return tuple(v.deg for v in self.entries)

    def dot(self, a) -> CInftyValue:
        """a_1 z_1 + ... + a_r z_r for a in A^r."""
        total = CInftyValue.zero(self.q)
        for x, z in zip(a, self.entries):
            if not x.is_zero():
                total = total + CInftyValue.from_poly(x) * z
        return total

    def dot_values(self, c) -> CInftyValue:
        """sum c_i z_i for c_i in C_infinity."""
        total = CInftyValue.zero(self.q)
        for x, z in zip(c, self.entries):
            total = total + x * z
        return total

    def perturbed(self, coord: int, eps: CInftyValue) -> "OmegaPoint":
        if self.gamma is not None:
            raise ValueError("perturb the base point, then apply gamma")
        if coord == self.r - 1:
            raise ValueError("the last coordinate is fixed to 1")
        entries = list(self.entries)
        entries[coord] = entries[coord] + eps
        trusted = self.certificate is not None and getattr(self.certificate, "trusted_only", False)
        p = OmegaPoint.from_entries(self.q, entries, trusted=trusted, label=f"{self.label}+eps")
        if self.certificate is not None and p.certificate is not None:
            if p.certificate.valuations != self.certificate.valuations:
                raise PrecisionExhausted("perturbation changed the norm profile; use a smaller step")
        return p

    def tilde(self) -> "OmegaPoint":
        """(z_2, ..., z_r), a point of rank r - 1."""
        trusted = self.certificate is not None and getattr(self.certificate, "trusted_only", False)
        return OmegaPoint.from_entries(self.q, self.entries[1:], trusted=trusted, label=f"{self.label}~")

    def describe(self) -> dict:
        return {
            "label": self.label,
            "entries": [e.to_json() for e in self.entries],
            "certified": self.certified,
            "gamma": None if self.gamma is None else self.gamma.to_json(),
        }


def canonical_cm_point(q: int, r: int) -> OmegaPoint:
    """(theta^((r-1)/r), ..., theta^(1/r), 1): theta^(1/r) zA lies in zA."""
    if r < 1:
        raise ValueError("r must be >= 1")
    entries = [theta_power(q, Fraction(r - i, r)) for i in range(1, r + 1)]
    return OmegaPoint.from_entries(q, entries, label=f"cm(q={q},r={r})")


def perturbed_cm_point(q: int, r: int) -> OmegaPoint:
    """The CM point with theta^(-1/r) added to z_1: a second certified point."""
    base = canonical_cm_point(q, r)
    entries = list(base.entries)
    if r >= 2:
        entries[0] = entries[0] + theta_power(q, Fraction(-1, r))
    return OmegaPoint.from_entries(q, entries, label=f"cm+(q={q},r={r})")


def structured_points(q: int, r: int):
    return [canonical_cm_point(q, r), perturbed_cm_point(q, r)]


def _products(z: OmegaPoint, polys):
    """table[i][n] = polys[n] * z_i, so a.z costs r - 1 additions."""
    vals = [CInftyValue.from_poly(x) if not x.is_zero() else None for x in polys]
    return [[None if v is None else v * w for v in vals] for w in z.entries]


def _sum_row(q, table, idx):
    total = None
    for row, n in zip(table, idx):
        v = row[n]
        if v is not None:
            total = v if total is None else total + v
    return CInftyValue.zero(q) if total is None else total


def lattice_vectors(z: OmegaPoint, D: int, exclude_zero: bool = True):
    """Yield (a, a.z) over a in A^r with max deg a_i <= D, in a fixed order."""
    polys = enumerate_polys(z.q, D)
    table = _products(z, polys)
    for idx in itertools.product(range(len(polys)), repeat=z.r):
        a = tuple(polys[n] for n in idx)
        if exclude_zero and all(x.is_zero() for x in a):
            continue
        yield a, _sum_row(z.q, table, idx)


def representative_values(z: OmegaPoint, D: int):
    """Yield (a, a.z) for a != 0 with first nonzero coordinate monic: one per F_q^x orbit."""
    polys = enumerate_polys(z.q, D)
    table = _products(z, polys)
    for idx in itertools.product(range(len(polys)), repeat=z.r):
        a = tuple(polys[n] for n in idx)
        lead = next((x for x in a if not x.is_zero()), None)
        if lead is None or not lead.is_monic():
            continue
        yield a, _sum_row(z.q, table, idx)


def gl_action(gamma: GLrMatrix, z: OmegaPoint):
    """(gamma . z, j(gamma, z))."""
    r = z.r
    if gamma.r != r:
        raise ValueError("matrix size does not match the point")
    col = []
    for i in range(r):
        acc = CInftyValue.zero(z.q)
        for k in range(r):
            x = gamma.rows[i][k]
            if not x.is_zero():
                acc = acc + CInftyValue.from_poly(x) * z.entries[k]
        col.append(acc)
    j = col[-1]
    if j.is_zero_to_precision():
        raise PrecisionExhausted("j(gamma, z) is 0 to the tracked precision")
    jinv = j.inverse()
    entries = tuple(c * jinv for c in col[:-1]) + (CInftyValue.constant(z.q, 1).lift(jinv.e, 1),)
    base = z.base if z.base is not None else z
    total = gamma @ z.gamma if z.gamma is not None else gamma
    cert = None
    if z.certificate is not None:
        base_cert = base.certificate
        prev = z.certificate.j_deg if isinstance(z.certificate, Derived) else Fraction(0)
        cert = Derived(base_cert, total, prev + j.deg)
    point = OmegaPoint(z.q, entries, cert, f"gamma.{z.label}", base, total)
    return point, j


def j_factor(gamma: GLrMatrix, z: OmegaPoint) -> CInftyValue:
    return gl_action(gamma, z)[1]


def parse_point(descriptor: str, q: int, r: int) -> OmegaPoint:
    """'canonical' | 'canonical:q=3,r=2' | 'perturbed' | JSON list of CInfty dicts."""
    import json
    d = descriptor.strip()
    if d.startswith("["):
        entries = [CInftyValue.from_json(x) for x in json.loads(d)]
        return OmegaPoint.from_entries(q, entries, label="user")
    name, _, params = d.partition(":")
    if params:
        for kv in params.split(","):
            k, _, v = kv.partition("=")
            if k.strip() == "q":
                q = int(v)
            elif k.strip() == "r":
                r = int(v)
    if name == "canonical":
        return canonical_cm_point(q, r)
    if name == "perturbed":
        return perturbed_cm_point(q, r)
    raise ValueError(f"unknown point descriptor {descriptor!r}")
