"""Truncated ramified Laurent series in theta^(1/e) over F_{q^m}.

A value is sum_{k <= top} c_k theta^(k/e).  Row i of ``coeffs`` holds the
coordinates of c_{top-i} over F_p.  When ``err`` is not None, every exponent
k <= err is unknown: the true element differs from the stored window by
something of absolute value at most q^(err/e).  Exact values have err None.

Absolute values are reported through ``deg`` = log_q |x| as a Fraction, so
deg(theta) = 1.
"""

from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, gcd

import numpy as np

from .fields import (
    embedding_matrix,
    factor_prime_power,
    minus_one_root,
    prime_power_field,
)


class PrecisionExhausted(ArithmeticError):
    """Raised when a value is indistinguishable from 0 at the tracked precision."""


_WORKING = contextvars.ContextVar("drforms_working_precision", default=Fraction(80))


def get_working_precision() -> Fraction:
    """Relative precision (in theta-units) kept by every arithmetic operation."""
    return _WORKING.get()


@contextmanager
def working_precision(digits):
    token = _WORKING.set(Fraction(digits))
    try:
        yield
    finally:
        _WORKING.reset(token)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def _field(q: int, m: int):
    p, s = factor_prime_power(q)
    return prime_power_field(p, s * m)


def _strip(c: np.ndarray, top: int, err):
    """Drop leading zero rows (and trailing ones when exact)."""
    nz = np.flatnonzero(c.any(axis=1))
    if nz.size == 0:
        if err is None:
            return c[:0], 0
        return c[:0], err
    first = int(nz[0])
    if err is None:
        c = c[first: int(nz[-1]) + 1]
    else:
        c = c[first:]
    return c, top - first


def _conv(a: np.ndarray, b: np.ndarray, K, length: int | None = None) -> np.ndarray:
    """Product of two coefficient windows (rows = descending exponents)."""
    la, lb = a.shape[0], b.shape[0]
    n = K.n
    if la == 0 or lb == 0:
        return np.zeros((0, n), dtype=np.int64)
    if length is not None:
        a, b = a[:length], b[:length]
        la, lb = a.shape[0], b.shape[0]
    if n == 1:
        out = np.convolve(a[:, 0], b[:, 0]) % K.p
        out = out[:, None]
    else:
        stride = 2 * n - 1
        fa = np.zeros((la, stride), dtype=np.int64)
        fa[:, :n] = a
        fb = np.zeros((lb, stride), dtype=np.int64)
        fb[:, :n] = b
        raw = np.convolve(fa.ravel(), fb.ravel())
        rows = la + lb - 1
        full = np.zeros(rows * stride, dtype=np.int64)
        full[: raw.size] = raw[: rows * stride]
        out = (full.reshape(rows, stride) % K.p) @ K.reduction % K.p
    if length is not None:
        out = out[:length]
    return out


@dataclass(frozen=True, eq=False)
class CInftyValue:
    q: int
    e: int
    m: int
    top: int
    coeffs: np.ndarray
    err: int | None

    # -- construction -----------------------------------------------------

    @staticmethod
    def build(q, e, m, top, coeffs, err, cap=True) -> "CInftyValue":
        coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, _field(q, m).n)
        if err is not None and coeffs.shape[0] > top - err:
            coeffs = coeffs[: max(top - err, 0)]
        coeffs, top = _strip(coeffs, top, err)
        v = CInftyValue(q, e, m, top, coeffs, err)
        return v._capped() if cap else v

    @staticmethod
    def zero(q: int, e: int = 1, m: int = 1) -> "CInftyValue":
        return CInftyValue(q, e, m, 0, np.zeros((0, _field(q, m).n), dtype=np.int64), None)

    @staticmethod
    def unknown(q: int, err_deg, e: int = 1, m: int = 1) -> "CInftyValue":
        """A value only known to satisfy |x| <= q^err_deg."""
        err_deg = Fraction(err_deg)
        e = _lcm(e, err_deg.denominator)
        k = int(err_deg * e)
        return CInftyValue(q, e, m, k, np.zeros((0, _field(q, m).n), dtype=np.int64), k)

    @staticmethod
    def monomial(q: int, exponent, code: int = 1, m: int = 1) -> "CInftyValue":
        """code * theta^exponent with exponent a rational number."""
        exponent = Fraction(exponent)
        e = exponent.denominator
        K = _field(q, m)
        if code == 0:
            return CInftyValue.zero(q, e, m)
        row = K.coords(code)[None, :]
        return CInftyValue(q, e, m, int(exponent * e), row, None)

    @staticmethod
    def constant(q: int, code: int, m: int = 1) -> "CInftyValue":
        return CInftyValue.monomial(q, 0, code, m)

    @staticmethod
    def from_int(q: int, c: int) -> "CInftyValue":
        p, _ = factor_prime_power(q)
        return CInftyValue.constant(q, c % p)

    @staticmethod
    def from_poly(a) -> "CInftyValue":
        """Element of A (or a polynomial in t read at t = theta)."""
        q = a.q
        if a.is_zero():
            return CInftyValue.zero(q)
        K = _field(q, 1)
        rows = np.array([K.coords(c) for c in reversed(a.coeffs)], dtype=np.int64)
        return CInftyValue.build(q, 1, 1, a.degree, rows, None, cap=False)

    # -- basic data -------------------------------------------------------

    @property
    def field(self):
        return _field(self.q, self.m)

    @property
    def exact(self) -> bool:
        return self.err is None

    @property
    def lead(self) -> int | None:
        """Exponent (units 1/e) of the leading known nonzero term."""
        return self.top if self.coeffs.shape[0] else None

    @property
    def deg(self) -> Fraction:
        """log_q |x|; raises when x is 0 to the tracked precision."""
        if self.lead is None:
            raise PrecisionExhausted("value is 0 to the tracked precision")
        return Fraction(self.lead, self.e)

    @property
    def err_deg(self) -> Fraction | None:
        return None if self.err is None else Fraction(self.err, self.e)

    def size_deg(self) -> Fraction | None:
        """Upper bound for log_q |x|, or None for an exact zero."""
        if self.lead is not None:
            return Fraction(self.lead, self.e)
        return self.err_deg

    def is_zero_to_precision(self) -> bool:
        return self.coeffs.shape[0] == 0

    def is_exact_zero(self) -> bool:
        return self.coeffs.shape[0] == 0 and self.err is None

    def leading_code(self) -> int:
        if self.lead is None:
            raise PrecisionExhausted("value is 0 to the tracked precision")
        return int(self.field.encode_rows(self.coeffs[:1])[0])

    def terms(self):
        """Nonzero terms as (exponent numerator, code) pairs, highest first."""
        codes = self.field.encode_rows(self.coeffs) if self.coeffs.shape[0] else []
        return [(self.top - i, int(c)) for i, c in enumerate(codes) if c]

    def coefficient(self, exponent) -> int:
        """Code of the coefficient of theta^exponent (must be above err)."""
        k = Fraction(exponent) * self.e
        if k.denominator != 1:
            return 0
        k = int(k)
        if self.err is not None and k <= self.err:
            raise PrecisionExhausted(f"coefficient of theta^{exponent} is not certified")
        i = self.top - k
        if i < 0 or i >= self.coeffs.shape[0]:
            return 0
        return int(self.field.encode_rows(self.coeffs[i: i + 1])[0])

    def __repr__(self):
        shown = self.terms()[:4]
        body = " + ".join(f"{c}*θ^({Fraction(k, self.e)})" for k, c in shown) or "0"
        if len(self.terms()) > 4:
            body += " + ..."
        if self.err is not None:
            body += f" + O(θ^({Fraction(self.err, self.e)}))"
        return f"CInfty[{body}]"

    # -- representation changes -------------------------------------------

    def lift(self, e: int, m: int) -> "CInftyValue":
        """Same element written with ramification e and field degree m."""
        if e == self.e and m == self.m:
            return self
        if e % self.e or m % self.m:
            raise ValueError("can only refine the representation")
        c = self.coeffs
        if m != self.m:
            p, s = factor_prime_power(self.q)
            c = c @ embedding_matrix(p, s * self.m, s * m) % p
        f = e // self.e
        if f != 1 and c.shape[0]:
            out = np.zeros(((c.shape[0] - 1) * f + 1, c.shape[1]), dtype=np.int64)
            out[::f] = c
            c = out
        elif f != 1:
            c = np.zeros((0, c.shape[1]), dtype=np.int64)
        err = None if self.err is None else self.err * f
        return CInftyValue(self.q, e, m, self.top * f, c, err)

    def _capped(self) -> "CInftyValue":
        if self.lead is None:
            return self
        steps = ceil(get_working_precision() * self.e)
        cut = self.lead - steps
        if self.err is not None and self.err >= cut:
            return self
        if self.err is None and self.top - self.coeffs.shape[0] + 1 > cut:
            return self
        keep = self.top - cut
        c = self.coeffs[:keep]
        c, top = _strip(c, self.top, cut)
        return CInftyValue(self.q, self.e, self.m, top, c, cut)

    def with_error(self, err_deg) -> "CInftyValue":
        """Widen the error to at least q^err_deg (err_deg None leaves it)."""
        if err_deg is None:
            return self
        err_deg = Fraction(err_deg)
        v = self
        if (err_deg * v.e).denominator != 1:
            v = v.lift(_lcm(v.e, err_deg.denominator), v.m)
        k = int(err_deg * v.e)
        if v.err is not None and v.err >= k:
            return v
        return CInftyValue.build(v.q, v.e, v.m, max(v.top, k), _pad_to(v, max(v.top, k)), k, cap=False)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "CInftyValue":
        if isinstance(other, CInftyValue):
            return other
        if isinstance(other, int):
            return CInftyValue.from_int(self.q, other)
        return NotImplemented

    def _unify(self, other: "CInftyValue"):
        if other.q != self.q:
            raise ValueError("values over different base fields")
        e, m = _lcm(self.e, other.e), _lcm(self.m, other.m)
        return self.lift(e, m), other.lift(e, m)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._unify(other)
        if a.is_exact_zero():
            return b._capped()
        if b.is_exact_zero():
            return a._capped()
        errs = [x for x in (a.err, b.err) if x is not None]
        err = max(errs) if errs else None
        top = max(a.top, b.top)
        low = err + 1 if err is not None else min(a.top - a.coeffs.shape[0] + 1, b.top - b.coeffs.shape[0] + 1)
        # exact summands with far-apart exponents: keep twice the working window, the rest becomes error
        cut = top - 2 * ceil(get_working_precision() * a.e) - 1
        if low <= cut:
            err, low = cut, cut + 1
        length = max(top - low + 1, 0)
        out = np.zeros((length, a.field.n), dtype=np.int64)
        for v in (a, b):
            rows = v.coeffs
            start = top - v.top
            usable = min(rows.shape[0], length - start)
            if usable > 0:
                out[start: start + usable] += rows[:usable]
        out %= a.field.p
        return CInftyValue.build(a.q, a.e, a.m, top, out, err)

    __radd__ = __add__

    def __neg__(self):
        return CInftyValue(self.q, self.e, self.m, self.top, (-self.coeffs) % self.field.p, self.err)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._unify(other)
        if a.is_exact_zero() or b.is_exact_zero():
            return CInftyValue.zero(a.q, a.e, a.m)
        sa, sb = a.size_deg(), b.size_deg()
        err = None
        for s, v in ((sa, b), (sb, a)):
            if v.err is not None:
                k = int(s * a.e) + v.err
                err = k if err is None else max(err, k)
        if a.err is not None and b.err is not None:
            err = max(err, a.err + b.err)
        top = a.top + b.top
        steps = ceil(get_working_precision() * a.e)
        # rows past the stored windows are known zeros down to each error
        full = a.coeffs.shape[0] + b.coeffs.shape[0] - 1
        needed = full if err is None else max(top - err, 0)
        length = min(needed, steps + 1)
        out = _conv(a.coeffs, b.coeffs, a.field, length)
        if length < min(needed, full):
            cut = top - length
            err = cut if err is None else max(err, cut)
        return CInftyValue.build(a.q, a.e, a.m, top, out, err)

    __rmul__ = __mul__

    def inverse(self) -> "CInftyValue":
        if self.lead is None:
            raise PrecisionExhausted("inverting a value that is 0 to the tracked precision")
        K = self.field
        steps = ceil(get_working_precision() * self.e)
        lead = self.lead
        if self.err is None and self.coeffs.shape[0] == 1:
            inv = np.array([K.coords(K.inv(self.leading_code()))], dtype=np.int64)
            return CInftyValue(self.q, self.e, self.m, -lead, inv, None)
        rel = steps if self.err is None else min(steps, lead - self.err)
        u = self.coeffs[:rel]
        c0 = K.inv(self.leading_code())
        z = np.array([K.coords(c0)], dtype=np.int64)
        prec = 1
        while prec < rel:
            prec = min(2 * prec, rel)
            uz = _conv(u[:prec], z, K, prec)
            corr = (-uz) % K.p
            corr[0] = (corr[0] + K.coords(1) * 2) % K.p
            z = _conv(z, corr, K, prec)
        return CInftyValue.build(self.q, self.e, self.m, -lead, z, -lead - rel)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return CInftyValue.constant(self.q, 1, self.m)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result._capped()

    def frobenius(self, k: int = 1) -> "CInftyValue":
        """x -> x^(q^k); k < 0 applies the inverse and refines e by q^|k|."""
        if k == 0:
            return self
        K = self.field
        _, s = factor_prime_power(self.q)
        mat = K.frobenius_matrix(s * k)
        c = self.coeffs @ mat % K.p if self.coeffs.shape[0] else self.coeffs
        if k < 0:
            return CInftyValue(self.q, self.e * self.q ** (-k), self.m, self.top, c, self.err)
        f = self.q**k
        steps = ceil(get_working_precision() * self.e)
        use = min(c.shape[0], steps // f + 1)
        if c.shape[0]:
            out = np.zeros(((use - 1) * f + 1, c.shape[1]), dtype=np.int64)
            out[::f] = c[:use]
        else:
            out = c
        err = None if self.err is None else self.err * f
        if use < c.shape[0]:
            cut = self.top * f - out.shape[0]
            err = cut if err is None else max(err, cut)
        return CInftyValue.build(self.q, self.e, self.m, self.top * f, out, err)

    # -- comparison helpers -----------------------------------------------

    def same_window(self, other: "CInftyValue") -> bool:
        return (self.q, self.e, self.m, self.top, self.err) == (other.q, other.e, other.m, other.top, other.err) \
            and np.array_equal(self.coeffs, other.coeffs)

    def agrees_with(self, other: "CInftyValue") -> bool:
        """True when the difference vanishes on every certified digit."""
        return (self - other).is_zero_to_precision()

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "e": self.e,
            "m": self.m,
            "terms": [[self.top - i, [int(x) for x in row]] for i, row in enumerate(self.coeffs) if row.any()],
            "err": self.err,
        }

    @staticmethod
    def from_json(d: dict) -> "CInftyValue":
        q, e, m, err = d["q"], d["e"], d["m"], d["err"]
        n = _field(q, m).n
        terms = d["terms"]
        if not terms:
            top = err if err is not None else 0
            return CInftyValue(q, e, m, top, np.zeros((0, n), dtype=np.int64), err)
        top = terms[0][0]
        low = err + 1 if err is not None else terms[-1][0]
        rows = np.zeros((top - low + 1, n), dtype=np.int64)
        for k, coords in terms:
            rows[top - k] = coords
        return CInftyValue(q, e, m, top, rows, err)


def _pad_to(v: CInftyValue, top: int) -> np.ndarray:
    if top == v.top:
        return v.coeffs
    pad = np.zeros((top - v.top, v.field.n), dtype=np.int64)
    return np.vstack([pad, v.coeffs])


class Accumulator:
    """Running sum of many values in one dense buffer.

    Terms are added exactly on their stored windows and the error is the
    largest term error, so the total is never less precise than chained ``+``.
    """

    def __init__(self, q: int, e: int = 1, m: int = 1):
        self.q, self.e, self.m = q, e, m
        self.top = None
        self.buf = None
        self.err = None

    def _relift(self, e: int, m: int):
        if self.buf is not None:
            v = CInftyValue(self.q, self.e, self.m, self.top, self.buf, self.err).lift(e, m)
            self.top, self.buf, self.err = v.top, v.coeffs.copy(), v.err
        elif self.err is not None:
            self.err *= e // self.e
        self.e, self.m = e, m

    def add(self, v: CInftyValue, code: int = 1):
        """Add code * v; code is an F_q element code (1 for plain addition)."""
        if v.e != self.e or v.m != self.m:
            e, m = _lcm(self.e, v.e), _lcm(self.m, v.m)
            if (e, m) != (self.e, self.m):
                self._relift(e, m)
            v = v.lift(e, m)
        K = v.field
        if code != 1:
            if K.n == 1:
                rows = v.coeffs * code % K.p
            else:
                v = CInftyValue.constant(self.q, code, self.m) * v
                rows = v.coeffs
        else:
            rows = v.coeffs
        if v.err is not None:
            self.err = v.err if self.err is None else max(self.err, v.err)
        if rows.shape[0] == 0:
            return
        low = v.top - rows.shape[0] + 1
        if self.err is not None and low <= self.err:
            rows = rows[: max(v.top - self.err, 0)]
            low = self.err + 1
            if rows.shape[0] == 0:
                return
        if self.buf is None:
            self.top, self.buf = v.top, rows.copy()
            return
        if v.top > self.top:
            pad = np.zeros((v.top - self.top, K.n), dtype=np.int64)
            self.buf = np.vstack([pad, self.buf])
            self.top = v.top
        have_low = self.top - self.buf.shape[0] + 1
        if low < have_low:
            pad = np.zeros((have_low - low, K.n), dtype=np.int64)
            self.buf = np.vstack([self.buf, pad])
        start = self.top - v.top
        self.buf[start: start + rows.shape[0]] += rows
        self.buf[start: start + rows.shape[0]] %= K.p

    def value(self) -> CInftyValue:
        if self.buf is None:
            if self.err is None:
                return CInftyValue.zero(self.q, self.e, self.m)
            return CInftyValue.build(self.q, self.e, self.m, self.err, np.zeros((0, _field(self.q, self.m).n)), self.err)
        buf = self.buf
        if self.err is not None:
            buf = buf[: max(self.top - self.err, 0)]
        return CInftyValue.build(self.q, self.e, self.m, self.top, buf, self.err)


# -- named constants ------------------------------------------------------

def theta(q: int) -> CInftyValue:
    return CInftyValue.monomial(q, 1)


def theta_power(q: int, exponent) -> CInftyValue:
    return CInftyValue.monomial(q, exponent)


def canonical_beta(q: int) -> CInftyValue:
    """beta = zeta * theta^(1/(q-1)) with zeta the canonical root of -1 of order 2(q-1)."""
    zeta = minus_one_root(q)
    return CInftyValue.monomial(q, Fraction(1, q - 1), zeta.code, zeta.m)


def sum_values(values, q: int) -> CInftyValue:
    total = CInftyValue.zero(q)
    for v in values:
        total = total + v
    return total


def nth_root(x: CInftyValue, n: int) -> CInftyValue:
    """A canonical y with y^n = x, for n prime to p.

    The leading coefficient root is the smallest power of the canonical
    generator of the first F_{q^m'} containing one; the unit part uses Newton.
    """
    p, s = factor_prime_power(x.q)
    if n % p == 0:
        raise ValueError("nth_root needs n prime to the characteristic")
    lead = x.lead
    if lead is None:
        raise PrecisionExhausted("root of a value that is 0 to the tracked precision")
    code = x.leading_code()
    m2 = x.m
    while True:
        big = _field(x.q, m2)
        c = _embed_code(x.q, x.m, m2, code)
        lg = int(big.log[c])
        g = gcd(n, big.order)
        if lg % g == 0:
            # solve n*k = lg (mod order), smallest k
            order = big.order
            k0 = None
            for k in range(order):
                if (n * k - lg) % order == 0:
                    k0 = k
                    break
            root_code = big.generator_power(k0)
            break
        m2 += x.m
    exponent = Fraction(lead, x.e) / n
    e2 = _lcm(x.e, exponent.denominator)
    y0 = CInftyValue.monomial(x.q, exponent, root_code, m2).lift(e2, _lcm(m2, x.m))
    mono = CInftyValue.monomial(x.q, Fraction(lead, x.e), code, x.m)
    unit = x / mono
    # Newton for u^(1/n): y <- y - (y^n - u)/(n y^(n-1))
    y = CInftyValue.constant(x.q, 1)
    n_inv = CInftyValue.from_int(x.q, pow(n, -1, p))
    steps = ceil(get_working_precision() * unit.e) + 2
    for _ in range(max(1, steps.bit_length() + 1)):
        y = y - (y**n - unit) * (y ** (n - 1)).inverse() * n_inv
    return y0 * y


def _embed_code(q, m1, m2, code):
    from .fields import embed_code
    p, s = factor_prime_power(q)
    return embed_code(p, s * m1, s * m2, code)


def difference_quotient(f, z, coord: int, step_valuation: int, sup_deg=None, radius_deg=None) -> CInftyValue:
    """(f(z + eps e_coord) - f(z)) / eps with eps = theta^(-step_valuation).

    The truncation error of the one-sided quotient is bounded by
    |eps| sup|f| / rho^2 for f analytic on the disk of radius rho around
    z_coord.  By default sup|f| is taken to be |f(z)| and rho is one ramification
    step below |z_coord|.
    """
    eps = CInftyValue.monomial(z.q, -step_valuation)
    base = f(z)
    moved = f(z.perturbed(coord, eps))
    quotient = (moved - base) / eps
    if base.is_exact_zero() and moved.is_exact_zero():
        return quotient
    if sup_deg is None:
        sup_deg = base.size_deg()
    if radius_deg is None:
        zc = z.entries[coord]
        radius_deg = zc.deg - Fraction(1, zc.e)
    bound = Fraction(sup_deg) - step_valuation - 2 * Fraction(radius_deg)
    if not (base.exact and moved.exact and _is_linear_hint(f)):
        quotient = quotient.with_error(bound)
    return quotient


def _is_linear_hint(f) -> bool:
    return getattr(f, "is_affine_linear", False)
