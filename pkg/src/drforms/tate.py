"""Truncated power series in t with C_infinity coefficients and a tail envelope.

A ``TateSeries`` stores c_0, ..., c_{N-1} and an envelope (b, s) meaning
|c_i| <= q^(b - s*i) for every i >= N.  The slope s is the log_q of a radius
on which the series is certified to converge.  A tail of None means every
c_i with i >= N is exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cinfty import CInftyValue, PrecisionExhausted
from .fields import Poly


class OutOfDomain(ValueError):
    """Evaluation point outside the certified disk of convergence."""


def _max(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


@dataclass(frozen=True)
class TateSeries:
    q: int
    coeffs: tuple
    tail_b: Fraction | None = None
    slope: Fraction | None = None

    # -- construction -----------------------------------------------------

    @staticmethod
    def constant(c: CInftyValue, N: int) -> "TateSeries":
        zero = CInftyValue.zero(c.q)
        return TateSeries(c.q, (c,) + (zero,) * (N - 1))

    @staticmethod
    def zero(q: int, N: int) -> "TateSeries":
        return TateSeries(q, (CInftyValue.zero(q),) * N)

    @staticmethod
    def from_poly_t(a: Poly, N: int) -> "TateSeries":
        """a(t) as a series; coefficients beyond N (if any) go to the tail."""
        vals = [CInftyValue.constant(a.q, c) for c in a.coeffs]
        return TateSeries.from_values(a.q, vals, N)

    @staticmethod
    def from_values(q: int, vals, N: int) -> "TateSeries":
        vals = list(vals)
        zero = CInftyValue.zero(q)
        head = vals[:N] + [zero] * max(0, N - len(vals))
        series = TateSeries(q, tuple(head))
        if len(vals) > N:
            # finitely many extra coefficients: an envelope with slope 0
            b = max(v.size_deg() for v in vals[N:] if v.size_deg() is not None)
            series = TateSeries(q, tuple(head), Fraction(b), Fraction(0))
        return series

    @staticmethod
    def linear_t_minus(c: CInftyValue, N: int) -> "TateSeries":
        """t - c."""
        one = CInftyValue.constant(c.q, 1)
        return TateSeries.from_values(c.q, [-c, one], N)

    # -- basic data -------------------------------------------------------

    @property
    def N(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> CInftyValue:
        return self.coeffs[i]

    def envelope(self, s: Fraction) -> Fraction | None:
        """Smallest B with |c_i| <= q^(B - s*i) for all i (window and tail)."""
        if self.tail_b is not None and s > self.slope:
            raise ValueError("envelope slope exceeds the certified slope")
        best = None
        for i, c in enumerate(self.coeffs):
            d = c.size_deg()
            if d is not None:
                best = _max(best, d + s * i)
        if self.tail_b is not None:
            best = _max(best, self.tail_b - (self.slope - s) * self.N)
        return best

    def gauss_norm_bound(self) -> Fraction | None:
        """Upper bound for log_q of the Gauss norm (requires slope >= 0)."""
        if self.tail_b is not None and self.slope < 0:
            raise ValueError("series not certified in the Tate algebra")
        return self.envelope(Fraction(0))

    def radius_deg(self):
        """log_q of the certified radius; None for polynomials."""
        return self.slope if self.tail_b is not None else None

    def with_tail(self, b, s) -> "TateSeries":
        return TateSeries(self.q, self.coeffs, None if b is None else Fraction(b), None if s is None else Fraction(s))

    def truncate(self, N: int) -> "TateSeries":
        if N >= self.N:
            return self
        s = self.slope if self.tail_b is not None else Fraction(0)
        b = self.tail_b
        for i in range(N, self.N):
            d = self.coeffs[i].size_deg()
            if d is not None:
                b = _max(b, d + s * i)
        if b is None:
            return TateSeries(self.q, self.coeffs[:N])
        return TateSeries(self.q, self.coeffs[:N], b, s)

    # -- arithmetic -------------------------------------------------------

    def _common_tail(self, other: "TateSeries"):
        slopes = [x.slope for x in (self, other) if x.tail_b is not None]
        if not slopes:
            return None, None
        s = min(slopes)
        b = None
        for x in (self, other):
            if x.tail_b is not None:
                b = _max(b, x.tail_b - (x.slope - s) * x.N)
        return b, s

    def __add__(self, other: "TateSeries") -> "TateSeries":
        N = min(self.N, other.N)
        a, c = self.truncate(N), other.truncate(N)
        b, s = a._common_tail(c)
        return TateSeries(self.q, tuple(x + y for x, y in zip(a.coeffs, c.coeffs)), b, s)

    def __neg__(self) -> "TateSeries":
        return TateSeries(self.q, tuple(-c for c in self.coeffs), self.tail_b, self.slope)

    def __sub__(self, other: "TateSeries") -> "TateSeries":
        return self + (-other)

    def scale(self, c: CInftyValue) -> "TateSeries":
        coeffs = tuple(c * x for x in self.coeffs)
        if self.tail_b is None:
            return TateSeries(self.q, coeffs)
        d = c.size_deg()
        if d is None:
            return TateSeries(self.q, coeffs)
        return TateSeries(self.q, coeffs, self.tail_b + d, self.slope)

    def __mul__(self, other):
        if isinstance(other, CInftyValue):
            return self.scale(other)
        N = min(self.N, other.N)
        zero = CInftyValue.zero(self.q)
        out = []
        for i in range(N):
            acc = zero
            for j in range(i + 1):
                x, y = self.coeffs[j], other.coeffs[i - j]
                if x.is_exact_zero() or y.is_exact_zero():
                    continue
                acc = acc + x * y
            out.append(acc)
        slopes = [x.slope for x in (self, other) if x.tail_b is not None]
        s = min(slopes) if slopes else Fraction(0)
        needs_tail = bool(slopes) or self._last_nonzero() + other._last_nonzero() >= N
        if not needs_tail:
            return TateSeries(self.q, tuple(out))
        bf, bg = self.envelope(s), other.envelope(s)
        if bf is None or bg is None:
            return TateSeries(self.q, tuple(out))
        return TateSeries(self.q, tuple(out), bf + bg, s)

    __rmul__ = __mul__

    def _last_nonzero(self) -> int:
        for i in range(self.N - 1, -1, -1):
            if not self.coeffs[i].is_exact_zero():
                return i
        return -1

    def inverse(self) -> "TateSeries":
        """1/g as a power series; needs c_0 invertible at current precision."""
        c0 = self.coeffs[0]
        if c0.is_zero_to_precision():
            raise PrecisionExhausted("constant term of the series is 0 to the tracked precision")
        inv0 = c0.inverse()
        w = [inv0]
        zero = CInftyValue.zero(self.q)
        for i in range(1, self.N):
            acc = zero
            for j in range(1, i + 1):
                acc = acc + self.coeffs[j] * w[i - j]
            w.append(-(acc * inv0))
        d0 = c0.deg
        # envelope slope s' with |v_i| <= q^(-s' i), v = g/c_0 - 1
        candidates = []
        if self.tail_b is not None:
            candidates += [self.slope, self.slope - (self.tail_b - d0) / self.N]
        for i in range(1, self.N):
            d = self.coeffs[i].size_deg()
            if d is not None:
                candidates.append((d0 - d) / i)
        if not candidates:
            # g is a constant, so 1/g is exact with zero tail
            return TateSeries(self.q, tuple(w))
        s = min(candidates)
        return TateSeries(self.q, tuple(w), -d0, s)

    def twist(self, k: int) -> "TateSeries":
        coeffs = tuple(c.frobenius(k) for c in self.coeffs)
        if self.tail_b is None:
            return TateSeries(self.q, coeffs)
        f = Fraction(self.q) ** k
        return TateSeries(self.q, coeffs, self.tail_b * f, self.slope * f)

    def mul_poly_t(self, a: Poly) -> "TateSeries":
        return self * TateSeries.from_poly_t(a, self.N)

    def times_t_minus(self, c: CInftyValue) -> "TateSeries":
        return self * TateSeries.linear_t_minus(c, self.N)

    # -- evaluation -------------------------------------------------------

    def eval_at(self, t0: CInftyValue) -> CInftyValue:
        if t0.is_exact_zero():
            return self.coeffs[0]
        d = t0.size_deg()
        if self.tail_b is not None and d >= self.slope:
            raise OutOfDomain(f"|t| = q^{d} is outside the certified disk |t| < q^{self.slope}")
        acc = CInftyValue.zero(self.q)
        power = CInftyValue.constant(self.q, 1)
        for c in self.coeffs:
            if not c.is_exact_zero():
                acc = acc + c * power
            power = power * t0
        if self.tail_b is not None:
            acc = acc.with_error(self.tail_b - (self.slope - d) * self.N)
        return acc

    # -- comparison / serialization ---------------------------------------

    def is_zero_to_precision(self) -> bool:
        return all(c.is_zero_to_precision() for c in self.coeffs)

    def is_exact_zero_series(self) -> bool:
        return self.tail_b is None and all(c.is_exact_zero() for c in self.coeffs)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "coeffs": [c.to_json() for c in self.coeffs],
            "tail_bound": None if self.tail_b is None else str(self.tail_b),
            "radius": None if self.slope is None else str(self.slope),
        }

    @staticmethod
    def from_json(d: dict) -> "TateSeries":
        coeffs = tuple(CInftyValue.from_json(c) for c in d["coeffs"])
        q = coeffs[0].q
        b = None if d["tail_bound"] is None else Fraction(d["tail_bound"])
        s = None if d["radius"] is None else Fraction(d["radius"])
        return TateSeries(q, coeffs, b, s)


def geometric_kernel(q: int, j: int, N: int) -> TateSeries:
    """1/(theta^(q^j) - t) = sum_n t^n theta^(-q^j (n+1))."""
    if j < 0:
        raise ValueError("geometric_kernel needs j >= 0")
    Q = q**j
    coeffs = tuple(CInftyValue.monomial(q, -Q * (n + 1)) for n in range(N))
    return TateSeries(q, coeffs, Fraction(-Q), Fraction(Q))


# -- matrices of series ---------------------------------------------------

def mat_mul(A, B):
    rows, inner, cols = len(A), len(B), len(B[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = A[i][0] * B[0][j]
            for k in range(1, inner):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def transpose(A):
    return [list(r) for r in zip(*A)]


def minor(A, i: int, j: int):
    return [row[:j] + row[j + 1:] for k, row in enumerate(A) if k != i]


def det(A):
    """Laplace expansion along the first row."""
    n = len(A)
    if n == 1:
        return A[0][0]
    total = None
    for j in range(n):
        term = A[0][j] * det(minor(A, 0, j))
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def cofactor(A, i: int, j: int):
    """(i, j)-cofactor, 0-based indices."""
    n = len(A)
    if n == 1:
        x = A[0][0]
        if isinstance(x, TateSeries):
            return TateSeries.constant(CInftyValue.constant(x.q, 1), x.N)
        return CInftyValue.constant(x.q, 1)
    c = det(minor(A, i, j))
    return -c if (i + j) % 2 else c


def adjugate(A):
    n = len(A)
    cof = [[cofactor(A, i, j) for j in range(n)] for i in range(n)]
    return transpose(cof)


def inverse(A):
    """Inverse through adjugate / determinant; raises on singular-to-precision input."""
    d = det(A)
    dinv = d.inverse()
    adj = adjugate(A)
    return [[x * dinv for x in row] for row in adj]


def twist_matrix(A, k: int):
    return [[x.twist(k) for x in row] for row in A]
