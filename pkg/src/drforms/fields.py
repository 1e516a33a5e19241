"""Finite fields F_{p^n}, the polynomial ring A = F_q[theta] and a -> a(t).

Every F_{p^n} is built on a Conway-style generator: the defining polynomial is
the lexicographically first primitive polynomial whose root is norm-compatible
with the generators of all subfields.  Embeddings between the fields are then
canonical, so roots of unity chosen in one field agree with those chosen in any
extension of it.

Elements are stored as integer codes whose base-p digits are the coordinates
in the power basis of the generator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np


@lru_cache(maxsize=None)
def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, s) with q = p**s, or raise ValueError."""
    if q < 2:
        raise ValueError(f"q must be a prime power >= 2, got {q}")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    s, rest = 0, q
    while rest % p == 0:
        rest //= p
        s += 1
    if rest != 1:
        raise ValueError(f"q must be a prime power >= 2, got {q}")
    return p, s


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# -- arithmetic in F_p[x]/(f) on coefficient lists, used only while searching
# -- for generators and filling tables

def _polmulmod(a, b, f, p):
    n = len(f) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * f[i]) % p
    prod = prod[:n] + [0] * max(0, n - len(prod))
    return prod


def _polpowmod(a, e, f, p):
    n = len(f) - 1
    result = [1] + [0] * (n - 1)
    base = a
    while e:
        if e & 1:
            result = _polmulmod(result, base, f, p)
        base = _polmulmod(base, base, f, p)
        e >>= 1
    return result


def _eval_in(poly, elem, f, p):
    """Evaluate poly (low->high coefficients in F_p) at elem of F_p[x]/(f)."""
    n = len(f) - 1
    acc = [0] * n
    for c in reversed(poly):
        acc = _polmulmod(acc, elem, f, p)
        acc[0] = (acc[0] + c) % p
    return acc


@lru_cache(maxsize=None)
def _conway_polynomial(p: int, n: int) -> tuple[int, ...]:
    """Defining polynomial (low->high, monic) of the canonical F_{p^n}."""
    order = p**n - 1
    if n == 1:
        # x - g for the smallest primitive root g
        for g in range(1, p):
            if p == 2 or all(pow(g, order // ell, p) != 1 for ell in _prime_factors(order)):
                return ((-g) % p, 1)
    subfields = [d for d in _divisors(n) if d < n]
    for tail in itertools.product(range(p), repeat=n):
        f = list(reversed(tail)) + [1]
        if f[0] == 0:
            continue
        x = [0, 1] + [0] * (n - 2)
        if _polpowmod(x, order, f, p) != [1] + [0] * (n - 1):
            continue
        if any(_polpowmod(x, order // ell, f, p) == [1] + [0] * (n - 1)
               for ell in _prime_factors(order)):
            continue
        ok = True
        for d in subfields:
            sub = list(_conway_polynomial(p, d))
            image = _polpowmod(x, order // (p**d - 1), f, p)
            if any(_eval_in(sub, image, f, p)):
                ok = False
                break
        if ok:
            return tuple(f)
    raise RuntimeError(f"no Conway-style polynomial for p={p}, n={n}")


class GF:
    """The field F_{p^n} with its canonical generator g.

    Codes run over 0..p^n-1.  ``exp[k]`` is the code of g^k and ``log`` the
    inverse table (``log[0]`` is unused).
    """

    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.size = p**n
        self.order = self.size - 1
        self.modulus = _conway_polynomial(p, n)
        exp = np.zeros(self.order, dtype=np.int64)
        coords = [1] + [0] * (n - 1)
        x = [0, 1] + [0] * (n - 2) if n > 1 else [(-self.modulus[0]) % p]
        for k in range(self.order):
            exp[k] = self._encode(coords)
            coords = _polmulmod(coords, x, list(self.modulus), p) if n > 1 else [(coords[0] * x[0]) % p]
        log = np.zeros(self.size, dtype=np.int64)
        log[exp] = np.arange(self.order)
        self.exp, self.log = exp, log
        self._digits = p ** np.arange(n, dtype=np.int64)
        # coordinates of g^k for k < 2n-1, used to reduce products of coordinate vectors
        red = np.zeros((max(2 * n - 1, 1), n), dtype=np.int64)
        for k in range(red.shape[0]):
            red[k] = self.coords(int(exp[k % self.order]))
        self.reduction = red
        self._frob_cache: dict[int, np.ndarray] = {}

    def __repr__(self):
        return f"GF({self.p}^{self.n})"

    def _encode(self, coords) -> int:
        return int(sum(int(c) * self.p**i for i, c in enumerate(coords)))

    def coords(self, code: int) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        for i in range(self.n):
            code, out[i] = divmod(code, self.p)
        return out

    def encode_rows(self, arr: np.ndarray) -> np.ndarray:
        return arr @ self._digits

    def decode_rows(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[:, None] // self._digits[None, :]) % self.p

    # scalar operations on codes
    def add(self, a: int, b: int) -> int:
        return self._encode((self.coords(a) + self.coords(b)) % self.p)

    def neg(self, a: int) -> int:
        return self._encode((-self.coords(a)) % self.p)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[(self.log[a] + self.log[b]) % self.order])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return int(self.exp[(-self.log[a]) % self.order])

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k <= 0:
                raise ZeroDivisionError("0 raised to a non-positive power")
            return 0
        return int(self.exp[(self.log[a] * k) % self.order])

    def from_int(self, c: int) -> int:
        """Image of the integer c in the prime field."""
        return c % self.p

    def generator_power(self, k: int) -> int:
        return int(self.exp[k % self.order])

    def frobenius_matrix(self, k: int) -> np.ndarray:
        """Matrix M with coords(x^(p^k)) = coords(x) @ M  (mod p); k may be negative."""
        k %= self.n
        if k not in self._frob_cache:
            mat = np.zeros((self.n, self.n), dtype=np.int64)
            for i in range(self.n):
                mat[i] = self.coords(self.pow(self.generator_power(i), self.p**k))
            self._frob_cache[k] = mat
        return self._frob_cache[k]


@lru_cache(maxsize=None)
def prime_power_field(p: int, n: int) -> GF:
    return GF(p, n)


@lru_cache(maxsize=None)
def embedding_matrix(p: int, a: int, b: int) -> np.ndarray:
    """Coordinates map F_{p^a} -> F_{p^b} (a | b) sending g_a to g_b^((p^b-1)/(p^a-1))."""
    if b % a:
        raise ValueError(f"F_{p}^{a} does not embed in F_{p}^{b}")
    big = prime_power_field(p, b)
    step = (p**b - 1) // (p**a - 1)
    mat = np.zeros((a, b), dtype=np.int64)
    for i in range(a):
        mat[i] = big.coords(big.generator_power(i * step))
    return mat


def embed_code(p: int, a: int, b: int, code: int) -> int:
    small, big = prime_power_field(p, a), prime_power_field(p, b)
    if code == 0:
        return 0
    step = (p**b - 1) // (p**a - 1)
    return big.generator_power(int(small.log[code]) * step)


@dataclass(frozen=True)
class FieldElement:
    """An element of F_{q^m}, carried as its code in F_{p^{s m}}."""

    q: int
    m: int
    code: int

    @property
    def field(self) -> GF:
        p, s = factor_prime_power(self.q)
        return prime_power_field(p, s * self.m)

    @property
    def coordinates(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.coords(self.code))

    def lift(self, m: int) -> "FieldElement":
        if m == self.m:
            return self
        p, s = factor_prime_power(self.q)
        return FieldElement(self.q, m, embed_code(p, s * self.m, s * m, self.code))

    def _common(self, other: "FieldElement"):
        if self.q != other.q:
            raise ValueError("elements of different characteristic towers")
        m = self.m * other.m // gcd(self.m, other.m)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        a, b = self._common(other)
        return FieldElement(self.q, a.m, a.field.add(a.code, b.code))

    def __neg__(self):
        return FieldElement(self.q, self.m, self.field.neg(self.code))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        a, b = self._common(other)
        return FieldElement(self.q, a.m, a.field.mul(a.code, b.code))

    def __pow__(self, k: int):
        return FieldElement(self.q, self.m, self.field.pow(self.code, k))

    def inverse(self):
        return FieldElement(self.q, self.m, self.field.inv(self.code))

    def frobenius(self, k: int = 1):
        """x -> x^(q^k)."""
        K = self.field
        _, s = factor_prime_power(self.q)
        return FieldElement(self.q, self.m, int(self.field.encode_rows(
            self.field.coords(self.code) @ K.frobenius_matrix(s * k) % K.p)))

    def is_zero(self) -> bool:
        return self.code == 0

    def multiplicative_order(self) -> int:
        if self.code == 0:
            raise ValueError("0 has no multiplicative order")
        K = self.field
        return K.order // gcd(K.order, int(K.log[self.code]))


def field_element(q: int, m: int, code: int) -> FieldElement:
    return FieldElement(q, m, code)


def fq_elements(q: int) -> list[int]:
    """Codes of F_q inside F_{p^s}, in increasing code order (0 first)."""
    return list(range(q))


def root_of_unity(q: int, order: int, m: int = 1) -> FieldElement:
    """Canonical element of multiplicative order ``order`` in F_{q^m}.

    It is g^((q^m-1)/order) for the canonical generator g of F_{q^m}.
    """
    size = q**m - 1
    if order < 1 or size % order:
        raise ValueError(f"order {order} does not divide q^m - 1 = {size}")
    p, s = factor_prime_power(q)
    K = prime_power_field(p, s * m)
    return FieldElement(q, m, K.generator_power(size // order))


def minus_one_root(q: int) -> FieldElement:
    """Canonical zeta with zeta^(q-1) = -1, in the smallest F_{q^m} holding one."""
    if q % 2 == 0:
        return FieldElement(q, 1, 1)
    # order 2(q-1) never divides q - 1 but always divides q^2 - 1
    return root_of_unity(q, 2 * (q - 1), 2)


# -- the polynomial rings F_q[theta] and F_q[t]

@dataclass(frozen=True)
class Poly:
    """Polynomial over F_q with coefficient codes listed from degree 0 upward.

    ``var`` is ``"theta"`` for elements of A and ``"t"`` after substitution.
    """

    q: int
    coeffs: tuple[int, ...]
    var: str = "theta"

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def _field(self) -> GF:
        p, s = factor_prime_power(self.q)
        return prime_power_field(p, s)

    def __add__(self, other: "Poly") -> "Poly":
        K = self._field()
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly(self.q, tuple(K.add(x, y) for x, y in zip(a, b)), self.var)

    def __neg__(self) -> "Poly":
        K = self._field()
        return Poly(self.q, tuple(K.neg(x) for x in self.coeffs), self.var)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        K = self._field()
        if self.is_zero() or other.is_zero():
            return Poly(self.q, (), self.var)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    if y:
                        out[i + j] = K.add(out[i + j], K.mul(x, y))
        return Poly(self.q, tuple(out), self.var)

    def scale(self, c: int) -> "Poly":
        K = self._field()
        return Poly(self.q, tuple(K.mul(c, x) for x in self.coeffs), self.var)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)


def poly_constant(q: int, c: int, var: str = "theta") -> Poly:
    return Poly(q, (c,), var)


def poly_monomial(q: int, k: int, var: str = "theta") -> Poly:
    return Poly(q, (0,) * k + (1,), var)


def enumerate_polys(q: int, max_degree: int, monic_only: bool = False, exact_degree: bool = False):
    """All a in F_q[theta] with deg a <= max_degree.

    Ordering is lexicographic on (c_d, ..., c_1, c_0), constant term last.
    ``monic_only`` keeps the monic ones; ``exact_degree`` keeps deg a == max_degree.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    elems = fq_elements(q)
    out = []
    for vec in itertools.product(elems, repeat=max_degree + 1):
        a = Poly(q, tuple(reversed(vec)))
        if exact_degree and a.degree != max_degree:
            continue
        if monic_only and not a.is_monic():
            continue
        out.append(a)
    return out


def monic_polys(q: int, degree: int) -> list[Poly]:
    return enumerate_polys(q, degree, monic_only=True, exact_degree=True)


def substitute_t(a: Poly) -> Poly:
    """a(theta) -> a(t): same coefficients, variable renamed."""
    return Poly(a.q, a.coeffs, "t")
