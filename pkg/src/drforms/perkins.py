"""Perkins' series, the generating function H(Z) = exp(Z)^(-1) exp(Z/(theta - t)),
its extracts D_j, the forms G_{j,r}, the H_k recursion and the j = 1 identity
F^T E_z(1, t) = -(1/(theta - t), 0, ..., 0)^T.
"""

from __future__ import annotations

from dataclasses import dataclass

from .agf import AGFMatrix
from .cinfty import CInftyValue, theta
from .drinfeld import DrinfeldModuleData
from .eisenstein import EisensteinVector, eis_tate
from .lattice import OmegaPoint
from .tate import TateSeries, geometric_kernel, mat_mul, transpose


def default_z_truncation(q: int, r: int = 2) -> int:
    """Enough Z-orders for the zero pattern up to q^2 - 1 and for D_j, j <= r - 1."""
    return max(q * q - 1, q ** (r - 1) - 1)


@dataclass
class HSeries:
    """c_0, ..., c_M of H(Z) = sum c_i Z^i, each a t-series."""

    q: int
    coeffs: list
    M: int

    def D(self, j: int) -> TateSeries:
        """D_j: the coefficient of Z^(q^j - 1)."""
        i = self.q**j - 1
        if i > self.M:
            raise ValueError(f"D_{j} needs Z-truncation M >= {i}")
        return self.coeffs[i]

    def to_json(self) -> dict:
        return {"M": self.M, "coeffs": [c.to_json() for c in self.coeffs]}


def _alpha_levels(q: int, M: int) -> int:
    l = 0
    while q ** (l + 1) - 1 <= M:
        l += 1
    return l


def h_series(mod: DrinfeldModuleData, M: int, N: int) -> HSeries:
    """Coefficients of H(Z) by the recurrence

    c_0 = 1/(theta - t),
    c_i = [i = q^l - 1] alpha_l/(theta^(q^l) - t) - sum_{j >= 1, q^j - 1 <= i} alpha_j c_(i - q^j + 1).
    """
    q = mod.q
    L = _alpha_levels(q, M)
    alphas = [mod.alpha(j) for j in range(L + 1)]
    kernels = [geometric_kernel(q, j, N) for j in range(L + 1)]
    coeffs = [kernels[0]]
    zero = TateSeries.zero(q, N)
    for i in range(1, M + 1):
        acc = zero
        for j in range(1, L + 1):
            k = i - (q**j - 1)
            if k < 0:
                break
            if not coeffs[k].is_exact_zero_series():
                acc = acc - coeffs[k].scale(alphas[j])
        if i in {q**l - 1 for l in range(1, L + 1)}:
            l = next(l for l in range(1, L + 1) if q**l - 1 == i)
            acc = acc + kernels[l].scale(alphas[l])
        coeffs.append(acc)
    return HSeries(q, coeffs, M)


def h_series_division(mod: DrinfeldModuleData, M: int, N: int) -> HSeries:
    """Oracle: H(Z) = B(Z)/A(Z) with A = sum alpha_i Z^(q^i - 1), B = sum alpha_i Z^(q^i - 1)/(theta^(q^i) - t),
    by power-series division in Z (A has constant term 1)."""
    q = mod.q
    L = _alpha_levels(q, M)
    zero = TateSeries.zero(q, N)
    A = [CInftyValue.zero(q)] * (M + 1)
    B = [zero] * (M + 1)
    for i in range(L + 1):
        A[q**i - 1] = mod.alpha(i)
        B[q**i - 1] = geometric_kernel(q, i, N).scale(mod.alpha(i))
    out = []
    for n in range(M + 1):
        acc = B[n]
        for k in range(1, n + 1):
            if not A[k].is_exact_zero():
                acc = acc - out[n - k].scale(A[k])
        out.append(acc)
    return HSeries(q, out, M)


def zero_pattern(hs: HSeries):
    """Indices i with (q-1) not dividing i whose coefficient is not exactly zero."""
    return [i for i, c in enumerate(hs.coeffs) if i % (hs.q - 1) and not c.is_exact_zero_series()]


def symbolic_weights(q: int, M: int):
    """Monomials in alpha_1, alpha_2, ... reachable in c_i through the recurrence, with their weights.

    alpha_j has weight q^j - 1; returns {i: set of weights}, which homogeneity
    predicts to be {i} (or empty).
    """
    L = _alpha_levels(q, M)
    supp = [{()}]
    for i in range(1, M + 1):
        mons = set()
        for j in range(1, L + 1):
            k = i - (q**j - 1)
            if k < 0:
                break
            for m in supp[k]:
                mons.add(tuple(sorted(m + (j,))))
        if any(q**l - 1 == i for l in range(1, L + 1)):
            mons.add((next(l for l in range(1, L + 1) if q**l - 1 == i),))
        supp.append(mons)
    return {i: {sum(q**j - 1 for j in m) for m in mons} for i, mons in enumerate(supp)}


def scaled_h_series(mod: DrinfeldModuleData, M: int, N: int, lam: CInftyValue) -> HSeries:
    """H(Z) for the lattice lam z A, whose exponential has coefficients alpha_j lam^(1 - q^j)."""
    q = mod.q
    L = _alpha_levels(q, M)
    scaled = _ScaledAlphas(mod, lam, L)
    return h_series(scaled, M, N)


class _ScaledAlphas:
    def __init__(self, mod, lam, L):
        self.q = mod.q
        self._a = [mod.alpha(j) * lam ** (1 - mod.q**j) for j in range(L + 1)]

    def alpha(self, j):
        return self._a[j]


def perkins_coefficients(z: OmegaPoint, D: int, N: int, j_max: int):
    """Z^(j-1)-coefficients of Psi_zA(Z) for j = 1..j_max.

    1/(Z - a.z) = -sum_m Z^m (a.z)^(-m-1) on |Z| < min |a.z|, so the
    coefficient of Z^(j-1) is -sum' a(t) (a.z)^(-j).
    """
    out = []
    for j in range(1, j_max + 1):
        v = eis_tate(z, j, D, N)
        out.append(EisensteinVector(j, N, D, [-c for c in v.coords], v.tail_error))
    return out


def h_from_perkins(perkins, F: AGFMatrix, orders):
    """c_m of H(Z) = Psi_zA(Z) omega_zA at the given Z-orders."""
    col = F.column(0)
    out = {}
    for m in orders:
        v = perkins[m]
        acc = None
        for x, s in zip(v.coords, col):
            acc = x * s if acc is None else acc + x * s
        out[m] = acc
    return out


def g_jr(mod: DrinfeldModuleData, hs: HSeries, j: int) -> TateSeries:
    """((t - theta) D_j - g_1 D_(j-1)^(1) - ... - g_j D_0^(j)) / Delta_r."""
    r = mod.r
    if not 1 <= j <= r - 1:
        raise ValueError("G_{j,r} needs 1 <= j <= r-1")
    acc = hs.D(j).times_t_minus(theta(mod.q))
    for k in range(1, j + 1):
        acc = acc - hs.D(j - k).twist(k).scale(mod.g[k - 1])
    return acc.scale(mod.delta.inverse())


def h_k_values(mod: DrinfeldModuleData, hs: HSeries):
    """H_0, ..., H_(r-2) built by the recursion with negative twists."""
    r = mod.r
    dinv = mod.delta.inverse()
    H = []
    for k in range(r - 1):
        e = -(r - (k + 2))
        val = g_jr(mod, hs, r - (k + 1)).twist(e)
        for l in range(1, k + 1):
            coeff = (mod.g[r - l - 1] * dinv).frobenius(e)
            val = val - H[k - l].scale(coeff)
        H.append(val)
    return H


def proof5_sides(F: AGFMatrix, eis1: EisensteinVector):
    """F^T E_z(1, t) and -(1/(theta - t), 0, ..., 0)^T."""
    q, r, N = F.mod.q, F.r, F.N
    col = [[c] for c in eis1.coords]
    lhs = [row[0] for row in mat_mul(transpose(F.rows), col)]
    rhs = [-geometric_kernel(q, 0, N)] + [TateSeries.zero(q, N) for _ in range(r - 1)]
    return lhs, rhs
