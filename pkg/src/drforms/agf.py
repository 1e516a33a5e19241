"""Anderson generating functions, the matrix F(z,t), the companion matrix Phi_z
and the Anderson-Thakur function omega(t)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cinfty import CInftyValue, canonical_beta, get_working_precision, theta, theta_power
from .drinfeld import DrinfeldModuleData
from .tate import TateSeries, det, cofactor, mat_mul, transpose, twist_matrix


# -- omega ----------------------------------------------------------------

def omega_function(q: int, N: int) -> TateSeries:
    """beta * prod_{i>=0} (1 - t/theta^(q^i))^(-1), truncated with certified error."""
    beta = canonical_beta(q)
    W = get_working_precision()
    series = TateSeries.constant(CInftyValue.constant(q, 1), N)
    i = 0
    while q**i - 1 <= W + 1:
        # (1 - t theta^(-q^i))^(-1) = sum_n t^n theta^(-n q^i)
        factor = TateSeries(q, tuple(theta_power(q, -n * q**i) for n in range(N)), Fraction(0), Fraction(q**i))
        series = series * factor
        i += 1
    cut = q**i
    # dropped factors change c_n by at most q^(-(n-1) - q^i) (relative to beta)
    bd = beta.deg
    coeffs = tuple((beta * c).with_error(bd - (n - 1) - cut) if n >= 1 else beta * c
                   for n, c in enumerate(series.coeffs))
    return TateSeries(q, coeffs, Fraction(1, q - 1), Fraction(1))


def omega_twisted_inverse(q: int, N: int) -> TateSeries:
    """1/omega^(1) = beta^(-q) prod_{i>=1} (1 - t/theta^(q^i)), an entire function."""
    beta = canonical_beta(q)
    W = get_working_precision()
    one = CInftyValue.constant(q, 1)
    series = TateSeries.constant(one, N)
    i = 1
    # coefficient n needs the factors i <= n; the next ones are relatively tiny
    while q**i <= q**N + W + 1:
        factor = TateSeries.from_values(q, [one, -theta_power(q, -q**i)], N)
        series = series * factor
        i += 1
    scale = beta.frobenius(1).inverse()
    lead = Fraction(-q, q - 1)
    coeffs = []
    for n, c in enumerate(series.coeffs):
        c = scale * c
        if n >= 1:
            c = c.with_error(lead - q**i - sum(q**k for k in range(1, n)))
        coeffs.append(c)
    b = (N - 1) * q**N - sum(q**k for k in range(1, N)) + lead
    return TateSeries(q, tuple(coeffs), Fraction(b), Fraction(q**N))


def omega_twist(q: int, N: int) -> TateSeries:
    return omega_function(q, N).twist(1)


# -- Anderson generating functions -----------------------------------------

def agf(mod: DrinfeldModuleData, w: CInftyValue, N: int) -> TateSeries:
    """s(w;t) = sum_j alpha_j w^(q^j) / (theta^(q^j) - t), partial-fraction route."""
    q = mod.q
    if w.is_exact_zero():
        return TateSeries.zero(q, N)
    J, tail = mod._terms_needed(w.size_deg() - 1)
    wt = w / theta(q)
    us = [mod.alpha(j) * wt.frobenius(j) for j in range(J + 1)]
    coeffs = []
    for n in range(N):
        acc = CInftyValue.zero(q)
        for j, u in enumerate(us):
            acc = acc + u * theta_power(q, -(q**j) * n)
        coeffs.append(acc.with_error(tail - q ** (J + 1) * n))
    sizes = [u.size_deg() for u in us if u.size_deg() is not None] + [tail]
    return TateSeries(q, tuple(coeffs), max(sizes), Fraction(1))


def agf_by_definition(mod: DrinfeldModuleData, w: CInftyValue, N: int) -> TateSeries:
    """s(w;t) = sum_i exp(w / theta^(i+1)) t^i, the defining series."""
    q = mod.q
    coeffs = tuple(mod.eval_exp(w * theta_power(q, -(i + 1))) for i in range(N))
    return TateSeries(q, coeffs)


@dataclass
class AGFMatrix:
    """F with (i, j) entry s_i^(j-1)(z; t), plus the source module."""

    mod: DrinfeldModuleData
    rows: list
    N: int

    @property
    def r(self) -> int:
        return self.mod.r

    def column(self, j: int):
        return [row[j] for row in self.rows]

    def det(self) -> TateSeries:
        return det(self.rows)

    def cofactor(self, i: int, j: int) -> TateSeries:
        """(i, j)-cofactor, 0-based."""
        return cofactor(self.rows, i, j)

    def twisted(self, k: int):
        return twist_matrix(self.rows, k)


def build_F(mod: DrinfeldModuleData, N: int) -> AGFMatrix:
    base = [agf(mod, z, N) for z in mod.point.entries]
    rows = [[s.twist(j) for j in range(mod.r)] for s in base]
    return AGFMatrix(mod, rows, N)


def companion_matrix(mod: DrinfeldModuleData, N: int):
    """Phi_z: shift rows above, last row ((t-theta)/Delta, -g_1/Delta, ..., -g_{r-1}/Delta)."""
    q, r = mod.q, mod.r
    zero = TateSeries.zero(q, N)
    one = TateSeries.constant(CInftyValue.constant(q, 1), N)
    dinv = mod.delta.inverse()
    M = [[zero for _ in range(r)] for _ in range(r)]
    for i in range(r - 1):
        M[i][i + 1] = one
    M[r - 1][0] = TateSeries.linear_t_minus(theta(q), N).scale(dinv)
    for k in range(1, r):
        M[r - 1][k] = TateSeries.constant(-(mod.g[k - 1] * dinv), N)
    return M


def difference_equation_residual(F: AGFMatrix):
    """tau(F^T) - Phi_z F^T, entrywise."""
    Ft = transpose(F.rows)
    lhs = twist_matrix(Ft, 1)
    rhs = mat_mul(companion_matrix(F.mod, F.N), Ft)
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(lhs, rhs)]


def psi_apply(mod: DrinfeldModuleData, s: TateSeries) -> TateSeries:
    """Delta s^(r) + ... + g_1 s^(1) - (t - theta) s."""
    acc = -s.times_t_minus(theta(mod.q))
    for i, g in enumerate(mod.coefficients(), start=1):
        acc = acc + s.twist(i).scale(g)
    return acc


def omega_matrix(F: AGFMatrix):
    """Omega_{zA} = (omega_zA, omega_zA^(-1), ..., omega_zA^(1-r)) built from the AGFs."""
    r = F.r
    cols = [[row[0].twist(-k) for row in F.rows] for k in range(r)]
    return transpose(cols)


def set3_rhs(F: AGFMatrix):
    """F^(-(r-1)) V with V the antidiagonal permutation."""
    r = F.r
    Ft = twist_matrix(F.rows, -(r - 1))
    return [[row[r - 1 - j] for j in range(r)] for row in Ft]
