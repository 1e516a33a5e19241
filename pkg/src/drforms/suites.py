"""Verification suites: each returns a list of IdentityReport for one configuration."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import perkins as pk
from .agf import difference_equation_residual, omega_function, psi_apply
from .cinfty import CInftyValue, theta, working_precision
from .eisenstein import (
    PointForms,
    basson_product,
    bold_E_j,
    bold_E_u_series,
    carlitz_weight,
    default_degree_bound,
    eis_scalar,
    eis_tate,
    false_eisenstein,
    lattice_inverses,
    fe4_sides,
    gekeler_sides,
    j_invariant_sides,
    normalized_j_sides,
    shear_sides,
    test_matrices,
    tfe3_sides,
    tfe_sides,
    tmain_rhs,
    weak_modularity_sides,
    weight_matrices,
)
from .lattice import OmegaPoint, canonical_cm_point, parse_point
from .reports import IdentityReport, compare_series, compare_series_vectors, compare_values, compare_vectors
from .tate import TateSeries


@dataclass
class RunContext:
    """One (q, r, point) configuration with shared cached objects."""

    q: int
    r: int
    N: int = 24
    D: int | None = None
    P: int = 80
    M: int | None = None
    point: str = "canonical"
    seed: int = 0
    cache: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.D is None:
            self.D = default_degree_bound(self.r)
        if self.M is None:
            self.M = pk.default_z_truncation(self.q, self.r)

    @cached_property
    def z(self) -> OmegaPoint:
        with working_precision(self.P):
            return parse_point(self.point, self.q, self.r)

    @cached_property
    def forms(self) -> PointForms:
        return PointForms(self.z, self.D, self.N)

    @property
    def params(self) -> dict:
        return {"q": self.q, "r": self.r, "point": self.point, "N": self.N, "D": self.D, "P": self.P}

    def inverses(self):
        if "inverses" not in self.cache:
            with working_precision(self.P):
                self.cache["inverses"] = lattice_inverses(self.z, self.D)
        return self.cache["inverses"]

    def eis1(self):
        if "eis1" not in self.cache:
            self.cache["eis1"] = eis_tate(self.z, 1, self.D, self.N, self.inverses())
        return self.cache["eis1"]

    def hseries(self):
        if "hs" not in self.cache:
            self.cache["hs"] = pk.h_series(self.forms.mod, self.M, self.N)
        return self.cache["hs"]


def _zero(q, N):
    return TateSeries.zero(q, N)


# -- agf-matrix ----------------------------------------------------------------

def suite_pdet(ctx: RunContext):
    f = ctx.forms
    q, r = ctx.q, ctx.r
    lhs = ctx.forms.F.det().scale(f.pi ** carlitz_weight(q, r) * f.h)
    rhs = omega_function(q, ctx.N)
    return [compare_series("pdet", ctx.params, lhs, rhs)]


def suite_edet6(ctx: RunContext):
    f = ctx.forms
    q, r = ctx.q, ctx.r
    sign = CInftyValue.from_int(q, -1) ** (r - 1)
    rhs = f.pi ** (q**r - 1) * sign * f.h ** (q - 1)
    return [compare_values("edet6", ctx.params, f.mod.delta, rhs)]


def suite_anderson(ctx: RunContext):
    f = ctx.forms
    col = f.F.column(0)
    reps = [compare_series(f"anderson[s_{i + 1}]", ctx.params, psi_apply(f.mod, s), _zero(ctx.q, s.N))
            for i, s in enumerate(col)]
    res = difference_equation_residual(f.F)
    flat = [x for row in res for x in row]
    reps.append(compare_series_vectors("det2", ctx.params, flat, [_zero(ctx.q, x.N) for x in flat]))
    return reps


def suite_omega(ctx: RunContext):
    q, N = ctx.q, ctx.N
    om = omega_function(q, N)
    tw = om.twist(1)
    rep1 = compare_series("omega_twist", ctx.params, tw, om.times_t_minus(theta(q)))
    from .agf import omega_twisted_inverse

    inv = omega_twisted_inverse(q, N)
    # (1/omega^(1)) evaluated at theta is -1/pi~
    rep2 = compare_values("omega_twist_at_theta", ctx.params, inv.eval_at(theta(q)).inverse(), -ctx.forms.pi)
    return [rep1, rep2]


def suite_qpfe(ctx: RunContext, count: int = 5):
    """F_i(theta x) - theta F_i(x) = exp(x)^(q^i) at seeded random x."""
    q = ctx.q
    mod = ctx.forms.mod
    rng = random.Random(ctx.seed)
    out = []
    for n in range(count):
        top = Fraction(rng.randint(-4, 2))
        codes = [rng.randrange(1, q)] + [rng.randrange(q) for _ in range(7)]
        x = CInftyValue.zero(q)
        for k, c in enumerate(codes):
            if c:
                x = x + CInftyValue.monomial(q, top - k, c)
        for i in range(1, ctx.r):
            lhs = mod.quasi_period_value(i, theta(q) * x) - theta(q) * mod.quasi_period_value(i, x)
            rhs = mod.eval_exp(x).frobenius(i)
            out.append(compare_values(f"qpfe[i={i},x#{n}]", {**ctx.params, "x": x.to_json()}, lhs, rhs))
    return out


# -- eisenstein-modular -------------------------------------------------------

def suite_tmain(ctx: RunContext):
    lhs = ctx.eis1().coords
    rhs = tmain_rhs(ctx.forms)
    return [compare_series_vectors("tmain", ctx.params, lhs, rhs)]


def suite_tegek(ctx: RunContext):
    f = ctx.forms
    p = ctx.params
    E = {route: false_eisenstein(f, route) for route in ("u", "det", "dL", "bold")}
    out = [
        compare_values("tegek[u=det]", p, E["u"], E["det"]),
        compare_values("tegek[u=dL]", p, E["u"], E["dL"]),
        compare_values("tegek[det=dL]", p, E["det"], E["dL"]),
        compare_values("tegek[bold(theta)=E]", p, E["bold"], E["det"]),
    ]
    for j in range(2, ctx.r):
        det_j = false_eisenstein(f, "det", j=j)
        out.append(compare_values(f"tegek[E^[{j}] det=dL]", p, det_j, false_eisenstein(f, "dL", j=j)))
        out.append(compare_values(f"tegek[bold E^[{j}](theta)=E^[{j}]]", p, false_eisenstein(f, "bold", j=j), det_j))
    return out


def suite_tfe(ctx: RunContext):
    f = ctx.forms
    out = []
    for name, g in test_matrices(ctx.q, ctx.r):
        p = {**ctx.params, "gamma": name}
        out.append(compare_values(f"tfe[{name}]", p, *tfe_sides(f, g)))
        out.append(compare_values(f"fe4[{name}]", p, *fe4_sides(f, g)))
        if ctx.r == 2:
            out.append(compare_values(f"gekeler[{name}]", p, *gekeler_sides(f, g)))
    for j in range(2, ctx.r):
        out.append(compare_values(f"first[gamma_{j}]", {**ctx.params, "j": j}, *shear_sides(f, j)))
    return out


def suite_tfe3(ctx: RunContext):
    f = ctx.forms
    out = []
    for name, g in test_matrices(ctx.q, ctx.r):
        out.append(compare_series(f"tfe3[{name}]", {**ctx.params, "gamma": name}, *tfe3_sides(f, g)))
    # E(gamma_j z, t) = E(z, t) + E^[j](z, t)
    for j in range(2, ctx.r):
        from .lattice import gamma_j_matrix

        moved, _ = f.at(gamma_j_matrix(ctx.q, ctx.r, j))
        lhs = bold_E_j(moved, 1)
        rhs = bold_E_j(f, 1) + bold_E_j(f, j)
        out.append(compare_series(f"second[gamma_{j}]", {**ctx.params, "j": j}, lhs, rhs))
    return out


def suite_weak(ctx: RunContext):
    f = ctx.forms
    out = []
    for name, g in weight_matrices(ctx.q, ctx.r):
        p = {**ctx.params, "gamma": name}
        for what in ("delta", "h", "eis"):
            out.append(compare_values(f"weak[{what},{name}]", p, *weak_modularity_sides(f, g, what)))
        a, b = j_invariant_sides(f, g)
        out.append(compare_vectors(f"jinv[{name}]", p, a, b))
    lhs, rhs, lead = normalized_j_sides(f)
    sign = CInftyValue.from_int(ctx.q, -1) ** (ctx.r - 1)
    out.append(compare_vectors("jinv[normalized]", ctx.params, lhs + [lead], rhs + [sign]))
    return out


def suite_basson(ctx: RunContext):
    lhs, rhs = basson_product(ctx.forms)
    return [compare_values("basson", ctx.params, lhs, rhs)]


def suite_lu(ctx: RunContext):
    f = ctx.forms
    lhs = ctx.eis1().coords[0]
    rhs = bold_E_u_series(ctx.z, ctx.D, ctx.N, f.tilde_mod, f.pi).scale(-f.pi)
    return [compare_series("lu", ctx.params, lhs, rhs)]


# -- perkins-series -------------------------------------------------------------

def suite_pol1(ctx: RunContext):
    q, N, M = ctx.q, ctx.N, ctx.M
    mod = ctx.forms.mod
    hs = ctx.hseries()
    p = {**ctx.params, "M": M}
    out = [compare_series_vectors("pol1[recurrence=division]", p, hs.coeffs, pk.h_series_division(mod, M, N).coeffs)]
    bad = pk.zero_pattern(hs)
    out.append(IdentityReport("pol1[zero pattern]", p, bad, [], None, None, 1, not bad,
                              None if not bad else {"index": bad[0]}))
    weights = pk.symbolic_weights(q, M)
    off = {i: sorted(w) for i, w in weights.items() if w and w != {i}}
    out.append(IdentityReport("pol1[weights]", p, {i: sorted(w) for i, w in weights.items()}, None, None, None, 1,
                              not off, None if not off else {"index": min(off), "weights": off[min(off)]}))
    lam = theta(q)
    scaled = pk.scaled_h_series(mod, M, N, lam)
    expect = [c.scale(lam ** (-i)) for i, c in enumerate(hs.coeffs)]
    out.append(compare_series_vectors("pol1[homogeneity]", p, scaled.coeffs, expect))
    zero_c = pk.geometric_kernel(q, 0, N)
    out.append(compare_series("pol1[c_0]", p, hs.coeffs[0], zero_c))
    if ctx.q > 2 and M >= q - 1:
        c = hs.coeffs[q - 1]
        a1 = mod.alpha(1)
        out.append(compare_series("pol1[c_(q-1)]", p, c, (pk.geometric_kernel(q, 1, N) - zero_c).scale(a1)))
    return out


def suite_gjr(ctx: RunContext):
    mod = ctx.forms.mod
    hs = ctx.hseries()
    out = []
    for j in range(1, ctx.r):
        out.append(compare_series(f"gjr[j={j}]", ctx.params, pk.g_jr(mod, hs, j), _zero(ctx.q, ctx.N)))
    for k, H in enumerate(pk.h_k_values(mod, hs)):
        out.append(compare_series(f"H_{k}", ctx.params, H, _zero(ctx.q, ctx.N)))
    return out


def suite_proof5(ctx: RunContext):
    f = ctx.forms
    lhs, rhs = pk.proof5_sides(f.F, ctx.eis1())
    out = [compare_series_vectors("proof5", ctx.params, lhs, rhs)]
    q = ctx.q
    per = pk.perkins_coefficients(ctx.z, ctx.D, ctx.N, q)
    hs = ctx.hseries()
    got = pk.h_from_perkins(per, f.F, sorted({0, q - 1}))
    for m, v in got.items():
        out.append(compare_series(f"perkins[H=Psi omega, Z^{m}]", ctx.params, v, hs.coeffs[m]))
    if q > 2:
        z2 = per[1].coords
        out.append(compare_series_vectors("perkins[j=2 vanishes]", ctx.params, z2, [_zero(q, ctx.N)] * ctx.r))
    return out


# -- soundness of precision ------------------------------------------------

def _refined(ctx: RunContext) -> RunContext:
    return RunContext(ctx.q, ctx.r, N=ctx.N, D=ctx.D + 1, P=ctx.P + 20, M=ctx.M, point=ctx.point, seed=ctx.seed)


def suite_soundness(ctx: RunContext):
    """Every sum recomputed at D+1 and P+20 must agree on the digits the base run certified.

    The base side is computed first under the base precision; each report
    compares base against refined, so its certified valuation is the base error.
    """
    q, N = ctx.q, ctx.N
    fine = _refined(ctx)
    names = ["pi", "h", "delta", "g", "F", "E[u]", "E[det]", "E[dL]", "boldE", "eis_tate", "eis_scalar",
             "u_series", "basson"]

    def values(c: RunContext):
        f = c.forms
        with working_precision(c.P):
            out = {
                "pi": [f.pi],
                "h": [f.h],
                "delta": [f.mod.delta],
                "g": list(f.mod.g),
                "F": [x for row in f.F.rows for x in row],
                "E[u]": [false_eisenstein(f, "u")],
                "E[det]": [false_eisenstein(f, "det")],
                "E[dL]": [false_eisenstein(f, "dL")],
                "boldE": [bold_E_j(f, 1)],
                "eis_tate": c.eis1().coords,
                "u_series": [bold_E_u_series(c.z, c.D, N, f.tilde_mod, f.pi)],
                "eis_scalar": [eis_scalar(c.z, q - 1, c.D, c.inverses())],
                "basson": [basson_product(f)[1]],
            }
        return out

    base, refined = values(ctx), values(fine)
    p = {**ctx.params, "refined": {"D": fine.D, "P": fine.P}}
    out = []
    for name in names:
        a, b = base[name], refined[name]
        if isinstance(a[0], TateSeries):
            rep = compare_series_vectors(f"soundness[{name}]", p, a, b)
        else:
            rep = compare_vectors(f"soundness[{name}]", p, a, b)
        out.append(rep)
    return out


SUITES = {
    "pdet": suite_pdet,
    "tmain": suite_tmain,
    "tegek": suite_tegek,
    "tfe": suite_tfe,
    "tfe3": suite_tfe3,
    "pol1": suite_pol1,
    "gjr": suite_gjr,
    "proof5": suite_proof5,
    "basson": suite_basson,
    "edet6": suite_edet6,
    "qpfe": suite_qpfe,
    "lu": suite_lu,
    "anderson": suite_anderson,
    "omega": suite_omega,
    "weak": suite_weak,
    "soundness": suite_soundness,
}

# soundness repeats the whole computation at larger parameters, so it runs on request only
DEFAULT_SUITES = tuple(name for name in SUITES if name != "soundness")


def run_suites(ctx: RunContext, names=DEFAULT_SUITES):
    out = []
    with working_precision(ctx.P):
        for name in names:
            out.extend(SUITES[name](ctx))
    return out


def default_context(q: int, r: int, **kw) -> RunContext:
    return RunContext(q, r, **kw)


def canonical_context(q: int, r: int, **kw) -> RunContext:
    ctx = RunContext(q, r, **kw)
    ctx.__dict__["z"] = canonical_cm_point(q, r)
    return ctx
