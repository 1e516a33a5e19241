"""Acceptance run: one test per criterion, each printing a single PASS/FAIL line.

Every criterion builds fresh contexts, so the printed runtimes are honest
cold-start timings at P = 80, N = 16 and the default degree bounds.
"""

import time

import pytest

import drforms.agf
import drforms.eisenstein
from drforms.suites import (
    RunContext,
    suite_anderson,
    suite_basson,
    suite_edet6,
    suite_gjr,
    suite_lu,
    suite_omega,
    suite_pdet,
    suite_pol1,
    suite_proof5,
    suite_qpfe,
    suite_soundness,
    suite_tegek,
    suite_tfe,
    suite_tfe3,
    suite_tmain,
)

CONFIGS = [(2, 2), (3, 2), (2, 3)]
P, N = 80, 16

# per-configuration runtime of criteria 1-6, the base for criterion 7
_base_time = {}


def _fresh(q, r, n=N):
    return RunContext(q, r, N=n, P=P)


def _report(capsys, number, title, reports, seconds, limit):
    failed = [r for r in reports if not r.passed]
    ok = not failed and seconds <= limit
    status = "PASS" if ok else "FAIL"
    with capsys.disabled():
        print(f"\n[criterion {number}] {status} {title}: {len(reports)} identities, "
              f"{len(failed)} failed, {seconds:.1f}s (limit {limit:.0f}s)")
    assert not failed, "\n".join(r.line() for r in failed)
    assert seconds <= limit


def _run(suites, configs=CONFIGS, n=N):
    reports, worst = [], 0.0
    for q, r in configs:
        ctx = _fresh(q, r, n)
        start = time.perf_counter()
        for suite in suites:
            reports.extend(suite(ctx))
        spent = time.perf_counter() - start
        _base_time[(q, r)] = _base_time.get((q, r), 0.0) + spent
        worst = max(worst, spent)
    return reports, worst


def test_criterion_1_determinant(capsys):
    reports, worst = _run([suite_pdet])
    assert all(r.certified_valuation is not None for r in reports)
    _report(capsys, 1, "det F pi~^w h = omega, per-config worst", reports, worst, 60)


def test_criterion_2_cofactor_formula(capsys):
    start = time.perf_counter()
    reports, _ = _run([suite_tmain])
    _report(capsys, 2, "brute-force E(1,t) against the cofactor column", reports, time.perf_counter() - start, 120)


def test_criterion_3_false_eisenstein_routes(capsys):
    start = time.perf_counter()
    reports, _ = _run([suite_tegek])
    names = {r.name for r in reports}
    assert {"tegek[u=det]", "tegek[u=dL]", "tegek[det=dL]", "tegek[bold(theta)=E]"} <= names
    _report(capsys, 3, "u, det and dL routes agree and bold E(theta) = E", reports, time.perf_counter() - start, 120)


def test_criterion_4_functional_equations(capsys):
    start = time.perf_counter()
    reports, _ = _run([suite_tfe, suite_tfe3])
    names = {r.name for r in reports}
    assert any(n.startswith("gekeler[") for n in names)
    assert "first[gamma_2]" in names and "second[gamma_2]" in names
    _report(capsys, 4, "functional equations for id, gamma_j, shear, lower", reports, time.perf_counter() - start, 60)


def test_criterion_5_perkins(capsys):
    start = time.perf_counter()
    reports, _ = _run([suite_pol1, suite_gjr, suite_proof5])
    _report(capsys, 5, "zero pattern, division oracle, G_jr, transpose identity", reports,
            time.perf_counter() - start, 60)


def test_criterion_6_structural(capsys):
    start = time.perf_counter()
    reports, _ = _run([suite_anderson, suite_omega, suite_edet6, suite_basson, suite_qpfe])
    lu, _ = _run([suite_lu], n=8)
    _report(capsys, 6, "psi, difference equation, omega, Delta vs h, Basson, quasi-periods, u-series",
            reports + lu, time.perf_counter() - start, 120)


def test_criterion_7_precision_soundness(capsys):
    reports, worst_ratio = [], 0.0
    start = time.perf_counter()
    for q, r in CONFIGS:
        t0 = time.perf_counter()
        reports.extend(suite_soundness(_fresh(q, r)))
        spent = time.perf_counter() - t0
        if (q, r) in _base_time:
            worst_ratio = max(worst_ratio, spent / _base_time[(q, r)])
    total = time.perf_counter() - start
    base = sum(_base_time.values()) if len(_base_time) == len(CONFIGS) else total
    with capsys.disabled():
        print(f"\n[criterion 7] worst per-config ratio to base runtime {worst_ratio:.2f}")
    _report(capsys, 7, "D+1, P+20 recomputation agrees on certified digits", reports, total, 2 * base)


@pytest.mark.parametrize("site", ["omega", "h"])
def test_criterion_8_mutation(capsys, monkeypatch, site):
    # zeta = -1 is a nontrivial root of unity in F_3, so the flip changes beta
    module = drforms.agf if site == "omega" else drforms.eisenstein
    orig = module.canonical_beta
    monkeypatch.setattr(module, "canonical_beta", lambda q: -orig(q))
    start = time.perf_counter()
    ctx = _fresh(3, 2)
    reports = suite_pdet(ctx) + suite_tmain(ctx)
    spent = time.perf_counter() - start
    caught = [not r.passed for r in reports]
    ok = all(caught) and spent <= 60
    with capsys.disabled():
        print(f"\n[criterion 8] {'PASS' if ok else 'FAIL'} beta -> -beta at the {site} site: "
              f"det identity {'fails' if caught[0] else 'still holds'}, "
              f"cofactor formula {'fails' if caught[1] else 'still holds'}, {spent:.1f}s")
    assert all(caught)
    assert spent <= 60
