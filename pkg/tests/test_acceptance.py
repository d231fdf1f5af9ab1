"""Acceptance suite: one PASS/FAIL line per criterion over the default grid.

Runs the full default grid once (m in {3,4,5}, k in {0,1,2}, decisive x-degree)
and judges each criterion from the report.  Run it alone with

    pytest tests/test_acceptance.py -s

or as a script: ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import os
import re
import sys
from dataclasses import dataclass

import pytest

from hispin.params import SpaceParams
from hispin.verify import REGISTRY, CheckResult, Grid, VerificationReport, run_suite

GUARD_REASON = re.compile(r"^m[-+0-9k]* = 0(, m[-+0-9k]* = 0)*$")
# statements that only make sense at some k; skipping elsewhere is not a guard
INAPPLICABLE = {"reduction applies to k = 0 only", "needs k >= 1", "u^2 H_{k-2} is empty for k < 2"}


def explained(c: CheckResult) -> bool:
    return c.reason in INAPPLICABLE or bool(GUARD_REASON.match(c.reason or ""))


def vanishing(c: CheckResult) -> list[str]:
    return SpaceParams(c.params["m"], c.params.get("k", 0)).vanishing(*REGISTRY[c.name].guards)


@dataclass
class Criterion:
    number: int
    title: str
    checks: tuple[str, ...]


CRITERIA = [
    Criterion(1, "Clifford axioms", ("clifford_anticommutation", "clifford_associativity")),
    Criterion(2, "Almansi-Fischer decomposition and dim H_k", ("almansi_fischer_exact", "harmonic_dimension")),
    Criterion(3, "projector laws", ("Pk_idempotent", "P1_idempotent", "P1_kills_u2H")),
    Criterion(4, "commutator lemmas", tuple(
        n for n, c in sorted(REGISTRY.items())
        if n.startswith(("lemma3_", "lemma4_")) and c.kind == "assert")),
    Criterion(5, "grand commutators", ("D3_conformal_commutator", "D4_conformal_commutator")),
    Criterion(6, "symmetry suite", (
        "D3_translation_invariance", "D3_rotation_invariance", "D3_euler_relation",
        "D4_translation_invariance", "D4_rotation_invariance", "D4_rotation_invariance_orbital_only",
        "D4_euler_relation")),
    Criterion(7, "inversions", (
        "J3_squared_is_minus_one", "J4_squared_is_one", "J3_D3_J3_is_r6_D3", "J4_D4_J4_is_r8_D4")),
    Criterion(8, "fundamental solutions", ("D3_fundamental_solution", "D4_fundamental_solution")),
    Criterion(9, "factorizations", ("D3_factorization", "D2_factored_form", "D4_twistor_form")),
    Criterion(10, "reproducing kernels", ("reproducing_kernel_H_k", "reproducing_kernel_M_k")),
    Criterion(11, "k = 0 reductions", ("D3_reduces_to_Dx3", "D4_reduces_to_bilaplacian")),
    Criterion(12, "suite integrity", tuple(n for n, c in sorted(REGISTRY.items()) if c.kind == "mutation")),
]


def judge_asserted(report: VerificationReport, names: tuple[str, ...]) -> tuple[bool, str]:
    """Every run passes or skips loudly, every check passes somewhere, all decisive."""
    problems = []
    for name in names:
        runs = [c for c in report.checks if c.name == name]
        if not runs:
            problems.append(f"{name}: not run")
            continue
        for c in runs:
            if c.status == "fail":
                problems.append(f"{name} {c.params}: {c.witness or c.reason}")
            elif c.status == "skip" and not explained(c):
                problems.append(f"{name} {c.params}: unexplained skip {c.reason!r}")
            elif c.status == "pass" and c.decisive is False:
                problems.append(f"{name} {c.params}: x-degree {c.degree} below decisive")
        if not any(c.status == "pass" for c in runs):
            problems.append(f"{name}: never ran to completion")
    passed = sum(c.status == "pass" for c in report.checks if c.name in names)
    skipped = sum(c.status == "skip" for c in report.checks if c.name in names)
    return not problems, "; ".join(problems[:3]) or f"{passed} runs pass, {skipped} guarded or inapplicable skips"


def judge_integrity(report: VerificationReport, names: tuple[str, ...]) -> tuple[bool, str]:
    """Mutants are caught, and every guarded point is a skip naming its vanishing constants."""
    problems = []
    mutants = [c for c in report.checks if c.name in names]
    problems += [f"{c.name} {c.params}: mutant not detected" for c in mutants if c.status == "fail"]
    if not any(c.status == "pass" for c in mutants):
        problems.append("no mutation control ran")
    guarded = [c for c in report.checks if vanishing(c)]
    for c in guarded:
        if c.status != "skip" or not all(f"{v} = 0" in (c.reason or "") for v in vanishing(c)):
            problems.append(f"{c.name} {c.params}: guarded point not skipped naming {', '.join(vanishing(c))}")
    problems += [f"{c.name} {c.params}: unexplained skip {c.reason!r}" for c in report.checks
                 if c.status == "skip" and not explained(c)]
    at_4_1 = [c for c in guarded if c.name.startswith("D3_") and c.params == {"m": 4, "k": 1}]
    if not at_4_1 or not all("m+6k-10 = 0" in c.reason for c in at_4_1):
        problems.append("D3 checks at (4,1) do not skip naming m+6k-10")
    ran = [c for c in mutants if c.status != "skip"]
    caught = sum(c.status == "pass" for c in ran)
    detail = (f"{caught}/{len(ran)} mutant runs caught, {len(guarded)} guarded runs skipped loudly "
              f"(D3 at (4,1): {len(at_4_1)} skips naming m+6k-10)")
    return not problems, "; ".join(problems[:3]) or detail


def judge(report: VerificationReport, crit: Criterion) -> tuple[bool, str]:
    if crit.number == 12:
        return judge_integrity(report, crit.checks)
    ok, detail = judge_asserted(report, crit.checks)
    if crit.number == 1:
        assoc = [c for c in report.checks if c.name == "clifford_associativity"]
        if not all(c.cases == 1000 for c in assoc):
            ok, detail = False, "associativity did not cover 1000 triples per m"
    if crit.number == 6:
        orbital = [c for c in report.checks if c.name == "D3_rotation_invariance_orbital_only" and c.status != "skip"]
        violated = sum(c.outcome == "violated" for c in orbital)
        detail += (f"; D3 rotation uses Lx+Lu-e_ij/2, orbital-only Lx+Lu observed violated at "
                   f"{violated}/{len(orbital)} points")
    return ok, detail


def default_report() -> VerificationReport:
    return run_suite(["all"], Grid(), workers=os.cpu_count() or 1)


def format_line(crit: Criterion, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {crit.number:2d} ({crit.title}): {detail}"


@pytest.fixture(scope="module")
def report() -> VerificationReport:
    return default_report()


@pytest.mark.slow
@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{c.number:02d}" for c in CRITERIA])
def test_criterion(report, crit, capsys):
    ok, detail = judge(report, crit)
    with capsys.disabled():
        print("\n" + format_line(crit, ok, detail))
    assert ok, detail


def main() -> int:
    rep = default_report()
    results = [(c, *judge(rep, c)) for c in CRITERIA]
    for crit, ok, detail in results:
        print(format_line(crit, ok, detail))
    return 0 if all(ok for _, ok, _ in results) else 1


if __name__ == "__main__":
    sys.exit(main())
