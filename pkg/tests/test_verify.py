from __future__ import annotations

import json

import pytest

from hispin.params import SpaceParams
from hispin.verify import (
    REGISTRY,
    SUITES,
    Context,
    Grid,
    catalog,
    resolve,
    run_suite,
    test_functions as make_tests,
    verify_identity,
    _finish,
    _jobs,
    _run_cases,
)


def run_one(name, m, k, **kw):
    return verify_identity(REGISTRY[name], Context(SpaceParams(m, k), **kw))


def test_dirac_square_passes():
    r = run_one("dirac_square_is_minus_laplacian", 3, 1)
    assert r.status == "pass" and r.cases > 0


def test_grand_identity_passes_at_low_degree():
    r = run_one("D3_conformal_commutator", 3, 1, xdeg=2)
    assert r.status == "pass"


def test_perturbed_coefficient_is_caught_with_witness():
    r = run_one("mutant_D3_conformal_commutator_6_to_5", 3, 1)
    assert r.kind == "mutation"
    assert r.outcome == "violated"
    assert r.status == "pass"
    assert r.witness and "case" in r.witness


def test_guarded_point_skips_loudly():
    r = run_one("D3_conformal_commutator", 4, 1)
    assert r.status == "skip"
    assert "m+6k-10" in r.reason


def test_observation_never_fails_the_run():
    rep = run_suite(["D2_P1_form_trailing_Dx"], Grid(ms=(3,), ks=(1,)))
    assert rep.checks[0].kind == "observe"
    assert rep.exit_code == 0


def test_lemmas3_suite_at_3_1():
    rep = run_suite(["lemmas3"], Grid(ms=(3,), ks=(1,)))
    asserted = [c for c in rep.checks if c.kind == "assert"]
    assert len(asserted) == 7
    assert all(c.status == "pass" for c in asserted)
    assert all(c.status == "pass" for c in rep.checks if c.kind == "mutation")
    assert rep.exit_code == 0


def test_all_at_4_1_skips_D3_and_passes_D4():
    names = [n for n in REGISTRY if n.startswith(("D3_", "D4_")) and REGISTRY[n].kind == "assert"
             and not n.startswith("D4_conformal") and "fundamental" not in n and "reduces" not in n]
    rep = run_suite(names, Grid(ms=(4,), ks=(1,), xdeg=1))
    for c in rep.checks:
        if c.name.startswith("D3_"):
            assert c.status == "skip" and "m+6k-10" in c.reason
        else:
            assert c.status == "pass", c.name


def test_fundsol_suite_at_3_1():
    rep = run_suite(["fundsol"], Grid(ms=(3,), ks=(1,)))
    assert rep.exit_code == 0
    assert {c.status for c in rep.checks} == {"pass"}


def test_report_is_deterministic_modulo_timing():
    grid = Grid(ms=(3,), ks=(1, 2), seed=7)
    a = run_suite(["clifford", "spaces"], grid).to_json(timings=False)
    b = run_suite(["clifford", "spaces"], grid, workers=2).to_json(timings=False)
    assert a == b
    data = json.loads(a)
    assert data["grid"]["seed"] == 7
    assert "millis" not in data["checks"][0]


def test_seed_changes_randomized_checks_only_in_inputs():
    a = run_suite(["clifford_associativity"], Grid(ms=(3,), ks=(0,), seed=1))
    b = run_suite(["clifford_associativity"], Grid(ms=(3,), ks=(0,), seed=2))
    assert a.checks[0].status == b.checks[0].status == "pass"


def test_resolve_rejects_unknown():
    with pytest.raises(KeyError):
        resolve(["nope"])
    assert {c.suite for c in resolve(["all"])} == set(SUITES)


def test_catalog_has_anchor_for_every_check():
    entries = catalog()
    assert len(entries) == len(REGISTRY)
    assert all(e["anchor"] for e in entries)


def test_every_suite_has_a_mutation_control():
    kinds = {}
    for c in REGISTRY.values():
        kinds.setdefault(c.suite, set()).add(c.kind)
    assert all("mutation" in kinds[s] for s in SUITES)


def test_test_functions_include_sentinel_blades():
    p = SpaceParams(3, 1)
    plain = make_tests(p, "M", 1, False)
    full = make_tests(p, "M", 1, True)
    assert len(full) > len(plain)
    assert all(f in full for f in plain)


def test_float_mode_runs():
    r = run_one("D3_conformal_commutator", 3, 1, xdeg=2, mode="float")
    assert r.status == "pass"


@pytest.mark.parametrize("name", ["D3_rotation_invariance_orbital_only", "D4_euler_relation"])
def test_shards_merge_like_an_unsplit_run(name):
    check = REGISTRY[name]
    ctx = Context(SpaceParams(3, 1))
    whole = _finish(check, ctx, [_run_cases(check, ctx)])
    split = _finish(check, ctx, [_run_cases(check, ctx, s, 3) for s in range(3)])
    a, b = whole.to_dict(), split.to_dict()
    a.pop("millis"), b.pop("millis")
    assert a == b


def test_heavy_checks_are_sharded_and_ordered_first():
    jobs = _jobs(resolve(["inversion"]), Grid(ms=(3,), ks=(1,)), workers=3)
    heavy = [j for j in jobs if REGISTRY[j[0]].heavy]
    assert heavy and all(j[4] == 3 for j in heavy)
    assert jobs[: len(heavy)] == heavy
