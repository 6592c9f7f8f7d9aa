import math
from fractions import Fraction

import pytest

from colorcs import verify as vf
from colorcs.models import ModelWorkspace


@pytest.fixture(scope="module")
def ws112():
    return ModelWorkspace(1, 1, 2)


@pytest.fixture(scope="module")
def ws202():
    return ModelWorkspace(2, 0, 2)


def run_one(ws, case_id, **kw):
    cfg = vf.RunConfig(contexts=((ws.n, ws.m, ws.N),), **kw)
    return vf.verify_case(ws, vf.CASES[case_id], cfg)


def test_catalog_names_and_suites():
    ids = vf.case_ids()
    assert len(ids) == len(set(ids)) == 32
    suites = {vf.CASES[c].suite for c in ids}
    assert suites == {"structural", "integrability", "yangian", "loop", "winf"}
    for probe in ("eq2.7", "eq2.17-plain", "eq3.21-alt", "eq3.38",
                  "supercommutation", "p-conjugation", "jp-conservation"):
        assert probe in ids


def test_probe_states_cover_low_degrees(ws112):
    states = list(vf._probe_states(ws112, 2))
    # all monomials of total degree <= 2, for each of the 4 color states
    assert len(states) == math.comb(2 + 2, 2) * 4
    seen = set()
    for psi in states:
        (colors, amp), = psi.items()
        seen.add((colors, str(amp)))
    assert len(seen) == len(states)


def test_expr_bracket_matches_operator_bracket(ws112):
    a = ws112.unit(1, 1, 2)
    b = ws112.unit(2, 2, 1)
    node = vf.Bracket(vf.Leaf(a), vf.Leaf(b))
    assert node.par() == 0
    assert node._sign() == 1  # both operands odd: anticommutator
    assert node.operator() == a.bracket(b)
    assert node.top(0) == a.bracket(b)


def test_expr_apply_matches_collapsed_operator(ws112):
    f = ws112.ctx.field
    expr = vf.Add(
        vf.Bracket(vf.Leaf(ws112.yangian_T(1, 1, 2)),
                   vf.Leaf(ws112.yangian_T(0, 2, 1))),
        vf.Scale(vf.Leaf(ws112.hamiltonian("sutherland")), Fraction(1, 3)),
    )
    psi = {(1, 2): f.monomial({0: 1, 1: 2})}
    via_tree = expr.apply(psi)
    via_op = expr.operator().apply_to(psi)
    assert vf._state_is_zero(vf._state_add(via_tree, via_op, -1))


def test_nested_bracket_apply_never_multiplies(ws112, monkeypatch):
    from colorcs.operators import OperatorSum

    def boom(self, other, min_deriv=None):
        raise AssertionError("action path formed an operator product")

    inner = vf.Bracket(vf.Leaf(ws112.yangian_T(1, 1, 2)),
                       vf.Leaf(ws112.yangian_T(1, 2, 1)))
    outer = vf.Bracket(vf.Leaf(ws112.yangian_T(0, 1, 1)), inner)
    psi = {(1, 2): ws112.ctx.field.one}
    monkeypatch.setattr(OperatorSum, "mul", boom)
    outer.apply(psi)


def test_structural_case_passes(ws112):
    rep = run_one(ws112, "eq2.7")
    assert rep.verdict == "pass"
    assert rep.oracle_agrees
    assert rep.instances == 2 * 16
    assert rep.failed == 0
    assert rep.residual_term_count == 0


def test_braid_instances_need_three_sites(ws112):
    rep2 = run_one(ws112, "eq2.10")
    rep3 = run_one(ModelWorkspace(1, 1, 3), "eq2.10")
    assert rep2.verdict == rep3.verdict == "pass"
    # N=2 has sym+inv only; N=3 adds braid triples
    assert rep3.instances > rep2.instances


def test_plain_formal_unit_fails_with_odd_colors(ws112):
    rep = run_one(ws112, "eq2.17-plain")
    assert rep.verdict == "fail"
    assert rep.failed > 0
    assert rep.residual_term_count > 0
    assert rep.oracle_agrees


def test_plain_formal_unit_holds_on_even_colors(ws202):
    rep = run_one(ws202, "eq2.17-plain")
    assert rep.verdict == "pass"
    assert rep.oracle_agrees


def test_empty_quantifier_below_min_sites():
    ws = ModelWorkspace(1, 1, 1)
    rep = run_one(ws, "eq2.11")
    assert rep.verdict == "empty-quantifier"
    assert rep.instances == 0


def test_single_site_context_still_runs_site_local_cases():
    ws = ModelWorkspace(1, 1, 1)
    rep = run_one(ws, "eq2.7")
    assert rep.verdict == "pass"
    assert rep.instances == 16


def test_sextuple_sample_is_seeded():
    ws = ModelWorkspace(2, 1, 2)
    cfg = vf.RunConfig(seed=7)
    one = list(vf._sextuples(ws, cfg, "eq3.5"))
    two = list(vf._sextuples(ws, cfg, "eq3.5"))
    assert one == two
    assert len(one) == vf.SEXTUPLE_SAMPLE
    assert all(1 <= c <= 3 for tup in one for c in tup)
    other = list(vf._sextuples(ws, vf.RunConfig(seed=8), "eq3.5"))
    assert one != other


def test_sextuples_enumerated_fully_on_two_colors(ws112):
    cfg = vf.RunConfig()
    assert len(list(vf._sextuples(ws112, cfg, "eq3.5"))) == 64


def test_leading_order_case_passes(ws112):
    rep = run_one(ws112, "eq3.34")
    assert rep.verdict == "pass"
    assert rep.oracle_agrees


def test_numeric_coupling_substitution(ws112):
    rep = run_one(ws112, "eq3.3", lam=Fraction(3, 2))
    assert rep.verdict == "pass"
    assert rep.oracle_agrees


def test_term_budget_reports_truncation(ws112):
    rep = run_one(ws112, "eq3.5", term_budget=3)
    assert rep.verdict == "truncated"
    assert "terms" in rep.note


def test_residual_dump_is_bounded(ws112):
    rep = run_one(ws112, "eq2.17-plain", dump_residual=True)
    assert 0 < len(rep.residuals) <= 5
    for entry in rep.residuals:
        assert entry["instance"]
        for term in entry["terms"]:
            assert set(term) == {"num", "den", "word", "deriv"}
            assert len(term["word"]) == 2
            assert len(term["deriv"]) == 2
            assert term["num"] != "0"


def test_run_suite_sorted_and_deterministic():
    cfg = vf.RunConfig(contexts=((2, 0, 2), (1, 1, 2)),
                       cases=("eq3.1", "eq2.7"))
    def strip(reports):
        out = []
        for r in reports:
            d = r.as_dict()
            d.pop("millis")
            out.append(d)
        return out

    one = strip(vf.run_suite(cfg))
    two = strip(vf.run_suite(cfg))
    assert one == two
    keys = [(d["id"], d["n"], d["m"], d["N"]) for d in one]
    assert keys == sorted(keys)
    assert len(one) == 4


def test_parallel_contexts_match_serial():
    base = dict(contexts=((2, 0, 2), (1, 1, 2)), cases=("eq2.7", "eq3.2"))
    serial = vf.run_suite(vf.RunConfig(**base))
    parallel = vf.run_suite(vf.RunConfig(workers=2, **base))

    def strip(reports):
        out = []
        for r in reports:
            d = r.as_dict()
            d.pop("millis")
            out.append(d)
        return out

    assert strip(serial) == strip(parallel)


def test_unknown_case_is_rejected():
    with pytest.raises(KeyError, match="no-such-case"):
        vf.run_suite(vf.RunConfig(cases=("no-such-case",)))


def _report(**kw):
    base = dict(id="eq3.1", suite="yangian", n=1, m=1, N=2,
                verdict="pass", oracle_agrees=True, instances=16,
                failed=0, residual_term_count=0, millis=1)
    base.update(kw)
    return vf.IdentityReport(**base)


def test_manifest_verdict_deviation():
    manifest = {"seed": vf.DEFAULT_SEED, "default": "pass",
                "overrides": {"eq3.1": {"1,1,2": {"verdict": "fail"}}}}
    cfg = vf.RunConfig()
    assert vf.compare_to_manifest([_report()], manifest, cfg)
    assert not vf.compare_to_manifest(
        [_report(verdict="fail")], manifest, cfg)


def test_manifest_residual_count_gated_by_seed():
    manifest = {"seed": vf.DEFAULT_SEED, "default": "pass",
                "overrides": {"eq3.1": {"1,1,2": {
                    "verdict": "fail", "residual_term_count": 9}}}}
    rep = _report(verdict="fail", residual_term_count=5)
    assert vf.compare_to_manifest([rep], manifest, vf.RunConfig())
    shifted = vf.RunConfig(seed=vf.DEFAULT_SEED + 1)
    assert not vf.compare_to_manifest([rep], manifest, shifted)


def test_manifest_flags_oracle_disagreement():
    manifest = {"seed": vf.DEFAULT_SEED, "default": "pass", "overrides": {}}
    rep = _report(oracle_agrees=False)
    out = vf.compare_to_manifest([rep], manifest, vf.RunConfig())
    assert any("double-entry" in line for line in out)
