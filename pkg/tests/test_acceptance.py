"""Acceptance suite: one test per release criterion, each printing a
pass/fail line.  Run with `pytest tests/test_acceptance.py -v -s`."""

import itertools
import json
import math
import random
import shutil
import subprocess
import time
from pathlib import Path

import pytest

from foleval.cli import main
from foleval.entailment import (
    InconsistentPremisesError, align_predicates, entail, enumerate_entities,
    explain, export_smtlib,
)
from foleval.metrics import conv_score, reason_score, srho_score
from foleval.semantics import collect_signature, enumerate_models, le_score
from foleval.syntax import (
    And, Atom, Constant, Exists, ForAll, Iff, Implies, Not, Or, Variable,
    parse, pretty, universal_closure,
)
from foleval.wellformed import check_swf

from conftest import random_formula

FIXTURES = Path(__file__).parent.parent / "fixtures"
COURSE = str(FIXTURES / "course_enrollment.fol")
CORPUS = str(FIXTURES / "demo_corpus.jsonl")

COURSE_PREMISES = [
    "enrolled(Alice, cs101)",
    "completed(Bob, cs101)",
    "completed(Charlie, cs101)",
    "completed(Charlie, cs102)",
    "∀x (enrolled(x, cs102) → completed(x, cs101))",
    "∀x (completed(x, cs102) → eligible_ta(x))",
]
THESIS_PREMISE = ("∀x (student(x) ∧ has_cert(x, word) ∧ has_cert(x, excel) "
                  "∧ has_cert(x, powerpoint) → do_thesis(x))")
THESIS_CANDIDATES = [
    "do_thesis(x)",
    "¬has_cert(x, word) ∧ ¬has_cert(x, excel) ∧ ¬has_cert(x, powerpoint) "
    "→ do_thesis(x)",
    "student(x) ∧ ¬has_cert(x, excel) → do_thesis(x)",
]


def check(number, ok, description):
    print(f"\n[criterion {number:>2}] {'PASS' if ok else 'FAIL'} - {description}")
    assert ok, f"criterion {number}: {description}"


def formulas(texts):
    out = []
    for text in texts:
        result = parse(text)
        assert result.ok, (text, result.errors)
        out.append(result.formula)
    return out


def test_criterion_1_course_enrollment_fixture():
    start = time.monotonic()
    kb, q1 = align_predicates(formulas(COURSE_PREMISES),
                              formulas(["completed(Alice, cs101)"])[0])
    v1 = entail(kb, q1, closed_world=True)
    q2 = enumerate_entities(kb, formulas(["eligible_ta(x)"])[0],
                            closed_world=True)
    _, q3 = align_predicates(formulas(COURSE_PREMISES),
                             formulas(["completed(Bob, cs101)"])[0])
    v3 = entail(kb, q3, closed_world=True)
    elapsed = time.monotonic() - start
    check(1, v1.outcome == "false" and q2 == {"Charlie"}
          and v3.outcome == "true" and elapsed < 1.0,
          f"course fixture: Q1=False, Q2={{Charlie}}, Q3=True "
          f"in {elapsed:.3f}s")


def test_criterion_2_certificate_fixture():
    start = time.monotonic()
    outcomes = []
    witness_ok = False
    rendered_ok = False
    for i, candidate in enumerate(THESIS_CANDIDATES):
        kb, q = align_predicates(formulas([THESIS_PREMISE]),
                                 formulas([candidate])[0])
        verdict = entail(kb, q)
        outcomes.append(verdict.outcome)
        if i == 2:
            w = verdict.counterexample
            witness_ok = any(
                w[("student", (c,))]
                and not w[("has_cert", (c, "excel"))]
                and not w[("do_thesis", (c,))]
                for c in ("word", "excel", "powerpoint"))
            rendered_ok = "Final Answer: False" in explain(verdict, kb, q)
    elapsed = time.monotonic() - start
    check(2, outcomes == ["uncertain"] * 3 and witness_ok and rendered_ok
          and elapsed < 1.0,
          "certificate fixture: all three candidates unsat-free (not "
          "entailed), counterexample names a certless student, rendered "
          "Final Answer: False")


def test_criterion_3_six_defect_strings():
    defects = [
        ("∀x (Blake(x → Building(x)))", "parentheses"),
        ("Luxury(x) → Shopping(x)", "variable_defined"),
        ("Wake(hulk) →→ BreakBridge(hulk)", "operator_validity"),
        ("Code(x) ∧ Mac(x))", "parentheses"),
        ("Height(x) > Weight(x)", "comparison_symbols"),
        ("∀x (Reads(x) → Gain?(x))", "special_characters"),
    ]
    ok = True
    for text, named in defects:
        result = check_swf(text)
        ok &= named in result.failed and result.score <= 5 / 6
    for text in ["∀x (p(x) → q(x))", *COURSE_PREMISES, THESIS_PREMISE]:
        ok &= check_swf(text).score == 1.0
    check(3, ok, "each defect string fails its named criterion at <= 5/6; "
                 "well-formed fixtures pass all six")


def test_criterion_4_reason_scoring():
    cases = [(("true", "true"), 1.0), (("false", "true"), 0.5),
             (("compile_error", "false"), 0.0)]
    ok = all(reason_score(p, g) == want for (p, g), want in cases)
    check(4, ok, "graded reasoning credit: match=1.0, wrong-but-"
                 "executable=0.5, compile_error=0.0")


def _random_instance(rng):
    """Premises and a query over <=4 constants and <=4 predicates (arity
    <=2), sized so the brute-force oracle stays fast."""
    while True:
        constants = ["a", "b", "c", "d"][:rng.randrange(1, 5)]
        predicates = [(f"p{i}", rng.choice([0, 1, 1, 2]))
                      for i in range(rng.randrange(1, 5))]
        if sum(len(constants) ** a for _, a in predicates) <= 12:
            break

    def atom(bound):
        name, arity = rng.choice(predicates)
        args = []
        for _ in range(arity):
            if bound and rng.random() < 0.6:
                args.append(Variable(rng.choice(bound)))
            else:
                args.append(Constant(rng.choice(constants)))
        return Atom(name, tuple(args))

    def formula(depth, bound):
        if depth <= 0 or rng.random() < 0.3:
            return atom(bound)
        kind = rng.randrange(7)
        if kind == 0:
            return Not(formula(depth - 1, bound))
        if kind <= 4:
            node = (And, Or, Implies, Iff)[kind - 1]
            return node(formula(depth - 1, bound), formula(depth - 1, bound))
        node = ForAll if kind == 5 else Exists
        var = rng.choice(["x", "y"])
        return node(var, formula(depth - 1, bound + [var]))

    premises = [universal_closure(formula(rng.randrange(0, 3), []))
                for _ in range(rng.randrange(0, 7))]
    query = universal_closure(formula(rng.randrange(1, 3), []))
    return premises, query


def test_criterion_5_oracle_equivalence_500():
    start = time.monotonic()
    rng = random.Random(20250101)
    agreements = 0
    for _ in range(500):
        premises, query = _random_instance(rng)
        kb, q = align_predicates(premises, query)
        sig = collect_signature(list(kb.premises) + [q], min_constants=1)
        against = enumerate_models(list(kb.premises) + [Not(q)], sig, cap=1)
        with_q = enumerate_models(list(kb.premises) + [q], sig, cap=1)
        if not against and not with_q:
            try:
                entail(kb, q)
            except InconsistentPremisesError:
                agreements += 1
            continue
        expected = ("true" if not against
                    else "false" if not with_q else "uncertain")
        agreements += entail(kb, q).outcome == expected
    elapsed = time.monotonic() - start
    check(5, agreements == 500 and elapsed < 60.0,
          f"entailment agrees with brute-force enumeration on "
          f"{agreements}/500 instances in {elapsed:.1f}s")


def _propositional(rng, atoms, depth):
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice(atoms)
    kind = rng.randrange(5)
    if kind == 0:
        return Not(_propositional(rng, atoms, depth - 1))
    node = (And, Or, Implies, Iff)[kind - 1]
    return node(_propositional(rng, atoms, depth - 1),
                _propositional(rng, atoms, depth - 1))


def test_criterion_6_le_against_truth_table_oracle():
    from test_semantics import truth_table_oracle
    rng = random.Random(606)
    atoms = [Atom("p", (Constant("a"),)), Atom("q", (Constant("a"),)),
             Atom("r", (Constant("b"),)), Atom("s", ())]
    ok = True
    for _ in range(200):
        a = _propositional(rng, atoms, rng.randrange(1, 5))
        b = _propositional(rng, atoms, rng.randrange(1, 5))
        ok &= abs(le_score(a, b) - truth_table_oracle(a, b)) <= 1e-12
    equivalences = [
        ("p(a) → q(a)", "¬p(a) ∨ q(a)"),
        ("¬(p(a) ∧ q(a))", "¬p(a) ∨ ¬q(a)"),
        ("¬(p(a) ∨ q(a))", "¬p(a) ∧ ¬q(a)"),
        ("¬(¬p(a))", "p(a)"),
    ]
    for left, right in equivalences:
        ok &= le_score(*formulas([left, right])) == 1.0
    check(6, ok, "logical-equivalence score matches the exhaustive "
                 "truth-table oracle on 200 pairs (1e-12) and scores the "
                 "classical equivalences exactly 1.0")


def test_criterion_7_roundtrip_and_fuzz():
    rng = random.Random(70707)
    ok = True
    for i in range(1000):
        f = random_formula(rng, max_depth=6, closed=(i % 3 != 0))
        reparsed = parse(pretty(f))
        ok &= reparsed.ok and reparsed.formula == f
    crashes = 0
    for _ in range(10000):
        raw = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 60)))
        try:
            parse(raw.decode("latin-1"))
        except Exception:
            crashes += 1
    check(7, ok and crashes == 0,
          "1000 formulas round-trip structurally; 10000 random byte "
          "strings parse without crashing")


def test_criterion_8_rank_correlation():
    rng = random.Random(80808)
    ok = srho_score([0.1, 0.2, 0.3], [0.4, 0.5, 0.6]) == 1.0
    ok &= srho_score([0.1, 0.2, 0.3], [0.9, 0.5, 0.1]) == -1.0
    for _ in range(100):
        n = rng.randrange(2, 20)
        xs = rng.sample(range(10_000), n)
        ys = rng.sample(range(10_000), n)
        rank_x = {v: i + 1 for i, v in enumerate(sorted(xs))}
        rank_y = {v: i + 1 for i, v in enumerate(sorted(ys))}
        d2 = sum((rank_x[a] - rank_y[b]) ** 2 for a, b in zip(xs, ys))
        closed_form = 1 - 6 * d2 / (n * (n * n - 1))
        ok &= abs(srho_score(xs, ys) - closed_form) <= 1e-12
        monotone = lambda v: math.exp(3 * v / 10_000 + 1)
        ok &= abs(srho_score([monotone(v) for v in xs], ys)
                  - srho_score(xs, ys)) <= 1e-12
    check(8, ok, "rank correlation: tie-free closed form to 1e-12, "
                 "monotone-transform invariance, exact +1/-1 extremes")


def test_criterion_9_conv_grid():
    grid = [i / 10 for i in range(11)]
    ok = True
    for a in grid:
        for b in grid:
            for series in (
                [conv_score(x, a, b, 0.5).conv for x in grid],
                [conv_score(a, x, b, 0.5).conv for x in grid],
                [conv_score(a, b, x, 0.5).conv for x in grid],
            ):
                ok &= all(u <= v + 1e-15 for u, v in zip(series, series[1:]))
    ok &= conv_score(1, 1, 1, 0.5).conv == 1.0
    for lam in grid:
        for pse in grid:
            ok &= conv_score(0.0, pse, 0.0, lam).conv == (1 - lam) * pse
    check(9, ok, "conversion score is monotone on the 11x11x11 grid and "
                 "the harmonic-term boundary identities hold exactly")


def _find_smt_solver():
    for name in ("z3", "cvc5"):
        path = shutil.which(name)
        if path:
            return name, path
    return None, None


def test_criterion_10_external_solver_cross_check(tmp_path):
    name, solver = _find_smt_solver()
    if solver is None:
        print("\n[criterion 10] SKIP - no SMT solver (z3/cvc5) on PATH")
        pytest.skip("no SMT solver on PATH")
    suite = []
    course = formulas(COURSE_PREMISES)
    for query_text in ["completed(Alice, cs101)", "completed(Bob, cs101)",
                       "eligible_ta(Charlie)"]:
        for cw in (False, True):
            suite.append((course, query_text, cw))
    for candidate in THESIS_CANDIDATES:
        suite.append((formulas([THESIS_PREMISE]), candidate, False))
    suite.append((formulas(["p(a)"]), "p(a)", False))
    suite.append(([], "p(a)", False))
    suite.append(([], "p(a) ∨ ¬p(a)", False))
    ok = True
    for i, (premises, query_text, cw) in enumerate(suite):
        kb, q = align_predicates(premises, formulas([query_text])[0])
        internal = entail(kb, q, closed_world=cw)
        expected = "unsat" if internal.outcome == "true" else "sat"
        script = tmp_path / f"case{i}.smt2"
        script.write_text(export_smtlib(kb, q, closed_world=cw),
                          encoding="utf-8")
        args = [solver, str(script)] if name == "z3" else [solver, "-q", str(script)]
        out = subprocess.run(args, capture_output=True, text=True, timeout=60)
        answer = out.stdout.strip().splitlines()[-1]
        ok &= answer == expected
    check(10, ok, f"{name} agrees with the internal engine on all "
                  f"{len(suite)} exported scripts")


def test_criterion_11_deterministic_eval(tmp_path, capsys):
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    assert main(["eval", CORPUS, "--closed-world", "--seed", "42",
                 "--report", str(first)]) == 0
    assert main(["eval", CORPUS, "--closed-world", "--seed", "42",
                 "--report", str(second)]) == 0
    capsys.readouterr()
    identical = first.read_bytes() == second.read_bytes()
    report = json.loads(first.read_text(encoding="utf-8"))
    accuracy = report["aggregates"]["accuracy"]
    check(11, identical and accuracy == 1.0,
          "two same-seed corpus evaluations produce byte-identical "
          "reports; fixture corpus scores 100% accuracy")


def test_upper_bound_sanity_on_user_supplied_corpus(monkeypatch):
    import os
    path = os.environ.get("FOLEVAL_FOLIO_PATH")
    if not path:
        pytest.skip("set FOLEVAL_FOLIO_PATH to a FOLIO-format JSONL corpus "
                    "to run the identity-conversion sanity bound")
    from foleval.corpus import load_corpus
    from foleval.runner import RunConfig, evaluate_corpus
    load = load_corpus(path)
    report = evaluate_corpus(load, RunConfig())
    rows = [r for r in report.records if "budget_exceeded" not in r["flags"]]
    matches = sum(r["predicted_label"] == r["gold_label"] for r in rows)
    accuracy = matches / len(rows)
    check("UB", accuracy > 0.85,
          f"identity-conversion reasoning accuracy {accuracy:.3f} on the "
          f"{len(rows)} records within budget")
