import random

import pytest

from foleval.syntax import (
    And, Atom, Constant, Exists, ForAll, Iff, Implies, Not, Or, Variable,
    free_vars, lex, normalize_variables, parse, pretty, universal_closure,
)

from conftest import random_formula


def must_parse(text):
    result = parse(text)
    assert result.ok, result.errors
    return result.formula


class TestParse:
    def test_enrollment_rule(self):
        f = must_parse("∀x (enrolled(x, cs102) → completed(x, cs101))")
        assert f == ForAll("x", Implies(
            Atom("enrolled", (Variable("x"), Constant("cs102"))),
            Atom("completed", (Variable("x"), Constant("cs101")))))

    def test_minimal_atom(self):
        assert must_parse("p(a)") == Atom("p", (Constant("a"),))

    def test_extra_closing_paren_rejected(self):
        text = "Code(x) ∧ Mac(x))"
        result = parse(text)
        assert not result.ok
        (err,) = result.errors
        assert err.code == "unbalanced_paren"
        assert err.start == text.rindex(")")

    def test_ascii_aliases(self):
        assert must_parse("forall x (p(x) -> q(x))") == \
            must_parse("∀x (p(x) → q(x))")
        assert must_parse("~p(a) & q(a) | s") == \
            must_parse("¬p(a) ∧ q(a) ∨ s")
        assert must_parse("p(a) <-> q(a)") == must_parse("p(a) ↔ q(a)")
        assert must_parse("p(a) ⇒ q(a)") == must_parse("p(a) → q(a)")

    def test_xor_desugars(self):
        assert must_parse("p(a) ⊕ q(a)") == \
            Not(Iff(Atom("p", (Constant("a"),)), Atom("q", (Constant("a"),))))

    def test_precedence(self):
        # ¬ then ∧ then ∨ then → then ↔, right associative
        f = must_parse("¬p ∧ q ∨ s → p ↔ q")
        assert isinstance(f, Iff)
        assert isinstance(f.left, Implies)
        assert isinstance(f.left.left, Or)
        assert isinstance(f.left.left.left, And)
        assert isinstance(f.left.left.left.left, Not)
        g = must_parse("p → q → s")
        assert g == Implies(Atom("p"), Implies(Atom("q"), Atom("s")))

    def test_quantifier_scope_maximal(self):
        f = must_parse("∀x p(x) → q(x)")
        assert f == ForAll("x", Implies(Atom("p", (Variable("x"),)),
                                        Atom("q", (Variable("x"),))))

    def test_binder_decides_variables(self):
        # bound occurrences are variables, unbound multi-letter names are
        # constants, unbound u..z single letters are free variables
        f = must_parse("∀x (likes(x, alice))")
        assert f.body.args == (Variable("x"), Constant("alice"))
        g = must_parse("likes(y, hulk)")
        assert g.args == (Variable("y"), Constant("hulk"))
        h = must_parse("likes(a, b)")
        assert h.args == (Constant("a"), Constant("b"))

    def test_quoted_constants_accepted_with_warning(self):
        result = parse('has_cert(x, "word")')
        assert result.ok
        assert result.formula.args[1] == Constant("word")
        assert any(w.code == "quoted_constant" for w in result.warnings)

    def test_rejections(self):
        for text, code in [
            ("p()", "empty_args"),
            ("p(a) ∧", "expected_formula"),
            ("→ p(a)", "dangling_operator"),
            ("p(f(a))", "function_symbol"),
            ("(p(a)", "unbalanced_paren"),
            ("Height(x) > Weight(x)", "comparison_symbol"),
            ("p(a) = q(a)", "comparison_symbol"),
            ("∀x (Reads(x) → Gain?(x))", "special_character"),
            ("", "empty_input"),
            ("   ", "empty_input"),
            ("∀ (p(a))", "expected_variable"),
        ]:
            result = parse(text)
            assert not result.ok, text
            assert any(e.code == code for e in result.errors), (text, result.errors)

    def test_every_error_has_a_span(self):
        for text in ["p(", ")q", "p(a,)", "∀x (p(x)", "p(a) ∧ ∧ q(a)"]:
            result = parse(text)
            assert not result.ok
            for err in result.errors:
                assert 0 <= err.start <= err.end <= len(text)

    def test_deterministic(self):
        text = "∀x (p(x) → q(x)) ∧ s"
        assert parse(text) == parse(text)


class TestPretty:
    def test_atom(self):
        assert pretty(Atom("p", (Constant("a"),))) == "p(a)"
        assert pretty(Atom("s")) == "s"

    def test_quantified_implication(self):
        f = ForAll("x", Implies(Atom("s", (Variable("x"),)),
                                Atom("t", (Variable("x"),))))
        assert pretty(f) == "∀x (s(x) → t(x))"

    def test_negation_parenthesization(self):
        assert pretty(Not(Atom("p", (Constant("a"),)))) == "¬p(a)"
        f = Not(And(Atom("p"), Atom("q")))
        assert pretty(f) == "¬(p ∧ q)"

    def test_roundtrip_1000_random_formulas(self):
        rng = random.Random(20240811)
        for i in range(1000):
            f = random_formula(rng, max_depth=6, closed=(i % 3 != 0))
            reparsed = parse(pretty(f))
            assert reparsed.ok, (pretty(f), reparsed.errors)
            assert reparsed.formula == f, pretty(f)

    def test_fuzz_never_raises(self):
        rng = random.Random(99)
        pool = "pq(),∀∃∧∨¬→↔⊕ ->&|~xyzabAB01_\"<>=?."
        for _ in range(2000):
            text = "".join(rng.choice(pool) for _ in range(rng.randrange(0, 30)))
            parse(text)  # must not raise
        for _ in range(500):
            raw = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 40)))
            parse(raw.decode("latin-1"))


class TestFreeVars:
    def test_examples(self):
        assert free_vars(must_parse("Luxury(x) → Shopping(x)")) == {"x"}
        assert free_vars(must_parse("∀x (p(x))")) == set()
        assert free_vars(must_parse("∀x (r(x, y))")) == {"y"}

    def test_shadowing(self):
        f = must_parse("∀x (p(x) ∧ ∃x (q(x)))")
        assert free_vars(f) == set()


class TestNormalizeVariables:
    def test_single_binder(self):
        f = must_parse("∀y (p(y))")
        assert pretty(normalize_variables(f)) == "∀v0 (p(v0))"

    def test_shadowed_binder(self):
        # derived by hand from the scoping rules: inner binder shadows outer,
        # binders are numbered in pre-order
        f = ForAll("x", Exists("x", Atom("p", (Variable("x"),))))
        normalized = normalize_variables(f)
        assert normalized == ForAll("v0", Exists("v1", Atom("p", (Variable("v1"),))))

    def test_avoids_capturing_constants(self):
        f = must_parse("∀x (r(x, v0))")  # v0 is a constant here
        normalized = normalize_variables(f)
        assert normalized == ForAll("v1", Atom("r", (Variable("v1"), Constant("v0"))))

    def test_idempotent_on_random_formulas(self):
        rng = random.Random(7)
        for _ in range(200):
            f = random_formula(rng, max_depth=5)
            once = normalize_variables(f)
            assert normalize_variables(once) == once


class TestUniversalClosure:
    def test_closes_free_vars(self):
        f = must_parse("Luxury(x) → Shopping(x)")
        assert pretty(universal_closure(f)) == "∀x (Luxury(x) → Shopping(x))"
        g = must_parse("∀x (p(x))")
        assert universal_closure(g) == g
