"""Three-way entailment over a finite constant domain.

Pipeline: align predicate spellings across the knowledge base, ground
premises and query over the combined constant domain, then run two
satisfiability checks — premises ∧ ¬query and premises ∧ query.
(unsat, sat) means the query is entailed (True); (sat, unsat) means its
negation is (False); (sat, sat) is Uncertain with a counterexample model;
(unsat, unsat) means the premises themselves are inconsistent.

An optional closed-world mode treats each predicate that occurs in at
least one ground atomic fact as completely specified: every ground atom
of such a predicate not asserted among the facts is added negated.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .labels import COMPILE_ERROR, FALSE, TRUE, UNCERTAIN
from .sat import CnfBuilder, model_to_interpretation, solve
from .semantics import (
    BudgetExceededError, DEFAULT_NODE_BUDGET, GroundAtom, Interpretation,
    Signature, collect_signature, count_nodes, ground,
)
from .syntax import (
    Atom, BINARY_NODES, Constant, Diagnostic, Formula, Not, Variable,
    pretty, universal_closure,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_DECISIONS = 2_000_000


class InconsistentPremisesError(Exception):
    """premises ∧ query and premises ∧ ¬query are both unsatisfiable."""


@dataclass(frozen=True)
class KnowledgeBase:
    """Aligned premises plus the signature they induce."""

    premises: tuple[Formula, ...]
    signature: Signature
    alignment_log: tuple[tuple[str, str], ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Verdict:
    outcome: str                     # true | false | uncertain | compile_error
    support: tuple[int, ...] | None = None       # premise indexes (True/False)
    counterexample: Interpretation | None = None  # model of premises ∧ ¬query
    diagnostics: tuple[Diagnostic, ...] = ()      # compile_error payload
    closed_world: bool = False


def compile_error_verdict(diagnostics) -> Verdict:
    return Verdict(COMPILE_ERROR, diagnostics=tuple(diagnostics))


# ---------------------------------------------------------------------------
# Predicate alignment
# ---------------------------------------------------------------------------

def _normalize_predicate(name: str) -> str:
    """Canonical key: lowercase, underscores dropped, trailing plural trimmed."""
    key = name.lower().replace("_", "")
    if key.endswith("es"):
        key = key[:-2]
    elif key.endswith("s"):
        key = key[:-1]
    return key


def _predicate_occurrences(formula: Formula, counts) -> None:
    if isinstance(formula, Atom):
        counts[(formula.predicate, len(formula.args))] = \
            counts.get((formula.predicate, len(formula.args)), 0) + 1
    elif isinstance(formula, Not):
        _predicate_occurrences(formula.operand, counts)
    elif isinstance(formula, BINARY_NODES):
        _predicate_occurrences(formula.left, counts)
        _predicate_occurrences(formula.right, counts)
    else:
        _predicate_occurrences(formula.body, counts)


def _rename_predicates(formula: Formula, mapping) -> Formula:
    if isinstance(formula, Atom):
        new = mapping.get((formula.predicate, len(formula.args)))
        return Atom(new, formula.args) if new else formula
    if isinstance(formula, Not):
        return Not(_rename_predicates(formula.operand, mapping))
    if isinstance(formula, BINARY_NODES):
        return type(formula)(_rename_predicates(formula.left, mapping),
                             _rename_predicates(formula.right, mapping))
    return type(formula)(formula.var, _rename_predicates(formula.body, mapping))


def align_predicates(premises, query: Formula | None = None):
    """Unify predicate-name variants (plural, casing, underscores).

    Spellings that share a normalized key and an arity are rewritten to one
    canonical spelling: the most frequent original, ties broken
    lexicographically.  A key used at two arities is kept distinct and
    logged as a warning.  Returns (KnowledgeBase, rewritten query).
    """
    counts: dict[tuple[str, int], int] = {}
    for f in premises:
        _predicate_occurrences(f, counts)
    if query is not None:
        _predicate_occurrences(query, counts)

    groups: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for (name, arity), _ in counts.items():
        groups.setdefault((_normalize_predicate(name), arity), []).append((name, arity))

    mapping: dict[tuple[str, int], str] = {}
    log: list[tuple[str, str]] = []
    for members in groups.values():
        canonical = min((m for m in members),
                        key=lambda m: (-counts[m], m[0]))[0]
        for name, arity in members:
            if name != canonical:
                mapping[(name, arity)] = canonical
                log.append((name, canonical))

    warnings = []
    arities_by_key: dict[str, set[int]] = {}
    for key, arity in groups:
        arities_by_key.setdefault(key, set()).add(arity)
    for key, arities in sorted(arities_by_key.items()):
        if len(arities) > 1:
            warnings.append(
                f"predicate group '{key}' is used with arities "
                f"{sorted(arities)}; occurrences kept distinct by arity")

    new_premises = tuple(_rename_predicates(f, mapping) for f in premises)
    new_query = _rename_predicates(query, mapping) if query is not None else None
    kb = KnowledgeBase(
        premises=new_premises,
        signature=collect_signature(new_premises, min_constants=0),
        alignment_log=tuple(sorted(set(log))),
        warnings=tuple(warnings),
    )
    return kb, new_query


# ---------------------------------------------------------------------------
# Entailment
# ---------------------------------------------------------------------------

def _closed_world_literals(grounded_facts, sig: Signature) -> list[Formula]:
    """¬a for every unasserted ground atom of a predicate with ≥1 fact."""
    asserted: set[GroundAtom] = set()
    fact_preds: set[tuple[str, int]] = set()
    for g in grounded_facts:
        if isinstance(g, Atom):
            asserted.add((g.predicate, tuple(t.name for t in g.args)))
            fact_preds.add((g.predicate, len(g.args)))
    literals = []
    for atom in sig.atom_universe():
        name, args = atom
        if (name, len(args)) in fact_preds and atom not in asserted:
            literals.append(Not(Atom(name, tuple(Constant(a) for a in args))))
    return literals


def _prepare(kb: KnowledgeBase, query: Formula, closed_world: bool, budget: int):
    sig = collect_signature(list(kb.premises) + [query], min_constants=1)
    budget_left = budget
    grounded = []
    for f in kb.premises:
        g = ground(universal_closure(f), sig, budget_left)
        budget_left -= count_nodes(g)
        grounded.append(g)
    grounded_query = ground(universal_closure(query), sig, budget_left)
    cwa = _closed_world_literals(grounded, sig) if closed_world else []
    return sig, grounded, grounded_query, cwa


def _check_sat(premise_formulas, query_formula, negate_query: bool,
               universe, max_decisions):
    builder = CnfBuilder()
    for atom in universe:
        builder.var_for(atom)
    for g in premise_formulas:
        builder.add_formula(g)
    if negate_query:
        builder.add_negated(query_formula)
    else:
        builder.add_formula(query_formula)
    return builder, solve(builder.clauses, builder.n_vars, max_decisions)


def _minimize_support(grounded, cwa, query_formula, negate_query,
                      universe, max_decisions) -> tuple[int, ...]:
    """Greedy deletion: drop each premise whose removal keeps the unsat."""
    keep = list(range(len(grounded)))
    for i in range(len(grounded)):
        trial = [grounded[j] for j in keep if j != i]
        _, model = _check_sat(trial + cwa, query_formula, negate_query,
                              universe, max_decisions)
        if model is None:
            keep.remove(i)
    return tuple(keep)


def entail(kb: KnowledgeBase, query: Formula, *, closed_world: bool = False,
           budget: int = DEFAULT_NODE_BUDGET,
           max_decisions: int | None = DEFAULT_MAX_DECISIONS) -> Verdict:
    """Decide True / False / Uncertain for query against kb.

    Free variables anywhere are universally closed; the domain is every
    constant in the premises and query (a fresh one is injected when there
    are none).  Raises InconsistentPremisesError when the premises have no
    model, and BudgetExceededError past the grounding or search budgets.
    """
    sig, grounded, grounded_query, cwa = _prepare(kb, query, closed_world, budget)
    universe = sig.atom_universe()
    builder_against, against = _check_sat(grounded + cwa, grounded_query, True,
                                          universe, max_decisions)
    _, with_query = _check_sat(grounded + cwa, grounded_query, False,
                               universe, max_decisions)
    if against is None and with_query is None:
        raise InconsistentPremisesError(
            "premises are unsatisfiable over the grounded domain")
    if against is None:
        support = _minimize_support(grounded, cwa, grounded_query, True,
                                    universe, max_decisions)
        return Verdict(TRUE, support=support, closed_world=closed_world)
    if with_query is None:
        support = _minimize_support(grounded, cwa, grounded_query, False,
                                    universe, max_decisions)
        return Verdict(FALSE, support=support, closed_world=closed_world)
    counterexample = model_to_interpretation(
        against, builder_against.atom_vars, universe)
    return Verdict(UNCERTAIN, counterexample=counterexample,
                   closed_world=closed_world)


def enumerate_entities(kb: KnowledgeBase, template: Atom, **entail_kwargs) -> set[str]:
    """Constants c for which template[c] is entailed.

    The template must have exactly one variable argument slot.  A
    per-candidate engine error excludes that candidate with a warning.
    """
    slots = [i for i, t in enumerate(template.args) if isinstance(t, Variable)]
    if len(slots) != 1:
        raise ValueError("template must have exactly one variable argument")
    slot = slots[0]
    found: set[str] = set()
    for const in kb.signature.constants:
        args = tuple(Constant(const) if i == slot else t
                     for i, t in enumerate(template.args))
        try:
            verdict = entail(kb, Atom(template.predicate, args), **entail_kwargs)
        except (BudgetExceededError, InconsistentPremisesError) as exc:
            logger.warning("candidate %s skipped: %s", const, exc)
            continue
        if verdict.outcome == TRUE:
            found.add(const)
    return found


# ---------------------------------------------------------------------------
# SMT-LIB export
# ---------------------------------------------------------------------------

_SMT_RESERVED = frozenset({
    "and", "or", "not", "xor", "ite", "let", "forall", "exists", "distinct",
    "true", "false", "assert", "check-sat", "declare-const", "declare-fun",
    "declare-sort", "define-fun", "set-logic", "Bool", "Int", "Entity",
    "as", "par", "match", "exit",
})

_SMT_SIMPLE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _smt_symbol(name: str, taken: set[str]) -> str:
    candidate = re.sub(r"[^A-Za-z0-9_]", "_", name) or "_"
    if candidate[0].isdigit():
        candidate = "_" + candidate
    while candidate in taken or candidate in _SMT_RESERVED:
        candidate += "_"
    taken.add(candidate)
    return candidate


def export_smtlib(kb: KnowledgeBase, query: Formula, *,
                  closed_world: bool = False) -> str:
    """SMT-LIB v2 script testing premises ∧ ¬query, one s-expression per line.

    Constants are declared pairwise distinct and a domain-closure axiom
    restricts the entity sort to exactly them, so a conforming external
    solver agrees with the internal finite-domain check.
    """
    sig = collect_signature(list(kb.premises) + [query], min_constants=1)
    taken: set[str] = set()
    const_syms = {c: _smt_symbol(c, taken) for c in sig.constants}
    pred_syms = {pair: _smt_symbol(pair[0], taken) for pair in sig.predicates}

    def render(f: Formula, env: dict[str, str]) -> str:
        if isinstance(f, Atom):
            sym = pred_syms[(f.predicate, len(f.args))]
            if not f.args:
                return sym
            parts = " ".join(
                env[t.name] if isinstance(t, Variable) else const_syms[t.name]
                for t in f.args)
            return f"({sym} {parts})"
        if isinstance(f, Not):
            return f"(not {render(f.operand, env)})"
        if isinstance(f, BINARY_NODES):
            op = {"And": "and", "Or": "or", "Implies": "=>", "Iff": "="}[
                type(f).__name__]
            return f"({op} {render(f.left, env)} {render(f.right, env)})"
        var = f.var
        while var in taken or var in _SMT_RESERVED or not _SMT_SIMPLE_RE.match(var):
            var = re.sub(r"[^A-Za-z0-9_]", "_", var) + "_"
        quant = "forall" if type(f).__name__ == "ForAll" else "exists"
        return (f"({quant} (({var} Entity)) "
                f"{render(f.body, {**env, f.var: var})})")

    lines = ["(declare-sort Entity 0)"]
    for c in sig.constants:
        lines.append(f"(declare-const {const_syms[c]} Entity)")
    if len(sig.constants) > 1:
        lines.append(f"(assert (distinct {' '.join(const_syms[c] for c in sig.constants)}))")
    for name, arity in sig.predicates:
        domain = " ".join(["Entity"] * arity)
        lines.append(f"(declare-fun {pred_syms[(name, arity)]} ({domain}) Bool)")
    closure_var = "e"
    while closure_var in taken:
        closure_var += "_"
    eqs = [f"(= {closure_var} {const_syms[c]})" for c in sig.constants]
    body = eqs[0] if len(eqs) == 1 else f"(or {' '.join(eqs)})"
    lines.append(f"(assert (forall (({closure_var} Entity)) {body}))")
    if closed_world:
        grounded = [ground(universal_closure(f), sig) for f in kb.premises]
        for lit in _closed_world_literals(grounded, sig):
            lines.append(f"(assert {render(lit, {})})")
    for premise in kb.premises:
        lines.append(f"(assert {render(universal_closure(premise), {})})")
    lines.append(f"(assert (not {render(universal_closure(query), {})}))")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Explanations
# ---------------------------------------------------------------------------

def _render_ground_atom(atom: GroundAtom) -> str:
    name, args = atom
    return f"{name}({', '.join(args)})" if args else name


def explain(verdict: Verdict, kb: KnowledgeBase, query: Formula) -> str:
    """Deterministic human-readable account of an entailment verdict.

    The Final Answer line is the yes/no reading "is the query entailed?",
    so both a refuted and an undecided query render as False.
    """
    lines = [f"Verdict: {verdict.outcome}", f"Query: {pretty(query)}"]
    if verdict.outcome == COMPILE_ERROR:
        lines.append("The input could not be parsed:")
        lines.extend(f"  {d}" for d in verdict.diagnostics)
        lines.append("Final Answer: compile_error")
        return "\n".join(lines)
    if verdict.closed_world:
        lines.append("Closed-world mode: unasserted facts of predicates "
                     "with stated facts are taken as false.")
    if verdict.outcome == TRUE:
        lines.append("The query follows from the premises.")
        lines.extend(_support_lines(verdict, kb))
        lines.append("Final Answer: True")
    elif verdict.outcome == FALSE:
        lines.append("The premises entail the negation of the query.")
        lines.extend(_support_lines(verdict, kb))
        lines.append("Final Answer: False")
    else:
        lines.append("Not entailed: the premises admit a counterexample "
                     "that falsifies the query.")
        true_atoms = [a for a, v in verdict.counterexample.items() if v]
        lines.append("Counterexample (true ground atoms):")
        if true_atoms:
            lines.extend(f"  {_render_ground_atom(a)}" for a in true_atoms)
        else:
            lines.append("  (none: every ground atom is false)")
        lines.append("Final Answer: False")
    return "\n".join(lines)


def _support_lines(verdict: Verdict, kb: KnowledgeBase) -> list[str]:
    refuting = verdict.outcome == FALSE
    if not verdict.support:
        if verdict.closed_world:
            return [("Refuted" if refuting else "Entailed")
                    + " by the closed-world completion alone; no stated "
                      "premise is needed."]
        if refuting:
            return ["Refuted using no premises (the query is unsatisfiable)."]
        return ["Entailed using no premises (the query is a tautology)."]
    lines = ["Premises contradicting the query (minimal set):" if refuting
             else "Minimal supporting premises:"]
    for i in verdict.support:
        lines.append(f"  [{i + 1}] {pretty(kb.premises[i])}")
    return lines
