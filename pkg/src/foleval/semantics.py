"""Finite-domain semantics: grounding, evaluation, and logical equivalence.

Quantifiers expand over an explicit constant domain (function-free
Herbrand universe), so every closed formula reduces to a propositional
formula over ground atoms.  A ground atom is the pair
(predicate, argument-name tuple); an interpretation maps every ground
atom of a signature to a truth value.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import random
from dataclasses import dataclass

from .syntax import (
    And, Atom, BINARY_NODES, Constant, Exists, ForAll, Formula, Iff, Implies,
    Not, Or, Variable, constants_of, predicates_of, universal_closure,
)

GroundAtom = tuple[str, tuple[str, ...]]
Interpretation = dict[GroundAtom, bool]

DEFAULT_NODE_BUDGET = 10 ** 6
ORACLE_ATOM_LIMIT = 25
LE_EXHAUSTIVE_ATOM_LIMIT = 20
LE_SAMPLE_COUNT = 2 ** 20


class BudgetExceededError(Exception):
    """Grounding or search would exceed the configured budget."""


class ScaleExceededError(Exception):
    """Instance is too large for the brute-force model enumerator."""


@dataclass(frozen=True)
class Signature:
    """Predicates with arities, plus an ordered constant domain."""

    predicates: tuple[tuple[str, int], ...]
    constants: tuple[str, ...]

    def arity(self, name: str) -> int:
        for pred, arity in self.predicates:
            if pred == name:
                return arity
        raise KeyError(name)

    def atom_universe(self) -> list[GroundAtom]:
        atoms: list[GroundAtom] = []
        for name, arity in self.predicates:
            for args in itertools.product(self.constants, repeat=arity):
                atoms.append((name, args))
        return atoms


def collect_signature(formulas, extra_constants=(), min_constants=1) -> Signature:
    """Union signature of the formulas, in first-occurrence order.

    When no constant occurs anywhere, fresh ones (c0, c1, ...) are injected
    up to min_constants so quantifiers have a nonempty domain.  Predicates
    are keyed by (name, arity); a name used at two arities yields two
    entries, which downstream code treats as distinct atoms.
    """
    preds: dict[tuple[str, int], None] = {}
    consts: dict[str, None] = {}
    for f in formulas:
        for pair in predicates_of(f):
            preds.setdefault(pair)
        for name in constants_of(f):
            consts.setdefault(name)
    for name in extra_constants:
        consts.setdefault(name)
    if not consts:
        fresh = 0
        while len(consts) < min_constants:
            consts.setdefault(f"c{fresh}")
            fresh += 1
    return Signature(tuple(preds), tuple(consts))


# ---------------------------------------------------------------------------
# Grounding
# ---------------------------------------------------------------------------

def ground(formula: Formula, sig: Signature,
           budget: int = DEFAULT_NODE_BUDGET) -> Formula:
    """Expand quantifiers over sig.constants; result is quantifier-free.

    The input must be closed.  Raises BudgetExceededError once the expanded
    tree would exceed `budget` nodes; output is never silently truncated.
    """
    nodes = [0]

    def spend(n=1):
        nodes[0] += n
        if nodes[0] > budget:
            raise BudgetExceededError(
                f"grounded formula exceeds the {budget}-node budget")

    def walk(f: Formula, env: dict[str, str]) -> Formula:
        spend()
        if isinstance(f, Atom):
            args = tuple(
                Constant(env[t.name]) if isinstance(t, Variable) else t
                for t in f.args)
            return Atom(f.predicate, args)
        if isinstance(f, Not):
            return Not(walk(f.operand, env))
        if isinstance(f, BINARY_NODES):
            return type(f)(walk(f.left, env), walk(f.right, env))
        join = And if isinstance(f, ForAll) else Or
        parts = []
        for const in sig.constants:
            parts.append(walk(f.body, {**env, f.var: const}))
        spend(max(len(parts) - 1, 0))
        return functools.reduce(join, parts)

    return walk(formula, {})


def count_nodes(formula: Formula) -> int:
    """Number of formula nodes (terms not counted)."""
    if isinstance(formula, Atom):
        return 1
    if isinstance(formula, Not):
        return 1 + count_nodes(formula.operand)
    if isinstance(formula, BINARY_NODES):
        return 1 + count_nodes(formula.left) + count_nodes(formula.right)
    return 1 + count_nodes(formula.body)


def ground_atoms_of(formula: Formula) -> list[GroundAtom]:
    """Ground atoms occurring in a quantifier-free formula, in order."""
    seen: dict[GroundAtom, None] = {}

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            seen.setdefault((f.predicate, tuple(t.name for t in f.args)))
        elif isinstance(f, Not):
            walk(f.operand)
        else:
            walk(f.left)
            walk(f.right)

    walk(formula)
    return list(seen)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_ground(formula: Formula, interp: Interpretation) -> bool:
    """Boolean value of a quantifier-free formula under an interpretation."""
    if isinstance(formula, Atom):
        return interp[(formula.predicate, tuple(t.name for t in formula.args))]
    if isinstance(formula, Not):
        return not eval_ground(formula.operand, interp)
    if isinstance(formula, And):
        return eval_ground(formula.left, interp) and eval_ground(formula.right, interp)
    if isinstance(formula, Or):
        return eval_ground(formula.left, interp) or eval_ground(formula.right, interp)
    if isinstance(formula, Implies):
        return (not eval_ground(formula.left, interp)) or eval_ground(formula.right, interp)
    if isinstance(formula, Iff):
        return eval_ground(formula.left, interp) == eval_ground(formula.right, interp)
    raise TypeError(f"formula is not ground: {formula!r}")


def eval_formula(formula: Formula, constants, interp: Interpretation,
                 env: dict[str, str] | None = None) -> bool:
    """Direct recursive FOL semantics with quantifiers ranging over constants.

    Kept separate from ground()+eval_ground() on purpose: the two routes
    cross-check each other.
    """
    env = env or {}
    if isinstance(formula, Atom):
        args = tuple(env[t.name] if isinstance(t, Variable) else t.name
                     for t in formula.args)
        return interp[(formula.predicate, args)]
    if isinstance(formula, Not):
        return not eval_formula(formula.operand, constants, interp, env)
    if isinstance(formula, And):
        return (eval_formula(formula.left, constants, interp, env)
                and eval_formula(formula.right, constants, interp, env))
    if isinstance(formula, Or):
        return (eval_formula(formula.left, constants, interp, env)
                or eval_formula(formula.right, constants, interp, env))
    if isinstance(formula, Implies):
        return ((not eval_formula(formula.left, constants, interp, env))
                or eval_formula(formula.right, constants, interp, env))
    if isinstance(formula, Iff):
        return (eval_formula(formula.left, constants, interp, env)
                == eval_formula(formula.right, constants, interp, env))
    if isinstance(formula, ForAll):
        return all(eval_formula(formula.body, constants, interp,
                                {**env, formula.var: c}) for c in constants)
    if isinstance(formula, Exists):
        return any(eval_formula(formula.body, constants, interp,
                                {**env, formula.var: c}) for c in constants)
    raise TypeError(repr(formula))


# ---------------------------------------------------------------------------
# Model enumeration (brute-force oracle)
# ---------------------------------------------------------------------------

def enumerate_models(formulas, sig: Signature, cap: int | None = None,
                     budget: int = DEFAULT_NODE_BUDGET) -> list[Interpretation]:
    """All interpretations of sig satisfying every formula, up to cap.

    Assignments are enumerated in lexicographic order (False before True,
    first universe atom varying slowest).  Only usable on small instances;
    this is the reference oracle, not the production path.
    """
    universe = sig.atom_universe()
    if len(universe) > ORACLE_ATOM_LIMIT:
        raise ScaleExceededError(
            f"{len(universe)} ground atoms exceed the oracle limit of "
            f"{ORACLE_ATOM_LIMIT}")
    grounded = [ground(universal_closure(f), sig, budget) for f in formulas]
    models: list[Interpretation] = []
    for bits in itertools.product((False, True), repeat=len(universe)):
        interp = dict(zip(universe, bits))
        if all(eval_ground(g, interp) for g in grounded):
            models.append(interp)
            if cap is not None and len(models) >= cap:
                break
    return models


# ---------------------------------------------------------------------------
# Logical equivalence score
# ---------------------------------------------------------------------------

def _column_masks(n_atoms: int, rows: int) -> list[int]:
    """Bit columns for exhaustive enumeration: bit j of column i = (j>>i)&1."""
    cols = []
    for i in range(n_atoms):
        period = 2 << i
        block = ((1 << (1 << i)) - 1) << (1 << i)
        col, size = block, period
        while size < rows:
            col |= col << size
            size *= 2
        cols.append(col)
    return cols


def _sampled_column(atom: GroundAtom, seed: int, bits: int) -> int:
    key = f"{seed}|{atom[0]}|{','.join(atom[1])}".encode("utf-8")
    digest = int.from_bytes(hashlib.sha256(key).digest(), "big")
    return random.Random(digest).getrandbits(bits)


def _eval_mask(formula: Formula, cols: dict[GroundAtom, int], full: int) -> int:
    """Evaluate a ground formula over all rows at once via bitmasks."""
    if isinstance(formula, Atom):
        return cols[(formula.predicate, tuple(t.name for t in formula.args))]
    if isinstance(formula, Not):
        return _eval_mask(formula.operand, cols, full) ^ full
    left = _eval_mask(formula.left, cols, full)
    right = _eval_mask(formula.right, cols, full)
    if isinstance(formula, And):
        return left & right
    if isinstance(formula, Or):
        return left | right
    if isinstance(formula, Implies):
        return (left ^ full) | right
    return (left ^ right) ^ full  # Iff


def le_score(gold: Formula | None, pred: Formula | None, seed: int = 42,
             budget: int = DEFAULT_NODE_BUDGET) -> float:
    """Fraction of interpretations on which the two formulas agree.

    Free variables are universally closed first.  The domain is the set of
    constants occurring in either formula, or fresh {c0, c1} when neither
    mentions any.  With at most 20 relevant ground atoms all assignments
    are enumerated; beyond that, 2^20 assignments are sampled with the
    fixed seed.  A missing (unparsed) formula scores 0, as does one whose
    grounding blows the node budget.
    """
    if gold is None or pred is None:
        return 0.0
    gold_closed = universal_closure(gold)
    pred_closed = universal_closure(pred)
    sig = collect_signature([gold_closed, pred_closed], min_constants=2)
    try:
        g = ground(gold_closed, sig, budget)
        p = ground(pred_closed, sig, budget)
    except BudgetExceededError:
        return 0.0
    atoms = ground_atoms_of(g)
    for atom in ground_atoms_of(p):
        if atom not in atoms:
            atoms.append(atom)
    n = len(atoms)
    if n <= LE_EXHAUSTIVE_ATOM_LIMIT:
        rows = 1 << n
        cols = dict(zip(atoms, _column_masks(n, rows)))
    else:
        # Each atom's sample column is derived from the atom's identity so
        # the score is independent of traversal order (symmetry in a, b).
        rows = LE_SAMPLE_COUNT
        cols = {atom: _sampled_column(atom, seed, rows) for atom in atoms}
    full = (1 << rows) - 1
    agree = (_eval_mask(g, cols, full) ^ _eval_mask(p, cols, full)) ^ full
    return agree.bit_count() / rows
