"""Shared test helpers: a seeded random formula generator."""

import random

from foleval.syntax import (
    And, Atom, Constant, Exists, ForAll, Iff, Implies, Not, Or, Variable,
)

PREDICATES = [
    ("p", 1), ("q", 1), ("r", 2), ("s", 0), ("likes", 2), ("big", 1),
]
CONSTANTS = ["a", "b", "c", "alice", "cs101"]
VAR_NAMES = ["x", "y", "z", "w"]
FREE_VAR_NAMES = ["u", "v", "w", "x", "y", "z"]


def random_term(rng: random.Random, bound: list[str], allow_free: bool):
    roll = rng.random()
    if bound and roll < 0.5:
        return Variable(rng.choice(bound))
    if allow_free and roll < 0.6:
        return Variable(rng.choice(FREE_VAR_NAMES))
    return Constant(rng.choice(CONSTANTS))


def random_atom(rng: random.Random, bound: list[str], allow_free: bool):
    name, arity = rng.choice(PREDICATES)
    args = tuple(random_term(rng, bound, allow_free) for _ in range(arity))
    return Atom(name, args)


def random_formula(rng: random.Random, max_depth: int = 6, closed: bool = True,
                   _bound: list[str] | None = None):
    """Random AST of depth <= max_depth.

    closed=True keeps every variable occurrence under a binder, which the
    well-formedness invariant needs; closed=False sprinkles in free
    variables from the u..z convention.
    """
    bound = [] if _bound is None else _bound
    if max_depth <= 0 or rng.random() < 0.25:
        return random_atom(rng, bound, allow_free=not closed)
    kind = rng.randrange(7)
    if kind == 0:
        return Not(random_formula(rng, max_depth - 1, closed, bound))
    if kind in (1, 2, 3, 4):
        node = (And, Or, Implies, Iff)[kind - 1]
        return node(random_formula(rng, max_depth - 1, closed, bound),
                    random_formula(rng, max_depth - 1, closed, bound))
    node = ForAll if kind == 5 else Exists
    var = rng.choice(VAR_NAMES)
    return node(var, random_formula(rng, max_depth - 1, closed, bound + [var]))
