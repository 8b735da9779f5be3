"""Propositional DPLL solver over ground atoms.

Ground formulas go through a Tseitin transformation into CNF; the search
is DPLL with unit propagation and conflict-counting branch selection
(variables seen in conflicting clauses are preferred).  Everything is
deterministic: variable numbering follows first-encounter order and ties
break on the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .semantics import BudgetExceededError, GroundAtom, Interpretation
from .syntax import And, Atom, Formula, Iff, Implies, Not, Or

Clause = tuple[int, ...]


@dataclass
class CnfBuilder:
    """Accumulates clauses; maps ground atoms to DIMACS-style variables."""

    atom_vars: dict[GroundAtom, int] = field(default_factory=dict)
    clauses: list[Clause] = field(default_factory=list)
    n_vars: int = 0

    def var_for(self, atom: GroundAtom) -> int:
        v = self.atom_vars.get(atom)
        if v is None:
            self.n_vars += 1
            v = self.n_vars
            self.atom_vars[atom] = v
        return v

    def _aux(self) -> int:
        self.n_vars += 1
        return self.n_vars

    def add_formula(self, formula: Formula) -> None:
        """Assert a quantifier-free formula."""
        self.clauses.append((self._literal(formula),))

    def add_negated(self, formula: Formula) -> None:
        self.clauses.append((-self._literal(formula),))

    def _literal(self, f: Formula) -> int:
        if isinstance(f, Atom):
            return self.var_for((f.predicate, tuple(t.name for t in f.args)))
        if isinstance(f, Not):
            return -self._literal(f.operand)
        a = self._literal(f.left)
        b = self._literal(f.right)
        x = self._aux()
        if isinstance(f, And):
            self.clauses += [(-x, a), (-x, b), (x, -a, -b)]
        elif isinstance(f, Or):
            self.clauses += [(x, -a), (x, -b), (-x, a, b)]
        elif isinstance(f, Implies):
            self.clauses += [(x, a), (x, -b), (-x, -a, b)]
        elif isinstance(f, Iff):
            self.clauses += [(-x, -a, b), (-x, a, -b), (x, a, b), (x, -a, -b)]
        else:
            raise TypeError(f"not a ground formula: {f!r}")
        return x


def solve(clauses: list[Clause], n_vars: int,
          max_decisions: int | None = None) -> dict[int, bool] | None:
    """Satisfying assignment (possibly partial) or None if unsatisfiable."""
    assign: dict[int, bool] = {}
    occ: dict[int, list[int]] = {}  # literal -> clause indexes
    for idx, clause in enumerate(clauses):
        if not clause:
            return None
        for lit in clause:
            occ.setdefault(lit, []).append(idx)
    activity = [0] * (n_vars + 1)
    trail: list[tuple[int, bool]] = []  # (var, was_decision)
    decisions = 0

    def clause_state(idx: int):
        """(satisfied?, sole unassigned literal or None, #unassigned)."""
        unassigned = None
        count = 0
        for lit in clauses[idx]:
            val = assign.get(abs(lit))
            if val is None:
                count += 1
                unassigned = lit
            elif val == (lit > 0):
                return True, None, 0
        return False, unassigned if count == 1 else None, count

    def imply(lit: int, pending: list[int]) -> None:
        assign[abs(lit)] = lit > 0
        trail.append((abs(lit), False))
        pending.append(abs(lit))

    def propagate(pending: list[int], full_scan: bool) -> int | None:
        """Unit propagation to fixpoint; returns a conflict clause index."""
        if full_scan:
            for idx in range(len(clauses)):
                sat, unit, count = clause_state(idx)
                if sat:
                    continue
                if count == 0:
                    return idx
                if unit is not None:
                    imply(unit, pending)
        while pending:
            var = pending.pop()
            falsified = -var if assign[var] else var
            for idx in occ.get(falsified, ()):
                sat, unit, count = clause_state(idx)
                if sat:
                    continue
                if count == 0:
                    return idx
                if unit is not None:
                    imply(unit, pending)
        return None

    def backtrack() -> int | None:
        """Undo through the most recent decision, flipping it to True."""
        while trail:
            var, was_decision = trail.pop()
            flip = was_decision and not assign[var]
            del assign[var]
            if flip:
                # decisions start at False; the flip behaves like an
                # implied assignment at the parent level
                assign[var] = True
                trail.append((var, False))
                return var
        return None

    pending: list[int] = []
    full_scan = True
    while True:
        conflict = propagate(pending, full_scan)
        full_scan = False
        if conflict is not None:
            for lit in clauses[conflict]:
                activity[abs(lit)] += 1
            flipped = backtrack()
            if flipped is None:
                return None
            pending = [flipped]
            continue
        # branch: unassigned variable with top conflict activity, lowest index
        best = None
        for v in range(1, n_vars + 1):
            if v not in assign and (best is None or activity[v] > activity[best]):
                best = v
        if best is None:
            return dict(assign)
        decisions += 1
        if max_decisions is not None and decisions > max_decisions:
            raise BudgetExceededError(
                f"SAT search exceeded {max_decisions} decisions")
        assign[best] = False
        trail.append((best, True))
        pending = [best]


def model_to_interpretation(model: dict[int, bool],
                            atom_vars: dict[GroundAtom, int],
                            universe: list[GroundAtom]) -> Interpretation:
    """Total interpretation over the universe; unconstrained atoms are false."""
    interp: Interpretation = {}
    for atom in universe:
        var = atom_vars.get(atom)
        interp[atom] = model.get(var, False) if var is not None else False
    return interp
