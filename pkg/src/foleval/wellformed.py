"""Six-criterion syntactic well-formedness scoring for raw FOL strings.

Each criterion is a binary check; the score is the fraction passed.  The
checks run at token level wherever possible so that strings which fail to
parse are still scored criterion by criterion, and a defect in one
criterion does not bleed into the others.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import BINARY_TOKEN_KINDS, Diagnostic, Token, free_vars, lex, parse

CRITERIA = (
    "variable_charset",
    "variable_defined",
    "operator_validity",
    "parentheses",
    "comparison_symbols",
    "special_characters",
)

_LOWER_RE = re.compile(r"[a-z]+\Z")

# token kinds that may end / begin an operand of a binary connective
_OPERAND_END = frozenset({"ident", "quoted", "rparen"})
_OPERAND_START = frozenset({"ident", "quoted", "lparen", "not", "forall", "exists"})


@dataclass(frozen=True)
class SwfCriterion:
    id: str
    passed: bool
    evidence: Diagnostic | None = None


@dataclass(frozen=True)
class SwfResult:
    criteria: tuple[SwfCriterion, ...]

    @property
    def score(self) -> float:
        return sum(c.passed for c in self.criteria) / 6

    @property
    def failed(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.criteria if not c.passed)

    def criterion(self, cid: str) -> SwfCriterion:
        return next(c for c in self.criteria if c.id == cid)


def check_swf(text: str) -> SwfResult:
    """Score text against all six criteria; never raises."""
    tokens, lex_diags = lex(text)
    if not tokens:
        empty = Diagnostic("empty_input", "input is empty", 0, len(text))
        return SwfResult(tuple(SwfCriterion(cid, False, empty) for cid in CRITERIA))

    binder_names, binder_fail = _scan_binders(tokens)
    paren_fail, arg_positions = _scan_parentheses(tokens)
    result = parse(text)

    checks = {
        "variable_charset": binder_fail,
        "variable_defined": _check_variable_defined(
            text, tokens, result, binder_names, arg_positions),
        "operator_validity": _check_operators(tokens),
        "parentheses": paren_fail,
        "comparison_symbols": _first_lex_diag(lex_diags, "comparison_symbol"),
        "special_characters": _first_lex_diag(lex_diags, "special_character")
                              or _first_lex_diag(lex_diags, "quoted_constant"),
    }
    return SwfResult(tuple(
        SwfCriterion(cid, checks[cid] is None, checks[cid]) for cid in CRITERIA))


def _first_lex_diag(diags, code):
    for d in diags:
        if d.code == code:
            return d
    return None


def _scan_binders(tokens: list[Token]):
    """Collect quantifier-bound names; flag any not matching [a-z]+.

    Bound occurrences always share their binder's spelling, so checking the
    binder position covers the whole criterion.
    """
    names: set[str] = set()
    evidence = None
    for i, tok in enumerate(tokens):
        if tok.kind in ("forall", "exists") and i + 1 < len(tokens):
            nxt = tokens[i + 1]
            if nxt.kind == "ident":
                names.add(nxt.text)
                if evidence is None and not _LOWER_RE.match(nxt.text):
                    evidence = Diagnostic(
                        "variable_charset",
                        f"bound variable '{nxt.text}' must contain only "
                        f"lowercase letters", nxt.start, nxt.end)
    return names, evidence


def _scan_parentheses(tokens: list[Token]):
    """Balance plus placement: argument lists may hold only terms and commas.

    Returns (evidence-or-None, arg_position_indexes) where the index set
    marks tokens directly inside a predicate argument list.
    """
    evidence = None
    stack: list[str] = []  # "args" | "group"
    open_spans: list[Token] = []
    arg_positions: set[int] = set()
    prev_kind = None
    prev_prev_kind = None
    for i, tok in enumerate(tokens):
        if tok.kind == "lparen":
            is_args = prev_kind == "ident" and prev_prev_kind not in ("forall", "exists")
            if stack and stack[-1] == "args" and evidence is None:
                evidence = Diagnostic(
                    "parentheses",
                    "misplaced parenthesis inside an argument list",
                    tok.start, tok.end)
            stack.append("args" if is_args else "group")
            open_spans.append(tok)
        elif tok.kind == "rparen":
            if not stack:
                if evidence is None:
                    evidence = Diagnostic(
                        "parentheses", "extra closing parenthesis",
                        tok.start, tok.end)
            else:
                stack.pop()
                open_spans.pop()
        else:
            if stack and stack[-1] == "args":
                arg_positions.add(i)
                if evidence is None and (tok.kind in BINARY_TOKEN_KINDS
                                         or tok.kind in ("not", "forall", "exists")):
                    evidence = Diagnostic(
                        "parentheses",
                        f"misplaced parenthesis: operator '{tok.text}' occurs "
                        f"inside an argument list", tok.start, tok.end)
        prev_prev_kind = prev_kind
        prev_kind = tok.kind
    if evidence is None and stack:
        tok = open_spans[-1]
        evidence = Diagnostic(
            "parentheses", "unclosed parenthesis", tok.start, tok.end)
    return evidence, arg_positions


def _check_variable_defined(text, tokens, result, binder_names, arg_positions):
    if result.ok:
        undefined = free_vars(result.formula)
        if not undefined:
            return None
        name = sorted(undefined)[0]
        tok = next((t for t in tokens if t.kind == "ident" and t.text == name),
                   tokens[0])
        return Diagnostic(
            "variable_defined",
            f"variable '{name}' is used but never defined by a quantifier",
            tok.start, tok.end)
    # Unparseable input: best effort — a lone lowercase letter in argument
    # position with no binder of that name anywhere looks like an
    # undefined variable.
    for i in sorted(arg_positions):
        tok = tokens[i]
        if (tok.kind == "ident" and len(tok.text) == 1 and tok.text.islower()
                and tok.text not in binder_names):
            return Diagnostic(
                "variable_defined",
                f"variable '{tok.text}' is used but never defined by a "
                f"quantifier", tok.start, tok.end)
    return None


def _check_operators(tokens: list[Token]):
    for i, tok in enumerate(tokens):
        prev = tokens[i - 1] if i > 0 else None
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if tok.kind in BINARY_TOKEN_KINDS:
            if prev is None or prev.kind not in _OPERAND_END:
                return Diagnostic(
                    "operator_validity",
                    f"operator '{tok.text}' is missing its left operand",
                    tok.start, tok.end)
            if nxt is None or nxt.kind not in _OPERAND_START:
                return Diagnostic(
                    "operator_validity",
                    f"operator '{tok.text}' is missing its right operand",
                    tok.start, tok.end)
        elif tok.kind == "not":
            if nxt is None or nxt.kind not in _OPERAND_START:
                return Diagnostic(
                    "operator_validity",
                    f"negation '{tok.text}' is missing its operand",
                    tok.start, tok.end)
        elif tok.kind in ("forall", "exists"):
            if nxt is None or nxt.kind != "ident":
                return Diagnostic(
                    "operator_validity",
                    f"quantifier '{tok.text}' is missing its variable",
                    tok.start, tok.end)
    return None
