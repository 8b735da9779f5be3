"""Lexer, parser, and printer for first-order logic formulas.

The grammar is function-free FOL: predicates over variables and constants,
the usual connectives, and ∀/∃ quantifiers.  Precedence, tightest first:
¬, ∧, ∨, →, then ↔/⊕ on one level; binary connectives associate to the
right; a quantifier's scope extends as far right as possible.  ASCII
aliases (forall, exists, &, |, ~, ->, <->) are accepted alongside the
Unicode spellings, and ⇒ is read as →.  ⊕ is desugared to ¬(a ↔ b) while
parsing, so the AST has exactly the eight node kinds defined below.

Parsing is total: it never raises on any input string, returning a
ParseResult that either holds a formula or a list of diagnostics with
character spans.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

# Unbound single letters from the tail of the alphabet are read as free
# variables (the usual x/y/z convention); every other unbound identifier
# names a constant.  Bound identifiers are always variables.
FREE_VARIABLE_LETTERS = frozenset("uvwxyz")


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Variable:
    name: str

    def __repr__(self):
        return f"Variable({self.name})"


@dataclass(frozen=True)
class Constant:
    name: str

    def __repr__(self):
        return f"Constant({self.name})"


Term = Variable | Constant


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def __repr__(self):
        return f"Atom({self.predicate}/{len(self.args)})"


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Atom | Not | And | Or | Implies | Iff | ForAll | Exists

BINARY_NODES = (And, Or, Implies, Iff)
QUANTIFIER_NODES = (ForAll, Exists)


# ---------------------------------------------------------------------------
# Diagnostics and parse outcomes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    """A parser or lexer finding anchored to a character span of the input."""

    code: str
    message: str
    start: int
    end: int

    def __str__(self):
        return f"[{self.start}:{self.end}] {self.code}: {self.message}"


@dataclass(frozen=True)
class ParseResult:
    """Outcome of parse(): a formula, or diagnostics explaining rejection."""

    formula: Formula | None
    errors: tuple[Diagnostic, ...] = ()
    warnings: tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return self.formula is not None


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

_SINGLE_CHAR = {
    "∀": "forall",
    "∃": "exists",
    "¬": "not",
    "~": "not",
    "∧": "and",
    "&": "and",
    "∨": "or",
    "|": "or",
    "→": "implies",
    "⇒": "implies",
    "↔": "iff",
    "⊕": "xor",
    "(": "lparen",
    ")": "rparen",
    ",": "comma",
}

_KEYWORDS = {"forall": "forall", "exists": "exists"}

BINARY_TOKEN_KINDS = frozenset({"and", "or", "implies", "iff", "xor"})


def lex(text: str) -> tuple[list[Token], list[Diagnostic]]:
    """Tokenize fully; bad characters become tokens plus diagnostics."""
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("<->", i):
            tokens.append(Token("iff", "<->", i, i + 3))
            i += 3
            continue
        if text.startswith("->", i):
            tokens.append(Token("implies", "->", i, i + 2))
            i += 2
            continue
        if ch in _SINGLE_CHAR:
            tokens.append(Token(_SINGLE_CHAR[ch], ch, i, i + 1))
            i += 1
            continue
        if ch in "=<>":
            tokens.append(Token("cmp", ch, i, i + 1))
            diags.append(Diagnostic(
                "comparison_symbol",
                f"comparison symbol '{ch}' is not allowed in a formula",
                i, i + 1))
            i += 1
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j == -1:
                tokens.append(Token("unknown", ch, i, i + 1))
                diags.append(Diagnostic(
                    "special_character", "unterminated quote", i, i + 1))
                i += 1
                continue
            tokens.append(Token("quoted", text[i + 1:j], i, j + 1))
            diags.append(Diagnostic(
                "quoted_constant",
                f"quoted constant {text[i + 1:j]!r}: quotes are stripped",
                i, j + 1))
            i = j + 1
            continue
        m = _WORD_RE.match(text, i)
        if m:
            word = m.group(0)
            tokens.append(Token(_KEYWORDS.get(word, "ident"), word, i, m.end()))
            i = m.end()
            continue
        tokens.append(Token("unknown", ch, i, i + 1))
        diags.append(Diagnostic(
            "special_character", f"unexpected character {ch!r}", i, i + 1))
        i += 1
    return tokens, diags


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _ParseError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class _Parser:
    def __init__(self, tokens: list[Token], input_len: int):
        self.tokens = tokens
        self.pos = 0
        self.input_len = input_len
        self.bound: list[str] = []

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, code, message, tok=None, span=None):
        if span is None:
            span = (tok.start, tok.end) if tok else (self.input_len, self.input_len)
        raise _ParseError(Diagnostic(code, message, span[0], span[1]))

    def parse_formula(self) -> Formula:
        return self.parse_iff()

    def parse_iff(self) -> Formula:
        left = self.parse_implies()
        tok = self.peek()
        if tok and tok.kind == "iff":
            self.take()
            return Iff(left, self.parse_iff())
        if tok and tok.kind == "xor":
            self.take()
            return Not(Iff(left, self.parse_iff()))
        return left

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        tok = self.peek()
        if tok and tok.kind == "implies":
            self.take()
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        tok = self.peek()
        if tok and tok.kind == "or":
            self.take()
            return Or(left, self.parse_or())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        tok = self.peek()
        if tok and tok.kind == "and":
            self.take()
            return And(left, self.parse_and())
        return left

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            self.error("expected_formula", "expected a formula, found end of input")
        if tok.kind == "not":
            self.take()
            return Not(self.parse_unary())
        if tok.kind in ("forall", "exists"):
            quant = self.take()
            var_tok = self.peek()
            if var_tok is None or var_tok.kind != "ident":
                self.error("expected_variable",
                           f"quantifier '{quant.text}' must bind a variable name",
                           var_tok)
            self.take()
            self.bound.append(var_tok.text)
            try:
                body = self.parse_formula()  # scope extends maximally right
            finally:
                self.bound.pop()
            node = ForAll if quant.kind == "forall" else Exists
            return node(var_tok.text, body)
        if tok.kind == "lparen":
            self.take()
            inner = self.parse_formula()
            closer = self.peek()
            if closer is None or closer.kind != "rparen":
                self.error("unbalanced_paren",
                           "missing closing parenthesis", closer,
                           span=(tok.start, tok.end) if closer is None else None)
            self.take()
            return inner
        if tok.kind == "ident":
            return self.parse_atom()
        if tok.kind in BINARY_TOKEN_KINDS:
            self.error("dangling_operator",
                       f"operator '{tok.text}' is missing its left operand", tok)
        self.error("expected_formula", f"expected a formula, found '{tok.text}'", tok)

    def parse_atom(self) -> Atom:
        name = self.take()
        nxt = self.peek()
        if nxt is None or nxt.kind != "lparen":
            return Atom(name.text, ())
        lparen = self.take()
        if self.peek() and self.peek().kind == "rparen":
            rparen = self.take()
            self.error("empty_args",
                       f"predicate '{name.text}' has an empty argument list",
                       span=(lparen.start, rparen.end))
        args = [self.parse_term()]
        while self.peek() and self.peek().kind == "comma":
            self.take()
            args.append(self.parse_term())
        closer = self.peek()
        if closer is None or closer.kind != "rparen":
            self.error("unbalanced_paren",
                       f"missing closing parenthesis after arguments of "
                       f"'{name.text}'", closer)
        self.take()
        return Atom(name.text, tuple(args))

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok is None:
            self.error("expected_term", "expected a term, found end of input")
        if tok.kind == "ident":
            self.take()
            nxt = self.peek()
            if nxt and nxt.kind == "lparen":
                self.error("function_symbol",
                           f"'{tok.text}(...)': function symbols are not "
                           f"supported in argument position", tok)
            return self.resolve_term(tok.text)
        if tok.kind == "quoted":
            self.take()
            return Constant(tok.text)
        self.error("expected_term", f"expected a term, found '{tok.text}'", tok)

    def resolve_term(self, name: str) -> Term:
        if name in self.bound:
            return Variable(name)
        if name in FREE_VARIABLE_LETTERS:
            return Variable(name)
        return Constant(name)


def parse(text: str) -> ParseResult:
    """Parse text into a Formula; total over arbitrary input."""
    tokens, lex_diags = lex(text)
    warnings = [d for d in lex_diags if d.code == "quoted_constant"]
    errors = [d for d in lex_diags if d.code != "quoted_constant"]
    if not tokens:
        errors.append(Diagnostic("empty_input",
                                 "empty input: expected a formula",
                                 0, len(text)))
        return ParseResult(None, tuple(errors), tuple(warnings))
    parser = _Parser(tokens, len(text))
    formula: Formula | None = None
    try:
        formula = parser.parse_formula()
        if parser.pos < len(tokens):
            tok = tokens[parser.pos]
            code = "unbalanced_paren" if tok.kind == "rparen" else "trailing_tokens"
            message = ("extra closing parenthesis" if tok.kind == "rparen"
                       else f"unexpected '{tok.text}' after end of formula")
            raise _ParseError(Diagnostic(code, message, tok.start, tok.end))
    except _ParseError as exc:
        errors.append(exc.diagnostic)
        formula = None
    if errors:
        return ParseResult(None, tuple(errors), tuple(warnings))
    return ParseResult(formula, (), tuple(warnings))


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_OP_SYMBOL = {And: "∧", Or: "∨", Implies: "→", Iff: "↔"}


def pretty(formula: Formula) -> str:
    """Canonical text form; parse(pretty(f)) is structurally equal to f."""
    if isinstance(formula, Atom):
        if formula.args:
            inner = ", ".join(t.name for t in formula.args)
            return f"{formula.predicate}({inner})"
        return formula.predicate
    if isinstance(formula, Not):
        if isinstance(formula.operand, Atom):
            return "¬" + pretty(formula.operand)
        return "¬(" + pretty(formula.operand) + ")"
    if isinstance(formula, QUANTIFIER_NODES):
        sym = "∀" if isinstance(formula, ForAll) else "∃"
        return f"{sym}{formula.var} ({pretty(formula.body)})"
    op = _OP_SYMBOL[type(formula)]
    return f"{_operand(formula.left)} {op} {_operand(formula.right)}"


def _operand(f: Formula) -> str:
    # Binary and quantified subformulas need parentheses to survive
    # re-parsing under right associativity and maximal quantifier scope.
    s = pretty(f)
    if isinstance(f, BINARY_NODES) or isinstance(f, QUANTIFIER_NODES):
        return "(" + s + ")"
    return s


# ---------------------------------------------------------------------------
# Structural helpers
# ---------------------------------------------------------------------------

def free_vars(formula: Formula) -> set[str]:
    """Variables occurring outside the scope of any binder for their name."""
    out: set[str] = set()

    def walk(f: Formula, bound: frozenset[str]) -> None:
        if isinstance(f, Atom):
            for t in f.args:
                if isinstance(t, Variable) and t.name not in bound:
                    out.add(t.name)
        elif isinstance(f, Not):
            walk(f.operand, bound)
        elif isinstance(f, BINARY_NODES):
            walk(f.left, bound)
            walk(f.right, bound)
        else:
            walk(f.body, bound | {f.var})

    walk(formula, frozenset())
    return out


def constants_of(formula: Formula) -> list[str]:
    """Constant names in first-occurrence order."""
    seen: dict[str, None] = {}

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            for t in f.args:
                if isinstance(t, Constant):
                    seen.setdefault(t.name)
        elif isinstance(f, Not):
            walk(f.operand)
        elif isinstance(f, BINARY_NODES):
            walk(f.left)
            walk(f.right)
        else:
            walk(f.body)

    walk(formula)
    return list(seen)


def predicates_of(formula: Formula) -> list[tuple[str, int]]:
    """(name, arity) pairs in first-occurrence order, deduplicated."""
    seen: dict[tuple[str, int], None] = {}

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            seen.setdefault((f.predicate, len(f.args)))
        elif isinstance(f, Not):
            walk(f.operand)
        elif isinstance(f, BINARY_NODES):
            walk(f.left)
            walk(f.right)
        else:
            walk(f.body)

    walk(formula)
    return list(seen)


def normalize_variables(formula: Formula) -> Formula:
    """Alpha-rename bound variables to v0, v1, ... in pre-order binder order.

    Names already taken by constants or free variables of the formula are
    skipped so renaming never captures; the result is logically equivalent
    and the operation is idempotent.
    """
    avoid = set(constants_of(formula)) | free_vars(formula)
    counter = [0]

    def fresh() -> str:
        while True:
            name = f"v{counter[0]}"
            counter[0] += 1
            if name not in avoid:
                return name

    def walk(f: Formula, env: dict[str, str]) -> Formula:
        if isinstance(f, Atom):
            args = tuple(
                Variable(env[t.name]) if isinstance(t, Variable) and t.name in env
                else t
                for t in f.args)
            return Atom(f.predicate, args)
        if isinstance(f, Not):
            return Not(walk(f.operand, env))
        if isinstance(f, BINARY_NODES):
            return type(f)(walk(f.left, env), walk(f.right, env))
        new_name = fresh()
        return type(f)(new_name, walk(f.body, {**env, f.var: new_name}))

    return walk(formula, {})


def universal_closure(formula: Formula) -> Formula:
    """Bind every free variable with a universal quantifier (sorted order)."""
    closed = formula
    for name in sorted(free_vars(formula), reverse=True):
        closed = ForAll(name, closed)
    return closed
