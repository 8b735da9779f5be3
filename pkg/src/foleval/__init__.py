"""foleval: first-order-logic parsing, validation, entailment, and scoring."""

from .syntax import (
    And,
    Atom,
    Constant,
    Diagnostic,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    ParseResult,
    Variable,
    free_vars,
    normalize_variables,
    parse,
    pretty,
    universal_closure,
)

__version__ = "0.1.0"

__all__ = [
    "And", "Atom", "Constant", "Diagnostic", "Exists", "ForAll", "Formula",
    "Iff", "Implies", "Not", "Or", "ParseResult", "Variable",
    "free_vars", "normalize_variables", "parse", "pretty",
    "universal_closure", "__version__",
]
