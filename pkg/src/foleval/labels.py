"""Three-way entailment labels plus the compile-error bucket."""

TRUE = "true"
FALSE = "false"
UNCERTAIN = "uncertain"
COMPILE_ERROR = "compile_error"

GOLD_LABELS = (TRUE, FALSE, UNCERTAIN)
PREDICTED_LABELS = (TRUE, FALSE, UNCERTAIN, COMPILE_ERROR)

# FOLIO spells the third class "Unknown"; we use "uncertain" throughout.
_ALIASES = {"unknown": UNCERTAIN}


def normalize_label(value) -> str | None:
    """Map a raw label (any casing, FOLIO spellings, JSON bools) to ours."""
    if isinstance(value, bool):
        return TRUE if value else FALSE
    if not isinstance(value, str):
        return None
    lowered = value.strip().lower()
    lowered = _ALIASES.get(lowered, lowered)
    return lowered if lowered in PREDICTED_LABELS else None
