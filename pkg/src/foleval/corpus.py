"""JSONL corpus ingestion and JSON run reports.

Record schema (one JSON object per line): `id`, `fol_premises`,
`fol_query`, `gold_label`, plus optional `nl_premises`, `nl_query`, and
`gold_fol_query`.  Field aliases cover the public FOLIO release
(premises-FOL, conclusion-FOL, label, ...), and FOLIO's "Unknown" label
maps to "uncertain".  `fol_query` may be a list of candidate strings.

Reports serialize with sorted keys and a trailing newline so identical
runs produce byte-identical files; loading a report recomputes its
aggregates from the per-record rows and refuses inconsistent files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .labels import GOLD_LABELS, PREDICTED_LABELS, normalize_label
from .metrics import srho_degenerate, srho_score

# canonical field -> accepted spellings, first match wins
_FIELD_ALIASES = {
    "id": ("id", "example_id", "story_id"),
    "fol_premises": ("fol_premises", "premises-FOL"),
    "nl_premises": ("nl_premises", "premises"),
    "fol_query": ("fol_query", "conclusion-FOL"),
    "nl_query": ("nl_query", "conclusion"),
    "gold_fol_query": ("gold_fol_query", "conclusion-FOL"),
    "gold_label": ("gold_label", "label"),
}


@dataclass(frozen=True)
class EvalRecord:
    id: str
    fol_premises: tuple[str, ...]
    fol_query: tuple[str, ...]  # one or more candidate translations
    gold_label: str
    nl_premises: tuple[str, ...] | None = None
    nl_query: str | None = None
    gold_fol_query: str | None = None


@dataclass(frozen=True)
class LineError:
    line: int  # 1-based line number
    message: str


@dataclass
class CorpusLoad:
    records: list[EvalRecord] = field(default_factory=list)
    errors: list[LineError] = field(default_factory=list)


class CorpusError(Exception):
    """File-level ingestion failure (unreadable path, bad report)."""


def _lookup(obj: dict, canonical: str):
    for alias in _FIELD_ALIASES[canonical]:
        if alias in obj:
            return obj[alias]
    return None


def _string_list(value) -> tuple[str, ...] | None:
    if isinstance(value, str):
        # FOLIO sometimes joins premises with newlines
        parts = [p.strip() for p in value.split("\n") if p.strip()]
        return tuple(parts)
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return tuple(value)
    return None


def record_from_json(obj: dict) -> EvalRecord:
    """Build one EvalRecord; raises ValueError naming the offending field."""
    if not isinstance(obj, dict):
        raise ValueError("record must be a JSON object")
    raw_id = _lookup(obj, "id")
    if raw_id is None:
        raise ValueError("missing field 'id'")
    premises = _string_list(_lookup(obj, "fol_premises"))
    if not premises:
        raise ValueError("missing or empty field 'fol_premises'")
    raw_query = _lookup(obj, "fol_query")
    if isinstance(raw_query, str):
        query = (raw_query,)
    else:
        query = _string_list(raw_query)
    if not query:
        raise ValueError("missing or empty field 'fol_query'")
    gold = normalize_label(_lookup(obj, "gold_label"))
    if gold is None:
        raise ValueError("missing or invalid field 'gold_label'")
    if gold not in GOLD_LABELS:
        raise ValueError(f"gold_label must be one of {GOLD_LABELS}")
    nl_premises = _string_list(_lookup(obj, "nl_premises"))
    nl_query = _lookup(obj, "nl_query")
    gold_query = _lookup(obj, "gold_fol_query")
    return EvalRecord(
        id=str(raw_id),
        fol_premises=premises,
        fol_query=query,
        gold_label=gold,
        nl_premises=nl_premises,
        nl_query=nl_query if isinstance(nl_query, str) else None,
        gold_fol_query=gold_query if isinstance(gold_query, str) else None,
    )


def load_corpus(path, fmt: str = "jsonl") -> CorpusLoad:
    """Read records in file order; malformed lines are skipped with errors."""
    if fmt != "jsonl":
        raise CorpusError(f"unsupported corpus format {fmt!r}")
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    load = CorpusLoad()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            load.records.append(record_from_json(obj))
        except (json.JSONDecodeError, ValueError) as exc:
            load.errors.append(LineError(lineno, str(exc)))
    return load


# ---------------------------------------------------------------------------
# Run reports
# ---------------------------------------------------------------------------

_SCORE_FIELDS = ("swf", "pse", "le", "conv", "reason")


@dataclass
class RunReport:
    config: dict
    records: list[dict]
    aggregates: dict | None
    confusion: dict[str, dict[str, int]]

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "aggregates": self.aggregates,
            "confusion": self.confusion,
            "records": self.records,
        }


def empty_confusion() -> dict[str, dict[str, int]]:
    """predicted x gold zero matrix, 4 rows by 3 columns."""
    return {p: {g: 0 for g in GOLD_LABELS} for p in PREDICTED_LABELS}


def compute_aggregates(rows: list[dict]):
    """(aggregates-or-None, confusion) recomputable from per-record rows."""
    confusion = empty_confusion()
    for row in rows:
        predicted = row.get("predicted_label")
        gold = row.get("gold_label")
        if predicted in confusion and gold in GOLD_LABELS:
            confusion[predicted][gold] += 1
    if not rows:
        return None, confusion

    def mean_of(key):
        values = [row[key] for row in rows if row.get(key) is not None]
        return sum(values) / len(values) if values else None

    pairs = [(row["conv"], row["reason"]) for row in rows
             if row.get("conv") is not None and row.get("reason") is not None]
    if len(pairs) >= 2:
        conv_list = [p[0] for p in pairs]
        reason_list = [p[1] for p in pairs]
        srho = srho_score(conv_list, reason_list)
        degenerate = srho_degenerate(conv_list, reason_list)
    else:
        srho, degenerate = None, None
    matches = sum(row.get("predicted_label") == row.get("gold_label")
                  for row in rows)
    aggregates = {
        "n_records": len(rows),
        "accuracy": matches / len(rows),
        "srho": srho,
        "srho_degenerate": degenerate,
    }
    for key in _SCORE_FIELDS:
        aggregates[f"mean_{key}"] = mean_of(key)
    return aggregates, confusion


def write_report(report: RunReport, path) -> None:
    text = json.dumps(report.to_json_dict(), indent=2, sort_keys=True,
                      ensure_ascii=False)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")


def load_report(path) -> RunReport:
    """Load a report and verify its aggregates match its per-record rows."""
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"cannot read report {path}: {exc}") from exc
    for key in ("config", "aggregates", "confusion", "records"):
        if key not in data:
            raise CorpusError(f"report is missing the '{key}' section")
    aggregates, confusion = compute_aggregates(data["records"])
    if aggregates != data["aggregates"] or confusion != data["confusion"]:
        raise CorpusError("report aggregates do not match its records")
    return RunReport(config=data["config"], records=data["records"],
                     aggregates=data["aggregates"], confusion=data["confusion"])
