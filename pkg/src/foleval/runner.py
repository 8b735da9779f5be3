"""Per-record evaluation pipeline and corpus-level report assembly.

For each record: score the predicted FOL string's well-formedness, score
predicate similarity and logical equivalence against the reference FOL
when one is present, run the entailment engine for a verdict, and grade
it against the gold label.  Multi-candidate records are scored per
candidate and the one with the best blended conversion score is kept.

Engine failures (unparseable input, blown budgets, inconsistent
premises) never abort a run; they yield compile_error rows.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

from .corpus import CorpusLoad, EvalRecord, RunReport, compute_aggregates
from .entailment import (
    DEFAULT_MAX_DECISIONS, InconsistentPremisesError, align_predicates, entail,
)
from .labels import COMPILE_ERROR
from .metrics import conv_score, pse_score, reason_score
from .semantics import BudgetExceededError, DEFAULT_NODE_BUDGET, le_score
from .syntax import parse
from .wellformed import check_swf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    lambda1: float = 0.5
    seed: int = 42
    closed_world: bool = False
    domain_budget: int = DEFAULT_NODE_BUDGET
    max_decisions: int | None = DEFAULT_MAX_DECISIONS
    jobs: int = 1
    fmt: str = "jsonl"

    def to_dict(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "seed": self.seed,
            "closed_world": self.closed_world,
            "domain_budget": self.domain_budget,
            "max_decisions": self.max_decisions,
            "jobs": self.jobs,
            "format": self.fmt,
        }


def _score_candidate(text: str, gold_formula, gold_present: bool,
                     config: RunConfig):
    """(swf, pse, le, conv, parsed-formula-or-None) for one candidate."""
    swf = check_swf(text).score
    parsed = parse(text)
    formula = parsed.formula
    if gold_present:
        pse = pse_score(gold_formula, formula)
        le = le_score(gold_formula, formula, seed=config.seed,
                      budget=config.domain_budget)
        conv = conv_score(swf, pse, le, config.lambda1).conv
    else:
        pse = le = conv = None
    return swf, pse, le, conv, formula


def evaluate_record(record: EvalRecord, config: RunConfig) -> dict:
    flags: set[str] = set()

    gold_formula = None
    gold_present = record.gold_fol_query is not None
    if gold_present:
        gold_parsed = parse(record.gold_fol_query)
        gold_formula = gold_parsed.formula
        if not gold_parsed.ok:
            flags.add("gold_parse_failed")

    scored = [_score_candidate(text, gold_formula, gold_present, config)
              for text in record.fol_query]
    best_index = max(
        range(len(scored)),
        key=lambda i: (scored[i][3] if scored[i][3] is not None else -1.0,
                       -i))
    swf, pse, le, conv, pred_formula = scored[best_index]
    if pred_formula is None:
        flags.add("pred_parse_failed")

    premises = []
    premises_ok = True
    for text in record.fol_premises:
        parsed = parse(text)
        if parsed.ok:
            premises.append(parsed.formula)
        else:
            premises_ok = False
            flags.add("premise_parse_failed")

    if premises_ok and pred_formula is not None:
        try:
            kb, query = align_predicates(premises, pred_formula)
            verdict = entail(kb, query,
                             closed_world=config.closed_world,
                             budget=config.domain_budget,
                             max_decisions=config.max_decisions)
            predicted_label = verdict.outcome
        except BudgetExceededError:
            predicted_label = COMPILE_ERROR
            flags.add("budget_exceeded")
        except InconsistentPremisesError:
            predicted_label = COMPILE_ERROR
            flags.add("inconsistent_premises")
    else:
        predicted_label = COMPILE_ERROR

    return {
        "id": record.id,
        "gold_label": record.gold_label,
        "predicted_label": predicted_label,
        "candidate_index": best_index,
        "swf": swf,
        "pse": pse,
        "le": le,
        "conv": conv,
        "reason": reason_score(predicted_label, record.gold_label),
        "flags": sorted(flags),
    }


def evaluate_corpus(load: CorpusLoad, config: RunConfig) -> RunReport:
    """Evaluate every record; rows keep corpus order whatever the job count."""
    if config.jobs > 1 and len(load.records) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(partial(evaluate_record, config=config),
                                 load.records))
    else:
        rows = [evaluate_record(record, config) for record in load.records]
    aggregates, confusion = compute_aggregates(rows)
    report_config = config.to_dict()
    report_config["skipped_lines"] = len(load.errors)
    return RunReport(config=report_config, records=rows,
                     aggregates=aggregates, confusion=confusion)
