"""Translation-quality metrics: PSE, the blended conversion score,
the graded reasoning score, and Spearman rank correlation between them.

Predicate similarity uses a deterministic hashed character-trigram
embedding, so Student/Students style variants score high without any
learned model; the embedder is a plain callable and can be swapped out.
"""

from __future__ import annotations

import math
import re
import zlib
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .labels import COMPILE_ERROR, GOLD_LABELS, PREDICTED_LABELS
from .syntax import Formula, predicates_of

EMBEDDING_DIM = 512

_CAMEL_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_SPACE_RE = re.compile(r"\s+")


def _name_tokens(name: str) -> str:
    """'HasCert' and 'has_cert' both become 'has cert'."""
    s = _CAMEL_RE.sub(" ", name).replace("_", " ")
    return _SPACE_RE.sub(" ", s).strip().lower()


def embed_predicate(name: str, dim: int = EMBEDDING_DIM) -> np.ndarray:
    """L2-normalized bag of hashed character trigrams of the padded name."""
    text = "#" + _name_tokens(name) + "#"
    vec = np.zeros(dim)
    for i in range(len(text) - 2):
        bucket = zlib.crc32(text[i:i + 3].encode("utf-8")) % dim
        vec[bucket] += 1.0
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def pse_score(gold: Formula | None, pred: Formula | None,
              embed=embed_predicate) -> float:
    """Alignment-based predicate-vocabulary similarity in [0, 1].

    The predicate name sets of both formulas are matched one-to-one by
    maximizing total cosine similarity; unmatched names on either side
    contribute nothing, and the sum is divided by the larger set size.
    """
    if gold is None or pred is None:
        return 0.0
    gold_names = sorted({name for name, _ in predicates_of(gold)})
    pred_names = sorted({name for name, _ in predicates_of(pred)})
    if not gold_names and not pred_names:
        return 1.0
    if not gold_names or not pred_names:
        return 0.0
    gold_vecs = np.stack([embed(n) for n in gold_names])
    pred_vecs = np.stack([embed(n) for n in pred_names])
    sim = np.clip(gold_vecs @ pred_vecs.T, 0.0, 1.0)
    rows, cols = linear_sum_assignment(sim, maximize=True)
    return float(sim[rows, cols].sum() / max(len(gold_names), len(pred_names)))


@dataclass(frozen=True)
class ConvBreakdown:
    swf: float
    pse: float
    le: float
    lambda1: float
    lambda2: float
    conv: float


def conv_score(swf: float, pse: float, le: float,
               lambda1: float = 0.5) -> ConvBreakdown:
    """Blend: lambda1 * harmonic_mean(swf, le) + lambda2 * pse.

    The harmonic term is 0 when swf + le == 0, and lambda2 = 1 - lambda1.
    """
    for name, value in (("swf", swf), ("pse", pse), ("le", le),
                        ("lambda1", lambda1)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {value}")
    lambda2 = 1.0 - lambda1
    harmonic = 0.0 if swf + le == 0 else (2.0 * swf * le) / (swf + le)
    return ConvBreakdown(swf, pse, le, lambda1, lambda2,
                         lambda1 * harmonic + lambda2 * pse)


def reason_score(predicted: str, gold: str, s_max: float = 1.0,
                 s_mid: float = 0.5, s_min: float = 0.0) -> float:
    """Full credit for a match, partial for a wrong-but-executed verdict,
    none for a compile error."""
    if predicted not in PREDICTED_LABELS:
        raise ValueError(f"unknown predicted label {predicted!r}")
    if gold not in GOLD_LABELS:
        raise ValueError(f"unknown gold label {gold!r}")
    if predicted == COMPILE_ERROR:
        return s_min
    return s_max if predicted == gold else s_mid


def _average_ranks(values) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1  # 1-based average rank across the tie block
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def srho_score(conv: list[float], reason: list[float]) -> float:
    """Spearman rank correlation between paired score lists.

    Average ranks handle ties; without ties this equals the closed form
    1 - 6*sum(d^2)/(n*(n^2-1)).  Degenerate input (zero rank variance on
    either side) returns 0.0; pair it with srho_degenerate() to flag that.
    """
    if len(conv) != len(reason):
        raise ValueError("score lists must have equal length")
    n = len(conv)
    if n < 2:
        raise ValueError("need at least two samples")
    rx = _average_ranks(conv)
    ry = _average_ranks(reason)
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return 0.0
    return cov / math.sqrt(vx * vy)


def srho_degenerate(conv, reason) -> bool:
    """True when either list is constant, which makes rank correlation
    undefined (srho_score returns 0.0 in that case)."""
    return len(set(conv)) <= 1 or len(set(reason)) <= 1
