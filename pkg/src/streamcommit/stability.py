"""Similarity-aware longest common prefix between consecutive hypotheses."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .hypothesis import Hypothesis, WordRecord, normalize_word

WordSeq = Union[Hypothesis, Sequence[WordRecord], Sequence[str]]


def levenshtein(a: str, b: str) -> int:
    """Character edit distance with unit costs (two-row DP)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def _similarity_exact(a: str, b: str) -> Fraction:
    longest = max(len(a), len(b))
    if longest == 0:
        return Fraction(1)
    return Fraction(longest - levenshtein(a, b), longest)


def word_similarity(a: str, b: str) -> float:
    """``1 - lev(a, b) / max(|a|, |b|)``; two empty words are identical."""
    return float(_similarity_exact(a, b))


@dataclass(frozen=True)
class PrefixResult:
    prefix: tuple[WordRecord, ...]
    sigma: float
    k: int
    similarities: tuple[float, ...] = ()


def _norms(seq: WordSeq) -> list[str]:
    if isinstance(seq, Hypothesis):
        return seq.norms
    return [w.norm if isinstance(w, WordRecord) else normalize_word(w) for w in seq]


def sa_prefix(prev: WordSeq, curr: Hypothesis, alpha: float = 0.6,
              theta: float = 0.5) -> PrefixResult:
    """Longest positional prefix on which ``prev`` and ``curr`` agree.

    Position ``i`` extends the prefix only if its word similarity is at
    least ``alpha`` and the running mean similarity including it stays at
    or above ``theta``. Prefix words come from ``curr``; ``sigma`` is the
    mean similarity over them (0 for an empty prefix).
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if not 0 < theta <= 1:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    # Similarities are ratios of small integers; comparing them as exact
    # fractions keeps a running mean that sits exactly on theta from being
    # rounded to the wrong side.
    alpha_q, theta_q = Fraction(alpha), Fraction(theta)
    a = _norms(prev)
    b = curr.norms
    sims: list[Fraction] = []
    total = Fraction(0)
    for x, y in zip(a, b):
        s = _similarity_exact(x, y)
        if s < alpha_q or (total + s) / (len(sims) + 1) < theta_q:
            break
        sims.append(s)
        total += s
    k = len(sims)
    sigma = float(total / k) if k else 0.0
    return PrefixResult(tuple(curr.words[:k]), sigma, k, tuple(float(x) for x in sims))
