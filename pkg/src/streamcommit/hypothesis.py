"""Time-aligned decoder hypotheses and word-occurrence resolution."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import DisambiguationError

_WS = re.compile(r"\s+")
CONTEXT_WINDOW = 2


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def normalize_word(w: str) -> str:
    """Case-fold, collapse inner whitespace and strip surrounding punctuation.

    >>> normalize_word("Home,")
    'home'
    """
    w = _WS.sub(" ", w).strip()
    start, end = 0, len(w)
    while start < end and _is_punct(w[start]):
        start += 1
    while end > start and _is_punct(w[end - 1]):
        end -= 1
    return w[start:end].strip().casefold()


@dataclass(frozen=True)
class WordRecord:
    text: str
    start_s: float
    end_s: float
    index: int

    @property
    def norm(self) -> str:
        return normalize_word(self.text)


@dataclass(frozen=True)
class Hypothesis:
    """One decode pass: ordered words with buffer-relative timestamps.

    Build through :meth:`from_words` to get index assignment and timestamp
    monotonicity repair; the bare constructor trusts its input.
    """

    words: tuple[WordRecord, ...] = ()
    no_speech_prob: Optional[float] = None
    language: Optional[str] = None
    decode_step: int = 0
    raw_text: str = field(default="")

    @classmethod
    def from_words(cls, items: Iterable[tuple[str, float, float]], *,
                   no_speech_prob: Optional[float] = None,
                   language: Optional[str] = None,
                   decode_step: int = 0) -> "Hypothesis":
        """Build from ``(text, start_s, end_s)`` triples.

        Start times that go backwards are clamped to the previous start, and
        end times are lifted so that ``end >= start`` and ends never decrease.
        """
        records = []
        prev_start = 0.0
        prev_end = 0.0
        for i, (text, start, end) in enumerate(items):
            start = max(float(start), prev_start, 0.0)
            end = max(float(end), start, prev_end)
            records.append(WordRecord(str(text), start, end, i))
            prev_start, prev_end = start, end
        return cls(
            words=tuple(records),
            no_speech_prob=no_speech_prob,
            language=language,
            decode_step=decode_step,
            raw_text=" ".join(r.text for r in records),
        )

    def __len__(self) -> int:
        return len(self.words)

    @property
    def texts(self) -> list[str]:
        return [w.text for w in self.words]

    @property
    def norms(self) -> list[str]:
        return [w.norm for w in self.words]

    def end_time_of(self, i: int) -> float:
        return end_time_of(self, i)


def end_time_of(h: Hypothesis, i: int) -> float:
    if not 0 <= i < len(h.words):
        raise IndexError(f"word index {i} out of range for hypothesis of {len(h.words)} words")
    return h.words[i].end_s


def _context_score(norms: Sequence[str], i: int, left: Sequence[str],
                   right: Sequence[str]) -> int:
    score = 0
    for d, want in enumerate(reversed(left[-CONTEXT_WINDOW:]), start=1):
        j = i - d
        if j >= 0 and norms[j] == want:
            score += 1
    for d, want in enumerate(right[:CONTEXT_WINDOW], start=1):
        j = i + d
        if j < len(norms) and norms[j] == want:
            score += 1
    return score


def disambiguate_occurrence(h: Hypothesis, word: str, committed_tail: Sequence[str],
                            right_context: Sequence[str] = ()) -> int:
    """Pick the occurrence of ``word`` in ``h`` that best matches local context.

    ``committed_tail`` ends with the boundary word itself; the up to two
    words before it are compared against the left neighbours of each
    candidate, nearest first. ``right_context`` (optional) is compared
    against the right neighbours. Ties go to the earliest index.
    """
    target = normalize_word(word)
    norms = h.norms
    candidates = [i for i, n in enumerate(norms) if n == target]
    if not candidates:
        raise DisambiguationError(f"word {word!r} does not occur in hypothesis")
    if len(candidates) == 1:
        return candidates[0]
    left = [normalize_word(w) for w in committed_tail[:-1]] if committed_tail else []
    right = [normalize_word(w) for w in right_context]
    best, best_score = candidates[0], -1
    for i in candidates:
        s = _context_score(norms, i, left, right)
        if s > best_score:
            best, best_score = i, s
    return best


def resolve_boundary(h: Hypothesis, prefix: Sequence[WordRecord]) -> int:
    """Index in ``h`` of the last word of ``prefix``.

    Uses the record's own index when it still points at the same word in
    ``h``, otherwise falls back to context matching on the prefix tail.
    """
    if not prefix:
        raise DisambiguationError("empty prefix has no boundary word")
    last = prefix[-1]
    if 0 <= last.index < len(h.words) and h.words[last.index].norm == last.norm:
        return last.index
    tail = [w.text for w in prefix[-(CONTEXT_WINDOW + 1):]]
    return disambiguate_occurrence(h, last.text, tail)
