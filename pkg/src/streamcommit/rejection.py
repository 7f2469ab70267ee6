"""Pre-consensus filtering and the consecutive-rejection counter."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .config import DEFAULT_ANNOTATION_PATTERNS, EngineConfig
from .hypothesis import Hypothesis

# (opener, closer) pairs whose span may cover several word tokens,
# e.g. "(upbeat" "music)".
_SPAN_BRACKETS = (("[", "]"), ("(", ")"), ("{", "}"))


class Reason(enum.Enum):
    ANNOTATION = "annotation"
    NO_SPEECH = "no_speech"
    ENERGY = "energy"
    TRANSCRIBER_ERROR = "transcriber_error"


@dataclass(frozen=True)
class GateResult:
    accepted: bool
    reason: Optional[Reason] = None

    def __bool__(self) -> bool:
        return self.accepted


ACCEPT = GateResult(True)


def annotation_mask(tokens: Sequence[str], patterns: Iterable[re.Pattern]) -> list[bool]:
    patterns = list(patterns)
    mask = [any(p.match(t.strip()) for p in patterns) for t in tokens]
    i = 0
    while i < len(tokens):
        tok = tokens[i].strip()
        for opener, closer in _SPAN_BRACKETS:
            if tok.startswith(opener) and not tok.endswith(closer):
                j = i + 1
                while j < len(tokens) and not tokens[j].strip().endswith(closer):
                    j += 1
                if j < len(tokens):
                    for m in range(i, j + 1):
                        mask[m] = True
                    i = j
                break
        i += 1
    return mask


class RejectionFilter:
    """Stateful gate owned by one engine.

    Holds the consecutive-rejection counter ``r``, the dominant language of
    the current segment and the language mismatch run.
    """

    def __init__(self, cfg: Optional[EngineConfig] = None):
        cfg = cfg or EngineConfig()
        self.annotation_patterns = tuple(re.compile(p) for p in
                                         (cfg.annotation_patterns or DEFAULT_ANNOTATION_PATTERNS))
        self.gamma_ann = cfg.gamma_ann
        self.gamma_ns = cfg.gamma_ns
        self.energy_threshold = cfg.energy_threshold
        self.energy_gate_enabled = cfg.energy_gate
        self.hangover_s = cfg.energy_hangover_s
        self.r_max = cfg.r_max
        self.m = cfg.lang_persistence
        self.r = 0
        self.dominant_language: Optional[str] = None
        self.mismatch_run = 0
        self._last_voiced: Optional[float] = None

    def annotation_ratio(self, h: Hypothesis) -> float:
        if not h.words:
            return 0.0
        mask = annotation_mask(h.texts, self.annotation_patterns)
        return sum(mask) / len(mask)

    def energy_open(self, chunk_rms: float, now: Optional[float] = None) -> bool:
        """Energy gate with hangover.

        The gate stays open for ``hangover_s`` after the last decode whose
        incoming audio cleared the threshold, so the words at the end of an
        utterance get one more decode once they are complete.
        """
        if not self.energy_gate_enabled:
            return True
        if chunk_rms >= self.energy_threshold:
            if now is not None:
                self._last_voiced = now
            return True
        return (now is not None and self._last_voiced is not None
                and now - self._last_voiced <= self.hangover_s + 1e-9)

    def gate(self, h: Optional[Hypothesis], chunk_rms: Optional[float] = None,
             now: Optional[float] = None) -> GateResult:
        if chunk_rms is not None and not self.energy_open(chunk_rms, now):
            return GateResult(False, Reason.ENERGY)
        if h is None:
            return ACCEPT
        if h.words and self.annotation_ratio(h) >= self.gamma_ann:
            return GateResult(False, Reason.ANNOTATION)
        if h.no_speech_prob is not None and h.no_speech_prob >= self.gamma_ns:
            return GateResult(False, Reason.NO_SPEECH)
        return ACCEPT

    def record(self, accepted: bool) -> bool:
        """Update the counter; True when a volatile reset is due."""
        self.r = 0 if accepted else self.r + 1
        return self.r > self.r_max

    def reset_counter(self) -> None:
        self.r = 0

    def language_switch(self, h: Hypothesis) -> bool:
        lang = h.language
        if lang is None:
            return False
        if self.dominant_language is None:
            self.dominant_language = lang
            return False
        if lang == self.dominant_language:
            self.mismatch_run = 0
            return False
        self.mismatch_run += 1
        if self.mismatch_run >= self.m:
            self.dominant_language = lang
            self.mismatch_run = 0
            return True
        return False
