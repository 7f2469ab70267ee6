"""Two-tier commit policy: fast-path agreement and staged 3-way confirmation."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .config import EngineConfig
from .hypothesis import Hypothesis, WordRecord, normalize_word
from .stability import sa_prefix

_HYPHENS = ("-", "‐", "‑")
_ELLIPSES = ("...", "…")
_BRACKETS = {"(": ")", "[": "]", "{": "}"}


class Mode(enum.Enum):
    WAITING = "waiting"
    DETECTED_DUPLICATE = "detected_duplicate"


class Kind(enum.Enum):
    COMMIT = "commit"
    STAGE = "stage"
    HOLD = "hold"
    REJECTED_BY_GUARDRAIL = "rejected_by_guardrail"


@dataclass(frozen=True)
class StagedCandidate:
    words: tuple[WordRecord, ...]
    decode_step: int

    @property
    def text(self) -> str:
        return " ".join(w.norm for w in self.words)


@dataclass(frozen=True)
class CommitState:
    mode: Mode = Mode.WAITING
    staged: Optional[StagedCandidate] = None

    def __post_init__(self):
        if (self.staged is not None) != (self.mode is Mode.DETECTED_DUPLICATE):
            raise ValueError("staged candidate must be present iff mode is DETECTED_DUPLICATE")


WAITING = CommitState()


@dataclass(frozen=True)
class CommitDecision:
    kind: Kind
    prefix: tuple[WordRecord, ...] = ()
    sigma: float = 0.0
    tier: Optional[int] = None

    def __post_init__(self):
        if self.kind in (Kind.COMMIT, Kind.STAGE) and not self.prefix:
            raise ValueError(f"{self.kind.value} decision needs a non-empty prefix")


Word = Union[WordRecord, str]


def _text(w: Word) -> str:
    return w.text if isinstance(w, WordRecord) else w


def prefix_char_length(prefix: Sequence[Word]) -> int:
    """Characters in the normalized prefix joined by single spaces."""
    return len(" ".join(normalize_word(_text(w)) for w in prefix))


def guardrail_tail(prefix: Sequence[Word]) -> bool:
    """False when the last token looks unfinished.

    Disallowed tails: a trailing hyphen, a trailing ellipsis, an opening
    bracket left unclosed, or a token that is empty once stripped.
    """
    if not prefix:
        return False
    tok = _text(prefix[-1]).strip()
    if not tok or not normalize_word(tok) and not any(c.isalnum() for c in tok):
        return False
    if tok.endswith(_HYPHENS) or tok.endswith(_ELLIPSES):
        return False
    for opener, closer in _BRACKETS.items():
        if tok.count(opener) > tok.count(closer):
            return False
    return True


def _always(_prefix) -> bool:
    return True


def evaluate(state: CommitState, prev: Hypothesis, curr: Hypothesis, cfg: EngineConfig,
             ctx_guard: Callable[[Sequence[WordRecord]], bool] = _always
             ) -> tuple[CommitDecision, CommitState]:
    """One transition of the commit state machine.

    ``ctx_guard`` is the timestamp-disambiguation guardrail; the engine
    supplies it because it needs the hypothesis timestamps.
    """

    def passes(p) -> bool:
        return guardrail_tail(p) and ctx_guard(p)

    res = sa_prefix(prev, curr, cfg.alpha, cfg.theta)
    p, sigma = res.prefix, res.sigma
    plen = prefix_char_length(p)
    blocked = False

    if res.k and sigma == 1.0 and plen >= cfg.l1_chars:
        if passes(p):
            return CommitDecision(Kind.COMMIT, p, sigma, tier=1), WAITING
        blocked = True

    after = state
    if state.mode is Mode.DETECTED_DUPLICATE:
        conf = sa_prefix(state.staged.words, curr, cfg.alpha, cfg.theta)
        if conf.k and conf.sigma >= cfg.theta and prefix_char_length(conf.prefix) >= cfg.l2_chars:
            if passes(conf.prefix):
                return CommitDecision(Kind.COMMIT, conf.prefix, conf.sigma, tier=2), WAITING
            blocked = True
        else:
            after = WAITING  # confirmation failed: drop the stale stage

    if after.mode is Mode.WAITING and res.k and sigma >= cfg.theta and plen >= cfg.l2_chars:
        if passes(p):
            staged = StagedCandidate(p, curr.decode_step)
            return (CommitDecision(Kind.STAGE, p, sigma),
                    CommitState(Mode.DETECTED_DUPLICATE, staged))
        blocked = True

    if blocked:
        return CommitDecision(Kind.REJECTED_BY_GUARDRAIL, (), sigma), after
    return CommitDecision(Kind.HOLD, (), sigma), after
