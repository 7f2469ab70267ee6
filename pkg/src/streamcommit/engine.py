"""Streaming consensus engine: decode scheduling, rejection, commit-and-slice, timeouts."""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .audio_buffer import ActiveAudioBuffer
from .commit_policy import WAITING, CommitState, Kind, evaluate
from .config import EngineConfig
from .errors import DisambiguationError
from .events import CommitEvent, DecodeRecord, ResetEvent, Segment
from .hypothesis import Hypothesis, WordRecord, resolve_boundary
from .rejection import GateResult, Reason, RejectionFilter

log = logging.getLogger(__name__)

HISTORY_DEPTH = 3
_TIME_EPS = 1e-9

StepEvent = Union[CommitEvent, Segment, ResetEvent]


class Transcriber(ABC):
    """Decoder contract: audio window in, time-aligned hypothesis out.

    Timestamps are relative to the start of ``window``. ``origin_s`` (global
    stream time of the first sample) and ``decode_step`` are passed for
    implementations that need them; a model-backed adapter can ignore both
    but must echo ``decode_step`` on the returned hypothesis.
    """

    @abstractmethod
    def transcribe(self, window: np.ndarray, *, origin_s: float,
                   decode_step: int) -> Hypothesis:
        raise NotImplementedError


@dataclass
class CommittedTranscript:
    """Committed text of the current segment plus the permanent logs."""

    committed_text: list[str] = field(default_factory=list)
    commit_log: list[CommitEvent] = field(default_factory=list)
    last_commit_time: float = 0.0
    segments: list[Segment] = field(default_factory=list)
    finalized_words: int = 0

    @property
    def output_text(self) -> str:
        """All finalized segments followed by the open segment's committed words."""
        parts = [s.text for s in self.segments]
        if self.committed_text:
            parts.append(" ".join(self.committed_text))
        return " ".join(parts)


class StreamingEngine:
    """Single-writer state machine; feed audio with :meth:`step`.

    Decodes are scheduled on stream time every ``cfg.delta_s`` so replays
    are deterministic.
    """

    def __init__(self, transcriber: Transcriber, cfg: Optional[EngineConfig] = None,
                 start_time: float = 0.0):
        self.cfg = cfg or EngineConfig()
        self.transcriber = transcriber
        self.start_time = float(start_time)
        self.buffer = ActiveAudioBuffer(self.cfg.buffer_cap_s, self.cfg.sample_rate, start_time)
        self.history: deque[Hypothesis] = deque(maxlen=HISTORY_DEPTH)
        self.commit_state: CommitState = WAITING
        self.filter = RejectionFilter(self.cfg)
        self.transcript = CommittedTranscript(last_commit_time=self.start_time)
        self.decode_step = 0
        self.decode_log: list[DecodeRecord] = []
        self.segment_id = 0

        # uncommitted words of the latest accepted hypothesis: (text, global end time)
        self._pending: list[tuple[str, float]] = []
        # global time up to which audio still in the buffer is already committed
        self._committed_until: Optional[float] = None
        self._last_time = self.start_time
        self._scheduled = 0
        self._sumsq = 0.0
        self._nsamples = 0

    # ------------------------------------------------------------------ input

    def step(self, chunk, stream_time: float) -> list[StepEvent]:
        """Append one chunk ending at ``stream_time`` and run a decode if one is due."""
        if stream_time <= self._last_time:
            raise ValueError(f"stream_time must increase (got {stream_time} after {self._last_time})")
        self.buffer.append(chunk)
        x = np.asarray(chunk, dtype=np.float64).ravel()
        self._sumsq += float(np.dot(x, x))
        self._nsamples += x.size
        self._last_time = stream_time

        events: list[StepEvent] = []
        if stream_time + _TIME_EPS >= self._next_decode_time():
            while self._next_decode_time() <= stream_time + _TIME_EPS:
                self._scheduled += 1
            events.extend(self._decode(stream_time))
        return events

    def finish(self, now: Optional[float] = None) -> list[StepEvent]:
        """Close the stream: finalize whatever is committed or pending as a segment."""
        now = self._last_time if now is None else now
        events = self._finalize(now, "flush", include_pending=True)
        self._clear_volatile()
        return events

    def _next_decode_time(self) -> float:
        return self.start_time + (self._scheduled + 1) * self.cfg.delta_s

    # ----------------------------------------------------------------- decode

    def _interval_rms(self) -> float:
        rms = math.sqrt(self._sumsq / self._nsamples) if self._nsamples else 0.0
        self._sumsq, self._nsamples = 0.0, 0
        return rms

    def _decode(self, now: float) -> list[StepEvent]:
        self.decode_step += 1
        step = self.decode_step
        rms = self._interval_rms()
        window_s = self.buffer.duration_s
        events: list[StepEvent] = []
        h: Optional[Hypothesis] = None
        transcribed = False

        if not self.filter.energy_open(rms, now):
            verdict = GateResult(False, Reason.ENERGY)
        else:
            origin = self.buffer.origin_stream_time
            transcribed = True
            try:
                h = self.transcriber.transcribe(self.buffer.snapshot(), origin_s=origin,
                                                decode_step=step)
            except Exception:  # noqa: BLE001 - any decoder failure is a rejection
                log.warning("transcriber failed at decode %d", step, exc_info=True)
                verdict = GateResult(False, Reason.TRANSCRIBER_ERROR)
            else:
                if h.decode_step != step:
                    log.debug("dropping stale hypothesis for step %d", h.decode_step)
                    self.decode_log.append(DecodeRecord(now, window_s, len(self.buffer), False))
                    return events
                verdict = self.filter.gate(h)
                if verdict.accepted:
                    h = self._strip_overlap(h, origin)
                    self._pending = [(w.text, origin + w.end_s) for w in h.words]
                    self.history.append(h)
                    events.extend(self._consensus(now, window_s))

        interim_offset = self.transcript.finalized_words + len(self.transcript.committed_text)
        interim = tuple(t for t, _ in self._pending) if verdict.accepted else ()

        reset_due = self.filter.record(verdict.accepted)
        if now - self.transcript.last_commit_time >= self.cfg.tau_s - _TIME_EPS:
            events.extend(self.timeout_finalize(now))
        if reset_due:
            events.append(self.hard_reset(now, "rejection"))
        if verdict.accepted and self.filter.language_switch(h):
            events.extend(self._finalize(now, "language", include_pending=False))
            self._clear_volatile()
            events.append(self.hard_reset(now, "language"))

        self.decode_log.append(DecodeRecord(now, window_s, len(self.buffer),
                                            verdict.accepted, interim_offset, interim, transcribed))
        return events

    def _strip_overlap(self, h: Hypothesis, origin: float) -> Hypothesis:
        """Drop leading words that lie in the overlap tail kept after the last slice."""
        if self._committed_until is None:
            return h
        rel = self._committed_until - origin
        skip = 0
        while skip < len(h.words) and h.words[skip].end_s <= rel + 1e-6:
            skip += 1
        if skip == 0:
            return h
        return Hypothesis.from_words(
            ((w.text, w.start_s, w.end_s) for w in h.words[skip:]),
            no_speech_prob=h.no_speech_prob, language=h.language, decode_step=h.decode_step)

    def _consensus(self, now: float, window_s: float) -> list[StepEvent]:
        if len(self.history) < 2:
            return []
        prev, curr = self.history[-2], self.history[-1]

        def ctx_guard(prefix: Sequence[WordRecord]) -> bool:
            try:
                resolve_boundary(curr, prefix)
            except DisambiguationError:
                return False
            return True

        decision, self.commit_state = evaluate(self.commit_state, prev, curr, self.cfg, ctx_guard)
        if decision.kind is not Kind.COMMIT:
            return []
        ev = self.commit_and_slice(decision.prefix, curr, now, decision.tier, window_s)
        return [ev] if ev is not None else []

    # ----------------------------------------------------------- state moves

    def commit_and_slice(self, prefix: Sequence[WordRecord], h: Hypothesis, now: float,
                         tier: Union[int, str] = 1, window_s: float = 0.0
                         ) -> Optional[CommitEvent]:
        """Append ``prefix`` to the committed text and cut the buffer at its last word.

        Returns None (and leaves everything untouched) when the boundary word
        cannot be located in ``h``.
        """
        try:
            i = resolve_boundary(h, prefix)
        except DisambiguationError:
            self.commit_state = WAITING
            return None
        t_end = h.words[i].end_s
        origin = self.buffer.origin_stream_time
        n = math.floor(self.cfg.sample_rate * max(t_end - self.cfg.epsilon_s, 0.0))
        self.buffer.trim_front(n)

        texts = [w.text for w in prefix]
        self.transcript.committed_text.extend(texts)
        self.history.clear()
        self.transcript.last_commit_time = now
        self._committed_until = origin + t_end
        self._pending = [(w.text, origin + w.end_s) for w in h.words[i + 1:]]

        ev = CommitEvent(" ".join(texts), origin + t_end, now, tier, self.segment_id, window_s)
        self.transcript.commit_log.append(ev)
        return ev

    def timeout_finalize(self, now: float) -> list[Segment]:
        """Emit committed text plus the uncommitted tail, then start a new segment."""
        events = self._finalize(now, "timeout", include_pending=True)
        self._clear_volatile()
        self.transcript.last_commit_time = now
        return events

    def hard_reset(self, now: float, reason: str = "rejection") -> ResetEvent:
        """Clear audio, history, stage and rejection counter; committed text survives."""
        self.buffer.clear()
        self.history.clear()
        self.commit_state = WAITING
        self.filter.reset_counter()
        self._committed_until = None
        return ResetEvent(now, reason, self.segment_id)

    def _finalize(self, now: float, reason: str, include_pending: bool) -> list[Segment]:
        committed = self.transcript.committed_text
        pending = self._pending if include_pending else []
        words = committed + [t for t, _ in pending]
        if not words:
            return []
        if pending:
            word_end = pending[-1][1]
        elif self.transcript.commit_log and self.transcript.commit_log[-1].segment_id == self.segment_id:
            word_end = self.transcript.commit_log[-1].word_end_stream_time
        else:
            word_end = None
        seg = Segment(" ".join(words), word_end, now, reason, self.segment_id)
        self.transcript.segments.append(seg)
        self.transcript.finalized_words += len(words)
        self.segment_id += 1
        return [seg]

    def _clear_volatile(self) -> None:
        self.buffer.clear()
        self.history.clear()
        self.commit_state = WAITING
        self.transcript.committed_text = []
        self._pending = []
        self._committed_until = None
        self.transcript.last_commit_time = self._last_time
