"""Naive comparator: unbounded accumulation, full re-decode, VAD-segmented commits."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .config import EngineConfig
from .engine import StepEvent, Transcriber
from .errors import InvalidAudioError
from .events import CommitEvent, DecodeRecord

SILENCE_COMMIT_S = 0.8
FRAME_S = 0.01


class BaselineEngine:
    """Re-decodes everything heard since the last segment boundary every ``delta_s``.

    A segment boundary is declared when at least ``silence_s`` of trailing
    audio sits below the energy threshold (10 ms frame RMS); the whole
    current hypothesis is committed at once and the accumulation cleared.
    """

    def __init__(self, transcriber: Transcriber, cfg: Optional[EngineConfig] = None,
                 silence_s: float = SILENCE_COMMIT_S, start_time: float = 0.0):
        self.cfg = cfg or EngineConfig()
        self.transcriber = transcriber
        self.silence_s = silence_s
        self.sample_rate = self.cfg.sample_rate
        self.frame = max(1, int(round(FRAME_S * self.sample_rate)))
        self.start_time = float(start_time)
        self._acc = np.zeros(self.sample_rate * 8, dtype=np.float32)
        self._nacc = 0
        self._ingested = 0
        self._trailing_silent = 0
        self._last_time = self.start_time
        self._scheduled = 0
        self.decode_step = 0
        self.segment_id = 0
        self.committed: list[str] = []
        self.commit_log: list[CommitEvent] = []
        self.decode_log: list[DecodeRecord] = []
        self._latest = None
        self._latest_origin = self.start_time

    @property
    def accumulated_samples(self) -> int:
        return self._nacc

    @property
    def origin_stream_time(self) -> float:
        return self.start_time + (self._ingested - self._nacc) / self.sample_rate

    @property
    def output_text(self) -> str:
        return " ".join(self.committed)

    def _update_silence(self, x: np.ndarray) -> None:
        thr = self.cfg.energy_threshold
        nf = -(-x.size // self.frame)
        padded = np.zeros(nf * self.frame, dtype=np.float64)
        padded[:x.size] = x
        sizes = np.full(nf, self.frame)
        sizes[-1] = x.size - (nf - 1) * self.frame
        rms = np.sqrt((padded.reshape(nf, self.frame) ** 2).sum(axis=1) / sizes)
        loud = np.flatnonzero(rms >= thr)
        if loud.size == 0:
            self._trailing_silent += x.size
        else:
            self._trailing_silent = int(sizes[loud[-1] + 1:].sum())

    def step(self, chunk, stream_time: float) -> list[StepEvent]:
        if stream_time <= self._last_time:
            raise ValueError(f"stream_time must increase (got {stream_time} after {self._last_time})")
        x = np.asarray(chunk, dtype=np.float32).ravel()
        if x.size == 0 or not np.all(np.isfinite(x)):
            raise InvalidAudioError("audio chunk is empty or non-finite")
        if self._nacc + x.size > self._acc.size:
            grown = np.zeros(max(2 * self._acc.size, self._nacc + x.size), dtype=np.float32)
            grown[:self._nacc] = self._acc[:self._nacc]
            self._acc = grown
        self._acc[self._nacc:self._nacc + x.size] = x
        self._nacc += x.size
        self._ingested += x.size
        self._update_silence(x)
        self._last_time = stream_time

        next_t = self.start_time + (self._scheduled + 1) * self.cfg.delta_s
        if stream_time + 1e-9 < next_t:
            return []
        while self.start_time + (self._scheduled + 1) * self.cfg.delta_s <= stream_time + 1e-9:
            self._scheduled += 1
        return self._decode(stream_time)

    def _window(self) -> np.ndarray:
        return self._acc[:self._nacc]

    def _decode(self, now: float) -> list[StepEvent]:
        self.decode_step += 1
        origin = self.origin_stream_time
        window = self._window()
        window_s = window.size / self.sample_rate
        h = self.transcriber.transcribe(window, origin_s=origin, decode_step=self.decode_step)
        offset = len(self.committed)
        events: list[StepEvent] = []
        if self._trailing_silent >= self.silence_s * self.sample_rate:
            if h.words:
                texts = [w.text for w in h.words]
                ev = CommitEvent(" ".join(texts), origin + h.words[-1].end_s, now, "vad",
                                 self.segment_id, window_s)
                self.committed.extend(texts)
                self.commit_log.append(ev)
                events.append(ev)
                self.segment_id += 1
            self._nacc = 0
            self._latest = None
            interim = ()
        else:
            self._latest, self._latest_origin = h, origin
            interim = tuple(h.texts)
        self.decode_log.append(DecodeRecord(now, window_s, self._nacc, True, offset, interim))
        return events

    def finish(self, now: Optional[float] = None) -> list[StepEvent]:
        """Commit whatever the last decode heard in the open segment."""
        now = self._last_time if now is None else now
        h = self._latest
        self._nacc, self._latest = 0, None
        if h is None or not h.words:
            return []
        texts = [w.text for w in h.words]
        ev = CommitEvent(" ".join(texts), self._latest_origin + h.words[-1].end_s, now, "flush",
                         self.segment_id, 0.0)
        self.committed.extend(texts)
        self.commit_log.append(ev)
        self.segment_id += 1
        return [ev]
