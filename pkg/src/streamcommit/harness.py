"""Deterministic replay of a trace through the engine or the baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .baseline import BaselineEngine
from .config import EngineConfig
from .engine import StreamingEngine
from .events import CommitEvent, DecodeRecord, Event, Segment
from .traces import ScriptedTranscriber, SyntheticTrace

DEFAULT_CHUNK_S = 0.25
SYSTEMS = ("engine", "baseline")


@dataclass
class Session:
    system: str
    events: list[Event]
    output_text: str
    duration_s: float
    max_window_s: float
    max_buffer_samples: int = 0
    reference: list[str] = field(default_factory=list)

    @property
    def commits(self) -> list[CommitEvent]:
        return [e for e in self.events if isinstance(e, CommitEvent)]

    @property
    def segments(self) -> list[Segment]:
        return [e for e in self.events if isinstance(e, Segment)]

    @property
    def decodes(self) -> list[DecodeRecord]:
        return [e for e in self.events if isinstance(e, DecodeRecord)]


def make_system(system: str, trace: SyntheticTrace, cfg: EngineConfig
                ) -> Union[StreamingEngine, BaselineEngine]:
    transcriber = ScriptedTranscriber(trace, cfg.sample_rate)
    if system == "engine":
        return StreamingEngine(transcriber, cfg)
    if system == "baseline":
        return BaselineEngine(transcriber, cfg)
    raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")


def replay(trace: SyntheticTrace, system: str = "engine", cfg: Optional[EngineConfig] = None,
           chunk_s: float = DEFAULT_CHUNK_S, audio: Optional[np.ndarray] = None,
           flush: bool = True) -> Session:
    """Stream ``trace`` (or ``audio``, if given) in fixed chunks and collect every event.

    Decode records are interleaved after the events of the step that
    produced them. Stream time is derived from the sample count.
    """
    cfg = cfg or EngineConfig()
    sr = cfg.sample_rate
    sys_ = make_system(system, trace, cfg)
    total = len(audio) if audio is not None else trace.total_samples(sr)
    n = max(1, int(round(chunk_s * sr)))
    events: list[Event] = []
    max_buf = 0
    seen = 0
    for start in range(0, total, n):
        size = min(n, total - start)
        chunk = audio[start:start + size] if audio is not None else trace.audio(start, size)
        events.extend(sys_.step(chunk, (start + size) / sr))
        if isinstance(sys_, StreamingEngine):
            max_buf = max(max_buf, len(sys_.buffer))
        else:
            max_buf = max(max_buf, sys_.accumulated_samples)
        if len(sys_.decode_log) > seen:
            events.extend(sys_.decode_log[seen:])
            seen = len(sys_.decode_log)
    if flush:
        events.extend(sys_.finish(total / sr))

    if isinstance(sys_, StreamingEngine):
        text = sys_.transcript.output_text
    else:
        text = sys_.output_text
    return Session(system, events, text, total / sr, sys_.transcriber.max_window_s,
                   max_buf, trace.reference)


