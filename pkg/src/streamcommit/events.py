"""Event records shared by the engine and the baseline, plus JSONL I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional, Union

from .errors import TraceFormatError


@dataclass(frozen=True)
class CommitEvent:
    text: str
    word_end_stream_time: float
    commit_stream_time: float
    tier: Union[int, str]
    segment_id: int = 0
    window_s: float = 0.0  # duration of the decode window that produced it

    def __post_init__(self):
        if not self.text:
            raise ValueError("commit text must be non-empty")

    type = "commit"

    def to_dict(self) -> dict:
        return {"type": "commit", "text": self.text,
                "word_end_stream_time_s": self.word_end_stream_time,
                "commit_stream_time_s": self.commit_stream_time,
                "tier": self.tier, "segment_id": self.segment_id,
                "window_s": self.window_s}


@dataclass(frozen=True)
class Segment:
    """A finalized unit of output; ``reason`` is timeout, language or flush."""

    text: str
    word_end_stream_time: Optional[float]
    commit_stream_time: float
    reason: str
    segment_id: int

    type = "segment"

    def to_dict(self) -> dict:
        return {"type": "segment", "text": self.text,
                "word_end_stream_time_s": self.word_end_stream_time,
                "commit_stream_time_s": self.commit_stream_time,
                "tier": self.reason, "segment_id": self.segment_id}


@dataclass(frozen=True)
class ResetEvent:
    stream_time: float
    reason: str
    segment_id: int

    type = "reset"

    def to_dict(self) -> dict:
        return {"type": "reset", "text": "", "word_end_stream_time_s": None,
                "commit_stream_time_s": self.stream_time, "tier": self.reason,
                "segment_id": self.segment_id}


@dataclass(frozen=True)
class DecodeRecord:
    """Bookkeeping for one scheduled decode (used by the metrics layer)."""

    stream_time: float
    window_s: float
    buffer_samples: int
    accepted: bool
    interim_offset: int = 0
    interim: tuple[str, ...] = field(default=())
    transcribed: bool = True

    type = "decode"

    def to_dict(self) -> dict:
        return {"type": "decode", "stream_time_s": self.stream_time,
                "window_s": self.window_s, "buffer_samples": self.buffer_samples,
                "accepted": self.accepted, "interim_offset": self.interim_offset,
                "interim": list(self.interim), "transcribed": self.transcribed}


Event = Union[CommitEvent, Segment, ResetEvent, DecodeRecord]


def event_from_dict(d: dict) -> Event:
    try:
        kind = d["type"]
        if kind == "commit":
            return CommitEvent(d["text"], float(d["word_end_stream_time_s"]),
                               float(d["commit_stream_time_s"]), d["tier"],
                               int(d.get("segment_id", 0)), float(d.get("window_s", 0.0)))
        if kind == "segment":
            we = d.get("word_end_stream_time_s")
            return Segment(d["text"], None if we is None else float(we),
                           float(d["commit_stream_time_s"]), str(d["tier"]),
                           int(d["segment_id"]))
        if kind == "reset":
            return ResetEvent(float(d["commit_stream_time_s"]), str(d["tier"]),
                              int(d["segment_id"]))
        if kind == "decode":
            return DecodeRecord(float(d["stream_time_s"]), float(d["window_s"]),
                                int(d["buffer_samples"]), bool(d["accepted"]),
                                int(d.get("interim_offset", 0)),
                                tuple(d.get("interim", ())), bool(d.get("transcribed", True)))
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceFormatError(f"malformed event record {d!r}: {exc}") from exc
    raise TraceFormatError(f"unknown event type {kind!r}")


def dump_event(ev: Event) -> str:
    return json.dumps(ev.to_dict(), ensure_ascii=False, separators=(",", ":"))


def write_events(events: Iterable[Event], out: Union[str, Path, IO[str]]) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as fh:
            write_events(events, fh)
        return
    for ev in events:
        out.write(dump_event(ev) + "\n")


def read_events(path: Union[str, Path]) -> list[Event]:
    return list(iter_events(Path(path).read_text(encoding="utf-8").splitlines()))


def iter_events(lines: Iterable[str]) -> Iterator[Event]:
    for n, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"line {n}: invalid JSON ({exc})") from exc
        if not isinstance(d, dict):
            raise TraceFormatError(f"line {n}: expected a JSON object")
        yield event_from_dict(d)
