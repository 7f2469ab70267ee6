"""Synthetic traces and the deterministic trace-driven transcriber."""

from __future__ import annotations

import bisect
import json
import random
import wave
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Optional, Sequence, Union

import numpy as np

from .engine import Transcriber
from .errors import TraceFormatError
from .hypothesis import Hypothesis

SAMPLE_RATE = 16000
SPEECH_LEVEL = 0.1
_LETTERS = "abcdefghijklmnopqrstuvwxyz"

VOCABULARY = (
    "a about after again air all also always an and another any are around as ask at away "
    "back be because been before best between big both bring but by call came can car carry "
    "change children city close come could country cut day did different do does down draw "
    "during each early earth end enough even every eye face family far father feet few find "
    "first follow food for form found four from get girl give go good got great group grow had "
    "hand hard has have he head hear help her here high him his home house how idea if important "
    "in into is it just keep kind know land large last late learn leave left let life light like "
    "line list little live long look made make man many may me mean men might mile miss more "
    "most mother mountain move much must my name near need never new next night no not now number "
    "of off often old on once one only open or other our out over own page paper part people "
    "picture place plant play point put question quick quickly read really right river run said "
    "same saw say school sea second see seem sentence set she should show side small so some "
    "something sometimes song soon sound spell start state still stop story study such take talk "
    "tell than that the their them then there these they thing think this those thought three "
    "through time to together too took tree try turn two under until up us use very walk want "
    "was watch water way we well went were what when where which while white who why will with "
    "without word work world would write year you young your"
).split()
ANNOTATIONS = ("[music]", "[applause]", "[laughter]", "(coughs)", "[BLANK_AUDIO]", "[noise]")


@dataclass(frozen=True)
class TraceWord:
    text: str
    start_s: float
    end_s: float
    stabilize_s: Optional[float]  # None: never stabilizes

    @property
    def mid_s(self) -> float:
        return 0.5 * (self.start_s + self.end_s)


@dataclass(frozen=True)
class Span:
    t0: float
    t1: float
    value: Union[float, str]


@dataclass
class SyntheticTrace:
    """Ground-truth word timeline plus the audio-energy and language profiles."""

    words: list[TraceWord]
    rms: list[Span] = field(default_factory=list)
    langs: list[Span] = field(default_factory=list)
    duration_s: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        prev_end = -np.inf
        for w in self.words:
            if w.end_s < w.start_s or w.start_s < 0:
                raise TraceFormatError(f"bad interval for word {w.text!r}")
            if w.start_s < prev_end - 1e-9:
                raise TraceFormatError(f"word {w.text!r} overlaps or is out of order")
            if w.stabilize_s is not None and w.stabilize_s < w.end_s - 1e-9:
                raise TraceFormatError(f"word {w.text!r} stabilizes before it ends")
            prev_end = w.end_s
        if self.duration_s is None:
            last = max([w.end_s for w in self.words] + [s.t1 for s in self.rms] + [0.0])
            self.duration_s = last + 2.0
        self._mids = [w.mid_s for w in self.words]
        rms = self.rms or [Span(w.start_s, w.end_s, SPEECH_LEVEL) for w in self.words]
        self._rms_start = np.array([int(round(s.t0 * SAMPLE_RATE)) for s in rms], dtype=np.int64)
        self._rms_end = np.array([int(round(s.t1 * SAMPLE_RATE)) for s in rms], dtype=np.int64)
        self._rms_level = np.array([float(s.value) for s in rms])
        self._lang_t0 = [s.t0 for s in self.langs]

    @property
    def reference(self) -> list[str]:
        return [w.text for w in self.words]

    def words_in(self, t0: float, t1: float) -> Sequence[TraceWord]:
        """Words whose midpoint falls in ``[t0, t1)``."""
        lo = bisect.bisect_left(self._mids, t0)
        hi = bisect.bisect_left(self._mids, t1)
        return self.words[lo:hi]

    def language_at(self, t: float) -> Optional[str]:
        i = bisect.bisect_right(self._lang_t0, t) - 1
        if i >= 0 and self.langs[i].t0 <= t < self.langs[i].t1 + 1e-9:
            return str(self.langs[i].value)
        return None

    def audio(self, start_sample: int, n: int) -> np.ndarray:
        """Synthesized samples ``[start_sample, start_sample + n)``.

        Each RMS span is rendered as an alternating +/-level square wave so
        that any whole span has exactly its nominal RMS; gaps are silent.
        """
        out = np.zeros(n, dtype=np.float32)
        end_sample = start_sample + n
        i0 = int(np.searchsorted(self._rms_end, start_sample, side="right"))
        for i in range(i0, len(self._rms_level)):
            a, b = self._rms_start[i], self._rms_end[i]
            if a >= end_sample:
                break
            lo, hi = max(a, start_sample), min(b, end_sample)
            if hi > lo:
                out[lo - start_sample:hi - start_sample] = self._rms_level[i]
        sign = np.where((np.arange(start_sample, end_sample) & 1) == 0, 1.0, -1.0)
        return (out * sign).astype(np.float32)

    def total_samples(self, sample_rate: int = SAMPLE_RATE) -> int:
        return int(round(self.duration_s * sample_rate))


# --------------------------------------------------------------------- noise


def corrupt(word: str, decode_step: int) -> str:
    """Deterministic one-character substitution keyed on ``(word, decode_step)``.

    Interior positions are preferred. Consecutive decode steps always give
    different corrupted forms, and a corrupted form never equals ``word``.
    """
    if not word:
        return word
    h = zlib.crc32(word.encode("utf-8"))
    if len(word) >= 3:
        pos = 1 + (h + decode_step) % (len(word) - 2)
    else:
        pos = (h + decode_step) % len(word)
    orig = word[pos].lower()
    choices = [c for c in _LETTERS if c != orig]
    repl = choices[(h // 7 + decode_step) % len(choices)]
    return word[:pos] + repl + word[pos + 1:]


def scripted_transcribe(trace: SyntheticTrace, window_origin_s: float, window_len_s: float,
                        decode_step: int) -> Hypothesis:
    """Hypothesis for the window ``[origin, origin + len)`` at the window's end time.

    Words are those whose midpoint lies in the window, with timestamps
    clipped to it. Words not yet stable at the window end are corrupted.
    """
    now = window_origin_s + window_len_s
    items = []
    for w in trace.words_in(window_origin_s, now):
        stable = w.stabilize_s is not None and now >= w.stabilize_s - 1e-9
        text = w.text if stable else corrupt(w.text, decode_step)
        start = min(max(w.start_s - window_origin_s, 0.0), window_len_s)
        end = min(max(w.end_s - window_origin_s, 0.0), window_len_s)
        items.append((text, start, end))
    return Hypothesis.from_words(
        items,
        no_speech_prob=0.0 if items else 1.0,
        language=trace.language_at(now - 1e-6),
        decode_step=decode_step,
    )


class ScriptedTranscriber(Transcriber):
    def __init__(self, trace: SyntheticTrace, sample_rate: int = SAMPLE_RATE):
        self.trace = trace
        self.sample_rate = sample_rate
        self.calls = 0
        self.max_window_s = 0.0

    def transcribe(self, window, *, origin_s, decode_step):
        self.calls += 1
        length = len(window) / self.sample_rate
        self.max_window_s = max(self.max_window_s, length)
        return scripted_transcribe(self.trace, origin_s, length, decode_step)


# ---------------------------------------------------------------- generation


@dataclass(frozen=True)
class TraceParams:
    """Knobs for :func:`generate_trace`.

    ``noise`` in [0, 1] scales the stabilization lag (0 to 0.8 s after the
    word ends); ``never_stabilize`` makes every word permanently unstable.
    """

    duration_s: float = 600.0
    seed: int = 0
    speech_rate: float = 2.5
    noise: float = 1.0
    never_stabilize: bool = False
    sentence_gap: tuple[float, float] = (0.25, 0.7)
    paragraph_every: tuple[float, float] = (30.0, 90.0)
    paragraph_gap: tuple[float, float] = (1.5, 2.5)
    annotation_rate: float = 0.0
    languages: tuple[str, ...] = ()
    switch_every_s: float = 60.0
    lead_in_s: float = 0.5
    tail_s: float = 3.0


MAX_STABILIZE_LAG_S = 0.8


def _r4(x: float) -> float:
    return float(round(x, 4))


def generate_trace(params: TraceParams) -> SyntheticTrace:
    rng = random.Random(params.seed)
    scale = 2.5 / params.speech_rate
    words: list[TraceWord] = []
    rms: list[Span] = []
    t = params.lead_in_s
    limit = params.duration_s - params.tail_s
    next_para = t + rng.uniform(*params.paragraph_every)
    sentence_left = rng.randint(5, 14)

    while True:
        if params.annotation_rate and rng.random() < params.annotation_rate:
            text = rng.choice(ANNOTATIONS)
            dur = rng.uniform(0.4, 1.2)
        else:
            text = rng.choice(VOCABULARY)
            dur = min(max(0.05 * len(text) + 0.12, 0.15), 0.7) * scale * rng.uniform(0.85, 1.15)
        start, end = _r4(t), _r4(t + dur)
        if end > limit:
            break
        if params.never_stabilize:
            stab = None
        else:
            stab = _r4(end + rng.uniform(0.0, MAX_STABILIZE_LAG_S * params.noise))
        words.append(TraceWord(text, start, end, stab))
        rms.append(Span(start, end, SPEECH_LEVEL))
        t = end

        sentence_left -= 1
        if t >= next_para:
            t += rng.uniform(*params.paragraph_gap)
            next_para = t + rng.uniform(*params.paragraph_every)
            sentence_left = rng.randint(5, 14)
        elif sentence_left == 0:
            t += rng.uniform(*params.sentence_gap) * scale
            sentence_left = rng.randint(5, 14)
        else:
            t += rng.uniform(0.03, 0.12) * scale

    langs: list[Span] = []
    if params.languages:
        t0, k = 0.0, 0
        while t0 < params.duration_s:
            t1 = min(t0 + params.switch_every_s, params.duration_s)
            langs.append(Span(_r4(t0), _r4(t1), params.languages[k % len(params.languages)]))
            t0, k = t1, k + 1

    meta = {"seed": params.seed, "speech_rate": params.speech_rate, "noise": params.noise,
            "never_stabilize": params.never_stabilize}
    return SyntheticTrace(words, rms, langs, _r4(params.duration_s), meta)


# ----------------------------------------------------------------------- I/O


def trace_records(trace: SyntheticTrace) -> Iterable[dict]:
    yield {"type": "meta", "duration_s": trace.duration_s, **trace.meta}
    for w in trace.words:
        yield {"type": "word", "text": w.text, "start_s": w.start_s, "end_s": w.end_s,
               "stabilize_s": w.stabilize_s}
    for s in trace.rms:
        yield {"type": "rms", "t0": s.t0, "t1": s.t1, "level": s.value}
    for s in trace.langs:
        yield {"type": "lang", "t0": s.t0, "t1": s.t1, "tag": s.value}


def write_trace(trace: SyntheticTrace, out: Union[str, Path, IO[str]]) -> None:
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            write_trace(trace, fh)
        return
    for rec in trace_records(trace):
        out.write(json.dumps(rec, ensure_ascii=False, separators=(",", ":")) + "\n")


def _num(rec: dict, key: str, n: int, optional: bool = False) -> Optional[float]:
    v = rec.get(key)
    if v is None and optional:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TraceFormatError(f"line {n}: field {key!r} must be a number")
    return float(v)


def parse_trace(lines: Iterable[str]) -> SyntheticTrace:
    words, rms, langs = [], [], []
    duration, meta = None, {}
    for n, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"line {n}: invalid JSON ({exc})") from exc
        if not isinstance(rec, dict):
            raise TraceFormatError(f"line {n}: expected a JSON object")
        kind = rec.get("type")
        if kind == "word":
            if not isinstance(rec.get("text"), str):
                raise TraceFormatError(f"line {n}: word text must be a string")
            words.append(TraceWord(rec["text"], _num(rec, "start_s", n), _num(rec, "end_s", n),
                                   _num(rec, "stabilize_s", n, optional=True)))
        elif kind == "rms":
            rms.append(Span(_num(rec, "t0", n), _num(rec, "t1", n), _num(rec, "level", n)))
        elif kind == "lang":
            langs.append(Span(_num(rec, "t0", n), _num(rec, "t1", n), str(rec.get("tag"))))
        elif kind == "meta":
            duration = _num(rec, "duration_s", n, optional=True)
            meta = {k: v for k, v in rec.items() if k not in ("type", "duration_s")}
        else:
            raise TraceFormatError(f"line {n}: unknown record type {kind!r}")
    rms.sort(key=lambda s: s.t0)
    langs.sort(key=lambda s: s.t0)
    return SyntheticTrace(words, rms, langs, duration, meta)


def read_trace(path: Union[str, Path]) -> SyntheticTrace:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceFormatError(f"cannot read trace {path}: {exc}") from exc
    return parse_trace(text.splitlines())


def read_wav(path: Union[str, Path]) -> np.ndarray:
    """16-bit PCM mono 16 kHz WAV as float32 in [-1, 1)."""
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1 or wf.getsampwidth() != 2 or wf.getframerate() != SAMPLE_RATE:
            raise TraceFormatError(f"{path}: expected 16-bit mono {SAMPLE_RATE} Hz PCM")
        raw = wf.readframes(wf.getnframes())
    return np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32768.0


def write_wav(path: Union[str, Path], samples: np.ndarray) -> None:
    pcm = np.clip(np.round(np.asarray(samples) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(SAMPLE_RATE)
        wf.writeframes(pcm.tobytes())
