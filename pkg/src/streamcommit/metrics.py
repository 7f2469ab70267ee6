"""Session metrics: latency, stability, WER, memory slope, simulated cost and REI."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DataIntegrityError, UndefinedMetricError
from .events import CommitEvent, DecodeRecord, Event, Segment
from .hypothesis import normalize_word

SAMPLE_RATE = 16000
_NEG_TOL = 1e-9


@dataclass(frozen=True)
class CostModel:
    """Linear per-decode cost ``c0 + c1 * window_seconds`` in cost units.

    ``seconds_per_unit`` converts cost into simulated decoder wall time
    when latency is measured under the model.
    """

    c0: float = 0.05
    c1: float = 0.1
    seconds_per_unit: float = 1.0

    def cost(self, window_s: float) -> float:
        return self.c0 + self.c1 * window_s

    def processing_s(self, window_s: float) -> float:
        return self.cost(window_s) * self.seconds_per_unit


def simulated_cost(window_s: float, c0: float = 0.05, c1: float = 0.1) -> float:
    return CostModel(c0, c1).cost(window_s)


def rei(m_peak: float, u_avg: float, l_avg: float) -> float:
    """Resource efficiency index ``1 / (M_peak * U_avg * L_avg)``."""
    if m_peak <= 0 or u_avg <= 0 or l_avg <= 0:
        raise UndefinedMetricError("REI needs strictly positive memory, utilization and latency")
    return 1.0 / (m_peak * u_avg * l_avg)


# ------------------------------------------------------------------ latency


class LatencyStats(NamedTuple):
    values_ms: tuple[float, ...]
    mean: Optional[float]
    median: Optional[float]
    p90: Optional[float]
    p95: Optional[float]


def _stats(values_ms: Sequence[float]) -> LatencyStats:
    if not values_ms:
        return LatencyStats((), None, None, None, None)
    arr = np.asarray(values_ms, dtype=float)
    p50, p90, p95 = np.percentile(arr, [50, 90, 95])
    return LatencyStats(tuple(values_ms), float(arr.mean()), float(p50), float(p90), float(p95))


def end_to_commit_latency(events: Iterable[Event], cost: Optional[CostModel] = None
                          ) -> LatencyStats:
    """Per-commit latency from the last committed word's end to the commit, in ms.

    With ``cost`` the simulated processing time of the decode that produced
    the commit is added. End-of-stream flush commits are not counted.
    """
    out = []
    for ev in events:
        if not isinstance(ev, CommitEvent) or ev.tier == "flush":
            continue
        lat = ev.commit_stream_time - ev.word_end_stream_time
        if lat < -_NEG_TOL:
            raise DataIntegrityError(f"negative latency {lat:.6f}s for commit {ev.text!r}")
        lat = max(lat, 0.0)
        if cost is not None:
            lat += cost.processing_s(ev.window_s)
        out.append(lat * 1000.0)
    return _stats(out)


# ---------------------------------------------------------------------- WER


def word_edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> int:
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        cur = [i]
        for j, h in enumerate(hyp, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (r != h)))
        prev = cur
    return prev[-1]


def wer(reference: Sequence[str], hypothesis: Sequence[str]) -> float:
    if not reference:
        raise UndefinedMetricError("WER is undefined for an empty reference")
    return word_edit_distance(reference, hypothesis) / len(reference)


# ---------------------------------------------------------------- stability


class StabilityStats(NamedTuple):
    stability_index: float
    revision_rate: float
    instances: int
    revisions: int


def stability_stats(interim_log: Iterable[tuple[int, Sequence[str]]],
                    final_text: Sequence[str]) -> StabilityStats:
    """Share of displayed interim words that survive unchanged at their position.

    ``interim_log`` holds ``(offset, words)`` per decode, where ``offset`` is
    the number of output words already committed when the words were shown.
    An empty log is vacuously stable.
    """
    final = [normalize_word(w) for w in final_text]
    instances = revisions = 0
    for offset, words in interim_log:
        for j, w in enumerate(words):
            instances += 1
            pos = offset + j
            if pos >= len(final) or final[pos] != normalize_word(w):
                revisions += 1
    if instances == 0:
        return StabilityStats(1.0, 0.0, 0, 0)
    si = 1.0 - revisions / instances
    return StabilityStats(si, revisions / instances, instances, revisions)


# ------------------------------------------------------------ memory & cost


def memory_growth_slope(series: Iterable[tuple[float, float]], warmup_s: float = 0.0) -> float:
    """Least-squares slope of buffer size over time, ignoring points before ``warmup_s``."""
    pts = np.array([(t, m) for t, m in series if t >= warmup_s], dtype=float)
    if len(pts) < 2 or np.ptp(pts[:, 0]) == 0:
        raise UndefinedMetricError("need at least two post-warmup points at distinct times")
    t, m = pts[:, 0], pts[:, 1]
    tc = t - t.mean()
    return float(np.dot(tc, m - m.mean()) / np.dot(tc, tc))


def fit_polynomial(x: Sequence[float], y: Sequence[float], deg: int) -> tuple[np.ndarray, float]:
    """Least-squares polynomial coefficients (highest power first) and R^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    coeffs = np.polyfit(x, y, deg)
    resid = y - np.polyval(coeffs, x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return coeffs, r2


def cumulative_cost(decodes: Iterable[DecodeRecord], cost: CostModel = CostModel()
                    ) -> tuple[np.ndarray, np.ndarray]:
    t, c, total = [], [], 0.0
    for d in decodes:
        if d.transcribed:
            total += cost.cost(d.window_s)
        t.append(d.stream_time)
        c.append(total)
    return np.asarray(t), np.asarray(c)


# ------------------------------------------------------------------- report


def output_words(events: Iterable[Event]) -> list[str]:
    """Final output: each segment's text, or its commits when it was never finalized."""
    seg_text: dict[int, str] = {}
    commits: dict[int, list[str]] = {}
    order: list[int] = []
    for ev in events:
        if isinstance(ev, (Segment, CommitEvent)):
            if ev.segment_id not in seg_text and ev.segment_id not in commits:
                order.append(ev.segment_id)
            if isinstance(ev, Segment):
                seg_text[ev.segment_id] = ev.text
            else:
                commits.setdefault(ev.segment_id, []).append(ev.text)
    words: list[str] = []
    for sid in order:
        text = seg_text.get(sid)
        if text is None:
            text = " ".join(commits.get(sid, []))
        words.extend(text.split())
    return words


@dataclass(frozen=True)
class SessionReport:
    system: str
    duration_s: float
    commits: int
    segments: int
    resets: int
    latency_mean_ms: Optional[float]
    latency_median_ms: Optional[float]
    latency_p90_ms: Optional[float]
    latency_p95_ms: Optional[float]
    stream_latency_mean_ms: Optional[float]
    stability_index: float
    revision_rate: float
    revisions_per_min: float
    wer: Optional[float]
    peak_window_samples: int
    avg_cost: float
    memory_growth_slope: Optional[float]
    rei: Optional[float]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def build_report(events: Sequence[Event], *, system: str = "engine",
                 duration_s: Optional[float] = None,
                 reference: Optional[Sequence[str]] = None,
                 cost: CostModel = CostModel(), warmup_s: float = 60.0,
                 sample_rate: int = SAMPLE_RATE) -> SessionReport:
    decodes = [e for e in events if isinstance(e, DecodeRecord)]
    if duration_s is None:
        times = [d.stream_time for d in decodes]
        duration_s = max(times) if times else 0.0
    lat = end_to_commit_latency(events, cost)
    lat_stream = end_to_commit_latency(events)
    final = output_words(events)
    stab = stability_stats(((d.interim_offset, d.interim) for d in decodes), final)
    minutes = duration_s / 60.0
    ran = [d for d in decodes if d.transcribed]
    peak = int(round(max((d.window_s for d in ran), default=0.0) * sample_rate))
    avg_cost = sum(cost.cost(d.window_s) for d in ran) / duration_s if duration_s > 0 else 0.0
    try:
        slope = memory_growth_slope(((d.stream_time, d.buffer_samples) for d in decodes), warmup_s)
    except UndefinedMetricError:
        slope = None
    try:
        idx = rei(peak, avg_cost, lat.mean / 1000.0) if lat.mean is not None else None
    except UndefinedMetricError:
        idx = None
    w = None
    if reference:
        w = wer([normalize_word(x) for x in reference], [normalize_word(x) for x in final])
    return SessionReport(
        system=system,
        duration_s=duration_s,
        commits=sum(isinstance(e, CommitEvent) for e in events),
        segments=sum(isinstance(e, Segment) for e in events),
        resets=sum(getattr(e, "type", "") == "reset" for e in events),
        latency_mean_ms=lat.mean,
        latency_median_ms=lat.median,
        latency_p90_ms=lat.p90,
        latency_p95_ms=lat.p95,
        stream_latency_mean_ms=lat_stream.mean,
        stability_index=stab.stability_index,
        revision_rate=stab.revision_rate,
        revisions_per_min=stab.revisions / minutes if minutes > 0 else 0.0,
        wer=w,
        peak_window_samples=peak,
        avg_cost=avg_cost,
        memory_growth_slope=slope,
        rei=idx,
    )
