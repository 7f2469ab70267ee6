"""Bounded active audio window with FIFO cap and front slicing."""

from __future__ import annotations

import numpy as np

from .errors import InvalidAudioError

SAMPLE_RATE = 16000


class ActiveAudioBuffer:
    """Most recent uncommitted audio, capped at ``floor(cap_s * sample_rate)`` samples.

    Samples live in a flat float32 array with a moving head so that
    ``trim_front`` is O(1); the live region is compacted only when an append
    would run off the end of the backing store.

    ``origin_stream_time`` is the global stream time of the first live sample.
    It is derived from integer sample counts, so
    ``origin_stream_time + len(buf) / sample_rate`` always equals the total
    ingested duration plus the start offset.
    """

    def __init__(self, cap_s: float = 30.0, sample_rate: int = SAMPLE_RATE,
                 start_time: float = 0.0):
        if cap_s <= 0:
            raise ValueError(f"cap_s must be positive, got {cap_s}")
        self.sample_rate = int(sample_rate)
        self.capacity_samples = int(np.floor(cap_s * self.sample_rate))
        if self.capacity_samples < 1:
            raise ValueError("buffer capacity rounds to zero samples")
        self.start_time = float(start_time)
        self._data = np.zeros(2 * self.capacity_samples, dtype=np.float32)
        self._head = 0
        self._tail = 0
        self.ingested_samples = 0
        self.dropped_samples = 0  # removed by the FIFO cap
        self.trimmed_samples = 0  # removed by trim_front

    def __len__(self) -> int:
        return self._tail - self._head

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate

    @property
    def origin_sample(self) -> int:
        """Global index of the first live sample."""
        return self.ingested_samples - len(self)

    @property
    def origin_stream_time(self) -> float:
        return self.start_time + self.origin_sample / self.sample_rate

    def append(self, chunk) -> None:
        x = np.asarray(chunk, dtype=np.float32).ravel()
        if x.size == 0:
            raise InvalidAudioError("empty audio chunk")
        if not np.all(np.isfinite(x)):
            raise InvalidAudioError("audio chunk contains non-finite samples")

        n = x.size
        cap = self.capacity_samples
        self.ingested_samples += n
        if n >= cap:
            self.dropped_samples += len(self) + n - cap
            self._data[:cap] = x[-cap:]
            self._head, self._tail = 0, cap
            return

        if self._tail + n > self._data.size:
            live = len(self)
            self._data[:live] = self._data[self._head:self._tail]
            self._head, self._tail = 0, live
        self._data[self._tail:self._tail + n] = x
        self._tail += n

        excess = len(self) - cap
        if excess > 0:
            self._head += excess
            self.dropped_samples += excess

    def trim_front(self, n: int) -> int:
        """Drop the first ``n`` samples, clamped to ``[0, len]``. Returns the count removed."""
        n = min(max(int(n), 0), len(self))
        self._head += n
        self.trimmed_samples += n
        if self._head == self._tail:
            self._head = self._tail = 0
        return n

    def clear(self) -> int:
        return self.trim_front(len(self))

    def snapshot(self) -> np.ndarray:
        return self._data[self._head:self._tail].copy()

    def rms(self) -> float:
        if len(self) == 0:
            return 0.0
        live = self._data[self._head:self._tail].astype(np.float64)
        return float(np.sqrt(np.mean(live * live)))

    def __repr__(self) -> str:
        return (f"ActiveAudioBuffer(len={len(self)}, cap={self.capacity_samples}, "
                f"origin={self.origin_stream_time:.4f}s)")
