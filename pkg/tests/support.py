"""Scripted transcribers and feeding helpers shared by engine-level tests."""

from __future__ import annotations

import numpy as np

from streamcommit import Hypothesis, Transcriber

SR = 16000


def words_hyp(text, *, step=0, q=0.0, lang=None, t0=0.0, dur=0.5, gap=0.1):
    items = []
    t = t0
    for w in text.split():
        items.append((w, t, t + dur))
        t += dur + gap
    return Hypothesis.from_words(items, no_speech_prob=q, language=lang, decode_step=step)


class ListTranscriber(Transcriber):
    """Returns ``script[i]`` on the i-th call; strings become hypotheses.

    A script entry may also be an exception instance (raised) or a callable
    taking ``(window_len_s, decode_step)``.
    """

    def __init__(self, script, lang=None):
        self.script = list(script)
        self.lang = lang
        self.windows: list[float] = []

    def transcribe(self, window, *, origin_s, decode_step):
        self.windows.append(len(window) / SR)
        item = self.script[min(len(self.windows) - 1, len(self.script) - 1)]
        if isinstance(item, BaseException):
            raise item
        if callable(item):
            item = item(len(window) / SR, decode_step)
        if isinstance(item, Hypothesis):
            return Hypothesis(item.words, item.no_speech_prob, item.language, decode_step,
                              item.raw_text)
        return words_hyp(item, step=decode_step, lang=self.lang)


def feed(engine, seconds, level=0.1, chunk_s=0.25, t0=None):
    """Push ``seconds`` of square-wave audio; returns all events."""
    n = int(round(chunk_s * SR))
    t = engine._last_time if t0 is None else t0
    events = []
    for _ in range(int(round(seconds / chunk_s))):
        chunk = np.full(n, level, dtype=np.float32)
        chunk[1::2] *= -1
        t = round(t + chunk_s, 9)
        events.extend(engine.step(chunk, t))
    return events
