import numpy as np
import pytest

from streamcommit import CommitEvent, EngineConfig, ResetEvent, Segment, StreamingEngine
from streamcommit.commit_policy import Mode

from support import ListTranscriber, feed, words_hyp

GOOD = "good morning everyone today"


def commits(events):
    return [e for e in events if isinstance(e, CommitEvent)]


def segments(events):
    return [e for e in events if isinstance(e, Segment)]


def test_tier1_commit_on_second_identical_decode():
    eng = StreamingEngine(ListTranscriber([GOOD]))
    ev = feed(eng, 1.0)
    assert commits(ev) == []
    ev = feed(eng, 1.0)
    (c,) = commits(ev)
    assert c.text == GOOD and c.tier == 1
    # "today" ends at 3 * 0.6 + 0.5 = 2.3 s of the 2 s window, clipped by the trim clamp
    assert eng.transcript.committed_text == GOOD.split()
    assert c.commit_stream_time == 2.0
    assert eng.buffer.trimmed_samples == min(int(np.floor(2.3 * 16000)), 32000)


def test_slice_arithmetic():
    for eps, t_end, n in [(0.0, 2.5, 40000), (0.2, 2.5, 36800), (0.2, 0.1, 0)]:
        eng = StreamingEngine(ListTranscriber(["x"]), EngineConfig(epsilon_s=eps))
        eng.buffer.append(np.zeros(3 * 16000, dtype=np.float32))
        h = words_hyp("a b", dur=t_end / 2, gap=0.0)
        eng.commit_and_slice(h.words, h, now=3.0)
        assert eng.buffer.trimmed_samples == n


def test_commit_aborted_when_boundary_missing():
    eng = StreamingEngine(ListTranscriber(["x"]))
    eng.buffer.append(np.zeros(16000, dtype=np.float32))
    prefix = words_hyp("alpha beta").words
    assert eng.commit_and_slice(prefix, words_hyp("gamma delta"), now=1.0) is None
    assert len(eng.buffer) == 16000 and eng.transcript.committed_text == []


def test_silence_produces_nothing():
    tr = ListTranscriber([GOOD])
    eng = StreamingEngine(tr)
    ev = feed(eng, 60.0, level=0.0)
    assert commits(ev) == [] and segments(ev) == [] and tr.windows == []
    # gated decodes still count as rejections, so volatile resets are expected
    assert all(isinstance(e, ResetEvent) for e in ev)
    assert all(d.buffer_samples <= 480000 for d in eng.decode_log)


def test_perpetual_disagreement_times_out():
    vocab = ["alpha", "omega", "sigma", "kappa"]
    script = [lambda w, s: " ".join(vocab[(s + i) % 4] for i in range(5))]
    eng = StreamingEngine(ListTranscriber(script))
    ev = feed(eng, 60.0)
    segs = segments(ev)
    assert commits(ev) == [] and len(segs) >= 5
    times = [1.0] + [s.commit_stream_time for s in segs]
    assert max(b - a for a, b in zip(times, times[1:])) <= 11.0
    assert all(s.reason == "timeout" for s in segs)


def test_timeout_emits_committed_plus_pending():
    eng = StreamingEngine(ListTranscriber(["x"]), start_time=90.0)
    eng.buffer.append(np.zeros(3 * 16000, dtype=np.float32))
    h = words_hyp("good morning everyone")
    eng.commit_and_slice(h.words[:2], h, now=100.0)
    (seg,) = eng.timeout_finalize(110.0)
    assert seg.text == "good morning everyone" and seg.reason == "timeout"
    assert eng.transcript.committed_text == [] and len(eng.buffer) == 0


def test_timeout_fires_at_tau():
    # two agreeing decodes commit at t=2; disagreement afterwards
    script = [GOOD, GOOD] + [lambda w, s: f"w{s} x{s}"]
    eng = StreamingEngine(ListTranscriber(script))
    ev = feed(eng, 12.0)
    (seg,) = segments(ev)
    assert seg.commit_stream_time == 12.0
    assert seg.text.startswith(GOOD + " ")


def test_no_segment_without_text():
    eng = StreamingEngine(ListTranscriber(["[music]"]))
    assert eng.timeout_finalize(50.0) == []
    assert eng.finish() == []


def test_rejection_reset_preserves_committed():
    script = [GOOD, GOOD] + ["[music]"] * 6 + ["hi"]
    eng = StreamingEngine(ListTranscriber(script), EngineConfig(tau_s=100))
    ev = feed(eng, 8.0)
    resets = [e for e in ev if isinstance(e, ResetEvent)]
    assert len(resets) == 1 and resets[0].stream_time == 8.0
    assert eng.decode_log[-1].buffer_samples == 0
    assert eng.transcript.committed_text == GOOD.split()
    assert eng.filter.r == 0


def test_transcriber_error_counts_as_rejection():
    eng = StreamingEngine(ListTranscriber([RuntimeError("boom")]), EngineConfig(r_max=2))
    ev = feed(eng, 3.0)
    assert len([e for e in ev if isinstance(e, ResetEvent)]) == 1


def test_stale_hypothesis_dropped():
    class Stale(ListTranscriber):
        def transcribe(self, window, *, origin_s, decode_step):
            return words_hyp(GOOD, step=decode_step - 1)

    eng = StreamingEngine(Stale([]))
    assert feed(eng, 5.0) == []
    assert eng.filter.r == 0 and not eng.history


def test_language_switch_finalizes_then_resets():
    script = [words_hyp(GOOD, lang="en")] * 2 + [words_hyp("bonjour", lang="fr")] * 3
    eng = StreamingEngine(ListTranscriber(script), EngineConfig(tau_s=100))
    ev = feed(eng, 5.0)
    kinds = [type(e).__name__ for e in ev]
    assert kinds == ["CommitEvent", "Segment", "ResetEvent"]
    seg = ev[1]
    assert seg.text == GOOD and seg.reason == "language"
    assert ev[2].reason == "language" and eng.transcript.committed_text == []


def test_hard_reset_idempotent():
    eng = StreamingEngine(ListTranscriber(["x"]))
    a, b = eng.hard_reset(1.0), eng.hard_reset(2.0)
    assert isinstance(a, ResetEvent) and isinstance(b, ResetEvent)
    assert len(eng.buffer) == 0 and eng.commit_state.mode is Mode.WAITING


def test_stream_time_must_increase():
    eng = StreamingEngine(ListTranscriber(["x"]))
    feed(eng, 1.0)
    with pytest.raises(ValueError):
        eng.step(np.zeros(10, dtype=np.float32), 1.0)


def test_finish_flushes_pending():
    eng = StreamingEngine(ListTranscriber(["hello there"]))
    feed(eng, 1.0)
    (seg,) = eng.finish()
    assert seg.text == "hello there" and seg.reason == "flush"


def test_decode_window_never_exceeds_cap():
    tr = ListTranscriber([lambda w, s: f"a{s} b{s}"])
    eng = StreamingEngine(tr, EngineConfig(tau_s=1000, buffer_cap_s=5))
    feed(eng, 30.0)
    assert max(tr.windows) == 5.0
