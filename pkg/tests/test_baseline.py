from streamcommit import BaselineEngine, CommitEvent
from streamcommit.harness import replay
from streamcommit.traces import TraceParams, generate_trace

from support import ListTranscriber, feed


def test_window_grows_without_cap():
    tr = ListTranscriber(["hello"])
    base = BaselineEngine(tr)
    feed(base, 60.0)
    assert tr.windows == [float(i) for i in range(1, 61)]
    assert base.accumulated_samples == 60 * 16000


def test_commit_at_silence_detection():
    tr = ListTranscriber(["hello world"])
    base = BaselineEngine(tr)
    ev = feed(base, 3.0)
    assert ev == []
    ev = feed(base, 1.0, level=0.0)
    (c,) = [e for e in ev if isinstance(e, CommitEvent)]
    assert c.text == "hello world" and c.tier == "vad"
    assert base.accumulated_samples == 0


def test_same_transcript_later_commits():
    trace = generate_trace(TraceParams(duration_s=120, seed=4))
    eng = replay(trace, "engine")
    base = replay(trace, "baseline")
    assert eng.output_text.split() == base.output_text.split() == trace.reference
    assert per_word_delay(base, trace) > per_word_delay(eng, trace)


def per_word_delay(session, trace):
    """Mean time from each word's end to the commit that contains it."""
    times = [c.commit_stream_time for c in session.commits for _ in c.text.split()]
    ends = [w.end_s for w in trace.words]
    return sum(t - e for t, e in zip(times, ends)) / len(times)
