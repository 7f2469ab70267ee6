import io
import math

import numpy as np
import pytest

from streamcommit.errors import DataIntegrityError, TraceFormatError, UndefinedMetricError
from streamcommit.events import (CommitEvent, DecodeRecord, ResetEvent, Segment, iter_events,
                                 write_events)
from streamcommit.metrics import (CostModel, build_report, end_to_commit_latency, fit_polynomial,
                                  memory_growth_slope, rei, simulated_cost, stability_stats, wer,
                                  word_edit_distance)

from oracles import ols_slope


def test_event_roundtrip():
    evs = [CommitEvent("good morning", 1.5, 2.0, 1, 0, 2.0),
           Segment("good morning all", 2.4, 12.0, "timeout", 0),
           ResetEvent(13.0, "rejection", 1),
           DecodeRecord(13.0, 0.0, 0, False, 3, (), False)]
    buf = io.StringIO()
    write_events(evs, buf)
    assert list(iter_events(io.StringIO(buf.getvalue()))) == evs


@pytest.mark.parametrize("line", ["{", '{"type": "commit"}', '{"type": "nope"}', "[1]"])
def test_malformed_events(line):
    with pytest.raises(TraceFormatError):
        list(iter_events([line]))


def test_latency():
    assert end_to_commit_latency([CommitEvent("a", 5.0, 5.2, 1)]).values_ms == pytest.approx((200.0,))
    assert end_to_commit_latency([]).mean is None
    evs = [CommitEvent("a", 0.0, t / 1000, 1) for t in (100, 200, 300)]
    st = end_to_commit_latency(evs)
    assert (st.mean, st.median) == pytest.approx((200, 200))
    with pytest.raises(DataIntegrityError):
        end_to_commit_latency([CommitEvent("a", 5.0, 4.0, 1)])


def test_latency_with_cost_and_flush_skipped():
    evs = [CommitEvent("a", 1.0, 2.0, 1, 0, 10.0), CommitEvent("b", 1.0, 9.0, "flush")]
    st = end_to_commit_latency(evs, CostModel())
    assert st.values_ms == pytest.approx((1000 + 1050,))


def test_wer():
    assert wer(["a", "b"], ["a", "b"]) == 0.0
    assert wer(["a", "b", "c"], ["a", "x", "c"]) == pytest.approx(1 / 3)
    assert wer(["a"], []) == 1.0
    with pytest.raises(UndefinedMetricError):
        wer([], ["a"])
    assert word_edit_distance(list("kitten"), list("sitting")) == 3


def test_stability():
    assert stability_stats([(0, ["a", "b"])], ["a", "b"])[:2] == (1.0, 0.0)
    si = stability_stats([(0, list("abcdefghij"))], list("abcdefghiX"))
    assert si.stability_index == pytest.approx(0.9) and si.revision_rate == pytest.approx(0.1)
    assert stability_stats([], ["a"]).stability_index == 1.0


def test_memory_slope():
    assert memory_growth_slope([(t, 5.0) for t in range(10)]) == 0.0
    assert memory_growth_slope([(0, 0), (10, 1000), (20, 2000)]) == pytest.approx(100.0)
    rng = np.random.default_rng(0)
    pts = [(float(t), float(rng.normal())) for t in range(100)]
    assert memory_growth_slope(pts, 30) == pytest.approx(ols_slope(*zip(*pts[30:])))
    with pytest.raises(UndefinedMetricError):
        memory_growth_slope([(0, 1)])


def test_rei_and_cost():
    assert rei(2, 0.5, 0.25) == 4.0
    with pytest.raises(UndefinedMetricError):
        rei(0, 1, 1)
    assert simulated_cost(30) == pytest.approx(3.05)
    assert CostModel(seconds_per_unit=0.5).processing_s(30) == pytest.approx(1.525)


def test_fit_polynomial():
    x = np.arange(50.0)
    coeffs, r2 = fit_polynomial(x, 3 * x ** 2 + 2, 2)
    assert coeffs == pytest.approx([3, 0, 2], abs=1e-8) and r2 == pytest.approx(1.0)


def test_report_shape():
    evs = [CommitEvent("a b", 1.0, 2.0, 1, 0, 2.0), Segment("a b c", 2.5, 12.0, "timeout", 0)]
    evs += [DecodeRecord(float(t), 2.0, 32000, True) for t in range(1, 80)]
    rep = build_report(evs, reference=["a", "b", "c"])
    assert rep.wer == 0.0 and rep.commits == 1 and rep.segments == 1
    assert rep.peak_window_samples == 32000 and rep.memory_growth_slope == 0.0
    assert math.isfinite(rep.rei)
    assert set(rep.to_dict()) >= {"latency_mean_ms", "rei", "wer", "stability_index"}
