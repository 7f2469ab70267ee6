import pytest

from streamcommit import EngineConfig, Hypothesis, Kind, Mode, evaluate
from streamcommit.commit_policy import (WAITING, CommitDecision, CommitState, StagedCandidate,
                                        guardrail_tail, prefix_char_length)

CFG = EngineConfig()


def hyp(text, step=0):
    return Hypothesis.from_words(((w, i, i + 0.5) for i, w in enumerate(text.split())),
                                 decode_step=step)


@pytest.mark.parametrize("words, n", [(["the", "quick", "brown", "fox"], 19), ([], 0), (["a"], 1),
                                      (["Hello,", "World!"], 11)])
def test_prefix_char_length(words, n):
    assert prefix_char_length(words) == n


@pytest.mark.parametrize("words, ok", [
    (["x", "proc-"], False), (["x", "hello"], True), (["x", "um…"], False),
    (["x", "um..."], False), (["(upbeat"], False), (["(coughs)"], True), ([], False), (["  "], False),
])
def test_guardrail_tail(words, ok):
    assert guardrail_tail(words) is ok


def test_tier1_commit():
    d, s = evaluate(WAITING, hyp("the quick brown fox jumps"), hyp("the quick brown fox jumps"), CFG)
    assert d.kind is Kind.COMMIT and d.tier == 1 and d.sigma == 1.0
    assert s is WAITING


def test_short_exact_agreement_stages_not_commits():
    # sigma 1 but 18 chars: below L1, above L2
    d, s = evaluate(WAITING, hyp("good morning folks"), hyp("good morning folks"), CFG)
    assert d.kind is Kind.STAGE
    assert s.mode is Mode.DETECTED_DUPLICATE


def test_stage_on_partial_agreement():
    d, s = evaluate(WAITING, hyp("good murning everyone"), hyp("good morning everyona"), CFG)
    assert d.kind is Kind.STAGE and d.sigma < 1
    assert s.staged.words == d.prefix


def test_hold_below_theta():
    d, s = evaluate(WAITING, hyp("alpha beta gamma delta epsilon"),
                    hyp("omega zeta theta kappa lambda"), CFG)
    assert d.kind is Kind.HOLD and s is WAITING


def test_confirmation_commits_tier2():
    staged = StagedCandidate(hyp("good morning everyone now").words, 2)
    state = CommitState(Mode.DETECTED_DUPLICATE, staged)
    curr = hyp("good mornin everyone now", step=3)
    d, s = evaluate(state, hyp("zzz"), curr, CFG)
    assert d.kind is Kind.COMMIT and d.tier == 2
    assert 0.5 <= d.sigma < 1
    assert s is WAITING


def test_failed_confirmation_drops_stage():
    staged = StagedCandidate(hyp("good morning everyone now").words, 2)
    state = CommitState(Mode.DETECTED_DUPLICATE, staged)
    d, s = evaluate(state, hyp("xx"), hyp("completely different words here"), CFG)
    assert d.kind is Kind.HOLD and s is WAITING


def test_guardrail_blocks_without_state_change():
    d, s = evaluate(WAITING, hyp("the quick brown fox jum-"), hyp("the quick brown fox jum-"), CFG)
    assert d.kind is Kind.REJECTED_BY_GUARDRAIL
    assert s is WAITING


def test_ctx_guard_is_consulted():
    d, _ = evaluate(WAITING, hyp("the quick brown fox jumps"), hyp("the quick brown fox jumps"),
                    CFG, ctx_guard=lambda p: False)
    assert d.kind is Kind.REJECTED_BY_GUARDRAIL


def test_state_invariants():
    with pytest.raises(ValueError):
        CommitState(Mode.DETECTED_DUPLICATE, None)
    with pytest.raises(ValueError):
        CommitDecision(Kind.COMMIT, ())
