"""Bounded-window consensus engine for streaming transcription."""

from .audio_buffer import ActiveAudioBuffer
from .baseline import BaselineEngine
from .commit_policy import (CommitDecision, CommitState, Kind, Mode, evaluate,
                            guardrail_tail, prefix_char_length)
from .config import EngineConfig, load_config
from .engine import CommittedTranscript, StreamingEngine, Transcriber
from .events import CommitEvent, DecodeRecord, ResetEvent, Segment
from .hypothesis import (Hypothesis, WordRecord, disambiguate_occurrence, end_time_of,
                         normalize_word)
from .rejection import RejectionFilter
from .stability import PrefixResult, levenshtein, sa_prefix, word_similarity

__all__ = [
    "ActiveAudioBuffer", "BaselineEngine", "CommitDecision", "CommitEvent", "CommitState",
    "CommittedTranscript", "DecodeRecord", "EngineConfig", "Hypothesis", "Kind", "Mode",
    "PrefixResult", "RejectionFilter", "ResetEvent", "Segment", "StreamingEngine",
    "Transcriber", "WordRecord", "disambiguate_occurrence", "end_time_of", "evaluate",
    "guardrail_tail", "levenshtein", "load_config", "normalize_word", "prefix_char_length",
    "sa_prefix", "word_similarity",
]
__version__ = "0.1.0"
