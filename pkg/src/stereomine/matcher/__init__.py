"""Gap-tolerant multi-phrase matching over lemma streams.

Phrases match a sentence when their lemmas appear in order with at most
one intermittent token between consecutive lemmas.  Per phrase and
start position only the greedy alignment is reported (at each step the
adjacent continuation is preferred over the one-gap continuation);
matches at distinct start positions are all reported, overlaps
included.

Two kernels implement the search: a compiled Cython one and a pure
Python twin.  The compiled kernel is selected at import time when it
has been built; set ``STEREOMINE_PURE=1`` to force the pure kernel.
"""

from __future__ import annotations

import os

from ..corpus_io import Sentence
from .automaton import PhraseAutomaton, compile_phrases
from .oracle import brute_force_matches
from .types import Match

from . import _pymatch

try:
    from . import _speedups
except ImportError:
    _speedups = None

if _speedups is not None and not os.environ.get("STEREOMINE_PURE"):
    _kernel = _speedups.match_token_ids
    BACKEND = "compiled"
else:
    _kernel = _pymatch.match_token_ids
    BACKEND = "pure"

__all__ = [
    "BACKEND",
    "Match",
    "PhraseAutomaton",
    "brute_force_matches",
    "compile_phrases",
    "find_matches",
]


def find_matches(
    sentence: Sentence, automaton: PhraseAutomaton, sentence_ref: int = 0
) -> list[Match]:
    """All greedy phrase occurrences in one sentence, ordered by start
    position then phrase id.  Matching never crosses the sentence
    boundary and looks only at lemmas; POS plays no role here."""
    ids = automaton.encode(sentence.lemmas())
    raw = _kernel(automaton, ids)
    phrases = automaton.phrases
    matches = [
        Match(
            phrase_id=phrases[pidx].source_id,
            start=start,
            end=end,
            sentence_ref=sentence_ref,
        )
        for pidx, start, end in raw
    ]
    matches.sort(key=lambda m: (m.start, m.phrase_id, m.end))
    return matches
