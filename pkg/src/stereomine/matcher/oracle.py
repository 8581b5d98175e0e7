"""Exhaustive reference matcher, used as the testing oracle.

Enumerates every start position and every gap assignment directly,
without the trie, and applies the same one-result-per-start reduction:
gap vectors are tried in lexicographic order (adjacent step before
one-gap step), so the first complete alignment is the greedy one.
"""

from __future__ import annotations

from itertools import product

from ..corpus_io import Sentence
from ..lexicons import ActionPhrase

from .types import Match


def brute_force_matches(
    sentence: Sentence, phrase: ActionPhrase, sentence_ref: int = 0
) -> list[Match]:
    lemmas = sentence.lemmas()
    n = len(lemmas)
    k = len(phrase.lemmas)
    out: list[Match] = []
    for start in range(n):
        if lemmas[start] != phrase.lemmas[0]:
            continue
        for gaps in product((0, 1), repeat=k - 1):
            pos = start
            ok = True
            for j in range(1, k):
                pos += 1 + gaps[j - 1]
                if pos >= n or lemmas[pos] != phrase.lemmas[j]:
                    ok = False
                    break
            if ok:
                out.append(
                    Match(
                        phrase_id=phrase.source_id,
                        start=start,
                        end=pos + 1,
                        sentence_ref=sentence_ref,
                    )
                )
                break
    return out
