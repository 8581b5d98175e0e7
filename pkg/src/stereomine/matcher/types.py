"""Match record shared by the kernels and the oracle."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class Match:
    """One phrase occurrence inside one sentence.

    ``end - start`` ranges from the phrase length to twice the length
    minus one, since each of the ``len - 1`` adjacencies may skip at
    most one intermittent token.
    """

    phrase_id: str
    start: int
    end: int
    sentence_ref: int = 0
