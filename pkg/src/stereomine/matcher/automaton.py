"""Phrase trie compilation.

The automaton interns lemmas to integer ids and stores the phrase set
twice: as a nested-dict trie (walked by the pure-Python kernel) and as
flat CSR arrays (walked by the compiled kernel).  Both layouts describe
the same trie; ``enumerate_phrases`` reads the phrase set back out of
the dict layout for round-trip checks.
"""

from __future__ import annotations

from array import array
from typing import Sequence

from ..errors import ConfigError
from ..lexicons import ActionPhrase


class PhraseAutomaton:
    """Immutable after compilation; safe to share across workers."""

    __slots__ = (
        "phrases",
        "vocab",
        "children",
        "terminals",
        "edge_start",
        "edge_key",
        "edge_child",
        "term_start",
        "term_pid",
        "n_phrases",
        "max_len",
    )

    def __init__(self, phrases, vocab, children, terminals, max_len):
        self.phrases = phrases
        self.vocab = vocab
        self.children = children
        self.terminals = terminals
        self.n_phrases = len(phrases)
        self.max_len = max_len
        self._build_csr()

    def _build_csr(self):
        n_nodes = len(self.children)
        edge_start = array("i", bytes(4 * (n_nodes + 1)))
        edge_key = array("i")
        edge_child = array("i")
        term_start = array("i", bytes(4 * (n_nodes + 1)))
        term_pid = array("i")
        for node in range(n_nodes):
            edge_start[node] = len(edge_key)
            for key in sorted(self.children[node]):
                edge_key.append(key)
                edge_child.append(self.children[node][key])
            term_start[node] = len(term_pid)
            term_pid.extend(self.terminals[node])
        edge_start[n_nodes] = len(edge_key)
        term_start[n_nodes] = len(term_pid)
        self.edge_start = edge_start
        self.edge_key = edge_key
        self.edge_child = edge_child
        self.term_start = term_start
        self.term_pid = term_pid

    def encode(self, lemmas: Sequence[str]) -> list[int]:
        """Map lemmas to interned ids; out-of-vocabulary lemmas get -1."""
        vocab = self.vocab
        return [vocab.get(lemma, -1) for lemma in lemmas]

    def enumerate_phrases(self) -> list[tuple[str, tuple[str, ...]]]:
        """Walk the trie and return (source_id, lemmas) for every stored
        phrase, ordered as at compile time."""
        id_to_lemma = {i: lemma for lemma, i in self.vocab.items()}
        found: dict[int, tuple[str, ...]] = {}
        stack: list[tuple[int, tuple[str, ...]]] = [(0, ())]
        while stack:
            node, prefix = stack.pop()
            for pidx in self.terminals[node]:
                found[pidx] = prefix
            for key, child in self.children[node].items():
                stack.append((child, prefix + (id_to_lemma[key],)))
        return [
            (self.phrases[pidx].source_id, found[pidx]) for pidx in range(self.n_phrases)
        ]


def compile_phrases(phrases: Sequence[ActionPhrase]) -> PhraseAutomaton:
    """Compile a phrase list into the matching automaton.

    Duplicate lemma sequences share one trie path but keep their own
    phrase entries, so every input phrase is reported independently.
    """
    if not phrases:
        raise ConfigError("cannot compile an empty phrase list")
    vocab: dict[str, int] = {}
    children: list[dict[int, int]] = [{}]
    terminals: list[list[int]] = [[]]
    max_len = 0
    for pidx, phrase in enumerate(phrases):
        node = 0
        for lemma in phrase.lemmas:
            lid = vocab.setdefault(lemma, len(vocab))
            nxt = children[node].get(lid)
            if nxt is None:
                nxt = len(children)
                children[node][lid] = nxt
                children.append({})
                terminals.append([])
            node = nxt
        terminals[node].append(pidx)
        if len(phrase.lemmas) > max_len:
            max_len = len(phrase.lemmas)
    return PhraseAutomaton(
        phrases=tuple(phrases),
        vocab=vocab,
        children=children,
        terminals=[tuple(t) for t in terminals],
        max_len=max_len,
    )
