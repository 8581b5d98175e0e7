"""Pure-Python matching kernel.

Same contract as the compiled kernel in ``_speedups``: depth-first
search over the trie with the adjacent continuation explored before the
one-gap continuation, reporting the first complete alignment found per
(phrase, start).  Pushing the gap branch first onto the LIFO stack is
what makes the adjacent branch come off first.
"""

from __future__ import annotations


def match_token_ids(automaton, ids: list[int]) -> list[tuple[int, int, int]]:
    """Return (phrase_index, start, end) triples for every greedy match."""
    children = automaton.children
    terminals = automaton.terminals
    root = children[0]
    n = len(ids)
    out: list[tuple[int, int, int]] = []
    for start in range(n):
        tid = ids[start]
        if tid < 0:
            continue
        node = root.get(tid)
        if node is None:
            continue
        seen: set[int] = set()
        stack = [(node, start)]
        while stack:
            node, pos = stack.pop()
            for pidx in terminals[node]:
                if pidx not in seen:
                    seen.add(pidx)
                    out.append((pidx, start, pos + 1))
            kids = children[node]
            if not kids:
                continue
            gap_pos = pos + 2
            if gap_pos < n:
                nxt = kids.get(ids[gap_pos])
                if nxt is not None:
                    stack.append((nxt, gap_pos))
            adj_pos = pos + 1
            if adj_pos < n:
                nxt = kids.get(ids[adj_pos])
                if nxt is not None:
                    stack.append((nxt, adj_pos))
    return out
