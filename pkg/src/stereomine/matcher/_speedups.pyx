# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled matching kernel; behavioral twin of ``_pymatch``.

Walks the automaton's CSR arrays instead of the dict trie.  Children of
a node are sorted by lemma id, so the child lookup is a binary search
over the node's edge slice.
"""

from libc.stdlib cimport free, malloc
from libc.string cimport memset


cdef inline int _child(const int[:] edge_start, const int[:] edge_key,
                       const int[:] edge_child, int node, int key) noexcept nogil:
    cdef int lo = edge_start[node]
    cdef int hi = edge_start[node + 1]
    cdef int mid, k
    while lo < hi:
        mid = (lo + hi) >> 1
        k = edge_key[mid]
        if k == key:
            return edge_child[mid]
        if k < key:
            lo = mid + 1
        else:
            hi = mid
    return -1


def match_token_ids(automaton, ids):
    """Return (phrase_index, start, end) triples for every greedy match."""
    cdef const int[:] edge_start = automaton.edge_start
    cdef const int[:] edge_key = automaton.edge_key
    cdef const int[:] edge_child = automaton.edge_child
    cdef const int[:] term_start = automaton.term_start
    cdef const int[:] term_pid = automaton.term_pid
    cdef int n_phrases = automaton.n_phrases
    cdef int max_len = automaton.max_len
    cdef int n = len(ids)

    out = []
    if n == 0:
        return out

    # pending branches along one root-to-node path never exceed depth+1
    cdef int stack_cap = 2 * max_len + 8
    cdef int *cids = <int *> malloc(n * sizeof(int))
    cdef int *last_seen = <int *> malloc(n_phrases * sizeof(int))
    cdef int *st_node = <int *> malloc(stack_cap * sizeof(int))
    cdef int *st_pos = <int *> malloc(stack_cap * sizeof(int))
    if cids == NULL or last_seen == NULL or st_node == NULL or st_pos == NULL:
        free(cids)
        free(last_seen)
        free(st_node)
        free(st_pos)
        raise MemoryError()

    cdef int i, start, tid, node, pos, sp, nxt, t, pidx, step_pos
    try:
        for i in range(n):
            cids[i] = ids[i]
        memset(last_seen, 0xFF, n_phrases * sizeof(int))
        for start in range(n):
            tid = cids[start]
            if tid < 0:
                continue
            node = _child(edge_start, edge_key, edge_child, 0, tid)
            if node < 0:
                continue
            st_node[0] = node
            st_pos[0] = start
            sp = 1
            while sp > 0:
                sp -= 1
                node = st_node[sp]
                pos = st_pos[sp]
                for t in range(term_start[node], term_start[node + 1]):
                    pidx = term_pid[t]
                    if last_seen[pidx] != start:
                        last_seen[pidx] = start
                        out.append((pidx, start, pos + 1))
                step_pos = pos + 2
                if step_pos < n and cids[step_pos] >= 0:
                    nxt = _child(edge_start, edge_key, edge_child, node, cids[step_pos])
                    if nxt >= 0:
                        st_node[sp] = nxt
                        st_pos[sp] = step_pos
                        sp += 1
                step_pos = pos + 1
                if step_pos < n and cids[step_pos] >= 0:
                    nxt = _child(edge_start, edge_key, edge_child, node, cids[step_pos])
                    if nxt >= 0:
                        st_node[sp] = nxt
                        st_pos[sp] = step_pos
                        sp += 1
    finally:
        free(cids)
        free(last_seen)
        free(st_node)
        free(st_pos)
    return out
