"""Word-parallel enumeration kernels over single-word adjacency masks.

Every kernel takes ``adj``, an ``int64`` array whose entry ``v`` is the
neighbourhood bitmask of vertex ``v``. Bit 63 is never used, so graphs passed
here have at most :data:`MAX_KERNEL_N` vertices and all masks stay
non-negative. Kernels are compiled with numba unless JIT is disabled (see
:mod:`graphcontainers._jit`).
"""

import numpy as np

from ._jit import njit

MAX_KERNEL_N = 62


@njit
def popcount(x):
    x = x - ((x >> 1) & 0x5555555555555555)
    x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
    x = x + (x >> 8)
    x = x + (x >> 16)
    x = x + (x >> 32)
    return x & 0x7F


@njit
def sparse_subsets(adj, n, max_edges, cap, out):
    """Walk subsets in lexicographic order of their sorted vertex tuples.

    A subset ``S`` qualifies when ``|E(S)| <= max_edges[|S|]``. ``cap[k, r]``
    must hold ``max(max_edges[k:k + r + 1])``; a prefix whose edge count
    already exceeds every budget reachable by its completions is skipped
    together with its subtree. Qualifying masks are written to ``out`` while
    it has room; the total number of qualifying subsets is returned, so a
    zero-length ``out`` turns this into a pure counter.
    """
    size = n * n + 2
    st_mask = np.empty(size, np.int64)
    st_last = np.empty(size, np.int64)
    st_edges = np.empty(size, np.int64)
    st_k = np.empty(size, np.int64)
    count = 0
    if cap[0, n] < 0:
        return count
    st_mask[0] = 0
    st_last[0] = -1
    st_edges[0] = 0
    st_k[0] = 0
    top = 1
    while top > 0:
        top -= 1
        mask = st_mask[top]
        last = st_last[top]
        e = st_edges[top]
        k = st_k[top]
        if e <= max_edges[k]:
            if count < out.shape[0]:
                out[count] = mask
            count += 1
        for j in range(n - 1, last, -1):
            ne = e + popcount(adj[j] & mask)
            if ne <= cap[k + 1, n - 1 - j]:
                st_mask[top] = mask | (np.int64(1) << j)
                st_last[top] = j
                st_edges[top] = ne
                st_k[top] = k + 1
                top += 1
    return count


@njit
def count_independent(adj, n):
    """Number of independent sets, the empty set included."""
    stack = np.empty(n * n + 2, np.int64)
    stack[0] = (np.int64(1) << n) - 1
    top = 1
    count = 0
    while top > 0:
        top -= 1
        cand = stack[top]
        count += 1
        rest = cand
        while rest != 0:
            low = rest & -rest
            j = popcount(low - 1)
            stack[top] = cand & ~adj[j] & ~((low << 1) - 1)
            top += 1
            rest ^= low
    return count


@njit
def _smallest_sum(adj, mask, lo, hi, need, order, scratch):
    # sum of the `need` smallest |N(v) & mask| over v = order[lo:hi]
    m = 0
    for q in range(lo, hi):
        scratch[m] = popcount(adj[order[q]] & mask)
        m += 1
    vals = np.sort(scratch[:m])
    total = 0
    for i in range(need):
        total += vals[i]
    return total


@njit
def min_k_subset_edges(adj, n, k, order):
    """Minimum of ``|E(S)|`` over all ``k``-subsets ``S``.

    Branch and bound over the vertices in ``order`` (callers pass descending
    degree). Excluding a vertex is explored before including it; the bound is
    the current edge count plus the ``k - |S|`` smallest edge counts that the
    remaining vertices would add towards ``S`` alone.
    """
    if k == 0:
        return 0
    scratch = np.empty(n, np.int64)
    taken = np.int64(0)
    best = 0
    for _ in range(k):
        pick = -1
        pick_c = n + 1
        for v in range(n):
            if (taken >> v) & 1:
                continue
            c = popcount(adj[v] & taken)
            if c < pick_c:
                pick_c = c
                pick = v
        taken |= np.int64(1) << pick
        best += pick_c

    size = 2 * n + 4
    st_pos = np.empty(size, np.int64)
    st_mask = np.empty(size, np.int64)
    st_k = np.empty(size, np.int64)
    st_edges = np.empty(size, np.int64)
    st_pos[0] = 0
    st_mask[0] = 0
    st_k[0] = 0
    st_edges[0] = 0
    top = 1
    while top > 0:
        top -= 1
        pos = st_pos[top]
        mask = st_mask[top]
        sz = st_k[top]
        e = st_edges[top]
        if sz == k:
            if e < best:
                best = e
            continue
        need = k - sz
        if n - pos < need:
            continue
        if e + _smallest_sum(adj, mask, pos, n, need, order, scratch) >= best:
            continue
        v = order[pos]
        st_pos[top] = pos + 1
        st_mask[top] = mask | (np.int64(1) << v)
        st_k[top] = sz + 1
        st_edges[top] = e + popcount(adj[v] & mask)
        top += 1
        st_pos[top] = pos + 1
        st_mask[top] = mask
        st_k[top] = sz
        st_edges[top] = e
        top += 1
    return best


@njit
def first_sparse_k_subset(adj, n, k, budget):
    """Lexicographically first ``k``-subset with at most ``budget`` edges, or -1."""
    if k == 0:
        return np.int64(0) if budget >= 0 else np.int64(-1)
    identity = np.arange(n).astype(np.int64)
    scratch = np.empty(n, np.int64)
    size = n * n + 2
    st_mask = np.empty(size, np.int64)
    st_last = np.empty(size, np.int64)
    st_k = np.empty(size, np.int64)
    st_edges = np.empty(size, np.int64)
    st_mask[0] = 0
    st_last[0] = -1
    st_k[0] = 0
    st_edges[0] = 0
    top = 1
    while top > 0:
        top -= 1
        mask = st_mask[top]
        last = st_last[top]
        sz = st_k[top]
        e = st_edges[top]
        if sz == k:
            return mask
        need = k - sz
        for j in range(n - 1, last, -1):
            if n - j < need:
                continue
            ne = e + popcount(adj[j] & mask)
            if ne > budget:
                continue
            nm = mask | (np.int64(1) << j)
            if need > 1:
                if ne + _smallest_sum(adj, nm, j + 1, n, need - 1, identity, scratch) > budget:
                    continue
            st_mask[top] = nm
            st_last[top] = j
            st_k[top] = sz + 1
            st_edges[top] = ne
            top += 1
    return np.int64(-1)


def budget_caps(max_edges):
    """``cap[k, r] = max(max_edges[k:k + r + 1])`` for use with :func:`sparse_subsets`."""
    max_edges = np.asarray(max_edges, dtype=np.int64)
    n = len(max_edges) - 1
    cap = np.full((n + 2, n + 2), -1, dtype=np.int64)
    for k in range(n + 1):
        running = -1
        for r in range(n - k + 1):
            running = max(running, int(max_edges[k + r]))
            cap[k, r] = running
    return cap
