"""Hot loops, compiled with numba when available.

Set RS_CANCEL_NUMBA=0 to run the same functions as plain Python/numpy.
Results are identical either way; only speed differs.
"""

import os

import numpy as np


def _numba_wanted() -> bool:
    return os.environ.get("RS_CANCEL_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


try:
    if not _numba_wanted():
        raise ImportError("numba disabled by RS_CANCEL_NUMBA")
    from numba import njit as _njit

    HAVE_NUMBA = True

    def njit(f):
        return _njit(cache=True, nogil=True)(f)

except ImportError:
    HAVE_NUMBA = False

    def njit(f):
        return f


BACKEND = "numba" if HAVE_NUMBA else "python"


@njit
def multigraph_girth(n, start, nbr, eid, limit):
    """Edge-count girth of an undirected multigraph in CSR form.

    Loops give 1, parallel edges give 2. Returns -1 when acyclic or when
    no cycle shorter than `limit` exists (limit <= 0 means no limit).
    """
    best = limit if limit > 0 else n + 2
    found = False
    dist = np.full(n, -1, np.int64)
    via = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    for root in range(n):
        for k in range(start[root], start[root + 1]):
            if nbr[k] == root:
                return 1
        for v in range(n):
            dist[v] = -1
            via[v] = -1
        dist[root] = 0
        head = 0
        tail = 1
        queue[0] = root
        while head < tail:
            u = queue[head]
            head += 1
            if 2 * dist[u] + 1 >= best:
                break
            for k in range(start[u], start[u + 1]):
                w = nbr[k]
                if eid[k] == via[u]:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    via[w] = eid[k]
                    queue[tail] = w
                    tail += 1
                else:
                    c = dist[u] + dist[w] + 1
                    if c < best:
                        best = c
                        found = True
    if not found:
        return -1
    return best


@njit
def alternating_girth(n, a_start, a_nbr, b_start, b_nbr, cap):
    """Shortest closed walk alternating between a-arcs and b-arcs.

    Walks are cyclically alternating, so lengths are even. Returns -1 if
    nothing of length <= cap exists.
    """
    best = cap + 1
    dist = np.full(2 * n, -1, np.int64)
    queue = np.empty(2 * n, np.int64)
    for s in range(n):
        for f0 in range(2):
            for i in range(2 * n):
                dist[i] = -1
            head = 0
            tail = 0
            if f0 == 0:
                lo = a_start[s]
                hi = a_start[s + 1]
            else:
                lo = b_start[s]
                hi = b_start[s + 1]
            for k in range(lo, hi):
                v = a_nbr[k] if f0 == 0 else b_nbr[k]
                st = 2 * v + f0
                if dist[st] < 0:
                    dist[st] = 1
                    queue[tail] = st
                    tail += 1
            target = 2 * s + (1 - f0)
            while head < tail:
                st = queue[head]
                head += 1
                d = dist[st]
                if d + 1 >= best:
                    break
                v = st // 2
                f = 1 - (st % 2)
                if f == 0:
                    lo = a_start[v]
                    hi = a_start[v + 1]
                else:
                    lo = b_start[v]
                    hi = b_start[v + 1]
                for k in range(lo, hi):
                    w = a_nbr[k] if f == 0 else b_nbr[k]
                    nst = 2 * w + f
                    if dist[nst] < 0:
                        dist[nst] = d + 1
                        if nst == target:
                            if d + 1 < best:
                                best = d + 1
                        queue[tail] = nst
                        tail += 1
    if best > cap:
        return -1
    return best


@njit
def longest_alternating(n_pairs, arc_src, arc_dst, arc_f, lead, trail):
    """Longest piece through the pair graph.

    State 2*p+f means "at pair p, last syllable had factor f". lead[p, f]
    says a partial syllable of factor f can end at p; trail[p, f] says one
    can start there. Returns (length, end_state, pred_state, pred_arc) or
    length -1 when the state graph has a cycle (unbounded pieces).
    pred_state is -1 for a bare start and -2 for a lead.
    """
    ns = 2 * n_pairs
    m = arc_src.shape[0]
    indeg = np.zeros(ns, np.int64)
    out_start = np.zeros(ns + 1, np.int64)
    for k in range(m):
        s = 2 * arc_src[k] + (1 - arc_f[k])
        out_start[s + 1] += 1
        indeg[2 * arc_dst[k] + arc_f[k]] += 1
    for i in range(ns):
        out_start[i + 1] += out_start[i]
    fill = out_start[:-1].copy()
    out_arc = np.empty(m, np.int64)
    for k in range(m):
        s = 2 * arc_src[k] + (1 - arc_f[k])
        out_arc[fill[s]] = k
        fill[s] += 1
    best = np.full(ns, -1, np.int64)
    pred_state = np.full(ns, -3, np.int64)
    pred_arc = np.full(ns, -1, np.int64)
    for p in range(n_pairs):
        for f in range(2):
            if lead[p, f]:
                best[2 * p + f] = 1
                pred_state[2 * p + f] = -2
    # bare starts: a full move out of p with nothing before it
    for k in range(m):
        t = 2 * arc_dst[k] + arc_f[k]
        if best[t] < 1:
            best[t] = 1
            pred_state[t] = -1
            pred_arc[t] = k
    queue = np.empty(ns, np.int64)
    head = 0
    tail = 0
    for s in range(ns):
        if indeg[s] == 0:
            queue[tail] = s
            tail += 1
    while head < tail:
        s = queue[head]
        head += 1
        for j in range(out_start[s], out_start[s + 1]):
            k = out_arc[j]
            t = 2 * arc_dst[k] + arc_f[k]
            if best[s] >= 1 and best[s] + 1 > best[t]:
                best[t] = best[s] + 1
                pred_state[t] = s
                pred_arc[t] = k
            indeg[t] -= 1
            if indeg[t] == 0:
                queue[tail] = t
                tail += 1
    if tail < ns:
        return -1, -1, pred_state, pred_arc
    top = 0
    end = -1
    for s in range(ns):
        if best[s] < 1:
            continue
        p = s // 2
        f = s % 2
        val = best[s] + (1 if trail[p, 1 - f] else 0)
        if val > top:
            top = val
            end = s
    return top, end, pred_state, pred_arc


@njit
def fold_generator_graph(nv, src, dst, lab):
    """Stallings folding of a graph whose edges carry letters a (0) or b (1).

    Returns (rep, out, inn): rep[v] is the root of v; for a root r,
    out[r, g] / inn[r, g] is the root at the other end of its g-edge or -1.
    """
    parent = np.arange(nv)
    out = np.full((nv, 2), -1, np.int64)
    inn = np.full((nv, 2), -1, np.int64)
    cap = 2 * src.shape[0] + 4 * nv + 8
    sx = np.empty(cap, np.int64)
    sy = np.empty(cap, np.int64)
    top = 0
    for e in range(src.shape[0]):
        u = src[e]
        while parent[u] != u:
            u = parent[u]
        v = dst[e]
        while parent[v] != v:
            v = parent[v]
        g = lab[e]
        if out[u, g] < 0:
            out[u, g] = v
        else:
            sx[top] = out[u, g]
            sy[top] = v
            top += 1
        if inn[v, g] < 0:
            inn[v, g] = u
        else:
            sx[top] = inn[v, g]
            sy[top] = u
            top += 1
        while top > 0:
            top -= 1
            x = sx[top]
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            y = sy[top]
            while parent[y] != y:
                parent[y] = parent[parent[y]]
                y = parent[y]
            if x == y:
                continue
            if y < x:
                x, y = y, x
            parent[y] = x
            for g2 in range(2):
                t = out[y, g2]
                if t >= 0:
                    if out[x, g2] < 0:
                        out[x, g2] = t
                    else:
                        sx[top] = out[x, g2]
                        sy[top] = t
                        top += 1
                t = inn[y, g2]
                if t >= 0:
                    if inn[x, g2] < 0:
                        inn[x, g2] = t
                    else:
                        sx[top] = inn[x, g2]
                        sy[top] = t
                        top += 1
    rep = np.empty(nv, np.int64)
    for v in range(nv):
        r = v
        while parent[r] != r:
            r = parent[r]
        rep[v] = r
    for v in range(nv):
        if rep[v] == v:
            for g in range(2):
                if out[v, g] >= 0:
                    out[v, g] = rep[out[v, g]]
                if inn[v, g] >= 0:
                    inn[v, g] = rep[inn[v, g]]
    return rep, out, inn


@njit
def pattern_path_exists(rep, out, inn, length, bletter):
    """Is there a reduced path of exactly `length` letters reading a
    pattern word whose b-letters all equal `bletter` (2 for b, 3 for b^-1)?

    Letters: 0 = a, 1 = a^-1, 2 = b, 3 = b^-1.
    """
    nv = rep.shape[0]
    if length <= 0:
        return True
    cur = np.zeros((nv, 4, 2), np.bool_)
    nxt = np.zeros((nv, 4, 2), np.bool_)
    # first letter
    for v in range(nv):
        if rep[v] != v:
            continue
        for x in range(4):
            if x >= 2 and x != bletter:
                continue
            g = x // 2
            w = out[v, g] if x % 2 == 0 else inn[v, g]
            if w >= 0:
                cur[w, x, 1 if x >= 2 else 0] = True
    for step in range(1, length):
        for v in range(nv):
            for x in range(4):
                for s in range(2):
                    nxt[v, x, s] = False
        for v in range(nv):
            if rep[v] != v:
                continue
            for last in range(4):
                for s in range(2):
                    if not cur[v, last, s]:
                        continue
                    for x in range(4):
                        if x >= 2 and x != bletter:
                            continue
                        if x == (last ^ 1):
                            continue
                        if x >= 2 and last >= 2:
                            continue
                        g = x // 2
                        w = out[v, g] if x % 2 == 0 else inn[v, g]
                        if w >= 0:
                            nxt[w, x, 1 if (s == 1 or x >= 2) else 0] = True
        tmp = cur
        cur = nxt
        nxt = tmp
    for v in range(nv):
        for x in range(4):
            if cur[v, x, 1]:
                return True
    return False


@njit
def completion_counts(tmax):
    """E[m, r]: ways to append m letters after a last letter in relation r
    to the first letter x (0: equal x, 1: equal x^-1, 2: other), keeping
    the word reduced and not ending in x^-1."""
    E = np.zeros((tmax + 1, 3), np.float64)
    E[0, 0] = 1.0
    E[0, 1] = 0.0
    E[0, 2] = 1.0
    for m in range(1, tmax + 1):
        E[m, 0] = E[m - 1, 0] + 2.0 * E[m - 1, 2]
        E[m, 1] = E[m - 1, 1] + 2.0 * E[m - 1, 2]
        E[m, 2] = E[m - 1, 0] + E[m - 1, 1] + E[m - 1, 2]
    return E


@njit
def sample_pattern_trials(u, cum_len, E):
    """For each trial (row of u) draw n cyclically reduced words, one per
    slice u[i, j, :], and report whether any is a pattern word.

    u[i, j, 0] picks the length, u[i, j, 1] the first letter and
    u[i, j, k+1] the k-th successor.
    """
    trials = u.shape[0]
    n = u.shape[1]
    tmax = cum_len.shape[0]
    hits = np.zeros(trials, np.bool_)
    weights = np.zeros(4, np.float64)
    for i in range(trials):
        for j in range(n):
            r = u[i, j, 0]
            ell = tmax
            for k in range(tmax):
                if r < cum_len[k]:
                    ell = k + 1
                    break
            first = int(u[i, j, 1] * 4.0)
            if first > 3:
                first = 3
            last = first
            bsign = -1
            nb = 0
            ok = True
            if first >= 2:
                bsign = first
                nb = 1
            for k in range(1, ell):
                m = ell - k - 1
                total = 0.0
                for x in range(4):
                    if x == (last ^ 1):
                        weights[x] = 0.0
                        continue
                    if x == first:
                        rel = 0
                    elif x == (first ^ 1):
                        rel = 1
                    else:
                        rel = 2
                    weights[x] = E[m, rel]
                    total += weights[x]
                target = u[i, j, k + 1] * total
                acc = 0.0
                pick = -1
                for x in range(4):
                    if weights[x] <= 0.0:
                        continue
                    acc += weights[x]
                    pick = x
                    if target < acc:
                        break
                if pick >= 2:
                    if last >= 2:
                        ok = False
                    if bsign < 0:
                        bsign = pick
                    elif bsign != pick:
                        ok = False
                    nb += 1
                last = pick
            if ok and nb > 0:
                hits[i] = True
                break
    return hits
