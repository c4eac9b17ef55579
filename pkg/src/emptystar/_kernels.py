"""Compiled kernels for the hot loops.

Everything here works on plain float64 / int arrays so that the public
modules can stay in ordinary numpy.  Orientation signs are exact: a static
floating-point filter decides the easy cases and an expansion-arithmetic
fallback (planar) or a sentinel value (spatial, resolved by the caller)
handles the rest.
"""

import numpy as np
from numba import njit

EPS = 2.0 ** -53
SPLITTER = 2.0 ** 27 + 1.0
CCW_ERRBOUND = (3.0 + 16.0 * EPS) * EPS
O3D_ERRBOUND = (7.0 + 56.0 * EPS) * EPS

# returned by filtered predicates when the float filter cannot decide
UNSURE = 2


@njit(cache=True, nogil=True)
def _two_product(a, b):
    x = a * b
    c = SPLITTER * a
    ahi = c - (c - a)
    alo = a - ahi
    c = SPLITTER * b
    bhi = c - (c - b)
    blo = b - bhi
    err1 = x - ahi * bhi
    err2 = err1 - alo * bhi
    err3 = err2 - ahi * blo
    return x, alo * blo - err3


@njit(cache=True, nogil=True)
def _two_sum(a, b):
    x = a + b
    bvirt = x - a
    avirt = x - bvirt
    return x, (a - avirt) + (b - bvirt)


@njit(cache=True, nogil=True)
def _expansion_sign(terms):
    # grow-expansion with zero elimination; the top component carries the sign
    h = np.empty(terms.shape[0] + 1)
    hlen = 0
    for t in range(terms.shape[0]):
        q = terms[t]
        k = 0
        for i in range(hlen):
            q, hh = _two_sum(q, h[i])
            if hh != 0.0:
                h[k] = hh
                k += 1
        if q != 0.0:
            h[k] = q
            k += 1
        hlen = k
    if hlen == 0:
        return 0
    return 1 if h[hlen - 1] > 0.0 else -1


@njit(cache=True, nogil=True)
def orient2d_exact(ax, ay, bx, by, cx, cy):
    """Sign of det[b - a, c - a]; +1 for a counterclockwise turn."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    bound = CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    terms = np.empty(12)
    # ax*by - ax*cy + bx*cy - bx*ay + cx*ay - cx*by, each product split exactly
    p, q = _two_product(ax, by)
    terms[0] = p
    terms[1] = q
    p, q = _two_product(-ax, cy)
    terms[2] = p
    terms[3] = q
    p, q = _two_product(bx, cy)
    terms[4] = p
    terms[5] = q
    p, q = _two_product(-bx, ay)
    terms[6] = p
    terms[7] = q
    p, q = _two_product(cx, ay)
    terms[8] = p
    terms[9] = q
    p, q = _two_product(-cx, by)
    terms[10] = p
    terms[11] = q
    return _expansion_sign(terms)


@njit(cache=True, nogil=True)
def orient3d_filtered(a, b, c, d):
    """Sign of det[b-a, c-a, d-a], or UNSURE if the float filter fails."""
    adx = a[0] - d[0]
    bdx = b[0] - d[0]
    cdx = c[0] - d[0]
    ady = a[1] - d[1]
    bdy = b[1] - d[1]
    cdy = c[1] - d[1]
    adz = a[2] - d[2]
    bdz = b[2] - d[2]
    cdz = c[2] - d[2]
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    cdxady = cdx * ady
    adxcdy = adx * cdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    det = (adz * (bdxcdy - cdxbdy)
           + bdz * (cdxady - adxcdy)
           + cdz * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * abs(adz)
                 + (abs(cdxady) + abs(adxcdy)) * abs(bdz)
                 + (abs(adxbdy) + abs(bdxady)) * abs(cdz))
    bound = O3D_ERRBOUND * permanent
    # det[a-d, b-d, c-d] equals -det[b-a, c-a, d-a]
    if det > bound:
        return -1
    if -det > bound:
        return 1
    if permanent == 0.0:
        return 0
    return UNSURE


# ---------------------------------------------------------------------------
# planar empty triangles
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _angular_order(xs, ys, anchor, cand):
    """Sort ``cand`` counterclockwise around ``anchor`` (all lie to its right).

    A float slope sort gets the order almost right; an insertion pass with the
    exact predicate repairs whatever the rounding got wrong.
    """
    m = cand.shape[0]
    ax = xs[anchor]
    ay = ys[anchor]
    keys = np.empty(m)
    for i in range(m):
        dx = xs[cand[i]] - ax
        dy = ys[cand[i]] - ay
        if dx > 0.0:
            keys[i] = dy / dx
        elif dy > 0.0:
            keys[i] = np.inf
        else:
            keys[i] = -np.inf
    order = cand[np.argsort(keys, kind="mergesort")]
    for i in range(1, m):
        v = order[i]
        j = i - 1
        while j >= 0 and orient2d_exact(ax, ay, xs[v], ys[v],
                                        xs[order[j]], ys[order[j]]) > 0:
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = v
    return order


@njit(cache=True, nogil=True)
def planar_empty_triangles(xs, ys, lex):
    """All empty triangles of a planar point set.

    ``lex`` is the lexicographic (x, then y) order of the points.  Each
    triangle is charged to its lexicographically smallest vertex.  Around
    that anchor the remaining points to its right are sorted by angle, and the
    empty triangles anchored there are exactly the edges of the visibility
    graph of the resulting star-shaped chain.  The graph is built with one
    queue of incoming edges per vertex so each edge costs O(1) amortized.

    Returns ``(tri, bad)`` where ``tri`` is a (T, 3) int32 array of sorted
    index triples and ``bad`` is a collinear (or repeated) triple found while
    sorting, or ``(-1, -1, -1)`` if the input is in general position.
    """
    n = xs.shape[0]
    bad = np.full(3, -1, dtype=np.int64)
    cap = max(1024, 3 * n * n)
    tri = np.empty((cap, 3), dtype=np.int32)
    count = 0
    if n < 3:
        return tri[:0], bad
    pool_cap = n * (n - 1) // 2 + n
    val = np.empty(pool_cap, dtype=np.int64)
    nxt = np.empty(pool_cap, dtype=np.int64)
    head = np.empty(n, dtype=np.int64)
    tail = np.empty(n, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    for r in range(n - 2):
        a = lex[r]
        q = _angular_order(xs, ys, a, lex[r + 1:])
        m = q.shape[0]
        ax = xs[a]
        ay = ys[a]
        for i in range(m - 1):
            if orient2d_exact(ax, ay, xs[q[i]], ys[q[i]],
                              xs[q[i + 1]], ys[q[i + 1]]) == 0:
                bad[0] = a
                bad[1] = q[i]
                bad[2] = q[i + 1]
                return tri[:0], bad
        for i in range(m):
            head[i] = -1
            tail[i] = -1
        used = 0
        for i in range(m - 1):
            j = i + 1
            qjx = xs[q[j]]
            qjy = ys[q[j]]
            stack[0] = i
            sp = 1
            while sp > 0:
                x = stack[sp - 1]
                h = head[x]
                if h != -1 and orient2d_exact(xs[q[val[h]]], ys[q[val[h]]],
                                              xs[q[x]], ys[q[x]],
                                              qjx, qjy) > 0:
                    stack[sp] = val[h]
                    sp += 1
                    continue
                if count == tri.shape[0]:
                    grown = np.empty((2 * tri.shape[0], 3), dtype=np.int32)
                    grown[:count] = tri[:count]
                    tri = grown
                u = q[x]
                w = q[j]
                # sort the triple (a, u, w)
                lo = a
                mid = u
                hi = w
                if lo > mid:
                    lo, mid = mid, lo
                if mid > hi:
                    mid, hi = hi, mid
                if lo > mid:
                    lo, mid = mid, lo
                tri[count, 0] = lo
                tri[count, 1] = mid
                tri[count, 2] = hi
                count += 1
                # enqueue x on the queue of j
                val[used] = x
                nxt[used] = -1
                if tail[j] == -1:
                    head[j] = used
                else:
                    nxt[tail[j]] = used
                tail[j] = used
                used += 1
                sp -= 1
                if sp > 0:
                    p = stack[sp - 1]
                    head[p] = nxt[head[p]]
                    if head[p] == -1:
                        tail[p] = -1
    return tri[:count], bad


@njit(cache=True, nogil=True)
def planar_collinear_triple(xs, ys, lex):
    """First collinear or repeated triple found by angular sorting, else -1s."""
    n = xs.shape[0]
    bad = np.full(3, -1, dtype=np.int64)
    if n < 3:
        return bad
    for r in range(n - 2):
        a = lex[r]
        q = _angular_order(xs, ys, a, lex[r + 1:])
        for i in range(q.shape[0] - 1):
            if orient2d_exact(xs[a], ys[a], xs[q[i]], ys[q[i]],
                              xs[q[i + 1]], ys[q[i + 1]]) == 0:
                bad[0] = a
                bad[1] = q[i]
                bad[2] = q[i + 1]
                return bad
    return bad


# ---------------------------------------------------------------------------
# spatial (d = 3) facet sides and bitmask enumeration for any d
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def facet_point_signs_3d(pts, facets):
    """Orientation of (facet, point) for every facet triple and every point.

    Entries equal to UNSURE must be resolved exactly by the caller.
    """
    nf = facets.shape[0]
    n = pts.shape[0]
    out = np.empty((nf, n), dtype=np.int8)
    for f in range(nf):
        a = pts[facets[f, 0]]
        b = pts[facets[f, 1]]
        c = pts[facets[f, 2]]
        for m in range(n):
            out[f, m] = orient3d_filtered(a, b, c, pts[m])
    return out


@njit(cache=True, nogil=True)
def _rank(comb, skip, binom):
    # colexicographic rank of comb with position ``skip`` removed
    r = 0
    pos = 0
    for i in range(comb.shape[0]):
        if i == skip:
            continue
        pos += 1
        r += binom[comb[i], pos]
    return r


@njit(cache=True, nogil=True)
def bitmask_empty_simplices(n, d, signs, pos_mask, neg_mask, binom):
    """Enumerate empty (d+1)-subsets from precomputed facet sides.

    ``signs[f, m]`` is the orientation of facet ``f`` (colex rank of a sorted
    d-subset) followed by point ``m``; ``pos_mask``/``neg_mask`` hold the same
    information as packed uint64 bit rows.  A point lies in the open simplex
    iff it is strictly on the vertex side of every facet, so emptiness is an
    AND over d+1 bit rows.

    Returns ``(simplices, bad)`` with ``bad[0] >= 0`` marking a degenerate
    subset (its first d+1 entries) found during the sweep.
    """
    words = pos_mask.shape[1]
    cap = 1024
    out = np.empty((cap, d + 1), dtype=np.int32)
    count = 0
    bad = np.full(d + 1, -1, dtype=np.int64)
    comb = np.arange(d + 1)
    acc = np.empty(words, dtype=np.uint64)
    while True:
        for w in range(words):
            acc[w] = ~np.uint64(0)
        degenerate = False
        for i in range(d + 1):
            f = _rank(comb, i, binom)
            s = signs[f, comb[i]]
            if s == 0:
                degenerate = True
                break
            if s > 0:
                for w in range(words):
                    acc[w] &= pos_mask[f, w]
            else:
                for w in range(words):
                    acc[w] &= neg_mask[f, w]
        if degenerate:
            for i in range(d + 1):
                bad[i] = comb[i]
            return out[:count], bad
        empty = True
        for w in range(words):
            if acc[w] != 0:
                empty = False
                break
        if empty:
            if count == out.shape[0]:
                grown = np.empty((2 * out.shape[0], d + 1), dtype=np.int32)
                grown[:count] = out[:count]
                out = grown
            for i in range(d + 1):
                out[count, i] = comb[i]
            count += 1
        # next combination in lexicographic order
        i = d
        while i >= 0 and comb[i] == n - d - 1 + i:
            i -= 1
        if i < 0:
            break
        comb[i] += 1
        for j in range(i + 1, d + 1):
            comb[j] = comb[j - 1] + 1
    return out[:count], bad
