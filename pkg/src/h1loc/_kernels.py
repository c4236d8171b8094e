"""Hot integer kernels: Howell elimination, group closure, Cayley transport.

Every function here is written as plain loop-based numpy code and compiled
with numba's ``@njit`` when available.  Setting the environment variable
``H1LOC_NO_NUMBA=1`` selects the uncompiled pure-Python/numpy path instead
(same code, no JIT); ``benchmarks/bench_kernels.py`` compares the two.

All arrays are int64.  Moduli must satisfy q**2 < 2**63 for the linear
algebra and q**4 < 2**63 wherever packed 2x2 matrices are used; the public
layers enforce these bounds before calling in.
"""

import os

import numpy as np

NUMBA_ENABLED = os.environ.get("H1LOC_NO_NUMBA", "").lower() not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:  # fallback: decorator that returns the function unchanged
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

    # int64 hashing relies on wraparound; numba wraps silently, numpy warns
    np.seterr(over="ignore")


@njit(cache=True, nogil=True)
def _modinv(a, q):
    # extended Euclid; a must be a unit mod q
    old_r, r = a % q, q
    old_s, s = 1, 0
    while r != 0:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
    return old_s % q


@njit(cache=True, nogil=True)
def _valuation(x, p):
    # p-adic valuation of x != 0
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@njit(cache=True, nogil=True)
def howell_core(a, q, p, n):
    """Howell normal form of the row span of ``a`` over Z/qZ, q = p**n.

    Returns ``(work, r, piv)`` where ``work[:r]`` are the canonical rows and
    ``piv[:r]`` their pivot columns.  Pivots are normalized to pure powers
    of p, entries above a pivot are reduced below it, and for every pivot
    p**v with v > 0 the annihilator multiple p**(n-v) * row is folded back
    in, which is what makes the form canonical for the span.
    """
    rows, cols = a.shape
    capacity = rows * (n + 1) + 1
    work = np.zeros((capacity, cols), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            work[i, j] = a[i, j] % q
    nrow = rows
    piv = np.empty(capacity, dtype=np.int64)
    r = 0
    for c in range(cols):
        # pivot choice: smallest valuation wins, earliest row breaks ties
        best = -1
        bestv = n + 1
        for i in range(r, nrow):
            x = work[i, c]
            if x != 0:
                v = _valuation(x, p)
                if v < bestv:
                    bestv = v
                    best = i
                    if v == 0:
                        break
        if best < 0:
            continue
        if best != r:
            for j in range(c, cols):
                tmp = work[r, j]
                work[r, j] = work[best, j]
                work[best, j] = tmp
        pv = 1
        for _ in range(bestv):
            pv *= p
        u = work[r, c] // pv
        if u != 1:
            ui = _modinv(u, q)
            for j in range(c, cols):
                work[r, j] = (work[r, j] * ui) % q
        # clear below: entries in this column all have valuation >= bestv
        for i in range(r + 1, nrow):
            x = work[i, c]
            if x != 0:
                f = x // pv
                for j in range(c, cols):
                    work[i, j] = (work[i, j] - f * work[r, j]) % q
        # reduce above so entries sit below the pivot value
        for i in range(r):
            x = work[i, c]
            if x >= pv:
                f = x // pv
                for j in range(c, cols):
                    work[i, j] = (work[i, j] - f * work[r, j]) % q
        if bestv > 0:
            ann = q // pv
            nz = False
            for j in range(c + 1, cols):
                val = (work[r, j] * ann) % q
                work[nrow, j] = val
                if val != 0:
                    nz = True
            if nz:
                for j in range(c + 1):
                    work[nrow, j] = 0
                nrow += 1
        piv[r] = c
        r += 1
    return work, r, piv


@njit(cache=True, nogil=True)
def _pack(a, b, c, d, q):
    return ((a * q + b) * q + c) * q + d


@njit(cache=True, nogil=True)
def _unpack(x, q):
    d = x % q
    x //= q
    c = x % q
    x //= q
    b = x % q
    a = x // q
    return a, b, c, d


@njit(cache=True, nogil=True)
def mul_packed(x, y, q):
    xa, xb, xc, xd = _unpack(x, q)
    ya, yb, yc, yd = _unpack(y, q)
    return _pack(
        (xa * ya + xb * yc) % q,
        (xa * yb + xb * yd) % q,
        (xc * ya + xd * yc) % q,
        (xc * yb + xd * yd) % q,
        q,
    )


@njit(cache=True, nogil=True)
def inv_packed(x, q):
    a, b, c, d = _unpack(x, q)
    det = (a * d - b * c) % q
    di = _modinv(det, q)
    return _pack((d * di) % q, (-b * di) % q, (-c * di) % q, (a * di) % q, q)


@njit(cache=True, nogil=True)
def element_orders_packed(elems, q):
    n = elems.shape[0]
    ident = _pack(1, 0, 0, 1, q)
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        x = elems[i]
        k = 1
        y = x
        while y != ident:
            y = mul_packed(x, y, q)
            k += 1
        out[i] = k
    return out


@njit(cache=True, nogil=True)
def conjugate_all(elems, cinv, c, q):
    n = elems.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = mul_packed(mul_packed(cinv, elems[i], q), c, q)
    return out


@njit(cache=True, nogil=True)
def reduce_all(elems, q, qj):
    n = elems.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        a, b, c, d = _unpack(elems[i], q)
        out[i] = _pack(a % qj, b % qj, c % qj, d % qj, qj)
    return out


@njit(cache=True, nogil=True)
def pairwise_commutators(elems, q):
    n = elems.shape[0]
    out = np.empty(n * n, dtype=np.int64)
    t = 0
    for i in range(n):
        for j in range(n):
            xy = mul_packed(elems[i], elems[j], q)
            yx = mul_packed(elems[j], elems[i], q)
            out[t] = mul_packed(xy, inv_packed(yx, q), q)
            t += 1
    return out


@njit(cache=True, nogil=True)
def _hash_slot(key, mask):
    h = key * np.int64(-7046029254386353131)  # 0x9E3779B97F4A7C15 as signed
    return (h ^ (h >> 29)) & mask


@njit(cache=True, nogil=True)
def _set_insert(keys, mask, key):
    """Insert into an open-addressing set; returns True if newly added."""
    s = _hash_slot(key, mask)
    while True:
        k = keys[s]
        if k == key:
            return False
        if k == -1:
            keys[s] = key
            return True
        s = (s + 1) & mask


@njit(cache=True, nogil=True)
def closure_packed(gens, q, cap):
    """BFS closure of packed 2x2 matrices under left multiplication.

    Returns ``(elems, count)``; count == -1 means the cap was exceeded.
    Insertion order (identity first, then FIFO over generators in the
    given order) is the canonical element ordering used everywhere.
    """
    m = 1
    while m < 4 * (cap + 2):
        m <<= 1
    mask = m - 1
    keys = np.full(m, np.int64(-1))
    elems = np.empty(cap + 1, dtype=np.int64)
    ident = _pack(1, 0, 0, 1, q)
    elems[0] = ident
    _set_insert(keys, mask, ident)
    count = 1
    head = 0
    while head < count:
        w = elems[head]
        head += 1
        for t in range(gens.shape[0]):
            pr = mul_packed(gens[t], w, q)
            if _set_insert(keys, mask, pr):
                if count >= cap:
                    return elems, -1
                elems[count] = pr
                count += 1
    return elems, count


@njit(cache=True, nogil=True)
def build_lookup(packed):
    """Open-addressing map from packed value to its index in ``packed``."""
    n = packed.shape[0]
    m = 1
    while m < 4 * (n + 2):
        m <<= 1
    keys = np.full(m, np.int64(-1))
    vals = np.empty(m, dtype=np.int64)
    mask = m - 1
    for i in range(n):
        key = packed[i]
        s = _hash_slot(key, mask)
        while keys[s] != -1:
            s = (s + 1) & mask
        keys[s] = key
        vals[s] = i
    return keys, vals


@njit(cache=True, nogil=True)
def lookup_index(keys, vals, key):
    mask = keys.shape[0] - 1
    s = _hash_slot(key, mask)
    while True:
        k = keys[s]
        if k == key:
            return vals[s]
        if k == -1:
            return -1
        s = (s + 1) & mask


@njit(cache=True, nogil=True)
def build_table(packed, q, keys, vals):
    """Full multiplication table: table[i, j] = index of elem_i * elem_j."""
    n = packed.shape[0]
    table = np.empty((n, n), dtype=np.int32)
    for i in range(n):
        xi = packed[i]
        for j in range(n):
            pr = mul_packed(xi, packed[j], q)
            table[i, j] = lookup_index(keys, vals, pr)
    return table


@njit(cache=True, nogil=True)
def element_orders(table, ident):
    n = table.shape[0]
    orders = np.empty(n, dtype=np.int64)
    for i in range(n):
        k = 1
        j = i
        while j != ident:
            j = table[i, j]
            k += 1
        orders[i] = k
    return orders


@njit(cache=True, nogil=True)
def close_idx(table, gens, ident, cap, visited, stamp, out):
    """Closure inside an ambient group given its multiplication table.

    ``visited`` is caller-owned scratch of ambient size marked with
    ``stamp`` (avoids clearing between calls).  Returns the element count
    or -1 when the cap is exceeded; elements land in ``out`` in BFS order.
    """
    out[0] = ident
    visited[ident] = stamp
    count = 1
    head = 0
    while head < count:
        w = out[head]
        head += 1
        for t in range(gens.shape[0]):
            nxt = table[gens[t], w]
            if visited[nxt] != stamp:
                if count >= cap:
                    return -1
                visited[nxt] = stamp
                out[count] = nxt
                count += 1
    return count


@njit(cache=True, nogil=True)
def cayley_transport(elems, gens, q):
    """Per-element transport matrices for cocycles determined on generators.

    For the cocycle identity z(g*x) = z(g) + g . z(x), every value z(x) is a
    linear function A[x] of the stacked generator values (a 2 x 2k matrix).
    Also returns prod[i, x] = local index of gens[i] * elems[x] (-1 never
    occurs for a closed set) and pos0, the index of the identity.
    """
    n = elems.shape[0]
    k = gens.shape[0]
    keys, vals = build_lookup(elems)
    gm = np.empty((k, 2, 2), dtype=np.int64)
    for t in range(k):
        a, b, c, d = _unpack(gens[t], q)
        gm[t, 0, 0] = a
        gm[t, 0, 1] = b
        gm[t, 1, 0] = c
        gm[t, 1, 1] = d
    prod = np.empty((k, n), dtype=np.int64)
    for x in range(n):
        for t in range(k):
            prod[t, x] = lookup_index(keys, vals, mul_packed(gens[t], elems[x], q))
    A = np.zeros((n, 2, 2 * k), dtype=np.int64)
    done = np.zeros(n, dtype=np.uint8)
    ident = _pack(1, 0, 0, 1, q)
    pos0 = lookup_index(keys, vals, ident)
    done[pos0] = 1
    queue = np.empty(n, dtype=np.int64)
    queue[0] = pos0
    count = 1
    head = 0
    while head < count:
        w = queue[head]
        head += 1
        for t in range(k):
            nxt = prod[t, w]
            if done[nxt] == 0:
                done[nxt] = 1
                # A[nxt] = E_t + gm[t] @ A[w]
                for i in range(2):
                    for j in range(2 * k):
                        A[nxt, i, j] = (
                            gm[t, i, 0] * A[w, 0, j] + gm[t, i, 1] * A[w, 1, j]
                        ) % q
                    A[nxt, i, 2 * t + i] = (A[nxt, i, 2 * t + i] + 1) % q
                queue[count] = nxt
                count += 1
    return A, prod, pos0


@njit(cache=True, nogil=True)
def cocycle_search(elems, gens, q, max_out):
    """Exhaustive cocycle enumeration by candidate filtering (oracle path).

    Walks every assignment of generator values in M = (Z/qZ)^2, propagates
    it over the whole group along a spanning tree of the Cayley graph, and
    keeps exactly the maps satisfying z(g*x) = z(g) + g . z(x) for every
    generator g and every group element x.  Independent of the linear
    algebra solver on purpose.  Returns (flat values, count); count == -1
    signals overflow of ``max_out``.
    """
    n = elems.shape[0]
    k = gens.shape[0]
    A, prod, pos0 = cayley_transport(elems, gens, q)
    gm = np.empty((k, 2, 2), dtype=np.int64)
    for t in range(k):
        a, b, c, d = _unpack(gens[t], q)
        gm[t, 0, 0] = a
        gm[t, 0, 1] = b
        gm[t, 1, 0] = c
        gm[t, 1, 1] = d
    # spanning tree in BFS order
    parent = np.full(n, -1, dtype=np.int64)
    pgen = np.full(n, -1, dtype=np.int64)
    bfs = np.empty(n, dtype=np.int64)
    bfspos = np.empty(n, dtype=np.int64)
    bfs[0] = pos0
    bfspos[pos0] = 0
    count = 1
    head = 0
    while head < count:
        w = bfs[head]
        head += 1
        for t in range(k):
            nxt = prod[t, w]
            if nxt != pos0 and parent[nxt] == -1:
                parent[nxt] = w
                pgen[nxt] = t
                bfs[count] = nxt
                bfspos[nxt] = count
                count += 1
    # non-tree constraints (t, x) checked as soon as both endpoints have values
    ncon = 0
    con_t = np.empty(k * n, dtype=np.int64)
    con_x = np.empty(k * n, dtype=np.int64)
    con_at = np.empty(k * n, dtype=np.int64)
    for x in range(n):
        for t in range(k):
            y = prod[t, x]
            if y != pos0 and parent[y] == x and pgen[y] == t:
                continue  # tree edge
            at = bfspos[x]
            if bfspos[y] > at:
                at = bfspos[y]
            con_t[ncon] = t
            con_x[ncon] = x
            con_at[ncon] = at
            ncon += 1
    order = np.argsort(con_at[:ncon], kind="mergesort")
    total = 1
    m2 = q * q
    for _ in range(2 * k):
        total *= q
        if total > 1 << 62:
            return np.empty((0, 0), dtype=np.int64), -2  # candidate space too big
    out = np.empty((max_out, 2 * n), dtype=np.int64)
    nout = 0
    z = np.empty((n, 2), dtype=np.int64)
    v = np.empty(2 * k, dtype=np.int64)
    for cand in range(total):
        rem = cand
        for j in range(2 * k):
            v[j] = rem % q
            rem //= q
        z[pos0, 0] = 0
        z[pos0, 1] = 0
        ok = True
        ci = 0
        for step in range(n):
            x = bfs[step]
            if step > 0:
                w = parent[x]
                t = pgen[x]
                z[x, 0] = (v[2 * t] + gm[t, 0, 0] * z[w, 0] + gm[t, 0, 1] * z[w, 1]) % q
                z[x, 1] = (v[2 * t + 1] + gm[t, 1, 0] * z[w, 0] + gm[t, 1, 1] * z[w, 1]) % q
            while ci < ncon and con_at[order[ci]] == step:
                e = order[ci]
                ci += 1
                t = con_t[e]
                xx = con_x[e]
                yy = prod[t, xx]
                if (
                    z[yy, 0] != (v[2 * t] + gm[t, 0, 0] * z[xx, 0] + gm[t, 0, 1] * z[xx, 1]) % q
                    or z[yy, 1]
                    != (v[2 * t + 1] + gm[t, 1, 0] * z[xx, 0] + gm[t, 1, 1] * z[xx, 1]) % q
                ):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            if nout >= max_out:
                return out, -1
            for x in range(n):
                out[nout, 2 * x] = z[x, 0]
                out[nout, 2 * x + 1] = z[x, 1]
            nout += 1
    return out, nout


@njit(cache=True, nogil=True)
def span_enumerate(rows, q, cap):
    """All vectors in the row span over Z/qZ (small oracle helper).

    Returns (vectors, count); count == -1 when more than ``cap`` vectors.
    """
    r, cols = rows.shape
    m = 1
    while m < 4 * (cap + 2):
        m <<= 1
    mask = m - 1
    keys = np.full(m, np.int64(-1))
    slots = np.full(m, np.int64(-1))
    out = np.zeros((cap + 1, cols), dtype=np.int64)
    # fingerprint rows by polynomial hashing to dedupe; exactness is
    # restored by storing full vectors and comparing on collision
    count = 1  # zero vector is out[0]
    zkey = np.int64(0)
    _ = zkey
    # insert zero vector fingerprint
    s = _hash_slot(np.int64(0), mask)
    keys[s] = 0
    slots[s] = 0
    head = 0
    while head < count:
        base = out[head]
        head += 1
        for i in range(r):
            vec = np.empty(cols, dtype=np.int64)
            key = np.int64(1469598103934665603)
            for j in range(cols):
                val = (base[j] + rows[i, j]) % q
                vec[j] = val
                key = (key ^ val) * np.int64(1099511628211)
            if key == -1:
                key = np.int64(-2)
            # probe
            s = _hash_slot(key, mask)
            found = False
            while keys[s] != -1:
                if keys[s] == key:
                    cand = slots[s]
                    same = True
                    for j in range(cols):
                        if out[cand, j] != vec[j]:
                            same = False
                            break
                    if same:
                        found = True
                        break
                s = (s + 1) & mask
            if not found:
                if count > cap:
                    return out, -1
                keys[s] = key
                slots[s] = count
                for j in range(cols):
                    out[count, j] = vec[j]
                count += 1
    return out, count
