"""Independent brute-force oracles for the cohomology pipeline.

Everything here avoids the Howell-form solver on purpose: cocycles are
found by exhaustive candidate filtering, quotients by coset counting, and
invariant factors by an order census.  Desk-scale groups only.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from . import _kernels as K
from .matgroup import Group


def all_map_cocycles(group: Group, limit: int = 2_000_000) -> set[tuple[int, ...]]:
    """Literal filter over every map G -> M; only for the tiniest groups."""
    q = group.modulus.q
    n = group.order
    total = (q * q) ** n
    if total > limit:
        raise ValueError(f"map space of size {total} exceeds limit {limit}")
    mats = [group.element(i) for i in range(n)]
    table = [[group.index_of(mats[i] * mats[j]) for j in range(n)] for i in range(n)]
    vectors = list(product(range(q), repeat=2))
    out = set()
    for assignment in product(range(len(vectors)), repeat=n):
        vals = [vectors[a] for a in assignment]
        ok = True
        for i in range(n):
            gi = mats[i]
            for j in range(n):
                exp = gi.apply(vals[j])
                target = vals[table[i][j]]
                if (
                    (vals[i][0] + exp[0]) % q != target[0]
                    or (vals[i][1] + exp[1]) % q != target[1]
                ):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.add(tuple(v for pair in vals for v in pair))
    return out


def cocycle_set(group: Group, max_out: int = 1 << 20) -> np.ndarray:
    """All cocycles via exhaustive generator-value search (kernel-assisted)."""
    gens = np.array([g.packed for g in group.generators], dtype=np.int64)
    if gens.shape[0] == 0:
        return np.zeros((1, 2 * group.order), dtype=np.int64)
    cap = 1 << 12
    while True:
        out, count = K.cocycle_search(group.packed, gens, group.modulus.q, cap)
        if count == -2:
            raise ValueError("candidate space too large for the brute-force oracle")
        if count >= 0:
            return out[:count].copy()
        cap *= 8
        if cap > max_out:
            raise ValueError("cocycle count exceeded oracle output cap")


def coboundary_set(group: Group) -> np.ndarray:
    """All coboundaries x -> (x - 1) W by enumerating W in M."""
    q = group.modulus.q
    n = group.order
    deltas = np.stack(
        [
            (group.element(i).array() - np.eye(2, dtype=np.int64)) % q
            for i in range(n)
        ]
    )  # (n, 2, 2)
    ws = np.array(list(product(range(q), repeat=2)), dtype=np.int64)  # (q^2, 2)
    vals = np.einsum("xab,wb->wxa", deltas, ws) % q  # (q^2, n, 2)
    flat = vals.reshape(ws.shape[0], 2 * n)
    return np.unique(flat, axis=0)


def local_filter(group: Group, zset: np.ndarray) -> np.ndarray:
    """Keep cocycles whose value at every x lies in the explicit set Im(x-1)."""
    q = group.modulus.q
    n = group.order
    keep = np.ones(zset.shape[0], dtype=bool)
    ws = np.array(list(product(range(q), repeat=2)), dtype=np.int64)
    for i in range(n):
        m = group.element(i)
        delta = (m.array() - np.eye(2, dtype=np.int64)) % q
        image = np.einsum("ab,wb->wa", delta, ws) % q
        member = np.zeros(q * q, dtype=bool)
        member[image[:, 0] * q + image[:, 1]] = True
        keep &= member[zset[:, 2 * i] * q + zset[:, 2 * i + 1]]
    return zset[keep]


def _byte_set(rows: np.ndarray) -> set[bytes]:
    return {np.ascontiguousarray(r).tobytes() for r in rows}


def census_invariants(zset: np.ndarray, bset: np.ndarray, p: int, n: int) -> tuple[int, ...]:
    """Invariant factors of the quotient group zset/bset by order counting.

    For each e, the elements of order dividing p^e in the quotient are the
    cocycles z with p^e * z a coboundary; the counts determine the factor
    multiset uniquely.
    """
    q = p**n
    bbytes = _byte_set(bset % q)
    counts = []
    for e in range(n + 1):
        scaled = (zset * p**e) % q
        c = sum(1 for row in scaled if np.ascontiguousarray(row).tobytes() in bbytes)
        assert c % len(bbytes) == 0
        counts.append(c // len(bbytes))
    logs = []
    for m in counts:
        lg = 0
        while m > 1:
            assert m % p == 0
            m //= p
            lg += 1
        logs.append(lg)
    # logs[e] - logs[e-1] counts the invariant factors with exponent >= e
    exps = []
    for e in range(1, n + 1):
        ge_e = logs[e] - logs[e - 1]
        ge_next = logs[e + 1] - logs[e] if e + 1 <= n else 0
        exps.extend([e] * (ge_e - ge_next))
    return tuple(sorted(p**e for e in exps))


def oracle_h1(group: Group) -> tuple[int, ...]:
    z = cocycle_set(group)
    b = coboundary_set(group)
    return census_invariants(z, b, group.modulus.p, group.modulus.n)


def oracle_h1_loc(group: Group) -> tuple[int, ...]:
    z = local_filter(group, cocycle_set(group))
    b = coboundary_set(group)
    return census_invariants(z, b, group.modulus.p, group.modulus.n)
