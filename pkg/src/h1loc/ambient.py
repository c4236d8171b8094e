"""Ambient GL2(Z/p^nZ) enumeration, subgroup scans, and samplers.

Exhaustive subgroup enumeration works bottom-up: every subgroup is
reachable by repeatedly adjoining one element of prime-power order, and
restricting the adjoined elements to one representative generator per
cyclic subgroup keeps the pair count manageable.  Dedup is by exact
element-index sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from . import _kernels as K
from .errors import ClosureCapExceeded, InputError
from .matgroup import DEFAULT_CLOSURE_CAP, Group, Mat2
from .residues import PrimePowerModulus

DEFAULT_AMBIENT_BOUND = 5000


@dataclass
class Ambient:
    """The full group GL2(Z/p^nZ) with its multiplication table."""

    modulus: PrimePowerModulus
    packed: np.ndarray

    @cached_property
    def lookup(self):
        return K.build_lookup(self.packed)

    @cached_property
    def table(self) -> np.ndarray:
        keys, vals = self.lookup
        return K.build_table(self.packed, self.modulus.q, keys, vals)

    @cached_property
    def identity_index(self) -> int:
        keys, vals = self.lookup
        ident = Mat2.identity(self.modulus).packed
        return int(K.lookup_index(keys, vals, ident))

    @cached_property
    def orders(self) -> np.ndarray:
        return K.element_orders(self.table, self.identity_index)

    @property
    def size(self) -> int:
        return int(self.packed.shape[0])

    def index_of_packed(self, value: int) -> int:
        keys, vals = self.lookup
        return int(K.lookup_index(keys, vals, np.int64(value)))

    def subgroup(self, indices: np.ndarray, gens: Optional[list[int]] = None) -> Group:
        generators = None
        if gens is not None:
            generators = tuple(
                Mat2.from_packed(int(self.packed[i]), self.modulus) for i in gens
            )
        return Group.from_closed(self.packed[indices], self.modulus, generators)


def ambient_general_linear(modulus: PrimePowerModulus,
                           bound: int = DEFAULT_AMBIENT_BOUND) -> Ambient:
    """Enumerate GL2(Z/p^nZ) in lexicographic entry order."""
    q, p = modulus.q, modulus.p
    size = _gl2_order(modulus)
    if size > bound:
        raise InputError(
            f"|GL2(Z/{q})| = {size} exceeds the exhaustive bound {bound}"
        )
    out = np.empty(size, dtype=np.int64)
    t = 0
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    if (a * d - b * c) % p != 0:
                        out[t] = ((a * q + b) * q + c) * q + d
                        t += 1
    assert t == size
    return Ambient(modulus, out)


def _gl2_order(modulus: PrimePowerModulus) -> int:
    p, n = modulus.p, modulus.n
    return p ** (4 * (n - 1)) * (p * p - 1) * (p * p - p)


def prime_power_cyclic_generators(ambient: Ambient) -> list[int]:
    """One representative generator index per cyclic subgroup of prime-power order."""
    orders = ambient.orders
    table = ambient.table
    seen: set[frozenset] = set()
    reps = []
    for i in range(ambient.size):
        o = int(orders[i])
        if o == 1 or not _is_prime_power(o):
            continue
        cyc = [ambient.identity_index]
        j = i
        while j != ambient.identity_index:
            cyc.append(j)
            j = int(table[i, j])
        key = frozenset(cyc)
        if key not in seen:
            seen.add(key)
            reps.append(i)
    return reps


def _is_prime_power(x: int) -> bool:
    d = 2
    while d * d <= x:
        if x % d == 0:
            while x % d == 0:
                x //= d
            return x == 1
        d += 1
    return True  # x is prime (or 1, excluded by callers)


@dataclass
class SubgroupRecord:
    indices: np.ndarray  # sorted ambient indices
    gen_indices: tuple[int, ...]

    @property
    def order(self) -> int:
        return int(self.indices.shape[0])


def enumerate_subgroups(ambient: Ambient, max_order: Optional[int] = None) -> list[SubgroupRecord]:
    """All subgroups (optionally up to an order bound), by cyclic extension.

    Correctness: any subgroup K is generated by its prime-power-order
    elements, so a chain 1 < H_1 < ... < K exists where each step adjoins
    one such element; with an order cap, every chain stays below the cap
    because all the H_i sit inside K.
    """
    table = ambient.table
    n_amb = ambient.size
    cap = max_order if max_order is not None else n_amb
    reps = prime_power_cyclic_generators(ambient)
    rep_arr = [int(r) for r in reps]
    visited = np.zeros(n_amb, dtype=np.int64)
    stamp = 0
    scratch = np.empty(cap + 1, dtype=np.int32)
    ident = ambient.identity_index

    def closure(gens: tuple[int, ...]) -> Optional[np.ndarray]:
        nonlocal stamp
        stamp += 1
        g = np.array(gens, dtype=np.int32)
        cnt = K.close_idx(table, g, ident, cap + 1, visited, stamp, scratch)
        if cnt < 0:
            return None
        return np.sort(scratch[:cnt].astype(np.int64))

    trivial = SubgroupRecord(np.array([ident], dtype=np.int64), ())
    found: dict[bytes, SubgroupRecord] = {trivial.indices.tobytes(): trivial}
    frontier = [trivial]
    while frontier:
        next_frontier = []
        for rec in frontier:
            member = np.zeros(n_amb, dtype=bool)
            member[rec.indices] = True
            for r in rep_arr:
                if member[r]:
                    continue
                gens = rec.gen_indices + (r,)
                idx = closure(gens)
                if idx is None:
                    continue
                key = idx.tobytes()
                if key not in found:
                    new = SubgroupRecord(idx, gens)
                    found[key] = new
                    next_frontier.append(new)
        frontier = next_frontier
    return sorted(found.values(), key=lambda s: (s.order, s.indices.tobytes()))


# -- seeded samplers ----------------------------------------------------------


def _random_unit(rng: np.random.Generator, modulus: PrimePowerModulus) -> int:
    p, q = modulus.p, modulus.q
    while True:
        x = int(rng.integers(0, q))
        if x % p != 0:
            return x


def _random_invertible(rng: np.random.Generator, modulus: PrimePowerModulus) -> Mat2:
    p, q = modulus.p, modulus.q
    while True:
        entries = [int(x) for x in rng.integers(0, q, size=4)]
        m = Mat2.from_entries(entries, modulus)
        if m.is_invertible():
            return m


def _random_diagonal(rng, modulus) -> Mat2:
    return Mat2(modulus, _random_unit(rng, modulus), 0, 0, _random_unit(rng, modulus))


def _random_upper_unipotent(rng, modulus) -> Mat2:
    return Mat2(modulus, 1, int(rng.integers(0, modulus.q)), 0, 1)


def _random_lower_unipotent(rng, modulus) -> Mat2:
    return Mat2(modulus, 1, 0, int(rng.integers(0, modulus.q)), 1)


def _random_congruence(rng, modulus) -> Mat2:
    """Random element of the kernel of reduction mod p (always invertible)."""
    p, q = modulus.p, modulus.q
    span = q // p
    a, b, c, d = (int(x) for x in rng.integers(0, span, size=4))
    return Mat2(modulus, 1 + p * a, p * b, p * c, 1 + p * d)


def sample_generator_tuples(modulus: PrimePowerModulus, rng: np.random.Generator
                            ) -> Iterator[list[Mat2]]:
    """Endless stream of structured random generator tuples.

    Mixes shapes so that a healthy fraction of the closures stay inside
    the exact-cohomology budget: single elements, diagonal/unipotent
    pairs, congruence-kernel elements, and occasional raw random pairs,
    all conjugated by a random basis change.
    """
    while True:
        kind = int(rng.integers(0, 100))
        t = _random_invertible(rng, modulus)
        tinv = t.inverse()
        if kind < 20:
            gens = [_random_invertible(rng, modulus)]
        elif kind < 45:
            gens = [_random_diagonal(rng, modulus), _random_upper_unipotent(rng, modulus)]
        elif kind < 60:
            gens = [_random_congruence(rng, modulus) for _ in range(int(rng.integers(1, 4)))]
        elif kind < 75:
            gens = [_random_diagonal(rng, modulus), _random_congruence(rng, modulus)]
        elif kind < 85:
            gens = [
                _random_diagonal(rng, modulus),
                _random_upper_unipotent(rng, modulus),
                _random_lower_unipotent(rng, modulus),
            ]
        else:
            gens = [_random_invertible(rng, modulus) for _ in range(2)]
        yield [tinv * g * t for g in gens]


def sample_groups(modulus: PrimePowerModulus, rng: np.random.Generator,
                  count: int, cap: int = DEFAULT_CLOSURE_CAP,
                  max_draws: Optional[int] = None) -> tuple[list[Group], dict]:
    """Up to ``count`` distinct sampled subgroups plus draw statistics."""
    groups: list[Group] = []
    stats = {"draws": 0, "cap_overflows": 0, "duplicates": 0}
    if count <= 0:
        return groups, stats
    seen: set[str] = set()
    limit = max_draws if max_draws is not None else 200 * count
    for gens in sample_generator_tuples(modulus, rng):
        if len(seen) >= count or stats["draws"] >= limit:
            break
        stats["draws"] += 1
        try:
            g = Group.close(gens, modulus, cap)
        except ClosureCapExceeded:
            stats["cap_overflows"] += 1
            continue
        if g.group_hash in seen:
            stats["duplicates"] += 1
            continue
        seen.add(g.group_hash)
        groups.append(g)
    return groups, stats
