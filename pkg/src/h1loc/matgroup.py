"""2x2 matrix algebra over Z/p^nZ and finite matrix-group machinery.

Groups are closed element sets in deterministic breadth-first insertion
order (identity first, left multiplication by generators in the given
order).  Elements are packed into single int64 words for the hot loops,
which bounds usable moduli by q**4 < 2**63.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

import numpy as np

from . import _kernels as K
from .errors import (
    ClosureCapExceeded,
    FalsificationError,
    ModulusMismatch,
    NoNormalSylow,
    NonUnitError,
    NotSubgroupError,
)
from .residues import PrimePowerModulus, Residue, hensel_lift_root

MAX_PACK_MODULUS = 55_000  # q**4 must stay below 2**63
DEFAULT_CLOSURE_CAP = 50_000


def _check_packable(modulus: PrimePowerModulus):
    if modulus.q > MAX_PACK_MODULUS:
        raise ValueError(
            f"modulus {modulus.q} exceeds the packed-matrix bound {MAX_PACK_MODULUS}"
        )


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix over Z/p^nZ, entries stored as canonical ints."""

    modulus: PrimePowerModulus
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        q = self.modulus.q
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not 0 <= v < q:
                object.__setattr__(self, name, v % q)

    @classmethod
    def from_entries(cls, entries, modulus: PrimePowerModulus) -> "Mat2":
        vals = [e.value if isinstance(e, Residue) else int(e) for e in entries]
        if len(vals) != 4:
            raise ValueError("Mat2 needs exactly four entries")
        return cls(modulus, *vals)

    @classmethod
    def identity(cls, modulus: PrimePowerModulus) -> "Mat2":
        return cls(modulus, 1, 0, 0, 1)

    @classmethod
    def from_packed(cls, packed: int, modulus: PrimePowerModulus) -> "Mat2":
        q = modulus.q
        d = packed % q
        packed //= q
        c = packed % q
        packed //= q
        b = packed % q
        return cls(modulus, packed // q, b, c, d)

    @property
    def packed(self) -> int:
        q = self.modulus.q
        return ((self.a * q + self.b) * q + self.c) * q + self.d

    def entries(self) -> tuple[Residue, Residue, Residue, Residue]:
        m = self.modulus
        return (Residue(self.a, m), Residue(self.b, m), Residue(self.c, m), Residue(self.d, m))

    def det(self) -> Residue:
        return Residue((self.a * self.d - self.b * self.c) % self.modulus.q, self.modulus)

    def trace(self) -> Residue:
        return Residue((self.a + self.d) % self.modulus.q, self.modulus)

    def is_invertible(self) -> bool:
        return self.det().is_unit()

    def is_identity(self) -> bool:
        return (self.a, self.b, self.c, self.d) == (1, 0, 0, 1)

    def is_diagonal(self) -> bool:
        return self.b == 0 and self.c == 0

    def is_scalar(self) -> bool:
        return self.is_diagonal() and self.a == self.d

    def is_upper(self) -> bool:
        return self.c == 0

    def is_lower(self) -> bool:
        return self.b == 0

    def is_strict_upper(self) -> bool:
        """Unipotent upper triangular: (1 e / 0 1)."""
        return self.a == 1 and self.d == 1 and self.c == 0

    def is_strict_lower(self) -> bool:
        return self.a == 1 and self.d == 1 and self.b == 0

    def __mul__(self, other: "Mat2") -> "Mat2":
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"{self.modulus} vs {other.modulus}")
        q = self.modulus.q
        return Mat2(
            self.modulus,
            (self.a * other.a + self.b * other.c) % q,
            (self.a * other.b + self.b * other.d) % q,
            (self.c * other.a + self.d * other.c) % q,
            (self.c * other.b + self.d * other.d) % q,
        )

    def inverse(self) -> "Mat2":
        det = self.det()
        if not det.is_unit():
            raise NonUnitError(f"matrix {self} has non-unit determinant {det.value}")
        di = det.inverse().value
        q = self.modulus.q
        return Mat2(
            self.modulus,
            (self.d * di) % q,
            (-self.b * di) % q,
            (-self.c * di) % q,
            (self.a * di) % q,
        )

    def __pow__(self, k: int) -> "Mat2":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Mat2.identity(self.modulus)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def order(self) -> int:
        """Least k >= 1 with self**k = I.

        Uses the exponent multiple p^n * (p^2 - 1) of GL2(Z/p^nZ): the
        reduction mod p has order dividing p*(p^2-1) and the congruence
        kernel has exponent p^(n-1).
        """
        if not self.is_invertible():
            raise NonUnitError("order is defined for invertible matrices only")
        p, n = self.modulus.p, self.modulus.n
        exponent = p**n * (p * p - 1)
        if not (self**exponent).is_identity():
            raise AssertionError("exponent bound violated; modulus is not a prime power?")
        order = exponent
        for prime in _prime_factors(exponent):
            while order % prime == 0 and (self ** (order // prime)).is_identity():
                order //= prime
        return order

    def power_by_class(self, m: int | Residue) -> "Mat2":
        """self**m for an exponent class m in Z/p^nZ.

        Well defined only when the order of self divides p^n (checked), as
        is the case inside the p-Sylow subgroup.
        """
        p, n = self.modulus.p, self.modulus.n
        ordv = self.order()
        if p**n % ordv != 0:
            raise ValueError(f"order {ordv} does not divide p^n = {p ** n}")
        mv = m.value if isinstance(m, Residue) else m % self.modulus.q
        return self**mv

    def reduce(self, j: int) -> "Mat2":
        mod = self.modulus.reduce(j)
        pj = mod.q
        return Mat2(mod, self.a % pj, self.b % pj, self.c % pj, self.d % pj)

    def transpose(self) -> "Mat2":
        return Mat2(self.modulus, self.a, self.c, self.b, self.d)

    def apply(self, v: Sequence[int]) -> np.ndarray:
        """Matrix action on a column vector of M = (Z/p^nZ)^2."""
        q = self.modulus.q
        return np.array(
            [(self.a * int(v[0]) + self.b * int(v[1])) % q,
             (self.c * int(v[0]) + self.d * int(v[1])) % q],
            dtype=np.int64,
        )

    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.int64)

    def __repr__(self):
        return f"[{self.a} {self.b} / {self.c} {self.d}] mod {self.modulus.q}"


def _prime_factors(x: int) -> list[int]:
    out = []
    d = 2
    while d * d <= x:
        if x % d == 0:
            out.append(d)
            while x % d == 0:
                x //= d
        d += 1
    if x > 1:
        out.append(x)
    return out


def commutator(x: Mat2, y: Mat2) -> Mat2:
    return x * y * x.inverse() * y.inverse()


def triangular_commutator_corner(delta: Mat2, gamma: Mat2) -> Residue:
    """Top-right entry of [delta, gamma] for upper-triangular arguments.

    Closed form (a*b' - a'*b + b*d' - b'*d) * d^-1 * d'^-1; the commutator
    of two invertible upper-triangular matrices is unipotent upper with
    exactly this corner entry.
    """
    if not (delta.is_upper() and gamma.is_upper()):
        raise ValueError("closed form requires upper-triangular matrices")
    m = delta.modulus
    if m != gamma.modulus:
        raise ModulusMismatch(f"{m} vs {gamma.modulus}")
    q = m.q
    num = (
        delta.a * gamma.b - gamma.a * delta.b + delta.b * gamma.d - gamma.b * delta.d
    ) % q
    dinv = pow(delta.d, -1, q)
    dpinv = pow(gamma.d, -1, q)
    return Residue((num * dinv * dpinv) % q, m)


class Group:
    """Finite subgroup of GL2(Z/p^nZ): generator list plus closed element set.

    Immutable after construction; the packed element array fixes the
    canonical insertion order used for cocycle coordinates and hashing.
    """

    def __init__(self, modulus: PrimePowerModulus, generators: Sequence[Mat2],
                 packed: np.ndarray, cap: int):
        _check_packable(modulus)
        self.modulus = modulus
        self.generators = tuple(generators)
        self.packed = np.ascontiguousarray(packed, dtype=np.int64)
        self.packed.setflags(write=False)
        self.cap = cap

    # -- construction ------------------------------------------------------

    @staticmethod
    def close(generators: Sequence[Mat2], modulus: PrimePowerModulus,
              cap: int = DEFAULT_CLOSURE_CAP) -> "Group":
        _check_packable(modulus)
        for g in generators:
            if g.modulus != modulus:
                raise ModulusMismatch(f"{g.modulus} vs {modulus}")
            if not g.is_invertible():
                raise NonUnitError(f"generator {g} has non-unit determinant")
        gens_packed = np.array([g.packed for g in generators], dtype=np.int64)
        elems, count = K.closure_packed(gens_packed, modulus.q, cap)
        if count < 0:
            raise ClosureCapExceeded(
                f"closure exceeded cap {cap}: too large for exact H1; use sampling mode"
            )
        return Group(modulus, generators, elems[:count].copy(), cap)

    @staticmethod
    def from_closed(packed: np.ndarray, modulus: PrimePowerModulus,
                    generators: Optional[Sequence[Mat2]] = None,
                    cap: int = DEFAULT_CLOSURE_CAP) -> "Group":
        """Wrap an already-closed element list, minimizing generators if absent."""
        packed = np.ascontiguousarray(packed, dtype=np.int64)
        if generators is None:
            generators = _minimized_generators(packed, modulus, cap)
        return Group(modulus, generators, packed, cap)

    # -- basic queries -----------------------------------------------------

    @property
    def order(self) -> int:
        return int(self.packed.shape[0])

    @cached_property
    def packed_set(self) -> frozenset:
        return frozenset(int(x) for x in self.packed)

    @cached_property
    def _index(self) -> dict:
        return {int(x): i for i, x in enumerate(self.packed)}

    def __len__(self) -> int:
        return self.order

    def __iter__(self) -> Iterator[Mat2]:
        for x in self.packed:
            yield Mat2.from_packed(int(x), self.modulus)

    def __contains__(self, m: Mat2) -> bool:
        return m.modulus == self.modulus and m.packed in self.packed_set

    def element(self, i: int) -> Mat2:
        return Mat2.from_packed(int(self.packed[i]), self.modulus)

    def index_of(self, m: Mat2) -> int:
        return self._index[m.packed]

    def is_subgroup_of(self, other: "Group") -> bool:
        return self.modulus == other.modulus and self.packed_set <= other.packed_set

    @cached_property
    def element_orders(self) -> np.ndarray:
        return K.element_orders_packed(self.packed, self.modulus.q)

    def is_cyclic(self) -> bool:
        return bool(np.max(self.element_orders) == self.order) if self.order else True

    def is_abelian(self) -> bool:
        gens = [g for g in self.generators]
        return all(
            (x * y).packed == (y * x).packed for i, x in enumerate(gens) for y in gens[i + 1 :]
        )

    @cached_property
    def group_hash(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.modulus.p},{self.modulus.n}:".encode())
        h.update(np.sort(self.packed).tobytes())
        return h.hexdigest()[:16]

    def conjugated(self, by: Mat2) -> "Group":
        """The group by^-1 * G * by, element order preserved."""
        binv = by.inverse()
        conj = K.conjugate_all(self.packed, binv.packed, by.packed, self.modulus.q)
        gens = tuple(binv * g * by for g in self.generators)
        return Group(self.modulus, gens, conj, self.cap)

    def determinant_image_size(self) -> int:
        q = self.modulus.q
        dets = {int((m.a * m.d - m.b * m.c) % q) for m in self}
        return len(dets)

    def __repr__(self):
        return f"Group(order={self.order}, mod {self.modulus.q}, gens={len(self.generators)})"


def _minimized_generators(packed: np.ndarray, modulus: PrimePowerModulus,
                          cap: int) -> tuple[Mat2, ...]:
    """Greedy small generating set: scan elements, keep those enlarging the closure."""
    target = frozenset(int(x) for x in packed)
    gens: list[int] = []
    have = {Mat2.identity(modulus).packed}
    for x in packed:
        xv = int(x)
        if xv in have:
            continue
        gens.append(xv)
        elems, count = K.closure_packed(np.array(gens, dtype=np.int64), modulus.q, cap)
        if count < 0:
            raise ClosureCapExceeded("generator minimization exceeded cap")
        have = set(int(v) for v in elems[:count])
        if len(have) == len(target):
            break
    return tuple(Mat2.from_packed(g, modulus) for g in gens)


def close(generators: Sequence[Mat2], modulus: PrimePowerModulus,
          cap: int = DEFAULT_CLOSURE_CAP) -> Group:
    return Group.close(generators, modulus, cap)


def reduce_mod(group: Group, j: int) -> Group:
    """Entrywise reduction mod p^j; the image of a group hom is closed."""
    n = group.modulus.n
    if not 1 <= j <= n:
        raise ValueError(f"reduction level {j} outside 1..{n}")
    if j == n:
        return group
    target = group.modulus.reduce(j)
    reduced = K.reduce_all(group.packed, group.modulus.q, target.q)
    _, first = np.unique(reduced, return_index=True)
    keep = np.sort(first)
    gens = tuple(g.reduce(j) for g in group.generators)
    return Group(target, gens, reduced[keep], group.cap)


def sylow_p(group: Group) -> Group:
    """The set of p-power-order elements, verified to be a subgroup.

    When that set is closed under products it is the unique (hence normal)
    p-Sylow subgroup; otherwise the group is outside the regime this
    package reasons about and NoNormalSylow is raised.
    """
    p = group.modulus.p
    orders = group.element_orders
    mask = np.array([_is_p_power(int(o), p) for o in orders], dtype=bool)
    members = np.ascontiguousarray(group.packed[mask])
    q = group.modulus.q
    # closed iff the closure they generate is no bigger than the set itself
    _, count = K.closure_packed(members, q, int(members.shape[0]))
    if count != members.shape[0]:
        raise NoNormalSylow(
            "p-power-order elements are not closed under products; no normal p-Sylow"
        )
    sub = Group.from_closed(members, group.modulus, cap=group.cap)
    index = group.order // sub.order
    assert index % p != 0
    return sub


def _is_p_power(x: int, p: int) -> bool:
    while x % p == 0:
        x //= p
    return x == 1


@dataclass(frozen=True)
class TriangularSlices:
    """Intersections of a group with the triangular matrix shapes."""

    diag: Group
    strict_upper: Group
    strict_lower: Group
    upper: Group
    lower: Group


def triangular_slices(group: Group) -> TriangularSlices:
    diag, s_up, s_lo, up, lo = [], [], [], [], []
    for x in group.packed:
        m = Mat2.from_packed(int(x), group.modulus)
        if m.is_diagonal():
            diag.append(x)
        if m.is_strict_upper():
            s_up.append(x)
        if m.is_strict_lower():
            s_lo.append(x)
        if m.is_upper():
            up.append(x)
        if m.is_lower():
            lo.append(x)

    def build(vals):
        return Group.from_closed(np.array(vals, dtype=np.int64), group.modulus, cap=group.cap)

    return TriangularSlices(build(diag), build(s_up), build(s_lo), build(up), build(lo))


def cyclic_subgroups(group: Group) -> list[Group]:
    """All distinct cyclic subgroups <x>, deduplicated by element set."""
    seen = {}
    q = group.modulus.q
    ident = Mat2.identity(group.modulus).packed
    for x in group.packed:
        xv = int(x)
        cyc = [ident]
        y = xv
        while y != ident:
            cyc.append(y)
            y = int(K.mul_packed(np.int64(xv), np.int64(y), q))
        key = frozenset(cyc)
        if key not in seen:
            gen = Mat2.from_packed(xv, group.modulus)
            seen[key] = Group(
                group.modulus, (gen,) if xv != ident else (),
                np.array(cyc, dtype=np.int64), group.cap,
            )
    return list(seen.values())


_DERIVED_DIRECT_LIMIT = 2048


def derived_subgroup(group: Group) -> Group:
    """Commutator subgroup, as the normal closure of generator commutators."""
    q = group.modulus.q
    if group.order <= _DERIVED_DIRECT_LIMIT:
        comms = K.pairwise_commutators(group.packed, q)
        gens_packed = np.unique(comms)
    else:
        base = []
        gens = list(group.generators)
        for i, x in enumerate(gens):
            for y in gens[i + 1 :]:
                base.append(commutator(x, y).packed)
        gens_packed = np.unique(np.array(base or [Mat2.identity(group.modulus).packed],
                                         dtype=np.int64))
    while True:
        elems, count = K.closure_packed(gens_packed, q, group.cap)
        if count < 0:
            raise ClosureCapExceeded("derived subgroup closure exceeded cap")
        current = elems[:count]
        current_set = frozenset(int(v) for v in current)
        new = []
        for g in group.generators:
            gp, gip = g.packed, g.inverse().packed
            for x in current:
                cj = int(K.mul_packed(np.int64(K.mul_packed(np.int64(gp), np.int64(x), q)),
                                      np.int64(gip), q))
                if cj not in current_set:
                    new.append(cj)
        if not new:
            result = Group.from_closed(current, group.modulus, cap=group.cap)
            break
        gens_packed = np.unique(np.concatenate([gens_packed, np.array(new, dtype=np.int64)]))
    if all(Mat2.from_packed(int(x), group.modulus).is_upper() for x in group.packed):
        _assert_unipotent_cyclic(result, upper=True)
    return result


def _assert_unipotent_cyclic(sub: Group, upper: bool) -> int:
    """Check a derived slice is cyclic generated by (1 p^j / 0 1); returns j."""
    p, n, q = sub.modulus.p, sub.modulus.n, sub.modulus.q
    offs = []
    for m in sub:
        if upper and not m.is_strict_upper():
            raise AssertionError(f"non-unipotent element {m} in derived slice")
        if not upper and not m.is_strict_lower():
            raise AssertionError(f"non-unipotent element {m} in derived slice")
        offs.append(m.b if upper else m.c)
    nonzero = [o for o in offs if o]
    if not nonzero:
        return n
    j = min(Residue(o, sub.modulus).valuation() for o in nonzero)
    expected = {(k * p**j) % q for k in range(q // p**j)}
    if set(offs) != expected:
        raise AssertionError("derived slice is not the full cyclic p^j ladder")
    return j


# -- mod-p image classification ---------------------------------------------


@dataclass(frozen=True)
class ModPImageClass:
    """Normal form of a subgroup of GL2(F_p) found by basis search.

    form is one of "cyclic-diag", "diag-plus-unipotent", "other"; for the
    two structured forms, rho is the diagonal part (possibly the identity),
    with eigenvalues (lambda1, lambda2) and basis_change mapping the input
    group into the normal form by conjugation.
    """

    form: str
    rho: Optional[Mat2]
    order_rho: int
    lambda1: Optional[int]
    lambda2: Optional[int]
    basis_change: Optional[Mat2]

    def is_structured(self) -> bool:
        return self.form in ("cyclic-diag", "diag-plus-unipotent")


def _line_reps(p: int) -> list[tuple[int, int]]:
    reps = [(0, 1)] + [(1, t) for t in range(p)]
    return sorted(reps)


def _candidate_bases(p: int) -> list[tuple[int, int, int, int]]:
    """Basis candidates, one per flag (pair of distinct lines).

    Conjugation by a diagonal matrix preserves every shape tested below, so
    searching flags is equivalent to searching all of GL2(F_p).
    """
    out = []
    for v1 in _line_reps(p):
        for v2 in _line_reps(p):
            det = v1[0] * v2[1] - v1[1] * v2[0]
            if det % p != 0:
                out.append((v1[0], v2[0], v1[1], v2[1]))  # columns are v1, v2
    return out


def classify_mod_p_image(g1: Group) -> ModPImageClass:
    """Search for a basis putting a subgroup of GL2(F_p) into normal form.

    Finds, when possible, a basis in which the group is either a cyclic
    group of diagonal matrices or generated by a diagonal matrix and the
    unipotent (1 1 / 0 1), with distinct diagonal eigenvalues unless the
    diagonal part is the identity.  "other" is a legitimate outcome.
    """
    if g1.modulus.n != 1:
        raise ValueError("classification expects a group over Z/pZ; reduce first")
    p = g1.modulus.p
    mod = g1.modulus
    gens = list(g1.generators)
    for cand in _candidate_bases(p):
        basis = Mat2.from_entries(cand, mod)
        binv = basis.inverse()
        if not all((binv * g * basis).is_upper() for g in gens):
            continue
        conj = K.conjugate_all(g1.packed, binv.packed, basis.packed, p)
        mats = [Mat2.from_packed(int(x), mod) for x in conj]
        if all(m.is_diagonal() for m in mats):
            sub = Group.from_closed(conj, mod, cap=g1.cap)
            orders = sub.element_orders
            top = int(np.max(orders)) if sub.order else 1
            if top != sub.order:
                continue  # diagonal but not cyclic
            gens_max = sorted(
                (m.a, m.d) for m, o in zip(mats, orders) if int(o) == top
            )
            l1, l2 = gens_max[0]
            if not ((l1 == 1 and l2 == 1) or l1 != l2):
                continue  # nontrivial scalar group: not a normal form
            if l1 == 1 and l2 != 1:
                # swap the basis so the nontrivial eigenvalue comes first
                swap = Mat2(mod, 0, 1, 1, 0)
                basis = basis * swap
                l1, l2 = l2, l1
            rho = Mat2(mod, l1, 0, 0, l2)
            return ModPImageClass("cyclic-diag", rho, top, l1, l2, basis)
        unipotent = [m for m in mats if m.is_strict_upper()]
        if len(unipotent) != p:
            continue
        diag_parts = {(m.a, m.d) for m in mats}
        if len(mats) != p * len(diag_parts):
            continue
        top = max(_pair_order(pair, p) for pair in diag_parts)
        if top != len(diag_parts):
            continue  # diagonal-part group is not cyclic
        gens_max = sorted(pair for pair in diag_parts if _pair_order(pair, p) == top)
        l1, l2 = gens_max[0]
        if not ((l1 == 1 and l2 == 1) or l1 != l2):
            continue
        rho = Mat2(mod, l1, 0, 0, l2)
        if rho.packed not in {int(x) for x in conj}:
            continue
        return ModPImageClass("diag-plus-unipotent", rho, top, l1, l2, basis)
    return ModPImageClass("other", None, 0, None, None, None)


def _pair_order(pair: tuple[int, int], p: int) -> int:
    a, d = pair
    k, x, y = 1, a, d
    while not (x == 1 and y == 1):
        x = (x * a) % p
        y = (y * d) % p
        k += 1
    return k


# -- diagonal lift of the prime-to-p part ------------------------------------


@dataclass(frozen=True)
class DiagonalLift:
    """Diagonal lift of the mod-p semisimple generator, same order.

    ``matrix`` is diagonal in the basis reached by ``basis_change``;
    ``group`` is the input group conjugated into that basis.
    """

    matrix: Mat2
    eigenvalues: tuple[Residue, Residue]
    order: int
    basis_change: Mat2
    group: Group

    @property
    def gap(self) -> Residue:
        """lambda2/lambda1 - lambda1/lambda2, the eigen-ratio separation."""
        l1, l2 = self.eigenvalues
        return l2 * l1.inverse() - l1 * l2.inverse()


def semisimple_diagonal_lift(group: Group) -> Optional[DiagonalLift]:
    """Find a diagonal lift of the mod-p diagonal part with unchanged order.

    Steps: classify the mod-p image; pick any element reducing to the
    diagonal generator; lift its eigenvalues by Hensel's lemma (simple
    roots of the characteristic polynomial since they differ mod p);
    change basis to exact eigenvectors; kill the p-part of the order by a
    p-power.  Returns None when the mod-p image has no usable diagonal
    part (form "other" or rho = I).
    """
    mod = group.modulus
    n = mod.n
    g1 = reduce_mod(group, 1) if n > 1 else group
    cls = classify_mod_p_image(g1)
    if not cls.is_structured() or cls.rho is None or cls.rho.is_identity():
        return None
    basis_lift = Mat2(mod, cls.basis_change.a, cls.basis_change.b,
                      cls.basis_change.c, cls.basis_change.d)
    binv = basis_lift.inverse()
    p = mod.p
    target = None
    for x in group.packed:
        m = binv * Mat2.from_packed(int(x), mod) * basis_lift
        if (m.a % p, m.b % p, m.c % p, m.d % p) == (cls.rho.a, cls.rho.b, cls.rho.c, cls.rho.d):
            target = m
            break
    assert target is not None, "reduction is surjective onto the mod-p image"
    tr, det = target.trace().value, target.det().value
    coeffs = [det, -tr, 1]
    lam1 = hensel_lift_root(coeffs, cls.lambda1, mod)
    lam2 = hensel_lift_root(coeffs, cls.lambda2, mod)
    v1 = _eigenvector(target, lam1)
    v2 = _eigenvector(target, lam2)
    q_mat = Mat2(mod, v1[0], v2[0], v1[1], v2[1])
    assert q_mat.is_invertible()
    rho_d = q_mat.inverse() * target * q_mat
    assert rho_d.is_diagonal()
    ordv = rho_d.order()
    p_part = 1
    while ordv % p == 0:
        ordv //= p
        p_part *= p
    rho_n = rho_d**p_part
    assert rho_n.order() == cls.order_rho
    assert (rho_n.a % p, rho_n.d % p) == (cls.lambda1, cls.lambda2)
    change = basis_lift * q_mat
    conj_group = group.conjugated(change)
    assert Mat2.from_packed(rho_n.packed, mod) in conj_group
    return DiagonalLift(
        matrix=rho_n,
        eigenvalues=(Residue(rho_n.a, mod), Residue(rho_n.d, mod)),
        order=cls.order_rho,
        basis_change=change,
        group=conj_group,
    )


def _eigenvector(m: Mat2, lam: Residue) -> tuple[int, int]:
    """Primitive eigenvector for a simple eigenvalue, canonically scaled."""
    q = m.modulus.q
    p = m.modulus.p
    a = (m.a - lam.value) % q
    b = m.b
    c = m.c
    d = (m.d - lam.value) % q
    # adjugate columns of (m - lam) lie in the kernel; pick the primitive one
    cands = [((d % q), (-c) % q), ((-b) % q, (a % q))]
    for x, y in cands:
        if x % p != 0 or y % p != 0:
            lead = x if x % p != 0 else y
            inv = pow(lead, -1, q)
            return ((x * inv) % q, (y * inv) % q)
    raise AssertionError("no primitive eigenvector; eigenvalue was not simple")


def congruence_kernel(group: Group, level: int) -> Group:
    """Elements congruent to the identity mod p^level (level < n)."""
    n = group.modulus.n
    if not 1 <= level < n:
        raise ValueError(f"congruence level {level} outside 1..{n - 1}")
    pl = group.modulus.p**level
    members = [
        x for x in group.packed
        if _congruent_identity(Mat2.from_packed(int(x), group.modulus), pl)
    ]
    return Group.from_closed(np.array(members, dtype=np.int64), group.modulus, cap=group.cap)


def _congruent_identity(m: Mat2, pl: int) -> bool:
    return m.a % pl == 1 and m.d % pl == 1 and m.b % pl == 0 and m.c % pl == 0


def unit_eigenvalue_gap(lift: DiagonalLift) -> Residue:
    return lift.gap


# -- decomposition into shaped factors ---------------------------------------


@dataclass(frozen=True)
class FactorWord:
    """Ordered product of shaped factors reassembling a group element."""

    factors: tuple[tuple[Mat2, str], ...]
    target: Mat2

    def product(self) -> Mat2:
        acc = Mat2.identity(self.target.modulus)
        for m, _tag in self.factors:
            acc = acc * m
        return acc


def eigen_split(tau: Mat2, lift: DiagonalLift) -> tuple[Mat2, Mat2, Mat2, Mat2]:
    """Split an element of the top congruence layer along conjugation eigenvectors.

    For tau = I + p^(n-1)*(a, b; c, d) with n >= 2 the four factors
    (1+p^(n-1)a, 0; 0, 1), (1, 0; 0, 1+p^(n-1)d), (1, p^(n-1)b; 0, 1),
    (1, 0; p^(n-1)c, 1) commute mod p^n and multiply back to tau exactly.
    The product identity is unconditional.  Certification inside the
    Sylow subgroup needs lambda1^2 != lambda2^2 mod p and, because the
    two diagonal directions share conjugation eigenvalue 1, only their
    combined product is certified; SylowDecomposer works with the
    three-factor form for exactly that reason.
    """
    mod = tau.modulus
    p, n, q = mod.p, mod.n, mod.q
    if n < 2:
        raise ValueError("eigen splitting needs n >= 2")
    pl = p ** (n - 1)
    if not _congruent_identity(tau, pl):
        raise ValueError("tau must be congruent to the identity mod p^(n-1)")
    diag_a = Mat2(mod, tau.a, 0, 0, 1)
    diag_d = Mat2(mod, 1, 0, 0, tau.d)
    upper = Mat2(mod, 1, tau.b, 0, 1)
    lower = Mat2(mod, 1, 0, tau.c, 1)
    assert (diag_a * diag_d * upper * lower).packed == tau.packed
    return diag_a, diag_d, upper, lower


class SylowDecomposer:
    """Decomposes p-Sylow elements into diagonal and unipotent factors.

    Works level by level: reduce mod p^(n-1), decompose recursively, lift
    the factors back (first preimage in closure order), and absorb the
    congruence-layer residue through the eigen splitting.  Every emitted
    factor is certified by membership in the Sylow subgroup at its level;
    a failed certificate aborts with a reproduction bundle because it
    would falsify the structure theory this implements.
    """

    def __init__(self, sylow: Group, lift: DiagonalLift):
        self.modulus = sylow.modulus
        self.lift = lift
        if not lift.gap.is_unit():
            raise ValueError("eigen-ratio separation fails: decomposition unsupported")
        rho = lift.matrix
        rinv = rho.inverse()
        for g in sylow.generators:
            if rho * g * rinv not in sylow:
                raise ValueError("Sylow subgroup is not normalized by the diagonal lift")
        n = self.modulus.n
        self.levels: dict[int, Group] = {n: sylow}
        for j in range(n - 1, 0, -1):
            self.levels[j] = reduce_mod(sylow, j)
        self.lift_maps: dict[int, dict[int, Mat2]] = {}
        for j in range(1, n):
            table: dict[int, Mat2] = {}
            for m in self.levels[j + 1]:
                table.setdefault(m.reduce(j).packed, m)
            self.lift_maps[j] = table
        self.lam = {}
        for j in range(1, n + 1):
            l1, l2 = lift.eigenvalues
            self.lam[j] = (l1.value % self.modulus.p**j, l2.value % self.modulus.p**j)

    def decompose(self, tau: Mat2) -> FactorWord:
        if tau not in self.levels[self.modulus.n]:
            raise NotSubgroupError("tau is not an element of the Sylow subgroup")
        factors = self._decompose_level(tau, self.modulus.n)
        word = FactorWord(tuple(factors), tau)
        if word.product().packed != tau.packed:
            raise self._counterexample(tau, "factor product does not reassemble tau")
        return word

    # level-j helpers ------------------------------------------------------

    def _group(self, j: int) -> Group:
        return self.levels[j]

    def _certify(self, mat: Mat2, tag: str, j: int, tau: Mat2):
        shape_ok = {
            "diag": mat.is_diagonal(),
            "strict_upper": mat.is_strict_upper(),
            "strict_lower": mat.is_strict_lower(),
        }[tag]
        if not shape_ok:
            raise self._counterexample(tau, f"factor {mat} lacks shape {tag}")
        if mat not in self._group(j):
            raise self._counterexample(
                tau, f"factor {mat} not certified in the level-{j} Sylow subgroup"
            )

    def _counterexample(self, tau: Mat2, reason: str) -> FalsificationError:
        bundle = {
            "p": self.modulus.p,
            "n": self.modulus.n,
            "sylow_generators": [
                [[g.a, g.b], [g.c, g.d]] for g in self.levels[self.modulus.n].generators
            ],
            "diagonal_lift": [[self.lift.matrix.a, 0], [0, self.lift.matrix.d]],
            "tau": [[tau.a, tau.b], [tau.c, tau.d]],
            "reason": reason,
        }
        return FalsificationError(f"decomposition counterexample: {reason}", bundle)

    def _emit(self, mat: Mat2, tag: str, j: int, tau: Mat2, out: list):
        if not mat.is_identity():
            self._certify(mat, tag, j, tau)
            out.append((mat, tag))

    def _decompose_level(self, tau: Mat2, j: int) -> list[tuple[Mat2, str]]:
        mod = tau.modulus
        if tau.is_identity():
            return []
        if j == 1:
            if tau.is_strict_upper():
                return [(tau, "strict_upper")]
            if tau.is_strict_lower():
                return [(tau, "strict_lower")]
            raise self._counterexample(tau, "level-1 Sylow element is not unipotent")
        reduced = tau.reduce(j - 1)
        sub_factors = self._decompose_level(reduced, j - 1)
        lifts = [(self.lift_maps[j - 1][m.packed], tag) for m, tag in sub_factors]
        prod = Mat2.identity(mod)
        for m, _tag in lifts:
            prod = prod * m
        residue = tau * prod.inverse()
        pl = mod.p ** (j - 1)
        if not _congruent_identity(residue, pl):
            raise self._counterexample(tau, "residue after lifting is not in the top layer")
        out: list[tuple[Mat2, str]] = []
        for mat, tag in self._split_layer(residue, j):
            self._emit(mat, tag, j, tau, out)
        for m, tag in lifts:
            for mat, new_tag in self._shape_factors(m, tag, j):
                self._emit(mat, new_tag, j, tau, out)
        return out

    def _split_layer(self, tau: Mat2, j: int) -> list[tuple[Mat2, str]]:
        # tau = I mod p^(j-1): commuting one-parameter factors.  The two
        # diagonal directions share conjugation eigenvalue 1, so only their
        # product is certified inside the Sylow subgroup; the off-diagonal
        # directions carry the distinct eigenvalues and certify separately.
        mod = tau.modulus
        return [
            (Mat2(mod, tau.a, 0, 0, tau.d), "diag"),
            (Mat2(mod, 1, tau.b, 0, 1), "strict_upper"),
            (Mat2(mod, 1, 0, tau.c, 1), "strict_lower"),
        ]

    def _shape_factors(self, m: Mat2, tag: str, j: int) -> list[tuple[Mat2, str]]:
        """Shaped factorization of a lift whose reduction mod p^(j-1) has ``tag``."""
        mod = m.modulus
        if tag == "diag":
            if m.is_diagonal():
                return [(m, "diag")]
            # off-diagonal entries are divisible by p^(j-1)
            return [
                (Mat2(mod, m.a, 0, 0, m.d), "diag"),
                (Mat2(mod, 1, m.b, 0, 1), "strict_upper"),
                (Mat2(mod, 1, 0, m.c, 1), "strict_lower"),
            ]
        if tag == "strict_lower":
            if m.is_strict_lower():
                return [(m, "strict_lower")]
            return [
                (Mat2(mod, 1, 0, m.c, 1), "strict_lower"),
                (Mat2(mod, m.a, 0, 0, m.d), "diag"),
                (Mat2(mod, 1, m.b, 0, 1), "strict_upper"),
            ]
        if tag == "strict_upper":
            if m.is_strict_upper():
                return [(m, "strict_upper")]
            p, q = mod.p, mod.q
            pl = p ** (j - 1)
            a = (m.a - 1) // pl
            d = (m.d - 1) // pl
            c = m.c // pl
            e = m.b
            top = (1 + pl * (a - e * c)) % q
            return [
                (Mat2(mod, 1, e, 0, 1), "strict_upper"),
                (Mat2(mod, top, 0, 0, m.d), "diag"),
                (Mat2(mod, 1, (-pl * e * d) % q, 0, 1), "strict_upper"),
                (Mat2(mod, 1, 0, m.c, 1), "strict_lower"),
            ]
        raise AssertionError(f"unknown tag {tag}")


def decompose_in_sylow(tau: Mat2, sylow: Group, lift: DiagonalLift) -> FactorWord:
    return SylowDecomposer(sylow, lift).decompose(tau)
