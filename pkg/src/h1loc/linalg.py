"""Linear algebra over Z/p^nZ: Howell normal form, kernels, quotients.

Submodules of free modules over Z/p^nZ are represented by the Howell
normal form of a generating row matrix.  Howell form (unlike plain row
echelon) is a canonical representative of the row span over this ring, so
two submodules are equal exactly when their basis matrices are identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Optional, Sequence

import numpy as np

from ._kernels import howell_core, span_enumerate
from .errors import ContainmentError, ModulusMismatch
from .residues import PrimePowerModulus, Residue

# q**2 must stay below 2**63 for int64 row operations
MAX_LINALG_MODULUS = 3_000_000_000


def _as_int_array(rows, modulus: PrimePowerModulus) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-dimensional array of entries")
    return np.mod(arr, modulus.q)


@dataclass(frozen=True, eq=False)
class ModMatrix:
    """Dense matrix over Z/p^nZ with the modulus attached."""

    modulus: PrimePowerModulus
    array: np.ndarray

    def __post_init__(self):
        if self.modulus.q > MAX_LINALG_MODULUS:
            raise ValueError(f"modulus {self.modulus.q} too large for exact int64 kernels")
        arr = _as_int_array(self.array, self.modulus)
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int | Residue]], modulus: PrimePowerModulus):
        data = [[e.value if isinstance(e, Residue) else int(e) for e in row] for row in rows]
        arr = np.array(data, dtype=np.int64).reshape(len(data), -1 if data else 0)
        if not data:
            arr = np.zeros((0, 0), dtype=np.int64)
        return cls(modulus, arr)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: PrimePowerModulus):
        return cls(modulus, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, size: int, modulus: PrimePowerModulus):
        return cls(modulus, np.eye(size, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    def entry(self, i: int, j: int) -> Residue:
        return Residue(int(self.array[i, j]), self.modulus)

    def __eq__(self, other):
        return (
            isinstance(other, ModMatrix)
            and self.modulus == other.modulus
            and self.array.shape == other.array.shape
            and bool(np.array_equal(self.array, other.array))
        )

    def __repr__(self):
        return f"ModMatrix({self.array.tolist()} mod {self.modulus.q})"


@dataclass(frozen=True, eq=False)
class HowellBasis:
    """Canonical generating matrix of a submodule of (Z/p^nZ)^cols."""

    matrix: ModMatrix
    pivot_cols: tuple[int, ...]

    @property
    def modulus(self) -> PrimePowerModulus:
        return self.matrix.modulus

    @property
    def nrows(self) -> int:
        return self.matrix.rows

    @property
    def cols(self) -> int:
        return self.matrix.cols

    def is_trivial(self) -> bool:
        return self.nrows == 0

    def span_size(self) -> int:
        """Number of vectors in the span: product of the row orders."""
        q = self.modulus.q
        size = 1
        for i, c in enumerate(self.pivot_cols):
            size *= q // int(self.matrix.array[i, c])
        return size

    def __eq__(self, other):
        return (
            isinstance(other, HowellBasis)
            and self.matrix == other.matrix
            and self.pivot_cols == other.pivot_cols
        )

    def __repr__(self):
        return f"HowellBasis({self.matrix.array.tolist()} mod {self.modulus.q})"


def _howell_array(arr: np.ndarray, modulus: PrimePowerModulus):
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return np.zeros((0, arr.shape[1]), dtype=np.int64), ()
    work, r, piv = howell_core(
        np.ascontiguousarray(arr, dtype=np.int64), modulus.q, modulus.p, modulus.n
    )
    return work[:r].copy(), tuple(int(c) for c in piv[:r])


def howell_form(m: ModMatrix | HowellBasis) -> HowellBasis:
    """Howell normal form of the row span; idempotent on canonical input."""
    if isinstance(m, HowellBasis):
        m = m.matrix
    rows, piv = _howell_array(m.array, m.modulus)
    return HowellBasis(ModMatrix(m.modulus, rows), piv)


def _check_compatible(basis: HowellBasis, length: int):
    if basis.cols != length:
        raise ValueError(f"dimension mismatch: basis has {basis.cols} columns, vector has {length}")


def solve_membership(basis: HowellBasis, v) -> Optional[np.ndarray]:
    """Coefficients expressing ``v`` over the basis rows, or None.

    Because the basis is in Howell form, greedy reduction against the
    pivots decides membership: at each pivot column the remaining entry
    must be divisible by the pivot value.
    """
    vec = np.mod(np.asarray(v, dtype=np.int64).reshape(-1), basis.modulus.q)
    _check_compatible(basis, vec.shape[0])
    q = basis.modulus.q
    arr = basis.matrix.array
    coeffs = np.zeros(basis.nrows, dtype=np.int64)
    rem = vec.copy()
    for i, c in enumerate(basis.pivot_cols):
        piv = int(arr[i, c])
        x = int(rem[c])
        if x % piv != 0:
            return None
        f = x // piv
        if f:
            rem = (rem - f * arr[i]) % q
            coeffs[i] = f
    if rem.any():
        return None
    return coeffs


def span_contains(outer: HowellBasis, inner: HowellBasis | ModMatrix) -> bool:
    mat = inner.matrix if isinstance(inner, HowellBasis) else inner
    return all(solve_membership(outer, row) is not None for row in mat.array)


def kernel(m: ModMatrix) -> HowellBasis:
    """Left kernel {x : x . m = 0} as a canonical row basis.

    Computed from the Howell form of [m | I]: rows whose left block is
    zero carry exactly the kernel combinations in their right block (this
    needs Howell form, not just echelon form, for completeness).
    """
    rows, cols = m.array.shape
    if rows == 0:
        return howell_form(ModMatrix.zeros(0, 0, m.modulus))
    aug = np.hstack([m.array, np.eye(rows, dtype=np.int64)])
    red, piv = _howell_array(aug, m.modulus)
    zero_left = ~red[:, :cols].any(axis=1) if red.shape[0] else np.zeros(0, dtype=bool)
    right = red[zero_left][:, cols:]
    return howell_form(ModMatrix(m.modulus, right))


def nullspace(m: ModMatrix) -> HowellBasis:
    """Column nullspace {x : m . x = 0}, returned as rows x^T."""
    return kernel(ModMatrix(m.modulus, m.array.T))


def solve_right(m: ModMatrix, rhs) -> Optional[np.ndarray]:
    """Some x with x . m = rhs, expressed over the original rows of m."""
    rows, cols = m.array.shape
    vec = np.mod(np.asarray(rhs, dtype=np.int64).reshape(-1), m.modulus.q)
    if vec.shape[0] != cols:
        raise ValueError("dimension mismatch in solve_right")
    if rows == 0:
        return np.zeros(0, dtype=np.int64) if not vec.any() else None
    aug = np.hstack([m.array, np.eye(rows, dtype=np.int64)])
    red, piv = _howell_array(aug, m.modulus)
    q = m.modulus.q
    rem = vec.copy()
    combo = np.zeros(rows, dtype=np.int64)
    for i, c in enumerate(piv):
        if c >= cols:
            break
        pval = int(red[i, c])
        x = int(rem[c])
        if x % pval != 0:
            return None
        f = x // pval
        if f:
            rem = (rem - f * red[i, :cols]) % q
            combo = (combo + f * red[i, cols:]) % q
    if rem.any():
        return None
    return combo


def intersect_spans(a: HowellBasis, b: HowellBasis) -> HowellBasis:
    """Intersection of two row spans inside the same ambient module."""
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"{a.modulus} vs {b.modulus}")
    if a.cols != b.cols:
        raise ValueError("ambient dimension mismatch")
    if a.is_trivial() or b.is_trivial():
        return howell_form(ModMatrix.zeros(0, a.cols, a.modulus))
    stacked = ModMatrix(a.modulus, np.vstack([a.matrix.array, b.matrix.array]))
    ker = kernel(stacked)
    if ker.is_trivial():
        return howell_form(ModMatrix.zeros(0, a.cols, a.modulus))
    coeff_a = ker.matrix.array[:, : a.nrows]
    inter = np.mod(coeff_a @ a.matrix.array, a.modulus.q)
    return howell_form(ModMatrix(a.modulus, inter))


def smith_diagonal(rows: list[list[int]]) -> list[int]:
    """Diagonal of the Smith normal form of an integer matrix.

    Small matrices only; python ints avoid overflow.  Entries satisfy
    d1 | d2 | ... and are nonnegative.
    """
    mat = [list(map(int, r)) for r in rows]
    m = len(mat)
    n = len(mat[0]) if m else 0
    diag = []
    top = 0
    while top < m and top < n:
        # find nonzero pivot with the smallest absolute value
        best = None
        for i in range(top, m):
            for j in range(top, n):
                if mat[i][j] != 0 and (best is None or abs(mat[i][j]) < abs(mat[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        mat[top], mat[bi] = mat[bi], mat[top]
        for row in mat:
            row[top], row[bj] = row[bj], row[top]
        pivot = mat[top][top]
        dirty = False
        for i in range(top + 1, m):
            if mat[i][top] % pivot != 0:
                dirty = True
            f = mat[i][top] // pivot
            if f:
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[top])]
        for j in range(top + 1, n):
            if mat[top][j] % pivot != 0:
                dirty = True
            f = mat[top][j] // pivot
            if f:
                for row in mat:
                    row[j] -= f * row[top]
        if dirty or any(mat[i][top] for i in range(top + 1, m)) or any(
            mat[top][j] for j in range(top + 1, n)
        ):
            continue  # rerun with a smaller pivot now present
        diag.append(abs(pivot))
        top += 1
    # enforce the divisibility chain
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            a, b = diag[i], diag[j]
            g = gcd(a, b)
            diag[i], diag[j] = g, a * b // g if g else 0
    return diag


@dataclass(frozen=True)
class QuotientInvariants:
    """Invariant factors (prime powers) of a finite quotient module."""

    factors: tuple[int, ...]

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.factors, 1)

    def is_trivial(self) -> bool:
        return not self.factors

    def __repr__(self):
        return f"QuotientInvariants({list(self.factors)})"


def quotient_invariants(sub: HowellBasis, sup: HowellBasis) -> QuotientInvariants:
    """Invariant factors of span(sup)/span(sub); requires containment.

    The quotient is presented on the rows of ``sup``: its relation module
    is {a : a . sup in span(sub)}, read off from the kernel of the stacked
    matrix, and the invariant factors come from an integer Smith form with
    the modulus relations q*e_i adjoined.
    """
    if sub.modulus != sup.modulus:
        raise ModulusMismatch(f"{sub.modulus} vs {sup.modulus}")
    if sub.cols != sup.cols:
        raise ValueError("ambient dimension mismatch")
    for row in sub.matrix.array:
        if solve_membership(sup, row) is None:
            raise ContainmentError("sub is not contained in sup")
    q = sup.modulus.q
    s = sup.nrows
    if s == 0:
        return QuotientInvariants(())
    if sub.nrows == 0:
        relations = kernel(sup.matrix).matrix.array
    else:
        stacked = ModMatrix(
            sup.modulus, np.vstack([sup.matrix.array, sub.matrix.array])
        )
        relations = kernel(stacked).matrix.array[:, :s]
    rel_rows = [list(map(int, r)) for r in relations]
    rel_rows.extend([0] * i + [q] + [0] * (s - i - 1) for i in range(s))
    diag = smith_diagonal(rel_rows)
    factors = tuple(sorted(int(d) for d in diag if d > 1))
    return QuotientInvariants(factors)


def enumerate_span(basis: HowellBasis | ModMatrix, cap: int = 1 << 20) -> set[tuple[int, ...]]:
    """Explicit span as a set of tuples (test/oracle helper, small spans only)."""
    mat = basis.matrix if isinstance(basis, HowellBasis) else basis
    if mat.rows == 0:
        return {tuple([0] * mat.cols)}
    out, count = span_enumerate(np.ascontiguousarray(mat.array), mat.modulus.q, cap)
    if count < 0:
        raise ValueError("span too large to enumerate")
    return {tuple(int(x) for x in out[i]) for i in range(count)}
