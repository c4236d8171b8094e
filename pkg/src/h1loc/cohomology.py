"""First cohomology of matrix groups acting on M = (Z/p^nZ)^2.

A cocycle is a map z: G -> M with z(xy) = z(x) + x.z(y); it is determined
by its values on generators, so the solution space of the generator-indexed
system is computed on 2k unknowns via transport matrices along the Cayley
graph, then expanded and canonicalized as a Howell basis over the
element-indexed coordinates M^|G| (2|G| residues, closure insertion order).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import _kernels as K
from .errors import (
    BudgetExceeded,
    FalsificationError,
    NotCentralError,
    NotSubgroupError,
)
from .linalg import (
    HowellBasis,
    ModMatrix,
    QuotientInvariants,
    howell_form,
    intersect_spans,
    kernel,
    quotient_invariants,
    solve_membership,
    solve_right,
    span_contains,
)
from .matgroup import Group, Mat2

DEFAULT_BUDGET = 2000


def default_budget() -> int:
    env = os.environ.get("H1LOC_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class Action:
    """The natural action of a matrix group on column vectors of (Z/p^nZ)^2."""

    def __init__(self, group: Group, budget: Optional[int] = None):
        self.group = group
        self.modulus = group.modulus
        self.rank = 2
        self.budget = default_budget() if budget is None else budget

    def _check_budget(self):
        if self.group.order > self.budget:
            raise BudgetExceeded(
                f"group order {self.group.order} exceeds cohomology budget {self.budget}"
            )

    @cached_property
    def _transport(self):
        """(A, prod, pos0): per-element value transport and product indices."""
        self._check_budget()
        gens = np.array([g.packed for g in self.group.generators], dtype=np.int64)
        if gens.shape[0] == 0:
            n = self.group.order
            return (
                np.zeros((n, 2, 0), dtype=np.int64),
                np.zeros((0, n), dtype=np.int64),
                0,
            )
        return K.cayley_transport(self.group.packed, gens, self.modulus.q)

    @cached_property
    def _gen_arrays(self) -> np.ndarray:
        return np.array([g.array() for g in self.group.generators], dtype=np.int64)

    def _constraint_rows(self) -> np.ndarray:
        """Rows of the generator-indexed linear system on generator values."""
        A, prod, _ = self._transport
        q = self.modulus.q
        k = len(self.group.generators)
        if k == 0:
            return np.zeros((0, 0), dtype=np.int64)
        blocks = []
        for i in range(k):
            gi = self._gen_arrays[i]
            lhs = A[prod[i]]
            rhs = np.einsum("ab,xbj->xaj", gi, A) % q
            rhs[:, 0, 2 * i] = (rhs[:, 0, 2 * i] + 1) % q
            rhs[:, 1, 2 * i + 1] = (rhs[:, 1, 2 * i + 1] + 1) % q
            diff = (lhs - rhs) % q
            blocks.append(diff.reshape(-1, 2 * k))
        rows = np.vstack(blocks)
        return rows[rows.any(axis=1)]

    @cached_property
    def _value_space(self) -> HowellBasis:
        """Basis of admissible generator-value tuples (2k coordinates)."""
        rows = self._constraint_rows()
        k = len(self.group.generators)
        if k == 0:
            return howell_form(ModMatrix.zeros(0, 0, self.modulus))
        if rows.shape[0] == 0:
            return howell_form(ModMatrix.identity(2 * k, self.modulus))
        return kernel(ModMatrix(self.modulus, rows.T))

    def _expand(self, vrows: np.ndarray) -> np.ndarray:
        """Generator-value rows -> full element-indexed cocycle rows."""
        A, _, _ = self._transport
        n = self.group.order
        if vrows.shape[0] == 0:
            return np.zeros((0, 2 * n), dtype=np.int64)
        vals = np.einsum("xaj,rj->rxa", A, vrows) % self.modulus.q
        return vals.reshape(vrows.shape[0], 2 * n)

    @cached_property
    def cocycle_space(self) -> "CocycleSpace":
        self._check_budget()
        expanded = self._expand(self._value_space.matrix.array)
        basis = howell_form(ModMatrix(self.modulus, expanded))
        space = CocycleSpace(self, basis)
        space.verify_rows()
        return space

    @cached_property
    def coboundary_space(self) -> "CocycleSpace":
        self._check_budget()
        q = self.modulus.q
        n = self.group.order
        rows = np.zeros((2, 2 * n), dtype=np.int64)
        for pos in range(n):
            m = self.group.element(pos)
            delta = (m.array() - np.eye(2, dtype=np.int64)) % q
            rows[0, 2 * pos : 2 * pos + 2] = delta[:, 0]
            rows[1, 2 * pos : 2 * pos + 2] = delta[:, 1]
        basis = howell_form(ModMatrix(self.modulus, rows))
        if not span_contains(self.cocycle_space.basis, basis):
            raise AssertionError("coboundaries escaped the cocycle space")
        return CocycleSpace(self, basis)

    @cached_property
    def _image_tests(self) -> list:
        """Per-element membership tests for Im(x - 1).

        Over Z/p^nZ a vector v lies in the column image of (x - 1) exactly
        when every linear functional killing that image kills v, so each
        element contributes the rows of the left kernel of (x - 1).
        """
        q = self.modulus.q
        tests = []
        for pos in range(self.group.order):
            m = self.group.element(pos)
            delta = ModMatrix(self.modulus,
                              (m.array() - np.eye(2, dtype=np.int64)) % q)
            ker = kernel(delta)
            tests.append((pos, ker.matrix.array))
        return tests

    @cached_property
    def local_cocycle_space(self) -> "CocycleSpace":
        """Cocycles whose value at every x lies in Im(x - 1)."""
        self._check_budget()
        A, _, _ = self._transport
        k = len(self.group.generators)
        vspace = self._value_space.matrix.array
        if vspace.shape[0] == 0 or k == 0:
            return self.coboundary_space
        q = self.modulus.q
        rows = []
        for pos, test in self._image_tests:
            if test.shape[0] == 0:
                continue
            comb = (test @ A[pos]) % q  # conditions on generator values
            rows.append(comb)
        if rows:
            cons = np.vstack(rows)
            cons = cons[cons.any(axis=1)]
        else:
            cons = np.zeros((0, 2 * k), dtype=np.int64)
        # solutions inside the admissible value space
        if cons.shape[0] == 0:
            sol = howell_form(ModMatrix(self.modulus, vspace))
        else:
            lifted = (vspace @ cons.T) % q  # constraints pulled to v-space coords
            coeff = kernel(ModMatrix(self.modulus, lifted))
            picked = (coeff.matrix.array @ vspace) % q if coeff.nrows else np.zeros(
                (0, vspace.shape[1]), dtype=np.int64
            )
            sol = howell_form(ModMatrix(self.modulus, picked))
        expanded = self._expand(sol.matrix.array)
        both = np.vstack([expanded, self.coboundary_space.basis.matrix.array])
        basis = howell_form(ModMatrix(self.modulus, both))
        space = CocycleSpace(self, basis)
        space.verify_rows()
        return space

    @cached_property
    def local_cocycle_space_via_cyclic(self) -> "CocycleSpace":
        """Alternate route: intersect kernels of restrictions to cyclic subgroups.

        For each cyclic subgroup C the kernel condition is that the
        restricted cocycle is a coboundary on C, i.e. some W works for all
        of C at once; the per-element witness route must agree (tested).
        """
        from .matgroup import cyclic_subgroups

        self._check_budget()
        A, _, _ = self._transport
        k = len(self.group.generators)
        if k == 0:
            return self.coboundary_space
        q = self.modulus.q
        vspace = self._value_space
        current = vspace
        for sub in cyclic_subgroups(self.group):
            positions = [self.group.index_of(m) for m in sub]
            mats = [self.group.element(pos) for pos in positions]
            # unknowns (v, W): z(x) - (x - 1) W = 0 for x in C
            rows = []
            for pos, m in zip(positions, mats):
                delta = (m.array() - np.eye(2, dtype=np.int64)) % q
                block = np.zeros((2, 2 * k + 2), dtype=np.int64)
                block[:, : 2 * k] = A[pos]
                block[:, 2 * k :] = (-delta) % q
                rows.append(block)
            system = np.vstack(rows)
            ker = kernel(ModMatrix(self.modulus, system.T))
            vpart = ker.matrix.array[:, : 2 * k] if ker.nrows else np.zeros(
                (0, 2 * k), dtype=np.int64
            )
            current = intersect_spans(current, howell_form(ModMatrix(self.modulus, vpart)))
        expanded = self._expand(current.matrix.array)
        both = np.vstack([expanded, self.coboundary_space.basis.matrix.array])
        return CocycleSpace(self, howell_form(ModMatrix(self.modulus, both)))

    def h1(self) -> QuotientInvariants:
        return quotient_invariants(self.coboundary_space.basis, self.cocycle_space.basis)

    def h1_loc(self) -> QuotientInvariants:
        return quotient_invariants(self.coboundary_space.basis, self.local_cocycle_space.basis)

    def h1_loc_via_cyclic(self) -> QuotientInvariants:
        return quotient_invariants(
            self.coboundary_space.basis, self.local_cocycle_space_via_cyclic.basis
        )


@dataclass
class Cocycle:
    """A single cocycle: one value in M per group element, insertion order."""

    group: Group
    values: np.ndarray  # shape (|G|, 2)

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def value_at(self, m: Mat2) -> np.ndarray:
        return self.values[self.group.index_of(m)]

    def is_coboundary_with(self, w: np.ndarray) -> bool:
        q = self.group.modulus.q
        for pos in range(self.group.order):
            m = self.group.element(pos)
            expect = (m.apply(w) - np.asarray(w, dtype=np.int64)) % q
            if not np.array_equal(expect, self.values[pos] % q):
                return False
        return True


class CocycleSpace:
    """Submodule of M^|G| presented by a Howell-form generator matrix."""

    def __init__(self, action: Action, basis: HowellBasis):
        self.action = action
        self.group = action.group
        self.basis = basis

    @property
    def size(self) -> int:
        return self.basis.span_size()

    def cocycle(self, coefficients) -> Cocycle:
        coeffs = np.asarray(coefficients, dtype=np.int64)
        vals = (coeffs @ self.basis.matrix.array) % self.group.modulus.q
        return Cocycle(self.group, vals.reshape(self.group.order, 2))

    def random_cocycle(self, rng: np.random.Generator) -> Cocycle:
        coeffs = rng.integers(0, self.group.modulus.q, size=self.basis.nrows)
        return self.cocycle(coeffs)

    def contains(self, z: Cocycle) -> bool:
        return solve_membership(self.basis, z.flat()) is not None

    def verify_rows(self):
        """Every basis row satisfies the cocycle identity against all generators."""
        q = self.group.modulus.q
        A, prod, _ = self.action._transport
        k = len(self.group.generators)
        arr = self.basis.matrix.array
        if arr.shape[0] == 0 or k == 0:
            return
        vals = arr.reshape(arr.shape[0], self.group.order, 2)
        for i, g in enumerate(self.group.generators):
            gm = g.array()
            lhs = vals[:, prod[i], :]
            rhs = (vals[:, self.group.index_of(g), :][:, None, :]
                   + np.einsum("ab,rxb->rxa", gm, vals)) % q
            if not np.array_equal(lhs, rhs % q):
                raise AssertionError("constructed basis row violates the cocycle identity")


def cocycle_space(act: Action) -> CocycleSpace:
    return act.cocycle_space


def coboundary_space(act: Action) -> CocycleSpace:
    return act.coboundary_space


def h1(act: Action | Group) -> QuotientInvariants:
    if isinstance(act, Group):
        act = Action(act)
    return act.h1()


def h1_loc(act: Action | Group) -> QuotientInvariants:
    if isinstance(act, Group):
        act = Action(act)
    return act.h1_loc()


def restrict(z: Cocycle, sub: Group) -> Cocycle:
    """Restriction of a cocycle to a subgroup (still a cocycle)."""
    if not sub.is_subgroup_of(z.group):
        raise NotSubgroupError("restriction target is not a subgroup")
    vals = np.array(
        [z.values[z.group.index_of(m)] for m in sub], dtype=np.int64
    ).reshape(sub.order, 2)
    return Cocycle(sub, vals)


def sah_annihilate(act: Action, alpha: Mat2, z: Cocycle) -> Cocycle:
    """Apply x -> (alpha - 1) x to a cocycle for a central alpha.

    The result is always a coboundary (checked here, loudly): conjugation
    invariance of cohomology forces central elements to act trivially.
    """
    q = act.modulus.q
    for g in act.group.generators:
        if (alpha * g).packed != (g * alpha).packed:
            raise NotCentralError(f"{alpha} does not commute with generator {g}")
    delta = (alpha.array() - np.eye(2, dtype=np.int64)) % q
    vals = np.einsum("ab,xb->xa", delta, z.values) % q
    out = Cocycle(act.group, vals)
    if solve_membership(act.coboundary_space.basis, out.flat()) is None:
        raise FalsificationError(
            "central annihilation produced a non-coboundary",
            {
                "p": act.modulus.p,
                "n": act.modulus.n,
                "generators": [[[g.a, g.b], [g.c, g.d]] for g in act.group.generators],
                "alpha": [[alpha.a, alpha.b], [alpha.c, alpha.d]],
                "cocycle": z.values.tolist(),
            },
        )
    return out


def local_witnesses(z: Cocycle) -> list[np.ndarray]:
    """Per-element witnesses W with z(x) = (x - 1) W, one for each element.

    Exists exactly when the class of z satisfies the local conditions;
    raises ValueError otherwise.
    """
    q = z.group.modulus.q
    out = []
    for pos in range(z.group.order):
        m = z.group.element(pos)
        delta_t = ModMatrix(z.group.modulus,
                            ((m.array() - np.eye(2, dtype=np.int64)) % q).T)
        w = solve_right(delta_t, z.values[pos])
        if w is None:
            raise ValueError(f"no local witness at element {m}")
        out.append(w % q)
    return out


def coboundary_witness(z: Cocycle) -> Optional[np.ndarray]:
    """A single W with z(x) = (x - 1) W for all x, when z is a coboundary."""
    q = z.group.modulus.q
    rows = []
    rhs = []
    for pos in range(z.group.order):
        m = z.group.element(pos)
        delta = (m.array() - np.eye(2, dtype=np.int64)) % q
        rows.append(delta.T)
        rhs.append(z.values[pos])
    stacked = ModMatrix(z.group.modulus, np.hstack(rows))
    target = np.concatenate(rhs)
    w = solve_right(stacked, target)
    return None if w is None else w % q
