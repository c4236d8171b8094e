"""Hypothesis predicates and theorem-level verdicts for scanned groups.

The main criterion verified here: for a group whose mod-p image has the
triangular normal form with diagonal part of order at least 3 and which
fixes no nonzero vector of the p-torsion, the local-condition subgroup of
H^1 must vanish.  A violation is never counted; it aborts with a
reproduction bundle, because it indicates an implementation bug.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .cohomology import Action, coboundary_witness, restrict
from .errors import BudgetExceeded, FalsificationError
from .linalg import QuotientInvariants, solve_membership
from .matgroup import (
    Group,
    Mat2,
    classify_mod_p_image,
    close,
    reduce_mod,
    semisimple_diagonal_lift,
    triangular_slices,
)

# Known prime bounds for rational and quadratic torsion / isogenies.
ISOGENY_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 37, 43, 67, 163)
TORSION_PRIMES = (2, 3, 5, 7)
QUADRATIC_TORSION_PRIMES = (2, 3, 5, 7, 11, 13)


def _mod_p(group: Group) -> Group:
    return reduce_mod(group, 1) if group.modulus.n > 1 else group


def fixed_point_exact_order_p(group: Group) -> bool:
    """Does some nonzero vector of (Z/pZ)^2 stay fixed under every element?

    Every nonzero vector of the mod-p module has exact order p, so this is
    the group-side shadow of a rational torsion point of exact order p.
    """
    g1 = _mod_p(group)
    p = g1.modulus.p
    gens = list(g1.generators) or [Mat2.identity(g1.modulus)]
    for v in product(range(p), repeat=2):
        if v == (0, 0):
            continue
        if all(tuple(g.apply(v)) == v for g in gens):
            return True
    return False


def stabilizes_line_mod_p(group: Group) -> bool:
    """Does the mod-p image map some line of (Z/pZ)^2 to itself?"""
    g1 = _mod_p(group)
    p = g1.modulus.p
    gens = list(g1.generators)
    lines = [(0, 1)] + [(1, t) for t in range(p)]
    for v in lines:
        ok = True
        for g in gens:
            w = g.apply(v)
            # w must be proportional to v
            if (w[0] * v[1] - w[1] * v[0]) % p != 0:
                ok = False
                break
        if ok:
            return True
    return False


def has_nontrivial_scalar_mod_p(group: Group) -> bool:
    g1 = _mod_p(group)
    p = g1.modulus.p
    return any(m.is_scalar() and m.a % p != 1 for m in g1)


def diagonal_part_noncyclic(group: Group) -> bool:
    g1 = _mod_p(group)
    diag = [m for m in g1 if m.is_diagonal()]
    packed = np.array([m.packed for m in diag], dtype=np.int64)
    sub = Group.from_closed(packed, g1.modulus, cap=g1.cap)
    return not sub.is_cyclic()


@dataclass(frozen=True)
class HypothesisReport:
    """All hypothesis-level facts about one group, mod-p level."""

    g1_form: str
    order_rho: int
    lambda1: Optional[int]
    lambda2: Optional[int]
    has_fixed_point_exact_order_p: bool
    stabilizes_line_mod_p: bool
    has_nontrivial_scalar: bool
    diag_noncyclic: bool
    g1_cyclic: bool

    def lemma_form_ok(self) -> bool:
        return self.g1_form in ("cyclic-diag", "diag-plus-unipotent") and self.order_rho >= 3

    def as_dict(self) -> dict:
        return {
            "g1_form": self.g1_form,
            "order_rho": self.order_rho,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "has_fixed_point_exact_order_p": self.has_fixed_point_exact_order_p,
            "stabilizes_line_mod_p": self.stabilizes_line_mod_p,
            "has_nontrivial_scalar": self.has_nontrivial_scalar,
            "diag_noncyclic": self.diag_noncyclic,
            "g1_cyclic": self.g1_cyclic,
        }


def hypothesis_report(group: Group) -> HypothesisReport:
    g1 = _mod_p(group)
    cls = classify_mod_p_image(g1)
    return HypothesisReport(
        g1_form=cls.form,
        order_rho=cls.order_rho,
        lambda1=cls.lambda1,
        lambda2=cls.lambda2,
        has_fixed_point_exact_order_p=fixed_point_exact_order_p(group),
        stabilizes_line_mod_p=stabilizes_line_mod_p(group),
        has_nontrivial_scalar=has_nontrivial_scalar_mod_p(group),
        diag_noncyclic=diagonal_part_noncyclic(group),
        g1_cyclic=g1.is_cyclic(),
    )


@dataclass
class TheoremVerdict:
    """Outcome of one theorem-level check on one group."""

    name: str
    applicable: bool
    conclusion_checked: Optional[bool]
    h1: Optional[QuotientInvariants]
    h1_loc: Optional[QuotientInvariants]
    violated_hypotheses: list = field(default_factory=list)
    detail: str = ""

    @property
    def status(self) -> str:
        if self.applicable and self.conclusion_checked is None:
            return "unchecked"
        if self.applicable and not self.conclusion_checked:
            return "falsified"
        return "ok"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "applicable": self.applicable,
            "conclusion_checked": self.conclusion_checked,
            "h1": list(self.h1.factors) if self.h1 is not None else None,
            "h1_loc": list(self.h1_loc.factors) if self.h1_loc is not None else None,
            "violated_hypotheses": self.violated_hypotheses,
            "status": self.status,
            "detail": self.detail,
        }


def _reproduction_bundle(group: Group, extra: Optional[dict] = None) -> dict:
    bundle = {
        "p": group.modulus.p,
        "n": group.modulus.n,
        "generators": [[[g.a, g.b], [g.c, g.d]] for g in group.generators],
        "order": group.order,
        "hash": group.group_hash,
    }
    if extra:
        bundle.update(extra)
    return bundle


def _nonlocal_witness_cocycle(act: Action) -> Optional[list]:
    """A representative cocycle outside the coboundaries, for bundles."""
    space = act.local_cocycle_space
    for row in space.basis.matrix.array:
        if solve_membership(act.coboundary_space.basis, row) is None:
            return [int(x) for x in row]
    return None


def local_vanishing_verdict(group: Group, budget: Optional[int] = None) -> TheoremVerdict:
    """The main criterion: hypotheses hold => the local subgroup of H^1 is zero.

    applicable := no fixed vector of exact order p, and either the mod-p
    image has the triangular normal form with diagonal order >= 3 or H^1
    is already trivial (trivial H^1 short-circuits the conclusion).
    A budget overrun leaves the verdict unchecked instead of failing.
    """
    report = hypothesis_report(group)
    act = Action(group, budget=budget)
    h1v = h1locv = None
    try:
        h1v = act.h1()
        h1locv = act.h1_loc()
    except BudgetExceeded:
        pass
    violated = []
    if report.has_fixed_point_exact_order_p:
        violated.append("fixed point of exact order p exists")
    if not report.lemma_form_ok():
        if h1v is None or not h1v.is_trivial():
            violated.append("mod-p image lacks the triangular normal form with order(rho) >= 3")
    applicable = not violated
    conclusion = None if h1locv is None else h1locv.is_trivial()
    verdict = TheoremVerdict(
        name="local-vanishing-criterion",
        applicable=applicable,
        conclusion_checked=conclusion,
        h1=h1v,
        h1_loc=h1locv,
        violated_hypotheses=violated,
    )
    if verdict.status == "falsified":
        raise FalsificationError(
            "local-vanishing criterion falsified",
            _reproduction_bundle(
                group,
                {
                    "hypotheses": report.as_dict(),
                    "h1": list(h1v.factors),
                    "h1_loc": list(h1locv.factors),
                    "cocycle": _nonlocal_witness_cocycle(act),
                },
            ),
        )
    return verdict


def eigenvalue_case_verdict(group: Group, budget: Optional[int] = None) -> TheoremVerdict:
    """Case split on the diagonal eigenvalues, checked when H^1 is nonzero.

    Case 1: both eigenvalues differ from 1.  Case 2: the mod-p image is
    not cyclic and the second eigenvalue is 1.  Either way, the local
    subgroup must vanish; outside both cases the verdict reports the
    hypotheses as not met.
    """
    report = hypothesis_report(group)
    act = Action(group, budget=budget)
    try:
        h1v = act.h1()
    except BudgetExceeded:
        return TheoremVerdict(
            "eigenvalue-case", False, None, None, None, ["budget exceeded"]
        )
    if h1v.is_trivial():
        return TheoremVerdict(
            "eigenvalue-case", False, None, h1v, None, ["H1 already trivial"]
        )
    if not report.lemma_form_ok():
        return TheoremVerdict(
            "eigenvalue-case", False, None, h1v, None,
            ["normal form with order(rho) >= 3 not available"],
        )
    l1, l2 = report.lambda1, report.lambda2
    case = None
    if l1 != 1 and l2 != 1:
        case = "both-eigenvalues-nontrivial"
    elif l2 == 1 and not report.g1_cyclic:
        case = "noncyclic-with-unit-eigenvalue"
    if case is None:
        return TheoremVerdict(
            "eigenvalue-case", False, None, h1v, None,
            [f"eigenvalue pattern ({l1}, {l2}) excluded by hypothesis"],
        )
    h1locv = act.h1_loc()
    verdict = TheoremVerdict(
        "eigenvalue-case", True, h1locv.is_trivial(), h1v, h1locv, [], detail=case
    )
    if verdict.status == "falsified":
        raise FalsificationError(
            f"eigenvalue case {case} falsified",
            _reproduction_bundle(
                group,
                {
                    "hypotheses": report.as_dict(),
                    "case": case,
                    "cocycle": _nonlocal_witness_cocycle(act),
                },
            ),
        )
    return verdict


def slice_vanishing_suite(group: Group, budget: Optional[int] = None) -> dict:
    """Local-vanishing checks for the triangular slice subgroups.

    In the diagonal-lift basis: the groups generated by the lift together
    with either strictly-triangular slice always have trivial local
    cohomology; under the eigenvalue cases the full triangular slices do
    too.  Also re-derives the mechanism for the strictly-lower part: a
    cyclic normal p-Sylow with trivial local cohomology forces the whole
    extension's local cohomology to vanish.
    """
    rows: dict[str, Optional[dict]] = {}
    report = hypothesis_report(group)
    lift = semisimple_diagonal_lift(group)
    if lift is None or report.order_rho < 3:
        return {"skipped": "no diagonal lift with order >= 3"}
    conj = lift.group
    act = Action(group, budget=budget)
    try:
        h1v = act.h1()
    except BudgetExceeded:
        return {"skipped": "budget exceeded"}
    hyp_base = not h1v.is_trivial()
    slices = triangular_slices(conj)
    mod = conj.modulus
    cap = conj.cap

    def check(name: str, sub: Group, expect_trivial: bool):
        sub_act = Action(sub, budget=budget)
        value = sub_act.h1_loc()
        rows[name] = {
            "order": sub.order,
            "h1_loc": list(value.factors),
            "expected_trivial": expect_trivial,
        }
        if expect_trivial and not value.is_trivial():
            raise FalsificationError(
                f"slice check {name} falsified",
                _reproduction_bundle(sub, {"slice": name}),
            )

    rho = lift.matrix
    with_su = close([rho] + list(slices.strict_upper.generators), mod, cap)
    with_sl = close([rho] + list(slices.strict_lower.generators), mod, cap)
    check("lift-with-strict-upper", with_su, hyp_base)
    check("lift-with-strict-lower", with_sl, hyp_base)
    # mechanism rows: strictly-lower slice is cyclic, so its local part dies,
    # and the prime-to-p extension by the lift keeps it dead
    rows["strict-lower-cyclic"] = {"cyclic": slices.strict_lower.is_cyclic()}
    check("strict-lower-alone", slices.strict_lower, True)
    l1, l2 = report.lambda1, report.lambda2
    if hyp_base and l1 is not None and l1 != 1 and l2 != 1:
        check("upper-slice", slices.upper, True)
        check("lower-slice", slices.lower, True)
    elif hyp_base and l2 == 1 and not report.g1_cyclic:
        check("upper-slice", slices.upper, True)
    else:
        rows["upper-slice"] = None  # hypotheses not met; nothing claimed
    return rows


def gluing_witnesses(group: Group, budget: Optional[int] = None) -> dict:
    """Check coherence of coboundary witnesses across the triangular slices.

    For each basis cocycle of the local subspace: restrictions to the lower
    and upper slices (in the lift basis) are coboundaries with witnesses P
    and Q, and P - Q is killed by (rho_n - 1) since both witness the value
    at the diagonal lift.
    """
    from .cohomology import Cocycle

    lift = semisimple_diagonal_lift(group)
    if lift is None:
        return {"skipped": "no diagonal lift"}
    conj = lift.group
    act = Action(conj, budget=budget)
    slices = triangular_slices(conj)
    q = conj.modulus.q
    rho = lift.matrix
    delta = rho.array() - np.eye(2, dtype=np.int64)
    lower_subs = [
        slices.lower,
        close([rho] + list(slices.strict_lower.generators), conj.modulus, conj.cap),
    ]
    checked = 0
    for row in act.local_cocycle_space.basis.matrix.array:
        z = Cocycle(conj, np.asarray(row, dtype=np.int64).reshape(conj.order, 2))
        q_wit = coboundary_witness(restrict(z, slices.upper))
        if q_wit is None:
            continue  # upper restriction not a coboundary: nothing to glue
        for lower_sub in lower_subs:
            p_wit = coboundary_witness(restrict(z, lower_sub))
            if p_wit is None:
                continue
            diff = (p_wit - q_wit) % q
            if np.any((delta @ diff) % q):
                raise FalsificationError(
                    "witness difference not killed by the diagonal lift",
                    _reproduction_bundle(conj, {"cocycle": [int(x) for x in row]}),
                )
            checked += 1
    return {"checked_restriction_pairs": checked}


def constants(degree: int) -> dict:
    """Prime bound table for the local-global divisibility question.

    Degrees 1 and 2 carry the proved constants 7 and 13 with their prime
    sets; for higher degrees only the cyclotomic bound 2*degree + 1 is
    reported and the torsion bound is left explicitly uncomputed.
    """
    if degree < 1:
        raise ValueError("degree must be a positive integer")
    table = {
        "degree": degree,
        "isogeny_primes": list(ISOGENY_PRIMES),
        "rational_torsion_primes": list(TORSION_PRIMES),
        "quadratic_torsion_primes": list(QUADRATIC_TORSION_PRIMES),
        "cyclotomic_bound": 2 * degree + 1,
    }
    if degree == 1:
        table["constant"] = 7
        table["minimal_set"] = list(TORSION_PRIMES)
    elif degree == 2:
        table["constant"] = 13
        table["minimal_set"] = list(QUADRATIC_TORSION_PRIMES)
    else:
        table["constant"] = None
        table["torsion_bound"] = "unavailable (not computed)"
        table["note"] = (
            "constant = max(cyclotomic bound, degree-dependent torsion bound); "
            "the torsion bound is not computed here"
        )
    return table
