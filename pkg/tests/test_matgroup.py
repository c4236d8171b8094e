import pytest

from h1loc.errors import ClosureCapExceeded, NonUnitError
from h1loc.matgroup import (
    Group,
    Mat2,
    SylowDecomposer,
    classify_mod_p_image,
    close,
    commutator,
    congruence_kernel,
    cyclic_subgroups,
    decompose_in_sylow,
    derived_subgroup,
    eigen_split,
    reduce_mod,
    semisimple_diagonal_lift,
    sylow_p,
    triangular_commutator_corner,
    triangular_slices,
)
from h1loc.residues import PrimePowerModulus


def brute_closure(gens, modulus):
    """Reference closure by repeated multiplication over explicit sets."""
    elems = {Mat2.identity(modulus).packed}
    frontier = list(elems)
    gens = [g.packed for g in gens]
    by_packed = {}
    while frontier:
        w = frontier.pop()
        for g in gens:
            prod = (Mat2.from_packed(g, modulus) * Mat2.from_packed(w, modulus)).packed
            if prod not in elems:
                elems.add(prod)
                frontier.append(prod)
    return elems


def test_mat_basic_ops(m5):
    sigma = Mat2(m5, 1, 1, 0, 1)
    assert (sigma**5).is_identity()
    assert sigma.order() == 5
    rho = Mat2(m5, 2, 0, 0, 1)
    assert rho.order() == 4  # 2 has multiplicative order 4 mod 5
    ident = Mat2.identity(m5)
    assert ident.inverse() == ident
    assert (rho * rho.inverse()).is_identity()
    with pytest.raises(NonUnitError):
        Mat2(m5, 5, 0, 0, 1).inverse()


def test_power_by_class(m25):
    sigma = Mat2(m25, 1, 1, 0, 1)
    assert sigma.order() == 25
    assert sigma.power_by_class(27) == sigma**2
    rho = Mat2(m25, 2, 0, 0, 1)
    with pytest.raises(ValueError):
        rho.power_by_class(3)  # order 20 does not divide 25


def test_closure_examples(m3, m5):
    assert close([], m3).order == 1
    assert close([Mat2(m3, 1, 1, 0, 1)], m3).order == 3
    g = close([Mat2(m5, 2, 0, 0, 1), Mat2(m5, 1, 1, 0, 1)], m5)
    assert g.order == 20
    assert g.packed_set == brute_closure(g.generators, m5)


def test_closure_cap(m25):
    with pytest.raises(ClosureCapExceeded):
        close([Mat2(m25, 1, 1, 0, 1), Mat2(m25, 1, 0, 1, 1)], m25, cap=100)


def test_closure_soundness(m25, rng):
    for _ in range(10):
        mats = []
        while len(mats) < 2:
            m = Mat2.from_entries(rng.integers(0, 25, size=4), m25)
            if m.is_invertible():
                mats.append(m)
        try:
            g = close(mats, m25, cap=3000)
        except ClosureCapExceeded:
            continue
        elems = list(g)
        picks = [elems[i] for i in rng.choice(len(elems), min(25, len(elems)), replace=False)]
        for x in picks:
            assert x.inverse() in g
            for y in picks[:6]:
                assert x * y in g


def test_reduce_mod(m25):
    g = close([Mat2(m25, 7, 0, 0, 1), Mat2(m25, 1, 1, 0, 1)], m25)
    assert reduce_mod(g, 2) is g
    r = reduce_mod(g, 1)
    assert 20 % r.order == 0
    # homomorphism property on all pairs
    for x in g:
        for y in list(g)[:10]:
            assert (x * y).reduce(1) == x.reduce(1) * y.reduce(1)
    triv = close([], m25)
    assert reduce_mod(triv, 1).order == 1


def test_sylow_examples(m3, m5):
    g = close([Mat2(m3, 1, 1, 0, 1)], m3)
    assert sylow_p(g).packed_set == g.packed_set
    d = close([Mat2(m5, 2, 0, 0, 1)], m5)
    assert sylow_p(d).order == 1
    gg = close([Mat2(m5, 2, 0, 0, 1), Mat2(m5, 1, 1, 0, 1)], m5)
    syl = sylow_p(gg)
    assert syl.order == 5
    assert syl.packed_set == close([Mat2(m5, 1, 1, 0, 1)], m5).packed_set


def test_triangular_slices(m5):
    g = close([Mat2(m5, 2, 0, 0, 1), Mat2(m5, 1, 1, 0, 1)], m5)
    s = triangular_slices(g)
    assert s.diag.order == 4
    assert s.strict_upper.order == 5
    assert s.strict_lower.order == 1
    assert s.upper.order == 20
    assert s.lower.order == 4
    lower_gen = close([Mat2(m3 := PrimePowerModulus(3, 1), 1, 0, 1, 1)], m3)
    assert triangular_slices(lower_gen).strict_upper.order == 1


def test_cyclic_subgroups(m5):
    triv = close([], m5)
    assert len(cyclic_subgroups(triv)) == 1
    sig = close([Mat2(m5, 1, 1, 0, 1)], m5)
    assert len(cyclic_subgroups(sig)) == 2  # trivial and the whole group
    g = close([Mat2(m5, 2, 0, 0, 1), Mat2(m5, 1, 1, 0, 1)], m5)
    subs = cyclic_subgroups(g)
    # brute force: all <x> as element sets
    brute = {frozenset(brute_closure([x], m5)) for x in g}
    assert {s.packed_set for s in subs} == brute
    assert len(subs) == len(brute)


def test_commutator_closed_form_worked_example(m5):
    delta = Mat2(m5, 2, 1, 0, 1)
    gamma = Mat2(m5, 1, 1, 0, 1)
    direct = commutator(delta, gamma)
    # (a*b' - a'*b + b*d' - b'*d) * d^-1 * d'^-1 = (2 - 1 + 1 - 1) * 1 = 1
    corner = triangular_commutator_corner(delta, gamma)
    assert corner.value == 1
    assert direct == Mat2(m5, 1, 1, 0, 1)


def test_derived_subgroup(m5):
    abelian = close([Mat2(m5, 2, 0, 0, 1)], m5)
    assert derived_subgroup(abelian).order == 1
    g = close([Mat2(m5, 2, 0, 0, 1), Mat2(m5, 1, 1, 0, 1)], m5)
    der = derived_subgroup(g)
    assert der.packed_set == close([Mat2(m5, 1, 1, 0, 1)], m5).packed_set
    # direct closure of all commutators agrees
    comms = {commutator(x, y).packed for x in g for y in g}
    assert der.packed_set == brute_closure(
        [Mat2.from_packed(c, m5) for c in comms], m5
    )


def test_classify_examples(m5):
    c = classify_mod_p_image(close([Mat2(m5, 2, 0, 0, 1)], m5))
    assert (c.form, c.order_rho, c.lambda1, c.lambda2) == ("cyclic-diag", 4, 2, 1)
    c2 = classify_mod_p_image(close([Mat2(m5, 1, 1, 0, 1)], m5))
    assert c2.form == "diag-plus-unipotent" and c2.rho.is_identity()
    # full GL2(F5) is not triangularizable in any basis
    full = close([Mat2(m5, 2, 0, 0, 1), Mat2(m5, 1, 1, 0, 1), Mat2(m5, 1, 0, 1, 1)], m5)
    assert full.order == 480
    assert classify_mod_p_image(full).form == "other"
    # scalar groups are excluded from the normal forms
    assert classify_mod_p_image(close([Mat2(m5, 2, 0, 0, 2)], m5)).form == "other"


def test_classify_conjugation_invariant(m5, rng):
    base = close([Mat2(m5, 2, 0, 0, 1), Mat2(m5, 1, 1, 0, 1)], m5)
    want = classify_mod_p_image(base)
    for _ in range(5):
        while True:
            t = Mat2.from_entries(rng.integers(0, 5, size=4), m5)
            if t.is_invertible():
                break
        conj = Group.from_closed(base.conjugated(t).packed, m5)
        got = classify_mod_p_image(conj)
        assert (got.form, got.order_rho) == (want.form, want.order_rho)
        assert {got.lambda1, got.lambda2} == {want.lambda1, want.lambda2}


def test_diagonal_lift_already_diagonal(m25):
    g = close([Mat2(m25, 7, 0, 0, 1)], m25)  # 7 = 2 mod 5, order 4 mod 25... order 4
    lift = semisimple_diagonal_lift(g)
    assert lift is not None
    assert lift.matrix.is_diagonal()
    assert lift.order == lift.matrix.order() == 4
    assert lift.matrix.reduce(1) == Mat2(PrimePowerModulus(5, 1), 2, 0, 0, 1)


def test_diagonal_lift_order_reduction(m25):
    # diag(2, 1) mod 25 has order 20; the lift must cut it back to 4
    g = close([Mat2(m25, 2, 0, 0, 1)], m25)
    assert Mat2(m25, 2, 0, 0, 1).order() == 20
    lift = semisimple_diagonal_lift(g)
    assert lift is not None
    assert lift.order == 4
    assert lift.matrix.order() == 4
    assert lift.matrix.reduce(1).a == 2 and lift.matrix.reduce(1).d == 1
    assert lift.matrix in lift.group


def test_diagonal_lift_excluded_cases(m25):
    assert semisimple_diagonal_lift(close([], m25)) is None  # rho = I
    assert semisimple_diagonal_lift(close([Mat2(m25, 1, 1, 0, 1)], m25)) is None


def test_congruence_kernel(m25):
    g = close([Mat2(m25, 7, 0, 0, 1), Mat2(m25, 1, 1, 0, 1)], m25)
    k = congruence_kernel(g, 1)
    assert all(m.reduce(1).is_identity() for m in k)
    assert k.order == g.order // reduce_mod(g, 1).order


def test_eigen_split_examples():
    m9 = PrimePowerModulus(3, 2)
    g = close([Mat2(m9, 2, 0, 0, 1), Mat2(m9, 1, 1, 0, 1), Mat2(m9, 1, 0, 3, 1)], m9)
    lift = semisimple_diagonal_lift(g)
    assert lift is not None
    ident = Mat2.identity(m9)
    assert eigen_split(ident, lift) == (ident, ident, ident, ident)
    tau = Mat2(m9, 1, 3, 3, 1)
    da, dd, up, lo = eigen_split(tau, lift)
    assert (da, dd) == (ident, ident)
    assert up == Mat2(m9, 1, 3, 0, 1) and lo == Mat2(m9, 1, 0, 3, 1)
    assert (da * dd * up * lo) == tau  # cross terms vanish mod 9
    tau2 = Mat2(m9, 4, 0, 0, 1)  # 1 + 3 on the first diagonal entry
    da, dd, up, lo = eigen_split(tau2, lift)
    assert da == tau2 and dd == ident and up == ident and lo == ident


def test_decompose_identity_and_single(m25):
    g = close([Mat2(m25, 7, 0, 0, 1), Mat2(m25, 1, 1, 0, 1)], m25)
    lift = semisimple_diagonal_lift(g)
    hn = sylow_p(lift.group)
    dec = SylowDecomposer(hn, lift)
    assert dec.decompose(Mat2.identity(m25)).factors == ()
    sigma = Mat2(m25, 1, 1, 0, 1)
    word = dec.decompose(sigma)
    assert word.product() == sigma
    assert all(tag == "strict_upper" for _, tag in word.factors)


def test_decompose_random_sylow_elements(m25, rng):
    g = close(
        [Mat2(m25, 7, 5, 10, 21), Mat2(m25, 1, 1, 0, 1), Mat2(m25, 1, 0, 5, 1)], m25
    )
    lift = semisimple_diagonal_lift(g)
    hn = sylow_p(lift.group)
    word_lengths = []
    for i in rng.choice(hn.order, size=60, replace=False):
        tau = hn.element(int(i))
        word = decompose_in_sylow(tau, hn, lift)
        assert word.product() == tau
        for mat, tag in word.factors:
            assert mat in hn
            assert {
                "diag": mat.is_diagonal(),
                "strict_upper": mat.is_strict_upper(),
                "strict_lower": mat.is_strict_lower(),
            }[tag]
        word_lengths.append(len(word.factors))
    assert max(word_lengths) > 1


def test_group_hash_is_presentation_independent(m5):
    a = close([Mat2(m5, 2, 0, 0, 1), Mat2(m5, 1, 1, 0, 1)], m5)
    b = close([Mat2(m5, 1, 1, 0, 1), Mat2(m5, 3, 0, 0, 1)], m5)
    assert a.packed_set == b.packed_set
    assert a.group_hash == b.group_hash
