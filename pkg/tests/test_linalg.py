import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h1loc.errors import ContainmentError
from h1loc.linalg import (
    ModMatrix,
    enumerate_span,
    howell_form,
    intersect_spans,
    kernel,
    quotient_invariants,
    smith_diagonal,
    solve_membership,
    solve_right,
)
from h1loc.residues import PrimePowerModulus


def span_brute(rows, q, dim=None):
    """Reference span enumeration, independent of the kernels."""
    if dim is None:
        dim = len(rows[0]) if rows else 0
    out = {tuple([0] * dim)}
    frontier = [next(iter(out))]
    while frontier:
        base = frontier.pop()
        for r in rows:
            v = tuple((b + x) % q for b, x in zip(base, r))
            if v not in out:
                out.add(v)
                frontier.append(v)
    return out


def test_howell_zero_matrix(m9):
    h = howell_form(ModMatrix.zeros(3, 2, m9))
    assert h.nrows == 0 and h.span_size() == 1


def test_howell_identity_fixed(m9):
    ident = ModMatrix.identity(2, m9)
    h = howell_form(ident)
    assert h.matrix == ident
    assert howell_form(h) == h


def test_howell_span_preserved_3033(m9):
    rows = [(3, 0), (0, 3), (3, 3)]
    h = howell_form(ModMatrix.from_rows(rows, m9))
    got = span_brute([list(r) for r in h.matrix.array], 9)
    want = span_brute([list(r) for r in rows], 9)
    assert got == want
    assert len(want) == 9  # index-9 submodule of (Z/9)^2
    assert h.span_size() == 9


def test_membership_zero_and_miss(m9):
    basis = howell_form(ModMatrix.from_rows([(3, 0)], m9))
    coeffs = solve_membership(basis, [0, 0])
    assert coeffs is not None and not coeffs.any()
    assert solve_membership(basis, [1, 0]) is None  # 3x = 1 unsolvable mod 9


def test_membership_random_recovery(m25, rng):
    for _ in range(1000):
        mat = ModMatrix(m25, rng.integers(0, 25, size=(3, 4)))
        basis = howell_form(mat)
        combo = rng.integers(0, 25, size=basis.nrows)
        v = (combo @ basis.matrix.array) % 25 if basis.nrows else np.zeros(4, dtype=np.int64)
        coeffs = solve_membership(basis, v)
        assert coeffs is not None
        recon = (coeffs @ basis.matrix.array) % 25 if basis.nrows else v
        assert np.array_equal(recon, v)


def test_kernel_of_identity_and_zero(m9):
    assert kernel(ModMatrix.identity(2, m9)).nrows == 0
    k = kernel(ModMatrix.zeros(2, 2, m9))
    assert k.span_size() == 81  # the whole module (Z/9)^2


def test_kernel_diag_shape(m25):
    # diag(u, 0) with u a unit: kernel is the second coordinate line
    m = ModMatrix.from_rows([(7, 0), (0, 0)], m25)
    k = kernel(m)
    want = {v for v in span_brute([[0, 1]], 25)}
    got = {tuple(int(x) for x in row) for row in k.matrix.array}
    assert k.span_size() == 25
    full = span_brute([list(r) for r in k.matrix.array], 25)
    # brute force over all 625 candidate vectors
    expect = {
        (a, b)
        for a in range(25)
        for b in range(25)
        if (a * 7) % 25 == 0 and 0 == (b * 0) % 25
    }
    assert full == expect == want


def test_kernel_rows_annihilate(m9, rng):
    for _ in range(200):
        m = ModMatrix(m9, rng.integers(0, 9, size=(3, 3)))
        k = kernel(m)
        for row in k.matrix.array:
            assert not ((row @ m.array) % 9).any()


def test_kernel_image_duality_bruteforce(m9, m25, rng):
    for mod in (m9, m25):
        for _ in range(25):
            m = ModMatrix(mod, rng.integers(0, mod.q, size=(4, 4)))
            ker = kernel(m)
            img = howell_form(m)
            nk = len(span_brute([list(r) for r in ker.matrix.array], mod.q))
            ni = len(span_brute([list(r) for r in img.matrix.array], mod.q))
            assert nk == ker.span_size() and ni == img.span_size()
            assert nk * ni == mod.q**4


def test_quotient_trivial_and_full(m9):
    full = howell_form(ModMatrix.identity(2, m9))
    assert quotient_invariants(full, full).is_trivial()
    zero = howell_form(ModMatrix.zeros(0, 2, m9))
    assert quotient_invariants(zero, full).factors == (9, 9)


def test_quotient_3333(m9):
    sub = howell_form(ModMatrix.from_rows([(3, 0), (0, 3)], m9))
    full = howell_form(ModMatrix.identity(2, m9))
    inv = quotient_invariants(sub, full)
    assert inv.factors == (3, 3)
    # brute-force coset count: 81 / 9 = 9, exponent 3
    assert inv.order == 81 // len(span_brute([[3, 0], [0, 3]], 9))


def test_quotient_requires_containment(m9):
    a = howell_form(ModMatrix.from_rows([(1, 0)], m9))
    b = howell_form(ModMatrix.from_rows([(3, 0)], m9))
    with pytest.raises(ContainmentError):
        quotient_invariants(a, b)


def test_quotient_vs_coset_enumeration(m9, m25, rng):
    """Invariant factors agree with explicit coset order census."""
    for mod in (m9, m25):
        q, p, n = mod.q, mod.p, mod.n
        for _ in range(40):
            sup = howell_form(ModMatrix(mod, rng.integers(0, q, size=(2, 2))))
            mixer = rng.integers(0, q, size=(2, sup.nrows)) if sup.nrows else None
            if sup.nrows == 0:
                continue
            subrows = (mixer @ sup.matrix.array * p) % q
            sub = howell_form(ModMatrix(mod, subrows))
            inv = quotient_invariants(sub, sup)
            sup_set = span_brute([list(r) for r in sup.matrix.array], q, dim=2)
            sub_set = span_brute([list(r) for r in sub.matrix.array], q, dim=2)
            assert inv.order == len(sup_set) // len(sub_set)
            # exponent check: largest factor = max order of a coset
            if inv.factors:
                top = inv.factors[-1]
                orders = set()
                for v in sup_set:
                    k = 1
                    while tuple((k * x) % q for x in v) not in sub_set:
                        k += 1
                    orders.add(k)
                assert max(orders) == top


def test_intersect_spans(m9):
    a = howell_form(ModMatrix.from_rows([(1, 0)], m9))
    b = howell_form(ModMatrix.from_rows([(3, 0), (0, 1)], m9))
    inter = intersect_spans(a, b)
    assert enumerate_span(inter) == span_brute([[3, 0]], 9)


def test_solve_right(m25, rng):
    for _ in range(200):
        m = ModMatrix(m25, rng.integers(0, 25, size=(3, 3)))
        x = rng.integers(0, 25, size=3)
        rhs = (x @ m.array) % 25
        sol = solve_right(m, rhs)
        assert sol is not None
        assert np.array_equal((sol @ m.array) % 25, rhs)


def test_smith_diagonal_chain():
    assert smith_diagonal([[4, 0, 0], [0, 6, 0], [0, 0, 9]]) == [1, 6, 36]
    assert smith_diagonal([[2, 0], [0, 4]]) == [2, 4]
    assert smith_diagonal([[0, 0], [0, 0]]) == []


mods = st.sampled_from([PrimePowerModulus(2, 2), PrimePowerModulus(3, 2)])


@given(mod=mods, data=st.data())
@settings(max_examples=120, deadline=None)
def test_howell_canonicity_property(mod, data):
    """Any two presentations of the same span have identical Howell forms."""
    q = mod.q
    rows = data.draw(
        st.lists(st.lists(st.integers(0, q - 1), min_size=3, max_size=3),
                 min_size=1, max_size=3)
    )
    m = ModMatrix.from_rows(rows, mod)
    h = howell_form(m)
    # re-present: permute, duplicate, and add row multiples
    arr = [list(r) for r in rows]
    arr.append([(2 * x) % q for x in arr[0]])
    arr = arr[::-1]
    scalar = data.draw(st.integers(0, q - 1))
    arr.append([(scalar * x) % q for x in arr[-1]])
    h2 = howell_form(ModMatrix.from_rows(arr, mod))
    assert h == h2
    assert span_brute(arr, q, dim=3) == span_brute(
        [list(r) for r in h.matrix.array], q, dim=3
    )
