import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h1loc.errors import ModulusMismatch, NonSimpleRootError, NonUnitError
from h1loc.residues import PrimePowerModulus, Residue, hensel_lift_root, poly_eval


def test_modulus_validation():
    assert PrimePowerModulus(5, 2).q == 25
    with pytest.raises(ValueError):
        PrimePowerModulus(6, 1)
    with pytest.raises(ValueError):
        PrimePowerModulus(5, 0)


def test_inverse_examples(m25):
    assert Residue(2, m25).inverse().value == 13  # 2 * 13 = 26 = 1 mod 25
    assert Residue(1, m25).inverse().value == 1
    with pytest.raises(NonUnitError):
        Residue(5, m25).inverse()


def test_modulus_mismatch_is_eager(m9, m25):
    with pytest.raises(ModulusMismatch):
        Residue(1, m9) + Residue(1, m25)


def test_canonical_representatives(m9):
    assert Residue(-1, m9).value == 8
    assert (Residue(5, m9) + Residue(7, m9)).value == 3
    assert (Residue(2, m9) - Residue(5, m9)).value == 6


moduli = st.sampled_from(
    [PrimePowerModulus(2, 3), PrimePowerModulus(3, 2), PrimePowerModulus(5, 2)]
)


@given(mod=moduli, data=st.data())
@settings(max_examples=150, deadline=None)
def test_ring_axioms(mod, data):
    q = mod.q
    a = Residue(data.draw(st.integers(0, q - 1)), mod)
    b = Residue(data.draw(st.integers(0, q - 1)), mod)
    c = Residue(data.draw(st.integers(0, q - 1)), mod)
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == Residue(0, mod)
    if a.is_unit():
        assert a * a.inverse() == Residue(1, mod)


@given(mod=moduli, data=st.data())
@settings(max_examples=100, deadline=None)
def test_valuation_multiplicative(mod, data):
    q = mod.q
    a = Residue(data.draw(st.integers(1, q - 1)), mod)
    b = Residue(data.draw(st.integers(1, q - 1)), mod)
    prod = a * b
    if not prod.is_zero():
        assert prod.valuation() == a.valuation() + b.valuation()


def test_hensel_square_roots_of_one(m25):
    assert hensel_lift_root([-1, 0, 1], 1, m25).value == 1
    assert hensel_lift_root([-1, 0, 1], 4, m25).value == 24  # 24^2 = 576 = 1 mod 25


def test_hensel_rejects_non_simple_roots(m25):
    # x^2 has the double root 0 mod 5
    with pytest.raises(NonSimpleRootError):
        hensel_lift_root([0, 0, 1], 0, m25)
    with pytest.raises(NonSimpleRootError):
        hensel_lift_root([-1, 0, 1], 2, m25)  # 2 is not a root of x^2 - 1 mod 5


def test_hensel_random_characteristic_polynomials(rng):
    mod = PrimePowerModulus(7, 3)
    q, p = mod.q, mod.p
    for _ in range(100):
        r1, r2 = rng.choice(range(1, p), size=2, replace=False)
        # a monic quadratic with distinct roots mod p, entries lifted randomly
        lift1 = int(r1) + p * int(rng.integers(0, q // p))
        lift2 = int(r2) + p * int(rng.integers(0, q // p))
        coeffs = [(lift1 * lift2) % q, (-(lift1 + lift2)) % q, 1]
        lam = hensel_lift_root(coeffs, int(r1), mod)
        assert poly_eval(coeffs, lam.value, q) == 0
        assert lam.value % p == r1
        # uniqueness: the lift is the root congruent to r1, namely lift1
        assert lam.value == lift1 % q
