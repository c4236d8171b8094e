"""Exact scalar arithmetic in Z/p^nZ and Hensel lifting of simple roots."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ModulusMismatch, NonSimpleRootError, NonUnitError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimePowerModulus:
    """The ring Z/p^nZ, carried alongside every value built over it."""

    p: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"exponent must be >= 1, got {self.n}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def q(self) -> int:
        return self.p**self.n

    def residue(self, value: int) -> "Residue":
        return Residue(value % self.q, self)

    def unit_count(self) -> int:
        return self.p ** (self.n - 1) * (self.p - 1)

    def reduce(self, j: int) -> "PrimePowerModulus":
        if not 1 <= j <= self.n:
            raise ValueError(f"cannot reduce exponent {self.n} to {j}")
        return PrimePowerModulus(self.p, j)

    def __repr__(self):
        return f"Z/{self.p}^{self.n}"


def _check_same(a: "Residue", b: "Residue"):
    if a.modulus != b.modulus:
        raise ModulusMismatch(f"{a.modulus} vs {b.modulus}")


@dataclass(frozen=True)
class Residue:
    """Canonical representative of a class in Z/p^nZ."""

    value: int
    modulus: PrimePowerModulus

    def __post_init__(self):
        if not 0 <= self.value < self.modulus.q:
            object.__setattr__(self, "value", self.value % self.modulus.q)

    @property
    def q(self) -> int:
        return self.modulus.q

    def is_unit(self) -> bool:
        return self.value % self.modulus.p != 0

    def is_zero(self) -> bool:
        return self.value == 0

    def valuation(self) -> int:
        """p-adic valuation, capped at n for the zero class."""
        if self.value == 0:
            return self.modulus.n
        v, x, p = 0, self.value, self.modulus.p
        while x % p == 0:
            x //= p
            v += 1
        return v

    def __add__(self, other: "Residue") -> "Residue":
        _check_same(self, other)
        return Residue((self.value + other.value) % self.q, self.modulus)

    def __sub__(self, other: "Residue") -> "Residue":
        _check_same(self, other)
        return Residue((self.value - other.value) % self.q, self.modulus)

    def __mul__(self, other: "Residue") -> "Residue":
        _check_same(self, other)
        return Residue((self.value * other.value) % self.q, self.modulus)

    def __neg__(self) -> "Residue":
        return Residue(-self.value % self.q, self.modulus)

    def inverse(self) -> "Residue":
        if not self.is_unit():
            raise NonUnitError(f"{self.value} is not a unit mod {self.q}")
        return Residue(pow(self.value, -1, self.q), self.modulus)

    def __pow__(self, k: int) -> "Residue":
        if k < 0:
            return self.inverse() ** (-k)
        return Residue(pow(self.value, k, self.q), self.modulus)

    def reduce(self, j: int) -> "Residue":
        return Residue(self.value % self.modulus.p**j, self.modulus.reduce(j))

    def __repr__(self):
        return f"{self.value} (mod {self.q})"


def poly_eval(coeffs: Sequence[int], x: int, q: int) -> int:
    """Evaluate a dense polynomial (lowest degree first) mod q."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def poly_derivative(coeffs: Sequence[int]) -> list[int]:
    return [i * c for i, c in enumerate(coeffs)][1:]


def hensel_lift_root(
    coeffs: Sequence[int], root_mod_p: int | Residue, modulus: PrimePowerModulus
) -> Residue:
    """Lift a simple root of a polynomial from mod p to mod p^n.

    ``coeffs`` are densely listed, lowest degree first, read over
    ``modulus`` = Z/p^nZ.  The given root must satisfy P(r) = 0 and
    P'(r) != 0 mod p; the lift is then the unique root of P mod p^n
    congruent to r mod p, obtained by refining one p-digit per step.
    """
    target = modulus
    p, n = target.p, target.n
    r = (root_mod_p.value if isinstance(root_mod_p, Residue) else root_mod_p) % p
    coeffs = [c % target.q for c in coeffs]
    deriv = poly_derivative(coeffs)
    if poly_eval(coeffs, r, p) % p != 0:
        raise NonSimpleRootError(f"{r} is not a root mod {p}")
    dval = poly_eval(deriv, r, p) % p
    if dval == 0:
        raise NonSimpleRootError(f"derivative vanishes at {r} mod {p}: root is not simple")
    lam = r
    for j in range(2, n + 1):
        pj = p**j
        f = poly_eval(coeffs, lam, pj)
        d = poly_eval(deriv, lam, p)
        lam = (lam - f * pow(d, -1, pj)) % pj
    result = Residue(lam % target.q, target)
    assert poly_eval(coeffs, result.value, target.q) == 0
    return result
