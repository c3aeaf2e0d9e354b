"""Exact arithmetic in Z[zeta_d] on the power basis 1, zeta, ..., zeta^(phi(d)-1)."""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import lru_cache


def euler_phi(d: int) -> int:
    if d < 1:
        raise ValueError("d must be positive")
    result, m, p = d, d, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # ascending coefficients; den monic
    num = list(num)
    dq = len(num) - len(den)
    if dq < 0:
        raise ArithmeticError("divisor has larger degree")
    quot = [0] * (dq + 1)
    for k in range(dq, -1, -1):
        c = num[k + len(den) - 1]
        quot[k] = c
        if c:
            for i, b in enumerate(den):
                num[k + i] -= c * b
    if any(num[: len(den) - 1]):
        raise ArithmeticError("polynomial division is not exact")
    return quot


@lru_cache(maxsize=None)
def _cyclotomic(d: int) -> tuple[int, ...]:
    poly = [-1] + [0] * (d - 1) + [1]  # x^d - 1
    for e in range(1, d):
        if d % e == 0:
            poly = _poly_divexact(poly, list(_cyclotomic(e)))
    return tuple(poly)


def cyclotomic_polynomial(d: int) -> list[int]:
    """Coefficients of Phi_d in ascending order of degree."""
    if d < 1:
        raise ValueError("d must be positive")
    return list(_cyclotomic(d))


def _reduce(coeffs: list[int], d: int) -> tuple[int, ...]:
    phi = _cyclotomic(d)
    deg = len(phi) - 1
    c = list(coeffs)
    for k in range(len(c) - 1, deg - 1, -1):
        lead = c[k]
        if lead:
            base = k - deg
            for i in range(deg):
                c[base + i] -= lead * phi[i]
            c[k] = 0
    c = c[:deg] + [0] * (deg - len(c))
    return tuple(c)


@lru_cache(maxsize=None)
def _zeta_table(d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(_reduce([0] * k + [1], d) for k in range(d))


@dataclass(frozen=True)
class CyclotomicInt:
    """Element of Z[zeta_d]; ``coeffs[i]`` multiplies zeta_d**i."""

    d: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != euler_phi(self.d):
            raise ValueError("expected %d coefficients for d=%d" % (euler_phi(self.d), self.d))

    @classmethod
    def from_poly(cls, coeffs, d: int) -> "CyclotomicInt":
        return cls(d, _reduce(list(coeffs), d))

    @classmethod
    def zero(cls, d: int) -> "CyclotomicInt":
        return cls(d, (0,) * euler_phi(d))

    @classmethod
    def one(cls, d: int) -> "CyclotomicInt":
        return zeta_power(0, d)

    def _check(self, other: "CyclotomicInt") -> None:
        if self.d != other.d:
            raise ValueError("modulus mismatch: %d vs %d" % (self.d, other.d))

    def __add__(self, other: "CyclotomicInt") -> "CyclotomicInt":
        self._check(other)
        return CyclotomicInt(self.d, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CyclotomicInt") -> "CyclotomicInt":
        self._check(other)
        return CyclotomicInt(self.d, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CyclotomicInt":
        return CyclotomicInt(self.d, tuple(-a for a in self.coeffs))

    def __mul__(self, other: "CyclotomicInt") -> "CyclotomicInt":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return CyclotomicInt(self.d, _reduce(out, self.d))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def evaluate(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.d)
        return sum(c * z**i for i, c in enumerate(self.coeffs))


def zeta_power(k: int, d: int) -> CyclotomicInt:
    """Canonical representative of zeta_d**k (k is reduced mod d)."""
    if d < 1:
        raise ValueError("d must be positive")
    return CyclotomicInt(d, _zeta_table(d)[k % d])


def multiply(a: CyclotomicInt, b: CyclotomicInt) -> CyclotomicInt:
    return a * b


def subtract(a: CyclotomicInt, b: CyclotomicInt) -> CyclotomicInt:
    return a - b


def evaluate_polynomial(poly, x: CyclotomicInt) -> CyclotomicInt:
    """Horner evaluation of an integer polynomial (ascending coefficients) at x."""
    acc = CyclotomicInt.zero(x.d)
    one = CyclotomicInt.one(x.d)
    for c in reversed(list(poly)):
        acc = acc * x + CyclotomicInt(x.d, tuple(c * v for v in one.coeffs))
    return acc
