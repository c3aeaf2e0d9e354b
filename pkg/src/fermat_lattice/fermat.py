"""Parameters of the Fermat variety x_0^d + ... + x_{n+1}^d = 0."""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial, gcd, prod


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    f = 3
    while f * f <= k:
        if k % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FermatParams:
    n: int
    d: int

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError("n must be a positive even integer, got %r" % (self.n,))
        if self.d < 2:
            raise ValueError("d must be at least 2, got %r" % (self.d,))

    @property
    def half(self) -> int:
        return self.n // 2

    @property
    def condition_eq1(self) -> bool:
        """d prime, d == 4, or gcd(d, (n+1)!) == 1."""
        return is_prime(self.d) or self.d == 4 or gcd(self.d, factorial(self.n + 1)) == 1

    @property
    def cycle_count(self) -> int:
        """Number of linear cycles: 1*3*...*(n+1) * d^(n/2+1)."""
        return prod(range(1, self.n + 2, 2)) * self.d ** (self.half + 1)

    @property
    def mu(self) -> int:
        """Rank of the affine middle homology, (d-1)^(n+1)."""
        return (self.d - 1) ** (self.n + 1)
