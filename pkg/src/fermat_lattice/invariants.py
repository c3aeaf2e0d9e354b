"""Invariants of the nondegenerate quotient V / V^perp of a Gram matrix."""
from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from math import prod

from .fermat import is_prime
from .intmatrix import IntMatrix, as_intmatrix
from .modular import _to_residues, det_mod_p_np, symmetric_invariants, word_primes
from .smith import (
    GROWTH_LIMIT_BITS,
    EntryGrowthExceeded,
    SmithDecomposition,
    _smith,
    unimodular_sign,
)

log = logging.getLogger(__name__)

SOURCES = ("full-linear", "primitive-linear", "primitive-hodge")


class StructuralViolation(ValueError):
    """Input does not have the shape an operation relies on."""


def factor_multiset(divisors) -> list[tuple[int, int]]:
    """[(value, multiplicity), ...] in increasing order of value."""
    return sorted(Counter(divisors).items())


def expand_multiset(pairs) -> tuple[int, ...]:
    return tuple(v for v, k in sorted((int(v), int(k)) for v, k in pairs) for _ in range(k))


def format_divisors(pairs, sign: int | None = None, sep: str = " * ") -> str:
    """Exponent notation, e.g. ``-1^18 * 8^2``."""
    body = sep.join("%d^%d" % (v, k) for v, k in pairs) or "1^0"
    if sign is None:
        return body
    return ("+" if sign > 0 else "-") + body


_TERM = re.compile(r"(\d+)\s*\^\s*\{?(\d+)\}?")


def parse_divisors(text: str) -> tuple[int, tuple[int, ...]]:
    """Inverse of :func:`format_divisors`; accepts ``\\cdot`` and braces too.

    Returns (sign, divisors); a missing sign reads as +1.
    """
    text = text.strip().strip("$")
    sign = -1 if text.startswith("-") else 1
    pairs = [(int(v), int(k)) for v, k in _TERM.findall(text)]
    if not pairs:
        raise ValueError("no a^b terms in %r" % (text,))
    return sign, expand_multiset(pairs)


@dataclass(frozen=True)
class LatticeReport:
    source: str
    n: int
    d: int
    rank: int
    divisors: tuple[int, ...]
    sign: int
    mod_p_ranks: dict[int, int] = field(default_factory=dict, compare=True)

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError("unknown source %r" % (self.source,))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if len(self.divisors) != self.rank:
            raise ValueError("rank %d but %d divisors" % (self.rank, len(self.divisors)))
        for a, b in zip(self.divisors, self.divisors[1:]):
            if a <= 0 or b % a:
                raise ValueError("divisors do not form a divisibility chain")

    @property
    def discriminant_factored(self) -> list[tuple[int, int]]:
        return factor_multiset(self.divisors)

    def discriminant(self) -> int:
        return self.sign * prod(self.divisors)

    def discriminant_decimal(self) -> str:
        return str(self.discriminant())

    def notation(self) -> str:
        return format_divisors(self.discriminant_factored, self.sign)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "source": self.source,
            "rank": self.rank,
            "divisors": [[str(v), k] for v, k in self.discriminant_factored],
            "sign": self.sign,
            "mod_p_ranks": {str(p): r for p, r in sorted(self.mod_p_ranks.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "LatticeReport":
        return cls(
            source=obj["source"],
            n=int(obj["n"]),
            d=int(obj["d"]),
            rank=int(obj["rank"]),
            divisors=expand_multiset(obj["divisors"]),
            sign=int(obj["sign"]),
            mod_p_ranks={int(p): int(r) for p, r in obj.get("mod_p_ranks", {}).items()},
        )

    @classmethod
    def from_json(cls, text: str) -> "LatticeReport":
        return cls.from_dict(json.loads(text))


def rank_mod_p(divisors, p: int) -> int:
    """Rank of the reduction mod p: the number of divisors prime to p."""
    if not is_prime(p):
        raise ValueError("%r is not prime" % (p,))
    return sum(1 for a in divisors if a % p)


def table_relation(full_divisors, d: int) -> tuple[int, ...]:
    """Divisors of the primitive part predicted from those of the whole lattice.

    Two copies of 1 are dropped and ``d`` is added.
    """
    divs = list(full_divisors)
    ones = divs.count(1)
    if ones < 2:
        raise StructuralViolation("1 occurs %d times, at least 2 needed" % ones)
    for _ in range(2):
        divs.remove(1)
    divs.append(d)
    return tuple(sorted(divs))


def interesting_primes(divisors, d: int) -> list[int]:
    """Primes dividing d or some divisor; every other prime gives full rank."""
    out = set()
    for m in set(divisors) | {d}:
        f = 2
        while f * f <= m:
            while m % f == 0:
                out.add(f)
                m //= f
            f += 1
        if m > 1:
            out.add(m)
    return sorted(out)


def _gram_sign(A: IntMatrix, dec: SmithDecomposition) -> int:
    # the first rank rows of U span a complement of the radical
    m = dec.rank
    B = IntMatrix._wrap(dec.U.data[:m], A.rows)
    G = B @ A @ B.transpose()
    target = prod(dec.divisors)
    for p in word_primes(8):
        if target % p == 0:
            continue
        det = det_mod_p_np(_to_residues(G, p), p)
        if det == target % p:
            return 1
        if det == (-target) % p:
            return -1
        raise ArithmeticError("Gram determinant is not +-%d mod %d" % (target, p))
    raise ArithmeticError("no usable prime for the discriminant sign")


def discriminant_sign(A, dec: SmithDecomposition | None = None) -> int:
    """Sign of the discriminant of V / V^perp.

    For nonsingular A this is det(U) * det(T) from the Smith
    decomposition. For singular A that product depends on the choice of
    transforms, so the sign is read from the Gram matrix of the first
    ``rank`` rows of U instead. Without a decomposition the principal
    minor on a maximal independent row set is used.
    """
    A = as_intmatrix(A)
    if dec is None:
        return symmetric_invariants(A)[2]
    if dec.rank == 0:
        return 1
    if dec.U is None:
        raise ValueError("decomposition lacks the left transform")
    if dec.rank == A.rows == A.cols:
        if dec.T is None:
            raise ValueError("decomposition lacks the right transform")
        return unimodular_sign(dec.U) * unimodular_sign(dec.T)
    return _gram_sign(A, dec)


@dataclass(frozen=True)
class LatticeMeta:
    source: str = "full-linear"
    n: int = 0
    d: int = 0


def nondegenerate_quotient(A, meta: LatticeMeta | None = None, method: str = "auto") -> LatticeReport:
    """Rank, divisors, discriminant sign and mod-p ranks of V / V^perp.

    ``method="auto"`` tries Smith elimination with transforms and falls
    back to the modular route when entries grow too large.
    """
    A = as_intmatrix(A)
    meta = meta or LatticeMeta()
    if not A.is_symmetric():
        raise StructuralViolation("Gram matrix must be symmetric")
    if A.rows == 0:
        rank, divisors, sign = 0, (), 1
    elif method == "modular":
        rank, divisors, sign = symmetric_invariants(A)
    elif method in ("auto", "elimination"):
        limit = GROWTH_LIMIT_BITS if method == "auto" else None
        try:
            dec = _smith(A, True, True, max_bits=limit)
        except EntryGrowthExceeded:
            log.info("SNF: entry growth on %dx%d Gram matrix, using modular invariants", A.rows, A.cols)
            rank, divisors, sign = symmetric_invariants(A)
        else:
            rank, divisors = dec.rank, dec.divisors
            sign = discriminant_sign(A, dec)
    else:
        raise ValueError("unknown method %r" % (method,))
    ranks = {p: rank_mod_p(divisors, p) for p in interesting_primes(divisors, meta.d or 1)}
    return LatticeReport(meta.source, meta.n, meta.d, rank, tuple(divisors), sign, ranks)


__all__ = [
    "LatticeReport",
    "LatticeMeta",
    "StructuralViolation",
    "nondegenerate_quotient",
    "discriminant_sign",
    "rank_mod_p",
    "table_relation",
    "factor_multiset",
    "format_divisors",
    "parse_divisors",
]
