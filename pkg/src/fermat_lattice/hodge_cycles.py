"""Vanishing-cycle side: index sets, period matrix Q, A2, Pham form, A3."""
from __future__ import annotations

import itertools
import json
from math import gcd
from dataclasses import dataclass, field

from .cyclotomic import CyclotomicInt, euler_phi, zeta_power
from .fermat import FermatParams
from .intmatrix import IntMatrix
from .smith import congruent_transform, left_kernel_basis

Beta = tuple[int, ...]


def beta_indices(p: FermatParams) -> list[Beta]:
    """All of {0..d-2}^(n+1) in lexicographic order."""
    return list(itertools.product(range(p.d - 1), repeat=p.n + 1))


def has_balanced_involution(values: tuple[int, ...], total: int) -> bool:
    """Is there a fixed-point-free involution pairing entries that sum to ``total``?

    Plain backtracking over perfect matchings of the positions.
    """
    if len(values) % 2:
        return False

    def search(rest: tuple[int, ...]) -> bool:
        if not rest:
            return True
        head, tail = rest[0], rest[1:]
        tried = set()
        for k, v in enumerate(tail):
            if head + v == total and v not in tried:
                tried.add(v)
                if search(tail[:k] + tail[k + 1:]):
                    return True
        return False

    return search(tuple(values))


def in_I1(beta: Beta, p: FermatParams) -> bool:
    s = sum(b + 1 for b in beta)
    return s % p.d != 0 and s < p.d * p.half


def is_hodge_character(alpha: tuple[int, ...], d: int, weight: int) -> bool:
    """Every conjugate t * alpha (t prime to d) has residues summing to d * weight."""
    return all(
        sum(t * a % d for a in alpha) == d * weight
        for t in range(1, d) if gcd(t, d) == 1
    )


def i2_beta0(beta: Beta, p: FermatParams, galois_closed: bool = True) -> int | None:
    """Return beta_0 if beta is in I2, else None.

    With ``galois_closed`` the sum condition is imposed on all conjugates
    of the character (beta_0 + 1, ..., beta_{n+1} + 1), which keeps only
    genuine Hodge characters. Without it the sum is checked for beta
    alone; the extra indices this admits are conjugates of I1 indices, so
    the integral kernel of A2 is the same either way.
    """
    beta0 = p.d * (p.half + 1) - sum(b + 1 for b in beta) - 1
    if not 0 <= beta0 <= p.d - 2:
        return None
    full = (beta0,) + tuple(beta)
    if galois_closed and not is_hodge_character(tuple(b + 1 for b in full), p.d, p.half + 1):
        return None
    if has_balanced_involution(full, p.d - 2):
        return None
    return beta0


@dataclass
class HodgeIndexSets:
    I: list[Beta]
    I1: list[Beta]
    I2: list[Beta]
    beta0: dict[Beta, int] = field(default_factory=dict)

    @property
    def columns(self) -> list[Beta]:
        return sorted(self.I1 + self.I2)

    @property
    def mu_check(self) -> int:
        return len(self.I1) + len(self.I2)

    def to_json(self) -> str:
        return json.dumps({
            "I1": [list(b) for b in self.I1],
            "I2": [{"beta": list(b), "beta0": self.beta0[b]} for b in self.I2],
            "mu": len(self.I),
            "mu_check": self.mu_check,
        })


def build_index_sets(p: FermatParams, galois_closed: bool = True) -> HodgeIndexSets:
    I = beta_indices(p)
    I1 = [b for b in I if in_I1(b, p)]
    I2, beta0 = [], {}
    for b in I:
        b0 = i2_beta0(b, p, galois_closed)
        if b0 is not None:
            I2.append(b)
            beta0[b] = b0
    return HodgeIndexSets(I, I1, I2, beta0)


def q_matrix(p: FermatParams, sets: HodgeIndexSets | None = None) -> list[list[CyclotomicInt]]:
    """Rows indexed by I, columns by I1 + I2, both lexicographic.

    An empty column set gives a list of empty rows; the caller treats that
    as the degenerate case where every primitive class qualifies.
    """
    if sets is None:
        sets = build_index_sets(p)
    d = p.d
    factor = [[zeta_power((b + 1) * (c + 1), d) - zeta_power(b * (c + 1), d) for c in range(d - 1)]
              for b in range(d - 1)]
    one = zeta_power(0, d)
    cols = sets.columns
    out = []
    for beta in sets.I:
        row = []
        for gamma in cols:
            acc = one
            for b, c in zip(beta, gamma):
                acc = acc * factor[b][c]
            row.append(acc)
        out.append(row)
    return out


def a2_concatenation(Q: list[list[CyclotomicInt]], d: int | None = None) -> IntMatrix:
    """[Q_0 | Q_1 | ... | Q_{phi-1}] where Q = sum_i Q_i zeta^i."""
    if not Q:
        raise ValueError("Q has no rows")
    ncols = len(Q[0])
    if d is None:
        if ncols == 0:
            raise ValueError("modulus needed for a Q without columns")
        d = Q[0][0].d
    phi = euler_phi(d)
    rows = []
    for qrow in Q:
        if any(z.d != d for z in qrow):
            raise ValueError("mixed moduli in Q")
        rows.append([z.coeffs[i] for i in range(phi) for z in qrow])
    return IntMatrix._wrap(rows, ncols * phi)


def pham_entry(beta: Beta, gamma: Beta, n: int) -> int:
    if beta == gamma:
        return (-1) ** (n * (n - 1) // 2) * (1 + (-1) ** n)
    diffs = [g - b for b, g in zip(beta, gamma)]
    if all(0 <= x <= 1 for x in diffs):
        return (-1) ** (n * (n + 1) // 2) * (-1) ** sum(diffs)
    if all(-1 <= x <= 0 for x in diffs):
        # swapped roles: <b, g> = (-1)^n <g, b>
        return (-1) ** n * (-1) ** (n * (n + 1) // 2) * (-1) ** sum(diffs)
    return 0


def pham_intersection_matrix(p: FermatParams, I: list[Beta] | None = None) -> IntMatrix:
    if I is None:
        I = beta_indices(p)
    n = p.n
    return IntMatrix._wrap([[pham_entry(b, g, n) for g in I] for b in I], len(I))


@dataclass
class HodgeData:
    sets: HodgeIndexSets
    A2: IntMatrix | None
    X: IntMatrix
    Psi: IntMatrix
    A3: IntMatrix

    @property
    def degenerate(self) -> bool:
        return self.A2 is None


def hodge_cycle_basis(p: FermatParams, sets: HodgeIndexSets | None = None) -> tuple[IntMatrix | None, IntMatrix]:
    """Return (A2, X); A2 is None when I1 and I2 are both empty."""
    if sets is None:
        sets = build_index_sets(p)
    if not sets.I1 and not sets.I2:
        return None, IntMatrix.identity(len(sets.I))
    A2 = a2_concatenation(q_matrix(p, sets), p.d)
    return A2, left_kernel_basis(A2)


def primitive_hodge_matrix(p: FermatParams) -> HodgeData:
    sets = build_index_sets(p)
    A2, X = hodge_cycle_basis(p, sets)
    Psi = pham_intersection_matrix(p, sets.I)
    return HodgeData(sets, A2, X, Psi, congruent_transform(X, Psi))
