"""Linear n/2-planes on the Fermat variety and their intersection matrices.

A cycle is given by a perfect matching ``b`` of the coordinates
0..n+1 and exponents ``a``; pair ``(u, v)`` with exponent ``a_k`` is the
equation ``x_u = zeta_{2d}^(1 + 2 a_k) x_v``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

from .fermat import FermatParams
from .intmatrix import IntMatrix

DEFAULT_MAX_CYCLES = 20000


class ResourceCapExceeded(RuntimeError):
    """A requested computation exceeds the configured size limits."""


@dataclass(frozen=True, order=True)
class LinearCycleSpec:
    pairs: tuple[tuple[int, int], ...]
    exponents: tuple[int, ...]

    def equations(self, d: int) -> Iterator[tuple[int, int, int]]:
        """Yield ``(u, v, e)`` meaning x_u = zeta_{2d}^e x_v."""
        for (u, v), a in zip(self.pairs, self.exponents):
            yield u, v, (1 + 2 * a) % (2 * d)

    def validate(self, p: FermatParams) -> None:
        seen = [x for pair in self.pairs for x in pair]
        if sorted(seen) != list(range(p.n + 2)):
            raise ValueError("pairing is not a perfect matching of 0..n+1")
        used = set()
        for u, v in self.pairs:
            if u != min(set(range(p.n + 2)) - used):
                raise ValueError("first entry of each pair must be the smallest unused index")
            used.update((u, v))
        if len(self.exponents) != p.half + 1 or not all(0 <= a < p.d for a in self.exponents):
            raise ValueError("exponents must be n/2+1 integers in [0, d-1]")

    def to_json(self) -> dict:
        return {"b": [list(pair) for pair in self.pairs], "a": list(self.exponents)}

    @classmethod
    def from_json(cls, obj: dict) -> "LinearCycleSpec":
        return cls(tuple(tuple(int(x) for x in pair) for pair in obj["b"]), tuple(int(x) for x in obj["a"]))


def perfect_matchings(points: Sequence[int]) -> Iterator[tuple[tuple[int, int], ...]]:
    """Matchings with each pair led by the smallest unmatched point, in lexicographic order."""
    if not points:
        yield ()
        return
    first, rest = points[0], points[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for tail in perfect_matchings(remaining):
            yield ((first, partner),) + tail


def check_cycle_cap(p: FermatParams, max_cycles: int = DEFAULT_MAX_CYCLES) -> int:
    N = p.cycle_count
    if N > max_cycles:
        raise ResourceCapExceeded(
            "(n,d)=(%d,%d) has N=%d linear cycles, above the cap of %d" % (p.n, p.d, N, max_cycles)
        )
    return N


def enumerate_linear_cycles(p: FermatParams, max_cycles: int = DEFAULT_MAX_CYCLES) -> list[LinearCycleSpec]:
    check_cycle_cap(p, max_cycles)
    out = []
    for pairs in perfect_matchings(tuple(range(p.n + 2))):
        for a in itertools.product(range(p.d), repeat=p.half + 1):
            out.append(LinearCycleSpec(pairs, a))
    return out


class WeightedUnionFind:
    """Disjoint sets over Z/modulus with potentials.

    ``pot[u]`` is the exponent e with x_u = zeta^e x_root. An equation
    that closes a cycle with nonzero net weight forces its component to
    zero; such components are marked dead.
    """

    def __init__(self, size: int, modulus: int):
        self.parent = list(range(size))
        self.pot = [0] * size
        self.dead = [False] * size
        self.modulus = modulus

    def find(self, u: int) -> int:
        parent, pot = self.parent, self.pot
        path = []
        while parent[u] != u:
            path.append(u)
            u = parent[u]
        # compress, accumulating potentials from the top down
        acc = 0
        for w in reversed(path):
            acc = (acc + pot[w]) % self.modulus
            pot[w] = acc
            parent[w] = u
        return u

    def union(self, u: int, v: int, e: int) -> bool:
        """Impose x_u = zeta^e x_v. Returns False if this kills a component."""
        ru, rv = self.find(u), self.find(v)
        pu, pv = self.pot[u] if u != ru else 0, self.pot[v] if v != rv else 0
        if ru == rv:
            if (pu - pv - e) % self.modulus:
                self.dead[ru] = True
                return False
            return True
        # x_ru = zeta^(e + pv - pu) x_rv
        self.parent[ru] = rv
        self.pot[ru] = (e + pv - pu) % self.modulus
        self.dead[rv] = self.dead[rv] or self.dead[ru]
        return not self.dead[rv]

    def live_components(self) -> int:
        return sum(1 for u in range(len(self.parent)) if self.find(u) == u and not self.dead[u])


def intersection_dimension(P: LinearCycleSpec, Q: LinearCycleSpec, p: FermatParams) -> int:
    """Projective dimension of P cap Q; -1 for the empty intersection."""
    uf = WeightedUnionFind(p.n + 2, 2 * p.d)
    for spec in (P, Q):
        for u, v, e in spec.equations(p.d):
            uf.union(u, v, e)
    return uf.live_components() - 1


def intersection_number(m: int, p: FermatParams) -> int:
    """(1 - (1 - d)^(m + 1)) / d for planes meeting in dimension m."""
    if not -1 <= m <= p.half:
        raise ValueError("m=%d outside [-1, n/2]" % m)
    num = 1 - (1 - p.d) ** (m + 1)
    q, r = divmod(num, p.d)
    assert r == 0
    return q


def _upper_rows(p: FermatParams, cycles: list[LinearCycleSpec], start: int, stop: int) -> list[list[int]]:
    # entries (i, j) for start <= i < stop and j > i
    values = [intersection_number(m, p) for m in range(-1, p.half + 1)]
    out = []
    for i in range(start, stop):
        Pi = cycles[i]
        out.append([values[intersection_dimension(Pi, cycles[j], p) + 1] for j in range(i + 1, len(cycles))])
    return out


def full_intersection_matrix(p: FermatParams, max_cycles: int = DEFAULT_MAX_CYCLES,
                             cycles: list[LinearCycleSpec] | None = None, jobs: int = 1) -> IntMatrix:
    """Gram matrix of all linear cycles; ``jobs > 1`` assembles rows in worker processes."""
    if cycles is None:
        cycles = enumerate_linear_cycles(p, max_cycles)
    N = len(cycles)
    if jobs > 1 and N > 64:
        from concurrent.futures import ProcessPoolExecutor

        # rows shrink with i, so cut chunks with roughly equal pair counts
        bounds, acc, target = [0], 0, N * (N - 1) // (2 * 4 * jobs) + 1
        for i in range(N):
            acc += N - 1 - i
            if acc >= target:
                bounds.append(i + 1)
                acc = 0
        if bounds[-1] != N:
            bounds.append(N)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(_upper_rows, [p] * (len(bounds) - 1), [cycles] * (len(bounds) - 1),
                             bounds[:-1], bounds[1:])
            upper = [row for part in parts for row in part]
    else:
        upper = _upper_rows(p, cycles, 0, N)
    self_int = intersection_number(p.half, p)
    rows = [[0] * N for _ in range(N)]
    for i in range(N):
        rows[i][i] = self_int
        for k, v in enumerate(upper[i]):
            rows[i][i + 1 + k] = v
            rows[i + 1 + k][i] = v
    return IntMatrix._wrap(rows, N)


def primitive_from_full(F: IntMatrix) -> IntMatrix:
    """Gram matrix of P_i - P_1 (i >= 2) from the Gram matrix of the P_i."""
    f = F.data
    f00 = f[0][0]
    col0 = [f[i][0] for i in range(F.rows)]
    rows = [[f[i][j] - col0[i] - col0[j] + f00 for j in range(1, F.cols)] for i in range(1, F.rows)]
    return IntMatrix._wrap(rows, F.cols - 1)


def primitive_intersection_matrix(p: FermatParams, max_cycles: int = DEFAULT_MAX_CYCLES) -> IntMatrix:
    return primitive_from_full(full_intersection_matrix(p, max_cycles))


def cycles_to_json(cycles: Sequence[LinearCycleSpec]) -> str:
    return json.dumps([c.to_json() for c in cycles])
