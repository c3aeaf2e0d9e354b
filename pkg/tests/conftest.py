import itertools
import random
from math import gcd

import pytest
from hypothesis import settings

from fermat_lattice.intmatrix import IntMatrix

settings.register_profile("default", deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    line = "[%s] criterion %s: %s" % ("PASS" if ok else "FAIL", criterion, detail)
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# independent oracles: cofactor expansion and gcd of minors


def cofactor_det(rows) -> int:
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * a * cofactor_det(minor)
    return total


def minor_gcds(rows) -> list[int]:
    """gcd of all k x k minors for k = 1..min(shape); zero once the rank is passed."""
    m, n = len(rows), len(rows[0])
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for I in itertools.combinations(range(m), k):
            for J in itertools.combinations(range(n), k):
                g = gcd(g, cofactor_det([[rows[i][j] for j in J] for i in I]))
        out.append(g)
    return out


def oracle_divisors(rows) -> tuple[int, ...]:
    out, prev = [], 1
    for g in minor_gcds(rows):
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return tuple(out)


def random_matrix(rng: random.Random, max_dim: int = 6, bound: int = 9) -> IntMatrix:
    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    # a share of low-rank inputs so the rank-deficient paths get exercised
    if rng.random() < 0.3:
        r = rng.randint(1, min(m, n))
        B = IntMatrix([[rng.randint(-3, 3) for _ in range(r)] for _ in range(m)])
        C = IntMatrix([[rng.randint(-3, 3) for _ in range(n)] for _ in range(r)])
        return B @ C
    return IntMatrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)])


def random_unimodular(rng: random.Random, k: int, steps: int = 12) -> IntMatrix:
    rows = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(steps):
        op = rng.random()
        i, j = rng.sample(range(k), 2) if k > 1 else (0, 0)
        if op < 0.6 and k > 1:
            q = rng.randint(-3, 3)
            rows[i] = [a + q * b for a, b in zip(rows[i], rows[j])]
        elif op < 0.8 and k > 1:
            rows[i], rows[j] = rows[j], rows[i]
        else:
            rows[i] = [-a for a in rows[i]]
    return IntMatrix(rows)


@pytest.fixture
def rng():
    return random.Random(20240611)
