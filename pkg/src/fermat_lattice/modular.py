"""Exact invariants of large integer matrices through modular arithmetic.

Plain elimination over Z can blow up entry sizes on dense matrices of
large rank. The routines here avoid that while staying deterministic:

* the rank over Q is certified by ranks modulo enough word-size primes
  that their product exceeds a Hadamard bound on every (r+1)-minor;
* an exact nonzero r-minor (via CRT) is a multiple of the product of the
  elementary divisors, so it names every prime that can occur;
* at each such prime p the divisors' p-parts come from elimination over
  Z/p^e, whose entries never exceed p^e.
"""
from __future__ import annotations

import logging
import math
import random
from functools import lru_cache

import numpy as np

from .intmatrix import IntMatrix, as_intmatrix

log = logging.getLogger(__name__)

_WORD_PRIME_BITS = 30
_LOCAL_NUMPY_LIMIT = 2**31
_TRIAL_DIVISION_BOUND = 10**5


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24; probabilistic beyond."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def word_primes(count: int) -> tuple[int, ...]:
    """The ``count`` largest primes below 2^30, in decreasing order."""
    out = []
    q = 2**_WORD_PRIME_BITS - 1
    while len(out) < count:
        if is_probable_prime(q):
            out.append(q)
        q -= 2
    return tuple(out)


def _to_residues(A: IntMatrix, p: int) -> np.ndarray:
    bound = A.max_abs()
    if bound < 2**62:
        return np.array(A.data, dtype=np.int64).reshape(A.rows, A.cols) % p
    return np.array([[x % p for x in row] for row in A.data], dtype=np.int64).reshape(A.rows, A.cols)


def rank_profile_mod_p(M: np.ndarray, p: int, symmetric: bool = False):
    """Rank of ``M`` over F_p with pivot rows and columns.

    With ``symmetric`` the pivots are chosen so that pivot rows form a
    maximal independent set; for a symmetric matrix the principal minor on
    those rows is then nonsingular.
    """
    M = M.copy() % p
    k, c = M.shape
    rows = np.arange(k)
    pivot_rows, pivot_cols = [], []
    r = 0
    for j in range(c):
        if r == k:
            break
        col = M[r:, j]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            M[[r, i]] = M[[i, r]]
            rows[[r, i]] = rows[[i, r]]
        inv = pow(int(M[r, j]), -1, p)
        M[r] = M[r] * inv % p
        f = M[r + 1:, j].copy()
        nzf = np.flatnonzero(f)
        if nzf.size:
            idx = r + 1 + nzf
            M[idx, j:] = (M[idx, j:] - np.outer(f[nzf], M[r, j:])) % p
        pivot_rows.append(int(rows[r]))
        pivot_cols.append(j)
        r += 1
    if symmetric:
        # column pivots of a symmetric matrix index an independent row set
        return r, sorted(pivot_cols), sorted(pivot_cols)
    return r, sorted(pivot_rows), pivot_cols


def det_mod_p_np(M: np.ndarray, p: int) -> int:
    M = M.copy() % p
    n = M.shape[0]
    det = 1
    for t in range(n):
        nz = np.flatnonzero(M[t:, t])
        if nz.size == 0:
            return 0
        i = t + nz[0]
        if i != t:
            M[[t, i]] = M[[i, t]]
            det = -det
        piv = int(M[t, t])
        det = det * piv % p
        inv = pow(piv, -1, p)
        f = M[t + 1:, t] * inv % p
        nzf = np.flatnonzero(f)
        if nzf.size:
            idx = t + 1 + nzf
            M[idx, t:] = (M[idx, t:] - np.outer(f[nzf], M[t, t:])) % p
    return det % p


def hadamard_log2(A: IntMatrix, size: int) -> float:
    """log2 of a bound on |minor| for every size x size minor of A."""
    if size <= 0:
        return 0.0
    norms = sorted((math.log2(max(1, sum(x * x for x in row))) / 2 for row in A.data), reverse=True)
    return sum(norms[:size]) + 1.0


def crt_signed(residues: list[int], primes: list[int]) -> int:
    x, m = 0, 1
    for r, p in zip(residues, primes):
        t = (r - x) * pow(m, -1, p) % p
        x += m * t
        m *= p
    return x - m if x > m // 2 else x


def exact_determinant(B: IntMatrix) -> int:
    """Determinant by Chinese remaindering over enough word primes."""
    if B.rows != B.cols:
        raise ValueError("determinant of a non-square matrix")
    if B.rows == 0:
        return 1
    need = hadamard_log2(B, B.rows) + 2
    count = int(need // (_WORD_PRIME_BITS - 1)) + 2
    primes = list(word_primes(count))
    residues = [det_mod_p_np(_to_residues(B, p), p) for p in primes]
    return crt_signed(residues, primes)


def _primes_needed(A: IntMatrix, r: int) -> int:
    return int((hadamard_log2(A, r + 1) + 1) // (_WORD_PRIME_BITS - 1)) + 2


def certified_rank(A: IntMatrix, symmetric: bool = False):
    """(rank, rows, cols) with the rank over Q proven by enough primes.

    Every prime gives a lower bound. Once the product of primes that all
    agree on rank r exceeds the Hadamard bound for (r+1)-minors, those
    minors must vanish over Z.
    """
    A = as_intmatrix(A)
    p0 = word_primes(1)[0]
    r, I, J = rank_profile_mod_p(_to_residues(A, p0), p0, symmetric)
    agreeing = 1
    while r < min(A.rows, A.cols):
        primes = word_primes(_primes_needed(A, r))
        if agreeing >= len(primes):
            break
        p = primes[agreeing]
        rp, Ip, Jp = rank_profile_mod_p(_to_residues(A, p), p, symmetric)
        if rp > r:
            r, I, J = rp, Ip, Jp
            agreeing = 0
        agreeing += 1
    return r, I, J


def _trial_factor(n: int, bound: int = _TRIAL_DIVISION_BOUND) -> tuple[dict[int, int], int]:
    n = abs(n)
    found: dict[int, int] = {}
    q = 2
    while q <= bound and q * q <= n:
        while n % q == 0:
            found[q] = found.get(q, 0) + 1
            n //= q
        q += 1 if q == 2 else 2
    if 1 < n <= bound * bound or (n > 1 and is_probable_prime(n)):
        found[n] = found.get(n, 0) + 1
        n = 1
    return found, n


def local_valuations(A: IntMatrix, p: int, rank: int) -> list[int]:
    """p-adic valuations of the ``rank`` elementary divisors, ascending."""
    e = 2
    while True:
        q = p**e
        vals = _local_snf(A, p, e) if q < _LOCAL_NUMPY_LIMIT else _local_snf_python(A, p, e)
        if len(vals) >= rank:
            return vals[:rank]
        e *= 2


def _local_snf(A: IntMatrix, p: int, e: int) -> list[int]:
    q = p**e
    M = _to_residues(A, q)
    k, c = M.shape
    powers = [p**v for v in range(e + 1)]
    vals = []
    t = 0
    while t < min(k, c):
        sub = M[t:, t:]
        found = None
        for v in range(e):
            mask = sub % powers[v + 1] != 0
            if mask.any():
                found = v
                i, j = np.unravel_index(int(np.argmax(mask)), mask.shape)
                break
        if found is None:
            break
        i, j = t + i, t + j
        if i != t:
            M[[t, i]] = M[[i, t]]
        if j != t:
            M[:, [t, j]] = M[:, [j, t]]
        v = found
        unit = int(M[t, t]) // powers[v]
        M[t] = M[t] * pow(unit, -1, q) % q
        f = M[t + 1:, t] // powers[v]
        nzf = np.flatnonzero(f)
        if nzf.size:
            idx = t + 1 + nzf
            M[idx, t:] = (M[idx, t:] - np.outer(f[nzf], M[t, t:])) % q
        M[t, t + 1:] = 0
        vals.append(v)
        t += 1
    return vals


def _local_snf_python(A: IntMatrix, p: int, e: int) -> list[int]:
    q = p**e
    M = [[x % q for x in row] for row in A.data]
    k, c = A.rows, A.cols

    def val(x):
        v = 0
        while x % p == 0 and v < e:
            x //= p
            v += 1
        return v

    vals = []
    t = 0
    while t < min(k, c):
        best = None
        for i in range(t, k):
            for j in range(t, c):
                x = M[i][j]
                if x:
                    vx = val(x)
                    if best is None or vx < best[0]:
                        best = (vx, i, j)
                        if vx == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        M[t], M[i] = M[i], M[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        pv = p**v
        inv = pow(M[t][t] // pv, -1, q)
        M[t] = [x * inv % q for x in M[t]]
        for i in range(t + 1, k):
            f = M[i][t] // pv
            if f:
                M[i] = [(a - f * b) % q for a, b in zip(M[i], M[t])]
        M[t] = M[t][: t + 1] + [0] * (c - t - 1)
        vals.append(v)
        t += 1
    return vals


def _snf_mod_n(A: IntMatrix, N: int, rank: int) -> list[int]:
    """Invariants gcd(a_i, N) of A for i < rank, by gcd elimination mod N."""
    M = [[x % N for x in row] for row in A.data]
    k, c = A.rows, A.cols
    diag = []
    t = 0
    while t < min(k, c):
        best = None
        for i in range(t, k):
            for j in range(t, c):
                x = M[i][j]
                if x:
                    ax = min(x, N - x)
                    if best is None or ax < best[0]:
                        best = (ax, i, j)
        if best is None:
            break
        _, i, j = best
        M[t], M[i] = M[i], M[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        while True:
            p = M[t][t]
            if p > N // 2:
                M[t] = [(-x) % N for x in M[t]]
                p = M[t][t]
            moved = False
            for i in range(t + 1, k):
                x = M[i][t]
                if x:
                    f = x // p
                    M[i] = [(a - f * b) % N for a, b in zip(M[i], M[t])]
                    if M[i][t]:
                        M[t], M[i] = M[i], M[t]
                        moved = True
                        break
            if moved:
                continue
            for j in range(t + 1, c):
                x = M[t][j]
                if x:
                    f = x // p
                    for row in M[t:]:
                        row[j] = (row[j] - f * row[t]) % N
                    if M[t][j]:
                        for row in M[t:]:
                            row[t], row[j] = row[j], row[t]
                        moved = True
                        break
            if not moved:
                break
        diag.append(math.gcd(M[t][t], N))
        t += 1
    diag += [N] * (rank - len(diag))
    return _chain(diag)[:rank]


def _chain(values: list[int]) -> list[int]:
    vals = list(values)
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            a, b = vals[i], vals[j]
            if b % a:
                g = math.gcd(a, b)
                vals[i], vals[j] = g, a // g * b
    return sorted(vals)


def _random_minor_combination(A: IntMatrix, r: int, rng: random.Random) -> int:
    # det(P A Q) is an integer combination of r-minors (Cauchy-Binet)
    P = IntMatrix._wrap([[rng.choice((-1, 0, 1)) for _ in range(A.rows)] for _ in range(r)], A.rows)
    Q = IntMatrix._wrap([[rng.choice((-1, 0, 1)) for _ in range(r)] for _ in range(A.cols)], r)
    return abs(exact_determinant(P @ A @ Q))


def divisors_from_multiple(A: IntMatrix, r: int, D: int, seed: int = 0, extra: int = 3) -> tuple[int, ...]:
    """Elementary divisors of a rank-r matrix given a nonzero multiple D of their product."""
    D = abs(D)
    factors, rest = _trial_factor(D)
    rng = random.Random(seed)
    while rest > 1 and extra > 0:
        D2 = _random_minor_combination(A, r, rng)
        if D2:
            D = math.gcd(D, D2)
            factors, rest = _trial_factor(D)
        extra -= 1
    if rest > 1:
        # unfactored part: elimination modulo 2D over the whole matrix
        return tuple(_snf_mod_n(A, 2 * D, r))
    divisors = [1] * r
    for p in sorted(factors):
        for i, v in enumerate(local_valuations(A, p, r)):
            divisors[i] *= p**v
    return tuple(divisors)


def modular_elementary_divisors(A, symmetric: bool | None = None) -> tuple[int, ...]:
    A = as_intmatrix(A)
    if symmetric is None:
        symmetric = A.is_symmetric()
    r, I, J = certified_rank(A, symmetric)
    if r == 0:
        return ()
    D = exact_determinant(A.submatrix(I, J))
    log.debug("modular SNF: rank %d, minor has %d bits", r, D.bit_length())
    return divisors_from_multiple(A, r, D)


def symmetric_invariants(A) -> tuple[int, tuple[int, ...], int]:
    """(rank, divisors, sign) of the nondegenerate quotient of a symmetric matrix.

    The form on the quotient is rationally equivalent to the principal
    block on a maximal independent row set, so the sign of that block's
    determinant is the sign of the discriminant; the same determinant is a
    multiple of the product of the divisors.
    """
    A = as_intmatrix(A)
    r, I, _ = certified_rank(A, symmetric=True)
    if r == 0:
        return 0, (), 1
    det = exact_determinant(A.submatrix(I, I))
    if det == 0:
        raise ArithmeticError("principal minor on an independent row set vanished")
    return r, divisors_from_multiple(A, r, det), (1 if det > 0 else -1)


def principal_minor_sign(A) -> int:
    """Sign of the discriminant of the nondegenerate quotient of a symmetric matrix."""
    A = as_intmatrix(A)
    r, I, _ = certified_rank(A, symmetric=True)
    if r == 0:
        return 1
    det = exact_determinant(A.submatrix(I, I))
    if det == 0:
        raise ArithmeticError("principal minor on an independent row set vanished")
    return 1 if det > 0 else -1
