"""Smith normal form over the integers with unimodular transforms.

The reduction works on a private list-of-rows copy. Pivots are chosen as
the nonzero entry of smallest absolute value in the active submatrix
(units first, found at C speed with ``in``). Left transforms are kept as
rows of ``U``; right transforms are kept transposed, one list per column
of ``T``, so that every column operation is a row operation in memory.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import prod

from .intmatrix import IntMatrix, as_intmatrix

log = logging.getLogger(__name__)

# Large odd primes used for modular determinants.
MODULAR_PRIMES = (2305843009213693951, 4611686018427387847, 9223372036854775783, 1000000007)


class UnimodularityError(ValueError):
    """A matrix assumed to have determinant +1 or -1 does not."""


class EntryGrowthExceeded(ArithmeticError):
    """Elimination produced entries beyond the configured bit limit."""


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ T == S`` with ``S = diag(divisors, 0, ..., 0)``."""

    U: IntMatrix | None
    T: IntMatrix | None
    S: IntMatrix
    rank: int
    divisors: tuple[int, ...] = field(default=())

    def check(self, A: IntMatrix) -> bool:
        if self.U is None or self.T is None:
            raise ValueError("decomposition was computed without transforms")
        return self.U @ A @ self.T == self.S


def _axpy_row(dst: list[int], src: list[int], q: int, nz: list[int]) -> None:
    # dst -= q * src, touching only the nonzero positions of src
    for k in nz:
        dst[k] -= q * src[k]


def _nonzero(row: list[int], start: int = 0) -> list[int]:
    return [k for k in range(start, len(row)) if row[k]]


def _find_pivot(M: list[list[int]], t: int) -> tuple[int, int] | None:
    # rows >= t are zero in columns < t, so membership tests see the active block only
    for i in range(t, len(M)):
        row = M[i]
        if 1 in row:
            return i, row.index(1)
        if -1 in row:
            return i, row.index(-1)
    best = None
    best_val = 0
    for i in range(t, len(M)):
        row = M[i]
        for j in range(t, len(row)):
            x = row[j]
            if x:
                ax = -x if x < 0 else x
                if best is None or ax < best_val:
                    best, best_val = (i, j), ax
                    if ax == 2:
                        return best
    return best


def _rounded_quotient(x: int, p: int) -> int:
    # nearest-integer quotient for p > 0; keeps remainders in (-p/2, p/2]
    return (2 * x + p) // (2 * p)


def _max_bits(M, t: int) -> int:
    return max((abs(x).bit_length() for row in M[t:] for x in row[t:]), default=0)


def _diagonalize(M, U, Tt, want_u: bool, want_t: bool, max_bits: int | None = None) -> int:
    nr = len(M)
    nc = len(M[0]) if nr else 0
    t = 0
    while t < min(nr, nc):
        piv = _find_pivot(M, t)
        if piv is None:
            break
        i, j = piv
        if i != t:
            M[t], M[i] = M[i], M[t]
            if want_u:
                U[t], U[i] = U[i], U[t]
        if j != t:
            for row in M[t:]:
                row[t], row[j] = row[j], row[t]
            if want_t:
                Tt[t], Tt[j] = Tt[j], Tt[t]
        while True:
            if M[t][t] < 0:
                M[t] = [-x for x in M[t]]
                if want_u:
                    U[t] = [-x for x in U[t]]
            p = M[t][t]
            pivot_row = M[t]
            nz = _nonzero(pivot_row, t)
            unz = _nonzero(U[t]) if want_u else None
            residual = None
            for i in range(t + 1, nr):
                x = M[i][t]
                if x:
                    q = x // p if p == 1 else _rounded_quotient(x, p)
                    _axpy_row(M[i], pivot_row, q, nz)
                    if want_u:
                        _axpy_row(U[i], U[t], q, unz)
                    r = M[i][t]
                    if r and (residual is None or abs(r) < abs(M[residual][t])):
                        residual = i
            if residual is not None:
                M[t], M[residual] = M[residual], M[t]
                if want_u:
                    U[t], U[residual] = U[residual], U[t]
                continue
            # column t is clear below the pivot, so column ops only touch row t
            tnz = _nonzero(Tt[t]) if want_t else None
            for j in range(t + 1, nc):
                x = pivot_row[j]
                if x:
                    q = x // p if p == 1 else _rounded_quotient(x, p)
                    pivot_row[j] = x - q * p
                    if want_t:
                        _axpy_row(Tt[j], Tt[t], q, tnz)
                    r = pivot_row[j]
                    if r and (residual is None or abs(r) < abs(pivot_row[residual])):
                        residual = j
            if residual is not None:
                for row in M[t:]:
                    row[t], row[residual] = row[residual], row[t]
                if want_t:
                    Tt[t], Tt[residual] = Tt[residual], Tt[t]
                continue
            break
        t += 1
        if t % 50 == 0:
            log.debug("SNF: %d pivots placed", t)
        if max_bits is not None and t % 8 == 0 and _max_bits(M, t) > max_bits:
            raise EntryGrowthExceeded("entries exceed %d bits after %d pivots" % (max_bits, t))
    return t


def _gcd_fix(diag, U, Tt, i: int, j: int, want_u: bool, want_t: bool) -> None:
    """Replace diag(a, b) at positions i, j by diag(gcd, lcm)."""
    a, b = diag[i], diag[j]
    g, s, t = _xgcd(a, b)
    bg, ag = b // g, a // g
    if want_u:
        ui, uj = U[i], U[j]
        U[i] = [s * x + t * y for x, y in zip(ui, uj)]
        U[j] = [ag * y - bg * x for x, y in zip(ui, uj)]
    if want_t:
        ti, tj = Tt[i], Tt[j]
        sa, tb = s * ag, t * bg
        Tt[i] = [x + y for x, y in zip(ti, tj)]
        Tt[j] = [sa * y - tb * x for x, y in zip(ti, tj)]
    diag[i], diag[j] = g, a * bg


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _smith(A, want_u: bool = True, want_t: bool = True, max_bits: int | None = None) -> SmithDecomposition:
    A = as_intmatrix(A)
    if A.rows == 0 or A.cols == 0:
        raise ValueError("smith_decomposition needs at least one row and one column")
    nr, nc = A.rows, A.cols
    M = A.to_rows()
    U = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)] if want_u else None
    Tt = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)] if want_t else None

    m = _diagonalize(M, U, Tt, want_u, want_t, max_bits)
    diag = [M[i][i] for i in range(m)]

    # sort by size to avoid most gcd fixes, then enforce the divisibility chain
    order = sorted(range(m), key=lambda i: diag[i])
    if order != list(range(m)):
        diag = [diag[i] for i in order]
        if want_u:
            U[:m] = [U[i] for i in order]
        if want_t:
            Tt[:m] = [Tt[i] for i in order]
    for i in range(m):
        for j in range(i + 1, m):
            if diag[j] % diag[i]:
                _gcd_fix(diag, U, Tt, i, j, want_u, want_t)

    S = [[0] * nc for _ in range(nr)]
    for i, a in enumerate(diag):
        S[i][i] = a
    Umat = IntMatrix._wrap(U, nr) if want_u else None
    Tmat = IntMatrix._wrap([list(c) for c in zip(*Tt)], nc) if want_t else None
    return SmithDecomposition(Umat, Tmat, IntMatrix._wrap(S, nc), m, tuple(diag))


def smith_decomposition(A) -> SmithDecomposition:
    """Full Smith decomposition ``U @ A @ T == S`` with both transforms."""
    return _smith(A, True, True)


# elimination gives up above this entry size and hands over to the modular route
GROWTH_LIMIT_BITS = 128


def elementary_divisors(A, method: str = "auto") -> tuple[int, ...]:
    """Nonzero invariant factors a_1 | a_2 | ... of A, with multiplicity.

    ``method`` is "elimination", "modular" or "auto". Auto runs
    elimination and switches to the modular route (certified rank, exact
    determinant of a nonsingular minor, local Smith forms at its prime
    factors) if intermediate entries grow past ``GROWTH_LIMIT_BITS``.
    Both routes are exact.
    """
    A = as_intmatrix(A)
    if A.rows == 0 or A.cols == 0:
        return ()
    if method == "elimination":
        return _smith(A, False, False).divisors
    from .modular import modular_elementary_divisors

    if method == "modular":
        return modular_elementary_divisors(A)
    if method != "auto":
        raise ValueError("unknown method %r" % (method,))
    try:
        return _smith(A, False, False, max_bits=GROWTH_LIMIT_BITS).divisors
    except EntryGrowthExceeded:
        log.info("SNF: entry growth on %dx%d matrix, switching to modular divisors", A.rows, A.cols)
        return modular_elementary_divisors(A)


def smith_rank(A) -> int:
    return len(elementary_divisors(A))


def left_kernel_basis(A) -> IntMatrix:
    """Rows spanning ``{c in Z^rows : c @ A == 0}`` over Z.

    These are the last ``rows - rank`` rows of the left transform; since
    ``U`` is unimodular they form a saturated basis.
    """
    A = as_intmatrix(A)
    if A.cols == 0:
        return IntMatrix.identity(A.rows)
    dec = _smith(A, True, False)
    return IntMatrix._wrap(dec.U.data[dec.rank:], A.rows)


def det_mod_p(rows: list[list[int]], p: int) -> int:
    """Determinant of a square matrix modulo a prime, by Gaussian elimination."""
    n = len(rows)
    M = [[x % p for x in row] for row in rows]
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        pc = M[c][c]
        det = det * pc % p
        inv = pow(pc, -1, p)
        rowc = M[c]
        for r in range(c + 1, n):
            f = M[r][c]
            if f:
                f = f * inv % p
                M[r] = [(x - f * y) % p for x, y in zip(M[r], rowc)]
    return det % p


def unimodular_sign(U, p: int = MODULAR_PRIMES[0]) -> int:
    """Exact determinant of a matrix known to be unimodular, via one odd prime."""
    U = as_intmatrix(U)
    if U.rows != U.cols:
        raise ValueError("unimodular_sign needs a square matrix")
    if U.rows == 0:
        return 1
    det = det_mod_p(U.data, p)
    if det == 1:
        return 1
    if det == p - 1:
        return -1
    raise UnimodularityError("determinant is %d mod %d, not +-1" % (det, p))


def congruent_transform(X, Psi) -> IntMatrix:
    """``X @ Psi @ X.T``."""
    X, Psi = as_intmatrix(X), as_intmatrix(Psi)
    if Psi.rows != Psi.cols or X.cols != Psi.rows:
        raise ValueError("dimension mismatch: X is %s, Psi is %s" % (X.shape, Psi.shape))
    if X.rows == 0:
        return IntMatrix._wrap([], 0)
    return X @ Psi @ X.transpose()


def divisor_product(divisors) -> int:
    return prod(divisors)


__all__ = [
    "SmithDecomposition",
    "UnimodularityError",
    "smith_decomposition",
    "elementary_divisors",
    "smith_rank",
    "left_kernel_basis",
    "unimodular_sign",
    "congruent_transform",
    "det_mod_p",
    "divisor_product",
    "EntryGrowthExceeded",
]
