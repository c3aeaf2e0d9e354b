"""Dense matrices of arbitrary-precision integers.

Entries are plain Python ints, so nothing ever overflows. Products use a
numpy ``int64`` fast path only when an a-priori bound proves the result
fits; otherwise they fall back to object arrays.
"""
from __future__ import annotations

import json
import struct
from typing import Iterable, Sequence

import numpy as np

_INT64_SAFE = 2**62
_MAGIC = b"FLIM"
_VERSION = 1


class IntMatrix:
    """Immutable-by-convention dense integer matrix stored row by row."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Sequence[int]], cols: int | None = None):
        rows = [[int(x) for x in row] for row in data]
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged rows: expected %d columns, got %d" % (cols, len(row)))
        self.rows = len(rows)
        self.cols = cols
        self.data = rows

    @classmethod
    def _wrap(cls, rows: list[list[int]], cols: int) -> "IntMatrix":
        # trusted constructor: no copy, no validation
        m = cls.__new__(cls)
        m.rows = len(rows)
        m.cols = cols
        m.data = rows
        return m

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries: Sequence[int]) -> "IntMatrix":
        if len(entries) != rows * cols:
            raise ValueError("expected %d entries, got %d" % (rows * cols, len(entries)))
        flat = [int(x) for x in entries]
        return cls._wrap([flat[i * cols:(i + 1) * cols] for i in range(rows)], cols)

    @classmethod
    def identity(cls, k: int) -> "IntMatrix":
        return cls._wrap([[1 if i == j else 0 for j in range(k)] for i in range(k)], k)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls._wrap([[0] * cols for _ in range(rows)], cols)

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        k = len(values)
        return cls._wrap([[int(values[i]) if i == j else 0 for j in range(k)] for i in range(k)], k)

    @classmethod
    def from_numpy(cls, arr: np.ndarray) -> "IntMatrix":
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls._wrap([[int(x) for x in row] for row in arr.tolist()], arr.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> list[int]:
        return [x for row in self.data for x in row]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> list[int]:
        return list(self.data[i])

    def to_rows(self) -> list[list[int]]:
        return [list(row) for row in self.data]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.entries)))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 36:
            return "IntMatrix(%r)" % (self.data,)
        return "IntMatrix(<%dx%d>)" % (self.rows, self.cols)

    def transpose(self) -> "IntMatrix":
        if self.rows == 0:
            return IntMatrix._wrap([[] for _ in range(self.cols)], 0)
        return IntMatrix._wrap([list(col) for col in zip(*self.data)], self.rows)

    T = property(transpose)

    def is_symmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        d = self.data
        return all(d[i][j] == d[j][i] for i in range(self.rows) for j in range(i + 1, self.cols))

    def max_abs(self) -> int:
        return max((abs(x) for row in self.data for x in row), default=0)

    def submatrix(self, rows: Sequence[int] | slice, cols: Sequence[int] | slice | None = None) -> "IntMatrix":
        picked = self.data[rows] if isinstance(rows, slice) else [self.data[i] for i in rows]
        if cols is None:
            return IntMatrix._wrap([list(r) for r in picked], self.cols)
        if isinstance(cols, slice):
            out = [r[cols] for r in picked]
            ncols = len(range(*cols.indices(self.cols)))
        else:
            out = [[r[j] for j in cols] for r in picked]
            ncols = len(cols)
        return IntMatrix._wrap(out, ncols)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hstack")
        return IntMatrix._wrap([a + b for a, b in zip(self.data, other.data)], self.cols + other.cols)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch in vstack")
        return IntMatrix._wrap([list(r) for r in self.data + other.data], self.cols)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix._wrap([[-x for x in row] for row in self.data], self.cols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch: %s vs %s" % (self.shape, other.shape))
        return IntMatrix._wrap(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)], self.cols
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch: %s @ %s" % (self.shape, other.shape))
        if self.rows == 0 or other.cols == 0:
            return IntMatrix._wrap([[0] * other.cols for _ in range(self.rows)], other.cols)
        if self.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols)
        bound = self.max_abs() * other.max_abs() * self.cols
        if bound < _INT64_SAFE:
            prod = np.array(self.data, dtype=np.int64) @ np.array(other.data, dtype=np.int64)
        else:
            prod = np.array(self.data, dtype=object) @ np.array(other.data, dtype=object)
        return IntMatrix._wrap([[int(x) for x in row] for row in prod.tolist()], other.cols)

    def mod(self, p: int) -> list[list[int]]:
        return [[x % p for x in row] for row in self.data]

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"rows": self.rows, "cols": self.cols, "entries": [str(x) for x in self.entries]},
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str | dict) -> "IntMatrix":
        obj = json.loads(text) if isinstance(text, str) else text
        entries = obj["entries"]
        if any(not isinstance(x, str) for x in entries):
            raise ValueError("matrix entries must be decimal strings")
        return cls.from_flat(int(obj["rows"]), int(obj["cols"]), [int(x) for x in entries])

    def to_bytes(self) -> bytes:
        """Binary form: magic, version, rows, cols, then (sign, length, magnitude) per entry."""
        out = [_MAGIC, struct.pack(">BQQ", _VERSION, self.rows, self.cols)]
        for x in self.entries:
            mag = abs(x)
            raw = mag.to_bytes((mag.bit_length() + 7) // 8, "big")
            out.append(struct.pack(">BI", 1 if x < 0 else 0, len(raw)))
            out.append(raw)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "IntMatrix":
        try:
            return cls._from_bytes(blob)
        except struct.error as exc:
            raise ValueError("truncated IntMatrix payload") from exc

    @classmethod
    def _from_bytes(cls, blob: bytes) -> "IntMatrix":
        if blob[:4] != _MAGIC:
            raise ValueError("not a serialized IntMatrix (bad magic)")
        version, rows, cols = struct.unpack_from(">BQQ", blob, 4)
        if version != _VERSION:
            raise ValueError("unsupported IntMatrix format version %d" % version)
        pos = 4 + struct.calcsize(">BQQ")
        entries = []
        for _ in range(rows * cols):
            neg, length = struct.unpack_from(">BI", blob, pos)
            pos += 5
            if pos + length > len(blob):
                raise ValueError("truncated IntMatrix payload")
            mag = int.from_bytes(blob[pos:pos + length], "big")
            pos += length
            entries.append(-mag if neg else mag)
        if pos != len(blob):
            raise ValueError("trailing bytes after IntMatrix payload")
        return cls.from_flat(rows, cols, entries)


def as_intmatrix(a) -> IntMatrix:
    if isinstance(a, IntMatrix):
        return a
    if isinstance(a, np.ndarray):
        return IntMatrix.from_numpy(a)
    return IntMatrix(a)
