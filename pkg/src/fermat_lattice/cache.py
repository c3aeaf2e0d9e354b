"""Content-addressed on-disk cache for matrices and reports.

Entries are keyed by a hash of (n, d, stage, version). Each file holds a
SHA-256 digest of its payload followed by the payload, so truncated or
edited files are detected on load and recomputed.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Callable

from .intmatrix import IntMatrix

log = logging.getLogger(__name__)

# bump when enumeration order or matrix conventions change
CACHE_VERSION = "lex-1"
CACHE_ENV = "FERMAT_LATTICE_CACHE"


class CacheCorrupt(ValueError):
    pass


def cache_key(n: int, d: int, stage: str, version: str = CACHE_VERSION) -> str:
    blob = json.dumps({"n": n, "d": d, "stage": stage, "version": version}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


class ResultCache:
    def __init__(self, root: str | os.PathLike, version: str = CACHE_VERSION):
        self.root = Path(root)
        self.version = version
        self.hits = 0
        self.misses = 0

    def path(self, n: int, d: int, stage: str, kind: str) -> Path:
        return self.root / ("%s.%s" % (cache_key(n, d, stage, self.version), kind))

    def _write(self, path: Path, payload: bytes) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
        with os.fdopen(fd, "wb") as fh:
            fh.write(hashlib.sha256(payload).digest())
            fh.write(payload)
        os.replace(tmp, path)

    def _read(self, path: Path) -> bytes | None:
        if not path.exists():
            return None
        raw = path.read_bytes()
        digest, payload = raw[:32], raw[32:]
        if len(digest) < 32 or hashlib.sha256(payload).digest() != digest:
            raise CacheCorrupt("checksum mismatch in %s" % path.name)
        return payload

    def load_matrix(self, n: int, d: int, stage: str, shape: tuple[int, int] | None = None) -> IntMatrix | None:
        payload = self._read(self.path(n, d, stage, "flim"))
        if payload is None:
            return None
        M = IntMatrix.from_bytes(payload)
        if shape is not None and M.shape != tuple(shape):
            raise CacheCorrupt("%s has shape %s, expected %s" % (stage, M.shape, shape))
        return M

    def store_matrix(self, n: int, d: int, stage: str, M: IntMatrix) -> None:
        self._write(self.path(n, d, stage, "flim"), M.to_bytes())

    def load_json(self, n: int, d: int, stage: str):
        payload = self._read(self.path(n, d, stage, "json"))
        return None if payload is None else json.loads(payload.decode())

    def store_json(self, n: int, d: int, stage: str, obj) -> None:
        self._write(self.path(n, d, stage, "json"), json.dumps(obj, sort_keys=True).encode())

    def matrix(self, n: int, d: int, stage: str, compute: Callable[[], IntMatrix],
               shape: tuple[int, int] | None = None) -> IntMatrix:
        """Load ``stage`` or compute and store it; corrupt entries are recomputed."""
        try:
            M = self.load_matrix(n, d, stage, shape)
        except (CacheCorrupt, ValueError) as exc:
            log.warning("cache: %s for (%d,%d) %s unusable (%s), recomputing", stage, n, d, self.root, exc)
            M = None
        if M is not None:
            self.hits += 1
            return M
        self.misses += 1
        M = compute()
        self.store_matrix(n, d, stage, M)
        return M

    def record(self, n: int, d: int, stage: str, compute: Callable[[], dict]) -> dict:
        try:
            obj = self.load_json(n, d, stage)
        except (CacheCorrupt, ValueError) as exc:
            log.warning("cache: %s for (%d,%d) unusable (%s), recomputing", stage, n, d, exc)
            obj = None
        if obj is not None:
            self.hits += 1
            return obj
        self.misses += 1
        obj = compute()
        self.store_json(n, d, stage, obj)
        return obj


class MemoryCache(ResultCache):
    """Same interface, held in memory for the lifetime of one run."""

    def __init__(self):
        super().__init__(".")
        self._store: dict[str, bytes] = {}

    def _write(self, path: Path, payload: bytes) -> None:
        self._store[path.name] = payload

    def _read(self, path: Path) -> bytes | None:
        return self._store.get(path.name)
