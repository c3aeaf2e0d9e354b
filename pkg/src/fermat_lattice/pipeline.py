"""End-to-end runs: linear-cycle lattice, primitive Hodge lattice, comparison."""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from .cache import CACHE_ENV, MemoryCache, ResultCache
from .fermat import FermatParams
from .hodge_cycles import build_index_sets, hodge_cycle_basis, pham_intersection_matrix
from .intmatrix import IntMatrix
from .invariants import LatticeMeta, LatticeReport, format_divisors, nondegenerate_quotient, table_relation
from .linear_cycles import (
    DEFAULT_MAX_CYCLES,
    ResourceCapExceeded,
    enumerate_linear_cycles,
    full_intersection_matrix,
    primitive_from_full,
)
from .smith import congruent_transform

log = logging.getLogger(__name__)

TARGETS = ("full-linear", "primitive-linear", "primitive-hodge", "verify")
FORMATS = ("json", "csv", "table")

DEFAULT_MAX_MU = 1024
DEFAULT_MEMORY_BUDGET = 1 << 30
# bytes per dense entry: list slot plus a boxed int, with room for working copies
_BYTES_PER_ENTRY = 48
_WORKING_COPIES = 3


@dataclass
class RunConfig:
    n: int
    d: int
    target: str = "verify"
    cache_dir: Path | None = None
    jobs: int = 1
    max_cycles: int = DEFAULT_MAX_CYCLES
    max_mu: int = DEFAULT_MAX_MU
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    fmt: str = "json"

    def __post_init__(self):
        self.params = FermatParams(self.n, self.d)
        if self.target not in TARGETS:
            raise ValueError("target must be one of %s" % ", ".join(TARGETS))
        if self.fmt not in FORMATS:
            raise ValueError("format must be one of %s" % ", ".join(FORMATS))
        for name in ("jobs", "max_cycles", "max_mu", "memory_budget"):
            if getattr(self, name) <= 0:
                raise ValueError("%s must be positive" % name)
        if self.cache_dir is None and os.environ.get(CACHE_ENV):
            self.cache_dir = Path(os.environ[CACHE_ENV])

    def cache(self) -> ResultCache:
        if not hasattr(self, "_cache"):
            self._cache = ResultCache(self.cache_dir) if self.cache_dir else MemoryCache()
        return self._cache


def estimated_bytes(size: int) -> int:
    return _WORKING_COPIES * size * size * _BYTES_PER_ENTRY


def _check_budget(cfg: RunConfig, size: int, what: str) -> None:
    need = estimated_bytes(size)
    if need > cfg.memory_budget:
        raise ResourceCapExceeded(
            "(n,d)=(%d,%d): %s of size %d needs about %.1f GiB, budget is %.1f GiB"
            % (cfg.n, cfg.d, what, size, need / 2**30, cfg.memory_budget / 2**30)
        )


def check_linear_caps(cfg: RunConfig) -> int:
    """Refuse before any allocation if the linear branch is out of reach."""
    N = cfg.params.cycle_count
    if N > cfg.max_cycles:
        raise ResourceCapExceeded(
            "(n,d)=(%d,%d) has N=%d linear cycles, above max_cycles=%d; "
            "the dense Gram matrix of all linear cycles is not feasible here" % (cfg.n, cfg.d, N, cfg.max_cycles)
        )
    _check_budget(cfg, N, "linear-cycle Gram matrix")
    return N


def check_hodge_caps(cfg: RunConfig) -> int:
    mu = cfg.params.mu
    if mu > cfg.max_mu:
        raise ResourceCapExceeded(
            "(n,d)=(%d,%d) has mu=%d vanishing cycles, above max_mu=%d" % (cfg.n, cfg.d, mu, cfg.max_mu)
        )
    _check_budget(cfg, mu, "vanishing-cycle intersection matrix")
    return mu


def _full_matrix(cfg: RunConfig, cache: ResultCache) -> IntMatrix:
    N = check_linear_caps(cfg)

    def build():
        log.info("A1: enumerating %d linear cycles and assembling the full Gram matrix", N)
        cycles = enumerate_linear_cycles(cfg.params, cfg.max_cycles)
        return full_intersection_matrix(cfg.params, cfg.max_cycles, cycles, jobs=cfg.jobs)

    return cache.matrix(cfg.n, cfg.d, "A1-full", build, shape=(N, N))


def _report(cfg: RunConfig, cache: ResultCache, source: str, matrix) -> LatticeReport:
    def build():
        A = matrix()
        log.info("SNF: %s Gram matrix %dx%d", source, A.rows, A.cols)
        return nondegenerate_quotient(A, LatticeMeta(source, cfg.n, cfg.d)).to_dict()

    return LatticeReport.from_dict(cache.record(cfg.n, cfg.d, "report-" + source, build))


def run_linear_branch(cfg: RunConfig, source: str | None = None) -> LatticeReport:
    """Enumerate cycles, build the Gram matrix (full or primitive), reduce it."""
    if source is None:
        source = "full-linear" if cfg.target == "full-linear" else "primitive-linear"
    if source not in ("full-linear", "primitive-linear"):
        raise ValueError("linear branch source must be full-linear or primitive-linear")
    check_linear_caps(cfg)
    cache = cfg.cache()
    if source == "full-linear":
        return _report(cfg, cache, source, lambda: _full_matrix(cfg, cache))

    def primitive():
        N = cfg.params.cycle_count
        return cache.matrix(cfg.n, cfg.d, "A1", lambda: primitive_from_full(_full_matrix(cfg, cache)),
                            shape=(N - 1, N - 1))

    return _report(cfg, cache, source, primitive)


def hodge_matrix(cfg: RunConfig, cache: ResultCache | None = None) -> IntMatrix:
    """The Gram matrix A3 of primitive Hodge cycles in the vanishing-cycle basis."""
    mu = check_hodge_caps(cfg)
    cache = cache or cfg.cache()
    p = cfg.params

    def build_x():
        sets = build_index_sets(p)
        log.info("A2: |I1|=%d, |I2|=%d, mu=%d", len(sets.I1), len(sets.I2), mu)
        A2, X = hodge_cycle_basis(p, sets)
        if A2 is not None:
            cache.store_matrix(cfg.n, cfg.d, "A2", A2)
        log.info("A2: kernel basis has %d rows", X.rows)
        return X

    def build_a3():
        X = cache.matrix(cfg.n, cfg.d, "X", build_x)
        Psi = pham_intersection_matrix(p)
        log.info("A3: congruent transform by %dx%d", X.rows, X.cols)
        return congruent_transform(X, Psi)

    return cache.matrix(cfg.n, cfg.d, "A3", build_a3)


def run_hodge_branch(cfg: RunConfig) -> LatticeReport:
    check_hodge_caps(cfg)
    cache = cfg.cache()
    return _report(cfg, cache, "primitive-hodge", lambda: hodge_matrix(cfg, cache))


@dataclass
class VerificationResult:
    full_report: LatticeReport
    linear_report: LatticeReport
    hodge_report: LatticeReport
    lists_equal: bool
    table_relation_ok: bool
    condition_eq1: bool
    predicted: tuple[int, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "n": self.linear_report.n,
            "d": self.linear_report.d,
            "full-linear": self.full_report.to_dict(),
            "primitive-linear": self.linear_report.to_dict(),
            "primitive-hodge": self.hodge_report.to_dict(),
            "verify": {
                "lists_equal": self.lists_equal,
                "table_relation_ok": self.table_relation_ok,
                "condition_eq1": self.condition_eq1,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def verify(cfg: RunConfig) -> VerificationResult:
    """Compare divisors of the linear and Hodge primitive lattices."""
    check_linear_caps(cfg)
    check_hodge_caps(cfg)
    full = run_linear_branch(cfg, "full-linear")
    linear = run_linear_branch(cfg, "primitive-linear")
    hodge = run_hodge_branch(cfg)
    predicted = table_relation(full.divisors, cfg.d)
    return VerificationResult(
        full_report=full,
        linear_report=linear,
        hodge_report=hodge,
        lists_equal=linear.divisors == hodge.divisors,
        table_relation_ok=predicted == linear.divisors,
        condition_eq1=cfg.params.condition_eq1,
        predicted=predicted,
    )


def run(cfg: RunConfig) -> LatticeReport | VerificationResult:
    if cfg.target == "verify":
        return verify(cfg)
    if cfg.target == "primitive-hodge":
        return run_hodge_branch(cfg)
    return run_linear_branch(cfg)


CSV_HEADER = ("n", "d", "source", "rank", "sign", "divisors")


def csv_rows(result: LatticeReport | VerificationResult) -> list[tuple]:
    reports = (
        [result.full_report, result.linear_report, result.hodge_report]
        if isinstance(result, VerificationResult) else [result]
    )
    return [
        (r.n, r.d, r.source, r.rank, "+" if r.sign > 0 else "-", format_divisors(r.discriminant_factored, sep="*"))
        for r in reports
    ]


def render(result: LatticeReport | VerificationResult, fmt: str) -> str:
    if fmt == "json":
        return result.to_json()
    rows = csv_rows(result)
    if fmt == "csv":
        import csv
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    lines = ["%-7s %-17s %6s  %s" % ("(n,d)", "source", "rank", "discriminant")]
    for n, d, source, rank, sign, divs in rows:
        lines.append("%-7s %-17s %6d  %s%s" % ("(%d,%d)" % (n, d), source, rank, sign, divs.replace("*", " * ")))
    if isinstance(result, VerificationResult):
        lines.append("lists_equal=%s table_relation_ok=%s condition_eq1=%s"
                     % (result.lists_equal, result.table_relation_ok, result.condition_eq1))
    return "\n".join(lines)
