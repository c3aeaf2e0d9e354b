import json
import logging

import pytest

from fermat_lattice import pipeline
from fermat_lattice.cache import CACHE_ENV, ResultCache, cache_key
from fermat_lattice.intmatrix import IntMatrix
from fermat_lattice.linear_cycles import ResourceCapExceeded
from fermat_lattice.pipeline import (
    RunConfig,
    check_linear_caps,
    estimated_bytes,
    render,
    run_hodge_branch,
    run_linear_branch,
    verify,
)


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(3, 3)
    with pytest.raises(ValueError):
        RunConfig(2, 1)
    with pytest.raises(ValueError):
        RunConfig(2, 3, target="nope")
    with pytest.raises(ValueError):
        RunConfig(2, 3, max_cycles=0)
    with pytest.raises(ValueError):
        RunConfig(2, 3, fmt="xml")


def test_cache_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert RunConfig(2, 3).cache_dir == tmp_path


@pytest.mark.parametrize("n, d, source, rank, divisors, sign", [
    (2, 3, "full-linear", 7, (1,) * 7, 1),
    (2, 5, "full-linear", 37, (1,) * 26 + (5,) * 10 + (25,), 1),
    (4, 3, "full-linear", 21, (1,) * 19 + (3, 9), 1),
    (2, 3, "primitive-linear", 6, (1,) * 5 + (3,), 1),
])
def test_linear_branch(n, d, source, rank, divisors, sign):
    rep = run_linear_branch(RunConfig(n, d, target=source))
    assert (rep.rank, rep.divisors, rep.sign, rep.source) == (rank, divisors, sign, source)


def test_hodge_branch_cubic_surface():
    rep = run_hodge_branch(RunConfig(2, 3, target="primitive-hodge"))
    assert rep.divisors == (1,) * 5 + (3,)


def test_hodge_branch_sixfold():
    rep = run_hodge_branch(RunConfig(6, 3, target="primitive-hodge"))
    assert rep.divisors == (1,) * 54 + (3,) * 8 + (9,) * 7 + (27,)
    assert rep.sign == 1


@pytest.mark.parametrize("n, d, eq1", [(2, 3, True), (2, 4, True), (2, 6, False)])
def test_verify_flags(n, d, eq1):
    res = verify(RunConfig(n, d))
    assert res.lists_equal
    assert res.table_relation_ok
    assert res.condition_eq1 is eq1
    obj = json.loads(res.to_json())
    assert obj["verify"] == {"lists_equal": True, "table_relation_ok": True, "condition_eq1": eq1}


def test_refusals_are_clean():
    with pytest.raises(ResourceCapExceeded, match="max_cycles"):
        run_linear_branch(RunConfig(10, 3, target="full-linear"))
    with pytest.raises(ResourceCapExceeded, match="GiB"):
        run_linear_branch(RunConfig(4, 6, target="full-linear"))
    with pytest.raises(ResourceCapExceeded):
        verify(RunConfig(4, 6))
    with pytest.raises(ResourceCapExceeded, match="max_mu"):
        run_hodge_branch(RunConfig(10, 3, target="primitive-hodge"))
    # a raised cap lets (4,6) through the check
    assert check_linear_caps(RunConfig(4, 6, memory_budget=1 << 34)) == 3240


def test_memory_estimate():
    assert estimated_bytes(405) < 1 << 30 < estimated_bytes(3240)


def test_cache_hit_skips_assembly(tmp_path, monkeypatch):
    cfg = RunConfig(4, 3, target="full-linear", cache_dir=tmp_path)
    first = run_linear_branch(cfg)

    def boom(*args, **kwargs):
        raise AssertionError("matrix rebuilt despite cache")

    monkeypatch.setattr(pipeline, "full_intersection_matrix", boom)
    monkeypatch.setattr(pipeline, "nondegenerate_quotient", boom)
    again = run_linear_branch(RunConfig(4, 3, target="full-linear", cache_dir=tmp_path))
    assert again == first
    assert (tmp_path / (cache_key(4, 3, "A1-full") + ".flim")).exists()


def test_corrupt_cache_recomputes(tmp_path, caplog):
    cfg = RunConfig(2, 4, target="full-linear", cache_dir=tmp_path)
    expected = run_linear_branch(cfg)
    for path in tmp_path.iterdir():
        raw = bytearray(path.read_bytes())
        raw[-1] ^= 0x5A
        path.write_bytes(bytes(raw))
    with caplog.at_level(logging.WARNING):
        got = run_linear_branch(RunConfig(2, 4, target="full-linear", cache_dir=tmp_path))
    assert got == expected
    assert "recomputing" in caplog.text


def test_cache_shape_mismatch_recomputes(tmp_path):
    cache = ResultCache(tmp_path)
    cache.store_matrix(2, 3, "A1-full", IntMatrix.identity(3))
    M = cache.matrix(2, 3, "A1-full", lambda: IntMatrix.identity(27), shape=(27, 27))
    assert M.shape == (27, 27)
    assert cache.load_matrix(2, 3, "A1-full").shape == (27, 27)


def test_cache_version_mismatch_is_a_miss(tmp_path):
    old = ResultCache(tmp_path, version="lex-0")
    old.store_matrix(2, 3, "A1-full", IntMatrix.identity(2))
    new = ResultCache(tmp_path)
    assert new.load_matrix(2, 3, "A1-full") is None
    assert old.load_matrix(2, 3, "A1-full") == IntMatrix.identity(2)


def test_hodge_stages_cached(tmp_path):
    cfg = RunConfig(2, 4, target="primitive-hodge", cache_dir=tmp_path)
    run_hodge_branch(cfg)
    for stage in ("A2", "X", "A3"):
        assert (tmp_path / (cache_key(2, 4, stage) + ".flim")).exists()


def test_deterministic_reports(tmp_path):
    a = verify(RunConfig(2, 5)).to_json()
    b = verify(RunConfig(2, 5, cache_dir=tmp_path)).to_json()
    c = verify(RunConfig(2, 5, cache_dir=tmp_path)).to_json()
    assert a == b == c


def test_render_formats():
    res = verify(RunConfig(2, 4))
    csv_text = render(res, "csv")
    assert csv_text.splitlines() == [
        "n,d,source,rank,sign,divisors",
        "2,4,full-linear,20,-,1^18*8^2",
        "2,4,primitive-linear,19,-,1^16*4^1*8^2",
        "2,4,primitive-hodge,19,-,1^16*4^1*8^2",
    ]
    table = render(res, "table")
    assert "-1^18 * 8^2" in table and "lists_equal=True" in table
    assert json.loads(render(res.linear_report, "json"))["rank"] == 19


def test_parallel_jobs_same_report():
    assert run_linear_branch(RunConfig(2, 5, target="full-linear", jobs=2)) == \
        run_linear_branch(RunConfig(2, 5, target="full-linear"))


@pytest.mark.parametrize("n, d", [(2, 6), (4, 3)])
def test_signed_discriminant_matches_gram_determinant(n, d):
    from fermat_lattice.fermat import FermatParams
    from fermat_lattice.linear_cycles import primitive_intersection_matrix
    from fermat_lattice.modular import _to_residues, det_mod_p_np, word_primes
    from fermat_lattice.smith import smith_decomposition

    A = primitive_intersection_matrix(FermatParams(n, d))
    rep = run_linear_branch(RunConfig(n, d, target="primitive-linear"))
    dec = smith_decomposition(A)
    B = IntMatrix._wrap(dec.U.data[:rep.rank], A.rows)
    G = B @ A @ B.T
    for p in word_primes(4):
        assert det_mod_p_np(_to_residues(G, p), p) == rep.discriminant() % p
