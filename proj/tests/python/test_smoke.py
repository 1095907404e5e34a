import math

import pytest

import stochcl


def test_registry_order_and_size():
    names = [n for n, _ in stochcl.list_experiments()]
    assert len(names) == 15
    assert names[0] == "lemma-3.1-constants"
    assert names[-1] == "determinism"


def test_constants_two_routes_agree():
    for d in range(5):
        a, _ = stochcl.c_d_simpson(d)
        b, _ = stochcl.c_d_laguerre(d)
        assert abs(a - b) <= 1e-8


def test_c_0_against_closed_form():
    # c_0 = int_0^inf (1 + z)^2 e^{z - z^2} dz; midpoint sum on [0, 12] as an independent check.
    n, upper = 200000, 12.0
    h = upper / n
    s = sum((1 + (i + 0.5) * h) ** 2 * math.exp((i + 0.5) * h - ((i + 0.5) * h) ** 2) for i in range(n)) * h
    assert abs(stochcl.c_d_simpson(0)[0] - s) < 1e-7


def test_config_roundtrip_and_errors():
    c = stochcl.Config({"n_x": "64", "eps": "0.1"})
    assert c.get("n_x") == "64"
    again = stochcl.Config.parse(c.canonical())
    assert again.hash() == c.hash()
    with pytest.raises(ValueError):
        c.set("no_such_key", "1")
    with pytest.raises(ValueError):
        stochcl.run("no-such-experiment")


def test_run_constants_record():
    r = stochcl.run("lemma-3.1-constants")
    assert r.passed
    assert r.assertions and all(a.passed for a in r.assertions)
    rows = stochcl.table(r, "constants")
    assert rows and rows[0]["config_hash"] == r.config_hash


def test_solve_diagnostic_runs_and_is_reproducible():
    a = stochcl.diagnose("solve", n_x=64, n_mc=8, T=0.02)
    b = stochcl.diagnose("solve", n_x=64, n_mc=8, T=0.02)
    assert a.config_hash == b.config_hash
    assert stochcl.max_relative_difference(a, b) == 0.0
    snap = next(iter(a.snapshots.values()))
    assert snap.shape == (64,)
    assert all(math.isfinite(v) for v in a.numbers.values())


def test_worker_count_does_not_change_numbers():
    stochcl.set_workers(1)
    a = stochcl.diagnose("solve", n_x=64, n_mc=6, T=0.02)
    stochcl.set_workers(3)
    b = stochcl.diagnose("solve", n_x=64, n_mc=6, T=0.02)
    stochcl.set_workers(0)
    assert stochcl.max_relative_difference(a, b) <= 1e-12


def test_git_blob_id_matches_git():
    assert stochcl.git_blob_id("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"


def test_record_write(tmp_path):
    r = stochcl.run("lemma-3.1-constants")
    r.write(str(tmp_path))
    assert (tmp_path / "summary.txt").exists()
    assert (tmp_path / "assertions.csv").exists()
