import math
import os
from pathlib import Path

import numpy as np
import pytest

import frontier_rd as fr

DATA = Path(os.environ.get("FRONTIER_RD_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_normalize_and_frontier():
    assert fr.normalize(5000, 400, 0.75) == (0.0, 0.0, 0.0)
    r = fr.normalize(10000, 200, 0.9)
    assert r[0] == pytest.approx(1.0) and r[1] == pytest.approx(-0.5)
    f = fr.frontier_distance(*r, tau=0.05)
    assert min(r) - 0.05 * math.log(3) <= f <= min(r)


def test_tsls_matches_wald_ratio():
    rng = np.random.default_rng(0)
    n = 400
    cluster = np.repeat(np.arange(40), 10)
    z = rng.integers(0, 2, n).astype(float)
    v = rng.normal(size=n)
    d = 0.8 * z + v
    y = 2.0 * d + 0.5 * v + rng.normal(size=n)
    iv = fr.tsls(y, d, z, cluster=cluster)
    rf = fr.ols(y, z, cluster=cluster)
    fs = fr.ols(d, z, cluster=cluster)
    wald = rf["coefficients"][0]["estimate"] / fs["coefficients"][0]["estimate"]
    assert iv["coefficients"][0]["name"] == "d"
    assert iv["coefficients"][0]["estimate"] == pytest.approx(wald, rel=1e-10)
    assert 0 < iv["partial_r2"] < 1
    assert iv["n_clusters"] == 40


def test_fixed_effects_and_errors():
    rng = np.random.default_rng(1)
    g = np.repeat(np.arange(20), 5)
    x = rng.normal(size=100)
    y = 3 * x + g + rng.normal(size=100)
    fit = fr.ols(y, x, cluster=g, fe=g, names=["x"])
    assert fit["n_fe_groups"] == 20
    assert fit["coefficients"][0]["estimate"] == pytest.approx(3, abs=0.3)
    with pytest.raises(fr.FrontierError, match="collinear"):
        fr.ols(y, np.column_stack([x, 2 * x]), cluster=g)


def test_mccrary_and_binned_scatter():
    rng = np.random.default_rng(2)
    x = rng.uniform(-1, 1, 5000)
    res = fr.mccrary(x, 0.0)
    assert 0 <= res["p_value"] <= 1
    assert len(res["bin_heights"]) == len(res["bin_midpoints"])
    bins = fr.binned_scatter(x, 3 * x, n_bins=5, fit_degree=1)
    assert len(bins) == 10
    assert {b["side"] for b in bins} == {"left", "right"}


def test_generate_and_replicate():
    cfg = {"n_settlements": 800, "n_districts": 20, "n_states": 2, "compliance_jump": 0.4,
           "baseline_takeup": 0.05, "seed": 3}
    rows = fr.generate(cfg)
    assert len(rows) == 800
    assert rows == fr.generate(cfg)
    s = fr.replicate(cfg, reps=3)
    assert s == fr.replicate(cfg, reps=3, threads=2)
    with pytest.raises(fr.FrontierError):
        fr.generate({"n_districts": 1})


def test_cli_round_trip(tmp_path):
    code, out, _ = fr.run_cli(["--out-dir", str(tmp_path), "ingest", "--input",
                               str(DATA / "synthetic_panel.csv")])
    assert code == 0 and "retained 8,000" in out
    code, _, _ = fr.run_cli(["--out-dir", str(tmp_path), "estimate", "--dataset",
                             str(tmp_path / "dataset.csv")])
    assert code == 0
    assert (tmp_path / "estimate.json").exists()
    code, _, err = fr.run_cli(["estimate"])
    assert code == 2 and err
