import csv
import io
import json
import math

import pytest

from ornstein.pipeline import SamplingConfig, certify_one, csv_header, sweep
from ornstein.trigpoly import ExpansionCapError
from ornstein.witness import WitnessParams

TWO_OVER_PI = 2 / math.pi


def test_certify_one_n1_analytic(sys2, cert2):
    # n=1: D^beta W, D^{alpha_j} W are single cosines with coefficient ratios +-1
    rec = certify_one(WitnessParams(sys2, cert2, 1), SamplingConfig(200_000, 3))
    for est in (rec.norm_beta, *rec.norm_alphas):
        assert abs(est.mean - TWO_OVER_PI) <= 3 * est.stderr
    assert rec.ratio == pytest.approx(0.5, abs=3 * rec.ratio_err)
    assert rec.degree == 9 and rec.log_degree == pytest.approx(math.log(9))


def test_certify_one_reproducible(sys2, cert2):
    p = WitnessParams(sys2, cert2, 3)
    cfg = SamplingConfig(20_000, 4)
    assert certify_one(p, cfg) == certify_one(p, cfg)


def test_certify_one_cap(sys2, cert2, monkeypatch):
    monkeypatch.setenv("ORNSTEIN_CAP", "50")
    with pytest.raises(ExpansionCapError, match="n=4.*cap of 50"):
        certify_one(WitnessParams(sys2, cert2, 4), SamplingConfig(100, 0))


def test_sweep_single_n_has_no_fit(sys2, cert2):
    rep = sweep(WitnessParams(sys2, cert2, 2), [2], SamplingConfig(2000, 1))
    assert len(rep.records) == 1 and not rep.fit_available


def test_sweep_skips_capped_levels(sys2, cert2, monkeypatch):
    monkeypatch.setenv("ORNSTEIN_CAP", "30")
    rep = sweep(WitnessParams(sys2, cert2, 1), [1, 2, 3, 4], SamplingConfig(2000, 1))
    assert [r.n for r in rep.records] == [1, 2, 3]
    assert len(rep.failures) == 1 and "n=4" in rep.failures[0]
    assert rep.fit_available


def test_sweep_csv_and_json(sys2, cert2):
    rep = sweep(WitnessParams(sys2, cert2, 1, "T1"), [1, 2, 3], SamplingConfig(5000, 2))
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == csv_header(2) == [
        "n", "variant", "mode", "degree", "log_degree", "norm_beta", "norm_beta_err",
        "norm_alpha_1", "norm_alpha_2", "err_1", "err_2", "ratio", "ratio_err", "seed"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3"]
    obj = json.loads(rep.dumps())
    assert obj["theoretical_exponent"] == {"num": 1, "den": 4}
    assert obj["certificate"]["gamma"]["gamma"] == [2, 1]
    lo, hi = obj["fitted_exponent"]["ci"]
    assert lo <= obj["fitted_exponent"]["slope"] <= hi


def test_log_degree_grows_like_n_squared(sys2, cert2):
    rep = sweep(WitnessParams(sys2, cert2, 1), range(1, 7), SamplingConfig(200, 0))
    assert rep.log_degree_vs_n2.r2 >= 0.99


def test_record_certifies_lower_bound(sys2, cert2):
    rec = certify_one(WitnessParams(sys2, cert2, 3), SamplingConfig(50_000, 6))
    assert rec.certified_lower_bound == rec.ratio - 3 * rec.ratio_err > 0
