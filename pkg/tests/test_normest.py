import math

import numpy as np
import pytest

from ornstein.normest import (
    GridBudgetExceeded,
    grid_norm,
    mc_mean,
    mc_norm,
    mc_values,
    norm_bounds_report,
    sample_block,
)
from ornstein.phases import Evaluator
from ornstein.trigpoly import TrigPoly
from ornstein.witness import RieszNegative, WitnessFamily

from .conftest import family

TWO_OVER_PI = 2 / math.pi


def test_constant_has_zero_stderr():
    est = mc_norm(TrigPoly.constant(5, 2), 10_000, seed=1)
    assert est.mean == 5 and est.stderr == 0


def test_cos_norm_is_two_over_pi():
    est = mc_norm(TrigPoly.cos((3**50, -(3**40))), 200_000, seed=2)
    assert abs(est.mean - TWO_OVER_PI) <= 3 * est.stderr


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_psi_norms_are_one(sys2, cert2, k):
    fam = family(sys2, cert2, 4)
    est = mc_norm(fam.psi_evaluator(k), 100_000, seed=3)
    assert abs(est.mean - 1) <= 3 * est.stderr + 1e-12


def test_psi1_is_identically_one(sys2, cert2):
    est = mc_norm(family(sys2, cert2, 3).psi_evaluator(1), 1000, seed=0)
    assert est.mean == 1 and est.stderr == 0


def test_riesz_mean_vanishes(sys2, cert2):
    m = mc_mean(family(sys2, cert2, 4).riesz_evaluator(), 200_000, seed=4)
    assert abs(m.mean) <= 3 * m.stderr


def test_stderr_definition():
    f = TrigPoly.cos((1, 1))
    est = mc_norm(f, 5000, seed=9)
    vals = np.abs(mc_values(f, 5000, 9).real)
    assert est.mean == pytest.approx(vals.mean(), rel=1e-12)
    assert est.stderr == pytest.approx(vals.std(ddof=1) / math.sqrt(5000), rel=1e-9)


def test_determinism_and_thread_independence(sys2, cert2):
    f = family(sys2, cert2, 3).derivative_evaluator(sys2.beta)
    a = mc_norm(f, 30_000, seed=5, threads=1)
    b = mc_norm(f, 30_000, seed=5, threads=3)
    c = mc_norm(f, 30_000, seed=5, threads=1)
    assert a == b == c
    assert mc_norm(f, 30_000, seed=6) != a


def test_sample_depends_only_on_seed_and_index():
    f = Evaluator(lambda b: b.hi[0].astype(float) + b.lo[1].astype(float), 2)
    short = mc_values(f, 100, 7)
    long = mc_values(f, 20_000, 7)
    assert np.array_equal(short, long[:100])


def test_higher_dimensional_draws_extend_lower_ones():
    a = sample_block(3, 0, 2)
    b = sample_block(3, 0, 6)
    assert np.array_equal(a.hi, b.hi[:2]) and np.array_equal(a.lo, b.lo[:2])


def test_samples_validation():
    with pytest.raises(ValueError):
        mc_norm(TrigPoly.constant(1, 1), 1)


def test_grid_cos():
    est = grid_norm(TrigPoly.cos((1, 0)), 64)
    assert abs(est.mean - TWO_OVER_PI) < 1e-3
    assert est.mode == "grid"


def test_grid_zero():
    assert grid_norm(TrigPoly.zero(2), 4).mean == 0


def test_grid_requires_enough_points():
    with pytest.raises(ValueError, match="2\\*degree"):
        grid_norm(TrigPoly.cos((10, 0)), 16)


def test_grid_budget_reports_estimates():
    f = TrigPoly.cos((3, 1)) * TrigPoly.cos((1, 2)) + TrigPoly.sin((5, 5))
    with pytest.raises(GridBudgetExceeded) as info:
        grid_norm(f, 16, budget=16**2, rtol=0)
    assert len(info.value.estimates) == 1


def test_grid_vs_mc_scaled_R2(sys2, cert2):
    fam = family(sys2, cert2, 2, "T2", "scaled", 4)
    R = fam.R()
    g = grid_norm(R, 2 * R.degree() + 2)
    m = mc_norm(fam.riesz_evaluator(), 200_000, seed=8)
    assert abs(g.mean - m.mean) <= max(1e-2, 3 * m.stderr)


def test_triangle_inequality(sys2, cert2):
    fam = family(sys2, cert2, 3)
    f, g = fam.derivative_evaluator(sys2.beta), fam.g_evaluator(sys2.alphas[1])
    both = Evaluator(lambda b: f(b) + g(b), 2)
    ef, eg, efg = (mc_norm(h, 50_000, seed=10) for h in (f, g, both))
    assert efg.mean <= ef.mean + eg.mean + 6 * math.sqrt(ef.stderr**2 + eg.stderr**2 + efg.stderr**2)


def test_riesz_negative_is_fatal():
    with pytest.raises(RieszNegative):
        WitnessFamily._riesz_factor(np.ones(3), np.array([0.0, -1.5, 0.2]))


def test_norm_bounds_t2(sys2, cert2):
    fam = family(sys2, cert2, 4)
    rep = norm_bounds_report(fam, sys2.beta, 100_000, seed=11)
    assert rep.lower >= 0.8 * rep.direct.mean
    assert rep.lower <= rep.direct.mean + 3 * rep.direct.stderr <= rep.upper + 6 * rep.direct.stderr


def test_alpha1_derivative_norm_at_most_two(sys2, cert2):
    fam = family(sys2, cert2, 4)
    est = mc_norm(fam.derivative_evaluator(fam.alpha1), 100_000, seed=12)
    assert est.mean <= 2 + 3 * est.stderr


def test_g_beta_at_n1_is_scaled_cosine(sys2, cert2):
    for variant in ("T1", "T2"):
        fam = family(sys2, cert2, 1, variant)
        ratio = abs(float(fam.ratio(1, sys2.beta)))
        est = mc_norm(fam.g_evaluator(sys2.beta), 200_000, seed=13)
        assert abs(est.mean - ratio * TWO_OVER_PI) <= 3 * est.stderr


def test_g_product_form_matches_expansion(sys2, cert2, odd_system):
    from ornstein.certsearch import certify
    from ornstein.normest import sample_block

    batch = sample_block(1, 0, 2, 500)
    for sys, cert in ((sys2, cert2), (odd_system, certify(odd_system))):
        for variant in ("T1", "T2"):
            fam = family(sys, cert, 3, variant)
            for mu in (sys.beta, *sys.alphas):
                _, G = fam.BG(mu)
                assert np.allclose(fam.g_evaluator(mu)(batch), G(batch), atol=1e-12)
                assert np.allclose(fam.structured_evaluator(G)(batch), G(batch), atol=1e-12)
