"""Fast invariant suite behind ``ornstein selftest``."""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass

from . import phases
from .certsearch import certify
from .indexcore import corollary_system
from .normest import grid_norm, mc_mean, mc_norm
from .witness import WitnessParams, build_family


@dataclass
class CheckResult:
    name: str
    ok: bool
    message: str = ""
    seconds: float = 0.0


def build_fixtures(n: int = 3) -> dict:
    sys = corollary_system()
    cert = certify(sys)
    fam = build_family(WitnessParams(sys, cert, n, "T2"))
    return {"sys": sys, "cert": cert, "family": fam, "W": fam.W(), "R": fam.R()}


def check_alpha1_identity(fx):
    fam = fx["family"]
    assert fx["W"].differentiate(fam.alpha1) == fx["R"], "D^{alpha_1} W_n != R_n"


def check_riesz_expansion(fx):
    assert fx["R"] == fx["family"].R_product(), "R_n coefficients differ from expanded product"
    assert fx["R"].coeff((0,) * fx["sys"].d) == 0, "R_n has a nonzero constant term"


def check_decomposition(fx):
    fam, W = fx["family"], fx["W"]
    for mu in (fx["sys"].beta, *fx["sys"].alphas[1:]):
        B, G = fam.BG(mu)
        assert B + G == W.differentiate(mu), f"B + G != D^mu W for mu={mu.entries}"


def check_realness(fx):
    assert fx["W"].is_real(), "W_n is not conjugate-symmetric"


def check_combinatorics(fx):
    fam = fx["family"]
    for k in range(1, fam.n + 1):
        assert len(fam.A(k)) == 3 ** (k - 1), f"|A_{k}| != 3^{k - 1}"
    sums = {
        tuple(sum(x * ak[j] for x, ak in zip(xi, fam.a)) for j in range(fam.d))
        for xi in itertools.product((-1, 0, 1), repeat=fam.n)
    }
    assert len(sums) == 3**fam.n, "signed combinations of a_k are not distinct"
    assert fam.tau() <= 2, "tau > 2"
    assert not fam.growth_violations(), "growth condition violated"


def check_phase_oracle(fx):
    rng = random.Random(7)
    pts = [[rng.getrandbits(128) for _ in range(2)] for _ in range(64)]
    batch = phases.SampleBatch.from_numerators(pts)
    for q in fx["family"].a:
        got = phases.to_unit(phases.phase(q, batch))
        for i, p in enumerate(pts):
            assert got[i] == phases.unit_phase_exact(q, p), "batch phase != exact phase"


def check_riesz_norms(fx):
    fam = fx["family"]
    for k in range(1, fam.n + 2):
        est = mc_norm(fam.psi_evaluator(k), 20_000, seed=11)
        assert abs(est.mean - 1) <= 4 * est.stderr + 1e-12, f"||psi_{k}||_1 = {est.mean}"
    m = mc_mean(fam.riesz_evaluator(), 20_000, seed=12)
    assert abs(m.mean) <= 4 * m.stderr, f"mean of R_n = {m.mean}"


def check_grid_vs_mc(fx):
    sys, cert = fx["sys"], fx["cert"]
    fam = build_family(WitnessParams(sys, cert, 2, "T2", "scaled", 4))
    R = fam.R()
    g = grid_norm(R, 2 * R.degree() + 2)
    m = mc_norm(fam.riesz_evaluator(), 50_000, seed=13)
    assert abs(g.mean - m.mean) <= max(1e-2, 3 * m.stderr), f"grid {g.mean} vs MC {m.mean}"


CHECKS = {
    "alpha1_identity": check_alpha1_identity,
    "riesz_expansion": check_riesz_expansion,
    "decomposition": check_decomposition,
    "realness": check_realness,
    "combinatorics": check_combinatorics,
    "phase_oracle": check_phase_oracle,
    "riesz_norms": check_riesz_norms,
    "grid_vs_mc": check_grid_vs_mc,
}


def run_selftest(fixtures: dict | None = None) -> list[CheckResult]:
    fx = build_fixtures() if fixtures is None else fixtures
    out = []
    for name, check in CHECKS.items():
        t0 = time.perf_counter()
        try:
            check(fx)
            out.append(CheckResult(name, True, "", time.perf_counter() - t0))
        except AssertionError as exc:
            out.append(CheckResult(name, False, str(exc), time.perf_counter() - t0))
    return out
