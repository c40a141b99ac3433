"""Empirical checks of the inequalities the lower-bound argument imports.

Each check returns a :class:`CheckReport`; nothing here is a proof.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import phases
from .normest import mc_values, summarize
from .phases import Evaluator, SampleBatch
from .trigpoly import accumulate_pair

Freq = tuple[int, ...]


@dataclass
class CheckReport:
    statistic: float
    samples: int
    stderr: float
    threshold: float | None
    passed: bool
    warnings: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out


def growth_warnings(a: Sequence[Freq]) -> list[str]:
    """Check ``|a_k(j)| > 3^{2(n-1)} |a_{k-1}(j)|`` with n = len(a)."""
    n = len(a)
    factor = 3 ** (2 * (n - 1))
    bad = [
        (k, j)
        for k in range(2, n + 1)
        for j in range(len(a[0]))
        if not abs(a[k - 1][j]) > factor * abs(a[k - 2][j])
    ]
    return [f"growth condition fails at (k, j) in {bad}"] if bad else []


def _cosines(a: Sequence[Freq], batch: SampleBatch) -> list[np.ndarray]:
    return [np.cos(2.0 * math.pi * phases.to_unit(phases.phase(ak, batch))) for ak in a]


def riesz_combination(a: Sequence[Freq], coeffs: Sequence[float]) -> Evaluator:
    """``sum_k c_k psi_k`` where ``psi_1 = 1`` and ``psi_k = prod_{l<k}(1 + cos<x,a_l>)``."""
    if len(coeffs) > len(a) + 1:
        raise ValueError("at most len(a)+1 coefficients (psi_1 .. psi_{n+1})")

    def fn(batch):
        out = np.zeros(batch.size)
        psi = np.ones(batch.size)
        for k, c in enumerate(coeffs):
            out += c * psi
            if k < len(a):
                psi = psi * (1.0 + np.cos(2.0 * math.pi * phases.to_unit(phases.phase(a[k], batch))))
        return out

    return Evaluator(fn, len(a[0]), "riesz_combination")


def latala_check(a: Sequence[Freq], coeffs: Sequence[float], samples: int, seed: int = 0,
                 threshold: float | None = None, threads: int = 1) -> CheckReport:
    """``||sum_k c_k psi_k||_1 / sum_k |c_k|`` (1 by convention when all c_k vanish)."""
    total = math.fsum(abs(c) for c in coeffs)
    warns = growth_warnings(a)
    est = summarize(
        mc_values(riesz_combination(a, coeffs), samples, seed, threads=threads, transform=np.abs),
        seed=seed,
    )
    if total == 0:
        ratio, err = 1.0, 0.0
    else:
        ratio, err = est.mean / total, est.stderr / total
    ok = threshold is None or ratio >= threshold
    return CheckReport(ratio, samples, err, threshold, ok, warns,
                       {"norm": est.mean, "coeff_sum": total})


def riesz_weights(xi: tuple[int, ...]) -> complex:
    """Fourier weights of ``R_n``: ``2^{-#{xi != 0}}`` off the origin."""
    nz = sum(1 for x in xi if x)
    return 0.0 if nz == 0 else 2.0**-nz


def _xi_sum_evaluator(a: Sequence[Freq], weights: Callable, decoupled: bool) -> Evaluator:
    n = len(a)
    d = len(a[0])
    table = {xi: complex(weights(xi)) for xi in itertools.product((-1, 0, 1), repeat=n)}

    def fn(batch):
        if decoupled:
            base = [phases.phase(ak, batch.slice_dims(k * d, (k + 1) * d)) for k, ak in enumerate(a)]
        else:
            base = [phases.phase(ak, batch) for ak in a]
        # phases of sum_k xi_k <a_k, t_k>, built one level at a time
        combos = {(): phases.zero(batch.size)}
        for k in range(n):
            combos = {
                xi + (x,): (phases.add(ph, base[k]) if x == 1 else
                            phases.sub(ph, base[k]) if x == -1 else ph)
                for xi, ph in combos.items()
                for x in (-1, 0, 1)
            }
        re = np.zeros(batch.size)
        im = np.zeros(batch.size)
        for xi, ph in combos.items():
            if xi > tuple(-x for x in xi):
                continue  # handled together with its negative
            cp = table[xi]
            cm = table[tuple(-x for x in xi)] if any(xi) else 0j
            if cp or cm:
                accumulate_pair(re, im, ph, cp, cm)
        return re + 1j * im

    return Evaluator(fn, n * d if decoupled else d, "decoupled" if decoupled else "coupled")


def meyer_transfer_check(a: Sequence[Freq], weights: Callable = riesz_weights, samples: int = 100_000,
                         seed: int = 0, bounds: tuple[float, float] | None = (0.5, 2.0),
                         threads: int = 1) -> CheckReport:
    """Norm on T^d with coupled phases divided by the norm with n independent points."""
    warns = growth_warnings(a)
    coupled = summarize(mc_values(_xi_sum_evaluator(a, weights, False), samples, seed,
                                  threads=threads, transform=np.abs), seed=seed)
    decoupled = summarize(mc_values(_xi_sum_evaluator(a, weights, True), samples, seed,
                                    threads=threads, transform=np.abs), seed=seed)
    ratio = coupled.mean / decoupled.mean
    err = ratio * math.hypot(coupled.stderr / coupled.mean, decoupled.stderr / decoupled.mean)
    ok = bounds is None or (warns == [] and bounds[0] <= ratio <= bounds[1])
    return CheckReport(ratio, samples, err, None if bounds is None else bounds[0], ok, warns,
                       {"coupled": coupled.mean, "decoupled": decoupled.mean,
                        "bounds": list(bounds) if bounds else None})


def exp_riesz_sum(a: Sequence[Freq], coeffs: Sequence[float] | None = None) -> Evaluator:
    """``sum_k c_k e^{i<a_k,x>} psi_k(x)`` (all c_k = 1 by default)."""
    coeffs = [1.0] * len(a) if coeffs is None else list(coeffs)

    def fn(batch):
        out = np.zeros(batch.size, dtype=complex)
        psi = np.ones(batch.size)
        for ak, c in zip(a, coeffs):
            theta = 2.0 * math.pi * phases.to_unit(phases.phase(ak, batch))
            if c:
                out += c * np.exp(1j * theta) * psi
            psi = psi * (1.0 + np.cos(theta))
        return out

    return Evaluator(fn, len(a[0]), "exp_riesz_sum")


def linear_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares ``(slope, intercept, R^2)``; R^2 is 1 for an exact constant fit."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float((resid**2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res < 1e-24 else 0.0)
    return float(slope), float(intercept), r2


def linear_growth_check(sequence_for: Callable[[int], Sequence[Freq]] | Sequence[Freq],
                        n_range: Sequence[int], samples: int, seed: int = 0,
                        coeffs: Callable[[int], Sequence[float]] | None = None,
                        r2_threshold: float = 0.9, threads: int = 1) -> CheckReport:
    """Estimate ``s_n = ||sum_{k<=n} e^{i<a_k,x>} psi_k||_1`` and fit ``s_n`` against n.

    ``sequence_for`` maps n to the sequence used at that n; a plain sequence is
    read through its prefixes.
    """
    if not callable(sequence_for):
        seq = list(sequence_for)
        sequence_for = lambda n: seq[:n]  # noqa: E731
    values, errs, warns = [], [], []
    for n in n_range:
        a = sequence_for(n)
        warns += [f"n={n}: {w}" for w in growth_warnings(a)]
        c = coeffs(n) if coeffs else None
        est = summarize(mc_values(exp_riesz_sum(a, c), samples, seed, threads=threads,
                                  transform=np.abs), seed=seed)
        values.append(est.mean)
        errs.append(est.stderr)
    if len(values) >= 2:
        slope, intercept, r2 = linear_fit(list(n_range), values)
    else:
        slope, intercept, r2 = 0.0, values[0] if values else 0.0, 0.0
    ok = slope > 0 and r2 >= r2_threshold
    return CheckReport(slope, samples, max(errs, default=0.0), r2_threshold, ok, warns,
                       {"n": list(n_range), "s_n": values, "stderr": errs,
                        "intercept": intercept, "r2": r2})
