"""L1(T^d) norm estimates (normalized Haar measure): Monte Carlo and uniform grids.

Random points come from Philox, a counter-based generator.  Block ``b`` of
``BLOCK`` samples uses the key ``seed + 2^64 * b``, so sample ``i`` depends
only on ``(seed, i)`` and results do not depend on how blocks are scheduled
across threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .phases import SampleBatch
from .trigpoly import UndefinedDegree

BLOCK = 8192
_M64 = (1 << 64) - 1
DEFAULT_GRID_BUDGET = 1 << 22


@dataclass(frozen=True)
class NormEstimate:
    mean: float
    stderr: float
    samples: int
    mode: str
    seed: int | None = None
    delta: float | None = None  # last refinement change (grid mode)

    def to_json(self) -> dict:
        return asdict(self)


class GridBudgetExceeded(RuntimeError):
    def __init__(self, points: int, budget: int, estimates: tuple[float, ...]):
        super().__init__(
            f"grid of {points} points exceeds budget {budget}; last estimates {estimates}"
        )
        self.estimates = estimates


def sample_block(seed: int, block: int, dim: int, size: int = BLOCK) -> SampleBatch:
    """Uniform torus points for block ``block``; coordinate j only depends on (seed, block, j).

    Coordinates are drawn in order, so the first ``d`` coordinates of a
    higher-dimensional draw coincide with a ``d``-dimensional draw.
    """
    if not 0 <= seed <= _M64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    gen = np.random.Philox(key=seed + (block << 64))
    raw = gen.random_raw(2 * dim * BLOCK).reshape(dim, 2, BLOCK)
    return SampleBatch(
        np.ascontiguousarray(raw[:, 0, :size]), np.ascontiguousarray(raw[:, 1, :size])
    )


def _blocks(samples: int):
    for b in range(-(-samples // BLOCK)):
        yield b, min(BLOCK, samples - b * BLOCK)


def mc_values(f, samples: int, seed: int, dim: int | None = None, threads: int = 1,
              transform=None) -> np.ndarray:
    """``f`` evaluated at the first ``samples`` points of the stream ``seed``."""
    dim = f.dim if dim is None else dim

    def run(job):
        b, size = job
        vals = f(sample_block(seed, b, dim, size))
        return transform(vals) if transform is not None else vals

    jobs = list(_blocks(samples))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    return np.concatenate(parts) if parts else np.zeros(0)


def summarize(values: np.ndarray, mode: str = "MC", seed: int | None = None) -> NormEstimate:
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return NormEstimate(mean, math.sqrt(var / n), n, mode, seed)


def mc_norm(f, samples: int, seed: int = 0, dim: int | None = None, threads: int = 1) -> NormEstimate:
    """Monte Carlo estimate of ``||f||_1`` with standard error."""
    if samples < 2:
        raise ValueError("mc_norm needs at least 2 samples")
    vals = mc_values(f, samples, seed, dim, threads, transform=np.abs)
    return summarize(vals, "MC", seed)


def mc_mean(f, samples: int, seed: int = 0, dim: int | None = None, threads: int = 1) -> NormEstimate:
    """Monte Carlo estimate of the (real part of the) Haar mean of ``f``."""
    if samples < 2:
        raise ValueError("mc_mean needs at least 2 samples")
    vals = mc_values(f, samples, seed, dim, threads, transform=np.real)
    return summarize(vals, "MC", seed)


def grid_batches(points_per_axis: int, dim: int):
    """Uniform grid ``{j / N}^d`` in blocks; N must be a power of two <= 2^64."""
    N = points_per_axis
    shift = 64 - (N.bit_length() - 1)
    total = N**dim
    for start in range(0, total, BLOCK):
        idx = np.arange(start, min(start + BLOCK, total), dtype=np.uint64)
        hi = np.empty((dim, len(idx)), dtype=np.uint64)
        for j in range(dim):
            digit = idx % np.uint64(N)
            idx = idx // np.uint64(N)
            hi[j] = digit << np.uint64(shift) if shift < 64 else np.zeros_like(digit)
        yield SampleBatch(hi, np.zeros_like(hi))


def _grid_average(f, N: int, dim: int) -> float:
    sums = [math.fsum(np.abs(f(batch))) for batch in grid_batches(N, dim)]
    return math.fsum(sums) / N**dim


def grid_norm(f, points_per_axis: int, degree: int | None = None, dim: int | None = None,
              budget: int = DEFAULT_GRID_BUDGET, rtol: float = 1e-3) -> NormEstimate:
    """Riemann average of ``|f|`` on a uniform grid, doubled until it settles.

    ``stderr`` holds the size of the last refinement step.
    """
    dim = f.dim if dim is None else dim
    if degree is None:
        try:
            degree = f.degree()
        except UndefinedDegree:
            degree = 0
    if points_per_axis < 2 * degree + 2:
        raise ValueError(
            f"points_per_axis={points_per_axis} below 2*degree+2={2 * degree + 2}"
        )
    N = 1 << (points_per_axis - 1).bit_length()
    prev = None
    history: list[float] = []
    while True:
        if N**dim > budget:
            raise GridBudgetExceeded(N**dim, budget, tuple(history[-2:]))
        est = _grid_average(f, N, dim)
        history.append(est)
        if prev is not None:
            delta = abs(est - prev)
            if delta <= rtol * max(abs(est), 1e-300) or est == prev:
                return NormEstimate(est, delta, N**dim, "grid", None, delta)
        prev = est
        N *= 2


@dataclass(frozen=True)
class NormBounds:
    direct: NormEstimate
    g_norm: NormEstimate
    b_bound: Fraction

    @property
    def lower(self) -> float:
        return self.g_norm.mean - float(self.b_bound)

    @property
    def upper(self) -> float:
        return self.g_norm.mean + float(self.b_bound)

    def to_json(self) -> dict:
        return {
            "direct": self.direct.to_json(),
            "g_norm": self.g_norm.to_json(),
            "b_bound": float(self.b_bound),
            "lower": self.lower,
            "upper": self.upper,
        }


def norm_bounds_report(family, mu, samples: int, seed: int = 0, threads: int = 1) -> NormBounds:
    """``||D^mu W||`` directly, and ``||G|| -/+ sum|coeff B|`` as lower/upper proxies."""
    direct = mc_norm(family.derivative_evaluator(mu), samples, seed, threads=threads)
    g = mc_norm(family.g_evaluator(mu), samples, seed, threads=threads)
    return NormBounds(direct, g, family.triangle_B(mu)[2])
