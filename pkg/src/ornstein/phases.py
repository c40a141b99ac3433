"""Exact torus phases ``<q, u> mod 1`` for big-integer frequencies.

A torus coordinate is ``u = num / 2**128``; a batch of sample points stores
each numerator as two uint64 words ``(hi, lo)``.  Phases are 128-bit residues
``sum_j q_j * num_j mod 2**128`` carried in the same two-word form, so sums and
negations of phases stay exact.  Only the final conversion to a double in
``[0, 1)`` rounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

P_BITS = 128
MOD = 1 << P_BITS
_M64 = (1 << 64) - 1
_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_ONE = np.uint64(1)


@dataclass
class SampleBatch:
    """``hi``/``lo`` have shape ``(d, size)``; ``u_j = (hi*2^64 + lo) / 2^128``."""

    hi: np.ndarray
    lo: np.ndarray

    def __post_init__(self):
        # precomputed 32-bit halves of the low words for the 64x64 -> 128 products
        self._lo_lo = self.lo & _M32
        self._lo_hi = self.lo >> _S32

    @property
    def dim(self) -> int:
        return self.hi.shape[0]

    @property
    def size(self) -> int:
        return self.hi.shape[1]

    def slice_dims(self, start: int, stop: int) -> "SampleBatch":
        return SampleBatch(self.hi[start:stop], self.lo[start:stop])

    def numerators(self, i: int) -> tuple[int, ...]:
        """Exact numerators of sample ``i`` as Python ints."""
        return tuple(
            (int(self.hi[j, i]) << 64) | int(self.lo[j, i]) for j in range(self.dim)
        )

    @classmethod
    def from_numerators(cls, points: Sequence[Sequence[int]]) -> "SampleBatch":
        pts = [[int(x) % MOD for x in p] for p in points]
        d = len(pts[0]) if pts else 0
        hi = np.array([[p[j] >> 64 for p in pts] for j in range(d)], dtype=np.uint64)
        lo = np.array([[p[j] & _M64 for p in pts] for j in range(d)], dtype=np.uint64)
        return cls(hi.reshape(d, len(pts)), lo.reshape(d, len(pts)))


def _mulhi(c: int, x_lo: np.ndarray, x_hi: np.ndarray) -> np.ndarray:
    """High 64 bits of ``c * x`` for a scalar ``c < 2^64``; x is given by 32-bit halves."""
    c0 = np.uint64(c & 0xFFFFFFFF)
    c1 = np.uint64(c >> 32)
    p00 = c0 * x_lo
    p01 = c0 * x_hi
    p10 = c1 * x_lo
    p11 = c1 * x_hi
    mid = (p00 >> _S32) + (p01 & _M32) + (p10 & _M32)
    return p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)


def add(a: tuple[np.ndarray, np.ndarray], b: tuple[np.ndarray, np.ndarray]):
    ah, al = a
    bh, bl = b
    lo = al + bl
    hi = ah + bh + (lo < al).astype(np.uint64)
    return hi, lo


def neg(a: tuple[np.ndarray, np.ndarray]):
    ah, al = a
    lo = np.uint64(0) - al
    hi = ~ah + (al == 0).astype(np.uint64)
    return hi, lo


def sub(a, b):
    return add(a, neg(b))


def zero(size: int):
    return np.zeros(size, dtype=np.uint64), np.zeros(size, dtype=np.uint64)


def phase(q: Sequence[int], batch: SampleBatch):
    """``sum_j q_j num_j mod 2^128`` for every sample, as ``(hi, lo)``."""
    if len(q) != batch.dim:
        raise ValueError(f"frequency dimension {len(q)} != batch dimension {batch.dim}")
    hi = np.zeros(batch.size, dtype=np.uint64)
    lo = np.zeros(batch.size, dtype=np.uint64)
    for j, qj in enumerate(q):
        r = int(qj) % MOD
        if r == 0:
            continue
        q0 = r & _M64
        q1 = r >> 64
        x_hi, x_lo = batch.hi[j], batch.lo[j]
        t_lo = np.uint64(q0) * x_lo
        t_hi = _mulhi(q0, batch._lo_lo[j], batch._lo_hi[j]) + np.uint64(q0) * x_hi
        if q1:
            t_hi = t_hi + np.uint64(q1) * x_lo
        hi, lo = add((hi, lo), (t_hi, t_lo))
    return hi, lo


def to_unit(ph: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """Truncate a 128-bit phase to a double in ``[0, 1)`` (53 significant bits)."""
    return (ph[0] >> np.uint64(11)).astype(np.float64) * 2.0**-53


def unit_phase_exact(q: Sequence[int], nums: Sequence[int]) -> float:
    """Scalar reference: the same truncated phase computed with Python ints."""
    r = sum(int(a) * int(b) for a, b in zip(q, nums)) % MOD
    return (r >> (P_BITS - 53)) * 2.0**-53


@dataclass
class Evaluator:
    """A function on batches of torus points, tagged with its dimension."""

    fn: object
    dim: int
    name: str = "f"

    def __call__(self, batch: SampleBatch) -> np.ndarray:
        return self.fn(batch)
