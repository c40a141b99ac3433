"""Multi-indices and derivative systems ``D^beta f <= K sum_j D^{alpha_j} f``."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

ENTRY_BOUND = 2**31


class DimensionError(ValueError):
    """Raised when vectors of different lengths are paired."""


class InvalidSystem(ValueError):
    """Raised when a derivative system violates one of its invariants.

    ``violations`` lists every failed invariant, not only the first one.
    """

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if not entries:
            raise DimensionError("multi-index must have dimension >= 1")
        for e in entries:
            if e < 0 or e >= ENTRY_BOUND:
                raise ValueError(f"multi-index entry {e} outside [0, 2^31)")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, *entries: int) -> "MultiIndex":
        return cls(tuple(entries))

    @property
    def d(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, j: int) -> int:
        return self.entries[j]

    def __sub__(self, other: "MultiIndex") -> tuple[int, ...]:
        if len(other) != len(self):
            raise DimensionError(f"length mismatch: {len(self)} vs {len(other)}")
        return tuple(a - b for a, b in zip(self.entries, other.entries))

    def __repr__(self) -> str:
        return f"MultiIndex{self.entries}"


def as_multi(mu) -> MultiIndex:
    return mu if isinstance(mu, MultiIndex) else MultiIndex(tuple(mu))


def inner(mu: Sequence[int] | MultiIndex, v: Sequence[int]) -> int:
    """Exact integer pairing ``sum_j mu(j) * v(j)``."""
    mu = tuple(mu)
    v = tuple(v)
    if len(mu) != len(v):
        raise DimensionError(f"length mismatch: {len(mu)} vs {len(v)}")
    return sum(int(a) * int(b) for a, b in zip(mu, v))


def total_order(mu: Sequence[int] | MultiIndex) -> int:
    return sum(int(e) for e in mu)


def monomial(q: Sequence[int], mu: Sequence[int] | MultiIndex) -> int:
    """``q^mu = prod_j q(j)^mu(j)`` with the convention ``0^0 = 1``."""
    out = 1
    for qj, mj in zip(q, mu):
        if mj:
            out *= int(qj) ** int(mj)
    return out


@dataclass(frozen=True)
class DerivativeSystem:
    d: int
    alphas: tuple[MultiIndex, ...]
    beta: MultiIndex

    @classmethod
    def build(cls, alphas: Iterable, beta, d: int | None = None) -> "DerivativeSystem":
        alphas = tuple(as_multi(a) for a in alphas)
        beta = as_multi(beta)
        return cls(d if d is not None else len(beta), alphas, beta)

    @property
    def m(self) -> int:
        return len(self.alphas)

    def violations(self) -> list[str]:
        out = []
        if self.d < 1:
            out.append("dimension must be >= 1")
        if not self.alphas:
            out.append("at least one alpha required")
        for j, a in enumerate(self.alphas):
            if len(a) != self.d:
                out.append(f"alpha[{j}] has length {len(a)}, expected {self.d}")
        if len(self.beta) != self.d:
            out.append(f"beta has length {len(self.beta)}, expected {self.d}")
        if self.beta in self.alphas:
            out.append("beta is one of the alphas")
        if len(set(self.alphas)) != len(self.alphas):
            out.append("duplicate alphas")
        return out

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "alphas": [list(a.entries) for a in self.alphas],
            "beta": list(self.beta.entries),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DerivativeSystem":
        try:
            d = int(obj["d"])
            alphas = [tuple(int(e) for e in a) for a in obj["alphas"]]
            beta = tuple(int(e) for e in obj["beta"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSystem([f"malformed system JSON: {exc!r}"]) from exc
        return cls.build(alphas, beta, d=d)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def validate_system(sys: DerivativeSystem) -> DerivativeSystem:
    """Return ``sys`` unchanged, or raise :class:`InvalidSystem` listing all violations."""
    problems = sys.violations()
    if problems:
        raise InvalidSystem(problems)
    return sys


def corollary_system() -> DerivativeSystem:
    """The planar system: pure second derivatives against the mixed one."""
    return DerivativeSystem.build([(2, 0), (0, 2)], (1, 1))
