"""Sparse trigonometric polynomials with exact Gaussian-rational coefficients.

A polynomial is a finite map ``q -> c_q`` (``q`` in Z^d) standing for
``sum_q c_q exp(i <q, x>)``.  Coefficients stay exact; conversion to floating
point happens only inside evaluation.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import phases
from .indexcore import monomial, total_order

DEFAULT_CAP = 10**7
CAP_ENV = "ORNSTEIN_CAP"

Freq = tuple[int, ...]


def expansion_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


class ExpansionCapError(RuntimeError):
    """Raised when an expansion would exceed the configured term cap."""

    def __init__(self, needed: int, cap: int, what: str = "expansion"):
        super().__init__(f"{what} needs {needed} terms, above the cap of {cap} ({CAP_ENV})")
        self.needed = needed
        self.cap = cap


class UndefinedDegree(ValueError):
    pass


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def i_power(k: int) -> "GaussianRational":
        return _I_POWERS[k % 4]

    def __add__(self, other):
        other = _gr(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_gr(other))

    def __rsub__(self, other):
        return _gr(other) - self

    def __mul__(self, other):
        other = _gr(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            den = other.re**2 + other.im**2
            return self * GaussianRational(other.re / den, -other.im / den)
        other = Fraction(other)
        return GaussianRational(self.re / other, self.im / other)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = _gr(other)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


def _gr(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(Fraction(x), Fraction(0))
    raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")


_I_POWERS = (
    GaussianRational(1, 0),
    GaussianRational(0, 1),
    GaussianRational(-1, 0),
    GaussianRational(0, -1),
)
ZERO = GaussianRational()
ONE = GaussianRational(1)
HALF = GaussianRational(Fraction(1, 2))


@dataclass(frozen=True)
class TorusPoint:
    """``x_j = 2*pi*u_j`` with ``u_j = nums[j] / 2**precision``."""

    nums: tuple[int, ...]
    precision: int = phases.P_BITS

    def __post_init__(self):
        nums = tuple(int(v) for v in self.nums)
        for v in nums:
            if not 0 <= v < (1 << self.precision):
                raise ValueError(f"numerator {v} outside [0, 2^{self.precision})")
        object.__setattr__(self, "nums", nums)

    @classmethod
    def from_fractions(cls, us: Sequence[Fraction], precision: int = phases.P_BITS):
        nums = []
        for u in us:
            u = Fraction(u) % 1
            scaled = u * (1 << precision)
            if scaled.denominator != 1:
                raise ValueError(f"{u} is not a multiple of 2^-{precision}")
            nums.append(int(scaled))
        return cls(tuple(nums), precision)

    @property
    def d(self) -> int:
        return len(self.nums)

    def unit_phase(self, q: Sequence[int]) -> float:
        """``<q, u> mod 1`` reduced exactly, truncated to a double in [0, 1)."""
        r = sum(int(a) * b for a, b in zip(q, self.nums)) % (1 << self.precision)
        if self.precision >= 53:
            return (r >> (self.precision - 53)) * 2.0**-53
        return r * 2.0**-self.precision


class TrigPoly:
    """Immutable sparse trigonometric polynomial on the d-torus."""

    __slots__ = ("_terms", "d", "_floats")

    def __init__(self, terms: Mapping[Sequence[int], GaussianRational | int | Fraction], d: int):
        clean: dict[Freq, GaussianRational] = {}
        for q, c in terms.items():
            q = tuple(int(v) for v in q)
            if len(q) != d:
                raise ValueError(f"frequency {q} has dimension {len(q)}, expected {d}")
            c = _gr(c)
            if c:
                clean[q] = c
        self._terms = clean
        self.d = d
        self._floats = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, d: int) -> "TrigPoly":
        return cls({}, d)

    @classmethod
    def constant(cls, c, d: int) -> "TrigPoly":
        return cls({(0,) * d: c}, d)

    @classmethod
    def exp(cls, q: Sequence[int], c=1) -> "TrigPoly":
        return cls({tuple(q): c}, len(q))

    @classmethod
    def cos(cls, q: Sequence[int]) -> "TrigPoly":
        q = tuple(q)
        neg = tuple(-v for v in q)
        if q == neg:
            return cls.constant(1, len(q))
        return cls({q: HALF, neg: HALF}, len(q))

    @classmethod
    def sin(cls, q: Sequence[int]) -> "TrigPoly":
        q = tuple(q)
        neg = tuple(-v for v in q)
        if q == neg:
            return cls.zero(len(q))
        half_i = GaussianRational(0, Fraction(1, 2))
        return cls({q: -half_i, neg: half_i}, len(q))

    # -- container protocol ------------------------------------------------
    @property
    def terms(self) -> Mapping[Freq, GaussianRational]:
        return MappingProxyType(self._terms)

    def coeff(self, q: Sequence[int]) -> GaussianRational:
        return self._terms.get(tuple(q), ZERO)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self.d == other.d and self._terms == other._terms

    def __hash__(self):
        return hash((self.d, frozenset(self._terms.items())))

    def __repr__(self):
        return f"TrigPoly(d={self.d}, terms={len(self)})"

    # -- algebra ------------------------------------------------------------
    def _check(self, other: "TrigPoly"):
        if self.d != other.d:
            raise ValueError(f"dimension mismatch: {self.d} vs {other.d}")

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        self._check(other)
        out = dict(self._terms)
        for q, c in other._terms.items():
            out[q] = out.get(q, ZERO) + c
        return TrigPoly(out, self.d)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly({q: -c for q, c in self._terms.items()}, self.d)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def scale(self, c) -> "TrigPoly":
        c = _gr(c)
        return TrigPoly({q: c * v for q, v in self._terms.items()}, self.d)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return product_expand([self, other])
        return self.scale(other)

    __rmul__ = __mul__

    def conjugate_reflected(self) -> "TrigPoly":
        """The polynomial whose value is the complex conjugate of ``self``."""
        return TrigPoly(
            {tuple(-v for v in q): c.conjugate() for q, c in self._terms.items()}, self.d
        )

    def is_real(self) -> bool:
        for q, c in self._terms.items():
            if self.coeff(tuple(-v for v in q)) != c.conjugate():
                return False
        return True

    def differentiate(self, mu: Sequence[int]) -> "TrigPoly":
        return differentiate(self, mu)

    def degree(self) -> int:
        return degree(self)

    # -- evaluation ----------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.d

    def eval(self, x: TorusPoint) -> complex:
        return eval_point(self, x)

    def _paired(self):
        """Terms grouped as (q, c_q, c_{-q}) with q the sign-canonical representative."""
        if self._floats is None:
            seen = set()
            const = 0j
            pairs = []
            for q, c in self._terms.items():
                if q in seen:
                    continue
                neg = tuple(-v for v in q)
                if q == neg:
                    const += complex(c)
                    seen.add(q)
                    continue
                seen.add(q)
                seen.add(neg)
                c_neg = self._terms.get(neg, ZERO)
                pairs.append((q, complex(c), complex(c_neg)))
            self._floats = (const, pairs)
        return self._floats

    def __call__(self, batch: phases.SampleBatch) -> np.ndarray:
        """Values at every point of ``batch`` (complex array)."""
        const, pairs = self._paired()
        re = np.full(batch.size, const.real)
        im = np.full(batch.size, const.imag)
        for q, cp, cm in pairs:
            accumulate_pair(re, im, phases.phase(q, batch), cp, cm)
        return re + 1j * im

    # -- text format ---------------------------------------------------------
    def dump(self) -> str:
        return dump(self)


def accumulate_pair(re: np.ndarray, im: np.ndarray, ph, cp: complex, cm: complex) -> None:
    """In place: ``re + i*im += cp*e^{i t} + cm*e^{-i t}`` with ``t = 2*pi*ph``."""
    theta = 2.0 * math.pi * phases.to_unit(ph)
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    a, b = cp.real + cm.real, cm.imag - cp.imag
    if a:
        re += a * cos_t
    if b:
        re += b * sin_t
    a, b = cp.imag + cm.imag, cp.real - cm.real
    if a:
        im += a * cos_t
    if b:
        im += b * sin_t


def differentiate(p: TrigPoly, mu: Sequence[int]) -> TrigPoly:
    """``D^mu``: each coefficient is multiplied by ``i^{|mu|} q^mu``."""
    mu = tuple(mu)
    if len(mu) != p.d:
        raise ValueError(f"multi-index dimension {len(mu)} != {p.d}")
    ik = GaussianRational.i_power(total_order(mu))
    out = {}
    for q, c in p.terms.items():
        m = monomial(q, mu)
        if m:
            out[q] = ik * c * m
    return TrigPoly(out, p.d)


def product_expand(factors: Iterable[TrigPoly], cap: int | None = None, d: int | None = None) -> TrigPoly:
    """Exact distributive product of ``factors``; the empty product is 1."""
    factors = list(factors)
    cap = expansion_cap() if cap is None else cap
    if not factors:
        if d is None:
            raise ValueError("dimension required for the empty product")
        return TrigPoly.constant(1, d)
    acc = factors[0]
    for f in factors[1:]:
        acc._check(f)
        needed = len(acc) * len(f)
        if needed > cap:
            raise ExpansionCapError(needed, cap, "product expansion")
        out: dict[Freq, GaussianRational] = {}
        for q1, c1 in acc.terms.items():
            for q2, c2 in f.terms.items():
                q = tuple(a + b for a, b in zip(q1, q2))
                out[q] = out.get(q, ZERO) + c1 * c2
        acc = TrigPoly(out, acc.d)
    if len(acc) > cap:
        raise ExpansionCapError(len(acc), cap, "product expansion")
    return acc


def eval_point(p: TrigPoly, x: TorusPoint) -> complex:
    if x.d != p.d:
        raise ValueError(f"point dimension {x.d} != {p.d}")
    total = 0j
    for q, c in p.terms.items():
        t = 2.0 * math.pi * x.unit_phase(q)
        total += complex(c) * complex(math.cos(t), math.sin(t))
    return total


def degree(p: TrigPoly) -> int:
    """Max over stored frequencies of the largest absolute coordinate."""
    if not len(p):
        raise UndefinedDegree("degree of the zero polynomial is undefined")
    return max(max((abs(v) for v in q), default=0) for q in p.terms)


def triangle_norm(p: TrigPoly) -> tuple[Fraction, Fraction, Fraction]:
    """``(sum |re c|, sum |im c|, sum (|re c| + |im c|))`` over all coefficients.

    The last entry bounds every L_p norm of ``p`` from above.
    """
    sr = sum((abs(c.re) for _, c in p), Fraction(0))
    si = sum((abs(c.im) for _, c in p), Fraction(0))
    return sr, si, sr + si


def _fmt_frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def dump(p: TrigPoly) -> str:
    """One line per term, ``q1 .. qd re_num/re_den im_num/im_den``, sorted by frequency."""
    lines = []
    for q in sorted(p.terms):
        c = p.terms[q]
        lines.append(" ".join([*map(str, q), _fmt_frac(c.re), _fmt_frac(c.im)]))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_dump(text: str, d: int | None = None) -> TrigPoly:
    terms = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if d is None:
            d = len(parts) - 2
        if len(parts) != d + 2:
            raise ValueError(f"line {lineno}: expected {d + 2} fields, got {len(parts)}")
        q = tuple(int(v) for v in parts[:d])
        terms[q] = GaussianRational(Fraction(parts[d]), Fraction(parts[d + 1]))
    return TrigPoly(terms, d if d is not None else 1)
