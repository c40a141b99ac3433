"""The witness polynomials: lacunary frequencies a_k, Riesz products, W_n and
the split ``D^mu W_n = B_{mu,n} + G_{mu,n}``.

Frequencies are exact Python ints.  Expanded polynomials carry exact
Gaussian-rational coefficients; the product-form evaluators (``psi_k``,
``R_n``, ``G``) and the structured evaluators of the expanded sums work on
sample batches with exact 128-bit phases.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import phases
from .certsearch import Certificate
from .indexcore import DerivativeSystem, MultiIndex, as_multi, monomial, total_order
from .phases import Evaluator, SampleBatch
from .trigpoly import (
    ExpansionCapError,
    GaussianRational,
    TrigPoly,
    accumulate_pair,
    expansion_cap,
    product_expand,
)

Freq = tuple[int, ...]
VARIANTS = ("T1", "T2")
MODES = ("native", "scaled")


class WitnessError(ValueError):
    pass


class RieszNegative(AssertionError):
    """A sampled Riesz product came out negative."""


def iroot(x: int, k: int) -> int:
    """``floor(x ** (1/k))`` for integers ``x >= 0``, ``k >= 1``."""
    if x < 0 or k < 1:
        raise ValueError("iroot needs x >= 0 and k >= 1")
    if x < 2 or k == 1:
        return x
    # Newton from above, starting at a power of two exceeding the root
    y = 1 << (x.bit_length() // k + 1)
    while True:
        z = ((k - 1) * y + x // y ** (k - 1)) // k
        if z >= y:
            break
        y = z
    while y**k > x:
        y -= 1
    while (y + 1) ** k <= x:
        y += 1
    return y


def floor_power(n: int, exponent: Fraction) -> int:
    """``floor(n ** exponent)`` for a nonnegative rational exponent."""
    exponent = Fraction(exponent)
    if exponent < 0:
        raise ValueError("negative exponents are not supported")
    return iroot(n**exponent.numerator, exponent.denominator)


@dataclass(frozen=True)
class WitnessParams:
    sys: DerivativeSystem
    cert: Certificate
    n: int
    variant: str = "T2"
    mode: str = "native"
    base: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise WitnessError("n must be >= 1")
        if self.variant not in VARIANTS:
            raise WitnessError(f"variant must be one of {VARIANTS}")
        if self.mode not in MODES:
            raise WitnessError(f"mode must be one of {MODES}")
        if self.variant == "T1" and self.cert.gamma is None:
            raise WitnessError("T1 witness needs a Gamma certificate")
        if self.variant == "T2" and self.cert.eps is None:
            raise WitnessError("T2 witness needs an eps certificate")
        if self.mode == "scaled" and (self.base is None or self.base < 2):
            raise WitnessError("scaled mode needs base >= 2")

    @property
    def alpha1_index(self) -> int:
        """Input position of the designated alpha_1 (Gamma-maximal for T1, first for T2)."""
        return self.cert.gamma.order[0] if self.variant == "T1" else 0

    @property
    def alpha1(self) -> MultiIndex:
        return self.sys.alphas[self.alpha1_index]

    def to_json(self) -> dict:
        return {
            "certificate": self.cert.to_json(),
            "n": self.n,
            "variant": self.variant,
            "mode": self.mode,
            "base": self.base,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "WitnessParams":
        cert = Certificate.from_json(obj["certificate"])
        return cls(cert.system, cert, int(obj["n"]), obj.get("variant", "T2"),
                   obj.get("mode", "native"), obj.get("base"))


def build_b(sys: DerivativeSystem, n: int, cert: Certificate | None = None) -> list[int]:
    """``b_k = 2 + (-1)^k`` when ``|alpha_1| - |beta|`` is even, else all ones.

    ``alpha_1`` is the Gamma-maximal alpha when ``cert`` carries a Gamma, the
    first input alpha otherwise.
    """
    i1 = cert.gamma.order[0] if cert is not None and cert.gamma is not None else 0
    if (total_order(sys.alphas[i1]) - total_order(sys.beta)) % 2 == 0:
        return [2 + (-1) ** k for k in range(1, n + 1)]
    return [1] * n


def build_a(params: WitnessParams) -> list[Freq]:
    sys, cert, n = params.sys, params.cert, params.n
    lam = cert.lam
    out = []
    if params.variant == "T1":
        b = build_b(sys, n, cert)
        gamma = cert.gamma.gamma
        floors = [floor_power(n, cert.gamma.theta * g) for g in gamma]
        for k in range(1, n + 1):
            out.append(tuple(
                _growth(params, lam[j], k) * b[k - 1] ** gamma[j] * floors[j]
                for j in range(sys.d)
            ))
    else:
        eps = cert.eps
        for k in range(1, n + 1):
            out.append(tuple(
                _growth(params, lam[j], k) * (-1) ** (eps[j] * k) for j in range(sys.d)
            ))
    return out


def _growth(params: WitnessParams, lam_j: int, k: int) -> int:
    if params.mode == "native":
        return 3 ** (lam_j * 2 * k * params.n)
    return params.base ** (lam_j * k)


def iter_Ak(a: Sequence[Freq], k: int) -> Iterator[tuple[tuple[int, ...], Freq, int]]:
    """Yield ``(xi, q, r(q))`` for ``q = a_k + sum_{j<k} xi_j a_j``; xi_1 varies slowest."""
    if not 1 <= k <= len(a):
        raise ValueError(f"level k={k} outside 1..{len(a)}")
    ak = a[k - 1]
    d = len(ak)
    for xi in itertools.product((-1, 0, 1), repeat=k - 1):
        q = list(ak)
        for x, aj in zip(xi, a):
            if x:
                for t in range(d):
                    q[t] += x * aj[t]
        yield xi, tuple(q), 1 + sum(1 for x in xi if x)


def enumerate_Ak(a: Sequence[Freq], k: int) -> list[tuple[Freq, int]]:
    return [(q, r) for _, q, r in iter_Ak(a, k)]


def _neg(q: Freq) -> Freq:
    return tuple(-v for v in q)


@dataclass
class WitnessFamily:
    params: WitnessParams
    a: list[Freq]
    b: list[int] | None
    cap: int = field(default_factory=expansion_cap)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def d(self) -> int:
        return self.params.sys.d

    @property
    def alpha1(self) -> MultiIndex:
        return self.params.alpha1

    def A(self, k: int) -> list[tuple[Freq, int]]:
        return enumerate_Ak(self.a, k)

    # -- exact expansions ------------------------------------------------------
    def _check_cap(self, what: str):
        needed = 3**self.n - 1
        if needed > self.cap:
            raise ExpansionCapError(needed, self.cap, f"{what} at n={self.n}")

    def _expand(self, coeff, what: str) -> TrigPoly:
        """Sum over k, q in A_k of coeff(k, q, r, False) e^{iqx} + coeff(k, -q, r, True) e^{-iqx}."""
        self._check_cap(what)
        terms = {}
        for k in range(1, self.n + 1):
            for _, q, r in iter_Ak(self.a, k):
                for s, minus in ((q, False), (_neg(q), True)):
                    c = coeff(k, s, r, minus)
                    if c:
                        terms[s] = c
        return TrigPoly(terms, self.d)

    def R(self) -> TrigPoly:
        """``R_n`` from its coefficients ``2^{-r(q)}`` on A_k and -A_k."""
        return self._expand(lambda k, q, r, _: Fraction(1, 2**r), "R_n")

    def R_product(self) -> TrigPoly:
        """``R_n`` by literally expanding ``-1 + prod (1 + cos<x,a_k>)``."""
        one = TrigPoly.constant(1, self.d)
        prod = product_expand([one + TrigPoly.cos(ak) for ak in self.a], cap=self.cap)
        return prod - one

    def _inv_alpha1(self, q: Freq) -> int:
        m = monomial(q, self.alpha1)
        if m == 0:
            raise WitnessError(f"q^alpha_1 vanishes at q={q}; W_n is undefined")
        return m

    def W(self) -> TrigPoly:
        i_pow = GaussianRational.i_power(-total_order(self.alpha1))
        return self._expand(
            lambda k, q, r, _: i_pow * Fraction(1, self._inv_alpha1(q) * 2**r), "W_n"
        )

    def _shift(self, mu) -> int:
        return total_order(mu) - total_order(self.alpha1)

    def derivative(self, mu) -> TrigPoly:
        """``D^mu W_n`` from the closed-form coefficients."""
        mu = as_multi(mu)
        i_pow = GaussianRational.i_power(self._shift(mu))
        return self._expand(
            lambda k, q, r, _: i_pow * Fraction(monomial(q, mu), self._inv_alpha1(q) * 2**r),
            f"D^{mu.entries} W_n",
        )

    def ratio(self, k: int, mu) -> Fraction:
        """``a_k^mu / a_k^{alpha_1}``."""
        ak = self.a[k - 1]
        return Fraction(monomial(ak, mu), self._inv_alpha1(ak))

    def BG(self, mu) -> tuple[TrigPoly, TrigPoly]:
        mu = as_multi(mu)
        s = self._shift(mu)
        i_pow = GaussianRational.i_power(s)
        sign = -1 if s % 2 else 1

        def b_coeff(k, q, r, minus):
            ak = _neg(self.a[k - 1]) if minus else self.a[k - 1]
            val = Fraction(monomial(q, mu), self._inv_alpha1(q)) - Fraction(
                monomial(ak, mu), self._inv_alpha1(ak)
            )
            return i_pow * val / 2**r

        def g_coeff(k, q, r, minus):
            c = i_pow * self.ratio(k, mu) / 2**r
            return c * sign if minus else c

        return self._expand(b_coeff, "B"), self._expand(g_coeff, "G")

    # -- streaming bounds -------------------------------------------------------
    def triangle_B(self, mu) -> tuple[Fraction, Fraction, Fraction]:
        """Triangle-inequality bound for ``B_{mu,n}`` without materializing it."""
        mu = as_multi(mu)
        s = self._shift(mu)
        total = Fraction(0)
        for k in range(1, self.n + 1):
            ref = self.ratio(k, mu)
            for _, q, r in iter_Ak(self.a, k):
                v = Fraction(monomial(q, mu), self._inv_alpha1(q)) - ref
                total += 2 * abs(v) / 2**r
        if s % 2 == 0:
            return total, Fraction(0), total
        return Fraction(0), total, total

    # -- degree and invariants ------------------------------------------------
    def degree(self) -> int:
        best = 0
        for k in range(1, self.n + 1):
            for j in range(self.d):
                reach = abs(self.a[k - 1][j]) + sum(abs(self.a[l][j]) for l in range(k - 1))
                best = max(best, reach)
        return best

    def growth_violations(self) -> list[tuple[int, int]]:
        """(k, j) pairs where ``|a_k(j)| > 3^{2(n-1)} |a_{k-1}(j)|`` fails."""
        factor = 3 ** (2 * (self.n - 1))
        out = []
        for k in range(2, self.n + 1):
            for j in range(self.d):
                if not abs(self.a[k - 1][j]) > factor * abs(self.a[k - 2][j]):
                    out.append((k, j))
        return out

    def l2_growth_violations(self) -> list[int]:
        factor = 3 ** (4 * (self.n - 1))
        out = []
        for k in range(2, self.n + 1):
            cur = sum(v * v for v in self.a[k - 1])
            prev = sum(v * v for v in self.a[k - 2])
            if not cur > factor * prev:
                out.append(k)
        return out

    def unique_by_magnitude(self) -> bool:
        """Sufficient test: each a_k has a coordinate exceeding twice the sum of earlier ones."""
        for k in range(1, self.n + 1):
            ok = any(
                abs(self.a[k - 1][j]) > 2 * sum(abs(self.a[l][j]) for l in range(k - 1))
                for j in range(self.d)
            )
            if not ok:
                return False
        return True

    def tau(self) -> Fraction:
        """Exact ``max |a_k(j)| / min_q |q(j)|`` over levels, coordinates and q in A_k."""
        worst = Fraction(1)
        for k in range(1, self.n + 1):
            for j in range(self.d):
                big = abs(self.a[k - 1][j])
                spread = sum(abs(self.a[l][j]) for l in range(k - 1))
                if spread >= big:
                    return Fraction(10**18)
                worst = max(worst, Fraction(big, big - spread), Fraction(big + spread, big))
        return worst

    @property
    def tau_observed(self) -> float:
        return float(self.tau())

    def power_identities(self) -> dict[str, bool]:
        """T2 identities ``a_k^{alpha_j} = a_k^{alpha_1}`` and ``a_k^beta = (-1)^k a_k^{alpha_1}``."""
        sys = self.params.sys
        alphas_equal = all(
            monomial(ak, al) == monomial(ak, self.alpha1) for ak in self.a for al in sys.alphas
        )
        beta_alternates = all(
            monomial(ak, sys.beta) == (-1) ** k * monomial(ak, self.alpha1)
            for k, ak in enumerate(self.a, 1)
        )
        return {"alphas_equal": alphas_equal, "beta_alternates": beta_alternates}

    def invariants(self) -> dict[str, bool]:
        out = {
            "unique_representation": self.unique_by_magnitude(),
            "tau_at_most_2": self.tau() <= 2,
        }
        if self.params.mode == "native":
            out["growth"] = not self.growth_violations()
            out["l2_growth"] = not self.l2_growth_violations()
        if self.params.variant == "T2":
            out.update(self.power_identities())
        return out

    # -- batch evaluators ------------------------------------------------------
    def _a_phases(self, batch: SampleBatch):
        return [phases.phase(ak, batch) for ak in self.a]

    def _cosines(self, batch: SampleBatch) -> list[np.ndarray]:
        return [np.cos(2.0 * math.pi * phases.to_unit(ph)) for ph in self._a_phases(batch)]

    @staticmethod
    def _riesz_factor(acc: np.ndarray, cos_l: np.ndarray) -> np.ndarray:
        acc = acc * (1.0 + cos_l)
        if (acc < 0).any():
            raise RieszNegative("Riesz product negative at a sampled point")
        return acc

    def psi_evaluator(self, k: int) -> Evaluator:
        """``psi_k = prod_{l<k} (1 + cos<x, a_l>)`` for ``1 <= k <= n+1``."""
        if not 1 <= k <= self.n + 1:
            raise ValueError(f"psi index {k} outside 1..{self.n + 1}")

        def fn(batch):
            acc = np.ones(batch.size)
            for l in range(k - 1):
                ph = phases.phase(self.a[l], batch)
                acc = self._riesz_factor(acc, np.cos(2.0 * math.pi * phases.to_unit(ph)))
            return acc

        return Evaluator(fn, self.d, f"psi_{k}")

    def riesz_evaluator(self) -> Evaluator:
        def fn(batch):
            acc = np.ones(batch.size)
            for c in self._cosines(batch):
                acc = self._riesz_factor(acc, c)
            return acc - 1.0

        return Evaluator(fn, self.d, "R_n")

    def g_evaluator(self, mu) -> Evaluator:
        """Product form ``sum_k i^s (a_k^mu/a_k^{a1}) (e^{i<a_k,x>} + (-1)^s e^{-i<a_k,x>})/2 psi_k``."""
        mu = as_multi(mu)
        s = self._shift(mu)
        ratios = [float(self.ratio(k, mu)) for k in range(1, self.n + 1)]
        unit = complex(GaussianRational.i_power(s))

        def fn(batch):
            out = np.zeros(batch.size, dtype=complex)
            psi = np.ones(batch.size)
            for k, ph in enumerate(self._a_phases(batch), 1):
                theta = 2.0 * math.pi * phases.to_unit(ph)
                # (e^{it} + e^{-it})/2 = cos, (e^{it} - e^{-it})/2 = i sin
                wave = np.cos(theta) if s % 2 == 0 else 1j * np.sin(theta)
                out += (unit * ratios[k - 1]) * wave * psi
                psi = self._riesz_factor(psi, np.cos(theta))
            return out

        return Evaluator(fn, self.d, f"G_{mu.entries}")

    def _level_phases(self, batch: SampleBatch):
        """Per level k, the 128-bit phases of A_k in :func:`iter_Ak` order."""
        base = self._a_phases(batch)
        combos = [phases.zero(batch.size)]
        for k in range(1, self.n + 1):
            bk = base[k - 1]
            yield k, [phases.add(bk, c) for c in combos]
            if k < self.n:
                combos = [
                    x for c in combos for x in (phases.sub(c, bk), c, phases.add(c, bk))
                ]

    def structured_evaluator(self, poly: TrigPoly, name: str = "f") -> Evaluator:
        """Evaluate a polynomial supported on the A_k and -A_k, reusing the lattice structure."""
        per_level = []
        for k in range(1, self.n + 1):
            per_level.append([
                (complex(poly.coeff(q)), complex(poly.coeff(_neg(q))))
                for _, q, _ in iter_Ak(self.a, k)
            ])
        covered = sum(len(v) for v in per_level) * 2
        if covered < len(poly):
            raise ValueError("polynomial has terms outside A_k and -A_k")

        def fn(batch):
            re = np.zeros(batch.size)
            im = np.zeros(batch.size)
            for k, level in self._level_phases(batch):
                for ph, (cp, cm) in zip(level, per_level[k - 1]):
                    if cp or cm:
                        accumulate_pair(re, im, ph, cp, cm)
            return re + 1j * im

        return Evaluator(fn, self.d, name)

    def derivative_evaluator(self, mu) -> Evaluator:
        mu = as_multi(mu)
        return self.structured_evaluator(self.derivative(mu), f"D^{mu.entries}W")


def build_family(params: WitnessParams, cap: int | None = None) -> WitnessFamily:
    b = build_b(params.sys, params.n, params.cert) if params.variant == "T1" else None
    return WitnessFamily(params, build_a(params), b, expansion_cap() if cap is None else cap)


def build_R(params: WitnessParams) -> TrigPoly:
    return build_family(params).R()


def build_W(params: WitnessParams) -> TrigPoly:
    return build_family(params).W()


def build_BG(params: WitnessParams, mu) -> tuple[TrigPoly, TrigPoly]:
    return build_family(params).BG(mu)
