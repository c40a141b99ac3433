"""Search for the integer certificates (Lambda, Gamma, eps) of a derivative system.

All conditions are checked with exact integer arithmetic; exponents are kept
as :class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .indexcore import DerivativeSystem, inner, validate_system

DEFAULT_BOX = 8
T2_EXPONENT = Fraction(1, 2)


class NotCertified(RuntimeError):
    pass


@dataclass(frozen=True)
class GammaChoice:
    """A vector Gamma with the ordering of the alphas it induces.

    ``order[0]`` is the index (in input order) of the Gamma-maximal alpha and
    ``order[1]`` the runner-up; the remaining indices follow in non-increasing
    pairing.
    """

    gamma: tuple[int, ...]
    order: tuple[int, ...]
    theta: Fraction
    phi: Fraction


@dataclass(frozen=True)
class Certificate:
    system: DerivativeSystem
    lam: tuple[int, ...]
    gamma: GammaChoice | None
    eps: tuple[int, ...] | None

    @property
    def theorems(self) -> tuple[str, ...]:
        out = []
        if self.gamma is not None:
            out.append("T1")
        if self.eps is not None:
            out.append("T2")
        return tuple(out)

    @property
    def theta(self) -> Fraction | None:
        return self.gamma.theta if self.gamma else None

    @property
    def phi(self) -> Fraction | None:
        return self.gamma.phi if self.gamma else None

    @property
    def t2_exponent(self) -> Fraction | None:
        return T2_EXPONENT if self.eps is not None else None

    def to_json(self) -> dict:
        g = None
        if self.gamma is not None:
            g = {
                "gamma": list(self.gamma.gamma),
                "order": list(self.gamma.order),
                "theta": rational_json(self.gamma.theta),
                "phi": rational_json(self.gamma.phi),
            }
        return {
            "system": self.system.to_json(),
            "lambda": list(self.lam),
            "gamma": g,
            "eps": list(self.eps) if self.eps is not None else None,
            "theorems": list(self.theorems),
            "t2_exponent": rational_json(T2_EXPONENT) if self.eps is not None else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        sys = DerivativeSystem.from_json(obj["system"])
        g = obj.get("gamma")
        gamma = None
        if g is not None:
            gamma = GammaChoice(
                tuple(g["gamma"]),
                tuple(g["order"]),
                rational_from_json(g["theta"]),
                rational_from_json(g["phi"]),
            )
        eps = tuple(obj["eps"]) if obj.get("eps") is not None else None
        return cls(sys, tuple(obj["lambda"]), gamma, eps)


def rational_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def rational_from_json(obj: dict) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


# --- exact checkers, independent of the search paths below -----------------

def lambda_ok(sys: DerivativeSystem, lam: Sequence[int]) -> bool:
    if any(x < 1 for x in lam):
        return False
    target = inner(sys.beta, lam)
    return all(inner(a, lam) == target for a in sys.alphas)


def gamma_ok(sys: DerivativeSystem, gamma: Sequence[int], order: Sequence[int]) -> bool:
    """The chain <a_s1,G> > <beta,G> > <a_s2,G> >= ... >= <a_sm,G>."""
    if any(x < 1 for x in gamma) or sorted(order) != list(range(sys.m)) or sys.m < 2:
        return False
    p = [inner(sys.alphas[i], gamma) for i in order]
    b = inner(sys.beta, gamma)
    if not p[0] > b > p[1]:
        return False
    return all(p[i] >= p[i + 1] for i in range(1, len(p) - 1))


def eps_ok(sys: DerivativeSystem, eps: Sequence[int]) -> bool:
    if any(e not in (0, 1) for e in eps):
        return False
    first = inner(sys.alphas[0], eps) % 2
    if inner(sys.beta, eps) % 2 == first:
        return False
    return all(inner(a, eps) % 2 == first for a in sys.alphas)


# --- searches ----------------------------------------------------------------

def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [r[:] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[: len(pivots)], pivots


def find_lambda(sys: DerivativeSystem, box_bound: int = DEFAULT_BOX) -> list[tuple[int, ...]]:
    """All Lambda in {1..box_bound}^d with <alpha_j,Lambda> = <beta,Lambda> for every j.

    The homogeneous system (alpha_j - beta) . Lambda = 0 is reduced by exact
    elimination first, so only the free coordinates are enumerated.
    """
    validate_system(sys)
    d = sys.d
    rows = [[Fraction(x) for x in (a - sys.beta)] for a in sys.alphas]
    rref, pivots = _rref(rows, d)
    free = [c for c in range(d) if c not in pivots]
    out = []
    for values in itertools.product(range(1, box_bound + 1), repeat=len(free)):
        lam: list[Fraction | int] = [0] * d
        for c, v in zip(free, values):
            lam[c] = v
        ok = True
        for row, p in zip(rref, pivots):
            val = -sum(row[c] * lam[c] for c in free)
            if val.denominator != 1 or not 1 <= val <= box_bound:
                ok = False
                break
            lam[p] = int(val)
        if ok:
            out.append(tuple(int(x) for x in lam))
    out.sort()
    return out


def find_gamma(
    sys: DerivativeSystem, lam: Sequence[int], box_bound: int = DEFAULT_BOX
) -> list[GammaChoice]:
    """Admissible Gamma vectors ranked by phi (descending).

    Ties are broken by the induced ordering of the alphas (input order
    preferred), then lexicographically by Gamma.
    """
    validate_system(sys)
    if sys.m < 2:
        raise ValueError("Theorem 1 path requires at least two alphas")
    if not lambda_ok(sys, lam):
        raise ValueError(f"Lambda={tuple(lam)} does not certify the system")
    found = []
    for gamma in itertools.product(range(1, box_bound + 1), repeat=sys.d):
        pair = [inner(a, gamma) for a in sys.alphas]
        order = tuple(sorted(range(sys.m), key=lambda i: -pair[i]))
        top, second = pair[order[0]], pair[order[1]]
        b = inner(sys.beta, gamma)
        if not top > b > second:
            continue
        theta = Fraction(1, top - second)
        phi = Fraction(1, 2) * (1 - Fraction(top - b, top - second))
        found.append(GammaChoice(tuple(gamma), order, theta, phi))
    found.sort(key=lambda g: (-g.phi, g.order, g.gamma))
    return found


def find_eps(sys: DerivativeSystem) -> list[tuple[int, ...]]:
    """All parity vectors eps in {0,1}^d, fewest ones first, earliest coordinates first."""
    validate_system(sys)
    out = [e for e in itertools.product((0, 1), repeat=sys.d) if eps_ok(sys, e)]
    out.sort(key=lambda e: (sum(e), [j for j in range(sys.d) if e[j]]))
    return out


def certify(sys: DerivativeSystem, box_bound: int = DEFAULT_BOX) -> Certificate:
    validate_system(sys)
    lams = find_lambda(sys, box_bound)
    if not lams:
        raise NotCertified(
            f"anisotropic hypothesis not certified within box {box_bound}"
        )
    lam = lams[0]
    gamma = None
    if sys.m >= 2:
        ranked = find_gamma(sys, lam, box_bound)
        gamma = ranked[0] if ranked else None
    eps_list = find_eps(sys)
    return Certificate(sys, lam, gamma, eps_list[0] if eps_list else None)
