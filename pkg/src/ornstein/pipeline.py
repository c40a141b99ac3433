"""End-to-end certificates: witnesses, norm estimates, and exponent fits over n."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats

from .certsearch import T2_EXPONENT, rational_json
from .experiments import linear_fit
from .normest import NormEstimate, mc_norm
from .trigpoly import ExpansionCapError
from .witness import WitnessParams, build_family


@dataclass(frozen=True)
class SamplingConfig:
    samples: int = 1_000_000
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("samples must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class CertificateRecord:
    n: int
    variant: str
    mode: str
    degree: int
    log_degree: float
    norm_beta: NormEstimate
    norm_alphas: tuple[NormEstimate, ...]
    ratio: float
    ratio_err: float
    seed: int

    @property
    def denominator(self) -> float:
        return math.fsum(e.mean for e in self.norm_alphas)

    @property
    def certified_lower_bound(self) -> float:
        """Statistical lower bound for K_degree: ratio - 3 * ratio_err."""
        return self.ratio - 3 * self.ratio_err

    def csv_row(self) -> list[str]:
        row = [str(self.n), self.variant, self.mode, str(self.degree), repr(self.log_degree),
               repr(self.norm_beta.mean), repr(self.norm_beta.stderr)]
        row += [repr(e.mean) for e in self.norm_alphas]
        row += [repr(e.stderr) for e in self.norm_alphas]
        row += [repr(self.ratio), repr(self.ratio_err), str(self.seed)]
        return row

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "variant": self.variant,
            "mode": self.mode,
            "degree": str(self.degree),
            "log_degree": self.log_degree,
            "norm_beta": self.norm_beta.to_json(),
            "norm_alphas": [e.to_json() for e in self.norm_alphas],
            "ratio": self.ratio,
            "ratio_err": self.ratio_err,
            "seed": self.seed,
        }


def csv_header(m: int) -> list[str]:
    return (["n", "variant", "mode", "degree", "log_degree", "norm_beta", "norm_beta_err"]
            + [f"norm_alpha_{j}" for j in range(1, m + 1)]
            + [f"err_{j}" for j in range(1, m + 1)]
            + ["ratio", "ratio_err", "seed"])


def certify_one(params: WitnessParams, sampling: SamplingConfig = SamplingConfig()) -> CertificateRecord:
    """All m+1 derivative norms of W_n from one sample stream, and their ratio."""
    fam = build_family(params)
    try:
        beta_eval = fam.derivative_evaluator(params.sys.beta)
        alpha_evals = [fam.derivative_evaluator(a) for a in params.sys.alphas]
    except ExpansionCapError as exc:
        raise ExpansionCapError(exc.needed, exc.cap, f"witness at n={params.n}") from exc
    kw = dict(samples=sampling.samples, seed=sampling.seed, threads=sampling.threads)
    nb = mc_norm(beta_eval, **kw)
    na = tuple(mc_norm(ev, **kw) for ev in alpha_evals)
    den = math.fsum(e.mean for e in na)
    ratio = nb.mean / den
    den_err = math.sqrt(math.fsum(e.stderr**2 for e in na))
    ratio_err = ratio * math.hypot(nb.stderr / nb.mean, den_err / den)
    deg = fam.degree()
    return CertificateRecord(params.n, params.variant, params.mode, deg, math.log(deg),
                             nb, na, ratio, ratio_err, sampling.seed)


@dataclass
class Fit:
    slope: float
    intercept: float
    r2: float
    ci: tuple[float, float] | None = None

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def loglog_fit(log_degree: Sequence[float], values: Sequence[float], level: float = 0.95) -> Fit:
    """Slope of log(values) against log(log degree), with a t-based confidence interval."""
    x = np.log(np.asarray(log_degree, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    res = stats.linregress(x, y)
    dof = len(x) - 2
    half = stats.t.ppf(0.5 + level / 2, dof) * res.stderr if dof > 0 else math.inf
    return Fit(float(res.slope), float(res.intercept), float(res.rvalue**2),
               (float(res.slope - half), float(res.slope + half)))


@dataclass
class SweepReport:
    params: WitnessParams
    records: list[CertificateRecord]
    theoretical_exponent: Fraction
    fitted_exponent: Fit | None = None
    numerator_exponent: Fit | None = None
    ratio_linear: Fit | None = None
    numerator_linear: Fit | None = None
    log_degree_vs_n2: Fit | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def fit_available(self) -> bool:
        return self.fitted_exponent is not None

    @property
    def denominator_spread(self) -> float:
        dens = [r.denominator for r in self.records]
        return max(dens) / min(dens)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(csv_header(self.params.sys.m))
        for r in self.records:
            w.writerow(r.csv_row())
        return buf.getvalue()

    def to_json(self) -> dict:
        def fit(f):
            return f.to_json() if f is not None else None

        return {
            "certificate": self.params.cert.to_json(),
            "variant": self.params.variant,
            "mode": self.params.mode,
            "base": self.params.base,
            "records": [r.to_json() for r in self.records],
            "theoretical_exponent": rational_json(self.theoretical_exponent),
            "fit_available": self.fit_available,
            "fitted_exponent": fit(self.fitted_exponent),
            "numerator_exponent": fit(self.numerator_exponent),
            "ratio_linear": fit(self.ratio_linear),
            "numerator_linear": fit(self.numerator_linear),
            "log_degree_vs_n2": fit(self.log_degree_vs_n2),
            "failures": self.failures,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def sweep(params: WitnessParams, n_range: Sequence[int],
          sampling: SamplingConfig = SamplingConfig()) -> SweepReport:
    """One record per n (in order), then the exponent fits when >= 3 records succeed."""
    theo = params.cert.phi if params.variant == "T1" else T2_EXPONENT
    report = SweepReport(params, [], theo)
    for n in n_range:
        try:
            report.records.append(certify_one(dataclasses.replace(params, n=n), sampling))
        except ExpansionCapError as exc:
            report.failures.append(str(exc))
    recs = report.records
    if len(recs) >= 3:
        logdeg = [r.log_degree for r in recs]
        ns = [r.n for r in recs]
        report.fitted_exponent = loglog_fit(logdeg, [r.ratio for r in recs])
        report.numerator_exponent = loglog_fit(logdeg, [r.norm_beta.mean for r in recs])
        report.ratio_linear = Fit(*linear_fit(ns, [r.ratio for r in recs]))
        report.numerator_linear = Fit(*linear_fit(ns, [r.norm_beta.mean for r in recs]))
        report.log_degree_vs_n2 = Fit(*linear_fit([n * n for n in ns], logdeg))
    return report
