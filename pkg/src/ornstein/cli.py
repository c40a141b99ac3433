"""Batch command-line front end.

Exit codes: 0 success, 1 input error, 2 no certificate, 3 resource cap.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .certsearch import DEFAULT_BOX, NotCertified, certify
from .indexcore import DerivativeSystem, InvalidSystem, validate_system
from .pipeline import SamplingConfig, sweep
from .selftest import run_selftest
from .trigpoly import ExpansionCapError
from .witness import WitnessError, WitnessParams, build_family

EXIT_OK, EXIT_INPUT, EXIT_NO_CERT, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def load_system(path: str) -> DerivativeSystem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return validate_system(DerivativeSystem.from_json(obj))
    except (InvalidSystem, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _params(args, system: DerivativeSystem, n: int) -> WitnessParams:
    cert = certify(system, args.box)
    try:
        return WitnessParams(system, cert, n, args.variant, args.mode, args.baseM)
    except WitnessError as exc:
        if "certificate" in str(exc):
            raise NotCertified(str(exc)) from exc
        raise InputError(str(exc)) from exc


def cmd_cert(args) -> int:
    system = load_system(args.system)
    cert = certify(system, args.box)
    text = json.dumps(cert.to_json(), indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return EXIT_OK if cert.theorems else EXIT_NO_CERT


def cmd_build(args) -> int:
    system = load_system(args.system)
    fam = build_family(_params(args, system, args.n))
    what = args.what
    if what == "W":
        poly = fam.W()
    elif what == "R":
        poly = fam.R()
    else:
        mu = tuple(int(v) for v in args.mu.split(",")) if args.mu else system.beta.entries
        if what == "D":
            poly = fam.derivative(mu)
        else:
            poly = fam.BG(mu)[0 if what == "B" else 1]
    text = poly.dump()
    if args.dump:
        Path(args.dump).write_text(text)
        print(f"wrote {len(poly)} terms to {args.dump}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.samples < 2:
        raise InputError("--samples must be >= 2")
    if args.n_to < args.n_from:
        raise InputError("--n-to must be >= --n-from")
    system = load_system(args.system)
    params = _params(args, system, args.n_from)
    sampling = SamplingConfig(args.samples, args.seed, args.threads)
    report = sweep(params, range(args.n_from, args.n_to + 1), sampling)
    Path(args.out).write_text(report.to_csv())
    json_path = args.json or str(Path(args.out).with_suffix(".json"))
    Path(json_path).write_text(report.dumps() + "\n")
    for msg in report.failures:
        print(f"skipped: {msg}", file=sys.stderr)
    theo = report.theoretical_exponent
    if report.fit_available:
        f = report.fitted_exponent
        print(f"fitted exponent {f.slope:.4f} (95% CI {f.ci[0]:.4f}..{f.ci[1]:.4f}), "
              f"theoretical {theo}")
    else:
        print(f"fit unavailable ({len(report.records)} records), theoretical {theo}")
    if not report.records and report.failures:
        return EXIT_CAP
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest()
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status} {r.name} ({r.seconds:.2f}s){': ' + r.message if r.message else ''}")
    return EXIT_OK if all(r.ok for r in results) else 1


def _witness_flags(p):
    p.add_argument("--variant", choices=["T1", "T2"], default="T2")
    p.add_argument("--mode", choices=["native", "scaled"], default="native")
    p.add_argument("--baseM", type=int, default=None, help="growth base in scaled mode")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ornstein", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cert", help="search Lambda/Gamma/eps certificates")
    p.add_argument("system")
    p.add_argument("--box", type=int, default=DEFAULT_BOX)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_cert)

    p = sub.add_parser("build", help="build a witness polynomial and dump it")
    p.add_argument("system")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--box", type=int, default=DEFAULT_BOX)
    _witness_flags(p)
    p.add_argument("--what", choices=["W", "R", "D", "B", "G"], default="W")
    p.add_argument("--mu", help="comma-separated multi-index for D/B/G (default beta)")
    p.add_argument("--dump")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sweep", help="norm estimates and exponent fits over a range of n")
    p.add_argument("system")
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--box", type=int, default=DEFAULT_BOX)
    _witness_flags(p)
    p.add_argument("--out", required=True, help="CSV path")
    p.add_argument("--json", help="JSON path (default: CSV path with .json)")
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selftest", help="run the invariant suite")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotCertified as exc:
        print(f"no certificate: {exc}", file=sys.stderr)
        return EXIT_NO_CERT
    except ExpansionCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
