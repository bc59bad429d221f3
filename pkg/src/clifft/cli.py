"""``clifft`` command line: transform, dist and verify.

Exit codes: 0 success, 1 verification failure, 2 malformed input or invalid distribution,
3 invalid imaginary unit.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .algebra import (
    ImaginaryUnit,
    InvalidImaginaryUnit,
    Multivector,
    Signature,
    SignatureMismatch,
    default_mu,
    parse_multivector,
)
from .probability import (
    InvalidDensity,
    characteristic_function,
    moment_direct,
    moment_from_cf,
    require_valid,
    variance,
    variance_from_cf,
)
from .transform import GridError, TransformPlan, cft_forward, cft_inverse
from .verify import IDENTITIES, UnknownIdentity, VerifyConfig, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_MU = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _signature(text: str) -> Signature:
    try:
        p, q = (int(v) for v in text.split(","))
        return Signature(p, q)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"signature must look like P,Q: {exc}") from None


def _mu(sig: Signature, text: str | None) -> ImaginaryUnit:
    try:
        value = default_mu(sig) if text is None else parse_multivector(sig, text)
        return ImaginaryUnit(value)
    except InvalidImaginaryUnit as exc:
        raise CliError(f"invalid mu: {exc}", EXIT_MU) from None
    except ValueError as exc:
        raise CliError(f"cannot parse mu {text!r}: {exc}", EXIT_MU) from None


def _emit(doc, out: str | None):
    if out:
        io.write_json(out, doc)
    else:
        sys.stdout.write(io.dumps(doc))


def cmd_transform(args) -> int:
    mu = _mu(args.signature, args.mu)
    doc = io.read_json(args.input)
    if args.inverse:
        spec = io.spectrum_from_json(doc)
        if spec.signature != args.signature:
            raise CliError(f"file signature {spec.signature} does not match --signature {args.signature}")
        method = "quadrature" if args.oracle else "fft"
        out = io.signal_to_json(cft_inverse(spec, TransformPlan(mu, "inverse", method)))
    else:
        f = io.signal_from_json(doc)
        if f.signature != args.signature:
            raise CliError(f"file signature {f.signature} does not match --signature {args.signature}")
        method = "quadrature" if args.oracle else "fft"
        out = io.spectrum_to_json(cft_forward(f, TransformPlan(mu, "forward", method)))
    _emit(out, args.out)
    return EXIT_OK


def _coeffs(mv: Multivector) -> list[float]:
    return [float(v) for v in mv.coeffs]


def cmd_dist(args) -> int:
    d = io.density_from_json(io.read_json(args.spec))
    sig = d.signature
    needs_mu = args.quantity == "cf" or args.method == "cf"
    mu = _mu(sig, args.mu) if (needs_mu or args.mu is not None) else None
    require_valid(d, unnormalized=args.unnormalized)
    doc: dict = {"signature": [sig.p, sig.q], "quantity": args.quantity}
    if args.quantity == "cf":
        t = np.linspace(-args.tmax, args.tmax, args.points)
        phi = characteristic_function(d, mu)
        doc["t"] = t.tolist()
        doc["values"] = phi(t).tolist()
    elif args.quantity == "moments":
        if args.method == "cf":
            m = moment_from_cf(characteristic_function(d, mu), args.order)
        else:
            m = moment_direct(d, args.order)
        doc.update(order=args.order, method=m.method, value=_coeffs(m.value))
    else:
        v = variance_from_cf(characteristic_function(d, mu)) if args.method == "cf" else variance(d)
        doc.update(method=args.method, value=_coeffs(v))
    _emit(doc, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    ids = list(IDENTITIES) if args.identity == "all" else [args.identity]
    if args.identity != "all" and args.identity not in IDENTITIES:
        raise CliError(f"unknown identity {args.identity!r}; choose from all, {', '.join(IDENTITIES)}")
    mu = _mu(args.signature, args.mu)
    cfg = VerifyConfig(
        signature=args.signature,
        mu=mu.value,
        n=args.samples,
        half_width=args.domain,
        seed=args.seed,
        tol=args.tol,
    )
    reports, status = run_suite(ids, cfg)
    _emit([r.to_json() for r in reports], args.out)
    for r in reports:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{mark} {r.id:<20} defect={r.defect!r} tol={r.tolerance:g}", file=sys.stderr)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clifft", description="One-dimensional Clifford Fourier transform toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="forward or inverse transform of a JSON signal/spectrum")
    t.add_argument("--signature", type=_signature, required=True)
    t.add_argument("--mu", help="imaginary unit, e.g. e12 (default: first blade squaring to -1)")
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--out")
    t.add_argument("--inverse", action="store_true")
    t.add_argument("--oracle", action="store_true", help="direct quadrature instead of FFT")
    t.set_defaults(func=cmd_transform)

    d = sub.add_parser("dist", help="characteristic function, moments or variance of a distribution JSON file")
    d.add_argument("quantity", choices=("cf", "moments", "variance"))
    d.add_argument("--spec", required=True)
    d.add_argument("--mu")
    d.add_argument("--order", type=int, default=1)
    d.add_argument("--method", choices=("direct", "cf"), default="direct")
    d.add_argument("--unnormalized", action="store_true", help="accept blades whose mass is not 1")
    d.add_argument("--tmax", type=float, default=6.0)
    d.add_argument("--points", type=int, default=121)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dist)

    v = sub.add_parser("verify", help="measure identity defects")
    v.add_argument("--identity", default="all")
    v.add_argument("--signature", type=_signature, default=Signature(3, 0))
    v.add_argument("--mu")
    v.add_argument("--samples", type=int, default=1024)
    v.add_argument("--domain", type=float, default=16.0)
    v.add_argument("--tol", type=float)
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"clifft: {exc}", file=sys.stderr)
        return exc.code
    except InvalidImaginaryUnit as exc:
        print(f"clifft: invalid mu: {exc}", file=sys.stderr)
        return EXIT_MU
    except (io.FormatError, InvalidDensity, SignatureMismatch, GridError, UnknownIdentity, OSError, ValueError) as exc:
        print(f"clifft: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
