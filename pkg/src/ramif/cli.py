"""Command-line entry point.  Every command is a thin wrapper over the library."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import codec, harness
from .dilatation import GUARD_ENV, as_member, model_for, oracle_charform
from .errors import RamifError
from .forms import DiffForm, charform_omega, omega_conductor, omega_fas_member
from .witt import (FDecomposedWitt, bk_conductor, charform_h1, charform_witt,
                   fsat_conductor, matsuda_conductor)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ramif", description="Conductors and characteristic forms along a divisor.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_input=True):
        p.add_argument("--char", type=int, help="expected characteristic of the input")
        if needs_input:
            p.add_argument("--input", required=True, help="JSON document ('-' for stdin)")
        p.add_argument("--precision", type=_positive, help="override the oracle's t-adic precision")
        p.add_argument("--report", help="also write the JSON result to this path")

    c = sub.add_parser("conductor", help="least level containing the input")
    c.add_argument("family", choices=("omega", "witt"))
    c.add_argument("--filtration", choices=("fsat", "matsuda", "bk"), default="fsat",
                   help="Witt filtration (default: F-saturated)")
    common(c)

    f = sub.add_parser("charform", help="characteristic form at a given level")
    f.add_argument("family", choices=("omega", "witt", "h1"))
    f.add_argument("--n", type=_positive, help="level for forms")
    f.add_argument("--r", type=_positive, help="level for Witt vectors")
    common(f)

    o = sub.add_parser("oracle", help="run the substitution oracle")
    o.add_argument("action", choices=("check",))
    o.add_argument("--n", "--r", dest="n", type=_positive, required=True, help="level")
    common(o)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=harness.SUITES + ("precision",))
    v.add_argument("--char", type=int, action="append", help="restrict to this characteristic (repeatable)")
    v.add_argument("--dim", type=int, action="append", help="restrict to this dimension (repeatable)")
    v.add_argument("--degree", type=int, action="append", help="restrict to this form degree (repeatable)")
    v.add_argument("--witt-length", type=int, action="append", help="Witt length (repeatable)")
    v.add_argument("--max-n", type=_positive, help="highest level n (or r) to test")
    v.add_argument("--trials", type=_nonneg, help="seeded random samples per grid point")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--workers", type=_positive, default=1)
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--timing", action="store_true", help="include wall time in the report")
    return ap


def _read(path):
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _emit(text, report):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if report:
        with open(report, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _as_decomposition(value) -> FDecomposedWitt:
    return value if isinstance(value, FDecomposedWitt) else FDecomposedWitt({0: value})


def _cmd_conductor(args):
    if args.family == "omega":
        w = codec.loads(_read(args.input), args.char, "form")
        c = omega_conductor(w, w.space.ring.char)
    else:
        a = codec.loads(_read(args.input), args.char, ("witt", "fwitt"))
        if isinstance(a, FDecomposedWitt):
            a = a.recombine()
        if args.filtration == "matsuda":
            c = matsuda_conductor(a)
        elif args.filtration == "bk":
            c = bk_conductor(a)
        else:
            c = fsat_conductor(a, args.precision)
    _emit(str(c), args.report)
    return EXIT_OK


def _cmd_charform(args):
    if args.family == "omega":
        if args.n is None:
            raise InputError("charform omega needs --n")
        w = codec.loads(_read(args.input), args.char, "form")
        ring = w.space.ring
        cf = charform_omega(w, args.n, ring.char)
    else:
        if args.r is None:
            raise InputError(f"charform {args.family} needs --r")
        x = _as_decomposition(codec.loads(_read(args.input), args.char, ("witt", "fwitt")))
        ring = x.ring
        cf = charform_witt(x, args.r)
        if args.family == "h1":
            cf = charform_h1(cf)
    _emit(codec.dumps(codec.encode(cf, ring)), args.report)
    return EXIT_OK


def _cmd_oracle(args):
    a = codec.loads(_read(args.input), args.char, ("form", "witt", "fwitt"))
    if isinstance(a, FDecomposedWitt):
        a = a.recombine()
    ring = a.space.ring if isinstance(a, DiffForm) else a.ring
    model = model_for(a, args.n, args.precision)
    member = as_member(model, a)
    out = {"level": args.n, "precision": model.precision, "member": member}
    agree = True
    if isinstance(a, DiffForm):
        closed = omega_fas_member(a, args.n, ring.char)
        out["closed_form_member"] = closed
        agree = closed == member
    if member and args.n >= 2:
        cf = oracle_charform(model, a)
        out["charform"] = codec.encode(cf, ring)["value"]
        if isinstance(a, DiffForm):
            same = cf == charform_omega(a, args.n, ring.char)
            out["closed_form_charform_agrees"] = same
            agree = agree and same
    _emit(codec.dumps(out), args.report)
    return EXIT_OK if agree else EXIT_MISMATCH


def _suite_params(args):
    suite = args.suite
    params = {}
    if args.char:
        params["p"] = args.char
    if args.dim:
        if suite in ("fas", "charform", "kernel", "topforms"):
            params["d"] = args.dim
        elif suite == "witt":
            params["d"] = max(args.dim)
        else:
            raise InputError(f"suite {suite} has a fixed dimension")
    if args.degree:
        if suite not in ("fas", "charform", "kernel", "topforms"):
            raise InputError(f"suite {suite} takes no --degree")
        params["j"] = args.degree
    if args.witt_length:
        params["witt_length"] = args.witt_length
    if args.max_n is not None:
        key = {"witt": "r"}.get(suite, "n")
        if key not in harness.DEFAULTS[suite]:
            raise InputError(f"suite {suite} takes no --max-n")
        lo = harness.DEFAULTS[suite][key][0]
        if args.max_n < lo:
            raise InputError(f"--max-n must be >= {lo} for suite {suite}")
        params[key] = [lo, args.max_n]
    if args.trials is not None:
        params["trials"] = args.trials
    return params


def _cmd_verify(args):
    if args.suite == "precision":
        report = harness.precision_spot_checks(args.seed, 50 if args.trials is None else args.trials)
    else:
        try:
            params = _suite_params(args)
            report = harness.run_suite(args.suite, params, args.seed, args.workers)
        except harness.ParamError as e:
            raise InputError(str(e)) from None
    text = report.to_json(include_timing=args.timing)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    status = "PASS" if report.ok else "FAIL"
    print(f"{status} {report.suite}: {report.passed}/{report.attempted} checks agree (seed {report.seed})")
    for f in report.failures[:10]:
        print(f"  {f['case']} {f['check']} {json.dumps(f['args'], sort_keys=True)}")
    return EXIT_OK if report.ok else EXIT_MISMATCH


COMMANDS = {"conductor": _cmd_conductor, "charform": _cmd_charform, "oracle": _cmd_oracle,
            "verify": _cmd_verify}


def main(argv=None) -> int:
    try:
        guard = os.environ.get(GUARD_ENV)
        if guard is not None and not guard.lstrip("-").isdigit():
            raise InputError(f"{GUARD_ENV} must be an integer")
        args = build_parser().parse_args(argv)
        if getattr(args, "char", None) is not None and args.command != "verify" and args.char < 0:
            raise InputError("--char must be 0 or a prime")
        return COMMANDS[args.command](args)
    except (InputError, RamifError, ValueError) as e:
        print(f"ramif: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT
