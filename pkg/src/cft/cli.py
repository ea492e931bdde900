"""Command-line front end: certificates in, JSON reports out.

Every subcommand builds a deterministic report (fixed key order, all
numbers as strings) and exits 0 only when every verification in the run
passed; verification failures exit 1 with the failing certificate
embedded, usage problems exit 2.  Timing lives in its own section and is
the only part of a report allowed to differ between identical runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from mpmath import mp

from . import __version__
from .acceptance import run_all
from .cm import (
    FrickeValue,
    JValue,
    Product,
    SiegelPower,
    cm_conjugates,
    enumerate_W,
    imag_quad,
    integrality_probe,
    normal_element_cm,
    verify_norm_tower,
    verify_trace_tower,
)
from .cyclotomic import CycElem, euler_phi
from .errors import CftError, DegenerateExtension, UnsupportedDiscriminant
from .modfunc import (
    DEFAULT_DPS,
    FracIndex,
    check_ptog_both,
    eisenstein,
    eta,
    fm_func,
    fricke_f,
    siegel_g,
    wp_value,
)
from .norm_gen import build_norm_element, tower_from_generator_lists
from .normal_elem import build_normal_element
from .trace_gen import build_trace_generator

USAGE_ERROR = 2
VERIFICATION_ERROR = 1


def _mpc_json(value, prec):
    with mp.workdps(prec):
        return {"re": mp.nstr(mp.re(value), prec), "im": mp.nstr(mp.im(value), prec)}


def _parse_tau(text, prec):
    try:
        re_s, im_s = text.split(",")
        with mp.workdps(prec + 10):
            return mp.mpc(mp.mpf(re_s), mp.mpf(im_s))
    except ValueError as exc:
        raise SystemExit("invalid --tau %r: expected RE,IM" % text) from exc


def _parse_index(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise SystemExit("invalid --index %r: expected a,b,N" % text)
    return FracIndex(int(parts[0]), int(parts[1]), int(parts[2]))


def _parse_int_list(text):
    return [int(p) for p in text.split(",") if p.strip() != ""]


def _read_config(path):
    config = {}
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit("bad config line: %r" % line)
            key, value = line.split("=", 1)
            config[key.strip()] = value.strip()
    return config


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=None,
                        help="decimal digits (default 128, or CFT_PRECISION)")
    common.add_argument("--config", default=None,
                        help="key=value file; recognized key: precision")
    common.add_argument("--json", dest="json_path", default=None,
                        help="write the full JSON report to this path")

    parser = argparse.ArgumentParser(
        prog="cft",
        description="exact and high-precision verification of class-field "
        "constructions (trace/norm generators, normal elements, modular "
        "function values at CM points)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace-gen", parents=[common],
                       help="universal trace generator over Q(zeta_m)")
    p.add_argument("--conductor", type=int, required=True)
    p.add_argument("--raw-budget", action="store_true",
                   help="use the full budget instead of its radical")

    p = sub.add_parser("norm-gen", parents=[common],
                       help="universal norm generator along a tower")
    p.add_argument("--conductor", type=int, required=True)
    p.add_argument("--tower", required=True,
                   help="subgroup chain as generator lists, e.g. '2/4/1' "
                        "(groups split by /, generators by ,)")
    p.add_argument("--n-set", default="1,2,3")

    p = sub.add_parser("normal-element", parents=[common],
                       help="normal element for Q(zeta_m)/Q")
    p.add_argument("--conductor", type=int, required=True)
    p.add_argument("--alpha-coeffs", default=None,
                   help="power-basis coordinates p/q,... overriding zeta_m")

    p = sub.add_parser("modfun", parents=[common],
                       help="evaluate one modular function")
    p.add_argument("--fn", required=True,
                   choices=["eta", "siegel", "wp", "fricke", "fm", "j", "ptog"])
    p.add_argument("--tau", required=True, help="RE,IM")
    p.add_argument("--index", default=None, help="a,b,N")
    p.add_argument("--index2", default=None, help="second index for ptog")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--normalization", choices=["classical", "paper"],
                   default="classical")

    p = sub.add_parser("cm", parents=[common],
                       help="imaginary quadratic verifications")
    p.add_argument("mode", choices=["degrees", "conjugates", "thm36", "rama",
                                    "normal", "probe"])
    p.add_argument("--dk", type=int, default=-7)
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--levels", default="3,9", help="tower levels for rama")
    p.add_argument("--n-set", default="1,2")
    p.add_argument("--fn", default="siegel12N",
                   choices=["siegel12N", "fricke", "j", "n-over-siegel12N"])
    p.add_argument("--index", default=None, help="a,b (level comes from --level)")
    p.add_argument("--power-multiple", type=int, default=1,
                   help="extra exponent multiple for siegel12N")

    p = sub.add_parser("verify-all", parents=[common],
                       help="run the acceptance suite")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")

    return parser


def _resolve_precision(args) -> int:
    if args.prec is not None:
        return args.prec
    if args.config:
        config = _read_config(args.config)
        if "precision" in config:
            return int(config["precision"])
    env = os.environ.get("CFT_PRECISION")
    if env:
        return int(env)
    return DEFAULT_DPS


def _cm_expression(args, level):
    if args.fn == "j":
        return JValue(), 1
    if args.index:
        a, b = (int(x) for x in args.index.split(","))
    else:
        a, b = 0, 1
    idx = FracIndex(a, b, level)
    if args.fn == "fricke":
        return FrickeValue(idx), level
    power = 12 * level * args.power_multiple
    if args.fn == "siegel12N":
        return SiegelPower(idx, power), level
    # N * g^{-1}, raised to the 12N-th power: integral by construction
    return Product((SiegelPower(idx, -power),),
                   Fraction(level) ** power), level


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = list(argv) if argv is not None else list(sys.argv[1:])
    prec = _resolve_precision(args)
    if args.command == "cm" and prec < 32:
        parser.error("CM subcommands need --prec >= 32")

    started = time.time()
    report_body = {}
    passed = True
    try:
        if args.command == "trace-gen":
            cert = build_trace_generator(args.conductor,
                                         use_radical=not args.raw_budget)
            report_body = cert.to_json()
            passed = cert.passed

        elif args.command == "norm-gen":
            gen_lists = [
                _parse_int_list(part) for part in args.tower.split("/")
            ]
            tower = tower_from_generator_lists(args.conductor, gen_lists)
            n_set = tuple(_parse_int_list(args.n_set))
            cert = build_norm_element(tower, n_set)
            report_body = cert.to_json()
            passed = cert.passed

        elif args.command == "normal-element":
            m = args.conductor
            if args.alpha_coeffs:
                coeffs = tuple(Fraction(c) for c in args.alpha_coeffs.split(","))
                if len(coeffs) != euler_phi(m):
                    raise SystemExit(
                        "--alpha-coeffs needs %d entries" % euler_phi(m)
                    )
                alpha = CycElem(m, coeffs)
            else:
                alpha = CycElem.zeta(m)
            cert = build_normal_element(alpha, m)
            report_body = cert.to_json()
            passed = cert.passed

        elif args.command == "modfun":
            report_body, passed = _run_modfun(args, prec)

        elif args.command == "cm":
            report_body, passed = _run_cm(args, prec)

        elif args.command == "verify-all":
            numbers = set(_parse_int_list(args.only)) if args.only else None
            results = run_all(numbers, progress=print)
            passed = all(r.passed for r in results)
            report_body = {
                "criteria": [
                    {
                        "number": r.number,
                        "name": r.name,
                        "passed": r.passed,
                        "details": r.details,
                    }
                    for r in results
                ]
            }
    except (DegenerateExtension, UnsupportedDiscriminant, ValueError) as exc:
        parser.exit(USAGE_ERROR, "error: %s\n" % exc)
    except CftError as exc:
        report = _assemble(args, prec, {"error": str(exc)}, False, started)
        _emit(report, args)
        print("verification failed: %s" % exc, file=sys.stderr)
        return VERIFICATION_ERROR

    report = _assemble(args, prec, report_body, passed, started)
    _emit(report, args)
    return 0 if passed else VERIFICATION_ERROR


def _run_modfun(args, prec):
    tau = _parse_tau(args.tau, prec)
    fn = args.fn
    if fn == "eta":
        value = eta(tau, prec, args.normalization)
        return {"fn": "eta", "normalization": args.normalization,
                "value": _mpc_json(value, prec)}, True
    if fn == "j":
        return {"fn": "j", "value": _mpc_json(eisenstein(tau, prec).j, prec)}, True
    if fn == "fm":
        value = fm_func(args.p, args.m, tau, prec)
        return {"fn": "fm", "p": args.p, "m": args.m,
                "value": _mpc_json(value, prec)}, True
    if fn == "ptog":
        if not (args.index and args.index2):
            raise SystemExit("ptog needs --index and --index2")
        out = check_ptog_both(_parse_index(args.index),
                              _parse_index(args.index2), tau, prec)
        certified = out.pop("certified")
        report = {
            "fn": "ptog",
            "residuals": {k: mp.nstr(v, 8) for k, v in out.items()},
            "certified_normalization": certified,
        }
        return report, certified is not None
    if not args.index:
        raise SystemExit("--fn %s needs --index a,b,N" % fn)
    idx = _parse_index(args.index)
    func = {"siegel": siegel_g, "wp": wp_value, "fricke": fricke_f}[fn]
    value = func(idx, tau, prec)
    return {"fn": fn, "index": [idx.a, idx.b, idx.N],
            "value": _mpc_json(value, prec)}, True


def _run_cm(args, prec):
    K = imag_quad(args.dk)
    mode = args.mode
    if mode == "degrees":
        wg = enumerate_W(K, args.level)
        return {"mode": "degrees", "d_K": K.d_K, "level": args.level,
                "order": wg.order, "quotient": wg.quotient_order}, True
    if mode == "conjugates":
        expr, level = _cm_expression(args, args.level)
        values = cm_conjugates(expr, K, args.level, prec=prec)
        return {
            "mode": "conjugates",
            "d_K": K.d_K,
            "level": args.level,
            "fn": args.fn,
            "count": len(values),
            "values": [_mpc_json(v, prec) for v in values],
        }, True
    if mode == "thm36":
        report = verify_trace_tower(K, args.p, args.n, prec)
        return report, report["passed"]
    if mode == "rama":
        levels = _parse_int_list(args.levels)
        n_set = tuple(_parse_int_list(args.n_set))
        report = verify_norm_tower(K, levels, n_set, prec)
        return report, report["passed"]
    if mode == "normal":
        report = normal_element_cm(K, args.level, prec)
        return report, report["passed"]
    # probe
    expr, level = _cm_expression(args, args.level)
    factory = lambda K_: (expr, level)
    report = integrality_probe(factory, [K.d_K], prec)
    return report, report["passed"]


def _assemble(args, prec, body, passed, started):
    # the output path is delivery, not configuration; keep it out so that
    # identical runs produce identical certificate bytes
    argv = list(args._argv)
    if "--json" in argv:
        at = argv.index("--json")
        argv = argv[:at] + argv[at + 2:]
    config = {
        "command": args.command,
        "precision": prec,
        "argv": argv,
    }
    return {
        "tool": "cft",
        "version": __version__,
        "config": config,
        "report": body,
        "passed": bool(passed),
        "timings": {"total_s": "%.3f" % (time.time() - started)},
    }


def _emit(report, args):
    text = json.dumps(report, indent=2)
    if args.json_path:
        with open(args.json_path, "w") as handle:
            handle.write(text + "\n")
        print("report written to %s (passed=%s)" % (args.json_path, report["passed"]))
    else:
        print(text)


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
