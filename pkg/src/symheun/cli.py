"""Command line front end.

Exit codes: 0 success, 1 usage, 2 bad input, 3 numerical failure,
4 failed self-check.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import fileio
from .checks import run_checks
from .core import (
    CanonicalParams,
    FuchsianParams,
    SymmetricHeunParams,
    cross_ratio,
    elementary_symmetric,
    is_circular,
)
from .errors import NumericalFailure
from .evaluate import FrameEvaluator
from .fileio import InputError, dumps, enc, params_to_dict, write_csv
from .mobius import Dilate, GeneratorChain, Invert, MobiusMap, Translate, apply_map, canonicalize
from .series import ENGINES, erratum_report, laurent_solution, taylor_coefficients
from .spectral import (
    Contour,
    Disk,
    EndpointData,
    Interval,
    find_eigenvalues,
    orthogonality_integral,
    real_line_frame,
)
from .transform import StandardHeunParams, nu_transform, reduce_standard

EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC, EXIT_CHECK = 1, 2, 3, 4
SERIES_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- argument types


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _complex(text):
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're' or 're,im', got {text!r}")


def _complex_list(text):
    return [_complex(p) for p in text.split(";") if p.strip()]


def _floats(n):
    def conv(text):
        try:
            v = [float(p) for p in text.split(",")]
        except ValueError:
            v = []
        if len(v) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        return v
    return conv


def _ends(text):
    try:
        i, j = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'i,j', got {text!r}") from None
    if not (1 <= i <= 4 and 1 <= j <= 4 and i != j):
        raise argparse.ArgumentTypeError("labels must be distinct and in 1..4")
    return i, j


# ---------------------------------------------------------------- helpers


def to_canonical(params):
    """Canonical parameters for any supported input kind."""
    if isinstance(params, CanonicalParams):
        return params
    if isinstance(params, SymmetricHeunParams):
        return canonicalize(params)[0]
    if isinstance(params, FuchsianParams):
        return canonicalize(nu_transform(params)[0])[0]
    if isinstance(params, StandardHeunParams):
        return reduce_standard(params).canonical
    raise InputError(f"unsupported parameters {type(params).__name__}")


def _map_dict(M: MobiusMap) -> list:
    return [enc(M.m11), enc(M.m12), enc(M.m21), enc(M.m22)]


def _chain_list(chain: GeneratorChain) -> list:
    out = []
    for g in chain:
        if isinstance(g, Translate):
            out.append({"op": "translate", "zeta": enc(g.zeta)})
        elif isinstance(g, Dilate):
            out.append({"op": "dilate", "t": enc(g.t)})
        elif isinstance(g, Invert):
            out.append({"op": "invert"})
    return out


def _sigma_report(sym: SymmetricHeunParams, chain: GeneratorChain) -> dict:
    M = chain.compose()
    images = [complex(apply_map(M, z)) for z in sym.points.z]
    return {"images": [enc(w) for w in images], "sigma": [enc(s) for s in elementary_symmetric(images)]}


def conversion_report(params) -> tuple[CanonicalParams, dict]:
    """Canonical parameters and a JSON-ready description of how they were reached."""
    report: dict = {"input_kind": params_to_dict(params)["kind"]}
    if isinstance(params, StandardHeunParams):
        red = reduce_standard(params)
        can, chain, sym = red.canonical, red.chain, red.symmetric
        report["relocation"] = {"map": _map_dict(red.relocation),
                                "points": [enc(w) for w in red.fuchsian.points.z]}
        report["fuchsian"] = params_to_dict(red.fuchsian)
        report["prefactor"] = {"nu": [enc(v) for v in red.prefactor.nu.nu], "anchor": enc(red.prefactor.anchor)}
        report["symmetric"] = params_to_dict(sym)
        report["to_canonical"] = _map_dict(red.to_canonical)
    elif isinstance(params, FuchsianParams):
        sym, pf = nu_transform(params)
        can, chain = canonicalize(sym)
        report["prefactor"] = {"nu": [enc(v) for v in pf.nu.nu], "anchor": enc(pf.anchor)}
        report["symmetric"] = params_to_dict(sym)
    elif isinstance(params, SymmetricHeunParams):
        sym = params
        can, chain = canonicalize(sym)
    else:
        can, chain, sym = params, GeneratorChain(), params.to_symmetric()
    report["cross_ratio"] = enc(cross_ratio(sym.points.z))
    report["is_circular"] = bool(is_circular(sym.points.z))
    report["phi"] = enc(can.phi)
    report["chi"] = [enc(c) for c in can.chi]
    report["lam"] = enc(can.lam)
    report["generator_chain"] = _chain_list(chain)
    report.update(_sigma_report(sym, chain))
    return can, report


def _emit(text: str, path):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _summary(obj, args):
    """Summary JSON: to ``--summary``, else stdout when the table went to a file, else stderr."""
    text = dumps(obj)
    if args.summary:
        _emit(text, args.summary)
    elif args.out and args.out != "-":
        sys.stdout.write(text)
    else:
        sys.stderr.write(text)


def _load(args, required=True):
    if args.params is None:
        if required:
            raise UsageError("--params is required")
        return None
    return fileio.load_params(args.params)


def _contour(can, args):
    i, j = args.ends
    z = can.points.z
    return Contour(can, (z[i - 1], *args.via, z[j - 1]))


def _endpoints(args):
    i, j = args.ends
    return EndpointData(i, offset=args.offset), EndpointData(j, offset=args.offset)


def _region(can, contour, args):
    if args.disk is not None:
        cx, cy, r = args.disk
        if r <= 0:
            raise UsageError("--disk radius must be positive")
        return Disk(complex(cx, cy), r)
    lo, hi = args.interval
    if not hi > lo:
        raise UsageError("--interval needs lo < hi")
    frame = real_line_frame(can, contour) if args.frame == "real" else None
    return Interval(lo, hi, frame, args.step)


# ---------------------------------------------------------------- commands


def cmd_convert(args):
    params = _load(args)
    can, report = conversion_report(params)
    out = params_to_dict(can)
    out["report"] = report
    _emit(dumps(out), args.out)
    return 0


def cmd_eval(args):
    params = _load(args)
    if args.points is None:
        raise UsageError("--points is required")
    pts = fileio.read_points(args.points)
    engine = "oracle" if args.engine == "both" else args.engine
    ev = FrameEvaluator(params, args.init, args.tol, args.max_terms, engine)
    workers = args.workers if args.workers else min(4, os.cpu_count() or 1)
    rows, failed = [], []
    for z, v in ev.evaluate(pts, workers=workers):
        if isinstance(v, Exception):
            failed.append((z, v))
            rows.append([z.real, z.imag] + [math.nan] * 6)
        else:
            rows.append([z.real, z.imag, v["F"].real, v["F"].imag, v["dF"].real, v["dF"].imag,
                         v["tail"], v["residual"]])
    _emit(write_csv(None, fileio.VALUE_HEADER, rows), args.out)
    for z, err in failed:
        print(f"point {z.real:.17g},{z.imag:.17g}: {type(err).__name__}: {err}", file=sys.stderr)
    return EXIT_NUMERIC if failed else 0


def cmd_series(args):
    can = to_canonical(_load(args))
    n = args.n
    engines = ENGINES if args.engine == "both" else (args.engine,)
    coeffs = {e: taylor_coefficients(can, args.init, n, e).coeffs for e in engines}
    header = ["n"]
    for e in engines:
        header += [f"{e}_re", f"{e}_im"]
    rows = [[k] + [v for e in engines for v in (coeffs[e][k].real, coeffs[e][k].imag)] for k in range(n + 1)]
    _emit(write_csv(None, header, rows), args.out)
    summary = {"n": n, "init": [enc(c) for c in args.init], "engines": list(engines)}
    if len(engines) == 2:
        fp, fo = coeffs["paper"], coeffs["oracle"]
        disc = float(np.max(np.abs(fp - fo) / np.maximum(1.0, np.abs(fo))))
        summary["discrepancy"] = disc
        summary["warning"] = disc > SERIES_TOL
        summary["erratum"] = erratum_report(can, n, SERIES_TOL) if disc > SERIES_TOL else None
        if summary["warning"]:
            first = summary["erratum"]["first_failing"]
            print(f"warning: recurrence engines disagree (discrepancy {disc:.3g}, first failing {first}); "
                  "the oracle engine governs", file=sys.stderr)
    _summary(summary, args)
    return 0


def cmd_laurent(args):
    can = to_canonical(_load(args))
    engine = "oracle" if args.engine == "both" else args.engine
    sol = laurent_solution(can, args.init, args.n, engine)
    rows = [[k, c.real, c.imag] for k, c in enumerate(sol.coeffs)]
    _emit(write_csv(None, ["n", "re", "im"], rows), args.out)
    _summary({"n": args.n, "init": [enc(c) for c in args.init], "engine": engine,
              "expansion": "F(z) = sum_n f_n z^(-n)", "inverted_params": params_to_dict(sol.expansion_params),
              "tail_bound": float(sol.tail_bound)}, args)
    return 0


def cmd_eigen(args):
    can = to_canonical(_load(args))
    contour = _contour(can, args)
    region = _region(can, contour, args)
    res = find_eigenvalues(can, contour, _endpoints(args), region, args.count, args.tol)
    rows = []
    for k, r in enumerate(res, start=1):
        mu = math.nan if r.mu is None else r.mu
        eps = math.nan if r.eps_shift is None else r.eps_shift
        rows.append([k, r.lam.real, r.lam.imag, mu, r.defect, eps, r.iterations, r.branch.real, r.branch.imag])
    header = ["k", "lam_re", "lam_im", "mu", "defect", "eps_shift", "iterations", "branch_re", "branch_im"]
    _emit(write_csv(None, header, rows), args.out)
    return 0


def cmd_ortho(args):
    can = to_canonical(_load(args))
    contour = _contour(can, args)
    ends = _endpoints(args)
    if args.lams:
        sols = args.lams
    elif args.interval is not None or args.disk is not None:
        sols = find_eigenvalues(can, contour, ends, _region(can, contour, args), args.count, args.tol)
    else:
        raise UsageError("give --lams, or a region (--interval/--disk) to search for eigenvalues")
    lam = [s.lam if hasattr(s, "lam") else s for s in sols]
    norms = [orthogonality_integral(can, s, s, contour, ends) for s in sols]
    rows = []
    for a in range(len(sols)):
        for b in range(a + 1, len(sols)):
            v = orthogonality_integral(can, sols[a], sols[b], contour, ends)
            ratio = abs(v) / math.sqrt(abs(norms[a]) * abs(norms[b]))
            rows.append([a + 1, b + 1, lam[a].real, lam[a].imag, lam[b].real, lam[b].imag, v.real, v.imag, ratio])
    header = ["i", "j", "lam_i_re", "lam_i_im", "lam_j_re", "lam_j_im", "integral_re", "integral_im", "ratio"]
    _emit(write_csv(None, header, rows), args.out)
    return 0


def cmd_check(args):
    params = _load(args, required=False)
    can = CanonicalParams(math.pi / 4, (0, 0, 0, 0), 0) if params is None else to_canonical(params)
    results = run_checks(can, args.seed)
    lines = []
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        note = f"  ({r.note})" if r.note else ""
        lines.append(f"{tag}  {r.name}: {r.value:.3e} <= {r.threshold:.0e}{note}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if all(r.passed for r in results) else EXIT_CHECK


COMMANDS = {
    "convert": (cmd_convert, "reduce any parameter file to canonical form"),
    "eval": (cmd_eval, "evaluate a solution at the points of a CSV file"),
    "series": (cmd_series, "dump Taylor coefficients from one or both engines"),
    "laurent": (cmd_laurent, "dump the expansion about infinity"),
    "eigen": (cmd_eigen, "find two-point connection eigenvalues"),
    "ortho": (cmd_ortho, "pairwise orthogonality integrals"),
    "check": (cmd_check, "run the invariant self-check suite"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--params", metavar="FILE", help="parameter file (JSON)")
    common.add_argument("--out", metavar="FILE", help="output file (default stdout)")
    common.add_argument("--summary", metavar="FILE", help="summary JSON for series/laurent")
    common.add_argument("--tol", type=_positive, default=1e-12)
    common.add_argument("--max-terms", type=int, default=20000, dest="max_terms")
    common.add_argument("--engine", "--engines", choices=(*ENGINES, "both"), default="oracle", dest="engine")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--init", type=_complex_list, default=[1.0 + 0j, 0j],
                        help="canonical (F(0), F'(0)) as 're,im;re,im'")

    parser = _Parser(prog="symheun", description="General Heun functions in symmetric canonical form.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        if name == "eval":
            p.add_argument("--points", metavar="FILE", help="CSV with header re,im")
            p.add_argument("--workers", type=int, default=0, help="threads (0: up to 4)")
        if name in ("series", "laurent"):
            p.add_argument("--n", type=int, default=200)
        if name == "series":
            p.set_defaults(engine="both")
        if name in ("eigen", "ortho"):
            p.add_argument("--ends", type=_ends, default=(4, 1), help="singular point labels 'i,j' (default 4,1)")
            p.add_argument("--via", type=_complex_list, default=[], help="waypoints 're,im;re,im'")
            p.add_argument("--offset", type=_positive, default=1e-3, help="Frobenius detachment offset")
            p.add_argument("--interval", type=_floats(2), help="'lo,hi' scanned on a grid")
            p.add_argument("--frame", choices=("real", "lambda"), default="real",
                           help="interval variable: real-frame mu or lam itself")
            p.add_argument("--step", type=_positive, default=0.1, help="grid step of the interval scan")
            p.add_argument("--disk", type=_floats(3), help="'re,im,radius'")
            p.add_argument("--count", type=int, default=2)
        if name == "ortho":
            p.add_argument("--lams", type=_complex_list, help="accessory values 're,im;re,im;...'")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if len(args.init) != 2:
            raise UsageError("--init needs two values")
        if getattr(args, "n", 1) < 0 or args.max_terms < 1:
            raise UsageError("--n and --max-terms must be positive")
        if args.command == "eigen" and args.interval is None and args.disk is None:
            raise UsageError("eigen needs --interval or --disk")
        return COMMANDS[args.command][0](args)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, ValueError, TypeError) as err:
        print(f"bad input: {err}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERIC


def run() -> None:
    sys.exit(main())
