"""Command-line front end: ``pivot-kit {pivots,trace,verify,model}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import mpmath

from .farey import parse_slope, sb_key
from .halfplane import parse_end_invariant
from .markov import PrecisionError, oracle_traces, parse_triple, spectrum, spectrum_depths, vertex_trace
from .mobius import complex_length, omega
from .model import combinatorial_data, dumps, export_model
from .pivot import DiagonalInput, InsufficientPrecision, compare, pivot_sequence, predict
from .verify import (
    PaperConstants, constants_suite, custom_scenario, fuchsian_suite, identity_suite, parse_scenario,
    pivot_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DIAGONAL = 0, 1, 2, 3
PRECISION_ENV = "PIVOTKIT_PRECISION"


class UsageError(Exception):
    """Bad user input (exit 2)."""


@dataclass
class RunConfig:
    precision: int = 53
    window: int = 8
    depth: int = 3
    seed: int = 0
    constants: PaperConstants = field(default_factory=PaperConstants)
    fmt: str = "json"
    output: str | None = None

    def __post_init__(self):
        if self.window < 1 or self.depth < 1:
            raise UsageError("window and depth must be at least 1")
        if not 53 <= self.precision <= 4096:
            raise UsageError("precision must be between 53 and 4096 bits")


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return 53
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from None


def _pair(z):
    if isinstance(z, str):
        return z
    if isinstance(z, mpmath.mpc) and not mpmath.isinf(z) and abs(z) > 1e300:
        return [str(z.real), str(z.imag)]
    z = complex(z)
    if math.isinf(z.imag):
        return "inf"
    return [z.real, z.imag]


def _emit(cfg: RunConfig, doc, rows=None, header=None) -> None:
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parts(v):
    if isinstance(v, list):
        return v[0], v[1]
    return v, v


def _invariants(args):
    try:
        return parse_end_invariant(args.nu_minus), parse_end_invariant(args.nu_plus)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse end invariant: {exc}") from exc


def _triple(text):
    try:
        return parse_triple(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse triple: {exc}") from exc


# -- commands -----------------------------------------------------------------------------


def cmd_pivots(args, cfg: RunConfig) -> int:
    nm, np_ = _invariants(args)
    seq = pivot_sequence(nm, np_, cfg.window)
    k = cfg.constants
    preds = predict(seq, nm, np_, k.c2, k.c3, k.c4)
    records = {}
    if args.triple:
        for r in compare(_triple(args.triple), seq, preds, cfg.precision)["records"]:
            records[r["index"]] = r
    out = []
    for p in preds:
        rec = {
            "index": p.index,
            "slope": str(p.slope),
            "width": p.width,
            "kind": seq.kind(p.index),
            "omega_hat": _pair(p.omega_hat),
            "internal_hat": None if p.internal_hat is None else _pair(p.internal_hat),
            "ell_bounds": p.ell_bounds,
            "inv_theta_bounds": p.inv_theta_bounds,
            "flags": sorted(set(p.flags) | set(seq.flags.get(p.index, ()))),
        }
        if p.index in records:
            r = records[p.index]
            rec.update(omega_actual=r["omega_actual"], lambda_actual=r["lambda_actual"],
                       h2_distance=r["h2_distance"], flags=sorted(set(rec["flags"]) | set(r["flags"])))
        out.append(rec)
    doc = {
        "alpha_minus": str(seq.alpha_minus),
        "alpha_plus": str(seq.alpha_plus),
        "case": seq.case,
        "window": seq.window,
        "pivots": out,
    }
    rows = []
    for rec in out:
        act = rec.get("omega_actual", rec["omega_hat"])
        re_, im_ = _parts(act)
        rows.append([rec["index"], rec["slope"], rec["width"], re_, im_, rec.get("h2_distance", "")])
    _emit(cfg, doc, rows, ["n", "slope", "w", "re_omega", "im_omega", "h2_distance"])
    return EXIT_OK


def cmd_trace(args, cfg: RunConfig) -> int:
    t = _triple(args.triple)
    if args.slope:
        try:
            slopes = [parse_slope(s) for s in args.slope]
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        traces = {s: vertex_trace(t, s, cfg.precision) for s in slopes}
    else:
        depths = spectrum_depths(cfg.depth)
        traces = spectrum(t, cfg.depth, cfg.precision)
        slopes = sorted(traces, key=lambda s: (depths[s], sb_key(s)))
    refs = oracle_traces(t, slopes) if args.oracle else {}
    rows, out = [], []
    for s in slopes:
        tr = traces[s]
        lam = complex_length(tr, cfg.precision)
        rec = {"slope": str(s), "trace": _pair(tr), "lambda": [float(lam.ell), float(lam.theta)],
               "omega": _pair(omega(lam))}
        if args.oracle:
            ref = mpmath.mpc(refs[s])
            rel = float(abs(mpmath.mpc(tr) - ref) / max(1, abs(ref)))
            rec.update(oracle=_pair(ref), oracle_rel_diff=rel)
        out.append(rec)
        rows.append([rec["slope"], *_parts(rec["trace"]), *rec["lambda"], *_parts(rec["omega"]),
                     rec.get("oracle_rel_diff", "")])
    _emit(cfg, {"triple": str(args.triple), "rows": out}, rows,
          ["slope", "re_trace", "im_trace", "ell", "theta", "re_omega", "im_omega", "oracle_rel_diff"])
    if args.oracle and any(r["oracle_rel_diff"] > 1e-6 for r in out):
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    if args.suite == "constants":
        rep = constants_suite(cfg.constants)
    elif args.suite == "identities":
        rep = identity_suite(args.n, cfg.seed, cfg.precision)
    elif args.suite == "fuchsian":
        rep = fuchsian_suite(args.samples, args.depth or 12, cfg.seed)
    else:
        if args.triple:
            nm = parse_end_invariant(args.nu_minus) if args.nu_minus else None
            np_ = parse_end_invariant(args.nu_plus) if args.nu_plus else None
            sc = custom_scenario(_triple(args.triple), nm, np_, cfg.precision)
        else:
            try:
                sc = parse_scenario(args.scenario)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        rep = pivot_suite(sc, cfg.window, args.depth or 10, cfg.constants)
    doc = rep.to_json()
    rows = [[c["name"], json.dumps(c["value"]), json.dumps(c["tolerance"]), c["passed"], c["report_only"]]
            for c in doc["checks"]]
    _emit(cfg, doc, rows, ["check", "value", "tolerance", "passed", "report_only"])
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_model(args, cfg: RunConfig) -> int:
    nm, np_ = _invariants(args)
    seq = pivot_sequence(nm, np_, cfg.window)
    preds = predict(seq, nm, np_)
    doc = export_model(combinatorial_data(seq, nm, np_), seq, preds, nm, np_)
    rows = []
    for b in doc["blocks"]:
        tube = b["tube"] or {}
        rows.append([b["n"], b["kind"], b["width"], *_parts(b["tau"]),
                     tube.get("ell", ""), tube.get("theta", ""), tube.get("r", "")])
    if cfg.fmt == "json":
        text = dumps(doc) + "\n"
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    _emit(cfg, doc, rows, ["n", "kind", "w", "re_tau", "im_tau", "ell", "theta", "r"])
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--precision", type=int, default=None,
                        help=f"significand bits (default from ${PRECISION_ENV} or 53)")
    common.add_argument("--window", type=int, default=8)
    common.add_argument("--seed", type=int, default=0)
    for name in ("eps", "c1", "c2", "c3", "c4"):
        common.add_argument(f"--{name}", type=float, default=None, help=f"override the constant {name}")

    p = argparse.ArgumentParser(prog="pivot-kit", description="Farey pivot sequences and their predictions.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pivots", parents=[common], help="pivot sequence, widths and predictions")
    sp.add_argument("--nu-minus", required=True)
    sp.add_argument("--nu-plus", required=True)
    sp.add_argument("--triple", help="compare against this Markov triple")
    sp.set_defaults(func=cmd_pivots)

    st = sub.add_parser("trace", parents=[common], help="traces, complex lengths and omega")
    st.add_argument("--triple", required=True)
    g = st.add_mutually_exclusive_group()
    g.add_argument("--slope", action="append")
    g.add_argument("--depth", type=int, default=3)
    st.add_argument("--oracle", action="store_true", help="also compute explicit matrix-word traces")
    st.set_defaults(func=cmd_trace)

    sv = sub.add_parser("verify", parents=[common], help="run a verification suite")
    sv.add_argument("suite", choices=("constants", "identities", "fuchsian", "pivots"))
    sv.add_argument("-n", type=int, default=1000, help="random pairs (identities)")
    sv.add_argument("--samples", type=int, default=200, help="Fuchsian samples")
    sv.add_argument("--depth", type=int, default=None)
    sv.add_argument("--scenario", default="modular",
                    help='modular | maskit[=y] | monodromy[="D(inf)^1 D(0)^-1"] | fuchsian=x,y[,branch]')
    sv.add_argument("--triple", help="custom scenario triple")
    sv.add_argument("--nu-minus")
    sv.add_argument("--nu-plus")
    sv.set_defaults(func=cmd_verify)

    sm = sub.add_parser("model", parents=[common], help="export the model-manifold document")
    sm.add_argument("--nu-minus", required=True)
    sm.add_argument("--nu-plus", required=True)
    sm.set_defaults(func=cmd_model)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {k: getattr(args, k) for k in ("eps", "c1", "c2", "c3", "c4") if getattr(args, k) is not None}
        cfg = RunConfig(
            precision=args.precision if args.precision is not None else _default_precision(),
            window=args.window,
            depth=getattr(args, "depth", None) or 3,
            seed=args.seed,
            constants=PaperConstants(**overrides),
            fmt=args.format,
            output=args.output,
        )
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DiagonalInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGONAL
    except PrecisionError as exc:
        print(f"error: {exc}; rerun with a larger --precision (at most 4096)", file=sys.stderr)
        return EXIT_FAIL
    except InsufficientPrecision as exc:
        print(f"error: {exc}; supply more continued-fraction terms or a smaller --window", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
