"""Command line front end.

Exit status: 0 success, 1 internal consistency failure, 2 invalid input,
3 budget exceeded, 4 verdict rests on a heuristic zero test under --strict.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import mpmath

from . import __version__
from .algebra import parse_polynomial, conjugate_profile
from .classify import DEFAULT_NODE_BUDGET, classify_interval, classify_measure
from .entropy import DEFAULT_ATOM_BUDGET, bound_schedule
from .errors import GarsiaError, InvalidInput
from .fourier import DEFAULT_TAIL, decay_scan, parse_lambda, select_lambda
from .group import generator_count, group_info
from .measure import FiniteMeasure, zero_angles
from .vanishing import (
    charequi_check,
    interval_level_bound,
    is_complete_vanishing,
    search_vanishing,
    spectrum_support,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_BUDGET = 3
EXIT_HEURISTIC = 4

TOOL = "garsia"


class Context:
    """Parsed inputs shared by every subcommand, plus the provenance block."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.poly = None
        self.measure = None
        self.sources = {"subcommand": args.command}
        if getattr(args, "poly", None) is not None:
            self.poly = parse_polynomial(args.poly, divide_content=args.divide_content)
            self.sources["poly"] = self.poly.text()
        path = getattr(args, "measure", None)
        if path is not None:
            try:
                raw = Path(path).read_bytes()
            except OSError as exc:
                raise InvalidInput(f"cannot read measure file {path}: {exc.strerror}") from exc
            self.measure = FiniteMeasure.load(path, bits=args.bits)
            self.sources["measure_sha256"] = hashlib.sha256(raw).hexdigest()
        flags = {k: v for k, v in sorted(vars(args).items())
                 if k not in ("command", "poly", "measure", "output", "func", "threads", "csv")}
        self.sources["flags"] = flags

    @property
    def input_hash(self) -> str:
        blob = json.dumps(self.sources, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()

    def header(self) -> dict:
        return {"tool": TOOL, "version": __version__, "input_sha256": self.input_hash}


def _emit(ctx: Context, text: str) -> None:
    out = ctx.args.output
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(ctx: Context, body: dict) -> None:
    doc = {**ctx.header(), **body}
    _emit(ctx, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _csv_header(ctx: Context) -> str:
    h = ctx.header()
    return f"# tool={h['tool']} version={h['version']} input_sha256={h['input_sha256']}\n"


def _need(ctx: Context, *names: str) -> None:
    for name in names:
        if getattr(ctx, name) is None:
            raise InvalidInput(f"--{name} is required for '{ctx.args.command}'")


def _heuristic_exit(ctx: Context, heuristic: bool) -> int:
    if heuristic and ctx.args.strict:
        print("error: verdict relies on numeric zero detection (heuristic) and --strict is set", file=sys.stderr)
        return EXIT_HEURISTIC
    return EXIT_OK


# -- subcommands ------------------------------------------------------------------


def cmd_info(ctx: Context) -> int:
    _need(ctx, "poly")
    f = ctx.poly
    prof = conjugate_profile(f, precision=ctx.args.bits)
    body = {
        "polynomial": f.text(),
        "degree": f.degree,
        "M": f.M,
        "conjugates": {
            "classification": prof.classification.value,
            "mahler_measure": prof.mahler_str(),
            "mahler_exact": prof.mahler_exact,
            "mahler_error": mpmath.nstr(prof.mahler_error, 5),
            "precision_bits": prof.precision,
            "roots_of_f": [mpmath.nstr(z, 20) for z in prof.roots],
        },
        "generators_r": generator_count(f),
        "groups": [group_info(f, n) for n in range(1, ctx.args.levels + 1)],
    }
    _emit_json(ctx, body)
    return EXIT_OK


def cmd_entropy(ctx: Context) -> int:
    _need(ctx, "poly", "measure")
    sched = bound_schedule(ctx.poly, ctx.measure, ctx.args.levels, ctx.args.budget)
    if not sched.lower_valid:
        print("warning: some conjugate of beta is not outside the unit circle; lower column is not a bound",
              file=sys.stderr)
    _emit(ctx, _csv_header(ctx) + sched.to_csv())
    done = [r.n for r in sched.rows]
    if done != list(range(1, ctx.args.levels + 1)):
        missing = sorted(set(range(1, ctx.args.levels + 1)) - set(done))
        print(f"error: atom budget {ctx.args.budget} exceeded at levels {missing}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_vanishing(ctx: Context) -> int:
    _need(ctx, "poly", "measure")
    f, mu = ctx.poly, ctx.measure
    if ctx.args.level is not None:
        report = is_complete_vanishing(f, mu, ctx.args.level, full_witnesses=ctx.args.full_witnesses)
        body = {"mode": "level", "report": report.to_json()}
        _emit_json(ctx, body)
        return _heuristic_exit(ctx, report.heuristic)
    m_max = ctx.args.m_max
    level = search_vanishing(f, mu, m_max)
    if m_max is None:
        m_max = interval_level_bound(mu.interval_length, f.M)
    body = {"mode": "search", "m_max": m_max, "level": level}
    heuristic = not mu.exact
    if m_max >= 1:
        zeros = zero_angles(mu, f.M, m_max)
        body["zero_angles"] = zeros.to_json()
        heuristic = zeros.heuristic
    if level is not None:
        body["report"] = is_complete_vanishing(f, mu, level, full_witnesses=ctx.args.full_witnesses).to_json()
    _emit_json(ctx, body)
    return _heuristic_exit(ctx, heuristic)


def cmd_charequi(ctx: Context) -> int:
    _need(ctx, "poly", "measure")
    rows = [charequi_check(ctx.poly, ctx.measure, n, ctx.args.budget, strict=False)
            for n in range(1, ctx.args.levels + 1)]
    agree = all(r.agree for r in rows)
    _emit_json(ctx, {"agree": agree, "levels": [r.to_json() for r in rows]})
    if not agree:
        bad = [r.level for r in rows if not r.agree]
        print(f"error: entropy, fiber and character conditions disagree at levels {bad}", file=sys.stderr)
        return EXIT_INTERNAL
    return _heuristic_exit(ctx, any(r.heuristic for r in rows))


def cmd_classify(ctx: Context) -> int:
    _need(ctx, "poly")
    f = ctx.poly
    if ctx.args.interval is not None:
        fams = classify_interval(f, ctx.args.interval, node_budget=ctx.args.node_budget)
        _emit_json(ctx, {"mode": "interval", "support_length": ctx.args.interval,
                         "families": [x.to_json() for x in fams]})
        return EXIT_OK
    res = classify_measure(f, ctx.measure, ctx.args.m_max, node_budget=ctx.args.node_budget)
    _emit_json(ctx, {"mode": "measure", **res.to_json()})
    return _heuristic_exit(ctx, res.heuristic)


def cmd_fourier(ctx: Context) -> int:
    _need(ctx, "measure")
    a = ctx.args
    if a.lam is not None:
        lam = parse_lambda(a.lam, a.bits)
    elif ctx.poly is not None:
        lam = select_lambda(ctx.poly, a.root_index, a.bits)
    else:
        raise InvalidInput("fourier needs --poly or --lambda")
    scan = decay_scan(lam, ctx.measure, a.v_min, a.v_max, a.points, a.tail, a.bits, a.threads)
    if a.csv:
        Path(a.csv).write_text(_csv_header(ctx) + scan.to_csv())
    _emit_json(ctx, scan.to_json())
    return EXIT_OK


def cmd_spectrum(ctx: Context) -> int:
    _need(ctx, "poly", "measure")
    f, mu = ctx.poly, ctx.measure
    m = ctx.args.m
    if m is None:
        m = search_vanishing(f, mu, ctx.args.m_max)
        if m is None:
            raise InvalidInput("no complete vanishing found; pass --m explicitly")
    res = spectrum_support(f, mu, ctx.args.level, m, ctx.args.threshold, ctx.args.budget)
    _emit_json(ctx, res.to_json())
    return _heuristic_exit(ctx, not mu.exact)


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", help='coefficients of f, highest degree first, e.g. "3,4,3,5"')
    common.add_argument("--measure", help="measure JSON file")
    common.add_argument("--bits", type=int, default=256, help="working precision for numeric weights")
    common.add_argument("--budget", type=int, default=DEFAULT_ATOM_BUDGET, help="maximum atoms per law")
    common.add_argument("--strict", action="store_true", help="exit 4 when a verdict is heuristic")
    common.add_argument("--threads", type=int, default=1, help="worker processes where supported")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--divide-content", action="store_true", help="divide f by its content")
    common.add_argument("--assume-irreducible", action="store_true",
                        help="silence the warning that irreducibility of f is not checked")

    p = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", parents=[common], help="conjugates, Mahler measure, groups G_n")
    s.add_argument("--levels", type=int, default=3)
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("entropy", parents=[common], help="entropy bound schedule (CSV)")
    s.add_argument("--levels", type=int, default=6)
    s.set_defaults(func=cmd_entropy)

    s = sub.add_parser("vanishing", parents=[common], help="search for complete vanishing")
    s.add_argument("--m-max", type=int)
    s.add_argument("--level", type=int, help="test one level instead of searching")
    s.add_argument("--full-witnesses", action="store_true")
    s.set_defaults(func=cmd_vanishing)

    s = sub.add_parser("charequi", parents=[common], help="cross-check the three equivalent conditions")
    s.add_argument("--levels", type=int, default=3)
    s.set_defaults(func=cmd_charequi)

    s = sub.add_parser("classify", parents=[common], help="maximal-entropy zero-set families")
    s.add_argument("--interval", type=int, help="support length k of {0..k} (instead of --measure)")
    s.add_argument("--m-max", type=int)
    s.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("fourier", parents=[common], help="Fourier decay scan on the real line")
    s.add_argument("--lambda", dest="lam", help="literal ratio, p/q or decimal")
    s.add_argument("--root-index", type=int)
    s.add_argument("--v-min", type=float, default=1.0)
    s.add_argument("--v-max", type=float, default=2.0 ** 16)
    s.add_argument("--points", type=int, default=1024)
    s.add_argument("--tail", type=float, default=DEFAULT_TAIL)
    s.add_argument("--csv", help="also write v, magnitude, truncation_bound here")
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("spectrum", parents=[common], help="characters of G_n charged by Y_n")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--m", type=int, help="vanishing level (searched if omitted)")
    s.add_argument("--m-max", type=int)
    s.add_argument("--threshold", type=float, default=1e-9)
    s.set_defaults(func=cmd_spectrum)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "classify" and (args.interval is None) == (args.measure is None):
        parser.error("classify needs exactly one of --interval or --measure")
    if args.command == "fourier" and args.lam is not None and args.poly is not None:
        parser.error("--lambda and --poly are mutually exclusive")
    try:
        ctx = Context(args)
        if ctx.poly is not None and not args.assume_irreducible:
            print("warning: irreducibility of f is not checked; pass --assume-irreducible to confirm it",
                  file=sys.stderr)
        return args.func(ctx)
    except GarsiaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
