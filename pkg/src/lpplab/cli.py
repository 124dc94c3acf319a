"""Command-line interface: ``lpplab <verb> [options]``.

Exit codes: 0 pass (or report-only), 1 a check failed, 2 usage or
parameter error, 3 runtime error.
"""

import argparse
import logging
import sys

from . import harness
from .errors import LppError
from .report import emit

log = logging.getLogger("lpplab")

S = argparse.SUPPRESS

MODEL_FLAGS = [
    ("--w", float, "horizontal boundary rate"),
    ("--z", float, "vertical boundary parameter (rate 1 - z)"),
    ("--m", int, "target column"),
    ("--n", int, "target row"),
    ("--path", str, "down-right path as 'i,j:STEPS@base', e.g. '0,3:DDDRR@4'"),
]

VERB_FLAGS = {
    "shape": [],
    "simulate": [("--kind", str, "boundary recipe"), ("--replica", int, "replica index"),
                 ("--k", int, "switch index of the mixed recipe")],
    "verify": [("--p", int, "corner column"), ("--q", int, "corner row"),
               ("--max-side", int, "largest lemma grid side")],
    "exit-tail": [("--kind", str, "two-param or path-induced"), ("--s-grid", str, "comma list"),
                  ("--side", str, "'+' or '-'"), ("--r2-min", float, "smallest accepted r^2")],
    "first-step": [("--s", str, "comma list of rate offsets in units of 1/sigma"),
                   ("--tol", float, "relative tolerance of the refined rate")],
    "fluctuation": [("--mode", str, "midpoint, tail or identity"), ("--ns", str, "comma list"),
                    ("--s-grid", str, "comma list"), ("--side", str, "'+' or '-'")],
    "busemann": [("--mode", str, "ladder or marginal"), ("--sizes", str, "e.g. 100x100,400x400"),
                 ("--s", str, "comma list, one per right step"),
                 ("--t", str, "comma list, one per down step"), ("--eps", float, "box constant")],
    "cif": [("--ns", str, "comma list"), ("--xs", str, "comma list"),
            ("--pilot-reps", int, "replicas of the calibration pilot")],
    "cif-stationary": [("--mode", str, "limit or equivalence"), ("--xs", str, "comma list"),
                       ("--tol", float, "accepted distance to the limit")],
}


def _common(p):
    g = p.add_argument_group("run")
    g.add_argument("--seed", type=int, default=S, help="master seed")
    g.add_argument("--reps", type=int, default=S, help="replicas (trials for lemmas)")
    g.add_argument("--out", default=None, help="output file (default: stdout)")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("--threads", type=int, default=S, help="worker threads")
    g.add_argument("--config", default=None, help="file of 'key = value' lines")
    g.add_argument("-v", "--verbose", action="store_true")
    m = p.add_argument_group("model")
    for flag, typ, hlp in MODEL_FLAGS:
        m.add_argument(flag, type=typ, default=S, help=hlp)


def build_parser():
    ap = argparse.ArgumentParser(prog="lpplab", description="Exponential last-passage percolation lab")
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb, extra in VERB_FLAGS.items():
        p = sub.add_parser(verb)
        if verb == "verify":
            p.add_argument("target", choices=harness.VERIFY)
        _common(p)
        for flag, typ, hlp in extra:
            p.add_argument(flag, type=typ, default=S, help=hlp)
    return ap


def spec_from_args(ns):
    given = {k: v for k, v in vars(ns).items()
             if k not in ("verb", "target", "out", "format", "config", "verbose")}
    config = harness.read_config(ns.config) if ns.config else {}
    name = f"verify.{ns.target}" if ns.verb == "verify" else ns.verb
    return harness.ExperimentSpec.build(name, given, config, ns.out, ns.format)


def main(argv=None):
    ap = build_parser()
    ns = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        spec = spec_from_args(ns)
        log.info("running %s (spec %s)", spec.name, spec.hash())
        rep = harness.run(spec)
        if spec.out:
            emit(rep, spec.format, spec.out)
        else:
            sys.stdout.write(rep.to_json() if spec.format == "json" else rep.csv_text())
    except LppError as e:
        print(f"lpplab: error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:  # noqa: BLE001 - anything else is a runtime failure
        print(f"lpplab: runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    print(f"verdict: {rep.verdict}", file=sys.stderr)
    return 1 if rep.verdict == "fail" else 0


if __name__ == "__main__":
    sys.exit(main())
