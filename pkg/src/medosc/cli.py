"""Command-line front end.

Subcommands: decompose, verify, maximal, weights, operators, report.
Exit codes: 0 success (and suite PASS), 2 config error, 3 I/O error,
4 suite FAIL, 1 internal error.  OSC_SEED overrides --seed when set.
Identical invocations produce byte-identical outputs; --threads caps worker
parallelism and never changes results (the current implementation is serial,
the flag is accepted for interface stability).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .grid import GridError, ParseError, read_grid_function, write_grid_function
from .suites import (
    ConfigError,
    GENERATOR_TAGS,
    SUITE_IDS,
    SuiteConfig,
    csv_from_summary,
    run_suite,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_FAIL = 4


def _build_parser() -> argparse.ArgumentParser:
    epilog = (
        "suite ids: " + ", ".join(SUITE_IDS) + "\n"
        "generator tags: " + ", ".join(GENERATOR_TAGS) + "\n"
        "weight specs: const:<v>, power:<a>, geometric, fujii\n"
        "environment: OSC_SEED overrides --seed"
    )
    parser = argparse.ArgumentParser(
        prog="medosc",
        description="Local median decompositions, maximal operators, and "
                    "weighted-inequality verification on dyadic grids.",
        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--threads", type=int, default=0,
                        help="cap worker parallelism (results are independent of it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_dec = sub.add_parser("decompose", help="run a local median decomposition")
    p_dec.add_argument("--input", required=True, help="GridFunction JSON")
    p_dec.add_argument("--t", type=float, default=0.5)
    p_dec.add_argument("--s", type=float, default=0.125)
    p_dec.add_argument("--variant", default="base",
                       choices=["base", "annular", "refined"])
    p_dec.add_argument("--cube-mode", default="auto",
                       choices=["auto", "grid-aligned", "dyadic"])
    p_dec.add_argument("--out", required=True, help="DecompositionResult JSON")

    p_ver = sub.add_parser("verify", help="run an inequality suite")
    p_ver.add_argument("--suite", required=True)
    p_ver.add_argument("--levels", default=None,
                       help="a..b range or comma list, e.g. 6..8 or 6,8,10")
    p_ver.add_argument("--corpus", default=None,
                       help="comma list of generator[:count] tags")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--t", type=float, default=0.5)
    p_ver.add_argument("--s", type=float, default=0.125)
    p_ver.add_argument("--p", type=float, default=None)
    p_ver.add_argument("--q", type=float, default=None)
    p_ver.add_argument("--r", type=float, default=None)
    p_ver.add_argument("--beta", type=float, default=0.75)
    p_ver.add_argument("--slack", type=float, default=2.0)
    p_ver.add_argument("--growth-threshold", type=float, default=1.25)
    p_ver.add_argument("--cube-mode", default="auto",
                       choices=["auto", "grid-aligned", "dyadic"])
    p_ver.add_argument("--weight", default=None, help="const:v|power:a|geometric|fujii")
    p_ver.add_argument("--config", default=None,
                       help="JSON config file; explicit flags win")
    p_ver.add_argument("--out", default=None,
                       help="output prefix; writes <prefix>.csv and <prefix>.json")

    p_max = sub.add_parser("maximal", help="evaluate a maximal operator field")
    p_max.add_argument("--op", required=True,
                       choices=["hl", "local-sharp", "sharp", "dyadic-median",
                                "orlicz", "iterated"])
    p_max.add_argument("--input", required=True)
    p_max.add_argument("--out", required=True)
    p_max.add_argument("--s", type=float, default=0.125)
    p_max.add_argument("--t", type=float, default=0.5)
    p_max.add_argument("--r", type=float, default=1.0)
    p_max.add_argument("--p", type=float, default=1.0)
    p_max.add_argument("--k", type=int, default=1)
    p_max.add_argument("--young", default=None, help="Young function JSON config")
    p_max.add_argument("--alpha", type=float, default=0.0)
    p_max.add_argument("--cube-mode", default="auto",
                       choices=["auto", "grid-aligned", "dyadic"])

    p_wts = sub.add_parser("weights", help="weight-class constants and estimators")
    p_wts.add_argument("--check", required=True,
                       choices=["Ap", "F", "Wp", "Cp", "weak-Ainf", "APhi", "bump"])
    p_wts.add_argument("--weight", default=None, help="const:v|power:a|geometric")
    p_wts.add_argument("--pair", default=None, help="fujii for the two-weight checks")
    p_wts.add_argument("--input", default=None, help="weight from GridFunction JSON")
    p_wts.add_argument("--level", type=int, default=6)
    p_wts.add_argument("--p", type=float, default=2.0)
    p_wts.add_argument("--q", type=float, default=None)
    p_wts.add_argument("--beta", type=float, default=0.75)
    p_wts.add_argument("--alpha", type=float, default=0.5)
    p_wts.add_argument("--young", default=None)
    p_wts.add_argument("--seed", type=int, default=0)
    p_wts.add_argument("--cube-mode", default="auto",
                       choices=["auto", "grid-aligned", "dyadic"])

    p_ops = sub.add_parser("operators", help="apply a kernel operator")
    p_ops.add_argument("--kind", required=True,
                       choices=["hilbert", "dini", "hormander", "homogeneous"])
    p_ops.add_argument("--input", required=True)
    p_ops.add_argument("--out", required=True)
    p_ops.add_argument("--eta", type=float, default=1.0)
    p_ops.add_argument("--a", default=None, help="comma list of coefficients")
    p_ops.add_argument("--alpha", default=None, help="comma list of exponents")
    p_ops.add_argument("--padding", type=int, default=6)

    p_rep = sub.add_parser("report", help="re-render a JSON summary to CSV")
    p_rep.add_argument("--summary", required=True)
    p_rep.add_argument("--out", required=True)
    return parser


def _parse_levels(text: str) -> tuple:
    if ".." in text:
        a, b = text.split("..")
        return tuple(range(int(a), int(b) + 1))
    return tuple(int(x) for x in text.split(","))


def _parse_corpus(text: str) -> tuple:
    entries = []
    for part in text.split(","):
        if ":" in part:
            tag, count = part.split(":")
            entries.append({"generator": tag, "count": int(count)})
        else:
            entries.append({"generator": part})
    return tuple(entries)


def _parse_weight(text: str) -> dict:
    if text.startswith("const:"):
        return {"kind": "const", "value": float(text.split(":")[1])}
    if text.startswith("power:"):
        return {"kind": "power", "a": float(text.split(":")[1])}
    if text in ("geometric", "fujii"):
        return {"kind": text}
    raise ConfigError(f"unknown weight spec {text!r}")


def _weight_from_args(args):
    from .corpus import fujii_pair, power_weight
    from .grid import GridFunction

    if args.input:
        return read_grid_function(args.input)
    if args.pair == "fujii":
        return fujii_pair(args.level)
    spec = _parse_weight(args.weight or "const:1")
    if spec["kind"] == "const":
        n = 2 ** args.level
        return GridFunction(1, args.level, np.full(n, spec["value"]))
    if spec["kind"] == "power":
        return power_weight(spec["a"], args.level)
    if spec["kind"] == "geometric":
        n = 2 ** args.level
        return GridFunction(1, args.level, 2.0 ** -np.arange(n, dtype=float))
    if spec["kind"] == "fujii":
        return fujii_pair(args.level)
    raise ConfigError(f"cannot build weight from {spec}")


def _cmd_decompose(args) -> int:
    from .decomposition import decompose, write_result

    f = read_grid_function(args.input)
    result = decompose(f, t=args.t, s=args.s, variant=args.variant,
                       cube_mode=args.cube_mode)
    write_result(result, args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    kwargs = {}
    if args.config:
        with open(args.config) as fh:
            kwargs.update(json.load(fh))
    seed = int(os.environ.get("OSC_SEED", args.seed))
    flag_overrides = {
        "suite": args.suite, "seed": seed, "t": args.t, "s": args.s,
        "beta": args.beta, "slack": args.slack,
        "growth_threshold": args.growth_threshold, "cube_mode": args.cube_mode,
    }
    if args.levels:
        flag_overrides["levels"] = _parse_levels(args.levels)
    if args.corpus:
        flag_overrides["corpus"] = _parse_corpus(args.corpus)
    if args.p is not None:
        flag_overrides["p"] = args.p
    if args.q is not None:
        flag_overrides["q"] = args.q
    if args.r is not None:
        flag_overrides["r"] = args.r
    if args.weight:
        flag_overrides["weight"] = _parse_weight(args.weight)
    kwargs.update(flag_overrides)   # flags win over the config file
    if "levels" in kwargs:
        kwargs["levels"] = tuple(kwargs["levels"])
    if "corpus" in kwargs:
        kwargs["corpus"] = tuple(dict(e) for e in kwargs["corpus"])
    cfg = SuiteConfig(**kwargs)
    report = run_suite(cfg)
    if args.out:
        with open(args.out + ".csv", "w", newline="\n") as fh:
            fh.write(report.to_csv())
        with open(args.out + ".json", "w", newline="\n") as fh:
            fh.write(report.to_json())
    sups = " ".join(f"L{k}:{v:.6g}" for k, v in sorted(report.sup_ratios.items()))
    print(f"{report.suite}: {report.verdict} (sup ratios {sups})")
    for note in report.notes:
        print(f"  note: {note}")
    for v in report.violations[:10]:
        print(f"  violation: {v}")
    return EXIT_OK if report.verdict == "PASS" else EXIT_FAIL


def _cmd_maximal(args) -> int:
    from . import maximal
    from .young import young_from_config

    f = read_grid_function(args.input)
    if args.op == "hl":
        field = maximal.hl_maximal_field(f, r=args.r, mode=args.cube_mode)
    elif args.op == "local-sharp":
        field = maximal.local_sharp_field(f, f.full_cube(), args.s, args.cube_mode)
    elif args.op == "sharp":
        field = maximal.sharp_maximal_field(f, p=args.p, mode=args.cube_mode)
    elif args.op == "dyadic-median":
        field = maximal.dyadic_median_maximal_field(f, t=args.t)
    elif args.op == "orlicz":
        if not args.young:
            raise ConfigError("--op orlicz requires --young")
        A = young_from_config(json.loads(args.young))
        field = maximal.orlicz_maximal_field(f, A=A, alpha=args.alpha,
                                             mode=args.cube_mode)
    else:
        field = maximal.iterated_maximal_field(f, k=args.k, r=args.r,
                                               mode=args.cube_mode)
    write_grid_function(f.with_values(np.asarray(field).reshape(-1)), args.out)
    return EXIT_OK


def _cmd_weights(args) -> int:
    from . import weights
    from .young import young_from_config

    w = _weight_from_args(args)
    if args.check == "Ap":
        if isinstance(w, tuple):
            raise ConfigError("A_p expects a single weight")
        const = weights.ap_constant(w, args.p, cube_mode=args.cube_mode)
        print(const)
        if const == float("inf"):
            zeros = np.flatnonzero(w.values == 0.0)[:8]
            print(f"weight vanishes on cells {zeros.tolist()}; "
                  "w^(1-p') is not locally integrable there", file=sys.stderr)
        return EXIT_OK
    if args.check == "F":
        pair = w if isinstance(w, tuple) else (w, w)
        est = weights.condition_f_estimate(pair[0], pair[1], beta=args.beta,
                                           alpha_max=args.alpha, seed=args.seed,
                                           cube_mode=args.cube_mode)
        print(f"c1 >= {est.constant}")
        print(f"witness cube: {est.witness_cube}, cells {list(est.witness_cells)}")
        return EXIT_OK
    if args.check == "Wp":
        pair = w if isinstance(w, tuple) else (w, w)
        est = weights.wp_estimate(pair[0], pair[1], p=args.p, beta=args.beta,
                                  alpha=args.alpha, seed=args.seed,
                                  cube_mode=args.cube_mode)
        print(f"c0 >= {est.constant}")
        print(f"witness cube: {est.witness_cube}, cells {list(est.witness_cells)}")
        return EXIT_OK
    if args.check == "Cp":
        if isinstance(w, tuple):
            raise ConfigError("C_p expects a single weight")
        est = weights.cp_estimate(w, p=args.p, beta=args.beta,
                                  alpha_max=args.alpha, cube_mode=args.cube_mode)
        print(f"c >= {est.constant}")
        print(f"witness cube: {est.witness_cube}, cells {list(est.witness_cells)}")
        return EXIT_OK
    if args.check == "weak-Ainf":
        if isinstance(w, tuple):
            raise ConfigError("weak-Ainf expects a single weight")
        est = weights.weak_ainf_estimate(w, beta=args.beta, alpha_max=args.alpha,
                                         cube_mode=args.cube_mode)
        print(f"c >= {est.constant}")
        return EXIT_OK
    if args.check == "APhi":
        if isinstance(w, tuple):
            raise ConfigError("APhi expects a single weight")
        Phi = young_from_config(json.loads(args.young or '{"family":"power","p":2.0}'))
        print(weights.a_phi_check(w, Phi, cube_mode=args.cube_mode))
        return EXIT_OK
    # bump (6.14)
    pair = w if isinstance(w, tuple) else (w, w)
    B = young_from_config(json.loads(args.young or '{"family":"power","p":2.5}'))
    q = args.q if args.q is not None else args.p
    sup, cube = weights.perez_bump_check(pair[0], pair[1], p=args.p, q=q, B=B,
                                         cube_mode=args.cube_mode)
    print(f"sup = {sup} at {cube}")
    return EXIT_OK


def _cmd_operators(args) -> int:
    from .operators import KernelOperator, apply_operator

    kwargs = {"kind": args.kind, "eta": args.eta, "padding_levels": args.padding}
    if args.a:
        kwargs["a"] = tuple(float(x) for x in args.a.split(","))
    if args.alpha:
        kwargs["alpha"] = tuple(float(x) for x in args.alpha.split(","))
    T = KernelOperator(**kwargs)
    f = read_grid_function(args.input)
    write_grid_function(apply_operator(T, f), args.out)
    return EXIT_OK


def _cmd_report(args) -> int:
    with open(args.summary) as fh:
        doc = json.load(fh)
    with open(args.out, "w", newline="\n") as fh:
        fh.write(csv_from_summary(doc))
    return EXIT_OK


_COMMANDS = {
    "decompose": _cmd_decompose,
    "verify": _cmd_verify,
    "maximal": _cmd_maximal,
    "weights": _cmd_weights,
    "operators": _cmd_operators,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, GridError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
