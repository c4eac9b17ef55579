"""Command-line front end.

Exit codes: 0 success, 2 invalid input or flags, 1 internal error.  Every
run reports its resolved seed on stderr; subcommands without randomness
report ``seed=none``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bodies import parse_body
from .enumeration import count_empty_simplices, star
from .experiments import ExperimentConfig, generate_points, run_sweep_full
from .geom import GeneralPositionError, GeometryError, format_point_set, read_point_set
from .integrals import (
    SCHEMA_VERSION,
    appendix_I,
    estimate_cd,
    hitting_measure,
    result_json,
    section_integral,
    section_integral_closed_form,
    theorem2_constants,
    theorem2_limit_closed_form,
    theorem2_limit_rhs,
)
from .rng import RngStream
from .svg import render_star_svg

DEFAULT_SEED = 0


class UsageError(Exception):
    """Bad flags or inputs; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _write(path: str | Path, text: str, force: bool) -> None:
    p = Path(path)
    if p.exists() and not force:
        raise UsageError(f"{p} exists; pass --force to overwrite")
    p.write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _seed_note(seed) -> None:
    print(f"seed={seed if seed is not None else 'none'}", file=sys.stderr)


def _cmd_analyze(args) -> str:
    _seed_note(None)
    X = read_point_set(args.input)
    k = args.k if args.k is not None else X.dim
    report = count_empty_simplices(X, k=k)
    witness, degree = report.witness_max
    out = {"schema_version": SCHEMA_VERSION}
    out.update(report.to_dict(include_tuples=args.tuples))
    out["max_degree"] = degree
    out["witness"] = list(witness)
    out["witness_star"] = [list(s) for s in star(witness, X)]
    return _dump(out)


def _cmd_sweep(args) -> str:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    _seed_note(seed)
    body = parse_body(args.body, args.dim)
    config = ExperimentConfig(quantity=args.quantity, body=body, n_values=args.n,
                              trials=args.trials, seed=seed, k=args.k, gamma=args.gamma,
                              threads=args.threads)
    if args.out:
        prefix = Path(args.out)
        if prefix.suffix in (".csv", ".json"):
            prefix = prefix.with_suffix("")
        csv_path, json_path = prefix.with_suffix(".csv"), prefix.with_suffix(".json")
        for p in (csv_path, json_path):
            if p.exists() and not args.force:
                raise UsageError(f"{p} exists; pass --force to overwrite")
    result = run_sweep_full(config)
    summary = result.to_json()
    if args.out:
        _write(csv_path, result.to_csv(), True)
        _write(json_path, summary, True)
    return summary


def _cmd_constants(args) -> str:
    _seed_note(None)
    return _dump(theorem2_constants(args.dim).to_dict())


def _cmd_integral(args) -> str:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    _seed_note(seed)
    body = parse_body(args.body, args.dim)
    rng = RngStream(seed)
    d = body.dim
    q = args.quantity
    if q == "section":
        m = args.m if args.m is not None else d + 1
        est = section_integral(body, m, args.samples, rng)
        out = result_json("section_integral", body, args.samples, est,
                          section_integral_closed_form(body, m), m=m)
    elif q == "limit":
        est = theorem2_limit_rhs(body, args.samples, rng)
        out = result_json("theorem2_limit_rhs", body, args.samples, est,
                          theorem2_limit_closed_form(body))
    elif q == "hitting":
        est = hitting_measure(body, args.samples, rng)
        closed = 2.0 * body.radius if hasattr(body, "radius") else None
        out = result_json("hitting_measure", body, args.samples, est, closed)
    elif q == "appendix":
        R = args.R if args.R is not None else body.bounding_radius
        est, bound = appendix_I(d, R, body, args.samples, rng)
        out = result_json("appendix_I", body, args.samples, est, None, bound=bound, R=R)
    else:  # cd
        est = estimate_cd(d, args.samples, rng)
        out = result_json("lemma1_c", body, args.samples, est,
                          theorem2_constants(d).lemma1_c if d == 2 else None)
    return _dump(out)


def _cmd_star_svg(args) -> str:
    _seed_note(None)
    X = read_point_set(args.input)
    if X.dim != 2:
        raise UsageError(f"star-svg needs planar input, got d={X.dim}")
    k = args.k if args.k is not None else 2
    svg = render_star_svg(X, k)
    _write(args.out, svg, args.force)
    return f"wrote {args.out}\n"


def _cmd_gen(args) -> str:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    _seed_note(seed)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    body = parse_body(args.body, args.dim)
    X = generate_points(body, args.n, seed)
    text = format_point_set(X)
    if args.out:
        _write(args.out, text, args.force)
        return ""
    return text


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="emptystar", description="Empty-simplex statistics of random point sets.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="empty simplices and k-degrees of a point-set file")
    a.add_argument("--input", required=True)
    a.add_argument("--k", type=int)
    a.add_argument("--tuples", action="store_true", help="include every nonzero k-degree")
    a.set_defaults(func=_cmd_analyze)

    s = sub.add_parser("sweep", help="seeded Monte-Carlo sweep over n")
    s.add_argument("--quantity", required=True,
                   help="empty-count, max-degree, typical-degree, deg1-profile, n-gamma, poisson-gof")
    s.add_argument("--body", required=True)
    s.add_argument("--dim", type=int)
    s.add_argument("--n", type=_int_list, required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--k", type=int)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--seed", type=int)
    s.add_argument("--threads", type=int)
    s.add_argument("--out", help="path prefix for the .csv and .json outputs")
    s.add_argument("--force", action="store_true")
    s.set_defaults(func=_cmd_sweep)

    c = sub.add_parser("constants", help="closed-form constants for dimension d")
    c.add_argument("--dim", type=int, required=True)
    c.set_defaults(func=_cmd_constants)

    i = sub.add_parser("integral", help="Monte-Carlo hyperplane integrals")
    i.add_argument("--body", required=True)
    i.add_argument("--dim", type=int)
    i.add_argument("--quantity", choices=("section", "limit", "hitting", "appendix", "cd"),
                   default="section")
    i.add_argument("--m", type=int)
    i.add_argument("--R", type=float)
    i.add_argument("--samples", type=int, default=1_000_000)
    i.add_argument("--seed", type=int)
    i.set_defaults(func=_cmd_integral)

    v = sub.add_parser("star-svg", help="render the maximal star of a planar point set")
    v.add_argument("--input", required=True)
    v.add_argument("--k", type=int)
    v.add_argument("--out", required=True)
    v.add_argument("--force", action="store_true")
    v.set_defaults(func=_cmd_star_svg)

    g = sub.add_parser("gen", help="uniform points from a convex body")
    g.add_argument("--body", required=True)
    g.add_argument("--dim", type=int)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--out")
    g.add_argument("--force", action="store_true")
    g.set_defaults(func=_cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GeneralPositionError as exc:
        print(f"error: input is not in general position; violating subset {list(exc.subset)}",
              file=sys.stderr)
        return 2
    except (GeometryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if text:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
