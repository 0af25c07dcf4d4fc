"""Command-line interface: model catalog, expression evaluation, star products,
verification suites and convergence scans.

Exit codes: 0 success, 1 failed checks, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from pathlib import Path

from . import __version__
from .algebra import AlgebraError
from .expr import ParseError, parse_expr
from .models import MODEL_NAMES, build_model
from .moyal import ResourceLimitError, associativity_defect, star_truncated
from .suites import SUITES, run_suite

SEED_ENV = "POISSONRED_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: {SEED_ENV}={raw!r} is not an integer")


def _model(name: str):
    try:
        return build_model(name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))


class UsageError(Exception):
    pass


def _parse(model, text: str):
    try:
        return model.algebra.normal_form(parse_expr(text, model.algebra))
    except ParseError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}")


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


# -- commands -------------------------------------------------------------------


def cmd_models(args) -> int:
    for name in MODEL_NAMES:
        m = build_model(name)
        status = "n/a" if m.darboux_report is None else ("ok" if m.darboux_report.passed else "FAILS")
        gens = ", ".join(m.algebra.coordinates)
        print(f"{name:<9} pairs={len(m.pairs)} darboux={status:<5} coordinates: {gens}")
    return 0


def cmd_expr(args) -> int:
    model = _model(args.model)
    print(_parse(model, args.expr).to_text())
    return 0


def cmd_bracket(args) -> int:
    model = _model(args.model)
    f, g = _parse(model, args.f), _parse(model, args.g)
    print(model.structure(f, g).to_text())
    return 0


def _system(model):
    if model.darboux is None:
        lines = model.darboux_report.lines() if model.darboux_report else []
        raise UsageError(f"model {model.name} has no verified Darboux system" + "".join(f"\n  {l}" for l in lines))
    return model.darboux


def cmd_star(args) -> int:
    model = _model(args.model)
    sys_ = _system(model)
    f, g = _parse(model, args.f), _parse(model, args.g)
    for line in star_truncated(sys_, args.order, f, g).lines():
        print(line)
    return 0


def cmd_assoc(args) -> int:
    from .checks import random_element

    model = _model(args.model)
    sys_ = _system(model)
    rng = random.Random(f"assoc-cli-{model.name}-{args.seed}")
    failures = 0
    for i in range(args.trials):
        f, g, h = (random_element(model, rng, args.degree) for _ in range(3))
        d = associativity_defect(sys_, args.order, f, g, h)
        ok = d.is_zero()
        failures += not ok
        print(f"trial {i}: {'ok' if ok else 'DEFECT'}  f={f.to_text()}  g={g.to_text()}  h={h.to_text()}")
        if not ok:
            for line in d.lines():
                print(f"    {line}")
    print(f"{args.trials - failures}/{args.trials} associative through t^{args.order}")
    return 1 if failures else 0


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, args.seed)
    sys.stdout.write(rep.to_text())
    _write(args.json, rep.to_json())
    return rep.exit_code


def cmd_converge(args) -> int:
    from .convergence import radius_scan

    try:
        rep = radius_scan(args.sigma, args.grid, args.order, args.degree)
    except ValueError as exc:
        raise UsageError(str(exc))
    sys.stdout.write(rep.to_text())
    _write(args.json, rep.to_json())
    bad = rep.in_ball_failures()
    for p in bad:
        print(f"in-ball point |s|={p.s_norm} t={p.t} not certified: {p.verdict}")
    return 1 if bad else 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="poissonred",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    models = sub.add_parser("models", help="model catalog")
    models.add_argument("action", choices=["list"])
    models.set_defaults(func=cmd_models)

    expr = sub.add_parser("expr", help="parse and normalize an expression")
    expr.add_argument("action", choices=["eval"])
    expr.add_argument("--model", "-m", required=True)
    expr.add_argument("-e", "--expr", required=True)
    expr.set_defaults(func=cmd_expr)

    br = sub.add_parser("bracket", help="Poisson bracket of two expressions")
    br.add_argument("--model", "-m", required=True)
    br.add_argument("-f", required=True)
    br.add_argument("-g", required=True)
    br.set_defaults(func=cmd_bracket)

    st = sub.add_parser("star", help="truncated star product")
    st.add_argument("--model", "-m", required=True)
    st.add_argument("--order", "-K", type=int, default=2)
    st.add_argument("-f", required=True)
    st.add_argument("-g", required=True)
    st.set_defaults(func=cmd_star)

    asc = sub.add_parser("assoc", help="associativity on random triples")
    asc.add_argument("--model", "-m", required=True)
    asc.add_argument("--order", "-K", type=int, default=3)
    asc.add_argument("--trials", "-n", type=int, default=5)
    asc.add_argument("--degree", type=int, default=2)
    asc.add_argument("--seed", type=int, default=None)
    asc.set_defaults(func=cmd_assoc)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=SUITES)
    ver.add_argument("--seed", type=int, default=None)
    ver.add_argument("--json", metavar="PATH")
    ver.set_defaults(func=cmd_verify)

    con = sub.add_parser("converge", help="convergence scan of the star series on the cone")
    con.add_argument("--sigma", type=float, default=1.0)
    con.add_argument("--grid", default="s=0.05:0.2:4;t=0.025:0.1:4", help="s=AXIS;t=AXIS with AXIS a:b:n or a comma list")
    con.add_argument("--order", "-K", type=int, default=24)
    con.add_argument("--degree", "-M", type=int, default=24, help="Taylor truncation degree of the inputs")
    con.add_argument("--json", metavar="PATH")
    con.set_defaults(func=cmd_converge)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ResourceLimitError, AlgebraError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
