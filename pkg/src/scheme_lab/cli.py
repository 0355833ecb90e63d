"""Command-line front end.

Commands::

    scheme-lab eval      --kernel K --w W --x X --y Y --z Z [--theta T]
    scheme-lab solve-iid --w W
    scheme-lab solve-fgm --w W
    scheme-lab sweep     --mode M --w-min A --w-max B --step S [--out F]
    scheme-lab simulate  --kernel K --w W --x X --y Y --z Z --n N --seed S
    scheme-lab verify    --suite {all,iid,fgm,schemes}

Every command accepts ``--config FILE`` holding ``key=value`` lines that
mirror its flags (explicit flags win).  Results go to stdout or, with
``--out``, to a file written atomically.  All floats are printed with nine
significant digits, so identical invocations are byte-identical.

Exit status: 0 success, 2 usage error, 1 numeric or infeasibility error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from .analytic import optimal_rule_iid
from .errors import SchemeLabError
from .kernels import (
    CostKernel,
    FgmKernel,
    IidKernel,
    load_grid_kernel,
    make_purely_sufficient_kernel,
    make_purely_sustained_kernel,
)
from .model import RewardRule, evaluate_scheme, performance_iid
from .montecarlo import simulate
from .optimize import SearchConfig, optimize_fgm, optimize_rule_iid, sweep
from .verify import run_suite

_KERNELS = ("iid", "fgm", "sufficient", "sustained", "grid")


# ---------------------------------------------------------------------------
# deterministic rendering
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def render_json(value, indent: int = 0) -> str:
    """JSON with insertion-ordered keys and 9-significant-digit floats."""
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f'{pad}  "{k}": {render_json(v, indent + 1)}' for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        items = ", ".join(render_json(v, indent) for v in value)
        return "[" + items + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _fmt(value)
    if isinstance(value, int):
        return str(value)
    if value is None:
        return "null"
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".scheme-lab-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        os.unlink(tmp)
        raise


def _sweep_csv(rows) -> str:
    lines = ["w,x,y,z,theta,performance"]
    for r in rows:
        theta = "" if r.theta is None else _fmt(r.theta)
        lines.append(
            f"{_fmt(r.w)},{_fmt(r.x)},{_fmt(r.y)},{_fmt(r.z)},{theta},{_fmt(r.performance)}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _build_kernel(args) -> CostKernel:
    if args.kernel == "iid":
        return IidKernel()
    if args.kernel == "fgm":
        return FgmKernel(args.theta if args.theta is not None else 0.0)
    if args.kernel == "sufficient":
        return make_purely_sufficient_kernel(args.w)
    if args.kernel == "sustained":
        return make_purely_sustained_kernel(args.w)
    if args.grid_csv is None:
        raise SchemeLabError("--grid-csv is required with --kernel grid")
    return load_grid_kernel(args.grid_csv)


def _rule(args) -> RewardRule:
    return RewardRule(args.x, args.y, args.z, args.w)


def _add_kernel_flags(p: argparse.ArgumentParser):
    p.add_argument("--kernel", choices=_KERNELS, default="iid")
    p.add_argument("--theta", type=float, default=None,
                   help="FGM dependence parameter in [-1, 1]")
    p.add_argument("--grid-csv", default=None,
                   help="CSV matrix for --kernel grid")


def _add_rule_flags(p: argparse.ArgumentParser):
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--z", type=float, required=True)


def _add_out_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", default=None, help="key=value file mirroring flags")
    p.add_argument("--out", default=None, help="write output to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scheme-lab", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a rule under a cost kernel")
    _add_kernel_flags(p)
    _add_rule_flags(p)
    _add_out_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("solve-iid", help="closed-form optimal rule, independent costs")
    p.add_argument("--w", type=float, required=True)
    _add_out_flags(p)
    p.set_defaults(func=_cmd_solve_iid)

    p = sub.add_parser("solve-fgm", help="jointly optimize the rule and FGM dependence")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--coarse-step", type=float, default=0.01)
    p.add_argument("--theta-step", type=float, default=0.05)
    _add_out_flags(p)
    p.set_defaults(func=_cmd_solve_fgm)

    p = sub.add_parser("sweep", help="one optimization per budget, CSV table")
    p.add_argument("--mode", choices=("iid", "fgm", "fgm_theta_zero"), required=True)
    p.add_argument("--w-min", type=float, required=True)
    p.add_argument("--w-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--coarse-step", type=float, default=0.01)
    p.add_argument("--theta-step", type=float, default=0.05)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_out_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of a scheme")
    _add_kernel_flags(p)
    _add_rule_flags(p)
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=12345)
    p.add_argument("--dependence", action="store_true",
                   help="include dependence diagnostics in the report")
    _add_out_flags(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("--suite", choices=("all", "iid", "fgm", "schemes"), default="all")
    _add_out_flags(p)
    p.set_defaults(func=_cmd_verify)

    return parser


def expand_config(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    """Splice ``key=value`` config lines in as flags, before explicit ones."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        parser.error("--config requires a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    tokens: list[str] = []
    try:
        with open(path) as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    parser.error(f"config line {line!r} is not key=value")
                tokens += [f"--{key.strip()}", value.strip()]
    except OSError as exc:
        parser.error(f"cannot read config {path!r}: {exc}")
    if not rest:
        return tokens
    return [rest[0]] + tokens + rest[1:]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_eval(args) -> int:
    kernel = _build_kernel(args)
    ev = evaluate_scheme(kernel, _rule(args))
    payload = {
        "kernel": kernel.description,
        "performance": ev.performance,
        "period1_mass": ev.period1_mass,
        "period2_mass": ev.period2_mass,
        "participation_set": [list(seg) for seg in ev.participation_set],
    }
    _emit(render_json(payload) + "\n", args.out)
    return 0


def _cmd_solve_iid(args) -> int:
    best = optimal_rule_iid(args.w)
    rule = best.rules[0]
    payload = {
        "x": rule.x,
        "y": rule.y,
        "z": rule.z,
        "performance": performance_iid(rule).performance,
    }
    if best.equivalence_class:
        payload["equivalent_rules"] = best.equivalence_class
    _emit(render_json(payload) + "\n", args.out)
    return 0


def _cmd_solve_fgm(args) -> int:
    config = SearchConfig(coarse_step=args.coarse_step, theta_step=args.theta_step)
    res = optimize_fgm(args.w, config)
    payload = {
        "x": res.rule.x,
        "y": res.rule.y,
        "z": res.rule.z,
        "theta": res.theta,
        "performance": res.performance,
    }
    _emit(render_json(payload) + "\n", args.out)
    return 0


def _cmd_sweep(args) -> int:
    config = SearchConfig(coarse_step=args.coarse_step, theta_step=args.theta_step)
    rows = sweep(args.w_min, args.w_max, args.step, args.mode, config)
    if args.format == "json":
        payload = [
            {"w": r.w, "x": r.x, "y": r.y, "z": r.z, "theta": r.theta,
             "performance": r.performance}
            for r in rows
        ]
        _emit(render_json(payload) + "\n", args.out)
    else:
        _emit(_sweep_csv(rows), args.out)
    return 0


def _cmd_simulate(args) -> int:
    kernel = _build_kernel(args)
    report = simulate(kernel, _rule(args), args.n, args.seed,
                      with_dependence=args.dependence)
    payload = {
        "estimate": report.estimate,
        "stderr": report.stderr,
        "n": report.n,
        "seed": report.seed,
        "counts": {
            "neither": report.counts.neither,
            "period1_only": report.counts.period1_only,
            "period2_only": report.counts.period2_only,
            "both": report.counts.both,
        },
    }
    if report.dependence is not None:
        payload["dependence"] = report.dependence
    _emit(render_json(payload) + "\n", args.out)
    return 0


def _cmd_verify(args) -> int:
    results = run_suite(args.suite)
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"[{status}] {r.name:<{width}}  {r.detail}")
    ok = all(r.passed for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    argv = expand_config(argv, parser)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemeLabError as exc:
        print(f"scheme-lab: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
