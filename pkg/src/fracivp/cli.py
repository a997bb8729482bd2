"""Command-line client for the certificate service.

A thin client: it turns config files / catalog examples into the service
request models, invokes the same handlers the HTTP endpoints use, and
emits deterministic JSON/CSV (identical input -> byte-identical output).

Exit codes:
    0  success (check: compatibility passed; solve: converged)
    1  compatibility gate failed
    2  usage, config, or expression error
    3  numerical failure (divergence, iteration budget, no mean-value
       bracket, all probe starts diverged)
"""

import argparse
import sys
from pathlib import Path

from pydantic import ValidationError

from . import config as configmod
from . import reports
from .analysis import RootBracketError
from .expr import ExpressionError
from .service.app import (
    CompatibilityFailure,
    run_check,
    run_example_detail,
    run_examples,
    run_mvt,
    run_probe,
    run_solve,
)
from .service.schemas import (
    CheckRequest,
    CheckSettings,
    MvtRequest,
    ProbeRequest,
    ProblemSpec,
    SolverSettings,
    SolveRequest,
)
from .solver import DivergenceError

EXIT_OK = 0
EXIT_COMPATIBILITY = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

DEFAULT_PROBE_INITS = {
    "unique_linear": ["1", "1+x", "1-x", "2"],
    "beta_family": ["1-2*x", "1", "1+2*x"],
    "remark3": ["1", "1+x^2"],
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _parse_params(pairs: list[str]) -> dict[str, str]:
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise CliError(f"--param expects k=v, got {pair!r}", EXIT_CONFIG)
        params[key.strip()] = configmod.unquote(value)
    return params


def _load_sections(args) -> dict[str, dict[str, str]]:
    if args.config:
        return configmod.load_config(args.config)
    return {}


def _example_params(params: dict[str, str]) -> dict[str, float]:
    out = {}
    for key in ("a", "T", "beta"):
        if key in params:
            try:
                out[key] = float(params[key])
            except ValueError as exc:
                raise CliError(f"parameter {key} must be numeric: {exc}", EXIT_CONFIG)
    return out


def _problem_spec(args, sections, params) -> ProblemSpec:
    if args.example and args.config:
        raise CliError("give either --config or --example, not both", EXIT_CONFIG)
    if args.example:
        detail = run_example_detail(args.example, **_example_params(params))
        return detail.problem
    block = dict(sections.get("problem", {}))
    block.update({k: v for k, v in params.items() if k in ("a", "u0", "T", "h")})
    if not block:
        raise CliError("no problem given: use --config or --example", EXIT_CONFIG)
    if "h" in block:
        block["h"] = configmod.unquote(block["h"])
    return ProblemSpec(**block)


def _check_settings(sections) -> CheckSettings:
    block = dict(sections.get("check", {}))
    if "t_box" in block:
        block["t_box"] = configmod.parse_t_box(block["t_box"])
    return CheckSettings(**block)


def _solver_settings(sections) -> SolverSettings:
    block = dict(sections.get("solver", {}))
    if "u_init" in block:
        block["u_init"] = configmod.unquote(block["u_init"])
    return SolverSettings(**block)


def _emit(report: dict, out_dir: str | None, files: dict[str, str] | None = None) -> None:
    text = reports.dumps(report) + "\n"
    sys.stdout.write(text)
    if out_dir is not None:
        directory = Path(out_dir)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "report.json").write_text(text, encoding="utf-8")
        for name, content in (files or {}).items():
            (directory / name).write_text(content, encoding="utf-8")


def cmd_check(args) -> int:
    sections = _load_sections(args)
    params = _parse_params(args.param)
    request = CheckRequest(
        problem=_problem_spec(args, sections, params),
        check=_check_settings(sections),
    )
    response = run_check(request)
    report = {
        "command": "check",
        "passed": response.passed,
        "problem": response.problem.model_dump(),
        "certificates": [c.model_dump() for c in response.certificates],
    }
    _emit(report, args.out)
    return EXIT_OK if response.passed else EXIT_COMPATIBILITY


def cmd_solve(args) -> int:
    sections = _load_sections(args)
    params = _parse_params(args.param)
    request = SolveRequest(
        problem=_problem_spec(args, sections, params),
        solver=_solver_settings(sections),
        check=_check_settings(sections),
    )
    response = run_solve(request)
    report = {
        "command": "solve",
        "converged": response.converged,
        "iterations": response.iterations,
        "residual_sup": response.residual_sup,
        "t0": response.t0,
        "problem": request.problem.model_dump(),
        "certificates": [c.model_dump() for c in response.certificates],
    }
    csv_text = reports.solution_csv(response.grid, response.values, response.node_residuals)
    _emit(report, args.out if args.out is not None else ".", files={"solution.csv": csv_text})
    return EXIT_OK if response.converged else EXIT_NUMERICAL


def cmd_mvt(args) -> int:
    sections = _load_sections(args)
    params = _parse_params(args.param)
    block = dict(sections.get("mvt", {}))
    block.update({k: v for k, v in params.items() if k in ("function", "a", "x")})
    if args.example:
        detail = run_example_detail(args.example, **_example_params(params))
        terms = detail.known_solutions[0].terms
        block.setdefault(
            "function",
            " + ".join(f"{c!r}*x^{e!r}" for c, e in terms),
        )
        block.setdefault("a", detail.problem.a)
    if "function" not in block:
        raise CliError("mvt needs a function (config [mvt] or --param function=...)",
                       EXIT_CONFIG)
    block["function"] = configmod.unquote(str(block["function"]))
    block.setdefault("x", 1.0)
    request = MvtRequest(**block)
    response = run_mvt(request)
    report = {
        "command": "mvt",
        "function": request.function,
        "a": request.a,
        "x": request.x,
        "lam": response.lam,
        "ratio": response.ratio,
        "identity_residual": response.identity_residual,
        "degenerate": response.degenerate,
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_probe(args) -> int:
    sections = _load_sections(args)
    params = _parse_params(args.param)
    inits = None
    if "inits" in params:
        inits = configmod.split_inits(params.pop("inits"))
    elif "inits" in sections.get("probe", {}):
        inits = configmod.split_inits(sections["probe"]["inits"])
    elif args.example in DEFAULT_PROBE_INITS:
        inits = DEFAULT_PROBE_INITS[args.example]
    if not inits or len(inits) < 2:
        raise CliError("probe needs at least 2 inits ([probe] inits or --param inits=...)",
                       EXIT_CONFIG)
    request = ProbeRequest(
        problem=_problem_spec(args, sections, params),
        solver=_solver_settings(sections),
        check=_check_settings(sections),
        inits=inits,
    )
    response = run_probe(request)
    report = {
        "command": "probe",
        "cluster_count": response.cluster_count,
        "inits": list(request.inits),
        "grid": response.grid,
        "clusters": [c.model_dump() for c in response.clusters],
        "pairwise_distances": response.pairwise_distances,
        "diverged": response.diverged,
        "unconverged": response.unconverged,
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_examples(args) -> int:
    params = _parse_params(args.param)
    if args.example:
        detail = run_example_detail(args.example, **_example_params(params))
        report = {
            "command": "examples",
            "name": detail.name,
            "problem": detail.problem.model_dump(),
            "known_solutions": [s.terms for s in detail.known_solutions],
            "notes": detail.notes,
        }
    else:
        listing = run_examples()
        report = {
            "command": "examples",
            "examples": [e.model_dump() for e in listing.examples],
        }
    _emit(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracivp",
        description="Hypothesis certificates and Picard solutions for "
                    "fractional IVPs with origin-singular right-hand sides.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, desc in (
        ("check", cmd_check, "run the hypothesis checks and emit certificates"),
        ("solve", cmd_solve, "Picard-solve the IVP; writes solution.csv"),
        ("mvt", cmd_mvt, "find the mean-value point lambda for a power-sum function"),
        ("probe", cmd_probe, "multi-start nonuniqueness probe"),
        ("examples", cmd_examples, "list or show the worked examples"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", metavar="PATH", help="INI-style run config")
        p.add_argument("--example", metavar="NAME", help="catalog example name")
        p.add_argument("--param", metavar="K=V", action="append", default=[],
                       help="parameter override (repeatable)")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="directory for report.json (and solution.csv for solve)")
        p.set_defaults(handler=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (configmod.ConfigError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ExpressionError as exc:
        print(f"expression error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CompatibilityFailure as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_COMPATIBILITY
    except (DivergenceError, RootBracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
