#!/usr/bin/env python3
"""
EP Lab command line.

    python -m eplab.cli.cli eval --family chiellini --branch pos --lambda2 0.25 --c 1 --c1 1
    python -m eplab.cli.cli figure --id 7 --format svg
    python -m eplab.cli.cli validate --suite all

Exit codes: 0 success, 1 evaluation or validation failure, 2 usage error.
"""
import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from eplab.core.config import Config
from eplab.core.errors import DomainError, EPLabError
from eplab.core.schemas import (
    Branch,
    Command,
    EPParams,
    Family,
    OutputFormat,
    PhaseAccumulator,
    ReidParams,
    RunConfig,
    Sign,
    Suite,
)
from eplab.cli.export import SampleSeries, sample_series, write_csv, write_svg
from eplab.cli.figures import FIGURES, build_figure
from eplab.cli.validation import all_passed, run_suite, write_report
from eplab.modules.chiellini import dissipation_along, general_solution_v, particular_vgamma
from eplab.modules.invariant_theorem import general_solution_u, milne_phase
from eplab.modules.linear_core import sep_solutions
from eplab.modules.reid import REFERENCE_CONSTANTS, theta_m, u_m, v_m
from eplab.modules.specfun import real_value

try:
    from rich.console import Console
    from rich.panel import Panel
    from rich.table import Table
    from rich import box
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

logger = logging.getLogger(__name__)

console = Console(stderr=True) if RICH_AVAILABLE else None

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def say(message: str):
    if console:
        console.print(message)
    else:
        print(message, file=sys.stderr)


# ============================================================================
# Parameter bundles
# ============================================================================

def ep_params(cfg: RunConfig) -> EPParams:
    return EPParams(lambda2=cfg.lambda2, c=cfg.c, c1=cfg.c1, k=cfg.k, sign=cfg.sign)


def reid_params(cfg: RunConfig) -> ReidParams:
    # ZERO branch ignores lambda; keep the default there
    lam = math.sqrt(abs(cfg.lambda2)) if cfg.lambda2 != 0 else 0.5
    return ReidParams(m=cfg.m, branch=cfg.branch, lam=lam, a_amp=cfg.a_amp, c_tilde=cfg.c_tilde)


def reid_constants(cfg: RunConfig):
    if cfg.reference_constants:
        return REFERENCE_CONSTANTS[cfg.branch]
    return cfg.i_bc, cfg.b, cfg.c


def default_output(cfg: RunConfig, stem: str) -> Path:
    if cfg.out_path:
        return Path(cfg.out_path)
    return Path(Config.OUTPUT_DIR) / f"{stem}.csv"


def run_metadata(cfg: RunConfig) -> Dict[str, str]:
    meta = {
        "command": cfg.command.value,
        "lambda2": f"{cfg.lambda2:g}",
        "c": f"{cfg.c:g}",
        "c1": f"{cfg.c1:g}",
        "sign": cfg.sign.value,
        "zeta_window": f"{cfg.zeta_min:g},{cfg.zeta_max:g}",
    }
    if cfg.family:
        meta["family"] = cfg.family.value
    if cfg.branch:
        meta["branch"] = cfg.branch.value
    if cfg.family is Family.REID:
        I_bc, b, c = reid_constants(cfg)
        meta.update({"m": str(cfg.m), "c_tilde": f"{cfg.c_tilde:g}", "I_bc": f"{I_bc:g}", "b": f"{b:g}", "theta_c": f"{c:g}"})
    if cfg.family is Family.THEOREM:
        meta.update({"b": f"{cfg.b:g}", "I_bc": f"{cfg.i_bc:g}", "theta0": f"{cfg.theta0:g}"})
    return meta


# ============================================================================
# Commands
# ============================================================================

def eval_evaluators(cfg: RunConfig) -> Dict[str, Callable[[float], complex]]:
    if cfg.family is Family.SEP:
        return {"v": sep_solutions(cfg.branch, math.sqrt(abs(cfg.lambda2)), cfg.c)}
    if cfg.family is Family.CHIELLINI:
        return {"v": general_solution_v(ep_params(cfg))}
    if cfg.family is Family.REID:
        rp = reid_params(cfg)
        I_bc, b, c = reid_constants(cfg)
        return {"u": u_m(rp, I_bc, b, c, cfg.sign, cfg.theta0), "v": v_m(rp)}
    p = ep_params(cfg)
    acc = PhaseAccumulator(theta0=cfg.theta0)
    return {
        "u": general_solution_u(cfg.c1, p, cfg.b, cfg.i_bc, cfg.sign, acc),
        "v": particular_vgamma(cfg.c1, p),
    }


def phase_evaluators(cfg: RunConfig) -> Dict[str, Callable[[float], complex]]:
    if cfg.family is Family.REID:
        rp = reid_params(cfg)
        return {"theta": lambda zeta: theta_m(rp, zeta)}
    v = general_solution_v(ep_params(cfg))
    acc = PhaseAccumulator(zeta_start=cfg.zeta_min)
    return {"theta": lambda zeta: milne_phase(lambda z: real_value(v(z), z), acc, zeta)}


def emit(cfg: RunConfig, series: SampleSeries, stem: str) -> List[Path]:
    path = default_output(cfg, stem)
    written = [write_csv(series, path)]
    if cfg.format is OutputFormat.SVG:
        written.append(write_svg(series, path.with_suffix(".svg"), title=stem))
    return written


def cmd_eval(cfg: RunConfig) -> int:
    series = sample_series(eval_evaluators(cfg), (cfg.zeta_min, cfg.zeta_max), cfg.samples, run_metadata(cfg))
    written = emit(cfg, series, f"eval_{cfg.family.value}")
    say(f"[green]✓ {len(series.zeta)} samples → {', '.join(map(str, written))}[/green]")
    return EXIT_OK


def cmd_phase(cfg: RunConfig) -> int:
    series = sample_series(phase_evaluators(cfg), (cfg.zeta_min, cfg.zeta_max), cfg.samples, run_metadata(cfg))
    written = emit(cfg, series, f"phase_{cfg.family.value}")
    say(f"[green]✓ {len(series.zeta)} phase samples → {', '.join(map(str, written))}[/green]")
    return EXIT_OK


def cmd_gfunc(cfg: RunConfig) -> int:
    series = sample_series(
        {"g": dissipation_along(ep_params(cfg))}, (cfg.zeta_min, cfg.zeta_max), cfg.samples,
        run_metadata(cfg), on_error="nan",
    )
    written = emit(cfg, series, "gfunc")
    values = [complex(x).real for x in series.curves["g"] if math.isfinite(complex(x).real)]
    if values:
        say(f"g range [{min(values):.6g}, {max(values):.6g}] over {len(values)} finite samples")
    say(f"[green]✓ → {', '.join(map(str, written))}[/green]")
    return EXIT_OK


def cmd_figure(cfg: RunConfig) -> int:
    preset = FIGURES[cfg.figure_id]
    series = build_figure(cfg.figure_id, cfg.samples)
    out_dir = Path(cfg.out_path) if cfg.out_path else Path(Config.OUTPUT_DIR)
    stem = f"figure_{cfg.figure_id}_{preset.label}"
    path = write_csv(series, out_dir / f"{stem}.csv")
    written = [path]
    if cfg.format is OutputFormat.SVG:
        written.append(write_svg(series, out_dir / f"{stem}.svg", title=preset.title))
    if console:
        console.print(Panel.fit(
            f"[bold]{preset.label}[/bold] ({preset.kind})\n{preset.title}\n\n" + "\n".join(map(str, written)),
            title=f"Figure {cfg.figure_id}", border_style="cyan",
        ))
    return EXIT_OK


def print_reports(reports):
    if not console:
        for report in reports:
            print(report.line(), file=sys.stderr)
        return
    table = Table(title="EP LAB VALIDATION", box=box.ROUNDED)
    table.add_column("Suite", style="cyan")
    table.add_column("Case")
    table.add_column("Max residual", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Status")
    colors = {"PASS": "green", "FAIL": "red", "MONITOR": "yellow"}
    for r in reports:
        table.add_row(r.suite, r.case_id, f"{r.max_residual:.3e}", f"{r.tolerance:.1e}",
                      f"[{colors[r.status]}]{r.status}[/{colors[r.status]}]")
    console.print(table)


def cmd_validate(cfg: RunConfig) -> int:
    reports = run_suite(cfg.suite)
    path = Path(cfg.out_path) if cfg.out_path else Path(Config.OUTPUT_DIR) / "validation_report.txt"
    write_report(reports, path)
    print_reports(reports)
    failed = [r for r in reports if not (r.passed or r.monitored)]
    if failed:
        say(f"[red]✗ {len(failed)} of {len(reports)} cases failed; report at {path}[/red]")
    else:
        say(f"[green]✓ {len(reports)} cases, none failed; report at {path}[/green]")
    return EXIT_OK if all_passed(reports) else EXIT_FAILURE


COMMANDS = {
    Command.EVAL: cmd_eval,
    Command.PHASE: cmd_phase,
    Command.GFUNC: cmd_gfunc,
    Command.FIGURE: cmd_figure,
    Command.VALIDATE: cmd_validate,
}


# ============================================================================
# Argument parsing
# ============================================================================

def add_parameter_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--family", choices=[f.value for f in Family], help="Solution family")
    parser.add_argument("--branch", choices=[b.value for b in Branch], help="Branch by the sign of lambda^2")
    parser.add_argument("--m", type=int, default=2, help="Reid order m >= 2")
    parser.add_argument("--lambda2", type=float, default=0.25, help="lambda^2")
    parser.add_argument("--c", type=float, default=1.0, help="Inverse-cubic strength c")
    parser.add_argument("--b", type=float, default=1.0, help="Pair strength b of the u member")
    parser.add_argument("--c1", "--gamma", dest="c1", type=float, default=1.0, help="Integration constant c1 (gamma)")
    parser.add_argument("--k", type=float, default=-2.0, help="Chiellini constant k")
    parser.add_argument("--c-tilde", dest="c_tilde", type=float, default=1.0, help="Reid strength c~")
    parser.add_argument("--a", dest="a_amp", type=float, default=1.0, help="Reid amplitude constant a")
    parser.add_argument("--i-bc", dest="i_bc", type=float, default=1.0, help="Ermakov invariant I_bc")
    parser.add_argument("--theta0", type=float, default=0.0, help="Phase offset Theta_0")
    parser.add_argument("--reference-constants", action="store_true", help="Reid u with the reference branch constants")
    parser.add_argument("--sign", choices=[s.value for s in Sign], default=Sign.PLUS.value, help="Stacked symbol")
    add_output_flags(parser)


def add_output_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--zeta-min", dest="zeta_min", type=float, default=0.0)
    parser.add_argument("--zeta-max", dest="zeta_max", type=float, default=6.0)
    parser.add_argument("--samples", type=int, default=601)
    parser.add_argument("--out", dest="out_path", help="Output file (eval/phase/gfunc/validate) or directory (figure)")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eplab", description="Closed-form Ermakov-Pinney solutions with Chiellini dissipation",
    )
    parser.add_argument("--config-status", action="store_true", help="Show configuration and exit")
    parser.add_argument("--log-level", default=None, help="Logging level (default EP_LAB_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command")

    add_parameter_flags(sub.add_parser("eval", help="Evaluate a solution family to CSV"))
    add_parameter_flags(sub.add_parser("phase", help="Evaluate the Milne phase (reid, chiellini)"))
    add_parameter_flags(sub.add_parser("gfunc", help="Evaluate the dissipation-gain function g"))

    figure = sub.add_parser("figure", help="Reproduce a figure preset")
    figure.add_argument("--id", dest="figure_id", type=int, required=True, help=f"Figure id {min(FIGURES)}..{max(FIGURES)}")
    figure.add_argument("--samples", type=int, default=601)
    figure.add_argument("--out", dest="out_path", help="Output directory")
    figure.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)

    validate = sub.add_parser("validate", help="Run validation suites")
    validate.add_argument("--suite", choices=[s.value for s in Suite], default=Suite.ALL.value)
    validate.add_argument("--out", dest="out_path", help="Report file")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = (args.log_level or Config.LOG_LEVEL).upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format='%(asctime)s - %(levelname)s - %(message)s')

    try:
        Config.validate()
    except ValueError as exc:
        say(f"[red]✗ {exc}[/red]")
        return EXIT_USAGE

    if args.config_status:
        Config.print_status()
        return EXIT_OK
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    fields = {k: v for k, v in vars(args).items() if k not in ("config_status", "log_level") and v is not None}
    try:
        cfg = RunConfig(**fields)
    except ValidationError as exc:
        say(f"[red]✗ Invalid arguments:[/red]\n{exc}")
        return EXIT_USAGE
    if cfg.command is Command.FIGURE and cfg.figure_id not in FIGURES:
        say(f"[red]✗ Unknown figure id {cfg.figure_id}; choose from {sorted(FIGURES)}[/red]")
        return EXIT_USAGE

    try:
        return COMMANDS[cfg.command](cfg)
    except DomainError as exc:
        where = f" at zeta={exc.zeta:.17g}" if exc.zeta is not None else ""
        say(f"[red]✗ Evaluation left the real domain{where}: {exc}[/red]")
        return EXIT_FAILURE
    except EPLabError as exc:
        say(f"[red]✗ {type(exc).__name__}: {exc}[/red]")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
