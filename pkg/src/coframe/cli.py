"""Command-line front end.

    coframe verify {maurer-cartan,hodge,eigenvalue,jacobi,compatibility,connections,all}
    coframe integrate {xi,bott,volume}

Exit status: 0 when every selected check is within tolerance, 1 on a
verification failure, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from .chart import s3_frame
from .errors import CoframeError, ConfigError
from .obstruction import (DEFAULT_TOLERANCES, STAGES, ObstructionReport, QuadratureGrid,
                          bott_target_for, run_verification)
from .poisson import constant_gauge, paper_gauge, zero_gauge

TOLERANCE_ENV = "COFRAME_TOLERANCES"

VERIFY_STAGES = ("maurer-cartan", "hodge", "eigenvalue", "jacobi", "compatibility",
                 "connections", "all")
INTEGRALS = ("xi", "bott", "volume")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class RunConfig:
    nu: float = 1.0
    nodes_per_axis: int = 32
    epsilon_margin: float | None = None
    t_preset: str = "paper"
    t1: float = 0.0
    t2: float = 0.0
    tolerances: dict = field(default_factory=dict)
    output: str = "text"
    seed: int = 0
    forms: str = "poisson"
    differentiate_gauge: bool = False

    def validate(self) -> None:
        if not self.nu > 0:
            raise ConfigError("nu must be positive")
        if self.nodes_per_axis < 4:
            raise ConfigError("nodes per axis must be at least 4")
        if self.epsilon_margin is not None and not self.epsilon_margin > 0:
            raise ConfigError("epsilon must be positive")
        for name, value in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown stage in tolerances: {name!r}")
            if not (isinstance(value, (int, float)) and value > 0):
                raise ConfigError(f"tolerance for {name!r} must be a positive number")

    @property
    def epsilon(self) -> float:
        return 1e-6 / self.nu if self.epsilon_margin is None else self.epsilon_margin


def load_tolerances(path: str | None) -> dict:
    """Read a JSON object of stage -> tolerance; ``None`` falls back to the env var."""
    path = path or os.environ.get(TOLERANCE_ENV)
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read tolerance file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("tolerance file must hold a JSON object")
    return data


def _gauge(cfg: RunConfig, spec):
    if cfg.t_preset == "paper":
        t1, t2 = paper_gauge(spec)
        label = {"t1": "sin(nu*theta/2)", "t2": "1/sin(nu*theta/2)"}
    elif cfg.t_preset == "zero":
        t1, t2 = zero_gauge(spec)
        label = {"t1": "0", "t2": "0"}
    else:
        t1, t2 = constant_gauge(cfg.t1, cfg.t2)
        label = {"t1": repr(float(cfg.t1)), "t2": repr(float(cfg.t2))}
    target = bott_target_for(cfg.t_preset, spec.nu, cfg.t1, cfg.t2)
    if cfg.differentiate_gauge and cfg.t_preset == "paper":
        target = None  # differentiated, t2 = 1/sin(nu theta/2) makes the integral diverge
    return t1, t2, label, target


def run(cfg: RunConfig, stages) -> ObstructionReport:
    cfg.validate()
    spec = s3_frame(cfg.nu, epsilon=cfg.epsilon)
    try:
        grid = QuadratureGrid.gauss_legendre(spec, cfg.nodes_per_axis)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    t1, t2, label, target = _gauge(cfg, spec)
    return run_verification(spec, grid, t1, t2, tolerances=cfg.tolerances,
                            stages=stages, seed=cfg.seed, gauge_label=label,
                            bott_reference=target,
                            differentiate_gauge=cfg.differentiate_gauge,
                            compatibility_forms=cfg.forms)


def dumps(report: ObstructionReport) -> str:
    """Deterministic JSON for a report."""
    return json.dumps(report.to_dict(), sort_keys=True, indent=2)


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.6e}"


def render_text(report: ObstructionReport) -> str:
    lines = [f"nu = {report.nu:g}, nodes per axis = {report.nodes_per_axis}, "
             f"epsilon = {report.epsilon:g}",
             f"gauge: t1 = {report.gauge.get('t1')}, t2 = {report.gauge.get('t2')}"]
    if report.lambda_ is not None:
        lines.append(f"lambda = {report.lambda_:.12g}")
    lines.append(f"{'stage':<15} {'residual':>14} {'tolerance':>12}  status")
    for s in report.stages:
        status = "ok" if s.passed else "FAIL"
        lines.append(f"{s.name:<15} {_fmt(s.max_residual):>14} {s.tolerance:>12.1e}  {status}")
        if s.error:
            lines.append(f"  {s.name}: {s.error}")
    for name, r in report.integrals.items():
        target = "-" if r.target is None else f"{r.target:.12f}"
        lines.append(f"integral {name}: {r.value:.12f}  target {target}  "
                     f"rel err {_fmt(r.rel_err)}")
    if report.bott_term_integrals is not None:
        terms = ", ".join(f"{t:.9g}" for t in report.bott_term_integrals)
        lines.append(f"bott terms: {terms}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nu", type=float, default=1.0)
    common.add_argument("--nodes", type=int, default=32, help="Gauss nodes per axis")
    common.add_argument("--epsilon", type=float, default=None,
                        help="chart margin at the theta poles (default 1e-6/nu)")
    common.add_argument("--t-preset", choices=("zero", "paper", "constant"), default=None)
    common.add_argument("--t1", type=float, default=None, help="constant gauge t1")
    common.add_argument("--t2", type=float, default=None, help="constant gauge t2")
    common.add_argument("--differentiate-gauge", action="store_true",
                        help="let d see the variation of t1, t2")
    common.add_argument("--tolerances", metavar="FILE", default=None,
                        help=f"JSON stage->tolerance map (default: ${TOLERANCE_ENV})")
    common.add_argument("--output", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--forms", choices=("poisson", "unit-sections"), default="poisson",
                        help="pair used by the compatibility check")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="coframe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run identity checks")
    v.add_argument("stage", choices=VERIFY_STAGES)
    i = sub.add_parser("integrate", parents=[common], help="integrate a 3-form over S^3")
    i.add_argument("target", choices=INTEGRALS)
    return parser


def config_from_args(args) -> RunConfig:
    preset = args.t_preset
    if preset is None:
        preset = "constant" if (args.t1 is not None or args.t2 is not None) else "paper"
    if preset != "constant" and (args.t1 is not None or args.t2 is not None):
        raise ConfigError("--t1/--t2 require --t-preset constant")
    return RunConfig(
        nu=args.nu, nodes_per_axis=args.nodes, epsilon_margin=args.epsilon,
        t_preset=preset, t1=args.t1 or 0.0, t2=args.t2 or 0.0,
        tolerances=load_tolerances(args.tolerances), output=args.output,
        seed=args.seed, forms=args.forms, differentiate_gauge=args.differentiate_gauge)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "verify":
            stages = list(STAGES) if args.stage == "all" else [args.stage]
        else:
            stages = [args.target]
        report = run(cfg, stages)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CoframeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(dumps(report) if cfg.output == "json" else render_text(report))
    failed = [s.name for s in report.stages if not s.passed]
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
