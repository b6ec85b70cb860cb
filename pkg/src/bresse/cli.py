"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical error.
``BRESSE_OUTPUT_DIR`` overrides the output directory of a config.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, initial_state
from .diagnostics import DiagnosticsError, StepResidual, coefficients_of, energy_report, fit_decay, spectrum
from .discretization import DENSE_CAP, DiscretizationError, build_system
from .model_catalog import catalog_entries, describe_entry, stability_number
from .time_integration import IntegrationError, integrate
from .verify import SUITES, run_suite

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
OUTPUT_ENV = "BRESSE_OUTPUT_DIR"


class NumericalError(RuntimeError):
    pass


def _output_dir(cfg: RunConfig) -> Path:
    path = Path(os.environ.get(OUTPUT_ENV) or cfg.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _build(cfg: RunConfig):
    spec = cfg.build_spec()
    try:
        return build_system(spec, cfg.N)
    except DiscretizationError as exc:
        raise ConfigError(f"grid: {exc}") from None


def _write_trajectory(path: Path, sys, traj) -> None:
    names = [f"{slot.name}[{j}]" for slot in sys.slots for j in range(slot.stop - slot.start)]
    with open(path, "w") as fh:
        fh.write(",".join(["t", *names]) + "\n")
        for t, u in zip(traj.times, traj.states):
            fh.write(",".join(f"{v:.17g}" for v in (t, *u)) + "\n")


def _summary_lines(cfg: RunConfig, sys) -> list[str]:
    c = coefficients_of(sys)
    chi1, chi2 = stability_number(c)
    law = cfg.law["name"] if cfg.law else "none"
    return [
        f"model: ({cfg.coupling}, {law}) bc={cfg.bc}",
        f"grid: N={cfg.N} L={cfg.L:.17g} dimension={sys.dim}",
        f"stability_number: chi1={chi1:.17g} chi2={chi2:.17g}",
    ]


def cmd_simulate(path) -> int:
    cfg = RunConfig.load(path)
    sys_ = _build(cfg)
    icfg = cfg.build_integrator()
    u0 = initial_state(cfg, sys_)
    try:
        probe = StepResidual(sys_, icfg.dt, icfg.stride)
        traj = integrate(sys_, u0, icfg, on_step=probe)
        report = energy_report(traj, sys_, probe.residual)
    except (IntegrationError, DiagnosticsError) as exc:
        raise NumericalError(f"integration: {exc}") from exc
    out = _output_dir(cfg)
    if cfg.write_energy:
        report.write_csv(out / "energy.csv")
    if cfg.write_trajectory:
        _write_trajectory(out / "trajectory.csv", sys_, traj)

    E = report.total
    lines = _summary_lines(cfg, sys_)
    lines.append(f"integrator: {icfg.scheme.name} dt={icfg.dt:.17g} T={icfg.T:.17g} stride={icfg.stride}")
    lines.append(f"E_initial: {E[0]:.17g}")
    lines.append(f"E_final: {E[-1]:.17g}")
    ratio = E[-1] / E[0] if E[0] > 0 else float("nan")
    lines.append(f"energy_ratio: {ratio:.17g}")
    lines.append(f"max_abs_residual: {np.max(np.abs(report.residual)):.17g}")
    try:
        fit = fit_decay(report.times, E)
        lines.append(f"decay_fit: {fit.kind} rate={fit.rate:.6g} r2={fit.r2:.6f}")
    except DiagnosticsError as exc:
        lines.append(f"decay_fit: unavailable ({exc})")
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_spectrum(path) -> int:
    cfg = RunConfig.load(path)
    sys_ = _build(cfg)
    if sys_.dim > DENSE_CAP:
        raise NumericalError(
            f"spectrum: dimension {sys_.dim} exceeds the dense cap {DENSE_CAP}; reduce grid.N"
        )
    try:
        rep = spectrum(sys_.operator, coefficients_of(sys_))
    except DiagnosticsError as exc:
        raise NumericalError(f"spectrum: {exc}") from exc
    out = _output_dir(cfg)
    rep.write_csv(out / "spectrum.csv")
    lines = _summary_lines(cfg, sys_)
    lines += [
        f"eigenvalues: {rep.eigenvalues.size}",
        f"spectral_abscissa: {rep.abscissa:.17g}",
        f"operator_norm: {rep.norm:.17g}",
        f"conjugate_closed: {rep.conjugate_closed}",
    ]
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    print(f"spectral abscissa {rep.abscissa:.6e}; wrote {out}")
    return EXIT_OK


def cmd_catalog() -> int:
    entries = catalog_entries()
    for label, desc in entries:
        print(describe_entry(label, desc))
    print(f"{len(entries)} entries")
    return EXIT_OK


def cmd_verify(suite: str) -> int:
    if suite not in (*SUITES, "all"):
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join([*SUITES, 'all'])}")
    checks = run_suite(suite)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bresse", description="Thermoelastic Bresse beam toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("simulate", help="integrate a configured model and write energy.csv")
    p.add_argument("config")
    p = sub.add_parser("spectrum", help="dense spectrum of the semi-discrete operator")
    p.add_argument("config")
    sub.add_parser("catalog", help="list every coupling/law combination")
    p = sub.add_parser("verify", help="run a verification battery")
    p.add_argument("suite", help="energy, limits, spectrum or all")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config)
        if args.command == "spectrum":
            return cmd_spectrum(args.config)
        if args.command == "catalog":
            return cmd_catalog()
        return cmd_verify(args.suite)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, IntegrationError, DiagnosticsError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
