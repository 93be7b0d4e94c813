"""The ``gm3cert`` command line.

Subcommands and exit codes:

    certify    0 valid certificate, 2 infeasible or invalid
    simulate   0 CompletedBounded, 3 BlowUpSuspected, 4 PositivityLoss
    verify     0 all checks pass, 2 infeasible, 5 a check failed
    sweep      0
    plot       0

Every subcommand exits with 1 on configuration and I/O errors.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Tuple

import pandas as pd
from pandera.errors import SchemaError

from gm3cert import __version__
from gm3cert.certificate import (
    Certificate,
    assemble_Q,
    is_positive_definite,
    minor_identity_check,
)
from gm3cert.cli.config import RunConfig, SweepAxis, SweepSpec, read_config_file
from gm3cert.cli.presets import DEFAULT_PRESET, PRESETS, get_preset
from gm3cert.cli.sweep import run_sweep
from gm3cert.cli.workflows import certify_config, simulate_config
from gm3cert.errors import (
    DegenerateEpsilon,
    GM3Error,
    InfeasibleBranch,
    IterationLimit,
    PreconditionViolated,
)
from gm3cert.integrator import OutcomeKind
from gm3cert.monitor import check_run, kappa_is_consistent
from gm3cert.oracles import SampleSpec, verify_lemma1, verify_lemma2
from gm3cert.plot import plot_monitor_csv
from gm3cert.write import (
    atomic_write_text,
    read_certificate,
    read_snapshot,
    write_certificate,
    write_snapshot,
    write_table,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_BLOWUP = 3
EXIT_POSITIVITY = 4
EXIT_VERIFY_FAILED = 5

OUTCOME_EXIT_CODES = {
    OutcomeKind.COMPLETED_BOUNDED: EXIT_OK,
    OutcomeKind.BLOWUP_SUSPECTED: EXIT_BLOWUP,
    OutcomeKind.POSITIVITY_LOSS: EXIT_POSITIVITY,
}

CERTIFICATE_FILE = "certificate.txt"
MONITOR_FILE = "monitor.csv"
SNAPSHOT_FILE = "final.snapshot"
CONFIG_FILE = "config.ini"
SWEEP_FILE = "sweep.csv"

MINOR_IDENTITY_TOL = 1e-10


def load_config(args: argparse.Namespace) -> RunConfig:
    """Preset, then config file, then ``--set`` overrides, then --seed and --out."""
    cfg = get_preset(args.preset or DEFAULT_PRESET)
    if args.config:
        cfg = cfg.with_sections(read_config_file(args.config))
    if args.set:
        cfg = cfg.with_overrides(args.set)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    return cfg


def print_certificate_summary(certificate: Certificate) -> None:
    triple = certificate.triple
    print(f"Branch:  {certificate.branch.selected_branch.value}")
    print(f"Triple:  {triple.alpha!r}, {triple.beta!r}, {triple.gamma!r}")
    print(f"mu:      {certificate.mu!r}")
    print(f"kappa:   {certificate.kappa!r} (L0 = {certificate.L0!r})")
    print(f"Valid:   {certificate.valid}")


def cmd_certify(cfg: RunConfig) -> int:
    try:
        certificate = certify_config(cfg)
    except InfeasibleBranch as err:
        print(f"Certificate: INFEASIBLE, exponent condition infeasible. {err}")
        return EXIT_INFEASIBLE
    except (DegenerateEpsilon, IterationLimit) as err:
        print(f"Certificate: INFEASIBLE, {err}")
        return EXIT_INFEASIBLE

    path = Path(cfg.out) / CERTIFICATE_FILE
    write_certificate(certificate, path)
    print_certificate_summary(certificate)
    print(f"The certificate has been written to '{path}'.")
    return EXIT_OK if certificate.valid else EXIT_INFEASIBLE


def cmd_simulate(cfg: RunConfig, resume: Optional[str] = None) -> int:
    resume_state = read_snapshot(resume) if resume else None
    simulation = simulate_config(cfg, resume_from=resume_state)
    if simulation.certificate is None:
        print("Warning: this run has no certificate, no boundedness claim is made.")

    out = Path(cfg.out)
    atomic_write_text(cfg.to_ini(), out / CONFIG_FILE)
    write_table(simulation.monitor.to_frame(), out / MONITOR_FILE)
    write_snapshot(simulation.outcome.state, out / SNAPSHOT_FILE)

    outcome = simulation.outcome
    detail = f" ({outcome.component})" if outcome.component else ""
    print(f"Outcome: {outcome.kind.value}{detail} at t = {outcome.t!r}")
    if outcome.message:
        print(outcome.message)
    print(f"Monitor rows have been written to '{out / MONITOR_FILE}'.")
    return OUTCOME_EXIT_CODES[outcome.kind]


Check = Tuple[str, bool, str]


def lemma_checks(certificate: Certificate) -> List[Check]:
    """Oracle checks that need no simulation."""
    checks: List[Check] = []
    lemma1 = certificate.lemma1
    sample = SampleSpec(
        x_max=10.0,
        y_min=lemma1.floor_y,
        y_max=10.0 * lemma1.floor_y,
        z_min=lemma1.floor_z,
        z_max=10.0 * lemma1.floor_z,
        counts=(20, 20, 20),
    )
    try:
        violations = verify_lemma1(lemma1.exponents, certificate.triple, lemma1, sample)
        detail = f"{len(violations)} violations"
        checks.append(("interpolation inequality", violations.empty, detail))
    except PreconditionViolated as err:
        checks.append(("interpolation inequality", False, str(err)))

    mu = certificate.mu
    forcing = [(c * mu, theta) for c, theta in certificate.kappa_terms()]
    lemma2 = verify_lemma2(mu, forcing, certificate.L0, certificate.horizon_T)
    detail = f"max W = {lemma2.max_W:.6g}, kappa = {lemma2.kappa:.6g}"
    checks.append(("comparison ODE", lemma2.holds, detail))

    a = certificate.params.a
    qform = assemble_Q(certificate.triple, *a)
    residual = minor_identity_check(qform, certificate.triple, a)
    checks.append(
        ("minor identity", residual < MINOR_IDENTITY_TOL, f"residual {residual:.3g}")
    )
    checks.append(("Q positive definite", is_positive_definite(qform), ""))
    consistent = kappa_is_consistent(certificate)
    checks.append(("kappa consistent", consistent, f"{certificate.kappa:.6g}"))
    return checks


def run_checks(cfg: RunConfig, certificate: Certificate) -> List[Check]:
    """Simulates the config and checks the trajectory against the certificate."""
    simulation = simulate_config(cfg, certificate=certificate)
    report = check_run(simulation.monitor.rows, certificate, simulation.floor_tol)
    kind = simulation.outcome.kind
    return [
        ("run completed", kind is OutcomeKind.COMPLETED_BOUNDED, kind.value),
        ("L bounded by kappa", report.L_bounded_by_kappa, f"max L {report.max_L:.6g}"),
        ("floors hold", report.floors_hold, f"tolerance {simulation.floor_tol:.3g}"),
        ("quadratic form non-negative", report.qform_nonneg, ""),
    ]


def cmd_verify(
    cfg: RunConfig, lemmas_only: bool = False, certificate_path: Optional[str] = None
) -> int:
    if certificate_path:
        certificate = read_certificate(certificate_path)
        cfg = replace(cfg, params=certificate.params)
    else:
        try:
            certificate = certify_config(cfg)
        except (InfeasibleBranch, DegenerateEpsilon, IterationLimit) as err:
            print(f"Nothing to verify: {err}")
            return EXIT_INFEASIBLE

    checks = lemma_checks(certificate)
    if not lemmas_only:
        checks += run_checks(cfg, certificate)

    table = pd.DataFrame(checks, columns=["check", "passed", "detail"])
    print(table.to_string(index=False))
    passed = bool(table["passed"].all())
    print("All checks passed." if passed else "Some checks FAILED.")
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_sweep(
    cfg: RunConfig, x: str, y: str, workers: int = 1, resume: bool = False
) -> int:
    spec = SweepSpec(SweepAxis.parse(x), SweepAxis.parse(y), cfg)
    summary = run_sweep(spec, cfg.out, workers=workers, resume=resume)
    path = Path(cfg.out) / SWEEP_FILE
    write_table(summary.table, path)
    print(
        f"Sweep finished: {summary.computed} points computed, "
        f"{summary.skipped} resumed. "
        f"Results have been written to '{path}'."
    )
    return EXIT_OK


def cmd_plot(csv_path: str, out: str) -> int:
    try:
        paths = plot_monitor_csv(csv_path, out)
    except (ValueError, SchemaError) as err:
        print(f"Can't plot '{csv_path}': {err}", file=sys.stderr)
        return EXIT_ERROR
    for path in paths:
        print(f"Figure has been written to '{path}'.")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file layered on top of the preset.")
    common.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        help=f"Built-in configuration. Defaults to {DEFAULT_PRESET}.",
    )
    common.add_argument("--out", help="Output directory.")
    common.add_argument("--seed", type=int, help="Seed of the initial perturbation.")
    common.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a config value, e.g. --set p1=4 or --set grid.n=32. Repeatable.",
    )
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG."
    )

    parser = argparse.ArgumentParser(
        prog="gm3cert",
        description="Simulate the three-component Gierer-Meinhardt system and certify "
        "global existence of its solutions.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("certify", parents=[common], help="Build and write a certificate.")

    simulate = sub.add_parser("simulate", parents=[common], help="Run a simulation.")
    simulate.add_argument(
        "--resume", metavar="SNAPSHOT", help="Continue from a snapshot."
    )

    verify = sub.add_parser("verify", parents=[common], help="Run every oracle check.")
    verify.add_argument(
        "--lemmas-only", action="store_true", help="Skip the simulation."
    )
    verify.add_argument("--certificate", help="Verify this certificate file.")

    sweep = sub.add_parser("sweep", parents=[common], help="Sweep two config values.")
    sweep.add_argument("--x", required=True, metavar="KEY:LO:HI:COUNT")
    sweep.add_argument("--y", required=True, metavar="KEY:LO:HI:COUNT")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--resume", action="store_true", help="Skip finished points.")

    plot = sub.add_parser("plot", parents=[common], help="Draw SVGs of a monitor CSV.")
    plot.add_argument(
        "csv", nargs="?", help="Monitor CSV. Defaults to OUT/monitor.csv."
    )

    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("gm3cert").setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        cfg = load_config(args)
        if args.command == "certify":
            return cmd_certify(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.resume)
        if args.command == "verify":
            return cmd_verify(cfg, args.lemmas_only, args.certificate)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.x, args.y, args.workers, args.resume)
        csv_path = args.csv or str(Path(cfg.out) / MONITOR_FILE)
        return cmd_plot(csv_path, cfg.out)
    except (GM3Error, ValueError, OSError) as err:
        print(f"Error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
