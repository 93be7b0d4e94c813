"""Certification and simulation pipelines shared by the subcommands and sweeps."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

from gm3cert.certificate import (
    Certificate,
    ExponentTriple,
    assemble_Q,
    build_certificate,
    find_admissible_triple,
)
from gm3cert.cli.config import RunConfig
from gm3cert.errors import DegenerateEpsilon, InfeasibleBranch, IterationLimit
from gm3cert.integrator import RunOutcome, State, run
from gm3cert.model import BranchReport, check_exponent_condition
from gm3cert.monitor import Monitor, floor_tolerance, lyapunov_value

logger = logging.getLogger(__name__)


def initial_lyapunov(state: State, triple: ExponentTriple) -> float:
    return lyapunov_value(state, triple)


def certify_config(cfg: RunConfig, initial: Optional[State] = None) -> Certificate:
    """Builds the certificate for a config's parameters, initial data and horizon.

    Raises:
        InfeasibleBranch: If the exponent condition fails.
        DegenerateEpsilon: If no interpolation constants exist.
    """
    state = initial if initial is not None else cfg.initial_state()
    triple = find_admissible_triple(cfg.params)
    return build_certificate(
        cfg.params,
        state.minima,
        state.grid.measure,
        cfg.horizon,
        initial_lyapunov(state, triple),
    )


def try_certify(
    cfg: RunConfig, initial: Optional[State] = None
) -> Tuple[Optional[Certificate], BranchReport, str]:
    """Like `certify_config`, but reports infeasibility instead of raising.

    Returns:
        Tuple: (certificate or None, branch report, reason when None).
    """
    branch = check_exponent_condition(cfg.params)
    try:
        return certify_config(cfg, initial), branch, ""
    except InfeasibleBranch:
        return None, branch, "exponent condition infeasible"
    except (DegenerateEpsilon, IterationLimit) as err:
        return None, branch, str(err)


@dataclass
class Simulation:
    outcome: RunOutcome
    monitor: Monitor
    certificate: Optional[Certificate]
    initial: State
    floor_tol: float


def simulate_config(
    cfg: RunConfig,
    certificate: Optional[Certificate] = None,
    resume_from: Optional[State] = None,
) -> Simulation:
    """Runs a config with a monitor attached.

    Without an explicit certificate one is built when the config enables it. The
    floors always refer to the config's t = 0 state, also when resuming.

    Args:
        cfg (RunConfig): The run configuration.
        certificate (Optional[Certificate]): Certificate to monitor against.
        resume_from (Optional[State]): Start here instead of at the initial state.

    Returns:
        Simulation: Outcome, monitor rows and the certificate used.
    """
    initial = cfg.initial_state()
    if certificate is None and cfg.certificate.enabled:
        certificate, _, reason = try_certify(cfg, initial)
        if certificate is None:
            logger.warning("No certificate for this run: %s", reason)

    params = cfg.params
    if certificate is not None:
        triple = certificate.triple
    else:
        triple = find_admissible_triple(params)
    monitor = Monitor(
        params,
        triple,
        assemble_Q(triple, *params.a),
        initial.minima,
        certificate.kappa if certificate is not None else None,
    )
    scheme = cfg.build_scheme()
    start = resume_from if resume_from is not None else initial
    outcome = run(start, params, scheme, monitor)
    return Simulation(
        outcome=outcome,
        monitor=monitor,
        certificate=certificate,
        initial=initial,
        floor_tol=floor_tolerance(scheme.dt, initial.grid, params),
    )
