"""Computable global-existence certificates.

A certificate collects every constant the boundedness argument for the Lyapunov
functional ``L(t) = ∫ u^α / (v^β w^γ) dx`` needs:

1. the diffusion mismatch ratios A_ij,
2. an admissible exponent triple (α, β, γ) and the conditions it passes,
3. the gradient quadratic form Q and its leading minors,
4. the interpolation constants (ε, C, θ) for the fractional activator term,
5. the aggregated constants C0..C5 and the decay rate μ,
6. the ceiling κ on L(t) over the horizon [0, T*].
"""

import logging
import math
from dataclasses import dataclass, fields
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from gm3cert.errors import (
    DegenerateEpsilon,
    InfeasibleBranch,
    IterationLimit,
    NonPositiveCoefficient,
    NonPositiveMu,
    PreconditionViolated,
)
from gm3cert.model import (
    Branch,
    BranchReport,
    GMParams,
    branch_exponents,
    check_exponent_condition,
    ratio,
    validate_params,
)

logger = logging.getLogger(__name__)

MAX_GAMMA_HALVINGS = 128
MAX_EPSILON_HALVINGS = 64
KAPPA_RTOL = 1e-12


@dataclass(frozen=True)
class ExponentTriple:
    """Exponents (α, β, γ) of the Lyapunov functional."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.alpha > 1:
            raise ValueError(f"alpha must be > 1, got {self.alpha!r}.")
        if not (self.beta > 0 and self.gamma > 0):
            raise ValueError(
                "beta and gamma must be positive, "
                f"got {self.beta!r} and {self.gamma!r}."
            )


@dataclass(frozen=True, eq=False)
class QForm:
    """Symmetric 3x3 matrix of the gradient quadratic form, with leading minors."""

    entries: np.ndarray
    minors: Tuple[float, float, float]

    @property
    def positive_minors(self) -> bool:
        return all(minor > 0 for minor in self.minors)


@dataclass(frozen=True)
class TripleCheck:
    alpha_condition: bool
    beta_condition: bool
    coupling_condition: bool
    mu: float

    @property
    def mu_positive(self) -> bool:
        return self.mu > 0

    @property
    def passed(self) -> bool:
        return (
            self.alpha_condition
            and self.beta_condition
            and self.coupling_condition
            and self.mu_positive
        )


@dataclass(frozen=True)
class Lemma1Constants:
    """Constants of the interpolation inequality for the fractional activator term.

    The inequality reads, for x >= 0, y >= floor_y, z >= floor_z,

        α x^(p-1+α) / (y^(q+β') z^(m+γ'))
            <= β' x^(r+α) / (y^(s+1+β') z^(n+γ')) + C (x^α / (y^β' z^γ'))^θ

    where (β', γ') = (β, γ) on the v-branch and (γ, β) on the w-branch, because y
    and z swap roles between v and w.
    """

    epsilon: float
    bigC: float
    theta: float
    floor_y: float
    floor_z: float
    C1: float
    p: float
    q: float
    r: float
    s: float
    m: float
    n: float
    alpha: float
    weight_y: float
    weight_z: float

    @property
    def exponents(self) -> Tuple[float, float, float, float, float, float]:
        return (self.p, self.q, self.r, self.s, self.m, self.n)


@dataclass(frozen=True)
class ProofConstants:
    C2: float
    C3: float
    C4: float
    C5: float


def amplification_ratios(a1: float, a2: float, a3: float) -> Tuple[float, float, float]:
    """Diffusion mismatch ratios ``A_ij = (a_i + a_j) / (2 sqrt(a_i a_j))``.

    Each ratio is >= 1, with equality exactly when the two coefficients agree.

    Raises:
        NonPositiveCoefficient: If a coefficient is not strictly positive.

    Returns:
        Tuple[float, float, float]: (A12, A13, A23).
    """
    for name, value in (("a1", a1), ("a2", a2), ("a3", a3)):
        if not value > 0:
            raise NonPositiveCoefficient(name, value)

    def mismatch(ai: float, aj: float) -> float:
        return (ai + aj) / (2.0 * math.sqrt(ai * aj))

    return mismatch(a1, a2), mismatch(a1, a3), mismatch(a2, a3)


def _condition_sides(
    triple: ExponentTriple, ratios: Tuple[float, float, float]
) -> Tuple[float, float, float]:
    A12, A13, A23 = ratios
    alpha, beta, gamma = triple.alpha, triple.beta, triple.gamma
    beta_slack = 1.0 / (2.0 * beta) - A12**2
    gamma_slack = 1.0 / (2.0 * gamma) - A13**2
    coupling = ((alpha - 1.0) / alpha * A23 - A12 * A13) ** 2
    return beta_slack, gamma_slack, coupling


def check_triple(triple: ExponentTriple, params: GMParams) -> TripleCheck:
    """Checks an exponent triple against the three admissibility conditions.

    - alpha: ``α > 2 max(1, (b2 + b3) / b1)``
    - beta: ``1/β > 2 A12²``
    - coupling: ``(1/(2β) - A12²)(1/(2γ) - A13²) > ((α-1)/α A23 - A12 A13)²``
      with ``1/(2γ) - A13² > 0``

    Also reports ``μ = b1 α - b2 β - b3 γ``, the decay rate of L.
    """
    ratios = amplification_ratios(*params.a)
    A12 = ratios[0]
    beta_slack, gamma_slack, coupling = _condition_sides(triple, ratios)

    alpha_ok = triple.alpha > 2.0 * max(1.0, (params.b2 + params.b3) / params.b1)
    beta_ok = 1.0 / triple.beta > 2.0 * A12**2
    coupling_ok = gamma_slack > 0 and beta_slack * gamma_slack > coupling
    mu = params.b1 * triple.alpha - params.b2 * triple.beta - params.b3 * triple.gamma

    return TripleCheck(alpha_ok, beta_ok, coupling_ok, mu)


def find_admissible_triple(params: GMParams) -> ExponentTriple:
    """Finds an admissible exponent triple with a fixed, deterministic schedule.

    ``α = 2 max(1, (b2+b3)/b1) + 1`` and ``β = 1 / (2(A12² + 1))``. γ starts at
    ``1 / (2(A13² + 1))`` and is halved until the coupling condition holds. The
    result depends on the diffusion coefficients only through the A_ij, so it is
    invariant under a common rescaling of a1, a2, a3.

    Raises:
        IterationLimit: If the coupling condition still fails after 128 halvings.

    Returns:
        ExponentTriple: A triple passing `check_triple`.
    """
    A12, A13, _ = amplification_ratios(*params.a)
    alpha = 2.0 * max(1.0, (params.b2 + params.b3) / params.b1) + 1.0
    beta = 1.0 / (2.0 * (A12**2 + 1.0))
    gamma = 1.0 / (2.0 * (A13**2 + 1.0))

    for _ in range(MAX_GAMMA_HALVINGS + 1):
        triple = ExponentTriple(alpha, beta, gamma)
        if check_triple(triple, params).passed:
            logger.info(
                "Admissible triple: alpha=%r beta=%r gamma=%r", alpha, beta, gamma
            )
            return triple
        gamma /= 2.0

    raise IterationLimit(
        f"No admissible gamma after {MAX_GAMMA_HALVINGS} halvings. "
        "The diffusion coefficients are probably badly scaled."
    )


def _as_tuple(triple: ExponentTriple) -> Tuple[float, float, float]:
    return (triple.alpha, triple.beta, triple.gamma)


def _determinant3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def leading_minors(entries: np.ndarray) -> Tuple[float, float, float]:
    """Leading principal minors of a 3x3 matrix by direct expansion."""
    d1 = float(entries[0, 0])
    d2 = float(entries[0, 0] * entries[1, 1] - entries[0, 1] * entries[1, 0])
    return d1, d2, _determinant3(entries)


def assemble_Q(triple: ExponentTriple, a1: float, a2: float, a3: float) -> QForm:
    """Builds the quadratic form of the gradient terms in dL/dt.

    The form acts on ``T = (v w ∇u, u w ∇v, u v ∇w)``; dL/dt contains
    ``-∫ u^(α-2) / (v^(β+2) w^(γ+2)) (Q T)·T dx``, so Q positive definite means
    the diffusion terms cannot increase L.
    """
    alpha, beta, gamma = _as_tuple(triple)
    q11 = a1 * alpha * (alpha - 1.0)
    q22 = a2 * beta * (beta + 1.0)
    q33 = a3 * gamma * (gamma + 1.0)
    q12 = -alpha * beta * (a1 + a2) / 2.0
    q13 = -alpha * gamma * (a1 + a3) / 2.0
    q23 = beta * gamma * (a2 + a3) / 2.0
    entries = np.array(
        [
            [q11, q12, q13],
            [q12, q22, q23],
            [q13, q23, q33],
        ]
    )
    return QForm(entries=entries, minors=leading_minors(entries))


def minor_identity_rhs(triple: ExponentTriple, a: Sequence[float]) -> float:
    """Closed form of (α-1)·det Q in terms of the mismatch ratios A_ij."""
    alpha, beta, gamma = _as_tuple(triple)
    a1, a2, a3 = a
    A12, A13, A23 = amplification_ratios(a1, a2, a3)
    k = (alpha - 1.0) / alpha
    x12 = k * (beta + 1.0) / beta - A12**2
    x13 = k * (gamma + 1.0) / gamma - A13**2
    y = k * A23 - A12 * A13
    return alpha * (alpha * beta * gamma) ** 2 * a1 * a2 * a3 * (x12 * x13 - y**2)


def minor_identity_check(
    qform: QForm, triple: ExponentTriple, a: Sequence[float]
) -> float:
    """Relative residual between (α-1)·Δ3 by direct expansion and its closed form.

    Returns:
        float: ``|lhs - rhs| / max(|lhs|, |rhs|)``, 0 when both sides vanish.
    """
    lhs = (triple.alpha - 1.0) * qform.minors[2]
    rhs = minor_identity_rhs(triple, a)
    scale = max(abs(lhs), abs(rhs))
    if scale == 0:
        return 0.0
    return abs(lhs - rhs) / scale


def is_positive_definite(qform: QForm) -> bool:
    """Eigenvalue cross-check of the minor test."""
    return bool(np.linalg.eigvalsh(qform.entries).min() > 0)


def lemma1_constants(
    branch: BranchReport,
    triple: ExponentTriple,
    params: GMParams,
    floor_v: float,
    floor_w: float,
) -> Lemma1Constants:
    """Computes (ε, C, θ) of the interpolation inequality for the selected branch.

    ε starts at the midpoint of its admissible interval
    ``(0, min(q/(s+1), m/n, 1) - (p-1)/r)`` and is halved while θ is not in (0, 1).

    Args:
        branch (BranchReport): Output of `check_exponent_condition`.
        triple (ExponentTriple): Lyapunov exponents.
        params (GMParams): Model parameters.
        floor_v (float): Lower bound of v over the horizon.
        floor_w (float): Lower bound of w over the horizon.

    Raises:
        InfeasibleBranch: If the branch is infeasible.
        DegenerateEpsilon: If the admissible interval for ε is empty.

    Returns:
        Lemma1Constants: The constants, with the floors in their (y, z) roles.
    """
    if not branch.feasible:
        raise InfeasibleBranch(
            "The exponent condition fails for both inhibitors, no interpolation "
            "constants exist."
        )
    if not (floor_v > 0 and floor_w > 0):
        raise ValueError(f"Floors must be positive, got {floor_v!r} and {floor_w!r}.")

    p, q, r, s, m, n = branch_exponents(params, branch.selected_branch)
    alpha = triple.alpha
    if branch.selected_branch is Branch.VIA_V:
        weight_y, weight_z, h, l = triple.beta, triple.gamma, floor_v, floor_w
    else:
        weight_y, weight_z, h, l = triple.gamma, triple.beta, floor_w, floor_v

    lead = (p - 1.0) / r
    gap = min(q / (s + 1.0), ratio(m, n), 1.0) - lead
    if not gap > 0:
        raise DegenerateEpsilon(
            f"The admissible interval for epsilon is empty (width {gap!r})."
        )

    epsilon = gap / 2.0
    for _ in range(MAX_EPSILON_HALVINGS):
        theta = 1.0 - r * epsilon / (alpha * (1.0 - lead - epsilon))
        if 0.0 < theta < 1.0:
            break
        epsilon /= 2.0
    else:
        raise DegenerateEpsilon(f"No epsilon in (0, {gap!r}) gives theta in (0, 1).")

    exponent_h = (
        (s + 1.0) * lead - q + epsilon * (s + 1.0) - weight_y * r * epsilon / alpha
    )
    exponent_l = n * lead - m + epsilon * n - weight_z * r * epsilon / alpha
    log_C1 = (
        math.log(alpha)
        - (lead + epsilon) * math.log(weight_y)
        + exponent_h * math.log(h)
        + exponent_l * math.log(l)
    )
    young_exponent = r / (r - (p - 1.0) - r * epsilon)
    with np.errstate(over="ignore"):
        C1 = float(np.exp(log_C1))
        bigC = float(np.exp(young_exponent * log_C1))

    logger.debug(
        "Interpolation constants (%s): epsilon=%r theta=%r C=%r",
        branch.selected_branch.value, epsilon, theta, bigC,
    )
    return Lemma1Constants(
        epsilon=epsilon, bigC=bigC, theta=theta, floor_y=h, floor_z=l, C1=C1,
        p=p, q=q, r=r, s=s, m=m, n=n,
        alpha=alpha, weight_y=weight_y, weight_z=weight_z,
    )


def proof_constants(
    triple: ExponentTriple,
    params: GMParams,
    lemma1: Lemma1Constants,
    domain_measure: float,
    C0: float,
) -> ProofConstants:
    """Aggregates the constants of the differential inequality for L.

    ``C2 = (1/C0)^((β+γ)/α)``, ``C3 = C |Ω|^(1-θ)``, ``C4 = C2 |Ω|^(1/α)`` and
    ``C5 = max(C3, C4)``, so that
    ``dL/dt <= -μ L + C5 (L^θ + α σ L^((α-1)/α))``.
    """
    if not (C0 > 0 and domain_measure > 0):
        raise ValueError(
            f"C0 and |Ω| must be positive, got {C0!r} and {domain_measure!r}."
        )
    alpha, beta, gamma = _as_tuple(triple)
    C2 = (1.0 / C0) ** ((beta + gamma) / alpha)
    C3 = lemma1.bigC * domain_measure ** (1.0 - lemma1.theta)
    C4 = C2 * domain_measure ** (1.0 / alpha)
    return ProofConstants(C2=C2, C3=C3, C4=C4, C5=max(C3, C4))


def kappa_bound(
    W0: float, mu: float, terms: Iterable[Tuple[float, float]]
) -> float:
    """Maximal root κ of ``x - Σ c_j x^θ_j = W0``.

    For a constant forcing f_j the coefficient is ``c_j = f_j / μ``, the supremum of
    ``∫_0^t exp(-μ(t-ξ)) f_j dξ``. Any W with ``W' <= -μ W + Σ f_j W^θ_j`` and
    ``W(0) = W0`` then stays below κ.

    The function ``g(x) = x - W0 - Σ c_j x^θ_j`` is convex with ``g(W0) <= 0``, so
    the root is bracketed by doubling upward from ``max(W0, 1)`` and then bisected
    to a relative width of 1e-12. The upper end of the final bracket is returned.

    Raises:
        NonPositiveMu: If mu <= 0.
        IterationLimit: If no upper bracket is found.
    """
    if not mu > 0:
        raise NonPositiveMu(f"mu must be positive, got {mu!r}.")
    terms = [(float(c), float(theta)) for c, theta in terms]
    for c, theta in terms:
        if c < 0 or not 0 < theta < 1:
            raise ValueError(
                f"Each term needs c >= 0 and theta in (0, 1), got ({c!r}, {theta!r})."
            )
    if W0 < 0:
        raise ValueError(f"W0 must be non-negative, got {W0!r}.")
    if all(c == 0 for c, _ in terms):
        return float(W0)

    def g(x: float) -> float:
        return x - W0 - sum(c * x**theta for c, theta in terms)

    lo = float(W0)
    hi = max(float(W0), 1.0)
    for _ in range(4096):
        if g(hi) > 0:
            break
        hi *= 2.0
        if math.isinf(hi):
            break
    else:
        raise IterationLimit("Could not bracket the maximal root for kappa.")
    if math.isinf(hi):
        raise IterationLimit("The kappa equation has no finite bracket.")

    for _ in range(4096):
        if hi - lo <= KAPPA_RTOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def kappa_infinity(mu: float, terms: Iterable[Tuple[float, float]]) -> float:
    """Asymptotic ceiling: the maximal root of ``x - Σ c_j x^θ_j = 0``.

    Bounds ``limsup L(t)`` as t grows, independently of the initial value.
    """
    return kappa_bound(0.0, mu, terms)


@dataclass(frozen=True)
class Certificate:
    """Every constant of the boundedness argument for one parameter set and horizon."""

    params: GMParams
    triple: ExponentTriple
    A12: float
    A13: float
    A23: float
    alpha_condition: bool
    beta_condition: bool
    coupling_condition: bool
    minors_positive: bool
    mu_positive: bool
    mu: float
    branch: BranchReport
    delta1: float
    delta2: float
    delta3: float
    q_min_eigenvalue: float
    lemma1: Lemma1Constants
    C0: float
    C2: float
    C3: float
    C4: float
    C5: float
    kappa: float
    kappa_inf: float
    horizon_T: float
    L0: float
    domain_measure: float
    ic_min_u: float
    ic_min_v: float
    ic_min_w: float

    @property
    def valid(self) -> bool:
        return (
            self.branch.feasible
            and self.alpha_condition
            and self.beta_condition
            and self.coupling_condition
            and self.minors_positive
            and self.mu_positive
            and self.kappa >= self.L0
        )

    def kappa_terms(self) -> List[Tuple[float, float]]:
        """The (c_j, θ_j) pairs of the kappa equation."""
        alpha = self.triple.alpha
        return [
            (self.C5 / self.mu, self.lemma1.theta),
            (alpha * self.params.sigma * self.C5 / self.mu, (alpha - 1.0) / alpha),
        ]

    def to_record(self) -> Dict[str, Union[float, bool, str]]:
        """Flattens the certificate into ordered ``name -> value`` pairs."""
        record: Dict[str, Union[float, bool, str]] = {"valid": self.valid}
        for name, value in self.params.to_dict().items():
            record[f"params.{name}"] = value
        record["alpha"] = self.triple.alpha
        record["beta"] = self.triple.beta
        record["gamma"] = self.triple.gamma
        record["branch"] = self.branch.selected_branch.value
        record["branch.condition_value_left"] = self.branch.condition_value_left
        record["branch.bound_v"] = self.branch.bound_v_branch
        record["branch.bound_w"] = self.branch.bound_w_branch
        for f in fields(self):
            if f.name in ("params", "triple", "branch", "lemma1"):
                continue
            record[f.name] = getattr(self, f.name)
        for f in fields(self.lemma1):
            record[f"lemma1.{f.name}"] = getattr(self.lemma1, f.name)
        return record

    @classmethod
    def from_record(cls, record: Dict[str, str]) -> "Certificate":
        """Rebuilds a certificate from the string values of `to_record`."""

        def number(key: str) -> float:
            return float(record[key])

        def flag(key: str) -> bool:
            return record[key].strip().lower() == "true"

        params = validate_params(
            {k[7:]: v for k, v in record.items() if k.startswith("params.")}
        )
        branch = BranchReport(
            number("branch.condition_value_left"),
            number("branch.bound_v"),
            number("branch.bound_w"),
            Branch(record["branch"].strip()),
        )
        lemma1 = Lemma1Constants(
            **{f.name: number(f"lemma1.{f.name}") for f in fields(Lemma1Constants)}
        )
        values: Dict[str, object] = {
            "params": params,
            "triple": ExponentTriple(number("alpha"), number("beta"), number("gamma")),
            "branch": branch,
            "lemma1": lemma1,
        }
        for f in fields(cls):
            if f.name in values:
                continue
            is_flag = f.type in (bool, "bool")
            values[f.name] = flag(f.name) if is_flag else number(f.name)
        return cls(**values)  # type: ignore[arg-type]


def format_value(value: Union[float, bool, str]) -> str:
    """Round-trip text form: shortest repr for floats, lower-case booleans."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, int, np.floating)):
        return repr(float(value))
    return str(value)


def certificate_to_text(certificate: Certificate) -> str:
    """Serializes a certificate to ``name = value`` lines."""
    lines = [f"{k} = {format_value(v)}" for k, v in certificate.to_record().items()]
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str) -> Certificate:
    """Parses the ``name = value`` text written by `certificate_to_text`.

    Raises:
        ValueError: If a line has no ``=`` or a required key is missing.
    """
    record = {}
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"Line {number} of the certificate has no '=': {line!r}")
        key, value = stripped.split("=", 1)
        record[key.strip()] = value.strip()
    try:
        return Certificate.from_record(record)
    except KeyError as err:
        raise ValueError(f"The certificate is missing the entry {err}.") from err


def build_certificate(
    params: GMParams,
    ic_minima: Tuple[float, float, float],
    domain_measure: float,
    horizon_T: float,
    L0: float,
) -> Certificate:
    """Runs the whole certification pipeline for one parameter set.

    branch check -> triple search -> condition flags -> Q minors -> decay floors
    of v and w at T* -> interpolation constants -> C2..C5 -> κ.

    Args:
        params (GMParams): Model parameters.
        ic_minima (Tuple[float, float, float]): Minima of the initial u, v, w.
        domain_measure (float): |Ω|.
        horizon_T (float): The horizon T* the bound is valid on.
        L0 (float): Lyapunov value of the initial data for the returned triple.
            `monitor.lyapunov_value` computes it from the initial state.

    Raises:
        PreconditionViolated: If an initial minimum is not positive.
        InfeasibleBranch: If the exponent condition fails.

    Returns:
        Certificate: The certificate with all flags set.
    """
    if not all(m > 0 for m in ic_minima):
        raise PreconditionViolated(
            f"Initial data must be strictly positive, got minima {ic_minima}."
        )
    if not horizon_T > 0:
        raise ValueError(f"The horizon must be positive, got {horizon_T!r}.")

    branch = check_exponent_condition(params)
    if not branch.feasible:
        raise InfeasibleBranch(
            f"p1 - 1 = {branch.condition_value_left!r} is not below "
            f"max({branch.bound_v_branch!r}, {branch.bound_w_branch!r})."
        )

    A12, A13, A23 = amplification_ratios(*params.a)
    triple = find_admissible_triple(params)
    checks = check_triple(triple, params)
    qform = assemble_Q(triple, *params.a)

    floor_v = math.exp(-params.b2 * horizon_T) * ic_minima[1]
    floor_w = math.exp(-params.b3 * horizon_T) * ic_minima[2]
    C0 = min(floor_v, floor_w)
    lemma1 = lemma1_constants(branch, triple, params, floor_v, floor_w)
    proof = proof_constants(triple, params, lemma1, domain_measure, C0)

    terms = [
        (proof.C5 / checks.mu, lemma1.theta),
        (
            triple.alpha * params.sigma * proof.C5 / checks.mu,
            (triple.alpha - 1.0) / triple.alpha,
        ),
    ]
    kappa = kappa_bound(L0, checks.mu, terms)
    kappa_inf = kappa_infinity(checks.mu, terms)

    certificate = Certificate(
        params=params,
        triple=triple,
        A12=A12, A13=A13, A23=A23,
        alpha_condition=checks.alpha_condition,
        beta_condition=checks.beta_condition,
        coupling_condition=checks.coupling_condition,
        minors_positive=qform.positive_minors,
        mu_positive=checks.mu_positive,
        mu=checks.mu,
        branch=branch,
        delta1=qform.minors[0], delta2=qform.minors[1], delta3=qform.minors[2],
        q_min_eigenvalue=float(np.linalg.eigvalsh(qform.entries).min()),
        lemma1=lemma1,
        C0=C0, C2=proof.C2, C3=proof.C3, C4=proof.C4, C5=proof.C5,
        kappa=kappa,
        kappa_inf=kappa_inf,
        horizon_T=float(horizon_T),
        L0=float(L0),
        domain_measure=float(domain_measure),
        ic_min_u=float(ic_minima[0]),
        ic_min_v=float(ic_minima[1]),
        ic_min_w=float(ic_minima[2]),
    )
    logger.info(
        "Certificate (%s): mu=%r kappa=%r valid=%s",
        branch.selected_branch.value, checks.mu, kappa, certificate.valid,
    )
    return certificate
