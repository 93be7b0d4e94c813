import dataclasses
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gm3cert.certificate import (
    ExponentTriple,
    amplification_ratios,
    assemble_Q,
    build_certificate,
    certificate_from_text,
    certificate_to_text,
    check_triple,
    find_admissible_triple,
    is_positive_definite,
    kappa_bound,
    kappa_infinity,
    leading_minors,
    lemma1_constants,
    minor_identity_check,
    proof_constants,
)
from gm3cert.errors import (
    DegenerateEpsilon,
    InfeasibleBranch,
    NonPositiveCoefficient,
    NonPositiveMu,
    PreconditionViolated,
)
from gm3cert.model import Branch, BranchReport, check_exponent_condition

diffusion = st.floats(min_value=0.25, max_value=4.0)
decay = st.floats(min_value=0.5, max_value=2.0)

PHYLLOTAXIS_TRIPLE = ExponentTriple(5.0, 0.25, 0.25)


def phyllotaxis_certificate(params, horizon_T=1.0):
    return build_certificate(
        params, (1.0, 1.0, 1.0), domain_measure=1.0, horizon_T=horizon_T, L0=1.0
    )


def test_exponent_triple_needs_alpha_above_one():
    with pytest.raises(ValueError):
        ExponentTriple(1.0, 0.25, 0.25)
    with pytest.raises(ValueError):
        ExponentTriple(5.0, 0.0, 0.25)


def test_amplification_ratios():
    assert amplification_ratios(1.0, 1.0, 1.0) == (1.0, 1.0, 1.0)
    assert amplification_ratios(1.0, 4.0, 1.0)[0] == 1.25
    growing = [amplification_ratios(1.0, t, 1.0)[0] for t in (4.0, 9.0, 16.0)]
    assert growing == sorted(growing)
    assert growing[-1] == pytest.approx(17.0 / 8.0)
    with pytest.raises(NonPositiveCoefficient):
        amplification_ratios(1.0, 0.0, 1.0)


def test_check_triple_for_phyllotaxis(params):
    check = check_triple(PHYLLOTAXIS_TRIPLE, params)
    assert check.alpha_condition
    assert check.beta_condition
    assert check.coupling_condition
    assert check.mu == 4.5
    assert check.passed


def test_check_triple_failures(params, make_params):
    assert not check_triple(ExponentTriple(5.0, 0.6, 0.25), params).beta_condition
    check = check_triple(ExponentTriple(4.0, 0.25, 0.25), make_params(b2=3.0, b3=3.0))
    assert not check.alpha_condition
    assert not check.passed


def test_find_admissible_triple(params, make_params):
    assert find_admissible_triple(params) == PHYLLOTAXIS_TRIPLE
    assert find_admissible_triple(make_params(b2=2.0, b3=2.0)) == ExponentTriple(
        9.0, 0.25, 0.25
    )


@given(a=st.tuples(diffusion, diffusion, diffusion), b=st.tuples(decay, decay, decay))
@settings(max_examples=100, deadline=None)
def test_admissible_triples_give_positive_definite_forms(make_params, a, b):
    params = make_params(a1=a[0], a2=a[1], a3=a[2], b1=b[0], b2=b[1], b3=b[2])
    triple = find_admissible_triple(params)
    check = check_triple(triple, params)
    assert check.passed
    assert check.mu > 0

    qform = assemble_Q(triple, *params.a)
    assert qform.positive_minors
    assert is_positive_definite(qform)
    assert minor_identity_check(qform, triple, params.a) < 1e-10


@given(
    a=st.tuples(diffusion, diffusion, diffusion),
    scale=st.floats(min_value=0.01, max_value=100.0),
)
@settings(max_examples=50, deadline=None)
def test_triple_search_is_scale_free(make_params, a, scale):
    base = find_admissible_triple(make_params(a1=a[0], a2=a[1], a3=a[2]))
    scaled = find_admissible_triple(
        make_params(a1=scale * a[0], a2=scale * a[1], a3=scale * a[2])
    )
    assert scaled.alpha == base.alpha
    assert scaled.beta == pytest.approx(base.beta, rel=1e-12)
    assert scaled.gamma == pytest.approx(base.gamma, rel=1e-12)


def test_assemble_Q_for_phyllotaxis():
    qform = assemble_Q(PHYLLOTAXIS_TRIPLE, 1.0, 1.0, 1.0)
    expected = np.array(
        [
            [20.0, -1.25, -1.25],
            [-1.25, 0.3125, 0.0625],
            [-1.25, 0.0625, 0.3125],
        ]
    )
    np.testing.assert_array_equal(qform.entries, expected)
    np.testing.assert_array_equal(qform.entries, qform.entries.T)
    d1, d2, d3 = qform.minors
    assert d1 == 20.0
    assert d2 == pytest.approx(4.6875, rel=1e-12)
    assert d3 == pytest.approx(1.09375, rel=1e-12)
    assert d3 == pytest.approx(np.linalg.det(expected), rel=1e-12)
    assert leading_minors(expected) == qform.minors


def test_second_minor_closed_form():
    alpha, beta = 5.0, 0.25
    qform = assemble_Q(PHYLLOTAXIS_TRIPLE, 1.0, 1.0, 1.0)
    closed = alpha**2 * beta**2 * ((alpha - 1) / alpha * (beta + 1) / beta - 1.0)
    assert qform.minors[1] == pytest.approx(closed, rel=1e-12)


def test_first_minor_vanishes_as_alpha_approaches_one():
    minors = [
        assemble_Q(ExponentTriple(1.0 + eps, 0.25, 0.25), 1.0, 1.0, 1.0).minors[0]
        for eps in (1e-1, 1e-3, 1e-6)
    ]
    assert all(d > 0 for d in minors)
    assert minors == sorted(minors, reverse=True)
    assert minors[-1] < 1e-5


def test_minor_identity():
    qform = assemble_Q(PHYLLOTAXIS_TRIPLE, 1.0, 1.0, 1.0)
    assert (PHYLLOTAXIS_TRIPLE.alpha - 1.0) * qform.minors[2] == pytest.approx(4.375)
    assert minor_identity_check(qform, PHYLLOTAXIS_TRIPLE, (1.0, 1.0, 1.0)) < 1e-12

    symmetric = ExponentTriple(2.0, 2.0, 2.0)
    qform = assemble_Q(symmetric, 3.0, 3.0, 3.0)
    assert minor_identity_check(qform, symmetric, (3.0, 3.0, 3.0)) < 1e-12


def test_interpolation_constants_for_phyllotaxis(params):
    branch = check_exponent_condition(params)
    constants = lemma1_constants(branch, PHYLLOTAXIS_TRIPLE, params, 1.0, 1.0)
    assert constants.exponents == (2.0, 1.0, 2.0, 0.0, 1.0, 0.0)
    assert constants.epsilon == 0.25
    assert constants.theta == pytest.approx(0.6, rel=1e-14)
    assert constants.C1 == pytest.approx(5.0 * 0.25**-0.75, rel=1e-12)
    assert constants.bigC == pytest.approx(4.0e4, rel=1e-9)
    assert (constants.weight_y, constants.weight_z) == (0.25, 0.25)


def test_epsilon_shrinks_with_the_admissible_gap(params, make_params):
    wide = lemma1_constants(
        check_exponent_condition(params), PHYLLOTAXIS_TRIPLE, params, 1.0, 1.0
    )
    narrow_params = make_params(p1=2.5)
    narrow_branch = check_exponent_condition(narrow_params)
    narrow = lemma1_constants(
        narrow_branch, PHYLLOTAXIS_TRIPLE, narrow_params, 1.0, 1.0
    )
    assert narrow.epsilon == wide.epsilon / 2


def test_w_branch_swaps_weights_and_floors(make_params):
    params = make_params(p2=0.0, p3=2.0)
    branch = check_exponent_condition(params)
    triple = ExponentTriple(5.0, 0.25, 0.125)
    constants = lemma1_constants(branch, triple, params, floor_v=0.5, floor_w=0.8)
    assert branch.selected_branch is Branch.VIA_W
    assert (constants.weight_y, constants.weight_z) == (0.125, 0.25)
    assert (constants.floor_y, constants.floor_z) == (0.8, 0.5)


def test_interpolation_constants_need_a_feasible_branch(params, make_params):
    infeasible = check_exponent_condition(make_params(p1=4.0))
    with pytest.raises(InfeasibleBranch):
        lemma1_constants(infeasible, PHYLLOTAXIS_TRIPLE, params, 1.0, 1.0)

    # A report claiming the v-branch for exponents that don't satisfy it.
    forged = BranchReport(3.0, 2.0, 1.0, Branch.VIA_V)
    with pytest.raises(DegenerateEpsilon):
        lemma1_constants(forged, PHYLLOTAXIS_TRIPLE, make_params(p1=4.0), 1.0, 1.0)


@given(
    p1=st.floats(min_value=1.05, max_value=2.9),
    p2=st.floats(min_value=0.5, max_value=3.0),
    p3=st.floats(min_value=0.5, max_value=3.0),
    q=st.tuples(
        st.floats(min_value=0.2, max_value=2.0),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    ),
    r=st.tuples(
        st.floats(min_value=0.2, max_value=2.0),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    ),
    floors=st.tuples(
        st.floats(min_value=0.05, max_value=2.0),
        st.floats(min_value=0.05, max_value=2.0),
    ),
)
@settings(max_examples=100, deadline=None)
def test_theta_and_epsilon_stay_in_range(make_params, p1, p2, p3, q, r, floors):
    params = make_params(
        p1=p1, p2=p2, p3=p3, q1=q[0], q2=q[1], q3=q[2], r1=r[0], r2=r[1], r3=r[2]
    )
    branch = check_exponent_condition(params)
    assume(branch.feasible)
    constants = lemma1_constants(
        branch, find_admissible_triple(params), params, floors[0], floors[1]
    )
    p, q_, r_, s, m, n = constants.exponents
    gap = min(q_ / (s + 1), m / n if n else math.inf, 1.0) - (p - 1) / r_
    assert 0 < constants.theta < 1
    assert 0 < constants.epsilon < gap


def test_proof_constants(params):
    branch = check_exponent_condition(params)
    lemma1 = lemma1_constants(branch, PHYLLOTAXIS_TRIPLE, params, 1.0, 1.0)

    unit = proof_constants(PHYLLOTAXIS_TRIPLE, params, lemma1, 1.0, C0=1.0)
    assert (unit.C2, unit.C3, unit.C4) == (1.0, lemma1.bigC, 1.0)
    assert unit.C5 == max(unit.C3, unit.C4)

    quarter = proof_constants(PHYLLOTAXIS_TRIPLE, params, lemma1, 1.0, C0=0.25)
    assert quarter.C2 == pytest.approx(4.0**0.1, rel=1e-14)

    doubled = proof_constants(PHYLLOTAXIS_TRIPLE, params, lemma1, 2.0, C0=1.0)
    assert doubled.C3 / unit.C3 == pytest.approx(2.0 ** (1.0 - lemma1.theta), rel=1e-14)


def test_kappa_bound_roots():
    assert kappa_bound(3.0, 1.0, [(0.0, 0.5)]) == 3.0
    assert kappa_bound(0.0, 1.0, [(1.0, 0.5)]) == pytest.approx(1.0, rel=1e-11)
    expected = ((1.0 + math.sqrt(17.0)) / 2.0) ** 2
    assert kappa_bound(4.0, 1.0, [(1.0, 0.5)]) == pytest.approx(expected, rel=1e-10)
    assert kappa_infinity(1.0, [(1.0, 0.5)]) == pytest.approx(1.0, rel=1e-11)
    with pytest.raises(NonPositiveMu):
        kappa_bound(1.0, 0.0, [(1.0, 0.5)])
    with pytest.raises(ValueError):
        kappa_bound(1.0, 1.0, [(1.0, 1.5)])


@given(
    W0=st.floats(min_value=0.0, max_value=100.0),
    terms=st.lists(
        st.tuples(
            st.floats(min_value=0.0, max_value=50.0, allow_subnormal=False),
            st.floats(min_value=0.05, max_value=0.95),
        ),
        min_size=1,
        max_size=3,
    ),
)
@settings(max_examples=100, deadline=None)
def test_kappa_is_the_maximal_root(W0, terms):
    kappa = kappa_bound(W0, 1.0, terms)

    def g(x):
        return x - W0 - sum(c * x**theta for c, theta in terms)

    scale = 1.0 + kappa + sum(c * kappa**theta for c, theta in terms)
    assert kappa >= W0
    assert abs(g(kappa)) <= 1e-10 * scale
    if kappa > 0:
        assert g(2.0 * kappa) > 0


def test_phyllotaxis_certificate(params):
    certificate = phyllotaxis_certificate(params)
    assert certificate.valid
    assert certificate.triple == PHYLLOTAXIS_TRIPLE
    assert certificate.mu == 4.5
    assert certificate.kappa >= certificate.L0 == 1.0
    assert certificate.kappa_inf <= certificate.kappa
    assert (certificate.A12, certificate.A13, certificate.A23) == (1.0, 1.0, 1.0)
    assert certificate.C0 == pytest.approx(math.exp(-1.0))
    assert certificate.branch.selected_branch is Branch.VIA_V
    assert certificate.q_min_eigenvalue > 0


def test_two_component_embedding_is_certified():
    from gm3cert.cli.presets import gm2_rothe

    certificate = phyllotaxis_certificate(gm2_rothe().params)
    assert certificate.valid


def test_infeasible_and_non_positive_inputs(params, make_params):
    with pytest.raises(InfeasibleBranch):
        phyllotaxis_certificate(make_params(p1=4.0))
    with pytest.raises(PreconditionViolated):
        build_certificate(params, (1.0, 0.0, 1.0), 1.0, 1.0, 1.0)


def test_kappa_grows_with_the_horizon(params):
    kappas = [phyllotaxis_certificate(params, T).kappa for T in (1.0, 2.0, 4.0)]
    assert kappas == sorted(kappas)


def test_certificate_text_round_trip(params):
    certificate = phyllotaxis_certificate(params)
    text = certificate_to_text(certificate)
    assert text.splitlines()[0] == "valid = true"
    assert "branch = ViaV" in text
    assert "kappa = " + repr(certificate.kappa) in text.splitlines()
    for key in ("alpha_condition", "beta_condition", "coupling_condition"):
        assert f"{key} = true" in text.splitlines()
    assert "cond_1_5" not in text
    assert certificate_from_text(text) == certificate


def test_certificate_text_errors(params):
    text = certificate_to_text(phyllotaxis_certificate(params))
    lines = text.splitlines()
    broken = "\n".join(line for line in lines if not line.startswith("mu ="))
    with pytest.raises(ValueError, match="mu"):
        certificate_from_text(broken)
    with pytest.raises(ValueError, match="no '='"):
        certificate_from_text(text + "garbage\n")


def test_lowered_kappa_is_still_parsed(params):
    certificate = phyllotaxis_certificate(params)
    lowered = dataclasses.replace(certificate, kappa=certificate.kappa / 10)
    assert certificate_from_text(certificate_to_text(lowered)).kappa == lowered.kappa
