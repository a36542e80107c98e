import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.legendre import leggauss
from scipy.special import exp1

from swiptsim.errors import AccuracyError, DomainError
from swiptsim.numerics import (
    GL5,
    IntegralArgs,
    PdfParams,
    integral_I_gl5,
    integral_I_ref,
    log_integral_I,
    pdf_X0,
    pdf_Y0,
    psi,
)

import oracles

# 1 - e*E1(1), to 20 digits (integration by parts of the eps=1, beta=0 case)
ONE_MINUS_E_E1 = 0.40365263767680592566


def _mp_integral(e1, e2, b1, b2, lam):
    mpmath.mp.dps = 30
    f = lambda x: mpmath.exp(-(x + b1 / (1 + e1 * x) + b2 / (1 + e2 * x))) / ((1 + e1 * x) ** lam * (1 + e2 * x))
    return float(mpmath.quad(f, [0, 1, 10, 100, 1000, mpmath.inf]))


# --- reference integral ------------------------------------------------------

def test_ref_pure_exponential():
    assert integral_I_ref(IntegralArgs(0, 0, 0, 0, 1)) == pytest.approx(1.0, abs=1e-12)


def test_ref_collapsed_denominators():
    assert integral_I_ref(IntegralArgs(0, 0, 0.7, 1.3, 3)) == pytest.approx(math.exp(-2.0), abs=1e-12)


def test_ref_exponential_integral_case():
    assert ONE_MINUS_E_E1 == pytest.approx(1 - math.e * exp1(1.0), rel=1e-14)
    # brute-force midpoint sum as a second, cruder route
    h = 60.0 / 1_000_000
    x = (np.arange(1_000_000) + 0.5) * h
    riemann = float(np.sum(np.exp(-x) / (1 + x) ** 2) * h)
    assert riemann == pytest.approx(ONE_MINUS_E_E1, abs=1e-8)
    assert integral_I_ref(IntegralArgs(1, 1, 0, 0, 1)) == pytest.approx(ONE_MINUS_E_E1, abs=1e-12)


# Frozen from a 30-digit mpmath quadrature of the x-domain integral.
FROZEN = [
    ((0.5, 3.0, 2.0, 0.1, 3.0), 0.038709435429014866),
    ((0.01, 0.02, 2.0, 3.0, 1.0), 0.0070756679873578282),
    ((10.0, 0.1, 10.0, 1.0, 7.0), 3.7126408183836575e-06),
    ((100.0, 100.0, 100.0, 100.0, 1.0), 7.0535577732685269e-06),
]


@pytest.mark.parametrize("args,expected", FROZEN)
def test_ref_frozen_values(args, expected):
    assert integral_I_ref(IntegralArgs(*args)) == pytest.approx(expected, rel=1e-11)


def test_ref_matches_mpmath_on_a_spread_of_arguments():
    rng = np.random.default_rng(7)
    for _ in range(6):
        e1, e2 = 10.0 ** rng.uniform(-3, 2, 2)
        b1, b2 = 10.0 ** rng.uniform(-1, 2, 2)
        lam = float(rng.choice([1, 3, 7]))
        expected = _mp_integral(e1, e2, b1, b2, lam)
        got = integral_I_ref(IntegralArgs(e1, e2, b1, b2, lam))
        assert got == pytest.approx(expected, rel=1e-9, abs=1e-14)


def test_ref_vectorised_matches_scalar_calls():
    e = np.array([0.1, 1.0, 30.0])
    b = np.array([0.0, 5.0, 80.0])
    vec = integral_I_ref(IntegralArgs(e, e[::-1], b, b[::-1], 3.0))
    for i in range(3):
        assert vec[i] == integral_I_ref(IntegralArgs(e[i], e[::-1][i], b[i], b[::-1][i], 3.0))


def test_ref_large_beta_stays_in_log_domain():
    # I itself underflows; ln I frozen from a 30-digit mpmath quadrature
    args = IntegralArgs(0.001, 0.002, 1e5, 2e5, 1.0)
    assert integral_I_ref(args) == 0.0
    assert log_integral_I(args, mode="exact") == pytest.approx(-27539.330427915017, abs=1e-8)


@pytest.mark.parametrize("bad", [
    dict(eps1=float("nan")),
    dict(eps2=float("inf")),
    dict(eps1=-1.0),
    dict(beta2=-0.5),
    dict(lam=0.0),
])
def test_invalid_arguments_raise_domain_error(bad):
    kw = dict(eps1=1.0, eps2=1.0, beta1=1.0, beta2=1.0, lam=1.0)
    kw.update(bad)
    with pytest.raises(DomainError):
        IntegralArgs(**kw)


@pytest.mark.parametrize("tol", [0.0, 1e-5, -1e-12])
def test_ref_rejects_tolerance_outside_range(tol):
    with pytest.raises(DomainError):
        integral_I_ref(IntegralArgs(1, 1, 1, 1, 1), tol=tol)


def test_ref_budget_exhaustion_carries_estimate():
    with pytest.raises(AccuracyError) as info:
        integral_I_ref(IntegralArgs(1, 1, 1, 1, 1), max_depth=1)
    assert info.value.estimate == pytest.approx(_mp_integral(1, 1, 1, 1, 1), rel=1e-6)


# --- psi ---------------------------------------------------------------------------

def test_psi_at_one_is_exp_of_minus_beta_sum():
    assert psi(1.0, IntegralArgs(3.0, 0.2, 0.4, 1.1, 7)) == pytest.approx(math.exp(-1.5), rel=1e-15)


def test_psi_vanishes_near_zero():
    assert psi(1e-300, IntegralArgs(1, 1, 0, 0, 1)) < 1e-5


def test_psi_hand_value():
    assert psi(math.exp(-1), IntegralArgs(1, 1, 0, 0, 1)) == pytest.approx(0.25, rel=1e-15)


@pytest.mark.parametrize("z", [0.0, -0.1, 1.0000001, float("nan")])
def test_psi_outside_unit_interval(z):
    with pytest.raises(DomainError):
        psi(z, IntegralArgs(1, 1, 1, 1, 1))


args_strategy = st.builds(
    IntegralArgs,
    eps1=st.floats(0, 1e3),
    eps2=st.floats(0, 1e3),
    beta1=st.floats(0, 100),
    beta2=st.floats(0, 100),
    lam=st.floats(0.01, 10),
)


@given(z=st.floats(1e-300, 1.0), args=args_strategy)
def test_psi_lies_in_unit_interval(z, args):
    v = psi(z, args)
    assert 0 < v <= 1


@given(args=args_strategy)
def test_gl5_lies_in_unit_interval(args):
    v = integral_I_gl5(args)
    assert 0 < v <= 1


@given(args=st.builds(IntegralArgs, eps1=st.floats(0, 50), eps2=st.floats(0, 50),
                      beta1=st.floats(0, 50), beta2=st.floats(0, 50), lam=st.sampled_from([1.0, 3.0, 7.0])))
@settings(max_examples=60, deadline=None)
def test_ref_lies_in_unit_interval(args):
    v = integral_I_ref(args)
    assert 0 < v <= 1 + 1e-12


# --- GL-5 rule ------------------------------------------------------------------

def test_gl5_rule_structure():
    z, w = GL5.nodes, GL5.weights
    assert z[0] == 0.0
    assert z[1] == -z[2] and z[3] == -z[4]
    assert w[1] == w[2] and w[3] == w[4]
    assert abs(w.sum() - 2.0) <= 2 * np.finfo(float).eps


def test_gl5_rule_matches_library_nodes():
    ref_z, ref_w = leggauss(5)
    order = np.argsort(GL5.nodes)
    np.testing.assert_allclose(GL5.nodes[order], ref_z, atol=1e-15)
    np.testing.assert_allclose(GL5.weights[order], ref_w, atol=1e-15)


@pytest.mark.parametrize("k", range(10))
def test_gl5_integrates_monomials_exactly(k):
    exact = 0.0 if k % 2 else 2.0 / (k + 1)
    assert float(GL5.weights @ GL5.nodes ** k) == pytest.approx(exact, abs=1e-12)


def test_gl5_not_exact_at_degree_ten():
    assert abs(float(GL5.weights @ GL5.nodes ** 10) - 2.0 / 11) > 1e-4


def test_gl5_constant_integrand_is_exact():
    assert integral_I_gl5(IntegralArgs(0, 0, 0.7, 1.3, 3)) == pytest.approx(math.exp(-2.0), rel=1e-15)


def test_gl5_close_to_ref_at_unit_eps():
    args = IntegralArgs(1, 1, 0, 0, 1)
    assert integral_I_gl5(args) == pytest.approx(integral_I_ref(args), rel=1e-3)


def test_gl5_close_to_ref_at_small_eps():
    # stated as a 1e-3 budget; the rule misses it by about 3.5e-7 here
    args = IntegralArgs(0.01, 0.02, 2.0, 3.0, 1)
    assert integral_I_gl5(args) == pytest.approx(integral_I_ref(args), rel=1e-3)


def _grid(eps, betas, lams=(1.0, 3.0, 7.0)):
    g = np.array(list(itertools.product(eps, eps, betas, betas, lams))).T
    return IntegralArgs(*g)


def _log_rel_err(args):
    d = log_integral_I(args, "gl5") - log_integral_I(args, "exact")
    return np.abs(np.expm1(d))


def test_gl5_accuracy_region_small_eps():
    # five nodes resolve the z-domain integrand while eps ln z stays small
    err = _log_rel_err(_grid([1e-3], [0, 0.1, 1, 10]))
    assert err.max() < 5e-4


def test_gl5_accuracy_region_moderate_eps():
    err = _log_rel_err(_grid([1e-3, 1e-2, 1e-1, 1.0], [0, 0.1, 1]))
    assert err.max() < 2e-3


def test_gl5_degrades_for_large_eps_and_beta():
    # documents where the closed form stops being a faithful stand-in
    err = _log_rel_err(_grid([100.0], [0.0, 0.1]))
    assert err.min() > 0.5


# --- log-domain evaluation -------------------------------------------------------

@pytest.mark.parametrize("mode", ["gl5", "exact"])
def test_log_of_unit_integral_is_zero(mode):
    assert log_integral_I(IntegralArgs(0, 0, 0, 0, 1), mode) == pytest.approx(0.0, abs=1e-12)


def test_log_gl5_without_underflow():
    assert log_integral_I(IntegralArgs(0, 0, 700, 700, 1), "gl5") == pytest.approx(-1400.0, abs=1e-9)


def test_log_gl5_matches_direct_log():
    args = IntegralArgs(1, 2, 5, 7, 1)
    assert log_integral_I(args, "gl5") == pytest.approx(math.log(integral_I_gl5(args)), abs=1e-12)


def test_log_exact_matches_direct_log():
    args = IntegralArgs(0.5, 3.0, 2.0, 0.1, 3.0)
    assert log_integral_I(args, "exact") == pytest.approx(math.log(FROZEN[0][1]), abs=1e-10)


@given(args=st.builds(IntegralArgs, eps1=st.floats(0, 100), eps2=st.floats(0, 100),
                      beta1=st.floats(0, 500), beta2=st.floats(0, 500), lam=st.floats(0.5, 8)))
def test_log_gl5_consistent_with_linear(args):
    lin = integral_I_gl5(args)
    if lin > 1e-250:
        assert log_integral_I(args, "gl5") == pytest.approx(math.log(lin), abs=1e-10)


def test_log_mode_unknown():
    with pytest.raises(ValueError):
        log_integral_I(IntegralArgs(1, 1, 1, 1, 1), "simpson")


# --- monotonicity in beta ----------------------------------------------------------

@pytest.mark.parametrize("which", ["beta1", "beta2"])
def test_integral_strictly_decreasing_in_beta(which):
    betas = np.array([0.0, 0.1, 1.0, 10.0, 100.0])
    eps = 10.0 ** np.arange(-3, 3)
    for e1, e2, lam in itertools.product(eps, eps, (1.0, 3.0, 7.0)):
        kw = dict(eps1=e1, eps2=e2, beta1=1.0, beta2=1.0, lam=lam)
        kw[which] = betas
        args = IntegralArgs(**kw)
        for f in (integral_I_gl5, integral_I_ref):
            vals = f(args)
            assert np.all(np.diff(vals) < 0), (f.__name__, e1, e2, lam, vals)


# --- densities of the relayed observation ---------------------------------------

X0_CASES = [
    PdfParams(1.5, 0.8, 0.6, 1.2, c=np.exp(1j * np.pi / 4)),
    PdfParams(0.4, 2.0, 1.0, 0.5, c=0.7 + 0.2j),
]


def test_pdf_x0_degenerates_to_gaussian():
    p = PdfParams(1e-12, 1.0, 1e-12, 1.3, c=1j)
    x = np.array([[0.3 + 0.1j, -0.4 + 0.8j], [1.0, 0.0]])
    expected = np.exp(-np.sum(np.abs(x) ** 2, axis=1) / 1.3) / (np.pi * 1.3) ** 2
    np.testing.assert_allclose(pdf_X0(x, p), expected, rtol=1e-9)


def test_pdf_y0_degenerates_to_gaussian():
    p = PdfParams(1e-12, 1.0, 1e-12, 0.7, p=2, M=3)
    y = np.array([0.3 + 0.1j, -0.4 + 0.8j, 0.2j])
    expected = np.exp(-np.sum(np.abs(y) ** 2) / 0.7) / (np.pi * 0.7) ** 3
    assert pdf_Y0(y, p) == pytest.approx(expected, rel=1e-9)


def test_pdf_y0_rejects_degenerate_alphabet():
    with pytest.raises(DomainError):
        pdf_Y0(np.array([1.0 + 0j]), PdfParams(1, 1, 1, 1, p=1, M=1))


def test_pdf_x0_depends_only_on_projection_radii():
    p = X0_CASES[1]
    rng = np.random.default_rng(3)
    phases = rng.uniform(0, 2 * np.pi, (5, 2))
    vals = [pdf_X0(oracles.x0_from_radii(0.8, 2.5, p.c, a, b), p) for a, b in phases]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-12)


@pytest.mark.parametrize("params", X0_CASES)
def test_pdf_x0_normalised(params):
    total = oracles.log_grid_integral(lambda a1, a2: oracles.reduced_density_x0(a1, a2, params),
                                      params.sigma2sq)
    assert total == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("M,p", [(2, 1), (4, 3)])
def test_pdf_y0_normalised(M, p):
    params = PdfParams(1.2, 0.9, 0.8, 1.1, p=p, M=M)
    total = oracles.log_grid_integral(lambda a1, a2: oracles.reduced_density_y0(a1, a2, params),
                                      params.sigma2sq)
    assert total == pytest.approx(1.0, abs=1e-3)


EDGES = np.array([0.0, 0.15, 0.4, 0.8, 1.5, 3.0, 6.0, 15.0])


def test_pdf_x0_histogram_of_direct_samples():
    params = X0_CASES[0]
    x = oracles.sample_x0(params, 1_000_000, np.random.default_rng(11))
    a1, a2 = oracles.x0_radii(x, params.c)
    pval = oracles.chi2_against_density(a1, a2, lambda u, v: oracles.reduced_density_x0(u, v, params),
                                        EDGES * params.sigma2sq, EDGES * params.sigma2sq)
    assert pval > 0.01


def test_pdf_y0_histogram_of_direct_samples():
    params = PdfParams(1.2, 0.9, 0.8, 1.1, p=1, M=2)
    y = oracles.sample_y0(params, 1_000_000, np.random.default_rng(12))
    a_rest, a_tone = oracles.y0_radii(y, params.p)
    pval = oracles.chi2_against_density(a_rest, a_tone, lambda u, v: oracles.reduced_density_y0(u, v, params),
                                        EDGES * params.sigma2sq, EDGES * params.sigma2sq)
    assert pval > 0.01


@given(a1=st.floats(0, 1e3), a2=st.floats(0, 1e3))
@settings(max_examples=40, deadline=None)
def test_pdf_x0_nonnegative(a1, a2):
    assert pdf_X0(oracles.x0_from_radii(a1, a2, 1j), X0_CASES[0]) >= 0
