import json
import math
import pathlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from memcap import (
    BandTooWide,
    ChannelParams,
    DomainError,
    ZeroCapacityRegion,
    ap_error_bound,
    build_toeplitz,
    capped_test_function,
    channel_coefficients,
    derivative_l2_norm,
    ergodic_average,
    ergodic_report,
    max_transmissivity,
    optimal_band,
    singular_values,
    step_bounds,
    symbol_integral,
)
from memcap.avram_parter import TestFunction

GOLDEN = json.loads((pathlib.Path(__file__).parent / "golden" / "reference_values.json").read_text())


def constant_function(c, upper=10.0):
    return TestFunction(lambda x: np.full_like(np.asarray(x, dtype=float), c), 0.0, abs(c), 0.0, upper)


# --- test functions ---------------------------------------------------------------

def test_capped_qubit_function_values():
    p = ChannelParams(0.8, 0.2)
    F = capped_test_function(p, "qubit")
    M = max_transmissivity(p)
    assert F(0.0) == 0.0
    assert F(0.5) == 0.0
    assert F(math.sqrt(M)) == pytest.approx(math.log2(M / (1 - M)), rel=1e-14)
    assert F(F.support_upper) == pytest.approx(0.0, abs=1e-12)
    assert F(F.support_upper + 1.0) == 0.0


def test_capped_ebit_memoryless_half():
    F = capped_test_function(ChannelParams(0.5, 0.0), "ebit")
    assert F(math.sqrt(0.5)) == pytest.approx(1.0, rel=1e-15)
    assert F.sup_norm == pytest.approx(1.0)
    assert F.derivative_l1 == pytest.approx(2.0)


def test_capped_qubit_needs_positive_region():
    with pytest.raises(ZeroCapacityRegion):
        capped_test_function(ChannelParams(0.25, 1 / 9), "qubit")


@settings(max_examples=40, deadline=None)
@given(st.floats(0.55, 0.97), st.floats(0.0, 0.8), st.sampled_from(["qubit", "ebit"]))
def test_capped_function_is_lipschitz(lam, mu, kind):
    F = capped_test_function(ChannelParams(lam, mu), kind)
    x = np.union1d(np.linspace(-0.1, F.support_upper + 0.2, 20001), F.kinks)
    y = F(x)
    slopes = np.abs(np.diff(y) / np.diff(x))
    assert slopes.max() <= F.lipschitz_L * (1 + 1e-9)
    assert np.abs(y).max() <= F.sup_norm * (1 + 1e-12)
    # total variation of a single-bump function is twice its peak
    assert np.sum(np.abs(np.diff(y))) == pytest.approx(F.derivative_l1, rel=1e-6)


# --- averages and integrals -------------------------------------------------------

def test_ergodic_average_trivial_cases():
    F = capped_test_function(ChannelParams(0.7, 0.0), "ebit")
    flat = np.full(12, math.sqrt(0.7))
    assert ergodic_average(flat, F) == pytest.approx(F(math.sqrt(0.7)))
    zero = TestFunction(lambda x: np.zeros_like(np.asarray(x, dtype=float)), 0.0, 0.0, 0.0, 1.0)
    assert ergodic_average(np.linspace(0, 1, 9), zero) == 0.0


def test_ergodic_average_golden():
    p = ChannelParams(0.5, 0.25)
    F = capped_test_function(p, "qubit")
    s = singular_values(build_toeplitz(channel_coefficients(p), 128))
    assert ergodic_average(s, F) == pytest.approx(GOLDEN["ergodic_average_0.5_0.25_n128_qubit"], abs=1e-12)


def test_symbol_integral_trivial_cases():
    p = ChannelParams(0.6, 0.0)
    F = capped_test_function(p, "ebit")
    assert symbol_integral(p, F) == pytest.approx(F(math.sqrt(0.6)))
    assert symbol_integral(ChannelParams(0.6, 0.4), constant_function(2.5)) == pytest.approx(2.5, rel=1e-12)


def test_symbol_integral_matches_trapezoid_oracle():
    p = ChannelParams(0.7, 0.3)
    F = capped_test_function(p, "ebit")
    ref = oracles.trapezoid_average(0.7, 0.3, lambda e: F(np.sqrt(e)))
    assert symbol_integral(p, F, tol=1e-10) == pytest.approx(ref, abs=1e-10)


# --- explicit bound ---------------------------------------------------------------

def test_error_bound_zero_norms():
    assert ap_error_bound(10, 2, 0.0, 1.0, 1.0, 0.0, 0.0) == 0.0


def test_error_bound_unit_norms():
    want = (8 / math.sqrt(2 * math.pi) + 4 * math.pi) * 4 ** (-4 / 7) + 6 * 4 ** (-5 / 7)
    assert ap_error_bound(4, 2, 1.0, 1.0, 1.0, 1.0, 1.0) == pytest.approx(want, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 10**6 - 1), st.integers(1, 5), st.floats(0.01, 10), st.floats(0.01, 10))
def test_error_bound_decreases(n, k, L, norm):
    assert ap_error_bound(10**6, k, L, norm, norm, norm, norm) < ap_error_bound(n, k, L, norm, norm, norm, norm)


def test_error_bound_domain():
    with pytest.raises(DomainError):
        ap_error_bound(3, 2, 1, 1, 1, 1, 1)
    with pytest.raises(DomainError):
        ap_error_bound(10, 0, 1, 1, 1, 1, 1)


def test_optimal_band_examples():
    assert optimal_band(4, 2) == 1
    assert optimal_band(128, 1) == 6


@settings(max_examples=200, deadline=None)
@given(st.integers(4, 10**12), st.integers(1, 6))
def test_optimal_band_is_exact_floor(n, k):
    N = optimal_band(n, k)
    e = 2 * k + 3
    assert N**e <= n * n < (N + 1) ** e
    assert 2 * N < n


def test_step_bounds_trivial():
    b = step_bounds(64, 3, 2, 0.0, 1.0, 1.0, 0.0, 0.0)
    assert (b.c1, b.c2, b.c3, b.c4) == (0.0, 0.0, 0.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(4, 10**6), st.integers(1, 4), st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 100))
def test_optimised_steps_below_theorem_bound(n, k, L, norm_sk, norm_f):
    N = optimal_band(n, k)
    b = step_bounds(n, N, k, L, norm_sk, norm_f, 2 * norm_f, norm_f)
    assert b.c1 == b.c4
    assert b.total <= ap_error_bound(n, k, L, norm_sk, norm_f, 2 * norm_f, norm_f) * (1 + 1e-12)


def test_step_bounds_domain():
    with pytest.raises(BandTooWide):
        step_bounds(8, 4, 2, 1, 1, 1, 1, 1)
    with pytest.raises(DomainError):
        step_bounds(8, 0, 2, 1, 1, 1, 1, 1)


# --- full pipeline ----------------------------------------------------------------

@pytest.mark.parametrize("kind", ["qubit", "ebit", "key"])
def test_report_memoryless_is_exact(kind):
    r = ergodic_report(ChannelParams(0.8, 0.0), kind, 16)
    assert r.empirical_error < 1e-10
    assert r.bound_respected


@pytest.mark.parametrize("lam, mu, kind, n", [(0.5, 0.25, "ebit", 64), (0.8, 0.1, "qubit", 256)])
def test_report_bound_respected(lam, mu, kind, n):
    r = ergodic_report(ChannelParams(lam, mu), kind, n)
    assert r.bound_respected
    assert r.empirical_error <= r.theoretical_bound


def test_step_chain_on_real_symbol():
    p = ChannelParams(0.7, 0.25)
    F = capped_test_function(p, "ebit")
    coeffs = channel_coefficients(p)
    n, k = 64, 2
    err = ergodic_report(p, "ebit", n, k).empirical_error
    norms = (derivative_l2_norm(coeffs, k), derivative_l2_norm(coeffs, 0), F.derivative_l1, F.sup_norm)
    for N in range(1, (n - 1) // 2 + 1):
        assert err <= step_bounds(n, N, k, F.lipschitz_L, *norms).total
