"""Ergodic averages over Toeplitz singular values and their explicit error bounds.

For a Lipschitz test function F with compact support, the singular-value
average (1/n) sum_j F(s_j) of T_n(f) approaches (1/2pi) int F(|f|).  The
rate is made explicit by splitting the error into four pieces:

    c1  T_n(f)   vs T_n(f_N)      Fourier truncation of the symbol
    c2  T_n(f_N) vs C_n(f_N)      rank-2N perturbation (singular value interlacing)
    c3  C_n(f_N) vs int F(|f_N|)  rectangle rule on the circulant's exact samples
    c4  int F(|f_N|) vs int F(|f|)

and choosing N = floor(n^{1/(k+3/2)}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .capacities import CapacityKind, LOG2E, capacity_function
from .errors import BandTooWide, DomainError, ZeroCapacityRegion
from .quadrature import transmissivity_average
from .symbol import (
    ChannelParams,
    SingularSpectrum,
    build_toeplitz,
    channel_coefficients,
    derivative_l2_norm,
    max_transmissivity,
    singular_values,
)


@dataclass(frozen=True)
class TestFunction:
    """Real Lipschitz test function with compact support in [0, support_upper].

    ``kinks`` lists the points x where F is not smooth; quadrature splits the
    angle interval wherever |f(theta)| crosses one of them.
    """

    __test__ = False  # not a pytest class

    eval: Callable[[np.ndarray], np.ndarray]
    lipschitz_L: float
    sup_norm: float
    derivative_l1: float
    support_upper: float
    kinks: tuple = field(default=())

    def __call__(self, x):
        return self.eval(x)


def capped_test_function(params: ChannelParams, kind: CapacityKind) -> TestFunction:
    """Test function F with F(s) = g(s^2) on [0, sqrt(M)], then a linear ramp down to 0.

    g is the pure-loss capacity for ``kind``.  Because every singular value
    of T_n and every |f(theta)| is at most sqrt(M), F reproduces g(eta) on all
    of them, while staying Lipschitz with the constant L of g(x^2) at sqrt(M).
    """
    kind = CapacityKind.parse(kind)
    M = max_transmissivity(params)
    rM = math.sqrt(M)
    g = capacity_function(kind)
    if kind.is_qubit:
        if M <= 0.5:
            raise ZeroCapacityRegion(f"M = {M:.17g} <= 1/2: the qubit test function is identically 0")
        L = 2.0 * LOG2E / (rM * (1.0 - M))
        peak = math.log2(M / (1.0 - M))
        kinks = (math.sqrt(0.5), rM)
    else:
        L = 2.0 * LOG2E * rM / (1.0 - M)
        peak = math.log2(1.0 / (1.0 - M))
        kinks = (rM,)
    end = rM + peak / L

    def F(x):
        x = np.asarray(x, dtype=float)
        inner = np.clip(x, 0.0, rM)
        out = np.where(x <= rM, g(inner * inner), np.maximum(peak - L * (x - rM), 0.0))
        out = np.where(x < 0.0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    return TestFunction(F, L, peak, 2.0 * peak, end, kinks + (end,))


def ergodic_average(spectrum: SingularSpectrum, F) -> float:
    """(1/n) sum_j F(s_j)."""
    s = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    return float(np.mean(F(s)))


def symbol_integral(params: ChannelParams, F: TestFunction, tol: float = 1e-10) -> float:
    """(1/2pi) int_0^{2pi} F(|f(theta)|) d theta, with |f| = sqrt(eta)."""

    def G(eta):
        return F(np.sqrt(eta))

    kinks = tuple(x * x for x in getattr(F, "kinks", ()))
    return transmissivity_average(params, G, eta_kinks=kinks, tol=tol)


def _check_n_k(n: int, k: int):
    if n < 4:
        raise DomainError(f"the error bound holds for n >= 4, got n={n}")
    if k < 1:
        raise DomainError(f"smoothness order k must be >= 1, got {k}")


def ap_error_bound(
    n: int,
    k: int,
    L: float,
    norm_sk: float,
    norm_s: float,
    norm_Fp1: float,
    norm_Finf: float,
) -> float:
    """Explicit bound on |ergodic average - symbol integral| for n >= 4."""
    _check_n_k(n, k)
    a = k + 1.5
    lead = 2.0 ** (k + 1) * norm_sk * L / math.sqrt(2.0 * math.pi) + 4.0 * math.pi * L * norm_s
    return lead * n ** (-k / a) + (2.0 * norm_Fp1 + 4.0 * norm_Finf) * n ** (-(k + 0.5) / a)


def optimal_band(n: int, k: int) -> int:
    """floor(n^{1/(k+3/2)}), computed exactly via N^{2k+3} <= n^2."""
    _check_n_k(n, k)
    e = 2 * k + 3
    N = int(math.floor(n ** (2.0 / e)))
    while (N + 1) ** e <= n * n:
        N += 1
    while N**e > n * n:
        N -= 1
    return N


@dataclass(frozen=True)
class StepBounds:
    c1: float
    c2: float
    c3: float
    c4: float

    @property
    def total(self) -> float:
        return self.c1 + self.c2 + self.c3 + self.c4


def step_bounds(
    n: int,
    N: int,
    k: int,
    L: float,
    norm_sk: float,
    norm_s: float,
    norm_Fp1: float,
    norm_Finf: float,
) -> StepBounds:
    """The four per-step error bounds for band half-width N (needs 1 <= N, 2N < n)."""
    if N < 1:
        raise DomainError(f"band half-width must be >= 1, got {N}")
    if 2 * N >= n:
        raise BandTooWide(f"need 2N < n, got N={N}, n={n}")
    trunc = L * norm_sk / (math.sqrt(2.0 * math.pi) * N**k)
    c2 = 2.0 * N * norm_Fp1 / n
    c3 = 4.0 * N**1.5 * math.pi * L * norm_s / n + 4.0 * N * norm_Finf / n
    return StepBounds(trunc, c2, c3, trunc)


def fourier_truncation_bound(norm_sk: float, N: int, k: int) -> float:
    """||f - f_N||_2 <= ||f^{(k)}||_2 / N^k."""
    return norm_sk / N**k


def low_rank_bound(norm_Fp1: float, rank: int, n: int) -> float:
    """Change of a singular-value average under a rank-``rank`` perturbation."""
    return norm_Fp1 * rank / n


def derivative_sup_bound(norm_s: float, N: int) -> float:
    """sqrt(4 pi) N^{3/2} ||f||_2, a bound on sup |f_N'|."""
    return math.sqrt(4.0 * math.pi) * N**1.5 * norm_s


def rectangle_rule_bound(L: float, deriv_sup: float, norm_Finf: float, degree: int, n: int) -> float:
    """Error of the n-point rectangle rule for F(|g|), g a trigonometric polynomial of ``degree``."""
    return math.pi * L * deriv_sup / n + 4.0 * degree * norm_Finf / n


@dataclass(frozen=True)
class ErgodicReport:
    n: int
    sample_average: float
    symbol_integral: float
    empirical_error: float
    theoretical_bound: float
    bound_respected: bool


def ergodic_report(
    params: ChannelParams, kind: CapacityKind, n: int, k: int = 2, tol: float = 1e-10
) -> ErgodicReport:
    """Compare the SVD-side average with the symbol integral and the explicit bound."""
    _check_n_k(n, k)
    F = capped_test_function(params, kind)
    coeffs = channel_coefficients(params)
    avg = ergodic_average(singular_values(build_toeplitz(coeffs, n)), F)
    integral = symbol_integral(params, F, tol)
    bound = ap_error_bound(
        n,
        k,
        F.lipschitz_L,
        derivative_l2_norm(coeffs, k),
        derivative_l2_norm(coeffs, 0),
        F.derivative_l1,
        F.sup_norm,
    )
    err = abs(avg - integral)
    return ErgodicReport(n, avg, integral, err, bound, err <= bound)
