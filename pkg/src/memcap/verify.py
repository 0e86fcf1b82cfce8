"""Brute-force checks of every finite-n inequality and identity the library relies on.

Each check builds the relevant matrices or integrals directly, compares them
with the corresponding bound and returns a :class:`CheckReport`.  Slack is
always ``bound - observed``; a case fails when its slack is below
``-tolerance`` (1e-9 for inequalities, 0 for identities checked against an
explicit accuracy target).
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Sequence

import numpy as np
from scipy import integrate

from .avram_parter import (
    capped_test_function,
    ergodic_average,
    ergodic_report,
    low_rank_bound,
)
from .capacities import (
    CapacityKind,
    asymptotic_capacity,
    capacity_function,
    epsilon_penalty,
    positive_q_region,
    theorem1_constant,
)
from .errors import DomainError, MemcapError
from .symbol import (
    ChannelParams,
    build_circulant,
    build_toeplitz,
    channel_coefficients,
    derivative_l2_norm,
    max_transmissivity,
    mode_transmissivities,
    singular_values,
    symbol_eval,
    truncated_symbol,
)

log = logging.getLogger(__name__)

SLACK_TOLERANCE = 1e-9
COEFFICIENT_TOLERANCE = 1e-8
RANK_THRESHOLD = 1e-10


@dataclass
class CheckReport:
    check_name: str
    cases_run: int = 0
    cases_failed: int = 0
    worst_margin: float = math.inf
    details: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.cases_failed == 0 and self.cases_run > 0

    def add(self, slack: float, tolerance: float = SLACK_TOLERANCE, **info: Any) -> None:
        slack = float(slack)
        failed = not (slack >= -tolerance)
        self.cases_run += 1
        self.cases_failed += failed
        self.worst_margin = min(self.worst_margin, slack)
        self.details.append({"slack": slack, "failed": failed, **_plain(info)})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, CapacityKind):
        return obj.value
    return obj


def _pdict(params: ChannelParams) -> dict:
    return {"lam": params.lam, "mu": params.mu}


def _kinds_for(params: ChannelParams, kinds) -> list:
    """Capacity kinds whose capped test function exists at these parameters."""
    out = []
    for kind in kinds:
        kind = CapacityKind.parse(kind)
        if kind.is_qubit and not positive_q_region(params):
            continue
        out.append(kind)
    return out


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------

def check_symbol_coefficients(params: ChannelParams, grid_size: int) -> CheckReport:
    """Inverse DFT of closed-form symbol samples against the Laguerre coefficients."""
    report = CheckReport("symbol_coefficients")
    coeffs = channel_coefficients(params)
    J = coeffs.truncation_index
    if grid_size & (grid_size - 1) or grid_size <= 4 * J:
        raise DomainError(f"grid size must be a power of two > 4J = {4 * J}, got {grid_size}")
    theta = 2.0 * np.pi * np.arange(grid_size) / grid_size
    fft_coeffs = np.fft.fft(symbol_eval(params, theta)) / grid_size
    analytic = np.zeros(grid_size)
    analytic[: J + 1] = coeffs.values
    dev = np.abs(fft_coeffs - analytic)
    report.add(
        COEFFICIENT_TOLERANCE - float(dev.max()),
        tolerance=0.0,
        params=_pdict(params),
        grid_size=grid_size,
        truncation_index=J,
        max_deviation=float(dev.max()),
        max_deviation_above_J=float(dev[J + 1 :].max()),
    )
    return report


def check_norm_bound(params: ChannelParams, n_list: Sequence[int]) -> CheckReport:
    """Operator norm <= sup|f| and Hilbert-Schmidt norm <= sqrt(n/2pi) ||f||_2."""
    report = CheckReport("norm_bound")
    coeffs = channel_coefficients(params)
    sup_f = math.sqrt(max_transmissivity(params))
    norm_f = derivative_l2_norm(coeffs, 0)
    for n in n_list:
        T = build_toeplitz(coeffs, n)
        s_max = singular_values(T).largest
        report.add(sup_f - s_max, params=_pdict(params), n=n, norm="operator", observed=s_max, bound=sup_f)
        hs = float(np.linalg.norm(T.entries))
        hs_bound = math.sqrt(n / (2.0 * math.pi)) * norm_f
        report.add(
            hs_bound - hs,
            tolerance=max(SLACK_TOLERANCE, 1e-8 * hs_bound),
            params=_pdict(params),
            n=n,
            norm="hilbert_schmidt",
            observed=hs,
            bound=hs_bound,
        )
    return report


def check_rank_perturbation(
    params: ChannelParams, n: int, N: int, kinds=(CapacityKind.QUBIT, CapacityKind.EBIT)
) -> CheckReport:
    """Banded Toeplitz vs circulant: rank of the difference and the ergodic gap."""
    report = CheckReport("rank_perturbation")
    coeffs = channel_coefficients(params)
    T = build_toeplitz(coeffs, n).entries.copy()
    # banded corner T_n(f_N): drop coefficients beyond N
    T[np.tril_indices(n, -N - 1)] = 0.0
    C = build_circulant(coeffs, N, n)
    diff_sv = np.linalg.svd(C.entries - T, compute_uv=False)
    rank = int(np.sum(diff_sv > RANK_THRESHOLD * max(diff_sv.max(), np.finfo(float).tiny)))
    report.add(2 * N - rank, params=_pdict(params), n=n, N=N, quantity="rank", rank=rank)
    sT = singular_values(T)
    sC = singular_values(C)
    for kind in _kinds_for(params, kinds):
        F = capped_test_function(params, kind)
        gap = abs(ergodic_average(sT, F) - ergodic_average(sC, F))
        bound = low_rank_bound(F.derivative_l1, 2 * N, n)
        report.add(bound - gap, params=_pdict(params), n=n, N=N, kind=kind, gap=gap, bound=bound)
    return report


def check_ap_bound(params: ChannelParams, kind, n_list: Sequence[int], k: int = 2) -> CheckReport:
    """Empirical ergodic error against the explicit convergence bound."""
    report = CheckReport("ap_bound")
    kind = CapacityKind.parse(kind)
    for n in n_list:
        r = ergodic_report(params, kind, n, k=k)
        report.add(
            r.theoretical_bound - r.empirical_error,
            params=_pdict(params),
            kind=kind,
            n=n,
            empirical_error=r.empirical_error,
            bound=r.theoretical_bound,
        )
    return report


def check_theorem1_consistency(
    params: ChannelParams, kind, eps: float, n_list: Sequence[int]
) -> CheckReport:
    """sum_i g(eta_i) >= n Q - sqrt(n) C on the exact SVD transmissivities.

    Also checks the ceiling sum_i g(eta_i) - penalty <= n Q + |penalty|.
    """
    report = CheckReport("theorem1_consistency")
    kind = CapacityKind.parse(kind)
    Q = asymptotic_capacity(params, kind)
    penalty = epsilon_penalty(eps, kind)
    trivial = kind.is_qubit and not positive_q_region(params)
    C = 0.0 if trivial else theorem1_constant(params, kind)
    g = capacity_function(kind)
    for n in n_list:
        total = float(np.sum(g(mode_transmissivities(params, n))))
        lower = n * Q - math.sqrt(n) * C
        info = dict(params=_pdict(params), kind=kind, eps=eps, n=n, exact_sum=total, asymptotic=n * Q)
        report.add(total - lower, side="lower", bound=lower, **info)
        exact = total - penalty
        report.add(n * Q + abs(penalty) - exact, side="ceiling", bound=n * Q + abs(penalty), **info)
    return report


def _l2_distance_to_truncation(params: ChannelParams, coeffs, N: int) -> float:
    def integrand(theta):
        d = symbol_eval(params, theta) - truncated_symbol(coeffs, N, theta)
        return d.real * d.real + d.imag * d.imag

    # near-zero integrands hit roundoff long before epsabs; the estimate is still sound
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(integrand, 0.0, 2.0 * math.pi, epsabs=1e-26, epsrel=1e-10, limit=500)
    return math.sqrt(max(val, 0.0))


def check_fourier_truncation(
    params: ChannelParams, k_list: Sequence[int], N_list: Sequence[int]
) -> CheckReport:
    """||f - f_N||_2 (by quadrature) <= ||f^{(k)}||_2 / N^k."""
    report = CheckReport("fourier_truncation")
    coeffs = channel_coefficients(params)
    for N in N_list:
        dist = _l2_distance_to_truncation(params, coeffs, N)
        for k in k_list:
            bound = derivative_l2_norm(coeffs, k) / N**k
            report.add(bound - dist, params=_pdict(params), N=N, k=k, distance=dist, bound=bound)
    return report


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------

@dataclass
class VerifyConfig:
    lambdas: Sequence[float] = (0.3, 0.5, 0.7, 0.9)
    mus: Sequence[float] = (0.0, 0.1, 0.25, 0.5)
    n_list: Sequence[int] = (4, 16, 64, 256)
    kinds: Sequence[str] = ("qubit", "ebit")
    eps: float = 0.1
    rank_cases: Sequence[Sequence[int]] = ((32, 1), (32, 4), (32, 8), (128, 1), (128, 4), (128, 8))
    fourier_k: Sequence[int] = (1, 2)
    fourier_N: Sequence[int] = (1, 2, 4, 8, 16)

    def __post_init__(self):
        if not (self.lambdas and self.mus and self.n_list and self.kinds):
            raise DomainError("verification grid is empty")
        for kind in self.kinds:
            CapacityKind.parse(kind)
        for lam in self.lambdas:
            for mu in self.mus:
                ChannelParams(lam, mu)

    @classmethod
    def quick(cls) -> "VerifyConfig":
        return cls(
            lambdas=(0.5, 0.9),
            mus=(0.0, 0.25),
            n_list=(4, 16, 64),
            rank_cases=((32, 1), (32, 4)),
            fourier_N=(1, 4, 16),
        )

    @classmethod
    def full(cls) -> "VerifyConfig":
        return cls()

    @property
    def params(self) -> list:
        return [ChannelParams(lam, mu) for lam in self.lambdas for mu in self.mus]


def _guarded(name: str, fn, *args) -> CheckReport:
    try:
        return fn(*args)
    except MemcapError as exc:
        log.warning("%s raised %s: %s", name, type(exc).__name__, exc)
        report = CheckReport(name)
        report.error = f"{type(exc).__name__}: {exc}"
        report.details.append({"args": _plain([_pdict(a) if isinstance(a, ChannelParams) else a for a in args])})
        return report


def _coefficient_grid(params: ChannelParams) -> int:
    J = channel_coefficients(params).truncation_index
    size = 64
    while size <= 4 * J:
        size *= 2
    return size


def run_all(config: Optional[VerifyConfig] = None, workers: int = 1) -> list:
    """Run every check over the configured grid; one report per (check, params[, kind])."""
    config = config or VerifyConfig()
    tasks = []
    for p in config.params:
        tasks.append(("symbol_coefficients", lambda p=p: check_symbol_coefficients(p, _coefficient_grid(p))))
        tasks.append(("norm_bound", check_norm_bound, p, list(config.n_list)))
        for n, N in config.rank_cases:
            tasks.append(("rank_perturbation", check_rank_perturbation, p, n, N, config.kinds))
        for kind in _kinds_for(p, config.kinds):
            tasks.append(("ap_bound", check_ap_bound, p, kind, list(config.n_list)))
        for kind in config.kinds:
            tasks.append(("theorem1_consistency", check_theorem1_consistency, p, kind, config.eps, list(config.n_list)))
        tasks.append(("fourier_truncation", check_fourier_truncation, p, list(config.fourier_k), list(config.fourier_N)))

    def run(task):
        name, fn, *args = task
        return _guarded(name, fn, *args)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run, tasks))
    return [run(t) for t in tasks]
