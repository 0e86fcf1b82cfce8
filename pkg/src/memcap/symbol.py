"""Channel coefficients, closed-form symbol, Toeplitz/circulant corners and their spectra.

The memory channel with transmissivity ``lam`` and memory parameter ``mu`` is
described by the lower-triangular Toeplitz sequence

    a_j = sqrt(lam) * mu**(j/2) * L_j^{(-1)}(-ln lam),   j >= 0,

whose generating function is the symbol

    f(theta) = lam ** (-1/2 + 1 / (1 - sqrt(mu) e^{i theta})).

Squared singular values of the n x n corner are the transmissivities of the
n independent pure-loss modes the channel factorises into.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .errors import BandTooWide, ConvergenceFailure, DomainError, TruncationBudgetExceeded

DEFAULT_TOLERANCE = 1e-14
DEFAULT_MAX_TERMS = 100_000
GRAM_THRESHOLD = 2048

# the truncation test only starts here: L_j^{(-1)} has sign changes at small j
_MIN_TRUNCATION_INDEX = 8
# radii of the Cauchy circle, as fractions of the way from sqrt(mu) to 1
_RADIUS_FRACTIONS = np.linspace(0.02, 0.98, 49)


@dataclass(frozen=True)
class ChannelParams:
    """Transmissivity ``lam`` in (0, 1) and memory parameter ``mu`` in [0, 1)."""

    lam: float
    mu: float

    def __post_init__(self):
        lam, mu = float(self.lam), float(self.mu)
        if not (0.0 < lam < 1.0):
            raise DomainError(f"transmissivity must lie in (0, 1), got {lam!r}")
        if not (0.0 <= mu < 1.0):
            raise DomainError(f"memory parameter must lie in [0, 1), got {mu!r}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    @property
    def sqrt_mu(self) -> float:
        return math.sqrt(self.mu)

    @property
    def log_inv_lam(self) -> float:
        """ln(1/lam) > 0."""
        return -math.log(self.lam)


@dataclass(frozen=True, eq=False)
class CoefficientSequence:
    values: np.ndarray
    relative_tolerance: float
    truncation_index: int
    params: Optional[ChannelParams] = None
    max_terms: int = DEFAULT_MAX_TERMS

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class ToeplitzCorner:
    n: int
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class CirculantMatrix:
    n: int
    band_halfwidth: int
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    values: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.values)

    @property
    def largest(self) -> float:
        return float(self.values[-1])


# ---------------------------------------------------------------------------
# Laguerre polynomials and coefficients
# ---------------------------------------------------------------------------

def laguerre_minus_one(m: int, x: float) -> float:
    """Generalised Laguerre polynomial L_m^{(-1)}(x) by three-term recurrence.

    Uses ``m L_m = (2m - 2 - x) L_{m-1} - (m - 2) L_{m-2}`` seeded with
    ``L_0 = 1`` and ``L_1 = -x``.
    """
    if m < 0:
        raise DomainError(f"degree must be nonnegative, got {m}")
    x = float(x)
    if m == 0:
        return 1.0
    prev, cur = 1.0, -x
    for j in range(2, m + 1):
        prev, cur = cur, ((2 * j - 2 - x) * cur - (j - 2) * prev) / j
    return cur


def _raw_coefficients(params: ChannelParams, count: int) -> np.ndarray:
    """a_0 .. a_{count-1}.

    The recurrence runs on b_j = mu^{j/2} L_j^{(-1)}(x) so the geometric decay
    is folded in and nothing overflows for long sequences.
    """
    x = params.log_inv_lam
    s, mu = params.sqrt_mu, params.mu
    b = np.zeros(count)
    b[0] = 1.0
    if count > 1:
        b[1] = -x * s
    for j in range(2, count):
        b[j] = ((2 * j - 2 - x) * s * b[j - 1] - (j - 2) * mu * b[j - 2]) / j
    return math.sqrt(params.lam) * b


def _cauchy_tail_bound(params: ChannelParams, start, power: float = 0.0, square: bool = False):
    """Upper bound on sum_{j >= start} j**power * |a_j|  (or |a_j|**2 if ``square``).

    Cauchy's estimate on the generating function lam^{t/(1-t)} over |t| = r,
    with sqrt(mu) < r < 1, gives |a_j| <= sqrt(lam) lam^{-r/(1+r)} (sqrt(mu)/r)^j.
    The weighted geometric tail is then bounded through its term ratio.
    The best radius on a fixed grid is returned.  ``start`` may be an array.
    """
    start = np.atleast_1d(np.asarray(start, dtype=float))
    s = params.sqrt_mu
    if s == 0.0:
        return np.where(start > 0, 0.0, np.inf)
    r = s + (1.0 - s) * _RADIUS_FRACTIONS
    log_amp = 0.5 * math.log(params.lam) - (r / (1 + r)) * math.log(params.lam)
    log_rho = np.log(s / r)
    m = 2.0 if square else 1.0
    log_amp, log_rho = m * log_amp, m * log_rho
    j0 = np.maximum(start, 1.0)[:, None]
    log_first = log_amp[None, :] + power * np.log(j0) + log_rho[None, :] * j0
    log_ratio = power * np.log1p(1.0 / j0) + log_rho[None, :]
    with np.errstate(divide="ignore", over="ignore"):
        tail = np.where(log_ratio < 0, np.exp(log_first) / -np.expm1(log_ratio), np.inf)
    return tail.min(axis=1)


@functools.lru_cache(maxsize=256)
def _coefficients_cached(params: ChannelParams, relative_tolerance: float, max_terms: int):
    if params.mu == 0.0:
        vals = np.array([math.sqrt(params.lam)])
        vals.setflags(write=False)
        return vals, 0
    a0 = math.sqrt(params.lam)
    thresh = relative_tolerance * a0
    count = 128
    while True:
        count = min(count, max_terms + 2)
        a = _raw_coefficients(params, count)
        small = np.abs(a) < thresh
        cand = np.nonzero(small[:-1] & small[1:])[0]
        cand = cand[cand >= _MIN_TRUNCATION_INDEX]
        cand = cand[cand <= max_terms]
        if cand.size:
            ok = _cauchy_tail_bound(params, cand + 1) < thresh
            if ok.any():
                J = int(cand[np.argmax(ok)])
                vals = a[: J + 1].copy()
                vals.setflags(write=False)
                return vals, J
        if count >= max_terms + 2:
            raise TruncationBudgetExceeded(
                f"coefficients for lam={params.lam}, mu={params.mu} do not fall below "
                f"{relative_tolerance:g}*|a_0| within {max_terms} terms"
            )
        count *= 2


def channel_coefficients(
    params: ChannelParams,
    relative_tolerance: float = DEFAULT_TOLERANCE,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> CoefficientSequence:
    """Truncated coefficient sequence a_0..a_J of the channel.

    J is the first index >= 8 at which two consecutive coefficients drop below
    ``relative_tolerance * a_0`` and a Cauchy-estimate bound on the absolute
    tail sum beyond J is below the same threshold.  For ``mu == 0`` the
    sequence is exactly ``[sqrt(lam)]``.
    """
    if not (0.0 < relative_tolerance < 1.0):
        raise DomainError(f"relative_tolerance must lie in (0, 1), got {relative_tolerance}")
    vals, J = _coefficients_cached(params, float(relative_tolerance), int(max_terms))
    return CoefficientSequence(vals, float(relative_tolerance), J, params, int(max_terms))


# ---------------------------------------------------------------------------
# Symbol
# ---------------------------------------------------------------------------

def symbol_eval(params: ChannelParams, theta):
    """Closed-form symbol f(theta); scalar in, complex out (arrays broadcast).

    With t = sqrt(mu) e^{i theta} and D = |1 - t|^2, the exponent
    -1/2 + 1/(1 - t) has real part (1 - mu) / (2D) and imaginary part
    sqrt(mu) sin(theta) / D.  Evaluating those real expressions avoids the
    cancellation in 1 - t when t is close to 1.
    """
    theta = np.asarray(theta, dtype=float)
    s, mu = params.sqrt_mu, params.mu
    ln = math.log(params.lam)
    D = 1.0 - 2.0 * s * np.cos(theta) + mu
    out = np.exp(ln * (1.0 - mu) / (2.0 * D)) * np.exp(1j * ln * s * np.sin(theta) / D)
    return complex(out) if out.ndim == 0 else out


def effective_transmissivity(params: ChannelParams, theta):
    """eta(theta) = lam ** ((1 - mu) / (1 - 2 sqrt(mu) cos(theta) + mu))."""
    theta = np.asarray(theta, dtype=float)
    s, mu = params.sqrt_mu, params.mu
    expo = (1.0 - mu) / (1.0 - 2.0 * s * np.cos(theta) + mu)
    out = np.exp(expo * math.log(params.lam))
    return float(out) if out.ndim == 0 else out


def max_transmissivity(params: ChannelParams) -> float:
    """M = lam ** ((1 - sqrt(mu)) / (1 + sqrt(mu))), attained at theta = pi."""
    s = params.sqrt_mu
    return params.lam ** ((1.0 - s) / (1.0 + s))


def transmissivity_crossings(params: ChannelParams, level: float) -> list[float]:
    """Angles in [0, 2 pi] where eta(theta) equals ``level``, ascending.

    eta is monotone in cos(theta), so the crossing solves in closed form and
    comes in a mirrored pair theta, 2 pi - theta.  Returns [] when ``level``
    lies outside the open range of eta (or mu == 0).
    """
    s = params.sqrt_mu
    if s == 0.0 or not (0.0 < level < 1.0):
        return []
    # (1 - mu) ln(lam) / D = ln(level)  with  D = 1 - 2 s cos(theta) + mu
    D = (1.0 - params.mu) * math.log(params.lam) / math.log(level)
    c = (1.0 + params.mu - D) / (2.0 * s)
    if not (-1.0 < c < 1.0):
        return []
    th = math.acos(c)
    return [th, 2.0 * math.pi - th]


def truncated_symbol(coeffs: CoefficientSequence, N: int, theta):
    """f_N(theta) = sum_{j <= N} a_j e^{i j theta}."""
    a = np.asarray(coeffs.values[: N + 1])
    theta = np.asarray(theta, dtype=float)
    # Horner in z = e^{i theta}
    z = np.exp(1j * theta)
    acc = np.zeros_like(z)
    for c in a[::-1]:
        acc = acc * z + c
    return complex(acc) if acc.ndim == 0 else acc


def truncated_symbol_derivative_sup(coeffs: CoefficientSequence, N: int) -> float:
    """sum_{j <= N} j |a_j|, an upper bound on sup |f_N'|."""
    a = np.asarray(coeffs.values[: N + 1])
    return float(np.sum(np.arange(len(a)) * np.abs(a)))


def derivative_l2_norm(coeffs: CoefficientSequence, k: int) -> float:
    """||f^{(k)}||_2 = sqrt(2 pi sum_j j^{2k} a_j^2), norm taken over [0, 2 pi] unnormalised.

    The weighted sum converges more slowly than the plain coefficients, so the
    sequence is extended (up to its ``max_terms``) until a Cauchy bound on the
    weighted tail is below ``relative_tolerance`` times the partial sum.
    """
    if k < 0:
        raise DomainError(f"derivative order must be nonnegative, got {k}")
    a = np.asarray(coeffs.values, dtype=float)
    params = coeffs.params
    if params is None or params.mu == 0.0:
        j = np.arange(len(a), dtype=float)
        return math.sqrt(2.0 * math.pi * float(np.sum(j ** (2 * k) * a * a)))
    count = len(a)
    while True:
        a = _raw_coefficients(params, count) if count > len(coeffs.values) else a[:count]
        j = np.arange(count, dtype=float)
        total = float(np.sum(j ** (2 * k) * a * a))
        tail = float(_cauchy_tail_bound(params, count, power=2 * k, square=True)[0])
        if tail <= coeffs.relative_tolerance * total or (k == 0 and total == 0.0):
            return math.sqrt(2.0 * math.pi * (total))
        if count >= coeffs.max_terms:
            raise TruncationBudgetExceeded(
                f"weighted tail for k={k} not below tolerance within {coeffs.max_terms} terms"
            )
        count = min(2 * count, coeffs.max_terms)


# ---------------------------------------------------------------------------
# Matrices and spectra
# ---------------------------------------------------------------------------

def build_toeplitz(coeffs: CoefficientSequence, n: int) -> ToeplitzCorner:
    """n x n corner with entry (i, k) = a_{i-k}; lower triangular."""
    if n < 1:
        raise DomainError(f"matrix order must be >= 1, got {n}")
    col = np.zeros(n)
    m = min(n, len(coeffs.values))
    col[:m] = coeffs.values[:m]
    row = np.zeros(n)
    row[0] = col[0]
    return ToeplitzCorner(n, scipy.linalg.toeplitz(col, row))


def build_circulant(coeffs: CoefficientSequence, N: int, n: int) -> CirculantMatrix:
    """Circulant C_n(f_N) built from a_0..a_N with wrap-around.

    Entry (i, k) is a_{(i-k) mod n} when that residue is <= N, else 0, so its
    singular values are exactly |f_N(2 pi i / n)| and it differs from the
    banded corner T_n(f_N) only in the top-right N x N triangle.
    """
    if N < 0:
        raise DomainError(f"band half-width must be >= 0, got {N}")
    if 2 * N >= n:
        raise BandTooWide(f"need 2N < n, got N={N}, n={n}")
    col = np.zeros(n)
    m = min(N + 1, len(coeffs.values))
    col[:m] = coeffs.values[:m]
    return CirculantMatrix(n, N, scipy.linalg.circulant(col))


def singular_values(
    m: Union[ToeplitzCorner, CirculantMatrix, np.ndarray],
    gram_threshold: int = GRAM_THRESHOLD,
) -> SingularSpectrum:
    """Ascending singular values.

    Dense LAPACK SVD up to ``gram_threshold``; above it, the square roots of
    the eigenvalues of the Gram matrix A^T A with negatives clamped to zero.
    """
    A = np.asarray(getattr(m, "entries", m), dtype=float)
    try:
        if A.shape[0] <= gram_threshold:
            s = np.linalg.svd(A, compute_uv=False)
        else:
            w = scipy.linalg.eigvalsh(A.T @ A)
            s = np.sqrt(np.clip(w, 0.0, None))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    vals = np.sort(s)
    vals.setflags(write=False)
    return SingularSpectrum(vals)


def mode_transmissivities(
    params: ChannelParams, n: int, relative_tolerance: float = DEFAULT_TOLERANCE
) -> np.ndarray:
    """Ascending transmissivities eta_i = s_i^2 of the n factorised pure-loss modes."""
    coeffs = channel_coefficients(params, relative_tolerance)
    s = singular_values(build_toeplitz(coeffs, n)).values
    return s * s
