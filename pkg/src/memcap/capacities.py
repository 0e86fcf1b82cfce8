"""Pure-loss capacities, asymptotic memory-channel capacities and n-shot bounds.

All capacities are in bits.  ``Ebit`` (two-way quantum capacity) and ``Key``
(secret-key capacity) coincide for every quantity computed here and share one
code path.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentCapacity, DomainError, UnreachableTarget, ZeroCapacityRegion
from .quadrature import transmissivity_average
from .symbol import ChannelParams, max_transmissivity, mode_transmissivities

LOG2E = math.log2(math.e)


class CapacityKind(enum.Enum):
    QUBIT = "qubit"
    EBIT = "ebit"
    KEY = "key"

    @property
    def is_qubit(self) -> bool:
        return self is CapacityKind.QUBIT

    @classmethod
    def parse(cls, value) -> "CapacityKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown capacity kind {value!r}; expected qubit, ebit or key") from None


def qubit_capacity(eta):
    """q(eta) = log2(eta / (1 - eta)) above 1/2, else 0.  Vectorised; eta < 1."""
    eta = np.asarray(eta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(eta > 0.5, np.log2(eta / (1.0 - eta)), 0.0)
    return float(out) if out.ndim == 0 else out


def ebit_capacity(eta):
    """k(eta) = -log2(1 - eta).  Vectorised; eta < 1."""
    eta = np.asarray(eta, dtype=float)
    out = -np.log1p(-eta) * LOG2E
    return float(out) if out.ndim == 0 else out


def capacity_function(kind: CapacityKind):
    return qubit_capacity if CapacityKind.parse(kind).is_qubit else ebit_capacity


def pure_loss_capacity(lam: float, kind: CapacityKind) -> float:
    """Capacity of the memoryless pure-loss channel with transmissivity ``lam`` in [0, 1]."""
    kind = CapacityKind.parse(kind)
    if not (0.0 <= lam <= 1.0):
        raise DomainError(f"transmissivity must lie in [0, 1], got {lam}")
    if lam == 1.0:
        raise DivergentCapacity(f"{kind.value} capacity diverges at transmissivity 1")
    return capacity_function(kind)(lam)


def positive_q_region(params: ChannelParams) -> bool:
    """True iff the quantum capacity of the memory channel is strictly positive."""
    return max_transmissivity(params) > 0.5


def asymptotic_capacity(params: ChannelParams, kind: CapacityKind, tol: float = 1e-10) -> float:
    """Average of the pure-loss capacity of eta(theta) over one period."""
    kind = CapacityKind.parse(kind)
    if kind.is_qubit:
        if not positive_q_region(params):
            return 0.0
        return transmissivity_average(params, qubit_capacity, eta_kinks=(0.5,), tol=tol)
    return transmissivity_average(params, ebit_capacity, tol=tol)


def theorem1_constant(params: ChannelParams, kind: CapacityKind) -> float:
    """Constant C (qubits) or C2 (ebits / key) multiplying sqrt(n) in the n-shot lower bound."""
    kind = CapacityKind.parse(kind)
    M = max_transmissivity(params)
    if kind.is_qubit and M <= 0.5:
        raise ZeroCapacityRegion(
            f"M = {M:.17g} <= 1/2: quantum capacity vanishes, the bound is trivial"
        )
    s, mu = params.sqrt_mu, params.mu
    ell = params.log_inv_lam
    smooth = math.sqrt(8.0) * M * s * ell * (1.0 + s * ell + mu) / (1.0 - s) ** 4
    lip = 4.0 * (2.0 * math.pi) ** 1.5 * LOG2E
    if kind.is_qubit:
        return smooth + lip / (1.0 - M) + 8.0 * math.log2(M / (1.0 - M))
    return smooth + lip * M / (1.0 - M) + 8.0 * math.log2(1.0 / (1.0 - M))


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 < eps < 1.0):
        raise DomainError(f"error budget must lie in (0, 1), got {eps}")
    return eps


def epsilon_penalty(eps: float, kind: CapacityKind) -> float:
    """Additive eps-dependent constant subtracted from every n-shot lower bound."""
    eps = _check_eps(eps)
    if CapacityKind.parse(kind).is_qubit:
        return 23.0 + math.log2((32.0 - eps) ** 2 / ((16.0 - eps) * eps**6))
    r = math.sqrt(eps)
    return math.log2(2**6 * 3 * (4.0 - r) ** 2 / ((2.0 - r) * eps**3))


@dataclass(frozen=True)
class BoundComponents:
    asymptotic_term: float
    sqrt_term: float
    penalty: float

    @property
    def raw(self) -> float:
        return self.asymptotic_term - self.sqrt_term - self.penalty


@dataclass(frozen=True)
class NShotBound:
    kind: CapacityKind
    n: int
    lower: float
    components: BoundComponents
    clamped: bool

    @property
    def raw(self) -> float:
        return self.components.raw


def nshot_bound_value(n, capacity: float, constant: float, penalty: float):
    """n*capacity - sqrt(n)*constant - penalty (vectorised over n, unclamped)."""
    return n * capacity - np.sqrt(n) * constant - penalty


def nshot_lower_bound(
    params: ChannelParams, n: int, eps: float, kind: CapacityKind, tol: float = 1e-10
) -> NShotBound:
    """Non-asymptotic lower bound n*Q - sqrt(n)*C - penalty, clamped at zero.

    In the zero-quantum-capacity region the qubit bound is trivial and is
    reported as 0 (clamped) with a zero sqrt term.
    """
    kind = CapacityKind.parse(kind)
    if n < 4:
        raise DomainError(f"the n-shot bound requires n >= 4, got {n}")
    penalty = epsilon_penalty(eps, kind)
    cap = asymptotic_capacity(params, kind, tol)
    if kind.is_qubit and not positive_q_region(params):
        constant = 0.0
    else:
        constant = theorem1_constant(params, kind)
    comps = BoundComponents(n * cap, math.sqrt(n) * constant, penalty)
    raw = float(nshot_bound_value(n, cap, constant, penalty))
    return NShotBound(kind, n, max(0.0, raw), comps, raw < 0.0)


def exact_sum_lower_bound(
    params: ChannelParams, n: int, eps: float, kind: CapacityKind
) -> float:
    """sum_i g(eta_i) - penalty over the exact mode transmissivities (unclamped)."""
    kind = CapacityKind.parse(kind)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    eta = mode_transmissivities(params, n)
    return float(np.sum(capacity_function(kind)(eta))) - epsilon_penalty(eps, kind)


@dataclass(frozen=True)
class MemorylessBounds:
    lower: float
    upper: float
    lower_raw: float


def memoryless_nshot_bounds(lam: float, n: int, eps: float, kind: CapacityKind) -> MemorylessBounds:
    """Lower and upper bounds on the n-shot capacity of the memoryless pure-loss channel."""
    kind = CapacityKind.parse(kind)
    eps = _check_eps(eps)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    cap = pure_loss_capacity(lam, kind)
    lower_raw = n * cap - epsilon_penalty(eps, kind)
    if kind.is_qubit:
        if eps >= 0.5:
            raise DomainError(f"the qubit upper bound needs eps < 1/2, got {eps}")
        binary_entropy = -eps * math.log2(eps) - (1.0 - eps) * math.log2(1.0 - eps)
        upper = n * cap / (1.0 - 2.0 * eps) + binary_entropy
    else:
        upper = n * cap + math.log2(6.0) + 2.0 * math.log2((1.0 + eps) / (1.0 - eps))
    return MemorylessBounds(max(0.0, lower_raw), upper, lower_raw)


def solve_uses_needed(capacity: float, constant: float, penalty: float, target_k: float) -> int:
    """Smallest integer n >= 4 with n*capacity - sqrt(n)*constant - penalty >= target_k.

    With x = sqrt(n) the condition is the quadratic capacity*x^2 - constant*x -
    (penalty + target_k) >= 0; its positive root gives n up to rounding, which
    is then corrected against the bound formula itself.
    """
    if target_k <= 0:
        raise DomainError(f"target must be positive, got {target_k}")
    if capacity <= 0:
        raise UnreachableTarget("capacity is zero: no number of uses reaches a positive target")
    rhs = penalty + target_k
    x = (constant + math.sqrt(constant * constant + 4.0 * capacity * rhs)) / (2.0 * capacity)
    n = max(4, math.ceil(x * x))

    def ok(m):
        return nshot_bound_value(m, capacity, constant, penalty) >= target_k

    while not ok(n):
        n += 1
    while n > 4 and ok(n - 1):
        n -= 1
    return n


def uses_needed(
    params: ChannelParams, eps: float, kind: CapacityKind, target_k: float, tol: float = 1e-10
) -> int:
    """Minimal number of channel uses whose n-shot lower bound reaches ``target_k`` bits."""
    kind = CapacityKind.parse(kind)
    cap = asymptotic_capacity(params, kind, tol)
    if cap <= 0.0 or (kind.is_qubit and not positive_q_region(params)):
        raise UnreachableTarget(
            f"{kind.value} capacity vanishes at lam={params.lam}, mu={params.mu}"
        )
    return solve_uses_needed(cap, theorem1_constant(params, kind), epsilon_penalty(eps, kind), target_k)
