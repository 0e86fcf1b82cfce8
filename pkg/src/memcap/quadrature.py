"""Kink-aware averages of functions of the effective transmissivity over a period."""

from __future__ import annotations

import math
import warnings
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureBudgetExceeded
from .symbol import ChannelParams, effective_transmissivity, transmissivity_crossings

DEFAULT_LIMIT = 200


def transmissivity_average(
    params: ChannelParams,
    g: Callable[[np.ndarray], np.ndarray],
    eta_kinks: Iterable[float] = (),
    tol: float = 1e-10,
    limit: int = DEFAULT_LIMIT,
) -> float:
    """(1/2pi) * integral over [0, 2pi] of g(eta(theta)).

    eta is even about pi, so only [0, pi] is integrated.  Each level in
    ``eta_kinks`` where g is not smooth is mapped to its crossing angle and
    the interval is split there before adaptive Gauss-Kronrod quadrature.
    The returned value has absolute error at most ``tol``.
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if params.mu == 0.0:
        return float(g(np.asarray(params.lam)))

    cuts = {0.0, math.pi}
    for level in eta_kinks:
        for th in transmissivity_crossings(params, level):
            if 0.0 < th < math.pi:
                cuts.add(th)
    edges = sorted(cuts)
    pieces = len(edges) - 1
    # the average is (1/pi) * integral over [0, pi]
    piece_tol = math.pi * tol / pieces

    def integrand(theta):
        return float(g(np.asarray(effective_transmissivity(params, theta))))

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err, info = integrate.quad(
                integrand, a, b, epsabs=piece_tol, epsrel=0.0, limit=limit, full_output=1
            )[:3]
        if err > piece_tol:
            raise QuadratureBudgetExceeded(
                f"quadrature on [{a:.6g}, {b:.6g}] reached error {err:.3g} > {piece_tol:.3g} "
                f"after {info['last']} subintervals"
            )
        total += val
    return total / math.pi
