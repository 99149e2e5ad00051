"""Independent certification path: a power series about the origin.

The coefficients come from collecting powers of z in the cleared-denominator
form of the equation with undetermined b_n, nothing shared with the
expansion machinery; the test suite re-checks order-by-order that the
truncated series leaves no low-order residual, so this path certifies the
main one without any common failure mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, PoleError, PreconditionError
from .evaluator import evaluate_expansion
from .params import ValidatedHeunParams, is_nonpos_int
from .reduction import ReductionCase
from .special import EvalResult, EvalStatus, SeriesControl

SAFE_RADIUS_FACTOR = 0.9
_TAIL_OK = 1e-12


@dataclass(frozen=True)
class FrobeniusSeries:
    coefficients: np.ndarray
    radius_hint: float
    params: ValidatedHeunParams


def frobenius_coefficients(p: ValidatedHeunParams, n_max: int) -> FrobeniusSeries:
    """b_0 = 1 and successors from the collected-power identity.

    Collecting the z^m coefficient of z(z-1)(z-a)u'' + [gamma(z-1)(z-a)
    + delta z(z-a) + epsilon z(z-1)]u' + (alpha beta z - q)u with
    u = sum b_n z^n gives

        a(m+1)(m+gamma) b_{m+1} = [(1+a)m(m-1) + (gamma(1+a) + a delta
            + epsilon)m + q] b_m - [(m-1)(m-2) + (gamma+delta+epsilon)(m-1)
            + alpha beta] b_{m-1}.

    The leading denominator needs gamma away from non-positive integers.
    """
    if n_max < 0:
        raise PreconditionError("n_max must be non-negative")
    if is_nonpos_int(p.gamma):
        raise PoleError(f"gamma = {p.gamma!r} is a non-positive integer; "
                        "no power-series solution with unit leading term")
    coeffs, status = _kernels.frobenius_fill(p.a, p.q, p.alpha, p.beta,
                                             p.gamma, p.delta, p.epsilon,
                                             int(n_max))
    if status != _kernels.STATUS_OK:
        raise PoleError("power-series denominator vanished")
    return FrobeniusSeries(coefficients=coeffs,
                           radius_hint=min(1.0, abs(p.a)),
                           params=p)


def frobenius_eval(series: FrobeniusSeries, z: float) -> EvalResult:
    """Horner evaluation with a last-three-terms tail estimate."""
    safe = SAFE_RADIUS_FACTOR * series.radius_hint
    if abs(z) >= safe:
        raise DomainError(f"|z| = {abs(z)!r} is outside the safe radius {safe!r}")
    value, tail = _kernels.horner_eval(series.coefficients, float(z))
    converged = tail <= _TAIL_OK * (abs(value) + 1e-300)
    return EvalResult(float(value), len(series.coefficients), float(tail),
                      EvalStatus.CONVERGED if converged else EvalStatus.MAX_TERMS_REACHED)


def cross_check(case: ReductionCase, z_points, n_max: int = 400,
                ctl: SeriesControl | None = None) -> float:
    """Max relative deviation between the summed expansion and the power
    series, after matching the two at z = 0 (the series has b_0 = 1, so the
    match factor is just the expansion value at the origin)."""
    if ctl is None:
        ctl = SeriesControl()
    scale = evaluate_expansion(case, 0.0, ctl).value
    if abs(scale) < 1e-280:
        raise PreconditionError("expansion vanishes at the origin; cannot normalize")
    series = frobenius_coefficients(case.params, n_max)
    worst = 0.0
    for z in z_points:
        z = float(z)
        ue = evaluate_expansion(case, z, ctl).value
        uf = frobenius_eval(series, z).value
        dev = abs(ue - scale * uf) / (abs(ue) + 1e-300)
        worst = max(worst, dev)
    return worst
