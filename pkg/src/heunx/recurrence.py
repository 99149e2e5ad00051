"""Coefficient streams for the hypergeometric expansion.

Three routes build the same c_n: the defining three-term relation, the
iterated two-term ratio available once the accessory parameter sits on a
reduction branch, and the equivalent closed form assembled from Pochhammer
products. Route agreement is the working certificate that a reduction
really holds, so the two-term generator always computes both of its forms
and checks them against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import (DivisionByZeroError, NonConvergenceError, NumericalError,
                     PoleError, PreconditionError)
from .params import HeunParams, is_nonpos_int

# forward recursion keeps full precision while the contaminating solution
# mode |a/(a-1)|^n stays bounded; past this ratio the stream switches to
# backward recursion normalized at c_0
RHO_SWITCH = 1.1

NO_TERMINATION = 10**9
TWO_TERM_AGREE_TOL = 1e-13


class CoefficientSource(str, Enum):
    THREE_TERM = "ThreeTerm"
    TWO_TERM_RATIO = "TwoTermRatio"
    GAMMA_CLOSED_FORM = "GammaClosedForm"


@dataclass(frozen=True)
class CoefficientStream:
    values: np.ndarray
    source: CoefficientSource
    params: HeunParams
    e_list: tuple

    def __len__(self) -> int:
        return len(self.values)


def coeff_R(n: float, p: HeunParams) -> float:
    return _kernels.coeff_r(float(n), p.a, p.gamma, p.epsilon)


def coeff_Q(n: float, p: HeunParams) -> float:
    return _kernels.coeff_q(float(n), p.a, p.q, p.alpha, p.beta, p.gamma,
                            p.delta, p.epsilon)


def coeff_P(n: float, p: HeunParams) -> float:
    if abs(n + p.epsilon + p.gamma) < 1e-12:
        raise DivisionByZeroError(f"n+epsilon+gamma vanishes at n = {n!r}")
    return _kernels.coeff_p(float(n), p.a, p.q, p.alpha, p.beta, p.gamma,
                            p.delta, p.epsilon)


def termination_index(p: HeunParams) -> int:
    """First index n0 with c_n = 0 for all n >= n0, or NO_TERMINATION.

    The stream terminates when gamma+epsilon-alpha or gamma+epsilon-beta is
    a non-positive integer (snapped by the shared integer-proximity rule):
    the ratio factor (x-1+n) then hits an exact zero at n = 1-x.
    """
    g = p.gamma + p.epsilon
    n0 = NO_TERMINATION
    for x in (g - p.alpha, g - p.beta):
        if is_nonpos_int(x):
            n0 = min(n0, 1 - round(x))
    return n0


def _finite_or_raise(values: np.ndarray, label: str) -> None:
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NumericalError(f"{label} produced a non-finite entry at n = {bad}")


def three_term_coefficients(p: HeunParams, n_max: int) -> CoefficientStream:
    """c_0 = 1, c_1 = -Q_0/R_1, then R_n c_n + Q_{n-1}c_{n-1} + P_{n-2}c_{n-2} = 0.

    Direction (forward vs backward-normalized) is chosen from |a/(a-1)|;
    backward runs verify the n = 1 relation afterward as a certificate.
    """
    if n_max < 0:
        raise PreconditionError("n_max must be non-negative")
    n0 = termination_index(p)
    values, status = _kernels.three_term_stream(
        p.a, p.q, p.alpha, p.beta, p.gamma, p.delta, p.epsilon,
        int(n_max), n0, RHO_SWITCH)
    if status == _kernels.STATUS_DIV_ZERO:
        raise DivisionByZeroError("a recurrence pivot R_n or P_n vanished")
    if status == _kernels.STATUS_NO_CONVERGE:
        raise NonConvergenceError("backward recursion failed the n = 1 certificate")
    if status != _kernels.STATUS_OK:
        raise NumericalError("three-term stream generation failed")
    _finite_or_raise(values, "three-term stream")
    return CoefficientStream(values, CoefficientSource.THREE_TERM, p, ())


def two_term_coefficients(p: HeunParams, e_list, n_max: int,
                          source: CoefficientSource = CoefficientSource.TWO_TERM_RATIO
                          ) -> CoefficientStream:
    """Coefficients from the factored two-term ratio of an accepted reduction.

    Both the iterated ratio and the Pochhammer closed form are computed and
    must agree within 1e-13 relative; `source` selects which one is returned.
    """
    if n_max < 0:
        raise PreconditionError("n_max must be non-negative")
    if source == CoefficientSource.THREE_TERM:
        raise PreconditionError("two-term generator cannot produce a ThreeTerm stream")
    es = np.asarray([float(e) for e in e_list], dtype=np.float64)
    for e in es:
        if is_nonpos_int(e):
            raise PoleError(f"e = {e!r} is a non-positive integer (zero denominator)")
    g = p.gamma + p.epsilon
    x1 = g - p.alpha
    x2 = g - p.beta
    n0 = termination_index(p)
    ratio = _kernels.two_term_ratio_stream(g, x1, x2, es, int(n_max), n0)
    closed = _kernels.closed_form_stream(g, x1, x2, es, int(n_max), n0)
    _finite_or_raise(ratio, "two-term ratio stream")
    _finite_or_raise(closed, "closed-form stream")
    gap = np.abs(ratio - closed)
    scale = np.abs(ratio) + np.abs(closed) + 1e-300
    worst = float(np.max(gap / scale))
    if worst > TWO_TERM_AGREE_TOL:
        raise NumericalError(
            f"ratio and closed-form streams disagree ({worst:.3e} relative)")
    values = closed if source == CoefficientSource.GAMMA_CLOSED_FORM else ratio
    return CoefficientStream(values, source, p, tuple(float(e) for e in es))


def residual_rows(stream: CoefficientStream, p: HeunParams | None = None) -> np.ndarray:
    """Scale-free recurrence defect per index; entries 0 and 1 are 0."""
    if p is None:
        p = stream.params
    return _kernels.recurrence_residual_rows(
        p.a, p.q, p.alpha, p.beta, p.gamma, p.delta, p.epsilon,
        np.asarray(stream.values, dtype=np.float64))


def recurrence_residual(stream: CoefficientStream, p: HeunParams | None = None) -> float:
    """max_n |R_n c_n + Q_{n-1}c_{n-1} + P_{n-2}c_{n-2}| over the term scale."""
    if len(stream.values) < 3:
        raise PreconditionError("residual needs at least three stream entries")
    rows = residual_rows(stream, p)
    return float(np.max(rows[2:]))


def stream_to_csv(stream: CoefficientStream, p: HeunParams | None = None) -> str:
    """CSV with columns n, c_n, ratio c_n/c_{n-1}, residual_n.

    Ratio and residual are nan where undefined (n = 0, zero predecessor,
    n < 2). Floats are emitted with repr so output is byte-deterministic.
    """
    if p is None:
        p = stream.params
    rows = _kernels.recurrence_residual_rows(
        p.a, p.q, p.alpha, p.beta, p.gamma, p.delta, p.epsilon,
        np.asarray(stream.values, dtype=np.float64))
    lines = ["n,c_n,ratio,residual"]
    vals = stream.values
    for n in range(len(vals)):
        if n == 0 or vals[n - 1] == 0.0:
            ratio = float("nan")
        else:
            ratio = float(vals[n] / vals[n - 1])
        resid = float(rows[n]) if n >= 2 else float("nan")
        lines.append(f"{n},{float(vals[n])!r},{ratio!r},{resid!r}")
    return "\n".join(lines) + "\n"
