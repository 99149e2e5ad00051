"""Gauss hypergeometric and gamma-family kernels.

Series evaluation lives in the unit disk; derivatives use the
parameter-shift identities d/dz 2F1(a,b;c;z) = (ab/c) 2F1(a+1,b+1;c+1;z)
and its second-order iterate. Gamma ratios are always formed as finite
Pochhammer products, never as quotients of Gamma values, so nothing
overflows or hits a pole for orders up to 1e4.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import _kernels
from .errors import DomainError, NonConvergenceError, PoleError, PreconditionError
from .params import is_nonpos_int


@dataclass(frozen=True)
class SeriesControl:
    """Termination policy for all series summation in the package."""

    rel_tol: float = 1e-14
    max_terms: int = 10000
    consecutive_small: int = 3

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise PreconditionError("rel_tol must be positive")
        if self.max_terms < 1:
            raise PreconditionError("max_terms must be at least 1")
        if self.consecutive_small < 1:
            raise PreconditionError("consecutive_small must be at least 1")


class EvalStatus(str, Enum):
    CONVERGED = "Converged"
    MAX_TERMS_REACHED = "MaxTermsReached"


@dataclass(frozen=True)
class EvalResult:
    value: float
    terms_used: int
    tail_estimate: float
    status: EvalStatus


def pochhammer(x: float, n: int) -> float:
    """Rising factorial (x)_n = x(x+1)...(x+n-1); 1 for n = 0."""
    if n < 0:
        raise PreconditionError("pochhammer order must be non-negative")
    return _kernels.poch(float(x), int(n))


def _check_series_args(c: float, z: float) -> None:
    if abs(z) >= 1.0:
        raise DomainError(f"|z| = {abs(z)!r} is outside the unit disk")
    if is_nonpos_int(c):
        raise PoleError(f"c = {c!r} is a non-positive integer")


def gauss_2f1(a: float, b: float, c: float, z: float,
              ctl: SeriesControl | None = None) -> EvalResult:
    """2F1(a,b;c;z) by direct summation.

    Stops after `consecutive_small` successive terms fall below
    rel_tol times the running sum; the non-monotone terms produced by
    negative parameters make a single small term an unsafe signal.
    """
    if ctl is None:
        ctl = SeriesControl()
    _check_series_args(c, z)
    value, terms, last, status = _kernels.f21_value(
        float(a), float(b), float(c), float(z),
        ctl.rel_tol, ctl.max_terms, ctl.consecutive_small)
    if status == _kernels.STATUS_MAX_TERMS:
        raise NonConvergenceError(
            f"series did not settle within {ctl.max_terms} terms (last {last:.3e})")
    return EvalResult(value, terms, last, EvalStatus.CONVERGED)


def gauss_2f1_deriv(a: float, b: float, c: float, z: float, order: int,
                    ctl: SeriesControl | None = None) -> float:
    """First or second z-derivative of 2F1 via parameter shifts."""
    if order not in (1, 2):
        raise PreconditionError("derivative order must be 1 or 2")
    if ctl is None:
        ctl = SeriesControl()
    _check_series_args(c, z)
    factor = a * b / c
    if order == 1:
        shifted = gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z, ctl)
        return factor * shifted.value
    factor *= (a + 1.0) * (b + 1.0) / (c + 1.0)
    shifted = gauss_2f1(a + 2.0, b + 2.0, c + 2.0, z, ctl)
    return factor * shifted.value
