"""Parameter records and validation shared by every other module.

The seven parameters of the canonical second-order equation with four
regular singular points {0, 1, a, infinity} are tied together by
1 + alpha + beta = gamma + delta + epsilon. The hypergeometric expansion
additionally requires alpha, beta and gamma+epsilon to stay away from
non-positive integers, where its gamma-function factors have poles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from enum import Enum

from .errors import PreconditionError, ValidationError

FUCHSIAN_TOL = 1e-12
SINGULARITY_TOL = 1e-12
INT_SNAP = 1e-9

PARAM_KEYS = ("a", "q", "alpha", "beta", "gamma", "delta", "epsilon")


class IssueCode(str, Enum):
    FUCHSIAN_VIOLATED = "FuchsianViolated"
    DEGENERATE_SINGULARITY = "DegenerateSingularity"
    FORBIDDEN_INTEGER_PARAMETER = "ForbiddenIntegerParameter"


@dataclass(frozen=True)
class ValidationIssue:
    code: IssueCode
    detail: str
    offending_value: float


def is_nonpos_int(x: float, tol: float = INT_SNAP) -> bool:
    """Integer-proximity rule: x counts as a non-positive integer when it is
    within tol of one. Keeps pole rejection deterministic for float inputs."""
    r = round(x)
    return abs(x - r) < tol and r <= 0


def delta_from_fuchsian(alpha: float, beta: float, gamma: float, epsilon: float) -> float:
    """The unique delta closing the exponent-sum relation."""
    return 1.0 + alpha + beta - gamma - epsilon


@dataclass(frozen=True)
class HeunParams:
    """Raw parameter record; carries no validity guarantee."""

    a: float
    q: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    epsilon: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(HeunParams)}


def collect_issues(p: HeunParams) -> list[ValidationIssue]:
    """Every violated invariant, not just the first."""
    issues = []
    resid = 1.0 + p.alpha + p.beta - (p.gamma + p.delta + p.epsilon)
    if abs(resid) > FUCHSIAN_TOL:
        issues.append(ValidationIssue(
            IssueCode.FUCHSIAN_VIOLATED,
            f"1+alpha+beta - (gamma+delta+epsilon) = {resid:.3e} exceeds {FUCHSIAN_TOL}",
            resid,
        ))
    if abs(p.a) < SINGULARITY_TOL or abs(p.a - 1.0) < SINGULARITY_TOL:
        issues.append(ValidationIssue(
            IssueCode.DEGENERATE_SINGULARITY,
            f"a = {p.a!r} merges singular points (a must avoid 0 and 1)",
            p.a,
        ))
    for name, value in (("alpha", p.alpha), ("beta", p.beta),
                        ("gamma+epsilon", p.gamma + p.epsilon)):
        if is_nonpos_int(value):
            issues.append(ValidationIssue(
                IssueCode.FORBIDDEN_INTEGER_PARAMETER,
                f"{name} = {value!r} is a non-positive integer (gamma-factor pole)",
                value,
            ))
    return issues


@dataclass(frozen=True)
class ValidatedHeunParams(HeunParams):
    """HeunParams that passed all three invariants at construction."""

    def __post_init__(self):
        issues = collect_issues(self)
        if issues:
            raise ValidationError(issues)


def validate_params(p: HeunParams):
    """Validated wrapper when all invariants hold, else the full issue list."""
    issues = collect_issues(p)
    if issues:
        return issues
    return ValidatedHeunParams(**p.as_dict())


def require_valid(p: HeunParams) -> ValidatedHeunParams:
    """validate_params that raises instead of returning issues."""
    result = validate_params(p)
    if isinstance(result, list):
        raise ValidationError(result)
    return result


def params_from_dict(data: dict, *, optional: tuple = ()) -> HeunParams:
    """Build HeunParams from a JSON-style mapping.

    Unknown keys are rejected. Keys listed in `optional` may be absent and
    default to 0.0 (the reduction workflow solves for q itself).
    """
    if not isinstance(data, dict):
        raise PreconditionError("parameter file must contain a JSON object")
    unknown = sorted(set(data) - set(PARAM_KEYS))
    if unknown:
        raise PreconditionError(f"unknown parameter keys: {', '.join(unknown)}")
    values = {}
    for key in PARAM_KEYS:
        if key not in data:
            if key in optional:
                values[key] = 0.0
                continue
            raise PreconditionError(f"missing parameter key: {key}")
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise PreconditionError(f"parameter {key} must be a number, got {v!r}")
        values[key] = float(v)
    return HeunParams(**values)


def params_to_dict(p: HeunParams) -> dict:
    return {k: getattr(p, k) for k in PARAM_KEYS}


def load_params_file(path: str, *, optional: tuple = ()) -> HeunParams:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise PreconditionError(f"cannot read parameter file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"parameter file is not valid JSON: {exc}") from exc
    return params_from_dict(data, optional=optional)
