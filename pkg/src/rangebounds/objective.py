"""Problem instances and the convex dual objective for expected-range bounds.

The range of a random vector X = (X_1, ..., X_n) is R_n = max_i X_i - min_i
X_i.  When each coordinate's mean mu_i and variance sigma_i**2 are fixed but
the dependence structure is arbitrary, the sharp upper bound on E R_n equals

    rho_n = inf over c real, lambda > 0 of phi_n(c, lambda),

    phi_n(c, lambda) = -(n - 2) * lambda
                       + (lambda / 2) * sum_i U((mu_i - c)/lambda, sigma_i/lambda),

where U(x, y) is the largest possible value of E[|Z - 1| + |Z + 1|] over all
laws with mean x and standard deviation y.  U is convex, continuously
differentiable, and piecewise closed-form with three branches; consequently
phi_n is convex on the half-plane lambda > 0 and the infimum is attained at a
unique point for n >= 3.

This module houses the problem container (:class:`MomentSpec`), candidate
optimization points (:class:`DualPoint`), the branch bookkeeping
(:class:`RegionPartition`), and the scalar functions ``u_value``,
``u_gradient``, ``phi``, ``phi_gradient``, ``classify_regions``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ValidationError

__all__ = [
    "MomentSpec",
    "DualPoint",
    "RegionPartition",
    "u_value",
    "u_gradient",
    "phi",
    "phi_gradient",
    "classify_regions",
]

#: Relative tolerance used to resolve ties on region boundaries.
BOUNDARY_REL_TOL = 1e-12


def _as_float_tuple(values: Iterable[float], name: str) -> tuple[float, ...]:
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a sequence of numbers") from exc
    if not all(math.isfinite(v) for v in out):
        raise ValidationError(f"{name} must contain only finite values")
    return out


@dataclass(frozen=True)
class MomentSpec:
    """Per-coordinate means and standard deviations of a random vector.

    The dependence between coordinates is deliberately unspecified: every
    bound computed from a ``MomentSpec`` holds for all joint distributions
    with these marginal moments.
    """

    mu: tuple[float, ...]
    sigma: tuple[float, ...]

    def __post_init__(self) -> None:
        mu = _as_float_tuple(self.mu, "mu")
        sigma = _as_float_tuple(self.sigma, "sigma")
        if len(mu) != len(sigma):
            raise ValidationError(
                f"mu and sigma must have equal length, got {len(mu)} and {len(sigma)}"
            )
        if len(mu) < 2:
            raise ValidationError(f"need at least two coordinates, got {len(mu)}")
        if any(s <= 0.0 for s in sigma):
            raise ValidationError("every sigma must be strictly positive")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def mu_bar(self) -> float:
        """Mean of the means."""
        return math.fsum(self.mu) / self.n

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """The (mu, sigma) pair as float arrays, for vectorized evaluation."""
        return np.asarray(self.mu, dtype=float), np.asarray(self.sigma, dtype=float)

    def to_json_dict(self) -> dict:
        return {"mu": list(self.mu), "sigma": list(self.sigma)}

    @classmethod
    def from_json_dict(cls, data: object) -> "MomentSpec":
        if not isinstance(data, dict):
            raise ValidationError("spec must be a JSON object with 'mu' and 'sigma'")
        missing = {"mu", "sigma"} - set(data)
        if missing:
            raise ValidationError(f"spec is missing required keys: {sorted(missing)}")
        return cls(mu=data["mu"], sigma=data["sigma"])


@dataclass(frozen=True)
class DualPoint:
    """A candidate (c, lambda) with lambda > 0.

    ``lam`` is the scale variable; the attribute avoids the ``lambda``
    keyword, while JSON output uses the key ``"lambda"``.
    """

    c: float
    lam: float

    def __post_init__(self) -> None:
        c = float(self.c)
        lam = float(self.lam)
        if not (math.isfinite(c) and math.isfinite(lam)):
            raise ValidationError("DualPoint coordinates must be finite")
        if lam <= 0.0:
            raise ValidationError(f"lambda must be positive, got {lam}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "lam", lam)

    def to_json_dict(self) -> dict:
        return {"c": self.c, "lambda": self.lam}


@dataclass(frozen=True)
class RegionPartition:
    """Disjoint classification of coordinate indices at a given (c, lambda).

    With xi_i = mu_i - c and theta_i**2 = xi_i**2 + sigma_i**2:

    * ``i1``: theta_i**2 >= 4 lambda**2 (two-point extremal marginal),
    * ``i2``: the strict middle band (interior three-point marginal),
    * ``i3``: theta_i**2 <= 2 lambda xi_i (no mass below c - lambda),
    * ``i4``: theta_i**2 <= -2 lambda xi_i (no mass above c + lambda).

    Indices are 0-based.
    """

    i1: tuple[int, ...]
    i2: tuple[int, ...]
    i3: tuple[int, ...]
    i4: tuple[int, ...]

    def __post_init__(self) -> None:
        groups = (self.i1, self.i2, self.i3, self.i4)
        coerced = tuple(tuple(int(i) for i in g) for g in groups)
        all_indices = [i for g in coerced for i in g]
        n = len(all_indices)
        if len(set(all_indices)) != n or set(all_indices) != set(range(n)):
            raise ValidationError(
                "region sets must be disjoint and cover 0..n-1 exactly"
            )
        for name, g in zip(("i1", "i2", "i3", "i4"), coerced):
            object.__setattr__(self, name, g)

    @property
    def n(self) -> int:
        return len(self.i1) + len(self.i2) + len(self.i3) + len(self.i4)

    def region_of(self, index: int) -> str:
        for name, g in (("I1", self.i1), ("I2", self.i2), ("I3", self.i3), ("I4", self.i4)):
            if index in g:
                return name
        raise ValidationError(f"index {index} outside 0..{self.n - 1}")

    def to_json_dict(self) -> dict:
        return {
            "I1": list(self.i1),
            "I2": list(self.i2),
            "I3": list(self.i3),
            "I4": list(self.i4),
        }


def _require_positive_y(y: float) -> float:
    y = float(y)
    if not math.isfinite(y) or y <= 0.0:
        raise ValidationError(f"y must be a positive real, got {y}")
    return y


def u_value(x: float, y: float) -> float:
    """Largest E[|Z - 1| + |Z + 1|] over laws with mean x, standard deviation y.

    Three branches, continuous across their boundaries:

    * x**2 + y**2 >= 4:        2 * sqrt(x**2 + y**2)
    * 2|x| < x**2 + y**2 < 4:  2 + (x**2 + y**2) / 2
    * x**2 + y**2 <= 2|x|:     |x| + 1 + sqrt((|x| - 1)**2 + y**2)

    Always exceeds 2, and is at least 2 * max(|x|, 1).
    """
    x = float(x)
    y = _require_positive_y(y)
    r2 = x * x + y * y
    if r2 >= 4.0:
        return 2.0 * math.sqrt(r2)
    ax = abs(x)
    if r2 <= 2.0 * ax:
        return ax + 1.0 + math.hypot(ax - 1.0, y)
    return 2.0 + 0.5 * r2


def u_gradient(x: float, y: float) -> tuple[float, float]:
    """Gradient (dU/dx, dU/dy) of :func:`u_value`, continuous on y > 0.

    On the outer branch x**2 + y**2 >= 4 the gradient is
    (2x, 2y) / sqrt(x**2 + y**2), which matches the middle branch's (x, y)
    on the circle x**2 + y**2 = 4.  The inner branch splits by the sign
    of x.
    """
    x = float(x)
    y = _require_positive_y(y)
    r2 = x * x + y * y
    if r2 >= 4.0:
        s = math.sqrt(r2)
        return 2.0 * x / s, 2.0 * y / s
    if r2 <= 2.0 * x:
        s = math.hypot(x - 1.0, y)
        return (x - 1.0) / s + 1.0, y / s
    if r2 <= -2.0 * x:
        s = math.hypot(x + 1.0, y)
        return (x + 1.0) / s - 1.0, y / s
    return x, y


def phi(p: DualPoint, spec: MomentSpec) -> float:
    """The dual objective phi_n(c, lambda); every value upper-bounds E R_n."""
    c, lam = p.c, p.lam
    total = math.fsum(
        u_value((m - c) / lam, s / lam) for m, s in zip(spec.mu, spec.sigma)
    )
    return -(spec.n - 2) * lam + 0.5 * lam * total


def phi_gradient(p: DualPoint, spec: MomentSpec) -> tuple[float, float]:
    """Gradient (d phi/dc, d phi/d lambda), assembled by the chain rule.

    With x_i = (mu_i - c)/lambda and y_i = sigma_i/lambda:

        d phi/dc      = -(1/2) sum_i U_x(x_i, y_i)
        d phi/dlambda = -(n - 2)
                        + (1/2) sum_i [U - x_i U_x - y_i U_y](x_i, y_i)

    Region-wise this reduces to sum of p_i^minus - p_i^plus and
    -(n - 2) + sum of p_i^zero over the extremal marginal probabilities.
    """
    c, lam = p.c, p.lam
    dc_terms = []
    dlam_terms = []
    for m, s in zip(spec.mu, spec.sigma):
        x = (m - c) / lam
        y = s / lam
        u = u_value(x, y)
        ux, uy = u_gradient(x, y)
        dc_terms.append(ux)
        dlam_terms.append(u - x * ux - y * uy)
    d_c = -0.5 * math.fsum(dc_terms)
    d_lam = -(spec.n - 2) + 0.5 * math.fsum(dlam_terms)
    return d_c, d_lam


def _classify_one(
    mu: float, sigma: float, c: float, lam: float, rel_tol: float = BOUNDARY_REL_TOL
) -> str:
    """Region label for a single coordinate at (c, lambda).

    Boundary ties go to I1 first (where the two-point marginal applies), then
    to I3/I4 at their defining equalities; U and its gradient agree across the
    boundaries, so only the extremal-marginal bookkeeping is affected.
    """
    xi = mu - c
    theta2 = xi * xi + sigma * sigma
    four_lam2 = 4.0 * lam * lam
    if theta2 >= four_lam2 - rel_tol * max(theta2, four_lam2):
        return "I1"
    edge = 2.0 * lam * xi
    if xi > 0.0 and theta2 <= edge + rel_tol * max(theta2, edge):
        return "I3"
    if xi < 0.0 and theta2 <= -edge + rel_tol * max(theta2, -edge):
        return "I4"
    return "I2"


def classify_regions(p: DualPoint, spec: MomentSpec) -> RegionPartition:
    """Assign every coordinate to exactly one of I1..I4 at the point ``p``."""
    groups: dict[str, list[int]] = {"I1": [], "I2": [], "I3": [], "I4": []}
    for i, (m, s) in enumerate(zip(spec.mu, spec.sigma)):
        groups[_classify_one(m, s, p.c, p.lam)].append(i)
    return RegionPartition(
        i1=tuple(groups["I1"]),
        i2=tuple(groups["I2"]),
        i3=tuple(groups["I3"]),
        i4=tuple(groups["I4"]),
    )


def u_value_array(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized :func:`u_value` for grid evaluation; y must be positive.

    Kept as an independent numpy formulation (rather than a loop over the
    scalar function) so grid-based certificates exercise a second code path.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0):
        raise ValidationError("y must be positive everywhere")
    r2 = x * x + y * y
    ax = np.abs(x)
    outer = 2.0 * np.sqrt(r2)
    middle = 2.0 + 0.5 * r2
    inner = ax + 1.0 + np.hypot(ax - 1.0, y)
    return np.where(r2 >= 4.0, outer, np.where(r2 <= 2.0 * ax, inner, middle))


def phi_array(
    spec: MomentSpec, c: np.ndarray, lam: np.ndarray
) -> np.ndarray:
    """Vectorized phi over broadcastable arrays of c and lambda > 0."""
    c = np.asarray(c, dtype=float)
    lam = np.asarray(lam, dtype=float)
    mu, sigma = spec.arrays()
    cb, lb = np.broadcast_arrays(c, lam)
    total = np.zeros(cb.shape, dtype=float)
    for m, s in zip(mu, sigma):
        total += u_value_array((m - cb) / lb, s / lb)
    return -(spec.n - 2) * lb + 0.5 * lb * total
