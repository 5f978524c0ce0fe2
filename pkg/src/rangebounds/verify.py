"""Independent numerical checks for bounds and constructed distributions.

Four kinds of evidence, each computed by a code path separate from the
solver and the constructions it certifies:

* exact finite-support evaluation of moments and expected range
  (:func:`check_moments`, :func:`expected_range`);
* seeded Monte Carlo estimation with standard errors
  (:func:`mc_expected_range`);
* random feasible joints bounding the supremum from below
  (:func:`feasible_probe`) and a grid of dual objective values bounding it
  from above (:func:`dual_grid_check`);
* the vanishing-probability mixture showing the expected range can approach
  max mu_i - min mu_i (:func:`infimum_witness`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ValidationError
from .extremal import JointDiscreteDistribution
from .objective import MomentSpec, phi_array
from .solver import rho_bound

__all__ = [
    "MomentCheckReport",
    "check_moments",
    "expected_range",
    "mc_expected_range",
    "feasible_probe",
    "dual_grid_check",
    "infimum_witness",
]


@dataclass(frozen=True)
class MomentCheckReport:
    """Per-coordinate moment deviations of a finite-support joint law.

    ``passed`` is True exactly when every deviation is within the tolerance
    the check was run with.  The JSON key for it is ``"pass"``.
    """

    mean_errors: tuple[float, ...]
    var_errors: tuple[float, ...]
    expected_range: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "mean_errors": list(self.mean_errors),
            "var_errors": list(self.var_errors),
            "expected_range": self.expected_range,
            "pass": self.passed,
        }


def expected_range(joint: JointDiscreteDistribution) -> float:
    """E[max_i X_i - min_i X_i], summed exactly over the support."""
    return math.fsum(p * (max(vec) - min(vec)) for vec, p in zip(joint.support, joint.prob))


def check_moments(
    joint: JointDiscreteDistribution, spec: MomentSpec, tol: float = 1e-10
) -> MomentCheckReport:
    """Exact moment comparison of a finite-support law against a spec."""
    if joint.dim != spec.n:
        raise ValidationError(
            f"joint has dimension {joint.dim}, spec has {spec.n} coordinates"
        )
    mean_errors = []
    var_errors = []
    for i, (m, s) in enumerate(zip(spec.mu, spec.sigma)):
        mean_i = math.fsum(p * vec[i] for vec, p in zip(joint.support, joint.prob))
        var_i = math.fsum(
            p * (vec[i] - mean_i) ** 2 for vec, p in zip(joint.support, joint.prob)
        )
        mean_errors.append(abs(mean_i - m))
        var_errors.append(abs(var_i - s * s))
    passed = max(max(mean_errors), max(var_errors)) <= tol
    return MomentCheckReport(
        mean_errors=tuple(mean_errors),
        var_errors=tuple(var_errors),
        expected_range=expected_range(joint),
        passed=passed,
    )


def mc_expected_range(
    source: object, n_samples: int, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo estimate of E R_n with its standard error.

    ``source`` is either a :class:`JointDiscreteDistribution` or any object
    with a ``sample(n_samples, seed=...)`` method returning an (n, dim)
    array.  Deterministic for fixed (seed, n_samples).
    """
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValidationError("n_samples must be at least 1")
    if isinstance(source, JointDiscreteDistribution):
        support, prob = source.arrays()
        ranges_by_atom = support.max(axis=1) - support.min(axis=1)
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(prob), size=n_samples, p=prob / prob.sum())
        ranges = ranges_by_atom[idx]
    elif hasattr(source, "sample"):
        draws = np.asarray(source.sample(n_samples, seed=seed), dtype=float)
        ranges = draws.max(axis=1) - draws.min(axis=1)
    else:
        raise ValidationError(
            "source must be a JointDiscreteDistribution or expose sample()"
        )
    estimate = float(ranges.mean())
    if n_samples == 1:
        return estimate, 0.0
    std_error = float(ranges.std(ddof=1) / math.sqrt(n_samples))
    return estimate, std_error


def _probe_joints(
    spec: MomentSpec, trials: int, seed: int
) -> Iterator[JointDiscreteDistribution]:
    """Random feasible joints matching ``spec`` exactly.

    Each trial draws per-coordinate supports of 2-5 points and a random
    coupling over (a subset of) the product grid, then standardizes each
    coordinate affinely; affine maps preserve feasibility, so the moment
    match is exact up to rounding.  Degenerate draws (a coordinate with
    almost no variance under the coupling) are resampled.
    """
    rng = np.random.default_rng(seed)
    n = spec.n
    mu, sigma = spec.arrays()
    produced = 0
    attempts = 0
    max_attempts = 100 * trials + 100
    while produced < trials:
        attempts += 1
        if attempts > max_attempts:
            raise ValidationError(
                "probe generator kept drawing degenerate coordinates"
            )
        sizes = rng.integers(2, 6, size=n)
        values = [np.sort(rng.normal(0.0, 1.0, size=k)) for k in sizes]
        cells = int(np.prod(sizes))
        if cells <= 64:
            index_grid = np.indices(sizes).reshape(n, -1).T
        else:
            index_grid = np.column_stack(
                [rng.integers(0, k, size=64) for k in sizes]
            )
            index_grid = np.unique(index_grid, axis=0)
        weights = rng.random(len(index_grid)) + 1e-3
        weights /= weights.sum()
        points = np.column_stack(
            [values[i][index_grid[:, i]] for i in range(n)]
        )
        means = weights @ points
        second = weights @ points**2
        var = second - means**2
        if np.any(var < 1e-12):
            continue
        standardized = mu + sigma * (points - means) / np.sqrt(var)
        # Exact-duplicate rows would violate the joint's invariants; merge.
        atoms: dict[tuple[float, ...], float] = {}
        for row, w in zip(standardized, weights):
            key = tuple(float(v) for v in row)
            atoms[key] = atoms.get(key, 0.0) + float(w)
        produced += 1
        yield JointDiscreteDistribution(
            support=tuple(atoms.keys()), prob=tuple(atoms.values())
        )


def feasible_probe(spec: MomentSpec, trials: int, seed: int = 0) -> float:
    """Largest exact expected range among random feasible joints.

    A lower bound for the supremum: every probe law carries the prescribed
    moments, so its expected range can never exceed the tight bound.
    """
    trials = int(trials)
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    return max(expected_range(j) for j in _probe_joints(spec, trials, seed))


def dual_grid_check(spec: MomentSpec, grid: int = 200) -> float:
    """Minimum of the dual objective over a rectangular (c, lambda) grid.

    Every grid value upper-bounds E R_n, so the minimum must stay above the
    reported tight bound (up to rounding); the reported optimum itself is
    appended to the grid axes so resolution cannot hide it.  Grid values are
    computed by the vectorized objective, a code path independent of the
    scalar solver.
    """
    grid = int(grid)
    if grid < 2:
        raise ValidationError("grid resolution must be at least 2")
    report = rho_bound(spec)
    c0, lam0 = report.optimum.c, report.optimum.lam
    mu, sigma = spec.arrays()
    span = float(sigma.max())
    c_axis = np.linspace(mu.min() - span, mu.max() + span, grid)
    t_sum = float(np.sum(0.5 * np.hypot(mu - c0, sigma)))
    lam_hi = 2.0 * t_sum
    lam_axis = np.linspace(lam_hi / (10.0 * grid), lam_hi, grid)
    c_axis = np.append(c_axis, c0)
    lam_axis = np.append(lam_axis, lam0)
    values = phi_array(spec, c_axis[:, None], lam_axis[None, :])
    return float(values.min())


def infimum_witness(
    spec: MomentSpec,
    epsilon: float,
    n_samples: int = 1_000_000,
    seed: int = 0,
    dispersion: np.ndarray | None = None,
) -> float:
    """Empirical E R_n of the mixture witnessing the greatest lower bound.

    The witness equals mu with probability 1 - epsilon and
    mu + Z / sqrt(epsilon) with probability epsilon, where Z has covariance
    ``dispersion`` (default diag(sigma**2), realized as A V with V i.i.d.
    symmetric +/-1 and A the symmetric square root).  Its moments match the
    spec exactly while E R_n approaches max mu_i - min mu_i as epsilon -> 0.
    """
    epsilon = float(epsilon)
    if not (0.0 < epsilon < 1.0):
        raise ValidationError(f"epsilon must lie strictly in (0, 1), got {epsilon}")
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValidationError("n_samples must be at least 1")
    mu, sigma = spec.arrays()
    n = spec.n
    if dispersion is None:
        root = np.diag(sigma)
    else:
        disp = np.asarray(dispersion, dtype=float)
        if disp.shape != (n, n):
            raise ValidationError(f"dispersion must be {n} x {n}, got {disp.shape}")
        if np.max(np.abs(disp - disp.T)) > 1e-10:
            raise ValidationError("dispersion must be symmetric")
        if np.max(np.abs(np.diag(disp) - sigma**2)) > 1e-10:
            raise ValidationError("dispersion diagonal must equal sigma**2")
        eigvals, eigvecs = np.linalg.eigh(disp)
        if eigvals.min() < -1e-10:
            raise ValidationError("dispersion must be nonnegative definite")
        root = eigvecs @ np.diag(np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T
    rng = np.random.default_rng(seed)
    flags = rng.random(n_samples) < epsilon
    k = int(flags.sum())
    base_range = float(mu.max() - mu.min())
    if k == 0:
        return base_range
    v = rng.integers(0, 2, size=(k, n)) * 2.0 - 1.0
    inflated = mu + (v @ root.T) / math.sqrt(epsilon)
    ranges = inflated.max(axis=1) - inflated.min(axis=1)
    total = base_range * (n_samples - k) + float(ranges.sum())
    return total / n_samples
