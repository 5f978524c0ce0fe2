"""Minimization of the dual objective and the closed-form comparison bounds.

The tight bound rho_n is the infimum of phi_n over (c, lambda), lambda > 0.
For n >= 3 the minimizer is unique and interior; the solver exploits the
problem's structure instead of a generic optimizer:

* inner problem: for fixed c, the optimal lambda solves the monotone scalar
  equation sum_i u_i'(lambda) = n - 2, bracketed between the second-largest
  t_i and sum_i t_i, with t_i = sqrt((mu_i - c)**2 + sigma_i**2) / 2;
* outer problem: g(c) = min over lambda of phi_n(c, lambda) is convex with
  its minimum inside [min mu_i, max mu_i], so a derivative-sign bisection
  on d phi/dc at the inner optimum converges to the unique c.

Both bisections run to floating-point resolution, well inside their
iteration caps.  n = 2 is special (the minimizing set is a segment touching
lambda = 0) and is served by a closed form.

The module also provides every comparison bound: the mean-spread-plus-
variance bound ``ag_bound`` and its weighted-sum generalization, the i.i.d.
range bound ``plackett_iid_bound``, the expected-maximum bound
``bnt_max_bound``, the equal-means closed form, and the pair bounds
``gamma2_bound`` / ``pair_cov_bounds`` that also account for a known
correlation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ConvergenceError, ValidationError
from .objective import (
    DualPoint,
    MomentSpec,
    RegionPartition,
    classify_regions,
    phi,
    phi_gradient,
)

__all__ = [
    "BoundReport",
    "ag_bound",
    "ag_general_bound",
    "plackett_iid_bound",
    "bnt_max_bound",
    "rho2_closed",
    "equal_means_bound",
    "minimize_phi",
    "rho_bound",
    "gamma2_bound",
    "pair_cov_bounds",
]

#: Default gradient-norm tolerance at the reported optimum.
DEFAULT_TOL = 1e-10

#: Iteration caps for the scalar bisections.
INNER_CAP = 200
OUTER_CAP = 500

#: Relative margin below which a coordinate at the optimum is considered to
#: sit on a region boundary, degenerating the partition bookkeeping.
BOUNDARY_FLAG_REL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """Full output of a bound computation.

    ``infimum`` is the best possible lower bound max mu_i - min mu_i (the
    expected range can be driven arbitrarily close to it, never below it);
    ``rho`` is the tight upper bound; ``ag`` the closed-form comparison
    bound, so infimum <= rho <= ag always.  ``residual`` is the Euclidean
    norm of the phi gradient at ``optimum``; ``iterations`` counts outer
    search steps (closed forms report 0).
    """

    rho: float
    optimum: DualPoint
    regions: RegionPartition
    ag: float
    infimum: float
    method: str
    iterations: int
    residual: float

    def to_json_dict(self) -> dict:
        return {
            "rho": self.rho,
            "c": self.optimum.c,
            "lambda": self.optimum.lam,
            "ag": self.ag,
            "infimum": self.infimum,
            "method": self.method,
            "regions": self.regions.to_json_dict(),
            "residual": self.residual,
            "iterations": self.iterations,
        }


def ag_bound(spec: MomentSpec) -> float:
    """Closed-form upper bound sqrt(2 * sum_i [(mu_i - mu_bar)**2 + sigma_i**2])."""
    mb = spec.mu_bar
    total = math.fsum((m - mb) ** 2 + s * s for m, s in zip(spec.mu, spec.sigma))
    return math.sqrt(2.0 * total)


def ag_general_bound(spec: MomentSpec, coeffs: Sequence[float]) -> float:
    """Upper bound on E sum_i coeffs_i * X_{i:n} for ascending order statistics.

    Equals mu_bar * sum(coeffs) + sqrt(sum (coeffs - mean)**2) *
    sqrt(sum [(mu_i - mu_bar)**2 + sigma_i**2]).  With coefficients
    (-1, 0, ..., 0, 1) this is exactly :func:`ag_bound`.
    """
    cs = [float(v) for v in coeffs]
    if len(cs) != spec.n:
        raise ValidationError(
            f"need {spec.n} coefficients, got {len(cs)}"
        )
    cbar = math.fsum(cs) / len(cs)
    spread = math.fsum((v - cbar) ** 2 for v in cs)
    mb = spec.mu_bar
    total = math.fsum((m - mb) ** 2 + s * s for m, s in zip(spec.mu, spec.sigma))
    return mb * math.fsum(cs) + math.sqrt(spread) * math.sqrt(total)


def plackett_iid_bound(n: int, sigma: float) -> float:
    """Sharp expected-range bound for an i.i.d. sample with variance sigma**2."""
    n = int(n)
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")
    sigma = float(sigma)
    if sigma <= 0.0:
        raise ValidationError("sigma must be positive")
    comb = math.comb(2 * n - 2, n - 1)
    return n * sigma * math.sqrt((2.0 / (2.0 * n - 1.0)) * (1.0 - 1.0 / comb))


def _bisect_increasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cap: int,
) -> tuple[float, int]:
    """Root of a nondecreasing f with f(lo) <= 0 <= f(hi), to float resolution.

    Returns the midpoint of the final bracket and the iteration count.  The
    loop stops once the midpoint stops making progress, the bracket shrinks
    below 2**-60 of its initial width (a root at exactly 0 would otherwise
    keep halving through subnormals), or the cap is hit.
    """
    width_floor = (hi - lo) * 2.0**-60
    iters = 0
    while iters < cap:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= width_floor:
            break
        if f(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        iters += 1
    return 0.5 * (lo + hi), iters


def bnt_max_bound(spec: MomentSpec) -> tuple[float, float]:
    """Tight bound on E max_i X_i, returned together with its defining root.

    y0 is the unique solution of sum_i (y0 - mu_i)/alpha_i(y0) = n - 2 with
    alpha_i = sqrt((mu_i - y0)**2 + sigma_i**2); the left side increases
    strictly from -n to n, so the root is found by bracketed bisection.  The
    bound is -(n-2)/2 * y0 + (1/2) sum mu_i + (1/2) sum alpha_i.
    """
    mu, sigma = spec.mu, spec.sigma
    n = spec.n

    def lhs(y: float) -> float:
        return math.fsum(
            (y - m) / math.hypot(m - y, s) for m, s in zip(mu, sigma)
        ) - (n - 2)

    span = n * max(sigma)
    lo = min(mu) - span
    hi = max(mu) + span
    width = hi - lo
    for _ in range(200):
        if lhs(lo) <= 0.0:
            break
        lo -= width
        width *= 2.0
    for _ in range(200):
        if lhs(hi) >= 0.0:
            break
        hi += width
        width *= 2.0
    y0, _ = _bisect_increasing(lhs, lo, hi, cap=INNER_CAP)
    alpha = [math.hypot(m - y0, s) for m, s in zip(mu, sigma)]
    bnt = -0.5 * (n - 2) * y0 + 0.5 * math.fsum(mu) + 0.5 * math.fsum(alpha)
    return bnt, y0


def gamma2_bound(
    mu1: float, mu2: float, sigma1: float, sigma2: float, rho: float
) -> float:
    """Sharp bound on E|X1 - X2| when the correlation rho is also known.

    sqrt((mu1 - mu2)**2 + (sigma1 + sigma2)**2 - 2 (1 + rho) sigma1 sigma2);
    at rho = -1 this coincides with the two-coordinate range bound.
    """
    if sigma1 <= 0.0 or sigma2 <= 0.0:
        raise ValidationError("sigmas must be positive")
    if abs(rho) > 1.0:
        raise ValidationError(f"correlation must lie in [-1, 1], got {rho}")
    dmu = mu1 - mu2
    val = dmu * dmu + (sigma1 + sigma2) ** 2 - 2.0 * (1.0 + rho) * sigma1 * sigma2
    return math.sqrt(max(val, 0.0))


def pair_cov_bounds(
    mu1: float, mu2: float, sigma1: float, sigma2: float, rho: float
) -> tuple[float, float, float, float]:
    """Sharp bounds for a correlated pair: E max and Cov[min, max].

    Returns (maxE_low, maxE_high, cov_low, cov_high):

        max(mu1, mu2) <= E max(X1, X2)
                      <= (mu1 + mu2)/2 + gamma2/2,
        rho sigma1 sigma2 <= Cov[min, max]
                          <= (sigma1**2 + sigma2**2 + 2 rho sigma1 sigma2)/4,

    where gamma2 is :func:`gamma2_bound` of the same arguments.  Both upper
    bounds are attained simultaneously by the pair with |X1 - X2| constant.
    """
    g2 = gamma2_bound(mu1, mu2, sigma1, sigma2, rho)
    max_low = max(mu1, mu2)
    max_high = 0.5 * (mu1 + mu2) + 0.5 * g2
    cov_low = rho * sigma1 * sigma2
    cov_high = 0.25 * (sigma1 * sigma1 + sigma2 * sigma2 + 2.0 * rho * sigma1 * sigma2)
    return max_low, max_high, cov_low, cov_high


def _infimum(spec: MomentSpec) -> float:
    return max(spec.mu) - min(spec.mu)


def rho2_closed(spec: MomentSpec) -> BoundReport:
    """Closed-form tight bound for a pair: sqrt((mu1-mu2)**2 + (sigma1+sigma2)**2).

    The minimizing set of phi_2 is the segment {c0} x (0, lambda0], so the
    reported optimum is its right endpoint: c0 = (sigma1 mu2 + sigma2 mu1) /
    (sigma1 + sigma2) and lambda0 = rho2 min(sigma) / (2 (sigma1 + sigma2)).
    """
    if spec.n != 2:
        raise ValidationError(f"closed form requires n = 2, got n = {spec.n}")
    (m1, m2), (s1, s2) = spec.mu, spec.sigma
    rho = math.hypot(m1 - m2, s1 + s2)
    c0 = (s1 * m2 + s2 * m1) / (s1 + s2)
    lam0 = rho * min(s1, s2) / (2.0 * (s1 + s2))
    point = DualPoint(c=c0, lam=lam0)
    grad = phi_gradient(point, spec)
    return BoundReport(
        rho=rho,
        optimum=point,
        regions=classify_regions(point, spec),
        ag=ag_bound(spec),
        infimum=_infimum(spec),
        method="n2-closed-form",
        iterations=0,
        residual=math.hypot(*grad),
    )


def _means_equal(spec: MomentSpec) -> bool:
    mb = spec.mu_bar
    scale = 1.0 + max(abs(m) for m in spec.mu)
    return max(abs(m - mb) for m in spec.mu) <= 1e-12 * scale


def equal_means_bound(spec: MomentSpec) -> float:
    """Tight bound when all means coincide.

    sqrt(2 sum sigma_i**2) when 2 max sigma_i**2 <= sum sigma_i**2, else
    max sigma_i + sqrt(sum sigma_i**2 - max sigma_i**2).
    """
    if not _means_equal(spec):
        raise ValidationError("closed form requires all means equal")
    s2 = [s * s for s in spec.sigma]
    total = math.fsum(s2)
    top = max(s2)
    if 2.0 * top <= total:
        return math.sqrt(2.0 * total)
    return math.sqrt(top) + math.sqrt(total - top)


def _equal_means_optimum(spec: MomentSpec) -> DualPoint:
    """Known minimizer in the equal-means case, used for cross-checks."""
    s2 = [s * s for s in spec.sigma]
    total = math.fsum(s2)
    top = max(s2)
    if 2.0 * top <= total:
        lam = math.sqrt(2.0 * total) / 4.0
    else:
        lam = 0.5 * math.sqrt(total - top)
    return DualPoint(c=spec.mu_bar, lam=lam)


def _t_values(mu: Sequence[float], sigma: Sequence[float], c: float) -> list[float]:
    return [0.5 * math.hypot(m - c, s) for m, s in zip(mu, sigma)]


def _sum_uprime(
    mu: Sequence[float], sigma: Sequence[float], c: float, lam: float
) -> float:
    """sum_i u_i'(lambda): each term is the middle-mass probability p_i^zero.

    Per coordinate (a = |mu_i - c|, theta**2 = a**2 + sigma**2):

    * lambda <= theta/2:              0
    * theta/2 < lambda < theta**2/2a: 1 - theta**2 / (4 lambda**2)
    * lambda >= theta**2/2a:          (1 + (lambda-a)/sqrt((lambda-a)**2+sigma**2))/2

    continuous and nondecreasing in lambda, increasing from 0 toward n.
    """
    total = 0.0
    for m, s in zip(mu, sigma):
        a = abs(m - c)
        theta2 = a * a + s * s
        if 4.0 * lam * lam <= theta2:
            continue
        if a > 0.0 and 2.0 * a * lam >= theta2:
            w = lam - a
            total += 0.5 * (1.0 + w / math.hypot(w, s))
        else:
            total += 1.0 - theta2 / (4.0 * lam * lam)
    return total


def _inner_lambda(
    mu: Sequence[float], sigma: Sequence[float], c: float, n: int
) -> float:
    """The unique lambda minimizing phi(c, .), by bracketed bisection.

    The optimality condition sum_i u_i'(lambda) = n - 2 has its root strictly
    between the second-largest t_i and sum_i t_i: at the left end the two
    largest-t coordinates contribute nothing and every other term is below 1,
    while the sum tends to n > n - 2 as lambda grows.
    """
    ts = sorted(_t_values(mu, sigma, c), reverse=True)
    lo = ts[1]
    hi = math.fsum(ts)
    target = float(n - 2)

    def h(lam: float) -> float:
        return _sum_uprime(mu, sigma, c, lam) - target

    for _ in range(200):
        if h(hi) >= 0.0:
            break
        hi *= 2.0
    root, _ = _bisect_increasing(h, lo, hi, cap=INNER_CAP)
    return root


def _golden_section(
    f: Callable[[float], float], lo: float, hi: float, iters: int = 200
) -> float:
    """Minimizer of a unimodal f on [lo, hi] to floating-point resolution."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if x2 - x1 <= 0.0:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def _boundary_degenerate(spec: MomentSpec, point: DualPoint) -> bool:
    """True when some coordinate sits on a region boundary at ``point``."""
    c, lam = point.c, point.lam
    four_lam2 = 4.0 * lam * lam
    for m, s in zip(spec.mu, spec.sigma):
        xi = m - c
        theta2 = xi * xi + s * s
        if abs(theta2 - four_lam2) <= BOUNDARY_FLAG_REL * max(theta2, four_lam2):
            return True
        edge = 2.0 * lam * abs(xi)
        if edge > 0.0 and abs(theta2 - edge) <= BOUNDARY_FLAG_REL * max(theta2, edge):
            return True
    return False


def _report_at(
    spec: MomentSpec,
    point: DualPoint,
    method: str,
    iterations: int,
    rho: float | None = None,
) -> BoundReport:
    grad = phi_gradient(point, spec)
    if _boundary_degenerate(spec, point) and method != "n2-closed-form":
        method = method + "+boundary-degenerate"
    return BoundReport(
        rho=phi(point, spec) if rho is None else rho,
        optimum=point,
        regions=classify_regions(point, spec),
        ag=ag_bound(spec),
        infimum=_infimum(spec),
        method=method,
        iterations=iterations,
        residual=math.hypot(*grad),
    )


def minimize_phi(
    spec: MomentSpec,
    tol: float = DEFAULT_TOL,
    *,
    c_start: float | None = None,
) -> BoundReport:
    """Unique minimizer of phi_n for n >= 3, with gradient norm <= tol.

    ``c_start``, when given, seeds the outer bracket with one extra sign
    probe; any start converges to the same optimum, which is how the
    restart-agreement checks exercise uniqueness.
    """
    if float(tol) <= 0.0:
        raise ValidationError("tol must be positive")
    if spec.n == 2:
        raise ValidationError(
            "n = 2 has a segment of minimizers; use rho2_closed instead"
        )
    mu, sigma = spec.mu, spec.sigma
    n = spec.n

    def slope(c: float) -> float:
        lam = _inner_lambda(mu, sigma, c, n)
        point = DualPoint(c=c, lam=lam)
        return phi_gradient(point, spec)[0]

    lo, hi = min(mu), max(mu)
    iterations = 0
    if hi - lo <= 1e-12 * (1.0 + max(abs(lo), abs(hi))):
        c0 = spec.mu_bar
    else:
        if c_start is not None and lo < c_start < hi:
            if slope(c_start) <= 0.0:
                lo = c_start
            else:
                hi = c_start
            iterations += 1
        # The outer derivative is nonpositive at min mu and nonnegative at
        # max mu, so the sign change sits inside the bracket.
        if slope(lo) >= 0.0:
            c0 = lo
        elif slope(hi) <= 0.0:
            c0 = hi
        else:
            c0, extra = _bisect_increasing(slope, lo, hi, cap=OUTER_CAP)
            iterations += extra

    lam0 = _inner_lambda(mu, sigma, c0, n)
    report = _report_at(spec, DualPoint(c=c0, lam=lam0), "general-solver", iterations)
    if report.residual <= tol:
        return report

    # Fallback for the (unobserved in practice) case where the derivative
    # search lands short: value-based golden-section on g(c) = min_lam phi.
    def g(c: float) -> float:
        lam = _inner_lambda(mu, sigma, c, n)
        return phi(DualPoint(c=c, lam=lam), spec)

    c1 = _golden_section(g, min(mu), max(mu))
    lam1 = _inner_lambda(mu, sigma, c1, n)
    fallback = _report_at(
        spec, DualPoint(c=c1, lam=lam1), "general-solver", iterations + OUTER_CAP
    )
    best = fallback if fallback.residual < report.residual else report
    if best.residual <= tol:
        return best
    raise ConvergenceError(
        f"gradient norm {best.residual:.3e} above tolerance {tol:.3e} "
        f"at c={best.optimum.c!r}, lambda={best.optimum.lam!r}",
        best=best,
    )


def rho_bound(spec: MomentSpec, tol: float = DEFAULT_TOL) -> BoundReport:
    """Tight expected-range bound for any spec, dispatching on structure.

    n = 2 uses the closed form (the general solver's uniqueness assumptions
    fail there).  Equal means run the solver and are cross-checked against
    the closed form, which then supplies the reported value.
    """
    if spec.n == 2:
        return rho2_closed(spec)
    if _means_equal(spec):
        closed = equal_means_bound(spec)
        solved = minimize_phi(spec, tol)
        if abs(solved.rho - closed) > 1e-8 * (1.0 + abs(closed)):
            raise ConvergenceError(
                f"solver value {solved.rho!r} disagrees with the equal-means "
                f"closed form {closed!r}",
                best=solved,
            )
        method = "equal-means-closed-form"
        if solved.method.endswith("+boundary-degenerate"):
            method += "+boundary-degenerate"
        return BoundReport(
            rho=closed,
            optimum=solved.optimum,
            regions=solved.regions,
            ag=solved.ag,
            infimum=solved.infimum,
            method=method,
            iterations=solved.iterations,
            residual=solved.residual,
        )
    return minimize_phi(spec, tol)
