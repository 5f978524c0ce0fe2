"""Constructions attaining the bounds: marginals, couplings, joint laws.

At the optimal (c, lambda) each coordinate's worst-case marginal is a law on
at most three points x_i^- < c - lambda < x_i^0 < c + lambda < x_i^+ with
probabilities (p_i^-, p_i^0, p_i^+) determined by the coordinate's region.
At the optimum the masses satisfy sum_i p_i^+ = sum_i p_i^- = 1 and
sum_i p_i^0 = n - 2, so a joint law attaining the bound is specified by a
probability matrix Q with row marginals p^+, column marginals p^-, and zero
diagonal: the outcome at cell (i, j) puts coordinate i at its upper point,
coordinate j at its lower point, and every other coordinate at its middle
point.  Such a matrix exists if and only if max_i (p_i^+ + p_i^-) <= 1,
which always holds at the optimum.

The module also decides when the closed-form comparison bound is tight
(`ag_tightness`), builds the distribution attaining the expected-maximum
bound (`bnt_extremal_max`), and constructs the correlated pair with constant
coordinate gap (`extremal_pair_given_correlation`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InfeasibleCouplingError, ValidationError
from .objective import DualPoint, MomentSpec, _classify_one
from .solver import BoundReport, bnt_max_bound, gamma2_bound, rho_bound

__all__ = [
    "ThreePointDist",
    "ProbabilityMatrix",
    "JointDiscreteDistribution",
    "univariate_extremal",
    "extremal_marginals",
    "zero_trace_coupling",
    "perturb_coupling",
    "build_extremal_joint",
    "extremal_components",
    "ExtremalComponents",
    "ag_tightness",
    "bnt_extremal_max",
    "extremal_pair_given_correlation",
    "PairSampler",
]

_MASS_EPS = 1e-14


def _clamp_probability(p: float, context: str) -> float:
    if p < -1e-12:
        raise ValidationError(f"negative probability {p!r} in {context}")
    return 0.0 if p < 0.0 else p


@dataclass(frozen=True)
class ThreePointDist:
    """A univariate law on at most three points, tied to a generating (c, lambda).

    Unused support slots are filled by the convention (c - 2 lambda, c,
    c + 2 lambda) and carry probability exactly 0.0; ``region`` records which
    branch of the extremal table produced the law.
    """

    x_minus: float
    x_zero: float
    x_plus: float
    p_minus: float
    p_zero: float
    p_plus: float
    region: str
    c: float
    lam: float

    def __post_init__(self) -> None:
        total = self.p_minus + self.p_zero + self.p_plus
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        if min(self.p_minus, self.p_zero, self.p_plus) < 0.0:
            raise ValidationError("probabilities must be nonnegative")
        slack = 1e-9 * (1.0 + abs(self.c) + self.lam)
        ordered = (
            self.x_minus < self.c - self.lam + slack
            and self.c - self.lam < self.x_zero + slack
            and self.x_zero < self.c + self.lam + slack
            and self.c + self.lam < self.x_plus + slack
        )
        if not ordered:
            raise ValidationError(
                "support must satisfy x- < c - lambda < x0 < c + lambda < x+"
            )

    def mean(self) -> float:
        return math.fsum(
            (self.x_minus * self.p_minus, self.x_zero * self.p_zero, self.x_plus * self.p_plus)
        )

    def variance(self) -> float:
        m = self.mean()
        return math.fsum(
            (
                self.p_minus * (self.x_minus - m) ** 2,
                self.p_zero * (self.x_zero - m) ** 2,
                self.p_plus * (self.x_plus - m) ** 2,
            )
        )

    def support(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """(values, probabilities) with zero-probability fill points dropped."""
        pairs = [
            (x, p)
            for x, p in (
                (self.x_minus, self.p_minus),
                (self.x_zero, self.p_zero),
                (self.x_plus, self.p_plus),
            )
            if p != 0.0
        ]
        return tuple(x for x, _ in pairs), tuple(p for _, p in pairs)


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """An n x n nonnegative matrix with total mass 1; marginals are derived.

    Couplings with zero diagonal carry exact 0.0 entries there, asserted by
    producers rather than the type itself.
    """

    q: np.ndarray

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValidationError(f"q must be a square matrix, got shape {q.shape}")
        if q.shape[0] < 2:
            raise ValidationError("q must be at least 2 x 2")
        if q.min() < -1e-15:
            raise ValidationError(f"negative entry {q.min()!r} in probability matrix")
        q[q < 0.0] = 0.0
        total = float(q.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"total mass {total!r} differs from 1")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def row_marginals(self) -> np.ndarray:
        return self.q.sum(axis=1)

    @property
    def col_marginals(self) -> np.ndarray:
        return self.q.sum(axis=0)

    @property
    def trace(self) -> float:
        return float(np.trace(self.q))

    def is_zero_trace(self) -> bool:
        return bool(np.all(np.diag(self.q) == 0.0))

    def to_json_dict(self) -> dict:
        return {"q": self.q.tolist()}

    @classmethod
    def from_json_dict(cls, data: object) -> "ProbabilityMatrix":
        if not isinstance(data, dict) or "q" not in data:
            raise ValidationError("probability matrix JSON must contain key 'q'")
        return cls(q=np.asarray(data["q"], dtype=float))


@dataclass(frozen=True)
class JointDiscreteDistribution:
    """A finite-support joint law: n-dimensional support vectors with masses."""

    support: tuple[tuple[float, ...], ...]
    prob: tuple[float, ...]

    def __post_init__(self) -> None:
        support = tuple(tuple(float(v) for v in vec) for vec in self.support)
        prob = tuple(float(p) for p in self.prob)
        if len(support) == 0:
            raise ValidationError("support must be non-empty")
        if len(support) != len(prob):
            raise ValidationError("support and prob lengths differ")
        dims = {len(vec) for vec in support}
        if len(dims) != 1:
            raise ValidationError("support vectors must share one dimension")
        if min(prob) < 0.0:
            raise ValidationError("probabilities must be nonnegative")
        total = math.fsum(prob)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        if len(set(support)) != len(support):
            raise ValidationError("duplicate support vectors")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "prob", prob)

    @property
    def dim(self) -> int:
        return len(self.support[0])

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.support, dtype=float), np.asarray(self.prob, dtype=float)

    def to_json_dict(self) -> dict:
        return {"support": [list(vec) for vec in self.support], "prob": list(self.prob)}

    @classmethod
    def from_json_dict(cls, data: object) -> "JointDiscreteDistribution":
        if not isinstance(data, dict) or "support" not in data or "prob" not in data:
            raise ValidationError("joint JSON must contain 'support' and 'prob'")
        return cls(support=tuple(tuple(v) for v in data["support"]), prob=tuple(data["prob"]))


def univariate_extremal(mu: float, sigma: float, c: float, lam: float) -> ThreePointDist:
    """The unique maximizer of E[|X - c - lambda| + |X - c + lambda|] given moments.

    Selected by the same region conditions as the partition bookkeeping; its
    objective value equals lambda * U((mu - c)/lambda, sigma/lambda).
    """
    mu, sigma, c, lam = float(mu), float(sigma), float(c), float(lam)
    if sigma <= 0.0:
        raise ValidationError("sigma must be positive")
    if lam <= 0.0:
        raise ValidationError("lambda must be positive")
    region = _classify_one(mu, sigma, c, lam)
    xi = mu - c
    if region == "I1":
        theta = math.hypot(xi, sigma)
        p_plus = _clamp_probability(0.5 * (1.0 + xi / theta), "I1 marginal")
        p_minus = _clamp_probability(0.5 * (1.0 - xi / theta), "I1 marginal")
        return ThreePointDist(
            x_minus=c - theta, x_zero=c, x_plus=c + theta,
            p_minus=p_minus, p_zero=0.0, p_plus=p_plus,
            region=region, c=c, lam=lam,
        )
    if region == "I2":
        theta2 = xi * xi + sigma * sigma
        denom = 8.0 * lam * lam
        p_minus = _clamp_probability((theta2 - 2.0 * lam * xi) / denom, "I2 marginal")
        p_plus = _clamp_probability((theta2 + 2.0 * lam * xi) / denom, "I2 marginal")
        p_zero = _clamp_probability(1.0 - theta2 / (4.0 * lam * lam), "I2 marginal")
        # Absorb float residue into the largest mass so the law sums to 1.
        p_zero = 1.0 - p_minus - p_plus
        return ThreePointDist(
            x_minus=c - 2.0 * lam, x_zero=c, x_plus=c + 2.0 * lam,
            p_minus=p_minus, p_zero=p_zero, p_plus=p_plus,
            region=region, c=c, lam=lam,
        )
    if region == "I3":
        shifted = xi - lam
        theta = math.hypot(shifted, sigma)
        p_plus = _clamp_probability(0.5 * (1.0 + shifted / theta), "I3 marginal")
        p_zero = 1.0 - p_plus
        return ThreePointDist(
            x_minus=c - 2.0 * lam, x_zero=c + lam - theta, x_plus=c + lam + theta,
            p_minus=0.0, p_zero=p_zero, p_plus=p_plus,
            region=region, c=c, lam=lam,
        )
    shifted = -xi - lam
    theta = math.hypot(shifted, sigma)
    p_minus = _clamp_probability(0.5 * (1.0 + shifted / theta), "I4 marginal")
    p_zero = 1.0 - p_minus
    return ThreePointDist(
        x_minus=c - lam - theta, x_zero=c - lam + theta, x_plus=c + 2.0 * lam,
        p_minus=p_minus, p_zero=p_zero, p_plus=0.0,
        region="I4", c=c, lam=lam,
    )


def extremal_marginals(
    spec: MomentSpec, p: DualPoint
) -> tuple[tuple[ThreePointDist, ...], tuple[float, ...], tuple[float, ...]]:
    """Per-coordinate extremal laws at ``p`` plus the upper/lower mass vectors.

    At the optimal point the masses satisfy sum p_i^+ = sum p_i^- = 1; a
    violation beyond 1e-6 means ``p`` is not the optimum and is rejected.
    """
    dists = tuple(
        univariate_extremal(m, s, p.c, p.lam) for m, s in zip(spec.mu, spec.sigma)
    )
    p_plus = tuple(d.p_plus for d in dists)
    p_minus = tuple(d.p_minus for d in dists)
    err_plus = abs(math.fsum(p_plus) - 1.0)
    err_minus = abs(math.fsum(p_minus) - 1.0)
    if max(err_plus, err_minus) > 1e-6:
        raise ValidationError(
            "upper/lower masses must each sum to 1 at the optimum "
            f"(off by {err_plus:.3e} and {err_minus:.3e}); "
            f"(c={p.c!r}, lambda={p.lam!r}) does not minimize the objective"
        )
    return dists, p_plus, p_minus


def _validate_marginal_vector(v: Sequence[float], name: str) -> list[float]:
    vals = [float(x) for x in v]
    if any(x < -1e-12 for x in vals):
        raise ValidationError(f"{name} has a negative entry")
    vals = [max(x, 0.0) for x in vals]
    total = math.fsum(vals)
    if abs(total - 1.0) > 1e-8:
        raise ValidationError(f"{name} sums to {total!r}, not 1")
    return vals


def _coupling_by_greedy(p: list[float], q: list[float]) -> np.ndarray:
    """Largest-remaining-sum greedy with a capped transfer, stall-free.

    Serving the index with the largest p_l + q_l first and capping every
    transfer so that max_l (p_l + q_l) never exceeds the remaining total mass
    keeps the feasibility condition invariant; when some index reaches
    equality the remaining matrix is forced entirely into its row and column,
    which also reproduces the unique solution of the equality case.  Each
    pass zeroes a marginal entry or triggers the forced branch, so the loop
    ends within about 2n steps.
    """
    n = len(p)
    out = np.zeros((n, n), dtype=float)
    pt = list(p)
    qt = list(q)
    for _ in range(4 * n + 8):
        m = math.fsum(pt)
        if m <= _MASS_EPS:
            break
        sums = [pt[l] + qt[l] for l in range(n)]
        k = max(range(n), key=sums.__getitem__)
        if sums[k] >= m - _MASS_EPS:
            for i in range(n):
                if i != k and pt[i] > 0.0:
                    out[i, k] += pt[i]
                    pt[i] = 0.0
            for j in range(n):
                if j != k and qt[j] > 0.0:
                    out[k, j] += qt[j]
                    qt[j] = 0.0
            pt[k] = qt[k] = 0.0
            break
        if pt[k] >= qt[k]:
            row = k
            col = max((j for j in range(n) if j != k), key=qt.__getitem__)
        else:
            col = k
            row = max((i for i in range(n) if i != k), key=pt.__getitem__)
        others = [sums[l] for l in range(n) if l != row and l != col]
        cap = m - max(others, default=0.0)
        delta = min(pt[row], qt[col], cap)
        out[row, col] += delta
        pt[row] -= delta
        qt[col] -= delta
    return out


def _coupling_by_swaps(p: list[float], q: list[float]) -> np.ndarray:
    """Fallback: start at the product coupling and swap mass off the diagonal.

    For a diagonal cell (i, i), feasibility guarantees mass somewhere outside
    row i and column i; a 2 x 2 swap with an off-diagonal cell (or a paired
    swap with another diagonal cell) moves min of the two masses while
    preserving both marginals.  Once the trace is negligible the diagonal is
    zeroed and the matrix renormalized.
    """
    n = len(p)
    out = np.outer(np.asarray(p), np.asarray(q))
    for _ in range(10 * n * n + 10):
        diag = np.diag(out)
        i = int(np.argmax(diag))
        if diag[i] <= _MASS_EPS:
            break
        masked = out.copy()
        masked[i, :] = 0.0
        masked[:, i] = 0.0
        j, k = np.unravel_index(int(np.argmax(masked)), masked.shape)
        if masked[j, k] <= 0.0:
            raise InfeasibleCouplingError(
                "no mass available outside the diagonal cell's row and column"
            )
        if j != k:
            eps = min(out[i, i], out[j, k])
            out[i, i] -= eps
            out[j, k] -= eps
            out[i, k] += eps
            out[j, i] += eps
        else:
            eps = min(out[i, i], out[j, j])
            out[i, i] -= eps
            out[j, j] -= eps
            out[i, j] += eps
            out[j, i] += eps
    np.fill_diagonal(out, 0.0)
    total = out.sum()
    if total <= 0.0:
        raise InfeasibleCouplingError("coupling collapsed to zero mass")
    out /= total
    return out


def _check_coupling(
    matrix: np.ndarray, p: Sequence[float], q: Sequence[float], tol: float = 1e-12
) -> bool:
    if matrix.min() < 0.0:
        return False
    if np.any(np.diag(matrix) != 0.0):
        return False
    if np.max(np.abs(matrix.sum(axis=1) - np.asarray(p))) > tol:
        return False
    if np.max(np.abs(matrix.sum(axis=0) - np.asarray(q))) > tol:
        return False
    return True


def zero_trace_coupling(p: Sequence[float], q: Sequence[float]) -> ProbabilityMatrix:
    """A probability matrix with marginals (p, q) and exactly zero diagonal.

    Exists if and only if max_i (p_i + q_i) <= 1.  At equality for index k
    the solution is unique: column k carries p_i (i != k) and row k carries
    q_j (j != k).  Away from equality the greedy construction is used and
    post-verified, with a product-coupling swap procedure as fallback.
    """
    pv = _validate_marginal_vector(p, "p")
    qv = _validate_marginal_vector(q, "q")
    if len(pv) != len(qv):
        raise ValidationError("p and q must have equal length")
    if len(pv) < 2:
        raise ValidationError("need at least two indices")
    worst = max(pi + qi for pi, qi in zip(pv, qv))
    if worst > 1.0 + 1e-12:
        k = max(range(len(pv)), key=lambda i: pv[i] + qv[i])
        raise InfeasibleCouplingError(
            "no zero-diagonal coupling exists: requires max_i (p_i + q_i) <= 1 "
            f"but index {k} has p+q = {worst!r}"
        )
    matrix = _coupling_by_greedy(pv, qv)
    if not _check_coupling(matrix, pv, qv):
        matrix = _coupling_by_swaps(pv, qv)
        if not _check_coupling(matrix, pv, qv, tol=1e-9):
            raise InfeasibleCouplingError(
                "both coupling constructions failed the marginal check"
            )
    return ProbabilityMatrix(q=matrix)


def perturb_coupling(m: ProbabilityMatrix) -> ProbabilityMatrix | None:
    """A different zero-diagonal coupling with the same marginals, or None.

    Searches for a cycle of cells, alternating between mass-receiving cells
    (any off-diagonal position) and mass-giving cells (positive entries),
    that touches each row and column at most once; shifting the minimal
    giving mass around such a cycle preserves both marginals.  The search is
    exhaustive, so ``None`` certifies the coupling is the only one.
    """
    if not isinstance(m, ProbabilityMatrix):
        raise ValidationError("perturb_coupling expects a ProbabilityMatrix")
    if not m.is_zero_trace():
        raise ValidationError("input matrix must have an exactly zero diagonal")
    q = m.q
    n = m.n

    # Cycle state: rows/cols visited, and the cell path alternating
    # plus (receive) and minus (give) cells.  A cycle closes when a giving
    # step returns to the start row after at least two receiving cells.
    def search(start_row: int) -> list[tuple[str, int, int]] | None:
        path: list[tuple[str, int, int]] = []
        used_rows = {start_row}
        used_cols: set[int] = set()

        def from_row(i: int) -> list[tuple[str, int, int]] | None:
            for j in range(n):
                if j == i or j in used_cols:
                    continue
                used_cols.add(j)
                path.append(("plus", i, j))
                found = from_col(j)
                if found is not None:
                    return found
                path.pop()
                used_cols.remove(j)
            return None

        def from_col(j: int) -> list[tuple[str, int, int]] | None:
            for i in range(n):
                if i == j or q[i, j] <= 0.0:
                    continue
                if i == start_row:
                    if len(path) >= 3:
                        return path + [("minus", i, j)]
                    continue
                if i in used_rows:
                    continue
                used_rows.add(i)
                path.append(("minus", i, j))
                found = from_row(i)
                if found is not None:
                    return found
                path.pop()
                used_rows.remove(i)
            return None

        return from_row(start_row)

    for start in range(n):
        cycle = search(start)
        if cycle is None:
            continue
        eps = min(q[i, j] for kind, i, j in cycle if kind == "minus")
        out = np.array(q)
        for kind, i, j in cycle:
            if kind == "plus":
                out[i, j] += eps
            else:
                out[i, j] -= eps
        out[np.abs(out) < 1e-16] = 0.0
        candidate = ProbabilityMatrix(q=out)
        if _check_coupling(out, m.row_marginals, m.col_marginals, tol=1e-12):
            return candidate
    return None


class ExtremalComponents(NamedTuple):
    """Everything produced on the way to an extremal joint distribution."""

    report: BoundReport
    marginals: tuple[ThreePointDist, ...]
    p_plus: tuple[float, ...]
    p_minus: tuple[float, ...]
    coupling: ProbabilityMatrix
    joint: JointDiscreteDistribution


def _joint_from_coupling(
    marginals: Sequence[ThreePointDist], coupling: ProbabilityMatrix
) -> JointDiscreteDistribution:
    n = len(marginals)
    support: list[tuple[float, ...]] = []
    prob: list[float] = []
    q = coupling.q
    for i in range(n):
        for j in range(n):
            if q[i, j] <= 0.0:
                continue
            vec = [d.x_zero for d in marginals]
            vec[i] = marginals[i].x_plus
            vec[j] = marginals[j].x_minus
            support.append(tuple(vec))
            prob.append(float(q[i, j]))
    return JointDiscreteDistribution(support=tuple(support), prob=tuple(prob))


def extremal_components(spec: MomentSpec, tol: float = 1e-10) -> ExtremalComponents:
    """Bound, marginals, coupling, and joint for ``spec`` in one pass.

    Works for n = 2 as well: there the same marginal table yields two
    two-point laws and the coupling is the unique anti-diagonal matrix.
    """
    report = rho_bound(spec, tol)
    marginals, p_plus, p_minus = extremal_marginals(spec, report.optimum)
    coupling = zero_trace_coupling(p_plus, p_minus)
    joint = _joint_from_coupling(marginals, coupling)
    return ExtremalComponents(report, marginals, p_plus, p_minus, coupling, joint)


def build_extremal_joint(spec: MomentSpec, tol: float = 1e-10) -> JointDiscreteDistribution:
    """A joint law with the prescribed moments whose expected range is rho_n."""
    return extremal_components(spec, tol).joint


def ag_tightness(
    spec: MomentSpec,
) -> tuple[bool, bool | None, JointDiscreteDistribution | None]:
    """Decide whether rho_n equals the closed-form bound, and build a witness.

    The bound sqrt(2 S), S = sum_i [(mu_i - mu_bar)**2 + sigma_i**2], is
    attained exactly when, for every i,

        (i)  |mu_i - mu_bar| <= sqrt(2) theta_i**2 / sqrt(S),
        (ii) theta_i**2 <= S / 2,

    with theta_i**2 = (mu_i - mu_bar)**2 + sigma_i**2.  When tight, the
    attaining joint takes values mu_bar +/- AG/2 at one coordinate each and
    mu_bar elsewhere.  ``unique`` is True when some (ii) holds with equality
    (the coupling is then forced); with all inequalities strict, uniqueness
    is undecidable from the conditions alone and is reported as None.
    """
    mu, sigma = spec.mu, spec.sigma
    mb = spec.mu_bar
    d = [m - mb for m in mu]
    theta2 = [di * di + s * s for di, s in zip(d, sigma)]
    s_total = math.fsum(theta2)
    ag = math.sqrt(2.0 * s_total)
    slack = 1e-12 * s_total
    cond_i = all(0.5 * abs(di) * ag <= t2 + slack for di, t2 in zip(d, theta2))
    cond_ii = all(t2 <= 0.5 * s_total + slack for t2 in theta2)
    if not (cond_i and cond_ii):
        return False, None, None
    p_plus = [
        _clamp_probability((t2 + 0.5 * di * ag) / s_total, "tightness marginal")
        for di, t2 in zip(d, theta2)
    ]
    p_minus = [
        _clamp_probability((t2 - 0.5 * di * ag) / s_total, "tightness marginal")
        for di, t2 in zip(d, theta2)
    ]
    unique: bool | None = (
        True if max(pp + pm for pp, pm in zip(p_plus, p_minus)) >= 1.0 - 1e-12 else None
    )
    coupling = zero_trace_coupling(p_plus, p_minus)
    half = 0.5 * ag
    support: list[tuple[float, ...]] = []
    prob: list[float] = []
    q = coupling.q
    for i in range(spec.n):
        for j in range(spec.n):
            if q[i, j] <= 0.0:
                continue
            vec = [mb] * spec.n
            vec[i] = mb + half
            vec[j] = mb - half
            support.append(tuple(vec))
            prob.append(float(q[i, j]))
    joint = JointDiscreteDistribution(support=tuple(support), prob=tuple(prob))
    return True, unique, joint


def bnt_extremal_max(spec: MomentSpec) -> JointDiscreteDistribution:
    """The n-outcome law attaining the expected-maximum bound.

    Outcome j lifts coordinate j to y0 + alpha_j and drops every other
    coordinate i to y0 - alpha_i, with probability (1 - (y0 - mu_j)/alpha_j)/2.
    """
    _, y0 = bnt_max_bound(spec)
    alpha = [math.hypot(m - y0, s) for m, s in zip(spec.mu, spec.sigma)]
    probs = [
        _clamp_probability(0.5 * (1.0 - (y0 - m) / a), "max-attaining law")
        for m, a in zip(spec.mu, alpha)
    ]
    support: list[tuple[float, ...]] = []
    prob: list[float] = []
    base = [y0 - a for a in alpha]
    for j, pj in enumerate(probs):
        if pj <= 0.0:
            continue
        vec = list(base)
        vec[j] = y0 + alpha[j]
        support.append(tuple(vec))
        prob.append(pj)
    return JointDiscreteDistribution(support=tuple(support), prob=tuple(prob))


@dataclass
class PairSampler:
    """Sampler for a correlated pair whose coordinate gap is constant.

    With delta = sigma1**2 + sigma2**2 - 2 rho sigma1 sigma2 > 0 the pair is
    a sign variable S = +/-1 (probability of +1 chosen to fix the means)
    mixed with an independent two-point variable T:

        X1 = [gamma2 (sigma1**2 - rho sigma1 sigma2) S + T] / delta,
        X2 = [gamma2 (rho sigma1 sigma2 - sigma2**2) S + T] / delta,

    so that X1 - X2 = gamma2 * S almost surely while means, variances, and
    correlation all match.  delta = 0 (equal sigmas, rho = 1) degenerates to
    a common shift: X = (mu1 + T, mu2 + T).

    Instances carry a private seeded stream; ``sample(k)`` advances it, while
    ``sample(k, seed=...)`` uses a fresh stream and leaves the instance
    untouched (the reproducible pattern for concurrent use).
    """

    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    rho: float
    seed: int = 0
    _rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.sigma1 <= 0.0 or self.sigma2 <= 0.0:
            raise ValidationError("sigmas must be positive")
        if abs(self.rho) > 1.0:
            raise ValidationError("correlation must lie in [-1, 1]")
        self.gamma2 = gamma2_bound(self.mu1, self.mu2, self.sigma1, self.sigma2, self.rho)
        self.delta = (
            self.sigma1**2 + self.sigma2**2 - 2.0 * self.rho * self.sigma1 * self.sigma2
        )
        if self.delta > 0.0:
            self.p_plus = 0.5 * (1.0 + (self.mu1 - self.mu2) / self.gamma2)
            cross = self.rho * self.sigma1 * self.sigma2
            self.coef1 = self.gamma2 * (self.sigma1**2 - cross)
            self.coef2 = self.gamma2 * (cross - self.sigma2**2)
            self.t_mean = (
                self.mu1 * self.sigma2**2
                + self.mu2 * self.sigma1**2
                - cross * (self.mu1 + self.mu2)
            )
            t_var = self.delta * (self.sigma1 * self.sigma2) ** 2 * (1.0 - self.rho**2)
            self.t_std = math.sqrt(max(t_var, 0.0))
        self._rng = np.random.default_rng(self.seed)

    def sample(self, n_samples: int, seed: int | None = None) -> np.ndarray:
        """An (n_samples, 2) array of draws."""
        n_samples = int(n_samples)
        if n_samples < 1:
            raise ValidationError("n_samples must be at least 1")
        rng = self._rng if seed is None else np.random.default_rng(seed)
        if self.delta == 0.0:
            t = np.where(rng.random(n_samples) < 0.5, -self.sigma1, self.sigma1)
            return np.column_stack((self.mu1 + t, self.mu2 + t))
        sign = np.where(rng.random(n_samples) < self.p_plus, 1.0, -1.0)
        t = np.where(
            rng.random(n_samples) < 0.5,
            self.t_mean - self.t_std,
            self.t_mean + self.t_std,
        )
        x1 = (self.coef1 * sign + t) / self.delta
        x2 = (self.coef2 * sign + t) / self.delta
        return np.column_stack((x1, x2))

    def as_joint(self) -> JointDiscreteDistribution:
        """The same law as an explicit finite-support object (2-4 atoms)."""
        atoms: dict[tuple[float, float], float] = {}

        def add(x1: float, x2: float, p: float) -> None:
            if p <= 0.0:
                return
            key = (float(x1), float(x2))
            atoms[key] = atoms.get(key, 0.0) + p

        if self.delta == 0.0:
            add(self.mu1 + self.sigma1, self.mu2 + self.sigma1, 0.5)
            add(self.mu1 - self.sigma1, self.mu2 - self.sigma1, 0.5)
        else:
            for sign, ps in ((1.0, self.p_plus), (-1.0, 1.0 - self.p_plus)):
                for t in (self.t_mean - self.t_std, self.t_mean + self.t_std):
                    add(
                        (self.coef1 * sign + t) / self.delta,
                        (self.coef2 * sign + t) / self.delta,
                        0.5 * ps,
                    )
        support = tuple(atoms.keys())
        prob = tuple(atoms[k] for k in support)
        return JointDiscreteDistribution(support=support, prob=prob)


def extremal_pair_given_correlation(
    mu1: float,
    mu2: float,
    sigma1: float,
    sigma2: float,
    rho: float,
    seed: int = 0,
) -> PairSampler:
    """Sampler for the pair attaining the correlation-aware gap bound."""
    return PairSampler(
        mu1=float(mu1),
        mu2=float(mu2),
        sigma1=float(sigma1),
        sigma2=float(sigma2),
        rho=float(rho),
        seed=int(seed),
    )
