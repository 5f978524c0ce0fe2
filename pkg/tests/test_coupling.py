import math

import numpy as np
import pytest

from rangebounds import (
    InfeasibleCouplingError,
    JointDiscreteDistribution,
    MomentSpec,
    ProbabilityMatrix,
    ValidationError,
    extremal_components,
    perturb_coupling,
    zero_trace_coupling,
)


def feasible_marginals(rng, n):
    """Random probability vectors with max_i (p_i + q_i) strictly below 1."""
    while True:
        p = rng.dirichlet(np.ones(n))
        q = rng.dirichlet(np.ones(n))
        if np.max(p + q) <= 0.95:
            return p.tolist(), q.tolist()


class TestProbabilityMatrix:
    def test_rejects_non_square(self):
        with pytest.raises(ValidationError):
            ProbabilityMatrix(q=np.ones((2, 3)) / 6.0)

    def test_rejects_negative_entries(self):
        q = np.array([[0.0, 0.6], [0.5, -0.1]])
        with pytest.raises(ValidationError):
            ProbabilityMatrix(q=q)

    def test_rejects_mass_away_from_one(self):
        with pytest.raises(ValidationError):
            ProbabilityMatrix(q=np.array([[0.0, 0.3], [0.3, 0.0]]))

    def test_entries_read_only(self):
        matrix = ProbabilityMatrix(q=np.array([[0.0, 0.5], [0.5, 0.0]]))
        with pytest.raises(ValueError):
            matrix.q[0, 0] = 1.0

    def test_trace_helpers(self):
        off = ProbabilityMatrix(q=np.array([[0.0, 0.5], [0.5, 0.0]]))
        assert off.is_zero_trace()
        assert off.trace == 0.0
        mixed = ProbabilityMatrix(q=np.array([[0.25, 0.25], [0.25, 0.25]]))
        assert not mixed.is_zero_trace()

    def test_json_round_trip(self):
        matrix = ProbabilityMatrix(q=np.array([[0.0, 0.5], [0.5, 0.0]]))
        again = ProbabilityMatrix.from_json_dict(matrix.to_json_dict())
        np.testing.assert_array_equal(again.q, matrix.q)


class TestJointDiscreteDistribution:
    def test_rejects_empty_support(self):
        with pytest.raises(ValidationError):
            JointDiscreteDistribution(support=(), prob=())

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValidationError):
            JointDiscreteDistribution(support=((0.0, 1.0),), prob=(0.5, 0.5))

    def test_rejects_mixed_dimensions(self):
        with pytest.raises(ValidationError):
            JointDiscreteDistribution(
                support=((0.0, 1.0), (0.0, 1.0, 2.0)), prob=(0.5, 0.5)
            )

    def test_rejects_duplicate_support_vectors(self):
        with pytest.raises(ValidationError):
            JointDiscreteDistribution(
                support=((0.0, 1.0), (0.0, 1.0)), prob=(0.5, 0.5)
            )

    def test_rejects_unnormalized_mass(self):
        with pytest.raises(ValidationError):
            JointDiscreteDistribution(support=((0.0, 1.0),), prob=(0.7,))

    def test_json_round_trip(self):
        joint = JointDiscreteDistribution(
            support=((0.0, 1.0), (1.0, 0.0)), prob=(0.25, 0.75)
        )
        again = JointDiscreteDistribution.from_json_dict(joint.to_json_dict())
        assert again == joint


class TestZeroTraceCoupling:
    def test_reproduces_marginals_with_zero_diagonal(self):
        rng = np.random.default_rng(40)
        for n in range(3, 9):
            for _ in range(12):
                p, q = feasible_marginals(rng, n)
                matrix = zero_trace_coupling(p, q)
                assert matrix.is_zero_trace()
                assert float(matrix.q.min()) >= 0.0
                np.testing.assert_allclose(matrix.row_marginals, p, atol=1e-12)
                np.testing.assert_allclose(matrix.col_marginals, q, atol=1e-12)

    def test_uniform_marginals_admit_derangement(self):
        matrix = zero_trace_coupling([1 / 3] * 3, [1 / 3] * 3)
        assert matrix.is_zero_trace()
        np.testing.assert_allclose(matrix.row_marginals, [1 / 3] * 3, atol=1e-12)
        np.testing.assert_allclose(matrix.col_marginals, [1 / 3] * 3, atol=1e-12)

    def test_forced_triple_matches_published_matrix(self):
        p = [0.0, 3.0 / 8.0, 5.0 / 8.0]
        q = [1.0 / 2.0, 3.0 / 8.0, 1.0 / 8.0]
        matrix = zero_trace_coupling(p, q)
        expected = np.array(
            [
                [0.0, 0.0, 0.0],
                [0.25, 0.0, 0.125],
                [0.25, 0.375, 0.0],
            ]
        )
        np.testing.assert_allclose(matrix.q, expected, atol=1e-12)

    def test_equality_case_fully_determined(self):
        """When p_k + q_k = 1, every other row is forced into column k and
        row k fills the remaining columns."""
        p = [0.5, 0.3, 0.2]
        q = [0.5, 0.25, 0.25]
        matrix = zero_trace_coupling(p, q)
        expected = np.array(
            [
                [0.0, 0.25, 0.25],
                [0.3, 0.0, 0.0],
                [0.2, 0.0, 0.0],
            ]
        )
        np.testing.assert_allclose(matrix.q, expected, atol=1e-12)
        assert perturb_coupling(matrix) is None

    def test_pair_anti_diagonal(self):
        matrix = zero_trace_coupling([0.3, 0.7], [0.7, 0.3])
        np.testing.assert_allclose(
            matrix.q, np.array([[0.0, 0.3], [0.7, 0.0]]), atol=1e-12
        )

    def test_zero_mass_indices_allowed(self):
        matrix = zero_trace_coupling([0.0, 0.5, 0.5], [0.5, 0.25, 0.25])
        assert matrix.is_zero_trace()
        np.testing.assert_allclose(matrix.row_marginals, [0.0, 0.5, 0.5], atol=1e-12)

    def test_infeasible_marginals_raise_with_witness_index(self):
        with pytest.raises(InfeasibleCouplingError, match="index 0"):
            zero_trace_coupling([0.6, 0.4], [0.6, 0.4])

    def test_rejects_invalid_vectors(self):
        with pytest.raises(ValidationError):
            zero_trace_coupling([0.5, 0.6], [0.5, 0.5])
        with pytest.raises(ValidationError):
            zero_trace_coupling([-0.1, 1.1], [0.5, 0.5])
        with pytest.raises(ValidationError):
            zero_trace_coupling([0.5, 0.5], [1.0])

    def test_deterministic(self):
        rng = np.random.default_rng(41)
        p, q = feasible_marginals(rng, 5)
        np.testing.assert_array_equal(
            zero_trace_coupling(p, q).q, zero_trace_coupling(p, q).q
        )


class TestPerturbCoupling:
    def test_cyclic_coupling_is_not_unique(self):
        q = np.zeros((3, 3))
        q[0, 1] = q[1, 2] = q[2, 0] = 1.0 / 3.0
        matrix = ProbabilityMatrix(q=q)
        other = perturb_coupling(matrix)
        assert other is not None
        assert not np.array_equal(other.q, matrix.q)
        assert other.is_zero_trace()
        np.testing.assert_allclose(
            other.q.sum(axis=1), matrix.q.sum(axis=1), atol=1e-12
        )
        np.testing.assert_allclose(
            other.q.sum(axis=0), matrix.q.sum(axis=0), atol=1e-12
        )

    def test_forced_triple_certified_unique(self):
        q = np.array(
            [
                [0.0, 0.0, 0.0],
                [0.25, 0.0, 0.125],
                [0.25, 0.375, 0.0],
            ]
        )
        assert perturb_coupling(ProbabilityMatrix(q=q)) is None

    def test_pair_coupling_certified_unique(self):
        matrix = ProbabilityMatrix(q=np.array([[0.0, 0.3], [0.7, 0.0]]))
        assert perturb_coupling(matrix) is None

    def test_single_two_sided_coordinate_forces_uniqueness(self):
        """With exactly one coordinate carrying both tails, the coupling's
        support sits in one row plus one column, which admits no
        rebalancing cycle."""
        spec = MomentSpec(mu=(0.0, 0.0, 0.0), sigma=(1.0, 1.0, 3.0))
        parts = extremal_components(spec)
        assert list(parts.report.regions.i1) == [2]
        assert perturb_coupling(parts.coupling) is None

    def test_rejects_nonzero_trace(self):
        matrix = ProbabilityMatrix(q=np.array([[0.25, 0.25], [0.25, 0.25]]))
        with pytest.raises(ValidationError):
            perturb_coupling(matrix)
