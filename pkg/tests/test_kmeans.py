import pytest

from quantkmeans.coordination import Agreed, DISAGREED, EMPTY
from quantkmeans.exactmath import FractionVector
from quantkmeans.kmeans import (CentroidSet, assign_cluster, finalize_round,
                                init_round, parse_centroids,
                                parse_observations, refinement_value,
                                serialize_centroids, serialize_observations)


def fv(*nums, den=1):
    return FractionVector(tuple(nums), den)


class TestAssign:
    def test_nearest_centroid(self):
        assert assign_cluster((0, 0), [fv(1, 0), fv(0, 2)]) == 0

    def test_tie_goes_to_smallest_index(self):
        assert assign_cluster((0, 0), [fv(1, 0), fv(0, 1)]) == 0

    def test_exact_fraction_distances(self):
        # distances 1/4 vs 1
        assert assign_cluster((3,), [fv(7, den=2), fv(2)]) == 0

    def test_high_tie_break_flips_only_ties(self):
        assert assign_cluster((0, 0), [fv(1, 0), fv(0, 1)], tie_break="high") == 1
        assert assign_cluster((0, 0), [fv(1, 0), fv(0, 2)], tie_break="high") == 0

    def test_accepts_centroid_set(self):
        cs = CentroidSet([fv(1, 0), fv(0, 2)])
        assert assign_cluster((0, 0), cs) == 0


class TestInitRound:
    def test_member_label_gets_the_observation(self):
        masses = init_round((5,), 1, 3)
        assert masses == [((0,), 0), ((5,), 1), ((0,), 0)]

    def test_single_cluster(self):
        assert init_round((1, 2), 0, 1) == [((1, 2), 1)]

    def test_exactly_one_unit_counter(self):
        for lam in range(3):
            masses = init_round((4, 4), lam, 3)
            assert sum(z for _, z in masses) == 1

    def test_rejects_out_of_range_label(self):
        with pytest.raises(ValueError):
            init_round((5,), 3, 3)


class TestRefinement:
    def test_scalar_mean(self):
        value = refinement_value([(2,), (4,), (6,)])
        assert value.nums == (12,) and value.den == 3
        assert value == fv(4)

    def test_vector_mean(self):
        assert refinement_value([(1, 2), (3, 4), (5, 6)]) == fv(3, 4)

    def test_singleton(self):
        assert refinement_value([(7,)]) == fv(7)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            refinement_value([])


class TestFinalize:
    def test_unchanged_centroids_terminate(self):
        previous = CentroidSet([fv(3, 4), fv(1, 1)], 4)
        outcomes = (Agreed(fv(3, 4)), Agreed(fv(1, 1)))
        updated, done = finalize_round(outcomes, previous)
        assert done
        assert updated.round_index == 5

    def test_changed_centroid_continues(self):
        previous = CentroidSet([fv(3, 4)], 0)
        updated, done = finalize_round((Agreed(fv(7, 8, den=2)),), previous)
        assert not done
        assert updated.centroids[0] == fv(7, 8, den=2)

    def test_empty_cluster_carries_previous(self):
        previous = CentroidSet([fv(1), fv(9, 9)], 2)
        updated, done = finalize_round((Agreed(fv(1)), EMPTY), previous)
        assert updated.centroids[1] == fv(9, 9)
        assert done

    def test_disagreed_is_a_protocol_violation(self):
        with pytest.raises(RuntimeError):
            finalize_round((DISAGREED,), CentroidSet([fv(0)]))

    def test_value_based_termination(self):
        previous = CentroidSet([fv(4)], 1)
        updated, done = finalize_round((Agreed(fv(12, den=3)),), previous)
        assert done


class TestFiles:
    def test_observation_round_trip(self):
        rows = [(1, -2), (3, 4), (0, 0)]
        assert parse_observations(serialize_observations(rows)) == rows

    def test_observation_errors(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_observations("1 2\n3.5 1\n")
        with pytest.raises(ValueError, match="line 2"):
            parse_observations("1 2\n3\n")

    def test_centroid_parse_mixed_tokens(self):
        rows = parse_centroids("1/2 3\n-4 5/5\n")
        assert rows[0] == fv(1, 6, den=2)
        assert rows[1] == fv(-4, 1)

    def test_centroid_round_trip(self):
        rows = [fv(1, 6, den=2), fv(-4, 1)]
        again = parse_centroids(serialize_centroids(rows))
        assert all(a == b for a, b in zip(rows, again))

    def test_centroid_errors(self):
        with pytest.raises(ValueError, match="line 1"):
            parse_centroids("x y\n")
