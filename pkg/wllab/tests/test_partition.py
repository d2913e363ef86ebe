"""
Tests for wllab.partition module
"""

import numpy as np
import pytest

from wllab.exceptions import CapExceededError, NotRainbowError, ShapeMismatchError, ValidationError
from wllab.generators import named
from wllab.partition import (
    Comparison, Graph, LabelledPartition, atomic_types, canonicalize, compare, concat,
    discrete_partition, distinct_index_vectors, flatten, from_function, index_tuple, index_vectors,
    is_consistent, is_graph_like, is_invariant, project, project_partition, rainbow_report, reshape,
    substitute, tuple_index, unit_partition,
)
from wllab.refine import OperatorSpec, fixed_point


def _random_partition(rng, n, k, colours=4):
    return LabelledPartition(n, k, rng.integers(0, colours, size=n ** k))


def _coarsen(rng, g):
    """Merge classes of g through a random map on its colour ids"""
    merge = rng.integers(0, max(1, g.class_count - 1), size=g.class_count)
    return LabelledPartition(g.n, g.arity, merge[g.colours])


class TestTupleArithmetic:
    """Test substitution, projection and concatenation"""

    def test_substitute_single_position(self):
        """Test replacing one entry"""
        assert substitute((1, 2, 3), (2,), (9,)) == (1, 9, 3)

    def test_substitute_two_positions(self):
        assert substitute((1, 2, 3), (1, 3), (7, 8)) == (7, 2, 8)

    def test_substitute_full_replacement(self):
        assert substitute((1, 2, 3), (1, 2, 3), (4, 5, 6)) == (4, 5, 6)

    def test_substitute_rejects_repeated_positions(self):
        """Test that distinct index vectors must not repeat"""
        with pytest.raises(ValidationError):
            substitute((1, 2, 3), (1, 1), (4, 5))

    def test_substitute_rejects_length_mismatch(self):
        with pytest.raises(ValidationError):
            substitute((1, 2, 3), (1, 2), (4,))

    def test_project(self):
        """Test projections, repeats allowed"""
        v = (10, 20, 30)
        assert project(v, (2, 1)) == (20, 10)
        assert project(v, (1, 1)) == (10, 10)
        assert project(v, (1, 2, 3)) == v

    def test_project_out_of_range(self):
        with pytest.raises(ValidationError):
            project((10, 20), (3,))

    def test_concat(self):
        assert concat((0,), (1,)) == (0, 1)
        assert concat((0, 1), (2,)) == (0, 1, 2)

    def test_empty_tuples_rejected(self):
        """Tuples of arity 0 are not supported"""
        with pytest.raises(ValidationError):
            concat((), (0, 1))

    def test_tuple_index_roundtrip(self):
        assert tuple_index((1, 0, 2), 3) == 11
        assert index_tuple(11, 3, 3) == (1, 0, 2)

    @pytest.mark.parametrize("seed", range(5))
    def test_substitute_project_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(50):
            k = int(rng.integers(1, 6))
            r = int(rng.integers(1, k + 1))
            v = tuple(int(x) for x in rng.integers(0, 6, size=k))
            idx = tuple(int(i) + 1 for i in rng.permutation(k)[:r])
            u = tuple(int(x) for x in rng.integers(0, 6, size=r))

            assert substitute(v, idx, project(v, idx)) == v
            assert project(substitute(v, idx, u), idx) == u


class TestLabelledPartition:
    """Test the dense partition type"""

    def test_canonical_relabelling(self):
        """Colours are relabelled by first occurrence"""
        g = LabelledPartition(3, 1, np.array([7, 7, 3]))

        assert g.colours.tolist() == [0, 0, 1]
        assert g.class_count == 2

    def test_canonicalize_is_idempotent(self):
        g = LabelledPartition(2, 2, np.array([5, 1, 1, 5]))
        again = canonicalize(g)

        assert again == g
        assert compare(g, again) == Comparison.EQUIVALENT

    def test_shape_mismatch(self):
        """Colour array must cover V^k"""
        with pytest.raises(ShapeMismatchError):
            LabelledPartition(3, 2, np.zeros(8, dtype=np.int64))

    def test_classes_and_sizes(self):
        g = from_function(3, 2, lambda v: v[0] == v[1])

        assert g.class_sizes() == [3, 6]
        assert g.classes()[0] == [(0, 0), (1, 1), (2, 2)]
        assert g.colour_of((2, 1)) == 1

    def test_tuple_cap(self):
        with pytest.raises(CapExceededError):
            discrete_partition(10, 3, cap=100)


class TestCompare:
    """Test the refinement preorder"""

    def test_equal_partitions(self, path3):
        assert compare(path3, path3) == Comparison.EQUIVALENT

    def test_discrete_refines_everything(self, path3):
        """A discrete partition is finer than the atomic types"""
        alpha = atomic_types(path3, 2)
        assert compare(alpha, discrete_partition(3, 2)) == Comparison.FINER_RIGHT
        assert compare(discrete_partition(3, 2), alpha) == Comparison.FINER_LEFT

    def test_incomparable(self):
        """Evens/odds against halves on four points"""
        parity = LabelledPartition(4, 1, np.array([0, 1, 0, 1]))
        halves = LabelledPartition(4, 1, np.array([0, 0, 1, 1]))

        assert compare(parity, halves) == Comparison.INCOMPARABLE

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            compare(unit_partition(3, 1), unit_partition(3, 2))

    @pytest.mark.parametrize("seed", range(10))
    def test_reflexive_and_antisymmetric(self, seed):
        rng = np.random.default_rng(seed)
        a = _random_partition(rng, 4, 2)
        b = _random_partition(rng, 4, 2)
        swapped = {
            Comparison.EQUIVALENT: Comparison.EQUIVALENT,
            Comparison.FINER_LEFT: Comparison.FINER_RIGHT,
            Comparison.FINER_RIGHT: Comparison.FINER_LEFT,
            Comparison.INCOMPARABLE: Comparison.INCOMPARABLE,
        }

        assert compare(a, a) == Comparison.EQUIVALENT
        assert compare(b, a) == swapped[compare(a, b)]
        # canonical ids make equivalent partitions equal
        assert (compare(a, b) == Comparison.EQUIVALENT) == (a == b)

    @pytest.mark.parametrize("seed", range(10))
    def test_relabelling_is_equivalent(self, seed):
        rng = np.random.default_rng(seed)
        a = _random_partition(rng, 3, 3)
        relabelled = LabelledPartition(3, 3, rng.permutation(100)[a.colours] + 7)

        assert compare(a, relabelled) == Comparison.EQUIVALENT
        assert canonicalize(relabelled) == a

    @pytest.mark.parametrize("seed", range(10))
    def test_transitive_along_coarsenings(self, seed):
        rng = np.random.default_rng(seed)
        fine = _random_partition(rng, 4, 2, colours=8)
        middle = _coarsen(rng, fine)
        coarse = _coarsen(rng, middle)
        finer = (Comparison.FINER_LEFT, Comparison.EQUIVALENT)

        assert compare(fine, middle) in finer
        assert compare(middle, coarse) in finer
        assert compare(fine, coarse) in finer

    def test_transitive_on_random_triples(self):
        rng = np.random.default_rng(3)
        pool = [_random_partition(rng, 3, 2, colours=int(c)) for c in rng.integers(1, 6, size=12)]
        pool += [_coarsen(rng, p) for p in pool]
        finer = (Comparison.FINER_LEFT, Comparison.EQUIVALENT)
        for a in pool:
            for b in pool:
                if compare(a, b) not in finer:
                    continue
                for c in pool:
                    if compare(b, c) in finer:
                        assert compare(a, c) in finer


class TestAtomicTypes:
    """Test atomic types of k-tuples"""

    def test_path_arcs(self, path3):
        """P_3 at k = 2 has loops, edge arcs and non-edge arcs"""
        assert atomic_types(path3, 2).class_count == 3

    def test_complete_graph_arcs(self):
        assert atomic_types(named("complete", n=3), 2).class_count == 2

    def test_complete_graph_triples(self):
        """Rotations of a rainbow triple share a type"""
        alpha = atomic_types(named("complete", n=3), 3)

        assert alpha.colour_of((0, 1, 2)) == alpha.colour_of((1, 2, 0))
        assert alpha.colour_of((0, 0, 1)) != alpha.colour_of((0, 1, 2))

    def test_level_one(self, path3):
        """k = 1 is the partition of V by loop colour"""
        assert atomic_types(path3, 1).class_count == 1


class TestProjections:
    """Test r-projections and (V^k)^p reshaping"""

    def test_identity_projection(self, path3):
        alpha = atomic_types(path3, 2)
        assert project_partition(alpha, 2) == alpha

    def test_projection_of_atomic_types(self):
        k3 = named("complete", n=3)
        projected = project_partition(atomic_types(k3, 3), 2)

        assert compare(projected, atomic_types(k3, 2)) == Comparison.EQUIVALENT

    def test_projection_of_discrete(self):
        assert project_partition(discrete_partition(3, 2), 1).class_count == 3

    def test_reshape_then_flatten(self, cycle4):
        alpha = atomic_types(cycle4, 4)
        pairs = reshape(alpha, 2, 2)

        assert pairs.n == 16 and pairs.arity == 2
        assert flatten(pairs, 2) == alpha

    def test_reshape_rejects_bad_arity(self, cycle4):
        with pytest.raises(ValidationError):
            reshape(atomic_types(cycle4, 3), 2, 2)


class TestGraphLikePredicates:
    """Test invariance, consistency and the graph-like suite"""

    def test_atomic_types_are_graph_like(self, small_corpus):
        for g in small_corpus:
            report = is_graph_like(atomic_types(g, 3))
            assert report.ok, report.violation

    def test_discrete_partition(self):
        g = discrete_partition(3, 2)
        assert is_invariant(g)
        assert is_consistent(g, 1)

    def test_not_invariant(self):
        """(0,1) and (1,2) merged while their swaps are separated"""
        labels = {(0, 1): 1, (1, 2): 1, (1, 0): 2, (2, 1): 3}
        g = from_function(3, 2, lambda v: labels.get(v, 0 if v[0] == v[1] else 4))

        assert not is_invariant(g)
        assert is_graph_like(g).violation == "invariance"

    def test_not_consistent(self):
        """(0,1) merged with (0,0) while the loops at 0 and 1 differ"""
        g = LabelledPartition(2, 2, np.array([0, 0, 1, 2]))
        assert not is_consistent(g, 1)

    def test_loop_merged_with_arc(self):
        """Merging a loop class with a non-loop class breaks the equality pattern"""
        g = from_function(3, 2, lambda v: v[0] == v[1] or v == (0, 1) or v == (1, 0))
        assert not is_graph_like(g)

    def test_own_projection_substitution(self, small_corpus):
        """Class-equal tuples stay class-equal after substituting their own projections"""
        k = 3
        for g in small_corpus[:4]:
            alpha = atomic_types(g, k)
            stable = fixed_point(OperatorSpec("wl", k), alpha).partition
            for partition in (alpha, stable):
                assert is_graph_like(partition)
                for members in partition.classes():
                    first = members[0]
                    for u in members[1:]:
                        for r in range(1, k + 1):
                            for i in distinct_index_vectors(k, r):
                                for j in index_vectors(k, r):
                                    left = partition.colour_of(substitute(u, i, project(u, j)))
                                    right = partition.colour_of(substitute(first, i, project(first, j)))
                                    assert left == right, (g.metadata["name"], u, first, i, j)

    def test_projections_stay_graph_like(self, small_corpus):
        for g in small_corpus[:4]:
            alpha = atomic_types(g, 3)
            for t in (1, 2, 3):
                assert is_graph_like(project_partition(alpha, t))


class TestGraph:
    """Test rainbow arc partitions"""

    def test_undirected_graph_is_rainbow(self, cycle5):
        assert rainbow_report(cycle5).ok
        assert set(cycle5.colour_names) == {"loop", "edge", "nonedge"}

    def test_diagonal_violation(self):
        with pytest.raises(NotRainbowError):
            Graph.from_matrix([[0, 0], [1, 0]])

    def test_transpose_violation(self):
        """Colour 1 arcs do not share a reverse colour"""
        matrix = [
            [0, 1, 1],
            [2, 0, 3],
            [1, 3, 0],
        ]
        report = rainbow_report(LabelledPartition(3, 2, np.array(matrix).reshape(-1)))

        assert report.violation == "transpose"
        with pytest.raises(NotRainbowError):
            Graph.from_matrix(matrix)

    def test_names_follow_canonical_order(self):
        g = Graph.from_matrix([[1, 0], [0, 1]], names=["edge", "loop"])

        assert g.colour_names == ("loop", "edge")
        assert g.name_of(0, 1) == "edge"

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValidationError):
            Graph.from_matrix([[0, 1], [1, 0]], names=["x", "x"])
