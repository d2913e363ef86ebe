"""
Tests for wllab.automorphism module
"""

import numpy as np
import pytest

from wllab.automorphism import automorphisms, find_isomorphism, is_isomorphic, orbit_partition, vertex_colours
from wllab.exceptions import CapExceededError
from wllab.generators import named
from wllab.partition import Graph


def _relabel(g: Graph, perm):
    """Graph h with h(perm[u], perm[v]) = g(u, v)"""
    arr = g.as_array()
    out = np.empty_like(arr)
    out[np.ix_(perm, perm)] = arr
    return Graph.from_matrix(out, names=g.colour_names)


class TestAutomorphisms:
    """Test automorphism group enumeration"""

    def test_cycle4(self, cycle4):
        group = automorphisms(cycle4)

        assert len(group) == 8
        assert group[0] == (0, 1, 2, 3)

    def test_complete_graph(self, complete4):
        assert len(automorphisms(complete4)) == 24

    def test_path3(self, path3):
        assert sorted(automorphisms(path3)) == [(0, 1, 2), (2, 1, 0)]

    def test_petersen_vertex_count_above_cap(self):
        with pytest.raises(CapExceededError):
            automorphisms(named("petersen"))

    def test_cap_override(self):
        assert len(automorphisms(named("cycle", n=9), cap=9)) == 18


class TestOrbitPartition:
    """Test orbits on V^k"""

    def test_cycle4_arcs(self, cycle4):
        """Diagonal, adjacent and antipodal arcs"""
        orbits = orbit_partition(cycle4, 2)

        assert orbits.class_count == 3
        assert orbits.colour_of((0, 1)) == orbits.colour_of((3, 0))
        assert orbits.colour_of((0, 2)) == orbits.colour_of((1, 3))

    def test_complete_graph_arcs(self, complete4):
        assert orbit_partition(complete4, 2).class_count == 2

    def test_rigid_graph(self):
        """Distinct loop colours leave only the identity"""
        rigid = Graph.from_matrix([
            [0, 3, 3],
            [3, 1, 3],
            [3, 3, 2],
        ])
        assert orbit_partition(rigid, 2).class_count == 9


class TestIsomorphism:
    """Test the individualization-refinement search"""

    def test_relabelled_graph(self):
        g = named("path", n=5)
        perm = (3, 0, 4, 1, 2)
        h = _relabel(g, perm)
        pi = find_isomorphism(g, h)

        assert pi is not None
        for u in range(g.n):
            for v in range(g.n):
                assert h.name_of(pi[u], pi[v]) == g.name_of(u, v)

    def test_cycle6_against_two_triangles(self):
        assert not is_isomorphic(named("cycle", n=6), named("cycles", lengths="3,3"))

    def test_different_colour_names(self, path3):
        assert find_isomorphism(path3, named("complete", n=3)) is None

    def test_vertex_colours_split_path_ends(self):
        colours = vertex_colours(named("path", n=4))

        assert colours[0] == colours[3]
        assert colours[1] == colours[2]
        assert colours[0] != colours[1]

    @pytest.mark.slow
    def test_shrikhande_is_not_rook44(self):
        assert not is_isomorphic(named("shrikhande"), named("rook44"))

    def test_shrikhande_relabelled(self):
        g = named("shrikhande")
        perm = tuple(np.random.default_rng(3).permutation(g.n).tolist())
        assert is_isomorphic(g, _relabel(g, perm))
