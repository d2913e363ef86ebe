"""
Tests for wllab.generators module
"""

import json
import tempfile
from pathlib import Path

import networkx as nx
import pytest

from wllab.exceptions import CapExceededError, ParseError, ValidationError
from wllab.generators import (
    CROSS, NAMED_GRAPHS, all_n4, cfi_graph, cfi_pair, cfi_parity, decode_graph, decode_partition,
    default_corpus, disjoint_union, encode_graph, from_networkx, named, random_coloured_digraph,
    read_graph, read_partition, to_networkx, write_graph, write_partition,
)
from wllab.partition import atomic_types, compare, Comparison


def _sizes_by_name(g):
    sizes = g.class_sizes()
    return {name: sizes[i] for i, name in enumerate(g.colour_names)}


def _is_srg(nxg, n, k, lam, mu):
    if nxg.number_of_nodes() != n or any(d != k for _, d in nxg.degree()):
        return False
    for u in nxg:
        for v in nxg:
            if u == v:
                continue
            common = len(set(nxg[u]) & set(nxg[v]))
            if common != (lam if nxg.has_edge(u, v) else mu):
                return False
    return True


class TestNamedGraphs:
    """Test standard constructions"""

    def test_cycle5_colour_classes(self, cycle5):
        assert _sizes_by_name(cycle5) == {"loop": 5, "edge": 10, "nonedge": 10}
        assert cycle5.metadata["name"] == "cycle_5"

    @pytest.mark.parametrize("name", ["shrikhande", "rook44"])
    def test_strongly_regular(self, name):
        assert _is_srg(to_networkx(named(name)), 16, 6, 2, 2)

    def test_all_n4(self):
        graphs = all_n4()
        nxgraphs = [to_networkx(g) for g in graphs]

        assert len(graphs) == 11
        for i in range(11):
            for j in range(i + 1, 11):
                assert not nx.is_isomorphic(nxgraphs[i], nxgraphs[j])

    def test_all_n4_by_index(self):
        assert named("all_n4", index=3).metadata["name"] == "all_n4_3"
        with pytest.raises(ValidationError):
            named("all_n4", index=11)

    def test_cycles(self):
        g = named("cycles", lengths="3,3")

        assert g.n == 6
        assert g.metadata["name"] == "cycles_3,3"

    def test_unknown_name(self):
        with pytest.raises(ValidationError):
            named("dodecahedron")

    def test_bad_parameters(self):
        with pytest.raises(ValidationError):
            named("cycle", m=4)

    def test_names_listed(self):
        assert "petersen" in NAMED_GRAPHS
        assert "all_n4" in NAMED_GRAPHS

    def test_directed_graph(self):
        nxg = nx.DiGraph([(0, 1), (1, 2), (2, 1)])
        g = from_networkx(nxg)

        assert g.name_of(0, 1) == "arc"
        assert g.name_of(1, 0) == "back"
        assert g.name_of(1, 2) == "edge"


class TestRandomAndUnions:
    """Test random rainbows and disjoint unions"""

    def test_seeded(self):
        a = random_coloured_digraph(6, 4, seed=11)
        b = random_coloured_digraph(6, 4, seed=11)

        assert a == b
        assert a.colour_names == b.colour_names

    def test_parameters_validated(self):
        with pytest.raises(ValidationError):
            random_coloured_digraph(4, 1)

    def test_disjoint_union(self, path3, cycle4):
        union = disjoint_union(path3, cycle4)

        assert union.n == 7
        assert union.metadata["sides"] == [3, 4]
        assert union.name_of(0, 5) == CROSS
        assert union.name_of(4, 5) == "edge"
        assert _sizes_by_name(union)[CROSS] == 24


class TestCFI:
    """Test Cai-Furer-Immerman graphs"""

    def test_pair_over_k4(self, complete4):
        untwisted, twisted = cfi_pair(complete4)

        # 4 middle vertices and 3 connector pairs per base vertex
        assert untwisted.n == 40
        assert cfi_parity(untwisted) == 0
        assert cfi_parity(twisted) == 1

    def test_two_twists_cancel_in_parity(self, complete4):
        g = cfi_graph(complete4, [(0, 1), (2, 3)])
        assert cfi_parity(g) == 0

    def test_base_must_have_degree_two(self, path3):
        with pytest.raises(ValidationError):
            cfi_graph(path3)

    def test_degree_cap(self):
        with pytest.raises(CapExceededError):
            cfi_graph(named("complete", n=8))

    def test_unknown_twist(self, cycle4):
        with pytest.raises(ValidationError):
            cfi_graph(cycle4, [(0, 2)])

    def test_parity_needs_wiring(self, cycle4):
        with pytest.raises(ValidationError):
            cfi_parity(cycle4)


class TestCorpus:
    """Test the acceptance corpus"""

    def test_default_corpus(self):
        corpus = default_corpus()
        names = [g.metadata["name"] for g in corpus]

        assert len(corpus) == 16
        assert "petersen" in names and "cycles_3,3" in names

    def test_filtered(self):
        assert len(default_corpus(max_n=4)) == 12


class TestSerialization:
    """Test graph and partition documents"""

    def test_graph_document(self, path3):
        doc = encode_graph(path3)

        assert doc.colours == ["edge", "loop", "nonedge"]
        # four edge arcs outnumber the two nonedge arcs
        assert doc.defaults == {"loop": "loop", "nonedge": "edge"}
        assert sorted(tuple(a) for a in doc.arcs) == [(0, 2, 2), (2, 0, 2)]

    def test_graph_file(self, cycle5):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "c5.ccg.json"
            write_graph(cycle5, path)
            again = read_graph(path)

        assert again == cycle5
        assert again.metadata["name"] == "cycle_5"

    def test_uncovered_arc(self):
        doc = {"num_vertices": 2, "colours": ["loop", "edge"], "arcs": [[0, 1, 1], [1, 0, 1]],
               "defaults": {"nonedge": None}}
        with pytest.raises(ParseError):
            decode_graph(doc)

    def test_non_rainbow_document(self):
        doc = {"num_vertices": 2, "colours": ["x"], "arcs": [], "defaults": {"loop": "x", "nonedge": "x"}}
        with pytest.raises(ParseError):
            decode_graph(doc)

    def test_malformed_document(self):
        with pytest.raises(ParseError):
            decode_graph({"num_vertices": 0, "colours": ["x"]})

    def test_partition_file(self, path3):
        alpha = atomic_types(path3, 2)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "alpha.json"
            write_partition(alpha, path, iterations=2)
            data = json.loads(path.read_text())
            again = read_partition(path)

        assert data["schema"] == "wllab-partition/1"
        assert data["iterations"] == 2
        assert data["class_sizes"] == [3, 4, 2]
        assert compare(again, alpha) == Comparison.EQUIVALENT

    def test_partition_duplicate_tuple(self):
        doc = {"n": 2, "arity": 1, "classes": [[[0], [1]], [[1]]]}
        with pytest.raises(ParseError):
            decode_partition(doc)

    def test_partition_missing_tuple(self):
        with pytest.raises(ParseError):
            decode_partition({"n": 2, "arity": 1, "classes": [[[0]]]})
