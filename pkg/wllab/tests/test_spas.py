"""
Tests for wllab.spas module
"""

import pytest

from wllab.exceptions import CapExceededError, ValidationError
from wllab.fields import GF
from wllab.generators import named
from wllab.partition import Comparison, LabelledPartition, compare
from wllab.spas import (
    SpasFamily, SpasId, convergence_level, distinguishes, dominance_report, ep, sch_oracle,
    spas_apply, spas_axiom_check,
)

REFINING = (Comparison.EQUIVALENT, Comparison.FINER_RIGHT)


class TestSpasId:
    """Test scheme identifiers"""

    def test_parse(self):
        s = SpasId.parse("im,field=gf:2")

        assert s.family == SpasFamily.IM
        assert s.field == GF(2)
        assert s.label == "IM(gf:2)"

    def test_parse_r(self):
        s = SpasId.parse("c,r=2")

        assert s.r == 2
        assert s.label == "C_r2"
        assert str(SpasId.parse("wl")) == "WL"

    @pytest.mark.parametrize("text", ["im,r=2", "bogus", "wl,depth=2", "c,r=0"])
    def test_invalid(self, text):
        with pytest.raises(ValidationError):
            SpasId.parse(text)

    def test_ep_has_no_operator(self):
        with pytest.raises(ValidationError):
            SpasId.parse("ep").operator(2)


class TestSpasApply:
    """Test scheme levels on graphs"""

    def test_level_one_is_the_graph(self, path3):
        level = spas_apply("wl", path3, 1)

        assert compare(level, path3) == Comparison.EQUIVALENT
        assert level.metadata == {"spas": "WL", "k": 1, "iterations": 0}

    @pytest.mark.parametrize("family,k", [("wl", 1), ("wl", 2), ("c", 1), ("ep", 1), ("im,field=gf:2", 3)])
    def test_every_level_is_a_plain_arc_partition(self, path3, family, k):
        level = spas_apply(family, path3, k)

        assert type(level) is LabelledPartition
        assert level.arity == 2
        assert level.metadata["k"] == k

    def test_wl_level_two(self, path3):
        arcs = spas_apply("wl", path3, 2)

        assert arcs.arity == 2
        assert arcs.class_count == 5
        assert arcs.metadata["spas"] == "WL"

    def test_invalid_level(self, path3):
        with pytest.raises(ValidationError):
            spas_apply("wl", path3, 0)

    def test_c_one_level_up_matches_wl(self, small_corpus):
        for g in small_corpus:
            assert compare(spas_apply("c", g, 3), spas_apply("wl", g, 2)) == Comparison.EQUIVALENT

    def test_levels_refine(self, small_corpus):
        for g in small_corpus:
            assert compare(spas_apply("wl", g, 2), spas_apply("wl", g, 3)) in REFINING


class TestEP:
    """Test the EP construction"""

    def test_level_one_is_coherent_closure(self, small_corpus):
        for g in small_corpus:
            c = ep(g, 1)
            assert compare(c.rho, spas_apply("wl", g, 2)) == Comparison.EQUIVALENT

    def test_sandwich_at_level_one(self, small_corpus):
        for g in small_corpus[:4]:
            level = spas_apply("ep", g, 1)
            assert compare(spas_apply("wl", g, 1), level) in REFINING
            assert compare(level, spas_apply("wl", g, 3)) in REFINING

    def test_constant_tuples_are_cells(self, cycle4):
        c = ep(cycle4, 2)

        assert c.metadata["diagonal_union_of_cells"]
        assert c.metadata["k"] == 2
        assert c.metadata["lifted_classes"] >= c.colour_count

    def test_vertex_cap(self):
        with pytest.raises(CapExceededError):
            ep(named("cycle", n=7), 1)

    def test_level_cap(self, path3):
        with pytest.raises(CapExceededError):
            ep(path3, 3)


class TestOracleAndDistinguishing:
    """Test the orbit oracle and pairwise distinguishing"""

    def test_sch_oracle(self, cycle4):
        assert sch_oracle(cycle4, 2).class_count == 3

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_sch_oracle_complete(self, n):
        assert sch_oracle(named("complete", n=n), 2).class_count == 2

    def test_same_graph(self, cycle5):
        assert not distinguishes("wl", 2, cycle5, cycle5)

    def test_cycle6_against_two_triangles(self):
        c6, triangles = named("cycle", n=6), named("cycles", lengths="3,3")

        assert not distinguishes("wl", 1, c6, triangles)
        assert distinguishes("wl", 2, c6, triangles)


class TestDominance:
    """Test dominance reports"""

    def test_consistent_pair(self, small_corpus):
        report = dominance_report(small_corpus, [(SpasId.parse("wl"), 1, SpasId.parse("c"), 2)], "small")

        assert report.consistent
        assert report.pairs[0].counterexample is None
        assert report.pairs[0].left == "WL_1"
        assert "no counterexample" in report.pairs[0].verdict

    def test_counterexample(self, small_corpus):
        report = dominance_report(small_corpus, [(SpasId.parse("wl"), 2, SpasId.parse("wl"), 1)])

        assert not report.consistent
        assert report.pairs[0].counterexample == "path_3"
        assert report.pairs[0].outcomes["path_3"] == Comparison.FINER_LEFT.value


class TestAxioms:
    """Test chain, idempotence and convergence checks"""

    @pytest.mark.parametrize("s", ["wl", "c"])
    def test_cycle4(self, s, cycle4):
        report = spas_axiom_check(s, cycle4)

        assert report.ok
        assert set(report.chain) == {1, 2, 3}
        assert report.to_dict()["ok"] is True

    def test_oracle_cap(self):
        with pytest.raises(CapExceededError):
            spas_axiom_check("wl", named("petersen"))

    def test_convergence_level(self, path3, cycle4):
        """The path needs one refinement round to split its arcs, the cycle none"""
        assert convergence_level("wl", path3) == 2
        assert convergence_level("wl", cycle4) == 1
