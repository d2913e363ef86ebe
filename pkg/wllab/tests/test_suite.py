"""
Tests for wllab.suite module
"""

import json

import pytest

from wllab.exceptions import ParseError
from wllab.export import dumps
from wllab.schemas import ExpectationTag, Manifest
from wllab.suite import SuiteConfig, SuiteRunner, load_manifest, run_suite, run_suite_async, shipped_manifests


def _manifest(*checks, name="custom"):
    return Manifest.model_validate({"name": name, "checks": list(checks)})


C3_IS_WL2 = {
    "kind": "equivalent",
    "tag": "PAPER",
    "description": "C_3 equals WL_2",
    "params": {"pairs": [["c", 3, "wl", 2]]},
}

WL2_IS_WL1 = {
    "kind": "equivalent",
    "tag": "PAPER",
    "description": "deliberately false",
    "params": {"pairs": [["wl", 2, "wl", 1]]},
}

C6_VS_TRIANGLES = {
    "kind": "distinguishes",
    "params": {"spas": "wl", "k": 2, "left": {"name": "cycle", "n": 6}, "right": {"name": "cycles", "lengths": "3,3"}},
}


class TestManifests:
    """Test manifest loading"""

    def test_shipped(self):
        assert shipped_manifests() == [
            "axioms", "cfi", "coherent", "ep_sandwich", "im_rationals", "imt_sandwich", "wl_c_collapse",
        ]

    @pytest.mark.parametrize("name", ["axioms", "cfi", "coherent", "ep_sandwich", "wl_c_collapse"])
    def test_bundled_by_name(self, name):
        manifest = load_manifest(name)

        assert manifest.name == name
        assert manifest.checks

    def test_imt_sandwich_fields(self):
        """The IMt sandwich runs over Q, GF(2) and GF(3)"""
        manifest = load_manifest("imt_sandwich")
        stable_fields = {c.params["field"] for c in manifest.checks if c.kind.value == "imt_stable"}
        pair_fields = {
            spas.split("field=")[1]
            for c in manifest.checks if c.kind.value == "dominance"
            for pair in c.params["pairs"] for spas in (pair[0], pair[2])
        }

        assert stable_fields == {"q", "gf:2", "gf:3"}
        assert pair_fields == {"q", "gf:2", "gf:3"}

    def test_bundled_with_suffix(self):
        assert load_manifest("cfi.json").name == "cfi"

    def test_missing(self):
        with pytest.raises(ParseError):
            load_manifest("no_such_manifest")

    def test_bare_list(self, tmp_path):
        path = tmp_path / "bare.json"
        path.write_text(json.dumps([C6_VS_TRIANGLES]))
        manifest = load_manifest(path)

        assert manifest.name == "manifest"
        assert manifest.checks[0].tag == ExpectationTag.PAPER

    def test_invalid_check_kind(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"name": "bad", "checks": [{"kind": "telepathy"}]}))
        with pytest.raises(ParseError):
            load_manifest(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_manifest(path)


class TestSuiteRunner:
    """Test check execution and tallying"""

    def test_passing_manifest(self, small_corpus):
        report = SuiteRunner(small_corpus).run(_manifest(C3_IS_WL2))

        assert report.passed
        assert report.failed_paper == 0
        assert report.corpus[0] == "path_3"
        assert report.checks[0].outcome == "Equivalent"
        assert len(report.dominance) == 1

    def test_paper_failure_counted(self, small_corpus):
        report = SuiteRunner(small_corpus).run(_manifest(C3_IS_WL2, WL2_IS_WL1))

        assert report.failed == 1
        assert report.failed_paper == 1
        assert "path_3" in report.checks[1].outcome

    def test_derived_failure_not_paper(self, small_corpus):
        report = SuiteRunner(small_corpus).run(_manifest(dict(WL2_IS_WL1, tag="DERIVED")))

        assert report.failed == 1
        assert report.failed_paper == 0

    def test_record_is_not_counted(self, small_corpus):
        check = dict(C6_VS_TRIANGLES, tag="RECORD", expect=False)
        report = SuiteRunner(small_corpus).run(_manifest(check))

        assert report.checks[0].outcome is True
        assert not report.checks[0].passed
        assert report.failed == 0

    def test_extended_skipped(self, small_corpus):
        check = dict(C6_VS_TRIANGLES, extended=True)
        report = SuiteRunner(small_corpus, SuiteConfig(extended=False)).run(_manifest(check))

        assert report.checks[0].outcome == "skipped"
        assert report.checks[0].passed

    def test_graph_filters(self, small_corpus):
        check = dict(C3_IS_WL2, graphs=["cycle_4", "cycle_5"], max_n=4)
        report = SuiteRunner(small_corpus).run(_manifest(check))

        assert report.checks[0].detail["graphs"] == 1

    def test_cfi_record(self):
        manifest = load_manifest("cfi")
        report = SuiteRunner([]).run(manifest)

        assert report.checks[0].outcome["parity_differs"] is True
        assert report.checks[1].outcome == "skipped"
        assert report.failed == 0

    def test_axioms_and_ep(self, cycle4, path3):
        manifest = _manifest(
            {"kind": "axioms", "params": {"spas": ["wl"]}},
            {"kind": "ep_coherent", "params": {"k": 1}},
            {"kind": "imt_stable", "params": {"k": 3, "field": "gf:2"}},
        )
        report = SuiteRunner([path3, cycle4]).run(manifest)

        assert len(report.checks) == 6
        assert report.passed

    def test_coherent_algebra(self, small_corpus):
        manifest = _manifest({"kind": "coherent_algebra", "params": {"fields": ["q", "gf:2"]}})
        report = SuiteRunner(small_corpus[:3]).run(manifest)

        assert report.passed
        assert report.checks[0].detail["laws"] == {"q": True, "gf:2": True}

    def test_report_is_deterministic(self, small_corpus):
        manifest = _manifest(C3_IS_WL2, C6_VS_TRIANGLES)
        config = SuiteConfig(max_concurrent_jobs=3)
        first = run_suite(manifest, small_corpus, config)
        second = run_suite(manifest, small_corpus, SuiteConfig(max_concurrent_jobs=1))

        assert dumps(first) == dumps(second)
        assert json.loads(dumps(first))["schema"] == "wllab-report/1"


class TestAsyncSuite:
    """Test the async entry point"""

    @pytest.mark.asyncio
    async def test_run_suite_async(self, small_corpus):
        report = await run_suite_async(_manifest(C3_IS_WL2), small_corpus)

        assert report.passed
        assert report.manifest == "custom"
