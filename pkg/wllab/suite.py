"""
wllab Suite - Manifest-Driven Acceptance Runs

Main orchestrator for batch experiments:
- Manifests are data: a list of checks, each tagged PAPER, DERIVED or RECORD
- Per-graph work runs in worker threads bounded by MAX_CONCURRENT_JOBS
- Reports are assembled in corpus order so output is byte-deterministic
"""

import asyncio
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Awaitable, Callable, Dict, List, Optional, Sequence, TypeVar, Union

from pydantic import ValidationError as PydanticValidationError

from .automorphism import find_isomorphism
from .coherent import algebraic_isomorphism, coherent_closure, standard_basis, verify_adjacency_algebra
from .config import get_environment_config, settings
from .exceptions import ParseError
from .export import export_service
from .fields import FieldSpec
from .generators import cfi_pair, cfi_parity, default_corpus, graph_name, named
from .partition import Comparison, Graph, atomic_types
from .refine import OperatorFamily, OperatorSpec, fixed_point, is_im_stable
from .schemas import (
    CheckKind, CheckOutcome, DominanceReport, ExpectationTag, Manifest, ManifestCheck, SuiteReport,
)
from .spas import SpasId, assemble_dominance, compare_pair, distinguishes, ep, spas_axiom_check

logger = logging.getLogger(__name__)

T = TypeVar("T")

MANIFEST_PACKAGE = "wllab.manifests"


# =============================================================================
# MANIFEST LOADING
# =============================================================================

def shipped_manifests() -> List[str]:
    """Names of the manifests bundled with the package"""
    return sorted(
        entry.name[: -len(".json")]
        for entry in resources.files(MANIFEST_PACKAGE).iterdir()
        if entry.name.endswith(".json")
    )


def load_manifest(source: Union[str, Path]) -> Manifest:
    """
    Load a manifest from a path, or by bundled name such as 'wl_c_collapse'

    Raises:
        ParseError: Missing file or invalid manifest
    """
    path = Path(source)
    if not path.exists():
        bundled = resources.files(MANIFEST_PACKAGE).joinpath(f"{path.stem.replace('.json', '')}.json")
        if not bundled.is_file():
            raise ParseError("manifest not found", filename=str(source))
        data = export_service.read_json(Path(str(bundled)))
    else:
        data = export_service.read_json(path)
    try:
        return Manifest.model_validate(data)
    except PydanticValidationError as e:
        raise ParseError("invalid manifest", filename=str(source), reason=str(e)) from e


def graph_from_spec(spec: Union[str, Dict[str, Any]]) -> Graph:
    """Named graph from 'name' or {'name': ..., **params}"""
    if isinstance(spec, str):
        return named(spec)
    params = dict(spec)
    return named(params.pop("name"), **params)


# =============================================================================
# RUNNER
# =============================================================================

@dataclass
class SuiteConfig:
    """Configuration for suite runs"""
    max_concurrent_jobs: int = field(default_factory=lambda: settings.MAX_CONCURRENT_JOBS)
    extended: bool = field(default_factory=lambda: settings.EXTENDED)
    corpus_id: str = "default"


class SuiteRunner:
    """Runs every check of a manifest against a corpus"""

    def __init__(self, corpus: Optional[Sequence[Graph]] = None, config: Optional[SuiteConfig] = None):
        self.corpus = list(corpus) if corpus is not None else default_corpus()
        self.config = config or SuiteConfig()
        self._handlers: Dict[CheckKind, Callable[[ManifestCheck], Awaitable[List[CheckOutcome]]]] = {
            CheckKind.DOMINANCE: self._check_dominance,
            CheckKind.EQUIVALENT: self._check_dominance,
            CheckKind.AXIOMS: self._check_axioms,
            CheckKind.EP_COHERENT: self._check_ep_coherent,
            CheckKind.COHERENT_ALGEBRA: self._check_coherent_algebra,
            CheckKind.DISTINGUISHES: self._check_distinguishes,
            CheckKind.CFI: self._check_cfi,
            CheckKind.IMT_STABLE: self._check_imt_stable,
            CheckKind.ALGEBRAIC_ISOMORPHISM: self._check_algebraic_isomorphism,
        }
        self._dominance: List[DominanceReport] = []

    def run(self, manifest: Manifest) -> SuiteReport:
        """Synchronous wrapper"""
        return asyncio.run(self.run_async(manifest))

    async def run_async(self, manifest: Manifest) -> SuiteReport:
        logger.info(f"Running manifest {manifest.name}: {len(manifest.checks)} checks on {len(self.corpus)} graphs")
        self._dominance = []
        outcomes: List[CheckOutcome] = []
        for check in manifest.checks:
            if check.extended and not self.config.extended:
                outcomes.append(CheckOutcome(
                    kind=check.kind, tag=check.tag, description=check.description,
                    outcome="skipped", passed=True, detail={"skipped": "needs --extended"},
                ))
                continue
            outcomes.extend(await self._handlers[check.kind](check))

        counted = [o for o in outcomes if not o.passed and o.tag != ExpectationTag.RECORD]
        report = SuiteReport(
            manifest=manifest.name,
            corpus=[graph_name(g) for g in self.corpus],
            environment=get_environment_config(),
            checks=outcomes,
            dominance=self._dominance,
            failed=len(counted),
            failed_paper=sum(o.tag == ExpectationTag.PAPER for o in counted),
        )
        logger.info(f"Manifest {manifest.name} finished: {len(outcomes)} outcomes, {report.failed} failed")
        return report

    # -------------------------------------------------------------------------
    async def _map(self, fn: Callable[..., T], items: Sequence[Any]) -> List[T]:
        """Run fn over items in worker threads; results keep item order"""
        semaphore = asyncio.Semaphore(self.config.max_concurrent_jobs)

        async def one(item):
            async with semaphore:
                return await asyncio.to_thread(fn, item)

        return list(await asyncio.gather(*(one(item) for item in items)))

    def _graphs(self, check: ManifestCheck) -> List[Graph]:
        selected = [
            g for g in self.corpus
            if (check.graphs is None or graph_name(g) in check.graphs)
            and (check.max_n is None or g.n <= check.max_n)
        ]
        return selected

    @staticmethod
    def _outcome(check: ManifestCheck, outcome: Any, expected: Any = None, graph: Optional[str] = None,
                 passed: Optional[bool] = None, **detail: Any) -> CheckOutcome:
        expected = check.expect if expected is None else expected
        if passed is None:
            passed = expected is None or outcome == expected
        return CheckOutcome(
            kind=check.kind, tag=check.tag, description=check.description, graph=graph,
            outcome=outcome, expected=expected, passed=passed, detail=detail,
        )

    # -------------------------------------------------------------------------
    async def _check_dominance(self, check: ManifestCheck) -> List[CheckOutcome]:
        graphs = self._graphs(check)
        names = [graph_name(g) for g in graphs]
        pairs = [
            (SpasId.parse(left), int(k), SpasId.parse(right), int(k2))
            for left, k, right, k2 in check.params["pairs"]
        ]
        jobs = [(index, g) for index in range(len(pairs)) for g in graphs]
        results = await self._map(lambda job: compare_pair(job[1], pairs[job[0]]), jobs)
        outcomes = {(index, graph_name(g)): result for (index, g), result in zip(jobs, results)}
        corpus_id = f"{self.config.corpus_id}:{check.description or check.kind.value}"
        report = assemble_dominance(corpus_id, names, pairs, outcomes)
        self._dominance.append(report)

        equivalence = check.kind == CheckKind.EQUIVALENT
        out = []
        for pair in report.pairs:
            if equivalence:
                bad = [name for name, value in pair.outcomes.items() if value != Comparison.EQUIVALENT.value]
                passed = not bad
                outcome = "Equivalent" if passed else f"not equivalent at {bad[0]}: {pair.outcomes[bad[0]]}"
            else:
                passed = pair.consistent
                outcome = pair.verdict
            out.append(self._outcome(
                check, outcome, expected="Equivalent" if equivalence else "consistent", passed=passed,
                left=pair.left, right=pair.right, graphs=len(names),
            ))
        return out

    async def _check_axioms(self, check: ManifestCheck) -> List[CheckOutcome]:
        families = check.params.get("spas", ["wl", "c"])
        max_level = check.params.get("max_level")
        graphs = self._graphs(check)
        jobs = [(s, g) for s in families for g in graphs]
        reports = await self._map(lambda job: spas_axiom_check(job[0], job[1], max_level), jobs)
        return [
            self._outcome(check, report.ok, expected=True, graph=report.graph, spas=report.spas,
                          chain=report.chain_ok, idempotence=report.idempotence_ok, sch=report.sch)
            for report in reports
        ]

    async def _check_ep_coherent(self, check: ManifestCheck) -> List[CheckOutcome]:
        k = int(check.params.get("k", 1))
        graphs = self._graphs(check)
        configs = await self._map(lambda g: ep(g, k), graphs)
        return [
            self._outcome(check, bool(c.metadata["diagonal_union_of_cells"]), expected=True, graph=graph_name(g),
                          colours=c.colour_count, lifted_classes=c.metadata["lifted_classes"])
            for g, c in zip(graphs, configs)
        ]

    async def _check_coherent_algebra(self, check: ManifestCheck) -> List[CheckOutcome]:
        fields = [FieldSpec.parse(f) for f in check.params.get("fields", ["q", "gf:2", "gf:3", "gf:7"])]

        def run(g: Graph) -> Dict[str, Any]:
            c = coherent_closure(g)
            laws = {f.label: verify_adjacency_algebra(c, f) for f in fields}
            mats = c.adjacency_matrices()
            basis = standard_basis(mats)
            again = standard_basis(list(basis))
            shuffled = standard_basis(list(reversed(mats)))
            as_lists = [m.to_list() for m in basis]
            return {
                "laws": laws,
                "idempotent": as_lists == [m.to_list() for m in again],
                "order_free": as_lists == [m.to_list() for m in shuffled],
                "size": len(basis) == c.colour_count,
            }

        graphs = self._graphs(check)
        results = await self._map(run, graphs)
        out = []
        for g, result in zip(graphs, results):
            ok = all(result["laws"].values()) and result["idempotent"] and result["order_free"] and result["size"]
            out.append(self._outcome(check, ok, expected=True, graph=graph_name(g), **result))
        return out

    async def _check_distinguishes(self, check: ManifestCheck) -> List[CheckOutcome]:
        params = check.params
        left, right = graph_from_spec(params["left"]), graph_from_spec(params["right"])
        outcome = await asyncio.to_thread(distinguishes, params.get("spas", "wl"), int(params.get("k", 2)), left, right)
        return [self._outcome(check, outcome, graph=f"{graph_name(left)} vs {graph_name(right)}")]

    async def _check_cfi(self, check: ManifestCheck) -> List[CheckOutcome]:
        params = check.params
        base = graph_from_spec(params.get("base", {"name": "complete", "n": 4}))
        untwisted, twisted = cfi_pair(base)
        s, k = params.get("spas", "wl"), int(params.get("k", 2))
        separated = await asyncio.to_thread(distinguishes, s, k, untwisted, twisted)
        outcome = {
            "distinguishes": separated,
            "parity_differs": cfi_parity(untwisted) != cfi_parity(twisted),
        }
        return [self._outcome(
            check, outcome, graph=f"cfi({graph_name(base)})",
            spas=SpasId.parse(s).label, k=k, vertices=untwisted.n,
        )]

    async def _check_imt_stable(self, check: ManifestCheck) -> List[CheckOutcome]:
        k = int(check.params.get("k", 3))
        f = FieldSpec.parse(check.params.get("field", "q"))

        def run(g: Graph) -> bool:
            stable = fixed_point(OperatorSpec(OperatorFamily.IMT, k, field=f), atomic_types(g, k)).partition
            return is_im_stable(stable, f)

        graphs = self._graphs(check)
        results = await self._map(run, graphs)
        return [
            self._outcome(check, result, expected=True, graph=graph_name(g), field=f.label, k=k)
            for g, result in zip(graphs, results)
        ]

    async def _check_algebraic_isomorphism(self, check: ManifestCheck) -> List[CheckOutcome]:
        params = check.params
        left, right = graph_from_spec(params["left"]), graph_from_spec(params["right"])

        def run(_) -> Dict[str, Any]:
            phi = algebraic_isomorphism(coherent_closure(left), coherent_closure(right))
            return {
                "algebraic": phi is not None,
                "isomorphic": find_isomorphism(left, right) is not None,
            }

        outcome = (await self._map(run, [None]))[0]
        return [self._outcome(check, outcome, graph=f"{graph_name(left)} vs {graph_name(right)}")]


def run_suite(manifest: Union[str, Path, Manifest], corpus: Optional[Sequence[Graph]] = None,
              config: Optional[SuiteConfig] = None) -> SuiteReport:
    """Load a manifest if needed and run it"""
    if not isinstance(manifest, Manifest):
        manifest = load_manifest(manifest)
    return SuiteRunner(corpus, config).run(manifest)


async def run_suite_async(manifest: Union[str, Path, Manifest], corpus: Optional[Sequence[Graph]] = None,
                          config: Optional[SuiteConfig] = None) -> SuiteReport:
    if not isinstance(manifest, Manifest):
        manifest = load_manifest(manifest)
    return await SuiteRunner(corpus, config).run_async(manifest)


__all__ = [
    'SuiteConfig', 'SuiteRunner', 'run_suite', 'run_suite_async',
    'load_manifest', 'shipped_manifests', 'graph_from_spec',
]
