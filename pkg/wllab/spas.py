"""
wllab Schemes - Arc-Level Refinement Schemes and Their Comparison

Graded families of arc partitions converging to the orbit partition:
- spas_apply: pr_2 of the arity-k fixed point started from atomic types
- ep: the Evdokimov-Ponomarenko construction via arity-2 WL on V^k
- sch_oracle: orbit partition by brute-force automorphism enumeration
- distinguishes, dominance reports, axiom checks and convergence levels
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .automorphism import orbit_partition
from .coherent import CoherentConfiguration, intersection_numbers
from .config import settings
from .exceptions import CapExceededError, ValidationError
from .fields import FieldSpec, Q
from .generators import disjoint_union, graph_name
from .partition import (
    Comparison, Graph, LabelledPartition, atomic_types, canonical_labels, check_tuple_cap, compare,
    project_partition, radix_weights, tuple_coordinates,
)
from .refine import OperatorFamily, OperatorSpec, fixed_point
from .schemas import DominanceReport, PairVerdict

logger = logging.getLogger(__name__)

REFINING = (Comparison.EQUIVALENT, Comparison.FINER_RIGHT)


# =============================================================================
# SCHEME IDENTIFIERS
# =============================================================================

class SpasFamily(str, Enum):
    WL = "wl"
    C = "c"
    IM = "im"
    IMT = "imt"
    IMR = "imr"
    EP = "ep"


@dataclass(frozen=True)
class SpasId:
    """A refinement scheme: operator family with its parameters"""
    family: SpasFamily
    r: int = 1
    field: FieldSpec = Q

    def __post_init__(self):
        object.__setattr__(self, "family", SpasFamily(self.family))
        object.__setattr__(self, "field", FieldSpec.parse(self.field))
        if self.r < 1:
            raise ValidationError("scheme parameter r must be at least 1", field="r", value=self.r)
        if self.r != 1 and self.family not in (SpasFamily.WL, SpasFamily.C, SpasFamily.IMR):
            raise ValidationError(f"{self.family.value} takes no r", field="r", value=self.r)

    @classmethod
    def parse(cls, text: Union[str, "SpasId"]) -> "SpasId":
        """
        Parse 'family[,r=R][,field=F]', e.g. 'wl', 'c,r=2', 'im,field=gf:2'
        """
        if isinstance(text, SpasId):
            return text
        family, *options = [part.strip() for part in str(text).split(",")]
        kwargs: Dict[str, object] = {}
        for option in options:
            key, _, value = option.partition("=")
            if key == "r":
                kwargs["r"] = int(value)
            elif key == "field":
                kwargs["field"] = value
            else:
                raise ValidationError(f"unknown scheme option {key!r}", field="spas", value=text)
        try:
            return cls(SpasFamily(family.lower()), **kwargs)
        except ValueError as e:
            raise ValidationError(f"unknown scheme {text!r}", field="spas", value=text) from e

    def operator(self, k: int) -> OperatorSpec:
        if self.family == SpasFamily.EP:
            raise ValidationError("ep has no arity-k operator", field="family")
        return OperatorSpec(OperatorFamily(self.family.value), k, self.r, self.field)

    @property
    def label(self) -> str:
        text = self.family.value.upper()
        if self.r != 1:
            text += f"_r{self.r}"
        if self.family in (SpasFamily.IM, SpasFamily.IMT, SpasFamily.IMR):
            text += f"({self.field.label})"
        return text

    def __str__(self):
        return self.label


# =============================================================================
# APPLICATION
# =============================================================================

def spas_apply(s: Union[SpasId, str], g: Graph, k: int) -> LabelledPartition:
    """
    Level k of a scheme on a graph

    k = 1 is the arc partition of g; otherwise pr_2 of the fixed point of the
    family's arity-k operator started from the atomic types. Every level is a
    plain arc partition with the scheme, level and iteration count in metadata.
    """
    s = SpasId.parse(s)
    if k < 1:
        raise ValidationError("scheme level must be at least 1", field="k", value=k)
    if s.family == SpasFamily.EP:
        c = ep(g, k)
        return LabelledPartition(g.n, 2, c.rho.colours, {"spas": s.label, "k": k, "iterations": c.metadata.get("iterations", 0)})
    if k == 1:
        return LabelledPartition(g.n, 2, g.colours.copy(), {"spas": s.label, "k": 1, "iterations": 0})
    result = fixed_point(s.operator(k), atomic_types(g, k))
    out = project_partition(result.partition, 2)
    out.metadata.update({"spas": s.label, "k": k, "iterations": result.iterations})
    return out


def _delta_marked(g: Graph, k: int) -> LabelledPartition:
    """P^(k): coordinatewise arc colours on (V^k)^2 with a marker on constant diagonal pairs"""
    n = g.n
    size = n ** k
    coords = tuple_coordinates(n, k)
    arcs = g.as_array()
    columns = [arcs[coords[:, i][:, None], coords[:, i][None, :]].reshape(-1) for i in range(k)]
    constant = np.zeros((size, size), dtype=np.int64)
    diagonal = np.arange(n) * int(radix_weights(n, k).sum())
    constant[diagonal, diagonal] = 1
    columns.append(constant.reshape(-1))
    return LabelledPartition(size, 2, canonical_labels(np.stack(columns, axis=1)))


def ep(g: Graph, k: int, cap_n: Optional[int] = None, cap_k: Optional[int] = None) -> CoherentConfiguration:
    """
    Evdokimov-Ponomarenko configuration at level k

    The marked coordinatewise colouring of (V^k)^2 is stabilized by arity-2 WL
    on the vertex set V^k and pulled back to V along u -> (u, ..., u).

    Raises:
        CapExceededError: n or k above CAP_EP_N / CAP_EP_K
    """
    cap_n = settings.cap("ep_n", cap_n)
    cap_k = settings.cap("ep_k", cap_k)
    if k < 1:
        raise ValidationError("ep level must be at least 1", field="k", value=k)
    if g.n > cap_n:
        raise CapExceededError("ep vertex count above cap", cap_name="ep_n", cap=cap_n, requested=g.n)
    if k > cap_k:
        raise CapExceededError("ep level above cap", cap_name="ep_k", cap=cap_k, requested=k)
    check_tuple_cap(g.n, 2 * k)

    marked = _delta_marked(g, k)
    stable = fixed_point(OperatorSpec(OperatorFamily.WL, 2), marked)
    hat = stable.partition.as_array()
    constant = np.arange(g.n) * int(radix_weights(g.n, k).sum())
    loops = np.diagonal(hat)
    diagonal_cells = bool(not np.isin(loops[constant], np.delete(loops, constant)).any())
    pulled = LabelledPartition(g.n, 2, hat[np.ix_(constant, constant)].reshape(-1))
    result = intersection_numbers(Graph.from_partition(pulled))
    if not isinstance(result, CoherentConfiguration):
        raise ValidationError("ep pull-back is not coherent", field="g", value=graph_name(g))
    result.metadata.update({
        "k": k,
        "iterations": stable.iterations,
        "lifted_classes": stable.partition.class_count,
        "diagonal_union_of_cells": diagonal_cells,
    })
    logger.info(f"ep k={k} on {graph_name(g)}: {result.colour_count} colours")
    return result


def sch_oracle(g: Graph, k: int, cap: Optional[int] = None) -> LabelledPartition:
    """Orbits of Aut(g) on V^k; n is limited by CAP_BRUTE_FORCE"""
    return orbit_partition(g, k, cap)


# =============================================================================
# DISTINGUISHING AND DOMINANCE
# =============================================================================

def distinguishes(s: Union[SpasId, str], k: int, g: Graph, h: Graph) -> bool:
    """
    Whether level k tells g and h apart

    Runs once on the disjoint union and compares the arc colour multisets of
    the two sides.
    """
    union = disjoint_union(g, h)
    arcs = spas_apply(s, union, k).as_array()
    left = Counter(arcs[: g.n, : g.n].reshape(-1).tolist())
    right = Counter(arcs[g.n:, g.n:].reshape(-1).tolist())
    outcome = left != right
    logger.debug(f"{SpasId.parse(s).label} level {k} on {graph_name(g)} vs {graph_name(h)}: {outcome}")
    return outcome


Pair = Tuple[SpasId, int, SpasId, int]


def pair_label(pair: Pair) -> Tuple[str, str]:
    left, k, right, k2 = pair
    return f"{SpasId.parse(left).label}_{k}", f"{SpasId.parse(right).label}_{k2}"


def compare_pair(g: Graph, pair: Pair) -> Comparison:
    """compare(left_k(g), right_k'(g)); FinerRight means the right side refines"""
    left, k, right, k2 = pair
    return compare(spas_apply(left, g, k), spas_apply(right, g, k2))


def assemble_dominance(corpus_id: str, names: Sequence[str], pairs: Sequence[Pair],
                       outcomes: Dict[Tuple[int, str], Comparison]) -> DominanceReport:
    """
    Build a report from per-(pair, graph) outcomes in corpus order

    A pair is consistent with left ⪯ right iff no graph gives FinerLeft or
    Incomparable.
    """
    verdicts = []
    for index, pair in enumerate(pairs):
        left, right = pair_label(pair)
        per_graph = {name: Comparison(outcomes[(index, name)]).value for name in names}
        counterexample = next((name for name in names if Comparison(per_graph[name]) not in REFINING), None)
        if counterexample is None:
            verdict = f"no counterexample to {left} ⪯ {right} on {corpus_id}"
        else:
            verdict = f"counterexample to {left} ⪯ {right} at {counterexample}: {per_graph[counterexample]}"
        verdicts.append(PairVerdict(
            left=left, right=right, outcomes=per_graph,
            consistent=counterexample is None, counterexample=counterexample, verdict=verdict,
        ))
    return DominanceReport(corpus=corpus_id, graphs=list(names), pairs=verdicts)


def dominance_report(corpus: Sequence[Graph], pairs: Sequence[Pair], corpus_id: str = "corpus") -> DominanceReport:
    """Compare each pair of scheme levels on every corpus graph"""
    names = [graph_name(g) for g in corpus]
    outcomes = {
        (index, name): compare_pair(g, pair)
        for index, pair in enumerate(pairs)
        for name, g in zip(names, corpus)
    }
    report = assemble_dominance(corpus_id, names, pairs, outcomes)
    logger.info(f"dominance on {corpus_id}: {sum(p.consistent for p in report.pairs)}/{len(pairs)} pairs consistent")
    return report


# =============================================================================
# AXIOMS
# =============================================================================

@dataclass
class AxiomReport:
    """Chain, idempotence and convergence checks of one scheme on one graph"""
    spas: str
    graph: str
    chain: Dict[int, str] = field(default_factory=dict)
    idempotence: Dict[str, str] = field(default_factory=dict)
    sch: Optional[str] = None

    @property
    def chain_ok(self) -> bool:
        return all(Comparison(v) in REFINING for v in self.chain.values())

    @property
    def idempotence_ok(self) -> bool:
        return all(v == Comparison.EQUIVALENT.value for v in self.idempotence.values())

    @property
    def sch_ok(self) -> bool:
        return self.sch == Comparison.EQUIVALENT.value

    @property
    def ok(self) -> bool:
        return self.chain_ok and self.idempotence_ok and self.sch_ok

    def to_dict(self) -> Dict[str, object]:
        return {
            "spas": self.spas, "graph": self.graph, "chain": self.chain,
            "idempotence": self.idempotence, "sch": self.sch, "ok": self.ok,
        }


def _check_axiom_size(g: Graph, max_level: int) -> None:
    cap = settings.CAP_BRUTE_FORCE
    if g.n > cap:
        raise CapExceededError("axiom check needs the orbit oracle", cap_name="brute_force", cap=cap, requested=g.n)
    check_tuple_cap(g.n, max_level)


def spas_axiom_check(s: Union[SpasId, str], g: Graph, max_level: Optional[int] = None) -> AxiomReport:
    """
    Monotone chain X_1 ⪯ ... ⪯ X_n, idempotence X_l(X_m(g)) ≈ X_m(g) for
    l <= m <= n, and X_n(g) ≈ Sch(g) on arcs
    """
    s = SpasId.parse(s)
    top = max_level or g.n
    _check_axiom_size(g, top)
    levels = {k: spas_apply(s, g, k) for k in range(1, top + 1)}
    report = AxiomReport(spas=s.label, graph=graph_name(g))
    for k in range(1, top):
        report.chain[k] = compare(levels[k], levels[k + 1]).value
    for m in range(1, top + 1):
        stabilized = Graph.from_partition(levels[m])
        for l in range(1, m + 1):
            report.idempotence[f"{l},{m}"] = compare(spas_apply(s, stabilized, l), levels[m]).value
    report.sch = compare(levels[top], sch_oracle(g, 2)).value
    logger.info(f"axioms of {s.label} on {report.graph}: {'ok' if report.ok else 'violated'}")
    return report


def convergence_level(s: Union[SpasId, str], g: Graph, max_level: Optional[int] = None) -> int:
    """Smallest k with spas_apply(s, g, k) ≈ Sch(g) on arcs"""
    s = SpasId.parse(s)
    top = max_level or g.n
    _check_axiom_size(g, top)
    orbits = sch_oracle(g, 2)
    for k in range(1, top + 1):
        if compare(spas_apply(s, g, k), orbits) == Comparison.EQUIVALENT:
            return k
    raise ValidationError(f"{s.label} does not reach the orbit partition by level {top}", field="max_level", value=top)


__all__ = [
    'SpasFamily', 'SpasId', 'Pair', 'AxiomReport',
    'spas_apply', 'ep', 'sch_oracle', 'distinguishes',
    'pair_label', 'compare_pair', 'assemble_dominance', 'dominance_report',
    'spas_axiom_check', 'convergence_level',
]
