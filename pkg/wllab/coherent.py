"""
wllab Coherent - Coherent Configurations and Coherent Algebras

Validation and structure of stable arc colourings:
- Rainbow conditions and intersection numbers p[σ][τ][κ]
- Cells and restriction to unions of cells
- Standard 0-1 bases of coherent algebras with closure checks
- Algebraic isomorphism by pruned backtracking over colour bijections
- Radical support and semisimplicity over a chosen field
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from .config import settings
from .exceptions import (
    CapExceededError, ClosureViolationError, NotRainbowError, ShapeMismatchError, ValidationError,
)
from .fields import FieldMatrix, FieldSpec, Q, matrix_rank
from .partition import (
    Graph, LabelledPartition, RainbowReport, VertexTuple, canonical_labels, is_function,
    rainbow_report,
)
from .refine import OperatorFamily, OperatorSpec, fixed_point

logger = logging.getLogger(__name__)


# =============================================================================
# CONFIGURATIONS
# =============================================================================

@dataclass(frozen=True, eq=False)
class CoherentConfiguration:
    """A rainbow with constant triangle counts, its intersection numbers and cells"""
    rho: Graph
    intersection: np.ndarray
    cells: Tuple[FrozenSet[int], ...]
    verified: bool = True
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.rho.n

    @property
    def colour_count(self) -> int:
        return self.rho.class_count

    def p(self, sigma: int, tau: int, kappa: int) -> int:
        return int(self.intersection[sigma, tau, kappa])

    def class_sizes(self) -> List[int]:
        return self.rho.class_sizes()

    def loop_colours(self) -> List[int]:
        return self.rho.loop_colours()

    def transpose_map(self) -> Dict[int, int]:
        arr = self.rho.as_array()
        return {int(a): int(b) for a, b in zip(arr.reshape(-1), arr.T.reshape(-1))}

    def adjacency_matrices(self, f: FieldSpec = Q) -> List[FieldMatrix]:
        """A_σ for every colour σ in colour order"""
        arr = self.rho.as_array()
        return [FieldMatrix(f, (arr == sigma).astype(np.int64)) for sigma in range(self.colour_count)]

    def __repr__(self):
        return f"CoherentConfiguration(n={self.n}, colours={self.colour_count}, cells={len(self.cells)})"


@dataclass
class NotCoherent:
    """Two κ-arcs with different counts of (σ, τ) paths"""
    sigma: int
    tau: int
    kappa: int
    witness: Tuple[VertexTuple, VertexTuple]
    counts: Tuple[int, int]

    def __bool__(self):
        return False


def validate_rainbow(g: LabelledPartition) -> RainbowReport:
    """Check the diagonal and transpose conditions of a rainbow"""
    return rainbow_report(g)


def _as_graph(g: LabelledPartition) -> Graph:
    if isinstance(g, Graph):
        return g
    report = rainbow_report(g)
    if not report:
        raise NotRainbowError("arc partition is not a rainbow", condition=report.violation, witness=report.witness)
    return Graph.from_partition(g)


def _cells_of(graph: Graph) -> Tuple[FrozenSet[int], ...]:
    diagonal = np.diagonal(graph.as_array())
    order = canonical_labels(diagonal)
    groups: Dict[int, Set[int]] = {}
    for vertex, colour in enumerate(order.tolist()):
        groups.setdefault(colour, set()).add(vertex)
    return tuple(frozenset(groups[c]) for c in sorted(groups))


def intersection_numbers(g: LabelledPartition, verify: bool = True) -> Union[CoherentConfiguration, NotCoherent]:
    """
    Intersection numbers of a rainbow

    Args:
        g: Arc partition satisfying the rainbow conditions
        verify: Check every arc; False reads one representative arc per colour
            and is unsound on non-coherent input

    Returns:
        CoherentConfiguration, or NotCoherent with a witness pair of arcs
    """
    graph = _as_graph(g)
    n, m = graph.n, graph.class_count
    colours = graph.colours
    onehot = np.stack([(graph.as_array() == s).astype(np.int64) for s in range(m)])

    order = np.argsort(colours, kind="stable")
    starts = np.searchsorted(colours[order], np.arange(m))
    representatives = order[starts]
    table = np.zeros((m, m, m), dtype=np.int64)

    for sigma in range(m):
        counts = np.matmul(onehot[sigma], onehot).reshape(m, n * n)
        if not verify:
            table[sigma] = counts[:, representatives]
            continue
        ordered = counts[:, order]
        mins = np.minimum.reduceat(ordered, starts, axis=1)
        maxs = np.maximum.reduceat(ordered, starts, axis=1)
        bad = np.argwhere(mins != maxs)
        if bad.size:
            tau, kappa = (int(x) for x in bad[0])
            arcs = np.nonzero(colours == kappa)[0]
            values = counts[tau, arcs]
            other = arcs[np.nonzero(values != values[0])[0][0]]
            first = arcs[0]
            witness = (divmod(int(first), n), divmod(int(other), n))
            logger.debug(f"not coherent at sigma={sigma} tau={tau} kappa={kappa}")
            return NotCoherent(
                sigma, tau, kappa,
                (tuple(witness[0]), tuple(witness[1])),
                (int(counts[tau, first]), int(counts[tau, other])),
            )
        table[sigma] = mins

    if not verify:
        logger.warning("intersection numbers read from representatives only; result is unverified")
    table.setflags(write=False)
    return CoherentConfiguration(graph, table, _cells_of(graph), verified=verify)


def cells(c: CoherentConfiguration) -> List[FrozenSet[int]]:
    """Loop-colour classes of the configuration"""
    return list(c.cells)


def restrict(c: CoherentConfiguration, vertices: Sequence[int]) -> CoherentConfiguration:
    """Restriction of the configuration to a union of cells"""
    chosen = sorted(set(int(v) for v in vertices))
    if not chosen:
        raise ValidationError("restriction needs a non-empty vertex set", field="vertices")
    chosen_set = set(chosen)
    for cell in c.cells:
        if cell & chosen_set and not cell <= chosen_set:
            raise ValidationError("vertex set is not a union of cells", field="vertices", value=sorted(cell))
    if not chosen_set <= set(range(c.n)):
        raise ValidationError("vertex out of range", field="vertices", value=max(chosen))
    sub = c.rho.as_array()[np.ix_(chosen, chosen)]
    graph = Graph.from_matrix(sub, names=c.rho.colour_names, metadata={"restricted_from": c.n})
    result = intersection_numbers(graph)
    if not isinstance(result, CoherentConfiguration):
        raise ValidationError("restriction is not coherent", field="vertices")
    return result


def verify_adjacency_algebra(c: CoherentConfiguration, f: FieldSpec = Q) -> bool:
    """A_σ A_τ = Σ_κ p[σ][τ][κ] A_κ for all σ, τ, exactly over f"""
    m = c.colour_count
    mats = c.adjacency_matrices(f)
    for sigma, tau in itertools.product(range(m), repeat=2):
        expected = FieldMatrix.zeros(f, c.n)
        for kappa in range(m):
            coefficient = c.p(sigma, tau, kappa)
            if coefficient:
                expected = expected + mats[kappa].scale(coefficient)
        if mats[sigma] @ mats[tau] != expected:
            logger.debug(f"adjacency law fails at sigma={sigma} tau={tau} over {f.label}")
            return False
    return True


# =============================================================================
# STANDARD BASIS
# =============================================================================

@dataclass(frozen=True)
class StandardBasis:
    """0-1 basis of a coherent algebra, ordered by first arc"""
    field: FieldSpec
    matrices: Tuple[FieldMatrix, ...]
    partition: LabelledPartition

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)


def _entry_labels(arrays: Sequence[np.ndarray]) -> np.ndarray:
    ids: Dict[Tuple, int] = {}
    n = arrays[0].shape[0]
    flat = [a.reshape(-1).tolist() for a in arrays]
    labels = [ids.setdefault(tuple(column), len(ids)) for column in zip(*flat)]
    return np.array(labels, dtype=np.int64).reshape(n, n)


def standard_basis(mats: Sequence[FieldMatrix]) -> StandardBasis:
    """
    Standard basis of the coherent algebra spanned by mats

    Arcs are grouped by their joint entry vector across mats. The indicator
    matrices must be in the span, satisfy the coherence conditions and be
    closed under products.

    Raises:
        ClosureViolationError: mats do not span a coherent algebra
    """
    mats = list(mats)
    if not mats:
        raise ValidationError("standard basis needs at least one matrix", field="mats")
    f = mats[0].field
    n = mats[0].rows
    for m in mats:
        if m.field != f or m.shape != (n, n):
            raise ShapeMismatchError("matrices differ in field or shape", left=(f.label, n), right=(m.field.label, m.shape))

    labels = _entry_labels([m.data for m in mats])
    partition = LabelledPartition(n, 2, labels.reshape(-1))
    arr = partition.as_array()
    count = partition.class_count

    diagonal = set(np.diagonal(arr).tolist())
    off = set(arr[~np.eye(n, dtype=bool)].tolist())
    if diagonal & off:
        raise ClosureViolationError("no subset of the basis sums to the identity", condition="identity")
    if not is_function(partition.colours, arr.T.reshape(-1)):
        raise ClosureViolationError("basis is not closed under transpose", condition="transpose")

    span_rank = matrix_rank(f, np.stack([m.data.reshape(-1) for m in mats]))
    if count > span_rank:
        raise ClosureViolationError(
            f"{count} indicator matrices exceed the span dimension {span_rank}", condition="span",
        )

    indicators = [FieldMatrix(f, (arr == c).astype(np.int64)) for c in range(count)]
    for a, b in itertools.product(indicators, repeat=2):
        product = a @ b
        if not is_function(partition.colours, _entry_labels([product.data]).reshape(-1)):
            raise ClosureViolationError("span is not closed under matrix product", condition="product")
    return StandardBasis(f, tuple(indicators), partition)


# =============================================================================
# ALGEBRAIC ISOMORPHISM
# =============================================================================

def _colour_profiles(c: CoherentConfiguration) -> List[Tuple]:
    sizes = c.class_sizes()
    loops = set(c.loop_colours())
    transpose = c.transpose_map()
    p = c.intersection
    return [
        (
            sizes[s], s in loops, transpose[s] == s,
            tuple(sorted(p[s].reshape(-1).tolist())),
            tuple(sorted(p[:, s].reshape(-1).tolist())),
            tuple(sorted(p[:, :, s].reshape(-1).tolist())),
        )
        for s in range(c.colour_count)
    ]


def algebraic_isomorphism(c1: CoherentConfiguration, c2: CoherentConfiguration,
                          cap: Optional[int] = None) -> Optional[Dict[int, int]]:
    """
    Colour bijection φ with p[σ][τ][κ] = q[φσ][φτ][φκ], or None

    Candidates are pruned by class size, loop type, self-pairing and the
    sorted slices of the intersection table; φ commutes with transposition.
    """
    m = c1.colour_count
    if m != c2.colour_count or c1.n != c2.n:
        return None
    limit = settings.cap("colours", cap)
    if m > limit:
        raise CapExceededError("too many colours for algebraic isomorphism search", cap_name="CAP_COLOURS", cap=limit, requested=m)

    profiles1 = _colour_profiles(c1)
    profiles2 = _colour_profiles(c2)
    if sorted(profiles1) != sorted(profiles2):
        return None
    candidates = {s: [t for t in range(m) if profiles2[t] == profiles1[s]] for s in range(m)}
    order = sorted(range(m), key=lambda s: (len(candidates[s]), s))
    t1, t2 = c1.transpose_map(), c2.transpose_map()
    p, q = c1.intersection, c2.intersection
    mapping: Dict[int, int] = {}
    used: Set[int] = set()

    def consistent() -> bool:
        domain = list(mapping)
        image = [mapping[s] for s in domain]
        return np.array_equal(p[np.ix_(domain, domain, domain)], q[np.ix_(image, image, image)])

    def search(position: int) -> bool:
        if position == m:
            return True
        sigma = order[position]
        if sigma in mapping:
            return search(position + 1)
        for target in candidates[sigma]:
            if target in used:
                continue
            added = [(sigma, target)]
            partner, partner_target = t1[sigma], t2[target]
            if partner != sigma:
                if partner in mapping:
                    if mapping[partner] != partner_target:
                        continue
                elif partner_target in used or partner_target == target:
                    continue
                else:
                    added.append((partner, partner_target))
            elif partner_target != target:
                continue
            for s, t in added:
                mapping[s] = t
                used.add(t)
            if consistent() and search(position + 1):
                return True
            for s, t in added:
                del mapping[s]
                used.discard(t)
        return False

    if search(0):
        return dict(sorted(mapping.items()))
    return None


# =============================================================================
# RADICAL AND SEMISIMPLICITY
# =============================================================================

class Semisimplicity(str, Enum):
    GUARANTEED = "Guaranteed"
    UNKNOWN = "Unknown"


def radical_support(c: CoherentConfiguration, p: int) -> Set[int]:
    """Colours whose class size is divisible by p"""
    f = FieldSpec.parse(f"gf:{p}")
    return {s for s, size in enumerate(c.class_sizes()) if size % f.p == 0}


def is_semisimple_guaranteed(c: CoherentConfiguration, f: FieldSpec) -> Semisimplicity:
    """Guaranteed in characteristic 0 or above the vertex count; no claim otherwise"""
    if f.characteristic == 0 or f.characteristic > c.n:
        return Semisimplicity.GUARANTEED
    return Semisimplicity.UNKNOWN


# =============================================================================
# CLOSURE
# =============================================================================

def coherent_closure(g: LabelledPartition) -> CoherentConfiguration:
    """Arity-2 Weisfeiler-Leman stabilization of a rainbow as a verified configuration"""
    graph = _as_graph(g)
    stable = fixed_point(OperatorSpec(OperatorFamily.WL, 2), graph).partition
    result = intersection_numbers(Graph.from_partition(stable))
    if not isinstance(result, CoherentConfiguration):
        raise ValidationError("stabilized partition is not coherent", field="g")
    return result


__all__ = [
    'CoherentConfiguration', 'NotCoherent', 'StandardBasis', 'Semisimplicity',
    'validate_rainbow', 'intersection_numbers', 'cells', 'restrict', 'verify_adjacency_algebra',
    'standard_basis', 'algebraic_isomorphism', 'radical_support', 'is_semisimple_guaranteed',
    'coherent_closure',
]
