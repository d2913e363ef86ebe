"""
wllab Refinement Operators - Weisfeiler-Leman, Counting and Invertible-Map Steps

Synchronous refinement rounds on dense labelled partitions:
- WL_{k,r}: old colour plus the multiset of substitution colour vectors
- C_{k,r}: old colour plus one colour multiset per index vector
- IM_k^F, IMt_k^F, IM_{k,r}^F: old colour plus simultaneous-similarity classes
  of χ-matrix tuples over an exact field
- Generic fixed-point driver, stability predicates and the hat extension
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import NotGraphLikeError, ValidationError
from .fields import FieldMatrix, FieldSpec, Q, intertwiner_space, matrix_rank, simultaneously_similar
from .partition import (
    LabelledPartition, canonical_labels, check_tuple_cap, distinct_index_vectors, is_graph_like,
    radix_weights, tuple_coordinates, tuple_index,
)

logger = logging.getLogger(__name__)


# =============================================================================
# OPERATOR SPECIFICATION
# =============================================================================

class OperatorFamily(str, Enum):
    WL = "wl"
    C = "c"
    IM = "im"
    IMT = "imt"
    IMR = "imr"


@dataclass(frozen=True)
class OperatorSpec:
    """One refinement operator: family, arity k, substitution arity r and field"""
    family: OperatorFamily
    k: int
    r: int = 1
    field: FieldSpec = Q

    def __post_init__(self):
        object.__setattr__(self, "family", OperatorFamily(self.family))
        object.__setattr__(self, "field", FieldSpec.parse(self.field))
        if self.k < 1:
            raise ValidationError("operator arity must be at least 1", field="k", value=self.k)
        if self.r < 1:
            raise ValidationError("substitution arity must be at least 1", field="r", value=self.r)
        if self.family in (OperatorFamily.IM, OperatorFamily.IMT) and self.r != 1:
            raise ValidationError("im and imt take r = 1; use imr", field="r", value=self.r)

    @property
    def is_identity(self) -> bool:
        if self.family in (OperatorFamily.WL, OperatorFamily.C):
            return self.k <= self.r
        if self.family == OperatorFamily.IMR:
            return self.k <= 2 * self.r
        return self.k <= 2

    @property
    def uses_field(self) -> bool:
        return self.family in (OperatorFamily.IM, OperatorFamily.IMT, OperatorFamily.IMR)

    def with_k(self, k: int) -> "OperatorSpec":
        return OperatorSpec(self.family, k, self.r, self.field)

    @property
    def label(self) -> str:
        parts = [self.family.value, f"k={self.k}"]
        if self.r != 1 or self.family in (OperatorFamily.WL, OperatorFamily.C, OperatorFamily.IMR):
            parts.append(f"r={self.r}")
        if self.uses_field:
            parts.append(f"field={self.field.label}")
        return " ".join(parts)


@dataclass
class FixedPointResult:
    """Stable partition reached by iterating one operator"""
    partition: LabelledPartition
    iterations: int
    history: List[int]
    spec: OperatorSpec
    identity: bool = False
    metadata: Dict[str, object] = field(default_factory=dict)


# =============================================================================
# SUBSTITUTION INDEXING
# =============================================================================

def substitution_indices(n: int, k: int, positions: Sequence[int]) -> np.ndarray:
    """
    Indices of v<i, x> for every v in V^k and x in V^r

    Args:
        n: Vertex count
        k: Tuple arity
        positions: Distinct 1-based positions i, length r

    Returns:
        (n^k, n^r) int64 array; column order is lexicographic in x
    """
    weights = radix_weights(n, k)
    coords = tuple_coordinates(n, k)
    zero_based = [p - 1 for p in positions]
    replaced = coords[:, zero_based] @ weights[zero_based]
    inserted = tuple_coordinates(n, len(positions)) @ weights[zero_based]
    base = np.arange(n ** k, dtype=np.int64) - replaced
    return base[:, None] + inserted[None, :]


# =============================================================================
# COMBINATORIAL STEPS
# =============================================================================

def wl_step(g: LabelledPartition, r: int = 1) -> LabelledPartition:
    """
    One WL_{k,r} round

    New colour of v: old colour and the multiset over x in V^r of the vector
    (g(v<i, x>)) for i in [k]^(r). Identity when k <= r.
    """
    k, n = g.arity, g.n
    if k <= r:
        return g
    vectors = np.stack(
        [g.colours[substitution_indices(n, k, idx)] for idx in distinct_index_vectors(k, r)],
        axis=2,
    )
    size, width = vectors.shape[0], vectors.shape[1]
    vector_ids = canonical_labels(vectors.reshape(size * width, -1)).reshape(size, width)
    vector_ids.sort(axis=1)
    signature = np.concatenate([g.colours[:, None], vector_ids], axis=1)
    out = LabelledPartition(n, k, canonical_labels(signature))
    logger.debug(f"wl_step k={k} r={r}: {g.class_count} -> {out.class_count} classes")
    return out


def c_step(g: LabelledPartition, r: int = 1) -> LabelledPartition:
    """
    One C_{k,r} round

    New colour of v: old colour and, for each i in [k]^(r), the multiset of
    g(v<i, x>) over x in V^r. Identity when k <= r.
    """
    k, n = g.arity, g.n
    if k <= r:
        return g
    blocks = [g.colours[:, None]]
    for idx in distinct_index_vectors(k, r):
        multiset = g.colours[substitution_indices(n, k, idx)]
        multiset.sort(axis=1)
        blocks.append(multiset)
    out = LabelledPartition(n, k, canonical_labels(np.concatenate(blocks, axis=1)))
    logger.debug(f"c_step k={k} r={r}: {g.class_count} -> {out.class_count} classes")
    return out


# =============================================================================
# INVERTIBLE-MAP STEPS
# =============================================================================

def colour_matrices(g: LabelledPartition, positions: Sequence[int]) -> np.ndarray:
    """
    Colour of v<i, x.y> arranged as an (n^k, n^r, n^r) array

    Args:
        positions: Distinct 1-based positions of length 2r; the first r take x,
            the last r take y
    """
    n, k = g.n, g.arity
    r = len(positions) // 2
    side = n ** r
    return g.colours[substitution_indices(n, k, positions)].reshape(n ** k, side, side)


def _selector_tuple(mat: np.ndarray, f: FieldSpec) -> Tuple[Tuple[int, ...], List[FieldMatrix]]:
    selectors = np.unique(mat).tolist()
    return tuple(selectors), [FieldMatrix(f, (mat == s).astype(np.int64)) for s in selectors]


def _invariant_key(mat: np.ndarray, f: FieldSpec) -> Tuple:
    """Similarity invariants of the χ tuple of one colour matrix"""
    selectors, chis = _selector_tuple(mat, f)
    onehot = np.stack([(mat == s).astype(np.int64) for s in selectors])
    traces = np.einsum("sxy,tyx->st", onehot, onehot)
    if not f.is_rationals:
        traces = np.mod(traces, f.p)
    ranks = tuple(matrix_rank(f, chi.data) for chi in chis)
    centralizer = len(intertwiner_space(chis, chis))
    return selectors, ranks, tuple(traces.reshape(-1).tolist()), centralizer


def similarity_classes(mats: np.ndarray, old: np.ndarray, f: FieldSpec) -> np.ndarray:
    """
    Group tuples by old colour and simultaneous similarity of their χ tuples

    Args:
        mats: (N, d, d) selector ids; χ_s is the indicator of selector s
        old: (N,) old colours
        f: Field of similarity

    Returns:
        (N,) class ids, dense in order of first appearance
    """
    size = mats.shape[0]
    out = np.empty(size, dtype=np.int64)
    seen: Dict[Tuple[int, bytes], int] = {}
    representatives: Dict[Tuple, List[Tuple[int, List[FieldMatrix]]]] = {}
    next_class = 0
    for t in range(size):
        mat = np.ascontiguousarray(mats[t])
        fingerprint = (int(old[t]), mat.tobytes())
        if fingerprint in seen:
            out[t] = seen[fingerprint]
            continue
        invariants = _invariant_key(mat, f)
        key = (int(old[t]),) + invariants
        _, chis = _selector_tuple(mat, f)
        assigned = None
        for class_id, rep_chis in representatives.get(key, []):
            if simultaneously_similar(rep_chis, chis, centralizer_dim=invariants[-1]) is not None:
                assigned = class_id
                break
        if assigned is None:
            assigned = next_class
            next_class += 1
            representatives.setdefault(key, []).append((assigned, chis))
        seen[fingerprint] = assigned
        out[t] = assigned
    return out


def im_r_step(g: LabelledPartition, f: FieldSpec = Q, r: int = 1) -> LabelledPartition:
    """
    One IM_{k,r}^F round

    Tuples share a new colour iff their old colours agree and, for each
    i in [k]^(2r), the χ tuples (χ_{i,σ})_σ over V^r x V^r are simultaneously
    similar over f. Identity when k <= 2r.
    """
    k, n = g.arity, g.n
    if k <= 2 * r:
        return g
    f = FieldSpec.parse(f)
    blocks = [g.colours[:, None]]
    for idx in distinct_index_vectors(k, 2 * r):
        blocks.append(similarity_classes(colour_matrices(g, idx), g.colours, f)[:, None])
    out = LabelledPartition(n, k, canonical_labels(np.concatenate(blocks, axis=1)))
    logger.debug(f"im_step k={k} r={r} over {f.label}: {g.class_count} -> {out.class_count} classes")
    return out


def im_step(g: LabelledPartition, f: FieldSpec = Q) -> LabelledPartition:
    """One IM_k^F round; identity when k <= 2"""
    return im_r_step(g, f, 1)


def imt_step(g: LabelledPartition, f: FieldSpec = Q) -> LabelledPartition:
    """
    One IMt_k^F round

    χ_φ selects the pairs (x, y) with g(v<i, (x, y)>) = φ_i for all i in
    [k]^(2); one witness must conjugate every χ_φ at once. Identity when k <= 2.
    """
    k, n = g.arity, g.n
    if k <= 2:
        return g
    f = FieldSpec.parse(f)
    stacked = np.stack([colour_matrices(g, idx) for idx in distinct_index_vectors(k, 2)], axis=3)
    vector_ids = canonical_labels(stacked.reshape(-1, stacked.shape[3])).reshape(n ** k, n, n)
    classes = similarity_classes(vector_ids, g.colours, f)
    out = LabelledPartition(n, k, canonical_labels(np.stack([g.colours, classes], axis=1)))
    logger.debug(f"imt_step k={k} over {f.label}: {g.class_count} -> {out.class_count} classes")
    return out


def chi_matrices(g: LabelledPartition, v: Sequence[int], idx: Optional[Sequence[int]] = None,
                 f: FieldSpec = Q) -> Dict[object, FieldMatrix]:
    """
    χ-matrices of one base tuple

    Args:
        g: Partition of V^k
        v: Base tuple
        idx: Distinct positions of even length 2r selecting χ_{i,σ}; None selects
            the colour-vector matrices χ_φ over i in [k]^(2)
        f: Field of the entries

    Returns:
        Mapping from colour σ (or colour vector φ) to its 0-1 matrix
    """
    f = FieldSpec.parse(f)
    t = tuple_index(v, g.n)
    if idx is not None:
        idx = tuple(idx)
        if len(idx) % 2 or len(set(idx)) != len(idx):
            raise ValidationError("χ positions must be distinct and of even length", field="idx", value=idx)
        mat = colour_matrices(g, idx)[t]
        return {int(s): FieldMatrix(f, (mat == s).astype(np.int64)) for s in np.unique(mat).tolist()}
    stacked = np.stack([colour_matrices(g, i)[t] for i in distinct_index_vectors(g.arity, 2)], axis=2)
    out: Dict[object, FieldMatrix] = {}
    flat = stacked.reshape(-1, stacked.shape[2])
    for phi in sorted(set(map(tuple, flat.tolist()))):
        mask = np.all(stacked == np.array(phi), axis=2)
        out[phi] = FieldMatrix(f, mask.astype(np.int64))
    return out


# =============================================================================
# DISPATCH AND FIXED POINTS
# =============================================================================

def apply_step(spec: OperatorSpec, g: LabelledPartition) -> LabelledPartition:
    """Apply one round of the operator described by spec"""
    if g.arity != spec.k:
        raise ValidationError(
            f"partition arity {g.arity} does not match operator arity {spec.k}", field="k", value=spec.k,
        )
    family = spec.family
    if family == OperatorFamily.WL:
        return wl_step(g, spec.r)
    if family == OperatorFamily.C:
        return c_step(g, spec.r)
    if family == OperatorFamily.IM:
        return im_step(g, spec.field)
    if family == OperatorFamily.IMT:
        return imt_step(g, spec.field)
    return im_r_step(g, spec.field, spec.r)


def fixed_point(spec: OperatorSpec, g: LabelledPartition,
                max_iterations: Optional[int] = None) -> FixedPointResult:
    """
    Iterate the operator until the class structure stops changing

    Every step refines its input, so an unchanged class count means the
    partition is stable.
    """
    if g.arity != spec.k:
        raise ValidationError(
            f"partition arity {g.arity} does not match operator arity {spec.k}", field="k", value=spec.k,
        )
    check_tuple_cap(g.n, g.arity)
    if spec.is_identity:
        return FixedPointResult(g, 0, [g.class_count], spec, identity=True)

    limit = max_iterations or g.size
    current = g
    history = [g.class_count]
    iterations = 0
    while True:
        refined = apply_step(spec, current)
        iterations += 1
        history.append(refined.class_count)
        if refined.class_count == current.class_count or iterations >= limit:
            break
        current = refined
    logger.info(f"fixed point of {spec.label} on n={g.n}: {refined.class_count} classes after {iterations} rounds")
    return FixedPointResult(refined, iterations, history, spec)


# =============================================================================
# STABILITY
# =============================================================================

def _unchanged(g: LabelledPartition, refined: LabelledPartition) -> bool:
    return refined.class_count == g.class_count


def is_wl_stable(g: LabelledPartition, r: int = 1) -> bool:
    """Counts of substitution colour vectors depend only on the class"""
    return _unchanged(g, wl_step(g, r))


def is_c_stable(g: LabelledPartition, r: int = 1) -> bool:
    """Per-index colour counts depend only on the class"""
    return _unchanged(g, c_step(g, r))


def is_im_stable(g: LabelledPartition, f: FieldSpec = Q) -> bool:
    """Class-equal tuples have simultaneously similar χ tuples for every index pair"""
    return _unchanged(g, im_step(g, f))


def is_imt_stable(g: LabelledPartition, f: FieldSpec = Q) -> bool:
    """Class-equal tuples have simultaneously similar colour-vector χ tuples"""
    return _unchanged(g, imt_step(g, f))


def is_imr_stable(g: LabelledPartition, f: FieldSpec = Q, r: int = 1) -> bool:
    return _unchanged(g, im_r_step(g, f, r))


def is_stable(spec: OperatorSpec, g: LabelledPartition) -> bool:
    """Stability predicate matching the operator"""
    return _unchanged(g, apply_step(spec, g))


# =============================================================================
# HAT EXTENSION
# =============================================================================

def hat_extension(g: LabelledPartition, verify: bool = False) -> LabelledPartition:
    """
    Extend a graph-like partition of V^k to V^{k+1}

    The colour of (v, w) is (g(v), g(v<1, w>), ..., g(v<k, w>)).

    Raises:
        NotGraphLikeError: g is not graph-like
        ValidationError: verify is set and g is not WL_k-stable
    """
    report = is_graph_like(g)
    if not report:
        raise NotGraphLikeError("hat extension needs a graph-like partition", violation=report.violation)
    if verify and not is_wl_stable(g, 1):
        raise ValidationError("hat extension input is not WL-stable", field="g")
    k, n = g.arity, g.n
    check_tuple_cap(n, k + 1)
    coords = tuple_coordinates(n, k + 1)
    weights = radix_weights(n, k)
    base = coords[:, :k] @ weights
    extra = coords[:, k]
    columns = [g.colours[base]]
    for j in range(k):
        columns.append(g.colours[base + (extra - coords[:, j]) * weights[j]])
    return LabelledPartition(n, k + 1, canonical_labels(np.stack(columns, axis=1)))


__all__ = [
    'OperatorFamily', 'OperatorSpec', 'FixedPointResult',
    'substitution_indices', 'colour_matrices', 'similarity_classes', 'chi_matrices',
    'wl_step', 'c_step', 'im_step', 'imt_step', 'im_r_step',
    'apply_step', 'fixed_point',
    'is_wl_stable', 'is_c_stable', 'is_im_stable', 'is_imt_stable', 'is_imr_stable', 'is_stable',
    'hat_extension',
]
