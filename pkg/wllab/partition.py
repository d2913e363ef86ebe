"""
wllab Partition Core - Tuples and Labelled Partitions

Dense labelled partitions of V^k and the tuple arithmetic they are built on:
- Tuple substitution, projection and concatenation (1-based positions)
- LabelledPartition stored as a flat colour array in mixed-radix tuple order
- Canonical colour ids assigned by first occurrence in lexicographic order
- Refinement comparison and the graph-like predicate suite
- Atomic types of a graph, r-projections and (V^k)^p reshaping
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .config import settings
from .exceptions import CapExceededError, NotRainbowError, ShapeMismatchError, ValidationError

logger = logging.getLogger(__name__)

VertexTuple = Tuple[int, ...]


# =============================================================================
# TUPLE ARITHMETIC
# =============================================================================

def _check_tuple(v: Sequence[int], name: str = "v") -> VertexTuple:
    v = tuple(int(x) for x in v)
    if len(v) == 0:
        raise ValidationError("tuples of arity 0 are not supported", field=name)
    return v


def substitute(v: Sequence[int], idx: Sequence[int], u: Sequence[int]) -> VertexTuple:
    """
    Replace the entries of v at positions idx by u

    Args:
        v: Base tuple of arity k
        idx: Distinct 1-based positions, length r <= k
        u: Replacement entries, length r

    Returns:
        Tuple whose position idx[s] carries u[s], other positions unchanged
    """
    v = _check_tuple(v)
    idx = tuple(int(i) for i in idx)
    u = tuple(int(x) for x in u)
    if len(idx) != len(u):
        raise ValidationError("index vector and replacement differ in length", field="u", value=len(u))
    if len(idx) > len(v):
        raise ValidationError("index vector longer than tuple", field="idx", value=idx)
    if len(set(idx)) != len(idx):
        raise ValidationError("repeated position in distinct index vector", field="idx", value=idx)
    out = list(v)
    for position, value in zip(idx, u):
        if not 1 <= position <= len(v):
            raise ValidationError("position out of range", field="idx", value=position)
        out[position - 1] = value
    return tuple(out)


def project(v: Sequence[int], idx: Sequence[int]) -> VertexTuple:
    """Entry j of the result is v at 1-based position idx[j]; repeats allowed"""
    v = _check_tuple(v)
    idx = tuple(int(i) for i in idx)
    if not idx:
        raise ValidationError("tuples of arity 0 are not supported", field="idx")
    for position in idx:
        if not 1 <= position <= len(v):
            raise ValidationError("position out of range", field="idx", value=position)
    return tuple(v[position - 1] for position in idx)


def concat(v: Sequence[int], w: Sequence[int]) -> VertexTuple:
    """Concatenation v.w"""
    return _check_tuple(v) + _check_tuple(w, "w")


def distinct_index_vectors(k: int, r: int) -> List[VertexTuple]:
    """The index vectors [k]^(r): 1-based, pairwise distinct positions"""
    return list(itertools.permutations(range(1, k + 1), r))


def index_vectors(k: int, r: int) -> List[VertexTuple]:
    """The index vectors [k]^r: repeats allowed"""
    return list(itertools.product(range(1, k + 1), repeat=r))


# =============================================================================
# TUPLE SPACE INDEXING
# =============================================================================

def check_tuple_cap(n: int, k: int, cap: Optional[int] = None) -> int:
    """Return n^k, raising CapExceededError above the tuple cap"""
    limit = settings.cap("tuples", cap)
    size = n ** k
    if size > limit:
        raise CapExceededError(
            f"tuple space V^{k} with n={n} exceeds the tuple cap",
            cap_name="CAP_TUPLES", cap=limit, requested=size,
        )
    return size


@lru_cache(maxsize=64)
def radix_weights(n: int, k: int) -> np.ndarray:
    """Mixed-radix weights, position 1 most significant"""
    weights = np.array([n ** (k - 1 - j) for j in range(k)], dtype=np.int64)
    weights.setflags(write=False)
    return weights


@lru_cache(maxsize=32)
def tuple_coordinates(n: int, k: int) -> np.ndarray:
    """All of V^k in lexicographic order as an (n^k, k) array"""
    coords = np.indices((n,) * k, dtype=np.int64).reshape(k, -1).T.copy()
    coords.setflags(write=False)
    return coords


def tuple_index(v: Sequence[int], n: int) -> int:
    """Position of tuple v in lexicographic order over V^k"""
    index = 0
    for x in v:
        if not 0 <= x < n:
            raise ValidationError("vertex out of range", field="v", value=x)
        index = index * n + int(x)
    return index


def index_tuple(index: int, n: int, k: int) -> VertexTuple:
    """Inverse of tuple_index"""
    out = []
    for _ in range(k):
        index, x = divmod(index, n)
        out.append(x)
    return tuple(reversed(out))


def canonical_labels(labels) -> np.ndarray:
    """
    Relabel values (or rows of a 2-D array) by first occurrence

    Args:
        labels: 1-D array of labels, or 2-D array whose rows are signatures

    Returns:
        int64 array of dense ids 0..c-1 in order of first appearance
    """
    labels = np.asarray(labels)
    if labels.size == 0:
        return np.zeros(labels.shape[0] if labels.ndim else 0, dtype=np.int64)
    if labels.ndim == 1:
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    else:
        _, first, inverse = np.unique(labels, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first), dtype=np.int64)
    return rank[inverse]


def is_function(source: np.ndarray, target: np.ndarray) -> bool:
    """True when equal source labels always carry equal target labels"""
    source = np.asarray(source, dtype=np.int64)
    target = canonical_labels(np.asarray(target, dtype=np.int64))
    radix = int(target.max(initial=0)) + 1
    if (int(source.max(initial=0)) + 1) * radix < 2 ** 62:
        pairs = np.unique(source * radix + target)
    else:
        pairs = np.unique(np.stack([source, target], axis=1), axis=0)
    return len(pairs) == len(np.unique(source))


# =============================================================================
# LABELLED PARTITION
# =============================================================================

class Comparison(str, Enum):
    """Outcome of comparing two partitions in the refinement preorder"""
    EQUIVALENT = "Equivalent"
    FINER_RIGHT = "FinerRight"
    FINER_LEFT = "FinerLeft"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True, eq=False)
class LabelledPartition:
    """
    Total colouring of V^k with canonical dense colour ids

    Colours are stored flat in lexicographic tuple order. Any integer labels
    passed in are relabelled by first occurrence on construction.
    """
    n: int
    arity: int
    colours: np.ndarray
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.arity < 1:
            raise ValidationError("arity must be at least 1", field="arity", value=self.arity)
        if self.n < 1:
            raise ValidationError("vertex count must be at least 1", field="n", value=self.n)
        colours = np.asarray(self.colours).reshape(-1)
        if colours.shape[0] != self.n ** self.arity:
            raise ShapeMismatchError(
                "colour array does not cover V^k",
                left=colours.shape[0], right=self.n ** self.arity,
            )
        colours = canonical_labels(colours)
        colours.setflags(write=False)
        object.__setattr__(self, "colours", colours)
        object.__setattr__(self, "_class_count", int(colours.max()) + 1)

    # -------------------------------------------------------------------------
    @property
    def class_count(self) -> int:
        return self._class_count

    @property
    def size(self) -> int:
        return self.colours.shape[0]

    def as_array(self) -> np.ndarray:
        """Colours as an n x ... x n array indexed by tuple entries"""
        return self.colours.reshape((self.n,) * self.arity)

    def colour_of(self, v: Sequence[int]) -> int:
        v = tuple(v)
        if len(v) != self.arity:
            raise ValidationError("tuple arity does not match partition", field="v", value=v)
        return int(self.colours[tuple_index(v, self.n)])

    def class_sizes(self) -> List[int]:
        return np.bincount(self.colours, minlength=self.class_count).tolist()

    def classes(self) -> List[List[VertexTuple]]:
        """Tuples grouped by colour id, each class in lexicographic order"""
        groups: List[List[VertexTuple]] = [[] for _ in range(self.class_count)]
        coords = tuple_coordinates(self.n, self.arity)
        for index, colour in enumerate(self.colours.tolist()):
            groups[colour].append(tuple(coords[index].tolist()))
        return groups

    def tuples(self) -> Iterator[VertexTuple]:
        return itertools.product(range(self.n), repeat=self.arity)

    def __eq__(self, other):
        if not isinstance(other, LabelledPartition):
            return NotImplemented
        return (
            self.n == other.n and self.arity == other.arity
            and np.array_equal(self.colours, other.colours)
        )

    def __hash__(self):
        return hash((self.n, self.arity, self.colours.tobytes()))

    def __repr__(self):
        return f"LabelledPartition(n={self.n}, arity={self.arity}, classes={self.class_count})"


def canonicalize(g: LabelledPartition) -> LabelledPartition:
    """Canonical relabelling; partitions are stored canonically so this is a copy"""
    return LabelledPartition(g.n, g.arity, g.colours.copy(), dict(g.metadata))


def discrete_partition(n: int, k: int, cap: Optional[int] = None) -> LabelledPartition:
    """Every tuple in its own class"""
    size = check_tuple_cap(n, k, cap)
    return LabelledPartition(n, k, np.arange(size, dtype=np.int64))


def unit_partition(n: int, k: int, cap: Optional[int] = None) -> LabelledPartition:
    """A single class"""
    size = check_tuple_cap(n, k, cap)
    return LabelledPartition(n, k, np.zeros(size, dtype=np.int64))


def from_function(n: int, k: int, colour: Callable[[VertexTuple], object],
                  cap: Optional[int] = None) -> LabelledPartition:
    """Build a partition from any function of the tuple with hashable values"""
    check_tuple_cap(n, k, cap)
    ids: Dict[object, int] = {}
    labels = [ids.setdefault(colour(v), len(ids)) for v in itertools.product(range(n), repeat=k)]
    return LabelledPartition(n, k, np.array(labels, dtype=np.int64))


def compare(g: LabelledPartition, h: LabelledPartition) -> Comparison:
    """
    Compare two partitions in the refinement preorder

    Returns:
        FinerRight when h refines g, FinerLeft when g refines h,
        Equivalent when both hold, Incomparable otherwise
    """
    if g.n != h.n or g.arity != h.arity:
        raise ShapeMismatchError(
            "partitions differ in shape",
            left=(g.n, g.arity), right=(h.n, h.arity),
        )
    h_refines = is_function(h.colours, g.colours)
    g_refines = is_function(g.colours, h.colours)
    if h_refines and g_refines:
        return Comparison.EQUIVALENT
    if h_refines:
        return Comparison.FINER_RIGHT
    if g_refines:
        return Comparison.FINER_LEFT
    return Comparison.INCOMPARABLE


def refines(coarse: LabelledPartition, fine: LabelledPartition) -> bool:
    """coarse ⪯ fine"""
    return compare(coarse, fine) in (Comparison.EQUIVALENT, Comparison.FINER_RIGHT)


def equivalent(g: LabelledPartition, h: LabelledPartition) -> bool:
    return compare(g, h) is Comparison.EQUIVALENT


# =============================================================================
# PROJECTIONS AND RESHAPING
# =============================================================================

def padded_indices(n: int, k: int, r: int) -> np.ndarray:
    """Index in V^k of (v_1, ..., v_r, v_r, ..., v_r) for every v in V^r"""
    coords = tuple_coordinates(n, r)
    weights = radix_weights(n, k)
    index = coords[:, : r - 1] @ weights[: r - 1] if r > 1 else np.zeros(coords.shape[0], dtype=np.int64)
    return index + coords[:, r - 1] * int(weights[r - 1:].sum())


def project_partition(g: LabelledPartition, r: int) -> LabelledPartition:
    """The r-projection: colour of v in V^r is the colour of v padded with v_r"""
    if not 1 <= r <= g.arity:
        raise ValidationError("projection arity out of range", field="r", value=r)
    if r == g.arity:
        return canonicalize(g)
    return LabelledPartition(g.n, r, g.colours[padded_indices(g.n, g.arity, r)])


def reshape(g: LabelledPartition, k: int, p: int) -> LabelledPartition:
    """
    View a partition of V^{pk} as a partition of (V^k)^p

    Lexicographic order on V^{pk} agrees with lexicographic order on (V^k)^p
    under base-n^k digits, so the colour array is reused as is.
    """
    if k < 1 or p < 1 or g.arity != p * k:
        raise ValidationError(
            f"arity {g.arity} is not {p} x {k}", field="arity", value=g.arity,
        )
    out = LabelledPartition(g.n ** k, p, g.colours)
    out.metadata.update({"base_n": g.n, "block": k})
    return out


def flatten(g: LabelledPartition, k: int) -> LabelledPartition:
    """Inverse of reshape: a partition of (V^k)^p back to V^{pk}"""
    base = round(g.n ** (1.0 / k))
    while base ** k > g.n:
        base -= 1
    while (base + 1) ** k <= g.n:
        base += 1
    if base ** k != g.n:
        raise ValidationError(f"vertex count {g.n} is not a {k}-th power", field="n", value=g.n)
    return LabelledPartition(base, g.arity * k, g.colours)


def atomic_types(graph: LabelledPartition, k: int, cap: Optional[int] = None) -> LabelledPartition:
    """
    Atomic types of k-tuples

    Args:
        graph: Arc colouring of V^2
        k: Tuple arity; k = 1 gives the partition of V by loop colour

    Returns:
        Tuples share a colour iff graph(v_i, v_j) agree for all (i, j) in [k]^(2)
    """
    if graph.arity != 2:
        raise ValidationError("atomic types need an arc partition", field="arity", value=graph.arity)
    if k < 1:
        raise ValidationError("arity must be at least 1", field="k", value=k)
    n = graph.n
    arcs = graph.as_array()
    if k == 1:
        return LabelledPartition(n, 1, np.diagonal(arcs).copy())
    check_tuple_cap(n, k, cap)
    coords = tuple_coordinates(n, k)
    columns = [arcs[coords[:, i], coords[:, j]] for i, j in itertools.permutations(range(k), 2)]
    return LabelledPartition(n, k, canonical_labels(np.stack(columns, axis=1)))


# =============================================================================
# GRAPH-LIKE PREDICATES
# =============================================================================

@dataclass
class GraphLikeReport:
    """Outcome of the graph-like predicate suite"""
    invariant: bool
    consistent: Dict[int, bool]
    equality_pattern: bool
    violation: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self):
        return self.ok


def is_invariant(g: LabelledPartition) -> bool:
    """Class-equality is preserved by every adjacent transposition of positions"""
    arr = g.as_array()
    for j in range(g.arity - 1):
        swapped = np.swapaxes(arr, j, j + 1).reshape(-1)
        if not is_function(g.colours, swapped):
            logger.debug(f"invariance fails for transposition ({j + 1},{j + 2})")
            return False
    return True


def is_consistent(g: LabelledPartition, r: int) -> bool:
    """r-consistency: pr_r g(pr_i v) is determined by g(v) for every i in [k]^r"""
    k = g.arity
    if not 1 <= r <= k:
        raise ValidationError("consistency arity out of range", field="r", value=r)
    projected = project_partition(g, r).colours
    coords = tuple_coordinates(g.n, k)
    weights = radix_weights(g.n, r)
    for idx in index_vectors(k, r):
        positions = [i - 1 for i in idx]
        target = projected[coords[:, positions] @ weights]
        if not is_function(g.colours, target):
            logger.debug(f"{r}-consistency fails at index vector {idx}")
            return False
    return True


def equality_patterns(n: int, k: int) -> np.ndarray:
    """Bit code of {(i, j) : v_i = v_j, i < j} for every tuple"""
    coords = tuple_coordinates(n, k)
    code = np.zeros(coords.shape[0], dtype=np.int64)
    for bit, (i, j) in enumerate(itertools.combinations(range(k), 2)):
        code |= (coords[:, i] == coords[:, j]).astype(np.int64) << bit
    return code


def preserves_equality_pattern(g: LabelledPartition) -> bool:
    if g.arity == 1:
        return True
    return is_function(g.colours, equality_patterns(g.n, g.arity))


def is_graph_like(g: LabelledPartition) -> GraphLikeReport:
    """Invariant, r-consistent for all r <= k, and equality-pattern preserving"""
    invariant = is_invariant(g)
    consistent = {r: is_consistent(g, r) for r in range(1, g.arity + 1)}
    pattern = preserves_equality_pattern(g)
    violation = None
    if not invariant:
        violation = "invariance"
    else:
        failed = [r for r, ok in consistent.items() if not ok]
        if failed:
            violation = f"{failed[0]}-consistency"
        elif not pattern:
            violation = "equality pattern"
    return GraphLikeReport(invariant, consistent, pattern, violation)


# =============================================================================
# GRAPHS
# =============================================================================

@dataclass
class RainbowReport:
    """Outcome of checking the rainbow conditions on an arc partition"""
    diagonal: bool
    transpose: bool
    violation: Optional[str] = None
    witness: Optional[Tuple[VertexTuple, VertexTuple]] = None

    @property
    def ok(self) -> bool:
        return self.violation is None

    def __bool__(self):
        return self.ok


def rainbow_report(g: LabelledPartition) -> RainbowReport:
    """Diagonal is a union of classes and colour classes map to classes under transpose"""
    if g.arity != 2:
        raise ValidationError("rainbow conditions apply to arc partitions", field="arity", value=g.arity)
    arr = g.as_array()
    n = g.n
    loop_colours = set(np.diagonal(arr).tolist())
    off = ~np.eye(n, dtype=bool)
    clash = np.argwhere(off & np.isin(arr, list(loop_colours)))
    if clash.size:
        u, v = (int(x) for x in clash[0])
        loop = next(x for x in range(n) if arr[x, x] == arr[u, v])
        return RainbowReport(False, True, "diagonal", ((loop, loop), (u, v)))
    if is_function(g.colours, arr.T.reshape(-1)):
        return RainbowReport(True, True)

    first_arc: Dict[int, VertexTuple] = {}
    transpose_of: Dict[int, int] = {}
    for u in range(n):
        for v in range(n):
            colour = int(arr[u, v])
            back = int(arr[v, u])
            if colour not in transpose_of:
                transpose_of[colour] = back
                first_arc[colour] = (u, v)
            elif transpose_of[colour] != back:
                return RainbowReport(True, False, "transpose", (first_arc[colour], (u, v)))
    return RainbowReport(True, True)


@dataclass(frozen=True, eq=False)
class Graph(LabelledPartition):
    """
    Arc-coloured complete digraph: a rainbow LabelledPartition of arity 2

    colour_names[i] names canonical colour i. Names given on construction
    index the raw labels and are reordered with the canonical relabelling.
    """
    colour_names: Tuple[str, ...] = ()

    def __post_init__(self):
        raw = np.asarray(self.colours).reshape(-1).astype(np.int64)
        if self.arity != 2:
            raise ValidationError("graphs are arc partitions", field="arity", value=self.arity)
        super().__post_init__()
        canonical = self.colours
        if self.colour_names:
            if raw.min(initial=0) < 0 or raw.max(initial=0) >= len(self.colour_names):
                raise ValidationError("colour label without a name", field="colour_names")
            names = [""] * self.class_count
            names_in = list(self.colour_names)
            _, first = np.unique(canonical, return_index=True)
            for colour, position in enumerate(first.tolist()):
                names[colour] = str(names_in[raw[position]])
        else:
            names = [f"c{i}" for i in range(self.class_count)]
        if len(set(names)) != len(names):
            raise ValidationError("colour names must be distinct", field="colour_names")
        object.__setattr__(self, "colour_names", tuple(names))
        report = rainbow_report(self)
        if not report:
            raise NotRainbowError(
                "arc partition is not a rainbow",
                condition=report.violation, witness=report.witness,
            )

    @classmethod
    def from_partition(cls, g: LabelledPartition, names: Optional[Sequence[str]] = None) -> "Graph":
        if isinstance(g, Graph) and names is None:
            return g
        return cls(g.n, 2, g.colours, dict(g.metadata), tuple(names or ()))

    @classmethod
    def from_matrix(cls, matrix, names: Optional[Sequence[str]] = None,
                    metadata: Optional[Dict[str, object]] = None) -> "Graph":
        """Build from an n x n array of raw integer labels"""
        matrix = np.asarray(matrix, dtype=np.int64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ShapeMismatchError("arc colour matrix must be square", left=matrix.shape)
        return cls(matrix.shape[0], 2, matrix.reshape(-1), dict(metadata or {}), tuple(names or ()))

    def name_of(self, u: int, v: int) -> str:
        return self.colour_names[self.colour_of((u, v))]

    def loop_colours(self) -> List[int]:
        return sorted(set(np.diagonal(self.as_array()).tolist()))

    def __repr__(self):
        return f"Graph(n={self.n}, colours={list(self.colour_names)})"


__all__ = [
    # Tuples
    'VertexTuple', 'substitute', 'project', 'concat',
    'distinct_index_vectors', 'index_vectors',
    # Indexing
    'check_tuple_cap', 'radix_weights', 'tuple_coordinates', 'tuple_index', 'index_tuple',
    'canonical_labels', 'is_function', 'padded_indices',
    # Partitions
    'Comparison', 'LabelledPartition', 'canonicalize', 'discrete_partition', 'unit_partition',
    'from_function', 'compare', 'refines', 'equivalent',
    'project_partition', 'reshape', 'flatten', 'atomic_types',
    # Predicates
    'GraphLikeReport', 'is_invariant', 'is_consistent', 'equality_patterns',
    'preserves_equality_pattern', 'is_graph_like',
    # Graphs
    'RainbowReport', 'rainbow_report', 'Graph',
]
