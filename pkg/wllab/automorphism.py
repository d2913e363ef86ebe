"""
wllab Automorphisms - Brute-Force Isomorphism and Orbit Partitions

Individualization-refinement backtracking over arc-coloured complete digraphs:
- Joint vertex colour refinement of two graphs in a shared colour space
- Isomorphism search with candidates pruned by refined colours
- Full automorphism group enumeration and orbit partitions of V^k
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import settings
from .exceptions import CapExceededError
from .partition import Graph, LabelledPartition, canonical_labels, check_tuple_cap, radix_weights, tuple_coordinates

logger = logging.getLogger(__name__)

Permutation = Tuple[int, ...]


def aligned_arcs(g: Graph, h: Graph) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Arc colour matrices of two graphs over their merged colour names

    Returns:
        Pair of n x n arrays, or None when the graphs use different colour names
    """
    if set(g.colour_names) != set(h.colour_names):
        return None
    names = sorted(g.colour_names)
    position = {name: i for i, name in enumerate(names)}
    lookup_g = np.array([position[name] for name in g.colour_names], dtype=np.int64)
    lookup_h = np.array([position[name] for name in h.colour_names], dtype=np.int64)
    return lookup_g[g.as_array()], lookup_h[h.as_array()]


def refine_vertex_colours(arcs: Sequence[np.ndarray], colours: Sequence[np.ndarray]) -> List[np.ndarray]:
    """
    Joint colour refinement of vertex colourings on graphs of equal order

    A vertex's new colour is its old colour and the multiset of
    (out-arc colour, in-arc colour, neighbour colour) over all vertices.
    """
    n = arcs[0].shape[0]
    current = list(canonical_labels(np.concatenate(colours)).reshape(len(arcs), n))
    count = int(max(c.max() for c in current)) + 1
    while True:
        triples = []
        for arc, colour in zip(arcs, current):
            neighbour = np.broadcast_to(colour[None, :], (n, n))
            triples.append(np.stack([arc, arc.T, neighbour], axis=2).reshape(-1, 3))
        ids = canonical_labels(np.concatenate(triples)).reshape(len(arcs), n, n)
        ids.sort(axis=2)
        rows = np.concatenate([np.stack(current)[:, :, None], ids], axis=2).reshape(len(arcs) * n, n + 1)
        refined = list(canonical_labels(rows).reshape(len(arcs), n))
        refined_count = int(max(c.max() for c in refined)) + 1
        if refined_count == count:
            return refined
        current, count = refined, refined_count


def vertex_colours(g: Graph) -> np.ndarray:
    """Stable vertex colouring of one graph, starting from loop colours"""
    return refine_vertex_colours([g.as_array()], [np.diagonal(g.as_array()).copy()])[0]


class _Search:
    """Backtracking over individualized vertex pairs"""

    def __init__(self, arcs_g: np.ndarray, arcs_h: np.ndarray, collect: bool):
        self.arcs_g = arcs_g
        self.arcs_h = arcs_h
        self.collect = collect
        self.found: List[Permutation] = []
        self.nodes = 0

    def run(self) -> List[Permutation]:
        start = refine_vertex_colours(
            [self.arcs_g, self.arcs_h],
            [np.diagonal(self.arcs_g).copy(), np.diagonal(self.arcs_h).copy()],
        )
        self._descend(start[0], start[1])
        return self.found

    def _descend(self, cg: np.ndarray, ch: np.ndarray) -> bool:
        self.nodes += 1
        size = int(max(cg.max(), ch.max())) + 1
        if not np.array_equal(np.bincount(cg, minlength=size), np.bincount(ch, minlength=size)):
            return False
        n = cg.shape[0]
        if size == n:
            mapping = np.empty(n, dtype=np.int64)
            mapping[np.argsort(cg)] = np.argsort(ch)
            if np.array_equal(self.arcs_h[np.ix_(mapping, mapping)], self.arcs_g):
                self.found.append(tuple(mapping.tolist()))
                return not self.collect
            return False

        counts = np.bincount(cg)
        target = int(np.argmin(np.where(counts > 1, counts, n + 1)))
        v = int(np.nonzero(cg == target)[0][0])
        fresh = size
        for w in np.nonzero(ch == target)[0].tolist():
            next_g = cg.copy()
            next_h = ch.copy()
            next_g[v] = fresh
            next_h[w] = fresh
            refined = refine_vertex_colours([self.arcs_g, self.arcs_h], [next_g, next_h])
            if self._descend(refined[0], refined[1]):
                return True
        return False


def _check_order(n: int, cap: int, cap_name: str) -> None:
    if n > cap:
        raise CapExceededError(f"{n} vertices exceed the {cap_name} cap", cap_name=cap_name, cap=cap, requested=n)


def find_isomorphism(g: Graph, h: Graph, cap: Optional[int] = None) -> Optional[Permutation]:
    """
    Colour-preserving bijection pi with h(pi(u), pi(v)) = g(u, v)

    Args:
        g, h: Graphs; colours are matched by name
        cap: Vertex cap, CAP_ISOMORPHISM by default

    Returns:
        pi as a tuple indexed by vertices of g, or None when non-isomorphic
    """
    cap = settings.cap("isomorphism", cap)
    _check_order(max(g.n, h.n), cap, "isomorphism")
    if g.n != h.n:
        return None
    aligned = aligned_arcs(g, h)
    if aligned is None:
        return None
    arcs_g, arcs_h = aligned
    if not np.array_equal(np.sort(arcs_g, axis=None), np.sort(arcs_h, axis=None)):
        return None
    search = _Search(arcs_g, arcs_h, collect=False)
    found = search.run()
    logger.debug(f"isomorphism search on n={g.n} visited {search.nodes} nodes")
    return found[0] if found else None


def is_isomorphic(g: Graph, h: Graph, cap: Optional[int] = None) -> bool:
    return find_isomorphism(g, h, cap) is not None


def automorphisms(g: Graph, cap: Optional[int] = None) -> List[Permutation]:
    """All colour-preserving permutations of V, identity first"""
    cap = settings.cap("brute_force", cap)
    _check_order(g.n, cap, "brute_force")
    arcs = g.as_array()
    search = _Search(arcs, arcs, collect=True)
    found = search.run()
    identity = tuple(range(g.n))
    found.sort(key=lambda p: (p != identity, p))
    logger.debug(f"enumerated {len(found)} automorphisms on n={g.n} in {search.nodes} nodes")
    return found


def orbit_partition(g: Graph, k: int, cap: Optional[int] = None,
                    group: Optional[Sequence[Permutation]] = None) -> LabelledPartition:
    """
    Orbits of the automorphism group acting on V^k

    Each tuple is labelled by the smallest index in its orbit.
    """
    check_tuple_cap(g.n, k)
    group = automorphisms(g, cap) if group is None else group
    coords = tuple_coordinates(g.n, k)
    weights = radix_weights(g.n, k)
    labels = np.arange(g.n ** k, dtype=np.int64)
    for perm in group:
        labels = np.minimum(labels, np.asarray(perm, dtype=np.int64)[coords] @ weights)
    return LabelledPartition(g.n, k, labels)


__all__ = [
    'Permutation', 'aligned_arcs', 'refine_vertex_colours', 'vertex_colours',
    'find_isomorphism', 'is_isomorphic', 'automorphisms', 'orbit_partition',
]
