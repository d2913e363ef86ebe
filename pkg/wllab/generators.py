"""
wllab Generators - Graph Corpus and Serialization

Named graphs built with networkx and encoded as arc-coloured complete digraphs:
- Undirected graphs use the colours loop / edge / nonedge
- Cai-Furer-Immerman graphs over a base graph with any set of twisted edges
- Seeded random rainbows, disjoint unions with a fresh cross colour
- GraphDoc and partition JSON documents (.ccg.json)
"""

import itertools
import logging
from collections import Counter
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import ValidationError as PydanticValidationError

from .config import settings
from .exceptions import CapExceededError, NotRainbowError, ParseError, ValidationError
from .export import export_service
from .partition import Graph, LabelledPartition, tuple_coordinates
from .schemas import GraphDoc, PartitionDoc

logger = logging.getLogger(__name__)

LOOP, EDGE, NONEDGE = "loop", "edge", "nonedge"
ARC, BACK = "arc", "back"
CROSS = "cross"
GRAPH_SUFFIX = ".ccg.json"


# =============================================================================
# NETWORKX BRIDGE
# =============================================================================

def from_networkx(nxg: nx.Graph, name: Optional[str] = None, family: Optional[str] = None) -> Graph:
    """
    Encode a networkx graph as a rainbow

    Vertices are numbered in sorted node order. Directed graphs use arc, back,
    edge (both directions) and nonedge.
    """
    nodes = sorted(nxg.nodes())
    position = {node: i for i, node in enumerate(nodes)}
    n = len(nodes)
    if n == 0:
        raise ValidationError("graph has no vertices", field="nxg")
    names = [LOOP, EDGE, NONEDGE, ARC, BACK]
    matrix = np.full((n, n), 2, dtype=np.int64)
    if nxg.is_directed():
        for u, v in nxg.edges():
            if u == v:
                continue
            a, b = position[u], position[v]
            if nxg.has_edge(v, u):
                matrix[a, b] = matrix[b, a] = 1
            else:
                matrix[a, b], matrix[b, a] = 3, 4
    else:
        for u, v in nxg.edges():
            if u != v:
                a, b = position[u], position[v]
                matrix[a, b] = matrix[b, a] = 1
    np.fill_diagonal(matrix, 0)
    metadata: Dict[str, Any] = {}
    if name:
        metadata["name"] = name
    if family:
        metadata["family"] = family
    return Graph.from_matrix(matrix, names, metadata)


def to_networkx(g: Graph) -> nx.Graph:
    """Undirected graph of the edge colour; only meaningful for loop/edge/nonedge encodings"""
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(undirected_edges(g))
    return nxg


def undirected_edges(g: Graph) -> List[Tuple[int, int]]:
    """Pairs u < v whose arcs carry the edge colour"""
    if EDGE not in g.colour_names:
        return []
    colour = g.colour_names.index(EDGE)
    arcs = g.as_array()
    return [(int(u), int(v)) for u, v in zip(*np.nonzero(np.triu(arcs == colour, k=1)))]


def is_undirected(g: Graph) -> bool:
    return set(g.colour_names) <= {LOOP, EDGE, NONEDGE} and len(g.loop_colours()) == 1


# =============================================================================
# NAMED GRAPHS
# =============================================================================

def _shrikhande() -> nx.Graph:
    steps = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)]
    nxg = nx.Graph()
    cells = list(itertools.product(range(4), repeat=2))
    nxg.add_nodes_from(cells)
    for a, b in cells:
        for da, db in steps:
            nxg.add_edge((a, b), ((a + da) % 4, (b + db) % 4))
    return nxg


def all_n4() -> List[Graph]:
    """The 11 simple graphs on 4 vertices up to isomorphism, in atlas order"""
    atlas = [h for h in nx.graph_atlas_g() if h.number_of_nodes() == 4]
    return [from_networkx(h, name=f"all_n4_{i}", family="all_n4") for i, h in enumerate(atlas)]


def _cycles(lengths: Union[str, Sequence[int]] = (3, 3)) -> nx.Graph:
    if isinstance(lengths, str):
        lengths = [int(x) for x in lengths.split(",") if x]
    return nx.disjoint_union_all([nx.cycle_graph(int(m)) for m in lengths])


_BUILDERS: Dict[str, Callable[..., nx.Graph]] = {
    "path": lambda n=3: nx.path_graph(int(n)),
    "cycle": lambda n=5: nx.cycle_graph(int(n)),
    "complete": lambda n=3: nx.complete_graph(int(n)),
    "complete_bipartite": lambda a=2, b=3: nx.complete_bipartite_graph(int(a), int(b)),
    "grid": lambda rows=2, cols=3: nx.grid_2d_graph(int(rows), int(cols)),
    "petersen": lambda: nx.petersen_graph(),
    "shrikhande": _shrikhande,
    "rook44": lambda: nx.cartesian_product(nx.complete_graph(4), nx.complete_graph(4)),
    "cycles": _cycles,
}

NAMED_GRAPHS = tuple(sorted(list(_BUILDERS) + ["all_n4"]))


def named(name: str, **params: Any) -> Graph:
    """
    Standard construction by name

    Args:
        name: One of NAMED_GRAPHS
        **params: Construction parameters, e.g. n for cycle; all_n4 takes index

    Raises:
        ValidationError: Unknown name or parameters
    """
    if name == "all_n4":
        index = int(params.pop("index", 0))
        if params or not 0 <= index < 11:
            raise ValidationError("all_n4 takes index in 0..10", field="params", value=params or index)
        return all_n4()[index]
    builder = _BUILDERS.get(name)
    if builder is None:
        raise ValidationError(f"unknown graph {name!r}", field="name", value=name)
    try:
        nxg = builder(**params)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"bad parameters for {name}: {e}", field="params", value=params) from e
    label = name + "".join(f"_{v}" for _, v in sorted(params.items()))
    return from_networkx(nxg, name=label, family=name)


# =============================================================================
# CFI GRAPHS
# =============================================================================

def _cfi_base(base: Union[Graph, nx.Graph]) -> nx.Graph:
    nxg = to_networkx(base) if isinstance(base, Graph) else nx.Graph(base)
    nxg = nx.convert_node_labels_to_integers(nxg, ordering="sorted")
    if nxg.number_of_nodes() == 0 or not nx.is_connected(nxg):
        raise ValidationError("CFI base must be connected", field="base")
    degrees = [d for _, d in nxg.degree()]
    if min(degrees) < 2:
        raise ValidationError("CFI base needs minimum degree 2", field="base", value=min(degrees))
    if max(degrees) > settings.CAP_CFI_DEGREE:
        raise CapExceededError(
            "CFI base degree above cap", cap_name="cfi_degree",
            cap=settings.CAP_CFI_DEGREE, requested=max(degrees),
        )
    return nxg


def cfi_graph(base: Union[Graph, nx.Graph], twisted_edges: Iterable[Tuple[int, int]] = ()) -> Graph:
    """
    CFI graph over base with the given edges twisted

    Each base vertex v of degree d contributes one middle vertex per even subset
    of its incident edges and a connector pair (a_{v,e,0}, a_{v,e,1}) per edge e.
    A middle vertex for S is joined to a_{v,e,1} for e in S and a_{v,e,0}
    otherwise. Connectors of an edge are joined straight, or crossed when twisted.
    The connector wiring is kept in metadata for cfi_parity.
    """
    nxg = _cfi_base(base)
    edges = sorted(tuple(sorted(e)) for e in nxg.edges())
    twisted = {tuple(sorted(e)) for e in twisted_edges}
    unknown = twisted - set(edges)
    if unknown:
        raise ValidationError("twisted edge not in base", field="twisted_edges", value=sorted(unknown))

    out = nx.Graph()
    labels: List[str] = []
    connector: Dict[Tuple[int, Tuple[int, int], int], int] = {}

    def add(label: str) -> int:
        labels.append(label)
        out.add_node(len(labels) - 1)
        return len(labels) - 1

    for v in sorted(nxg.nodes()):
        incident = [e for e in edges if v in e]
        for e in incident:
            for bit in (0, 1):
                connector[(v, e, bit)] = add(f"a:{v}:{e[0]}-{e[1]}:{bit}")
        for size in range(0, len(incident) + 1, 2):
            for subset in itertools.combinations(incident, size):
                middle = add(f"m:{v}:" + ",".join(f"{a}-{b}" for a, b in subset))
                for e in incident:
                    out.add_edge(middle, connector[(v, e, 1 if e in subset else 0)])

    wiring = []
    for u, v in edges:
        e = (u, v)
        cross = e in twisted
        for bit in (0, 1):
            out.add_edge(connector[(u, e, bit)], connector[(v, e, bit ^ cross)])
        wiring.append([u, v, connector[(u, e, 0)], connector[(u, e, 1)], connector[(v, e, 0)], connector[(v, e, 1)]])

    name = f"cfi_{len(twisted)}tw_n{nxg.number_of_nodes()}"
    g = from_networkx(out, name=name, family="cfi")
    g.metadata["cfi"] = {
        "base_edges": [list(e) for e in edges],
        "twisted": sorted(list(e) for e in twisted),
        "wiring": wiring,
        "labels": labels,
    }
    logger.debug(f"cfi graph over {len(edges)} base edges: {g.n} vertices, {len(twisted)} twisted")
    return g


def cfi_pair(base: Union[Graph, nx.Graph]) -> Tuple[Graph, Graph]:
    """Untwisted and once-twisted CFI graphs over base"""
    nxg = _cfi_base(base)
    first = min(tuple(sorted(e)) for e in nxg.edges())
    return cfi_graph(nxg, ()), cfi_graph(nxg, [first])


def cfi_parity(g: Graph) -> int:
    """
    Number of crossed connector pairs mod 2, read from the arcs

    Two CFI graphs over the same base are isomorphic iff their parities agree.

    Raises:
        ValidationError: g carries no CFI wiring
    """
    info = g.metadata.get("cfi")
    if not info:
        raise ValidationError("graph has no CFI wiring", field="metadata")
    edge_colour = g.colour_names.index(EDGE)
    arcs = g.as_array()
    crossed = 0
    for _, _, u0, u1, v0, v1 in info["wiring"]:
        straight = arcs[u0, v0] == edge_colour and arcs[u1, v1] == edge_colour
        swapped = arcs[u0, v1] == edge_colour and arcs[u1, v0] == edge_colour
        if straight == swapped:
            raise ValidationError("connector pair is not wired as a CFI edge", field="wiring", value=(u0, u1))
        crossed += int(swapped)
    return crossed % 2


# =============================================================================
# RANDOM RAINBOWS AND UNIONS
# =============================================================================

def random_coloured_digraph(n: int, colour_count: int, seed: Optional[int] = None) -> Graph:
    """
    Seeded random rainbow

    Loops take colours from a palette disjoint from the arc colours. Each
    unordered pair gets one arc colour; symmetric colours label both arcs,
    oriented colours label (u, v) and its reverse with a paired colour.
    """
    if n < 1:
        raise ValidationError("vertex count must be at least 1", field="n", value=n)
    if colour_count < 2:
        raise ValidationError("need at least 2 colours", field="colour_count", value=colour_count)
    seed = settings.SEED if seed is None else seed
    rng = np.random.default_rng(seed)
    loop_palette = int(rng.integers(1, colour_count))
    arc_palette = max(1, colour_count - loop_palette)
    symmetric = rng.random(arc_palette) < 0.5

    names: Dict[str, int] = {}
    matrix = np.zeros((n, n), dtype=np.int64)
    for v in range(n):
        matrix[v, v] = names.setdefault(f"l{int(rng.integers(loop_palette))}", len(names))
    for u, v in itertools.combinations(range(n), 2):
        c = int(rng.integers(arc_palette))
        if symmetric[c]:
            matrix[u, v] = matrix[v, u] = names.setdefault(f"s{c}", len(names))
        else:
            forward, backward = (u, v) if rng.random() < 0.5 else (v, u)
            matrix[forward, backward] = names.setdefault(f"a{c}", len(names))
            matrix[backward, forward] = names.setdefault(f"b{c}", len(names))
    ordered = sorted(names, key=names.get)
    return Graph.from_matrix(matrix, ordered, {"name": f"random_n{n}_c{colour_count}_s{seed}", "seed": seed,
                                                "family": "random"})


def disjoint_union(g: Graph, h: Graph) -> Graph:
    """
    Vertex-disjoint union; intra arcs keep their colour names, cross arcs
    in both directions get one fresh colour
    """
    names = sorted(set(g.colour_names) | set(h.colour_names))
    cross = CROSS
    while cross in names:
        cross += "_"
    names.append(cross)
    position = {name: i for i, name in enumerate(names)}
    size = g.n + h.n
    matrix = np.full((size, size), position[cross], dtype=np.int64)
    matrix[: g.n, : g.n] = np.array([position[x] for x in g.colour_names])[g.as_array()]
    matrix[g.n:, g.n:] = np.array([position[x] for x in h.colour_names])[h.as_array()]
    metadata = {
        "name": f"{g.metadata.get('name', 'G')}+{h.metadata.get('name', 'H')}",
        "sides": [g.n, h.n],
        "cross": cross,
    }
    return Graph.from_matrix(matrix, names, metadata)


# =============================================================================
# CORPUS
# =============================================================================

def default_corpus(max_n: Optional[int] = None) -> List[Graph]:
    """The acceptance corpus, optionally filtered by vertex count"""
    corpus = all_n4() + [
        named("path", n=3),
        named("cycle", n=5),
        named("cycle", n=6),
        named("cycles", lengths="3,3"),
        named("petersen"),
    ]
    return [g for g in corpus if max_n is None or g.n <= max_n]


def graph_name(g: Graph) -> str:
    return str(g.metadata.get("name", f"graph_n{g.n}"))


# =============================================================================
# SERIALIZATION
# =============================================================================

def _most_common(values: List[str]) -> Optional[str]:
    if not values:
        return None
    counts = Counter(values)
    return min(counts, key=lambda name: (-counts[name], name))


def encode_graph(g: Graph) -> GraphDoc:
    """Canonical GraphDoc: sorted colour names, sorted arcs, defaults omitted"""
    names = sorted(g.colour_names)
    position = {name: i for i, name in enumerate(names)}
    arcs = np.array([position[x] for x in g.colour_names], dtype=np.int64)[g.as_array()]
    diagonal = [names[c] for c in np.diagonal(arcs).tolist()]
    off = [names[c] for c in arcs[~np.eye(g.n, dtype=bool)].tolist()]
    loop_default = _most_common(diagonal)
    nonedge_default = _most_common(off)
    listed = []
    for u, v in tuple_coordinates(g.n, 2).tolist():
        colour = names[arcs[u, v]]
        default = loop_default if u == v else nonedge_default
        if colour != default:
            listed.append([u, v, int(arcs[u, v])])
    metadata = {key: value for key, value in g.metadata.items() if _json_safe(value)}
    return GraphDoc(
        num_vertices=g.n, colours=names, arcs=listed,
        defaults={"loop": loop_default, "nonedge": nonedge_default}, metadata=metadata,
    )


def _json_safe(value: Any) -> bool:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return True
    if isinstance(value, (list, tuple)):
        return all(_json_safe(x) for x in value)
    if isinstance(value, dict):
        return all(isinstance(k, str) and _json_safe(v) for k, v in value.items())
    return False


def decode_graph(doc: Union[GraphDoc, Dict[str, Any]], filename: Optional[str] = None) -> Graph:
    """
    Graph from a GraphDoc

    Raises:
        ParseError: Malformed document, uncovered arc or non-rainbow colouring
    """
    try:
        doc = doc if isinstance(doc, GraphDoc) else GraphDoc.model_validate(doc)
    except PydanticValidationError as e:
        raise ParseError("invalid graph document", filename=filename, reason=str(e)) from e
    n, names = doc.num_vertices, doc.colours
    matrix = np.full((n, n), -1, dtype=np.int64)
    for key, mask in (("loop", np.eye(n, dtype=bool)), ("nonedge", ~np.eye(n, dtype=bool))):
        default = doc.defaults.get(key)
        if default is not None:
            if default not in names:
                raise ParseError(f"default {key} colour {default!r} is not declared", filename=filename)
            matrix[mask] = names.index(default)
    for u, v, c in doc.arcs:
        if not (0 <= u < n and 0 <= v < n and 0 <= c < len(names)):
            raise ParseError(f"arc {[u, v, c]} out of range", filename=filename)
        matrix[u, v] = c
    if (matrix < 0).any():
        u, v = (int(x) for x in np.argwhere(matrix < 0)[0])
        raise ParseError(f"arc ({u}, {v}) has no colour", filename=filename)
    try:
        return Graph.from_matrix(matrix, names, dict(doc.metadata))
    except (NotRainbowError, ValidationError) as e:
        raise ParseError("graph document is not a rainbow", filename=filename, reason=str(e)) from e


def write_graph(g: Graph, path: Union[str, Path]) -> Dict[str, Any]:
    return export_service.write_json(path, encode_graph(g))


def read_graph(path: Union[str, Path]) -> Graph:
    return decode_graph(export_service.read_json(path), filename=str(path))


def encode_partition(g: LabelledPartition, iterations: int = 0,
                     metadata: Optional[Dict[str, Any]] = None) -> PartitionDoc:
    """Classes listed in canonical colour order, tuples lexicographic within a class"""
    classes = [[list(t) for t in members] for members in g.classes()]
    return PartitionDoc(
        n=g.n, arity=g.arity, classes=classes, class_sizes=g.class_sizes(),
        iterations=iterations, metadata=dict(metadata or {}),
    )


def decode_partition(doc: Union[PartitionDoc, Dict[str, Any]], filename: Optional[str] = None) -> LabelledPartition:
    """
    Partition from a PartitionDoc

    Raises:
        ParseError: Malformed document or classes not covering V^k exactly once
    """
    try:
        doc = doc if isinstance(doc, PartitionDoc) else PartitionDoc.model_validate(doc)
    except PydanticValidationError as e:
        raise ParseError("invalid partition document", filename=filename, reason=str(e)) from e
    n, k = doc.n, doc.arity
    labels = np.full(n ** k, -1, dtype=np.int64)
    weights = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for colour, members in enumerate(doc.classes):
        for t in members:
            if len(t) != k or not all(0 <= x < n for x in t):
                raise ParseError(f"tuple {t} is not in V^{k}", filename=filename)
            index = int(np.dot(t, weights))
            if labels[index] >= 0:
                raise ParseError(f"tuple {t} listed twice", filename=filename)
            labels[index] = colour
    if (labels < 0).any():
        raise ParseError("classes do not cover every tuple", filename=filename)
    return LabelledPartition(n, k, labels, dict(doc.metadata))


def write_partition(g: LabelledPartition, path: Union[str, Path], iterations: int = 0,
                    metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return export_service.write_json(path, encode_partition(g, iterations, metadata))


def read_partition(path: Union[str, Path]) -> LabelledPartition:
    return decode_partition(export_service.read_json(path), filename=str(path))


__all__ = [
    'LOOP', 'EDGE', 'NONEDGE', 'CROSS', 'GRAPH_SUFFIX', 'NAMED_GRAPHS',
    'from_networkx', 'to_networkx', 'undirected_edges', 'is_undirected',
    'named', 'all_n4', 'cfi_graph', 'cfi_pair', 'cfi_parity',
    'random_coloured_digraph', 'disjoint_union', 'default_corpus', 'graph_name',
    'encode_graph', 'decode_graph', 'read_graph', 'write_graph',
    'encode_partition', 'decode_partition', 'read_partition', 'write_partition',
]
