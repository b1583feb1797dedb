"""Coloured graphs: parsing, serialisation, colour refinement, and the
brute-force isomorphism oracle.

The JSON wire format is
``{"vertices": [{"id": str, "colour": str}], "edges": [{"u": str, "v": str,
"colour": str|null}]}`` with sorted keys and sorted vertex/edge lists, so
serialisation is byte-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple


class GraphError(ValueError):
    """Malformed graph input or violated construction constraints."""


def edge_key(u: str, v: str) -> Tuple[str, str]:
    return (u, v) if u <= v else (v, u)


class ColouredGraph:
    """Undirected graph with vertex colours and optional edge colours.

    No self-loops, no parallel edges. Colour ids are plain strings shared
    across graphs, so two graphs can be compared directly.
    """

    def __init__(self, vertices: Iterable[str], colours: Dict[str, str],
                 edges: Iterable[Tuple[str, str]],
                 edge_colours: Optional[Dict[Tuple[str, str], Optional[str]]] = None):
        vlist = list(vertices)
        self.vertices: Tuple[str, ...] = tuple(sorted(set(vlist)))
        if len(self.vertices) != len(vlist):
            raise GraphError("duplicate vertex ids")
        vset = set(self.vertices)
        missing = set(colours) - vset
        if missing or set(self.vertices) - set(colours):
            raise GraphError("vertex colour map must cover exactly the vertex set")
        self.colours: Dict[str, str] = dict(colours)
        self.edge_colours: Dict[Tuple[str, str], Optional[str]] = {}
        seen = set()
        adjacency: Dict[str, set] = {v: set() for v in self.vertices}
        ecs = edge_colours or {}
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u!r}")
            if u not in vset or v not in vset:
                raise GraphError(f"edge ({u!r}, {v!r}) references a missing vertex")
            k = edge_key(u, v)
            if k in seen:
                raise GraphError(f"duplicate edge {k!r}")
            seen.add(k)
            adjacency[u].add(v)
            adjacency[v].add(u)
            self.edge_colours[k] = ecs.get(k, ecs.get((v, u)))
        self.edges: FrozenSet[Tuple[str, str]] = frozenset(seen)
        self._adj = {v: frozenset(ns) for v, ns in adjacency.items()}

    # -- queries -------------------------------------------------------------

    def __len__(self):
        return len(self.vertices)

    def has_vertex(self, v: str) -> bool:
        return v in self._adj

    def has_edge(self, u: str, v: str) -> bool:
        return edge_key(u, v) in self.edges

    def edge_colour(self, u: str, v: str) -> Optional[str]:
        return self.edge_colours[edge_key(u, v)]

    def colour(self, v: str) -> str:
        return self.colours[v]

    def neighbours(self, v: str) -> FrozenSet[str]:
        return self._adj[v]

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def is_regular(self, k: Optional[int] = None) -> Optional[int]:
        degs = {self.degree(v) for v in self.vertices}
        if len(degs) != 1:
            return None
        d = degs.pop()
        if k is not None and d != k:
            return None
        return d

    def colour_histogram(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for v in self.vertices:
            out[self.colours[v]] = out.get(self.colours[v], 0) + 1
        return out

    def relabel(self, mapping: Dict[str, str]) -> "ColouredGraph":
        return ColouredGraph(
            [mapping[v] for v in self.vertices],
            {mapping[v]: c for v, c in self.colours.items()},
            [(mapping[u], mapping[v]) for u, v in self.edges],
            {edge_key(mapping[u], mapping[v]): c for (u, v), c in self.edge_colours.items()},
        )

    def recoloured(self, colours: Dict[str, str]) -> "ColouredGraph":
        return ColouredGraph(self.vertices, colours, self.edges, self.edge_colours)

    def __eq__(self, other):
        return (isinstance(other, ColouredGraph) and self.vertices == other.vertices
                and self.colours == other.colours and self.edges == other.edges
                and self.edge_colours == other.edge_colours)

    # -- wire format -----------------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "vertices": [{"colour": self.colours[v], "id": v} for v in self.vertices],
            "edges": [{"colour": self.edge_colours[k], "u": k[0], "v": k[1]}
                      for k in sorted(self.edges)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_obj(obj: dict) -> "ColouredGraph":
        if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
            raise GraphError("graph object needs 'vertices' and 'edges'")
        verts = []
        colours = {}
        for entry in obj["vertices"]:
            vid = entry.get("id")
            if not isinstance(vid, str):
                raise GraphError("vertex id must be a string")
            if vid in colours:
                raise GraphError(f"duplicate vertex id {vid!r}")
            colour = entry.get("colour")
            if not isinstance(colour, str):
                raise GraphError(f"vertex {vid!r} needs a string colour")
            verts.append(vid)
            colours[vid] = colour
        edges = []
        ecolours = {}
        for entry in obj["edges"]:
            u, v = entry.get("u"), entry.get("v")
            if not isinstance(u, str) or not isinstance(v, str):
                raise GraphError("edge endpoints must be strings")
            c = entry.get("colour")
            if c is not None and not isinstance(c, str):
                raise GraphError("edge colour must be a string or null")
            edges.append((u, v))
            ecolours[edge_key(u, v)] = c
        return ColouredGraph(verts, colours, edges, ecolours)


def parse_graph(data: bytes) -> ColouredGraph:
    """Parse the JSON graph format; validates structure and references."""
    try:
        obj = json.loads(data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    return ColouredGraph.from_obj(obj)


# ---------------------------------------------------------------------------
# colour refinement
# ---------------------------------------------------------------------------


@dataclass
class RefinementResult:
    equivalent: bool
    colours: Dict[Tuple[int, str], int]  # (side, vertex) -> stable colour id
    iterations: int

    @property
    def distinguished(self) -> bool:
        return not self.equivalent


def colour_refinement(g: ColouredGraph, h: ColouredGraph) -> RefinementResult:
    """Joint iterated-degree refinement over both graphs.

    Vertices refine by (current colour, multiset of (neighbour colour, edge
    colour)) until the partition stabilises; the graphs are distinguished
    exactly when the stable colour-class size histograms differ.
    """
    sides = [(0, g), (1, h)]
    verts = [(s, v) for s, gr in sides for v in gr.vertices]
    colour: Dict[Tuple[int, str], int] = {}
    palette: Dict[str, int] = {}
    for s, gr in sides:
        for v in gr.vertices:
            c = gr.colours[v]
            if c not in palette:
                palette[c] = len(palette)
            colour[(s, v)] = palette[c]

    iterations = 0
    while True:
        signatures = {}
        for s, gr in sides:
            for v in gr.vertices:
                neigh = []
                for u in gr.neighbours(v):
                    ec = gr.edge_colour(u, v)
                    neigh.append((colour[(s, u)], "\x00none" if ec is None else ec))
                signatures[(s, v)] = (colour[(s, v)], tuple(sorted(neigh)))
        fresh = {sig: i for i, sig in enumerate(sorted(set(signatures.values())))}
        new_colour = {sv: fresh[signatures[sv]] for sv in verts}
        stable = True
        old_classes = {}
        new_classes = {}
        for sv in verts:
            old_classes.setdefault(colour[sv], set()).add(sv)
            new_classes.setdefault(new_colour[sv], set()).add(sv)
        if len(old_classes) != len(new_classes):
            stable = False
        colour = new_colour
        iterations += 1
        if stable:
            break

    hist_g: Dict[int, int] = {}
    hist_h: Dict[int, int] = {}
    for (s, v), c in colour.items():
        (hist_g if s == 0 else hist_h)[c] = (hist_g if s == 0 else hist_h).get(c, 0) + 1
    return RefinementResult(hist_g == hist_h, colour, iterations)


# ---------------------------------------------------------------------------
# brute-force isomorphism oracle
# ---------------------------------------------------------------------------


BRUTE_FORCE_CAP = 12


@dataclass
class IsoResult:
    mapping: Optional[Dict[str, str]]  # None when non-isomorphic

    @property
    def isomorphic(self) -> bool:
        return self.mapping is not None


def verify_isomorphism(g: ColouredGraph, h: ColouredGraph, mapping: Dict[str, str]) -> bool:
    """Exact edge-by-edge check that mapping is a colour-preserving isomorphism."""
    if set(mapping) != set(g.vertices):
        return False
    if sorted(mapping.values()) != list(h.vertices):
        return False
    for v in g.vertices:
        if g.colours[v] != h.colours[mapping[v]]:
            return False
    for u in g.vertices:
        for v in g.vertices:
            if u < v:
                eg = g.has_edge(u, v)
                eh = h.has_edge(mapping[u], mapping[v])
                if eg != eh:
                    return False
                if eg and g.edge_colour(u, v) != h.edge_colour(mapping[u], mapping[v]):
                    return False
    return True


def brute_force_isomorphic(g: ColouredGraph, h: ColouredGraph,
                           cap: int = BRUTE_FORCE_CAP) -> IsoResult:
    """Exhaustive backtracking over colour-respecting bijections.

    Instances with more than ``cap`` vertices on either side are refused.
    Returned mappings are re-verified edge by edge.
    """
    if len(g) > cap or len(h) > cap:
        raise GraphError(f"brute-force cap exceeded ({max(len(g), len(h))} > {cap})")
    if len(g) != len(h):
        return IsoResult(None)
    if g.colour_histogram() != h.colour_histogram():
        return IsoResult(None)

    order = sorted(g.vertices, key=lambda v: (g.colours[v], -g.degree(v), v))
    used = set()
    mapping: Dict[str, str] = {}

    def compatible(v: str, w: str) -> bool:
        if g.colours[v] != h.colours[w]:
            return False
        if g.degree(v) != h.degree(w):
            return False
        for u, img in mapping.items():
            eg = g.has_edge(u, v)
            eh = h.has_edge(img, w)
            if eg != eh:
                return False
            if eg and g.edge_colour(u, v) != h.edge_colour(img, w):
                return False
        return True

    def backtrack(idx: int) -> bool:
        if idx == len(order):
            return True
        v = order[idx]
        for w in h.vertices:
            if w in used or not compatible(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if backtrack(idx + 1):
                return True
            del mapping[v]
            used.remove(w)
        return False

    if backtrack(0):
        assert verify_isomorphism(g, h, mapping)
        return IsoResult(dict(mapping))
    return IsoResult(None)
