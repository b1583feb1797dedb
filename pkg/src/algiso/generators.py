"""Instance generators: named graph families, the worked small instances, and
seeded random coloured pairs for the test corpus."""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Tuple

from .graphs import ColouredGraph, GraphError, edge_key

BLANK = ""


def complete_graph(n: int, prefix: str = "v", colour: str = BLANK) -> ColouredGraph:
    verts = [f"{prefix}{i}" for i in range(n)]
    edges = [(verts[i], verts[j]) for i in range(n) for j in range(i + 1, n)]
    return ColouredGraph(verts, {v: colour for v in verts}, edges)


def cycle_graph(n: int, prefix: str = "v", colour: str = BLANK) -> ColouredGraph:
    if n < 3:
        raise GraphError("cycles need at least 3 vertices")
    verts = [f"{prefix}{i}" for i in range(n)]
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    return ColouredGraph(verts, {v: colour for v in verts}, edges)


def grid_graph(a: int, b: int, prefix: str = "v", colour: str = BLANK) -> ColouredGraph:
    verts = [f"{prefix}{i}_{j}" for i in range(a) for j in range(b)]
    edges = []
    for i in range(a):
        for j in range(b):
            if i + 1 < a:
                edges.append((f"{prefix}{i}_{j}", f"{prefix}{i+1}_{j}"))
            if j + 1 < b:
                edges.append((f"{prefix}{i}_{j}", f"{prefix}{i}_{j+1}"))
    return ColouredGraph(verts, {v: colour for v in verts}, edges)


def circulant_graph(n: int, offsets: Tuple[int, ...], prefix: str = "v",
                    colour: str = BLANK) -> ColouredGraph:
    verts = [f"{prefix}{i}" for i in range(n)]
    edges = set()
    for i in range(n):
        for off in offsets:
            edges.add(edge_key(verts[i], verts[(i + off) % n]))
    return ColouredGraph(verts, {v: colour for v in verts}, sorted(edges))


def random_regular_graph(degree: int, n: int, rng: random.Random,
                         prefix: str = "v", colour: str = BLANK,
                         max_tries: int = 2000) -> ColouredGraph:
    """Pairing-model sampler with retry; exact degree, simple graph."""
    if degree * n % 2 != 0 or degree >= n:
        raise GraphError("no simple regular graph with these parameters")
    verts = [f"{prefix}{i}" for i in range(n)]
    for _ in range(max_tries):
        stubs = [i for i in range(n) for _ in range(degree)]
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for a, b in zip(stubs[::2], stubs[1::2]):
            if a == b:
                ok = False
                break
            k = edge_key(verts[a], verts[b])
            if k in edges:
                ok = False
                break
            edges.add(k)
        if ok:
            return ColouredGraph(verts, {v: colour for v in verts}, sorted(edges))
    raise GraphError("random regular sampling did not converge")


def disjoint_union(*graphs: ColouredGraph) -> ColouredGraph:
    verts: List[str] = []
    colours: Dict[str, str] = {}
    edges = []
    ecols = {}
    for g in graphs:
        for v in g.vertices:
            if v in colours:
                raise GraphError(f"vertex name clash {v!r} in disjoint union")
            verts.append(v)
            colours[v] = g.colours[v]
        for (u, v) in sorted(g.edges):
            edges.append((u, v))
            ecols[edge_key(u, v)] = g.edge_colour(u, v)
    return ColouredGraph(verts, colours, edges, ecols)


def named_base_graph(spec_text: str, rng: Optional[random.Random] = None) -> ColouredGraph:
    """Parse a base-graph family spec: complete:N, cycle:N, grid:AxB,
    circulant:N:o1+o2, random-regular:D:N."""
    parts = spec_text.split(":")
    kind = parts[0]
    if kind == "complete":
        return complete_graph(int(parts[1]))
    if kind == "cycle":
        return cycle_graph(int(parts[1]))
    if kind == "grid":
        a, b = parts[1].split("x")
        return grid_graph(int(a), int(b))
    if kind == "circulant":
        offsets = tuple(int(t) for t in parts[2].split("+"))
        return circulant_graph(int(parts[1]), offsets)
    if kind == "random-regular":
        return random_regular_graph(int(parts[1]), int(parts[2]), rng or random.Random(0))
    raise GraphError(f"unknown base graph family {spec_text!r}")


# ---------------------------------------------------------------------------
# worked instances
# ---------------------------------------------------------------------------


def paper_example_pair() -> Tuple[ColouredGraph, ColouredGraph]:
    """Coloured 6-vertex pair: two triangles vs a 6-cycle, three colour pairs.

    Vertices 1,2 green; 3,4 blue; 5,6 red. The first graph is the union of
    triangles {1,3,5} and {2,4,6}; the second is the 6-cycle 1-3-6-2-4-5-1.
    """
    colours = {"1": "green", "2": "green", "3": "blue", "4": "blue",
               "5": "red", "6": "red"}
    verts = list(colours)
    g = ColouredGraph(verts, colours,
                      [("1", "3"), ("2", "4"), ("1", "5"), ("2", "6"), ("3", "5"), ("4", "6")])
    h = ColouredGraph(verts, colours,
                      [("1", "3"), ("2", "4"), ("1", "5"), ("2", "6"), ("3", "6"), ("4", "5")])
    return g, h


def integer_gap_pair() -> Tuple[ColouredGraph, ColouredGraph]:
    """Uncoloured 9-vertex pair: three triangles vs a triangle plus a 6-cycle."""
    g = disjoint_union(complete_graph(3, prefix="a"),
                       complete_graph(3, prefix="b"),
                       complete_graph(3, prefix="c"))
    tri = complete_graph(3, prefix="t")
    cyc = cycle_graph(6, prefix="w")
    h = disjoint_union(tri, cyc)
    return g, h


def integer_gap_colourings() -> Tuple[Dict[str, Dict[str, str]], Dict[str, Dict[str, str]]]:
    """The two suitable colourings (index 3 and index 2) of integer_gap_pair.

    Returned as ({"G": vertex->colour, "H": ...}, same) for the index-3 and
    index-2 colourings respectively.
    """
    index3_g = {}
    for p in ("a", "b", "c"):
        for i in range(3):
            index3_g[f"{p}{i}"] = f"C{i}"
    index3_h = {f"t{i}": f"C{i}" for i in range(3)}
    for i in range(6):
        index3_h[f"w{i}"] = f"C{i % 3}"

    # recolour the triangle in H and one triangle in G with fresh singletons
    index2_g = dict(index3_g)
    for i in range(3):
        index2_g[f"c{i}"] = f"C{i + 3}"
    index2_h = dict(index3_h)
    for i in range(3):
        index2_h[f"t{i}"] = f"C{i + 3}"

    return ({"G": index3_g, "H": index3_h}, {"G": index2_g, "H": index2_h})


# ---------------------------------------------------------------------------
# random coloured pairs
# ---------------------------------------------------------------------------


def random_coloured_graph(rng: random.Random, n_vertices: int, n_colours: int,
                          edge_prob: float = 0.5, prefix: str = "v") -> ColouredGraph:
    verts = [f"{prefix}{i}" for i in range(n_vertices)]
    colours = {v: f"k{rng.randrange(n_colours)}" for v in verts}
    edges = [(u, v) for i, u in enumerate(verts) for v in verts[i + 1:]
             if rng.random() < edge_prob]
    return ColouredGraph(verts, colours, edges)


def random_coloured_pair(rng: random.Random, n_vertices: int, n_colours: int,
                         isomorphic: Optional[bool] = None,
                         edge_prob: float = 0.5):
    """A seeded pair of coloured graphs plus a planted mapping when isomorphic.

    With ``isomorphic=None`` the second graph reuses the first one's colour
    multiset but has independent edges, so both outcomes occur.
    """
    g = random_coloured_graph(rng, n_vertices, n_colours, edge_prob, prefix="g")
    names = [f"h{i}" for i in range(n_vertices)]
    if isomorphic:
        perm = list(range(n_vertices))
        rng.shuffle(perm)
        mapping = {f"g{i}": names[perm[i]] for i in range(n_vertices)}
        h = g.relabel(mapping)
        return g, h, mapping
    shuffled = list(g.vertices)
    rng.shuffle(shuffled)
    colours = {names[i]: g.colours[shuffled[i]] for i in range(n_vertices)}
    edges = [(u, v) for i, u in enumerate(names) for v in names[i + 1:]
             if rng.random() < edge_prob]
    h = ColouredGraph(names, colours, edges)
    return g, h, None
