"""Addable minor-closed graph classes: membership predicates, census
machinery, and growth-constant data.

Growth constants are configuration data, not computed here: the planar
value 27.22679 and the forest value e are shipped; treewidth-k and
clique-minor-free classes need a user-supplied constant before any
Poisson model can be built on them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional

import networkx as nx

from msolimits.canon import automorphism_count, canonical_form, canonical_key, structure_key
from msolimits.errors import InfeasibleError, InputError
from msolimits.graphs import Graph, complete_graph, is_connected

GENERATOR_VERSION = "census-v1"


# --- membership predicates ------------------------------------------------

def _to_nx(g: Graph) -> "nx.Graph":
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges)
    return h


def is_planar(g: Graph) -> bool:
    """Exact planarity.  Cheap certificates first: fewer than 9 edges can
    hold no Kuratowski minor; more than 3n-6 edges violates Euler."""
    m = len(g.edges)
    if g.n <= 4 or m <= 8:
        return True
    if m > 3 * g.n - 6:
        return False
    ok, _ = nx.check_planarity(_to_nx(g), counterexample=False)
    return ok


def is_forest(g: Graph) -> bool:
    if len(g.edges) >= max(g.n, 1):
        return False
    parent = list(range(g.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def treewidth_le(g: Graph, k: int) -> bool:
    """Exact treewidth decision by dynamic programming over elimination
    orderings (subset DP); n <= 12."""
    if g.n > 12:
        raise InfeasibleError(f"treewidth DP bounded at n <= 12, got n = {g.n}")
    if k < 0:
        return g.n == 0
    n = g.n
    if n <= k + 1:
        return True
    adj = [0] * n
    for u, v in g.edges:
        adj[u - 1] |= 1 << (v - 1)
        adj[v - 1] |= 1 << (u - 1)
    full = (1 << n) - 1

    def back_degree(S: int, v: int) -> int:
        # vertices outside S+{v} reachable from v via paths inside S
        seen = 1 << v
        frontier = adj[v]
        reach = 0
        while True:
            reach |= frontier & ~S & ~(1 << v)
            inside = frontier & S & ~seen
            if not inside:
                break
            seen |= inside
            nxt = 0
            w = inside
            while w:
                low = w & -w
                nxt |= adj[low.bit_length() - 1]
                w ^= low
            frontier = nxt & ~seen
        return bin(reach).count("1")

    INF = n + 1
    f = [INF] * (1 << n)
    f[0] = -1
    for S in range(1, 1 << n):
        best = INF
        rest = S
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            prev = f[S ^ low]
            if prev < best:
                width = back_degree(S ^ low, v)
                cand = prev if prev > width else width
                if cand < best:
                    best = cand
        f[S] = best
        # early exit hook: keep exact; bound check happens at the end
    return f[full] <= k


def _subgraph_embeds(h: Graph, g: Graph) -> bool:
    """Is h isomorphic to a (not necessarily induced) subgraph of g?"""
    if h.n > g.n or len(h.edges) > len(g.edges):
        return False
    g_adj = g.adjacency()
    h_adj = h.adjacency()
    h_order = sorted(h.vertices, key=lambda v: -len(h_adj[v]))
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def extend(i: int) -> bool:
        if i == len(h_order):
            return True
        hv = h_order[i]
        needed = [assignment[w] for w in h_adj[hv] if w in assignment]
        for gv in g.vertices:
            if gv in used:
                continue
            if len(g_adj[gv]) < len(h_adj[hv]):
                continue
            if all(x in g_adj[gv] for x in needed):
                assignment[hv] = gv
                used.add(gv)
                if extend(i + 1):
                    return True
                del assignment[hv]
                used.discard(gv)
        return False

    return extend(0)


def _contract(g: Graph, u: int, v: int) -> Graph:
    """Contract edge {u,v}; the merged vertex keeps u's slot."""
    keep = [w for w in g.vertices if w != v]
    order = {w: i + 1 for i, w in enumerate(keep)}
    edges = set()
    for a, b in g.edges:
        a2 = u if a == v else a
        b2 = u if b == v else b
        if a2 != b2:
            edges.add((order[a2], order[b2]))
    return Graph(g.n - 1, edges)


def has_minor(g: Graph, h: Graph) -> bool:
    """Exact minor containment by branching on edge contractions with
    isomorphism pruning; n <= 12."""
    if g.n > 12 or h.n > 12:
        raise InfeasibleError("minor search bounded at n <= 12")
    h = canonical_form(h)
    seen: set = set()

    def search(g0: Graph) -> bool:
        if g0.n < h.n or len(g0.edges) < len(h.edges):
            return False
        key = canonical_key(g0)
        if key in seen:
            return False
        seen.add(key)
        if _subgraph_embeds(h, g0):
            return True
        return any(search(_contract(g0, u, v)) for u, v in g0.edges)

    return search(g)


# --- class descriptors ----------------------------------------------------

@dataclass(frozen=True)
class GraphClass:
    """An addable minor-closed graph class.

    All shipped classes are decomposable and bridge-addable, and closed
    under edge deletion (which is what keeps the sampler's toggle kernel
    inside the class).
    """

    name: str
    membership: Callable[[Graph], bool] = field(compare=False)
    growth_constant: Optional[float]
    growth_provenance: str
    enumeration_bound: int
    addable_note: str
    k: Optional[int] = None

    @property
    def key(self) -> tuple:
        return (self.name, self.k, GENERATOR_VERSION)

    def display_name(self) -> str:
        return self.name if self.k is None else f"{self.name}({self.k})"

    def require_gamma(self) -> float:
        if self.growth_constant is None:
            raise InputError(
                f"class {self.display_name()} has no shipped growth constant; supply one"
            )
        return self.growth_constant

    def with_gamma(self, gamma: float) -> "GraphClass":
        return GraphClass(
            name=self.name,
            membership=self.membership,
            growth_constant=gamma,
            growth_provenance="user-supplied",
            enumeration_bound=self.enumeration_bound,
            addable_note=self.addable_note,
            k=self.k,
        )


PLANAR_GAMMA = 27.22679  # stated precision of the known analytic value


def planar_class() -> GraphClass:
    return GraphClass(
        name="planar",
        membership=is_planar,
        growth_constant=PLANAR_GAMMA,
        growth_provenance="literature",
        enumeration_bound=10,
        addable_note="components of a planar graph are planar; a bridge between plane components keeps a plane drawing",
    )


def forests_class() -> GraphClass:
    return GraphClass(
        name="forests",
        membership=is_forest,
        growth_constant=math.e,
        growth_provenance="literature",
        enumeration_bound=12,
        addable_note="components of a forest are trees; a bridge between two trees forms a tree",
    )


def treewidth_class(k: int) -> GraphClass:
    if k < 1:
        raise InputError(f"treewidth bound must be >= 1, got {k}")
    return GraphClass(
        name="treewidth",
        membership=lambda g, k=k: treewidth_le(g, k),
        growth_constant=None,
        growth_provenance="unavailable",
        enumeration_bound=10,
        addable_note="treewidth is the max over components; a bridge never raises it above max(tw, 1)",
        k=k,
    )


def minor_free_class(k: int) -> GraphClass:
    if k < 3:
        raise InputError(f"excluded clique size must be >= 3, got {k}")
    clique = complete_graph(k)
    return GraphClass(
        name="minor-free",
        membership=lambda g, clique=clique: not has_minor(g, clique),
        growth_constant=None,
        growth_provenance="unavailable",
        enumeration_bound=10,
        addable_note="a clique minor lives in one component; a bridge is a cut edge and joins no minor branch sets",
        k=k,
    )


def class_by_name(name: str, k: Optional[int] = None) -> GraphClass:
    if name == "planar":
        return planar_class()
    if name == "forests":
        return forests_class()
    if name == "treewidth":
        if k is None:
            raise InputError("treewidth class needs parameter k")
        return treewidth_class(k)
    if name == "minor-free":
        if k is None:
            raise InputError("minor-free class needs parameter k")
        return minor_free_class(k)
    raise InputError(f"unknown class {name!r}; shipped: planar, forests, treewidth, minor-free")


# --- census ---------------------------------------------------------------

_census_cache: dict = {}


def enumerate_connected(c: GraphClass, n: int) -> list[tuple[Graph, int]]:
    """All unlabeled connected members of size n with automorphism counts,
    in canonical-form order.

    Sizes 1..6 come from edge-set enumeration; beyond that, members are
    grown by attaching one new vertex to every size-(n-1) representative
    (every connected graph has a non-cut vertex, and the classes are
    hereditary, so the augmentation is exhaustive).
    """
    if n < 1:
        raise InputError(f"size must be >= 1, got {n}")
    if n > c.enumeration_bound:
        raise InfeasibleError(
            f"enumeration of {c.display_name()} bounded at n <= {c.enumeration_bound}"
        )
    key = (c.key, n)
    if key in _census_cache:
        return _census_cache[key]
    if n <= 6:
        reps = {}
        pairs = list(combinations(range(1, n + 1), 2))
        for mask in range(1 << len(pairs)):
            g = Graph(n, (e for i, e in enumerate(pairs) if mask >> i & 1))
            if not is_connected(g):
                continue
            ck = canonical_key(g)
            if ck not in reps and c.membership(g):
                reps[ck] = canonical_form(g)
    else:
        reps = {}
        for parent, _aut in enumerate_connected(c, n - 1):
            verts = list(parent.vertices)
            for r in range(1, len(verts) + 1):
                for attach in combinations(verts, r):
                    g = Graph(n, list(parent.edges) + [(v, n) for v in attach])
                    ck = canonical_key(g)
                    if ck not in reps and c.membership(g):
                        reps[ck] = canonical_form(g)
    out = sorted(
        ((g, automorphism_count(g)) for g in reps.values()),
        key=lambda pair: canonical_key(pair[0]),
    )
    _census_cache[key] = out
    return out


def labeled_connected_count(c: GraphClass, n: int) -> int:
    total = 0
    fact = math.factorial(n)
    for _g, aut in enumerate_connected(c, n):
        total += fact // aut
    return total


def labeled_all_counts(c: GraphClass, max_n: int) -> list[int]:
    """Labeled member counts (connected or not) for n = 0..max_n, from the
    connected census via the component-of-vertex-1 recurrence."""
    conn = [0] + [labeled_connected_count(c, n) for n in range(1, max_n + 1)]
    all_counts = [1] + [0] * max_n
    for n in range(1, max_n + 1):
        total = 0
        for k in range(1, n + 1):
            total += math.comb(n - 1, k - 1) * conn[k] * all_counts[n - k]
        all_counts[n] = total
    return all_counts


def growth_ratio_sequence(c: GraphClass, max_n: int) -> list[float]:
    """Ratios N_n / (n * N_{n-1}) for n = 2..max_n, for eyeballing the
    approach to the growth constant.  Full member counts for forests,
    connected counts as a desk-scale proxy otherwise."""
    if c.name == "forests":
        counts = labeled_all_counts(c, max_n)[1:]
    else:
        counts = [labeled_connected_count(c, n) for n in range(1, max_n + 1)]
    return [counts[i] / ((i + 1) * counts[i - 1]) for i in range(1, len(counts))]


@dataclass(frozen=True)
class Census:
    class_name: str
    k: Optional[int]
    max_n: int
    labeled_connected_counts: tuple[int, ...]  # index 0 -> n=1
    reps: tuple[tuple[tuple[Graph, int], ...], ...]  # index 0 -> n=1

    def to_json(self) -> dict:
        return {
            "class": self.class_name,
            "k": self.k,
            "generator": GENERATOR_VERSION,
            "maxN": self.max_n,
            "labeledConnectedCounts": {
                str(n + 1): count for n, count in enumerate(self.labeled_connected_counts)
            },
            "unlabeledConnectedReps": {
                str(n + 1): [
                    {"edges": sorted(map(list, g.edges)), "n": g.n, "autCount": aut}
                    for g, aut in layer
                ]
                for n, layer in enumerate(self.reps)
            },
        }


def build_census(c: GraphClass, max_n: int) -> Census:
    layers = []
    counts = []
    fact = math.factorial
    for n in range(1, max_n + 1):
        layer = tuple(enumerate_connected(c, n))
        layers.append(layer)
        counts.append(sum(fact(n) // aut for _g, aut in layer))
    return Census(
        class_name=c.name,
        k=c.k,
        max_n=max_n,
        labeled_connected_counts=tuple(counts),
        reps=tuple(layers),
    )


def census_to_file(census: Census, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(census.to_json(), fh, indent=2, sort_keys=True)
