"""Canonical forms, isomorphism, automorphism counting, and appearance.

The canonical labeling is exact: iterative neighborhood refinement plus a
backtracking search over refinement-stable orderings, pruned by the orbits
of automorphisms discovered along the way.  Intended scale is n <= 12,
which covers every use in the package.

Structures are handled as vertex-colored graphs, the color of a vertex
recording which first-order variables pin it and which set variables
contain it.
"""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Hashable, Optional, Sequence

from msolimits.errors import InputError
from msolimits.graphs import Graph, Structure, relabel

Cert = tuple


def _refine(n: int, adj: list[set[int]], colors: list[int]) -> list[int]:
    """Equitable 1-dimensional refinement; cell numbering is invariant
    under vertex relabeling (cells ordered by parent color + signature)."""
    while True:
        sigs = []
        for v in range(n):
            counts: dict[int, int] = {}
            for w in adj[v]:
                c = colors[w]
                counts[c] = counts.get(c, 0) + 1
            sigs.append((colors[v], tuple(sorted(counts.items()))))
        index = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new_colors = [index[s] for s in sigs]
        if len(index) == len(set(colors)) :
            return new_colors
        colors = new_colors


def _individualize(colors: list[int], v: int) -> list[int]:
    """Give v a cell of its own, ordered just before the rest of its cell."""
    out = []
    for w, c in enumerate(colors):
        if c < colors[v] or w == v:
            out.append(2 * c)
        else:
            out.append(2 * c + 1)
    index = {c: i for i, c in enumerate(sorted(set(out)))}
    return [index[c] for c in out]


def _first_nonsingleton(colors: list[int]) -> Optional[list[int]]:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    for c in sorted(cells):
        if len(cells[c]) > 1:
            return cells[c]
    return None


class _CanonSearch:
    def __init__(self, n: int, adj: list[set[int]], init_colors: list[int]):
        self.n = n
        self.adj = adj
        self.init_colors = init_colors
        self.best_cert: Optional[Cert] = None
        self.best_labels: Optional[list[int]] = None
        self.autos: list[tuple[int, ...]] = []

    def run(self) -> tuple[Cert, list[int]]:
        self._node(_refine(self.n, self.adj, list(self.init_colors)), [])
        assert self.best_cert is not None and self.best_labels is not None
        return self.best_cert, self.best_labels

    def _leaf(self, colors: list[int]) -> None:
        labels = colors  # discrete: color index == position
        edges = sorted(
            (min(labels[u], labels[v]), max(labels[u], labels[v]))
            for u in range(self.n)
            for v in self.adj[u]
            if u < v
        )
        inv = [0] * self.n
        for v, l in enumerate(labels):
            inv[l] = v
        cert: Cert = (tuple(self.init_colors[inv[i]] for i in range(self.n)), tuple(edges))
        if self.best_cert is None or cert < self.best_cert:
            self.best_cert = cert
            self.best_labels = list(labels)
        elif cert == self.best_cert:
            # two labelings with the same certificate compose to an automorphism
            assert self.best_labels is not None
            best_inv = [0] * self.n
            for v, l in enumerate(self.best_labels):
                best_inv[l] = v
            self.autos.append(tuple(best_inv[labels[v]] for v in range(self.n)))

    def _node(self, colors: list[int], path: list[int]) -> None:
        cell = _first_nonsingleton(colors)
        if cell is None:
            self._leaf(colors)
            return
        processed: list[int] = []
        for v in cell:
            if processed and self._in_orbit(v, processed, path):
                continue
            processed.append(v)
            self._node(_refine(self.n, self.adj, _individualize(colors, v)), path + [v])

    def _in_orbit(self, v: int, processed: list[int], path: list[int]) -> bool:
        """Is v in the orbit of an already-processed sibling under the
        subgroup of discovered automorphisms fixing the path pointwise?"""
        gens = [a for a in self.autos if all(a[p] == p for p in path)]
        if not gens:
            return False
        parent = list(range(self.n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in gens:
            for u in range(self.n):
                ru, rv = find(u), find(a[u])
                if ru != rv:
                    parent[ru] = rv
        rv = find(v)
        return any(find(u) == rv for u in processed)


def _canonical(
    n: int, adj: list[set[int]], init_colors: list[int]
) -> tuple[Cert, list[int]]:
    """Canonical certificate and labeling (0-based vertex -> 0-based label)."""
    if n == 0:
        return ((), ()), []
    return _CanonSearch(n, adj, init_colors).run()


def _graph_internals(g: Graph) -> tuple[int, list[set[int]]]:
    adj: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in g.edges:
        adj[u - 1].add(v - 1)
        adj[v - 1].add(u - 1)
    return g.n, adj


def _color_indices(values: Sequence[Hashable]) -> list[int]:
    index = {c: i for i, c in enumerate(sorted(set(values), key=repr))}
    return [index[c] for c in values]


def canonical_key(g: Graph) -> Hashable:
    """Isomorphism-invariant key: two graphs get equal keys iff isomorphic."""
    n, adj = _graph_internals(g)
    cert, _ = _canonical(n, adj, [0] * n)
    return (n, cert)


def canonical_form(g: Graph) -> Graph:
    """Isomorphism-invariant, idempotent representative of g's class."""
    n, adj = _graph_internals(g)
    _, labels = _canonical(n, adj, [0] * n)
    return relabel(g, {v + 1: labels[v] + 1 for v in range(n)})


def isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    if g.degree_sequence() != h.degree_sequence():
        return False
    return canonical_key(g) == canonical_key(h)


def automorphism_count(g: Graph) -> int:
    """Exact |Aut(g)| by orbit-stabilizer over individualized colorings."""
    if g.n == 0:
        raise InputError("automorphism count undefined for the empty graph")
    n, adj = _graph_internals(g)

    def count(colors: list[int]) -> int:
        colors = _refine(n, adj, colors)
        cell = _first_nonsingleton(colors)
        if cell is None:
            return 1
        v = cell[0]
        certs = {
            w: _canonical(n, adj, _individualize(colors, w))[0] for w in cell
        }
        orbit = sum(1 for w in cell if certs[w] == certs[v])
        return orbit * count(_individualize(colors, v))

    return count([0] * n)


# --- structures as colored graphs ----------------------------------------

def _structure_colors(s: Structure) -> list[Hashable]:
    fo, so = s.fo, s.so
    colors: list[Hashable] = []
    for v in s.graph.vertices:
        pins = tuple(sorted(name for name, w in fo.items() if w == v))
        members = tuple(sorted(name for name, vs in so.items() if v in vs))
        colors.append((pins, members))
    return colors


def structure_key(s: Structure) -> Hashable:
    """Key invariant under vertex relabeling; equal keys iff there is an
    isomorphism preserving edges and the whole valuation."""
    n, adj = _graph_internals(s.graph)
    cert, _ = _canonical(n, adj, _color_indices(_structure_colors(s)))
    return (
        n,
        tuple(sorted(s.fo)),
        tuple(sorted(s.so)),
        cert,
    )


def isomorphic_structures(a: Structure, b: Structure) -> bool:
    return structure_key(a) == structure_key(b)


def appears(rooted: Structure, host: Graph) -> bool:
    """Does the rooted structure appear in host: an induced copy attached
    to the rest of the host by exactly one edge, incident on its root?"""
    if set(rooted.fo) != {"Root"} or rooted.so:
        raise InputError("appearance queries need a structure carrying only Root")
    k = rooted.graph.n
    if k == 0 or k > host.n:
        return False
    target = structure_key(rooted)
    host_adj = host.adjacency()
    for subset in combinations(host.vertices, k):
        inside = set(subset)
        crossing = [
            (u, v)
            for u in inside
            for v in host_adj[u]
            if v not in inside
        ]
        if len(crossing) != 1:
            continue
        r = crossing[0][0]
        order = {v: i + 1 for i, v in enumerate(sorted(inside))}
        induced = Graph(
            k,
            (
                (order[u], order[v])
                for u, v in host.edges
                if u in inside and v in inside
            ),
        )
        candidate = Structure(induced, {"Root": order[r]})
        if structure_key(candidate) == target:
            return True
    return False
