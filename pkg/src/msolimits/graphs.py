"""Graphs, valued structures, and the structure-combination algebra.

Vertices are 1..n.  All values are immutable after construction and all
operations are pure, so everything here is safe to share across threads.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from typing import Optional

from msolimits.errors import InputError

ROOT = "Root"


class VarSet:
    """A finite set of first-order names and a disjoint set of set-variable
    names, fixing the vocabulary for rank/threshold computations."""

    __slots__ = ("fo_vars", "so_vars")

    def __init__(self, fo_vars: Iterable[str] = (), so_vars: Iterable[str] = ()):
        fo = frozenset(fo_vars)
        so = frozenset(so_vars)
        shared = fo & so
        if shared:
            raise InputError(f"variable names in both namespaces: {sorted(shared)}")
        object.__setattr__(self, "fo_vars", fo)
        object.__setattr__(self, "so_vars", so)

    def __setattr__(self, name, value):
        raise AttributeError("VarSet is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, VarSet)
            and self.fo_vars == other.fo_vars
            and self.so_vars == other.so_vars
        )

    def __hash__(self):
        return hash((self.fo_vars, self.so_vars))

    def __repr__(self):
        return f"VarSet(fo={sorted(self.fo_vars)}, so={sorted(self.so_vars)})"

    def with_fo(self, name: str) -> "VarSet":
        return VarSet(self.fo_vars | {name}, self.so_vars)

    def with_so(self, name: str) -> "VarSet":
        return VarSet(self.fo_vars, self.so_vars | {name})


class Graph:
    """Simple undirected graph on the vertex set {1..n}.

    ``edges`` is a frozenset of (u, v) pairs with u < v.  The empty graph
    (n = 0) is admitted.
    """

    __slots__ = ("n", "edges", "_hash")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise InputError(f"vertex count must be >= 0, got {n}")
        norm = set()
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise InputError(f"edge ({u},{v}) outside 1..{n}")
            norm.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "_hash", hash((n, self.edges)))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Graph({self.n}, {sorted(self.edges)})"

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degree_sequence(self) -> tuple[int, ...]:
        adj = self.adjacency()
        return tuple(sorted(len(adj[v]) for v in self.vertices))


def relabel(g: Graph, perm: Mapping[int, int]) -> Graph:
    """Apply a vertex bijection {1..n} -> {1..n}."""
    if sorted(perm) != list(g.vertices) or sorted(perm.values()) != list(g.vertices):
        raise InputError("perm is not a bijection on the vertex set")
    return Graph(g.n, ((perm[u], perm[v]) for u, v in g.edges))


def empty_graph(n: int = 0) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph(n, ((u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)))


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(1, n)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError("cycle needs at least 3 vertices")
    return Graph(n, [(i, i + 1) for i in range(1, n)] + [(n, 1)])


def star_graph(leaves: int) -> Graph:
    """Star with vertex 1 as the centre."""
    return Graph(leaves + 1, ((1, i) for i in range(2, leaves + 2)))


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph(a + b, ((u, a + v) for u in range(1, a + 1) for v in range(1, b + 1)))


class Structure:
    """A graph together with a partial valuation of first-order and set
    variables.

    A structure is rooted iff the reserved first-order name ``Root`` is
    assigned.  The first-order and set-variable namespaces are disjoint.
    """

    __slots__ = ("graph", "_fo", "_so", "_hash")

    def __init__(
        self,
        graph: Graph,
        fo: Optional[Mapping[str, int]] = None,
        so: Optional[Mapping[str, Iterable[int]]] = None,
    ):
        fo = dict(fo or {})
        so = {name: frozenset(vs) for name, vs in (so or {}).items()}
        shared = set(fo) & set(so)
        if shared:
            raise InputError(f"variable names used in both namespaces: {sorted(shared)}")
        for name, v in fo.items():
            if not (1 <= v <= graph.n):
                raise InputError(f"first-order variable {name} -> {v} outside 1..{graph.n}")
        for name, vs in so.items():
            for v in vs:
                if not (1 <= v <= graph.n):
                    raise InputError(f"set variable {name} contains {v} outside 1..{graph.n}")
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "_fo", tuple(sorted(fo.items())))
        object.__setattr__(self, "_so", tuple(sorted(so.items())))
        object.__setattr__(self, "_hash", hash((graph, self._fo, self._so)))

    def __setattr__(self, name, value):
        raise AttributeError("Structure is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Structure)
            and self.graph == other.graph
            and self._fo == other._fo
            and self._so == other._so
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Structure({self.graph!r}, fo={dict(self._fo)}, so={{{', '.join(f'{k}: {sorted(v)}' for k, v in self._so)}}})"

    @property
    def fo(self) -> dict[str, int]:
        return dict(self._fo)

    @property
    def so(self) -> dict[str, frozenset[int]]:
        return dict(self._so)

    @property
    def is_rooted(self) -> bool:
        return any(name == ROOT for name, _ in self._fo)

    @property
    def root(self) -> int:
        for name, v in self._fo:
            if name == ROOT:
                return v
        raise InputError("structure is not rooted")

    def assign_fo(self, name: str, v: int) -> "Structure":
        fo = self.fo
        fo[name] = v
        return Structure(self.graph, fo, self.so)

    def assign_so(self, name: str, vs: Iterable[int]) -> "Structure":
        so = self.so
        so[name] = frozenset(vs)
        return Structure(self.graph, self.fo, so)

    def drop(self, name: str) -> "Structure":
        fo, so = self.fo, self.so
        fo.pop(name, None)
        so.pop(name, None)
        return Structure(self.graph, fo, so)


def plain(g: Graph) -> Structure:
    """Structure with the empty valuation."""
    return Structure(g)


def rooted(g: Graph, root: int = 1) -> Structure:
    return Structure(g, {ROOT: root})


def disjoint_sum(a: Structure, b: Structure) -> Structure:
    """Disjoint union of structures; b's vertices are relabeled by offset.

    First-order assignments are inherited (their domains must be disjoint);
    each set variable maps to the union of its two images.
    """
    overlap = set(a.fo) & set(b.fo)
    if overlap:
        raise InputError(f"first-order variable domains overlap: {sorted(overlap)}")
    na = a.graph.n
    edges = list(a.graph.edges) + [(u + na, v + na) for u, v in b.graph.edges]
    fo = a.fo
    fo.update({name: v + na for name, v in b.fo.items()})
    so = a.so
    for name, vs in b.so.items():
        so[name] = so.get(name, frozenset()) | frozenset(v + na for v in vs)
    return Structure(Graph(na + b.graph.n, edges), fo, so)


def rooted_sum(a: Structure, b: Structure) -> Structure:
    """Disjoint union plus a bridge between the two roots.

    The root of the result is the root of ``a``; this asymmetry is part of
    the definition and deliberately not canonicalized away.
    """
    if not a.is_rooted or not b.is_rooted:
        raise InputError("rooted_sum needs two rooted structures")
    shared = (set(a.fo) & set(b.fo)) - {ROOT}
    if shared:
        raise InputError(f"shared non-root first-order variables: {sorted(shared)}")
    na = a.graph.n
    b_root = b.root + na
    edges = (
        list(a.graph.edges)
        + [(u + na, v + na) for u, v in b.graph.edges]
        + [(a.root, b_root)]
    )
    fo = a.fo
    for name, v in b.fo.items():
        if name != ROOT:
            fo[name] = v + na
    so = a.so
    for name, vs in b.so.items():
        so[name] = so.get(name, frozenset()) | frozenset(v + na for v in vs)
    return Structure(Graph(na + b.graph.n, edges), fo, so)


def repeat_sum(a: Structure, b: Structure, c: int) -> Structure:
    """Attach ``c`` copies of the rooted structure ``b`` to ``a``."""
    if c < 0:
        raise InputError(f"copy count must be >= 0, got {c}")
    if not b.is_rooted or set(b.fo) != {ROOT}:
        raise InputError("the repeated structure must carry exactly the Root variable")
    out = a
    for _ in range(c):
        out = rooted_sum(out, b)
    return out


def components(g: Graph) -> list[Graph]:
    """Connected components, locally relabeled 1..k preserving vertex order,
    listed by minimum original vertex."""
    adj = g.adjacency()
    seen: set[int] = set()
    out = []
    for start in g.vertices:
        if start in seen:
            continue
        comp = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    frontier.append(w)
        seen |= comp
        order = {v: i + 1 for i, v in enumerate(sorted(comp))}
        out.append(
            Graph(len(comp), ((order[u], order[v]) for u, v in g.edges if u in comp))
        )
    return out


def is_connected(g: Graph) -> bool:
    """True iff g has exactly one component; the empty graph is not
    connected by convention."""
    return len(components(g)) == 1


# --- GRAPH v1 text format -------------------------------------------------

def graph_to_text(g: Graph) -> str:
    lines = [f"graph {g.n}"]
    lines += [f"edge {u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "graph":
            if n is not None:
                raise InputError(f"line {lineno}: duplicate graph header")
            if len(parts) != 2 or not parts[1].isdigit():
                raise InputError(f"line {lineno}: expected 'graph <n>'")
            n = int(parts[1])
        elif parts[0] == "edge":
            if n is None:
                raise InputError(f"line {lineno}: edge before graph header")
            if len(parts) != 3:
                raise InputError(f"line {lineno}: expected 'edge <u> <v>'")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise InputError(f"line {lineno}: edge endpoints must be integers") from None
            edges.append((u, v))
        else:
            raise InputError(f"line {lineno}: unknown directive {parts[0]!r}")
    if n is None:
        raise InputError("missing 'graph <n>' header")
    try:
        return Graph(n, edges)
    except InputError as exc:
        raise InputError(f"invalid GRAPH v1 payload: {exc}") from None


# --- Structure JSON -------------------------------------------------------

def structure_to_dict(s: Structure) -> dict:
    return {
        "n": s.graph.n,
        "edges": [[u, v] for u, v in sorted(s.graph.edges)],
        "fo": s.fo,
        "so": {name: sorted(vs) for name, vs in s.so.items()},
    }


def structure_from_dict(d: Mapping) -> Structure:
    try:
        g = Graph(int(d["n"]), ((int(u), int(v)) for u, v in d.get("edges", [])))
        return Structure(g, d.get("fo", {}), d.get("so", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid structure JSON: {exc}") from None


def structure_to_json(s: Structure) -> str:
    return json.dumps(structure_to_dict(s), sort_keys=True)


def structure_from_json(text: str) -> Structure:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid structure JSON: {exc}") from None
    return structure_from_dict(payload)
