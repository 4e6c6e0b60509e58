"""Rank-m indistinguishability by game search, realized equivalence
classes, and the copy/disjoint-sum thresholds.

``equivalent_m`` is decided through rank types: the rank-m type of a
structure is its atom pattern together with the *sets* of rank-(m-1)
types reachable by one vertex move or one subset move.  Set equality of
reachable types on the two boards is exactly the forall/exists condition
pair of the m-round game, so two structures are equivalent iff their
types coincide.  Types are interned to small integers and memoized by
canonical form, which is what makes the 2^n subset branching bearable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Hashable, Optional, Sequence

from msolimits.canon import canonical_form, canonical_key, structure_key
from msolimits.errors import InfeasibleError, InputError
from msolimits.graphs import (
    Graph,
    Structure,
    VarSet,
    disjoint_sum,
    is_connected,
    plain,
    repeat_sum,
    rooted,
    rooted_sum,
)

_FRESH_FO = "_move_v{}"
_FRESH_SO = "_move_U{}"

_type_ids: dict = {}
_type_cache: dict = {}


def _intern(value: Hashable) -> int:
    ident = _type_ids.get(value)
    if ident is None:
        ident = len(_type_ids)
        _type_ids[value] = ident
    return ident


def _atom_type(s: Structure) -> int:
    """Quantifier-free type: the full atom pattern over assigned variables."""
    fo = s.fo
    so = s.so
    names = sorted(fo)
    eqs = []
    adjs = []
    for a, b in combinations(names, 2):
        eqs.append(fo[a] == fo[b])
        adjs.append(s.graph.has_edge(fo[a], fo[b]))
    members = tuple(
        fo[x] in so[X] for x in names for X in sorted(so)
    )
    return _intern(("atoms", tuple(names), tuple(sorted(so)), tuple(eqs), tuple(adjs), members))


def _subsets(n: int):
    verts = list(range(1, n + 1))
    for mask in range(1 << n):
        yield frozenset(v for i, v in enumerate(verts) if mask >> i & 1)


def rank_type(s: Structure, m: int) -> int:
    """Interned rank-m type of a structure."""
    if m < 0:
        raise InputError(f"rank must be >= 0, got {m}")
    if m == 0:
        return _atom_type(s)
    key = (structure_key(s), m)
    cached = _type_cache.get(key)
    if cached is not None:
        return cached
    fo_name = _FRESH_FO.format(len(s.fo))
    so_name = _FRESH_SO.format(len(s.so))
    point_types = frozenset(
        rank_type(s.assign_fo(fo_name, v), m - 1) for v in s.graph.vertices
    )
    set_types = frozenset(
        rank_type(s.assign_so(so_name, U), m - 1) for U in _subsets(s.graph.n)
    )
    result = _intern(("rank", m, _atom_type(s), point_types, set_types))
    _type_cache[key] = result
    return result


def equivalent_m(a: Structure, b: Structure, m: int) -> bool:
    """Does Duplicator win the m-round game on a and b?"""
    if set(a.fo) != set(b.fo) or set(a.so) != set(b.so):
        raise InputError("boards must assign the same variable names")
    return rank_type(a, m) == rank_type(b, m)


@dataclass(frozen=True)
class EquivClassId:
    """A realized equivalence class: canonical representative plus rank."""

    m: int
    representative: Structure
    members: tuple[Structure, ...]

    @property
    def key(self) -> Hashable:
        return (self.m, structure_key(self.representative))


def realized_classes(universe: Sequence[Structure], m: int) -> list[EquivClassId]:
    """Partition a finite universe by equivalent_m.  The representative of
    each class is its member with the least canonical form; classes are
    listed in representative order."""
    buckets: dict[int, list[Structure]] = {}
    for s in universe:
        buckets.setdefault(rank_type(s, m), []).append(s)

    def rep_order(s: Structure) -> Hashable:
        return (s.graph.n, structure_key(s))

    classes = []
    for members in buckets.values():
        members = sorted(members, key=rep_order)
        classes.append(EquivClassId(m=m, representative=members[0], members=tuple(members)))
    return sorted(classes, key=lambda c: rep_order(c.representative))


def classes_to_json(classes: Sequence[EquivClassId]) -> list[dict]:
    from msolimits.graphs import structure_to_dict

    return [
        {
            "m": c.m,
            "representative": structure_to_dict(c.representative),
            "members": [structure_to_dict(s) for s in c.members],
        }
        for c in classes
    ]


# --- thresholds -----------------------------------------------------------

IndexOracle = Callable[[int, VarSet], int]


def _fresh_fo_name(xi: VarSet) -> str:
    i = 0
    while f"x{i}" in xi.fo_vars:
        i += 1
    return f"x{i}"


def _fresh_so_name(xi: VarSet) -> str:
    i = 0
    while f"X{i}" in xi.so_vars:
        i += 1
    return f"X{i}"


def q_threshold(m: int, xi: VarSet, index_oracle: IndexOracle) -> int:
    """Copy threshold by the exact recursion
    q_0 = 0,  q_{m+1}(Xi) = max(q_m(Xi+x) + 1,  t_m(Xi+X) * q_m(Xi+X) + m)."""
    if m < 0:
        raise InputError(f"rank must be >= 0, got {m}")
    if m == 0:
        return 0
    xi_x = xi.with_fo(_fresh_fo_name(xi))
    xi_X = xi.with_so(_fresh_so_name(xi))
    return max(
        q_threshold(m - 1, xi_x, index_oracle) + 1,
        index_oracle(m - 1, xi_X) * q_threshold(m - 1, xi_X, index_oracle) + (m - 1),
    )


def r_threshold(m: int, xi: VarSet, index_oracle: IndexOracle) -> int:
    """Sound saturation threshold for disjoint unions of equivalent
    structures; reuses the copy recursion, floored at 1."""
    return max(1, q_threshold(m, xi, index_oracle))


def realized_index_oracle(max_n: int, graphs: Optional[Sequence[Graph]] = None) -> IndexOracle:
    """Index of rank-m equivalence over the bounded universe of structures
    whose graph has at most max_n vertices and whose valuation domain is
    exactly the queried variable set.  Sound for reasoning internal to
    that universe; the true index is astronomically larger."""
    if graphs is None:
        graphs = all_graphs_up_to(max_n)

    def oracle(m: int, xi: VarSet) -> int:
        fo_names = sorted(xi.fo_vars)
        so_names = sorted(xi.so_vars)
        types = set()
        for g in graphs:
            if fo_names and g.n == 0:
                continue
            for fo_vals in _tuples(range(1, g.n + 1), len(fo_names)):
                fo = dict(zip(fo_names, fo_vals))
                for so_vals in _tuples(list(_subsets(g.n)), len(so_names)):
                    so = dict(zip(so_names, so_vals))
                    types.add(rank_type(Structure(g, fo, so), m))
        return len(types)

    return oracle


def _tuples(pool, k):
    if k == 0:
        yield ()
        return
    for head in pool:
        for rest in _tuples(pool, k - 1):
            yield (head,) + rest


def all_graphs_up_to(max_n: int) -> list[Graph]:
    """One representative per isomorphism class, n = 0..max_n."""
    reps: list[Graph] = []
    seen = set()
    for n in range(max_n + 1):
        pairs = list(combinations(range(1, n + 1), 2))
        for mask in range(1 << len(pairs)):
            g = Graph(n, (e for i, e in enumerate(pairs) if mask >> i & 1))
            key = canonical_key(g)
            if key not in seen:
                seen.add(key)
                reps.append(canonical_form(g))
    return reps


def empirical_threshold(base: Structure, part: Structure, m: int, cap: int) -> int:
    """Least p <= cap with base + p*part ~_m base + (p+1)*part, found by
    direct game checks."""
    if not part.is_rooted or set(part.fo) != {"Root"}:
        raise InputError("part must be rooted and carry only Root")
    for p in range(cap + 1):
        if equivalent_m(repeat_sum(base, part, p), repeat_sum(base, part, p + 1), m):
            return p
    raise InfeasibleError(f"no stabilization up to cap {cap}")


def empirical_disjoint_threshold(part: Structure, m: int, cap: int) -> int:
    """Least r <= cap with r-fold ~_m (r+1)-fold disjoint sum of part."""

    def fold(c: int) -> Structure:
        out = part
        for _ in range(c - 1):
            out = disjoint_sum(out, part)
        return out

    if part.fo or part.so:
        raise InputError("disjoint saturation is computed on plain structures")
    for r in range(1, cap + 1):
        if equivalent_m(fold(r), fold(r + 1), m):
            return r
    raise InfeasibleError(f"no stabilization up to cap {cap}")


def build_universal(class_reps: Sequence[Structure], m: int, q: int) -> Structure:
    """Rooted single vertex plus q copies of every class representative,
    attached by rooted sums.  Representative order does not change the
    isomorphism type; we fix it by canonical form for determinism."""
    if q < 1:
        raise InputError(f"copy count must be >= 1, got {q}")
    prepared = []
    for rep in class_reps:
        if not is_connected(rep.graph):
            raise InputError("universal construction needs connected representatives")
        if rep.is_rooted:
            if set(rep.fo) != {"Root"} or rep.so:
                raise InputError("rooted representatives may carry only Root")
            prepared.append(rep)
        else:
            if rep.fo or rep.so:
                raise InputError("representatives must be plain or rooted")
            prepared.append(rooted(canonical_form(rep.graph), 1))
    prepared.sort(key=structure_key)
    out = rooted(Graph(1), 1)
    for rep in prepared:
        out = repeat_sum(out, rep, q)
    return out


def clear_caches() -> None:
    """Reset the interner and type memo (mainly for tests)."""
    _type_ids.clear()
    _type_cache.clear()
