"""Uniform sampling from a graph class at fixed n, and empirical reports.

Three routes: full enumeration for n <= 7, an exact recursive sampler
for forests at any n, and an edge-toggle Markov chain otherwise.  The
chain's kernel is symmetric (propose a uniform vertex pair, toggle iff
the result stays in the class), so its stationary distribution is
uniform on labeled members; its mixing rate is unknown, and every
chain-based report carries the `mixing-unverified` caveat.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from msolimits.canon import appears, canonical_key
from msolimits.classes import GraphClass, enumerate_connected
from msolimits.errors import InfeasibleError, InputError
from msolimits.graphs import Graph, Structure, components, is_connected

PRNG_ALGORITHM = "python-mt19937"


# --- exact sampler ----------------------------------------------------------

_labeled_cache: dict = {}


def labeled_members(c: GraphClass, n: int) -> list[Graph]:
    """Every labeled member on [n]; n <= 7."""
    if n < 0:
        raise InputError(f"size must be >= 0, got {n}")
    if n > 7:
        raise InfeasibleError(f"full labeled enumeration bounded at n <= 7, got {n}")
    key = (c.key, n)
    if key in _labeled_cache:
        return _labeled_cache[key]
    pairs = list(combinations(range(1, n + 1), 2))
    members = []
    for mask in range(1 << len(pairs)):
        g = Graph(n, (e for i, e in enumerate(pairs) if mask >> i & 1))
        if c.membership(g):
            members.append(g)
    _labeled_cache[key] = members
    return members


def sample_exact(c: GraphClass, n: int, count: int, seed: int = 0) -> list[Graph]:
    """i.i.d. uniform labeled members by indexed selection; n <= 7."""
    members = labeled_members(c, n)
    rng = random.Random(seed)
    return [members[rng.randrange(len(members))] for _ in range(count)]


# --- exact forest sampler ---------------------------------------------------

_forest_counts_cache: dict[int, list[int]] = {}


def _forest_counts(max_n: int) -> list[int]:
    """Labeled forest counts F_0..F_max_n via the component-of-vertex-1
    recurrence with Cayley tree counts."""
    have = max(_forest_counts_cache, default=-1)
    if max_n <= have:
        return _forest_counts_cache[max(_forest_counts_cache)]
    f = [1] + [0] * max_n
    for n in range(1, max_n + 1):
        f[n] = sum(
            math.comb(n - 1, k - 1) * k ** max(k - 2, 0) * f[n - k]
            for k in range(1, n + 1)
        )
    _forest_counts_cache[max_n] = f
    return f


def _random_tree_edges(labels: Sequence[int], rng: random.Random) -> list[tuple[int, int]]:
    """Uniform labeled tree on the given labels (Pruefer decoding)."""
    k = len(labels)
    if k == 1:
        return []
    if k == 2:
        return [tuple(sorted(labels))]
    seq = [rng.randrange(k) for _ in range(k - 2)]
    degree = [1] * k
    for i in seq:
        degree[i] += 1
    import heapq

    leaves = [i for i in range(k) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for i in seq:
        leaf = heapq.heappop(leaves)
        edges.append(tuple(sorted((labels[leaf], labels[i]))))
        degree[i] -= 1
        if degree[i] == 1:
            heapq.heappush(leaves, i)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append(tuple(sorted((labels[u], labels[v]))))
    return edges


def sample_forest(n: int, rng: random.Random) -> Graph:
    """One uniform labeled forest on [n]: split off the component of the
    lowest remaining label with its exact size distribution, then draw a
    uniform tree on it."""
    f = _forest_counts(n)
    remaining = list(range(1, n + 1))
    edges: list[tuple[int, int]] = []
    while remaining:
        m = len(remaining)
        r = rng.randrange(f[m])
        cum = 0
        # Walk sizes from the top: the component of the lowest label is
        # usually nearly everything, so this stops after a few terms.
        for k in range(m, 0, -1):
            cum += math.comb(m - 1, k - 1) * k ** max(k - 2, 0) * f[m - k]
            if r < cum:
                break
        rest = remaining[1:]
        rng.shuffle(rest)
        comp = sorted([remaining[0]] + rest[: k - 1])
        edges.extend(_random_tree_edges(comp, rng))
        remaining = sorted(rest[k - 1:])
    return Graph(n, edges)


# --- Markov chain -----------------------------------------------------------


@dataclass
class ChainState:
    """Edge-toggle chain on labeled members of the class at fixed n."""

    class_ref: GraphClass
    n: int
    edges: set
    rng: random.Random = field(repr=False)
    seed: int
    steps: int = 0
    accepted: int = 0
    # membership verdicts keyed by edge bitmask; only kept at small n,
    # where the state space is small enough for the cache to pay off
    member_cache: Optional[dict] = field(default=None, repr=False)
    mask: int = 0
    bit_of: dict = field(default_factory=dict, repr=False)

    @property
    def current(self) -> Graph:
        return Graph(self.n, self.edges)


def assert_deletion_closed(c: GraphClass, n: int = 4) -> None:
    """Spot-check at configuration time that single-edge deletions stay in
    the class (what makes the toggle kernel symmetric within the class)."""
    if not c.membership(Graph(max(n, 1))):
        raise InputError(f"{c.display_name()} does not contain the empty graph")
    for g, _aut in enumerate_connected(c, n):
        for e in g.edges:
            smaller = Graph(g.n, set(g.edges) - {e})
            if not c.membership(smaller):
                raise InputError(
                    f"{c.display_name()} is not deletion-closed; chain sampling unsound"
                )


def new_chain(c: GraphClass, n: int, seed: int, start: Optional[Graph] = None) -> ChainState:
    if n < 1:
        raise InputError(f"chain needs n >= 1, got {n}")
    assert_deletion_closed(c)
    if start is None:
        start = Graph(n)
    elif start.n != n or not c.membership(start):
        raise InputError("start graph must be a class member on [n]")
    bit_of = {
        pair: 1 << i
        for i, pair in enumerate(combinations(range(1, n + 1), 2))
    }
    mask = sum(bit_of[e] for e in start.edges)
    return ChainState(
        class_ref=c,
        n=n,
        edges=set(start.edges),
        rng=random.Random(seed),
        seed=seed,
        member_cache={} if n <= 6 else None,
        mask=mask,
        bit_of=bit_of,
    )


def chain_step(state: ChainState) -> ChainState:
    """One toggle proposal.  Deleting an edge always stays inside a
    minor-closed class, so membership is only re-checked on additions."""
    n = state.n
    u = state.rng.randrange(1, n + 1)
    v = state.rng.randrange(1, n)
    if v >= u:
        v += 1
    if u > v:
        u, v = v, u
    state.steps += 1
    bit = state.bit_of[(u, v)]
    if (u, v) in state.edges:
        state.edges.remove((u, v))
        state.mask &= ~bit
        state.accepted += 1
    else:
        state.edges.add((u, v))
        state.mask |= bit
        cache = state.member_cache
        if cache is not None and state.mask in cache:
            inside = cache[state.mask]
        else:
            inside = state.class_ref.membership(Graph(n, state.edges))
            if cache is not None:
                cache[state.mask] = inside
        if inside:
            state.accepted += 1
        else:
            state.edges.remove((u, v))
            state.mask &= ~bit
    return state


def default_burnin(n: int) -> int:
    return 50 * math.comb(n, 2)


def default_thinning(n: int) -> int:
    return math.comb(n, 2)


def chain_samples(
    c: GraphClass,
    n: int,
    count: int,
    seed: int = 0,
    burnin: Optional[int] = None,
    thinning: Optional[int] = None,
) -> list[Graph]:
    if burnin is None:
        burnin = default_burnin(n)
    if thinning is None:
        thinning = default_thinning(n)
    state = new_chain(c, n, seed)
    for _ in range(burnin):
        chain_step(state)
    out = []
    for _ in range(count):
        for _ in range(thinning):
            chain_step(state)
        out.append(state.current)
    return out


def draw_samples(
    c: GraphClass,
    n: int,
    count: int,
    seed: int = 0,
    burnin: Optional[int] = None,
    thinning: Optional[int] = None,
) -> tuple[list[Graph], str, list[str]]:
    """(samples, method tag, caveats); picks the best available sampler."""
    if n <= 7:
        return sample_exact(c, n, count, seed), "exact-enumeration", []
    if c.name == "forests":
        rng = random.Random(seed)
        return [sample_forest(n, rng) for _ in range(count)], "exact-recursive", []
    return (
        chain_samples(c, n, count, seed, burnin, thinning),
        "markov-chain",
        ["mixing-unverified"],
    )


def sample_connected(
    c: GraphClass,
    n: int,
    count: int,
    seed: int = 0,
    burnin: Optional[int] = None,
    thinning: Optional[int] = None,
) -> list[Graph]:
    """Uniform connected members, by rejection on top of draw_samples."""
    out: list[Graph] = []
    batch = max(count, 8)
    offset = 0
    while len(out) < count:
        got, _method, _cav = draw_samples(c, n, batch, seed + offset, burnin, thinning)
        out.extend(g for g in got if is_connected(g))
        offset += 1
        if offset > 50:
            raise InfeasibleError(
                f"connected members of {c.display_name()} at n={n} are too rare to sample"
            )
    return out[:count]


# --- reports ----------------------------------------------------------------


@dataclass(frozen=True)
class SampleReport:
    class_name: str
    n: int
    sample_size: int
    seed: int
    method: str
    burnin: Optional[int]
    thinning: Optional[int]
    connectedness_frequency: float
    connectedness_half_width: float
    isolated_vertex_histogram: dict
    small_component_count_histogram: dict
    giant_complement_size_histogram: dict
    appearance_frequency: dict
    appearance_half_width: dict
    caveats: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "class": self.class_name,
            "n": self.n,
            "sampleSize": self.sample_size,
            "seed": self.seed,
            "method": self.method,
            "prng": PRNG_ALGORITHM,
            "burnin": self.burnin,
            "thinning": self.thinning,
            "connectednessFrequency": self.connectedness_frequency,
            "connectednessHalfWidth": self.connectedness_half_width,
            "isolatedVertexHistogram": {str(k): v for k, v in sorted(self.isolated_vertex_histogram.items())},
            "smallComponentCountHistogram": {str(k): v for k, v in sorted(self.small_component_count_histogram.items())},
            "giantComplementSizeHistogram": {str(k): v for k, v in sorted(self.giant_complement_size_histogram.items())},
            "appearanceFrequency": dict(self.appearance_frequency),
            "appearanceHalfWidth": dict(self.appearance_half_width),
            "caveats": list(self.caveats),
        }


def _half_width(p: float, count: int) -> float:
    return 1.96 * math.sqrt(p * (1.0 - p) / count) if count else 0.0


def run_report(
    c: GraphClass,
    n: int,
    count: int,
    burnin: Optional[int] = None,
    thinning: Optional[int] = None,
    queries: Sequence[tuple[str, Structure]] = (),
    seed: int = 0,
) -> SampleReport:
    """Empirical statistics over `count` uniform samples."""
    if count < 1:
        raise InputError(f"sample count must be >= 1, got {count}")
    for _name, q in queries:
        if set(q.fo) != {"Root"} or q.so:
            raise InputError("appearance queries must be rooted structures carrying only Root")
    samples, method, caveats = draw_samples(c, n, count, seed, burnin, thinning)
    connected = 0
    iso_hist: dict[int, int] = {}
    small_hist: dict[int, int] = {}
    giant_hist: dict[int, int] = {}
    hits = {name: 0 for name, _q in queries}
    for g in samples:
        comps = components(g)
        if len(comps) == 1:
            connected += 1
        isolated = sum(1 for comp in comps if comp.n == 1)
        giant = max((comp.n for comp in comps), default=0)
        iso_hist[isolated] = iso_hist.get(isolated, 0) + 1
        small_hist[len(comps) - 1] = small_hist.get(len(comps) - 1, 0) + 1
        giant_hist[g.n - giant] = giant_hist.get(g.n - giant, 0) + 1
        for name, q in queries:
            if appears(q, g):
                hits[name] += 1
    freq = connected / count
    used_chain = method == "markov-chain"
    return SampleReport(
        class_name=c.display_name(),
        n=n,
        sample_size=count,
        seed=seed,
        method=method,
        burnin=(burnin if burnin is not None else default_burnin(n)) if used_chain else None,
        thinning=(thinning if thinning is not None else default_thinning(n)) if used_chain else None,
        connectedness_frequency=freq,
        connectedness_half_width=_half_width(freq, count),
        isolated_vertex_histogram=iso_hist,
        small_component_count_histogram=small_hist,
        giant_complement_size_histogram=giant_hist,
        appearance_frequency={name: hits[name] / count for name, _q in queries},
        appearance_half_width={name: _half_width(hits[name] / count, count) for name, _q in queries},
        caveats=tuple(caveats),
    )


# --- exact census distribution over isomorphism classes ---------------------


def iso_class_key(g: Graph) -> tuple:
    """Isomorphism-type key of a possibly disconnected graph: the sorted
    multiset of its components' canonical keys."""
    return tuple(sorted(canonical_key(comp) for comp in components(g)))


def member_type_distribution(c: GraphClass, n: int) -> dict[tuple, float]:
    """Exact uniform-member probability of each isomorphism class at size
    n, assembled combinatorially from the connected census: a type is a
    multiset of connected types, with labeled count n! / |Aut|, and
    |Aut| = product of component auts times multiplicities factorial."""
    per_size = [enumerate_connected(c, m) for m in range(1, n + 1)]
    results: dict[tuple, int] = {}

    def rec(remaining: int, max_size: int, chosen: list):
        if remaining == 0:
            counts: dict = {}
            aut = 1
            for key, a, _sz in chosen:
                counts[key] = counts.get(key, 0) + 1
                aut *= a
            for mult in counts.values():
                aut *= math.factorial(mult)
            key = tuple(sorted(k for k, _a, _sz in chosen))
            results[key] = results.get(key, 0) + math.factorial(n) // aut
            return
        for size in range(min(remaining, max_size), 0, -1):
            for g, a in per_size[size - 1]:
                ck = canonical_key(g)
                if chosen and size == chosen[-1][2] and ck > chosen[-1][0]:
                    continue  # keep the multiset ordered to avoid duplicates
                chosen.append((ck, a, size))
                rec(remaining - size, size, chosen)
                chosen.pop()

    rec(n, n, [])
    total = sum(results.values())
    return {k: v / total for k, v in results.items()}
