"""Poisson component model, m-profiles, and limiting probabilities.

The model: counts of non-giant components isomorphic to a connected H
are asymptotically independent Poissons with mean 1/(gamma^|H| |Aut H|).
Limits of MSO sentences are sums of profile probabilities over the
profiles that imply the sentence; everything here is truncation-aware,
so results are intervals rather than points.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from msolimits import mso
from msolimits.canon import canonical_key
from msolimits.classes import GraphClass, build_census, enumerate_connected
from msolimits.ef import (
    EquivClassId,
    q_threshold,
    rank_type,
    realized_classes,
    realized_index_oracle,
    build_universal,
)
from msolimits.errors import InconclusiveError, InfeasibleError, InputError
from msolimits.graphs import Graph, Structure, VarSet, disjoint_sum, plain
from msolimits.mso import Formula, evaluate, free_variables, is_first_order, quantifier_rank


@dataclass(frozen=True)
class Interval:
    """Closed real interval; hi may be math.inf when a tail estimate is
    unavailable."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise InputError(f"bad interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def clamp01(self) -> "Interval":
        return Interval(min(max(self.lo, 0.0), 1.0), min(max(self.hi, 0.0), 1.0))

    @staticmethod
    def point(x: float) -> "Interval":
        return Interval(x, x)


@dataclass(frozen=True)
class ComponentModel:
    """Immutable Poisson data for one (class, size bound) pair."""

    class_ref: GraphClass
    gamma: float
    size_bound: int
    graphs: tuple[Graph, ...]  # canonical connected members, sizes 1..s
    per_graph_lambda: dict = field(compare=False)  # canonical key -> lambda
    per_size_lambda: dict = field(compare=False)  # n -> sum of size-n lambdas
    lambda_total_lower: float
    tail_estimate: Optional[float]
    tail_method: str

    def graph_lambda(self, h: Graph) -> float:
        lam = self.per_graph_lambda.get(canonical_key(h))
        if lam is None:
            raise InputError(
                f"graph not in the size-{self.size_bound} census of {self.class_ref.display_name()}"
            )
        return lam


def build_component_model(
    c: GraphClass, s: int, gamma: Optional[float] = None
) -> ComponentModel:
    """Census up to size s plus the per-graph and per-size Poisson means."""
    if s < 1:
        raise InputError(f"size bound must be >= 1, got {s}")
    if gamma is None:
        gamma = c.require_gamma()
    if gamma <= 1.0:
        raise InputError(f"growth constant must exceed 1, got {gamma}")
    census = build_census(c, s)
    graphs: list[Graph] = []
    per_graph: dict = {}
    per_size: dict = {}
    for n in range(1, s + 1):
        scale = gamma ** n
        total = 0.0
        for g, aut in census.reps[n - 1]:
            lam = 1.0 / (scale * aut)
            per_graph[canonical_key(g)] = lam
            graphs.append(g)
            total += lam
        per_size[n] = total
        expected = census.labeled_connected_counts[n - 1] / (math.factorial(n) * scale)
        if not math.isclose(total, expected, rel_tol=1e-9):
            raise AssertionError(
                f"per-size lambda mismatch at n={n}: {total} vs {expected}"
            )
    if s >= 2 and 0.0 < per_size[s] < per_size[s - 1]:
        ratio = per_size[s] / per_size[s - 1]
        tail = per_size[s] * ratio / (1.0 - ratio)
        method = "geometric-extrapolation"
    else:
        tail = None
        method = "unavailable"
    return ComponentModel(
        class_ref=c,
        gamma=gamma,
        size_bound=s,
        graphs=tuple(graphs),
        per_graph_lambda=per_graph,
        per_size_lambda=per_size,
        lambda_total_lower=math.fsum(per_size.values()),
        tail_estimate=tail,
        tail_method=method,
    )


def lambda_total(model: ComponentModel) -> Interval:
    """[truncated sum, truncated sum + tail estimate]."""
    tail = model.tail_estimate if model.tail_estimate is not None else math.inf
    return Interval(model.lambda_total_lower, model.lambda_total_lower + tail)


def _poisson_pmf(lam: float, k: int) -> float:
    return math.exp(-lam) * lam ** k / math.factorial(k)


def p_k_graph(model: ComponentModel, h: Graph, k: int) -> float:
    """Poisson pmf of seeing exactly k components isomorphic to h."""
    if k < 0:
        raise InputError(f"count must be >= 0, got {k}")
    return _poisson_pmf(model.graph_lambda(h), k)


def class_lambda(model: ComponentModel, a: EquivClassId) -> float:
    """Poisson mean of a realized class: sum over its census members."""
    return math.fsum(model.graph_lambda(s.graph) for s in a.members)


def p_k_class(model: ComponentModel, a: EquivClassId, k: int, m: int) -> Interval:
    """Probability of exactly k components from class a.

    The realized class omits members larger than the size bound, so the
    true mean sits in [lambda_A, lambda_A + tail]; the pmf is evaluated
    at both ends (plus at its mode when the interval straddles it) and
    the results ordered.
    """
    if a.m != m:
        raise InputError(f"class was realized at rank {a.m}, queried at {m}")
    if k < 0:
        raise InputError(f"count must be >= 0, got {k}")
    lam_lo = class_lambda(model, a)
    tail = model.tail_estimate if model.tail_estimate is not None else math.inf
    lam_hi = lam_lo + tail
    at_lo = _poisson_pmf(lam_lo, k)
    at_hi = _poisson_pmf(lam_hi, k) if math.isfinite(lam_hi) else 0.0
    hi = max(at_lo, at_hi)
    if lam_lo <= k <= lam_hi:
        hi = max(hi, _poisson_pmf(float(k), k))
    return Interval(min(at_lo, at_hi), hi)


# --- profiles ---------------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    """Component counts per realized class, capped at r (a count of r
    means "at least r")."""

    class_ids: tuple[EquivClassId, ...]
    counts: tuple[int, ...]
    r: int
    probability: Interval

    @property
    def total(self) -> int:
        return sum(self.counts)


def connected_classes(model: ComponentModel, m: int) -> list[EquivClassId]:
    """Realized rank-m classes of the censused connected members."""
    return realized_classes([plain(g) for g in model.graphs], m)


def _profile_probability(
    model: ComponentModel, lams: Sequence[float], counts: Sequence[int], r: int
) -> Interval:
    """Joint probability of the profile.  Per-class factors use the exact
    censused means; the chance that some component larger than the size
    bound exists at all is bounded by the tail, giving the e^(-tail)
    lower factor."""
    point = 1.0
    for lam, k in zip(lams, counts):
        if k < r:
            point *= _poisson_pmf(lam, k)
        else:
            point *= 1.0 - math.fsum(_poisson_pmf(lam, j) for j in range(r))
    tail = model.tail_estimate if model.tail_estimate is not None else math.inf
    lo = point * math.exp(-tail) if math.isfinite(tail) else 0.0
    return Interval(lo, point)


def enumerate_profiles(model: ComponentModel, m: int, r: int, materialize_limit: int = 100000):
    """All (r+1)^t profiles over the realized rank-m classes; a list when
    that count is modest, a lazy generator otherwise."""
    if r < 1:
        raise InputError(f"threshold r must be >= 1, got {r}")
    classes = connected_classes(model, m)
    lams = [class_lambda(model, a) for a in classes]
    class_ids = tuple(classes)
    t = len(classes)

    def gen():
        counts = [0] * t
        while True:
            yield Profile(
                class_ids=class_ids,
                counts=tuple(counts),
                r=r,
                probability=_profile_probability(model, lams, counts, r),
            )
            i = t - 1
            while i >= 0 and counts[i] == r:
                counts[i] = 0
                i -= 1
            if i < 0:
                return
            counts[i] += 1

    if (r + 1) ** t <= materialize_limit:
        return list(gen())
    return gen()


def _count_vectors(t: int, budget: int):
    """All count vectors over t slots with total at most budget."""
    vec = [0] * t

    def rec(i: int, remaining: int):
        if i == t:
            yield tuple(vec)
            return
        for k in range(remaining + 1):
            vec[i] = k
            yield from rec(i + 1, remaining - k)
        vec[i] = 0

    yield from rec(0, budget)


# --- giant representatives and truth ----------------------------------------


@dataclass(frozen=True)
class GiantVerdict:
    value: bool
    mode: str  # "exact-tiny" | "empirical"
    detail: dict


def _universal_structure(c: GraphClass, m: int, tiny_bound: int = 3) -> Structure:
    """The saturated connected structure built from the tiny realized
    universe: q copies of every realized class of connected graphs up to
    tiny_bound, bridged to a hub vertex."""
    universe = []
    for n in range(1, tiny_bound + 1):
        universe.extend(plain(g) for g, _aut in enumerate_connected(c, n))
    classes = realized_classes(universe, m)
    oracle = realized_index_oracle(tiny_bound)
    q = max(1, q_threshold(m, VarSet(), oracle))
    return build_universal([a.representative for a in classes], m, q)


def giant_truth(
    phi: Formula,
    c: GraphClass,
    m: Optional[int] = None,
    mode: str = "auto",
    seed: int = 0,
    sample_size: Optional[int] = None,
    sample_n: Optional[int] = None,
) -> GiantVerdict:
    """Does phi hold on the giant component in the limit?

    exact-tiny evaluates phi on the saturated universal structure (sound
    relative to the tiny universe it is built from; m <= 2 only);
    empirical takes the frequency of phi over sampled large connected
    members and demands a lopsided vote.
    """
    if m is None:
        m = quantifier_rank(phi)
    fo_free, so_free = free_variables(phi)
    if fo_free or so_free:
        raise InputError(f"sentence required; free variables {sorted(fo_free | so_free)}")
    if mode == "auto":
        mode = "exact-tiny" if m <= 2 else "empirical"
    if mode == "exact-tiny":
        if m > 2:
            raise InfeasibleError(
                f"exact-tiny giant evaluation supports rank <= 2, got {m}"
            )
        u = _universal_structure(c, m)
        if not is_first_order(phi) and u.graph.n > 22:
            raise InfeasibleError(
                f"set quantification on the {u.graph.n}-vertex universal structure is out of budget"
            )
        value = evaluate(plain(u.graph), phi)
        return GiantVerdict(value, "exact-tiny", {"universalSize": u.graph.n, "m": m})
    if mode != "empirical":
        raise InputError(f"unknown giant mode {mode!r}")
    from msolimits.sampling import sample_connected

    if sample_n is None:
        sample_n = 40 if is_first_order(phi) else 12
    if sample_size is None:
        sample_size = 200 if is_first_order(phi) else 100
    hits = 0
    for g in sample_connected(c, sample_n, sample_size, seed=seed):
        if evaluate(plain(g), phi):
            hits += 1
    freq = hits / sample_size
    detail = {"sampleSize": sample_size, "n": sample_n, "frequency": freq, "m": m}
    if freq > 0.95:
        return GiantVerdict(True, "empirical", detail)
    if freq < 0.05:
        return GiantVerdict(False, "empirical", detail)
    raise InconclusiveError(
        f"giant frequency {freq:.3f} is not lopsided; cannot call a verdict"
    )


def zero_one_connected(phi: Formula, c: GraphClass, mode: str = "auto", seed: int = 0) -> int:
    """The zero-one law for the class restricted to connected graphs."""
    return 1 if giant_truth(phi, c, mode=mode, seed=seed).value else 0


# --- limiting probabilities --------------------------------------------------


@dataclass(frozen=True)
class LimitConfig:
    size_bound: int = 5
    gamma: Optional[float] = None
    budget: int = 2  # max total small-component count enumerated exactly
    giant_size: int = 7
    giant_count: int = 3
    seed: int = 0
    max_rank: int = 3


@dataclass(frozen=True)
class LimitResult:
    probability: Interval
    m: int
    mode: str  # "exact-tiny" | "truncated" | "empirical"
    lam_total: Interval
    class_name: str
    gamma: float
    size_bound: int
    implying: tuple[tuple[int, ...], ...]
    classes: tuple[EquivClassId, ...]

    def to_json(self, formula_text: Optional[str] = None) -> dict:
        return {
            "formula": formula_text,
            "class": self.class_name,
            "m": self.m,
            "mode": self.mode,
            "interval": [self.probability.lo, self.probability.hi],
            "lambdaTotal": [
                self.lam_total.lo,
                self.lam_total.hi if math.isfinite(self.lam_total.hi) else None,
            ],
            "implyingProfiles": [list(f) for f in self.implying],
            "censusSizeBound": self.size_bound,
            "constants": {"gamma": self.gamma},
        }


def _giant_graphs(c: GraphClass, size: int, count: int, seed: int) -> list[Graph]:
    """Giant-component stand-ins: connected members of the given size,
    drawn with labeled-uniform weights."""
    reps = enumerate_connected(c, size)
    fact = math.factorial(size)
    weights = [fact // aut for _g, aut in reps]
    rng = random.Random(seed)
    return [g for g, _aut in rng.choices(reps, weights=weights, k=count)]


def _profile_graph(classes: Sequence[EquivClassId], counts: Sequence[int], giant: Graph) -> Structure:
    """Representative graph of the profile: the small components at low
    labels (so a set quantifier meets them early), giant at the top."""
    parts: list[Graph] = []
    for a, k in zip(classes, counts):
        parts.extend([a.representative.graph] * k)
    parts.sort(key=lambda g: (g.n, canonical_key(g)))
    out = plain(parts[0]) if parts else None
    for p in parts[1:]:
        out = disjoint_sum(out, plain(p))
    return disjoint_sum(out, plain(giant)) if out is not None else plain(giant)


def limit_probability(
    phi: Formula, c: GraphClass, config: LimitConfig = LimitConfig()
) -> LimitResult:
    """Limiting probability of phi on the random member, as an interval.

    Profiles with at most `budget` small components are enumerated and
    evaluated exactly (an exact-count profile pins the rank-m type of any
    matching graph, so one representative per profile suffices); all
    remaining probability mass widens the upper endpoint.
    """
    fo_free, so_free = free_variables(phi)
    if fo_free or so_free:
        raise InputError(f"sentence required; free variables {sorted(fo_free | so_free)}")
    m = quantifier_rank(phi)
    if m > config.max_rank:
        raise InfeasibleError(
            f"rank {m} exceeds the configured feasibility bound {config.max_rank}"
        )
    model = build_component_model(c, config.size_bound, config.gamma)
    classes = connected_classes(model, m)
    lams = [class_lambda(model, a) for a in classes]
    giants = _giant_graphs(c, config.giant_size, config.giant_count, config.seed)
    max_n = config.giant_size + config.budget * config.size_bound
    if not is_first_order(phi) and max_n > 22:
        raise InfeasibleError(
            f"set quantification on {max_n}-vertex profile graphs is out of budget; "
            "lower the budget, size bound, or giant size"
        )

    lo = 0.0
    hi_implied = 0.0
    covered = 0.0
    implying: list[tuple[int, ...]] = []
    for counts in _count_vectors(len(classes), config.budget):
        p = _profile_probability(model, lams, counts, r=config.budget + 1)
        covered += p.lo
        verdicts = {evaluate(_profile_graph(classes, counts, g), phi) for g in giants}
        if verdicts == {True}:
            lo += p.lo
            hi_implied += p.hi
            implying.append(counts)
        elif len(verdicts) > 1:
            hi_implied += p.hi  # giant stand-ins disagree: count toward hi only
    slack = max(0.0, 1.0 - covered)
    return LimitResult(
        probability=Interval(lo, hi_implied + slack).clamp01(),
        m=m,
        mode="truncated",
        lam_total=lambda_total(model),
        class_name=c.display_name(),
        gamma=model.gamma,
        size_bound=config.size_bound,
        implying=tuple(implying),
        classes=tuple(classes),
    )


def clustering_bound(
    c: GraphClass, s: int = 5, gamma: Optional[float] = None
) -> Interval:
    """c* = 1 - e^(-lambda_total): every MSO limit for the class lands in
    [0, c*] or [1 - c*, 1]."""
    lam = lambda_total(build_component_model(c, s, gamma))
    hi = 1.0 - math.exp(-lam.hi) if math.isfinite(lam.hi) else 1.0
    return Interval(1.0 - math.exp(-lam.lo), hi)
