import math
from itertools import combinations

import pytest

from msolimits.classes import forests_class, planar_class, treewidth_class
from msolimits.ef import equivalent_m
from msolimits.errors import InfeasibleError, InputError
from msolimits.graphs import Graph, disjoint_sum, path_graph, plain
from msolimits.limits import (
    Interval,
    LimitConfig,
    build_component_model,
    class_lambda,
    clustering_bound,
    connected_classes,
    enumerate_profiles,
    giant_truth,
    lambda_total,
    limit_probability,
    p_k_class,
    p_k_graph,
    zero_one_connected,
)
from msolimits.mso import CONNECTIVITY_SENTENCE, ISOLATED_VERTEX_SENTENCE
from msolimits.parser import parse

GAMMA = 27.22679


@pytest.fixture(scope="module")
def planar_model():
    return build_component_model(planar_class(), 5)


class TestInterval:
    def test_validation(self):
        with pytest.raises(InputError):
            Interval(1.0, 0.0)

    def test_contains_and_overlap(self):
        a = Interval(0.2, 0.4)
        assert a.contains(0.3)
        assert a.overlaps(Interval(0.35, 0.9))
        assert not a.overlaps(Interval(0.5, 0.9))

    def test_clamp(self):
        assert Interval(-0.1, 1.3).clamp01() == Interval(0.0, 1.0)


class TestComponentModel:
    def test_size_terms(self, planar_model):
        per = planar_model.per_size_lambda
        assert per[1] == pytest.approx(1 / GAMMA, rel=1e-9)
        assert per[2] == pytest.approx(1 / (2 * GAMMA ** 2), rel=1e-9)
        assert per[2] < 0.0007
        assert per[3] < 0.00004

    def test_lambda_total_lower_monotone_in_s(self):
        pc = planar_class()
        lowers = [build_component_model(pc, s).lambda_total_lower for s in (1, 2, 3, 4, 5)]
        assert lowers == sorted(lowers)

    def test_lambda_total_interval(self, planar_model):
        lam = lambda_total(planar_model)
        assert lam.lo == pytest.approx(0.0374393, abs=1e-6)
        assert lam.hi > lam.lo
        assert lam.width < 1e-6

    def test_s1_has_no_tail_estimate(self):
        model = build_component_model(planar_class(), 1)
        assert model.lambda_total_lower == pytest.approx(1 / GAMMA)
        assert lambda_total(model).hi == math.inf

    def test_missing_gamma(self):
        with pytest.raises(InputError):
            build_component_model(treewidth_class(2), 3)

    def test_user_gamma(self):
        model = build_component_model(treewidth_class(2), 3, gamma=10.0)
        assert model.per_size_lambda[1] == pytest.approx(0.1)


class TestPoissonCounts:
    def test_k1_zero_count(self, planar_model):
        assert p_k_graph(planar_model, Graph(1), 0) == pytest.approx(
            math.exp(-1 / GAMMA)
        )

    def test_pmf_normalization_and_mean(self, planar_model):
        lam = planar_model.graph_lambda(path_graph(2))
        total = sum(p_k_graph(planar_model, path_graph(2), k) for k in range(21))
        mean = sum(k * p_k_graph(planar_model, path_graph(2), k) for k in range(21))
        assert total >= 1 - 1e-12
        assert mean == pytest.approx(lam, rel=1e-9)

    def test_unknown_graph(self, planar_model):
        with pytest.raises(InputError):
            p_k_graph(planar_model, Graph(6), 0)

    def test_class_pmf_interval(self, planar_model):
        classes = connected_classes(planar_model, 2)
        k1_class = next(c for c in classes if c.representative.graph.n == 1)
        p0 = p_k_class(planar_model, k1_class, 0, 2)
        assert p0.contains(math.exp(-1 / GAMMA))
        assert p0.width < 1e-6

    def test_class_pmf_sums_to_one(self, planar_model):
        classes = connected_classes(planar_model, 2)
        for a in classes:
            lam = class_lambda(planar_model, a)
            head = sum(p_k_class(planar_model, a, k, 2).hi for k in range(8))
            tail = 1 - sum(math.exp(-lam) * lam ** k / math.factorial(k) for k in range(8))
            assert head + tail >= 1 - 1e-9

    def test_rank_mismatch(self, planar_model):
        a = connected_classes(planar_model, 2)[0]
        with pytest.raises(InputError):
            p_k_class(planar_model, a, 0, 1)


class TestProfiles:
    def test_t1_r1_gives_two_profiles(self):
        model = build_component_model(planar_class(), 1)
        profiles = enumerate_profiles(model, 2, 1)
        assert len(profiles) == 2

    def test_all_zero_probability(self, planar_model):
        profiles = enumerate_profiles(planar_model, 2, 2)
        zero = next(p for p in profiles if sum(p.counts) == 0)
        lam = sum(class_lambda(planar_model, a) for a in zero.class_ids)
        assert zero.probability.hi == pytest.approx(math.exp(-lam), rel=1e-9)

    def test_normalization(self, planar_model):
        profiles = enumerate_profiles(planar_model, 2, 2)
        total_lo = sum(p.probability.lo for p in profiles)
        total_hi = sum(p.probability.hi for p in profiles)
        assert total_lo <= 1.0 <= total_hi + 1e-9
        assert 1.0 - total_lo < 1e-3

    def test_lazy_stream_when_large(self, planar_model):
        stream = enumerate_profiles(planar_model, 2, 2, materialize_limit=10)
        assert not isinstance(stream, list)
        assert sum(1 for _ in stream) == 3 ** 4

    def test_same_profile_implies_equivalent(self):
        # the profile Lemma at tiny scale: any two graphs assembled from
        # the same profile (same per-class counts, equivalent giants) are
        # equivalent_m; exercised over classes with several members
        model = build_component_model(planar_class(), 4)
        for m in (1, 2):
            classes = connected_classes(model, m)
            giants = classes[-1].members
            for a in classes:
                for x, y in combinations(a.members, 2):
                    for gx in giants[:2]:
                        for gy in giants[:2]:
                            assert equivalent_m(
                                disjoint_sum(x, gx), disjoint_sum(y, gy), m
                            )


class TestGiantTruth:
    def test_connectivity_needs_empirical(self):
        with pytest.raises(InfeasibleError):
            giant_truth(parse(CONNECTIVITY_SENTENCE), planar_class(), mode="exact-tiny")

    def test_isolated_vertex_false_on_universal(self):
        v = giant_truth(parse(ISOLATED_VERTEX_SENTENCE), planar_class())
        assert v.value is False
        assert v.mode == "exact-tiny"

    def test_trivial_sentence(self):
        assert giant_truth(parse("ex x. x = x"), planar_class()).value is True

    def test_open_formula_rejected(self):
        with pytest.raises(InputError):
            giant_truth(parse("x = x"), planar_class())

    def test_bad_mode(self):
        with pytest.raises(InputError):
            giant_truth(parse("ex x. x = x"), planar_class(), mode="oracle")

    def test_zero_one_and_negation(self):
        iso = parse(ISOLATED_VERTEX_SENTENCE)
        assert zero_one_connected(iso, planar_class()) == 0
        assert zero_one_connected(parse("!(" + ISOLATED_VERTEX_SENTENCE + ")"), planar_class()) == 1


class TestLimitProbability:
    def test_trivially_true_sentence(self):
        res = limit_probability(parse("ex x. x = x"), planar_class())
        assert res.probability.hi == 1.0
        assert res.probability.lo > 0.999

    def test_isolated_vertex_value(self):
        res = limit_probability(parse(ISOLATED_VERTEX_SENTENCE), planar_class())
        expected = 1 - math.exp(-1 / GAMMA)  # ~0.036063
        assert res.probability.contains(expected)
        assert res.probability.width < 1e-4
        assert res.m == 2
        assert res.mode == "truncated"

    def test_complement_identity(self):
        phi = parse(ISOLATED_VERTEX_SENTENCE)
        neg = parse("!(" + ISOLATED_VERTEX_SENTENCE + ")")
        a = limit_probability(phi, planar_class())
        b = limit_probability(neg, planar_class())
        assert a.probability.lo + b.probability.lo <= 1.0 <= a.probability.hi + b.probability.hi

    def test_free_variables_rejected(self):
        with pytest.raises(InputError):
            limit_probability(parse("x in X"), planar_class())

    def test_rank_cap(self):
        deep = parse("ex a. ex b. ex c. ex d. a = a")
        with pytest.raises(InfeasibleError):
            limit_probability(deep, planar_class())

    def test_mso_size_guard(self):
        config = LimitConfig(budget=4, giant_size=7)
        with pytest.raises(InfeasibleError):
            limit_probability(parse(CONNECTIVITY_SENTENCE), planar_class(), config)

    def test_truncation_never_widens(self):
        phi = parse(ISOLATED_VERTEX_SENTENCE)
        widths = [
            limit_probability(phi, planar_class(), LimitConfig(size_bound=s)).probability.width
            for s in (3, 4, 5)
        ]
        assert widths[2] <= widths[1] + 1e-12 <= widths[0] + 2e-12

    def test_result_json_shape(self):
        res = limit_probability(parse(ISOLATED_VERTEX_SENTENCE), planar_class())
        body = res.to_json(formula_text=ISOLATED_VERTEX_SENTENCE)
        assert set(body) == {
            "formula", "class", "m", "mode", "interval", "lambdaTotal",
            "implyingProfiles", "censusSizeBound", "constants",
        }
        assert body["constants"]["gamma"] == pytest.approx(GAMMA)

    def test_deterministic_under_seed(self):
        phi = parse(ISOLATED_VERTEX_SENTENCE)
        a = limit_probability(phi, planar_class(), LimitConfig(seed=5))
        b = limit_probability(phi, planar_class(), LimitConfig(seed=5))
        assert a.probability == b.probability


class TestClusteringBound:
    def test_planar_value(self):
        c = clustering_bound(planar_class())
        assert c.lo == pytest.approx(0.036747, abs=2e-6)
        assert c.width < 5e-5

    def test_forests_value(self):
        c = clustering_bound(forests_class(), s=10)
        assert 0.38 < c.lo <= c.hi < 1 - math.exp(-0.5) + 1e-3

    def test_isolated_limit_lands_in_band(self):
        c = clustering_bound(planar_class())
        res = limit_probability(parse(ISOLATED_VERTEX_SENTENCE), planar_class())
        assert res.probability.lo <= c.hi  # lower band
