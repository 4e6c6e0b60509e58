import math
import random
from itertools import combinations, permutations

import pytest

from msolimits.canon import (
    appears,
    automorphism_count,
    canonical_form,
    canonical_key,
    isomorphic,
    isomorphic_structures,
    structure_key,
)
from msolimits.errors import InputError
from msolimits.graphs import (
    Graph,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    path_graph,
    plain,
    relabel,
    rooted,
    star_graph,
)


def all_graphs(n):
    pairs = list(combinations(range(1, n + 1), 2))
    for mask in range(1 << len(pairs)):
        yield Graph(n, (e for i, e in enumerate(pairs) if mask >> i & 1))


def brute_aut_count(g):
    count = 0
    for perm in permutations(range(1, g.n + 1)):
        mapping = dict(zip(range(1, g.n + 1), perm))
        if relabel(g, mapping) == g:
            count += 1
    return count


class TestCanonicalForm:
    def test_invariant_under_relabeling(self):
        rng = random.Random(7)
        for _ in range(100):
            n = rng.randrange(1, 8)
            pairs = list(combinations(range(1, n + 1), 2))
            g = Graph(n, (e for e in pairs if rng.random() < 0.4))
            perm = dict(zip(range(1, n + 1), rng.sample(range(1, n + 1), n)))
            assert canonical_key(relabel(g, perm)) == canonical_key(g)

    def test_canonical_form_is_fixed_point(self):
        g = Graph(5, [(1, 3), (2, 5), (3, 4)])
        c = canonical_form(g)
        assert canonical_form(c) == c

    def test_distinguishes_path_from_star(self):
        assert canonical_key(path_graph(4)) != canonical_key(star_graph(3))

    def test_class_count_on_four_vertices(self):
        assert len({canonical_key(g) for g in all_graphs(4)}) == 11

    def test_isomorphic_pairs(self):
        assert isomorphic(path_graph(3), relabel(path_graph(3), {1: 3, 2: 1, 3: 2}))
        assert not isomorphic(cycle_graph(4), path_graph(4))
        assert not isomorphic(Graph(3), Graph(4))


class TestAutomorphisms:
    @pytest.mark.parametrize(
        "g,expected",
        [
            (complete_graph(4), 24),
            (path_graph(4), 2),
            (cycle_graph(5), 10),
            (star_graph(4), 24),
            (complete_bipartite_graph(3, 3), 72),
            (Graph(3), 6),
        ],
    )
    def test_known_groups(self, g, expected):
        assert automorphism_count(g) == expected

    def test_against_brute_force(self):
        for g in all_graphs(5):
            assert automorphism_count(g) == brute_aut_count(g)

    def test_empty_graph_rejected(self):
        with pytest.raises(InputError):
            automorphism_count(Graph(0))

    def test_orbit_stabilizer_identity(self):
        # sum over isomorphism classes of n!/|Aut| counts labeled graphs
        n = 5
        per_class = {}
        for g in all_graphs(n):
            per_class.setdefault(canonical_key(g), g)
        total = sum(
            math.factorial(n) // automorphism_count(g) for g in per_class.values()
        )
        assert total == 2 ** math.comb(n, 2)


class TestStructureKeys:
    def test_root_breaks_symmetry(self):
        # P3 rooted at an end differs from P3 rooted at the middle
        end = rooted(path_graph(3), 1)
        middle = rooted(path_graph(3), 2)
        other_end = rooted(path_graph(3), 3)
        assert structure_key(end) != structure_key(middle)
        assert isomorphic_structures(end, other_end)

    def test_set_valuation_matters(self):
        a = plain(path_graph(3)).assign_so("X", {1})
        b = plain(path_graph(3)).assign_so("X", {2})
        c = plain(path_graph(3)).assign_so("X", {3})
        assert structure_key(a) != structure_key(b)
        assert structure_key(a) == structure_key(c)


class TestAppears:
    def test_rooted_k2_in_path(self):
        k2 = rooted(path_graph(2), 1)
        assert appears(k2, path_graph(4))

    def test_needs_single_bridge(self):
        # every size-2 subset of K3 has two crossing edges at the root
        k2 = rooted(path_graph(2), 1)
        assert not appears(k2, complete_graph(3))

    def test_pendant_triangle(self):
        tri = rooted(cycle_graph(3), 1)
        host = Graph(5, [(1, 2), (2, 3), (3, 4), (2, 4), (4, 5)])
        assert not appears(tri, path_graph(5))
        assert appears(tri, Graph(4, [(1, 2), (2, 3), (3, 4), (2, 4)]))

    def test_rejects_unrooted_query(self):
        with pytest.raises(InputError):
            appears(plain(path_graph(2)), path_graph(4))
