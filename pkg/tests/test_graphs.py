import json

import pytest
from hypothesis import given, strategies as st

from msolimits.errors import InputError
from msolimits.graphs import (
    Graph,
    VarSet,
    complete_graph,
    components,
    cycle_graph,
    disjoint_sum,
    graph_from_text,
    graph_to_text,
    is_connected,
    path_graph,
    plain,
    relabel,
    repeat_sum,
    rooted,
    rooted_sum,
    star_graph,
    structure_from_json,
    structure_to_json,
)


def random_graph_strategy(max_n=6):
    def build(n, mask):
        pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
        return Graph(n, (e for i, e in enumerate(pairs) if mask >> i & 1))

    return st.integers(0, max_n).flatmap(
        lambda n: st.builds(build, st.just(n), st.integers(0, 2 ** (n * (n - 1) // 2) - 1))
    )


class TestGraph:
    def test_edges_normalized(self):
        g = Graph(3, [(2, 1), (3, 2)])
        assert g.edges == frozenset({(1, 2), (2, 3)})

    def test_vertex_out_of_range(self):
        with pytest.raises(InputError):
            Graph(2, [(1, 3)])

    def test_loop_rejected(self):
        with pytest.raises(InputError):
            Graph(2, [(1, 1)])

    def test_negative_order_rejected(self):
        with pytest.raises(InputError):
            Graph(-1)

    def test_builders(self):
        assert len(complete_graph(5).edges) == 10
        assert len(path_graph(4).edges) == 3
        assert len(cycle_graph(5).edges) == 5
        assert star_graph(4).degree_sequence() == (1, 1, 1, 1, 4)

    def test_degree_sequence(self):
        assert path_graph(3).degree_sequence() == (1, 1, 2)

    def test_relabel_roundtrip(self):
        g = path_graph(4)
        perm = {1: 3, 2: 1, 3: 4, 4: 2}
        inverse = {v: k for k, v in perm.items()}
        assert relabel(relabel(g, perm), inverse) == g


class TestConnectivity:
    def test_empty_graph_not_connected(self):
        assert not is_connected(Graph(0))

    def test_single_vertex_connected(self):
        assert is_connected(Graph(1))

    def test_path_connected(self):
        assert is_connected(path_graph(5))

    def test_two_components(self):
        g = Graph(4, [(1, 2), (3, 4)])
        assert not is_connected(g)
        comps = components(g)
        assert [c.n for c in comps] == [2, 2]

    def test_components_ordered_by_min_vertex(self):
        g = Graph(5, [(2, 4)])
        comps = components(g)
        assert [c.n for c in comps] == [1, 2, 1, 1]

    @given(random_graph_strategy())
    def test_components_partition_vertices(self, g):
        comps = components(g)
        assert sum(c.n for c in comps) == g.n
        assert sum(len(c.edges) for c in comps) == len(g.edges)
        assert all(is_connected(c) for c in comps)


class TestStructureAlgebra:
    def test_varset_disjointness(self):
        with pytest.raises(InputError):
            VarSet(fo_vars=["x"], so_vars=["x"])

    def test_assignment_validation(self):
        with pytest.raises(InputError):
            plain(Graph(2)).assign_fo("x", 3)

    def test_disjoint_sum_offsets(self):
        s = disjoint_sum(plain(path_graph(2)), plain(path_graph(2)))
        assert s.graph.edges == frozenset({(1, 2), (3, 4)})

    def test_disjoint_sum_rejects_clashing_fo(self):
        a = plain(Graph(1)).assign_fo("x", 1)
        with pytest.raises(InputError):
            disjoint_sum(a, a)

    def test_rooted_sum_bridges_roots(self):
        s = rooted_sum(rooted(Graph(1)), rooted(Graph(1)))
        assert s.graph.edges == frozenset({(1, 2)})
        assert s.fo["Root"] == 1

    def test_repeat_sum_zero_copies(self):
        base = rooted(Graph(1))
        assert repeat_sum(base, rooted(path_graph(2)), 0) == base

    def test_repeat_sum_growth(self):
        base = rooted(Graph(1))
        out = repeat_sum(base, rooted(path_graph(2)), 3)
        assert out.graph.n == 7
        assert out.fo["Root"] == 1


class TestSerialization:
    def test_graph_text_roundtrip(self):
        g = Graph(4, [(1, 2), (2, 4)])
        assert graph_from_text(graph_to_text(g)) == g

    def test_graph_text_format(self):
        text = graph_to_text(path_graph(3))
        assert text.splitlines()[0] == "graph 3"
        assert "edge 1 2" in text

    def test_graph_text_comments_and_blanks(self):
        g = graph_from_text("# a triangle\ngraph 3\n\nedge 1 2\nedge 2 3 # back\nedge 1 3\n")
        assert g == cycle_graph(3)

    def test_graph_text_errors(self):
        with pytest.raises(InputError):
            graph_from_text("graph two\n")
        with pytest.raises(InputError):
            graph_from_text("edge 1 2\n")
        with pytest.raises(InputError):
            graph_from_text("graph 2\nedge 1 5\n")

    @given(random_graph_strategy())
    def test_text_roundtrip_random(self, g):
        assert graph_from_text(graph_to_text(g)) == g

    def test_structure_json_roundtrip(self):
        s = rooted(path_graph(3)).assign_so("X", {1, 3})
        again = structure_from_json(structure_to_json(s))
        assert again == s

    def test_structure_json_shape(self):
        d = json.loads(structure_to_json(rooted(Graph(2))))
        assert set(d) == {"n", "edges", "fo", "so"}
