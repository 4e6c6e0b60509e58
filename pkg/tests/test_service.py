import math
import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from msolimits.graphs import graph_to_text, path_graph, star_graph, Graph
from msolimits.mso import ISOLATED_VERTEX_SENTENCE
from msolimits.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


class TestLimitEndpoint:
    def test_isolated_vertex(self, client):
        resp = client.post(
            "/limit",
            json={"formula": ISOLATED_VERTEX_SENTENCE, "classSpec": {"class": "planar"}},
        )
        assert resp.status_code == 200
        body = resp.json()
        lo, hi = body["interval"]
        assert lo <= 1 - math.exp(-1 / 27.22679) <= hi
        assert body["constants"]["gamma"] == pytest.approx(27.22679)
        assert body["censusSizeBound"] == 5
        assert "timestamp" in body and "config" in body

    def test_parse_error(self, client):
        resp = client.post(
            "/limit", json={"formula": "ex x. (", "classSpec": {"class": "planar"}}
        )
        assert resp.status_code == 400
        assert resp.json()["error"]["code"] == "input-error"

    def test_unknown_class(self, client):
        resp = client.post(
            "/limit", json={"formula": "ex x. x = x", "classSpec": {"class": "torus"}}
        )
        assert resp.status_code == 400

    def test_missing_gamma_is_input_error(self, client):
        resp = client.post(
            "/limit",
            json={"formula": "ex x. x = x", "classSpec": {"class": "treewidth", "k": 2}},
        )
        assert resp.status_code == 400

    def test_rank_cap_is_infeasible(self, client):
        resp = client.post(
            "/limit",
            json={
                "formula": "ex a. ex b. ex c. ex d. a = a",
                "classSpec": {"class": "planar"},
            },
        )
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "infeasible"


class TestZeroOneEndpoint:
    def test_isolated_vertex_is_zero(self, client):
        resp = client.post(
            "/zeroone",
            json={"formula": ISOLATED_VERTEX_SENTENCE, "classSpec": {"class": "planar"}},
        )
        assert resp.status_code == 200
        assert resp.json()["verdict"] == 0

    def test_trivial_is_one(self, client):
        resp = client.post(
            "/zeroone", json={"formula": "ex x. x = x", "classSpec": {"class": "planar"}}
        )
        assert resp.json()["verdict"] == 1


class TestCensusEndpoint:
    def test_planar_counts(self, client):
        resp = client.post("/census", json={"classSpec": {"class": "planar"}, "maxN": 4})
        assert resp.status_code == 200
        body = resp.json()
        assert [body["labeledConnectedCounts"][str(n)] for n in range(1, 5)] == [1, 1, 4, 38]

    def test_validation_error(self, client):
        resp = client.post("/census", json={"classSpec": {"class": "planar"}, "maxN": "many"})
        assert resp.status_code == 400


class TestSampleEndpoint:
    def test_report_fields(self, client):
        resp = client.post(
            "/sample",
            json={
                "classSpec": {"class": "forests"},
                "n": 10,
                "count": 60,
                "seed": 4,
                "queries": [
                    {"name": "pendant-edge", "graph": graph_to_text(path_graph(2)), "root": 1}
                ],
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["sampleSize"] == 60
        assert body["method"] == "exact-recursive"
        assert "pendant-edge" in body["appearanceFrequency"]

    def test_bad_query_graph(self, client):
        resp = client.post(
            "/sample",
            json={
                "classSpec": {"class": "forests"},
                "n": 6,
                "count": 5,
                "queries": [{"name": "q", "graph": "graph nope", "root": 1}],
            },
        )
        assert resp.status_code == 400


class TestEfEndpoint:
    def test_k2_vs_two_k1(self, client):
        resp = client.post(
            "/ef",
            json={
                "graphA": graph_to_text(path_graph(2)),
                "graphB": graph_to_text(Graph(2)),
                "m": 2,
            },
        )
        assert resp.status_code == 200
        assert resp.json() == {
            "equivalent": False,
            "m": 2,
            "timestamp": resp.json()["timestamp"],
        }

    def test_rank_one_blind(self, client):
        resp = client.post(
            "/ef",
            json={
                "graphA": graph_to_text(path_graph(2)),
                "graphB": graph_to_text(Graph(2)),
                "m": 1,
            },
        )
        assert resp.json()["equivalent"] is True


class TestCheckEndpoint:
    def test_star_has_dominating_vertex(self, client):
        resp = client.post(
            "/check",
            json={
                "graph": graph_to_text(star_graph(4)),
                "formula": "ex x. all y. (x = y | E(x,y))",
            },
        )
        assert resp.json()["value"] is True

    def test_free_variable_is_input_error(self, client):
        resp = client.post(
            "/check",
            json={"graph": graph_to_text(Graph(2)), "formula": "x in X"},
        )
        assert resp.status_code == 400
