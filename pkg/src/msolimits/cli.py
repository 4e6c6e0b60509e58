"""Command-line client for the workbench service.

Each subcommand posts to the HTTP API — in-process by default, or to a
running server via --server — and writes the JSON response to stdout or
--out.  Exit codes: 0 ok, 2 input error, 3 inconclusive, 4 feasibility
bound exceeded.
"""

from __future__ import annotations

import json
import sys
from typing import Optional

import click
import httpx

EXIT_CODES = {"input-error": 2, "inconclusive": 3, "infeasible": 4}


def _client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from msolimits.service import app

    return TestClient(app, raise_server_exceptions=False)


def _post(ctx_obj: dict, path: str, payload: dict) -> None:
    with _client(ctx_obj.get("server")) as client:
        resp = client.post(path, json=payload)
    body = resp.json()
    text = json.dumps(body, indent=2, sort_keys=True)
    out = ctx_obj.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)
    if resp.status_code != 200:
        code = body.get("error", {}).get("code", "input-error")
        sys.exit(EXIT_CODES.get(code, 2))


def _class_spec(name: str, k: Optional[int], gamma: Optional[float]) -> dict:
    spec: dict = {"class": name}
    if k is not None:
        spec["k"] = k
    if gamma is not None:
        spec["gamma"] = gamma
    return spec


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        click.echo(
            json.dumps({"error": {"code": "input-error", "message": str(exc)}}), err=True
        )
        sys.exit(2)


class_option = click.option("--class", "class_name", default="planar", show_default=True)
k_option = click.option("--k", type=int, default=None, help="parameter for treewidth / minor-free")
gamma_option = click.option("--gamma", type=float, default=None, help="override the growth constant")
seed_option = click.option("--seed", type=int, default=0, show_default=True)


@click.group()
@click.option("--server", default=None, help="base URL of a running service; in-process when omitted")
@click.option("--out", default=None, help="write the JSON response to this file")
@click.option("--threads", type=int, default=1, show_default=True, help="cap on internal parallelism")
@click.pass_context
def main(ctx, server, out, threads):
    """Asymptotic MSO probabilities on minor-closed graph classes."""
    ctx.obj = {"server": server, "out": out, "threads": threads}


@main.command()
@click.argument("formula_file")
@class_option
@k_option
@gamma_option
@seed_option
@click.option("--size-bound", type=int, default=5, show_default=True)
@click.option("--budget", type=int, default=2, show_default=True, help="max small-component count enumerated exactly")
@click.pass_context
def limit(ctx, formula_file, class_name, k, gamma, seed, size_bound, budget):
    """Limiting probability of the sentence in FORMULA_FILE."""
    _post(
        ctx.obj,
        "/limit",
        {
            "formula": _read(formula_file),
            "classSpec": _class_spec(class_name, k, gamma),
            "sizeBound": size_bound,
            "budget": budget,
            "seed": seed,
        },
    )


@main.command()
@click.argument("formula_file")
@class_option
@k_option
@gamma_option
@seed_option
@click.option("--mode", type=click.Choice(["auto", "exact-tiny", "empirical"]), default="auto", show_default=True)
@click.pass_context
def zeroone(ctx, formula_file, class_name, k, gamma, seed, mode):
    """Zero-one verdict on the connected class."""
    _post(
        ctx.obj,
        "/zeroone",
        {
            "formula": _read(formula_file),
            "classSpec": _class_spec(class_name, k, gamma),
            "mode": mode,
            "seed": seed,
        },
    )


@main.command()
@class_option
@k_option
@click.option("--size-bound", type=int, default=5, show_default=True)
@click.pass_context
def census(ctx, class_name, k, size_bound):
    """Connected census with automorphism counts up to --size-bound."""
    _post(
        ctx.obj,
        "/census",
        {"classSpec": _class_spec(class_name, k, None), "maxN": size_bound},
    )


@main.command()
@class_option
@k_option
@seed_option
@click.option("--n", type=int, required=True)
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--burnin", type=int, default=None)
@click.option("--thinning", type=int, default=None)
@click.option("--query", "queries", multiple=True, metavar="NAME=GRAPHFILE[:ROOT]",
              help="rooted appearance query; repeatable")
@click.pass_context
def sample(ctx, class_name, k, seed, n, count, burnin, thinning, queries):
    """Empirical sample report at size --n."""
    parsed = []
    for spec in queries:
        if "=" not in spec:
            click.echo(json.dumps({"error": {"code": "input-error",
                                             "message": f"bad --query {spec!r}"}}), err=True)
            sys.exit(2)
        name, rest = spec.split("=", 1)
        root = 1
        if ":" in rest:
            rest, root_text = rest.rsplit(":", 1)
            root = int(root_text)
        parsed.append({"name": name, "graph": _read(rest), "root": root})
    _post(
        ctx.obj,
        "/sample",
        {
            "classSpec": _class_spec(class_name, k, None),
            "n": n,
            "count": count,
            "burnin": burnin,
            "thinning": thinning,
            "seed": seed,
            "queries": parsed,
        },
    )


@main.command()
@click.argument("graph_a")
@click.argument("graph_b")
@click.option("--m", type=int, required=True, help="quantifier rank")
@click.pass_context
def ef(ctx, graph_a, graph_b, m):
    """Rank-m game equivalence of two GRAPH v1 files."""
    _post(ctx.obj, "/ef", {"graphA": _read(graph_a), "graphB": _read(graph_b), "m": m})


@main.command()
@click.argument("graph_file")
@click.argument("formula_file")
@click.pass_context
def check(ctx, graph_file, formula_file):
    """Evaluate the sentence in FORMULA_FILE on one graph."""
    _post(ctx.obj, "/check", {"graph": _read(graph_file), "formula": _read(formula_file)})


if __name__ == "__main__":
    main()
