"""FastAPI service exposing the workbench.

Endpoints mirror the CLI subcommands: POST /limit, /zeroone, /census,
/sample, /ef, /check.  Domain errors come back as JSON
{"error": {"code", "message"}} with code input-error (HTTP 400),
inconclusive (409), or infeasible (422).
"""

from __future__ import annotations

import datetime

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from msolimits.classes import build_census, class_by_name
from msolimits.errors import InconclusiveError, InfeasibleError, InputError
from msolimits.graphs import graph_from_text, plain, rooted
from msolimits.limits import LimitConfig, limit_probability, zero_one_connected
from msolimits.mso import evaluate
from msolimits.parser import parse
from msolimits.sampling import run_report
from msolimits import schemas
from msolimits.ef import equivalent_m


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _resolve_class(spec: schemas.ClassSpec):
    c = class_by_name(spec.name, spec.k)
    if spec.gamma is not None:
        c = c.with_gamma(spec.gamma)
    return c


def create_app() -> FastAPI:
    app = FastAPI(title="msolimits", version="0.1.0")

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError):
        return JSONResponse(
            status_code=400, content={"error": {"code": "input-error", "message": str(exc)}}
        )

    @app.exception_handler(InconclusiveError)
    async def _inconclusive(request: Request, exc: InconclusiveError):
        return JSONResponse(
            status_code=409, content={"error": {"code": "inconclusive", "message": str(exc)}}
        )

    @app.exception_handler(InfeasibleError)
    async def _infeasible(request: Request, exc: InfeasibleError):
        return JSONResponse(
            status_code=422, content={"error": {"code": "infeasible", "message": str(exc)}}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": {"code": "input-error", "message": str(exc)}}
        )

    @app.post("/limit")
    def limit(req: schemas.LimitRequest):
        c = _resolve_class(req.class_spec)
        phi = parse(req.formula)
        config = LimitConfig(
            size_bound=req.size_bound,
            gamma=req.class_spec.gamma,
            budget=req.budget,
            giant_size=req.giant_size,
            giant_count=req.giant_count,
            seed=req.seed,
        )
        result = limit_probability(phi, c, config)
        body = result.to_json(formula_text=req.formula)
        body["config"] = req.model_dump(by_alias=True)
        body["timestamp"] = _now()
        return body

    @app.post("/zeroone")
    def zeroone(req: schemas.ZeroOneRequest):
        c = _resolve_class(req.class_spec)
        phi = parse(req.formula)
        verdict = zero_one_connected(phi, c, mode=req.mode, seed=req.seed)
        return {
            "formula": req.formula,
            "class": c.display_name(),
            "verdict": verdict,
            "config": req.model_dump(by_alias=True),
            "timestamp": _now(),
        }

    @app.post("/census")
    def census(req: schemas.CensusRequest):
        c = _resolve_class(req.class_spec)
        body = build_census(c, req.max_n).to_json()
        body["config"] = req.model_dump(by_alias=True)
        body["timestamp"] = _now()
        return body

    @app.post("/sample")
    def sample(req: schemas.SampleRequest):
        c = _resolve_class(req.class_spec)
        queries = [
            (q.name, rooted(graph_from_text(q.graph), q.root)) for q in req.queries
        ]
        report = run_report(
            c,
            req.n,
            req.count,
            burnin=req.burnin,
            thinning=req.thinning,
            queries=queries,
            seed=req.seed,
        )
        body = report.to_json()
        body["config"] = req.model_dump(by_alias=True)
        body["timestamp"] = _now()
        return body

    @app.post("/ef")
    def ef(req: schemas.EfRequest):
        a = plain(graph_from_text(req.graph_a))
        b = plain(graph_from_text(req.graph_b))
        return {
            "equivalent": equivalent_m(a, b, req.m),
            "m": req.m,
            "timestamp": _now(),
        }

    @app.post("/check")
    def check(req: schemas.CheckRequest):
        g = graph_from_text(req.graph)
        phi = parse(req.formula)
        return {
            "value": evaluate(plain(g), phi),
            "formula": req.formula,
            "timestamp": _now(),
        }

    return app


app = create_app()
