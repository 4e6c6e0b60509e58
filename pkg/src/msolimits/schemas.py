"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class ClassSpec(BaseModel):
    """Graph-class selector shared by all requests."""

    model_config = ConfigDict(populate_by_name=True)

    name: str = Field(alias="class")
    k: Optional[int] = None
    gamma: Optional[float] = None


class RootedQuery(BaseModel):
    """A rooted connected structure for appearance statistics."""

    name: str
    graph: str  # GRAPH v1 text
    root: int = 1


class LimitRequest(BaseModel):
    formula: str
    class_spec: ClassSpec = Field(alias="classSpec")
    model_config = ConfigDict(populate_by_name=True)
    size_bound: int = Field(default=5, alias="sizeBound")
    budget: int = 2
    giant_size: int = Field(default=7, alias="giantSize")
    giant_count: int = Field(default=3, alias="giantCount")
    seed: int = 0


class ZeroOneRequest(BaseModel):
    formula: str
    class_spec: ClassSpec = Field(alias="classSpec")
    model_config = ConfigDict(populate_by_name=True)
    mode: str = "auto"  # auto | exact-tiny | empirical
    seed: int = 0


class CensusRequest(BaseModel):
    class_spec: ClassSpec = Field(alias="classSpec")
    model_config = ConfigDict(populate_by_name=True)
    max_n: int = Field(default=5, alias="maxN")


class SampleRequest(BaseModel):
    class_spec: ClassSpec = Field(alias="classSpec")
    model_config = ConfigDict(populate_by_name=True)
    n: int
    count: int = 100
    burnin: Optional[int] = None
    thinning: Optional[int] = None
    seed: int = 0
    queries: list[RootedQuery] = Field(default_factory=list)


class EfRequest(BaseModel):
    graph_a: str = Field(alias="graphA")  # GRAPH v1 text
    graph_b: str = Field(alias="graphB")
    model_config = ConfigDict(populate_by_name=True)
    m: int


class CheckRequest(BaseModel):
    graph: str  # GRAPH v1 text
    formula: str


class ErrorBody(BaseModel):
    code: str  # input-error | inconclusive | infeasible
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody
