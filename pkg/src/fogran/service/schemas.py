"""Pydantic request/response models for the HTTP service; the CLI reuses
them so both surfaces speak the same wire format.  Rationals travel as
'p/q' strings."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class TopologyModel(BaseModel):
    H: int
    K_mbs: int
    L: list[int]
    N: int


class DistModel(BaseModel):
    K_mbs: dict
    L: list[dict]
    N: int


class PointModel(BaseModel):
    M: str
    R_mbs: str
    R_sbs: str


class RegionRequest(BaseModel):
    topology: TopologyModel
    M: str


class RegionResponse(BaseModel):
    inequalities: list[list[str]]
    corners: list[list[str]]


class SchemeRequest(BaseModel):
    topology: TopologyModel
    family: Literal["sym", "asym"] = "sym"
    t: int
    klass: Literal["shared", "sidelink"] = Field(default="shared", alias="class")
    approach: int = 2
    G: Optional[int] = None
    partition: Optional[str] = None
    direct_extension: bool = False

    model_config = {"populate_by_name": True}


class PlanRequest(SchemeRequest):
    demand: list[int]


class MessageModel(BaseModel):
    source: int
    kind: str
    payload: dict
    size: str


class PlanResponse(BaseModel):
    step1: list[MessageModel]
    step2: list[MessageModel]
    per_sbs_loads: dict[str, str]
    R_mbs: str
    R_sbs: str


class SimulateRequest(PlanRequest):
    seed: int = 0
    B: Optional[int] = None


class SimulateResponse(BaseModel):
    decoded: dict[str, bool]
    measured_loads: dict[str, str]
    symbols_per_link: dict[str, int]


class AgnosticRequest(BaseModel):
    dist: DistModel
    G: int
    t: int
    n: int
    klass: Literal["shared", "sidelink"] = Field(default="shared", alias="class")
    partition: Optional[str] = None
    mc: Optional[int] = None
    seed: int = 0
    exhaustive_cap: int = 200_000
    overflow: Literal["clip", "truncate"] = "clip"

    model_config = {"populate_by_name": True}


class VerifyRequest(SchemeRequest):
    cap: int = 1_000_000
    reduced: bool = False


class VerifyResponse(BaseModel):
    demand: list[int]
    loads: PointModel
    closed_form: PointModel
    matches: bool


class GapsRequest(BaseModel):
    topology: TopologyModel
    grid: str  # "start:stop:step" with rational entries


class GapRowModel(BaseModel):
    M: str
    corner: list[str]
    check: str
    bound: str
    ratio: Optional[str] = None
    satisfied: bool


class GapsResponse(BaseModel):
    rows: list[GapRowModel]
    violations: int


class FigureRequest(BaseModel):
    id: str


class FigureResponse(BaseModel):
    csv: str
