"""FastAPI service exposing the tradeoff computations; run with
`uvicorn fogran.service.app:app`."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import handlers
from . import schemas as S

app = FastAPI(title="fogran", description="Memory-load tradeoffs for cache-aided "
              "fog networks with downlink and sidelink", version="0.1.0")


def _run(fn, req):
    try:
        return fn(req)
    except handlers.DomainError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok"}


@app.post("/region", response_model=S.RegionResponse)
def region(req: S.RegionRequest):
    return _run(handlers.region, req)


@app.post("/scheme", response_model=S.PointModel)
def scheme(req: S.SchemeRequest):
    return _run(handlers.scheme, req)


@app.post("/plan", response_model=S.PlanResponse)
def plan(req: S.PlanRequest):
    return _run(handlers.plan, req)


@app.post("/simulate", response_model=S.SimulateResponse)
def simulate(req: S.SimulateRequest):
    return _run(handlers.simulate, req)


@app.post("/agnostic", response_model=S.PointModel)
def agnostic(req: S.AgnosticRequest):
    return _run(handlers.agnostic_point, req)


@app.post("/verify", response_model=S.VerifyResponse)
def verify(req: S.VerifyRequest):
    return _run(handlers.verify, req)


@app.post("/gaps", response_model=S.GapsResponse)
def gaps(req: S.GapsRequest):
    return _run(handlers.gaps, req)


@app.post("/figure", response_model=S.FigureResponse)
def figure(req: S.FigureRequest):
    return _run(handlers.figure, req)
