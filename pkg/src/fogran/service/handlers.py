"""Request handlers shared by the FastAPI routes and the command-line thin
client: parse models, call the library, format responses."""

from __future__ import annotations

from fractions import Fraction

from .. import agnostic as ag
from .. import codec, delivery, figures, oracle
from ..converse import converse_system, region_corners
from ..core import DemandVector, Topology, as_rational, rational_str
from ..scheme_asym import Partition, asym_shared_point, asym_sidelink_point
from ..scheme_sym import SHARED, SymSchemeParams, sym_shared_point, sym_sidelink_point
from . import schemas as S


class DomainError(ValueError):
    """Invalid parameters for the requested computation (HTTP 422 / exit 1)."""


def _topology(model: S.TopologyModel) -> Topology:
    return Topology.from_json_dict(model.model_dump())


def _wrap(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(str(exc)) from exc


def _point_model(p) -> S.PointModel:
    return S.PointModel(**p.to_json_dict())


def region(req: S.RegionRequest) -> S.RegionResponse:
    top = _wrap(_topology, req.topology)
    system = _wrap(converse_system, top, _wrap(as_rational, req.M))
    corners = _wrap(region_corners, system)
    return S.RegionResponse(
        inequalities=system.to_json_dict()["inequalities"],
        corners=[[rational_str(rs), rational_str(rm)] for rs, rm in corners])


def _spec_from(req: S.SchemeRequest) -> delivery.SchemeSpec:
    return delivery.SchemeSpec(family=req.family, t=req.t, class_=req.klass,
                               approach=req.approach, G=req.G, partition=req.partition,
                               direct_extension=req.direct_extension)


def scheme(req: S.SchemeRequest) -> S.PointModel:
    top = _wrap(_topology, req.topology)
    if req.family == "sym":
        params = _wrap(SymSchemeParams, top, req.t)
        point = _wrap(sym_shared_point if req.klass == SHARED else sym_sidelink_point, params)
    else:
        G = req.G if req.G is not None else (
            Partition.parse(top, req.partition).G if req.partition else None)
        if G is None:
            raise DomainError("asym scheme needs G or an explicit partition")
        fn = asym_shared_point if req.klass == SHARED else asym_sidelink_point
        point = _wrap(fn, top, G, req.t, req.partition)
    return _point_model(point)


def plan(req: S.PlanRequest) -> S.PlanResponse:
    top = _wrap(_topology, req.topology)
    d = _wrap(DemandVector, top, tuple(req.demand))
    p = _wrap(delivery.plan, top, _spec_from(req), d)
    data = p.to_json_dict()
    return S.PlanResponse(
        step1=[S.MessageModel(**m) for m in data["step1"]],
        step2=[S.MessageModel(**m) for m in data["step2"]],
        per_sbs_loads=data["per_sbs_loads"], R_mbs=data["R_mbs"], R_sbs=data["R_sbs"])


def simulate(req: S.SimulateRequest) -> S.SimulateResponse:
    top = _wrap(_topology, req.topology)
    d = _wrap(DemandVector, top, tuple(req.demand))
    try:
        _, transcript = codec.simulate(top, _spec_from(req), d, seed=req.seed, B=req.B)
    except codec.CodecError as exc:
        raise DomainError(str(exc)) from exc
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    data = transcript.to_json_dict()
    return S.SimulateResponse(decoded=data["decoded"],
                              measured_loads=data["measured_loads"],
                              symbols_per_link=data["symbols_per_link"])


def agnostic_point(req: S.AgnosticRequest) -> S.PointModel:
    dist = _wrap(ag.TopologyDistribution.from_json_dict, req.dist.model_dump())
    mode = (ag.MonteCarlo(samples=req.mc, seed=req.seed) if req.mc
            else ag.Exhaustive(cap=req.exhaustive_cap))
    fn = ag.agnostic_shared_point if req.klass == SHARED else ag.agnostic_sidelink_point
    point = _wrap(fn, dist, req.G, req.t, req.n, partition=req.partition,
                  eval_mode=mode, overflow=req.overflow)
    return _point_model(point)


def verify(req: S.VerifyRequest) -> S.VerifyResponse:
    top = _wrap(_topology, req.topology)
    spec = _spec_from(req)
    worst = _wrap(oracle.worst_case_demand, top, spec, cap=req.cap, reduced=req.reduced)
    closed = _wrap(oracle.closed_form_point, top, spec)
    groups = _wrap(spec.resolve_groups, top)
    M = Fraction(req.t * (top.N - top.K_mbs), len(groups))
    matches = (worst.r_mbs, worst.r_sbs) == closed
    return S.VerifyResponse(
        demand=list(worst.demand),
        loads=S.PointModel(M=rational_str(M), R_mbs=rational_str(worst.r_mbs),
                           R_sbs=rational_str(worst.r_sbs)),
        closed_form=S.PointModel(M=rational_str(M), R_mbs=rational_str(closed[0]),
                                 R_sbs=rational_str(closed[1])),
        matches=matches)


def _parse_grid(grid: str):
    parts = grid.split(":")
    if len(parts) != 3:
        raise DomainError("grid must look like start:stop:step")
    start, stop, step = (as_rational(p) for p in parts)
    if step <= 0:
        raise DomainError("grid step must be positive")
    out = []
    m = start
    while m <= stop:
        out.append(m)
        m += step
    return out


def gaps(req: S.GapsRequest) -> S.GapsResponse:
    top = _wrap(_topology, req.topology)
    grid = _parse_grid(req.grid)
    rows = _wrap(oracle.gap_report, top, grid)
    models = [S.GapRowModel(M=rational_str(r.M),
                            corner=[rational_str(r.corner[0]), rational_str(r.corner[1])],
                            check=r.check, bound=rational_str(r.bound),
                            ratio=None if r.ratio is None else rational_str(r.ratio),
                            satisfied=r.satisfied)
              for r in rows]
    return S.GapsResponse(rows=models, violations=sum(1 for r in rows if not r.satisfied))


def figure(req: S.FigureRequest) -> S.FigureResponse:
    rows = _wrap(figures.figure_rows, req.id)
    return S.FigureResponse(csv=figures.rows_to_csv(rows))
