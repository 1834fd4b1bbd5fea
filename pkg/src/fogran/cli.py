"""Command-line front end: a thin client over the service layer.  By default
requests are handled in-process; pass --server to talk to a running HTTP
instance instead.

Exit codes: 0 success, 1 domain error, 2 verification failure, 64 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .core import rational_decimal
from .service import handlers
from .service import schemas as S

USAGE_EXIT = 64
DOMAIN_EXIT = 1
VERIFY_EXIT = 2

_ROUTES = {
    "region": ("/region", S.RegionRequest, handlers.region),
    "scheme": ("/scheme", S.SchemeRequest, handlers.scheme),
    "plan": ("/plan", S.PlanRequest, handlers.plan),
    "simulate": ("/simulate", S.SimulateRequest, handlers.simulate),
    "agnostic": ("/agnostic", S.AgnosticRequest, handlers.agnostic_point),
    "verify": ("/verify", S.VerifyRequest, handlers.verify),
    "gaps": ("/gaps", S.GapsRequest, handlers.gaps),
    "figure": ("/figure", S.FigureRequest, handlers.figure),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(USAGE_EXIT)


def _add_scheme_flags(p: _Parser, with_demand: bool = False):
    p.add_argument("--topology", required=True, help="topology JSON file")
    p.add_argument("--family", choices=["sym", "asym"], default="sym")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--class", dest="klass", choices=["shared", "sidelink"], default="shared")
    p.add_argument("--approach", type=int, choices=[1, 2], default=2)
    p.add_argument("--G", type=int)
    p.add_argument("--partition", help="group literal like '1|2,3'")
    p.add_argument("--direct-extension", action="store_true")
    if with_demand:
        p.add_argument("--demand", required=True, help="comma-separated file indices")


def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--server", default=argparse.SUPPRESS,
                        help="base URL of a running service; "
                        "default is in-process execution")
    common.add_argument("--format", choices=["json", "csv"],
                        default=argparse.SUPPRESS)
    parser = _Parser(prog="fogran", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=lambda **kw: _Parser(**kw, parents=[common]))

    p = sub.add_parser("region", help="outer-bound inequalities and corner points")
    p.add_argument("--topology", required=True)
    p.add_argument("--M", required=True, help="cache size as int or p/q")

    p = sub.add_parser("scheme", help="achievable corner point")
    _add_scheme_flags(p)

    p = sub.add_parser("plan", help="delivery plan for one demand")
    _add_scheme_flags(p, with_demand=True)

    p = sub.add_parser("simulate", help="bit-exact finite-field simulation")
    _add_scheme_flags(p, with_demand=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--B", type=int)

    p = sub.add_parser("agnostic", help="expected loads over a topology distribution")
    p.add_argument("--dist", required=True, help="distribution JSON file")
    p.add_argument("--G", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--class", dest="klass", choices=["shared", "sidelink"], default="shared")
    p.add_argument("--partition")
    p.add_argument("--mc", type=int, help="Monte Carlo sample count (default: exhaustive)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--overflow", choices=["clip", "truncate"], default="clip",
                   help="how to treat realizations with more users than files")

    p = sub.add_parser("verify", help="exhaustive worst-case demand vs closed form")
    _add_scheme_flags(p)
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--reduced", action="store_true",
                   help="profile-based search instead of raw enumeration")

    p = sub.add_parser("gaps", help="multiplicative-gap report over an M grid")
    p.add_argument("--topology", required=True)
    p.add_argument("--grid", required=True, help="start:stop:step, rational entries")

    p = sub.add_parser("figure", help="reference curve data as CSV")
    p.add_argument("--id", required=True)
    return parser


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _build_request(args) -> S.RegionRequest:
    cmd = args.command
    if cmd == "region":
        return S.RegionRequest(topology=_load_json(args.topology), M=args.M)
    if cmd in ("scheme", "plan", "simulate", "verify"):
        body = dict(topology=_load_json(args.topology), family=args.family, t=args.t,
                    klass=args.klass, approach=args.approach, G=args.G,
                    partition=args.partition, direct_extension=args.direct_extension)
        if cmd == "scheme":
            return S.SchemeRequest(**body)
        if cmd == "verify":
            return S.VerifyRequest(**body, cap=args.cap, reduced=args.reduced)
        body["demand"] = [int(x) for x in args.demand.split(",")]
        if cmd == "plan":
            return S.PlanRequest(**body)
        return S.SimulateRequest(**body, seed=args.seed, B=args.B)
    if cmd == "agnostic":
        return S.AgnosticRequest(dist=_load_json(args.dist), G=args.G, t=args.t, n=args.n,
                                 klass=args.klass, partition=args.partition,
                                 mc=args.mc, seed=args.seed, overflow=args.overflow)
    if cmd == "gaps":
        return S.GapsRequest(topology=_load_json(args.topology), grid=args.grid)
    if cmd == "figure":
        return S.FigureRequest(id=args.id)
    raise AssertionError(cmd)


def _call(args, request):
    path, _, handler = _ROUTES[args.command]
    if getattr(args, "server", None):
        import httpx
        resp = httpx.post(getattr(args, "server").rstrip("/") + path,
                          json=request.model_dump(by_alias=True), timeout=600.0)
        if resp.status_code == 422:
            raise handlers.DomainError(resp.json().get("detail", "invalid request"))
        resp.raise_for_status()
        return resp.json()
    return handler(request).model_dump(by_alias=True)


def _csv_of(payload) -> str:
    """Flat CSV rendering: rational cells get a decimal twin column."""
    if "csv" in payload:
        return payload["csv"]

    def cells(name, value):
        if isinstance(value, str) and not isinstance(value, bool):
            try:
                return [(name, value), (f"{name}_dec", rational_decimal(Fraction(value)))]
            except ValueError:
                pass
        return [(name, value)]

    if "corners" in payload:
        lines = ["R_sbs,R_sbs_dec,R_mbs,R_mbs_dec"]
        for rs, rm in payload["corners"]:
            lines.append(",".join([rs, rational_decimal(Fraction(rs)),
                                   rm, rational_decimal(Fraction(rm))]))
        return "\n".join(lines) + "\n"
    flat = []
    for key, value in payload.items():
        if isinstance(value, (str, int, bool)):
            flat.extend(cells(key, value))
    header = ",".join(name for name, _ in flat)
    row = ",".join(str(v) for _, v in flat)
    return f"{header}\n{row}\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        request = _build_request(args)
        payload = _call(args, request)
    except handlers.DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT

    fmt = getattr(args, "format", None) or ("csv" if args.command == "figure" else "json")
    if fmt == "csv":
        sys.stdout.write(_csv_of(payload))
    elif args.command == "figure":
        print(json.dumps(payload, indent=2))
    else:
        print(json.dumps(payload, indent=2))

    if args.command == "verify" and not payload.get("matches", False):
        return VERIFY_EXIT
    if args.command == "gaps" and payload.get("violations", 0):
        return VERIFY_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
