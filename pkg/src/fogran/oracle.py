"""Independent brute-force verification: exhaustive (or symmetry-reduced)
worst-case demand search, achievable-hull membership via exact LP, and the
multiplicative-gap report comparing outer-bound corners against what the
schemes actually reach.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .converse import converse_system, region_corners
from .core import DemandVector, MemoryLoadPoint, Topology
from .delivery import SchemeSpec, plan as build_plan
from .scheme_sym import per_demand_loads, sym_corner_points, worst_case_loads
from .scheme_asym import asym_corner_points
from .simplex import OPTIMAL, solve_lp

DEFAULT_DEMAND_CAP = 10 ** 6


@dataclass(frozen=True)
class WorstCase:
    demand: tuple[int, ...]
    r_mbs: Fraction
    r_sbs: Fraction


def _scheme_groups(topology: Topology, spec: SchemeSpec):
    return spec.resolve_groups(topology)


def _loads_from_plan(topology, spec, d: DemandVector) -> tuple[Fraction, Fraction]:
    p = build_plan(topology, spec, d)
    return p.r_mbs, p.r_sbs


def _loads_from_formula(topology, spec, groups, d: DemandVector) -> tuple[Fraction, Fraction]:
    return per_demand_loads(topology, spec.t, d, spec.class_, spec.approach,
                            groups=groups, direct_extension=spec.direct_extension)


def worst_case_demand(topology: Topology, spec: SchemeSpec,
                      cap: int = DEFAULT_DEMAND_CAP, evaluator: str = "plan",
                      reduced: bool = False) -> WorstCase:
    """Maximize R_mbs(d) + R_sbs(d) over demand vectors.

    `evaluator='plan'` sums actual message sizes (the independent path);
    'formula' uses the closed per-demand expressions.  `reduced=True`
    enumerates per-group distinct-demand profiles instead of raw vectors,
    exploiting file-relabeling symmetry.
    """
    groups = _scheme_groups(topology, spec)
    if reduced:
        return _worst_case_reduced(topology, spec, groups)
    space = topology.N ** topology.K
    if space > cap:
        raise ValueError(
            f"demand space N^K = {space} exceeds cap {cap}; "
            "rerun with reduced=True for the profile-based search")
    best = None
    for entries in product(range(1, topology.N + 1), repeat=topology.K):
        d = DemandVector(topology, entries)
        if evaluator == "plan":
            loads = _loads_from_plan(topology, spec, d)
        else:
            loads = _loads_from_formula(topology, spec, groups, d)
        key = (loads[0] + loads[1],)
        if best is None or key > best[0]:
            best = (key, entries, loads)
    _, entries, loads = best
    return WorstCase(demand=entries, r_mbs=loads[0], r_sbs=loads[1])


def _worst_case_reduced(topology: Topology, spec: SchemeSpec, groups) -> WorstCase:
    """Profile search: the per-demand loads depend only on how many distinct
    residual files each group requests, and every profile below the clipped
    group occupancies is realizable."""
    clip = max(topology.N - topology.K_mbs, 0)
    caps = [min(topology.L_subset(g), clip) for g in groups]
    floor = 0 if topology.K_mbs else 1
    best = None
    for profile in product(*[range(min(floor, c), c + 1) for c in caps]):
        d = demand_for_profile(topology, groups, profile)
        loads = _loads_from_formula(topology, spec, groups, d)
        key = (loads[0] + loads[1],)
        if best is None or key > best[0]:
            best = (key, d.entries, loads)
    _, entries, loads = best
    return WorstCase(demand=entries, r_mbs=loads[0], r_sbs=loads[1])


def demand_for_profile(topology: Topology, groups, profile) -> DemandVector:
    """A canonical demand realizing the given per-group distinct-residual
    counts: MBS users take files 1..K_mbs, and groups draw consecutive file
    windows above K_mbs, wrapping once the library runs out.  Distinct counts
    per group equal the profile while the total residual count is as large as
    the library allows (which maximizes the RLC-delivery loads)."""
    k0 = topology.K_mbs
    entries = list(range(1, k0 + 1))
    if k0 and topology.N < k0:
        raise ValueError("profile demands need N >= K_mbs")
    clip = topology.N - k0
    cursor = 0
    for members, want in zip(groups, profile):
        size = sum(topology.L[h - 1] for h in members)
        if want > size or want > clip:
            raise ValueError("profile exceeds group occupancy or library residual")
        files = [k0 + 1 + (cursor + i) % clip for i in range(want)] if want else []
        cursor += want
        fill = files[0] if files else (1 if k0 else None)
        if fill is None:
            raise ValueError("zero-count group impossible without MBS users")
        row = files + [fill] * (size - want)
        entries.extend(row)
    # reorder: entries were appended group by group, but the demand vector is
    # laid out SBS by SBS in index order
    by_sbs: dict[int, list[int]] = {}
    pos = 0
    flat = entries[k0:]
    for members, want in zip(groups, profile):
        for h in members:
            take = topology.L[h - 1]
            by_sbs[h] = flat[pos:pos + take]
            pos += take
    ordered = entries[:k0]
    for h in range(1, topology.H + 1):
        ordered.extend(by_sbs[h])
    return DemandVector(topology, tuple(ordered))


def closed_form_point(topology: Topology, spec: SchemeSpec) -> tuple[Fraction, Fraction]:
    groups = _scheme_groups(topology, spec)
    return worst_case_loads(topology, spec.t, spec.class_, spec.approach,
                            groups=groups, direct_extension=spec.direct_extension)


# ---------------------------------------------------------------------------
# Achievable-hull membership (memory sharing across corner points)


def achievable(points: list[MemoryLoadPoint], M: Fraction, r_mbs: Fraction,
               r_sbs: Fraction) -> bool:
    """Is (M, r_mbs, r_sbs) dominated by a convex combination of the corner
    points (using at most memory M and at most the stated loads)?"""
    cols = [(p.M, p.R_mbs, p.R_sbs) for p in points]
    n = len(cols)
    A_ub = [[c[0] for c in cols], [c[1] for c in cols], [c[2] for c in cols]]
    b_ub = [M, r_mbs, r_sbs]
    A_eq = [[Fraction(1)] * n]
    status, _, _ = solve_lp([Fraction(0)] * n, A_ub, b_ub, A_eq, [Fraction(1)])
    return status == OPTIMAL


def min_scale(points: list[MemoryLoadPoint], M: Fraction, r_mbs: Fraction,
              r_sbs: Fraction, scale_mbs: bool = True, scale_sbs: bool = True) -> Fraction | None:
    """Smallest gamma with (M, gamma-scaled loads) achievable; scaling can be
    restricted to one component (the other must then be met exactly)."""
    cols = [(p.M, p.R_mbs, p.R_sbs) for p in points]
    n = len(cols)
    # variables: lambda_1..n, gamma
    A_ub = [
        [c[0] for c in cols] + [Fraction(0)],
        [c[1] for c in cols] + [-r_mbs if scale_mbs else Fraction(0)],
        [c[2] for c in cols] + [-r_sbs if scale_sbs else Fraction(0)],
    ]
    b_ub = [M, Fraction(0) if scale_mbs else r_mbs, Fraction(0) if scale_sbs else r_sbs]
    A_eq = [[Fraction(1)] * n + [Fraction(0)]]
    c = [Fraction(0)] * n + [Fraction(1)]
    status, x, obj = solve_lp(c, A_ub, b_ub, A_eq, [Fraction(1)])
    if status != OPTIMAL:
        return None
    return obj


# ---------------------------------------------------------------------------
# Gap report


@dataclass(frozen=True)
class GapRow:
    M: Fraction
    corner: tuple[Fraction, Fraction]  # (R_sbs, R_mbs)
    check: str
    bound: Fraction
    ratio: Fraction | None  # achieved scaling factor; None when degenerate
    satisfied: bool


def uniform_occupancy(topology: Topology) -> bool:
    return len(set(topology.L)) == 1


def _isolated_top_gap_G(topology: Topology, M: Fraction) -> int | None:
    """Smallest applicable G for the partition-isolated sidelink gap claim."""
    from .scheme_asym import has_isolating_partition
    residual = topology.N - topology.K_mbs
    for G in range(2, topology.H + 1):
        if M >= (1 - Fraction(1, G)) * residual and has_isolating_partition(topology, G):
            return G
    return None


def gap_report(topology: Topology, M_grid) -> list[GapRow]:
    """For each M on the grid, compare every outer-bound corner against the
    achievable hulls and record whether each applicable multiplicative-gap
    claim holds.  Violations come back as rows with satisfied=False."""
    top = topology
    rows: list[GapRow] = []
    if top.N <= top.K_mbs:
        return rows
    residual = top.N - top.K_mbs
    sym_pts = list(sym_corner_points(top))

    def sidelink_row(pts, M, rs, rm, check, bound):
        # scale only the sidelink coordinate, holding the downlink budget
        if rs > 0:
            ratio = min_scale(pts, M, rm, rs, scale_mbs=False)
            ok = ratio is not None and ratio <= bound
        else:
            ratio = None
            ok = achievable(pts, M, rm, Fraction(0))
        return GapRow(M, (rs, rm), check, bound, ratio, ok)

    def both_row(pts, M, rs, rm, check, bound):
        ratio = min_scale(pts, M, rm, rs)
        ok = ratio is not None and ratio <= bound
        return GapRow(M, (rs, rm), check, bound, ratio, ok)

    for M in M_grid:
        M = Fraction(M)
        corners = region_corners(converse_system(top, M))
        in_gap_regime = top.H >= 2 and M < residual
        iso_G = _isolated_top_gap_G(top, M)
        for (rs, rm) in corners:
            if in_gap_regime and top.K_mbs < top.N <= top.K_mbs + top.L[0]:
                rows.append(sidelink_row(sym_pts, M, rs, rm,
                                         "sidelink_factor_small_library",
                                         Fraction(top.H, top.H - 1)))
            if in_gap_regime and top.N > top.K_mbs + top.L[0]:
                g = Fraction(top.H) if M == 0 else min(Fraction(top.H), Fraction(residual) / M)
                rows.append(both_row(sym_pts, M, rs, rm, "general_factor_2g", 2 * g))
            if in_gap_regime and uniform_occupancy(top) and top.N > top.K_mbs + top.L[0]:
                rows.append(both_row(sym_pts, M, rs, rm, "uniform_factor_22", Fraction(22)))
            if iso_G is not None and top.N >= top.K_mbs + top.L[0]:
                pts = asym_corner_points(top, iso_G)
                rows.append(sidelink_row(pts, M, rs, rm, "sidelink_factor_partitioned",
                                         Fraction(iso_G, iso_G - 1)))
    return rows


def achievability_consistency(topology: Topology) -> list[str]:
    """Sanity: every scheme corner point must satisfy the outer bound at its
    own memory; returns human-readable violations (expected empty)."""
    issues = []
    points = list(sym_corner_points(topology))
    for G in range(1, topology.H + 1):
        points.extend(asym_corner_points(topology, G))
    for p in points:
        sys_at = converse_system(topology, min(p.M, Fraction(topology.N)))
        if not sys_at.satisfied_by(p.R_mbs, p.R_sbs):
            issues.append(f"point {p} violates the outer bound")
    return issues
