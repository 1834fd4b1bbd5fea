"""Achievable corner points under symmetric subpacketization (one subfile per
t-subset of SBSs) and per-demand load evaluation for the four delivery
variants: shared-link RLC, shared-link multicast, sidelink RLC, and sidelink
grouped multicast.

The per-demand helpers here are written against a grouping of the SBSs so the
asymmetric (partitioned) schemes can reuse them; the symmetric scheme is the
singleton grouping.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .core import DemandVector, MemoryLoadPoint, Topology, binom, pos_part

SHARED = "shared"
SIDELINK = "sidelink"


def singleton_groups(H: int) -> tuple[tuple[int, ...], ...]:
    return tuple((h,) for h in range(1, H + 1))


@dataclass(frozen=True)
class SymSchemeParams:
    """Symmetric-subpacketization scheme at cache slot t in [0..H]; the cache
    size is M(t) = t(N - K_mbs)/H."""

    topology: Topology
    t: int

    def __post_init__(self):
        if not 0 <= self.t <= self.topology.H:
            raise ValueError(f"t must be in [0, {self.topology.H}]")

    @property
    def M(self) -> Fraction:
        t = self.topology
        return Fraction(self.t * (t.N - t.K_mbs), t.H)

    def clipped(self, h: int) -> int:
        return self.topology.clipped_occupancy(h)


def trivial_point(topology: Topology, M=Fraction(0)) -> MemoryLoadPoint:
    """Broadcast-everything scheme: optimal when N <= K_mbs, where caches and
    the sidelink are useless and the whole library goes on the downlink."""
    return MemoryLoadPoint(M=Fraction(M), R_mbs=Fraction(topology.N), R_sbs=Fraction(0))


def _require_coded_regime(topology: Topology):
    if topology.N <= topology.K_mbs:
        raise ValueError("N <= K_mbs: use the trivial broadcast scheme")


def shared_rlc_worst(topology: Topology, t: int) -> Fraction:
    """Worst-case step-2 downlink load when the MBS sends whole-file RLCs."""
    top = topology
    return Fraction(min(top.N - top.K_mbs, top.K_sbs) * (top.H - t), top.H)


def multicast_shared_load(counts, G: int, t: int) -> Fraction:
    """Step-2 downlink load of the round-based multicast delivery for the
    per-group distinct-demand counts `counts` (any order)."""
    u = sorted(counts, reverse=True)
    num = sum(u[r - 1] * binom(G - r, t) for r in range(1, G - t + 1)) if G > t else 0
    return Fraction(num, binom(G, t))


def sidelink_rlc_worst(topology: Topology, t: int) -> Fraction:
    """Worst-case sidelink load when every SBS sends sub-piece RLCs."""
    top = topology
    return (Fraction(min(top.N - top.K_mbs, top.K_sbs)) * top.H * binom(top.H - 2, t - 1)
            / (t * binom(top.H, t)))


def grouped_sidelink_load(counts, G: int, t: int) -> Fraction:
    """Step-2 sidelink load of the grouped multicast delivery: for every
    (t+1)-subset of groups, one term from the largest three order statistics
    of the member counts."""
    u = list(counts)
    total = Fraction(0)
    for S in combinations(range(G), t + 1):
        w = sorted((u[g] for g in S), reverse=True)
        total += w[0] + Fraction(pos_part(Fraction(w[t] - w[0] + w[t - 1])), t)
    return total / binom(G, t)


def direct_sidelink_load(counts, G: int, t: int) -> Fraction:
    """Step-2 sidelink load of the direct multi-round extension (no user
    regrouping): full rounds pay the (t+1)/t sub-piece penalty, partial
    rounds ship one whole subfile per multicast set."""
    u = sorted(counts, reverse=True)
    total = Fraction(0)
    for j in range(1, (u[0] if u else 0) + 1):
        m = sum(1 for x in u if x >= j)
        touched = binom(G, t + 1) - binom(G - m, t + 1)
        full = binom(m, t + 1)
        total += Fraction(full * (t + 1), t) + (touched - full)
    return total / binom(G, t)


def sym_shared_point(params: SymSchemeParams) -> MemoryLoadPoint:
    """Corner point with no sidelink use: the downlink finishes delivery via
    whichever of the two step-2 variants has the smaller worst case."""
    top = params.topology
    _require_coded_regime(top)
    t = params.t
    clipped = [params.clipped(h) for h in range(1, top.H + 1)]
    extra = min(shared_rlc_worst(top, t), multicast_shared_load(clipped, top.H, t))
    return MemoryLoadPoint(M=params.M, R_mbs=top.K_mbs + extra, R_sbs=Fraction(0))


def sym_sidelink_point(params: SymSchemeParams) -> MemoryLoadPoint:
    """Corner point with minimal downlink load K_mbs: step 2 moves to the
    sidelink, again taking the better of the two variants."""
    top = params.topology
    _require_coded_regime(top)
    if params.t == 0:
        raise ValueError("sidelink delivery requires t >= 1")
    t = params.t
    clipped = [params.clipped(h) for h in range(1, top.H + 1)]
    extra = min(
        Fraction(min(top.N - top.K_mbs, top.K_sbs) * (top.H - t), top.H - 1)
        if top.H > 1 else Fraction(0),
        grouped_sidelink_load(clipped, top.H, t),
    )
    return MemoryLoadPoint(M=params.M, R_mbs=Fraction(top.K_mbs), R_sbs=extra)


# ---------------------------------------------------------------------------
# Per-demand evaluation


def step1_files(topology: Topology, d: DemandVector) -> tuple[int, ...]:
    """The K_mbs whole files the MBS broadcasts first: every file demanded at
    the MBS, then the smallest SBS-demanded files, padded (when even those run
    out) with the smallest unused library files so the broadcast size is
    always exactly K_mbs."""
    chosen = sorted(d.mbs_files())
    for f in sorted(d.sbs_files()):
        if len(chosen) >= topology.K_mbs:
            break
        chosen.append(f)
    filler = 1
    while len(chosen) < topology.K_mbs:
        while filler in set(chosen):
            filler += 1
        chosen.append(filler)
    return tuple(sorted(chosen))


def residual_profile(topology: Topology, groups, d: DemandVector):
    """Files still owed after step 1 and, per group, its distinct residual
    demands (duplicates within a group collapse since the group shares one
    cache).

    Returns (residual_files, per_group_files) where per_group_files[g] is the
    sorted tuple of residual files demanded inside group g.
    """
    sent = set(step1_files(topology, d))
    residual = d.sbs_files() - sent
    per_group = []
    for members in groups:
        wanted = set()
        for h in members:
            for k in topology.users_of_sbs(h):
                f = d.of_user(k)
                if f in residual:
                    wanted.add(f)
        per_group.append(tuple(sorted(wanted)))
    return frozenset(residual), tuple(per_group)


def per_demand_loads(topology: Topology, t: int, d: DemandVector, class_: str,
                     approach: int, groups=None,
                     direct_extension: bool = False) -> tuple[Fraction, Fraction]:
    """Exact (R_mbs(d), R_sbs(d)) for one demand vector under the chosen
    delivery class/approach; `groups` defaults to the singleton grouping."""
    _require_coded_regime(topology)
    if groups is None:
        groups = singleton_groups(topology.H)
    G = len(groups)
    if not 0 <= t <= G:
        raise ValueError(f"t must be in [0, {G}]")
    if class_ == SIDELINK and t == 0:
        raise ValueError("sidelink delivery requires t >= 1")
    residual, per_group = residual_profile(topology, groups, d)
    k0 = Fraction(topology.K_mbs)
    if not residual:
        return k0, Fraction(0)
    counts = [len(fs) for fs in per_group]
    if class_ == SHARED:
        if approach == 1:
            return k0 + Fraction(len(residual) * (G - t), G), Fraction(0)
        if approach == 2:
            return k0 + multicast_shared_load(counts, G, t), Fraction(0)
    elif class_ == SIDELINK:
        if approach == 1:
            return k0, Fraction(len(residual)) * G * binom(G - 2, t - 1) / (t * binom(G, t))
        if approach == 2:
            load = (direct_sidelink_load(counts, G, t) if direct_extension
                    else grouped_sidelink_load(counts, G, t))
            return k0, load
    raise ValueError(f"unknown delivery class/approach ({class_!r}, {approach})")


def sym_per_demand_loads(params: SymSchemeParams, d: DemandVector, class_: str,
                         approach: int, direct_extension: bool = False):
    return per_demand_loads(params.topology, params.t, d, class_, approach,
                            direct_extension=direct_extension)


def worst_case_loads(topology: Topology, t: int, class_: str, approach: int,
                     groups=None, direct_extension: bool = False) -> tuple[Fraction, Fraction]:
    """Closed-form worst case of the chosen variant (maximum over demands)."""
    _require_coded_regime(topology)
    if groups is None:
        groups = singleton_groups(topology.H)
    G = len(groups)
    clip = max(topology.N - topology.K_mbs, 0)
    q = sorted((min(topology.L_subset(g), clip) for g in groups), reverse=True)
    k0 = Fraction(topology.K_mbs)
    if class_ == SHARED:
        if approach == 1:
            return k0 + Fraction(min(clip, topology.K_sbs) * (G - t), G), Fraction(0)
        return k0 + multicast_shared_load(q, G, t), Fraction(0)
    if approach == 1:
        return k0, Fraction(min(clip, topology.K_sbs)) * G * binom(G - 2, t - 1) / (t * binom(G, t))
    load = (direct_sidelink_load(q, G, t) if direct_extension
            else grouped_sidelink_load(q, G, t))
    return k0, load


# ---------------------------------------------------------------------------
# Corner-point families for envelopes and hull membership tests


@lru_cache(maxsize=None)
def sym_corner_points(topology: Topology) -> tuple[MemoryLoadPoint, ...]:
    """Every symmetric-scheme corner point: the shared family for t in [0..H]
    and the sidelink family for t in [1..H]."""
    pts = [sym_shared_point(SymSchemeParams(topology, t)) for t in range(topology.H + 1)]
    pts += [sym_sidelink_point(SymSchemeParams(topology, t)) for t in range(1, topology.H + 1)]
    return tuple(pts)


def sym_shared_envelope(topology: Topology) -> list[tuple[Fraction, Fraction]]:
    from .core import lower_convex_envelope
    pts = [sym_shared_point(SymSchemeParams(topology, t)) for t in range(topology.H + 1)]
    return lower_convex_envelope([(p.M, p.R_mbs) for p in pts])


def sym_sidelink_envelope(topology: Topology) -> list[tuple[Fraction, Fraction]]:
    from .core import lower_convex_envelope
    pts = [sym_sidelink_point(SymSchemeParams(topology, t)) for t in range(1, topology.H + 1)]
    return lower_convex_envelope([(p.M, p.R_sbs) for p in pts])
