"""Partitioned (asymmetric-subpacketization) schemes: SBSs grouped into G
classes sharing identical cache contents, corner points minimized over all
G-way partitions, subpacketization accounting, and the exact-optimality check
in the large-memory regime.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .core import MemoryLoadPoint, Topology, binom, lower_convex_envelope
from . import scheme_sym

DEFAULT_PARTITION_CAP = 14


def partition_cap() -> int:
    return int(os.environ.get("FOGRAN_PARTITION_CAP", DEFAULT_PARTITION_CAP))


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty groups of SBS indices covering [1..H], ordered so the
    per-group total occupancies are non-increasing."""

    groups: tuple[tuple[int, ...], ...]
    occupancies: tuple[int, ...]

    @classmethod
    def from_blocks(cls, n_sbs: int, blocks: Iterable[Iterable[int]], weights) -> "Partition":
        """Normalize raw blocks against per-SBS weights (actual occupancies
        for topology-aware partitions, expected ones for agnostic use)."""
        norm = [tuple(sorted(g)) for g in blocks]
        if any(not g for g in norm):
            raise ValueError("groups must be nonempty")
        members = sorted(h for g in norm for h in g)
        if members != list(range(1, n_sbs + 1)):
            raise ValueError("groups must partition the SBS index set exactly")
        occ = [sum(weights[h - 1] for h in g) for g in norm]
        order = sorted(range(len(norm)), key=lambda i: (-occ[i], norm[i]))
        return cls(groups=tuple(norm[i] for i in order),
                   occupancies=tuple(occ[i] for i in order))

    @classmethod
    def from_groups(cls, topology: Topology, groups: Iterable[Iterable[int]]) -> "Partition":
        return cls.from_blocks(topology.H, groups, topology.L)

    @classmethod
    def singletons(cls, topology: Topology) -> "Partition":
        return cls.from_groups(topology, [(h,) for h in range(1, topology.H + 1)])

    @classmethod
    def parse(cls, topology: Topology, literal: str) -> "Partition":
        """Parse the CLI literal syntax '1|2,3' (groups by '|', members by ',')."""
        groups = [[int(x) for x in part.split(",")] for part in literal.split("|")]
        return cls.from_groups(topology, groups)

    @property
    def G(self) -> int:
        return len(self.groups)

    def literal(self) -> str:
        return "|".join(",".join(str(h) for h in g) for g in self.groups)

    def sorted_occupancies(self, subset: Iterable[int], clip: int) -> list[int]:
        """q'_j over the given group-index subset (1-based), descending and
        clipped at `clip`."""
        vals = sorted((self.occupancies[g - 1] for g in subset), reverse=True)
        return [min(v, clip) for v in vals]


def _set_partitions(n: int, k: int) -> Iterator[list[list[int]]]:
    """All partitions of [1..n] into exactly k nonempty blocks, generated via
    restricted-growth strings."""
    if not 1 <= k <= n:
        return
    a = [0] * n

    def rec(i: int, used: int):
        if i == n:
            if used == k:
                blocks: list[list[int]] = [[] for _ in range(k)]
                for idx, b in enumerate(a):
                    blocks[b].append(idx + 1)
                yield blocks
            return
        # prune: remaining items cannot open enough new blocks
        if used + (n - i) < k:
            return
        for b in range(min(used + 1, k)):
            a[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(0, 0)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind, by the standard recurrence."""
    if k == 0:
        return 1 if n == 0 else 0
    if n == 0 or k > n:
        return 0
    row = [1] + [0] * k
    for _ in range(n):
        new = [0] * (k + 1)
        for j in range(1, k + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
        row[0] = 0
    return row[k]


def enumerate_partitions(topology: Topology, G: int, heuristic: bool = False) -> Iterator[Partition]:
    """Every G-way partition of the SBSs, normalized; count is the Stirling
    number S(H, G).  Above the exhaustive cap (FOGRAN_PARTITION_CAP, default
    14) a `heuristic` pool must be requested explicitly."""
    H = topology.H
    if not 1 <= G <= H:
        raise ValueError(f"G must be in [1, {H}]")
    if H > partition_cap():
        if not heuristic:
            raise ValueError(
                f"partition space too large for H={H} (cap {partition_cap()}); "
                "pass heuristic=True / --heuristic for a non-exhaustive pool")
        yield from _heuristic_pool(topology, G)
        return
    for blocks in _set_partitions(H, G):
        yield Partition.from_groups(topology, blocks)


def _heuristic_pool(topology: Topology, G: int) -> Iterator[Partition]:
    """Non-exhaustive candidates: greedy occupancy balancing plus single-move
    and swap refinements. No optimality guarantee."""
    seen = set()

    def emit(groups):
        p = Partition.from_groups(topology, groups)
        if p.groups not in seen:
            seen.add(p.groups)
            yield p

    groups: list[list[int]] = [[] for _ in range(G)]
    sums = [0] * G
    for h in range(1, topology.H + 1):  # L sorted non-increasing already
        i = min(range(G), key=lambda j: (sums[j], j))
        groups[i].append(h)
        sums[i] += topology.L[h - 1]
    yield from emit(groups)
    improved = True
    while improved:
        improved = False
        spread = max(sums) - min(sums)
        for i in range(G):
            for j in range(G):
                if i == j or len(groups[i]) <= 1:
                    continue
                for h in list(groups[i]):
                    li = topology.L[h - 1]
                    ns_i, ns_j = sums[i] - li, sums[j] + li
                    trial = sums.copy()
                    trial[i], trial[j] = ns_i, ns_j
                    if max(trial) - min(trial) < spread:
                        groups[i].remove(h)
                        groups[j].append(h)
                        sums[i], sums[j] = ns_i, ns_j
                        spread = max(trial) - min(trial)
                        improved = True
                        yield from emit(groups)


def _candidate_partitions(topology: Topology, G, partition) -> Iterator[Partition]:
    if partition is not None:
        if isinstance(partition, str):
            partition = Partition.parse(topology, partition)
        if partition.G != (G or partition.G):
            raise ValueError(f"partition has {partition.G} groups, expected {G}")
        yield partition
    else:
        yield from enumerate_partitions(topology, G, heuristic=topology.H > partition_cap())


def _shared_extra(topology: Topology, part: Partition, G: int, t: int) -> Fraction:
    clip = max(topology.N - topology.K_mbs, 0)
    q = part.sorted_occupancies(range(1, G + 1), clip)
    return scheme_sym.multicast_shared_load(q, G, t)


def _sidelink_extra(topology: Topology, part: Partition, G: int, t: int) -> Fraction:
    clip = max(topology.N - topology.K_mbs, 0)
    q = [min(v, clip) for v in part.occupancies]
    return scheme_sym.grouped_sidelink_load(q, G, t)


def best_partition_shared(topology: Topology, G: int, t: int, partition=None):
    """Minimize the shared-link step-2 load over candidate partitions; ties go
    to the lexicographically smallest group encoding."""
    best = None
    for part in _candidate_partitions(topology, G, partition):
        load = _shared_extra(topology, part, G, t)
        key = (load, part.groups)
        if best is None or key < best:
            best = key
    load, groups = best[0], best[1]
    return Partition.from_groups(topology, groups), load


def best_partition_sidelink(topology: Topology, G: int, t: int, partition=None):
    best = None
    for part in _candidate_partitions(topology, G, partition):
        load = _sidelink_extra(topology, part, G, t)
        key = (load, part.groups)
        if best is None or key < best:
            best = key
    load, groups = best[0], best[1]
    return Partition.from_groups(topology, groups), load


def asym_shared_point(topology: Topology, G: int, t: int, partition=None) -> MemoryLoadPoint:
    """Partitioned corner point with R_sbs = 0 at M = t(N - K_mbs)/G; the
    step-2 multicast load is minimized over partitions unless one is given."""
    if topology.N < topology.K_mbs:
        raise ValueError("partitioned schemes require N >= K_mbs")
    if not 1 <= t <= G:
        raise ValueError(f"t must be in [1, {G}]")
    _, extra = best_partition_shared(topology, G, t, partition)
    M = Fraction(t * (topology.N - topology.K_mbs), G)
    return MemoryLoadPoint(M=M, R_mbs=topology.K_mbs + extra, R_sbs=Fraction(0))


def asym_sidelink_point(topology: Topology, G: int, t: int, partition=None) -> MemoryLoadPoint:
    """Partitioned corner point with R_mbs = K_mbs; step 2 runs the grouped
    multicast delivery on the sidelink."""
    if topology.N < topology.K_mbs:
        raise ValueError("partitioned schemes require N >= K_mbs")
    if not 1 <= t <= G:
        raise ValueError(f"t must be in [1, {G}] (sidelink needs t >= 1)")
    _, extra = best_partition_sidelink(topology, G, t, partition)
    M = Fraction(t * (topology.N - topology.K_mbs), G)
    return MemoryLoadPoint(M=M, R_mbs=Fraction(topology.K_mbs), R_sbs=extra)


def sidelink_rlc_point(topology: Topology) -> MemoryLoadPoint:
    """The standalone sidelink point at M = (N - K_mbs)/H where each SBS
    relays sub-piece RLCs of every residual file (t = 1, no grouping)."""
    clip = max(topology.N - topology.K_mbs, 0)
    return MemoryLoadPoint(M=Fraction(topology.N - topology.K_mbs, topology.H),
                           R_mbs=Fraction(topology.K_mbs),
                           R_sbs=Fraction(min(clip, topology.K_sbs)))


def sidelink_rlc_load(topology: Topology, G: int, t: int) -> Fraction:
    """Worst-case sidelink load of the G-group RLC relay delivery at slot t:
    min{N - K_mbs, K_sbs} (G - t)/(G - 1)."""
    if G < 2:
        raise ValueError("RLC relay delivery needs at least two groups")
    clip = max(topology.N - topology.K_mbs, 0)
    return Fraction(min(clip, topology.K_sbs) * (G - t), G - 1)


def subpacketization_level(family: str, n_groups: int, t: int) -> int:
    """Number of subfiles each file splits into: binom(H, t) symmetric,
    binom(G, t) with a G-way partition."""
    if family not in ("sym", "asym"):
        raise ValueError(f"unknown family {family!r}")
    return binom(n_groups, t)


# ---------------------------------------------------------------------------
# Corner families / envelopes


def asym_corner_points(topology: Topology, G: int) -> list[MemoryLoadPoint]:
    """All corner points the G-way partitioned scheme contributes, including
    the no-cache anchor (t = 0 degenerates to broadcasting every distinct
    residual file) and the standalone RLC-relay sidelink point."""
    clip = max(topology.N - topology.K_mbs, 0)
    pts = [MemoryLoadPoint(M=Fraction(0),
                           R_mbs=topology.K_mbs + Fraction(min(clip, topology.K_sbs)),
                           R_sbs=Fraction(0))]
    pts += [asym_shared_point(topology, G, t) for t in range(1, G + 1)]
    pts += [asym_sidelink_point(topology, G, t) for t in range(1, G + 1)]
    pts.append(sidelink_rlc_point(topology))
    return pts


def asym_shared_envelope(topology: Topology, G: int):
    pts = [(Fraction(0), topology.K_mbs
            + Fraction(min(max(topology.N - topology.K_mbs, 0), topology.K_sbs)))]
    pts += [(p.M, p.R_mbs) for p in (asym_shared_point(topology, G, t) for t in range(1, G + 1))]
    return lower_convex_envelope(pts)


def asym_sidelink_envelope(topology: Topology, G: int):
    pts = [(p.M, p.R_sbs) for p in (asym_sidelink_point(topology, G, t) for t in range(1, G + 1))]
    rlc = sidelink_rlc_point(topology)
    pts.append((rlc.M, rlc.R_sbs))
    return lower_convex_envelope(pts)


def best_shared_envelope(topology: Topology):
    """Envelope of the shared family over every group count G."""
    pts = []
    for G in range(1, topology.H + 1):
        pts.extend(asym_shared_envelope(topology, G))
    return lower_convex_envelope(pts)


def best_sidelink_envelope(topology: Topology):
    pts = []
    for G in range(1, topology.H + 1):
        pts.extend(asym_sidelink_envelope(topology, G))
    return lower_convex_envelope(pts)


@dataclass(frozen=True)
class OptimalityVerdict:
    applicable: bool
    equal: bool
    reason: str = ""
    witness_M: Fraction | None = None


def has_isolating_partition(topology: Topology, G: int) -> bool:
    """True when some G-way partition keeps the most loaded SBS alone in the
    top group, i.e. [2..H] splits into G-1 groups each of occupancy <= L_1."""
    if G == topology.H:
        return True
    if not 1 <= G <= topology.H:
        return False
    if G == 1:
        return topology.H == 1
    rest = list(topology.L[1:])
    bins = [0] * (G - 1)

    def fits(i: int) -> bool:
        if i == len(rest):
            return all(b > 0 for b in bins)
        tried = set()
        for j in range(G - 1):
            if bins[j] in tried:
                continue
            tried.add(bins[j])
            if bins[j] + rest[i] <= topology.L[0]:
                bins[j] += rest[i]
                if fits(i + 1):
                    bins[j] -= rest[i]
                    return True
                bins[j] -= rest[i]
        return False

    return len(rest) >= G - 1 and fits(0)


def check_large_memory_optimality(topology: Topology, G: int, grid_step=Fraction(1, 4),
                                  class_: str = scheme_sym.SHARED) -> OptimalityVerdict:
    """Verify that in the regime M >= (1 - 1/G)(N - K_mbs) the partitioned
    scheme meets the outer bound exactly: the shared family must hit
    K_mbs + L_1 (1 - M/(N-K_mbs)) with R_sbs = 0, the sidelink family must
    hit the outer bound's minimal R_sbs at R_mbs = K_mbs.

    Applicable when N >= K_mbs + L_1 and the most loaded SBS can sit alone in
    the top group of some G-way partition.
    """
    from .converse import converse_system, min_rsbs

    top = topology
    if top.N < top.K_mbs + top.L[0]:
        raise ValueError("check inapplicable: requires N >= K_mbs + L_1")
    if not has_isolating_partition(top, G):
        raise ValueError("check inapplicable: no G-way partition isolates the top SBS")
    residual = top.N - top.K_mbs
    m_lo = (1 - Fraction(1, G)) * residual
    env = (asym_shared_envelope(top, G) if class_ == scheme_sym.SHARED
           else asym_sidelink_envelope(top, G))
    from .core import envelope_value
    m = m_lo
    while m <= residual:
        if class_ == scheme_sym.SHARED:
            target = top.K_mbs + top.L[0] * (1 - m / residual)
            got = envelope_value(env, m)
        else:
            target = min_rsbs(converse_system(top, m), Fraction(top.K_mbs))
            got = envelope_value(env, m)
        if got != target:
            return OptimalityVerdict(applicable=True, equal=False,
                                     reason=f"achievable {got} vs bound {target}",
                                     witness_M=m)
        m += Fraction(grid_step)
    return OptimalityVerdict(applicable=True, equal=True)
