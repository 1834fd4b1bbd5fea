"""Schemes designed against a distribution over topologies rather than a
realization: expected-load evaluation of the shared-link and sidelink
families with the inter-file coding parameter n, the variance-minimizing
partition heuristic, and a Monte Carlo overload-probability check.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .core import MemoryLoadPoint, Topology, binom, pos_part
from .scheme_asym import Partition, partition_cap, _set_partitions

EXHAUSTIVE_TAIL = Fraction(1, 10 ** 12)


@dataclass(frozen=True)
class Dist:
    """Distribution of one occupancy count: Poisson(lam), a fixed value, or
    an explicit finite histogram with exact-rational probabilities."""

    kind: str
    lam: Fraction | None = None
    value: int | None = None
    pmf: tuple[tuple[int, Fraction], ...] | None = None

    @classmethod
    def poisson(cls, lam) -> "Dist":
        lam = Fraction(lam)
        if lam < 0:
            raise ValueError("Poisson rate must be non-negative")
        return cls(kind="poisson", lam=lam)

    @classmethod
    def fixed(cls, value: int) -> "Dist":
        return cls(kind="fixed", value=int(value))

    @classmethod
    def empirical(cls, pmf: dict) -> "Dist":
        items = tuple(sorted((int(k), Fraction(v)) for k, v in pmf.items()))
        if sum(p for _, p in items) != 1:
            raise ValueError("empirical probabilities must sum to exactly 1")
        if any(p < 0 for _, p in items):
            raise ValueError("probabilities must be non-negative")
        return cls(kind="empirical", pmf=items)

    @classmethod
    def from_json(cls, data) -> "Dist":
        if "poisson" in data:
            return cls.poisson(data["poisson"])
        if "fixed" in data:
            return cls.fixed(data["fixed"])
        if "empirical" in data:
            return cls.empirical(data["empirical"])
        raise ValueError(f"unknown distribution spec {data!r}")

    def mean(self) -> Fraction:
        if self.kind == "poisson":
            return self.lam
        if self.kind == "fixed":
            return Fraction(self.value)
        return sum((Fraction(v) * p for v, p in self.pmf), Fraction(0))

    def variance(self) -> Fraction:
        if self.kind == "poisson":
            return self.lam
        if self.kind == "fixed":
            return Fraction(0)
        mu = self.mean()
        return sum((p * (v - mu) ** 2 for v, p in self.pmf), Fraction(0))

    def support(self) -> list[tuple[int, Fraction]]:
        """Finite support with exact weights; Poisson support is cut at the
        1 - 1e-12 quantile and renormalized (weights lam^k / k! are exact)."""
        if self.kind == "fixed":
            return [(self.value, Fraction(1))]
        if self.kind == "empirical":
            return [(v, p) for v, p in self.pmf if p > 0]
        lam = float(self.lam)
        if self.lam == 0:
            return [(0, Fraction(1))]
        # smallest m with P(X > m) < 1e-12, via the float pmf recurrence
        m, pmf, cdf = 0, math.exp(-lam), math.exp(-lam)
        while 1 - cdf >= 1e-12 and m < 10 ** 6:
            m += 1
            pmf *= lam / m
            cdf += pmf
        weights = []
        w = Fraction(1)
        for k in range(m + 1):
            if k:
                w = w * self.lam / k
            weights.append(w)
        total = sum(weights)
        return [(k, w / total) for k, w in enumerate(weights)]

    def truncated_mass(self) -> float:
        """Probability mass cut off by `support` (0 for finite kinds)."""
        if self.kind != "poisson":
            return 0.0
        top = self.support()[-1][0]
        lam = float(self.lam)
        pmf = math.exp(-lam)
        cdf = pmf
        for k in range(1, top + 1):
            pmf *= lam / k
            cdf += pmf
        return max(0.0, 1.0 - cdf)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "poisson":
            return rng.poisson(float(self.lam), size=n)
        if self.kind == "fixed":
            return np.full(n, self.value, dtype=np.int64)
        vals = np.array([v for v, _ in self.pmf], dtype=np.int64)
        probs = np.array([float(p) for _, p in self.pmf])
        probs = probs / probs.sum()
        return rng.choice(vals, size=n, p=probs)


@dataclass(frozen=True)
class TopologyDistribution:
    """Independent per-SBS occupancy distributions plus the distribution of
    the count of MBS-direct users, over a library of N files."""

    K_mbs: Dist
    L: tuple[Dist, ...]
    N: int

    @classmethod
    def from_json_dict(cls, data: dict) -> "TopologyDistribution":
        return cls(K_mbs=Dist.from_json(data["K_mbs"]),
                   L=tuple(Dist.from_json(x) for x in data["L"]),
                   N=int(data["N"]))

    @classmethod
    def point_mass(cls, topology: Topology) -> "TopologyDistribution":
        return cls(K_mbs=Dist.fixed(topology.K_mbs),
                   L=tuple(Dist.fixed(l) for l in topology.L), N=topology.N)

    @property
    def H(self) -> int:
        return len(self.L)


@dataclass(frozen=True)
class Exhaustive:
    cap: int = 200_000


@dataclass(frozen=True)
class MonteCarlo:
    samples: int
    seed: int


def _realizations(dist: TopologyDistribution, cap: int):
    """Weighted iterator over (k0, l_1..l_H); errors out when the joint
    support exceeds the cap."""
    supports = [dist.K_mbs.support()] + [l.support() for l in dist.L]
    size = 1
    for s in supports:
        size *= len(s)
        if size > cap:
            raise ValueError(f"joint support exceeds cap ({cap}); use Monte Carlo")
    for combo in product(*supports):
        weight = Fraction(1)
        for _, p in combo:
            weight *= p
        yield combo[0][0], tuple(v for v, _ in combo[1:]), weight


def _sampled(dist: TopologyDistribution, mc: MonteCarlo):
    """Deduplicated Monte Carlo realizations with integer multiplicities."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(mc.seed)))
    k0 = dist.K_mbs.sample(rng, mc.samples)
    ls = np.stack([l.sample(rng, mc.samples) for l in dist.L], axis=1)
    counter = Counter((int(a), tuple(int(x) for x in row)) for a, row in zip(k0, ls))
    for (a, row), mult in sorted(counter.items()):
        yield a, row, Fraction(mult, mc.samples)


def _expect(dist: TopologyDistribution, eval_mode, fn, overflow: str = "clip") -> Fraction:
    """Expectation of fn(k0, l_1..l_H).  Realizations with more users than
    files are evaluated with clipped formulas by default; overflow='truncate'
    drops them and renormalizes the remaining mass instead."""
    if overflow not in ("clip", "truncate"):
        raise ValueError("overflow must be 'clip' or 'truncate'")
    if isinstance(eval_mode, MonteCarlo):
        gen = _sampled(dist, eval_mode)
    elif isinstance(eval_mode, Exhaustive):
        gen = _realizations(dist, eval_mode.cap)
    else:
        raise TypeError("eval_mode must be Exhaustive or MonteCarlo")
    total, mass = Fraction(0), Fraction(0)
    for k0, ls, weight in gen:
        if overflow == "truncate" and k0 + sum(ls) > dist.N:
            continue
        total += weight * fn(k0, ls)
        mass += weight
    if mass == 0:
        raise ValueError("no realizations kept")
    return total / mass


def overflow_mass(dist: TopologyDistribution, eval_mode) -> Fraction:
    """Probability mass of realizations with sum L + K_mbs > N (the mass that
    overflow='truncate' drops and renormalizes away)."""
    if isinstance(eval_mode, MonteCarlo):
        gen = _sampled(dist, eval_mode)
    else:
        gen = _realizations(dist, eval_mode.cap)
    total, over = Fraction(0), Fraction(0)
    for k0, ls, weight in gen:
        total += weight
        if k0 + sum(ls) > dist.N:
            over += weight
    return over / total


def _group_sums(partition: Partition, ls: tuple[int, ...]) -> list[int]:
    return [sum(ls[h - 1] for h in group) for group in partition.groups]


def _resolve_partition(dist: TopologyDistribution, G: int, partition) -> Partition:
    if partition is None:
        return variance_partition(dist, G)
    if isinstance(partition, str):
        blocks = [[int(x) for x in part.split(",")] for part in partition.split("|")]
        return Partition.from_blocks(dist.H, blocks, [l.mean() for l in dist.L])
    return partition


def agnostic_shared_point(dist: TopologyDistribution, G: int, t: int, n: int,
                          partition=None, eval_mode=Exhaustive(),
                          overflow: str = "clip") -> MemoryLoadPoint:
    """Expected worst-case downlink load of the shared-link scheme placed for
    the distribution with coding parameter n in [0, N-1]; no sidelink use.

    Per realization the value is
      max{k0, n} + (sum L - [n-k0]^+) / (binom(G,t) sum L) * sum_r q'_r binom(G-r, t),
    with the second term zero when no SBS user shows up and clamped at zero
    if the coded prefix already covers every residual file.
    """
    if not 0 <= n <= dist.N - 1:
        raise ValueError(f"n must be in [0, {dist.N - 1}]")
    if not 1 <= G <= dist.H:
        raise ValueError(f"G must be in [1, {dist.H}]")
    if not 0 <= t <= G:
        raise ValueError(f"t must be in [0, {G}]")
    part = _resolve_partition(dist, G, partition)

    def value(k0: int, ls: tuple[int, ...]) -> Fraction:
        step1 = Fraction(max(k0, n))
        total = sum(ls)
        if total == 0:
            return step1
        clip = max(dist.N - k0, 0)
        q = sorted((min(s, clip) for s in _group_sums(part, ls)), reverse=True)
        man = sum(q[r - 1] * binom(G - r, t) for r in range(1, G - t + 1)) if G > t else 0
        residual_frac = Fraction(pos_part(Fraction(total - max(n - k0, 0))), total)
        return step1 + residual_frac * Fraction(man, binom(G, t))

    r_mbs = _expect(dist, eval_mode, value, overflow=overflow)
    return MemoryLoadPoint(M=Fraction(t * (dist.N - n), G), R_mbs=r_mbs, R_sbs=Fraction(0))


def agnostic_sidelink_point(dist: TopologyDistribution, G: int, t: int, n: int,
                            partition=None, eval_mode=Exhaustive(),
                            unprimed_tail: bool = False,
                            overflow: str = "clip") -> MemoryLoadPoint:
    """Expected loads of the sidelink scheme: the downlink carries only the
    MBS users' files; when a realization has fewer MBS users than n the SBSs
    first exchange [n-k0]^+ G/(G-1) of coded refill, then run the better of
    the RLC relay and the grouped multicast delivery.

    The published middle order statistic of the grouping term appears once
    unclipped; `unprimed_tail` reproduces that variant, the default keeps
    every term clipped (consistent with the topology-aware formula).
    """
    if G < 2:
        raise ValueError("sidelink schemes need G >= 2")
    if not 1 <= t <= G:
        raise ValueError(f"t must be in [1, {G}]")
    if not 0 <= n <= dist.N - 1:
        raise ValueError(f"n must be in [0, {dist.N - 1}]")
    if Fraction(dist.N - n, dist.N) * t < 1:
        raise ValueError("library not fully stored across SBSs: need (N-n) t / N >= 1")
    part = _resolve_partition(dist, G, partition)

    def value(k0: int, ls: tuple[int, ...]) -> Fraction:
        refill = Fraction(G, G - 1) * pos_part(Fraction(n - k0))
        total = sum(ls)
        if total == 0:
            return refill
        clip = max(dist.N - k0, 0)
        sums = _group_sums(part, ls)
        relay = Fraction(min(clip, total) * (G - t), G - 1)
        grouped = Fraction(0)
        from itertools import combinations
        for S in combinations(range(G), t + 1):
            w = sorted((sums[g] for g in S), reverse=True)
            wc = [min(x, clip) for x in w]
            tail = (w[t - 1] if unprimed_tail else wc[t - 1])
            grouped += wc[0] + Fraction(pos_part(Fraction(wc[t] - wc[0] + tail)), t)
        grouped /= binom(G, t)
        return refill + min(relay, grouped)

    r_sbs = _expect(dist, eval_mode, value, overflow=overflow)
    r_mbs = _expect(dist, eval_mode, lambda k0, ls: Fraction(k0), overflow=overflow)
    return MemoryLoadPoint(M=Fraction(t * (dist.N - n), G), R_mbs=r_mbs, R_sbs=r_sbs)


def variance_partition(dist: TopologyDistribution, G: int) -> Partition:
    """The G-way grouping minimizing E[sum_i (sum_{j in G_i} L_j - mean)^2]
    with mean = E[sum L]/G; exhaustive up to the partition cap, greedy with
    swap refinement beyond.  With independent occupancies the objective is
    sum_i Var_i + (E_i - mean)^2 and the Var part is partition-invariant."""
    H = dist.H
    if not 1 <= G <= H:
        raise ValueError(f"G must be in [1, {H}]")
    means = [l.mean() for l in dist.L]
    target = sum(means) / G

    def objective(groups) -> Fraction:
        return sum(((sum(means[h - 1] for h in g) - target) ** 2 for g in groups), Fraction(0))

    if H <= partition_cap():
        best = None
        for blocks in _set_partitions(H, G):
            key = (objective(blocks), tuple(tuple(b) for b in blocks))
            if best is None or key < best:
                best = key
        return Partition.from_blocks(H, best[1], means)
    # greedy balancing on expected occupancy + swap refinement
    order = sorted(range(H), key=lambda i: -means[i])
    groups: list[list[int]] = [[] for _ in range(G)]
    sums = [Fraction(0)] * G
    for idx, i in enumerate(order):
        j = idx if idx < G else min(range(G), key=lambda x: (sums[x], x))
        groups[j].append(i + 1)
        sums[j] += means[i]
    improved = True
    while improved:
        improved = False
        cur = objective(groups)
        for a in range(G):
            for b in range(G):
                if a == b or len(groups[a]) <= 1:
                    continue
                for h in list(groups[a]):
                    groups[a].remove(h)
                    groups[b].append(h)
                    if objective(groups) < cur:
                        cur = objective(groups)
                        improved = True
                    else:
                        groups[b].remove(h)
                        groups[a].append(h)
    return Partition.from_blocks(H, groups, means)


def sanity_tail_probability(dist: TopologyDistribution, N: int, samples: int,
                            seed: int) -> Fraction:
    """Monte Carlo estimate of Pr{sum L + K_mbs > N}."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    total = dist.K_mbs.sample(rng, samples).astype(np.int64)
    for l in dist.L:
        total += l.sample(rng, samples)
    return Fraction(int((total > N).sum()), samples)
