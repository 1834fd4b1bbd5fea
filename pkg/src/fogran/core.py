"""Shared domain types: network topology, demand vectors, exact-rational
memory-load points, and the lower-convex-envelope utility.

All loads are exact rationals; floats appear only at CSV export time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

# All analytic quantities are exact rationals.
Rational = Fraction


def binom(n: int, k: int) -> int:
    """Binomial coefficient with the extended convention binom(n, k) = 0
    whenever n < 0, k < 0 or n < k."""
    if n < 0 or k < 0 or n < k:
        return 0
    return math.comb(n, k)


def as_rational(value) -> Fraction:
    """Parse ints, 'p/q' strings, or Fractions into an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass 'p/q' or int")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def rational_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def rational_decimal(x: Fraction, digits: int = 12) -> str:
    """Decimal rendering with `digits` significant digits (CSV export only)."""
    if x == 0:
        return "0"
    return f"{float(x):.{digits}g}"


def pos_part(x: Fraction) -> Fraction:
    """[x]^+ = max(x, 0)."""
    return x if x > 0 else Fraction(0)


@dataclass(frozen=True)
class Topology:
    """A network with one macro base station (MBS), `H` cache-equipped small
    base stations (SBS), `K_mbs` cache-less users on the MBS downlink, and
    `L[h]` users attached to SBS h+1.

    `L` must be non-increasing; use `Topology.from_occupancies` to normalize
    unsorted input (the original-index permutation is retained for reporting).
    """

    H: int
    K_mbs: int
    L: tuple[int, ...]
    N: int
    original_order: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.H < 1:
            raise ValueError("need at least one SBS")
        if len(self.L) != self.H:
            raise ValueError(f"expected {self.H} occupancy counts, got {len(self.L)}")
        if any(l <= 0 for l in self.L):
            raise ValueError("occupancy counts must be positive")
        if any(self.L[i] < self.L[i + 1] for i in range(self.H - 1)):
            raise ValueError("occupancy counts must be sorted non-increasing")
        if self.K_mbs < 0:
            raise ValueError("K_mbs must be non-negative")
        if self.N < 1:
            raise ValueError("library must contain at least one file")

    @classmethod
    def from_occupancies(cls, H: int, K_mbs: int, L: Sequence[int], N: int) -> "Topology":
        """Build a topology from possibly-unsorted occupancies, remembering
        where each SBS came from."""
        order = sorted(range(len(L)), key=lambda i: (-L[i], i))
        return cls(H=H, K_mbs=K_mbs, L=tuple(L[i] for i in order), N=N,
                   original_order=tuple(i + 1 for i in order))

    @classmethod
    def from_json_dict(cls, data: dict) -> "Topology":
        return cls.from_occupancies(H=int(data["H"]), K_mbs=int(data["K_mbs"]),
                                    L=[int(x) for x in data["L"]], N=int(data["N"]))

    def to_json_dict(self) -> dict:
        return {"H": self.H, "K_mbs": self.K_mbs, "L": list(self.L), "N": self.N}

    @property
    def K_sbs(self) -> int:
        return sum(self.L)

    @property
    def K(self) -> int:
        return self.K_mbs + self.K_sbs

    def L_prefix(self, s: int) -> int:
        """Total occupancy of the s most loaded SBSs."""
        if not 1 <= s <= self.H:
            raise ValueError(f"s must be in [1, {self.H}]")
        return sum(self.L[:s])

    def L_subset(self, sbs_set: Iterable[int]) -> int:
        """Total occupancy of the SBSs in `sbs_set` (1-based indices)."""
        return sum(self.L[h - 1] for h in sbs_set)

    def clipped_occupancy(self, h: int) -> int:
        """min{L_h, N - K_mbs}, the per-SBS occupancy relevant to delivery."""
        return min(self.L[h - 1], max(self.N - self.K_mbs, 0))

    def users_of_sbs(self, h: int) -> range:
        """Global user ids served by SBS h (MBS users come first)."""
        start = self.K_mbs + sum(self.L[: h - 1])
        return range(start + 1, start + self.L[h - 1] + 1)

    def sbs_of_user(self, k: int) -> int:
        """SBS serving user k; 0 for MBS-direct users."""
        if not 1 <= k <= self.K:
            raise ValueError(f"user {k} out of range")
        if k <= self.K_mbs:
            return 0
        rem = k - self.K_mbs
        for h, l in enumerate(self.L, start=1):
            if rem <= l:
                return h
            rem -= l
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class DemandVector:
    """One file request per user; the first K_mbs entries belong to the
    MBS-direct users, then SBS 1's users, SBS 2's, and so on."""

    topology: Topology
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.topology.K:
            raise ValueError(f"expected {self.topology.K} demands, got {len(self.entries)}")
        if any(not 1 <= d <= self.topology.N for d in self.entries):
            raise ValueError("every demand must be a file index in [1, N]")

    def of_user(self, k: int) -> int:
        return self.entries[k - 1]

    def mbs_files(self) -> frozenset[int]:
        """Distinct files demanded by MBS-direct users."""
        return frozenset(self.entries[: self.topology.K_mbs])

    def sbs_files(self) -> frozenset[int]:
        """Distinct SBS-demanded files not already demanded at the MBS."""
        return frozenset(self.entries[self.topology.K_mbs:]) - self.mbs_files()


@dataclass(frozen=True)
class MemoryLoadPoint:
    """An achievable (or bounding) triple: cache size M, downlink load R_mbs,
    and aggregate sidelink load R_sbs, all in file units."""

    M: Fraction
    R_mbs: Fraction
    R_sbs: Fraction

    def __post_init__(self):
        for name in ("M", "R_mbs", "R_sbs"):
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, as_rational(v))
        if self.M < 0 or self.R_mbs < 0 or self.R_sbs < 0:
            raise ValueError("memory and loads must be non-negative")

    def to_json_dict(self) -> dict:
        return {"M": rational_str(self.M), "R_mbs": rational_str(self.R_mbs),
                "R_sbs": rational_str(self.R_sbs)}


def lower_convex_envelope(points: Sequence[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Vertices of the lower convex hull of (M, R) pairs, sorted by M.

    Interior collinear points are dropped so the output is canonical; among
    points sharing an M only the lowest R survives.
    """
    if not points:
        raise ValueError("no points")
    best: dict[Fraction, Fraction] = {}
    for m, r in points:
        if m not in best or r < best[m]:
            best[m] = r
    pts = sorted(best.items())
    hull: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        # keep strictly convex turns only: slope(prev->p) must exceed slope(prev2->prev)
        while len(hull) >= 2:
            (m0, r0), (m1, r1) = hull[-2], hull[-1]
            if (r1 - r0) * (p[0] - m0) >= (p[1] - r0) * (m1 - m0):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def envelope_value(hull: Sequence[tuple[Fraction, Fraction]], m: Fraction) -> Fraction:
    """Evaluate the piecewise-linear lower envelope at memory m.

    Beyond the right end the envelope stays at the last value (a scheme may
    always waste memory); left of the first point the value is undefined.
    """
    if not hull:
        raise ValueError("empty envelope")
    if m < hull[0][0]:
        raise ValueError(f"memory {m} below envelope domain start {hull[0][0]}")
    if m >= hull[-1][0]:
        return hull[-1][1]
    for (m0, r0), (m1, r1) in zip(hull, hull[1:]):
        if m0 <= m <= m1:
            return r0 + (r1 - r0) * (m - m0) / (m1 - m0)
    raise AssertionError("unreachable")
