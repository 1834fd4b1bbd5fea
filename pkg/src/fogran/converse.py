"""Outer bound on the (R_mbs, R_sbs) region for a fixed cache size M,
expressed as a system of linear inequalities, plus corner-point extraction
and the weaker cut-set style bound for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Rational, Topology, pos_part, rational_str

# One inequality a*R_mbs + b*R_sbs >= c.
Inequality = tuple[Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class HalfspaceSystem:
    """All lower bounds that an achievable (R_mbs, R_sbs) pair must satisfy
    for the given topology and cache size."""

    topology: Topology
    M: Fraction
    inequalities: tuple[Inequality, ...]

    def satisfied_by(self, r_mbs: Fraction, r_sbs: Fraction) -> bool:
        return all(a * r_mbs + b * r_sbs >= c for a, b, c in self.inequalities)

    def to_json_dict(self) -> dict:
        return {
            "inequalities": [[rational_str(a), rational_str(b), rational_str(c)]
                             for a, b, c in self.inequalities],
        }


def converse_system(topology: Topology, M: Rational) -> HalfspaceSystem:
    """Build the outer-bound inequality system at cache size M.

    Emits, for t = topology:
      - R_mbs >= min{N, K_mbs} and R_sbs >= 0 always;
      - for N > K_mbs, per s in [H]:
          R_mbs + R_sbs >= K_mbs + min{L_[s], N-K_mbs} * [1 - s*M/(N-K_mbs)]^+;
      - for N >= K, per s in [H]:
          R_mbs + (1 - s/H) R_sbs >= K_mbs + (s/H) K_sbs [1 - s*M/(N-K_mbs)]^+;
      - for N > K_mbs:
          R_mbs >= K_mbs + min{K_sbs, N-K_mbs} * [1 - H*M/(N-K_mbs)]^+.

    Each bound family applies only inside its stated regime; nothing is
    extrapolated.
    """
    M = Fraction(M)
    if M < 0 or M > topology.N:
        raise ValueError(f"cache size must satisfy 0 <= M <= N, got {M}")
    t = topology
    one = Fraction(1)
    ineqs: list[Inequality] = [
        (one, Fraction(0), Fraction(min(t.N, t.K_mbs))),
        (Fraction(0), one, Fraction(0)),
    ]
    if t.N > t.K_mbs:
        residual = t.N - t.K_mbs
        for s in range(1, t.H + 1):
            gap = pos_part(1 - Fraction(s) * M / residual)
            rhs = t.K_mbs + min(t.L_prefix(s), residual) * gap
            ineqs.append((one, one, rhs))
        gap_h = pos_part(1 - Fraction(t.H) * M / residual)
        ineqs.append((one, Fraction(0), t.K_mbs + min(t.K_sbs, residual) * gap_h))
        if t.N >= t.K:
            for s in range(1, t.H + 1):
                gap = pos_part(1 - Fraction(s) * M / residual)
                rhs = t.K_mbs + Fraction(s, t.H) * t.K_sbs * gap
                ineqs.append((one, 1 - Fraction(s, t.H), rhs))
    return HalfspaceSystem(topology=t, M=M, inequalities=tuple(ineqs))


def _line_intersection(p: Inequality, q: Inequality) -> tuple[Fraction, Fraction] | None:
    """Intersection of the boundary lines of two inequalities, as
    (R_mbs, R_sbs); None when parallel."""
    a1, b1, c1 = p
    a2, b2, c2 = q
    det = a1 * b2 - a2 * b1
    if det == 0:
        return None
    r_mbs = (c1 * b2 - c2 * b1) / det
    r_sbs = (a1 * c2 - a2 * c1) / det
    return r_mbs, r_sbs


def region_corners(system: HalfspaceSystem) -> list[tuple[Fraction, Fraction]]:
    """Pareto-frontier vertices of the outer-bound region, sorted by R_sbs.

    Vertices come from pairwise boundary-line intersections filtered for
    feasibility (fine for the handful of inequalities involved); dominated
    vertices are removed so the result matches the usual frontier picture.
    Each pair is (R_sbs, R_mbs).
    """
    ineqs = system.inequalities
    if not ineqs:
        raise ValueError("empty system")
    candidates: set[tuple[Fraction, Fraction]] = set()
    for i in range(len(ineqs)):
        for j in range(i + 1, len(ineqs)):
            pt = _line_intersection(ineqs[i], ineqs[j])
            if pt is None:
                continue
            r_mbs, r_sbs = pt
            if r_mbs < 0 or r_sbs < 0:
                continue
            if system.satisfied_by(r_mbs, r_sbs):
                candidates.add((r_sbs, r_mbs))
    if not candidates:
        raise ValueError("infeasible or degenerate system")
    frontier = [p for p in candidates
                if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in candidates)]
    return sorted(frontier)


def min_rmbs(system: HalfspaceSystem, r_sbs: Fraction = Fraction(0)) -> Fraction:
    """Smallest R_mbs compatible with the system at the given R_sbs."""
    vals = [(c - b * r_sbs) / a for a, b, c in system.inequalities if a > 0]
    return max(max(vals), Fraction(0))


def min_rsbs(system: HalfspaceSystem, r_mbs: Fraction) -> Fraction:
    """Smallest R_sbs compatible with the system at the given R_mbs, or None
    when no finite R_sbs can compensate (some bound with b = 0 is violated)."""
    lo = Fraction(0)
    for a, b, c in system.inequalities:
        slack = c - a * r_mbs
        if b > 0:
            lo = max(lo, slack / b)
        elif slack > 0:
            return None
    return lo


def cutset_bound(topology: Topology, M: Rational, s: int) -> Fraction:
    """Cut-set style lower bound on R_mbs + R_sbs using the s most loaded
    SBSs: K_mbs + [L_[s] - s*M / floor((N-K_mbs)/L_[s])]^+.

    Kept only for comparison; it is never tighter than the corresponding
    sum bound of `converse_system`.
    """
    M = Fraction(M)
    t = topology
    if t.N <= t.K_mbs:
        raise ValueError("cut-set bound requires N > K_mbs")
    if not 1 <= s <= t.H:
        raise ValueError(f"s must be in [1, {t.H}]")
    L_s = t.L_prefix(s)
    reps = (t.N - t.K_mbs) // L_s
    if reps == 0:
        raise ValueError("bound inapplicable: L_[s] exceeds N - K_mbs")
    return t.K_mbs + pos_part(Fraction(L_s) - Fraction(s) * M / reps)
