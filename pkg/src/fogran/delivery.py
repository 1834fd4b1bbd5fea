"""Explicit delivery plans: ordered message lists realizing a scheme for one
demand vector, including the sidelink grouping algorithm with its user-moving
rule and the two coded-packet cases (full groups ship per-receiver sub-piece
XORs, short groups ship one whole-subfile XOR from an idle sender).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .core import DemandVector, Topology, binom
from .scheme_asym import Partition, best_partition_shared, best_partition_sidelink
from .scheme_sym import SHARED, SIDELINK, residual_profile, singleton_groups, step1_files

MBS = 0

WHOLE_FILE = "whole_file"
RLC = "rlc"
XOR_SUBFILES = "xor_subfiles"
XOR_SUBPIECES = "xor_subpieces"


@dataclass(frozen=True)
class Message:
    """One transmission: source 0 is the MBS downlink, source h >= 1 is SBS h
    on the sidelink. Size is in units of the file size B."""

    source: int
    kind: str
    payload: tuple
    size: Fraction

    def to_json_dict(self) -> dict:
        from .core import rational_str
        return {"source": self.source, "kind": self.kind,
                "payload": _payload_json(self.kind, self.payload),
                "size": rational_str(self.size)}


def _payload_json(kind, payload):
    if kind == WHOLE_FILE:
        return {"file": payload[0]}
    if kind == RLC:
        return {"scope": list(payload)}
    if kind == XOR_SUBFILES:
        return {"parts": [[f, list(W)] for f, W in payload]}
    if kind == XOR_SUBPIECES:
        return {"parts": [[f, list(W), h] for f, W, h in payload]}
    raise ValueError(kind)


@dataclass(frozen=True)
class DeliveryPlan:
    step1: tuple[Message, ...]
    step2: tuple[Message, ...]
    per_sbs_loads: dict[int, Fraction] = field(compare=False)

    @property
    def r_mbs(self) -> Fraction:
        return sum((m.size for m in self.step1 + self.step2 if m.source == MBS), Fraction(0))

    @property
    def r_sbs(self) -> Fraction:
        return sum((m.size for m in self.step2 if m.source != MBS), Fraction(0))

    def to_json_dict(self) -> dict:
        from .core import rational_str
        return {"step1": [m.to_json_dict() for m in self.step1],
                "step2": [m.to_json_dict() for m in self.step2],
                "per_sbs_loads": {str(h): rational_str(v) for h, v in sorted(self.per_sbs_loads.items())},
                "R_mbs": rational_str(self.r_mbs), "R_sbs": rational_str(self.r_sbs)}


@dataclass(frozen=True)
class SchemeSpec:
    """Which scheme a plan realizes: subpacketization family, cache slot t,
    delivery class and approach (1 = random linear combinations, 2 = coded
    multicast), and for the asymmetric family the SBS partition."""

    family: str = "sym"
    t: int = 1
    class_: str = SHARED
    approach: int = 2
    G: int | None = None
    partition: Partition | str | None = None
    direct_extension: bool = False

    def resolve_groups(self, topology: Topology) -> tuple[tuple[int, ...], ...]:
        if self.family == "sym":
            if self.G not in (None, topology.H):
                raise ValueError("symmetric family fixes G = H")
            return singleton_groups(topology.H)
        if self.family != "asym":
            raise ValueError(f"unknown family {self.family!r}")
        if self.approach != 2:
            raise ValueError("partitioned schemes define only the multicast delivery")
        part = self.partition
        if isinstance(part, str):
            part = Partition.parse(topology, part)
        if part is None:
            if self.G is None:
                raise ValueError("asym scheme needs G or an explicit partition")
            finder = best_partition_shared if self.class_ == SHARED else best_partition_sidelink
            part, _ = finder(topology, self.G, self.t)
        if self.G is not None and part.G != self.G:
            raise ValueError(f"partition has {part.G} groups, expected {self.G}")
        return part.groups


def build_groups(S, user_counts: dict[int, int], t: int) -> list[list[tuple[int, int]]]:
    """Group the (t+1)-subset S's users for one multicast round structure.

    `user_counts[g]` counts group g's distinct residual demands; iterating S
    in ascending order must give non-increasing counts (relabel first
    otherwise).  Returns groups of abstract user slots (g, j) meaning the
    j-th representative (0-based) of group g: a round-robin fill followed by
    the tail-user moving rule that equalizes group sizes.
    """
    order = sorted(S)
    if len(order) != t + 1:
        raise ValueError(f"expected |S| = t+1 = {t + 1}, got {len(order)}")
    counts = [user_counts[g] for g in order]
    if any(counts[i] < counts[i + 1] for i in range(len(counts) - 1)):
        raise ValueError("counts must be non-increasing along sorted S")
    slots = _grouping_slots(counts, t)
    return [[(order[pos], j) for pos, j in grp] for grp in slots]


def _grouping_slots(counts: list[int], t: int) -> list[list[tuple[int, int]]]:
    """Core of the grouping rule on positional counts (non-increasing)."""
    n_groups = counts[0] if counts else 0
    groups: list[list[tuple[int, int]]] = [[] for _ in range(n_groups)]
    for pos, c in enumerate(counts):
        for j in range(c):
            groups[j].append((pos, j))
    if len(counts) == t + 1 and n_groups:
        u1, ut, ut1 = counts[0], counts[t - 1], counts[t]
        moves = ut1 if ut1 <= u1 - ut else u1 - ut
        for g in range(moves):
            groups[g].remove((t, g))
            groups[ut + g].append((t, g))
    return [g for g in groups if g]


def _representatives(topology: Topology, groups, per_group_files, d: DemandVector):
    """Per group, the ascending-id user representing each distinct residual
    file (one per file; same-demand users at a shared cache collapse)."""
    reps = []
    for members, files in zip(groups, per_group_files):
        chosen = {}
        for h in members:
            for k in topology.users_of_sbs(h):
                f = d.of_user(k)
                if f in files and (f not in chosen or k < chosen[f]):
                    chosen[f] = k
        reps.append(sorted(chosen.values()))
    return reps


def plan(topology: Topology, spec: SchemeSpec, d: DemandVector) -> DeliveryPlan:
    """Build the full message list for one demand under the given scheme."""
    if topology.N <= topology.K_mbs:
        raise ValueError("N <= K_mbs: the trivial broadcast scheme needs no plan")
    groups = spec.resolve_groups(topology)
    G = len(groups)
    t = spec.t
    if not 0 <= t <= G:
        raise ValueError(f"t must be in [0, {G}]")
    if spec.class_ == SIDELINK and t == 0:
        raise ValueError("sidelink delivery requires t >= 1")

    group_of_sbs = {h: gi for gi, members in enumerate(groups, start=1) for h in members}
    step1 = tuple(Message(MBS, WHOLE_FILE, (f,), Fraction(1)) for f in step1_files(topology, d))
    residual, per_group_files = residual_profile(topology, groups, d)
    step2: list[Message] = []

    if residual:
        nsub = binom(G, t)
        reps = _representatives(topology, groups, per_group_files, d)
        counts = {g: len(reps[g - 1]) for g in range(1, G + 1)}

        if spec.class_ == SHARED and spec.approach == 1:
            for f in sorted(residual):
                step2.append(Message(MBS, RLC, ("file", f), Fraction(G - t, G)))

        elif spec.class_ == SHARED and spec.approach == 2:
            step2.extend(_multicast_rounds(topology, d, reps, G, t, nsub))

        elif spec.class_ == SIDELINK and spec.approach == 1:
            if spec.family != "sym":
                raise ValueError("sidelink RLC delivery is defined for the symmetric family")
            per_sender = Fraction(binom(G - 2, t - 1), t * nsub)
            if per_sender > 0:
                for f in sorted(residual):
                    for h in range(1, topology.H + 1):
                        step2.append(Message(h, RLC, ("file_pieces", f, h), per_sender))

        elif spec.class_ == SIDELINK and spec.approach == 2 and spec.direct_extension:
            step2.extend(_direct_extension(topology, d, reps, groups, G, t, nsub))

        elif spec.class_ == SIDELINK and spec.approach == 2:
            step2.extend(_grouped_sidelink(topology, d, reps, groups, counts, G, t, nsub))

        else:
            raise ValueError(f"unsupported class/approach ({spec.class_!r}, {spec.approach})")

    for m in step2:
        if m.source != MBS:
            _assert_sender_knows(m, group_of_sbs)
    per_sbs = {h: Fraction(0) for h in range(1, topology.H + 1)}
    for m in step2:
        if m.source != MBS:
            per_sbs[m.source] += m.size
    return DeliveryPlan(step1=step1, step2=tuple(step2), per_sbs_loads=per_sbs)


def _assert_sender_knows(msg: Message, group_of_sbs: dict[int, int]):
    # sidelink encoders see only their own cache and the downlink, so every
    # transmitted part must live in a subfile the sender's group stores
    g = group_of_sbs[msg.source]
    if msg.kind == XOR_SUBFILES:
        parts = [(f, W) for f, W in msg.payload]
    elif msg.kind == XOR_SUBPIECES:
        parts = [(f, W) for f, W, _ in msg.payload]
    else:
        return
    for f, W in parts:
        if g not in W:
            raise AssertionError(f"SBS {msg.source} cannot encode subfile {(f, W)}")


def _multicast_rounds(topology, d, reps, G, t, nsub):
    """Shared-link multicast: per round, one XOR per (t+1)-subset of groups
    touching a picked user; each receiver is missing exactly its own term."""
    msgs = []
    rounds = max((len(r) for r in reps), default=0)
    for j in range(rounds):
        supp = [g for g in range(1, G + 1) if len(reps[g - 1]) > j]
        for S in combinations(range(1, G + 1), t + 1):
            active = [g for g in S if g in supp]
            if not active:
                continue
            parts = tuple((d.of_user(reps[g - 1][j]), tuple(x for x in S if x != g))
                          for g in active)
            msgs.append(Message(MBS, XOR_SUBFILES, parts, Fraction(1, nsub)))
    return msgs


def _case_a_messages(d, group_users, user_group, S, smallest_sbs, t, nsub):
    """Full group: each member group's SBS ships one XOR of sub-pieces, every
    other member missing exactly its own piece."""
    msgs = []
    for gv in S:
        parts = tuple((d.of_user(k), tuple(x for x in S if x != user_group[k]), gv)
                      for k in group_users if user_group[k] != gv)
        msgs.append(Message(smallest_sbs[gv], XOR_SUBPIECES, parts, Fraction(1, t * nsub)))
    return msgs


def _case_b_message(d, group_users, user_group, S, smallest_sbs, nsub):
    """Short group: one idle group in S ships the whole-subfile XOR."""
    busy = {user_group[k] for k in group_users}
    gv = min(g for g in S if g not in busy)
    parts = tuple((d.of_user(k), tuple(x for x in S if x != user_group[k]))
                  for k in group_users)
    return Message(smallest_sbs[gv], XOR_SUBFILES, parts, Fraction(1, nsub))


def _grouped_sidelink(topology, d, reps, groups, counts, G, t, nsub):
    msgs = []
    smallest_sbs = {g: min(groups[g - 1]) for g in range(1, G + 1)}
    user_group = {k: g for g in range(1, G + 1) for k in
                  (reps[g - 1][j] for j in range(counts[g]))}
    for S in combinations(range(1, G + 1), t + 1):
        vorder = sorted(S, key=lambda g: (-counts[g], g))
        slot_groups = _grouping_slots([counts[g] for g in vorder], t)
        for slots in slot_groups:
            users = [reps[vorder[pos] - 1][j] for pos, j in slots]
            if len(users) == t + 1:
                msgs.extend(_case_a_messages(d, users, user_group, S, smallest_sbs, t, nsub))
            else:
                msgs.append(_case_b_message(d, users, user_group, S, smallest_sbs, nsub))
    return msgs


def _direct_extension(topology, d, reps, groups, G, t, nsub):
    """Round-based sidelink delivery without regrouping: full rounds pay the
    sub-piece split, others ship one whole-subfile XOR from an idle group."""
    msgs = []
    smallest_sbs = {g: min(groups[g - 1]) for g in range(1, G + 1)}
    user_group = {}
    for g in range(1, G + 1):
        for k in reps[g - 1]:
            user_group[k] = g
    rounds = max((len(r) for r in reps), default=0)
    for j in range(rounds):
        supp = [g for g in range(1, G + 1) if len(reps[g - 1]) > j]
        for S in combinations(range(1, G + 1), t + 1):
            active = [g for g in S if g in supp]
            if not active:
                continue
            users = [reps[g - 1][j] for g in active]
            if len(active) == t + 1:
                msgs.extend(_case_a_messages(d, users, user_group, S, smallest_sbs, t, nsub))
            else:
                msgs.append(_case_b_message(d, users, user_group, S, smallest_sbs, nsub))
    return msgs
