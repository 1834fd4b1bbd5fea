"""Bit-exact realization of the schemes over GF(256): coded cache placement
as verified random linear combinations, execution of delivery plans, and
per-node decoding checks.

File layout: each of the N files is B field symbols; under a (G, t) scheme a
file splits into binom(G, t) subfiles of B_sub symbols laid out in the order
of `itertools.combinations`, and each subfile splits into t sub-pieces owned
by the members of its index set, ascending.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import gf256
from .core import DemandVector, Topology, binom
from .delivery import MBS, RLC, WHOLE_FILE, XOR_SUBFILES, XOR_SUBPIECES, DeliveryPlan, SchemeSpec

MAX_RESAMPLES = 16
FILL_VERIFY_CAP = 2048


class CodecError(RuntimeError):
    """Decoding failed at a node; carries the node and what is missing."""

    def __init__(self, node, missing):
        super().__init__(f"node {node} failed to decode; missing {missing}")
        self.node = node
        self.missing = missing


@dataclass(frozen=True)
class Library:
    N: int
    B: int
    files: np.ndarray  # (N, B) uint8

    @classmethod
    def generate(cls, N: int, B: int, seed: int) -> "Library":
        rng = _stream(seed, 0)
        return cls(N=N, B=B, files=rng.integers(0, 256, size=(N, B), dtype=np.uint8))


def minimal_B(G: int, t: int, symbols_per_piece: int = 2) -> int:
    """Smallest file size exhibiting the full subfile/sub-piece structure."""
    return symbols_per_piece * max(t, 1) * binom(G, t)


def validate_B(B: int, G: int, t: int):
    grain = max(t, 1) * binom(G, t)
    if B % grain:
        raise ValueError(f"B={B} must be a multiple of {grain} for (G={G}, t={t})")


def _stream(seed: int, *ids: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=ids)))


@dataclass
class CacheContents:
    """Per-group coded caches: for every subfile index set W containing the
    group, a full-row-rank coefficient matrix over the symbols of
    F_W = {subfile W of every file} together with the coded symbols."""

    groups: tuple[tuple[int, ...], ...]
    t: int
    B_sub: int
    subsets: tuple[tuple[int, ...], ...]
    per_group: dict[int, dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]]]
    seed: int

    def stored_symbols(self, g: int) -> int:
        return sum(A.shape[0] for A, _ in self.per_group[g].values())

    def w_index(self, W: tuple[int, ...]) -> int:
        return self.subsets.index(W)


def _subfile_slice(B: int, nsub: int, w_idx: int) -> slice:
    b_sub = B // nsub
    return slice(w_idx * b_sub, (w_idx + 1) * b_sub)


def place(library: Library, topology: Topology, spec: SchemeSpec, seed: int) -> CacheContents:
    """Draw the coded placement. Coefficients come from a counter-based seeded
    generator; each F_W matrix is resampled (bounded) until it has full row
    rank and, when the check is affordable, until every possible step-1
    broadcast set leaves an invertible decoding system, so decoding never
    depends on luck at simulation time."""
    groups = spec.resolve_groups(topology)
    G, t = len(groups), spec.t
    validate_B(library.B, G, t)
    nsub = binom(G, t)
    B_sub = library.B // nsub
    subsets = tuple(combinations(range(1, G + 1), t))
    n_cols = topology.N * B_sub
    rows = (topology.N - topology.K_mbs) * B_sub
    per_w: dict[tuple[int, ...], tuple[np.ndarray, np.ndarray]] = {}
    verify_fills = binom(topology.N, topology.K_mbs) <= FILL_VERIFY_CAP
    if t > 0:
        for w_idx, W in enumerate(subsets):
            ok = None
            for attempt in range(MAX_RESAMPLES):
                A = gf256.random_matrix(rows, n_cols, _stream(seed, 1, w_idx, attempt))
                if gf256.rank(A) != rows:
                    continue
                if verify_fills and not _all_fills_decodable(A, topology, B_sub):
                    continue
                ok = A
                break
            if ok is None:
                raise CodecError("placement", f"degenerate field sampling for W={W}")
            fw = library.files[:, _subfile_slice(library.B, nsub, w_idx)].reshape(-1)
            per_w[W] = (ok, gf256.matmul(ok, fw))
    per_group = {g: {W: per_w[W] for W in subsets if g in W} for g in range(1, G + 1)}
    caches = CacheContents(groups=groups, t=t, B_sub=B_sub, subsets=subsets,
                           per_group=per_group, seed=seed)
    M = Fraction(t * (topology.N - topology.K_mbs), G)
    for g in range(1, G + 1):
        if caches.stored_symbols(g) > M * library.B:
            raise AssertionError("cache size constraint violated")
    return caches


def _all_fills_decodable(A: np.ndarray, topology: Topology, B_sub: int) -> bool:
    """Check A restricted to the unknown columns stays invertible for every
    possible K_mbs-subset of broadcast files."""
    N, k0 = topology.N, topology.K_mbs
    for known in combinations(range(N), k0):
        keep = np.ones(N, dtype=bool)
        keep[list(known)] = False
        cols = np.repeat(keep, B_sub)
        if gf256.rank(A[:, cols]) != A.shape[0]:
            return False
    return True


@dataclass
class Transcript:
    decoded: dict[int, bool]
    measured_r_mbs: Fraction
    measured_r_sbs: Fraction
    symbols_per_link: dict[str, int]

    def to_json_dict(self) -> dict:
        from .core import rational_str
        return {"decoded": {str(k): v for k, v in sorted(self.decoded.items())},
                "measured_loads": {"R_mbs": rational_str(self.measured_r_mbs),
                                   "R_sbs": rational_str(self.measured_r_sbs)},
                "symbols_per_link": dict(self.symbols_per_link)}


class _GroupState:
    """What one cache group has recovered so far."""

    def __init__(self):
        self.subfiles: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}
        self.pieces: dict[tuple[int, tuple[int, ...], int], np.ndarray] = {}
        self.whole: dict[int, np.ndarray] = {}

    def subfile_piece(self, f, W, owner, piece_len):
        sub = self.subfiles.get((f, W))
        if sub is not None:
            idx = sorted(W).index(owner)
            return sub[idx * piece_len:(idx + 1) * piece_len]
        return self.pieces.get((f, W, owner))


def execute(library: Library, caches: CacheContents, plan: DeliveryPlan,
            topology: Topology, d: DemandVector) -> Transcript:
    """Simulate the plan symbol by symbol and verify every user decodes.

    Raises CodecError as soon as any node cannot reconstruct what the plan
    owes it; per the system model that is a failure, not a recoverable state.
    """
    groups = caches.groups
    G, t = len(groups), caches.t
    nsub = binom(G, t)
    B, B_sub = library.B, caches.B_sub
    piece_len = B_sub // t if t else B_sub
    group_of_sbs = {h: gi for gi, members in enumerate(groups, start=1) for h in members}
    states = {g: _GroupState() for g in range(1, G + 1)}
    symbols = {"mbs": 0}
    symbols.update({f"sbs{h}": 0 for h in range(1, topology.H + 1)})

    def count(msg, n: int):
        if Fraction(n) != msg.size * B:
            raise AssertionError(f"message carries {n} symbols but is sized {msg.size} * B")
        symbols["mbs" if msg.source == MBS else f"sbs{msg.source}"] += n

    broadcast: list[int] = []
    for msg in plan.step1:
        assert msg.kind == WHOLE_FILE
        f = msg.payload[0]
        broadcast.append(f)
        count(msg, B)
        for st in states.values():
            st.whole[f] = library.files[f - 1]
    if t > 0:
        _recover_cached_sets(library, caches, topology, states, broadcast)

    for idx, msg in enumerate(plan.step2):
        if msg.kind == RLC:
            n = _apply_rlc(library, caches, states, msg, idx, group_of_sbs)
        elif msg.kind == XOR_SUBFILES:
            n = _apply_xor_subfiles(library, caches, states, msg)
        elif msg.kind == XOR_SUBPIECES:
            n = _apply_xor_subpieces(library, caches, states, msg, piece_len)
        else:
            raise ValueError(f"unexpected step-2 message kind {msg.kind}")
        count(msg, n)

    # stitch recovered sub-pieces into their subfiles
    for st in states.values():
        gathered: dict[tuple[int, tuple[int, ...]], dict[int, np.ndarray]] = {}
        for (f, W, owner), data in st.pieces.items():
            gathered.setdefault((f, W), {})[owner] = data
        for (f, W), parts in gathered.items():
            if (f, W) not in st.subfiles and len(parts) == len(W):
                st.subfiles[(f, W)] = np.concatenate([parts[h] for h in sorted(W)])

    decoded = {}
    for k in range(1, topology.K + 1):
        f = d.of_user(k)
        h = topology.sbs_of_user(k)
        if h == 0:
            got = library.files[f - 1] if f in broadcast else None
        else:
            got = _reconstruct(states[group_of_sbs[h]], f, caches.subsets)
        if got is None or not np.array_equal(got, library.files[f - 1]):
            raise CodecError(f"user {k} (sbs {h})", f"file {f}")
        decoded[k] = True

    r_mbs = Fraction(symbols["mbs"], B)
    r_sbs = Fraction(sum(v for k, v in symbols.items() if k != "mbs"), B)
    return Transcript(decoded=decoded, measured_r_mbs=r_mbs, measured_r_sbs=r_sbs,
                      symbols_per_link=symbols)


def _reconstruct(st: _GroupState, f: int, subsets) -> np.ndarray | None:
    if f in st.whole:
        return st.whole[f]
    parts = []
    for W in subsets:
        p = st.subfiles.get((f, W))
        if p is None:
            return None
        parts.append(p)
    return np.concatenate(parts) if parts else None


def _recover_cached_sets(library, caches: CacheContents, topology, states, broadcast):
    """Each group solves, per stored W, its cached combinations joined with
    the broadcast subfiles to recover the full F_W symbol set."""
    N = topology.N
    B_sub = caches.B_sub
    nsub = len(caches.subsets)
    known_idx = sorted({f - 1 for f in broadcast})
    unknown = np.ones(N, dtype=bool)
    unknown[known_idx] = False
    ucols = np.repeat(unknown, B_sub)
    solved: dict[tuple[int, ...], np.ndarray] = {}
    for g, st in states.items():
        for W in caches.subsets:
            if g not in W:
                continue
            if W not in solved:
                w_idx = caches.w_index(W)
                A, coded = caches.per_group[g][W]
                rhs = coded.copy()
                if known_idx:
                    kvals = np.concatenate(
                        [library.files[i, _subfile_slice(library.B, nsub, w_idx)]
                         for i in known_idx])
                    rhs = rhs ^ gf256.matmul(A[:, ~ucols], kvals)
                sol = gf256.solve(A[:, ucols], rhs)
                if sol is None:
                    raise CodecError(f"group {g}", f"cache system for W={W}")
                full = np.zeros(N * B_sub, dtype=np.uint8)
                if known_idx:
                    full[~ucols] = kvals
                full[ucols] = sol
                solved[W] = full
            full = solved[W]
            for i in range(N):
                st.subfiles[(i + 1, W)] = full[i * B_sub:(i + 1) * B_sub].copy()


def _apply_rlc(library, caches: CacheContents, states, msg, msg_idx, group_of_sbs):
    """RLC messages: regenerate the sender's coefficients (resampling, as the
    sender would, until every receiver's residual system is invertible),
    then solve at each receiver."""
    B = library.B
    B_sub = caches.B_sub
    t = caches.t
    nsub = len(caches.subsets)
    scope = msg.payload
    if scope[0] == "file":
        f = scope[1]
        n_syms = int(msg.size * B)
        universe = library.files[f - 1]
        known_sets = {}
        for g, st in states.items():
            mask = np.zeros(B, dtype=bool)
            if f in st.whole:
                mask[:] = True
            else:
                for w_idx, W in enumerate(caches.subsets):
                    if (f, W) in st.subfiles:
                        mask[_subfile_slice(B, nsub, w_idx)] = True
            known_sets[g] = mask
        receivers = [g for g, m in known_sets.items() if not m.all()]
        if receivers:
            A = _verified_coeffs(caches.seed, (2, msg_idx), n_syms,
                                 [~known_sets[g] for g in receivers])
            payload = gf256.matmul(A, universe)
            for g in receivers:
                mask = known_sets[g]
                rhs = payload ^ gf256.matmul(A[:, mask], universe[mask])
                sol = gf256.solve(A[:, ~mask], rhs)
                if sol is None:
                    raise CodecError(f"group {g}", f"RLC system for file {f}")
                full = universe.copy()  # layout only; unknown part comes from sol
                full[~mask] = sol
                states[g].whole[f] = full
        return n_syms
    if scope[0] == "file_pieces":
        f, sender = scope[1], scope[2]
        gs = group_of_sbs[sender]
        piece_len = B_sub // t
        owned = [(w_idx, W) for w_idx, W in enumerate(caches.subsets) if gs in W]
        chunks = []
        for w_idx, W in owned:
            sub = library.files[f - 1, _subfile_slice(B, nsub, w_idx)]
            pos = sorted(W).index(gs)
            chunks.append(sub[pos * piece_len:(pos + 1) * piece_len])
        universe = np.concatenate(chunks)
        n_syms = int(msg.size * B)
        receivers = [g for g in states if g != gs]
        unknown_masks = []
        for g in receivers:
            mask = np.zeros(len(universe), dtype=bool)
            for pos, (w_idx, W) in enumerate(owned):
                if g not in W:
                    mask[pos * piece_len:(pos + 1) * piece_len] = True
            unknown_masks.append(mask)
        A = _verified_coeffs(caches.seed, (3, msg_idx), n_syms, unknown_masks)
        payload = gf256.matmul(A, universe)
        for g, umask in zip(receivers, unknown_masks):
            if not umask.any():
                continue
            rhs = payload ^ gf256.matmul(A[:, ~umask], universe[~umask])
            sol = gf256.solve(A[:, umask], rhs)
            if sol is None:
                raise CodecError(f"group {g}", f"piece RLC for file {f} from sbs {sender}")
            full = universe.copy()
            full[umask] = sol
            for pos, (w_idx, W) in enumerate(owned):
                states[g].pieces[(f, W, gs)] = full[pos * piece_len:(pos + 1) * piece_len].copy()
        return n_syms
    raise ValueError(f"unknown RLC scope {scope}")


def _verified_coeffs(seed, stream_ids, rows, unknown_masks):
    """Coefficient matrix whose restriction to every receiver's unknown
    columns is invertible; bounded resampling mirrors what a real sender
    would do before transmitting."""
    cols = len(unknown_masks[0]) if unknown_masks else rows
    for attempt in range(MAX_RESAMPLES):
        A = gf256.random_matrix(rows, cols, _stream(seed, *stream_ids, attempt))
        if all(gf256.rank(A[:, m]) == int(m.sum()) for m in unknown_masks if m.any()):
            return A
    raise CodecError("sender", "degenerate field sampling for RLC message")


def _apply_xor_subfiles(library, caches: CacheContents, states, msg):
    B = library.B
    nsub = len(caches.subsets)
    B_sub = caches.B_sub
    payload = np.zeros(B_sub, dtype=np.uint8)
    for f, W in msg.payload:
        payload = payload ^ _subfile_data(library, caches, f, W)
    for st in states.values():
        missing = [(f, W) for f, W in msg.payload if (f, W) not in st.subfiles]
        if len(missing) == 1:
            acc = payload.copy()
            for f, W in msg.payload:
                if (f, W) != missing[0]:
                    acc ^= st.subfiles[(f, W)]
            st.subfiles[missing[0]] = acc
    return B_sub


def _apply_xor_subpieces(library, caches: CacheContents, states, msg, piece_len):
    payload = np.zeros(piece_len, dtype=np.uint8)
    for f, W, owner in msg.payload:
        payload = payload ^ _piece_data(library, caches, f, W, owner, piece_len)
    for st in states.values():
        missing = [(f, W, owner) for f, W, owner in msg.payload
                   if st.subfile_piece(f, W, owner, piece_len) is None]
        if len(missing) == 1:
            acc = payload.copy()
            for part in msg.payload:
                if part != missing[0]:
                    acc ^= st.subfile_piece(*part, piece_len)
            st.pieces[missing[0]] = acc
    return piece_len


def _subfile_data(library, caches: CacheContents, f, W):
    w_idx = caches.w_index(tuple(W))
    return library.files[f - 1, _subfile_slice(library.B, len(caches.subsets), w_idx)]


def _piece_data(library, caches: CacheContents, f, W, owner, piece_len):
    sub = _subfile_data(library, caches, f, W)
    idx = sorted(W).index(owner)
    return sub[idx * piece_len:(idx + 1) * piece_len]


def simulate(topology: Topology, spec: SchemeSpec, d: DemandVector, seed: int,
             B: int | None = None) -> tuple[DeliveryPlan, Transcript]:
    """Convenience wrapper: build the plan, generate a library at minimal (or
    given) B, place caches, and execute."""
    from .delivery import plan as build_plan
    groups = spec.resolve_groups(topology)
    spec = SchemeSpec(family=spec.family, t=spec.t, class_=spec.class_,
                      approach=spec.approach, G=len(groups),
                      partition=None if spec.family == "sym" else _as_partition(topology, groups),
                      direct_extension=spec.direct_extension)
    if B is None:
        B = minimal_B(len(groups), spec.t)
    library = Library.generate(topology.N, B, seed)
    p = build_plan(topology, spec, d)
    caches = place(library, topology, spec, seed)
    transcript = execute(library, caches, p, topology, d)
    return p, transcript


def _as_partition(topology, groups):
    from .scheme_asym import Partition
    return Partition.from_groups(topology, groups)
