import pytest

from fogran.core import Topology


@pytest.fixture
def ex1_topology():
    """Three small cells serving 2+1+1 users, two direct users, six files."""
    return Topology(H=3, K_mbs=2, L=(2, 1, 1), N=6)


@pytest.fixture
def fig2_topology():
    return Topology(H=4, K_mbs=4, L=(6, 4, 3, 3), N=20)


@pytest.fixture
def fig5_topology():
    return Topology(H=6, K_mbs=10, L=(20, 20, 8, 6, 4, 2), N=70)


def grid_topologies(max_h=3, max_n=5, max_k=6, require_coded=True):
    """Every topology with H <= max_h, N <= max_n, K <= max_k (optionally
    restricted to N > K_mbs where the coded schemes are defined)."""
    out = []
    for H in range(1, max_h + 1):
        for L in _occupancies(H, max_k):
            k_sbs = sum(L)
            for k_mbs in range(0, max_k - k_sbs + 1):
                lo = k_mbs + 1 if require_coded else 1
                for N in range(lo, max_n + 1):
                    out.append(Topology(H=H, K_mbs=k_mbs, L=L, N=N))
    return out


def _occupancies(H, max_total):
    if H == 0:
        yield ()
        return
    for first in range(1, max_total - (H - 1) + 1):
        for rest in _occupancies(H - 1, max_total - first):
            if not rest or first >= rest[0]:
                yield (first,) + rest


def scheme_variants(grouping_size, singleton: bool):
    """(class, approach, t, direct_extension) combos valid for a grouping."""
    out = []
    for t in range(0, grouping_size + 1):
        out.append(("shared", 2, t, False))
        if singleton:
            out.append(("shared", 1, t, False))
    for t in range(1, grouping_size + 1):
        out.append(("sidelink", 2, t, False))
        if singleton:
            out.append(("sidelink", 1, t, False))
            out.append(("sidelink", 2, t, True))
    return out
