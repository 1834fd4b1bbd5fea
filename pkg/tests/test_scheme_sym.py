import random
from fractions import Fraction

import pytest

from fogran.converse import converse_system
from fogran.core import DemandVector, Topology, binom
from fogran.scheme_sym import (SymSchemeParams, grouped_sidelink_load,
                               multicast_shared_load, step1_files, sym_per_demand_loads,
                               sym_shared_point, sym_sidelink_point, sym_corner_points,
                               trivial_point, worst_case_loads)

F = Fraction


class TestSharedPoints:
    def test_reference_t2(self, ex1_topology):
        p = sym_shared_point(SymSchemeParams(ex1_topology, 2))
        assert (p.M, p.R_mbs, p.R_sbs) == (F(8, 3), F(8, 3), F(0))

    def test_reference_t1(self, ex1_topology):
        # multicast term (2*binom(2,1) + 1*binom(1,1))/binom(3,1) = 5/3 beats 8/3
        p = sym_shared_point(SymSchemeParams(ex1_topology, 1))
        assert (p.M, p.R_mbs) == (F(4, 3), F(11, 3))

    def test_full_cache_slot(self, ex1_topology):
        p = sym_shared_point(SymSchemeParams(ex1_topology, 3))
        assert (p.M, p.R_mbs, p.R_sbs) == (F(4), F(2), F(0))

    def test_requires_coded_regime(self):
        top = Topology(H=2, K_mbs=4, L=(1, 1), N=3)
        with pytest.raises(ValueError, match="trivial"):
            sym_shared_point(SymSchemeParams(top, 1))

    def test_min_of_both_step2_variants(self):
        rng = random.Random(3)
        for _ in range(40):
            H = rng.randint(1, 5)
            L = tuple(sorted((rng.randint(1, 7) for _ in range(H)), reverse=True))
            K_mbs = rng.randint(0, 4)
            top = Topology(H=H, K_mbs=K_mbs, L=L, N=rng.randint(K_mbs + 1, 25))
            t = rng.randint(0, H)
            p = sym_shared_point(SymSchemeParams(top, t))
            best = min(worst_case_loads(top, t, "shared", 1)[0],
                       worst_case_loads(top, t, "shared", 2)[0])
            assert p.R_mbs == best


class TestSidelinkPoints:
    def test_reference_triple(self, ex1_topology):
        p = sym_sidelink_point(SymSchemeParams(ex1_topology, 2))
        assert (p.M, p.R_mbs, p.R_sbs) == (F(8, 3), F(2), F(2, 3))

    def test_t_zero_rejected(self, ex1_topology):
        with pytest.raises(ValueError, match="t >= 1"):
            sym_sidelink_point(SymSchemeParams(ex1_topology, 0))

    def test_full_slot_needs_no_sidelink(self, ex1_topology):
        p = sym_sidelink_point(SymSchemeParams(ex1_topology, 3))
        assert (p.M, p.R_mbs, p.R_sbs) == (F(4), F(2), F(0))

    @pytest.mark.parametrize("H", [2, 3, 4, 5, 6])
    def test_uniform_occupancy_closed_form(self, H):
        # equal occupancies L below the residual collapse the subset sum to L(H-t)/t
        L = 2
        top = Topology(H=H, K_mbs=1, L=tuple([L] * H), N=1 + L * H + 3)
        for t in range(1, H):
            total = grouped_sidelink_load([L] * H, H, t)
            assert total == F(L * (H - t), t)

    def test_single_sbs_degenerates(self):
        top = Topology(H=1, K_mbs=1, L=(3,), N=4)
        p = sym_sidelink_point(SymSchemeParams(top, 1))
        assert (p.M, p.R_mbs, p.R_sbs) == (F(3), F(1), F(0))


def test_trivial_point():
    top = Topology(H=2, K_mbs=5, L=(1, 1), N=3)
    p = trivial_point(top)
    assert (p.R_mbs, p.R_sbs) == (F(3), F(0))


class TestStepOne:
    def test_fills_with_sbs_files_then_library(self):
        top = Topology(H=2, K_mbs=3, L=(2, 1), N=6)
        d = DemandVector(top, (5, 5, 5, 6, 6, 6))
        # one MBS file, one SBS file, then the smallest unused library file
        assert step1_files(top, d) == (1, 5, 6)

    def test_case2_fill_is_lexicographic(self):
        top = Topology(H=2, K_mbs=2, L=(2, 1), N=6)
        d = DemandVector(top, (1, 1, 4, 3, 2))
        assert step1_files(top, d) == (1, 2)

    def test_always_exactly_k_mbs_files(self):
        top = Topology(H=2, K_mbs=4, L=(1, 1), N=5)
        d = DemandVector(top, (2, 2, 2, 2, 2, 2))
        assert step1_files(top, d) == (1, 2, 3, 4)


class TestPerDemand:
    def test_reference_demand(self, ex1_topology):
        d = DemandVector(ex1_topology, (1, 2, 3, 4, 5, 6))
        params = SymSchemeParams(ex1_topology, 2)
        assert sym_per_demand_loads(params, d, "sidelink", 2) == (F(2), F(2, 3))
        assert sym_per_demand_loads(params, d, "sidelink", 2,
                                    direct_extension=True) == (F(2), F(5, 6))

    def test_single_file_demand_collapses(self, ex1_topology):
        d = DemandVector(ex1_topology, (1,) * 6)
        params = SymSchemeParams(ex1_topology, 2)
        assert sym_per_demand_loads(params, d, "shared", 2) == (F(2), F(0))

    def test_never_exceeds_closed_form(self, ex1_topology):
        rng = random.Random(5)
        params = SymSchemeParams(ex1_topology, 1)
        for cls, app in (("shared", 1), ("shared", 2), ("sidelink", 1), ("sidelink", 2)):
            worst = worst_case_loads(ex1_topology, 1, cls, app)
            for _ in range(60):
                d = DemandVector(ex1_topology,
                                 tuple(rng.randint(1, 6) for _ in range(6)))
                got = sym_per_demand_loads(params, d, cls, app)
                assert got[0] <= worst[0] and got[1] <= worst[1]


def test_every_point_respects_the_outer_bound():
    rng = random.Random(9)
    for _ in range(30):
        H = rng.randint(1, 5)
        L = tuple(sorted((rng.randint(1, 7) for _ in range(H)), reverse=True))
        K_mbs = rng.randint(0, 4)
        top = Topology(H=H, K_mbs=K_mbs, L=L, N=rng.randint(K_mbs + 1, 30))
        for p in sym_corner_points(top):
            system = converse_system(top, min(p.M, F(top.N)))
            assert system.satisfied_by(p.R_mbs, p.R_sbs)


def test_single_sbs_matches_two_cache_optimum():
    # one SBS: memory N - K_mbs removes any need for step-2 traffic
    top = Topology(H=1, K_mbs=2, L=(3,), N=5)
    p = sym_shared_point(SymSchemeParams(top, 1))
    assert (p.M, p.R_mbs, p.R_sbs) == (F(3), F(2), F(0))


def test_multicast_load_matches_round_accounting():
    # the closed subset-sum form equals literal round-by-round counting
    rng = random.Random(1)
    for _ in range(80):
        G = rng.randint(1, 6)
        t = rng.randint(0, G)
        counts = sorted((rng.randint(0, 5) for _ in range(G)), reverse=True)
        direct = F(0)
        for j in range(1, (counts[0] if counts else 0) + 1):
            m = sum(1 for c in counts if c >= j)
            direct += F(binom(G, t + 1) - binom(G - m, t + 1), binom(G, t))
        assert multicast_shared_load(counts, G, t) == direct
