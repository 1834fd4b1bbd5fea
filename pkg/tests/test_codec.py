import random
from fractions import Fraction

import numpy as np
import pytest

from fogran import codec, gf256
from fogran.core import DemandVector, Topology
from fogran.delivery import SchemeSpec

F = Fraction


class TestField:
    def test_field_laws(self):
        rng = random.Random(0)
        for _ in range(3000):
            a, b, c = (rng.randrange(256) for _ in range(3))
            assert gf256.mul(a, b ^ c) == gf256.mul(a, b) ^ gf256.mul(a, c)
            assert gf256.mul(gf256.mul(a, b), c) == gf256.mul(a, gf256.mul(b, c))
            if a:
                assert gf256.mul(a, gf256.inv(a)) == 1

    def test_solve_round_trip(self):
        rng = np.random.default_rng(4)
        for n in (1, 3, 8, 17):
            A = rng.integers(0, 256, size=(n, n), dtype=np.uint8)
            while gf256.rank(A) < n:
                A = rng.integers(0, 256, size=(n, n), dtype=np.uint8)
            x = rng.integers(0, 256, size=n, dtype=np.uint8)
            assert np.array_equal(gf256.solve(A, gf256.matmul(A, x)), x)

    def test_singular_detected(self):
        A = np.array([[1, 2], [1, 2]], dtype=np.uint8)
        assert gf256.solve(A, np.array([1, 1], dtype=np.uint8)) is None
        assert gf256.rank(A) == 1


def test_minimal_B_and_validation():
    assert codec.minimal_B(3, 2) == 12
    assert codec.minimal_B(2, 1) == 4
    assert codec.minimal_B(3, 0) == 2
    codec.validate_B(24, 3, 2)
    with pytest.raises(ValueError, match="multiple"):
        codec.validate_B(10, 3, 2)


class TestPlacement:
    def test_cache_fills_exactly_the_budget(self, ex1_topology):
        spec = SchemeSpec(family="sym", t=2, class_="sidelink", approach=2)
        B = codec.minimal_B(3, 2)
        lib = codec.Library.generate(6, B, 1)
        caches = codec.place(lib, ex1_topology, spec, 1)
        M = F(2 * 4, 3)
        for g in (1, 2, 3):
            assert caches.stored_symbols(g) == M * B

    def test_empty_at_t0(self, ex1_topology):
        spec = SchemeSpec(family="sym", t=0, class_="shared", approach=1)
        lib = codec.Library.generate(6, 2, 1)
        caches = codec.place(lib, ex1_topology, spec, 1)
        assert all(not caches.per_group[g] for g in (1, 2, 3))

    def test_partition_groups_share_contents(self, ex1_topology):
        spec = SchemeSpec(family="asym", t=1, class_="shared", approach=2, G=2,
                          partition="1|2,3")
        lib = codec.Library.generate(6, 4, 5)
        caches = codec.place(lib, ex1_topology, spec, 5)
        # SBSs 2 and 3 sit in one group: a single cache entry backs them both
        assert caches.groups == ((1,), (2, 3))

    def test_deterministic_given_seed(self, ex1_topology):
        spec = SchemeSpec(family="sym", t=1, class_="shared", approach=2)
        lib = codec.Library.generate(6, 6, 9)
        c1 = codec.place(lib, ex1_topology, spec, 9)
        c2 = codec.place(lib, ex1_topology, spec, 9)
        for g in c1.per_group:
            for W in c1.per_group[g]:
                assert np.array_equal(c1.per_group[g][W][0], c2.per_group[g][W][0])


class TestEndToEnd:
    def test_reference_sidelink_run(self, ex1_topology):
        d = DemandVector(ex1_topology, (1, 2, 3, 4, 5, 6))
        spec = SchemeSpec(family="sym", t=2, class_="sidelink", approach=2)
        _, tr = codec.simulate(ex1_topology, spec, d, seed=7)
        assert all(tr.decoded.values()) and len(tr.decoded) == 6
        assert (tr.measured_r_mbs, tr.measured_r_sbs) == (F(2), F(2, 3))

    def test_reference_partitioned_run(self, ex1_topology):
        d = DemandVector(ex1_topology, (1, 2, 3, 4, 5, 6))
        spec = SchemeSpec(family="asym", t=1, class_="shared", approach=2, G=2,
                          partition="1|2,3")
        _, tr = codec.simulate(ex1_topology, spec, d, seed=7)
        assert all(tr.decoded.values())
        assert (tr.measured_r_mbs, tr.measured_r_sbs) == (F(3), F(0))

    def test_case1_run(self, ex1_topology):
        d = DemandVector(ex1_topology, (1, 1, 1, 1, 1, 1))
        _, tr = codec.simulate(ex1_topology, SchemeSpec(family="sym", t=2,
                                                        class_="shared"), d, seed=7)
        assert all(tr.decoded.values())
        assert (tr.measured_r_mbs, tr.measured_r_sbs) == (F(2), F(0))

    def test_full_slot_decodes_whole_library(self, ex1_topology):
        # t = H: caches plus any K_mbs broadcast files recover every file
        d = DemandVector(ex1_topology, (5, 6, 1, 2, 3, 4))
        spec = SchemeSpec(family="sym", t=3, class_="shared", approach=2)
        p, tr = codec.simulate(ex1_topology, spec, d, seed=2)
        assert p.step2 == () and all(tr.decoded.values())
        assert tr.measured_r_mbs == F(2)

    def test_transcripts_deterministic(self, ex1_topology):
        d = DemandVector(ex1_topology, (2, 3, 4, 5, 6, 1))
        spec = SchemeSpec(family="sym", t=2, class_="sidelink", approach=2)
        t1 = codec.simulate(ex1_topology, spec, d, seed=3)[1]
        t2 = codec.simulate(ex1_topology, spec, d, seed=3)[1]
        assert t1.symbols_per_link == t2.symbols_per_link

    def test_custom_B_must_divide(self, ex1_topology):
        d = DemandVector(ex1_topology, (1, 2, 3, 4, 5, 6))
        spec = SchemeSpec(family="sym", t=2, class_="sidelink", approach=2)
        with pytest.raises(ValueError):
            codec.simulate(ex1_topology, spec, d, seed=1, B=10)
        _, tr = codec.simulate(ex1_topology, spec, d, seed=1, B=24)
        assert (tr.measured_r_mbs, tr.measured_r_sbs) == (F(2), F(2, 3))


def test_three_way_equality_on_random_schemes():
    # formulas == plan sizes == measured symbol counts
    rng = random.Random(21)
    tops = [Topology(H=2, K_mbs=1, L=(2, 1), N=4),
            Topology(H=3, K_mbs=1, L=(1, 1, 1), N=4),
            Topology(H=2, K_mbs=0, L=(2, 2), N=3)]
    for top in tops:
        for cls, app in (("shared", 1), ("shared", 2), ("sidelink", 1), ("sidelink", 2)):
            for t in range(1 if cls == "sidelink" else 0, top.H + 1):
                spec = SchemeSpec(family="sym", t=t, class_=cls, approach=app)
                d = DemandVector(top, tuple(rng.randint(1, top.N) for _ in range(top.K)))
                p, tr = codec.simulate(top, spec, d, seed=17)
                assert (tr.measured_r_mbs, tr.measured_r_sbs) == (p.r_mbs, p.r_sbs)


def test_three_way_equality_four_cells():
    rng = random.Random(23)
    top = Topology(H=4, K_mbs=2, L=(2, 2, 1, 1), N=8)
    specs = [SchemeSpec(family="sym", t=2, class_="sidelink", approach=2),
             SchemeSpec(family="sym", t=3, class_="sidelink", approach=2,
                        direct_extension=True),
             SchemeSpec(family="sym", t=2, class_="shared", approach=2),
             SchemeSpec(family="sym", t=1, class_="sidelink", approach=1),
             SchemeSpec(family="asym", t=1, class_="sidelink", approach=2, G=2,
                        partition="1,4|2,3"),
             SchemeSpec(family="asym", t=2, class_="shared", approach=2, G=3,
                        partition="1|2,4|3")]
    for spec in specs:
        d = DemandVector(top, tuple(rng.randint(1, top.N) for _ in range(top.K)))
        p, tr = codec.simulate(top, spec, d, seed=29)
        assert all(tr.decoded.values())
        assert (tr.measured_r_mbs, tr.measured_r_sbs) == (p.r_mbs, p.r_sbs)
