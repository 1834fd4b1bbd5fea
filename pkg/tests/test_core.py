from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fogran.core import (DemandVector, MemoryLoadPoint, Topology, as_rational, binom,
                         envelope_value, lower_convex_envelope, rational_decimal,
                         rational_str)

F = Fraction


def test_binom_standard_and_extended_conventions():
    assert binom(4, 2) == 6
    assert binom(3, 5) == 0          # n < k yields zero, not an error
    assert binom(12, 6) == 924
    assert binom(-1, 0) == 0
    assert binom(5, -1) == 0
    assert binom(0, 0) == 1


@given(st.integers(-50, 50), st.integers(1, 30), st.integers(-50, 50), st.integers(1, 30))
def test_rational_arithmetic_is_exact(a, b, c, d):
    x, y = F(a, b), F(c, d)
    assert (x + y) - y == x
    assert (x * y) / y == x if y != 0 else True


def test_as_rational_parsing():
    assert as_rational("3/4") == F(3, 4)
    assert as_rational(7) == F(7)
    with pytest.raises(TypeError):
        as_rational(0.5)


def test_rational_rendering():
    assert rational_str(F(3, 4)) == "3/4"
    assert rational_str(F(5)) == "5"
    assert rational_decimal(F(65, 8)) == "8.125"
    assert rational_decimal(F(0)) == "0"


class TestTopology:
    def test_basic_accessors(self):
        top = Topology(H=3, K_mbs=2, L=(2, 1, 1), N=6)
        assert top.K_sbs == 4 and top.K == 6
        assert top.L_prefix(2) == 3
        assert top.L_subset({1, 3}) == 3
        assert list(top.users_of_sbs(1)) == [3, 4]
        assert top.sbs_of_user(2) == 0
        assert top.sbs_of_user(6) == 3

    def test_rejects_unsorted_or_nonpositive(self):
        with pytest.raises(ValueError):
            Topology(H=2, K_mbs=0, L=(1, 2), N=3)
        with pytest.raises(ValueError):
            Topology(H=2, K_mbs=0, L=(2, 0), N=3)
        with pytest.raises(ValueError):
            Topology(H=2, K_mbs=-1, L=(2, 1), N=3)

    def test_from_occupancies_normalizes_and_remembers_order(self):
        top = Topology.from_occupancies(H=3, K_mbs=0, L=[1, 3, 2], N=5)
        assert top.L == (3, 2, 1)
        assert top.original_order == (2, 3, 1)

    def test_json_round_trip(self):
        top = Topology.from_json_dict({"H": 2, "K_mbs": 1, "L": [1, 4], "N": 9})
        assert top.L == (4, 1)
        assert top.to_json_dict()["N"] == 9


class TestDemandVector:
    def test_derived_sets(self):
        top = Topology(H=2, K_mbs=2, L=(2, 1), N=5)
        d = DemandVector(top, (1, 2, 2, 3, 4))
        assert d.mbs_files() == {1, 2}
        assert d.sbs_files() == {3, 4}      # the repeated 2 belongs to the MBS set

    def test_validation(self):
        top = Topology(H=1, K_mbs=0, L=(2,), N=3)
        with pytest.raises(ValueError):
            DemandVector(top, (1,))
        with pytest.raises(ValueError):
            DemandVector(top, (1, 4))


def test_memory_load_point_validation():
    with pytest.raises(ValueError):
        MemoryLoadPoint(M=F(-1), R_mbs=F(0), R_sbs=F(0))
    p = MemoryLoadPoint(M=F(1, 2), R_mbs=F(3), R_sbs=F(0))
    assert p.to_json_dict() == {"M": "1/2", "R_mbs": "3", "R_sbs": "0"}


class TestLowerConvexEnvelope:
    def test_collinear_keeps_endpoints_only(self):
        pts = [(F(m), F(20 - m)) for m in (0, 4, 8, 12, 16)]
        assert lower_convex_envelope(pts) == [(F(0), F(20)), (F(16), F(4))]

    def test_already_convex_kept(self):
        pts = [(F(0), F(4)), (F(1), F(1)), (F(2), F(1))]
        assert lower_convex_envelope(pts) == pts

    def test_interior_point_above_chord_dropped(self):
        pts = [(F(0), F(4)), (F(1), F(7, 2)), (F(2), F(1))]
        assert lower_convex_envelope(pts) == [(F(0), F(4)), (F(2), F(1))]

    def test_empty_errors(self):
        with pytest.raises(ValueError, match="no points"):
            lower_convex_envelope([])

    @given(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 40)), min_size=1, max_size=12))
    def test_envelope_is_convex_and_below_inputs(self, raw):
        pts = [(F(m), F(r)) for m, r in raw]
        hull = lower_convex_envelope(pts)
        slopes = [(r1 - r0) / (m1 - m0) for (m0, r0), (m1, r1) in zip(hull, hull[1:])]
        assert all(s0 < s1 for s0, s1 in zip(slopes, slopes[1:]))
        for m, r in pts:
            if m >= hull[0][0]:
                assert envelope_value(hull, m) <= r


def test_envelope_value_interpolates_and_extends_flat():
    hull = [(F(0), F(4)), (F(2), F(1))]
    assert envelope_value(hull, F(1)) == F(5, 2)
    assert envelope_value(hull, F(5)) == F(1)
    with pytest.raises(ValueError):
        envelope_value(hull, F(-1))
