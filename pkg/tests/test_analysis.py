"""Tradeoff bounds, design benchmarking, and exponent-region math."""

import json
import math
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgc.analysis import (EXPONENT_CSV_HEADER, TRADEOFF_CSV_HEADER,
                          ParameterRegimeWarning, ceil_rational_power,
                          check_nominal_bounds, check_realized_bounds,
                          compare_designs, complete_tradeoff_point,
                          cutset_max_M, exponent_csv, exponent_json,
                          exponent_point, exponent_region_membership,
                          format_fraction, integer_root, msr_mbr_points,
                          realized_point, regime_threshold, sweep_tradeoff,
                          timesharing_M, tradeoff_csv, tradeoff_json)
from rgc.construction import derive_params
from rgc.designs import gen_complete_design, gen_steiner_triple

F = Fraction


def test_cutset_saturates_at_high_storage():
    # alpha_bar >= d makes every cut term d - i
    assert cutset_max_M(9, 7, 8, F(8)) == F(35)
    assert cutset_max_M(9, 7, 8, F(2)) == F(2 + 2 + 2 + 2 + 2 + 2 + 2)
    assert cutset_max_M(9, 7, 8, F(4)) == F(4 + 4 + 4 + 4 + 4 + 3 + 2)


def test_extreme_points():
    msr, mbr = msr_mbr_points(24, 23, 23)
    assert (msr.alpha_bar, msr.M_bar) == (F(1), F(23))
    assert (mbr.alpha_bar, mbr.M_bar) == (F(23), F(276))
    assert msr.provenance == mbr.provenance == "bound"


def test_timesharing_segment():
    assert timesharing_M(9, 7, 8, F(4)) == F(21)
    assert timesharing_M(9, 7, 8, F(2)) == F(14)     # MSR endpoint
    assert timesharing_M(9, 7, 8, F(8)) == F(35)     # MBR endpoint
    with pytest.raises(ValueError):
        timesharing_M(9, 7, 8, F(1))
    with pytest.raises(ValueError):
        timesharing_M(9, 7, 8, F(9))


def test_regime_threshold_and_warning():
    assert regime_threshold(9, 7, 8) == F(5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        complete_tradeoff_point(9, 7, 8, 5)    # at threshold: quiet
    with pytest.warns(ParameterRegimeWarning):
        complete_tradeoff_point(9, 7, 8, 6)


def test_sweep_has_endpoint_rows():
    rows = sweep_tradeoff(9, 7, 8)
    tail = [row for row in rows if row.r is None]
    assert len(tail) == 2
    assert {row.point.provenance for row in tail} == {"timesharing"}
    assert all(row.point.provenance == "constructed"
               for row in rows if row.r is not None)


def test_realized_point_on_derived_params():
    p = derive_params(gen_steiner_triple(9), 7)
    point = realized_point(p)
    assert (point.alpha_bar, point.M_bar) == (F(4), F(23))
    p2 = derive_params(gen_complete_design(3, 4, 7), 4)
    point2 = realized_point(p2)
    # normalization follows repair volume, not the block parameter
    assert point2.alpha_bar == F(p2.alpha * p2.d, p2.gamma)
    assert point2.M_bar == F(p2.M * p2.d, p2.gamma)


def test_compare_strict_when_deficits_vary():
    rep = compare_designs(gen_steiner_triple(9),
                          gen_complete_design(2, 3, 9), 6)
    assert rep.M_bar_design == F(21)
    assert rep.M_bar_complete == F(148, 7)
    assert not rep.equal
    assert not rep.deficit_uniform
    assert rep.M_bar_design < rep.M_bar_complete


def test_compare_validates_inputs():
    with pytest.raises(ValueError):
        compare_designs(gen_steiner_triple(9), gen_steiner_triple(9), 7)
    with pytest.raises(ValueError):
        compare_designs(gen_steiner_triple(7),
                        gen_complete_design(2, 3, 9), 5)


@given(st.integers(0, 10 ** 12), st.integers(1, 6))
@settings(max_examples=80, deadline=None)
def test_integer_root_bounds(x, s):
    root = integer_root(x, s)
    assert root ** s <= x < (root + 1) ** s


@given(st.integers(2, 500), st.integers(1, 7), st.integers(2, 8))
@settings(max_examples=80, deadline=None)
def test_ceil_power_is_exact(n, p, s):
    if p >= s:
        return
    r = ceil_rational_power(n, F(p, s))
    assert (r - 1) ** s < n ** p <= r ** s


def test_exponent_point_sample_values():
    point = exponent_point(100, 2, 1, F(2, 3))
    assert point.r == 22
    assert point.alpha_bar == F(33, 7)
    assert point.M_bar == F(449)
    member = exponent_region_membership(point.Er, point.Ed)
    assert member.achievable == "inside"


def test_exponent_point_validation():
    with pytest.raises(ValueError):
        exponent_point(100, 1, 2, F(1, 2))    # tau1 < tau2
    with pytest.raises(ValueError):
        exponent_point(100, 1, 1, F(3, 2))    # epsilon outside (0,1)
    with pytest.raises(ValueError):
        exponent_point(8, 7, 7, F(1, 2))      # k would vanish


def test_realized_bound_pair_meets_at_matched_taus():
    for n in (50, 100, 200):
        r = ceil_rational_power(n, F(1, 2))
        check = check_realized_bounds(n, 1, 1, r)
        assert check.ineq1 and check.ineq2
        assert check.lhs1 == check.rhs1
        assert check.lhs2 == check.rhs2


def test_nominal_bounds_exact_algebraic_sign():
    # integer n^eps: both literal bounds hold
    check = check_nominal_bounds(256, 1, 1, F(1, 2))
    assert check.ineq1 and check.ineq2
    # irrational n^eps: storage bound cannot survive the ceiling
    check = check_nominal_bounds(128, 1, 1, F(1, 2))
    assert not check.ineq1
    assert check.ineq2
    # quadratic-irrational branch: c = 2^(7/2), c^2 rational
    check = check_nominal_bounds(128, 2, 1, F(1, 2))
    assert check.ineq2


def test_region_membership_classification():
    on_edge = exponent_region_membership(F(1), F(3, 2))
    assert on_edge.achievable == "boundary"
    assert on_edge.tight == ("2Ed<=2+Er",)
    assert on_edge.timesharing == "outside"

    inside = exponent_region_membership(F(1, 2), F(1, 2))
    assert inside.achievable == "inside"
    assert inside.timesharing == "inside"

    outside = exponent_region_membership(F(1), F(21, 10))
    assert outside.achievable == "outside"

    corner = exponent_region_membership(F(2), F(2))
    assert corner.achievable == "boundary"
    assert set(corner.tight) == {"2Ed<=2+Er", "Ed<=2"}


def test_repair_exponent_approaches_its_limit():
    """Er drifts toward 2 - 2*eps; the ceiling makes it non-monotone,
    so assert net progress plus a tight final error."""
    for eps in (F(1, 4), F(1, 2), F(3, 4)):
        target = 2 - 2 * float(eps)
        errs = [abs(exponent_point(n, 1, 1, eps).Er - target)
                for n in (50, 100, 200, 400)]
        assert errs[-1] < errs[0]
        assert errs[-1] < 0.01


def test_csv_and_json_emitters():
    rows = sweep_tradeoff(9, 7, 8)
    csv = tradeoff_csv(rows)
    lines = csv.strip().split("\n")
    assert lines[0] == TRADEOFF_CSV_HEADER
    assert len(lines) == len(rows) + 1
    assert "9,7,8,5,2,1,67,5,14,14,0" in lines
    doc = tradeoff_json(rows)
    assert len(doc) == len(rows)
    assert doc[1]["r"] == 3 and doc[1]["above_timesharing"] is True
    json.dumps(doc)   # must be serializable as-is

    entries = []
    for n in (64, 128):
        point = exponent_point(n, 1, 1, F(1, 2))
        entries.append((point,
                        exponent_region_membership(point.Er, point.Ed)))
    ecsv = exponent_csv(entries)
    elines = ecsv.strip().split("\n")
    assert elines[0] == EXPONENT_CSV_HEADER
    assert len(elines) == 3
    json.dumps(exponent_json(entries))


def test_fraction_formatting():
    assert format_fraction(F(67, 5)) == "67/5"
    assert format_fraction(F(4)) == "4"
    assert format_fraction(7) == "7"
