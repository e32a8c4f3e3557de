# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

from fractions import Fraction
import math

from hypothesis import given, settings
import hypothesis.strategies as st
import pytest

from flashbench.core import (
    OUTCOMES,
    PAIRS,
    UNDEFINED,
    Color,
    EmptyDataError,
    OutcomePair,
    Probability,
    RunRecord,
    SettingPair,
    TallyTable,
    feature_i_fraction,
    per_pair_grid,
    per_pair_same_table,
    same_color_fraction,
    tally,
    wilson_interval,
)

R, G = Color.R, Color.G

records = st.lists(
    st.builds(
        RunRecord,
        st.integers(0, 10 ** 6),
        st.sampled_from(PAIRS),
        st.sampled_from(OUTCOMES),
    ),
    max_size=60,
)


def run(trial, a, b, ca, cb):
    return RunRecord(trial, SettingPair(a, b), OutcomePair(ca, cb))


def hand_wilson(k, n, z):
    p = k / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return center - half, center + half


def test_empty_tally():
    t = tally([])
    assert t.total == 0
    with pytest.raises(EmptyDataError):
        same_color_fraction(t)
    with pytest.raises(EmptyDataError):
        feature_i_fraction(t)
    assert all(p is UNDEFINED for p in per_pair_same_table(t).values())


def test_single_run():
    t = tally([run(0, 1, 2, R, R)])
    assert t.total == 1
    assert t.count(SettingPair(1, 2), OutcomePair(R, R)) == 1
    assert same_color_fraction(t) == 1
    with pytest.raises(EmptyDataError):
        feature_i_fraction(t)
    table = per_pair_same_table(t)
    assert table[SettingPair(1, 2)] == 1
    assert table[SettingPair(2, 1)] is UNDEFINED


def test_fractions_are_exact_and_reduced():
    t = tally(
        [
            run(0, 1, 1, R, R),
            run(1, 2, 2, G, G),
            run(2, 1, 3, R, G),
            run(3, 3, 1, G, G),
        ]
    )
    same = same_color_fraction(t)
    assert same.is_exact
    assert same.value == Fraction(3, 4)
    assert same.n == 4
    assert feature_i_fraction(t) == 1
    assert feature_i_fraction(t).n == 2


def test_feature_i_only_counts_equal_settings():
    t = tally([run(0, 1, 1, R, G), run(1, 2, 3, R, R), run(2, 3, 3, G, G)])
    assert feature_i_fraction(t).value == Fraction(1, 2)


def test_per_pair_grid_layout():
    t = tally([run(0, 2, 3, R, G)])
    grid = per_pair_grid(per_pair_same_table(t))
    assert grid[1][2] == 0
    assert grid[2][1] is UNDEFINED


@given(records)
@settings(derandomize=True, max_examples=200)
def test_per_pair_recombines_to_overall(runs):
    t = tally(runs)
    if not t.total:
        return
    table = per_pair_same_table(t)
    weighted = sum(
        (table[p].value * t.pair_total(p) for p in PAIRS if table[p] is not UNDEFINED),
        Fraction(0),
    )
    assert weighted / t.total == same_color_fraction(t).value


@given(records, records, records)
@settings(derandomize=True, max_examples=100)
def test_merge_is_tally_of_concatenation(x, y, z):
    assert tally(x).merge(tally(y)) == tally(x + y)
    assert (tally(x) + tally(y)) + tally(z) == tally(x) + (tally(y) + tally(z))


def test_add_returns_new_table():
    t = tally([])
    t2 = t.add(run(0, 3, 3, G, G))
    assert t.total == 0
    assert t2.total == 1


def test_table_rejects_bad_counts():
    with pytest.raises(ValueError):
        TallyTable({(SettingPair(1, 1), OutcomePair(R, R)): -1})
    with pytest.raises(ValueError):
        TallyTable({(SettingPair(1, 4), OutcomePair(R, R)): 1})


def test_expectation_table():
    cell = (SettingPair(1, 1), OutcomePair(R, R))
    t = TallyTable.expected({cell: 1})
    assert t.is_expectation
    assert same_color_fraction(t).n is None
    with pytest.raises(ValueError):
        TallyTable.expected({cell: Fraction(1, 2)})
    with pytest.raises(TypeError):
        t.add(run(0, 1, 1, R, R))


def test_probability_kinds_do_not_mix():
    exact = Probability(Fraction(1, 2))
    estimate = Probability(0.5, n=10)
    assert exact.is_exact and not estimate.is_exact
    with pytest.raises(TypeError):
        exact == estimate
    with pytest.raises(ValueError):
        Probability(0.5)
    with pytest.raises(ValueError):
        Probability(Fraction(3, 2))
    assert exact == Fraction(1, 2)


def test_undefined_is_not_ordered():
    with pytest.raises(TypeError):
        UNDEFINED < 1
    assert not UNDEFINED


@pytest.mark.parametrize(
    'k,n,z',
    [(1, 2, 1.96), (7, 10, 1.96), (5000, 10000, 1.96), (37, 111, 2.5), (1, 9, 1.0)],
)
def test_wilson_matches_closed_form(k, n, z):
    lower, upper = wilson_interval(k, n, z)
    expected = hand_wilson(k, n, z)
    assert lower == pytest.approx(expected[0], abs=1e-12)
    assert upper == pytest.approx(expected[1], abs=1e-12)


@pytest.mark.parametrize('z', [37.5, 38, 40, 60])
def test_wilson_with_very_large_z(z):
    lower, upper = wilson_interval(50, 100, z)
    expected = hand_wilson(50, 100, z)
    assert lower == pytest.approx(expected[0], abs=1e-7)
    assert upper == pytest.approx(expected[1], abs=1e-7)
    assert 0 < lower < 0.5 < upper < 1


def test_wilson_at_z_38():
    lower, upper = wilson_interval(50, 100, z=38)
    assert lower == pytest.approx(0.01646, abs=1e-5)
    assert upper == pytest.approx(0.98354, abs=1e-5)


def test_wilson_edges():
    lower, upper = wilson_interval(0, 20)
    assert lower == 0.0
    assert upper == pytest.approx(hand_wilson(0, 20, 1.96)[1], abs=1e-12)
    lower, upper = wilson_interval(20, 20)
    assert upper == 1.0
    with pytest.raises(EmptyDataError):
        wilson_interval(0, 0)
    with pytest.raises(ValueError):
        wilson_interval(5, 4)
    with pytest.raises(ValueError):
        wilson_interval(1, 4, z=0)


@given(st.integers(1, 500), st.data())
@settings(derandomize=True, max_examples=200)
def test_wilson_is_monotone(n, data):
    k = data.draw(st.integers(0, n - 1))
    lo1, hi1 = wilson_interval(k, n)
    lo2, hi2 = wilson_interval(k + 1, n)
    assert lo1 <= lo2 and hi1 <= hi2
    assert 0.0 <= lo1 <= k / n <= hi1 <= 1.0
    # same proportion, twice the runs
    lo3, hi3 = wilson_interval(2 * k, 2 * n)
    assert hi3 - lo3 < hi1 - lo1
