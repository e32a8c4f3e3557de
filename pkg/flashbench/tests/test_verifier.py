# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

from fractions import Fraction
import math

from hypothesis import given, settings
import hypothesis.strategies as st
import numpy as np
import pytest

from flashbench import verifier
from flashbench.core import (
    PAIRS,
    SETTINGS,
    Color,
    feature_i_fraction,
    same_color_fraction,
    tally,
)
from flashbench.models import (
    ALL_INSTRUCTION_SETS,
    IndependentCoinsModel,
    InstructionSet,
    MicrosettingModel,
    MixtureModel,
    QuantumReference,
    generate_compliant_model,
    microsetting_respond,
    worked_example_model,
)
from flashbench.referee import ExperimentConfig, run_experiment
from flashbench.specs import load_model_spec
from flashbench.verifier import (
    FULLY_COLLAPSED,
    TWO_TYPE,
    VIOLATION,
    ComplianceError,
    check_feature_i_exact,
    coexistence_partition,
    collapse_analysis,
    derive_effective_instruction_set,
    enumerate_instruction_sets,
    exact_same_fraction,
    expected_table,
    incompatibility_certificate,
    min_same_fraction_over_mixtures,
    mixture_same_fraction,
)

R, G = Color.R, Color.G
FIVE_NINTHS = Fraction(5, 9)


def random_model(seed, **kwargs):
    rng = np.random.default_rng(seed)
    sizes = (int(rng.integers(1, 5)), int(rng.integers(1, 7)))
    return generate_compliant_model(sizes, rng, **kwargs)


def planted_violation():
    return load_model_spec('planted-violation').build()


def test_enumeration():
    rows = enumerate_instruction_sets()
    assert len(rows) == 8
    for row in rows:
        assert row.same_fraction.is_exact
        if row.pure:
            assert row.same_fraction == 1
        else:
            assert row.same_fraction == FIVE_NINTHS


def test_mixture_bound():
    bound = min_same_fraction_over_mixtures()
    assert bound.minimum == FIVE_NINTHS
    assert len(bound.minimizers) == 6
    assert all(not s.is_pure for s in bound.minimizers)


@given(st.lists(st.integers(0, 50), min_size=8, max_size=8).filter(any))
@settings(derandomize=True, max_examples=1000)
def test_no_mixture_goes_below_five_ninths(raw):
    total = sum(raw)
    weights = {s: Fraction(w, total) for s, w in zip(ALL_INSTRUCTION_SETS, raw)}
    assert mixture_same_fraction(weights) >= FIVE_NINTHS


def test_certificate():
    cert = incompatibility_certificate()
    assert cert.bound == FIVE_NINTHS
    assert cert.target == Fraction(1, 2)
    assert cert.gap == Fraction(1, 18)
    assert cert.contradiction
    assert cert.steps


def test_worked_example():
    m = worked_example_model()
    assert check_feature_i_exact(m) is True
    assert derive_effective_instruction_set(m, 't-flip') == InstructionSet.parse('RGG')
    assert derive_effective_instruction_set(m, 't-plain') == InstructionSet.parse('GGR')
    assert exact_same_fraction(m) == FIVE_NINTHS

    report = collapse_analysis(m)
    assert report.verdict == TWO_TYPE
    assert report.settings[1].verdict == TWO_TYPE
    assert report.settings[2].verdict == FULLY_COLLAPSED
    assert report.settings[1].colors == {'I': G, 'II': R}
    assert report.effective_distribution == {
        InstructionSet.parse('GGR'): Fraction(1, 2),
        InstructionSet.parse('RGG'): Fraction(1, 2),
    }


def test_worked_example_partition():
    partition = coexistence_partition(worked_example_model())
    assert partition.count(1) == 2
    assert partition.count(2) == 1
    first = partition.components[1][0]
    assert first.members_a == ('A1-I',)
    assert first.members_b == ('B1-I',)
    assert partition.unreachable[2] == {'A': ('A2-II',), 'B': ('B2-II',)}
    assert not any(partition.full_support.values())


def test_partition_without_colours():
    partition = coexistence_partition(worked_example_model(), use_colors=False)
    assert [c.type for c in partition.components[3]] == ['I', 'II']
    assert all(c.color is None for c in partition.components[3])


def test_planted_violation():
    m = planted_violation()
    witness = check_feature_i_exact(m)
    assert witness.setting == 2
    assert witness.tau == 't-flip'
    assert (witness.micro_a, witness.micro_b) == ('A2-II', 'B2-I')
    assert (witness.color_a, witness.color_b) == (R, G)

    report = collapse_analysis(m)
    assert report.verdict == VIOLATION
    assert not report.compliant
    assert report.settings[2].witness == witness
    assert report.effective_sets == {}
    with pytest.raises(ComplianceError) as e:
        exact_same_fraction(m)
    assert e.value.witness == witness
    with pytest.raises(ComplianceError):
        derive_effective_instruction_set(m, 't-plain')


def test_zero_weight_condition_is_ignored_but_not_derivable():
    m = planted_violation()
    quiet = MicrosettingModel(
        m.micro_sets, m.select, m.color_map, [('t-plain', 1), ('t-flip', 0)]
    )
    assert check_feature_i_exact(quiet) is True
    assert exact_same_fraction(quiet) == FIVE_NINTHS
    assert collapse_analysis(quiet).compliant
    with pytest.raises(ComplianceError):
        derive_effective_instruction_set(quiet, 't-flip')


@pytest.mark.parametrize('seed', range(200))
def test_generated_models_collapse(seed):
    m = random_model(seed)
    report = collapse_analysis(m)
    assert report.compliant
    for s in SETTINGS:
        verdict = report.settings[s]
        if verdict.verdict == FULLY_COLLAPSED:
            assert report.partition.count(s) == 1
        else:
            assert verdict.verdict == TWO_TYPE
            assert report.partition.count(s) > 1
        if verdict.full_support:
            assert verdict.verdict == FULLY_COLLAPSED
        assert set(verdict.colors) <= {'I', 'II'}
        if 'II' in verdict.colors:
            assert verdict.colors['I'] is verdict.colors['II'].opposite


@pytest.mark.parametrize('seed', range(200))
def test_full_support_forces_full_collapse(seed):
    rng = np.random.default_rng(1000 + seed)
    m = generate_compliant_model((int(rng.integers(1, 4)), 1), rng, full_support=True)
    report = collapse_analysis(m)
    assert report.verdict == FULLY_COLLAPSED
    assert all(v.full_support for v in report.settings.values())
    assert len(report.effective_distribution) == 1


@pytest.mark.parametrize('seed', range(50))
def test_more_coexistence_never_adds_components(seed):
    m = random_model(seed)
    before = coexistence_partition(m, use_colors=False)
    first, last = m.ambient.taus[0], m.ambient.taus[-1]
    ambient = [(tau, w / 2) for tau, w in m.ambient.items()] + [('extra', Fraction(1, 2))]
    select = {w: dict(m.select[w]) for w in 'AB'}
    for s in SETTINGS:
        select['A'][(s, 'extra')] = m.select['A'][(s, first)]
        select['B'][(s, 'extra')] = m.select['B'][(s, last)]
    wider = MicrosettingModel(m.micro_sets, select, m.color_map, ambient)
    after = coexistence_partition(wider, use_colors=False)
    for s in SETTINGS:
        assert after.count(s) <= before.count(s)


@pytest.mark.parametrize('seed', range(20))
def test_stationary_models_act_as_one_set(seed):
    report = collapse_analysis(random_model(seed, stationary=True))
    assert len(report.effective_distribution) == 1


def test_effective_sets_reproduce_every_model():
    for seed in range(500):
        m = random_model(seed)
        distribution = collapse_analysis(m).effective_distribution
        assert expected_table(m) == expected_table(MixtureModel(distribution))
        assert exact_same_fraction(m) == mixture_same_fraction(distribution)
        assert exact_same_fraction(m) >= FIVE_NINTHS


def test_effective_sets_answer_every_pair():
    for seed in range(500):
        m = random_model(seed)
        for tau in m.ambient.support():
            iset = derive_effective_instruction_set(m, tau)
            for pair in PAIRS:
                assert microsetting_respond(m, 'A', pair.a, tau) is iset.color(pair.a)
                assert microsetting_respond(m, 'B', pair.b, tau) is iset.color(pair.b)


@pytest.mark.parametrize('seed', range(50))
def test_respond_is_select_then_color(seed):
    m = random_model(seed)
    for tau in m.ambient.taus:
        for wing in 'AB':
            for s in SETTINGS:
                mu = m.select[wing][(s, tau)]
                assert microsetting_respond(m, wing, s, tau) is m.color_map[wing][mu]


def test_compliance_is_checked_once(monkeypatch):
    m = generate_compliant_model((4, 3000), np.random.default_rng(8))
    calls = []

    def counted(model):
        calls.append(model)
        return check_feature_i_exact(model)

    monkeypatch.setattr(verifier, 'check_feature_i_exact', counted)
    fraction = exact_same_fraction(m)
    assert len(calls) == 1
    distribution = collapse_analysis(m).effective_distribution
    assert fraction == mixture_same_fraction(distribution)


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_generated_models_simulate_above_bound(seed):
    n = 100000
    m = random_model(seed)
    t = tally(run_experiment(ExperimentConfig(n, seed, m)))
    assert feature_i_fraction(t) == 1
    estimate = float(same_color_fraction(t))
    exact = float(exact_same_fraction(m))
    sigma = math.sqrt(max(exact * (1 - exact), 0.01) / n)
    assert abs(estimate - exact) <= 4 * sigma
    assert estimate >= 5 / 9 - 4 * sigma


def test_expected_tables():
    singlet = expected_table(QuantumReference())
    assert same_color_fraction(singlet) == Fraction(1, 2)
    assert feature_i_fraction(singlet) == 1

    coins = expected_table(IndependentCoinsModel())
    assert same_color_fraction(coins) == Fraction(1, 2)
    assert feature_i_fraction(coins) == Fraction(1, 2)

    assert same_color_fraction(expected_table('GGR')) == FIVE_NINTHS
    with pytest.raises(TypeError):
        expected_table(object())
