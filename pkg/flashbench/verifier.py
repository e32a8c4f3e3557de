# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""Exact analysis of instruction sets and microsetting models.

All arithmetic here is on ``Fraction``s. Every setting pair has weight
1/9 and only ambient conditions with positive weight (the support) ever
constrain anything.
"""

from collections import namedtuple
from fractions import Fraction

import networkx as nx

from .core import (
    PAIRS,
    SETTINGS,
    WINGS,
    Color,
    OutcomePair,
    Probability,
    TallyTable,
)
from .log import log
from .models import (
    ALL_INSTRUCTION_SETS,
    IndependentCoinsModel,
    InstructionSet,
    InstructionSetModel,
    JointModel,
    MicrosettingModel,
    MixtureModel,
    QuantumJointTable,
    check_distribution,
    microsetting_respond,
)

PAIR_WEIGHT = Fraction(1, len(PAIRS))
FEATURE_II_TARGET = Fraction(1, 2)

EnumerationRow = namedtuple('EnumerationRow', 'set same_fraction pure')
MixtureBound = namedtuple('MixtureBound', 'minimum minimizers vertices argument')
ComplianceWitness = namedtuple(
    'ComplianceWitness', 'setting tau micro_a micro_b color_a color_b'
)
Component = namedtuple('Component', 'setting type members_a members_b color conflict')
SettingVerdict = namedtuple('SettingVerdict', 'setting verdict colors witness full_support')
IncompatibilityCertificate = namedtuple(
    'IncompatibilityCertificate', 'bound target gap minimizers steps contradiction'
)

FULLY_COLLAPSED = 'fully-collapsed'
TWO_TYPE = 'two-type'
VIOLATION = 'violation'


class ComplianceError(Exception):
    """The model does not give equal colours at equal settings."""

    def __init__(self, witness):
        super(ComplianceError, self).__init__(
            'wings disagree at setting %d under ambient %r (%s flashes %s, %s flashes %s)'
            % (
                witness.setting,
                witness.tau,
                witness.micro_a,
                witness.color_a,
                witness.micro_b,
                witness.color_b,
            )
        )
        self.witness = witness


def _tau_order(tau):
    return str(tau)


def instruction_set_same_fraction(iset):
    iset = InstructionSet.parse(iset)
    agree = sum(1 for p in PAIRS if iset.color(p.a) is iset.color(p.b))
    return Fraction(agree, len(PAIRS))


def enumerate_instruction_sets():
    return [
        EnumerationRow(s, Probability(instruction_set_same_fraction(s)), s.is_pure)
        for s in ALL_INSTRUCTION_SETS
    ]


def mixture_same_fraction(weights):
    weights = check_distribution(weights)
    return sum(
        (w * instruction_set_same_fraction(s) for s, w in weights.items()), Fraction(0)
    )


def min_same_fraction_over_mixtures():
    """Least same-colour fraction any mixture of instruction sets can give.

    The fraction is linear in the mixture weights, so over the simplex it
    is smallest at a vertex, i.e. at a single instruction set.
    """
    vertices = {row.set: row.same_fraction.value for row in enumerate_instruction_sets()}
    minimum = min(vertices.values())
    minimizers = tuple(s for s, v in vertices.items() if v == minimum)
    argument = [
        'same-colour fraction of a mixture = sum of weight x vertex fraction',
        'a linear function on the simplex of weights is minimised at a vertex',
        'least vertex fraction is %s, reached by %s'
        % (minimum, ', '.join(str(s) for s in minimizers)),
    ]
    return MixtureBound(Probability(minimum), minimizers, vertices, argument)


def _wing_colors(m, setting, tau):
    return (
        microsetting_respond(m, 'A', setting, tau),
        microsetting_respond(m, 'B', setting, tau),
    )


def _witness(m, setting, tau):
    ca, cb = _wing_colors(m, setting, tau)
    return ComplianceWitness(
        setting,
        tau,
        m.select['A'][(setting, tau)],
        m.select['B'][(setting, tau)],
        ca,
        cb,
    )


def check_feature_i_exact(m):
    """``True`` if equal settings always agree, else the first witness.

    Witnesses are ordered by setting, then by ambient condition.
    """
    support = sorted(m.ambient.support(), key=_tau_order)
    for s in SETTINGS:
        for tau in support:
            ca, cb = _wing_colors(m, s, tau)
            if ca is not cb:
                return _witness(m, s, tau)
    return True


class CoexistencePartition(object):
    """Connected components of the per-setting coexistence graphs.

    ``components[s]`` lists the components for setting ``s``, the one
    holding the smallest reachable wing-A microsetting first.
    ``unreachable[s]`` maps each wing to microsettings no condition in
    the support selects. ``full_support[s]`` says whether every declared
    pair of microsettings co-occurs.
    """

    def __init__(self, components, unreachable, full_support):
        self.components = components
        self.unreachable = unreachable
        self.full_support = full_support

    def count(self, setting):
        return len(self.components[setting])


def _coexistence_graph(m, setting, support):
    g = nx.Graph()
    for tau in support:
        a = ('A', m.select['A'][(setting, tau)])
        b = ('B', m.select['B'][(setting, tau)])
        if g.has_edge(a, b):
            g.edges[a, b]['taus'].append(tau)
        else:
            g.add_edge(a, b, taus=[tau])
    return g


def coexistence_partition(m, use_colors=True):
    support = sorted(m.ambient.support(), key=_tau_order)
    components = {}
    unreachable = {}
    full_support = {}
    for s in SETTINGS:
        g = _coexistence_graph(m, s, support)
        raw = []
        for nodes in nx.connected_components(g):
            members_a = sorted(mu for w, mu in nodes if w == 'A')
            members_b = sorted(mu for w, mu in nodes if w == 'B')
            color = conflict = None
            if use_colors:
                colors = {m.color_map[w][mu] for w, mu in nodes}
                if len(colors) == 1:
                    color = colors.pop()
                else:
                    edge_taus = sorted(
                        (
                            tau
                            for u, v, taus in g.subgraph(nodes).edges(data='taus')
                            for tau in taus
                        ),
                        key=_tau_order,
                    )
                    for tau in edge_taus:
                        candidate = _witness(m, s, tau)
                        if candidate.color_a is not candidate.color_b:
                            conflict = candidate
                            break
            raw.append((members_a, members_b, color, conflict))
        raw.sort(key=lambda c: c[0][0])

        type_one = next((c[2] for c in raw if c[2] is not None), None)
        comps = []
        for index, (members_a, members_b, color, conflict) in enumerate(raw):
            if not use_colors:
                label = 'I' if index == 0 else 'II'
            elif conflict is not None:
                label = None
            else:
                label = 'I' if color is type_one else 'II'
            comps.append(
                Component(s, label, tuple(members_a), tuple(members_b), color, conflict)
            )
        components[s] = comps

        reached = {w: {mu for x, mu in g.nodes if x == w} for w in WINGS}
        unreachable[s] = {
            w: tuple(mu for mu in m.micro_sets[(w, s)] if mu not in reached[w])
            for w in WINGS
        }
        full_support[s] = all(
            g.has_edge(('A', a), ('B', b))
            for a in m.micro_sets[('A', s)]
            for b in m.micro_sets[('B', s)]
        )
        log.debug('Setting %d: %d coexistence component(s)', s, len(comps))
    return CoexistencePartition(components, unreachable, full_support)


class CollapseReport(object):
    """What feature (i) leaves of a microsetting model.

    ``verdict`` is the worst verdict over the three settings. When the
    model is compliant, ``effective_sets`` maps each ambient condition
    in the support to its plain instruction set and
    ``effective_distribution`` gives the weight of each such set.
    """

    def __init__(self, settings, verdict, witness, effective_sets, distribution, partition):
        self.settings = settings
        self.verdict = verdict
        self.witness = witness
        self.effective_sets = effective_sets
        self.effective_distribution = distribution
        self.partition = partition

    @property
    def compliant(self):
        return self.verdict != VIOLATION


def collapse_analysis(m):
    partition = coexistence_partition(m)
    settings = {}
    for s in SETTINGS:
        comps = partition.components[s]
        conflicts = [c.conflict for c in comps if c.conflict is not None]
        colors = {}
        for c in comps:
            if c.type is not None:
                colors[c.type] = c.color
        if conflicts:
            verdict = VIOLATION
            witness = min(conflicts, key=lambda w: _tau_order(w.tau))
        elif len(comps) == 1:
            verdict, witness = FULLY_COLLAPSED, None
        else:
            verdict, witness = TWO_TYPE, None
        settings[s] = SettingVerdict(s, verdict, colors, witness, partition.full_support[s])

    verdicts = {v.verdict for v in settings.values()}
    if VIOLATION in verdicts:
        overall = VIOLATION
    elif verdicts == {FULLY_COLLAPSED}:
        overall = FULLY_COLLAPSED
    else:
        overall = TWO_TYPE

    witness = None
    effective_sets = {}
    distribution = {}
    if overall == VIOLATION:
        witness = check_feature_i_exact(m)
    else:
        for tau in sorted(m.ambient.support(), key=_tau_order):
            iset = InstructionSet(*(_wing_colors(m, s, tau)[0] for s in SETTINGS))
            effective_sets[tau] = iset
            distribution[iset] = distribution.get(iset, Fraction(0)) + m.ambient.weight(tau)
    log.info('Collapse analysis: %s', overall)
    return CollapseReport(settings, overall, witness, effective_sets, distribution, partition)


def _require_compliant(m):
    result = check_feature_i_exact(m)
    if result is not True:
        raise ComplianceError(result)


def _effective_set(m, tau):
    colors = []
    for s in SETTINGS:
        ca, cb = _wing_colors(m, s, tau)
        if ca is not cb:
            # Only possible for a condition outside the support.
            raise ComplianceError(_witness(m, s, tau))
        colors.append(ca)
    return InstructionSet(*colors)


def derive_effective_instruction_set(m, tau):
    """The plain instruction set ``m`` behaves as under condition ``tau``."""
    _require_compliant(m)
    return _effective_set(m, tau)


def exact_same_fraction(m):
    _require_compliant(m)
    total = Fraction(0)
    for tau in m.ambient.support():
        iset = _effective_set(m, tau)
        total += m.ambient.weight(tau) * instruction_set_same_fraction(iset)
    return Probability(total)


def incompatibility_certificate():
    """Why no instruction-set model has both features, with exact numbers."""
    bound = min_same_fraction_over_mixtures()
    mixed = instruction_set_same_fraction('GGR')
    pure = instruction_set_same_fraction('RRR')
    gap = bound.minimum.value - FEATURE_II_TARGET
    steps = [
        'feature (i) without communication: both particles carry the same'
        ' instruction set in every run',
        'a set using both colours agrees on 5 of the 9 equally likely setting'
        ' pairs: %s' % mixed,
        'RRR and GGG agree on every pair: %s' % pure,
    ]
    steps.extend(bound.argument)
    steps.extend(
        [
            'any distribution of sets, even one chosen run by run from earlier'
            ' data, flashes the same colour at least %s of the time' % bound.minimum,
            'feature (ii) requires exactly %s' % FEATURE_II_TARGET,
            '%s - %s = %s > 0: no instruction-set model has both features'
            % (bound.minimum, FEATURE_II_TARGET, gap),
        ]
    )
    return IncompatibilityCertificate(
        bound.minimum,
        Probability(FEATURE_II_TARGET),
        gap,
        bound.minimizers,
        steps,
        gap > 0,
    )


def _instruction_masses(weights):
    masses = {}
    for iset, w in weights.items():
        if not w:
            continue
        for p in PAIRS:
            key = (p, OutcomePair(iset.color(p.a), iset.color(p.b)))
            masses[key] = masses.get(key, Fraction(0)) + w * PAIR_WEIGHT
    return masses


def expected_table(model):
    """Exact expectation ``TallyTable`` of a model under uniform settings."""
    if isinstance(model, (InstructionSet, str)):
        model = InstructionSetModel(model)
    if isinstance(model, InstructionSetModel):
        return TallyTable.expected(_instruction_masses({model.iset: Fraction(1)}))
    if isinstance(model, MixtureModel):
        return TallyTable.expected(_instruction_masses(model.weights))
    if isinstance(model, MicrosettingModel):
        masses = {}
        for tau in model.ambient.support():
            w = model.ambient.weight(tau)
            for p in PAIRS:
                outcome = OutcomePair(
                    microsetting_respond(model, 'A', p.a, tau),
                    microsetting_respond(model, 'B', p.b, tau),
                )
                key = (p, outcome)
                masses[key] = masses.get(key, Fraction(0)) + w * PAIR_WEIGHT
        return TallyTable.expected(masses)
    if isinstance(model, IndependentCoinsModel):
        quarter = Fraction(1, 4) * PAIR_WEIGHT
        return TallyTable.expected(
            {
                (p, OutcomePair(ca, cb)): quarter
                for p in PAIRS
                for ca in Color
                for cb in Color
            }
        )
    if isinstance(model, JointModel):
        model = model.table
    if isinstance(model, QuantumJointTable):
        return TallyTable.expected(
            {
                (p, o): mass * PAIR_WEIGHT
                for p in PAIRS
                for o, mass in model.row(p).items()
            }
        )
    raise TypeError('no exact expectation for %r' % (model,))
