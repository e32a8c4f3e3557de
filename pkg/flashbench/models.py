# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""The model zoo.

Two families of models can be run by the referee:

``LocalModel``
    Prepares a hidden state at the source, then answers for one wing at a
    time. ``respond`` receives that wing's setting, the shared hidden
    state, the shared ambient condition and the wing's own randomness.
    The other wing's setting is simply not among its arguments.

``JointModel``
    Produces both colours at once from the full setting pair. The
    quantum reference and the nonlocal control are joint models; nothing
    that only accepts a ``LocalModel`` will take them.

Instruction sets are written as three letters over R and G in setting
order, so GGR flashes G for settings 1 and 2 and R for setting 3.
"""

from collections import Counter, namedtuple
from fractions import Fraction
import functools
import itertools

from .core import (
    OUTCOMES,
    PAIRS,
    SETTINGS,
    WINGS,
    Color,
    OutcomePair,
    SettingPair,
    check_setting,
    check_wing,
)
from .log import log, where
from .streams import pick


class ModelValidationError(Exception):
    def __init__(self, msg, trial=None):
        if trial is not None:
            text = '%s (%s)' % (msg, where(trial=trial))
        else:
            text = msg
        super(ModelValidationError, self).__init__(text)
        self.msg = msg
        self.trial = trial


class InstructionSet(namedtuple('InstructionSet', 'one two three')):
    """Colour to flash for settings 1, 2 and 3."""

    __slots__ = ()

    @classmethod
    def parse(cls, text):
        if isinstance(text, InstructionSet):
            return text
        text = str(text).strip().upper()
        if len(text) != 3 or set(text) - {'R', 'G'}:
            raise ValueError('instruction set must be 3 letters of R/G, got %r' % text)
        return cls(*(Color(c) for c in text))

    def color(self, setting):
        return self[check_setting(setting) - 1]

    @property
    def is_pure(self):
        return self.one is self.two is self.three

    def __str__(self):
        return ''.join(c.value for c in self)


ALL_INSTRUCTION_SETS = tuple(
    InstructionSet(*colors) for colors in itertools.product(Color, repeat=3)
)


def respond_instruction_set(iset, setting):
    return iset.color(setting)


def check_distribution(weights):
    """Normalise a ``{InstructionSet or 'GGR': weight}`` mapping.

    Weights become ``Fraction``s; they must be nonnegative and sum to
    exactly 1. The result is keyed by every set, in canonical order.
    """
    parsed = {}
    for key, weight in weights.items():
        iset = InstructionSet.parse(key)
        weight = Fraction(weight)
        if weight < 0:
            raise ModelValidationError('negative weight %s for %s' % (weight, iset))
        parsed[iset] = parsed.get(iset, Fraction(0)) + weight
    total = sum(parsed.values(), Fraction(0))
    if total != 1:
        raise ModelValidationError(
            'instruction set weights sum to %s, not 1' % total
        )
    return {iset: parsed.get(iset, Fraction(0)) for iset in ALL_INSTRUCTION_SETS}


AmbientCondition = namedtuple('AmbientCondition', 'tau weight')
RunContext = namedtuple('RunContext', 'trial ambient')


class AmbientDistribution(object):
    """A finite distribution of shared ambient conditions.

    Both wings see the same condition within one run.
    """

    def __init__(self, weights):
        if hasattr(weights, 'items'):
            weights = list(weights.items())
        else:
            weights = list(weights)
        if not weights:
            raise ModelValidationError('the ambient domain is empty')
        self.taus = tuple(tau for tau, _ in weights)
        if len(set(self.taus)) != len(self.taus):
            raise ModelValidationError('duplicate ambient conditions')
        self.weights = {}
        for tau, weight in weights:
            weight = Fraction(weight)
            if weight < 0:
                raise ModelValidationError('negative weight for ambient %r' % (tau,))
            self.weights[tau] = weight
        total = sum(self.weights.values(), Fraction(0))
        if total != 1:
            raise ModelValidationError('ambient weights sum to %s, not 1' % total)
        self._weight_list = [self.weights[tau] for tau in self.taus]

    @classmethod
    def trivial(cls):
        return cls([('t0', 1)])

    def weight(self, tau):
        return self.weights[tau]

    def support(self):
        return tuple(tau for tau in self.taus if self.weights[tau] > 0)

    def condition(self, tau):
        if tau not in self.weights:
            raise ModelValidationError('unknown ambient condition %r' % (tau,))
        return AmbientCondition(tau, self.weights[tau])

    def draw(self, uniforms):
        tau = pick(uniforms[0], self.taus, self._weight_list)
        return AmbientCondition(tau, self.weights[tau])

    def items(self):
        return [(tau, self.weights[tau]) for tau in self.taus]

    def __contains__(self, tau):
        return tau in self.weights

    def __len__(self):
        return len(self.taus)

    def __eq__(self, other):
        if not isinstance(other, AmbientDistribution):
            return NotImplemented
        return self.items() == other.items()


_TRIVIAL_AMBIENT = AmbientDistribution.trivial()


class LocalModel(object):
    """Base class for models honouring the locality contract."""

    kind = None
    ambient = _TRIVIAL_AMBIENT

    def prepare(self, context, randomness):
        """Hidden state carried by both particles; fixed for the run."""
        return None

    def respond(self, wing, setting, state, ambient, randomness):
        raise NotImplementedError


class JointModel(object):
    """Base class for models that answer for both wings at once."""

    kind = None
    ambient = _TRIVIAL_AMBIENT

    def prepare(self, context, randomness):
        return randomness

    def respond_pair(self, pair, state, ambient):
        raise NotImplementedError


class InstructionSetModel(LocalModel):
    kind = 'instruction-set'

    def __init__(self, iset):
        self.iset = InstructionSet.parse(iset)

    def prepare(self, context, randomness):
        return self.iset

    def respond(self, wing, setting, state, ambient, randomness):
        return respond_instruction_set(state, setting)

    def __repr__(self):
        return '<InstructionSetModel %s>' % (self.iset,)


class MixtureModel(LocalModel):
    """Both particles carry a set drawn from a fixed distribution."""

    kind = 'instruction-mixture'

    def __init__(self, weights):
        self.weights = check_distribution(weights)
        self._weight_list = [self.weights[s] for s in ALL_INSTRUCTION_SETS]

    def prepare(self, context, randomness):
        return pick(randomness[0], ALL_INSTRUCTION_SETS, self._weight_list)

    def respond(self, wing, setting, state, ambient, randomness):
        return respond_instruction_set(state, setting)


class IndependentCoinsModel(LocalModel):
    """Each wing tosses its own fair coin; no hidden state at all."""

    kind = 'independent-coins'

    def respond(self, wing, setting, state, ambient, randomness):
        return Color.R if randomness[0] < 0.5 else Color.G


class AdaptiveStrategy(object):
    """Chooses the instruction set distribution for the next run.

    ``next`` sees the records of completed runs only. Strategies may keep
    state between calls, so one instance serves one experiment at a time.
    """

    kind = None

    def next(self, history):
        raise NotImplementedError


class ConstantStrategy(AdaptiveStrategy):
    kind = 'constant'

    def __init__(self, weights):
        self.weights = check_distribution(weights)

    def next(self, history):
        return self.weights


class ParityStrategy(AdaptiveStrategy):
    """RRR after an even number of runs, GGG after an odd number."""

    kind = 'parity'

    _EVEN = {InstructionSet.parse('RRR'): Fraction(1)}
    _ODD = {InstructionSet.parse('GGG'): Fraction(1)}

    def next(self, history):
        return self._ODD if len(history) % 2 else self._EVEN


class GreedyStrategy(AdaptiveStrategy):
    """Plays the mixed set that would have agreed least on past settings.

    It tries as hard as it can to push the same-colour rate down using
    everything seen so far, and still cannot go below 5/9.
    """

    kind = 'greedy'

    _CANDIDATES = tuple(s for s in ALL_INSTRUCTION_SETS if not s.is_pure)

    def __init__(self):
        self._seen = Counter()
        self._consumed = 0

    def next(self, history):
        if len(history) < self._consumed:
            self._seen = Counter()
            self._consumed = 0
        for record in history[self._consumed :]:
            self._seen[record.pair] += 1
        self._consumed = len(history)

        def agreements(iset):
            return sum(
                n for p, n in self._seen.items() if iset.color(p.a) is iset.color(p.b)
            )

        best = min(self._CANDIDATES, key=agreements)
        return {best: Fraction(1)}


class MicrosettingModel(LocalModel):
    """Instruction sets expanded over microsettings.

    ``micro_sets``
        ``{(wing, setting): [microsetting, ...]}``, nonempty.
    ``select``
        ``{wing: {(setting, tau): microsetting}}``: the microsetting that
        underlies a setting when the ambient condition is ``tau``.
    ``color_map``
        ``{wing: {microsetting: Color}}``.
    ``ambient``
        An ``AmbientDistribution`` (or anything it accepts).
    ``stationary``
        When true the colour flashed for each wing and setting must not
        depend on ``tau`` within the support.
    """

    kind = 'microsetting'

    def __init__(
        self,
        micro_sets,
        select,
        color_map,
        ambient,
        stationary=False,
        name=None,
        validate=True,
    ):
        self.micro_sets = {
            (w, s): tuple(ids) for (w, s), ids in sorted(micro_sets.items())
        }
        self.select = {w: dict(select.get(w, {})) for w in WINGS}
        self.color_map = {
            w: {mu: Color(c) for mu, c in color_map.get(w, {}).items()} for w in WINGS
        }
        if not isinstance(ambient, AmbientDistribution):
            ambient = AmbientDistribution(ambient)
        self.ambient = ambient
        self.stationary = bool(stationary)
        self.name = name
        self._lookup = {key: frozenset(ids) for key, ids in self.micro_sets.items()}
        if validate:
            self.validate()

    def validate(self):
        for w in WINGS:
            for s in SETTINGS:
                ids = self.micro_sets.get((w, s))
                if not ids:
                    raise ModelValidationError(
                        'wing %s setting %d has no microsettings' % (w, s)
                    )
                for mu in ids:
                    if mu not in self.color_map[w]:
                        raise ModelValidationError(
                            'wing %s microsetting %r has no colour' % (w, mu)
                        )
                for tau in self.ambient.taus:
                    microsetting_respond(self, w, s, tau)
        if self.stationary:
            support = self.ambient.support()
            for w in WINGS:
                for s in SETTINGS:
                    colors = {microsetting_respond(self, w, s, t) for t in support}
                    if len(colors) > 1:
                        raise ModelValidationError(
                            'stationary model changes colour over time at wing %s'
                            ' setting %d' % (w, s)
                        )
        log.debug('Validated microsetting model %s', self.name or '')

    def prepare(self, context, randomness):
        if context.ambient is None:
            return None
        # The ambient condition is known at the source: fix every answer now.
        tau = context.ambient.tau
        return {
            (w, s): microsetting_respond(self, w, s, tau)
            for w in WINGS
            for s in SETTINGS
        }

    def respond(self, wing, setting, state, ambient, randomness):
        if state is not None:
            return state[(wing, setting)]
        return microsetting_respond(self, wing, setting, ambient.tau)

    def __repr__(self):
        return '<MicrosettingModel %s |T|=%d>' % (self.name or '', len(self.ambient))


def microsetting_respond(m, wing, setting, tau):
    check_wing(wing)
    check_setting(setting)
    if tau not in m.ambient:
        raise ModelValidationError('unknown ambient condition %r' % (tau,))
    try:
        mu = m.select[wing][(setting, tau)]
    except KeyError:
        raise ModelValidationError(
            'wing %s selects nothing for setting %d at %r' % (wing, setting, tau)
        )
    if mu not in m._lookup.get((wing, setting), ()):
        raise ModelValidationError(
            'wing %s selects %r for setting %d at %r, outside its microsettings'
            % (wing, mu, setting, tau)
        )
    try:
        return m.color_map[wing][mu]
    except KeyError:
        raise ModelValidationError('wing %s microsetting %r has no colour' % (wing, mu))


TYPES = ('I', 'II')


def _parse_pattern(pattern):
    if isinstance(pattern, str):
        pattern = [p.strip() for p in pattern.split(',')]
    pattern = tuple(pattern)
    if len(pattern) != 3 or set(pattern) - set(TYPES):
        raise ModelValidationError('type pattern must name I or II for each setting')
    return pattern


def two_type_model(base, patterns, weights=None, name=None):
    """The reinterpreted instruction set.

    Type-I microsettings flash the colour ``base`` gives the setting and
    type-II microsettings the opposite one. ``patterns`` maps each
    ambient condition to the types it demands for settings 1, 2 and 3,
    e.g. ``('II', 'I', 'II')`` or ``'II,I,II'``.
    """
    base = InstructionSet.parse(base)
    patterns = {tau: _parse_pattern(p) for tau, p in patterns.items()}
    if weights is None:
        weights = {tau: Fraction(1, len(patterns)) for tau in patterns}
    micro_sets = {}
    select = {w: {} for w in WINGS}
    color_map = {w: {} for w in WINGS}
    for w in WINGS:
        for s in SETTINGS:
            ids = tuple('%s%d-%s' % (w, s, t) for t in TYPES)
            micro_sets[(w, s)] = ids
            color_map[w][ids[0]] = base.color(s)
            color_map[w][ids[1]] = base.color(s).opposite
            for tau, pattern in patterns.items():
                select[w][(s, tau)] = '%s%d-%s' % (w, s, pattern[s - 1])
    ambient = AmbientDistribution([(tau, weights[tau]) for tau in patterns])
    return MicrosettingModel(micro_sets, select, color_map, ambient, name=name)


def worked_example_model():
    """GGR, where one of two equally likely conditions demands type II
    for settings 1 and 3 and type I for setting 2."""
    return two_type_model(
        'GGR',
        {'t-plain': ('I', 'I', 'I'), 't-flip': ('II', 'I', 'II')},
        name='worked-example',
    )


def generate_compliant_model(sizes, randomness, stationary=False, full_support=False):
    """A random microsetting model that satisfies feature (i) by construction.

    ``sizes`` is ``(microsettings per wing and setting, ambient conditions)``;
    ``randomness`` is a ``numpy.random.Generator``.

    Microsettings of each wing and setting are split into two types, the
    two types flash opposite colours, and every ambient condition selects
    the same type on both wings. With ``full_support`` every pair of
    microsettings co-occurs under some condition, which forces a single
    type; the number of conditions is raised to make that possible.
    """
    n_micro, n_tau = sizes
    if n_micro < 1 or n_tau < 1:
        raise ModelValidationError('model sizes must be positive')
    rng = randomness
    if full_support:
        n_tau = max(n_tau, n_micro * n_micro)
    taus = ['t%d' % i for i in range(n_tau)]

    micro_sets = {}
    select = {w: {} for w in WINGS}
    color_map = {w: {} for w in WINGS}
    for s in SETTINGS:
        base = Color.R if rng.integers(2) else Color.G
        types = {}
        for w in WINGS:
            ids = tuple('%s%d.%d' % (w, s, i) for i in range(n_micro))
            micro_sets[(w, s)] = ids
            if full_support:
                kinds = ['I'] * n_micro
            else:
                kinds = ['I'] + ['I' if rng.integers(2) else 'II' for _ in ids[1:]]
            types[w] = {t: [mu for mu, k in zip(ids, kinds) if k == t] for t in TYPES}
            for mu, k in zip(ids, kinds):
                color_map[w][mu] = base if k == 'I' else base.opposite
        common = [t for t in TYPES if types['A'][t] and types['B'][t]]
        fixed = common[int(rng.integers(len(common)))]
        pairs = list(itertools.product(types['A']['I'], types['B']['I']))
        for k, tau in enumerate(taus):
            if full_support:
                mu_a, mu_b = pairs[k % len(pairs)]
            else:
                t = fixed if stationary else common[int(rng.integers(len(common)))]
                mu_a = types['A'][t][int(rng.integers(len(types['A'][t])))]
                mu_b = types['B'][t][int(rng.integers(len(types['B'][t])))]
            select['A'][(s, tau)] = mu_a
            select['B'][(s, tau)] = mu_b

    raw = [int(x) for x in rng.integers(1, 10, size=n_tau)]
    total = sum(raw)
    ambient = AmbientDistribution([(tau, Fraction(x, total)) for tau, x in zip(taus, raw)])
    return MicrosettingModel(
        micro_sets, select, color_map, ambient, stationary=stationary
    )


class QuantumJointTable(object):
    """Exact joint outcome distribution for each setting pair."""

    def __init__(self, rows):
        self.rows = {}
        for pair in PAIRS:
            try:
                row = rows[pair]
            except KeyError:
                raise ModelValidationError('joint table lacks pair %s' % (pair,))
            row = {o: Fraction(row.get(o, 0)) for o in OUTCOMES}
            if sum(row.values()) != 1:
                raise ModelValidationError('row %s does not sum to 1' % (pair,))
            if min(row.values()) < 0:
                raise ModelValidationError('row %s has negative mass' % (pair,))
            self.rows[pair] = row
        for pair in PAIRS:
            for wing in WINGS:
                if self.marginal(pair, wing)[Color.R] != Fraction(1, 2):
                    raise ModelValidationError(
                        'wing %s marginal of row %s is not uniform' % (wing, pair)
                    )
            if pair.is_same and self.same_mass(pair) != 1:
                raise ModelValidationError(
                    'equal settings %s do not always agree' % (pair,)
                )

    def row(self, pair):
        return self.rows[pair]

    def same_mass(self, pair):
        return sum(m for o, m in self.rows[pair].items() if o.is_same)

    def marginal(self, pair, wing):
        side = 0 if wing == 'A' else 1
        result = {c: Fraction(0) for c in Color}
        for outcome, mass in self.rows[pair].items():
            result[outcome[side]] += mass
        return result


# Same-colour probability by angle between measuring directions, in degrees.
# Spins come out opposite with probability cos^2(angle / 2) and wing B
# reads its lights the other way round, so opposite spins flash the same
# colour. The three directions are coplanar and 120 degrees apart.
_SAME_COLOR_BY_ANGLE = {0: Fraction(1), 120: Fraction(1, 4)}


@functools.lru_cache(maxsize=None)
def singlet_joint_table():
    rr, rg, gr, gg = OUTCOMES
    rows = {}
    for pair in PAIRS:
        p = _SAME_COLOR_BY_ANGLE[0 if pair.is_same else 120]
        rows[pair] = {rr: p / 2, gg: p / 2, rg: (1 - p) / 2, gr: (1 - p) / 2}
    return QuantumJointTable(rows)


def sample_reference(table, pair, randomness):
    row = table.row(pair)
    return pick(randomness[0], OUTCOMES, [row[o] for o in OUTCOMES])


class QuantumReference(JointModel):
    kind = 'quantum-reference'

    def __init__(self, table=None):
        self.table = table or singlet_joint_table()

    def respond_pair(self, pair, state, ambient):
        return sample_reference(self.table, pair, state)


class NonlocalControl(JointModel):
    """Reproduces the quantum data by letting wing B read wing A's setting.

    Wing A flashes a fair coin from the source draws. Wing B copies or
    inverts A's colour with the singlet same-colour probability for the
    full setting pair, which needs the far setting.
    """

    kind = 'nonlocal-control'

    def __init__(self, table=None):
        self.table = table or singlet_joint_table()

    def respond_wing(self, wing, setting, far_setting, state, ambient):
        color_a = Color.R if state[0] < 0.5 else Color.G
        if wing == 'A':
            return color_a
        same = state[1] < float(self.table.same_mass(SettingPair(far_setting, setting)))
        return color_a if same else color_a.opposite

    def respond_pair(self, pair, state, ambient):
        return OutcomePair(
            self.respond_wing('A', pair.a, pair.b, state, ambient),
            self.respond_wing('B', pair.b, pair.a, state, ambient),
        )


def nonlocal_control_respond(pair, randomness):
    return NonlocalControl().respond_pair(pair, randomness, None)
