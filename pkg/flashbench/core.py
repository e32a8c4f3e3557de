# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""Domain values shared by every other module, the tally table and the
handful of estimators used to test the two features of the data:

(i)  equal settings always flash the same colour;
(ii) ignoring settings, same and different colours are equally likely.
"""

from collections import Counter, namedtuple
from fractions import Fraction
import enum
import functools
import math
import numbers

from scipy import stats
from statsmodels.stats.proportion import proportion_confint


SETTINGS = (1, 2, 3)
WINGS = ('A', 'B')


class EmptyDataError(Exception):
    """A statistic was asked for on data that cannot support it."""


def check_setting(value):
    if value not in SETTINGS:
        raise ValueError('setting must be one of 1, 2, 3, got %r' % (value,))
    return value


def check_wing(wing):
    if wing not in WINGS:
        raise ValueError('wing must be "A" or "B", got %r' % (wing,))
    return wing


class Color(enum.Enum):
    R = 'R'
    G = 'G'

    @property
    def opposite(self):
        return Color.G if self is Color.R else Color.R

    def __str__(self):
        return self.value


class SettingPair(namedtuple('SettingPair', 'a b')):
    __slots__ = ()

    @property
    def is_same(self):
        return self.a == self.b

    def __str__(self):
        return '%d%d' % (self.a, self.b)


class OutcomePair(namedtuple('OutcomePair', 'ca cb')):
    __slots__ = ()

    @property
    def is_same(self):
        return self.ca is self.cb

    def __str__(self):
        return '%s%s' % (self.ca, self.cb)


RunRecord = namedtuple('RunRecord', 'trial pair outcome')

PAIRS = tuple(SettingPair(a, b) for a in SETTINGS for b in SETTINGS)
SAME_PAIRS = tuple(p for p in PAIRS if p.is_same)
OUTCOMES = tuple(OutcomePair(ca, cb) for ca in Color for cb in Color)

PAIR_INDEX = {p: i for i, p in enumerate(PAIRS)}
OUTCOME_INDEX = {o: i for i, o in enumerate(OUTCOMES)}


class _Undefined(object):
    """Marker for a conditional probability over an empty cell."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(_Undefined, cls).__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'UNDEFINED'

    __str__ = __repr__

    def __bool__(self):
        return False

    def __lt__(self, other):
        raise TypeError('an undefined probability cannot be ordered')

    __le__ = __gt__ = __ge__ = __lt__


UNDEFINED = _Undefined()


@functools.total_ordering
class Probability(object):
    """Either an exact rational or a floating point estimate.

    Exact values are ``Fraction``s and so always in lowest terms.
    Estimates must say how many samples they rest on. ``n`` is optional
    for exact values (an exact ratio of counts still has a sample size).
    """

    __slots__ = ('value', 'n')

    def __init__(self, value, n=None):
        if isinstance(value, bool):
            raise TypeError('probability cannot be a bool')
        if isinstance(value, numbers.Rational):
            value = Fraction(value)
        elif isinstance(value, float):
            if n is None:
                raise ValueError('an estimate needs its sample size')
        else:
            raise TypeError('unsupported probability value %r' % (value,))
        if not 0 <= value <= 1:
            raise ValueError('probability out of range: %s' % value)
        if n is not None and n < 0:
            raise ValueError('sample size must be nonnegative')
        self.value = value
        self.n = n

    @property
    def is_exact(self):
        return isinstance(self.value, Fraction)

    def _other_value(self, other):
        if isinstance(other, Probability):
            if other.is_exact != self.is_exact:
                raise TypeError('exact and estimated probabilities do not mix')
            return other.value
        if isinstance(other, numbers.Real) and not isinstance(other, bool):
            return other
        return NotImplemented

    def __eq__(self, other):
        value = self._other_value(other)
        if value is NotImplemented:
            return NotImplemented
        return self.value == value

    def __lt__(self, other):
        value = self._other_value(other)
        if value is NotImplemented:
            return NotImplemented
        return self.value < value

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        if self.is_exact:
            return 'Probability(%s)' % self.value
        return 'Probability(%r, n=%s)' % (self.value, self.n)

    def __str__(self):
        return str(self.value)


class TallyTable(object):
    """Counts of runs per setting pair and outcome pair.

    The grid is 9 x 4 in the canonical ``PAIRS`` x ``OUTCOMES`` order.
    An *expectation* table holds exact ``Fraction`` masses summing to 1
    instead of counts; every statistic below works on both.
    """

    __slots__ = ('_cells', 'total', 'is_expectation')

    def __init__(self, counts=None, expectation=False):
        counts = counts or {}
        for key, value in counts.items():
            if key[0] not in PAIR_INDEX or key[1] not in OUTCOME_INDEX:
                raise ValueError('unknown cell %r' % (key,))
            if value < 0:
                raise ValueError('negative count in cell %r' % (key,))
            if not expectation and int(value) != value:
                raise ValueError('count in cell %r is not an integer' % (key,))
        zero = Fraction(0) if expectation else 0
        self._cells = tuple(
            tuple(counts.get((p, o), zero) for o in OUTCOMES) for p in PAIRS
        )
        self.total = sum((sum(row) for row in self._cells), zero)
        self.is_expectation = expectation

    @classmethod
    def expected(cls, masses):
        """Build an exact expectation table from ``{(pair, outcome): mass}``."""
        masses = {k: Fraction(v) for k, v in masses.items()}
        if sum(masses.values()) != 1:
            raise ValueError('expectation masses must sum to 1')
        return cls(masses, expectation=True)

    def count(self, pair, outcome):
        return self._cells[PAIR_INDEX[pair]][OUTCOME_INDEX[outcome]]

    def pair_total(self, pair):
        return sum(self._cells[PAIR_INDEX[pair]])

    def pair_same(self, pair):
        row = self._cells[PAIR_INDEX[pair]]
        return sum(row[OUTCOME_INDEX[o]] for o in OUTCOMES if o.is_same)

    def same_total(self):
        return sum(self.pair_same(p) for p in PAIRS)

    def cells(self):
        for p in PAIRS:
            for o in OUTCOMES:
                yield p, o, self.count(p, o)

    def add(self, record):
        """A new table with ``record`` counted."""
        if self.is_expectation:
            raise TypeError('cannot add runs to an expectation table')
        counts = {(p, o): c for p, o, c in self.cells() if c}
        key = (record.pair, record.outcome)
        counts[key] = counts.get(key, 0) + 1
        return TallyTable(counts)

    def merge(self, other):
        if self.is_expectation or other.is_expectation:
            raise TypeError('expectation tables cannot be merged')
        counts = {}
        for table in (self, other):
            for p, o, c in table.cells():
                counts[(p, o)] = counts.get((p, o), 0) + c
        return TallyTable(counts)

    __add__ = merge

    def __eq__(self, other):
        if not isinstance(other, TallyTable):
            return NotImplemented
        return (
            self._cells == other._cells and self.is_expectation == other.is_expectation
        )

    def __hash__(self):
        return hash((self._cells, self.is_expectation))

    def __repr__(self):
        kind = 'expectation' if self.is_expectation else 'counts'
        return '<TallyTable %s total=%s>' % (kind, self.total)


def tally(records):
    counter = Counter((r.pair, r.outcome) for r in records)
    return TallyTable(counter)


def _sample_size(t):
    return None if t.is_expectation else t.total


def same_color_fraction(t):
    if not t.total:
        raise EmptyDataError('no runs in the table')
    return Probability(Fraction(t.same_total(), t.total), _sample_size(t))


def feature_i_fraction(t):
    """Fraction of equal-setting runs (11, 22, 33) that flashed one colour."""
    runs = sum(t.pair_total(p) for p in SAME_PAIRS)
    if not runs:
        raise EmptyDataError('no runs with equal settings')
    same = sum(t.pair_same(p) for p in SAME_PAIRS)
    return Probability(Fraction(same, runs), None if t.is_expectation else runs)


def per_pair_same_table(t):
    """Conditional same-colour probability per setting pair.

    Returns ``{SettingPair: Probability}``; pairs with no runs map to
    ``UNDEFINED`` rather than zero.
    """
    table = {}
    for p in PAIRS:
        runs = t.pair_total(p)
        if not runs:
            table[p] = UNDEFINED
            continue
        table[p] = Probability(
            Fraction(t.pair_same(p), runs), None if t.is_expectation else runs
        )
    return table


def per_pair_grid(table):
    """Lay out a ``per_pair_same_table`` result as a 3 x 3 list, rows by A."""
    return [[table[SettingPair(a, b)] for b in SETTINGS] for a in SETTINGS]


def wilson_interval(successes, n, z=1.96):
    """Wilson score interval for a binomial proportion, clamped to [0, 1]."""
    if n <= 0:
        raise EmptyDataError('Wilson interval needs at least one trial')
    if not 0 <= successes <= n:
        raise ValueError('successes must lie in [0, n]')
    if z <= 0:
        raise ValueError('z must be positive')
    alpha = 2 * stats.norm.sf(z)
    if alpha > 0:
        lower, upper = proportion_confint(successes, n, alpha=alpha, method='wilson')
    else:
        # the tail mass underflows for very large z
        p = successes / n
        scale = 1 + z * z / n
        center = (p + z * z / (2 * n)) / scale
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / scale
        lower, upper = center - half, center + half
    lower = 0.0 if successes == 0 else max(0.0, float(lower))
    upper = 1.0 if successes == n else min(1.0, float(upper))
    return lower, upper
