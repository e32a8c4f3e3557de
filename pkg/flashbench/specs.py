# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""Declarative model documents.

A document is a YAML (or JSON) mapping with a ``kind`` and a payload for
that kind::

    kind: instruction-set
    set: GGR

    kind: instruction-mixture
    weights: {GGR: 1/2, RRR: 1/2}     # or a list of 8 in canonical order

    kind: adaptive
    strategy: constant | parity | greedy
    weights: {...}                      # constant only

    kind: microsetting
    micro_sets: {A: {1: [a1, a2], ...}, B: {...}}
    select: {A: {1: {t0: a1, t1: a2}, ...}, B: {...}}
    color_map: {A: {a1: R, a2: G, ...}, B: {...}}
    ambient: {t0: 1/2, t1: 1/2}
    stationary: false

    kind: two-type
    set: GGR
    patterns: {t0: 'I,I,I', t1: 'II,I,II'}
    ambient: {t0: 1/2, t1: 1/2}          # optional, uniform by default

    kind: quantum-reference | nonlocal-control | independent-coins

Rationals are written ``p/q`` or as integers. Ambient conditions and
microsettings are always handled as strings. Documents are searched for
like stylesheets: in the current directory, in any configured model
path and in the packaged catalog, with or without an extension.
"""

from fractions import Fraction
import os

import yaml

from .core import SETTINGS, WINGS
from .log import log
from .models import (
    ALL_INSTRUCTION_SETS,
    AdaptiveStrategy,
    ConstantStrategy,
    GreedyStrategy,
    IndependentCoinsModel,
    InstructionSet,
    InstructionSetModel,
    MicrosettingModel,
    MixtureModel,
    ModelValidationError,
    NonlocalControl,
    ParityStrategy,
    QuantumReference,
    two_type_model,
)

KINDS = (
    'quantum-reference',
    'instruction-set',
    'instruction-mixture',
    'adaptive',
    'microsetting',
    'two-type',
    'nonlocal-control',
    'independent-coins',
)
STRATEGIES = {
    'constant': ConstantStrategy,
    'parity': ParityStrategy,
    'greedy': GreedyStrategy,
}
VERIFIABLE_KINDS = ('instruction-set', 'instruction-mixture', 'microsetting', 'two-type')

CATALOG_DIR = os.path.join(os.path.abspath(os.path.dirname(__file__)), 'catalog')


class SpecError(Exception):
    def __init__(self, path, msg):
        super(SpecError, self).__init__('%s: %s' % (path, msg))
        self.path = path
        self.msg = msg


def rational(value):
    return '%d/%d' % (value.numerator, value.denominator)


def _rational(value, path):
    if isinstance(value, bool):
        raise SpecError(path, 'expected a rational number, got %r' % (value,))
    if isinstance(value, float):
        value = repr(value)
    try:
        result = Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SpecError(path, 'expected a rational number, got %r' % (value,))
    if result < 0:
        raise SpecError(path, 'weight must be nonnegative')
    return result


def _mapping(doc, key, path, required=True):
    here = '%s.%s' % (path, key)
    if key not in doc:
        if required:
            raise SpecError(here, 'missing')
        return None
    value = doc[key]
    if not isinstance(value, dict):
        raise SpecError(here, 'expected a mapping')
    return value


def _setting_key(key, path):
    try:
        setting = int(key)
    except (TypeError, ValueError):
        setting = None
    if setting not in SETTINGS:
        raise SpecError(path, 'settings are 1, 2 and 3, got %r' % (key,))
    return setting


def _instruction_set(value, path):
    try:
        return InstructionSet.parse(value)
    except ValueError as e:
        raise SpecError(path, str(e))


def _weights(doc, path):
    here = path + '.weights'
    raw = doc.get('weights')
    if isinstance(raw, list):
        if len(raw) != len(ALL_INSTRUCTION_SETS):
            raise SpecError(here, 'a weight list needs 8 entries (RRR ... GGG)')
        weights = {
            s: _rational(v, '%s[%d]' % (here, i))
            for i, (s, v) in enumerate(zip(ALL_INSTRUCTION_SETS, raw))
        }
    elif isinstance(raw, dict):
        weights = {}
        for key, v in raw.items():
            iset = _instruction_set(key, '%s.%s' % (here, key))
            weights[iset] = _rational(v, '%s.%s' % (here, key))
    else:
        raise SpecError(here, 'expected a mapping or a list of 8 weights')
    total = sum(weights.values(), Fraction(0))
    if total != 1:
        raise SpecError(here, 'weights sum to %s, not 1' % total)
    return weights


def _ambient(doc, path, required=True):
    raw = _mapping(doc, 'ambient', path, required)
    if raw is None:
        return None
    if not raw:
        raise SpecError(path + '.ambient', 'the ambient domain is empty')
    weights = [
        (str(tau), _rational(w, '%s.ambient.%s' % (path, tau))) for tau, w in raw.items()
    ]
    total = sum((w for _, w in weights), Fraction(0))
    if total != 1:
        raise SpecError(path + '.ambient', 'weights sum to %s, not 1' % total)
    return weights


def _per_wing(doc, key, path):
    raw = _mapping(doc, key, path)
    for w in WINGS:
        if not isinstance(raw.get(w), dict):
            raise SpecError('%s.%s.%s' % (path, key, w), 'expected a mapping')
    extra = set(raw) - set(WINGS)
    if extra:
        raise SpecError('%s.%s' % (path, key), 'unknown wing(s) %s' % sorted(extra))
    return raw


def _microsetting_payload(doc, path):
    ambient = _ambient(doc, path)
    taus = [tau for tau, _ in ambient]

    micro_sets = {}
    raw = _per_wing(doc, 'micro_sets', path)
    for w in WINGS:
        here = '%s.micro_sets.%s' % (path, w)
        seen = set()
        for key, ids in raw[w].items():
            s = _setting_key(key, '%s.%s' % (here, key))
            if not isinstance(ids, list) or not ids:
                raise SpecError('%s.%s' % (here, key), 'expected a nonempty list')
            micro_sets[(w, s)] = [str(mu) for mu in ids]
            seen.add(s)
        for s in SETTINGS:
            if s not in seen:
                raise SpecError('%s.%d' % (here, s), 'missing')

    select = {w: {} for w in WINGS}
    raw = _per_wing(doc, 'select', path)
    for w in WINGS:
        here = '%s.select.%s' % (path, w)
        for key, table in raw[w].items():
            s = _setting_key(key, '%s.%s' % (here, key))
            if not isinstance(table, dict):
                raise SpecError('%s.%s' % (here, key), 'expected a mapping')
            for tau, mu in table.items():
                select[w][(s, str(tau))] = str(mu)
        for s in SETTINGS:
            for tau in taus:
                if (s, tau) not in select[w]:
                    raise SpecError('%s.%d.%s' % (here, s, tau), 'missing')
                mu = select[w][(s, tau)]
                if mu not in micro_sets[(w, s)]:
                    raise SpecError(
                        '%s.%d.%s' % (here, s, tau),
                        '%r is not a microsetting of wing %s setting %d' % (mu, w, s),
                    )

    color_map = {w: {} for w in WINGS}
    raw = _per_wing(doc, 'color_map', path)
    for w in WINGS:
        here = '%s.color_map.%s' % (path, w)
        for mu, color in raw[w].items():
            if color not in ('R', 'G'):
                raise SpecError('%s.%s' % (here, mu), 'colours are R or G')
            color_map[w][str(mu)] = color
        for s in SETTINGS:
            for mu in micro_sets[(w, s)]:
                if mu not in color_map[w]:
                    raise SpecError('%s.%s' % (here, mu), 'missing')

    stationary = doc.get('stationary', False)
    if not isinstance(stationary, bool):
        raise SpecError(path + '.stationary', 'expected true or false')
    return dict(
        micro_sets=micro_sets,
        select=select,
        color_map=color_map,
        ambient=ambient,
        stationary=stationary,
    )


def _two_type_payload(doc, path):
    base = _instruction_set(doc.get('set'), path + '.set')
    raw = _mapping(doc, 'patterns', path)
    if not raw:
        raise SpecError(path + '.patterns', 'at least one ambient condition is needed')
    patterns = {}
    for tau, pattern in raw.items():
        here = '%s.patterns.%s' % (path, tau)
        if isinstance(pattern, str):
            pattern = [p.strip() for p in pattern.split(',')]
        if not isinstance(pattern, list) or len(pattern) != 3:
            raise SpecError(here, 'expected three types, e.g. "II,I,II"')
        for p in pattern:
            if p not in ('I', 'II'):
                raise SpecError(here, 'types are I or II, got %r' % (p,))
        patterns[str(tau)] = tuple(pattern)
    ambient = _ambient(doc, path, required=False)
    weights = None
    if ambient is not None:
        weights = dict(ambient)
        if set(weights) != set(patterns):
            raise SpecError(path + '.ambient', 'must name the same conditions as patterns')
    return dict(base=base, patterns=patterns, weights=weights)


class ModelSpec(object):
    """A validated model document."""

    def __init__(self, document, source=None):
        self.document = document
        self.source = source
        self.kind = document['kind']
        self.name = document.get('name')

    def build(self):
        """A fresh model (or adaptive strategy) for this document."""
        return _build(self.document, '$')

    @property
    def is_adaptive(self):
        return self.kind == 'adaptive'


def _build(doc, path):
    kind = doc['kind']
    name = doc.get('name')
    if kind == 'instruction-set':
        return InstructionSetModel(_instruction_set(doc.get('set'), path + '.set'))
    if kind == 'instruction-mixture':
        return MixtureModel(_weights(doc, path))
    if kind == 'adaptive':
        strategy = doc.get('strategy')
        if strategy not in STRATEGIES:
            raise SpecError(
                path + '.strategy', 'one of %s' % ', '.join(sorted(STRATEGIES))
            )
        if strategy == 'constant':
            return ConstantStrategy(_weights(doc, path))
        return STRATEGIES[strategy]()
    if kind == 'microsetting':
        payload = _microsetting_payload(doc, path)
        try:
            return MicrosettingModel(name=name, **payload)
        except ModelValidationError as e:
            raise SpecError(path, e.msg)
    if kind == 'two-type':
        payload = _two_type_payload(doc, path)
        return two_type_model(name=name, **payload)
    if kind == 'quantum-reference':
        return QuantumReference()
    if kind == 'nonlocal-control':
        return NonlocalControl()
    if kind == 'independent-coins':
        return IndependentCoinsModel()
    raise SpecError(path + '.kind', 'unknown kind %r' % (kind,))


def parse_model_spec(document, source=None):
    if not isinstance(document, dict):
        raise SpecError('$', 'a model document must be a mapping')
    kind = document.get('kind')
    if kind not in KINDS:
        raise SpecError('$.kind', 'expected one of %s, got %r' % (', '.join(KINDS), kind))
    if 'name' in document and not isinstance(document['name'], str):
        raise SpecError('$.name', 'expected a string')
    spec = ModelSpec(document, source)
    # Building is the full validation.
    spec.build()
    return spec


def find_model(name, search_path=None):
    """Find the file for a model document name.

    Given a model name, searches for it in the current directory, the
    given search path and the catalog, and returns the real file name.
    """

    def innerFind(path, fn):
        if os.path.isabs(fn):
            if os.path.isfile(fn):
                return fn
        else:
            for D in path:
                tfn = os.path.join(D, fn)
                if os.path.isfile(tfn):
                    return tfn
        return None

    path = ['.'] + list(search_path or []) + [CATALOG_DIR]
    result = None
    for ext in ['', '.yaml', '.yml', '.json']:
        result = innerFind(path, name + ext)
        if result:
            break
    if result is None:
        log.warning("Can't find model document %s" % name)
    return result


def load_model_spec(name, search_path=None):
    fname = find_model(name, search_path)
    if fname is None:
        raise FileNotFoundError('model document %r not found' % name)
    log.info('Loading model document %s', fname)
    with open(fname) as fh:
        try:
            document = yaml.safe_load(fh)
        except yaml.YAMLError as e:
            raise SpecError('$', 'not valid YAML/JSON: %s' % e)
    return parse_model_spec(document, source=fname)


def _microsetting_document(model):
    return {
        'kind': 'microsetting',
        'micro_sets': {
            w: {str(s): list(model.micro_sets[(w, s)]) for s in SETTINGS} for w in WINGS
        },
        'select': {
            w: {
                str(s): {str(tau): model.select[w][(s, tau)] for tau in model.ambient.taus}
                for s in SETTINGS
            }
            for w in WINGS
        },
        'color_map': {
            w: {mu: c.value for mu, c in sorted(model.color_map[w].items())}
            for w in WINGS
        },
        'ambient': {str(tau): rational(w) for tau, w in model.ambient.items()},
        'stationary': model.stationary,
    }


def model_to_document(model):
    """Serialise a model or strategy back into a document."""
    if isinstance(model, InstructionSetModel):
        doc = {'kind': 'instruction-set', 'set': str(model.iset)}
    elif isinstance(model, MixtureModel):
        doc = {
            'kind': 'instruction-mixture',
            'weights': {str(s): rational(w) for s, w in model.weights.items() if w},
        }
    elif isinstance(model, MicrosettingModel):
        doc = _microsetting_document(model)
        if model.name:
            doc['name'] = model.name
    elif isinstance(model, AdaptiveStrategy):
        doc = {'kind': 'adaptive', 'strategy': model.kind}
        if isinstance(model, ConstantStrategy):
            doc['weights'] = {str(s): rational(w) for s, w in model.weights.items() if w}
    elif isinstance(model, (QuantumReference, NonlocalControl, IndependentCoinsModel)):
        doc = {'kind': model.kind}
    else:
        raise TypeError('cannot serialise %r' % (model,))
    return doc
