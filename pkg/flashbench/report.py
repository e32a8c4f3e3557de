# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""Report documents and the raw records file.

Exact values are written as ``"p/q"`` strings and never as floats;
estimates are written as numbers together with their sample size.
The records file has one run per line: ``trial,a,b,ca,cb``.
"""

import json
import os

import jinja2
import numpy

from . import version
from .core import (
    PAIRS,
    OUTCOMES,
    SETTINGS,
    UNDEFINED,
    Color,
    EmptyDataError,
    OutcomePair,
    RunRecord,
    SettingPair,
    feature_i_fraction,
    per_pair_same_table,
    same_color_fraction,
    wilson_interval,
)
from .log import log
from .specs import rational
from .verifier import (
    collapse_analysis,
    enumerate_instruction_sets,
    exact_same_fraction,
    expected_table,
    incompatibility_certificate,
    instruction_set_same_fraction,
    min_same_fraction_over_mixtures,
    mixture_same_fraction,
)

TEMPLATE_DIR = os.path.join(os.path.abspath(os.path.dirname(__file__)), 'templates')


class RecordFormatError(Exception):
    def __init__(self, lineno, msg):
        super(RecordFormatError, self).__init__('line %d: %s' % (lineno, msg))
        self.lineno = lineno
        self.msg = msg


def write_records(records, fh):
    for r in records:
        fh.write(
            '%d,%d,%d,%s,%s\n' % (r.trial, r.pair.a, r.pair.b, r.outcome.ca, r.outcome.cb)
        )


def read_records(fh):
    records = []
    for lineno, line in enumerate(fh, 1):
        line = line.strip()
        if not line:
            continue
        fields = line.split(',')
        if len(fields) != 5:
            raise RecordFormatError(lineno, 'expected 5 fields, got %d' % len(fields))
        try:
            trial, a, b = int(fields[0]), int(fields[1]), int(fields[2])
            ca, cb = Color(fields[3]), Color(fields[4])
        except ValueError as e:
            raise RecordFormatError(lineno, str(e))
        if trial < 0:
            raise RecordFormatError(lineno, 'negative trial index')
        if a not in SETTINGS or b not in SETTINGS:
            raise RecordFormatError(lineno, 'settings are 1, 2 and 3')
        records.append(RunRecord(trial, SettingPair(a, b), OutcomePair(ca, cb)))
    return records


def _probability(p, z=None):
    if p is UNDEFINED:
        return 'undefined'
    entry = {'exact': rational(p.value)}
    if p.n is not None:
        entry['estimate'] = float(p.value)
        entry['n'] = p.n
        if z is not None and p.n:
            successes = p.value * p.n
            entry['wilson'] = list(wilson_interval(int(successes), p.n, z))
    return entry


def statistics(table, z=1.96):
    """Statistics for a tally or expectation table.

    Wilson intervals are only given for tables of counts.
    """
    z = None if table.is_expectation else z
    per_pair = per_pair_same_table(table)
    for pair, p in per_pair.items():
        if p is UNDEFINED:
            log.warning('No runs with settings %s', pair)
    result = {
        'runs': rational(table.total) if table.is_expectation else table.total,
        'same_color': _probability(same_color_fraction(table), z),
        'per_pair': {str(pair): _probability(per_pair[pair]) for pair in PAIRS},
    }
    try:
        result['feature_i'] = _probability(feature_i_fraction(table), z)
    except EmptyDataError:
        result['feature_i'] = 'undefined'
    if not table.is_expectation:
        result['counts'] = {
            str(pair): {str(o): table.count(pair, o) for o in OUTCOMES} for pair in PAIRS
        }
    return result


def echo(document):
    """A copy of a model document that JSON can write with sorted keys."""
    if isinstance(document, dict):
        return {str(k): echo(v) for k, v in document.items()}
    if isinstance(document, (list, tuple)):
        return [echo(v) for v in document]
    return document


def versions():
    return {'flashbench': version, 'numpy': numpy.__version__}


def simulate_report(document, trials, seed, ambient_mode, table, z=1.96):
    return {
        'command': 'simulate',
        'config': {
            'model': echo(document),
            'trials': trials,
            'ambient_mode': ambient_mode,
            'z': z,
        },
        'seed': seed,
        'statistics': statistics(table, z),
        'versions': versions(),
    }


def analyze_report(source, table, z=1.96):
    return {
        'command': 'analyze',
        'config': {'records': os.path.basename(source), 'z': z},
        'statistics': statistics(table, z),
        'versions': versions(),
    }


def _witness(w):
    if w is None:
        return None
    return {
        'setting': w.setting,
        'tau': w.tau,
        'micro_a': w.micro_a,
        'micro_b': w.micro_b,
        'color_a': str(w.color_a),
        'color_b': str(w.color_b),
    }


def collapse_section(report):
    settings = {}
    partition = report.partition
    for s in SETTINGS:
        verdict = report.settings[s]
        settings[str(s)] = {
            'verdict': verdict.verdict,
            'full_support': verdict.full_support,
            'colors': {t: str(c) for t, c in sorted(verdict.colors.items())},
            'witness': _witness(verdict.witness),
            'components': [
                {
                    'type': c.type,
                    'A': list(c.members_a),
                    'B': list(c.members_b),
                    'color': None if c.color is None else str(c.color),
                    'conflict': _witness(c.conflict),
                }
                for c in partition.components[s]
            ],
            'unreachable': {w: list(ids) for w, ids in partition.unreachable[s].items()},
        }
    return {
        'verdict': report.verdict,
        'witness': _witness(report.witness),
        'settings': settings,
        'effective_sets': {str(t): str(s) for t, s in report.effective_sets.items()},
        'effective_distribution': {
            str(s): rational(w) for s, w in report.effective_distribution.items()
        },
    }


def verify_report(spec, model):
    """Exact verification of an instruction-set, mixture or microsetting model.

    Returns the report and whether the model satisfies feature (i).
    """
    section = {}
    compliant = True
    exact = None
    kind = spec.kind
    if kind == 'instruction-set':
        section['set'] = str(model.iset)
        section['pure'] = model.iset.is_pure
        exact = instruction_set_same_fraction(model.iset)
    elif kind == 'instruction-mixture':
        exact = mixture_same_fraction(model.weights)
    else:
        collapse = collapse_analysis(model)
        compliant = collapse.compliant
        section['compliant'] = compliant
        section['witness'] = _witness(collapse.witness)
        section['collapse'] = collapse_section(collapse)
        if compliant:
            exact = exact_same_fraction(model).value
    bound = min_same_fraction_over_mixtures().minimum.value
    section['exact_same_fraction'] = None if exact is None else rational(exact)
    section['at_least_bound'] = None if exact is None else exact >= bound
    section['statistics'] = statistics(expected_table(model))
    report = {
        'command': 'verify',
        'config': {'model': echo(spec.document)},
        'verification': section,
        'versions': versions(),
    }
    return report, compliant


def enumerate_report():
    rows = enumerate_instruction_sets()
    bound = min_same_fraction_over_mixtures()
    cert = incompatibility_certificate()
    return {
        'command': 'enumerate',
        'enumeration': [
            {
                'set': str(row.set),
                'same_fraction': rational(row.same_fraction.value),
                'pure': row.pure,
            }
            for row in rows
        ],
        'bound': {
            'minimum': rational(bound.minimum.value),
            'minimizers': [str(s) for s in bound.minimizers],
            'argument': bound.argument,
        },
        'certificate': {
            'bound': rational(cert.bound.value),
            'target': rational(cert.target.value),
            'gap': rational(cert.gap),
            'minimizers': [str(s) for s in cert.minimizers],
            'contradiction': cert.contradiction,
            'steps': cert.steps,
        },
        'versions': versions(),
    }


def dumps(report):
    return json.dumps(report, indent=2, sort_keys=True) + '\n'


def render_text(report, template_name='report.tmpl', search_path=None):
    """Render a report through a jinja2 template.

    The template is looked up in ``search_path`` first, then in the
    packaged templates; an unknown name falls back to the default.
    """
    jinja_env = jinja2.Environment(
        loader=jinja2.FileSystemLoader(list(search_path or []) + [TEMPLATE_DIR]),
        autoescape=False,
        keep_trailing_newline=True,
    )
    try:
        template = jinja_env.get_template(template_name)
    except jinja2.TemplateNotFound:
        log.error("Can't find report template %s, using default" % template_name)
        template = jinja_env.get_template('report.tmpl')
    return template.render(report=report)
