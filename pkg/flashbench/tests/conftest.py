"""
Automated testing for flashbench.

Besides the ``test_*.py`` modules, every ``input/<name>.cli`` file is a
test case: the file holds the command line, ``<name>.retcode`` the
expected exit code (default 0) and ``<name>.expect`` a YAML mapping of
dotted report paths to expected values. A value may also be
``{approx: x, abs: tol}`` or ``{len: n}``.

See LICENSE.txt for licensing terms
"""

import json
import os
import shlex
import subprocess
import sys

import pytest
import yaml


ROOT_DIR = os.path.realpath(os.path.dirname(__file__))
INPUT_DIR = os.path.join(ROOT_DIR, 'input')
OUTPUT_DIR = os.path.join(ROOT_DIR, 'output')
REPO_DIR = os.path.dirname(os.path.dirname(ROOT_DIR))


def lookup(report, dotted):
    value = report
    for part in dotted.split('.'):
        if isinstance(value, list):
            value = value[int(part)]
        else:
            value = value[part]
    return value


def check_expectation(report, dotted, expected):
    try:
        actual = lookup(report, dotted)
    except (KeyError, IndexError, TypeError):
        raise CompareException('report has no %r' % dotted)
    if isinstance(expected, dict) and 'approx' in expected:
        ok = abs(actual - expected['approx']) <= expected.get('abs', 1e-12)
    elif isinstance(expected, dict) and 'len' in expected:
        ok = len(actual) == expected['len']
    else:
        ok = actual == expected
    if not ok:
        raise CompareException('%s: expected %r, got %r' % (dotted, expected, actual))


class CliFile(pytest.File):
    def collect(self):
        name = os.path.splitext(self.path.name)[0]
        yield CliItem.from_parent(parent=self, name=name)


class CliItem(pytest.Item):
    def _fail(self, msg, output=None):
        pytest.fail(
            f'{msg}:\n\n{output.decode("utf-8")}' if output else msg,
            pytrace=False,
        )

    def _build(self):
        output_json = os.path.join(OUTPUT_DIR, self.name + '.json')
        output_log = os.path.join(OUTPUT_DIR, self.name + '.log')
        os.makedirs(OUTPUT_DIR, exist_ok=True)

        for path in (output_log, output_json):
            if os.path.exists(path):
                os.remove(path)

        cmd = [sys.executable, '-m', 'flashbench.cli']
        with open(os.path.join(INPUT_DIR, self.name + '.cli')) as fh:
            cmd += shlex.split(fh.read())
        if '-o' not in cmd and '--out' not in cmd:
            cmd += ['-o', output_json]

        env = dict(os.environ)
        env['PYTHONPATH'] = os.pathsep.join(
            [REPO_DIR] + [p for p in [env.get('PYTHONPATH')] if p]
        )
        try:
            output = subprocess.check_output(
                cmd,
                cwd=INPUT_DIR,
                stderr=subprocess.STDOUT,
                env=env,
            )
            retcode = 0
        except subprocess.CalledProcessError as exc:
            output = exc.output
            retcode = exc.returncode

        with open(output_log, 'wb') as fh:
            fh.write(output)

        return retcode, output, output_json

    def runtest(self):
        __tracebackhide__ = True

        retcode, output, output_json = self._build()

        expected_retcode = 0
        retcode_file = os.path.join(INPUT_DIR, self.name + '.retcode')
        if os.path.exists(retcode_file):
            with open(retcode_file) as f:
                expected_retcode = int(f.readline())
        if retcode != expected_retcode:
            self._fail(
                'Exit code of %d did not match expected %d' % (retcode, expected_retcode),
                output,
            )

        expect_file = os.path.join(INPUT_DIR, self.name + '.expect')
        if not os.path.exists(expect_file):
            return
        if not os.path.exists(output_json):
            self._fail(
                'File %r was not generated' % (os.path.relpath(output_json, ROOT_DIR),),
                output,
            )
        with open(output_json) as fh:
            report = json.load(fh)
        with open(expect_file) as fh:
            expectations = yaml.safe_load(fh) or {}
        for dotted, expected in expectations.items():
            check_expectation(report, dotted, expected)

    def repr_failure(self, excinfo):
        """Called when self.runtest() raises an exception."""
        if isinstance(excinfo.value, CompareException):
            return excinfo.exconly()

        return super(CliItem, self).repr_failure(excinfo)

    def reportinfo(self):
        return self.path, 0, self.name


class CompareException(Exception):
    """Custom exception for error reporting."""


def pytest_collect_file(parent, file_path):
    if file_path.suffix == '.cli' and file_path.parent.name == 'input':
        return CliFile.from_parent(parent=parent, path=file_path)
