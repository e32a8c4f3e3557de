# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""Counter-based randomness keyed by (seed, role, trial).

Each role owns a Philox key derived from the root seed. The draws for
trial ``i`` are the Philox block at counter ``i``, so a shard covering
trials ``[start, stop)`` sees exactly the numbers a sequential run would
have seen for those trials.
"""

import numpy as np

from .log import log

ROLES = ('source', 'ambient', 'settings-A', 'settings-B', 'wing-A', 'wing-B')
DRAWS_PER_TRIAL = 4
MAX_SEED = 2 ** 64 - 1

_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53


class RandomnessStream(object):
    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed <= MAX_SEED:
            raise ValueError('seed must be a 64-bit unsigned integer')
        self.seed = seed
        self._keys = {}
        for index, role in enumerate(ROLES):
            sequence = np.random.SeedSequence(seed, spawn_key=(index,))
            self._keys[role] = sequence.generate_state(2, dtype=np.uint64)

    def block(self, role, start, stop):
        """Uniform draws for trials ``start`` to ``stop - 1``.

        Returns a list with one tuple of ``DRAWS_PER_TRIAL`` floats in
        [0, 1) per trial.
        """
        if stop < start:
            raise ValueError('empty or reversed trial range')
        generator = np.random.Philox(key=self._keys[role], counter=start)
        words = generator.random_raw(DRAWS_PER_TRIAL * (stop - start))
        uniforms = (words >> np.uint64(11)).astype(np.float64) * _TO_UNIT
        return [tuple(row) for row in uniforms.reshape(-1, DRAWS_PER_TRIAL).tolist()]

    def trial_streams(self, start, stop, trace=None):
        return TrialStreams(self, start, stop, trace)


class TrialStreams(object):
    """Pre-fetched draws for one contiguous range of trials.

    If ``trace`` is a list, every access is appended to it as
    ``(trial, role)`` so callers can check the order a referee consumed
    its substreams in.
    """

    def __init__(self, stream, start, stop, trace=None):
        self.start = start
        self.stop = stop
        self.trace = trace
        self._blocks = {}
        self._stream = stream
        log.debug('Fetching draws for trials %d..%d', start, stop - 1)
        for role in ROLES:
            self._blocks[role] = stream.block(role, start, stop)

    def draw(self, role, trial):
        if not self.start <= trial < self.stop:
            raise IndexError('trial %d outside %d..%d' % (trial, self.start, self.stop))
        if self.trace is not None:
            self.trace.append((trial, role))
        return self._blocks[role][trial - self.start]


def draw_setting(uniforms):
    return 1 + int(uniforms[0] * 3)


def pick(uniform, choices, weights):
    """Pick from ``choices`` with (exact) ``weights`` using one uniform.

    Zero-weight choices are never returned.
    """
    acc = 0.0
    last = None
    for choice, weight in zip(choices, weights):
        if weight <= 0:
            continue
        acc += float(weight)
        last = choice
        if uniform < acc:
            return choice
    if last is None:
        raise ValueError('no choice has positive weight')
    return last
