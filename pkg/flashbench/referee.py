# -*- coding: utf-8 -*-
# See LICENSE.txt for licensing terms

"""Runs the experiment.

Every run follows the same order: the source prepares the hidden state,
the ambient condition is drawn, each wing's setting is drawn on its own,
and then each wing answers with nothing but what it is entitled to see.
"""

from collections import namedtuple
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor

from .core import SETTINGS, WINGS, OutcomePair, RunRecord, SettingPair
from .log import log
from .models import (
    JointModel,
    LocalModel,
    ModelValidationError,
    NonlocalControl,
    RunContext,
    check_distribution,
    ALL_INSTRUCTION_SETS,
    respond_instruction_set,
)
from .streams import RandomnessStream, draw_setting, pick

AMBIENT_MODES = ('per-run', 'source-visible')


class ExperimentConfig(object):
    def __init__(
        self, trials, seed, model, ambient_mode='per-run', shards=1, workers=1
    ):
        if int(trials) != trials or trials < 1:
            raise ValueError('trials must be a positive integer')
        if ambient_mode not in AMBIENT_MODES:
            raise ValueError('unknown ambient mode %r' % (ambient_mode,))
        if shards < 1 or workers < 1:
            raise ValueError('shards and workers must be positive')
        if not isinstance(model, (LocalModel, JointModel)):
            raise TypeError('%r is neither a local nor a joint model' % (model,))
        self.trials = int(trials)
        self.seed = int(seed)
        self.model = model
        self.ambient_mode = ambient_mode
        self.shards = min(int(shards), self.trials)
        self.workers = int(workers)

    def shard_ranges(self):
        step, extra = divmod(self.trials, self.shards)
        start = 0
        for k in range(self.shards):
            stop = start + step + (1 if k < extra else 0)
            yield start, stop
            start = stop


def _run_local(model, streams, trial, source_visible):
    ambient = None
    if source_visible:
        ambient = model.ambient.draw(streams.draw('ambient', trial))
    state = model.prepare(RunContext(trial, ambient), streams.draw('source', trial))
    if not source_visible:
        ambient = model.ambient.draw(streams.draw('ambient', trial))
    a = draw_setting(streams.draw('settings-A', trial))
    b = draw_setting(streams.draw('settings-B', trial))
    ca = model.respond('A', a, state, ambient, streams.draw('wing-A', trial))
    cb = model.respond('B', b, state, ambient, streams.draw('wing-B', trial))
    return RunRecord(trial, SettingPair(a, b), OutcomePair(ca, cb))


def _run_joint(model, streams, trial):
    state = model.prepare(RunContext(trial, None), streams.draw('source', trial))
    ambient = model.ambient.draw(streams.draw('ambient', trial))
    a = draw_setting(streams.draw('settings-A', trial))
    b = draw_setting(streams.draw('settings-B', trial))
    outcome = model.respond_pair(SettingPair(a, b), state, ambient)
    return RunRecord(trial, SettingPair(a, b), outcome)


def run_shard(cfg, start, stop, trace=None):
    """Records for trials ``start`` to ``stop - 1`` of ``cfg``."""
    streams = RandomnessStream(cfg.seed).trial_streams(start, stop, trace)
    model = cfg.model
    source_visible = cfg.ambient_mode == 'source-visible'
    records = []
    for trial in range(start, stop):
        try:
            if isinstance(model, LocalModel):
                records.append(_run_local(model, streams, trial, source_visible))
            else:
                records.append(_run_joint(model, streams, trial))
        except ModelValidationError as e:
            raise ModelValidationError(e.msg, trial=trial)
    return records


def _run_shard_args(args):
    return run_shard(*args)


def run_experiment(cfg, trace=None):
    """Run ``cfg.trials`` trials; the records are ordered by trial.

    Shards only change how the work is split, never the records.
    """
    ranges = list(cfg.shard_ranges())
    log.info(
        'Running %d trials of %s with seed %d in %d shard(s)',
        cfg.trials,
        cfg.model.kind,
        cfg.seed,
        len(ranges),
    )
    if cfg.workers > 1 and len(ranges) > 1 and trace is None:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            shards = list(
                pool.map(_run_shard_args, [(cfg, start, stop) for start, stop in ranges])
            )
    else:
        shards = [run_shard(cfg, start, stop, trace) for start, stop in ranges]
    records = []
    for shard in shards:
        records.extend(shard)
    return records


class History(Sequence):
    """Read-only view of the runs completed so far."""

    def __init__(self, records):
        self._records = records

    def __getitem__(self, index):
        return self._records[index]

    def __len__(self):
        return len(self._records)


def run_adaptive_experiment(strategy, trials, seed):
    """Run an adaptive strategy, one run after the other.

    Before each run the strategy sees every earlier record and returns a
    distribution over instruction sets; the set for the run is drawn from
    it on the source substream before any setting is drawn.
    """
    if int(trials) != trials or trials < 1:
        raise ValueError('trials must be a positive integer')
    log.info('Running %d adaptive trials of %s with seed %d', trials, strategy.kind, seed)
    streams = RandomnessStream(seed).trial_streams(0, trials)
    records = []
    history = History(records)
    for trial in range(trials):
        try:
            weights = check_distribution(strategy.next(history))
        except ModelValidationError as e:
            raise ModelValidationError(e.msg, trial=trial)
        iset = pick(
            streams.draw('source', trial)[0],
            ALL_INSTRUCTION_SETS,
            [weights[s] for s in ALL_INSTRUCTION_SETS],
        )
        streams.draw('ambient', trial)
        a = draw_setting(streams.draw('settings-A', trial))
        b = draw_setting(streams.draw('settings-B', trial))
        outcome = OutcomePair(
            respond_instruction_set(iset, a), respond_instruction_set(iset, b)
        )
        records.append(RunRecord(trial, SettingPair(a, b), outcome))
    return records


LocalityResult = namedtuple('LocalityResult', 'passed witness')
LocalityWitness = namedtuple(
    'LocalityWitness', 'probe wing setting far_settings colors tau'
)


def _wing_responder(model):
    """A uniform (wing, setting, far setting, ...) view of a model.

    A local model never receives the far setting. The nonlocal control
    is the only joint model that can answer for a single wing.
    """
    if isinstance(model, LocalModel):

        def respond(wing, setting, far_setting, state, ambient, randomness):
            return model.respond(wing, setting, state, ambient, randomness)

        return respond
    if isinstance(model, NonlocalControl):

        def respond(wing, setting, far_setting, state, ambient, randomness):
            return model.respond_wing(wing, setting, far_setting, state, ambient)

        return respond
    raise TypeError('%r cannot answer for a single wing' % (model,))


def locality_replay_check(model, seed, probes=1000):
    """Replay one wing while changing only the other wing's setting.

    For each probe a hidden state, ambient condition, own setting and
    wing-local draws are fixed; the wing is then asked again under each
    far setting. Any change of colour is returned as a witness.
    """
    respond = _wing_responder(model)
    streams = RandomnessStream(seed).trial_streams(0, probes)
    for probe in range(probes):
        state = model.prepare(RunContext(probe, None), streams.draw('source', probe))
        ambient = model.ambient.draw(streams.draw('ambient', probe))
        for wing in WINGS:
            setting = draw_setting(streams.draw('settings-%s' % wing, probe))
            local = streams.draw('wing-%s' % wing, probe)
            seen = {}
            for far in SETTINGS:
                seen[far] = respond(wing, setting, far, state, ambient, local)
            colors = set(seen.values())
            if len(colors) > 1:
                f1 = SETTINGS[0]
                f2 = next(f for f in SETTINGS if seen[f] is not seen[f1])
                witness = LocalityWitness(
                    probe, wing, setting, (f1, f2), (seen[f1], seen[f2]), ambient.tau
                )
                log.info('Locality broken: %s', witness)
                return LocalityResult(False, witness)
    return LocalityResult(True, None)
