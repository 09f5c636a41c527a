# coding=utf-8
# Copyright 2024 The ARIS-ISAC Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
""" Experiment runner: training or checkpoint evaluation, scheme comparisons and CSV traces. """

from __future__ import absolute_import, division, print_function

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from io import open

import numpy as np
import pandas as pd

from .agent import evaluate_policy, train
from .configuration_utils import ExperimentConfig
from .environment import SchemeId
from .modeling_ddpg import DdpgModel

logger = logging.getLogger(__name__)

REWARD_COLUMNS = ['episode', 'reward']
TRACE_COLUMNS = ['slot', 'aris_x', 'aris_y', 'est_x', 'est_y', 'see', 'crb', 'min_sinr', 'feasible']
SUMMARY_FILE = 'summary.csv'
RUNS_FILE = 'runs.csv'
CHECKPOINT_DIR = 'checkpoint'
FLOAT_FORMAT = '%.10g'


def trace_frame(outcomes):
    """ One row per slot with the columns of ``trace.csv``. """
    rows = [{'slot': o.slot,
             'aris_x': o.aris.x,
             'aris_y': o.aris.y,
             'est_x': o.next_state.est_target_x,
             'est_y': o.next_state.est_target_y,
             'see': o.see,
             'crb': o.crb,
             'min_sinr': o.solution.min_sinr,
             'feasible': int(o.solution.feasible)} for o in outcomes]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def diagnostics_frame(outcomes):
    """ Per-slot residual interference, first RIS phase and user SINRs. """
    rows = []
    for o in outcomes:
        row = {'slot': o.slot,
               'residual_interference': o.residual_interference,
               'phase_0': float(np.angle(o.solution.phases[0])),
               'measured': int(o.measured),
               'out_of_bounds': int(o.out_of_bounds),
               'reward': o.reward}
        for k, value in enumerate(o.solution.sinr):
            row['sinr_{}'.format(k)] = float(value)
        rows.append(row)
    return pd.DataFrame(rows)


class ResultTrace(object):
    """ Reward-vs-episode rows, evaluation trace and per-slot diagnostics of one run. """

    def __init__(self, rewards, trace, diagnostics, best_trace=None, config=None):
        self.rewards = rewards
        self.trace = trace
        self.diagnostics = diagnostics
        self.best_trace = best_trace if best_trace is not None else pd.DataFrame(columns=TRACE_COLUMNS)
        self.config = config

    @property
    def eval_reward(self):
        return float(self.diagnostics['reward'].sum()) if len(self.diagnostics) else 0.0

    @property
    def final_see(self):
        return float(self.trace['see'].iloc[-1])

    def final_reward(self, window=20):
        """ Mean reward of the last ``window`` training episodes, evaluation reward without training. """
        if len(self.rewards) == 0:
            return self.eval_reward
        return float(self.rewards['reward'].iloc[-window:].mean())

    def converged_position(self, slots=3):
        tail = self.trace.iloc[-slots:]
        return float(tail['aris_x'].mean()), float(tail['aris_y'].mean())

    def save(self, output_dir):
        """ Write ``reward.csv``, ``trace.csv``, ``best_trace.csv``, ``diagnostics.csv`` and ``meta.json``. """
        if not os.path.exists(output_dir):
            os.makedirs(output_dir)
        self.rewards.to_csv(os.path.join(output_dir, 'reward.csv'), index=False, float_format=FLOAT_FORMAT)
        self.trace.to_csv(os.path.join(output_dir, 'trace.csv'), index=False, float_format=FLOAT_FORMAT)
        self.best_trace.to_csv(os.path.join(output_dir, 'best_trace.csv'), index=False, float_format=FLOAT_FORMAT)
        self.diagnostics.to_csv(os.path.join(output_dir, 'diagnostics.csv'), index=False, float_format=FLOAT_FORMAT)
        if self.config is not None:
            write_meta(self.config, output_dir)
        logger.info("Saving result traces to %s", output_dir)


def write_meta(config, output_dir):
    meta = {'config': config.to_dict(),
            'seed': config.seed,
            'scheme': config.scheme,
            'db_originals': config.db_originals(),
            'units': {'power': 'mW', 'gain': 'linear', 'distance': 'm', 'crb': 'm^2', 'see': 'm^2'}}
    with open(os.path.join(output_dir, 'meta.json'), 'w', encoding='utf-8') as writer:
        writer.write(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def run_experiment(config, checkpoint=None, output_dir=None):
    """ Train (or load ``checkpoint``) and evaluate the greedy policy once, seeded by ``config.seed``.

        Results are written to ``output_dir`` when given, with the trained networks and this configuration
        under ``checkpoint/``.
    """
    env = config.build_environment()
    rewards = pd.DataFrame(columns=REWARD_COLUMNS)
    best_trace = None
    if checkpoint is not None:
        logger.info("Evaluating checkpoint %s", checkpoint)
        model = DdpgModel.from_pretrained(checkpoint)
    else:
        log_dir = os.path.join(output_dir, 'runs') if output_dir else None
        model, history = train(env, config.build_train_config(log_dir=log_dir), config.build_model_config(),
                               seed=config.seed)
        rewards = pd.DataFrame({'episode': np.arange(len(history.rewards)), 'reward': history.rewards},
                               columns=REWARD_COLUMNS)
        best_trace = trace_frame(history.best_trace)

    outcomes = evaluate_policy(env, model, seed=config.seed)
    result = ResultTrace(rewards, trace_frame(outcomes), diagnostics_frame(outcomes), best_trace, config)
    if output_dir is not None:
        result.save(output_dir)
        if checkpoint is None:
            checkpoint_dir = os.path.join(output_dir, CHECKPOINT_DIR)
            if not os.path.exists(checkpoint_dir):
                os.makedirs(checkpoint_dir)
            model.save_pretrained(checkpoint_dir)
            config.save_pretrained(checkpoint_dir)
    return result


def _run_one(config_dict, seed, output_dir):
    config = ExperimentConfig.from_dict(dict(config_dict, seed=seed))
    run_dir = None
    if output_dir is not None:
        run_dir = os.path.join(output_dir, '{}_sinr{:g}dB'.format(
            SchemeId.parse(config.scheme).cli_name, round(10 * math.log10(config.sinr_threshold), 6)),
            'seed_{}'.format(seed))
    result = run_experiment(config, output_dir=run_dir)
    x, y = result.converged_position()
    return {'scheme': config.scheme,
            'sinr_threshold_db': round(10 * math.log10(config.sinr_threshold), 6),
            'seed': seed,
            'final_reward': result.final_reward(),
            'eval_reward': result.eval_reward,
            'final_see': result.final_see,
            'see_slot_2': float(result.trace['see'].iloc[min(1, len(result.trace) - 1)]),
            'converged_x': x,
            'converged_y': y}


def summarize(runs):
    """ Per (scheme, Gamma_th) mean and population std of the per-seed results. """
    grouped = runs.groupby(['scheme', 'sinr_threshold_db'], sort=True)
    summary = grouped.agg(num_seeds=('seed', 'count'),
                          final_reward_mean=('final_reward', 'mean'),
                          final_reward_std=('final_reward', lambda s: float(np.std(s, ddof=0))),
                          final_see_mean=('final_see', 'mean'),
                          final_see_std=('final_see', lambda s: float(np.std(s, ddof=0))),
                          final_see_median=('final_see', 'median'),
                          converged_x=('converged_x', 'mean'),
                          converged_y=('converged_y', 'mean'))
    return summary.reset_index()


def compare_schemes(configs, seeds, output_dir=None, max_workers=None):
    """ Run every config for every seed and summarize.

        ``max_workers=1`` runs in-process; otherwise runs go to a process pool. Rows are sorted by
        (scheme, Gamma_th, seed) so the output does not depend on completion order.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("compare_schemes needs at least one seed")
    jobs = [(config.to_dict(), seed) for config in configs for seed in seeds]
    logger.info("***** Running comparison *****")
    logger.info("===> Configurations = %d, seeds = %d", len(configs), len(seeds))

    rows = []
    if max_workers == 1:
        for config_dict, seed in jobs:
            rows.append(_run_one(config_dict, seed, output_dir))
    else:
        with ProcessPoolExecutor(max_workers=max_workers) as executor:
            futures = {executor.submit(_run_one, config_dict, seed, output_dir): seed for config_dict, seed in jobs}
            for future in as_completed(futures):
                rows.append(future.result())

    runs = pd.DataFrame(rows).sort_values(['scheme', 'sinr_threshold_db', 'seed']).reset_index(drop=True)
    summary = summarize(runs)
    if output_dir is not None:
        if not os.path.exists(output_dir):
            os.makedirs(output_dir)
        runs.to_csv(os.path.join(output_dir, RUNS_FILE), index=False, float_format=FLOAT_FORMAT)
        summary.to_csv(os.path.join(output_dir, SUMMARY_FILE), index=False, float_format=FLOAT_FORMAT)
    return summary
