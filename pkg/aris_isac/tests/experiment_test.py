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
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import os
import shutil
import tempfile
import unittest

import numpy as np
import pandas as pd
import pytest

from aris_isac import ExperimentConfig, compare_schemes, load_config, run_experiment
from aris_isac.configuration_utils import db_to_linear
from aris_isac.experiment import CHECKPOINT_DIR, RUNS_FILE, TRACE_COLUMNS

TINY = {'episodes': 2, 'hidden_sizes': [8], 'batch': 8, 'mle_grid': 11, 'phase_iterations': 2}


def tiny_config(**overrides):
    return load_config(profile='desk', overrides=dict(TINY, **overrides))


def _read(path):
    with open(path, 'rb') as f:
        return f.read()


class RunExperimentTest(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_outputs_and_headers(self):
        out = os.path.join(self.tmpdir, 'run')
        result = run_experiment(tiny_config(), output_dir=out)
        for name in ('reward.csv', 'trace.csv', 'best_trace.csv', 'diagnostics.csv', 'meta.json'):
            self.assertTrue(os.path.exists(os.path.join(out, name)), name)
        with open(os.path.join(out, 'trace.csv')) as f:
            self.assertEqual(f.readline().strip(), ','.join(TRACE_COLUMNS))
        with open(os.path.join(out, 'reward.csv')) as f:
            self.assertEqual(f.readline().strip(), 'episode,reward')
        self.assertEqual(len(result.rewards), 2)
        self.assertEqual(len(result.trace), 12)
        self.assertTrue(os.path.exists(os.path.join(out, CHECKPOINT_DIR, 'pytorch_model.bin')))

    def test_byte_identical_reruns(self):
        first, second = os.path.join(self.tmpdir, 'a'), os.path.join(self.tmpdir, 'b')
        run_experiment(tiny_config(seed=3), output_dir=first)
        run_experiment(tiny_config(seed=3), output_dir=second)
        for name in ('reward.csv', 'trace.csv'):
            self.assertEqual(_read(os.path.join(first, name)), _read(os.path.join(second, name)), name)

    def test_fixed_ris_phases_stay_constant(self):
        result = run_experiment(tiny_config(scheme='fixed-ris'))
        self.assertEqual(result.diagnostics['phase_0'].nunique(), 1)

    def test_checkpoint_evaluation_reproduces_trace(self):
        out = os.path.join(self.tmpdir, 'train')
        trained = run_experiment(tiny_config(), output_dir=out)
        self.assertEqual(ExperimentConfig.from_pretrained(os.path.join(out, CHECKPOINT_DIR)), tiny_config())
        evaluated = run_experiment(tiny_config(), checkpoint=os.path.join(out, CHECKPOINT_DIR))
        pd.testing.assert_frame_equal(trained.trace, evaluated.trace)
        self.assertEqual(len(evaluated.rewards), 0)
        self.assertEqual(evaluated.final_reward(), evaluated.eval_reward)


class CompareSchemesTest(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_single_seed_has_zero_spread(self):
        configs = [tiny_config(scheme='proposed'), tiny_config(scheme='no-nsp')]
        summary = compare_schemes(configs, [0], output_dir=self.tmpdir, max_workers=1)
        self.assertEqual(sorted(summary['scheme']), ['proposed', 'without_nsp'])
        np.testing.assert_array_equal(summary['final_reward_std'], 0.0)
        np.testing.assert_array_equal(summary['num_seeds'], 1)
        runs = pd.read_csv(os.path.join(self.tmpdir, RUNS_FILE))
        self.assertEqual(len(runs), 2)

    def test_needs_a_seed(self):
        with self.assertRaises(ValueError):
            compare_schemes([tiny_config()], [])


@pytest.mark.slow
class DeskScaleTest(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.tmpdir = tempfile.mkdtemp()
        base = load_config(profile='desk')
        configs = [ExperimentConfig.from_dict(dict(base.to_dict(), scheme=s))
                   for s in ('proposed', 'fixed_ris', 'without_nsp')]
        compare_schemes(configs, range(5), output_dir=cls.tmpdir)
        cls.runs = pd.read_csv(os.path.join(cls.tmpdir, RUNS_FILE))

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.tmpdir)

    def _scheme(self, name):
        return self.runs[self.runs['scheme'] == name].sort_values('seed').reset_index(drop=True)

    def test_proposed_beats_matched_receiver(self):
        proposed, without_nsp = self._scheme('proposed'), self._scheme('without_nsp')
        wins = int(np.sum(proposed['final_reward'].values > without_nsp['final_reward'].values))
        self.assertGreaterEqual(wins, 4)

    def test_proposed_localizes_better_than_fixed_ris(self):
        proposed, fixed = self._scheme('proposed'), self._scheme('fixed_ris')
        self.assertLessEqual(proposed['final_see'].median(), fixed['final_see'].median())
        self.assertLess(proposed['final_see'].median(), proposed['see_slot_2'].median())


@pytest.mark.slow
class SinrSweepTest(unittest.TestCase):

    def test_aris_moves_toward_users_as_threshold_grows(self):
        tmpdir = tempfile.mkdtemp()
        try:
            base = load_config(profile='desk')
            configs = [ExperimentConfig.from_dict(dict(base.to_dict(), sinr_threshold=db_to_linear(db)))
                       for db in (6.0, 10.0, 14.0)]
            summary = compare_schemes(configs, range(3), output_dir=tmpdir).sort_values('sinr_threshold_db')
            axis = np.array([base.user_centroid_x - base.target_x, base.user_centroid_y - base.target_y])
            axis /= np.linalg.norm(axis)
            projections = summary[['converged_x', 'converged_y']].values @ axis
            self.assertTrue(np.all(np.diff(projections) > 0), projections)
        finally:
            shutil.rmtree(tmpdir)


if __name__ == '__main__':
    unittest.main()
