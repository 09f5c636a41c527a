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

import math
import unittest

import numpy as np
import pytest

from aris_isac import MdpState, Position3, Scene, SchemeId

from .channel_tests_commons import small_environment


def constant_policy(vx, vy):
    return lambda observation: np.array([vx, vy])


def turning_policy(v=8.0, leg=4):
    """ Flies a square: ``leg`` slots per side. """
    directions = [(v, v), (-v, v), (-v, -v), (v, -v)]
    counter = {'slot': 0}

    def policy(observation):
        direction = directions[(counter['slot'] // leg) % 4]
        counter['slot'] += 1
        return np.array(direction)
    return policy


class SchemeIdTest(unittest.TestCase):

    def test_parse(self):
        self.assertIs(SchemeId.parse('proposed'), SchemeId.PROPOSED)
        self.assertIs(SchemeId.parse('fixed-ris'), SchemeId.FIXED_RIS)
        self.assertIs(SchemeId.parse('no-nsp'), SchemeId.WITHOUT_NSP)
        self.assertIs(SchemeId.parse(SchemeId.FIXED_RIS), SchemeId.FIXED_RIS)
        with self.assertRaises(ValueError):
            SchemeId.parse('greedy')


class SceneTest(unittest.TestCase):

    def test_default_scene(self):
        scene = Scene.default(num_users=3)
        self.assertEqual(len(scene.users), 3)
        self.assertEqual(scene.aris_start, (0.0, -80.0, 50.0))
        cx, cy = scene.user_centroid
        self.assertAlmostEqual(cx, -50.0)
        self.assertAlmostEqual(cy, -40.0)

    def test_ground_nodes_validated(self):
        scene = Scene.default()
        with self.assertRaises(ValueError):
            Scene(scene.ap, scene.users, Position3(0.0, 0.0, 5.0), scene.map, scene.aris_start)
        with self.assertRaises(ValueError):
            Scene(scene.ap, scene.users, scene.target, scene.map, Position3(0.0, 0.0, 20.0))


class IsacEnvironmentTest(unittest.TestCase):

    def test_reset_state(self):
        env = small_environment()
        self.assertEqual(env.reset(seed=0), MdpState(0.0, -80.0, 0.0, 0.0))
        np.testing.assert_allclose(env.observation(), [0.0, -0.8, 0.0, 0.0])
        self.assertEqual(env.observation().dtype, np.float32)

    def test_out_of_bounds_reverts_and_penalizes(self):
        env = small_environment(aris_start=(96.0, 0.0))
        outcome = env.step(np.array([8.0, 0.0]))
        self.assertTrue(outcome.out_of_bounds)
        self.assertEqual(outcome.aris, (96.0, 0.0, 50.0))
        self.assertEqual(outcome.reward, -10.0)

    def test_actions_clamped(self):
        env = small_environment()
        outcome = env.step(np.array([20.0, -20.0]))
        self.assertEqual(outcome.aris, (8.0, -88.0, 50.0))

    def test_episode_length(self):
        env = small_environment()
        outcomes = env.run_episode(constant_policy(3.0, 4.0), seed=0)
        self.assertEqual(len(outcomes), 12)
        self.assertEqual([o.slot for o in outcomes], list(range(1, 13)))
        self.assertTrue(outcomes[-1].done)
        self.assertFalse(any(o.done for o in outcomes[:-1]))
        with self.assertRaises(ValueError):
            env.step(np.zeros(2))

    def test_reward_is_inverse_crb(self):
        env = small_environment()
        for outcome in env.run_episode(turning_policy(), seed=1):
            expected = 0.0 if math.isinf(outcome.crb) else 1.0 / outcome.crb
            self.assertAlmostEqual(outcome.reward, expected - (10.0 if outcome.out_of_bounds else 0.0))
            self.assertTrue(outcome.measured)

    def test_deterministic_under_seed(self):
        first = [(o.reward, o.see) for o in small_environment().run_episode(turning_policy(), seed=3)]
        second = [(o.reward, o.see) for o in small_environment().run_episode(turning_policy(), seed=3)]
        self.assertEqual(first, second)

    def test_hovering_gives_no_information(self):
        env = small_environment()
        for outcome in env.run_episode(constant_policy(0.0, 0.0), seed=0):
            self.assertTrue(math.isinf(outcome.crb))
            self.assertEqual(outcome.reward, 0.0)

    def test_fixed_ris_keeps_phases(self):
        env = small_environment(scheme='fixed_ris')
        outcomes = env.run_episode(constant_policy(4.0, 4.0), seed=0)
        for outcome in outcomes[1:]:
            np.testing.assert_array_equal(outcome.solution.phases, outcomes[0].solution.phases)

    def test_matched_receiver_leaves_more_interference(self):
        proposed = small_environment().run_episode(constant_policy(4.0, 4.0), seed=0)
        without_nsp = small_environment(scheme=SchemeId.WITHOUT_NSP).run_episode(constant_policy(4.0, 4.0), seed=0)
        for a, b in zip(proposed, without_nsp):
            if math.isnan(a.residual_interference) or math.isnan(b.residual_interference):
                continue
            self.assertGreaterEqual(b.residual_interference, a.residual_interference)

    def test_scheme_override_per_step(self):
        env = small_environment()
        outcome = env.step(np.array([4.0, 4.0]), scheme='no-nsp')
        v = outcome.solution.f_rx
        self.assertAlmostEqual(np.linalg.norm(v), 1.0)

    @pytest.mark.slow
    def test_square_flight_localizes_target(self):
        episodes = [small_environment().run_episode(turning_policy(), seed=s) for s in range(50)]
        final = np.median([outcomes[-1].see for outcomes in episodes])
        early = np.median([outcomes[1].see for outcomes in episodes])
        self.assertLess(final, early)


if __name__ == '__main__':
    unittest.main()
