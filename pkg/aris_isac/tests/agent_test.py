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

import unittest

import numpy as np
import torch

from aris_isac import (DdpgConfig, DdpgModel, ReplayBuffer, TrainConfig, Transition, actor_objective, build_optimizers,
                       critic_loss, evaluate_policy, td_target, train, update)

from .channel_tests_commons import small_environment


def _transition(i, done=False):
    return Transition(np.full(4, i, dtype=np.float32), np.zeros(2), float(i), np.full(4, i + 1, dtype=np.float32), done)


def _finite_difference_grad(fn, params, eps=1e-7):
    grads = []
    for p in params:
        g = torch.zeros_like(p)
        flat, gflat = p.data.view(-1), g.view(-1)
        for i in range(flat.numel()):
            old = flat[i].item()
            flat[i] = old + eps
            plus = fn().item()
            flat[i] = old - eps
            minus = fn().item()
            flat[i] = old
            gflat[i] = (plus - minus) / (2 * eps)
        grads.append(g)
    return torch.cat([g.reshape(-1) for g in grads])


class ReplayBufferTest(unittest.TestCase):

    def test_capacity_evicts_oldest(self):
        buffer = ReplayBuffer(8000)
        for i in range(8001):
            buffer.push(_transition(i))
        self.assertEqual(len(buffer), 8000)
        self.assertEqual(buffer.entries[0].reward, 1.0)
        self.assertEqual(buffer.entries[-1].reward, 8000.0)

    def test_sample_without_replacement(self):
        buffer = ReplayBuffer(100)
        for i in range(10):
            buffer.push(_transition(i))
        batch = buffer.sample(10, np.random.default_rng(0))
        self.assertEqual(sorted(t.reward for t in batch), [float(i) for i in range(10)])
        with self.assertRaises(ValueError):
            ReplayBuffer(0)


class TrainConfigTest(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(ValueError):
            TrainConfig(gamma=1.5)
        with self.assertRaises(ValueError):
            TrainConfig(tau=0.0)
        with self.assertRaises(ValueError):
            TrainConfig(episodes=0)


class TemporalDifferenceTest(unittest.TestCase):

    def setUp(self):
        torch.manual_seed(0)
        self.model = DdpgModel(DdpgConfig(hidden_sizes=[8, 8]))
        last = self.model.critic_target.body[-1]
        with torch.no_grad():
            last.weight.zero_()
            last.bias.fill_(2.0)

    def test_bootstrapped_target(self):
        y = td_target(self.model, torch.tensor([1.0]), torch.randn(1, 4), torch.tensor([0.0]), 0.95)
        self.assertAlmostEqual(y.item(), 2.9, places=5)

    def test_no_discount(self):
        y = td_target(self.model, torch.tensor([1.0]), torch.randn(1, 4), torch.tensor([0.0]), 0.0)
        self.assertAlmostEqual(y.item(), 1.0, places=6)

    def test_terminal_transition(self):
        y = td_target(self.model, torch.tensor([1.0, 1.0]), torch.randn(2, 4), torch.tensor([1.0, 0.0]), 0.95)
        np.testing.assert_allclose(y.numpy(), [1.0, 2.9], rtol=1e-6)


class UpdateTest(unittest.TestCase):

    def test_insufficient_buffer_is_a_no_op(self):
        torch.manual_seed(0)
        model = DdpgModel(DdpgConfig(hidden_sizes=[8]))
        before = {k: v.clone() for k, v in model.state_dict().items()}
        buffer = ReplayBuffer()
        for i in range(5):
            buffer.push(_transition(i))
        result = update(model, buffer, TrainConfig(batch=70), build_optimizers(model, 1e-3), np.random.default_rng(0))
        self.assertFalse(result['updated'])
        for k, v in model.state_dict().items():
            self.assertTrue(torch.equal(v, before[k]), k)

    def test_update_moves_online_and_target_networks(self):
        torch.manual_seed(0)
        model = DdpgModel(DdpgConfig(hidden_sizes=[8]))
        actor_before = [p.clone() for p in model.actor.parameters()]
        target_before = [p.clone() for p in model.critic_target.parameters()]
        buffer = ReplayBuffer()
        for i in range(20):
            buffer.push(_transition(i, done=i % 5 == 4))
        result = update(model, buffer, TrainConfig(batch=16), build_optimizers(model, 1e-2), np.random.default_rng(0))
        self.assertTrue(result['updated'])
        self.assertTrue(np.isfinite(result['critic_loss']))
        self.assertTrue(any(not torch.equal(a, b) for a, b in zip(actor_before, model.actor.parameters())))
        self.assertTrue(any(not torch.equal(a, b) for a, b in zip(target_before, model.critic_target.parameters())))

    def _check_gradients(self, seed):
        torch.manual_seed(seed)
        model = DdpgModel(DdpgConfig(hidden_sizes=[5, 4, 3])).double()
        states = torch.randn(16, 4, dtype=torch.float64)
        actions = 4.0 * torch.randn(16, 2, dtype=torch.float64)
        targets = torch.randn(16, dtype=torch.float64)

        critic_params = list(model.critic.parameters())
        model.critic.zero_grad()
        critic_loss(model, states, actions, targets).backward()
        analytic = torch.cat([p.grad.reshape(-1) for p in critic_params])
        with torch.no_grad():
            numeric = _finite_difference_grad(lambda: critic_loss(model, states, actions, targets), critic_params)
        self._assert_close(analytic, numeric, seed)

        actor_params = list(model.actor.parameters())
        model.actor.zero_grad()
        actor_objective(model, states).backward()
        analytic = torch.cat([p.grad.reshape(-1) for p in actor_params])
        with torch.no_grad():
            numeric = _finite_difference_grad(lambda: actor_objective(model, states), actor_params)
        self._assert_close(analytic, numeric, seed)

    def _assert_close(self, analytic, numeric, seed):
        # relative to the gradient norm, with an absolute floor for near-flat tanh outputs
        error = (analytic - numeric).norm().item()
        self.assertLessEqual(error, 1e-4 * numeric.norm().item() + 1e-6, "seed {}".format(seed))

    def test_gradients_match_finite_differences(self):
        for seed in range(50):
            self._check_gradients(seed)

    def test_critic_fixed_point_of_a_bandit(self):
        torch.manual_seed(0)
        rng = np.random.default_rng(0)
        model = DdpgModel(DdpgConfig(hidden_sizes=[32, 32]))
        buffer = ReplayBuffer()
        state = np.zeros(4, dtype=np.float32)
        actions = rng.uniform(-8.0, 8.0, size=(200, 2))
        for action in actions:
            buffer.push(Transition(state, action, 1.0, state, False))
        config = TrainConfig(gamma=0.0, batch=32, lr=1e-3)
        optimizers = build_optimizers(model, config.lr)
        for _ in range(2000):
            update(model, buffer, config, optimizers, rng)
        # Q is only pinned down at the stored state-action pairs
        states = torch.zeros(len(actions), 4)
        with torch.no_grad():
            values = model.critic(states, torch.tensor(actions, dtype=torch.float32))
        np.testing.assert_allclose(values.numpy(), 1.0, atol=1e-2)


class TrainTest(unittest.TestCase):

    def test_single_episode(self):
        env = small_environment(mle_grid=11, phase_iterations=2)
        model, history = train(env, TrainConfig(episodes=1), DdpgConfig(hidden_sizes=[8]), seed=0)
        self.assertEqual(len(history.rewards), 1)
        self.assertEqual(history.best_episode, 0)
        self.assertEqual(len(history.best_trace), 12)
        self.assertEqual(len(evaluate_policy(env, model, seed=0)), 12)

    def test_training_is_deterministic(self):
        def run():
            env = small_environment(mle_grid=11, phase_iterations=2)
            model, history = train(env, TrainConfig(episodes=2, batch=8), DdpgConfig(hidden_sizes=[8]), seed=5)
            return model, history

        model_a, history_a = run()
        model_b, history_b = run()
        self.assertEqual(history_a.rewards, history_b.rewards)
        self.assertEqual(history_a.critic_losses, history_b.critic_losses)
        for a, b in zip(model_a.actor.parameters(), model_b.actor.parameters()):
            self.assertTrue(torch.equal(a, b))


if __name__ == '__main__':
    unittest.main()
