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
""" DDPG training of the ARIS trajectory: replay buffer, TD targets, network updates and the episode loop. """

from __future__ import absolute_import, division, print_function

import logging
from collections import deque, namedtuple

import numpy as np
import torch
from torch.nn import functional as F
from tqdm import trange

from .modeling_ddpg import DdpgConfig, DdpgModel
from .optimization import ExponentialNoiseSchedule, build_optimizers, explore

logger = logging.getLogger(__name__)

Transition = namedtuple('Transition', ['state', 'action', 'reward', 'next_state', 'done'])


class ReplayBuffer(object):
    """ Fixed-capacity ring of transitions; the oldest entry is evicted first. """

    def __init__(self, capacity=8000):
        if int(capacity) < 1:
            raise ValueError("capacity must be >= 1, got {}".format(capacity))
        self.capacity = int(capacity)
        self.entries = deque(maxlen=self.capacity)

    def __len__(self):
        return len(self.entries)

    def push(self, transition):
        self.entries.append(transition)

    def sample(self, batch_size, rng):
        """ Uniform mini-batch without replacement. """
        idx = rng.choice(len(self.entries), size=batch_size, replace=False)
        return [self.entries[i] for i in idx]


class TrainConfig(object):
    r""" Hyper-parameters of DDPG training.

    Parameters:
        ``gamma``: discount factor in [0, 1].
        ``tau``: soft-update rate in (0, 1].
        ``lr``: Adam learning rate of both networks.
        ``batch``: mini-batch size.
        ``buffer_capacity``: replay buffer capacity.
        ``noise_std``: initial exploration noise in m/s.
        ``noise_decay``: per-episode multiplicative decay of the noise.
        ``episodes``: number of training episodes (E_max).
        ``updates_per_episode``: gradient steps after each episode.
        ``tensorboard``: log scalars with ``tensorboardX``.
    """

    def __init__(self, gamma=0.95, tau=0.005, lr=3e-4, batch=70, buffer_capacity=8000, noise_std=2.0,
                 noise_decay=0.995, episodes=500, updates_per_episode=1, tensorboard=False, log_dir=None):
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("Invalid gamma: {} - should be in [0.0, 1.0]".format(gamma))
        if not 0.0 < tau <= 1.0:
            raise ValueError("Invalid tau: {} - should be in (0.0, 1.0]".format(tau))
        if int(batch) < 1:
            raise ValueError("Invalid batch: {} - should be >= 1".format(batch))
        if int(episodes) < 1:
            raise ValueError("Invalid episodes: {} - should be >= 1".format(episodes))
        self.gamma = float(gamma)
        self.tau = float(tau)
        self.lr = float(lr)
        self.batch = int(batch)
        self.buffer_capacity = int(buffer_capacity)
        self.noise_std = float(noise_std)
        self.noise_decay = float(noise_decay)
        self.episodes = int(episodes)
        self.updates_per_episode = int(updates_per_episode)
        self.tensorboard = bool(tensorboard)
        self.log_dir = log_dir


def _to_tensors(transitions, dtype):
    states = torch.tensor(np.stack([t.state for t in transitions]), dtype=dtype)
    actions = torch.tensor(np.stack([t.action for t in transitions]), dtype=dtype)
    rewards = torch.tensor([t.reward for t in transitions], dtype=dtype)
    next_states = torch.tensor(np.stack([t.next_state for t in transitions]), dtype=dtype)
    dones = torch.tensor([float(t.done) for t in transitions], dtype=dtype)
    return states, actions, rewards, next_states, dones


def td_target(model, rewards, next_states, dones, gamma):
    """ y = r + gamma * Q'(s', mu'(s')), and y = r on terminal transitions. """
    with torch.no_grad():
        bootstrap = model.critic_target(next_states, model.actor_target(next_states))
    return rewards + gamma * (1.0 - dones) * bootstrap


def critic_loss(model, states, actions, targets):
    return F.mse_loss(model.critic(states, actions), targets)


def actor_objective(model, states):
    """ Mean Q(s, mu(s)), the quantity the actor ascends. """
    return model.critic(states, model.actor(states)).mean()


def update(model, buffer, config, optimizers, rng):
    """ One critic step then one actor step on a uniform mini-batch, followed by soft target updates.

        Returns a dict with ``critic_loss``, ``actor_objective`` and ``updated`` (``False`` when the
        buffer holds fewer than ``config.batch`` transitions).
    """
    if len(buffer) < config.batch:
        return {'critic_loss': float('nan'), 'actor_objective': float('nan'), 'updated': False}
    actor_optimizer, critic_optimizer = optimizers
    dtype = next(model.parameters()).dtype
    states, actions, rewards, next_states, dones = _to_tensors(buffer.sample(config.batch, rng), dtype)

    targets = td_target(model, rewards, next_states, dones, config.gamma)
    loss = critic_loss(model, states, actions, targets)
    critic_optimizer.zero_grad()
    loss.backward()
    critic_optimizer.step()

    objective = actor_objective(model, states)
    actor_optimizer.zero_grad()
    (-objective).backward()
    actor_optimizer.step()

    model.soft_update_targets(config.tau)
    return {'critic_loss': loss.item(), 'actor_objective': objective.item(), 'updated': True}


class TrainingHistory(object):
    """ Per-episode rewards and losses, plus the slot outcomes of the best episode. """

    def __init__(self):
        self.rewards = []
        self.critic_losses = []
        self.actor_objectives = []
        self.best_episode = -1
        self.best_reward = float('-inf')
        self.best_trace = []

    def record(self, episode, reward, diagnostics, outcomes):
        self.rewards.append(reward)
        self.critic_losses.append(diagnostics['critic_loss'])
        self.actor_objectives.append(diagnostics['actor_objective'])
        if reward > self.best_reward:
            self.best_episode, self.best_reward, self.best_trace = episode, reward, outcomes


def evaluate_policy(env, model, scheme=None, seed=None):
    """ Greedy rollout of the actor, no exploration noise. """
    model.eval()
    return env.run_episode(model.act, scheme=scheme, seed=seed)


def train(env, config, model_config=None, seed=0, scheme=None):
    """ Train a DDPG agent on ``env`` for ``config.episodes`` episodes.

        Networks are updated after every episode, ``config.updates_per_episode`` times.
        Returns ``(model, history)``.
    """
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    model_config = model_config or DdpgConfig(v_max=env.v_max)
    model = DdpgModel(model_config)
    optimizers = build_optimizers(model, config.lr)
    buffer = ReplayBuffer(config.buffer_capacity)
    schedule = ExponentialNoiseSchedule(config.noise_std, config.noise_decay)
    history = TrainingHistory()

    tb_writer = None
    if config.tensorboard:
        from tensorboardX import SummaryWriter
        tb_writer = SummaryWriter(log_dir=config.log_dir)

    logger.info("***** Running training *****")
    logger.info("===> Episodes Num = %d", config.episodes)
    logger.info("===> Slots per episode = %d", env.map.total_slots)
    logger.info("===> Batch size = %d, buffer capacity = %d", config.batch, config.buffer_capacity)
    logger.info("===> Scheme = %s", env.scheme.value if scheme is None else scheme)

    train_iterator = trange(config.episodes, desc="Episode")
    for episode in train_iterator:
        model.train()
        env.reset(seed=int(rng.integers(2 ** 31)))
        noise_std = schedule.std(episode)
        observation = env.observation()
        total, outcomes = 0.0, []
        while not env.done:
            action = explore(model.act(observation), noise_std, rng, env.v_max)
            outcome = env.step(action, scheme)
            next_observation = env.observation()
            buffer.push(Transition(observation, action, outcome.reward, next_observation, outcome.done))
            total += outcome.reward
            outcomes.append(outcome)
            observation = next_observation

        diagnostics = {'critic_loss': float('nan'), 'actor_objective': float('nan'), 'updated': False}
        for _ in range(config.updates_per_episode):
            diagnostics = update(model, buffer, config, optimizers, rng)
        history.record(episode, total, diagnostics, outcomes)
        train_iterator.set_postfix(reward='{:.4g}'.format(total))
        logger.debug("Episode %d reward %.6g noise %.4f critic loss %.6g", episode, total, noise_std,
                     diagnostics['critic_loss'])
        if tb_writer is not None:
            tb_writer.add_scalar('reward', total, episode)
            tb_writer.add_scalar('noise_std', noise_std, episode)
            if diagnostics['updated']:
                tb_writer.add_scalar('critic_loss', diagnostics['critic_loss'], episode)
                tb_writer.add_scalar('actor_objective', diagnostics['actor_objective'], episode)

    if tb_writer is not None:
        tb_writer.close()
    logger.info("Best episode %d with reward %.6g", history.best_episode, history.best_reward)
    return model, history
