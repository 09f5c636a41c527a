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
"""Exploration noise schedules and optimizers for DDPG training."""

import logging

import numpy as np
from torch.optim import Adam

logger = logging.getLogger(__name__)


class ConstantNoiseSchedule(object):
    """ Constant exploration noise.
    """
    def __init__(self, noise_std):
        if noise_std < 0.0:
            raise ValueError("Invalid noise_std: {} - should be >= 0.0".format(noise_std))
        self.noise_std = noise_std

    def std(self, episode):
        return self.noise_std


class ExponentialNoiseSchedule(ConstantNoiseSchedule):
    """ Exponential decay of the exploration noise.
        Multiplies the standard deviation by `decay` after every episode, never going below `min_std`.
    """
    def __init__(self, noise_std, decay, min_std=0.0):
        super(ExponentialNoiseSchedule, self).__init__(noise_std)
        if not 0.0 < decay <= 1.0:
            raise ValueError("Invalid decay: {} - should be in (0.0, 1.0]".format(decay))
        self.decay = decay
        self.min_std = min_std

    def std(self, episode):
        return max(self.min_std, self.noise_std * self.decay ** episode)


def explore(action, noise_std, rng, v_max):
    """ Gaussian perturbation of ``action`` clamped to [-v_max, v_max] per component. """
    action = np.asarray(action, dtype=np.float64)
    if noise_std > 0.0:
        action = action + rng.normal(0.0, noise_std, size=action.shape)
    return np.clip(action, -v_max, v_max)


def build_optimizers(model, lr):
    """ Separate Adam optimizers for the actor and the critic of ``model``. """
    if lr < 0.0:
        raise ValueError("Invalid learning rate: {} - should be >= 0.0".format(lr))
    return Adam(model.actor.parameters(), lr=lr), Adam(model.critic.parameters(), lr=lr)
