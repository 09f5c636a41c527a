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
"""PyTorch DDPG actor and critic networks with their target copies."""

from __future__ import (absolute_import, division, print_function,
                        unicode_literals)

import copy
import json
import logging
import os
from io import open

import numpy as np
import torch
from torch import nn

logger = logging.getLogger(__name__)

CONFIG_NAME = "config.json"
WEIGHTS_NAME = "pytorch_model.bin"


class DdpgConfig(object):
    r"""
        :class:`~aris_isac.DdpgConfig` is the configuration class to store the architecture of a
        :class:`~aris_isac.DdpgModel`.

        Arguments:
            state_dim: Size of the observation vector.
            action_dim: Size of the action vector (horizontal velocity).
            hidden_sizes: Sizes of the fully connected hidden layers, shared by actor and critic.
            v_max: Bound of every action component in m/s.
    """

    def __init__(self, state_dim=4, action_dim=2, hidden_sizes=(300, 100, 100), v_max=8.0, **kwargs):
        self.state_dim = int(state_dim)
        self.action_dim = int(action_dim)
        self.hidden_sizes = [int(h) for h in hidden_sizes]
        self.v_max = float(v_max)
        if self.state_dim < 1 or self.action_dim < 1 or any(h < 1 for h in self.hidden_sizes):
            raise ValueError("Layer sizes must be >= 1, got state_dim={}, action_dim={}, hidden_sizes={}".format(
                self.state_dim, self.action_dim, self.hidden_sizes))
        if not self.v_max > 0:
            raise ValueError("v_max must be > 0, got {}".format(self.v_max))
        for key, value in kwargs.items():
            setattr(self, key, value)

    def save_pretrained(self, save_directory):
        """ Save the configuration to ``save_directory/config.json``. """
        assert os.path.isdir(save_directory), "Saving path should be a directory where the model and configuration can be saved"
        self.to_json_file(os.path.join(save_directory, CONFIG_NAME))

    @classmethod
    def from_pretrained(cls, path, **kwargs):
        """ Load from a directory written by :meth:`save_pretrained` or from a JSON file. """
        config_file = os.path.join(path, CONFIG_NAME) if os.path.isdir(path) else path
        logger.info("loading configuration file {}".format(config_file))
        config = cls.from_json_file(config_file)
        for key, value in kwargs.items():
            if hasattr(config, key):
                setattr(config, key, value)
        return config

    @classmethod
    def from_dict(cls, json_object):
        return cls(**json_object)

    @classmethod
    def from_json_file(cls, json_file):
        with open(json_file, "r", encoding='utf-8') as reader:
            text = reader.read()
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, DdpgConfig) and self.__dict__ == other.__dict__

    def __repr__(self):
        return str(self.to_json_string())

    def to_dict(self):
        return copy.deepcopy(self.__dict__)

    def to_json_string(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_json_file(self, json_file_path):
        with open(json_file_path, "w", encoding='utf-8') as writer:
            writer.write(self.to_json_string())


def _mlp(in_features, hidden_sizes, out_features):
    layers = []
    for size in hidden_sizes:
        layers.append(nn.Linear(in_features, size))
        layers.append(nn.ReLU())
        in_features = size
    layers.append(nn.Linear(in_features, out_features))
    return nn.Sequential(*layers)


class DdpgPreTrainedModel(nn.Module):
    """ Stores the :class:`DdpgConfig` and handles checkpoint saving and loading. """

    def __init__(self, config):
        super(DdpgPreTrainedModel, self).__init__()
        if not isinstance(config, DdpgConfig):
            raise ValueError(
                "Parameter config in `{}(config)` should be an instance of class `DdpgConfig`. "
                "To load a checkpoint use `model = {}.from_pretrained(PATH)`".format(
                    self.__class__.__name__, self.__class__.__name__))
        self.config = config

    def save_pretrained(self, save_directory):
        """ Save the weights and the configuration so :meth:`from_pretrained` restores them bit-exactly. """
        assert os.path.isdir(save_directory), "Saving path should be a directory where the model and configuration can be saved"
        self.config.save_pretrained(save_directory)
        output_model_file = os.path.join(save_directory, WEIGHTS_NAME)
        torch.save(self.state_dict(), output_model_file)
        logger.info("Model weights saved in {}".format(output_model_file))

    @classmethod
    def from_pretrained(cls, save_directory, config=None):
        if config is None:
            config = DdpgConfig.from_pretrained(save_directory)
        model = cls(config)
        archive_file = os.path.join(save_directory, WEIGHTS_NAME)
        logger.info("loading weights file {}".format(archive_file))
        state_dict = torch.load(archive_file, map_location='cpu')
        model.load_state_dict(state_dict)
        model.eval()
        return model


class ActorNetwork(DdpgPreTrainedModel):
    r""" Deterministic policy mu(s): ``v_max * tanh(MLP(s))``.

    Inputs:
        **states**: ``torch.FloatTensor`` of shape ``(batch_size, state_dim)``
    Outputs:
        **actions**: ``torch.FloatTensor`` of shape ``(batch_size, action_dim)`` in [-v_max, v_max]
    """

    def __init__(self, config):
        super(ActorNetwork, self).__init__(config)
        self.body = _mlp(config.state_dim, config.hidden_sizes, config.action_dim)

    def forward(self, states):
        return self.config.v_max * torch.tanh(self.body(states))


class CriticNetwork(DdpgPreTrainedModel):
    r""" Action-value function Q(s, a); state and action are concatenated at the first layer.

    Outputs:
        **values**: ``torch.FloatTensor`` of shape ``(batch_size,)``
    """

    def __init__(self, config):
        super(CriticNetwork, self).__init__(config)
        self.body = _mlp(config.state_dim + config.action_dim, config.hidden_sizes, 1)

    def forward(self, states, actions):
        return self.body(torch.cat([states, actions], dim=-1)).squeeze(-1)


def soft_update(target, source, tau):
    """ theta' <- tau * theta + (1 - tau) * theta' for every parameter, in place. """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("Invalid tau: {} - should be in [0.0, 1.0]".format(tau))
    target_params = list(target.parameters())
    source_params = list(source.parameters())
    if len(target_params) != len(source_params):
        raise ValueError("Parameter count mismatch: {} vs {}".format(len(target_params), len(source_params)))
    for t, s in zip(target_params, source_params):
        if t.shape != s.shape:
            raise ValueError("Parameter shape mismatch: {} vs {}".format(tuple(t.shape), tuple(s.shape)))
    with torch.no_grad():
        for t, s in zip(target_params, source_params):
            t.mul_(1.0 - tau).add_(s, alpha=tau)
    return target


class DdpgModel(DdpgPreTrainedModel):
    """ Actor, critic and their target networks. Targets start as copies of the online networks. """

    def __init__(self, config):
        super(DdpgModel, self).__init__(config)
        self.actor = ActorNetwork(config)
        self.critic = CriticNetwork(config)
        self.actor_target = copy.deepcopy(self.actor)
        self.critic_target = copy.deepcopy(self.critic)
        for p in list(self.actor_target.parameters()) + list(self.critic_target.parameters()):
            p.requires_grad_(False)

    def act(self, observation):
        """ Greedy action for one observation as a numpy array. """
        param = next(self.actor.parameters())
        with torch.no_grad():
            state = torch.as_tensor(np.asarray(observation), dtype=param.dtype, device=param.device)
            return self.actor(state.unsqueeze(0))[0].cpu().numpy().astype(np.float64)

    def soft_update_targets(self, tau):
        soft_update(self.actor_target, self.actor, tau)
        soft_update(self.critic_target, self.critic, tau)
