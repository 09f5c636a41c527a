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
""" Experiment configuration: simulation defaults, profiles, JSON files and command-line overrides. """

from __future__ import (absolute_import, division, print_function,
                        unicode_literals)

import copy
import json
import logging
import math
import os
from io import open

from .agent import TrainConfig
from .beamforming import LinkBudget
from .channel import GAIN_CONVENTIONS, ChannelParams, StaticScattering
from .environment import IsacEnvironment, Scene, SchemeId
from .geometry import MapSpec, Position3
from .modeling_ddpg import DdpgConfig
from .sensing import SensingParams

logger = logging.getLogger(__name__)

EXPERIMENT_CONFIG_NAME = "experiment_config.json"


class ConfigError(ValueError):
    """Raised for unknown keys and out-of-range values; the message names the key and its symbol."""


# key -> default. Powers in mW, gains linear.
DEFAULTS = {
    # scene
    'ap_x': 0.0, 'ap_y': -120.0,
    'target_x': 60.0, 'target_y': 40.0,
    'user_centroid_x': -50.0, 'user_centroid_y': -40.0, 'user_radius': 15.0,
    'aris_start_x': 0.0, 'aris_start_y': -80.0,
    'scene_seed': 0,
    # physical
    'a_const': 3.5,
    'p_ap': 1e4,
    'total_slots': 12,
    'si_power': 1e-11,
    'w_max': 100.0,
    'noise_ap': 1e-11,
    'delta_t': 1.0,
    'noise_user': 1e-10,
    'altitude': 50.0,
    'beta0': 1e-2,
    'bandwidth': 1e6,
    'beta_s': 10 ** (-4.7),
    'g_p': None,
    'sinr_threshold': 10.0,
    'v_max': 8.0,
    'num_ap_antennas': 16,
    'num_ris_elements': 16,
    'num_users': 3,
    'gain_convention': 'amplitude',
    'k_factor': 2.0,
    'penalty': 10.0,
    'phase_iterations': 20,
    'mle_grid': 41,
    # training
    'gamma': 0.95,
    'tau': 0.005,
    'lr': 3e-4,
    'batch': 70,
    'buffer_capacity': 8000,
    'episodes': 500,
    'noise_std': 2.0,
    'noise_decay': 0.995,
    'updates_per_episode': 1,
    'hidden_sizes': [300, 100, 100],
    'tensorboard': False,
    # run
    'scheme': 'proposed',
    'seed': 0,
    'output_dir': 'output',
    'profile': 'full',
}

SYMBOLS = {
    'a_const': 'a', 'p_ap': 'P_AP', 'total_slots': 'L_tot', 'si_power': 'gamma_SI', 'w_max': 'W_max',
    'noise_ap': 'sigma_s^2', 'delta_t': 'Delta', 'noise_user': 'sigma_k^2', 'altitude': 'H', 'beta0': 'beta_0',
    'bandwidth': 'B', 'beta_s': 'beta_s', 'g_p': 'G_p', 'sinr_threshold': 'Gamma_th', 'v_max': 'v_max',
    'num_ap_antennas': 'M', 'num_ris_elements': 'N', 'num_users': 'K', 'gamma': 'gamma', 'tau': 'tau',
    'lr': 'learning rate', 'batch': 'mini-batch size', 'buffer_capacity': 'replay buffer capacity',
    'episodes': 'E_max', 'penalty': 'r_p', 'noise_std': 'exploration noise', 'k_factor': 'K-factor',
}

# alias -> (linear key, 'dbm' or 'db')
DB_ALIASES = {
    'p_ap_dbm': ('p_ap', 'dbm'),
    'si_power_dbm': ('si_power', 'dbm'),
    'noise_ap_dbm': ('noise_ap', 'dbm'),
    'noise_user_dbm': ('noise_user', 'dbm'),
    'beta0_db': ('beta0', 'db'),
    'beta_s_db': ('beta_s', 'db'),
    'sinr_threshold_db': ('sinr_threshold', 'db'),
}

PROFILES = {
    'full': {},
    # smaller array, budget that the SINR constraints visibly share, one update per slot
    'desk': {'num_ap_antennas': 8, 'num_ris_elements': 8, 'num_users': 2, 'episodes': 200, 'total_slots': 12,
             'p_ap': 1e3, 'updates_per_episode': 12},
}

INT_KEYS = ('scene_seed', 'total_slots', 'num_ap_antennas', 'num_ris_elements', 'num_users', 'phase_iterations',
            'mle_grid', 'batch', 'buffer_capacity', 'episodes', 'updates_per_episode', 'seed')
POSITIVE_KEYS = ('a_const', 'p_ap', 'si_power', 'w_max', 'noise_ap', 'delta_t', 'noise_user', 'altitude', 'beta0',
                 'bandwidth', 'beta_s', 'sinr_threshold', 'v_max', 'lr', 'num_ap_antennas', 'num_ris_elements',
                 'total_slots', 'batch', 'buffer_capacity', 'episodes', 'mle_grid')
NON_NEGATIVE_KEYS = ('user_radius', 'num_users', 'penalty', 'noise_std', 'phase_iterations', 'updates_per_episode',
                     'seed', 'scene_seed')


def db_to_linear(value):
    return 10.0 ** (float(value) / 10.0)


def linear_to_db(value):
    return 10.0 * math.log10(value)


def _describe(key):
    symbol = SYMBOLS.get(key)
    return "'{}' ({})".format(key, symbol) if symbol else "'{}'".format(key)


class ExperimentConfig(object):
    r""" Resolved configuration of one experiment: scene, physical constants, training and run options.

        Every key of :data:`DEFAULTS` is an attribute. Use :func:`load_config` to build one from files
        and overrides; the constructor only validates.
    """

    def __init__(self, **kwargs):
        values = copy.deepcopy(DEFAULTS)
        for key, value in kwargs.items():
            key, value = _normalize(key, value)
            values[key] = value
        for key, value in values.items():
            setattr(self, key, value)
        self.validate()

    def validate(self):
        for key, default in DEFAULTS.items():
            value = getattr(self, key)
            numeric = isinstance(default, (int, float)) and not isinstance(default, bool)
            if key in ('g_p', 'k_factor'):
                numeric = value is not None
            if not numeric:
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError("Invalid value for {}: expected a number, got {!r}".format(_describe(key), value))
            if key in INT_KEYS:
                if not float(value).is_integer():
                    raise ConfigError("Invalid value for {}: expected an integer, got {}".format(_describe(key), value))
                setattr(self, key, int(value))
            else:
                setattr(self, key, float(value))
        for key in POSITIVE_KEYS:
            if not getattr(self, key) > 0:
                raise ConfigError("Invalid value for {}: must be > 0, got {}".format(_describe(key), getattr(self, key)))
        for key in NON_NEGATIVE_KEYS:
            if not getattr(self, key) >= 0:
                raise ConfigError("Invalid value for {}: must be >= 0, got {}".format(_describe(key), getattr(self, key)))
        if self.g_p is not None and not self.g_p > 0:
            raise ConfigError("Invalid value for {}: must be > 0, got {}".format(_describe('g_p'), self.g_p))
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError("Invalid value for {}: must be in [0, 1], got {}".format(_describe('gamma'), self.gamma))
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError("Invalid value for {}: must be in (0, 1], got {}".format(_describe('tau'), self.tau))
        if not 0.0 < self.noise_decay <= 1.0:
            raise ConfigError("Invalid value for 'noise_decay': must be in (0, 1], got {}".format(self.noise_decay))
        if self.num_users > self.num_ap_antennas:
            raise ConfigError("Invalid value for {}: zero-forcing needs K <= M = {}, got {}".format(
                _describe('num_users'), self.num_ap_antennas, self.num_users))
        if self.gain_convention not in GAIN_CONVENTIONS:
            raise ConfigError("Invalid value for 'gain_convention': expected one of {}, got {}".format(
                GAIN_CONVENTIONS, self.gain_convention))
        if self.k_factor is not None and not self.k_factor > 0:
            raise ConfigError("Invalid value for {}: must be > 0 or null, got {}".format(
                _describe('k_factor'), self.k_factor))
        if not isinstance(self.hidden_sizes, (list, tuple)) or not self.hidden_sizes or \
                any(int(h) != h or h < 1 for h in self.hidden_sizes):
            raise ConfigError("Invalid value for 'hidden_sizes': expected a list of positive integers, got {}".format(
                self.hidden_sizes))
        self.hidden_sizes = [int(h) for h in self.hidden_sizes]
        if self.profile not in PROFILES:
            raise ConfigError("Invalid value for 'profile': expected one of {}, got {}".format(
                sorted(PROFILES), self.profile))
        try:
            self.scheme = SchemeId.parse(self.scheme).value
        except ValueError as e:
            raise ConfigError("Invalid value for 'scheme': {}".format(e))
        for key in ('ap', 'target', 'aris_start'):
            for axis in ('x', 'y'):
                name = '{}_{}'.format(key, axis)
                if not math.isfinite(getattr(self, name)):
                    raise ConfigError("Invalid value for '{}': must be finite".format(name))
        for name in ('target', 'aris_start'):
            x, y = getattr(self, name + '_x'), getattr(self, name + '_y')
            if abs(x) > self.w_max or abs(y) > self.w_max:
                raise ConfigError("Invalid value for '{0}_x'/'{0}_y': ({1}, {2}) lies outside the map of half width {3}"
                                  .format(name, x, y, self.w_max))

    @property
    def processing_gain(self):
        """ G_p, ``0.1 * B`` when not set explicitly. """
        return self.g_p if self.g_p is not None else 0.1 * self.bandwidth

    def build_map(self):
        return MapSpec(w_max=self.w_max, altitude=self.altitude, delta_t=self.delta_t, total_slots=self.total_slots)

    def build_scene(self):
        return Scene.default(num_users=self.num_users, map_spec=self.build_map(), ap=(self.ap_x, self.ap_y),
                             target=(self.target_x, self.target_y),
                             user_centroid=(self.user_centroid_x, self.user_centroid_y),
                             user_radius=self.user_radius, aris_start=(self.aris_start_x, self.aris_start_y))

    def build_channel_params(self):
        return ChannelParams(beta0=self.beta0, beta_s=self.beta_s, si_power=self.si_power,
                             num_ap_antennas=self.num_ap_antennas, num_ris_elements=self.num_ris_elements,
                             gain_convention=self.gain_convention, k_factor=self.k_factor)

    def build_scattering(self):
        if self.k_factor is None:
            return None
        return StaticScattering.from_seed(self.scene_seed, self.num_ris_elements, self.num_ap_antennas,
                                          self.num_users)

    def build_budget(self):
        return LinkBudget(noise_user=self.noise_user, noise_ap=self.noise_ap,
                          sinr_threshold=self.sinr_threshold, total_power=self.p_ap)

    def build_sensing_params(self):
        return SensingParams(a_const=self.a_const, g_p=self.processing_gain, noise_ap=self.noise_ap,
                             total_power=self.p_ap, beta_s=self.beta_s)

    def build_environment(self, scheme=None):
        return IsacEnvironment(self.build_scene(),
                               channel_params=self.build_channel_params(),
                               budget=self.build_budget(),
                               sensing_params=self.build_sensing_params(),
                               v_max=self.v_max,
                               penalty=self.penalty,
                               scheme=self.scheme if scheme is None else scheme,
                               scattering=self.build_scattering(),
                               phase_iterations=self.phase_iterations,
                               mle_grid=self.mle_grid)

    def build_train_config(self, log_dir=None):
        return TrainConfig(gamma=self.gamma, tau=self.tau, lr=self.lr, batch=self.batch,
                           buffer_capacity=self.buffer_capacity, noise_std=self.noise_std,
                           noise_decay=self.noise_decay, episodes=self.episodes,
                           updates_per_episode=self.updates_per_episode, tensorboard=self.tensorboard,
                           log_dir=log_dir)

    def build_model_config(self):
        return DdpgConfig(state_dim=4, action_dim=2, hidden_sizes=self.hidden_sizes, v_max=self.v_max)

    def db_originals(self):
        """ dB / dBm view of every linear quantity that has an alias key. """
        return dict((alias, linear_to_db(getattr(self, key))) for alias, (key, _) in sorted(DB_ALIASES.items()))

    @classmethod
    def from_dict(cls, json_object):
        return cls(**json_object)

    @classmethod
    def from_json_file(cls, json_file):
        return cls.from_dict(_read_json(json_file))

    def save_pretrained(self, save_directory):
        assert os.path.isdir(save_directory), "Saving path should be a directory"
        self.to_json_file(os.path.join(save_directory, EXPERIMENT_CONFIG_NAME))

    @classmethod
    def from_pretrained(cls, checkpoint_directory):
        """ The configuration a checkpoint was trained with, ``None`` for checkpoints saved without one. """
        path = os.path.join(checkpoint_directory, EXPERIMENT_CONFIG_NAME)
        if not os.path.isfile(path):
            logger.warning("No %s in %s", EXPERIMENT_CONFIG_NAME, checkpoint_directory)
            return None
        return cls.from_json_file(path)

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self.__dict__ == other.__dict__

    def __repr__(self):
        return str(self.to_json_string())

    def to_dict(self):
        return copy.deepcopy(self.__dict__)

    def to_json_string(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_json_file(self, json_file_path):
        with open(json_file_path, "w", encoding='utf-8') as writer:
            writer.write(self.to_json_string())


def _normalize(key, value):
    """ Map a dB alias to its linear key; reject unknown keys. """
    if key in DB_ALIASES:
        linear_key, _ = DB_ALIASES[key]
        try:
            return linear_key, db_to_linear(value)
        except (TypeError, ValueError):
            raise ConfigError("Invalid value for '{}' ({}): expected a number in dB, got {}".format(
                key, SYMBOLS.get(linear_key, linear_key), value))
    if key not in DEFAULTS:
        raise ConfigError("Unknown configuration key '{}'".format(key))
    return key, value


def _read_json(path):
    try:
        with open(path, "r", encoding='utf-8') as reader:
            text = reader.read()
    except IOError as e:
        raise ConfigError("Cannot read configuration file '{}': {}".format(path, e))
    if not text.strip():
        return {}
    try:
        values = json.loads(text)
    except ValueError as e:
        raise ConfigError("Cannot parse configuration file '{}': {}".format(path, e))
    if not isinstance(values, dict):
        raise ConfigError("Configuration file '{}' must hold a JSON object".format(path))
    return values


def parse_overrides(items):
    """ ``['key=value', ...]`` from ``--set`` into a dict; values are parsed as JSON when possible. """
    overrides = {}
    for item in items or []:
        if '=' not in item:
            raise ConfigError("Override '{}' should look like key=value".format(item))
        key, raw = item.split('=', 1)
        key = key.strip()
        try:
            value = json.loads(raw)
        except ValueError:
            value = raw
        overrides[key] = value
    return overrides


def load_config(path=None, overrides=None, profile=None, base=None):
    """ Defaults, then the profile, then the file at ``path``, then ``overrides``. Later sources win.

        ``base`` (a resolved :class:`ExperimentConfig`, e.g. from a checkpoint) replaces the defaults and
        the profile; a profile named in the file or the overrides still applies on top of it.
    """
    file_values = _read_json(path) if path else {}
    overrides = dict(overrides or {})
    explicit = overrides.get('profile', file_values.get('profile', profile))
    if base is not None:
        profile = explicit or base.profile
    else:
        profile = explicit or DEFAULTS['profile']
    if profile not in PROFILES:
        raise ConfigError("Invalid value for 'profile': expected one of {}, got {}".format(sorted(PROFILES), profile))

    values = {} if base is None else base.to_dict()
    sources = (file_values, overrides) if base is not None and explicit is None else \
        (PROFILES[profile], file_values, overrides)
    for source in sources:
        for key, value in source.items():
            key, value = _normalize(key, value)
            values[key] = value
    values['profile'] = profile
    config = ExperimentConfig(**values)
    logger.info("Experiment config %s", config.to_json_string().replace("\n", " "))
    return config
