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
""" Trajectory MDP of the ARIS: state, reward and per-slot transition for the three schemes. """

from __future__ import absolute_import, division, print_function

import logging
import math
from collections import namedtuple
from enum import Enum

import numpy as np

from .beamforming import (LinkBudget, align_phases_to_target, optimize_phases_and_beamformers,
                          residual_interference_power)
from .channel import ChannelParams, realize_channels
from .geometry import DegenerateGeometryError, MapSpec, Position3, Velocity2, advance, in_bounds
from .sensing import (MeasurementSet, NoEchoError, SensingParams, SingularGeometryError, coordinate_fim,
                      measurement_variance, mle_localize, sample_measurement)

logger = logging.getLogger(__name__)


class SchemeId(str, Enum):
    PROPOSED = 'proposed'
    FIXED_RIS = 'fixed_ris'
    WITHOUT_NSP = 'without_nsp'

    @classmethod
    def parse(cls, name):
        """ Accepts the enum value or the command-line spelling (``fixed-ris``, ``no-nsp``). """
        if isinstance(name, cls):
            return name
        aliases = {'fixed-ris': cls.FIXED_RIS, 'no-nsp': cls.WITHOUT_NSP, 'without-nsp': cls.WITHOUT_NSP}
        key = str(name).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError("Unknown scheme '{}', expected one of proposed, fixed-ris, no-nsp".format(name))

    @property
    def cli_name(self):
        return {'proposed': 'proposed', 'fixed_ris': 'fixed-ris', 'without_nsp': 'no-nsp'}[self.value]


class Scene(object):
    """ Fixed node positions of one scenario and the flight area of the ARIS. """

    def __init__(self, ap, users, target, map_spec, aris_start):
        self.ap = ap
        self.users = list(users)
        self.target = target
        self.map = map_spec
        self.aris_start = aris_start
        for node in [ap, target] + self.users:
            if node.z != 0.0:
                raise ValueError("Ground nodes must be at z=0, got {}".format(tuple(node)))
        if aris_start.z != map_spec.altitude:
            raise ValueError("ARIS must start at altitude {}, got {}".format(map_spec.altitude, aris_start.z))

    @classmethod
    def default(cls, num_users=3, map_spec=None, ap=(0.0, -120.0), target=(60.0, 40.0),
                user_centroid=(-50.0, -40.0), user_radius=15.0, aris_start=(0.0, -80.0)):
        """ AP south of the map, users clustered on a circle around ``user_centroid``, target opposite. """
        map_spec = map_spec or MapSpec()
        users = [Position3(user_centroid[0] + user_radius * math.cos(2 * math.pi * k / num_users),
                           user_centroid[1] + user_radius * math.sin(2 * math.pi * k / num_users))
                 for k in range(num_users)]
        return cls(ap=Position3(*ap), users=users, target=Position3(*target), map_spec=map_spec,
                   aris_start=Position3(aris_start[0], aris_start[1], map_spec.altitude))

    @property
    def user_centroid(self):
        if not self.users:
            return (0.0, 0.0)
        return (sum(u.x for u in self.users) / len(self.users), sum(u.y for u in self.users) / len(self.users))


class MdpState(namedtuple('MdpState', ['aris_x', 'aris_y', 'est_target_x', 'est_target_y'])):
    """ Observation of the agent in meters. """
    __slots__ = ()

    def normalized(self, w_max):
        """ Network input in [-1, 1] for in-map values. """
        return np.asarray(self, dtype=np.float32) / np.float32(w_max)


class StepOutcome(object):
    """ Everything a slot produces: reward, sensing quality and the slot's beamforming solution. """

    def __init__(self, slot, next_state, reward, crb, see, out_of_bounds, solution, done,
                 aris=None, residual_interference=float('nan'), measured=False):
        self.slot = slot
        self.next_state = next_state
        self.reward = reward
        self.crb = crb
        self.see = see
        self.out_of_bounds = out_of_bounds
        self.solution = solution
        self.done = done
        self.aris = aris
        self.residual_interference = residual_interference
        self.measured = measured

    def __repr__(self):
        return "StepOutcome(slot={}, reward={:.4g}, crb={:.4g}, see={:.4g}, out_of_bounds={}, done={})".format(
            self.slot, self.reward, self.crb, self.see, self.out_of_bounds, self.done)


class IsacEnvironment(object):
    r""" One ARIS flying over the map for ``L_tot`` slots.

    Each :meth:`step` moves the ARIS, solves the beamforming of the slot for the configured scheme,
    synthesizes a distance measurement, re-localizes the target and rewards the inverse CRB.

    Parameters:
        ``scene``: :class:`Scene`.
        ``channel_params``: :class:`ChannelParams`.
        ``budget``: :class:`LinkBudget`.
        ``sensing_params``: :class:`SensingParams`.
        ``v_max``: per-axis speed limit in m/s.
        ``penalty``: reward penalty r_p for leaving the map.
        ``scheme``: default :class:`SchemeId` of :meth:`step`.
        ``scattering``: optional :class:`StaticScattering` frozen for the scene.
    """

    def __init__(self, scene, channel_params=None, budget=None, sensing_params=None, v_max=8.0, penalty=10.0,
                 scheme=SchemeId.PROPOSED, scattering=None, phase_iterations=20, mle_grid=41):
        self.scene = scene
        self.channel_params = channel_params or ChannelParams()
        self.budget = budget or LinkBudget()
        self.sensing_params = sensing_params or SensingParams(noise_ap=self.budget.noise_ap,
                                                              total_power=self.budget.total_power,
                                                              beta_s=self.channel_params.beta_s)
        if not v_max > 0:
            raise ValueError("v_max must be > 0, got {}".format(v_max))
        self.v_max = float(v_max)
        self.penalty = float(penalty)
        self.scheme = SchemeId.parse(scheme)
        self.scattering = scattering
        self.phase_iterations = int(phase_iterations)
        self.mle_grid = int(mle_grid)
        self.reset()

    @property
    def map(self):
        return self.scene.map

    @property
    def done(self):
        return self.slot >= self.map.total_slots

    def reset(self, seed=None):
        """ ARIS back to its start point, estimate at the map center, empty measurement history. """
        self.rng = np.random.default_rng(seed)
        self.aris = self.scene.aris_start
        self.estimate = (0.0, 0.0)
        self.measurements = MeasurementSet()
        self.fixed_phases = None
        self.slot = 0
        return self.state

    @property
    def state(self):
        return MdpState(self.aris.x, self.aris.y, self.estimate[0], self.estimate[1])

    def observation(self):
        return self.state.normalized(self.map.w_max)

    def _solve_beamforming(self, channels, scheme):
        if scheme == SchemeId.FIXED_RIS:
            if self.fixed_phases is None:
                self.fixed_phases = align_phases_to_target(channels)
            return optimize_phases_and_beamformers(channels, self.budget, fixed_phases=self.fixed_phases)
        receiver = 'matched' if scheme == SchemeId.WITHOUT_NSP else 'nsp'
        return optimize_phases_and_beamformers(channels, self.budget, phase_iterations=self.phase_iterations,
                                               receiver=receiver)

    def _measure(self, channels, solution):
        """ Append this slot's distance measurement. Returns (measured, residual interference). """
        if solution.f_rx is None:
            return False, float('nan')
        interference = residual_interference_power(channels, solution)
        try:
            variance = measurement_variance(self.sensing_params, channels, solution, channels.target_distance,
                                            interference_power=interference)
        except NoEchoError as e:
            logger.info("Slot %d: %s", self.slot, e)
            return False, interference
        measured = sample_measurement(self.rng, channels.target_distance, variance)
        self.measurements.append(self.aris, channels.target_distance, measured, variance)
        return True, interference

    def crb(self):
        """ CRB of (x, y) at the current estimate over all hover points so far, ``inf`` when singular. """
        if len(self.measurements) == 0:
            return float('inf')
        try:
            return coordinate_fim(self.measurements, self.estimate).crb_xy
        except (SingularGeometryError, DegenerateGeometryError) as e:
            logger.debug("Slot %d: %s", self.slot, e)
            return float('inf')

    def step(self, action, scheme=None):
        if self.done:
            raise ValueError("Episode is done after {} slots, call reset()".format(self.map.total_slots))
        scheme = self.scheme if scheme is None else SchemeId.parse(scheme)
        velocity = Velocity2(*action).clamp(self.v_max)
        moved = advance(self.aris, velocity, self.map.delta_t)
        out_of_bounds = not in_bounds(moved, self.map)
        if not out_of_bounds:
            self.aris = moved
        self.slot += 1

        channels = realize_channels(self.channel_params, self.scene.ap, self.aris, self.scene.users,
                                    self.scene.target, self.scattering)
        solution = self._solve_beamforming(channels, scheme)
        measured, interference = self._measure(channels, solution)
        if len(self.measurements) > 0:
            x, y, _ = mle_localize(self.measurements, self.map.w_max, grid_size=self.mle_grid)
            self.estimate = (x, y)

        crb = self.crb()
        sensing_reward = 1.0 / crb if measured and not math.isinf(crb) else 0.0
        reward = sensing_reward - (self.penalty if out_of_bounds else 0.0)
        target = self.scene.target
        see = (self.estimate[0] - target.x) ** 2 + (self.estimate[1] - target.y) ** 2
        return StepOutcome(slot=self.slot,
                           next_state=self.state,
                           reward=reward,
                           crb=crb,
                           see=see,
                           out_of_bounds=out_of_bounds,
                           solution=solution,
                           done=self.done,
                           aris=self.aris,
                           residual_interference=interference,
                           measured=measured)

    def run_episode(self, policy, scheme=None, seed=None):
        """ Roll out ``policy`` (normalized observation -> action in m/s) for ``L_tot`` slots. """
        self.reset(seed)
        outcomes = []
        while not self.done:
            outcomes.append(self.step(policy(self.observation()), scheme))
        return outcomes
