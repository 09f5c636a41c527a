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
from __future__ import absolute_import, division, print_function

import numpy as np

from aris_isac import (ChannelParams, ChannelSet, IsacEnvironment, LinkBudget, MapSpec, Scene, StaticScattering,
                       si_channel)


def complex_gaussian(rng, shape, scale=1.0):
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def unit_phases(rng, shape):
    return np.exp(2j * np.pi * rng.random(shape))


def random_channels(rng, m=16, n=16, k=3, clutter=1e-3, si_power=1e-11):
    """ Rich-scattering slot instance with unit-modulus steering vectors. """
    return ChannelSet(g_ap_ris=complex_gaussian(rng, (n, m)),
                      h_ris_user=complex_gaussian(rng, (k, n)),
                      a_target=unit_phases(rng, n),
                      a_clutter=unit_phases(rng, (k, n)),
                      alpha_target=1e-3,
                      alpha_clutter=clutter * (0.5 + rng.random(k)),
                      g_si=si_channel(ChannelParams(si_power=si_power, num_ap_antennas=m)),
                      target_distance=100.0)


def small_environment(m=8, n=8, k=2, scheme='proposed', aris_start=(0.0, -80.0), total_slots=12, **kwargs):
    """ Desk-scale environment with amplitude gains and static scattering. """
    map_spec = MapSpec(total_slots=total_slots)
    scene = Scene.default(num_users=k, map_spec=map_spec, aris_start=aris_start)
    params = ChannelParams(num_ap_antennas=m, num_ris_elements=n, gain_convention='amplitude', k_factor=2.0)
    return IsacEnvironment(scene,
                           channel_params=params,
                           budget=LinkBudget(),
                           scheme=scheme,
                           scattering=StaticScattering.from_seed(0, n, m, k),
                           **kwargs)
