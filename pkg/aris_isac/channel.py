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
""" Per-slot channel realization: AP-RIS, RIS-user, RIS steering, target/clutter response and
    residual self-interference.
"""

from __future__ import absolute_import, division, print_function

import logging
import math

import numpy as np

from .geometry import DegenerateGeometryError, distance, doa_sine

logger = logging.getLogger(__name__)

GAIN_CONVENTIONS = ('power', 'amplitude')


class ChannelParams(object):
    r""" Physical parameters of the radio environment.

    Parameters:
        ``beta0``: linear reference power gain of the ground-to-air link at 1 m.
        ``beta_s``: linear two-way reference gain at 1 m, radar cross-section included.
        ``si_power``: linear residual self-interference channel power (uniform over antenna pairs).
        ``num_ap_antennas``: number of AP antennas (M).
        ``num_ris_elements``: number of RIS elements (N).
        ``element_spacing_over_wavelength``: RIS element spacing in wavelengths.
        ``ap_antenna_spacing_over_wavelength``: AP antenna spacing in wavelengths.
        ``gain_convention``: ``'power'`` uses beta0 / d^2 as channel entry (literal model),
            ``'amplitude'`` uses sqrt(beta0) / d.
        ``k_factor``: ratio of line-of-sight to static scattering power. ``None`` disables scattering.
    """

    def __init__(self,
                 beta0=0.01,
                 beta_s=10 ** (-4.7),
                 si_power=1e-11,
                 num_ap_antennas=16,
                 num_ris_elements=16,
                 element_spacing_over_wavelength=0.5,
                 ap_antenna_spacing_over_wavelength=0.5,
                 gain_convention='power',
                 k_factor=None):
        if not (beta0 > 0 and beta_s > 0 and si_power > 0):
            raise ValueError("Channel gains must be > 0, got beta0={}, beta_s={}, si_power={}".format(
                beta0, beta_s, si_power))
        if int(num_ap_antennas) < 1 or int(num_ris_elements) < 1:
            raise ValueError("Need M >= 1 and N >= 1, got M={}, N={}".format(num_ap_antennas, num_ris_elements))
        if gain_convention not in GAIN_CONVENTIONS:
            raise ValueError("gain_convention should be one of {}, got {}".format(GAIN_CONVENTIONS, gain_convention))
        if k_factor is not None and not k_factor > 0:
            raise ValueError("k_factor must be > 0 or None, got {}".format(k_factor))
        self.beta0 = float(beta0)
        self.beta_s = float(beta_s)
        self.si_power = float(si_power)
        self.num_ap_antennas = int(num_ap_antennas)
        self.num_ris_elements = int(num_ris_elements)
        self.element_spacing_over_wavelength = float(element_spacing_over_wavelength)
        self.ap_antenna_spacing_over_wavelength = float(ap_antenna_spacing_over_wavelength)
        self.gain_convention = gain_convention
        self.k_factor = None if k_factor is None else float(k_factor)

    def link_gain(self, d):
        if d <= 0.0:
            raise DegenerateGeometryError("Link distance must be > 0, got {}".format(d))
        if self.gain_convention == 'power':
            return self.beta0 / d ** 2
        return math.sqrt(self.beta0) / d


class StaticScattering(object):
    """ Unit-modulus scattering patterns frozen for a whole scene.

        ``ap`` has shape (N, M) and scatters the AP-RIS link, ``users`` has shape (K, N).
        The patterns are drawn once from ``seed`` and never re-drawn per slot.
    """

    def __init__(self, ap, users):
        self.ap = np.asarray(ap, dtype=complex)
        self.users = np.asarray(users, dtype=complex)

    @classmethod
    def from_seed(cls, seed, num_ris_elements, num_ap_antennas, num_users):
        rng = np.random.default_rng(seed)
        ap = np.exp(2j * np.pi * rng.random((num_ris_elements, num_ap_antennas)))
        users = np.exp(2j * np.pi * rng.random((num_users, num_ris_elements)))
        return cls(ap, users)


def _mix(params, los, scatter):
    if params.k_factor is None or scatter is None:
        return los
    k = params.k_factor
    return math.sqrt(k / (1.0 + k)) * los + math.sqrt(1.0 / (1.0 + k)) * scatter


def ap_ris_channel(params, p_ap, p_aris, scattering=None):
    """ AP -> RIS channel G^{AP,U} of shape (N, M). """
    g = params.link_gain(distance(p_ap, p_aris))
    los = np.ones((params.num_ris_elements, params.num_ap_antennas), dtype=complex)
    return g * _mix(params, los, None if scattering is None else scattering.ap)


def ris_user_channel(params, p_aris, p_user, scattering=None, user_index=0):
    """ RIS -> user channel h^{U,k} of shape (N,). """
    g = params.link_gain(distance(p_aris, p_user))
    los = np.ones(params.num_ris_elements, dtype=complex)
    return g * _mix(params, los, None if scattering is None else scattering.users[user_index])


def steering(params, sin_theta):
    n = np.arange(params.num_ris_elements)
    return np.exp(2j * np.pi * n * params.element_spacing_over_wavelength * sin_theta)


def two_way_gain(params, d):
    """ Two-way amplitude alpha = sqrt(beta_s / d^4) between the ARIS and a reflecting node. """
    if d <= 0.0:
        raise DegenerateGeometryError("Reflection distance must be > 0, got {}".format(d))
    return math.sqrt(params.beta_s) / d ** 2


def si_channel(params):
    m = np.arange(params.num_ap_antennas)
    spacing = np.abs(m[:, None] - m[None, :]) * params.ap_antenna_spacing_over_wavelength
    return math.sqrt(params.si_power) * np.exp(-2j * np.pi * spacing)


class ChannelSet(object):
    r""" All channels of one time slot.

    Attributes:
        ``g_ap_ris``: (N, M) AP -> RIS matrix.
        ``h_ris_user``: (K, N) RIS -> user vectors, one row per user.
        ``a_target``: (N,) steering vector toward the target.
        ``a_clutter``: (K, N) steering vectors toward the users (clutter).
        ``alpha_target``: two-way amplitude of the target.
        ``alpha_clutter``: (K,) two-way amplitudes of the clutter.
        ``g_si``: (M, M) residual self-interference channel.
        ``target_distance``: ARIS-target distance in meters (0 when unknown).
    """

    def __init__(self, g_ap_ris, h_ris_user, a_target, a_clutter, alpha_target, alpha_clutter, g_si,
                 target_distance=0.0):
        self.g_ap_ris = np.asarray(g_ap_ris, dtype=complex)
        n, m = self.g_ap_ris.shape
        self.h_ris_user = np.asarray(h_ris_user, dtype=complex).reshape(-1, n)
        self.a_target = np.asarray(a_target, dtype=complex).reshape(n)
        self.a_clutter = np.asarray(a_clutter, dtype=complex).reshape(-1, n)
        self.alpha_target = complex(alpha_target)
        self.alpha_clutter = np.asarray(alpha_clutter, dtype=complex).reshape(-1)
        self.g_si = np.asarray(g_si, dtype=complex).reshape(m, m)
        self.target_distance = float(target_distance)
        k = self.h_ris_user.shape[0]
        if self.a_clutter.shape[0] != k or self.alpha_clutter.shape[0] != k:
            raise ValueError("Inconsistent number of users: h={}, a_clutter={}, alpha_clutter={}".format(
                k, self.a_clutter.shape[0], self.alpha_clutter.shape[0]))

    @property
    def num_users(self):
        return self.h_ris_user.shape[0]

    @property
    def num_ap_antennas(self):
        return self.g_ap_ris.shape[1]

    @property
    def num_ris_elements(self):
        return self.g_ap_ris.shape[0]

    def round_trip(self, phases, a):
        """ G^T Phi^T a: AP-side direction of a reflection arriving from steering vector ``a``. """
        return self.g_ap_ris.T @ (phases * a)

    def target_direction(self, phases):
        return self.round_trip(phases, self.a_target)

    def clutter_directions(self, phases):
        """ (M, K) matrix whose columns are G^T Phi^T a(theta_k). """
        if self.num_users == 0:
            return np.zeros((self.num_ap_antennas, 0), dtype=complex)
        return np.stack([self.round_trip(phases, a) for a in self.a_clutter], axis=1)

    def echo_matrix(self, phases, response):
        """ G^T Phi^T H Phi G for an (N, N) reflection response ``H``. """
        phi_g = phases[:, None] * self.g_ap_ris
        return phi_g.T @ response @ phi_g

    def unit_target_echo(self, phases):
        """ Echo matrix of the unit-gain target response A(theta_s) = a a^H. """
        return self.echo_matrix(phases, np.outer(self.a_target, self.a_target.conj()))

    def clutter_echo(self, phases):
        return self.echo_matrix(phases, clutter_response(self))


def clutter_response(channels):
    n = channels.num_ris_elements
    response = np.zeros((n, n), dtype=complex)
    for alpha, a in zip(channels.alpha_clutter, channels.a_clutter):
        response += alpha * np.outer(a, a.conj())
    return response


def target_response(channels):
    """ H = alpha_s a(theta_s) a^H(theta_s) + sum_k alpha_k a(theta_k) a^H(theta_k). """
    a = channels.a_target
    return channels.alpha_target * np.outer(a, a.conj()) + clutter_response(channels)


def realize_channels(params, ap, aris, users, target, scattering=None):
    """ Build the :class:`ChannelSet` of one slot from the node positions.

        Clutter directions are the current ARIS-user geometry.
    """
    users = list(users)
    if scattering is not None and scattering.users.shape[0] < len(users):
        raise ValueError("Scattering patterns cover {} users, scene has {}".format(
            scattering.users.shape[0], len(users)))
    n = params.num_ris_elements
    g = ap_ris_channel(params, ap, aris, scattering)
    h = np.array([ris_user_channel(params, aris, u, scattering, k) for k, u in enumerate(users)],
                 dtype=complex).reshape(len(users), n)
    a_clutter = np.array([steering(params, doa_sine(aris, u)) for u in users], dtype=complex).reshape(len(users), n)
    alpha_clutter = np.array([two_way_gain(params, distance(aris, u)) for u in users])
    d_target = distance(aris, target)
    return ChannelSet(g_ap_ris=g,
                      h_ris_user=h,
                      a_target=steering(params, doa_sine(aris, target)),
                      a_clutter=a_clutter,
                      alpha_target=two_way_gain(params, d_target),
                      alpha_clutter=alpha_clutter,
                      g_si=si_channel(params),
                      target_distance=d_target)
