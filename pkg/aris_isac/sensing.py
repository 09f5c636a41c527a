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
""" Distance measurements, Fisher information and CRB of the target coordinates, and MLE localization. """

from __future__ import absolute_import, division, print_function

import logging
import math
from collections import namedtuple

import numpy as np

from .geometry import DegenerateGeometryError

logger = logging.getLogger(__name__)

SINGULAR_CONDITION = 1e12


def is_singular(matrix):
    """ True when ``matrix`` is numerically singular (condition number above 1e12, inf or nan). """
    with np.errstate(divide='ignore', invalid='ignore'):
        cond = np.linalg.cond(matrix)
    return not np.isfinite(cond) or cond > SINGULAR_CONDITION


class NoEchoError(ValueError):
    """Raised when the echo channel toward the target carries no energy."""


class SingularGeometryError(ValueError):
    """Raised when the hover points cannot resolve both target coordinates."""


class SensingParams(object):
    r""" Constants of the distance-measurement model.

    Parameters:
        ``a_const``: scaling constant between the inverse SNR and the measurement variance (a).
        ``g_p``: processing gain (G_p), ``0.1 * bandwidth`` by default configuration.
        ``noise_ap``: noise power at the AP receiver in mW.
        ``total_power``: AP power budget in mW.
        ``beta_s``: two-way reference gain at 1 m.
    """

    def __init__(self, a_const=3.5, g_p=1e5, noise_ap=1e-11, total_power=1e4, beta_s=10 ** (-4.7)):
        for name, value in (('a_const', a_const), ('g_p', g_p), ('noise_ap', noise_ap),
                            ('total_power', total_power), ('beta_s', beta_s)):
            if not value > 0:
                raise ValueError("{} must be > 0, got {}".format(name, value))
        self.a_const = float(a_const)
        self.g_p = float(g_p)
        self.noise_ap = float(noise_ap)
        self.total_power = float(total_power)
        self.beta_s = float(beta_s)


def variance_from_snr(snr, a_const):
    if not snr > 0:
        raise NoEchoError("SNR must be > 0, got {}".format(snr))
    return a_const / snr


def echo_snr(params, channels, solution, d, interference_power=0.0):
    """ Received SNR of the target echo at distance ``d``.

        The echo carries the sensing power tr(R_s) of ``solution``, so a stricter SINR threshold
        leaves less of ``P_AP`` for sensing. ``interference_power`` is the residual SI plus clutter
        power after the receive beamformer; it adds to the AP noise.
    """
    if d <= 0.0:
        raise DegenerateGeometryError("Target distance must be > 0, got {}".format(d))
    sensing_power = solution.sensing_power
    if sensing_power > params.total_power * (1.0 + 1e-9):
        raise ValueError("Sensing power {:.6g} exceeds the budget {:.6g}".format(sensing_power, params.total_power))
    if sensing_power == 0.0:
        raise NoEchoError("No power left for sensing")
    z = channels.unit_target_echo(solution.phases)
    norm2 = float(np.sum(np.abs(z) ** 2))
    if norm2 == 0.0:
        raise NoEchoError("Echo channel toward the target has zero norm")
    return sensing_power * params.g_p * params.beta_s * norm2 / (d ** 4 * (params.noise_ap + interference_power))


def measurement_variance(params, channels, solution, d, interference_power=0.0):
    """ a * (sigma_s^2 + I) * d^4 / (tr(R_s) * G_p * beta_s * ||Z_unit||^2) in m^2. """
    return variance_from_snr(echo_snr(params, channels, solution, d, interference_power), params.a_const)


def sample_measurement(rng, d, variance):
    """ One draw of N(d, variance). ``rng`` is a ``numpy.random.Generator`` or an integer seed. """
    if not variance > 0:
        raise ValueError("variance must be > 0, got {}".format(variance))
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return float(rng.normal(d, math.sqrt(variance)))


class MeasurementSet(object):
    """ Hover points and the distance measurements taken from them, one entry per slot. """

    def __init__(self, hover_points=None, true_distances=None, measured_distances=None, variances=None):
        self.hover_points = [] if hover_points is None else list(hover_points)
        self.true_distances = [] if true_distances is None else [float(d) for d in true_distances]
        self.measured_distances = [] if measured_distances is None else [float(d) for d in measured_distances]
        self.variances = [] if variances is None else [float(v) for v in variances]
        lengths = {len(self.hover_points), len(self.true_distances),
                   len(self.measured_distances), len(self.variances)}
        if len(lengths) != 1:
            raise ValueError("Measurement fields must have equal lengths, got {}".format(sorted(lengths)))
        if any(not v > 0 for v in self.variances):
            raise ValueError("Measurement variances must be > 0")

    def __len__(self):
        return len(self.hover_points)

    def append(self, hover_point, true_distance, measured_distance, variance):
        if not variance > 0:
            raise ValueError("variance must be > 0, got {}".format(variance))
        self.hover_points.append(hover_point)
        self.true_distances.append(float(true_distance))
        self.measured_distances.append(float(measured_distance))
        self.variances.append(float(variance))

    def copy(self):
        return MeasurementSet(self.hover_points, self.true_distances, self.measured_distances, self.variances)

    def hover_array(self):
        return np.array([[p.x, p.y, p.z] for p in self.hover_points], dtype=float).reshape(-1, 3)


FisherResult = namedtuple('FisherResult', ['fim_dist', 'jacobian', 'fim_coord', 'crb_xy'])


def fim_distances(measurements):
    """ Diagonal FIM of the distances: 1/sigma_l^2 + 8/d_l^2. """
    var = np.asarray(measurements.variances, dtype=float)
    d = np.asarray(measurements.true_distances, dtype=float)
    return np.diag(1.0 / var + 8.0 / d ** 2)


def distance_jacobian(hover, x, y):
    """ (2, L) matrix of d d_l / d(x, y) for a ground target at (x, y, 0). """
    diff = np.array([x, y, 0.0])[None, :] - hover
    d = np.linalg.norm(diff, axis=1)
    if np.any(d == 0.0):
        raise DegenerateGeometryError("Target guess ({}, {}) coincides with a hover point".format(x, y))
    return (diff[:, :2] / d[:, None]).T


def coordinate_fim(measurements, target_guess):
    """ J(p) = Q J(d) Q^T and CRB_xy = tr(J(p)^-1) at ``target_guess``. """
    x, y = target_guess
    q = distance_jacobian(measurements.hover_array(), x, y)
    fim_dist = fim_distances(measurements)
    fim_coord = q @ fim_dist @ q.T
    fim_coord = 0.5 * (fim_coord + fim_coord.T)
    if len(measurements) == 0 or is_singular(fim_coord):
        raise SingularGeometryError("Coordinate FIM is singular with {} hover points".format(len(measurements)))
    crb_xy = float(np.trace(np.linalg.inv(fim_coord)))
    return FisherResult(fim_dist=fim_dist, jacobian=q, fim_coord=fim_coord, crb_xy=crb_xy)


LocationEstimate = namedtuple('LocationEstimate', ['x', 'y', 'ambiguous'])


def _weighted_cost(hover, measured, weights, x, y):
    d = np.sqrt((hover[:, 0] - x) ** 2 + (hover[:, 1] - y) ** 2 + hover[:, 2] ** 2)
    return float(np.sum(weights * (measured - d) ** 2))


def mle_localize(measurements, w_max, grid_size=41, max_iter=50, tol=1e-9):
    """ Weighted least-squares (Gaussian MLE) target location.

    A ``grid_size`` x ``grid_size`` grid over the map gives the starting point, then Gauss-Newton
    refines it. When the normal matrix is singular the grid minimizer is returned with
    ``ambiguous=True``.
    """
    if len(measurements) == 0:
        raise ValueError("mle_localize needs at least one measurement")
    hover = measurements.hover_array()
    measured = np.asarray(measurements.measured_distances, dtype=float)
    weights = 1.0 / np.asarray(measurements.variances, dtype=float)

    axis = np.linspace(-w_max, w_max, grid_size)
    gx, gy = np.meshgrid(axis, axis, indexing='ij')
    d = np.sqrt((hover[:, 0, None, None] - gx[None]) ** 2 +
                (hover[:, 1, None, None] - gy[None]) ** 2 +
                hover[:, 2, None, None] ** 2)
    costs = np.sum(weights[:, None, None] * (measured[:, None, None] - d) ** 2, axis=0)
    i, j = np.unravel_index(np.argmin(costs), costs.shape)
    pos = np.array([gx[i, j], gy[i, j]])
    cost = float(costs[i, j])

    for it in range(max_iter):
        diff = np.array([pos[0], pos[1], 0.0])[None, :] - hover
        dist = np.maximum(np.linalg.norm(diff, axis=1), np.finfo(float).tiny)
        jac = diff[:, :2] / dist[:, None]
        normal = jac.T @ (weights[:, None] * jac)
        if len(measurements) < 2 or is_singular(normal):
            logger.debug("Ambiguous geometry, returning grid minimizer (%.3f, %.3f)", pos[0], pos[1])
            return LocationEstimate(float(pos[0]), float(pos[1]), True)
        step = np.linalg.solve(normal, jac.T @ (weights * (measured - dist)))
        scale = 1.0
        while scale > 1e-6:
            trial = pos + scale * step
            trial_cost = _weighted_cost(hover, measured, weights, trial[0], trial[1])
            if trial_cost <= cost:
                break
            scale *= 0.5
        else:
            break
        pos, cost = trial, trial_cost
        if np.linalg.norm(scale * step) < tol:
            break
    return LocationEstimate(float(pos[0]), float(pos[1]), False)
