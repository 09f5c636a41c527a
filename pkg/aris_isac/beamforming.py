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
""" Per-slot inner optimization: RIS phases, zero-forcing transmit beamformers, sensing covariance
    and the null-space projection (NSP) receive beamformer.
"""

from __future__ import absolute_import, division, print_function

import logging

import numpy as np
from scipy import linalg

logger = logging.getLogger(__name__)

RECEIVERS = ('nsp', 'matched')


class NspDegenerateError(ValueError):
    """Raised when the target direction lies entirely in the span of the interference directions."""


class LinkBudget(object):
    r""" Noise powers, SINR threshold and power budget (all linear, powers in mW).

    Parameters:
        ``noise_user``: noise power at each user (sigma_k^2).
        ``noise_ap``: noise power at the AP receiver (sigma_s^2).
        ``sinr_threshold``: minimum SINR per user (Gamma_th).
        ``total_power``: AP power budget (P_AP).
    """

    def __init__(self, noise_user=1e-10, noise_ap=1e-11, sinr_threshold=10.0, total_power=1e4):
        for name, value in (('noise_user', noise_user), ('noise_ap', noise_ap),
                            ('sinr_threshold', sinr_threshold), ('total_power', total_power)):
            if not value > 0:
                raise ValueError("{} must be > 0, got {}".format(name, value))
        self.noise_user = float(noise_user)
        self.noise_ap = float(noise_ap)
        self.sinr_threshold = float(sinr_threshold)
        self.total_power = float(total_power)


class BeamformingSolution(object):
    r""" Result of the per-slot inner optimization.

    Attributes:
        ``w``: (K, M) communication beamformers, one row per user.
        ``r_s``: (M, M) sensing covariance, rank one: ``w_s w_s^H``.
        ``w_s``: (M,) sensing beamforming vector.
        ``phases``: (N,) unit-modulus RIS reflection coefficients.
        ``f_rx``: (M,) unit-norm receive beamformer, ``None`` when the receiver could not be built.
        ``sinr``: (K,) achieved SINRs.
        ``feasible``: whether every SINR constraint holds within the power budget.
    """

    def __init__(self, w, w_s, phases, f_rx=None, sinr=None, feasible=True):
        self.w = np.asarray(w, dtype=complex).reshape(-1, np.size(w_s))
        self.w_s = np.asarray(w_s, dtype=complex)
        self.r_s = np.outer(self.w_s, self.w_s.conj())
        self.phases = np.asarray(phases, dtype=complex)
        self.f_rx = None if f_rx is None else np.asarray(f_rx, dtype=complex)
        self.sinr = np.zeros(self.w.shape[0]) if sinr is None else np.asarray(sinr, dtype=float)
        self.feasible = bool(feasible)

    @property
    def transmit_power(self):
        return float(np.sum(np.abs(self.w) ** 2) + np.real(np.trace(self.r_s)))

    @property
    def sensing_power(self):
        """ tr(R_s): the part of the budget left for sensing after the SINR constraints. """
        return float(np.sum(np.abs(self.w_s) ** 2))

    @property
    def min_sinr(self):
        return float(np.min(self.sinr)) if self.sinr.size else float('inf')


def effective_user_channel(channels, phases):
    """ (K, M) rows h_k = G^H Phi^H h^{U,k}. """
    return (channels.g_ap_ris.conj().T @ (phases.conj()[:, None] * channels.h_ris_user.T)).T


def _sinr_from_channels(h_eff, w, r_s, noise_user, k):
    hk = h_eff[k]
    gains = np.abs(w.conj() @ hk) ** 2
    interference = gains.sum() - gains[k]
    sensing = np.real(hk.conj() @ r_s @ hk)
    return float(gains[k] / (interference + sensing + noise_user))


def sinr(solution, channels, budget, k):
    """ SINR of user ``k`` with inter-user and sensing-signal interference. """
    h_eff = effective_user_channel(channels, solution.phases)
    return _sinr_from_channels(h_eff, solution.w, solution.r_s, budget.noise_user, k)


def align_phases_to_target(channels):
    """ Phases maximizing ||G^T Phi^T a(theta_s)||: elementwise alignment with the principal
        right singular vector of G^T diag(a(theta_s)).
    """
    b = channels.g_ap_ris.T * channels.a_target[None, :]
    _, _, vh = np.linalg.svd(b)
    principal = vh[0].conj()
    return np.exp(1j * np.angle(principal))


def zero_forcing_directions(h_eff):
    """ (K, M) directions z_k with h_k^H z_i = delta_ki, or ``None`` when the users are not separable. """
    k = h_eff.shape[0]
    if k == 0:
        return np.zeros((0, h_eff.shape[1]), dtype=complex)
    gram = h_eff.conj() @ h_eff.T
    if np.linalg.cond(gram) > 1e12:
        return None
    # rows are the columns of pinv(H^H), H = [h_1, ..., h_K]
    return np.linalg.pinv(h_eff.conj()).T


def required_power(h_eff, budget):
    z = zero_forcing_directions(h_eff)
    if z is None:
        return float('inf'), None
    powers = budget.sinr_threshold * budget.noise_user * np.ones(h_eff.shape[0])
    return float(np.sum(powers * np.sum(np.abs(z) ** 2, axis=1))), z


def repair_phases(channels, budget, phases, iterations=20, candidates=16):
    """ Greedy coordinate-wise phase updates that lower the zero-forcing power needed for the
        SINR constraints, stopping as soon as it fits the budget.
    """
    phases = phases.copy()
    needed, _ = required_power(effective_user_channel(channels, phases), budget)
    grid = np.exp(2j * np.pi * np.arange(candidates) / candidates)
    n = channels.num_ris_elements
    for it in range(iterations):
        if needed <= budget.total_power:
            break
        idx = it % n
        best_phase, best_power = phases[idx], needed
        for c in grid:
            trial = phases.copy()
            trial[idx] = c
            p, _ = required_power(effective_user_channel(channels, trial), budget)
            if p < best_power:
                best_phase, best_power = c, p
        phases[idx] = best_phase
        needed = best_power
    logger.debug("Phase repair finished with required power %.4g (budget %.4g)", needed, budget.total_power)
    return phases


def sensing_direction(channels, phases, h_eff):
    """ Unit vector along conj(G^T Phi^T a(theta_s)) with the user channels projected out. """
    u = np.conj(channels.target_direction(phases))
    norm0 = np.linalg.norm(u)
    if norm0 == 0.0:
        return None
    if h_eff.shape[0] > 0:
        q = linalg.orth(h_eff.T)
        # projected twice: a single pass leaves rounding error along the user channels
        for _ in range(2):
            u = u - q @ (q.conj().T @ u)
    norm = np.linalg.norm(u)
    if norm <= 1e-12 * norm0:
        return None
    return u / norm


def _split_power(h_eff, z, u, budget, needed):
    """ Zero-forcing beamformers and sensing beam sharing ``P_AP``.

        User k gets p_k = Gamma_th (sigma_k^2 + P_s |h_k^H u|^2) along z_k, so its SINR is Gamma_th
        whatever the sensing beam leaks into it. P_s takes the rest of the budget.
    """
    z_norm2 = np.sum(np.abs(z) ** 2, axis=1)
    if u is None:
        return np.sqrt(budget.sinr_threshold * budget.noise_user) * z, np.zeros(h_eff.shape[1], dtype=complex)
    leak = np.abs(h_eff.conj() @ u) ** 2
    sensing_power = max(budget.total_power - needed, 0.0) / (1.0 + budget.sinr_threshold * np.sum(leak * z_norm2))
    powers = budget.sinr_threshold * (budget.noise_user + sensing_power * leak)
    return np.sqrt(powers)[:, None] * z, np.sqrt(sensing_power) * u


def optimize_phases_and_beamformers(channels, budget, phase_iterations=20, fixed_phases=None, receiver='nsp'):
    r""" Heuristic inner solver for one slot.

    Steps: (1) RIS phases aligned to the AP-RIS-target round trip, then greedy repair of violated
    SINR constraints (skipped when ``fixed_phases`` is given); (2) zero-forcing beamformers scaled so
    every user sits exactly at the SINR threshold; (3) remaining power to a rank-one sensing covariance.

    Infeasible slots (zero-forcing needs more than ``P_AP``) scale all beamformers by a common factor
    reaching the budget, leave the sensing covariance empty and set ``feasible=False``.

    Parameters:
        ``receiver``: ``'nsp'`` (null-space projection) or ``'matched'`` (no interference suppression).
    """
    if receiver not in RECEIVERS:
        raise ValueError("receiver should be one of {}, got {}".format(RECEIVERS, receiver))
    k, m = channels.num_users, channels.num_ap_antennas
    if k > m:
        raise ValueError("Zero-forcing needs K <= M, got K={}, M={}".format(k, m))

    if fixed_phases is None:
        phases = align_phases_to_target(channels)
        phases = repair_phases(channels, budget, phases, iterations=phase_iterations)
    else:
        phases = np.asarray(fixed_phases, dtype=complex)

    h_eff = effective_user_channel(channels, phases)
    needed, z = required_power(h_eff, budget)
    per_user = budget.sinr_threshold * budget.noise_user
    w_s = np.zeros(m, dtype=complex)
    if needed <= budget.total_power:
        feasible = True
        w, w_s = _split_power(h_eff, z, sensing_direction(channels, phases, h_eff), budget, needed)
    else:
        feasible = False
        if z is not None:
            w = np.sqrt(per_user) * z * np.sqrt(budget.total_power / needed)
        else:
            norms = np.linalg.norm(h_eff, axis=1, keepdims=True)
            w = np.where(norms > 0, h_eff / np.where(norms > 0, norms, 1.0), 0.0) * np.sqrt(budget.total_power / k)
        logger.info("Infeasible slot: zero-forcing needs %.4g mW, budget %.4g mW", needed, budget.total_power)

    solution = BeamformingSolution(w=w, w_s=w_s, phases=phases, feasible=feasible)
    solution.sinr = np.array([_sinr_from_channels(h_eff, solution.w, solution.r_s, budget.noise_user, i)
                              for i in range(k)])
    if receiver == 'nsp':
        try:
            solution.f_rx = nsp_receive_beamformer(channels, solution)
        except NspDegenerateError as e:
            logger.info("No receive beamformer this slot: %s", e)
    else:
        solution.f_rx = matched_receive_beamformer(channels, solution)
    return solution


def interference_directions(channels, solution):
    """ Columns of C: G^SI w_k, G^SI w_s and G^T Phi^T a(theta_k). """
    columns = [channels.g_si @ wk for wk in solution.w]
    columns.append(channels.g_si @ solution.w_s)
    c = np.stack(columns, axis=1) if columns else np.zeros((channels.num_ap_antennas, 0), dtype=complex)
    return np.concatenate([c, channels.clutter_directions(solution.phases)], axis=1)


def nsp_receive_beamformer(channels, solution):
    """ f = conj((I - C C^+) v) / ||.|| with v = G^T Phi^T a(theta_s). """
    v = channels.target_direction(solution.phases)
    c = interference_directions(channels, solution)
    norms = np.linalg.norm(c, axis=0)
    c = c[:, norms > 0] / norms[norms > 0]
    projected = v
    if c.shape[1] > 0:
        u, s, _ = np.linalg.svd(c, full_matrices=False)
        basis = u[:, s > 1e-12 * s[0]]
        projected = v - basis @ (basis.conj().T @ v)
    norm = np.linalg.norm(projected)
    if norm <= 1e-12 * max(np.linalg.norm(v), np.finfo(float).tiny):
        raise NspDegenerateError("Target direction lies in the interference subspace")
    return np.conj(projected) / norm


def matched_receive_beamformer(channels, solution):
    """ Conjugate-matched receiver conj(v)/||v|| that ignores SI and clutter. """
    v = channels.target_direction(solution.phases)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return None
    return np.conj(v) / norm


def _interference_matrix(channels, solution):
    return channels.clutter_echo(solution.phases) + channels.g_si


def residual_interference_power(channels, solution, f_rx=None):
    """ Power of the clutter-echo plus SI component of the echo after the receive beamformer. """
    f = solution.f_rx if f_rx is None else f_rx
    if f is None:
        return float('nan')
    row = f @ _interference_matrix(channels, solution)
    power = np.sum(np.abs(solution.w @ row) ** 2) + np.abs(row @ solution.w_s) ** 2
    return float(power)


def interference_power_before_receiver(channels, solution):
    """ Total clutter-echo plus SI power over all AP antennas, before receive beamforming. """
    mat = _interference_matrix(channels, solution)
    power = np.sum(np.abs(mat @ solution.w.T) ** 2) + np.sum(np.abs(mat @ solution.w_s) ** 2)
    return float(power)
