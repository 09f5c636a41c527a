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
"""Positions, velocities and map bounds of the ARIS scenario."""

from __future__ import absolute_import, division, print_function

import logging
import math
from collections import namedtuple

logger = logging.getLogger(__name__)


class DegenerateGeometryError(ValueError):
    """Raised when two nodes coincide and a distance or angle is undefined."""


class Position3(namedtuple('Position3', ['x', 'y', 'z'])):
    """ Position of a node in meters. ``z`` is the altitude (0 for ground nodes, ``H`` for the ARIS). """
    __slots__ = ()

    def __new__(cls, x, y, z=0.0):
        x, y, z = float(x), float(y), float(z)
        if not all(math.isfinite(c) for c in (x, y, z)):
            raise ValueError("Position components must be finite, got ({}, {}, {})".format(x, y, z))
        if z < 0.0:
            raise ValueError("Altitude must be >= 0, got {}".format(z))
        return super(Position3, cls).__new__(cls, x, y, z)


class Velocity2(namedtuple('Velocity2', ['vx', 'vy'])):
    """ Horizontal velocity of the ARIS in m/s. """
    __slots__ = ()

    def __new__(cls, vx, vy):
        return super(Velocity2, cls).__new__(cls, float(vx), float(vy))

    def clamp(self, v_max):
        """ Clamp each component independently to [-v_max, v_max]. """
        return Velocity2(min(max(self.vx, -v_max), v_max), min(max(self.vy, -v_max), v_max))


class MapSpec(object):
    r""" Flight area and time discretization.

    Parameters:
        ``w_max``: half side length of the square map in meters (W_max).
        ``altitude``: hovering altitude of the ARIS in meters (H).
        ``delta_t``: duration of one time slot in seconds.
        ``total_slots``: number of time slots per episode (L_tot).
    """

    def __init__(self, w_max=100.0, altitude=50.0, delta_t=1.0, total_slots=12):
        if not w_max > 0:
            raise ValueError("w_max must be > 0, got {}".format(w_max))
        if not delta_t > 0:
            raise ValueError("delta_t must be > 0, got {}".format(delta_t))
        if int(total_slots) < 1:
            raise ValueError("total_slots must be >= 1, got {}".format(total_slots))
        if altitude < 0:
            raise ValueError("altitude must be >= 0, got {}".format(altitude))
        self.w_max = float(w_max)
        self.altitude = float(altitude)
        self.delta_t = float(delta_t)
        self.total_slots = int(total_slots)

    def __eq__(self, other):
        return isinstance(other, MapSpec) and self.__dict__ == other.__dict__

    def __repr__(self):
        return "MapSpec(w_max={}, altitude={}, delta_t={}, total_slots={})".format(
            self.w_max, self.altitude, self.delta_t, self.total_slots)


def advance(p, v, delta_t):
    """ Move ``p`` by ``v * delta_t`` in the horizontal plane. Altitude is unchanged. """
    return Position3(p.x + v.vx * delta_t, p.y + v.vy * delta_t, p.z)


def in_bounds(p, map_spec):
    """ Closed-boundary check of the horizontal position against [-W_max, W_max]^2. """
    w = map_spec.w_max
    return -w <= p.x <= w and -w <= p.y <= w


def distance(a, b):
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def doa_sine(aris, node):
    """ Sine of the angle between the RIS array normal and ``node``.

    The RIS is a linear array along the global x-axis, so the sine is the x-displacement
    over the 3-D distance.
    """
    d = distance(aris, node)
    if d == 0.0:
        raise DegenerateGeometryError("ARIS and node coincide at {}".format(tuple(aris)))
    return min(max((node.x - aris.x) / d, -1.0), 1.0)
