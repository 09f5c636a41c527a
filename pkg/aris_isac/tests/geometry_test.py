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
from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import math
import unittest

import numpy as np

from aris_isac import (DegenerateGeometryError, MapSpec, Position3, Velocity2, advance, distance, doa_sine,
                       in_bounds)


class GeometryTest(unittest.TestCase):

    def test_position_validation(self):
        self.assertEqual(Position3(1, 2).z, 0.0)
        with self.assertRaises(ValueError):
            Position3(0.0, 0.0, -1.0)
        with self.assertRaises(ValueError):
            Position3(float('nan'), 0.0, 0.0)

    def test_advance_keeps_altitude(self):
        p = advance(Position3(0.0, -80.0, 50.0), Velocity2(8.0, 0.0), 1.0)
        self.assertEqual(p, (8.0, -80.0, 50.0))

    def test_clamp_per_component(self):
        self.assertEqual(Velocity2(10.0, -10.0).clamp(8.0), (8.0, -8.0))
        self.assertEqual(Velocity2(3.0, -2.0).clamp(8.0), (3.0, -2.0))

    def test_in_bounds_closed(self):
        map_spec = MapSpec()
        self.assertTrue(in_bounds(Position3(100.0, -100.0, 50.0), map_spec))
        self.assertFalse(in_bounds(Position3(100.0001, 0.0, 50.0), map_spec))

    def test_distance_and_doa(self):
        self.assertAlmostEqual(distance(Position3(0, 0), Position3(3, 4)), 5.0)
        aris = Position3(0.0, 0.0, 50.0)
        self.assertAlmostEqual(doa_sine(aris, Position3(50.0, 0.0)), 1.0 / math.sqrt(2.0))
        self.assertAlmostEqual(doa_sine(aris, Position3(0.0, 50.0)), 0.0)
        with self.assertRaises(DegenerateGeometryError):
            doa_sine(aris, aris)

    def test_advance_is_additive(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            p = Position3(*rng.uniform(-100.0, 100.0, size=2), z=50.0)
            v1, v2 = Velocity2(*rng.uniform(-8.0, 8.0, size=2)), Velocity2(*rng.uniform(-8.0, 8.0, size=2))
            dt = rng.uniform(0.1, 2.0)
            two_steps = advance(advance(p, v1, dt), v2, dt)
            one_step = advance(p, Velocity2(v1.vx + v2.vx, v1.vy + v2.vy), dt)
            np.testing.assert_allclose(two_steps, one_step, atol=1e-12)
            self.assertEqual(two_steps.z, 50.0)

    def test_distance_is_a_metric(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            a, b, c = [Position3(*rng.uniform(-100.0, 100.0, size=2), z=rng.uniform(0.0, 60.0)) for _ in range(3)]
            self.assertEqual(distance(a, b), distance(b, a))
            self.assertEqual(distance(a, a), 0.0)
            self.assertLessEqual(distance(a, c), distance(a, b) + distance(b, c) + 1e-12)

    def test_doa_sine_range(self):
        rng = np.random.default_rng(2)
        aris = Position3(0.0, -80.0, 50.0)
        for _ in range(200):
            node = Position3(*rng.uniform(-100.0, 100.0, size=2), z=rng.choice([0.0, 50.0]))
            if node == aris:
                continue
            s = doa_sine(aris, node)
            self.assertGreaterEqual(s, -1.0)
            self.assertLessEqual(s, 1.0)
        self.assertAlmostEqual(doa_sine(aris, Position3(10.0, -80.0, 50.0)), 1.0)
        self.assertAlmostEqual(doa_sine(aris, Position3(-10.0, -80.0, 50.0)), -1.0)

    def test_map_spec_validation(self):
        with self.assertRaises(ValueError):
            MapSpec(w_max=0.0)
        with self.assertRaises(ValueError):
            MapSpec(total_slots=0)


if __name__ == '__main__':
    unittest.main()
