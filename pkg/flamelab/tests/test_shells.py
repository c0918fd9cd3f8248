"""Unit tests for flamelab.shells."""

import math

import numpy as np

from flamelab.errors import InvalidParameterError, OutOfDomainError
from flamelab.exact import AnalyticField
from flamelab.fields import GridSpec, ScalarField
from flamelab.shells import (ShellQuadrature, ball_volume, sample_ball,
                             sample_shell)
from flamelab.tests.base import TestCase


class ShellQuadratureTests(TestCase):
    """Unit tests for flamelab.shells.ShellQuadrature."""

    def test_area(self):
        """Testing ShellQuadrature weights sum to the sphere area"""
        self.assertAlmostEqual(float(np.sum(ShellQuadrature(2, 64).weights)),
                               2.0 * math.pi)
        self.assertAlmostEqual(float(np.sum(ShellQuadrature(3, 16).weights)),
                               4.0 * math.pi)

    def test_directions_unit(self):
        """Testing ShellQuadrature directions are unit vectors"""
        quad = ShellQuadrature(3, 12, 20)

        self.assertEqual(quad.directions.shape, (240, 3))
        self.assertAllClose(np.linalg.norm(quad.directions, axis=-1), 1.0)

    def test_integrate_polynomials(self):
        """Testing ShellQuadrature.integrate on low-degree polynomials"""
        quad2 = ShellQuadrature(2, 32)
        quad3 = ShellQuadrature(3, 8)

        self.assertAlmostEqual(quad2.integrate(quad2.directions[:, 0] ** 2),
                               math.pi)
        self.assertAlmostEqual(quad3.integrate(quad3.directions[:, 2] ** 2),
                               4.0 * math.pi / 3.0)
        self.assertAlmostEqual(
            quad3.integrate(quad3.directions[:, 0] ** 2 *
                            quad3.directions[:, 1] ** 2),
            4.0 * math.pi / 15.0)

    def test_ball_rule(self):
        """Testing ShellQuadrature.ball_rule"""
        quad = ShellQuadrature(3, 8)
        points, weights = quad.ball_rule(np.array([1.0, 0.0, 0.0]), 2.0)

        self.assertAlmostEqual(float(np.sum(weights)), ball_volume(3, 2.0))

        r2 = np.sum((points - [1.0, 0.0, 0.0]) ** 2, axis=-1)
        self.assertAlmostEqual(float(np.dot(weights, r2)),
                               4.0 * math.pi / 5.0 * 2.0 ** 5)

    def test_invalid(self):
        """Testing ShellQuadrature with invalid parameters"""
        with self.assertRaises(InvalidParameterError):
            ShellQuadrature(4)

        with self.assertRaises(InvalidParameterError):
            ShellQuadrature(2, 1)

        with self.assertRaises(InvalidParameterError):
            ShellQuadrature(3, 8, 2)

    def test_ball_volume(self):
        """Testing ball_volume"""
        self.assertAlmostEqual(ball_volume(1, 1.0), 2.0)
        self.assertAlmostEqual(ball_volume(2, 1.0), math.pi)
        self.assertAlmostEqual(ball_volume(3, 0.5), math.pi / 6.0)


class SamplingTests(TestCase):
    """Unit tests for flamelab.shells.sample_shell and sample_ball."""

    def test_sample_shell_analytic(self):
        """Testing sample_shell on an analytic field"""
        field = AnalyticField(2, lambda x: x[..., 0],
                              lambda x: np.stack([np.ones(x.shape[:-1]),
                                                  np.zeros(x.shape[:-1])],
                                                 axis=-1))
        quad = ShellQuadrature(2, 8)
        points, values, gradients = sample_shell(field, np.zeros(2), 2.0,
                                                 quad)

        self.assertAllClose(values, 2.0 * quad.directions[:, 0])
        self.assertAllClose(gradients[:, 0], 1.0)

    def test_sample_shell_out_of_domain(self):
        """Testing sample_shell with a sphere leaving the grid"""
        field = ScalarField(GridSpec.centered_box(2, 21), np.zeros((21, 21)))

        with self.assertRaises(OutOfDomainError):
            sample_shell(field, np.zeros(2), 0.99, ShellQuadrature(2, 16))

    def test_sample_shell_ball_exterior(self):
        """Testing sample_shell on a ball domain near its edge"""
        grid = GridSpec.ball(2, 0.05, radius=1.0)
        field = ScalarField(grid, np.zeros(grid.shape))
        quad = ShellQuadrature(2, 16)

        sample_shell(field, np.zeros(2), 0.5, quad)

        with self.assertRaises(OutOfDomainError):
            sample_shell(field, np.zeros(2), 0.99, quad)

    def test_sample_shell_radius(self):
        """Testing sample_shell with r <= 0"""
        field = ScalarField(GridSpec.centered_box(2, 21), np.zeros((21, 21)))

        with self.assertRaises(InvalidParameterError):
            sample_shell(field, np.zeros(2), 0.0, ShellQuadrature(2, 16))

    def test_sample_ball(self):
        """Testing sample_ball integrates a linear field"""
        grid = GridSpec.centered_box(2, 41)
        field = ScalarField.from_function(grid,
                                          lambda x: 1.0 + x[..., 0])
        values, weights = sample_ball(field, np.array([0.1, 0.0]), 0.5,
                                      ShellQuadrature(2, 32))

        self.assertAlmostEqual(float(np.dot(values, weights)),
                               1.1 * math.pi * 0.25, places=10)
