"""Unit tests for flamelab.energy."""

import math

import numpy as np

from flamelab.energy import (EnergyProfile, acf_phi, cell_gradient,
                             monotonicity_profile, spruck_increment,
                             spruck_S_eps, spruck_S_limit)
from flamelab.errors import (InvalidPairError, InvalidParameterError,
                             OutOfDomainError)
from flamelab.exact import (AnalyticField, ExactKind, make_exact_field,
                            profile_1d, profile_1d_slope)
from flamelab.fields import GridSpec, ScalarField
from flamelab.shells import ShellQuadrature
from flamelab.tests.base import TestCase


def _shifted_linear_field():
    # u = 10 + x1 is harmonic and stays above the reaction band on B_1.
    return AnalyticField(
        2,
        lambda x: 10.0 + x[..., 0],
        lambda x: np.stack([np.ones(x.shape[:-1]), np.zeros(x.shape[:-1])],
                           axis=-1))


def _layer_field(profile, eps):
    # The exact 1D eps-profile in x1, with the top of its transition layer
    # (u = eps) moved onto the line x1 = 0.
    slope = math.sqrt(2.0 * profile.mass)
    shift = 10.0 - (profile_1d(profile, eps, 10.0) - eps) / slope

    def values(x):
        s = x[..., 0] + shift

        return profile_1d(profile, eps, s.ravel()).reshape(s.shape)

    def gradient(x):
        s = x[..., 0] + shift
        slopes = profile_1d_slope(profile, eps, s.ravel()).reshape(s.shape)

        return np.stack([slopes, np.zeros(s.shape)], axis=-1)

    return AnalyticField(2, values, gradient, name='eps-layer')


class SpruckTests(TestCase):
    """Unit tests for the Spruck functionals."""

    def test_half_plane_closed_form(self):
        """Testing spruck_S_limit on a half-plane solution equals 2 pi M"""
        for mass in (0.5, 1.0, 2.0):
            field = AnalyticField.from_kind(
                ExactKind(ExactKind.HALF_PLANE, mass=mass), 2)
            value = spruck_S_limit(field, np.zeros(2), 0.5, mass,
                                   ShellQuadrature(2, 1026))

            self.assertAlmostEqual(value, 2.0 * math.pi * mass,
                                   delta=1e-3 * mass)

    def test_half_plane_3d(self):
        """Testing spruck_S_limit on a 3D half-space solution equals 4 pi M"""
        field = AnalyticField.from_kind(
            ExactKind(ExactKind.HALF_PLANE, mass=1.0), 3)
        value = spruck_S_limit(field, np.zeros(3), 1.0, 1.0,
                               ShellQuadrature(3, 64, 130))

        self.assertAlmostEqual(value, 4.0 * math.pi, delta=0.1)

    def test_negative_constant(self):
        """Testing spruck_S_eps on u = -1 gives -4 pi at r = 1"""
        field = AnalyticField(2, lambda x: -np.ones(x.shape[:-1]),
                              lambda x: np.zeros(x.shape))

        self.assertAlmostEqual(
            spruck_S_eps(field, np.zeros(2), 1.0, self.make_profile(), 0.1,
                         ShellQuadrature(2, 16)),
            -4.0 * math.pi)

    def test_shifted_linear_closed_form(self):
        """Testing spruck_S_eps on 10 + x1 equals 4 pi - 400 pi / r**2"""
        field = _shifted_linear_field()

        for r in (0.25, 0.5, 1.0):
            value = spruck_S_eps(field, np.zeros(2), r, self.make_profile(),
                                 0.1, ShellQuadrature(2, 64))

            self.assertAlmostEqual(value, 4.0 * math.pi -
                                   400.0 * math.pi / (r * r), places=8)

    def test_increment_identity(self):
        """Testing spruck_increment balances on a harmonic solution"""
        difference, integral = spruck_increment(
            _shifted_linear_field(), np.zeros(2), 0.3, 0.9,
            self.make_profile(), 0.1, ShellQuadrature(2, 64))

        self.assertGreater(difference, 0.0)
        self.assertAlmostEqual(difference, integral,
                               delta=1e-8 * abs(difference))

    def test_increment_identity_layer(self):
        """Testing spruck_increment balances across a reaction layer"""
        profile = self.make_profile()
        eps = 0.2
        field = _layer_field(profile, eps)
        points = np.array([[-0.1, 0.0], [0.1, 0.0]])

        self.assertAllClose(field.values_at(points)[1],
                            eps + 0.1 * math.sqrt(2.0))
        self.assertTrue(0.0 < field.values_at(points)[0] < eps)

        difference, integral = spruck_increment(
            field, np.zeros(2), 0.1, 0.4, profile, eps,
            ShellQuadrature(2, 64), n_radial=8)

        self.assertGreater(integral, 0.0)
        self.assertAlmostEqual(difference, integral,
                               delta=2e-2 * abs(integral))

    def test_increment_invalid_radii(self):
        """Testing spruck_increment with r1 >= r2"""
        with self.assertRaises(InvalidParameterError):
            spruck_increment(_shifted_linear_field(), np.zeros(2), 0.5, 0.5,
                             self.make_profile(), 0.1)

    def test_homogeneous_constant(self):
        """Testing spruck_S_limit is constant for a homogeneous field"""
        field = AnalyticField.from_kind(
            ExactKind(ExactKind.TWO_PLANE, alpha=math.sqrt(3.0), beta=1.0),
            2)
        quad = ShellQuadrature(2, 256)
        values = [spruck_S_limit(field, np.zeros(2), r, 1.0, quad)
                  for r in (0.1, 0.7, 3.0)]

        self.assertAllClose(values, values[0], rtol=1e-10)

    def test_invalid_mass(self):
        """Testing spruck_S_limit with mass <= 0"""
        with self.assertRaises(InvalidParameterError):
            spruck_S_limit(_shifted_linear_field(), np.zeros(2), 0.5, 0.0)

    def test_out_of_domain(self):
        """Testing spruck_S_limit with a sphere leaving the grid"""
        field = make_exact_field(ExactKind(ExactKind.HALF_PLANE, mass=1.0),
                                 GridSpec.centered_box(2, 33))

        with self.assertRaises(OutOfDomainError):
            spruck_S_limit(field, np.zeros(2), 1.0, 1.0)


class MonotonicityProfileTests(TestCase):
    """Unit tests for flamelab.energy.monotonicity_profile."""

    def test_limit_mode(self):
        """Testing monotonicity_profile in limit mode"""
        field = AnalyticField.from_kind(
            ExactKind(ExactKind.HALF_PLANE, mass=0.5), 2)
        table = monotonicity_profile(field, np.zeros(2), [0.1, 0.2, 0.4],
                                     mode=EnergyProfile.MODE_LIMIT,
                                     mass=0.5,
                                     quad=ShellQuadrature(2, 257))

        self.assertEqual(table.mode, EnergyProfile.MODE_LIMIT)
        self.assertEqual(table.mass, 0.5)
        self.assertAlmostEqual(table.defect, 0.0, places=10)

        rows = table.rows()
        self.assertEqual(len(rows), 3)
        self.assertEqual(rows[0][2], 0.0)

    def test_eps_mode_increasing(self):
        """Testing monotonicity_profile in eps mode on a harmonic solution"""
        table = monotonicity_profile(_shifted_linear_field(), np.zeros(2),
                                     [0.2, 0.4, 0.8],
                                     profile=self.make_profile(), eps=0.1,
                                     quad=ShellQuadrature(2, 64))

        self.assertEqual(table.mass, 1.0)
        self.assertGreater(table.defect, 0.0)
        self.assertEqual(table.to_json()['eps'], 0.1)

    def test_invalid_radii(self):
        """Testing monotonicity_profile with invalid radii"""
        field = _shifted_linear_field()

        for radii in ([0.5], [0.5, 0.2], [0.2, 0.2]):
            with self.assertRaises(InvalidParameterError):
                monotonicity_profile(field, np.zeros(2), radii,
                                     mode=EnergyProfile.MODE_LIMIT, mass=1.0)

    def test_missing_eps(self):
        """Testing monotonicity_profile in eps mode without eps"""
        with self.assertRaises(InvalidParameterError):
            monotonicity_profile(_shifted_linear_field(), np.zeros(2),
                                 [0.2, 0.4], profile=self.make_profile())

    def test_unknown_mode(self):
        """Testing monotonicity_profile with an unknown mode"""
        with self.assertRaises(InvalidParameterError):
            monotonicity_profile(_shifted_linear_field(), np.zeros(2),
                                 [0.2, 0.4], mode='weiss', mass=1.0)


class ACFTests(TestCase):
    """Unit tests for flamelab.energy.acf_phi."""

    def setUp(self):
        super(ACFTests, self).setUp()

        self.grid = GridSpec.centered_box(2, 129, 1.0)
        self.u = ScalarField.from_function(
            self.grid, lambda x: np.maximum(x[..., 0], 0.0))
        self.v = ScalarField.from_function(
            self.grid, lambda x: np.maximum(-x[..., 0], 0.0))

    def test_half_planes(self):
        """Testing acf_phi on complementary half-planes equals pi**2 / 4"""
        value = acf_phi(self.u, self.v, np.zeros(2), 0.5)

        self.assertAlmostEqual(value, 0.25 * math.pi ** 2,
                               delta=0.02 * math.pi ** 2)

    def test_symmetric(self):
        """Testing acf_phi is symmetric in its arguments"""
        self.assertAlmostEqual(acf_phi(self.u, self.v, np.zeros(2), 0.5),
                               acf_phi(self.v, self.u, np.zeros(2), 0.5),
                               places=12)

    def test_grid_mismatch(self):
        """Testing acf_phi with fields on different grids"""
        other = ScalarField(GridSpec.centered_box(2, 65), np.zeros((65, 65)))

        with self.assertRaises(InvalidPairError):
            acf_phi(self.u, other, np.zeros(2), 0.5)

    def test_out_of_domain(self):
        """Testing acf_phi with a ball leaving the grid"""
        with self.assertRaises(OutOfDomainError):
            acf_phi(self.u, self.v, np.zeros(2), 1.5)

    def test_cell_gradient(self):
        """Testing cell_gradient is exact for bilinear fields"""
        x = np.linspace(0.0, 1.0, 5)
        values = np.outer(x, np.ones(5)) * 3.0 + np.outer(np.ones(5), x)
        grad = cell_gradient(values, 0.25)

        self.assertEqual(grad.shape, (4, 4, 2))
        self.assertAllClose(grad[..., 0], 3.0)
        self.assertAllClose(grad[..., 1], 1.0)
