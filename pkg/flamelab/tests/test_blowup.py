"""Unit tests for flamelab.blowup."""

import math

import numpy as np

from flamelab.blowup import (DEGENERACY_FACTOR, BlowupClass, FreeBoundarySet,
                             ball_sup, circle_trace, classify_blowup_2d,
                             density_ladder, extract_free_boundary,
                             extrapolate_density, homogeneity_deviation,
                             label_density_sets, lebesgue_density,
                             nondegeneracy_indicator, representation_constant,
                             rescale, spherical_mean_bound)
from flamelab.errors import InvalidParameterError, OutOfDomainError
from flamelab.exact import (CATENOID_MASS, AnalyticField, ExactKind,
                            catenoid_theta0, exact_values, make_exact_field)
from flamelab.fields import GridSpec, ScalarField
from flamelab.shells import ShellQuadrature
from flamelab.spherical import SphericalFunction
from flamelab.tests.base import TestCase


def _trace(kind, n=512, angle=0.0):
    normal = np.array([math.cos(angle), math.sin(angle)])

    def func(x):
        rotated = np.stack([x @ normal,
                            x @ np.array([-normal[1], normal[0]])], axis=-1)

        return exact_values(kind, rotated)

    return SphericalFunction.from_function(func, 1, n)


class RescaleTests(TestCase):
    """Unit tests for flamelab.blowup.rescale."""

    def setUp(self):
        super(RescaleTests, self).setUp()

        grid = GridSpec.centered_box(2, 65)
        field = make_exact_field(ExactKind(ExactKind.HALF_PLANE, mass=1.0),
                                 grid)
        self.field = field.with_values(field.values, eps=0.1)

    def test_homogeneous(self):
        """Testing rescale leaves a homogeneous field unchanged"""
        out = rescale(self.field, np.zeros(2), 0.5, out_shape=(33, 33),
                      out_spacing=1.0 / 32)
        expected = math.sqrt(2.0) * np.maximum(
            out.grid.coordinates()[..., 0], 0.0)

        self.assertAllClose(out.values, expected, atol=1e-12)
        self.assertAlmostEqual(out.eps, 0.2)
        self.assertEqual(out.mass, 1.0)

    def test_out_of_domain(self):
        """Testing rescale with a window leaving the domain"""
        with self.assertRaises(OutOfDomainError):
            rescale(self.field, np.zeros(2), 2.0)

    def test_invalid_rho(self):
        """Testing rescale with rho <= 0"""
        with self.assertRaises(InvalidParameterError):
            rescale(self.field, np.zeros(2), 0.0)


class HomogeneityTests(TestCase):
    """Unit tests for flamelab.blowup.homogeneity_deviation."""

    def test_homogeneous(self):
        """Testing homogeneity_deviation vanishes for a cone"""
        field = AnalyticField.from_kind(ExactKind(ExactKind.CATENOID), 3)

        self.assertLess(homogeneity_deviation(field, np.zeros(3), 0.5, 1.0,
                                              ShellQuadrature(3, 16)),
                        1e-20)

    def test_shifted_linear(self):
        """Testing homogeneity_deviation on 10 + x1"""
        field = AnalyticField(
            2,
            lambda x: 10.0 + x[..., 0],
            lambda x: np.stack([np.ones(x.shape[:-1]),
                                np.zeros(x.shape[:-1])], axis=-1))
        value = homogeneity_deviation(field, np.zeros(2), 0.5, 1.0,
                                      ShellQuadrature(2, 64))

        self.assertAlmostEqual(value, 300.0 * math.pi, places=6)

    def test_invalid_radii(self):
        """Testing homogeneity_deviation with r1 >= r2"""
        field = AnalyticField.from_kind(ExactKind(ExactKind.CATENOID), 3)

        with self.assertRaises(InvalidParameterError):
            homogeneity_deviation(field, np.zeros(3), 1.0, 0.5)


class FreeBoundaryTests(TestCase):
    """Unit tests for free boundary extraction and density labels."""

    def setUp(self):
        super(FreeBoundaryTests, self).setUp()

        self.grid = GridSpec.centered_box(2, 65)
        self.field = make_exact_field(
            ExactKind(ExactKind.HALF_PLANE, mass=1.0), self.grid)

    def test_extract(self):
        """Testing extract_free_boundary on a half-plane solution"""
        fb = extract_free_boundary(self.field)

        self.assertEqual(len(fb), 65)
        self.assertAllClose(fb.points[:, 0], 0.0, atol=1e-12)
        self.assertEqual(fb.count(FreeBoundarySet.UNKNOWN), 65)

    def test_extract_subcell(self):
        """Testing extract_free_boundary places points between nodes"""
        field = ScalarField.from_function(
            self.grid, lambda x: x[..., 0] - 0.01)
        fb = extract_free_boundary(field)

        self.assertAllClose(fb.points[:, 0], 0.01, atol=1e-12)

    def test_extract_empty(self):
        """Testing extract_free_boundary with no transitions"""
        field = ScalarField(self.grid, np.ones(self.grid.shape))
        fb = extract_free_boundary(field)

        self.assertEqual(len(fb), 0)
        self.assertEqual(fb.points.shape, (0, 2))

    def test_extract_invalid_level(self):
        """Testing extract_free_boundary with a negative level"""
        with self.assertRaises(InvalidParameterError):
            extract_free_boundary(self.field, level_tol=-1.0)

    def test_density_ladder(self):
        """Testing density_ladder and lebesgue_density on a half-plane"""
        radii = [0.2, 0.1, 0.05]
        ladder = density_ladder(self.field, np.zeros(2), radii)
        density, ratios = lebesgue_density(self.field, np.zeros(2), radii)

        self.assertAllClose(ladder, 0.5, atol=0.02)
        self.assertAlmostEqual(density, 0.5, delta=0.02)
        self.assertAllClose(ratios, ladder, rtol=0.0, atol=0.0)

    def test_density_radii_order(self):
        """Testing density_ladder with ascending radii"""
        with self.assertRaises(InvalidParameterError):
            density_ladder(self.field, np.zeros(2), [0.1, 0.2])

    def test_extrapolate_density(self):
        """Testing extrapolate_density"""
        self.assertAlmostEqual(
            extrapolate_density(np.array([0.2, 0.1]),
                                np.array([0.7, 0.6])), 0.5)
        self.assertEqual(
            extrapolate_density(np.array([0.2, 0.1]),
                                np.array([0.2, 0.1])), 0.0)
        self.assertEqual(extrapolate_density(np.array([0.1]),
                                             np.array([0.4])), 0.4)

    def test_label_half_density(self):
        """Testing label_density_sets on a half-plane free boundary"""
        fb = extract_free_boundary(self.field)
        labeled = label_density_sets(fb, self.field, [0.2, 0.1, 0.05], 0.1)

        inside = np.abs(fb.points[:, 1]) < 0.7
        labels = np.array(labeled.labels)

        self.assertTrue(np.all(labels[inside] ==
                               FreeBoundarySet.HALF_DENSITY))
        self.assertTrue(np.all(labels[~inside] != FreeBoundarySet.DEGENERATE))

        # Balls near the edge leave the grid.
        self.assertEqual(labels[0], FreeBoundarySet.UNKNOWN)
        self.assertTrue(np.isnan(labeled.densities[0]))

    def test_label_threads(self):
        """Testing label_density_sets gives the same labels with threads"""
        fb = extract_free_boundary(self.field)
        a = label_density_sets(fb, self.field, [0.2, 0.1], 0.1)
        b = label_density_sets(fb, self.field, [0.2, 0.1], 0.1, threads=4)

        self.assertEqual(a.labels, b.labels)
        np.testing.assert_array_equal(a.densities, b.densities)

    def test_label_full_density(self):
        """Testing label_density_sets on a wedge free boundary"""
        field = make_exact_field(ExactKind(ExactKind.WEDGE, alpha=1.0),
                                 self.grid)
        fb = FreeBoundarySet(np.array([[0.0, 0.0]]))
        labeled = label_density_sets(fb, field, [0.2, 0.1], 0.1, mass=0.5)

        self.assertEqual(labeled.labels, [FreeBoundarySet.FULL_DENSITY])

    def test_label_degenerate(self):
        """Testing label_density_sets on a quadratic free boundary"""
        field = ScalarField.from_function(
            self.grid, lambda x: np.maximum(x[..., 0], 0.0) ** 2, mass=1.0)
        fb = FreeBoundarySet(np.array([[0.0, 0.0]]))
        labeled = label_density_sets(fb, field, [0.2, 0.1, 0.05], 0.1)

        self.assertEqual(labeled.labels, [FreeBoundarySet.DEGENERATE])
        self.assertLess(labeled.indicators[0],
                        DEGENERACY_FACTOR * math.sqrt(2.0))

    def test_to_json(self):
        """Testing FreeBoundarySet.to_json"""
        fb = FreeBoundarySet(np.zeros((2, 2)),
                             labels=[FreeBoundarySet.HALF_DENSITY,
                                     FreeBoundarySet.UNKNOWN])
        data = fb.to_json()

        self.assertEqual(data['counts'][FreeBoundarySet.HALF_DENSITY], 1)
        self.assertEqual(data['counts'][FreeBoundarySet.DEGENERATE], 0)


class NonDegeneracyTests(TestCase):
    """Unit tests for the non-degeneracy and flux estimates."""

    def test_indicator(self):
        """Testing nondegeneracy_indicator on a half-plane"""
        field = AnalyticField.from_kind(
            ExactKind(ExactKind.HALF_PLANE, mass=0.5), 2)

        # (1/r) mean of x1+ over B_r is 2 / (3 pi).
        self.assertAlmostEqual(
            nondegeneracy_indicator(field, np.zeros(2), [0.4, 0.2],
                                    ShellQuadrature(2, 258)),
            2.0 / (3.0 * math.pi), places=3)

    def test_ball_sup(self):
        """Testing ball_sup on a half-plane"""
        field = AnalyticField.from_kind(
            ExactKind(ExactKind.HALF_PLANE, mass=2.0), 2)

        self.assertAlmostEqual(ball_sup(field, np.zeros(2), 0.3), 0.6)

    def test_spherical_mean_bound(self):
        """Testing spherical_mean_bound is attained by a half-space"""
        field = AnalyticField.from_kind(
            ExactKind(ExactKind.HALF_PLANE, mass=1.0), 3)
        value, bound = spherical_mean_bound(field, np.zeros(3), 0.5, 1.0,
                                            ShellQuadrature(3, 64, 130))

        self.assertAlmostEqual(bound, math.sqrt(2.0) * math.pi * 0.5)
        self.assertAlmostEqual(value, bound, delta=1e-3 * bound)

    def test_spherical_mean_bound_catenoid(self):
        """Testing spherical_mean_bound holds strictly on the catenoid cone"""
        field = AnalyticField.from_kind(ExactKind(ExactKind.CATENOID), 3)
        theta0 = catenoid_theta0()

        for r in (0.5, 2.0):
            value, bound = spherical_mean_bound(field, np.zeros(3), r,
                                                CATENOID_MASS,
                                                ShellQuadrature(3, 64, 130))

            # u0 = r d_r u0, so value is the flux through dB_r over r. The
            # flux is the area 2 pi r**2 sin(theta0) of the two cones.
            self.assertAlmostEqual(bound, math.pi * r)
            self.assertAlmostEqual(value, 2.0 * math.pi * math.sin(theta0) * r,
                                   delta=5e-3 * value)
            self.assertGreater(value, 1.05 * bound)

    def test_representation_constant(self):
        """Testing representation_constant equals sqrt(2M) on a half-plane"""
        for dim, quad in ((2, ShellQuadrature(2, 258)),
                          (3, ShellQuadrature(3, 64, 130))):
            field = AnalyticField.from_kind(
                ExactKind(ExactKind.HALF_PLANE, mass=0.5), dim)

            self.assertAlmostEqual(
                representation_constant(field, np.zeros(dim), 0.3, quad),
                1.0, delta=1e-3)

    def test_representation_constant_catenoid(self):
        """Testing representation_constant on the catenoid cone"""
        field = AnalyticField.from_kind(ExactKind(ExactKind.CATENOID), 3)
        quad = ShellQuadrature(3, 64, 130)
        value = representation_constant(field, np.zeros(3), 0.4, quad)

        # Against the true free boundary area 2 pi r**2 sin(theta0) instead
        # of the flat disk, the constant is sqrt(2M) = 1.
        self.assertAlmostEqual(value / (2.0 * math.sin(catenoid_theta0())),
                               math.sqrt(2.0 * CATENOID_MASS), delta=5e-3)


class ClassifyTests(TestCase):
    """Unit tests for flamelab.blowup.classify_blowup_2d."""

    def test_half_plane(self):
        """Testing classify_blowup_2d with a half-plane trace"""
        result = classify_blowup_2d(
            _trace(ExactKind(ExactKind.HALF_PLANE, mass=0.5), angle=0.7),
            0.5, 1e-3)

        self.assertEqual(result.variant, BlowupClass.HALF_PLANE)
        self.assertAlmostEqual(result.alpha, 1.0, places=6)
        self.assertAllClose(result.normal, [math.cos(0.7), math.sin(0.7)],
                            atol=1e-6)

    def test_wedge(self):
        """Testing classify_blowup_2d with a wedge trace"""
        result = classify_blowup_2d(
            _trace(ExactKind(ExactKind.WEDGE, alpha=0.8)), 0.5, 1e-3)

        self.assertEqual(result.variant, BlowupClass.WEDGE)
        self.assertAlmostEqual(result.alpha, 0.8, places=6)

    def test_wedge_too_steep(self):
        """Testing classify_blowup_2d with a wedge steeper than sqrt(2M)"""
        result = classify_blowup_2d(
            _trace(ExactKind(ExactKind.WEDGE, alpha=1.5)), 0.5, 1e-3)

        self.assertEqual(result.variant, BlowupClass.UNCLASSIFIED)
        self.assertIsNotNone(result.reason)

    def test_two_plane(self):
        """Testing classify_blowup_2d with a two-plane trace"""
        result = classify_blowup_2d(
            _trace(ExactKind(ExactKind.TWO_PLANE, alpha=math.sqrt(3.0),
                             beta=1.0), angle=-2.0),
            1.0, 1e-3)

        self.assertEqual(result.variant, BlowupClass.TWO_PLANE)
        self.assertAlmostEqual(result.alpha, math.sqrt(3.0), places=6)
        self.assertAlmostEqual(result.beta, 1.0, places=6)

    def test_two_plane_wrong_mass(self):
        """Testing classify_blowup_2d with alpha**2 - beta**2 != 2M"""
        result = classify_blowup_2d(
            _trace(ExactKind(ExactKind.TWO_PLANE, alpha=2.0, beta=1.0)),
            1.0, 1e-3)

        self.assertEqual(result.variant, BlowupClass.UNCLASSIFIED)
        self.assertIn(BlowupClass.TWO_PLANE, result.residuals)

    def test_zero(self):
        """Testing classify_blowup_2d with a vanishing trace"""
        result = classify_blowup_2d(SphericalFunction(1, np.zeros(64)),
                                    1.0, 1e-3)

        self.assertEqual(result.variant, BlowupClass.ZERO)

    def test_half_plane_wrong_slope(self):
        """Testing classify_blowup_2d with a half-plane of the wrong mass"""
        result = classify_blowup_2d(
            _trace(ExactKind(ExactKind.HALF_PLANE, mass=2.0)), 0.5, 1e-3)

        self.assertEqual(result.variant, BlowupClass.UNCLASSIFIED)

    def test_not_a_cone(self):
        """Testing classify_blowup_2d with a trace of a non-cone"""
        trace = SphericalFunction.from_function(
            lambda x: np.maximum(x[..., 0], 0.0) ** 2 + 0.5, 1, 256)
        result = classify_blowup_2d(trace, 1.0, 1e-3)

        self.assertEqual(result.variant, BlowupClass.UNCLASSIFIED)

    def test_invalid(self):
        """Testing classify_blowup_2d with invalid arguments"""
        trace = SphericalFunction(1, np.zeros(64))

        with self.assertRaises(InvalidParameterError):
            classify_blowup_2d(trace, 0.0, 1e-3)

        with self.assertRaises(InvalidParameterError):
            classify_blowup_2d(trace, 1.0, 0.0)

    def test_circle_trace(self):
        """Testing circle_trace of a gridded half-plane solution"""
        field = make_exact_field(ExactKind(ExactKind.HALF_PLANE, mass=0.5),
                                 GridSpec.centered_box(2, 129))
        trace = circle_trace(field, np.zeros(2), r=0.5, n=256)
        result = classify_blowup_2d(trace, 0.5, 1e-2)

        self.assertEqual(trace.dim, 1)
        self.assertEqual(result.variant, BlowupClass.HALF_PLANE)
