"""Unit tests for flamelab.surface."""

import math

import numpy as np

from flamelab.errors import (EmptySurfaceError, InsufficientStencilError,
                             InvalidBoundaryError, InvalidParameterError)
from flamelab.exact import CATENOID_MASS, ExactKind, exact_values
from flamelab.spherical import SphericalFunction
from flamelab.surface import (boundary_nodes, contact_angle,
                              curvature_report, export_mesh,
                              fundamental_form, immersion_X,
                              principal_radii, support_in_hemisphere,
                              surface_summary)
from flamelab.tests.base import TestCase


def _sphere(radius=1.0, n_theta=16):
    return SphericalFunction.from_function(
        lambda n: np.full(n.shape[:-1], radius), 2, n_theta)


def _catenoid(n_theta=64):
    kind = ExactKind(ExactKind.CATENOID)

    return SphericalFunction.from_function(
        lambda n: exact_values(kind, n), 2, n_theta)


class CurvatureTests(TestCase):
    """Unit tests for the pointwise surface geometry."""

    def test_round_sphere(self):
        """Testing curvature_report on a round sphere"""
        sample = curvature_report(_sphere(2.0), 5, 3)

        self.assertAllClose(sample.X, 2.0 * sample.n, atol=1e-12)
        self.assertAllClose(sample.radii, [2.0, 2.0], atol=1e-12)
        self.assertAlmostEqual(sample.gauss_K, 0.25, places=10)
        self.assertAlmostEqual(sample.mean_residual, 4.0, places=10)
        self.assertAlmostEqual(sample.E, 4.0, places=10)
        self.assertAlmostEqual(sample.G, 4.0, places=10)
        self.assertAlmostEqual(sample.F, 0.0, places=10)
        self.assertAlmostEqual(sample.conformality_defect, 0.0, places=10)
        self.assertFalse(sample.branch_point)
        self.assertEqual(sample.to_json()['radii'], list(sample.radii))

    def test_point_surface_branch(self):
        """Testing curvature_report flags the support function of a point"""
        p = np.array([0.2, 0.1, -0.3])
        g = SphericalFunction.from_function(lambda n: np.dot(n, p), 2, 12)
        sample = curvature_report(g, 4, 7)

        self.assertTrue(sample.branch_point)
        self.assertIsNone(sample.gauss_K)
        self.assertAllClose(sample.X, p, atol=1e-12)

    def test_immersion_X(self):
        """Testing immersion_X wraps the azimuthal index"""
        g = _sphere()

        self.assertAllClose(immersion_X(g, 3, 32 + 1), immersion_X(g, 3, 1))

        with self.assertRaises(InsufficientStencilError):
            immersion_X(g, 15, 0)

    def test_principal_radii(self):
        """Testing principal_radii on a symmetric matrix"""
        low, high = principal_radii(np.array([[2.0, 1.0], [1.0, 2.0]]))

        self.assertAlmostEqual(float(low), 1.0)
        self.assertAlmostEqual(float(high), 3.0)

    def test_circle_rejected(self):
        """Testing curvature_report with samples on S^1"""
        with self.assertRaises(InvalidParameterError):
            curvature_report(SphericalFunction(1, np.ones(8)), 2, 0)

    def test_fundamental_form(self):
        """Testing fundamental_form of the unit sphere by differencing X"""
        form = fundamental_form(_sphere(), 2, 5)

        self.assertAlmostEqual(form.E, 1.0, places=12)
        self.assertAlmostEqual(form.G, 1.0, places=12)
        self.assertAlmostEqual(form.F, 0.0, places=12)
        self.assertFalse(form.branch_point)

        with self.assertRaises(InsufficientStencilError):
            fundamental_form(_sphere(), 1, 0)

    def test_catenoid_minimal(self):
        """Testing the catenoid support function has zero mean curvature"""
        summary = surface_summary(_catenoid(), CATENOID_MASS)

        self.assertGreater(summary['nodes'], 0)
        self.assertLess(summary['max_abs_mean_residual'], 0.05)
        self.assertEqual(summary['branch_points'], 0)
        self.assertAlmostEqual(summary['min_support_g'], 0.0, delta=0.06)


class ContactAngleTests(TestCase):
    """Unit tests for flamelab.surface.contact_angle."""

    def test_catenoid_orthogonal(self):
        """Testing the catenoid meets its container sphere orthogonally"""
        g = _catenoid()
        table = contact_angle(g, CATENOID_MASS)

        self.assertEqual(len(table), len(boundary_nodes(g)))
        self.assertEqual(len(table), 2 * g.n_phi)
        self.assertAllClose(table.angles, 0.5 * math.pi, atol=0.05)
        self.assertAllClose(table.radii, 1.0, atol=0.05)

        summary = table.to_json()
        self.assertEqual(summary['count'], 2 * g.n_phi)
        self.assertAlmostEqual(summary['container_radius'], 1.0)

    def test_boundary_tolerance(self):
        """Testing contact_angle with a boundary node far from zero"""
        with self.assertRaises(InvalidBoundaryError):
            contact_angle(_sphere(), 0.5, boundary=[(5, 0)])

    def test_invalid_mass(self):
        """Testing contact_angle with mass <= 0"""
        with self.assertRaises(InvalidParameterError):
            contact_angle(_catenoid(16), 0.0)

    def test_empty_table(self):
        """Testing contact_angle on a support without boundary"""
        table = contact_angle(_sphere(), 0.5)

        self.assertEqual(len(table), 0)
        self.assertEqual(table.to_json(), {'count': 0})


class MeshTests(TestCase):
    """Unit tests for flamelab.surface.export_mesh."""

    def test_sphere_closed(self):
        """Testing export_mesh closes a sphere"""
        mesh = export_mesh(_sphere(n_theta=8))

        self.assertEqual(mesh.euler_characteristic, 2)
        self.assertEqual(mesh.boundary_loops, 0)
        self.assertEqual(len(mesh.vertices), 6 * 16)

    def test_catenoid_annulus(self):
        """Testing export_mesh of the catenoid is an annulus"""
        mesh = export_mesh(_catenoid(32))

        self.assertEqual(mesh.euler_characteristic, 0)
        self.assertEqual(mesh.boundary_loops, 2)
        self.assertEqual(mesh.to_json()['boundary_loops'], 2)

    def test_resolution(self):
        """Testing export_mesh resamples first"""
        mesh = export_mesh(_catenoid(16), resolution=(32, 64))

        self.assertEqual(mesh.euler_characteristic, 0)
        self.assertAllClose(np.linalg.norm(mesh.normals, axis=-1), 1.0)

    def test_empty(self):
        """Testing export_mesh with an empty support"""
        with self.assertRaises(EmptySurfaceError):
            export_mesh(SphericalFunction(2, -np.ones((8, 16))))

    def test_to_obj(self):
        """Testing SurfaceMesh.to_obj"""
        mesh = export_mesh(_sphere(n_theta=4, radius=1.0))
        lines = mesh.to_obj().splitlines()

        self.assertEqual(lines[0], '# flamelab surface mesh')
        self.assertEqual(len([l for l in lines if l.startswith('v ')]), 8)
        self.assertEqual(len([l for l in lines if l.startswith('vn ')]), 8)
        faces = [l for l in lines if l.startswith('f ')]
        self.assertEqual(len(faces), 12)

        indices = [int(part.split('//')[0])
                   for line in faces
                   for part in line.split()[1:]]
        self.assertEqual(min(indices), 1)
        self.assertEqual(max(indices), 8)


class HemisphereTests(TestCase):
    """Unit tests for flamelab.surface.support_in_hemisphere."""

    def test_cap(self):
        """Testing support_in_hemisphere on a polar cap"""
        g = SphericalFunction.from_function(
            lambda n: np.maximum(n[..., 2] - 0.5, 0.0), 2, 16)
        contained, margin, pole = support_in_hemisphere(g)

        self.assertTrue(contained)
        self.assertGreater(margin, 0.0)
        self.assertAllClose(pole, [0.0, 0.0, 1.0], atol=1e-6)

    def test_catenoid_band(self):
        """Testing support_in_hemisphere on the catenoid band"""
        contained, margin, pole = support_in_hemisphere(_catenoid(16))

        self.assertFalse(contained)
        self.assertIsNone(pole)

    def test_circle_arc(self):
        """Testing support_in_hemisphere on S^1"""
        g = SphericalFunction.from_function(
            lambda n: np.maximum(n[..., 1], 0.0), 1, 16)
        contained, margin, pole = support_in_hemisphere(g)

        self.assertTrue(contained)
        self.assertAllClose(pole, [0.0, 1.0], atol=1e-6)

    def test_empty(self):
        """Testing support_in_hemisphere with an empty support"""
        self.assertEqual(
            support_in_hemisphere(SphericalFunction(1, -np.ones(8))),
            (False, 0.0, None))
