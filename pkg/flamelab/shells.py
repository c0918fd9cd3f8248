"""Quadrature on spheres and balls, and sampling of fields on them.

Sampling works with any field object that offers ``values_at(points)``,
``gradient_at(points)`` and ``check_points(points, margin, what)``. Both
gridded :py:class:`~flamelab.fields.ScalarField` objects and analytic
:py:class:`~flamelab.exact.AnalyticField` objects qualify.
"""

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from flamelab.errors import InvalidParameterError, OutOfDomainError


class ShellQuadrature(object):
    """A quadrature rule for the unit sphere S^(N-1).

    In 2D the rule uses ``n_theta`` uniform angles (the trapezoid rule,
    spectrally accurate for periodic integrands). In 3D it uses
    Gauss-Legendre nodes in ``cos(theta)`` crossed with ``n_phi`` uniform
    azimuths.

    Attributes:
        dim (int):
            The ambient dimension (2 or 3).

        n_theta (int):
            The polar sample count (or the angle count in 2D).

        n_phi (int):
            The azimuthal sample count. Unused in 2D.

        directions (numpy.ndarray):
            The unit directions, of shape ``(n, dim)``.

        weights (numpy.ndarray):
            The positive weights, summing to the sphere area.
    """

    def __init__(self, dim, n_theta=256, n_phi=None):
        """Initialize the rule.

        Args:
            dim (int):
                The ambient dimension.

            n_theta (int, optional):
                The polar or angular sample count.

            n_phi (int, optional):
                The azimuthal sample count. Defaults to ``2 * n_theta``.

        Raises:
            flamelab.errors.InvalidParameterError:
                The dimension or a count was invalid.
        """
        if dim not in (2, 3):
            raise InvalidParameterError('dim', dim, '2 or 3')

        if int(n_theta) < 2:
            raise InvalidParameterError('n_theta', n_theta,
                                        'an integer >= 2')

        n_theta = int(n_theta)

        if dim == 2:
            angles = 2.0 * math.pi * np.arange(n_theta) / n_theta
            directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
            weights = np.full(n_theta, 2.0 * math.pi / n_theta)
            n_phi = None
        else:
            if n_phi is None:
                n_phi = 2 * n_theta

            n_phi = int(n_phi)

            if n_phi < 3:
                raise InvalidParameterError('n_phi', n_phi, 'an integer >= 3')

            cos_theta, w_theta = leggauss(n_theta)
            phi = 2.0 * math.pi * np.arange(n_phi) / n_phi

            ct, cp = np.meshgrid(cos_theta, phi, indexing='ij')
            st = np.sqrt(1.0 - ct * ct)
            directions = np.stack([st * np.cos(cp),
                                   st * np.sin(cp),
                                   ct], axis=-1).reshape(-1, 3)
            weights = np.repeat(w_theta * (2.0 * math.pi / n_phi), n_phi)

        self.dim = dim
        self.n_theta = n_theta
        self.n_phi = n_phi
        self.directions = directions
        self.weights = weights

    @property
    def area(self):
        """The area of the unit sphere (2 pi or 4 pi)."""
        if self.dim == 2:
            return 2.0 * math.pi

        return 4.0 * math.pi

    def sphere_points(self, center, r):
        """Return the quadrature points on a sphere.

        Args:
            center (numpy.ndarray):
                The sphere center.

            r (float):
                The radius.

        Returns:
            numpy.ndarray:
            Points of shape ``(n, dim)``.
        """
        return np.asarray(center, dtype=float) + r * self.directions

    def integrate(self, values):
        """Integrate per-direction values over the unit sphere.

        Args:
            values (numpy.ndarray):
                Values at the quadrature directions.

        Returns:
            float:
            The weighted sum.
        """
        return float(np.dot(self.weights, values))

    def ball_rule(self, center, r, n_radial=16):
        """Return a quadrature rule for a ball.

        The rule is this shell rule crossed with Gauss-Legendre nodes in
        the radius, weighted by ``rho**(N-1)``.

        Args:
            center (numpy.ndarray):
                The ball center.

            r (float):
                The ball radius.

            n_radial (int, optional):
                The number of radial nodes.

        Returns:
            tuple:
            A ``(points, weights)`` tuple, with points of shape
            ``(n, dim)``. The weights sum to the ball volume.
        """
        nodes, w = leggauss(n_radial)
        rho = 0.5 * r * (nodes + 1.0)
        w_rho = 0.5 * r * w * rho ** (self.dim - 1)

        points = (np.asarray(center, dtype=float) +
                  rho[:, np.newaxis, np.newaxis] * self.directions)
        weights = w_rho[:, np.newaxis] * self.weights

        return points.reshape(-1, self.dim), weights.reshape(-1)

    def __repr__(self):
        return '<ShellQuadrature(dim=%r, n_theta=%r, n_phi=%r)>' % (
            self.dim, self.n_theta, self.n_phi)


def ball_volume(dim, r):
    """Return the volume of a ball.

    Args:
        dim (int):
            The dimension.

        r (float):
            The radius.

    Returns:
        float:
        The volume.
    """
    return math.pi ** (0.5 * dim) / math.gamma(0.5 * dim + 1.0) * r ** dim


def sample_shell(field, center, r, quad, what='sphere'):
    """Sample values and gradients of a field on a sphere.

    Args:
        field (object):
            The field.

        center (numpy.ndarray):
            The sphere center.

        r (float):
            The radius.

        quad (ShellQuadrature):
            The quadrature rule.

        what (str, optional):
            A description used in errors.

    Returns:
        tuple:
        A ``(points, values, gradients)`` tuple.

    Raises:
        flamelab.errors.InvalidParameterError:
            The radius was not positive.

        flamelab.errors.OutOfDomainError:
            The sphere leaves the field domain with a one-cell margin.
    """
    if not r > 0:
        raise InvalidParameterError('r', r, 'a positive radius')

    points = quad.sphere_points(center, r)
    field.check_points(points, margin=1.0,
                       what='%s of radius %g' % (what, r))

    values = field.values_at(points)
    gradients = field.gradient_at(points)
    _check_finite(values, gradients, '%s of radius %g' % (what, r))

    return points, values, gradients


def sample_ball(field, center, r, quad, n_radial=16, what='ball'):
    """Sample values of a field with a ball quadrature rule.

    Args:
        field (object):
            The field.

        center (numpy.ndarray):
            The ball center.

        r (float):
            The radius.

        quad (ShellQuadrature):
            The angular rule.

        n_radial (int, optional):
            The number of radial nodes.

        what (str, optional):
            A description used in errors.

    Returns:
        tuple:
        A ``(values, weights)`` tuple.

    Raises:
        flamelab.errors.OutOfDomainError:
            The ball leaves the field domain.
    """
    if not r > 0:
        raise InvalidParameterError('r', r, 'a positive radius')

    points, weights = quad.ball_rule(center, r, n_radial=n_radial)
    field.check_points(points, margin=0.0,
                       what='%s of radius %g' % (what, r))

    values = field.values_at(points)
    _check_finite(values, None, '%s of radius %g' % (what, r))

    return values, weights


def _check_finite(values, gradients, what):
    bad = ~np.isfinite(values)

    if gradients is not None:
        bad |= ~np.all(np.isfinite(gradients), axis=-1)

    if np.any(bad):
        raise OutOfDomainError(what, int(np.count_nonzero(bad)))
