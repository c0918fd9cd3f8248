"""Functions sampled on S^1 or S^2, and their spherical derivatives.

Samples use shifted grids that never place a node on a pole. On S^1 the
nodes are ``theta_j = (j + 1/2) 2 pi / n``. On S^2 they are
``theta_j = (j + 1/2) pi / n_theta`` (polar angle from the x3 axis) and
``phi_k = 2 pi k / n_phi``.

Derivatives on S^2 are expressed in the orthonormal frame
``(e_theta, e_phi)``. The Hessian in this frame is::

    H_11 = g_theta_theta
    H_12 = (g_theta_phi - cot(theta) g_phi) / sin(theta)
    H_22 = g_phi_phi / sin(theta)**2 + cot(theta) g_theta

Central differences use the denominators ``2 sin(h)`` and
``4 sin(h/2)**2`` in place of ``2h`` and ``h**2``. They stay second order
and are exact on constants and first-order harmonics, so a support
function ``n . p`` maps every node to the point p.
"""

import logging
import math

import numpy as np

from flamelab.errors import InsufficientStencilError, InvalidParameterError


logger = logging.getLogger('flamelab')


class SphericalFunction(object):
    """Samples of a function g on S^1 or S^2.

    Attributes:
        dim (int):
            The sphere dimension (1 or 2).

        values (numpy.ndarray):
            The samples, of shape ``(n,)`` on S^1 or ``(n_theta, n_phi)`` on
            S^2.

        n_theta (int):
            The number of polar (or angular) nodes.

        n_phi (int):
            The number of azimuthal nodes. ``None`` on S^1.
    """

    def __init__(self, dim, values, func=None):
        """Initialize the samples.

        Args:
            dim (int):
                The sphere dimension.

            values (array-like):
                The samples.

            func (callable, optional):
                The function the samples were taken from. It maps unit
                vectors of shape ``(..., dim + 1)`` to values, and allows
                resampling at other resolutions.

        Raises:
            flamelab.errors.InvalidParameterError:
                The samples were not finite or did not fit a grid.
        """
        values = np.array(values, dtype=float)

        if dim == 1:
            if values.ndim != 1 or len(values) < 3:
                raise InvalidParameterError('values', values.shape,
                                            'at least 3 samples on S^1')

            n_theta = len(values)
            n_phi = None
        elif dim == 2:
            if values.ndim != 2 or min(values.shape) < 3:
                raise InvalidParameterError('values', values.shape,
                                            'an (n_theta, n_phi) grid with '
                                            'at least 3 nodes per axis')

            n_theta, n_phi = values.shape
        else:
            raise InvalidParameterError('dim', dim, '1 or 2')

        if not np.all(np.isfinite(values)):
            raise InvalidParameterError('values', 'non-finite samples',
                                        'finite samples')

        values.setflags(write=False)

        self.dim = dim
        self.values = values
        self.n_theta = n_theta
        self.n_phi = n_phi
        self._func = func
        self._derivatives = None

    @classmethod
    def from_function(cls, func, dim, n_theta, n_phi=None):
        """Sample a function of the unit normal.

        Args:
            func (callable):
                Maps unit vectors of shape ``(..., dim + 1)`` to values.

            dim (int):
                The sphere dimension.

            n_theta (int):
                The number of polar (or angular) nodes.

            n_phi (int, optional):
                The number of azimuthal nodes. Defaults to ``2 * n_theta``.

        Returns:
            SphericalFunction:
            The samples.
        """
        normals = grid_normals(dim, n_theta, n_phi)

        return cls(dim, func(normals), func=func)

    @classmethod
    def from_field(cls, field, center, r=1.0, dim=None, n_theta=256,
                   n_phi=None):
        """Sample the spherical part ``u(center + r n) / r`` of a field.

        Args:
            field (object):
                A field offering the sampling interface.

            center (numpy.ndarray):
                The sphere center.

            r (float, optional):
                The sampling radius.

            dim (int, optional):
                The sphere dimension. Defaults to ``field.dim - 1``.

            n_theta (int, optional):
                The number of polar (or angular) nodes.

            n_phi (int, optional):
                The number of azimuthal nodes.

        Returns:
            SphericalFunction:
            The samples.

        Raises:
            flamelab.errors.OutOfDomainError:
                The sphere leaves the field domain.
        """
        if dim is None:
            dim = field.dim - 1

        center = np.asarray(center, dtype=float)
        normals = grid_normals(dim, n_theta, n_phi)
        points = center + r * normals
        field.check_points(points.reshape(-1, dim + 1), margin=0.0,
                           what='sampling sphere of radius %g' % r)

        def func(n):
            return field.values_at(center + r * n) / r

        return cls(dim, func(normals), func=func)

    @classmethod
    def from_table(cls, rows):
        """Build samples on S^2 from ``(theta, phi, g)`` rows.

        The rows must cover a complete shifted grid, in any order.

        Args:
            rows (numpy.ndarray):
                An ``(n, 3)`` array.

        Returns:
            SphericalFunction:
            The samples.

        Raises:
            flamelab.errors.InvalidParameterError:
                The rows did not form a complete shifted grid.
        """
        rows = np.asarray(rows, dtype=float)

        if rows.ndim != 2 or rows.shape[1] != 3:
            raise InvalidParameterError('rows', rows.shape,
                                        'an (n, 3) table of theta, phi, g')

        thetas = np.unique(np.round(rows[:, 0], 12))
        phis = np.unique(np.round(rows[:, 1], 12))
        n_theta = len(thetas)
        n_phi = len(phis)

        if n_theta * n_phi != len(rows):
            raise InvalidParameterError('rows', len(rows),
                                        'one row per node of a %d x %d grid'
                                        % (n_theta, n_phi))

        expected_t, expected_p = grid_angles(2, n_theta, n_phi)

        if (not np.allclose(thetas, expected_t, atol=1e-9) or
                not np.allclose(phis, expected_p, atol=1e-9)):
            raise InvalidParameterError('rows', 'angles',
                                        'the shifted lat-long grid')

        j = np.rint(rows[:, 0] / (math.pi / n_theta) - 0.5).astype(int)
        k = np.rint(rows[:, 1] / (2.0 * math.pi / n_phi)).astype(int)
        values = np.full((n_theta, n_phi), np.nan)
        values[j, k] = rows[:, 2]

        return cls(2, values)

    @property
    def thetas(self):
        """The polar (or angular) node angles."""
        return grid_angles(self.dim, self.n_theta, self.n_phi)[0]

    @property
    def phis(self):
        """The azimuthal node angles, or ``None`` on S^1."""
        return grid_angles(self.dim, self.n_theta, self.n_phi)[1]

    @property
    def d_theta(self):
        """The polar (or angular) node spacing."""
        if self.dim == 1:
            return 2.0 * math.pi / self.n_theta

        return math.pi / self.n_theta

    @property
    def d_phi(self):
        """The azimuthal node spacing."""
        return 2.0 * math.pi / self.n_phi

    @property
    def support_mask(self):
        """A boolean array marking nodes with ``g > 0``."""
        return self.values > 0

    @property
    def clipped(self):
        """Whether the samples look like ``max(g, 0)`` of a smooth g.

        Clipped samples have a kink on the support boundary, so stencils
        that reach outside the support are not used for derivatives.
        """
        return bool(not np.any(self.values < 0) and np.any(self.values == 0))

    def normals(self):
        """Return the unit normal of each node.

        Returns:
            numpy.ndarray:
            An array of shape ``values.shape + (dim + 1,)``.
        """
        return grid_normals(self.dim, self.n_theta, self.n_phi)

    def frames(self):
        """Return the orthonormal tangent frame of each node on S^2.

        Returns:
            tuple:
            A ``(e_theta, e_phi)`` tuple of arrays shaped like
            :py:meth:`normals`.
        """
        theta, phi = np.meshgrid(self.thetas, self.phis, indexing='ij')
        e_theta = np.stack([np.cos(theta) * np.cos(phi),
                            np.cos(theta) * np.sin(phi),
                            -np.sin(theta)], axis=-1)
        e_phi = np.stack([-np.sin(phi),
                          np.cos(phi),
                          np.zeros_like(phi)], axis=-1)

        return e_theta, e_phi

    def resample(self, n_theta, n_phi=None):
        """Return samples of the same function at another resolution.

        Args:
            n_theta (int):
                The number of polar (or angular) nodes.

            n_phi (int, optional):
                The number of azimuthal nodes.

        Returns:
            SphericalFunction:
            The new samples.

        Raises:
            flamelab.errors.InvalidParameterError:
                The samples do not carry their source function.
        """
        if n_theta == self.n_theta and n_phi in (None, self.n_phi):
            return self

        if self._func is None:
            raise InvalidParameterError(
                'resolution', (n_theta, n_phi),
                'the sampled resolution (%s, %s), since these samples have '
                'no source function' % (self.n_theta, self.n_phi))

        return SphericalFunction.from_function(self._func, self.dim,
                                               n_theta, n_phi)

    def derivative_grids(self):
        """Return finite-difference derivatives at every node.

        Polar rows ``0`` and ``n_theta - 1`` have no complete stencil and
        hold NaN.

        Returns:
            dict:
            Arrays ``g_t``, ``g_p``, ``g_tt``, ``g_pp`` and ``g_tp`` of
            coordinate derivatives, and ``grad`` and ``hessian`` in the
            orthonormal frame (shapes ``(..., 2)`` and ``(..., 2, 2)``).
            On S^1 only ``g_t``, ``g_tt``, ``grad`` and ``hessian`` (with a
            trailing size of 1) are present.
        """
        if self._derivatives is None:
            self._derivatives = self._compute_derivatives()

        return self._derivatives

    def _compute_derivatives(self):
        g = self.values
        dt = self.d_theta

        if self.dim == 1:
            up = np.roll(g, -1)
            down = np.roll(g, 1)
            g_t = (up - down) / (2.0 * math.sin(dt))
            g_tt = (up - 2.0 * g + down) / (4.0 * math.sin(0.5 * dt) ** 2)

            return {
                'g_t': g_t,
                'g_tt': g_tt,
                'grad': g_t[:, np.newaxis],
                'hessian': g_tt[:, np.newaxis, np.newaxis],
            }

        dp = self.d_phi
        nan_row = np.full((1, self.n_phi), np.nan)
        north = np.vstack([nan_row, g[:-1]])
        south = np.vstack([g[1:], nan_row])
        east = np.roll(g, -1, axis=1)
        west = np.roll(g, 1, axis=1)

        g_t = (south - north) / (2.0 * math.sin(dt))
        g_p = (east - west) / (2.0 * math.sin(dp))
        g_tt = (south - 2.0 * g + north) / (4.0 * math.sin(0.5 * dt) ** 2)
        g_pp = (east - 2.0 * g + west) / (4.0 * math.sin(0.5 * dp) ** 2)
        g_tp = ((np.roll(south, -1, axis=1) - np.roll(south, 1, axis=1) -
                 np.roll(north, -1, axis=1) + np.roll(north, 1, axis=1)) /
                (4.0 * math.sin(dt) * math.sin(dp)))

        theta = self.thetas[:, np.newaxis]
        s = np.sin(theta)
        cot = np.cos(theta) / s

        h11 = g_tt
        h12 = (g_tp - cot * g_p) / s
        h22 = g_pp / (s * s) + cot * g_t

        return {
            'g_t': g_t,
            'g_p': g_p,
            'g_tt': g_tt,
            'g_pp': g_pp,
            'g_tp': g_tp,
            'grad': np.stack([g_t, g_p / s], axis=-1),
            'hessian': np.stack([np.stack([h11, h12], axis=-1),
                                 np.stack([h12, h22], axis=-1)], axis=-2),
        }

    def stencil_valid(self, rings=1):
        """Return which nodes have usable derivative stencils.

        A node qualifies when its ``rings``-neighborhood lies on the polar
        grid and, for clipped samples, inside the support.

        Args:
            rings (int, optional):
                The stencil radius in nodes.

        Returns:
            numpy.ndarray:
            A boolean array shaped like :py:attr:`values`.
        """
        if self.clipped:
            ok = self.support_mask.copy()
        else:
            ok = np.ones(self.values.shape, dtype=bool)

        if self.dim == 1:
            valid = ok.copy()

            for shift in range(1, rings + 1):
                valid &= np.roll(ok, shift) & np.roll(ok, -shift)

            return valid

        valid = ok.copy()
        valid[:rings] = False
        valid[self.n_theta - rings:] = False

        for dj in range(-rings, rings + 1):
            for dk in range(-rings, rings + 1):
                shifted = np.roll(np.roll(ok, -dj, axis=0), -dk, axis=1)

                if dj > 0:
                    shifted[self.n_theta - dj:] = False
                elif dj < 0:
                    shifted[:-dj] = False

                valid &= shifted

        return valid

    def check_node(self, j, k=None, rings=1):
        """Ensure a node has a complete stencil on the polar grid.

        Args:
            j (int):
                The polar index.

            k (int, optional):
                The azimuthal index.

            rings (int, optional):
                The stencil radius in nodes.

        Raises:
            flamelab.errors.InsufficientStencilError:
                The stencil reaches past the first or last polar row.
        """
        if self.dim == 2 and not rings <= j < self.n_theta - rings:
            raise InsufficientStencilError(j, k if k is not None else 0)

    def __repr__(self):
        return '<SphericalFunction(dim=%r, n_theta=%r, n_phi=%r)>' % (
            self.dim, self.n_theta, self.n_phi)


def grid_angles(dim, n_theta, n_phi=None):
    """Return the node angles of a shifted spherical grid.

    Args:
        dim (int):
            The sphere dimension.

        n_theta (int):
            The number of polar (or angular) nodes.

        n_phi (int, optional):
            The number of azimuthal nodes. Defaults to ``2 * n_theta``.

    Returns:
        tuple:
        A ``(thetas, phis)`` tuple. ``phis`` is ``None`` on S^1.
    """
    if dim == 1:
        return (np.arange(n_theta) + 0.5) * (2.0 * math.pi / n_theta), None

    if n_phi is None:
        n_phi = 2 * n_theta

    return ((np.arange(n_theta) + 0.5) * (math.pi / n_theta),
            np.arange(n_phi) * (2.0 * math.pi / n_phi))


def grid_normals(dim, n_theta, n_phi=None):
    """Return the unit normals of a shifted spherical grid.

    Args:
        dim (int):
            The sphere dimension.

        n_theta (int):
            The number of polar (or angular) nodes.

        n_phi (int, optional):
            The number of azimuthal nodes.

    Returns:
        numpy.ndarray:
        Normals of shape ``(n_theta, dim + 1)`` on S^1 or
        ``(n_theta, n_phi, 3)`` on S^2.
    """
    thetas, phis = grid_angles(dim, n_theta, n_phi)

    if dim == 1:
        return np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)

    theta, phi = np.meshgrid(thetas, phis, indexing='ij')

    return np.stack([np.sin(theta) * np.cos(phi),
                     np.sin(theta) * np.sin(phi),
                     np.cos(theta)], axis=-1)


def spherical_derivatives(g, j, k=None):
    """Return the gradient and Hessian of g at a node.

    Both are expressed in the orthonormal frame ``(e_theta, e_phi)``. The
    Hessian entries depend on this choice of frame; its eigenvalues do not.

    Args:
        g (SphericalFunction):
            The samples.

        j (int):
            The polar (or angular) index.

        k (int, optional):
            The azimuthal index, on S^2.

    Returns:
        tuple:
        A ``(gradient, hessian)`` tuple of numpy arrays.

    Raises:
        flamelab.errors.InsufficientStencilError:
            The node is on the first or last polar row.
    """
    g.check_node(j, k)
    grids = g.derivative_grids()

    if g.dim == 1:
        index = j % g.n_theta
    else:
        index = (j, k % g.n_phi)

    return grids['grad'][index].copy(), grids['hessian'][index].copy()


def laplacian(g, j, k=None):
    """Return the Laplace-Beltrami operator of g at a node.

    Args:
        g (SphericalFunction):
            The samples.

        j (int):
            The polar (or angular) index.

        k (int, optional):
            The azimuthal index, on S^2.

    Returns:
        float:
        The trace of the Hessian.
    """
    return float(np.trace(spherical_derivatives(g, j, k)[1]))
