"""Monotonicity functionals on spheres and balls.

The Spruck functional of a field u around a center x0 is::

    S(r) = int_{S^(N-1)} { 2 B(u / eps) + |grad_sigma u|**2 / r**2
                           - (N - 1) u**2 / r**2 - (u_r - u / r)**2 } dsigma

evaluated on the sphere of radius r. The limit form replaces ``B(u / eps)``
by ``M`` on ``{u > 0}``. Both are nondecreasing in r for solutions, and
constant exactly for degree-one homogeneous fields.
"""

import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from flamelab.errors import (InvalidPairError,
                             InvalidParameterError,
                             OutOfDomainError)
from flamelab.mollifier import eval_B
from flamelab.shells import ShellQuadrature, sample_shell


logger = logging.getLogger('flamelab')


#: Cell average of 1/|x| over a unit cube with a corner at the origin.
_CORNER_CELL_KERNEL = 1.5 * math.log(2.0 + math.sqrt(3.0)) - 0.25 * math.pi


class EnergyProfile(object):
    """A table of a monotonicity functional over radii.

    Attributes:
        center (numpy.ndarray):
            The sphere center.

        radii (numpy.ndarray):
            The strictly increasing radii.

        values (numpy.ndarray):
            The functional at each radius.

        defects (numpy.ndarray):
            The successive differences of the values.

        mode (str):
            ``eps`` or ``limit``.

        eps (float):
            The eps used in ``eps`` mode.

        mass (float):
            The mass M.
    """

    MODE_EPS = 'eps'
    MODE_LIMIT = 'limit'

    def __init__(self, center, radii, values, mode, eps=None, mass=None):
        self.center = np.asarray(center, dtype=float)
        self.radii = np.asarray(radii, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.defects = np.diff(self.values)
        self.mode = mode
        self.eps = eps
        self.mass = mass

    @property
    def defect(self):
        """The smallest successive difference (the monotonicity defect)."""
        return float(np.min(self.defects))

    def rows(self):
        """Return the table rows as ``(radius, value, defect)`` tuples.

        The defect of the first row is 0.
        """
        defects = np.concatenate([[0.0], self.defects])

        return list(zip(self.radii, self.values, defects))

    def to_json(self):
        """Return a JSON-compatible summary of the table."""
        return {
            'center': self.center,
            'mode': self.mode,
            'eps': self.eps,
            'mass': self.mass,
            'radii': self.radii,
            'values': self.values,
            'defect': self.defect,
        }


def _spruck_terms(points, values, gradients, center, r):
    dim = points.shape[-1]
    sigma = (points - center) / r
    u_r = np.sum(gradients * sigma, axis=-1)
    tangential = np.sum(gradients * gradients, axis=-1) - u_r * u_r

    return (tangential -
            (dim - 1) * values * values / (r * r) -
            (u_r - values / r) ** 2)


def _default_quad(field, quad):
    if quad is None:
        quad = ShellQuadrature(field.dim)

    return quad


def spruck_S_eps(field, center, r, profile, eps, quad=None):
    """Evaluate the Spruck functional S_eps(r).

    Args:
        field (object):
            A field offering the sampling interface.

        center (numpy.ndarray):
            The sphere center.

        r (float):
            The radius.

        profile (flamelab.mollifier.BetaProfile):
            The reaction profile.

        eps (float):
            The positive scale parameter.

        quad (flamelab.shells.ShellQuadrature, optional):
            The quadrature rule.

    Returns:
        float:
        The functional.

    Raises:
        flamelab.errors.OutOfDomainError:
            The sphere leaves the field domain with a one-cell margin.
    """
    if not eps > 0:
        raise InvalidParameterError('eps', eps, 'a positive number')

    quad = _default_quad(field, quad)
    center = np.asarray(center, dtype=float)
    points, values, gradients = sample_shell(field, center, r, quad)
    integrand = (2.0 * eval_B(profile, values / eps) +
                 _spruck_terms(points, values, gradients, center, r))

    return quad.integrate(integrand)


def spruck_S_limit(field, center, r, mass, quad=None):
    """Evaluate the limit Spruck functional S(r).

    Args:
        field (object):
            A field offering the sampling interface.

        center (numpy.ndarray):
            The sphere center.

        r (float):
            The radius.

        mass (float):
            The mass M.

        quad (flamelab.shells.ShellQuadrature, optional):
            The quadrature rule.

    Returns:
        float:
        The functional.

    Raises:
        flamelab.errors.OutOfDomainError:
            The sphere leaves the field domain with a one-cell margin.
    """
    if not mass > 0:
        raise InvalidParameterError('mass', mass, 'a positive number')

    quad = _default_quad(field, quad)
    center = np.asarray(center, dtype=float)
    points, values, gradients = sample_shell(field, center, r, quad)
    integrand = (2.0 * mass * (values > 0) +
                 _spruck_terms(points, values, gradients, center, r))

    return quad.integrate(integrand)


def spruck_increment(field, center, r1, r2, profile, eps, quad=None,
                     n_radial=16):
    """Compare both sides of the log-radial identity for S_eps.

    For solutions, ``S_eps(r2) - S_eps(r1)`` equals::

        int_{r1}^{r2} int_{S^(N-1)} { 2 N (u_r - u / r)**2
                                      + 2 beta(u / eps) u / eps } dsigma dr / r

    Args:
        field (object):
            A field offering the sampling interface.

        center (numpy.ndarray):
            The sphere center.

        r1 (float):
            The inner radius.

        r2 (float):
            The outer radius.

        profile (flamelab.mollifier.BetaProfile):
            The reaction profile.

        eps (float):
            The positive scale parameter.

        quad (flamelab.shells.ShellQuadrature, optional):
            The angular quadrature rule.

        n_radial (int, optional):
            Gauss-Legendre nodes in log r.

    Returns:
        tuple:
        A ``(difference, integral)`` tuple.
    """
    if not 0 < r1 < r2:
        raise InvalidParameterError('(r1, r2)', (r1, r2), '0 < r1 < r2')

    quad = _default_quad(field, quad)
    center = np.asarray(center, dtype=float)
    dim = quad.dim
    difference = (spruck_S_eps(field, center, r2, profile, eps, quad) -
                  spruck_S_eps(field, center, r1, profile, eps, quad))

    integral = 0.0

    for t, w in _log_radial_nodes(r1, r2, n_radial):
        r = math.exp(t)
        points, values, gradients = sample_shell(field, center, r, quad)
        sigma = (points - center) / r
        u_r = np.sum(gradients * sigma, axis=-1)
        s = values / eps
        integrand = (2.0 * dim * (u_r - values / r) ** 2 +
                     2.0 * profile.beta(s) * s)
        integral += w * quad.integrate(integrand)

    return difference, integral


def _log_radial_nodes(r1, r2, n):
    nodes, weights = leggauss(n)
    a = math.log(r1)
    b = math.log(r2)
    half = 0.5 * (b - a)

    return list(zip(a + half * (nodes + 1.0), half * weights))


def monotonicity_profile(field, center, radii, mode=EnergyProfile.MODE_EPS,
                         profile=None, eps=None, mass=None, quad=None):
    """Tabulate a Spruck functional over radii.

    Args:
        field (object):
            A field offering the sampling interface.

        center (numpy.ndarray):
            The sphere center.

        radii (list of float):
            Strictly increasing radii.

        mode (str, optional):
            ``eps`` for S_eps or ``limit`` for S.

        profile (flamelab.mollifier.BetaProfile, optional):
            The reaction profile. Required in ``eps`` mode, and provides the
            mass in ``limit`` mode when ``mass`` is not given.

        eps (float, optional):
            The scale parameter. Required in ``eps`` mode.

        mass (float, optional):
            The mass, for ``limit`` mode.

        quad (flamelab.shells.ShellQuadrature, optional):
            The quadrature rule.

    Returns:
        EnergyProfile:
        The table.

    Raises:
        flamelab.errors.InvalidParameterError:
            Fewer than 2 radii were given, they were not increasing, or a
            parameter required by the mode was missing.
    """
    radii = np.asarray(radii, dtype=float)

    if radii.ndim != 1 or len(radii) < 2:
        raise InvalidParameterError('radii', radii.tolist(),
                                    'at least 2 radii')

    if np.any(np.diff(radii) <= 0):
        raise InvalidParameterError('radii', radii.tolist(),
                                    'strictly increasing radii')

    quad = _default_quad(field, quad)

    if mode == EnergyProfile.MODE_EPS:
        if profile is None or eps is None:
            raise InvalidParameterError('mode', mode,
                                        'a profile and eps for eps mode')

        values = [spruck_S_eps(field, center, r, profile, eps, quad)
                  for r in radii]
        mass = profile.mass
    elif mode == EnergyProfile.MODE_LIMIT:
        if mass is None:
            if profile is None:
                raise InvalidParameterError('mode', mode,
                                            'a mass for limit mode')

            mass = profile.mass

        values = [spruck_S_limit(field, center, r, mass, quad)
                  for r in radii]
    else:
        raise InvalidParameterError('mode', mode, '"eps" or "limit"')

    table = EnergyProfile(center, radii, values, mode, eps=eps, mass=mass)
    logger.debug('Monotonicity profile around %s: defect %g',
                 table.center, table.defect)

    return table


def cell_gradient(values, spacing):
    """Return gradients at cell centers of a node array.

    Each component is the average of the forward differences along the
    cell edges parallel to its axis.

    Args:
        values (numpy.ndarray):
            Node values.

        spacing (float):
            The grid step.

    Returns:
        numpy.ndarray:
        An array of shape ``(n_1 - 1, ..., n_N - 1, N)``.
    """
    ndim = values.ndim
    components = []

    for axis in range(ndim):
        lo = [slice(None)] * ndim
        hi = [slice(None)] * ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        d = (values[tuple(hi)] - values[tuple(lo)]) / spacing

        for other in range(ndim):
            if other != axis:
                a = [slice(None)] * ndim
                b = [slice(None)] * ndim
                a[other] = slice(None, -1)
                b[other] = slice(1, None)
                d = 0.5 * (d[tuple(a)] + d[tuple(b)])

        components.append(d)

    return np.stack(components, axis=-1)


def _ball_cell_fractions(cell_centers, h, center, r, subdivisions):
    """Return the fraction of each cell covered by a ball.

    Cells crossed by the sphere are estimated from ``subdivisions**N``
    midpoint samples.
    """
    dim = cell_centers.shape[-1]
    dist = np.linalg.norm(cell_centers - center, axis=-1)
    half_diagonal = 0.5 * h * math.sqrt(dim)
    fractions = (dist < r - half_diagonal).astype(float)
    crossed = (dist >= r - half_diagonal) & (dist <= r + half_diagonal)

    offsets = ((np.arange(subdivisions) + 0.5) / subdivisions - 0.5) * h
    sub = np.stack([s.ravel() for s in np.meshgrid(*([offsets] * dim),
                                                   indexing='ij')],
                   axis=-1)
    points = cell_centers[crossed][:, np.newaxis, :] + sub
    inside = np.linalg.norm(points - center, axis=-1) < r
    fractions[crossed] = inside.mean(axis=-1)

    return fractions


def _kernel_integral(field, center, r, fractions, cell_centers, corner_cells):
    dim = field.dim
    grad = cell_gradient(field.values, field.spacing)
    energy = np.sum(grad * grad, axis=-1)
    used = fractions > 0

    if np.any(used & ~np.isfinite(energy)):
        raise OutOfDomainError('ACF ball of radius %g' % r,
                               int(np.count_nonzero(used &
                                                    ~np.isfinite(energy))))

    if dim == 2:
        kernel = np.ones(fractions.shape)
    else:
        dist = np.linalg.norm(cell_centers - center, axis=-1)
        kernel = dist ** (2 - dim)

        if dim == 3:
            kernel = np.where(corner_cells,
                              _CORNER_CELL_KERNEL / field.spacing,
                              kernel)

    return float(np.sum(np.where(used, fractions * kernel * energy, 0.0)) *
                 field.spacing ** dim)


def acf_phi(u, v, center, r, subdivisions=4):
    """Evaluate the Alt-Caffarelli-Friedman functional Phi(r).

    This is::

        Phi(r) = r**-4 * int_{B_r} |grad u|**2 / |x|**(N-2)
                       * int_{B_r} |grad v|**2 / |x|**(N-2)

    with gradients taken at cell centers. Cells are weighted by the fraction
    of their volume inside the ball. In 3D, the cells touching the center
    node use the exact cell average of the kernel.

    Args:
        u (flamelab.fields.ScalarField):
            The first field.

        v (flamelab.fields.ScalarField):
            The second field, on the same grid.

        center (numpy.ndarray):
            The ball center. It is snapped to the nearest node.

        r (float):
            The ball radius.

        subdivisions (int, optional):
            Samples per axis used to estimate cell coverage.

    Returns:
        float:
        The functional.

    Raises:
        flamelab.errors.InvalidPairError:
            The fields do not share a grid.

        flamelab.errors.OutOfDomainError:
            The ball leaves the field domain.
    """
    if not u.grid.same_grid(v.grid):
        raise InvalidPairError('The ACF functional needs two fields on the '
                               'same grid.')

    if not r > 0:
        raise InvalidParameterError('r', r, 'a positive radius')

    grid = u.grid
    h = grid.spacing
    center = np.asarray(center, dtype=float)
    index = np.rint((center - grid.origin) / h).astype(int)
    node = grid.origin + index * h

    if np.max(np.abs(node - center)) > 1e-9 * h:
        logger.warning('ACF center %s is not a grid node; using %s',
                       center, node)

    extremes = node + r * np.concatenate([np.eye(grid.dim),
                                          -np.eye(grid.dim)])
    u.check_points(extremes, margin=0.0, what='ACF ball of radius %g' % r)

    for field, name in ((u, 'u'), (v, 'v')):
        value = field.values[tuple(index)]

        if abs(value) > 1e-9 * max(1.0, float(np.nanmax(np.abs(
                field.values)))):
            logger.warning('ACF field %s does not vanish at the center '
                           '(%g)', name, value)

    cell_centers = np.stack(
        np.meshgrid(*[axis[:-1] + 0.5 * h for axis in grid.axes()],
                    indexing='ij'),
        axis=-1)
    fractions = _ball_cell_fractions(cell_centers, h, node, r, subdivisions)
    corner_cells = np.all(np.abs(cell_centers - node) < h, axis=-1)

    iu = _kernel_integral(u, node, r, fractions, cell_centers, corner_cells)
    iv = _kernel_integral(v, node, r, fractions, cell_centers, corner_cells)

    return iu * iv / r ** 4
