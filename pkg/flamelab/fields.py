"""Scalar fields on uniform Cartesian grids, and their FLD persistence.

A field lives on a :py:class:`GridSpec`: a uniform grid with a node mask
that marks interior nodes (where the equation is solved), Dirichlet nodes
(which carry boundary data) and exterior nodes (outside a ball domain,
stored as NaN).
"""

import json
import logging
import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from flamelab.errors import InvalidDomainError, OutOfDomainError
from flamelab.utils import dump_json


logger = logging.getLogger('flamelab')


#: Version of the FLD metadata format.
FLD_VERSION = 1


class GridSpec(object):
    """A uniform grid, and the domain it discretizes.

    Attributes:
        shape (tuple of int):
            Node counts per axis.

        spacing (float):
            The uniform step h.

        origin (numpy.ndarray):
            The coordinates of node ``(0, ..., 0)``.

        domain (str):
            :py:attr:`DOMAIN_BOX` or :py:attr:`DOMAIN_BALL`.

        radius (float):
            The ball radius, for ball domains.

        center (numpy.ndarray):
            The ball center, for ball domains.
    """

    #: The whole box; the outermost node layer is Dirichlet.
    DOMAIN_BOX = 'box'

    #: A ball; Dirichlet data sits on the first exterior node layer.
    DOMAIN_BALL = 'ball'

    #: Mask value for nodes outside a ball domain.
    EXTERIOR = 0

    #: Mask value for nodes where the equation is solved.
    INTERIOR = 1

    #: Mask value for nodes carrying boundary data.
    DIRICHLET = 2

    def __init__(self, shape, spacing, origin=None, domain=DOMAIN_BOX,
                 radius=None, center=None):
        """Initialize the grid.

        Args:
            shape (tuple of int):
                Node counts per axis (1 to 3 axes, at least 3 nodes each).

            spacing (float):
                The positive grid step.

            origin (array-like, optional):
                The coordinates of the first node. Defaults to a grid
                centered on the origin.

            domain (str, optional):
                The domain type.

            radius (float, optional):
                The ball radius. Required for ball domains.

            center (array-like, optional):
                The ball center. Defaults to the origin.

        Raises:
            flamelab.errors.InvalidDomainError:
                The grid description was inconsistent.
        """
        shape = tuple(int(n) for n in shape)

        if not 1 <= len(shape) <= 3 or min(shape) < 3:
            raise InvalidDomainError(
                'Grids need 1 to 3 axes with at least 3 nodes each, not %r.'
                % (shape,))

        if not spacing > 0:
            raise InvalidDomainError('The grid spacing must be positive, '
                                     'not %r.' % spacing)

        dim = len(shape)

        if origin is None:
            origin = -0.5 * (np.array(shape) - 1) * spacing

        origin = np.asarray(origin, dtype=float).reshape(dim)

        if domain not in (self.DOMAIN_BOX, self.DOMAIN_BALL):
            raise InvalidDomainError('Unknown domain type "%s".' % domain)

        if domain == self.DOMAIN_BALL:
            if radius is None or not radius > 0:
                raise InvalidDomainError('Ball domains need a positive '
                                         'radius.')

            if center is None:
                center = np.zeros(dim)

            center = np.asarray(center, dtype=float).reshape(dim)
        else:
            radius = None
            center = None

        self.shape = shape
        self.spacing = float(spacing)
        self.origin = origin
        self.domain = domain
        self.radius = radius
        self.center = center
        self._mask = None

    @classmethod
    def centered_box(cls, dim, n, half_width=1.0):
        """Return a box grid ``[-w, w]^dim`` with n nodes per axis.

        Args:
            dim (int):
                The dimension.

            n (int):
                Nodes per axis.

            half_width (float, optional):
                The half side length w.

        Returns:
            GridSpec:
            The grid.
        """
        return cls((n,) * dim, 2.0 * half_width / (n - 1))

    @classmethod
    def ball(cls, dim, spacing, radius=1.0, center=None, pad=2):
        """Return a ball domain on a grid that covers it with a margin.

        The grid is centered on the ball center, with a node at the center.

        Args:
            dim (int):
                The dimension.

            spacing (float):
                The grid step.

            radius (float, optional):
                The ball radius.

            center (array-like, optional):
                The ball center.

            pad (int, optional):
                Extra node layers beyond the ball.

        Returns:
            GridSpec:
            The grid.
        """
        if center is None:
            center = np.zeros(dim)

        center = np.asarray(center, dtype=float)
        half = int(math.ceil(radius / spacing - 1e-9)) + pad
        n = 2 * half + 1

        return cls((n,) * dim, spacing,
                   origin=center - half * spacing,
                   domain=cls.DOMAIN_BALL,
                   radius=radius,
                   center=center)

    @property
    def dim(self):
        """The number of axes."""
        return len(self.shape)

    @property
    def upper(self):
        """The coordinates of the last node."""
        return self.origin + (np.array(self.shape) - 1) * self.spacing

    def axes(self):
        """Return the node coordinates along each axis.

        Returns:
            list of numpy.ndarray:
            One coordinate array per axis.
        """
        return [
            self.origin[axis] + self.spacing * np.arange(n)
            for axis, n in enumerate(self.shape)
        ]

    def coordinates(self):
        """Return the coordinates of every node.

        Returns:
            numpy.ndarray:
            An array of shape ``shape + (dim,)``.
        """
        return np.stack(np.meshgrid(*self.axes(), indexing='ij'), axis=-1)

    @property
    def mask(self):
        """The node mask, as an int8 array of EXTERIOR/INTERIOR/DIRICHLET."""
        if self._mask is None:
            self._mask = self._build_mask()
            self._mask.setflags(write=False)

        return self._mask

    def _build_mask(self):
        mask = np.full(self.shape, self.EXTERIOR, dtype=np.int8)

        if self.domain == self.DOMAIN_BOX:
            mask[...] = self.DIRICHLET
            mask[(slice(1, -1),) * self.dim] = self.INTERIOR
            return mask

        x = self.coordinates()
        inside = np.linalg.norm(x - self.center, axis=-1) < self.radius

        # Interior nodes need their whole stencil on the grid.
        for axis in range(self.dim):
            inside[_axis_slice(self.dim, axis, 0)] = False
            inside[_axis_slice(self.dim, axis, -1)] = False

        near = np.zeros(self.shape, dtype=bool)

        for axis in range(self.dim):
            near[_axis_slice(self.dim, axis, slice(1, None))] |= \
                inside[_axis_slice(self.dim, axis, slice(None, -1))]
            near[_axis_slice(self.dim, axis, slice(None, -1))] |= \
                inside[_axis_slice(self.dim, axis, slice(1, None))]

        mask[near & ~inside] = self.DIRICHLET
        mask[inside] = self.INTERIOR

        return mask

    def same_grid(self, other):
        """Return whether another grid has the same nodes and domain.

        Args:
            other (GridSpec):
                The grid to compare with.

        Returns:
            bool:
            ``True`` if the grids match.
        """
        return (self.shape == other.shape and
                self.domain == other.domain and
                math.isclose(self.spacing, other.spacing, rel_tol=1e-12) and
                np.allclose(self.origin, other.origin,
                            rtol=0, atol=1e-12 * self.spacing))

    def contains(self, points, margin=0.0):
        """Return which points lie in the domain, with a margin.

        Args:
            points (numpy.ndarray):
                Points of shape ``(..., dim)``.

            margin (float, optional):
                The margin, in grid cells.

        Returns:
            numpy.ndarray:
            A boolean array of shape ``points.shape[:-1]``.
        """
        points = np.asarray(points, dtype=float)
        pad = margin * self.spacing
        lo = self.origin + pad
        hi = self.upper - pad
        ok = np.all((points >= lo - 1e-12) & (points <= hi + 1e-12), axis=-1)

        if self.domain == self.DOMAIN_BALL:
            ok &= (np.linalg.norm(points - self.center, axis=-1) <=
                   self.radius + 1e-12 - pad)

        return ok

    def to_meta(self):
        """Return the JSON-compatible description of this grid.

        Returns:
            dict:
            The metadata.
        """
        meta = {
            'dim': self.dim,
            'shape': list(self.shape),
            'spacing': self.spacing,
            'origin': [float(v) for v in self.origin],
        }

        if self.domain == self.DOMAIN_BALL:
            meta['domain'] = {
                'kind': self.DOMAIN_BALL,
                'radius': self.radius,
                'center': [float(v) for v in self.center],
            }
        else:
            meta['domain'] = {
                'kind': self.DOMAIN_BOX,
            }

        return meta

    @classmethod
    def from_meta(cls, meta):
        """Build a grid from its metadata.

        Args:
            meta (dict):
                Metadata from :py:meth:`to_meta`.

        Returns:
            GridSpec:
            The grid.
        """
        domain = meta.get('domain', {'kind': cls.DOMAIN_BOX})

        return cls(meta['shape'],
                   meta['spacing'],
                   origin=meta['origin'],
                   domain=domain['kind'],
                   radius=domain.get('radius'),
                   center=domain.get('center'))

    def __repr__(self):
        return '<GridSpec(shape=%r, spacing=%r, domain=%r)>' % (
            self.shape, self.spacing, self.domain)


class ScalarField(object):
    """Node values of u or u_eps on a grid.

    Fields are value types. Derived data (gradients, interpolators) is
    computed lazily and cached, so values must not be modified in place.

    Attributes:
        grid (GridSpec):
            The grid and domain.

        values (numpy.ndarray):
            Node values, NaN on exterior nodes.

        eps (float):
            The eps the field was solved for, if any.

        profile (str):
            The profile specification the field was solved with, if any.

        mass (float):
            The profile mass, if known.
    """

    def __init__(self, grid, values, eps=None, profile=None, mass=None):
        """Initialize the field.

        Args:
            grid (GridSpec):
                The grid.

            values (array-like):
                Node values. Exterior nodes are replaced by NaN.

            eps (float, optional):
                The eps tag.

            profile (str, optional):
                The profile specification.

            mass (float, optional):
                The profile mass.

        Raises:
            flamelab.errors.InvalidDomainError:
                The values do not match the grid, or are not finite on the
                domain.
        """
        values = np.array(values, dtype=float)

        if values.shape != grid.shape:
            raise InvalidDomainError(
                'Field values have shape %r, but the grid has shape %r.'
                % (values.shape, grid.shape))

        mask = grid.mask
        values[mask == GridSpec.EXTERIOR] = np.nan

        if not np.all(np.isfinite(values[mask != GridSpec.EXTERIOR])):
            raise InvalidDomainError('Field values must be finite on '
                                     'interior and Dirichlet nodes.')

        values.setflags(write=False)

        self.grid = grid
        self.values = values
        self.eps = eps
        self.profile = profile
        self.mass = mass
        self._gradient = None
        self._interpolators = None

    @classmethod
    def from_function(cls, grid, func, **kwargs):
        """Sample a function at the domain nodes of a grid.

        Args:
            grid (GridSpec):
                The grid.

            func (callable):
                A function taking points of shape ``(..., dim)`` and
                returning values of shape ``(...)``.

            **kwargs (dict):
                Additional metadata for the field.

        Returns:
            ScalarField:
            The sampled field.
        """
        values = np.asarray(func(grid.coordinates()), dtype=float)

        return cls(grid, values, **kwargs)

    def with_values(self, values, **kwargs):
        """Return a field on the same grid with new values.

        Args:
            values (array-like):
                The new values.

            **kwargs (dict):
                Metadata to override. Unspecified metadata is copied.

        Returns:
            ScalarField:
            The new field.
        """
        meta = {
            'eps': self.eps,
            'profile': self.profile,
            'mass': self.mass,
        }
        meta.update(kwargs)

        return ScalarField(self.grid, values, **meta)

    @property
    def dim(self):
        """The number of axes."""
        return self.grid.dim

    @property
    def shape(self):
        """Node counts per axis."""
        return self.grid.shape

    @property
    def spacing(self):
        """The grid step h."""
        return self.grid.spacing

    @property
    def mask(self):
        """The node mask of the grid."""
        return self.grid.mask

    @property
    def interior(self):
        """A boolean array marking interior nodes."""
        return self.grid.mask == GridSpec.INTERIOR

    def gradient(self):
        """Return the node gradient.

        Central differences are used where both neighbors are in the domain
        and one-sided differences at the edge of the mask.

        Returns:
            numpy.ndarray:
            An array of shape ``shape + (dim,)``, NaN on exterior nodes.
        """
        if self._gradient is None:
            self._gradient = node_gradient(self.values, self.spacing)
            self._gradient.setflags(write=False)

        return self._gradient

    def check_points(self, points, margin=1.0, what='sample region'):
        """Ensure points lie in the domain with a margin.

        Args:
            points (numpy.ndarray):
                Points of shape ``(..., dim)``.

            margin (float, optional):
                The margin, in grid cells.

            what (str, optional):
                A description used in the error.

        Raises:
            flamelab.errors.OutOfDomainError:
                Some points were outside.
        """
        ok = self.grid.contains(points, margin=margin)

        if not np.all(ok):
            raise OutOfDomainError(what,
                                   int(np.size(ok) - np.count_nonzero(ok)))

    def values_at(self, points):
        """Interpolate the field at arbitrary points.

        Interpolation is multilinear (trilinear in 3D).

        Args:
            points (numpy.ndarray):
                Points of shape ``(..., dim)``.

        Returns:
            numpy.ndarray:
            Values of shape ``(...)``.
        """
        interps = self._get_interpolators()
        points = np.asarray(points, dtype=float)

        return interps[0](points.reshape(-1, self.dim)).reshape(
            points.shape[:-1])

    def gradient_at(self, points):
        """Interpolate the node gradient at arbitrary points.

        Args:
            points (numpy.ndarray):
                Points of shape ``(..., dim)``.

        Returns:
            numpy.ndarray:
            Gradients of shape ``(..., dim)``.
        """
        interps = self._get_interpolators()
        points = np.asarray(points, dtype=float)
        flat = points.reshape(-1, self.dim)

        return np.stack(
            [interp(flat) for interp in interps[1:]],
            axis=-1).reshape(points.shape)

    def _get_interpolators(self):
        if self._interpolators is None:
            axes = self.grid.axes()
            grad = self.gradient()

            self._interpolators = [
                RegularGridInterpolator(axes, self.values,
                                        bounds_error=False,
                                        fill_value=np.nan)
            ] + [
                RegularGridInterpolator(axes, grad[..., axis],
                                        bounds_error=False,
                                        fill_value=np.nan)
                for axis in range(self.dim)
            ]

        return self._interpolators

    def __repr__(self):
        return '<ScalarField(shape=%r, spacing=%r, eps=%r)>' % (
            self.shape, self.spacing, self.eps)


def node_gradient(values, spacing):
    """Return the finite-difference gradient of node values.

    Args:
        values (numpy.ndarray):
            Node values, NaN outside the domain.

        spacing (float):
            The grid step.

    Returns:
        numpy.ndarray:
        An array of shape ``values.shape + (ndim,)``.
    """
    ndim = values.ndim
    valid = np.isfinite(values)
    grad = np.full(values.shape + (ndim,), np.nan)

    with np.errstate(invalid='ignore'):
        for axis in range(ndim):
            lo = _axis_slice(ndim, axis, slice(None, -1))
            hi = _axis_slice(ndim, axis, slice(1, None))
            diff = (values[hi] - values[lo]) / spacing

            fwd = np.full(values.shape, np.nan)
            bwd = np.full(values.shape, np.nan)
            fwd[lo] = diff
            bwd[hi] = diff

            central = 0.5 * (fwd + bwd)
            g = np.where(np.isfinite(central), central,
                         np.where(np.isfinite(fwd), fwd, bwd))
            g = np.where(np.isfinite(g), g, 0.0)
            grad[..., axis] = np.where(valid, g, np.nan)

    return grad


def save_field(field, path):
    """Write a field in FLD format.

    The metadata is written to ``path`` as JSON text and the values to
    ``path + '.raw'`` as row-major little-endian float64, exterior nodes as
    NaN.

    Args:
        field (ScalarField):
            The field to write.

        path (str):
            The metadata path.
    """
    meta = {
        'version': FLD_VERSION,
    }
    meta.update(field.grid.to_meta())
    meta.update({
        'eps': field.eps,
        'profile': field.profile,
        'mass': field.mass,
        'raw': '%s.raw' % path.rsplit('/', 1)[-1],
    })

    with open(path, 'w') as fp:
        fp.write(dump_json(meta, indent=2))
        fp.write('\n')

    np.ascontiguousarray(field.values, dtype='<f8').tofile('%s.raw' % path)

    logger.debug('Wrote field %r to %s', field, path)


def load_field(path):
    """Read a field in FLD format.

    Args:
        path (str):
            The metadata path.

    Returns:
        ScalarField:
        The field.

    Raises:
        OSError:
            The files could not be read.

        flamelab.errors.InvalidDomainError:
            The metadata or values were inconsistent.
    """
    with open(path, 'r') as fp:
        try:
            meta = json.load(fp)
        except ValueError as e:
            raise InvalidDomainError('"%s" is not valid FLD metadata: %s'
                                     % (path, e))

    if meta.get('version') != FLD_VERSION:
        raise InvalidDomainError('"%s" has unsupported FLD version %r.'
                                 % (path, meta.get('version')))

    grid = GridSpec.from_meta(meta)
    raw = np.fromfile('%s.raw' % path, dtype='<f8')

    if raw.size != int(np.prod(grid.shape)):
        raise InvalidDomainError(
            '"%s.raw" holds %d values, but the grid has %d nodes.'
            % (path, raw.size, int(np.prod(grid.shape))))

    return ScalarField(grid, raw.reshape(grid.shape),
                       eps=meta.get('eps'),
                       profile=meta.get('profile'),
                       mass=meta.get('mass'))


def _axis_slice(ndim, axis, index):
    sl = [slice(None)] * ndim
    sl[axis] = index

    return tuple(sl)
