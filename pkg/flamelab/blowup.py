"""Blow-up analysis: rescalings, free boundaries, densities, classification.

A blow-up of u at x0 is a limit of ``u(x0 + rho x) / rho`` as rho shrinks.
Blow-ups of solutions are degree-one homogeneous. In 2D they are
half-plane solutions ``sqrt(2M) x1+``, wedges ``alpha |x1|`` with
``alpha <= sqrt(2M)``, or two-plane solutions ``alpha x1+ - beta x1-``
with ``alpha**2 - beta**2 = 2M`` (in a rotated frame).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.polynomial.legendre import leggauss

from flamelab.errors import InvalidParameterError, OutOfDomainError
from flamelab.fields import GridSpec, ScalarField
from flamelab.shells import ShellQuadrature, sample_ball, sample_shell
from flamelab.spherical import SphericalFunction


logger = logging.getLogger('flamelab')


#: Degeneracy threshold, relative to sqrt(2M).
DEGENERACY_FACTOR = 0.05


class FreeBoundarySet(object):
    """Points of a free boundary, with density labels.

    Attributes:
        points (numpy.ndarray):
            Sub-cell transition points, of shape ``(n, dim)``.

        labels (list of str):
            One of :py:attr:`LABELS` per point.

        densities (numpy.ndarray):
            The estimated density of ``{u > 0}`` per point. NaN where not
            estimated.

        indicators (numpy.ndarray):
            The non-degeneracy indicator per point. NaN where not estimated.

        ladders (list):
            The raw density ladder per point, or ``None``.
    """

    HALF_DENSITY = 'half_density'
    FULL_DENSITY = 'full_density'
    DEGENERATE = 'degenerate'
    UNKNOWN = 'unknown'

    LABELS = (HALF_DENSITY, FULL_DENSITY, DEGENERATE, UNKNOWN)

    def __init__(self, points, labels=None, densities=None, indicators=None,
                 ladders=None):
        points = np.asarray(points, dtype=float)
        n = len(points)

        if labels is None:
            labels = [self.UNKNOWN] * n

        if densities is None:
            densities = np.full(n, np.nan)

        if indicators is None:
            indicators = np.full(n, np.nan)

        if ladders is None:
            ladders = [None] * n

        self.points = points
        self.labels = list(labels)
        self.densities = np.asarray(densities, dtype=float)
        self.indicators = np.asarray(indicators, dtype=float)
        self.ladders = list(ladders)

    def __len__(self):
        return len(self.points)

    def count(self, label):
        """Return the number of points with a label.

        Args:
            label (str):
                The label.

        Returns:
            int:
            The count.
        """
        return sum(1 for value in self.labels if value == label)

    def to_json(self):
        """Return a JSON-compatible representation.

        Returns:
            dict:
            The points, labels, densities and label counts.
        """
        return {
            'points': self.points,
            'labels': self.labels,
            'densities': self.densities,
            'counts': dict((label, self.count(label))
                           for label in self.LABELS),
        }


class BlowupClass(object):
    """The classification of a 2D blow-up candidate.

    Attributes:
        variant (str):
            One of :py:attr:`VARIANTS`.

        alpha (float):
            The positive-side slope, when defined.

        beta (float):
            The negative-side slope of two-plane solutions.

        fit_residual (float):
            The RMS residual of the sinusoidal arc fits.

        normal (numpy.ndarray):
            The unit normal of the positive side, when defined.

        residuals (dict):
            Fit residuals of each candidate variant that was tried.

        reason (str):
            Why a candidate was left unclassified, if it was.
    """

    ZERO = 'zero'
    HALF_PLANE = 'half_plane'
    WEDGE = 'wedge'
    TWO_PLANE = 'two_plane'
    UNCLASSIFIED = 'unclassified'

    VARIANTS = (ZERO, HALF_PLANE, WEDGE, TWO_PLANE, UNCLASSIFIED)

    def __init__(self, variant, alpha=None, beta=None, fit_residual=0.0,
                 normal=None, residuals=None, reason=None):
        self.variant = variant
        self.alpha = alpha
        self.beta = beta
        self.fit_residual = fit_residual
        self.normal = normal
        self.residuals = residuals or {}
        self.reason = reason

    def to_json(self):
        """Return a JSON-compatible record of the classification."""
        return {
            'variant': self.variant,
            'alpha': self.alpha,
            'beta': self.beta,
            'fit_residual': self.fit_residual,
            'normal': self.normal,
            'residuals': self.residuals,
            'reason': self.reason,
        }

    def __repr__(self):
        return '<BlowupClass(variant=%r, alpha=%r, beta=%r)>' % (
            self.variant, self.alpha, self.beta)


def rescale(field, center, rho, out_shape=None, out_spacing=None):
    """Resample the rescaling ``u(center + rho x) / rho``.

    The output grid is a box centered on the origin.

    Args:
        field (flamelab.fields.ScalarField):
            The field.

        center (numpy.ndarray):
            The rescaling center.

        rho (float):
            The positive scale.

        out_shape (tuple of int, optional):
            The output shape. Defaults to the field's shape.

        out_spacing (float, optional):
            The output spacing. Defaults to the field's spacing.

    Returns:
        flamelab.fields.ScalarField:
        The rescaled field.

    Raises:
        flamelab.errors.OutOfDomainError:
            The rescaled window leaves the field domain.
    """
    if not rho > 0:
        raise InvalidParameterError('rho', rho, 'a positive scale')

    if out_shape is None:
        out_shape = field.shape

    if out_spacing is None:
        out_spacing = field.spacing

    grid = GridSpec(out_shape, out_spacing)
    points = np.asarray(center, dtype=float) + rho * grid.coordinates()
    field.check_points(points.reshape(-1, field.dim), margin=0.0,
                       what='rescaling window')
    values = field.values_at(points) / rho

    if not np.all(np.isfinite(values)):
        raise OutOfDomainError('rescaling window',
                               int(np.count_nonzero(~np.isfinite(values))))

    return ScalarField(grid, values, eps=_scaled_eps(field, rho),
                       profile=getattr(field, 'profile', None),
                       mass=getattr(field, 'mass', None))


def _scaled_eps(field, rho):
    eps = getattr(field, 'eps', None)

    if eps is None:
        return None

    return eps / rho


def homogeneity_deviation(field, center, r1, r2, quad=None, n_radial=16):
    """Measure how far a field is from degree-one homogeneity.

    This is::

        D = int_{r1}^{r2} int_{S^(N-1)} (u_r - u / r)**2 dsigma dr / r

    integrated with Gauss-Legendre nodes in ``log r``.

    Args:
        field (object):
            A field offering the sampling interface.

        center (numpy.ndarray):
            The center.

        r1 (float):
            The inner radius.

        r2 (float):
            The outer radius.

        quad (flamelab.shells.ShellQuadrature, optional):
            The angular rule.

        n_radial (int, optional):
            The number of radial nodes.

    Returns:
        float:
        The deviation.

    Raises:
        flamelab.errors.InvalidParameterError:
            The radii were not ``0 < r1 < r2``.
    """
    if not 0 < r1 < r2:
        raise InvalidParameterError('(r1, r2)', (r1, r2), '0 < r1 < r2')

    if quad is None:
        quad = ShellQuadrature(field.dim)

    center = np.asarray(center, dtype=float)
    nodes, weights = leggauss(n_radial)
    a = math.log(r1)
    half = 0.5 * (math.log(r2) - a)
    total = 0.0

    for t, w in zip(a + half * (nodes + 1.0), half * weights):
        r = math.exp(t)
        points, values, gradients = sample_shell(field, center, r, quad,
                                                 what='homogeneity shell')
        sigma = (points - center) / r
        u_r = np.sum(gradients * sigma, axis=-1)
        total += w * quad.integrate((u_r - values / r) ** 2)

    return total


def extract_free_boundary(field, level_tol=0.0):
    """Extract the transitions between ``{u > tol}`` and ``{u <= tol}``.

    Each grid edge joining a node above the level to one at or below it
    yields a point, placed by linear interpolation along the edge.

    Args:
        field (flamelab.fields.ScalarField):
            The field.

        level_tol (float, optional):
            The nonnegative level.

    Returns:
        FreeBoundarySet:
        The points, all labeled unknown.
    """
    if level_tol < 0:
        raise InvalidParameterError('level_tol', level_tol,
                                    'a nonnegative level')

    u = field.values
    h = field.spacing
    coords = field.grid.coordinates()
    ndim = field.dim
    found = []

    for axis in range(ndim):
        lo = [slice(None)] * ndim
        hi = [slice(None)] * ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        lo = tuple(lo)
        hi = tuple(hi)

        a = u[lo]
        b = u[hi]
        finite = np.isfinite(a) & np.isfinite(b)

        with np.errstate(invalid='ignore'):
            crossing = finite & ((a > level_tol) != (b > level_tol))

        if not np.any(crossing):
            continue

        a = a[crossing]
        b = b[crossing]
        t = np.clip((level_tol - a) / (b - a), 0.0, 1.0)
        base = coords[lo][crossing]
        base[:, axis] += t * h
        found.append(base)

    if not found:
        return FreeBoundarySet(np.zeros((0, ndim)))

    points = np.concatenate(found)
    key = np.round(points / (1e-9 * h)).astype(np.int64)
    _, unique = np.unique(key, axis=0, return_index=True)
    points = points[np.sort(unique)]

    logger.debug('Extracted %d free boundary points', len(points))

    return FreeBoundarySet(points)


def _check_radii_descending(radii):
    radii = np.asarray(radii, dtype=float)

    if radii.ndim != 1 or len(radii) < 1 or np.any(radii <= 0):
        raise InvalidParameterError('radii', radii.tolist(),
                                    'a list of positive radii')

    if np.any(np.diff(radii) >= 0):
        raise InvalidParameterError('radii', radii.tolist(),
                                    'strictly descending radii')

    return radii


def density_ladder(field, point, radii, quad=None, n_radial=16):
    """Return the fraction of each ball occupied by ``{u > 0}``.

    Args:
        field (object):
            A field offering the sampling interface.

        point (numpy.ndarray):
            The ball center.

        radii (list of float):
            Strictly descending radii.

        quad (flamelab.shells.ShellQuadrature, optional):
            The angular rule of the ball quadrature.

        n_radial (int, optional):
            The number of radial nodes.

    Returns:
        numpy.ndarray:
        The volume fraction per radius.
    """
    radii = _check_radii_descending(radii)

    if quad is None:
        quad = ShellQuadrature(field.dim)

    ratios = []

    for r in radii:
        values, weights = sample_ball(field, point, r, quad,
                                      n_radial=n_radial,
                                      what='density ball')
        ratios.append(np.sum(weights * (values > 0)) / np.sum(weights))

    return np.array(ratios)


def extrapolate_density(radii, ratios):
    """Extrapolate a density ladder to zero radius.

    Uses the two finest radii and the model ``Theta(r) = Theta + c r``.

    Args:
        radii (numpy.ndarray):
            Strictly descending radii.

        ratios (numpy.ndarray):
            The volume fractions.

    Returns:
        float:
        The extrapolated density, clipped to ``[0, 1]``.
    """
    if len(radii) < 2:
        return float(np.clip(ratios[-1], 0.0, 1.0))

    r_a, r_b = radii[-2], radii[-1]
    t_a, t_b = ratios[-2], ratios[-1]
    value = (r_a * t_b - r_b * t_a) / (r_a - r_b)

    return float(np.clip(value, 0.0, 1.0))


def lebesgue_density(field, point, radii, quad=None, n_radial=16):
    """Estimate the Lebesgue density of ``{u > 0}`` at a point.

    Args:
        field (object):
            A field offering the sampling interface.

        point (numpy.ndarray):
            The point.

        radii (list of float):
            Strictly descending radii.

        quad (flamelab.shells.ShellQuadrature, optional):
            The angular rule of the ball quadrature.

        n_radial (int, optional):
            The number of radial nodes.

    Returns:
        tuple:
        A ``(density, ratios)`` tuple of the extrapolated density and the
        raw volume fractions of :py:func:`density_ladder`, one per radius.

    Raises:
        flamelab.errors.InvalidParameterError:
            The radii were not strictly descending.

        flamelab.errors.OutOfDomainError:
            A ball left the field domain.
    """
    radii = _check_radii_descending(radii)
    ratios = density_ladder(field, point, radii, quad, n_radial)

    return extrapolate_density(radii, ratios), ratios


def nondegeneracy_ladder(field, point, radii, quad=None, n_radial=16):
    """Return ``(1/r) * mean of u+ over B_r(point)`` for each radius.

    Args:
        field (object):
            A field offering the sampling interface.

        point (numpy.ndarray):
            The ball center.

        radii (list of float):
            Positive radii.

        quad (flamelab.shells.ShellQuadrature, optional):
            The angular rule of the ball quadrature.

        n_radial (int, optional):
            The number of radial nodes.

    Returns:
        numpy.ndarray:
        The indicator per radius.
    """
    if quad is None:
        quad = ShellQuadrature(field.dim)

    result = []

    for r in radii:
        if not r > 0:
            raise InvalidParameterError('radii', list(radii),
                                        'positive radii')

        values, weights = sample_ball(field, point, r, quad,
                                      n_radial=n_radial,
                                      what='non-degeneracy ball')
        mean = np.sum(weights * np.maximum(values, 0.0)) / np.sum(weights)
        result.append(mean / r)

    return np.array(result)


def nondegeneracy_indicator(field, point, radii, quad=None, n_radial=16):
    """Return the smallest non-degeneracy ratio over a radius ladder.

    Args:
        field (object):
            A field offering the sampling interface.

        point (numpy.ndarray):
            The ball center.

        radii (list of float):
            Positive radii.

        quad (flamelab.shells.ShellQuadrature, optional):
            The angular rule of the ball quadrature.

        n_radial (int, optional):
            The number of radial nodes.

    Returns:
        float:
        The minimum of ``(1/r) * mean of u+ over B_r`` over the ladder.
    """
    return float(np.min(nondegeneracy_ladder(field, point, radii, quad,
                                             n_radial)))


def ball_sup(field, point, r, quad=None, n_radial=16):
    """Return the largest sampled value of ``u+`` on a ball.

    Args:
        field (object):
            A field offering the sampling interface.

        point (numpy.ndarray):
            The ball center.

        r (float):
            The radius.

        quad (flamelab.shells.ShellQuadrature, optional):
            The angular rule of the ball quadrature.

        n_radial (int, optional):
            The number of radial nodes.

    Returns:
        float:
        The maximum over the ball and bounding sphere samples.
    """
    if quad is None:
        quad = ShellQuadrature(field.dim)

    values = sample_ball(field, point, r, quad, n_radial=n_radial)[0]
    shell = sample_shell(field, point, r, quad)[1]

    return float(max(0.0, np.max(values), np.max(shell)))


def spherical_mean_bound(field, point, r, mass, quad=None):
    """Compare the spherical integral of u with its non-degeneracy bound.

    Non-degenerate cones satisfy ``r**-2 int_{dB_r} u >= sqrt(2M) pi r``.

    Args:
        field (object):
            A field offering the sampling interface.

        point (numpy.ndarray):
            The sphere center.

        r (float):
            The radius.

        mass (float):
            The mass M.

        quad (flamelab.shells.ShellQuadrature, optional):
            The quadrature rule.

    Returns:
        tuple:
        A ``(value, bound)`` tuple, where value is
        ``r**(1-N) int_{dB_r} u`` (the unit-sphere integral of
        ``u(point + r sigma)``) scaled as ``r**-2`` in 3D.
    """
    if quad is None:
        quad = ShellQuadrature(field.dim)

    values = sample_shell(field, point, r, quad)[1]

    # r**-2 times the surface integral over dB_r is the unit-sphere
    # integral scaled by r**(N-3).
    value = quad.integrate(values) * r ** (quad.dim - 3)

    return value, math.sqrt(2.0 * mass) * math.pi * r


def representation_constant(field, point, r, quad=None):
    """Estimate the representation constant at a free boundary point.

    This is the outward flux of u through ``dB_r(point)``, divided by the
    measure of a flat free boundary through the ball (``2r`` in 2D,
    ``pi r**2`` in 3D). It approaches ``sqrt(2M)`` at density-1/2 points.

    Args:
        field (object):
            A field offering the sampling interface.

        point (numpy.ndarray):
            The free boundary point.

        r (float):
            The radius.

        quad (flamelab.shells.ShellQuadrature, optional):
            The quadrature rule.

    Returns:
        float:
        The estimate.
    """
    if quad is None:
        quad = ShellQuadrature(field.dim)

    point = np.asarray(point, dtype=float)
    points, values, gradients = sample_shell(field, point, r, quad,
                                             what='flux sphere')
    sigma = (points - point) / r
    flux = quad.integrate(np.sum(gradients * sigma, axis=-1))
    flux *= r ** (quad.dim - 1)

    if quad.dim == 2:
        measure = 2.0 * r
    else:
        measure = math.pi * r * r

    return flux / measure


def label_density_sets(fb, field, radii, half_tol, mass=None, quad=None,
                       threads=None):
    """Label free boundary points by their density of ``{u > 0}``.

    Points get ``degenerate`` when the non-degeneracy indicator on the two
    finest radii falls below ``0.05 sqrt(2M)``, ``half_density`` when
    ``|Theta - 1/2| <= half_tol``, ``full_density`` when
    ``Theta >= 1 - half_tol``, and ``unknown`` otherwise. Points whose balls
    leave the field domain stay ``unknown``.

    Args:
        fb (FreeBoundarySet):
            The extracted points.

        field (object):
            A field offering the sampling interface.

        radii (list of float):
            Strictly descending radii.

        half_tol (float):
            The density tolerance.

        mass (float, optional):
            The mass M. Defaults to the field's mass. Without a mass, no
            point is labeled degenerate.

        quad (flamelab.shells.ShellQuadrature, optional):
            The angular rule of the ball quadrature.

        threads (int, optional):
            The number of worker threads.

    Returns:
        FreeBoundarySet:
        A labeled copy of ``fb``.
    """
    radii = _check_radii_descending(radii)

    if mass is None:
        mass = getattr(field, 'mass', None)

    if quad is None:
        quad = ShellQuadrature(field.dim)

    if mass is not None:
        threshold = DEGENERACY_FACTOR * math.sqrt(2.0 * mass)
    else:
        threshold = None
        logger.info('No mass is known; degeneracy labels are skipped')

    def label_point(point):
        try:
            density, ratios = lebesgue_density(field, point, radii, quad)
            indicator = float(np.min(nondegeneracy_ladder(field, point,
                                                          radii[-2:], quad)))
        except OutOfDomainError as e:
            logger.debug('Skipping density estimate at %s: %s', point, e)
            return FreeBoundarySet.UNKNOWN, np.nan, np.nan, None

        if threshold is not None and indicator < threshold:
            label = FreeBoundarySet.DEGENERATE
        elif abs(density - 0.5) <= half_tol:
            label = FreeBoundarySet.HALF_DENSITY
        elif density >= 1.0 - half_tol:
            label = FreeBoundarySet.FULL_DENSITY
        else:
            label = FreeBoundarySet.UNKNOWN

        return label, density, indicator, ratios

    if threads is not None and threads > 1 and len(fb) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(label_point, fb.points))
    else:
        results = [label_point(point) for point in fb.points]

    if results:
        labels, densities, indicators, ladders = zip(*results)
    else:
        labels, densities, indicators, ladders = [], [], [], []

    return FreeBoundarySet(fb.points, labels, densities, indicators,
                           ladders)


def circle_trace(field, center, r=1.0, n=512):
    """Sample the unit-radius trace ``u(center + r sigma) / r`` on S^1.

    Args:
        field (object):
            A 2D field offering the sampling interface.

        center (numpy.ndarray):
            The center.

        r (float, optional):
            The sampling radius.

        n (int, optional):
            The number of angles.

    Returns:
        flamelab.spherical.SphericalFunction:
        The trace.
    """
    return SphericalFunction.from_field(field, center, r=r, dim=1, n_theta=n)


def _circular_runs(mask):
    """Return index arrays of the circular runs of True in a mask."""
    n = len(mask)

    if not np.any(mask):
        return []

    if np.all(mask):
        return [np.arange(n)]

    # Start scanning just after a False entry so no run wraps the scan.
    start = int(np.argmin(mask)) + 1
    runs = []
    current = []

    for offset in range(n):
        i = (start + offset) % n

        if mask[i]:
            current.append(i)
        elif current:
            runs.append(np.array(current))
            current = []

    if current:
        runs.append(np.array(current))

    return runs


def _fit_arc(thetas, values, run):
    """Fit ``a cos(theta) + b sin(theta)`` to the samples of an arc."""
    t = thetas[run]
    design = np.stack([np.cos(t), np.sin(t)], axis=-1)
    coeffs = np.linalg.lstsq(design, values[run], rcond=None)[0]
    residual = values[run] - design @ coeffs
    amplitude = float(np.hypot(coeffs[0], coeffs[1]))
    direction = float(math.atan2(coeffs[1], coeffs[0]))
    rms = float(np.sqrt(np.mean(residual * residual)))

    return amplitude, direction, rms


def _angle_gap(a, b):
    return abs((a - b + math.pi) % (2.0 * math.pi) - math.pi)


def classify_blowup_2d(g, mass, tol):
    """Classify the unit-circle trace of a 2D blow-up candidate.

    Traces of degree-one homogeneous solutions are made of arcs of length
    pi on which g is a displaced sine. Positive arcs are found with a
    dead-band of ``tol * sqrt(2M)``, fitted by least squares, and matched
    against the half-plane, wedge and two-plane families.

    Args:
        g (flamelab.spherical.SphericalFunction):
            The trace, sampled on S^1.

        mass (float):
            The mass M.

        tol (float):
            The positive tolerance.

    Returns:
        BlowupClass:
        The classification.
    """
    if g.dim != 1:
        raise InvalidParameterError('g', g, 'samples on S^1')

    if not mass > 0:
        raise InvalidParameterError('mass', mass, 'a positive number')

    if not tol > 0:
        raise InvalidParameterError('tol', tol, 'a positive number')

    thetas = g.thetas
    values = g.values
    d_theta = g.d_theta
    slope = math.sqrt(2.0 * mass)
    deadband = tol * slope
    slope_tol = tol * max(1.0, slope)
    angle_tol = 2.0 * d_theta

    positive = _circular_runs(values > deadband)
    negative = _circular_runs(values < -deadband)

    if not positive and not negative:
        return BlowupClass(BlowupClass.ZERO, alpha=0.0)

    def check_arc(run, amplitude):
        if amplitude <= deadband:
            return False

        expected = math.pi - 2.0 * math.asin(min(1.0, deadband / amplitude))

        return abs(len(run) * d_theta - expected) <= angle_tol

    pos_fits = [_fit_arc(thetas, values, run) for run in positive]
    neg_fits = [_fit_arc(thetas, values, run) for run in negative]
    rms = float(np.sqrt(np.mean([fit[2] ** 2
                                 for fit in pos_fits + neg_fits])))

    arcs_ok = (all(check_arc(run, fit[0])
                   for run, fit in zip(positive, pos_fits)) and
               all(check_arc(run, fit[0])
                   for run, fit in zip(negative, neg_fits)))

    if not arcs_ok:
        return BlowupClass(BlowupClass.UNCLASSIFIED, fit_residual=rms,
                           reason='an arc does not have length pi')

    if len(positive) == 1 and not negative:
        alpha, direction, residual = pos_fits[0]
        normal = np.array([math.cos(direction), math.sin(direction)])
        residuals = {BlowupClass.HALF_PLANE: residual}

        if abs(alpha - slope) <= slope_tol:
            return BlowupClass(BlowupClass.HALF_PLANE, alpha=alpha,
                               fit_residual=residual, normal=normal,
                               residuals=residuals)

        return BlowupClass(BlowupClass.UNCLASSIFIED, alpha=alpha,
                           fit_residual=residual, normal=normal,
                           residuals=residuals,
                           reason='one positive arc with slope %.6g, but '
                                  'sqrt(2M) = %.6g' % (alpha, slope))

    if len(positive) == 2 and not negative:
        (a1, d1, res1), (a2, d2, res2) = pos_fits
        residual = math.sqrt(0.5 * (res1 * res1 + res2 * res2))
        alpha = 0.5 * (a1 + a2)
        normal = np.array([math.cos(d1), math.sin(d1)])
        residuals = {BlowupClass.WEDGE: residual}

        if (_angle_gap(d1, d2 + math.pi) <= angle_tol and
                abs(a1 - a2) <= slope_tol and
                alpha <= slope + slope_tol):
            return BlowupClass(BlowupClass.WEDGE, alpha=alpha,
                               fit_residual=residual, normal=normal,
                               residuals=residuals)

        return BlowupClass(BlowupClass.UNCLASSIFIED, alpha=alpha,
                           fit_residual=residual, normal=normal,
                           residuals=residuals,
                           reason='two positive arcs that do not form an '
                                  'admissible wedge')

    if len(positive) == 1 and len(negative) == 1:
        alpha, d_pos, res_pos = pos_fits[0]
        beta, d_neg, res_neg = neg_fits[0]
        residual = math.sqrt(0.5 * (res_pos * res_pos + res_neg * res_neg))
        normal = np.array([math.cos(d_pos), math.sin(d_pos)])
        residuals = {BlowupClass.TWO_PLANE: residual}

        # Both arcs fit the same cosine direction for alpha x+ - beta x-.
        if (_angle_gap(d_pos, d_neg) <= angle_tol and
                abs(alpha * alpha - beta * beta - 2.0 * mass) <=
                tol * max(1.0, 2.0 * mass)):
            return BlowupClass(BlowupClass.TWO_PLANE, alpha=alpha, beta=beta,
                               fit_residual=residual, normal=normal,
                               residuals=residuals)

        return BlowupClass(BlowupClass.UNCLASSIFIED, alpha=alpha, beta=beta,
                           fit_residual=residual, normal=normal,
                           residuals=residuals,
                           reason='alpha**2 - beta**2 = %.6g, but 2M = %.6g'
                                  % (alpha * alpha - beta * beta,
                                     2.0 * mass))

    return BlowupClass(BlowupClass.UNCLASSIFIED, fit_residual=rms,
                       reason='%d positive and %d negative arcs'
                              % (len(positive), len(negative)))
