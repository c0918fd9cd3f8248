"""Closed-form reference solutions.

This covers the degree-one homogeneous blow-up profiles (half-plane, wedge,
two-plane, and the catenoid cone in 3D), constants, and the exact
one-dimensional eps-profile.

The catenoid cone is ``u(x) = r * max(f(theta) / f'(theta0), 0)``, with
``f(theta) = 2 + cos(theta) * log(tan(theta / 2)**2)``, theta measured from
the x3 axis and theta0 the zero of f in ``(0, pi/2)``. Its gradient has unit
length on the free boundary, so its effective mass is 1/2.
"""

import logging
import math

import numpy as np
from scipy import integrate, optimize

from flamelab.errors import InvalidParameterError, PoleError
from flamelab.fields import ScalarField
from flamelab.mollifier import eval_B, mass as profile_mass


logger = logging.getLogger('flamelab')


#: The effective mass M of the normalized catenoid cone.
CATENOID_MASS = 0.5

#: Polar angles are clamped this far from the poles in field evaluations.
POLE_GUARD = 1e-8

#: Relative launch height of the regularized one-dimensional profile.
PROFILE_1D_DELTA = 1e-6


class ExactKind(object):
    """A closed-form solution family and its parameters.

    Attributes:
        variant (str):
            One of :py:attr:`VARIANTS`.

        mass (float):
            The mass M for half-plane solutions.

        alpha (float):
            The positive-side slope for wedge and two-plane solutions.

        beta (float):
            The negative-side slope for two-plane solutions.

        c (float):
            The value of constant solutions.

        normal (numpy.ndarray):
            The unit normal of planar solutions. Defaults to e_1.
    """

    HALF_PLANE = 'half_plane'
    WEDGE = 'wedge'
    TWO_PLANE = 'two_plane'
    CATENOID = 'catenoid'
    CONSTANT = 'constant'

    VARIANTS = (HALF_PLANE, WEDGE, TWO_PLANE, CATENOID, CONSTANT)

    def __init__(self, variant, mass=None, alpha=None, beta=None, c=None,
                 normal=None):
        """Initialize the kind.

        Args:
            variant (str):
                The solution family.

            mass (float, optional):
                The mass, for half-plane solutions.

            alpha (float, optional):
                The positive-side slope.

            beta (float, optional):
                The negative-side slope.

            c (float, optional):
                The constant value.

            normal (array-like, optional):
                The normal of planar solutions.

        Raises:
            flamelab.errors.InvalidParameterError:
                A parameter was missing or out of range.
        """
        if variant not in self.VARIANTS:
            raise InvalidParameterError('variant', variant,
                                        'one of %s' % ', '.join(self.VARIANTS))

        if variant == self.HALF_PLANE:
            _require_positive('mass', mass)
        elif variant == self.WEDGE:
            _require_positive('alpha', alpha)
        elif variant == self.TWO_PLANE:
            _require_positive('alpha', alpha)
            _require_positive('beta', beta)
        elif variant == self.CONSTANT:
            if c is None or not math.isfinite(c):
                raise InvalidParameterError('c', c, 'a finite number')

        if normal is not None:
            normal = np.asarray(normal, dtype=float)
            length = np.linalg.norm(normal)

            if not length > 0:
                raise InvalidParameterError('normal', normal,
                                            'a nonzero vector')

            normal = normal / length

        self.variant = variant
        self.mass = mass
        self.alpha = alpha
        self.beta = beta
        self.c = c
        self.normal = normal

    @property
    def effective_mass(self):
        """The mass M that the solution's free boundary condition implies.

        This is ``None`` for families with no free boundary condition.
        """
        if self.variant == self.HALF_PLANE:
            return self.mass
        elif self.variant == self.TWO_PLANE:
            return 0.5 * (self.alpha ** 2 - self.beta ** 2)
        elif self.variant == self.CATENOID:
            return CATENOID_MASS

        return None

    def __repr__(self):
        return '<ExactKind(variant=%r, mass=%r, alpha=%r, beta=%r, c=%r)>' % (
            self.variant, self.mass, self.alpha, self.beta, self.c)


class AnalyticField(object):
    """A field given by formulas for its values and gradient.

    This offers the same sampling interface as
    :py:class:`~flamelab.fields.ScalarField`, without interpolation error.
    The field is defined everywhere, so point checks always pass.
    """

    def __init__(self, dim, value_func, gradient_func, name='analytic'):
        """Initialize the field.

        Args:
            dim (int):
                The dimension.

            value_func (callable):
                Maps points of shape ``(..., dim)`` to values.

            gradient_func (callable):
                Maps points of shape ``(..., dim)`` to gradients.

            name (str, optional):
                A description for logging.
        """
        self.dim = dim
        self.name = name
        self._value_func = value_func
        self._gradient_func = gradient_func

    @classmethod
    def from_kind(cls, kind, dim):
        """Return the analytic field of a closed-form solution.

        Args:
            kind (ExactKind):
                The solution family.

            dim (int):
                The dimension.

        Returns:
            AnalyticField:
            The field.
        """
        _check_dim(kind, dim)

        return cls(dim,
                   lambda x: exact_values(kind, x),
                   lambda x: exact_gradient(kind, x),
                   name=kind.variant)

    def values_at(self, points):
        """Return the field values at points.

        Args:
            points (numpy.ndarray):
                Points of shape ``(..., dim)``.

        Returns:
            numpy.ndarray:
            The values.
        """
        return np.asarray(self._value_func(np.asarray(points, dtype=float)),
                          dtype=float)

    def gradient_at(self, points):
        """Return the field gradients at points.

        Args:
            points (numpy.ndarray):
                Points of shape ``(..., dim)``.

        Returns:
            numpy.ndarray:
            The gradients.
        """
        return np.asarray(
            self._gradient_func(np.asarray(points, dtype=float)),
            dtype=float)

    def check_points(self, points, margin=0.0, what='sample region'):
        """Accept any points. Analytic fields have no domain boundary."""

    def __repr__(self):
        return '<AnalyticField(dim=%r, name=%r)>' % (self.dim, self.name)


def _require_positive(name, value):
    if value is None or not value > 0:
        raise InvalidParameterError(name, value, 'a positive number')


def _check_dim(kind, dim):
    if kind.variant == ExactKind.CATENOID and dim != 3:
        raise InvalidParameterError('dim', dim,
                                    '3 for the catenoid solution')

    if kind.normal is not None and len(kind.normal) != dim:
        raise InvalidParameterError('normal', kind.normal,
                                    'a vector of dimension %d' % dim)


def _normal(kind, dim):
    if kind.normal is not None:
        return kind.normal

    normal = np.zeros(dim)
    normal[0] = 1.0

    return normal


def exact_values(kind, points):
    """Evaluate a closed-form solution at points.

    Args:
        kind (ExactKind):
            The solution family.

        points (numpy.ndarray):
            Points of shape ``(..., dim)``.

    Returns:
        numpy.ndarray:
        The values.
    """
    points = np.asarray(points, dtype=float)
    dim = points.shape[-1]
    _check_dim(kind, dim)

    if kind.variant == ExactKind.CONSTANT:
        return np.full(points.shape[:-1], float(kind.c))
    elif kind.variant == ExactKind.CATENOID:
        return _catenoid_values(points)

    s = points @ _normal(kind, dim)

    if kind.variant == ExactKind.HALF_PLANE:
        return math.sqrt(2.0 * kind.mass) * np.maximum(s, 0.0)
    elif kind.variant == ExactKind.WEDGE:
        return kind.alpha * np.abs(s)
    else:
        return kind.alpha * np.maximum(s, 0.0) - kind.beta * np.maximum(-s,
                                                                         0.0)


def exact_gradient(kind, points):
    """Evaluate the gradient of a closed-form solution at points.

    On the kinks of planar solutions the average of the one-sided gradients
    is returned.

    Args:
        kind (ExactKind):
            The solution family.

        points (numpy.ndarray):
            Points of shape ``(..., dim)``.

    Returns:
        numpy.ndarray:
        Gradients of shape ``(..., dim)``.
    """
    points = np.asarray(points, dtype=float)
    dim = points.shape[-1]
    _check_dim(kind, dim)

    if kind.variant == ExactKind.CONSTANT:
        return np.zeros(points.shape)
    elif kind.variant == ExactKind.CATENOID:
        return _catenoid_gradient(points)

    normal = _normal(kind, dim)
    s = points @ normal

    if kind.variant == ExactKind.HALF_PLANE:
        slope = math.sqrt(2.0 * kind.mass)
        factor = np.where(s > 0, slope, np.where(s < 0, 0.0, 0.5 * slope))
    elif kind.variant == ExactKind.WEDGE:
        factor = kind.alpha * np.sign(s)
    else:
        factor = np.where(s > 0, kind.alpha,
                          np.where(s < 0, kind.beta,
                                   0.5 * (kind.alpha + kind.beta)))

    return factor[..., np.newaxis] * normal


def make_exact_field(kind, grid):
    """Sample a closed-form solution at the nodes of a grid.

    Args:
        kind (ExactKind):
            The solution family.

        grid (flamelab.fields.GridSpec):
            The grid.

    Returns:
        flamelab.fields.ScalarField:
        The sampled field, tagged with the kind's effective mass.
    """
    _check_dim(kind, grid.dim)

    return ScalarField.from_function(grid,
                                     lambda x: exact_values(kind, x),
                                     mass=kind.effective_mass)


def catenoid_f(theta):
    """Return the catenoid profile f and its derivative.

    Args:
        theta (float or numpy.ndarray):
            Polar angles, strictly inside ``(0, pi)``.

    Returns:
        tuple:
        A ``(f, f_prime)`` tuple.

    Raises:
        flamelab.errors.PoleError:
            An angle was at or beyond a pole.
    """
    theta = _check_theta(theta)
    s = np.sin(theta)
    c = np.cos(theta)
    log_term = 2.0 * np.log(np.tan(0.5 * theta))

    return (_unwrap(2.0 + c * log_term),
            _unwrap(-s * log_term + 2.0 * c / s))


def catenoid_f2(theta):
    """Return the second derivative of the catenoid profile f.

    Args:
        theta (float or numpy.ndarray):
            Polar angles, strictly inside ``(0, pi)``.

    Returns:
        float or numpy.ndarray:
        ``-cos(theta) log(tan(theta/2)**2) - 2 - 2 / sin(theta)**2``.
    """
    theta = _check_theta(theta)
    s = np.sin(theta)

    return _unwrap(-np.cos(theta) * 2.0 * np.log(np.tan(0.5 * theta)) -
                   2.0 - 2.0 / (s * s))


def catenoid_ode_residual(theta):
    """Return ``f'' + cot(theta) f' + 2 f`` for the catenoid profile.

    Args:
        theta (float or numpy.ndarray):
            Polar angles, strictly inside ``(0, pi)``.

    Returns:
        float or numpy.ndarray:
        The residual of the spherical minimal cone equation.
    """
    f, fp = catenoid_f(theta)
    theta = np.asarray(theta, dtype=float)

    return _unwrap(catenoid_f2(theta) + fp * np.cos(theta) / np.sin(theta) +
                   2.0 * np.asarray(f))


_theta0_cache = []


def catenoid_theta0():
    """Return theta0, the zero of the catenoid profile in ``(0, pi/2)``.

    The root is bracketed on ``(0.1, pi/2 - 0.1)`` and found by bisection.

    Returns:
        float:
        theta0, approximately 0.5857.
    """
    if not _theta0_cache:
        theta0 = optimize.bisect(lambda t: catenoid_f(t)[0],
                                 0.1, 0.5 * math.pi - 0.1,
                                 xtol=1e-15, maxiter=200)
        logger.debug('Catenoid theta0 = %.17g', theta0)
        _theta0_cache.append(theta0)

    return _theta0_cache[0]


def catenoid_slope():
    """Return f'(theta0), the normalization of the catenoid cone.

    Returns:
        float:
        The derivative of f at theta0, approximately 4.34.
    """
    return catenoid_f(catenoid_theta0())[1]


def catenoid_g(theta):
    """Return the spherical part ``f(theta) / f'(theta0)`` of the cone.

    This is the signed profile, negative outside the support band.

    Args:
        theta (float or numpy.ndarray):
            Polar angles, strictly inside ``(0, pi)``.

    Returns:
        tuple:
        A ``(g, g_prime, g_second)`` tuple.
    """
    scale = 1.0 / catenoid_slope()
    f, fp = catenoid_f(theta)

    return (_unwrap(scale * np.asarray(f)),
            _unwrap(scale * np.asarray(fp)),
            _unwrap(scale * np.asarray(catenoid_f2(theta))))


def catenoid_support_identity(thetas, a=2.0):
    """Return the defect between the support function form and f.

    The support function of the generating catenary is
    ``H(alpha) = -(a/2) sin(alpha) log(((1 + sin(alpha)) / cos(alpha))**2)
    + a`` with ``alpha = theta + pi/2``. For ``a = 2`` it equals f.

    Args:
        thetas (numpy.ndarray):
            Polar angles, strictly inside ``(0, pi)``.

        a (float, optional):
            The catenary scale.

    Returns:
        float:
        The largest ``|H - f|`` over the angles.

    Raises:
        flamelab.errors.PoleError:
            An angle was at or beyond a pole.
    """
    thetas = np.atleast_1d(_check_theta(thetas))
    alpha = thetas + 0.5 * math.pi
    sa = np.sin(alpha)
    ca = np.cos(alpha)
    H = -0.5 * a * sa * np.log(((1.0 + sa) / ca) ** 2) + a
    f = np.atleast_1d(catenoid_f(thetas)[0])

    return float(np.max(np.abs(H - f)))


def _catenoid_angles(points):
    r = np.linalg.norm(points, axis=-1)
    safe_r = np.where(r > 0, r, 1.0)
    theta = np.arccos(np.clip(points[..., 2] / safe_r, -1.0, 1.0))

    return r, np.clip(theta, POLE_GUARD, math.pi - POLE_GUARD)


def _catenoid_values(points):
    r, theta = _catenoid_angles(points)
    g = catenoid_g(theta)[0]

    return np.where(r > 0, r * np.maximum(g, 0.0), 0.0)


def _catenoid_gradient(points):
    r, theta = _catenoid_angles(points)
    g, gp, gpp = catenoid_g(theta)
    support = (r > 0) & (np.asarray(g) > 0)

    safe_r = np.where(r > 0, r, 1.0)
    radial = points / safe_r[..., np.newaxis]
    rho = np.hypot(points[..., 0], points[..., 1])
    safe_rho = np.where(rho > 0, rho, 1.0)
    cos_t = np.cos(theta)
    e_theta = np.stack([cos_t * points[..., 0] / safe_rho,
                        cos_t * points[..., 1] / safe_rho,
                        -np.sin(theta)], axis=-1)

    grad = (np.asarray(g)[..., np.newaxis] * radial +
            np.asarray(gp)[..., np.newaxis] * e_theta)

    return np.where(support[..., np.newaxis], grad, 0.0)


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    bad = ~((theta > 0.0) & (theta < math.pi))

    if np.any(bad):
        raise PoleError(float(np.atleast_1d(theta)[np.argmax(
            np.atleast_1d(bad))]))

    return theta


def _unwrap(values):
    if np.ndim(values) == 0:
        return float(values)

    return values


def _profile_1d_position(profile, eps, tau):
    """Return x(u) for ``u = eps * exp(tau)`` on the transition layer.

    The position is measured from the launch height ``delta * eps``.
    """
    tiny = 1e-300

    def integrand(t):
        b = max(float(eval_B(profile, math.exp(t))), tiny)

        return eps * math.exp(t) / math.sqrt(2.0 * b)

    tau_ref = math.log(PROFILE_1D_DELTA)

    return integrate.quad(integrand, tau_ref, tau,
                          epsabs=1e-14, epsrel=1e-13, limit=200)[0]


def profile_1d(profile, eps, x):
    """Evaluate the exact one-dimensional one-phase eps-profile.

    The profile solves ``u'' = beta_eps(u)`` with the first integral
    ``u' = sqrt(2 B(u / eps))``. It is launched from ``u = delta * eps`` at
    ``x = 0`` (``delta = 1e-6``), decays toward 0 as x decreases, and
    continues linearly with slope ``sqrt(2 M)`` once it reaches eps.

    Args:
        profile (flamelab.mollifier.BetaProfile):
            The reaction profile.

        eps (float):
            The positive scale parameter.

        x (float or numpy.ndarray):
            The positions.

    Returns:
        float or numpy.ndarray:
        The profile values.

    Raises:
        flamelab.errors.InvalidParameterError:
            ``eps`` was not positive.
    """
    if not eps > 0:
        raise InvalidParameterError('eps', eps, 'a positive number')

    xs = np.atleast_1d(np.asarray(x, dtype=float))
    x_top = _profile_1d_position(profile, eps, 0.0)
    slope = math.sqrt(2.0 * profile_mass(profile))
    result = np.empty_like(xs)

    for i, xi in enumerate(xs):
        if xi >= x_top:
            result[i] = eps + slope * (xi - x_top)
            continue

        tau_lo = math.log(PROFILE_1D_DELTA)

        while _profile_1d_position(profile, eps, tau_lo) > xi:
            tau_lo -= 5.0

            if tau_lo < -700.0:
                break

        if tau_lo < -700.0:
            result[i] = 0.0
            continue

        tau = optimize.brentq(
            lambda t: _profile_1d_position(profile, eps, t) - xi,
            tau_lo, 0.0, xtol=1e-15, rtol=4.5e-16)
        result[i] = eps * math.exp(tau)

    if np.ndim(x) == 0:
        return float(result[0])

    return result


def profile_1d_slope(profile, eps, x):
    """Return the derivative of :py:func:`profile_1d` from its first integral.

    Args:
        profile (flamelab.mollifier.BetaProfile):
            The reaction profile.

        eps (float):
            The positive scale parameter.

        x (float or numpy.ndarray):
            The positions.

    Returns:
        float or numpy.ndarray:
        ``sqrt(2 B(u(x) / eps))``.
    """
    u = profile_1d(profile, eps, x)

    return _unwrap(np.sqrt(2.0 * np.asarray(eval_B(profile,
                                                   np.asarray(u) / eps))))
