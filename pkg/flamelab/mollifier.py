"""Reaction profiles approximating a Dirac mass.

A profile is a nonnegative function beta supported in [0, 1] with
positive mass M. Scaled by a parameter eps it becomes
``beta_eps(t) = beta(t / eps) / eps``, which concentrates the mass M on the
level set ``{u = 0}`` as eps goes to zero.
"""

import logging
import math
import os

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from flamelab.errors import InvalidParameterError, InvalidProfileError


logger = logging.getLogger('flamelab')


class BetaProfile(object):
    """A reaction profile beta, its antiderivative B, and its mass.

    Profiles are immutable after construction and may be shared freely.

    Attributes:
        kind (str):
            One of :py:attr:`KIND_POLYNOMIAL_BUMP`,
            :py:attr:`KIND_SMOOTH_BUMP` or :py:attr:`KIND_TABULATED`.

        scale (float):
            A positive multiplier applied to the base shape.

        samples (numpy.ndarray):
            For tabulated profiles, an ``(n, 2)`` array of ``(t, beta(t))``
            pairs. ``None`` otherwise.

        name (str):
            The name used to select the profile in a run configuration.
    """

    #: The C^1 bump ``6 t (1 - t)``, with mass 1.
    KIND_POLYNOMIAL_BUMP = 'polynomial_bump'

    #: The C^infinity bump ``c exp(-1 / (t (1 - t)))``, normalized to mass 1.
    KIND_SMOOTH_BUMP = 'smooth_bump'

    #: A piecewise-linear profile given by samples.
    KIND_TABULATED = 'tabulated'

    KINDS = (KIND_POLYNOMIAL_BUMP, KIND_SMOOTH_BUMP, KIND_TABULATED)

    # Number of panels used to tabulate B for the smooth bump.
    _SMOOTH_PANELS = 2048

    def __init__(self, kind=KIND_POLYNOMIAL_BUMP, scale=1.0, samples=None,
                 name=None):
        """Initialize the profile.

        Args:
            kind (str, optional):
                The kind of profile.

            scale (float, optional):
                A positive multiplier for the profile.

            samples (array-like, optional):
                The ``(t, beta)`` samples for a tabulated profile. The
                samples must include ``t = 0`` and ``t = 1``.

            name (str, optional):
                An explicit name. Defaults to ``poly``, ``smooth`` or
                ``table``.

        Raises:
            flamelab.errors.InvalidParameterError:
                The kind or scale was invalid.

            flamelab.errors.InvalidProfileError:
                The samples were malformed or the mass is zero.
        """
        if kind not in self.KINDS:
            raise InvalidParameterError('kind', kind,
                                        'one of %s' % ', '.join(self.KINDS))

        if not (scale > 0 and np.isfinite(scale)):
            raise InvalidParameterError('scale', scale,
                                        'a positive finite number')

        self.kind = kind
        self.scale = float(scale)
        self.samples = None

        if kind == self.KIND_TABULATED:
            self.samples = self._validate_samples(samples)
            self._init_tabulated()
        elif kind == self.KIND_SMOOTH_BUMP:
            self._init_smooth()

        if name is None:
            name = {
                self.KIND_POLYNOMIAL_BUMP: 'poly',
                self.KIND_SMOOTH_BUMP: 'smooth',
                self.KIND_TABULATED: 'table',
            }[kind]

        self.name = name
        self._mass = self._compute_mass()

        if not self._mass > 0:
            raise InvalidProfileError('The profile "%s" has zero mass.'
                                      % self.name)

    @property
    def mass(self):
        """The mass M of the profile."""
        return self._mass

    def beta(self, t):
        """Return beta(t).

        Args:
            t (float or numpy.ndarray):
                The argument.

        Returns:
            float or numpy.ndarray:
            The profile value, zero outside ``[0, 1]``.
        """
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t <= 1.0)
        tc = np.clip(t, 0.0, 1.0)

        if self.kind == self.KIND_POLYNOMIAL_BUMP:
            values = 6.0 * tc * (1.0 - tc)
        elif self.kind == self.KIND_SMOOTH_BUMP:
            values = self._smooth_shape(tc) / self._smooth_norm
        else:
            values = np.interp(tc, self._table_t, self._table_beta)

        return _unwrap(self.scale * np.where(inside, values, 0.0))

    def beta_prime(self, t):
        """Return the derivative of beta at t.

        Tabulated profiles return the slope of the segment containing t.

        Args:
            t (float or numpy.ndarray):
                The argument.

        Returns:
            float or numpy.ndarray:
            The derivative, zero outside ``[0, 1]``.
        """
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t <= 1.0)
        tc = np.clip(t, 0.0, 1.0)

        if self.kind == self.KIND_POLYNOMIAL_BUMP:
            values = 6.0 - 12.0 * tc
        elif self.kind == self.KIND_SMOOTH_BUMP:
            interior = (tc > 0.0) & (tc < 1.0)
            ts = np.where(interior, tc, 0.5)
            q = ts * (1.0 - ts)
            values = np.where(
                interior,
                self._smooth_shape(ts) * (1.0 - 2.0 * ts) / (q * q),
                0.0) / self._smooth_norm
        else:
            slopes = np.diff(self._table_beta) / np.diff(self._table_t)
            idx = np.clip(np.searchsorted(self._table_t, tc, side='right') - 1,
                          0, len(slopes) - 1)
            values = slopes[idx]

        return _unwrap(self.scale * np.where(inside, values, 0.0))

    def antiderivative(self, s):
        """Return B(s), the integral of beta from 0 to s.

        Args:
            s (float or numpy.ndarray):
                The upper limit.

        Returns:
            float or numpy.ndarray:
            The integral, clamped to 0 for ``s <= 0`` and to M for
            ``s >= 1``.
        """
        s = np.asarray(s, dtype=float)
        sc = np.clip(s, 0.0, 1.0)

        if self.kind == self.KIND_POLYNOMIAL_BUMP:
            values = self.scale * sc * sc * (3.0 - 2.0 * sc)
        elif self.kind == self.KIND_SMOOTH_BUMP:
            values = self.scale * self._smooth_B(sc)
        else:
            values = self.scale * self._tabulated_B(sc)

        values = np.where(s <= 0.0, 0.0, values)
        values = np.where(s >= 1.0, self._mass, values)

        return _unwrap(values)

    def to_spec(self):
        """Return a string that selects this profile in a configuration.

        Returns:
            str:
            The profile name, with ``*scale`` appended when the scale is not
            1.
        """
        if self.scale == 1.0:
            return self.name

        return '%s*%r' % (self.name, self.scale)

    def _compute_mass(self):
        if self.kind == self.KIND_POLYNOMIAL_BUMP:
            return self.scale
        elif self.kind == self.KIND_SMOOTH_BUMP:
            return self.scale * float(self._smooth_cumulative[-1])
        else:
            return self.scale * float(self._table_cumulative[-1])

    @staticmethod
    def _smooth_shape(t):
        t = np.asarray(t, dtype=float)
        interior = (t > 0.0) & (t < 1.0)
        ts = np.where(interior, t, 0.5)

        return np.where(interior, np.exp(-1.0 / (ts * (1.0 - ts))), 0.0)

    def _init_smooth(self):
        def shape(t):
            if t <= 0.0 or t >= 1.0:
                return 0.0

            return math.exp(-1.0 / (t * (1.0 - t)))

        norm = integrate.quad(shape, 0.0, 1.0,
                              epsabs=1e-15, epsrel=1e-13)[0]
        self._smooth_norm = norm

        edges = np.linspace(0.0, 1.0, self._SMOOTH_PANELS + 1)
        panels = [
            integrate.quad(shape, a, b, epsabs=1e-16, epsrel=1e-13)[0] / norm
            for a, b in zip(edges[:-1], edges[1:])
        ]

        self._smooth_edges = edges
        self._smooth_cumulative = np.concatenate([[0.0], np.cumsum(panels)])
        self._smooth_interp = PchipInterpolator(edges, self._smooth_cumulative)

    def _smooth_B(self, s):
        return self._smooth_interp(s)

    def _validate_samples(self, samples):
        if samples is None:
            raise InvalidProfileError('A tabulated profile requires samples.')

        samples = np.asarray(samples, dtype=float)

        if samples.ndim != 2 or samples.shape[1] != 2 or len(samples) < 2:
            raise InvalidProfileError(
                'Tabulated samples must be an (n, 2) table of (t, beta) '
                'pairs with n >= 2.')

        t = samples[:, 0]

        if np.any(np.diff(t) <= 0):
            raise InvalidProfileError(
                'Tabulated sample positions must be strictly increasing.')

        if t[0] != 0.0 or t[-1] != 1.0:
            raise InvalidProfileError(
                'Tabulated samples must start at t = 0 and end at t = 1.')

        if np.any(samples[:, 1] < 0) or not np.all(np.isfinite(samples)):
            raise InvalidProfileError(
                'Tabulated beta values must be finite and nonnegative.')

        return samples

    def _init_tabulated(self):
        self._table_t = self.samples[:, 0]
        self._table_beta = self.samples[:, 1]
        self._table_cumulative = integrate.cumulative_trapezoid(
            self._table_beta, self._table_t, initial=0.0)

    def _tabulated_B(self, s):
        # Exact integral of the piecewise-linear interpolant. At sample
        # positions this agrees with the trapezoid rule.
        t = self._table_t
        b = self._table_beta
        idx = np.clip(np.searchsorted(t, s, side='right') - 1, 0, len(t) - 2)
        width = t[idx + 1] - t[idx]
        d = s - t[idx]

        return (self._table_cumulative[idx] +
                b[idx] * d +
                (b[idx + 1] - b[idx]) * d * d / (2.0 * width))

    def __repr__(self):
        return '<BetaProfile(kind=%r, scale=%r, mass=%r)>' % (
            self.kind, self.scale, self._mass)


def _unwrap(values):
    if np.ndim(values) == 0:
        return float(values)

    return values


def eval_beta(profile, t, eps):
    """Evaluate the scaled profile beta_eps(t) = beta(t / eps) / eps.

    Args:
        profile (BetaProfile):
            The profile.

        t (float or numpy.ndarray):
            The argument.

        eps (float):
            The positive scale parameter.

    Returns:
        float or numpy.ndarray:
        The scaled profile, zero outside ``[0, eps]``.

    Raises:
        flamelab.errors.InvalidParameterError:
            ``eps`` was not positive.
    """
    _check_eps(eps)

    return _unwrap(np.asarray(profile.beta(np.asarray(t) / eps)) / eps)


def eval_beta_prime(profile, t, eps):
    """Evaluate the derivative of beta_eps at t.

    Args:
        profile (BetaProfile):
            The profile.

        t (float or numpy.ndarray):
            The argument.

        eps (float):
            The positive scale parameter.

    Returns:
        float or numpy.ndarray:
        The derivative ``beta'(t / eps) / eps**2``.
    """
    _check_eps(eps)

    return _unwrap(np.asarray(profile.beta_prime(np.asarray(t) / eps)) /
                   (eps * eps))


def eval_B(profile, s):
    """Evaluate B(s), the integral of beta over [0, s].

    Args:
        profile (BetaProfile):
            The profile.

        s (float or numpy.ndarray):
            The upper limit.

    Returns:
        float or numpy.ndarray:
        The integral, clamped to 0 below 0 and to M above 1.
    """
    return profile.antiderivative(s)


def mass(profile):
    """Return the mass M of a profile.

    Args:
        profile (BetaProfile):
            The profile.

    Returns:
        float:
        The positive mass.

    Raises:
        flamelab.errors.InvalidProfileError:
            The profile has zero mass.
    """
    value = profile.mass

    if not value > 0:
        raise InvalidProfileError('The profile "%s" has zero mass.'
                                  % profile.name)

    return value


def load_profile(spec):
    """Load a profile from its configuration string.

    The string may be ``poly`` or ``smooth``, optionally followed by
    ``*scale`` (for example ``poly*0.5``), or a path to a two-column text
    table of ``t`` and ``beta`` values with a header row.

    Args:
        spec (str):
            The profile specification.

    Returns:
        BetaProfile:
        The loaded profile.

    Raises:
        flamelab.errors.InvalidProfileError:
            The profile could not be loaded.
    """
    name, sep, scale = spec.partition('*')

    try:
        scale = float(scale) if sep else 1.0
    except ValueError:
        raise InvalidProfileError('"%s" has an invalid scale factor.' % spec)

    if name == 'poly':
        return BetaProfile(BetaProfile.KIND_POLYNOMIAL_BUMP, scale=scale)
    elif name == 'smooth':
        return BetaProfile(BetaProfile.KIND_SMOOTH_BUMP, scale=scale)
    elif os.path.exists(name):
        with open(name, 'r') as fp:
            text = fp.read()

        if ',' in text:
            delimiter = ','
        else:
            delimiter = None

        try:
            samples = np.loadtxt(name, skiprows=1, delimiter=delimiter,
                                 ndmin=2, comments='#')
        except ValueError as e:
            raise InvalidProfileError('Unable to read the profile table '
                                      '"%s": %s' % (name, e))

        logger.debug('Loaded %d profile samples from %s', len(samples), name)

        return BetaProfile(BetaProfile.KIND_TABULATED, scale=scale,
                           samples=samples, name=name)

    raise InvalidProfileError('"%s" is not a known profile name or an '
                              'existing table.' % spec)


def _check_eps(eps):
    if not eps > 0:
        raise InvalidParameterError('eps', eps, 'a positive number')
