"""Run configuration for the command line.

Each subcommand has a table of defaults. A JSON configuration document can
override any of them, and explicit command-line flags override both.
"""

import json
import logging
import math
import os

import numpy as np
from scipy.interpolate import griddata

from flamelab.errors import ConfigError, InvalidParameterError
from flamelab.exact import ExactKind, make_exact_field
from flamelab.fields import GridSpec, ScalarField
from flamelab.mollifier import load_profile, mass as profile_mass
from flamelab.solver import SolverConfig


logger = logging.getLogger('flamelab')


#: The boundary data families.
BOUNDARY_KINDS = ExactKind.VARIANTS + ('custom_table',)


_SOLVE_DEFAULTS = {
    'dim': 2,
    'n': 129,
    'half_width': 1.0,
    'domain': GridSpec.DOMAIN_BOX,
    'radius': 1.0,
    'boundary': {'kind': ExactKind.HALF_PLANE},
    'profile': 'poly',
    'eps': 0.05,
    'ladder': None,
    'tol_residual': None,
    'max_iterations': 50000,
    'sweep': SolverConfig.SWEEP_RED_BLACK,
    'omega': None,
    'out': 'u.fld',
}

DEFAULTS = {
    'solve': _SOLVE_DEFAULTS,
    'energy': {
        'field': None,
        'center': None,
        'radii': '0.1:0.45:20',
        'mode': 'eps',
        'mass': None,
        'n_theta': 256,
        'out': 's.csv',
    },
    'blowup': {
        'field': None,
        'center': None,
        'scales': '0.5:0.125:3',
        'out_n': 65,
        'out_half_width': 1.0,
        'r1': 0.25,
        'r2': 0.5,
        'out': 'blowup',
    },
    'classify2d': {
        'field': None,
        'center': None,
        'radius': None,
        'samples': 512,
        'tol': 1e-3,
        'mass': None,
        'out': 'cls.json',
    },
    'fb': {
        'field': None,
        'level_tol': 0.0,
        'radii': [0.2, 0.1, 0.05],
        'half_tol': 0.1,
        'mass': None,
        'out': 'fb.json',
    },
    'catenoid': {
        'report': False,
        'samples': 0,
        'out': None,
    },
    'surface': {
        'g': None,
        'field': None,
        'center': None,
        'radius': None,
        'res': '128,256',
        'mass': None,
        'out': 'm.obj',
        'summary': None,
    },
    'check': {
        'suite': 'fast',
    },
}


class RunConfig(object):
    """The resolved parameters of one command-line run.

    Attributes:
        command (str):
            The subcommand.

        values (dict):
            The resolved parameters.

        sources (dict):
            Where each parameter came from: ``default``, ``file`` or
            ``flag``.
    """

    def __init__(self, command, values=None, sources=None):
        if command not in DEFAULTS:
            raise ConfigError('command', 'unknown subcommand "%s"' % command)

        self.command = command
        self.values = dict(DEFAULTS[command])
        self.sources = dict((key, 'default') for key in self.values)

        if values:
            self.values.update(values)

        if sources:
            self.sources.update(sources)

    @classmethod
    def load(cls, command, path=None, flags=None):
        """Resolve a configuration from defaults, a file and flags.

        Args:
            command (str):
                The subcommand.

            path (str, optional):
                A JSON configuration document. Keys may be given at the top
                level or under a key named after the subcommand.

            flags (dict, optional):
                Explicit flags. ``None`` values are treated as absent.

        Returns:
            RunConfig:
            The resolved configuration.

        Raises:
            flamelab.errors.ConfigError:
                The document could not be read, or named an unknown key.
        """
        values = {}
        sources = {}

        if path:
            document = read_config_file(path)

            if isinstance(document.get(command), dict):
                document = document[command]

            for key, value in document.items():
                if key not in DEFAULTS[command]:
                    raise ConfigError(key, 'not a setting of "%s"' % command)

                values[key] = value
                sources[key] = 'file'

        for key, value in (flags or {}).items():
            if value is not None:
                values[key] = value
                sources[key] = 'flag'

        config = cls(command, values, sources)
        config.validate()

        return config

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        """Return a parameter, or a default when it is unset."""
        value = self.values.get(key)

        if value is None:
            return default

        return value

    def validate(self):
        """Check the parameters of the subcommand.

        Raises:
            flamelab.errors.ConfigError:
                A parameter was invalid.
        """
        values = self.values

        for key in ('eps', 'tol_residual', 'tol', 'half_tol', 'radius',
                    'half_width', 'mass', 'r1', 'r2'):
            value = values.get(key)

            if value is not None and not _is_positive(value):
                raise ConfigError(key, 'must be a positive number, not %r'
                                  % (value,))

        if 'level_tol' in values and not _is_nonnegative(values['level_tol']):
            raise ConfigError('level_tol', 'must be a nonnegative number')

        if self.command == 'solve':
            self._validate_solve()
        elif self.command == 'energy':
            if values['mode'] not in ('eps', 'limit'):
                raise ConfigError('mode', 'must be "eps" or "limit"')
        elif self.command == 'check':
            if values['suite'] not in ('fast', 'all'):
                raise ConfigError('suite', 'must be "fast" or "all"')

        for key in ('out', 'summary'):
            path = values.get(key)

            if self.sources.get(key) != 'default' and path:
                parent = os.path.dirname(os.path.abspath(path))

                if os.path.isdir(parent) and not os.access(parent, os.W_OK):
                    raise ConfigError(key, 'directory "%s" is not writable'
                                      % parent)

    def _validate_solve(self):
        values = self.values

        if values['dim'] not in (1, 2, 3):
            raise ConfigError('dim', 'must be 1, 2 or 3')

        if int(values['n']) < 3:
            raise ConfigError('n', 'must be at least 3')

        if values['domain'] not in (GridSpec.DOMAIN_BOX,
                                    GridSpec.DOMAIN_BALL):
            raise ConfigError('domain', 'must be "box" or "ball"')

        boundary = values['boundary']

        if isinstance(boundary, str):
            boundary = {'kind': boundary}
            values['boundary'] = boundary

        if (not isinstance(boundary, dict) or
                boundary.get('kind') not in BOUNDARY_KINDS):
            raise ConfigError('boundary', 'kind must be one of %s'
                              % ', '.join(BOUNDARY_KINDS))

        if boundary['kind'] == 'custom_table' and not boundary.get('path'):
            raise ConfigError('boundary', 'custom_table needs a "path"')

        ladder = values['ladder']

        if ladder is not None:
            if isinstance(ladder, str):
                try:
                    ladder = [float(part) for part in ladder.split(',')]
                except ValueError:
                    raise ConfigError('ladder', 'must be a list of numbers')

                values['ladder'] = ladder

            if any(b >= a for a, b in zip(ladder, ladder[1:])):
                raise ConfigError('ladder', 'must be strictly descending, '
                                  'not %r' % (ladder,))

            if any(not _is_positive(value) for value in ladder):
                raise ConfigError('ladder', 'must hold positive numbers')

        try:
            self.solver_config()
        except InvalidParameterError as e:
            raise ConfigError(e.name, str(e))

    def solver_config(self):
        """Return the solver options of a ``solve`` run.

        Returns:
            flamelab.solver.SolverConfig:
            The options.
        """
        return SolverConfig(tol_residual=self.values['tol_residual'],
                            max_iterations=self.values['max_iterations'],
                            sweep=self.values['sweep'],
                            continuation=self.values['ladder'],
                            omega=self.values['omega'])

    def grid(self):
        """Return the grid of a ``solve`` run.

        Returns:
            flamelab.fields.GridSpec:
            The grid.
        """
        values = self.values
        dim = int(values['dim'])
        n = int(values['n'])

        if values['domain'] == GridSpec.DOMAIN_BALL:
            radius = float(values['radius'])

            return GridSpec.ball(dim, 2.0 * radius / (n - 1), radius=radius)

        return GridSpec.centered_box(dim, n, float(values['half_width']))

    def profile(self):
        """Return the reaction profile of a ``solve`` run.

        Raises:
            flamelab.errors.ConfigError:
                The profile could not be loaded.
        """
        try:
            return load_profile(self.values['profile'])
        except (ValueError, OSError) as e:
            raise ConfigError('profile', str(e))

    def to_json(self):
        """Return the resolved parameters."""
        return dict(self.values)


def read_config_file(path):
    """Read a JSON configuration document.

    Args:
        path (str):
            The path.

    Returns:
        dict:
        The document.

    Raises:
        flamelab.errors.ConfigError:
            The file was unreadable or not a JSON object.
    """
    try:
        with open(path, 'r') as fp:
            document = json.load(fp)
    except (OSError, ValueError) as e:
        raise ConfigError('config', 'could not read "%s": %s' % (path, e))

    if not isinstance(document, dict):
        raise ConfigError('config', '"%s" does not hold a JSON object'
                          % path)

    return document


def make_boundary(spec, grid, profile=None):
    """Build the boundary data and initial guess of a solve.

    Args:
        spec (dict):
            The boundary description. ``kind`` is one of
            :py:data:`BOUNDARY_KINDS`. Other keys are the family parameters
            (``mass``, ``alpha``, ``beta``, ``c``, ``normal``) or, for
            ``custom_table``, the ``path`` of a CSV table of coordinates and
            values with a header row.

        grid (flamelab.fields.GridSpec):
            The grid.

        profile (flamelab.mollifier.BetaProfile, optional):
            The reaction profile. Half-plane data defaults to its mass.

    Returns:
        flamelab.fields.ScalarField:
        A field whose Dirichlet nodes hold the data and whose interior holds
        the initial guess.

    Raises:
        flamelab.errors.ConfigError:
            The description was invalid.
    """
    kind = spec.get('kind')

    if kind == 'custom_table':
        return _table_boundary(spec, grid)

    params = dict((key, value) for key, value in spec.items()
                  if key in ('mass', 'alpha', 'beta', 'c', 'normal'))

    if kind == ExactKind.HALF_PLANE and params.get('mass') is None:
        params['mass'] = profile_mass(profile) if profile else 1.0

    try:
        return make_exact_field(ExactKind(kind, **params), grid)
    except (InvalidParameterError, TypeError) as e:
        raise ConfigError('boundary', str(e))


def _table_boundary(spec, grid):
    path = spec['path']

    try:
        table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2,
                           comments='#')
    except (OSError, ValueError) as e:
        raise ConfigError('boundary', 'could not read "%s": %s' % (path, e))

    if table.shape[1] != grid.dim + 1:
        raise ConfigError('boundary', '"%s" needs %d coordinate columns and '
                          'a value column' % (path, grid.dim))

    points = table[:, :grid.dim]
    data = table[:, grid.dim]
    coords = grid.coordinates().reshape(-1, grid.dim)

    if grid.dim == 1:
        order = np.argsort(points[:, 0])
        values = np.interp(coords[:, 0], points[order, 0], data[order])
    else:
        values = griddata(points, data, coords, method='linear')
        missing = ~np.isfinite(values)

        if np.any(missing):
            values[missing] = griddata(points, data, coords[missing],
                                       method='nearest')

    logger.debug('Interpolated %d boundary samples from %s', len(data), path)

    return ScalarField(grid, values.reshape(grid.shape))


def _is_positive(value):
    try:
        return math.isfinite(float(value)) and float(value) > 0
    except (TypeError, ValueError):
        return False


def _is_nonnegative(value):
    try:
        return math.isfinite(float(value)) and float(value) >= 0
    except (TypeError, ValueError):
        return False
