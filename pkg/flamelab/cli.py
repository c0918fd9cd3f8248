"""The flamelab command line.

Every subcommand prints a one-line JSON summary on standard output. Settings
come from the subcommand defaults, then from the ``--config`` JSON document,
then from explicit flags, with later sources taking precedence.

Exit status is 0 on success, 1 on I/O failure, 2 on invalid configuration
or parameters, and 3 on non-convergence or a failed invariant check.
"""

import argparse
import logging
import math
import os
import sys

import numpy as np

from flamelab import get_version_string
from flamelab.blowup import (circle_trace, classify_blowup_2d,
                             extract_free_boundary, homogeneity_deviation,
                             label_density_sets, rescale)
from flamelab.checks import run_checks
from flamelab.config import RunConfig, make_boundary
from flamelab.energy import monotonicity_profile
from flamelab.errors import ConfigError, ConvergenceError, OutOfDomainError
from flamelab.exact import (catenoid_f, catenoid_ode_residual,
                            catenoid_slope, catenoid_support_identity,
                            catenoid_theta0)
from flamelab.fields import load_field, save_field
from flamelab.mollifier import load_profile
from flamelab.shells import ShellQuadrature
from flamelab.solver import residual, solve_peps
from flamelab.spherical import SphericalFunction
from flamelab.surface import export_mesh, surface_summary
from flamelab.utils import dump_json, parse_range, parse_vector, write_csv


logger = logging.getLogger('flamelab')


EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class CommandFailed(Exception):
    """A subcommand finished, but with a failing exit status.

    The summary is still printed.
    """

    def __init__(self, summary, status=EXIT_NUMERICAL):
        super(CommandFailed, self).__init__(summary.get('error', ''))

        self.summary = summary
        self.status = status


def build_parser():
    """Return the argument parser.

    Returns:
        argparse.ArgumentParser:
        The parser.
    """
    parser = argparse.ArgumentParser(
        prog='flamelab',
        description='Numerical experiments on flame propagation limits and '
                    'their free boundaries.',
        epilog='Settings resolve as flags > --config file > defaults.')
    parser.add_argument('--version', action='version',
                        version='flamelab %s' % get_version_string())
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='log debugging output to standard error')
    parser.add_argument('--threads', type=int, default=None,
                        help='cap on worker threads (default: machine '
                             'parallelism)')
    parser.add_argument('--config', default=None,
                        help='JSON configuration document')

    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    p = commands.add_parser('solve', help='solve Delta u = beta_eps(u)')
    p.add_argument('--out')
    p.add_argument('--dim', type=int)
    p.add_argument('--n', type=int, help='nodes per axis')
    p.add_argument('--domain', choices=('box', 'ball'))
    p.add_argument('--half-width', dest='half_width', type=float)
    p.add_argument('--radius', type=float)
    p.add_argument('--boundary',
                   help='half_plane, wedge, two_plane, catenoid, constant '
                        'or custom_table')
    p.add_argument('--profile', help='poly, smooth or a table path')
    p.add_argument('--eps', type=float)
    p.add_argument('--ladder', help='comma-separated descending eps values')
    p.add_argument('--tol', dest='tol_residual', type=float)
    p.add_argument('--max-iterations', dest='max_iterations', type=int)
    p.add_argument('--sweep', choices=('red_black', 'lexicographic'))
    p.add_argument('--omega', type=float)

    p = commands.add_parser('energy', help='tabulate S_eps or S over radii')
    p.add_argument('--field')
    p.add_argument('--center')
    p.add_argument('--radii', help='start:stop:count')
    p.add_argument('--mode', choices=('eps', 'limit'))
    p.add_argument('--mass', type=float)
    p.add_argument('--n-theta', dest='n_theta', type=int)
    p.add_argument('--out')

    p = commands.add_parser('blowup', help='rescale a field at a point')
    p.add_argument('--field')
    p.add_argument('--center')
    p.add_argument('--scales', help='start:stop:count')
    p.add_argument('--out-n', dest='out_n', type=int)
    p.add_argument('--out-half-width', dest='out_half_width', type=float)
    p.add_argument('--out', help='output directory')

    p = commands.add_parser('classify2d', help='classify a 2D blow-up')
    p.add_argument('--field')
    p.add_argument('--center')
    p.add_argument('--radius', type=float)
    p.add_argument('--samples', type=int)
    p.add_argument('--tol', type=float)
    p.add_argument('--mass', type=float)
    p.add_argument('--out')

    p = commands.add_parser('fb', help='extract and label a free boundary')
    p.add_argument('--field')
    p.add_argument('--level-tol', dest='level_tol', type=float)
    p.add_argument('--radii', help='comma-separated descending radii')
    p.add_argument('--half-tol', dest='half_tol', type=float)
    p.add_argument('--mass', type=float)
    p.add_argument('--out')

    p = commands.add_parser('catenoid', help='report on the catenoid cone')
    p.add_argument('--report', action='store_true', default=None)
    p.add_argument('--samples', type=int)
    p.add_argument('--out')

    p = commands.add_parser('surface',
                            help='mesh and summarize a support function')
    p.add_argument('--g', help='CSV of theta, phi, g')
    p.add_argument('--field')
    p.add_argument('--center')
    p.add_argument('--radius', type=float)
    p.add_argument('--res', help='n_theta,n_phi')
    p.add_argument('--mass', type=float)
    p.add_argument('--out')
    p.add_argument('--summary')

    p = commands.add_parser('check', help='run the invariant suite')
    p.add_argument('--suite', choices=('fast', 'all'))

    return parser


def _flags(args):
    skip = ('command', 'verbose', 'threads', 'config')

    return dict((key, value) for key, value in vars(args).items()
                if key not in skip)


def _field_arg(config):
    path = config.get('field')

    if not path:
        raise ConfigError('field', 'a field path is required')

    return load_field(path)


def _center_arg(config, dim):
    text = config.get('center')

    if text is None:
        return np.zeros(dim)

    try:
        center = (parse_vector(text) if isinstance(text, str)
                  else np.asarray(text, dtype=float))
    except ValueError as e:
        raise ConfigError('center', str(e))

    if center.shape != (dim,):
        raise ConfigError('center', 'needs %d coordinates' % dim)

    return center


def _range_arg(config, key):
    value = config.get(key)

    try:
        if isinstance(value, str):
            return parse_range(value)

        return np.asarray(value, dtype=float)
    except ValueError as e:
        raise ConfigError(key, str(e))


def _list_arg(config, key):
    value = config.get(key)

    if isinstance(value, str):
        try:
            return [float(part) for part in value.split(',')]
        except ValueError:
            raise ConfigError(key, 'must be a comma-separated list of '
                                   'numbers')

    return [float(part) for part in value]


def _field_mass(config, field):
    value = config.get('mass')

    if value is None:
        value = field.mass

    if value is None:
        raise ConfigError('mass', 'the field has no mass; pass --mass')

    return float(value)


def _default_radius(field, center):
    upper = field.grid.upper
    lower = field.grid.origin
    room = min(np.min(upper - center), np.min(center - lower))

    return 0.5 * float(room)


def cmd_solve(config, threads=None):
    grid = config.grid()
    profile = config.profile()
    boundary = make_boundary(config['boundary'], grid, profile)
    eps = float(config['eps'])
    out = config['out']
    summary = {
        'command': 'solve',
        'out': out,
        'eps': eps,
        'shape': list(grid.shape),
        'spacing': grid.spacing,
    }

    try:
        field = solve_peps(boundary, profile, eps, config.solver_config())
    except ConvergenceError as e:
        if e.field is not None:
            save_field(e.field, out)

        summary.update({
            'status': 'not_converged',
            'residual': e.residual,
            'iterations': e.iterations,
            'error': str(e),
        })
        raise CommandFailed(summary)

    save_field(field, out)
    summary.update({
        'status': 'ok',
        'residual': residual(field, profile, eps),
    })

    return summary


def cmd_energy(config, threads=None):
    field = _field_arg(config)
    center = _center_arg(config, field.dim)
    radii = _range_arg(config, 'radii')
    mode = config['mode']
    quad = ShellQuadrature(field.dim, int(config['n_theta']))

    if mode == 'eps':
        if field.profile is None or field.eps is None:
            raise ConfigError('mode', 'eps mode needs a solved field')

        table = monotonicity_profile(field, center, radii, mode,
                                     profile=load_profile(field.profile),
                                     eps=field.eps, quad=quad)
    else:
        table = monotonicity_profile(field, center, radii, mode,
                                     mass=_field_mass(config, field),
                                     quad=quad)

    write_csv(config['out'],
              {'mode': mode, 'eps': table.eps, 'mass': table.mass,
               'center': center},
              ('radius', 'value', 'defect'),
              table.rows())

    return {
        'command': 'energy',
        'out': config['out'],
        'mode': mode,
        'defect': table.defect,
        'values': table.values,
    }


def cmd_blowup(config, threads=None):
    field = _field_arg(config)
    center = _center_arg(config, field.dim)
    scales = _range_arg(config, 'scales')
    out_dir = config['out']
    n = int(config['out_n'])
    spacing = 2.0 * float(config['out_half_width']) / (n - 1)
    quad = ShellQuadrature(field.dim, 128)

    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)

    records = []

    for i, rho in enumerate(scales):
        rescaled = rescale(field, center, rho, (n,) * field.dim, spacing)
        path = os.path.join(out_dir, 'blowup_%02d.fld' % i)
        save_field(rescaled, path)

        try:
            deviation = homogeneity_deviation(field, center,
                                              float(config['r1']) * rho,
                                              float(config['r2']) * rho,
                                              quad)
        except OutOfDomainError as e:
            logger.warning('Homogeneity at scale %g skipped: %s', rho, e)
            deviation = None

        records.append({'rho': rho, 'path': path,
                        'homogeneity_deviation': deviation})

    with open(os.path.join(out_dir, 'blowup.json'), 'w') as fp:
        fp.write(dump_json({'center': center, 'scales': records}, indent=2))
        fp.write('\n')

    return {
        'command': 'blowup',
        'out': out_dir,
        'scales': len(records),
        'homogeneity_deviation': [r['homogeneity_deviation']
                                  for r in records],
    }


def cmd_classify2d(config, threads=None):
    field = _field_arg(config)

    if field.dim != 2:
        raise ConfigError('field', 'classify2d needs a 2D field')

    center = _center_arg(config, 2)
    radius = config.get('radius') or _default_radius(field, center)
    trace = circle_trace(field, center, r=radius,
                         n=int(config['samples']))
    result = classify_blowup_2d(trace, _field_mass(config, field),
                                float(config['tol']))

    with open(config['out'], 'w') as fp:
        fp.write(dump_json(result.to_json(), indent=2))
        fp.write('\n')

    return {
        'command': 'classify2d',
        'out': config['out'],
        'variant': result.variant,
        'alpha': result.alpha,
        'beta': result.beta,
        'fit_residual': result.fit_residual,
    }


def cmd_fb(config, threads=None):
    field = _field_arg(config)
    fb = extract_free_boundary(field, float(config['level_tol']))
    mass = config.get('mass', field.mass)
    labeled = label_density_sets(fb, field, _list_arg(config, 'radii'),
                                 float(config['half_tol']), mass=mass,
                                 threads=threads)

    with open(config['out'], 'w') as fp:
        fp.write(dump_json(labeled.to_json(), indent=2))
        fp.write('\n')

    summary = {'command': 'fb', 'out': config['out'], 'points': len(fb)}
    summary.update(labeled.to_json()['counts'])

    return summary


def cmd_catenoid(config, threads=None):
    theta0 = catenoid_theta0()
    thetas = np.linspace(0.1, math.pi - 0.1, 10000)
    summary = {
        'command': 'catenoid',
        'theta0': theta0,
        'f_prime_theta0': catenoid_slope(),
        'support_identity_defect': catenoid_support_identity(thetas),
    }

    if config.get('report'):
        band = np.linspace(0.5 * theta0, math.pi - 0.5 * theta0, 10000)
        summary['ode_residual'] = float(np.max(np.abs(
            catenoid_ode_residual(band))))
        summary['f_theta0'] = catenoid_f(theta0)[0]

    samples = int(config.get('samples', 0))

    if samples > 0:
        grid = (np.arange(samples) + 0.5) * (math.pi / samples)
        f, fp = catenoid_f(grid)
        out = config.get('out')

        if out:
            write_csv(out, {'theta0': theta0}, ('theta', 'f', 'f_prime'),
                      list(zip(grid, f, fp)))
            summary['out'] = out
        else:
            summary['samples'] = [[t, a, b] for t, a, b in zip(grid, f, fp)]

    return summary


def _parse_res(config):
    text = config.get('res')

    try:
        parts = [int(part) for part in str(text).split(',')]
    except ValueError:
        raise ConfigError('res', 'must be n_theta,n_phi')

    if len(parts) == 1:
        parts.append(2 * parts[0])

    if len(parts) != 2 or min(parts) < 3:
        raise ConfigError('res', 'must be two node counts of at least 3')

    return tuple(parts)


def cmd_surface(config, threads=None):
    n_theta, n_phi = _parse_res(config)

    if config.get('g'):
        try:
            rows = np.loadtxt(config['g'], delimiter=',', skiprows=1,
                              ndmin=2, comments='#')
        except ValueError as e:
            raise ConfigError('g', str(e))

        g = SphericalFunction.from_table(rows)
        mass = config.get('mass')

        if mass is None:
            raise ConfigError('mass', 'pass --mass with a --g table')
    elif config.get('field'):
        field = _field_arg(config)

        if field.dim != 3:
            raise ConfigError('field', 'surface needs a 3D field')

        center = _center_arg(config, 3)
        radius = config.get('radius') or _default_radius(field, center)
        g = SphericalFunction.from_field(field, center, r=radius, dim=2,
                                         n_theta=n_theta, n_phi=n_phi)
        mass = _field_mass(config, field)
    else:
        raise ConfigError('g', 'pass --g or --field')

    mesh = export_mesh(g)

    with open(config['out'], 'w') as fp:
        fp.write(mesh.to_obj())

    report = surface_summary(g, mass, mesh=mesh)

    if config.get('summary'):
        with open(config['summary'], 'w') as fp:
            fp.write(dump_json(report, indent=2))
            fp.write('\n')

    summary = {'command': 'surface', 'out': config['out']}
    summary.update(report['mesh'])
    summary['max_abs_mean_residual'] = report['max_abs_mean_residual']
    summary['max_conformality_defect'] = report['max_conformality_defect']

    return summary


def cmd_check(config, threads=None):
    results = run_checks(config['suite'], threads=threads)
    failed = [r for r in results if not r.passed]
    summary = {
        'command': 'check',
        'suite': config['suite'],
        'passed': len(results) - len(failed),
        'failed': len(failed),
    }

    for result in failed:
        sys.stderr.write('FAILED: %s\n  %s\n' % (result.name, result.detail))

    if failed:
        summary['failures'] = [r.name for r in failed]
        raise CommandFailed(summary)

    return summary


COMMANDS = {
    'solve': cmd_solve,
    'energy': cmd_energy,
    'blowup': cmd_blowup,
    'classify2d': cmd_classify2d,
    'fb': cmd_fb,
    'catenoid': cmd_catenoid,
    'surface': cmd_surface,
    'check': cmd_check,
}


def run(argv=None):
    """Run a subcommand.

    Args:
        argv (list of str, optional):
            The arguments, without the program name. Defaults to
            ``sys.argv[1:]``.

    Returns:
        int:
        The exit status.
    """
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s')

    threads = args.threads

    if threads is None:
        threads = os.cpu_count()

    try:
        config = RunConfig.load(args.command, args.config, _flags(args))
        summary = COMMANDS[args.command](config, threads=threads)
        status = EXIT_OK
    except CommandFailed as e:
        summary = e.summary
        status = e.status
    except ValueError as e:
        sys.stderr.write('flamelab: %s\n' % e)
        return EXIT_CONFIG
    except OSError as e:
        sys.stderr.write('flamelab: %s\n' % e)
        return EXIT_IO

    sys.stdout.write('%s\n' % dump_json(summary))

    return status


def main():
    """Entry point for the ``flamelab`` console script."""
    sys.exit(run())
