"""Unit tests for flamelab.config."""

import json
import math
import os

import numpy as np

from flamelab.config import RunConfig, make_boundary, read_config_file
from flamelab.errors import ConfigError
from flamelab.fields import GridSpec
from flamelab.solver import SolverConfig
from flamelab.tests.base import TestCase


class RunConfigTests(TestCase):
    """Unit tests for flamelab.config.RunConfig."""

    def _write_config(self, document):
        path = os.path.join(self.make_tempdir(), 'run.json')

        with open(path, 'w') as fp:
            json.dump(document, fp)

        return path

    def test_defaults(self):
        """Testing RunConfig.load with only defaults"""
        config = RunConfig.load('solve')

        self.assertEqual(config['n'], 129)
        self.assertEqual(config['boundary'], {'kind': 'half_plane'})
        self.assertEqual(set(config.sources.values()), {'default'})
        self.assertIsNone(config.get('ladder'))
        self.assertEqual(config.get('ladder', [0.1]), [0.1])

    def test_precedence(self):
        """Testing RunConfig.load resolves flags over file over defaults"""
        path = self._write_config({'n': 33, 'eps': 0.1})
        config = RunConfig.load('solve', path, {'eps': 0.2, 'n': None,
                                                'dim': None})

        self.assertEqual(config['n'], 33)
        self.assertEqual(config['eps'], 0.2)
        self.assertEqual(config['dim'], 2)
        self.assertEqual(config.sources['n'], 'file')
        self.assertEqual(config.sources['eps'], 'flag')
        self.assertEqual(config.sources['dim'], 'default')

    def test_command_section(self):
        """Testing RunConfig.load with settings under the command name"""
        path = self._write_config({'solve': {'n': 17}})

        self.assertEqual(RunConfig.load('solve', path)['n'], 17)

    def test_unknown_key(self):
        """Testing RunConfig.load with an unknown key"""
        path = self._write_config({'n': 17, 'colour': 'blue'})

        with self.assertRaises(ConfigError) as ctx:
            RunConfig.load('solve', path)

        self.assertEqual(ctx.exception.key, 'colour')

    def test_unknown_command(self):
        """Testing RunConfig with an unknown subcommand"""
        with self.assertRaises(ConfigError) as ctx:
            RunConfig('ignite')

        self.assertEqual(ctx.exception.key, 'command')

    def test_ladder(self):
        """Testing RunConfig.load parses the continuation ladder"""
        config = RunConfig.load('solve', flags={'ladder': '0.4,0.2',
                                                'eps': 0.1})

        self.assertEqual(config['ladder'], [0.4, 0.2])
        self.assertEqual(config.solver_config().continuation, [0.4, 0.2])

    def test_ladder_ascending(self):
        """Testing RunConfig.load with an ascending ladder"""
        for ladder in ('0.1,0.2', [0.3, 0.3], '0.2,-0.1', '0.2,fast'):
            with self.assertRaises(ConfigError) as ctx:
                RunConfig.load('solve', flags={'ladder': ladder})

            self.assertEqual(ctx.exception.key, 'ladder')

    def test_positive_values(self):
        """Testing RunConfig.load with nonpositive numbers"""
        for key, value in (('eps', 0.0), ('eps', -1.0), ('tol_residual',
                                                         'x')):
            with self.assertRaises(ConfigError) as ctx:
                RunConfig.load('solve', flags={key: value})

            self.assertEqual(ctx.exception.key, key)

        with self.assertRaises(ConfigError) as ctx:
            RunConfig.load('fb', flags={'level_tol': -0.1})

        self.assertEqual(ctx.exception.key, 'level_tol')

    def test_solve_choices(self):
        """Testing RunConfig.load with invalid solve settings"""
        for key, value in (('dim', 4), ('n', 2), ('domain', 'torus'),
                           ('boundary', 'parabola'),
                           ('boundary', {'kind': 'custom_table'}),
                           ('sweep', 'diagonal')):
            with self.assertRaises(ConfigError) as ctx:
                RunConfig.load('solve', flags={key: value})

            self.assertEqual(ctx.exception.key, key)

    def test_boundary_string(self):
        """Testing RunConfig.load expands a boundary kind string"""
        config = RunConfig.load('solve', flags={'boundary': 'wedge'})

        self.assertEqual(config['boundary'], {'kind': 'wedge'})

    def test_other_commands(self):
        """Testing RunConfig.load validates the energy and check settings"""
        with self.assertRaises(ConfigError):
            RunConfig.load('energy', flags={'mode': 'both'})

        with self.assertRaises(ConfigError):
            RunConfig.load('check', flags={'suite': 'slow'})

        self.assertEqual(RunConfig.load('check')['suite'], 'fast')

    def test_grid(self):
        """Testing RunConfig.grid"""
        box = RunConfig.load('solve', flags={'n': 17, 'half_width': 2.0})
        grid = box.grid()

        self.assertEqual(grid.shape, (17, 17))
        self.assertAlmostEqual(grid.spacing, 0.25)

        ball = RunConfig.load('solve', flags={'n': 21, 'domain': 'ball',
                                              'radius': 0.5}).grid()
        self.assertEqual(ball.domain, GridSpec.DOMAIN_BALL)
        self.assertAlmostEqual(ball.spacing, 0.05)

    def test_solver_config(self):
        """Testing RunConfig.solver_config"""
        solver = RunConfig.load('solve', flags={
            'sweep': 'lexicographic', 'max_iterations': 100}).solver_config()

        self.assertEqual(solver.sweep, SolverConfig.SWEEP_LEXICOGRAPHIC)
        self.assertEqual(solver.max_iterations, 100)

    def test_profile(self):
        """Testing RunConfig.profile"""
        self.assertEqual(RunConfig.load('solve').profile().to_spec(), 'poly')

        config = RunConfig.load('solve', flags={
            'profile': os.path.join(self.make_tempdir(), 'missing.csv')})

        with self.assertRaises(ConfigError) as ctx:
            config.profile()

        self.assertEqual(ctx.exception.key, 'profile')


class ReadConfigFileTests(TestCase):
    """Unit tests for flamelab.config.read_config_file."""

    def test_missing(self):
        """Testing read_config_file with a missing file"""
        with self.assertRaises(ConfigError) as ctx:
            read_config_file(os.path.join(self.make_tempdir(), 'none.json'))

        self.assertEqual(ctx.exception.key, 'config')

    def test_not_object(self):
        """Testing read_config_file with a JSON list"""
        path = os.path.join(self.make_tempdir(), 'list.json')

        with open(path, 'w') as fp:
            fp.write('[1, 2]')

        with self.assertRaises(ConfigError):
            read_config_file(path)

    def test_malformed(self):
        """Testing read_config_file with malformed JSON"""
        path = os.path.join(self.make_tempdir(), 'bad.json')

        with open(path, 'w') as fp:
            fp.write('{"n": ')

        with self.assertRaises(ConfigError):
            read_config_file(path)


class MakeBoundaryTests(TestCase):
    """Unit tests for flamelab.config.make_boundary."""

    def test_half_plane_profile_mass(self):
        """Testing make_boundary takes the half-plane mass from the profile"""
        grid = GridSpec.centered_box(2, 9)
        field = make_boundary({'kind': 'half_plane'}, grid,
                              self.make_profile())

        self.assertEqual(field.mass, 1.0)
        self.assertAlmostEqual(float(field.values[-1, 0]), math.sqrt(2.0))
        self.assertEqual(float(field.values[0, 0]), 0.0)

    def test_explicit_parameters(self):
        """Testing make_boundary with explicit family parameters"""
        grid = GridSpec.centered_box(2, 9)
        field = make_boundary({'kind': 'two_plane', 'alpha': 2.0,
                               'beta': 1.0, 'normal': [0.0, 1.0]}, grid)

        self.assertAlmostEqual(float(field.values[0, -1]), 2.0)
        self.assertAlmostEqual(float(field.values[0, 0]), -1.0)

    def test_invalid_parameters(self):
        """Testing make_boundary with missing family parameters"""
        with self.assertRaises(ConfigError):
            make_boundary({'kind': 'wedge'}, GridSpec.centered_box(2, 9))

    def _write_table(self, header, rows):
        path = os.path.join(self.make_tempdir(), 'boundary.csv')

        with open(path, 'w') as fp:
            fp.write(header + '\n')

            for row in rows:
                fp.write(','.join('%r' % value for value in row) + '\n')

        return path

    def test_custom_table(self):
        """Testing make_boundary interpolates a custom table"""
        corners = [(x, y) for x in (-1.5, 1.5) for y in (-1.5, 1.5)]
        rows = [(x, y, x + 2.0 * y) for x, y in corners + [(0.0, 0.0)]]
        path = self._write_table('x,y,u', rows)
        grid = GridSpec.centered_box(2, 5)
        field = make_boundary({'kind': 'custom_table', 'path': path}, grid)
        coords = grid.coordinates()

        self.assertAllClose(field.values, coords[..., 0] +
                            2.0 * coords[..., 1], atol=1e-12)

    def test_custom_table_1d(self):
        """Testing make_boundary interpolates a custom table in 1D"""
        path = self._write_table('x,u', [(1.0, 3.0), (-1.0, 1.0)])
        grid = GridSpec.centered_box(1, 5)
        field = make_boundary({'kind': 'custom_table', 'path': path}, grid)

        self.assertAllClose(field.values, [1.0, 1.5, 2.0, 2.5, 3.0])

    def test_custom_table_columns(self):
        """Testing make_boundary with a table of the wrong width"""
        path = self._write_table('x,u', [(1.0, 3.0), (-1.0, 1.0)])

        with self.assertRaises(ConfigError):
            make_boundary({'kind': 'custom_table', 'path': path},
                          GridSpec.centered_box(2, 5))

    def test_custom_table_missing(self):
        """Testing make_boundary with a missing table"""
        path = os.path.join(self.make_tempdir(), 'none.csv')

        with self.assertRaises(ConfigError):
            make_boundary({'kind': 'custom_table', 'path': path},
                          GridSpec.centered_box(2, 5))
