"""Unit tests for flamelab.utils."""

import json
import math

import numpy as np

from flamelab.tests.base import TestCase
from flamelab.utils import dump_json, format_float, parse_range


class DumpJSONTests(TestCase):
    """Unit tests for flamelab.utils.dump_json."""

    def test_control_characters(self):
        """Testing dump_json with control characters in strings"""
        data = {
            'out': 'out\rdir/u.fld',
            'error': 'bad\x00value\x1f\ttab\nline "quoted" \\',
        }

        self.assertEqual(json.loads(dump_json(data)), data)
        self.assertEqual(json.loads(dump_json(data, indent=2)), data)

    def test_numpy_values(self):
        """Testing dump_json with numpy scalars and arrays"""
        data = json.loads(dump_json({
            'shape': np.array([9, 9]),
            'count': np.int64(3),
            'passed': np.bool_(True),
            'values': np.array([[0.5, 1.5], [2.5, 3.5]]),
            'single': np.float32(0.25),
        }))

        self.assertEqual(data, {
            'shape': [9, 9],
            'count': 3,
            'passed': True,
            'values': [[0.5, 1.5], [2.5, 3.5]],
            'single': 0.25,
        })

    def test_float_round_trip(self):
        """Testing dump_json keeps every digit of a float"""
        values = [math.pi, 0.1, 1.0 / 3.0, np.float64(2.0) ** 0.5, 1e-300]

        self.assertEqual(json.loads(dump_json(values)),
                         [float(value) for value in values])

    def test_non_finite(self):
        """Testing dump_json with non-finite floats"""
        text = dump_json([float('nan'), float('inf'), -np.inf])

        self.assertEqual(text, '[NaN, Infinity, -Infinity]')

    def test_unsupported(self):
        """Testing dump_json with an unsupported value"""
        with self.assertRaises(TypeError):
            dump_json({'value': object()})


class FormatTests(TestCase):
    """Unit tests for flamelab.utils formatting and parsing helpers."""

    def test_format_float(self):
        """Testing format_float"""
        self.assertEqual(float(format_float(math.pi)), math.pi)
        self.assertEqual(format_float(float('nan')), 'NaN')
        self.assertEqual(format_float(-float('inf')), '-Infinity')

    def test_parse_range(self):
        """Testing parse_range"""
        self.assertAllClose(parse_range('0.1:0.3:3'), [0.1, 0.2, 0.3])
        self.assertAllClose(parse_range('0.5'), [0.5])

        with self.assertRaises(ValueError):
            parse_range('0.1:0.3')
