"""Common utility functions used by flamelab."""

import json
import math

import numpy as np


def format_float(value):
    """Format a float with 17 significant digits.

    This is enough digits to round-trip any IEEE-754 double, which keeps
    regression diffs of written tables exact.

    Args:
        value (float):
            The value to format.

    Returns:
        str:
        The formatted value. Non-finite values are written as ``NaN``,
        ``Infinity`` or ``-Infinity``.
    """
    value = float(value)

    if math.isnan(value):
        return 'NaN'
    elif math.isinf(value):
        if value > 0:
            return 'Infinity'
        else:
            return '-Infinity'

    return '%.17g' % value


def dump_json(obj, indent=None):
    """Serialize an object to JSON text.

    numpy scalars and arrays are converted to plain Python values first.
    Floats are written with :py:func:`repr`, which round-trips every
    IEEE-754 double. Non-finite values are written as ``NaN``, ``Infinity``
    or ``-Infinity``.

    Args:
        obj (object):
            The object to serialize.

        indent (int, optional):
            The indentation for nested containers. ``None`` writes a single
            line.

    Returns:
        str:
        The JSON text.

    Raises:
        TypeError:
            The object contains a value that cannot be serialized.
    """
    return json.dumps(obj, indent=indent, default=_to_json_value)


def _to_json_value(obj):
    if isinstance(obj, (np.ndarray, np.generic)):
        return obj.tolist()

    raise TypeError('%r cannot be serialized to JSON.' % (obj,))


def parse_vector(text):
    """Parse a comma-separated vector such as ``0.1,0,-0.2``.

    Args:
        text (str):
            The text to parse.

    Returns:
        numpy.ndarray:
        The parsed vector.

    Raises:
        ValueError:
            The text could not be parsed.
    """
    try:
        return np.array([float(part) for part in text.split(',')])
    except ValueError:
        raise ValueError('"%s" is not a comma-separated list of numbers.'
                         % text)


def parse_range(text):
    """Parse a range such as ``0.1:0.45:20`` into evenly spaced values.

    Args:
        text (str):
            The range, written as ``start:stop:count``. A single number is
            treated as a one-element range.

    Returns:
        numpy.ndarray:
        The values, including both endpoints.

    Raises:
        ValueError:
            The text could not be parsed.
    """
    parts = text.split(':')

    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        elif len(parts) == 3:
            return np.linspace(float(parts[0]), float(parts[1]),
                               int(parts[2]))
    except ValueError:
        pass

    raise ValueError('"%s" is not a range of the form start:stop:count.'
                     % text)


def write_csv(path, header_comment, columns, rows):
    """Write a numeric table as CSV text.

    Args:
        path (str):
            The destination path.

        header_comment (dict):
            Metadata written as a leading ``#`` comment row.

        columns (list of str):
            The column names.

        rows (list of tuple):
            The numeric rows.
    """
    with open(path, 'w') as fp:
        fp.write('# %s\n'
                 % ', '.join('%s=%s' % (key, _format_cell(value))
                             for key, value in header_comment.items()))
        fp.write('%s\n' % ','.join(columns))

        for row in rows:
            fp.write('%s\n' % ','.join(_format_cell(value) for value in row))


def _format_cell(value):
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    elif isinstance(value, (list, tuple, np.ndarray)):
        return ' '.join(_format_cell(v) for v in value)

    return str(value)
