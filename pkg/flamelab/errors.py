"""Errors raised by flamelab."""


class InvalidParameterError(ValueError):
    """An error for when a numeric parameter is outside its valid range."""

    def __init__(self, name, value, expected):
        """Initialize the error.

        Args:
            name (str):
                The name of the parameter.

            value (object):
                The value that was provided.

            expected (str):
                A description of what was expected.
        """
        super(InvalidParameterError, self).__init__(
            'Invalid value %r for %s: expected %s.'
            % (value, name, expected))

        self.name = name
        self.value = value


class InvalidProfileError(ValueError):
    """An error for when a reaction profile cannot be used."""


class InvalidDomainError(ValueError):
    """An error for when a domain mask and its boundary trace disagree."""


class InvalidTestFunctionError(ValueError):
    """An error for when a test function is not compactly supported.

    Test functions used for domain variations must vanish on a margin of
    nodes along the edge of the domain.
    """

    def __init__(self, margin, max_value):
        """Initialize the error.

        Args:
            margin (int):
                The number of cells that were required to be zero.

            max_value (float):
                The largest absolute value found inside the margin.
        """
        super(InvalidTestFunctionError, self).__init__(
            'The test function must vanish within %d cells of the domain '
            'boundary, but reaches %.3g there.'
            % (margin, max_value))


class OutOfDomainError(ValueError):
    """An error for when sample points leave the domain of a field."""

    def __init__(self, what, count):
        """Initialize the error.

        Args:
            what (str):
                A description of the sampled region.

            count (int):
                The number of sample points outside the domain.
        """
        super(OutOfDomainError, self).__init__(
            'The %s leaves the field domain (%d sample points outside, '
            'including the required margin).'
            % (what, count))


class InvalidPairError(ValueError):
    """An error for when two fields do not share a grid."""


class PoleError(ValueError):
    """An error for evaluating a spherical formula at a coordinate pole."""

    def __init__(self, theta):
        """Initialize the error.

        Args:
            theta (float):
                The offending polar angle.
        """
        super(PoleError, self).__init__(
            'The polar angle %r lies on a pole of the logarithmic '
            'singularity; it must be strictly inside (0, pi).'
            % theta)


class InsufficientStencilError(ValueError):
    """An error for when a spherical node lacks a full one-ring stencil."""

    def __init__(self, j, k):
        """Initialize the error.

        Args:
            j (int):
                The polar index of the node.

            k (int):
                The azimuthal index of the node.
        """
        super(InsufficientStencilError, self).__init__(
            'Node (%d, %d) is adjacent to the edge of the polar grid and '
            'has no complete one-ring stencil.'
            % (j, k))


class InvalidBoundaryError(ValueError):
    """An error for when a support boundary curve does not have g = 0."""


class EmptySurfaceError(ValueError):
    """An error for when a spherical function has no positive support."""


class ConvergenceError(ArithmeticError):
    """An error for when an iterative solve does not reach its tolerance.

    Attributes:
        residual (float):
            The last residual that was computed.

        iterations (int):
            The number of sweeps that were performed.

        field (flamelab.fields.ScalarField):
            The last iterate, so callers can still write a summary.
    """

    def __init__(self, residual, iterations, tolerance, field=None):
        """Initialize the error.

        Args:
            residual (float):
                The last residual that was computed.

            iterations (int):
                The number of sweeps that were performed.

            tolerance (float):
                The residual tolerance that was requested.

            field (flamelab.fields.ScalarField, optional):
                The last iterate.
        """
        super(ConvergenceError, self).__init__(
            'The solver did not converge after %d sweeps: the residual is '
            '%.6g, but %.6g was requested.'
            % (iterations, residual, tolerance))

        self.residual = residual
        self.iterations = iterations
        self.tolerance = tolerance
        self.field = field


class ConfigError(ValueError):
    """An error in a run configuration.

    These map to exit status 2 on the command line.
    """

    def __init__(self, key, msg):
        """Initialize the error.

        Args:
            key (str):
                The configuration key that was invalid.

            msg (str):
                A description of the problem.
        """
        super(ConfigError, self).__init__('Invalid configuration for "%s": %s'
                                          % (key, msg))

        self.key = key
