"""Finite-difference solver for the singular perturbation problem.

The discrete problem is ``Delta_h u = beta_eps(u)`` on the interior nodes of
a :py:class:`~flamelab.fields.GridSpec`, with the Dirichlet node values held
fixed. It is solved by nonlinear relaxation: each visited node is moved to
the root of its own stencil equation, which is a coordinate descent step on
the discrete energy J_eps.
"""

import logging
import math

import numpy as np
from scipy import ndimage

from flamelab.errors import (ConvergenceError,
                             InvalidDomainError,
                             InvalidPairError,
                             InvalidParameterError,
                             InvalidTestFunctionError)
from flamelab.fields import GridSpec
from flamelab.mollifier import (eval_B,
                                eval_beta,
                                eval_beta_prime,
                                mass as profile_mass)


logger = logging.getLogger('flamelab')


class SolverConfig(object):
    """Options for :py:func:`solve_peps`.

    Attributes:
        tol_residual (float):
            The discrete L-infinity residual to reach, or ``None`` for the
            default of ``1e-8 / h**2``.

        max_iterations (int):
            The maximum number of sweeps per eps value.

        sweep (str):
            :py:attr:`SWEEP_RED_BLACK` or :py:attr:`SWEEP_LEXICOGRAPHIC`.

        continuation (list of float):
            An optional strictly decreasing eps ladder used for warm starts.

        omega (float):
            The over-relaxation factor, or ``None`` for the optimal factor of
            the grid Laplacian.

        check_every (int):
            The number of sweeps between residual checks.
    """

    #: Vectorized updates of the two checkerboard colors.
    SWEEP_RED_BLACK = 'red_black'

    #: Node-by-node updates in row-major order.
    SWEEP_LEXICOGRAPHIC = 'lexicographic'

    SWEEPS = (SWEEP_RED_BLACK, SWEEP_LEXICOGRAPHIC)

    def __init__(self, tol_residual=None, max_iterations=50000,
                 sweep=SWEEP_RED_BLACK, continuation=None, omega=None,
                 check_every=10):
        """Initialize the options.

        Args:
            tol_residual (float, optional):
                The residual tolerance.

            max_iterations (int, optional):
                The sweep limit.

            sweep (str, optional):
                The sweep ordering.

            continuation (list of float, optional):
                The eps ladder.

            omega (float, optional):
                The over-relaxation factor, in ``(0, 2)``.

            check_every (int, optional):
                Sweeps between residual checks.

        Raises:
            flamelab.errors.InvalidParameterError:
                One of the options was out of range.
        """
        if tol_residual is not None and not tol_residual > 0:
            raise InvalidParameterError('tol_residual', tol_residual,
                                        'a positive number')

        if int(max_iterations) < 1:
            raise InvalidParameterError('max_iterations', max_iterations,
                                        'a positive integer')

        if sweep not in self.SWEEPS:
            raise InvalidParameterError('sweep', sweep,
                                        'one of %s' % ', '.join(self.SWEEPS))

        if continuation is not None:
            continuation = [float(value) for value in continuation]

            if any(not value > 0 for value in continuation):
                raise InvalidParameterError('continuation', continuation,
                                            'positive eps values')

            if any(b >= a for a, b in zip(continuation, continuation[1:])):
                raise InvalidParameterError('continuation', continuation,
                                            'a strictly decreasing ladder')

        if omega is not None and not 0 < omega < 2:
            raise InvalidParameterError('omega', omega,
                                        'a number in (0, 2)')

        self.tol_residual = tol_residual
        self.max_iterations = int(max_iterations)
        self.sweep = sweep
        self.continuation = continuation
        self.omega = omega
        self.check_every = max(1, int(check_every))

    def get_tolerance(self, spacing):
        """Return the residual tolerance for a grid step.

        Args:
            spacing (float):
                The grid step h.

        Returns:
            float:
            The tolerance.
        """
        if self.tol_residual is not None:
            return self.tol_residual

        return 1e-8 / (spacing * spacing)

    def get_omega(self, shape):
        """Return the over-relaxation factor for a grid shape.

        Args:
            shape (tuple of int):
                The grid shape.

        Returns:
            float:
            The factor.
        """
        if self.omega is not None:
            return self.omega

        return 2.0 / (1.0 + math.sin(math.pi / (max(shape) - 1)))


def laplacian(field):
    """Return the discrete Laplacian on the interior nodes.

    Args:
        field (flamelab.fields.ScalarField):
            The field.

    Returns:
        numpy.ndarray:
        The 3/5/7-point Laplacian, NaN on non-interior nodes.
    """
    u = field.values
    h = field.spacing
    lap = np.full(u.shape, np.nan)
    interior = field.interior
    lap[interior] = ((_neighbor_sum(u)[interior] -
                      2 * field.dim * u[interior]) / (h * h))

    return lap


def residual(field, profile, eps):
    """Return the discrete residual of the equation.

    Args:
        field (flamelab.fields.ScalarField):
            The field.

        profile (flamelab.mollifier.BetaProfile):
            The reaction profile.

        eps (float):
            The positive scale parameter.

    Returns:
        float:
        The L-infinity norm of ``Delta_h u - beta_eps(u)`` over interior
        nodes.
    """
    interior = field.interior

    if not np.any(interior):
        raise InvalidDomainError('The field has no interior nodes.')

    u = field.values[interior]
    r = laplacian(field)[interior] - eval_beta(profile, u, eps)

    return float(np.max(np.abs(r)))


def solve_peps(boundary, profile, eps, config=None):
    """Solve ``Delta u = beta_eps(u)`` with Dirichlet data.

    The Dirichlet node values of ``boundary`` are the boundary data. Its
    interior values are the initial guess. When the configuration has an eps
    ladder, every ladder value above ``eps`` is solved first, largest first,
    each warm-starting the next.

    Args:
        boundary (flamelab.fields.ScalarField):
            The boundary trace and initial guess.

        profile (flamelab.mollifier.BetaProfile):
            The reaction profile.

        eps (float):
            The positive scale parameter.

        config (SolverConfig, optional):
            The solver options.

    Returns:
        flamelab.fields.ScalarField:
        The solved field, tagged with eps, the profile and its mass.

    Raises:
        flamelab.errors.ConvergenceError:
            The residual tolerance was not reached. The error carries the
            last iterate.

        flamelab.errors.InvalidDomainError:
            The domain has no interior or no Dirichlet nodes.

        flamelab.errors.InvalidParameterError:
            ``eps`` was not positive.
    """
    if not eps > 0:
        raise InvalidParameterError('eps', eps, 'a positive number')

    if config is None:
        config = SolverConfig()

    mask = boundary.mask

    if not np.any(mask == GridSpec.INTERIOR):
        raise InvalidDomainError('The domain has no interior nodes.')

    if not np.any(mask == GridSpec.DIRICHLET):
        raise InvalidDomainError('The domain has no Dirichlet nodes.')

    ladder = [value for value in (config.continuation or []) if value > eps]
    ladder.append(eps)

    u = np.array(boundary.values, dtype=float)

    for step_eps in ladder:
        logger.info('Solving at eps=%g on a %s grid (h=%g)',
                    step_eps, 'x'.join(str(n) for n in boundary.shape),
                    boundary.spacing)
        u = _solve_at_eps(boundary, u, profile, step_eps, config)

    return boundary.with_values(u,
                                eps=eps,
                                profile=profile.to_spec(),
                                mass=profile_mass(profile))


def _solve_at_eps(boundary, u, profile, eps, config):
    u = np.array(u, dtype=float)
    grid = boundary.grid
    h = grid.spacing
    dim = grid.dim
    c = 2.0 * dim / (h * h)
    tol = config.get_tolerance(h)
    omega = config.get_omega(grid.shape)
    interior = grid.mask == GridSpec.INTERIOR

    if config.sweep == SolverConfig.SWEEP_RED_BLACK:
        parity = np.indices(grid.shape).sum(axis=0) % 2
        colors = [interior & (parity == 0), interior & (parity == 1)]

        def sweep():
            for color in colors:
                mean = _neighbor_sum(u)[color] / (2 * dim)
                u[color] = _relax(mean, u[color], profile, eps, c, omega)
    else:
        nodes = [tuple(index) for index in np.argwhere(interior)]
        offsets = []

        for axis in range(dim):
            for delta in (-1, 1):
                offset = [0] * dim
                offset[axis] = delta
                offsets.append(tuple(offset))

        def sweep():
            for node in nodes:
                total = 0.0

                for offset in offsets:
                    total += u[tuple(i + d for i, d in zip(node, offset))]

                u[node] = _relax(np.array([total / (2 * dim)]),
                                 np.array([u[node]]),
                                 profile, eps, c, omega)[0]

    res = _interior_residual(u, interior, h, dim, profile, eps)
    iterations = 0

    while res > tol:
        if iterations >= config.max_iterations or not math.isfinite(res):
            logger.warning('No convergence at eps=%g after %d sweeps '
                           '(residual %g)', eps, iterations, res)
            raise ConvergenceError(res, iterations, tol,
                                   field=_partial_field(boundary, u, profile,
                                                        eps))

        batch = min(config.check_every, config.max_iterations - iterations)

        for i in range(batch):
            sweep()

        iterations += batch
        res = _interior_residual(u, interior, h, dim, profile, eps)
        logger.debug('eps=%g sweep %d: residual %g', eps, iterations, res)

    logger.info('Converged at eps=%g after %d sweeps (residual %g)',
                eps, iterations, res)

    return u


def _partial_field(boundary, u, profile, eps):
    values = np.where(np.isfinite(u), u, 0.0)

    return boundary.with_values(values, eps=eps, profile=profile.to_spec(),
                                mass=profile.mass)


def _interior_residual(u, interior, h, dim, profile, eps):
    values = u[interior]
    lap = (_neighbor_sum(u)[interior] - 2 * dim * values) / (h * h)

    return float(np.max(np.abs(lap - eval_beta(profile, values, eps))))


def _relax(mean, current, profile, eps, c, omega):
    """Return relaxed values for nodes with the given neighbor means.

    Nodes whose solution lies outside the reaction band use the linear
    over-relaxed update. Nodes inside the band are moved to the root of
    ``c (mean - u) = beta_eps(u)`` without over-relaxation.
    """
    target = np.array(mean, dtype=float)
    active = (mean > 0.0) & (mean < eps)

    if np.any(active):
        target[active] = _pointwise_root(mean[active], current[active],
                                         profile, eps, c)

    weight = np.where(active, 1.0, omega)

    return current + weight * (target - current)


def _pointwise_root(mean, guess, profile, eps, c):
    """Solve ``c (u - mean) + beta_eps(u) = 0`` for u in ``[0, mean]``.

    Uses Newton's method safeguarded by bisection on the bracket.
    """
    lo = np.zeros_like(mean)
    hi = mean.copy()

    f_lo = -c * mean + eval_beta(profile, lo, eps)
    at_zero = f_lo >= 0.0

    u = np.clip(guess, lo, hi)

    with np.errstate(divide='ignore', invalid='ignore'):
        for i in range(60):
            f = c * (u - mean) + eval_beta(profile, u, eps)
            fp = c + eval_beta_prime(profile, u, eps)

            below = f < 0.0
            lo = np.where(below, u, lo)
            hi = np.where(below, hi, u)

            newton = u - f / fp
            ok = (fp > 0.0) & (newton >= lo) & (newton <= hi)
            u_next = np.where(f == 0.0, u,
                              np.where(ok, newton, 0.5 * (lo + hi)))

            step = np.max(np.abs(u_next - u))
            u = u_next

            if step <= 1e-15 * eps:
                break

    return np.where(at_zero, 0.0, u)


def _neighbor_sum(u):
    total = np.zeros_like(u)
    ndim = u.ndim

    for axis in range(ndim):
        lo = _axis_slice(ndim, axis, slice(None, -1))
        hi = _axis_slice(ndim, axis, slice(1, None))
        total[lo] += u[hi]
        total[hi] += u[lo]

    return total


def _axis_slice(ndim, axis, index):
    sl = [slice(None)] * ndim
    sl[axis] = index

    return tuple(sl)


def quadrature_weights(grid):
    """Return nodal quadrature weights over the domain of a grid.

    Box domains use the composite trapezoid rule over all nodes. Ball
    domains weight each interior node by ``h**N``.

    Args:
        grid (flamelab.fields.GridSpec):
            The grid.

    Returns:
        numpy.ndarray:
        The weights.
    """
    h = grid.spacing

    if grid.domain == GridSpec.DOMAIN_BALL:
        return np.where(grid.mask == GridSpec.INTERIOR, h ** grid.dim, 0.0)

    weights = np.ones(grid.shape)

    for axis in range(grid.dim):
        line = np.full(grid.shape[axis], h)
        line[0] = line[-1] = 0.5 * h
        shape = [1] * grid.dim
        shape[axis] = -1
        weights = weights * line.reshape(shape)

    return weights


def energy_J(field, profile, eps):
    """Return the discrete energy J_eps of a field.

    Args:
        field (flamelab.fields.ScalarField):
            The field.

        profile (flamelab.mollifier.BetaProfile):
            The reaction profile.

        eps (float):
            The positive scale parameter.

    Returns:
        float:
        The quadrature of ``|grad u|**2 / 2 + B(u / eps)``.
    """
    if not eps > 0:
        raise InvalidParameterError('eps', eps, 'a positive number')

    weights = quadrature_weights(field.grid)
    used = weights > 0
    grad = field.gradient()[used]
    u = field.values[used]
    density = (0.5 * np.sum(grad * grad, axis=-1) +
               eval_B(profile, u / eps))

    return float(np.sum(weights[used] * density))


def domain_variation_residual(field, profile, eps, phi):
    """Return the defect of the domain variation identity.

    This is::

        int (|grad u|**2 / 2 + B(u / eps)) d_1 phi
            - int sum_k d_k u d_1 u d_k phi

    which vanishes for solutions when phi has compact support.

    Args:
        field (flamelab.fields.ScalarField):
            The solved field.

        profile (flamelab.mollifier.BetaProfile):
            The reaction profile.

        eps (float):
            The positive scale parameter.

        phi (flamelab.fields.ScalarField):
            The test function, on the same grid.

    Returns:
        float:
        The left-hand side minus the right-hand side.

    Raises:
        flamelab.errors.InvalidPairError:
            ``phi`` is on a different grid.

        flamelab.errors.InvalidTestFunctionError:
            ``phi`` does not vanish within 2 cells of the domain boundary.
    """
    if not field.grid.same_grid(phi.grid):
        raise InvalidPairError('The test function must share the grid of '
                               'the field.')

    margin = 2
    outside = field.mask != GridSpec.INTERIOR
    band = ndimage.binary_dilation(
        outside,
        structure=ndimage.generate_binary_structure(field.dim, field.dim),
        iterations=margin)
    phi_values = np.where(np.isfinite(phi.values), phi.values, 0.0)
    scale = max(1.0, float(np.max(np.abs(phi_values))))
    leak = float(np.max(np.abs(phi_values[band]), initial=0.0))

    if leak > 1e-14 * scale:
        raise InvalidTestFunctionError(margin, leak)

    interior = field.interior
    h = field.spacing
    grad_u = field.gradient()[interior]
    grad_phi = phi.with_values(phi_values).gradient()[interior]
    u = field.values[interior]

    energy = 0.5 * np.sum(grad_u * grad_u, axis=-1) + eval_B(profile, u / eps)
    lhs = np.sum(energy * grad_phi[:, 0])
    rhs = np.sum(np.sum(grad_u * grad_phi, axis=-1) * grad_u[:, 0])

    return float((lhs - rhs) * h ** field.dim)


def transition_gradient_max(field, eps):
    """Return the largest node gradient inside the reaction band.

    Args:
        field (flamelab.fields.ScalarField):
            The solved field.

        eps (float):
            The scale parameter the field was solved with.

    Returns:
        float:
        The maximum of ``|grad_h u|`` over interior nodes with
        ``0 < u < eps``, or NaN if the band holds no nodes.
    """
    u = field.values
    band = field.interior & (u > 0) & (u < eps)

    if not np.any(band):
        logger.warning('No interior nodes lie in the band 0 < u < %g', eps)
        return float('nan')

    return float(np.max(np.linalg.norm(field.gradient()[band], axis=-1)))


def interior_lipschitz(field, fraction=0.5):
    """Return the largest node gradient over a concentric subdomain.

    The subdomain is the ball of radius ``fraction * R`` for ball domains,
    or the box scaled by ``fraction`` about its center for box domains.

    Args:
        field (flamelab.fields.ScalarField):
            The field.

        fraction (float, optional):
            The relative size of the subdomain.

    Returns:
        float:
        The maximum of ``|grad_h u|`` over interior nodes of the subdomain.
    """
    grid = field.grid
    x = grid.coordinates()

    if grid.domain == GridSpec.DOMAIN_BALL:
        inner = (np.linalg.norm(x - grid.center, axis=-1) <=
                 fraction * grid.radius)
    else:
        center = 0.5 * (grid.origin + grid.upper)
        half = 0.5 * (grid.upper - grid.origin)
        inner = np.all(np.abs(x - center) <= fraction * half, axis=-1)

    inner &= field.interior

    return float(np.max(np.linalg.norm(field.gradient()[inner], axis=-1)))
