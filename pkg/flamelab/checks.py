"""A reproducible suite of invariant checks.

Each check is named by the invariant it verifies. The ``fast`` suite covers
the analytic and closed-form invariants. The ``all`` suite adds the ones
that need gridded fields or solves.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import integrate

from flamelab.blowup import (BlowupClass, FreeBoundarySet,
                             classify_blowup_2d, homogeneity_deviation,
                             label_density_sets, rescale,
                             spherical_mean_bound)
from flamelab.energy import acf_phi, monotonicity_profile, spruck_S_limit
from flamelab.exact import (CATENOID_MASS, AnalyticField, ExactKind,
                            catenoid_f, catenoid_g, catenoid_ode_residual,
                            catenoid_support_identity, catenoid_theta0,
                            make_exact_field, profile_1d)
from flamelab.fields import GridSpec, ScalarField
from flamelab.mollifier import BetaProfile, eval_B, eval_beta, mass
from flamelab.shells import ShellQuadrature
from flamelab.solver import (SolverConfig, domain_variation_residual,
                             interior_lipschitz, solve_peps,
                             transition_gradient_max)
from flamelab.spherical import SphericalFunction
from flamelab.surface import (contact_angle, export_mesh,
                              fundamental_form_grid, immersion_grid,
                              principal_radii, weingarten_grid)


logger = logging.getLogger('flamelab')


SUITE_FAST = 'fast'
SUITE_ALL = 'all'

SUITES = (SUITE_FAST, SUITE_ALL)


class CheckFailure(AssertionError):
    """A violated invariant."""


class Check(object):
    """A named invariant check.

    Attributes:
        name (str):
            The invariant, stated verbatim.

        suite (str):
            The smallest suite that runs the check.

        func (callable):
            Runs the check and returns a detail string. It raises
            :py:class:`CheckFailure` when the invariant is violated.
    """

    def __init__(self, name, suite, func):
        self.name = name
        self.suite = suite
        self.func = func

    def __repr__(self):
        return '<Check(%r)>' % self.name


class CheckResult(object):
    """The outcome of a check.

    Attributes:
        name (str):
            The invariant.

        passed (bool):
            Whether the invariant held.

        detail (str):
            The measured quantities, or the reason for the failure.

        seconds (float):
            The run time.
    """

    def __init__(self, name, passed, detail, seconds):
        self.name = name
        self.passed = passed
        self.detail = detail
        self.seconds = seconds

    def to_json(self):
        """Return a JSON-compatible record of the result."""
        return {
            'name': self.name,
            'passed': self.passed,
            'detail': self.detail,
            'seconds': self.seconds,
        }


CHECKS = []


def check(name, suite=SUITE_FAST):
    """Register a function as an invariant check.

    Args:
        name (str):
            The invariant, stated verbatim.

        suite (str, optional):
            The smallest suite that runs the check.

    Returns:
        callable:
        The decorator.
    """
    def _register(func):
        CHECKS.append(Check(name, suite, func))

        return func

    return _register


def expect(condition, detail):
    """Raise :py:class:`CheckFailure` unless a condition holds.

    Args:
        condition (bool):
            The condition.

        detail (str):
            The measured quantities.
    """
    if not condition:
        raise CheckFailure(detail)


def get_checks(suite=SUITE_FAST):
    """Return the checks of a suite, in registration order.

    Args:
        suite (str, optional):
            ``fast`` or ``all``.

    Returns:
        list of Check:
        The checks.
    """
    if suite == SUITE_ALL:
        return list(CHECKS)

    return [c for c in CHECKS if c.suite == SUITE_FAST]


def run_check(c):
    """Run one check.

    Args:
        c (Check):
            The check.

    Returns:
        CheckResult:
        The outcome. Unexpected errors count as failures.
    """
    start = time.time()

    try:
        detail = c.func()
        passed = True
    except CheckFailure as e:
        detail = str(e)
        passed = False
    except Exception as e:
        logger.exception('Check "%s" raised an error', c.name)
        detail = '%s: %s' % (type(e).__name__, e)
        passed = False

    result = CheckResult(c.name, passed, detail, time.time() - start)

    if passed:
        logger.info('PASS %s (%s)', c.name, detail)
    else:
        logger.error('FAIL %s (%s)', c.name, detail)

    return result


def run_checks(suite=SUITE_FAST, threads=None):
    """Run a suite of checks.

    Args:
        suite (str, optional):
            ``fast`` or ``all``.

        threads (int, optional):
            The number of worker threads.

    Returns:
        list of CheckResult:
        The outcomes, in registration order.
    """
    checks = get_checks(suite)

    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(run_check, checks))

    return [run_check(c) for c in checks]


def _profiles():
    return [BetaProfile(BetaProfile.KIND_POLYNOMIAL_BUMP),
            BetaProfile(BetaProfile.KIND_SMOOTH_BUMP)]


def _catenoid_samples(n_theta, n_phi=None):
    return SphericalFunction.from_function(
        lambda n: catenoid_g(np.arccos(np.clip(n[..., 2], -1.0, 1.0)))[0],
        2, n_theta, n_phi)


def _trace(func, n=512, rotation=0.0):
    thetas = (np.arange(n) + 0.5) * (2.0 * math.pi / n) + rotation

    return SphericalFunction(1, func(thetas))


@check('For every profile and every s, 0 <= eval_B(., s) <= mass(.), and '
       'eval_B is monotone in s')
def check_B_bounds():
    s = np.linspace(-0.5, 1.5, 4001)

    for profile in _profiles():
        values = np.asarray(eval_B(profile, s))
        upper = mass(profile) + 1e-15
        expect(np.all(values >= 0) and np.all(values <= upper),
               '%r leaves [0, M]' % profile)
        expect(np.all(np.diff(values) >= -1e-15),
               '%r is not monotone' % profile)

    return 'sampled %d points per profile' % len(s)


@check('integral of eval_beta(., t, eps) dt = mass(.) for every eps')
def check_beta_mass():
    worst = 0.0

    for profile in _profiles():
        for eps in (1.0, 0.1, 0.01):
            value = integrate.quad(lambda t: eval_beta(profile, t, eps),
                                   0.0, eps, epsabs=1e-13, epsrel=1e-12,
                                   limit=200)[0]
            worst = max(worst, abs(value - mass(profile)))

    expect(worst <= 1e-8, 'largest mass error %.3g' % worst)

    return 'largest mass error %.3g' % worst


@check('eval_beta(., t, eps) >= 0 everywhere')
def check_beta_nonnegative():
    t = np.linspace(-1.0, 2.0, 6001)

    for profile in _profiles():
        expect(np.all(np.asarray(eval_beta(profile, t, 1.0)) >= 0),
               '%r takes negative values' % profile)

    return 'sampled %d points per profile' % len(t)


@check('Catenoid spherical part satisfies the ODE residual '
       '|f\'\' + cot(theta) f\' + 2f| <= 1e-9 on (theta0/2, pi - theta0/2)')
def check_catenoid_ode():
    theta0 = catenoid_theta0()
    thetas = np.linspace(0.5 * theta0, math.pi - 0.5 * theta0, 10000)
    worst = float(np.max(np.abs(catenoid_ode_residual(thetas))))
    expect(worst <= 1e-9, 'largest residual %.3g' % worst)

    return 'largest residual %.3g' % worst


@check('Catenoid support identity: max defect between H with a = 2 and f '
       '<= 1e-12 over theta in [0.1, pi - 0.1]')
def check_support_identity():
    defect = catenoid_support_identity(
        np.linspace(0.1, math.pi - 0.1, 10000))
    expect(defect <= 1e-12, 'defect %.3g' % defect)

    return 'defect %.3g' % defect


@check('theta0 root: |f(theta0)| <= 1e-12 with theta0 in (0, pi/2) and a '
       'bracketing sign change')
def check_theta0():
    theta0 = catenoid_theta0()
    value = catenoid_f(theta0)[0]
    expect(0 < theta0 < 0.5 * math.pi, 'theta0 = %.17g' % theta0)
    expect(abs(value) <= 1e-12, 'f(theta0) = %.3g' % value)
    expect(catenoid_f(theta0 - 1e-3)[0] < 0 < catenoid_f(theta0 + 1e-3)[0],
           'no sign change around theta0')

    return 'theta0 = %.17g' % theta0


@check('Every make_exact_field output is exactly degree-1 homogeneous: '
       'homogeneity_deviation <= 1e-10 on analytic samples')
def check_exact_homogeneity():
    kinds = [(ExactKind(ExactKind.HALF_PLANE, mass=1.0), 2),
             (ExactKind(ExactKind.WEDGE, alpha=0.5), 2),
             (ExactKind(ExactKind.TWO_PLANE, alpha=math.sqrt(3.0), beta=1.0),
              2),
             (ExactKind(ExactKind.HALF_PLANE, mass=1.0), 3),
             (ExactKind(ExactKind.CATENOID), 3)]
    worst = 0.0

    for kind, dim in kinds:
        field = AnalyticField.from_kind(kind, dim)
        quad = ShellQuadrature(dim, 64)
        worst = max(worst, homogeneity_deviation(field, np.zeros(dim),
                                                 0.5, 1.0, quad))

    expect(worst <= 1e-10, 'largest deviation %.3g' % worst)

    return 'largest deviation %.3g' % worst


@check('homogeneity_deviation of u = |x|**2 on the 2D shell [1, 2] is '
       '3 pi +- 1e-6')
def check_quadratic_homogeneity():
    field = AnalyticField(2, lambda x: np.sum(x * x, axis=-1),
                          lambda x: 2.0 * x)
    value = homogeneity_deviation(field, np.zeros(2), 1.0, 2.0,
                                  ShellQuadrature(2, 64))
    expect(abs(value - 3.0 * math.pi) <= 1e-6, 'deviation %.12g' % value)

    return 'deviation %.12g' % value


@check('homogeneity_deviation is invariant under u -> c u up to factor c**2')
def check_homogeneity_scaling():
    def u(x):
        return np.sum(x * x, axis=-1) + x[..., 0]

    def grad(x):
        g = 2.0 * x
        g[..., 0] += 1.0
        return g

    quad = ShellQuadrature(2, 64)
    base = homogeneity_deviation(AnalyticField(2, u, grad), np.zeros(2),
                                 0.5, 1.5, quad)
    scaled = homogeneity_deviation(
        AnalyticField(2, lambda x: 3.0 * u(x), lambda x: 3.0 * grad(x)),
        np.zeros(2), 0.5, 1.5, quad)
    ratio = scaled / base
    expect(abs(ratio - 9.0) <= 1e-10 * 9.0, 'ratio %.17g' % ratio)

    return 'ratio %.17g' % ratio


@check('two_plane(alpha, beta) passes classify_blowup_2d iff '
       'alpha**2 - beta**2 = 2M')
def check_classifier():
    cases = [
        (lambda t: math.sqrt(2.0) * np.maximum(np.cos(t), 0.0),
         BlowupClass.HALF_PLANE),
        (lambda t: 0.5 * np.abs(np.cos(t)), BlowupClass.WEDGE),
        (lambda t: (math.sqrt(3.0) * np.maximum(np.cos(t), 0.0) -
                    np.maximum(-np.cos(t), 0.0)),
         BlowupClass.TWO_PLANE),
        (lambda t: 2.0 * np.maximum(np.cos(t), 0.0) -
         np.maximum(-np.cos(t), 0.0),
         BlowupClass.UNCLASSIFIED),
    ]

    for func, expected in cases:
        result = classify_blowup_2d(_trace(func), 1.0, 1e-3)
        expect(result.variant == expected,
               'expected %s, got %r' % (expected, result))

    return 'classified %d traces' % len(cases)


@check('classify_blowup_2d is invariant under rotation of the sample grid')
def check_classifier_rotation():
    rng = np.random.RandomState(0)
    func = (lambda t: math.sqrt(3.0) * np.maximum(np.cos(t), 0.0) -
            np.maximum(-np.cos(t), 0.0))
    base = classify_blowup_2d(_trace(func), 1.0, 1e-3)

    for rotation in rng.uniform(0.0, 2.0 * math.pi, 4):
        result = classify_blowup_2d(_trace(func, rotation=rotation), 1.0,
                                    1e-3)
        expect(result.variant == base.variant and
               abs(result.alpha - base.alpha) <= 1e-3 and
               abs(result.beta - base.beta) <= 1e-3,
               'rotation %.6g gave %r' % (rotation, result))

    return 'variant %s' % base.variant


@check('Trace identity: radii sum equals mean_residual at every node to '
       '1e-12')
def check_trace_identity():
    g = _catenoid_samples(64)
    W = weingarten_grid(g)[1:-1]
    low, high = principal_radii(W)
    worst = float(np.max(np.abs(low + high - W[..., 0, 0] - W[..., 1, 1])))
    expect(worst <= 1e-12, 'largest gap %.3g' % worst)

    return 'largest gap %.3g' % worst


@check('Zero-degree homogeneity of the gradient: grad u0(x) = '
       'grad u0(x/|x|) for exact catenoid fields at radii {0.5, 1, 2}')
def check_gradient_homogeneity():
    field = AnalyticField.from_kind(ExactKind(ExactKind.CATENOID), 3)
    directions = ShellQuadrature(3, 32).directions
    base = field.gradient_at(directions)
    worst = max(float(np.max(np.abs(field.gradient_at(r * directions) -
                                    base)))
                for r in (0.5, 1.0, 2.0))
    expect(worst <= 1e-10, 'largest deviation %.3g' % worst)

    return 'largest deviation %.3g' % worst


@check('Gradient identity: the gradient of u0 = r g restricted to unit '
       'directions matches immersion_X(g, n)')
def check_gradient_identity():
    g = _catenoid_samples(64)
    X = immersion_grid(g)
    normals = g.normals()
    field = AnalyticField.from_kind(ExactKind(ExactKind.CATENOID), 3)
    inside = g.stencil_valid() & g.support_mask
    gradient = field.gradient_at(normals[inside])
    worst = float(np.max(np.abs(gradient - X[inside])))
    expect(worst <= 1e-2, 'largest deviation %.3g' % worst)

    return 'largest deviation %.3g on %d nodes' % (worst,
                                                   int(np.sum(inside)))


@check('Catenoid unit boundary gradient: |grad u0| = 1 on the free boundary '
       'cone {theta = theta0}, so sqrt(2M) = 1 with M = 1/2')
def check_catenoid_boundary_gradient():
    theta0 = catenoid_theta0()
    field = AnalyticField.from_kind(ExactKind(ExactKind.CATENOID), 3)
    phis = np.linspace(0.0, 2.0 * math.pi, 24, endpoint=False)
    slope = math.sqrt(2.0 * CATENOID_MASS)
    worst = 0.0

    # Approach both nappes of the cone from inside the support.
    for theta in (theta0 + 1e-9, math.pi - theta0 - 1e-9):
        directions = np.stack([math.sin(theta) * np.cos(phis),
                               math.sin(theta) * np.sin(phis),
                               np.full(phis.shape, math.cos(theta))],
                              axis=-1)

        for r in (0.5, 1.0, 2.0):
            norms = np.linalg.norm(field.gradient_at(r * directions),
                                   axis=-1)
            worst = max(worst, float(np.max(np.abs(norms - slope))))

    expect(worst <= 1e-6, 'largest deviation %.3g' % worst)

    return 'largest deviation %.3g' % worst


@check('Catenoid non-degeneracy: r**-2 int_{dB_r} u0 >= sqrt(2M) pi r with '
       'M = 1/2 at radii {0.5, 1, 2}')
def check_catenoid_nondegeneracy():
    field = AnalyticField.from_kind(ExactKind(ExactKind.CATENOID), 3)
    quad = ShellQuadrature(3, 64, 130)
    ratios = []

    for r in (0.5, 1.0, 2.0):
        value, bound = spherical_mean_bound(field, np.zeros(3), r,
                                            CATENOID_MASS, quad)
        ratios.append(value / bound)

    detail = 'value / bound %s' % ', '.join('%.6g' % q for q in ratios)
    expect(min(ratios) >= 1.0, detail)

    return detail


@check('For any input, at most one of {half_density, full_density, '
       'degenerate} is assigned per point')
def check_exclusive_labels():
    field = AnalyticField.from_kind(ExactKind(ExactKind.HALF_PLANE,
                                              mass=1.0), 2)
    points = np.array([[0.0, y] for y in (-0.2, 0.0, 0.2)])
    labeled = label_density_sets(FreeBoundarySet(points), field,
                                 [0.2, 0.1, 0.05], 0.05, mass=1.0,
                                 quad=ShellQuadrature(2, 128))
    expect(len(labeled.labels) == len(points) and
           all(label in FreeBoundarySet.LABELS for label in labeled.labels),
           'labels %r' % labeled.labels)
    expect(all(label == FreeBoundarySet.HALF_DENSITY
               for label in labeled.labels),
           'labels %r' % labeled.labels)

    return 'labels %r' % labeled.labels


@check('Spruck closed forms: spruck_S_limit on sqrt(2M) x1+ with M = 1 '
       'returns 2 pi (2D) and 4 pi (3D) within 1% at h = 1/128 with 256 '
       'angular nodes', SUITE_ALL)
def check_spruck_closed_forms():
    kind = ExactKind(ExactKind.HALF_PLANE, mass=1.0)
    field2 = make_exact_field(kind, GridSpec.centered_box(2, 257, 1.0))
    value2 = spruck_S_limit(field2, np.zeros(2), 0.5, 1.0,
                            ShellQuadrature(2, 256))
    field3 = make_exact_field(kind, GridSpec((153, 153, 153), 1.0 / 128))
    value3 = spruck_S_limit(field3, np.zeros(3), 0.5, 1.0,
                            ShellQuadrature(3, 256))
    detail = 'S = %.8g (2D), %.8g (3D)' % (value2, value3)
    expect(abs(value2 - 2.0 * math.pi) <= 0.01 * 2.0 * math.pi, detail)
    expect(abs(value3 - 4.0 * math.pi) <= 0.01 * 4.0 * math.pi, detail)

    return detail


@check('Scaling covariance: for a degree-1 homogeneous field, S(r) computed '
       'at radii r and 2r agree')
def check_spruck_scaling():
    field = AnalyticField.from_kind(ExactKind(ExactKind.TWO_PLANE,
                                              alpha=math.sqrt(3.0),
                                              beta=1.0), 2)
    quad = ShellQuadrature(2, 256)
    a = spruck_S_limit(field, np.zeros(2), 0.3, 1.0, quad)
    b = spruck_S_limit(field, np.zeros(2), 0.6, 1.0, quad)
    expect(abs(a - b) <= 1e-10 * max(1.0, abs(a)), 'S = %.17g, %.17g'
           % (a, b))

    return 'S = %.17g' % a


@check('ACF constancy: acf_phi(x1+, x1-) = pi**2/4 within 0.5% at three '
       'radii, nondecreasing table, symmetric in (u, v)', SUITE_ALL)
def check_acf():
    grid = GridSpec.centered_box(2, 513, 1.0)
    u = ScalarField.from_function(grid, lambda x: np.maximum(x[..., 0], 0.0))
    v = ScalarField.from_function(grid, lambda x: np.maximum(-x[..., 0],
                                                             0.0))
    target = 0.25 * math.pi ** 2
    values = [acf_phi(u, v, np.zeros(2), r) for r in (0.25, 0.5, 0.75)]
    detail = 'Phi = %s' % ', '.join('%.8g' % value for value in values)

    expect(all(abs(value - target) <= 5e-3 * target for value in values),
           detail)
    expect(all(b - a >= -5e-3 * target
               for a, b in zip(values, values[1:])), detail)
    swapped = acf_phi(v, u, np.zeros(2), 0.5)
    expect(abs(swapped - values[1]) <= 1e-12 * target,
           'Phi(v, u) = %.17g' % swapped)

    return detail


@check('Immersion checks on the catenoid surface at (128, 256): conformal, '
       'minimal, |X| = 1 and contact angle pi/2 on the boundary circles, '
       'ring-type mesh', SUITE_ALL)
def check_catenoid_surface():
    g = _catenoid_samples(128, 256)
    valid = g.stencil_valid(rings=2) & g.support_mask
    W = weingarten_grid(g)
    residual = float(np.max(np.abs(W[..., 0, 0] + W[..., 1, 1])[valid]))
    defect = float(np.max(fundamental_form_grid(g)[3][valid]))
    contacts = contact_angle(g, CATENOID_MASS)
    radii = contacts.radii
    angles = contacts.angles
    mesh = export_mesh(g)
    X = immersion_grid(g)[valid]
    container = math.sqrt(2.0 * CATENOID_MASS)

    detail = ('residual %.3g, defect %.3g, |X| in [%.6g, %.6g], alpha in '
              '[%.6g, %.6g], chi %d, loops %d'
              % (residual, defect, np.min(radii), np.max(radii),
                 np.min(angles), np.max(angles), mesh.euler_characteristic,
                 mesh.boundary_loops))
    expect(residual <= 2e-2 and defect <= 2e-2, detail)
    expect(np.all(np.abs(radii - 1.0) <= 1e-3), detail)
    expect(np.all(np.abs(angles - 0.5 * math.pi) <= 1e-2), detail)
    expect(mesh.euler_characteristic == 0 and mesh.boundary_loops == 2,
           detail)
    expect(np.all(np.linalg.norm(X, axis=-1) <= container + 1e-3), detail)

    return detail


@check('Convergence order: mean_residual and conformality_defect on the '
       'catenoid halve-grid sweep decrease at order >= 1.8', SUITE_ALL)
def check_surface_convergence():
    theta0 = catenoid_theta0()
    residuals = []
    defects = []

    for n in (32, 64, 128):
        g = _catenoid_samples(n)
        inner = ((g.thetas > theta0 + 0.1) &
                 (g.thetas < math.pi - theta0 - 0.1))
        W = weingarten_grid(g)[inner]
        residuals.append(float(np.max(np.abs(W[..., 0, 0] + W[..., 1, 1]))))
        defects.append(float(np.max(fundamental_form_grid(g)[3][inner])))

    orders = [math.log2(a / b) for values in (residuals, defects)
              for a, b in zip(values, values[1:])]
    detail = 'orders %s' % ', '.join('%.3g' % order for order in orders)
    expect(min(orders) >= 1.8, detail)

    return detail


def _profile_bump(grid, width=0.8):
    def func(x):
        s = np.sum(x * x, axis=-1) / (width * width)
        return np.where(s < 1.0, (1.0 - np.minimum(s, 1.0)) ** 3, 0.0)

    return ScalarField.from_function(grid, func)


def _solve_1d(n, eps):
    profile = BetaProfile(BetaProfile.KIND_POLYNOMIAL_BUMP)
    grid = GridSpec.centered_box(1, n, 1.0)
    x = grid.coordinates()[..., 0]
    exact = np.array([profile_1d(profile, eps, value) for value in x])
    guess = np.interp(x, [x[0], x[-1]], [exact[0], exact[-1]])
    boundary = ScalarField(grid, guess)
    field = solve_peps(boundary, profile, eps)

    return profile, grid, field, exact


@check('Solver oracle: 1D solve vs profile_1d, max node error <= '
       '5 (h**2 + eps); domain-variation residual <= 5h and halving under '
       'h -> h/2', SUITE_ALL)
def check_solver_1d():
    eps = 0.02
    residuals = []
    errors = []

    for n in (1025, 2049):
        profile, grid, field, exact = _solve_1d(n, eps)
        h = grid.spacing
        errors.append((float(np.max(np.abs(field.values - exact))), h))
        residuals.append((abs(domain_variation_residual(
            field, profile, eps, _profile_bump(grid))), h))

    detail = 'errors %s, residuals %s' % (
        ', '.join('%.3g' % e for e, _ in errors),
        ', '.join('%.3g' % r for r, _ in residuals))
    expect(all(e <= 5.0 * (h * h + eps) for e, h in errors), detail)
    expect(all(r <= 5.0 * h for r, h in residuals), detail)
    expect(residuals[1][0] <= 0.6 * residuals[0][0] or
           residuals[1][0] <= 1e-10, detail)

    return detail


def _half_plane_solve(eps, n=129, ladder=None):
    profile = BetaProfile(BetaProfile.KIND_POLYNOMIAL_BUMP)
    grid = GridSpec.centered_box(2, n, 0.5)
    kind = ExactKind(ExactKind.HALF_PLANE, mass=mass(profile))
    boundary = make_exact_field(kind, grid)
    config = SolverConfig(continuation=ladder)

    return profile, boundary, solve_peps(boundary, profile, eps, config)


@check('Maximum principle: every solved field satisfies '
       'min(0, min boundary) - tol <= u <= max boundary + tol', SUITE_ALL)
def check_maximum_principle():
    profile, boundary, field = _half_plane_solve(0.1, n=65)
    dirichlet = boundary.mask == GridSpec.DIRICHLET
    low = min(0.0, float(np.min(boundary.values[dirichlet])))
    high = float(np.max(boundary.values[dirichlet]))
    u = field.values[field.interior]
    tol = 1e-8
    detail = 'u in [%.6g, %.6g], bounds [%.6g, %.6g]' % (
        np.min(u), np.max(u), low, high)
    expect(np.min(u) >= low - tol and np.max(u) <= high + tol, detail)

    return detail


@check('Determinism: identical config and inputs produce bit-identical '
       'fields under the lexicographic sweep', SUITE_ALL)
def check_determinism():
    profile = BetaProfile(BetaProfile.KIND_POLYNOMIAL_BUMP)
    grid = GridSpec.centered_box(2, 17, 0.5)
    boundary = make_exact_field(ExactKind(ExactKind.HALF_PLANE, mass=0.5),
                                grid)
    config = SolverConfig(sweep=SolverConfig.SWEEP_LEXICOGRAPHIC)
    a = solve_peps(boundary, profile, 0.1, config)
    b = solve_peps(boundary, profile, 0.1, config)
    expect(np.array_equal(a.values, b.values, equal_nan=True),
           'the two solves differ')

    return 'identical on %d nodes' % a.values.size


@check('Gradient caps: on the eps ladder {0.2, 0.1, 0.05}, max |grad u_eps| '
       'over the transition band exceeds sqrt(2M) by a margin that shrinks '
       'across the ladder', SUITE_ALL)
def check_gradient_caps():
    margins = []

    for eps in (0.2, 0.1, 0.05):
        profile, boundary, field = _half_plane_solve(eps)
        slope = math.sqrt(2.0 * mass(profile))
        margins.append(transition_gradient_max(field, eps) - slope)

    detail = 'margins %s' % ', '.join('%.4g' % m for m in margins)
    expect(all(np.isfinite(margins)), detail)
    expect(all(b <= a + 1e-2 for a, b in zip(margins, margins[1:])), detail)

    return detail


@check('Uniform interior Lipschitz: on the eps ladder {0.2, 0.1, 0.05, '
       '0.025}, max |grad u_eps| over the half-size subdomain varies by '
       'less than 20%', SUITE_ALL)
def check_interior_lipschitz():
    bounds = []
    previous = None

    for eps in (0.2, 0.1, 0.05, 0.025):
        profile, boundary, field = _half_plane_solve(eps, ladder=previous)
        bounds.append(interior_lipschitz(field))
        previous = [eps]

    variation = (max(bounds) - min(bounds)) / max(bounds)
    detail = 'Lipschitz %s, variation %.3g' % (
        ', '.join('%.4g' % b for b in bounds), variation)
    expect(variation < 0.2, detail)

    return detail


@check('Monotonicity: S_eps on a solved 2D field has defect >= -5e-3',
       SUITE_ALL)
def check_monotonicity():
    eps = 0.05
    profile, boundary, field = _half_plane_solve(eps, n=257,
                                                 ladder=[0.2, 0.1])
    table = monotonicity_profile(field, np.zeros(2),
                                 np.linspace(0.1, 0.45, 20),
                                 profile=profile, eps=eps,
                                 quad=ShellQuadrature(2, 256))
    expect(table.defect >= -5e-3, 'defect %.3g' % table.defect)

    return 'defect %.3g' % table.defect


@check('rescale composition: rescale(rescale(u, 0, r1), 0, r2) equals '
       'rescale(u, 0, r1 r2) up to double-interpolation error', SUITE_ALL)
def check_rescale_composition():
    grid = GridSpec.centered_box(2, 129, 1.0)
    field = ScalarField.from_function(
        grid, lambda x: np.sin(2.0 * x[..., 0]) + x[..., 1] ** 2)
    once = rescale(rescale(field, np.zeros(2), 0.5), np.zeros(2), 0.5)
    direct = rescale(field, np.zeros(2), 0.25)
    lipschitz = float(np.max(np.linalg.norm(field.gradient(), axis=-1)))
    gap = float(np.max(np.abs(once.values - direct.values)))
    bound = 4.0 * lipschitz * grid.spacing
    expect(gap <= bound, 'gap %.3g, bound %.3g' % (gap, bound))

    return 'gap %.3g, bound %.3g' % (gap, bound)
