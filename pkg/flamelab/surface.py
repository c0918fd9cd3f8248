"""Surfaces parametrized by their Gauss map.

A support function g on S^2 describes the surface
``X(n) = n g(n) + grad g(n)``. The matrix ``W = hess g + g I`` maps the
tangent plane at n to the tangent plane of the surface at X(n), so its
eigenvalues are the principal radii of curvature and ``1/det(W)`` is the
Gauss curvature. A trace of zero means the surface is minimal.
"""

import logging
import math
from collections import namedtuple

import numpy as np
from scipy import optimize
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from flamelab.errors import (EmptySurfaceError, InsufficientStencilError,
                             InvalidBoundaryError, InvalidParameterError)


logger = logging.getLogger('flamelab')


#: Determinants of W at or below this magnitude leave K undefined.
SINGULAR_TOL = 1e-12

#: First fundamental forms below this fraction of ``max(g)**2`` are flagged.
BRANCH_TOL = 1e-10


#: The first fundamental form at a node, in the orthonormal pullback frame.
FundamentalForm = namedtuple('FundamentalForm',
                             ['E', 'F', 'G', 'defect', 'branch_point'])


class SurfaceSample(object):
    """Geometric data of the surface at one node.

    Attributes:
        n (numpy.ndarray):
            The unit normal.

        X (numpy.ndarray):
            The surface point.

        E (float):
            The first fundamental form entry along ``e_theta``.

        F (float):
            The mixed first fundamental form entry.

        G (float):
            The first fundamental form entry along ``e_phi``.

        radii (tuple of float):
            The principal radii of curvature, in ascending order.

        gauss_K (float):
            The Gauss curvature, or ``None`` where ``det(W)`` vanishes.

        mean_residual (float):
            ``Laplace-Beltrami(g) + 2 g``, the trace of W.

        hessian (numpy.ndarray):
            W in the ``(e_theta, e_phi)`` frame. Its entries depend on the
            frame.

        conformality_defect (float):
            ``max(|E - G|, |F|) / max(E, G)``.

        branch_point (bool):
            Whether E and G both (nearly) vanish.
    """

    def __init__(self, n, X, E, F, G, radii, gauss_K, mean_residual,
                 hessian, conformality_defect, branch_point):
        self.n = n
        self.X = X
        self.E = E
        self.F = F
        self.G = G
        self.radii = radii
        self.gauss_K = gauss_K
        self.mean_residual = mean_residual
        self.hessian = hessian
        self.conformality_defect = conformality_defect
        self.branch_point = branch_point

    def to_json(self):
        """Return a JSON-compatible record of the sample."""
        return {
            'n': self.n,
            'X': self.X,
            'E': self.E,
            'F': self.F,
            'G': self.G,
            'radii': list(self.radii),
            'gauss_K': self.gauss_K,
            'mean_residual': self.mean_residual,
            'frame_hessian': self.hessian,
            'conformality_defect': self.conformality_defect,
            'branch_point': self.branch_point,
        }


class ContactAngleTable(object):
    """Contact angles along the boundary of the support.

    Attributes:
        rows (list of tuple):
            One ``(j, k, theta_b, phi_b, g, cos_alpha, alpha, X_norm)`` row
            per boundary node. ``g`` is the node sample, the angles locate
            the extrapolated boundary point, and ``X_norm`` is the length of
            the extrapolated surface point.

        mass (float):
            The mass M of the container sphere of radius ``sqrt(2M)``.
    """

    COLUMNS = ('j', 'k', 'theta_b', 'phi_b', 'g', 'cos_alpha', 'alpha',
               'X_norm')

    def __init__(self, rows, mass):
        self.rows = rows
        self.mass = mass

    def __len__(self):
        return len(self.rows)

    @property
    def angles(self):
        """The contact angles."""
        return np.array([row[6] for row in self.rows])

    @property
    def radii(self):
        """The lengths of the extrapolated boundary points."""
        return np.array([row[7] for row in self.rows])

    def to_json(self):
        """Return a JSON-compatible summary of the table."""
        angles = self.angles
        radii = self.radii

        if len(self.rows) == 0:
            return {'count': 0}

        return {
            'count': len(self.rows),
            'alpha_min': float(np.min(angles)),
            'alpha_max': float(np.max(angles)),
            'X_norm_min': float(np.min(radii)),
            'X_norm_max': float(np.max(radii)),
            'container_radius': math.sqrt(2.0 * self.mass),
        }


class SurfaceMesh(object):
    """A triangulated surface.

    Attributes:
        vertices (numpy.ndarray):
            Vertex positions, of shape ``(n, 3)``.

        normals (numpy.ndarray):
            Vertex normals, of shape ``(n, 3)``.

        faces (numpy.ndarray):
            Zero-based vertex indices, of shape ``(m, 3)``.
    """

    def __init__(self, vertices, normals, faces):
        self.vertices = vertices
        self.normals = normals
        self.faces = faces
        self._edges = None

    @property
    def edges(self):
        """The unique undirected edges, with their face counts.

        Returns:
            tuple:
            An ``(edges, counts)`` tuple.
        """
        if self._edges is None:
            if len(self.faces) == 0:
                self._edges = (np.zeros((0, 2), dtype=int),
                               np.zeros(0, dtype=int))
            else:
                pairs = np.concatenate([self.faces[:, [0, 1]],
                                        self.faces[:, [1, 2]],
                                        self.faces[:, [2, 0]]])
                pairs = np.sort(pairs, axis=1)
                self._edges = np.unique(pairs, axis=0, return_counts=True)

        return self._edges

    @property
    def euler_characteristic(self):
        """``V - E + F``."""
        return (len(self.vertices) - len(self.edges[0]) +
                len(self.faces))

    @property
    def boundary_loops(self):
        """The number of connected components of the boundary edges."""
        edges, counts = self.edges
        boundary = edges[counts == 1]

        if len(boundary) == 0:
            return 0

        used, inverse = np.unique(boundary, return_inverse=True)
        inverse = inverse.reshape(boundary.shape)
        size = len(used)
        graph = coo_matrix((np.ones(len(inverse)),
                            (inverse[:, 0], inverse[:, 1])),
                           shape=(size, size))

        return int(connected_components(graph, directed=False)[0])

    def to_obj(self):
        """Return the mesh as Wavefront OBJ text.

        Returns:
            str:
            The OBJ document.
        """
        lines = ['# flamelab surface mesh',
                 '# vertices %d faces %d' % (len(self.vertices),
                                             len(self.faces))]
        lines += ['v %.17g %.17g %.17g' % tuple(v) for v in self.vertices]
        lines += ['vn %.17g %.17g %.17g' % tuple(n) for n in self.normals]
        lines += ['f %d//%d %d//%d %d//%d'
                  % (a + 1, a + 1, b + 1, b + 1, c + 1, c + 1)
                  for a, b, c in self.faces]

        return '\n'.join(lines) + '\n'

    def to_json(self):
        """Return a JSON-compatible summary of the mesh."""
        return {
            'vertices': len(self.vertices),
            'faces': len(self.faces),
            'euler_characteristic': self.euler_characteristic,
            'boundary_loops': self.boundary_loops,
        }


def _require_sphere(g):
    if g.dim != 2:
        raise InvalidParameterError('g', g, 'samples on S^2')


def immersion_grid(g):
    """Return ``X = n g + grad g`` at every node.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

    Returns:
        numpy.ndarray:
        Points of shape ``(n_theta, n_phi, 3)``. Polar rows hold NaN.
    """
    _require_sphere(g)
    grad = g.derivative_grids()['grad']
    e_theta, e_phi = g.frames()

    return (g.normals() * g.values[..., np.newaxis] +
            grad[..., 0:1] * e_theta + grad[..., 1:2] * e_phi)


def weingarten_grid(g):
    """Return ``W = hess g + g I`` at every node, in the orthonormal frame.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

    Returns:
        numpy.ndarray:
        Matrices of shape ``(n_theta, n_phi, 2, 2)``.
    """
    _require_sphere(g)

    return (g.derivative_grids()['hessian'] +
            g.values[..., np.newaxis, np.newaxis] * np.eye(2))


def immersion_X(g, j, k):
    """Return the surface point of a node.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

        j (int):
            The polar index.

        k (int):
            The azimuthal index.

    Returns:
        numpy.ndarray:
        ``n g(n) + grad g(n)`` in 3-space.

    Raises:
        flamelab.errors.InsufficientStencilError:
            The node is on the first or last polar row.
    """
    _require_sphere(g)
    g.check_node(j, k)

    return immersion_grid(g)[j, k % g.n_phi].copy()


def principal_radii(W):
    """Return the eigenvalues of symmetric 2x2 matrices in closed form.

    Args:
        W (numpy.ndarray):
            Matrices of shape ``(..., 2, 2)``.

    Returns:
        tuple:
        ``(smaller, larger)`` arrays.
    """
    mean = 0.5 * (W[..., 0, 0] + W[..., 1, 1])
    half_gap = np.hypot(0.5 * (W[..., 0, 0] - W[..., 1, 1]), W[..., 0, 1])

    return mean - half_gap, mean + half_gap


def _pullback_form(W):
    # dX(e_i) = W_i1 e_theta + W_i2 e_phi.
    E = W[..., 0, 0] ** 2 + W[..., 0, 1] ** 2
    F = W[..., 0, 0] * W[..., 0, 1] + W[..., 0, 1] * W[..., 1, 1]
    G = W[..., 0, 1] ** 2 + W[..., 1, 1] ** 2

    return E, F, G


def _conformality(E, F, G, scale):
    floor = BRANCH_TOL * scale * scale
    largest = np.maximum(E, G)
    defect = (np.maximum(np.abs(E - G), np.abs(F)) /
              np.maximum(largest, floor))

    return defect, largest < floor


def _scale(g):
    return max(float(np.max(np.abs(g.values))), 1e-300)


def curvature_report(g, j, k):
    """Return the curvature data of the surface at a node.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

        j (int):
            The polar index.

        k (int):
            The azimuthal index.

    Returns:
        SurfaceSample:
        The sample. E, F and G come from W, the differential of X.

    Raises:
        flamelab.errors.InsufficientStencilError:
            The node is on the first or last polar row.
    """
    _require_sphere(g)
    g.check_node(j, k)
    k = k % g.n_phi

    W = weingarten_grid(g)[j, k]
    low, high = principal_radii(W)
    det = float(W[0, 0] * W[1, 1] - W[0, 1] * W[1, 0])
    E, F, G = _pullback_form(W)
    defect, branch = _conformality(E, F, G, _scale(g))

    if abs(det) > SINGULAR_TOL:
        gauss_K = 1.0 / det
    else:
        gauss_K = None

    return SurfaceSample(n=g.normals()[j, k],
                         X=immersion_grid(g)[j, k].copy(),
                         E=float(E),
                         F=float(F),
                         G=float(G),
                         radii=(float(low), float(high)),
                         gauss_K=gauss_K,
                         mean_residual=float(W[0, 0] + W[1, 1]),
                         hessian=W.copy(),
                         conformality_defect=float(defect),
                         branch_point=bool(branch))


def fundamental_form_grid(g):
    """Return the first fundamental form of X by differencing X itself.

    Derivatives of X along ``e_theta`` and ``e_phi`` use the one-ring of
    X values around each node. Rows within two of the poles hold NaN.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

    Returns:
        tuple:
        ``(E, F, G, defect, branch_point)`` arrays of shape
        ``(n_theta, n_phi)``.
    """
    X = immersion_grid(g)
    nan_row = np.full((1,) + X.shape[1:], np.nan)
    north = np.concatenate([nan_row, X[:-1]])
    south = np.concatenate([X[1:], nan_row])
    sin_theta = np.sin(g.thetas)[:, np.newaxis, np.newaxis]

    X_u = (south - north) / (2.0 * math.sin(g.d_theta))
    X_v = ((np.roll(X, -1, axis=1) - np.roll(X, 1, axis=1)) /
           (2.0 * math.sin(g.d_phi) * sin_theta))

    E = np.sum(X_u * X_u, axis=-1)
    F = np.sum(X_u * X_v, axis=-1)
    G = np.sum(X_v * X_v, axis=-1)

    with np.errstate(invalid='ignore'):
        defect, branch = _conformality(E, F, G, _scale(g))

    return E, F, G, defect, branch


def fundamental_form(g, j, k):
    """Return the first fundamental form of X at a node.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

        j (int):
            The polar index, at least two rows from either pole.

        k (int):
            The azimuthal index.

    Returns:
        FundamentalForm:
        ``(E, F, G, defect, branch_point)``. A vanishing form raises the
        branch point flag.

    Raises:
        flamelab.errors.InsufficientStencilError:
            The node is within two rows of a pole.
    """
    _require_sphere(g)
    g.check_node(j, k, rings=2)
    E, F, G, defect, branch = fundamental_form_grid(g)
    k = k % g.n_phi

    return FundamentalForm(float(E[j, k]), float(F[j, k]), float(G[j, k]),
                           float(defect[j, k]), bool(branch[j, k]))


def boundary_nodes(g):
    """Return the support nodes next to a node outside the support.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

    Returns:
        list of tuple:
        ``(j, k)`` pairs in row-major order.
    """
    _require_sphere(g)
    inside = g.support_mask
    outside = ~inside
    near = np.zeros_like(inside)
    near[1:] |= outside[:-1]
    near[:-1] |= outside[1:]
    near |= np.roll(outside, 1, axis=1) | np.roll(outside, -1, axis=1)

    return [(int(j), int(k)) for j, k in np.argwhere(inside & near)]


def _outward_step(g, j, k):
    """Return ``(axis, step)`` pointing from a node out of the support."""
    values = g.values
    n_theta, n_phi = values.shape
    candidates = []

    for axis, step in ((0, 1), (0, -1), (1, 1), (1, -1)):
        if axis == 0:
            if not 0 <= j + step < n_theta:
                continue

            value = values[j + step, k]
        else:
            value = values[j, (k + step) % n_phi]

        candidates.append((value > 0, value, axis, step))

    # Prefer a neighbor outside the support, then the smallest neighbor.
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))

    return candidates[0][2], candidates[0][3]


def _line_index(g, j, k, axis, offset):
    if axis == 0:
        jj = j + offset

        if not 0 <= jj < g.n_theta:
            return None

        return jj, k

    return j, (k + offset) % g.n_phi


def _quadratic_root(t, values):
    """Return the root of the interpolating quadratic nearest ``t >= 0``."""
    coeffs = np.polyfit(t, values, 2)
    roots = np.roots(coeffs)
    roots = roots[np.abs(roots.imag) < 1e-12].real
    roots = roots[roots >= -0.5]

    if len(roots):
        return float(np.min(roots))

    # Fall back on the secant through the two outermost samples.
    slope = (values[0] - values[1]) / (t[0] - t[1])

    if slope == 0:
        return 0.0

    return float(t[0] - values[0] / slope)


def contact_angle(g, mass, boundary=None, boundary_tol=None):
    """Return the contact angles of the surface with its container sphere.

    For each boundary node the zero of g along the outward node line is
    located by a quadratic fit, and X is extrapolated there from three
    inward nodes with complete stencils. The contact angle with the sphere
    of radius ``sqrt(2M)`` satisfies ``cos(alpha) = n . X / sqrt(2M)``.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

        mass (float):
            The mass M.

        boundary (list of tuple, optional):
            ``(j, k)`` boundary nodes. Defaults to :py:func:`boundary_nodes`.

        boundary_tol (float, optional):
            The largest admissible ``|g|`` on a boundary node. Defaults to
            twice the node spacing times the largest valid ``|grad g|``.

    Returns:
        ContactAngleTable:
        The table.

    Raises:
        flamelab.errors.InvalidBoundaryError:
            A boundary node has ``|g|`` above the tolerance.

        flamelab.errors.InsufficientStencilError:
            A boundary node has no three inward nodes with complete
            stencils.
    """
    _require_sphere(g)

    if not mass > 0:
        raise InvalidParameterError('mass', mass, 'a positive number')

    if boundary is None:
        boundary = boundary_nodes(g)

    valid = g.stencil_valid()
    grads = g.derivative_grids()['grad']

    if boundary_tol is None:
        norms = np.linalg.norm(grads, axis=-1)[valid]
        largest = float(np.max(norms)) if len(norms) else _scale(g)
        boundary_tol = 2.0 * g.d_theta * largest

    for j, k in boundary:
        value = g.values[j, k % g.n_phi]

        if abs(value) > boundary_tol:
            raise InvalidBoundaryError(
                'Node (%d, %d) has g = %.6g, but boundary nodes need '
                '|g| <= %.6g' % (j, k, value, boundary_tol))

    X = immersion_grid(g)
    thetas = g.thetas
    phis = g.phis
    container = math.sqrt(2.0 * mass)
    rows = []

    for j, k in boundary:
        k = k % g.n_phi
        axis, step = _outward_step(g, j, k)

        # Offsets are measured in nodes along the outward direction.
        g_offsets = []
        g_values = []

        for m in range(3):
            index = _line_index(g, j, k, axis, -step * m)

            if index is None:
                break

            g_offsets.append(-m)
            g_values.append(g.values[index])

        x_offsets = []
        x_values = []
        m = 0

        while len(x_offsets) < 3:
            index = _line_index(g, j, k, axis, -step * m)

            if index is None or m > g.n_theta:
                raise InsufficientStencilError(j, k)

            if valid[index]:
                x_offsets.append(-m)
                x_values.append(X[index])

            m += 1

        if len(g_offsets) == 3:
            t_b = _quadratic_root(np.array(g_offsets), np.array(g_values))
        else:
            t_b = 0.0

        x_offsets = np.array(x_offsets, dtype=float)
        X_b = np.array([np.polyval(np.polyfit(x_offsets, np.asarray(x_values)
                                              [:, i], 2), t_b)
                        for i in range(3)])

        if axis == 0:
            theta_b = thetas[j] + step * t_b * g.d_theta
            phi_b = phis[k]
        else:
            theta_b = thetas[j]
            phi_b = phis[k] + step * t_b * g.d_phi

        n_b = np.array([math.sin(theta_b) * math.cos(phi_b),
                        math.sin(theta_b) * math.sin(phi_b),
                        math.cos(theta_b)])
        cos_alpha = float(np.dot(n_b, X_b)) / container
        alpha = math.acos(min(1.0, max(-1.0, cos_alpha)))
        rows.append((j, k, theta_b, phi_b, float(g.values[j, k]),
                     cos_alpha, alpha, float(np.linalg.norm(X_b))))

    logger.debug('Computed %d contact angles', len(rows))

    return ContactAngleTable(rows, mass)


def export_mesh(g, resolution=None):
    """Triangulate the image of X over the support.

    Vertices are the support nodes away from the polar rows, in row-major
    node order. Each grid quad with all corners in the vertex set becomes
    two triangles. A vertex ring next to a polar row that lies entirely in
    the support is closed by a fan from its first vertex.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

        resolution (tuple of int, optional):
            ``(n_theta, n_phi)`` to resample at first.

    Returns:
        SurfaceMesh:
        The mesh.

    Raises:
        flamelab.errors.EmptySurfaceError:
            No node lies in the support.
    """
    _require_sphere(g)

    if resolution is not None:
        g = g.resample(*resolution)

    n_theta, n_phi = g.values.shape
    inside = g.support_mask
    use = inside.copy()
    use[0] = False
    use[-1] = False

    if not np.any(use):
        raise EmptySurfaceError('The support of g has no nodes away from '
                                'the poles')

    index = np.full(use.shape, -1, dtype=int)
    index[use] = np.arange(np.count_nonzero(use))

    X = immersion_grid(g)
    vertices = X[use]
    normals = g.normals()[use]
    faces = []

    for j in range(1, n_theta - 2):
        for k in range(n_phi):
            k1 = (k + 1) % n_phi
            a = index[j, k]
            b = index[j + 1, k]
            c = index[j + 1, k1]
            d = index[j, k1]

            if a >= 0 and b >= 0 and c >= 0:
                faces.append((a, b, c))

            if a >= 0 and c >= 0 and d >= 0:
                faces.append((a, c, d))

    for ring, pole, reverse in ((1, 0, False), (n_theta - 2, n_theta - 1,
                                                True)):
        if np.all(use[ring]) and np.all(inside[pole]):
            first = index[ring, 0]

            for k in range(1, n_phi - 1):
                tri = (first, index[ring, k], index[ring, k + 1])

                if reverse:
                    tri = (tri[0], tri[2], tri[1])

                faces.append(tri)

    faces = np.array(faces, dtype=int).reshape(-1, 3)
    mesh = SurfaceMesh(vertices, normals, faces)
    logger.debug('Meshed %d vertices and %d faces', len(vertices),
                 len(faces))

    return mesh


def support_in_hemisphere(g):
    """Test whether the support of g lies in an open hemisphere.

    Solves the linear program ``max t`` subject to ``v . n >= t`` over
    support nodes, with ``|v_i| <= 1``.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^1 or S^2.

    Returns:
        tuple:
        A ``(contained, margin, direction)`` tuple. ``contained`` is true
        when the optimal margin is positive, and ``direction`` is the unit
        pole of a containing hemisphere (or ``None``).
    """
    normals = g.normals()[g.support_mask]

    if len(normals) == 0:
        return False, 0.0, None

    dim = normals.shape[-1]
    cost = np.zeros(dim + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-normals, np.ones((len(normals), 1))])
    bounds = [(-1.0, 1.0)] * dim + [(None, None)]
    result = optimize.linprog(cost, A_ub=a_ub, b_ub=np.zeros(len(normals)),
                              bounds=bounds, method='highs')

    if not result.success:
        logger.warning('Hemisphere test failed: %s', result.message)
        return False, 0.0, None

    margin = float(-result.fun)
    v = result.x[:dim]
    length = float(np.linalg.norm(v))

    if margin <= 1e-12 or length == 0:
        return False, margin, None

    return True, margin, v / length


def surface_summary(g, mass, mesh=None):
    """Summarize the surface of a support function.

    Args:
        g (flamelab.spherical.SphericalFunction):
            Samples on S^2.

        mass (float):
            The mass M.

        mesh (SurfaceMesh, optional):
            A mesh already exported from g.

    Returns:
        dict:
        The largest ``|mean_residual|`` and conformality defect over
        support nodes with complete stencils, the branch point count, the
        contact angle summary, the mesh topology, the smallest g over the
        support (the star-shapedness margin ``min X . n``) and the
        hemisphere test.
    """
    _require_sphere(g)
    valid = g.stencil_valid(rings=2) & g.support_mask

    W = weingarten_grid(g)
    trace = W[..., 0, 0] + W[..., 1, 1]
    defect, branch = fundamental_form_grid(g)[3:]

    if mesh is None:
        mesh = export_mesh(g)

    try:
        contacts = contact_angle(g, mass).to_json()
    except (InvalidBoundaryError, InsufficientStencilError) as e:
        logger.warning('Contact angles unavailable: %s', e)
        contacts = {'count': 0, 'error': str(e)}

    contained, margin, direction = support_in_hemisphere(g)
    support = g.values[g.support_mask]

    def nanmax(values):
        if not np.any(valid):
            return float('nan')

        return float(np.max(values[valid]))

    return {
        'nodes': int(np.count_nonzero(valid)),
        'max_abs_mean_residual': nanmax(np.abs(trace)),
        'max_conformality_defect': nanmax(defect),
        'branch_points': int(np.count_nonzero(branch & valid)),
        'min_support_g': float(np.min(support)) if len(support) else None,
        'contact': contacts,
        'mesh': mesh.to_json(),
        'in_hemisphere': contained,
        'hemisphere_margin': margin,
        'hemisphere_pole': direction,
    }
