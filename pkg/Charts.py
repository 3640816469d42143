#!/usr/bin/env python
""" Charts.py: A catalog of coordinate contact models with exact evaluation of α, dα and the Reeb field. """

__version__ = "0.1"

from dataclasses import dataclass
import numpy as np
# Own modules:
from Logging import Logger
from Exceptions import InputError, UnsupportedFormError


@dataclass(frozen=True, eq=False)
class Point:
    """ A point of a chart. Coordinates on circle axes are stored reduced mod 1 into [0, 1). """
    coords: np.ndarray

    @property
    def dimension(self):
        return self.coords.shape[0]


@dataclass(frozen=True, eq=False)
class TangentVector:
    """ A tangent vector given by its coordinate components at a base point. """
    base: Point
    components: np.ndarray


class ContactChart:
    """
    Base class of the chart catalog. A chart is a closed-form coordinate model: the contact form α is given as a
    covector field, dα as a sum of constant coordinate 2-forms dx_i ∧ dx_j (``dalpha_pairs``) and the Reeb field in
    closed form. All evaluators accept a single coordinate vector of shape (d,) or a batch of shape (N, d) and are
    pure, so charts can be shared between workers.

    Subclasses fill in ``kind``, ``dimension``, ``periodic`` (the axes stored mod 1) and the three evaluators.

    """

    kind = 'abstract'
    has_contact_form = True

    def __init__(self, dimension, periodic=(), name=None, loglevel='INFO'):
        self.dimension = dimension
        self.periodic = tuple(periodic)
        self.name = name if name is not None else self.kind
        self.dalpha_pairs = []
        self.logger = Logger('Charts.{}'.format(type(self).__name__), loglevel).logger

    def __repr__(self):
        return '{}({!r})'.format(type(self).__name__, self.name)

    @property
    def half_dimension(self):
        """ n for a (2n+1)-dimensional contact chart. """
        return (self.dimension - 1) // 2

    # Points and vectors -------------------------------------------------------------------------------------------

    def reduce(self, coords):
        """
        This function reduces the circle coordinates of a coordinate array mod 1 into [0, 1). Other axes are
        returned unchanged. The input is not modified.

        :param coords: (d,) or (N, d) array
        :return: array of the same shape
        """
        coords = np.array(coords, dtype=float)
        if self.periodic:
            wrapped = np.mod(coords[..., self.periodic], 1.0)
            # np.mod can round tiny negative numbers up to exactly 1.0
            wrapped[wrapped >= 1.0] = 0.0
            coords[..., self.periodic] = wrapped
        return coords

    def point(self, coords):
        """
        This function builds a Point of this chart, checking the dimension and reducing circle coordinates.

        :param coords: sequence of length d
        :return: Point
        """
        coords = np.asarray(coords, dtype=float).reshape(-1)
        self.check_coords(coords)
        return Point(self.reduce(coords))

    def tangent(self, p, components):
        """
        This function builds a TangentVector based at p.

        :param p: Point of this chart
        :param components: sequence of length d
        :return: TangentVector
        """
        components = np.asarray(components, dtype=float).reshape(-1)
        self.check_coords(p.coords)
        self.check_coords(components)
        return TangentVector(p, components)

    def basis_vector(self, p, index):
        """ The coordinate vector e_index based at p. """
        components = np.zeros(self.dimension)
        components[index] = 1.0
        return self.tangent(p, components)

    def check_coords(self, coords):
        """
        This function raises an InputError when the trailing axis of coords does not match the chart dimension.

        :param coords: array whose last axis holds coordinates
        """
        coords = np.asarray(coords)
        if coords.ndim == 0 or coords.shape[-1] != self.dimension:
            message = 'Dimension mismatch: chart {} has dimension {}, got shape {}.'.format(
                self.name, self.dimension, coords.shape)
            self.logger.error(message)
            raise InputError(message)

    def _require_contact_form(self, what):
        if not self.has_contact_form:
            message = 'Chart {} carries a symplectic form, not {}.'.format(self.name, what)
            self.logger.error(message)
            raise UnsupportedFormError(message)

    def _check_based(self, p, *vectors):
        self.check_coords(p.coords)
        for v in vectors:
            self.check_coords(v.components)
            if v.base.coords.shape != p.coords.shape or not np.array_equal(self.reduce(v.base.coords),
                                                                            self.reduce(p.coords)):
                message = 'Tangent vector is not based at the evaluation point.'
                self.logger.error(message)
                raise InputError(message)

    # Batched evaluators -------------------------------------------------------------------------------------------

    def alpha_covector(self, coords):
        """
        The contact form as a covector field: returns a with α_p(v) = a(p)·v.

        :param coords: (d,) or (N, d) array
        :return: array of the same shape
        """
        raise NotImplementedError

    def reeb_vector(self, coords):
        """
        The Reeb field in closed form.

        :param coords: (d,) or (N, d) array
        :return: array of the same shape
        """
        raise NotImplementedError

    def dalpha_matrix(self, coords):
        """
        The matrix W of dα, with dα_p(v, w) = v·W w. dα is constant on every chart of the catalog but the matrix
        is broadcast to the batch shape for use in stacked solves.

        :param coords: (d,) or (N, d) array
        :return: (d, d) or (N, d, d) array
        """
        coords = np.asarray(coords, dtype=float)
        self.check_coords(coords)
        matrix = np.zeros((self.dimension, self.dimension))
        for i, j in self.dalpha_pairs:
            matrix[i, j] += 1.0
            matrix[j, i] -= 1.0
        return np.broadcast_to(matrix, coords.shape[:-1] + matrix.shape).copy()

    def dalpha_values(self, v, w):
        """
        dα(v, w) for batches of component arrays. Evaluated pair by pair so that swapping v and w flips the sign
        exactly.

        :param v: (..., d) array
        :param w: (..., d) array
        :return: array of shape (...)
        """
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        total = np.zeros(np.broadcast_shapes(v.shape, w.shape)[:-1])
        for i, j in self.dalpha_pairs:
            total = total + (v[..., i] * w[..., j] - v[..., j] * w[..., i])
        return total

    # Pointwise operations -----------------------------------------------------------------------------------------

    def alpha_at(self, p, v):
        """
        This function evaluates α_p(v) in closed form.

        :param p: Point
        :param v: TangentVector based at p
        :return: float
        """
        self._require_contact_form('α')
        self._check_based(p, v)
        return float(np.dot(self.alpha_covector(p.coords), v.components))

    def dalpha_at(self, p, v, w):
        """
        This function evaluates dα_p(v, w) in closed form. dα_p(v, w) = -dα_p(w, v) holds exactly.

        :param p: Point
        :param v: TangentVector based at p
        :param w: TangentVector based at p
        :return: float
        """
        self._require_contact_form('dα')
        self._check_based(p, v, w)
        return float(self.dalpha_values(v.components, w.components))

    def reeb_at(self, p):
        """
        This function returns the Reeb vector R_α(p), the unique vector with α(R) = 1 and dα(R, -) = 0.

        :param p: Point
        :return: TangentVector
        """
        self._require_contact_form('a Reeb field')
        self.check_coords(p.coords)
        return TangentVector(p, self.reeb_vector(p.coords))


class DarbouxChart(ContactChart):
    """
    Standard contact space ℝ^{2n+1} with coordinates (x_1..x_n, y_1..y_n, z), contact form
    α = dz - Σ y_i dx_i, dα = Σ dx_i ∧ dy_i and Reeb field ∂/∂z.

    """

    kind = 'darboux'

    def __init__(self, n=1, loglevel='INFO'):
        if int(n) != n or n < 1:
            raise InputError('Darboux chart needs n >= 1, got {}.'.format(n))
        n = int(n)
        super().__init__(2 * n + 1, name='darboux:{}'.format(n), loglevel=loglevel)
        self.n = n
        self.dalpha_pairs = [(i, n + i) for i in range(n)]

    def x_index(self, i):
        """ Position of x_i (1-based) in the coordinate vector. """
        return i - 1

    def y_index(self, i):
        """ Position of y_i (1-based) in the coordinate vector. """
        return self.n + i - 1

    @property
    def z_index(self):
        return 2 * self.n

    def coordinate_index(self, label):
        """
        Position of a coordinate given by its label ('x1', 'y2', 'z').

        :param label: coordinate label
        :return: integer index
        """
        label = label.strip().lower()
        try:
            if label == 'z':
                return self.z_index
            index = int(label[1:])
            if label[0] == 'x' and 1 <= index <= self.n:
                return self.x_index(index)
            if label[0] == 'y' and 1 <= index <= self.n:
                return self.y_index(index)
        except ValueError:
            pass
        message = 'Unknown coordinate {} for chart {}.'.format(label, self.name)
        self.logger.error(message)
        raise InputError(message)

    def alpha_covector(self, coords):
        coords = np.asarray(coords, dtype=float)
        self.check_coords(coords)
        covector = np.zeros_like(coords)
        covector[..., :self.n] = -coords[..., self.n:2 * self.n]
        covector[..., self.z_index] = 1.0
        return covector

    def reeb_vector(self, coords):
        coords = np.asarray(coords, dtype=float)
        self.check_coords(coords)
        reeb = np.zeros_like(coords)
        reeb[..., self.z_index] = 1.0
        return reeb


class CircleChart(ContactChart):
    """
    The circle ℝ/ℤ with coordinate s mod 1, α = ds, dα = 0 and Reeb field ∂/∂s.

    """

    kind = 'circle'

    def __init__(self, loglevel='INFO'):
        super().__init__(1, periodic=(0,), name='circle', loglevel=loglevel)

    def coordinate_index(self, label):
        if label.strip().lower() != 's':
            raise InputError('The circle chart only has the coordinate s, got {}.'.format(label))
        return 0

    def alpha_covector(self, coords):
        coords = np.asarray(coords, dtype=float)
        self.check_coords(coords)
        return np.ones_like(coords)

    def reeb_vector(self, coords):
        return self.alpha_covector(coords)


class PrequantizationChart(ContactChart):
    """
    Trivial prequantization of the plane (ℝ², ω = dx ∧ dy): total space ℝ² × S¹ with coordinates (x, y, t), t mod 1,
    contact form α = dt + x dy. Then dα = dx ∧ dy = π*ω and the Reeb field ∂/∂t is vertical.

    """

    kind = 'prequantization'
    base_dimension = 2

    def __init__(self, loglevel='INFO'):
        super().__init__(3, periodic=(2,), name='preq', loglevel=loglevel)
        self.dalpha_pairs = [(0, 1)]

    def coordinate_index(self, label):
        labels = {'x': 0, 'x1': 0, 'y': 1, 'y1': 1, 't': 2}
        key = label.strip().lower()
        if key not in labels:
            raise InputError('Unknown coordinate {} for chart {}.'.format(label, self.name))
        return labels[key]

    def projection(self, coords):
        """ π: total space -> plane. """
        return np.asarray(coords, dtype=float)[..., :2]

    def vertical_vector(self, coords):
        """ The generator of the circle action, ∂/∂t. """
        return self.reeb_vector(coords)

    def base_omega(self, u, v):
        """ The base symplectic form dx ∧ dy on batches of planar vectors. """
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    def alpha_covector(self, coords):
        coords = np.asarray(coords, dtype=float)
        self.check_coords(coords)
        covector = np.zeros_like(coords)
        covector[..., 1] = coords[..., 0]
        covector[..., 2] = 1.0
        return covector

    def reeb_vector(self, coords):
        coords = np.asarray(coords, dtype=float)
        self.check_coords(coords)
        reeb = np.zeros_like(coords)
        reeb[..., 2] = 1.0
        return reeb


class SymplectizationChart(ContactChart):
    """
    Symplectization (M × ℝ, ω = d(e^θ α)) of a Darboux or circle chart. The coordinate θ is appended last.
    In block form ω((u, t), (v, s)) = e^θ (t α(v) - s α(u) + dα(u, v)).

    The chart exposes ω only; asking for α, dα or a Reeb field raises UnsupportedFormError.

    """

    kind = 'symplectization'
    has_contact_form = False

    def __init__(self, base, loglevel='INFO'):
        if not base.has_contact_form or isinstance(base, PrequantizationChart):
            raise InputError('Symplectization is built over Darboux or circle charts, got {}.'.format(base.name))
        super().__init__(base.dimension + 1, periodic=base.periodic, name='symp:{}'.format(base.name),
                         loglevel=loglevel)
        self.base = base

    @property
    def theta_index(self):
        return self.base.dimension

    def split(self, coords):
        """ Split (p, θ) coordinates into the base part and θ. """
        coords = np.asarray(coords, dtype=float)
        return coords[..., :self.base.dimension], coords[..., self.base.dimension]

    def alpha_covector(self, coords):
        self._require_contact_form('α')

    def reeb_vector(self, coords):
        self._require_contact_form('a Reeb field')

    def dalpha_matrix(self, coords):
        self._require_contact_form('dα')

    def omega_matrix(self, coords):
        """
        The matrix W of ω, with ω(U, V) = U·W V.

        :param coords: (D,) or (N, D) array
        :return: (D, D) or (N, D, D) array
        """
        coords = np.asarray(coords, dtype=float)
        self.check_coords(coords)
        base, theta = self.split(coords)
        d = self.base.dimension
        scale = np.exp(theta)[..., None, None]
        matrix = np.zeros(coords.shape[:-1] + (d + 1, d + 1))
        matrix[..., :d, :d] = self.base.dalpha_matrix(base)
        covector = self.base.alpha_covector(base)
        matrix[..., d, :d] = covector
        matrix[..., :d, d] = -covector
        return scale * matrix

    def omega_values(self, coords, u, v):
        """
        ω(U, V) on batches, evaluated with the block formula so that swapping U and V flips the sign exactly.

        :param coords: (..., D) base points
        :param u: (..., D) array
        :param v: (..., D) array
        :return: array of shape (...)
        """
        coords = np.asarray(coords, dtype=float)
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        base, theta = self.split(coords)
        d = self.base.dimension
        covector = self.base.alpha_covector(base)
        alpha_u = np.sum(covector * u[..., :d], axis=-1)
        alpha_v = np.sum(covector * v[..., :d], axis=-1)
        inner = u[..., d] * alpha_v - v[..., d] * alpha_u
        return np.exp(theta) * (inner + self.base.dalpha_values(u[..., :d], v[..., :d]))

    def omega_at(self, p, v, w):
        """
        This function evaluates ω_p(v, w).

        :param p: Point
        :param v: TangentVector based at p
        :param w: TangentVector based at p
        :return: float
        """
        self._check_based(p, v, w)
        return float(self.omega_values(p.coords, v.components, w.components))

    def liouville_covector(self, coords):
        """ The primitive λ = e^θ α of ω as a covector field (θ-component 0). """
        coords = np.asarray(coords, dtype=float)
        base, theta = self.split(coords)
        covector = np.zeros_like(coords)
        covector[..., :self.base.dimension] = np.exp(theta)[..., None] * self.base.alpha_covector(base)
        return covector


def chart_from_name(name, loglevel='INFO'):
    """
    This function selects a chart by its name string: 'darboux:n', 'circle', 'symp:darboux:n', 'symp:circle' or
    'preq'.

    :param name: chart name
    :param loglevel: (OPTIONAL) log level of the chart
    :return: ContactChart instance
    """
    key = str(name).strip().lower()
    if key.startswith('symp:'):
        return SymplectizationChart(chart_from_name(key[len('symp:'):], loglevel), loglevel=loglevel)
    if key == 'circle':
        return CircleChart(loglevel=loglevel)
    if key in ('preq', 'prequantization'):
        return PrequantizationChart(loglevel=loglevel)
    if key.startswith('darboux'):
        parts = key.split(':')
        try:
            n = int(parts[1]) if len(parts) > 1 else 1
        except ValueError:
            raise InputError('Cannot read the dimension in chart name {}.'.format(name))
        return DarbouxChart(n, loglevel=loglevel)
    raise InputError("Unknown chart {}, choose 'darboux:n', 'circle', 'symp:darboux:n', 'symp:circle' or 'preq'."
                     .format(name))
