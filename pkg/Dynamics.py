#!/usr/bin/env python
"""
Dynamics.py: Contact Hamiltonian vector fields, contact brackets, conformal factors, isotopy integration and the
Hamiltonian-level utilities (transition Hamiltonians, truncation, conformal naturality).
"""

__version__ = "0.1"

import itertools
import time
from dataclasses import dataclass, field
import numpy as np
import pandas as pd
# Own modules:
from Logging import Logger
from Exceptions import (InputError, UnsupportedFormError, InconsistentSystemError, DegenerateChartError,
                        BlowUpError)
from Charts import Point, TangentVector
from Helper_functions import HelperFunctions


class ScalarField:
    """
    A (possibly time-dependent) Hamiltonian on a chart. The value function takes a time and an (N, d) array of
    coordinates and returns an (N,) array. The gradient is either given in closed form (same calling convention,
    returning (N, d)) or estimated by central differences with step ``fd_step``; the whole stencil is passed to the
    value function in one call.

    ``support_box`` is the box over which maxima over M are taken. When ``compact_support`` is True the field
    vanishes outside that box; otherwise the box must cover a fundamental domain of the field (a period in every
    direction where the field is not compactly supported). ``breakpoints`` are the times where a path may jump
    (concatenations); integrators and time integrals are split there.

    Create fields with the factories of this module, for example ``coordinate_field(chart, 'x1')`` or
    ``hk_field(4)``, and combine them with ``+``, ``-``, ``*``.

    """

    def __init__(self, dimension, value, gradient=None, time_dependent=False, support_box=None,
                 compact_support=False, name='field', fd_step=1e-5, breakpoints=()):
        self.dimension = dimension
        self._value = value
        self._gradient = gradient
        self.time_dependent = time_dependent
        self.support_box = None if support_box is None else [tuple(float(b) for b in side) for side in support_box]
        self.compact_support = compact_support
        self.name = name
        self.fd_step = fd_step
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints))

    def __repr__(self):
        return 'ScalarField({!r}, dimension={})'.format(self.name, self.dimension)

    @property
    def has_analytic_gradient(self):
        return self._gradient is not None

    def _as_batch(self, coords):
        coords = np.asarray(coords, dtype=float)
        single = coords.ndim == 1
        batch = np.atleast_2d(coords)
        if batch.shape[-1] != self.dimension:
            raise InputError('Field {} has dimension {}, got coordinates of shape {}.'.format(
                self.name, self.dimension, coords.shape))
        return batch, single

    def evaluate(self, t, coords):
        """
        This function evaluates the field.

        :param t: time
        :param coords: (d,) or (N, d) array (a Point is accepted as well)
        :return: float for a single point, (N,) array for a batch
        """
        if isinstance(coords, Point):
            coords = coords.coords
        batch, single = self._as_batch(coords)
        values = np.asarray(self._value(t, batch), dtype=float).reshape(batch.shape[0])
        return float(values[0]) if single else values

    def grad(self, t, coords):
        """
        This function returns the differential dH as a covector (analytic, or central differences with fd_step).

        :param t: time
        :param coords: (d,) or (N, d) array (a Point is accepted as well)
        :return: (d,) or (N, d) array
        """
        if isinstance(coords, Point):
            coords = coords.coords
        batch, single = self._as_batch(coords)
        if self._gradient is not None:
            gradient = np.asarray(self._gradient(t, batch), dtype=float).reshape(batch.shape)
        else:
            gradient = self.fd_gradient(t, batch, self.fd_step)
        return gradient[0] if single else gradient

    def fd_gradient(self, t, batch, step):
        """
        Central difference gradient of the value function on a batch of points, one value call for the whole stencil.

        :param t: time
        :param batch: (N, d) array
        :param step: finite difference step
        :return: (N, d) array
        """
        return HelperFunctions.central_difference(lambda stencil: self._value(t, stencil), batch, step)[:, 0, :]

    def check_gradient(self, rng, n_samples=20, box=None, rel_tol=1e-6, step=1e-5, t=0.0):
        """
        This function compares the analytic gradient with central differences (step 1e-5) on random samples of the
        box (default: the support box, or [-1, 1]^d).

        :param rng: numpy random Generator
        :param n_samples: (OPTIONAL) number of samples
        :param box: (OPTIONAL) list of (low, high) pairs
        :param rel_tol: (OPTIONAL) relative tolerance
        :param step: (OPTIONAL) finite difference step
        :param t: (OPTIONAL) time
        :return: (passed, max relative deviation)
        """
        if box is None:
            box = self.support_box if self.support_box is not None else [(-1.0, 1.0)] * self.dimension
        low = np.array([b[0] for b in box])
        high = np.array([b[1] for b in box])
        samples = low + (high - low) * rng.random((n_samples, self.dimension))
        analytic = self.grad(t, samples)
        numeric = self.fd_gradient(t, samples, step)
        deviation = float(np.max(np.abs(analytic - numeric)) / max(1.0, float(np.max(np.abs(analytic)))))
        return deviation <= rel_tol, deviation

    def vanishes_outside_support(self, rng, n_samples=200, t=0.0):
        """
        This function checks on random samples outside the support box that a compactly supported field vanishes.
        Fields without compact support pass trivially.

        :param rng: numpy random Generator
        :param n_samples: (OPTIONAL) number of samples
        :param t: (OPTIONAL) time
        :return: True or False
        """
        if not self.compact_support or self.support_box is None:
            return True
        low = np.array([b[0] for b in self.support_box])
        high = np.array([b[1] for b in self.support_box])
        width = high - low
        samples = low - width + 3 * width * rng.random((n_samples, self.dimension))
        outside = np.any((samples < low) | (samples > high), axis=1)
        return bool(np.all(self.evaluate(t, samples[outside]) == 0.0))

    # Algebra ------------------------------------------------------------------------------------------------------

    def _combine(self, other, op_value, op_gradient, name):
        if not isinstance(other, ScalarField):
            other = constant_field(other, self.dimension)
        if other.dimension != self.dimension:
            raise InputError('Cannot combine fields of dimension {} and {}.'.format(self.dimension, other.dimension))
        first, second = self, other

        def value(t, batch):
            return op_value(first.evaluate(t, batch), second.evaluate(t, batch))

        gradient = None
        if first.has_analytic_gradient and second.has_analytic_gradient:
            def gradient(t, batch):
                return op_gradient(first.evaluate(t, batch), first.grad(t, batch),
                                   second.evaluate(t, batch), second.grad(t, batch))

        compact = (first.compact_support and second.compact_support) if op_value is not np.multiply else \
            (first.compact_support or second.compact_support)
        box = first.support_box if first.support_box is not None else second.support_box
        if op_value is np.multiply and second.compact_support and not first.compact_support:
            box = second.support_box
        return ScalarField(self.dimension, value, gradient, first.time_dependent or second.time_dependent,
                           support_box=box, compact_support=compact, name=name, fd_step=self.fd_step,
                           breakpoints=set(first.breakpoints) | set(second.breakpoints))

    def __add__(self, other):
        return self._combine(other, np.add, lambda f, df, g, dg: df + dg, '({} + {})'.format(self.name, _name(other)))

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return self._combine(other, np.subtract, lambda f, df, g, dg: df - dg,
                             '({} - {})'.format(self.name, _name(other)))

    def __mul__(self, other):
        return self._combine(other, np.multiply, lambda f, df, g, dg: df * g[:, None] + f[:, None] * dg,
                             '{} * {}'.format(self.name, _name(other)))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return self * -1.0

    def frozen(self, t):
        """ The time-independent field p -> H(t, p). """
        source = self
        gradient = (lambda _, batch: source.grad(t, batch)) if self.has_analytic_gradient else None
        return ScalarField(self.dimension, lambda _, batch: source.evaluate(t, batch), gradient, False,
                           self.support_box, self.compact_support, '{}@t={}'.format(self.name, t), self.fd_step)

    def time_reversed(self, t0=0.0, t1=1.0):
        """
        The path -H_{t0+t1-t}. It generates the isotopy t -> φ_{t0+t1-t} ∘ φ_{t1}^{-1}, whose time-t1 map is the
        inverse of the time-t1 map of H.

        :param t0: (OPTIONAL) start of the time span
        :param t1: (OPTIONAL) end of the time span
        :return: ScalarField
        """
        source = self
        gradient = None
        if self.has_analytic_gradient:
            def gradient(t, batch):
                return -source.grad(t0 + t1 - t, batch)
        return ScalarField(self.dimension, lambda t, batch: -source.evaluate(t0 + t1 - t, batch), gradient,
                           self.time_dependent, self.support_box, self.compact_support,
                           'reversed({})'.format(self.name), self.fd_step,
                           [t0 + t1 - b for b in self.breakpoints])


def _name(other):
    return other.name if isinstance(other, ScalarField) else repr(other)


# Field factories --------------------------------------------------------------------------------------------------

def constant_field(c, dimension):
    """ The constant Hamiltonian H ≡ c; c = 1 generates the Reeb flow. """
    c = float(c)
    return ScalarField(dimension, lambda t, batch: np.full(batch.shape[0], c),
                       lambda t, batch: np.zeros_like(batch), name='constant({})'.format(c),
                       compact_support=(c == 0.0), support_box=[(-1.0, 1.0)] * dimension if c == 0.0 else None)


def coordinate_field(chart, label):
    """
    The coordinate function with the given label ('x1', 'y2', 'z' on Darboux charts, 's' on the circle,
    'x', 'y', 't' on the prequantization chart).

    :param chart: chart the field lives on
    :param label: coordinate label
    :return: ScalarField
    """
    index = chart.coordinate_index(label)
    dimension = chart.dimension

    def value(t, batch):
        return batch[:, index].copy()

    def gradient(t, batch):
        out = np.zeros_like(batch)
        out[:, index] = 1.0
        return out

    return ScalarField(dimension, value, gradient, name=label)


def polynomial_field(dimension, terms, support_box=None, name='polynomial'):
    """
    A polynomial Σ c_k Π x_i^{e_ki} given as a coefficient table [(c_k, (e_k1, ..., e_kd)), ...].

    :param dimension: number of coordinates
    :param terms: list of (coefficient, exponents) pairs
    :param support_box: (OPTIONAL) box used for maxima
    :param name: (OPTIONAL) name of the field
    :return: ScalarField with analytic gradient
    """
    coefficients = np.array([float(c) for c, _ in terms])
    exponents = np.array([list(e) for _, e in terms], dtype=int).reshape(len(terms), dimension)
    if np.any(exponents < 0):
        raise InputError('Polynomial exponents must be non-negative.')
    derivative_tables = []
    for i in range(dimension):
        lowered = exponents.copy()
        lowered[:, i] = np.maximum(lowered[:, i] - 1, 0)
        derivative_tables.append((coefficients * exponents[:, i], lowered))

    def monomials(batch, table):
        if table.shape[0] == 0:
            return np.zeros((batch.shape[0], 0))
        return np.prod(batch[:, None, :] ** table[None, :, :], axis=2)

    def value(t, batch):
        return monomials(batch, exponents) @ coefficients

    def gradient(t, batch):
        out = np.empty_like(batch)
        for i, (coefs, table) in enumerate(derivative_tables):
            out[:, i] = monomials(batch, table) @ coefs
        return out

    return ScalarField(dimension, value, gradient, support_box=support_box, name=name)


def random_polynomial_field(rng, dimension, degree=2, scale=1.0, support_box=None, name='random polynomial'):
    """
    A polynomial of total degree ≤ degree whose coefficients are drawn uniformly from [-scale, scale].

    :param rng: numpy random Generator
    :param dimension: number of coordinates
    :param degree: (OPTIONAL) maximal total degree
    :param scale: (OPTIONAL) coefficient range
    :param support_box: (OPTIONAL) box used for maxima
    :param name: (OPTIONAL) name of the field
    :return: ScalarField
    """
    exponents = [e for e in itertools.product(range(degree + 1), repeat=dimension) if sum(e) <= degree]
    coefficients = rng.uniform(-scale, scale, len(exponents))
    return polynomial_field(dimension, list(zip(coefficients, exponents)), support_box, name)


def _bump(batch):
    # -exp(1 - 1/(1 - r²)) on the open unit ball; the cut at 1 - 1e-3 only removes values below exp(-998)
    r2 = np.sum(batch ** 2, axis=1)
    inside = r2 < 1.0 - 1e-3
    denominator = np.where(inside, 1.0 - r2, 1.0)
    value = np.where(inside, -np.exp(1.0 - 1.0 / denominator), 0.0)
    factor = np.where(inside, -2.0 / denominator ** 2, 0.0)
    return value, value[:, None] * factor[:, None] * batch


def bump_field(dimension):
    """
    The compactly supported bump b(p) = -exp(1 - 1/(1 - |p|²)) on the unit ball, 0 outside. b(0) = -1 is the global
    minimum and b ≤ 0.

    :param dimension: number of coordinates
    :return: ScalarField
    """
    return ScalarField(dimension, lambda t, batch: _bump(batch)[0], lambda t, batch: _bump(batch)[1],
                       support_box=[(-1.0, 1.0)] * dimension, compact_support=True, name='bump')


def hk_field(k):
    """
    The family H_k(x, y, z) = f(x, y)/k · sin(k² z) on Darboux(1), with f(x, y) = -exp(1 - 1/(1 - x² - y²)) on the
    unit disk. f(0, 0) = -1, f ≤ 0 and f has compact support. The field is 2π/k²-periodic in z, so its support box
    covers one period [-π/k², π/k²]; a 201 point axis then contains z = ±π/(2k²), where ±1/k is attained.

    :param k: positive integer
    :return: ScalarField
    """
    if k <= 0:
        raise InputError('H_k needs k > 0, got {}.'.format(k))
    k = float(k)
    k2 = k * k

    def value(t, batch):
        f, _ = _bump(batch[:, :2])
        return f / k * np.sin(k2 * batch[:, 2])

    def gradient(t, batch):
        f, df = _bump(batch[:, :2])
        s = np.sin(k2 * batch[:, 2])
        c = np.cos(k2 * batch[:, 2])
        out = np.empty_like(batch)
        out[:, :2] = df * (s / k)[:, None]
        out[:, 2] = f * k * c
        return out

    period = np.pi / k2
    return ScalarField(3, value, gradient, support_box=[(-1.0, 1.0), (-1.0, 1.0), (-period, period)],
                       compact_support=False, name='H_{:g}'.format(k))


def trig_polynomial_field(constant, cos_coefficients=(), sin_coefficients=(), time_coefficient=0.0,
                          name='trig polynomial'):
    """
    A Hamiltonian on the circle H_t(s) = c + Σ_j a_j cos(2πjs) + b_j sin(2πjs) + τ t. With τ = 0 the field is
    autonomous.

    :param constant: c
    :param cos_coefficients: (OPTIONAL) a_1, a_2, ...
    :param sin_coefficients: (OPTIONAL) b_1, b_2, ...
    :param time_coefficient: (OPTIONAL) τ
    :param name: (OPTIONAL) name of the field
    :return: ScalarField of dimension 1
    """
    a = np.asarray(cos_coefficients, dtype=float)
    b = np.asarray(sin_coefficients, dtype=float)
    modes_a = 2 * np.pi * np.arange(1, a.size + 1)
    modes_b = 2 * np.pi * np.arange(1, b.size + 1)

    def value(t, batch):
        s = batch[:, :1]
        return (constant + np.cos(s * modes_a) @ a + np.sin(s * modes_b) @ b + time_coefficient * t)

    def gradient(t, batch):
        s = batch[:, :1]
        derivative = -np.sin(s * modes_a) @ (a * modes_a) + np.cos(s * modes_b) @ (b * modes_b)
        return derivative[:, None]

    return ScalarField(1, value, gradient, time_dependent=time_coefficient != 0.0, support_box=[(0.0, 1.0)],
                       name=name)


def random_trig_polynomial_field(rng, degree=3, scale=1.0):
    """ An autonomous trigonometric polynomial on the circle with uniform random coefficients. """
    return trig_polynomial_field(rng.uniform(-scale, scale), rng.uniform(-scale, scale, degree),
                                 rng.uniform(-scale, scale, degree), name='random trig polynomial')


def concatenate(first, second):
    """
    The path that runs first on [0, 1/2] and second on [1/2, 1], both at double speed. Its time-1 map is the time-1
    map of second composed after the time-1 map of first.

    :param first: ScalarField
    :param second: ScalarField
    :return: time-dependent ScalarField
    """
    if first.dimension != second.dimension:
        raise InputError('Cannot concatenate fields of dimension {} and {}.'.format(first.dimension,
                                                                                    second.dimension))

    def value(t, batch):
        if t < 0.5:
            return 2.0 * first.evaluate(2.0 * t, batch)
        return 2.0 * second.evaluate(2.0 * t - 1.0, batch)

    def gradient(t, batch):
        if t < 0.5:
            return 2.0 * first.grad(2.0 * t, batch)
        return 2.0 * second.grad(2.0 * t - 1.0, batch)

    box = first.support_box if first.support_box is not None else second.support_box
    return ScalarField(first.dimension, value, gradient, time_dependent=True, support_box=box,
                       compact_support=first.compact_support and second.compact_support,
                       name='{} then {}'.format(first.name, second.name), breakpoints=(0.5,))


def blend(s, n):
    """
    The truncation β_n: β_n(s) = s for |s| ≥ 1/n, 0 for |s| < 1/(2n), and s·w(|s|) in between, with w the quintic
    smoothstep from 0 to 1 on [1/(2n), 1/n]. β_n is odd, monotone and C².

    :param s: array of values
    :param n: integer ≥ 1
    :return: array
    """
    s = np.asarray(s, dtype=float)
    weight, _ = _blend_weight(np.abs(s), n)
    return s * weight


def blend_derivative(s, n):
    """ β_n'(s) = w(|s|) + |s| w'(|s|). """
    s = np.asarray(s, dtype=float)
    weight, weight_derivative = _blend_weight(np.abs(s), n)
    return weight + np.abs(s) * weight_derivative


def _blend_weight(r, n):
    low = 1.0 / (2 * n)
    high = 1.0 / n
    u = np.clip((r - low) / (high - low), 0.0, 1.0)
    weight = u ** 3 * (10.0 - 15.0 * u + 6.0 * u ** 2)
    weight_derivative = 30.0 * u ** 2 * (1.0 - u) ** 2 / (high - low)
    return weight, weight_derivative


def truncate(G, n):
    """
    This function returns β_n ∘ G with the chain-rule gradient. It differs from G by less than 1/n everywhere.

    :param G: ScalarField
    :param n: integer ≥ 1
    :return: ScalarField
    """
    if int(n) != n or n < 1:
        raise InputError('Truncation needs an integer n >= 1, got {}.'.format(n))
    n = int(n)

    def value(t, batch):
        return blend(G.evaluate(t, batch), n)

    def gradient(t, batch):
        return blend_derivative(G.evaluate(t, batch), n)[:, None] * G.grad(t, batch)

    return ScalarField(G.dimension, value, gradient, G.time_dependent, G.support_box, G.compact_support,
                       'beta_{}({})'.format(n, G.name), G.fd_step, G.breakpoints)


def field_from_spec(spec, chart):
    """
    This function builds a field from its configuration spec: 'zero', 'reeb', 'constant:c', 'coordinate:x1',
    'hk:k', 'bump', or a mapping {'polynomial': [[c, [exponents]], ...], 'box': [[lo, hi], ...]}.

    :param spec: string or mapping
    :param chart: the chart the field lives on
    :return: ScalarField
    """
    dimension = chart.dimension
    if isinstance(spec, dict):
        if 'polynomial' not in spec:
            raise InputError('A field mapping needs a polynomial table, got keys {}.'.format(list(spec)))
        terms = [(term[0], term[1]) for term in spec['polynomial']]
        for _, exps in terms:
            if len(exps) != dimension:
                raise InputError('Polynomial term {} does not match chart dimension {}.'.format(exps, dimension))
        return polynomial_field(dimension, terms, spec.get('box'), spec.get('name', 'polynomial'))
    key = str(spec).strip().lower()
    name, _, argument = key.partition(':')
    try:
        if name == 'zero':
            return constant_field(0.0, dimension)
        if name == 'reeb':
            return constant_field(1.0, dimension)
        if name == 'constant':
            return constant_field(float(argument), dimension)
        if name == 'coordinate':
            return coordinate_field(chart, argument)
        if name == 'bump':
            return bump_field(dimension)
        if name == 'hk':
            if chart.name != 'darboux:1':
                raise InputError('H_k lives on darboux:1, not on {}.'.format(chart.name))
            return hk_field(int(argument))
    except ValueError as error:
        raise InputError('Cannot read field spec {}: {}'.format(spec, error))
    raise InputError("Unknown field spec {}, choose 'zero', 'reeb', 'constant:c', 'coordinate:x1', 'hk:k', "
                     "'bump' or a polynomial table.".format(spec))


# Dynamics ---------------------------------------------------------------------------------------------------------

@dataclass
class Trajectory:
    """ A sampled orbit t -> φ_H^t(x0) with its conformal factor g_t (g = 0 at the first time). """
    times: np.ndarray
    points: np.ndarray
    conformal: np.ndarray
    hamiltonian: ScalarField
    step: float

    @property
    def endpoint(self):
        return self.points[-1]

    @property
    def final_conformal(self):
        return float(self.conformal[-1])


@dataclass
class VerificationReport:
    """ Outcome of a numerical verification: pass flag, measured deviation, tolerance and per-sample details. """
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    details: pd.DataFrame = field(default_factory=pd.DataFrame)


class ContactDynamics:
    """
    This class computes contact Hamiltonian dynamics on a chart of the catalog.

    The contact vector field X_H is the solution of the stacked system of 2n+2 scalar equations

        α(X) = H,    dα(X, e_j) = dH(R_α) α(e_j) - dH(e_j)   (j = 1..2n+1)

    solved in the least squares sense through an SVD; the residual of all equations is checked against
    ``residual_tol`` (1 + |H| + |dH|) scaled by the size of the stacked matrix, so a wrong chart or gradient shows
    up as an InconsistentSystemError instead of a silently wrong field.

    Flows are integrated with a fixed-step classical Runge-Kutta scheme on the joint system
    (ẋ = X_{H_t}(x), ġ = dH_t(R_α)(x), g(t0) = 0). All batched methods take (N, d) coordinate arrays.

    :param chart: a chart with a contact form
    :param step: (OPTIONAL) default integrator step (1e-3)
    :param fd_step: (OPTIONAL) default step for finite difference pushforwards (1e-4)
    :param gradient_step: (OPTIONAL) finite difference step for fields built here without analytic gradient (1e-5)

    """

    residual_tol = 1e-10
    singular_tol = 1e-12

    def __init__(self, chart, step=1e-3, fd_step=1e-4, gradient_step=1e-5, loglevel='INFO'):
        self.logger = Logger('Dynamics.ContactDynamics', loglevel).logger
        if not chart.has_contact_form:
            message = 'Contact dynamics needs a contact form, chart {} only carries ω.'.format(chart.name)
            self.logger.error(message)
            raise UnsupportedFormError(message)
        if step <= 0 or fd_step <= 0 or gradient_step <= 0:
            raise InputError('Steps must be positive.')
        self.chart = chart
        self.step = step
        self.fd_step = fd_step
        self.gradient_step = gradient_step
        self.hf = HelperFunctions(loglevel=loglevel)

    def _check_field(self, H):
        if H.dimension != self.chart.dimension:
            message = 'Field {} has dimension {} but chart {} has dimension {}.'.format(
                H.name, H.dimension, self.chart.name, self.chart.dimension)
            self.logger.error(message)
            raise InputError(message)

    def _batch(self, coords):
        if isinstance(coords, Point):
            coords = coords.coords
        coords = np.asarray(coords, dtype=float)
        single = coords.ndim == 1
        batch = np.atleast_2d(coords)
        self.chart.check_coords(batch)
        return batch, single

    # Vector fields and brackets -----------------------------------------------------------------------------------

    def contact_fields(self, H, t, coords):
        """
        This function solves the stacked system for X_H at a batch of points.

        :param H: ScalarField
        :param t: time
        :param coords: (N, d) array
        :return: (N, d) array of field values
        """
        self._check_field(H)
        batch, single = self._batch(coords)
        fields, _ = self._solve(H, t, batch)
        return fields[0] if single else fields

    def _solve(self, H, t, batch):
        # Returns X_H and dH(R) on a batch
        covector = self.chart.alpha_covector(batch)
        dalpha = self.chart.dalpha_matrix(batch)
        reeb = self.chart.reeb_vector(batch)
        values = H.evaluate(t, batch)
        differential = H.grad(t, batch)
        rate = np.sum(differential * reeb, axis=1)
        matrix = np.concatenate([covector[:, None, :], np.swapaxes(dalpha, 1, 2)], axis=1)
        rhs = np.concatenate([values[:, None], rate[:, None] * covector - differential], axis=1)
        u, sv, vt = np.linalg.svd(matrix, full_matrices=False)
        if np.any(sv[:, -1] <= self.singular_tol * sv[:, 0]):
            message = 'Stacked contact system is singular on chart {}.'.format(self.chart.name)
            self.logger.error(message)
            raise DegenerateChartError(message)
        coefficients = np.einsum('nij,ni->nj', u, rhs) / sv
        fields = np.einsum('nji,nj->ni', vt, coefficients)
        residual = np.max(np.abs(np.einsum('nij,nj->ni', matrix, fields) - rhs), axis=1)
        bound = self.residual_tol * (1.0 + np.abs(values) + np.max(np.abs(differential), axis=1)) * \
            np.maximum(1.0, sv[:, 0])
        if np.any(residual > bound):
            worst = int(np.argmax(residual - bound))
            message = 'Contact system for {} is inconsistent at {} (residual {:.3e} > {:.3e}).'.format(
                H.name, batch[worst], residual[worst], bound[worst])
            self.logger.error(message)
            raise InconsistentSystemError(message)
        return fields, rate

    def contact_field_at(self, H, t, p):
        """
        This function returns the contact vector field X_H(t, p): α(X) = H and
        dα(X, -) = dH(R_α) α(-) - dH(-).

        :param H: ScalarField
        :param t: time
        :param p: Point
        :return: TangentVector
        """
        return TangentVector(p, self.contact_fields(H, t, p.coords))

    def conformal_rates(self, H, t, coords):
        """ dH_t(R_α) on a batch of points. """
        self._check_field(H)
        batch, single = self._batch(coords)
        rates = np.sum(H.grad(t, batch) * self.chart.reeb_vector(batch), axis=1)
        return float(rates[0]) if single else rates

    def conformal_rate_at(self, H, t, p):
        """
        This function returns dH_{(t, p)}(R_α(p)), the rate of the conformal factor along the flow.

        :param H: ScalarField
        :param t: time
        :param p: Point
        :return: float
        """
        return self.conformal_rates(H, t, p.coords)

    def contact_brackets(self, F, G, coords, variant='cpb'):
        """
        Contact brackets on a batch of points. variant='cpb' is {F, G}_c = dF(X_G) + dG(R_α)·F;
        variant='minus' is the antisymmetric {F, G}_- = dF(X_G) - dG(R_α)·F.

        :param F: time-independent ScalarField
        :param G: time-independent ScalarField
        :param coords: (N, d) array
        :param variant: (OPTIONAL) 'cpb' or 'minus'
        :return: (N,) array
        """
        if F.time_dependent or G.time_dependent:
            message = 'The contact bracket is defined for time-independent fields; freeze them with frozen(t).'
            self.logger.error(message)
            raise InputError(message)
        if variant not in ('cpb', 'minus'):
            raise InputError("Unknown bracket variant {}, choose 'cpb' or 'minus'.".format(variant))
        batch, single = self._batch(coords)
        field_g = self.contact_fields(G, 0.0, batch)
        sign = 1.0 if variant == 'cpb' else -1.0
        brackets = np.sum(F.grad(0.0, batch) * field_g, axis=1) + \
            sign * self.conformal_rates(G, 0.0, batch) * F.evaluate(0.0, batch)
        return float(brackets[0]) if single else brackets

    def contact_bracket_at(self, F, G, p, variant='cpb'):
        """
        This function evaluates the contact Poisson bracket {F, G}_c = dF(X_G) + dG(R_α)·F at p, with X_G from
        contact_field_at. With variant='minus' the sign-flipped bracket dF(X_G) - dG(R_α)·F is returned instead.

        :param F: time-independent ScalarField
        :param G: time-independent ScalarField
        :param p: Point
        :param variant: (OPTIONAL) 'cpb' or 'minus'
        :return: float
        """
        return self.contact_brackets(F, G, p.coords, variant)

    # Integration --------------------------------------------------------------------------------------------------

    def _rates(self, H, t, batch):
        self.chart.check_coords(batch)
        return self._solve(H, t, batch)

    @staticmethod
    def time_grid(H, t0, t1, step):
        """
        This function returns the integration times from t0 to t1: equal steps of at most ``step`` between
        consecutive breakpoints of H.

        :param H: ScalarField
        :param t0: start time
        :param t1: end time
        :param step: maximal step
        :return: increasing array starting at t0 and ending at t1
        """
        edges = [t0] + [b for b in H.breakpoints if t0 < b < t1] + [t1]
        times = [np.array([t0])]
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            n_steps = int(np.ceil((b - a) / step - 1e-9))
            segment = a + (b - a) / n_steps * np.arange(1, n_steps + 1)
            segment[-1] = b
            times.append(segment)
        return np.concatenate(times)

    def _integrate(self, H, coords, t_span, step, keep_history):
        self._check_field(H)
        batch, _ = self._batch(coords)
        t0, t1 = float(t_span[0]), float(t_span[1])
        step = self.step if step is None else step
        if step <= 0:
            raise InputError('Integrator step must be positive, got {}.'.format(step))
        if t1 < t0:
            raise InputError('Time span must be increasing, got {}.'.format(t_span))
        times = self.time_grid(H, t0, t1, step)
        state = batch.copy()
        conformal = np.zeros(batch.shape[0])
        points_history = [state.copy()] if keep_history else None
        conformal_history = [conformal.copy()] if keep_history else None
        for i in range(len(times) - 1):
            t = times[i]
            h = times[i + 1] - t
            # Paths may jump at a breakpoint; the last stage of a step ending there uses the left limit
            t_end = np.nextafter(times[i + 1], t) if times[i + 1] in H.breakpoints else times[i + 1]
            k1x, k1g = self._rates(H, t, state)
            k2x, k2g = self._rates(H, t + h / 2, state + h / 2 * k1x)
            k3x, k3g = self._rates(H, t + h / 2, state + h / 2 * k2x)
            k4x, k4g = self._rates(H, t_end, state + h * k3x)
            new_state = state + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
            new_conformal = conformal + h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g)
            if not (np.all(np.isfinite(new_state)) and np.all(np.isfinite(new_conformal))):
                message = 'Flow of {} blew up after t = {}.'.format(H.name, t)
                self.logger.error(message)
                raise BlowUpError(message, last_time=float(t))
            state, conformal = new_state, new_conformal
            if keep_history:
                points_history.append(state.copy())
                conformal_history.append(conformal.copy())
        if keep_history:
            return times, np.stack(points_history), np.stack(conformal_history)
        return times, state, conformal

    def flow_points(self, H, coords, t_span=(0.0, 1.0), step=None):
        """
        This function flows a batch of points and returns the end points (circle axes not reduced, so that finite
        differences of flow maps stay continuous) and the conformal factors.

        :param H: ScalarField
        :param coords: (N, d) array
        :param t_span: (OPTIONAL) (t0, t1)
        :param step: (OPTIONAL) integrator step, default self.step
        :return: (N, d) end points, (N,) conformal factors
        """
        _, state, conformal = self._integrate(H, coords, t_span, step, keep_history=False)
        return state, conformal

    def flow_history(self, H, coords, t_span=(0.0, 1.0), step=None):
        """
        This function flows a batch of points and keeps every step.

        :param H: ScalarField
        :param coords: (N, d) array
        :param t_span: (OPTIONAL) (t0, t1)
        :param step: (OPTIONAL) integrator step
        :return: times (T,), points (T, N, d) (not reduced), conformal (T, N)
        """
        return self._integrate(H, coords, t_span, step, keep_history=True)

    def integrate_isotopy(self, H, x0, t_span=(0.0, 1.0), step=None):
        """
        This function integrates the orbit of x0 under the contact isotopy of H together with its conformal factor.
        The stored points are reduced on circle axes.

        :param H: ScalarField
        :param x0: Point (or coordinate vector)
        :param t_span: (OPTIONAL) (t0, t1)
        :param step: (OPTIONAL) integrator step, default self.step
        :return: Trajectory
        """
        coords = x0.coords if isinstance(x0, Point) else np.asarray(x0, dtype=float)
        times, points, conformal = self.flow_history(H, coords.reshape(1, -1), t_span, step)
        step = self.step if step is None else step
        return Trajectory(times, self.chart.reduce(points[:, 0, :]), conformal[:, 0], H, step)

    def trajectory_residual(self, trajectory):
        """
        This function re-runs one integrator step from every sample of a trajectory and returns the largest mismatch
        with the next sample (circle axes compared mod 1) and whether it is within 10·step⁵.

        :param trajectory: Trajectory
        :return: (passed, max residual)
        """
        residual = 0.0
        H = trajectory.hamiltonian
        for i in range(len(trajectory.times) - 1):
            span = (trajectory.times[i], trajectory.times[i + 1])
            end, g = self.flow_points(H, trajectory.points[i][None], span, step=span[1] - span[0])
            difference = end[0] - trajectory.points[i + 1]
            if self.chart.periodic:
                axes = list(self.chart.periodic)
                difference[axes] -= np.round(difference[axes])
            mismatch = max(float(np.max(np.abs(difference))),
                           abs(trajectory.conformal[i] + g[0] - trajectory.conformal[i + 1]))
            residual = max(residual, mismatch)
        return residual <= 10 * trajectory.step ** 5, residual

    def convergence_ratio(self, H, x0, t_span, step, exact_endpoint):
        """
        This function measures the ratio of endpoint errors at step and step/2. A fourth order scheme gives about 16.

        :param H: ScalarField
        :param x0: coordinate vector
        :param t_span: (t0, t1)
        :param step: coarse step
        :param exact_endpoint: closed-form endpoint
        :return: error ratio
        """
        coarse, _ = self.flow_points(H, np.atleast_2d(x0), t_span, step)
        fine, _ = self.flow_points(H, np.atleast_2d(x0), t_span, step / 2)
        coarse_error = np.max(np.abs(coarse[0] - exact_endpoint))
        fine_error = np.max(np.abs(fine[0] - exact_endpoint))
        self.logger.debug('Endpoint errors {:.3e} (step {}) and {:.3e} (step {}).'.format(
            coarse_error, step, fine_error, step / 2))
        return float(coarse_error / fine_error)

    # Pushforwards and conformal factors ---------------------------------------------------------------------------

    def flow_map(self, H, t_span=(0.0, 1.0), step=None):
        """ The time map of H as a vectorized function of (N, d) arrays. """
        return lambda coords: self.flow_points(H, coords, t_span, step)[0]

    def pushforward(self, mapping, coords, fd_step=None):
        """
        This function estimates the differential of a vectorized map at a batch of points by central differences.
        The map is called once on all stencils together.

        :param mapping: function from (M, d) arrays to (M, d) arrays
        :param coords: (N, d) array
        :param fd_step: (OPTIONAL) finite difference step, default self.fd_step
        :return: images (N, d), jacobians (N, d, d)
        """
        batch, _ = self._batch(coords)
        h = self.fd_step if fd_step is None else fd_step
        return self.hf.central_difference(mapping, batch, h, with_center=True)

    def measured_conformal(self, mapping, coords, fd_step=None):
        """
        This function recovers the conformal factor g of a contactomorphism, φ*α = e^g α, from
        α_{φ(p)}(dφ_p R_α(p)) = e^{g(p)}.

        :param mapping: function from (M, d) arrays to (M, d) arrays
        :param coords: (N, d) array
        :param fd_step: (OPTIONAL) finite difference step
        :return: (N,) array
        """
        batch, _ = self._batch(coords)
        images, jacobians = self.pushforward(mapping, batch, fd_step)
        pushed = np.einsum('nij,nj->ni', jacobians, self.chart.reeb_vector(batch))
        return np.log(np.sum(self.chart.alpha_covector(images) * pushed, axis=1))

    def verify_contactomorphism(self, H, p, t, fd_step=None, tol=1e-6, step=None):
        """
        This function checks φ*α = e^{g_t} α for the time-t map of H at p: dφ^t is estimated by central differences
        over nearby integrated trajectories and the residual max_v |α(dφ^t v) - e^{g_t} α(v)| over the coordinate
        basis is compared with tol.

        :param H: ScalarField
        :param p: Point (or coordinate vector)
        :param t: flow time
        :param fd_step: (OPTIONAL) finite difference step
        :param tol: (OPTIONAL) tolerance
        :param step: (OPTIONAL) integrator step
        :return: VerificationReport
        """
        coords = p.coords if isinstance(p, Point) else np.asarray(p, dtype=float)
        batch = coords.reshape(1, -1)
        images, jacobians = self.pushforward(self.flow_map(H, (0.0, t), step), batch, fd_step)
        _, conformal = self.flow_points(H, batch, (0.0, t), step)
        pulled = self.chart.alpha_covector(images)[0] @ jacobians[0]
        expected = np.exp(conformal[0]) * self.chart.alpha_covector(batch)[0]
        deviations = np.abs(pulled - expected)
        details = pd.DataFrame({'direction': np.arange(coords.size), 'pulled_back': pulled,
                                'expected': expected, 'deviation': deviations})
        worst = float(np.max(deviations))
        self.logger.debug('Pullback check for {}:\n{}'.format(H.name, details.to_string()))
        return VerificationReport('contactomorphism', worst <= tol, worst, tol, details)

    def verify_conformal_composition(self, F, G, coords, tol=1e-5, step=None, fd_step=None):
        """
        This function checks that the measured conformal factor of ψ∘φ (φ the time-1 map of F, ψ that of G) equals
        g_ψ∘φ + g_φ.

        :param F: ScalarField generating φ
        :param G: ScalarField generating ψ
        :param coords: (N, d) sample points
        :param tol: (OPTIONAL) tolerance
        :return: VerificationReport
        """
        batch, _ = self._batch(coords)

        def composed(points):
            return self.flow_points(G, self.flow_points(F, points, step=step)[0], step=step)[0]

        measured = self.measured_conformal(composed, batch, fd_step)
        middle, g_first = self.flow_points(F, batch, step=step)
        _, g_second = self.flow_points(G, middle, step=step)
        predicted = g_second + g_first
        deviations = np.abs(measured - predicted)
        details = pd.DataFrame({'measured': measured, 'predicted': predicted, 'deviation': deviations})
        worst = float(np.max(deviations))
        return VerificationReport('conformal composition', worst <= tol, worst, tol, details)

    def verify_conformal_inverse(self, F, coords, tol=1e-5, step=None, fd_step=None):
        """
        This function checks g_{φ^{-1}} = -g_φ∘φ^{-1} for the time-1 map φ of F. φ^{-1} is the time-1 map of the
        reversed path; its conformal factor is both integrated and measured from the pullback of α.

        :param F: ScalarField
        :param coords: (N, d) sample points q
        :param tol: (OPTIONAL) tolerance
        :return: VerificationReport
        """
        batch, _ = self._batch(coords)
        reversed_field = F.time_reversed()
        preimages, g_inverse = self.flow_points(reversed_field, batch, step=step)
        _, g_forward = self.flow_points(F, preimages, step=step)
        measured = self.measured_conformal(self.flow_map(reversed_field, step=step), batch, fd_step)
        deviations = np.maximum(np.abs(g_inverse + g_forward), np.abs(measured + g_forward))
        details = pd.DataFrame({'integrated': g_inverse, 'measured': measured, 'predicted': -g_forward,
                                'deviation': deviations})
        worst = float(np.max(deviations))
        return VerificationReport('conformal inverse', worst <= tol, worst, tol, details)

    # Hamiltonian-level utilities ----------------------------------------------------------------------------------

    def transported_field(self, F, H_psi, t=1.0, step=None):
        """
        The field e^{-g} F∘φ for φ the time-t map of H_psi and g its conformal factor. Its contact vector field is
        the pullback of X_F by φ. The gradient is taken by central differences.

        :param F: time-independent ScalarField
        :param H_psi: ScalarField generating φ
        :param t: (OPTIONAL) flow time
        :param step: (OPTIONAL) integrator step
        :return: ScalarField
        """
        def value(_, batch):
            images, conformal = self.flow_points(H_psi, batch, (0.0, t), step)
            return np.exp(-conformal) * F.evaluate(0.0, images)

        return ScalarField(F.dimension, value, None, False, name='transported({})'.format(F.name),
                           fd_step=self.gradient_step)

    def transition_hamiltonian(self, G, H, step=None):
        """
        This function returns the Hamiltonian of the isotopy φ_G^{-t} ∘ φ_H^t:
        (t, p) -> e^{-g_t(p)} (H_t - G_t)(φ_G^t(p)), with g_t the conformal factor of φ_G^t. The flow of G is
        re-integrated on demand from 0 to t for every evaluation; the gradient is taken by central differences.

        :param G: ScalarField
        :param H: ScalarField
        :param step: (OPTIONAL) integrator step of the inner G-flow
        :return: time-dependent ScalarField
        """
        self._check_field(G)
        self._check_field(H)

        def value(t, batch):
            if t <= 0.0:
                return H.evaluate(t, batch) - G.evaluate(t, batch)
            images, conformal = self.flow_points(G, batch, (0.0, t), step)
            return np.exp(-conformal) * (H.evaluate(t, images) - G.evaluate(t, images))

        return ScalarField(G.dimension, value, None, True, name='transition({}, {})'.format(G.name, H.name),
                           fd_step=self.gradient_step)

    def truncate(self, G, n):
        """ β_n ∘ G, see the module function truncate. """
        return truncate(G, n)

    def verify_conformal_naturality(self, H_psi, F, G, coords, tol=1e-5, variant='minus', step=None):
        """
        This function compares, at each sample p, the bracket of the transported fields e^{-g}F∘φ and e^{-g}G∘φ with
        e^{-g(p)}·{F, G}(φ(p)), φ the time-1 map of H_psi. Both bracket variants are reported; the pass flag
        uses the requested variant.

        :param H_psi: ScalarField generating φ
        :param F: time-independent ScalarField
        :param G: time-independent ScalarField
        :param coords: (N, d) sample points
        :param tol: (OPTIONAL) tolerance
        :param variant: (OPTIONAL) bracket variant used for the verdict
        :return: VerificationReport
        """
        batch, _ = self._batch(coords)
        time0 = time.time()
        images, conformal = self.flow_points(H_psi, batch, step=step)
        transported_f = self.transported_field(F, H_psi, step=step)
        transported_g = self.transported_field(G, H_psi, step=step)
        columns = {}
        for name in ('cpb', 'minus'):
            lhs = self.contact_brackets(transported_f, transported_g, batch, name)
            rhs = np.exp(-conformal) * self.contact_brackets(F, G, images, name)
            columns['lhs_' + name] = lhs
            columns['rhs_' + name] = rhs
            columns['deviation_' + name] = np.abs(lhs - rhs)
        details = pd.DataFrame(columns)
        worst = float(details['deviation_' + variant].max())
        self.logger.info('Conformal naturality ({}) checked on {} samples in {:.2f} seconds, max deviation {:.3e}.'
                         .format(variant, batch.shape[0], time.time() - time0, worst))
        return VerificationReport('conformal naturality', worst <= tol, worst, tol, details)
