#!/usr/bin/env python
"""
Submanifolds.py: Parametrized submanifold patches, tangent-space linear algebra and the pointwise tests for
contact coisotropic, Legendrian and infinitesimally displaceable submanifolds.
"""

__version__ = "0.1"

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional
import numpy as np
import pandas as pd
# Own modules:
from Logging import Logger
from Exceptions import InputError, DegeneratePatchError, PreconditionError
from Charts import Point, DarbouxChart
from Dynamics import (ContactDynamics, ScalarField, coordinate_field, constant_field, polynomial_field,
                      random_polynomial_field)
from Helper_functions import HelperFunctions


@dataclass
class SubmanifoldPatch:
    """
    A sampled parametrized piece of a submanifold. ``param`` maps an (M, k) array of parameters to (M, d) ambient
    coordinates; ``jacobian`` (optional) maps them to (M, d, k) tangent frames, otherwise central differences with
    ``fd_step`` are used. ``defining_functions`` vanish on the patch and generate its vanishing ideal;
    ``expected_coisotropic`` is the classification the fixture is known to have (None for custom patches).
    """
    name: str
    chart_name: str
    intrinsic_dim: int
    param: Callable
    sample_grid: np.ndarray
    jacobian: Optional[Callable] = None
    defining_functions: List[ScalarField] = field(default_factory=list)
    expected_coisotropic: Optional[bool] = None
    expected_legendrian: Optional[bool] = None
    fd_step: float = 1e-5

    def points(self, params=None):
        params = self.sample_grid if params is None else np.atleast_2d(params)
        return np.asarray(self.param(params), dtype=float)

    def jacobians(self, params=None):
        """ Tangent frames (M, d, k) at the given parameters (default: the sample grid). """
        params = self.sample_grid if params is None else np.atleast_2d(params)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(params), dtype=float)
        n_samples, k = params.shape
        if k == 0:
            return np.zeros((n_samples, self.points(params).shape[1], 0))
        return HelperFunctions.central_difference(self.points, params, self.fd_step)


@dataclass
class Subspace:
    """ A linear subspace of T_pM given by orthonormal columns. """
    base: Point
    basis: np.ndarray

    @property
    def dim(self):
        return self.basis.shape[1]

    def is_orthonormal(self, tol=1e-12):
        return bool(np.max(np.abs(self.basis.T @ self.basis - np.eye(self.dim)), initial=0.0) <= tol)


@dataclass
class CoisotropyVerdict:
    """
    Per-sample records of a pointwise test and the overall verdict, which passes iff every record passes.
    ``kind`` is 'coisotropic', 'legendrian' or 'displaceable'.
    """
    patch: str
    kind: str
    records: pd.DataFrame
    tolerance: float

    @property
    def passed(self):
        return bool(self.records['passed'].all()) if len(self.records) else True

    @property
    def max_residual(self):
        return float(self.records['residual'].max()) if len(self.records) else 0.0


# Patch fixtures ---------------------------------------------------------------------------------------------------

def _grid(*axes):
    if not axes:
        return np.zeros((1, 0))
    return np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, len(axes))


def _linear_patch(name, chart_name, dimension, columns, offset, grid, defining, coisotropic, legendrian=None):
    # Patches of the form u -> offset + Σ u_j e_{columns[j]}
    offset = np.asarray(offset, dtype=float)
    frame = np.zeros((dimension, len(columns)))
    for j, column in enumerate(columns):
        frame[column, j] = 1.0

    def param(params):
        return offset + params @ frame.T

    def jacobian(params):
        return np.broadcast_to(frame, (params.shape[0],) + frame.shape).copy()

    return SubmanifoldPatch(name, chart_name, len(columns), param, grid, jacobian, defining, coisotropic, legendrian)


def _coordinates(labels, chart):
    return [coordinate_field(chart, label) for label in labels]


def _sphere_patch():
    polar = np.linspace(0.3, np.pi - 0.3, 5)
    azimuth = np.linspace(0.0, 2 * np.pi, 6, endpoint=False)

    def param(params):
        phi, lam = params[:, 0], params[:, 1]
        return np.stack([np.sin(phi) * np.cos(lam), np.sin(phi) * np.sin(lam), np.cos(phi)], axis=1)

    def jacobian(params):
        phi, lam = params[:, 0], params[:, 1]
        d_phi = np.stack([np.cos(phi) * np.cos(lam), np.cos(phi) * np.sin(lam), -np.sin(phi)], axis=1)
        d_lam = np.stack([-np.sin(phi) * np.sin(lam), np.sin(phi) * np.cos(lam), np.zeros_like(phi)], axis=1)
        return np.stack([d_phi, d_lam], axis=2)

    radius = polynomial_field(3, [(1.0, (2, 0, 0)), (1.0, (0, 2, 0)), (1.0, (0, 0, 2)), (-1.0, (0, 0, 0))],
                              name='r^2 - 1')
    return SubmanifoldPatch('sphere', 'darboux:1', 2, param, _grid(polar, azimuth), jacobian, [radius], True, False)


def _circle_point_patch(s0=0.3):
    def param(params):
        return np.full((params.shape[0], 1), s0)

    vanishing = ScalarField(1, lambda t, batch: np.sin(2 * np.pi * (batch[:, 0] - s0)),
                            lambda t, batch: (2 * np.pi * np.cos(2 * np.pi * (batch[:, 0] - s0)))[:, None],
                            support_box=[(0.0, 1.0)], name='sin 2π(s - s0)')
    return SubmanifoldPatch('circle-point', 'circle', 0, param, _grid(), None, [vanishing], True, True)


def patch_from_name(name, samples=11):
    """
    This function returns a fixture patch by name:

    - darboux:1: 'legendrian-axis' (x-axis), 'z-axis', 'plane-y0', 'sphere' (unit sphere without the poles),
      'pre-lagrangian-plane' ({x = 0})
    - darboux:2: 'non-coiso-surface-n2' ({x2 = y1 = y2 = 0}), 'legendrian-plane-n2' ({y1 = y2 = z = 0})
    - circle: 'circle-point'
    - planar prequantization base: 'base-line-y0', 'base-point', 'base-plane'

    :param name: fixture name
    :param samples: (OPTIONAL) samples per parameter axis for the straight fixtures
    :return: SubmanifoldPatch
    """
    key = str(name).strip().lower()
    line = np.linspace(-1.0, 1.0, samples)
    square = _grid(np.linspace(-1.0, 1.0, 5), np.linspace(-1.0, 1.0, 5))
    d1 = DarbouxChart(1, loglevel='WARNING')
    d2 = DarbouxChart(2, loglevel='WARNING')
    if key == 'legendrian-axis':
        return _linear_patch(key, 'darboux:1', 3, [0], np.zeros(3), _grid(line),
                             _coordinates(['y1', 'z'], d1), True, True)
    if key == 'z-axis':
        return _linear_patch(key, 'darboux:1', 3, [2], np.zeros(3), _grid(line),
                             _coordinates(['x1', 'y1'], d1), False, False)
    if key == 'plane-y0':
        return _linear_patch(key, 'darboux:1', 3, [0, 2], np.zeros(3), square,
                             _coordinates(['y1'], d1), True, False)
    if key == 'sphere':
        return _sphere_patch()
    if key == 'pre-lagrangian-plane':
        return _linear_patch(key, 'darboux:1', 3, [1, 2], np.zeros(3), square,
                             _coordinates(['x1'], d1), True, False)
    if key == 'non-coiso-surface-n2':
        return _linear_patch(key, 'darboux:2', 5, [0, 4], np.zeros(5), square,
                             _coordinates(['x2', 'y1', 'y2'], d2), False, False)
    if key == 'legendrian-plane-n2':
        return _linear_patch(key, 'darboux:2', 5, [0, 1], np.zeros(5), square,
                             _coordinates(['y1', 'y2', 'z'], d2), True, True)
    if key == 'circle-point':
        return _circle_point_patch()
    if key == 'base-line-y0':
        return _linear_patch(key, 'plane', 2, [0], np.zeros(2), _grid(line), [], True)
    if key == 'base-point':
        return _linear_patch(key, 'plane', 2, [], np.array([0.3, -0.2]), _grid(), [], False)
    if key == 'base-plane':
        return _linear_patch(key, 'plane', 2, [0, 1], np.zeros(2), square, [], True)
    raise InputError('Unknown fixture {}.'.format(name))


def patch_from_spec(spec):
    """
    This function builds a patch from its configuration spec: a fixture name, or a mapping with a polynomial
    parametrization table

        {chart: darboux:1, intrinsic_dim: 1, parametrization: [[[1.0, [1]]], [], []],
         grid: [[-1, 1, 11]], coisotropic: true}

    holding one term list per ambient coordinate (exponents over the parameters).

    :param spec: string or mapping
    :return: SubmanifoldPatch
    """
    if not isinstance(spec, dict):
        return patch_from_name(spec)
    try:
        k = int(spec['intrinsic_dim'])
        table = spec['parametrization']
        grid_spec = spec.get('grid', [])
        chart_name = str(spec.get('chart', 'darboux:1'))
    except (KeyError, TypeError, ValueError) as error:
        raise InputError('Patch spec needs intrinsic_dim and parametrization: {}'.format(error))
    if len(grid_spec) != k:
        raise InputError('Patch spec needs one grid entry [low, high, count] per parameter, got {}.'.format(grid_spec))
    coordinates = []
    for terms in table:
        for term in terms:
            if len(term[1]) != k:
                raise InputError('Exponent list {} does not match intrinsic_dim {}.'.format(term[1], k))
        coordinates.append(polynomial_field(k, [(term[0], term[1]) for term in terms]))

    def param(params):
        return np.stack([c.evaluate(0.0, params) for c in coordinates], axis=1)

    def jacobian(params):
        return np.stack([c.grad(0.0, params) for c in coordinates], axis=1)

    grid = _grid(*[np.linspace(float(low), float(high), int(count)) for low, high, count in grid_spec])
    expected = spec.get('coisotropic')
    return SubmanifoldPatch(str(spec.get('name', 'custom')), chart_name, k, param, grid, jacobian, [],
                            None if expected is None else bool(expected))


# Analysis ---------------------------------------------------------------------------------------------------------

class SubmanifoldAnalysis:
    """
    This class runs the pointwise tests on the samples of a patch in a contact chart.

    Rank decisions use ``rank_tol`` relative to the natural scale of each matrix; inclusions are measured by the
    sine of the largest principal angle (see HelperFunctions.containment_sine).

    :param chart: contact chart the patches live in
    :param rank_tol: (OPTIONAL) relative rank tolerance (1e-10)
    :param step: (OPTIONAL) integrator step used for flows

    """

    def __init__(self, chart, rank_tol=1e-10, step=1e-3, loglevel='INFO'):
        self.logger = Logger('Submanifolds.SubmanifoldAnalysis', loglevel).logger
        self.loglevel = loglevel
        self.chart = chart
        self.rank_tol = rank_tol
        self.dynamics = ContactDynamics(chart, step=step, loglevel=loglevel)
        self.hf = HelperFunctions(loglevel=loglevel)

    def check_patch(self, patch):
        """ Rejects a patch from another chart or with an empty sample grid. """
        if patch.chart_name != self.chart.name:
            message = 'Patch {} lives on {}, not on {}.'.format(patch.name, patch.chart_name, self.chart.name)
            self.logger.error(message)
            raise InputError(message)
        if patch.sample_grid.shape[0] == 0:
            message = 'Patch {} has an empty sample grid.'.format(patch.name)
            self.logger.error(message)
            raise PreconditionError(message)

    def tangent_space(self, patch, u):
        """
        This function returns the point and an orthonormal basis of T_pY at the parameter u.

        :param patch: SubmanifoldPatch
        :param u: parameter vector of length k
        :return: Point, (d, k) orthonormal columns
        """
        u = np.asarray(u, dtype=float).reshape(1, patch.intrinsic_dim)
        coords = patch.points(u)[0]
        frame = patch.jacobians(u)[0]
        if patch.intrinsic_dim > 0:
            sv = np.linalg.svd(frame, compute_uv=False)
            if sv[-1] <= self.rank_tol * max(1.0, sv[0]):
                message = 'Jacobian of {} is rank deficient at u = {} (singular values {}).'.format(
                    patch.name, u[0], sv)
                self.logger.error(message)
                raise DegeneratePatchError(message)
        return self.chart.point(coords), self.hf.orthonormal_basis(frame, self.rank_tol)

    def cap_xi(self, patch, u):
        """
        This function returns T_pY ∩ ξ_p at the sample with parameter u, as the null space of α restricted to an
        orthonormal basis of T_pY.

        :param patch: SubmanifoldPatch
        :param u: parameter vector
        :return: Subspace
        """
        p, tangent = self.tangent_space(patch, u)
        covector = self.chart.alpha_covector(p.coords)
        restricted = (covector @ tangent)[None, :]
        kernel = self.hf.null_space(restricted, self.rank_tol, scale=np.linalg.norm(covector))
        return Subspace(p, tangent @ kernel)

    def xi_basis(self, p):
        """ Orthonormal basis of the contact hyperplane ξ_p. """
        return self.hf.null_space(self.chart.alpha_covector(p.coords)[None, :], self.rank_tol)

    def dalpha_perp(self, V, p):
        """
        This function returns the dα-orthogonal complement of V inside ξ_p:
        {w ∈ ξ_p : dα_p(w, v) = 0 for all v ∈ V}.

        :param V: Subspace with V ⊆ ξ_p
        :param p: Point
        :return: Subspace
        """
        covector = self.chart.alpha_covector(p.coords)
        leak = float(np.max(np.abs(covector @ V.basis), initial=0.0))
        if leak > max(self.rank_tol, 1e-12) * max(1.0, np.linalg.norm(covector)):
            message = 'Subspace is not inside ξ_p (|α(v)| up to {:.3e}).'.format(leak)
            self.logger.error(message)
            raise PreconditionError(message)
        xi = self.xi_basis(p)
        dalpha = self.chart.dalpha_matrix(p.coords)
        pairing = V.basis.T @ dalpha.T @ xi
        scale = np.linalg.norm(dalpha, 2)
        kernel = self.hf.null_space(pairing, self.rank_tol, scale=scale)
        return Subspace(p, self.hf.orthonormal_basis(xi @ kernel, self.rank_tol))

    def coisotropy_test(self, patch, tol=1e-8):
        """
        This function checks (T_pY ∩ ξ_p)^{⊥dα} ⊆ T_pY ∩ ξ_p at every sample. The dimension of T_pY ∩ ξ_p is
        reported per sample since it may jump (points where a hypersurface is tangent to ξ).

        :param patch: SubmanifoldPatch
        :param tol: (OPTIONAL) tolerance on the inclusion residual
        :return: CoisotropyVerdict
        """
        self.check_patch(patch)
        records = []
        for u in patch.sample_grid:
            cap = self.cap_xi(patch, u)
            perp = self.dalpha_perp(cap, cap.base)
            residual = self.hf.containment_sine(perp.basis, cap.basis)
            records.append({'u': tuple(np.round(u, 12)), 'dim_cap': cap.dim, 'dim_perp': perp.dim,
                            'residual': residual, 'passed': residual <= tol})
        verdict = CoisotropyVerdict(patch.name, 'coisotropic', pd.DataFrame(records), tol)
        self.logger.debug('Coisotropy records for {}:\n{}'.format(patch.name, verdict.records.to_string()))
        self.logger.info('Patch {}: coisotropic = {} (max residual {:.3e}).'.format(
            patch.name, verdict.passed, verdict.max_residual))
        return verdict

    def legendrian_test(self, patch, tol=1e-8):
        """
        This function checks that the patch has dimension n and that α vanishes on its tangent frames.

        :param patch: SubmanifoldPatch
        :param tol: (OPTIONAL) tolerance on |α(v)| for unit tangent vectors v
        :return: CoisotropyVerdict
        """
        self.check_patch(patch)
        right_dimension = patch.intrinsic_dim == self.chart.half_dimension
        records = []
        for u in patch.sample_grid:
            p, tangent = self.tangent_space(patch, u)
            covector = self.chart.alpha_covector(p.coords)
            residual = float(np.max(np.abs(covector @ tangent), initial=0.0)) / max(1.0, np.linalg.norm(covector))
            records.append({'u': tuple(np.round(u, 12)), 'dimension': patch.intrinsic_dim, 'residual': residual,
                            'passed': right_dimension and residual <= tol})
        return CoisotropyVerdict(patch.name, 'legendrian', pd.DataFrame(records), tol)

    def displaceability_test(self, patch, H, tol=1e-8):
        """
        This function checks that X_H(x) is nonzero and not tangent to the patch at every sample: the distance from
        X_H(x) to T_xN has to exceed tol·|X_H(x)|. Samples where this fails are reported as witnesses.

        :param patch: SubmanifoldPatch
        :param H: time-independent ScalarField
        :param tol: (OPTIONAL) relative tolerance
        :return: CoisotropyVerdict (kind 'displaceable')
        """
        self.check_patch(patch)
        if H.time_dependent:
            message = 'Infinitesimal displaceability is tested for time-independent fields.'
            self.logger.error(message)
            raise InputError(message)
        records = []
        for u in patch.sample_grid:
            p, tangent = self.tangent_space(patch, u)
            vector = self.dynamics.contact_fields(H, 0.0, p.coords)
            size = float(np.linalg.norm(vector))
            distance = float(np.linalg.norm(vector - tangent @ (tangent.T @ vector)))
            witness = size == 0.0 or distance <= tol * size
            records.append({'u': tuple(np.round(u, 12)), 'field_norm': size, 'distance': distance,
                            'residual': distance / size if size > 0 else 0.0, 'witness': witness,
                            'passed': not witness})
        return CoisotropyVerdict(patch.name, 'displaceable', pd.DataFrame(records), tol)

    # Local frames -------------------------------------------------------------------------------------------------

    def local_frame_rank(self, x, labels):
        """
        This function evaluates X_F(x) for the coordinate functions F named in labels (e.g. ['x1', 'y2', 'z']) and
        returns the vectors as columns with their numerical rank.

        :param x: Point
        :param labels: coordinate labels
        :return: (d, m) array, rank
        """
        fields = [coordinate_field(self.chart, label) for label in labels]
        vectors = np.stack([self.dynamics.contact_fields(F, 0.0, x.coords) for F in fields], axis=1)
        return vectors, self.hf.numerical_rank(vectors, self.rank_tol, scale=max(1.0, np.abs(vectors).max()))

    def frame_embedding(self, x, labels, a, step=None):
        """
        This function evaluates (a_1, ..., a_m) -> φ^1_{Σ a_i F_i}(x) for the coordinate functions F_i named in
        labels. Its differential at a = 0 is the frame of local_frame_rank.

        :param x: Point
        :param labels: coordinate labels
        :param a: (m,) or (M, m) coefficients
        :param step: (OPTIONAL) integrator step
        :return: (d,) or (M, d) end points
        """
        a = np.asarray(a, dtype=float)
        single = a.ndim == 1
        coefficients = np.atleast_2d(a)
        ends = []
        for row in coefficients:
            H = constant_field(0.0, self.chart.dimension)
            for c, label in zip(row, labels):
                H = H + coordinate_field(self.chart, label) * float(c)
            ends.append(self.dynamics.flow_points(H, x.coords[None], step=step)[0][0])
        ends = np.stack(ends)
        return ends[0] if single else ends

    # Flows of patches ---------------------------------------------------------------------------------------------

    def flowed_patch(self, patch, H, t, step=None, fd_step=1e-5):
        """
        This function returns the patch φ_H^t(Y); its tangent frames are central differences of the flowed
        parametrization.

        :param patch: SubmanifoldPatch
        :param H: ScalarField
        :param t: flow time
        :param step: (OPTIONAL) integrator step
        :param fd_step: (OPTIONAL) finite difference step in parameter space
        :return: SubmanifoldPatch
        """
        self.check_patch(patch)

        def param(params):
            return self.dynamics.flow_points(H, patch.points(params), (0.0, t), step)[0]

        return SubmanifoldPatch('{} flowed by {}'.format(patch.name, H.name), patch.chart_name, patch.intrinsic_dim,
                                param, patch.sample_grid, None, [], patch.expected_coisotropic,
                                patch.expected_legendrian, fd_step)

    def coisotropy_invariance_experiment(self, patch, H, t, tol=1e-8, step=None):
        """
        This function runs the coisotropy test before and after flowing the patch with H for time t. The flowed
        frames carry finite difference errors, so the second test uses rank and inclusion tolerances of at least 1e-6.

        :param patch: SubmanifoldPatch
        :param H: ScalarField
        :param t: flow time
        :param tol: (OPTIONAL) tolerance of the first test
        :param step: (OPTIONAL) integrator step
        :return: (before, after) CoisotropyVerdicts
        """
        time0 = time.time()
        before = self.coisotropy_test(patch, tol)
        flowed_tol = max(tol, 1e-6)
        flowed = SubmanifoldAnalysis(self.chart, rank_tol=max(self.rank_tol, flowed_tol), step=self.dynamics.step,
                                     loglevel=self.loglevel)
        after = flowed.coisotropy_test(self.flowed_patch(patch, H, t, step), flowed_tol)
        self.logger.info('Invariance experiment on {} under {} took {:.2f} seconds: {} -> {}.'.format(
            patch.name, H.name, time.time() - time0, before.passed, after.passed))
        return before, after

    def bracket_ideal_check(self, patch, rng, n_pairs=100, tol=1e-6, degree=1, variant='cpb'):
        """
        This function draws random pairs F, G from the vanishing ideal of the patch, built as Σ f_j·P_j from the
        defining functions f_j and random polynomials P_j, and evaluates their contact bracket on the samples. The
        ideal is closed under the bracket at sample scale iff max |{F, G}| ≤ tol·|dF|·|X_G| for every pair.

        :param patch: SubmanifoldPatch with defining functions
        :param rng: numpy random Generator
        :param n_pairs: (OPTIONAL) number of random pairs
        :param tol: (OPTIONAL) relative tolerance
        :param degree: (OPTIONAL) degree of the random polynomial factors
        :param variant: (OPTIONAL) bracket variant
        :return: dict with keys vanishing, max_ratio, coisotropic, agrees
        """
        self.check_patch(patch)
        points = patch.points()
        worst = 0.0
        if patch.defining_functions:
            for _ in range(n_pairs):
                F, G = (self._ideal_member(patch, rng, degree) for _ in range(2))
                brackets = self.dynamics.contact_brackets(F, G, points, variant)
                scale = np.max(np.linalg.norm(F.grad(0.0, points), axis=1)) * \
                    np.max(np.linalg.norm(self.dynamics.contact_fields(G, 0.0, points), axis=1))
                worst = max(worst, float(np.max(np.abs(brackets))) / max(scale, np.finfo(float).tiny))
        vanishing = worst <= tol
        coisotropic = self.coisotropy_test(patch).passed
        self.logger.info('Ideal brackets on {}: max ratio {:.3e}, vanishing = {}, coisotropic = {}.'.format(
            patch.name, worst, vanishing, coisotropic))
        return {'patch': patch.name, 'vanishing': vanishing, 'max_ratio': worst, 'coisotropic': coisotropic,
                'agrees': vanishing == coisotropic}

    def _ideal_member(self, patch, rng, degree):
        member = constant_field(0.0, self.chart.dimension)
        for f in patch.defining_functions:
            member = member + f * random_polynomial_field(rng, self.chart.dimension, degree)
        return member
