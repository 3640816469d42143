#!/usr/bin/env python
"""
Lifts.py: Symplectization and prequantization constructions. Lifted functions, maps and vector fields, symplectic
brackets and the numerical checks of the coisotropic correspondences.
"""

__version__ = "0.1"

import time
from dataclasses import dataclass
from typing import Callable, Optional
import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
# Own modules:
from Logging import Logger
from Exceptions import InputError, DegenerateChartError, InconsistentSystemError, WindowViolationError
from Charts import Point, TangentVector, SymplectizationChart, PrequantizationChart
from Dynamics import ContactDynamics, ScalarField, VerificationReport, concatenate, coordinate_field
from Submanifolds import SubmanifoldAnalysis, SubmanifoldPatch
from Helper_functions import HelperFunctions


@dataclass
class CheckReport(VerificationReport):
    """ A VerificationReport that may also carry the agreement of two verdicts (base level and lifted level). """
    agreement: Optional[bool] = None


@dataclass
class LiftedMap:
    """ Φ(m, θ) = (φ(m), θ - g(m)) for a base contactomorphism φ with conformal factor g. """
    name: str
    apply: Callable

    def __call__(self, coords):
        return self.apply(np.atleast_2d(np.asarray(coords, dtype=float)))


class SymplectizationLift:
    """
    This class works on the symplectization (M × ℝ, ω = d(e^θ α)) of a Darboux or circle chart.

    Hamiltonian vector fields use the convention ι_X ω = -dA, and the symplectic bracket is {A, B} = s·dA(X_B). The
    sign s is calibrated once on the pair (e^θ x1, e^θ y1) at the origin against e^θ·{x1, y1} on the base.

    :param chart: SymplectizationChart
    :param step: (OPTIONAL) integrator step of base flows

    """

    def __init__(self, chart, step=1e-3, loglevel='INFO'):
        self.logger = Logger('Lifts.SymplectizationLift', loglevel).logger
        if not isinstance(chart, SymplectizationChart):
            message = 'Symplectization lifts need a symplectization chart, got {}.'.format(chart.name)
            self.logger.error(message)
            raise InputError(message)
        self.loglevel = loglevel
        self.chart = chart
        self.base = chart.base
        self.dynamics = ContactDynamics(self.base, step=step, loglevel=loglevel)
        self.analysis = SubmanifoldAnalysis(self.base, step=step, loglevel=loglevel)
        self.hf = HelperFunctions(loglevel=loglevel)
        self.sign = 1.0
        if self.base.kind == 'darboux':
            self.sign = self.calibrate_sign()

    def _batch(self, coords):
        if isinstance(coords, Point):
            coords = coords.coords
        coords = np.asarray(coords, dtype=float)
        batch = np.atleast_2d(coords)
        self.chart.check_coords(batch)
        return batch, coords.ndim == 1

    def lift_function(self, F):
        """
        This function returns F̃(p, θ) = e^θ F(p) with the chain-rule gradient (e^θ dF, e^θ F).

        :param F: time-independent ScalarField on the base
        :return: ScalarField on the symplectization
        """
        if F.time_dependent:
            message = 'Only time-independent fields are lifted, freeze {} first.'.format(F.name)
            self.logger.error(message)
            raise InputError(message)
        split = self.chart.split

        def value(t, batch):
            base, theta = split(batch)
            return np.exp(theta) * F.evaluate(t, base)

        def gradient(t, batch):
            base, theta = split(batch)
            scale = np.exp(theta)[:, None]
            return np.concatenate([scale * F.grad(t, base), scale * F.evaluate(t, base)[:, None]], axis=1)

        return ScalarField(self.chart.dimension, value, gradient, name='e^θ {}'.format(F.name))

    def hamiltonian_fields(self, A, coords, t=0.0):
        """
        This function solves ω(X, -) = -dA for X on a batch of points.

        :param A: ScalarField on the symplectization
        :param coords: (N, D) array
        :param t: (OPTIONAL) time
        :return: (N, D) array
        """
        batch, single = self._batch(coords)
        matrix = self.chart.omega_matrix(batch)
        sv = np.linalg.svd(matrix, compute_uv=False)
        if np.any(sv[:, -1] <= 1e-12 * sv[:, 0]):
            message = 'ω is degenerate on chart {}.'.format(self.chart.name)
            self.logger.error(message)
            raise DegenerateChartError(message)
        fields = np.linalg.solve(np.swapaxes(matrix, 1, 2), -A.grad(t, batch)[..., None])[..., 0]
        return fields[0] if single else fields

    def hamiltonian_field_at(self, A, point):
        """ The symplectic Hamiltonian vector field of A at a point, ι_X ω = -dA. """
        return TangentVector(point, self.hamiltonian_fields(A, point.coords))

    def lifted_fields(self, F, coords):
        """
        This function returns X_F̃ = X_F ⊕ (-dF(R_α)) ∂/∂θ on a batch of points and cross-checks it against the
        symplectic defining equation of X_F̃.

        :param F: time-independent ScalarField on the base
        :param coords: (N, D) array
        :return: (N, D) array
        """
        batch, single = self._batch(coords)
        base, _ = self.chart.split(batch)
        fields = np.concatenate([self.dynamics.contact_fields(F, 0.0, base),
                                 -self.dynamics.conformal_rates(F, 0.0, base)[:, None]], axis=1)
        direct = self.hamiltonian_fields(self.lift_function(F), batch)
        mismatch = np.max(np.abs(fields - direct), axis=1)
        if np.any(mismatch > 1e-10 * (1.0 + np.max(np.abs(direct), axis=1))):
            message = 'Lifted field of {} does not solve ι_X ω = -dF̃ (mismatch {:.3e}).'.format(
                F.name, mismatch.max())
            self.logger.error(message)
            raise InconsistentSystemError(message)
        return fields[0] if single else fields

    def lifted_field_at(self, F, point):
        """
        This function returns X_F(p) ⊕ (-dF(R_α)) ∂/∂θ at (p, θ).

        :param F: time-independent ScalarField on the base
        :param point: Point of the symplectization
        :return: TangentVector
        """
        return TangentVector(point, self.lifted_fields(F, point.coords))

    def _raw_brackets(self, A, B, batch, sign):
        return sign * np.sum(A.grad(0.0, batch) * self.hamiltonian_fields(B, batch), axis=1)

    def calibrate_sign(self):
        """
        This function evaluates both sign conventions of the symplectic bracket on (e^θ x1, e^θ y1) at the origin and
        returns the one that matches e^θ·{x1, y1} of the base.

        :return: +1.0 or -1.0
        """
        origin = np.zeros((1, self.chart.dimension))
        x1, y1 = coordinate_field(self.base, 'x1'), coordinate_field(self.base, 'y1')
        target = self.dynamics.contact_brackets(x1, y1, origin[:, :-1], 'minus')[0]
        lifted = self._raw_brackets(self.lift_function(x1), self.lift_function(y1), origin, 1.0)[0]
        sign = 1.0 if abs(lifted - target) <= abs(-lifted - target) else -1.0
        self.logger.debug('Symplectic bracket sign calibrated to {:+.0f} ({} vs {}).'.format(sign, lifted, target))
        return sign

    def symp_brackets(self, A, B, coords):
        """ Symplectic Poisson brackets {A, B} = s·dA(X_B) on a batch of points. """
        batch, single = self._batch(coords)
        values = self._raw_brackets(A, B, batch, self.sign)
        return float(values[0]) if single else values

    def symp_bracket_at(self, A, B, point):
        """
        This function evaluates the symplectic Poisson bracket at a point.

        :param A: ScalarField on the symplectization
        :param B: ScalarField on the symplectization
        :param point: Point
        :return: float
        """
        return self.symp_brackets(A, B, point.coords)

    def lift_bracket_check(self, F, G, coords, tol=1e-6, variant='minus'):
        """
        This function compares {e^θF, e^θG} with e^θ·{F, G} at a batch of (p, θ) points. Both base bracket variants
        are reported; the pass flag uses the requested one.

        :param F: time-independent ScalarField on the base
        :param G: time-independent ScalarField on the base
        :param coords: (N, D) array
        :param tol: (OPTIONAL) tolerance
        :param variant: (OPTIONAL) base bracket variant for the verdict
        :return: CheckReport
        """
        batch, _ = self._batch(coords)
        base, theta = self.chart.split(batch)
        lifted = self.symp_brackets(self.lift_function(F), self.lift_function(G), batch)
        columns = {'lifted': lifted}
        for name in ('cpb', 'minus'):
            columns['base_' + name] = np.exp(theta) * self.dynamics.contact_brackets(F, G, base, name)
            columns['deviation_' + name] = np.abs(lifted - columns['base_' + name])
        details = pd.DataFrame(columns)
        worst = float(details['deviation_' + variant].max())
        return CheckReport('lift bracket ({})'.format(variant), worst <= tol, worst, tol, details)

    def omega_from_liouville(self, coords, fd_step=1e-5):
        """
        This function estimates ω = dλ, λ = e^θ α, by central differences of the Liouville covector:
        W_ij = ∂_i λ_j - ∂_j λ_i.

        :param coords: (N, D) array
        :param fd_step: (OPTIONAL) finite difference step
        :return: (N, D, D) array
        """
        batch, _ = self._batch(coords)
        n_points, dim = batch.shape
        offsets = fd_step * np.eye(dim)
        plus = self.chart.liouville_covector(batch[:, None, :] + offsets[None])
        minus = self.chart.liouville_covector(batch[:, None, :] - offsets[None])
        derivative = (plus - minus) / (2 * fd_step)
        return derivative - np.swapaxes(derivative, 1, 2)

    def omega_check(self, coords, tol=1e-6, fd_step=1e-5):
        """ Compares the closed form of ω with the finite difference exterior derivative of e^θα. """
        batch, _ = self._batch(coords)
        deviation = np.max(np.abs(self.chart.omega_matrix(batch) - self.omega_from_liouville(batch, fd_step)),
                           axis=(1, 2))
        worst = float(deviation.max())
        return CheckReport('omega = d(e^θ α)', worst <= tol, worst, tol, pd.DataFrame({'deviation': deviation}))

    # Lifted maps --------------------------------------------------------------------------------------------------

    def lift_map(self, H, t=1.0, step=None):
        """
        This function lifts the time-t map φ of H with conformal factor g to Φ(m, θ) = (φ(m), θ - g(m)).

        :param H: ScalarField on the base
        :param t: (OPTIONAL) flow time
        :param step: (OPTIONAL) integrator step
        :return: LiftedMap
        """
        def apply(batch):
            base, theta = self.chart.split(batch)
            images, conformal = self.dynamics.flow_points(H, base, (0.0, t), step)
            return np.concatenate([images, (theta - conformal)[:, None]], axis=1)

        return LiftedMap('lift of {} at t = {}'.format(H.name, t), apply)

    def verify_symplectic(self, lifted_map, coords, fd_step=1e-4, tol=1e-6):
        """
        This function checks Φ*ω = ω and Φ*λ = λ at a batch of points, with dΦ from central differences.

        :param lifted_map: LiftedMap
        :param coords: (N, D) array
        :param fd_step: (OPTIONAL) finite difference step
        :param tol: (OPTIONAL) tolerance relative to the size of ω
        :return: CheckReport
        """
        batch, _ = self._batch(coords)
        images, jacobians = self.hf.central_difference(lifted_map, batch, fd_step, with_center=True)
        omega = self.chart.omega_matrix(batch)
        pulled = np.swapaxes(jacobians, 1, 2) @ self.chart.omega_matrix(images) @ jacobians
        scale = 1.0 + np.max(np.abs(omega), axis=(1, 2))
        omega_deviation = np.max(np.abs(pulled - omega), axis=(1, 2)) / scale
        liouville = np.einsum('ni,nij->nj', self.chart.liouville_covector(images), jacobians)
        liouville_deviation = np.max(np.abs(liouville - self.chart.liouville_covector(batch)), axis=1) / scale
        details = pd.DataFrame({'omega_deviation': omega_deviation, 'liouville_deviation': liouville_deviation})
        worst = float(max(omega_deviation.max(), liouville_deviation.max()))
        return CheckReport('{} is exact symplectic'.format(lifted_map.name), worst <= tol, worst, tol, details)

    def lift_map_functoriality_check(self, F, G, coords, tol=1e-6, step=None):
        """
        This function compares the lift of ψ∘φ (generated by F then G) with the composition of the lifts.

        :param F: ScalarField generating φ
        :param G: ScalarField generating ψ
        :param coords: (N, D) array
        :param tol: (OPTIONAL) tolerance
        :return: CheckReport
        """
        batch, _ = self._batch(coords)
        composed = self.lift_map(concatenate(F, G), step=step)(batch)
        chained = self.lift_map(G, step=step)(self.lift_map(F, step=step)(batch))
        deviation = np.max(np.abs(composed - chained), axis=1)
        worst = float(deviation.max())
        return CheckReport('lift functoriality', worst <= tol, worst, tol, pd.DataFrame({'deviation': deviation}))

    # Correspondences ----------------------------------------------------------------------------------------------

    def symp_coisotropy_correspondence_check(self, patch, thetas=(-0.5, 0.0, 0.5), tol=1e-8):
        """
        This function computes, at each sample p and θ, the ω-orthogonal complement of T_pY × ℝ, projects out the
        θ-component and compares it with (T_pY ∩ ξ_p)^{⊥dα}. It also compares the two coisotropy verdicts (contact
        on the base, symplectic for Y × ℝ).

        :param patch: SubmanifoldPatch on the base chart
        :param thetas: (OPTIONAL) θ samples
        :param tol: (OPTIONAL) tolerance on principal-angle sines
        :return: CheckReport
        """
        records = []
        base_verdict = self.analysis.coisotropy_test(patch, tol)
        for u in patch.sample_grid:
            cap = self.analysis.cap_xi(patch, u)
            perp = self.analysis.dalpha_perp(cap, cap.base)
            p, tangent = self.analysis.tangent_space(patch, u)
            lifted_tangent = np.zeros((self.chart.dimension, tangent.shape[1] + 1))
            lifted_tangent[:-1, :-1] = tangent
            lifted_tangent[-1, -1] = 1.0
            for theta in thetas:
                coords = np.append(p.coords, theta)
                matrix = self.chart.omega_matrix(coords)
                complement = self.hf.null_space(lifted_tangent.T @ matrix, self.analysis.rank_tol)
                projected = self.hf.orthonormal_basis(complement[:-1], self.analysis.rank_tol)
                distance = self.hf.subspace_distance(projected, perp.basis)
                coisotropic = self.hf.containment_sine(complement, lifted_tangent) <= tol
                records.append({'u': tuple(np.round(u, 12)), 'theta': theta, 'distance': distance,
                                'dim_projected': projected.shape[1], 'dim_perp': perp.dim,
                                'lifted_coisotropic': coisotropic})
        details = pd.DataFrame(records)
        worst = float(details['distance'].max())
        agreement = bool((details['lifted_coisotropic'] == base_verdict.passed).all())
        self.logger.info('Correspondence on {}: max distance {:.3e}, base coisotropic = {}, verdicts agree = {}.'
                         .format(patch.name, worst, base_verdict.passed, agreement))
        return CheckReport('symplectization correspondence ({})'.format(patch.name), worst <= tol and agreement,
                           worst, tol, details, agreement)

    def lifted_cost_bound_check(self, patch, H, R=None, n_times=20, step=None):
        """
        This function flows L × {0} with the lift of H, whose θ-coordinate is -g_t, and checks at n_times time
        samples that max |H̃_t| over the lifted orbit is at most e^R·max |H_t| over the base orbit. It also reports
        the time integrals of both sides. With R unset the window is 1.1 times the observed θ extent.

        :param patch: SubmanifoldPatch L on the base chart
        :param H: ScalarField on the base
        :param R: (OPTIONAL) θ-window
        :param n_times: (OPTIONAL) number of time samples
        :param step: (OPTIONAL) integrator step
        :return: CheckReport
        """
        self.analysis.check_patch(patch)
        time0 = time.time()
        times, points, conformal = self.dynamics.flow_history(H, patch.points(), step=step)
        extent = float(np.max(np.abs(conformal)))
        if R is None:
            R = 1.1 * extent
        if extent > R:
            message = 'Lifted orbit reaches |θ| = {:.4g}, outside the window R = {:.4g}.'.format(extent, R)
            self.logger.error(message)
            raise WindowViolationError(message, suggested_window=1.1 * extent)
        indices = np.unique(np.linspace(0, len(times) - 1, n_times).round().astype(int))
        lhs, rhs = [], []
        for i in indices:
            base_values = np.abs(H.evaluate(times[i], points[i]))
            lhs.append(float(np.max(np.exp(-conformal[i]) * base_values)))
            rhs.append(float(np.exp(R) * np.max(base_values)))
        details = pd.DataFrame({'time': times[indices], 'lifted_max': lhs, 'bound': rhs})
        lifted_cost = float(trapezoid(details['lifted_max'], details['time']))
        bound_cost = float(trapezoid(details['bound'], details['time']))
        margin = float(np.max(details['lifted_max'] - details['bound']))
        passed = bool(np.all(details['lifted_max'] <= details['bound'] * (1 + 1e-12))) and \
            lifted_cost <= bound_cost * (1 + 1e-12)
        self.logger.info('Lifted cost {:.6g} <= e^R cost {:.6g} (R = {:.4g}) checked in {:.2f} seconds.'.format(
            lifted_cost, bound_cost, R, time.time() - time0))
        return CheckReport('lifted cost bound', passed, margin, 0.0, details)


class PrequantizationLift:
    """
    This class relates Hamiltonian dynamics on the plane (ℝ², ω = dx ∧ dy) with contact dynamics on the trivial
    prequantization ℝ² × S¹, α = dt + x dy. Base Hamiltonian fields use ι_X ω = -dF, so X_F = (-F_y, F_x) and
    {F, G} = dF(X_G).

    :param chart: PrequantizationChart

    """

    def __init__(self, chart, step=1e-3, loglevel='INFO'):
        self.logger = Logger('Lifts.PrequantizationLift', loglevel).logger
        if not isinstance(chart, PrequantizationChart):
            message = 'Prequantization lifts need the prequantization chart, got {}.'.format(chart.name)
            self.logger.error(message)
            raise InputError(message)
        self.chart = chart
        self.dynamics = ContactDynamics(chart, step=step, loglevel=loglevel)
        self.analysis = SubmanifoldAnalysis(chart, step=step, loglevel=loglevel)
        self.hf = HelperFunctions(loglevel=loglevel)

    def _base_batch(self, coords):
        coords = np.asarray(coords, dtype=float)
        batch = np.atleast_2d(coords)
        if batch.shape[-1] != self.chart.base_dimension:
            raise InputError('Base points have 2 coordinates, got shape {}.'.format(coords.shape))
        return batch, coords.ndim == 1

    def pullback_field(self, F):
        """ π*F, constant along the circle fibres. """
        if F.dimension != self.chart.base_dimension:
            raise InputError('Base fields have dimension 2, got {}.'.format(F.dimension))

        def value(t, batch):
            return F.evaluate(t, batch[:, :2])

        def gradient(t, batch):
            out = np.zeros_like(batch)
            out[:, :2] = F.grad(t, batch[:, :2])
            return out

        return ScalarField(self.chart.dimension, value, gradient, F.time_dependent, name='π*{}'.format(F.name))

    def base_fields(self, F, coords):
        """ Planar Hamiltonian fields X_F = (-F_y, F_x) on a batch of base points. """
        batch, single = self._base_batch(coords)
        gradient = F.grad(0.0, batch)
        fields = np.stack([-gradient[:, 1], gradient[:, 0]], axis=1)
        return fields[0] if single else fields

    def base_field_at(self, F, x):
        """
        This function returns the planar Hamiltonian vector field of F at a base point.

        :param F: ScalarField on the plane
        :param x: (2,) coordinates
        :return: (2,) array
        """
        return self.base_fields(F, np.asarray(x, dtype=float).reshape(2))

    def base_brackets(self, F, G, coords):
        """ Planar Poisson brackets {F, G} = dF(X_G) on a batch of base points. """
        batch, single = self._base_batch(coords)
        values = np.sum(F.grad(0.0, batch) * self.base_fields(G, batch), axis=1)
        return float(values[0]) if single else values

    def base_bracket_at(self, F, G, x):
        """ The planar bracket {F, G}(x); {x, y} = -1. """
        return self.base_brackets(F, G, np.asarray(x, dtype=float).reshape(2))

    def prequant_lift_fields(self, F, coords):
        """
        This function returns the horizontal lift of X_F plus the vertical vector v with α(v) = F(π(a)), on a batch
        of total-space points, and cross-checks it against the contact vector field of π*F.

        :param F: ScalarField on the plane
        :param coords: (N, 3) array
        :return: (N, 3) array
        """
        coords = np.asarray(coords, dtype=float)
        batch = np.atleast_2d(coords)
        self.chart.check_coords(batch)
        planar = self.base_fields(F, self.chart.projection(batch))
        horizontal = np.stack([planar[:, 0], planar[:, 1], -batch[:, 0] * planar[:, 1]], axis=1)
        vertical = F.evaluate(0.0, self.chart.projection(batch))[:, None] * self.chart.vertical_vector(batch)
        fields = horizontal + vertical
        direct = self.dynamics.contact_fields(self.pullback_field(F), 0.0, batch)
        mismatch = np.max(np.abs(fields - direct), axis=1)
        if np.any(mismatch > 1e-10 * (1.0 + np.max(np.abs(direct), axis=1))):
            message = 'Horizontal lift of X_{} disagrees with the contact field of π*{} ({:.3e}).'.format(
                F.name, F.name, mismatch.max())
            self.logger.error(message)
            raise InconsistentSystemError(message)
        return fields[0] if coords.ndim == 1 else fields

    def prequant_lift_field(self, F, a):
        """
        This function returns X_{π*F}(a) as the horizontal lift of X_F plus the vertical part.

        :param F: ScalarField on the plane
        :param a: Point of the total space
        :return: TangentVector
        """
        return TangentVector(a, self.prequant_lift_fields(F, a.coords))

    def prequant_bracket_check(self, F, G, coords, tol=1e-8):
        """
        This function compares {π*F, π*G} on the total space with π*{F, G} at a batch of points (both contact
        bracket variants are reported; they coincide for fibrewise constant functions).

        :param F: ScalarField on the plane
        :param G: ScalarField on the plane
        :param coords: (N, 3) array
        :param tol: (OPTIONAL) tolerance
        :return: CheckReport
        """
        batch = np.atleast_2d(np.asarray(coords, dtype=float))
        base = self.base_brackets(F, G, self.chart.projection(batch))
        columns = {'base': base}
        for name in ('cpb', 'minus'):
            columns[name] = self.dynamics.contact_brackets(self.pullback_field(F), self.pullback_field(G), batch,
                                                           name)
        deviation = np.maximum(np.abs(columns['cpb'] - base), np.abs(columns['minus'] - base))
        columns['deviation'] = deviation
        worst = float(deviation.max())
        return CheckReport('prequantization bracket', worst <= tol, worst, tol, pd.DataFrame(columns))

    def preimage_patch(self, patch, fibre_samples=8):
        """
        This function returns π^{-1}(Λ) = Λ × S¹ as a patch of the total space.

        :param patch: SubmanifoldPatch in the plane
        :param fibre_samples: (OPTIONAL) samples along the fibre
        :return: SubmanifoldPatch
        """
        k = patch.intrinsic_dim
        fibre = np.linspace(0.0, 1.0, fibre_samples, endpoint=False)
        grid = np.concatenate([np.repeat(patch.sample_grid, fibre_samples, axis=0),
                               np.tile(fibre, patch.sample_grid.shape[0])[:, None]], axis=1)

        def param(params):
            return np.concatenate([patch.points(params[:, :k]), params[:, k:]], axis=1)

        def jacobian(params):
            frames = np.zeros((params.shape[0], 3, k + 1))
            frames[:, :2, :k] = patch.jacobians(params[:, :k])
            frames[:, 2, k] = 1.0
            return frames

        return SubmanifoldPatch('preimage of {}'.format(patch.name), self.chart.name, k + 1, param, grid, jacobian,
                                [], patch.expected_coisotropic)

    def symplectic_coisotropy_test(self, patch, tol=1e-8):
        """
        This function checks (T_xΛ)^{⊥ω} ⊆ T_xΛ at every sample of a planar patch.

        :param patch: SubmanifoldPatch in the plane
        :param tol: (OPTIONAL) tolerance
        :return: (passed, max residual)
        """
        form = np.array([[0.0, 1.0], [-1.0, 0.0]])
        worst = 0.0
        for frame in patch.jacobians():
            tangent = self.hf.orthonormal_basis(frame)
            complement = self.hf.null_space(tangent.T @ form)
            worst = max(worst, self.hf.containment_sine(complement, tangent))
        return worst <= tol, worst

    def prequant_coisotropy_check(self, patch, tol=1e-8):
        """
        This function builds Λ × S¹ and compares its contact coisotropy verdict with the symplectic verdict of Λ.

        :param patch: SubmanifoldPatch in the plane
        :param tol: (OPTIONAL) tolerance
        :return: CheckReport (passed iff the verdicts agree)
        """
        base_passed, base_residual = self.symplectic_coisotropy_test(patch, tol)
        total = self.analysis.coisotropy_test(self.preimage_patch(patch), tol)
        agreement = base_passed == total.passed
        details = pd.DataFrame([{'patch': patch.name, 'base_coisotropic': base_passed,
                                 'base_residual': base_residual, 'preimage_coisotropic': total.passed,
                                 'preimage_residual': total.max_residual}])
        self.logger.info('Preimage of {}: base coisotropic = {}, preimage coisotropic = {}.'.format(
            patch.name, base_passed, total.passed))
        return CheckReport('prequantization correspondence ({})'.format(patch.name), agreement,
                           max(base_residual, total.max_residual) if agreement else 1.0, tol, details, agreement)
