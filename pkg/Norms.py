#!/usr/bin/env python
"""
Norms.py: Certified cost estimates for contact Hamiltonian paths. Shelukhin path costs, orbit costs, the RS and
modified costs, exact distances on the circle and the non-comparability experiment for the family H_k.
"""

__version__ = "0.1"

import time
from dataclasses import dataclass, field
import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.integrate import trapezoid, simpson
# Own modules:
from Logging import Logger
from Exceptions import InputError, PreconditionError
from Charts import Point, DarbouxChart
from Dynamics import ContactDynamics, VerificationReport, constant_field, concatenate, hk_field
from Helper_functions import HelperFunctions


@dataclass
class CostReport:
    """
    A cost certificate. ``bound_direction`` says how the value relates to the norm it estimates: 'upper' for the
    cost of an explicit path, 'exact' for closed forms and 'lower' for grid-sampled lower estimates.
    """
    kind: str
    value: float
    bound_direction: str
    certificate: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < 0:
            raise InputError('Cost reports carry non-negative values, got {}.'.format(self.value))
        if self.bound_direction not in ('upper', 'exact', 'lower'):
            raise InputError('Unknown bound direction {}.'.format(self.bound_direction))


@dataclass
class ConformalSweep:
    """ Conformal factors of a flow on a coarse grid: min over grid and time, and the time-1 values per point. """
    points: np.ndarray
    final: np.ndarray
    minimum: float
    resolution: int
    step: float


class CostEstimator:
    """
    This class estimates path costs on a chart. Maxima over M are taken on the declared support box of a field (the
    whole circle on the circle chart) with ``grid_resolution`` samples per axis, swept in chunks. Conformal factors
    need one integrated trajectory per grid point and use a coarser odd grid (``conformal_resolution``, which
    contains the box centre) and a coarser step (``conformal_step``).

    :param chart: contact chart
    :param grid_resolution: (OPTIONAL) samples per axis for maxima (201)
    :param time_steps: (OPTIONAL) odd number of time samples for time integrals of time-dependent paths (101)
    :param conformal_resolution: (OPTIONAL) odd samples per axis for conformal sweeps (21)
    :param step: (OPTIONAL) integrator step for single orbits (1e-3)
    :param conformal_step: (OPTIONAL) integrator step for conformal sweeps (1e-2)
    :param threads: (OPTIONAL) worker threads for the non-comparability table

    """

    def __init__(self, chart, grid_resolution=201, time_steps=101, conformal_resolution=21, step=1e-3,
                 conformal_step=1e-2, threads=1, loglevel='INFO'):
        self.logger = Logger('Norms.CostEstimator', loglevel).logger
        self.loglevel = loglevel
        for name, value in (('grid_resolution', grid_resolution), ('time_steps', time_steps),
                            ('conformal_resolution', conformal_resolution), ('step', step),
                            ('conformal_step', conformal_step), ('threads', threads)):
            if value <= 0:
                message = '{} must be positive, got {}.'.format(name, value)
                self.logger.error(message)
                raise InputError(message)
        if conformal_resolution % 2 == 0:
            raise InputError('conformal_resolution must be odd so that the grid contains the box centre.')
        self.chart = chart
        self.grid_resolution = int(grid_resolution)
        self.time_steps = int(time_steps)
        self.conformal_resolution = int(conformal_resolution)
        self.step = step
        self.conformal_step = conformal_step
        self.threads = int(threads)
        self.dynamics = ContactDynamics(chart, step=step, loglevel=loglevel)
        self.hf = HelperFunctions(loglevel=loglevel)

    # Grids and time integrals -------------------------------------------------------------------------------------

    def support_box(self, H):
        """
        This function returns the box over which maxima of H are taken: the declared support box, or the fundamental
        domain of a compact chart.

        :param H: ScalarField
        :return: list of (low, high) pairs
        """
        if H.support_box is not None:
            return H.support_box
        if self.chart.kind == 'circle':
            return [(0.0, 1.0)]
        message = 'Field {} has no support box and chart {} is not compact; max over M is undefined.'.format(
            H.name, self.chart.name)
        self.logger.error(message)
        raise InputError(message)

    def grid_extrema(self, H, t, box=None, resolution=None):
        """
        This function sweeps the full grid of the support box in chunks and returns max and min of H_t.

        :param H: ScalarField
        :param t: time
        :param box: (OPTIONAL) box, default support_box(H)
        :param resolution: (OPTIONAL) samples per axis, default grid_resolution
        :return: (max, min)
        """
        box = self.support_box(H) if box is None else box
        resolution = self.grid_resolution if resolution is None else resolution
        high, low = -np.inf, np.inf
        for chunk in self.hf.box_chunks(box, resolution):
            values = H.evaluate(t, chunk)
            high = max(high, float(values.max()))
            low = min(low, float(values.min()))
        return high, low

    def time_samples(self, H, t_span=(0.0, 1.0)):
        """
        This function returns the time samples of a path as a list of pieces between breakpoints. The last sample of
        a piece that ends at a breakpoint is its left limit.

        :param H: ScalarField
        :param t_span: (OPTIONAL) (t0, t1)
        :return: list of (times for integration, times for evaluation)
        """
        t0, t1 = t_span
        if not H.time_dependent:
            return [(np.array([t0, t1]), np.array([t0, t1]))]
        edges = [t0] + [b for b in H.breakpoints if t0 < b < t1] + [t1]
        pieces = []
        for a, b in zip(edges[:-1], edges[1:]):
            n = max(2, int(round((self.time_steps - 1) * (b - a) / (t1 - t0))) + 1)
            times = np.linspace(a, b, n)
            evaluation = times.copy()
            if b in H.breakpoints:
                evaluation[-1] = np.nextafter(b, a)
            pieces.append((times, evaluation))
        return pieces

    def time_integral(self, H, integrand, t_span=(0.0, 1.0)):
        """
        This function integrates integrand(t) over the path with the trapezoid rule, piece by piece. Autonomous
        paths are evaluated once.

        :param H: ScalarField
        :param integrand: function of t
        :param t_span: (OPTIONAL) (t0, t1)
        :return: integral, DataFrame of (time, value)
        """
        total = 0.0
        frames = []
        for times, evaluation in self.time_samples(H, t_span):
            if not H.time_dependent:
                value = integrand(evaluation[0])
                values = np.array([value, value])
            else:
                values = np.array([integrand(t) for t in evaluation])
            total += float(trapezoid(values, times))
            frames.append(pd.DataFrame({'time': times, 'value': values}))
        return total, pd.concat(frames, ignore_index=True)

    def conformal_sweep(self, H, box=None, resolution=None, step=None):
        """
        This function integrates the conformal factor of H from every point of a coarse grid of the support box.

        :param H: ScalarField
        :param box: (OPTIONAL) box, default support_box(H)
        :param resolution: (OPTIONAL) odd samples per axis, default conformal_resolution
        :param step: (OPTIONAL) integrator step, default conformal_step
        :return: ConformalSweep
        """
        time0 = time.time()
        box = self.support_box(H) if box is None else box
        resolution = self.conformal_resolution if resolution is None else resolution
        step = self.conformal_step if step is None else step
        points = self.hf.box_grid(box, resolution)
        _, _, conformal = self.dynamics.flow_history(H, points, step=step)
        sweep = ConformalSweep(points, conformal[-1], float(conformal.min()), resolution, step)
        self.logger.info('Conformal sweep of {} on {} points took {:.2f} seconds.'.format(
            H.name, points.shape[0], time.time() - time0))
        return sweep

    # Costs --------------------------------------------------------------------------------------------------------

    def shelukhin_cost(self, H, t_span=(0.0, 1.0)):
        """
        This function returns ∫ max_M |H_t| dt for the given path, an upper bound for the Shelukhin norm of its
        time-1 map.

        :param H: ScalarField with a support box (or on a compact chart)
        :param t_span: (OPTIONAL) (t0, t1)
        :return: CostReport
        """
        time0 = time.time()
        box = self.support_box(H)

        def integrand(t):
            high, low = self.grid_extrema(H, t, box)
            return max(abs(high), abs(low))

        value, profile = self.time_integral(H, integrand, t_span)
        self.logger.info('Shelukhin cost of {} = {:.8g} took {:.2f} seconds.'.format(H.name, value,
                                                                                     time.time() - time0))
        return CostReport('shelukhin', value, 'upper', 'path {}'.format(H.name),
                          {'grid_resolution': self.grid_resolution, 'time_samples': len(profile)})

    def orbit_cost(self, H, patch, t_span=(0.0, 1.0), step=None):
        """
        This function returns ∫ max over φ_H^t(L) of |H_t| dt, integrated over the flowed samples of L, an upper bound
        for the distance between L and φ_H^1(L).

        :param H: ScalarField
        :param patch: SubmanifoldPatch L
        :param t_span: (OPTIONAL) (t0, t1)
        :param step: (OPTIONAL) integrator step
        :return: CostReport
        """
        times, points, _ = self.dynamics.flow_history(H, patch.points(), t_span, step)
        values = np.array([np.max(np.abs(H.evaluate(t, p))) for t, p in zip(times, points)])
        value = float(trapezoid(values, times))
        return CostReport('orbit', value, 'upper', 'path {} on {}'.format(H.name, patch.name),
                          {'step': self.step if step is None else step, 'samples': patch.sample_grid.shape[0],
                           'endpoint': self.chart.reduce(points[-1])})

    def oscillation(self, H, t_span=(0.0, 1.0)):
        """ ∫ (max_M H_t - min_M H_t) dt over the grid. """
        def integrand(t):
            high, low = self.grid_extrema(H, t)
            return high - low

        return self.time_integral(H, integrand, t_span)[0]

    def rs_cost(self, H, sweep=None):
        """
        This function returns e^{-min g_t} · ∫ (max_M H_t - min_M H_t) dt, with the minimum of the conformal factor
        over the coarse grid and all times. The value belongs to this generating path and is a lower estimate of the
        expression over M since the minimum is sampled.

        :param H: ScalarField
        :param sweep: (OPTIONAL) precomputed ConformalSweep
        :return: CostReport
        """
        sweep = self.conformal_sweep(H) if sweep is None else sweep
        oscillation = self.oscillation(H)
        value = float(np.exp(-sweep.minimum) * oscillation)
        return CostReport('rs', value, 'lower', 'path {}'.format(H.name),
                          {'grid_resolution': self.grid_resolution, 'conformal_resolution': sweep.resolution,
                           'conformal_step': sweep.step, 'min_conformal': sweep.minimum,
                           'oscillation': oscillation})

    def modified_cost(self, H, sweep=None, shelukhin=None):
        """
        This function returns the Shelukhin path cost plus max |g_1| over the coarse grid.

        :param H: ScalarField
        :param sweep: (OPTIONAL) precomputed ConformalSweep
        :param shelukhin: (OPTIONAL) precomputed Shelukhin CostReport
        :return: CostReport
        """
        sweep = self.conformal_sweep(H) if sweep is None else sweep
        shelukhin = self.shelukhin_cost(H) if shelukhin is None else shelukhin
        extra = float(np.max(np.abs(sweep.final)))
        return CostReport('modified', shelukhin.value + extra, 'upper', 'path {}'.format(H.name),
                          {'shelukhin': shelukhin.value, 'max_abs_conformal': extra,
                           'conformal_resolution': sweep.resolution})

    # Circle -------------------------------------------------------------------------------------------------------

    @staticmethod
    def _circle_coordinate(p):
        value = p.coords[0] if isinstance(p, Point) else float(np.asarray(p).reshape(-1)[0])
        return float(np.mod(value, 1.0))

    @classmethod
    def signed_circle_displacement(cls, p, q):
        """ The shortest signed rotation from p to q, in [-1/2, 1/2). """
        return float(np.mod(cls._circle_coordinate(q) - cls._circle_coordinate(p) + 0.5, 1.0) - 0.5)

    def circle_delta(self, p, q):
        """
        This function returns the angular distance d(p, q) = min(|p - q|, 1 - |p - q|) on ℝ/ℤ, which is the exact
        distance between the two points. The certificate is the rotation s -> s ± t·d.

        :param p: Point (or coordinate) of the circle
        :param q: Point (or coordinate) of the circle
        :return: CostReport
        """
        difference = abs(self._circle_coordinate(p) - self._circle_coordinate(q))
        value = min(difference, 1.0 - difference)
        sign = '+' if self.signed_circle_displacement(p, q) >= 0 else '-'
        return CostReport('circle-delta', value, 'exact', 'rotation s -> s {} t * {:.12g}'.format(sign, value))

    def rotation_certificate(self, p, q):
        """ The constant Hamiltonian whose time-1 map rotates p onto q along the shorter arc. """
        return constant_field(self.signed_circle_displacement(p, q), 1)

    def circle_lower_bound_check(self, H, p, step=1e-3, tol=1e-6):
        """
        This function checks ∫ |H_t(φ^t(p))| dt ≥ d(p, φ^1(p)) - tol for the path of H on the circle. The integral
        is taken with Simpson's rule over the integrated orbit.

        :param H: ScalarField on the circle
        :param p: Point (or coordinate)
        :param step: (OPTIONAL) integrator step
        :param tol: (OPTIONAL) slack
        :return: VerificationReport
        """
        if self.chart.kind != 'circle':
            raise InputError('The circle lower bound is checked on the circle chart.')
        start = np.array([[self._circle_coordinate(p)]])
        times, points, _ = self.dynamics.flow_history(H, start, step=step)
        values = np.array([abs(H.evaluate(t, x[0])) for t, x in zip(times, points)])
        integral = float(simpson(values, x=times))
        distance = self.circle_delta(start[0], points[-1, 0]).value
        slack = distance - integral
        details = pd.DataFrame([{'integral': integral, 'distance': distance, 'endpoint': points[-1, 0, 0] % 1.0}])
        return VerificationReport('circle lower bound', slack <= tol, slack, tol, details)

    # Certificates -------------------------------------------------------------------------------------------------

    def conjugation_cost_check(self, H, K, tol=1e-6, resolution=None, step=None):
        """
        This function conjugates the path of H by ψ, the time-1 map of K with conformal factor f. The conjugated path
        has Hamiltonian H'_t(ψ(p)) = e^{f(p)} H_t(p); H' is evaluated through the backward flow of K. The check
        compares (a) H' at ψ(p) with e^{f(p)}H_t(p) on the coarse grid, and (b) the sandwich
        min e^f · cost(H) ≤ cost(H') ≤ max e^f · cost(H), all costs taken on the same samples.

        :param H: ScalarField with a support box
        :param K: ScalarField generating ψ
        :param tol: (OPTIONAL) relative tolerance of (a)
        :param resolution: (OPTIONAL) odd samples per axis, default conformal_resolution
        :param step: (OPTIONAL) integrator step, default self.step
        :return: VerificationReport
        """
        time0 = time.time()
        resolution = self.conformal_resolution if resolution is None else resolution
        step = self.step if step is None else step
        points = self.hf.box_grid(self.support_box(H), resolution)
        images, f = self.dynamics.flow_points(K, points, step=step)
        backward = K.time_reversed()

        def conjugated(t, batch):
            preimages, g_inverse = self.dynamics.flow_points(backward, batch, step=step)
            return np.exp(-g_inverse) * H.evaluate(t, preimages)

        deviations = []

        def original_cost(t):
            return float(np.max(np.abs(H.evaluate(t, points))))

        def rescaled_cost(t):
            return float(np.max(np.exp(f) * np.abs(H.evaluate(t, points))))

        def conjugated_cost(t):
            values = conjugated(t, images)
            expected = np.exp(f) * H.evaluate(t, points)
            scale = max(1.0, float(np.max(np.abs(expected))))
            deviations.append(float(np.max(np.abs(values - expected))) / scale)
            return float(np.max(np.abs(values)))

        cost = self.time_integral(H, original_cost)[0]
        rescaled = self.time_integral(H, rescaled_cost)[0]
        conjugate = self.time_integral(H, conjugated_cost)[0]
        c_minus, c_plus = float(np.exp(f.min())), float(np.exp(f.max()))
        slack = 1e-12 * max(1.0, cost * c_plus)
        sandwich = c_minus * cost - slack <= conjugate <= c_plus * cost + slack
        worst = max(deviations) if deviations else 0.0
        worst = max(worst, abs(conjugate - rescaled) / max(1.0, rescaled))
        details = pd.DataFrame([{'cost': cost, 'rescaled_cost': rescaled, 'conjugated_cost': conjugate,
                                 'c_minus': c_minus, 'c_plus': c_plus, 'sandwich': sandwich,
                                 'pointwise_deviation': worst}])
        self.logger.info('Conjugation check of {} by {} took {:.2f} seconds.'.format(H.name, K.name,
                                                                                   time.time() - time0))
        return VerificationReport('conjugation cost', sandwich and worst <= tol, worst, tol, details)

    def triangle_check(self, F, G, tol=1e-9):
        """
        This function checks cost(F then G) ≤ cost(F) + cost(G) + tol for the concatenated path.

        :param F: ScalarField
        :param G: ScalarField
        :param tol: (OPTIONAL) integration slack
        :return: VerificationReport
        """
        combined = self.shelukhin_cost(concatenate(F, G)).value
        separate = self.shelukhin_cost(F).value + self.shelukhin_cost(G).value
        excess = combined - separate
        details = pd.DataFrame([{'concatenated': combined, 'sum': separate}])
        return VerificationReport('triangle', excess <= tol, excess, tol, details)

    def symmetry_check(self, H, tol=1e-9):
        """
        This function checks that the reversed path -H_{1-t}, which generates the inverse map, has the same cost.

        :param H: ScalarField
        :param tol: (OPTIONAL) tolerance
        :return: VerificationReport
        """
        forward = self.shelukhin_cost(H).value
        reverse = self.shelukhin_cost(H.time_reversed()).value
        deviation = abs(forward - reverse)
        details = pd.DataFrame([{'forward': forward, 'reversed': reverse}])
        return VerificationReport('symmetry', deviation <= tol, deviation, tol, details)

    # Non-comparability --------------------------------------------------------------------------------------------

    def noncomparability_row(self, k):
        """
        This function runs the experiment for H_k: Shelukhin cost, RS cost, modified cost and the time-1 conformal
        factor at the origin (integrated with the fine step).

        :param k: positive integer ≤ 12
        :return: dict
        """
        time0 = time.time()
        H = hk_field(k)
        shelukhin = self.shelukhin_cost(H)
        sweep = self.conformal_sweep(H)
        rs = self.rs_cost(H, sweep)
        modified = self.modified_cost(H, sweep, shelukhin)
        _, g_origin = self.dynamics.flow_points(H, np.zeros((1, 3)))
        self.logger.info('Row k = {} took {:.2f} seconds.'.format(k, time.time() - time0))
        return {'k': int(k), 'shelukhin': shelukhin.value, 'rs': rs.value, 'modified': modified.value,
                'g1_at_origin': float(g_origin[0]), 'log_rs': float(np.log(rs.value))}

    def noncomparability_table(self, k_list=(1, 2, 4, 8)):
        """
        This function builds the non-comparability table for the family H_k(x, y, z) = f(x, y)/k · sin(k² z). Rows are
        independent and computed on ``threads`` worker threads. The RS column grows like e^k, so it is reported in log
        space as well.

        :param k_list: positive integers ≤ 12
        :return: DataFrame with columns k, shelukhin, rs, modified, g1_at_origin, log_rs
        """
        if not isinstance(self.chart, DarbouxChart) or self.chart.n != 1:
            message = 'The H_k experiment runs on darboux:1, not on {}.'.format(self.chart.name)
            self.logger.error(message)
            raise InputError(message)
        k_list = list(k_list)
        if not k_list:
            raise PreconditionError('The k-list is empty.')
        for k in k_list:
            if int(k) != k or k < 1:
                message = 'k must be a positive integer, got {}.'.format(k)
                self.logger.error(message)
                raise InputError(message)
            if k > 12:
                message = 'k = {} exceeds 12; e^k overflows the RS column.'.format(k)
                self.logger.error(message)
                raise InputError(message)
        time0 = time.time()
        rows = Parallel(n_jobs=min(self.threads, len(k_list)), prefer='threads')(
            delayed(self.noncomparability_row)(k) for k in k_list)
        table = pd.DataFrame(rows, columns=['k', 'shelukhin', 'rs', 'modified', 'g1_at_origin', 'log_rs'])
        self.logger.info('Non-comparability table for k in {} took {:.2f} seconds.'.format(k_list,
                                                                                           time.time() - time0))
        return table
