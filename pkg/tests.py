import unittest
from unittest import mock
import os
import tempfile
import numpy as np
import pandas as pd
from matplotlib.figure import Figure
# Own modules:
from Logging import Logger
from Exceptions import (InputError, UnsupportedFormError, BlowUpError, DegeneratePatchError, PreconditionError,
                        WindowViolationError, ConfigError)
from Helper_functions import HelperFunctions
from Charts import (DarbouxChart, CircleChart, PrequantizationChart, SymplectizationChart,
                    chart_from_name)
from Dynamics import (ScalarField, ContactDynamics, constant_field, coordinate_field, polynomial_field,
                      random_polynomial_field, bump_field, hk_field, trig_polynomial_field,
                      random_trig_polynomial_field, concatenate, blend, truncate, field_from_spec)
from Submanifolds import SubmanifoldAnalysis, Subspace, patch_from_name, patch_from_spec
from Lifts import SymplectizationLift, PrequantizationLift
from Norms import CostReport, CostEstimator
from SetupSettings import CreateSettings, ExperimentConfig, RunReport
from DataAccess import ReadData, WriteData
from Visualization import Plotting
import run_experiments


class TestLogging(unittest.TestCase):

    def test_levels(self):
        """
        Levels are accepted as strings in any case or as integers; unknown levels are rejected.

        """
        self.assertEqual(10, Logger('tests.Logging', 'debug').logger.level)
        self.assertEqual(40, Logger('tests.Logging', 40).logger.level)
        with self.assertRaises(InputError):
            Logger('tests.Logging', 'LOUD')


class TestHelperFunctions(unittest.TestCase):

    def test_numerical_rank(self):
        """
        This function checks the relative rank decision.

        """
        hf = HelperFunctions(loglevel='ERROR')
        input_values = [np.diag([1.0, 1e-12]), np.diag([1.0, 1e-3]), np.zeros((3, 3)), np.ones((2, 4))]
        expected_output = [1, 2, 0, 1]
        output = [hf.numerical_rank(i) for i in input_values]
        self.assertEqual(expected_output, output)

    def test_null_space_edge_cases(self):
        """ A matrix without rows has the whole space as null space. """
        hf = HelperFunctions(loglevel='ERROR')
        np.testing.assert_array_equal(np.eye(3), hf.null_space(np.zeros((0, 3))))
        kernel = hf.null_space(np.array([[1.0, 0.0, 0.0]]))
        self.assertEqual((3, 2), kernel.shape)
        np.testing.assert_allclose(np.zeros(2), kernel[0], atol=1e-12)
        np.testing.assert_allclose(np.eye(2), kernel.T @ kernel, atol=1e-12)

    def test_double_complement(self):
        """
        The Euclidean complement of the complement is the subspace again, and dimensions add up.

        """
        hf = HelperFunctions(loglevel='ERROR')
        rng = np.random.default_rng(1)
        for k in range(1, 5):
            basis = hf.orthonormal_basis(rng.normal(size=(5, k)))
            complement = hf.null_space(basis.T)
            self.assertEqual(5, basis.shape[1] + complement.shape[1])
            again = hf.null_space(complement.T)
            self.assertLessEqual(hf.subspace_distance(again, basis), 1e-10)

    def test_containment_sine(self):
        hf = HelperFunctions(loglevel='ERROR')
        e = np.eye(3)
        self.assertEqual(0.0, hf.containment_sine(e[:, :0], e[:, :1]))
        self.assertEqual(1.0, hf.containment_sine(e[:, :1], e[:, :0]))
        self.assertAlmostEqual(0.0, hf.containment_sine(e[:, :1], e[:, :2]))
        self.assertAlmostEqual(1.0, hf.containment_sine(e[:, 2:], e[:, :2]))

    def test_box_chunks_cover_grid(self):
        """ The chunked sweep visits the same points as the full grid, in the same order. """
        hf = HelperFunctions(loglevel='ERROR')
        box = [(-1.0, 1.0), (0.0, 2.0), (-0.5, 0.5)]
        chunks = list(hf.box_chunks(box, 5, max_points=10))
        self.assertEqual(25, len(chunks))
        np.testing.assert_array_equal(hf.box_grid(box, 5), np.concatenate(chunks))

    def test_central_difference(self):
        """ Exact on affine maps and on quadratic scalar functions, with or without the images. """
        hf = HelperFunctions(loglevel='ERROR')
        rng = np.random.default_rng(7)
        A, c = rng.normal(size=(2, 3)), rng.normal(size=2)
        points = rng.uniform(-1, 1, (4, 3))
        images, jacobians = hf.central_difference(lambda b: b @ A.T + c, points, 1e-5, with_center=True)
        np.testing.assert_allclose(points @ A.T + c, images, atol=1e-12)
        np.testing.assert_allclose(np.broadcast_to(A, (4, 2, 3)), jacobians, atol=1e-8)
        gradients = hf.central_difference(lambda b: np.sum(b ** 2, axis=1), points, 1e-5)
        self.assertEqual((4, 1, 3), gradients.shape)
        np.testing.assert_allclose(2 * points, gradients[:, 0, :], atol=1e-8)


class TestCharts(unittest.TestCase):

    def test_reeb_defining_equations(self):
        """
        α(R) = 1 and dα(R, e_i) = 0 at random points of every contact chart.

        """
        rng = np.random.default_rng(2)
        for chart in (DarbouxChart(1, loglevel='ERROR'), DarbouxChart(3, loglevel='ERROR'),
                      CircleChart(loglevel='ERROR'), PrequantizationChart(loglevel='ERROR')):
            for coords in rng.uniform(-2.0, 2.0, (10, chart.dimension)):
                p = chart.point(coords)
                reeb = chart.reeb_at(p)
                self.assertAlmostEqual(1.0, chart.alpha_at(p, reeb), places=14)
                for i in range(chart.dimension):
                    self.assertEqual(0.0, chart.dalpha_at(p, reeb, chart.basis_vector(p, i)))

    def test_dalpha_antisymmetric(self):
        chart = DarbouxChart(2, loglevel='ERROR')
        rng = np.random.default_rng(3)
        p = chart.point(rng.normal(size=5))
        v, w = chart.tangent(p, rng.normal(size=5)), chart.tangent(p, rng.normal(size=5))
        self.assertEqual(chart.dalpha_at(p, v, w), -chart.dalpha_at(p, w, v))

    def test_circle_reduction(self):
        chart = CircleChart(loglevel='ERROR')
        input_values = [1.25, -0.25, 0.0, 3.0]
        expected_output = [0.25, 0.75, 0.0, 0.0]
        output = [float(chart.point([s]).coords[0]) for s in input_values]
        self.assertEqual(expected_output, output)

    def test_dimension_mismatch(self):
        chart = DarbouxChart(1, loglevel='ERROR')
        with self.assertRaises(InputError):
            chart.point([0.0, 0.0])
        with self.assertRaises(InputError):
            chart.alpha_covector(np.zeros((4, 5)))

    def test_symplectization_has_no_contact_form(self):
        """ A symplectization exposes ω only. """
        chart = chart_from_name('symp:darboux:1', loglevel='ERROR')
        self.assertIsInstance(chart, SymplectizationChart)
        with self.assertRaises(UnsupportedFormError):
            chart.alpha_covector(np.zeros(4))
        with self.assertRaises(UnsupportedFormError):
            ContactDynamics(chart, loglevel='ERROR')
        omega = chart.omega_matrix(np.array([0.3, -0.2, 0.1, 0.5]))
        np.testing.assert_array_equal(omega, -omega.T)
        self.assertGreater(abs(np.linalg.det(omega)), 1e-6)

    def test_chart_from_name(self):
        input_values = ['darboux:1', 'Darboux:2', 'circle', 'preq', 'symp:circle']
        expected_output = [3, 5, 1, 3, 2]
        output = [chart_from_name(name, loglevel='ERROR').dimension for name in input_values]
        self.assertEqual(expected_output, output)
        with self.assertRaises(InputError):
            chart_from_name('torus')


class TestScalarField(unittest.TestCase):

    def test_analytic_gradients(self):
        """
        Analytic gradients agree with central differences for the field factories.

        """
        rng = np.random.default_rng(4)
        fields = [random_polynomial_field(rng, 3, 3), hk_field(2), bump_field(3),
                  random_trig_polynomial_field(rng), coordinate_field(DarbouxChart(2, loglevel='ERROR'), 'y2')]
        for field in fields:
            passed, deviation = field.check_gradient(rng)
            self.assertTrue(passed, '{} deviates by {}'.format(field.name, deviation))

    def test_compact_support(self):
        rng = np.random.default_rng(5)
        self.assertTrue(bump_field(3).vanishes_outside_support(rng))
        self.assertTrue(constant_field(0.0, 2).compact_support)
        self.assertFalse(constant_field(1.0, 2).compact_support)
        self.assertEqual(-1.0, bump_field(3).evaluate(0.0, np.zeros(3)))

    def test_algebra(self):
        rng = np.random.default_rng(6)
        F, G = random_polynomial_field(rng, 3, 2), random_polynomial_field(rng, 3, 2)
        points = rng.normal(size=(7, 3))
        np.testing.assert_allclose(F.evaluate(0.0, points) + G.evaluate(0.0, points),
                                   (F + G).evaluate(0.0, points))
        np.testing.assert_allclose(F.evaluate(0.0, points) - 2.0,
                                   (F - 2.0).evaluate(0.0, points))
        product = F * G
        self.assertTrue(product.has_analytic_gradient)
        np.testing.assert_allclose(product.fd_gradient(0.0, points, 1e-6), product.grad(0.0, points), atol=1e-6)
        np.testing.assert_allclose(-F.evaluate(0.0, points), (-F).evaluate(0.0, points))

    def test_time_reversed_and_concatenate(self):
        F = trig_polynomial_field(0.1, [0.5], [0.2], time_coefficient=1.0)
        G = trig_polynomial_field(-0.3, [0.1], [0.4])
        s = np.array([[0.3]])
        self.assertAlmostEqual(-F.evaluate(0.75, s)[0], F.time_reversed().evaluate(0.25, s)[0])
        path = concatenate(F, G)
        self.assertEqual((0.5,), path.breakpoints)
        self.assertTrue(path.time_dependent)
        self.assertAlmostEqual(2 * F.evaluate(0.5, s)[0], path.evaluate(0.25, s)[0])
        self.assertAlmostEqual(2 * G.evaluate(0.5, s)[0], path.evaluate(0.75, s)[0])
        self.assertEqual((0.5,), path.time_reversed().breakpoints)

    def test_blend_and_truncate(self):
        """ β_n vanishes near 0, is the identity beyond 1/n, is odd, and β_n ∘ G stays within 1/n of G. """
        self.assertEqual(0.0, float(blend(0.01, 10)))
        self.assertEqual(0.2, float(blend(0.2, 10)))
        values = np.linspace(-1.0, 1.0, 101)
        np.testing.assert_array_equal(blend(-values, 4), -blend(values, 4))
        rng = np.random.default_rng(7)
        G = random_polynomial_field(rng, 3, 2)
        points = rng.normal(size=(500, 3))
        for n in (1, 5, 20):
            self.assertLess(np.max(np.abs(truncate(G, n).evaluate(0.0, points) - G.evaluate(0.0, points))), 1.0 / n)
        passed, deviation = truncate(G, 1).check_gradient(rng)
        self.assertTrue(passed, deviation)
        with self.assertRaises(InputError):
            truncate(G, 0.5)

    def test_field_from_spec(self):
        chart = DarbouxChart(1, loglevel='ERROR')
        p = np.array([0.5, -1.0, 2.0])
        self.assertEqual(2.0, field_from_spec('coordinate:z', chart).evaluate(0.0, p))
        self.assertEqual(2.5, field_from_spec('constant:2.5', chart).evaluate(0.0, p))
        self.assertEqual(1.0, field_from_spec('reeb', chart).evaluate(0.0, p))
        polynomial = field_from_spec({'polynomial': [[2.0, [1, 0, 0]], [1.0, [0, 1, 1]]]}, chart)
        self.assertEqual(-1.0, polynomial.evaluate(0.0, p))
        self.assertEqual('H_4', field_from_spec('hk:4', chart).name)
        with self.assertRaises(InputError):
            field_from_spec('hk:4', DarbouxChart(2, loglevel='ERROR'))
        with self.assertRaises(InputError):
            field_from_spec('wave', chart)
        with self.assertRaises(InputError):
            field_from_spec({'polynomial': [[1.0, [1, 0]]]}, chart)


class TestDynamics(unittest.TestCase):

    def setUp(self):
        self.chart = DarbouxChart(1, loglevel='ERROR')
        self.dynamics = ContactDynamics(self.chart, loglevel='ERROR')

    def test_closed_form_fields(self):
        """
        X_{x1} = ∂y1 + x1 ∂z, X_{y1} = -∂x1 and X_z = y1 ∂y1 + z ∂z at 1000 random points, and the same closed forms
        on Darboux(2).

        """
        rng = np.random.default_rng(8)
        points = rng.uniform(-2.0, 2.0, (1000, 3))
        x, y, z = points.T
        zero, one = np.zeros(1000), np.ones(1000)
        expected_output = {'x1': np.stack([zero, one, x], axis=1), 'y1': np.stack([-one, zero, zero], axis=1),
                           'z': np.stack([zero, y, z], axis=1)}
        for label, expected in expected_output.items():
            output = self.dynamics.contact_fields(coordinate_field(self.chart, label), 0.0, points)
            np.testing.assert_allclose(expected, output, rtol=0.0, atol=1e-12)
        chart = DarbouxChart(2, loglevel='ERROR')
        dynamics = ContactDynamics(chart, loglevel='ERROR')
        points = rng.uniform(-2.0, 2.0, (1000, 5))
        for label, expected in run_experiments.closed_form_fields(chart, points).items():
            output = dynamics.contact_fields(coordinate_field(chart, label), 0.0, points)
            np.testing.assert_allclose(expected, output, rtol=0.0, atol=1e-12)

    def test_reeb_field_at_origin(self):
        """ X_z vanishes at the origin and X_1 is the Reeb field. """
        origin = self.chart.point(np.zeros(3))
        np.testing.assert_array_equal(np.zeros(3),
                                      self.dynamics.contact_field_at(coordinate_field(self.chart, 'z'), 0.0,
                                                                     origin).components)
        reeb = self.dynamics.contact_field_at(constant_field(1.0, 3), 0.0, self.chart.point([0.3, 0.2, 0.1]))
        np.testing.assert_allclose([0.0, 0.0, 1.0], reeb.components, atol=1e-15)

    def test_defining_equations(self):
        """ α(X_H) = H and dα(X_H, e_j) = dH(R) α(e_j) - dH(e_j). """
        rng = np.random.default_rng(9)
        chart = DarbouxChart(2, loglevel='ERROR')
        dynamics = ContactDynamics(chart, loglevel='ERROR')
        H = random_polynomial_field(rng, 5, 3)
        points = rng.uniform(-1.0, 1.0, (50, 5))
        fields = dynamics.contact_fields(H, 0.0, points)
        covectors = chart.alpha_covector(points)
        np.testing.assert_allclose(H.evaluate(0.0, points), np.sum(covectors * fields, axis=1), atol=1e-10)
        rates = dynamics.conformal_rates(H, 0.0, points)
        gradient = H.grad(0.0, points)
        for j in range(5):
            e = np.eye(5)[j]
            np.testing.assert_allclose(rates * covectors[:, j] - gradient[:, j], chart.dalpha_values(fields, e),
                                       atol=1e-10)

    def test_brackets(self):
        """
        The symmetry defect {F,G} + {G,F} = 2(F dG(R) + G dF(R)) and antisymmetry of the minus bracket.

        """
        rng = np.random.default_rng(10)
        points = rng.uniform(-1.0, 1.0, (30, 3))
        for _ in range(10):
            F, G = random_polynomial_field(rng, 3, 2), random_polynomial_field(rng, 3, 2)
            total = self.dynamics.contact_brackets(F, G, points) + self.dynamics.contact_brackets(G, F, points)
            expected = 2 * (F.evaluate(0.0, points) * self.dynamics.conformal_rates(G, 0.0, points) +
                            G.evaluate(0.0, points) * self.dynamics.conformal_rates(F, 0.0, points))
            np.testing.assert_allclose(expected, total, atol=1e-8)
            minus = self.dynamics.contact_brackets(F, G, points, 'minus') + \
                self.dynamics.contact_brackets(G, F, points, 'minus')
            np.testing.assert_allclose(np.zeros(30), minus, atol=1e-8)
        x1, y1 = coordinate_field(self.chart, 'x1'), coordinate_field(self.chart, 'y1')
        self.assertAlmostEqual(-1.0, self.dynamics.contact_bracket_at(x1, y1, self.chart.point([0.2, 0.1, 0.4])))

    def test_bracket_rejects_time_dependent_fields(self):
        F = ScalarField(3, lambda t, batch: t * batch[:, 0], time_dependent=True)
        G = coordinate_field(self.chart, 'z')
        with self.assertRaises(InputError):
            self.dynamics.contact_brackets(F, G, np.zeros(3))
        with self.assertRaises(InputError):
            self.dynamics.contact_brackets(G, G, np.zeros(3), variant='plus')

    def test_hk_conformal_factor_at_origin(self):
        """ Under H_k the origin is fixed and g_t = -kt. """
        for k in (1, 2, 4, 8):
            for t in (0.25, 0.5, 1.0):
                end, g = self.dynamics.flow_points(hk_field(k), np.zeros((1, 3)), (0.0, t))
                self.assertLessEqual(abs(g[0] + k * t) / (k * t), 1e-6)
                np.testing.assert_allclose(np.zeros(3), end[0], atol=1e-14)

    def test_convergence_order(self):
        """ The flow of H = z from (0, 1, 1) ends at (0, e, e); halving the step divides the error by about 16. """
        ratio = self.dynamics.convergence_ratio(coordinate_field(self.chart, 'z'), np.array([0.0, 1.0, 1.0]),
                                                (0.0, 1.0), 0.1, np.array([0.0, np.e, np.e]))
        self.assertTrue(14.0 <= ratio <= 18.0, ratio)

    def test_trajectory(self):
        trajectory = self.dynamics.integrate_isotopy(coordinate_field(self.chart, 'z'), self.chart.point([0, 1, 1]),
                                                     step=0.01)
        self.assertEqual(101, len(trajectory.times))
        self.assertEqual(0.0, trajectory.conformal[0])
        self.assertAlmostEqual(1.0, trajectory.final_conformal, places=12)
        np.testing.assert_allclose([0.0, np.e, np.e], trajectory.endpoint, rtol=1e-8)
        passed, residual = self.dynamics.trajectory_residual(trajectory)
        self.assertTrue(passed, residual)

    def test_time_grid_splits_at_breakpoints(self):
        path = concatenate(constant_field(1.0, 3), constant_field(-1.0, 3))
        times = ContactDynamics.time_grid(path, 0.0, 1.0, 0.3)
        self.assertIn(0.5, times)
        self.assertEqual(0.0, times[0])
        self.assertEqual(1.0, times[-1])
        self.assertLessEqual(np.max(np.diff(times)), 0.3)

    def test_concatenated_reeb_flow(self):
        """ Running the Reeb flow forward then backward returns every point. """
        path = concatenate(constant_field(1.0, 3), constant_field(-1.0, 3))
        start = np.array([[0.1, 0.2, 0.3], [-0.5, 0.4, 1.0]])
        end, g = self.dynamics.flow_points(path, start, step=0.01)
        np.testing.assert_allclose(start, end, atol=1e-12)
        np.testing.assert_allclose(np.zeros(2), g, atol=1e-12)

    def test_blow_up(self):
        H = polynomial_field(3, [(1.0, (0, 0, 2))], name='z^2')
        with self.assertRaises(BlowUpError) as context:
            self.dynamics.flow_points(H, np.array([[0.0, 0.0, 2.0]]), step=0.01)
        self.assertLess(context.exception.last_time, 1.0)

    def test_contactomorphism(self):
        """ φ*α = e^g α for the time-1 map of a random Hamiltonian. """
        rng = np.random.default_rng(11)
        H = random_polynomial_field(rng, 3, 2, scale=0.3)
        for p in rng.uniform(-0.5, 0.5, (3, 3)):
            report = self.dynamics.verify_contactomorphism(H, p, 1.0, step=0.01)
            self.assertTrue(report.passed, report.max_deviation)
            self.assertEqual(['direction', 'pulled_back', 'expected', 'deviation'], list(report.details.columns))

    def test_conformal_factor_algebra(self):
        """ Conformal factors of compositions and inverses. """
        rng = np.random.default_rng(12)
        for _ in range(5):
            F = random_polynomial_field(rng, 3, 2, scale=0.3)
            G = random_polynomial_field(rng, 3, 2, scale=0.3)
            points = rng.uniform(-0.5, 0.5, (4, 3))
            composition = self.dynamics.verify_conformal_composition(F, G, points, step=0.01)
            self.assertTrue(composition.passed, composition.max_deviation)
            inverse = self.dynamics.verify_conformal_inverse(F, points, step=0.01)
            self.assertTrue(inverse.passed, inverse.max_deviation)

    def test_conformal_naturality(self):
        """ The minus bracket is natural under contactomorphisms up to the conformal factor. """
        rng = np.random.default_rng(13)
        for _ in range(3):
            F, G = random_polynomial_field(rng, 3, 2), random_polynomial_field(rng, 3, 2)
            H_psi = random_polynomial_field(rng, 3, 2, scale=0.3)
            report = self.dynamics.verify_conformal_naturality(H_psi, F, G, rng.uniform(-0.5, 0.5, (3, 3)),
                                                               step=0.01)
            self.assertTrue(report.passed, report.max_deviation)
            self.assertIn('deviation_cpb', report.details.columns)

    def test_transition_hamiltonian(self):
        """ The transition Hamiltonian K of (G, H) generates φ_G^{-t} ∘ φ_H^t. """
        rng = np.random.default_rng(14)
        G = random_polynomial_field(rng, 3, 2, scale=0.3)
        H = random_polynomial_field(rng, 3, 2, scale=0.3)
        K = self.dynamics.transition_hamiltonian(G, H, step=0.02)
        start = rng.uniform(-0.5, 0.5, (2, 3))
        middle, _ = self.dynamics.flow_points(K, start, step=0.05)
        end, _ = self.dynamics.flow_points(G, middle, step=0.02)
        expected, _ = self.dynamics.flow_points(H, start, step=0.02)
        np.testing.assert_allclose(expected, end, atol=1e-4)

    def test_wrong_dimension(self):
        with self.assertRaises(InputError):
            self.dynamics.contact_fields(coordinate_field(DarbouxChart(2, loglevel='ERROR'), 'z'), 0.0, np.zeros(3))


class TestSubmanifolds(unittest.TestCase):

    def analysis(self, name):
        return SubmanifoldAnalysis(chart_from_name(name, loglevel='ERROR'), step=0.01, loglevel='ERROR')

    def test_fixture_classification(self):
        """
        The fixture suite classifies with zero misclassifications at tolerance 1e-8.

        """
        input_values = ['legendrian-axis', 'z-axis', 'plane-y0', 'sphere', 'pre-lagrangian-plane',
                        'non-coiso-surface-n2', 'legendrian-plane-n2', 'circle-point']
        expected_output = [True, False, True, True, True, False, True, True]
        output = []
        for name in input_values:
            patch = patch_from_name(name)
            output.append(self.analysis(patch.chart_name).coisotropy_test(patch, 1e-8).passed)
        self.assertEqual(expected_output, output)

    def test_legendrian(self):
        input_values = ['legendrian-axis', 'z-axis', 'plane-y0', 'legendrian-plane-n2']
        expected_output = [True, False, False, True]
        output = []
        for name in input_values:
            patch = patch_from_name(name)
            output.append(self.analysis(patch.chart_name).legendrian_test(patch).passed)
        self.assertEqual(expected_output, output)

    def test_cap_and_perp(self):
        analysis = self.analysis('darboux:1')
        patch = patch_from_name('plane-y0')
        cap = analysis.cap_xi(patch, [0.5, 0.3])
        self.assertEqual(1, cap.dim)
        self.assertTrue(cap.is_orthonormal())
        perp = analysis.dalpha_perp(cap, cap.base)
        self.assertEqual(1, perp.dim)
        self.assertLessEqual(analysis.hf.subspace_distance(perp.basis, cap.basis), 1e-12)

    def test_dalpha_double_complement(self):
        """ perp(perp(V)) = V and dim V + dim perp(V) = 2n for subspaces V of ξ_p. """
        analysis = self.analysis('darboux:2')
        rng = np.random.default_rng(15)
        for k in range(0, 5):
            p = analysis.chart.point(rng.normal(size=5))
            xi = analysis.xi_basis(p)
            V = Subspace(p, analysis.hf.orthonormal_basis(xi @ rng.normal(size=(4, k))))
            perp = analysis.dalpha_perp(V, p)
            self.assertEqual(4, V.dim + perp.dim)
            again = analysis.dalpha_perp(perp, p)
            self.assertLessEqual(analysis.hf.subspace_distance(again.basis, V.basis), 1e-8)

    def test_dalpha_perp_precondition(self):
        analysis = self.analysis('darboux:1')
        p = analysis.chart.point(np.zeros(3))
        with self.assertRaises(PreconditionError):
            analysis.dalpha_perp(Subspace(p, np.array([[0.0], [0.0], [1.0]])), p)

    def test_patch_errors(self):
        analysis = self.analysis('darboux:1')
        cusp = patch_from_spec({'intrinsic_dim': 1, 'parametrization': [[[1.0, [2]]], [], []], 'grid': [[0, 0, 1]]})
        with self.assertRaises(DegeneratePatchError):
            analysis.coisotropy_test(cusp)
        empty = patch_from_spec({'intrinsic_dim': 1, 'parametrization': [[[1.0, [1]]], [], []], 'grid': [[0, 1, 0]]})
        with self.assertRaises(PreconditionError):
            analysis.coisotropy_test(empty)
        with self.assertRaises(InputError):
            self.analysis('darboux:2').coisotropy_test(patch_from_name('legendrian-axis'))
        with self.assertRaises(InputError):
            patch_from_name('torus')

    def test_custom_patch(self):
        spec = {'name': 'line', 'intrinsic_dim': 1, 'parametrization': [[[1.0, [1]]], [], [[0.5, [0]]]],
                'grid': [[-1, 1, 5]], 'coisotropic': True}
        patch = patch_from_spec(spec)
        self.assertEqual((5, 3), patch.points().shape)
        np.testing.assert_array_equal(np.full(5, 0.5), patch.points()[:, 2])
        self.assertTrue(self.analysis('darboux:1').coisotropy_test(patch).passed)

    def test_displaceability(self):
        """ The Reeb flow displaces the Legendrian axis; the flow of y1 slides along it. """
        analysis = self.analysis('darboux:1')
        axis = patch_from_name('legendrian-axis')
        self.assertTrue(analysis.displaceability_test(axis, constant_field(1.0, 3)).passed)
        verdict = analysis.displaceability_test(axis, coordinate_field(analysis.chart, 'y1'))
        self.assertFalse(verdict.passed)
        self.assertTrue(verdict.records['witness'].all())

    def test_local_frames(self):
        """ The differential of the frame embedding at 0 is the frame of the coordinate functions. """
        analysis = self.analysis('darboux:1')
        x = analysis.chart.point([0.3, -0.4, 0.2])
        labels = ['x1', 'y1', 'z']
        vectors, rank = analysis.local_frame_rank(x, labels)
        self.assertEqual(3, rank)
        np.testing.assert_allclose(x.coords, analysis.frame_embedding(x, labels, np.zeros(3)), atol=1e-15)
        h = 1e-4
        differential = np.stack([(analysis.frame_embedding(x, labels, h * e) -
                                  analysis.frame_embedding(x, labels, -h * e)) / (2 * h) for e in np.eye(3)], axis=1)
        np.testing.assert_allclose(vectors, differential, atol=1e-6)
        _, rank = self.analysis('darboux:2').local_frame_rank(DarbouxChart(2, loglevel='ERROR').point(
            [0.1, 0.2, 0.3, 0.4, 0.5]), ['x1', 'x2', 'y1', 'y2', 'z'])
        self.assertEqual(5, rank)

    def test_invariance_under_flows(self):
        analysis = self.analysis('darboux:1')
        H = bump_field(3)
        for name, expected in (('legendrian-axis', True), ('z-axis', False)):
            before, after = analysis.coisotropy_invariance_experiment(patch_from_name(name, samples=5), H, 1.0)
            self.assertEqual(expected, before.passed)
            self.assertEqual(expected, after.passed)

    def test_bracket_ideal(self):
        """ Brackets of vanishing-ideal pairs vanish on the patch iff the patch is coisotropic. """
        rng = np.random.default_rng(16)
        for name in ('legendrian-axis', 'z-axis', 'plane-y0', 'sphere', 'non-coiso-surface-n2', 'circle-point'):
            patch = patch_from_name(name)
            outcome = self.analysis(patch.chart_name).bracket_ideal_check(patch, rng, n_pairs=20)
            self.assertTrue(outcome['agrees'], outcome)
            self.assertEqual(patch.expected_coisotropic, outcome['coisotropic'])


class TestLifts(unittest.TestCase):

    def setUp(self):
        self.lift = SymplectizationLift(chart_from_name('symp:darboux:1', loglevel='ERROR'), step=0.01,
                                        loglevel='ERROR')
        self.preq = PrequantizationLift(PrequantizationChart(loglevel='ERROR'), step=0.01, loglevel='ERROR')

    def test_lift_function(self):
        rng = np.random.default_rng(17)
        F = random_polynomial_field(rng, 3, 2)
        lifted = self.lift.lift_function(F)
        self.assertTrue(lifted.check_gradient(rng)[0])
        p = np.array([0.1, 0.2, 0.3, 0.7])
        self.assertAlmostEqual(np.exp(0.7) * F.evaluate(0.0, p[:3]), lifted.evaluate(0.0, p))
        with self.assertRaises(InputError):
            self.lift.lift_function(concatenate(F, F))

    def test_hamiltonian_fields(self):
        """ ι_X ω = -dA and the lifted field X_F ⊕ (-dF(R)) ∂θ. """
        rng = np.random.default_rng(18)
        A = random_polynomial_field(rng, 4, 2)
        points = rng.uniform(-1.0, 1.0, (10, 4))
        fields = self.lift.hamiltonian_fields(A, points)
        omega = self.lift.chart.omega_matrix(points)
        np.testing.assert_allclose(-A.grad(0.0, points), np.einsum('nij,ni->nj', omega, fields), atol=1e-10)
        x1 = coordinate_field(self.lift.base, 'x1')
        point = self.lift.chart.point([0.3, 0.1, -0.2, 0.5])
        np.testing.assert_allclose([0.0, 1.0, 0.3, 0.0], self.lift.lifted_field_at(x1, point).components,
                                   atol=1e-12)

    def test_lift_bracket_identity(self):
        """ {e^θF, e^θG} = e^θ{F, G} on random polynomial pairs. """
        self.assertIn(self.lift.sign, (1.0, -1.0))
        rng = np.random.default_rng(19)
        for _ in range(20):
            F, G = random_polynomial_field(rng, 3, 2), random_polynomial_field(rng, 3, 2)
            report = self.lift.lift_bracket_check(F, G, rng.uniform(-0.5, 0.5, (5, 4)))
            self.assertTrue(report.passed, report.max_deviation)

    def test_omega_is_exact(self):
        rng = np.random.default_rng(20)
        self.assertTrue(self.lift.omega_check(rng.uniform(-1.0, 1.0, (10, 4))).passed)

    def test_lifted_maps(self):
        """ Lifted maps are exact symplectic and the lift respects composition. """
        rng = np.random.default_rng(21)
        F = random_polynomial_field(rng, 3, 2, scale=0.3)
        G = random_polynomial_field(rng, 3, 2, scale=0.3)
        points = rng.uniform(-0.3, 0.3, (4, 4))
        report = self.lift.verify_symplectic(self.lift.lift_map(F), points)
        self.assertTrue(report.passed, report.max_deviation)
        report = self.lift.lift_map_functoriality_check(F, G, points, step=0.005)
        self.assertTrue(report.passed, report.max_deviation)
        image = self.lift.lift_map(constant_field(1.0, 3))(np.array([0.0, 0.0, 0.0, 0.25]))
        np.testing.assert_allclose([[0.0, 0.0, 1.0, 0.25]], image, atol=1e-12)

    def test_symplectization_correspondence(self):
        for name in ('legendrian-axis', 'z-axis', 'plane-y0', 'sphere'):
            report = self.lift.symp_coisotropy_correspondence_check(patch_from_name(name, samples=5))
            self.assertTrue(report.passed, '{}: {}'.format(name, report.max_deviation))
            self.assertTrue(report.agreement)

    def test_lifted_cost_bound(self):
        axis = patch_from_name('legendrian-axis', samples=5)
        report = self.lift.lifted_cost_bound_check(axis, bump_field(3))
        self.assertTrue(report.passed)
        with self.assertRaises(WindowViolationError) as context:
            self.lift.lifted_cost_bound_check(axis, bump_field(3), R=1e-12)
        self.assertGreater(context.exception.suggested_window, 1e-12)
        with self.assertRaises(InputError):
            self.lift.lifted_cost_bound_check(patch_from_name('legendrian-plane-n2'), bump_field(3))

    def test_rejects_wrong_charts(self):
        with self.assertRaises(InputError):
            SymplectizationLift(DarbouxChart(1, loglevel='ERROR'), loglevel='ERROR')
        with self.assertRaises(InputError):
            PrequantizationLift(DarbouxChart(1, loglevel='ERROR'), loglevel='ERROR')

    def test_prequantization_brackets(self):
        """ {π*F, π*G} = π*{F, G} and the planar bracket {x, y} = -1. """
        x = polynomial_field(2, [(1.0, (1, 0))], name='x')
        y = polynomial_field(2, [(1.0, (0, 1))], name='y')
        self.assertEqual(-1.0, self.preq.base_bracket_at(x, y, [0.4, 0.2]))
        np.testing.assert_array_equal([-1.0, 0.0], self.preq.base_field_at(y, [0.4, 0.2]))
        rng = np.random.default_rng(22)
        for _ in range(10):
            F, G = random_polynomial_field(rng, 2, 3), random_polynomial_field(rng, 2, 3)
            points = np.concatenate([rng.uniform(-1, 1, (10, 2)), rng.uniform(0, 1, (10, 1))], axis=1)
            report = self.preq.prequant_bracket_check(F, G, points)
            self.assertTrue(report.passed, report.max_deviation)
        a = PrequantizationChart(loglevel='ERROR').point([0.5, 0.1, 0.2])
        np.testing.assert_allclose([0.0, 1.0, 0.0], self.preq.prequant_lift_field(x, a).components,
                                   atol=1e-12)

    def test_prequantization_correspondence(self):
        input_values = ['base-line-y0', 'base-point', 'base-plane']
        expected_output = [True, False, True]
        output = []
        for name in input_values:
            report = self.preq.prequant_coisotropy_check(patch_from_name(name, samples=5))
            self.assertTrue(report.agreement)
            output.append(bool(report.details['preimage_coisotropic'].iloc[0]))
        self.assertEqual(expected_output, output)


class TestNorms(unittest.TestCase):

    def setUp(self):
        self.circle = CostEstimator(CircleChart(loglevel='ERROR'), loglevel='ERROR')

    def test_cost_report_validation(self):
        with self.assertRaises(InputError):
            CostReport('shelukhin', -1.0, 'upper', 'none')
        with self.assertRaises(InputError):
            CostReport('shelukhin', 1.0, 'sideways', 'none')

    def test_circle_delta(self):
        """ The exact angular distance on ℝ/ℤ. """
        self.assertEqual(0.25, self.circle.circle_delta(0.0, 0.25).value)
        self.assertEqual('exact', self.circle.circle_delta(0.0, 0.25).bound_direction)
        self.assertAlmostEqual(0.2, self.circle.circle_delta(0.1, 0.9).value, places=15)
        self.assertAlmostEqual(0.0, self.circle.circle_delta(0.3, 1.3).value, places=15)
        rng = np.random.default_rng(23)
        for p, q in rng.uniform(0.0, 1.0, (50, 2)):
            difference = abs(p - q)
            self.assertEqual(min(difference, 1.0 - difference), self.circle.circle_delta(p, q).value)

    def test_circle_lower_bound(self):
        """ ∫ |H_t(φ^t(p))| dt ≥ d(p, φ^1(p)) on random paths, with equality for the rotation certificate. """
        rng = np.random.default_rng(24)
        for i in range(20):
            H = trig_polynomial_field(rng.uniform(-1, 1), rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3),
                                      time_coefficient=rng.uniform(-1, 1))
            report = self.circle.circle_lower_bound_check(H, rng.uniform(0.0, 1.0))
            self.assertTrue(report.passed, report.max_deviation)
        p, q = 0.9, 0.15
        certificate = self.circle.rotation_certificate(p, q)
        self.assertAlmostEqual(0.25, certificate.evaluate(0.0, np.array([0.0])))
        report = self.circle.circle_lower_bound_check(certificate, p)
        self.assertLessEqual(abs(report.max_deviation), 1e-9)
        self.assertAlmostEqual(q, report.details['endpoint'].iloc[0], places=9)

    def test_certificates_on_circle(self):
        rng = np.random.default_rng(25)
        F, G = random_trig_polynomial_field(rng), random_trig_polynomial_field(rng)
        self.assertTrue(self.circle.triangle_check(F, G).passed)
        self.assertTrue(self.circle.symmetry_check(F).passed)
        report = self.circle.conjugation_cost_check(F, random_trig_polynomial_field(rng, scale=0.3))
        self.assertTrue(report.passed, report.details.iloc[0].to_dict())
        self.assertTrue(bool(report.details['sandwich'].iloc[0]))

    def test_conjugation_by_reeb_flow(self):
        """ The time-1 Reeb flow has conformal factor 0, so conjugating by it keeps the cost. """
        F = random_trig_polynomial_field(np.random.default_rng(26))
        report = self.circle.conjugation_cost_check(F, constant_field(1.0, 1))
        details = report.details.iloc[0]
        self.assertTrue(report.passed, details.to_dict())
        self.assertAlmostEqual(1.0, details['c_minus'], places=12)
        self.assertAlmostEqual(1.0, details['c_plus'], places=12)
        self.assertAlmostEqual(details['cost'], details['conjugated_cost'], delta=1e-6)

    def test_support_box(self):
        estimator = CostEstimator(DarbouxChart(1, loglevel='ERROR'), grid_resolution=11, loglevel='ERROR')
        with self.assertRaises(InputError):
            estimator.shelukhin_cost(coordinate_field(estimator.chart, 'z'))
        self.assertEqual([(0.0, 1.0)], self.circle.support_box(constant_field(1.0, 1)))
        with self.assertRaises(InputError):
            CostEstimator(CircleChart(loglevel='ERROR'), conformal_resolution=20, loglevel='ERROR')

    def test_time_samples_split_at_breakpoints(self):
        path = concatenate(constant_field(1.0, 1), constant_field(2.0, 1))
        pieces = self.circle.time_samples(path)
        self.assertEqual(2, len(pieces))
        self.assertLess(pieces[0][1][-1], 0.5)
        self.assertEqual(0.5, pieces[1][0][0])
        self.assertAlmostEqual(3.0, self.circle.shelukhin_cost(path).value, places=12)

    def test_orbit_cost(self):
        estimator = CostEstimator(DarbouxChart(1, loglevel='ERROR'), grid_resolution=101, step=0.01,
                                  loglevel='ERROR')
        bump = bump_field(3)
        path = estimator.shelukhin_cost(bump)
        self.assertEqual(1.0, path.value)
        orbit = estimator.orbit_cost(bump, patch_from_name('legendrian-axis'))
        self.assertLessEqual(orbit.value, path.value)
        self.assertEqual('upper', orbit.bound_direction)

    def test_noncomparability_table(self):
        """
        The H_k table at 201 samples per axis: Shelukhin cost 1/k within 2%, RS cost at least 0.95·2e^k/k and a
        ratio of at least e^k.

        """
        estimator = CostEstimator(DarbouxChart(1, loglevel='ERROR'), threads=4, loglevel='ERROR')
        table = estimator.noncomparability_table([1, 2, 4, 8])
        self.assertEqual(['k', 'shelukhin', 'rs', 'modified', 'g1_at_origin', 'log_rs'], list(table.columns))
        self.assertEqual([1, 2, 4, 8], table['k'].tolist())
        for row in table.itertuples(index=False):
            k = row.k
            self.assertTrue(0.98 / k <= row.shelukhin <= 1.02 / k, row)
            self.assertGreaterEqual(row.rs, 0.95 * 2 * np.exp(k) / k)
            self.assertGreaterEqual(row.rs / row.shelukhin, np.exp(k))
            self.assertAlmostEqual(-k, row.g1_at_origin, delta=1e-6 * k)
            self.assertAlmostEqual(np.log(row.rs), row.log_rs)
            self.assertGreaterEqual(row.modified, row.shelukhin + k - 1e-6)
            self.assertLessEqual(abs(row.modified - (1.0 / k + k)), 0.05 * (1.0 / k + k))

    def test_noncomparability_guards(self):
        estimator = CostEstimator(DarbouxChart(1, loglevel='ERROR'), loglevel='ERROR')
        with self.assertRaises(InputError):
            estimator.noncomparability_table([13])
        with self.assertRaises(InputError):
            estimator.noncomparability_table([1.5])
        with self.assertRaises(InputError):
            CostEstimator(DarbouxChart(2, loglevel='ERROR'), loglevel='ERROR').noncomparability_table([1])


class TestSettings(unittest.TestCase):

    def parser(self):
        cs = CreateSettings()
        return cs.add_experiment_settings(cs.create_parser('Settings for tests'))

    def test_parser(self):
        settings = self.parser().parse_args(['norms', '--seed', '3', '--tol', '1e-6', '--plot', '-l', 'ERROR'])
        self.assertEqual('norms', settings.command)
        self.assertEqual(3, settings.seed)
        self.assertEqual(1e-6, settings.tol)
        self.assertTrue(settings.plot)
        self.assertIsNone(settings.config)
        with self.assertRaises(SystemExit):
            self.parser().parse_args(['sing'])

    def test_defaults(self):
        config = ExperimentConfig().validate()
        self.assertEqual(1e-3, config.step)
        self.assertEqual(201, config.grid_resolution)
        self.assertEqual([1, 2, 4, 8], config.k_list)
        self.assertEqual(0, config.seed)
        self.assertEqual(1e-8, config.tolerance)

    def test_validation(self):
        """ Unknown keys and non-positive knobs are configuration errors. """
        with self.assertRaises(ConfigError) as context:
            ExperimentConfig.from_dict({'stepp': 0.1}, {'stepp': 4})
        self.assertEqual(4, context.exception.line)
        input_values = [{'step': -1.0}, {'grid_resolution': 0}, {'conformal_resolution': 20}, {'k_list': [1, 0]},
                        {'t_span': [1.0, 0.0]}, {'seed': -1}, {'samples': 2.5}, {'tolerance': 'tight'}]
        for data in input_values:
            with self.assertRaises(ConfigError):
                ExperimentConfig.from_dict(data)
        config = ExperimentConfig.from_dict({'step': '1e-2', 'k_list': [2.0, 3]})
        self.assertEqual(0.01, config.step)
        self.assertEqual([2, 3], config.k_list)

    def test_overrides(self):
        settings = self.parser().parse_args(['all', '--seed', '7', '--out', 'elsewhere', '--tol', '1e-6'])
        config = ExperimentConfig(threads=8)
        with mock.patch.dict(os.environ, {'CONTACTLAB_THREADS': '2'}):
            config.apply_settings(settings)
        self.assertEqual(7, config.seed)
        self.assertEqual('elsewhere', config.out_dir)
        self.assertEqual(1e-6, config.tolerance)
        self.assertEqual(2, config.threads)
        with mock.patch.dict(os.environ, {'CONTACTLAB_THREADS': 'many'}):
            with self.assertRaises(ConfigError):
                ExperimentConfig().apply_settings(settings)

    def test_run_report(self):
        report = RunReport('flows', ExperimentConfig().validate())
        report.add('first', True, 1e-12, 1e-8)
        self.assertTrue(report.passed)
        report.add('second', False, 1.0, 1e-8)
        self.assertFalse(report.passed)
        frame = report.checks_frame()
        self.assertEqual(['check', 'passed', 'value', 'tolerance'], list(frame.columns))
        self.assertEqual([True, False], frame['passed'].tolist())
        lines = report.to_lines()
        self.assertIn('seed: 0', lines)
        self.assertEqual('verdict: FAIL', lines[-1])


class TestDataAccess(unittest.TestCase):

    def test_list_to_textfile(self):
        wd = WriteData(loglevel='ERROR')
        input_list = ['Row1', 'Row2', 'Row3']
        expected_outcome = 'Row1\nRow2\nRow3\n'
        with tempfile.TemporaryDirectory() as tmp:
            filename = os.path.join(tmp, 'list_to_textfile_test.txt')
            wd.list_to_textfile(input_list, filename)
            with open(filename, 'r', newline='') as f:
                outcome = f.read()
        self.assertEqual(expected_outcome, outcome)

    def test_save_df(self):
        """ CSV with header, ',' separator, LF endings, no index and 12 significant digits. """
        wd = WriteData(loglevel='ERROR')
        df = pd.DataFrame({'check': ['a', 'b'], 'passed': [True, False], 'value': [1.0 / 3.0, 2e-15]})
        expected_outcome = 'check,passed,value\na,True,0.333333333333\nb,False,2e-15\n'
        with tempfile.TemporaryDirectory() as tmp:
            path = wd.save_df(df, tmp, 'table')
            with open(path, 'rb') as f:
                first = f.read()
            wd.save_df(df, tmp, 'table')
            with open(path, 'rb') as f:
                second = f.read()
        self.assertEqual(expected_outcome.encode(), first)
        self.assertEqual(first, second)

    def test_read_table(self):
        """ A saved table reads back with its columns, booleans and 12-digit floats. """
        wd = WriteData(loglevel='ERROR')
        rd = ReadData(loglevel='ERROR')
        df = pd.DataFrame({'check': ['a', 'b'], 'passed': [True, False], 'value': [1.0 / 3.0, 2e-15]})
        with tempfile.TemporaryDirectory() as tmp:
            wd.save_df(df, tmp, 'table')
            output = rd.read_table(tmp, 'table')
            with self.assertRaises(InputError):
                rd.read_table(tmp, 'missing')
        self.assertEqual(['check', 'passed', 'value'], list(output.columns))
        self.assertEqual(['a', 'b'], output['check'].tolist())
        self.assertEqual([True, False], output['passed'].tolist())
        self.assertAlmostEqual(1.0 / 3.0, output['value'].iloc[0], places=12)
        self.assertEqual(2e-15, output['value'].iloc[1])

    def test_read_config(self):
        rd = ReadData(loglevel='ERROR')
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'experiment.yaml')
            with open(path, 'w') as f:
                f.write('chart: darboux:1\nstep: 0.01\nk_list: [1, 2]\nhamiltonian:\n  polynomial: [[1.0, [0, 0, 1]]]\n')
            data, key_lines = rd.read_config(path)
            self.assertEqual({'chart': 'darboux:1', 'step': 0.01, 'k_list': [1, 2],
                              'hamiltonian': {'polynomial': [[1.0, [0, 0, 1]]]}}, data)
            self.assertEqual({'chart': 1, 'step': 2, 'k_list': 3, 'hamiltonian': 4}, key_lines)
            with open(path, 'w') as f:
                f.write('chart: darboux:1\nstep: [0.01\nseed: 0\n')
            with self.assertRaises(ConfigError) as context:
                rd.read_config(path)
            self.assertIsNotNone(context.exception.line)
            with self.assertRaises(ConfigError):
                rd.read_config(os.path.join(tmp, 'missing.yaml'))

    def test_cost_plot(self):
        table = pd.DataFrame({'k': [1, 2], 'shelukhin': [1.0, 0.5], 'rs': [5.4, 7.4], 'modified': [2.0, 2.5]})
        fig = Plotting(loglevel='ERROR').cost_plot(table, title='test')
        self.assertIsInstance(fig, Figure)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'plot.png')
            WriteData(loglevel='ERROR').save_plot(fig, path, dpi=50)
            self.assertTrue(os.path.isfile(path))
        with self.assertRaises(InputError):
            Plotting(loglevel='ERROR').cost_plot(table[['k', 'rs']])


class TestRunExperiments(unittest.TestCase):

    def write_config(self, tmp, text):
        path = os.path.join(tmp, 'experiment.yaml')
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_coisotropy_command(self):
        """ The fixture verdicts match, and two runs with the same config give byte-identical CSV files. """
        with tempfile.TemporaryDirectory() as tmp:
            config = self.write_config(tmp, 'step: 0.01\nfixtures: [legendrian-axis, z-axis, sphere, circle-point, '
                                            'base-point]\n')
            contents = []
            for run in ('first', 'second'):
                out = os.path.join(tmp, run)
                code = run_experiments.main(['coisotropy', '--config', config, '--out', out, '-l', 'ERROR'])
                self.assertEqual(0, code)
                for name in ('coisotropy_checks.csv', 'coisotropy_points.csv', 'coisotropy_report.txt'):
                    self.assertTrue(os.path.isfile(os.path.join(out, name)))
                with open(os.path.join(out, 'coisotropy_checks.csv'), 'rb') as f:
                    contents.append(f.read())
            self.assertEqual(contents[0], contents[1])
            checks = ReadData(loglevel='ERROR').read_table(os.path.join(tmp, 'first'), 'coisotropy_checks')
            self.assertEqual(['check', 'passed', 'value', 'tolerance', 'seed'], list(checks.columns))
            self.assertTrue(checks['passed'].all())

    def test_config_errors_exit_with_2(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = self.write_config(tmp, 'stepp: 0.01\n')
            self.assertEqual(2, run_experiments.main(['flows', '--config', config, '--out', tmp, '-l', 'CRITICAL']))
            config = self.write_config(tmp, 'hamiltonian: wave\nchart: darboux:1\n')
            self.assertEqual(2, run_experiments.main(['flows', '--config', config, '--out', tmp, '-l', 'CRITICAL']))

    def test_flows_command(self):
        config = ExperimentConfig.from_dict({'samples': 2, 'k_list': [1, 2]})
        report = run_experiments.cmd_flows(config, loglevel='ERROR')
        failed = [c.check for c in report.checks if not c.passed]
        self.assertEqual([], failed)

    def test_brackets_and_lifts_commands(self):
        config = ExperimentConfig.from_dict({'samples': 2, 'fixtures': ['legendrian-axis', 'z-axis', 'base-line-y0']})
        for command in (run_experiments.cmd_brackets, run_experiments.cmd_lifts):
            report = command(config, loglevel='ERROR')
            failed = [c.check for c in report.checks if not c.passed]
            self.assertEqual([], failed)

    def test_norms_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = self.write_config(tmp, 'grid_resolution: 41\nk_list: [1, 2]\ncircle_points: 5\nseed: 3\n')
            code = run_experiments.main(['norms', '--config', config, '--out', tmp, '--plot', '-l', 'ERROR'])
            self.assertEqual(0, code)
            rd = ReadData(loglevel='ERROR')
            table = rd.read_table(tmp, 'noncomparability')
            self.assertEqual([1, 2], table['k'].tolist())
            self.assertEqual([3, 3], table['seed'].tolist())
            self.assertEqual(5, len(rd.read_table(tmp, 'circle')))
            self.assertTrue(os.path.isfile(os.path.join(tmp, 'noncomparability.png')))
            with open(os.path.join(tmp, 'norms_report.txt')) as f:
                self.assertIn('seed: 3', f.read().splitlines())


if __name__ == '__main__':
    unittest.main()
