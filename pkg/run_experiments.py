#!/usr/bin/env python
"""
run_experiments.py:
Runs the contactlab experiments from the command line and writes their checks as CSV tables and a text report.

    python run_experiments.py norms --config experiment.yaml --seed 3 --out results --plot

Every command collects named checks (pass flag, measured value, tolerance). The exit code is 0 when all checks
pass, 1 when a check fails and 2 when the run stops on an error.

 """

__version__ = "0.1"

# Imports:
import os
import sys
import time
import numpy as np
import pandas as pd

# Own modules:
from Logging import Logger
from Exceptions import ContactLabError
from SetupSettings import CreateSettings, ExperimentConfig, RunReport
from DataAccess import ReadData, WriteData
from Visualization import Plotting
from Charts import chart_from_name, DarbouxChart, CircleChart, PrequantizationChart
from Dynamics import (ContactDynamics, coordinate_field, constant_field, bump_field, field_from_spec,
                      random_polynomial_field, random_trig_polynomial_field, trig_polynomial_field, truncate)
from Submanifolds import SubmanifoldAnalysis, patch_from_name, patch_from_spec
from Lifts import SymplectizationLift, PrequantizationLift
from Norms import CostEstimator


# Helpers ----------------------------------------------------------------------------------------------------------

def _fixtures(config):
    return [patch_from_spec(spec) for spec in config.fixtures]


def _hamiltonian(config, chart):
    # The configured Hamiltonian lives on the configured chart; fixtures on other charts are flowed by the bump
    spec = config.hamiltonian if chart.name == config.chart else 'bump'
    return field_from_spec(spec, chart)


def coordinate_labels(chart):
    """ The coordinate labels of a chart, in coordinate order. """
    if isinstance(chart, DarbouxChart):
        return ['x{}'.format(i) for i in range(1, chart.n + 1)] + \
               ['y{}'.format(i) for i in range(1, chart.n + 1)] + ['z']
    if isinstance(chart, CircleChart):
        return ['s']
    if isinstance(chart, PrequantizationChart):
        return ['x', 'y', 't']
    return []


def _uniform(rng, n, dimension, half_width=0.5):
    return rng.uniform(-half_width, half_width, (n, dimension))


def closed_form_fields(chart, coords):
    """
    The contact vector fields of the coordinate functions of a Darboux chart in closed form, for
    α = dz - Σ y_i dx_i: X_{x_j} = ∂y_j + x_j ∂z, X_{y_j} = -∂x_j, X_z = Σ y_i ∂y_i + z ∂z.

    :param chart: DarbouxChart
    :param coords: (N, 2n+1) array
    :return: dict label -> (N, 2n+1) array
    """
    n = chart.n
    fields = {}
    for j in range(1, n + 1):
        field_x = np.zeros_like(coords)
        field_x[:, chart.y_index(j)] = 1.0
        field_x[:, chart.z_index] = coords[:, chart.x_index(j)]
        fields['x{}'.format(j)] = field_x
        field_y = np.zeros_like(coords)
        field_y[:, chart.x_index(j)] = -1.0
        fields['y{}'.format(j)] = field_y
    field_z = np.zeros_like(coords)
    field_z[:, n:2 * n] = coords[:, n:2 * n]
    field_z[:, chart.z_index] = coords[:, chart.z_index]
    fields['z'] = field_z
    return fields


# Commands ---------------------------------------------------------------------------------------------------------

def cmd_coisotropy(config, loglevel='INFO'):
    """
    This function classifies every configured fixture (coisotropic and, where the fixture knows it, Legendrian),
    compares the verdicts with the fixture classification and checks that the verdict survives the flow of the
    configured Hamiltonian. Patches in the plane are classified with the symplectic test.

    :param config: ExperimentConfig
    :param loglevel: (OPTIONAL) log level
    :return: RunReport with the per-point table 'coisotropy_points'
    """
    logger = Logger('run_experiments.cmd_coisotropy', loglevel).logger
    report = RunReport('coisotropy', config)
    tables = []
    t = config.t_span[1]
    for patch in _fixtures(config):
        if patch.chart_name == 'plane':
            lift = PrequantizationLift(PrequantizationChart(loglevel=loglevel), step=config.step, loglevel=loglevel)
            passed, residual = lift.symplectic_coisotropy_test(patch, config.tolerance)
            expected = passed if patch.expected_coisotropic is None else patch.expected_coisotropic
            report.add('symplectic coisotropic[{}] = {}'.format(patch.name, passed), passed == expected, residual,
                       config.tolerance)
            continue
        chart = chart_from_name(patch.chart_name, loglevel=loglevel)
        analysis = SubmanifoldAnalysis(chart, step=config.step, loglevel=loglevel)
        verdict = analysis.coisotropy_test(patch, config.tolerance)
        expected = verdict.passed if patch.expected_coisotropic is None else patch.expected_coisotropic
        report.add('coisotropic[{}] = {}'.format(patch.name, verdict.passed), verdict.passed == expected,
                   verdict.max_residual, config.tolerance)
        records = verdict.records.copy()
        records.insert(0, 'patch', patch.name)
        tables.append(records)
        logger.info('Per-point verdicts of {}:\n{}'.format(patch.name, verdict.records.to_string(index=False)))
        if patch.expected_legendrian is not None:
            legendrian = analysis.legendrian_test(patch, config.tolerance)
            report.add('legendrian[{}] = {}'.format(patch.name, legendrian.passed),
                       legendrian.passed == patch.expected_legendrian, legendrian.max_residual, config.tolerance)
        H = _hamiltonian(config, chart)
        before, after = analysis.coisotropy_invariance_experiment(patch, H, t, config.tolerance)
        report.add('invariance[{}] under {}'.format(patch.name, H.name), before.passed == after.passed,
                   after.max_residual, after.tolerance)
    if tables:
        report.tables['coisotropy_points'] = pd.concat(tables, ignore_index=True)
    return report


def cmd_brackets(config, loglevel='INFO'):
    """
    This function runs the randomized bracket suites with the configured seed: the symmetry defect of the contact
    bracket, antisymmetry of the minus bracket, conformal naturality, the symplectization and prequantization
    bracket identities and the agreement of ideal brackets with the coisotropy verdicts.

    :param config: ExperimentConfig
    :param loglevel: (OPTIONAL) log level
    :return: RunReport
    """
    logger = Logger('run_experiments.cmd_brackets', loglevel).logger
    report = RunReport('brackets', config)
    rng = np.random.default_rng(config.seed)
    chart = chart_from_name(config.chart, loglevel=loglevel)
    dynamics = ContactDynamics(chart, step=config.step, gradient_step=config.gradient_step, loglevel=loglevel)
    d = chart.dimension

    # Symmetry defect {F,G} + {G,F} = 2(F dG(R) + G dF(R)) and antisymmetry of the minus bracket
    defect, antisymmetry = 0.0, 0.0
    for _ in range(config.samples):
        F, G = random_polynomial_field(rng, d, 2), random_polynomial_field(rng, d, 2)
        points = _uniform(rng, 20, d, 1.0)
        total = dynamics.contact_brackets(F, G, points) + dynamics.contact_brackets(G, F, points)
        expected = 2 * (F.evaluate(0.0, points) * dynamics.conformal_rates(G, 0.0, points) +
                        G.evaluate(0.0, points) * dynamics.conformal_rates(F, 0.0, points))
        scale = max(1.0, float(np.max(np.abs(expected))))
        defect = max(defect, float(np.max(np.abs(total - expected))) / scale)
        minus = dynamics.contact_brackets(F, G, points, 'minus') + dynamics.contact_brackets(G, F, points, 'minus')
        antisymmetry = max(antisymmetry, float(np.max(np.abs(minus))) / scale)
    report.add('bracket symmetry defect', defect <= config.tolerance, defect, config.tolerance)
    report.add('minus bracket antisymmetry', antisymmetry <= config.tolerance, antisymmetry, config.tolerance)

    # Conformal naturality of the bracket under contactomorphisms
    worst_cpb, worst_minus = 0.0, 0.0
    for _ in range(config.samples):
        F, G = random_polynomial_field(rng, d, 2), random_polynomial_field(rng, d, 2)
        H_psi = random_polynomial_field(rng, d, 2, scale=0.3)
        naturality = dynamics.verify_conformal_naturality(H_psi, F, G, _uniform(rng, 3, d), 1e-5, 'minus',
                                                          step=config.suite_step)
        worst_minus = max(worst_minus, naturality.max_deviation)
        worst_cpb = max(worst_cpb, float(naturality.details['deviation_cpb'].max()))
    report.add('conformal naturality (minus bracket)', worst_minus <= 1e-5, worst_minus, 1e-5)
    logger.info('Conformal naturality deviation of the cpb bracket: {:.3e}.'.format(worst_cpb))

    # Symplectization and prequantization bracket identities
    if isinstance(chart, DarbouxChart):
        lift = SymplectizationLift(chart_from_name('symp:' + chart.name, loglevel=loglevel), step=config.step,
                                   loglevel=loglevel)
        worst = 0.0
        for _ in range(config.samples):
            F, G = random_polynomial_field(rng, d, 2), random_polynomial_field(rng, d, 2)
            worst = max(worst, lift.lift_bracket_check(F, G, _uniform(rng, 5, d + 1), 1e-6).max_deviation)
        report.add('lift bracket identity', worst <= 1e-6, worst, 1e-6)
    preq = PrequantizationLift(PrequantizationChart(loglevel=loglevel), step=config.step, loglevel=loglevel)
    worst = 0.0
    for _ in range(config.samples):
        F, G = random_polynomial_field(rng, 2, 3), random_polynomial_field(rng, 2, 3)
        points = np.concatenate([_uniform(rng, 10, 2, 1.0), rng.uniform(0.0, 1.0, (10, 1))], axis=1)
        worst = max(worst, preq.prequant_bracket_check(F, G, points, 1e-8).max_deviation)
    report.add('prequantization bracket identity', worst <= 1e-8, worst, 1e-8)

    # Ideal brackets against coisotropy verdicts
    for patch in _fixtures(config):
        if patch.chart_name == 'plane' or not patch.defining_functions:
            continue
        analysis = SubmanifoldAnalysis(chart_from_name(patch.chart_name, loglevel=loglevel), step=config.step,
                                       loglevel=loglevel)
        outcome = analysis.bracket_ideal_check(patch, rng, n_pairs=2 * config.samples)
        report.add('ideal brackets[{}] vanish = {}'.format(patch.name, outcome['vanishing']), outcome['agrees'],
                   outcome['max_ratio'], 1e-6)
    return report


def cmd_flows(config, loglevel='INFO'):
    """
    This function checks the dynamics: closed-form contact vector fields, the conformal factor of H_k at the
    origin, fourth order convergence, the trajectory residual, the contactomorphism property of the configured
    flow, the composition and inverse identities of conformal factors, truncation, local frames and
    displaceability.

    :param config: ExperimentConfig
    :param loglevel: (OPTIONAL) log level
    :return: RunReport
    """
    report = RunReport('flows', config)
    rng = np.random.default_rng(config.seed)

    # Closed forms on Darboux(1) and Darboux(2)
    for n in (1, 2):
        darboux = DarbouxChart(n, loglevel=loglevel)
        dynamics = ContactDynamics(darboux, step=config.step, loglevel=loglevel)
        points = rng.uniform(-2.0, 2.0, (1000, darboux.dimension))
        worst = 0.0
        for label, expected in closed_form_fields(darboux, points).items():
            computed = dynamics.contact_fields(coordinate_field(darboux, label), 0.0, points)
            worst = max(worst, float(np.max(np.abs(computed - expected))))
        report.add('closed-form contact fields on {}'.format(darboux.name), worst <= 1e-12, worst, 1e-12)
    darboux = DarbouxChart(1, loglevel=loglevel)
    dynamics = ContactDynamics(darboux, step=config.step, fd_step=config.fd_step, loglevel=loglevel)
    origin = np.zeros(3)
    x_z = float(np.max(np.abs(dynamics.contact_fields(coordinate_field(darboux, 'z'), 0.0, origin))))
    report.add('X_z vanishes at the origin', x_z == 0.0, x_z, 0.0)

    # Conformal factor of H_k at the origin: g_t = -k t
    worst = 0.0
    for k in config.k_list:
        trajectory = dynamics.integrate_isotopy(field_from_spec('hk:{}'.format(k), darboux), origin)
        for t in (0.25, 0.5, 1.0):
            g = float(np.interp(t, trajectory.times, trajectory.conformal))
            worst = max(worst, abs(g + k * t) / (k * t))
    report.add('conformal factor of H_k at the origin', worst <= 1e-6, worst, 1e-6)

    # Fourth order convergence on the flow of H = z from (0, 1, 1), which ends at (0, e, e)
    ratio = dynamics.convergence_ratio(coordinate_field(darboux, 'z'), np.array([0.0, 1.0, 1.0]), (0.0, 1.0), 0.1,
                                       np.array([0.0, np.e, np.e]))
    report.add('integrator convergence ratio', 14.0 <= ratio <= 18.0, ratio, 16.0)

    # The configured flow
    chart = chart_from_name(config.chart, loglevel=loglevel)
    dynamics = ContactDynamics(chart, step=config.step, fd_step=config.fd_step, loglevel=loglevel)
    H = _hamiltonian(config, chart)
    d = chart.dimension
    trajectory = dynamics.integrate_isotopy(H, _uniform(rng, 1, d)[0], tuple(config.t_span))
    passed, residual = dynamics.trajectory_residual(trajectory)
    report.add('trajectory residual of {}'.format(H.name), passed, residual, 10 * trajectory.step ** 5)
    worst = 0.0
    for p in _uniform(rng, 5, d, 0.3):
        worst = max(worst, dynamics.verify_contactomorphism(H, p, config.t_span[1]).max_deviation)
    report.add('contactomorphism of {}'.format(H.name), worst <= 1e-6, worst, 1e-6)
    n = 10
    points = _uniform(rng, 200, d)
    truncation = float(np.max(np.abs(truncate(H, n).evaluate(0.0, points) - H.evaluate(0.0, points))))
    report.add('truncation of {} within 1/{}'.format(H.name, n), truncation < 1.0 / n, truncation, 1.0 / n)

    # Conformal factor algebra on random flows
    composition, inverse = 0.0, 0.0
    for _ in range(config.samples):
        F = random_polynomial_field(rng, d, 2, scale=0.3)
        G = random_polynomial_field(rng, d, 2, scale=0.3)
        points = _uniform(rng, 3, d)
        composition = max(composition, dynamics.verify_conformal_composition(
            F, G, points, 1e-5, step=config.suite_step).max_deviation)
        inverse = max(inverse, dynamics.verify_conformal_inverse(F, points, 1e-5,
                                                                 step=config.suite_step).max_deviation)
    report.add('conformal factor of a composition', composition <= 1e-5, composition, 1e-5)
    report.add('conformal factor of an inverse', inverse <= 1e-5, inverse, 1e-5)

    # Local frames of coordinate functions and displaceability of a Legendrian by the Reeb flow
    analysis = SubmanifoldAnalysis(chart, step=config.step, loglevel=loglevel)
    labels = coordinate_labels(chart)
    if labels:
        _, rank = analysis.local_frame_rank(chart.point(_uniform(rng, 1, d)[0]), labels)
        report.add('local frame rank on {}'.format(chart.name), rank == d, rank, d)
    axis = patch_from_name('legendrian-axis')
    darboux_analysis = SubmanifoldAnalysis(darboux, step=config.step, loglevel=loglevel)
    displaced = darboux_analysis.displaceability_test(axis, constant_field(1.0, 3), config.tolerance)
    report.add('legendrian-axis displaced by the Reeb flow', displaced.passed, displaced.max_residual,
               config.tolerance)
    return report


def cmd_lifts(config, loglevel='INFO'):
    """
    This function checks the symplectization and prequantization constructions: the correspondence of coisotropic
    submanifolds on every fixture, ω = d(e^θ α), exactness and functoriality of lifted maps and the lifted cost bound.

    :param config: ExperimentConfig
    :param loglevel: (OPTIONAL) log level
    :return: RunReport
    """
    report = RunReport('lifts', config)
    rng = np.random.default_rng(config.seed)
    lifts = {}
    preq = PrequantizationLift(PrequantizationChart(loglevel=loglevel), step=config.step, loglevel=loglevel)
    for patch in _fixtures(config):
        if patch.chart_name == 'plane':
            check = preq.prequant_coisotropy_check(patch, config.tolerance)
        else:
            if patch.chart_name not in lifts:
                lifts[patch.chart_name] = SymplectizationLift(
                    chart_from_name('symp:' + patch.chart_name, loglevel=loglevel), step=config.step,
                    loglevel=loglevel)
            check = lifts[patch.chart_name].symp_coisotropy_correspondence_check(patch, tol=config.tolerance)
        report.add(check.name, check.passed, check.max_deviation, check.tolerance)

    lift = SymplectizationLift(chart_from_name('symp:darboux:1', loglevel=loglevel), step=config.step,
                               loglevel=loglevel)
    darboux = lift.base
    points = _uniform(rng, 20, 4)
    check = lift.omega_check(points)
    report.add(check.name, check.passed, check.max_deviation, check.tolerance)
    H = _hamiltonian(config, darboux)
    check = lift.verify_symplectic(lift.lift_map(H, config.t_span[1]), _uniform(rng, 5, 4, 0.3), config.fd_step)
    report.add('lift of {} is exact symplectic'.format(H.name), check.passed, check.max_deviation, check.tolerance)
    F = random_polynomial_field(rng, 3, 2, scale=0.3)
    G = random_polynomial_field(rng, 3, 2, scale=0.3)
    check = lift.lift_map_functoriality_check(F, G, _uniform(rng, 5, 4))
    report.add(check.name, check.passed, check.max_deviation, check.tolerance)
    check = lift.lifted_cost_bound_check(patch_from_name('legendrian-axis'), H)
    report.add('{} under {}'.format(check.name, H.name), check.passed, check.max_deviation, check.tolerance)
    return report


def cmd_norms(config, loglevel='INFO'):
    """
    This function builds the non-comparability table for the configured k-list and checks it against the closed
    forms (Shelukhin cost 1/k, RS cost at least 2e^k/k), then runs the circle suite: the exact distance, the lower
    bound for random paths, the rotation certificate, the triangle inequality, symmetry and the conjugation rule.

    :param config: ExperimentConfig
    :param loglevel: (OPTIONAL) log level
    :return: RunReport with the tables 'noncomparability' and 'circle'
    """
    report = RunReport('norms', config)
    rng = np.random.default_rng(config.seed)
    estimator = CostEstimator(DarbouxChart(1, loglevel=loglevel), grid_resolution=config.grid_resolution,
                              time_steps=config.time_steps, conformal_resolution=config.conformal_resolution,
                              step=config.step, threads=config.threads, loglevel=loglevel)
    table = estimator.noncomparability_table(config.k_list)
    report.tables['noncomparability'] = table
    for row in table.itertuples(index=False):
        k = row.k
        deviation = abs(row.shelukhin * k - 1.0)
        report.add('shelukhin cost of H_{} within 2% of 1/k'.format(k), deviation <= 0.02, row.shelukhin, 0.02)
        bound = 0.95 * 2.0 * np.exp(k) / k
        report.add('rs cost of H_{} >= 0.95 * 2e^k/k'.format(k), row.rs >= bound, row.rs, bound)
        report.add('rs/shelukhin of H_{} >= e^k'.format(k), row.rs / row.shelukhin >= np.exp(k),
                   row.rs / row.shelukhin, np.exp(k))
    bump = bump_field(3)
    orbit = estimator.orbit_cost(bump, patch_from_name('legendrian-axis'))
    path = estimator.shelukhin_cost(bump)
    report.add('orbit cost <= path cost', orbit.value <= path.value + 1e-12, orbit.value, path.value)

    circle = CostEstimator(CircleChart(loglevel=loglevel), grid_resolution=config.grid_resolution,
                           time_steps=config.time_steps, conformal_resolution=config.conformal_resolution,
                           step=config.step, loglevel=loglevel)
    delta = circle.circle_delta(0.0, 0.25)
    report.add('circle distance d(0, 0.25)', delta.value == 0.25, delta.value, 0.0)
    records = []
    for i in range(config.circle_points):
        H = trig_polynomial_field(rng.uniform(-1, 1), rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3),
                                  time_coefficient=rng.uniform(-1, 1), name='random path {}'.format(i))
        p = rng.uniform(0.0, 1.0)
        check = circle.circle_lower_bound_check(H, p, step=config.step)
        records.append(dict(path=i, p=p, **check.details.iloc[0].to_dict(), slack=check.max_deviation,
                            passed=check.passed))
    paths = pd.DataFrame(records)
    report.tables['circle'] = paths
    report.add('circle lower bound on {} paths'.format(len(paths)), bool(paths['passed'].all()),
               float(paths['slack'].max()), 1e-6)
    p, q = rng.uniform(0.0, 1.0, 2)
    certificate = circle.circle_lower_bound_check(circle.rotation_certificate(p, q), p, step=config.step)
    endpoint = float(certificate.details['endpoint'].iloc[0])
    equality = max(abs(certificate.max_deviation), abs(circle.signed_circle_displacement(endpoint, q)))
    report.add('rotation certificate attains d(p, q)', equality <= 1e-9, equality, 1e-9)
    F, G = random_trig_polynomial_field(rng), random_trig_polynomial_field(rng)
    for check in (circle.triangle_check(F, G), circle.symmetry_check(F),
                  circle.conjugation_cost_check(F, random_trig_polynomial_field(rng, scale=0.3))):
        report.add(check.name, check.passed, check.max_deviation, check.tolerance)
    return report


def cmd_all(config, loglevel='INFO'):
    """ Runs every command with the same configuration and collects their checks in one report. """
    report = RunReport('all', config)
    for command in (cmd_coisotropy, cmd_brackets, cmd_flows, cmd_lifts, cmd_norms):
        report.extend(command(config, loglevel))
    return report


COMMANDS = {'coisotropy': cmd_coisotropy, 'brackets': cmd_brackets, 'flows': cmd_flows, 'lifts': cmd_lifts,
            'norms': cmd_norms, 'all': cmd_all}


# Running ----------------------------------------------------------------------------------------------------------

def load_config(settings, loglevel='INFO'):
    """
    This function builds the configuration of a run: defaults, then the YAML file given with --config, then the
    command line overrides. A relative output directory is placed inside --work_dir when that is given.

    :param settings: parsed argparse namespace
    :param loglevel: (OPTIONAL) log level
    :return: ExperimentConfig
    """
    if settings.config:
        data, key_lines = ReadData(loglevel=loglevel).read_config(settings.config)
        config = ExperimentConfig.from_dict(data, key_lines)
    else:
        config = ExperimentConfig().validate()
    config.apply_settings(settings)
    if settings.work_dir and not os.path.isabs(config.out_dir):
        config.out_dir = os.path.join(settings.work_dir, config.out_dir)
    # Field and patch specs are resolved here so that a bad spec stops the run before any computation
    field_from_spec(config.hamiltonian, chart_from_name(config.chart, loglevel=loglevel))
    _fixtures(config)
    return config


def write_report(report, plot=False, loglevel='INFO'):
    """
    This function writes the checks, the extra tables and the text report of a run to the output directory. Every
    CSV carries the seed of the run as its last column.

    :param report: RunReport
    :param plot: (OPTIONAL) also save the cost plot when the run built the non-comparability table
    :param loglevel: (OPTIONAL) log level
    :return: list of written paths
    """
    wd = WriteData(loglevel=loglevel)
    location = report.config.out_dir
    written = []
    frames = [('{}_checks'.format(report.command), report.checks_frame())] + sorted(report.tables.items())
    for name, frame in frames:
        frame = frame.copy()
        frame['seed'] = report.config.seed
        written.append(wd.save_df(frame, location, name))
    text_path = os.path.join(location, '{}_report.txt'.format(report.command))
    wd.list_to_textfile(report.to_lines(), text_path)
    written.append(text_path)
    if plot and 'noncomparability' in report.tables:
        fig = Plotting(loglevel=loglevel).cost_plot(report.tables['noncomparability'],
                                                    title='Costs of H_k (seed {})'.format(report.config.seed))
        plot_path = os.path.join(location, 'noncomparability.png')
        wd.save_plot(fig, plot_path)
        written.append(plot_path)
    return written


def main(args=None):
    """
    This function parses the command line, runs the command and writes its output.

    :param args: (OPTIONAL) argument list, default sys.argv[1:]
    :return: exit code (0 all checks pass, 1 a check failed, 2 the run stopped on an error)
    """
    cs = CreateSettings()
    parser = cs.add_experiment_settings(cs.create_parser('Settings for contactlab experiments'))
    settings = parser.parse_args(args)
    try:
        logger = Logger('run_experiments', settings.log_level).logger
    except ContactLabError as error:
        parser.error(str(error))
    try:
        config = load_config(settings, settings.log_level)
        time0 = time.time()
        report = COMMANDS[settings.command](config, settings.log_level)
        report.wall_time = time.time() - time0
        write_report(report, settings.plot, settings.log_level)
    except ContactLabError as error:
        logger.error('{}: {}'.format(type(error).__name__, error))
        return 2
    failed = [check.check for check in report.checks if not check.passed]
    for name in failed:
        logger.warning('Check failed: {}'.format(name))
    logger.info('{} finished in {:.2f} seconds: {} of {} checks passed.'.format(
        settings.command, report.wall_time, len(report.checks) - len(failed), len(report.checks)))
    return 0 if not failed else 1


if __name__ == '__main__':
    sys.exit(main())
