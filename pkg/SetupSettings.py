#!/usr/bin/env python
""" SetupSettings.py: Command line settings, the experiment configuration and the run report. """

__version__ = "0.2"

import argparse
import os
from dataclasses import dataclass, field, fields, asdict
from typing import List, Optional
import pandas as pd
# Own modules:
from Exceptions import ConfigError


class CreateSettings:
    """
    This class enables the creation of a default settings object using create_parser().
    This can then be extended using the other functions.

    Example implementation:

    .. code-block:: python

      from SetupSettings import CreateSettings


      class Settings:

          def __init__(self):
              # setup a settings object:
              cs = CreateSettings()
              self.parser = cs.create_parser('Settings for contactlab')
              self.parser = cs.add_experiment_settings(self.parser)

          def parse_arguments(self, args=None):
              settings = self.parser.parse_args(args)
              return settings

    """

    commands = ('coisotropy', 'brackets', 'flows', 'lifts', 'norms', 'all')

    def __init__(self):
        pass

    @staticmethod
    def create_parser(descr='Default settings object'):
        """
        This function creates the basic parser with arguments that are always added.

        Arguments added are:
         - -l / --log_level (default=INFO)
         - -w / --work_dir

        """
        parser = argparse.ArgumentParser(description=descr)
        parser.add_argument('-l', '--log_level', help='Set log level (DEBUG/INFO/ERROR)', default='INFO')
        parser.add_argument('-w', '--work_dir', help='Full path to workdir (saving temp files)')
        return parser

    @classmethod
    def add_experiment_settings(cls, parser):
        """
        This function extends an existing parser with the experiment command and its options.

        Arguments added are:
         - command (coisotropy/brackets/flows/lifts/norms/all)
         - --config PATH (YAML experiment file)
         - --seed N
         - --out DIR
         - --tol X
         - --plot

        """
        parser.add_argument('command', choices=cls.commands, help='Experiment to run')
        parser.add_argument('--config', help='Path to a YAML experiment file')
        parser.add_argument('--seed', type=int, help='Seed of the randomized suites (overrides the config file)')
        parser.add_argument('--out', help='Output directory (overrides the config file)')
        parser.add_argument('--tol', type=float, help='Pass tolerance (overrides the config file)')
        parser.add_argument('--plot', action='store_true', help='Save the cost plot of the norms experiment')
        return parser


@dataclass
class ExperimentConfig:
    """
    The configuration of one run. Values come from the defaults below, then the YAML file, then the command line.
    Field and patch specs are described in Dynamics.field_from_spec and Submanifolds.patch_from_spec.
    """
    chart: str = 'darboux:1'
    fixtures: list = field(default_factory=lambda: ['legendrian-axis', 'z-axis', 'plane-y0', 'sphere',
                                                    'pre-lagrangian-plane', 'non-coiso-surface-n2',
                                                    'legendrian-plane-n2', 'circle-point', 'base-line-y0',
                                                    'base-point', 'base-plane'])
    hamiltonian: object = 'bump'
    step: float = 1e-3
    suite_step: float = 1e-2
    grid_resolution: int = 201
    conformal_resolution: int = 21
    time_steps: int = 101
    tolerance: float = 1e-8
    fd_step: float = 1e-4
    gradient_step: float = 1e-5
    k_list: list = field(default_factory=lambda: [1, 2, 4, 8])
    t_span: list = field(default_factory=lambda: [0.0, 1.0])
    samples: int = 50
    circle_points: int = 100
    out_dir: str = 'output'
    seed: int = 0
    threads: int = 1

    positive_floats = ('step', 'suite_step', 'tolerance', 'fd_step', 'gradient_step')
    positive_ints = ('grid_resolution', 'conformal_resolution', 'time_steps', 'samples', 'circle_points', 'threads')

    @classmethod
    def from_dict(cls, data, key_lines=None):
        """
        This function builds a configuration from a mapping (e.g. a parsed YAML file) and validates it.

        :param data: mapping of field names to values (None gives the defaults)
        :param key_lines: (OPTIONAL) mapping of keys to their 1-based line in the file, used in error messages
        :return: ExperimentConfig
        """
        data = {} if data is None else data
        key_lines = {} if key_lines is None else key_lines
        if not isinstance(data, dict):
            raise ConfigError('The experiment file must hold a mapping, got {}.'.format(type(data).__name__), 1)
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError('Unknown key {!r}, known keys are {}.'.format(key, sorted(known)),
                                  key_lines.get(key))
        config = cls(**data)
        config.validate(key_lines)
        return config

    def validate(self, key_lines=None):
        """
        This function checks the configuration and converts numbers to their types.

        :param key_lines: (OPTIONAL) mapping of keys to 1-based lines
        :return: self
        """
        key_lines = {} if key_lines is None else key_lines

        def fail(key, message):
            raise ConfigError('{}: {}'.format(key, message), key_lines.get(key))

        for key in self.positive_floats + self.positive_ints:
            value = getattr(self, key)
            try:
                number = float(value)
            except (TypeError, ValueError):
                fail(key, 'expected a number, got {!r}'.format(value))
            if not number > 0:
                fail(key, 'must be positive, got {!r}'.format(value))
            if key in self.positive_ints:
                if number != int(number):
                    fail(key, 'expected an integer, got {!r}'.format(value))
                number = int(number)
            setattr(self, key, number)
        if self.conformal_resolution % 2 == 0:
            fail('conformal_resolution', 'must be odd, got {}'.format(self.conformal_resolution))
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            fail('seed', 'expected a non-negative integer, got {!r}'.format(self.seed))
        if not isinstance(self.k_list, (list, tuple)) or not self.k_list:
            fail('k_list', 'expected a non-empty list, got {!r}'.format(self.k_list))
        for k in self.k_list:
            if isinstance(k, bool) or not isinstance(k, (int, float)) or k != int(k) or k < 1:
                fail('k_list', 'entries must be positive integers, got {!r}'.format(k))
        self.k_list = [int(k) for k in self.k_list]
        if not isinstance(self.t_span, (list, tuple)) or len(self.t_span) != 2:
            fail('t_span', 'expected [t0, t1], got {!r}'.format(self.t_span))
        try:
            self.t_span = [float(self.t_span[0]), float(self.t_span[1])]
        except (TypeError, ValueError):
            fail('t_span', 'expected two numbers, got {!r}'.format(self.t_span))
        if not self.t_span[1] > self.t_span[0]:
            fail('t_span', 'must be increasing, got {!r}'.format(self.t_span))
        if isinstance(self.fixtures, (str, dict)):
            self.fixtures = [self.fixtures]
        if not isinstance(self.fixtures, list):
            fail('fixtures', 'expected a list of patch specs, got {!r}'.format(self.fixtures))
        self.chart = str(self.chart)
        self.out_dir = str(self.out_dir)
        return self

    def apply_settings(self, settings):
        """
        This function applies the command line overrides (--seed, --out, --tol) and caps the number of threads with
        the CONTACTLAB_THREADS environment variable.

        :param settings: parsed argparse namespace
        :return: self
        """
        if getattr(settings, 'seed', None) is not None:
            self.seed = settings.seed
        if getattr(settings, 'out', None) is not None:
            self.out_dir = settings.out
        if getattr(settings, 'tol', None) is not None:
            self.tolerance = settings.tol
        cap = os.environ.get('CONTACTLAB_THREADS')
        if cap:
            try:
                cap = int(cap)
            except ValueError:
                raise ConfigError('CONTACTLAB_THREADS must be an integer, got {!r}.'.format(cap))
            if cap < 1:
                raise ConfigError('CONTACTLAB_THREADS must be positive, got {}.'.format(cap))
            self.threads = min(self.threads, cap)
        return self.validate()

    def to_dict(self):
        return asdict(self)


@dataclass
class CheckResult:
    """ One line of a run: the check name, its verdict, the measured value and the tolerance it was held to. """
    check: str
    passed: bool
    value: float
    tolerance: float


@dataclass
class RunReport:
    """
    The outcome of a command: the checks in the order they ran, the configuration echo and the wall time. Extra
    tables (name -> DataFrame) are written next to the checks.
    """
    command: str
    config: ExperimentConfig
    checks: List[CheckResult] = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    wall_time: Optional[float] = None

    def add(self, check, passed, value, tolerance):
        self.checks.append(CheckResult(str(check), bool(passed), float(value), float(tolerance)))

    def extend(self, other):
        """ Appends the checks and tables of another report (used by the 'all' command). """
        self.checks.extend(other.checks)
        self.tables.update(other.tables)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def checks_frame(self):
        """ The checks as a DataFrame with columns check, passed, value, tolerance. """
        return pd.DataFrame([asdict(check) for check in self.checks],
                            columns=['check', 'passed', 'value', 'tolerance'])

    def to_lines(self):
        """ The report text: configuration echo, seed, wall time and one verdict line per check. """
        lines = ['command: {}'.format(self.command), 'seed: {}'.format(self.config.seed)]
        if self.wall_time is not None:
            lines.append('wall time: {:.2f} seconds'.format(self.wall_time))
        lines.append('config:')
        lines.extend('  {}: {}'.format(key, value) for key, value in self.config.to_dict().items())
        lines.append('checks:')
        for check in self.checks:
            lines.append('  {} {} (value {:.6g}, tolerance {:.3g})'.format(
                'PASS' if check.passed else 'FAIL', check.check, check.value, check.tolerance))
        lines.append('verdict: {}'.format('PASS' if self.passed else 'FAIL'))
        return lines
