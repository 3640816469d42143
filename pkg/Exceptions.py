#!/usr/bin/env python
""" Exceptions.py: The errors raised by the contactlab modules. """

__version__ = "0.1"


class ContactLabError(Exception):
    """
    Base class of every error raised on purpose by this toolkit. The command line runner turns these into a single
    error line and exit code 2.

    """


class InputError(ContactLabError, ValueError):
    """ Invalid input: wrong dimension, unknown name, non-positive knob or an unsupported request. """


class UnsupportedFormError(ContactLabError):
    """ The chart does not carry the requested form (a symplectization has ω, not α). """


class InconsistentSystemError(ContactLabError):
    """ The stacked contact vector field system could not be solved within its residual bound. """


class DegenerateChartError(ContactLabError):
    """ The stacked matrix or the symplectic form is singular at the requested point. """


class BlowUpError(ContactLabError):
    """ Integration produced a non-finite state. """

    def __init__(self, message, last_time):
        super().__init__(message)
        self.last_time = last_time


class DegeneratePatchError(ContactLabError):
    """ The jacobian of a submanifold patch has lost rank at a sample. """


class PreconditionError(ContactLabError):
    """ A documented precondition does not hold for the given data. """


class WindowViolationError(ContactLabError):
    """ The lifted orbit left the θ-window of the experiment. """

    def __init__(self, message, suggested_window):
        super().__init__(message)
        self.suggested_window = suggested_window


class ConfigError(InputError):
    """ The experiment configuration could not be parsed or validated. """

    def __init__(self, message, line=None):
        if line is not None:
            message = 'line {}: {}'.format(line, message)
        super().__init__(message)
        self.line = line
