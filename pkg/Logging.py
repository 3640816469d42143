#!/usr/bin/env python
""" Logging.py: A class to standardize logging across the contactlab modules. """

__version__ = "0.2"

import logging

from Exceptions import InputError


class Logger:
    """
    This class is used to standardize logging. It takes the name of the logging object and the level.
    Levels can be given as string or integer, both lower and uppercase strings are accepted.
    The filename parameter is optional, when given, logs are written to that file as well as to the screen.

    Levels:

    - 'NOTSET' / 0
    - 'DEBUG' / 10
    - 'INFO' / 20
    - 'WARNING' / 30
    - 'ERROR' / 40
    - 'CRITICAL' / 50

    The root configuration is only done once per process; later instances only set the level of their own
    named logger. To create a logger call:

     `logger = Logger('Dynamics.ContactDynamics', 'INFO').logger`

    """

    log_format = '%(asctime)s | %(name)s | %(levelname)s | %(message)s'
    date_format = '%d-%b-%y %H:%M:%S'
    configured_files = set()

    loglevel_dict = {
        'NOTSET': logging.NOTSET,
        0: logging.NOTSET,
        'DEBUG': logging.DEBUG,
        10: logging.DEBUG,
        'INFO': logging.INFO,
        20: logging.INFO,
        'WARNING': logging.WARNING,
        30: logging.WARNING,
        'ERROR': logging.ERROR,
        40: logging.ERROR,
        'CRITICAL': logging.CRITICAL,
        50: logging.CRITICAL
    }

    def __init__(self, name_logger, logging_level='INFO', filename=None, filemode='a'):
        logging.basicConfig(format=self.log_format, datefmt=self.date_format)
        if filename is not None and filename not in self.configured_files:
            file_handler = logging.FileHandler(filename, mode=filemode)
            file_handler.setFormatter(logging.Formatter(self.log_format, datefmt=self.date_format))
            logging.getLogger().addHandler(file_handler)
            self.configured_files.add(filename)
        self.logger = logging.getLogger(name_logger)
        self.logger.setLevel(self.to_level(logging_level))

    @classmethod
    def to_level(cls, logging_level):
        """
        Translate a level given as string (any case) or integer to the logging constant.

        :param logging_level: level name or number
        :return: the logging level constant
        """
        if isinstance(logging_level, str):
            logging_level = logging_level.upper()
        if logging_level not in cls.loglevel_dict:
            raise InputError('Unknown log level {}, choose one of {}.'.format(
                logging_level, [i for i in cls.loglevel_dict if isinstance(i, str)]))
        return cls.loglevel_dict[logging_level]
