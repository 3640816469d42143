#!/usr/bin/env python
""" DataAccess.py: Reading experiment files and writing run output (CSV tables, text reports, plots). """

__version__ = "0.2"

# Imports
import os
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import pandas as pd
import yaml
# Own modules:
from Logging import Logger
from Exceptions import ConfigError, InputError


class ReadData:
    """
    This class deals with all interactions where reading data from some file is needed.

    """

    def __init__(self, loglevel='INFO'):
        self.logger = Logger('DataAccess.ReadData', loglevel).logger

    def read_table(self, location, name):
        """
        This function reads back a table written by WriteData.save_df, e.g. '<command>_checks' or
        'noncomparability' of a run directory. Floats are parsed with round trip precision.

        :param location: the directory of the run output
        :param name: the table name without file extension
        :return: pandas dataframe
        """
        filelocation = os.path.join(location, '{}.csv'.format(name))
        if not os.path.isfile(filelocation):
            message = 'Table {} does not exist.'.format(filelocation)
            self.logger.error(message)
            raise InputError(message)
        df = pd.read_csv(filelocation, sep=',', float_precision='round_trip')
        self.logger.debug('{} rows read from {}'.format(len(df), filelocation))
        return df

    def read_config(self, filelocation):
        """
        This function reads a YAML experiment file. Parse errors are raised as ConfigError with the 1-based line of
        the problem.

        :param filelocation: full path to the YAML file
        :return: (data, key_lines) with the parsed mapping and the line of every top level key
        """
        if not os.path.isfile(filelocation):
            message = 'Config file {} does not exist.'.format(filelocation)
            self.logger.error(message)
            raise ConfigError(message)
        with open(filelocation, 'r', encoding='utf-8') as f:
            text = f.read()
        try:
            data = yaml.safe_load(text)
            node = yaml.compose(text)
        except yaml.YAMLError as error:
            mark = getattr(error, 'problem_mark', None)
            line = mark.line + 1 if mark is not None else None
            message = 'Cannot parse {}: {}'.format(filelocation, getattr(error, 'problem', None) or error)
            self.logger.error(message)
            raise ConfigError(message, line)
        key_lines = {}
        if isinstance(node, yaml.MappingNode):
            for key_node, _ in node.value:
                key_lines[key_node.value] = key_node.start_mark.line + 1
        self.logger.info('{} read to config.'.format(filelocation))
        return data, key_lines


class WriteData:
    """
    This class deals with all interactions where writing something to a file is needed.

    """

    float_format = '%.12g'

    def __init__(self, loglevel='INFO'):
        self.logger = Logger('DataAccess.WriteData', loglevel).logger

    def save_plot(self, fig, location, dpi=300):
        """
        This function saves a matplotlib figure to disk.

        :param fig: matplotlib fig instance
        :param location: full path to the save location
        :param dpi: (OPTIONAL, default=300) the dpi to use for saving the image.
        """
        fig.savefig(location, dpi=dpi)
        plt.close(fig)  # close the fig so it doesn't interfere with potential subsequent plots
        self.logger.info('Plot saved to {}'.format(location))

    def list_to_textfile(self, input_list, location):
        """
        This function writes a list to textfile, one entry per line.

        :param input_list: a list of strings to write to file
        :param location: full path where to save the textfile
        """
        with open(location, 'w', encoding='utf-8', newline='\n') as f:
            for i in input_list:
                f.write('{}\n'.format(i))
        self.logger.info('Data from list written to {}'.format(location))

    def save_df(self, df, location, name, sort_by=None):
        """
        This function saves a pandas dataframe to a csv file: ',' separator, '.' decimal, LF line endings, header on
        the first row, no index and floats with 12 significant digits, so identical frames give identical files.

        :param df: the dataframe to be saved
        :param location: the location on the disk where to save the file (full path)
        :param name: the name to use for the file without file extension (so no .csv)
        :param sort_by: (OPTIONAL) by which column the dataframe needs to be sorted before saving
        :return: the path of the written file
        """
        if sort_by is not None:
            df = df.sort_values(by=[sort_by])
        os.makedirs(location, exist_ok=True)
        path = os.path.join(location, '{}.csv'.format(name))
        df.to_csv(path, index=False, sep=',', float_format=self.float_format, lineterminator='\n')
        self.logger.info('{} rows written to {}'.format(len(df), path))
        return path
