#!/usr/bin/env python
""" Visualization.py: Plots of experiment tables. """

__version__ = "0.2"

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
# Own modules:
from Logging import Logger
from Exceptions import InputError


class Plotting:
    """
    This class contains the plots of the experiment runner.

    """

    def __init__(self, loglevel='INFO'):
        self.logger = Logger('Visualization.Plotting', loglevel).logger

    def cost_plot(self, table, title=None, labelsize=8):
        """
        This function plots the costs of the non-comparability table against k on a logarithmic y-axis: the
        Shelukhin cost (which decays like 1/k), the RS cost (which grows like e^k) and the modified cost, with the
        reference curves 1/k and 2e^k/k as dashed lines.

        :param table: DataFrame with columns k, shelukhin, rs, modified
        :param title: (Optional) a name to label the plot
        :param labelsize: (Optional) how large the x- and y-ticks should be (Default=8)
        :return: a matplotlib figure object with the plot.
        """
        missing = [c for c in ('k', 'shelukhin', 'rs', 'modified') if c not in table.columns]
        if missing:
            message = 'Cost table lacks the columns {}.'.format(missing)
            self.logger.error(message)
            raise InputError(message)
        k = table['k'].to_numpy(dtype=float)
        reference = np.linspace(k.min(), k.max(), 100)
        fig, ax = plt.subplots()
        ax.margins(0.05)
        ax.plot(k, table['shelukhin'], marker='o', ms=4, label='Shelukhin cost')
        ax.plot(k, table['rs'], marker='s', ms=4, label='RS cost')
        ax.plot(k, table['modified'], marker='^', ms=4, label='modified cost')
        ax.plot(reference, 1.0 / reference, linestyle='--', color='grey', lw=0.8, label='1/k')
        ax.plot(reference, 2.0 * np.exp(reference) / reference, linestyle=':', color='grey', lw=0.8,
                label='2e^k/k')
        ax.set_yscale('log')
        ax.set_xlabel('k')
        ax.set_ylabel('cost')
        ax.legend(fontsize=labelsize)
        if title is not None:
            fig.suptitle(title)
        ax.tick_params(labelsize=labelsize)
        fig.tight_layout()
        self.logger.info('Cost plot created.')
        return fig
