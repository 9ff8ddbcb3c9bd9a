"""
Dump the d^2 x d^2 matrix representation of a channel.

CSV output stacks the real block over the imaginary block; each row is
labelled by part and row index.
"""

import numpy as np
import pandas as pd

from qchannels.utils import matrix_rep, validate
from core.serializers import matrix_literal
from cli.base import LabCommand
from cli.inputs import load_channel, parse_params


class Command(LabCommand):
    help = 'Print the matrix representation of a channel'
    default_format = 'csv'

    def add_command_arguments(self, parser):
        parser.add_argument('channel', help='gallery:<name> or a channel JSON file')
        parser.add_argument('params', nargs='*', help='key=value gallery parameters')

    def run(self, config):
        ch = load_channel(config.get('channel'), parse_params(config.get('params')), config.tol)
        M = matrix_rep(ch)
        n = M.shape[0]
        frame = pd.DataFrame(np.vstack([M.real, M.imag]), columns=[f'c{j}' for j in range(n)])
        frame.insert(0, 'row', np.tile(np.arange(n), 2))
        frame.insert(0, 'part', ['re'] * n + ['im'] * n)
        payload = {'dim': ch.dim, 'representation': matrix_literal(M), 'report': validate(ch).as_dict()}
        return payload, frame
