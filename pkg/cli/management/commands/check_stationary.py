"""
Stationarity residual of a candidate block operator.
"""

from stationary.utils import STATIONARY_TOL, is_stationary, stationarity_propagation
from cli.base import LabCommand
from cli.inputs import load_operator, load_walk, parse_params


class Command(LabCommand):
    help = 'Check a block operator against one step of a walk'

    def add_command_arguments(self, parser):
        parser.add_argument('--walk', required=True, help='gallery:<name>, gallery:barrier or a walk JSON file')
        parser.add_argument('--param', action='append', default=[], help='key=value gallery parameter')
        parser.add_argument('--window', nargs=2, type=int, default=None, metavar=('LO', 'HI'),
                            help='Window for gallery walks (default: the candidate sites plus a margin of 2)')
        parser.add_argument('--candidate', required=True, help='Block operator JSON file')
        parser.add_argument('--propagate', type=int, default=0, help='Also report n-step residuals')
        parser.add_argument('--stationary-tol', type=float, default=STATIONARY_TOL)

    def run(self, config):
        op = load_operator(config.get('candidate'))
        window = config.get('window') or [op.lo - 2, op.hi + 2]
        walk = load_walk(config.get('walk'), parse_params(config.get('param')), window, config.tol)
        payload = is_stationary(walk, op, config.get('stationary_tol'))
        if config.get('propagate'):
            payload['propagation'] = stationarity_propagation(walk, op, config.get('propagate'))
        return payload
