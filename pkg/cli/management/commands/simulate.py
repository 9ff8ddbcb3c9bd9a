"""
Run a walk from rho0 placed at one site.

With --monitor the origin block is removed after every step and the output
has columns n, S_n, cumulative_return; without it the columns are n, mass
and the leftmost and rightmost occupied sites.
"""

import pandas as pd

from core.exceptions import ParameterError
from core.utils import density_matrix
from oqrw.utils import check_margin, initial_state, monitored_run, step
from cli.base import LabCommand
from cli.inputs import load_density, load_walk, parse_params


class Command(LabCommand):
    help = 'Simulate an open quantum random walk'
    default_format = 'csv'

    def add_command_arguments(self, parser):
        parser.add_argument('--walk', required=True, help='gallery:<name> or a walk JSON file')
        parser.add_argument('--param', action='append', default=[], help='key=value gallery parameter')
        parser.add_argument('--window', nargs=2, type=int, default=None, metavar=('LO', 'HI'),
                            help='Window for gallery walks (default: just wide enough)')
        parser.add_argument('--rho0', default=None, help='Matrix literal file or test-state label (default I/d)')
        parser.add_argument('--steps', type=int, required=True)
        parser.add_argument('--monitor', type=int, default=None, metavar='ORIGIN')
        parser.add_argument('--site', type=int, default=0, help='Start site when not monitoring')

    def run(self, config):
        steps = config.get('steps')
        if steps < 1:
            raise ParameterError("--steps must be at least 1", steps=steps)
        origin = config.get('monitor')
        start = config.get('site') if origin is None else origin
        window = config.get('window') or [start - steps - 1, start + steps + 1]
        walk = load_walk(config.get('walk'), parse_params(config.get('param')), window, config.tol)
        rho0 = load_density(config.get('rho0'), walk.dim)

        if origin is not None:
            series = monitored_run(walk, rho0, origin, steps, config.tol, label=config.get('walk'))
            frame = series.to_frame()
            payload = {
                'origin': origin,
                'return_estimate': series.return_estimate,
                'ledger_residual': series.ledger_residual,
                'rows': frame.to_dict(orient='records'),
            }
            return payload, frame

        rho0 = density_matrix(rho0, config.tol).mat
        check_margin(walk, start, steps)
        state = initial_state(walk, rho0, start, config.tol)
        rows = []
        for n in range(1, steps + 1):
            state = step(walk, state)
            support = state.support
            rows.append({'n': n, 'mass': state.mass, 'leftmost': support[0], 'rightmost': support[-1]})
        frame = pd.DataFrame(rows, columns=['n', 'mass', 'leftmost', 'rightmost'])
        return {'site': start, 'rows': rows}, frame
