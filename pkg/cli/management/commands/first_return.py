"""
Exact first-return probabilities by word enumeration, next to the closed
form when the walk is a unital qubit PQ walk.

CSV columns: k, exact, case_formula, abs_diff. case_formula is empty when no
closed form applies.
"""

import numpy as np
import pandas as pd

from core.exceptions import UnsupportedError
from oqrw.combinatorics import first_return_exact
from oqrw.recurrence import case_formula, theorem51_verdict
from cli.base import LabCommand
from cli.inputs import load_density, load_walk, parse_params


class Command(LabCommand):
    help = 'Enumerate first-return probabilities up to time 2*kmax'
    default_format = 'csv'

    def add_command_arguments(self, parser):
        parser.add_argument('--walk', required=True, help='gallery:<name> or a nearest-neighbour walk JSON file')
        parser.add_argument('--param', action='append', default=[], help='key=value gallery parameter')
        parser.add_argument('--rho0', default=None, help='Matrix literal file or test-state label (default I/d)')
        parser.add_argument('--kmax', type=int, required=True)

    def run(self, config):
        k_max = config.get('kmax')
        walk = load_walk(config.get('walk'), parse_params(config.get('param')), [-1, 1], config.tol)
        if walk.pair is None:
            raise UnsupportedError("First-return enumeration needs a nearest-neighbour pair L, R", walk=walk.name)
        L, R = walk.pair
        rho0 = load_density(config.get('rho0'), walk.dim)
        exact = first_return_exact(L, R, rho0, k_max, tol=config.tol)

        try:
            verdict = theorem51_verdict(L, R, config.tol)
        except UnsupportedError:
            verdict = None
        rows = []
        for k, value in exact.items():
            formula = case_formula(verdict['case'], verdict['params'], rho0, k) if verdict else np.nan
            rows.append({'k': k, 'exact': value, 'case_formula': formula, 'abs_diff': abs(value - formula)})
        frame = pd.DataFrame(rows, columns=['k', 'exact', 'case_formula', 'abs_diff'])
        payload = {
            'case': verdict['case'] if verdict else None,
            'params': verdict['params'] if verdict else None,
            'rows': [{key: (None if isinstance(v, float) and np.isnan(v) else v) for key, v in row.items()}
                     for row in rows],
        }
        return payload, frame
