"""
Recurrence reports.

With --case the closed-form first-return series of that case is printed
(k, term, cumulative) together with the verdict for the matching pair.
With --walk the monitored walk is run for the test family of densities and
one row per density is printed.
"""

import numpy as np
import pandas as pd
from django.conf import settings

from core.exceptions import ParameterError, UnsupportedError
from oqrw.gallery import case1, case2, case3
from oqrw.recurrence import CASE_PARAMS, case_return_series, theorem51_verdict
from oqrw.utils import recurrence_evidence
from cli.base import LabCommand
from cli.inputs import load_density, load_walk, parse_params

PAIRS = {1: case1, 2: case2, 3: case3}
PAIR_KEYS = {1: ('l11sq', 'l22sq'), 2: ('x', 'y'), 3: ('x', 'y')}


class Command(LabCommand):
    help = 'Closed-form recurrence series for a case, or monitored-run evidence for a walk'
    default_format = 'csv'

    def add_command_arguments(self, parser):
        parser.add_argument('--case', type=int, choices=sorted(CASE_PARAMS), default=None)
        parser.add_argument('--l11sq', type=float, default=None)
        parser.add_argument('--l22sq', type=float, default=None)
        parser.add_argument('--x', type=float, default=None)
        parser.add_argument('--y', type=float, default=None)
        parser.add_argument('--kmax', type=int, default=None, help='Series length for --case')
        parser.add_argument('--rho0', default=None, help='Matrix literal file or test-state label (default I/2)')
        parser.add_argument('--walk', default=None, help='gallery:<name> or a walk JSON file')
        parser.add_argument('--param', action='append', default=[], help='key=value gallery parameter')
        parser.add_argument('--steps', type=int, default=200, help='Monitored steps for --walk')
        parser.add_argument('--origin', type=int, default=0)
        parser.add_argument('--random-states', type=int, default=None)

    def run(self, config):
        if (config.get('case') is None) == (config.get('walk') is None):
            raise ParameterError("Give exactly one of --case and --walk")
        if config.get('walk') is not None:
            return self.walk_evidence(config)
        return self.case_series(config)

    def case_series(self, config):
        case = config.get('case')
        k_max = config.get('kmax')
        if k_max is None:
            raise ParameterError("--case needs --kmax")
        params = {key: config.get(key) for key in ('l11sq', 'l22sq', 'x', 'y') if config.get(key) is not None}
        rho0 = load_density(config.get('rho0'), 2)
        cumulative = case_return_series(case, params, rho0, k_max)
        frame = pd.DataFrame({
            'k': np.arange(1, k_max + 1),
            'term': np.diff(cumulative, prepend=0.0),
            'cumulative': cumulative,
        })
        try:
            pair = PAIRS[case](**{key: value for key, value in params.items() if key in PAIR_KEYS[case]})
            verdict = theorem51_verdict(*pair, tol=config.tol)
        except UnsupportedError as e:
            verdict = e.as_dict()
        payload = {'case': case, 'params': params, 'verdict': verdict, 'rows': frame.to_dict(orient='records')}
        return payload, frame

    def walk_evidence(self, config):
        steps = config.get('steps')
        origin = config.get('origin')
        window = [origin - steps - 1, origin + steps + 1]
        walk = load_walk(config.get('walk'), parse_params(config.get('param')), window, config.tol)
        n_random = config.get('random_states', settings.PQWALK_RANDOM_STATES)
        rows = recurrence_evidence(walk, origin, steps, seed=config.seed, n_random=n_random)
        frame = pd.DataFrame(rows, columns=['state', 'return_estimate', 'surviving_mass', 'tail_increment'])
        payload = {'origin': origin, 'steps': steps, 'rows': rows}
        if walk.pair is not None:
            try:
                payload['verdict'] = theorem51_verdict(*walk.pair, tol=config.tol)
            except UnsupportedError as e:
                payload['verdict'] = e.as_dict()
        return payload, frame
