"""
Truncated rho_st from a seed at one site, its positive-recurrence verdict
and the stationarity of its normalization.

JSON output is the report; CSV output is the per-site trace of the
unnormalized rho_st. With --out both are written: the chosen format to the
given path and the other one next to it (``report.json`` gets
``report.traces.csv``, ``traces.csv`` gets ``traces.report.json``).

Run: python manage.py stationary --walk gallery:barrier --param p11=0.3 --param p22=0.3 --site 0 --horizon 400
"""

from dataclasses import replace
from pathlib import Path

from django.conf import settings

from core.utils import DEFAULT_TOL
from stationary.utils import (
    STATIONARY_TOL, communication_structure, first_return_operators, is_stationary, normalize,
    positive_recurrence_check, rho_st,
)
from cli.base import LabCommand
from cli.inputs import gallery_name, load_density, load_walk, parse_params

COMPANIONS = {'json': ('csv', 'traces'), 'csv': ('json', 'report')}


def companion_path(out, output_format):
    """Path of the file written next to ``out`` in the other format."""
    other, label = COMPANIONS[output_format]
    path = Path(out)
    return path.with_name(f'{path.stem}.{label}.{other}')


class Command(LabCommand):
    help = 'Positive-recurrence report and stationary operator for a walk'

    def add_command_arguments(self, parser):
        parser.add_argument('--walk', required=True, help='gallery:<name>, gallery:barrier or a walk JSON file')
        parser.add_argument('--param', action='append', default=[], help='key=value gallery parameter')
        parser.add_argument('--site', type=int, default=0)
        parser.add_argument('--rho', default=None, help='Matrix literal file or test-state label (default I/d)')
        parser.add_argument('--horizon', type=int, required=True)
        parser.add_argument('--stationary-tol', type=float, default=STATIONARY_TOL)
        parser.add_argument('--communication', choices=['all', 'reached'], default=None,
                            help='Also report accessibility in this mode')

    def run(self, config):
        x = config.get('site')
        T_max = config.get('horizon')
        lo = 0 if gallery_name(config.get('walk')) == 'barrier' else x - T_max - 1
        walk = load_walk(config.get('walk'), parse_params(config.get('param')), [lo, x + T_max + 1], config.tol)
        rho = load_density(config.get('rho'), walk.dim)
        tol = config.get('stationary_tol')

        ops = first_return_operators(walk, x, rho, T_max)
        report = positive_recurrence_check(walk, x, rho, T_max, tol, ops=ops)
        op = rho_st(walk, x, rho, T_max, ops=ops)
        payload = report.as_dict()
        payload['stationarity'] = is_stationary(walk, normalize(op), tol) if op.trace_sum > 0 else None
        payload['traces'] = {str(site): trace for site, trace in zip(range(op.lo, op.hi + 1), op.traces) if trace > 0}
        if config.get('communication'):
            structure = communication_structure(
                walk, mode=config.get('communication'), origin=x, seed_state=rho, tol=DEFAULT_TOL,
                seed=config.seed, n_random=settings.PQWALK_RANDOM_STATES,
            )
            payload['communication'] = structure.as_dict()
        return payload, op.trace_frame()

    def emit(self, result, config):
        super().emit(result, config)
        if config.out:
            other = COMPANIONS[config.output_format][0]
            path = companion_path(config.out, config.output_format)
            super().emit(result, replace(config, output_format=other, out=str(path)))
