"""
Recompute the published numbers of one suite and print a pass/fail table.

Run: python manage.py repro barrier
     python manage.py repro all --enqueue
"""

import pandas as pd

from cli.base import LabCommand, dumps
from cli.repro import SUITES, run_suite
from cli.tasks import run_repro_suite

COLUMNS = ['suite', 'check', 'value', 'expected', 'residual', 'threshold', 'passed']


class Command(LabCommand):
    help = 'Run a reproduction suite'
    default_format = 'csv'

    def add_command_arguments(self, parser):
        parser.add_argument('suite', choices=sorted(SUITES) + ['all'])
        parser.add_argument('--enqueue', action='store_true', help='Run on the rq default queue instead')

    def run(self, config):
        suite = config.get('suite')
        if config.get('enqueue'):
            job = run_repro_suite.delay(suite, config.out)
            self.stderr.write(f'Queued repro {suite} as job {job.id}')
            self.stdout.write(dumps({'suite': suite, 'queued': True, 'job': job.id}))
            return None
        checks = [check.as_dict() for check in run_suite(suite, config.seed)]
        frame = pd.DataFrame(checks, columns=COLUMNS)
        passed = int(frame['passed'].sum())
        self.stderr.write(f'{suite}: {passed}/{len(frame)} checks passed')
        return {'suite': suite, 'passed': passed, 'total': len(frame), 'checks': checks}, frame
