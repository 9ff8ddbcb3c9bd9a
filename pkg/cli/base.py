"""
Shared plumbing for pqwalk management commands.

Every command takes --tol, --seed, --format and --out. Errors raised by the
library or by argument parsing are turned into a JSON error object on stderr
and the process ends with the status the error maps to (2 contract
violation, 3 parse error, 4 cap exceeded).
"""

import json
import logging

import numpy as np
import pandas as pd
from django.core.management.base import BaseCommand

from core.exceptions import InputParseError, ParameterError, command_exception_handler

from .models import FORMATS, RunConfig

logger = logging.getLogger('cli')

# 17 significant digits round-trip every double
FLOAT_FORMAT = '%.17g'


def jsonable(value):
    """Plain JSON types for numpy scalars, arrays, complex numbers and tuples."""
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return {'re': float(value.real), 'im': float(value.imag)}
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def dumps(payload):
    return json.dumps(jsonable(payload), indent=2, sort_keys=True)


class LabCommand(BaseCommand):
    """
    Subclasses implement ``add_command_arguments`` and ``run(config)``;
    ``run`` returns a dict for JSON output, a DataFrame, or a
    (payload, frame) pair when both formats make sense; None means the
    command wrote its own output.
    """
    default_format = 'json'

    @property
    def command_name(self):
        return self.__class__.__module__.rsplit('.', 1)[-1]

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = self.argument_error
        return parser

    def argument_error(self, message):
        """Command-line errors from argparse, reported like every other failure."""
        if 'invalid choice' not in message and 'invalid' in message and 'value' in message:
            self.fail(InputParseError(message, argument_error=message))
        self.fail(ParameterError(message, argument_error=message))

    def fail(self, exc):
        payload, status = command_exception_handler(exc, {'command': self.command_name})
        self.stderr.write(dumps(payload))
        raise SystemExit(status)

    def add_arguments(self, parser):
        parser.add_argument('--tol', type=float, default=None, help='Structural tolerance (default PQWALK_TOL)')
        parser.add_argument('--seed', type=int, default=None, help='Seed of the random test states')
        parser.add_argument('--format', choices=FORMATS, default=None, help=f'Output format (default {self.default_format})')
        parser.add_argument('--out', default=None, help='Write to this path instead of stdout')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        command = self.command_name
        try:
            config = RunConfig.from_options(command, options, self.default_format)
            logger.debug(f"Running {command} with {config.options}")
            result = self.run(config)
            self.emit(result, config)
        except Exception as exc:
            self.fail(exc)

    def run(self, config):
        raise NotImplementedError('subclasses of LabCommand must provide a run() method')

    def render(self, result, config):
        payload, frame = result if isinstance(result, tuple) else (result, result)
        if config.output_format == 'csv' and isinstance(frame, pd.DataFrame):
            return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        if isinstance(payload, pd.DataFrame):
            payload = payload.to_dict(orient='records')
        return dumps(payload) + '\n'

    def emit(self, result, config):
        if result is None:
            return
        text = self.render(result, config)
        if config.out:
            with open(config.out, 'w') as handle:
                handle.write(text)
            logger.info(f"{config.command}: wrote {config.out}")
        else:
            self.stdout.write(text, ending='')
