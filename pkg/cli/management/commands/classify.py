"""
PQ decomposition and spectral class of a channel.
"""

from qchannels.utils import matrix_rep, validate
from pq.utils import analyze_pq, classify_spectral
from cli.base import LabCommand
from cli.inputs import load_channel, parse_params


class Command(LabCommand):
    help = 'Report whether a channel is PQ, its P and Q-blocks, and its spectral class'

    def add_command_arguments(self, parser):
        parser.add_argument('channel', help='gallery:<name> or a channel JSON file')
        parser.add_argument('params', nargs='*', help='key=value gallery parameters')

    def run(self, config):
        ch = load_channel(config.get('channel'), parse_params(config.get('params')), config.tol)
        decomposition = analyze_pq(matrix_rep(ch), config.tol)
        report = decomposition.as_dict()
        report['channel'] = validate(ch).as_dict()
        report['spectral'] = classify_spectral(ch, config.tol).as_dict() if decomposition.pq else None
        return report
