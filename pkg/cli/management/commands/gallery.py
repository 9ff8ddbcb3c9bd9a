"""
Print a gallery channel, or a gallery walk with --walk, as JSON.

Run: python manage.py gallery bit_flip p=0.4
     python manage.py gallery case2 x=0.3 y=0.7 --walk --window -20 20
"""

from qchannels.serializers import channel_literal
from oqrw.serializers import walk_literal
from cli.base import LabCommand
from cli.inputs import GALLERY_PREFIX, load_channel, load_walk, parse_params


class Command(LabCommand):
    help = 'Instantiate a named channel or walk and print its JSON form'

    def add_command_arguments(self, parser):
        parser.add_argument('name', help='Gallery entry')
        parser.add_argument('params', nargs='*', help='key=value parameters')
        parser.add_argument('--param', action='append', default=[], help='key=value, may be repeated')
        parser.add_argument('--walk', action='store_true', help='Look the name up in the walk gallery')
        parser.add_argument('--window', nargs=2, type=int, default=[-50, 50], metavar=('LO', 'HI'))

    def run(self, config):
        params = parse_params(config.get('params', []) + config.get('param', []))
        source = GALLERY_PREFIX + config.get('name')
        if config.get('walk'):
            return walk_literal(load_walk(source, params, config.get('window'), config.tol))
        return channel_literal(load_channel(source, params, config.tol))
