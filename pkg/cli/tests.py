import json
import os
import tempfile
from io import StringIO
from unittest import mock

import numpy as np
import pandas as pd
from django.core.management import call_command
from django.test import SimpleTestCase, override_settings

from qchannels.serializers import parse_channel
from qchannels.utils import matrix_rep
from core.exceptions import InputParseError, ParameterError
from core.serializers import matrix_literal
from oqrw.gallery import walk_gallery
from oqrw.serializers import parse_walk, walk_literal
from pq.gallery import bit_flip
from stationary.serializers import operator_literal
from stationary.utils import barrier_walk, first_return_operators, normalize, rho_st

from .inputs import load_density, load_walk, parse_params
from .models import RunConfig
from .repro import bit_flip_golden, run_suite
from .tasks import run_repro_suite


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_json(self, name, data):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w') as handle:
            json.dump(data, handle)
        return path

    def call(self, *args, **options):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err, **options)
        return out.getvalue(), err.getvalue()

    def call_failing(self, *args, **options):
        out, err = StringIO(), StringIO()
        with self.assertRaises(SystemExit) as ctx:
            call_command(*args, stdout=out, stderr=err, **options)
        return ctx.exception.code, json.loads(err.getvalue())

    def call_rejected(self, *args, **options):
        """Argument errors are raised while parsing, before --stderr is wired up."""
        with mock.patch('sys.stderr', new_callable=StringIO) as err:
            with self.assertRaises(SystemExit) as ctx:
                call_command(*args, **options)
        return ctx.exception.code, json.loads(err.getvalue())

    def frame(self, text):
        return pd.read_csv(StringIO(text))


class InputTests(SimpleTestCase):
    def test_parse_params(self):
        self.assertEqual(parse_params(['p=0.4', 'd=3']), {'p': 0.4, 'd': 3})
        self.assertEqual(parse_params(None), {})
        with self.assertRaises(InputParseError):
            parse_params(['p'])
        with self.assertRaises(InputParseError):
            parse_params(['p=high'])

    def test_density_labels(self):
        np.testing.assert_allclose(load_density(None, 2), np.eye(2) / 2)
        np.testing.assert_allclose(load_density('basis_1', 2), np.diag([0, 1]))

    def test_gallery_walk_needs_a_window(self):
        with self.assertRaises(ParameterError):
            load_walk('gallery:classical')
        with self.assertRaises(ParameterError):
            load_walk('gallery:barrier', {'p11': 0.3}, [0, 10])
        self.assertEqual(load_walk('gallery:barrier', {'p11': 0.3, 'p22': 0.2}, [0, 10]).window, (0, 10))

    def test_run_config(self):
        config = RunConfig.from_options('simulate', {'tol': None, 'seed': None, 'steps': 5, 'walk': 'x'}, 'csv')
        self.assertEqual(config.output_format, 'csv')
        self.assertEqual(config.get('walk'), 'x')
        self.assertEqual(config.get('missing', 3), 3)
        with self.assertRaises(ParameterError):
            RunConfig.from_options('simulate', {'tol': 0.0})


class ChannelCommandTests(CommandTestCase):
    def test_repr_of_gallery_bit_flip(self):
        out, _ = self.call('repr', 'gallery:bit_flip', 'p=0.4')
        frame = self.frame(out)
        real = frame[frame['part'] == 're'].drop(columns=['part', 'row']).to_numpy()
        imag = frame[frame['part'] == 'im'].drop(columns=['part', 'row']).to_numpy()
        np.testing.assert_allclose(real, bit_flip_golden(0.4), atol=1e-12)
        np.testing.assert_array_equal(imag, np.zeros((4, 4)))

    def test_repr_reads_channel_files(self):
        path = self.write_json('ch.json', {'dim': 2, 'kraus': [matrix_literal(np.eye(2))]})
        out, _ = self.call('repr', path, format='json')
        self.assertTrue(json.loads(out)['report']['trace_preserving'])

    def test_gallery_round_trip(self):
        out, _ = self.call('gallery', 'bit_flip', 'p=0.4')
        ch = parse_channel(json.loads(out))
        np.testing.assert_allclose(matrix_rep(ch), matrix_rep(bit_flip(0.4)), atol=1e-15)

    def test_gallery_walk(self):
        out, _ = self.call('gallery', 'case2', 'x=0.3', 'y=0.7', walk=True, window=[-5, 5])
        walk = parse_walk(json.loads(out))
        self.assertEqual(walk.window, (-5, 5))
        self.assertEqual(walk.offsets, (-1, 1))

    def test_unknown_gallery_name(self):
        status, error = self.call_failing('gallery', 'bit_flop')
        self.assertEqual(status, 2)
        self.assertEqual(error['code'], 'parameter_out_of_range')
        self.assertIn('choices', error['details'])

    def test_classify(self):
        out, _ = self.call('classify', 'gallery:amplitude_damping', 'p=0.5')
        report = json.loads(out)
        self.assertTrue(report['pq'])
        self.assertTrue(report['spectral']['ergodic'])
        out, _ = self.call('classify', 'gallery:unitary_qubit', 'theta=0.5')
        report = json.loads(out)
        self.assertFalse(report['pq'])
        self.assertIsNone(report['spectral'])

    def test_malformed_channel_file(self):
        path = os.path.join(self.tmp.name, 'broken.json')
        with open(path, 'w') as handle:
            handle.write('{"dim": 2, ')
        status, error = self.call_failing('classify', path)
        self.assertEqual(status, 3)
        self.assertEqual(error['code'], 'parse_error')


class WalkCommandTests(CommandTestCase):
    def setUp(self):
        super().setUp()
        walk = walk_gallery('classical', {'p': 0.5}, window=(-13, 13))
        self.walk_path = self.write_json('walk.json', walk_literal(walk))
        self.rho_path = self.write_json('rho.json', matrix_literal(np.eye(2) / 2))

    def test_monitored_simulation(self):
        out, _ = self.call('simulate', walk=self.walk_path, rho0=self.rho_path, steps=12, monitor=0)
        frame = self.frame(out)
        self.assertEqual(list(frame.columns), ['n', 'S_n', 'cumulative_return'])
        self.assertEqual(len(frame), 12)
        self.assertAlmostEqual(frame['cumulative_return'][1], 0.5, delta=1e-14)
        self.assertAlmostEqual(frame['S_n'][11] + frame['cumulative_return'][11], 1.0, delta=1e-12)

    def test_output_is_deterministic(self):
        first, _ = self.call('simulate', walk=self.walk_path, steps=12, monitor=0)
        second, _ = self.call('simulate', walk=self.walk_path, steps=12, monitor=0)
        self.assertEqual(first, second)

    def test_unmonitored_simulation(self):
        out, _ = self.call('simulate', walk='gallery:amplitude_damping', param=['p=0.5'], steps=5)
        frame = self.frame(out)
        np.testing.assert_allclose(frame['mass'], np.ones(5), atol=1e-12)
        self.assertEqual(frame['leftmost'].tolist(), [-1, -2, -3, -4, -5])
        self.assertEqual(frame['rightmost'].tolist(), [1, 0, -1, -2, -3])

    def test_bad_argument_type_is_a_parse_error(self):
        status, error = self.call_rejected('simulate', '--tol', 'abc', walk=self.walk_path, steps=3)
        self.assertEqual(status, 3)
        self.assertEqual(error['code'], 'parse_error')
        self.assertIn('--tol', error['details']['argument_error'])

    def test_bad_choice_and_missing_argument(self):
        status, error = self.call_rejected('simulate', '--format', 'xml', walk=self.walk_path, steps=3)
        self.assertEqual(status, 2)
        self.assertEqual(error['code'], 'parameter_out_of_range')
        status, error = self.call_rejected('simulate', steps=3)
        self.assertEqual(status, 2)
        self.assertIn('--walk', error['message'])

    def test_empty_window(self):
        status, error = self.call_failing('simulate', walk='gallery:classical', steps=3, monitor=0, window=[5, 1])
        self.assertEqual(status, 2)
        self.assertEqual(error['code'], 'window_clipping')

    def test_window_too_small(self):
        status, error = self.call_failing('simulate', walk=self.walk_path, steps=13, monitor=0)
        self.assertEqual(status, 2)
        self.assertEqual(error['details']['required'], [-14, 14])

    @override_settings(PQWALK_MAX_STEPS=10)
    def test_step_cap(self):
        status, error = self.call_failing('simulate', walk=self.walk_path, steps=12, monitor=0)
        self.assertEqual(status, 4)
        self.assertEqual(error['code'], 'cap_exceeded')

    def test_out_writes_a_file(self):
        path = os.path.join(self.tmp.name, 'series.csv')
        out, _ = self.call('simulate', walk=self.walk_path, steps=4, monitor=0, out=path)
        self.assertEqual(out, '')
        self.assertEqual(len(pd.read_csv(path)), 4)

    def test_first_return_matches_case_formula(self):
        out, _ = self.call('first_return', walk='gallery:case2', param=['x=0.3', 'y=0.6'], kmax=5)
        frame = self.frame(out)
        self.assertEqual(list(frame.columns), ['k', 'exact', 'case_formula', 'abs_diff'])
        self.assertLessEqual(frame['abs_diff'].max(), 1e-12)

    def test_first_return_without_closed_form(self):
        out, _ = self.call('first_return', walk='gallery:hadamard_split', kmax=3, format='json')
        report = json.loads(out)
        self.assertIsNone(report['case'])
        self.assertIsNone(report['rows'][0]['case_formula'])

    def test_first_return_cap(self):
        status, error = self.call_failing('first_return', walk='gallery:classical', kmax=13)
        self.assertEqual(status, 4)
        self.assertEqual(error['code'], 'cap_exceeded')

    def test_case_series(self):
        out, _ = self.call('recurrence', case=1, l11sq=0.5, l22sq=0.5, kmax=8, format='json')
        report = json.loads(out)
        self.assertTrue(report['verdict']['recurrent'])
        self.assertTrue(report['verdict']['all_half'])
        cumulative = [row['cumulative'] for row in report['rows']]
        self.assertTrue(all(b >= a for a, b in zip(cumulative, cumulative[1:])))
        self.assertLess(cumulative[-1], 1.0)
        self.assertAlmostEqual(cumulative[0], 0.5, delta=1e-15)

    def test_case_series_needs_parameters(self):
        status, _ = self.call_failing('recurrence', case=2, x=0.3, kmax=4)
        self.assertEqual(status, 2)
        status, _ = self.call_failing('recurrence', kmax=4)
        self.assertEqual(status, 2)

    def test_walk_evidence(self):
        out, _ = self.call('recurrence', walk='gallery:amplitude_damping', param=['p=0.5'], steps=20,
                           random_states=1, format='json')
        report = json.loads(out)
        self.assertEqual([row['state'] for row in report['rows']],
                         ['basis_0', 'basis_1', 'maximally_mixed', 'random_0'])
        self.assertEqual(report['rows'][0]['return_estimate'], 0.0)
        self.assertAlmostEqual(report['rows'][1]['return_estimate'], 0.75, delta=1e-12)
        self.assertEqual(report['verdict']['code'], 'unsupported')


class StationaryCommandTests(CommandTestCase):
    def test_barrier_report(self):
        out, _ = self.call('stationary', walk='gallery:barrier', param=['p11=0.3', 'p22=0.3'], site=0, horizon=400)
        report = json.loads(out)
        self.assertEqual(report['verdict'], 'positive_recurrent_evidence')
        self.assertTrue(report['stationarity']['stationary'])
        self.assertAlmostEqual(report['traces']['0'], 1.0, delta=1e-8)

    def test_barrier_traces_csv(self):
        out, _ = self.call('stationary', walk='gallery:barrier', param=['p11=0.3', 'p22=0.3'], horizon=400,
                           format='csv')
        frame = self.frame(out)
        self.assertEqual(list(frame.columns), ['site', 'trace'])
        self.assertAlmostEqual(frame['trace'].sum(), 3.5, delta=1e-8)

    def test_operators_computed_once(self):
        spy = mock.Mock(wraps=first_return_operators)
        with mock.patch('stationary.utils.first_return_operators', spy), \
                mock.patch('cli.management.commands.stationary.first_return_operators', spy):
            self.call('stationary', walk='gallery:barrier', param=['p11=0.3', 'p22=0.3'], horizon=100)
        self.assertEqual(spy.call_count, 1)

    def test_out_writes_report_and_traces(self):
        path = os.path.join(self.tmp.name, 'report.json')
        out, _ = self.call('stationary', walk='gallery:barrier', param=['p11=0.3', 'p22=0.3'], horizon=400, out=path)
        self.assertEqual(out, '')
        with open(path) as handle:
            report = json.load(handle)
        frame = pd.read_csv(os.path.join(self.tmp.name, 'report.traces.csv'))
        self.assertEqual(list(frame.columns), ['site', 'trace'])
        self.assertAlmostEqual(frame['trace'].sum(), sum(report['traces'].values()), delta=1e-12)
        self.assertAlmostEqual(frame['trace'].sum(), 3.5, delta=1e-8)

    def test_check_stationary(self):
        walk = barrier_walk(0.3, 0.3, 401)
        op = normalize(rho_st(walk, 0, np.eye(2) / 2, 400))
        path = self.write_json('op.json', operator_literal(op))
        out, _ = self.call('check_stationary', walk='gallery:barrier', param=['p11=0.3', 'p22=0.3'],
                           window=[0, 401], candidate=path, propagate=2)
        report = json.loads(out)
        self.assertTrue(report['stationary'])
        self.assertEqual(len(report['propagation']), 2)

        rng = np.random.default_rng(1)
        blocks = [{'site': j, 'matrix': matrix_literal(np.diag(rng.random(2)))} for j in range(3)]
        path = self.write_json('random.json', {'dim': 2, 'blocks': blocks})
        out, _ = self.call('check_stationary', walk='gallery:classical', candidate=path)
        self.assertFalse(json.loads(out)['stationary'])


class ReproCommandTests(CommandTestCase):
    def test_suites_pass(self):
        for suite in ('appendix', 'landau_streater', 'classical', 'theorem51', 'amplitude_damping', 'barrier'):
            checks = run_suite(suite)
            self.assertTrue(checks, msg=suite)
            self.assertEqual([check.check for check in checks if not check.passed], [], msg=suite)

    def test_table(self):
        out, err = self.call('repro', 'classical')
        frame = self.frame(out)
        self.assertEqual(list(frame.columns), ['suite', 'check', 'value', 'expected', 'residual', 'threshold', 'passed'])
        self.assertTrue(frame['passed'].all())
        self.assertIn('checks passed', err)

    def test_unknown_suite(self):
        with self.assertRaises(ParameterError):
            run_suite('lindblad')

    def test_enqueue(self):
        with mock.patch('cli.management.commands.repro.run_repro_suite') as task:
            task.delay.return_value.id = 'job-1'
            out, _ = self.call('repro', 'barrier', enqueue=True)
        task.delay.assert_called_once_with('barrier', None)
        self.assertEqual(json.loads(out), {'job': 'job-1', 'queued': True, 'suite': 'barrier'})

    def test_task_runs_the_command(self):
        with mock.patch('cli.tasks.call_command') as command:
            run_repro_suite('appendix')
        command.assert_called_once_with('repro', 'appendix', format='json')
