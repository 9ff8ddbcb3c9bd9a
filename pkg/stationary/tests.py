import numpy as np
from scipy import linalg
from django.test import SimpleTestCase

from core.exceptions import (
    DimensionError, InputParseError, ParameterError, StationarityError, UnsupportedError, WindowError,
)
from core.serializers import matrix_literal
from core.utils import random_density
from oqrw.gallery import walk_gallery
from oqrw.utils import from_transitions, initial_state, make_nn_walk, monitored_run, step

from .classical import expected_return_time, expected_visits, induced_stochastic_matrix, stationary_distribution
from .models import StationaryOperator
from .serializers import operator_literal, parse_operator
from .utils import (
    barrier_path_block, barrier_walk, class_property_check, communication_structure, dominance_check,
    dominance_margins, first_return_operators, is_stationary, normalize, operator_from_blocks,
    positive_recurrence_check, rho_st, stationarity_propagation,
)

I2 = np.eye(2)


def closed_barrier(p, hi):
    """Barrier walk on [0, hi] that holds at hi instead of leaving."""
    P, Q = np.sqrt(p) * I2, np.sqrt(1 - p) * I2
    transitions = {(0, 1): I2, (hi, hi - 1): Q, (hi, hi): P}
    for i in range(1, hi):
        transitions[(i, i - 1)] = Q
        transitions[(i, i + 1)] = P
    return from_transitions(2, (0, hi), transitions)


def gamma(p, j):
    """Expected visits to j between visits to 0 for the reflecting chain."""
    q = 1 - p
    return 1.0 if j == 0 else (p / q) ** (j - 1) / q


class BarrierWalkTests(SimpleTestCase):
    def test_parameters(self):
        with self.assertRaises(ParameterError):
            barrier_walk(0.6, 0.3, 10)
        with self.assertRaises(ParameterError):
            barrier_walk(0.3, 0.0, 10)
        with self.assertRaises(ParameterError):
            barrier_walk(0.3, 0.3, 0)

    def test_only_the_top_is_open(self):
        walk = barrier_walk(0.3, 0.2, 12)
        self.assertEqual(walk.window, (0, 12))
        self.assertEqual(walk.open_sites, (12,))
        np.testing.assert_allclose(walk.transition(0, 1), I2)

    def test_one_step_moves_everything_to_site_one(self):
        walk = barrier_walk(0.3, 0.2, 5)
        rho = random_density(2, np.random.default_rng(4))
        state = step(walk, initial_state(walk, rho, 0))
        self.assertEqual(state.support, [1])
        np.testing.assert_allclose(state.block(1), rho, atol=1e-15)

    def test_path_block_closed_form(self):
        p11, p22 = 0.3, 0.2
        walk = barrier_walk(p11, p22, 6)
        rho = random_density(2, np.random.default_rng(5))
        # 0 -> 1 -> 2 -> 3 -> 2 -> 1: five steps, three right moves
        path = [0, 1, 2, 3, 2, 1]
        W = I2
        for source, target in zip(path, path[1:]):
            W = walk.transition(source, target) @ W
        np.testing.assert_allclose(barrier_path_block(p11, p22, rho, 5, 3), W @ rho @ W.conj().T, atol=1e-14)


class FirstReturnOperatorTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(8)
        V = linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0][:, :2]
        self.L, self.R = V[:2], V[2:]
        self.walk = make_nn_walk(self.L, self.R, (-41, 41))
        self.rho = random_density(2, rng)

    def test_first_step_operators(self):
        ops = first_return_operators(self.walk, 0, self.rho, 4, keep=True)
        L, R, rho = self.L, self.R, self.rho
        np.testing.assert_allclose(ops.operator(1, -1).mat, L @ rho @ L.conj().T, atol=1e-14)
        np.testing.assert_allclose(ops.operator(1, 1).mat, R @ rho @ R.conj().T, atol=1e-14)
        np.testing.assert_array_equal(ops.operator(1, 0).mat, np.zeros((2, 2)))
        expected = L @ R @ rho @ (L @ R).conj().T + R @ L @ rho @ (R @ L).conj().T
        np.testing.assert_allclose(ops.operator(2, 0).mat, expected, atol=1e-14)

    def test_operators_are_kept_only_on_request(self):
        ops = first_return_operators(self.walk, 0, self.rho, 4)
        with self.assertRaises(ParameterError):
            ops.operator(1, 1)

    def test_odd_returns_vanish(self):
        ops = first_return_operators(self.walk, 0, self.rho, 40)
        np.testing.assert_array_equal(ops.return_traces[0::2], np.zeros(20))

    def test_matches_monitored_run(self):
        ops = first_return_operators(self.walk, 0, self.rho, 40)
        series = monitored_run(self.walk, self.rho, 0, 40)
        np.testing.assert_allclose(ops.return_traces, series.removed, atol=1e-10)
        self.assertAlmostEqual(ops.tail_mass, series.per_step_mass[-1], delta=1e-10)

    def test_single_step_rho_st(self):
        op = rho_st(self.walk, 0, self.rho, 1)
        L, R, rho = self.L, self.R, self.rho
        np.testing.assert_allclose(op.block(-1), L @ rho @ L.conj().T, atol=1e-14)
        np.testing.assert_allclose(op.block(1), R @ rho @ R.conj().T, atol=1e-14)
        self.assertFalse(op.normalized)
        self.assertEqual(op.horizon, 1)
        self.assertAlmostEqual(op.tail_mass, 1.0, delta=1e-12)

    def test_window_clipping(self):
        with self.assertRaises(WindowError):
            first_return_operators(self.walk, 0, self.rho, 41)


class StationaryOperatorTests(SimpleTestCase):
    def setUp(self):
        self.walk = barrier_walk(0.3, 0.3, 401)
        self.rho = random_density(2, np.random.default_rng(9))

    def test_barrier_returns_all_of_the_seed(self):
        op = rho_st(self.walk, 0, self.rho, 400)
        self.assertAlmostEqual(np.trace(op.block(0)).real, 1.0, delta=1e-8)
        self.assertAlmostEqual(op.trace_sum, 3.5, delta=1e-8)
        self.assertLess(op.tail_mass, 1e-12)

    def test_operators_are_shared(self):
        ops = first_return_operators(self.walk, 0, self.rho, 400)
        op = rho_st(self.walk, 0, self.rho, 400, ops=ops)
        np.testing.assert_array_equal(op.blocks, rho_st(self.walk, 0, self.rho, 400).blocks)
        report = positive_recurrence_check(self.walk, 0, self.rho, 400, ops=ops)
        self.assertEqual(report.as_dict(), positive_recurrence_check(self.walk, 0, self.rho, 400).as_dict())
        with self.assertRaises(ParameterError):
            rho_st(self.walk, 0, self.rho, 300, ops=ops)
        with self.assertRaises(ParameterError):
            positive_recurrence_check(self.walk, 1, self.rho, 400, ops=ops)

    def test_normalized_rho_st_is_stationary(self):
        op = normalize(rho_st(self.walk, 0, self.rho, 400))
        self.assertTrue(op.normalized)
        self.assertAlmostEqual(op.trace_sum, 1.0, delta=1e-12)
        check = is_stationary(self.walk, op)
        self.assertTrue(check['stationary'])
        self.assertLessEqual(check['max_residual'], 1e-8)
        self.assertTrue(all(r <= 1e-8 for r in stationarity_propagation(self.walk, op, 5)))

    def test_diagonal_traces_follow_each_classical_chain(self):
        p11, p22 = 0.3, 0.2
        walk = barrier_walk(p11, p22, 401)
        op = rho_st(walk, 0, np.diag([0.4, 0.6]), 400)
        for j in range(0, 30):
            block = op.block(j)
            self.assertAlmostEqual(block[0, 0].real, 0.4 * gamma(p11, j), delta=1e-9)
            self.assertAlmostEqual(block[1, 1].real, 0.6 * gamma(p22, j), delta=1e-9)

    def test_random_blocks_are_not_stationary(self):
        rng = np.random.default_rng(10)
        op = operator_from_blocks(self.walk, {j: random_density(2, rng) for j in range(1, 6)})
        check = is_stationary(self.walk, op)
        self.assertFalse(check['stationary'])
        self.assertGreater(check['max_residual'], 1e-3)

    def test_embedding_errors(self):
        with self.assertRaises(WindowError):
            is_stationary(self.walk, StationaryOperator(lo=401, blocks=np.array([I2 / 2])))
        with self.assertRaises(WindowError):
            is_stationary(self.walk, StationaryOperator(lo=-1, blocks=np.array([I2 / 2])))
        with self.assertRaises(DimensionError):
            is_stationary(self.walk, StationaryOperator(lo=1, blocks=np.array([np.eye(3)])))
        with self.assertRaises(ParameterError):
            normalize(StationaryOperator(lo=0, blocks=np.zeros((2, 2, 2))))

    def test_classical_stationary_distribution_is_stationary(self):
        walk = closed_barrier(0.3, 60)
        pi = stationary_distribution(induced_stochastic_matrix(walk))
        op = operator_from_blocks(walk, {j: pi[j] * I2 / 2 for j in walk.sites}, normalized=True)
        self.assertLessEqual(is_stationary(walk, op)['max_residual'], 1e-12)


class PositiveRecurrenceTests(SimpleTestCase):
    def test_barrier_walk_gives_evidence(self):
        walk = barrier_walk(0.3, 0.3, 401)
        for seed in range(3):
            rho = random_density(2, np.random.default_rng(seed))
            report = positive_recurrence_check(walk, 0, rho, 400)
            self.assertEqual(report.verdict, 'positive_recurrent_evidence')
            self.assertTrue(report.trace_sum_converged)
            self.assertAlmostEqual(report.trace_sum, 3.5, delta=1e-8)
            self.assertLessEqual(report.fixed_point_residual, 1e-8)

    def test_symmetric_classical_walk_is_not_evidence(self):
        walk = walk_gallery('classical', {'p': 0.5}, window=(-2001, 2001))
        report = positive_recurrence_check(walk, 0, I2 / 2, 2000)
        self.assertNotEqual(report.verdict, 'positive_recurrent_evidence')
        self.assertFalse(report.trace_sum_converged)
        self.assertEqual(report.verdict, 'inconclusive')
        self.assertGreater(report.trace_sum, 20)

    def test_amplitude_damping_fails(self):
        p = 0.5
        walk = walk_gallery('amplitude_damping', {'p': p}, window=(-51, 51))
        rho = np.diag([0.3, 0.7])
        report = positive_recurrence_check(walk, 0, rho, 50)
        self.assertEqual(report.verdict, 'fails')
        self.assertAlmostEqual(report.returned_mass, 1 - 0.3 - 0.7 * (1 - p) ** 2, delta=1e-12)
        self.assertIn('fixed_point_residual', report.as_dict())

    def test_recurrence_is_a_class_property(self):
        walk = barrier_walk(0.3, 0.3, 610)
        masses = class_property_check(walk, 1, [0, 1, 2], 600)
        for source, mass in masses.items():
            self.assertGreaterEqual(mass, 1 - 1e-6, msg=source)
            self.assertLessEqual(mass, 1 + 1e-9, msg=source)


class DominanceTests(SimpleTestCase):
    def setUp(self):
        self.walk = barrier_walk(0.3, 0.2, 500)
        self.lam = normalize(rho_st(self.walk, 0, np.diag([0.5, 0.5]), 400))

    def test_stationary_operator_dominates(self):
        for k in (0, 1, 3):
            self.assertTrue(dominance_check(self.walk, self.lam, k, 400), msg=k)

    def test_partial_sums_increase_with_the_horizon(self):
        short = dominance_margins(self.walk, self.lam, 3, 20)
        long = dominance_margins(self.walk, self.lam, 3, 200)
        self.assertTrue(np.all(short >= long - 1e-12))
        self.assertTrue(np.all(long >= -1e-8))

    def test_requires_a_stationary_operator(self):
        rng = np.random.default_rng(12)
        op = operator_from_blocks(self.walk, {j: random_density(2, rng) for j in range(0, 4)})
        with self.assertRaises(StationarityError):
            dominance_check(self.walk, op, 1, 10)


class CommunicationTests(SimpleTestCase):
    def test_invertible_walk_is_irreducible(self):
        walk = walk_gallery('case1', {'l11sq': 0.3, 'l22sq': 0.6}, window=(-5, 5))
        structure = communication_structure(walk, n_random=3)
        self.assertTrue(structure.irreducible)
        self.assertEqual(structure.classes, [list(range(-5, 6))])

    def test_left_only_walk(self):
        walk = make_nn_walk(I2, np.zeros((2, 2)), (-4, 4))
        structure = communication_structure(walk, n_random=2)
        self.assertFalse(structure.irreducible)
        self.assertFalse(structure.accessible(0, 1))
        self.assertTrue(structure.accessible(1, -3))
        self.assertEqual(len(structure.classes), 9)

    def test_amplitude_damping_is_not_irreducible(self):
        walk = walk_gallery('amplitude_damping', {'p': 0.5}, window=(-6, 6))
        every = communication_structure(walk, n_random=2)
        self.assertFalse(every.irreducible)
        self.assertFalse(every.accessible(0, 1))
        self.assertTrue(every.accessible(0, -1))
        reached = communication_structure(walk, mode='reached', origin=0)
        self.assertFalse(reached.irreducible)
        self.assertTrue(reached.accessible(0, 1))
        self.assertTrue(reached.accessible(1, 0))
        self.assertFalse(reached.accessible(1, 2))
        self.assertEqual(reached.as_dict()['mode'], 'reached')

    def test_unknown_mode(self):
        walk = walk_gallery('classical', window=(-3, 3))
        with self.assertRaises(ParameterError):
            communication_structure(walk, mode='some')

    def test_matches_classical_chain(self):
        walk = closed_barrier(0.3, 8)
        P = induced_stochastic_matrix(walk)
        structure = communication_structure(walk, n_random=2)
        n = len(P)
        steps = np.linalg.matrix_power(np.eye(n) + P, n) > 1e-12
        np.testing.assert_array_equal(structure.reach, steps)


class ClassicalOracleTests(SimpleTestCase):
    def setUp(self):
        self.P = induced_stochastic_matrix(closed_barrier(0.3, 40))

    def test_rows_are_stochastic(self):
        np.testing.assert_allclose(self.P.sum(axis=1), np.ones(41), atol=1e-14)

    def test_gth_matches_the_eigenvector(self):
        pi = stationary_distribution(self.P)
        values, vectors = linalg.eig(self.P.T)
        v = np.real(vectors[:, np.argmin(np.abs(values - 1))])
        np.testing.assert_allclose(pi, v / v.sum(), atol=1e-10)
        np.testing.assert_allclose(pi @ self.P, pi, atol=1e-14)

    def test_expected_return_time(self):
        self.assertAlmostEqual(expected_return_time(self.P, 0), 3.5, delta=1e-9)
        visits = expected_visits(self.P, 0)
        np.testing.assert_allclose(visits[:10], [gamma(0.3, j) for j in range(10)], atol=1e-9)
        pi = stationary_distribution(self.P)
        np.testing.assert_allclose(pi, visits / visits.sum(), atol=1e-12)

    def test_quantum_occupation_matches_visits(self):
        walk = barrier_walk(0.3, 0.3, 401)
        op = rho_st(walk, 0, I2 / 2, 400)
        np.testing.assert_allclose(op.traces[:40], expected_visits(self.P, 0)[:40], atol=1e-9)

    def test_non_scalar_walk(self):
        with self.assertRaises(UnsupportedError):
            induced_stochastic_matrix(barrier_walk(0.3, 0.2, 10))
        with self.assertRaises(ParameterError):
            stationary_distribution(np.eye(3))


class BlockOperatorSerializerTests(SimpleTestCase):
    def test_parse_and_emit(self):
        rho = random_density(2, np.random.default_rng(13))
        op = parse_operator({'dim': 2, 'blocks': [
            {'site': 3, 'matrix': matrix_literal(rho)},
            {'site': 1, 'matrix': matrix_literal(I2 / 2)},
        ]})
        self.assertEqual(op.lo, 1)
        self.assertEqual(op.hi, 3)
        np.testing.assert_array_equal(op.block(2), np.zeros((2, 2)))
        np.testing.assert_allclose(op.block(3), rho)
        self.assertEqual([entry['site'] for entry in operator_literal(op)['blocks']], [1, 3])

    def test_rejects_bad_blocks(self):
        block = {'site': 0, 'matrix': matrix_literal(I2)}
        with self.assertRaises(InputParseError):
            parse_operator({'dim': 2, 'blocks': [block, block]})
        with self.assertRaises(InputParseError):
            parse_operator({'dim': 3, 'blocks': [block]})
        with self.assertRaises(InputParseError):
            parse_operator({'dim': 2, 'blocks': []})
