from math import comb

import numpy as np
from django.test import SimpleTestCase, override_settings

from core.exceptions import (
    CapExceededError, CompletenessError, InputParseError, ParameterError, UnsupportedError, WindowError,
)
from core.utils import random_density, random_pq_matrix, random_unitary

from .combinatorics import (
    alpha, case2_counts, case2_return_terms, case3_counts, first_return_exact, first_return_words,
)
from .gallery import amplitude_damping, case1, case2, case3, classical, hadamard_split, walk_gallery, walk_pair
from .recurrence import (
    case2_f, case2_fk_max, case3_formula, case_formula, case_return_series, classical_return_limit,
    classical_return_series, theorem51_verdict, tracial_dependence,
)
from .serializers import parse_walk, walk_literal
from .utils import from_transitions, initial_state, make_nn_walk, monitored_run, recurrence_evidence, step

SQ = 1 / np.sqrt(2)
I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]])


def random_pair(rng, d=2):
    """(L, R) from the two halves of a random isometry, so L*L + R*R = I."""
    V = random_unitary(2 * d, rng)[:, :d]
    return V[:d], V[d:]


def gallery_pairs():
    return {
        'classical': classical(0.5),
        'classical_biased': classical(0.3),
        'case1': case1(0.3, 0.8, theta=0.4, phi=-1.2),
        'case2': case2(0.3, 0.6),
        'case3': case3(0.35),
        'amplitude_damping': amplitude_damping(0.5),
        'hadamard_split': hadamard_split(),
    }


class WalkBuildTests(SimpleTestCase):
    def test_symmetric_classical_walk(self):
        walk = make_nn_walk(SQ * I2, SQ * I2, (-5, 5))
        self.assertEqual(walk.open_sites, (-5, 5))
        self.assertEqual(walk.reach, 1)
        np.testing.assert_allclose(walk.transition(2, 1), SQ * I2)
        np.testing.assert_allclose(walk.transition(2, 4), np.zeros((2, 2)))
        self.assertTrue(walk.scalar())

    def test_amplitude_damping_pair_is_valid(self):
        walk = walk_gallery('amplitude_damping', {'p': 0.3}, window=(-3, 3))
        self.assertFalse(walk.scalar())

    def test_completeness_violation(self):
        with self.assertRaises(CompletenessError) as ctx:
            make_nn_walk(I2, I2, (-3, 3))
        self.assertAlmostEqual(ctx.exception.residual, 1.0)

    def test_empty_window(self):
        with self.assertRaises(WindowError):
            make_nn_walk(SQ * I2, SQ * I2, (2, 1))

    def test_explicit_transitions_checked_per_site(self):
        transitions = {(0, 1): I2, (1, 0): SQ * I2, (1, 2): SQ * I2, (2, 1): I2}
        walk = from_transitions(2, (0, 2), transitions)
        self.assertEqual(walk.offsets, (-1, 1))
        self.assertEqual(walk.open_sites, ())
        transitions[(2, 1)] = SQ * I2
        with self.assertRaises(CompletenessError) as ctx:
            from_transitions(2, (0, 2), transitions)
        self.assertEqual(ctx.exception.details['site'], 2)

    def test_source_outside_window(self):
        with self.assertRaises(WindowError):
            from_transitions(2, (0, 2), {(3, 2): I2})

    def test_gallery_rejects_unknown_names(self):
        with self.assertRaises(ParameterError):
            walk_pair('ladder')
        with self.assertRaises(ParameterError):
            walk_pair('classical', {'q': 0.5})
        with self.assertRaises(ParameterError):
            walk_pair('classical', {'p': 1.5})


class StepTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(11)
        self.L, self.R = random_pair(self.rng)
        self.walk = make_nn_walk(self.L, self.R, (-4, 4))
        self.rho = random_density(2, self.rng)

    def test_one_step_from_origin(self):
        state = step(self.walk, initial_state(self.walk, self.rho, 0))
        L, R, rho = self.L, self.R, self.rho
        np.testing.assert_allclose(state.block(-1), L @ rho @ L.conj().T, atol=1e-12)
        np.testing.assert_allclose(state.block(1), R @ rho @ R.conj().T, atol=1e-12)
        self.assertEqual(state.support, [-1, 1])
        self.assertAlmostEqual(state.traces[self.walk.index(-1)], np.trace(L @ rho @ L.conj().T).real)

    def test_two_steps_back_at_origin(self):
        state = initial_state(self.walk, self.rho, 0)
        state = step(self.walk, step(self.walk, state))
        L, R, rho = self.L, self.R, self.rho
        LR = L @ R
        RL = R @ L
        expected = LR @ rho @ LR.conj().T + RL @ rho @ RL.conj().T
        np.testing.assert_allclose(state.block(0), expected, atol=1e-12)

    def test_identity_transitions_leave_state_unchanged(self):
        walk = from_transitions(2, (0, 3), {(j, j): I2 for j in range(4)})
        state = initial_state(walk, self.rho, 2)
        np.testing.assert_allclose(step(walk, state).blocks, state.blocks)

    def test_mass_conserved_over_200_steps(self):
        for name, (L, R) in gallery_pairs().items():
            walk = make_nn_walk(L, R, (-201, 201))
            state = initial_state(walk, self.rho, 0)
            for _ in range(200):
                state = step(walk, state)
            self.assertAlmostEqual(state.mass, 1.0, delta=1e-10, msg=name)

    def test_escape_is_an_error(self):
        walk = make_nn_walk(self.L, self.R, (-1, 1))
        state = step(walk, initial_state(walk, self.rho, 0))
        with self.assertRaises(WindowError):
            step(walk, state)
        self.assertLess(step(walk, state, allow_escape=True).mass, 1.0)


class MonitoredRunTests(SimpleTestCase):
    def test_classical_symmetric_partial_sums(self):
        walk = walk_gallery('classical', {'p': 0.5}, window=(-13, 13))
        series = monitored_run(walk, I2 / 2, 0, 12)
        self.assertAlmostEqual(series.per_step_mass[0], 1.0, delta=1e-15)
        for N in range(1, 7):
            expected = sum(alpha(k) * 4.0 ** -k for k in range(1, N + 1))
            self.assertAlmostEqual(series.cumulative_return[2 * N - 1], expected, delta=1e-12)

    def test_ledger_and_monotonicity(self):
        rng = np.random.default_rng(2)
        L, R = random_pair(rng)
        walk = make_nn_walk(L, R, (-31, 31))
        series = monitored_run(walk, random_density(2, rng), 0, 30)
        self.assertLess(series.ledger_residual, 1e-9)
        self.assertTrue(np.all(np.diff(series.per_step_mass) <= 1e-15))
        self.assertTrue(np.all(np.diff(series.cumulative_return) >= -1e-15))
        self.assertEqual(list(series.to_frame().columns), ['n', 'S_n', 'cumulative_return'])

    def test_window_must_cover_the_run(self):
        walk = walk_gallery('classical', window=(-12, 12))
        with self.assertRaises(WindowError) as ctx:
            monitored_run(walk, I2 / 2, 0, 12)
        self.assertEqual(ctx.exception.details['required'], [-13, 13])

    def test_rejects_non_density(self):
        walk = walk_gallery('classical', window=(-5, 5))
        with self.assertRaises(ParameterError):
            monitored_run(walk, I2, 0, 3)
        with self.assertRaises(ParameterError):
            monitored_run(walk, I2 / 2, 0, 0)

    def test_amplitude_damping_is_transient(self):
        walk = walk_gallery('amplitude_damping', {'p': 0.5}, window=(-101, 101))
        series = monitored_run(walk, np.diag([0.3, 0.7]), 0, 100)
        self.assertAlmostEqual(series.per_step_mass[-1], 0.3 + 0.7 * 0.25, delta=1e-6)

    def test_recurrence_evidence_over_state_family(self):
        walk = walk_gallery('classical', window=(-41, 41))
        rows = recurrence_evidence(walk, 0, 40, seed=0, n_random=2)
        self.assertEqual([row['state'] for row in rows],
                         ['basis_0', 'basis_1', 'maximally_mixed', 'random_0', 'random_1'])
        estimates = [row['return_estimate'] for row in rows]
        self.assertLess(max(estimates) - min(estimates), 1e-12)

        ad = walk_gallery('amplitude_damping', {'p': 0.5}, window=(-41, 41))
        rows = {row['state']: row for row in recurrence_evidence(ad, 0, 40, n_random=0)}
        self.assertEqual(rows['basis_0']['return_estimate'], 0.0)
        self.assertAlmostEqual(rows['basis_1']['return_estimate'], 0.75, delta=1e-12)


class CombinatoricsTests(SimpleTestCase):
    def test_alpha(self):
        self.assertEqual([alpha(k) for k in (1, 2, 3, 4)], [2, 2, 4, 10])
        self.assertEqual(alpha(30), comb(60, 30) // 59)
        with self.assertRaises(ParameterError):
            alpha(0)

    def test_first_return_words(self):
        self.assertEqual(list(first_return_words(1)), ['LR', 'RL'])
        self.assertEqual(list(first_return_words(2)), ['LLRR', 'RRLL'])
        for k in range(1, 9):
            self.assertEqual(sum(1 for _ in first_return_words(k)), alpha(k))

    def test_case2_counts(self):
        self.assertEqual(case2_counts(1), {0: 1, 1: 1})
        self.assertEqual(case2_counts(2), {0: 0, 1: 2, 2: 0})
        self.assertEqual(case2_counts(3), {0: 0, 1: 2, 2: 2, 3: 0})
        self.assertEqual(case2_counts(4), {0: 0, 1: 2, 2: 6, 3: 2, 4: 0})
        for k in range(1, 9):
            counts = case2_counts(k)
            self.assertEqual(sum(counts.values()), alpha(k))
            self.assertEqual([counts[b] for b in range(k + 1)], [counts[k - b] for b in range(k + 1)])

    def test_case3_counts(self):
        for k in range(1, 9):
            self.assertEqual(sum(case3_counts(k).values()), alpha(k))

    def test_first_step_pair(self):
        rng = np.random.default_rng(5)
        L, R = random_pair(rng)
        rho = random_density(2, rng)
        LR, RL = L @ R, R @ L
        expected = np.trace(LR @ rho @ LR.conj().T).real + np.trace(RL @ rho @ RL.conj().T).real
        self.assertAlmostEqual(first_return_exact(L, R, rho, 1)[1], expected, delta=1e-14)

    def test_classical_symmetric(self):
        exact = first_return_exact(SQ * I2, SQ * I2, I2 / 2, 8)
        for k, value in exact.items():
            self.assertAlmostEqual(value, alpha(k) * 4.0 ** -k, delta=1e-14)

    def test_cap(self):
        with self.assertRaises(CapExceededError):
            first_return_exact(SQ * I2, SQ * I2, I2 / 2, 4, cap=3)
        with override_settings(OQRW_MAX_KMAX=2):
            with self.assertRaises(CapExceededError) as ctx:
                first_return_exact(SQ * I2, SQ * I2, I2 / 2, 3)
        self.assertEqual(ctx.exception.exit_status, 4)

    def test_incomplete_pair(self):
        with self.assertRaises(CompletenessError):
            first_return_exact(I2, I2, I2 / 2, 2)

    def test_oracle_matches_monitored_run(self):
        rng = np.random.default_rng(8)
        for name, (L, R) in gallery_pairs().items():
            rho = random_density(2, rng)
            exact = first_return_exact(L, R, rho, 6)
            series = monitored_run(make_nn_walk(L, R, (-13, 13)), rho, 0, 12)
            for k in range(1, 7):
                self.assertAlmostEqual(series.first_return[k], exact[k], delta=1e-10, msg=f'{name} k={k}')
                self.assertAlmostEqual(series.removed[2 * k - 2], 0.0, delta=1e-15)
            self.assertAlmostEqual(series.cumulative_return[11], sum(exact.values()), delta=1e-9, msg=name)


class CaseFormulaTests(SimpleTestCase):
    def setUp(self):
        self.rho = random_density(2, np.random.default_rng(21))

    def test_case3_symmetric_value(self):
        self.assertAlmostEqual(case_formula(3, {'x': 0.5}, self.rho, 3), 0.0625, delta=1e-15)

    def test_case2_at_one_half(self):
        for k in range(1, 7):
            self.assertAlmostEqual(case_formula(2, {'x': 0.5, 'y': 0.5}, self.rho, k), alpha(k) * 4.0 ** -k,
                                   delta=1e-15)

    def test_formulas_match_enumeration(self):
        cases = [
            (1, {'l11sq': 0.3, 'l22sq': 0.8}, case1(0.3, 0.8, theta=0.7, phi=2.1)),
            (2, {'x': 0.3, 'y': 0.6}, case2(0.3, 0.6)),
            (2, {'x': 0.2, 'y': 0.2}, case2(0.2, 0.2)),
            (3, {'x': 0.35}, case3(0.35)),
        ]
        for case, params, (L, R) in cases:
            exact = first_return_exact(L, R, self.rho, 6)
            for k in range(1, 7):
                self.assertAlmostEqual(case_formula(case, params, self.rho, k), exact[k], delta=1e-10,
                                       msg=f'case {case} {params} k={k}')

    def test_nonunital_case3(self):
        with self.assertRaises(UnsupportedError):
            case_formula(3, {'x': 0.3, 'y': 0.7}, self.rho, 2)
        L, R = case3(0.3, 0.7)
        exact = first_return_exact(L, R, self.rho, 6)
        for k in range(1, 7):
            self.assertAlmostEqual(case3_formula(0.3, 0.7, self.rho, k), exact[k], delta=1e-10)

    def test_bad_parameters(self):
        with self.assertRaises(ParameterError):
            case_formula(4, {}, self.rho, 1)
        with self.assertRaises(ParameterError):
            case_formula(1, {'l11sq': 0.3}, self.rho, 1)
        with self.assertRaises(ParameterError):
            case_formula(2, {'x': 1.3, 'y': 0.1}, self.rho, 1)

    def test_case2_series_matches_counts(self):
        params = {'x': 0.3, 'y': 0.6}
        series = case_return_series(2, params, self.rho, 6)
        expected = np.cumsum([case_formula(2, params, self.rho, k) for k in range(1, 7)])
        np.testing.assert_allclose(series, expected, atol=1e-13)
        np.testing.assert_allclose(case2_return_terms(0.5, 0.5, 4), [alpha(k) * 4.0 ** -k for k in range(1, 5)])

    def test_classical_series_closed_form(self):
        for p in (0.2, 0.3):
            self.assertAlmostEqual(classical_return_series(p, 200)[-1], classical_return_limit(p), delta=1e-6)
        self.assertAlmostEqual(classical_return_series(0.45, 2000)[-1], classical_return_limit(0.45), delta=1e-6)

    def test_symmetric_series_creeps_to_one(self):
        sums = classical_return_series(0.5, 200)
        self.assertGreaterEqual(sums[-1], 0.95)
        self.assertTrue(np.all(np.diff(sums) > 0))
        self.assertEqual(classical_return_limit(0.5), 1.0)


class VerdictTests(SimpleTestCase):
    def test_grid_sweep(self):
        rho = np.diag([0.4, 0.6])
        for x in np.linspace(0.1, 0.9, 9):
            x = round(float(x), 10)
            walks = [
                (1, {'l11sq': x, 'l22sq': x}, case1(x, x)),
                (2, {'x': x, 'y': 1 - x}, case2(x, 1 - x)),
                (3, {'x': x}, case3(x)),
            ]
            for case, params, (L, R) in walks:
                verdict = theorem51_verdict(L, R)
                self.assertEqual(verdict['case'], case)
                self.assertEqual(verdict['recurrent'], x == 0.5, msg=f'case {case} x={x}')
                self.assertEqual(verdict['all_half'], x == 0.5)
                if x != 0.5:
                    limit = 1 - np.sqrt(1 - 4 * x * (1 - x))
                    self.assertAlmostEqual(case_return_series(case, params, rho, 200)[-1], limit, delta=1e-4)

    def test_worked_examples(self):
        self.assertTrue(theorem51_verdict(SQ * I2, SQ * X)['recurrent'])
        self.assertFalse(theorem51_verdict(*case1(0.3, 0.3))['recurrent'])
        self.assertTrue(theorem51_verdict(*case1(0.5, 0.5, theta=0.3, phi=-2.0))['recurrent'])

    def test_mirrored_case3(self):
        verdict = theorem51_verdict(SQ * X, SQ * I2)
        self.assertEqual(verdict['case'], 3)
        self.assertTrue(verdict['mirrored'])
        self.assertTrue(verdict['recurrent'])

    def test_balanced_case2(self):
        verdict = theorem51_verdict(*case2(0.3, 0.3))
        self.assertTrue(verdict['recurrent'])
        self.assertFalse(verdict['all_half'])
        self.assertTrue(theorem51_verdict(*case2(0.5, 0.5))['all_half'])
        self.assertGreater(case_return_series(2, {'x': 0.3, 'y': 0.3}, I2 / 2, 2000)[-1], 0.95)
        self.assertFalse(theorem51_verdict(*case2(0.3, 0.6))['recurrent'])
        self.assertLess(case_return_series(2, {'x': 0.3, 'y': 0.6}, I2 / 2, 2000)[-1], 0.9)

    def test_outside_hypotheses(self):
        with self.assertRaises(UnsupportedError):
            theorem51_verdict(*hadamard_split())
        with self.assertRaises(UnsupportedError):
            theorem51_verdict(*case3(0.3, 0.7))
        with self.assertRaises(UnsupportedError):
            theorem51_verdict(SQ * np.eye(3), SQ * np.eye(3))
        with self.assertRaises(UnsupportedError):
            theorem51_verdict(*amplitude_damping(0.5))


class FkMaxTests(SimpleTestCase):
    def test_k1_peaks_at_corners(self):
        result = case2_fk_max(1)
        self.assertIn(result['maximizer'], [[0.0, 0.0], [1.0, 1.0]])
        self.assertAlmostEqual(result['value'], 1.0)

    def test_centre_for_larger_k(self):
        for k in (2, 3, 4):
            result = case2_fk_max(k)
            np.testing.assert_allclose(result['maximizer'], [0.5, 0.5], atol=1e-6)
            self.assertAlmostEqual(result['value'], alpha(k) * 4.0 ** -k, delta=1e-12)

    def test_value_at_centre(self):
        for k in range(1, 9):
            self.assertAlmostEqual(float(case2_f(k, 0.5, 0.5)), alpha(k) * 4.0 ** -k, delta=1e-15)

    def test_k_limit(self):
        with self.assertRaises(ParameterError):
            case2_fk_max(9)


class TracialDependenceTests(SimpleTestCase):
    def test_pq_matrices_ignore_coherences(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            d = int(rng.integers(2, 4))
            V = random_pq_matrix(d, rng, zero_prob=0.2)
            result = tracial_dependence(V, random_density(d, rng), rng)
            self.assertFalse(result['dependent'])

    def test_hadamard_split_witness(self):
        rng = np.random.default_rng(3)
        _, B = hadamard_split()
        self.assertTrue(tracial_dependence(B, I2 / 2, rng)['dependent'])


class WalkSerializerTests(SimpleTestCase):
    def literal(self, A):
        A = np.asarray(A, dtype=float)
        return {'rows': A.shape[0], 'cols': A.shape[1], 're': A.reshape(-1).tolist()}

    def test_nearest_neighbour_form(self):
        walk = parse_walk({'dim': 2, 'L': self.literal(SQ * I2), 'R': self.literal(SQ * I2), 'window': [-3, 3]})
        self.assertEqual(walk.window, (-3, 3))
        again = parse_walk(walk_literal(walk))
        np.testing.assert_allclose(again.kernels, walk.kernels)

    def test_explicit_form(self):
        data = {
            'dim': 1,
            'window': [0, 1],
            'transitions': [
                {'source': 0, 'target': 1, 'matrix': self.literal([[1]])},
                {'source': 1, 'target': 0, 'matrix': self.literal([[1]])},
            ],
        }
        walk = parse_walk(data)
        self.assertEqual(walk.offsets, (-1, 1))
        self.assertEqual(len(walk_literal(walk)['transitions']), 2)

    def test_rejects_mixed_forms(self):
        data = {'dim': 2, 'L': self.literal(I2), 'window': [0, 1], 'transitions': []}
        with self.assertRaises(InputParseError):
            parse_walk(data)

    def test_rejects_wrong_shape(self):
        data = {'dim': 2, 'L': self.literal(np.eye(3)), 'R': self.literal(np.eye(3)), 'window': [0, 1]}
        with self.assertRaises(InputParseError):
            parse_walk(data)

    def test_empty_window_is_a_contract_violation(self):
        data = {'dim': 2, 'L': self.literal(SQ * I2), 'R': self.literal(SQ * I2), 'window': [3, -3]}
        with self.assertRaises(WindowError) as ctx:
            parse_walk(data)
        self.assertEqual(ctx.exception.exit_status, 2)
