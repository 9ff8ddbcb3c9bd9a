import numpy as np
from django.test import SimpleTestCase

from qchannels.utils import kraus_remix, make_channel, matrix_rep, rep_distance
from core.exceptions import DimensionError, NotPQError, ParameterError, UnsupportedError
from core.utils import kron, mat_exp, max_abs, random_pq_matrix, random_unitary, spectra_match, spectrum

from .gallery import (
    amplitude_damping, bit_flip, bit_phase_flip, cnot2, depolarizing, gallery, identity, landau_streater,
    landau_streater_kraus, landau_streater_pq_candidate, phase_damping, phase_flip, unitary_qubit,
)
from .utils import (
    analyze_pq, class_of, classify_spectral, fit_unitary_decomposition, generator_split, is_pq_matrix,
    mixed_unitary_qubit, pq_kraus_split_qubit, pq_pattern, pq_power_identity_residual, semigroup_point,
    split_PQ_matrices, verify_pq_kraus_candidate,
)


def random_unital_qubit_pq(rng, real_q=False):
    """Random unital qubit PQ-channel as a diagonal/antidiagonal unitary mixture."""
    p11 = rng.random()
    a, c, f, h = rng.uniform(-np.pi, np.pi, 4)
    if real_q:
        return mixed_unitary_qubit(p11, 1 - p11, a=a, b=0, c=-a, d=0, f=f, g=0, h=-f, j=0)
    return mixed_unitary_qubit(p11, 1 - p11, a=a, b=0, c=c, d=0, f=f, g=0, h=h, j=0)


def markov_channel(P):
    """Kraus operators sqrt(P_ij)|i><j| for a column-stochastic P."""
    d = P.shape[0]
    kraus = []
    for i in range(d):
        for j in range(d):
            if P[i, j] > 0:
                E = np.zeros((d, d))
                E[i, j] = np.sqrt(P[i, j])
                kraus.append(E)
    return make_channel(kraus)


class PQMatrixTests(SimpleTestCase):
    def test_examples(self):
        self.assertTrue(is_pq_matrix(np.eye(3)))
        self.assertTrue(is_pq_matrix([[0, 1], [1, 0]]))
        self.assertFalse(is_pq_matrix([[1, 1], [0, 1]]))

    def test_closure_under_products(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            d = int(rng.integers(2, 5))
            A = random_pq_matrix(d, rng, zero_prob=0.2)
            B = random_pq_matrix(d, rng, zero_prob=0.2)
            self.assertTrue(is_pq_matrix(A @ B))
            self.assertTrue(is_pq_matrix(kron(A, B)))

    def test_alpha_beta_classes(self):
        self.assertEqual(class_of([[0.3, 0], [0.7j, 0]]), {'pq': False, 'alpha_pq': True, 'beta_pq': False})
        self.assertEqual(class_of([[0.3, 0.2], [0, 0]]), {'pq': False, 'alpha_pq': False, 'beta_pq': True})
        self.assertEqual(class_of(np.diag([2, 3])), {'pq': True, 'alpha_pq': True, 'beta_pq': True})
        self.assertEqual(class_of(np.ones((2, 2)) / np.sqrt(2)), {'pq': False, 'alpha_pq': False, 'beta_pq': False})

    def test_alpha_beta_are_order_two_only(self):
        with self.assertRaises(UnsupportedError):
            class_of(np.eye(3))


class PatternTests(SimpleTestCase):
    def test_bit_flip(self):
        decomposition = pq_pattern(matrix_rep(bit_flip(0.4)))
        np.testing.assert_allclose(decomposition.P, [[0.4, 0.6], [0.6, 0.4]], atol=1e-12)
        self.assertAlmostEqual(decomposition.q11, 0.4)
        self.assertAlmostEqual(decomposition.q12, 0.6)

    def test_amplitude_damping_orientation(self):
        p = 0.3
        decomposition = pq_pattern(matrix_rep(amplitude_damping(p)))
        np.testing.assert_allclose(decomposition.P, [[1, p], [0, 1 - p]], atol=1e-12)
        np.testing.assert_allclose(decomposition.P.sum(axis=0), [1, 1])

    def test_landau_streater(self):
        decomposition = pq_pattern(matrix_rep(landau_streater()))
        np.testing.assert_allclose(decomposition.P, [[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]], atol=1e-12)
        self.assertEqual(decomposition.Qblocks.shape, (2, 2, 3, 3))
        self.assertAlmostEqual(decomposition.Qblocks[0, 0][0, 2].real, -0.5)

    def test_gallery_is_pq(self):
        for ch in [bit_flip(0.2), phase_flip(0.3), bit_phase_flip(0.4), amplitude_damping(0.5),
                   phase_damping(0.6), depolarizing(0.7), landau_streater(), cnot2(0.7), identity(4)]:
            self.assertIsNotNone(pq_pattern(matrix_rep(ch)))

    def test_generic_unitary_is_not_pq(self):
        decomposition = analyze_pq(matrix_rep(unitary_qubit(0.1, 0.2, 0.3, np.pi / 4)))
        self.assertFalse(decomposition.pq)
        self.assertAlmostEqual(decomposition.residual, 0.5)

    def test_unitary_pq_iff_sin_cos_vanishes(self):
        for theta in [0, np.pi / 2, np.pi, 3 * np.pi / 2, np.pi / 4, 0.3, 1e-3, 2.0]:
            ch = unitary_qubit(0.7, -0.2, 1.3, theta)
            expected = abs(np.sin(theta) * np.cos(theta)) <= 1e-10
            self.assertEqual(pq_pattern(matrix_rep(ch)) is not None, expected, msg=f"theta={theta}")

    def test_non_square_of_square(self):
        with self.assertRaises(DimensionError):
            analyze_pq(np.eye(5))


class SplitTests(SimpleTestCase):
    def test_bit_flip_parts(self):
        p = 0.3
        P_part, Q_part = split_PQ_matrices(matrix_rep(bit_flip(p)))
        np.testing.assert_allclose(P_part, [[p, 0, 0, 1 - p], [0, 0, 0, 0], [0, 0, 0, 0], [1 - p, 0, 0, p]], atol=1e-12)
        np.testing.assert_allclose(Q_part, [[0, 0, 0, 0], [0, p, 1 - p, 0], [0, 1 - p, p, 0], [0, 0, 0, 0]], atol=1e-12)

    def test_parts_sum_exactly(self):
        M = matrix_rep(cnot2(0.7))
        P_part, Q_part = split_PQ_matrices(M)
        np.testing.assert_array_equal(P_part + Q_part, M)

    def test_markov_channel_has_no_quantum_part(self):
        P = np.array([[0.2, 0.5, 0.0], [0.3, 0.5, 0.1], [0.5, 0.0, 0.9]])
        M = matrix_rep(markov_channel(P))
        _, Q_part = split_PQ_matrices(M)
        self.assertEqual(max_abs(Q_part), 0.0)
        self.assertTrue(pq_pattern(M).markov)

    def test_non_pq_rejected(self):
        with self.assertRaises(NotPQError):
            split_PQ_matrices(matrix_rep(unitary_qubit(theta=0.4)))


class UnitalQubitAlgebraTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2024)
        self.channels = [random_unital_qubit_pq(self.rng) for _ in range(100)]

    def test_parts_annihilate(self):
        for ch in self.channels:
            P_part, Q_part = split_PQ_matrices(matrix_rep(ch))
            self.assertLessEqual(max_abs(P_part @ Q_part), 1e-12)
            self.assertLessEqual(max_abs(Q_part @ P_part), 1e-12)

    def test_powers_split(self):
        for ch in self.channels:
            M = matrix_rep(ch)
            for n in range(1, 11):
                self.assertLessEqual(pq_power_identity_residual(M, n), 1e-10)

    def test_exponential_factorizes(self):
        for ch in self.channels[:25]:
            M = matrix_rep(ch)
            P_part, Q_part = split_PQ_matrices(M)
            np.testing.assert_allclose(mat_exp(M, 0.8), mat_exp(P_part, 0.8) @ mat_exp(Q_part, 0.8), atol=1e-9)

    def test_generator_split(self):
        for ch in self.channels[:25]:
            R, S = generator_split(ch)
            L = matrix_rep(ch) - np.eye(4)
            self.assertLessEqual(max_abs(R @ S), 1e-12)
            self.assertLessEqual(max_abs(S @ R), 1e-12)
            for n in range(1, 6):
                power = np.linalg.matrix_power
                self.assertLessEqual(max_abs(power(L, n) - power(R, n) - power(S, n)), 1e-10)
            np.testing.assert_allclose(mat_exp(L, 1.3), mat_exp(R, 1.3) @ mat_exp(S, 1.3), atol=1e-9)

    def test_spectrum_is_union(self):
        for ch in self.channels:
            decomposition = pq_pattern(matrix_rep(ch))
            union = np.concatenate([spectrum(decomposition.P), spectrum(decomposition.Q)])
            self.assertTrue(spectra_match(spectrum(matrix_rep(ch)), union, tol=1e-8))

    def test_real_q_gives_normal_representation(self):
        for _ in range(20):
            ch = random_unital_qubit_pq(self.rng, real_q=True)
            M = matrix_rep(ch)
            self.assertLessEqual(max_abs(M.conj().T @ M - M @ M.conj().T), 1e-10)
            self.assertTrue(classify_spectral(ch).normal_rep)


class SpectrumUnionGalleryTests(SimpleTestCase):
    def test_gallery_spectra(self):
        for ch in [amplitude_damping(0.3), landau_streater(), cnot2(0.7), phase_damping(0.4)]:
            decomposition = pq_pattern(matrix_rep(ch))
            union = np.concatenate([spectrum(decomposition.P), spectrum(decomposition.Q)])
            self.assertTrue(spectra_match(spectrum(matrix_rep(ch)), union, tol=1e-8))


class KrausSplitTests(SimpleTestCase):
    def test_already_split(self):
        ch = bit_flip(0.4)
        split = pq_kraus_split_qubit(ch)
        self.assertEqual(len(split), 2)
        self.assertLessEqual(rep_distance(split, ch), 1e-12)

    def test_dense_kraus_pair(self):
        ch = kraus_remix(bit_phase_flip(0.35), random_unitary(2, np.random.default_rng(9)))
        self.assertFalse(any(is_pq_matrix(V) for V in ch.kraus))
        split = pq_kraus_split_qubit(ch)
        self.assertEqual(len(split), 4)
        self.assertTrue(all(is_pq_matrix(V) for V in split.kraus))
        self.assertLessEqual(rep_distance(split, ch), 1e-10)

    def test_qutrit_unsupported(self):
        with self.assertRaises(UnsupportedError):
            pq_kraus_split_qubit(landau_streater())

    def test_non_pq_rejected(self):
        with self.assertRaises(NotPQError):
            pq_kraus_split_qubit(unitary_qubit(theta=0.5))


class CandidateTests(SimpleTestCase):
    def test_landau_streater_candidate(self):
        report = verify_pq_kraus_candidate(landau_streater(), landau_streater_pq_candidate())
        self.assertTrue(report.valid)
        self.assertLessEqual(report.rep_residual, 1e-12)

    def test_original_kraus_are_not_pq(self):
        report = verify_pq_kraus_candidate(landau_streater(), landau_streater_kraus())
        self.assertFalse(report.valid)
        self.assertEqual(report.non_pq, [1, 2])
        self.assertLessEqual(report.rep_residual, 1e-12)

    def test_identity(self):
        self.assertTrue(verify_pq_kraus_candidate(identity(2), [np.eye(2)]).valid)

    def test_wrong_representation(self):
        report = verify_pq_kraus_candidate(bit_flip(0.4), [np.eye(2)])
        self.assertFalse(report.valid)
        self.assertAlmostEqual(report.rep_residual, 0.6)


class SemigroupTests(SimpleTestCase):
    def test_time_zero(self):
        np.testing.assert_allclose(semigroup_point(bit_flip(0.4), 0.0), np.eye(4))

    def test_stays_pq(self):
        for ch in [bit_flip(0.4), depolarizing(0.3), landau_streater(), cnot2(0.7)]:
            for t in (0.1, 1.0, 5.0):
                self.assertIsNotNone(pq_pattern(semigroup_point(ch, t), tol=1e-9))

    def test_requires_unital(self):
        with self.assertRaises(UnsupportedError):
            semigroup_point(amplitude_damping(0.3), 1.0)

    def test_requires_pq(self):
        with self.assertRaises(UnsupportedError):
            semigroup_point(unitary_qubit(theta=0.3), 1.0)


class SpectralTests(SimpleTestCase):
    def test_bit_flip(self):
        spectral = classify_spectral(bit_flip(0.4))
        self.assertEqual(spectral.p_fixed_dim, 1)
        self.assertTrue(spectral.q_has_fixed)
        self.assertFalse(spectral.ergodic)
        self.assertFalse(spectral.mixing)

    def test_amplitude_damping_is_ergodic(self):
        spectral = classify_spectral(amplitude_damping(0.4))
        self.assertEqual(spectral.p_fixed_dim, 1)
        self.assertFalse(spectral.q_has_fixed)
        self.assertTrue(spectral.ergodic)
        self.assertIsNone(spectral.mixing)
        self.assertEqual(spectral.as_dict()['mixing'], 'undetermined')

    def test_identity(self):
        spectral = classify_spectral(identity(3))
        self.assertEqual(spectral.p_fixed_dim, 3)
        self.assertFalse(spectral.ergodic)

    def test_depolarizing_is_mixing(self):
        spectral = classify_spectral(depolarizing(0.3))
        self.assertTrue(spectral.ergodic)
        self.assertTrue(spectral.mixing)

    def test_diagonal_unitary_mixtures_are_never_ergodic(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            a, c = rng.uniform(-np.pi, np.pi, 2)
            self.assertFalse(classify_spectral(mixed_unitary_qubit(1.0, 0.0, a=a, c=c)).ergodic)

    def test_not_pq(self):
        with self.assertRaises(NotPQError):
            classify_spectral(unitary_qubit(theta=0.7))


class UnitaryDecompositionTests(SimpleTestCase):
    def test_mixture_representation(self):
        p11, p12 = 0.3, 0.7
        a, b, c, d, f, g, h, j = 0.1, 0.5, -0.7, 0.2, 1.1, -0.3, 0.4, 2.0
        M = matrix_rep(mixed_unitary_qubit(p11, p12, a, b, c, d, f, g, h, j))
        q11 = p11 * (np.exp(1j * (a - b)) + np.exp(1j * (c - d))) / 2
        q12 = p12 * (np.exp(1j * (f - g)) + np.exp(1j * (h - j))) / 2
        expected = np.array([
            [p11, 0, 0, p12],
            [0, q11, q12, 0],
            [0, np.conj(q12), np.conj(q11), 0],
            [p12, 0, 0, p11],
        ])
        np.testing.assert_allclose(M, expected, atol=1e-12)

    def test_fit_reproduces_channel(self):
        rng = np.random.default_rng(12)
        channels = [depolarizing(0.3), bit_phase_flip(0.6), bit_flip(0.1), phase_flip(0.8)]
        channels += [random_unital_qubit_pq(rng) for _ in range(20)]
        for ch in channels:
            fitted, params = fit_unitary_decomposition(ch)
            self.assertLessEqual(rep_distance(fitted, ch), 1e-10)
            self.assertAlmostEqual(params['p11'] + params['p12'], 1.0)

    def test_requires_unital(self):
        with self.assertRaises(UnsupportedError):
            fit_unitary_decomposition(amplitude_damping(0.2))


class GalleryTests(SimpleTestCase):
    def test_named_lookup(self):
        self.assertLessEqual(rep_distance(gallery('bit_flip', {'p': 0.4}), bit_flip(0.4)), 0.0)
        self.assertEqual(gallery('cnot2', {'p': 0.7}).dim, 4)
        self.assertEqual(gallery('landau_streater').dim, 3)

    def test_unknown_name(self):
        with self.assertRaises(ParameterError):
            gallery('hadamard')

    def test_probability_range(self):
        for p in (0.0, 1.0, -0.1, 1.5):
            with self.assertRaises(ParameterError):
                gallery('depolarizing', {'p': p})

    def test_unknown_parameter(self):
        with self.assertRaises(ParameterError):
            gallery('bit_flip', {'q': 0.3})
