import numpy as np
from django.test import SimpleTestCase

from .exceptions import (
    CapExceededError, DimensionError, InputParseError, ParameterError, command_exception_handler,
)
from .serializers import matrix_literal, parse_matrix
from .utils import (
    density_matrix, kron, mat_exp, psd_report, random_density, random_pq_matrix, spectra_match,
    state_family, unvec, vec,
)


class VecTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_vec_is_row_major(self):
        A = np.array([[1, 2], [3, 4]])
        np.testing.assert_array_equal(vec(A), [1, 2, 3, 4])

    def test_vec_identity(self):
        np.testing.assert_array_equal(vec(np.eye(2)), [1, 0, 0, 1])

    def test_vec_of_sandwich_matches_kron(self):
        A, B, X = (self.rng.standard_normal((3, 3)) + 1j * self.rng.standard_normal((3, 3)) for _ in range(3))
        np.testing.assert_allclose(vec(A @ X @ B.T), kron(A, B) @ vec(X), atol=1e-12)

    def test_kraus_conjugation_is_v_kron_conj_v(self):
        V = self.rng.standard_normal((2, 2)) + 1j * self.rng.standard_normal((2, 2))
        X = random_density(2, self.rng)
        np.testing.assert_allclose(vec(V @ X @ V.conj().T), kron(V, V.conj()) @ vec(X), atol=1e-12)

    def test_unvec_inverts_vec(self):
        np.testing.assert_array_equal(unvec([1, 0, 0, 1], 2), np.eye(2))
        for d in range(1, 9):
            rho = random_density(d, self.rng)
            np.testing.assert_array_equal(unvec(vec(rho), d), rho)

    def test_unvec_length_mismatch(self):
        with self.assertRaises(DimensionError):
            unvec(np.arange(5), 2)


class KronTests(SimpleTestCase):
    def test_identity(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_kron_of_permutations_is_permutation(self):
        P = np.array([[0, 1], [1, 0]])
        K = kron(P, np.eye(3)[[2, 0, 1]])
        self.assertTrue(np.all((K == 0) | (K == 1)))
        np.testing.assert_array_equal(K.sum(axis=0), np.ones(6))
        np.testing.assert_array_equal(K.sum(axis=1), np.ones(6))

    def test_mixed_product(self):
        rng = np.random.default_rng(3)
        A, B, C, D = (random_pq_matrix(2, rng) + rng.standard_normal((2, 2)) for _ in range(4))
        np.testing.assert_allclose(kron(A, B) @ kron(C, D), kron(A @ C, B @ D), atol=1e-12)


class PSDTests(SimpleTestCase):
    def test_projector(self):
        report = psd_report(np.diag([1, 0]))
        self.assertTrue(report.psd)
        self.assertAlmostEqual(report.min_eig, 0.0, places=14)

    def test_negative_eigenvalue(self):
        self.assertFalse(psd_report(np.diag([1, -0.1])).psd)

    def test_conjugation_preserves_psd(self):
        rng = np.random.default_rng(11)
        rho = random_density(3, rng)
        V = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        self.assertTrue(psd_report(V @ rho @ V.conj().T).psd)

    def test_non_square(self):
        with self.assertRaises(DimensionError):
            psd_report(np.zeros((2, 3)))

    def test_state_family_are_densities(self):
        family = state_family(3, seed=0, n_random=20)
        self.assertEqual(len(family), 3 + 1 + 20)
        for _, rho in family:
            density_matrix(rho)

    def test_density_rejects_bad_trace(self):
        with self.assertRaises(ParameterError):
            density_matrix(np.eye(2))


class MatExpTests(SimpleTestCase):
    def test_zero_time(self):
        A = np.array([[1, 2], [3, 4]])
        np.testing.assert_allclose(mat_exp(A, 0.0), np.eye(2))

    def test_diagonal(self):
        np.testing.assert_allclose(mat_exp(np.diag([1.0, -2.0]), 0.5), np.diag([np.exp(0.5), np.exp(-1.0)]))

    def test_semigroup_law(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((4, 4))
        A *= 5 / np.linalg.norm(A, 2)
        np.testing.assert_allclose(mat_exp(A, 0.7), mat_exp(A, 0.3) @ mat_exp(A, 0.4), atol=1e-9)

    def test_spectra_match(self):
        self.assertTrue(spectra_match([1, 0.5, 0.5], [0.5, 1, 0.5]))
        self.assertFalse(spectra_match([1, 0.5], [1, 0.4]))


class MatrixLiteralTests(SimpleTestCase):
    def test_parse_defaults_imaginary_part(self):
        A = parse_matrix({'rows': 2, 'cols': 2, 're': [1, 2, 3, 4]})
        np.testing.assert_array_equal(A, [[1, 2], [3, 4]])

    def test_parse_complex(self):
        A = parse_matrix({'rows': 1, 'cols': 2, 're': [0, 1], 'im': [1, 0]})
        np.testing.assert_array_equal(A, [[1j, 1]])

    def test_literal_is_reparsed_exactly(self):
        A = np.array([[0.1 + 0.2j, 1 / 3], [np.sqrt(2), -1j]])
        np.testing.assert_array_equal(parse_matrix(matrix_literal(A)), A)

    def test_length_mismatch_is_parse_error(self):
        with self.assertRaises(InputParseError) as ctx:
            parse_matrix({'rows': 2, 'cols': 2, 're': [1, 2, 3]})
        self.assertEqual(ctx.exception.exit_status, 3)


class ExceptionHandlerTests(SimpleTestCase):
    def test_domain_error_payload(self):
        payload, status = command_exception_handler(DimensionError('bad', shape=[2, 3]), {'command': 'repr'})
        self.assertEqual(status, 2)
        self.assertEqual(payload, {'error': True, 'code': 'dimension_mismatch', 'message': 'bad', 'details': {'shape': [2, 3]}})

    def test_cap_exit_status(self):
        _, status = command_exception_handler(CapExceededError(kmax=40))
        self.assertEqual(status, 4)

    def test_unexpected_error(self):
        with self.assertLogs('core', level='ERROR'):
            payload, status = command_exception_handler(RuntimeError('boom'))
        self.assertEqual(status, 1)
        self.assertEqual(payload['message'], 'An unexpected error occurred')
