import numpy as np
from django.apps import apps
from django.test import SimpleTestCase

from core.exceptions import DimensionError, ParameterError, TracePreservationError, WeightError
from core.utils import random_density, random_unitary
from pq.gallery import (
    amplitude_damping, bit_flip, bit_phase_flip, cnot2, depolarizing, identity, landau_streater, unitary_qubit,
)
from pq.utils import pq_pattern

from .serializers import channel_literal, parse_channel
from .utils import (
    adjoint, apply, apply_rep, compose, convex_mix, kraus_remix, make_channel, make_cp_map, matrix_rep,
    rep_distance, validate,
)


def cnot_golden(p):
    r = 1 - p
    M = np.zeros((16, 16))
    M[0, 0] = 1
    for (i, j), value in {
        (1, 1): p, (1, 3): r, (2, 2): r, (2, 3): p, (3, 1): r, (3, 2): p,
        (4, 4): p, (4, 12): r, (5, 5): p, (5, 15): r, (6, 7): p, (6, 14): r,
        (7, 6): p, (7, 13): r, (8, 8): r, (8, 12): p, (9, 11): r, (9, 13): p,
        (10, 10): r, (10, 15): p, (11, 9): r, (11, 14): p, (12, 4): r, (12, 8): p,
        (13, 7): r, (13, 9): p, (14, 6): r, (14, 11): p, (15, 5): r, (15, 10): p,
    }.items():
        M[i, j] = value
    return M


def gallery_channels():
    return [
        bit_flip(0.4), bit_phase_flip(0.2), amplitude_damping(0.7), depolarizing(0.4),
        landau_streater(), cnot2(0.7), unitary_qubit(0.3, 1.1, -0.4, 0.9),
    ]


class MakeChannelTests(SimpleTestCase):
    def test_bit_flip_is_valid(self):
        p = 0.4
        ch = make_channel([np.sqrt(p) * np.eye(2), np.sqrt(1 - p) * np.array([[0, 1], [1, 0]])])
        self.assertEqual(ch.dim, 2)
        self.assertEqual(len(ch), 2)

    def test_identity_singleton(self):
        self.assertTrue(validate(make_channel([np.eye(3)])).trace_preserving)

    def test_double_identity_rejected(self):
        with self.assertRaises(TracePreservationError) as ctx:
            make_channel([np.eye(2), np.eye(2)])
        self.assertAlmostEqual(ctx.exception.residual, 1.0)

    def test_mixed_dimensions(self):
        with self.assertRaises(DimensionError):
            make_channel([np.eye(2), np.eye(3)])

    def test_unchecked_constructor_flags_non_tp(self):
        ch = make_cp_map([np.diag([1, 0.5])])
        self.assertTrue(ch.non_tp)
        self.assertFalse(validate(ch).trace_preserving)

    def test_kraus_operators_are_read_only(self):
        ch = bit_flip(0.4)
        with self.assertRaises(ValueError):
            ch.kraus[0][0, 0] = 2


class ApplyTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(1)

    def test_identity_channel(self):
        rho = random_density(2, self.rng)
        np.testing.assert_allclose(apply(identity(), rho), rho)

    def test_amplitude_damping_diagonal(self):
        p = 0.3
        rho = np.diag([0.4, 0.6])
        out = apply(amplitude_damping(p), rho)
        np.testing.assert_allclose(np.diag(out).real, [0.4 + p * 0.6, (1 - p) * 0.6])

    def test_apply_matches_representation(self):
        for ch in gallery_channels():
            rho = random_density(ch.dim, self.rng)
            np.testing.assert_allclose(apply(ch, rho), apply_rep(matrix_rep(ch), rho), atol=1e-12)

    def test_trace_preserved(self):
        for ch in gallery_channels():
            for _ in range(100):
                rho = random_density(ch.dim, self.rng)
                self.assertAlmostEqual(np.trace(apply(ch, rho)).real, 1.0, delta=1e-10)

    def test_unital_channels_fix_identity(self):
        for ch in [bit_flip(0.4), bit_phase_flip(0.2), depolarizing(0.7), landau_streater(), cnot2(0.7)]:
            np.testing.assert_allclose(apply(ch, np.eye(ch.dim)), np.eye(ch.dim), atol=1e-10)

    def test_wrong_state_dimension(self):
        with self.assertRaises(DimensionError):
            apply(bit_flip(0.4), np.eye(3) / 3)


class MatrixRepTests(SimpleTestCase):
    def test_bit_flip_golden(self):
        for p in (0.2, 0.4, 0.7):
            q = 1 - p
            expected = np.array([[p, 0, 0, q], [0, p, q, 0], [0, q, p, 0], [q, 0, 0, p]])
            np.testing.assert_allclose(matrix_rep(bit_flip(p)), expected, atol=1e-12)

    def test_bit_phase_flip_golden(self):
        for p in (0.2, 0.4, 0.7):
            q = 1 - p
            expected = np.array([[p, 0, 0, q], [0, p, -q, 0], [0, -q, p, 0], [q, 0, 0, p]])
            np.testing.assert_allclose(matrix_rep(bit_phase_flip(p)), expected, atol=1e-12)

    def test_amplitude_damping_golden(self):
        for p in (0.2, 0.4, 0.7):
            s = np.sqrt(1 - p)
            expected = np.array([[1, 0, 0, p], [0, s, 0, 0], [0, 0, s, 0], [0, 0, 0, 1 - p]])
            np.testing.assert_allclose(matrix_rep(amplitude_damping(p)), expected, atol=1e-12)

    def test_depolarizing_golden(self):
        for p in (0.2, 0.4, 0.7):
            expected = np.array([
                [1 - p / 2, 0, 0, p / 2], [0, 1 - p, 0, 0], [0, 0, 1 - p, 0], [p / 2, 0, 0, 1 - p / 2],
            ])
            np.testing.assert_allclose(matrix_rep(depolarizing(p)), expected, atol=1e-12)

    def test_cnot_golden(self):
        np.testing.assert_allclose(matrix_rep(cnot2(0.7)), cnot_golden(0.7), atol=1e-12)

    def test_landau_streater_golden(self):
        expected = np.zeros((9, 9))
        for i, j in [(0, 4), (0, 8), (4, 0), (4, 8), (8, 0), (8, 4)]:
            expected[i, j] = 0.5
        for i, j in [(1, 3), (2, 6), (3, 1), (5, 7), (6, 2), (7, 5)]:
            expected[i, j] = -0.5
        np.testing.assert_allclose(matrix_rep(landau_streater()), expected, atol=1e-12)

    def test_representation_independent_of_kraus_list(self):
        rng = np.random.default_rng(2)
        for ch in gallery_channels():
            n = len(ch)
            W = random_unitary(n + 2, rng)[:, :n]
            self.assertLessEqual(rep_distance(kraus_remix(ch, W), ch), 1e-10)

    def test_remix_requires_isometry(self):
        with self.assertRaises(ParameterError):
            kraus_remix(bit_flip(0.4), np.ones((2, 2)))


class ComposeTests(SimpleTestCase):
    def test_identity_is_neutral(self):
        ch = amplitude_damping(0.3)
        self.assertLessEqual(rep_distance(compose(identity(), ch), ch), 1e-12)

    def test_representation_is_product(self):
        for a, b in [(bit_flip(0.3), bit_flip(0.6)), (amplitude_damping(0.2), depolarizing(0.5))]:
            np.testing.assert_allclose(matrix_rep(compose(a, b)), matrix_rep(a) @ matrix_rep(b), atol=1e-12)

    def test_order_is_apply_b_first(self):
        a = amplitude_damping(0.5)
        b = unitary_qubit(theta=np.pi / 2)
        rho = np.diag([1.0, 0.0])
        np.testing.assert_allclose(apply(compose(a, b), rho), apply(a, apply(b, rho)), atol=1e-12)
        self.assertFalse(np.allclose(apply(compose(a, b), rho), apply(b, apply(a, rho))))

    def test_composition_of_pq_channels_is_pq(self):
        self.assertIsNotNone(pq_pattern(matrix_rep(compose(amplitude_damping(0.3), bit_phase_flip(0.6)))))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionError):
            compose(bit_flip(0.3), landau_streater())


class AdjointTests(SimpleTestCase):
    def test_unitary_adjoint(self):
        ch = unitary_qubit(0.2, 0.5, 0.9, 0.4)
        U = ch.kraus[0]
        np.testing.assert_allclose(adjoint(ch).kraus[0], U.conj().T)

    def test_representation_is_conjugate_transpose(self):
        for ch in gallery_channels():
            np.testing.assert_allclose(matrix_rep(adjoint(ch)), matrix_rep(ch).conj().T, atol=1e-12)

    def test_adjoint_of_pq_is_pq(self):
        self.assertIsNotNone(pq_pattern(matrix_rep(adjoint(bit_phase_flip(0.3)))))

    def test_involution(self):
        ch = amplitude_damping(0.4)
        np.testing.assert_allclose(matrix_rep(adjoint(adjoint(ch))), matrix_rep(ch), atol=1e-12)

    def test_adjoint_of_non_unital_is_not_tp(self):
        self.assertTrue(adjoint(amplitude_damping(0.4)).non_tp)
        self.assertFalse(adjoint(bit_flip(0.4)).non_tp)


class ConvexMixTests(SimpleTestCase):
    def test_mix_of_pq_is_pq(self):
        ch = convex_mix([0.3, 0.7], [amplitude_damping(0.5), bit_phase_flip(0.1)])
        self.assertIsNotNone(pq_pattern(matrix_rep(ch)))

    def test_representation_is_weighted_sum(self):
        a, b = bit_flip(0.2), depolarizing(0.6)
        np.testing.assert_allclose(matrix_rep(convex_mix([0.25, 0.75], [a, b])),
                                   0.25 * matrix_rep(a) + 0.75 * matrix_rep(b), atol=1e-12)

    def test_degenerate_weights(self):
        a, b = bit_flip(0.2), depolarizing(0.6)
        np.testing.assert_allclose(matrix_rep(convex_mix([1, 0], [a, b])), matrix_rep(a), atol=1e-12)

    def test_weight_violations(self):
        with self.assertRaises(WeightError):
            convex_mix([0.5, 0.6], [bit_flip(0.2), bit_flip(0.3)])
        with self.assertRaises(WeightError):
            convex_mix([1.5, -0.5], [bit_flip(0.2), bit_flip(0.3)])


class ValidateTests(SimpleTestCase):
    def test_bit_flip(self):
        report = validate(bit_flip(0.4))
        self.assertTrue(report.trace_preserving)
        self.assertTrue(report.unital)

    def test_amplitude_damping_is_not_unital(self):
        report = validate(amplitude_damping(0.3))
        self.assertTrue(report.trace_preserving)
        self.assertFalse(report.unital)
        self.assertAlmostEqual(report.unital_residual, 0.3)

    def test_identity_residuals(self):
        report = validate(identity())
        self.assertEqual(report.tp_residual, 0.0)
        self.assertEqual(report.unital_residual, 0.0)


class ChannelSerializerTests(SimpleTestCase):
    def test_literal_round_trip_keeps_representation(self):
        ch = landau_streater()
        self.assertLessEqual(rep_distance(parse_channel(channel_literal(ch)), ch), 1e-15)

    def test_non_tp_literal(self):
        literal = {'dim': 2, 'kraus': [{'rows': 2, 'cols': 2, 're': [1, 0, 0, 1]}] * 2}
        with self.assertRaises(TracePreservationError):
            parse_channel(literal)


class AppLabelTests(SimpleTestCase):
    def test_label_does_not_shadow_django_channels(self):
        self.assertEqual(apps.get_app_config('qchannels').name, 'qchannels')
        with self.assertRaises(LookupError):
            apps.get_app_config('channels')
