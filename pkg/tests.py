from unittest import mock
import dataclasses
import functools
import io
import json
import logging
import math
import pathlib
import subprocess
import sys
import tempfile
import unittest

import numpy as np
from tornado import httpserver, testing

import sprockets.dfr
from sprockets.dfr import (cli, dataset, errors, linalg, masking, pipeline,
                          readout, representations, reproduce, reservoir,
                          runner, service)
from sprockets.dfr import testing as oracles
import examples

DATA_DIR = pathlib.Path(__file__).parent / 'data'


def requires_dataset(name):
    path = DATA_DIR / '{}.jsonl'.format(name)
    return unittest.skipUnless(
        path.is_file(),
        '{} not found, convert the dataset to run'.format(path))


class RecordingHandler(logging.Handler):

    def __init__(self):
        super().__init__()
        self.emitted = []

    def emit(self, record):
        self.emitted.append((record, self.format(record)))


class MockHelper(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self._mocks = []

    def tearDown(self):
        super().tearDown()
        for mocker in self._mocks:
            mocker.stop()
        del self._mocks[:]

    def start_mock(self, target, existing_mock=None):
        target_mock = mock.Mock() if existing_mock is None else existing_mock
        mocked = mock.patch(target, target_mock)
        self._mocks.append(mocked)
        return mocked.start()


class TemporaryDirectoryMixin(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self._tempdir = tempfile.TemporaryDirectory()
        self.tempdir = pathlib.Path(self._tempdir.name)

    def tearDown(self):
        super().tearDown()
        self._tempdir.cleanup()


def small_config(**overrides):
    settings = {'m': 3, 'gamma': 0.1, 'eta': 1.0, 'theta': 0.25,
                'beta': 0.01, 'lam': 1.0}
    settings.update(overrides)
    return pipeline.ExperimentConfig(**settings)


@functools.lru_cache(maxsize=None)
def small_dataset():
    return dataset.synth(n_classes=2, n_vars=2, n_train=30, n_test=20,
                         t_range=(10, 20), seed=3)


@functools.lru_cache(maxsize=None)
def small_model(representation='DPRR'):
    return pipeline.fit(small_dataset(),
                        small_config(representation=representation))


def default_mask(n_vars=1, m=3):
    return masking.mask_matrix(masking.default_polynomial(m),
                               masking.default_init(m), n_vars)


def lrs(values):
    return representations.Representation(
        representations.RepresentationKind('LRS'), values)


FIXTURE_STATES = [[0.0, 0.0], [1.0, 2.0], [3.0, 4.0]]


class LinalgTests(unittest.TestCase):

    def test_that_identity_product_is_unchanged(self):
        a = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        np.testing.assert_array_equal(linalg.matmul(np.eye(2), a), a)

    def test_that_matmul_computes_product(self):
        result = linalg.matmul([[1, 2], [3, 4]], [[1], [1]])
        self.assertEqual(result.tolist(), [[3.0], [7.0]])

    def test_that_matmul_names_both_shapes_on_mismatch(self):
        with self.assertRaises(errors.DimensionError) as context:
            linalg.matmul(np.ones((2, 3)), np.ones((2, 2)))
        self.assertIn('2x3', str(context.exception))
        self.assertIn('2x2', str(context.exception))

    def test_that_non_finite_entries_are_rejected(self):
        with self.assertRaises(errors.NonFiniteError):
            linalg.matmul([[math.nan]], [[1.0]])

    def test_that_ridge_solve_matches_hand_evaluation(self):
        result = linalg.ridge_solve([[2.0, 4.0]], [[1.0, 2.0]], 0.0)
        self.assertEqual(result.shape, (1, 1))
        self.assertAlmostEqual(result[0, 0], 2.0, places=12)

    def test_that_identity_regressors_shrink_targets(self):
        a = np.array([[1.0, -2.0, 3.0], [0.5, 4.0, -1.0]])
        result = linalg.ridge_solve(a, np.eye(3), 0.5)
        np.testing.assert_allclose(result, a / 1.5, rtol=1e-12)

    def test_that_huge_regularization_drives_weights_to_zero(self):
        rng = np.random.default_rng(1)
        result = linalg.ridge_solve(rng.normal(size=(3, 8)),
                                    rng.normal(size=(4, 8)), 1e12)
        self.assertTrue(np.all(np.abs(result) < 1e-6))

    def test_that_rank_deficient_unregularized_system_fails(self):
        with self.assertRaises(errors.SingularMatrixError) as context:
            linalg.ridge_solve([[1.0, 1.0]], [[1.0, 2.0], [2.0, 4.0]], 0.0)
        self.assertIn('singular Gram matrix', str(context.exception))

    def test_that_ridge_solve_requires_matching_sample_counts(self):
        with self.assertRaises(errors.DimensionError):
            linalg.ridge_solve(np.ones((1, 3)), np.ones((2, 4)), 1.0)

    def test_that_negative_regularization_is_rejected(self):
        for reg in (-1.0, math.nan):
            with self.assertRaises(errors.ConfigurationError):
                linalg.ridge_solve(np.ones((1, 3)), np.ones((2, 3)), reg)

    def test_that_ridge_solution_satisfies_normal_equation(self):
        rng = np.random.default_rng(3)
        for rows, samples in ((1, 1), (5, 3), (12, 30), (50, 50), (50, 80)):
            a = rng.normal(size=(3, samples))
            b = rng.normal(size=(rows, samples))
            reg = float(rng.uniform(0.01, 2.0))
            w = linalg.ridge_solve(a, b, reg)
            lhs = w.dot(b.dot(b.T) + reg * np.eye(rows))
            np.testing.assert_allclose(lhs, a.dot(b.T), rtol=1e-8,
                                       atol=1e-7)

    def test_that_matmul_is_associative(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            n, k, j, m = rng.integers(1, 20, size=4)
            a = rng.normal(size=(n, k))
            b = rng.normal(size=(k, j))
            c = rng.normal(size=(j, m))
            np.testing.assert_allclose(
                linalg.matmul(linalg.matmul(a, b), c),
                linalg.matmul(a, linalg.matmul(b, c)),
                rtol=1e-10, atol=1e-10)

    def test_that_flatten_is_row_major(self):
        self.assertEqual(linalg.flatten([[1, 2], [3, 4]]).tolist(),
                         [1.0, 2.0, 3.0, 4.0])
        self.assertEqual(linalg.flatten([[7]]).tolist(), [7.0])

    def test_that_flatten_inverts_unflatten(self):
        values = np.random.default_rng(2).normal(size=12)
        np.testing.assert_array_equal(
            linalg.flatten(linalg.unflatten(values, 3, 4)), values)

    def test_that_unflatten_checks_the_size(self):
        with self.assertRaises(errors.DimensionError):
            linalg.unflatten(np.ones(5), 2, 3)


class MaskingTests(unittest.TestCase):

    def test_that_msequence_matches_reference_sequence(self):
        poly = masking.PrimitivePolynomial(3, (1, 0))
        self.assertEqual(masking.msequence(poly, (0, 0, 1), 7),
                         (0, 0, 1, 0, 1, 1, 1))

    def test_that_column_has_inserted_zero_and_wraparound(self):
        poly = masking.PrimitivePolynomial(3, (1, 0))
        self.assertEqual(masking.column_bits(poly, (0, 0, 1)),
                         (0, 0, 0, 1, 0, 1, 1, 1, 0, 0))

    def test_that_mask_column_maps_zero_to_minus_one(self):
        mask = default_mask()
        self.assertEqual(mask.values[:, 0].tolist(),
                         [-1, -1, -1, 1, -1, 1, 1, 1, -1, -1])

    def test_that_mask_lengths_follow_the_node_formula(self):
        for degree, expected in ((3, 10), (4, 19), (5, 36), (6, 69)):
            self.assertEqual(default_mask(m=degree).n_nodes, expected)

    def test_that_column_contains_every_bit_pattern(self):
        for degree in (3, 4, 5, 6):
            bits = masking.column_bits(masking.default_polynomial(degree),
                                       masking.default_init(degree))
            windows = {bits[i:i + degree]
                       for i in range(len(bits) - degree + 1)}
            self.assertEqual(len(windows), 2 ** degree)

    def test_that_every_init_covers_every_bit_pattern(self):
        for degree in (3, 4, 5, 6):
            poly = masking.default_polynomial(degree)
            for value in range(1, 2 ** degree):
                init = tuple(int(b) for b in format(value, '0{}b'.format(
                    degree)))
                bits = masking.column_bits(poly, init)
                self.assertEqual(len(bits), poly.n_nodes)
                windows = {bits[i:i + degree]
                           for i in range(len(bits) - degree + 1)}
                self.assertEqual(len(windows), 2 ** degree, msg=init)

    def test_that_wrapped_zero_run_is_rotated_to_the_end(self):
        poly = masking.PrimitivePolynomial(3, (1, 0))
        self.assertEqual(masking.msequence(poly, (0, 1, 0), 7),
                         (0, 1, 0, 1, 1, 1, 0))
        self.assertEqual(masking.column_bits(poly, (0, 1, 0)),
                         (1, 0, 1, 1, 1, 0, 0, 0, 1, 0))

    def test_that_each_column_has_one_run_of_m_negative_entries(self):
        for degree in (3, 4, 5, 6):
            poly = masking.default_polynomial(degree)
            for init in (masking.default_init(degree), (1,) * degree):
                column = masking.mask_column(poly, init).tolist()
                runs = [i for i in range(len(column) - degree + 1)
                        if column[i:i + degree] == [-1.0] * degree]
                self.assertEqual(len(runs), 1, msg=(degree, init))

    def test_that_identical_inputs_give_identical_masks(self):
        poly = masking.PrimitivePolynomial(5, (2, 0))
        first = masking.mask_matrix(poly, '01101', 7)
        second = masking.mask_matrix(poly, (0, 1, 1, 0, 1), 7)
        self.assertEqual(first.values.tobytes(), second.values.tobytes())
        self.assertEqual(first.to_dict(), second.to_dict())

    def test_that_apply_mask_is_linear(self):
        rng = np.random.default_rng(5)
        mask = default_mask(n_vars=4, m=4)
        for _ in range(20):
            u, v = rng.normal(size=(2, 4))
            alpha, beta = rng.normal(size=2)
            np.testing.assert_allclose(
                masking.apply_mask(mask, alpha * u + beta * v),
                alpha * masking.apply_mask(mask, u) +
                beta * masking.apply_mask(mask, v),
                rtol=0, atol=1e-12)

    def test_that_non_primitive_polynomial_is_rejected(self):
        # x^4 + x^2 + 1 = (x^2 + x + 1)^2
        with self.assertRaises(errors.ConfigurationError) as context:
            masking.PrimitivePolynomial(4, (2, 0))
        self.assertIn('not primitive', str(context.exception))
        self.assertEqual(masking.PrimitivePolynomial(4, (3, 0)).degree, 4)

    def test_that_columns_are_rotations_of_the_first(self):
        mask = default_mask(n_vars=13, m=5)
        self.assertEqual(mask.values.shape, (36, 13))
        self.assertEqual(mask.stride, 2)
        for a in range(13):
            np.testing.assert_array_equal(
                mask.values[:, a], np.roll(mask.values[:, 0], 2 * a))

    def test_that_all_zero_init_is_degenerate(self):
        with self.assertRaises(errors.DegenerateStateError):
            masking.mask_matrix(masking.default_polynomial(3), '000', 1)

    def test_that_too_many_variables_are_rejected(self):
        with self.assertRaises(errors.MaskSizeError):
            default_mask(n_vars=11)

    def test_that_bits_must_be_binary(self):
        with self.assertRaises(errors.ConfigurationError):
            masking.parse_bits('0a1')
        with self.assertRaises(errors.ConfigurationError):
            masking.parse_bits([0, 2, 1])

    def test_that_polynomial_needs_a_constant_term(self):
        with self.assertRaises(errors.ConfigurationError):
            masking.PrimitivePolynomial(3, (1,))

    def test_that_polynomial_degree_is_bounded(self):
        with self.assertRaises(errors.ConfigurationError):
            masking.PrimitivePolynomial(2, (1, 0))

    def test_that_polynomial_renders_as_text(self):
        self.assertEqual(str(masking.PrimitivePolynomial(3, (0, 1))),
                         'x^3 + x + 1')

    def test_that_unknown_default_degree_is_a_configuration_error(self):
        with self.assertRaises(errors.ConfigurationError):
            masking.default_polynomial(9)

    def test_that_mask_document_round_trips(self):
        mask = default_mask(n_vars=4, m=4)
        restored = masking.MaskMatrix.from_dict(
            json.loads(json.dumps(mask.to_dict())))
        np.testing.assert_array_equal(restored.values, mask.values)
        self.assertEqual(restored.init, mask.init)

    def test_that_tampered_mask_document_is_rejected(self):
        document = default_mask(n_vars=2).to_dict()
        document['rows'][0][0] = -document['rows'][0][0]
        with self.assertRaises(errors.DimensionError):
            masking.MaskMatrix.from_dict(document)

    def test_that_mask_values_are_read_only(self):
        with self.assertRaises(ValueError):
            default_mask().values[0, 0] = 1.0

    def test_that_apply_mask_multiplies(self):
        mask = default_mask(n_vars=2)
        u = np.array([0.5, -2.0])
        np.testing.assert_array_equal(masking.apply_mask(mask, u),
                                      mask.values @ u)

    def test_that_apply_mask_checks_the_input_length(self):
        with self.assertRaises(errors.DimensionError):
            masking.apply_mask(default_mask(n_vars=2), [1.0, 2.0, 3.0])


class ReservoirTests(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self.params = reservoir.DfrParams(gamma=0.5, eta=1.0, theta=0.25,
                                          n_nodes=2)

    def test_that_decay_and_gain_are_derived_from_theta(self):
        self.assertEqual(self.params.decay, math.exp(-0.25))
        self.assertEqual(self.params.gain, 1.0 - math.exp(-0.25))
        self.assertEqual(self.params.tau, 0.5)

    def test_that_zero_state_and_input_stay_zero(self):
        state = reservoir.step(np.zeros(2), np.zeros(2), self.params)
        self.assertEqual(state.tolist(), [0.0, 0.0])

    def test_that_step_cascades_through_the_nodes(self):
        state = reservoir.step([0.0, 0.0], [1.0, -1.0], self.params)
        first = self.params.gain * 0.4
        self.assertAlmostEqual(state[0], first, places=15)
        self.assertAlmostEqual(
            state[1], first * self.params.decay - self.params.gain * 0.4,
            places=15)

    def test_that_first_node_continues_from_the_last_node(self):
        state = reservoir.step([0.0, 1.0], [0.0, 0.0], self.params)
        self.assertAlmostEqual(state[0], self.params.decay, places=15)
        self.assertAlmostEqual(
            state[1], state[0] * self.params.decay + self.params.gain * 0.5,
            places=15)

    def test_that_odd_exponent_pole_is_reported(self):
        params = reservoir.DfrParams(1.0, 1.0, 0.25, n_nodes=1, p=3)
        with self.assertRaises(errors.NonlinearityPoleError):
            reservoir.nonlinearity(-1.0, 0.0, params)

    def test_that_invalid_parameters_are_rejected(self):
        with self.assertRaises(errors.ConfigurationError):
            reservoir.DfrParams(0.0, 1.0, 0.25, 10)
        with self.assertRaises(errors.ConfigurationError):
            reservoir.DfrParams(1.0, 1.0, 0.25, 0)

    def test_that_step_checks_lengths(self):
        with self.assertRaises(errors.DimensionError):
            reservoir.step(np.zeros(3), np.zeros(2), self.params)

    def test_that_run_starts_from_zero_and_keeps_every_state(self):
        mask = default_mask(n_vars=2)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        series = np.random.default_rng(4).normal(size=(2, 7))
        traj = reservoir.run(series, mask, params)
        self.assertEqual(traj.states.shape, (8, 10))
        self.assertEqual(len(traj), 7)
        self.assertEqual(traj.states[0].tolist(), [0.0] * 10)
        streamed = list(reservoir.iterate(series, mask, params))
        np.testing.assert_array_equal(np.vstack(streamed), traj.states[1:])

    def test_that_prefixes_of_the_input_give_prefixes_of_the_trajectory(self):
        mask = default_mask(n_vars=2)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        series = np.random.default_rng(6).normal(size=(2, 12))
        full = reservoir.run(series, mask, params).states
        for k in (1, 5, 11):
            prefix = reservoir.run(series[:, :k], mask, params).states
            self.assertEqual(prefix.tobytes(), full[:k + 1].tobytes())

    def test_that_states_are_bounded_by_eta(self):
        rng = np.random.default_rng(8)
        for m in (3, 4):
            mask = default_mask(n_vars=3, m=m)
            for _ in range(5):
                gamma, eta = rng.uniform(0.01, 5.0, size=2)
                theta = rng.uniform(0.05, 2.0)
                params = reservoir.DfrParams(gamma, eta, theta, mask.n_nodes)
                series = rng.normal(scale=10.0, size=(3, 30))
                states = reservoir.run(series, mask, params).states
                self.assertLessEqual(np.max(np.abs(states)), eta)

    def test_that_repeated_runs_are_bit_identical(self):
        mask = default_mask(n_vars=2, m=4)
        params = reservoir.DfrParams(0.7, 1.3, 0.4, mask.n_nodes)
        series = np.random.default_rng(9).normal(size=(2, 25))
        first = reservoir.run(series, mask, params).states
        second = reservoir.run(series.copy(), mask, params).states
        self.assertEqual(first.tobytes(), second.tobytes())

    def test_that_step_is_the_exact_solution_for_constant_drive(self):
        params = reservoir.DfrParams(0.5, 1.0, 0.3, n_nodes=1)
        x0, j = 0.4, -0.8
        drive = reservoir.nonlinearity(x0, j, params)
        state = reservoir.step([x0], [j], params)
        self.assertAlmostEqual(
            state[0], x0 * math.exp(-0.3) + (1.0 - math.exp(-0.3)) * drive,
            places=15)
        # forward Euler on dx/dt = -x + f over one node interval
        x, dt = x0, 0.3 / 100000
        for _ in range(100000):
            x += dt * (drive - x)
        self.assertAlmostEqual(state[0], x, places=5)

    def test_that_run_checks_the_variable_count(self):
        mask = default_mask(n_vars=2)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        with self.assertRaises(errors.DimensionError):
            reservoir.run(np.ones((3, 5)), mask, params)

    def test_that_run_checks_the_node_count(self):
        mask = default_mask()
        with self.assertRaises(errors.DimensionError):
            reservoir.run(np.ones((1, 5)), mask, self.params)

    def test_that_trajectory_must_start_at_zero(self):
        with self.assertRaises(errors.DimensionError):
            reservoir.Trajectory([[1.0, 0.0], [0.0, 0.0]])


class RepresentationTests(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self.traj = reservoir.Trajectory(FIXTURE_STATES)

    def test_that_lrs_is_the_last_state(self):
        self.assertEqual(representations.lrs(self.traj).features.tolist(),
                         [3.0, 4.0])

    def test_that_drs_keeps_every_step(self):
        rep = representations.drs(self.traj)
        self.assertTrue(rep.is_sequence)
        self.assertEqual(rep.features.tolist(), [[1.0, 2.0], [3.0, 4.0]])

    def test_that_dprr_matches_hand_computation(self):
        rep = representations.dprr(self.traj)
        self.assertEqual(rep.features.tolist(),
                         [3.0, 6.0, 4.0, 4.0, 8.0, 6.0])
        self.assertEqual(rep.kind.n_features(2, 1), 6)

    def test_that_unshifted_gram_is_symmetric(self):
        gram = representations.unshifted_gram(self.traj)
        self.assertEqual(gram.tolist(), [[10.0, 14.0], [14.0, 20.0]])

    def test_that_shifted_dprr_matrix_is_not_symmetric(self):
        shifted = representations.dprr(self.traj).features.reshape(2, 3)
        square = shifted[:, :2]
        self.assertEqual(square.tolist(), [[3.0, 6.0], [4.0, 8.0]])
        self.assertFalse(np.array_equal(square, square.T))
        gram = representations.unshifted_gram(self.traj)
        np.testing.assert_array_equal(gram, gram.T)

    def test_that_mrs_length_does_not_depend_on_series_length(self):
        mask = default_mask(n_vars=2)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        rng = np.random.default_rng(11)
        for builder in ('MRS_XPAD', 'MRS_UPAD'):
            kind = representations.RepresentationKind(builder, t_max=9)
            lengths = {
                representations.represent(
                    kind, rng.normal(size=(2, length)), mask, params
                ).n_features
                for length in (1, 4, 9)}
            self.assertEqual(lengths, {90})

    def test_that_upad_equals_xpad_at_full_length(self):
        mask = default_mask(n_vars=2)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        series = np.random.default_rng(12).normal(size=(2, 7))
        traj = reservoir.run(series, mask, params)
        upad = representations.mrs_upad(series, mask, params, 7)
        xpad = representations.mrs_xpad(traj, 7)
        self.assertEqual(upad.features.tobytes(), xpad.features.tobytes())

    def test_that_model_space_fits_satisfy_the_normal_equation(self):
        mask = default_mask(n_vars=2, m=4)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        rng = np.random.default_rng(13)
        for length, lam in ((3, 0.1), (20, 1.0), (40, 0.01)):
            series = rng.normal(size=(2, length))
            traj = reservoir.run(series, mask, params)
            regressors = np.vstack([traj.states[:-1].T, np.ones(length)])
            system = regressors.dot(regressors.T) + lam * np.eye(20)
            fitted = representations.oms(series, traj, lam).features
            np.testing.assert_allclose(
                fitted.reshape(2, 20).dot(system),
                series.dot(regressors.T), rtol=1e-9, atol=1e-9)
            fitted = representations.rms(traj, lam).features
            np.testing.assert_allclose(
                fitted.reshape(19, 20).dot(system),
                traj.states[1:].T.dot(regressors.T), rtol=1e-9, atol=1e-9)

    def test_that_xpad_pads_with_zero_states(self):
        rep = representations.mrs_xpad(self.traj, 3)
        self.assertEqual(rep.features.tolist(),
                         [1.0, 2.0, 3.0, 4.0, 0.0, 0.0])

    def test_that_series_longer_than_t_max_is_rejected(self):
        with self.assertRaises(errors.SeriesTooLongError):
            representations.mrs_xpad(self.traj, 1)

    def test_that_empty_trajectory_is_rejected(self):
        empty = reservoir.Trajectory([[0.0, 0.0]])
        for builder in (representations.lrs, representations.drs,
                        representations.dprr):
            with self.assertRaises(errors.EmptyTrajectoryError):
                builder(empty)

    def test_that_upad_keeps_the_reservoir_running(self):
        mask = default_mask(n_vars=2)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        series = np.random.default_rng(5).normal(size=(2, 4))
        traj = reservoir.run(series, mask, params)
        rep = representations.mrs_upad(series, mask, params, 6)
        self.assertEqual(rep.n_features, 60)
        np.testing.assert_array_equal(rep.features[:40],
                                      linalg.flatten(traj.states[1:]))
        self.assertTrue(np.any(rep.features[40:] != 0.0))

    def test_that_kind_parameters_are_validated(self):
        with self.assertRaises(errors.ConfigurationError):
            representations.RepresentationKind('MRS_XPAD')
        with self.assertRaises(errors.ConfigurationError):
            representations.RepresentationKind('OMS')
        with self.assertRaises(errors.ConfigurationError):
            representations.RepresentationKind('ESN')

    def test_that_irrelevant_kind_parameters_are_dropped(self):
        kind = representations.RepresentationKind('dprr', t_max=5, lam=1.0)
        self.assertIs(kind.tag, representations.Kind.DPRR)
        self.assertIsNone(kind.t_max)
        self.assertIsNone(kind.lam)

    def test_that_feature_counts_follow_the_kind(self):
        kind = representations.RepresentationKind
        self.assertEqual(kind('OMS', lam=1.0).n_features(36, 13), 13 * 37)
        self.assertEqual(kind('RMS', lam=1.0).n_features(36, 13), 36 * 37)
        self.assertEqual(kind('MRS_UPAD', t_max=4).n_features(36, 13), 144)
        self.assertEqual(kind('LRS').n_features(36, 13), 36)

    def test_that_represent_streams_dprr_identically(self):
        mask = default_mask(n_vars=2)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        series = np.random.default_rng(6).normal(size=(2, 9))
        streamed = representations.represent(
            representations.RepresentationKind('DPRR'), series, mask, params)
        batch = representations.dprr(reservoir.run(series, mask, params))
        self.assertEqual(streamed.features.tolist(), batch.features.tolist())

    def test_that_represent_dispatches_every_kind(self):
        mask = default_mask(n_vars=2)
        params = reservoir.DfrParams(0.3, 1.0, 0.25, mask.n_nodes)
        series = np.random.default_rng(7).normal(size=(2, 5))
        for tag in representations.Kind:
            kind = representations.RepresentationKind(tag, t_max=5, lam=1.0)
            rep = representations.represent(kind, series, mask, params)
            self.assertIs(rep.kind.tag, tag)
            self.assertEqual(rep.n_features, kind.n_features(10, 2))


class OracleEquivalenceTests(unittest.TestCase):

    CASES = 100

    def setUp(self):
        super().setUp()
        self.rng = np.random.default_rng(20190701)

    def random_params(self, n_nodes):
        return reservoir.DfrParams(
            gamma=float(self.rng.uniform(0.01, 2.0)),
            eta=float(self.rng.uniform(0.1, 3.0)),
            theta=float(self.rng.uniform(0.05, 1.0)),
            n_nodes=n_nodes)

    def random_run(self):
        n_vars = int(self.rng.integers(1, 4))
        mask = default_mask(n_vars=n_vars)
        params = self.random_params(mask.n_nodes)
        series = self.rng.normal(size=(n_vars, int(self.rng.integers(2, 16))))
        return series, mask, params

    def test_that_step_is_bit_identical_to_oracle(self):
        for _ in range(self.CASES):
            n_nodes = int(self.rng.integers(1, 13))
            params = self.random_params(n_nodes)
            prev = self.rng.normal(size=n_nodes)
            j = self.rng.normal(size=n_nodes)
            expected = oracles.oracle_step(prev, j, params)
            self.assertEqual(reservoir.step(prev, j, params).tolist(),
                             expected.value)

    def test_that_run_is_bit_identical_to_oracle_cascade(self):
        for _ in range(self.CASES):
            series, mask, params = self.random_run()
            state = [0.0] * mask.n_nodes
            expected = [state]
            for k in range(series.shape[1]):
                j = masking.apply_mask(mask, series[:, k])
                state = oracles.oracle_step(state, j, params).value
                expected.append(state)
            traj = reservoir.run(series, mask, params)
            self.assertEqual(traj.states.tolist(), expected)

    def test_that_zero_step_oracle_is_zero(self):
        params = self.random_params(4)
        self.assertEqual(oracles.oracle_step([0.0] * 4, [0.0] * 4,
                                             params).value, [0.0] * 4)

    def test_that_dprr_matches_oracle(self):
        for _ in range(self.CASES):
            series, mask, params = self.random_run()
            traj = reservoir.run(series, mask, params)
            expected = oracles.oracle_dprr(traj).value
            np.testing.assert_allclose(
                representations.dprr(traj).features, expected,
                rtol=1e-12, atol=0.0)

    def test_that_dprr_oracle_matches_fixture(self):
        states, expected = oracles.trajectory_fixture()
        self.assertEqual(oracles.oracle_dprr(states).value, expected)

    def test_that_ridge_matches_explicit_inverse(self):
        for _ in range(self.CASES):
            rows = int(self.rng.integers(1, 5))
            order = int(self.rng.integers(1, 12))
            samples = int(self.rng.integers(order, order + 20))
            a = self.rng.normal(size=(rows, samples))
            b = self.rng.normal(size=(order, samples))
            reg = float(self.rng.uniform(0.01, 2.0))
            expected = oracles.oracle_ridge(a, b, reg).value
            np.testing.assert_allclose(linalg.ridge_solve(a, b, reg),
                                       expected, rtol=1e-8, atol=1e-9)

    def test_that_ridge_oracle_shrinks_identity_case(self):
        a = [[2.0, 4.0], [1.0, -1.0]]
        result = oracles.oracle_ridge(a, [[1.0, 0.0], [0.0, 1.0]], 1.0)
        self.assertEqual(result.value, [[1.0, 2.0], [0.5, -0.5]])

    def test_that_model_space_representations_match_oracle(self):
        for _ in range(self.CASES):
            series, mask, params = self.random_run()
            traj = reservoir.run(series, mask, params)
            lam = float(self.rng.uniform(0.5, 2.0))
            states = traj.states.tolist()
            shifted = [[row[n] for row in states[:-1]]
                       for n in range(mask.n_nodes)]
            shifted.append([1.0] * traj.length)
            targets = [[row[n] for row in states[1:]]
                       for n in range(mask.n_nodes)]
            oms = oracles.oracle_ridge(series.tolist(), shifted, lam).value
            rms = oracles.oracle_ridge(targets, shifted, lam).value
            np.testing.assert_allclose(
                representations.oms(series, traj, lam).features,
                [v for row in oms for v in row], rtol=1e-8, atol=1e-10)
            np.testing.assert_allclose(
                representations.rms(traj, lam).features,
                [v for row in rms for v in row], rtol=1e-8, atol=1e-10)

    def test_that_oracles_refuse_large_inputs(self):
        with self.assertRaises(oracles.OracleSizeError):
            oracles.oracle_step([0.0] * 13, [0.0] * 13, self.random_params(13))
        with self.assertRaises(oracles.OracleSizeError):
            oracles.oracle_dprr([[0.0]] * 52)


class ReadoutTests(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self.reps = [lrs([1.0, 0.0]), lrs([0.0, 1.0]), lrs([0.9, 0.1]),
                     lrs([0.1, 0.9])]
        self.labels = ['x', 'y', 'x', 'y']

    def test_that_training_separates_the_classes(self):
        model = readout.train(self.reps, self.labels, 1e-3)
        self.assertEqual(model.classes, ('x', 'y'))
        self.assertEqual(model.w_out.shape, (2, 3))
        self.assertEqual(readout.predict(model, lrs([1.0, 0.0])), 'x')
        self.assertEqual(readout.predict(model, lrs([0.0, 1.0])), 'y')
        self.assertEqual(readout.scores(model, lrs([1.0, 0.0])).shape, (2,))

    def random_problem(self, seed, n_reps=30, n_features=6):
        rng = np.random.default_rng(seed)
        reps = [lrs(row) for row in rng.normal(size=(n_reps, n_features))]
        labels = ['abc'[i % 3] for i in range(n_reps)]
        return reps, labels

    def test_that_trained_weights_satisfy_the_normal_equation(self):
        reps, labels = self.random_problem(21)
        targets = np.zeros((3, len(reps)))
        for column, label in enumerate(labels):
            targets['abc'.index(label), column] = 1.0
        samples = np.vstack([np.column_stack([r.features for r in reps]),
                             np.ones(len(reps))])
        for beta in (1e-3, 0.5, 10.0):
            model = readout.train(reps, labels, beta)
            lhs = model.w_out.dot(samples.dot(samples.T) +
                                  beta * np.eye(samples.shape[0]))
            np.testing.assert_allclose(lhs, targets.dot(samples.T),
                                       rtol=1e-9, atol=1e-9)

    def test_that_weight_norm_shrinks_as_beta_grows(self):
        for seed in (22, 23, 24):
            reps, labels = self.random_problem(seed)
            norms = [np.linalg.norm(readout.train(reps, labels, beta).w_out)
                     for beta in (1e-4, 1e-2, 1.0, 100.0)]
            for larger, smaller in zip(norms, norms[1:]):
                self.assertGreaterEqual(larger, smaller)

    def test_that_positive_scaling_keeps_every_prediction(self):
        reps, labels = self.random_problem(25)
        model = readout.train(reps, labels, 0.1)
        expected = [readout.predict(model, rep) for rep in reps]
        for factor in (2.0 ** -20, 0.5, 3.0, 2.0 ** 20):
            scaled = readout.ReadoutModel(model.w_out * factor, model.classes,
                                          model.rep_kind, model.beta)
            self.assertEqual([readout.predict(scaled, rep) for rep in reps],
                             expected)

    def test_that_single_step_vote_equals_state_prediction(self):
        rng = np.random.default_rng(26)
        sequences = [representations.drs(reservoir.Trajectory(
            np.vstack([np.zeros(4), rng.normal(size=(5, 4))])))
            for _ in range(6)]
        model = readout.train(sequences, ['p', 'q', 'r'] * 2, 0.1)
        for state in rng.normal(size=(10, 4)):
            single = representations.drs(
                reservoir.Trajectory([np.zeros(4), state]))
            expected = model.classes[int(np.argmax(
                model.w_out.dot(np.append(state, 1.0))))]
            self.assertEqual(readout.predict_drs(model, single), expected)
            self.assertEqual(readout.predict(model, single), expected)

    def test_that_explicit_class_order_is_kept(self):
        model = readout.train(self.reps, self.labels, 1e-3, ['y', 'x'])
        self.assertEqual(model.classes, ('y', 'x'))
        self.assertEqual(readout.predict(model, lrs([1.0, 0.0])), 'x')

    def test_that_labels_outside_the_class_list_are_rejected(self):
        with self.assertRaises(errors.DimensionError):
            readout.train(self.reps, self.labels, 1e-3, ['x', 'z'])

    def test_that_a_single_class_is_insufficient(self):
        with self.assertRaises(errors.InsufficientClassesError):
            readout.train(self.reps, ['x'] * 4, 1e-3)

    def test_that_mixed_representations_are_rejected(self):
        reps = self.reps + [lrs([1.0, 0.0, 0.0])]
        with self.assertRaises(errors.RepresentationMismatch):
            readout.train(reps, self.labels + ['x'], 1e-3)

    def test_that_counts_must_line_up(self):
        with self.assertRaises(errors.DimensionError):
            readout.train(self.reps, self.labels[:3], 1e-3)
        with self.assertRaises(errors.EmptySplitError):
            readout.train([], [], 1e-3)

    def test_that_prediction_checks_the_kind(self):
        model = readout.train(self.reps, self.labels, 1e-3)
        rep = representations.dprr(reservoir.Trajectory(FIXTURE_STATES))
        with self.assertRaises(errors.RepresentationMismatch):
            readout.predict(model, rep)

    def test_that_drs_predictions_are_voted(self):
        model = readout.ReadoutModel(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], ('a', 'b'),
            representations.RepresentationKind('DRS'), 0.0)
        rep = representations.Representation(
            model.rep_kind, [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        self.assertEqual(readout.vote(model, rep).tolist(), [2, 1])
        self.assertEqual(readout.predict(model, rep), 'a')
        self.assertEqual(readout.scores(model, rep).shape, (3, 2))

    def test_that_ties_go_to_the_lowest_class_index(self):
        model = readout.ReadoutModel(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], ('a', 'b'),
            representations.RepresentationKind('DRS'), 0.0)
        rep = representations.Representation(
            model.rep_kind, [[0.0, 1.0], [1.0, 0.0]])
        self.assertEqual(readout.predict_drs(model, rep), 'a')
        flat = readout.ReadoutModel([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
                                    ('a', 'b'),
                                    representations.RepresentationKind('LRS'),
                                    0.0)
        self.assertEqual(readout.predict(flat, lrs([3.0, 4.0])), 'a')

    def test_that_model_document_round_trips(self):
        model = readout.train(self.reps, self.labels, 1e-3)
        restored = readout.ReadoutModel.from_dict(
            json.loads(json.dumps(model.to_dict())))
        np.testing.assert_array_equal(restored.w_out, model.w_out)
        self.assertEqual(restored.rep_kind, model.rep_kind)


def write_lines(path, *documents):
    with open(path, 'w', encoding='utf-8') as stream:
        for document in documents:
            if not isinstance(document, str):
                document = json.dumps(document)
            stream.write(document + '\n')


HEADER = {'format': 'rcts-v1', 'name': 'tiny', 'n_vars': 2,
          'classes': ['a', 'b']}
INSTANCE = {'id': '1', 'label': 'a', 'split': 'train',
            'series': [[1.0, 2.0], [3.0, 4.0]]}


class DatasetTests(TemporaryDirectoryMixin, unittest.TestCase):

    def test_that_well_formed_file_loads_in_order(self):
        path = self.tempdir / 'tiny.jsonl'
        second = dict(INSTANCE, id='2', label='b', split='test')
        write_lines(path, HEADER, INSTANCE, second)
        loaded = dataset.load(path)
        self.assertEqual(loaded.name, 'tiny')
        self.assertEqual(loaded.classes, ('a', 'b'))
        self.assertEqual([i.id for i in loaded.instances], ['1', '2'])
        self.assertEqual(loaded.train[0].series.tolist(),
                         [[1.0, 2.0], [3.0, 4.0]])
        self.assertEqual((loaded.t_min, loaded.t_max), (2, 2))

    def test_that_wrong_channel_count_reports_the_line(self):
        path = self.tempdir / 'bad.jsonl'
        bad = dict(INSTANCE, series=[[1.0], [2.0], [3.0]])
        write_lines(path, HEADER, INSTANCE, bad)
        with self.assertRaises(errors.DatasetFormatError) as context:
            dataset.load(path)
        self.assertEqual(context.exception.lineno, 3)
        self.assertIn('line 3', str(context.exception))

    def test_that_malformed_files_are_rejected(self):
        nan_line = json.dumps(INSTANCE).replace('1.0', 'NaN')
        inf_line = json.dumps(INSTANCE).replace('1.0', 'Infinity')
        cases = {
            'bad format': [dict(HEADER, format='csv'), INSTANCE],
            'missing n_vars': [{k: v for k, v in HEADER.items()
                                if k != 'n_vars'}, INSTANCE],
            'duplicate class': [dict(HEADER, classes=['a', 'a']), INSTANCE],
            'nan': [HEADER, nan_line],
            'infinity': [HEADER, inf_line],
            'ragged': [HEADER, dict(INSTANCE, series=[[1.0, 2.0], [3.0]])],
            'empty series': [HEADER, dict(INSTANCE, series=[[], []])],
            'unknown label': [HEADER, dict(INSTANCE, label='c')],
            'bad split': [HEADER, dict(INSTANCE, split='valid')],
            'missing id': [HEADER, {k: v for k, v in INSTANCE.items()
                                    if k != 'id'}],
            'string value': [HEADER, dict(INSTANCE,
                                          series=[['1', 2.0], [3.0, 4.0]])],
            'invalid json': [HEADER, '{"id": "1",'],
            'header not object': ['[1, 2]', INSTANCE],
            'no channels': [HEADER, dict(INSTANCE, series=[])],
        }
        for name, lines in cases.items():
            path = self.tempdir / 'corrupt.jsonl'
            write_lines(path, *lines)
            with self.assertRaises(errors.DatasetFormatError, msg=name):
                dataset.load(path)

    def test_that_invalid_utf8_reports_the_line(self):
        path = self.tempdir / 'latin1.jsonl'
        write_lines(path, HEADER, INSTANCE)
        with path.open('ab') as stream:
            stream.write(json.dumps(INSTANCE).encode('utf-8')[:-1] +
                         b'\xff}\n')
        with self.assertRaises(errors.DatasetFormatError) as context:
            dataset.load(path)
        self.assertEqual(context.exception.lineno, 3)
        self.assertIn('UTF-8', str(context.exception))

    def test_that_empty_file_is_rejected(self):
        path = self.tempdir / 'empty.jsonl'
        path.write_text('')
        with self.assertRaises(errors.DatasetFormatError):
            dataset.load(path)

    def test_that_save_and_load_are_bit_identical(self):
        original = dataset.synth(seed=11, n_train=6, n_test=4)
        path = self.tempdir / 'synth.jsonl'
        dataset.save(original, path)
        first = dataset.load(path)
        for left, right in zip(original.instances, first.instances):
            self.assertEqual((left.id, left.label), (right.id, right.label))
            self.assertEqual(left.series.tobytes(), right.series.tobytes())
        again = self.tempdir / 'again.jsonl'
        dataset.save(first, again)
        self.assertEqual(path.read_bytes(), again.read_bytes())

    def test_that_empty_split_cannot_be_saved(self):
        empty = dataset.Dataset('empty', 2, ('c0', 'c1'), [],
                                small_dataset().test)
        with self.assertRaises(errors.EmptySplitError) as context:
            dataset.save(empty, self.tempdir / 'empty.jsonl')
        self.assertIn('empty split', str(context.exception))

    def test_that_synth_is_deterministic(self):
        first = dataset.synth(seed=9)
        second = dataset.synth(seed=9)
        for left, right in zip(first.instances, second.instances):
            self.assertEqual(left.series.tobytes(), right.series.tobytes())
        third = dataset.synth(seed=10)
        self.assertNotEqual(first.train[0].series.tobytes(),
                            third.train[0].series.tobytes())

    def test_that_synth_honours_degenerate_length_range(self):
        synthetic = dataset.synth(n_classes=3, n_vars=1, n_train=6,
                                  n_test=3, t_range=(5, 5))
        self.assertEqual({i.length for i in synthetic.instances}, {5})
        self.assertEqual(synthetic.classes, ('c0', 'c1', 'c2'))
        self.assertEqual([i.label for i in synthetic.train],
                         ['c0', 'c1', 'c2'] * 2)

    def test_that_synth_rejects_invalid_counts(self):
        with self.assertRaises(errors.ConfigurationError):
            dataset.synth(n_classes=0)
        with self.assertRaises(errors.ConfigurationError):
            dataset.synth(t_range=(10, 5))

    def test_that_instances_validate_their_series(self):
        with self.assertRaises(errors.DimensionError):
            dataset.TimeSeriesInstance('x', 'a', [1.0, 2.0])
        with self.assertRaises(errors.NonFiniteError):
            dataset.TimeSeriesInstance('x', 'a', [[1.0, math.inf]])

    def test_that_dataset_checks_labels(self):
        instance = dataset.TimeSeriesInstance('x', 'z', [[1.0]])
        with self.assertRaises(errors.DimensionError):
            dataset.Dataset('d', 1, ('a', 'b'), [instance])

    def make_csv_tree(self):
        root = self.tempdir / 'csv'
        files = {('train', 'a', '1'): '1,2\n3,4\n5,6\n',
                 ('train', 'b', '2'): '0,1\n1,0\n0,1\n',
                 ('test', 'a', '3'): '1,1\n2,2\n',
                 ('test', 'b', '4'): '7,8\n'}
        for (split, label, name), text in files.items():
            directory = root / split / label
            directory.mkdir(parents=True, exist_ok=True)
            (directory / '{}.csv'.format(name)).write_text(text)
        return root

    def test_that_csv_tree_is_converted(self):
        converted = dataset.convert(self.make_csv_tree(), name='csvdata')
        self.assertEqual(converted.name, 'csvdata')
        self.assertEqual(converted.classes, ('a', 'b'))
        self.assertEqual(converted.n_vars, 2)
        self.assertEqual(converted.train[0].series.tolist(),
                         [[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]])
        self.assertEqual([i.length for i in converted.test], [2, 1])

    def test_that_inconsistent_csv_columns_are_rejected(self):
        root = self.make_csv_tree()
        (root / 'test' / 'b' / '5.csv').write_text('1,2,3\n')
        with self.assertRaises(errors.DatasetFormatError):
            dataset.convert(root)


class ExperimentConfigTests(TemporaryDirectoryMixin, unittest.TestCase):

    def test_that_unknown_keys_are_rejected(self):
        with self.assertRaises(errors.ConfigurationError):
            pipeline.ExperimentConfig.from_dict({'gama': 1.0})

    def test_that_jobs_are_never_serialized(self):
        config = pipeline.ExperimentConfig.from_dict({'jobs': 4})
        document = config.to_dict()
        self.assertNotIn('jobs', document)
        self.assertIn('lambda', document)
        self.assertEqual(config, pipeline.ExperimentConfig())

    def test_that_invalid_values_are_rejected(self):
        for changes in ({'gamma': -1.0}, {'m': 2}, {'init': [0, 1]},
                        {'beta': -0.1}, {'representation': 'ESN'},
                        {'taps': [1]}, {'t_max': 0}):
            with self.assertRaises(errors.ConfigurationError, msg=changes):
                pipeline.ExperimentConfig.from_dict(changes)

    def test_that_presets_resolve_by_name_and_path(self):
        for name in ('arab_dprr', 'arab_dprr.json', 'presets/arab_dprr.json'):
            config = pipeline.load_config(name)
            self.assertEqual(config.representation, 'DPRR')
            self.assertEqual((config.gamma, config.eta, config.theta,
                              config.beta), (0.04, 1.0, 0.3, 0.01))
            self.assertEqual(config.m, 5)

    def test_that_every_bundled_preset_is_valid(self):
        names = pipeline.preset_names()
        self.assertEqual(len(names), 31)
        for name in names:
            pipeline.load_config(name)

    def test_that_overrides_replace_file_values(self):
        config = pipeline.load_config('arab_table2_oms', m=3, jobs=2)
        self.assertEqual((config.m, config.jobs, config.lam), (3, 2, 1.0))

    def test_that_config_files_are_read(self):
        path = self.tempdir / 'config.json'
        path.write_text(json.dumps({'representation': 'rms', 'lambda': 0.5,
                                    'taps': [2, 0], 'init': '00011'}))
        config = pipeline.load_config(str(path))
        self.assertEqual(config.representation, 'RMS')
        self.assertEqual(config.lam, 0.5)
        self.assertEqual(config.polynomial(),
                         masking.PrimitivePolynomial(5, (2, 0)))
        self.assertEqual(config.initial_value(), (0, 0, 0, 1, 1))

    def test_that_missing_config_is_reported(self):
        with self.assertRaises(errors.ConfigurationError):
            pipeline.load_config(str(self.tempdir / 'missing.json'))


class PipelineTests(MockHelper, TemporaryDirectoryMixin, unittest.TestCase):

    def test_that_fit_reaches_full_training_accuracy(self):
        model = small_model()
        report = pipeline.evaluate(model, small_dataset().train)
        self.assertEqual(report.accuracy, 1.0)

    def test_that_oms_models_have_the_expected_width(self):
        model = small_model('OMS')
        self.assertIs(model.readout.rep_kind.tag, representations.Kind.OMS)
        self.assertEqual(model.readout.n_features, 2 * (10 + 1))

    def test_that_fit_is_deterministic(self):
        config = small_config()
        first = pipeline.fit(small_dataset(), config)
        second = pipeline.fit(small_dataset(), config)
        self.assertEqual(pipeline.dumps_model(first),
                         pipeline.dumps_model(second))

    def test_that_worker_processes_do_not_change_results(self):
        sequential = pipeline.fit(small_dataset(), small_config(jobs=1))
        parallel = pipeline.fit(small_dataset(), small_config(jobs=2))
        self.assertEqual(pipeline.dumps_model(sequential),
                         pipeline.dumps_model(parallel))
        self.assertEqual(
            pipeline.evaluate(sequential, small_dataset().test, 1).to_dict(),
            pipeline.evaluate(parallel, small_dataset().test, 2).to_dict())

    def test_that_fit_requires_training_data(self):
        empty = dataset.Dataset('empty', 2, ('c0', 'c1'))
        with self.assertRaises(errors.EmptySplitError):
            pipeline.fit(empty, small_config())

    def test_that_confusion_trace_matches_accuracy(self):
        report = pipeline.evaluate(small_model('LRS'), small_dataset().test,
                                   verbose=True)
        total = sum(sum(row) for row in report.confusion)
        trace = sum(report.confusion[i][i] for i in range(2))
        self.assertEqual(total, 20)
        self.assertEqual(report.accuracy, trace / total)
        self.assertEqual([sum(row) for row in report.confusion], [10, 10])
        self.assertEqual(len(report.predictions), 20)
        self.assertNotIn('wall_time', report.to_dict())

    def test_that_constant_predictor_scores_one_half(self):
        model = small_model()
        constant = dataclasses.replace(model, readout=readout.ReadoutModel(
            np.zeros_like(model.readout.w_out), model.classes,
            model.readout.rep_kind, model.readout.beta))
        report = pipeline.evaluate(constant, small_dataset().test)
        self.assertEqual(report.accuracy, 0.5)
        self.assertEqual(report.recall, {'c0': 1.0, 'c1': 0.0})

    def test_that_evaluate_rejects_wrong_dimensions(self):
        other = dataset.synth(n_vars=3, n_train=2, n_test=2, seed=1)
        with self.assertRaises(errors.DimensionError):
            pipeline.evaluate(small_model(), other.test)

    def test_that_series_longer_than_training_fail_for_mrs(self):
        model = small_model('MRS_XPAD')
        self.assertEqual(model.t_max,
                         max(i.length for i in small_dataset().train))
        long_instance = dataset.TimeSeriesInstance(
            'long', 'c0', np.ones((2, model.t_max + 1)))
        with self.assertRaises(errors.SeriesTooLongError):
            pipeline.evaluate(model, [long_instance])

    def test_that_normalization_is_fitted_and_stored(self):
        model = pipeline.fit(small_dataset(), small_config(normalize=True))
        self.assertIsNotNone(model.normalizer)
        values = np.hstack([model.normalizer.apply(i.series)
                            for i in small_dataset().train])
        np.testing.assert_allclose(values.mean(axis=1), 0.0, atol=1e-12)
        np.testing.assert_allclose(values.std(axis=1), 1.0, rtol=1e-10)

    def test_that_saved_models_reproduce_reports(self):
        for kind in ('DPRR', 'DRS', 'MRS_UPAD'):
            model = small_model(kind)
            path = self.tempdir / '{}.json'.format(kind)
            pipeline.save_model(model, path)
            restored = pipeline.load_model(path)
            self.assertEqual(
                pipeline.evaluate(restored, small_dataset().test).to_dict(),
                pipeline.evaluate(model, small_dataset().test).to_dict())
            self.assertEqual(pipeline.dumps_model(restored),
                             pipeline.dumps_model(model))

    def test_that_truncated_model_is_rejected(self):
        path = self.tempdir / 'model.json'
        pipeline.save_model(small_model(), path)
        path.write_text(path.read_text()[:100])
        with self.assertRaises(errors.ModelFormatError):
            pipeline.load_model(path)

    def test_that_unknown_model_version_is_rejected(self):
        document = small_model().to_dict()
        document['format'] = 'dfrmodel-v0'
        path = self.tempdir / 'model.json'
        path.write_text(json.dumps(document))
        with self.assertRaises(errors.ModelFormatError):
            pipeline.load_model(path)

    def test_that_inconsistent_model_is_rejected(self):
        document = small_model().to_dict()
        del document['readout']['w_out'][0][-1]
        del document['readout']['w_out'][1][-1]
        with self.assertRaises(errors.ModelFormatError):
            pipeline.Model.from_dict(document)

    def test_that_model_from_another_process_scores_the_same(self):
        model_path = self.tempdir / 'model.json'
        data_path = self.tempdir / 'data.jsonl'
        pipeline.save_model(small_model(), model_path)
        dataset.save(small_dataset(), data_path)
        completed = subprocess.run(
            [sys.executable, '-m', 'sprockets.dfr.cli', 'eval',
             str(model_path), str(data_path), '--jobs', '1'],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, check=True,
            cwd=str(pathlib.Path(__file__).parent))
        document = json.loads(completed.stdout.decode('utf-8'))
        expected = pipeline.evaluate(small_model(), small_dataset().test)
        self.assertEqual(document['accuracy'], expected.accuracy)
        self.assertEqual(document['confusion'],
                         [list(row) for row in expected.confusion])


class GuardedDataset:
    """Dataset double that counts reads of the test split."""

    def __init__(self, wrapped):
        self._wrapped = wrapped
        self.test_reads = 0
        self.name = wrapped.name
        self.n_vars = wrapped.n_vars
        self.classes = wrapped.classes
        self.train = wrapped.train

    @property
    def test(self):
        self.test_reads += 1
        return self._wrapped.test


class GridSearchTests(MockHelper, unittest.TestCase):

    def test_that_single_point_grid_returns_that_point(self):
        guarded = GuardedDataset(small_dataset())
        result = pipeline.grid_search(guarded, small_config(), [0.3], [0.5])
        self.assertEqual((result.best.gamma, result.best.eta), (0.3, 0.5))
        self.assertEqual(len(result.scores), 1)
        self.assertEqual(result.scores[0]['score'], result.best_score)
        self.assertEqual(guarded.test_reads, 0)

    def test_that_folds_never_read_the_test_split(self):
        guarded = GuardedDataset(small_dataset())
        result = pipeline.grid_search(guarded, small_config(), [0.1], [1.0],
                                      folds=3)
        self.assertTrue(0.0 <= result.best_score <= 1.0)
        self.assertEqual(guarded.test_reads, 0)

    def test_that_default_grid_has_sixteen_points_and_finds_the_optimum(self):
        def planted(data, config, splits):
            return 0.9 if (config.gamma, config.eta) == (0.3, 0.1) else 0.4

        score = self.start_mock('sprockets.dfr.pipeline._score',
                                mock.Mock(side_effect=planted))
        result = pipeline.grid_search(small_dataset(), small_config())
        self.assertEqual(score.call_count, 16)
        self.assertEqual(len(result.scores), 16)
        self.assertEqual((result.best.gamma, result.best.eta), (0.3, 0.1))
        self.assertEqual(result.best_score, 0.9)
        self.assertEqual([(r['gamma'], r['eta']) for r in result.scores[:2]],
                         [(0.03, 0.03), (0.03, 0.1)])

    def test_that_ties_go_to_the_first_point(self):
        self.start_mock('sprockets.dfr.pipeline._score',
                        mock.Mock(return_value=0.5))
        result = pipeline.grid_search(small_dataset(), small_config(),
                                      [1.0, 0.3], [0.1, 1.0])
        self.assertEqual((result.best.gamma, result.best.eta), (1.0, 0.1))

    def test_that_validation_split_is_seeded(self):
        calls = []
        self.start_mock('sprockets.dfr.pipeline._score', mock.Mock(
            side_effect=lambda data, config, splits: calls.append(splits)
            or 0.5))
        pipeline.grid_search(small_dataset(), small_config(), [1.0], [1.0])
        pipeline.grid_search(small_dataset(), small_config(), [1.0], [1.0])
        self.assertEqual(calls[0], calls[1])
        train, valid = calls[0][0]
        self.assertEqual(len(valid), 6)
        self.assertFalse(set(train) & set(valid))

    def test_that_invalid_schemes_are_rejected(self):
        data = small_dataset()
        with self.assertRaises(errors.ConfigurationError):
            pipeline.grid_search(data, small_config(), [], [1.0])
        with self.assertRaises(errors.ConfigurationError):
            pipeline.grid_search(data, small_config(), [1.0], [1.0],
                                 holdout=1.5)
        with self.assertRaises(errors.ConfigurationError):
            pipeline.grid_search(data, small_config(), [1.0], [1.0], folds=1)


class SyntheticAccuracyTests(unittest.TestCase):
    """Self-contained accuracy baseline on seeded synthetic data."""

    def test_that_dprr_classifies_synthetic_sinusoids(self):
        dprr = examples.run_example('DPRR')
        lrs_report = examples.run_example('LRS')
        self.assertGreaterEqual(dprr.accuracy, 0.95)
        self.assertGreater(dprr.accuracy, lrs_report.accuracy)


class ReproduceTests(MockHelper, TemporaryDirectoryMixin, unittest.TestCase):

    def test_that_missing_datasets_are_skipped(self):
        rows = reproduce.representation_rows(self.tempdir)
        self.assertEqual(len(rows), 7)
        self.assertEqual({r.status for r in rows}, {'skipped'})
        self.assertEqual(rows[-1].published, 97.5)
        self.assertIsNone(reproduce.report(rows)['ordering']['5'])

    def test_that_method_rows_carry_published_baselines(self):
        rows = reproduce.method_rows(self.tempdir, datasets=['ecg'])
        self.assertEqual([(r.representation, r.published) for r in rows],
                         [('DRS', 67.0), ('DPRR', 88.0)])
        self.assertEqual(rows[0].baselines['FCN'], 87.2)
        self.assertNotIn('DFR_DPRR', rows[0].baselines)

    def test_that_invalid_configurations_become_error_rows(self):
        wide = dataset.synth(n_vars=13, n_train=4, n_test=2, t_range=(3, 4))
        self.start_mock('sprockets.dfr.reproduce._load',
                        mock.Mock(return_value=wide))
        rows = reproduce.representation_rows(self.tempdir, degrees=[3],
                                             kinds=['DPRR'])
        self.assertEqual(rows[0].status, 'error')
        self.assertIn('more variables', rows[0].message)
        self.assertEqual(rows[0].published, 88.5)

    def test_that_tolerances_depend_on_the_representation(self):
        row = reproduce.Row('3', 'ARAB', 'DPRR', 5, 97.5, measured=95.0)
        self.assertTrue(row.within)
        row.measured = 94.0
        self.assertFalse(row.within)
        drs = reproduce.Row('3', 'ARAB', 'DRS', 5, 26.0, measured=30.5)
        self.assertTrue(drs.within)

    def make_rows(self, **measured):
        values = dict(zip(reproduce.KINDS,
                          reproduce.REPRESENTATION_ACCURACY[5]))
        values.update(measured)
        return [reproduce.Row('3', 'ARAB', kind, 5, 0.0, measured=values[kind])
                for kind in reproduce.KINDS]

    def test_that_ordering_follows_published_ranking(self):
        self.assertTrue(reproduce.ordering_holds(self.make_rows()))
        self.assertFalse(reproduce.ordering_holds(self.make_rows(DRS=60.0)))
        self.assertFalse(reproduce.ordering_holds(self.make_rows(OMS=90.0)))

    def test_that_markdown_lists_every_row(self):
        rows = reproduce.method_rows(self.tempdir, datasets=['ECG', 'WAF'])
        text = reproduce.to_markdown(rows)
        lines = text.strip().split('\n')
        self.assertEqual(len(lines), 2 + len(rows))
        self.assertTrue(lines[0].startswith('| table | dataset'))
        self.assertIn('TWIESN', lines[0])

    def test_that_shape_mismatches_are_listed(self):
        mismatches = reproduce.check_shape(small_dataset(), 'ecg')
        self.assertIn('train is 30, published 100', mismatches)


class CommandLineTests(MockHelper, TemporaryDirectoryMixin, unittest.TestCase):

    def setUp(self):
        super().setUp()
        self.dict_config = self.start_mock('logging.config.dictConfig')
        self.recorder = RecordingHandler()
        logging.getLogger().addHandler(self.recorder)
        self.config_path = self.tempdir / 'config.json'
        self.config_path.write_text(json.dumps(
            small_config().to_dict()))
        self.data_path = self.tempdir / 'data.jsonl'
        dataset.save(small_dataset(), self.data_path)

    def tearDown(self):
        logging.getLogger().removeHandler(self.recorder)
        super().tearDown()

    def run_cli(self, *argv):
        with mock.patch('sys.stdout', new_callable=io.StringIO) as stdout, \
                mock.patch('sys.stderr', new_callable=io.StringIO):
            status = cli.main([str(arg) for arg in argv])
        output = stdout.getvalue()
        return status, (json.loads(output) if status == 0 and output
                        else None)

    def train(self, *extra):
        model_path = self.tempdir / 'model.json'
        status, document = self.run_cli(
            'train', self.data_path, '--config', self.config_path, '--out',
            model_path, '--jobs', '1', *extra)
        self.assertEqual(status, 0)
        return model_path, document

    def test_that_mask_prints_the_reference_column(self):
        status, document = self.run_cli('mask', '--m', '3', '--vars', '1')
        self.assertEqual(status, 0)
        self.assertEqual([row[0] for row in document['rows']],
                         [-1, -1, -1, 1, -1, 1, 1, 1, -1, -1])
        self.assertEqual(document['polynomial'], 'x^3 + x + 1')

    def test_that_mask_shape_follows_degree_and_variables(self):
        status, document = self.run_cli('mask', '--m', '5', '--vars', '13')
        self.assertEqual(status, 0)
        self.assertEqual(len(document['rows']), 36)
        self.assertEqual({len(row) for row in document['rows']}, {13})

    def test_that_degenerate_init_exits_with_one(self):
        status, _ = self.run_cli('mask', '--m', '3', '--init', '000')
        self.assertEqual(status, 1)

    def test_that_usage_errors_exit_with_two(self):
        self.assertEqual(self.run_cli('mask', '--bogus')[0], 2)
        self.assertEqual(self.run_cli()[0], 2)
        self.assertEqual(self.run_cli('train', self.data_path)[0], 2)
        self.assertEqual(self.run_cli('mask', '--jobs', '0')[0], 2)

    def test_that_undecodable_dataset_exits_with_one(self):
        broken = self.tempdir / 'broken.jsonl'
        broken.write_bytes(json.dumps(HEADER).encode('utf-8') +
                           b'\n\xff\xfe\n')
        status, _ = self.run_cli('train', broken, '--out',
                                 self.tempdir / 'model.json', '--jobs', '1')
        self.assertEqual(status, 1)
        self.assertFalse((self.tempdir / 'model.json').exists())

    def test_that_missing_dataset_is_named(self):
        missing = self.tempdir / 'missing.jsonl'
        status, _ = self.run_cli('train', missing, '--out',
                                 self.tempdir / 'model.json', '--jobs', '1')
        self.assertEqual(status, 1)
        messages = [message for record, message in self.recorder.emitted
                    if record.levelno == logging.ERROR]
        self.assertTrue(any(str(missing) in m for m in messages), messages)

    def test_that_train_writes_a_model(self):
        model_path, document = self.train()
        self.assertTrue(model_path.is_file())
        self.assertEqual(document['train_accuracy'], 1.0)
        self.assertEqual(document['config']['m'], 3)

    def test_that_eval_writes_a_report(self):
        model_path, _ = self.train()
        report_path = self.tempdir / 'report.json'
        csv_path = self.tempdir / 'confusion.csv'
        status, document = self.run_cli(
            'eval', model_path, self.data_path, '--report', report_path,
            '--confusion-csv', csv_path, '--jobs', '1')
        self.assertEqual(status, 0)
        self.assertTrue(0.0 <= document['accuracy'] <= 1.0)
        self.assertEqual(json.loads(report_path.read_text()), document)
        self.assertTrue(csv_path.read_text().startswith(
            'true\\predicted,c0,c1\n'))

    def test_that_runs_are_byte_identical_for_any_job_count(self):
        outputs = []
        for jobs in ('1', '2'):
            model_path = self.tempdir / 'model-{}.json'.format(jobs)
            report_path = self.tempdir / 'report-{}.json'.format(jobs)
            self.run_cli('train', self.data_path, '--config',
                         self.config_path, '--out', model_path,
                         '--jobs', jobs)
            self.run_cli('eval', model_path, self.data_path, '--report',
                         report_path, '--jobs', jobs)
            outputs.append((model_path.read_bytes(),
                            report_path.read_bytes()))
        self.assertEqual(outputs[0], outputs[1])

    def test_that_predict_lists_every_instance(self):
        model_path, _ = self.train()
        status, document = self.run_cli('predict', model_path,
                                        self.data_path, '--jobs', '1')
        self.assertEqual(status, 0)
        self.assertEqual(len(document['predictions']), 20)
        self.assertEqual(set(document['predictions'][0]),
                         {'id', 'label', 'predicted'})

    def test_that_synth_is_reproducible(self):
        first, second = self.tempdir / 'a.jsonl', self.tempdir / 'b.jsonl'
        for path in (first, second):
            status, document = self.run_cli('synth', path, '--classes', '2',
                                            '--seed', '7')
            self.assertEqual(status, 0)
        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertEqual(document['n_classes'], 2)

    def test_that_grid_reports_the_default_sixteen_points(self):
        self.start_mock('sprockets.dfr.pipeline._score',
                        mock.Mock(return_value=0.5))
        status, document = self.run_cli('grid', self.data_path, '--config',
                                        self.config_path, '--jobs', '1')
        self.assertEqual(status, 0)
        self.assertEqual(len(document['scores']), 16)
        self.assertEqual(document['best']['gamma'], 0.03)

    def test_that_convert_writes_rcts(self):
        source = self.tempdir / 'csv' / 'train' / 'a'
        source.mkdir(parents=True)
        (source / '1.csv').write_text('1,2\n3,4\n')
        (self.tempdir / 'csv' / 'test' / 'a').mkdir(parents=True)
        (self.tempdir / 'csv' / 'test' / 'a' / '2.csv').write_text('5,6\n')
        out = self.tempdir / 'converted.jsonl'
        status, document = self.run_cli('convert', self.tempdir / 'csv', out)
        self.assertEqual(status, 0)
        self.assertEqual(document['n_vars'], 2)
        self.assertEqual(dataset.load(out).train[0].length, 2)

    def test_that_reproduce_emits_comparison_rows(self):
        markdown = self.tempdir / 'table.md'
        status, document = self.run_cli(
            'reproduce', '--table', '3', '--data-dir', self.tempdir,
            '--markdown', markdown)
        self.assertEqual(status, 0)
        self.assertEqual(len(document['rows']), 7)
        self.assertIn('MRS_UPAD', markdown.read_text())

    def test_that_table_three_only_covers_arab(self):
        status, _ = self.run_cli('reproduce', '--table', '3', '--dataset',
                                 'ecg')
        self.assertEqual(status, 2)

    def test_that_logging_is_configured_for_stderr(self):
        self.run_cli('mask', '--m', '3', '-v')
        config = self.dict_config.call_args[0][0]
        self.assertEqual(config['root']['level'], 'DEBUG')
        self.assertEqual(config['handlers']['debug-console']['stream'],
                         'ext://sys.stderr')


class LoggingConfigTests(unittest.TestCase):

    def test_that_structured_format_carries_the_run_id(self):
        config = sprockets.dfr.get_logging_config(run_id='abc')
        self.assertEqual(config['root']['level'], 'INFO')
        self.assertIn('run_id="%(run-id)s"',
                      config['formatters']['info']['format'])
        self.assertEqual(config['filters']['run-id']['run_id'], 'abc')

    def test_that_run_id_filter_sets_the_attribute(self):
        record = logging.makeLogRecord({'msg': 'hello'})
        sprockets.dfr._RunIdFilter('abc').filter(record)
        self.assertEqual(getattr(record, 'run-id'), 'abc')

    def test_that_run_id_filter_keeps_existing_values(self):
        record = logging.makeLogRecord({'msg': 'hello', 'run-id': 'xyz'})
        sprockets.dfr._RunIdFilter('abc').filter(record)
        self.assertEqual(getattr(record, 'run-id'), 'xyz')

    def test_that_generated_run_ids_differ(self):
        self.assertNotEqual(sprockets.dfr._RunIdFilter().run_id,
                            sprockets.dfr._RunIdFilter().run_id)


class ServeTests(MockHelper, unittest.TestCase):

    def setUp(self):
        super().setUp()
        self.runner_cls = self.start_mock('sprockets.dfr.runner.Runner')
        self.app_cls = self.start_mock('sprockets.dfr.service.Application')
        self.dict_config = self.start_mock('logging.config.dictConfig')
        self.model = mock.Mock()

    def test_that_runner_runs_the_created_application(self):
        sprockets.dfr.serve(self.model)
        self.app_cls.assert_called_once_with(self.model, debug=False)
        self.runner_cls.assert_called_once_with(self.app_cls.return_value)
        self.runner_cls.return_value.run.assert_called_once_with(8000)

    def test_that_port_setting_is_used(self):
        sprockets.dfr.serve(self.model, {'port': '9000', 'debug': True})
        self.runner_cls.return_value.run.assert_called_once_with(9000)
        self.app_cls.assert_called_once_with(self.model, debug=True)
        self.dict_config.assert_called_once_with(
            sprockets.dfr.get_logging_config(True))

    def test_that_log_config_override_is_used(self):
        log_config = mock.Mock()
        sprockets.dfr.serve(self.model, log_config=log_config)
        self.dict_config.assert_called_once_with(log_config)


class ServiceTests(testing.AsyncHTTPTestCase):

    def setUp(self):
        super().setUp()
        self.recorder = RecordingHandler()
        logging.getLogger().addHandler(self.recorder)

    def tearDown(self):
        super().tearDown()
        logging.getLogger().removeHandler(self.recorder)

    def get_app(self):
        return service.Application(small_model())

    def post_series(self, series):
        return self.fetch('/predict', method='POST',
                          body=json.dumps({'series': series}))

    def assert_message_logged(self, level, suffix):
        for record, message in self.recorder.emitted:
            if record.levelno == level and message.endswith(suffix):
                return
        self.fail('Expected message ending in "%s" to be logged in %r'
                  % (suffix, self.recorder.emitted))

    def test_that_status_describes_the_model(self):
        response = self.fetch('/status')
        self.assertEqual(response.code, 200)
        body = json.loads(response.body.decode('utf-8'))
        self.assertEqual(body['classes'], ['c0', 'c1'])
        self.assertEqual(body['representation']['kind'], 'DPRR')
        self.assertEqual(body['n_nodes'], 10)
        self.assertEqual(response.headers['Server'],
                         'sprockets.dfr/{}'.format(sprockets.dfr.__version__))

    def test_that_predictions_match_the_model(self):
        instance = small_dataset().test[0]
        response = self.post_series(instance.series.tolist())
        self.assertEqual(response.code, 200)
        body = json.loads(response.body.decode('utf-8'))
        self.assertEqual(body['label'], small_model().predict(instance))
        self.assertEqual(set(body['scores']), {'c0', 'c1'})

    def test_that_invalid_body_is_a_client_error(self):
        response = self.fetch('/predict', method='POST', body='not json')
        self.assertEqual(response.code, 400)
        body = json.loads(response.body.decode('utf-8'))
        self.assertEqual(body['type'], 'JSONDecodeError')
        self.assertIsNone(body['traceback'])
        self.assert_message_logged(logging.WARNING,
                                   'failed with 400: invalid request body')

    def test_that_wrong_channel_count_is_a_client_error(self):
        response = self.post_series([[1.0, 2.0]])
        self.assertEqual(response.code, 400)
        body = json.loads(response.body.decode('utf-8'))
        self.assertEqual(body['type'], 'DimensionError')
        self.assertIn('variables', body['message'])

    def test_that_unexpected_failures_are_server_errors(self):
        with mock.patch.object(pipeline.Model, 'represent',
                               side_effect=RuntimeError('boom')):
            response = self.post_series([[1.0], [2.0]])
        self.assertEqual(response.code, 500)
        body = json.loads(response.body.decode('utf-8'))
        self.assertEqual(body['type'], 'RuntimeError')
        self.assertEqual(body['message'], 'boom')
        self.assert_message_logged(
            logging.ERROR, 'failed with 500: Internal Server Error')

    def test_that_errors_name_the_served_representation(self):
        self.post_series([[1.0, 2.0]])
        for record, message in self.recorder.emitted:
            if record.levelno == logging.WARNING and \
                    'on the DPRR model failed with 400' in message:
                break
        else:
            self.fail('no warning names the DPRR model in %r'
                      % (self.recorder.emitted,))

    def test_that_access_log_records_the_predicted_label(self):
        access = logging.getLogger('tornado.access')
        self.addCleanup(access.setLevel, access.level)
        access.setLevel(logging.INFO)
        instance = small_dataset().test[0]
        self.post_series(instance.series.tolist())
        label = small_model().predict(instance)
        messages = [message for record, message in self.recorder.emitted
                    if record.name == 'tornado.access']
        self.assertTrue(any(m.startswith('POST /predict 200 label={} '.format(
            label)) for m in messages), messages)

    def test_that_unknown_routes_keep_tornado_defaults(self):
        response = self.fetch('/missing')
        self.assertEqual(response.code, 404)


class TracebackServiceTests(testing.AsyncHTTPTestCase):

    def get_app(self):
        return service.Application(small_model(), serve_traceback=True,
                                   server_header='dfr-test')

    def test_that_traceback_is_served_when_enabled(self):
        with mock.patch.object(pipeline.Model, 'represent',
                               side_effect=RuntimeError('boom')):
            response = self.fetch('/predict', method='POST',
                                  body=json.dumps({'series': [[1.0]]}))
        self.assertEqual(response.code, 500)
        self.assertEqual(response.headers['Server'], 'dfr-test')
        body = json.loads(response.body.decode('utf-8'))
        self.assertIn('RuntimeError: boom', ''.join(body['traceback']))


class DrsServiceTests(testing.AsyncHTTPTestCase):

    def get_app(self):
        return service.Application(small_model('DRS'))

    def test_that_drs_predictions_report_votes(self):
        instance = small_dataset().test[1]
        response = self.fetch('/predict', method='POST', body=json.dumps(
            {'series': instance.series.tolist()}))
        self.assertEqual(response.code, 200)
        body = json.loads(response.body.decode('utf-8'))
        self.assertEqual(sum(body['votes'].values()), instance.length)
        self.assertEqual(body['label'], small_model('DRS').predict(instance))


class RunnerTests(MockHelper, unittest.TestCase):

    def setUp(self):
        super().setUp()
        self.application = mock.Mock()
        self.application.settings = {'xheaders': False,
                                     'max_body_size': 2048}
        self.io_loop = mock.Mock()
        self.io_loop.time.return_value = 10.0
        ioloop_module = self.start_mock('sprockets.dfr.runner.ioloop')
        ioloop_module.IOLoop.current.return_value = self.io_loop
        self.http_server = mock.Mock(spec=httpserver.HTTPServer)
        self.httpserver_module = \
            self.start_mock('sprockets.dfr.runner.httpserver')
        self.httpserver_module.HTTPServer.return_value = self.http_server
        self.signal_module = self.start_mock('sprockets.dfr.runner.signal')

    def test_that_run_starts_ioloop(self):
        runner.Runner(self.application).run(8000)
        self.io_loop.start.assert_called_once_with()

    def test_that_http_server_settings_are_used(self):
        runner.Runner(self.application).run(8000)
        self.httpserver_module.HTTPServer.assert_called_once_with(
            self.application, xheaders=False, max_body_size=2048)
        self.http_server.listen.assert_called_once_with(8000)

    def test_that_signal_handler_invokes_shutdown(self):
        server = runner.Runner(self.application)
        server.run(8000)
        self.signal_module.signal.assert_any_call(
            self.signal_module.SIGINT, server._on_signal)
        self.signal_module.signal.assert_any_call(
            self.signal_module.SIGTERM, server._on_signal)
        server._on_signal(self.signal_module.SIGINT, mock.Mock())
        self.io_loop.add_callback_from_signal.assert_called_once_with(
            server._shutdown)

    def test_that_shutdown_stops_after_timelimit(self):
        server = runner.Runner(self.application)
        server.shutdown_limit = 0.25
        server.run(8000)
        server._shutdown()
        self.http_server.stop.assert_called_once_with()
        self.io_loop.add_timeout.assert_called_once_with(
            10.25, self.io_loop.stop)
        self.io_loop.add_callback.assert_called_once_with(
            server._stop_when_idle)


@requires_dataset('arab')
class ArabRepresentationTests(unittest.TestCase):
    """Published representation comparison on ARAB at m=5."""

    @classmethod
    def setUpClass(cls):
        cls.rows = reproduce.representation_rows(
            DATA_DIR, degrees=[5], jobs=pipeline.default_jobs())

    def test_that_dataset_shape_matches_publication(self):
        arab = dataset.load(DATA_DIR / 'arab.jsonl')
        self.assertEqual(reproduce.check_shape(arab, 'ARAB'), [])

    def test_that_accuracies_are_within_tolerance(self):
        for row in self.rows:
            self.assertEqual(row.status, 'ok', row.message)
            self.assertTrue(row.within, row.to_dict())

    def test_that_representations_rank_as_published(self):
        self.assertTrue(reproduce.ordering_holds(self.rows, 5))


class PublishedPresetTests(unittest.TestCase):
    """Per-dataset preset spot checks, run when the data is available."""

    def check(self, name, kinds):
        rows = reproduce.method_rows(DATA_DIR, datasets=[name], kinds=kinds,
                                     jobs=pipeline.default_jobs())
        for row in rows:
            self.assertEqual(row.status, 'ok', row.message)
            self.assertTrue(row.within, row.to_dict())

    @requires_dataset('arab')
    def test_that_arab_dprr_matches(self):
        self.check('ARAB', ['DPRR'])

    @requires_dataset('jpvow')
    def test_that_jpvow_dprr_matches(self):
        self.check('JPVOW', ['DPRR'])

    @requires_dataset('ecg')
    def test_that_ecg_drs_and_dprr_match(self):
        self.check('ECG', ['DRS', 'DPRR'])


if __name__ == '__main__':
    unittest.main()
