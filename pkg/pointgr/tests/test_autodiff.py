import math
import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose, assert_array_equal

from pointgr.autodiff import (
    EVAL,
    BatchNormState,
    TRAIN,
    DiffNode,
    Engine,
    ParamStore,
    add,
    batch_norm,
    concat,
    dropout,
    expand_points,
    leaky_relu,
    linear_per_point,
    make_node,
    max_over_axis,
    mean_over_axis,
    relu,
    softmax_cross_entropy,
)
from pointgr.autodiff.gradcheck import gradcheck
from pointgr.autodiff.weights_io import decode_weights, encode_weights, read_weights, write_weights
from pointgr.exceptions import DimensionError, FormatError, LabelError, NonFiniteError

from .helpers import project

SEEDS = range(20)


class LinearPerPointTests(SimpleTestCase):
    def setUp(self):
        self.engine = Engine('f64')

    def test_identity_weights(self):
        x = self.engine.constant([[1, 2]])
        out = linear_per_point(x, self.engine.constant(np.eye(2)), self.engine.constant([0, 0]))
        assert_array_equal(out.value, [[1, 2]])

    def test_zero_weights_bias_only(self):
        x = self.engine.constant([[1, 2]])
        out = linear_per_point(x, self.engine.constant(np.zeros((2, 2))), self.engine.constant([3, 4]))
        assert_array_equal(out.value, [[3, 4]])

    def test_shape_mismatch_names_both_shapes(self):
        x = self.engine.constant(np.ones((2, 3)))
        w = self.engine.constant(np.ones((4, 2)))
        with self.assertRaises(DimensionError) as ctx:
            linear_per_point(x, w)
        self.assertIn('(2, 3)', str(ctx.exception))
        self.assertIn('(4, 2)', str(ctx.exception))

    def test_seed_7_gradients_match_finite_differences(self):
        rng = np.random.default_rng(7)
        x = self.engine.variable(rng.normal(size=(4, 3)))
        w = self.engine.variable(rng.normal(size=(3, 2)))
        b = self.engine.variable(rng.normal(size=2))
        weights = rng.normal(size=(4, 2))

        def fn():
            out = linear_per_point(x, w, b)
            return project(out, weights)

        self.assertLessEqual(gradcheck(fn, [x, w, b]), 1e-6)


class BatchNormTests(SimpleTestCase):
    def setUp(self):
        self.engine = Engine('f64')
        self.params = ParamStore(self.engine)

    def test_eval_with_init_stats_keeps_standardized_input(self):
        self.params.batch_norm('bn', 4)
        rng = np.random.default_rng(0)
        raw = rng.normal(size=(2, 8, 4))
        raw = (raw - raw.mean(axis=(0, 1))) / raw.std(axis=(0, 1))
        out = batch_norm(self.engine.constant(raw), self.params.bn_state('bn'), EVAL)
        assert_allclose(out.value, raw / math.sqrt(1.0 + 1e-5), atol=1e-6)
        assert_allclose(out.value, raw, atol=1e-4)

    def test_constant_channel_gives_beta(self):
        self.params.batch_norm('bn', 3)
        state = self.params.bn_state('bn')
        state.beta.value[...] = [0.5, -1.0, 2.0]
        out = batch_norm(self.engine.constant(np.full((2, 5, 3), 3.0)), state, TRAIN)
        assert_array_equal(out.value, np.broadcast_to([0.5, -1.0, 2.0], (2, 5, 3)))

    def test_train_mode_statistics(self):
        rng = np.random.default_rng(1)
        self.params.batch_norm('bn', 4)
        state = self.params.bn_state('bn')
        state.gamma.value[...] = rng.uniform(0.5, 2.0, size=4)
        state.beta.value[...] = rng.normal(size=4)
        out = batch_norm(self.engine.constant(rng.normal(size=(2, 8, 4))), state, TRAIN).value
        assert_allclose(out.mean(axis=(0, 1)), state.beta.value, atol=1e-5)
        assert_allclose(out.std(axis=(0, 1)), state.gamma.value, atol=1e-4)

    def test_running_stats_follow_momentum(self):
        self.params.batch_norm('bn', 2)
        state = self.params.bn_state('bn')
        x = np.array([[1.0, 2.0], [3.0, 6.0]])
        batch_norm(self.engine.constant(x), state, TRAIN)
        assert_allclose(state.running_mean.value, 0.1 * x.mean(axis=0))
        assert_allclose(state.running_var.value, 0.9 + 0.1 * x.var(axis=0))

    def test_channel_mismatch(self):
        self.params.batch_norm('bn', 3)
        with self.assertRaises(DimensionError):
            batch_norm(self.engine.constant(np.ones((2, 4))), self.params.bn_state('bn'), TRAIN)


class ElementaryOpTests(SimpleTestCase):
    def setUp(self):
        self.engine = Engine('f64')

    def test_relu(self):
        assert_array_equal(relu(self.engine.constant([-1, 0, 2])).value, [0, 0, 2])

    def test_leaky_relu_slope(self):
        assert_allclose(leaky_relu(self.engine.constant([-1.0, 2.0])).value, [-0.2, 2.0])

    def test_uniform_logits_cross_entropy_is_ln_m(self):
        loss = softmax_cross_entropy(self.engine.constant([[0, 0, 0]]), [0])
        self.assertAlmostEqual(float(loss.value), math.log(3), places=12)

    def test_cross_entropy_label_out_of_range(self):
        with self.assertRaises(LabelError):
            softmax_cross_entropy(self.engine.constant([[0, 0, 0]]), [3])

    def test_max_gradient_routes_to_argmax(self):
        x = self.engine.variable([3, 1, 4])
        max_over_axis(x, axis=0).backward()
        assert_array_equal(x.grad, [0, 0, 1])

    def test_max_tie_goes_to_first_index(self):
        x = self.engine.variable([4, 1, 4])
        max_over_axis(x, axis=0).backward()
        assert_array_equal(x.grad, [1, 0, 0])

    def test_max_over_empty_axis(self):
        with self.assertRaises(DimensionError):
            max_over_axis(self.engine.constant(np.ones((2, 0))), axis=1)

    def test_concat_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            concat([self.engine.constant(np.ones((2, 3))), self.engine.constant(np.ones((3, 3)))], axis=1)

    def test_non_finite_result_is_an_error(self):
        with self.assertRaises(NonFiniteError):
            linear_per_point(self.engine.constant([[1e308, 1e308]]), self.engine.constant([[1e308], [1e308]]))

    @override_settings(POINTGR={'CHECK_FINITE': False})
    def test_finite_check_can_be_disabled(self):
        out = linear_per_point(self.engine.constant([[1e308, 1e308]]), self.engine.constant([[1e308], [1e308]]))
        self.assertTrue(np.isinf(out.value).all())

    def test_dropout_is_identity_in_eval(self):
        x = self.engine.constant(np.ones((4, 4)))
        self.assertIs(dropout(x, 0.5, np.random.default_rng(0), EVAL), x)

    def test_dropout_keeps_expectation(self):
        x = self.engine.constant(np.ones((200, 200)))
        out = dropout(x, 0.5, np.random.default_rng(0), TRAIN).value
        self.assertAlmostEqual(out.mean(), 1.0, delta=0.02)
        self.assertTrue(set(np.unique(out)) <= {0.0, 2.0})


class GraphTraversalTests(SimpleTestCase):
    def test_each_node_backward_runs_once(self):
        engine = Engine('f64')
        x = engine.variable([1.0, -2.0, 3.0])
        calls = []

        def backward(grad):
            calls.append(1)
            x.accumulate(grad)

        shared = make_node(x.value.copy(), (x,), backward, 'identity')
        out = add(shared, shared)
        project(out, np.ones(3)).backward()
        self.assertEqual(len(calls), 1)
        assert_array_equal(x.grad, [2.0, 2.0, 2.0])

    def test_grad_starts_at_zero_with_value_shape(self):
        node = Engine('f32').variable(np.ones((2, 3)))
        self.assertEqual(node.grad.shape, (2, 3))
        self.assertFalse(node.grad.any())

    def test_precision_switch(self):
        self.assertEqual(Engine('f32').constant([1.0]).dtype, np.float32)
        self.assertEqual(Engine('f64').constant([1.0]).dtype, np.float64)
        with self.assertRaises(ValueError):
            Engine('f16')

    def test_deterministic_outputs(self):
        def run():
            engine = Engine('f32')
            rng = np.random.default_rng(3)
            x = engine.constant(rng.normal(size=(5, 4)))
            w = engine.constant(rng.normal(size=(4, 6)))
            return leaky_relu(linear_per_point(x, w)).value

        assert_array_equal(run(), run())


class OpGradientTests(SimpleTestCase):
    """Аналитические градиенты против центральных разностей, 20 зёрен на операцию."""

    def check(self, build, shapes):
        for seed in SEEDS:
            with self.subTest(seed=seed):
                rng = np.random.default_rng(seed)
                engine = Engine('f64')
                nodes = [engine.variable(rng.normal(size=shape)) for shape in shapes]
                weights_rng = np.random.default_rng(1000 + seed)
                out_shape = build(nodes, np.random.default_rng(seed)).shape
                weights = weights_rng.normal(size=out_shape)

                def fn():
                    return project(build(nodes, np.random.default_rng(seed)), weights)

                self.assertLessEqual(gradcheck(fn, nodes, samples=6, rng=rng), 1e-4)

    def test_linear_per_point(self):
        self.check(lambda n, rng: linear_per_point(n[0], n[1], n[2]), [(2, 5, 3), (3, 4), (4,)])

    def test_batch_norm_train(self):
        def build(nodes, rng):
            x, gamma, beta = nodes
            state = BatchNormState(
                gamma=gamma, beta=beta,
                running_mean=DiffNode(np.zeros(3), requires_grad=False),
                running_var=DiffNode(np.ones(3), requires_grad=False),
            )
            return batch_norm(x, state, TRAIN)

        self.check(build, [(2, 6, 3), (3,), (3,)])

    def test_relu(self):
        self.check(lambda n, rng: relu(n[0]), [(4, 5)])

    def test_leaky_relu(self):
        self.check(lambda n, rng: leaky_relu(n[0]), [(4, 5)])

    def test_max_over_axis(self):
        self.check(lambda n, rng: max_over_axis(n[0], axis=1), [(3, 6, 4)])

    def test_mean_over_axis(self):
        self.check(lambda n, rng: mean_over_axis(n[0], axis=1), [(3, 6, 4)])

    def test_concat(self):
        self.check(lambda n, rng: concat([n[0], n[1]], axis=-1), [(2, 3, 2), (2, 3, 4)])

    def test_add(self):
        self.check(lambda n, rng: add(n[0], n[1]), [(3, 4), (3, 4)])

    def test_expand_points(self):
        self.check(lambda n, rng: expand_points(n[0], 5), [(2, 3)])

    def test_dropout(self):
        self.check(lambda n, rng: dropout(n[0], 0.3, rng, TRAIN), [(5, 4)])

    def test_softmax_cross_entropy(self):
        for seed in SEEDS:
            with self.subTest(seed=seed):
                rng = np.random.default_rng(seed)
                logits = Engine('f64').variable(rng.normal(size=(3, 4, 5)))
                fixed = rng.integers(0, 5, size=(3, 4))
                self.assertLessEqual(gradcheck(lambda: softmax_cross_entropy(logits, fixed), [logits]), 1e-4)

    def test_label_smoothing_gradient(self):
        rng = np.random.default_rng(0)
        logits = Engine('f64').variable(rng.normal(size=(4, 3)))
        labels = np.array([0, 1, 2, 1])
        self.assertLessEqual(gradcheck(lambda: softmax_cross_entropy(logits, labels, 0.2), [logits]), 1e-4)


class ParamStoreTests(SimpleTestCase):
    def test_linear_3_to_4_with_bias_has_16_parameters(self):
        params = ParamStore(Engine('f32'))
        params.linear('fc', 3, 4, np.random.default_rng(0))
        self.assertEqual(params.count_trainable(), 16)

    def test_running_stats_are_not_trainable(self):
        params = ParamStore(Engine('f32'))
        params.batch_norm('bn', 8)
        self.assertEqual(params.count_trainable(), 16)
        self.assertEqual(len(params), 4)

    def test_iteration_is_lexicographic(self):
        params = ParamStore(Engine('f32'))
        for name in ('b.weight', 'a.weight', 'c.weight'):
            params.add(name, np.zeros(1))
        self.assertEqual([entry.name for entry in params], ['a.weight', 'b.weight', 'c.weight'])

    def test_duplicate_name(self):
        params = ParamStore(Engine('f32'))
        params.add('w', np.zeros(1))
        with self.assertRaises(ValueError):
            params.add('w', np.zeros(1))

    def test_load_arrays_rejects_wrong_shape(self):
        params = ParamStore(Engine('f32'))
        params.add('w', np.zeros((2, 2)))
        with self.assertRaises(ValidationError):
            params.load_arrays({'w': np.zeros((3, 2))})


class WeightsFormatTests(SimpleTestCase):
    def test_round_trip_is_bit_exact(self):
        rng = np.random.default_rng(0)
        arrays = {
            'a.weight': rng.normal(size=(3, 4)).astype(np.float32),
            'b.bias': rng.normal(size=5),
            'c.scalar': np.array(1.5),
        }
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'w.pgrw'
            write_weights(arrays, path)
            restored = read_weights(path)
        self.assertEqual(sorted(restored), sorted(arrays))
        for name, array in arrays.items():
            self.assertEqual(restored[name].dtype, array.dtype)
            self.assertEqual(restored[name].tobytes(), array.tobytes())

    def test_truncated_container(self):
        data = encode_weights({'w': np.zeros((4, 4), dtype=np.float32)})
        with self.assertRaises(FormatError) as ctx:
            decode_weights(data[:-10])
        self.assertIn('10', str(ctx.exception))

    def test_bad_magic(self):
        data = encode_weights({'w': np.zeros(2, dtype=np.float32)})
        with self.assertRaises(FormatError):
            decode_weights(b'XXXX' + data[4:])

    def test_undecodable_name_names_file(self):
        data = bytearray(encode_weights({'w': np.zeros(2, dtype=np.float32)}))
        # сигнатура, версия, число записей и длина имени занимают 12 байт
        data[12] = 0xFF
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'broken.pgrw'
            path.write_bytes(bytes(data))
            with self.assertRaises(FormatError) as ctx:
                read_weights(path)
        self.assertIn('broken.pgrw', str(ctx.exception))
        self.assertIn('UTF-8', str(ctx.exception))
