import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from pointgr.autodiff import EVAL, TRAIN, Engine, ParamStore
from pointgr.autodiff.gradcheck import gradcheck
from pointgr.exceptions import DimensionError
from pointgr.graph import assemble_edge_features
from pointgr.nets import FLNConfig, PREConfig, edge_features, fln_forward, pre_forward
from pointgr.nets.blocks import add_fln_params, add_pre_params

from .helpers import knn_oracle, project


def pre_block(in_channels=3, k=3, seed=0, zero_branch=False, **options):
    cfg = PREConfig(in_channels=in_channels, k=k, **options)
    params = ParamStore(Engine('f64'))
    add_pre_params(params, 'pre', cfg, np.random.default_rng(seed), zero_branch=zero_branch)
    return cfg, params


def fln_block(in_channels, out_channels, k, seed=0):
    cfg = FLNConfig(in_channels=in_channels, out_channels=out_channels, k=k)
    params = ParamStore(Engine('f64'))
    add_fln_params(params, 'fln1', cfg, np.random.default_rng(seed))
    return cfg, params


class PREConfigTests(SimpleTestCase):
    def test_output_width_defaults_to_edge_width(self):
        self.assertEqual(PREConfig(in_channels=3, k=20).out, 6)
        self.assertEqual(PREConfig(in_channels=9, k=20).out, 18)

    def test_hidden_must_cover_output(self):
        with self.assertRaises(DimensionError):
            PREConfig(in_channels=3, k=20, hidden=4, out=6)
        with self.assertRaises(DimensionError):
            PREConfig(in_channels=2, k=20)


class PREForwardTests(SimpleTestCase):
    def test_output_shape(self):
        cfg, params = pre_block(k=3)
        x = params.engine.constant(np.random.default_rng(1).normal(size=(1, 4, 3)))
        self.assertEqual(pre_forward(x, cfg, params, EVAL).shape, (1, 4, 6))

    def test_zero_branch_reduces_to_skip_path(self):
        cfg, params = pre_block(k=4, zero_branch=True)
        points = np.random.default_rng(2).normal(size=(1, 10, 3))
        out = pre_forward(params.engine.constant(points), cfg, params, EVAL).value

        indices = knn_oracle(points[0], 4)[None]
        pooled = np.maximum(assemble_edge_features(points, indices), 0.0).max(axis=2)
        expected = pooled @ params['pre.point.weight'].value + params['pre.point.bias'].value
        assert_allclose(out, expected, rtol=1e-12, atol=1e-12)

    def test_nine_channel_graph_uses_coordinates(self):
        cfg, params = pre_block(in_channels=9, k=3)
        rng = np.random.default_rng(3)
        block = rng.normal(size=(2, 12, 9))
        out = pre_forward(params.engine.constant(block), cfg, params, EVAL)
        self.assertEqual(out.shape, (2, 12, 18))

    def test_permutation_equivariance(self):
        cfg, params = pre_block(k=5)
        rng = np.random.default_rng(4)
        points = rng.normal(size=(1, 32, 3))
        perm = rng.permutation(32)
        out = pre_forward(params.engine.constant(points), cfg, params, EVAL).value
        permuted = pre_forward(params.engine.constant(points[:, perm]), cfg, params, EVAL).value
        assert_allclose(permuted, out[:, perm], rtol=1e-10, atol=1e-12)

    def test_gradients(self):
        cfg, params = pre_block(k=3, seed=5)
        rng = np.random.default_rng(6)
        x = params.engine.variable(rng.normal(size=(2, 8, 3)))
        weights = rng.normal(size=(2, 8, 6))
        nodes = [x] + [params[name] for name in ('pre.conv1.weight', 'pre.conv2.weight', 'pre.point.weight', 'pre.bn1.gamma')]
        error = gradcheck(lambda: project(pre_forward(x, cfg, params, TRAIN), weights), nodes, samples=12, rng=rng)
        self.assertLessEqual(error, 1e-4)

    def test_wrong_channel_count(self):
        cfg, params = pre_block(k=3)
        with self.assertRaises(DimensionError):
            pre_forward(params.engine.constant(np.zeros((1, 4, 9))), cfg, params, EVAL)


class FLNForwardTests(SimpleTestCase):
    def test_output_shape(self):
        cfg, params = fln_block(6, 64, k=4)
        x = params.engine.constant(np.random.default_rng(7).normal(size=(1, 16, 6)))
        self.assertEqual(fln_forward(x, cfg, params, EVAL, prefix='fln1').shape, (1, 16, 64))

    def test_duplicated_points_get_identical_features(self):
        cfg, params = fln_block(6, 16, k=4)
        features = np.random.default_rng(8).normal(size=(1, 10, 6))
        features[0, 7] = features[0, 2]
        out = fln_forward(params.engine.constant(features), cfg, params, TRAIN, prefix='fln1').value
        assert_allclose(out[0, 7], out[0, 2], rtol=1e-12, atol=1e-12)

    def test_permutation_equivariance(self):
        cfg, params = fln_block(6, 16, k=5)
        rng = np.random.default_rng(9)
        features = rng.normal(size=(1, 24, 6))
        perm = rng.permutation(24)
        out = fln_forward(params.engine.constant(features), cfg, params, EVAL, prefix='fln1').value
        permuted = fln_forward(params.engine.constant(features[:, perm]), cfg, params, EVAL, prefix='fln1').value
        assert_allclose(permuted, out[:, perm], rtol=1e-10, atol=1e-12)

    def test_gradients(self):
        cfg, params = fln_block(4, 8, k=3, seed=10)
        rng = np.random.default_rng(11)
        x = params.engine.variable(rng.normal(size=(2, 8, 4)))
        weights = rng.normal(size=(2, 8, 8))
        nodes = [x, params['fln1.conv.weight'], params['fln1.bn.beta']]
        error = gradcheck(lambda: project(fln_forward(x, cfg, params, TRAIN, prefix='fln1'), weights), nodes, samples=12, rng=rng)
        self.assertLessEqual(error, 1e-4)


class EdgeFeatureOpTests(SimpleTestCase):
    def test_gradient_reaches_center_and_neighbor(self):
        engine = Engine('f64')
        rng = np.random.default_rng(12)
        x = engine.variable(rng.normal(size=(2, 6, 3)))
        indices = np.stack([knn_oracle(item, 3) for item in x.value])
        weights = rng.normal(size=(2, 6, 3, 6))
        error = gradcheck(lambda: project(edge_features(x, indices), weights), [x])
        self.assertLessEqual(error, 1e-6)

    def test_neighbor_gradient_sign(self):
        engine = Engine('f64')
        x = engine.variable(np.array([[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]]))
        indices = np.array([[[0, 1], [1, 0]]])
        out = edge_features(x, indices)
        seed = np.zeros(out.shape)
        seed[0, 0, 1, 3] = 1.0
        out.backward(seed)
        assert_array_equal(x.grad[0, :, 0], [1.0, -1.0])
