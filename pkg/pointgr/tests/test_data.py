import tempfile
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from pointgr.data import (
    DatasetManifest,
    PointCloud,
    SampleRecord,
    make_synthetic_classification,
    make_synthetic_partseg,
    make_synthetic_rooms,
    make_synthetic_sceneseg,
    read_header,
    read_sample,
    split_room_into_blocks,
    uniform_sample,
    write_sample,
)
from pointgr.data.pgrc import decode_sample, encode_sample
from pointgr.data.synthetic import sample_shape
from pointgr.exceptions import EmptyResultError, FormatError


class PGRCFormatTests(SimpleTestCase):
    def test_round_trip_is_bit_identical(self):
        rng = np.random.default_rng(0)
        cloud = PointCloud(points=rng.normal(size=(128, 3)), class_label=7)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'cloud.pgrc'
            write_sample(cloud, path)
            restored = read_sample(path)
            self.assertEqual(encode_sample(restored), path.read_bytes())
        self.assertEqual(restored.points.tobytes(), cloud.points.tobytes())
        self.assertEqual(restored.class_label, 7)
        self.assertIsNone(restored.part_labels)

    def test_round_trip_with_parts_and_category(self):
        rng = np.random.default_rng(1)
        cloud = PointCloud(points=rng.normal(size=(16, 9)), part_labels=rng.integers(0, 50, 16), category=3)
        restored = decode_sample(encode_sample(cloud))
        assert_array_equal(restored.part_labels, cloud.part_labels)
        self.assertEqual(restored.category, 3)
        self.assertIsNone(restored.class_label)

    def test_truncated_file_names_missing_bytes(self):
        data = encode_sample(PointCloud(points=np.zeros((10, 3))))
        with self.assertRaises(FormatError) as ctx:
            decode_sample(data[:-7])
        self.assertIn('7', str(ctx.exception))

    def test_truncated_file_error_names_path(self):
        data = encode_sample(PointCloud(points=np.zeros((10, 3))))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'cut.pgrc'
            path.write_bytes(data[:-4])
            with self.assertRaises(FormatError) as ctx:
                read_sample(path)
        self.assertIn('cut.pgrc', str(ctx.exception))

    def test_bad_magic(self):
        data = encode_sample(PointCloud(points=np.zeros((2, 3))))
        with self.assertRaises(FormatError):
            decode_sample(b'PGRX' + data[4:])

    def test_part_labels_length_mismatch(self):
        with self.assertRaises(ValidationError):
            PointCloud(points=np.zeros((4, 3)), part_labels=[0, 1, 2])

    def test_cloud_invariants(self):
        with self.assertRaises(ValidationError):
            PointCloud(points=np.zeros((4, 2)))
        with self.assertRaises(ValidationError):
            PointCloud(points=np.zeros((0, 3)))
        with self.assertRaises(ValidationError):
            PointCloud(points=[[np.nan, 0, 0]])

    def test_header(self):
        cloud = PointCloud(points=np.zeros((5, 3)), class_label=2, category=1)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'cloud.pgrc'
            write_sample(cloud, path)
            header = read_header(path)
        self.assertEqual((header['N'], header['C'], header['class_label'], header['category']), (5, 3, 2, 1))
        self.assertFalse(header['has_part_labels'])


class UniformSampleTests(SimpleTestCase):
    def setUp(self):
        self.cloud = PointCloud(points=np.arange(3000, dtype=np.float64).reshape(1000, 3), part_labels=np.arange(1000))

    def test_n_equal_to_size_is_permutation(self):
        sampled = uniform_sample(self.cloud, 1000, seed=0)
        assert_array_equal(np.sort(sampled.part_labels), np.arange(1000))
        assert_array_equal(sampled.points[:, 0], sampled.part_labels * 3)

    def test_single_point_frequencies(self):
        cloud = PointCloud(points=np.eye(3))
        rng = np.random.default_rng(0)
        counts = np.zeros(3)
        for _ in range(10000):
            picked = uniform_sample(cloud, 1, rng).points[0]
            counts[int(np.argmax(picked))] += 1
        assert_allclose(counts / 10000, [1 / 3] * 3, atol=0.02)

    def test_more_points_than_cloud(self):
        sampled = uniform_sample(self.cloud, 2048, seed=1)
        self.assertEqual(sampled.num_points, 2048)
        self.assertEqual(set(sampled.part_labels.tolist()), set(range(1000)))
        self.assertTrue(np.isin(sampled.points[:, 0], self.cloud.points[:, 0]).all())

    def test_rejects_zero(self):
        with self.assertRaises(ValidationError):
            uniform_sample(self.cloud, 0, seed=0)


class SyntheticTests(SimpleTestCase):
    def test_classification_counts(self):
        manifest = make_synthetic_classification(50, 256, seed=0)
        self.assertEqual(len(manifest.records), 150)
        self.assertEqual(manifest.num_classes, 3)
        self.assertEqual(len(manifest.split('test')), 30)
        self.assertTrue(all(record.cloud.num_points == 256 for record in manifest.records))

    def test_sphere_before_noise_lies_on_radius(self):
        points = sample_shape('sphere', 500, np.random.default_rng(0))
        self.assertLessEqual(np.abs(np.linalg.norm(points, axis=1) - 1.0).max(), 1e-6)

    def test_cube_and_cylinder_surfaces(self):
        rng = np.random.default_rng(0)
        cube = sample_shape('cube', 500, rng)
        assert_allclose(np.abs(cube).max(axis=1), 1.0)
        cylinder = sample_shape('cylinder', 500, rng)
        radius = np.linalg.norm(cylinder[:, :2], axis=1)
        on_side = np.isclose(radius, 1.0)
        on_caps = np.isclose(np.abs(cylinder[:, 2]), 1.0)
        self.assertTrue((on_side | on_caps).all())

    def test_same_seed_same_bytes(self):
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            make_synthetic_classification(4, 64, seed=5).save(first)
            make_synthetic_classification(4, 64, seed=5).save(second)
            files = sorted(p.relative_to(first) for p in Path(first).rglob('*') if p.is_file())
            self.assertTrue(files)
            for name in files:
                self.assertEqual((Path(first) / name).read_bytes(), (Path(second) / name).read_bytes())

    def test_partseg_labels_match_category(self):
        manifest = make_synthetic_partseg(5, 128, seed=0)
        self.assertEqual(len(manifest.records), 10)
        self.assertEqual(manifest.num_categories, 2)
        for record in manifest.records:
            allowed = set(manifest.category_parts[record.cloud.category])
            self.assertTrue(set(record.cloud.part_labels.tolist()) <= allowed)
            self.assertEqual(len(set(record.cloud.part_labels.tolist())), 2)

    def test_partseg_is_deterministic(self):
        first = make_synthetic_partseg(2, 64, seed=3)
        second = make_synthetic_partseg(2, 64, seed=3)
        for a, b in zip(first.records, second.records):
            assert_array_equal(a.cloud.points, b.cloud.points)
            assert_array_equal(a.cloud.part_labels, b.cloud.part_labels)

    def test_rooms_have_rgb_and_scene_labels(self):
        room = make_synthetic_rooms(1, seed=0)[0]
        self.assertEqual(room.channels, 6)
        self.assertLess(room.part_labels.max(), 13)
        self.assertGreater(room.points[:, 3:6].max(), 1.0)


class ManifestTests(SimpleTestCase):
    def test_save_load_validate(self):
        manifest = make_synthetic_partseg(3, 32, seed=0)
        with tempfile.TemporaryDirectory() as tmp:
            path = manifest.save(tmp)
            loaded = DatasetManifest.load(path)
            loaded.validate()
            self.assertEqual(loaded.task, 'partseg')
            self.assertEqual(loaded.category_parts, {0: [0, 1], 1: [2, 3]})
            self.assertEqual([r.path for r in loaded.records], [r.path for r in manifest.records])
            cloud = loaded.load_cloud(loaded.records[0])
            assert_array_equal(cloud.points, manifest.records[0].cloud.points)

    def test_missing_file_fails_validation(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = make_synthetic_classification(2, 16, seed=0).save(tmp)
            next(Path(tmp).rglob('*.pgrc')).unlink()
            with self.assertRaises(ValidationError):
                DatasetManifest.load(path).validate()

    def test_class_index_out_of_range(self):
        cloud = PointCloud(points=np.zeros((4, 3)), class_label=5)
        manifest = DatasetManifest(
            task='classification', num_classes=3, channels=3,
            records=[SampleRecord(path='a.pgrc', split='train', cloud=cloud)],
        )
        with self.assertRaises(ValidationError):
            manifest.validate()

    def test_malformed_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'manifest.txt'
            path.write_text('task=classification\nchannels=3\n\n', encoding='utf-8')
            with self.assertRaises(ValidationError) as ctx:
                DatasetManifest.load(path)
            self.assertIn('classes', str(ctx.exception))

    def test_fold_by_group(self):
        records = [
            SampleRecord(path=f'{group}/{i}.pgrc', split='train', group=group)
            for group in ('room_00', 'room_01', 'room_02') for i in range(2)
        ]
        manifest = DatasetManifest(task='sceneseg', num_classes=13, channels=9, records=records)
        train, test = manifest.fold('room_01')
        self.assertEqual(len(train), 4)
        self.assertEqual({r.group for r in test}, {'room_01'})
        with self.assertRaises(ValidationError):
            manifest.fold('room_09')


def uniform_room(rng, width=2.0, depth=2.0, count=20000):
    xyz = rng.random((count, 3)) * [width, depth, 3.0]
    rgb = rng.integers(0, 256, size=(count, 3))
    return PointCloud(points=np.column_stack([xyz, rgb]), part_labels=rng.integers(0, 13, size=count))


class SceneBlockTests(SimpleTestCase):
    def setUp(self):
        self.room = uniform_room(np.random.default_rng(0))

    def test_two_by_two_room_gives_four_blocks(self):
        blocks = split_room_into_blocks(self.room, block=1.0, n=8192, seed=0)
        self.assertEqual(len(blocks), 4)
        self.assertEqual({b.origin for b in blocks}, {(float(x), float(y)) for x in self.origins(0) for y in self.origins(1)})
        for scene_block in blocks:
            self.assertEqual(scene_block.points.shape, (8192, 9))

    def origins(self, axis):
        low = self.room.points[:, axis].astype(np.float64).min()
        return (low, low + 1.0)

    def test_column_ranges(self):
        blocks = split_room_into_blocks(self.room, block=1.0, n=4096, seed=0)
        stacked = np.concatenate([b.points for b in blocks])
        self.assertTrue(all(b.points.shape == (4096, 9) for b in blocks))
        self.assertGreaterEqual(stacked[:, :2].min(), 0.0)
        self.assertLessEqual(stacked[:, :2].max(), 1.0)
        self.assertGreaterEqual(stacked[:, 3:6].min(), 0.0)
        self.assertLessEqual(stacked[:, 3:6].max(), 1.0)
        assert_allclose(stacked[:, 6:9].min(axis=0), 0.0, atol=1e-6)
        assert_allclose(stacked[:, 6:9].max(axis=0), 1.0, atol=1e-6)

    def test_union_covers_surviving_points(self):
        blocks = split_room_into_blocks(self.room, block=1.0, n=4096, seed=0)
        covered = np.unique(np.concatenate([b.indices for b in blocks]))
        self.assertGreaterEqual(len(covered) / self.room.num_points, 0.99)

    def test_labels_follow_points(self):
        scene_block = split_room_into_blocks(self.room, block=1.0, n=1024, seed=0)[0]
        assert_array_equal(scene_block.labels, self.room.part_labels[scene_block.indices])

    def test_sparse_blocks_are_discarded(self):
        rng = np.random.default_rng(1)
        dense = rng.random((500, 3)) * [1.0, 1.0, 2.0]
        sparse = rng.random((20, 3)) * [1.0, 1.0, 2.0] + [1.5, 0.0, 0.0]
        xyz = np.concatenate([dense, sparse])
        room = PointCloud(points=np.column_stack([xyz, np.full((520, 3), 0.5)]), part_labels=np.zeros(520))
        blocks = split_room_into_blocks(room, block=1.0, n=256, seed=0)
        self.assertTrue(all(b.indices.max() < 500 for b in blocks))

    def test_no_surviving_blocks(self):
        room = PointCloud(points=np.column_stack([np.random.default_rng(0).random((50, 3)), np.zeros((50, 3))]),
                          part_labels=np.zeros(50))
        with self.assertRaises(EmptyResultError):
            split_room_into_blocks(room, n=64, seed=0)

    def test_overlapping_stride(self):
        blocks = split_room_into_blocks(self.room, block=1.0, n=8192, seed=0, stride=0.5)
        self.assertEqual(len(blocks), 9)

    def test_room_without_rgb(self):
        with self.assertRaises(ValidationError):
            split_room_into_blocks(PointCloud(points=np.zeros((200, 3)), part_labels=np.zeros(200)))

    def test_synthetic_sceneseg_manifest(self):
        manifest = make_synthetic_sceneseg(2, 512, seed=0)
        self.assertEqual(manifest.channels, 9)
        self.assertEqual(manifest.groups(), ['room_00', 'room_01'])
        self.assertTrue(manifest.split('test'))
        self.assertTrue(all(r.cloud.points.shape == (512, 9) for r in manifest.records))
