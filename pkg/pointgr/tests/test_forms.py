import tempfile
from pathlib import Path

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from pointgr.forms import (
    ModelSpecForm,
    TrainConfigForm,
    load_config,
    read_key_values,
    validate_values,
    write_key_values,
)


class KeyValueFileTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / 'train.cfg'

    def test_comments_and_spaces(self):
        self.path.write_text('# обучение\n\nlr = 0.05\n  epochs=3  \n', encoding='utf-8')
        self.assertEqual(read_key_values(self.path), {'lr': '0.05', 'epochs': '3'})

    def test_write_then_read(self):
        write_key_values({'task': 'classification', 'fc': '512, 256'}, self.path)
        self.assertEqual(read_key_values(self.path), {'task': 'classification', 'fc': '512, 256'})

    def test_line_without_equals_names_location(self):
        self.path.write_text('lr = 0.1\nepochs 3\n', encoding='utf-8')
        with self.assertRaises(ValidationError) as ctx:
            read_key_values(self.path)
        self.assertIn(f'{self.path}:2', ctx.exception.messages[0])

    def test_duplicate_key(self):
        self.path.write_text('lr = 0.1\nlr = 0.2\n', encoding='utf-8')
        with self.assertRaises(ValidationError):
            read_key_values(self.path)

    def test_missing_file(self):
        with self.assertRaises(ValidationError):
            read_key_values(self.path)


class TrainConfigFormTests(SimpleTestCase):
    def test_only_given_keys_are_returned(self):
        values = validate_values(TrainConfigForm, {'lr': '0.05', 'scheduler': 'constant'})
        self.assertEqual(values, {'lr': 0.05, 'scheduler': 'constant'})

    def test_lr_must_exceed_floor(self):
        with self.assertRaises(ValidationError) as ctx:
            validate_values(TrainConfigForm, {'lr': '0.01', 'lr_min': '0.1'}, source='train.cfg')
        self.assertIn('lr_min', ctx.exception.messages[0])
        self.assertIn('train.cfg', ctx.exception.messages[0])

    def test_zero_lr(self):
        with self.assertRaises(ValidationError):
            validate_values(TrainConfigForm, {'lr': '0'})

    def test_unknown_precision(self):
        with self.assertRaises(ValidationError):
            validate_values(TrainConfigForm, {'precision': 'f16'})


class ModelSpecFormTests(SimpleTestCase):
    def test_width_lists(self):
        values = validate_values(ModelSpecForm, {'task': 'partseg', 'classes': '4', 'head': '32, 16', 'categories': '2'})
        self.assertEqual(values['head'], (32, 16))
        self.assertEqual(values['classes'], 4)

    def test_bad_width_list(self):
        for text in ('64, x', '0, 8'):
            with self.assertRaises(ValidationError):
                validate_values(ModelSpecForm, {'task': 'classification', 'classes': '3', 'fc': text})

    def test_task_specific_keys(self):
        with self.assertRaises(ValidationError):
            validate_values(ModelSpecForm, {'task': 'classification', 'classes': '3', 'categories': '2'})
        with self.assertRaises(ValidationError):
            validate_values(ModelSpecForm, {'task': 'sceneseg', 'classes': '13', 'fc': '64'})

    def test_classes_required(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'model.cfg'
            path.write_text('task = classification\n', encoding='utf-8')
            with self.assertRaises(ValidationError) as ctx:
                load_config(ModelSpecForm, path)
        self.assertIn('classes', ctx.exception.messages[0])
