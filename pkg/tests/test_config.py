import argparse
import logging
import unittest
from unittest import mock

from spectral_models.codec import InputError
from spectral_models.config import CONFIG_KEYS, DEFAULT_CASES, DEFAULT_R, RunConfig
from spectral_models.linalg import QQ, Field
from spectral_models.model_check import BICOMPLEX
from spectral_models.tot import Window


logging.disable(logging.CRITICAL)


def namespace(**kwargs):
    values = {key: None for key in CONFIG_KEYS}
    values.update({"command": "pages", "inputs": ["a.json"], "config": None, "verbose": False})
    values.update(kwargs)
    return argparse.Namespace(**values)


class TestRunConfig(unittest.TestCase):
    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(QQ, config.field)
        self.assertEqual(DEFAULT_R, config.r)
        self.assertFalse(config.r_explicit)
        self.assertEqual([0, 1], config.s_set.to_list())
        self.assertEqual(DEFAULT_CASES, config.cases)
        self.assertEqual(1, config.jobs)
        self.assertIsNone(config.window)

    def test_s_set_follows_r(self):
        config = RunConfig(r=3)
        self.assertTrue(config.r_explicit)
        self.assertEqual([0, 1, 2, 3], config.s_set.to_list())

    def test_parsing(self):
        config = RunConfig(field="Fp:7", s_set="0,2", window="-2:2:1", flavor=BICOMPLEX, r="2")
        self.assertEqual(Field(7), config.field)
        self.assertEqual(BICOMPLEX, config.s_set.flavor)
        self.assertEqual(Window(-2, 2, 1), config.window)
        self.assertEqual(2, config.r)

    def test_invalid_values(self):
        with self.assertRaises(ValueError):
            RunConfig(jobs=0)
        with self.assertRaises(ValueError):
            RunConfig(field="Fp:6")
        with self.assertRaises(ValueError):
            RunConfig(r=-1)
        with self.assertRaises(ValueError):
            RunConfig(seed="abc")
        with self.assertRaises(ValueError):
            RunConfig(s_set="1,2", flavor=BICOMPLEX)
        with self.assertRaises(ValueError):
            RunConfig(window="5:1")
        with self.assertRaises(ValueError):
            RunConfig(flavor="graded")

    def test_to_dict(self):
        config = RunConfig(command="verify", seed=4)
        self.assertEqual("verify", config.to_dict()["command"])
        self.assertEqual(4, config.to_dict()["seed"])
        self.assertEqual("Q", config.to_dict()["field"])


class TestFromArgs(unittest.TestCase):
    def test_flags_only(self):
        config = RunConfig.from_args(namespace(r=2, field="Fp:3"))
        self.assertEqual(2, config.r)
        self.assertEqual(Field(3), config.field)
        self.assertEqual(["a.json"], config.inputs)
        self.assertEqual("pages", config.command)

    @mock.patch("spectral_models.config.read_json")
    def test_config_file(self, mocked_read):
        mocked_read.return_value = {"r": 3, "seed": 9, "field": "Fp:5"}
        config = RunConfig.from_args(namespace(config="defaults.json", r=1))
        mocked_read.assert_called_with("defaults.json")
        # flags win over the file
        self.assertEqual(1, config.r)
        self.assertEqual(9, config.seed)
        self.assertEqual(Field(5), config.field)

    @mock.patch("spectral_models.config.read_json")
    def test_config_file_is_checked(self, mocked_read):
        mocked_read.return_value = {"r": 3, "colour": "blue"}
        with self.assertRaises(InputError):
            RunConfig.from_args(namespace(config="defaults.json"))

    @mock.patch("spectral_models.config.read_json")
    def test_config_file_errors_propagate(self, mocked_read):
        mocked_read.side_effect = InputError("malformed JSON", "defaults.json at byte 3")
        with self.assertRaises(InputError):
            RunConfig.from_args(namespace(config="defaults.json"))


if __name__ == '__main__':
    unittest.main()
