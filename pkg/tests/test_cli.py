import io
import json
import logging
import os
import tempfile
import unittest
from unittest import mock

import spectral_models
from spectral_models import codec


logging.disable(logging.CRITICAL)


class TestMain(unittest.TestCase):
    def run_main(self, *argv):
        """(exit code, parsed stdout report or None)"""
        stdout, stderr = io.StringIO(), io.StringIO()
        with mock.patch("sys.stdout", stdout), mock.patch("sys.stderr", stderr):
            with self.assertRaises(SystemExit) as cm:
                spectral_models.main(list(argv))
        text = stdout.getvalue()
        return cm.exception.code, json.loads(text) if text else None

    def test_lattice_join(self):
        code, report = self.run_main("lattice", "join", "0", "1")
        self.assertEqual(0, code)
        self.assertEqual([1], report["result"])

    def test_lattice_beta_of_json_lower_set(self):
        code, report = self.run_main("lattice", "beta", "[[1],[2],[0,2]]")
        self.assertEqual(0, code)
        self.assertEqual([0, 2], report["result"])

    def test_lattice_arity(self):
        code, _ = self.run_main("lattice", "alpha", "0", "1")
        self.assertEqual(2, code)

    def test_pages_past_convergence(self):
        code, report = self.run_main("pages", codec.fixture_path("z1_00"), "--r", "2")
        self.assertEqual(0, code)
        self.assertEqual([], report["page"]["entries"])

    def test_pages(self):
        code, report = self.run_main("pages", codec.fixture_path("z1_00"), "--r", "1")
        self.assertEqual(0, code)
        self.assertEqual(2, len(report["page"]["entries"]))

    def test_malformed_input(self):
        fd, path = tempfile.mkstemp(suffix=".json")
        with os.fdopen(fd, "w") as f:
            f.write("{not json")
        self.addCleanup(os.remove, path)
        code, report = self.run_main("pages", path)
        self.assertEqual(2, code)
        self.assertIsNone(report)

    def test_document_breaking_grammar(self):
        fd, path = tempfile.mkstemp(suffix=".json")
        with os.fdopen(fd, "w") as f:
            json.dump({"field": "Q", "degrees": [{"n": 0, "dim": 3, "weights": [0]}]}, f)
        self.addCleanup(os.remove, path)
        code, report = self.run_main("pages", path)
        self.assertEqual(2, code)
        self.assertIsNone(report)

    def test_prime_field_document(self):
        code, report = self.run_main("pages", codec.fixture_path("f3_two_step"), "--field", "Fp:3", "--r", "0")
        self.assertEqual(0, code)
        self.assertEqual(3, len(report["page"]["entries"]))

    def test_document_over_other_field(self):
        code, _ = self.run_main("pages", codec.fixture_path("f3_two_step"))
        self.assertEqual(2, code)

    def test_bad_flag_value(self):
        code, _ = self.run_main("pages", codec.fixture_path("z1_00"), "--field", "Fp:4")
        self.assertEqual(2, code)

    def test_check_weq(self):
        code, report = self.run_main("check", codec.fixture_path("identity_z1"), "weq")
        self.assertEqual(0, code)
        self.assertTrue(report["holds"])

    def test_check_fibration_finding(self):
        code, report = self.run_main("check", codec.fixture_path("gamma_1"), "fib", "--s-set", "1")
        self.assertEqual(1, code)
        self.assertFalse(report["holds"])
        self.assertIn("1", report["failing_bidegrees"])

    def test_check_map_out_of_empty_complex(self):
        code, report = self.run_main("check", codec.fixture_path("zero_into_z1"), "acyclic-fib", "--s-set", "0,1")
        self.assertEqual(1, code)
        self.assertIn("1", report["failing_bidegrees"])
        self.assertEqual([], report["weq_failing_bidegrees"])

    def test_check_needs_map(self):
        code, _ = self.run_main("check", codec.fixture_path("z1_00"), "weq")
        self.assertEqual(2, code)

    def test_tot(self):
        code, report = self.run_main("tot", codec.fixture_path("zw1_00"))
        self.assertEqual(0, code)
        self.assertEqual(report["tot_pi"], report["tot_oplus"])

    def test_verify_lattice(self):
        code, report = self.run_main("verify", "lattice", "--cases", "0", "--r", "2")
        self.assertEqual(0, code)
        self.assertEqual("pass", report["status"])

    def test_out_file(self):
        fd, path = tempfile.mkstemp(suffix=".json")
        os.close(fd)
        self.addCleanup(os.remove, path)
        code, report = self.run_main("lattice", "meet", "0,2", "1,2", "--out", path)
        self.assertEqual(0, code)
        self.assertIsNone(report)
        with open(path) as f:
            self.assertEqual([2], json.load(f)["result"])


if __name__ == '__main__':
    unittest.main()
