import logging
import random
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_models import bicomplex, codec, filtered
from spectral_models.bicomplex import BiMap
from spectral_models.config import RunConfig
from spectral_models.linalg import QQ, Field
from spectral_models.model_check import BICOMPLEX, FILTERED, SSet, is_acyclic_fibration
from spectral_models.verify import (DIM_MAX, WEIGHT_RANGE, instance_rng, random_acyclic_fibration, random_bicomplex,
                                    random_chain_map, random_filtered_complex, random_s_set, run, run_suite)


logging.disable(logging.CRITICAL)

seeds = st.integers(min_value=0, max_value=10 ** 6)


def components(pi):
    if isinstance(pi, BiMap):
        return [pi.component(*c) for c in pi.cells]
    return [pi.map(n) for n in pi.degrees]


class TestGenerators(unittest.TestCase):
    def test_same_name_same_instance(self):
        a = random_filtered_complex(instance_rng(7, "pages", 3), QQ)
        b = random_filtered_complex(instance_rng(7, "pages", 3), QQ)
        self.assertEqual(a, b)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_filtered_bounds(self, seed):
        A = random_filtered_complex(random.Random(seed), QQ)
        self.assertEqual([], filtered.validate(A))
        for n in A.degrees:
            self.assertLessEqual(A.dim(n), DIM_MAX)
            for w in A.weights(n):
                self.assertTrue(WEIGHT_RANGE[0] <= w <= WEIGHT_RANGE[1])

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_bicomplex_bounds(self, seed):
        B = random_bicomplex(random.Random(seed), Field(3))
        self.assertEqual([], bicomplex.validate(B))
        self.assertTrue(B.cells)
        for c in B.cells:
            self.assertLessEqual(B.dim(*c), DIM_MAX)

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_random_maps_are_chain_maps(self, seed):
        rng = random.Random(seed)
        A = random_filtered_complex(rng, QQ, max_pieces=2)
        B = random_filtered_complex(rng, QQ, max_pieces=2)
        self.assertEqual([], filtered.validate_map(random_chain_map(rng, A, B)))

    def test_s_sets(self):
        rng = random.Random(1)
        for r in range(4):
            self.assertEqual(r, random_s_set(rng, r, FILTERED).r)
            self.assertIn(0, random_s_set(rng, r, BICOMPLEX))

    @settings(max_examples=10, deadline=None)
    @given(seeds, st.integers(0, 2))
    def test_acyclic_fibrations(self, seed, r):
        rng = random.Random(seed)
        pi = random_acyclic_fibration(rng, QQ, FILTERED, r)
        self.assertTrue(is_acyclic_fibration(pi, SSet(range(r + 1))))

    @settings(max_examples=10, deadline=None)
    @given(seeds, st.integers(0, 2))
    def test_acyclic_bifibrations(self, seed, r):
        rng = random.Random(seed)
        pi = random_acyclic_fibration(rng, QQ, BICOMPLEX, r)
        self.assertTrue(is_acyclic_fibration(pi, SSet(range(r + 1), BICOMPLEX)))

    def test_psi_over_cone_is_acyclic_fibration(self):
        for r in range(3):
            pi = bicomplex.psi(bicomplex.cone(bicomplex.unit_cell(0, 0), r), r)
            self.assertTrue(is_acyclic_fibration(pi, SSet(range(r + 1), BICOMPLEX)), r)

    def test_acyclic_fibrations_are_not_coordinate_projections(self):
        for flavor in (FILTERED, BICOMPLEX):
            entries = set()
            for seed in range(5):
                pi = random_acyclic_fibration(random.Random(seed), QQ, flavor, 1)
                for m in components(pi):
                    entries.update(m[i, j] for i in range(m.rows) for j in range(m.cols))
            self.assertTrue(entries - {0, 1}, flavor)


class TestRun(unittest.TestCase):
    def test_lattice(self):
        report = run("lattice", RunConfig(cases=0, r=2))
        self.assertEqual("pass", report["status"])
        self.assertEqual(0, report["suites"][0]["summary"]["cases"])

    def test_pages_suite(self):
        report = run("pages", RunConfig(cases=3, seed=11))
        self.assertEqual("pass", report["status"], codec.dumps(report))
        self.assertEqual(3, report["suites"][0]["summary"]["cases"])

    def test_unknown_suite(self):
        with self.assertRaises(ValueError):
            run_suite("everything", RunConfig(cases=0))

    def test_report_is_independent_of_jobs(self):
        first = run("stability", RunConfig(cases=2, seed=5, jobs=1))
        second = run("stability", RunConfig(cases=2, seed=5, jobs=2))
        self.assertEqual(codec.dumps(first), codec.dumps(second))


if __name__ == '__main__':
    unittest.main()
