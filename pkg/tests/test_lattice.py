import logging
import unittest

from hypothesis import given
from hypothesis import strategies as st

from spectral_models.lattice import (MalformedLowerSet, alpha, beta, check_distributive, element, elements,
                                     enumerate_lower_sets, is_join_irreducible, join, join_irreducibles, leq,
                                     lower_set_to_list, meet, reachable, to_list, verify_lattice)


logging.disable(logging.CRITICAL)

sets = st.frozensets(st.integers(0, 5), min_size=1, max_size=4)


def E(*values):
    return frozenset(values)


class TestOperations(unittest.TestCase):
    def test_join(self):
        self.assertEqual(E(1), join([0], [1]))
        self.assertEqual(E(0, 1, 2), join([0, 2], [1, 2]))

    def test_meet(self):
        self.assertEqual(E(2), meet([0, 2], [1, 2]))
        self.assertEqual(E(0), meet([0], [1]))

    def test_elements_are_nonempty_naturals(self):
        with self.assertRaises(ValueError):
            element([])
        with self.assertRaises(ValueError):
            join([-1], [0])

    @given(sets, sets)
    def test_meet_is_never_empty(self, a, b):
        self.assertTrue(meet(a, b))

    @given(sets, sets)
    def test_absorption(self, a, b):
        self.assertEqual(a, join(a, meet(a, b)))
        self.assertEqual(a, meet(a, join(a, b)))


class TestOrder(unittest.TestCase):
    def test_alpha(self):
        self.assertEqual({E(1), E(2), E(0, 2)}, alpha([0, 2]))
        self.assertEqual(frozenset(), alpha([0]))

    def test_beta_inverts_alpha(self):
        self.assertEqual(E(0, 2), beta([[1], [2], [0, 2]]))
        self.assertEqual(E(0), beta([]))

    @given(sets)
    def test_round_trip(self, S):
        self.assertEqual(S, beta(alpha(S)))

    def test_malformed_lower_sets(self):
        with self.assertRaises(MalformedLowerSet):
            beta([[2]])
        with self.assertRaises(MalformedLowerSet):
            beta([[1], [0, 3]])
        with self.assertRaises(MalformedLowerSet):
            beta([[0]])

    def test_leq(self):
        self.assertTrue(leq([2], [0, 2]))
        self.assertFalse(leq([0, 2], [2]))
        self.assertTrue(leq([0, 1], [1, 2]))

    def test_generating_relations(self):
        self.assertTrue(reachable([0], [1]))
        self.assertTrue(reachable([2], [0, 1, 2]))
        self.assertFalse(reachable([1], [0]))


class TestIrreducibles(unittest.TestCase):
    def test_listing(self):
        self.assertEqual({E(1), E(0, 1), E(2), E(0, 2)}, set(join_irreducibles(2)))
        with self.assertRaises(ValueError):
            join_irreducibles(0)

    def test_detection(self):
        self.assertTrue(is_join_irreducible([0, 2]))
        self.assertTrue(is_join_irreducible([2]))
        self.assertFalse(is_join_irreducible([0, 1, 2]))
        self.assertFalse(is_join_irreducible([0]))

    def test_lower_sets(self):
        self.assertEqual(len(elements(2)), len(enumerate_lower_sets(2)))

    def test_lists(self):
        self.assertEqual([0, 2], to_list(E(2, 0)))
        self.assertEqual([[0, 1], [1]], lower_set_to_list(alpha([0, 1])))


class TestExhaustive(unittest.TestCase):
    def test_counts(self):
        self.assertEqual(31, len(elements(4)))
        report = check_distributive(4)
        self.assertEqual(29791, report["triples"])
        self.assertEqual("pass", report["status"])

    def test_bound(self):
        with self.assertRaises(ValueError):
            check_distributive(5)

    def test_verify(self):
        for r in range(4):
            report = verify_lattice(r)
            self.assertEqual("pass", report["status"], report)


if __name__ == '__main__':
    unittest.main()
