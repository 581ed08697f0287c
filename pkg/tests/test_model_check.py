import logging
import unittest

from spectral_models import bicomplex, filtered
from spectral_models.model_check import (BICOMPLEX, FlavorMismatch, Generator, PreconditionFailed, SSet, check_lifting,
                                         fibration_failures, generating_sets, generator, is_acyclic_fibration,
                                         is_fibration, properness_harness, separation_profile,
                                         stability_check_bicomplex, stability_check_filtered)
from spectral_models.report import FAIL, PASS


logging.disable(logging.CRITICAL)


def split_projection(r):
    """A ⊕ C_r(id) → A, an acyclic fibration for every S with max S = r."""
    A, _, _ = filtered.direct_sum(filtered.rep_cycle(1, 0, 0), filtered.pure(1, 0))
    C, _, _ = filtered.cone(filtered.identity_map(filtered.pure(0, -1)), r)
    return filtered.direct_sum(A, C)[2][0]


class TestSSet(unittest.TestCase):
    def test_parse(self):
        S = SSet.parse("3,0,1")
        self.assertEqual([0, 1, 3], S.to_list())
        self.assertEqual(3, S.r)
        self.assertIn(1, S)
        self.assertNotIn(2, S)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            SSet([])
        with self.assertRaises(ValueError):
            SSet([-1, 2])
        with self.assertRaises(ValueError):
            SSet([1, 2], BICOMPLEX)
        with self.assertRaises(ValueError):
            SSet.parse("0,a")


class TestFibrations(unittest.TestCase):
    def test_identity(self):
        f = filtered.identity_map(filtered.rep_cycle(2, 0, 0))
        self.assertTrue(is_fibration(f, SSet([0, 1, 2])))
        self.assertTrue(is_acyclic_fibration(f, SSet([0, 1, 2])))

    def test_flavor_mismatch(self):
        f = filtered.identity_map(filtered.pure(0, 0))
        with self.assertRaises(FlavorMismatch):
            is_fibration(f, SSet([0], BICOMPLEX))

    def test_gamma_fails_only_at_its_index(self):
        g = filtered.gamma_morphism(1, 0, 0)
        self.assertTrue(is_fibration(g, SSet([0, 2])))
        failures = fibration_failures(g, SSet([0, 1]))
        self.assertEqual([1], list(failures))
        self.assertTrue(failures[1])

    def test_zero_map_into_cycle(self):
        f = filtered.zero_map(filtered.zero_complex(), filtered.rep_cycle(1, 0, 0))
        self.assertFalse(is_fibration(f, SSet([1])))

    def test_loop_fibration(self):
        C, _, _ = filtered.cone(filtered.identity_map(filtered.pure(0, 0)), 2)
        self.assertTrue(is_acyclic_fibration(filtered.omega_cone_fibration(C, 2), SSet([0, 1, 2])))

    def test_split_projection(self):
        self.assertTrue(is_acyclic_fibration(split_projection(1), SSet([0, 1])))


class TestSeparation(unittest.TestCase):
    def test_profiles(self):
        for s in range(4):
            report = separation_profile(s)
            self.assertEqual([s], report["failing"])
            self.assertEqual(PASS, report["status"])

    def test_assembled_over_points(self):
        report = separation_profile(2, points=[(0, 0), (1, -1)])
        self.assertEqual([2], report["failing"])


class TestGenerators(unittest.TestCase):
    points = [(0, 0), (1, 0)]

    def test_counts(self):
        S = SSet([0, 1])
        I, J = generating_sets(S, self.points)
        self.assertEqual(len(S) * len(self.points), len(J))
        self.assertEqual(len(self.points) + len(J), len(I))

    def test_acyclic_cofibrations_are_weqs(self):
        _, J = generating_sets(SSet([0, 2]), self.points)
        for j in J:
            self.assertTrue(filtered.is_r_weq(j.morphism, 2))

    def test_cofibrations_are_effective(self):
        I, _ = generating_sets(SSet([1]), self.points)
        for i in I:
            self.assertTrue(filtered.is_effective_mono(i.morphism))

    def test_bicomplex_family(self):
        S = SSet([0, 1], BICOMPLEX)
        I, J = generating_sets(S, self.points)
        self.assertEqual(4, len(J))
        for j in J:
            self.assertTrue(bicomplex.is_r_weq(j.morphism, 1))

    def test_zero_family_must_use_s_in_S(self):
        with self.assertRaises(ValueError):
            generator(SSet([0, 2]), Generator.ZERO, 0, 0, s=1)

    def test_lifting(self):
        q = split_projection(1)
        _, J = generating_sets(SSet([0, 1]), self.points)
        for j in J:
            self.assertEqual(PASS, check_lifting(j, q)["status"])

    def test_lifting_fails_against_non_fibration(self):
        q = filtered.gamma_morphism(1, 0, 0)
        j = generator(SSet([1]), Generator.ZERO, 0, 0)
        self.assertEqual(FAIL, check_lifting(j, q)["status"])

    def test_lifting_needs_zero_family(self):
        with self.assertRaises(ValueError):
            check_lifting(generator(SSet([1]), Generator.PHI, 0, 0), split_projection(1))


class TestStability(unittest.TestCase):
    def test_filtered(self):
        for A in (filtered.zero_complex(), filtered.pure(0, 0), filtered.rep_cycle(1, 0, 0)):
            for r in range(3):
                report = stability_check_filtered(A, r)
                self.assertEqual(PASS, report["status"], report)

    def test_bicomplex(self):
        for A in (bicomplex.zero_bicomplex(), bicomplex.unit_cell(0, 0), bicomplex.rep_witness_cycle(1, 0, 0)):
            for r in range(3):
                report = stability_check_bicomplex(A, r)
                self.assertEqual(PASS, report["status"], report)


class TestProperness(unittest.TestCase):
    def test_identity(self):
        pi = filtered.identity_map(filtered.rep_cycle(1, 0, 0))
        report = properness_harness(pi, SSet([0, 1]), (0, 0))
        self.assertEqual(PASS, report["status"], report)

    def test_split_projection_both_families(self):
        pi = split_projection(1)
        S = SSet([0, 1])
        for cof in [(0, 0), (1, -1), (-1, 0)]:
            self.assertEqual(PASS, properness_harness(pi, S, cof)["status"])
            self.assertEqual(PASS, properness_harness(pi, S, cof, Generator.ZERO, 0)["status"])

    def test_bicomplex(self):
        A = bicomplex.rep_witness_cycle(1, 0, 0)
        C = bicomplex.cone(bicomplex.unit_cell(0, 0), 1)
        pi = bicomplex.direct_sum(A, C)[2][0]
        report = properness_harness(pi, SSet([0, 1], BICOMPLEX), (0, 0))
        self.assertEqual(PASS, report["status"], report)

    def test_precondition(self):
        with self.assertRaises(PreconditionFailed):
            properness_harness(filtered.gamma_morphism(1, 0, 0), SSet([1]), (0, 0))


if __name__ == '__main__':
    unittest.main()
