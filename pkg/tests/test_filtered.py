import logging
import random
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_models import verify
from spectral_models.filtered import (ChainMap, FilteredComplex, InvalidComplex, NotStrict, checked, checked_map,
                                      compose, cone, decalage, direct_sum, gamma_morphism, hom_space, identity_map,
                                      is_cycle_surjective, is_effective_mono, is_injective, is_r_acyclic, is_r_weq,
                                      is_strict, kernel, lift_cycle, loops, omega_cone_fibration, page,
                                      page_dim_via_hom, phi, pullback, pure, pushout, rep_cycle, shift, suspension,
                                      validate, zero_complex, zero_map)
from spectral_models.linalg import QQ, DimensionMismatch, Field, Matrix


logging.disable(logging.CRITICAL)

seeds = st.integers(min_value=0, max_value=10 ** 6)


def random_complex(seed, max_pieces=3):
    return verify.random_filtered_complex(random.Random(seed), QQ, max_pieces)


class TestValidation(unittest.TestCase):
    def test_square_zero(self):
        A = FilteredComplex(QQ, {0: [0], 1: [0], 2: [0]},
                            {0: Matrix.identity(QQ, 1), 1: Matrix.identity(QQ, 1)})
        self.assertTrue(validate(A))
        with self.assertRaises(InvalidComplex):
            checked(A)

    def test_differential_must_respect_filtration(self):
        A = FilteredComplex(QQ, {0: [0], 1: [1]}, {0: Matrix.identity(QQ, 1)})
        with self.assertRaises(InvalidComplex):
            checked(A)

    def test_shapes(self):
        with self.assertRaises(DimensionMismatch):
            FilteredComplex(QQ, {0: [0, 1], 1: [0]}, {0: Matrix.identity(QQ, 1)})

    def test_map_must_be_chain_map(self):
        A = rep_cycle(1, 0, 0)
        f = ChainMap(A, A, {0: Matrix.identity(QQ, 1)})
        with self.assertRaises(InvalidComplex):
            checked_map(f)


class TestPages(unittest.TestCase):
    def test_representing_cycle(self):
        A = rep_cycle(1, 0, 0)
        self.assertEqual({(-1, 0): 1, (0, 0): 1}, page(A, 1).dims())
        self.assertTrue(page(A, 2).is_zero())
        self.assertTrue(is_r_acyclic(A, 1))
        self.assertFalse(is_r_acyclic(A, 0))

    def test_same_weight_pair_dies_on_first_page(self):
        A = rep_cycle(0, 0, 0)
        self.assertEqual({(0, 0): 1, (0, 1): 1}, page(A, 0).dims())
        self.assertTrue(page(A, 1).is_zero())

    def test_single_generator_survives(self):
        A = pure(2, 1)
        for r in range(5):
            self.assertEqual({(2, 3): 1}, page(A, r).dims())

    def test_empty(self):
        self.assertTrue(page(zero_complex(), 3).is_zero())
        with self.assertRaises(ValueError):
            page(pure(0, 0), -1)

    def test_prime_field(self):
        F3 = Field(3)
        A = FilteredComplex(F3, {0: [0], 1: [-1]}, {0: Matrix.from_rows(F3, [[3]])})
        self.assertEqual({(-1, 0): 1, (0, 0): 1}, page(A, 5).dims())

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_next_page_is_homology(self, seed):
        A = random_complex(seed)
        for r in range(5):
            self.assertEqual(page(A, r).homology_dims(), page(A, r + 1).dims())

    @settings(max_examples=15, deadline=None)
    @given(seeds)
    def test_page_dims_through_hom(self, seed):
        A = random_complex(seed, max_pieces=2)
        for r in range(3):
            E = page(A, r)
            for p, q in E.support():
                self.assertEqual(E.dim(p, q), page_dim_via_hom(A, r, p, q - p))


class TestFunctors(unittest.TestCase):
    @settings(max_examples=25, deadline=None)
    @given(seeds, st.integers(0, 3))
    def test_decalage_undoes_shift(self, seed, r):
        A = random_complex(seed)
        self.assertEqual(A, decalage(shift(A, r), r))

    @settings(max_examples=25, deadline=None)
    @given(seeds, st.integers(0, 3))
    def test_loops_undo_suspension(self, seed, r):
        A = random_complex(seed)
        self.assertEqual(A, loops(suspension(A, r), r))

    def test_identity_is_weq(self):
        A = rep_cycle(2, 1, 0)
        for r in range(4):
            self.assertTrue(is_r_weq(identity_map(A), r))


class TestCones(unittest.TestCase):
    @settings(max_examples=15, deadline=None)
    @given(seeds, st.integers(0, 3))
    def test_cone_of_identity_is_acyclic(self, seed, r):
        A = random_complex(seed, max_pieces=2)
        C, _, _ = cone(identity_map(A), r)
        self.assertTrue(is_r_acyclic(C, r))

    def test_cone_of_single_generator(self):
        C, _, _ = cone(identity_map(pure(0, 0)), 1)
        self.assertEqual(2, sum(C.dim(n) for n in C.degrees))
        self.assertTrue(page(C, 2).is_zero())

    @settings(max_examples=15, deadline=None)
    @given(seeds, st.integers(0, 3))
    def test_cone_criterion(self, seed, r):
        A = random_complex(seed, max_pieces=2)
        weq = direct_sum(A, rep_cycle(r, 0, 0))[1][0]
        non_weq = direct_sum(A, pure(0, 0))[1][0]
        self.assertTrue(is_r_weq(weq, r))
        self.assertTrue(is_r_acyclic(cone(weq, r)[0], r))
        self.assertFalse(is_r_weq(non_weq, r))
        self.assertFalse(is_r_acyclic(cone(non_weq, r)[0], r))

    def test_loop_fibration_on_acyclic_complex(self):
        C, _, _ = cone(identity_map(rep_cycle(1, 0, 0)), 1)
        pi = omega_cone_fibration(C, 1)
        self.assertEqual(C, pi.target)
        for k in range(2):
            self.assertTrue(is_cycle_surjective(pi, k))


class TestLimits(unittest.TestCase):
    def test_pushout_needs_strict_leg(self):
        g = ChainMap(pure(1, 0), pure(0, 0), {0: Matrix.identity(QQ, 1)})
        self.assertTrue(is_injective(g))
        self.assertFalse(is_strict(g))
        with self.assertRaises(NotStrict):
            pushout(identity_map(pure(1, 0)), g)

    def test_pushout_along_zero(self):
        X = rep_cycle(1, 0, 0)
        P, leg_a, leg_b = pushout(zero_map(zero_complex(), pure(0, 1)), zero_map(zero_complex(), X))
        self.assertEqual(3, sum(P.dim(n) for n in P.degrees))
        self.assertTrue(is_injective(leg_b))

    def test_pullback_of_identities(self):
        A = rep_cycle(1, 0, 0)
        P, leg_a, leg_b = pullback(identity_map(A), identity_map(A))
        self.assertEqual([A.dim(n) for n in A.degrees], [P.dim(n) for n in A.degrees])

    def test_phi_is_effective_mono(self):
        self.assertFalse(is_effective_mono(phi(0, 0, 0)))
        for r in range(1, 4):
            self.assertTrue(is_effective_mono(phi(r, 0, 0)))

    def test_kernel_of_projection(self):
        A = rep_cycle(1, 0, 0)
        B = pure(3, 2)
        total, _, projections = direct_sum(A, B)
        K, _ = kernel(projections[0])
        self.assertEqual([1], [K.dim(n) for n in K.degrees])


class TestLifting(unittest.TestCase):
    def test_lift_through_identity(self):
        A = rep_cycle(2, 0, 0)
        _, homs = hom_space(rep_cycle(2, 0, 0), A)
        for y in homs:
            lift = lift_cycle(identity_map(A), 2, 0, 0, y)
            self.assertEqual(y, compose(identity_map(A), lift))

    def test_gamma_is_not_surjective_on_its_own_cycles(self):
        for s in range(3):
            g = gamma_morphism(s, 0, 0)
            self.assertFalse(is_cycle_surjective(g, s))
            self.assertTrue(is_cycle_surjective(g, s + 1))


if __name__ == '__main__':
    unittest.main()
