import logging
import random
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_models import filtered, tot, verify
from spectral_models.bicomplex import (Bicomplex, checked, compose, cone, hom_space, identity_bimap, is_r_acyclic,
                                       is_r_weq, is_witness_surjective, lift_witness_cycle, loops, nw, page,
                                       page_dim_via_hom, psi, rep_witness_boundary, rep_witness_cycle, suspension,
                                       unit_cell, validate)
from spectral_models.filtered import InvalidComplex
from spectral_models.linalg import QQ, DimensionMismatch, Matrix


logging.disable(logging.CRITICAL)

seeds = st.integers(min_value=0, max_value=10 ** 6)


def random_bicomplex(seed, max_pieces=3):
    return verify.random_bicomplex(random.Random(seed), QQ, max_pieces)


class TestValidation(unittest.TestCase):
    def test_square_must_commute(self):
        one = Matrix.identity(QQ, 1)
        cells = {(0, 0): 1, (0, 1): 1, (-1, 0): 1, (-1, 1): 1}
        A = Bicomplex(QQ, cells, d0={(0, 0): one, (-1, 0): one},
                      d1={(0, 0): one, (0, 1): Matrix.from_rows(QQ, [[2]])})
        self.assertTrue(validate(A))
        with self.assertRaises(InvalidComplex):
            checked(A)

    def test_representing_objects_are_valid(self):
        for r in range(4):
            self.assertEqual([], validate(rep_witness_cycle(r, 0, 0)))
            self.assertEqual([], validate(rep_witness_boundary(r, 0, 0)))

    def test_shapes(self):
        with self.assertRaises(DimensionMismatch):
            Bicomplex(QQ, {(0, 0): 2, (0, 1): 1}, d0={(0, 0): Matrix.identity(QQ, 1)})


class TestPages(unittest.TestCase):
    def test_single_cell(self):
        A = unit_cell(0, 0)
        for r in range(4):
            self.assertEqual({(0, 0): 1}, page(A, r).dims())

    def test_square_is_acyclic(self):
        A = rep_witness_cycle(0, 1, 1)
        self.assertEqual(4, len(page(A, 0).dims()))
        self.assertTrue(page(A, 1).is_zero())

    def test_staircase(self):
        A = rep_witness_cycle(1, 0, 0)
        self.assertEqual({(-1, 0): 1, (0, 0): 1}, page(A, 1).dims())
        self.assertTrue(page(A, 2).is_zero())
        self.assertTrue(is_r_acyclic(A, 1))

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_next_page_is_homology(self, seed):
        A = random_bicomplex(seed)
        for r in range(5):
            self.assertEqual(page(A, r).homology_dims(), page(A, r + 1).dims())

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_witness_pages_match_totalization(self, seed):
        A = random_bicomplex(seed)
        T = tot.tot_pi(A)
        for r in range(5):
            self.assertEqual(page(A, r).dims(), filtered.page(T, r).dims())

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_page_dims_through_hom(self, seed):
        A = random_bicomplex(seed, max_pieces=2)
        for r in range(3):
            E = page(A, r)
            for p, q in sorted(set(E.support()) | set(A.cells)):
                self.assertEqual(E.dim(p, q), page_dim_via_hom(A, r, p, q))


class TestFunctors(unittest.TestCase):
    @settings(max_examples=20, deadline=None)
    @given(seeds, st.integers(0, 3))
    def test_loops_undo_suspension(self, seed, r):
        A = random_bicomplex(seed)
        self.assertEqual(A, loops(suspension(A, r), r))

    def test_hom_between_cells(self):
        count, homs = hom_space(unit_cell(0, 0), unit_cell(0, 0))
        self.assertEqual(1, count)
        self.assertEqual(identity_bimap(unit_cell(0, 0)), homs[0])
        self.assertEqual(0, hom_space(unit_cell(0, 0), unit_cell(1, 0))[0])

    def test_identity_is_weq(self):
        A = rep_witness_cycle(2, 0, 0)
        for r in range(4):
            self.assertTrue(is_r_weq(identity_bimap(A), r))


class TestCones(unittest.TestCase):
    @settings(max_examples=10, deadline=None)
    @given(seeds, st.integers(0, 2))
    def test_cone_is_acyclic(self, seed, r):
        A = random_bicomplex(seed, max_pieces=2)
        self.assertTrue(is_r_acyclic(cone(A, r), r))

    @settings(max_examples=10, deadline=None)
    @given(seeds, st.integers(0, 2))
    def test_psi_is_witness_surjective(self, seed, r):
        A = random_bicomplex(seed, max_pieces=2)
        psi_r = psi(A, r)
        for k in range(r + 1):
            self.assertTrue(is_witness_surjective(psi_r, k))

    def test_nw_drops_top_of_staircase(self):
        self.assertEqual([(0, 0)], nw(1).cells)
        self.assertEqual([(0, 0), (1, 0), (1, 1)], nw(2).cells)

    def test_cone_of_single_cell(self):
        self.assertTrue(is_r_acyclic(cone(unit_cell(0, 0), 1), 1))


class TestLifting(unittest.TestCase):
    def test_lift_through_identity(self):
        A = rep_witness_cycle(2, 0, 0)
        _, homs = hom_space(rep_witness_cycle(2, 0, 0), A)
        for y in homs:
            lift = lift_witness_cycle(identity_bimap(A), 2, 0, 0, y)
            self.assertEqual(y, compose(identity_bimap(A), lift))


if __name__ == '__main__':
    unittest.main()
