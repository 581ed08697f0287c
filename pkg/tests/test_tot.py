import logging
import random
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_models import bicomplex, filtered, verify
from spectral_models.linalg import QQ
from spectral_models.report import PASS
from spectral_models.tot import (Window, WindowCoverage, WindowTooSmall, decompose_l_of_cycle, l_adjoint, l_adjoint_map,
                                 r_adjoint, r_adjoint_map, tot_oplus, tot_pi, transpose_down, transpose_up, unit,
                                 verify_unit_on_cycle)


logging.disable(logging.CRITICAL)

seeds = st.integers(min_value=0, max_value=10 ** 6)


class TestWindow(unittest.TestCase):
    def test_parse(self):
        self.assertEqual(Window(-3, 2, 1), Window.parse("-3:2:1"))
        self.assertEqual(Window(0, 4, 2), Window.parse("0:4"))
        with self.assertRaises(ValueError):
            Window.parse("0")
        with self.assertRaises(ValueError):
            Window(2, 1)

    def test_around(self):
        self.assertEqual(Window(-3, 3, 2), Window.around(filtered.pure(0, 0), 1))
        self.assertEqual(Window(-4, 5, 2), Window.around(filtered.rep_cycle(3, 2, 0), 1))

    def test_widened(self):
        self.assertEqual(Window(-4, 4, 3), Window(-3, 3, 2).widened())


class TestTotalization(unittest.TestCase):
    def test_square_totalizes_to_acyclic_complex(self):
        T = tot_pi(bicomplex.rep_witness_cycle(0, 0, 0))
        self.assertEqual([1, 2, 1], [T.dim(n) for n in T.degrees])
        self.assertTrue(filtered.page(T, 1).is_zero())

    def test_staircase_totalizes_to_cycle(self):
        T = tot_pi(bicomplex.rep_witness_cycle(1, 0, 0))
        self.assertEqual({(-1, 0): 1, (0, 0): 1}, filtered.page(T, 1).dims())
        self.assertTrue(filtered.page(T, 2).is_zero())

    @settings(max_examples=20, deadline=None)
    @given(seeds)
    def test_finite_totalizations_agree(self, seed):
        B = verify.random_bicomplex(random.Random(seed), QQ)
        self.assertEqual(tot_pi(B), tot_oplus(B))


class TestAdjoints(unittest.TestCase):
    def test_window_must_reach_past_the_top_weight(self):
        A = filtered.rep_cycle(1, 0, 0)
        with self.assertRaises(WindowTooSmall):
            l_adjoint(A, Window(-3, 0, 1))
        with self.assertRaises(WindowTooSmall):
            r_adjoint(A, Window(-1, 3, 1))

    def test_empty_complex(self):
        T = l_adjoint(filtered.zero_complex(), Window(0, 1, 1))
        self.assertTrue(T.body.is_zero())

    def test_margin_is_checked(self):
        T = l_adjoint(filtered.rep_cycle(1, 0, 0), Window(-3, 1, 1))
        with self.assertRaises(WindowTooSmall):
            T.page(1)

    def test_transposes_are_inverse(self):
        A = filtered.rep_cycle(1, 0, 0)
        B = bicomplex.rep_witness_cycle(1, 0, 0)
        T = l_adjoint(A, Window(-3, 1, 1))
        _, homs = bicomplex.hom_space(T.body, B)
        for f in homs:
            self.assertEqual(f, transpose_up(transpose_down(f, T), T, B))
        _, maps = filtered.hom_space(A, tot_pi(B))
        for g in maps:
            self.assertEqual(g, transpose_down(transpose_up(g, T, B), T))

    def test_target_must_fit_in_window(self):
        A = filtered.rep_cycle(1, 0, 0)
        T = l_adjoint(A, Window(-1, 1, 1))
        B = bicomplex.unit_cell(-2, 0)
        with self.assertRaises(WindowCoverage):
            transpose_down(bicomplex.zero_bimap(T.body, B), T)

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_unit_transposes_identity(self, seed):
        A = verify.random_filtered_complex(random.Random(seed), QQ, max_pieces=2)
        window = Window.around(A, 1)
        T = l_adjoint(A, window)
        self.assertEqual(bicomplex.identity_bimap(T.body), transpose_up(unit(A, window), T, T.body))

    def test_identity_maps(self):
        A = filtered.rep_cycle(2, 1, 0)
        window = Window.around(A, 2)
        self.assertEqual(bicomplex.identity_bimap(l_adjoint(A, window).body),
                         l_adjoint_map(filtered.identity_map(A), window))
        self.assertEqual(bicomplex.identity_bimap(r_adjoint(A, window).body),
                         r_adjoint_map(filtered.identity_map(A), window))


class TestRepresentingCycles(unittest.TestCase):
    def test_decomposition_summands(self):
        _, summands = decompose_l_of_cycle(1, 0, 0, Window(-5, 2, 2))
        self.assertEqual([(1, 0, 0), (0, -1, -1), (0, -2, -2), (0, -3, -3), (0, -4, -4), (0, -5, -5)],
                         summands)

    def test_decomposition_needs_room(self):
        with self.assertRaises(WindowTooSmall):
            decompose_l_of_cycle(2, 0, 0, Window(-3, 1, 1))

    def test_unit_on_cycles(self):
        for s in (1, 2, 3):
            for p, n in [(0, 0), (1, -1)]:
                report = verify_unit_on_cycle(s, p, n, verify.unit_window(s, p))
                self.assertEqual(PASS, report["status"], report)

    def test_unit_check_needs_margin(self):
        with self.assertRaises(WindowTooSmall):
            verify_unit_on_cycle(2, 0, 0, Window(-10, 2, 1))
        with self.assertRaises(ValueError):
            verify_unit_on_cycle(0, 0, 0, Window(-10, 2, 1))


if __name__ == '__main__':
    unittest.main()
