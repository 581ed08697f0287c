import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_models.linalg import (QQ, DimensionMismatch, Field, FieldMismatch, Matrix, NotContained, Subspace,
                                    intersect, inverse, kernel_basis, preimage, quotient, rank, solve)


F5 = Field(5)

small_rows = st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4)


class TestField(unittest.TestCase):
    def test_parse(self):
        self.assertEqual(QQ, Field.parse("Q"))
        self.assertEqual("Fp:5", Field.parse("Fp:5").name)
        with self.assertRaises(ValueError):
            Field.parse("Fp:4")
        with self.assertRaises(ValueError):
            Field.parse("R")

    def test_scalars(self):
        self.assertEqual(Fraction(1, 2), QQ("1/2"))
        self.assertEqual(F5(3), F5(Fraction(1, 2)))
        self.assertEqual(F5(0), F5(5))

    def test_mixed_fields(self):
        with self.assertRaises(FieldMismatch):
            Field(5)(1) + Field(7)(1)
        with self.assertRaises(FieldMismatch):
            F5(Field(7)(1))

    def test_division_by_zero(self):
        with self.assertRaises(ZeroDivisionError):
            F5(1) / F5(0)


class TestMatrix(unittest.TestCase):
    def test_shape_is_checked(self):
        with self.assertRaises(DimensionMismatch):
            Matrix(QQ, 2, 2, [[1, 2], [3]])

    def test_rank(self):
        self.assertEqual(1, rank(Matrix.from_rows(QQ, [[1, 2], [2, 4]])))
        self.assertEqual(2, rank(Matrix.from_rows(QQ, [[1, 2], [2, 5]])))
        # 2x2 over F5 with determinant 5
        self.assertEqual(1, rank(Matrix.from_rows(F5, [[1, 2], [2, 9]])))

    def test_solve(self):
        m = Matrix.from_rows(QQ, [[1, 0], [0, 2]])
        self.assertEqual((1, 2), solve(m, (1, 4)))
        self.assertIsNone(solve(Matrix.from_rows(QQ, [[1], [1]]), (1, 2)))

    def test_inverse(self):
        m = Matrix.from_rows(QQ, [[2, 1], [1, 1]])
        self.assertEqual(Matrix.identity(QQ, 2), m @ inverse(m))
        with self.assertRaises(ZeroDivisionError):
            inverse(Matrix.from_rows(QQ, [[1, 1], [1, 1]]))

    @settings(max_examples=50, deadline=None)
    @given(small_rows)
    def test_rank_nullity(self, rows):
        m = Matrix.from_rows(QQ, rows)
        self.assertEqual(m.cols, rank(m) + kernel_basis(m).dim)
        for v in kernel_basis(m).vectors():
            self.assertTrue(all(x == 0 for x in m.apply(v)))


class TestSubspace(unittest.TestCase):
    def test_intersect(self):
        u = Subspace.coordinate(QQ, 3, [0, 1])
        v = Subspace.coordinate(QQ, 3, [1, 2])
        self.assertEqual(Subspace.coordinate(QQ, 3, [1]), intersect(u, v))

    def test_preimage_of_zero_is_kernel(self):
        m = Matrix.from_rows(QQ, [[1, 1, 0], [0, 0, 1]])
        self.assertEqual(kernel_basis(m), preimage(m, Subspace.zero(QQ, 2)))

    def test_quotient(self):
        q = quotient(Subspace.full(QQ, 3), Subspace.coordinate(QQ, 3, [0]))
        self.assertEqual(2, q.dim)
        self.assertEqual((0, 0), tuple(q.classify((5, 0, 0))))
        with self.assertRaises(NotContained):
            quotient(Subspace.coordinate(QQ, 3, [0]), Subspace.coordinate(QQ, 3, [1]))

    @settings(max_examples=50, deadline=None)
    @given(small_rows)
    def test_basis_is_canonical(self, rows):
        forward = Subspace(QQ, 3, rows)
        backward = Subspace(QQ, 3, list(reversed(rows)))
        self.assertEqual(forward, backward)
        self.assertEqual(forward.basis, backward.basis)


if __name__ == '__main__':
    unittest.main()
