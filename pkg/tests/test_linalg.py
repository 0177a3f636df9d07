import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toriclg.linalg import (
    CompositionError,
    LinearSolver,
    NoSolutionError,
    RationalMatrix,
    block_matrix,
    cohomology_at,
    det,
    exterior_power,
    inverse,
    kernel_basis,
    lift,
    matrix_from_action,
    rank,
    vector,
)


def mat(rows):
    return RationalMatrix.from_rows(rows)


class TestKernel:
    def test_single_row(self):
        assert kernel_basis(mat([[1, 1]])) == [vector([1, -1])]

    def test_zero_map(self):
        assert kernel_basis(RationalMatrix.zeros(2, 2)) == [vector([1, 0]), vector([0, 1])]

    def test_identity(self):
        assert kernel_basis(RationalMatrix.identity(3)) == []

    def test_empty_shapes(self):
        assert kernel_basis(RationalMatrix.zeros(0, 3)) == [vector([1, 0, 0]), vector([0, 1, 0]), vector([0, 0, 1])]
        assert kernel_basis(RationalMatrix.zeros(3, 0)) == []

    def test_kernel_annihilates(self):
        a = mat([[2, 1, -1], [0, 3, 3]])
        for v in kernel_basis(a):
            assert all(x == 0 for x in a.mul_vec(v))


class TestLift:
    def test_forced(self):
        b = mat([[1], [-1]])
        c = Fraction(7, 2)
        assert lift(b, [c, -c]) == (c,)

    def test_zero_to_zero(self):
        b = mat([[1, 2], [3, 4], [0, 1]])
        assert lift(b, [0, 0, 0]) == (0, 0)

    def test_pivot_choice(self):
        assert lift(mat([[1, 0], [0, 0]]), [5, 0]) == (5, 0)

    def test_no_solution(self):
        with pytest.raises(NoSolutionError):
            lift(mat([[1, 0], [0, 0]]), [0, 1])

    def test_linearity(self):
        rng = random.Random(3)
        b = mat([[1, 2, 0], [0, 1, 1], [1, 3, 1]])
        for _ in range(20):
            x = [Fraction(rng.randint(-5, 5)) for _ in range(3)]
            y = [Fraction(rng.randint(-5, 5)) for _ in range(3)]
            ax, ay = b.mul_vec(x), b.mul_vec(y)
            s = lift(b, [p + q for p, q in zip(ax, ay)])
            assert s == tuple(p + q for p, q in zip(lift(b, ax), lift(b, ay)))


class TestSolver:
    def test_matches_lift(self):
        rng = random.Random(5)
        b = mat([[2, 0, 1], [0, 0, 3]])
        solver = LinearSolver(b)
        for _ in range(10):
            x = [Fraction(rng.randint(-3, 3)) for _ in range(3)]
            a = b.mul_vec(x)
            assert solver.solve(a) == lift(b, a)

    def test_inverse(self):
        m = mat([[2, 1], [1, 1]])
        assert (inverse(m) @ m) == RationalMatrix.identity(2)


class TestCohomologyAt:
    def test_zero_maps(self):
        slot = cohomology_at(RationalMatrix.zeros(4, 0), RationalMatrix.zeros(0, 4))
        assert slot.dim == 4

    def test_exact_segment(self):
        slot = cohomology_at(mat([[1]]), RationalMatrix.zeros(0, 1))
        assert slot.dim == 0

    def test_koszul_middle(self):
        # two-variable contraction complex in the quadratic slice, reduced by hand:
        # wedge^2 -> wedge^1 x (deg-1 polys) -> deg-2 polys
        d2 = mat([[0], [-1], [1], [0]])          # e12 -> x e2 - y e1
        d1 = mat([[1, 0, 0, 0],                  # x e1 -> x^2
                  [0, 1, 1, 0],                  # y e1, x e2 -> xy
                  [0, 0, 0, 1]])                 # y e2 -> y^2
        slot = cohomology_at(d2, d1)
        assert slot.dim == 0

    def test_composition_guard(self):
        with pytest.raises(CompositionError):
            cohomology_at(mat([[1], [0]]), mat([[1, 0]]))

    def test_slot_invariants(self):
        d_in = mat([[1, 0], [0, 0], [0, 0]])
        d_out = RationalMatrix.zeros(0, 3)
        slot = cohomology_at(d_in, d_out)
        assert slot.dim == 2
        for j, rep in enumerate(slot.representatives):
            coords = slot.reduce(rep)
            assert coords == tuple(Fraction(1 if i == j else 0) for i in range(slot.dim))
        assert slot.reduce(d_in.mul_vec([5, 7])) == (0, 0)


class TestExteriorPower:
    def test_identity(self):
        assert exterior_power(RationalMatrix.identity(4), 2) == RationalMatrix.identity(6)

    def test_determinant_top(self):
        m = mat([[1, 2], [3, 4]])
        assert exterior_power(m, 2).entries[(0, 0)] == det(m) == -2


class TestBlockMatrix:
    def test_assembly(self):
        b = block_matrix([1, 2], [2], {(0, 0): mat([[1, 2]]), (1, 0): mat([[3, 4], [5, 6]])})
        assert b.to_rows() == mat([[1, 2], [3, 4], [5, 6]]).to_rows()

    def test_action_builder(self):
        m = matrix_from_action(2, 2, lambda j: {j: Fraction(j + 1)})
        assert m == mat([[1, 0], [0, 2]])


small_entries = st.integers(min_value=-5, max_value=5)


@st.composite
def sparse_matrices(draw, max_dim=6):
    rows = draw(st.integers(min_value=0, max_value=max_dim))
    cols = draw(st.integers(min_value=0, max_value=max_dim))
    entries = {}
    for i in range(rows):
        for j in range(cols):
            if draw(st.booleans()):
                entries[(i, j)] = Fraction(draw(small_entries))
    return RationalMatrix(rows, cols, entries)


@settings(max_examples=120, deadline=None)
@given(sparse_matrices())
def test_rank_nullity(a):
    assert rank(a) + len(kernel_basis(a)) == a.cols


@settings(max_examples=120, deadline=None)
@given(sparse_matrices(max_dim=5), st.lists(small_entries, min_size=5, max_size=5))
def test_lift_roundtrip(b, xs):
    x = [Fraction(v) for v in xs[:b.cols]] + [Fraction(0)] * max(0, b.cols - len(xs))
    a = b.mul_vec(x)
    assert b.mul_vec(lift(b, a)) == a


def test_cohomology_base_change_invariance():
    # dims of ker/im are preserved under a compatible change of basis
    rng = random.Random(17)
    from helpers import random_unimodular

    for _ in range(30):
        nb = rng.randint(1, 5)
        na, nc = rng.randint(0, 4), rng.randint(0, 4)
        d_out = RationalMatrix(nc, nb, {(i, j): Fraction(rng.randint(-2, 2))
                                        for i in range(nc) for j in range(nb)
                                        if rng.random() < 0.5})
        ker = kernel_basis(d_out)
        cols = []
        for _ in range(na):
            col = [Fraction(0)] * nb
            for b in ker:
                c = rng.randint(-2, 2)
                if c:
                    col = [x + c * y for x, y in zip(col, b)]
            cols.append(tuple(col))
        d_in = RationalMatrix.from_columns(cols, rows=nb) if cols else RationalMatrix.zeros(nb, 0)
        base = cohomology_at(d_in, d_out)
        u = RationalMatrix.from_rows(random_unimodular(rng, nb))
        changed = cohomology_at(u @ d_in, d_out @ inverse(u))
        assert base.dim == changed.dim
