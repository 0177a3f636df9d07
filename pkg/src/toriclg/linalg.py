"""Exact rational linear algebra on sparse matrices.

Everything runs over ``fractions.Fraction``; no floating point enters
anywhere.  Elimination follows a fixed pivot rule (scan columns left to
right, take the first remaining row with a nonzero entry), so ranks,
kernel bases, lifts and cohomology representatives are reproducible
across runs and platforms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

Vector = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


class LinalgError(ValueError):
    pass


class NoSolutionError(LinalgError):
    """The right hand side is not in the image of the matrix."""


class CompositionError(LinalgError):
    """Two maps that should compose to zero do not."""


def vector(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def add_vectors(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def sub_vectors(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def scale_vector(c, v: Vector) -> Vector:
    c = Fraction(c)
    return tuple(c * a for a in v)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v, strict=True)), ZERO)


def is_zero_vector(v: Sequence) -> bool:
    return all(a == 0 for a in v)


@dataclass(eq=True)
class RationalMatrix:
    """Sparse matrix over Q.  Instances are treated as immutable.

    ``entries`` maps ``(row, col)`` to a nonzero Fraction; explicit zeros
    are stripped on construction.
    """

    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise LinalgError(f"entry ({i},{j}) outside a {self.rows}x{self.cols} matrix")
            v = Fraction(v)
            if v != 0:
                clean[(i, j)] = v
        self.entries = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RationalMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        ent = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise LinalgError("ragged rows")
            for j, v in enumerate(row):
                v = Fraction(v)
                if v != 0:
                    ent[(i, j)] = v
        return cls(nrows, ncols, ent)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "RationalMatrix":
        ncols = len(columns)
        if rows is None:
            if ncols == 0:
                raise LinalgError("cannot infer row count from zero columns")
            rows = len(columns[0])
        ent = {}
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise LinalgError("ragged columns")
            for i, v in enumerate(col):
                v = Fraction(v)
                if v != 0:
                    ent[(i, j)] = v
        return cls(rows, ncols, ent)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    # -- basic queries -------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not self.entries

    def row_dicts(self) -> list[dict]:
        rows = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def column(self, j: int) -> Vector:
        return tuple(self.entries.get((i, j), ZERO) for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    # -- arithmetic ----------------------------------------------------

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise LinalgError("shape mismatch in +")
        ent = dict(self.entries)
        for key, v in other.entries.items():
            ent[key] = ent.get(key, ZERO) + v
        return RationalMatrix(self.rows, self.cols, ent)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "RationalMatrix":
        c = Fraction(c)
        return RationalMatrix(self.rows, self.cols, {k: c * v for k, v in self.entries.items()})

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise LinalgError(f"shape mismatch in @: {self.shape} @ {other.shape}")
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, []).append((j, v))
        ent: dict[tuple[int, int], Fraction] = {}
        for (i, k), a in self.entries.items():
            for (j, b) in by_row.get(k, ()):
                key = (i, j)
                ent[key] = ent.get(key, ZERO) + a * b
        return RationalMatrix(self.rows, other.cols, ent)

    def mul_vec(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise LinalgError("vector length mismatch")
        out = [ZERO] * self.rows
        for (i, j), a in self.entries.items():
            if v[j]:
                out[i] += a * Fraction(v[j])
        return tuple(out)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


# -- elimination core ---------------------------------------------------


def _rref(rows: list[dict], main_cols: int) -> list[tuple[int, int]]:
    """In-place reduced row echelon form, pivoting only in columns < main_cols.

    Columns >= main_cols ride along as augmented data.  Returns the pivot
    list as (row, col) pairs in order.
    """
    pivots: list[tuple[int, int]] = []
    r = 0
    nrows = len(rows)
    for c in range(main_cols):
        pr = None
        for i in range(r, nrows):
            if rows[i].get(c):
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        if inv != 1:
            rows[r] = {j: inv * v for j, v in rows[r].items()}
        pivot_row = rows[r]
        for i in range(nrows):
            if i == r:
                continue
            f = rows[i].get(c)
            if not f:
                continue
            target = rows[i]
            for j, v in pivot_row.items():
                new = target.get(j, ZERO) - f * v
                if new:
                    target[j] = new
                else:
                    target.pop(j, None)
        pivots.append((r, c))
        r += 1
    return pivots


def rank(a: RationalMatrix) -> int:
    rows = a.row_dicts()
    return len(_rref(rows, a.cols))


def _canonical_sign(v: Vector) -> Vector:
    for x in v:
        if x > 0:
            return v
        if x < 0:
            return tuple(-y for y in v)
    return v


def kernel_basis(a: RationalMatrix) -> list[Vector]:
    """Basis of the null space {x : a x = 0}, in free-column order.

    Each basis vector is normalised so its first nonzero entry is positive.
    """
    rows = a.row_dicts()
    pivots = _rref(rows, a.cols)
    pivot_cols = {c for _, c in pivots}
    basis: list[Vector] = []
    for f in range(a.cols):
        if f in pivot_cols:
            continue
        x = [ZERO] * a.cols
        x[f] = ONE
        for r, c in pivots:
            v = rows[r].get(f)
            if v:
                x[c] = -v
        basis.append(_canonical_sign(tuple(x)))
    return basis


def lift(b: RationalMatrix, a: Sequence) -> Vector:
    """Deterministic solve of b x = a; free variables are set to zero.

    The row operations depend on b only, so the solution is linear in a,
    and a = 0 yields x = 0.  Raises NoSolutionError when a is not in the
    image of b.
    """
    if len(a) != b.rows:
        raise LinalgError("right hand side length mismatch")
    aug = b.cols
    rows = b.row_dicts()
    for i, v in enumerate(a):
        v = Fraction(v)
        if v != 0:
            rows[i][aug] = v
    pivots = _rref(rows, b.cols)
    x = [ZERO] * b.cols
    pivot_rows = set()
    for r, c in pivots:
        x[c] = rows[r].get(aug, ZERO)
        pivot_rows.add(r)
    for i in range(b.rows):
        if i not in pivot_rows and rows[i].get(aug):
            raise NoSolutionError("vector not in the image")
    return tuple(x)


class LinearSolver:
    """Precomputed deterministic solver for repeated b x = v queries.

    Runs the elimination once against an identity augmentation; each solve
    is then a sparse transform plus a consistency check.  The solution map
    agrees with `lift` (free variables zero, linear in v).
    """

    def __init__(self, b: RationalMatrix):
        self.rows_in = b.rows
        self.cols = b.cols
        rows = b.row_dicts()
        for i in range(b.rows):
            rows[i][b.cols + i] = ONE
        self._pivots = _rref(rows, b.cols)
        self._rows = rows
        self._pivot_rows = {r for r, _ in self._pivots}

    def _transform(self, v: Sequence, row: dict) -> Fraction:
        total = ZERO
        base = self.cols
        for j, coeff in row.items():
            if j >= base:
                val = v[j - base]
                if val:
                    total += coeff * Fraction(val)
        return total

    def solve(self, v: Sequence) -> Vector:
        if len(v) != self.rows_in:
            raise LinalgError("vector length mismatch")
        x = [ZERO] * self.cols
        for r, c in self._pivots:
            x[c] = self._transform(v, self._rows[r])
        for i in range(len(self._rows)):
            if i not in self._pivot_rows and self._transform(v, self._rows[i]) != 0:
                raise NoSolutionError("vector not in the image")
        return tuple(x)


def image_pivot_columns(a: RationalMatrix) -> list[int]:
    rows = a.row_dicts()
    return [c for _, c in _rref(rows, a.cols)]


@dataclass
class CohomologySlot:
    """Kernel-mod-image data at one position of a complex.

    ``representatives`` span a complement of image(d_in) inside
    ker(d_out); ``reduce`` writes any kernel vector in that basis modulo
    the image.
    """

    ambient: int
    dim: int
    representatives: tuple[Vector, ...]
    _solver: LinearSolver
    image_rank: int

    def reduce(self, v: Sequence) -> Vector:
        x = self._solver.solve(v)
        return tuple(x[self.image_rank:])


def cohomology_at(d_in: RationalMatrix, d_out: RationalMatrix) -> CohomologySlot:
    """Cohomology ker(d_out)/im(d_in) with deterministic representatives.

    Raises CompositionError unless d_out @ d_in = 0.
    """
    if d_in.rows != d_out.cols:
        raise LinalgError(f"incompatible maps: d_in lands in {d_in.rows}, d_out eats {d_out.cols}")
    if not (d_out @ d_in).is_zero():
        raise CompositionError("d_out . d_in != 0")
    ambient = d_in.rows
    kernel = kernel_basis(d_out)
    img_cols = image_pivot_columns(d_in)
    image = [d_in.column(c) for c in img_cols]
    stacked = RationalMatrix.from_columns(list(image) + kernel, rows=ambient)
    piv = image_pivot_columns(stacked)
    reps = tuple(kernel[c - len(image)] for c in piv if c >= len(image))
    dim = len(kernel) - len(image)
    if dim != len(reps):  # pragma: no cover - internal consistency
        raise LinalgError("rank bookkeeping failed in cohomology_at")
    solver = LinearSolver(RationalMatrix.from_columns(list(image) + list(reps), rows=ambient))
    return CohomologySlot(ambient, dim, reps, solver, len(image))


# -- misc utilities -------------------------------------------------------


def det(a: RationalMatrix) -> Fraction:
    if a.rows != a.cols:
        raise LinalgError("determinant of non-square matrix")
    n = a.rows
    rows = a.to_rows()
    sign = 1
    result = ONE
    for c in range(n):
        pr = None
        for i in range(c, n):
            if rows[i][c] != 0:
                pr = i
                break
        if pr is None:
            return ZERO
        if pr != c:
            rows[c], rows[pr] = rows[pr], rows[c]
            sign = -sign
        piv = rows[c][c]
        result *= piv
        for i in range(c + 1, n):
            f = rows[i][c] / piv
            if f:
                for j in range(c, n):
                    rows[i][j] -= f * rows[c][j]
    return sign * result


def inverse(a: RationalMatrix) -> RationalMatrix:
    if a.rows != a.cols:
        raise LinalgError("inverse of non-square matrix")
    solver = LinearSolver(a)
    cols = []
    for j in range(a.rows):
        e = [ZERO] * a.rows
        e[j] = ONE
        try:
            cols.append(solver.solve(e))
        except NoSolutionError:
            raise LinalgError("matrix is singular") from None
    return RationalMatrix.from_columns(cols, rows=a.rows)


def exterior_power(a: RationalMatrix, k: int) -> RationalMatrix:
    """k-th exterior power; rows/cols indexed by k-subsets in lex order."""
    if k < 0:
        raise LinalgError("negative exterior power")
    row_sets = list(itertools.combinations(range(a.rows), k))
    col_sets = list(itertools.combinations(range(a.cols), k))
    dense = a.to_rows()
    ent = {}
    for ri, rset in enumerate(row_sets):
        for ci, cset in enumerate(col_sets):
            sub = RationalMatrix.from_rows([[dense[i][j] for j in cset] for i in rset]) if k else RationalMatrix.identity(0)
            d = det(sub) if k else ONE
            if d:
                ent[(ri, ci)] = d
    return RationalMatrix(len(row_sets), len(col_sets), ent)


def matrix_from_action(n_rows: int, n_cols: int, action: Callable[[int], Mapping[int, Fraction]]) -> RationalMatrix:
    """Matrix of a linear map given by images of basis vectors.

    ``action(j)`` returns the image of source basis vector j as a sparse
    mapping {row index: coefficient}.
    """
    ent = {}
    for j in range(n_cols):
        for i, v in action(j).items():
            v = Fraction(v)
            if v != 0:
                ent[(i, j)] = ent.get((i, j), ZERO) + v
    return RationalMatrix(n_rows, n_cols, ent)


def block_matrix(row_sizes: Sequence[int], col_sizes: Sequence[int],
                 blocks: Mapping[tuple[int, int], RationalMatrix]) -> RationalMatrix:
    """Assemble a sparse block matrix; missing blocks are zero."""
    row_off = [0]
    for s in row_sizes:
        row_off.append(row_off[-1] + s)
    col_off = [0]
    for s in col_sizes:
        col_off.append(col_off[-1] + s)
    ent = {}
    for (bi, bj), blk in blocks.items():
        if blk.shape != (row_sizes[bi], col_sizes[bj]):
            raise LinalgError(f"block ({bi},{bj}) has shape {blk.shape}, expected "
                              f"({row_sizes[bi]},{col_sizes[bj]})")
        r0, c0 = row_off[bi], col_off[bj]
        for (i, j), v in blk.entries.items():
            ent[(r0 + i, c0 + j)] = ent.get((r0 + i, c0 + j), ZERO) + v
    return RationalMatrix(row_off[-1], col_off[-1], ent)
