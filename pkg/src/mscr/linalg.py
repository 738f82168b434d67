"""Small dense linear algebra over a :class:`~mscr.field.FieldSpec`.

Matrices are immutable and hold canonical integers.  Row reduction pivots on
the first nonzero entry of each column, so results are deterministic.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .errors import FieldError, InconsistentSystem, SingularMatrix
from .field import FieldElement, FieldSpec


class Matrix:
    """Row-major matrix over a finite field."""

    __slots__ = ("field", "rows", "nrows", "ncols")

    def __init__(self, field: FieldSpec, rows: Iterable[Iterable[int]], ncols: Optional[int] = None):
        data = tuple(tuple(int(v) for v in r) for r in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
            for v in r:
                if not 0 <= v < field.order:
                    raise FieldError(f"entry {v} not in {field}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def of_elements(cls, rows: Sequence[Sequence[FieldElement]]) -> "Matrix":
        fields = {e.field for r in rows for e in r}
        if len(fields) != 1:
            raise FieldError("matrix entries must come from exactly one field")
        return cls(fields.pop(), [[e.value for e in r] for r in rows])

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, field: FieldSpec, nrows: int, ncols: int) -> "Matrix":
        return cls(field, [[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def diag(cls, field: FieldSpec, entries: Sequence[int]) -> "Matrix":
        n = len(entries)
        return cls(field, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def row(cls, field: FieldSpec, entries: Sequence[int]) -> "Matrix":
        return cls(field, [entries], len(entries))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def element(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.field, self.rows[i][j])

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.field == other.field and self.rows == other.rows and self.ncols == other.ncols

    def __hash__(self):
        return hash((self.field, self.rows, self.ncols))

    def __repr__(self):
        return f"Matrix({self.field}, {[list(r) for r in self.rows]})"

    def _same_field(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldError(f"mixed-field matrices: {self.field} and {other.field}")

    def transpose(self) -> "Matrix":
        return Matrix(self.field, zip(*self.rows), self.nrows) if self.nrows else Matrix(self.field, [[] for _ in range(self.ncols)], 0)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        f = self.field
        cols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        return Matrix(f, [[f.dot(r, c) for c in cols] for r in self.rows], other.ncols)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        f = self.field
        return Matrix(f, [[f.add(x, y) for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def scale(self, c: int) -> "Matrix":
        f = self.field
        return Matrix(f, [[f.mul(c, x) for x in r] for r in self.rows], self.ncols)

    def vstack(self, *others: "Matrix") -> "Matrix":
        rows = list(self.rows)
        for o in others:
            self._same_field(o)
            if o.ncols != self.ncols:
                raise ValueError("column mismatch in vstack")
            rows.extend(o.rows)
        return Matrix(self.field, rows, self.ncols)

    def hstack(self, *others: "Matrix") -> "Matrix":
        for o in others:
            self._same_field(o)
            if o.nrows != self.nrows:
                raise ValueError("row mismatch in hstack")
        rows = [sum((o.rows[i] for o in others), self.rows[i]) for i in range(self.nrows)]
        return Matrix(self.field, rows, self.ncols + sum(o.ncols for o in others))

    def columns(self, start: int, stop: int) -> "Matrix":
        return Matrix(self.field, [r[start:stop] for r in self.rows], stop - start)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.rows for v in r)

    def rank(self) -> int:
        return mat_rank(self)

    def inverse(self) -> "Matrix":
        return mat_inverse(self)

    def apply(self, vec: Sequence[int]) -> list[int]:
        """Matrix-vector product with a plain column of integers."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return [self.field.dot(r, vec) for r in self.rows]


# -- kernels on plain integer rows --------------------------------------------


def row_reduce(field: FieldSpec, rows: list[list[int]], ncols: Optional[int] = None) -> list[int]:
    """In-place Gauss-Jordan elimination; returns the pivot columns.

    Only the first ``ncols`` columns are used for pivoting (augmented columns
    beyond that are carried along).
    """
    if not rows:
        return []
    width = len(rows[0]) if ncols is None else ncols
    mul, sub, inv = field.mul, field.sub, field.inv
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(width):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        ip = inv(pr[c])
        if ip != 1:
            pr = rows[r] = [mul(ip, x) for x in pr]
        for i in range(nrows):
            if i != r:
                fac = rows[i][c]
                if fac:
                    rows[i] = [sub(x, mul(fac, y)) if y else x for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return pivots


def rank_of_rows(field: FieldSpec, rows: Iterable[Sequence[int]]) -> int:
    work = [list(r) for r in rows]
    return len(row_reduce(field, work)) if work else 0


def solve_any(field: FieldSpec, a_rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[int]:
    """One solution ``x`` of ``A x = rhs`` (free variables set to zero)."""
    ncols = len(a_rows[0]) if a_rows else 0
    work = [list(r) + [b] for r, b in zip(a_rows, rhs)]
    pivots = row_reduce(field, work, ncols)
    for i in range(len(pivots), len(work)):
        if work[i][ncols]:
            raise InconsistentSystem("linear system has no solution")
    x = [0] * ncols
    for i, c in enumerate(pivots):
        x[c] = work[i][ncols]
    return x


# -- public operations ----------------------------------------------------------


def mat_rank(m: Matrix) -> int:
    return rank_of_rows(m.field, m.rows)


def mat_inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise ValueError(f"cannot invert non-square {m.shape} matrix")
    n = m.nrows
    work = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(m.rows)]
    pivots = row_reduce(m.field, work, n)
    if len(pivots) < n:
        raise SingularMatrix(f"matrix has rank {len(pivots)} < {n}")
    return Matrix(m.field, [r[n:] for r in work], n)


def mat_solve(m: Matrix, rhs: Sequence[int]) -> list[int]:
    """Unique solution of the square full-rank system ``m x = rhs``."""
    if m.nrows != m.ncols:
        raise ValueError(f"mat_solve needs a square system, got {m.shape}")
    if len(rhs) != m.nrows:
        raise ValueError("right-hand side length mismatch")
    n = m.nrows
    work = [list(r) + [m.field.check(int(b))] for r, b in zip(m.rows, rhs)]
    pivots = row_reduce(m.field, work, n)
    if len(pivots) < n:
        raise SingularMatrix(f"system has rank {len(pivots)} < {n}")
    return [work[i][n] for i in range(n)]


def solve_left(m: Matrix, target: Sequence[int]) -> list[int]:
    """A row ``v`` with ``v @ m == target``; raises InconsistentSystem if none."""
    return solve_any(m.field, m.transpose().rows, target)
