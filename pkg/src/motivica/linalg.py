"""
Exact integer matrices and the Smith normal form.

The decomposition comes from sympy over ZZ with its unimodular transforms,
so kernels, cokernels and integer solutions come with explicit generators.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from motivica import logger

Vector = tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    data: tuple[Vector, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ValueError("Matrix dimensions must be non-negative")
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError(
                f"Entry count does not match a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(
        cls, rows: Iterable[Iterable[int]], cols: int | None = None
    ) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if cols is None:
            if not data:
                raise ValueError("Column count is required for a matrix without rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls.from_rows(
            [[column[i] for column in columns] for i in range(rows)], len(columns)
        )

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.diagonal([1] * n)

    @classmethod
    def diagonal(
        cls, entries: Sequence[int], rows: int | None = None, cols: int | None = None
    ) -> "IntMatrix":
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for k, entry in enumerate(entries):
            data[k][k] = entry
        return cls.from_rows(data, cols)

    @classmethod
    def block(
        cls, blocks: Sequence[Sequence["IntMatrix"]], row_sizes: Sequence[int],
        col_sizes: Sequence[int],
    ) -> "IntMatrix":
        """Assemble a matrix from a full grid of blocks with the given sizes"""
        data: list[list[int]] = []
        for i, row_size in enumerate(row_sizes):
            for r in range(row_size):
                line: list[int] = []
                for j, col_size in enumerate(col_sizes):
                    b = blocks[i][j]
                    if (b.rows, b.cols) != (row_size, col_size):
                        raise ValueError(f"Block ({i}, {j}) has the wrong shape")
                    line.extend(b.data[r])
                data.append(line)
        return cls.from_rows(data, sum(col_sizes))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.data[i][j]

    def row(self, i: int) -> Vector:
        return self.data[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows(
            [self.column(j) for j in range(self.cols)], self.rows
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"Cannot multiply {self.shape} by {other.shape}")
        result = []
        for row in self.data:
            acc = [0] * other.cols
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(other.data[k]):
                        if b:
                            acc[j] += a * b
            result.append(acc)
        return IntMatrix.from_rows(result, other.cols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix.from_rows(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
            self.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def scale(self, factor: int) -> "IntMatrix":
        return IntMatrix.from_rows(
            [[factor * a for a in r] for r in self.data], self.cols
        )

    def apply(self, vector: Sequence[int]) -> Vector:
        if len(vector) != self.cols:
            raise ValueError("Vector length does not match matrix columns")
        return tuple(sum(a * x for a, x in zip(r, vector) if a) for r in self.data)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows(
            [[self.data[i][j] for j in cols] for i in rows], len(cols)
        )

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("Cannot stack matrices with different row counts")
        return IntMatrix.from_rows(
            [r + s for r, s in zip(self.data, other.data)], self.cols + other.cols
        )

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("Cannot stack matrices with different column counts")
        return IntMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def _check_same_shape(self, other: "IntMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"Shape mismatch: {self.shape} and {other.shape}")


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    D: Vector
    V: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.D if d != 0)

    @cached_property
    def U_inv(self) -> IntMatrix:
        return _unimodular_inverse(self.U)

    @cached_property
    def V_inv(self) -> IntMatrix:
        return _unimodular_inverse(self.V)

    def diagonal_matrix(self) -> IntMatrix:
        return IntMatrix.diagonal(self.D, self.U.rows, self.V.rows)


def _to_domain(matrix: IntMatrix) -> DomainMatrix:
    return DomainMatrix([[ZZ(x) for x in row] for row in matrix.data], matrix.shape, ZZ)


def _from_domain(matrix: DomainMatrix) -> IntMatrix:
    return IntMatrix.from_rows(
        [[int(x) for x in row] for row in matrix.to_list()], matrix.shape[1]
    )


def _unimodular_inverse(matrix: IntMatrix) -> IntMatrix:
    if matrix.rows == 0:
        return matrix
    inverse, denominator = _to_domain(matrix).inv_den()
    unit = int(denominator)
    if unit not in (1, -1):
        raise ValueError(f"Matrix with determinant {unit} is not unimodular")
    return _from_domain(inverse).scale(unit)


def smith(matrix: IntMatrix) -> SmithDecomposition:
    """
    Compute U, D, V with U * matrix * V = diag(D), U and V unimodular,
    D non-negative and each diagonal entry dividing the next one.
    """
    m, n = matrix.shape
    if m == 0 or n == 0:
        return SmithDecomposition(IntMatrix.identity(m), (), IntMatrix.identity(n))
    form, left, right = smith_normal_decomp(_to_domain(matrix))
    entries = form.to_list()
    diagonal = [int(entries[i][i]) for i in range(min(m, n))]
    # invariant factors are only defined up to sign
    signs = [-1 if i < len(diagonal) and diagonal[i] < 0 else 1 for i in range(m)]
    left_rows = _from_domain(left).data
    decomposition = SmithDecomposition(
        U=IntMatrix.from_rows([[s * x for x in r] for s, r in zip(signs, left_rows)], m),
        D=tuple(abs(d) for d in diagonal),
        V=_from_domain(right),
    )
    assert decomposition.U @ matrix @ decomposition.V == decomposition.diagonal_matrix()
    if m * n > 2500:
        logger.debug(f"Smith normal form of {m}x{n} matrix done")
    return decomposition


def _solve_with(snf: SmithDecomposition, b: Sequence[int]) -> Vector | None:
    c = snf.U.apply(b)
    y = [0] * snf.V.rows
    for i, value in enumerate(c):
        d = snf.D[i] if i < len(snf.D) else 0
        if d == 0:
            if value != 0:
                return None
        elif value % d:
            return None
        else:
            y[i] = value // d
    return snf.V.apply(y)


def solve_integer(matrix: IntMatrix, b: Sequence[int]) -> Vector | None:
    """Return an integer x with matrix * x = b, or None if there is none"""
    if len(b) != matrix.rows:
        raise ValueError("Right hand side length does not match matrix rows")
    return _solve_with(smith(matrix), b)


def solve_integer_columns(matrix: IntMatrix, rhs: IntMatrix) -> IntMatrix | None:
    """Solve matrix * X = rhs column by column, sharing one decomposition"""
    if rhs.rows != matrix.rows:
        raise ValueError("Right hand side rows do not match matrix rows")
    snf = smith(matrix)
    columns = []
    for b in rhs.columns():
        if (x := _solve_with(snf, b)) is None:
            return None
        columns.append(x)
    return IntMatrix.from_columns(columns, matrix.cols)


def kernel_basis(matrix: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel of the matrix"""
    snf = smith(matrix)
    keep = range(snf.rank, matrix.cols)
    return snf.V.submatrix(range(matrix.cols), list(keep))
