"""
Exact linear algebra over the Gaussian rationals.

`solve` is plain Gaussian elimination taking the first nonzero pivot of each
column. `determinant` and `solve_fraction_free` clear denominators row by row
and run Bareiss elimination on Gaussian integers, which avoids the gcd work of
fraction arithmetic on large entries.
"""
from fractions import Fraction
from math import lcm
from typing import Sequence

from app.exceptions import PreconditionError
from app.scalars import GaussianRational, ONE, ZERO

Matrix = Sequence[Sequence[GaussianRational]]
GaussianInteger = tuple[int, int]


# Gaussian integer helpers

def _mul(a: GaussianInteger, b: GaussianInteger) -> GaussianInteger:
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _sub(a: GaussianInteger, b: GaussianInteger) -> GaussianInteger:
    return a[0] - b[0], a[1] - b[1]


def _exact_div(a: GaussianInteger, b: GaussianInteger) -> GaussianInteger:
    if b[1] == 0:
        return a[0] // b[0], a[1] // b[0]
    norm = b[0] * b[0] + b[1] * b[1]
    re, im = _mul(a, (b[0], -b[1]))
    return re // norm, im // norm


def _integer_rows(rows: Matrix) -> tuple[list[list[GaussianInteger]], list[int]]:
    integer_rows, scales = [], []
    for row in rows:
        scale = 1
        for entry in row:
            scale = lcm(scale, entry.re.denominator, entry.im.denominator)
        integer_rows.append([
            (entry.re.numerator * (scale // entry.re.denominator),
             entry.im.numerator * (scale // entry.im.denominator))
            for entry in row
        ])
        scales.append(scale)
    return integer_rows, scales


def _bareiss(rows: list[list[GaussianInteger]], pivot_columns: int) -> tuple[int, bool]:
    """Fraction-free forward elimination in place; returns (sign, singular)."""
    sign = 1
    previous: GaussianInteger = (1, 0)
    size = len(rows)
    width = len(rows[0]) if rows else 0
    for k in range(min(size, pivot_columns)):
        pivot = next((i for i in range(k, size) if rows[i][k] != (0, 0)), None)
        if pivot is None:
            return sign, True
        if pivot != k:
            rows[k], rows[pivot] = rows[pivot], rows[k]
            sign = -sign
        top = rows[k][k]
        for i in range(k + 1, size):
            lead = rows[i][k]
            for j in range(k + 1, width):
                rows[i][j] = _exact_div(_sub(_mul(rows[i][j], top), _mul(lead, rows[k][j])), previous)
            rows[i][k] = (0, 0)
        previous = top
    return sign, False


def _to_scalar(value: GaussianInteger, scale: int = 1) -> GaussianRational:
    return GaussianRational(Fraction(value[0], scale), Fraction(value[1], scale))


# Public operations

def determinant(matrix: Matrix) -> GaussianRational:
    size = len(matrix)
    if size == 0:
        return ONE
    if any(len(row) != size for row in matrix):
        raise PreconditionError("determinant of a non-square matrix")
    rows, scales = _integer_rows(matrix)
    sign, singular = _bareiss(rows, size)
    if singular:
        return ZERO
    total_scale = 1
    for scale in scales:
        total_scale *= scale
    last = rows[-1][-1]
    return _to_scalar((sign * last[0], sign * last[1]), total_scale)


def solve_fraction_free(matrix: Matrix, rhs: Sequence[GaussianRational]) -> list[GaussianRational]:
    size = len(matrix)
    augmented = [list(row) + [value] for row, value in zip(matrix, rhs)]
    rows, _ = _integer_rows(augmented)
    _, singular = _bareiss(rows, size)
    if singular:
        raise PreconditionError("singular linear system")
    solution = [ZERO] * size
    for i in range(size - 1, -1, -1):
        total = _to_scalar(rows[i][size])
        for j in range(i + 1, size):
            if rows[i][j] != (0, 0):
                total = total - _to_scalar(rows[i][j]) * solution[j]
        solution[i] = total / _to_scalar(rows[i][i])
    return solution


def solve(matrix: Matrix, rhs: Sequence[GaussianRational]) -> list[GaussianRational]:
    size = len(matrix)
    rows = [list(row) + [value] for row, value in zip(matrix, rhs)]
    for k in range(size):
        pivot = next((i for i in range(k, size) if rows[i][k]), None)
        if pivot is None:
            raise PreconditionError("singular linear system")
        rows[k], rows[pivot] = rows[pivot], rows[k]
        inverse = rows[k][k].inverse()
        for i in range(k + 1, size):
            if not rows[i][k]:
                continue
            factor = rows[i][k] * inverse
            for j in range(k, size + 1):
                rows[i][j] = rows[i][j] - factor * rows[k][j]
    solution = [ZERO] * size
    for i in range(size - 1, -1, -1):
        total = rows[i][size]
        for j in range(i + 1, size):
            total = total - rows[i][j] * solution[j]
        solution[i] = total / rows[i][i]
    return solution


def kernel_vector(matrix: Matrix, columns: int) -> list[GaussianRational]:
    """A nonzero solution of matrix @ x = 0, or an error when the kernel is trivial."""
    rows = [list(row) for row in matrix]
    pivots: list[int] = []
    r = 0
    for c in range(columns):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inverse = rows[r][c].inverse()
        rows[r] = [entry * inverse for entry in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = next((c for c in range(columns) if c not in pivots), None)
    if free is None:
        raise PreconditionError("matrix has a trivial kernel")
    vector = [ZERO] * columns
    vector[free] = ONE
    for row_index, c in enumerate(pivots):
        vector[c] = -rows[row_index][free]
    return vector
