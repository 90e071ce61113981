"""Exact Gaussian elimination over cyclotomic scalars.

Everything here works on small dense matrices whose entries are
:class:`~multiarr.scalars.Scalar`; rows are lists/tuples of scalars.
The reduced row echelon form is canonical for the row space, which the
callers rely on for deduplicating subspaces and for deterministic
nullspace bases.
"""

from __future__ import annotations

from collections.abc import Sequence

from .scalars import Scalar, one, zero

Row = tuple[Scalar, ...]


def rref(rows: Sequence[Sequence[Scalar]], ncols: int) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(work)) if work[i][c]), None)
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = work[r][c].inverse()
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c]:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(rows: Sequence[Sequence[Scalar]], ncols: int) -> int:
    return len(rref(rows, ncols)[0])


def reduce_against(row: Sequence[Scalar], echelon: Sequence[Sequence[Scalar]], pivots: Sequence[int]) -> list[Scalar]:
    """Eliminate the pivot entries of ``row`` against an RREF basis."""
    out = list(row)
    for erow, p in zip(echelon, pivots):
        f = out[p]
        if f:
            out = [a - f * b for a, b in zip(out, erow)]
    return out


def extend_echelon(
    echelon: Sequence[Row], pivots: Sequence[int], row: Sequence[Scalar]
) -> tuple[tuple[Row, ...], tuple[int, ...]] | None:
    """Add ``row`` to a canonical RREF basis.

    Returns the new canonical (rows, pivots), or None if ``row`` is in
    the span already.
    """
    reduced = reduce_against(row, echelon, pivots)
    c = next((j for j, x in enumerate(reduced) if x), None)
    if c is None:
        return None
    inv = reduced[c].inverse()
    new_row = tuple(x * inv for x in reduced)
    rows = []
    pivs = []
    placed = False
    for erow, p in zip(echelon, pivots):
        if not placed and c < p:
            rows.append(new_row)
            pivs.append(c)
            placed = True
        if erow[c]:
            f = erow[c]
            erow = tuple(a - f * b for a, b in zip(erow, new_row))
        rows.append(tuple(erow))
        pivs.append(p)
    if not placed:
        rows.append(new_row)
        pivs.append(c)
    return tuple(rows), tuple(pivs)


def nullspace(rows: Sequence[Sequence[Scalar]], ncols: int, order: int) -> list[Row]:
    """Canonical kernel basis: one vector per free column, ascending.

    The vector for free column f has a 1 in slot f and the negated RREF
    entries in the pivot slots, so the basis is unique for the row space.
    """
    red, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis: list[Row] = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [zero(order)] * ncols
        v[f] = one(order)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(tuple(v))
    return basis


def dot(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    acc = None
    for x, y in zip(a, b):
        term = x * y
        acc = term if acc is None else acc + term
    assert acc is not None
    return acc


def solve_rows(mat: Sequence[Sequence[Scalar]], row: Sequence[Scalar], ncols: int) -> list[Scalar] | None:
    """Coefficients c with sum(c_i * mat_i) = row, or None if inconsistent.

    Free coefficients (when the rows of ``mat`` are dependent) are set
    to zero.  Solved column-wise, one equation per coordinate.
    """
    k = len(mat)
    aug = [[mat[i][j] for i in range(k)] + [row[j]] for j in range(ncols)]
    red, pivots = rref(aug, k + 1)
    if k in pivots:
        return None
    zero_like = None
    for r in mat:
        for x in r:
            zero_like = x - x
            break
        break
    assert zero_like is not None
    coeffs = [zero_like] * k
    for i, p in enumerate(pivots):
        coeffs[p] = red[i][k]
    return coeffs


def invert(mat: Sequence[Sequence[Scalar]], n: int, order: int) -> list[list[Scalar]] | None:
    """Inverse of an n x n matrix by Gauss-Jordan, or None if singular."""
    work = [list(r) + [one(order) if j == i else zero(order) for j in range(n)] for i, r in enumerate(mat)]
    red, pivots = rref(work, 2 * n)
    if pivots[:n] != list(range(n)):
        return None
    return [r[n:] for r in red[:n]]
