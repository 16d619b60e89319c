"""Exact dense linear algebra over F_p (numpy int64) and Q (Fraction).

Everything here is deterministic: pivots are chosen as the first row with a
nonzero entry in the leftmost unfinished column.  Matrices are small per
homological degree, so dense elimination is fine.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def _as_modp(field, rows, ncols):
    m = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, r in enumerate(rows):
        for j, c in r.items():
            m[i, j] = c % field.p
    return m


def rref_modp(a: np.ndarray, p: int):
    """Row-reduce a copy of a mod p.  Returns (rref, pivot column list)."""
    a = a % p
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        sub = a[r:, c]
        nz = np.nonzero(sub)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        mask = np.nonzero(col)[0]
        if mask.size:
            a[mask] = (a[mask] - np.outer(col[mask], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rref_frac(rows, ncols):
    """Fraction row reduction on a list-of-lists copy."""
    a = [list(map(Fraction, r)) for r in rows]
    nrows = len(a)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        i = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if i is None:
            continue
        if i != r:
            a[r], a[i] = a[i], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


class LinearSolver:
    """Solve A x = b and compute ker A for one dense matrix, reusing the RREF.

    Rows of `a` are equations, columns are unknowns; entries are field scalars.
    """

    def __init__(self, field, a_rows, ncols):
        self.field = field
        self.ncols = ncols
        self.nrows = len(a_rows)
        if field.is_modular:
            a = _as_modp(field, a_rows, ncols) if a_rows and isinstance(a_rows[0], dict) else np.array(
                [[int(x) for x in r] for r in a_rows], dtype=np.int64
            ).reshape(self.nrows, ncols)
            self._orig = a % field.p
            self._rref, self.pivots = rref_modp(a, field.p)
        else:
            if a_rows and isinstance(a_rows[0], dict):
                dense = []
                for r in a_rows:
                    row = [Fraction(0)] * ncols
                    for j, c in r.items():
                        row[j] = Fraction(c)
                    dense.append(row)
            else:
                dense = [list(map(Fraction, r)) for r in a_rows]
            self._orig = dense
            self._rref, self.pivots = rref_frac(dense, ncols)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def kernel_basis(self):
        """Basis of ker A as dense scalar lists, one per free column."""
        fld = self.field
        piv = set(self.pivots)
        free = [c for c in range(self.ncols) if c not in piv]
        out = []
        if fld.is_modular:
            p = fld.p
            for fcol in free:
                v = [0] * self.ncols
                v[fcol] = 1
                for r, pc in enumerate(self.pivots):
                    v[pc] = int(-self._rref[r, fcol]) % p
                out.append(v)
        else:
            for fcol in free:
                v = [Fraction(0)] * self.ncols
                v[fcol] = Fraction(1)
                for r, pc in enumerate(self.pivots):
                    v[pc] = -self._rref[r][fcol]
                out.append(v)
        return out

    def solve(self, b):
        """One solution of A x = b as a dense list, or None if inconsistent.

        Deterministic: free variables are set to zero.
        """
        fld = self.field
        if fld.is_modular:
            p = fld.p
            bb = np.array([int(x) % p for x in b], dtype=np.int64)
            aug = np.concatenate([self._orig, bb[:, None]], axis=1)
            rr, piv = rref_modp(aug, p)
            if piv and piv[-1] == self.ncols:
                return None
            x = [0] * self.ncols
            for r, pc in enumerate(piv):
                x[pc] = int(rr[r, self.ncols])
            return x
        bb = [Fraction(x) for x in b]
        aug = [row + [bb[i]] for i, row in enumerate(self._orig)]
        rr, piv = rref_frac(aug, self.ncols + 1)
        if piv and piv[-1] == self.ncols:
            return None
        x = [Fraction(0)] * self.ncols
        for r, pc in enumerate(piv):
            x[pc] = rr[r][self.ncols]
        return x


def image_pivot_columns(field, a_rows, ncols):
    """Pivot columns of A (a basis of the column space among the columns)."""
    # reduce the transpose? no: pivot columns of the RREF of A itself index
    # an independent spanning subset of the columns.
    return LinearSolver(field, a_rows, ncols).pivots
