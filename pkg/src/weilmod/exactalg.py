"""Exact dense linear algebra over an abstract commutative-ring interface.

Matrices are immutable, entries live in a ring supplied through a small
``Ring`` object (add / mul / neg / zero / one / equality, and inversion for
fields).  Everything is exact: integer matrices use Python's arbitrary
precision ints, field matrices use whatever exact element type the ring
supplies.  Smith normal form is implemented over the integers only.
"""

from __future__ import annotations

from dataclasses import dataclass


class Ring:
    """Minimal commutative-ring interface consumed by RingMatrix."""

    is_field = False

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def eq(self, a, b) -> bool:
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError(f"{self!r} has no division")

    def is_zero(self, a) -> bool:
        return self.eq(a, self.zero())

    def from_int(self, n: int):
        raise NotImplementedError


class IntegerRing(Ring):
    """The ring of rational integers; elements are Python ints."""

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def eq(self, a, b):
        return a == b

    def from_int(self, n):
        return n

    def __repr__(self):
        return "ZZ"


ZZ = IntegerRing()


class RingMatrix:
    """Dense matrix with entries in a fixed coefficient ring.

    Entries are stored row-major in a flat tuple; instances are immutable
    and safe to share between threads.
    """

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: Ring, rows: int, cols: int, entries):
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise ValueError(
                f"expected {rows * cols} entries, got {len(entries)}"
            )
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, ring: Ring, rowlist) -> "RingMatrix":
        rowlist = [list(r) for r in rowlist]
        rows = len(rowlist)
        cols = len(rowlist[0]) if rows else 0
        if any(len(r) != cols for r in rowlist):
            raise ValueError("ragged rows")
        return cls(ring, rows, cols, [x for r in rowlist for x in r])

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "RingMatrix":
        z, o = ring.zero(), ring.one()
        return cls(ring, n, n, [o if i == j else z for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, ring: Ring, rows: int, cols: int) -> "RingMatrix":
        z = ring.zero()
        return cls(ring, rows, cols, [z] * (rows * cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int):
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RingMatrix":
        return RingMatrix(
            self.ring, self.cols, self.rows,
            [self.entries[i * self.cols + j]
             for j in range(self.cols) for i in range(self.rows)],
        )

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        if self.ring is not other.ring or (self.rows, self.cols) != (other.rows, other.cols):
            return False
        eq = self.ring.eq
        return all(eq(a, b) for a, b in zip(self.entries, other.entries))

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        self._check_same_shape(other)
        add = self.ring.add
        return RingMatrix(self.ring, self.rows, self.cols,
                          [add(a, b) for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        self._check_same_shape(other)
        sub = self.ring.sub
        return RingMatrix(self.ring, self.rows, self.cols,
                          [sub(a, b) for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "RingMatrix":
        neg = self.ring.neg
        return RingMatrix(self.ring, self.rows, self.cols,
                          [neg(a) for a in self.entries])

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        return mat_mul(self, other)

    def scaled(self, s) -> "RingMatrix":
        mul = self.ring.mul
        return RingMatrix(self.ring, self.rows, self.cols,
                          [mul(s, a) for a in self.entries])

    def map_entries(self, fn, ring: Ring | None = None) -> "RingMatrix":
        return RingMatrix(ring or self.ring, self.rows, self.cols,
                          [fn(a) for a in self.entries])

    def apply(self, vec):
        """Matrix times column vector (a sequence of ring elements)."""
        if len(vec) != self.cols:
            raise ValueError("vector length does not match column count")
        ring = self.ring
        out = []
        for i in range(self.rows):
            acc = ring.zero()
            base = i * self.cols
            for j, v in enumerate(vec):
                acc = ring.add(acc, ring.mul(self.entries[base + j], v))
            out.append(acc)
        return out

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(a) for a in self.entries)

    def _check_same_shape(self, other: "RingMatrix"):
        if self.ring is not other.ring:
            raise ValueError("matrices over different rings")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __repr__(self):
        return f"RingMatrix({self.rows}x{self.cols} over {self.ring!r})"


def mat_mul(a: RingMatrix, b: RingMatrix) -> RingMatrix:
    """Exact matrix product; dimensions and rings must agree."""
    if a.ring is not b.ring:
        raise ValueError("matrices over different rings")
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.cols} vs {b.rows}")
    ring = a.ring
    add, mul, zero = ring.add, ring.mul, ring.zero()
    n, k, m = a.rows, a.cols, b.cols
    ae, be = a.entries, b.entries
    out = [zero] * (n * m)
    for i in range(n):
        arow = ae[i * k:(i + 1) * k]
        for t in range(k):
            x = arow[t]
            if ring.is_zero(x):
                continue
            brow = be[t * m:(t + 1) * m]
            base = i * m
            for j in range(m):
                out[base + j] = add(out[base + j], mul(x, brow[j]))
    return RingMatrix(ring, n, m, out)


def _rref(mat: RingMatrix):
    """Reduced row echelon form over a field; returns (rows, pivot columns)."""
    if not mat.ring.is_field:
        raise TypeError("row reduction needs a field ring")
    ring = mat.ring
    rows = mat.to_rows()
    nrows, ncols = mat.rows, mat.cols
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not ring.is_zero(rows[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = ring.inv(rows[r][c])
        rows[r] = [ring.mul(inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and not ring.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def row_rank(mat: RingMatrix) -> int:
    """Rank over the matrix's (field) ring."""
    return len(_rref(mat)[1])


def kernel_basis(mat: RingMatrix):
    """Basis of the right null space of a matrix over a field.

    Returns a list of column vectors (lists of ring elements); an empty
    list means the matrix is injective.  Free columns are taken in
    ascending order, which makes the output deterministic.
    """
    ring = mat.ring
    rows, pivots = _rref(mat)
    ncols = mat.cols
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ring.zero()] * ncols
        v[fc] = ring.one()
        for r, pc in enumerate(pivots):
            v[pc] = ring.neg(rows[r][fc])
        basis.append(v)
    return basis


def solve_linear(mat: RingMatrix, rhs):
    """One particular solution of ``mat @ x = rhs`` over a field.

    Free variables are fixed to zero (deterministic choice).  Raises
    ValueError when the system is inconsistent.
    """
    ring = mat.ring
    aug = RingMatrix(ring, mat.rows, mat.cols + 1,
                     [x for i in range(mat.rows)
                      for x in (*mat.row(i), rhs[i])])
    rows, pivots = _rref(aug)
    if mat.cols in pivots:
        raise ValueError("inconsistent linear system")
    x = [ring.zero()] * mat.cols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][mat.cols]
    return x


def invert_field_matrix(mat: RingMatrix) -> RingMatrix:
    """Inverse of a square matrix over a field."""
    if mat.rows != mat.cols:
        raise ValueError("not square")
    ring = mat.ring
    n = mat.rows
    aug = RingMatrix(ring, n, 2 * n,
                     [x for i in range(n)
                      for x in (*mat.row(i),
                                *(ring.one() if j == i else ring.zero() for j in range(n)))])
    rows, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return RingMatrix.from_rows(ring, [rows[i][n:] for i in range(n)])


def field_det(mat: RingMatrix):
    """Determinant over a field, by Gaussian elimination."""
    if mat.rows != mat.cols:
        raise ValueError("not square")
    ring = mat.ring
    rows = mat.to_rows()
    n = mat.rows
    det = ring.one()
    for c in range(n):
        pivot_row = None
        for i in range(c, n):
            if not ring.is_zero(rows[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            return ring.zero()
        if pivot_row != c:
            rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
            det = ring.neg(det)
        det = ring.mul(det, rows[c][c])
        inv = ring.inv(rows[c][c])
        for i in range(c + 1, n):
            if not ring.is_zero(rows[i][c]):
                f = ring.mul(inv, rows[i][c])
                rows[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(rows[i], rows[c])]
    return det


def det_bareiss(mat: RingMatrix) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    if mat.ring is not ZZ:
        raise TypeError("det_bareiss is for integer matrices")
    if mat.rows != mat.cols:
        raise ValueError("not square")
    n = mat.rows
    if n == 0:
        return 1
    a = mat.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SNFResult:
    """Smith normal form data: L @ input @ R == diag(invariant_factors, 0...)."""

    invariant_factors: tuple
    free_rank: int
    left_transform: RingMatrix
    right_transform: RingMatrix

    def diagonal_matrix(self, rows: int, cols: int) -> RingMatrix:
        d = RingMatrix.zeros(ZZ, rows, cols).to_rows()
        for i, f in enumerate(self.invariant_factors):
            d[i][i] = f
        return RingMatrix.from_rows(ZZ, d)


def _snf_pivot(a, t, m, n):
    """Smallest nonzero |entry| in the trailing submatrix, row-major ties."""
    best = None
    for i in range(t, m):
        for j in range(t, n):
            x = a[i][j]
            if x != 0 and (best is None or abs(x) < abs(best[0])):
                best = (x, i, j)
    return best


def smith_normal_form(mat: RingMatrix) -> SNFResult:
    """Smith normal form of an integer matrix.

    Returns unimodular L, R with L @ mat @ R diagonal, diagonal entries
    positive and each dividing the next.  The pivot rule (smallest
    nonzero absolute value, row-major tie break) makes the transforms
    deterministic.
    """
    if mat.ring is not ZZ:
        raise TypeError("Smith normal form is implemented over ZZ only")
    m, n = mat.rows, mat.cols
    a = mat.to_rows()
    left = RingMatrix.identity(ZZ, m).to_rows()
    right = RingMatrix.identity(ZZ, n).to_rows()

    def row_op(i, k, q):
        # row_i -= q * row_k
        a[i] = [x - q * y for x, y in zip(a[i], a[k])]
        left[i] = [x - q * y for x, y in zip(left[i], left[k])]

    def col_op(j, k, q):
        # col_j -= q * col_k
        for r in range(m):
            a[r][j] -= q * a[r][k]
        for r in range(n):
            right[r][j] -= q * right[r][k]

    t = 0
    while True:
        found = _snf_pivot(a, t, m, n)
        if found is None:
            break
        _, pi, pj = found
        if pi != t:
            a[t], a[pi] = a[pi], a[t]
            left[t], left[pi] = left[pi], left[t]
        if pj != t:
            for r in range(m):
                a[r][t], a[r][pj] = a[r][pj], a[r][t]
            for r in range(n):
                right[r][t], right[r][pj] = right[r][pj], right[r][t]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]

        dirty = False
        for i in range(t + 1, m):
            if a[i][t] != 0:
                q = a[i][t] // a[t][t]
                row_op(i, t, q)
                if a[i][t] != 0:
                    dirty = True
        for j in range(t + 1, n):
            if a[t][j] != 0:
                q = a[t][j] // a[t][t]
                col_op(j, t, q)
                if a[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # pivot must divide the whole trailing block for the divisor chain
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(t, offender, -1)  # adds the offending row to the pivot row
            continue
        t += 1

    factors = tuple(a[i][i] for i in range(min(m, n)) if a[i][i] != 0)
    return SNFResult(
        invariant_factors=factors,
        free_rank=n - len(factors),
        left_transform=RingMatrix.from_rows(ZZ, left),
        right_transform=RingMatrix.from_rows(ZZ, right),
    )
