"""Finite fields F_q (q = p^f odd), the symplectic space W = F_q^(2m), the
group Sp(W), lagrangians, and the Bruhat decomposition relative to the
Siegel parabolic stabilizing the reference lagrangian X = span(e_1..e_m).

Field elements are carried around as small integer codes (base-p digits of
the coefficient vector, constant term least significant); a field object
owns lookup tables for the arithmetic, built once from the deterministic
modulus.  Vectors of W are tuples of codes.

Sign convention for the Weyl representatives, fixed once for the whole
project: w_j sends e_i -> -f_i and f_i -> e_i for i <= j and is the
identity on the remaining basis vectors (see W_J_SIGN_CONVENTION).
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from .exactalg import Ring, RingMatrix, kernel_basis, row_rank, solve_linear, \
    invert_field_matrix, field_det

W_J_SIGN_CONVENTION = "w_j: e_i -> -f_i, f_i -> e_i for i <= j; identity elsewhere"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@lru_cache(maxsize=None)
def Fq(p: int, f: int) -> "FqField":
    """Cached field constructor, so F_q rings compare by identity."""
    return FqField(p, f)


class FqField(Ring):
    """F_{p^f} presented as F_p[t]/(g) for the lexicographically smallest
    monic irreducible g of degree f.  Elements are int codes 0..q-1."""

    is_field = True

    def __init__(self, p: int, f: int):
        if not _is_prime(p) or p == 2:
            raise ValueError(f"p must be an odd prime, got {p}")
        if f < 1:
            raise ValueError("f must be >= 1")
        self.p = p
        self.f = f
        self.q = p ** f
        self.modulus = self._find_modulus()
        self._build_tables()

    # -- construction ---------------------------------------------------
    def _find_modulus(self):
        p, f = self.p, self.f
        if f == 1:
            return (0, 1)  # g = t
        for code in range(p ** f):
            cand = []
            c = code
            for _ in range(f):
                cand.append(c % p)
                c //= p
            cand.append(1)
            if self._poly_irreducible(cand):
                return tuple(cand)
        raise AssertionError("no irreducible polynomial found")

    def _poly_irreducible(self, g):
        p = self.p
        deg = len(g) - 1
        for d in range(1, deg // 2 + 1):
            for code in range(p ** d):
                cand = []
                c = code
                for _ in range(d):
                    cand.append(c % p)
                    c //= p
                cand.append(1)
                if not self._poly_mod_nonzero(g, cand):
                    return False
        return True

    def _poly_mod_nonzero(self, f, g):
        p = self.p
        f = list(f)
        while f and f[-1] == 0:
            f.pop()
        while f and len(f) >= len(g):
            shift = len(f) - len(g)
            factor = f[-1]  # g monic
            for i, c in enumerate(g):
                f[shift + i] = (f[shift + i] - factor * c) % p
            while f and f[-1] == 0:
                f.pop()
        return bool(f)

    def _build_tables(self):
        p, f, q = self.p, self.f, self.q
        g = self.modulus

        def decode(code):
            out = []
            for _ in range(f):
                out.append(code % p)
                code //= p
            return out

        def encode(coeffs):
            code = 0
            for c in reversed(coeffs):
                code = code * p + (c % p)
            return code

        self._decode, self._encode = decode, encode
        add_t = [[0] * q for _ in range(q)]
        mul_t = [[0] * q for _ in range(q)]
        for a in range(q):
            da = decode(a)
            for b in range(a, q):
                db = decode(b)
                s = encode([(x + y) % p for x, y in zip(da, db)])
                add_t[a][b] = add_t[b][a] = s
                prod = [0] * (2 * f - 1)
                for i, x in enumerate(da):
                    if x:
                        for j, y in enumerate(db):
                            prod[i + j] = (prod[i + j] + x * y) % p
                # reduce mod g (monic)
                for top in range(2 * f - 2, f - 1, -1):
                    c = prod[top]
                    if c:
                        prod[top] = 0
                        shift = top - f
                        for i in range(f):
                            prod[shift + i] = (prod[shift + i] - c * g[i]) % p
                m = encode(prod[:f])
                mul_t[a][b] = mul_t[b][a] = m
        self.add_t = add_t
        self.mul_t = mul_t
        self.neg_t = [encode([(-c) % p for c in decode(a)]) for a in range(q)]
        inv_t = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul_t[a][b] == 1:
                    inv_t[a] = b
                    break
        self.inv_t = inv_t
        # absolute trace down to F_p, as ints 0..p-1
        trace_t = []
        for a in range(q):
            x, acc = a, 0
            for _ in range(f):
                acc = add_t[acc][x]
                x = self.pow(x, p)
            trace_t.append(decode(acc)[0])
        self.trace_t = trace_t
        self.half = inv_t[2 % p]

    # -- code arithmetic -------------------------------------------------
    def encode_int(self, n: int) -> int:
        return n % self.p

    def pow(self, a: int, n: int) -> int:
        result = 1
        while n:
            if n & 1:
                result = self.mul_t[result][a]
            a = self.mul_t[a][a]
            n >>= 1
        return result

    def primitive(self) -> int:
        """Smallest code generating the multiplicative group."""
        for a in range(2, self.q):
            seen, x = 1, a
            while x != 1:
                x = self.mul_t[x][a]
                seen += 1
            if seen == self.q - 1:
                return a
        raise AssertionError("no primitive element")

    # -- Ring interface (elements are int codes) -------------------------
    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, a, b):
        return self.add_t[a][b]

    def mul(self, a, b):
        return self.mul_t[a][b]

    def neg(self, a):
        return self.neg_t[a]

    def sub(self, a, b):
        return self.add_t[a][self.neg_t[b]]

    def eq(self, a, b):
        return a == b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self.inv_t[a]

    def is_zero(self, a):
        return a == 0

    def from_int(self, n):
        return n % self.p

    def elem(self, code: int) -> "FqElem":
        return FqElem(self, code)

    def __repr__(self):
        return f"F_{self.q}"


class FqElem:
    """Typed wrapper around a field code; the public face of F_q values."""

    __slots__ = ("field", "code")

    def __init__(self, field: FqField, code: int):
        self.field = field
        self.code = code

    @property
    def coeffs(self):
        return tuple(self.field._decode(self.code))

    def __add__(self, other):
        return FqElem(self.field, self.field.add_t[self.code][other.code])

    def __sub__(self, other):
        return FqElem(self.field, self.field.sub(self.code, other.code))

    def __mul__(self, other):
        return FqElem(self.field, self.field.mul_t[self.code][other.code])

    def __neg__(self):
        return FqElem(self.field, self.field.neg_t[self.code])

    def inverse(self):
        return FqElem(self.field, self.field.inv(self.code))

    def __eq__(self, other):
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.field is other.field and self.code == other.code

    def __hash__(self):
        return hash((id(self.field), self.code))

    def trace_int(self) -> int:
        return self.field.trace_t[self.code]

    def __repr__(self):
        return f"FqElem({self.coeffs} in {self.field!r})"


def fq_trace(x: FqElem) -> FqElem:
    """Absolute trace Tr(x) = sum of x^(p^i), landing in the prime field."""
    return FqElem(Fq(x.field.p, 1), x.field.trace_t[x.code])


# ----------------------------------------------------------------------
# the symplectic space and its group

class SympSpace:
    """W = F_q^(2m) with the standard symplectic basis e_1..e_m, f_1..f_m,
    <e_i, f_j> = delta_ij and e's, f's isotropic."""

    def __init__(self, m: int, fq: FqField):
        self.m = m
        self.fq = fq
        self.dim = 2 * m
        self.zero_vec = (0,) * self.dim

    def basis_e(self, i: int):
        v = [0] * self.dim
        v[i] = 1
        return tuple(v)

    def basis_f(self, i: int):
        v = [0] * self.dim
        v[self.m + i] = 1
        return tuple(v)

    def pairing(self, u, v) -> int:
        """<u, v> = sum u_i v_{m+i} - u_{m+i} v_i, as a field code."""
        fq = self.fq
        m = self.m
        acc = 0
        for i in range(m):
            acc = fq.add_t[acc][fq.mul_t[u[i]][v[m + i]]]
            acc = fq.sub(acc, fq.mul_t[u[m + i]][v[i]])
        return acc

    def vec_add(self, u, v):
        add = self.fq.add_t
        return tuple(add[a][b] for a, b in zip(u, v))

    def vec_sub(self, u, v):
        fq = self.fq
        return tuple(fq.sub(a, b) for a, b in zip(u, v))

    def vec_neg(self, u):
        neg = self.fq.neg_t
        return tuple(neg[a] for a in u)

    def vec_scale(self, c: int, u):
        mul = self.fq.mul_t
        return tuple(mul[c][a] for a in u)

    def span_points(self, vectors):
        """All points of the span, enumerated deterministically
        (coefficient tuples in itertools.product order)."""
        pts = []
        for coeffs in itertools.product(range(self.fq.q), repeat=len(vectors)):
            v = self.zero_vec
            for c, b in zip(coeffs, vectors):
                if c:
                    v = self.vec_add(v, self.vec_scale(c, b))
            pts.append(v)
        return pts

    def matrix_of_vectors(self, vectors) -> RingMatrix:
        """Rows = the given vectors, over the field ring."""
        return RingMatrix.from_rows(self.fq, [list(v) for v in vectors])

    def __repr__(self):
        return f"SympSpace(m={self.m}, {self.fq!r})"


class SympMap:
    """Element of Sp(W) as a 2m x 2m matrix over F_q, verified symplectic
    at construction.  Acts on column vectors."""

    __slots__ = ("space", "rows")

    def __init__(self, space: SympSpace, rows, check: bool = True):
        self.space = space
        self.rows = tuple(tuple(r) for r in rows)
        if check and not self._is_symplectic():
            raise ValueError("matrix does not preserve the symplectic form")

    def _is_symplectic(self) -> bool:
        space = self.space
        n = space.dim
        cols = [self.column(j) for j in range(n)]
        # <g e_i, g e_j> must match <e_i, e_j> for all basis pairs
        std = [[0] * n for _ in range(n)]
        for i in range(space.m):
            std[i][space.m + i] = 1
            std[space.m + i][i] = space.fq.neg_t[1]
        for i in range(n):
            for j in range(n):
                if space.pairing(cols[i], cols[j]) != std[i][j]:
                    return False
        return True

    @classmethod
    def identity(cls, space: SympSpace) -> "SympMap":
        n = space.dim
        return cls(space, [[1 if i == j else 0 for j in range(n)] for i in range(n)],
                   check=False)

    def column(self, j: int):
        return tuple(r[j] for r in self.rows)

    def apply(self, v):
        fq = self.space.fq
        add, mul = fq.add_t, fq.mul_t
        out = []
        for row in self.rows:
            acc = 0
            for a, b in zip(row, v):
                if a and b:
                    acc = add[acc][mul[a][b]]
            out.append(acc)
        return tuple(out)

    def __matmul__(self, other: "SympMap") -> "SympMap":
        fq = self.space.fq
        add, mul = fq.add_t, fq.mul_t
        n = self.space.dim
        orows = other.rows
        out = []
        for row in self.rows:
            new = [0] * n
            for k, a in enumerate(row):
                if a:
                    orow = orows[k]
                    for j in range(n):
                        b = orow[j]
                        if b:
                            new[j] = add[new[j]][mul[a][b]]
            out.append(new)
        return SympMap(self.space, out, check=False)

    def inverse(self) -> "SympMap":
        # g^-1 = -J g^T J for symplectic g
        space = self.space
        fq = space.fq
        m, n = space.m, space.dim
        gt = [[self.rows[j][i] for j in range(n)] for i in range(n)]

        def j_apply(mat):
            # J = [[0, I], [-I, 0]] acting by left multiplication
            return [mat[m + i] for i in range(m)] + \
                   [[fq.neg_t[x] for x in mat[i]] for i in range(m)]

        jm = j_apply(gt)
        # right multiplication by J: (M J) row = (-row[m:], row[:m])
        jmj = [[fq.neg_t[x] for x in row[m:]] + list(row[:m]) for row in jm]
        return SympMap(space, [[fq.neg_t[x] for x in row] for row in jmj], check=False)

    def block(self, bi: int, bj: int):
        """m x m block (0/1 indexed by half): bi, bj in {0, 1}."""
        m = self.space.m
        return [list(self.rows[bi * m + i][bj * m:bj * m + m]) for i in range(m)]

    def __eq__(self, other):
        if not isinstance(other, SympMap):
            return NotImplemented
        return self.space is other.space and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def to_json(self):
        decode = self.space.fq._decode
        return [[list(decode(x)) for x in row] for row in self.rows]

    def __repr__(self):
        return f"SympMap({self.rows})"


class Lagrangian:
    """A lagrangian of W: m independent, pairwise-orthogonal vectors.
    The stored basis is put in reduced row echelon form so that equal
    subspaces compare equal."""

    __slots__ = ("space", "vectors")

    def __init__(self, space: SympSpace, vectors):
        vectors = [tuple(v) for v in vectors]
        if len(vectors) != space.m:
            raise ValueError(f"a lagrangian needs {space.m} vectors")
        mat = space.matrix_of_vectors(vectors)
        if row_rank(mat) != space.m:
            raise ValueError("vectors are not independent")
        for u, v in itertools.combinations(vectors, 2):
            if space.pairing(u, v) != 0:
                raise ValueError("subspace is not isotropic")
        self.space = space
        self.vectors = tuple(_rref_vectors(space, vectors))

    def contains(self, v) -> bool:
        mat = self.space.matrix_of_vectors(list(self.vectors) + [v])
        return row_rank(mat) == self.space.m

    def transform(self, g: SympMap) -> "Lagrangian":
        return Lagrangian(self.space, [g.apply(v) for v in self.vectors])

    def __eq__(self, other):
        if not isinstance(other, Lagrangian):
            return NotImplemented
        return self.space is other.space and self.vectors == other.vectors

    def __hash__(self):
        return hash(self.vectors)

    def __repr__(self):
        return f"Lagrangian({self.vectors})"


def _rref_vectors(space: SympSpace, vectors):
    mat = space.matrix_of_vectors(vectors)
    from .exactalg import _rref
    rows, pivots = _rref(mat)
    return [tuple(rows[i]) for i in range(len(pivots))]


def standard_x(space: SympSpace) -> Lagrangian:
    return Lagrangian(space, [space.basis_e(i) for i in range(space.m)])

def standard_y(space: SympSpace) -> Lagrangian:
    return Lagrangian(space, [space.basis_f(i) for i in range(space.m)])

def oblique_lagrangian(space: SympSpace) -> Lagrangian:
    """span(e_i + f_i): a lagrangian transverse to both X and Y."""
    return Lagrangian(space, [space.vec_add(space.basis_e(i), space.basis_f(i))
                              for i in range(space.m)])


# ----------------------------------------------------------------------
# coset frames: dual basis completing a lagrangian to a symplectic basis

class CosetFrame:
    """For a lagrangian A: a symplectic completion (a_i; b_i) with
    <a_i, b_j> = delta_ij and b's isotropic, plus the q^m transversal of
    W/A spanned by the b_i, enumerated deterministically."""

    __slots__ = ("space", "a_basis", "b_basis", "transversal", "index")

    def __init__(self, space: SympSpace, lagrangian: Lagrangian):
        self.space = space
        a_basis = list(lagrangian.vectors)
        b_basis = []
        fq = space.fq
        m = space.m
        for i in range(m):
            rows = []
            rhs = []
            for k, a in enumerate(a_basis):
                rows.append(_pairing_row(space, a))
                rhs.append(1 if k == i else 0)
            for b in b_basis:
                rows.append(_pairing_row(space, b))
                rhs.append(0)
            mat = RingMatrix.from_rows(fq, rows)
            b_basis.append(tuple(solve_linear(mat, rhs)))
        self.a_basis = tuple(a_basis)
        self.b_basis = tuple(b_basis)
        self.transversal = tuple(space.span_points(b_basis))
        self.index = {v: i for i, v in enumerate(self.transversal)}

    def coordinates(self, v):
        """(alpha, beta) with v = sum(alpha_i a_i) + sum(beta_i b_i)."""
        space = self.space
        beta = [space.pairing(a, v) for a in self.a_basis]
        alpha = [space.fq.neg_t[space.pairing(b, v)] for b in self.b_basis]
        return alpha, beta

    def rep(self, v):
        """The transversal representative of v + A."""
        space = self.space
        r = space.zero_vec
        for a, b in zip(self.a_basis, self.b_basis):
            c = space.pairing(a, v)
            if c:
                r = space.vec_add(r, space.vec_scale(c, b))
        return r


def _pairing_row(space: SympSpace, u):
    """Row vector of the functional x -> <u, x> in coordinates."""
    fq = space.fq
    m = space.m
    row = [0] * space.dim
    for i in range(m):
        row[m + i] = u[i]
        row[i] = fq.neg_t[u[m + i]]
    return row


# ----------------------------------------------------------------------
# generators, enumeration, Bruhat decomposition

def _embed_gl_block(space: SympSpace, a_rows) -> SympMap:
    """m(A) = diag(A, A^-T), preserving X."""
    fq = space.fq
    m = space.m
    amat = RingMatrix.from_rows(fq, a_rows)
    ainv_t = invert_field_matrix(amat).transpose()
    n = space.dim
    rows = [[0] * n for _ in range(n)]
    for i in range(m):
        for j in range(m):
            rows[i][j] = amat[i, j]
            rows[m + i][m + j] = ainv_t[i, j]
    return SympMap(space, rows)


def _embed_unipotent(space: SympSpace, b_rows) -> SympMap:
    """n(B) = [[I, B], [0, I]] for symmetric B."""
    m = space.m
    n = space.dim
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = 1
    for i in range(m):
        for j in range(m):
            rows[i][m + j] = b_rows[i][j]
    return SympMap(space, rows)


def weyl_w(space: SympSpace, j: int) -> SympMap:
    """The representative w_j (sign convention in W_J_SIGN_CONVENTION)."""
    fq = space.fq
    m = space.m
    n = space.dim
    rows = [[0] * n for _ in range(n)]
    for i in range(m):
        if i < j:
            rows[m + i][i] = fq.neg_t[1]  # e_i -> -f_i
            rows[i][m + i] = 1            # f_i -> e_i
        else:
            rows[i][i] = 1
            rows[m + i][m + i] = 1
    return SympMap(space, rows, check=False)


def sp_generators(space: SympSpace):
    """A generating set: Siegel-parabolic generators plus the full Weyl
    element."""
    fq = space.fq
    m = space.m
    gens = []
    # torus part: GL_m generators embedded as m(A)
    prim = fq.primitive()
    diag = [[prim if i == j == 0 else (1 if i == j else 0) for j in range(m)]
            for i in range(m)]
    gens.append(_embed_gl_block(space, diag))
    for i in range(m):
        for j in range(m):
            if i != j:
                ele = [[1 if a == b else 0 for b in range(m)] for a in range(m)]
                ele[i][j] = 1
                gens.append(_embed_gl_block(space, ele))
    # unipotent part: n(B) for symmetric B over the power basis of F_q
    basis_scalars = [fq.p ** k for k in range(fq.f)]  # codes of 1, t, t^2, ...
    for s in basis_scalars:
        for i in range(m):
            b = [[0] * m for _ in range(m)]
            b[i][i] = s
            gens.append(_embed_unipotent(space, b))
        for i in range(m):
            for j in range(i + 1, m):
                b = [[0] * m for _ in range(m)]
                b[i][j] = b[j][i] = s
                gens.append(_embed_unipotent(space, b))
    gens.append(weyl_w(space, m))
    return gens


def sp_order(space: SympSpace) -> int:
    q = space.fq.q
    m = space.m
    order = q ** (m * m)
    for i in range(1, m + 1):
        order *= q ** (2 * i) - 1
    return order


def sp_elements(space: SympSpace, mode: str = "exhaustive",
                count: int | None = None, seed: int = 0):
    """Stream of Sp(W) elements.

    exhaustive: each element exactly once (breadth-first closure of the
    generator set; refused above 10^6 elements).  sample: uniform-ish
    elements as seeded random generator words of length >= 32.
    """
    if mode == "exhaustive":
        if sp_order(space) > 10 ** 6:
            raise ValueError("group too large for exhaustive enumeration")
        gens = sp_generators(space)
        ident = SympMap.identity(space)
        seen = {ident.rows: ident}
        frontier = [ident]
        yield ident
        while frontier:
            new_frontier = []
            for g in frontier:
                for s in gens:
                    h = g @ s
                    if h.rows not in seen:
                        seen[h.rows] = h
                        new_frontier.append(h)
                        yield h
            frontier = new_frontier
    elif mode == "sample":
        if count is None:
            raise ValueError("sample mode needs a count")
        rng = random.Random(seed)
        gens = sp_generators(space)
        for _ in range(count):
            g = SympMap.identity(space)
            for _ in range(32):
                g = g @ rng.choice(gens)
            yield g
    else:
        raise ValueError(f"unknown mode {mode!r}")


class BruhatFactorization:
    """g = p1 w_j p2 with p1, p2 in the Siegel parabolic P(X)."""

    __slots__ = ("p1", "j", "p2", "w")

    def __init__(self, p1: SympMap, j: int, p2: SympMap, w: SympMap):
        self.p1 = p1
        self.j = j
        self.p2 = p2
        self.w = w


def in_parabolic(g: SympMap) -> bool:
    """Membership in P(X): vanishing lower-left m x m block."""
    m = g.space.m
    return all(g.rows[m + i][j] == 0 for i in range(m) for j in range(m))


def det_x(g: SympMap) -> FqElem:
    """det of the action on X, for g in P(X)."""
    if not in_parabolic(g):
        raise ValueError("element does not stabilize X")
    fq = g.space.fq
    block = RingMatrix.from_rows(fq, g.block(0, 0))
    return FqElem(fq, field_det(block))


def bruhat_decompose(g: SympMap) -> BruhatFactorization:
    """Bruhat decomposition relative to P(X): returns (p1, j, p2) with
    p1 w_j p2 == g and j = rank of the lower-left block."""
    space = g.space
    fq = space.fq
    m = space.m
    c_block = RingMatrix.from_rows(fq, g.block(1, 0))

    # row/column reduce C to diag(-I_j, 0)
    e_rows = RingMatrix.identity(fq, m).to_rows()
    f_cols = RingMatrix.identity(fq, m).to_rows()
    a = c_block.to_rows()
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, m) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        e_rows[r], e_rows[pivot] = e_rows[pivot], e_rows[r]
        inv = fq.inv(a[r][c])
        a[r] = [fq.mul(inv, x) for x in a[r]]
        e_rows[r] = [fq.mul(inv, x) for x in e_rows[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                fct = a[i][c]
                a[i] = [fq.sub(x, fq.mul(fct, y)) for x, y in zip(a[i], a[r])]
                e_rows[i] = [fq.sub(x, fq.mul(fct, y)) for x, y in zip(e_rows[i], e_rows[r])]
        r += 1
    j = r
    # column permutation/elimination so the nonzero part sits in the first j columns
    for rr in range(j):
        pc = next(c for c in range(m) if a[rr][c] != 0)
        if pc != rr:
            for row in a:
                row[rr], row[pc] = row[pc], row[rr]
            for row in f_cols:
                row[rr], row[pc] = row[pc], row[rr]
        # clear the rest of row rr
        for c in range(m):
            if c != rr and a[rr][c] != 0:
                fct = a[rr][c]
                for row in a:
                    row[c] = fq.sub(row[c], fq.mul(fct, row[rr]))
                for row in f_cols:
                    row[c] = fq.sub(row[c], fq.mul(fct, row[rr]))
    # want -I_j instead of I_j: negate the first j rows of E
    for i in range(j):
        e_rows[i] = [fq.neg_t[x] for x in e_rows[i]]

    # m_left = m(E'), with E'^{-T} = e_rows, i.e. E' = (e_rows)^{-T}
    e_mat = RingMatrix.from_rows(fq, e_rows)
    e_prime = invert_field_matrix(e_mat.transpose())
    m_left = _embed_gl_block(space, e_prime.to_rows())
    m_right = _embed_gl_block(space, f_cols)

    g1 = (m_left @ g) @ m_right
    # now C-block of g1 is diag(-I_j, 0); kill D via a symmetric unipotent
    d_block = g1.block(1, 1)
    b = [[0] * m for _ in range(m)]
    for i in range(j):
        for c in range(m):
            b[i][c] = d_block[i][c]
    for i in range(j):
        for c in range(j, m):
            b[c][i] = b[i][c]
    n_b = _embed_unipotent(space, b)
    g2 = g1 @ n_b
    d2 = g2.block(1, 1)
    # scale the K-block of D to the identity with a torus element
    f2 = [[1 if i == c else 0 for c in range(m)] for i in range(m)]
    for i in range(j, m):
        for c in range(j, m):
            f2[i][c] = d2[c][i]  # transpose of D_KK
    m_f2 = _embed_gl_block(space, f2)
    g3 = g2 @ m_f2

    w = weyl_w(space, j)
    h = g3 @ w.inverse()
    if not in_parabolic(h):
        raise AssertionError("Bruhat reduction failed to land in P(X)")
    p1 = m_left.inverse() @ h
    p2 = (m_right @ (n_b @ m_f2)).inverse()
    if not (in_parabolic(p1) and in_parabolic(p2)):
        raise AssertionError("Bruhat factors are not parabolic")
    return BruhatFactorization(p1, j, p2, w)
