"""The Heisenberg group H = W x F, extended characters on A_H, the induced
models V_A with their H-action, projectors onto basis lines, Hom-space
ranks, and irreducibility certificates over residue fields.

A model's basis is indexed by the deterministic transversal of W/A coming
from a CosetFrame; the action of any group element is a monomial matrix
whose nonzero entries are p-th roots of unity.  That monomial structure is
exposed directly (permutation + root-of-unity exponents) and is what the
Hom-space solver consumes: since the structure morphism is injective on
p-power roots of unity, exponent arithmetic mod p is exact over every
coefficient ring in scope.
"""

from __future__ import annotations

import random

from .cyclotomic import CoeffRing, CycNum, ResidueField, UniversalRing, \
    FractionFieldRing, phi_reduce
from .exactalg import RingMatrix
from .finsymp import CosetFrame, Lagrangian, SympSpace


class HeisElem:
    """(w, t) in W x F with the twisted product
    (w,t)(w',t') = (w + w', t + t' + <w,w'>/2)."""

    __slots__ = ("space", "w", "t")

    def __init__(self, space: SympSpace, w, t: int):
        self.space = space
        self.w = tuple(w)
        self.t = t

    def __mul__(self, other: "HeisElem") -> "HeisElem":
        if self.space is not other.space:
            raise ValueError("elements of different Heisenberg groups")
        space = self.space
        fq = space.fq
        t = fq.add_t[self.t][other.t]
        t = fq.add_t[t][fq.mul_t[fq.half][space.pairing(self.w, other.w)]]
        return HeisElem(space, space.vec_add(self.w, other.w), t)

    def inverse(self) -> "HeisElem":
        space = self.space
        return HeisElem(space, space.vec_neg(self.w), space.fq.neg_t[self.t])

    @classmethod
    def identity(cls, space: SympSpace) -> "HeisElem":
        return cls(space, space.zero_vec, 0)

    def transform(self, g) -> "HeisElem":
        """The Sp(W)-action g.(w,t) = (gw, t)."""
        return HeisElem(self.space, g.apply(self.w), self.t)

    def __eq__(self, other):
        if not isinstance(other, HeisElem):
            return NotImplemented
        return self.space is other.space and self.w == other.w and self.t == other.t

    def __hash__(self):
        return hash((self.w, self.t))

    def __repr__(self):
        return f"HeisElem(w={self.w}, t={self.t})"


def h_mul(a: HeisElem, b: HeisElem) -> HeisElem:
    return a * b


def heisenberg_generators(space: SympSpace):
    """Generators of H: the symplectic basis vectors lifted at time zero,
    plus central elements spanning the F_p-structure of the center."""
    gens = [HeisElem(space, space.basis_e(i), 0) for i in range(space.m)]
    gens += [HeisElem(space, space.basis_f(i), 0) for i in range(space.m)]
    gens += [HeisElem(space, space.zero_vec, space.fq.p ** k)
             for k in range(space.fq.f)]
    return gens


class ExtendedCharacter:
    """The extension psi_A(a, t) = psi(t + <c, a>) of psi to A_H = A x F,
    parametrized by a twist vector c (only c mod A matters)."""

    __slots__ = ("space", "lagrangian", "twist")

    def __init__(self, space: SympSpace, lagrangian: Lagrangian, twist=None):
        self.space = space
        self.lagrangian = lagrangian
        self.twist = tuple(twist) if twist is not None else space.zero_vec

    def exponent(self, a, t: int) -> int:
        """Tr(t + <c, a>) in Z/p: psi_A((a, t)) = zeta^exponent."""
        fq = self.space.fq
        val = fq.add_t[t][self.space.pairing(self.twist, a)]
        return fq.trace_t[val]

    def transform(self, g) -> "ExtendedCharacter":
        """The transported character on (gA)_H with psi_gA(g.a) = psi_A(a)."""
        return ExtendedCharacter(self.space, self.lagrangian.transform(g),
                                 g.apply(self.twist))

    def __eq__(self, other):
        if not isinstance(other, ExtendedCharacter):
            return NotImplemented
        if self.space is not other.space or self.lagrangian != other.lagrangian:
            return False
        # twists define the same character iff they differ by an element of A
        diff = self.space.vec_sub(self.twist, other.twist)
        return self.lagrangian.contains(diff)

    def __repr__(self):
        return f"ExtendedCharacter(A={self.lagrangian}, c={self.twist})"


class InducedModel:
    """The induced model of the Heisenberg group attached to (A, psi_A)
    over a coefficient ring B.

    Basis functions chi_w are indexed by the transversal of W/A; the
    right-translation action matrices are monomial with p-th root of unity
    entries.  act() results are memoized (read-only after construction, so
    concurrent sharing is safe under the GIL).
    """

    def __init__(self, space: SympSpace, character: ExtendedCharacter,
                 ring: CoeffRing):
        self.space = space
        self.character = character
        self.ring = ring
        self.frame = CosetFrame(space, character.lagrangian)
        self.dim = len(self.frame.transversal)
        # image of zeta^k in B, tabulated once
        p = space.fq.p
        if isinstance(ring, ResidueField):
            self.root_images = [phi_reduce(CycNum.zeta(p, k), ring)
                                for k in range(p)]
        else:
            self.root_images = [CycNum.zeta(p, k) for k in range(p)]
        self._monomial_cache = {}
        self._matrix_cache = {}

    @property
    def lagrangian(self) -> Lagrangian:
        return self.character.lagrangian

    def basis_labels(self):
        return self.frame.transversal

    # -- the action -----------------------------------------------------
    def act_monomial(self, h: HeisElem):
        """(perm, exps): rho(h) chi_w = zeta^exps[w] * chi_perm[w]."""
        key = (h.w, h.t)
        cached = self._monomial_cache.get(key)
        if cached is not None:
            return cached
        space = self.space
        fq = space.fq
        perm = []
        exps = []
        for w in self.frame.transversal:
            r = self.frame.rep(space.vec_sub(w, h.w))
            a = space.vec_sub(space.vec_add(r, h.w), w)
            # t_a = t + <r, u>/2 - <a, w>/2
            t_a = fq.add_t[h.t][fq.mul_t[fq.half][space.pairing(r, h.w)]]
            t_a = fq.sub(t_a, fq.mul_t[fq.half][space.pairing(a, w)])
            perm.append(self.frame.index[r])
            exps.append(self.character.exponent(a, t_a))
        result = (tuple(perm), tuple(exps))
        self._monomial_cache[key] = result
        return result

    def act(self, h: HeisElem) -> RingMatrix:
        """Matrix of rho(h) on the chi_w basis, over the coefficient ring."""
        key = (h.w, h.t)
        cached = self._matrix_cache.get(key)
        if cached is not None:
            return cached
        perm, exps = self.act_monomial(h)
        ring = self.ring
        entries = [[ring.zero()] * self.dim for _ in range(self.dim)]
        for col, (row, e) in enumerate(zip(perm, exps)):
            entries[row][col] = self.root_images[e]
        mat = RingMatrix.from_rows(ring, entries)
        self._matrix_cache[key] = mat
        return mat

    def apply_monomial(self, h: HeisElem, vec):
        """rho(h) applied to a coefficient vector, via the monomial data."""
        perm, exps = self.act_monomial(h)
        ring = self.ring
        out = [ring.zero()] * self.dim
        for col, v in enumerate(vec):
            if not ring.is_zero(v):
                out[perm[col]] = ring.mul(self.root_images[exps[col]], v)
        return out

    def evaluate_basis(self, w_index: int, v, t: int):
        """chi_w evaluated at the group point (v, t), as a ring element;
        zero when v does not lie in the coset of w."""
        space = self.space
        fq = space.fq
        r = self.frame.rep(v)
        if self.frame.index[r] != w_index:
            return None
        a = space.vec_sub(v, r)
        t_a = fq.sub(t, fq.mul_t[fq.half][space.pairing(a, r)])
        return self.root_images[self.character.exponent(a, t_a)]

    def generators(self):
        return heisenberg_generators(self.space)

    def to_json(self) -> dict:
        decode = self.space.fq._decode
        gens = self.generators()
        return {
            "dim": self.dim,
            "basis": [[list(decode(c)) for c in w] for w in self.frame.transversal],
            "generators": [{"w": [list(decode(c)) for c in h.w], "t": list(decode(h.t))}
                           for h in gens],
            "action": [_matrix_json(self.act(h)) for h in gens],
        }

    def __repr__(self):
        return f"InducedModel(dim={self.dim}, A={self.lagrangian}, over {self.ring!r})"


def _matrix_json(mat: RingMatrix):
    return [[_entry_json(mat[i, j]) for j in range(mat.cols)]
            for i in range(mat.rows)]

def _entry_json(x):
    return x.to_json()


def build_model(lagrangian: Lagrangian, twist, ring: CoeffRing) -> InducedModel:
    """The induced model for (A, psi_A^(c)) over B; dimension q^m."""
    space = lagrangian.space
    char = ExtendedCharacter(space, lagrangian, twist)
    return InducedModel(space, char, ring)


class GroupAlgebraElem:
    """Finite formal sum of Heisenberg elements with universal-ring
    coefficients, acting on models by convolution."""

    def __init__(self, terms):
        self.terms = list(terms)

    def apply(self, model: InducedModel, vec):
        ring = model.ring
        out = [ring.zero()] * model.dim
        for h, coeff in self.terms:
            c = coeff if not isinstance(model.ring, ResidueField) else \
                phi_reduce(coeff, model.ring)
            moved = model.apply_monomial(h, vec)
            for i, x in enumerate(moved):
                out[i] = ring.add(out[i], ring.mul(c, x))
        return out


def projector_phi(model: InducedModel, w_index: int) -> GroupAlgebraElem:
    """The group-algebra projector onto the basis line chi_w: averaging
    psi_A((-a, 0)) psi(<-w, a>) / |A| over a in A."""
    space = model.space
    fq = space.fq
    p = fq.p
    w = model.frame.transversal[w_index]
    a_points = space.span_points(model.frame.a_basis)
    vol_inverse = CycNum.p_inverse_power(p, fq.f * space.m)
    terms = []
    for a in a_points:
        e1 = model.character.exponent(space.vec_neg(a), 0)
        e2 = fq.trace_t[space.pairing(space.vec_neg(w), a)]
        coeff = CycNum.zeta(p, (e1 + e2) % p) * vol_inverse
        terms.append((HeisElem(space, a, 0), coeff))
    return GroupAlgebraElem(terms)


# ----------------------------------------------------------------------
# Hom spaces and irreducibility

class _PhasedUnionFind:
    """Union-find on matrix entries with relative root-of-unity phases
    (exponents mod p); tracks which components are forced to vanish."""

    def __init__(self, n: int, p: int):
        self.parent = list(range(n))
        self.phase = [0] * n  # value(i) = zeta^phase[i] * value(root(i))
        self.dead = [False] * n
        self.p = p

    def find(self, i: int):
        root = i
        acc = 0
        while self.parent[root] != root:
            acc += self.phase[root]
            root = self.parent[root]
        acc %= self.p
        # path compression with phase rewrite
        node = i
        rel = acc
        while self.parent[node] != node:
            nxt = self.parent[node]
            step = self.phase[node]
            self.parent[node] = root
            self.phase[node] = rel
            rel = (rel - step) % self.p
            node = nxt
        return root, acc

    def union(self, i: int, j: int, delta: int):
        """Impose value(i) = zeta^delta * value(j)."""
        ri, pi = self.find(i)
        rj, pj = self.find(j)
        if ri == rj:
            if (pi - pj - delta) % self.p != 0:
                self.dead[ri] = True
            return
        # attach rj under ri: value(rj) = zeta^(pi - delta - pj) value(ri)
        self.parent[rj] = ri
        self.phase[rj] = (pi - delta - pj) % self.p
        if self.dead[rj]:
            self.dead[ri] = True

    def live_component_count(self) -> int:
        roots = set()
        dead_roots = set()
        for i in range(len(self.parent)):
            r, _ = self.find(i)
            roots.add(r)
            if self.dead[r]:
                dead_roots.add(r)
        return len(roots) - len(dead_roots)


def hom_space_rank(model1: InducedModel, model2: InducedModel,
                   over=None) -> int:
    """Dimension of Hom_{B[H]}(V_1, V_2) over a coefficient field.

    Solves the sparse linear system M rho_1(h) = rho_2(h) M over the
    Heisenberg generators; each equation relates exactly two entries of M
    by a root-of-unity factor, so the system is eliminated by a weighted
    union-find.  Over the universal ring the rank must be taken over the
    fraction field, which the caller requests explicitly.
    """
    if over is None:
        over = model1.ring
    if not getattr(over, "is_field", False):
        raise TypeError(
            "Hom-space rank needs a field: pass a residue field or the "
            "fraction field of the universal ring")
    if isinstance(over, FractionFieldRing):
        if not isinstance(model1.ring, UniversalRing):
            raise TypeError("fraction-field rank applies to universal-ring models")
    elif model1.ring is not over:
        raise TypeError("models must live over the requested field")
    if model1.ring is not model2.ring:
        raise TypeError("models over different coefficient rings")
    if model1.space is not model2.space:
        raise ValueError("models over different symplectic spaces")

    d1, d2 = model1.dim, model2.dim
    p = model1.space.fq.p
    uf = _PhasedUnionFind(d1 * d2, p)
    for h in heisenberg_generators(model1.space):
        perm1, exps1 = model1.act_monomial(h)
        perm2, exps2 = model2.act_monomial(h)
        inv_perm2 = [0] * d2
        for s, r in enumerate(perm2):
            inv_perm2[r] = s
        for r in range(d2):
            s = inv_perm2[r]
            beta = exps2[s]
            for b in range(d1):
                # M[r, perm1[b]] * zeta^exps1[b] = zeta^beta * M[s, b]
                uf.union(r * d1 + perm1[b], s * d1 + b, (beta - exps1[b]) % p)
    return uf.live_component_count()


class IrreducibilityCertificate:
    """Outcome of the two-step residue-field irreducibility test."""

    def __init__(self, irreducible: bool, end_rank: int, witnesses):
        self.irreducible = irreducible
        self.end_rank = end_rank
        self.witnesses = witnesses  # list of (description, reached dimension)

    def __bool__(self):
        return self.irreducible

    def __repr__(self):
        return (f"IrreducibilityCertificate(irreducible={self.irreducible}, "
                f"end_rank={self.end_rank}, witnesses={self.witnesses})")


def _span_dimension(model: InducedModel, start_vec) -> int:
    """Dimension of the B[H]-submodule generated by start_vec, by closing
    the span under the generator action (exact Gaussian elimination)."""
    ring = model.ring
    gens = heisenberg_generators(model.space)
    basis_rows = []  # rows in echelon form: list of (pivot index, vector)

    def reduce_and_insert(vec):
        vec = list(vec)
        for pivot, row in basis_rows:
            if not ring.is_zero(vec[pivot]):
                f = vec[pivot]
                vec = [ring.sub(x, ring.mul(f, y)) for x, y in zip(vec, row)]
        lead = next((i for i, x in enumerate(vec) if not ring.is_zero(x)), None)
        if lead is None:
            return False
        inv = ring.inv(vec[lead])
        vec = [ring.mul(inv, x) for x in vec]
        basis_rows.append((lead, vec))
        basis_rows.sort(key=lambda t: t[0])
        return True

    frontier = [list(start_vec)]
    reduce_and_insert(start_vec)
    while frontier and len(basis_rows) < model.dim:
        new_frontier = []
        for v in frontier:
            for h in gens:
                moved = model.apply_monomial(h, v)
                if reduce_and_insert(moved):
                    new_frontier.append(moved)
        frontier = new_frontier
    return len(basis_rows)


def irreducibility_check(model: InducedModel, seed: int = 0) -> IrreducibilityCertificate:
    """Residue-field irreducibility: Schur rank 1 plus the check that each
    basis vector (and a few random vectors) generates the whole module."""
    if not isinstance(model.ring, ResidueField):
        raise TypeError("irreducibility test runs over a residue field")
    end_rank = hom_space_rank(model, model)
    witnesses = []
    ok = end_rank == 1
    ring = model.ring
    for i in range(model.dim):
        vec = [ring.zero()] * model.dim
        vec[i] = ring.one()
        dim = _span_dimension(model, vec)
        witnesses.append((f"basis chi_{i}", dim))
        ok = ok and dim == model.dim
    rng = random.Random(seed)
    l, deg = ring.l, ring.degree
    for k in range(5):
        vec = []
        for _ in range(model.dim):
            coeffs = [rng.randrange(l) for _ in range(deg)]
            vec.append(ring.element(coeffs))
        if all(ring.is_zero(v) for v in vec):
            vec[0] = ring.one()
        dim = _span_dimension(model, vec)
        witnesses.append((f"random vector {k}", dim))
        ok = ok and dim == model.dim
    return IrreducibilityCertificate(ok, end_rank, witnesses)
