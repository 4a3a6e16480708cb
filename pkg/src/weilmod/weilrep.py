"""Weil factors (normalized Gauss sums), the projective action of Sp(W) on
an induced model, its fiber-product lift, the canonical section through the
Bruhat decomposition, the associated 2-cocycle, and scalar extension of the
whole structure to residue fields.

Orientation constant, fixed project-wide: a metaplectic pair (g, M)
satisfies M rho(h) M^-1 = rho(g.h) with the symplectic action
g.(w, t) = (gw, t).  This matches the transport operator
(I_g f)(h) = f(g^-1 . h) composed with a model-change operator back to the
reference model, and makes the canonical section multiplicative over a
finite field, which the exhaustive pair sweeps certify.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from .cyclotomic import CoeffRing, CycNum, ResidueField, UniversalRing, phi_reduce
from .exactalg import RingMatrix, mat_mul
from .finsymp import Lagrangian, SympMap, SympSpace, bruhat_decompose, det_x, \
    sp_elements, sp_generators, sp_order, standard_x, weyl_w
from .heisenberg import HeisElem, InducedModel, build_model, heisenberg_generators
from .intertwine import Intertwiner, build_intertwiner, compatible_omega

COVARIANCE_CONVENTION = "M rho(h) M^-1 = rho(g.h), g.(w,t) = (gw, t)"


class NotScalarError(AssertionError):
    """A product that Schur's lemma forces to be scalar is not; signals a
    section bug, not a bad input."""


# ----------------------------------------------------------------------
# quadratic forms and Weil factors

class QuadraticForm:
    """A quadratic form on an abstract F_q^n, stored through the Gram
    matrix of its polar bilinear form: Q(x) = B(x, x) / 2."""

    __slots__ = ("fq", "dim", "gram")

    def __init__(self, fq, dim: int, gram):
        gram = tuple(tuple(r) for r in gram)
        if len(gram) != dim or any(len(r) != dim for r in gram):
            raise ValueError("gram matrix has the wrong shape")
        for i in range(dim):
            for j in range(dim):
                if gram[i][j] != gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        self.fq = fq
        self.dim = dim
        self.gram = gram

    @classmethod
    def diagonal(cls, fq, coeffs) -> "QuadraticForm":
        """Q(x) = sum a_i x_i^2."""
        n = len(coeffs)
        two = fq.from_int(2)
        gram = [[fq.mul_t[two][coeffs[i]] if i == j else 0 for j in range(n)]
                for i in range(n)]
        return cls(fq, n, gram)

    @classmethod
    def weyl_restriction(cls, space: SympSpace, j: int) -> "QuadraticForm":
        """Q(x) = <x, w_j x>/2 on the quotient of X by its w_j-fixed part,
        in the basis of the first j e-vectors.

        The slot order is tied to the w_j sign convention and the
        orientation of the transport operator: with this combination the
        canonical section is multiplicative over every finite field (the
        exhaustive pair sweeps are the arbiter; the opposite order flips
        the cocycle to -1 on the open-cell triple products whenever -1 is
        a nonsquare)."""
        w = weyl_w(space, j)
        fq = space.fq
        half = fq.half
        basis = [space.basis_e(i) for i in range(j)]
        gram = []
        for u in basis:
            row = []
            wu = w.apply(u)
            for v in basis:
                wv = w.apply(v)
                s = fq.add_t[space.pairing(u, wv)][space.pairing(v, wu)]
                row.append(fq.mul_t[half][s])
            gram.append(row)
        return cls(fq, j, gram)

    def negated(self) -> "QuadraticForm":
        neg = self.fq.neg_t
        return QuadraticForm(self.fq, self.dim,
                             [[neg[x] for x in row] for row in self.gram])

    def evaluate(self, x) -> int:
        fq = self.fq
        acc = 0
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, xj in enumerate(x):
                if xj:
                    acc = fq.add_t[acc][fq.mul_t[fq.mul_t[self.gram[i][j]][xi]][xj]]
        return fq.mul_t[fq.half][acc]

    def is_zero_form(self) -> bool:
        return all(x == 0 for row in self.gram for x in row)

    def radical_basis(self):
        """Basis of rad(Q) = ker(B), as coefficient vectors."""
        from .exactalg import kernel_basis
        mat = RingMatrix.from_rows(self.fq, [list(r) for r in self.gram])
        return [tuple(v) for v in kernel_basis(mat)]

    def nondegenerate_part(self) -> "QuadraticForm":
        """The induced form on a deterministic complement of the radical."""
        from .exactalg import row_rank
        rad = self.radical_basis()
        if not rad:
            return self
        fq = self.fq
        std = [tuple(1 if i == j else 0 for j in range(self.dim))
               for i in range(self.dim)]
        picked = []
        current = [list(v) for v in rad]
        rank = len(rad)
        for v in std:
            trial = current + [list(v)]
            r = row_rank(RingMatrix.from_rows(fq, trial))
            if r > rank:
                picked.append(v)
                current = trial
                rank = r
        gram = [[_bilinear(self, u, v) for v in picked] for u in picked]
        return QuadraticForm(fq, len(picked), gram)

    def __repr__(self):
        return f"QuadraticForm(dim={self.dim}, gram={self.gram})"


def _bilinear(q: QuadraticForm, u, v) -> int:
    fq = q.fq
    acc = 0
    for i, ui in enumerate(u):
        if not ui:
            continue
        for j, vj in enumerate(v):
            if vj:
                acc = fq.add_t[acc][fq.mul_t[fq.mul_t[q.gram[i][j]][ui]][vj]]
    return acc


def _root_images(ring: CoeffRing, p: int):
    if isinstance(ring, ResidueField):
        return [phi_reduce(CycNum.zeta(p, k), ring) for k in range(p)]
    return [CycNum.zeta(p, k) for k in range(p)]


def weil_factor(q_form: QuadraticForm, ring: CoeffRing, measure_unit=None):
    """The non-normalized Weil factor of psi o Q: the Gauss sum of the
    nondegenerate part over the coefficient ring (the zero form
    contributes the volume of the point).  Always a unit."""
    unit = measure_unit if measure_unit is not None else ring.one()
    if q_form.is_zero_form():
        return unit
    nd = q_form.nondegenerate_part()
    fq = nd.fq
    roots = _root_images(ring, fq.p)
    total = ring.zero()
    for x in itertools.product(range(fq.q), repeat=nd.dim):
        total = ring.add(total, roots[fq.trace_t[nd.evaluate(x)]])
    return ring.mul(unit, total)


def omega_ratio(a: int, b: int, fq, ring: CoeffRing):
    """The measure-independent unit Omega(psi o Q_a) / Omega(psi o Q_b)
    for the rank-one forms Q_a(x) = a x^2, a and b nonzero."""
    if a == 0 or b == 0:
        raise ValueError("the rank-one forms need nonzero coefficients")
    if a == b:
        return ring.one()
    oa = weil_factor(QuadraticForm.diagonal(fq, [a]), ring)
    ob = weil_factor(QuadraticForm.diagonal(fq, [b]), ring)
    if isinstance(ring, UniversalRing):
        return oa * ob.inverse()
    return ring.mul(oa, ring.inv(ob))


# ----------------------------------------------------------------------
# the fiber product, extensionally

class MetaplecticElem:
    """A pair (g, M): g in Sp(W) and M an invertible matrix over the
    model's ring implementing g's action on the Heisenberg group (see
    COVARIANCE_CONVENTION)."""

    __slots__ = ("g", "matrix", "model")

    def __init__(self, g: SympMap, matrix: RingMatrix, model: InducedModel):
        self.g = g
        self.matrix = matrix
        self.model = model

    def check_covariance(self) -> bool:
        """Generator-checked: M rho(h) == rho(g.h) M, exact."""
        for h in heisenberg_generators(self.model.space):
            lhs = mat_mul(self.matrix, self.model.act(h))
            rhs = mat_mul(self.model.act(h.transform(self.g)), self.matrix)
            if lhs != rhs:
                return False
        return True

    def __repr__(self):
        return f"MetaplecticElem(g={self.g.rows}, dim={self.matrix.rows})"


def transport_matrix(model: InducedModel, g: SympMap,
                     gmodel: InducedModel) -> RingMatrix:
    """Matrix of the transport f -> f(g^-1 . ) from the model of A to the
    model of gA; monomial."""
    ring = model.ring
    space = model.space
    ginv = g.inverse()
    n = model.dim
    entries = [[ring.zero()] * n for _ in range(n)]
    for w_idx, w in enumerate(model.frame.transversal):
        gw = g.apply(w)
        rp = gmodel.frame.rep(gw)
        r_idx = gmodel.frame.index[rp]
        val = model.evaluate_basis(w_idx, ginv.apply(rp), 0)
        if val is None:
            raise AssertionError("transport is not supported where expected")
        entries[r_idx][w_idx] = val
    return RingMatrix.from_rows(ring, entries)


def sigma_projective(g: SympMap, model: InducedModel) -> MetaplecticElem:
    """One representative of the projective action of g on the model:
    transport to the gA-model followed by a model-change operator back,
    with counting measure.  Determined up to a unit only."""
    gchar = model.character.transform(g)
    gmodel = InducedModel(model.space, gchar, model.ring)
    ig = transport_matrix(model, g, gmodel)
    back = build_intertwiner(gmodel, model)
    return MetaplecticElem(g, mat_mul(back.matrix, ig), model)


def section_sigma(g: SympMap, model: InducedModel,
                  corrupt: bool = False) -> MetaplecticElem:
    """The canonical (unit-normalized) representative of g on the
    untwisted reference model of X.

    Writes g = p1 w_j p2 through the Siegel parabolic, normalizes the
    counting measure by the inverse Weil factor of Q_j(x) = <w_j x, x>/2,
    and corrects by the rank-one factor ratio at det_X(p1 p2).  Over a
    residue field every factor is computed natively in that field.

    ``corrupt`` multiplies the normalizer by a nontrivial root of unity
    whenever j > 0 (negative-control fixture for the sweep tests).
    """
    space = model.space
    x_ref = standard_x(space)
    if model.lagrangian != x_ref or model.character.twist != space.zero_vec:
        raise ValueError("the canonical section is defined on the untwisted "
                         "reference model of X")
    ring = model.ring
    br = bruhat_decompose(g)
    det = space.fq.mul_t[det_x(br.p1).code][det_x(br.p2).code]
    q_j = QuadraticForm.weyl_restriction(space, br.j)
    gauss = weil_factor(q_j, ring)
    if isinstance(ring, UniversalRing):
        unit = omega_ratio(1, det, space.fq, ring) * gauss.inverse()
    else:
        unit = ring.mul(omega_ratio(1, det, space.fq, ring), ring.inv(gauss))
    if corrupt and br.j > 0:
        unit = ring.mul(unit, model.root_images[1])

    gchar = model.character.transform(g)
    gmodel = InducedModel(space, gchar, ring)
    ig = transport_matrix(model, g, gmodel)
    back = build_intertwiner(gmodel, model, measure_unit=unit,
                             omega=space.zero_vec)
    return MetaplecticElem(g, mat_mul(back.matrix, ig), model)


def _extract_scalar(P: RingMatrix, S: RingMatrix):
    """The scalar lam with P == lam * S; NotScalarError if none exists."""
    ring = P.ring
    n = len(P.entries)
    for i in range(n):
        for j in range(i + 1, n):
            lhs = ring.mul(P.entries[i], S.entries[j])
            rhs = ring.mul(P.entries[j], S.entries[i])
            if not ring.eq(lhs, rhs):
                raise NotScalarError("product is not a scalar multiple of the section")
    pivot = next((k for k in range(n) if not ring.is_zero(S.entries[k])), None)
    if pivot is None:
        raise NotScalarError("section matrix is zero")
    if isinstance(ring, UniversalRing):
        lam = P.entries[pivot].exact_div(S.entries[pivot])
    else:
        lam = ring.mul(P.entries[pivot], ring.inv(S.entries[pivot]))
    if P != S.scaled(lam):
        raise NotScalarError("scalar extraction failed to reproduce the product")
    return lam


def cocycle(g1: SympMap, g2: SympMap, model: InducedModel,
            table: "SectionTable | None" = None):
    """The 2-cocycle value sigma(g1) sigma(g2) sigma(g1 g2)^-1, as the
    scalar it is forced to be; raises NotScalarError otherwise."""
    sec = table if table is not None else SectionTable(model)
    m1 = sec.section(g1).matrix
    m2 = sec.section(g2).matrix
    m12 = sec.section(g1 @ g2).matrix
    return _extract_scalar(mat_mul(m1, m2), m12)


def scalar_extend_element(elem: MetaplecticElem,
                          target_model: InducedModel) -> MetaplecticElem:
    """(g, M) over the universal ring -> (g, phi(M)) over a residue field."""
    ring = target_model.ring
    if not isinstance(ring, ResidueField):
        raise TypeError("scalar extension targets a residue field model")
    mat = elem.matrix.map_entries(lambda c: phi_reduce(c, ring), ring)
    return MetaplecticElem(elem.g, mat, target_model)


def conjugate_representative(elem: MetaplecticElem, conj: RingMatrix,
                             conj_inv: RingMatrix,
                             target_model: InducedModel) -> MetaplecticElem:
    """Model independence: push (g, M) through an invertible intertwiner."""
    return MetaplecticElem(elem.g, mat_mul(conj, mat_mul(elem.matrix, conj_inv)),
                           target_model)


def invert_intertwiner(fwd: Intertwiner, bwd: Intertwiner) -> RingMatrix:
    """Inverse of fwd.matrix, obtained from the reverse operator: the
    composite is scalar by Schur and the scalar is a unit."""
    comp = mat_mul(bwd.matrix, fwd.matrix)
    ring = comp.ring
    ident = RingMatrix.identity(ring, comp.rows)
    lam = _extract_scalar(comp, ident)
    if isinstance(ring, UniversalRing):
        return bwd.matrix.scaled(lam.inverse())
    return bwd.matrix.scaled(ring.inv(lam))


# ----------------------------------------------------------------------
# section tables and verification sweeps

class SectionTable:
    """Cache of canonical section values over one model (read-only use is
    safe to share across threads)."""

    def __init__(self, model: InducedModel, corrupt: bool = False):
        self.model = model
        self.corrupt = corrupt
        self._cache: dict = {}

    def section(self, g: SympMap) -> MetaplecticElem:
        elem = self._cache.get(g.rows)
        if elem is None:
            elem = section_sigma(g, self.model, corrupt=self.corrupt)
            self._cache[g.rows] = elem
        return elem


def _encode_universal(mat: RingMatrix, p: int):
    """(int64 array (n, n, p), e): mat == p^-e * array, coefficients in the
    redundant length-p basis with last coordinate zero."""
    n = mat.rows
    e = max((x.denom_exp for x in mat.entries), default=0)
    arr = np.zeros((n, n, p), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            x = mat[i, j]
            scale = p ** (e - x.denom_exp)
            arr[i, j, : p - 1] = [c * scale for c in x.coeffs]
    return arr, e


def _cyclo_matmul_batch(n1: np.ndarray, stack: np.ndarray, p: int) -> np.ndarray:
    """Batched matrix product over Z[zeta_p] in the redundant basis:
    n1 is (n, n, p), stack is (G, n, n, p); result (G, n, n, p)."""
    out = np.zeros((stack.shape[0],) + n1.shape, dtype=np.int64)
    for s in range(p):
        rolled = np.roll(n1, s, axis=2)
        out += np.einsum("ijt,gjk->gikt", rolled, stack[:, :, :, s])
    return out


def _canonical(arr: np.ndarray, p: int) -> np.ndarray:
    """Fold the redundant zeta^(p-1) coordinate."""
    return arr[..., : p - 1] - arr[..., p - 1:p]


_INT64_GUARD = 2 ** 61


def cocycle_sweep_exhaustive(model: InducedModel, corrupt: bool = False,
                             crosscheck: int = 20, seed: int = 0) -> dict:
    """Checks sigma(g1) sigma(g2) == sigma(g1 g2) for every ordered pair of
    group elements, with a vectorized integer fast path plus a seeded
    cross-check of random pairs against the plain ring arithmetic."""
    space = model.space
    if not isinstance(model.ring, UniversalRing):
        raise TypeError("the exhaustive sweep runs over the universal ring")
    p = space.fq.p
    elements = list(sp_elements(space, "exhaustive"))
    index = {g.rows: i for i, g in enumerate(elements)}
    table = SectionTable(model, corrupt=corrupt)
    encoded = []
    exps = []
    for g in elements:
        arr, e = _encode_universal(table.section(g).matrix, p)
        encoded.append(arr)
        exps.append(e)
    stack = np.stack(encoded)
    exps = np.array(exps, dtype=np.int64)
    # index of g1 @ g2 for every ordered pair
    n_g = len(elements)
    prod_idx = np.empty((n_g, n_g), dtype=np.int64)
    for i, g1 in enumerate(elements):
        for j, g2 in enumerate(elements):
            prod_idx[i, j] = index[(g1 @ g2).rows]

    max_in = int(np.abs(stack).max())
    failures = []
    for i in range(n_g):
        prod = _cyclo_matmul_batch(stack[i], stack, p)
        lhs = _canonical(prod, p)
        targets = stack[prod_idx[i]]
        rhs = _canonical(targets, p)
        d = exps[i] + exps - exps[prod_idx[i]]
        lhs_scale = np.where(d < 0, p ** (-d), 1)
        rhs_scale = np.where(d > 0, p ** d, 1)
        bound = max(max_in * max_in * model.dim * p * int(lhs_scale.max()),
                    max_in * int(rhs_scale.max()))
        if bound >= _INT64_GUARD:
            raise OverflowError("sweep coefficients would overflow the fast path")
        lhs = lhs * lhs_scale[:, None, None, None]
        rhs = rhs * rhs_scale[:, None, None, None]
        bad = np.nonzero(np.any(lhs != rhs, axis=(1, 2, 3)))[0]
        for j in bad:
            failures.append((elements[i].rows, elements[int(j)].rows))

    # independent slow-path confirmation on sampled pairs
    rng = random.Random(seed)
    for _ in range(crosscheck):
        g1 = elements[rng.randrange(n_g)]
        g2 = elements[rng.randrange(n_g)]
        exact_ok = mat_mul(table.section(g1).matrix, table.section(g2).matrix) \
            == table.section(g1 @ g2).matrix
        fast_ok = (g1.rows, g2.rows) not in failures
        if exact_ok != fast_ok:
            raise AssertionError("fast sweep disagrees with exact arithmetic")
    return {
        "check": "cocycle",
        "group_order": n_g,
        "pairs_tested": n_g * n_g,
        "failures": failures[:10],
        "failure_count": len(failures),
        "seed": seed,
    }


def cocycle_sweep_sampled(model: InducedModel, pairs: int, seed: int = 0,
                          corrupt: bool = False, crosscheck: int = 10) -> dict:
    """Seeded random-pair version of the sweep for groups too large to
    enumerate; same exactness guarantees."""
    space = model.space
    if not isinstance(model.ring, UniversalRing):
        raise TypeError("the sampled sweep runs over the universal ring")
    p = space.fq.p
    table = SectionTable(model, corrupt=corrupt)
    rng = random.Random(seed)
    sampler = sp_elements(space, "sample", count=2 * pairs, seed=seed)
    encoded_cache: dict = {}

    def encoded(g):
        got = encoded_cache.get(g.rows)
        if got is None:
            got = _encode_universal(table.section(g).matrix, p)
            encoded_cache[g.rows] = got
        return got

    failures = []
    checked = []
    it = iter(sampler)
    for _ in range(pairs):
        g1 = next(it)
        g2 = next(it)
        a1, e1 = encoded(g1)
        a2, e2 = encoded(g2)
        a12, e12 = encoded(g1 @ g2)
        prod = _cyclo_matmul_batch(a1, a2[None], p)[0]
        d = e1 + e2 - e12
        lhs = _canonical(prod, p) * (p ** max(0, -d))
        rhs = _canonical(a12[None], p)[0] * (p ** max(0, d))
        if np.abs(lhs).max() >= _INT64_GUARD or np.abs(rhs).max() >= _INT64_GUARD:
            raise OverflowError("sweep coefficients would overflow the fast path")
        ok = bool(np.array_equal(lhs, rhs))
        if not ok:
            failures.append((g1.rows, g2.rows))
        checked.append((g1, g2, ok))
    for g1, g2, ok in rng.sample(checked, min(crosscheck, len(checked))):
        exact_ok = mat_mul(table.section(g1).matrix, table.section(g2).matrix) \
            == table.section(g1 @ g2).matrix
        if exact_ok != ok:
            raise AssertionError("fast sweep disagrees with exact arithmetic")
    return {
        "check": "cocycle",
        "pairs_tested": pairs,
        "failures": failures[:10],
        "failure_count": len(failures),
        "seed": seed,
    }
