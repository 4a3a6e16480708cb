"""Model-change operators between induced models: the integral operators
indexed by a compatibility vector omega and a measure on the quotient
(A1 cap A2) \\ A2, realized as exact matrices.

Conventions fixed here (and validated globally by the section tests in
weilrep): the group acts by right translation, an operator integrates on
the left as in its defining formula, and matrices act on column vectors,
so the matrix of a composition T2 o T1 is M2 @ M1.
"""

from __future__ import annotations

from .cyclotomic import CycNum, FractionFieldRing, ResidueField, UniversalRing, \
    phi_reduce
from .exactalg import RingMatrix, kernel_basis, row_rank
from .finsymp import Lagrangian, SympSpace
from .heisenberg import ExtendedCharacter, InducedModel, heisenberg_generators, \
    hom_space_rank


class IncompatibleOmegaError(ValueError):
    """omega fails the character-matching condition; carries a witness."""

    def __init__(self, witness):
        super().__init__(f"omega incompatible at a = {witness}")
        self.witness = witness


def _intersection_basis(space: SympSpace, l1: Lagrangian, l2: Lagrangian):
    """Deterministic basis of the subspace intersection."""
    v1, v2 = list(l1.vectors), list(l2.vectors)
    stacked = RingMatrix.from_rows(
        space.fq, [list(v) for v in v1] + [list(v) for v in v2]).transpose()
    out = []
    for combo in kernel_basis(stacked):
        v = space.zero_vec
        for c, b in zip(combo[:len(v1)], v1):
            if c:
                v = space.vec_add(v, space.vec_scale(c, b))
        out.append(v)
    from .finsymp import _rref_vectors
    return _rref_vectors(space, out) if out else []


def _complement_in(space: SympSpace, sub, whole):
    """Vectors of `whole` extending `sub` to a basis of span(whole)."""
    picked = []
    current = list(sub)
    rank = row_rank(space.matrix_of_vectors(current)) if current else 0
    for v in whole:
        trial = current + [v]
        r = row_rank(space.matrix_of_vectors(trial))
        if r > rank:
            picked.append(v)
            current = trial
            rank = r
    return picked


def omega_is_compatible(ext1: ExtendedCharacter, ext2: ExtendedCharacter,
                        omega) -> tuple[bool, object]:
    """Checks psi_A1((a,0)) psi_A2((a,0))^-1 = psi(<a, omega>) on all of
    A1 cap A2; returns (ok, witness-or-None)."""
    space = ext1.space
    fq = space.fq
    inter = _intersection_basis(space, ext1.lagrangian, ext2.lagrangian)
    for a in space.span_points(inter) if inter else [space.zero_vec]:
        lhs = (ext1.exponent(a, 0) - ext2.exponent(a, 0)) % fq.p
        rhs = fq.trace_t[space.pairing(a, omega)]
        if lhs != rhs:
            return False, a
    return True, None


def compatible_omega(ext1: ExtendedCharacter, ext2: ExtendedCharacter):
    """One vector omega satisfying the compatibility condition.

    With the twist parametrization psi_A(a, t) = psi(t + <c, a>), the
    difference of the two characters on the intersection is the pairing
    against c1 - c2, so omega = c2 - c1 always works.
    """
    space = ext1.space
    omega = space.vec_sub(ext2.twist, ext1.twist)
    ok, witness = omega_is_compatible(ext1, ext2, omega)
    if not ok:
        raise AssertionError(f"internal: closed-form omega fails at {witness}")
    return omega


class Intertwiner:
    """An exact matrix realization of a model-change operator."""

    __slots__ = ("source", "target", "omega", "measure_unit", "matrix")

    def __init__(self, source: InducedModel, target: InducedModel,
                 omega, measure_unit, matrix: RingMatrix):
        self.source = source
        self.target = target
        self.omega = omega
        self.measure_unit = measure_unit
        self.matrix = matrix

    def is_equivariant(self) -> bool:
        """Generator-checked H-equivariance: M rho1(h) == rho2(h) M."""
        for h in heisenberg_generators(self.source.space):
            lhs = self.matrix @ self.source.act(h)
            rhs = self.target.act(h) @ self.matrix
            if lhs != rhs:
                return False
        return True

    def to_json(self) -> dict:
        from .heisenberg import _matrix_json
        decode = self.source.space.fq._decode
        return {
            "A1": [[list(decode(c)) for c in v] for v in self.source.lagrangian.vectors],
            "A2": [[list(decode(c)) for c in v] for v in self.target.lagrangian.vectors],
            "c1": [list(decode(c)) for c in self.source.character.twist],
            "c2": [list(decode(c)) for c in self.target.character.twist],
            "omega": [list(decode(c)) for c in self.omega],
            "measure_unit": self.measure_unit.to_json(),
            "matrix": _matrix_json(self.matrix),
        }

    def __repr__(self):
        return (f"Intertwiner({self.source.lagrangian} -> "
                f"{self.target.lagrangian}, omega={self.omega})")


def build_intertwiner(source: InducedModel, target: InducedModel,
                      measure_unit=None, omega=None) -> Intertwiner:
    """The operator sending f to
    h -> unit * sum over coset reps a of psi_A2((a,0))^-1 f((omega,0)(a,0)h),
    evaluated against the two model bases.

    The sum runs over the deterministic transversal of (A1 cap A2) \\ A2;
    with the counting measure normalized so points have volume 1, the
    operator is invertible exactly when the measure unit is a unit.
    """
    if source.ring is not target.ring:
        raise ValueError("models over different coefficient rings")
    if source.space is not target.space:
        raise ValueError("models over different symplectic spaces")
    space = source.space
    fq = space.fq
    ring = source.ring
    if measure_unit is None:
        measure_unit = ring.one()
    if omega is None:
        omega = compatible_omega(source.character, target.character)
    else:
        ok, witness = omega_is_compatible(source.character, target.character, omega)
        if not ok:
            raise IncompatibleOmegaError(witness)

    inter = _intersection_basis(space, source.lagrangian, target.lagrangian)
    comp = _complement_in(space, inter, list(target.lagrangian.vectors))
    coset_reps = space.span_points(comp) if comp else [space.zero_vec]

    n_t, n_s = target.dim, source.dim
    entries = [[ring.zero()] * n_s for _ in range(n_t)]
    half = fq.half
    for r_idx, r in enumerate(target.frame.transversal):
        for a in coset_reps:
            # point (omega,0)(a,0)(r,0) = (omega + a + r, t)
            t = fq.mul_t[half][space.pairing(omega, a)]
            oa = space.vec_add(omega, a)
            t = fq.add_t[t][fq.mul_t[half][space.pairing(oa, r)]]
            v = space.vec_add(oa, r)
            rep = source.frame.rep(v)
            w_idx = source.frame.index[rep]
            alpha = space.vec_sub(v, rep)
            t_a = fq.sub(t, fq.mul_t[half][space.pairing(alpha, rep)])
            e_val = source.character.exponent(alpha, t_a)
            e_psi2 = (-target.character.exponent(a, 0)) % fq.p
            scalar = source.root_images[(e_val + e_psi2) % fq.p]
            entries[r_idx][w_idx] = ring.add(entries[r_idx][w_idx], scalar)
    mat = RingMatrix.from_rows(ring, entries).scaled(measure_unit)
    return Intertwiner(source, target, omega, measure_unit, mat)


def equivariance_system(m1: InducedModel, m2: InducedModel,
                        field) -> RingMatrix:
    """The dense linear system stacking M rho1(h) - rho2(h) M = 0 over the
    Heisenberg generators, with vec(M) unknown (row-major).  Over the
    universal ring pass the fraction field; phases embed through it."""
    d1, d2 = m1.dim, m2.dim
    if isinstance(field, FractionFieldRing):
        def lift(e):
            return field.embed(CycNum.zeta(field.p, e))
    elif isinstance(field, ResidueField):
        def lift(e):
            return phi_reduce(CycNum.zeta(field.p, e), field)
    else:
        raise TypeError("need a fraction field or residue field")
    rows = []
    for h in heisenberg_generators(m1.space):
        perm1, exps1 = m1.act_monomial(h)
        perm2, exps2 = m2.act_monomial(h)
        inv_perm2 = [0] * d2
        for s, r in enumerate(perm2):
            inv_perm2[r] = s
        for r in range(d2):
            s = inv_perm2[r]
            for b in range(d1):
                row = [field.zero()] * (d1 * d2)
                row[r * d1 + perm1[b]] = lift(exps1[b])
                row[s * d1 + b] = field.sub(row[s * d1 + b],
                                            lift(exps2[s]))
                rows.append(row)
    return RingMatrix.from_rows(field, rows)


def verify_rank_one(m1: InducedModel, m2: InducedModel, field) -> dict:
    """Report that the Hom space has rank one and is spanned by the built
    intertwiner: solves the dense equivariance system independently and
    compares the kernel vector with the operator, up to scalar."""
    rank = hom_space_rank(m1, m2, over=field)
    kern = kernel_basis(equivariance_system(m1, m2, field))
    report = {"hom_rank": rank, "kernel_dim": len(kern), "spans": False}
    if len(kern) != 1:
        return report
    op = build_intertwiner(m1, m2)
    if isinstance(field, FractionFieldRing):
        flat = [field.embed(x) for x in op.matrix.entries]
    else:
        flat = list(op.matrix.entries)
    k = kern[0]
    # proportional iff all 2x2 minors with the kernel vector vanish
    proportional = all(
        field.eq(field.mul(flat[i], k[j]), field.mul(flat[j], k[i]))
        for i in range(len(flat)) for j in range(i + 1, len(flat)))
    nonzero = any(not field.is_zero(x) for x in flat)
    report["spans"] = proportional and nonzero
    return report
