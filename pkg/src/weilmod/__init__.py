"""Exact Weil representations of finite symplectic groups over the
universal cyclotomic coefficient ring and its residue fields."""

from .cyclotomic import (
    CycNum,
    FieldElem,
    FractionFieldRing,
    NonUnitError,
    ResidueField,
    UniversalRing,
    build_residue_field,
    conj_tau,
    phi_reduce,
    psi,
)
from .exactalg import RingMatrix, SNFResult, ZZ, kernel_basis, mat_mul, smith_normal_form
from .finsymp import (
    Fq,
    FqElem,
    Lagrangian,
    SympMap,
    SympSpace,
    bruhat_decompose,
    det_x,
    fq_trace,
    oblique_lagrangian,
    sp_elements,
    sp_order,
    standard_x,
    standard_y,
)
from .heisenberg import (
    ExtendedCharacter,
    HeisElem,
    InducedModel,
    build_model,
    h_mul,
    hom_space_rank,
    irreducibility_check,
    projector_phi,
)

__version__ = "0.1.0"
