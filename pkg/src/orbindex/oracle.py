"""Brute-force equivariant index oracles from explicit section bases.

These never touch the characteristic-class or index machinery: every value
comes from counting monomials or tracing a pullback on an explicit basis, so
agreement with the engine is evidence rather than tautology.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .exactnum import Scalars
from .groups import IDENTITY_MAT
from .sectors import QuotientModel, TorusAction

MAX_TWIST = 100
MAX_ORDER = 24


@dataclass(frozen=True)
class OracleResult:
    value: object
    method: str
    basis: str

    def to_complex(self) -> complex:
        return Scalars.to_complex(self.value)


def sphere_equivariant_character(k: int, n: int, j: int, mode: str = "exact") -> OracleResult:
    """Trace of the j-th rotation power on the degree-k monomial basis.

    The sections of the degree-k line on the sphere are spanned by the k+1
    monomials z^m; the rotation multiplies z^m by zeta^{jm}.  H^1 vanishes for
    k >= 0 and contributes nothing.
    """
    if k < 0:
        raise DomainError("negative twist degree: dual basis not implemented")
    if k > MAX_TWIST or n > MAX_ORDER:
        raise DomainError("oracle degree bounds exceeded (k <= 100, n <= 24)")
    if n < 1 or not (0 <= j < n):
        raise DomainError("rotation power outside the group")
    sc = Scalars(mode, n if mode == "exact" else 0)
    total = sc.zero()
    for m in range(k + 1):
        total = total + sc.unit(Fraction(j * m, n))
    return OracleResult(total, "monomial-character", f"z^m, 0 <= m <= {k}")


def sphere_invariant_monomial_count(k: int, n: int) -> OracleResult:
    """Dimension of the invariant sections: monomials z^m with n | m."""
    if k < 0 or k > MAX_TWIST or n < 1 or n > MAX_ORDER:
        raise DomainError("oracle degree bounds exceeded")
    count = sum(1 for m in range(k + 1) if m % n == 0)
    return OracleResult(count, "monomial-count", f"z^m with {n} | m")


def elliptic_pullback_character(turns: Fraction, mode: str = "exact") -> OracleResult:
    """Pullback supertrace of a lattice rotation on the basis {1}, {dzbar}.

    The rotation z -> e^{2 pi i t} z pulls dzbar back to e^{-2 pi i t} dzbar,
    so the supertrace is 1 - e^{-2 pi i t}; only crystallographic angles
    preserve a lattice.
    """
    t = Fraction(turns) % 1
    if t.denominator not in (1, 2, 3, 4, 6):
        raise DomainError("rotation does not preserve any plane lattice")
    sc = Scalars(mode, t.denominator if mode == "exact" else 0)
    value = sc.one() - sc.unit(-t)
    return OracleResult(value, "pullback-character", "{1} and {dzbar}")


def torus_invariant_index(model: QuotientModel) -> OracleResult:
    """dim of invariant degree-0 sections minus invariant (0,1)-forms.

    On any flat torus the relevant bases are the constants and {dzbar}: a
    Fourier mode with nonzero frequency is never invariant under the lattice
    of translations implicit in the torus, so only the constant survives in
    degree 0, and dzbar transforms by the rotation angle.
    """
    if not isinstance(model.group, TorusAction):
        raise DomainError("oracle expects a finite torus action")
    if model.bundle.operator_kind != "dolbeault" or model.bundle.twist_degree != 0:
        raise DomainError("oracle supports untwisted dolbeault only")
    action = model.group
    h0 = 1  # constants are invariant under any affine isometry
    all_trivial_rotation = all(g.point_part == IDENTITY_MAT for g in action.isometries)
    h01 = 1 if all_trivial_rotation else 0
    return OracleResult(h0 - h01, "fourier-invariants", "constants and {dzbar}")
