"""Truncated graded series algebra for characteristic forms.

All generators have degree 2 (curvature classes); a TruncForm is a finite sum
of monomials in the generators, truncated above the component dimension, with
coefficients from the active arithmetic context (exact cyclotomic or complex).
Genus series are generated with exact rational coefficients and materialized
through the context, so exact mode stays exact end to end.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .errors import SingularDivisorError, StructuralError
from .exactnum import Scalars
from .sectors import FiberEigenData, PointOrbit, SectorComponent

Monomial = tuple[str, ...]   # sorted generator names with repetition; degree = 2*len


@dataclass(frozen=True)
class ComponentCurvature:
    """Curvature generators of one sector component.

    `tangent_roots` are the Chern-root generators of the tangent bundle (empty
    for flat components), `normal` is (generator, angle turns) for codimension
    2, `integrals` maps each degree-2 generator to its integral over the
    component.  Flat components carry all-zero integrals; the sphere carries
    the Gauss-Bonnet value 2 for its tangent root.
    """

    dimension: int
    tangent_roots: tuple[str, ...] = ()
    normal: Optional[tuple[str, Fraction]] = None
    twist_line: Optional[str] = None
    integrals: dict = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "integrals", dict(self.integrals or {}))


class TruncForm:
    """Element of the graded commutative truncated series algebra."""

    __slots__ = ("trunc", "coeffs")

    def __init__(self, trunc: int, coeffs: dict | None = None):
        self.trunc = trunc
        self.coeffs: dict[Monomial, object] = {}
        for mono, c in (coeffs or {}).items():
            if 2 * len(mono) <= trunc and not _zeroish(c):
                self.coeffs[tuple(sorted(mono))] = c

    @staticmethod
    def constant(value, trunc: int) -> "TruncForm":
        return TruncForm(trunc, {(): value})

    def degree_part(self, degree: int) -> dict:
        return {m: c for m, c in self.coeffs.items() if 2 * len(m) == degree}

    def coefficient(self, mono: Sequence[str]):
        return self.coeffs.get(tuple(sorted(mono)))

    def __add__(self, other: "TruncForm") -> "TruncForm":
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return TruncForm(self.trunc, out)

    def __sub__(self, other: "TruncForm") -> "TruncForm":
        return self + other.scale(-1)

    def scale(self, factor) -> "TruncForm":
        return TruncForm(self.trunc, {m: c * factor for m, c in self.coeffs.items()})

    def __mul__(self, other: "TruncForm") -> "TruncForm":
        self._check(other)
        out: dict[Monomial, object] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                if 2 * (len(m1) + len(m2)) > self.trunc:
                    continue
                m = tuple(sorted(m1 + m2))
                term = c1 * c2
                out[m] = out[m] + term if m in out else term
        return TruncForm(self.trunc, out)

    def _check(self, other: "TruncForm") -> None:
        if self.trunc != other.trunc:
            raise StructuralError("forms bound to different truncation degrees")

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*{'.'.join(m) if m else '1'}"
                          for m, c in sorted(self.coeffs.items()))


def _zeroish(c) -> bool:
    try:
        return c == 0
    except TypeError:
        return False


# ---------------------------------------------------------------------------
# Exact genus series
# ---------------------------------------------------------------------------

def _series_inverse(c: list[Fraction], order: int) -> list[Fraction]:
    if c[0] == 0:
        raise StructuralError("series has no inverse")
    inv = [Fraction(1) / c[0]] + [Fraction(0)] * order
    for n in range(1, order + 1):
        acc = Fraction(0)
        for k in range(1, min(n, len(c) - 1) + 1):
            acc += c[k] * inv[n - k]
        inv[n] = -acc / c[0]
    return inv


@lru_cache(maxsize=None)
def ahat_series(order: int) -> tuple[Fraction, ...]:
    """Coefficients of (u/2)/sinh(u/2) up to u^order; vanishes in odd degrees."""
    denom = [Fraction(0)] * (order + 1)
    for k in range(0, order // 2 + 1):
        denom[2 * k] = Fraction(1, 4 ** k * math.factorial(2 * k + 1))
    return tuple(_series_inverse(denom, order))


@lru_cache(maxsize=None)
def todd_series(order: int) -> tuple[Fraction, ...]:
    """Coefficients of u/(1 - e^{-u}) up to u^order."""
    denom = [Fraction((-1) ** k, math.factorial(k + 1)) for k in range(order + 1)]
    return tuple(_series_inverse(denom, order))


@lru_cache(maxsize=None)
def exp_series(order: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1, math.factorial(k)) for k in range(order + 1))


def _univariate(series: Sequence[Fraction], gen: str, trunc: int,
                scalars: Scalars) -> TruncForm:
    coeffs = {}
    for k, a in enumerate(series):
        if 2 * k > trunc:
            break
        if a != 0:
            coeffs[(gen,) * k] = scalars.from_rational(a)
    return TruncForm(trunc, coeffs)


# ---------------------------------------------------------------------------
# Characteristic forms
# ---------------------------------------------------------------------------

def a_hat_form(curv: ComponentCurvature, scalars: Scalars) -> TruncForm:
    """A-hat genus of the tangent roots; no degree-2 term ever appears."""
    order = curv.dimension // 2
    out = TruncForm.constant(scalars.one(), curv.dimension)
    for root in curv.tangent_roots:
        out = out * _univariate(ahat_series(order), root, curv.dimension, scalars)
    return out


def todd_form(curv: ComponentCurvature, scalars: Scalars) -> TruncForm:
    """Todd genus of the tangent roots; degree-2 coefficient is c1/2."""
    order = curv.dimension // 2
    out = TruncForm.constant(scalars.one(), curv.dimension)
    for root in curv.tangent_roots:
        out = out * _univariate(todd_series(order), root, curv.dimension, scalars)
    return out


def chern_char(lines: Sequence[str], trunc: int, scalars: Scalars,
               weights: Optional[Sequence] = None) -> TruncForm:
    """Chern character of a sum of line bundles: sum of e^{x_i}, optionally
    weighted by scalars (used for the delocalized variant)."""
    order = trunc // 2
    total = TruncForm(trunc, {})
    for idx, gen in enumerate(lines):
        term = _univariate(exp_series(order), gen, trunc, scalars)
        if weights is not None:
            term = term.scale(weights[idx])
        total = total + term
    return total


def exp_line(gen: str, trunc: int, scalars: Scalars, half: bool = False) -> TruncForm:
    """e^{x} or e^{x/2} of a single degree-2 generator."""
    order = trunc // 2
    series = list(exp_series(order))
    if half:
        series = [a / (2 ** k) for k, a in enumerate(series)]
    return _univariate(series, gen, trunc, scalars)


def deloc_factor(component_curv: ComponentCurvature, normal_turns: Optional[Fraction],
                 scalars: Scalars, convention: str = "todd") -> TruncForm:
    """Reciprocal of the delocalized divisor attached to the normal data.

    Todd convention: 1 / det(1 - Phi e^{x}) on the normal eigen-line, where
    Phi acts by the component's normal angle; an isolated point with angle
    theta gives the scalar 1/(1 - e^{-i theta}) in the stored-angle convention.
    A-hat convention: 1 / det(1 - Phi e^{x})^{1/2} over both normal eigen-lines
    with principal-branch square roots per eigen-factor (floating only; the
    exact pipeline uses the square-root-free spinor route instead).
    Identity-class components (no normal data) give 1.
    """
    trunc = component_curv.dimension
    if normal_turns is None:
        return TruncForm.constant(scalars.one(), trunc)
    t = normal_turns % 1
    if t == 0:
        raise SingularDivisorError("normal automorphism is the identity; divisor vanishes")
    gen = component_curv.normal[0] if component_curv.normal else None
    order = trunc // 2

    if convention == "todd":
        lam = scalars.unit(-t)  # divisor 1 - e^{-i theta} e^{x}
        return _inverse_divisor(lam, gen, trunc, order, scalars)
    if convention == "a_hat":
        # floating square roots of the two conjugate eigen-factors
        lam = cmath.exp(-2j * math.pi * float(t))
        lam_bar = lam.conjugate()
        f1 = _inverse_divisor_sqrt(lam, gen, trunc, order)
        f2 = _inverse_divisor_sqrt(lam_bar, gen, trunc, order, negate_gen=True)
        return f1 * f2
    raise StructuralError(f"unknown divisor convention {convention!r}")


def _inverse_divisor(lam, gen: Optional[str], trunc: int, order: int,
                     scalars: Scalars) -> TruncForm:
    """1 / (1 - lam e^{x}) as a truncated form in gen (or a scalar if gen is None)."""
    one = scalars.one()
    base = one - lam
    if scalars.is_zero(base, 1e-15):
        raise SingularDivisorError("delocalized divisor determinant vanishes")
    if gen is None or order == 0:
        return TruncForm.constant(one / base, trunc)
    # 1/(1 - lam e^x) = inv0 / (1 - T) with T = inv0 * lam * (e^x - 1)
    inv0 = one / base
    tail = {}
    for k in range(1, order + 1):
        tail[(gen,) * k] = lam * scalars.from_rational(Fraction(1, math.factorial(k)))
    t_form = TruncForm(trunc, tail).scale(inv0)
    acc = TruncForm.constant(one, trunc)
    power = TruncForm.constant(one, trunc)
    for _ in range(order):
        power = power * t_form
        acc = acc + power
    return acc.scale(inv0)


def _inverse_divisor_sqrt(lam: complex, gen: Optional[str], trunc: int, order: int,
                          negate_gen: bool = False) -> TruncForm:
    """(1 - lam e^{+-x})^{-1/2} with the principal branch, floating coefficients."""
    if abs(1 - lam) < 1e-15:
        raise SingularDivisorError("delocalized divisor determinant vanishes")
    if gen is None or order == 0:
        return TruncForm.constant((1 - lam) ** -0.5, trunc)
    sign = -1.0 if negate_gen else 1.0
    # (1 - lam e^{sx}) = (1-lam)(1 - (lam/(1-lam)) (e^{sx}-1))
    w = lam / (1 - lam)
    tail = {}
    for k in range(1, order + 1):
        tail[(gen,) * k] = w * (sign ** k) / math.factorial(k)
    t_form = TruncForm(trunc, tail)
    # binomial series (1 - u)^{-1/2} = sum binom(-1/2, k) (-u)^k
    out = TruncForm.constant(1.0 + 0j, trunc)
    power = TruncForm.constant(1.0 + 0j, trunc)
    coeff = 1.0
    for k in range(1, order + 1):
        power = power * t_form
        coeff *= (0.5 + (k - 1)) / k   # binom(-1/2,k)(-1)^k = (2k-1)!!/(2k)!!
        out = out + power.scale(coeff)
    return out.scale((1 - lam) ** -0.5)


def deloc_chern(data: FiberEigenData, trunc: int, scalars: Scalars,
                plus_lines: Optional[Sequence[Optional[str]]] = None,
                minus_lines: Optional[Sequence[Optional[str]]] = None) -> TruncForm:
    """Graded delocalized Chern character: sum of e^{2 pi i theta} ch(E_theta)
    with E- entering negatively (the index pairing demands the supertrace)."""
    plus_lines = plus_lines or [None] * len(data.plus_turns)
    minus_lines = minus_lines or [None] * len(data.minus_turns)
    total = TruncForm(trunc, {})
    for turns, gen in zip(data.plus_turns, plus_lines):
        line = exp_line(gen, trunc, scalars) if gen else \
            TruncForm.constant(scalars.one(), trunc)
        total = total + line.scale(scalars.unit(turns))
    for turns, gen in zip(data.minus_turns, minus_lines):
        line = exp_line(gen, trunc, scalars) if gen else \
            TruncForm.constant(scalars.one(), trunc)
        total = total - line.scale(scalars.unit(turns))
    return total


# ---------------------------------------------------------------------------
# Orbifold integration
# ---------------------------------------------------------------------------

def orbifold_integrate(form: TruncForm, component: SectorComponent,
                       curv: ComponentCurvature, scalars: Scalars):
    """Integrate a bound form over one sector component.

    Dimension 2: the degree-2 coefficients pair with the generators' integrals.
    Dimension 0: the degree-0 value.  Either is then multiplied by the orbit
    weight (1/stabilizer order for point orbits, 1/localGroupOrder for full
    components).
    """
    if isinstance(component.geometry, PointOrbit):
        c0 = form.coefficient(()) or scalars.zero()
        return c0 * scalars.from_rational(component.geometry.weight)
    total = scalars.zero()
    for mono, c in form.degree_part(2).items():
        integral = curv.integrals.get(mono[0], Fraction(0))
        total = total + c * scalars.from_rational(integral)
    return total * scalars.from_rational(Fraction(1, component.geometry.local_group_order))


def component_curvature(component: SectorComponent, twist_chern: int) -> ComponentCurvature:
    """Curvature data for a catalogue component."""
    if isinstance(component.geometry, PointOrbit):
        return ComponentCurvature(dimension=0, normal=("n", component.normal_angle_turns))
    geo = component.geometry
    if geo.curvature_kind == "sphere":
        return ComponentCurvature(
            dimension=2, tangent_roots=("t",), twist_line="w",
            integrals={"t": Fraction(geo.tangent_chern), "w": Fraction(twist_chern)})
    return ComponentCurvature(
        dimension=2, tangent_roots=(), twist_line="w",
        integrals={"w": Fraction(twist_chern)})
