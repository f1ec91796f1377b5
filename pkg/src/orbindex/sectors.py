"""Scene models, twisted-sector enumeration and cut-off functions.

A QuotientModel is an ambient geometry (plane, flat torus, round sphere), an
isometric group action (crystallographic on the plane, finite elsewhere) and
an equivariant bundle specification.  Sectors are enumerated per connected
component: each fixed-point-bearing conjugacy class contributes one component
per centralizer-orbit of isolated fixed points, or one full component.

Angle convention used throughout: `normal_angle_turns` of a component is the
rotation angle of the *inverse* of the class representative on the normal
plane, normalized to (0, 1) turns.  This is the angle of the automorphism that
enters the delocalized divisors and equals the eigen-angle carried by the
antiholomorphic normal line, so the divisor formulas, the fiber eigen-data and
the heat-kernel supertrace all agree without per-call sign fixups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import DomainError, StructuralError
from .groups import (
    AffineIsometry,
    Centralizer,
    ConjugacyClassHandle,
    CrystGroup,
    FiniteGroupTable,
    FixedSetDescriptor,
    IDENTITY_MAT,
    Mat,
    Vec,
    centralizer,
    fixed_set,
    mat,
    mat_det,
    mat_inv,
    mat_mul,
    mat_sub,
    mat_transpose,
    mat_vec,
    matrix_order,
    rotation_turns_for_gram,
    vec_add,
    vec_frac,
    vec_supnorm,
)

# ---------------------------------------------------------------------------
# Ambients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EuclideanPlane:
    kind: str = "plane"


@dataclass(frozen=True)
class FlatTorus:
    lattice_gram: Mat
    kind: str = "torus"

    @property
    def area(self) -> float:
        return math.sqrt(float(mat_det(self.lattice_gram)))


@dataclass(frozen=True)
class RoundSphere:
    radius: Fraction
    kind: str = "sphere"

    @property
    def area(self) -> float:
        return 4 * math.pi * float(self.radius) ** 2


Ambient = Union[EuclideanPlane, FlatTorus, RoundSphere]


# ---------------------------------------------------------------------------
# Group actions on compact ambients
# ---------------------------------------------------------------------------

class TorusAction:
    """A finite group acting on a flat torus by affine isometries mod the lattice."""

    def __init__(self, table: FiniteGroupTable, isometries: Sequence[AffineIsometry],
                 gram: Mat):
        if len(isometries) != table.order:
            raise StructuralError("one isometry per group element required")
        self.table = table
        self.isometries = tuple(isometries)
        self.gram = gram
        for g in self.isometries:
            a = g.point_part
            if mat_mul(mat_mul(mat_transpose(a), gram), a) != gram:
                raise StructuralError("torus action is not isometric")
        for a in table.elements():
            for b in table.elements():
                lhs = self.isometries[a].compose(self.isometries[b])
                rhs = self.isometries[table.mul(a, b)]
                if lhs.point_part != rhs.point_part or \
                        vec_frac(lhs.translation) != vec_frac(rhs.translation):
                    raise StructuralError("isometry assignment is not a homomorphism mod lattice")

    def isometry(self, g: int) -> AffineIsometry:
        return self.isometries[g]

    def rotation_turns(self, g: int) -> Fraction:
        return rotation_turns_for_gram(self.isometries[g].point_part, self.gram)

    def apply_mod(self, g: int, x: Vec) -> Vec:
        return vec_frac(self.isometries[g].apply(x))


class SphereRotationAction:
    """Z_n acting on the round sphere by rotations about the polar axis."""

    def __init__(self, order: int):
        if order < 1:
            raise StructuralError("rotation order must be positive")
        self.order = order
        self.table = FiniteGroupTable.cyclic(order)

    def rotation_turns(self, j: int) -> Fraction:
        return Fraction(j % self.order, self.order)


GroupAction = Union[CrystGroup, TorusAction, SphereRotationAction]


# ---------------------------------------------------------------------------
# Bundles and models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BundleSpec:
    """Operator kind plus fiber eigen-angle data.

    `fiber_weights`, when given, overrides the built-in eigen-angle rule: a map
    from a rotation angle (in turns) to a pair (plus angles, minus angles).
    `curvature_scalar` is the first Chern number of the twist over the compact
    model (k for O(k) on the sphere, the twist degree on a torus, 0 flat).
    """

    operator_kind: str = "dolbeault"
    twist_degree: int = 0
    fiber_weights: Optional[dict] = None
    curvature_scalar: int = 0

    def __post_init__(self):
        if self.operator_kind not in ("dolbeault", "spinc_dirac"):
            raise StructuralError(f"unknown operator kind {self.operator_kind!r}")


@dataclass
class QuotientModel:
    """Ambient + group action + bundle: the scene every computation consumes."""

    ambient: Ambient
    group: GroupAction
    bundle: BundleSpec
    name: str = "model"
    mode: str = "exact"
    tolerance: float = 1e-8

    def __post_init__(self):
        if isinstance(self.ambient, EuclideanPlane):
            if not isinstance(self.group, CrystGroup):
                raise StructuralError("plane models require a crystallographic group")
            for a in self.group.point_parts:
                if mat_det(a) != 1:
                    raise StructuralError(
                        "orientation-reversing point parts give 1-dimensional "
                        "fixed sets, which this catalogue does not support")
        elif isinstance(self.ambient, FlatTorus):
            if not isinstance(self.group, TorusAction):
                raise StructuralError("torus models require a finite torus action")
        elif isinstance(self.ambient, RoundSphere):
            if not isinstance(self.group, SphereRotationAction):
                raise StructuralError("sphere models require a polar rotation action")
        if isinstance(self.group, (TorusAction, CrystGroup)) and self.twist_nontrivial:
            if isinstance(self.group, CrystGroup) or _has_rotation(self.group):
                if self.bundle.fiber_weights is None:
                    raise StructuralError(
                        "twisted flat models with rotations need explicit fiber weights")

    @property
    def twist_nontrivial(self) -> bool:
        return self.bundle.twist_degree != 0

    def root_order(self) -> int:
        """Smallest N with every model angle in (1/N) turns, including 1/4."""
        orders = [4]
        if isinstance(self.group, CrystGroup):
            orders += [matrix_order(a) for a in self.group.point_parts]
        elif isinstance(self.group, TorusAction):
            orders += [matrix_order(g.point_part) for g in self.group.isometries]
        else:
            orders.append(self.group.order)
        return math.lcm(*orders)


def _has_rotation(action: TorusAction) -> bool:
    return any(g.point_part != IDENTITY_MAT for g in action.isometries)


# ---------------------------------------------------------------------------
# Sector components
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointOrbit:
    """A centralizer-orbit of isolated fixed points, with its rational weight."""

    representative: Vec
    weight: Fraction           # 1 / |stabilizer of the representative in Z_G(g)|
    orbit_size: int
    twist_turns: Fraction = Fraction(0)   # fiber angle of the twist line at the point


@dataclass(frozen=True)
class FullComponentGeometry:
    dimension: int
    area: float
    curvature_kind: str        # "flat" | "sphere"
    tangent_chern: int = 0     # integral of c1 of the tangent line over the component
    local_group_order: int = 1


@dataclass(frozen=True)
class FiberEigenData:
    plus_turns: tuple[Fraction, ...]
    minus_turns: tuple[Fraction, ...]


@dataclass
class SectorComponent:
    """One connected component of a twisted sector."""

    class_handle: ConjugacyClassHandle
    component_tag: str
    geometry: Union[PointOrbit, FullComponentGeometry]
    normal_angle_turns: Optional[Fraction]   # in (0,1); None for full components
    local_group_order: int
    fiber_data: FiberEigenData

    @property
    def is_full(self) -> bool:
        return isinstance(self.geometry, FullComponentGeometry)

    @property
    def label(self) -> str:
        return self.class_handle.label


# ---------------------------------------------------------------------------
# Fiber eigen-data
# ---------------------------------------------------------------------------

def fiber_eigendata(rotation_turns: Fraction, bundle: BundleSpec,
                    twist_turns: Fraction = Fraction(0)) -> FiberEigenData:
    """Eigen-angles (in turns) of a class representative on the fiber.

    Dolbeault rule on a surface: the degree-0 part carries angle 0 and the
    degree-(0,1) part carries minus the rotation angle; an equivariant twist
    shifts both lists by the twist angle.  The same spinor data drives the
    spin^c route, so the two normalizations see identical eigen-angles.
    """
    if bundle.fiber_weights is not None:
        key = rotation_turns % 1
        if key in bundle.fiber_weights:
            plus, minus = bundle.fiber_weights[key]
            return FiberEigenData(tuple(Fraction(p) % 1 for p in plus),
                                  tuple(Fraction(m) % 1 for m in minus))
    theta = rotation_turns % 1
    plus = ((twist_turns) % 1,)
    minus = ((twist_turns - theta) % 1,)
    return FiberEigenData(plus, minus)


def supertrace_turns(data: FiberEigenData, scalars):
    """sum over E+ angles of e^{2 pi i a} minus the same sum over E- angles."""
    total = scalars.zero()
    for a in data.plus_turns:
        total = total + scalars.unit(a)
    for a in data.minus_turns:
        total = total - scalars.unit(a)
    return total


# ---------------------------------------------------------------------------
# Cut-off functions
# ---------------------------------------------------------------------------

def _bump(u: float) -> float:
    # C^infty bump supported on (-1, 2), positive on the closed unit interval
    s = (2.0 * u - 1.0) / 3.0
    if abs(s) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - s * s))


@dataclass
class CutoffFunction:
    """Nonnegative compactly supported c with sum_g c(g^{-1} x) = 1 over orbits.

    Kinds: "constant" (finite group, c = 1/|G|), "indicator" (scaled unit-cell
    indicator, exact on rational points), "smooth" (normalized bump).
    """

    kind: str
    group: GroupAction
    support_radius: Fraction = Fraction(2)
    _norm_cache: dict = field(default_factory=dict, repr=False)

    @property
    def exact(self) -> bool:
        return self.kind in ("constant", "indicator")

    def __call__(self, x: Vec):
        if self.kind == "constant":
            n = self.group.order if isinstance(self.group, SphereRotationAction) \
                else self.group.table.order
            return Fraction(1, n)
        if self.kind == "indicator":
            p = self.group.point_group_order
            exact_pt = isinstance(x[0], (int, Fraction)) and isinstance(x[1], (int, Fraction))
            if exact_pt:
                inside = 0 <= x[0] < 1 and 0 <= x[1] < 1
                return Fraction(1, p) if inside else Fraction(0)
            inside = 0 <= x[0] < 1 and 0 <= x[1] < 1
            return 1.0 / p if inside else 0.0
        return self._smooth(x)

    def _smooth(self, x: Vec) -> float:
        num = _bump(float(x[0])) * _bump(float(x[1]))
        if num == 0.0:
            return 0.0
        return num / self._smooth_norm((float(x[0]), float(x[1])))

    def _smooth_norm(self, xf: tuple[float, float]) -> float:
        # sum_{g in Gamma} h(g^{-1} x); g^{-1} x = A^{-1}(x - s) - mu with mu
        # running over the (unimodular-invariant) integer lattice
        total = 0.0
        group: CrystGroup = self.group
        for a in group.point_parts:
            ainv = mat_inv(a)
            s = group.coset_vectors[a]
            v = (xf[0] - float(s[0]), xf[1] - float(s[1]))
            base = (float(ainv[0][0]) * v[0] + float(ainv[0][1]) * v[1],
                    float(ainv[1][0]) * v[0] + float(ainv[1][1]) * v[1])
            for m in range(math.floor(base[0]) - 2, math.floor(base[0]) + 3):
                for n in range(math.floor(base[1]) - 2, math.floor(base[1]) + 3):
                    total += _bump(base[0] - m) * _bump(base[1] - n)
        return total

    def partition_residual(self, x) -> float:
        """|sum_{g} c(g^{-1} x) - 1| at a single point."""
        if self.kind == "constant":
            return 0.0
        group: CrystGroup = self.group
        exact_pt = isinstance(x[0], (int, Fraction)) and isinstance(x[1], (int, Fraction))
        total = Fraction(0) if (self.exact and exact_pt) else 0.0
        radius = Fraction(math.ceil(max(abs(float(x[0])), abs(float(x[1])))) + 4)
        for g in group.elements_in_ball(radius):
            y = g.inverse().apply(x) if exact_pt else _apply_float(g.inverse(), x)
            total = total + self(y)
        return float(abs(total - 1))


def _apply_float(g: AffineIsometry, x) -> tuple[float, float]:
    a, t = g.point_part, g.translation
    return (a[0][0] * x[0] + a[0][1] * x[1] + float(t[0]),
            a[1][0] * x[0] + a[1][1] * x[1] + float(t[1]))


def build_cutoff(model: QuotientModel, kind: str = "indicator") -> CutoffFunction:
    """A cut-off function for the model's action.

    Finite groups always get the constant 1/|G|.  Crystallographic groups get
    either the scaled unit-cell indicator (exact) or a normalized smooth bump.
    """
    if isinstance(model.group, (TorusAction, SphereRotationAction)):
        return CutoffFunction("constant", model.group)
    if kind not in ("indicator", "smooth"):
        raise StructuralError(f"unknown cut-off kind {kind!r}")
    return CutoffFunction(kind, model.group)


@dataclass
class FixedSetCutoff:
    """c^{(g)} on the fixed set: orbit weights for discrete sets, or c itself."""

    kind: str                                   # "discrete" | "full"
    orbit_weights: list[tuple[Vec, Fraction]]   # empty in the full case
    cutoff: Optional[CutoffFunction] = None     # the original c when kind == "full"


def fixed_set_cutoff(cutoff: CutoffFunction, cls: ConjugacyClassHandle,
                     model: QuotientModel) -> FixedSetCutoff:
    """The section-averaged cut-off on the fixed set, reduced to weights.

    For discrete fixed sets the partition identity over Z_G(g) forces the
    total weight of an orbit to be the reciprocal of the representative's
    stabilizer order in Z_G(g); this is independent of the section K and of
    the cut-off kind, which is what the independence tests exercise.  For the
    identity class, K = {e} and c^{(e)} = c.
    """
    g = cls.representative
    if isinstance(model.group, CrystGroup):
        fs = fixed_set(g, "plane")
        apply_fn = lambda z, p: z.apply(p)
        zc = lambda: centralizer(g, model.group)
    elif isinstance(model.group, TorusAction):
        iso = model.group.isometry(g)
        fs = fixed_set(iso, ("torus", model.group.gram))
        apply_fn = lambda z, p: model.group.apply_mod(z, p)
        zc = lambda: centralizer(g, model.group.table)
    else:
        n = model.group.order
        if g % n == 0:
            fs = FixedSetDescriptor("full")
        else:
            fs = FixedSetDescriptor("points", ((Fraction(0), Fraction(0)),
                                               (Fraction(1), Fraction(0))))
        apply_fn = lambda z, p: p   # every rotation fixes both poles
        zc = lambda: centralizer(g, model.group.table)

    if fs.kind == "empty":
        raise DomainError(f"class {cls.label} has an empty fixed set")
    if fs.kind == "full":
        return FixedSetCutoff("full", [], cutoff)
    if fs.kind == "line":
        raise StructuralError("1-dimensional fixed sets are unsupported")
    orbits = _orbit_decompose(fs.points, zc(), apply_fn)
    return FixedSetCutoff("discrete", [(p, w) for p, w, _ in orbits])


def cutoff_on_fixed_set_direct(cutoff: CutoffFunction, cls: ConjugacyClassHandle,
                               y: Vec, max_terms: int = 4000):
    """Directly evaluate c^{(g)}(y) = sum_{k in K} c(k y).

    The section K represents the left cosets of the centralizer, so summing
    c over K applied on the left is what telescopes against the Z_G(g) sum to
    the full-orbit partition (K Z_G(g) = G).  Used by tests to confirm the
    group-theoretic weights; the sum is finite because c has compact support
    and the action is proper.
    """
    total = None
    count = 0
    for k in cls.coset_section():
        count += 1
        if count > max_terms:
            break
        val = cutoff(k.apply(y))
        total = val if total is None else total + val
        # conjugates far from the support cannot contribute; stop once the
        # translation norm passes the support window
        if isinstance(k, AffineIsometry) and vec_supnorm(k.translation) > \
                cutoff.support_radius + vec_supnorm(y) + 4:
            break
    return total


# ---------------------------------------------------------------------------
# Sector enumeration
# ---------------------------------------------------------------------------

def enumerate_sectors(model: QuotientModel) -> list[SectorComponent]:
    """All connected components of all nonempty twisted sectors, sorted by label."""
    if isinstance(model.ambient, EuclideanPlane):
        comps = _sectors_cryst(model)
    elif isinstance(model.ambient, FlatTorus):
        comps = _sectors_torus(model)
    else:
        comps = _sectors_sphere(model)
    comps.sort(key=lambda c: (c.class_handle.label, c.component_tag))
    return comps


def _full_component(model: QuotientModel, handle: ConjugacyClassHandle,
                    order: int) -> SectorComponent:
    amb = model.ambient
    if isinstance(amb, RoundSphere):
        geo = FullComponentGeometry(2, amb.area, "sphere", tangent_chern=2,
                                    local_group_order=order)
    else:
        area = amb.area if isinstance(amb, FlatTorus) else \
            float(abs(mat_det(model.group.lattice_basis)))
        geo = FullComponentGeometry(2, area, "flat", local_group_order=order)
    data = fiber_eigendata(Fraction(0), model.bundle)
    return SectorComponent(handle, "full", geo, None, order, data)


def _point_component(model, handle, tag, point, weight, orbit_size, rot_turns,
                     twist_turns=Fraction(0)) -> SectorComponent:
    normal = (-rot_turns) % 1
    if normal == 0:
        raise StructuralError("isolated fixed point with trivial normal rotation")
    data = fiber_eigendata(rot_turns, model.bundle, twist_turns)
    stab = int(1 / weight)
    return SectorComponent(handle, tag,
                           PointOrbit(point, weight, orbit_size, twist_turns),
                           normal, stab, data)


def _orbit_decompose(points: Sequence[Vec], zc: Centralizer, apply_mod) \
        -> list[tuple[Vec, Fraction, int]]:
    """Split a finite fixed set into centralizer orbits with weights."""
    elems = zc.elements()
    remaining = list(points)
    out = []
    while remaining:
        p = remaining[0]
        orbit = {apply_mod(z, p) for z in elems}
        stab = sum(1 for z in elems if apply_mod(z, p) == p)
        out.append((p, Fraction(1, stab), len(orbit)))
        remaining = [q for q in remaining if q not in orbit]
    return out


def _sectors_torus(model: QuotientModel) -> list[SectorComponent]:
    action: TorusAction = model.group
    table = action.table
    handles = _torus_class_handles(action)
    comps: list[SectorComponent] = []
    for handle in handles:
        g = handle.representative
        iso = action.isometry(g)
        fs = fixed_set(iso, ("torus", action.gram))
        if fs.kind == "empty":
            continue
        if fs.kind == "line":
            raise StructuralError("1-dimensional fixed sets are unsupported")
        if fs.kind == "full":
            if g != table.identity:
                raise StructuralError("non-identity element acting trivially")
            comps.append(_full_component(model, handle, table.order))
            continue
        zc = centralizer(g, table)

        def apply_mod(z, p, action=action):
            return action.apply_mod(z, p)

        rot = action.rotation_turns(g)
        for i, (p, w, size) in enumerate(_orbit_decompose(fs.points, zc, apply_mod)):
            comps.append(_point_component(model, handle, _center_tag(p, i), p, w,
                                          size, rot))
    return comps


def _sectors_sphere(model: QuotientModel) -> list[SectorComponent]:
    action: SphereRotationAction = model.group
    n = action.order
    k = model.bundle.twist_degree
    comps = []
    for handle in _sphere_class_handles(action):
        j = handle.representative
        if j == 0:
            comps.append(_full_component(model, handle, n))
            continue
        rot = Fraction(j, n)
        # north pole: rotation by +j/n, untwisted fiber weight;
        # south pole: rotation by -j/n, twist weight j*k/n
        comps.append(_point_component(model, handle, "north",
                                      (Fraction(0), Fraction(0)), Fraction(1, n), 1,
                                      rot, Fraction(0)))
        comps.append(_point_component(model, handle, "south",
                                      (Fraction(1), Fraction(0)), Fraction(1, n), 1,
                                      (-rot) % 1, Fraction(j * k, n) % 1))
    return comps


def _sectors_cryst(model: QuotientModel) -> list[SectorComponent]:
    group: CrystGroup = model.group
    comps = []
    for handle in cryst_fixed_classes(group):
        if handle.representative.is_identity:
            comps.append(_full_component(model, handle, group.point_group_order))
            continue
        g = handle.representative
        fs = fixed_set(g, "plane")
        if fs.kind != "points":
            raise StructuralError("unsupported fixed-set dimension for a sector")
        zc = centralizer(g, group)
        weight = Fraction(1, zc.order())
        rot = group.rotation_turns(g.point_part)
        comps.append(_point_component(model, handle, "p0", fs.points[0], weight, 1,
                                      rot))
    return comps


# ---------------------------------------------------------------------------
# Class handles with model-level labels
# ---------------------------------------------------------------------------

def _center_tag(p: Vec, ordinal: int) -> str:
    fp = vec_frac(p)
    if fp == (0, 0):
        return "origin"
    if fp == (Fraction(1, 2), Fraction(1, 2)):
        return "center"
    if fp in ((Fraction(1, 2), Fraction(0)), (Fraction(0), Fraction(1, 2))):
        return "edge"
    return f"pt{ordinal}"


def _torus_class_handles(action: TorusAction) -> list[ConjugacyClassHandle]:
    from .groups import enumerate_classes_finite

    table = action.table
    handles = enumerate_classes_finite(table)
    out = []
    for h in handles:
        g = h.representative
        if g == table.identity:
            label = "e"
        else:
            iso = action.isometry(g)
            if iso.point_part == IDENTITY_MAT:
                t = vec_frac(iso.translation)
                label = f"t{t[0]}_{t[1]}".replace("/", "d")
            else:
                turns = action.rotation_turns(g)
                # power of the smallest positive rotation present in the group
                base = _min_rotation_unit(action)
                j = int(turns / base) if base and (turns / base).denominator == 1 else None
                label = f"r{j}" if j else f"a{turns.numerator}_{turns.denominator}"
        out.append(ConjugacyClassHandle(group=table, representative=g,
                                        kind_tag="finite-class", label=label,
                                        invariant_data=h.invariant_data,
                                        _members=h._members))
    # disambiguate duplicate labels deterministically
    seen: dict[str, int] = {}
    for h in out:
        if h.label in seen:
            seen[h.label] += 1
            h.label = f"{h.label}_{seen[h.label]}"
        else:
            seen[h.label] = 0
    return out


def _min_rotation_unit(action: TorusAction) -> Optional[Fraction]:
    turns = [action.rotation_turns(g) for g in action.table.elements()
             if action.isometry(g).point_part != IDENTITY_MAT
             and mat_det(action.isometry(g).point_part) == 1]
    positive = [t for t in turns if t > 0]
    return min(positive) if positive else None


def _sphere_class_handles(action: SphereRotationAction) -> list[ConjugacyClassHandle]:
    out = []
    for j in range(action.order):
        label = "e" if j == 0 else f"r{j}"
        out.append(ConjugacyClassHandle(group=action.table, representative=j,
                                        kind_tag="finite-class", label=label,
                                        invariant_data=(j,)))
    return out


def cryst_fixed_classes(group: CrystGroup) -> list[ConjugacyClassHandle]:
    """Conjugacy classes of a wallpaper group with nonempty fixed sets.

    These are the identity class and one class per point-group class of
    rotations and per orbit of rotation centers; the center orbits are computed
    exactly on the finite set of centers modulo the lattice.
    """
    handles = [ConjugacyClassHandle(group=group,
                                    representative=AffineIsometry.identity(),
                                    kind_tag="infinite-class", label="e",
                                    invariant_data=("e", "full"))]
    seen_parts: set = set()
    for a in group.point_parts:
        if a == IDENTITY_MAT or a in seen_parts:
            continue
        if mat_det(a) != 1:
            continue
        # fold the whole point-group conjugacy class of a into one pass
        pclass = {a}
        for b in group.point_parts:
            pclass.add(tuple(map(tuple, mat_mul(mat_mul(b, a), mat_inv(b)))))
        pclass = {tuple((int(r[0]), int(r[1])) for r in m) for m in pclass}
        seen_parts |= pclass
        handles.extend(_rotation_classes_for_part(group, a))
    handles.sort(key=lambda h: h.label)
    return handles


def _rotation_classes_for_part(group: CrystGroup, a) -> list[ConjugacyClassHandle]:
    m = mat_sub(IDENTITY_MAT, a)
    d = abs(int(mat_det(m)))
    minv = mat_inv(m)
    s_a = group.coset_vectors[a]
    # centers modulo the lattice: (I - A)^{-1}(s_A + lattice) mod lattice
    centers = sorted({vec_frac(mat_vec(minv, (s_a[0] + p, s_a[1] + q)))
                      for p in range(d) for q in range(d)})
    if len(centers) != d:
        raise StructuralError("rotation-center count disagrees with det(I - A)")
    # conjugation by (B, s_B + lambda) with B A B^{-1} = A moves centers by
    # x -> B x + s_B + lambda; orbits are computed mod the lattice
    movers = [(b, group.coset_vectors[b]) for b in group.point_parts
              if mat_mul(b, a) == tuple(map(tuple, mat_mul(a, b)))]
    remaining = list(centers)
    out = []
    used_tags: dict[str, int] = {}
    turns = group.rotation_turns(a)
    unit = min(group.rotation_turns(p) for p in group.point_parts
               if p != IDENTITY_MAT and mat_det(p) == 1
               and group.rotation_turns(p) > 0)
    power = int(turns / unit) if (turns / unit).denominator == 1 else None
    part_name = f"r{power}" if power and power > 1 else "r"
    ordinal = 0
    while remaining:
        c0 = remaining[0]
        orbit = set()
        frontier = [c0]
        while frontier:
            x = frontier.pop()
            if x in orbit:
                continue
            orbit.add(x)
            for b, s_b in movers:
                frontier.append(vec_frac(vec_add(mat_vec(b, x), s_b)))
        remaining = [x for x in remaining if x not in orbit]
        rep_center = min(orbit)
        t = mat_vec(m, rep_center)
        rep = AffineIsometry(a, t)
        if not group.contains(rep):
            raise StructuralError("rotation representative fell outside the group")
        tag = _center_tag(rep_center, ordinal)
        if tag in used_tags:
            used_tags[tag] += 1
            tag = f"{tag}{used_tags[tag]}"
        else:
            used_tags[tag] = 1
        label = f"{part_name}_{tag}"
        out.append(ConjugacyClassHandle(
            group=group, representative=rep, kind_tag="infinite-class", label=label,
            invariant_data=(part_name, str(rep_center))))
        ordinal += 1
    return out


def translation_class(group: CrystGroup, t: Vec) -> ConjugacyClassHandle:
    """The (finite) conjugacy class of a lattice translation."""
    rep = group.element(IDENTITY_MAT, t)
    label = f"t{t[0]}_{t[1]}".replace("/", "d")
    return ConjugacyClassHandle(group=group, representative=rep,
                                kind_tag="finite-class", label=label,
                                invariant_data=("t", str(vec_frac(t))))


# ---------------------------------------------------------------------------
# Model builders for the catalogue
# ---------------------------------------------------------------------------

def square_torus_rotation_model(n: int, name: str, mode: str = "exact") -> QuotientModel:
    """Z_n (n in {1,2,4}) acting on C/Z[i] by multiplication by i^(4/n)... powers."""
    if n not in (1, 2, 4):
        raise StructuralError("square torus admits rotation orders 1, 2, 4")
    rot = {1: IDENTITY_MAT, 2: ((-1, 0), (0, -1)), 4: ((0, -1), (1, 0))}[n]
    gram = mat([[1, 0], [0, 1]])
    isos = []
    cur = AffineIsometry.identity()
    step = AffineIsometry(rot, (Fraction(0), Fraction(0)))
    for _ in range(n):
        isos.append(cur)
        cur = step.compose(cur)
    action = TorusAction(FiniteGroupTable.cyclic(n), isos, gram)
    return QuotientModel(FlatTorus(gram), action, BundleSpec("dolbeault", 0),
                         name=name, mode=mode)


def sphere_model(n: int, k: int, name: str, mode: str = "exact") -> QuotientModel:
    return QuotientModel(RoundSphere(Fraction(1)), SphereRotationAction(n),
                         BundleSpec("dolbeault", k, curvature_scalar=k),
                         name=name, mode=mode)


def wallpaper_model(group: CrystGroup, name: str, mode: str = "exact",
                    operator_kind: str = "dolbeault") -> QuotientModel:
    return QuotientModel(EuclideanPlane(), group, BundleSpec(operator_kind, 0),
                         name=name, mode=mode)


def induced_torus_model(model: QuotientModel) -> QuotientModel:
    """The finite model P acting on lattice\\plane induced by a plane model.

    The quotient of the plane by the wallpaper group equals the quotient of
    this torus by the induced point-group action, which is what the spectral
    oracle understands.
    """
    if not isinstance(model.group, CrystGroup):
        raise StructuralError("induced torus model needs a crystallographic group")
    group = model.group
    table, parts = group.point_group_table()
    isos = [AffineIsometry(a, group.coset_vectors[a]) for a in parts]
    action = TorusAction(table, isos, group.gram)
    return QuotientModel(FlatTorus(group.gram), action, model.bundle,
                         name=model.name + "_torus", mode=model.mode,
                         tolerance=model.tolerance)
