"""Assembly of equivariant Lefschetz numbers, Kawasaki and localized indices.

Convention fixed by oracle agreement and recorded in every report header:
the pointwise term of a dolbeault-kind operator at a fixed point where the
group element rotates the tangent plane by theta (counterclockwise) is

    twist character / (1 - e^{i theta}),

equivalently the reciprocal Todd divisor evaluated at the component's stored
normal angle.  The spin^c route computes the same point term as the fiber
supertrace over the real determinant det(1 - R_theta) and must agree; full
components route through Td (dolbeault) or A-hat times the half determinant
line (spin^c), which coincide as series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import StructuralError
from .exactnum import Scalars, scalars_for_order
from .char import (
    ComponentCurvature,
    TruncForm,
    a_hat_form,
    chern_char,
    component_curvature,
    deloc_chern,
    exp_line,
    orbifold_integrate,
    todd_form,
)
from .groups import (
    ConjugacyClassHandle,
    CrystGroup,
    centralizer,
    fixed_set,
)
from .sectors import (
    EuclideanPlane,
    FiberEigenData,
    PointOrbit,
    QuotientModel,
    RoundSphere,
    SectorComponent,
    SphereRotationAction,
    TorusAction,
    enumerate_sectors,
    fiber_eigendata,
)


def scalars_for_model(model: QuotientModel, mode: Optional[str] = None) -> Scalars:
    return scalars_for_order(model.root_order(), mode or model.mode)


# ---------------------------------------------------------------------------
# Pointwise Lefschetz terms
# ---------------------------------------------------------------------------

def point_term(normal_turns: Fraction, twist_turns: Fraction, data: FiberEigenData,
               scalars: Scalars, route: str):
    """Contribution of one isolated fixed point, before orbit weights.

    `route` = "todd": twist character over the complex divisor 1 - e^{-i theta_N}.
    `route` = "a_hat": fiber supertrace over the real determinant of 1 - R.
    """
    if route == "todd":
        divisor = scalars.one() - scalars.unit(-normal_turns)
        return scalars.unit(twist_turns) / divisor
    if route == "a_hat":
        det_r = (scalars.one() - scalars.unit(normal_turns)) * \
                (scalars.one() - scalars.unit(-normal_turns))
        numerator = deloc_chern(data, 0, scalars).coefficient(()) or scalars.zero()
        return numerator / det_r
    raise StructuralError(f"unknown Lefschetz route {route!r}")


def _route_for(model: QuotientModel) -> str:
    return "a_hat" if model.bundle.operator_kind == "spinc_dirac" else "todd"


def component_value(component: SectorComponent, model: QuotientModel,
                    scalars: Scalars, route: Optional[str] = None):
    """Orbifold integral of the delocalized index density over one component."""
    route = route or _route_for(model)
    curv = component_curvature(component, model.bundle.curvature_scalar)
    if isinstance(component.geometry, PointOrbit):
        term = point_term(component.normal_angle_turns,
                          component.geometry.twist_turns,
                          component.fiber_data, scalars, route)
        return term * scalars.from_rational(component.geometry.weight)
    form = _full_component_form(curv, scalars, route)
    return orbifold_integrate(form, component, curv, scalars)


def _full_component_form(curv: ComponentCurvature, scalars: Scalars,
                         route: str) -> TruncForm:
    if curv.twist_line:
        ch_w = chern_char([curv.twist_line], curv.dimension, scalars)
    else:
        ch_w = TruncForm.constant(scalars.one(), curv.dimension)
    if route == "todd":
        return todd_form(curv, scalars) * ch_w
    # spin^c normalization: A-hat times the square root of the determinant line
    form = a_hat_form(curv, scalars)
    for root in curv.tangent_roots:
        form = form * exp_line(root, curv.dimension, scalars, half=True)
    return form * ch_w


# ---------------------------------------------------------------------------
# Equivariant Lefschetz numbers on compact models
# ---------------------------------------------------------------------------

def equivariant_lefschetz(model: QuotientModel, g: int,
                          scalars: Optional[Scalars] = None,
                          route: Optional[str] = None):
    """L(g) = supertrace of g on the kernel pair, from local fixed-point data.

    Fixed-point-free elements return 0; the identity returns the ordinary
    index of the compact model.
    """
    if isinstance(model.ambient, EuclideanPlane):
        raise StructuralError("Lefschetz evaluator requires a compact model")
    scalars = scalars or scalars_for_model(model)
    route = route or _route_for(model)

    if isinstance(model.group, SphereRotationAction):
        n = model.group.order
        j = g % n
        k = model.bundle.twist_degree
        if j == 0:
            return _ordinary_index(model, scalars, route)
        rot = Fraction(j, n)
        north = point_term((-rot) % 1, Fraction(0),
                           fiber_eigendata(rot, model.bundle), scalars, route)
        south = point_term(rot, Fraction(j * k, n) % 1,
                           fiber_eigendata((-rot) % 1, model.bundle,
                                           Fraction(j * k, n) % 1), scalars, route)
        return north + south

    action: TorusAction = model.group
    iso = action.isometry(g)
    fs = fixed_set(iso, ("torus", action.gram))
    if fs.kind == "empty":
        return scalars.zero()
    if fs.kind == "full":
        return _ordinary_index(model, scalars, route)
    rot = action.rotation_turns(g)
    data = fiber_eigendata(rot, model.bundle)
    term = point_term((-rot) % 1, Fraction(0), data, scalars, route)
    return term * scalars.from_rational(Fraction(len(fs.points)))


def _ordinary_index(model: QuotientModel, scalars: Scalars, route: str):
    if isinstance(model.ambient, RoundSphere):
        curv = ComponentCurvature(
            dimension=2, tangent_roots=("t",), twist_line="w",
            integrals={"t": Fraction(2), "w": Fraction(model.bundle.curvature_scalar)})
    else:
        curv = ComponentCurvature(
            dimension=2, tangent_roots=(), twist_line="w",
            integrals={"w": Fraction(model.bundle.curvature_scalar)})
    form = _full_component_form(curv, scalars, route)
    total = scalars.zero()
    for mono, c in form.degree_part(2).items():
        total = total + c * scalars.from_rational(curv.integrals.get(mono[0], Fraction(0)))
    return total


# ---------------------------------------------------------------------------
# Kawasaki index and finite assembly
# ---------------------------------------------------------------------------

def kawasaki_index(model: QuotientModel, scalars: Optional[Scalars] = None,
                   route: Optional[str] = None):
    """Index of the quotient operator: sum of sector integrals."""
    scalars = scalars or scalars_for_model(model)
    total = scalars.zero()
    for comp in enumerate_sectors(model):
        total = total + component_value(comp, model, scalars, route)
    return total


@dataclass
class AssemblyResult:
    average_total: object       # (1/|H|) sum over elements of L
    class_total: object         # sum over classes of L / |Z|
    per_element: dict
    per_class: dict


def finite_assembly(model: QuotientModel, scalars: Optional[Scalars] = None) -> AssemblyResult:
    """Both groupings of the finite averaging identity, asserted equal."""
    if isinstance(model.group, CrystGroup):
        raise StructuralError("finite assembly requires a finite acting group")
    scalars = scalars or scalars_for_model(model)
    table = model.group.table
    per_element = {g: equivariant_lefschetz(model, g, scalars) for g in table.elements()}
    avg = scalars.zero()
    for v in per_element.values():
        avg = avg + v
    avg = avg * scalars.from_rational(Fraction(1, table.order))

    from .groups import enumerate_classes_finite
    per_class = {}
    ctotal = scalars.zero()
    for cls in enumerate_classes_finite(table):
        z = len(centralizer(cls.representative, table).elements())
        term = per_element[cls.representative] * scalars.from_rational(Fraction(1, z))
        per_class[cls.representative] = term
        ctotal = ctotal + term

    if not _equal(avg, ctotal, scalars, 1e-10):
        raise StructuralError("assembly groupings disagree")
    kaw = kawasaki_index(model, scalars)
    if not _equal(avg, kaw, scalars, 1e-10):
        raise StructuralError("assembly disagrees with the sector sum")
    return AssemblyResult(avg, ctotal, per_element, per_class)


def _equal(a, b, scalars: Scalars, tol: float) -> bool:
    return scalars.is_zero(a - b, tol)


# ---------------------------------------------------------------------------
# Localized indices
# ---------------------------------------------------------------------------

def localized_index(model: QuotientModel, cls: ConjugacyClassHandle,
                    scalars: Optional[Scalars] = None,
                    route: Optional[str] = None):
    """The class's share of the index: cut-off-weighted fixed-point data.

    Empty fixed sets give 0; discrete fixed sets give the weighted pointwise
    terms; the identity class gives the cut-off-weighted characteristic
    integral over the quotient.
    """
    scalars = scalars or scalars_for_model(model)
    comps = _class_components(model, cls)
    total = scalars.zero()
    for comp in comps:
        total = total + component_value(comp, model, scalars, route)
    return total


def _class_components(model: QuotientModel, cls: ConjugacyClassHandle) -> list[SectorComponent]:
    comps = [c for c in enumerate_sectors(model) if c.class_handle.label == cls.label]
    if comps:
        return comps
    # not sector-bearing: verify the fixed set is genuinely empty
    rep = cls.representative
    if isinstance(model.group, CrystGroup):
        if fixed_set(rep, "plane").kind != "empty":
            raise StructuralError(f"class {cls.label} missing from the sector list")
    return []


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class IndexReport:
    model_name: str
    mode: str
    per_class: dict                      # label -> value (scalar)
    kawasaki_total: object
    assembly_total: object
    oracle_value: Optional[object] = None
    residuals: dict = field(default_factory=dict)
    psc_obstruction: Optional[bool] = None
    psc_note: str = ""
    integrality_verdict: bool = False
    pair_reality: dict = field(default_factory=dict)
    convention: dict = field(default_factory=dict)

    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def sum_identity(model: QuotientModel, oracle_value=None,
                 scalars: Optional[Scalars] = None) -> IndexReport:
    """Per-class localized indices, their sum against the quotient index, and
    the conjugate-pair reality checks."""
    scalars = scalars or scalars_for_model(model)
    comps = enumerate_sectors(model)
    labels = sorted({c.class_handle.label for c in comps})
    handles = {}
    for c in comps:
        handles.setdefault(c.class_handle.label, c.class_handle)

    per_class = {}
    for label in labels:
        value = scalars.zero()
        for c in comps:
            if c.class_handle.label == label:
                value = value + component_value(c, model, scalars)
        per_class[label] = value

    assembly_total = scalars.zero()
    for v in per_class.values():
        assembly_total = assembly_total + v
    kawasaki_total = kawasaki_index(model, scalars)

    residuals = {
        "sum_vs_kawasaki": abs(Scalars.to_complex(assembly_total)
                               - Scalars.to_complex(kawasaki_total)),
    }
    if oracle_value is not None:
        residuals["total_vs_oracle"] = abs(Scalars.to_complex(assembly_total)
                                           - Scalars.to_complex(oracle_value))

    pair_reality = {}
    inverse_label = _inverse_class_labels(model, handles)
    for label, value in per_class.items():
        partner = inverse_label.get(label)
        if partner is None or partner not in per_class:
            continue
        s = Scalars.to_complex(value) + Scalars.to_complex(per_class[partner])
        pair_reality[label] = abs(s.imag)

    integrality = scalars.is_integer(kawasaki_total, model.tolerance)

    report = IndexReport(
        model_name=model.name,
        mode=scalars.mode,
        per_class=per_class,
        kawasaki_total=kawasaki_total,
        assembly_total=assembly_total,
        oracle_value=oracle_value,
        residuals=residuals,
        integrality_verdict=integrality,
        pair_reality=pair_reality,
        convention={
            "lefschetz_normalization": "forward-rotation holomorphic "
                                       "(twist / (1 - e^{i theta}))",
            "heat_supertrace": "inverse acting on fibers (1 - e^{-i theta})",
        },
    )
    report.psc_obstruction, report.psc_note = psc_flag(report, model)
    return report


def _inverse_class_labels(model: QuotientModel, handles: dict) -> dict:
    """label -> label of the class of the inverse representative."""
    out = {}
    items = list(handles.items())
    for label, handle in items:
        rep = handle.representative
        if isinstance(model.group, CrystGroup):
            inv = rep.inverse()
            for lab2, h2 in items:
                if h2.contains(inv):
                    out[label] = lab2
                    break
        else:
            table = model.group.table
            inv = table.inv(rep)
            for lab2, h2 in items:
                if h2.contains(inv):
                    out[label] = lab2
                    break
    return out


def psc_flag(report: IndexReport, model: QuotientModel) -> tuple[Optional[bool], str]:
    """Obstruction flag: some localized index nonzero, for spin-type operators.

    Dolbeault-kind input is not a spin-type Dirac operator, so the flag is
    suppressed with a note rather than reported false.
    """
    if model.bundle.operator_kind != "spinc_dirac":
        return None, "flag suppressed: operator kind is not spin-type"
    tol = model.tolerance
    nonzero = any(abs(Scalars.to_complex(v)) > tol for v in report.per_class.values())
    return nonzero, ""
