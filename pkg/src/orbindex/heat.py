"""Numerical heat-kernel verification on flat plane models.

Only flat ambients are heat-verified: there the heat kernel is the exact
Gaussian (4 pi t)^{-n/2} e^{-d^2/4t} with identity fiber transport, so
quadrature checks the index identities without curved parametrices.  Class
sums are truncated at a radius derived from the Gaussian tail estimate, never
adaptively, so reports are reproducible bit for bit for a fixed spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ResolutionError, StructuralError
from .exactnum import Scalars
from .groups import (
    AffineIsometry,
    ConjugacyClassHandle,
    CrystGroup,
    IDENTITY_MAT,
    centralizer,
    mat_det,
    mat_sub,
)
from .sectors import (
    CutoffFunction,
    EuclideanPlane,
    QuotientModel,
    build_cutoff,
    fiber_eigendata,
    supertrace_turns,
)

FLOAT = Scalars("float")


# ---------------------------------------------------------------------------
# Kernel model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianKernelModel:
    """Flat heat kernel data: dimension, metric, identity fiber transport."""

    model: QuotientModel
    dimension: int = 2

    def __post_init__(self):
        if not isinstance(self.model.ambient, EuclideanPlane):
            raise StructuralError("heat verification supports flat plane models only")

    @property
    def gram(self):
        return self.model.group.gram

    def dist2(self, x, y) -> float:
        g = self.gram
        dx, dy = float(x[0]) - float(y[0]), float(x[1]) - float(y[1])
        return (float(g[0][0]) * dx * dx + 2 * float(g[0][1]) * dx * dy
                + float(g[1][1]) * dy * dy)


def kernel_eval(kernel: GaussianKernelModel, x, y, t: float) -> float:
    """Scalar heat kernel value (4 pi t)^{-n/2} e^{-d(x,y)^2/4t}."""
    if t <= 0:
        raise DomainError("heat time must be positive")
    n = kernel.dimension
    return (4 * math.pi * t) ** (-n / 2) * math.exp(-kernel.dist2(x, y) / (4 * t))


def fiber_matrix(model: QuotientModel, h: AffineIsometry) -> np.ndarray:
    """Action of h on the fiber frame (degree-0 part, dzbar part)."""
    if h.point_part == IDENTITY_MAT:
        return np.eye(2, dtype=complex)
    turns = model.group.rotation_turns(h.point_part)
    return np.diag([1.0, np.exp(2j * math.pi * float(turns))])


def kernel_invariance_residual(model: QuotientModel, samples: int = 1000,
                               t: float = 0.1, seed: int = 0) -> float:
    """max over sampled (x, y, g) of ||g K_t(g^{-1}x, y) - K_t(x, g y) g||."""
    rng = np.random.default_rng(seed)
    kernel = GaussianKernelModel(model)
    pool = model.group.elements_in_ball(Fraction(2))
    worst = 0.0
    for _ in range(samples):
        x = tuple(rng.uniform(-2, 2, size=2))
        y = tuple(rng.uniform(-2, 2, size=2))
        g = pool[int(rng.integers(len(pool)))]
        rho = fiber_matrix(model, g)
        ginv = g.inverse()
        gx = (float(ginv.point_part[0][0]) * x[0] + float(ginv.point_part[0][1]) * x[1]
              + float(ginv.translation[0]),
              float(ginv.point_part[1][0]) * x[0] + float(ginv.point_part[1][1]) * x[1]
              + float(ginv.translation[1]))
        gy = (float(g.point_part[0][0]) * y[0] + float(g.point_part[0][1]) * y[1]
              + float(g.translation[0]),
              float(g.point_part[1][0]) * y[0] + float(g.point_part[1][1]) * y[1]
              + float(g.translation[1]))
        lhs = rho * kernel_eval(kernel, gx, y, t)
        rhs = kernel_eval(kernel, x, gy, t) * rho
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


# ---------------------------------------------------------------------------
# Quadrature specification with tail-derived truncation
# ---------------------------------------------------------------------------

@dataclass
class QuadratureSpec:
    resolution: int
    truncation_radius: int
    tolerance: float
    tail_bound: float

    @staticmethod
    def for_model(model: QuotientModel, t_max: float, tolerance: float = 1e-6,
                  resolution: int = 64) -> "QuadratureSpec":
        """Pick the class-sum radius from the explicit Gaussian tail estimate."""
        radius = 2
        while radius < 64:
            bound = class_sum_tail_bound(model, t_max, radius)
            if bound < tolerance / 10:
                return QuadratureSpec(resolution, radius, tolerance, bound)
            radius += 1
        raise ResolutionError("tail bound does not reach tolerance/10", resolution)


def _gram_min_eig(model: QuotientModel) -> float:
    g = model.group.gram
    a, b, c = float(g[0][0]), float(g[0][1]), float(g[1][1])
    tr, det = a + c, a * c - b * b
    return (tr - math.sqrt(max(tr * tr - 4 * det, 0.0))) / 2


def class_sum_tail_bound(model: QuotientModel, t: float, radius: int) -> float:
    """Upper bound for the class-sum terms with translation sup-norm > radius.

    For a rotation h by angle theta about center p, |hx - x| >= 2 sin(theta/2)
    |x - p| and the center norm grows linearly with the translation norm, so
    shell m contributes at most (shell count) x sup of the Gaussian.  The sum
    over shells converges super-exponentially and is evaluated to negligible
    remainder.
    """
    if not isinstance(model.group, CrystGroup):
        raise StructuralError("heat verification supports flat plane models only")
    group: CrystGroup = model.group
    sin_min = 1.0
    opnorm_inv = 1.0
    for a in group.point_parts:
        if a == IDENTITY_MAT:
            continue
        turns = float(group.rotation_turns(a))
        sin_min = min(sin_min, abs(math.sin(math.pi * turns)))
        m = mat_sub(IDENTITY_MAT, a)
        opnorm = max(abs(m[0][0]) + abs(m[0][1]), abs(m[1][0]) + abs(m[1][1]))
        opnorm_inv = min(opnorm_inv, 1.0 / float(opnorm))
    metric = math.sqrt(_gram_min_eig(model))
    p = group.point_group_order
    pref = (4 * math.pi * t) ** -1 * 2.0 * math.sqrt(float(abs(mat_det(group.gram))))
    total = 0.0
    m = radius + 1
    while m < radius + 10_000:
        # center sup-norm >= m * opnorm_inv; distance to the unit cell >= that - 2
        d = metric * 2 * sin_min * max(m * opnorm_inv - 2.0, 0.0)
        shell_count = (8 * m + 4) * p
        term = shell_count * pref * math.exp(-d * d / (4 * t))
        total += term
        if term < 1e-300 and d > 0:
            break
        m += 1
    return total


# ---------------------------------------------------------------------------
# Localized heat traces
# ---------------------------------------------------------------------------

def _class_members_in_ball(model: QuotientModel, cls: ConjugacyClassHandle,
                           radius: int) -> list[AffineIsometry]:
    pool = model.group.elements_in_ball(Fraction(radius))
    return [h for h in pool if cls.contains(h)]


def _grid(n_per_unit: int, lo: float = 0.0, hi: float = 1.0):
    n = int(round((hi - lo) * n_per_unit))
    xs = lo + (hi - lo) * (np.arange(n) + 0.5) / n
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    return gx, gy


def _cutoff_grid(cutoff: CutoffFunction, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    group: CrystGroup = cutoff.group
    if cutoff.kind == "indicator":
        inside = (gx >= 0) & (gx < 1) & (gy >= 0) & (gy < 1)
        return inside.astype(float) / group.point_group_order
    # smooth kind, vectorized over the grid
    num = _bump_np(gx) * _bump_np(gy)
    total = np.zeros_like(gx)
    from .groups import mat_inv
    for a in group.point_parts:
        ainv = mat_inv(a)
        s = group.coset_vectors[a]
        vx, vy = gx - float(s[0]), gy - float(s[1])
        bx = float(ainv[0][0]) * vx + float(ainv[0][1]) * vy
        by = float(ainv[1][0]) * vx + float(ainv[1][1]) * vy
        for m in range(math.floor(bx.min()) - 2, math.floor(bx.max()) + 3):
            col = _bump_np(bx - m)
            if not col.any():
                continue
            for k in range(math.floor(by.min()) - 2, math.floor(by.max()) + 3):
                total += col * _bump_np(by - k)
    return np.where(num > 0, num / np.where(total > 0, total, 1.0), 0.0)


def _bump_np(u: np.ndarray) -> np.ndarray:
    s = (2.0 * u - 1.0) / 3.0
    out = np.zeros_like(u)
    mask = np.abs(s) < 1.0
    out[mask] = np.exp(-1.0 / (1.0 - s[mask] ** 2))
    return out


def partition_residuals_batch(cutoff: CutoffFunction, xs: np.ndarray,
                              ys: np.ndarray) -> np.ndarray:
    """|sum_gamma c(gamma^{-1} x) - 1| at many points, vectorized.

    Sums actual cut-off evaluations over every group element whose inverse
    can move a point into the support window; elements outside the window
    contribute exactly zero by compact support.
    """
    from .groups import mat_inv

    group: CrystGroup = cutoff.group
    total = np.zeros_like(xs, dtype=float)
    pad = 2 if cutoff.kind == "indicator" else 3
    for a in group.point_parts:
        ainv = mat_inv(a)
        s = group.coset_vectors[a]
        vx, vy = xs - float(s[0]), ys - float(s[1])
        bx = float(ainv[0][0]) * vx + float(ainv[0][1]) * vy
        by = float(ainv[1][0]) * vx + float(ainv[1][1]) * vy
        for m in range(math.floor(bx.min()) - pad, math.floor(bx.max()) + pad + 1):
            for k in range(math.floor(by.min()) - pad, math.floor(by.max()) + pad + 1):
                zx, zy = bx - m, by - k
                if cutoff.kind == "indicator":
                    total += _cutoff_grid(cutoff, zx, zy)
                    continue
                mask = (_bump_np(zx) * _bump_np(zy)) > 0
                if mask.any():
                    total[mask] += _cutoff_grid(cutoff, zx[mask], zy[mask])
    return np.abs(total - 1.0)


def _integral_for_member(kernel: GaussianKernelModel, h: AffineIsometry,
                         t: float, cvals: np.ndarray, gx, gy,
                         cell_area: float) -> complex:
    """Midpoint sum of c(x) k_t(hx, x) over the domain, metric volume included."""
    a, tr = h.point_part, h.translation
    dx = (float(a[0][0]) - 1) * gx + float(a[0][1]) * gy + float(tr[0])
    dy = float(a[1][0]) * gx + (float(a[1][1]) - 1) * gy + float(tr[1])
    g = kernel.gram
    d2 = (float(g[0][0]) * dx * dx + 2 * float(g[0][1]) * dx * dy
          + float(g[1][1]) * dy * dy)
    vals = np.exp(-d2 / (4 * t)) / (4 * math.pi * t)
    vol = math.sqrt(float(abs(mat_det(g))))
    return complex(np.sum(cvals * vals) * vol * cell_area)


@dataclass
class HeatTraceReport:
    label: str
    per_t: dict                      # t -> complex value
    truncation_bound: float
    max_t_variation: float
    comparison_residual: Optional[float] = None
    convention: dict = field(default_factory=dict)


def g_heat_trace(model: QuotientModel, cls: ConjugacyClassHandle, t: float,
                 quad: QuadratureSpec, cutoff: Optional[CutoffFunction] = None) -> complex:
    """Localized heat supertrace by quadrature.

    Sums, over class members within the truncation radius, the integrals of
    c(x) Tr_s[h^{-1} K_t(hx, x)]; with identity transport the supertrace
    factors into the fiber eigen-character times the scalar Gaussian.
    Richardson refinement of the midpoint rule; unreachable tolerance raises
    with a suggested resolution.
    """
    if t <= 0:
        raise DomainError("heat time must be positive")
    kernel = GaussianKernelModel(model)
    cutoff = cutoff or build_cutoff(model, "indicator")
    members = _class_members_in_ball(model, cls, quad.truncation_radius)
    lo, hi = (0.0, 1.0) if cutoff.kind == "indicator" else (-1.0, 2.0)

    def evaluate(n: int) -> complex:
        gx, gy = _grid(n, lo, hi)
        cvals = _cutoff_grid(cutoff, gx, gy)
        cell = ((hi - lo) / gx.shape[0]) ** 2
        total = 0j
        for h in members:
            tau = _supertrace_factor(model, h)
            if tau == 0:
                continue
            total += tau * _integral_for_member(kernel, h, t, cvals, gx, gy, cell)
        return total

    coarse = evaluate(quad.resolution)
    fine = evaluate(2 * quad.resolution)
    value = (4 * fine - coarse) / 3
    err = abs(fine - coarse)
    if err > quad.tolerance and abs(value) > quad.tolerance:
        raise ResolutionError(
            f"quadrature error estimate {err:.3e} exceeds tolerance",
            suggested_resolution=4 * quad.resolution)
    return value


def _supertrace_factor(model: QuotientModel, h: AffineIsometry) -> complex:
    if h.point_part == IDENTITY_MAT:
        turns = Fraction(0)
    else:
        turns = model.group.rotation_turns(h.point_part)
    data = fiber_eigendata(turns, model.bundle)
    return Scalars.to_complex(supertrace_turns(data, FLOAT))


def t_independence(model: QuotientModel, cls: ConjugacyClassHandle,
                   t_list: Sequence[float], quad: QuadratureSpec,
                   cutoff: Optional[CutoffFunction] = None) -> HeatTraceReport:
    """Max pairwise deviation of the localized heat trace across t values."""
    if any(t <= 0 for t in t_list):
        raise DomainError("heat times must be positive")
    values = {t: g_heat_trace(model, cls, t, quad, cutoff) for t in t_list}
    vs = list(values.values())
    deviation = max((abs(a - b) for a in vs for b in vs), default=0.0)
    return HeatTraceReport(cls.label, values, quad.tail_bound, deviation)


def mckean_singer_compare(model: QuotientModel, cls: ConjugacyClassHandle,
                          t: float, quad: QuadratureSpec,
                          cutoff: Optional[CutoffFunction] = None) -> float:
    """|heat trace - localized index| at one t."""
    from .engine import localized_index, scalars_for_model

    heat = g_heat_trace(model, cls, t, quad, cutoff)
    ind = Scalars.to_complex(localized_index(model, cls, scalars_for_model(model)))
    return abs(heat - ind)


# ---------------------------------------------------------------------------
# Euclidean orbital integrals
# ---------------------------------------------------------------------------

def orbital_integral_euclidean(model: QuotientModel, cls: ConjugacyClassHandle,
                               t: float, quad: QuadratureSpec) -> complex:
    """vol(Z_G(g)/Z_Gamma(g)) times the integral of the kernel over the
    conjugation orbit, in the Lebesgue-times-counting Haar normalization.

    For a rotation class the coset space is parametrized by the rotation
    center; for translations it is the compact rotation factor, where the
    graded fiber character kills the integrand; for the identity it is the
    quotient volume times the supertrace of the kernel at the origin.
    """
    if t <= 0:
        raise DomainError("heat time must be positive")
    if not isinstance(model.group, CrystGroup):
        raise StructuralError("orbital integrals need a crystallographic plane model")
    group = model.group
    kernel = GaussianKernelModel(model)
    g = cls.representative
    covol = math.sqrt(float(abs(mat_det(group.gram))))

    if g.is_identity:
        vol = covol / group.point_group_order
        return vol * _supertrace_factor(model, g) / (4 * math.pi * t)

    if g.is_translation:
        # Z_G = translations, Z_Gamma = lattice; integrate over the rotation factor
        q = 64
        total = 0j
        for idx in range(q):
            phi = 2 * math.pi * idx / q
            ca, sa = math.cos(phi), math.sin(phi)
            tau_rot = (float(g.translation[0]) * ca - float(g.translation[1]) * sa,
                       float(g.translation[0]) * sa + float(g.translation[1]) * ca)
            # graded fiber character of a translation vanishes
            total += 0.0 * kernel_eval(kernel, tau_rot, (0.0, 0.0), t)
        return covol * total / q

    # rotation class: integrate over centers u, weight 1/|Z_Gamma(g)|
    zq = centralizer(g, group).order()
    tau = _supertrace_factor(model, g)
    radius = float(quad.truncation_radius)
    n = 2 * quad.resolution
    xs = -radius + 2 * radius * (np.arange(n) + 0.5) / n
    ux, uy = np.meshgrid(xs, xs, indexing="ij")
    # h_u(0) = (I - R) u for the rotation R about center u
    a = g.point_part
    dx = (1 - float(a[0][0])) * ux - float(a[0][1]) * uy
    dy = -float(a[1][0]) * ux + (1 - float(a[1][1])) * uy
    gm = group.gram
    d2 = (float(gm[0][0]) * dx * dx + 2 * float(gm[0][1]) * dx * dy
          + float(gm[1][1]) * dy * dy)
    vol = math.sqrt(float(abs(mat_det(gm))))
    integral = float(np.sum(np.exp(-d2 / (4 * t)))) / (4 * math.pi * t) \
        * (2 * radius / n) ** 2 * vol
    return tau * integral / zq
