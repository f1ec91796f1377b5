"""Exact arithmetic for finite groups and 2D crystallographic (wallpaper) groups.

Point parts are integer matrices in lattice coordinates, so every wallpaper
point group acts by exact integer arithmetic; orthogonality is checked against
the lattice Gram matrix and translations are exact rationals.  All values are
immutable after construction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

from .errors import DomainError, StructuralError

Mat = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
IMat = tuple[tuple[int, int], tuple[int, int]]
Vec = tuple[Fraction, Fraction]

IDENTITY_MAT: IMat = ((1, 0), (0, 1))


# ---------------------------------------------------------------------------
# 2x2 exact linear algebra
# ---------------------------------------------------------------------------

def mat(rows: Sequence[Sequence]) -> Mat:
    return (
        (Fraction(rows[0][0]), Fraction(rows[0][1])),
        (Fraction(rows[1][0]), Fraction(rows[1][1])),
    )


def imat(rows: Sequence[Sequence]) -> IMat:
    m = ((int(rows[0][0]), int(rows[0][1])), (int(rows[1][0]), int(rows[1][1])))
    for i in range(2):
        for j in range(2):
            if m[i][j] != rows[i][j]:
                raise StructuralError(f"point part entry {rows[i][j]} is not an integer")
    return m


def vec(v: Sequence) -> Vec:
    return (Fraction(v[0]), Fraction(v[1]))


def mat_mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2))
        for i in range(2)
    )


def mat_vec(a, v) -> Vec:
    return (a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1])


def mat_det(a):
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def mat_inv(a) -> Mat:
    d = mat_det(a)
    if d == 0:
        raise StructuralError("singular 2x2 matrix")
    d = Fraction(d)
    return ((a[1][1] / d, -a[0][1] / d), (-a[1][0] / d, a[0][0] / d))


def mat_sub(a, b):
    return tuple(tuple(a[i][j] - b[i][j] for j in range(2)) for i in range(2))


def mat_transpose(a):
    return ((a[0][0], a[1][0]), (a[0][1], a[1][1]))


def vec_add(u: Vec, v: Vec) -> Vec:
    return (u[0] + v[0], u[1] + v[1])


def vec_sub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def vec_frac(v: Vec) -> Vec:
    return (v[0] - math.floor(v[0]), v[1] - math.floor(v[1]))


def vec_floor(v: Vec) -> tuple[int, int]:
    return (math.floor(v[0]), math.floor(v[1]))


def vec_supnorm(v: Vec) -> Fraction:
    return max(abs(v[0]), abs(v[1]))


def matrix_order(a: IMat, cap: int = 12) -> int:
    cur = a
    for n in range(1, cap + 1):
        if cur == IDENTITY_MAT:
            return n
        cur = mat_mul(cur, a)
    raise StructuralError("matrix order exceeds crystallographic cap")


def rotation_turns_for_gram(a: IMat, gram: Mat) -> Fraction:
    """Rotation angle of an integral Gram-orthogonal matrix, in turns.

    The angle is measured in an oriented orthonormal frame for the metric given
    by the Gram matrix; it is snapped to an exact multiple of 1/order and the
    snap is validated.
    """
    if mat_det(a) != 1:
        raise DomainError("orientation-reversing point part has no rotation angle")
    n = matrix_order(a)
    g00, g01, g11 = float(gram[0][0]), float(gram[0][1]), float(gram[1][1])
    # B with B^T B = G and det B > 0 (transpose of the Cholesky factor)
    l00 = math.sqrt(g00)
    l10 = g01 / l00
    l11 = math.sqrt(g11 - l10 * l10)
    b = ((l00, l10), (0.0, l11))
    binv = ((1 / l00, -l10 / (l00 * l11)), (0.0, 1 / l11))
    af = tuple(tuple(float(x) for x in row) for row in a)
    r = mat_mul(mat_mul(b, af), binv)
    theta = math.atan2(r[1][0], r[0][0]) / (2 * math.pi)
    t = Fraction(round(theta * n) % n, n)
    if min(abs(float(t) - theta % 1), abs(float(t) - theta % 1 + 1),
           abs(float(t) - theta % 1 - 1)) > 1e-9:
        raise StructuralError("point-part angle is not a multiple of 1/order")
    return t


def smith_solve(m: IMat, rhs: Vec) -> tuple[bool, Optional[Vec], list[Vec]]:
    """Solve m @ x = rhs for integer x.

    Returns (solvable, particular integer solution, basis of the integer kernel).
    Entries of m are integers; rhs is rational (non-integer rhs components make
    the reduced system unsolvable unless they cancel).
    """
    # Row/column reduce to Smith form tracking the column operations only:
    # u @ m @ v = d  =>  solutions x = v @ y with d @ y = u @ rhs.
    a = [[int(m[0][0]), int(m[0][1])], [int(m[1][0]), int(m[1][1])]]
    u = [[1, 0], [0, 1]]
    v = [[1, 0], [0, 1]]

    def row_op(i, j, k):  # row_i -= k * row_j  (applied to a and u)
        for c in range(2):
            a[i][c] -= k * a[j][c]
            u[i][c] -= k * u[j][c]

    def col_op(i, j, k):  # col_i -= k * col_j  (applied to a and v)
        for r in range(2):
            a[r][i] -= k * a[r][j]
            v[r][i] -= k * v[r][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in range(2):
            a[r][i], a[r][j] = a[r][j], a[r][i]
            v[r][i], v[r][j] = v[r][j], v[r][i]

    # clear position (0,0) to gcd of everything in row/col 0
    for _ in range(64):
        if a[0][0] == 0:
            if a[1][0] != 0:
                swap_rows(0, 1)
            elif a[0][1] != 0:
                swap_cols(0, 1)
            elif a[1][1] != 0:
                swap_rows(0, 1)
                swap_cols(0, 1)
            else:
                break
        changed = False
        if a[1][0] != 0:
            k = a[1][0] // a[0][0]
            row_op(1, 0, k)
            if a[1][0] != 0:
                swap_rows(0, 1)
            changed = True
        elif a[0][1] != 0:
            k = a[0][1] // a[0][0]
            col_op(1, 0, k)
            if a[0][1] != 0:
                swap_cols(0, 1)
            changed = True
        if not changed and a[1][0] == 0 and a[0][1] == 0:
            break

    d = ((a[0][0], 0), (0, a[1][1]))
    b = (
        Fraction(u[0][0]) * rhs[0] + Fraction(u[0][1]) * rhs[1],
        Fraction(u[1][0]) * rhs[0] + Fraction(u[1][1]) * rhs[1],
    )
    y_part: list[Fraction] = []
    kernel_y: list[Vec] = []
    for idx in range(2):
        di = d[idx][idx]
        if di == 0:
            if b[idx] != 0:
                return False, None, []
            y_part.append(Fraction(0))
            kernel_y.append((Fraction(1 if idx == 0 else 0), Fraction(0 if idx == 0 else 1)))
        else:
            yi = b[idx] / di
            if yi.denominator != 1:
                return False, None, []
            y_part.append(yi)
    vmat = ((Fraction(v[0][0]), Fraction(v[0][1])), (Fraction(v[1][0]), Fraction(v[1][1])))
    x_part = mat_vec(vmat, (y_part[0], y_part[1]))
    kernel = [mat_vec(vmat, ky) for ky in kernel_y]
    return True, x_part, kernel


# ---------------------------------------------------------------------------
# Finite groups by multiplication table
# ---------------------------------------------------------------------------

class FiniteGroupTable:
    """A finite group presented by its multiplication table on 0..order-1."""

    def __init__(self, product: Sequence[Sequence[int]], check: bool = True):
        self.order = len(product)
        self.product = tuple(tuple(int(x) for x in row) for row in product)
        if check:
            self._validate()
        self.identity = self._find_identity()
        self.inverse = tuple(self._find_inverse(g) for g in range(self.order))

    def _validate(self) -> None:
        n = self.order
        if n == 0:
            raise StructuralError("empty group table")
        for row in self.product:
            if len(row) != n or any(not (0 <= x < n) for x in row):
                raise StructuralError("group table is not closed")
        if n <= 64:
            triples = ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
        else:
            rng = random.Random(0)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                       for _ in range(10_000))
        for a, b, c in triples:
            if self.product[self.product[a][b]][c] != self.product[a][self.product[b][c]]:
                raise StructuralError("group table is not associative")

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.product[e][g] == g and self.product[g][e] == g
                   for g in range(self.order)):
                return e
        raise StructuralError("group table has no identity")

    def _find_inverse(self, g: int) -> int:
        for h in range(self.order):
            if self.product[g][h] == self.identity:
                if self.product[h][g] != self.identity:
                    raise StructuralError("one-sided inverse in group table")
                return h
        raise StructuralError(f"element {g} has no inverse")

    def mul(self, a: int, b: int) -> int:
        return self.product[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conjugate(self, k: int, g: int) -> int:
        return self.mul(self.mul(k, g), self.inv(k))

    def elements(self) -> range:
        return range(self.order)

    @staticmethod
    def cyclic(n: int) -> "FiniteGroupTable":
        return FiniteGroupTable([[(a + b) % n for b in range(n)] for a in range(n)])

    @staticmethod
    def symmetric(n: int) -> "FiniteGroupTable":
        """S_n as a table; element order is lexicographic on permutation tuples."""
        import itertools

        perms = sorted(itertools.permutations(range(n)))
        index = {p: i for i, p in enumerate(perms)}
        table = [[index[tuple(p[q[i]] for i in range(n))] for q in perms] for p in perms]
        return FiniteGroupTable(table)


# ---------------------------------------------------------------------------
# Affine isometries and crystallographic groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineIsometry:
    """x -> A x + t in lattice coordinates; A integral, t rational."""

    point_part: IMat
    translation: Vec

    @staticmethod
    def of(point_part, translation) -> "AffineIsometry":
        return AffineIsometry(imat(point_part), vec(translation))

    @staticmethod
    def identity() -> "AffineIsometry":
        return AffineIsometry(IDENTITY_MAT, (Fraction(0), Fraction(0)))

    def compose(self, other: "AffineIsometry") -> "AffineIsometry":
        a, b = self.point_part, other.point_part
        return AffineIsometry(
            tuple(tuple(int(x) for x in row) for row in mat_mul(a, b)),  # type: ignore[arg-type]
            vec_add(self.translation, mat_vec(a, other.translation)),
        )

    def inverse(self) -> "AffineIsometry":
        ainv = mat_inv(self.point_part)
        ai = tuple(tuple(int(x) for x in row) for row in ainv)
        for i in range(2):
            for j in range(2):
                if ainv[i][j].denominator != 1:
                    raise StructuralError("point part is not invertible over the lattice")
        return AffineIsometry(ai, mat_vec(ai, (-self.translation[0], -self.translation[1])))  # type: ignore[arg-type]

    def apply(self, x: Vec) -> Vec:
        return vec_add(mat_vec(self.point_part, x), self.translation)

    @property
    def frac_part(self) -> Vec:
        return vec_frac(self.translation)

    @property
    def lattice_offset(self) -> tuple[int, int]:
        return vec_floor(self.translation)

    @property
    def is_identity(self) -> bool:
        return self.point_part == IDENTITY_MAT and self.translation == (0, 0)

    @property
    def is_translation(self) -> bool:
        return self.point_part == IDENTITY_MAT

    def __repr__(self) -> str:
        a = self.point_part
        t = self.translation
        return f"Aff[{a[0][0]},{a[0][1]};{a[1][0]},{a[1][1]}|{t[0]},{t[1]}]"


@dataclass(frozen=True)
class FixedSetDescriptor:
    """Fixed locus of an affine isometry: empty, points, a line, or everything."""

    kind: str  # "empty" | "points" | "line" | "full"
    points: tuple[Vec, ...] = ()
    line_point: Optional[Vec] = None
    line_direction: Optional[Vec] = None


class CrystGroup:
    """A 2D crystallographic group: lattice plus finite point group with coset vectors.

    Elements are AffineIsometry values in lattice coordinates; the translation
    lattice is Z^2 in those coordinates.
    """

    def __init__(self, lattice_basis, generators: Sequence[AffineIsometry]):
        self.lattice_basis: Mat = mat(lattice_basis)
        if mat_det(self.lattice_basis) == 0:
            raise StructuralError("lattice basis is singular")
        self.gram: Mat = mat_mul(mat_transpose(self.lattice_basis), self.lattice_basis)
        self.generators = tuple(generators)
        self._close()

    def _close(self) -> None:
        for g in self.generators:
            a = g.point_part
            if mat_mul(mat_mul(mat_transpose(a), self.gram), a) != self.gram:
                raise StructuralError("point part does not preserve the lattice Gram matrix")
            if mat_det(a) not in (1, -1):
                raise StructuralError("point part is not unimodular")
            if matrix_order(a) not in (1, 2, 3, 4, 6):
                raise StructuralError(
                    "crystallographic restriction violated: point-part order not in {1,2,3,4,6}")
        # BFS closure of (point part, coset vector mod lattice)
        coset: dict[IMat, Vec] = {IDENTITY_MAT: (Fraction(0), Fraction(0))}
        order_list: list[IMat] = [IDENTITY_MAT]
        frontier = [AffineIsometry(IDENTITY_MAT, (Fraction(0), Fraction(0)))]
        gens = sorted(self.generators, key=lambda g: (g.point_part, g.translation))
        while frontier:
            cur = frontier.pop(0)
            for g in gens:
                nxt = g.compose(cur)
                a, s = nxt.point_part, vec_frac(nxt.translation)
                if a in coset:
                    if coset[a] != s:
                        raise StructuralError(
                            "translation lattice is not normal: conflicting coset vectors")
                else:
                    coset[a] = s
                    order_list.append(a)
                    frontier.append(AffineIsometry(a, s))
            if len(coset) > 12:
                raise StructuralError("point group closure exceeds wallpaper bound")
        self.point_parts: tuple[IMat, ...] = tuple(order_list)
        self.coset_vectors: dict[IMat, Vec] = coset
        self._pp_index = {a: i for i, a in enumerate(self.point_parts)}

    # -- structure ----------------------------------------------------------

    @property
    def point_group_order(self) -> int:
        return len(self.point_parts)

    def point_group_table(self) -> tuple[FiniteGroupTable, tuple[IMat, ...]]:
        """The quotient by the lattice, as a table with its faithful point parts."""
        idx = self._pp_index
        table = [[idx[tuple(tuple(int(x) for x in row) for row in mat_mul(a, b))]
                  for b in self.point_parts] for a in self.point_parts]
        return FiniteGroupTable(table), self.point_parts

    def covolume(self) -> Fraction:
        return abs(mat_det(self.lattice_basis))

    def contains(self, g: AffineIsometry) -> bool:
        s = self.coset_vectors.get(g.point_part)
        return s is not None and vec_frac(g.translation) == s

    def element(self, point_part, translation) -> AffineIsometry:
        g = AffineIsometry.of(point_part, translation)
        if not self.contains(g):
            raise StructuralError(f"{g} does not belong to the group")
        return g

    def rotation_turns(self, a: IMat) -> Fraction:
        """Rotation angle of a point part as a fraction of a full turn."""
        return rotation_turns_for_gram(a, self.gram)

    # -- element enumeration -------------------------------------------------

    def elements_in_ball(self, radius: Fraction) -> list[AffineIsometry]:
        """All group elements with sup-norm of translation <= radius.

        Ordered by (sup-norm, translation lexicographic, point-part index); this
        fixed order makes every downstream enumeration deterministic.
        """
        out = []
        for a in self.point_parts:
            s = self.coset_vectors[a]
            lo0 = math.ceil(-radius - s[0])
            hi0 = math.floor(radius - s[0])
            lo1 = math.ceil(-radius - s[1])
            hi1 = math.floor(radius - s[1])
            for m in range(lo0, hi0 + 1):
                for n in range(lo1, hi1 + 1):
                    t = (s[0] + m, s[1] + n)
                    if vec_supnorm(t) <= radius:
                        out.append(AffineIsometry(a, t))
        out.sort(key=lambda g: (vec_supnorm(g.translation), g.translation,
                                self._pp_index[g.point_part]))
        return out

    def iterate_elements(self) -> Iterator[AffineIsometry]:
        """All elements, in increasing sup-norm order, lazily."""
        radius = Fraction(0)
        seen_up_to = Fraction(-1)
        while True:
            for g in self.elements_in_ball(radius):
                if vec_supnorm(g.translation) > seen_up_to:
                    yield g
            seen_up_to = radius
            radius += 1


GroupLike = Union[FiniteGroupTable, CrystGroup]


# ---------------------------------------------------------------------------
# Conjugacy machinery
# ---------------------------------------------------------------------------

def conjugate_test(g, h, group: GroupLike) -> bool:
    """Is h = k g k^{-1} for some k in the group?"""
    if isinstance(group, FiniteGroupTable):
        return any(group.conjugate(k, g) == h for k in group.elements())
    return _cryst_conjugate_witness(g, h, group) is not None


def _cryst_conjugate_witness(g: AffineIsometry, h: AffineIsometry,
                             group: CrystGroup) -> Optional[AffineIsometry]:
    """A witness (B, w) with (B,w) g (B,w)^{-1} = h, or None."""
    for b in group.point_parts:
        binv = mat_inv(b)
        if mat_mul(mat_mul(b, g.point_part), binv) != tuple(map(tuple, h.point_part)):
            continue
        # translation equation: (I - A_h) w = a_h - B a_g, w in s_B + lattice
        m = mat_sub(IDENTITY_MAT, h.point_part)
        rhs = vec_sub(h.translation, mat_vec(b, g.translation))
        s = group.coset_vectors[b]
        d = mat_det(m)
        if d != 0:
            w = mat_vec(mat_inv(m), rhs)
            if vec_frac(vec_sub(w, s)) == (0, 0):
                return AffineIsometry(b, w)
        else:
            ok, lam, _ = smith_solve(
                tuple(tuple(int(x) for x in row) for row in m),  # type: ignore[arg-type]
                vec_sub(rhs, mat_vec(m, s)))
            if ok:
                return AffineIsometry(b, vec_add(s, lam))
    return None


class Centralizer:
    """Centralizer descriptor: finite element list, or point parts plus a
    translation sublattice solving (I - A) t = 0."""

    def __init__(self, group: GroupLike, g, finite_elements=None,
                 point_parts=None, kernel_basis=None):
        self.group = group
        self.g = g
        self.finite_elements = finite_elements
        self.point_parts = point_parts or []
        self.kernel_basis = kernel_basis or []

    @property
    def is_finite(self) -> bool:
        return self.finite_elements is not None

    def order(self):
        return len(self.finite_elements) if self.is_finite else math.inf

    def elements(self):
        if not self.is_finite:
            raise DomainError("infinite centralizer has no element list")
        return list(self.finite_elements)

    def contains(self, h) -> bool:
        if isinstance(self.group, FiniteGroupTable):
            return h in self.finite_elements
        if self.is_finite:
            return h in self.finite_elements
        for b, w0 in self.point_parts:
            if b != h.point_part:
                continue
            diff = vec_sub(h.translation, w0)
            if all(c.denominator == 1 for c in diff):
                return True
        return False


def centralizer(g, group: GroupLike) -> Centralizer:
    """Exact centralizer {h : hg = gh}."""
    if isinstance(group, FiniteGroupTable):
        elems = [h for h in group.elements()
                 if group.mul(h, g) == group.mul(g, h)]
        return Centralizer(group, g, finite_elements=elems)

    a, t = g.point_part, g.translation
    m = mat_sub(IDENTITY_MAT, a)
    d = mat_det(m)
    commuting = [b for b in group.point_parts
                 if mat_mul(b, a) == tuple(map(tuple, mat_mul(a, b)))]
    if d != 0:
        # (I - A) w = (I - B) a_g has a unique rational solution per B
        elems = []
        minv = mat_inv(m)
        for b in commuting:
            rhs = vec_sub(t, mat_vec(b, t))
            w = mat_vec(minv, rhs)
            if vec_frac(vec_sub(w, group.coset_vectors[b])) == (0, 0):
                elems.append(AffineIsometry(b, w))
        elems.sort(key=lambda e: (vec_supnorm(e.translation), e.translation,
                                  group._pp_index[e.point_part]))
        return Centralizer(group, g, finite_elements=elems)

    # g is a translation (I - A = 0 for A = I; reflections are rejected upstream)
    if a != IDENTITY_MAT:
        raise StructuralError("centralizer for orientation-reversing parts is unsupported")
    parts = []
    for b in commuting:
        if mat_vec(b, t) == t:
            parts.append((b, group.coset_vectors[b]))
    kernel = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    return Centralizer(group, g, point_parts=parts, kernel_basis=kernel)


@dataclass
class ConjugacyClassHandle:
    """A conjugacy class with representative, centralizer access and coset section."""

    group: GroupLike
    representative: object
    kind_tag: str  # "finite-class" | "infinite-class"
    label: str
    invariant_data: tuple = ()
    _members: Optional[tuple] = field(default=None, repr=False)
    _contains_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def contains(self, h) -> bool:
        key = h if isinstance(self.group, FiniteGroupTable) else (h.point_part, h.translation)
        hit = self._contains_cache.get(key)
        if hit is None:
            hit = conjugate_test(self.representative, h, self.group)
            self._contains_cache[key] = hit
        return hit

    def centralizer(self) -> Centralizer:
        return centralizer(self.representative, self.group)

    def members(self):
        """All class members (finite classes only)."""
        if self._members is not None:
            return self._members
        if isinstance(self.group, FiniteGroupTable):
            g = self.representative
            mem = sorted({self.group.conjugate(k, g) for k in self.group.elements()})
            self._members = tuple(mem)
            return self._members
        if self.kind_tag != "finite-class":
            raise DomainError("infinite class has no member list")
        # crystallographic finite classes are translation classes: the orbit
        # of the translation vector under the point group
        g = self.representative
        if g.point_part != IDENTITY_MAT:
            raise DomainError("finite crystallographic class must be a translation class")
        mem = {AffineIsometry(IDENTITY_MAT, mat_vec(b, g.translation))
               for b in self.group.point_parts}
        self._members = tuple(sorted(mem, key=lambda e: (e.translation,)))
        return self._members

    def coset_section(self) -> Iterator:
        """Lazily enumerate K with {k g k^{-1} : k in K} = (g), no repeats.

        Enumeration order: table order for finite groups; increasing sup-norm
        of translation part, ties lexicographic, for crystallographic groups.
        """
        g = self.representative
        if isinstance(self.group, FiniteGroupTable):
            seen = set()
            for k in self.group.elements():
                c = self.group.conjugate(k, g)
                if c not in seen:
                    seen.add(c)
                    yield k
            return
        seen_aff = set()
        for k in self.group.iterate_elements():
            c = k.compose(g).compose(k.inverse())
            key = (c.point_part, c.translation)
            if key not in seen_aff:
                seen_aff.add(key)
                yield k


def enumerate_classes_finite(table: FiniteGroupTable) -> list[ConjugacyClassHandle]:
    """Conjugacy classes of a finite table group; representatives are minimal indices."""
    if not isinstance(table, FiniteGroupTable):
        raise StructuralError("enumerate_classes_finite expects a FiniteGroupTable")
    unassigned = set(table.elements())
    handles = []
    while unassigned:
        g = min(unassigned)
        orbit = {table.conjugate(k, g) for k in table.elements()}
        unassigned -= orbit
        label = "e" if g == table.identity else f"c{g}"
        handles.append(ConjugacyClassHandle(
            group=table, representative=g, kind_tag="finite-class", label=label,
            invariant_data=(g,), _members=tuple(sorted(orbit))))
    handles.sort(key=lambda h: h.representative)
    return handles


# ---------------------------------------------------------------------------
# Fixed sets of affine isometries
# ---------------------------------------------------------------------------

def fixed_set(g: AffineIsometry, ambient) -> FixedSetDescriptor:
    """Fixed locus of g on the plane or on a torus.

    `ambient` is "plane" or ("torus", lattice) -- lattice coordinates mod Z^2.
    On the torus the point count equals |det(I - A)| whenever I - A is invertible.
    """
    a, t = g.point_part, g.translation
    m = mat_sub(IDENTITY_MAT, a)
    d = mat_det(m)
    on_torus = ambient != "plane"

    if a == IDENTITY_MAT:
        offset_ok = (t == (0, 0)) if not on_torus else (vec_frac(t) == (0, 0))
        return FixedSetDescriptor("full") if offset_ok else FixedSetDescriptor("empty")

    if d != 0:
        center = mat_vec(mat_inv(m), t)
        if not on_torus:
            return FixedSetDescriptor("points", (center,))
        pts = set()
        n = abs(int(d))
        minv = mat_inv(m)
        for p in range(n):
            for q in range(n):
                x = mat_vec(minv, vec_add(t, (Fraction(p), Fraction(q))))
                pts.add(vec_frac(x))
        pts_list = tuple(sorted(pts))
        if len(pts_list) != n:
            raise StructuralError("torus fixed-point count disagrees with |det(I-A)|")
        return FixedSetDescriptor("points", pts_list)

    # singular I - A with A != I: rank one, so the fixed locus is a rational
    # affine line when the two row equations are consistent (reflection axis),
    # empty otherwise (glide)
    rows = [(m[0][0], m[0][1], t[0]), (m[1][0], m[1][1], t[1])]
    if any(r[0] == 0 and r[1] == 0 and r[2] != 0 for r in rows):
        return FixedSetDescriptor("empty")
    rows = [r for r in rows if r[0] != 0 or r[1] != 0]
    if not rows:
        return FixedSetDescriptor("empty")
    r0, r1, rhs = rows[0]
    for s0, s1, srhs in rows[1:]:
        # proportionality of (s0, s1, srhs) to (r0, r1, rhs)
        if s0 * r1 != s1 * r0 or s0 * rhs != srhs * r0 or s1 * rhs != srhs * r1:
            return FixedSetDescriptor("empty")
    point = (rhs / r0, Fraction(0)) if r0 != 0 else (Fraction(0), rhs / r1)
    return FixedSetDescriptor("line", line_point=point, line_direction=(Fraction(-r1), Fraction(r0)))
