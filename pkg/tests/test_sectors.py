"""Sector enumeration, cut-off functions and fixed-set weights."""

import random
from fractions import Fraction

import pytest

from orbindex.errors import DomainError, StructuralError
from orbindex.groups import AffineIsometry, CrystGroup
from orbindex.sectors import (
    BundleSpec,
    EuclideanPlane,
    QuotientModel,
    build_cutoff,
    cryst_fixed_classes,
    cutoff_on_fixed_set_direct,
    enumerate_sectors,
    fiber_eigendata,
    fixed_set_cutoff,
    induced_torus_model,
    sphere_model,
    square_torus_rotation_model,
    translation_class,
    wallpaper_model,
)

ROT = ((0, -1), (1, 0))


def make_p4_model(generators=None):
    r = AffineIsometry.of(ROT, (0, 0))
    t1 = AffineIsometry.of(((1, 0), (0, 1)), (1, 0))
    t2 = AffineIsometry.of(((1, 0), (0, 1)), (0, 1))
    gens = generators or [r, t1, t2]
    return wallpaper_model(CrystGroup([[1, 0], [0, 1]], gens), "p4")


class TestEnumeration:
    def test_torus_z4_sector_counts(self):
        model = square_torus_rotation_model(4, "e_z4")
        comps = enumerate_sectors(model)
        by_label = {}
        for c in comps:
            by_label.setdefault(c.label, []).append(c)
        assert set(by_label) == {"e", "r1", "r2", "r3"}
        # the quarter-turn sector has 2 isolated points
        assert sum(c.geometry.orbit_size for c in by_label["r1"]) == 2
        assert sum(c.geometry.orbit_size for c in by_label["r2"]) == 4

    def test_p4_has_eight_fixed_classes(self):
        model = make_p4_model()
        labels = [c.label for c in cryst_fixed_classes(model.group)]
        assert len(labels) == 8
        assert labels == sorted(labels)
        assert set(labels) == {"e", "r_origin", "r_center", "r3_origin", "r3_center",
                               "r2_origin", "r2_center", "r2_edge"}

    def test_trivial_group_single_full_sector(self):
        model = square_torus_rotation_model(1, "free")
        comps = enumerate_sectors(model)
        assert len(comps) == 1 and comps[0].is_full

    def test_generator_relabeling_invariance(self):
        base = make_p4_model()
        r = AffineIsometry.of(ROT, (0, 0))
        t1 = AffineIsometry.of(((1, 0), (0, 1)), (1, 0))
        t2 = AffineIsometry.of(((1, 0), (0, 1)), (0, 1))
        # different generating sets for the same group
        r_shift = AffineIsometry.of(ROT, (1, 0))
        alt = make_p4_model([t2, r_shift, t1, r])
        base_data = [(c.label, c.component_tag, c.normal_angle_turns,
                      getattr(c.geometry, "weight", None))
                     for c in enumerate_sectors(base)]
        alt_data = [(c.label, c.component_tag, c.normal_angle_turns,
                     getattr(c.geometry, "weight", None))
                    for c in enumerate_sectors(alt)]
        assert base_data == alt_data

    def test_weights(self):
        model = make_p4_model()
        comps = {c.label: c for c in enumerate_sectors(model)}
        assert comps["r_origin"].geometry.weight == Fraction(1, 4)
        assert comps["r2_edge"].geometry.weight == Fraction(1, 2)
        assert comps["r2_origin"].geometry.weight == Fraction(1, 4)
        assert comps["e"].geometry.local_group_order == 4

    def test_normal_angles_are_inverse_rotation(self):
        model = make_p4_model()
        comps = {c.label: c for c in enumerate_sectors(model)}
        assert comps["r_origin"].normal_angle_turns == Fraction(3, 4)
        assert comps["r3_origin"].normal_angle_turns == Fraction(1, 4)
        assert comps["r2_edge"].normal_angle_turns == Fraction(1, 2)

    def test_sphere_components(self):
        model = sphere_model(3, 7, "s2")
        comps = [c for c in enumerate_sectors(model) if c.label == "r1"]
        assert {c.component_tag for c in comps} == {"north", "south"}
        south = [c for c in comps if c.component_tag == "south"][0]
        assert south.geometry.twist_turns == Fraction(1, 3)  # 7/3 mod 1

    def test_reflection_group_rejected(self):
        refl = AffineIsometry.of(((1, 0), (0, -1)), (0, 0))
        t1 = AffineIsometry.of(((1, 0), (0, 1)), (1, 0))
        t2 = AffineIsometry.of(((1, 0), (0, 1)), (0, 1))
        group = CrystGroup([[1, 0], [0, 1]], [refl, t1, t2])
        with pytest.raises(StructuralError):
            QuotientModel(EuclideanPlane(), group, BundleSpec("dolbeault", 0))


class TestFiberEigendata:
    def test_dolbeault_rule(self):
        data = fiber_eigendata(Fraction(1, 4), BundleSpec("dolbeault", 0))
        assert data.plus_turns == (Fraction(0),)
        assert data.minus_turns == (Fraction(3, 4),)  # -theta mod 1

    def test_identity_all_zero(self):
        data = fiber_eigendata(Fraction(0), BundleSpec("dolbeault", 0))
        assert data.plus_turns == (Fraction(0),) and data.minus_turns == (Fraction(0),)

    def test_half_turn_eigenvalue(self):
        data = fiber_eigendata(Fraction(1, 2), BundleSpec("dolbeault", 0))
        assert data.minus_turns == (Fraction(1, 2),)  # e^{-i pi} = -1

    def test_explicit_weights_override(self):
        weights = {Fraction(1, 4): ((Fraction(0),), (Fraction(1, 8),))}
        bundle = BundleSpec("dolbeault", 0, fiber_weights=weights)
        data = fiber_eigendata(Fraction(1, 4), bundle)
        assert data.minus_turns == (Fraction(1, 8),)


class TestCutoffs:
    def test_finite_group_constant(self):
        model = square_torus_rotation_model(4, "e_z4")
        c = build_cutoff(model)
        assert c((Fraction(1, 3), Fraction(0))) == Fraction(1, 4)

    def test_indicator_partition_exact(self):
        model = make_p4_model()
        c = build_cutoff(model, "indicator")
        rng = random.Random(0)
        for _ in range(60):
            x = (Fraction(rng.randint(-300, 300), 101),
                 Fraction(rng.randint(-300, 300), 103))
            assert c.partition_residual(x) == 0.0

    def test_smooth_partition_residual(self):
        model = make_p4_model()
        c = build_cutoff(model, "smooth")
        rng = random.Random(1)
        worst = 0.0
        for _ in range(60):
            x = (rng.uniform(-3, 3), rng.uniform(-3, 3))
            worst = max(worst, c.partition_residual(x))
        assert worst < 1e-12

    def test_smooth_partition_residual_batch(self):
        import numpy as np
        from orbindex.heat import partition_residuals_batch

        model = make_p4_model()
        rng = np.random.default_rng(5)
        xs = rng.uniform(-3, 3, size=2000)
        ys = rng.uniform(-3, 3, size=2000)
        res = partition_residuals_batch(build_cutoff(model, "smooth"), xs, ys)
        assert float(res.max()) < 1e-12
        res = partition_residuals_batch(build_cutoff(model, "indicator"), xs, ys)
        assert float(res.max()) == 0.0

    def test_fixed_set_cutoff_weights(self):
        model = make_p4_model()
        classes = {c.label: c for c in cryst_fixed_classes(model.group)}
        cutoff = build_cutoff(model, "indicator")
        fsc = fixed_set_cutoff(cutoff, classes["r_origin"], model)
        assert fsc.kind == "discrete"
        assert fsc.orbit_weights == [((Fraction(0), Fraction(0)), Fraction(1, 4))]
        fsc = fixed_set_cutoff(cutoff, classes["r2_edge"], model)
        assert fsc.orbit_weights[0][1] == Fraction(1, 2)

    def test_identity_class_returns_cutoff_itself(self):
        model = make_p4_model()
        classes = {c.label: c for c in cryst_fixed_classes(model.group)}
        cutoff = build_cutoff(model, "indicator")
        fsc = fixed_set_cutoff(cutoff, classes["e"], model)
        assert fsc.kind == "full" and fsc.cutoff is cutoff

    def test_empty_fixed_set_domain_error(self):
        model = make_p4_model()
        cutoff = build_cutoff(model, "indicator")
        tcls = translation_class(model.group, (Fraction(1), Fraction(0)))
        with pytest.raises(DomainError):
            fixed_set_cutoff(cutoff, tcls, model)

    def test_direct_section_sum_matches_weight(self):
        # sum over K of c(k^{-1} y) at a centralizer-fixed point equals the
        # group-theoretic weight, for both cut-off kinds
        model = make_p4_model()
        classes = {c.label: c for c in cryst_fixed_classes(model.group)}
        for kind, tol in (("indicator", 0.0), ("smooth", 1e-12)):
            cutoff = build_cutoff(model, kind)
            val = cutoff_on_fixed_set_direct(cutoff, classes["r_origin"],
                                             (Fraction(0), Fraction(0)))
            assert abs(float(val) - 0.25) <= tol
            val = cutoff_on_fixed_set_direct(cutoff, classes["r2_edge"],
                                             (Fraction(0), Fraction(1, 2)))
            assert abs(float(val) - 0.5) <= tol

    def test_zg_partition_property_exact(self):
        # sum over Z_G(g) of c^{(g)}(l y) = 1 on the fixed set
        from orbindex.groups import centralizer

        model = make_p4_model()
        classes = {c.label: c for c in cryst_fixed_classes(model.group)}
        cutoff = build_cutoff(model, "indicator")
        for label, point in (("r_origin", (Fraction(0), Fraction(0))),
                             ("r2_edge", (Fraction(0), Fraction(1, 2)))):
            cls = classes[label]
            z = centralizer(cls.representative, model.group)
            total = Fraction(0)
            for l in z.elements():
                y = l.apply(point)
                total += cutoff_on_fixed_set_direct(cutoff, cls, y)
            assert total == 1


def test_induced_torus_model_matches_point_group():
    model = make_p4_model()
    torus = induced_torus_model(model)
    assert torus.group.table.order == 4
    comps = enumerate_sectors(torus)
    assert {c.label for c in comps} == {"e", "r1", "r2", "r3"}
