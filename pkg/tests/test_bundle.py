import math

import pytest
from hypothesis import given, strategies as st

from disconn import (
    CircleElement,
    FiberPair,
    HopfBundle,
    NotSameFiber,
    Quaternion,
    SectionUndefined,
    UnitQuaternion,
)
from disconn.rng import SplitMix64, substream

from conftest import HALF_J, I_BASE, I_POINT, J_POINT, K_BASE, ONE


class TestHopfProjection:
    def test_identity_projects_to_i(self, hopf):
        assert hopf.base_distance(hopf.project(ONE), I_BASE) < 1e-15

    def test_half_j_projects_to_k(self, hopf):
        # oracle: expanding (1 - j) i (1 + j) / 2 by the multiplication
        # table gives (i + k + k - i) / 2 = k
        assert hopf.base_distance(hopf.project(HALF_J), K_BASE) < 1e-15

    def test_projection_lands_on_base_sphere(self, hopf):
        rng = SplitMix64(11)
        for _ in range(200):
            r = hopf.project(hopf.sample_point(rng))
            assert abs(r.norm() - 1.0) <= 1e-9
            assert abs(r.w) <= 1e-9


class TestHopfAction:
    def test_quarter_turn_on_identity(self, hopf):
        moved = hopf.act(CircleElement(math.pi / 2.0), ONE)
        assert hopf.distance(moved, I_POINT) < 1e-15

    def test_identity_action(self, hopf):
        rng = SplitMix64(3)
        q = hopf.sample_point(rng)
        assert hopf.distance(hopf.act(CircleElement(0.0), q), q) == 0.0

    @given(st.floats(-10.0, 10.0), st.floats(-10.0, 10.0), st.integers(0, 2 ** 32))
    def test_action_is_a_group_action(self, a, b, seed):
        hopf = HopfBundle()
        q = hopf.sample_point(SplitMix64(seed))
        ga, gb = CircleElement(a), CircleElement(b)
        lhs = hopf.act(ga * gb, q)
        rhs = hopf.act(ga, hopf.act(gb, q))
        assert hopf.distance(lhs, rhs) <= 1e-12


class TestFiberStructure:
    def test_fiber_preservation_bulk(self, hopf):
        for i in range(10_000):
            rng = substream(101, i)
            q = hopf.sample_point(rng)
            g = hopf.sample_group(rng)
            d = hopf.base_distance(hopf.project(hopf.act(g, q)), hopf.project(q))
            assert d <= 1e-9

    def test_translation_recovers_group_element(self, hopf):
        for i in range(2_000):
            rng = substream(102, i)
            q = hopf.sample_point(rng)
            g = hopf.sample_group(rng)
            k = hopf.fiber_translation(q, hopf.act(g, q))
            assert hopf.group_distance(k, g) <= 1e-9

    def test_identity_translation(self, hopf):
        assert hopf.fiber_translation(ONE, ONE).angle == 0.0

    def test_hopf_vertical_pair(self, hopf):
        g = hopf.fiber_translation(ONE, I_POINT)
        assert abs(g.angle - math.pi / 2.0) < 1e-15

    def test_not_same_fiber(self, hopf):
        with pytest.raises(NotSameFiber):
            hopf.fiber_translation(ONE, J_POINT)
        with pytest.raises(NotSameFiber):
            FiberPair(hopf, ONE, J_POINT)

    def test_fiber_pair_accepts_fiber_mates(self, hopf):
        FiberPair(hopf, ONE, I_POINT)


class TestHopfSection:
    def test_section_at_i(self, hopf):
        s = hopf.local_section(I_BASE)
        assert hopf.distance(s, UnitQuaternion(-1.0, 0.0, 0.0, 0.0)) < 1e-15
        assert hopf.base_distance(hopf.project(s), I_BASE) < 1e-15

    def test_section_at_k(self, hopf):
        s = hopf.local_section(K_BASE)
        expected = UnitQuaternion(-1.0 / math.sqrt(2.0), 0.0, -1.0 / math.sqrt(2.0), 0.0)
        assert hopf.distance(s, expected) < 1e-15
        assert hopf.base_distance(hopf.project(s), K_BASE) < 1e-15

    def test_section_undefined_at_antipode(self, hopf):
        with pytest.raises(SectionUndefined):
            hopf.local_section(Quaternion(0.0, -1.0, 0.0, 0.0))
        near = Quaternion(0.0, -1.0, 1e-8, 0.0).normalized()
        with pytest.raises(SectionUndefined):
            hopf.local_section(near)

    def test_section_property_bulk(self, hopf):
        kept = 0
        for i in range(5_000):
            rng = substream(103, i)
            r = hopf.project(hopf.sample_point(rng))
            if not hopf.section_defined(r):
                continue
            kept += 1
            assert hopf.base_distance(hopf.project(hopf.local_section(r)), r) <= 1e-9
        assert kept > 4_990

    def test_projection_invariance_restated(self, hopf):
        # project(act(g, q)) equals project(q) componentwise
        for i in range(2_000):
            rng = substream(104, i)
            q = hopf.sample_point(rng)
            g = hopf.sample_group(rng)
            a = hopf.project(hopf.act(g, q))
            b = hopf.project(q)
            for u, v in zip(a.components(), b.components()):
                assert abs(u - v) <= 1e-9


class TestTrivialBundle:
    def test_projection(self, line_bundle):
        p = line_bundle.point(0.7, CircleElement(0.2))
        assert line_bundle.project(p) == (0.7,)

    def test_action_adds_angles(self, line_bundle):
        p = line_bundle.point(1.0, CircleElement(0.1))
        moved = line_bundle.act(CircleElement(0.4), p)
        assert moved.r == (1.0,)
        assert abs(moved.g.angle - 0.5) < 1e-15

    def test_translation(self, line_bundle):
        a = line_bundle.point(2.0, CircleElement(0.1))
        b = line_bundle.point(2.0, CircleElement(0.7))
        assert abs(line_bundle.fiber_translation(a, b).angle - 0.6) < 1e-15

    def test_translation_rejects_other_fiber(self, line_bundle):
        a = line_bundle.point(0.0)
        b = line_bundle.point(1.0)
        with pytest.raises(NotSameFiber):
            line_bundle.fiber_translation(a, b)

    def test_section(self, line_bundle):
        s = line_bundle.local_section((0.3,))
        assert s.r == (0.3,) and s.g.angle == 0.0
        assert line_bundle.section_defined((0.3,))

    def test_point_validates_dimension(self, plane_bundle):
        with pytest.raises(ValueError):
            plane_bundle.point((1.0,))

    def test_embed_difference_unwraps_angle(self, line_bundle):
        a = line_bundle.point(0.0, CircleElement(math.pi - 0.05))
        b = line_bundle.point(0.0, CircleElement(-math.pi + 0.05))
        d = line_bundle.embed_difference(b, a)
        assert abs(d[-1] - 0.1) < 1e-12

    def test_fiber_preservation_bulk(self, plane_bundle):
        for i in range(5_000):
            rng = substream(105, i)
            q = plane_bundle.sample_point(rng)
            g = plane_bundle.sample_group(rng)
            assert plane_bundle.base_distance(
                plane_bundle.project(plane_bundle.act(g, q)),
                plane_bundle.project(q)) == 0.0
