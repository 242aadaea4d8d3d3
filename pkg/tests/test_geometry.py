import numpy as np
import pytest
from hypothesis import given, strategies as st

from seamorph.types import BoundingBox, intersect_area, iou

from .oracles import intersect_area_oracle, iou_oracle


def box(x, y, w, h):
    return BoundingBox(x, y, w, h, "boat")


boxes_64 = st.builds(
    box,
    st.integers(0, 54),
    st.integers(0, 54),
    st.integers(1, 10),
    st.integers(1, 10),
)


class TestIntersectArea:
    def test_identical(self):
        a = box(0, 0, 10, 10)
        assert intersect_area(a, a) == 100

    def test_disjoint(self):
        assert intersect_area(box(0, 0, 10, 10), box(20, 20, 5, 5)) == 0

    def test_half_overlap(self):
        # frozen from the pixel-set oracle: 50 shared pixels
        a, b = box(0, 0, 10, 10), box(5, 0, 10, 10)
        assert intersect_area_oracle(a, b) == 50
        assert intersect_area(a, b) == 50

    @given(boxes_64, boxes_64)
    def test_symmetric(self, a, b):
        assert intersect_area(a, b) == intersect_area(b, a)

    def test_matches_pixel_enumeration_on_random_pairs(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            x1, y1, x2, y2 = rng.integers(0, 56, size=4)
            w1, h1, w2, h2 = rng.integers(1, 9, size=4)
            a, b = box(int(x1), int(y1), int(w1), int(h1)), box(int(x2), int(y2), int(w2), int(h2))
            assert intersect_area(a, b) == intersect_area_oracle(a, b)


class TestIou:
    def test_identical_is_one(self):
        a = box(3, 4, 7, 9)
        assert iou(a, a) == 1.0

    def test_disjoint_is_zero(self):
        assert iou(box(0, 0, 10, 10), box(20, 20, 5, 5)) == 0.0

    def test_half_overlap_is_one_third(self):
        # oracle: 50 shared / 150 union
        a, b = box(0, 0, 10, 10), box(5, 0, 10, 10)
        assert iou_oracle(a, b) == pytest.approx(1 / 3, abs=1e-12)
        assert iou(a, b) == pytest.approx(1 / 3, abs=1e-12)

    @given(boxes_64, boxes_64)
    def test_symmetric(self, a, b):
        assert iou(a, b) == iou(b, a)

    @given(st.integers(0, 40), st.integers(0, 40), st.integers(2, 12), st.integers(2, 12),
           st.data())
    def test_containment(self, x, y, w, h, data):
        outer = box(x, y, w, h)
        iw = data.draw(st.integers(1, w))
        ih = data.draw(st.integers(1, h))
        ix = data.draw(st.integers(x, x + w - iw))
        iy = data.draw(st.integers(y, y + h - ih))
        inner = box(ix, iy, iw, ih)
        assert iou(outer, inner) == pytest.approx(inner.area / outer.area)

    @given(boxes_64, boxes_64)
    def test_range(self, a, b):
        assert 0.0 <= iou(a, b) <= 1.0


class TestBoundingBox:
    def test_rejects_degenerate_dims(self):
        with pytest.raises(ValueError):
            BoundingBox(0, 0, 0, 5)
        with pytest.raises(ValueError):
            BoundingBox(0, 0, 5, -1)

    def test_in_image(self):
        assert box(0, 0, 10, 10).in_image(10, 10)
        assert not box(1, 0, 10, 10).in_image(10, 10)
        assert not box(-1, 0, 5, 5).in_image(10, 10)

    def test_clamped(self):
        clamped = box(8, 8, 5, 5).clamped(10, 10)
        assert (clamped.x, clamped.y, clamped.w, clamped.h) == (8, 8, 2, 2)
