import pytest
from hypothesis import given, strategies as st

from perclab.lattice import (
    ORIGIN,
    LatticeVariant,
    UnsupportedVariantError,
    Vertex,
    arc_recursive,
    arc_t,
    arc_z2,
    ball,
    ball_bfs,
    ball_coords,
    neighbors,
    norm,
    up_neighbors,
)

V = Vertex
coords = st.integers(min_value=-10**6, max_value=10**6)
variants = st.sampled_from(list(LatticeVariant))


@pytest.mark.parametrize("v, expected", [(V(0, 0), 0), (V(2, 2), 4), (V(-3, 1), 4)])
def test_norm(v, expected):
    assert norm(v) == expected


@given(coords, coords)
def test_norm_zero_only_at_origin(a1, a2):
    v = V(a1, a2)
    assert norm(v) >= 0
    assert (norm(v) == 0) == (v == ORIGIN)


def test_up_neighbors():
    assert up_neighbors(V(0, 0), LatticeVariant.Z2) == [V(1, 0), V(0, 1)]
    assert up_neighbors(V(0, 0), LatticeVariant.TRI_UP) == [V(1, 0), V(0, 1), V(1, 1)]
    assert up_neighbors(V(2, 1), LatticeVariant.TRI_UP) == [V(3, 1), V(2, 2), V(3, 2)]


def test_up_neighbors_rejects_tri_right():
    with pytest.raises(UnsupportedVariantError):
        up_neighbors(ORIGIN, LatticeVariant.TRI_RIGHT)


def test_neighbors():
    assert set(neighbors(ORIGIN, LatticeVariant.Z2)) == {V(1, 0), V(-1, 0), V(0, 1), V(0, -1)}
    tri_up = neighbors(ORIGIN, LatticeVariant.TRI_UP)
    assert len(tri_up) == 6 and V(1, 1) in tri_up and V(-1, -1) in tri_up
    tri_right = neighbors(ORIGIN, LatticeVariant.TRI_RIGHT)
    assert len(tri_right) == 6 and V(1, -1) in tri_right and V(-1, 1) in tri_right
    assert [v.degree for v in LatticeVariant] == [4, 6, 6]


@given(coords, coords, variants)
def test_neighbors_symmetric(a1, a2, variant):
    v = V(a1, a2)
    for u in neighbors(v, variant):
        assert v in neighbors(u, variant)


@given(st.integers(0, 1000), st.integers(0, 1000))
def test_up_step_increments_norm_in_positive_cone(a1, a2):
    v = V(a1, a2)
    for u in up_neighbors(v, LatticeVariant.Z2):
        assert norm(u) == norm(v) + 1


def test_arc_z2_examples():
    assert list(arc_z2(1)) == [V(1, 0), V(0, 1)]
    a4 = arc_z2(4, "+")
    assert list(a4) == [V(4, 0), V(3, 1), V(2, 2), V(1, 3), V(0, 4)]
    assert list(arc_z2(2, "-")) == [V(-2, 0), V(-1, -1), V(0, -2)]


@pytest.mark.parametrize("k", range(1, 101))
def test_arc_z2_structure(k):
    pos, neg = arc_z2(k, +1), arc_z2(k, -1)
    assert len(pos) == k + 1
    assert all(v.a1 >= 0 and v.a2 >= 0 and norm(v) == k for v in pos)
    assert set(pos).isdisjoint(neg)
    assert list(neg) == [-v for v in pos]
    assert frozenset(pos) == arc_recursive(k)


def test_arc_z2_rejects_bad_input():
    with pytest.raises(ValueError):
        arc_z2(0)
    with pytest.raises(ValueError):
        arc_z2(2, "x")


def test_arc_t_small():
    assert arc_t(1) == {V(1, 0), V(0, 1), V(1, 1)}
    # recursion oracle: 6 distinct endpoints after two steps
    assert len(arc_recursive(2, LatticeVariant.TRI_UP)) == 6
    assert arc_t(2) == arc_recursive(2, LatticeVariant.TRI_UP)


@pytest.mark.parametrize("k", range(1, 21))
def test_arc_t_closed_form_matches_recursion(k):
    assert arc_t(k) == arc_recursive(k, LatticeVariant.TRI_UP)


def test_ball_examples():
    assert ball(0, LatticeVariant.Z2) == {ORIGIN}
    assert len(ball(1, LatticeVariant.TRI_UP)) == 7
    assert len(ball(2, LatticeVariant.Z2)) == len(ball_bfs(2, LatticeVariant.Z2)) == 13


@pytest.mark.parametrize("variant", list(LatticeVariant))
@pytest.mark.parametrize("k", [0, 1, 2, 5, 9])
def test_ball_matches_bfs(variant, k):
    assert ball(k, variant) == set(ball_bfs(k, variant))


@pytest.mark.parametrize("variant", list(LatticeVariant))
def test_ball_order_is_nested_prefix(variant):
    small, big = ball_coords(6, variant), ball_coords(7, variant)
    assert (big[: len(small)] == small).all()
    assert tuple(small[0]) == (0, 0)


def test_ball_large_radius_no_overflow():
    c = ball_coords(2000, LatticeVariant.Z2)
    assert len(c) == 2 * 2000 * 2001 + 1
    assert c.dtype.itemsize == 8


def test_vertex_serialisation_round_trip():
    v = V(-3, 12)
    assert str(v) == "-3,12"
    assert V.parse(str(v)) == v


def test_variant_parse():
    assert LatticeVariant.parse("TriUp") is LatticeVariant.TRI_UP
    assert LatticeVariant.parse("tri_right") is LatticeVariant.TRI_RIGHT
    with pytest.raises(ValueError):
        LatticeVariant.parse("hex")
