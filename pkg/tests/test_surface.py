from __future__ import annotations

import json
import random
from collections import deque

import pytest
from hypothesis import given
from hypothesis import strategies as st

from frieze.cc import all_triangulations
from frieze.errors import BoundaryEdgeNotFlippable, UnsupportedTopology
from frieze.surface import (
    ArcKind,
    MarkedSurface,
    Triangulation,
    base_triangulation,
    cut,
    glue,
    make_surface,
    random_flip_word,
)


def chord_set(tri):
    out = set()
    for e in tri.interior:
        (_, i), (_, j) = tri.endpoints(e)
        out.add((min(i, j), max(i, j)))
    return frozenset(out)


def flip_graph(tri):
    seen = {tri.canonical_key(): tri}
    queue = deque([tri])
    while queue:
        t = queue.popleft()
        for e in t.interior:
            u = t.flip(e)
            k = u.canonical_key()
            if k not in seen:
                seen[k] = u
                queue.append(u)
    return list(seen.values())


def test_make_surface_examples():
    assert make_surface([6]).name == "disk"
    assert make_surface([2, 1]).name == "annulus"
    with pytest.raises(UnsupportedTopology):
        make_surface([1, 1, 1, 1])
    with pytest.raises(UnsupportedTopology):
        make_surface([3], genus=1)
    with pytest.raises(UnsupportedTopology):
        make_surface([2])
    with pytest.raises(UnsupportedTopology):
        make_surface([0, 1])


def test_parse_surface():
    assert MarkedSurface.parse("pants:2,1,1").boundaries == (2, 1, 1)
    assert MarkedSurface.parse("4,3").boundaries == (4, 3)
    with pytest.raises(UnsupportedTopology):
        MarkedSurface.parse("disk:2,2")


@pytest.mark.parametrize(
    "bounds", [(m,) for m in range(3, 9)] + [(p, q) for p in range(1, 5) for q in range(1, 5)]
    + [(1, 1, 1), (2, 1, 1), (2, 2, 1), (3, 2, 2), (2, 2, 2)],
)
def test_counts_table(bounds):
    s = make_surface(bounds)
    t = base_triangulation(s)
    b, m = len(bounds), sum(bounds)
    assert len(t.verts) == 2 * b + m - 4
    assert len(t.interior) == 3 * b + m - 6
    assert len(t.boundary) == m
    # Euler characteristic of the sphere with b holes
    assert m - (len(t.interior) + m) + len(t.verts) == 2 - b


def test_base_examples():
    fan = base_triangulation(make_surface([6]))
    assert chord_set(fan) == {(0, 2), (0, 3), (0, 4)}
    a11 = base_triangulation(make_surface([1, 1]))
    assert len(a11.interior) == 2 and len(a11.verts) == 2
    for e in a11.interior:
        assert set(a11.endpoints(e)) == {(0, 0), (1, 0)}
    pants = base_triangulation(make_surface([1, 1, 1]))
    assert len(pants.interior) == 6 and len(pants.verts) == 5
    assert sum(pants.corners_at(v) for v in pants.surface.vertices()) == 15


def test_corners_examples():
    fan = base_triangulation(make_surface([6]))
    assert fan.corners_at((0, 0)) == 4
    a11 = base_triangulation(make_surface([1, 1]))
    assert [a11.corners_at(v) for v in a11.surface.vertices()] == [3, 3]


def test_square_flip():
    t = base_triangulation(make_surface([4]))
    (e,) = t.interior
    assert chord_set(t) == {(0, 2)}
    u, quad = t.flip_with_quad(e)
    assert chord_set(u) == {(1, 3)}
    assert set(quad.sides) == set(t.boundary)
    assert t.canonical_key() != u.canonical_key()


def test_annulus_flip_repeats_side():
    t = base_triangulation(make_surface([1, 1]))
    e0, e1 = t.interior
    quad = t.quadrilateral(e0)
    a, b, c, d = quad.sides
    assert b == d == e1
    assert {a, c} == set(t.boundary)


def test_boundary_not_flippable():
    t = base_triangulation(make_surface([5]))
    with pytest.raises(BoundaryEdgeNotFlippable):
        t.flip(next(iter(t.boundary)))


def test_twist_distinguished_by_values_not_key():
    t = base_triangulation(make_surface([1, 1]))
    e0, e1 = t.interior
    twisted = t.flip(e0).flip(e1)
    assert twisted.canonical_key() == t.canonical_key()


@pytest.mark.parametrize("n", range(4, 9))
def test_disk_flip_graph_matches_polygon_enumeration(n):
    states = flip_graph(base_triangulation(make_surface([n])))
    ours = {chord_set(t) for t in states}
    assert len(states) == len(ours)
    assert ours == {t.chords for t in all_triangulations(n)}


def test_disk_chords_are_peripheral():
    for t in flip_graph(base_triangulation(make_surface([6]))):
        assert all(t.classify(e) is ArcKind.PERIPHERAL_POLYGON for e in t.interior)
        assert all(t.classify(e) is ArcKind.BOUNDARY for e in t.boundary)


def test_same_circle_arcs_on_annulus_are_polygonal():
    # an arc with both ends on one circle of an annulus always cuts off a disk
    t = base_triangulation(make_surface([2, 2]))
    rng = random.Random(3)
    seen = set()
    for _ in range(200):
        t = t.flip(rng.choice(t.interior))
        for e in t.interior:
            a, b = t.endpoints(e)
            if a[0] != b[0]:
                assert t.classify(e) is ArcKind.BRIDGING
            else:
                seen.add(t.classify(e))
    assert seen == {ArcKind.PERIPHERAL_POLYGON}


def test_all_kinds_occur_on_pants():
    t = base_triangulation(make_surface([2, 1, 1]))
    rng = random.Random(5)
    kinds = set()
    for _ in range(300):
        t = t.flip(rng.choice(t.interior))
        kinds.update(t.classify(e) for e in t.inc)
    assert kinds == set(ArcKind)


surface_spec = st.sampled_from(
    [(4,), (6,), (7,), (1, 1), (2, 1), (3, 2), (2, 2), (1, 1, 1), (2, 1, 1), (2, 2, 1), (3, 1, 2)]
)


def _walk(t, seed, length):
    rng = random.Random(seed)
    for _ in range(length):
        if not t.interior:
            break
        t = t.flip(rng.choice(t.interior))
    return t


@given(surface_spec, st.integers(0, 2**32), st.integers(0, 25))
def test_flip_involution_and_invariants(bounds, seed, length):
    t = _walk(base_triangulation(make_surface(bounds)), seed, length)
    t.validate()
    b, m = len(bounds), sum(bounds)
    assert len(t.verts) == 2 * b + m - 4
    assert sum(t.corners_at(v) for v in t.surface.vertices()) == 3 * len(t.verts)
    for e in t.interior:
        u = t.flip(e)
        assert u.interior == t.interior
        back = u.flip(e)
        assert back.canonical_key() == t.canonical_key()
        assert back.flip(e).canonical_key() == u.canonical_key()


@given(surface_spec, st.integers(0, 2**32), st.integers(0, 25))
def test_classification_agrees_with_cut_pieces(bounds, seed, length):
    t = _walk(base_triangulation(make_surface(bounds)), seed, length)
    for e in t.interior:
        kind = t.classify(e)
        a, b = t.endpoints(e)
        if a[0] != b[0]:
            assert kind is ArcKind.BRIDGING
        pieces = cut(t, [e])
        holes = sorted(p.triangulation.surface.b for p in pieces)
        if len(pieces) == 1:
            assert kind is ArcKind.BRIDGING
        elif holes[0] == 1:
            assert kind is ArcKind.PERIPHERAL_POLYGON
        else:
            assert kind is ArcKind.PERIPHERAL_ANNULAR
        # cutting and regluing is the identity
        assert glue(t.surface, pieces, len(t.verts)) == t


@given(surface_spec, st.integers(0, 2**32), st.integers(0, 25))
def test_json_round_trip_and_relabel_invariance(bounds, seed, length):
    t = _walk(base_triangulation(make_surface(bounds)), seed, length)
    data = json.loads(json.dumps(t.to_json()))
    back = Triangulation.from_json(data)
    assert back == t
    # rotate every triangle and reverse the triangle order: same labeled map
    perm = list(reversed(range(len(t.verts))))
    verts = [t.verts[i][1:] + t.verts[i][:1] for i in perm]
    sides = [t.sides[i][1:] + t.sides[i][:1] for i in perm]
    relabeled = Triangulation(t.surface, verts, sides)
    assert relabeled.canonical_key() == t.canonical_key()


def test_from_json_rejects_broken_twin():
    data = base_triangulation(make_surface([5])).to_json()
    h = data["twin"].index(next(x for x in data["twin"] if x >= 0))
    data["twin"][h] = h
    with pytest.raises(ValueError):
        Triangulation.from_json(data)


def test_random_flip_word_avoids_immediate_repeat():
    t = base_triangulation(make_surface([2, 1, 1]))
    word = random_flip_word(t, 50, random.Random(0))
    assert len(word) == 50 and all(a != b for a, b in zip(word, word[1:]))
    assert random_flip_word(base_triangulation(make_surface([3])), 5, random.Random(0)) == []
