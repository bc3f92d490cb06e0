"""Triangulated genus-0 marked surfaces with one to three boundary circles.

Marked points are labeled ``(circle, index)``; on every circle the indices
increase along the boundary orientation (surface on the left).  A
triangulation is a list of counterclockwise triangles.  Side ``s`` of triangle
``t`` runs from ``verts[t][s]`` to ``verts[t][s + 1]`` and carries an edge id;
the half-edge of that side is ``3 * t + s``.  Interior edges have two sides,
boundary segments one.

Edge ids are stable labels: flipping edge ``e`` keeps the id ``e`` on the new
diagonal and leaves every other id where it was, exactly like mutation of a
labeled seed.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BoundaryEdgeNotFlippable, UnsupportedTopology

Vertex = tuple[int, int]


@dataclass(frozen=True)
class MarkedSurface:
    boundaries: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(m) for m in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        if not 1 <= len(b) <= 3:
            raise UnsupportedTopology(
                f"{len(b)} boundary circles; only disks, annuli and pairs of pants are supported"
            )
        if any(m < 1 for m in b):
            raise UnsupportedTopology("every boundary circle needs at least one marked point")
        if len(b) == 1 and b[0] < 3:
            raise UnsupportedTopology("a disk needs at least 3 marked points")

    @property
    def b(self) -> int:
        return len(self.boundaries)

    @property
    def m(self) -> int:
        return sum(self.boundaries)

    @property
    def n_triangles(self) -> int:
        return 2 * self.b + self.m - 4

    @property
    def n_interior(self) -> int:
        return 3 * self.b + self.m - 6

    @property
    def name(self) -> str:
        return {1: "disk", 2: "annulus", 3: "pants"}[self.b]

    def vertices(self) -> list[Vertex]:
        return [(c, i) for c, m in enumerate(self.boundaries) for i in range(m)]

    def next_point(self, v: Vertex) -> Vertex:
        c, i = v
        return (c, (i + 1) % self.boundaries[c])

    def __str__(self) -> str:
        return f"{self.name}:{','.join(map(str, self.boundaries))}"

    @classmethod
    def parse(cls, text: str) -> "MarkedSurface":
        """Parse ``"pants:2,1,1"``, ``"annulus:4,3"``, ``"disk:6"`` or a bare ``"2,1,1"``."""
        kind, _, counts = text.partition(":")
        if not counts:
            kind, counts = "", kind
        try:
            b = tuple(int(x) for x in counts.split(",") if x.strip())
        except ValueError as exc:
            raise UnsupportedTopology(f"cannot parse surface {text!r}") from exc
        surf = cls(b)
        if kind and kind not in ("disk", "annulus", "pants"):
            raise UnsupportedTopology(f"unknown surface kind {kind!r}")
        if kind and kind != surf.name:
            need = {"disk": 1, "annulus": 2, "pants": 3}[kind]
            raise UnsupportedTopology(f"{text!r}: a {kind} needs {need} boundary circles")
        return surf


def make_surface(boundaries: Sequence[int], genus: int = 0) -> MarkedSurface:
    if genus != 0:
        raise UnsupportedTopology("only genus 0 surfaces are supported")
    return MarkedSurface(tuple(boundaries))


class ArcKind(enum.Enum):
    BOUNDARY = "Boundary"
    PERIPHERAL_POLYGON = "PeripheralPolygon"
    PERIPHERAL_ANNULAR = "PeripheralAnnular"
    BRIDGING = "Bridging"


@dataclass(frozen=True)
class Quadrilateral:
    """Sides ``(a, b, c, d)`` around a flipped edge; ``a, c`` and ``b, d`` are opposite.

    Order is counterclockwise starting from the side that leaves the head of
    the edge as seen from its first triangle.  Sides may repeat.
    """

    edge: int
    sides: tuple[int, int, int, int]
    corners: tuple[Vertex, Vertex, Vertex, Vertex]


class Triangulation:
    __slots__ = ("surface", "verts", "sides", "inc", "interior", "boundary", "_key")

    def __init__(
        self,
        surface: MarkedSurface,
        verts: Sequence[Sequence[Vertex]],
        sides: Sequence[Sequence[int]],
        boundary: dict[int, Vertex] | None = None,
        check: bool = True,
    ):
        self.surface = surface
        self.verts = tuple(tuple(tuple(v) for v in tri) for tri in verts)
        self.sides = tuple(tuple(int(e) for e in tri) for tri in sides)
        inc: dict[int, list] = {}
        for t, tri in enumerate(self.sides):
            for s, e in enumerate(tri):
                inc.setdefault(e, []).append((t, s))
        self.inc = {e: tuple(v) for e, v in inc.items()}
        if boundary is None:
            boundary = {e: self.verts[v[0][0]][v[0][1]] for e, v in self.inc.items() if len(v) == 1}
        self.boundary = dict(boundary)
        self.interior = tuple(sorted(e for e in self.inc if e not in self.boundary))
        self._key = None
        if check:
            self.validate()

    @classmethod
    def _raw(cls, surface, verts, sides, inc, interior, boundary) -> "Triangulation":
        t = cls.__new__(cls)
        t.surface = surface
        t.verts = verts
        t.sides = sides
        t.inc = inc
        t.interior = interior
        t.boundary = boundary
        t._key = None
        return t

    # -- validation -----------------------------------------------------------

    def validate(self) -> None:
        surf = self.surface
        if len(self.verts) != surf.n_triangles:
            raise ValueError(f"expected {surf.n_triangles} triangles, got {len(self.verts)}")
        if len(self.interior) != surf.n_interior:
            raise ValueError(f"expected {surf.n_interior} interior edges, got {len(self.interior)}")
        labels = set(surf.vertices())
        for tri in self.verts:
            for v in tri:
                if v not in labels:
                    raise ValueError(f"unknown marked point {v}")
        segs = {}
        for e, start in self.boundary.items():
            occ = self.inc.get(e, ())
            if len(occ) != 1:
                raise ValueError(f"boundary edge {e} must lie in exactly one triangle")
            t, s = occ[0]
            a, b = self.verts[t][s], self.verts[t][(s + 1) % 3]
            if a != start or b != surf.next_point(a):
                raise ValueError(f"boundary edge {e} runs {a}->{b}, not along the boundary")
            if a in segs:
                raise ValueError(f"boundary segment starting at {a} appears twice")
            segs[a] = e
        if set(segs) != labels:
            raise ValueError("every boundary segment must appear exactly once")
        for e in self.interior:
            occ = self.inc[e]
            if len(occ) != 2:
                raise ValueError(f"interior edge {e} must lie in exactly two sides")
            (t1, s1), (t2, s2) = occ
            if t1 == t2:
                raise ValueError(f"edge {e} is folded inside triangle {t1}")
            if (
                self.verts[t1][s1] != self.verts[t2][(s2 + 1) % 3]
                or self.verts[t1][(s1 + 1) % 3] != self.verts[t2][s2]
            ):
                raise ValueError(f"edge {e} is glued with inconsistent endpoints")
        # every vertex link must be one fan from its outgoing to its incoming segment
        corners = sum(3 for _ in self.verts)
        seen = 0
        for v, e in segs.items():
            seen += len(self.fan(v))
        if seen != corners:
            raise ValueError("vertex links are not intervals; not a surface of this type")
        if len(self.components(())) != 1:
            raise ValueError("triangulation is not connected")

    # -- basic queries ---------------------------------------------------------

    @property
    def edges(self) -> list[int]:
        return sorted(self.inc)

    def is_interior(self, e: int) -> bool:
        return e in self.inc and e not in self.boundary

    def endpoints(self, e: int) -> tuple[Vertex, Vertex]:
        t, s = self.inc[e][0]
        return self.verts[t][s], self.verts[t][(s + 1) % 3]

    def twin(self, t: int, s: int) -> tuple[int, int] | None:
        occ = self.inc[self.sides[t][s]]
        if len(occ) == 1:
            return None
        return occ[1] if occ[0] == (t, s) else occ[0]

    def boundary_edge_at(self, v: Vertex) -> int:
        for e, start in self.boundary.items():
            if start == v:
                return e
        raise KeyError(v)

    def fan(self, v: Vertex) -> list[tuple[int, int]]:
        """Corners ``(t, s)`` at ``v`` in rotation order, starting at the segment leaving ``v``."""
        e = self.boundary_edge_at(v)
        t, s = self.inc[e][0]
        out = []
        while True:
            out.append((t, s))
            if len(out) > 3 * len(self.verts):
                raise ValueError(f"fan at {v} does not close")
            prev = (s + 2) % 3  # side of t arriving at v
            tw = self.twin(t, prev)
            if tw is None:
                return out
            t, s = tw[0], tw[1]

    def corners_at(self, v: Vertex) -> int:
        return sum(1 for tri in self.verts for x in tri if x == v)

    def edges_at(self, v: Vertex) -> list[int]:
        """Interior edges with an endpoint at ``v``, sorted by id."""
        out = set()
        for e in self.interior:
            a, b = self.endpoints(e)
            if a == v or b == v:
                out.add(e)
        return sorted(out)

    def quadrilateral(self, e: int) -> Quadrilateral:
        if e not in self.inc:
            raise KeyError(e)
        if e in self.boundary:
            raise BoundaryEdgeNotFlippable(f"edge {e} is a boundary segment")
        (t1, s1), (t2, s2) = self.inc[e]
        v1, v2 = self.verts[t1], self.verts[t2]
        S1, S2 = self.sides[t1], self.sides[t2]
        a, b, c = v1[s1], v1[(s1 + 1) % 3], v1[(s1 + 2) % 3]
        d = v2[(s2 + 2) % 3]
        x1, x2 = S1[(s1 + 1) % 3], S1[(s1 + 2) % 3]
        x3, x4 = S2[(s2 + 1) % 3], S2[(s2 + 2) % 3]
        return Quadrilateral(e, (x1, x2, x3, x4), (b, c, a, d))

    # -- flips -----------------------------------------------------------------

    def flip(self, e: int) -> "Triangulation":
        if e in self.boundary:
            raise BoundaryEdgeNotFlippable(f"edge {e} is a boundary segment")
        if e not in self.inc:
            raise KeyError(e)
        (t1, s1), (t2, s2) = self.inc[e]
        v1, v2 = self.verts[t1], self.verts[t2]
        S1, S2 = self.sides[t1], self.sides[t2]
        A, C = v1[s1], v1[(s1 + 2) % 3]
        B, D = v2[s2], v2[(s2 + 2) % 3]
        x1, x2 = S1[(s1 + 1) % 3], S1[(s1 + 2) % 3]
        x3, x4 = S2[(s2 + 1) % 3], S2[(s2 + 2) % 3]
        verts = list(self.verts)
        sides = list(self.sides)
        verts[t1], sides[t1] = (D, C, A), (e, x2, x3)
        verts[t2], sides[t2] = (C, D, B), (e, x4, x1)
        inc = dict(self.inc)
        for x in {e, x1, x2, x3, x4}:
            keep = [o for o in self.inc[x] if o[0] != t1 and o[0] != t2]
            for t in (t1, t2):
                tri = sides[t]
                for s in range(3):
                    if tri[s] == x:
                        keep.append((t, s))
            inc[x] = tuple(sorted(keep))
        return Triangulation._raw(
            self.surface, tuple(verts), tuple(sides), inc, self.interior, self.boundary
        )

    def flip_with_quad(self, e: int) -> tuple["Triangulation", Quadrilateral]:
        return self.flip(e), self.quadrilateral(e)

    # -- topology --------------------------------------------------------------

    def components(self, cut: Iterable[int]) -> list[list[int]]:
        """Triangle sets of the pieces left after cutting along the ``cut`` edges."""
        cut = set(cut)
        seen = [False] * len(self.verts)
        comps = []
        for start in range(len(self.verts)):
            if seen[start]:
                continue
            comp, queue = [], [start]
            seen[start] = True
            while queue:
                t = queue.pop()
                comp.append(t)
                for s in range(3):
                    if self.sides[t][s] in cut:
                        continue
                    tw = self.twin(t, s)
                    if tw is not None and not seen[tw[0]]:
                        seen[tw[0]] = True
                        queue.append(tw[0])
            comps.append(sorted(comp))
        return comps

    def classify(self, e: int) -> ArcKind:
        if e in self.boundary:
            return ArcKind.BOUNDARY
        comps = self.components([e])
        if len(comps) == 1:
            return ArcKind.BRIDGING
        a, b = self.endpoints(e)
        circle = a[0]
        full = []
        for comp in comps:
            circles = {
                self.boundary[x][0]
                for t in comp
                for x in self.sides[t]
                if x in self.boundary
            }
            full.append(len(circles - {circle}))
        if 0 in full:
            return ArcKind.PERIPHERAL_POLYGON
        if 1 in full:
            return ArcKind.PERIPHERAL_ANNULAR
        return ArcKind.BRIDGING

    # -- canonical form --------------------------------------------------------

    def canonical_form(self) -> tuple[tuple, tuple[int, ...]]:
        """Relabeling-invariant serialization plus interior edge ids in canonical order.

        Triangles are numbered by a breadth-first walk that starts in the
        triangle holding the boundary segment leaving ``(0, 0)``; marked-point
        labels are kept, so the walk and hence the numbering are forced.
        """
        if self._key is not None:
            return self._key
        boundary = self.boundary
        e0 = self.boundary_edge_at((0, 0))
        t0, s0 = self.inc[e0][0]
        tri_no = {t0: 0}
        edge_no: dict[int, int] = {}
        order: list[int] = []
        queue = deque([(t0, s0)])
        flat: list[int] = []
        verts, sides, inc = self.verts, self.sides, self.inc
        while queue:
            t, s = queue.popleft()
            vt, st = verts[t], sides[t]
            for r in (s, (s + 1) % 3, (s + 2) % 3):
                c, i = vt[r]
                x = st[r]
                if x in boundary:
                    code = 0
                else:
                    code = edge_no.get(x)
                    if code is None:
                        code = edge_no[x] = len(edge_no) + 1
                        order.append(x)
                    occ = inc[x]
                    u, w = occ[1] if occ[0] == (t, r) else occ[0]
                    if u not in tri_no:
                        tri_no[u] = len(tri_no)
                        queue.append((u, w))
                flat.extend((c, i, code))
        self._key = (tuple(flat), tuple(order))
        return self._key

    def canonical_key(self) -> bytes:
        flat, _ = self.canonical_form()
        return b"".join(x.to_bytes(2, "big") for x in flat)

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        n = 3 * len(self.verts)
        twin, nxt, vof, bnd, eof = [-1] * n, [0] * n, [None] * n, [-1] * n, [0] * n
        for t in range(len(self.verts)):
            for s in range(3):
                h = 3 * t + s
                nxt[h] = 3 * t + (s + 1) % 3
                vof[h] = list(self.verts[t][s])
                e = self.sides[t][s]
                eof[h] = e
                tw = self.twin(t, s)
                if tw is None:
                    bnd[h] = self.verts[t][s][0]
                else:
                    twin[h] = 3 * tw[0] + tw[1]
        return {
            "schemaVersion": 1,
            "surface": list(self.surface.boundaries),
            "twin": twin,
            "next": nxt,
            "vertexOf": vof,
            "boundary": bnd,
            "edgeOf": eof,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Triangulation":
        try:
            surface = MarkedSurface(tuple(data["surface"]))
            twin, nxt, vof, bnd, eof = (
                data["twin"], data["next"], data["vertexOf"], data["boundary"], data["edgeOf"]
            )
            n = len(twin)
            if n % 3 or any(len(x) != n for x in (nxt, vof, bnd, eof)):
                raise ValueError("half-edge arrays must have equal length divisible by 3")
            for h in range(n):
                if nxt[h] != 3 * (h // 3) + (h % 3 + 1) % 3:
                    raise ValueError("next must rotate within consecutive triples")
                tw = twin[h]
                if tw == -1:
                    if bnd[h] == -1:
                        raise ValueError(f"half-edge {h} has no twin and is not boundary")
                elif not (0 <= tw < n) or twin[tw] != h or tw == h or eof[tw] != eof[h]:
                    raise ValueError(f"twin is not a fixed-point-free involution at {h}")
            verts = [tuple(tuple(vof[3 * t + s]) for s in range(3)) for t in range(n // 3)]
            sides = [tuple(eof[3 * t : 3 * t + 3]) for t in range(n // 3)]
            boundary = {eof[h]: tuple(vof[h]) for h in range(n) if twin[h] == -1}
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed triangulation file: {exc}") from exc
        return cls(surface, verts, sides, boundary)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Triangulation)
            and self.surface == other.surface
            and self.verts == other.verts
            and self.sides == other.sides
        )

    def __hash__(self) -> int:
        return hash((self.verts, self.sides))

    def __repr__(self) -> str:
        return f"Triangulation({self.surface}, {len(self.interior)} interior edges)"


# -- base triangulations ---------------------------------------------------------


def _build(surface: MarkedSurface, triangles: list) -> Triangulation:
    """Glue triangles given as ``((v0, v1, v2), (k0, k1, k2))``.

    Integer keys are interior edge ids; tuple keys ``("b", circle, i)`` are
    boundary segments, which receive ids after the interior ones.
    """
    n_int = surface.n_interior
    offsets, acc = [], n_int
    for m in surface.boundaries:
        offsets.append(acc)
        acc += m
    verts, sides, boundary = [], [], {}
    for vs, keys in triangles:
        ids = []
        for v, k in zip(vs, keys):
            if isinstance(k, tuple):
                _, c, i = k
                e = offsets[c] + i
                boundary[e] = (c, i)
                ids.append(e)
            else:
                ids.append(k)
        verts.append(vs)
        sides.append(ids)
    return Triangulation(surface, verts, sides, boundary)


def _staircase(bottom: Sequence[Vertex], top_circle: int, q: int, seg_key, first_id: int = 0):
    """Triangles of the annulus staircase that takes every bottom step first.

    ``bottom`` lists the outer points in boundary order (length ``p``); the
    top points in strip order are ``(top_circle, -s mod q)``.  Returns the
    triangles and the number of arcs used.
    """
    p = len(bottom)
    n = p + q
    top = lambda s: (top_circle, (-s) % q)
    arc = lambda k: first_id + (k % n)
    tris = []
    for k in range(p):
        tris.append(((bottom[k], bottom[(k + 1) % p], top(0)), (seg_key(k), arc(k + 1), arc(k))))
    for k in range(q):
        s = k
        tris.append(
            (
                (bottom[0], top(s + 1), top(s)),
                (arc(p + k + 1), ("b", top_circle, (-s - 1) % q), arc(p + k)),
            )
        )
    return tris


def base_triangulation(surface: MarkedSurface) -> Triangulation:
    """Deterministic starting triangulation.

    Disk: fan at ``(0, 0)``.  Annulus ``(p, q)``: the staircase of ``p + q``
    bridging arcs taking all outer steps first.  Pair of pants: a seam from
    ``(0, 0)`` to ``(1, 0)``; cutting along it leaves an annulus whose outer
    circle has ``m1 + m2 + 2`` points, which gets the annulus staircase.
    """
    b = surface.boundaries
    if surface.b == 1:
        m = b[0]
        chord_id = {k: k - 2 for k in range(2, m - 1)}

        def key(i, j):
            if j == i + 1:
                return ("b", 0, i)
            if (i, j) == (0, m - 1):
                return ("b", 0, m - 1)
            return chord_id[j] if i == 0 else None

        tris = []
        for i in range(1, m - 1):
            tris.append((((0, 0), (0, i), (0, i + 1)), (key(0, i), key(i, i + 1), key(0, i + 1))))
        # the last side runs (0, i+1) -> (0, 0): segment only when i + 1 == m - 1
        fixed = []
        for vs, ks in tris:
            ks = list(ks)
            if vs[2] == (0, m - 1):
                ks[2] = ("b", 0, m - 1)
            fixed.append((vs, tuple(ks)))
        return _build(surface, fixed)
    if surface.b == 2:
        p, q = b
        bottom = [(0, i) for i in range(p)]
        tris = _staircase(bottom, 1, q, lambda k: ("b", 0, k))
        return _build(surface, tris)
    m1, m2, m3 = b
    seam = m1 + m2 + m3 + 2
    merged = (
        [(0, i) for i in range(m1)] + [(0, 0)] + [(1, i) for i in range(m2)] + [(1, 0)]
    )

    def seg(k: int):
        if k < m1:
            return ("b", 0, k)
        if k == m1:
            return seam
        if k < m1 + m2 + 1:
            return ("b", 1, k - m1 - 1)
        return seam

    tris = _staircase(merged, 2, m3, seg)
    return _build(surface, tris)


# -- cutting ---------------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """One component after cutting, with its own marked-point labels.

    ``vertex_map`` sends the piece's labels to the original ones; edge ids are
    the original ids, except that a second copy of a cut edge inside the same
    piece gets the id recorded in ``copies``.
    """

    triangulation: Triangulation
    vertex_map: dict
    triangles: tuple[int, ...]
    copies: dict


def cut(tri: Triangulation, edges: Iterable[int]) -> list[Piece]:
    """Cut along interior edges and return the pieces, ordered by smallest triangle."""
    edges = sorted(set(edges))
    for e in edges:
        if e in tri.boundary:
            raise BoundaryEdgeNotFlippable(f"cannot cut along boundary segment {e}")
    fresh = max(tri.inc) + 1
    comps = tri.components(edges)
    cutset = set(edges)
    pieces = []
    for comp in comps:
        inside = set(comp)
        # side ids in this piece; second copies of cut edges get fresh ids
        side_id = {}
        copies = {}
        for t in comp:
            for s in range(3):
                e = tri.sides[t][s]
                if e in cutset:
                    occ = tri.inc[e]
                    if all(o[0] in inside for o in occ) and (t, s) == occ[1]:
                        copies[fresh] = e
                        side_id[(t, s)] = fresh
                        fresh += 1
                        continue
                side_id[(t, s)] = e

        def is_bdy(t, s):
            e = tri.sides[t][s]
            return e in tri.boundary or e in cutset

        def twin_in(t, s):
            if is_bdy(t, s):
                return None
            return tri.twin(t, s)

        # trace boundary cycles: from a boundary side, rotate around its head
        bsides = sorted((t, s) for t in comp for s in range(3) if is_bdy(t, s))
        succ = {}
        for t, s in bsides:
            u, r = t, (s + 1) % 3
            while not is_bdy(u, r):
                u, r = tri.twin(u, r)
                r = (r + 1) % 3
            succ[(t, s)] = (u, r)
        cycles, done = [], set()
        for start in bsides:
            if start in done:
                continue
            cyc, cur = [], start
            while cur not in done:
                done.add(cur)
                cyc.append(cur)
                cur = succ[cur]
            k = min(range(len(cyc)), key=lambda j: (tri.verts[cyc[j][0]][cyc[j][1]], side_id[cyc[j]]))
            cycles.append(cyc[k:] + cyc[:k])
        cycles.sort(key=lambda cyc: (tri.verts[cyc[0][0]][cyc[0][1]], side_id[cyc[0]]))
        # label each corner by the boundary side leaving its vertex copy
        label_of_side = {}
        for c, cyc in enumerate(cycles):
            for i, side in enumerate(cyc):
                label_of_side[side] = (c, i)
        corner_label = {}
        for t in comp:
            for s in range(3):
                u, r = t, s
                while not is_bdy(u, r):
                    u, r = tri.twin(u, r)
                    r = (r + 1) % 3
                corner_label[(t, s)] = label_of_side[(u, r)]
        surface = MarkedSurface(tuple(len(c) for c in cycles))
        verts = [tuple(corner_label[(t, s)] for s in range(3)) for t in comp]
        sides = [tuple(side_id[(t, s)] for s in range(3)) for t in comp]
        boundary = {side_id[side]: label_of_side[side] for side in bsides}
        vmap = {label_of_side[side]: tri.verts[side[0]][side[1]] for side in bsides}
        piece_tri = Triangulation(surface, verts, sides, boundary)
        pieces.append(Piece(piece_tri, vmap, tuple(comp), copies))
    return pieces


def glue(original_surface: MarkedSurface, pieces: Sequence[Piece], n_triangles: int) -> Triangulation:
    """Inverse of :func:`cut`: reassemble the original triangulation."""
    verts: list = [None] * n_triangles
    sides: list = [None] * n_triangles
    for piece in pieces:
        pt = piece.triangulation
        for local, t in enumerate(piece.triangles):
            verts[t] = tuple(piece.vertex_map[v] for v in pt.verts[local])
            sides[t] = tuple(piece.copies.get(e, e) for e in pt.sides[local])
    tri = Triangulation(original_surface, verts, sides, check=False)
    tri.validate()
    return tri


def random_flip_word(tri: Triangulation, length: int, rng) -> list[int]:
    """Uniform choices among the flippable (interior) edges, avoiding immediate undo."""
    word: list[int] = []
    choices = list(tri.interior)
    if not choices:
        return word
    for _ in range(length):
        pool = [e for e in choices if not word or e != word[-1]] or choices
        word.append(rng.choice(pool))
    return word
