"""Annulus charts unrolled onto the universal-cover strip.

A bridging triangulation of the annulus ``(p, q)`` lifts to a bi-infinite
monotone lattice path of arcs ``alpha_n = (i_n, s_n)`` joining bottom point
``u_i`` to top point ``t_s``.  Consecutive arcs differ by one bottom step
(``B``) or one top step (``T``); the triangle ``t_n`` between ``alpha_n`` and
``alpha_{n+1}`` carries the boundary segment of that step.  The path is
periodic: ``alpha_{n+N} = alpha_n + (p, q)`` with ``N = p + q``.

Bottom point ``u_i`` covers marked point ``(bottom, i mod p)``; top point
``t_s`` covers ``(top, -s mod q)``, so both circles keep the surface on their
left.  Lambda-lengths of arbitrary strip arcs are obtained by Ptolemy flips in
a finite polygon window of the strip.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .cluster import Value, _clean
from .errors import HypothesesNotMet, WindingBoundTooSmall
from .lambda_engine import LambdaState, ptolemy_flip
from .surface import ArcKind

Point = tuple[str, int]  # ("u", i) or ("t", s)


def _div(num, den) -> Value:
    return _clean(Fraction(num, den)) if isinstance(num, int) and isinstance(den, int) else _clean(Fraction(num) / den)


class PolygonChart:
    """A triangulated polygon with values on sides and diagonals.

    Vertices are listed in cyclic order; ``lam`` brings any chord into the
    triangulation by flipping the edges that cross it, one triangle at a time.
    """

    def __init__(self, labels: Sequence, edges: dict):
        self.labels = list(labels)
        self.pos = {x: k for k, x in enumerate(self.labels)}
        self.n = len(self.labels)
        self.adj = {k: set() for k in range(self.n)}
        self.val = {}
        for (x, y), v in edges.items():
            a, b = self.pos[x], self.pos[y]
            self.adj[a].add(b)
            self.adj[b].add(a)
            self.val[frozenset((a, b))] = v
        if sum(len(s) for s in self.adj.values()) != 2 * (2 * self.n - 3):
            raise ValueError("edge set is not a polygon triangulation")

    def _rel(self, x: int, v: int) -> int:
        return (v - x) % self.n

    def lam(self, x, y) -> Value:
        a, b = self.pos[x], self.pos[y]
        if a == b:
            raise ValueError("degenerate arc")
        adj = {k: set(s) for k, s in self.adj.items()}
        val = dict(self.val)
        rel_y = self._rel(a, b)
        while b not in adj[a]:
            nbrs = sorted(adj[a], key=lambda v: self._rel(a, v))
            for c, d in zip(nbrs, nbrs[1:]):
                if self._rel(a, c) < rel_y < self._rel(a, d):
                    break
            else:
                raise AssertionError("no triangle at the source crosses the arc")
            # c-d crosses a-b; e is the apex on the far side of c-d
            e = next(
                v
                for v in adj[c] & adj[d]
                if self._rel(a, c) < self._rel(a, v) < self._rel(a, d)
            )
            g = lambda u, v: val[frozenset((u, v))]
            new = _div(g(a, c) * g(d, e) + g(a, d) * g(c, e), g(c, d))
            adj[c].discard(d)
            adj[d].discard(c)
            del val[frozenset((c, d))]
            adj[a].add(e)
            adj[e].add(a)
            val[frozenset((a, e))] = new
        return val[frozenset((a, b))]


@dataclass(frozen=True)
class Arc:
    kind: str  # "bridging", "bottom", "top"
    ends: tuple[int, int]  # (i, s) for bridging; (start, end) strip indices otherwise
    winding: int = 0

    def points(self) -> tuple[Point, Point]:
        x, y = self.ends
        if self.kind == "bridging":
            return ("u", x), ("t", y)
        tag = "u" if self.kind == "bottom" else "t"
        return (tag, x), (tag, y)


@dataclass(frozen=True)
class StripChart:
    """Periodic strip data of a bridging triangulation with values."""

    p: int
    q: int
    word: str  # letter of t_n for n = 0..N-1
    start: tuple[int, int]  # alpha_0
    a: tuple  # a_n = lambda(alpha_n), n = 0..N-1
    bottom: tuple  # value of segment u_j u_{j+1}, j = 0..p-1
    top: tuple  # value of segment t_s t_{s+1}, s = 0..q-1

    def __post_init__(self):
        if len(self.word) != self.N or self.word.count("B") != self.p:
            raise ValueError("word must have p letters B and q letters T")
        if len(self.a) != self.N or len(self.bottom) != self.p or len(self.top) != self.q:
            raise ValueError("value tables have the wrong length")
        object.__setattr__(self, "_prefix", self._prefixes())

    @property
    def N(self) -> int:
        return self.p + self.q

    def _prefixes(self):
        i, s = self.start
        out = [(i, s)]
        for letter in self.word:
            i, s = (i + 1, s) if letter == "B" else (i, s + 1)
            out.append((i, s))
        return out

    def alpha(self, n: int) -> tuple[int, int]:
        m, r = divmod(n, self.N)
        i, s = self._prefix[r]
        return (i + m * self.p, s + m * self.q)

    def a_at(self, n: int) -> Value:
        return self.a[n % self.N]

    def letter(self, n: int) -> str:
        return self.word[n % self.N]

    def bottom_value(self, j: int) -> Value:
        return self.bottom[j % self.p]

    def top_value(self, s: int) -> Value:
        return self.top[s % self.q]

    def side_value(self, n: int) -> Value:
        """Boundary value carried by triangle ``t_n``."""
        i, s = self.alpha(n)
        return self.bottom_value(i) if self.letter(n) == "B" else self.top_value(s)

    # -- windows ----------------------------------------------------------------

    def _first_index(self, pred) -> int:
        """Smallest n with pred(alpha_n); alpha is monotone so this is a threshold."""
        lo, hi = -1, 1
        while pred(self.alpha(lo)):
            lo *= 2
        while not pred(self.alpha(hi)):
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pred(self.alpha(mid)):
                hi = mid
            else:
                lo = mid
        return hi

    def window(self, lo_pt: tuple[int, int], hi_pt: tuple[int, int]) -> PolygonChart:
        """Polygon of triangles from the last arc below ``lo_pt`` to the first above ``hi_pt``."""
        A = self._first_index(lambda al: al[0] > lo_pt[0] or al[1] > lo_pt[1]) - 1
        B = self._first_index(lambda al: al[0] >= hi_pt[0] and al[1] >= hi_pt[1])
        (i0, s0), (i1, s1) = self.alpha(A), self.alpha(B)
        labels = [("u", i) for i in range(i0, i1 + 1)] + [("t", s) for s in range(s1, s0 - 1, -1)]
        edges = {}
        for n in range(A, B + 1):
            i, s = self.alpha(n)
            edges[(("u", i), ("t", s))] = self.a_at(n)
        for i in range(i0, i1):
            edges[(("u", i), ("u", i + 1))] = self.bottom_value(i)
        for s in range(s0, s1):
            edges[(("t", s), ("t", s + 1))] = self.top_value(s)
        return PolygonChart(labels, edges)

    def lam(self, x: Point, y: Point) -> Value:
        if x[0] == "t" and y[0] == "u":
            x, y = y, x
        if x[0] == "u" and y[0] == "t":
            i, s = x[1], y[1]
            return self.window((i, s), (i, s)).lam(x, y)
        (tag, j), (_, j2) = x, y
        if j > j2:
            j, j2 = j2, j
        if j2 - j == 1:
            return self.bottom_value(j) if tag == "u" else self.top_value(j)
        if tag == "u":
            win = self.window((j, 10**9), (j2, -(10**9)))
        else:
            win = self.window((10**9, j), (-(10**9), j2))
        return win.lam((tag, j), (tag, j2))

    def arc_value(self, arc: Arc) -> Value:
        return self.lam(*arc.points())

    # -- quadrilaterals ---------------------------------------------------------

    def flip_endpoints(self, n: int) -> tuple[Point, Point]:
        """Endpoints of the diagonal crossing ``alpha_n`` in ``t_{n-1} + t_n``."""

        def far(m: int) -> Point:
            (i, s), (i2, s2) = self.alpha(m), self.alpha(n)
            return ("u", i) if i != i2 else ("t", s)

        return far(n - 1), far(n + 1)

    def flipped(self, n: int) -> Value:
        return self.lam(*self.flip_endpoints(n))

    def shift(self, r: int) -> "StripChart":
        """Same chart indexed from ``alpha_r``."""
        N = self.N
        word = "".join(self.letter(r + n) for n in range(N))
        a = tuple(self.a_at(r + n) for n in range(N))
        return StripChart(self.p, self.q, word, self.alpha(r), a, self.bottom, self.top)


# -- conversion from surface charts ----------------------------------------------


def from_lambda_state(state: LambdaState, bottom_circle: int | None = None) -> StripChart:
    """Unroll an annulus chart; peripheral edges are first flipped to bridging ones."""
    tri = state.triangulation
    if tri.surface.b != 2:
        raise ValueError("strip charts need an annulus")
    s = LambdaState(tri, state.values, strict=False)
    while True:
        tri = s.triangulation
        bad = [e for e in tri.interior if tri.classify(e) is not ArcKind.BRIDGING]
        if not bad:
            break
        for e in bad:
            corners = tri.quadrilateral(e).corners
            if corners[1][0] != corners[3][0]:
                s = ptolemy_flip(s, e)
                break
        else:
            raise AssertionError("no peripheral edge flips to a bridging one")
    if bottom_circle is None:
        odd = [tri.boundary[e][0] for e in tri.boundary if s.values[e] != 1]
        bottom_circle = min(odd) if odd else 0
    cb, ct = bottom_circle, 1 - bottom_circle
    p, q = tri.surface.boundaries[cb], tri.surface.boundaries[ct]
    seg_val = {tri.boundary[e]: s.values[e] for e in tri.boundary}
    bottom = tuple(seg_val[(cb, j)] for j in range(p))
    top = tuple(seg_val[(ct, (-j - 1) % q)] for j in range(q))

    e0 = tri.boundary_edge_at((cb, 0))
    t, r = tri.inc[e0][0]
    apex = tri.verts[t][(r + 2) % 3]
    alpha0 = tri.sides[t][(r + 2) % 3]
    start = (0, (-apex[1]) % q)
    word, a = [], [s.values[alpha0]]
    cur_edge = tri.sides[t][(r + 1) % 3]
    word.append("B")
    for _ in range(p + q - 1):
        a.append(s.values[cur_edge])
        occ = tri.inc[cur_edge]
        t2, r2 = occ[1] if occ[0][0] == t else occ[0]
        sides = tri.sides[t2]
        bside = next(k for k in range(3) if sides[k] in tri.boundary)
        word.append("B" if tri.boundary[sides[bside]][0] == cb else "T")
        nxt = next(sides[k] for k in range(3) if k != bside and k != r2)
        t, cur_edge = t2, nxt
    if cur_edge != alpha0:
        raise AssertionError("strip walk did not close up")
    return StripChart(p, q, "".join(word), start, tuple(a), bottom, top)


def unitary_chart(p: int, q: int, bottom: Sequence | None = None) -> StripChart:
    """All arcs 1 on the staircase taking bottom steps first."""
    word = "B" * p + "T" * q
    bottom = tuple(bottom) if bottom is not None else (1,) * p
    return StripChart(p, q, word, (0, 0), (1,) * (p + q), bottom, (1,) * q)


# -- arc enumeration and greedy triangulations ----------------------------------


def _fan_range(chart: StripChart) -> dict[int, tuple[int, int]]:
    """For each bottom index in one period, the range of top indices of chart arcs."""
    out: dict[int, list] = {}
    for n in range(chart.N + 1):
        i, s = chart.alpha(n)
        m = math.floor(i / chart.p)
        i, s = i - m * chart.p, s - m * chart.q
        lo, hi = out.get(i, (s, s))
        out[i] = (min(lo, s), max(hi, s))
    return out


def enumerate_annulus_arcs(chart: StripChart, winding: int = 3) -> list[tuple[Arc, Value]]:
    """Bridging arcs up to ``winding`` twists beyond the chart's fans, plus all peripheral arcs."""
    arcs = []
    fans = _fan_range(chart)
    p, q = chart.p, chart.q
    for i in range(p):
        lo, hi = fans[i]
        for s in range(lo - winding * q, hi + winding * q + 1):
            w = -((lo - s + q - 1) // q) if s < lo else (s - hi + q - 1) // q if s > hi else 0
            arcs.append(Arc("bridging", (i, s), w))
    for i in range(p):
        for d in range(2, p + 1):
            arcs.append(Arc("bottom", (i, i + d)))
    for s in range(q):
        for d in range(2, q + 1):
            arcs.append(Arc("top", (s, s + d)))
    valued = [(arc, chart.arc_value(arc)) for arc in arcs]
    valued.sort(key=lambda av: (av[1], av[0].kind, av[0].ends, av[0].winding))
    return valued


def bridging_cross(x: tuple[int, int], y: tuple[int, int], p: int, q: int) -> bool:
    span = abs(x[0] - y[0]) // p + abs(x[1] - y[1]) // q + 2
    return any(
        (x[0] - y[0] - m * p) * (x[1] - y[1] - m * q) < 0 for m in range(-span, span + 1)
    )


def _normal(arc: tuple[int, int], p: int, q: int) -> tuple[int, int]:
    m = math.floor(arc[0] / p)
    return (arc[0] - m * p, arc[1] - m * q)


def _chart_from_arcs(chart: StripChart, arcs: list[tuple[int, int]], values: dict) -> StripChart:
    p, q, N = chart.p, chart.q, chart.N
    first = arcs[0]
    lifts = sorted({(i + m * p, s + m * q) for (i, s) in arcs for m in range(-2, 3)})
    k = lifts.index(first)
    path = lifts[k : k + N + 1]
    word = []
    for (i, s), (i2, s2) in zip(path, path[1:]):
        if (i2 - i, s2 - s) == (1, 0):
            word.append("B")
        elif (i2 - i, s2 - s) == (0, 1):
            word.append("T")
        else:
            raise AssertionError("selected arcs do not form a strip triangulation")
    a = tuple(values[_normal(x, p, q)] for x in path[:N])
    return StripChart(p, q, "".join(word), first, a, chart.bottom, chart.top)


@dataclass
class StripInstance:
    chart: StripChart
    k: int
    l: int | None
    winding: int
    k_positions: tuple[int, ...]

    @property
    def p(self) -> int:
        return self.chart.p

    @property
    def q(self) -> int:
        return self.chart.q


def boundary_pattern(chart: StripChart) -> tuple[int, int | None, tuple[int, ...], list[str]]:
    """(k, l, k-edge positions, problems) read off the boundary values."""
    problems = []
    if any(v != 1 for v in chart.top):
        problems.append("top boundary must be all ones")
    marked = tuple(j for j, v in enumerate(chart.bottom) if v != 1)
    if not marked:
        return 1, None, (), problems
    ks = {chart.bottom[j] for j in marked}
    k = next(iter(ks))
    if len(ks) != 1 or not isinstance(k, int) or len(marked) != 2:
        problems.append("boundary must carry exactly two segments of one value k")
        return (k if isinstance(k, int) else 0), None, marked, problems
    j1, j2 = marked
    l = j2 - j1 + 1
    if not 2 <= j2 - j1 <= chart.p - 2:
        problems.append(f"k-segments {j1},{j2} are adjacent (need l >= 3 and l + 1 <= p)")
    return k, l, marked, problems


def greedy_bridging_triangulation(chart: StripChart, winding: int = 3) -> StripInstance:
    """Pick shortest compatible bridging arcs within the winding bound until complete."""
    p, q = chart.p, chart.q
    inner = [(arc, v) for arc, v in enumerate_annulus_arcs(chart, winding) if arc.kind == "bridging"]
    outer = [
        (arc, v)
        for arc, v in enumerate_annulus_arcs(chart, winding + 1)
        if arc.kind == "bridging" and abs(arc.winding) == winding + 1
    ]
    chosen: list[tuple[int, int]] = []
    values = {}
    while len(chosen) < chart.N:
        ok = lambda arc: arc.ends not in values and not any(
            bridging_cross(arc.ends, c, p, q) for c in chosen
        )
        pick = next(((arc, v) for arc, v in inner if ok(arc)), None)
        if pick is None:
            raise WindingBoundTooSmall(f"no compatible bridging arc within winding {winding}")
        shorter = [arc for arc, v in outer if v < pick[1] and ok(arc)]
        if shorter:
            raise WindingBoundTooSmall(
                f"arc {shorter[0].ends} at winding {shorter[0].winding} beats the window minimum {pick[1]}"
            )
        chosen.append(pick[0].ends)
        values[pick[0].ends] = pick[1]
    new = _chart_from_arcs(chart, chosen, values)
    k, l, marked, _ = boundary_pattern(new)
    return StripInstance(new, k, l, winding, marked)


def instance_from_chart(chart: StripChart, winding: int = 3) -> StripInstance:
    k, l, marked, _ = boundary_pattern(chart)
    return StripInstance(chart, k, l, winding, marked)


# -- cases and claims ------------------------------------------------------------


@dataclass(frozen=True)
class QuadCase:
    index: int
    case: str
    sides: tuple  # boundary values of t_{i-1}, t_i
    lhs: Value  # a_i * a_i'
    rhs: Value  # the instantiated identity
    good: bool
    bridging_flip: bool

    @property
    def balanced(self) -> bool:
        return self.lhs == self.rhs


def classify_quadrilateral(inst: StripInstance | StripChart, i: int) -> QuadCase:
    chart = inst.chart if isinstance(inst, StripInstance) else inst
    prev, here = chart.letter(i - 1), chart.letter(i)
    b1, b2 = chart.side_value(i - 1), chart.side_value(i)
    am, a0, ap = chart.a_at(i - 1), chart.a_at(i), chart.a_at(i + 1)
    lhs = a0 * chart.flipped(i)
    if prev != here:
        rhs = am * ap + b1 * b2
        case = "I" if b1 == 1 and b2 == 1 else "II"
        good = case == "I"
        bridging = True
    else:
        rhs = b2 * am + b1 * ap
        if b1 == 1 and b2 == 1:
            case = "III"
        elif b1 == 1:
            case = "IV"
        elif b2 == 1:
            case = "V"
        else:
            case = "other"
        good = False
        bridging = False
    return QuadCase(i, case, (b1, b2), lhs, rhs, good, bridging)


def _encloses_mark(arc: Arc, chart: StripChart) -> bool:
    if arc.kind != "bottom":
        return False
    return any(chart.bottom_value(j) != 1 for j in range(arc.ends[0], arc.ends[1]))


def hypotheses(inst: StripInstance) -> list[str]:
    """Preconditions of the strip claims that fail on this instance (empty when all hold).

    The claims are about a chart cut from a pair of pants along a shortest
    bridging arc of value ``k > 1``: boundary pattern, integrality, bridging
    arcs at least ``k``, peripheral arcs at least 2 (at least ``k`` when they
    pass over a ``k``-segment), ``alpha_0`` shortest, and the greedy property
    that no flip diagonal is shorter than the arc it replaces.
    """
    chart = inst.chart
    k, l, marked, problems = boundary_pattern(chart)
    violated = list(problems)
    if k < 2:
        violated.append("k must exceed 1")
    if violated:
        return violated
    a = chart.a
    if any(not isinstance(x, int) for x in a):
        return ["triangulation values are not integers"]
    if min(a) < k:
        return [f"triangulation arc of value {min(a)} below k"]
    for n in range(chart.N):
        f = chart.flipped(n)
        if not isinstance(f, int):
            return [f"flip diagonal at {n} is not an integer"]
        if chart.letter(n - 1) != chart.letter(n) and f < chart.a_at(n):
            return [f"flip diagonal at {n} is shorter than the arc it replaces"]
    amin = min(a)
    for arc, v in enumerate_annulus_arcs(chart, inst.winding):
        if not isinstance(v, int):
            return [f"arc {arc.kind}{arc.ends} has non-integer value {v}"]
        if arc.kind == "bridging" and v < amin:
            return [f"bridging arc {arc.ends} shorter than alpha_0 ({v} < {amin})"]
        if arc.kind != "bridging":
            floor = k if _encloses_mark(arc, chart) else 2
            if v < floor:
                return [f"peripheral arc {arc.kind}{arc.ends} has value {v} < {floor}"]
    return []


@dataclass
class ClaimReport:
    p: int
    q: int
    k: int
    l: int | None
    hypotheses_met: bool
    violated: list[str]
    cases: dict
    identities_balanced: bool
    claims: dict
    local_checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "k": self.k,
            "l": self.l,
            "caseHistogram": dict(sorted(self.cases.items())),
            "identitiesBalanced": self.identities_balanced,
            "claims": dict(self.claims),
            "hypothesesMet": self.hypotheses_met,
            "violated": list(self.violated),
            "localChecks": dict(self.local_checks),
        }

    @property
    def any_violation(self) -> bool:
        return self.hypotheses_met and "violated" in self.claims.values()


def _claim1(chart: StripChart, k: int) -> tuple[bool, list]:
    rows = []
    for j in range(chart.p):
        if chart.bottom_value(j) == 1:
            continue
        lam = lambda x, y: chart.lam(("u", x), ("u", y))
        l13, l24, l14 = lam(j - 1, j + 1), lam(j, j + 2), lam(j - 1, j + 2)
        ok = (
            l13 * l24 == chart.bottom_value(j) * l14 + chart.bottom_value(j - 1) * chart.bottom_value(j + 1)
            and l13 > k
            and l24 > k
            and (k * l14 + 1) % k != 0
        )
        rows.append(((j - 1, j, j + 1, j + 2), l13, l24, l14, ok))
    return all(r[-1] for r in rows), rows


def audit(inst: StripInstance) -> ClaimReport:
    """Case histogram, identities and claims; claims are gated on the hypotheses."""
    chart = inst.chart
    k, l, _, _ = boundary_pattern(chart)
    violated = hypotheses(inst)
    met = not violated
    quads = [classify_quadrilateral(chart, i) for i in range(chart.N)]
    hist: dict[str, int] = {}
    for qd in quads:
        hist[qd.case] = hist.get(qd.case, 0) + 1
    balanced = all(qd.balanced for qd in quads)
    claims = {}
    c4 = any(qd.good for qd in quads)
    claims["c4"] = "holds" if c4 else "violated"
    local = step_checks(chart, k)
    local.update(claim1_checks(chart, k))
    if met:
        c1, _ = _claim1(chart, k)
        claims["c1"] = "holds" if c1 else "violated"
        r = min(range(chart.N), key=lambda n: (chart.a[n], n))
        sh = chart.shift(r)
        window = range(0, 2 * chart.N)
        c2 = all(sh.a_at(i + 1) >= sh.a_at(i) for i in window)
        claims["c2"] = "holds" if c2 else "violated"
        c3 = all(
            sh.a_at(i + 1) > sh.a_at(i)
            for i in window
            if classify_quadrilateral(sh, i).good
        )
        claims["c3"] = "holds" if c3 else "violated"
    else:
        for c in ("c1", "c2", "c3"):
            claims[c] = "vacuous"
    claims = dict(sorted(claims.items()))
    return ClaimReport(chart.p, chart.q, k, l, met, violated, hist, balanced, claims, local)


def check_claims(inst: StripInstance) -> ClaimReport:
    report = audit(inst)
    if not report.hypotheses_met:
        raise HypothesesNotMet("; ".join(report.violated), report.violated)
    return report


def step_checks(chart: StripChart, k: int) -> dict:
    """Per-quadrilateral case arguments checked where their local premises hold.

    For each ``i`` whose premises hold (integers, all arcs around at least
    ``k``, ``a_{i-1} <= a_i``, and the case-specific lower bound on the flip
    diagonal) the conclusion ``a_{i+1} >= a_i`` is tested, and across Case I
    quadrilaterals with ``a_{i-1} > 1`` also ``a_{i+1} > a_i``.
    """
    premises = conclusions = strict_premises = strict_ok = 0
    if k < 1:
        return {"premises": 0, "held": 0, "goodPremises": 0, "goodHeld": 0}
    for i in range(chart.N):
        qd = classify_quadrilateral(chart, i)
        am, a0, ap = chart.a_at(i - 1), chart.a_at(i), chart.a_at(i + 1)
        if not all(isinstance(x, int) for x in (am, a0, ap)) or min(am, a0, ap) < k:
            continue
        flip = _div(qd.lhs, a0)
        if not isinstance(flip, int):
            continue
        if qd.case in ("I", "II"):
            ok_flip = flip >= a0
        elif qd.case == "III":
            ok_flip = flip >= 2
        elif qd.case in ("IV", "V"):
            ok_flip = flip > k or (flip >= k and qd.case == "V" and flip >= a0)
        else:
            continue
        if not (am <= a0 and ok_flip) or k < 2 and qd.case != "I":
            continue
        if qd.case == "I" and am < 2:
            continue
        premises += 1
        conclusions += ap >= a0
        if qd.case == "I":
            strict_premises += 1
            strict_ok += ap > a0
    return {
        "premises": premises,
        "held": conclusions,
        "goodPremises": strict_premises,
        "goodHeld": strict_ok,
    }


def claim1_checks(chart: StripChart, k: int) -> dict:
    """The k-segment inequality (c1) wherever its premises hold: arcs integral, both diagonals >= k."""
    premises = held = 0
    if k >= 2 and len(set(chart.bottom)) == 2 and all(v == 1 for v in chart.top):
        _, rows = _claim1(chart, k)
        for _, l13, l24, l14, ok in rows:
            if all(isinstance(x, int) for x in (l13, l24, l14)) and min(l13, l24) >= k:
                premises += 1
                held += ok
    return {"claim1Premises": premises, "claim1Held": held}


# -- exhaustive enumeration -------------------------------------------------------


@dataclass(frozen=True)
class AbstractTriangulation:
    word: str  # letters of t_0..t_{N-1}; alpha_0 is the first arc at u_0
    offset: int  # top index of alpha_0, modulo q
    good: int  # good quadrilaterals per period

    def chart(self, p: int, q: int, bottom: Sequence) -> StripChart:
        return StripChart(p, q, self.word, (0, self.offset), (1,) * (p + q), tuple(bottom), (1,) * q)


def pattern_bottom(p: int, k_positions: Sequence[int], k: int = 2) -> tuple:
    return tuple(k if j in k_positions else 1 for j in range(p))


def _good_count(word: str, p: int, marks: set) -> int:
    N = len(word)
    i = 0
    bottom_index = []
    for letter in word:
        bottom_index.append(i if letter == "B" else None)
        i += letter == "B"
    count = 0
    for n in range(N):
        x, y = n - 1, n
        lx, ly = word[x % N], word[y % N]
        if lx == ly:
            continue
        b = bottom_index[x % N] if lx == "B" else bottom_index[y % N]
        if b not in marks:
            count += 1
    return count


def enumerate_bridging_triangulations(
    p: int, q: int, k_positions: Sequence[int] = ()
) -> Iterator[AbstractTriangulation]:
    """All bridging triangulations of the annulus ``(p, q)`` up to twisting.

    Each is a word with ``p`` bottom and ``q`` top steps ending in a bottom
    step (so ``alpha_0`` is the first arc at ``u_0``) together with the top
    index of ``alpha_0`` modulo ``q``; ``q * C(p + q - 1, q)`` in total.
    """
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    N = p + q
    marks = set(k_positions)
    for tops in itertools.combinations(range(N - 1), q):
        word = "".join("T" if n in tops else "B" for n in range(N - 1)) + "B"
        good = _good_count(word, p, marks)
        for offset in range(q):
            yield AbstractTriangulation(word, offset, good)


def admissible_positions(p: int) -> list[tuple[int, int]]:
    """Placements ``(0, l - 1)`` of the two k-segments with ``l >= 3`` and ``l + 1 <= p``."""
    return [(0, l - 1) for l in range(3, p)]


# -- synthetic k-pattern search ---------------------------------------------------


@dataclass
class SearchResult:
    p: int
    q: int
    k: int
    l: int
    cap: int
    words: int = 0
    leaves: int = 0
    satisfying: int = 0
    violations: int = 0
    reports: list = field(default_factory=list)
    step_premises: int = 0
    step_held: int = 0
    claim1_premises: int = 0
    claim1_held: int = 0
    unbalanced: int = 0

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "k": self.k,
            "l": self.l,
            "cap": self.cap,
            "words": self.words,
            "leaves": self.leaves,
            "hypothesisSatisfying": self.satisfying,
            "claimViolations": self.violations,
            "stepPremises": self.step_premises,
            "stepHeld": self.step_held,
            "claim1Premises": self.claim1_premises,
            "claim1Held": self.claim1_held,
            "identitiesUnbalanced": self.unbalanced,
        }


def _local_ok(word: str, bottom_of: list, bottom: tuple, k: int, n: int, am, a0, ap) -> bool:
    """Integrality and lower bounds of the flip diagonal at ``alpha_n``."""
    N = len(word)
    lx, ly = word[(n - 1) % N], word[n % N]
    b1 = bottom[bottom_of[(n - 1) % N]] if lx == "B" else 1
    b2 = bottom[bottom_of[n % N]] if ly == "B" else 1
    if lx != ly:
        num = am * ap + b1 * b2
        if num % a0:
            return False
        return num // a0 >= a0
    num = b2 * am + b1 * ap
    if num % a0:
        return False
    floor = k if lx == "B" and (b1 != 1 or b2 != 1) else 2
    return num // a0 >= floor


def search_k_instances(
    p: int, q: int, k: int, l: int, cap: int = 30, winding: int = 2, keep: int = 0
) -> SearchResult:
    """Look for charts with the k-pattern that meet every hypothesis of the claims.

    Values ``a_n`` range over ``[k, cap]``; each word is searched by depth-first
    assignment with the flip-diagonal integrality and lower-bound tests applied
    as soon as both neighbours are known.  Every complete assignment is then
    audited in full.  Since the twist offset does not change any value with
    unit top boundary, one offset per word suffices.
    """
    if not (l >= 3 and l + 1 <= p):
        raise HypothesesNotMet(f"l = {l} violates l >= 3 and l + 1 <= p", ["l >= 3 and l + 1 <= p"])
    bottom = pattern_bottom(p, (0, l - 1), k)
    res = SearchResult(p, q, k, l, cap)
    N = p + q
    seen_words = set()
    for tri in enumerate_bridging_triangulations(p, q, (0, l - 1)):
        if tri.word in seen_words:
            continue
        seen_words.add(tri.word)
        res.words += 1
        word = tri.word
        bottom_of, i = [], 0
        for letter in word:
            bottom_of.append(i % p)
            i += letter == "B"
        values = list(range(k, cap + 1))
        a = [0] * N

        def dfs(n: int):
            if n == N:
                if _local_ok(word, bottom_of, bottom, k, N - 1, a[N - 2], a[N - 1], a[0]) and _local_ok(
                    word, bottom_of, bottom, k, 0, a[N - 1], a[0], a[1]
                ):
                    yield tuple(a)
                return
            for v in values:
                a[n] = v
                if n >= 2 and not _local_ok(word, bottom_of, bottom, k, n - 1, a[n - 2], a[n - 1], v):
                    continue
                yield from dfs(n + 1)

        for leaf in dfs(0):
            res.leaves += 1
            chart = StripChart(p, q, word, (0, 0), leaf, bottom, (1,) * q)
            inst = StripInstance(chart, k, l, winding, (0, l - 1))
            report = audit(inst)
            res.step_premises += report.local_checks["premises"]
            res.step_held += report.local_checks["held"]
            res.claim1_premises += report.local_checks["claim1Premises"]
            res.claim1_held += report.local_checks["claim1Held"]
            res.unbalanced += not report.identities_balanced
            if report.hypotheses_met:
                res.satisfying += 1
                res.violations += report.any_violation
                if len(res.reports) < keep or report.any_violation:
                    res.reports.append(report)
    return res


# -- instances cut from pairs of pants --------------------------------------------


def pants_cut_instance(state: LambdaState, edge: int, winding: int = 2) -> StripInstance:
    """Cut a pants chart along a bridging edge joining two circles and unroll the annulus.

    The two copies of the edge become boundary segments of value ``k`` on the
    merged circle, which is used as the bottom of the strip.
    """
    from .solver import cut_bridging

    surgery = cut_bridging(state, edge)
    (annulus,) = surgery.states
    merged = annulus.triangulation.boundary[max(surgery.pieces[0].copies)][0]
    chart = from_lambda_state(annulus, bottom_circle=merged)
    try:
        return greedy_bridging_triangulation(chart, winding)
    except WindingBoundTooSmall:
        return instance_from_chart(chart, winding)
