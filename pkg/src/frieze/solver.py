"""Finding, certifying and dissecting unitary charts of surface friezes."""

from __future__ import annotations

import enum
import heapq
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .cc import chords_cross, triangulation_from_quiddity, _norm
from .errors import (
    InvalidState,
    NonIntegralValue,
    NotABridgingEdge,
    NotUnitaryInput,
    StructuralAssumptionFailed,
)
from .lambda_engine import (
    LambdaState,
    apply_flip_word,
    flip_value,
    lambda_short_diagonal,
    ptolemy_flip,
    total_weight,
)
from .surface import ArcKind, MarkedSurface, Piece, Triangulation, cut, glue

log = logging.getLogger(__name__)

DEFAULT_NODES = 100_000
DEFAULT_WEIGHT_FACTOR = 4


class Status(enum.Enum):
    UNITARY_FOUND = "UnitaryFound"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    NON_INTEGRAL = "NonIntegralDetected"

    @property
    def exit_code(self) -> int:
        return {"UnitaryFound": 0, "BudgetExhausted": 2, "NonIntegralDetected": 3}[self.value]


@dataclass
class SolveReport:
    status: Status
    word: list[int] = field(default_factory=list)
    nodes: int = 0
    peak_weight: int = 0
    final_key: str = ""
    detail: str = ""

    def to_json(self) -> dict:
        out = {
            "status": self.status.value,
            "flipWord": list(self.word),
            "nodes": self.nodes,
            "peakWeight": self.peak_weight,
            "finalKey": self.final_key,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class Budget:
    nodes: int = DEFAULT_NODES
    weight_factor: int = DEFAULT_WEIGHT_FACTOR


def _check_input(s: LambdaState) -> str | None:
    if not s.is_integral():
        return "input values are not all integers"
    bad = [e for e in s.triangulation.boundary if s.values[e] != 1]
    if bad:
        return f"boundary edges {bad} are not 1"
    return None


def _best_first(s: LambdaState, goal, budget: Budget) -> tuple[LambdaState | None, list[int], int, int, str]:
    """Best-first search on total weight; returns (state, word, nodes, peak, error)."""
    start_w = total_weight(s)
    ceiling = start_w * budget.weight_factor
    peak = start_w
    heap = [(start_w, s.search_key(), (), s)]
    seen = {s.search_key()}
    nodes = 0
    while heap:
        w, _, word, cur = heapq.heappop(heap)
        nodes += 1
        if goal(cur):
            return cur, list(word), nodes, peak, ""
        if nodes >= budget.nodes:
            break
        vals = cur.values
        for e in cur.triangulation.interior:
            try:
                new = flip_value(cur, e)
            except NonIntegralValue as exc:
                return None, list(word) + [e], nodes, peak, str(exc)
            nw = w - vals[e] + new
            if nw > ceiling:
                continue
            nxt = ptolemy_flip(cur, e)
            key = nxt.search_key()
            if key in seen:
                continue
            seen.add(key)
            peak = max(peak, nw)
            heapq.heappush(heap, (nw, key, word + (e,), nxt))
    return None, [], nodes, peak, "budget"


def solve_unitary(s: LambdaState, budget: Budget | None = None) -> SolveReport:
    """Search the flip graph for a chart with every interior value equal to 1.

    Priority is total weight, then canonical key, then flip word; states are
    deduplicated by (canonical key, values).
    """
    budget = budget or Budget()
    problem = _check_input(s)
    if problem:
        return SolveReport(Status.NON_INTEGRAL, detail=problem)
    s = LambdaState(s.triangulation, s.values, strict=True)
    found, word, nodes, peak, err = _best_first(s, LambdaState.is_unitary, budget)
    if found is None:
        if err == "budget":
            return SolveReport(Status.BUDGET_EXHAUSTED, nodes=nodes, peak_weight=peak)
        return SolveReport(Status.NON_INTEGRAL, word=word, nodes=nodes, peak_weight=peak, detail=err)
    return SolveReport(
        Status.UNITARY_FOUND,
        word=word,
        nodes=nodes,
        peak_weight=peak,
        final_key=found.triangulation.canonical_key().hex(),
    )


def replay(s: LambdaState, word: Sequence[int]) -> LambdaState:
    return apply_flip_word(s, word)


# -- certificates ----------------------------------------------------------------


@dataclass(frozen=True)
class UniquenessCertificate:
    flip_values: dict
    holds: bool


def _require_unitary(s: LambdaState) -> None:
    if not s.is_unitary() or any(s.values[e] != 1 for e in s.triangulation.boundary):
        raise NotUnitaryInput("chart is not all ones")


def certify_uniqueness(s: LambdaState) -> UniquenessCertificate:
    """Every flip out of a unitary chart gives 1*1 = a*c + b*d >= 2."""
    _require_unitary(s)
    vals = {e: flip_value(s, e) for e in s.triangulation.interior}
    return UniquenessCertificate(vals, all(v >= 2 for v in vals.values()))


def unitary_states_within(s: LambdaState, radius: int) -> int:
    """Number of distinct all-ones states within ``radius`` flips of ``s``."""
    seen = {s.search_key()}
    frontier = [s]
    count = int(s.is_unitary())
    for _ in range(radius):
        nxt = []
        for cur in frontier:
            for e in cur.triangulation.interior:
                st = ptolemy_flip(cur, e)
                key = st.search_key()
                if key in seen:
                    continue
                seen.add(key)
                count += st.is_unitary()
                nxt.append(st)
        frontier = nxt
    return count


@dataclass(frozen=True)
class VertexLaw:
    vertex: tuple[int, int]
    short_diagonal: int | None
    corners: int
    skipped: bool

    @property
    def ok(self) -> bool:
        return self.skipped or self.short_diagonal == self.corners


def check_short_diagonal_law(s: LambdaState) -> list[VertexLaw]:
    _require_unitary(s)
    tri = s.triangulation
    out = []
    for v in tri.surface.vertices():
        corners = tri.corners_at(v)
        if tri.surface.boundaries[v[0]] < 2:
            out.append(VertexLaw(v, None, corners, True))
        else:
            out.append(VertexLaw(v, lambda_short_diagonal(s, v), corners, False))
    return out


# -- surgery ---------------------------------------------------------------------


@dataclass
class SurgeryResult:
    """Pieces of a chart after cutting along ``edge``; ``reglue`` undoes the cut."""

    surface: MarkedSurface
    n_triangles: int
    edge: int
    pieces: list[Piece]
    states: list[LambdaState]

    @property
    def parts(self) -> list[tuple[MarkedSurface, LambdaState]]:
        return [(st.triangulation.surface, st) for st in self.states]

    def reglue(self, states: Sequence[LambdaState] | None = None) -> LambdaState:
        states = list(states) if states is not None else self.states
        pieces = [
            Piece(st.triangulation, p.vertex_map, p.triangles, p.copies)
            for p, st in zip(self.pieces, states)
        ]
        tri = glue(self.surface, pieces, self.n_triangles)
        values = {}
        for p, st in zip(pieces, states):
            for e, v in st.values.items():
                if e not in p.copies:
                    values[e] = v
        return LambdaState(tri, values, states[0].strict)


def _cut_state(s: LambdaState, e: int) -> SurgeryResult:
    tri = s.triangulation
    pieces = cut(tri, [e])
    states = []
    for p in pieces:
        pt = p.triangulation
        vals = {x: s.values[p.copies.get(x, x)] for x in pt.inc}
        states.append(LambdaState(pt, vals, s.strict))
    return SurgeryResult(tri.surface, len(tri.verts), e, pieces, states)


def reduce_once(s: LambdaState) -> SurgeryResult | None:
    """Cut off a polygon along a unit peripheral edge; None when the chart is reduced here."""
    tri = s.triangulation
    for e in tri.interior:
        if s.values[e] == 1 and tri.classify(e) is ArcKind.PERIPHERAL_POLYGON:
            return _cut_state(s, e)
    return None


def cut_bridging(s: LambdaState, e: int) -> SurgeryResult:
    tri = s.triangulation
    if not tri.is_interior(e):
        raise NotABridgingEdge(f"edge {e} is not interior")
    a, b = tri.endpoints(e)
    if a[0] == b[0] or tri.classify(e) is not ArcKind.BRIDGING:
        raise NotABridgingEdge(f"edge {e} does not join two distinct boundary circles")
    return _cut_state(s, e)


# -- structural solver -----------------------------------------------------------


class _Counter:
    def __init__(self, budget: Budget):
        self.budget = budget
        self.nodes = 0
        self.peak = 0


def _polygon_word(s: LambdaState) -> list[int]:
    """Flips taking a disk chart to the triangulation read off its quiddity."""
    tri = s.triangulation
    n = tri.surface.boundaries[0]
    if n == 3:
        return []
    quiddity = [lambda_short_diagonal(s, (0, i)) for i in range(n)]
    target = triangulation_from_quiddity(quiddity)
    word: list[int] = []
    for chord in sorted(target.chords):
        i, j = chord
        while True:
            present = False
            crossing = None
            for t, vs in enumerate(tri.verts):
                for r in range(3):
                    if vs[r] != (0, i):
                        continue
                    x, y = vs[(r + 1) % 3][1], vs[(r + 2) % 3][1]
                    if j in (x, y):
                        present = True
                    elif x != y and chords_cross(chord, _norm(x, y, n)):
                        crossing = tri.sides[t][(r + 1) % 3]
            if present:
                break
            word.append(crossing)
            tri = tri.flip(crossing)
    return word


def _descend(s: LambdaState, ctr: _Counter) -> tuple[LambdaState, list[int]]:
    word = []
    while True:
        ctr.nodes += 1
        for e in s.triangulation.interior:
            if flip_value(s, e) < s.values[e]:
                s = ptolemy_flip(s, e)
                word.append(e)
                break
        else:
            return s, word


def _search(s: LambdaState, goal, ctr: _Counter) -> tuple[LambdaState, list[int]]:
    left = Budget(max(1, ctr.budget.nodes - ctr.nodes), ctr.budget.weight_factor)
    found, word, nodes, peak, err = _best_first(s, goal, left)
    ctr.nodes += nodes
    ctr.peak = max(ctr.peak, peak)
    if found is None:
        if err != "budget":
            raise NonIntegralValue(err)
        raise StructuralAssumptionFailed("search budget exhausted before reaching the target")
    return found, word


def _unit_bridge(s: LambdaState) -> int | None:
    tri = s.triangulation
    for e in tri.interior:
        if s.values[e] == 1:
            a, b = tri.endpoints(e)
            if a[0] != b[0]:
                return e
    return None


def _solve_part(s: LambdaState, ctr: _Counter) -> list[int]:
    if s.is_unitary():
        return []
    red = reduce_once(s)
    if red is not None:
        word = []
        for st in red.states:
            word += _solve_part(st, ctr)
        return word
    b = s.triangulation.surface.b
    if b == 1:
        return _polygon_word(s)
    if b == 2:
        end, word = _descend(s, ctr)
        if end.is_unitary():
            return word
        log.info("greedy descent stalled on %s; falling back to best-first", s.triangulation.surface)
        _, rest = _search(end, LambdaState.is_unitary, ctr)
        return word + rest
    cur, word = _search(s, lambda st: _unit_bridge(st) is not None, ctr)
    surgery = cut_bridging(cur, _unit_bridge(cur))
    (annulus,) = surgery.states
    return word + _solve_part(annulus, ctr)


def solve_structural(s: LambdaState, budget: Budget | None = None) -> SolveReport:
    """Reduce, cut along a unit bridging arc, solve the annulus, fill polygons."""
    budget = budget or Budget()
    problem = _check_input(s)
    if problem:
        return SolveReport(Status.NON_INTEGRAL, detail=problem)
    s = LambdaState(s.triangulation, s.values, strict=True)
    ctr = _Counter(budget)
    ctr.peak = total_weight(s)
    try:
        word = _solve_part(s, ctr)
        end = apply_flip_word(s, word)
    except NonIntegralValue as exc:
        return SolveReport(Status.NON_INTEGRAL, nodes=ctr.nodes, detail=str(exc))
    if not end.is_unitary():
        raise StructuralAssumptionFailed("structural path did not end at an all-ones chart")
    return SolveReport(
        Status.UNITARY_FOUND,
        word=word,
        nodes=ctr.nodes,
        peak_weight=ctr.peak,
        final_key=end.triangulation.canonical_key().hex(),
    )
