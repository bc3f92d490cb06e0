"""Exact lambda-lengths on triangulated surfaces, transported by Ptolemy flips."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Mapping

from .cluster import Value, format_value, parse_value
from .errors import InvalidState, NonIntegralValue, UndefinedShortDiagonal
from .surface import Triangulation, Vertex


def _exact(v) -> Value:
    if isinstance(v, bool):
        raise InvalidState("boolean is not a lambda-length")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, str):
        return parse_value(v)
    raise InvalidState(f"{v!r} is not an exact rational")


class LambdaState:
    """A triangulation with a value on every edge, boundary segments included.

    Boundary values default to 1 and are never changed by flips.  In strict
    mode every flip must produce an integer.
    """

    __slots__ = ("triangulation", "values", "strict")

    def __init__(self, triangulation: Triangulation, values: Mapping[int, Value], strict: bool = True):
        self.triangulation = triangulation
        self.values = dict(values)
        self.strict = strict

    @classmethod
    def init(
        cls,
        tri: Triangulation,
        values: Mapping[int, object] | None = None,
        boundary: Mapping[int, object] | None = None,
        strict: bool = True,
    ) -> "LambdaState":
        """Validated constructor.  ``values`` covers interior edges (default all 1)."""
        vals: dict[int, Value] = {}
        given = dict(values) if values is not None else {e: 1 for e in tri.interior}
        for e in tri.interior:
            if e not in given:
                raise InvalidState(f"no value for interior edge {e}")
            vals[e] = _exact(given[e])
        extra = set(given) - set(tri.interior)
        if extra:
            raise InvalidState(f"values given for non-interior edges {sorted(extra)}")
        bvals = dict(boundary or {})
        unknown = set(bvals) - set(tri.boundary)
        if unknown:
            raise InvalidState(f"boundary overrides for unknown edges {sorted(unknown)}")
        for e in tri.boundary:
            vals[e] = _exact(bvals.get(e, 1))
        for e, v in vals.items():
            if v <= 0:
                raise InvalidState(f"value of edge {e} is {v}, not positive")
            if strict and not isinstance(v, int):
                raise InvalidState(f"value of edge {e} is {v}, not an integer")
        return cls(tri, vals, strict)

    @classmethod
    def unitary(cls, tri: Triangulation, strict: bool = True) -> "LambdaState":
        return cls(tri, {e: 1 for e in tri.inc}, strict)

    def __getitem__(self, e: int) -> Value:
        return self.values[e]

    def interior_values(self) -> list[Value]:
        return [self.values[e] for e in self.triangulation.interior]

    def is_unitary(self) -> bool:
        return all(self.values[e] == 1 for e in self.triangulation.interior)

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for v in self.values.values())

    def boundary_values(self) -> dict[int, Value]:
        return {e: self.values[e] for e in sorted(self.triangulation.boundary)}

    def search_key(self) -> tuple:
        """Canonical map key plus interior values in canonical edge order."""
        key, order = self.triangulation.canonical_form()
        return key, tuple(self.values[e] for e in order)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LambdaState)
            and self.triangulation == other.triangulation
            and self.values == other.values
        )

    def __repr__(self) -> str:
        return f"LambdaState({self.triangulation.surface}, weight={total_weight(self)})"

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        data = {"schemaVersion": 1, "triangulation": self.triangulation.to_json()}
        data["values"] = {str(e): format_value(self.values[e]) for e in self.triangulation.interior}
        data["boundary"] = {
            str(e): format_value(self.values[e]) for e in sorted(self.triangulation.boundary)
        }
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict, strict: bool = True) -> "LambdaState":
        try:
            tri = Triangulation.from_json(data["triangulation"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidState(f"malformed triangulation: {exc}") from exc
        try:
            values = {int(k): v for k, v in data.get("values", {}).items()}
            boundary = {int(k): v for k, v in data.get("boundary", {}).items()}
        except (AttributeError, ValueError) as exc:
            raise InvalidState(f"malformed value table: {exc}") from exc
        try:
            return cls.init(tri, values, boundary, strict=strict)
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, InvalidState):
                raise
            raise InvalidState(str(exc)) from exc


def init_state(tri, values=None, boundary=None, strict: bool = True) -> LambdaState:
    return LambdaState.init(tri, values, boundary, strict)


def flip_value(s: LambdaState, e: int) -> Value:
    """Value of the diagonal that would replace ``e``."""
    a, b, c, d = s.triangulation.quadrilateral(e).sides
    v = s.values
    num = v[a] * v[c] + v[b] * v[d]
    den = v[e]
    if isinstance(num, int) and isinstance(den, int):
        q, r = divmod(num, den)
        if r == 0:
            return q
        if s.strict:
            raise NonIntegralValue(f"flipping edge {e} gives {Fraction(num, den)}")
        return Fraction(num, den)
    out = Fraction(num) / den
    if out.denominator == 1:
        return out.numerator
    if s.strict:
        raise NonIntegralValue(f"flipping edge {e} gives {out}")
    return out


def ptolemy_flip(s: LambdaState, e: int) -> LambdaState:
    new = flip_value(s, e)
    values = dict(s.values)
    values[e] = new
    return LambdaState(s.triangulation.flip(e), values, s.strict)


def apply_flip_word(s: LambdaState, word: Iterable[int]) -> LambdaState:
    for e in word:
        s = ptolemy_flip(s, e)
    return s


def total_weight(s: LambdaState) -> Value:
    return sum(s.values[e] for e in s.triangulation.interior)


def _reduce_fan(s: LambdaState, w: Vertex, order=min) -> LambdaState:
    while s.triangulation.corners_at(w) > 1:
        edges = s.triangulation.edges_at(w)
        s = ptolemy_flip(s, order(edges))
    return s


def lambda_short_diagonal(s: LambdaState, w: Vertex, order=min) -> Value:
    """Value of the arc cutting off the two boundary segments at ``w``.

    Flips edges incident to ``w`` (chosen by ``order``, smallest id by default)
    on a scratch copy until one triangle remains at ``w``; the side of that
    triangle opposite ``w`` is the short diagonal.
    """
    tri = s.triangulation
    c = w[0]
    if not 0 <= c < len(tri.surface.boundaries) or not 0 <= w[1] < tri.surface.boundaries[c]:
        raise ValueError(f"unknown marked point {w}")
    if tri.surface.boundaries[c] < 2:
        raise UndefinedShortDiagonal(f"circle {c} has a single marked point")
    scratch = LambdaState(tri, s.values, strict=False)
    scratch = _reduce_fan(scratch, w, order)
    t2 = scratch.triangulation
    for t, tri_v in enumerate(t2.verts):
        for r in range(3):
            if tri_v[r] == w:
                return scratch.values[t2.sides[t][(r + 1) % 3]]
    raise AssertionError("vertex vanished from triangulation")


def arc_value_after(s: LambdaState, word: Iterable[int]) -> Value:
    """Value of the last edge flipped by ``word``: a way to address an arc by flips."""
    word = list(word)
    if not word:
        raise ValueError("empty word addresses no arc")
    scratch = apply_flip_word(LambdaState(s.triangulation, s.values, strict=False), word)
    return scratch.values[word[-1]]
