"""Conway--Coxeter friezes of type A.

A frieze is stored as a table of values on the chords of an ``N``-gon
(``N = n + 3``): the entry in row ``r``, column ``i`` of the usual frieze
grid is the value of chord ``{i, i + r + 1}``.  Periodicity and the glide
reflection are then properties of the table that can be checked, not
bookkeeping that has to be maintained.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import InvalidQuiddity


def _norm(i: int, j: int, n: int) -> tuple[int, int]:
    i, j = i % n, j % n
    if i == j:
        raise ValueError(f"degenerate chord ({i}, {j})")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class QuiddityCycle:
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if len(self.entries) < 3:
            raise InvalidQuiddity("a quiddity cycle needs at least 3 entries")
        if any(x < 1 for x in self.entries):
            raise InvalidQuiddity("quiddity entries must be positive integers")

    @classmethod
    def parse(cls, text: str) -> "QuiddityCycle":
        try:
            values = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
        except ValueError as exc:
            raise InvalidQuiddity(f"cannot parse quiddity {text!r}") from exc
        return cls(values)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i % len(self.entries)]

    def __str__(self) -> str:
        return ",".join(map(str, self.entries))


@dataclass(frozen=True)
class PolygonTriangulation:
    n: int
    chords: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("polygon needs at least 3 vertices")
        chords = frozenset(_norm(i, j, self.n) for i, j in self.chords)
        for i, j in chords:
            if (j - i) % self.n in (1, self.n - 1):
                raise ValueError(f"({i}, {j}) is a side, not a chord")
        if len(chords) != self.n - 3:
            raise ValueError(f"expected {self.n - 3} chords, got {len(chords)}")
        for c, d in itertools.combinations(chords, 2):
            if chords_cross(c, d):
                raise ValueError(f"chords {c} and {d} cross")
        object.__setattr__(self, "chords", chords)

    def triangles(self) -> list[tuple[int, int, int]]:
        """Triangles as sorted vertex triples."""
        adj = {v: {(v - 1) % self.n, (v + 1) % self.n} for v in range(self.n)}
        for i, j in self.chords:
            adj[i].add(j)
            adj[j].add(i)
        out = set()
        for a in range(self.n):
            for b in adj[a]:
                for c in adj[a] & adj[b]:
                    out.add(tuple(sorted((a, b, c))))
        return sorted(out)

    def to_json(self) -> dict:
        return {"n": self.n, "chords": sorted([list(c) for c in self.chords])}

    @classmethod
    def from_json(cls, data: dict) -> "PolygonTriangulation":
        return cls(int(data["n"]), frozenset(tuple(c) for c in data["chords"]))


def chords_cross(c: tuple[int, int], d: tuple[int, int]) -> bool:
    """True if two chords (given with ``i < j``) interleave strictly."""
    (a, b), (x, y) = c, d
    return (a < x < b < y) or (x < a < y < b)


def all_triangulations(n: int) -> Iterator[PolygonTriangulation]:
    """Every triangulation of the ``n``-gon, by splitting along the triangle on side (0, n-1)."""

    def rec(lo: int, hi: int) -> Iterator[frozenset]:
        if hi - lo < 2:
            yield frozenset()
            return
        for k in range(lo + 1, hi):
            own = set()
            if k - lo >= 2:
                own.add((lo, k))
            if hi - k >= 2:
                own.add((k, hi))
            for left in rec(lo, k):
                for right in rec(k, hi):
                    yield frozenset(own) | left | right

    for chords in rec(0, n - 1):
        yield PolygonTriangulation(n, chords)


def quiddity_from_triangulation(t: PolygonTriangulation) -> QuiddityCycle:
    counts = [0] * t.n
    for tri in t.triangles():
        for v in tri:
            counts[v] += 1
    return QuiddityCycle(counts)


def triangulation_from_quiddity(q: QuiddityCycle | Sequence[int]) -> PolygonTriangulation:
    """Invert the Conway--Coxeter bijection by repeatedly cutting ears.

    The ear with the smallest original vertex index is always cut first.
    """
    if not isinstance(q, QuiddityCycle):
        q = QuiddityCycle(q)
    n = len(q)
    alive = list(range(n))
    vals = dict(enumerate(q.entries))
    chords = set()
    while len(alive) > 3:
        ear = next((v for v in alive if vals[v] == 1), None)
        if ear is None:
            raise InvalidQuiddity(
                f"no ear left among {len(alive)} remaining vertices "
                f"({','.join(str(vals[v]) for v in alive)})"
            )
        pos = alive.index(ear)
        left, right = alive[pos - 1], alive[(pos + 1) % len(alive)]
        vals[left] -= 1
        vals[right] -= 1
        if vals[left] < 1 or vals[right] < 1:
            raise InvalidQuiddity(f"cutting ear at vertex {ear} exhausts a neighbour")
        chords.add(_norm(left, right, n))
        alive.remove(ear)
    if any(vals[v] != 1 for v in alive):
        raise InvalidQuiddity(
            "final triangle has quiddity " + ",".join(str(vals[v]) for v in alive)
        )
    return PolygonTriangulation(n, frozenset(chords))


def is_valid_quiddity(q: QuiddityCycle | Sequence[int]) -> bool:
    try:
        triangulation_from_quiddity(q)
    except InvalidQuiddity:
        return False
    return True


class ChordTable:
    """Frieze values on all chords and sides of an ``N``-gon."""

    def __init__(self, n: int, values: dict[tuple[int, int], int]):
        self.n = n
        self._values = {_norm(i, j, n): v for (i, j), v in values.items()}

    def __getitem__(self, chord: tuple[int, int]) -> int:
        i, j = chord
        return self._values[_norm(i, j, self.n)]

    def __eq__(self, other) -> bool:
        return isinstance(other, ChordTable) and self.n == other.n and self._values == other._values

    def items(self):
        return sorted(self._values.items())

    def diagonal_values(self) -> list[int]:
        """Values on the ``N(N-3)/2`` diagonals (sides excluded), sorted."""
        return sorted(
            v for (i, j), v in self._values.items() if (j - i) % self.n not in (1, self.n - 1)
        )

    def quiddity(self) -> QuiddityCycle:
        return QuiddityCycle([self[(i - 1, i + 1)] for i in range(self.n)])

    def entry(self, row: int, col: int) -> int:
        """Grid entry; row 0 and row ``N - 2`` are the rows of 1's."""
        return self[(col, col + row + 1)]

    def rows(self, width: int | None = None) -> list[list[int]]:
        width = self.n if width is None else width
        return [[self.entry(r, c) for c in range(width)] for r in range(self.n - 1)]

    def diamond_violations(self, width: int | None = None) -> list[tuple[int, int]]:
        """Positions ``(row, col)`` of diamonds with ``bc - ad != 1``."""
        width = self.n if width is None else width
        bad = []
        for r in range(1, self.n - 2):
            for c in range(width):
                b, cc = self.entry(r, c), self.entry(r, c + 1)
                a, d = self.entry(r - 1, c + 1), self.entry(r + 1, c)
                if b * cc - a * d != 1:
                    bad.append((r, c))
        return bad

    def ptolemy_violations(self) -> list[tuple[int, int, int, int]]:
        bad = []
        for i, j, k, l in itertools.combinations(range(self.n), 4):
            lhs = self[(i, k)] * self[(j, l)]
            rhs = self[(i, j)] * self[(k, l)] + self[(j, k)] * self[(i, l)]
            if lhs != rhs:
                bad.append((i, j, k, l))
        return bad

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "chords": [[i, j, v] for (i, j), v in self.items()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    def grid_text(self, width: int | None = None) -> str:
        """Staggered frieze layout; the quiddity row starts with ``q_0``."""
        width = self.n if width is None else width
        rows = []
        for r in range(self.n - 1):
            c0 = -((r + 1) // 2)
            rows.append([self.entry(r, c0 + c) for c in range(width)])
        cell = max(len(str(v)) for row in rows for v in row) + 1
        cell += cell % 2
        lines = []
        for r, row in enumerate(rows):
            pad = " " * (cell // 2 if r % 2 == 0 else 0)
            lines.append((pad + "".join(str(v).rjust(cell) for v in row)).rstrip())
        return "\n".join(lines)


def frieze_from_quiddity(q: QuiddityCycle | Sequence[int]) -> ChordTable:
    """Build the chord table from a quiddity cycle via the continuant recurrence.

    ``value{i, j+1} = q_j * value{i, j} - value{i, j-1}`` starting from
    ``value{i, i} = 0`` and ``value{i, i+1} = 1``.  Raises
    :class:`InvalidQuiddity` on the first non-positive value, the first chord
    ``{i, i+N-1}`` whose value is not 1, or an asymmetric table.
    """
    if not isinstance(q, QuiddityCycle):
        q = QuiddityCycle(q)
    n = len(q)
    if n < 4:
        if n == 3 and q.entries == (1, 1, 1):
            return ChordTable(3, {(0, 1): 1, (1, 2): 1, (0, 2): 1})
        raise InvalidQuiddity(f"quiddity {q} does not describe a frieze", None)
    raw: dict[tuple[int, int], int] = {}
    for i in range(n):
        prev, cur = 0, 1
        for j in range(i + 1, i + n):
            if cur <= 0:
                raise InvalidQuiddity(
                    f"value{{{i},{j % n}}} = {cur} is not positive", _norm(i, j, n)
                )
            raw[(i, j)] = cur
            prev, cur = cur, q[j] * cur - prev
        if raw[(i, i + n - 1)] != 1:
            last = _norm(i, i + n - 1, n)
            raise InvalidQuiddity(
                f"closure fails: value{{{i},{(i + n - 1) % n}}} = {raw[(i, i + n - 1)]} != 1",
                last,
            )
    table: dict[tuple[int, int], int] = {}
    for (i, j), v in raw.items():
        key = _norm(i, j, n)
        if table.setdefault(key, v) != v:
            raise InvalidQuiddity(f"chord {key} gets two different values", key)
    return ChordTable(n, table)


def frieze_from_triangulation(t: PolygonTriangulation) -> ChordTable:
    return frieze_from_quiddity(quiddity_from_triangulation(t))


@dataclass(frozen=True)
class Symmetries:
    period: int
    glide: bool


def frieze_symmetries(f: ChordTable) -> Symmetries:
    n = f.n
    chords = [c for c, _ in f.items()]
    period = next(
        p for p in range(1, n + 1) if all(f[c] == f[(c[0] + p, c[1] + p)] for c in chords)
    )
    # glide reflection of the grid: entry(r, c) == entry(N-2-r, c+r+1)
    glide = all(
        f.entry(r, c) == f.entry(n - 2 - r, c + r + 1)
        for r in range(n - 1)
        for c in range(n)
    )
    return Symmetries(period=period, glide=glide)
