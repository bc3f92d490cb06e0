"""Valued cluster seeds, mutation, and friezes as homomorphisms to the integers.

A :class:`ValuedSeed` is a labeled quiver together with one exact positive
rational per vertex; it is a frieze homomorphism restricted to a single
cluster.  Mutation uses the skew-symmetric exchange relation

    x_k * x_k' = prod(x_i for arrows i -> k) + prod(x_j for arrows k -> j).

Distinct cluster variables can share a frieze value, so every seed also
carries a *shadow*: the same variables evaluated at a fixed generic point.
The shadow tells clusters apart when counting; it never influences the frieze
values themselves.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import MalformedGrid, NonIntegralValue

Value = int | Fraction


def _clean(x: Fraction) -> Value:
    return x.numerator if x.denominator == 1 else x


def parse_value(token: str) -> Value:
    return _clean(Fraction(token.strip()))


def format_value(x: Value) -> str:
    return str(x)


class Quiver:
    """A quiver without loops or 2-cycles, stored as its exchange matrix.

    ``b[i][j]`` is the number of arrows ``i -> j`` minus the number ``j -> i``.
    """

    __slots__ = ("b",)

    def __init__(self, b: Sequence[Sequence[int]]):
        b = tuple(tuple(int(x) for x in row) for row in b)
        n = len(b)
        for i in range(n):
            if len(b[i]) != n:
                raise ValueError("exchange matrix must be square")
            if b[i][i] != 0:
                raise ValueError("loops are not allowed")
            for j in range(n):
                if b[i][j] != -b[j][i]:
                    raise ValueError("exchange matrix must be skew-symmetric")
        self.b = b

    @classmethod
    def from_arrows(cls, n: int, arrows: Iterable[tuple[int, int]]) -> "Quiver":
        b = [[0] * n for _ in range(n)]
        pairs = list(arrows)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"arrow {i}->{j} out of range")
            if i == j:
                raise ValueError(f"loop at vertex {i}")
            if (j, i) in pairs:
                raise ValueError(f"2-cycle between {i} and {j}")
            b[i][j] += 1
            b[j][i] -= 1
        return cls(b)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "Quiver":
        """Parse ``"1>2,2>3"`` (1-based vertex labels)."""
        arrows = []
        for tok in text.replace(" ", "").split(","):
            if not tok:
                continue
            a, _, c = tok.partition(">")
            if not c:
                raise ValueError(f"arrow {tok!r} is not of the form i>j")
            arrows.append((int(a) - 1, int(c) - 1))
        if n is None:
            n = max((max(a) for a in arrows), default=-1) + 1
        return cls.from_arrows(n, arrows)

    @property
    def n(self) -> int:
        return len(self.b)

    def arrows(self) -> list[tuple[int, int]]:
        """Arrow multiset as a sorted list of pairs (repeated by multiplicity)."""
        out = []
        for i in range(self.n):
            for j in range(self.n):
                out.extend([(i, j)] * max(self.b[i][j], 0))
        return out

    def mutate(self, k: int) -> "Quiver":
        return mutate_quiver(self, k)

    def __eq__(self, other) -> bool:
        return isinstance(other, Quiver) and self.b == other.b

    def __hash__(self) -> int:
        return hash(self.b)

    def __repr__(self) -> str:
        return f"Quiver({self.n}, {self.arrows()})"


def mutate_quiver(q: Quiver, k: int) -> Quiver:
    n = q.n
    if not 0 <= k < n:
        raise IndexError(f"vertex {k} out of range for a quiver on {n} vertices")
    b = q.b
    out = [list(row) for row in b]
    for i in range(n):
        for j in range(n):
            if i == k or j == k:
                out[i][j] = -b[i][j]
            elif b[i][k] * b[k][j] > 0:
                sign = 1 if b[i][k] > 0 else -1
                out[i][j] = b[i][j] + sign * b[i][k] * b[k][j]
    return Quiver(out)


def _exchange(b, values: Sequence[Value], k: int) -> Fraction:
    into = out = 1
    for i, v in enumerate(values):
        m = b[i][k]
        if m > 0:
            into *= v**m
        elif m < 0:
            out *= v ** (-m)
    return Fraction(into + out) / values[k]


def _generic_point(n: int) -> tuple[Fraction, ...]:
    primes = [p for p in range(101, 2000) if all(p % d for d in range(2, int(p**0.5) + 1))]
    return tuple(Fraction(primes[2 * i], primes[2 * i + 1] - 90) for i in range(n))


@dataclass(frozen=True)
class ValuedSeed:
    quiver: Quiver
    values: tuple[Value, ...]
    shadow: tuple[Fraction, ...] = field(default=(), compare=False)

    def __post_init__(self):
        vals = tuple(_clean(Fraction(v)) for v in self.values)
        if len(vals) != self.quiver.n:
            raise ValueError("one value per quiver vertex is required")
        if any(v <= 0 for v in vals):
            raise ValueError("seed values must be positive")
        object.__setattr__(self, "values", vals)
        if not self.shadow:
            object.__setattr__(self, "shadow", _generic_point(self.quiver.n))

    @property
    def n(self) -> int:
        return self.quiver.n

    def key(self) -> tuple:
        """Labeled seed identity: exchange matrix plus generic-point variables."""
        return (self.quiver.b, self.shadow)

    def cluster(self) -> frozenset:
        return frozenset(self.shadow)

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for v in self.values)

    def is_unit(self) -> bool:
        return all(v == 1 for v in self.values)

    def mutate(self, k: int, strict: bool = False) -> "ValuedSeed":
        return mutate_values(self, k, strict=strict)


def mutate_values(s: ValuedSeed, k: int, strict: bool = False) -> ValuedSeed:
    """Mutate the seed at ``k``; in strict mode a non-integer value raises."""
    b = s.quiver.b
    new = _clean(_exchange(b, s.values, k))
    if strict and not isinstance(new, int):
        raise NonIntegralValue(f"mutation at vertex {k} gives {new}")
    values = s.values[:k] + (new,) + s.values[k + 1 :]
    shadow = s.shadow[:k] + (_exchange(b, s.shadow, k),) + s.shadow[k + 1 :]
    return ValuedSeed(mutate_quiver(s.quiver, k), values, shadow)


@dataclass
class ClusterAtlas:
    seeds: int
    clusters: int
    closed: bool
    positive_integral: bool
    variables: dict
    unitary_word: tuple[int, ...] | None

    @property
    def status(self) -> str:
        return "closure" if self.closed else "budget-exhausted"

    def variable_values(self) -> list[Value]:
        return sorted(self.variables.values())


def explore_clusters(s: ValuedSeed, budget: int = 100_000) -> ClusterAtlas:
    """Breadth-first closure of the labeled exchange graph from ``s``.

    Stops when the frontier is empty (finite type) or after ``budget`` labeled
    seeds.  Mutation order is vertex order, so the result is deterministic.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    start = s
    seen = {start.key(): ()}
    queue = deque([start])
    clusters = {start.cluster()}
    variables = dict(zip(start.shadow, start.values))
    positive = start.is_integral()
    witness = () if start.is_unit() else None
    closed = True
    while queue:
        seed = queue.popleft()
        word = seen[seed.key()]
        for k in range(seed.n):
            nxt = mutate_values(seed, k)
            key = nxt.key()
            if key in seen:
                continue
            if len(seen) >= budget:
                closed = False
                queue.clear()
                break
            seen[key] = word + (k,)
            queue.append(nxt)
            clusters.add(nxt.cluster())
            variables.setdefault(nxt.shadow[k], nxt.values[k])
            if not isinstance(nxt.values[k], int):
                positive = False
            if witness is None and nxt.is_unit():
                witness = word + (k,)
    return ClusterAtlas(
        seeds=len(seen),
        clusters=len(clusters),
        closed=closed,
        positive_integral=positive,
        variables=variables,
        unitary_word=witness,
    )


@dataclass(frozen=True)
class UnitaryVerdict:
    word: tuple[int, ...] | None
    closed: bool

    @property
    def unitary(self) -> bool | None:
        """True, False (closure reached without witness) or None (unknown)."""
        if self.word is not None:
            return True
        return False if self.closed else None


def is_unitary(s: ValuedSeed, budget: int = 100_000) -> UnitaryVerdict:
    atlas = explore_clusters(s, budget)
    return UnitaryVerdict(atlas.unitary_word, atlas.closed)


def replay(s: ValuedSeed, word: Iterable[int]) -> ValuedSeed:
    for k in word:
        s = mutate_values(s, k)
    return s


# -- mesh rules ---------------------------------------------------------------


@dataclass(frozen=True)
class MeshGrid:
    """A finite piece of a frieze on the repetition quiver of type A_n or D_n.

    ``rows[r][t]`` sits at column ``2t + offset(r)``; ``None`` marks a gap.
    Type A grids have ``n + 2`` rows (first and last all 1's).  Type D grids
    have ``n + 1`` rows: a row of 1's, the chain rows, then the two leg rows,
    which share the offset of the branch row's neighbours.
    """

    kind: str
    rank: int
    rows: tuple[tuple[Value | None, ...], ...]

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind not in ("A", "D"):
            raise MalformedGrid(f"unsupported mesh type {self.kind!r}")
        if kind == "D" and self.rank < 4:
            raise MalformedGrid("type D needs rank at least 4")
        if self.rank < 1:
            raise MalformedGrid("rank must be positive")
        expected = self.rank + 2 if kind == "A" else self.rank + 1
        if len(self.rows) != expected:
            raise MalformedGrid(
                f"type {kind}{self.rank} needs {expected} rows, got {len(self.rows)}"
            )
        widths = {len(r) for r in self.rows}
        if len(widths) != 1:
            raise MalformedGrid("all rows must have the same number of entries")

    def offset(self, r: int) -> int:
        if self.kind == "D" and r == self.rank:
            return (self.rank - 1) % 2
        return r % 2

    def at(self, r: int, col: int) -> Value | None:
        if not 0 <= r < len(self.rows):
            return None
        t, rem = divmod(col - self.offset(r), 2)
        if rem or not 0 <= t < len(self.rows[r]):
            return None
        return self.rows[r][t]

    @classmethod
    def parse(cls, text: str) -> "MeshGrid":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines:
            raise MalformedGrid("empty grid file")
        head = lines[0].replace(" ", "")
        kind, rank = head[:1], head[1:]
        if not rank.isdigit():
            raise MalformedGrid(f"header {lines[0]!r} must name a type and rank, e.g. 'D4'")
        rows = []
        for ln in lines[1:]:
            row = []
            for tok in ln.split():
                try:
                    row.append(None if tok == "." else parse_value(tok))
                except (ValueError, ZeroDivisionError) as exc:
                    raise MalformedGrid(f"bad entry {tok!r}") from exc
            rows.append(tuple(row))
        return cls(kind, int(rank), tuple(rows))

    def dumps(self) -> str:
        out = [f"{self.kind}{self.rank}"]
        for r, row in enumerate(self.rows):
            pad = " " * self.offset(r)
            out.append(pad + " ".join("." if v is None else str(v) for v in row))
        return "\n".join(out) + "\n"


@dataclass(frozen=True)
class MeshViolation:
    row: int
    col: int
    kind: str
    lhs: Value

    def to_json(self) -> dict:
        return {"row": self.row, "col": self.col, "kind": self.kind, "value": str(self.lhs)}


def check_mesh_rules(grid: MeshGrid) -> list[MeshViolation]:
    """All meshes whose identity fails; meshes touching a gap are skipped.

    Each mesh is anchored at row ``r`` and the pair of columns ``(c, c+2)``;
    the identity is ``x(r,c) * x(r,c+2) - prod(middle neighbours) == 1``.
    """
    bad = []
    mesh_rows = range(1, grid.rank + 1)
    width = 2 * len(grid.rows[0]) + 2
    for r in mesh_rows:
        middle = _mesh_neighbours(grid, r)
        for c in range(-1, width):
            left, right = grid.at(r, c), grid.at(r, c + 2)
            mids = [grid.at(m, c + 1) for m in middle]
            if left is None or right is None or any(v is None for v in mids):
                continue
            prod = 1
            for v in mids:
                prod *= v
            lhs = left * right - prod
            if lhs != 1:
                bad.append(MeshViolation(r, c, _mesh_kind(grid, r), lhs))
    return bad


def _mesh_neighbours(grid: MeshGrid, r: int) -> list[int]:
    n = grid.rank
    if grid.kind == "A":
        return [r - 1, r + 1]
    branch = n - 2
    if r < branch:
        return [r - 1, r + 1]
    if r == branch:
        return [r - 1, n - 1, n]
    return [branch]


def _mesh_kind(grid: MeshGrid, r: int) -> str:
    if grid.kind == "A" or r < grid.rank - 2:
        return "diamond"
    return "branch" if r == grid.rank - 2 else "leg"


def grid_from_chord_table(table) -> MeshGrid:
    """Type A mesh grid from a Conway--Coxeter chord table (one period)."""
    n = table.n
    rank = n - 3
    rows = []
    width = n + rank + 1
    for r in range(rank + 2):
        row = []
        for t in range(width):
            # chord-table entry (r, i) sits at column 2i + r
            row.append(table.entry(r, t - r // 2))
        rows.append(tuple(row))
    return MeshGrid("A", rank, tuple(rows))


D4_FRIEZE_GRID = MeshGrid(
    "D",
    4,
    (
        (1, 1, 1, 1),
        (2, 2, 2, 2),
        (3, 3, 3, 3),
        (2, 2, 2, 2),
        (2, 2, 2, 2),
    ),
)


def star_quiver(leaves: int = 3) -> Quiver:
    """Leaves ``0..leaves-1`` each with one arrow into the centre (last vertex)."""
    return Quiver.from_arrows(leaves + 1, [(i, leaves) for i in range(leaves)])


def linear_a_quiver(n: int) -> Quiver:
    return Quiver.from_arrows(n, [(i, i + 1) for i in range(n - 1)])


def iter_mutation_words(n: int, length: int):
    return itertools.product(range(n), repeat=length)
