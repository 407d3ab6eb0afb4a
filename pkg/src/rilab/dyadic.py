"""Exact dyadic geometry on [0,1].

Cells, step functions, partitions, invertible piecewise-affine measure maps,
and the seeded sampler for the group generated by cell permutations and
within-cell dyadic rotations.  All endpoints and lengths are exact dyadic
rationals; no floating-point geometry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

DEFAULT_LEVEL_CAP = 20


class LevelCapExceeded(RuntimeError):
    """An operation would need dyadic cells finer than the configured cap."""


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


@dataclass(frozen=True)
class DyadicCell:
    """The interval ((k-1)/2^m, k/2^m], closed at 0 when k == 1."""

    level: int
    index: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"negative level {self.level}")
        if not 1 <= self.index <= 2 ** self.level:
            raise ValueError(
                f"index {self.index} out of range 1..2^{self.level}")

    @property
    def left(self) -> Fraction:
        return Fraction(self.index - 1, 2 ** self.level)

    @property
    def right(self) -> Fraction:
        return Fraction(self.index, 2 ** self.level)

    @property
    def length(self) -> Fraction:
        return Fraction(1, 2 ** self.level)

    @property
    def midpoint(self) -> Fraction:
        return Fraction(2 * self.index - 1, 2 ** (self.level + 1))

    def contains(self, other: "DyadicCell") -> bool:
        """Nesting test; dyadic cells are either nested or disjoint."""
        if other.level < self.level:
            return False
        return (other.index - 1) >> (other.level - self.level) == self.index - 1

    def subcell(self, depth: int, offset: int) -> "DyadicCell":
        """The offset-th (0-based) child at `depth` levels below this cell."""
        if depth < 0 or not 0 <= offset < 2 ** depth:
            raise ValueError(f"bad subcell ({depth}, {offset})")
        return DyadicCell(self.level + depth,
                          (self.index - 1) * 2 ** depth + offset + 1)

    def contains_point(self, t: Fraction) -> bool:
        if self.index == 1 and t == 0:
            return True
        return self.left < t <= self.right


def cell_at(t: Fraction, level: int) -> DyadicCell:
    """The level-`level` cell containing t in (0,1] (t=0 goes to the first cell)."""
    if not 0 <= t <= 1:
        raise ValueError(f"point {t} outside [0,1]")
    k = max(_ceil_frac(t * 2 ** level), 1)
    return DyadicCell(level, k)


@dataclass(frozen=True)
class StepFunction:
    """A function constant on the 2^level dyadic cells, value i on cell (level, i)."""

    level: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != 2 ** self.level:
            raise ValueError(
                f"need {2 ** self.level} values at level {self.level}, got {len(self.values)}")

    def refine(self, m: int) -> "StepFunction":
        if m < self.level:
            raise ValueError(f"cannot refine level {self.level} down to {m}")
        rep = 2 ** (m - self.level)
        return StepFunction(m, tuple(v for v in self.values for _ in range(rep)))

    def value_at(self, t: Fraction):
        return self.values[cell_at(Fraction(t), self.level).index - 1]

    def integral(self):
        """Exact when all values are rational, float otherwise."""
        return sum(self.values, start=Fraction(0)) / Fraction(2 ** self.level)

    def to_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values], dtype=float)

    def __abs__(self) -> "StepFunction":
        return StepFunction(self.level, tuple(abs(v) for v in self.values))

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.level, tuple(-v for v in self.values))

    def __add__(self, other: "StepFunction") -> "StepFunction":
        m = max(self.level, other.level)
        a, b = self.refine(m), other.refine(m)
        return StepFunction(m, tuple(x + y for x, y in zip(a.values, b.values)))

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return self + (-other)

    def __mul__(self, scalar) -> "StepFunction":
        return StepFunction(self.level, tuple(scalar * v for v in self.values))

    __rmul__ = __mul__

    def value_length_multiset(self) -> dict:
        """Total length carried by each value; invariant under rearrangement."""
        out: dict = {}
        ell = Fraction(1, 2 ** self.level)
        for v in self.values:
            out[v] = out.get(v, Fraction(0)) + ell
        return out


def pairing(f: StepFunction, g: StepFunction):
    """integral of f*g over [0,1]; exact when both value sets are rational."""
    m = max(f.level, g.level)
    a, b = f.refine(m), g.refine(m)
    return sum((x * y for x, y in zip(a.values, b.values)),
               start=Fraction(0)) / Fraction(2 ** m)


def basis(level: int, i: int) -> StepFunction:
    """Indicator of cell (level, i)."""
    vals = [0] * 2 ** level
    vals[i - 1] = 1
    return StepFunction(level, tuple(vals))


def constant(c=1, level: int = 0) -> StepFunction:
    return StepFunction(level, (c,) * 2 ** level)


def indicator(cell: DyadicCell, level: int | None = None) -> StepFunction:
    level = cell.level if level is None else level
    if level < cell.level:
        raise ValueError("indicator level coarser than the cell")
    return basis(cell.level, cell.index).refine(level)


def prefix_indicator(t: Fraction, level: int | None = None) -> StepFunction:
    """Indicator of [0, t] for a dyadic rational t in (0, 1]."""
    t = Fraction(t)
    if not 0 < t <= 1:
        raise ValueError(f"prefix endpoint {t} outside (0,1]")
    den = t.denominator
    if den & (den - 1):
        raise ValueError(f"non-dyadic prefix endpoint {t}")
    min_level = den.bit_length() - 1
    level = min_level if level is None else level
    if level < min_level:
        raise ValueError(f"level {level} cannot represent endpoint {t}")
    k = int(t * 2 ** level)
    return StepFunction(level, (1,) * k + (0,) * (2 ** level - k))


def validate_partition(cells) -> tuple:
    """Check pairwise-disjoint cells of total length 1; return them sorted."""
    cells = sorted(cells, key=lambda c: c.left)
    if not cells:
        raise ValueError("empty partition")
    cursor = Fraction(0)
    for c in cells:
        if c.left != cursor:
            raise ValueError(f"partition gap/overlap at {cursor} (cell {c})")
        cursor = c.right
    if cursor != 1:
        raise ValueError(f"partition covers only [0,{cursor}]")
    return tuple(cells)


@dataclass(frozen=True)
class MeasureMap:
    """Invertible piecewise-affine map of [0,1]: on each (src, tgt) piece the
    increasing affine bijection src -> tgt, with exact Radon-Nikodym weight
    length(src)/length(tgt) per piece."""

    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple((s, t) for s, t in self.pieces))
        validate_partition([s for s, _ in self.pieces])
        validate_partition([t for _, t in self.pieces])

    @property
    def weights(self) -> tuple:
        return tuple(s.length / t.length for s, t in self.pieces)

    @property
    def src_resolution(self) -> int:
        return max(s.level for s, _ in self.pieces)

    @property
    def tgt_resolution(self) -> int:
        return max(t.level for _, t in self.pieces)

    def map_point(self, t: Fraction) -> Fraction:
        t = Fraction(t)
        for s, g in self.pieces:
            if s.contains_point(t):
                return g.left + (t - s.left) * (g.length / s.length)
        raise ValueError(f"point {t} outside [0,1]")

    def invert(self) -> "MeasureMap":
        return MeasureMap(tuple((t, s) for s, t in self.pieces))

    def is_measure_preserving(self) -> bool:
        return all(w == 1 for w in self.weights)

    def canonical(self, level: int | None = None) -> "MeasureMap":
        """Refine so every src cell sits at a uniform level, sorted by position."""
        level = self.src_resolution if level is None else level
        out = []
        for s, t in self.pieces:
            d = level - s.level
            if d < 0:
                raise ValueError("canonical level coarser than a src cell")
            for r in range(2 ** d):
                out.append((s.subcell(d, r), t.subcell(d, r)))
        out.sort(key=lambda p: p[0].index)
        return MeasureMap(tuple(out))

    def to_text(self) -> str:
        return "\n".join(f"{s.level} {s.index} {t.level} {t.index}"
                         for s, t in self.pieces) + "\n"

    @staticmethod
    def from_text(text: str) -> "MeasureMap":
        pieces = []
        for line in text.strip().splitlines():
            if not line.strip():
                continue
            sl, si, tl, ti = (int(tok) for tok in line.split())
            pieces.append((DyadicCell(sl, si), DyadicCell(tl, ti)))
        return MeasureMap(tuple(pieces))


def identity_map(level: int = 0) -> MeasureMap:
    return MeasureMap(tuple((DyadicCell(level, k), DyadicCell(level, k))
                            for k in range(1, 2 ** level + 1)))


def swap_halves() -> MeasureMap:
    return MeasureMap(((DyadicCell(1, 1), DyadicCell(1, 2)),
                       (DyadicCell(1, 2), DyadicCell(1, 1))))


def maps_equal(a: MeasureMap, b: MeasureMap) -> bool:
    m = max(a.src_resolution, b.src_resolution)
    return a.canonical(m).pieces == b.canonical(m).pieces


def compose_maps_traced(first: MeasureMap, second: MeasureMap,
                        level_cap: int = DEFAULT_LEVEL_CAP):
    """The map s -> second(first(s)) plus, per new piece, the source piece
    indices (i in first, j in second) it was cut from."""
    pieces, trace = [], []
    for i, (s1, t1) in enumerate(first.pieces):
        for j, (s2, t2) in enumerate(second.pieces):
            if s2.contains(t1):
                d = t1.level - s2.level
                r = t1.index - 1 - (s2.index - 1) * 2 ** d
                new = (s1, t2.subcell(d, r))
            elif t1.contains(s2) and s2.level > t1.level:
                d = s2.level - t1.level
                r = s2.index - 1 - (t1.index - 1) * 2 ** d
                new = (s1.subcell(d, r), t2)
            else:
                continue
            if new[0].level > level_cap or new[1].level > level_cap:
                raise LevelCapExceeded(
                    f"composition needs level beyond cap {level_cap}")
            pieces.append(new)
            trace.append((i, j))
    order = sorted(range(len(pieces)), key=lambda k: pieces[k][0].left)
    pieces = tuple(pieces[k] for k in order)
    trace = [trace[k] for k in order]
    return MeasureMap(pieces), trace


def compose_maps(first: MeasureMap, second: MeasureMap,
                 level_cap: int = DEFAULT_LEVEL_CAP) -> MeasureMap:
    return compose_maps_traced(first, second, level_cap)[0]


def compose_with_map(f: StepFunction, sigma: MeasureMap,
                     level_cap: int = DEFAULT_LEVEL_CAP) -> StepFunction:
    """f composed with sigma: value on src piece i is f's value on tgt piece i,
    refined internally so each tgt piece meets cells where f is constant."""
    depths = [max(f.level - t.level, 0) for _, t in sigma.pieces]
    out_level = max(s.level + d for (s, _), d in zip(sigma.pieces, depths))
    if out_level > level_cap:
        raise LevelCapExceeded(f"composition needs level {out_level} > cap {level_cap}")
    values = [None] * 2 ** out_level
    for (s, t), d in zip(sigma.pieces, depths):
        rep = 2 ** (out_level - s.level - d)
        base = (s.index - 1) * 2 ** (out_level - s.level)
        for r in range(2 ** d):
            sub = t.subcell(d, r)  # sub.level >= f.level by the depth choice
            v = f.values[(sub.index - 1) >> (sub.level - f.level)]
            for q in range(rep):
                values[base + r * rep + q] = v
    return StepFunction(out_level, tuple(values))


def cell_rotation_map(level: int, finer: int, shifts, perm) -> MeasureMap:
    """Permute the 2^level cells by `perm` (0-based, cell k -> cell perm[k]) and
    rotate within each target cell by shifts[target] subcells at resolution
    `finer`.  Always measure-preserving."""
    if finer < level:
        raise ValueError(f"finer {finer} < level {level}")
    n, sub = 2 ** level, 2 ** (finer - level)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise ValueError("perm is not a permutation")
    pieces = []
    for k in range(n):
        tgt_cell = perm[k]
        shift = int(shifts[tgt_cell]) % sub
        for r in range(sub):
            src = DyadicCell(finer, k * sub + r + 1)
            tgt = DyadicCell(finer, tgt_cell * sub + (r + shift) % sub + 1)
            pieces.append((src, tgt))
    return MeasureMap(tuple(pieces))


def random_automorphism(level: int, finer: int, seed: int) -> MeasureMap:
    """Seeded sample from the group of cell permutations composed with
    independent uniform dyadic rotations inside each cell (PCG64 stream)."""
    if finer < level:
        raise ValueError(f"finer {finer} < level {level}")
    rng = np.random.Generator(np.random.PCG64(seed))
    n, sub = 2 ** level, 2 ** (finer - level)
    perm = rng.permutation(n)
    shifts = rng.integers(0, sub, size=n)
    return cell_rotation_map(level, finer, shifts, perm)
