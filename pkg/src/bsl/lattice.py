"""p-adic decompositions of the disc, Carleson boxes, and the plane grid.

Two disc families are provided because the two standard displays use
different angular steps, and both are needed:

* ``dyadic`` (p-adic): level n >= 1 splits the annulus
  ``1 - p^-n <= |z| < 1 - p^-(n+1)`` into ``p^(n+1)`` half-open sectors of
  width ``2 pi / p^(n+1)``;
* ``carleson`` (p = 2 only): the same annuli but only ``2^n`` sectors of
  width ``2 pi / 2^n``, paired with the Carleson boxes ``W_{n,j}`` that
  extend all the way to the unit circle.

For the Fock plane the lattice is the unit-square grid centred on Gauss
integers.  Cells carry exact areas and geometric (r, theta)-midpoints, and
all interval conventions are half-open so that ``locate`` is a genuine
partition map.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

DYADIC = "dyadic"
CARLESON_CELL = "carleson_cell"
CARLESON_BOX = "carleson_box"
PLANE_SQUARE = "plane_square"

#: hard cap on enumerated cells
MAX_CELLS = 2 ** 20


class CapacityError(RuntimeError):
    """Requested lattice exceeds the configured cell budget."""


class OutsideCoveredRegion(ValueError):
    """Point not covered by the requested cell family."""


@dataclass(frozen=True)
class Cell:
    """One lattice cell; polar kinds use (r, theta) bounds, plane uses (x, y).

    Bounds are half-open: lo <= coordinate < hi, with theta reduced
    mod 2 pi.
    """

    kind: str
    level: int
    index: int
    lo1: float
    hi1: float
    lo2: float
    hi2: float

    @property
    def center(self) -> complex:
        if self.kind == PLANE_SQUARE:
            return complex(0.5 * (self.lo1 + self.hi1),
                           0.5 * (self.lo2 + self.hi2))
        r = 0.5 * (self.lo1 + self.hi1)
        t = 0.5 * (self.lo2 + self.hi2)
        return r * complex(math.cos(t), math.sin(t))

    @property
    def area(self) -> float:
        if self.kind == PLANE_SQUARE:
            return (self.hi1 - self.lo1) * (self.hi2 - self.lo2)
        return 0.5 * (self.hi1 ** 2 - self.lo1 ** 2) * (self.hi2 - self.lo2)

    @property
    def arc(self):
        """Boundary arc (theta_lo, theta_hi); meaningful for Carleson boxes."""
        if self.kind == PLANE_SQUARE:
            raise ValueError("plane squares have no boundary arc")
        return (self.lo2, self.hi2)

    def contains(self, z: complex) -> bool:
        if self.kind == PLANE_SQUARE:
            return (self.lo1 <= z.real < self.hi1
                    and self.lo2 <= z.imag < self.hi2)
        r = abs(z)
        if not (self.lo1 <= r < self.hi1):
            return False
        t = math.atan2(z.imag, z.real) % TWO_PI
        return self.lo2 <= t < self.hi2


@dataclass(frozen=True)
class LatticeParams:
    p: int = 2
    max_level: int = 12
    family: str = DYADIC
    plane_radius: float = 6.0  # squares with |center|_inf <= plane_radius

    def __post_init__(self):
        if self.family not in (DYADIC, CARLESON_CELL, PLANE_SQUARE):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family != PLANE_SQUARE:
            if self.p < 2:
                raise ValueError("p must be >= 2")
            if self.max_level < 1:
                raise ValueError("max_level must be >= 1")
            if self.family == CARLESON_CELL and self.p != 2:
                raise ValueError("the Carleson family is dyadic (p = 2)")
        if self.cell_count() > MAX_CELLS:
            raise CapacityError(
                f"{self.cell_count()} cells exceed the cap {MAX_CELLS}")

    def cell_count(self) -> int:
        if self.family == DYADIC:
            return sum(self.p ** (n + 1)
                       for n in range(1, self.max_level + 1))
        if self.family == CARLESON_CELL:
            return sum(2 ** n for n in range(1, self.max_level + 1))
        side = 2 * int(math.floor(self.plane_radius)) + 1
        return side * side

    def angular_count(self, level: int) -> int:
        if self.family == DYADIC:
            return self.p ** (level + 1)
        return 2 ** level

    def covered_radii(self):
        """(r_lo, r_hi) of the annulus covered by the disc families."""
        p = float(self.p)
        return (1.0 - 1.0 / p, 1.0 - p ** (-self.max_level - 1.0))


def _disc_cell(params: LatticeParams, n: int, j: int) -> Cell:
    p = float(params.p)
    r_lo = 1.0 - p ** (-n)
    r_hi = 1.0 - p ** (-n - 1)
    m = params.angular_count(n)
    step = TWO_PI / m
    kind = DYADIC if params.family == DYADIC else CARLESON_CELL
    return Cell(kind, n, j, r_lo, r_hi, j * step, (j + 1) * step)


def enumerate_cells(params: LatticeParams):
    """All cells in deterministic order (level-major, then index)."""
    if params.family == PLANE_SQUARE:
        out = []
        k = int(math.floor(params.plane_radius))
        idx = 0
        for iy in range(-k, k + 1):
            for ix in range(-k, k + 1):
                out.append(Cell(PLANE_SQUARE, 0, idx,
                                ix - 0.5, ix + 0.5, iy - 0.5, iy + 0.5))
                idx += 1
        return out
    return [_disc_cell(params, n, j)
            for n in range(1, params.max_level + 1)
            for j in range(params.angular_count(n))]


def carleson_box(n: int, j: int) -> Cell:
    """W_{n,j}: within 2^-n of the boundary over the j-th dyadic arc."""
    if not 0 <= j < 2 ** n:
        raise ValueError(f"box index {j} out of range at level {n}")
    step = TWO_PI / 2 ** n
    return Cell(CARLESON_BOX, n, j, 1.0 - 2.0 ** (-n), 1.0,
                j * step, (j + 1) * step)


def box_decomposition_indices(l: int, n: int, j: int):
    """Indices H of the level-l Carleson cells tiling box W_{n,j}."""
    if l < n:
        raise ValueError("decomposition levels run downward from the box level")
    width = 2 ** (l - n)
    return range(j * width, (j + 1) * width)


def locate(z: complex, params: LatticeParams) -> Cell:
    """The unique cell containing z (half-open conventions)."""
    if params.family == PLANE_SQUARE:
        k = int(math.floor(params.plane_radius))
        ix = int(math.floor(z.real + 0.5))
        iy = int(math.floor(z.imag + 0.5))
        if abs(ix) > k or abs(iy) > k:
            raise OutsideCoveredRegion(f"{z} outside the plane lattice")
        idx = (iy + k) * (2 * k + 1) + (ix + k)
        return Cell(PLANE_SQUARE, 0, idx, ix - 0.5, ix + 0.5,
                    iy - 0.5, iy + 0.5)
    r = abs(z)
    r_lo, r_hi = params.covered_radii()
    if not (r_lo <= r < r_hi):
        raise OutsideCoveredRegion(f"|z| = {r} outside [{r_lo}, {r_hi})")
    p = float(params.p)
    n = int(math.floor(-math.log1p(-r) / math.log(p)))
    n = max(1, min(n, params.max_level))
    # float guard: walk to the level whose half-open slab holds r
    while r < 1.0 - p ** (-n):
        n -= 1
    while r >= 1.0 - p ** (-n - 1):
        n += 1
    m = params.angular_count(n)
    t = math.atan2(z.imag, z.real) % TWO_PI
    j = int(math.floor(t / (TWO_PI / m)))
    j = min(j, m - 1)
    cell = _disc_cell(params, n, j)
    if not cell.contains(z):  # angular float guard at sector seams
        j = (j + 1) % m if t >= cell.hi2 else (j - 1) % m
        cell = _disc_cell(params, n, j)
    return cell


def _inflated_bounds(cell: Cell, b: float):
    half1 = 0.5 * (cell.hi1 - cell.lo1) * b
    half2 = 0.5 * (cell.hi2 - cell.lo2) * b
    c1 = 0.5 * (cell.lo1 + cell.hi1)
    c2 = 0.5 * (cell.lo2 + cell.hi2)
    return (c1 - half1, c1 + half1, c2 - half2, c2 + half2)


def _angular_overlap(lo_a, hi_a, lo_b, hi_b):
    # open-interval overlap on the circle
    for shift in (-TWO_PI, 0.0, TWO_PI):
        if lo_a < hi_b + shift and lo_b + shift < hi_a:
            return True
    return False


def multiplicity_report(params: LatticeParams, inflation: float = 1.0,
                        probe_max_level: int | None = None) -> int:
    """Maximum number of b-inflated cells meeting one inflated cell.

    Inflation happens about cell centers in the (r, theta) chart.  The
    count is taken over all cells up to ``probe_max_level`` (default: the
    lattice's own max level, capped at 8 for cost) and includes the cell
    itself, so disjoint families at inflation 1 report exactly 1.
    """
    if inflation > 3.0:
        raise ValueError("inflation factor must be <= 3")
    if params.family == PLANE_SQUARE:
        # unit squares inflated by b overlap iff centre distance < b
        reach = int(math.ceil(inflation))
        count = 0
        for dx in range(-reach, reach + 1):
            for dy in range(-reach, reach + 1):
                if abs(dx) < inflation and abs(dy) < inflation:
                    count += 1
        return count
    cap = probe_max_level if probe_max_level is not None else min(
        params.max_level, 8)
    probe = LatticeParams(params.p, cap, params.family)
    cells = enumerate_cells(probe)
    bounds = [_inflated_bounds(c, inflation) for c in cells]
    by_level = {}
    for c, bb in zip(cells, bounds):
        by_level.setdefault(c.level, []).append(bb)
    worst = 0
    for c, (lo1, hi1, lo2, hi2) in zip(cells, bounds):
        hits = 0
        for lvl in range(max(1, c.level - 2), min(cap, c.level + 2) + 1):
            for (olo1, ohi1, olo2, ohi2) in by_level.get(lvl, ()):
                if lo1 < ohi1 and olo1 < hi1 and _angular_overlap(
                        lo2, hi2, olo2, ohi2):
                    hits += 1
        worst = max(worst, hits)
    return worst


def cells_to_csv(cells, path):
    """CSV export: kind, n, j, center_re, center_im, area."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "n", "j", "center_re", "center_im", "area"])
        for c in cells:
            z = c.center
            w.writerow([c.kind, c.level, c.index,
                        repr(z.real), repr(z.imag), repr(c.area)])
