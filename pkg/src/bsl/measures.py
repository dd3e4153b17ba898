"""Positive Borel measures on the disc/plane and their lattice statistics.

A :class:`MeasureSpec` is one of

* ``radial``  -- density g(r) against r dr dtheta on an annulus
  [r_lo, r_hi); this covers Lebesgue area (g = 1), restrictions to centred
  discs/annuli, the power densities (1-r)^a, and the rate-engineered
  densities g(r) = 1 / rho(1/(1-r));
* ``atoms``   -- finitely many point masses;
* ``area``    -- a general density f(z) against dA, optionally restricted
  to a union of lattice cells.

Cell masses are computed by adaptive radial quadrature (radial), exact
summation (atoms) or escalating tensor quadrature (area).  Radial masses
are also available in the log domain because the interesting examples
decay like exp(-2^level).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import RateFunction
from .lattice import (CARLESON_BOX, PLANE_SQUARE, Cell, LatticeParams,
                      enumerate_cells, locate)
from .quadrature import (REL_TOL, QuadratureError, adaptive_1d, disc_rule,
                         log_adaptive_1d, square_rule)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MeasureSpec:
    """A positive measure given by a radial/area density or atoms."""

    kind: str
    g: object = None
    log_g: object = None
    r_lo: float = 0.0
    r_hi: float = 1.0
    f: object = None
    atoms: tuple = ()
    cells: tuple = None
    label: str = ""

    # -- constructors ---------------------------------------------------

    @classmethod
    def lebesgue(cls) -> "MeasureSpec":
        """Plain area measure dA."""
        return cls("radial", g=lambda r: np.ones_like(np.asarray(r, float)),
                   log_g=lambda r: np.zeros_like(np.asarray(r, float)),
                   r_lo=0.0, r_hi=math.inf, label="lebesgue")

    @classmethod
    def disc(cls, radius: float) -> "MeasureSpec":
        """Area measure restricted to the centred disc of given radius."""
        m = cls.lebesgue()
        return cls("radial", g=m.g, log_g=m.log_g, r_lo=0.0,
                   r_hi=float(radius), label=f"area|disc({radius})")

    @classmethod
    def radial(cls, g, log_g=None, r_lo=0.0, r_hi=1.0,
               label="radial") -> "MeasureSpec":
        """Density g(r) against r dr dtheta."""
        if log_g is None:
            def log_g(r, _g=g):
                with np.errstate(divide="ignore"):
                    return np.log(np.asarray(_g(r), dtype=float))
        return cls("radial", g=g, log_g=log_g, r_lo=float(r_lo),
                   r_hi=float(r_hi), label=label)

    @classmethod
    def radial_power(cls, a: float) -> "MeasureSpec":
        """d mu = (1-r)^a r dr dtheta on the unit disc."""
        return cls.radial(
            lambda r, _a=a: (1.0 - np.asarray(r, float)) ** _a,
            log_g=lambda r, _a=a: _a * np.log1p(-np.asarray(r, float)),
            label=f"(1-r)^{a}")

    @classmethod
    def point_masses(cls, atoms) -> "MeasureSpec":
        atoms = tuple((complex(z), float(m)) for z, m in atoms)
        if any(m <= 0 for _, m in atoms):
            raise ValueError("atom masses must be positive")
        return cls("atoms", atoms=atoms, label="atoms")

    @classmethod
    def area_density(cls, f, cells=None, label="area") -> "MeasureSpec":
        return cls("area", f=f, cells=tuple(cells) if cells else None,
                   label=label)

    # -- predicates -----------------------------------------------------

    @property
    def is_radial(self) -> bool:
        return self.kind == "radial"

    def restrict_to_annulus(self, r_lo: float, r_hi: float) -> "MeasureSpec":
        if not self.is_radial:
            raise ValueError("annulus restriction needs a radial measure")
        return MeasureSpec("radial", g=self.g, log_g=self.log_g,
                           r_lo=max(self.r_lo, r_lo),
                           r_hi=min(self.r_hi, r_hi),
                           label=f"{self.label}|[{r_lo},{r_hi})")

    def restrict_to_cells(self, cells) -> "MeasureSpec":
        """Restriction to a cell union; radial density lifted pointwise."""
        if self.kind == "atoms":
            kept = tuple((z, m) for z, m in self.atoms
                         if any(c.contains(z) for c in cells))
            return MeasureSpec("atoms", atoms=kept,
                               label=f"{self.label}|cells")
        if self.kind == "radial":
            f = lambda z, _g=self.g: _g(np.abs(z))  # noqa: E731
        else:
            f = self.f
        return MeasureSpec("area", f=f, cells=tuple(cells),
                           label=f"{self.label}|cells")


def radial_counterexample(rho: RateFunction) -> MeasureSpec:
    """The radial measure d mu = r dr dtheta / rho(1/(1-r)).

    For polynomially bounded rates this engineers cell averages
    comparable to 1/rho at the matching lattice index; for rates growing
    faster than every polynomial it is the standard source of
    eigenvalue/cell-average divergence.
    """
    def g(r):
        return np.exp(log_g(r))

    def log_g(r):
        r = np.asarray(r, dtype=float)
        return -rho.log_rho(1.0 / (1.0 - r))

    return MeasureSpec("radial", g=g, log_g=log_g, r_lo=0.0, r_hi=1.0,
                       label=f"counterexample[{rho.family}]")


# ----------------------------------------------------------------------
# cell masses


def _polar_bounds(mu: MeasureSpec, cell: Cell):
    rl = max(cell.lo1, mu.r_lo)
    rh = min(cell.hi1, mu.r_hi)
    return rl, rh, cell.hi2 - cell.lo2


def _radial_cell_mass(mu: MeasureSpec, cell: Cell) -> float:
    if cell.kind == PLANE_SQUARE:
        if mu.label == "lebesgue":
            return cell.area
        raise NotImplementedError(
            "radial densities over plane squares are not supported")
    rl, rh, width = _polar_bounds(mu, cell)
    if rl >= rh:
        return 0.0
    if mu.label.startswith("area|") or mu.label == "lebesgue":
        return 0.5 * (rh * rh - rl * rl) * width
    val = adaptive_1d(lambda r: mu.g(r) * r, rl, rh)
    return width * val


def _log_radial_cell_mass(mu: MeasureSpec, cell: Cell) -> float:
    rl, rh, width = _polar_bounds(mu, cell)
    if rl >= rh:
        return -math.inf
    with np.errstate(divide="ignore"):
        log_int = log_adaptive_1d(
            lambda r: mu.log_g(r) + np.log(np.maximum(r, 1e-300)), rl, rh)
    return math.log(width) + log_int


def _area_cell_mass(mu: MeasureSpec, cell: Cell) -> float:
    def rule(order):
        if cell.kind == PLANE_SQUARE:
            return square_rule(cell.lo1, cell.hi1, cell.lo2, cell.hi2, order)
        return disc_rule(order, order, cell.lo1, cell.hi1,
                         cell.lo2, cell.hi2)

    prev = None
    for order in (16, 24, 48):
        z, w = rule(order)
        val = float(np.real(np.sum(w * mu.f(z))))
        if prev is not None and abs(val - prev) <= max(
                REL_TOL * abs(val), 1e-13):
            return val
        prev = val
    raise QuadratureError(
        f"cell mass did not converge (last two: {prev}, {val})",
        value=val, error_bound=abs(val - prev))


def cell_mass(mu: MeasureSpec, cell: Cell) -> float:
    """mu(cell) with the half-open conventions of the lattice."""
    if mu.kind == "radial":
        return _radial_cell_mass(mu, cell)
    if mu.kind == "atoms":
        return float(sum(m for z, m in mu.atoms if cell.contains(z)))
    if mu.cells is not None:
        # intersection with the restriction support
        sub = [c for c in mu.cells if _cell_inside(c, cell)]
        outside = [c for c in mu.cells
                   if not _cell_inside(c, cell) and _cells_overlap(c, cell)]
        if outside:
            raise NotImplementedError(
                "partial overlap between query cell and restriction cells")
        base = MeasureSpec("area", f=mu.f, label=mu.label)
        return float(sum(_area_cell_mass(base, c) for c in sub))
    return _area_cell_mass(mu, cell)


def log_cell_mass(mu: MeasureSpec, cell: Cell) -> float:
    """log mu(cell); radial measures only (underflow-safe path)."""
    if mu.kind != "radial":
        v = cell_mass(mu, cell)
        return math.log(v) if v > 0 else -math.inf
    return _log_radial_cell_mass(mu, cell)


def _cell_inside(inner: Cell, outer: Cell) -> bool:
    return (outer.lo1 <= inner.lo1 and inner.hi1 <= outer.hi1
            and outer.lo2 <= inner.lo2 and inner.hi2 <= outer.hi2)


def _cells_overlap(a: Cell, b: Cell) -> bool:
    return (a.lo1 < b.hi1 and b.lo1 < a.hi1
            and a.lo2 < b.hi2 and b.lo2 < a.hi2)


def box_mass(mu: MeasureSpec, box: Cell) -> float:
    """mu(W) for a Carleson box, evaluated directly (no truncation)."""
    if box.kind != CARLESON_BOX:
        raise ValueError("box_mass expects a Carleson box")
    return cell_mass(mu, box)


# ----------------------------------------------------------------------
# tables and rearrangements


@dataclass
class CellMassTable:
    cells: list
    masses: np.ndarray
    averages: np.ndarray
    log_averages: np.ndarray
    params: LatticeParams
    tail_level_sup: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "j", "mass", "average"])
            for c, m, a in zip(self.cells, self.masses, self.averages):
                w.writerow([c.level, c.index, repr(float(m)),
                            repr(float(a))])


def cell_mass_table(mu: MeasureSpec, params: LatticeParams) -> CellMassTable:
    """Masses and averages of every lattice cell.

    Radial measures use one quadrature per level (all cells of a level are
    congruent and the measure is rotation invariant); the log-average is
    kept alongside so extreme decay survives.
    """
    cells = enumerate_cells(params)
    masses = np.zeros(len(cells))
    log_avg = np.full(len(cells), -math.inf)
    if mu.is_radial and params.family != PLANE_SQUARE:
        per_level = {}
        per_level_log = {}
        for n in range(1, params.max_level + 1):
            probe = next(c for c in cells if c.level == n)
            per_level[n] = _radial_cell_mass(mu, probe)
            per_level_log[n] = _log_radial_cell_mass(mu, probe)
        for i, c in enumerate(cells):
            masses[i] = per_level[c.level]
            log_avg[i] = per_level_log[c.level] - math.log(c.area)
    elif mu.kind == "atoms":
        pos = {(c.level, c.index): i for i, c in enumerate(cells)}
        for z, m in mu.atoms:
            try:
                c = locate(z, params)
            except Exception:
                continue
            masses[pos[(c.level, c.index)]] += m
        with np.errstate(divide="ignore"):
            log_avg = np.log(np.maximum(masses, 1e-320)) - np.log(
                np.array([c.area for c in cells]))
            log_avg[masses == 0.0] = -math.inf
    else:
        for i, c in enumerate(cells):
            masses[i] = cell_mass(mu, c)
        with np.errstate(divide="ignore"):
            areas = np.array([c.area for c in cells])
            log_avg = np.where(masses > 0,
                               np.log(np.maximum(masses, 1e-320))
                               - np.log(areas), -math.inf)
    areas = np.array([c.area for c in cells])
    averages = masses / areas
    deepest = max(c.level for c in cells)
    tail = float(np.max(averages[[c.level == deepest for c in cells]]))
    return CellMassTable(cells, masses, averages, log_avg, params, tail)


@dataclass
class Rearranged:
    """A decreasing enumeration of cell statistics."""

    values: np.ndarray
    log_values: np.ndarray
    order: np.ndarray
    levels: np.ndarray
    indices: np.ndarray
    tail_certificate: float = math.nan

    def __len__(self):
        return self.values.size

    def to_csv(self, path, column="value"):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", column])
            for k, v in enumerate(self.values, start=1):
                w.writerow([k, repr(float(v))])


def rearrange_values(values, log_values, levels, indices,
                     tail=math.nan) -> Rearranged:
    """Sort values nonincreasingly with the stable (level, index) tie-break."""
    order = np.lexsort((indices, levels, -np.asarray(log_values)))
    return Rearranged(values=np.asarray(values)[order],
                      log_values=np.asarray(log_values)[order],
                      order=order,
                      levels=np.asarray(levels)[order],
                      indices=np.asarray(indices)[order],
                      tail_certificate=tail)


def rearrangement(table: CellMassTable) -> Rearranged:
    """Averages sorted nonincreasingly, ties broken by (level, index).

    The sort key is the log-average so that sequences spanning thousands
    of orders of magnitude rearrange correctly.
    """
    levels = np.array([c.level for c in table.cells])
    indices = np.array([c.index for c in table.cells])
    return rearrange_values(table.averages, table.log_averages, levels,
                            indices, tail=table.tail_level_sup)


def dominates(nu: MeasureSpec, mu: MeasureSpec, probe: int = 512):
    """True if mu <= nu can be certified, False if refuted, None if unknown."""
    if mu.kind == "radial" and nu.kind == "radial":
        if mu.r_lo < nu.r_lo - 1e-15 or mu.r_hi > nu.r_hi + 1e-15:
            inside = None
        else:
            inside = True
        r = np.linspace(mu.r_lo + 1e-9, min(mu.r_hi, 1.0 - 1e-9) - 1e-9,
                        probe)
        r = r[(r >= mu.r_lo) & (r < mu.r_hi)]
        gm = np.asarray(mu.g(r), dtype=float)
        gn = np.where((r >= nu.r_lo) & (r < nu.r_hi),
                      np.asarray(nu.g(r), dtype=float), 0.0)
        if np.all(gm <= gn * (1.0 + 1e-12) + 1e-300):
            return True if inside else None
        return False
    if mu.kind == "atoms" and nu.kind == "atoms":
        remaining = dict()
        for z, m in nu.atoms:
            remaining[z] = remaining.get(z, 0.0) + m
        for z, m in mu.atoms:
            if remaining.get(z, 0.0) + 1e-15 < m:
                return False
            remaining[z] = remaining.get(z, 0.0) - m
        return True
    return None
