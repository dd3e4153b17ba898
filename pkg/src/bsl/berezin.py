"""Berezin transforms, lattice samples, and the C_p summability profile.

The (normalized) Berezin transform of a positive measure is

    mu~(z) = integral |K_z(zeta)|^2 omega^2(zeta) d mu(zeta) / |K_z|^2,

so Lebesgue area transforms to the constant 1 in both models.  For
rotation-invariant measures on the disc the angular integral collapses to
a Gauss hypergeometric factor,

    int |1 - a e^(i t)|^(-2s) dt = 2 pi 2F1(s, s; 1; a^2),

which resolves the kernel peak exactly; the remaining radial integral is
adaptive with the peak location flagged.  On the Fock side everything
reduces to Gaussians (Bessel i0e radially, erf products on squares).

``cp_profile`` estimates the lattice constant

    C_p = sup_n sum_j (nu_n~(z_j))^p,   d nu_n = dA | cell_n,

via its growth profile across truncation depths.  The outer supremum is
taken over a configurable number of representative cells per level
(rotations map the level families into themselves up to a fraction of a
cell, so representatives lose almost nothing); pass all_cells=True for
the full scan.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, hyp2f1, i0e

from .lattice import PLANE_SQUARE, LatticeParams, enumerate_cells
from .measures import MeasureSpec, Rearranged, rearrange_values
from .quadrature import adaptive_1d, disc_rule
from .spaces import BERGMAN, WeightModel, log_weight_density

TWO_PI = 2.0 * math.pi


class SeriesTruncationError(RuntimeError):
    """Kernel-norm series did not converge within the term budget."""


# ----------------------------------------------------------------------
# pointwise transforms


def _berezin_bergman_radial(alpha: float, mu: MeasureSpec, r0: float) -> float:
    s = 2.0 + alpha
    r_hi = min(mu.r_hi, 1.0 - 1e-13)
    r_lo = max(mu.r_lo, 0.0)
    if r_lo >= r_hi:
        return 0.0

    def integrand(r):
        a2 = (r0 * r) ** 2
        return (hyp2f1(s, s, 1.0, a2) * (1.0 - r * r) ** alpha
                * mu.g(r) * r)

    eps = max(1.0 - r0, 1e-12)
    pts = [r0 - 5 * eps, r0, r0 + 5 * eps]
    val = adaptive_1d(integrand, r_lo, r_hi, rel_tol=1e-9, points=pts)
    return 2.0 * (alpha + 1.0) * (1.0 - r0 * r0) ** s * val


def _berezin_fock_radial(alpha: float, mu: MeasureSpec, r0: float) -> float:
    from .quadrature import fock_truncation_radius
    r_hi = min(mu.r_hi, fock_truncation_radius(alpha) + r0)
    r_lo = max(mu.r_lo, 0.0)
    if r_lo >= r_hi:
        return 0.0

    def integrand(r):
        return (2.0 * alpha * i0e(2.0 * alpha * r * r0)
                * np.exp(-alpha * (r - r0) ** 2) * mu.g(r) * r)

    return adaptive_1d(integrand, r_lo, r_hi, rel_tol=1e-9, points=[r0])


def _berezin_atoms(model: WeightModel, mu: MeasureSpec, z: complex) -> float:
    total = 0.0
    for w, mass in mu.atoms:
        if model.kind == BERGMAN:
            kernel_part = ((1.0 - abs(z) ** 2) ** (2.0 + model.alpha)
                           / abs(1.0 - np.conj(z) * w)
                           ** (2.0 * (2.0 + model.alpha)))
            total += mass * kernel_part * math.exp(
                log_weight_density(model, w))
        else:
            # |K_z(w)|^2 omega^2(w) / |K_z|^2 collapses to one Gaussian
            total += mass * (model.alpha / math.pi) * math.exp(
                -model.alpha * abs(z - w) ** 2)
    return total


def _berezin_cells(model: WeightModel, mu: MeasureSpec, z, order=24):
    vals = nu_tilde_cells(model, list(mu.cells), np.atleast_1d(z),
                          density=mu.f, order=order)
    return float(np.sum(vals, axis=0)[0])


def berezin(model: WeightModel, mu: MeasureSpec, z: complex) -> float:
    """mu~(z) by the defining normalized-kernel integral."""
    z = complex(z)
    if mu.kind == "atoms":
        return _berezin_atoms(model, mu, z)
    if mu.is_radial:
        r0 = abs(z)
        if model.kind == BERGMAN:
            return _berezin_bergman_radial(model.alpha, mu, r0)
        return _berezin_fock_radial(model.alpha, mu, r0)
    if mu.cells is not None:
        return _berezin_cells(model, mu, z)
    raise NotImplementedError(
        "unrestricted area densities: use a radial, atomic, or "
        "cell-restricted measure")


# ----------------------------------------------------------------------
# lattice samples


@dataclass
class BerezinTable:
    cells: list
    values: np.ndarray

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "j", "center_re", "center_im", "berezin_value"])
            for c, v in zip(self.cells, self.values):
                z = c.center
                w.writerow([c.level, c.index, repr(z.real), repr(z.imag),
                            repr(float(v))])


def sample_table(model: WeightModel, mu: MeasureSpec,
                 params: LatticeParams) -> BerezinTable:
    """Berezin values at every cell center (radial measures: one per level)."""
    cells = enumerate_cells(params)
    values = np.empty(len(cells))
    if mu.is_radial and params.family != PLANE_SQUARE:
        cache = {}
        for i, c in enumerate(cells):
            if c.level not in cache:
                cache[c.level] = berezin(model, mu, c.center)
            values[i] = cache[c.level]
    else:
        for i, c in enumerate(cells):
            values[i] = berezin(model, mu, c.center)
    return BerezinTable(cells, values)


def sample_rearranged(model: WeightModel, mu: MeasureSpec,
                      params: LatticeParams) -> Rearranged:
    """Decreasing enumeration b_k of the center samples."""
    table = sample_table(model, mu, params)
    levels = np.array([c.level for c in table.cells])
    indices = np.array([c.index for c in table.cells])
    with np.errstate(divide="ignore"):
        logs = np.where(table.values > 0,
                        np.log(np.maximum(table.values, 1e-320)), -math.inf)
    return rearrange_values(table.values, logs, levels, indices)


# ----------------------------------------------------------------------
# cell transforms (the nu_n~ of the C_p constant)


def nu_tilde_cells(model: WeightModel, cells, z_points, density=None,
                   order: int = 16) -> np.ndarray:
    """Matrix V[i, j] = (dA restricted to cells[i])~ (z_j).

    Bergman cells use a tensor rule per cell; Fock squares use the exact
    Gaussian product formula.  ``density`` optionally multiplies dA.
    """
    z = np.asarray(z_points, dtype=complex).ravel()
    out = np.empty((len(cells), z.size))
    if model.kind == BERGMAN:
        s = 2.0 + model.alpha
        pref = (1.0 - np.abs(z) ** 2) ** s
        for i, c in enumerate(cells):
            nodes, w = disc_rule(order, order, c.lo1, c.hi1, c.lo2, c.hi2)
            w = w * np.exp(log_weight_density(model, nodes))
            if density is not None:
                w = w * density(nodes)
            # |1 - conj(z_j) zeta_i|^(-2s), chunked over j
            d = np.abs(1.0 - np.conj(z)[:, None] * nodes[None, :])
            out[i] = pref * (d ** (-2.0 * s) @ w)
        return out
    a = model.alpha
    sq = math.sqrt(a)
    for i, c in enumerate(cells):
        if c.kind != PLANE_SQUARE:
            raise ValueError("Fock cell transforms expect plane squares")
        if density is not None:
            nodes, w = _square_nodes(c, order)
            w = w * density(nodes)
            out[i] = (a / math.pi) * (
                np.exp(-a * np.abs(z[:, None] - nodes[None, :]) ** 2) @ w)
        else:
            ex = 0.5 * (erf(sq * (c.hi1 - z.real)) - erf(sq * (c.lo1 - z.real)))
            ey = 0.5 * (erf(sq * (c.hi2 - z.imag)) - erf(sq * (c.lo2 - z.imag)))
            out[i] = ex * ey
    return out


def _square_nodes(c, order):
    from .quadrature import square_rule
    return square_rule(c.lo1, c.hi1, c.lo2, c.hi2, order)


# ----------------------------------------------------------------------
# C_p profiles


@dataclass
class CpProfile:
    p: float
    depths: list
    sups: list
    classification: str  # "plateau" | "growth" | "inconclusive"
    partial_sup: float

    @property
    def step_ratios(self):
        s = np.asarray(self.sups)
        return list(s[1:] / s[:-1])


def _classify(sups, plateau_ratio=1.05, growth_ratio=1.5, steps=3) -> str:
    s = np.asarray(sups, dtype=float)
    if s.size < steps + 1:
        return "inconclusive"
    r = s[-steps:] / s[-steps - 1:-1]
    if np.all(r <= plateau_ratio):
        return "plateau"
    if np.all(r >= growth_ratio):
        return "growth"
    return "inconclusive"


def cp_profile(model: WeightModel, params: LatticeParams, p: float,
               depth: int, representatives_per_level: int = 4,
               all_cells: bool = False, order: int = 14) -> CpProfile:
    """Growth profile of sup_n sum_j nu_n~^p(z_j) across truncation depths.

    ``depth`` is the maximal disc level (Bergman) or the Chebyshev radius
    of the square grid (Fock).  The profile lists the running supremum for
    each truncation depth 2..depth; classification compares the last three
    successive ratios against the plateau/growth thresholds.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if model.kind == BERGMAN:
        full = LatticeParams(params.p, depth, params.family)
        cells = enumerate_cells(full)
        levels = np.array([c.level for c in cells])
        centers = np.array([c.center for c in cells])
        reps = []
        for n in range(1, depth + 1):
            idx = np.flatnonzero(levels == n)
            if all_cells:
                reps.extend(idx)
            else:
                take = np.unique(np.linspace(
                    0, idx.size - 1, min(representatives_per_level,
                                         idx.size)).astype(int))
                reps.extend(idx[take])
        rep_cells = [cells[i] for i in reps]
        rep_levels = levels[reps]
        V = nu_tilde_cells(model, rep_cells, centers, order=order) ** p
        depths = list(range(2, depth + 1))
        sups = []
        for d in depths:
            cols = levels <= d
            rows = rep_levels <= d
            sums = V[:, cols].sum(axis=1)
            sups.append(float(np.max(sums[rows])))
    else:
        k = depth
        grid = LatticeParams(family=PLANE_SQUARE, plane_radius=k)
        cells = enumerate_cells(grid)
        centers = np.array([c.center for c in cells])
        rings = np.array([int(max(abs(c.center.real), abs(c.center.imag)))
                          for c in cells])
        reps = [i for i, c in enumerate(cells)
                if abs(c.center) <= 1.5] if not all_cells else list(
                    range(len(cells)))
        rep_cells = [cells[i] for i in reps]
        V = nu_tilde_cells(model, rep_cells, centers) ** p
        depths = list(range(1, k + 1))
        sups = []
        for d in depths:
            cols = rings <= d
            sums = V[:, cols].sum(axis=1)
            sups.append(float(np.max(sums)))
    return CpProfile(p=p, depths=depths, sups=sups,
                     classification=_classify(sups),
                     partial_sup=sups[-1])


# ----------------------------------------------------------------------
# modified transform


@dataclass(frozen=True)
class ModifiedBerezinParams:
    """Space parameter alpha and kernel exponent s of the power kernel
    K^s_z(zeta) = (1 - conj(z) zeta)^(-(2+s))."""

    alpha: float
    s: float

    def __post_init__(self):
        if self.s <= -1.0:
            raise ValueError("kernel exponent must satisfy s > -1")

    def trace_regime_ok(self, p: float | None = None) -> bool:
        """Stricter of the two published lower bounds on s.

        The trace comparison itself needs s > (alpha-1)/2; the cut-power
        route at exponent p needs s > (1 + p alpha - 2p) / (2p).  Callers
        report which hypothesis was active.
        """
        bound = 0.5 * (self.alpha - 1.0)
        if p is not None:
            bound = max(bound, (1.0 + p * self.alpha - 2.0 * p) / (2.0 * p))
        return self.s > bound


def _log_c_sq(x: float, n: np.ndarray) -> np.ndarray:
    from scipy.special import gammaln
    return (gammaln(n + 2.0 + x) - gammaln(n + 1.0)
            - gammaln(2.0 + x))


def power_kernel_norm_sq(params: ModifiedBerezinParams, r: float,
                         rel_tol: float = 1e-12,
                         term_cap: int = 1 << 22) -> float:
    """|K^s_r|^2 in the alpha-space: sum c_n(s)^2 r^(2n) / c_n(alpha)^2."""
    if not 0.0 <= r < 1.0:
        raise ValueError("the power-kernel norm needs |z| < 1")
    if r == 0.0:
        return 1.0
    total = 0.0
    block = 4096
    start = 0
    log_r2 = 2.0 * math.log(r)
    while start < term_cap:
        n = np.arange(start, start + block, dtype=float)
        lt = (2.0 * _log_c_sq(params.s, n) - _log_c_sq(params.alpha, n)
              + n * log_r2)
        t = np.exp(lt)
        total += float(np.sum(t))
        # geometric tail estimate from the last ratio
        if t[-1] <= rel_tol * total * (1.0 - r * r):
            return total
        start += block
    raise SeriesTruncationError(
        f"kernel-norm series for r = {r} exceeded {term_cap} terms")


def modified_berezin(params: ModifiedBerezinParams, mu: MeasureSpec,
                     z: complex) -> float:
    """B_{alpha,s}(T_mu)(z) = <T_mu K^s_z, K^s_z> / |K^s_z|^2_alpha."""
    model = WeightModel.bergman(params.alpha)
    z = complex(z)
    r0 = abs(z)
    norm = power_kernel_norm_sq(params, r0)
    s = 2.0 + params.s
    if mu.kind == "atoms":
        num = 0.0
        for w, mass in mu.atoms:
            num += (mass * abs(1.0 - np.conj(z) * w) ** (-2.0 * s)
                    * math.exp(log_weight_density(model, w)))
        return num / norm
    if not mu.is_radial:
        raise NotImplementedError("modified transform: radial or atomic mu")
    r_hi = min(mu.r_hi, 1.0 - 1e-13)
    r_lo = max(mu.r_lo, 0.0)
    if r_lo >= r_hi:
        return 0.0

    def integrand(r):
        return (hyp2f1(s, s, 1.0, (r0 * r) ** 2)
                * (1.0 - r * r) ** params.alpha * mu.g(r) * r)

    eps = max(1.0 - r0, 1e-12)
    val = adaptive_1d(integrand, r_lo, r_hi, rel_tol=1e-9,
                      points=[r0 - 5 * eps, r0, r0 + 5 * eps])
    return 2.0 * (params.alpha + 1.0) * val / norm
