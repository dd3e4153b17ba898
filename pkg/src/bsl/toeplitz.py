"""Truncated Toeplitz matrices, spectra, and trace-estimate checks.

The Toeplitz operator of a positive measure mu acts on the weighted space
through the quadratic form ``<T_mu f, f> = integral |f|^2 omega^2 d mu``;
its matrix in the orthonormal monomial basis is

    M[m, n] = integral e_n(z) conj(e_m(z)) omega^2(z) d mu(z).

Rotation-invariant measures make the matrix exactly diagonal, and the
diagonal is evaluated by log-domain radial quadrature so that spectra with
sub-double-precision decay remain usable.  Everything else is assembled by
tensor quadrature and symmetrized.

The verification harness at the bottom implements the two-sided trace
comparisons between eigenvalues and cell averages, Weyl-type monotonicity
checks, and the geometric-decay fit for single-cell measures.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import CutPowerFunction
from .lattice import PLANE_SQUARE, Cell, LatticeParams
from .measures import (MeasureSpec, cell_mass_table, dominates,
                       rearrangement)
from .quadrature import disc_rule, log_adaptive_1d
from .spaces import (BERGMAN, WeightModel, basis_matrix,
                     log_orthonormal_basis_coeff, log_weight_density,
                     plain_area_rule)

TWO_PI = 2.0 * math.pi

#: default basis truncation cap
DIMENSION_CAP = 2048


class AssemblyError(RuntimeError):
    """Matrix failed a structural sanity check after assembly."""


class IncomparableMeasures(ValueError):
    """No ordering between the two measures could be certified."""


class FitDegenerateError(RuntimeError):
    """Spectrum unusable for a decay fit (underflow or no decay)."""


@dataclass
class ToeplitzMatrix:
    model: WeightModel
    mu: MeasureSpec
    dimension: int
    entries: np.ndarray
    is_diagonal: bool = False
    log_diagonal: np.ndarray = None
    hermiticity_defect: float = 0.0

    def to_binary(self, path):
        """Dense export: 16-byte header (magic 'TPLZ', u32 N, zero pad),
        then row-major complex entries as little-endian f64 (re, im) pairs."""
        header = struct.pack("<4sI8x", b"TPLZ", self.dimension)
        data = np.ascontiguousarray(self.entries.astype("<c16"))
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(data.tobytes())


@dataclass
class SpectrumResult:
    """Nonincreasing eigenvalue (or singular value) sequence."""

    eigenvalues: np.ndarray
    truncation_dim: int
    clip_magnitude: float = 0.0
    assembly_error_bound: float = 0.0
    log_values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.log_values is None:
            with np.errstate(divide="ignore"):
                self.log_values = np.where(
                    self.eigenvalues > 0.0,
                    np.log(np.maximum(self.eigenvalues, 1e-320)), -np.inf)

    def to_csv(self, path, column="lambda"):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", column])
            for n, lam in enumerate(self.eigenvalues):
                w.writerow([n, repr(float(lam))])


# ----------------------------------------------------------------------
# assembly


def _log_radial_diag(model: WeightModel, mu: MeasureSpec, N: int):
    """log of M[n, n] = c_n^2 * 2 pi * int r^(2n+1) omega^2(r) g(r) dr."""
    r_lo = max(mu.r_lo, 0.0)
    if model.kind == BERGMAN:
        r_hi = min(mu.r_hi, 1.0 - 1e-13)
    else:
        from .quadrature import fock_truncation_radius
        r_hi = min(mu.r_hi, fock_truncation_radius(model.alpha))
    log_c = 2.0 * log_orthonormal_basis_coeff(model, np.arange(N))
    out = np.empty(N)
    for n in range(N):
        def log_f(r, _n=n):
            r = np.asarray(r, dtype=float)
            return ((2.0 * _n + 1.0) * np.log(np.maximum(r, 1e-300))
                    + log_weight_density(model, r) + mu.log_g(r))
        if r_lo >= r_hi:
            out[n] = -math.inf
            continue
        out[n] = log_c[n] + math.log(TWO_PI) + log_adaptive_1d(
            log_f, r_lo, r_hi)
    return out


def _assemble_at_nodes(model, mu_density, z, w, N, out):
    """out += E^H diag(w * density) E accumulated in node chunks."""
    z = np.asarray(z).ravel()
    w = np.asarray(w).ravel()
    chunk = max(1, int(4_000_000 / max(N, 1)))
    for lo in range(0, z.size, chunk):
        zi = z[lo:lo + chunk]
        wi = w[lo:lo + chunk] * mu_density(zi)
        E = basis_matrix(model, N, zi)
        out += (E.conj() * wi[:, None]).T @ E
    return out


def assemble(model: WeightModel, mu: MeasureSpec, N: int, *,
             n_r: int = 192, n_t: int = 384,
             cell_order: int = 24) -> ToeplitzMatrix:
    """Truncated Toeplitz matrix of mu in the orthonormal monomial basis."""
    if N > DIMENSION_CAP:
        raise ValueError(f"dimension {N} exceeds the cap {DIMENSION_CAP}")
    if mu.is_radial:
        log_diag = _log_radial_diag(model, mu, N)
        diag = np.exp(np.clip(log_diag, -745.0, 700.0))
        M = np.diag(diag).astype(complex)
        return ToeplitzMatrix(model, mu, N, M, is_diagonal=True,
                              log_diagonal=log_diag)
    M = np.zeros((N, N), dtype=complex)
    if mu.kind == "atoms":
        for z0, mass in mu.atoms:
            E = basis_matrix(model, N, np.array([z0]))
            w2 = math.exp(log_weight_density(model, z0))
            M += mass * w2 * (E.conj().T @ E)
    elif mu.cells is not None:
        def density(z):
            return mu.f(z) * np.exp(log_weight_density(model, z))
        for c in mu.cells:
            if c.kind == PLANE_SQUARE:
                from .quadrature import square_rule
                z, w = square_rule(c.lo1, c.hi1, c.lo2, c.hi2, cell_order)
            else:
                z, w = disc_rule(cell_order, cell_order, c.lo1, c.hi1,
                                 c.lo2, c.hi2)
            _assemble_at_nodes(model, density, z, w, N, M)
    else:
        z, w = plain_area_rule(model, n_r, n_t)

        def density(zz):
            return mu.f(zz) * np.exp(log_weight_density(model, zz))

        _assemble_at_nodes(model, density, z, w, N, M)
    defect = float(np.max(np.abs(M - M.conj().T))) if N else 0.0
    M = 0.5 * (M + M.conj().T)
    scale = float(np.max(np.abs(M))) if N else 0.0
    if scale > 0 and defect > 1e-10 * scale:
        raise AssemblyError(f"hermiticity defect {defect:.3e} "
                            f"exceeds 1e-10 * {scale:.3e}")
    return ToeplitzMatrix(model, mu, N, M, hermiticity_defect=defect)


def spectrum(matrix: ToeplitzMatrix) -> SpectrumResult:
    """All eigenvalues, nonincreasing, tiny negatives clipped at zero."""
    if matrix.is_diagonal:
        order = np.argsort(-matrix.log_diagonal, kind="stable")
        vals = np.real(np.diag(matrix.entries))[order]
        return SpectrumResult(np.maximum(vals, 0.0), matrix.dimension,
                              log_values=matrix.log_diagonal[order])
    vals = np.linalg.eigvalsh(matrix.entries)[::-1].copy()
    norm = float(np.max(np.abs(vals))) if vals.size else 0.0
    clip = float(max(0.0, -np.min(vals))) if vals.size else 0.0
    if norm > 0 and clip > 1e-10 * norm:
        raise AssemblyError(
            f"negative eigenvalue {-clip:.3e} beyond 1e-10 * {norm:.3e}; "
            "assembly is suspect")
    return SpectrumResult(np.maximum(vals, 0.0), matrix.dimension,
                          clip_magnitude=clip,
                          assembly_error_bound=matrix.hermiticity_defect)


# ----------------------------------------------------------------------
# spectral functionals


def trace_functional(spec: SpectrumResult, h: CutPowerFunction) -> float:
    """sum h(lambda_n) over the computed spectrum."""
    return float(np.sum(h.of_log(spec.log_values)))


def trace_tail_hint(spec: SpectrumResult, h: CutPowerFunction) -> float:
    """N * lambda_N^beta: the usual tail certificate when delta = 0.

    Valid for spectra decaying at least geometrically past the truncation;
    reported, never asserted.
    """
    if spec.eigenvalues.size == 0:
        return 0.0
    lam_last = float(spec.eigenvalues[-1])
    return spec.truncation_dim * lam_last ** h.beta


def schatten_norm(spec: SpectrumResult, p: float) -> float:
    """ell^p norm of the eigenvalue sequence."""
    if p <= 0:
        raise ValueError("p must be positive")
    s = float(np.sum(np.exp(np.clip(p * spec.log_values, -745.0, 700.0))))
    return s ** (1.0 / p)


# ----------------------------------------------------------------------
# verification harness


@dataclass
class SandwichReport:
    B_witness: float
    lower_ratio: float
    upper_ratio: float
    sum_eigen: float
    sum_cells: float
    lambda_tail_hint: float
    cell_tail_sup: float
    branch: str


def verify_trace_sandwich(model: WeightModel, mu: MeasureSpec,
                          lattice_params: LatticeParams,
                          h: CutPowerFunction, N: int,
                          B_grid=None) -> SandwichReport:
    """Smallest grid B with sum h(a_n/B) <= sum h(lambda_n) <= sum h(B a_n).

    Both sums are truncated (basis dimension N, lattice depth); the report
    carries the tail hints so a caller can reject a sandwich whose gap is
    dominated by truncation.
    """
    sp = spectrum(assemble(model, mu, N))
    rearr = rearrangement(cell_mass_table(mu, lattice_params))
    s_eig = float(np.sum(h.of_log(sp.log_values)))
    if B_grid is None:
        B_grid = 2.0 ** np.arange(0, 16)
    witness = math.inf
    lower_ratio = upper_ratio = math.nan
    log_a = rearr.log_values
    s_cells_plain = float(np.sum(h.of_log(log_a)))
    for B in np.sort(np.asarray(B_grid, dtype=float)):
        s_lo = float(np.sum(h.of_log(log_a - math.log(B))))
        s_hi = float(np.sum(h.of_log(log_a + math.log(B))))
        tol = 1e-12 * max(s_hi, 1.0)
        if s_lo <= s_eig + tol and s_eig <= s_hi + tol:
            witness = float(B)
            lower_ratio = s_eig / s_lo if s_lo > 0 else math.inf
            upper_ratio = s_hi / s_eig if s_eig > 0 else math.inf
            break
    return SandwichReport(
        B_witness=witness, lower_ratio=lower_ratio, upper_ratio=upper_ratio,
        sum_eigen=s_eig, sum_cells=s_cells_plain,
        lambda_tail_hint=trace_tail_hint(sp, h),
        cell_tail_sup=rearr.tail_certificate,
        branch="convex" if h.is_convex else "concave")


def weyl_monotonicity_check(model: WeightModel, mu: MeasureSpec,
                            nu: MeasureSpec, N: int,
                            tol: float = 1e-10) -> bool:
    """lambda_n(T_mu) <= lambda_n(T_nu) + tol for all n < N, given mu <= nu."""
    order = dominates(nu, mu)
    if order is None:
        raise IncomparableMeasures(
            "cannot certify mu <= nu for these measure specs")
    if order is False:
        raise IncomparableMeasures("mu <= nu is false on the probe grid")
    lam_mu = spectrum(assemble(model, mu, N)).eigenvalues
    lam_nu = spectrum(assemble(model, nu, N)).eigenvalues
    return bool(np.all(lam_mu <= lam_nu + tol))


@dataclass
class DecayFit:
    B: float
    gamma: float
    points_used: int


def geometric_decay_check(model: WeightModel, target, N: int = 64,
                          floor: float = 1e-260) -> DecayFit:
    """Fit log lambda_k ~ log B - gamma k on the middle half of the spectrum.

    ``target`` is a lattice cell (measure dA restricted to it) or any
    MeasureSpec.  Raises FitDegenerateError when the window underflows or
    when no decay is present (gamma <= 0).
    """
    if isinstance(target, Cell):
        mu = MeasureSpec.area_density(
            lambda z: np.ones(np.shape(z)), cells=[target],
            label="area|cell")
    else:
        mu = target
    sp = spectrum(assemble(model, mu, N))
    k = np.arange(N)
    window = (k >= N // 4) & (k < (3 * N) // 4)
    good = window & (sp.eigenvalues > floor)
    if int(np.sum(good)) < 8:
        raise FitDegenerateError("spectrum underflows inside the fit window")
    x = k[good].astype(float)
    y = sp.log_values[good]
    slope, intercept = np.polyfit(x, y, 1)
    if slope >= -1e-12:
        raise FitDegenerateError(f"no geometric decay (slope {slope:.3e})")
    return DecayFit(B=float(np.exp(intercept)), gamma=float(-slope),
                    points_used=int(np.sum(good)))
