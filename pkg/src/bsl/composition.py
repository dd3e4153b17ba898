"""Composition operators on the H_alpha scale and their singular values.

For a holomorphic self map phi of the disc fixing 0, two independent
routes to the singular values are implemented and cross-checked:

* the Gram route: the matrix G[m, n] = <C_phi f_n, C_phi f_m> in an
  orthonormal basis of the target space (boundary quadrature on H^2, area
  quadrature of derivatives on H_alpha); s_n = sqrt(eig_n(G));
* the Toeplitz route: the squared singular values of the restriction to
  {f(0) = 0} coincide with the eigenvalues of the Toeplitz operator of
  the pull-back measure with density N_{phi,alpha} / omega_alpha^2, where
  N is the weighted counting function.

Univalent symbols touching the circle at one point are described by a
boundary profile ``1 - r = gamma(|theta|)``; its tail integrals

    Gamma(t) = (2/pi) int_t^1 gamma(s)/s^2 ds,
    Lambda(t) = int_t^2 ds/gamma(s),     x_n: Lambda(x_n) = n,

drive the closed-form singular value predictor
``exp(-(alpha/2) Gamma(x_n))``.  All profile computations run in the
variable y = log(e/t): the solutions x_n underflow double precision long
before the asymptotic regime otherwise.
"""

from __future__ import annotations

import cmath
import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .lattice import carleson_box
from .measures import MeasureSpec
from .spaces import WeightModel, log_weight_density
from .toeplitz import SpectrumResult
from .quadrature import adaptive_1d, gauss_legendre

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class NotCompactProfile(ValueError):
    """The boundary profile fails the compactness integral test."""


class SuperPolynomialRate(ValueError):
    """Fast-contact branch: singular values decay beyond all powers."""


# ----------------------------------------------------------------------
# symbols


@dataclass(frozen=True)
class SymbolSpec:
    """A holomorphic self map of the disc.

    ``explicit`` symbols supply callables for phi and phi'; polynomial
    coefficients, when given, unlock exact preimage counts.  A
    ``boundary_trace`` symbol is known only through theta -> phi(e^(i t)).
    ``rotation_scale`` marks maps of the form c z (Gram matrices are then
    exactly diagonal and assembled radially).
    """

    variant: str  # "explicit" | "boundary_trace" | "univalent_polar"
    f: object = None
    df: object = None
    poly_coeffs: tuple = None
    boundary: object = None
    profile: object = None
    univalent: bool = False
    rotation_scale: complex = None
    label: str = "phi"

    @classmethod
    def scale(cls, c: complex) -> "SymbolSpec":
        c = complex(c)
        if abs(c) >= 1.0:
            raise ValueError("|c| < 1 required for a strict self map")
        return cls("explicit", f=lambda z: c * z,
                   df=lambda z: c * np.ones_like(np.asarray(z)),
                   poly_coeffs=(0.0, c), univalent=True, rotation_scale=c,
                   label=f"{c}*z")

    @classmethod
    def monomial(cls, d: int, c: complex = 1.0) -> "SymbolSpec":
        if abs(c) > 1.0:
            raise ValueError("|c| <= 1 required")
        coeffs = (0.0,) * d + (complex(c),)
        return cls("explicit", f=lambda z: c * np.asarray(z) ** d,
                   df=lambda z: c * d * np.asarray(z) ** (d - 1),
                   poly_coeffs=coeffs, univalent=(d == 1),
                   label=f"{c}*z^{d}")

    @classmethod
    def polynomial(cls, coeffs) -> "SymbolSpec":
        coeffs = tuple(complex(a) for a in coeffs)

        def f(z):
            z = np.asarray(z, dtype=complex)
            out = np.zeros_like(z)
            for a in reversed(coeffs):
                out = out * z + a
            return out

        def df(z):
            z = np.asarray(z, dtype=complex)
            out = np.zeros_like(z)
            for k in range(len(coeffs) - 1, 0, -1):
                out = out * z + k * coeffs[k]
            return out

        return cls("explicit", f=f, df=df, poly_coeffs=coeffs,
                   label="poly")

    @classmethod
    def boundary_trace(cls, trace) -> "SymbolSpec":
        """Symbol known through its boundary values t -> phi(e^(i t))."""
        return cls("boundary_trace", boundary=trace, label="trace")

    @classmethod
    def univalent_polar(cls, profile) -> "SymbolSpec":
        """Conformal map onto the polar-profile domain; no explicit formula.

        All observables of these symbols flow through harmonic measure.
        """
        return cls("univalent_polar", profile=profile, univalent=True,
                   label=f"polar[{profile.family}]")

    def fixes_origin(self) -> bool:
        if self.variant == "explicit":
            return abs(complex(np.asarray(self.f(0.0)).item())) < 1e-14
        return True

    def boundary_values(self, t):
        """phi on the unit circle (explicit symbols evaluate at r = 1)."""
        if self.variant == "boundary_trace":
            return np.asarray(self.boundary(t), dtype=complex)
        if self.variant == "explicit":
            return np.asarray(self.f(np.exp(1j * np.asarray(t))),
                              dtype=complex)
        raise ValueError("polar symbols have no computable boundary trace")


def _mobius_normalize(symbol: SymbolSpec) -> SymbolSpec:
    """Post-compose with the involution swapping phi(0) and 0."""
    a = complex(np.asarray(symbol.f(0.0)).item())
    if abs(a) < 1e-14:
        return symbol
    log.info("symbol %s moved to fix the origin (phi(0) = %s)",
             symbol.label, a)
    f0, df0 = symbol.f, symbol.df

    def f(z):
        w = f0(z)
        return (a - w) / (1.0 - np.conj(a) * w)

    def df(z):
        w = f0(z)
        return -df0(z) * (1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * w) ** 2

    return SymbolSpec("explicit", f=f, df=df, univalent=symbol.univalent,
                      label=f"mobius∘{symbol.label}")


# ----------------------------------------------------------------------
# Gram route


def _h2_gram(symbol: SymbolSpec, N: int, n_boundary: int) -> np.ndarray:
    t = TWO_PI * (np.arange(n_boundary) + 0.5) / n_boundary
    phi = symbol.boundary_values(t)
    if np.any(np.abs(phi) > 1.0 + 1e-12):
        raise ValueError("boundary trace leaves the closed disc")
    # F[k, n] = phi(t_k)^n
    F = np.empty((n_boundary, N), dtype=complex)
    F[:, 0] = 1.0
    for n in range(1, N):
        F[:, n] = F[:, n - 1] * phi
    return (F.conj().T @ F) / n_boundary


def _h_alpha_norms(alpha: float, N: int) -> np.ndarray:
    """|z^n|_{H_alpha}: 1 for n = 0, n / c_{n-1}(A_alpha) otherwise."""
    from .spaces import log_orthonormal_basis_coeff
    model = WeightModel.bergman(alpha)
    norms = np.empty(N)
    norms[0] = 1.0
    n = np.arange(1, N, dtype=float)
    norms[1:] = n * np.exp(-log_orthonormal_basis_coeff(
        model, np.arange(0, N - 1)))
    return norms


def _h_alpha_gram(symbol: SymbolSpec, alpha: float, N: int,
                  n_r: int, n_t: int) -> np.ndarray:
    """G[m, n] = <C_phi f_n, C_phi f_m> on H_alpha, f_n = z^n / |z^n|."""
    from .quadrature import bergman_weighted_rule
    model = WeightModel.bergman(alpha)
    z, w = bergman_weighted_rule(alpha, n_r, n_t)
    phi = np.asarray(symbol.f(z), dtype=complex)
    dphi = np.asarray(symbol.df(z), dtype=complex)
    norms = _h_alpha_norms(alpha, N)
    G = np.zeros((N, N), dtype=complex)
    G[0, 0] = 1.0  # C_phi 1 = 1; cross terms vanish when phi(0) = 0
    # D[k, n-1] = (phi^n)'(z_k) = n phi^(n-1) phi', built incrementally
    D = np.empty((z.size, N - 1), dtype=complex)
    power = np.ones_like(phi)  # phi^(n-1)
    for n in range(1, N):
        D[:, n - 1] = n * power * dphi
        power = power * phi
    inner = (D.conj() * w[:, None]).T @ D
    G[1:, 1:] = inner / np.outer(norms[1:], norms[1:])
    return G


def gram_singular_values(symbol: SymbolSpec, space, N: int, *,
                         n_boundary: int = None, n_r: int = 160,
                         n_t: int = 320,
                         zero_subspace: bool = False) -> SpectrumResult:
    """Singular values of C_phi by Gram truncation.

    ``space`` is "h2" or ("h_alpha", alpha).  The Gram eigenvalues
    increase monotonically to the true squared singular values as N
    grows.  ``zero_subspace`` restricts to {f(0) = 0}, the subspace on
    which the Toeplitz reduction is an exact unitary equivalence.
    """
    if symbol.variant == "univalent_polar":
        raise ValueError("polar symbols have no Gram route; use the "
                         "harmonic-measure pipeline")
    if symbol.variant == "explicit" and not symbol.fixes_origin():
        symbol = _mobius_normalize(symbol)
    if symbol.rotation_scale is not None:
        c = abs(symbol.rotation_scale)
        if space == "h2":
            svals = c ** np.arange(N, dtype=float)
        else:
            _, alpha = space
            svals = c ** np.arange(N, dtype=float)  # C f_n = c^n f_n
        if zero_subspace:
            svals = svals[1:]
        return SpectrumResult(np.sort(svals)[::-1].copy(),
                              truncation_dim=len(svals))
    if space == "h2":
        if n_boundary is None:
            deg = len(symbol.poly_coeffs) - 1 if symbol.poly_coeffs else 8
            n_boundary = max(4096, 4 * N * max(deg, 1) + 8)
        G = _h2_gram(symbol, N, n_boundary)
    else:
        _, alpha = space
        G = _h_alpha_gram(symbol, alpha, N, n_r, n_t)
    if zero_subspace:
        G = G[1:, 1:]
    G = 0.5 * (G + G.conj().T)
    lam = np.linalg.eigvalsh(G)[::-1]
    lam = np.maximum(lam, 0.0)
    return SpectrumResult(np.sqrt(lam), truncation_dim=G.shape[0])


# ----------------------------------------------------------------------
# counting function and the Toeplitz reduction


@dataclass(frozen=True)
class CountingValue:
    value: float
    complete: bool  # False when the preimage search is a lower bound only
    preimages: tuple = ()


def counting_function(symbol: SymbolSpec, model, w: complex,
                      search_depth: int = 24) -> CountingValue:
    """N_{phi,omega}(w) = sum of omega^2 over the preimages of w.

    ``model`` is a WeightModel or None for the unweighted (Dirichlet)
    count.  Polynomial symbols enumerate preimages exactly via the
    companion matrix; univalent symbols solve once by Newton; everything
    else multi-starts Newton on a polar grid and flags the result as a
    lower bound.
    """
    w = complex(w)
    roots = []
    complete = True
    if symbol.poly_coeffs is not None:
        coeffs = np.array(symbol.poly_coeffs, dtype=complex)
        coeffs[0] -= w
        rts = np.roots(coeffs[::-1]) if len(coeffs) > 1 else []
        roots = [r for r in rts if abs(r) < 1.0 - 1e-12]
    else:
        starts = []
        for rr in np.linspace(0.15, 0.95, search_depth):
            for tt in np.linspace(0.0, TWO_PI, search_depth, endpoint=False):
                starts.append(rr * cmath.exp(1j * tt))
        found = []
        for z0 in starts:
            z = z0
            ok = False
            for _ in range(60):
                fz = complex(np.asarray(symbol.f(z)).item()) - w
                if abs(fz) < 1e-12:
                    ok = True
                    break
                dz = complex(np.asarray(symbol.df(z)).item())
                if dz == 0.0:
                    break
                step = fz / dz
                z = z - step
                if abs(z) > 1.5:
                    break
            if ok and abs(z) < 1.0 - 1e-12:
                if all(abs(z - r) > 1e-8 for r in found):
                    found.append(z)
            if symbol.univalent and found:
                break
        roots = found
        complete = symbol.univalent
    total = 0.0
    for r in roots:
        total += (1.0 if model is None
                  else math.exp(log_weight_density(model, r)))
    return CountingValue(total, complete, tuple(roots))


def toeplitz_reduction_measure(symbol: SymbolSpec, alpha: float,
                               grid: int = 0) -> MeasureSpec:
    """The pull-back measure with density N_{phi,alpha} / omega_alpha^2.

    Implemented for the dilations c z, where the density is the exact
    radial expression; general symbols should assemble through the
    counting function directly.
    """
    if symbol.rotation_scale is None:
        raise NotImplementedError(
            "closed-form reduction measure implemented for dilations")
    c = abs(symbol.rotation_scale)

    def g(r):
        r = np.asarray(r, dtype=float)
        return ((1.0 - (r / c) ** 2) / (1.0 - r ** 2)) ** alpha

    def log_g(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return alpha * (np.log1p(-np.minimum((r / c) ** 2, 1.0))
                            - np.log1p(-r ** 2))

    return MeasureSpec.radial(g, log_g=log_g, r_lo=0.0, r_hi=c,
                              label=f"pullback[{c}z,alpha={alpha}]")


# ----------------------------------------------------------------------
# boundary pull-back


@dataclass
class PullbackTable:
    """Masses of Carleson boxes under the boundary pull-back measure."""

    levels: np.ndarray
    indices: np.ndarray
    masses: np.ndarray
    stderr: np.ndarray
    method: str
    max_level: int

    def mass_of(self, n: int, j: int) -> float:
        hit = (self.levels == n) & (self.indices == j)
        return float(self.masses[hit][0]) if np.any(hit) else 0.0

    def level_slice(self, n: int):
        sel = self.levels == n
        return self.indices[sel], self.masses[sel], self.stderr[sel]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "j", "mass", "stderr", "method"])
            for n, j, m, s in zip(self.levels, self.indices, self.masses,
                                  self.stderr):
                w.writerow([n, j, repr(float(m)), repr(float(s)),
                            self.method])


def pullback_boundary(symbol: SymbolSpec, level: int,
                      n_samples: int = None) -> PullbackTable:
    """Empirical box masses of m_phi from equispaced boundary samples.

    Deterministic given the sample grid; the per-box binomial stderr
    quantifies the sampling (not Monte Carlo) granularity.
    """
    if n_samples is None:
        n_samples = max(2 ** (level + 4), 4096)
    if n_samples < 2 ** (level + 4):
        raise ValueError("sampling density insufficient for this level")
    t = TWO_PI * (np.arange(n_samples) + 0.5) / n_samples
    phi = symbol.boundary_values(t)
    r = np.abs(phi)
    ang = np.mod(np.angle(phi), TWO_PI)
    levels, indices, masses, errs = [], [], [], []
    for n in range(1, level + 1):
        inside = r >= 1.0 - 2.0 ** (-n)
        j = np.floor(ang[inside] / (TWO_PI / 2 ** n)).astype(int)
        j = np.minimum(j, 2 ** n - 1)
        counts = np.bincount(j, minlength=2 ** n)
        p_hat = counts / n_samples
        se = np.sqrt(np.maximum(p_hat * (1.0 - p_hat), 0.0) / n_samples)
        for jj in range(2 ** n):
            levels.append(n)
            indices.append(jj)
            masses.append(p_hat[jj])
            errs.append(se[jj])
    return PullbackTable(np.array(levels), np.array(indices),
                         np.array(masses), np.array(errs),
                         "boundary_sampling", level)


# ----------------------------------------------------------------------
# boundary profiles and the rate predictor


@dataclass(frozen=True)
class BoundaryProfile:
    """Polar contact profile 1 - r = gamma(|theta|) near the contact point.

    Families: ``kappa_log``    gamma(t) = kappa t / log(e/t)
              ``kappa_loglog`` gamma(t) = kappa t / (log(e/t) loglog(e^2/t))
              ``power``        gamma(t) = t^q, 0 < q < 1
              ``tabulated``    monotone interpolation of (t, gamma) samples
                               (regularity hypotheses unverified; tagged).

    The first two families satisfy the slow-contact condition
    gamma(t) log(1/t) / t = O(1) and the tail condition
    gamma(t) = O(t / log^beta(1/t)) with beta = 1; the power family does
    not (its predictor branch is super-polynomial).
    """

    family: str
    kappa: float = 1.0
    q: float = 0.5
    ts: tuple = field(default=(), repr=False)
    gs: tuple = field(default=(), repr=False)

    @classmethod
    def kappa_log(cls, kappa: float) -> "BoundaryProfile":
        return cls("kappa_log", kappa=float(kappa))

    @classmethod
    def kappa_loglog(cls, kappa: float) -> "BoundaryProfile":
        return cls("kappa_loglog", kappa=float(kappa))

    @classmethod
    def power(cls, q: float) -> "BoundaryProfile":
        if not 0.0 < q <= 1.0:
            raise ValueError("power profile needs q in (0, 1]")
        return cls("power", q=float(q))

    @classmethod
    def tabulated(cls, ts, gs) -> "BoundaryProfile":
        return cls("tabulated", ts=tuple(map(float, ts)),
                   gs=tuple(map(float, gs)))

    def gamma(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "kappa_log":
            out = self.kappa * t / np.log(math.e / t)
        elif self.family == "kappa_loglog":
            out = self.kappa * t / (np.log(math.e / t)
                                    * np.log(np.log(math.e ** 2 / t)))
        elif self.family == "power":
            out = t ** self.q
        else:
            out = np.interp(t, self.ts, self.gs)
        return out if out.ndim else float(out)

    def gamma_of_y(self, y):
        """gamma(e^(1 - y)) for y = log(e/t) >= 1, evaluated stably."""
        y = np.asarray(y, dtype=float)
        t_log = 1.0 - y  # log t
        if self.family == "kappa_log":
            out = self.kappa * np.exp(t_log) / y
        elif self.family == "kappa_loglog":
            out = self.kappa * np.exp(t_log) / (y * np.log(y + 1.0))
        elif self.family == "power":
            out = np.exp(self.q * t_log)
        else:
            out = np.interp(np.exp(t_log), self.ts, self.gs)
        return out if out.ndim else float(out)

    def gamma_ratio_of_y(self, y):
        """gamma(t)/t at t = e^(1 - y): the overflow-free tail integrand."""
        y = np.asarray(y, dtype=float)
        if self.family == "kappa_log":
            out = self.kappa / y
        elif self.family == "kappa_loglog":
            out = self.kappa / (y * np.log(y + 1.0))
        elif self.family == "power":
            out = np.exp((1.0 - self.q) * (y - 1.0))
        else:
            t = np.exp(1.0 - np.minimum(y, 700.0))
            out = np.interp(t, self.ts, self.gs) / t
        return out if out.ndim else float(out)

    @property
    def slow_contact(self) -> bool:
        """gamma(t) log(1/t)/t bounded as t -> 0 (predictor branch)."""
        return self.family in ("kappa_log", "kappa_loglog")

    @property
    def tail_condition(self) -> bool:
        """gamma(t) = O(t / log^beta(1/t)) for some beta > 1/2."""
        return self.family in ("kappa_log", "kappa_loglog")

    @property
    def hypotheses_verified(self) -> bool:
        return self.family != "tabulated"

    def check_shape(self, n_grid: int = 400) -> bool:
        """gamma increasing, gamma(t)/t increasing, gamma' = O(gamma/t)."""
        t = np.exp(np.linspace(math.log(1e-9), math.log(0.5), n_grid))
        g = self.gamma(t)
        if np.any(np.diff(g) <= 0) or np.any(np.diff(g / t) < -1e-12):
            return False
        dg = np.gradient(g, t)
        return bool(np.all(dg * t <= 40.0 * g))

    def gamma_inverse(self, y: float) -> float:
        """Solve gamma(t) = y on (0, cap]; bisection in log t."""
        lo, hi = -2000.0, math.log(0.99)
        if self.gamma(math.exp(hi)) < y:
            raise ValueError(f"gamma never reaches {y}")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.gamma(math.exp(mid)) < y:
                lo = mid
            else:
                hi = mid
        return math.exp(0.5 * (lo + hi))


@dataclass
class ProfileFunctions:
    """Callable Gamma, Lambda, and the index solver x_n (log-domain)."""

    profile: BoundaryProfile
    _lambda_unit_to_2: float = None

    def gamma_big_of_y(self, y: float) -> float:
        """Gamma at t = e^(1-y): (2/pi) int_1^y gamma(t)/t du, u = log(e/t)."""
        if y <= 1.0:
            return 0.0
        return (2.0 / math.pi) * adaptive_1d(
            self.profile.gamma_ratio_of_y, 1.0, y, rel_tol=1e-11)

    def Gamma(self, t: float) -> float:
        if not 0.0 < t <= 1.0:
            raise ValueError("Gamma is defined for t in (0, 1]")
        return self.gamma_big_of_y(1.0 - math.log(t))

    def lambda_of_y(self, y: float) -> float:
        """Lambda at t = e^(1-y), with gamma continued linearly on (1, 2]."""
        if self._lambda_unit_to_2 is None:
            g1 = self.profile.gamma(1.0)
            self._lambda_unit_to_2 = math.log(2.0) / g1
        if y <= 1.0:
            raise ValueError("Lambda evaluated for t >= 1 is the tail only")
        inner = adaptive_1d(
            lambda u: 1.0 / self.profile.gamma_ratio_of_y(u),
            1.0, y, rel_tol=1e-11)
        return inner + self._lambda_unit_to_2

    def Lambda(self, t: float) -> float:
        if not 0.0 < t <= 1.0:
            raise ValueError("Lambda is tabulated for t in (0, 1]")
        return self.lambda_of_y(1.0 - math.log(t))

    def y_n(self, n: float) -> float:
        """y with Lambda(e^(1-y)) = n, by monotone bisection."""
        lo, hi = 1.0 + 1e-12, 2.0
        while self.lambda_of_y(hi) < n:
            hi *= 2.0
            if hi > 1e9:
                raise NotCompactProfile("Lambda never reaches n")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.lambda_of_y(mid) < n:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-10 * hi:
                break
        return 0.5 * (lo + hi)

    def x_n(self, n: float) -> float:
        """The contact scale with Lambda(x_n) = n (may underflow to 0.0)."""
        return math.exp(1.0 - self.y_n(n))

    def compactness_divergent(self) -> bool:
        """True iff the tail integral Gamma(0+) diverges.

        Probed between two deep scales; the slowest divergent family in
        scope (kappa_loglog) still gains well over the 0.1 threshold,
        while convergent tails gain O(1/y).
        """
        if self.profile.family == "power":
            return True  # integrand blows up exponentially in y
        g1 = self.gamma_big_of_y(55.0)
        g2 = self.gamma_big_of_y(3000.0)
        return g2 > g1 + 0.1


def profile_functions(profile: BoundaryProfile) -> ProfileFunctions:
    """Build the tail-integral machinery, checking compactness."""
    pf = ProfileFunctions(profile)
    if not pf.compactness_divergent():
        raise NotCompactProfile(
            "int_0 gamma(s)/s^2 ds converges: the induced composition "
            "operator is not compact on this scale")
    return pf


def predict_singular_values(profile: BoundaryProfile, alpha: float, n,
                            pf: ProfileFunctions = None):
    """exp(-(alpha/2) Gamma(x_n)) along the slow-contact branch.

    Profiles with gamma(t) log(1/t)/t -> infinity decay faster than every
    power of 1/n; for those SuperPolynomialRate is raised rather than a
    misleading number returned.
    """
    if not profile.slow_contact:
        raise SuperPolynomialRate(
            "contact is too fast for a power-type law: s_n = O(n^-A) "
            "for every A")
    if pf is None:
        pf = profile_functions(profile)
    ns = np.atleast_1d(np.asarray(n, dtype=float))
    out = np.array([math.exp(-0.5 * alpha * pf.gamma_big_of_y(pf.y_n(v)))
                    for v in ns])
    return out if np.ndim(n) else float(out[0])


def predict_dirichlet_rate(profile: BoundaryProfile, n) -> float:
    """sqrt(e^n gamma^{-1}(e^{-n})): the Dirichlet-scale decay law.

    Needs gamma(t)/t -> infinity as t -> 0 (power profiles with q < 1);
    profiles with bounded gamma(t)/t are rejected as non-compact on the
    Dirichlet space.
    """
    if profile.family == "power":
        if profile.q >= 1.0:
            raise NotCompactProfile("gamma(t)/t bounded: not compact on "
                                    "the Dirichlet space")
        ns = np.atleast_1d(np.asarray(n, dtype=float))
        out = np.exp(0.5 * ns * (1.0 - 1.0 / profile.q))
        return out if np.ndim(n) else float(out[0])
    t = np.exp(np.linspace(math.log(1e-9), math.log(1e-2), 64))
    ratio = profile.gamma(t) / t
    if ratio[0] <= ratio[-1] * 2.0:
        raise NotCompactProfile("gamma(t)/t does not blow up at 0")
    ns = np.atleast_1d(np.asarray(n, dtype=float))
    out = np.array([math.sqrt(math.exp(v)
                              * profile.gamma_inverse(math.exp(-v)))
                    for v in ns])
    return out if np.ndim(n) else float(out[0])


# ----------------------------------------------------------------------
# box vs cell sums and the local counting inequality


@dataclass
class BoxCellCompare:
    box_sum: float
    cell_sum: float
    ratio: float
    tail_share: float


def box_cell_sum_compare(table: PullbackTable, h, alpha: float,
                         tail_tolerance: float = 0.10) -> BoxCellCompare:
    """Compare sum h((2^n m(W))^alpha) against the derived cell sum.

    The dyadic cell masses are recovered from the boxes by telescoping,
    m(R_{n,j}) = m(W_{n,j}) - m(W_{n+1,2j}) - m(W_{n+1,2j+1}), and enter
    as h((2^(n+1) m(R))^alpha) -- the product-measure area of a cell is
    half that of its box.  Raises when the deepest level carries more
    than ``tail_tolerance`` of the box sum (truncation-dominated data).
    Measure-based comparisons live in :func:`measure_box_cell_compare`.
    """
    L = table.max_level
    box_terms, box_levels, cell_terms = [], [], []
    for n in range(1, L + 1):
        jj, mm, _ = table.level_slice(n)
        box_terms.extend(np.atleast_1d(h((2.0 ** n * mm) ** alpha)))
        box_levels.extend([n] * len(jj))
        if n < L:
            _, mm1, _ = table.level_slice(n + 1)
            for j, m in zip(jj, mm):
                child = mm1[2 * j] + mm1[2 * j + 1]
                cell_terms.append(
                    h((2.0 ** (n + 1) * max(m - child, 0.0)) ** alpha))
    box_terms = np.asarray(box_terms)
    cell_terms = np.asarray(cell_terms)
    box_levels = np.asarray(box_levels)
    tail_share = 0.0
    if box_terms.sum() > 0:
        tail_share = float(box_terms[box_levels == L].sum()
                           / box_terms.sum())
    box_sum = float(box_terms.sum())
    cell_sum = float(cell_terms.sum())
    if tail_share > tail_tolerance:
        raise RuntimeError(
            f"deepest level holds {tail_share:.1%} of the box sum; "
            "increase the table depth")
    ratio = box_sum / cell_sum if cell_sum > 0 else math.inf
    return BoxCellCompare(box_sum, cell_sum, ratio, tail_share)


def measure_box_cell_compare(mu: MeasureSpec, max_level: int, h,
                             c_box: float = 2.0, c_cell: float = 4.0,
                             tail_tolerance: float = 0.10) -> BoxCellCompare:
    """Lemma-style comparison for a measure: boxes vs dyadic cells."""
    from .lattice import LatticeParams, CARLESON_CELL, enumerate_cells
    from .measures import box_mass, cell_mass
    params = LatticeParams(2, max_level, CARLESON_CELL)
    cells = enumerate_cells(params)
    box_terms, cell_terms, lv = [], [], []
    for c in cells:
        bx = carleson_box(c.level, c.index)
        box_terms.append(h(c_box * box_mass(mu, bx) / bx.area))
        cell_terms.append(h(c_cell * cell_mass(mu, c) / c.area))
        lv.append(c.level)
    box_terms = np.asarray(box_terms)
    cell_terms = np.asarray(cell_terms)
    lv = np.asarray(lv)
    tail_share = float(box_terms[lv == max_level].sum()
                       / box_terms.sum()) if box_terms.sum() > 0 else 0.0
    if tail_share > tail_tolerance:
        raise RuntimeError(
            f"deepest level holds {tail_share:.1%} of the box sum")
    bs, cs = float(box_terms.sum()), float(cell_terms.sum())
    return BoxCellCompare(bs, cs, bs / cs if cs > 0 else math.inf,
                          tail_share)


@dataclass
class LlqrReport:
    sup_counting: float
    sup_is_lower_bound: bool
    m_small: float
    m_big: float
    delta: float
    inflation: float


def llqr_check(symbol: SymbolSpec, zeta: complex, delta: float, *,
               inflation: float = 4.0, grid: int = 12,
               n_samples: int = 1 << 16) -> LlqrReport:
    """Local comparison of the counting function with box pull-back masses.

    sup N_phi over a grid in the box W(zeta, delta) (boundary-distance
    counting sum(1 - |z|^2)), next to m_phi of the delta/inflation and
    delta*inflation boxes.  The inequality constants are existential, so
    only the three numbers are reported.
    """
    a0 = complex(np.asarray(symbol.f(0.0)).item())
    if not delta < (1.0 - abs(a0)) / 16.0:
        raise ValueError("delta must be below (1 - |phi(0)|)/16")
    tz = math.atan2(zeta.imag, zeta.real)
    sup_n = 0.0
    complete = True
    for rr in np.linspace(1.0 - delta, 1.0 - delta * 0.05, grid):
        for tt in np.linspace(tz - delta, tz + delta, grid):
            wpt = rr * cmath.exp(1j * tt)
            cv = counting_function(symbol, None, wpt)
            total = sum(1.0 - abs(r) ** 2 for r in cv.preimages)
            sup_n = max(sup_n, total)
            complete = complete and cv.complete

    def box_mass_phi(d):
        t = TWO_PI * (np.arange(n_samples) + 0.5) / n_samples
        phi = symbol.boundary_values(t)
        ang = np.angle(phi * cmath.exp(-1j * tz))
        inside = (np.abs(phi) >= 1.0 - d) & (np.abs(ang) <= d)
        return float(np.mean(inside))

    return LlqrReport(sup_counting=sup_n, sup_is_lower_bound=not complete,
                      m_small=box_mass_phi(delta / inflation),
                      m_big=box_mass_phi(delta * inflation),
                      delta=delta, inflation=inflation)


def prediction_curve_csv(path, ns, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "predicted_s_n"])
        for n, v in zip(ns, values):
            w.writerow([int(n), repr(float(v))])
