"""Quadrature rules shared by the spectral modules.

Three kinds of rules live here:

* tensor rules on the disc / plane / annulus sectors, returning complex
  nodes and plain-area weights so that ``sum(w * f(z)) ~ integral f dA``;
* weighted tensor rules that fold the space weight ``omega^2`` into the
  weights (Gauss-Jacobi radially for Bergman, Gauss-Laguerre for Fock),
  which makes moments of polynomials machine-exact;
* adaptive 1-D helpers, including a log-domain variant that integrates
  ``exp(log_f)`` without underflow for radial measures with extreme decay.

Angular integration over a full circle always uses equispaced nodes: for
trigonometric polynomials the rule is exact, which keeps radially symmetric
matrices exactly diagonal.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_jacobi, roots_laguerre, roots_legendre

TWO_PI = 2.0 * np.pi

#: default relative / absolute tolerances for adaptive quadrature
REL_TOL = 1e-10
ABS_TOL = 1e-14


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge.

    Carries the best available bracket so callers never receive a silent
    bad value.
    """

    def __init__(self, message, value=None, error_bound=None):
        super().__init__(message)
        self.value = value
        self.error_bound = error_bound
        if value is not None and error_bound is not None:
            self.interval = (value - error_bound, value + error_bound)
        else:
            self.interval = None


def gauss_legendre(a: float, b: float, order: int):
    """Gauss-Legendre nodes/weights on [a, b]."""
    x, w = roots_legendre(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def angular_nodes(n: int, t_lo: float = 0.0, t_hi: float = TWO_PI):
    """Equispaced midpoint rule on an angular interval.

    Exact for trigonometric polynomials of degree < n on the full circle.
    """
    step = (t_hi - t_lo) / n
    t = t_lo + step * (np.arange(n) + 0.5)
    return t, np.full(n, step)


def disc_rule(n_r: int = 256, n_t: int = 256, r_lo: float = 0.0,
              r_hi: float = 1.0, t_lo: float = 0.0, t_hi: float = TWO_PI):
    """Tensor rule for ``integral f dA`` over an annulus sector of the disc.

    Radial direction is Gauss-Legendre against ``r dr``; angular direction
    is equispaced (full circle) or Gauss-Legendre (proper sector).
    """
    r, wr = gauss_legendre(r_lo, r_hi, n_r)
    full_circle = abs((t_hi - t_lo) - TWO_PI) < 1e-15
    if full_circle:
        t, wt = angular_nodes(n_t, t_lo, t_hi)
    else:
        t, wt = gauss_legendre(t_lo, t_hi, n_t)
    z = r[:, None] * np.exp(1j * t[None, :])
    w = (wr * r)[:, None] * wt[None, :]
    return z.ravel(), w.ravel()


def square_rule(x_lo, x_hi, y_lo, y_hi, n: int = 24):
    """Tensor Gauss-Legendre rule on an axis-parallel rectangle."""
    x, wx = gauss_legendre(x_lo, x_hi, n)
    y, wy = gauss_legendre(y_lo, y_hi, n)
    z = x[:, None] + 1j * y[None, :]
    w = wx[:, None] * wy[None, :]
    return z.ravel(), w.ravel()


def bergman_weighted_rule(alpha: float, n_r: int = 128, n_t: int = 256):
    """Nodes/weights with the Bergman weight folded in.

    Returns (z, w) with ``sum(w * f(z)) ~ integral_D f dA_omega`` where
    ``dA_omega = ((alpha+1)/pi) (1-|z|^2)^alpha dA``.  Radially this is
    Gauss-Jacobi in t = r^2, so polynomial moments up to degree 2*n_r-1
    in t are exact for every alpha > -1.
    """
    t, wt_r = roots_jacobi(n_r, alpha, 0.0)
    # map from [-1, 1] to t = r^2 in [0, 1]; d mu = (1-t)^alpha dt picks up 2^-(alpha+1)
    t = 0.5 * (t + 1.0)
    wt_r = wt_r * 0.5 ** (alpha + 1.0)
    r = np.sqrt(t)
    ang, wa = angular_nodes(n_t)
    z = r[:, None] * np.exp(1j * ang[None, :])
    # (alpha+1)/pi * (1-t)^alpha dt dtheta / 2 ; the Jacobi weight already holds (1-t)^alpha
    w = ((alpha + 1.0) / TWO_PI) * wt_r[:, None] * wa[None, :]
    return z.ravel(), w.ravel()


def fock_weighted_rule(alpha: float, n_r: int = 128, n_t: int = 256):
    """Nodes/weights for ``integral_C f dA_omega`` with the Gaussian weight.

    ``dA_omega = (alpha/pi) exp(-alpha |z|^2) dA``; radial part is scaled
    Gauss-Laguerre in t = alpha r^2, exact for polynomials.
    """
    t, wt = roots_laguerre(n_r)
    r = np.sqrt(t / alpha)
    ang, wa = angular_nodes(n_t)
    z = r[:, None] * np.exp(1j * ang[None, :])
    w = (1.0 / TWO_PI) * wt[:, None] * wa[None, :]
    return z.ravel(), w.ravel()


def fock_truncation_radius(alpha: float, eps: float = 1e-16) -> float:
    """Radius beyond which the Gaussian weight is below eps."""
    return float(np.sqrt(np.log(1.0 / eps) / alpha) + 5.0)


def adaptive_1d(f, a, b, *, rel_tol=REL_TOL, abs_tol=ABS_TOL, points=None):
    """scipy.integrate.quad with an explicit convergence contract."""
    kwargs = {"epsabs": abs_tol, "epsrel": rel_tol, "limit": 200}
    if points is not None:
        pts = [p for p in points if a < p < b]
        if pts:
            kwargs["points"] = pts
    value, err = quad(f, a, b, **kwargs)
    if err > max(rel_tol * abs(value), abs_tol) * 50.0:
        raise QuadratureError(
            f"quadrature on [{a}, {b}] achieved error {err:.3e} "
            f"for value {value:.6e}", value=value, error_bound=err)
    return value


def log_adaptive_1d(log_f, a, b, *, rel_tol=1e-12, probe: int = 257):
    """log of ``integral exp(log_f)`` computed without under/overflow.

    The integrand is rescaled by its maximum over a probe grid before
    calling adaptive quadrature; returns -inf for an identically
    -inf integrand.
    """
    grid = np.linspace(a, b, probe)
    vals = np.asarray(log_f(grid), dtype=float)
    m = float(np.max(vals))
    if not np.isfinite(m):
        return -np.inf
    peak = float(grid[int(np.argmax(vals))])

    def scaled(x):
        return np.exp(log_f(x) - m)

    value = adaptive_1d(scaled, a, b, rel_tol=rel_tol, abs_tol=0.0,
                        points=[peak])
    if value <= 0.0:
        return -np.inf
    return m + float(np.log(value))
