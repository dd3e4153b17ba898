"""Concrete weighted analytic spaces: standard Bergman and Fock models.

A :class:`WeightModel` bundles the weight density omega^2, the reproducing
kernel K, the scale function tau, and the orthonormal monomial basis of the
associated space.  Only the two closed-form families are implemented:

* standard Bergman on the unit disc,  omega^2 = ((alpha+1)/pi)(1-|z|^2)^alpha,
  K(z, w) = (1 - z conj(w))^(-(2+alpha)),  alpha > -1;
* standard Fock on the plane,  omega^2 = (alpha/pi) exp(-alpha |z|^2),
  K(z, w) = exp(alpha z conj(w)),  alpha > 0.

Both satisfy the interface every caller relies on: positive interior weight,
Hermitian kernel with K(z, z) = |K_z|^2, and
``tau^2(z) = 1 / (omega^2(z) |K_z|^2)``.

All Gamma-function ratios are evaluated in the log domain so basis
coefficients remain usable for indices up to 1e4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .quadrature import (bergman_weighted_rule, disc_rule,
                         fock_truncation_radius, fock_weighted_rule)

BERGMAN = "bergman"
FOCK = "fock"


class PointOutsideDomain(ValueError):
    """Evaluation point is not interior to the model's domain."""


@dataclass(frozen=True)
class WeightModel:
    """A concrete weighted space (kind, parameter)."""

    kind: str
    alpha: float

    def __post_init__(self):
        if self.kind == BERGMAN:
            if not self.alpha > -1.0:
                raise ValueError("Bergman weight requires alpha > -1")
        elif self.kind == FOCK:
            if not self.alpha > 0.0:
                raise ValueError("Fock weight requires alpha > 0")
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")

    @classmethod
    def bergman(cls, alpha: float) -> "WeightModel":
        return cls(BERGMAN, float(alpha))

    @classmethod
    def fock(cls, alpha: float) -> "WeightModel":
        return cls(FOCK, float(alpha))

    @property
    def domain(self) -> str:
        return "unit_disc" if self.kind == BERGMAN else "plane"

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.kind == BERGMAN:
            return np.abs(z) < 1.0
        return np.isfinite(z.real) & np.isfinite(z.imag)


@dataclass(frozen=True)
class KernelValue:
    value: complex
    normsq_at_z: float
    normsq_at_w: float


@dataclass(frozen=True)
class ScaleValue:
    tausq: float


def _check_interior(model: WeightModel, *points):
    for z in points:
        if not np.all(model.contains(z)):
            raise PointOutsideDomain(
                f"point {z} outside the open domain of {model.kind}")


def weight_density(model: WeightModel, z):
    """omega^2(z); vectorized over arrays of points."""
    _check_interior(model, z)
    z = np.asarray(z, dtype=complex)
    a = model.alpha
    if model.kind == BERGMAN:
        out = ((a + 1.0) / math.pi) * (1.0 - np.abs(z) ** 2) ** a
    else:
        out = (a / math.pi) * np.exp(-a * np.abs(z) ** 2)
    return out if out.ndim else float(out)


def log_weight_density(model: WeightModel, z):
    """log omega^2(z), stable near the boundary/infinity."""
    _check_interior(model, z)
    z = np.asarray(z, dtype=complex)
    a = model.alpha
    if model.kind == BERGMAN:
        out = math.log((a + 1.0) / math.pi) + a * np.log1p(-np.abs(z) ** 2)
    else:
        out = math.log(a / math.pi) - a * np.abs(z) ** 2
    return out if out.ndim else float(out)


def kernel_value(model: WeightModel, z, w):
    """K(z, w) alone, vectorized; Hermitian: K(z, w) = conj(K(w, z))."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    a = model.alpha
    if model.kind == BERGMAN:
        out = (1.0 - z * np.conj(w)) ** (-(2.0 + a))
    else:
        out = np.exp(a * z * np.conj(w))
    return out if out.ndim else complex(out)


def kernel_normsq(model: WeightModel, z):
    """|K_z|^2 = K(z, z)."""
    z = np.asarray(z, dtype=complex)
    a = model.alpha
    if model.kind == BERGMAN:
        out = (1.0 - np.abs(z) ** 2) ** (-(2.0 + a))
    else:
        out = np.exp(a * np.abs(z) ** 2)
    return out if out.ndim else float(out)


def kernel(model: WeightModel, z: complex, w: complex) -> KernelValue:
    """Reproducing kernel K(z, w) with the two diagonal norms."""
    _check_interior(model, z, w)
    return KernelValue(
        value=complex(kernel_value(model, z, w)),
        normsq_at_z=float(kernel_normsq(model, z)),
        normsq_at_w=float(kernel_normsq(model, w)),
    )


def tau(model: WeightModel, z: complex) -> ScaleValue:
    """Scale function tau^2 = 1 / (omega^2 |K_z|^2).

    Bergman: pi (1-|z|^2)^2 / (1+alpha); Fock: the constant pi/alpha.
    (The definition is followed literally; some references drop the pi.)
    """
    _check_interior(model, z)
    a = model.alpha
    if model.kind == BERGMAN:
        return ScaleValue(tausq=(math.pi / (1.0 + a)) *
                          (1.0 - abs(z) ** 2) ** 2)
    return ScaleValue(tausq=math.pi / a)


def log_orthonormal_basis_coeff(model: WeightModel, n) -> np.ndarray:
    """log c_n with e_n(z) = c_n z^n orthonormal in the model's space."""
    n = np.asarray(n, dtype=float)
    a = model.alpha
    if model.kind == BERGMAN:
        log_csq = gammaln(n + 2.0 + a) - gammaln(n + 1.0) - gammaln(2.0 + a)
    else:
        log_csq = n * math.log(a) - gammaln(n + 1.0)
    return 0.5 * log_csq


def orthonormal_basis_coeff(model: WeightModel, n: int) -> float:
    if n < 0:
        raise ValueError("basis index must be >= 0")
    return float(np.exp(log_orthonormal_basis_coeff(model, n)))


def basis_matrix(model: WeightModel, n_max: int, z: np.ndarray) -> np.ndarray:
    """Matrix E[i, n] = e_n(z_i) for n = 0..n_max-1.

    Built by cumulative products so no intermediate power overflows; the
    caller is responsible for keeping n_max * len(z) within memory.
    """
    z = np.asarray(z, dtype=complex).ravel()
    c = np.exp(log_orthonormal_basis_coeff(model, np.arange(n_max)))
    E = np.empty((z.size, n_max), dtype=complex)
    E[:, 0] = 1.0
    for n in range(1, n_max):
        E[:, n] = E[:, n - 1] * z
    E *= c[None, :]
    return E


def model_area_rule(model: WeightModel, n_r: int = 128, n_t: int = 256):
    """Quadrature nodes/weights for ``integral f dA_omega`` (weight folded in)."""
    if model.kind == BERGMAN:
        return bergman_weighted_rule(model.alpha, n_r, n_t)
    return fock_weighted_rule(model.alpha, n_r, n_t)


def plain_area_rule(model: WeightModel, n_r: int = 256, n_t: int = 256,
                    eps: float = 1e-16):
    """Quadrature nodes/weights for ``integral f dA`` over the model domain.

    The Fock plane is truncated at the radius where the Gaussian weight
    falls below eps, which is where every integrand of interest lives.
    """
    if model.kind == BERGMAN:
        return disc_rule(n_r, n_t)
    return disc_rule(n_r, n_t, r_hi=fock_truncation_radius(model.alpha, eps))
