"""Rate families, cut-power test functions, and two-sided rate verdicts.

The package certifies statements of the form ``a_n ~ 1/rho(n)`` (two-sided,
up to constants) operationally: the profile ``a_n * rho(n)`` must stay
inside a declared multiplicative band over a declared index window.  The
lemma oracles below reproduce the summation arguments that convert trace
sandwiches into such verdicts, so theorem-level tests can exercise both
directions independently.

All profile arithmetic runs in the log domain: lattice rearrangements of
strongly decaying measures produce values far below the double-precision
floor, and exponential rate families overflow otherwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

_LOG_EPS = -745.0  # under exp() this is 5e-324, the subnormal floor


class WindowTooShort(ValueError):
    """Verdict window has fewer than the minimum number of points."""


class TailCertificateError(RuntimeError):
    """Truncated sums cannot be certified against their infinite tails."""


@dataclass(frozen=True)
class CutPowerFunction:
    """h(t) = max(t^beta - delta, 0); convex iff beta >= 1.

    For beta in (0, 1], h(t)/t^p is increasing for every p <= beta, which
    is the property the concave--branch trace comparisons need.
    """

    beta: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if self.delta < 0.0:
            raise ValueError("delta must be nonnegative")

    @property
    def is_convex(self) -> bool:
        return self.beta >= 1.0

    @property
    def p_increasing(self) -> float:
        """Largest p with h(t)/t^p increasing."""
        return min(self.beta, 1.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.maximum(t ** self.beta - self.delta, 0.0)
        return out if out.ndim else float(out)

    def of_log(self, log_t):
        """h(exp(log_t)) evaluated without underflow in t."""
        log_t = np.asarray(log_t, dtype=float)
        lb = self.beta * log_t
        out = np.where(lb > _LOG_EPS, np.exp(np.maximum(lb, _LOG_EPS)), 0.0)
        out = np.maximum(out - self.delta, 0.0)
        return out if out.ndim else float(out)


# ----------------------------------------------------------------------
# rate functions


@dataclass(frozen=True)
class RateFunction:
    """Increasing positive rate rho on [1, inf) with declared regularity.

    ``a_upper`` is an exponent with rho(x)/x^a_upper nonincreasing;
    ``gamma_lower`` (optional) one with rho(x)/x^gamma_lower nondecreasing.
    Families: power, power_log, log_power, exp, tabulated.
    """

    family: str
    a: float = 1.0
    b: float = 0.0
    c: float = 1.0
    grid: tuple = field(default=(), repr=False)
    values: tuple = field(default=(), repr=False)

    @classmethod
    def power(cls, a: float) -> "RateFunction":
        return cls("power", a=float(a))

    @classmethod
    def power_log(cls, a: float, b: float) -> "RateFunction":
        return cls("power_log", a=float(a), b=float(b))

    @classmethod
    def log_power(cls, b: float) -> "RateFunction":
        return cls("log_power", b=float(b))

    @classmethod
    def exp(cls, c: float) -> "RateFunction":
        return cls("exp", c=float(c))

    @classmethod
    def tabulated(cls, grid, values) -> "RateFunction":
        grid = tuple(float(g) for g in grid)
        values = tuple(float(v) for v in values)
        if any(v <= 0 for v in values):
            raise ValueError("tabulated rate must be positive")
        return cls("tabulated", grid=grid, values=values)

    def log_rho(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "power":
            out = self.a * np.log(x)
        elif self.family == "power_log":
            out = self.a * np.log(x) + self.b * np.log(np.log(math.e + x))
        elif self.family == "log_power":
            out = self.b * np.log(np.log(math.e + x))
        elif self.family == "exp":
            out = self.c * x
        elif self.family == "tabulated":
            out = np.interp(np.log(x), np.log(self.grid),
                            np.log(self.values))
        else:  # pragma: no cover
            raise ValueError(self.family)
        return out if out.ndim else float(out)

    def __call__(self, x):
        out = np.exp(self.log_rho(x))
        return out if getattr(out, "ndim", 0) else float(out)

    @property
    def a_upper(self) -> float:
        """Exponent with rho(x)/x^a_upper nonincreasing on [1, inf)."""
        if self.family == "power":
            return self.a
        if self.family == "power_log":
            # x d/dx log log(e+x) <= 0.33 on [1, inf)
            return self.a + max(self.b, 0.0) * 0.33
        if self.family == "log_power":
            return max(self.b, 0.0) * 0.33
        if self.family == "exp":
            return math.inf
        g = np.asarray(self.grid)
        v = np.log(np.asarray(self.values))
        slopes = np.diff(v) / np.diff(np.log(g))
        return float(np.max(slopes))

    @property
    def gamma_lower(self) -> float:
        """Exponent with rho(x)/x^gamma_lower nondecreasing (0 if none)."""
        if self.family == "power":
            return self.a
        if self.family == "power_log":
            return self.a if self.b >= 0.0 else max(self.a - 0.5, 0.0)
        if self.family in ("log_power", "tabulated"):
            return 0.0
        return math.inf

    def verify_regularity(self, n_grid: int = 1000, x_max: float = 1e6):
        """Check the declared exponents on a log grid; raises on violation."""
        x = np.exp(np.linspace(0.0, math.log(x_max), n_grid))
        lr = self.log_rho(x)
        au = self.a_upper
        if np.isfinite(au):
            f = lr - au * np.log(x)
            if np.any(np.diff(f) > 1e-9):
                raise ValueError(f"rho(x)/x^{au} is not decreasing")
        gl = self.gamma_lower
        if gl > 0.0 and np.isfinite(gl):
            f = lr - gl * np.log(x)
            if np.any(np.diff(f) < -1e-9):
                raise ValueError(f"rho(x)/x^{gl} is not increasing")
        return True


def rate_inverse(rho: RateFunction, y: float) -> float:
    """rho^{-1}(y): closed form when available, else monotone bisection."""
    if y < rho(1.0):
        raise ValueError(f"y = {y} below rho(1) = {rho(1.0)}")
    if rho.family == "power":
        return float(y ** (1.0 / rho.a))
    if rho.family == "exp":
        return float(math.log(y) / rho.c)
    lo, hi = 1.0, 2.0
    log_y = math.log(y)
    while rho.log_rho(hi) < log_y:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise ValueError("rate inverse out of range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if rho.log_rho(mid) < log_y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class AsympVerdict:
    """Outcome of a two-sided rate comparison on an index window."""

    status: str  # "equivalent" | "upper_only" | "fails"
    c_low: float
    c_high: float
    window: tuple
    spread: float
    ratio_profile: np.ndarray = field(repr=False, default=None)

    @property
    def is_equivalent(self) -> bool:
        return self.status == "equivalent"

    def to_json(self) -> str:
        return json.dumps({
            "status": self.status,
            "c_low": self.c_low,
            "c_high": self.c_high,
            "window": list(self.window),
            "spread": self.spread,
        })


def verdict(a, rho: RateFunction, window=(16, 256), spread: float = 16.0,
            *, log_a=None, min_points: int = 16) -> AsympVerdict:
    """Classify a decreasing sequence against the rate 1/rho.

    ``a`` is 1-indexed conceptually: a[0] is a_1.  The profile
    ``r_n = a_n * rho(n)`` is examined on the window:

    * equivalent  -- max/min of r over the window <= spread;
    * upper_only  -- bounded above with r trending monotonically to 0
      (second-half sup at most half the first-half sup);
    * fails       -- anything else (unbounded ratios, dead sequence, ...).
    """
    if log_a is None:
        a = np.asarray(a, dtype=float)
        with np.errstate(divide="ignore"):
            log_a = np.where(a > 0.0, np.log(np.maximum(a, 1e-320)), -np.inf)
    else:
        log_a = np.asarray(log_a, dtype=float)
    lo, hi = int(window[0]), int(window[1])
    if lo < 1 or hi > log_a.size:
        raise WindowTooShort(
            f"window [{lo}, {hi}] outside the sequence of {log_a.size} terms")
    if hi - lo + 1 < min_points:
        raise WindowTooShort(
            f"window [{lo}, {hi}] has fewer than {min_points} points")
    n = np.arange(lo, hi + 1, dtype=float)
    log_r = log_a[lo - 1:hi] + rho.log_rho(n)
    profile = np.exp(np.clip(log_r, _LOG_EPS, 700.0))
    if not np.all(np.isfinite(log_r)):
        return AsympVerdict("fails", 0.0, math.inf, (lo, hi), spread, profile)
    top = float(np.max(log_r))
    bot = float(np.min(log_r))
    if top - bot <= math.log(spread):
        return AsympVerdict("equivalent", math.exp(bot), math.exp(top),
                            (lo, hi), spread, profile)
    half = log_r.size // 2
    sup_first = float(np.max(log_r[:half]))
    sup_second = float(np.max(log_r[half:]))
    min_second = float(np.min(log_r[half:]))
    decreasing = (sup_second <= sup_first - math.log(2.0)
                  and min_second <= bot + 1e-12)
    if decreasing:
        return AsympVerdict("upper_only", 0.0, math.exp(top), (lo, hi),
                            spread, profile)
    return AsympVerdict("fails", math.exp(bot), math.exp(top), (lo, hi),
                        spread, profile)


# ----------------------------------------------------------------------
# lemma oracles


def _check_tail(log_terms_at_end: float, delta: float, beta: float):
    """The truncated h_{beta,delta} sums are exact iff end terms die."""
    return beta * log_terms_at_end <= math.log(delta) if delta > 0 else False


def lemma_a1_oracle(a, rho: RateFunction, B: float, beta: float = 1.0,
                    delta_grid=None, *, log_a=None) -> bool:
    """Two-sided cut-power sandwich between a_n and 1/rho(n).

    Checks, for every delta in the grid,

        sum h_{beta,delta}(1/(B rho(n)))
            <= sum h_{beta,delta}(a_n)
            <= sum h_{beta,delta}(B/rho(n)),

    with truncation certified: each delta must exceed the last retained
    term on all three sums (then the discarded tails vanish identically).
    """
    if log_a is None:
        a = np.asarray(a, dtype=float)
        with np.errstate(divide="ignore"):
            log_a = np.where(a > 0, np.log(np.maximum(a, 1e-320)), -np.inf)
    else:
        log_a = np.asarray(log_a, dtype=float)
    N = log_a.size
    n = np.arange(1, N + 1, dtype=float)
    log_rho_n = rho.log_rho(n)
    log_B = math.log(B)
    if delta_grid is None:
        # geometric grid above every truncation floor
        floor = beta * max(log_a[-1], log_B - log_rho_n[-1])
        top = beta * max(np.max(log_a), log_B - log_rho_n[0])
        if not np.isfinite(floor):
            floor = _LOG_EPS / 2
        lo = max(floor + 1e-9, math.log(1e-300))
        if lo >= top:
            raise TailCertificateError("sequence too short for any valid delta")
        delta_grid = np.exp(np.linspace(lo, min(top, 0.0), 25))
    h_terms_mid = log_a
    h_terms_hi = log_B - log_rho_n
    h_terms_lo = -log_B - log_rho_n
    for delta in np.atleast_1d(delta_grid):
        if delta <= 0:
            raise ValueError("delta grid must be positive")
        tail_ok = all(beta * float(t[-1]) <= math.log(delta) + 1e-12
                      for t in (h_terms_mid, h_terms_hi, h_terms_lo))
        if not tail_ok:
            raise TailCertificateError(
                f"delta = {delta:g} below the truncation floor")
        h = CutPowerFunction(beta, float(delta))
        s_lo = float(np.sum(h.of_log(h_terms_lo)))
        s_mid = float(np.sum(h.of_log(h_terms_mid)))
        s_hi = float(np.sum(h.of_log(h_terms_hi)))
        tol = 1e-12 * max(s_hi, 1.0)
        if not (s_lo <= s_mid + tol and s_mid <= s_hi + tol):
            return False
    return True


def _concave_piecewise_sum(log_terms, delta: float, p: float) -> float:
    """sum h(t_n) for h(t) = t (t < delta), delta^(1-p) t^p (t >= delta)."""
    log_terms = np.asarray(log_terms, dtype=float)
    log_d = math.log(delta)
    small = log_terms < log_d
    s = float(np.sum(np.exp(np.maximum(log_terms[small], _LOG_EPS))))
    big = np.exp(np.maximum((1.0 - p) * log_d + p * log_terms[~small],
                            _LOG_EPS))
    return s + float(np.sum(big))


def lemma_a2_oracle(a, rho: RateFunction, B: float, p: float,
                    delta_grid=None, *, log_a=None) -> bool:
    """Concave-branch comparison with the piecewise test functions.

    For h(t) = min(t, delta^(1-p) t^p) (increasing, concave, h(t)/t^p
    increasing) checks

        (1/B) sum h(1/rho(n)) <= sum h(a_n) <= B sum h(1/rho(n))

    over a delta grid.  Requires declared regularity rho(t)/t^gamma
    increasing for some gamma > 1.
    """
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie in (0, 1)")
    if rho.gamma_lower <= 1.0:
        raise ValueError("lemma needs rho(t)/t^gamma increasing, gamma > 1")
    if log_a is None:
        a = np.asarray(a, dtype=float)
        with np.errstate(divide="ignore"):
            log_a = np.where(a > 0, np.log(np.maximum(a, 1e-320)), -np.inf)
    else:
        log_a = np.asarray(log_a, dtype=float)
    N = log_a.size
    n = np.arange(1, N + 1, dtype=float)
    log_ref = -rho.log_rho(n)
    if delta_grid is None:
        delta_grid = np.exp(np.linspace(max(float(log_ref[-1]),
                                            math.log(1e-280)),
                                        float(log_ref[0]), 17))
    for delta in np.atleast_1d(delta_grid):
        s_ref = _concave_piecewise_sum(log_ref, float(delta), p)
        s_a = _concave_piecewise_sum(log_a, float(delta), p)
        tol = 1e-12 * max(s_ref, s_a, 1.0)
        if not (s_ref / B - tol <= s_a <= B * s_ref + tol):
            return False
    return True


def majorization_transfer(a, b, p: float, h: CutPowerFunction) -> bool:
    """Prefix-domination in the 1/p-th powers transfers through h.

    Verifies the hypothesis ``sum_{k<=n} a_k^(1/p) <= sum_{k<=n} b_k^(1/p)``
    on every prefix and, when it holds, asserts the conclusion
    ``sum_{k<=n} h(a_k) <= sum_{k<=n} h(b_k)`` on every prefix; returns the
    conjunction.  Requires h(t^p) convex, i.e. beta * p >= 1.
    """
    if p < 1.0:
        raise ValueError("p must be >= 1")
    if h.beta * p < 1.0 - 1e-12:
        raise ValueError("h(t^p) must be convex (beta * p >= 1)")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("sequences must have equal length")
    pref_a = np.cumsum(a ** (1.0 / p))
    pref_b = np.cumsum(b ** (1.0 / p))
    tol = 1e-12 * max(float(pref_b[-1]), 1.0)
    hypothesis = bool(np.all(pref_a <= pref_b + tol))
    if not hypothesis:
        return False
    ha = np.cumsum(h(a))
    hb = np.cumsum(h(b))
    tol = 1e-12 * max(float(hb[-1]), 1.0)
    return bool(np.all(ha <= hb + tol))
