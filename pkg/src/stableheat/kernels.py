"""Closed-form kernels of the killed stable process and the catalog of
survival comparability profiles.

The unit ball's Green function, exit law and expected exit time are
explicit; the exterior ball has an explicit Martin kernel via an
incomplete Beta-type integral; the punctured line (d = 1 < alpha) has an
explicit Green function.  Around these, ``survival_profile`` packages the
comparability shape S(t, x) for P^x(tau_D > t) for every domain the
catalog covers; the unknown two-sided constants are left to empirical
measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import exp, lgamma, log, pi, sin
from typing import Optional

import numpy as np
from scipy import integrate

from . import domains as dom
from .errors import MissingParameterError, UnsupportedRegimeError
from .stable import StableParams, free_density, incomplete_kernel_integral

__all__ = [
    "Bracket",
    "SurvivalProfile",
    "ball_green",
    "ball_poisson",
    "ball_exit_tail",
    "ball_exit_tail_exact",
    "expected_exit_time_ball",
    "exterior_ball_martin",
    "punctured_line_green",
    "survival_profile",
    "heat_kernel_profile",
]


@dataclass(frozen=True)
class Bracket:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("bracket must satisfy lower <= upper")


def _green_constant(d: int, alpha: float) -> float:
    return exp(lgamma(d / 2) - alpha * math.log(2) - (d / 2) * math.log(pi) - 2 * lgamma(alpha / 2))


def _poisson_constant(d: int, alpha: float) -> float:
    return exp(lgamma(d / 2) - (1 + d / 2) * math.log(pi)) * sin(pi * alpha / 2)


def ball_green(params: StableParams, center, radius: float, x, v) -> float:
    """Green function of an open ball; +inf on the diagonal when d >= alpha.

    G(x, v) = B |x-v|^{alpha-d} * int_0^w s^{alpha/2-1} (1+s)^{-d/2} ds with
    w = (r^2-|x-c|^2)(r^2-|v-c|^2)/|x-v|^2; symmetric in (x, v).
    """
    d, a = params.d, params.alpha
    c = np.atleast_1d(np.asarray(center, dtype=float))
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    va = np.atleast_1d(np.asarray(v, dtype=float))
    qx = radius ** 2 - float(np.sum((xa - c) ** 2))
    qv = radius ** 2 - float(np.sum((va - c) ** 2))
    if qx <= 0 or qv <= 0:
        raise ValueError("both arguments must lie in the open ball")
    z = float(np.linalg.norm(xa - va))
    B = _green_constant(d, a)
    if z == 0.0:
        if d >= a:
            return math.inf
        # d = 1 < alpha: the diagonal limit is finite
        return B * (2.0 / (a - 1.0)) * qx ** ((a - 1.0) / 2.0)
    w = qx * qv / (z * z)
    return B * z ** (a - d) * incomplete_kernel_integral(a / 2, d / 2, w)


def ball_poisson(params: StableParams, center, radius: float, x, y) -> float:
    """Exit-position density from an open ball (lives strictly outside it)."""
    d, a = params.d, params.alpha
    c = np.atleast_1d(np.asarray(center, dtype=float))
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    qx = radius ** 2 - float(np.sum((xa - c) ** 2))
    qy = float(np.sum((ya - c) ** 2)) - radius ** 2
    if qx <= 0:
        raise ValueError("source point must lie in the open ball")
    if qy <= 0:
        raise ValueError("exit-position density lives outside the closed ball")
    z = float(np.linalg.norm(xa - ya))
    return _poisson_constant(d, a) * (qx / qy) ** (a / 2) * z ** (-d)


def expected_exit_time_ball(params: StableParams, center, radius: float, x) -> float:
    """E^x tau for the ball: c(d, alpha) (r^2 - |x-c|^2)^{alpha/2}."""
    d, a = params.d, params.alpha
    c = np.atleast_1d(np.asarray(center, dtype=float))
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    q = radius ** 2 - float(np.sum((xa - c) ** 2))
    if q < -1e-12 * radius ** 2:
        raise ValueError("point must lie in the closed ball")
    q = max(q, 0.0)
    const = exp(
        (1 - a) * math.log(2) + lgamma(d / 2) - math.log(a) - lgamma((d + a) / 2) - lgamma(a / 2)
    )
    return const * q ** (a / 2)


def ball_exit_tail_exact(params: StableParams, x, R: float) -> float:
    """P^x(|exit from B(0,1)| > R) by quadrature of the exit density (d <= 3)."""
    d, a = params.d, params.alpha
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    nx = float(np.linalg.norm(xa))
    if nx >= 1.0:
        raise ValueError("x must lie in the open unit ball")
    if R <= 1.0:
        raise ValueError("tail threshold must exceed the ball radius")
    C = _poisson_constant(d, a)
    qx = (1.0 - nx * nx) ** (a / 2)
    if d == 1:
        def f(y):
            return C * qx * (y * y - 1.0) ** (-a / 2) * (abs(y - nx) ** -1 + abs(y + nx) ** -1)

        v, _ = integrate.quad(f, R, np.inf, epsabs=1e-12, epsrel=1e-10, limit=300)
        return v
    if d in (2, 3):
        ang_w = (lambda th: 1.0) if d == 2 else math.sin
        ang_c = 2.0 if d == 2 else 2.0 * pi

        def inner(rho):
            g = lambda th: (
                rho ** 2 + nx ** 2 - 2 * rho * nx * math.cos(th)
            ) ** (-d / 2) * ang_w(th)
            val, _ = integrate.quad(g, 0.0, pi, epsabs=1e-12, epsrel=1e-10, limit=200)
            return val * ang_c * rho ** (d - 1) * C * qx * (rho * rho - 1.0) ** (-a / 2)

        v, _ = integrate.quad(inner, R, np.inf, epsabs=1e-11, epsrel=1e-9, limit=200)
        return v
    raise UnsupportedRegimeError("exact exit tails implemented for d <= 3")


@lru_cache(maxsize=32)
def _tail_comparability(d: int, alpha: float) -> tuple:
    """Measured two-sided constants of the tail comparator, cached per (d, alpha)."""
    params = StableParams(d, alpha)
    lo, hi = math.inf, 0.0
    for nx in (0.0, 0.3, 0.6, 0.9):
        x = np.zeros(d)
        x[0] = nx
        for R in (2.0, 4.0, 8.0):
            exact = ball_exit_tail_exact(params, x, R)
            comp = (1.0 - nx) ** (alpha / 2) / R ** alpha
            ratio = exact / comp
            lo, hi = min(lo, ratio), max(hi, ratio)
    return lo, hi


def ball_exit_tail(params: StableParams, x, R: float) -> Bracket:
    """Two-sided comparator for P^x(|exit from B(0,1)| > R), R >= 2.

    The comparator is (1-|x|)^{alpha/2} R^{-alpha}; the bracket scales it
    by constants measured once per (d, alpha) by quadrature of the exit
    density over a reference grid.
    """
    if R < 2.0:
        raise ValueError("the comparator is stated for R >= 2")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    nx = float(np.linalg.norm(xa))
    if nx >= 1.0:
        raise ValueError("x must lie in the open unit ball")
    comp = (1.0 - nx) ** (params.alpha / 2) / R ** params.alpha
    lo, hi = _tail_comparability(params.d, params.alpha)
    return Bracket(lo * comp, hi * comp)


def exterior_ball_martin(params: StableParams, x, raw: bool = False) -> float:
    """Martin kernel at infinity of the exterior unit ball, d > alpha.

    M(x) = c * int_0^{|x|^2-1} s^{alpha/2-1} (1+s)^{-d/2} ds, normalized so
    that M = 1 at |x| = 2.  ``raw=True`` skips the normalization.
    """
    d, a = params.d, params.alpha
    if not d > a:
        raise UnsupportedRegimeError(
            "the Martin-kernel route needs d > alpha; use the d = 1 "
            "recurrent variants otherwise"
        )
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    nx = float(np.linalg.norm(xa))
    if nx < 1.0:
        raise ValueError("x must satisfy |x| >= 1")
    val = incomplete_kernel_integral(a / 2, d / 2, nx * nx - 1.0)
    if raw:
        return val
    return val / incomplete_kernel_integral(a / 2, d / 2, 3.0)


def punctured_line_green(alpha: float, x: float, y: float) -> float:
    """Green function of R minus the origin, for 1 < alpha < 2:
    c_a (|y|^{a-1} + |x|^{a-1} - |y-x|^{a-1})."""
    if not (1.0 < alpha < 2.0):
        raise UnsupportedRegimeError("the punctured line needs 1 < alpha < 2")
    ca = 1.0 / (-2.0 * math.gamma(alpha) * math.cos(pi * alpha / 2))
    g = ca * (abs(y) ** (alpha - 1) + abs(x) ** (alpha - 1) - abs(y - x) ** (alpha - 1))
    return max(g, 0.0)


# ---------------------------------------------------------------------------
# survival profiles


@dataclass(frozen=True)
class SurvivalProfile:
    """Comparability shape S(t, x) for the survival probability.

    ``evaluate`` returns a single value clamped to [0, 1]; the two-sided
    tangent-ball form is a genuine bracket, for which ``evaluate`` returns
    the upper envelope and ``evaluate_bracket`` both sides.  Values are
    comparators, not probabilities: the missing constants are measured by
    the sweep harness.
    """

    domain: dom.Domain
    params: StableParams
    form: str
    beta: Optional[float] = None
    lambda1: Optional[float] = None
    scale_r: Optional[float] = None
    complement_diam: Optional[float] = None

    def evaluate(self, t: float, x) -> float:
        return self.evaluate_bracket(t, x).upper

    def evaluate_bracket(self, t: float, x) -> Bracket:
        if t <= 0:
            raise ValueError("time must be positive")
        d = dom.dim(self.domain)
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if xa.size != d:
            raise ValueError(f"point has {xa.size} coordinates, expected {d}")
        if not dom.contains(self.domain, xa):
            return Bracket(0.0, 0.0)
        delta = dom.dist_to_complement(self.domain, xa)
        a = self.params.alpha
        ts = t ** (1.0 / a)

        if self.form == "ball":
            r = self.domain.radius
            v = min(1.0, delta / min(r, ts)) ** (a / 2)
            if self.lambda1 is not None:
                v *= exp(-self.lambda1 * t / r ** a)
            return _clamp_pair(v, v)

        if self.form == "halfspace":
            v = min(1.0, delta / ts) ** (a / 2)
            return _clamp_pair(v, v)

        if self.form == "exterior_gt":  # d > alpha, radius-1 units via scaling
            R = self.domain.radius
            dl, tl = delta / R, t / R ** a
            v = min(1.0, dl ** (a / 2) / min(1.0, tl ** 0.5))
            return _clamp_pair(v, v)

        if self.form == "exterior_log":  # d = alpha = 1
            R = self.domain.radius
            dl, tl = delta / R, t / R ** a
            v = min(1.0, math.log1p(dl ** 0.5) / math.log1p(tl ** 0.5))
            return _clamp_pair(v, v)

        if self.form == "exterior_rec":  # d = 1 < alpha
            R = self.domain.radius
            dl, tl = delta / R, t / R ** a
            g = lambda s: min(s ** (a - 1), s ** (a / 2))
            v = g(dl) / g(max(tl ** (1.0 / a), dl))
            return _clamp_pair(v, v)

        if self.form == "cone":
            nx = float(np.linalg.norm(xa))
            v = min(1.0, delta / ts) ** (a / 2) * min(1.0, nx / ts) ** (self.beta - a / 2)
            return _clamp_pair(v, v)

        if self.form == "hyperplane":
            v = min(1.0, delta / ts) ** (a - 1.0)
            return _clamp_pair(v, v)

        if self.form == "interval_complement":
            if a > 1.0:
                num = min(delta ** (a - 1.0), delta ** (a / 2))
                den = min(t ** (1.0 - 1.0 / a), t ** 0.5)
                v = min(1.0, num / den)
            else:
                v = min(1.0, math.log1p(delta ** 0.5) / math.log1p(t ** 0.5))
            return _clamp_pair(v, v)

        if self.form == "c11":
            r = self.scale_r
            plain = min(1.0, delta / min(r, ts)) ** (a / 2) if math.isfinite(r) else min(
                1.0, delta / ts
            ) ** (a / 2)
            lo = plain * exp(-self.lambda1 * t / max(r, delta) ** a) if math.isfinite(r) else plain
            diam = self.complement_diam
            if diam is not None and math.isfinite(diam) and self.params.d > a:
                lo = max(lo, (min(r, diam) / diam) ** a * plain)
            return _clamp_pair(lo, plain)

        raise UnsupportedRegimeError(f"no profile form {self.form!r}")


def _clamp_pair(lo: float, hi: float) -> Bracket:
    lo = min(max(lo, 0.0), 1.0)
    hi = min(max(hi, 0.0), 1.0)
    return Bracket(min(lo, hi), hi)


def survival_profile(
    domain: dom.Domain,
    params: StableParams,
    *,
    beta: Optional[float] = None,
    lambda1: Optional[float] = None,
    c11: bool = False,
) -> SurvivalProfile:
    """Build the comparability profile for a catalog domain.

    The exterior-ball regime (d > alpha, d = alpha = 1, d = 1 < alpha) is
    selected from the parameters.  Cones need an exponent ``beta`` unless
    the aperture is pi/2 (half-space, beta = alpha/2) or one is stored on
    the domain.  ``c11=True`` requests the two-sided tangent-ball bracket
    instead of the variant's native form; it needs ``lambda1``.
    """
    d, a = params.d, params.alpha
    if dom.dim(domain) != d:
        raise ValueError("domain dimension does not match the parameters")

    if c11:
        r = dom.c11_scale(domain)
        if r is None:
            raise UnsupportedRegimeError(
                f"{type(domain).__name__} has no tangent-ball scale"
            )
        if lambda1 is None and math.isfinite(r):
            raise MissingParameterError(
                "the two-sided tangent-ball bracket needs a calibrated lambda1"
            )
        diam = dom.complement_diameter(domain)
        return SurvivalProfile(
            domain, params, "c11", lambda1=lambda1, scale_r=r,
            complement_diam=diam if math.isfinite(diam) else None,
        )

    if isinstance(domain, dom.Ball):
        return SurvivalProfile(domain, params, "ball", lambda1=lambda1)
    if isinstance(domain, dom.HalfSpace):
        return SurvivalProfile(domain, params, "halfspace")
    if isinstance(domain, dom.ExteriorBall):
        if d > a:
            return SurvivalProfile(domain, params, "exterior_gt")
        if d == 1 and a == 1.0:
            return SurvivalProfile(domain, params, "exterior_log")
        if d == 1 and a > 1.0:
            return SurvivalProfile(domain, params, "exterior_rec")
        raise UnsupportedRegimeError(
            f"exterior ball with d={d}, alpha={a} falls outside the catalog"
        )
    if isinstance(domain, dom.CircularCone):
        b = beta if beta is not None else domain.beta
        if b is None and abs(domain.angle - pi / 2) < 1e-12:
            b = a / 2
        if b is None:
            raise MissingParameterError(
                "cone profile needs an exponent beta (known or estimated)"
            )
        return SurvivalProfile(domain, params, "cone", beta=float(b))
    if isinstance(domain, dom.HyperplaneComplement):
        if a <= 1.0:
            raise UnsupportedRegimeError("the hyperplane-complement profile needs alpha > 1")
        return SurvivalProfile(domain, params, "hyperplane")
    if isinstance(domain, dom.IntervalComplement):
        if a < 1.0:
            raise UnsupportedRegimeError(
                "the interval-complement profile covers the recurrent range alpha >= 1"
            )
        return SurvivalProfile(domain, params, "interval_complement")
    raise UnsupportedRegimeError(
        f"no closed survival profile for {type(domain).__name__}"
    )


def heat_kernel_profile(
    domain: dom.Domain,
    params: StableParams,
    t: float,
    x,
    y,
    *,
    profile: Optional[SurvivalProfile] = None,
    **profile_kwargs,
) -> Bracket:
    """Factorized comparator S(t,x) p(t,x,y) S(t,y) as a bracket.

    Lower and upper coincide except for bracket-valued profiles.  The true
    killed kernel is comparable to this within constants that the sweep
    harness measures; nothing here asserts their value.
    """
    if profile is None:
        profile = survival_profile(domain, params, **profile_kwargs)
    bx = profile.evaluate_bracket(t, x)
    by = profile.evaluate_bracket(t, y)
    p = free_density(params, t, x, y).value
    return Bracket(bx.lower * p * by.lower, bx.upper * p * by.upper)
