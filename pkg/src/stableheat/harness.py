"""Empirical verification: exact identities at quadrature tolerance and
comparability-constant sweeps for the two-sided estimates.

The factorization and profile sweeps measure the constants that the
two-sided bounds leave unspecified.  A report collects per-cell ratios,
their spread, and an empirical constant C = max(max_ratio, 1/min_ratio);
"holding" means C is finite and stable under sample doubling, not that it
matches any particular value.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from . import domains as dom
from . import kernels
from . import montecarlo as mc
from .errors import EstimateDiagnostic, InconclusiveError
from .stable import (
    StableParams,
    free_density,
    incomplete_kernel_integral,
    levy_symbol_quadrature,
    peak_density,
)

#: cells whose relative standard error exceeds this are flagged and
#: excluded from ratio statistics
NOISE_FLAG_THRESHOLD = 0.25

#: default near-boundary cap: grid points keep delta >= this fraction of
#: the domain scale (closer cells need more than desk-scale n)
BOUNDARY_CAP = 0.02


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Cell:
    t: float
    x: tuple
    y: Optional[tuple]
    ratio: Optional[float]
    rel_stderr: Optional[float]
    flag: str  # ok | noisy | outside_guarantee | diagnostic


@dataclass(frozen=True)
class RatioReport:
    domain: dict
    params: StableParams
    t_values: tuple
    cells: tuple
    ratios: tuple
    min_ratio: float
    max_ratio: float
    q05: float
    q50: float
    q95: float
    empirical_C: float
    stderr_flags: int

    def __post_init__(self):
        if self.ratios:
            if not (self.min_ratio <= self.q05 <= self.q50 <= self.q95 <= self.max_ratio):
                raise ValueError("report quantiles out of order")
            if self.empirical_C < 1.0:
                raise ValueError("empirical constant must be >= 1")

    def to_json_dict(self) -> dict:
        return {
            "domain": self.domain,
            "d": self.params.d,
            "alpha": self.params.alpha,
            "t_values": list(self.t_values),
            "n_cells": len(self.cells),
            "n_used": len(self.ratios),
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "quantiles": {"q05": self.q05, "q50": self.q50, "q95": self.q95},
            "empirical_C": self.empirical_C,
            "stderr_flags": self.stderr_flags,
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "ratio", "rel_stderr", "flag"])
            for c in self.cells:
                w.writerow(
                    [
                        f"{c.t:.9g}",
                        " ".join(f"{v:.9g}" for v in c.x),
                        " ".join(f"{v:.9g}" for v in c.y) if c.y is not None else "",
                        f"{c.ratio:.9g}" if c.ratio is not None else "",
                        f"{c.rel_stderr:.9g}" if c.rel_stderr is not None else "",
                        c.flag,
                    ]
                )


def _assemble_report(domain, params, t_values, cells) -> RatioReport:
    usable = [c.ratio for c in cells if c.flag == "ok" and c.ratio is not None and c.ratio > 0]
    noisy = sum(1 for c in cells if c.flag == "noisy")
    if not usable:
        raise InconclusiveError("all cells were flagged; nothing to report", required_n=None)
    if noisy > 0.5 * len(cells):
        raise InconclusiveError(
            f"{noisy}/{len(cells)} cells exceed the noise threshold; "
            "increase n by at least 4x",
            required_n=None,
        )
    arr = np.array(usable)
    q05, q50, q95 = np.quantile(arr, [0.05, 0.5, 0.95])
    return RatioReport(
        domain=dom.domain_to_dict(domain) if not isinstance(domain, dict) else domain,
        params=params,
        t_values=tuple(t_values),
        cells=tuple(cells),
        ratios=tuple(arr.tolist()),
        min_ratio=float(arr.min()),
        max_ratio=float(arr.max()),
        q05=float(q05),
        q50=float(q50),
        q95=float(q95),
        empirical_C=float(max(arr.max(), 1.0 / arr.min())),
        stderr_flags=noisy,
    )


# ---------------------------------------------------------------------------
# identity suite


@dataclass(frozen=True)
class IdentityResult:
    name: str
    max_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_err <= self.tol


@dataclass(frozen=True)
class IdentityReport:
    results: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self):
        for r in self.results:
            status = "pass" if r.passed else "FAIL"
            yield f"{status}  {r.name}: max err {r.max_err:.3g} (tol {r.tol:.3g})"

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "identities": [
                {"name": r.name, "max_err": r.max_err, "tol": r.tol, "passed": r.passed}
                for r in self.results
            ],
        }


def verify_identities(params: StableParams, tol: float = 1e-6) -> IdentityReport:
    """Quadrature-level identity checks for the closed forms.

    Covers: exit-law normalization, Green mass against the expected exit
    time (with the exact unit value at d = alpha = 1), self-similarity
    residuals, the symbol normalization of the jump intensity, and the
    exact unit-ball exit tail at (d=1, alpha=1, x=0, R=2).
    """
    d, a = params.d, params.alpha
    res = []

    # exit-law normalization over the exterior of the ball
    err = abs(_poisson_mass(params, x_frac=0.3) - 1.0)
    res.append(IdentityResult("exit-law normalization", err, tol))

    # Green mass = expected exit time, at the center
    g_mass = _green_mass_center(params)
    e_tau = kernels.expected_exit_time_ball(params, (0.0,) * d, 1.0, (0.0,) * d)
    res.append(IdentityResult("Green mass vs expected exit time", abs(g_mass / e_tau - 1.0), tol))
    if d == 1 and a == 1.0:
        res.append(IdentityResult("unit expected exit time (d=1, alpha=1)", abs(e_tau - 1.0), tol))
        tail = kernels.ball_exit_tail_exact(params, (0.0,), 2.0)
        res.append(IdentityResult("exit tail 1/3 at R=2", abs(tail - 1.0 / 3.0), tol))

    # self-similarity of the free density
    err = 0.0
    x = np.zeros(d)
    y = np.zeros(d)
    for t in (0.01, 1.0, 100.0):
        for z in (0.1, 1.0, 10.0):
            y[0] = z
            lhs = free_density(params, t, x, y).value
            rhs = t ** (-d / a) * free_density(params, 1.0, x, y * t ** (-1.0 / a)).value
            err = max(err, abs(lhs - rhs) / lhs)
    res.append(IdentityResult("self-similarity residual", err, 1e-10))

    # symmetry is structural: p(t,x,y) and p(t,y,x) reduce to the same radius
    x1 = np.linspace(0.1, 0.9, d)
    y1 = -np.linspace(0.4, 0.2, d)
    err = abs(
        free_density(params, 0.7, x1, y1).value - free_density(params, 0.7, y1, x1).value
    )
    res.append(IdentityResult("free-density symmetry", err, 0.0))

    # jump-intensity normalization through the symbol
    err = 0.0
    for xi in (0.5, 1.0, 2.0):
        v = levy_symbol_quadrature(params, xi)
        err = max(err, abs(v - xi ** a) / xi ** a)
    res.append(IdentityResult("symbol normalization", err, 1e-4))

    return IdentityReport(tuple(res))


def _poisson_mass(params: StableParams, x_frac: float) -> float:
    """Total exit-law mass over the complement of the closed unit ball.

    The (|y|^2 - 1)^{-alpha/2} endpoint singularity on [1, 2] is handled
    with an algebraic-weight rule; the tail beyond 2 is regular.
    """
    d, a = params.d, params.alpha
    nx = x_frac
    qx = (1.0 - nx * nx) ** (a / 2)
    C = kernels._poisson_constant(d, a)

    if d == 1:
        def smooth(y):
            return (y + 1.0) ** (-a / 2) * (abs(y - nx) ** -1 + abs(y + nx) ** -1)

        near, _ = integrate.quad(
            smooth, 1.0, 2.0, weight="alg", wvar=(-a / 2, 0.0), epsabs=1e-12, epsrel=1e-10
        )
        far, _ = integrate.quad(
            lambda y: (y * y - 1.0) ** (-a / 2) * (abs(y - nx) ** -1 + abs(y + nx) ** -1),
            2.0,
            np.inf,
            epsabs=1e-12,
            epsrel=1e-10,
            limit=300,
        )
        return C * qx * (near + far)

    if d in (2, 3):
        ang_w = (lambda th: 1.0) if d == 2 else math.sin
        ang_c = 2.0 if d == 2 else 2.0 * math.pi

        def angular(rho):
            g = lambda th: (rho ** 2 + nx ** 2 - 2 * rho * nx * math.cos(th)) ** (-d / 2) * ang_w(th)
            val, _ = integrate.quad(g, 0.0, math.pi, epsabs=1e-12, epsrel=1e-10, limit=200)
            return ang_c * val

        near, _ = integrate.quad(
            lambda rho: (rho + 1.0) ** (-a / 2) * rho ** (d - 1) * angular(rho),
            1.0,
            2.0,
            weight="alg",
            wvar=(-a / 2, 0.0),
            epsabs=1e-11,
            epsrel=1e-9,
        )
        far, _ = integrate.quad(
            lambda rho: (rho * rho - 1.0) ** (-a / 2) * rho ** (d - 1) * angular(rho),
            2.0,
            np.inf,
            epsabs=1e-11,
            epsrel=1e-9,
            limit=200,
        )
        return C * qx * (near + far)

    raise ValueError("exit-law normalization implemented for d <= 3")


def _green_mass_center(params: StableParams) -> float:
    d = params.d
    sd = 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)
    f = lambda r: kernels.ball_green(params, (0.0,) * d, 1.0, (0.0,) * d, _axis_pt(r, d)) * r ** (
        d - 1
    )
    v, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-11, epsrel=1e-9, limit=300, points=[0.0])
    return sd * v


def _axis_pt(r: float, d: int):
    p = np.zeros(d)
    p[0] = r
    return p


# ---------------------------------------------------------------------------
# sweeps


def factorization_sweep(
    domain: dom.Domain,
    params: StableParams,
    t_set,
    point_pairs,
    n: int,
    h: float,
    seed: int,
    form: str = "mc",
    workers: int = 1,
    lambda1: Optional[float] = None,
    beta: Optional[float] = None,
) -> RatioReport:
    """Ratio of the killed-kernel estimate to S(x) p(t,x,y) S(y).

    ``form='mc'`` takes S from independent survival estimates (the
    two-sided factorization in its raw form); ``form='profile'`` takes S
    from the closed comparability profile.  Cells with relative noise
    above 25% are flagged and excluded; exterior domains mark cells with
    t <= diam(D^c)^alpha as outside the guaranteed range (reported but
    not aggregated).
    """
    t_set = sorted(float(t) for t in t_set)
    pairs = [
        (tuple(np.atleast_1d(np.asarray(x, float))), tuple(np.atleast_1d(np.asarray(y, float))))
        for x, y in point_pairs
    ]
    xs = sorted({p for p, _ in pairs} | {q for _, q in pairs})
    x_index = {p: i for i, p in enumerate(xs)}

    profile = None
    if form == "profile":
        profile = kernels.survival_profile(domain, params, lambda1=lambda1, beta=beta)

    # one path batch per distinct x gives the kernel for every (t, y);
    # survival factors come from separate seeds to keep numerator and
    # denominator independent
    kern = {}
    surv = {}
    for p in xs:
        kern[p] = mc.heat_kernel_grid(
            domain, params, p, xs, t_set, n, h, seed + 7919 * x_index[p], workers
        )
        if form == "mc":
            curve = mc.survival_curve(
                domain, params, p, t_set, n, h, seed + 104729 + 7919 * x_index[p], workers
            )
            surv[p] = dict(zip(t_set, curve))

    diam = dom.complement_diameter(domain)
    guard_t = diam ** params.alpha if math.isfinite(diam) and diam > 0 else 0.0

    cells = []
    for t in t_set:
        for x, y in pairs:
            est = kern[x][(t, x_index[y])]
            if form == "mc":
                sx, sy = surv[x][t], surv[y][t]
                s_val = sx.mean * sy.mean
                s_rel2 = _rel2(sx) + _rel2(sy)
            else:
                s_val = profile.evaluate(t, x) * profile.evaluate(t, y)
                s_rel2 = 0.0
            p_free = free_density(params, t, np.asarray(x), np.asarray(y)).value
            denom = s_val * p_free
            flag = "ok"
            ratio = None
            rel = None
            if denom <= 0 or est.mean <= 0:
                flag = "noisy"
            else:
                ratio = est.mean / denom
                rel = math.sqrt(_rel2(est) + s_rel2)
                if rel > NOISE_FLAG_THRESHOLD:
                    flag = "noisy"
            if flag == "ok" and t <= guard_t:
                flag = "outside_guarantee"
            cells.append(Cell(t, x, y, ratio, rel, flag))
    return _assemble_report(domain, params, t_set, cells)


def _rel2(est: mc.MCEstimate) -> float:
    if est.mean == 0:
        return math.inf
    return (est.stderr / est.mean) ** 2


def profile_sweep(
    domain: dom.Domain,
    params: StableParams,
    t_set,
    x_set,
    n: int,
    h: float,
    seed: int,
    workers: int = 1,
    lambda1: Optional[float] = None,
    beta: Optional[float] = None,
    c11: bool = False,
    thin: Optional[float] = None,
) -> RatioReport:
    """Ratio of survival estimates to the closed profile per (t, x) cell.

    For bracket-valued profiles the reported number is the smallest C with
    lower/C <= estimate <= C upper (1 when the estimate is contained).
    """
    t_set = sorted(float(t) for t in t_set)
    profile = kernels.survival_profile(domain, params, lambda1=lambda1, beta=beta, c11=c11)
    cells = []
    for i, x in enumerate(x_set):
        xa = tuple(np.atleast_1d(np.asarray(x, float)))
        curve = mc.survival_curve(domain, params, xa, t_set, n, h, seed + 31 * i, workers, thin=thin)
        for t, est in zip(t_set, curve):
            br = profile.evaluate_bracket(t, xa)
            flag = "ok"
            ratio = None
            rel = None
            if est.mean <= 0 or br.upper <= 0:
                flag = "noisy"
            else:
                rel = math.sqrt(_rel2(est))
                if br.lower == br.upper:
                    ratio = est.mean / br.upper
                else:
                    ratio = max(1.0, br.lower / est.mean, est.mean / br.upper)
                if rel > NOISE_FLAG_THRESHOLD:
                    flag = "noisy"
            cells.append(Cell(t, xa, None, ratio, rel, flag))
    return _assemble_report(domain, params, t_set, cells)


@dataclass(frozen=True)
class BHPConfig:
    """One admissible boundary-Harnack configuration.

    ``u_domain`` must be an open set inside B(x0, r); x1, x2 inside
    B(x0, p r); the targets outside B(x0, r).
    """

    u_domain: dom.Domain
    x0: tuple
    r: float
    p: float
    x1: tuple
    x2: tuple
    target1: object
    target2: object

    def validate(self):
        x0 = np.asarray(self.x0, float)
        for name, pt in (("x1", self.x1), ("x2", self.x2)):
            pa = np.asarray(pt, float)
            if np.linalg.norm(pa - x0) >= self.p * self.r:
                raise ValueError(f"{name} must lie in the inner ball of radius p*r")
            if not dom.contains(self.u_domain, pa):
                raise ValueError(f"{name} must lie in the localized domain")


def bhp_sweep(
    configs,
    params: StableParams,
    n: int,
    seed: int,
    workers: int = 1,
) -> RatioReport:
    """Cross-ratio report over a family of boundary-Harnack configurations."""
    cells = []
    first = None
    for i, cfg in enumerate(configs):
        cfg.validate()
        if first is None:
            first = cfg
        try:
            est = mc.bhp_cross_ratio(
                params, cfg.u_domain, cfg.x1, cfg.x2, cfg.target1, cfg.target2, n,
                seed + 613 * i, workers,
            )
            rel = est.stderr / est.mean if est.mean > 0 else math.inf
            flag = "ok" if rel <= NOISE_FLAG_THRESHOLD else "noisy"
            cells.append(Cell(0.0, tuple(cfg.x1), tuple(cfg.x2), est.mean, rel, flag))
        except EstimateDiagnostic:
            cells.append(Cell(0.0, tuple(cfg.x1), tuple(cfg.x2), None, None, "diagnostic"))
    domain_desc = dom.domain_to_dict(first.u_domain) if not isinstance(
        first.u_domain, dom.Intersection
    ) else {"type": "intersection"}
    return _assemble_report_desc(domain_desc, params, (0.0,), cells)


def _assemble_report_desc(domain_desc, params, t_values, cells) -> RatioReport:
    usable = [c.ratio for c in cells if c.flag == "ok" and c.ratio is not None and c.ratio > 0]
    noisy = sum(1 for c in cells if c.flag in ("noisy", "diagnostic"))
    if not usable:
        raise InconclusiveError("all cells were flagged; nothing to report")
    arr = np.array(usable)
    q05, q50, q95 = np.quantile(arr, [0.05, 0.5, 0.95])
    return RatioReport(
        domain=domain_desc,
        params=params,
        t_values=tuple(t_values),
        cells=tuple(cells),
        ratios=tuple(arr.tolist()),
        min_ratio=float(arr.min()),
        max_ratio=float(arr.max()),
        q05=float(q05),
        q50=float(q50),
        q95=float(q95),
        empirical_C=float(max(arr.max(), 1.0 / arr.min())),
        stderr_flags=noisy,
    )


# ---------------------------------------------------------------------------
# localization helper for boundary-Harnack configurations


def localized_sets(domain: dom.Domain, x, kappa_ball_center, kappa: float):
    """The localization U = D intersect B(x, |x-A| + kappa/3) and the two
    reference balls used to compare boundary behavior at unit scale.

    A is a fat-ball witness center with B(A, kappa) inside D and B(x, 1).
    The second reference ball sits at A' = A + (2 kappa / 3) u where u
    points from x to A; the triangle inequality puts B(A', kappa/3)
    inside B(A, kappa) and outside U, so no search is needed.
    """
    xa = np.atleast_1d(np.asarray(x, float))
    A = np.atleast_1d(np.asarray(kappa_ball_center, float))
    gap = A - xa
    ln = float(np.linalg.norm(gap))
    if ln == 0:
        raise ValueError("witness must differ from the base point")
    u = gap / ln
    radius_u = ln + kappa / 3.0
    U = dom.Intersection((domain, dom.Ball(tuple(xa), radius_u)))
    b1 = dom.Ball(tuple(A), kappa / 3.0)
    a_prime = A + (2.0 * kappa / 3.0) * u
    b2 = dom.Ball(tuple(a_prime), kappa / 6.0)
    return U, b1, b2


# ---------------------------------------------------------------------------
# report output


def write_report(report: RatioReport, out_dir, stem: str) -> tuple:
    """Write the sidecar JSON and the per-cell CSV; returns both paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    jpath = os.path.join(out_dir, f"{stem}.json")
    cpath = os.path.join(out_dir, f"{stem}.csv")
    with open(jpath, "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=2)
        fh.write("\n")
    report.write_csv(cpath)
    return jpath, cpath
