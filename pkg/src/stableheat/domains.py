"""Domain catalog: membership, distance to the complement, fat-ball
witness points, scaling and tangent-ball scale.

Every variant is a frozen dataclass; all queries are pure.  Points are
accepted as scalars (d = 1) or sequences and normalized internally.
Boundary points count as outside (open-set convention).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np


def _pt(x, d: int) -> np.ndarray:
    a = np.atleast_1d(np.asarray(x, dtype=float))
    if a.size != d:
        raise ValueError(f"point has {a.size} coordinates, expected {d}")
    return a


def _pts(x, d: int) -> np.ndarray:
    """Normalize an (m, d) batch of points."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        a = a[:, None] if d == 1 else a[None, :]
    if a.shape[1] != d:
        raise ValueError(f"points have {a.shape[1]} coordinates, expected {d}")
    return a


# ---------------------------------------------------------------------------
# variants


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))


@dataclass(frozen=True)
class HalfSpace:
    """Open half-space {x : normal . x > offset}; |normal| = 1.

    Stored as an isometry of the canonical {x_d > 0}: ``normal`` is the
    inward unit normal and ``offset`` the signed boundary position.
    """

    normal: tuple
    offset: float = 0.0

    def __post_init__(self):
        n = np.atleast_1d(np.asarray(self.normal, dtype=float))
        ln = float(np.linalg.norm(n))
        if ln == 0:
            raise ValueError("normal must be nonzero")
        object.__setattr__(self, "normal", tuple(n / ln))
        object.__setattr__(self, "offset", float(self.offset))

    def height(self, x) -> float:
        return float(np.dot(_pt(x, len(self.normal)), self.normal)) - self.offset


@dataclass(frozen=True)
class ExteriorBall:
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))


@dataclass(frozen=True)
class CircularCone:
    """Open cone with vertex at the origin: {x : angle(x, axis) < angle}.

    ``beta`` optionally records the exponent governing the long-time
    survival decay; it is analytic only for the half-space aperture
    (angle = pi/2, beta = alpha/2) and is otherwise estimated.
    """

    angle: float
    axis: tuple
    beta: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.angle < math.pi):
            raise ValueError("half-aperture must lie in (0, pi)")
        u = np.atleast_1d(np.asarray(self.axis, dtype=float))
        ln = float(np.linalg.norm(u))
        if ln == 0:
            raise ValueError("axis must be nonzero")
        object.__setattr__(self, "axis", tuple(u / ln))


@dataclass(frozen=True)
class HyperplaneComplement:
    """The set {x : x_d != 0} (complement of a point when d = 1)."""

    dim: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")


@dataclass(frozen=True)
class SpecialLipschitz:
    """Region above a piecewise-linear graph in the plane: {x_2 > g(x_1)}.

    ``breakpoints`` are (s, g(s)) pairs sorted by s; the graph continues
    beyond the first/last breakpoint with the end-segment slopes.  All
    segment slopes must respect the declared Lipschitz constant.
    """

    breakpoints: tuple
    lipschitz_constant: float

    def __post_init__(self):
        bp = tuple(sorted((float(s), float(v)) for s, v in self.breakpoints))
        if len(bp) < 2:
            raise ValueError("need at least two breakpoints")
        ss = np.array([b[0] for b in bp])
        vs = np.array([b[1] for b in bp])
        if np.any(np.diff(ss) <= 0):
            raise ValueError("breakpoint abscissae must be strictly increasing")
        slopes = np.diff(vs) / np.diff(ss)
        if np.any(np.abs(slopes) > self.lipschitz_constant + 1e-12):
            raise ValueError("a segment violates the declared Lipschitz constant")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "lipschitz_constant", float(self.lipschitz_constant))

    def graph(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        ss = np.array([b[0] for b in self.breakpoints])
        vs = np.array([b[1] for b in self.breakpoints])
        out = np.interp(s, ss, vs)
        m0 = (vs[1] - vs[0]) / (ss[1] - ss[0])
        m1 = (vs[-1] - vs[-2]) / (ss[-1] - ss[-2])
        out = np.where(s < ss[0], vs[0] + m0 * (s - ss[0]), out)
        out = np.where(s > ss[-1], vs[-1] + m1 * (s - ss[-1]), out)
        return out


@dataclass(frozen=True)
class IntervalComplement:
    """R minus a finite union of disjoint closed intervals (d = 1)."""

    intervals: tuple

    def __post_init__(self):
        iv = tuple(sorted((float(a), float(b)) for a, b in self.intervals))
        if not iv:
            raise ValueError("need at least one interval")
        for a, b in iv:
            if not b > a:
                raise ValueError("intervals must have positive length")
        for (_, b0), (a1, _) in zip(iv[:-1], iv[1:]):
            if a1 <= b0:
                raise ValueError("intervals must be pairwise disjoint")
        object.__setattr__(self, "intervals", iv)


@dataclass(frozen=True)
class BallUnionExteriorBall:
    """B(c, r) together with the exterior of B(c, R), r < R."""

    center: tuple
    inner_radius: float
    outer_radius: float

    def __post_init__(self):
        if not (0 < self.inner_radius < self.outer_radius):
            raise ValueError("need 0 < inner radius < outer radius")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))


@dataclass(frozen=True)
class Intersection:
    """Intersection of domains (used for exit-law localization)."""

    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        dims = {dim(p) for p in self.parts}
        if len(dims) != 1:
            raise ValueError("all parts must share one dimension")


Domain = Union[
    Ball,
    HalfSpace,
    ExteriorBall,
    CircularCone,
    HyperplaneComplement,
    SpecialLipschitz,
    IntervalComplement,
    BallUnionExteriorBall,
    Intersection,
]


@dataclass(frozen=True)
class FatWitness:
    """A point whose kappa*r ball sits inside the domain and the query ball."""

    center: tuple
    kappa: float
    r: float

    def __post_init__(self):
        if not (0 < self.kappa <= 1):
            raise ValueError("kappa must lie in (0, 1]")
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))


# ---------------------------------------------------------------------------
# basic queries


def dim(domain: Domain) -> int:
    if isinstance(domain, (Ball, ExteriorBall, BallUnionExteriorBall)):
        return len(domain.center)
    if isinstance(domain, HalfSpace):
        return len(domain.normal)
    if isinstance(domain, CircularCone):
        return len(domain.axis)
    if isinstance(domain, HyperplaneComplement):
        return domain.dim
    if isinstance(domain, SpecialLipschitz):
        return 2
    if isinstance(domain, IntervalComplement):
        return 1
    if isinstance(domain, Intersection):
        return dim(domain.parts[0])
    raise TypeError(f"not a domain: {domain!r}")


def contains_many(domain: Domain, pts) -> np.ndarray:
    """Vectorized open-set membership for an (m, d) batch."""
    d = dim(domain)
    P = _pts(pts, d)
    if isinstance(domain, Ball):
        c = np.asarray(domain.center)
        return np.sum((P - c) ** 2, axis=1) < domain.radius ** 2
    if isinstance(domain, HalfSpace):
        return P @ np.asarray(domain.normal) - domain.offset > 0
    if isinstance(domain, ExteriorBall):
        c = np.asarray(domain.center)
        return np.sum((P - c) ** 2, axis=1) > domain.radius ** 2
    if isinstance(domain, CircularCone):
        u = np.asarray(domain.axis)
        nrm = np.sqrt(np.sum(P * P, axis=1))
        with np.errstate(invalid="ignore", divide="ignore"):
            cosphi = (P @ u) / nrm
        ok = (nrm > 0) & (cosphi > math.cos(domain.angle))
        return ok
    if isinstance(domain, HyperplaneComplement):
        return P[:, -1] != 0.0
    if isinstance(domain, SpecialLipschitz):
        return P[:, 1] > domain.graph(P[:, 0])
    if isinstance(domain, IntervalComplement):
        x = P[:, 0]
        inside_some = np.zeros(len(x), dtype=bool)
        for a, b in domain.intervals:
            inside_some |= (x >= a) & (x <= b)
        return ~inside_some
    if isinstance(domain, BallUnionExteriorBall):
        c = np.asarray(domain.center)
        q = np.sum((P - c) ** 2, axis=1)
        return (q < domain.inner_radius ** 2) | (q > domain.outer_radius ** 2)
    if isinstance(domain, Intersection):
        out = np.ones(P.shape[0], dtype=bool)
        for part in domain.parts:
            out &= contains_many(part, P)
        return out
    raise TypeError(f"not a domain: {domain!r}")


def contains(domain: Domain, x) -> bool:
    return bool(contains_many(domain, _pt(x, dim(domain))[None, :])[0])


def dist_many(domain: Domain, pts) -> np.ndarray:
    """Vectorized distance to the complement; 0 for points outside."""
    d = dim(domain)
    P = _pts(pts, d)
    if isinstance(domain, Ball):
        c = np.asarray(domain.center)
        return np.maximum(domain.radius - np.sqrt(np.sum((P - c) ** 2, axis=1)), 0.0)
    if isinstance(domain, HalfSpace):
        return np.maximum(P @ np.asarray(domain.normal) - domain.offset, 0.0)
    if isinstance(domain, ExteriorBall):
        c = np.asarray(domain.center)
        return np.maximum(np.sqrt(np.sum((P - c) ** 2, axis=1)) - domain.radius, 0.0)
    if isinstance(domain, CircularCone):
        u = np.asarray(domain.axis)
        nrm = np.sqrt(np.sum(P * P, axis=1))
        with np.errstate(invalid="ignore", divide="ignore"):
            cosphi = np.clip((P @ u) / np.where(nrm > 0, nrm, 1.0), -1.0, 1.0)
        phi = np.arccos(cosphi)
        inside = (nrm > 0) & (phi < domain.angle)
        ang = np.minimum(domain.angle - phi, math.pi / 2)
        return np.where(inside, nrm * np.sin(np.maximum(ang, 0.0)), 0.0)
    if isinstance(domain, HyperplaneComplement):
        return np.abs(P[:, -1])
    if isinstance(domain, SpecialLipschitz):
        return _dist_above_polyline(domain, P)
    if isinstance(domain, IntervalComplement):
        x = P[:, 0]
        out = np.full(len(x), np.inf)
        for a, b in domain.intervals:
            out = np.minimum(out, np.maximum(np.maximum(a - x, x - b), 0.0))
        inside_some = ~contains_many(domain, P)
        out[inside_some] = 0.0
        return out
    if isinstance(domain, BallUnionExteriorBall):
        c = np.asarray(domain.center)
        q = np.sqrt(np.sum((P - c) ** 2, axis=1))
        inner = np.maximum(domain.inner_radius - q, 0.0)
        outer = np.maximum(q - domain.outer_radius, 0.0)
        return np.maximum(inner, outer)
    if isinstance(domain, Intersection):
        out = np.full(P.shape[0], np.inf)
        for part in domain.parts:
            out = np.minimum(out, dist_many(part, P))
        return out
    raise TypeError(f"not a domain: {domain!r}")


def dist_to_complement(domain: Domain, x) -> float:
    return float(dist_many(domain, _pt(x, dim(domain))[None, :])[0])


def _dist_above_polyline(domain: SpecialLipschitz, P: np.ndarray) -> np.ndarray:
    """Distance from points above the graph to the closed region below it.

    The nearest complement point lies on the (slope-extended) polyline, so
    this is a minimum of point-to-segment distances plus the two end rays.
    """
    bp = np.array(domain.breakpoints)
    s, v = bp[:, 0], bp[:, 1]
    m0 = (v[1] - v[0]) / (s[1] - s[0])
    m1 = (v[-1] - v[-2]) / (s[-1] - s[-2])
    # extend the end segments far enough to act as rays for any query point
    span = max(s[-1] - s[0], 1.0) + np.max(np.abs(P[:, 0])) + np.max(np.abs(P[:, 1])) + 1.0
    ext_lo = np.array([s[0] - 2 * span, v[0] - 2 * span * m0])
    ext_hi = np.array([s[-1] + 2 * span, v[-1] + 2 * span * m1])
    verts = np.vstack([ext_lo, bp, ext_hi])
    best = np.full(P.shape[0], np.inf)
    for a, b in zip(verts[:-1], verts[1:]):
        ab = b - a
        denom = float(ab @ ab)
        t = np.clip(((P - a) @ ab) / denom, 0.0, 1.0)
        proj = a + t[:, None] * ab
        best = np.minimum(best, np.sqrt(np.sum((P - proj) ** 2, axis=1)))
    above = P[:, 1] > domain.graph(P[:, 0])
    return np.where(above, best, 0.0)


# ---------------------------------------------------------------------------
# fat witness points


#: per-variant fatness constants: the declared kappa and the constant in
#: delta(A) >= c (r v delta(x))
def declared_kappa(domain: Domain) -> float:
    if isinstance(domain, (Ball, HalfSpace, ExteriorBall, HyperplaneComplement)):
        return 0.5
    if isinstance(domain, CircularCone):
        th = min(domain.angle, math.pi / 2)
        return math.sin(th) / (1.0 + math.sin(th))
    if isinstance(domain, SpecialLipschitz):
        return 1.0 / (2.0 * math.sqrt(1.0 + domain.lipschitz_constant ** 2))
    if isinstance(domain, (IntervalComplement, BallUnionExteriorBall)):
        return 0.25
    raise TypeError(f"no declared fatness for {type(domain).__name__}")


def fat_witness(domain: Domain, x, r: float) -> Optional[FatWitness]:
    """Deterministic center A with B(A, kappa r) inside D and B(x, r).

    Returns the variant's closed-form construction, or None when the
    variant is not fat at its declared kappa for this (x, r).  Ties are
    broken toward the domain's axis/center so results are reproducible.
    """
    if r <= 0:
        raise ValueError("scale r must be positive")
    d = dim(domain)
    xa = _pt(x, d)
    dx = dist_to_complement(domain, xa)

    if isinstance(domain, Ball):
        c = np.asarray(domain.center)
        R = domain.radius
        if dx >= r:
            return FatWitness(tuple(xa), 1.0, r)
        gap = xa - c
        ln = float(np.linalg.norm(gap))
        inward = -gap / ln if ln > 0 else _unit(d)
        s = min(r / 2, ln)
        A = xa + s * inward
        rho = min(r - s, R - float(np.linalg.norm(A - c)))
        kappa = rho / r
        if kappa < 0.5 - 1e-12:
            return None
        return FatWitness(tuple(A), min(kappa, 1.0), r)

    if isinstance(domain, HalfSpace):
        n = np.asarray(domain.normal)
        h = domain.height(xa)
        target = max(h, r / 2)
        A = xa + (target - h) * n
        return FatWitness(tuple(A), 0.5, r)

    if isinstance(domain, ExteriorBall):
        c = np.asarray(domain.center)
        gap = xa - c
        ln = float(np.linalg.norm(gap))
        outward = gap / ln if ln > 0 else _unit(d)
        if dx >= r:
            return FatWitness(tuple(xa), 1.0, r)
        A = xa + (r / 2) * outward
        return FatWitness(tuple(A), 0.5, r)

    if isinstance(domain, HyperplaneComplement):
        A = xa.copy()
        side = 1.0 if xa[-1] >= 0 else -1.0
        A[-1] = side * max(abs(xa[-1]), r / 2)
        return FatWitness(tuple(A), 0.5, r)

    if isinstance(domain, SpecialLipschitz):
        lam = domain.lipschitz_constant
        kap = 1.0 / (2.0 * math.sqrt(1.0 + lam * lam))
        g = float(domain.graph(xa[0]))
        height = xa[1] - g
        target = max(height, r / 2)
        A = np.array([xa[0], g + target])
        return FatWitness(tuple(A), kap, r)

    if isinstance(domain, CircularCone):
        return _cone_witness(domain, xa, r, dx)

    if isinstance(domain, IntervalComplement):
        return _interval_complement_witness(domain, xa, r, dx)

    if isinstance(domain, BallUnionExteriorBall):
        return _annular_witness(domain, xa, r, dx)

    raise TypeError(f"no witness construction for {type(domain).__name__}")


def _unit(d: int) -> np.ndarray:
    e = np.zeros(d)
    e[-1] = 1.0
    return e


def _cone_witness(domain: CircularCone, xa, r, dx) -> Optional[FatWitness]:
    # candidates: the point itself, axis points, an inward-normal shift
    # and axis blends; the exact fit radius min(delta(A), r - |A-x|) is
    # evaluated per candidate and the best one kept
    u = np.asarray(domain.axis)
    cands = []
    if dx >= r:
        cands.append(xa)
    proj = float(xa @ u)
    for a in np.geomspace(r / 16, max(proj, 0.0) + r, 24):
        cands.append(a * u)
    perp = xa - proj * u
    np_perp = float(np.linalg.norm(perp))
    th = min(domain.angle, math.pi / 2)
    if np_perp > 1e-14:
        e = perp / np_perp
        normal = math.sin(th) * u - math.cos(th) * e
        shift = max(dx, r / 2) - dx
        cands.append(xa + shift * normal)
    nx = float(np.linalg.norm(xa))
    if nx > 0 and dx > 0:
        axis_pt = nx * u
        for w in (0.25, 0.5, 0.75):
            cands.append((1 - w) * xa + w * axis_pt)
    best = None
    for A in cands:
        dA = dist_to_complement(domain, A)
        rho = min(dA, r - float(np.linalg.norm(A - xa)))
        if best is None or rho > best[1]:
            best = (A, rho)
    if best is None:
        return None
    kappa = best[1] / r
    if kappa < declared_kappa(domain) - 1e-9:
        return None
    return FatWitness(tuple(best[0]), min(kappa, 1.0), r)


def _interval_complement_witness(domain, xa, r, dx) -> Optional[FatWitness]:
    x = float(xa[0])
    iv = domain.intervals
    # components of the domain: outer rays and the gaps between intervals
    comps = [(-math.inf, iv[0][0])]
    for (_, b0), (a1, _) in zip(iv[:-1], iv[1:]):
        comps.append((b0, a1))
    comps.append((iv[-1][1], math.inf))
    best = None
    for lo, hi in comps:
        flo, fhi = max(lo, x - r), min(hi, x + r)
        if fhi <= flo:
            continue
        if math.isinf(flo):
            flo = x - r
        A = 0.5 * (flo + fhi)
        rho = 0.5 * (fhi - flo)
        nearness = abs(A - x)
        if best is None or rho > best[1] + 1e-15 or (abs(rho - best[1]) <= 1e-15 and nearness < best[2]):
            best = (A, rho, nearness)
    if best is None:
        return None
    kappa = min(best[1] / r, 1.0)
    if kappa < declared_kappa(domain) - 1e-12:
        return None
    return FatWitness((best[0],), kappa, r)


def _annular_witness(domain, xa, r, dx) -> Optional[FatWitness]:
    c = np.asarray(domain.center)
    ri, ro = domain.inner_radius, domain.outer_radius
    gap = xa - c
    ln = float(np.linalg.norm(gap))
    outward = gap / ln if ln > 0 else _unit(len(c))
    cands = []
    if dx >= r:
        cands.append(xa)
    # inner-ball candidates: shift toward the center
    s = min(r / 2, ln)
    cands.append(xa - s * outward)
    cands.append(c.copy())
    # exterior candidates: shift away from the center
    cands.append(xa + (r / 2) * outward)
    s_opt = 0.5 * (r + ro - ln)
    if s_opt > 0:
        cands.append(xa + s_opt * outward)
    best = None
    for A in cands:
        dA = dist_to_complement(domain, A)
        rho = min(dA, r - float(np.linalg.norm(A - xa)))
        if best is None or rho > best[1]:
            best = (A, rho)
    kappa = best[1] / r
    if kappa < declared_kappa(domain) - 1e-12:
        return None
    return FatWitness(tuple(best[0]), min(kappa, 1.0), r)


# ---------------------------------------------------------------------------
# scaling and tangent-ball scale


def scale_domain(domain: Domain, r: float) -> Domain:
    """The dilated domain rD.  Cones and the hyperplane complement are
    fixed points of dilation."""
    if r <= 0:
        raise ValueError("scale factor must be positive")
    if isinstance(domain, Ball):
        return Ball(tuple(r * c for c in domain.center), r * domain.radius)
    if isinstance(domain, HalfSpace):
        return HalfSpace(domain.normal, r * domain.offset)
    if isinstance(domain, ExteriorBall):
        return ExteriorBall(tuple(r * c for c in domain.center), r * domain.radius)
    if isinstance(domain, (CircularCone, HyperplaneComplement)):
        return domain
    if isinstance(domain, SpecialLipschitz):
        bp = tuple((r * s, r * v) for s, v in domain.breakpoints)
        return SpecialLipschitz(bp, domain.lipschitz_constant)
    if isinstance(domain, IntervalComplement):
        return IntervalComplement(tuple((r * a, r * b) for a, b in domain.intervals))
    if isinstance(domain, BallUnionExteriorBall):
        return BallUnionExteriorBall(
            tuple(r * c for c in domain.center), r * domain.inner_radius, r * domain.outer_radius
        )
    if isinstance(domain, Intersection):
        return Intersection(tuple(scale_domain(p, r) for p in domain.parts))
    raise TypeError(f"not a domain: {domain!r}")


def c11_scale(domain: Domain) -> Optional[float]:
    """Largest scale at which inner and outer tangent balls exist at every
    boundary point; None for variants with corners or flat complements."""
    if isinstance(domain, Ball):
        return domain.radius
    if isinstance(domain, ExteriorBall):
        return domain.radius
    if isinstance(domain, HalfSpace):
        return math.inf
    if isinstance(domain, CircularCone):
        return math.inf if abs(domain.angle - math.pi / 2) < 1e-15 else None
    if isinstance(domain, (HyperplaneComplement, SpecialLipschitz)):
        return None
    if isinstance(domain, IntervalComplement):
        iv = domain.intervals
        min_len = min(b - a for a, b in iv)
        gaps = [a1 - b0 for (_, b0), (a1, _) in zip(iv[:-1], iv[1:])]
        min_gap = min(gaps) if gaps else math.inf
        return 0.5 * min(min_len, min_gap)
    if isinstance(domain, BallUnionExteriorBall):
        return min(domain.inner_radius, 0.5 * (domain.outer_radius - domain.inner_radius))
    return None


def complement_diameter(domain: Domain) -> float:
    """diam(D^c); infinity when the complement is unbounded."""
    if isinstance(domain, ExteriorBall):
        return 2.0 * domain.radius
    if isinstance(domain, IntervalComplement):
        return domain.intervals[-1][1] - domain.intervals[0][0]
    if isinstance(domain, BallUnionExteriorBall):
        return 2.0 * domain.outer_radius
    if isinstance(domain, HyperplaneComplement):
        return 0.0 if domain.dim == 1 else math.inf
    return math.inf


# ---------------------------------------------------------------------------
# structured-document (de)serialization for the CLI surface


def domain_to_dict(domain: Domain) -> dict:
    if isinstance(domain, Ball):
        return {"type": "ball", "center": list(domain.center), "radius": domain.radius}
    if isinstance(domain, HalfSpace):
        return {"type": "halfspace", "axis": list(domain.normal), "offset": domain.offset}
    if isinstance(domain, ExteriorBall):
        return {"type": "exterior_ball", "center": list(domain.center), "radius": domain.radius}
    if isinstance(domain, CircularCone):
        out = {"type": "cone", "angle": domain.angle, "axis": list(domain.axis)}
        if domain.beta is not None:
            out["beta"] = domain.beta
        return out
    if isinstance(domain, HyperplaneComplement):
        return {"type": "hyperplane_complement", "dim": domain.dim}
    if isinstance(domain, SpecialLipschitz):
        return {
            "type": "special_lipschitz",
            "breakpoints": [list(b) for b in domain.breakpoints],
            "lipschitz_constant": domain.lipschitz_constant,
        }
    if isinstance(domain, IntervalComplement):
        return {"type": "interval_complement", "intervals": [list(i) for i in domain.intervals]}
    if isinstance(domain, BallUnionExteriorBall):
        return {
            "type": "ball_union_exterior_ball",
            "center": list(domain.center),
            "inner_radius": domain.inner_radius,
            "outer_radius": domain.outer_radius,
        }
    raise TypeError(f"cannot serialize {type(domain).__name__}")


def domain_from_dict(doc: dict, expect_dim: Optional[int] = None) -> Domain:
    """Parse a domain document; dimensions are inferred from point fields
    and validated against ``expect_dim`` when given."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise ValueError("domain document must be an object with a 'type' field")
    t = doc["type"]
    try:
        if t == "ball":
            dom = Ball(tuple(doc["center"]), float(doc["radius"]))
        elif t == "halfspace":
            dom = HalfSpace(tuple(doc["axis"]), float(doc.get("offset", 0.0)))
        elif t == "exterior_ball":
            dom = ExteriorBall(tuple(doc["center"]), float(doc["radius"]))
        elif t == "cone":
            dom = CircularCone(float(doc["angle"]), tuple(doc["axis"]), doc.get("beta"))
        elif t == "hyperplane_complement":
            dom = HyperplaneComplement(int(doc.get("dim", expect_dim or 1)))
        elif t == "special_lipschitz":
            dom = SpecialLipschitz(
                tuple(tuple(b) for b in doc["breakpoints"]), float(doc["lipschitz_constant"])
            )
        elif t == "interval_complement":
            dom = IntervalComplement(tuple(tuple(i) for i in doc["intervals"]))
        elif t == "ball_union_exterior_ball":
            dom = BallUnionExteriorBall(
                tuple(doc["center"]), float(doc["inner_radius"]), float(doc["outer_radius"])
            )
        else:
            raise ValueError(f"unknown domain type {t!r}")
    except KeyError as exc:
        raise ValueError(f"domain document for {t!r} is missing field {exc}") from exc
    if expect_dim is not None and dim(dom) != expect_dim:
        raise ValueError(f"domain has dimension {dim(dom)}, expected {expect_dim}")
    return dom
