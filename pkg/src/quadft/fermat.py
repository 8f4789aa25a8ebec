"""Weighted Fermat-Torricelli solvers of degree three and four.

Covers case classification (floating / absorbed / diagonal shortcut), the
triangle closed form, Weiszfeld iteration, the circle system for a square
boundary, and the general quadrilateral angle system.  Degree-four locations
have no closed form, so everything quadrilateral-shaped is iterative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AbsorbedWeightsError,
    ConvergenceError,
    InconsistentCaseError,
    QuadFTError,
)
from .geometry import (
    Point,
    Quadrilateral,
    angle_at,
    clamped_acos,
    cross2,
    diagonal_intersection,
    rotate,
)

RESIDUAL_TOL = 1e-10
NEWTON_MAX_ITER = 200
WEISZFELD_MAX_ITER = 10_000
CASE_BOUNDARY_TOL = 1e-9
EQUAL_WEIGHT_RTOL = 1e-12

TWO_PI = 2.0 * math.pi


class CaseKind(enum.Enum):
    FLOATING = "floating"
    ABSORBED = "absorbed"
    DIAGONAL = "diagonal"


@dataclass(frozen=True)
class CaseTag:
    """Classification of a degree-four optimum.

    `vertex` is the 1-based absorbing vertex index when kind is ABSORBED.
    `boundary` marks classifications within tolerance of the absorbed/floating
    boundary.
    """

    kind: CaseKind
    vertex: int | None = None
    boundary: bool = False


@dataclass(frozen=True)
class WeightedQuadrilateral:
    """Convex quadrilateral with one positive weight per vertex."""

    quad: Quadrilateral
    weights: tuple[float, float, float, float]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if len(w) != 4:
            raise QuadFTError("exactly four weights are required")
        if any(not (v > 0.0 and math.isfinite(v)) for v in w):
            raise QuadFTError(f"weights must be positive and finite, got {w}")
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return sum(self.weights)

    def normalized(self) -> WeightedQuadrilateral:
        """Same instance with weights divided by their sum (explicit opt-in)."""
        s = self.total
        return WeightedQuadrilateral(self.quad, tuple(w / s for w in self.weights))


@dataclass(frozen=True)
class FermatTree:
    """Degree-four tree: the optimum, its case, edge angles and objective.

    `angles` holds (a102, a203, a304, a401) in radians; entries involving an
    absorbing vertex are NaN.  `equilibrium_residual` is the norm of the weighted
    unit-vector sum at the optimum (floating case), or the amount by which the
    absorption inequality fails (absorbed case, zero when it holds).
    """

    point: Point
    case: CaseTag
    angles: tuple[float, float, float, float]
    objective: float
    equilibrium_residual: float
    iterations: int = 0


# ------------------------------------------------------------------ #
# Objective / equilibrium helpers
# ------------------------------------------------------------------ #

def weighted_distance_sum(points, weights, p: Point) -> float:
    return sum(w * p.distance_to(q) for w, q in zip(weights, points))


def _pull_vector(points, weights, p: Point, skip: int | None = None):
    """Sum of weighted unit vectors from p toward each point (skip one index)."""
    sx = sy = 0.0
    for i, (w, q) in enumerate(zip(weights, points)):
        if i == skip:
            continue
        ux, uy = p.unit_toward(q)
        sx += w * ux
        sy += w * uy
    return sx, sy


def _absorption_slack(points, weights, i: int) -> float:
    """Norm of the pull at vertex i minus its own weight (<= 0 means absorbed)."""
    sx, sy = _pull_vector(points, weights, points[i], skip=i)
    return math.hypot(sx, sy) - weights[i]


def classify_case(wq: WeightedQuadrilateral, tol: float = CASE_BOUNDARY_TOL) -> CaseTag:
    """Absorbed/floating classification of the degree-four problem.

    A vertex absorbs when the combined pull of the other three weights does not
    exceed its own weight; the first such vertex in index order wins.  Within
    `tol * total` of equality the result is reported absorbed with a boundary
    flag.
    """
    pts = wq.quad.vertices
    margin = tol * wq.total
    for i in range(4):
        slack = _absorption_slack(pts, wq.weights, i)
        if slack <= margin:
            return CaseTag(CaseKind.ABSORBED, vertex=i + 1, boundary=abs(slack) <= margin)
    return CaseTag(CaseKind.FLOATING)


def triangle_wft_angles(bi: float, bj: float, bk: float) -> tuple[float, float, float]:
    """Angles (a_i0j, a_j0k, a_k0i) at the interior optimum of a weighted triangle.

    The angle between the edges pulled by two weights depends only on the third:
    a_i0j = arccos((bk^2 - bi^2 - bj^2) / (2 bi bj)).  Raises when the weight
    triangle inequality fails (absorbed case: the optimum sits at a vertex).
    """
    if min(bi, bj, bk) <= 0.0:
        raise QuadFTError(f"weights must be positive, got ({bi}, {bj}, {bk})")
    if not (abs(bi - bj) < bk < bi + bj):
        raise AbsorbedWeightsError(
            f"weights ({bi}, {bj}, {bk}) violate the strict triangle inequality; "
            "the optimum is absorbed at a vertex"
        )
    a_i0j = math.acos((bk * bk - bi * bi - bj * bj) / (2.0 * bi * bj))
    a_j0k = math.acos((bi * bi - bj * bj - bk * bk) / (2.0 * bj * bk))
    a_k0i = math.acos((bj * bj - bk * bk - bi * bi) / (2.0 * bk * bi))
    return a_i0j, a_j0k, a_k0i


# ------------------------------------------------------------------ #
# Weiszfeld iteration
# ------------------------------------------------------------------ #

def _collinear(points) -> bool:
    xs = np.array([[p.x, p.y] for p in points])
    xs = xs - xs.mean(axis=0)
    return np.linalg.matrix_rank(xs, tol=1e-12 * (1.0 + np.abs(xs).max())) < 2


def _weiszfeld_full(points, weights, tol, max_iter):
    total = sum(weights)
    diameter = max(p.distance_to(q) for p in points for q in points)
    # Absorbed case: return the dominating vertex outright.
    for i in range(len(points)):
        if _absorption_slack(points, weights, i) <= 0.0:
            return points[i], 0, 0.0
    x = sum(w * p.x for w, p in zip(weights, points)) / total
    y = sum(w * p.y for w, p in zip(weights, points)) / total
    restarted = False
    residual = math.inf
    for it in range(1, max_iter + 1):
        p = Point(x, y)
        near = [i for i, q in enumerate(points) if p.distance_to(q) < 1e-12 * diameter]
        if near:
            # Classical Weiszfeld stalls on vertices; not absorbed here, so nudge
            # off the centroid and continue.
            if restarted:
                raise ConvergenceError("Weiszfeld re-encountered a vertex", last=p)
            restarted = True
            x = sum(q.x for q in points) / len(points) + 1e-6 * diameter
            y = sum(q.y for q in points) / len(points) + 1e-6 * diameter
            continue
        num_x = num_y = den = 0.0
        rx = ry = 0.0
        for w, q in zip(weights, points):
            d = p.distance_to(q)
            num_x += w * q.x / d
            num_y += w * q.y / d
            den += w / d
            rx += w * (q.x - x) / d
            ry += w * (q.y - y) / d
        residual = math.hypot(rx, ry)
        if residual < tol * total:
            return p, it, residual
        x, y = num_x / den, num_y / den
    raise ConvergenceError(
        f"Weiszfeld did not reach residual {tol:g} in {max_iter} iterations",
        last=Point(x, y),
        residual=residual,
    )


def weiszfeld(points, weights, tol: float = RESIDUAL_TOL,
              max_iter: int = WEISZFELD_MAX_ITER) -> Point:
    """Weighted geometric median of >= 3 non-collinear points.

    Iterates x <- sum(w_i p_i / d_i) / sum(w_i / d_i) until the weighted
    unit-vector pull has norm below tol * sum(weights).  Absorbed instances
    return the dominating vertex directly.
    """
    points = list(points)
    weights = [float(w) for w in weights]
    if len(points) < 3 or len(points) != len(weights):
        raise QuadFTError("need at least three points with matching weights")
    if any(w <= 0.0 for w in weights):
        raise QuadFTError("weights must be positive")
    if _collinear(points):
        raise QuadFTError("points are collinear; the median problem degenerates")
    if tol <= 0.0:
        raise QuadFTError("tol must be positive")
    point, _, _ = _weiszfeld_full(points, weights, tol, max_iter)
    return point


def _seed_point(points, weights, tol=1e-8):
    """Best-effort interior point for Newton seeding: a Weiszfeld run whose
    stall (near-absorbed instances converge only linearly) is not an error."""
    try:
        point, _, _ = _weiszfeld_full(points, weights, tol, WEISZFELD_MAX_ITER)
    except ConvergenceError as exc:
        point = exc.last
    return point


def _gradient_polish(points, weights, start: Point, tol: float,
                     max_iter: int = 60):
    """Damped Newton on the gradient of the weighted distance sum.

    Quadratic where Weiszfeld is only linear (optimum close to a vertex); the
    Hessian of sum w_i |x - p_i| is positive definite off the anchor points.
    Returns (point, residual_norm); the caller judges the residual.
    """
    total = sum(weights)
    anchors = [np.array([q.x, q.y]) for q in points]
    x = np.array([start.x, start.y])

    def gradient(z):
        g = np.zeros(2)
        h = np.zeros((2, 2))
        for w, a in zip(weights, anchors):
            d = a - z
            r = np.hypot(*d)
            if r < 1e-300:
                return None, None
            u = d / r
            g -= w * u
            h += (w / r) * (np.eye(2) - np.outer(u, u))
        return g, h

    g, h = gradient(x)
    if g is None:
        return start, math.inf
    norm = float(np.hypot(*g))
    for _ in range(max_iter):
        if norm < tol * total:
            break
        try:
            step = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while t > 1e-12:
            gn, hn = gradient(x + t * step)
            if gn is not None and float(np.hypot(*gn)) < norm:
                x = x + t * step
                g, h, norm = gn, hn, float(np.hypot(*gn))
                break
            t *= 0.5
        else:
            break
    return Point(float(x[0]), float(x[1])), norm


def _robust_median(points, weights, tol):
    """Weiszfeld followed by a gradient polish; raises only when both stall."""
    total = sum(weights)
    try:
        point, iters, _ = _weiszfeld_full(points, weights, tol, WEISZFELD_MAX_ITER)
        return point, iters
    except ConvergenceError as exc:
        point, norm = _gradient_polish(points, weights, exc.last, tol)
        if norm < tol * total:
            return point, WEISZFELD_MAX_ITER
        raise ConvergenceError(
            f"median iteration stalled at residual {norm:.3e}",
            last=point, residual=norm,
        ) from exc


# ------------------------------------------------------------------ #
# Damped Newton on small angle systems
# ------------------------------------------------------------------ #

def _damped_newton(func, x0, lo, hi, tol, max_iter):
    """Newton with numeric Jacobian and halving line search, boxed to (lo, hi).

    Accepts a stalled line search once the residual is already far below the
    geometry scale (1e-8), which in practice means machine-precision noise.
    """
    x = np.asarray(x0, dtype=float)
    r = func(x)
    trace = [float(np.linalg.norm(r))]
    for _ in range(max_iter):
        norm = np.linalg.norm(r)
        if norm < tol:
            return x, norm, trace
        n = len(x)
        jac = np.empty((len(r), n))
        h = 1e-7
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            jac[:, j] = (func(x + e) - func(x - e)) / (2.0 * h)
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian in Newton step",
                                   last=x, residual=norm, trace=trace) from exc
        t = 1.0
        while t > 1e-12:
            xn = x + t * step
            if np.all(xn > lo) and np.all(xn < hi):
                rn = func(xn)
                if np.all(np.isfinite(rn)) and np.linalg.norm(rn) < norm:
                    x, r = xn, rn
                    trace.append(float(np.linalg.norm(r)))
                    break
            t *= 0.5
        else:
            if norm < 1e-8:
                return x, norm, trace
            raise ConvergenceError("Newton line search stalled",
                                   last=x, residual=norm, trace=trace)
    norm = float(np.linalg.norm(r))
    if norm < 1e-8:
        return x, norm, trace
    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations",
                           last=x, residual=norm, trace=trace)


def _floating_tree(wq: WeightedQuadrilateral, p: Point, angles=None,
                   case: CaseTag | None = None, iterations: int = 0) -> FermatTree:
    pts = wq.quad.vertices
    if angles is None:
        angles = (
            angle_at(p, pts[0], pts[1]),
            angle_at(p, pts[1], pts[2]),
            angle_at(p, pts[2], pts[3]),
            angle_at(p, pts[3], pts[0]),
        )
    rx, ry = _pull_vector(pts, wq.weights, p)
    return FermatTree(
        point=p,
        case=case or CaseTag(CaseKind.FLOATING),
        angles=tuple(angles),
        objective=weighted_distance_sum(pts, wq.weights, p),
        equilibrium_residual=math.hypot(rx, ry),
        iterations=iterations,
    )


def _absorbed_tree(wq: WeightedQuadrilateral, tag: CaseTag) -> FermatTree:
    i = tag.vertex - 1
    pts = wq.quad.vertices
    p = pts[i]
    angles = []
    for a, b in ((0, 1), (1, 2), (2, 3), (3, 0)):
        if i in (a, b):
            angles.append(math.nan)
        else:
            angles.append(angle_at(p, pts[a], pts[b]))
    return FermatTree(
        point=p,
        case=tag,
        angles=tuple(angles),
        objective=weighted_distance_sum(pts, wq.weights, p),
        equilibrium_residual=max(0.0, _absorption_slack(pts, wq.weights, i)),
    )


# ------------------------------------------------------------------ #
# Square boundary: circle system
# ------------------------------------------------------------------ #

def _square_system(side: float, weights):
    b1, b2, b3, b4 = weights

    def a304_of(a102: float) -> float:
        arg = (b1 * b1 + 2.0 * b1 * b2 * math.cos(a102) + b2 * b2 - b3 * b3 - b4 * b4) / (
            2.0 * b3 * b4
        )
        return math.acos(min(1.0, max(-1.0, arg)))

    def residuals(v):
        a102, a401 = v
        a304 = a304_of(a102)
        csc102, csc304, csc401 = 1.0 / math.sin(a102), 1.0 / math.sin(a304), 1.0 / math.sin(a401)
        r1 = (
            csc102**2 * csc304**2 * csc401**2
            * (math.cos(a102) - math.sin(a102))
            * (math.cos(a304) - math.sin(a304))
            * (math.cos(a102 - a304) - math.cos(a102 + a304 + 2.0 * a401)
               - 2.0 * math.sin(a102 + a304))
        )
        r2 = (
            -b1 * b1 - 2.0 * b1 * b2 * math.cos(a102) - b2 * b2 + b3 * b3
            - 2.0 * b1 * b4 * math.cos(a401)
            - 2.0 * b2 * b4 * math.cos(a102 + a401)
            - b4 * b4
        )
        return np.array([r1, r2])

    return residuals, a304_of


def _square_point(side: float, a102: float, a304: float, a401: float) -> Point:
    cot102 = math.cos(a102) / math.sin(a102)
    cot304 = math.cos(a304) / math.sin(a304)
    cot401 = math.cos(a401) / math.sin(a401)
    x = (
        side * (-1.0 + cot102) * (-1.0 + cot304)
        / ((-2.0 + cot102 + cot304) * (-1.0 + cot401))
    )
    y = -(side - side * cot304) / (cot102 + cot304 - 2.0)
    return Point(x, y)


def solve_4wft_square(side: float, weights, init: tuple[float, float] | None = None,
                      tol: float = RESIDUAL_TOL,
                      max_iter: int = NEWTON_MAX_ITER) -> FermatTree:
    """Interior optimum on the square (0,0),(a,0),(a,a),(0,a) via the
    three-circle intersection system in (a102, a401).

    `init` overrides the Newton seed (radians, each in (0, pi)); by default the
    seed comes from the angles measured at the Weiszfeld solution.
    """
    if side <= 0.0:
        raise QuadFTError("square side must be positive")
    quad = Quadrilateral.from_coords([(0, 0), (side, 0), (side, side), (0, side)])
    wq = WeightedQuadrilateral(quad, tuple(weights))
    tag = classify_case(wq)
    if tag.kind is not CaseKind.FLOATING:
        raise InconsistentCaseError(
            f"square instance is not floating (absorbed at vertex {tag.vertex})"
        )
    func, a304_of = _square_system(side, wq.weights)
    if init is None:
        seed_pt = _seed_point(quad.vertices, wq.weights)
        v = quad.vertices
        init = (angle_at(seed_pt, v[0], v[1]), angle_at(seed_pt, v[3], v[0]))
    if not all(0.0 < a < math.pi for a in init):
        raise QuadFTError(f"initial angles must lie in (0, pi), got {init}")
    sol, residual, trace = _damped_newton(func, init, lo=1e-9, hi=TWO_PI - 1e-9,
                                          tol=tol, max_iter=max_iter)
    a102, a401 = float(sol[0]), float(sol[1])
    a304 = a304_of(a102)
    a203 = TWO_PI - a102 - a304 - a401
    point = _square_point(side, a102, a304, a401)
    tree = _floating_tree(wq, point, angles=(a102, a203, a304, a401),
                          iterations=len(trace))
    if tree.equilibrium_residual > 1e-7 * wq.total:
        raise ConvergenceError(
            "circle system converged to a non-equilibrium point",
            last=point, residual=tree.equilibrium_residual, trace=trace,
        )
    return tree


# ------------------------------------------------------------------ #
# General quadrilateral: four-angle system
# ------------------------------------------------------------------ #

def _general_system(wq: WeightedQuadrilateral):
    v = wq.quad.vertices
    a12 = v[0].distance_to(v[1])
    a41 = v[3].distance_to(v[0])
    a31 = v[2].distance_to(v[0])
    alpha213 = angle_at(v[0], v[1], v[2])
    alpha314 = angle_at(v[0], v[2], v[3])
    total = wq.total
    b1, b2, b3, b4 = (w / total for w in wq.weights)  # homogeneous: roots unchanged

    def residuals(vec):
        a102, a401, a304, a013 = vec
        s = a304 + a401
        cot102 = math.cos(a102) / math.sin(a102)
        cot_s = math.cos(s) / math.sin(s)
        r1 = b3 * b3 - (
            b1 * b1 + b2 * b2 + b4 * b4
            + 2.0 * b2 * b4 * math.cos(a401 + a102)
            + 2.0 * b1 * b2 * math.cos(a102)
            + 2.0 * b1 * b4 * math.cos(a401)
        )
        r2 = (
            math.cos(s) * (b4 * math.sin(a401) - b2 * math.sin(a102))
            - math.sin(s) * (b1 + b2 * math.cos(a102) + b4 * math.cos(a401))
        )
        n70 = math.sin(alpha213) - math.cos(alpha213) * cot102 - (a31 / a12) * cot_s
        d70 = -math.cos(alpha213) - math.sin(alpha213) * cot102 + a31 / a12
        n71 = math.sin(alpha314) - math.cos(alpha314) / math.tan(a401) + (a31 / a41) * cot_s
        d71 = math.cos(alpha314) + math.sin(alpha314) / math.tan(a401) - a31 / a41
        r3 = math.cos(a013) * d70 - math.sin(a013) * n70
        r4 = math.cos(a013) * d71 - math.sin(a013) * n71
        return np.array([r1, r2, r3, r4])

    return residuals, a41, a31, alpha314


def solve_4wft_general(wq: WeightedQuadrilateral, init=None,
                       tol: float = RESIDUAL_TOL,
                       max_iter: int = NEWTON_MAX_ITER) -> FermatTree:
    """Interior optimum on a general convex quadrilateral via the residual
    system in (a102, a401, a304, a013), then reconstruction from vertex A1.

    a013 is the signed angle from ray A1->A0 to ray A1->A3 (positive when A0
    lies on the A2 side of the diagonal).  The optimum is placed at distance
    a01 = a41 sin(a013 + a314 + a401) / sin(a401) from A1.
    """
    tag = classify_case(wq)
    if tag.kind is not CaseKind.FLOATING:
        raise InconsistentCaseError(
            f"instance is not floating (absorbed at vertex {tag.vertex})"
        )
    v = wq.quad.vertices
    func, a41, a31, alpha314 = _general_system(wq)
    if init is None:
        seed_pt = _seed_point(v, wq.weights)
        u13 = v[0].unit_toward(v[2])
        u10 = v[0].unit_toward(seed_pt)
        s013 = math.atan2(cross2(*u10, *u13), u10[0] * u13[0] + u10[1] * u13[1])
        init = (
            angle_at(seed_pt, v[0], v[1]),
            angle_at(seed_pt, v[3], v[0]),
            angle_at(seed_pt, v[2], v[3]),
            s013,
        )
    sol, residual, trace = _damped_newton(func, init, lo=-math.pi, hi=TWO_PI,
                                          tol=tol, max_iter=max_iter)
    a102, a401, a304, a013 = (float(t) for t in sol)
    a203 = TWO_PI - a102 - a304 - a401
    a01 = a41 * math.sin(a013 + alpha314 + a401) / math.sin(a401)
    ux, uy = v[0].unit_toward(v[2])
    dx, dy = rotate(ux, uy, -a013)
    point = Point(v[0].x + a01 * dx, v[0].y + a01 * dy)
    if not wq.quad.contains(point, tol=1e-9):
        raise InconsistentCaseError(
            f"angle system placed the optimum outside the quadrilateral: {point}"
        )
    tree = _floating_tree(wq, point, angles=(a102, a203, a304, a401),
                          iterations=len(trace))
    if tree.equilibrium_residual > 1e-7 * wq.total:
        raise ConvergenceError(
            "angle system converged to a non-equilibrium point",
            last=point, residual=tree.equilibrium_residual, trace=trace,
        )
    return tree


def edge_lengths_from_vertex(wq: WeightedQuadrilateral,
                             tree: FermatTree) -> tuple[float, float]:
    """(a01, a04): distances from A1 and A4 to the optimum."""
    v = wq.quad.vertices
    return tree.point.distance_to(v[0]), tree.point.distance_to(v[3])


# ------------------------------------------------------------------ #
# Facade
# ------------------------------------------------------------------ #

def locate_4wft(wq: WeightedQuadrilateral, tol: float = RESIDUAL_TOL,
                max_iter: int = NEWTON_MAX_ITER) -> FermatTree:
    """Locate the degree-four optimum for any valid instance.

    Absorbed instances return the vertex tree; equal weights short-circuit to
    the diagonal intersection; floating instances run the general angle system
    seeded from Weiszfeld, falling back to plain Weiszfeld if Newton fails.
    """
    tag = classify_case(wq)
    if tag.kind is CaseKind.ABSORBED:
        return _absorbed_tree(wq, tag)
    w = wq.weights
    if max(w) - min(w) <= EQUAL_WEIGHT_RTOL * max(w):
        return _floating_tree(wq, diagonal_intersection(wq.quad),
                              case=CaseTag(CaseKind.DIAGONAL))
    tree = None
    try:
        tree = solve_4wft_general(wq, tol=tol, max_iter=max_iter)
    except (ConvergenceError, InconsistentCaseError):
        pass
    point, iters = _robust_median(wq.quad.vertices, w, min(tol, 1e-9))
    if tree is not None and tree.point.distance_to(point) <= 1e-5 * wq.quad.diameter():
        return tree
    return _floating_tree(wq, point, iterations=iters)
