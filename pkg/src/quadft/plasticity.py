"""Dynamic plasticity: the one-parameter weight families that keep a
degree-four optimum fixed, built from inverse triangle solutions.

Two routes exist.  The affine route expresses B1, B2, B3 as linear functions
of B4 at fixed total c via inverse-3wFT ratios of the triangles A1A2A3,
A1A3A4 and A1A2A4.  The squared-balance route solves two quadratic identities
in the optimum's angles and covers diagonal configurations the affine route
cannot (there it reduces to B1 = B3, B2 = B4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DiagonalPointError,
    InconsistentCaseError,
    InfeasibleWeightsError,
    InverseUndefinedError,
    QuadFTError,
)
from .fermat import CaseKind, FermatTree, WeightedQuadrilateral, locate_4wft
from .geometry import Point, Quadrilateral, cross2

B4_INTERVAL_MARGIN = 1e-9
DIAGONAL_TOL = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PlasticityLine:
    """Affine family B_i = x_i * B4 + y_i (i = 1, 2, 3) at fixed total c.

    `point` is the anchor optimum the family preserves.  `b4_interval` is the
    open interval on which all four weights stay positive.
    """

    c: float
    coefficients: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    b4_interval: tuple[float, float]
    point: Point

    def __post_init__(self):
        xs = sum(co[0] for co in self.coefficients)
        ys = sum(co[1] for co in self.coefficients)
        if abs(xs + 1.0) > 1e-9 or abs(ys - self.c) > 1e-9 * max(1.0, self.c):
            raise QuadFTError(
                f"coefficients do not preserve the total: sum x = {xs}, sum y = {ys}"
            )
        lo, hi = self.b4_interval
        if not lo < hi:
            raise InfeasibleWeightsError(f"empty B4 interval ({lo}, {hi})")

    def weights_at(self, b4: float) -> tuple[float, float, float, float]:
        """Weights (B1, B2, B3, B4) on the line; b4 must sit strictly inside
        the admissible interval (margin 1e-9)."""
        lo, hi = self.b4_interval
        if not (lo + B4_INTERVAL_MARGIN <= b4 <= hi - B4_INTERVAL_MARGIN):
            raise InfeasibleWeightsError(
                f"B4 = {b4} outside the open admissible interval ({lo}, {hi})"
            )
        b = tuple(x * b4 + y for x, y in self.coefficients) + (b4,)
        if any(v <= 0.0 for v in b):
            raise InfeasibleWeightsError(f"weights {b} not all positive at B4 = {b4}")
        return b


def inverse_3wft_ratio(a_i0j: float, a_j0k: float, a_k0i: float,
                       tol: float = 1e-8) -> tuple[float, float, float]:
    """Weights (Bi, Bj, Bk), normalized to sum 1, whose triangle optimum sees
    the given angles a_i0j, a_j0k, a_k0i at the interior point.

    Each weight is proportional to the sine of the angle it does not touch.
    Undefined when the point sits on a side (an angle hits pi) or the angles do
    not describe an interior point (sum differs from 2 pi).
    """
    angles = (a_i0j, a_j0k, a_k0i)
    if any(not (tol < a < math.pi - tol) for a in angles):
        raise InverseUndefinedError(
            f"angles {angles} include a straight or null angle: point on a side"
        )
    if abs(sum(angles) - TWO_PI) > tol:
        raise InverseUndefinedError(
            f"angles {angles} sum to {sum(angles)}, not 2*pi: not an interior point"
        )
    bi = math.sin(a_j0k)
    bj = math.sin(a_k0i)
    bk = math.sin(a_i0j)
    s = bi + bj + bk
    return (bi / s, bj / s, bk / s)


def _signed_ratio(p: Point, a_i: Point, a_j: Point, a_k: Point) -> float:
    """lambda_i / lambda_j for the unit-vector balance li*ui + lj*uj + lk*uk = 0.

    Reduces to the sine-ratio inverse solution when p is interior to the
    triangle; continues it with signs when p lies outside (needed because the
    degree-four optimum is interior to only two of the four sub-triangles).
    """
    ui = p.unit_toward(a_i)
    uj = p.unit_toward(a_j)
    uk = p.unit_toward(a_k)
    den = cross2(*ui, *uk)
    if abs(den) < DIAGONAL_TOL:
        raise DiagonalPointError(
            "optimum is collinear with two vertices; use plasticity_system_new"
        )
    return -cross2(*uj, *uk) / den


def plasticity_line(wq: WeightedQuadrilateral, tree: FermatTree) -> PlasticityLine:
    """Affine weight family through the optimum of `tree` at total c = sum(B).

    Requires a floating optimum off both diagonals; on a diagonal the inverse
    triangle problems degenerate and `plasticity_system_new` applies instead.
    """
    if tree.case.kind is not CaseKind.FLOATING:
        raise DiagonalPointError(
            f"plasticity line needs a floating optimum, got {tree.case.kind.value}; "
            "diagonal configurations are handled by plasticity_system_new"
        )
    p = tree.point
    v = wq.quad.vertices
    u = [p.unit_toward(vert) for vert in v]
    if abs(cross2(*u[0], *u[2])) < DIAGONAL_TOL or abs(cross2(*u[1], *u[3])) < DIAGONAL_TOL:
        raise DiagonalPointError(
            "optimum lies on a diagonal; use plasticity_system_new"
        )
    r2 = _signed_ratio(p, v[1], v[0], v[2])      # (B2/B1) in triangle A1A2A3
    r3 = _signed_ratio(p, v[2], v[0], v[1])      # (B3/B1) in triangle A1A2A3
    rho134 = _signed_ratio(p, v[0], v[3], v[2])  # (B1/B4) in triangle A1A3A4
    rho124 = _signed_ratio(p, v[0], v[3], v[1])  # (B1/B4) in triangle A1A2A4
    den = 1.0 + r2 + r3
    if abs(den) < 1e-12:
        raise QuadFTError("degenerate ratio sum in the affine construction")
    c = wq.total
    x1 = (rho134 * r2 + rho124 * r3 - 1.0) / den
    y1 = c / den
    coefficients = (
        (x1, y1),
        (x1 * r2 - rho134 * r2, r2 * y1),
        (x1 * r3 - rho124 * r3, r3 * y1),
    )
    lo, hi = 0.0, math.inf
    for x, y in coefficients:
        if x < 0.0:
            hi = min(hi, -y / x)
        elif x > 0.0 and y < 0.0:
            lo = max(lo, -y / x)
    if not lo < hi:
        raise InfeasibleWeightsError(f"no positive-weight interval: ({lo}, {hi})")
    line = PlasticityLine(c=c, coefficients=coefficients, b4_interval=(lo, hi), point=p)
    recovered = line.weights_at(wq.weights[3])
    if any(abs(a - b) > 1e-5 * c for a, b in zip(recovered, wq.weights)):
        raise InconsistentCaseError(
            "input weights do not lie on the constructed line; "
            "was the tree solved for these weights?"
        )
    return line


def plasticity_system_new(angles, c: float, b4: float,
                          grid: int = 2048) -> list[tuple[float, float, float]]:
    """All positive (B1, B2, B3) making the given optimum angles balance at
    total c with the supplied B4, via the two squared-balance identities.

    B1 is eliminated through the total, the second identity is linear in B3 at
    fixed B2, and the first identity's residual is scanned over a `grid`-point
    B2 range with every sign change bisected.  All roots found are returned
    (multiple solutions are expected in general); none are filtered beyond
    positivity.
    """
    a102, a203, a304, a401 = angles
    if abs((a102 + a203 + a304 + a401) - TWO_PI) > 1e-8:
        raise QuadFTError(f"angles {tuple(angles)} do not sum to 2*pi")
    if not (c > 0.0 and 0.0 < b4 < c):
        raise InfeasibleWeightsError(f"need 0 < B4 < c, got B4={b4}, c={c}")
    c12 = math.cos(a102)
    c23 = math.cos(a203)
    c34 = math.cos(a304)
    c14 = math.cos(a401)  # the angle between edges 1 and 4 equals a401

    def b3_of_b2(b2: float) -> float | None:
        s = c - b2 - b4
        den = 2.0 * (s + b4 * c14 + b2 * c23)
        if abs(den) < 1e-14:
            return None
        return (s * s + b4 * b4 + 2.0 * s * b4 * c14 - b2 * b2) / den

    def residual(b2: float) -> float:
        b3 = b3_of_b2(b2)
        if b3 is None:
            return math.nan
        b1 = c - b2 - b3 - b4
        return (b1 * b1 + b2 * b2 + 2.0 * b1 * b2 * c12
                - (b3 * b3 + b4 * b4 + 2.0 * b3 * b4 * c34))

    xs = np.linspace(1e-9, c - b4 - 1e-9, grid)
    vals = np.array([residual(x) for x in xs])
    solutions = []
    for i in range(grid - 1):
        vi, vj = vals[i], vals[i + 1]
        if not (np.isfinite(vi) and np.isfinite(vj)) or vi * vj > 0.0:
            continue
        b2 = brentq(residual, xs[i], xs[i + 1], xtol=1e-14) if vi != 0.0 else xs[i]
        b3 = b3_of_b2(b2)
        b1 = c - b2 - b3 - b4
        if b1 > 0.0 and b2 > 0.0 and b3 > 0.0:
            solutions.append((b1, b2, b3))
    if not solutions:
        raise InfeasibleWeightsError(
            f"no positive weight solution at B4 = {b4}, c = {c} for these angles"
        )
    return solutions


@dataclass(frozen=True)
class PlasticityReport:
    """Outcome of re-solving the optimum across a sampled weight family."""

    reference: Point
    tolerance: float
    max_deviation: float
    passed: bool
    evaluated: tuple[tuple[float, float], ...]   # (b4, deviation)
    excluded: tuple[tuple[float, str], ...]      # (b4, reason)


def verify_plasticity(q: Quadrilateral, line: PlasticityLine,
                      samples: int) -> PlasticityReport:
    """Re-solve the degree-four problem at `samples` values of B4 across the
    admissible interval and report the worst drift of the optimum.

    Samples where a weight leaves positivity or the instance stops floating are
    excluded with a reason, never counted as drift.  Passes when the maximum
    deviation stays below 1e-6 times the quadrilateral diameter.
    """
    if samples < 1:
        raise QuadFTError("need at least one sample")
    lo, hi = line.b4_interval
    if samples == 1:
        b4s = [lo]
    else:
        b4s = list(np.linspace(lo, hi, samples))
    tolerance = 1e-6 * q.diameter()
    evaluated = []
    excluded = []
    for b4 in b4s:
        try:
            weights = line.weights_at(b4)
        except InfeasibleWeightsError as exc:
            excluded.append((b4, str(exc)))
            continue
        tree = locate_4wft(WeightedQuadrilateral(q, weights))
        if tree.case.kind is CaseKind.ABSORBED:
            excluded.append((b4, f"absorbed at vertex {tree.case.vertex}"))
            continue
        evaluated.append((b4, tree.point.distance_to(line.point)))
    max_dev = max((d for _, d in evaluated), default=math.inf)
    return PlasticityReport(
        reference=line.point,
        tolerance=tolerance,
        max_deviation=max_dev,
        passed=bool(evaluated) and max_dev < tolerance,
        evaluated=tuple(evaluated),
        excluded=tuple(excluded),
    )
