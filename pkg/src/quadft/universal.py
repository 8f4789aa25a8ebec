"""Universal absorbing set and minimum value, plus steady/evolutionary trees.

For each admissible B4 the plasticity family fixes the vertex weights, and the
interior edge of the Gauss tree collapses (l -> 0) at one absorbing value of
x_G.  Collected over B4 these absorbing values form the universal set; its
minimum u_FT is the storage threshold at which a degree-four tree can start
growing a degree-three tree by spending part of the stored quantity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, InfeasibleWeightsError, OverspendError, QuadFTError
from .gauss import GaussTree, GaussWeights, _branch, feasible_xg_interval, solve_gauss_tree
from .geometry import Quadrilateral
from .plasticity import PlasticityLine

SPAN_EPSILON = 1e-7       # l value defining "collapsed" for the root find
AGREEMENT_TOL = 1e-4      # required root-find vs maximization agreement
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Golden-section minimizer for a unimodal f on [a, b]."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while d - c > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class UniversalSample:
    """One absorbing point of the universal set."""

    b4: float
    weights: tuple[float, float, float, float]
    xg_absorbing: float
    objective: float


@dataclass(frozen=True)
class UniversalResult:
    """Minimum of the universal set with the sampled profile behind it."""

    u_ft: float
    b4_star: float
    rate: float
    samples: tuple[UniversalSample, ...]
    multimodal: bool = False
    skipped: tuple[tuple[float, str], ...] = ()


class TreeKind(enum.Enum):
    STEADY = "steady"
    EVOLUTIONARY = "evolutionary"


@dataclass(frozen=True)
class TreeState:
    """Storage bookkeeping at the degree-four node."""

    storage: float
    a_g: float
    kind: TreeKind

    def __post_init__(self):
        if self.storage < 0.0 or self.a_g < 0.0:
            raise QuadFTError("storage and spending rate must be nonnegative")

    @classmethod
    def for_storage(cls, storage: float, u_ft: float, a_g: float = 0.0) -> TreeState:
        """State with the kind implied by the threshold; a steady tree cannot
        spend, and an evolving one must spend strictly below u_FT."""
        kind = classify_tree(storage, u_ft)
        if kind is TreeKind.STEADY and a_g > 0.0:
            raise QuadFTError(f"steady tree (storage {storage} < {u_ft}) cannot spend")
        if a_g > 0.0 and not a_g < u_ft:
            raise QuadFTError(f"spending rate {a_g} must stay below u_FT = {u_ft}")
        return cls(storage=storage, a_g=a_g, kind=kind)


def classify_tree(storage: float, u_ft: float) -> TreeKind:
    """Steady below u_FT; evolutionary at or above it."""
    if storage < 0.0:
        raise QuadFTError("storage must be nonnegative")
    return TreeKind.STEADY if storage < u_ft else TreeKind.EVOLUTIONARY


# ------------------------------------------------------------------ #
# Absorbing value of x_G for one weight quadruple
# ------------------------------------------------------------------ #

def _span_root(q: Quadrilateral, weights, eps: float, scan: int = 64) -> float:
    """x_G at which the branch span crosses eps, by scan plus bisection.

    The branch formulas diverge toward the feasibility endpoints, so the
    crossing is bracketed on an interior scan before brentq runs.
    """
    lo, hi = feasible_xg_interval(*weights)
    if not lo < hi:
        raise InfeasibleWeightsError(f"empty x_G interval for weights {tuple(weights)}")
    pad = 1e-9 * (hi - lo)
    xs = np.linspace(lo + pad, hi - pad, scan)

    def f(xg: float) -> float:
        return _branch(q, GaussWeights(*weights, xg)).l - eps

    vals = []
    for x in xs:
        try:
            vals.append(f(x))
        except QuadFTError:
            vals.append(math.nan)
    for i in range(scan - 1):
        a, b = vals[i], vals[i + 1]
        if math.isfinite(a) and math.isfinite(b) and a > 0.0 >= b:
            return brentq(f, xs[i], xs[i + 1], xtol=1e-13)
    raise InfeasibleWeightsError(
        f"span never collapses inside the feasible x_G interval ({lo:.6g}, {hi:.6g})"
    )


def _branch_objective_argmax(q: Quadrilateral, weights) -> float:
    lo, hi = feasible_xg_interval(*weights)
    pad = 1e-6 * (hi - lo)

    def neg_obj(xg: float) -> float:
        return -_branch(q, GaussWeights(*weights, xg)).objective

    return _golden_min(neg_obj, lo + pad, hi - pad, tol=1e-10)


def absorbing_xg(q: Quadrilateral, line: PlasticityLine, b4: float,
                 eps: float = SPAN_EPSILON) -> UniversalSample:
    """Absorbing Gauss value for the family weights at b4.

    Defined as the root of span(x_G) = eps; cross-checked against the
    derivative-free maximizer of the branch objective (the two coincide where
    the span vanishes), which must agree within 1e-4.
    """
    weights = line.weights_at(b4)
    xg = _span_root(q, weights, eps)
    xg_max = _branch_objective_argmax(q, weights)
    if abs(xg - xg_max) > AGREEMENT_TOL:
        raise ConvergenceError(
            f"span root {xg:.8f} and objective argmax {xg_max:.8f} disagree "
            f"beyond {AGREEMENT_TOL}",
            residual=abs(xg - xg_max),
        )
    objective = _branch(q, GaussWeights(*weights, xg)).objective
    return UniversalSample(b4=b4, weights=weights, xg_absorbing=xg, objective=objective)


def universal_set(q: Quadrilateral, line: PlasticityLine, grid: int,
                  eps: float = SPAN_EPSILON,
                  on_skip: Callable[[float, str], None] | None = None
                  ) -> list[UniversalSample]:
    """Absorbing values on a uniform B4 grid over the admissible interval.

    Infeasible grid points are omitted; `on_skip(b4, reason)` hears about each.
    """
    if grid < 1:
        raise QuadFTError("grid must be at least 1")
    lo, hi = line.b4_interval
    margin = max(1e-6 * (hi - lo), 1e-9)
    if grid == 1:
        b4s = [0.5 * (lo + hi)]
    else:
        b4s = list(np.linspace(lo + margin, hi - margin, grid))
    samples = []
    for b4 in b4s:
        try:
            samples.append(absorbing_xg(q, line, b4, eps=eps))
        except QuadFTError as exc:
            if on_skip is not None:
                on_skip(b4, str(exc))
    return samples


def universal_minimum(q: Quadrilateral, line: PlasticityLine,
                      tol: float = 1e-9, grid: int = 33,
                      eps: float = SPAN_EPSILON) -> UniversalResult:
    """Minimize the absorbing value over B4 by grid sampling plus
    golden-section refinement of the best cell.

    A profile with several grid-level local minima is flagged multimodal and
    the refined global grid minimum is returned.
    """
    skipped: list[tuple[float, str]] = []
    samples = universal_set(q, line, grid, eps=eps,
                            on_skip=lambda b4, why: skipped.append((b4, why)))
    if not samples:
        reasons = "; ".join(why for _, why in skipped[:3])
        raise InfeasibleWeightsError(f"no feasible B4 sample on the interval ({reasons})")
    xs = [s.b4 for s in samples]
    ys = [s.xg_absorbing for s in samples]
    i_best = int(np.argmin(ys))
    minima = sum(
        1 for i in range(len(ys))
        if (i == 0 or ys[i] < ys[i - 1]) and (i == len(ys) - 1 or ys[i] < ys[i + 1])
    )
    lo = xs[i_best - 1] if i_best > 0 else xs[0]
    hi = xs[i_best + 1] if i_best < len(xs) - 1 else xs[-1]

    def value(b4: float) -> float:
        return absorbing_xg(q, line, b4, eps=eps).xg_absorbing

    b4_star = _golden_min(value, lo, hi, tol=tol) if hi > lo else xs[i_best]
    best = absorbing_xg(q, line, b4_star, eps=eps)
    if best.xg_absorbing > ys[i_best]:
        b4_star, best = xs[i_best], samples[i_best]
    return UniversalResult(
        u_ft=best.xg_absorbing,
        b4_star=b4_star,
        rate=best.xg_absorbing / line.c,
        samples=tuple(samples),
        multimodal=minima > 1,
        skipped=tuple(skipped),
    )


def weights_for_storage(q: Quadrilateral, line: PlasticityLine, u: float,
                        result: UniversalResult | None = None,
                        eps: float = SPAN_EPSILON) -> list[float]:
    """All B4 values whose absorbing x_G equals u (the level set at u).

    Needs u >= u_FT; at u = u_FT the set collapses to {b4_star}.  Sign changes
    of the sampled profile around u are bisected on every cell, so a
    multimodal profile yields every root the sampling resolves.
    """
    if result is None:
        result = universal_minimum(q, line, eps=eps)
    level_tol = max(1e-9, 1e-9 * abs(u))
    if u < result.u_ft - AGREEMENT_TOL:
        raise InfeasibleWeightsError(
            f"storage level {u} lies below the universal minimum {result.u_ft}"
        )
    knots = sorted(
        {s.b4: s.xg_absorbing for s in result.samples} | {result.b4_star: result.u_ft}
    )
    profile = {s.b4: s.xg_absorbing for s in result.samples}
    profile[result.b4_star] = result.u_ft

    def f(b4: float) -> float:
        return absorbing_xg(q, line, b4, eps=eps).xg_absorbing - u

    roots: list[float] = []
    for a, b in zip(knots, knots[1:]):
        fa, fb = profile[a] - u, profile[b] - u
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0.0:
            roots.append(brentq(f, a, b, xtol=1e-12))
    if profile[knots[-1]] - u == 0.0:
        roots.append(knots[-1])
    if abs(u - result.u_ft) <= AGREEMENT_TOL and not roots:
        roots.append(result.b4_star)
    deduped: list[float] = []
    for r in sorted(roots):
        if not deduped or abs(r - deduped[-1]) > level_tol:
            deduped.append(r)
    if not deduped:
        raise InfeasibleWeightsError(f"no B4 on the sampled profile reaches {u}")
    return deduped


def evolve(q: Quadrilateral, line: PlasticityLine, storage: float, a_g: float,
           b4: float) -> GaussTree:
    """Grow the degree-three tree funded by `storage` at spending rate a_g.

    The interior edge weight becomes x_G = storage - a_g with the family
    weights at b4.  a_g = 0 returns the collapsed (degree-four limit) tree.
    Spending below the weight-triangle floor raises OverspendError; callers
    are responsible for storage >= u_FT and b4 from weights_for_storage.
    """
    if a_g < 0.0:
        raise QuadFTError(f"spending rate must be nonnegative, got {a_g}")
    weights = line.weights_at(b4)
    xg = storage - a_g
    lo, hi = feasible_xg_interval(*weights)
    if xg <= lo:
        raise OverspendError(
            f"spending {a_g} drops x_G to {xg}, at or below the feasible floor {lo:.6g}"
        )
    if xg >= hi:
        raise InfeasibleWeightsError(
            f"x_G = {xg} is at or above the feasible ceiling {hi:.6g} for B4 = {b4}"
        )
    return solve_gauss_tree(q, GaussWeights(*weights, xg))
