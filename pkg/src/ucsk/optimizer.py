"""Constrained maximin placement of the R and G source colors.

With the primary blue fixed, choose R and G to maximize the minimum
pairwise distance among {R, G, B, X} (X the centroid) subject to X lying
in the blue-target disk and R, G lying in the gamut.

The nonsmooth maximin objective is smoothed with a soft-min whose
sharpness is increased over a continuation schedule; inequality
constraints are handled by an augmented-Lagrangian outer loop around a
quasi-Newton (L-BFGS-B) inner solve.  The non-convex landscape is swept
by deterministic multistart, and every accepted candidate is re-checked
against the exact hard minimum and exact constraint residuals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .colorimetry import (
    BOUNDARY_TOLERANCE,
    ChromaticityPoint,
    GamutPolygon,
    in_gamut,
    spectral_locus,
    xy_distance,
)
from .constellation import FIXED_BLUE, BlueTarget, Constellation4, build_constellation

__all__ = [
    "OptimizerConfig",
    "DesignResult",
    "InfeasibleTargetError",
    "ConvergenceError",
    "design_constellation",
    "dmin_upper_bound",
    "objective_and_constraints",
    "DEFAULT_SOFTMIN_SHARPNESS",
]

DEFAULT_SOFTMIN_SHARPNESS = 200.0

# Soft-min sharpness continuation; the final stage leaves a soft/hard gap
# below 1e-5 so accepted hard minima sit at the smoothed optimum.
_BETA_SCHEDULE = (200.0, 1600.0, 12800.0, 102400.0)

_MAX_OUTER = 25
_MU_MAX = 1e8
_EPS = 1e-12

# Disks at or below this radius pin X to the center exactly (variable
# elimination); the inequality form degenerates to a gradient-free cone
# there and starves the line search.
_PIN_RADIUS = 1e-7

# Feasibility allowance on the gamut signed distance.  Published locus
# tables are rounded to 4 digits, which leaves the fixed blue a hair
# outside the polygon; boundary points must stay feasible.  Kept at half
# the membership tolerance so accepted designs always pass in_gamut.
_GAMUT_MARGIN = 0.5 * BOUNDARY_TOLERANCE


class InfeasibleTargetError(ValueError):
    """The blue-target disk cannot be met inside the gamut."""


class ConvergenceError(RuntimeError):
    """No optimization start produced a feasible design."""

    def __init__(self, message: str, diagnostics: list[dict]):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class OptimizerConfig:
    """Multistart and tolerance knobs for the design search."""

    multistart_count: int = 32
    max_iterations: int = 200
    constraint_tolerance: float = 1e-6
    step_tolerance: float = 1e-9
    penalty_growth: float = 10.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.multistart_count < 1:
            raise ValueError("multistart_count must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.constraint_tolerance <= 0 or self.step_tolerance <= 0:
            raise ValueError("tolerances must be > 0")
        if self.penalty_growth <= 1:
            raise ValueError("penalty_growth must be > 1")


@dataclass(frozen=True)
class DesignResult:
    """Best feasible design over all starts."""

    constellation: Constellation4
    achieved_dmin: float
    constraint_residual: float
    starts_converged: int
    best_start_index: int


def dmin_upper_bound(
    target: BlueTarget, fixed_blue: ChromaticityPoint = FIXED_BLUE
) -> float:
    """Analytic cap on the achievable minimum distance.

    (X, B) is one of the six pairs and X must stay in the disk, so
    d_min <= |center - B| + radius.
    """
    return xy_distance(target.center, fixed_blue) + target.radius


# Jacobians of the four points w.r.t. z = (Rx, Ry, Gx, Gy).
_J_R = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
_J_G = np.array([[0, 0, 1.0, 0], [0, 0, 0, 1.0]])
_J_B = np.zeros((2, 4))
_J_X = (_J_R + _J_G) / 3.0
_PAIR_JACS = [
    (_J_R, _J_G),
    (_J_R, _J_B),
    (_J_R, _J_X),
    (_J_G, _J_B),
    (_J_G, _J_X),
    (_J_B, _J_X),
]


def _points(z: np.ndarray, blue: np.ndarray) -> np.ndarray:
    r = z[0:2]
    g = z[2:4]
    x = (r + g + blue) / 3.0
    return np.array([r, g, blue, x])


_PAIR_IDX = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _pair_distances(z: np.ndarray, blue: np.ndarray) -> np.ndarray:
    pts = _points(z, blue)
    return np.array(
        [np.linalg.norm(pts[i] - pts[j]) for i, j in _PAIR_IDX]
    )


def _pair_distances_grad(
    z: np.ndarray, blue: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    pts = _points(z, blue)
    d = np.empty(6)
    grads = np.empty((6, 4))
    for p, ((i, j), (ji, jj)) in enumerate(zip(_PAIR_IDX, _PAIR_JACS)):
        delta = pts[i] - pts[j]
        dist = np.linalg.norm(delta)
        d[p] = dist
        u = delta / max(dist, _EPS)
        grads[p] = u @ (ji - jj)
    return d, grads


def _softmin(d: np.ndarray, beta: float) -> tuple[float, np.ndarray]:
    """Smooth minimum and its softmax weights over the entries of ``d``."""
    dmin = d.min()
    w = np.exp(-beta * (d - dmin))
    s = w.sum()
    return float(dmin - math.log(s) / beta), w / s


def _gamut_residual_grad(
    gamut: GamutPolygon, p: np.ndarray
) -> tuple[float, np.ndarray]:
    dist, q, inside = gamut.nearest_boundary(ChromaticityPoint(p[0], p[1]))
    sign = -1.0 if inside else 1.0
    if dist < _EPS:
        return 0.0, np.zeros(2)
    return sign * dist, sign * (p - q) / dist


def objective_and_constraints(
    r: ChromaticityPoint,
    g: ChromaticityPoint,
    target: BlueTarget,
    gamut: GamutPolygon,
    *,
    beta: float = DEFAULT_SOFTMIN_SHARPNESS,
    fixed_blue: ChromaticityPoint = FIXED_BLUE,
) -> tuple[float, np.ndarray]:
    """Smoothed design objective and constraint residual vector.

    Returns the soft-min (sharpness ``beta``) of the six pairwise
    distances of {R, G, B, centroid}, and residuals
    [|X - center| - radius, signed gamut distance of R, of G]; residuals
    <= 0 are feasible.
    """
    blue = fixed_blue.as_array()
    z = np.array([r.x, r.y, g.x, g.y])
    d = _pair_distances(z, blue)
    obj, _ = _softmin(d, beta)
    x = (z[0:2] + z[2:4] + blue) / 3.0
    disk = float(np.linalg.norm(x - target.center.as_array())) - target.radius
    s_r = gamut.signed_distance(r)
    s_g = gamut.signed_distance(g)
    return obj, np.array([disk, s_r, s_g])


class _DesignProblem:
    """Search-space plumbing for one design run.

    Free mode optimizes z = (Rx, Ry, Gx, Gy) with residuals
    [disk, gamut(R), gamut(G)].  Pinned mode (radius ~ 0) eliminates G via
    R + G = 3*center - B so X equals the center exactly, leaving
    z = (Rx, Ry) and residuals [gamut(R), gamut(G)].
    """

    def __init__(self, blue: np.ndarray, target: BlueTarget, gamut: GamutPolygon):
        self.blue = blue
        self.gamut = gamut
        self.center = target.center.as_array()
        self.radius = target.radius
        self.pinned = target.radius <= _PIN_RADIUS
        if self.pinned:
            self.basis = np.array(
                [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
            )
            self.offset = np.concatenate(
                [np.zeros(2), 3.0 * self.center - blue]
            )
        else:
            self.basis = np.eye(4)
            self.offset = np.zeros(4)
        self.n_constraints = 2 if self.pinned else 3

    def full(self, z: np.ndarray) -> np.ndarray:
        return self.basis @ z + self.offset

    def reduce_start(self, z_full: np.ndarray) -> np.ndarray:
        return z_full[0:2] if self.pinned else z_full

    def residuals_and_grads(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        zf = self.full(z)
        g = np.empty(self.n_constraints)
        grads = np.zeros((self.n_constraints, 4))
        k = 0
        if not self.pinned:
            x = (zf[0:2] + zf[2:4] + self.blue) / 3.0
            delta = x - self.center
            dist = np.linalg.norm(delta)
            g[0] = dist - self.radius
            if dist > _EPS:
                grads[0] = (delta / dist) @ _J_X
            k = 1
        s_r, grads[k, 0:2] = _gamut_residual_grad(self.gamut, zf[0:2])
        s_g, grads[k + 1, 2:4] = _gamut_residual_grad(self.gamut, zf[2:4])
        g[k] = s_r - _GAMUT_MARGIN
        g[k + 1] = s_g - _GAMUT_MARGIN
        return g, grads @ self.basis

    def exact_violation(self, z: np.ndarray) -> float:
        """Max violation of the original residuals [disk, gamut R, gamut G]."""
        zf = self.full(z)
        x = (zf[0:2] + zf[2:4] + self.blue) / 3.0
        disk = float(np.linalg.norm(x - self.center)) - self.radius
        s_r = self.gamut.signed_distance(ChromaticityPoint(zf[0], zf[1]))
        s_g = self.gamut.signed_distance(ChromaticityPoint(zf[2], zf[3]))
        return max(disk, s_r - _GAMUT_MARGIN, s_g - _GAMUT_MARGIN, 0.0)

    def hard_dmin(self, z: np.ndarray) -> float:
        return float(_pair_distances(self.full(z), self.blue).min())

    def al_value_grad(
        self, z: np.ndarray, beta: float, lam: np.ndarray, mu: float
    ) -> tuple[float, np.ndarray]:
        d, d_grads = _pair_distances_grad(self.full(z), self.blue)
        m, w = _softmin(d, beta)
        val = -m
        grad = -(w @ d_grads) @ self.basis
        g, g_grads = self.residuals_and_grads(z)
        phi = np.maximum(0.0, lam + mu * g)
        val += float(np.sum(phi * phi - lam * lam)) / (2.0 * mu)
        grad = grad + phi @ g_grads
        return val, grad


def _solve_from_start(
    z0_full: np.ndarray,
    problem: _DesignProblem,
    cfg: OptimizerConfig,
    bounds: list[tuple[float, float]],
) -> tuple[np.ndarray, float, float]:
    """Run the continuation + augmented-Lagrangian loop from one start.

    Multipliers are only updated after a sufficiently feasible inner
    solve; otherwise the penalty grows (capped, so the inner problem
    stays numerically tractable).

    Returns (z_full, hard minimum distance, exact max violation).
    """
    z = problem.reduce_start(z0_full)
    lam = np.zeros(problem.n_constraints)
    mu = 100.0
    stage_tol = 0.1 * cfg.constraint_tolerance
    for beta in _BETA_SCHEDULE:
        eta = 1e-2
        for _ in range(_MAX_OUTER):
            res = minimize(
                problem.al_value_grad,
                z,
                args=(beta, lam, mu),
                jac=True,
                method="L-BFGS-B",
                bounds=bounds[: z.size],
                options={
                    "maxiter": cfg.max_iterations,
                    "ftol": 1e-14,
                    "gtol": cfg.step_tolerance,
                },
            )
            z = res.x
            g, _ = problem.residuals_and_grads(z)
            viol = max(float(g.max()), 0.0)
            if viol <= max(stage_tol, eta):
                lam = np.maximum(0.0, lam + mu * g)
                eta = max(0.25 * viol, 0.25 * stage_tol)
                if viol <= stage_tol:
                    break
            else:
                mu = min(mu * cfg.penalty_growth, _MU_MAX)
    z_full = problem.full(z)
    return z_full, problem.hard_dmin(z), problem.exact_violation(z)


def _polish_into_disk(
    z: np.ndarray, blue: np.ndarray, target: BlueTarget
) -> np.ndarray:
    """Nudge R and G so X lands exactly on or inside the disk when the
    solver left it a sub-tolerance epsilon outside."""
    x = (z[0:2] + z[2:4] + blue) / 3.0
    delta = x - target.center.as_array()
    dist = float(np.linalg.norm(delta))
    excess = dist - target.radius
    if excess <= 0.0 or dist < _EPS:
        return z
    shift = 1.5 * (excess + 1e-15) * (delta / dist)
    out = z.copy()
    out[0:2] -= shift
    out[2:4] -= shift
    return out


def _sample_start(
    rng: np.random.Generator,
    gamut: GamutPolygon,
    bbox: tuple[float, float, float, float],
) -> np.ndarray:
    xmin, xmax, ymin, ymax = bbox
    pts = []
    for _ in range(2):
        for _attempt in range(10_000):
            x = rng.uniform(xmin, xmax)
            y = rng.uniform(ymin, ymax)
            if in_gamut(ChromaticityPoint(x, y), gamut, tol=0.0):
                pts.extend((x, y))
                break
        else:
            # Pathological gamut; fall back to the vertex mean.
            vx = np.mean([v.x for v in gamut.vertices])
            vy = np.mean([v.y for v in gamut.vertices])
            pts.extend((float(vx), float(vy)))
    return np.array(pts)


def design_constellation(
    target: BlueTarget,
    cfg: OptimizerConfig = OptimizerConfig(),
    gamut: GamutPolygon | None = None,
    *,
    fixed_blue: ChromaticityPoint = FIXED_BLUE,
) -> DesignResult:
    """Search for the maximin constellation meeting a blue target.

    Starts are sampled uniformly in the gamut bounding box (rejection
    sampling), each seeded from (rng_seed, start_index) only, so results
    are deterministic and independent of evaluation order.  The best
    feasible start by (hard d_min, lowest index) wins.

    Raises InfeasibleTargetError when the disk is disjoint from the gamut
    or the fixed blue lies outside it, ConvergenceError when no start
    reaches feasibility.
    """
    if gamut is None:
        gamut = spectral_locus()
    center_gap = max(gamut.signed_distance(target.center), 0.0)
    if center_gap > target.radius + BOUNDARY_TOLERANCE:
        raise InfeasibleTargetError(
            f"blue-target disk (center ({target.center.x}, {target.center.y}), "
            f"radius {target.radius}) does not intersect the gamut "
            f"(gap {center_gap:.4g})"
        )
    if not in_gamut(fixed_blue, gamut):
        raise InfeasibleTargetError(
            f"fixed blue ({fixed_blue.x}, {fixed_blue.y}) is outside the gamut"
        )

    blue = fixed_blue.as_array()
    problem = _DesignProblem(blue, target, gamut)
    bbox = gamut.bounding_box()
    pad = 0.05
    bounds = [
        (bbox[0] - pad, bbox[1] + pad),
        (bbox[2] - pad, bbox[3] + pad),
    ] * 2

    candidates: list[tuple[float, float, np.ndarray]] = []
    diagnostics: list[dict] = []
    for k in range(cfg.multistart_count):
        rng = np.random.default_rng([cfg.rng_seed, k])
        z0 = _sample_start(rng, gamut, bbox)
        z, dmin, viol = _solve_from_start(z0, problem, cfg, bounds)
        candidates.append((dmin, viol, z))
        diagnostics.append(
            {"start_index": k, "d_min": dmin, "constraint_residual": viol}
        )

    feasible = [
        (dmin, k, viol, z)
        for k, (dmin, viol, z) in enumerate(candidates)
        if viol <= cfg.constraint_tolerance
    ]
    if not feasible:
        raise ConvergenceError(
            f"no start out of {cfg.multistart_count} reached constraint "
            f"tolerance {cfg.constraint_tolerance}",
            diagnostics,
        )
    # Highest hard d_min wins; ties go to the lowest start index.
    best_dmin, best_k, best_viol, best_z = max(
        feasible, key=lambda item: (item[0], -item[1])
    )
    best_z = _polish_into_disk(best_z, blue, target)
    best_viol = problem.exact_violation(problem.reduce_start(best_z))
    # d_min is label-symmetric in R and G; label the redder point R.
    r_pt = ChromaticityPoint(best_z[0], best_z[1])
    g_pt = ChromaticityPoint(best_z[2], best_z[3])
    if r_pt.x < g_pt.x:
        r_pt, g_pt = g_pt, r_pt
    constellation = build_constellation(r_pt, g_pt, fixed_blue, gamut)
    return DesignResult(
        constellation=constellation,
        achieved_dmin=constellation.d_min,
        constraint_residual=best_viol,
        starts_converged=len(feasible),
        best_start_index=best_k,
    )
