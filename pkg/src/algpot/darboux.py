"""Darboux points: solutions of grad V = q on the variety, classified.

A Darboux point is a joint zero of the variety equations G = 0 and the
normalization grad V(q, w) = q (intrinsic gradient), excluding the origin
and anything inside the critical set of the potential.  Solutions can come
in positive-dimensional families, so the Newton iteration uses least-squares
steps and candidates are deduplicated rather than assumed isolated.

Rejection is conservative: a candidate is discarded when a short Newton
probe finds an actual critical point within a small radius, not merely when
the fiber determinant is small at the candidate itself.  That distinction
matters for spurious roots that stall close to, but not on, the singular
locus.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calculus import CriticalPointError, PointCalculus
from .expr import PoleError
from .parsing import AlgebraicSetup

ORIGIN_TOL = 1e-8
BASE_PROJECTION_TOL = 1e-8


@dataclass
class DarbouxReport:
    point: np.ndarray
    grad_residual: float
    constraint_residual: float
    status: str  # "accepted" | "rejected"
    reason: str = ""
    degenerate: bool = False  # accepted, but base projection vanishes
    sigma_flag: bool = False
    hessian: np.ndarray | None = None
    start_label: str = ""


@dataclass
class DarbouxResult:
    accepted: list = field(default_factory=list)
    rejected: list = field(default_factory=list)
    failed_starts: int = 0

    @property
    def all_reports(self):
        return list(self.accepted) + list(self.rejected)


def _newton(pc: PointCalculus, x0: np.ndarray, extra_rows, extra_rhs,
            conv_tol: float, max_iter: int):
    """Damped Gauss-Newton for the Darboux system plus linear conditions.

    Returns the final iterate and residual, or None when the iteration left
    the domain (singular fiber, potential pole) or diverged.
    """
    x = np.asarray(x0, dtype=complex).copy()

    def system(xv):
        F, Jac = pc.darboux_system(xv)
        if extra_rows is not None:
            lin = extra_rows @ xv - extra_rhs
            F = np.concatenate([F, lin])
            Jac = np.vstack([Jac, extra_rows])
        return F, Jac

    try:
        F, Jac = system(x)
    except (CriticalPointError, PoleError):
        return None
    res = float(np.max(np.abs(F)))
    for _ in range(max_iter):
        if res <= conv_tol:
            return x, res
        step, *_ = np.linalg.lstsq(Jac, -F, rcond=None)
        if not np.all(np.isfinite(step)):
            return None
        scale = 1.0
        improved = False
        for _halving in range(30):
            x_try = x + scale * step
            try:
                F_try, Jac_try = system(x_try)
            except (CriticalPointError, PoleError):
                scale *= 0.5
                continue
            r_try = float(np.max(np.abs(F_try)))
            if r_try < res or r_try <= conv_tol:
                x, F, Jac, res = x_try, F_try, Jac_try, r_try
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
        if np.max(np.abs(x)) > 1e8:
            return None
    return (x, res) if res < np.inf else None


def solve_darboux(setup: AlgebraicSetup,
                  seeds=(),
                  n_random: int = 24,
                  seed: int = 0,
                  conv_tol: float = 1e-12,
                  accept_tol: float = 1e-9,
                  dedup_tol: float = 1e-6,
                  max_iter: int = 200,
                  sigma_radius: float = 1e-4,
                  start_radius: float = 2.0,
                  pc: PointCalculus | None = None,
                  linear_conditions=None) -> DarbouxResult:
    """Hunt for Darboux points from the given seeds plus random starts.

    linear_conditions, when given, is a pair (A, b) of extra affine
    equations A x = b appended to the system; gauge symmetries (e.g. the
    translations and rotations of a particle system) are pinned this way.
    """
    pc = pc or PointCalculus(setup)
    N = pc.N
    rng = np.random.default_rng(seed)

    extra_rows = extra_rhs = None
    if linear_conditions is not None:
        extra_rows = np.asarray(linear_conditions[0], dtype=complex)
        extra_rhs = np.asarray(linear_conditions[1], dtype=complex)

    starts = [(np.asarray(s, dtype=complex), f"seed[{i}]")
              for i, s in enumerate(seeds)]
    for i in range(n_random):
        re = rng.uniform(-start_radius, start_radius, N)
        im = rng.uniform(-start_radius, start_radius, N)
        if i % 2 == 0:
            im = np.zeros(N)  # real starts find the real points first
        starts.append((re + 1j * im, f"random[{i}]"))

    candidates = []
    failed = 0
    for x0, label in starts:
        out = _newton(pc, x0, extra_rows, extra_rhs, conv_tol, max_iter)
        if out is None:
            failed += 1
            continue
        x, res = out
        if res > accept_tol:
            failed += 1
            continue
        candidates.append((x, label))

    # first-seen dedup; seeds were queued before random starts on purpose
    distinct = []
    for x, label in candidates:
        norm = max(1.0, float(np.max(np.abs(x))))
        if any(np.max(np.abs(x - y)) <= dedup_tol * norm for y, _ in distinct):
            continue
        distinct.append((x, label))

    result = DarbouxResult(failed_starts=failed)
    n = setup.n
    for x, label in distinct:
        F = pc.darboux_residual(x)
        grad_res = float(np.max(np.abs(F[:n]))) if n else 0.0
        con_res = float(np.max(np.abs(F[n:]))) if setup.s else 0.0
        try:
            near = pc.near_sigma(x, radius=sigma_radius)
        except (CriticalPointError, PoleError):
            near = True
        if near:
            result.rejected.append(DarbouxReport(
                point=x, grad_residual=grad_res, constraint_residual=con_res,
                status="rejected", sigma_flag=True, start_label=label,
                reason="within the critical set of the potential "
                       "(probe found a singular point nearby)"))
            continue
        if float(np.max(np.abs(x))) < ORIGIN_TOL:
            result.rejected.append(DarbouxReport(
                point=x, grad_residual=grad_res, constraint_residual=con_res,
                status="rejected", start_label=label,
                reason="the origin is excluded by definition"))
            continue
        degenerate = float(np.max(np.abs(x[:n]))) < BASE_PROJECTION_TOL if n else True
        try:
            hess = pc.hess(x)
        except (CriticalPointError, PoleError):
            hess = None
        result.accepted.append(DarbouxReport(
            point=x, grad_residual=grad_res, constraint_residual=con_res,
            status="accepted", degenerate=degenerate, hessian=hess,
            start_label=label,
            reason="base projection vanishes; no spectral verdict" if degenerate else ""))

    def sort_key(rep):
        return tuple((round(float(v.real), 9), round(float(v.imag), 9))
                     for v in rep.point)

    result.accepted.sort(key=sort_key)
    result.rejected.sort(key=sort_key)
    return result
