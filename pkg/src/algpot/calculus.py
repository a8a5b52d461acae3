"""Derivations of functions on the variety with respect to the base coordinates.

A function f(q, w) restricted to the variety is differentiated along q by
correcting the plain partial with the implicit motion of the extension
variables:

    D_k f = d_k f - (d_w f) . J^(-1) . (d_k G)

where J = dG/dw.  The symbolic route builds J^(-1) as adjugate/det and returns
exact rational expressions; the numeric route (PointCalculus) evaluates plain
partials of V and G once symbolically, then does small linear solves per
point, which stays cheap at any number of extension variables.  Both routes
implement the same derivation, and the tests hold them against each other and
against finite differences of a locally solved branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .expr import PoleError, RatExpr
from .parsing import AlgebraicSetup
from .variety import JacobianData, VarietyNumerics, jacobian, sample_on_variety


class CalculusError(ValueError):
    pass


class CriticalPointError(ArithmeticError):
    """The requested point (numerically) sits on the critical set."""


# ---------------------------------------------------------------------------
# symbolic route
# ---------------------------------------------------------------------------

def _adjugate(M: list) -> list:
    from .variety import det_expr

    m = len(M)
    if m == 0:
        return []
    if m == 1:
        from .expr import ONE
        return [[ONE]]
    adj = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            minor = [
                [M[r][c] for c in range(m) if c != i]
                for r in range(m) if r != j
            ]
            d = det_expr(minor)
            adj[i][j] = d if (i + j) % 2 == 0 else -d
    return adj


def w_derivative_exprs(setup: AlgebraicSetup, jd: JacobianData | None = None):
    """Symbolic s x n matrix of dw_j/dq_k on the variety (adjugate route)."""
    if jd is None:
        jd = jacobian(setup)
    s, n = setup.s, setup.n
    if s == 0:
        return []
    adj = _adjugate([list(r) for r in jd.J])
    out = []
    for j in range(s):
        row = []
        for k in range(n):
            acc = None
            for m in range(s):
                if jd.dGdq[m][k].is_zero or adj[j][m].is_zero:
                    continue
                t = adj[j][m] * jd.dGdq[m][k]
                acc = t if acc is None else acc + t
            if acc is None:
                row.append(RatExpr.const(0))
            else:
                row.append(-(acc / jd.det))
        out.append(row)
    return out


def derive_q(f: RatExpr, setup: AlgebraicSetup, jd: JacobianData | None = None,
             k: int = 0, w_exprs=None) -> RatExpr:
    """Derivation of f along the k-th base coordinate, as an expression."""
    if not 0 <= k < setup.n:
        raise CalculusError(f"coordinate index {k} out of range")
    if w_exprs is None:
        w_exprs = w_derivative_exprs(setup, jd)
    out = f.diff(setup.q_names[k])
    for j, wname in enumerate(setup.w_names):
        fw = f.diff(wname)
        if fw.is_zero or w_exprs[j][k].is_zero:
            continue
        out = out + fw * w_exprs[j][k]
    return out


def grad_q(setup: AlgebraicSetup, jd: JacobianData | None = None,
           f: RatExpr | None = None) -> tuple:
    """Derivations of the potential (or f) along every base coordinate."""
    if f is None:
        f = setup.potential
    w_exprs = w_derivative_exprs(setup, jd)
    return tuple(
        derive_q(f, setup, jd, k, w_exprs=w_exprs) for k in range(setup.n)
    )


def hess_q(setup: AlgebraicSetup, jd: JacobianData | None = None,
           f: RatExpr | None = None) -> tuple:
    """Matrix of second derivations; symmetric on the variety (only there)."""
    w_exprs = w_derivative_exprs(setup, jd)
    g = grad_q(setup, jd, f)
    return tuple(
        tuple(derive_q(g[k], setup, jd, i, w_exprs=w_exprs) for i in range(setup.n))
        for k in range(setup.n)
    )


# ---------------------------------------------------------------------------
# numeric route
# ---------------------------------------------------------------------------

def _compile_or_none(e: RatExpr, order):
    return None if e.is_zero else e.compile(order)


class PointCalculus:
    """Per-point gradients, Hessians and Newton data for the Darboux system.

    Plain first and second partials of the potential and the generators are
    prepared symbolically once; every point evaluation then reduces to dense
    (s x s) linear solves.  Works for any s, including setups where the
    symbolic quotient forms would be bulky.
    """

    def __init__(self, setup: AlgebraicSetup, jd: JacobianData | None = None):
        self.setup = setup
        self.jd = jd if jd is not None else jacobian(setup)
        self.numerics = VarietyNumerics(setup, self.jd)
        order = setup.var_names
        self.N = len(order)
        self.n = setup.n
        self.s = setup.s

        V = setup.potential
        self._v = V.compile(order)
        vgrad = [V.diff(v) for v in order]
        self._vgrad = [_compile_or_none(e, order) for e in vgrad]
        self._vhess = [[None] * self.N for _ in range(self.N)]
        for a in range(self.N):
            for b in range(a, self.N):
                f = _compile_or_none(vgrad[a].diff(order[b]), order)
                self._vhess[a][b] = f
                self._vhess[b][a] = f

        self._ghess = []
        for g in setup.generators:
            ggrad = [g.diff(v) for v in order]
            h = [[None] * self.N for _ in range(self.N)]
            for a in range(self.N):
                for b in range(a, self.N):
                    f = _compile_or_none(ggrad[a].diff(order[b]), order)
                    h[a][b] = f
                    h[b][a] = f
            self._ghess.append(h)
        self._ggrad = []
        for g in setup.generators:
            self._ggrad.append([_compile_or_none(g.diff(v), order) for v in order])

        # lazily compiled probe data (critical set / potential poles)
        self._probe_det = None
        self._probe_den = None

    # -- raw evaluations ------------------------------------------------

    def potential_value(self, x) -> complex:
        return complex(self._v(x))

    def _eval_vec(self, funcs, x) -> np.ndarray:
        return np.array([0j if f is None else f(x) for f in funcs], dtype=complex)

    def _eval_mat(self, grid, x) -> np.ndarray:
        out = np.zeros((len(grid), len(grid[0])), dtype=complex)
        for a, row in enumerate(grid):
            for b, f in enumerate(row):
                if f is not None:
                    out[a, b] = f(x)
        return out

    def _core(self, x):
        """J, dGdq and W = dw/dq at the point; raises off the good set."""
        x = np.asarray(x, dtype=complex)
        n, s = self.n, self.s
        if s == 0:
            return (np.zeros((0, 0), complex), np.zeros((0, n), complex),
                    np.zeros((0, n), complex))
        J = self.numerics.j_matrix(x)
        B = self.numerics.dgdq_matrix(x)
        try:
            W = np.linalg.solve(J, -B)
        except np.linalg.LinAlgError:
            raise CriticalPointError("dG/dw is singular at the point") from None
        if not np.all(np.isfinite(W)):
            raise CriticalPointError("dG/dw is singular at the point")
        return J, B, W

    def w_derivative(self, x) -> np.ndarray:
        """Numeric s x n matrix of dw_j/dq_k at the point."""
        return self._core(x)[2]

    def grad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        _, _, W = self._core(x)
        vg = self._eval_vec(self._vgrad, x)
        return vg[: self.n] + W.T @ vg[self.n:]

    def _dg_blocks(self, x):
        """Plain partials of the derivation vector g: dg/dq, dg/dw and W."""
        x = np.asarray(x, dtype=complex)
        n, s, N = self.n, self.s, self.N
        J, B, W = self._core(x)
        vh = self._eval_mat(self._vhess, x)
        vg = self._eval_vec(self._vgrad, x)
        gh = [self._eval_mat(h, x) for h in self._ghess]

        if s:
            u = np.linalg.solve(J.T, vg[n:])
        else:
            u = np.zeros(0, dtype=complex)

        dg = np.zeros((n, N), dtype=complex)  # dg[k, v] = d g_k / d x_v
        for v in range(N):
            row = vh[v, :n] + W.T @ vh[v, n:]
            if s:
                Pv = np.array([gh[a][v, :n] + gh[a][v, n:] @ W for a in range(s)])
                row = row - Pv.T @ u
            dg[:, v] = row
        return dg[:, :n], dg[:, n:], W, J, B

    def hess(self, x) -> np.ndarray:
        dgdq, dgdw, W, _, _ = self._dg_blocks(x)
        return dgdq + dgdw @ W

    def grad_and_hess(self, x):
        x = np.asarray(x, dtype=complex)
        dgdq, dgdw, W, _, _ = self._dg_blocks(x)
        vg = self._eval_vec(self._vgrad, x)
        g = vg[: self.n] + W.T @ vg[self.n:]
        return g, dgdq + dgdw @ W

    # -- Darboux Newton system -------------------------------------------

    def darboux_residual(self, x) -> np.ndarray:
        """F(x) = (grad V - q, G); zero exactly at Darboux candidates."""
        x = np.asarray(x, dtype=complex)
        g = self.grad(x)
        return np.concatenate([g - x[: self.n], self.numerics.g_values(x)])

    def darboux_system(self, x):
        """(F, plain Jacobian of F) for Newton iterations."""
        x = np.asarray(x, dtype=complex)
        n, s = self.n, self.s
        dgdq, dgdw, W, J, B = self._dg_blocks(x)
        vg = self._eval_vec(self._vgrad, x)
        g = vg[:n] + W.T @ vg[n:]
        F = np.concatenate([g - x[:n], self.numerics.g_values(x)])
        Jac = np.zeros((n + s, n + s), dtype=complex)
        Jac[:n, :n] = dgdq - np.eye(n)
        Jac[:n, n:] = dgdw
        Jac[n:, :n] = B
        Jac[n:, n:] = J
        return F, Jac

    # -- proximity probes --------------------------------------------------

    def _probe(self, compiled_f, compiled_fgrad, x, radius, tol=1e-10,
               max_iter=25):
        """Gauss-Newton toward (G = 0, f = 0); True when a solution sits
        within `radius` of x.  Measures distance to a set rather than the
        value of f, which stays meaningful for barely-converged candidates."""
        x0 = np.asarray(x, dtype=complex)
        y = x0.copy()
        s, N = self.s, self.N
        for _ in range(max_iter):
            rows = []
            vals = []
            for a in range(s):
                vals.append(self.numerics._g[a](y))
                rows.append(self._eval_vec(self._ggrad[a], y))
            vals.append(compiled_f(y))
            rows.append(self._eval_vec(compiled_fgrad, y))
            F = np.array(vals, dtype=complex)
            if np.max(np.abs(F)) <= tol:
                return bool(np.linalg.norm(y - x0) <= radius)
            A = np.array(rows, dtype=complex)
            step, *_ = np.linalg.lstsq(A, F, rcond=None)
            if not np.all(np.isfinite(step)):
                return False
            y = y - step
            if np.linalg.norm(y - x0) > 10 * radius + 1.0:
                return False
        return False

    def near_critical_set(self, x, radius: float = 1e-4) -> bool:
        if self._probe_det is None:
            order = self.setup.var_names
            det = self.jd.det
            c = det.constant_value()
            if c is not None:
                self._probe_det = ("const", c)
            else:
                self._probe_det = (
                    det.compile(order),
                    [_compile_or_none(det.diff(v), order) for v in order],
                )
        if self._probe_det[0] == "const":
            return self._probe_det[1] == 0
        return self._probe(self._probe_det[0], self._probe_det[1], x, radius)

    def near_potential_pole(self, x, radius: float = 1e-4) -> bool:
        V = self.setup.potential
        if V.is_polynomial:
            return False
        if self._probe_den is None:
            order = self.setup.var_names
            den = RatExpr(dict(V.den), {(): Fraction(1)})
            self._probe_den = (
                den.compile(order),
                [_compile_or_none(den.diff(v), order) for v in order],
            )
        return self._probe(self._probe_den[0], self._probe_den[1], x, radius)

    def near_sigma(self, x, radius: float = 1e-4) -> bool:
        return self.near_critical_set(x, radius) or self.near_potential_pole(x, radius)


def in_sigma_v(setup: AlgebraicSetup, point, tol: float = 1e-8,
               calc: PointCalculus | None = None) -> bool:
    """Pointwise bad-set membership: critical set, or potential undefined.

    The potential side tests its denominator against tol scaled by the
    numerator's size, so the verdict does not depend on the overall scale of
    the point; an indeterminate 0/0 point counts as inside.
    """
    x = np.asarray(point, dtype=complex)
    pc = calc if calc is not None else PointCalculus(setup)
    if abs(pc.numerics.det_value(x)) <= tol:
        return True
    V = setup.potential
    if V.is_polynomial:
        return False
    order = setup.var_names
    from .expr import _poly_eval  # internal, stable

    env = {name: x[i] for i, name in enumerate(order)}
    den = _poly_eval(V.den, env)
    num = _poly_eval(V.num, env)
    return abs(den) <= tol * max(1.0, abs(num))


# ---------------------------------------------------------------------------
# weighted homogeneity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Homogeneity:
    """Canonical weighted-homogeneity data: coprime, base weight positive."""

    d1: int
    weights: tuple  # one integer weight per extension variable
    d2: int

    @property
    def degree(self) -> Fraction:
        return Fraction(self.d2, self.d1)

    @property
    def integer_degree(self):
        f = self.degree
        return int(f) if f.denominator == 1 else None


def _weight_vector(mono, q_set, w_index, s):
    qdeg = 0
    wexp = [0] * s
    for name, e in mono:
        if name in q_set:
            qdeg += e
        else:
            wexp[w_index[name]] = e
    return [qdeg] + wexp


def _rational_nullspace(rows, dim):
    """Basis of the exact nullspace of the given rational constraint rows."""
    mat = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    for c in range(dim):
        p = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                p = i
                break
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        pv = mat[r][c]
        mat[r] = [v / pv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * dim
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        basis.append(v)
    return basis


def detect_homogeneity(setup: AlgebraicSetup, verify: bool = True,
                       samples: int = 5, seed: int = 1234,
                       rel_tol: float = 1e-9,
                       numerics: VarietyNumerics | None = None):
    """Weighted-homogeneity weights, or None when no weighting exists.

    All base coordinates share one weight d1; each extension variable gets
    its own.  The constraints say every polynomial in sight (each generator,
    and numerator/denominator of the potential separately) is isobaric; the
    solution ray is scaled to coprime integers with d1 > 0, the gcd taken
    over (d1, weights, d2).  When a weighting is found the scaling identity
    is re-checked numerically on random variety points before reporting.
    """
    n, s = setup.n, setup.s
    q_set = set(setup.q_names)
    w_index = {name: j for j, name in enumerate(setup.w_names)}
    dim = 1 + s

    polys = [g.num_terms() for g in setup.generators]
    vnum = setup.potential.num_terms()
    vden = setup.potential.den_terms()
    if not vnum:
        return None  # zero potential: no meaningful degree
    polys.append(vnum)
    if not setup.potential.is_polynomial:
        polys.append(vden)

    rows = []
    for terms in polys:
        ref = _weight_vector(terms[0][0], q_set, w_index, s)
        for mono, _ in terms[1:]:
            v = _weight_vector(mono, q_set, w_index, s)
            rows.append([a - b for a, b in zip(v, ref)])

    # an extension variable that appears nowhere gets weight 0 by fiat
    used = set()
    for terms in polys:
        for mono, _ in terms:
            for name, _e in mono:
                used.add(name)
    for j, name in enumerate(setup.w_names):
        if name not in used:
            row = [Fraction(0)] * dim
            row[1 + j] = Fraction(1)
            rows.append(row)

    basis = _rational_nullspace(rows, dim)
    cand = [v for v in basis if v[0] != 0]
    if len(basis) != 1 or not cand:
        return None
    v = cand[0]
    if v[0] < 0:
        v = [-a for a in v]

    lcm = 1
    for a in v:
        lcm = lcm * a.denominator // math.gcd(lcm, a.denominator)
    ints = [int(a * lcm) for a in v]

    wts = {name: ints[1 + j] for j, name in enumerate(setup.w_names)}
    wts.update({name: ints[0] for name in setup.q_names})

    def wdeg(mono):
        return sum(wts[name] * e for name, e in mono)

    d2 = wdeg(vnum[0][0]) - wdeg(vden[0][0])
    g = 0
    for a in ints + [d2]:
        g = math.gcd(g, abs(a))
    if g > 1:
        ints = [a // g for a in ints]
        d2 //= g
    hom = Homogeneity(d1=ints[0], weights=tuple(ints[1:]), d2=d2)

    if verify and not _verify_homogeneity(setup, hom, samples, seed, rel_tol, numerics):
        raise CalculusError("homogeneity verification failed (detected weights are inconsistent)")
    return hom


def _verify_homogeneity(setup, hom, samples, seed, rel_tol, numerics=None):
    vn = numerics if numerics is not None else VarietyNumerics(setup)
    rng = np.random.default_rng(seed)
    order = setup.var_names
    vfun = setup.potential.compile(order)
    checked = 0
    attempts = 0
    while checked < samples and attempts < samples * 10:
        attempts += 1
        x = sample_on_variety(setup, vn, rng)
        if x is None:
            continue
        alpha = (0.5 + rng.random()) * np.exp(2j * np.pi * rng.random())
        y = x.copy()
        for i in range(setup.n):
            y[i] = x[i] * alpha ** hom.d1
        for j in range(setup.s):
            y[setup.n + j] = x[setup.n + j] * alpha ** hom.weights[j]
        try:
            v0 = vfun(x)
            v1 = vfun(y)
        except PoleError:
            continue
        expected = v0 * alpha ** hom.d2
        scale = max(1.0, abs(expected))
        if abs(v1 - expected) > rel_tol * scale:
            return False
        if vn.residual(y) > 1e-6:
            return False
        checked += 1
    return checked > 0
