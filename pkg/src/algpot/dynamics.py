"""Constrained Hamiltonian dynamics on the variety, plus homothetic orbits.

The phase space is (q, p) with the fiber variables w carried along as a
redundant coordinate pinned to the variety by G(q, w) = 0.  The equations
of motion use the variety-intrinsic gradient, so the fiber block J = dG/dw
must stay invertible along the trajectory; the integrator refuses to start
on the critical set and stops with a diagnostic when a trajectory reaches
it.

Homothetic orbits exist through any Darboux point of a weighted-homogeneous
potential: all coordinates scale by powers of one scalar profile phi(t),
which solves a one-dimensional ODE.  They are produced here in closed form
up to that scalar integration, together with a residual measuring how well
the scaled curve satisfies the full equations of motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .calculus import CriticalPointError, Homogeneity, PointCalculus
from .expr import PoleError
from .parsing import AlgebraicSetup
from .variety import VarietyNumerics

DEFAULT_SIGMA_TOL = 1e-8


class CriticalSetError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrajectoryState:
    t: float
    q: np.ndarray
    p: np.ndarray
    w: np.ndarray
    energy: float
    constraint_residual: float


@dataclass
class Trajectory:
    samples: list
    terminated: str  # "completed" | "critical_set"
    message: str = ""
    energy_drift: float = 0.0
    max_constraint_residual: float = 0.0

    @property
    def final(self) -> TrajectoryState:
        return self.samples[-1]


def _real(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.size and np.max(np.abs(arr.imag)) > 1e-12 * max(1.0, np.max(np.abs(arr.real))):
        raise ValueError("real dynamics requires a real phase point")
    return arr.real.astype(float)


class ConstrainedSystem:
    """Evaluates the vector field and bookkeeping quantities at real states."""

    def __init__(self, setup: AlgebraicSetup, pc: PointCalculus | None = None,
                 sigma_tol: float = DEFAULT_SIGMA_TOL):
        self.setup = setup
        self.pc = pc or PointCalculus(setup)
        self.numerics = self.pc.numerics
        self.sigma_tol = float(sigma_tol)
        self.n = setup.n
        self.s = setup.s

    def split(self, y: np.ndarray):
        n, s = self.n, self.s
        return y[:n], y[n:2 * n], y[2 * n:2 * n + s]

    def join(self, q, p, w) -> np.ndarray:
        return np.concatenate([np.asarray(q, float), np.asarray(p, float),
                               np.asarray(w, float)])

    def det_at(self, y: np.ndarray) -> float:
        q, _, w = self.split(y)
        x = np.concatenate([q, w]).astype(complex)
        return abs(self.numerics.det_value(x))

    def energy(self, y: np.ndarray) -> float:
        q, p, w = self.split(y)
        x = np.concatenate([q, w]).astype(complex)
        return float(0.5 * np.dot(p, p) + self.pc.potential_value(x).real)

    def constraint_residual(self, y: np.ndarray) -> float:
        q, _, w = self.split(y)
        x = np.concatenate([q, w]).astype(complex)
        return float(np.max(np.abs(self.numerics.g_values(x)))) if self.s else 0.0

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        q, p, w = self.split(y)
        x = np.concatenate([q, w]).astype(complex)
        try:
            grad = self.pc.grad(x).real
            wdot = (self.pc.w_derivative(x) @ p).real if self.s else np.zeros(0)
        except (CriticalPointError, PoleError) as exc:
            raise CriticalSetError(str(exc)) from exc
        return np.concatenate([p, -grad, wdot])

    def project_fiber(self, y: np.ndarray) -> np.ndarray:
        """Newton-correct w back onto G(q, .) = 0, keeping q and p fixed."""
        q, p, w = self.split(y)
        if not self.s:
            return y
        corrected = self.numerics.solve_fiber(q.astype(complex), w.astype(complex))
        if corrected is None:
            return y
        return self.join(q, p, corrected.real)


def integrate(setup: AlgebraicSetup, q0, p0, w0, t_grid,
              pc: PointCalculus | None = None,
              sigma_tol: float = DEFAULT_SIGMA_TOL,
              project: bool = False,
              rtol: float = 1e-12, atol: float = 1e-12) -> Trajectory:
    """Integrate the constrained flow, sampling at the times in t_grid.

    Returns early with terminated="critical_set" if the initial point is
    already within sigma_tol of a vanishing fiber Jacobian, and stops with
    the same diagnostic if the event |det J| = sigma_tol fires mid-flight.
    """
    sys = ConstrainedSystem(setup, pc, sigma_tol)
    t_grid = np.asarray(t_grid, dtype=float)
    y = sys.join(_real(q0), _real(p0), _real(w0))

    def sample(t, yv):
        return TrajectoryState(t=float(t), q=yv[:sys.n].copy(),
                               p=yv[sys.n:2 * sys.n].copy(),
                               w=yv[2 * sys.n:].copy(),
                               energy=sys.energy(yv),
                               constraint_residual=sys.constraint_residual(yv))

    if sys.det_at(y) <= sigma_tol:
        st = sample(t_grid[0], y)
        return Trajectory(samples=[st], terminated="critical_set",
                          message="initial point lies in the critical set "
                                  "(fiber Jacobian numerically singular); "
                                  "the intrinsic vector field is undefined here",
                          energy_drift=0.0,
                          max_constraint_residual=st.constraint_residual)

    def det_event(t, yv):
        return sys.det_at(yv) - sigma_tol

    det_event.terminal = True
    det_event.direction = -1

    # |det| - tol never changes sign when the flow sweeps through the
    # critical set transversally (the dip is far narrower than any step),
    # so track the signed determinant as well and stop on any zero crossing.
    def det_sign_event(t, yv):
        q, _, w = sys.split(yv)
        x = np.concatenate([q, w]).astype(complex)
        return sys.numerics.det_value(x).real

    det_sign_event.terminal = True
    det_sign_event.direction = 0

    samples = [sample(t_grid[0], y)]
    terminated = "completed"
    message = ""
    for t0, t1 in zip(t_grid[:-1], t_grid[1:]):
        try:
            sol = solve_ivp(sys.rhs, (t0, t1), y, method="DOP853",
                            rtol=rtol, atol=atol,
                            events=(det_event, det_sign_event),
                            dense_output=False)
        except CriticalSetError as exc:
            terminated = "critical_set"
            message = str(exc)
            break
        if not sol.success and sol.status != 1:
            raise RuntimeError(f"integration failed: {sol.message}")
        if sol.status == 1:  # event fired
            terminated = "critical_set"
            fired = [(te[0], ye[0]) for te, ye in
                     zip(sol.t_events, sol.y_events) if len(te)]
            t_stop, y = min(fired, key=lambda item: item[0])
            t_stop = float(t_stop)
            samples.append(sample(t_stop, y))
            message = (f"trajectory reached the critical set at t={t_stop:.6g}; "
                       "stopping (fiber Jacobian below tolerance)")
            break
        y = sol.y[:, -1]
        if project:
            y = sys.project_fiber(y)
        samples.append(sample(t1, y))

    e0 = samples[0].energy
    drift = max(abs(st.energy - e0) for st in samples)
    cmax = max(st.constraint_residual for st in samples)
    return Trajectory(samples=samples, terminated=terminated, message=message,
                      energy_drift=drift, max_constraint_residual=cmax)


# ---------------------------------------------------------------------------
# homothetic orbits
# ---------------------------------------------------------------------------

@dataclass
class HomotheticOrbit:
    times: np.ndarray
    phi: np.ndarray
    phi_dot: np.ndarray
    states: list  # (q, p, w) complex arrays per sample
    hamiltonian: np.ndarray  # complex H(t) values
    expected_hamiltonian: complex  # k * V(c) * energy_const
    eq_residual: float  # worst violation of the momentum equation
    constraint_residual: float
    truncated: bool  # phi reached the collapse threshold before the end


def homothetic_orbit(setup: AlgebraicSetup, hom: Homogeneity, c,
                     t_grid, energy_const: float = 1.0, branch: int = +1,
                     pc: PointCalculus | None = None) -> HomotheticOrbit:
    """Scale the Darboux point c through the one-dimensional profile phi.

    The profile solves  phi'' = -phi**(d2-2*d1+1)/d1 - (d1-1)*phi'**2/phi,
    equivalently u'' = -u**(k-1) for u = phi**d1, normalized so that
    u(0)**k = 1/2 and the scalar energy u'**2/2 + u**k/k equals
    energy_const.  The Hamiltonian along the orbit is then constant and
    equals degree * V(c) * energy_const.
    """
    pc = pc or PointCalculus(setup)
    d1, d2 = hom.d1, hom.d2
    kj = hom.weights
    c = np.asarray(c, dtype=complex)
    n, s = setup.n, setup.s
    cq, cw = c[:n], c[n:]

    phi0 = 0.5 ** (1.0 / float(d2))
    rad = 2.0 * (energy_const - float(d1) / float(d2) / 2.0)
    if rad < 0:
        raise ValueError("energy constant too small for the standard section")
    phidot0 = branch * math.sqrt(rad) * phi0 ** (1 - d1) / d1

    gamma = float(d2 - 2 * d1 + 1)

    def rhs(t, y):
        phi, dphi = y
        return [dphi, -phi ** gamma / d1 - (d1 - 1) * dphi * dphi / phi]

    def collapse(t, y):
        return y[0] - 1e-6

    collapse.terminal = True
    collapse.direction = -1

    t_grid = np.asarray(t_grid, dtype=float)
    sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), [phi0, phidot0],
                    method="DOP853", rtol=1e-12, atol=1e-12,
                    t_eval=t_grid, events=collapse)
    if not sol.success and sol.status != 1:
        raise RuntimeError(f"profile integration failed: {sol.message}")
    truncated = sol.status == 1
    times = sol.t
    phi = sol.y[0]
    dphi = sol.y[1]

    d1f = float(d1)
    states = []
    H = np.empty(len(times), dtype=complex)
    eq_res = 0.0
    con_res = 0.0
    wexp = np.array([float(k) for k in kj])
    for i, (ph, dp) in enumerate(zip(phi, dphi)):
        q = ph ** d1f * cq
        w = (ph ** wexp) * cw if s else np.zeros(0, dtype=complex)
        p = d1f * dp * ph ** (d1f - 1) * cq
        x = np.concatenate([q, w])
        states.append((q, p, w))
        v = pc.potential_value(x)
        H[i] = 0.5 * np.sum(p * p) + v
        ddp = -ph ** gamma / d1f - (d1f - 1) * dp * dp / ph
        pdot = (d1f * (d1f - 1) * ph ** (d1f - 2) * dp * dp
                + d1f * ph ** (d1f - 1) * ddp) * cq
        grad = pc.grad(x)
        eq_res = max(eq_res, float(np.max(np.abs(pdot + grad))) if n else 0.0)
        if s:
            con_res = max(con_res, float(np.max(np.abs(pc.numerics.g_values(x)))))

    vc = pc.potential_value(c)
    expected = complex(hom.degree) * vc * energy_const
    return HomotheticOrbit(times=times, phi=phi, phi_dot=dphi, states=states,
                           hamiltonian=H, expected_hamiltonian=expected,
                           eq_residual=eq_res, constraint_residual=con_res,
                           truncated=truncated)
