"""Classical trajectories of quadratic-in-velocity Lagrangians.

The Euler-Lagrange equations are integrated with a fixed-step classical
Runge-Kutta scheme (RK4) on a deterministic uniform grid, and two-point
boundary problems are solved by Newton shooting on the initial velocity.
The shooting Jacobian comes from the variational (Jacobi) system propagated
alongside the trajectory with the same RK4 stages, so it is the derivative
of the discrete endpoint map to machine precision and Newton converges
quadratically.  The action is accumulated by Simpson quadrature on the
grid, which matches the integrator order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NoConvergence, SingularMetric, SingularShootingJacobian
from .models import FD_STEP, LagrangianModel, evaluate_hamiltonian, legendre_momentum

DEFAULT_N_STEPS = 1000
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 50


@dataclass(frozen=True)
class Trajectory:
    """Uniform-grid samples of one initial value solution."""

    times: np.ndarray       # (n + 1,)
    positions: np.ndarray   # (n + 1, D)
    velocities: np.ndarray  # (n + 1, D)


@dataclass(frozen=True)
class ClassicalPath:
    """A converged boundary value solution plus derived endpoint data.

    Attributes
    ----------
    times, positions, velocities : ndarray
        Trajectory samples on the uniform grid, ``positions[0] == x_a``.
    action : float
        Simpson quadrature of the Lagrangian along the samples, with the
        first order endpoint-miss correction ``- p_b . (x(t_b) - x_b)`` so
        the value stays differentiable in the endpoints to machine
        precision (the raw miss is below ``bvp_residual`` anyway).
    p_a, p_b : ndarray
        Conjugate momenta at the endpoints.
    energy_a : float
        Hamiltonian at the initial endpoint.
    bvp_residual : float
        Max-norm endpoint miss of the accepted Newton iterate.
    """

    model: LagrangianModel
    x_a: np.ndarray
    x_b: np.ndarray
    t_a: float
    t_b: float
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    action: float
    p_a: np.ndarray
    p_b: np.ndarray
    energy_a: float
    bvp_residual: float

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    @property
    def duration(self) -> float:
        return self.t_b - self.t_a

    @property
    def v_a(self) -> np.ndarray:
        return self.velocities[0]

    @property
    def v_b(self) -> np.ndarray:
        return self.velocities[-1]


# ---------------------------------------------------------------------------
# Euler-Lagrange right-hand side and its linearization


def _kinetic_force(model: LagrangianModel, x, v, t) -> np.ndarray:
    """Generalized force without the -grad V term.

    F_i = 1/2 v.(d_i g).v - (d_k g_ij) v_k v_j + (da^T - da).v
          - (d_t g).v - d_t a
    """
    dg = np.asarray(model.metric_grad(x, t))
    da = np.asarray(model.vector_potential_grad(x, t))
    f = (0.5 * np.einsum("ijk,j,k->i", dg, v, v)
         - np.einsum("kij,k,j->i", dg, v, v)
         + (da.T - da) @ v)
    if model.metric_dt is not None:
        f = f - np.asarray(model.metric_dt(x, t)) @ v
    if model.vector_potential_dt is not None:
        f = f - np.asarray(model.vector_potential_dt(x, t))
    return f


def acceleration(model: LagrangianModel, x, v, t) -> np.ndarray:
    """Solve g(x, t) vdot = F(x, v, t) for the Euler-Lagrange acceleration."""
    rhs = _kinetic_force(model, x, v, t) - np.asarray(model.potential_grad(x, t))
    g = np.asarray(model.metric(x, t), dtype=float)
    try:
        return np.linalg.solve(g, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(f"metric singular at x={x}, t={t}") from exc


def el_linearization(model: LagrangianModel, x, v, t):
    """Acceleration and its phase-space Jacobian blocks.

    Returns ``(acc, jx, jv)`` with ``jx = d acc / d x`` and
    ``jv = d acc / d v``.  The potential contribution to jx is analytic
    (potential_hess); x-derivatives of metric_grad and
    vector_potential_grad vanish for models flagged
    ``kinetic_gradients_constant`` and are filled by central differences
    otherwise.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    g = np.asarray(model.metric(x, t), dtype=float)
    dg = np.asarray(model.metric_grad(x, t))
    da = np.asarray(model.vector_potential_grad(x, t))
    hv = np.asarray(model.potential_hess(x, t))

    force = _kinetic_force(model, x, v, t) - np.asarray(model.potential_grad(x, t))
    try:
        gi = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(f"metric singular at x={x}, t={t}") from exc
    acc = gi @ force

    dfdv = (np.einsum("imk,k->im", dg, v)
            - np.einsum("mij,j->im", dg, v)
            - np.einsum("kim,k->im", dg, v)
            + (da.T - da))
    if model.metric_dt is not None:
        dfdv = dfdv - np.asarray(model.metric_dt(x, t))

    dfdx = -hv
    if not model.kinetic_gradients_constant:
        h = FD_STEP * max(1.0, float(np.max(np.abs(x))))
        cols = []
        for m in range(model.dim):
            e = np.zeros(model.dim)
            e[m] = h
            cols.append((_kinetic_force(model, x + e, v, t)
                         - _kinetic_force(model, x - e, v, t)) / (2.0 * h))
        dfdx = dfdx + np.stack(cols, axis=1)
    # variation of g^-1: d acc / d x_m -= g^-1 (d_m g) acc
    dfdx = dfdx - np.einsum("mij,j->im", dg, acc)
    return acc, gi @ dfdx, gi @ dfdv


# ---------------------------------------------------------------------------
# fixed-step RK4, optionally carrying a variational block


def _rk4_run(model: LagrangianModel, x0, v0, t_a: float, t_b: float,
             n_steps: int, vblock0: Optional[np.ndarray]):
    """Integrate the EL system, optionally with tangent columns.

    ``vblock0`` is a (2D, m) matrix of initial variations; its columns are
    propagated through the linearized flow evaluated at the RK4 stage
    points of the base trajectory.  Returns ``(Trajectory, vblock(t_b))``.
    """
    if n_steps < 8:
        raise ValueError("n_steps must be at least 8")
    d = model.dim
    x = np.asarray(x0, dtype=float).copy()
    v = np.asarray(v0, dtype=float).copy()
    if x.shape != (d,) or v.shape != (d,):
        raise ValueError(f"state shapes {x.shape}, {v.shape} do not match dim={d}")
    carry = vblock0 is not None
    w = np.asarray(vblock0, dtype=float).copy() if carry else None

    times = np.linspace(t_a, t_b, n_steps + 1)
    xs = np.empty((n_steps + 1, d))
    vs = np.empty((n_steps + 1, d))
    xs[0], vs[0] = x, v
    h = (t_b - t_a) / n_steps

    def rhs(t, xc, vc, wc):
        if carry:
            acc, jx, jv = el_linearization(model, xc, vc, t)
            dw = np.vstack((wc[d:, :], jx @ wc[:d, :] + jv @ wc[d:, :]))
            return vc, acc, dw
        return vc, acceleration(model, xc, vc, t), None

    for k in range(n_steps):
        t = times[k]
        k1x, k1v, k1w = rhs(t, x, v, w)
        k2x, k2v, k2w = rhs(t + 0.5 * h, x + 0.5 * h * k1x, v + 0.5 * h * k1v,
                            w + 0.5 * h * k1w if carry else None)
        k3x, k3v, k3w = rhs(t + 0.5 * h, x + 0.5 * h * k2x, v + 0.5 * h * k2v,
                            w + 0.5 * h * k2w if carry else None)
        k4x, k4v, k4w = rhs(t + h, x + h * k3x, v + h * k3v,
                            w + h * k3w if carry else None)
        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if carry:
            w = w + (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        xs[k + 1], vs[k + 1] = x, v

    return Trajectory(times, xs, vs), w


def integrate_ivp(model: LagrangianModel, x0, v0, t_a: float, t_b: float,
                  n_steps: int = DEFAULT_N_STEPS) -> Trajectory:
    """Integrate the Euler-Lagrange equations from (x0, v0).

    Parameters
    ----------
    n_steps : int
        Number of uniform RK4 steps, at least 8.

    Returns
    -------
    Trajectory
        Samples at the n_steps + 1 grid times.
    """
    traj, _ = _rk4_run(model, x0, v0, t_a, t_b, n_steps, None)
    return traj


def integrate_variational(model: LagrangianModel, x0, v0, t_a: float, t_b: float,
                          n_steps: int, vblock0: np.ndarray):
    """Trajectory plus final value of a variational block (2D, m)."""
    return _rk4_run(model, x0, v0, t_a, t_b, n_steps, vblock0)


# ---------------------------------------------------------------------------
# action quadrature


def simpson_action(model: LagrangianModel, traj: Trajectory) -> float:
    """Simpson's rule over the Lagrangian samples; grid count must be even."""
    n = len(traj.times) - 1
    if n % 2 != 0:
        raise ValueError("Simpson quadrature needs an even number of steps")
    lag = np.array([
        0.5 * traj.velocities[k] @ model.metric(traj.positions[k], traj.times[k])
        @ traj.velocities[k]
        + traj.velocities[k] @ model.vector_potential(traj.positions[k], traj.times[k])
        - model.potential(traj.positions[k], traj.times[k])
        for k in range(n + 1)
    ])
    h = (traj.times[-1] - traj.times[0]) / n
    weights = np.ones(n + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(h / 3.0 * weights @ lag)


# ---------------------------------------------------------------------------
# boundary value problem


def solve_bvp(model: LagrangianModel, x_a, x_b, t_a: float, t_b: float,
              v0_guess=None, n_steps: int = DEFAULT_N_STEPS,
              tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
              ) -> ClassicalPath:
    """Newton shooting for the two-point boundary problem.

    Parameters
    ----------
    v0_guess : array, optional
        Initial velocity seed; defaults to the straight-line velocity
        (x_b - x_a) / (t_b - t_a).
    n_steps : int
        Even number of RK4 steps (Simpson action quadrature).
    tol : float
        Max-norm endpoint tolerance.

    Raises
    ------
    NoConvergence
        Iteration budget exhausted; carries the best residual seen.
    SingularShootingJacobian
        dx(t_b)/dv0 singular at an iterate (conjugate endpoints).
    """
    if not t_b > t_a:
        raise ValueError("t_b must be larger than t_a")
    if n_steps % 2 != 0:
        raise ValueError("n_steps must be even")
    d = model.dim
    x_a = np.asarray(x_a, dtype=float)
    x_b = np.asarray(x_b, dtype=float)
    if x_a.shape != (d,) or x_b.shape != (d,):
        raise ValueError(f"endpoint shapes do not match dim={d}")

    v0 = (np.asarray(v0_guess, dtype=float).copy() if v0_guess is not None
          else (x_b - x_a) / (t_b - t_a))
    vblock0 = np.vstack((np.zeros((d, d)), np.eye(d)))

    best_res = np.inf
    traj = None
    converged = False
    for _ in range(max_iter):
        traj, wb = integrate_variational(model, x_a, v0, t_a, t_b, n_steps, vblock0)
        miss = traj.positions[-1] - x_b
        res = float(np.max(np.abs(miss)))
        best_res = min(best_res, res)
        if res <= tol:
            converged = True
            break
        jac = wb[:d, :]
        det = np.linalg.det(jac)
        # free-particle flow gives jac = T I, so T floors the natural scale
        scale = max(t_b - t_a, np.linalg.norm(jac) / np.sqrt(d))
        if abs(det) < 1e-12 * scale**d:
            raise SingularShootingJacobian(
                f"dx(t_b)/dv0 singular at iterate (det={det:.3e}); endpoints "
                f"conjugate for t_b - t_a = {t_b - t_a}")
        v0 = v0 - np.linalg.solve(jac, miss)
    if not converged:
        raise NoConvergence(max_iter, best_res)

    p_a = legendre_momentum(model, traj.positions[0], traj.velocities[0], t_a)
    p_b = legendre_momentum(model, traj.positions[-1], traj.velocities[-1], t_b)
    action = simpson_action(model, traj) - float(p_b @ (traj.positions[-1] - x_b))
    energy_a = evaluate_hamiltonian(model, traj.positions[0], p_a, t_a)
    return ClassicalPath(
        model=model, x_a=x_a, x_b=x_b, t_a=float(t_a), t_b=float(t_b),
        times=traj.times, positions=traj.positions, velocities=traj.velocities,
        action=action, p_a=p_a, p_b=p_b, energy_a=energy_a, bvp_residual=res,
    )


# ---------------------------------------------------------------------------
# lookups along a stored path


def _bracket(times: np.ndarray, t: float):
    if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
        raise ValueError(f"t={t} outside path interval [{times[0]}, {times[-1]}]")
    k = int(np.searchsorted(times, t, side="right") - 1)
    return min(max(k, 0), len(times) - 2)


def state_at(path, t: float):
    """Cubic Hermite interpolation of (x, v) between grid samples."""
    times = path.times
    k = _bracket(times, t)
    h = times[k + 1] - times[k]
    s = (t - times[k]) / h
    x0, x1 = path.positions[k], path.positions[k + 1]
    v0, v1 = path.velocities[k], path.velocities[k + 1]
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    x = h00 * x0 + h10 * h * v0 + h01 * x1 + h11 * h * v1
    v = ((6 * s**2 - 6 * s) * (x0 - x1) / h
         + (3 * s**2 - 4 * s + 1) * v0 + (3 * s**2 - 2 * s) * v1)
    return x, v


def path_energy(path: ClassicalPath, t: float) -> float:
    """Hamiltonian along the path, linear interpolation of (x, v) off grid."""
    times = path.times
    k = _bracket(times, t)
    h = times[k + 1] - times[k]
    s = (t - times[k]) / h
    x = (1 - s) * path.positions[k] + s * path.positions[k + 1]
    v = (1 - s) * path.velocities[k] + s * path.velocities[k + 1]
    p = legendre_momentum(path.model, x, v, t)
    return evaluate_hamiltonian(path.model, x, p, t)
