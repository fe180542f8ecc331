"""Endpoint Hessian blocks of the classical action.

For a solved boundary problem the three second-derivative blocks of the
action A(x_a, x_b) are obtained from the variational flow Phi(t_b) of the
Euler-Lagrange linearization (the matrix Jacobi system).  Writing the
blocks of Phi as dx_b/dx_a = Pxx, dx_b/dv_a = Pxv, dv_b/dx_a = Pvx,
dv_b/dv_a = Pvv, and using p = g v + a:

    mixed = -d2A/dx_a dx_b = g_a Pxv^-1                (Van Vleck matrix)
    aa    =  d2A/dx_a dx_a = -Gamma_a - da_a + g_a Pxv^-1 Pxx
    bb    =  d2A/dx_b dx_b =  Gamma_b + da_b + g_b Pvv Pxv^-1

with Gamma[i, j] = (d_j g_ik) v_k at the respective endpoint.  A finite
difference fallback over re-solved boundary problems serves as an
independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import ClassicalPath, integrate_variational, solve_bvp, state_at
from .errors import ConjugatePoint, VectorPotentialPresent
from .models import LagrangianModel, metric_solve

CAUSTIC_DET_THRESHOLD = 1e-12
VECTOR_POTENTIAL_ZERO_TOL = 1e-14

METHOD_JACOBI = "JacobiField"
METHOD_FD = "FiniteDifference"


@dataclass(frozen=True)
class ActionHessian:
    """Second derivatives of the action with respect to the endpoints.

    ``mixed`` is the negative cross block -d2A/dx_a dx_b, sign-anchored so
    the free particle gives M / (t_b - t_a), positive definite.  ``aa`` and
    ``bb`` are the diagonal blocks, both symmetric.
    """

    mixed: np.ndarray
    aa: np.ndarray
    bb: np.ndarray
    method: str
    grid_info: dict

    @property
    def dim(self) -> int:
        return self.mixed.shape[0]


def _checked_inverse(mat: np.ndarray, duration: float) -> np.ndarray:
    # duration floors the scale: dx_b/dv_a = T for free flow, and a pure
    # Frobenius scale would self-normalize a nearly singular 1x1 matrix
    scale = max(duration, float(np.linalg.norm(mat)) / np.sqrt(mat.shape[0]))
    det = float(np.linalg.det(mat))
    if abs(det) < CAUSTIC_DET_THRESHOLD * scale ** mat.shape[0]:
        raise ConjugatePoint(
            f"boundary Jacobi matrix singular (det={det:.3e}) over interval "
            f"of length {duration}")
    return np.linalg.inv(mat)


def variational_blocks(path: ClassicalPath):
    """Blocks (Pxx, Pxv, Pvx, Pvv) of the variational flow over the path."""
    d = path.model.dim
    _, wb = integrate_variational(
        path.model, path.positions[0], path.velocities[0],
        path.t_a, path.t_b, path.n_steps, np.eye(2 * d))
    return wb[:d, :d], wb[:d, d:], wb[d:, :d], wb[d:, d:]


def _gamma(model: LagrangianModel, x, v, t) -> np.ndarray:
    dg = np.asarray(model.metric_grad(x, t))
    return np.einsum("jik,k->ij", dg, v)


def action_hessian_jacobi(path: ClassicalPath) -> ActionHessian:
    """Endpoint Hessian blocks from one variational integration.

    Raises
    ------
    ConjugatePoint
        When dx_b/dv_a is singular, i.e. the endpoints are conjugate.
    """
    model = path.model
    pxx, pxv, _, pvv = variational_blocks(path)
    pxv_inv = _checked_inverse(pxv, path.duration)

    x_a, v_a, t_a = path.positions[0], path.velocities[0], path.t_a
    x_b, v_b, t_b = path.positions[-1], path.velocities[-1], path.t_b
    g_a = np.asarray(model.metric(x_a, t_a), dtype=float)
    g_b = np.asarray(model.metric(x_b, t_b), dtype=float)
    da_a = np.asarray(model.vector_potential_grad(x_a, t_a))
    da_b = np.asarray(model.vector_potential_grad(x_b, t_b))

    mixed = g_a @ pxv_inv
    aa = -_gamma(model, x_a, v_a, t_a) - da_a + g_a @ pxv_inv @ pxx
    bb = _gamma(model, x_b, v_b, t_b) + da_b + g_b @ pvv @ pxv_inv
    return ActionHessian(mixed=mixed, aa=aa, bb=bb, method=METHOD_JACOBI,
                         grid_info={"n_steps": path.n_steps})


def action_hessian_fd(model: LagrangianModel, x_a, x_b, t_a: float, t_b: float,
                      base_path: Optional[ClassicalPath] = None,
                      h: Optional[float] = None, n_steps: Optional[int] = None,
                      tol: float = 1e-12) -> ActionHessian:
    """Independent oracle: central second differences over re-solved BVPs.

    Every stencil solve is seeded with the base path's initial velocity, so
    all of them land on the same branch of the classical flow.
    """
    x_a = np.asarray(x_a, dtype=float)
    x_b = np.asarray(x_b, dtype=float)
    if base_path is None:
        base_path = solve_bvp(model, x_a, x_b, t_a, t_b,
                              n_steps=n_steps or 1000, tol=tol)
    if n_steps is None:
        n_steps = base_path.n_steps
    if h is None:
        h = 1e-4 * max(1.0, float(np.linalg.norm(x_b - x_a)))
    seed = base_path.velocities[0]
    d = model.dim
    cache: dict = {}

    def act(xa, xb):
        key = (xa.tobytes(), xb.tobytes())
        if key not in cache:
            cache[key] = solve_bvp(model, xa, xb, t_a, t_b, v0_guess=seed,
                                   n_steps=n_steps, tol=tol).action
        return cache[key]

    def unit(i):
        e = np.zeros(d)
        e[i] = h
        return e

    a0 = act(x_a, x_b)
    mixed = np.empty((d, d))
    for i in range(d):
        for j in range(d):
            mixed[i, j] = -(
                act(x_a + unit(i), x_b + unit(j)) - act(x_a + unit(i), x_b - unit(j))
                - act(x_a - unit(i), x_b + unit(j)) + act(x_a - unit(i), x_b - unit(j))
            ) / (4.0 * h * h)

    def diag_block(side):
        blk = np.empty((d, d))
        for i in range(d):
            ei = unit(i)
            if side == "a":
                blk[i, i] = (act(x_a + ei, x_b) - 2 * a0 + act(x_a - ei, x_b)) / h**2
            else:
                blk[i, i] = (act(x_a, x_b + ei) - 2 * a0 + act(x_a, x_b - ei)) / h**2
            for j in range(i):
                ej = unit(j)
                if side == "a":
                    val = (act(x_a + ei + ej, x_b) - act(x_a + ei - ej, x_b)
                           - act(x_a - ei + ej, x_b) + act(x_a - ei - ej, x_b))
                else:
                    val = (act(x_a, x_b + ei + ej) - act(x_a, x_b + ei - ej)
                           - act(x_a, x_b - ei + ej) + act(x_a, x_b - ei - ej))
                blk[i, j] = blk[j, i] = val / (4.0 * h * h)
        return blk

    return ActionHessian(mixed=mixed, aa=diag_block("a"), bb=diag_block("b"),
                         method=METHOD_FD, grid_info={"n_steps": n_steps, "h": h})


def frequency_matrix_along_path(path: ClassicalPath, t: float) -> np.ndarray:
    """Jacobi frequency matrix Omega^2(t) = g^-1 d2V/dx2 along the path.

    Only meaningful for vanishing vector potential; raises
    VectorPotentialPresent if |a| exceeds 1e-14 anywhere on the grid.
    """
    model = path.model
    worst = max(
        float(np.max(np.abs(model.vector_potential(path.positions[k], path.times[k]))))
        for k in range(0, len(path.times), max(1, len(path.times) // 64))
    )
    if worst > VECTOR_POTENTIAL_ZERO_TOL:
        raise VectorPotentialPresent(
            f"|a| reaches {worst:.3e} along the path; the scalar Jacobi "
            "frequency form only applies to zero vector potential")
    x, _ = state_at(path, t)
    return metric_solve(model, x, t, np.asarray(model.potential_hess(x, t), float))


def split_block_residual(full: ActionHessian, left: ActionHessian,
                         right: ActionHessian) -> float:
    """Relative residual of the matrix chain identity under path splitting,

        mixed_full = mixed_left (bb_left + aa_right)^-1 mixed_right.
    """
    junction = left.bb + right.aa
    recomposed = left.mixed @ np.linalg.solve(junction, right.mixed)
    return float(np.linalg.norm(recomposed - full.mixed)
                 / np.linalg.norm(full.mixed))
