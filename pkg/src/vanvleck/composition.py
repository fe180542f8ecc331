"""Splitting a propagation interval and recombining the pieces.

The factor for the whole interval equals the product of the factors of
the two halves times a Fresnel integral over the junction point:

    F(b,a) = F(b,mid) F(mid,a) (2 pi i hbar)^(D/2)
             * det[d^2(A_L + A_R)/dx_mid^2]^(-1/2),

where the junction Hessian is the bb block of the left half plus the aa
block of the right half, and the saddle point of the junction integral
is the point the through trajectory actually passes at t_mid.  The
routines here measure how well a model's numerics realize that, plus the
two scalar identities that come with it: matching of left/right momenta
at the junction and additivity of the classical actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import ClassicalPath, solve_bvp, state_at
from .errors import MidpointOffPath
from .fluctuation import fresnel_det_inv_sqrt, fresnel_prefactor, vvpm_factor
from .hessian import ActionHessian, action_hessian_jacobi
from .models import LagrangianModel

JUNCTION_VELOCITY_TOL = 1e-6


@dataclass(frozen=True)
class CompositionReport:
    """Residuals of one split, with the thresholds they were judged by."""

    t_mid: float
    x_mid: np.ndarray
    momentum_mismatch: float
    action_additivity_residual: float
    factor_residual: float
    jacobian_identity_residual: float
    thresholds: dict
    diagnostic: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (self.momentum_mismatch <= self.thresholds["momentum_mismatch"]
                and self.action_additivity_residual
                <= self.thresholds["action_additivity_residual"]
                and self.factor_residual <= self.thresholds["factor_residual"]
                and self.jacobian_identity_residual
                <= self.thresholds["jacobian_identity_residual"])


def _even_steps(fraction: float, n_steps: int) -> int:
    n = max(8, int(round(fraction * n_steps)))
    return n if n % 2 == 0 else n + 1


def verify_momentum_matching(full: ClassicalPath, left: ClassicalPath,
                             right: ClassicalPath, check_action: bool = True,
                             action_tol: float = 1e-6) -> float:
    """Max-norm momentum jump at the junction of two half paths.

    The halves must share their junction event.  With ``check_action``
    the sum of the half actions is also required to reproduce the full
    action to ``action_tol`` (relative); disable it when feeding
    deliberately off-saddle junctions.
    """
    if abs(left.t_b - right.t_a) > 1e-12 * (1.0 + abs(left.t_b)):
        raise ValueError("halves do not share a junction time")
    if np.max(np.abs(left.x_b - right.x_a)) > 1e-9 * (1.0 + np.max(np.abs(left.x_b))):
        raise ValueError("halves do not share a junction point")
    mismatch = float(np.max(np.abs(left.p_b - right.p_a)))
    if check_action:
        residual = abs(left.action + right.action - full.action)
        if residual > action_tol * (1.0 + abs(full.action)):
            raise ValueError(
                f"half actions sum to {left.action + right.action:.12g} but "
                f"the full action is {full.action:.12g}")
    return mismatch


def verify_jacobian_identity(hess_full: ActionHessian, hess_left: ActionHessian,
                             hess_right: ActionHessian) -> float:
    """det(mixed) det(bb_L + aa_R) = det(mixed_L) det(mixed_R), relatively."""
    lhs = (np.linalg.det(hess_full.mixed)
           * np.linalg.det(hess_left.bb + hess_right.aa))
    rhs = np.linalg.det(hess_left.mixed) * np.linalg.det(hess_right.mixed)
    scale = max(abs(lhs), abs(rhs))
    if scale == 0.0:
        return 0.0
    return abs(lhs - rhs) / scale


def verify_composition(model: LagrangianModel, x_a, x_b, t_a: float,
                       t_b: float, t_mid: float, tol: float = 1e-6,
                       n_steps: int = 1000, momentum_tol: float = 1e-8,
                       midpoint_offset=None) -> CompositionReport:
    """Split at t_mid, recombine, and report all four residuals.

    The junction position is read off the through trajectory; passing
    ``midpoint_offset`` displaces it deliberately (negative control),
    which suppresses the on-path consistency check that otherwise raises
    MidpointOffPath.
    """
    if not (t_a < t_mid < t_b):
        raise ValueError("t_mid must lie strictly inside (t_a, t_b)")
    duration = t_b - t_a
    full = solve_bvp(model, x_a, x_b, t_a, t_b, n_steps=n_steps)
    x_on_path, v_on_path = state_at(full, t_mid)
    x_mid = np.array(x_on_path)
    if midpoint_offset is not None:
        x_mid = x_mid + np.asarray(midpoint_offset, dtype=float)

    left = solve_bvp(model, x_a, x_mid, t_a, t_mid,
                     v0_guess=full.v_a,
                     n_steps=_even_steps((t_mid - t_a) / duration, n_steps))
    right = solve_bvp(model, x_mid, x_b, t_mid, t_b,
                      v0_guess=v_on_path,
                      n_steps=_even_steps((t_b - t_mid) / duration, n_steps))
    if midpoint_offset is None:
        vscale = 1.0 + float(np.max(np.abs(v_on_path)))
        jump = max(float(np.max(np.abs(left.v_b - v_on_path))),
                   float(np.max(np.abs(right.v_a - v_on_path))))
        if jump > JUNCTION_VELOCITY_TOL * vscale:
            raise MidpointOffPath(
                f"re-solved halves leave the through trajectory by {jump:.3e} "
                f"in velocity at t_mid={t_mid}")

    momentum_mismatch = verify_momentum_matching(full, left, right,
                                                 check_action=False)
    action_residual = abs(left.action + right.action - full.action)

    h_full = action_hessian_jacobi(full)
    h_left = action_hessian_jacobi(left)
    h_right = action_hessian_jacobi(right)
    junction = h_left.bb + h_right.aa
    f_full = vvpm_factor(h_full, hbar=model.hbar)
    f_left = vvpm_factor(h_left, hbar=model.hbar)
    f_right = vvpm_factor(h_right, hbar=model.hbar)
    rhs = (f_left.value * f_right.value
           / fresnel_prefactor(model.dim, model.hbar)
           * fresnel_det_inv_sqrt(junction))
    factor_residual = abs(rhs - f_full.value) / abs(f_full.value)
    jacobian_residual = verify_jacobian_identity(h_full, h_left, h_right)

    thresholds = {"momentum_mismatch": momentum_tol,
                  "action_additivity_residual": tol * (1.0 + abs(full.action)),
                  "factor_residual": tol,
                  "jacobian_identity_residual": tol}
    diagnostic = {
        "factor_full": f_full.as_dict(),
        "factor_left": f_left.as_dict(),
        "factor_right": f_right.as_dict(),
        "junction_determinant": float(np.linalg.det(junction)),
        "action_full": full.action,
        "action_left": left.action,
        "action_right": right.action,
        "bvp_residuals": [full.bvp_residual, left.bvp_residual,
                          right.bvp_residual],
        "midpoint_offset_applied": midpoint_offset is not None,
    }
    return CompositionReport(
        t_mid=float(t_mid), x_mid=x_mid,
        momentum_mismatch=momentum_mismatch,
        action_additivity_residual=float(action_residual),
        factor_residual=float(factor_residual),
        jacobian_identity_residual=float(jacobian_residual),
        thresholds=thresholds, diagnostic=diagnostic)


def _mode_mixed(tau: float, mass: float, omega: float) -> float:
    if omega == 0.0:
        return mass / tau
    return mass * omega / np.sin(omega * tau)


def _mode_diag(tau: float, mass: float, omega: float) -> float:
    if omega == 0.0:
        return mass / tau
    return mass * omega * np.cos(omega * tau) / np.sin(omega * tau)


def _mode_factor(tau: float, masses, omegas, hbar: float) -> complex:
    value = fresnel_prefactor(len(omegas), hbar)
    for mass, omega in zip(masses, omegas):
        z = _mode_mixed(tau, mass, omega)
        value *= 1j * np.sqrt(-z) if z < 0.0 else np.sqrt(z)
    return value


def acausal_identity_residual(mass, omegas, t_a: float, t_b: float,
                              t_mid: float, hbar: float = 1.0) -> float:
    """Closed-form splitting residual allowing the junction time outside
    the interval.

    For decoupled quadratic modes (frequency 0 means free) the interval
    may be split at t_mid > t_b: the right leg then runs backward in
    time.  With principal roots applied per mode, each backward leg
    carries an extra factor i per mode and the recombination identity
    still closes; the returned residual is the relative defect.
    """
    omegas = [float(w) for w in np.atleast_1d(omegas)]
    masses = np.atleast_1d(np.asarray(mass, dtype=float))
    if masses.size == 1:
        masses = np.full(len(omegas), float(masses[0]))
    if len(masses) != len(omegas):
        raise ValueError("need one mass per mode")
    tau_left = t_mid - t_a
    tau_right = t_b - t_mid
    if tau_left == 0.0 or tau_right == 0.0 or t_b == t_a:
        raise ValueError("degenerate split")

    f_full = _mode_factor(t_b - t_a, masses, omegas, hbar)
    f_left = _mode_factor(tau_left, masses, omegas, hbar)
    f_right = _mode_factor(tau_right, masses, omegas, hbar)
    junction = np.diag([_mode_diag(tau_left, m, w) + _mode_diag(tau_right, m, w)
                        for m, w in zip(masses, omegas)])
    rhs = (f_left * f_right / fresnel_prefactor(len(omegas), hbar)
           * fresnel_det_inv_sqrt(junction))
    return abs(rhs - f_full) / abs(f_full)
