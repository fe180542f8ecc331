"""Fluctuation prefactors of the semiclassical time evolution amplitude.

All routes compute the same object

    F = (2 pi i hbar)^(-D/2) sqrt(det mixed),
    mixed = -d2A/dx_a dx_b,

they only differ in how the determinant is obtained.  Branch convention
throughout: principal complex roots, i^(-1/2) = exp(-i pi / 4), so the
free particle carries the phase -D pi / 4 and every factor here has that
phase exactly as long as the determinant is real and positive.  A
determinant that is not positive raises instead of silently picking a
branch (index counting past caustics is out of scope).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import ClassicalPath, solve_bvp
from .errors import CausticRegion, NotQuadraticModel, SingularMetric
from .hessian import ActionHessian, action_hessian_jacobi, variational_blocks
from .models import LagrangianModel

METHOD_VVPM = "VVPM"
METHOD_SHORT_TIME = "ShortTime"
METHOD_ENERGY_HESSIAN = "EnergyHessian"
METHOD_GENERAL = "GeneralVelocityGradient"
METHOD_GELFAND_YAGLOM = "GelfandYaglom"
METHOD_ANALYTIC = "Analytic"

BRANCH_NOTE_PRINCIPAL = "principal roots, free-particle phase anchor -D*pi/4"

QUADRATIC_PROBE_TOL = 1e-10


@dataclass(frozen=True)
class FluctuationFactor:
    """One computed prefactor, tagged with the method that produced it.

    Attributes
    ----------
    value : complex
        The prefactor, dimension length^-D for unit mass conventions.
    method : str
        Which route produced it (VVPM, ShortTime, ...).
    branch_note : str
        Human-readable record of the root convention used.
    """

    value: complex
    dim: int
    hbar: float
    method: str
    branch_note: str = BRANCH_NOTE_PRINCIPAL

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def phase(self) -> float:
        return float(np.angle(self.value))

    def as_dict(self) -> dict:
        return {
            "re": float(self.value.real),
            "im": float(self.value.imag),
            "magnitude": self.magnitude,
            "phase": self.phase,
            "method": self.method,
            "branch_note": self.branch_note,
        }


def fresnel_prefactor(dim: int, hbar: float) -> complex:
    """(2 pi i hbar)^(-D/2) with the principal branch of i^(-1/2)."""
    return (2.0 * np.pi * hbar) ** (-0.5 * dim) * np.exp(-0.25j * np.pi * dim)


def fresnel_det_inv_sqrt(mat: np.ndarray) -> complex:
    """det(mat)^(-1/2) as a product of per-eigenvalue principal roots.

    For a symmetric real matrix each negative eigenvalue contributes a
    factor -i / sqrt(|lambda|), the convention under which the splitting
    identity keeps holding for backward (acausal) segments.
    """
    mat = np.asarray(mat, dtype=float)
    sym = 0.5 * (mat + mat.T)
    if not np.allclose(mat, sym, atol=1e-9 * (1.0 + np.linalg.norm(mat))):
        raise ValueError("junction Hessian block must be symmetric")
    evals = np.linalg.eigvalsh(sym)
    scale = float(np.max(np.abs(evals))) if evals.size else 0.0
    if scale == 0.0 or np.any(np.abs(evals) < 1e-12 * scale):
        raise CausticRegion("junction Hessian block is singular")
    return complex(np.prod(1.0 / np.sqrt(evals.astype(complex))))


def _positive_det(mat: np.ndarray, what: str) -> float:
    det = float(np.linalg.det(np.asarray(mat, dtype=float)))
    if det <= 0.0:
        raise CausticRegion(f"{what} determinant is {det:.3e}, not positive; "
                            "a caustic was crossed")
    return det


def vvpm_factor(hess: ActionHessian, hbar: float = 1.0,
                dim: Optional[int] = None) -> FluctuationFactor:
    """F = (2 pi i hbar)^(-D/2) sqrt(det(-d2A/dx_a dx_b)).

    Raises CausticRegion when the determinant is not positive.
    """
    d = hess.dim
    if dim is not None and dim != d:
        raise ValueError(f"dim={dim} does not match Hessian dimension {d}")
    det = _positive_det(hess.mixed, "Van Vleck")
    return FluctuationFactor(
        value=fresnel_prefactor(d, hbar) * np.sqrt(det),
        dim=d, hbar=hbar, method=METHOD_VVPM)


def short_time_factor(model: LagrangianModel, x_a, t_a: float, dt: float
                      ) -> FluctuationFactor:
    """Leading short-interval prefactor (2 pi i hbar)^(-D/2) sqrt(det(g/dt))."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    g = np.asarray(model.metric(np.asarray(x_a, float), t_a), dtype=float)
    det = _positive_det(g / dt, "short-time metric")
    return FluctuationFactor(
        value=fresnel_prefactor(model.dim, model.hbar) * np.sqrt(det),
        dim=model.dim, hbar=model.hbar, method=METHOD_SHORT_TIME)


def certify_quadratic(model: LagrangianModel, box: float = 1.0,
                      n_probe: int = 8, tol: float = QUADRATIC_PROBE_TOL,
                      rng=None) -> None:
    """Probe that g is constant, a at most linear, V at most quadratic.

    Third differences of V and second differences of a along random
    directions at random points must vanish to ``tol`` (relative to the
    local scale); otherwise NotQuadraticModel is raised.
    """
    if rng is None:
        rng = np.random.default_rng(20240817)
    d = model.dim
    g0 = np.asarray(model.metric(np.zeros(d), 0.0), dtype=float)
    step = 0.3 * max(1.0, box)
    for _ in range(n_probe):
        x = rng.uniform(-box, box, size=d)
        t = rng.uniform(-1.0, 1.0)
        u = rng.normal(size=d)
        u *= step / np.linalg.norm(u)
        g = np.asarray(model.metric(x, t), dtype=float)
        if np.max(np.abs(g - g0)) > tol * (1.0 + np.max(np.abs(g0))):
            raise NotQuadraticModel("metric depends on position")
        third = (model.potential(x + 2 * u, t) - 3 * model.potential(x + u, t)
                 + 3 * model.potential(x, t) - model.potential(x - u, t))
        if abs(third) > tol * (1.0 + abs(model.potential(x, t))):
            raise NotQuadraticModel(
                f"potential has a third difference {third:.3e} at x={x}")
        second = (np.asarray(model.vector_potential(x + u, t))
                  - 2.0 * np.asarray(model.vector_potential(x, t))
                  + np.asarray(model.vector_potential(x - u, t)))
        if np.max(np.abs(second)) > tol * (1.0 + np.max(np.abs(
                np.asarray(model.vector_potential(x, t))))):
            raise NotQuadraticModel("vector potential is not linear in position")


def energy_hessian_factor(model: LagrangianModel, path: ClassicalPath,
                          h: Optional[float] = None,
                          tol: float = 1e-13) -> FluctuationFactor:
    """Prefactor from the endpoint energy Hessian, quadratic models only,

        F = (2 pi i hbar)^(-D/2) det(g)^(1/4) det(d2E/dx_b dx_b)^(1/4).

    E(x_a, x_b) is the conserved energy of the classical path as a function
    of the endpoints, differentiated by a central stencil of re-solved
    boundary problems.  For certified-quadratic models E is exactly
    quadratic in the endpoints, so the stencil step defaults to a large
    0.05 * max(1, |x_b - x_a|): no truncation error, and the Newton
    termination noise is suppressed far below tolerance.  The quartic
    roots are fixed by continuity with the short-interval free limit.
    """
    box = 1.0 + float(np.max(np.abs(np.concatenate((path.x_a, path.x_b)))))
    certify_quadratic(model, box=box)
    d = model.dim
    if h is None:
        h = 0.05 * max(1.0, float(np.linalg.norm(path.x_b - path.x_a)))

    seed = path.velocities[0]

    def energy(xb):
        return solve_bvp(model, path.x_a, xb, path.t_a, path.t_b,
                         v0_guess=seed, n_steps=path.n_steps, tol=tol).energy_a

    e0 = path.energy_a
    ehess = np.empty((d, d))
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h
        ehess[i, i] = (energy(path.x_b + ei) - 2 * e0 + energy(path.x_b - ei)) / h**2
        for j in range(i):
            ej = np.zeros(d)
            ej[j] = h
            ehess[i, j] = ehess[j, i] = (
                energy(path.x_b + ei + ej) - energy(path.x_b + ei - ej)
                - energy(path.x_b - ei + ej) + energy(path.x_b - ei - ej)
            ) / (4.0 * h * h)

    g = np.asarray(model.metric(path.x_a, path.t_a), dtype=float)
    det_g = float(np.linalg.det(g))
    if det_g <= 0.0:
        raise SingularMetric("metric determinant must be positive")
    det_e = _positive_det(ehess, "endpoint energy Hessian")
    value = (fresnel_prefactor(d, model.hbar)
             * det_g ** 0.25 * det_e ** 0.25)
    return FluctuationFactor(
        value=value, dim=d, hbar=model.hbar, method=METHOD_ENERGY_HESSIAN,
        branch_note="principal quartic roots of positive determinants, "
                    "short-interval continuity anchor")


def general_factor(path: ClassicalPath) -> FluctuationFactor:
    """Velocity-gradient form F^2 = det(g_a) det(dv_a/dx_b) / (2 pi i hbar)^D.

    dv_a/dx_b is the inverse of the dx_b/dv_a variational block, so this
    equals the VVPM value identically up to roundoff; kept as a separate
    route for cross-checks.
    """
    model = path.model
    d = model.dim
    _, pxv, _, _ = variational_blocks(path)
    g_a = np.asarray(model.metric(path.x_a, path.t_a), dtype=float)
    det_pxv = float(np.linalg.det(pxv))
    if det_pxv == 0.0:
        raise CausticRegion("dx_b/dv_a is singular")
    squared = float(np.linalg.det(g_a)) / det_pxv
    if squared <= 0.0:
        raise CausticRegion("initial velocity gradient determinant not positive")
    value = fresnel_prefactor(d, model.hbar) * np.sqrt(squared)
    return FluctuationFactor(value=value, dim=d, hbar=model.hbar,
                             method=METHOD_GENERAL)
