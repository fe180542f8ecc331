"""Lagrangian models quadratic in velocity.

Every system handled by the toolkit has the form

    L(x, v, t) = 1/2 v.g(x, t).v + v.a(x, t) - V(x, t)

with a symmetric invertible kinetic metric g, a vector potential a and a
scalar potential V.  The conjugate momentum is p = g v + a and the
Hamiltonian obtained by Legendre transform is

    H(x, p, t) = 1/2 (p - a).g^-1.(p - a) + V(x, t).

A model is a bundle of evaluation callbacks plus first derivatives; the
integrators never differentiate symbolically, they only call these hooks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import SingularMetric

# Central-difference steps.  First derivatives use the cube root of machine
# epsilon, second derivatives the fourth root (noise floor vs truncation).
FD_STEP = float(np.cbrt(np.finfo(float).eps))
FD_STEP_SECOND = float(np.finfo(float).eps ** 0.25)


@dataclass(frozen=True)
class LagrangianModel:
    """Callback bundle describing one quadratic-in-velocity system.

    Parameters
    ----------
    dim : int
        Configuration space dimension D.
    metric : callable
        ``metric(x, t) -> (D, D)`` symmetric invertible kinetic metric.
    metric_grad : callable
        ``metric_grad(x, t) -> (D, D, D)`` with ``[k, i, j] = d g_ij / d x_k``.
    vector_potential : callable
        ``vector_potential(x, t) -> (D,)``.
    vector_potential_grad : callable
        ``vector_potential_grad(x, t) -> (D, D)`` with ``[i, j] = d a_i / d x_j``.
    potential : callable
        ``potential(x, t) -> float``.
    potential_grad : callable
        ``potential_grad(x, t) -> (D,)``.
    potential_hess : callable
        ``potential_hess(x, t) -> (D, D)`` symmetric.
    hbar : float
        Positive scale entering every fluctuation prefactor.
    metric_dt, vector_potential_dt : callable, optional
        Explicit time derivatives of g and a.  ``None`` means zero; no
        builtin needs them.
    kinetic_gradients_constant : bool
        True when metric_grad and vector_potential_grad do not depend on x.
        The variational linearization is then exact; otherwise the missing
        second derivatives of g and a are filled in by central differences.
    label : str
        Identifier used in serialized reports.
    """

    dim: int
    metric: Callable
    metric_grad: Callable
    vector_potential: Callable
    vector_potential_grad: Callable
    potential: Callable
    potential_grad: Callable
    potential_hess: Callable
    hbar: float = 1.0
    metric_dt: Optional[Callable] = None
    vector_potential_dt: Optional[Callable] = None
    kinetic_gradients_constant: bool = False
    label: str = "custom"


def _check_point(model: LagrangianModel, x, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(
            f"{name} has shape {x.shape}, expected ({model.dim},) for model "
            f"{model.label!r}"
        )
    return x


def metric_solve(model: LagrangianModel, x, t, rhs) -> np.ndarray:
    """Solve g(x, t) y = rhs, raising SingularMetric when g is degenerate."""
    g = np.asarray(model.metric(x, t), dtype=float)
    try:
        return np.linalg.solve(g, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(f"metric singular at x={x}, t={t}") from exc


def evaluate_lagrangian(model: LagrangianModel, x, v, t) -> float:
    """L = 1/2 v.g.v + v.a - V at one phase point."""
    x = _check_point(model, x)
    v = _check_point(model, v, "v")
    g = model.metric(x, t)
    a = model.vector_potential(x, t)
    return float(0.5 * v @ g @ v + v @ a - model.potential(x, t))


def legendre_momentum(model: LagrangianModel, x, v, t) -> np.ndarray:
    """Conjugate momentum p = g(x, t) v + a(x, t)."""
    x = _check_point(model, x)
    v = _check_point(model, v, "v")
    return np.asarray(model.metric(x, t) @ v + model.vector_potential(x, t), float)


def evaluate_hamiltonian(model: LagrangianModel, x, p, t) -> float:
    """H = 1/2 (p - a).g^-1.(p - a) + V at one phase point.

    Satisfies the duality H(x, p(x, v, t), t) + L(x, v, t) = v.p exactly.
    """
    x = _check_point(model, x)
    p = _check_point(model, p, "p")
    w = p - model.vector_potential(x, t)
    return float(0.5 * w @ metric_solve(model, x, t, w) + model.potential(x, t))


def velocity_from_momentum(model: LagrangianModel, x, p, t) -> np.ndarray:
    """Invert the Legendre map: v = g^-1 (p - a)."""
    x = _check_point(model, x)
    p = _check_point(model, p, "p")
    return metric_solve(model, x, t, p - model.vector_potential(x, t))


# ---------------------------------------------------------------------------
# finite-difference adapters for value-only callables


def fd_gradient(f: Callable) -> Callable:
    """Central-difference gradient of a scalar field f(x, t)."""

    def grad(x, t):
        x = np.asarray(x, dtype=float)
        h = FD_STEP * max(1.0, float(np.max(np.abs(x))))
        out = np.empty_like(x)
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = h
            out[i] = (f(x + e, t) - f(x - e, t)) / (2.0 * h)
        return out

    return grad


def fd_hessian(f: Callable) -> Callable:
    """Central second differences of a scalar field f(x, t), symmetrized."""

    def hess(x, t):
        x = np.asarray(x, dtype=float)
        n = x.size
        h = FD_STEP_SECOND * max(1.0, float(np.max(np.abs(x))))
        out = np.empty((n, n))
        f0 = f(x, t)
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = h
            out[i, i] = (f(x + ei, t) - 2.0 * f0 + f(x - ei, t)) / h**2
            for j in range(i):
                ej = np.zeros(n)
                ej[j] = h
                out[i, j] = out[j, i] = (
                    f(x + ei + ej, t) - f(x + ei - ej, t)
                    - f(x - ei + ej, t) + f(x - ei - ej, t)
                ) / (4.0 * h**2)
        return out

    return hess


def fd_jacobian(vf: Callable, shape) -> Callable:
    """Central-difference x-Jacobian of an array field vf(x, t)."""

    def jac(x, t):
        x = np.asarray(x, dtype=float)
        h = FD_STEP * max(1.0, float(np.max(np.abs(x))))
        cols = []
        for j in range(x.size):
            e = np.zeros_like(x)
            e[j] = h
            cols.append((np.asarray(vf(x + e, t)) - np.asarray(vf(x - e, t))) / (2 * h))
        return np.stack(cols, axis=-1).reshape(shape)

    return jac


# ---------------------------------------------------------------------------
# builtins


def _mass_matrix(mass, dim: Optional[int]) -> np.ndarray:
    m = np.asarray(mass, dtype=float)
    if m.ndim == 0:
        if dim is None:
            dim = 1
        m = float(m) * np.eye(dim)
    elif m.ndim == 2:
        if dim is not None and m.shape != (dim, dim):
            raise ValueError(f"mass matrix shape {m.shape} does not match dim={dim}")
    else:
        raise ValueError("mass must be a scalar or a square matrix")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
        raise ValueError("mass matrix must be symmetric")
    return m


def _constant_kinetic(model_dim: int, mass: np.ndarray):
    zero3 = np.zeros((model_dim, model_dim, model_dim))
    return (
        lambda x, t: mass,
        lambda x, t: zero3,
    )


def free_particle(mass=1.0, dim: Optional[int] = None, hbar: float = 1.0) -> LagrangianModel:
    """Free motion with constant mass matrix M: L = 1/2 v.M.v."""
    m = _mass_matrix(mass, dim)
    d = m.shape[0]
    g, dg = _constant_kinetic(d, m)
    zero_vec = np.zeros(d)
    zero_mat = np.zeros((d, d))
    return LagrangianModel(
        dim=d,
        metric=g,
        metric_grad=dg,
        vector_potential=lambda x, t: zero_vec,
        vector_potential_grad=lambda x, t: zero_mat,
        potential=lambda x, t: 0.0,
        potential_grad=lambda x, t: zero_vec,
        potential_hess=lambda x, t: zero_mat,
        hbar=hbar,
        kinetic_gradients_constant=True,
        label=f"free_particle(D={d})",
    )


def harmonic_oscillator(
    mass=1.0,
    omega2=None,
    stiffness=None,
    dim: Optional[int] = None,
    hbar: float = 1.0,
) -> LagrangianModel:
    """Oscillator with V(x, t) = 1/2 x.K(t).x and constant mass matrix.

    Exactly one of ``omega2`` and ``stiffness`` must be given.

    Parameters
    ----------
    omega2 : float or callable, optional
        Scalar squared frequency, possibly time dependent; K(t) = omega2(t) M.
    stiffness : array or callable, optional
        Full symmetric stiffness matrix K(t) (the product of mass and squared
        frequency for anisotropic systems).
    """
    m = _mass_matrix(mass, dim)
    d = m.shape[0]
    if (omega2 is None) == (stiffness is None):
        raise ValueError("give exactly one of omega2 and stiffness")
    if omega2 is not None:
        if callable(omega2):
            k_of_t = lambda t: float(omega2(t)) * m
        else:
            k_const = float(omega2) * m
            k_of_t = lambda t: k_const
    else:
        if callable(stiffness):
            k_of_t = lambda t: np.asarray(stiffness(t), dtype=float)
        else:
            k_arr = np.asarray(stiffness, dtype=float)
            if k_arr.shape != (d, d) or not np.allclose(k_arr, k_arr.T, atol=1e-12):
                raise ValueError("stiffness must be a symmetric (D, D) matrix")
            k_of_t = lambda t: k_arr
    g, dg = _constant_kinetic(d, m)
    zero_vec = np.zeros(d)
    zero_mat = np.zeros((d, d))
    return LagrangianModel(
        dim=d,
        metric=g,
        metric_grad=dg,
        vector_potential=lambda x, t: zero_vec,
        vector_potential_grad=lambda x, t: zero_mat,
        potential=lambda x, t: float(0.5 * x @ k_of_t(t) @ x),
        potential_grad=lambda x, t: k_of_t(t) @ x,
        potential_hess=lambda x, t: k_of_t(t),
        hbar=hbar,
        kinetic_gradients_constant=True,
        label=f"harmonic_oscillator(D={d})",
    )


def magnetic_field(mass: float = 1.0, omega: float = 1.0, dim: int = 2,
                   hbar: float = 1.0) -> LagrangianModel:
    """Charge in a uniform magnetic field, gauge a = (0, -M w x_1, 0, ...).

    ``omega`` is the cyclotron frequency e B / (c M); the coupling strength
    in the gauge term is M omega.  Motion in the remaining D - 2 directions
    is free.
    """
    if dim < 2:
        raise ValueError("magnetic_field needs dim >= 2")
    m = float(mass) * np.eye(dim)
    g, dg = _constant_kinetic(dim, m)
    coupling = float(mass) * float(omega)
    da = np.zeros((dim, dim))
    da[1, 0] = -coupling
    zero_vec = np.zeros(dim)
    zero_mat = np.zeros((dim, dim))

    def a(x, t):
        out = np.zeros(dim)
        out[1] = -coupling * x[0]
        return out

    return LagrangianModel(
        dim=dim,
        metric=g,
        metric_grad=dg,
        vector_potential=a,
        vector_potential_grad=lambda x, t: da,
        potential=lambda x, t: 0.0,
        potential_grad=lambda x, t: zero_vec,
        potential_hess=lambda x, t: zero_mat,
        hbar=hbar,
        kinetic_gradients_constant=True,
        label=f"magnetic_field(D={dim})",
    )


def one_dim_potential(
    potential: Callable,
    potential_grad: Optional[Callable] = None,
    potential_hess: Optional[Callable] = None,
    mass: float = 1.0,
    hbar: float = 1.0,
    label: str = "one_dim_potential",
) -> LagrangianModel:
    """One dimensional particle in an arbitrary potential V(x, t).

    The callables take a scalar position.  Missing derivatives fall back to
    central differences.
    """
    m = float(mass) * np.eye(1)
    g, dg = _constant_kinetic(1, m)
    zero_vec = np.zeros(1)
    zero_mat = np.zeros((1, 1))

    v_arr = lambda x, t: float(potential(float(x[0]), t))
    if potential_grad is not None:
        grad = lambda x, t: np.array([potential_grad(float(x[0]), t)], dtype=float)
    else:
        grad = fd_gradient(v_arr)
    if potential_hess is not None:
        hess = lambda x, t: np.array([[potential_hess(float(x[0]), t)]], dtype=float)
    else:
        hess = fd_hessian(v_arr)

    return LagrangianModel(
        dim=1,
        metric=g,
        metric_grad=dg,
        vector_potential=lambda x, t: zero_vec,
        vector_potential_grad=lambda x, t: zero_mat,
        potential=v_arr,
        potential_grad=grad,
        potential_hess=hess,
        hbar=hbar,
        kinetic_gradients_constant=True,
        label=label,
    )


BUILTIN_TAGS = {
    "free_particle": {
        "factory": free_particle,
        "params": {"mass": "scalar or (D, D) matrix", "dim": "int"},
    },
    "harmonic_oscillator": {
        "factory": harmonic_oscillator,
        "params": {
            "mass": "scalar or (D, D) matrix",
            "omega2": "scalar squared frequency, or expression in t",
            "stiffness": "(D, D) symmetric matrix, alternative to omega2",
            "dim": "int",
        },
    },
    "magnetic_field": {
        "factory": magnetic_field,
        "params": {"mass": "scalar", "omega": "cyclotron frequency", "dim": "int >= 2"},
    },
    "one_dim_potential": {
        "factory": one_dim_potential,
        "params": {"potential": "expression in x and t", "mass": "scalar"},
    },
}


def builtin_model(tag: str, **params) -> LagrangianModel:
    """Construct a builtin model by tag name."""
    try:
        entry = BUILTIN_TAGS[tag]
    except KeyError:
        raise ValueError(f"unknown builtin tag {tag!r}") from None
    return entry["factory"](**params)


# ---------------------------------------------------------------------------
# consistency probes used by the test suite


def probe_derivative_consistency(model: LagrangianModel, rng=None, n_points: int = 100,
                                 box: float = 1.0, t_box: float = 1.0) -> dict:
    """Max deviation of supplied derivatives from central differences.

    Returns a dict with keys ``metric_symmetry``, ``metric_grad``,
    ``potential_grad``, ``potential_hess`` and ``vector_potential_grad``.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    d = model.dim
    worst = {k: 0.0 for k in (
        "metric_symmetry", "metric_grad", "potential_grad",
        "potential_hess", "vector_potential_grad")}
    num_dg = fd_jacobian(lambda x, t: np.asarray(model.metric(x, t)), (d, d, d))
    num_dv = fd_gradient(model.potential)
    num_da = fd_jacobian(lambda x, t: np.asarray(model.vector_potential(x, t)), (d, d))
    num_hv = fd_jacobian(lambda x, t: np.asarray(model.potential_grad(x, t)), (d, d))
    for _ in range(n_points):
        x = rng.uniform(-box, box, size=d)
        t = rng.uniform(-t_box, t_box)
        g = np.asarray(model.metric(x, t))
        worst["metric_symmetry"] = max(worst["metric_symmetry"],
                                       float(np.max(np.abs(g - g.T))))
        # fd_jacobian differentiates along the last axis; reorder to [k, i, j]
        dg_num = np.moveaxis(num_dg(x, t).reshape(d, d, d), -1, 0)
        worst["metric_grad"] = max(worst["metric_grad"], float(np.max(np.abs(
            np.asarray(model.metric_grad(x, t)) - dg_num))))
        worst["potential_grad"] = max(worst["potential_grad"], float(np.max(np.abs(
            np.asarray(model.potential_grad(x, t)) - num_dv(x, t)))))
        hv = np.asarray(model.potential_hess(x, t))
        worst["potential_hess"] = max(worst["potential_hess"], float(np.max(np.abs(
            hv - num_hv(x, t)))), float(np.max(np.abs(hv - hv.T))))
        worst["vector_potential_grad"] = max(
            worst["vector_potential_grad"],
            float(np.max(np.abs(np.asarray(model.vector_potential_grad(x, t))
                                - num_da(x, t)))))
    return worst
