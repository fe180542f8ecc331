"""Boundary Jacobi determinants without solving the boundary value problem.

The quadratic fluctuation operator of a path is characterized by the
matrix boundary problem

    Bddot(t) + Omega2(t) B(t) = 0,   B(t_a) = 0,   B(t_b) = 1,

whose initial slope Bdot(t_a) carries the whole determinant:

    F = sqrt(det M) / (2 pi i hbar T)^(D/2) * sqrt(det(T Bdot(t_a))),
    T = t_b - t_a.

The normalization det(T Bdot(t_a)) -> 1 for Omega2 = 0 anchors the free
particle exactly.  By linearity the boundary solution is obtained from the
seeded initial problem B_raw(t_a) = 0, Bdot_raw(t_a) = 1 through
Bdot(t_a) = B_raw(t_b)^-1, which is what all three solvers compute:

* DirectODE: fixed-step RK4 on the matrix system.
* NeumannSeries(k): truncated iterated-integral series evaluated by
  Gauss-Legendre collocation (spectral antiderivative matrix).
* TimeOrderedSinh(n): ordered product over n slices of exponentials of the
  block generator [[0, 1], [-Omega2, 0]]; the upper-right block of the
  product is B_raw(t_b).  Exact for constant Omega2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.linalg import expm

from .errors import FocalPoint, NonSPDMass, SeriesDivergence
from .fluctuation import FluctuationFactor, METHOD_GELFAND_YAGLOM, fresnel_prefactor

FOCAL_DET_THRESHOLD = 1e-12


@dataclass(frozen=True)
class JacobiBoundarySolution:
    """Initial slope and grid samples of the boundary Jacobi matrix.

    Attributes
    ----------
    B_dot_a : (D, D) array
        Initial slope of the normalized solution; its determinant is the
        quantity the fluctuation factor needs.
    times, B_grid : (m,) and (m, D, D) arrays
        Samples of the normalized B(t); B_grid[0] = 0 and B_grid[-1] = 1.
    omega2 : callable t -> (D, D)
        The frequency matrix the solution was built from.
    """

    B_dot_a: np.ndarray
    times: np.ndarray
    B_grid: np.ndarray
    omega2: Callable[[float], np.ndarray]
    t_a: float
    t_b: float
    method: str

    @property
    def dim(self) -> int:
        return self.B_dot_a.shape[0]


def _omega2_callable(omega2, t_probe: float):
    """Normalize scalar / matrix / callable frequency input to t -> (D, D)."""
    if callable(omega2):
        probe = np.atleast_2d(np.asarray(omega2(t_probe), dtype=float))
        d = probe.shape[0]
        return (lambda t: np.atleast_2d(np.asarray(omega2(t), dtype=float))), d
    const = np.atleast_2d(np.asarray(omega2, dtype=float))
    return (lambda t: const), const.shape[0]


def _invert_boundary(b_tb: np.ndarray, what: str, duration: float) -> np.ndarray:
    d = b_tb.shape[0]
    det = float(np.linalg.det(b_tb))
    # B_raw(t_b) = T for the free case; flooring the scale by T keeps the
    # test meaningful when the matrix itself collapses at a focal time
    scale = max(duration, float(np.linalg.norm(b_tb)) / np.sqrt(d))
    if abs(det) < FOCAL_DET_THRESHOLD * scale**d:
        raise FocalPoint(f"{what}: B_raw(t_b) singular (det={det:.3e})")
    return np.linalg.inv(b_tb)


def solve_B_direct(omega2, t_a: float, t_b: float, n_steps: int = 1000,
                   seed: Optional[np.ndarray] = None) -> JacobiBoundarySolution:
    """RK4 integration of the seeded initial problem, then rescaling.

    Parameters
    ----------
    omega2 : scalar, matrix or callable t -> (D, D)
        Frequency-squared matrix of the Jacobi equation.
    seed : (D, D) array, optional
        Initial slope of the raw solution.  The normalized output is
        independent of it (linearity); exposed for exactly that test.
    """
    if n_steps < 8:
        raise ValueError("n_steps must be at least 8")
    w2, d = _omega2_callable(omega2, t_a)
    b = np.zeros((d, d))
    bd = np.eye(d) if seed is None else np.asarray(seed, dtype=float).copy()
    times = np.linspace(t_a, t_b, n_steps + 1)
    h = (t_b - t_a) / n_steps
    values = np.empty((n_steps + 1, d, d))
    values[0] = b

    for k in range(n_steps):
        t = times[k]
        w_0 = w2(t)
        w_h = w2(t + 0.5 * h)
        w_1 = w2(t + h)
        k1b, k1d = bd, -w_0 @ b
        k2b, k2d = bd + 0.5 * h * k1d, -w_h @ (b + 0.5 * h * k1b)
        k3b, k3d = bd + 0.5 * h * k2d, -w_h @ (b + 0.5 * h * k2b)
        k4b, k4d = bd + h * k3d, -w_1 @ (b + h * k3b)
        b = b + (h / 6.0) * (k1b + 2 * k2b + 2 * k3b + k4b)
        bd = bd + (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
        values[k + 1] = b

    bdot_a_seeded = np.eye(d) if seed is None else np.asarray(seed, dtype=float)
    rescale = _invert_boundary(b, "DirectODE", t_b - t_a)
    return JacobiBoundarySolution(
        B_dot_a=bdot_a_seeded @ rescale, times=times, B_grid=values @ rescale,
        omega2=w2, t_a=float(t_a), t_b=float(t_b), method="DirectODE")


def _collocation(t_a: float, t_b: float, q: int):
    """Gauss-Legendre nodes, antiderivative matrix and full-interval weights."""
    xi, w = npleg.leggauss(q)
    nodes = t_a + 0.5 * (xi + 1.0) * (t_b - t_a)
    vand = npleg.legvander(xi, q - 1)
    vinv = np.linalg.inv(vand)
    qxi = np.empty((q, q))
    for j in range(q):
        coeffs = npleg.legint(vinv[:, j], lbnd=-1.0)
        qxi[:, j] = npleg.legval(xi, coeffs)
    half = 0.5 * (t_b - t_a)
    return nodes, half * qxi, half * w


def solve_B_neumann(omega2, t_a: float, t_b: float, order: int,
                    quad_points: int = 64) -> JacobiBoundarySolution:
    """Truncated iterated-integral series for B_raw(t_b), then inversion.

    The m-th term is the 2m-fold nested integral of Omega2 against the
    previous one; terms are accumulated with alternating signs up to
    ``order``.  Raises SeriesDivergence when the final term still grows in
    norm over its predecessor (the series is not yet decreasing at the
    truncation horizon, so the first omitted term does not bound the
    error).  A transient hump at low order is tolerated.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    w2, d = _omega2_callable(omega2, t_a)
    q = quad_points
    nodes, qmat, wfull = _collocation(t_a, t_b, q)
    w_nodes = np.array([w2(t) for t in nodes])        # (q, D, D)
    eye = np.eye(d)

    term_nodes = (nodes - t_a)[:, None, None] * eye   # m = 0 term at nodes
    g_nodes = term_nodes.copy()
    g_tb = (t_b - t_a) * eye.copy()
    prev_norm = float(np.linalg.norm(g_tb))

    norm = prev_norm
    for m in range(1, order + 1):
        inner = np.einsum("qij,qjk->qik", w_nodes, term_nodes)
        j_nodes = np.einsum("pq,qik->pik", qmat, inner)
        term_nodes = np.einsum("pq,qik->pik", qmat, j_nodes)
        term_tb = np.einsum("q,qik->ik", wfull, j_nodes)
        prev_norm, norm = norm, float(np.linalg.norm(term_tb))
        sign = -1.0 if m % 2 else 1.0
        g_nodes = g_nodes + sign * term_nodes
        g_tb = g_tb + sign * term_tb
        if norm == 0.0:
            break
    if order >= 1 and norm > prev_norm:
        raise SeriesDivergence(
            f"term {order} norm {norm:.3e} exceeds term {order - 1} norm "
            f"{prev_norm:.3e}; series not decreasing at this truncation")

    rescale = _invert_boundary(g_tb, f"NeumannSeries({order})", t_b - t_a)
    # Collocation nodes are interior; endpoints appended so the grid
    # exhibits B(t_a) = 0 and B(t_b) = identity.
    times = np.concatenate(([t_a], nodes, [t_b]))
    grid = np.concatenate((np.zeros((1, d, d)), g_nodes @ rescale,
                           g_tb[None] @ rescale))
    return JacobiBoundarySolution(
        B_dot_a=rescale, times=times, B_grid=grid, omega2=w2,
        t_a=float(t_a), t_b=float(t_b), method=f"NeumannSeries({order})")


def solve_B_time_ordered(omega2, t_a: float, t_b: float,
                         n_slices: int = 2000) -> JacobiBoundarySolution:
    """Ordered product of per-slice exponentials of [[0, 1], [-Omega2, 0]].

    Omega2 is frozen at each slice midpoint; the (1, 2) block of the
    ordered product (later slices to the left) is B_raw(t_b).
    """
    if n_slices < 1:
        raise ValueError("n_slices must be positive")
    w2, d = _omega2_callable(omega2, t_a)
    dt = (t_b - t_a) / n_slices
    gen = np.zeros((2 * d, 2 * d))
    gen[:d, d:] = np.eye(d)

    slices = []
    phi = np.eye(2 * d)
    for j in range(n_slices):
        gen[d:, :d] = -w2(t_a + (j + 0.5) * dt)
        e = expm(gen * dt)
        slices.append(e)
        phi = e @ phi
    b_tb = phi[:d, d:]
    rescale = _invert_boundary(b_tb, f"TimeOrderedSinh({n_slices})", t_b - t_a)

    times = np.linspace(t_a, t_b, n_slices + 1)
    values = np.empty((n_slices + 1, d, d))
    u = np.vstack((np.zeros((d, d)), rescale))   # (B, Bdot) seeded at t_a
    values[0] = u[:d]
    for j, e in enumerate(slices):
        u = e @ u
        values[j + 1] = u[:d]
    return JacobiBoundarySolution(
        B_dot_a=rescale, times=times, B_grid=values, omega2=w2,
        t_a=float(t_a), t_b=float(t_b), method=f"TimeOrderedSinh({n_slices})")


def gy_fluctuation_factor(sol: JacobiBoundarySolution, mass_metric,
                          hbar: float = 1.0) -> FluctuationFactor:
    """F = sqrt(det M) / (2 pi i hbar T)^(D/2) * sqrt(det(T Bdot(t_a))).

    Requires det(T Bdot(t_a)) > 0, i.e. the interval lies before the first
    focal time; raises FocalPoint otherwise.
    """
    d = sol.dim
    duration = sol.t_b - sol.t_a
    m = np.asarray(mass_metric, dtype=float)
    if m.ndim == 0:
        m = float(m) * np.eye(d)
    det_m = float(np.linalg.det(m))
    if det_m <= 0.0 or not np.allclose(m, m.T, atol=1e-12):
        raise NonSPDMass("mass metric must be symmetric positive definite")
    det_tb = float(np.linalg.det(duration * sol.B_dot_a))
    if det_tb <= 0.0:
        raise FocalPoint(
            f"det(T Bdot(t_a)) = {det_tb:.3e} is not positive; a focal "
            "time lies inside the interval")
    value = (np.sqrt(det_m) * fresnel_prefactor(d, hbar)
             * duration ** (-0.5 * d) * np.sqrt(det_tb))
    return FluctuationFactor(value=value, dim=d, hbar=hbar,
                             method=METHOD_GELFAND_YAGLOM)
