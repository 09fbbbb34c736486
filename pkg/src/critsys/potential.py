"""Radial Newtonian potential, Picard iteration, and the HLS functional.

The normalized inverse Laplacian on radial functions reduces exactly to the
one-dimensional kernel max(r,s)^(2-n)/(n-2): the average of |x-y|^(2-n) over
the sphere |y| = s equals max(r,s)^(2-n) by harmonicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ExponentConfig, RadialGrid, RadialProfilePair, lp_norm_radial, unit_sphere_area
from .errors import (
    ExponentRelationViolated,
    IterateBlowup,
    NonintegrableInput,
    QuadratureDivergence,
)

BLOWUP_SUP = 1e6
EXPONENT_RELATION_TOL = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Riesz kernel |x-y|^(-lam) plus the angular quadrature resolution."""

    n: int
    lam: float
    angular_rule: int = 64

    def __post_init__(self):
        if not 0.0 < self.lam < self.n:
            raise QuadratureDivergence(f"need 0 < lambda < n, got {self.lam}")
        if self.angular_rule < 16:
            raise ValueError("angular_rule must be >= 16")


@dataclass(frozen=True)
class PicardState:
    """One iterate of the integral-form fixed point map."""

    iterate: RadialProfilePair
    residual: float
    step: int
    degenerate: bool = False

    def __post_init__(self):
        if self.residual < 0.0 or self.step < 0:
            raise ValueError("residual and step must be nonnegative")


def _check_integrable_tail(f: np.ndarray, grid: RadialGrid) -> None:
    """The radial potential needs s*f(s) decaying at the outer boundary."""
    r = grid.nodes
    tail = r * f
    i = np.searchsorted(r, grid.rmax / 10.0)
    if tail[-1] > 0.0 and tail[-1] >= tail[i] > 0.0 and tail[-1] > 1e-300:
        raise NonintegrableInput(
            "s^(n-1) f(s) s^(2-n) shows no decay over the last decade")


def newton_potential_radial(f: np.ndarray, grid: RadialGrid, n: int,
                            tail_power: float | None = None) -> np.ndarray:
    """u with -Laplace(u) = f for radial data f >= 0.

    u(r) = (1/(n-2)) [ r^(2-n) * int_0^r s^(n-1) f ds + int_r^inf s f ds ].
    Beyond the grid, f is extrapolated as C * s^(-tail_power) (default n+2,
    the decay of the critical nonlinearity) and the tail added analytically.
    """
    f = np.asarray(f, dtype=float)
    if np.any(f < 0.0):
        raise NonintegrableInput("f must be nonnegative")
    _check_integrable_tail(f, grid)
    r = grid.nodes
    if tail_power is None:
        tail_power = n + 2.0

    inner_integrand = r ** (n - 1) * f
    inner = np.concatenate([[0.0], np.cumsum(
        0.5 * np.diff(r) * (inner_integrand[:-1] + inner_integrand[1:]))])
    outer_integrand = r * f
    outer_rev = np.concatenate([np.cumsum(
        (0.5 * np.diff(r) * (outer_integrand[:-1] + outer_integrand[1:]))[::-1])[::-1],
        [0.0]])
    # analytic tail: f ~ C s^-tail_power beyond rmax
    c_tail = f[-1] * grid.rmax ** tail_power
    if tail_power > 2.0:
        outer_rev = outer_rev + c_tail * grid.rmax ** (2.0 - tail_power) / (tail_power - 2.0)
    return (r ** (2.0 - n) * inner + outer_rev) / (n - 2.0)


def newton_potential_derivative(f: np.ndarray, grid: RadialGrid,
                                n: int) -> np.ndarray:
    """Exact radial derivative of the potential: u'(r) = -r^(1-n) int_0^r s^(n-1) f."""
    r = grid.nodes
    inner_integrand = r ** (n - 1) * np.asarray(f, dtype=float)
    inner = np.concatenate([[0.0], np.cumsum(
        0.5 * np.diff(r) * (inner_integrand[:-1] + inner_integrand[1:]))])
    return -inner / r ** (n - 1)


def apply_hls_operator(f: np.ndarray, grid: RadialGrid, n: int) -> np.ndarray:
    """Un-normalized operator Tf(x) = int |x-y|^(2-n) f(y) dy on radial f."""
    return (n - 2.0) * unit_sphere_area(n) * newton_potential_radial(f, grid, n)


def picard_step(state: PicardState, config: ExponentConfig) -> PicardState:
    """One application of u <- (-Lap)^-1(u^a v^b), v <- (-Lap)^-1(u^b v^a)."""
    prof = state.iterate
    grid = prof.grid
    n = config.n
    if np.max(prof.u) == 0.0 and np.max(prof.v) == 0.0:
        return PicardState(prof, residual=0.0, step=state.step + 1,
                           degenerate=True)
    fu = prof.u ** config.alpha * prof.v ** config.beta
    fv = prof.u ** config.beta * prof.v ** config.alpha
    new_u = newton_potential_radial(fu, grid, n)
    new_v = newton_potential_radial(fv, grid, n)
    sup = max(np.max(new_u), np.max(new_v))
    if sup > BLOWUP_SUP:
        raise IterateBlowup(f"iterate sup-norm {sup:.3e} exceeds {BLOWUP_SUP:.0e}")
    residual = max(float(np.max(np.abs(new_u - prof.u))),
                   float(np.max(np.abs(new_v - prof.v))))
    new_prof = RadialProfilePair(
        grid, new_u, new_v,
        newton_potential_derivative(fu, grid, n),
        newton_potential_derivative(fv, grid, n))
    return PicardState(new_prof, residual=residual, step=state.step + 1)


def picard_iterate(state: PicardState, config: ExponentConfig,
                   residual_tol: float = 1e-8, max_steps: int = 200,
                   callback=None) -> PicardState:
    """Iterate picard_step until the residual tolerance or the step cap."""
    for _ in range(max_steps):
        state = picard_step(state, config)
        if callback is not None:
            callback(state)
        if state.residual < residual_tol:
            break
    return state


def _angular_factor(r: np.ndarray, s: np.ndarray, kernel: KernelSpec) -> np.ndarray:
    """Sphere average of |r e1 - s omega|^(-lam) over unit directions omega.

    Exact max(r,s)^(2-n) when lam = n-2 (harmonicity); otherwise
    Gauss-Legendre in cos(theta) with weight (1 - cos^2)^((n-3)/2).
    """
    n, lam = kernel.n, kernel.lam
    if abs(lam - (n - 2.0)) < 1e-14:
        return np.maximum(r, s) ** (2.0 - n)
    if lam >= n - 1.0:
        raise QuadratureDivergence(
            f"lambda = {lam} too close to n = {n} for grid quadrature")
    u, w = np.polynomial.legendre.leggauss(kernel.angular_rule)
    wt = w * (1.0 - u ** 2) ** ((n - 3) / 2.0)
    wt = wt / np.sum(wt)
    d2 = r[..., None] ** 2 + s[..., None] ** 2 - 2.0 * r[..., None] * s[..., None] * u
    return np.sum(wt * d2 ** (-lam / 2.0), axis=-1)


def hls_functional(f: np.ndarray, g: np.ndarray, grid: RadialGrid,
                   kernel: KernelSpec, r_exp: float, s_exp: float) -> float:
    """J(f, g) / (||f||_r ||g||_s) for nonnegative radial f, g.

    J is the bilinear Riesz functional; the exponents must satisfy
    1/r + 1/s + lambda/n = 2.
    """
    n = kernel.n
    if abs(1.0 / r_exp + 1.0 / s_exp + kernel.lam / n - 2.0) > EXPONENT_RELATION_TOL:
        raise ExponentRelationViolated(
            f"1/{r_exp} + 1/{s_exp} + {kernel.lam}/{n} != 2")
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if np.any(f < 0.0) or np.any(g < 0.0):
        raise NonintegrableInput("f and g must be nonnegative")
    nf = lp_norm_radial(f, grid, r_exp, n).value
    ng = lp_norm_radial(g, grid, s_exp, n).value
    if nf == 0.0 or ng == 0.0:
        return 0.0

    r = grid.nodes
    h = np.diff(r)
    w = np.zeros_like(r)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    wf = w * r ** (n - 1) * f
    wg = w * r ** (n - 1) * g
    omega = unit_sphere_area(n)

    total = 0.0
    chunk = max(1, int(2_000_000 / len(r)))
    for i in range(0, len(r), chunk):
        A = _angular_factor(r[i:i + chunk, None], r[None, :], kernel)
        total += wf[i:i + chunk] @ A @ wg
    J = omega ** 2 * total
    return float(J / (nf * ng))


def verify_hls_operator_bound(f: np.ndarray, grid: RadialGrid,
                              config: ExponentConfig) -> tuple[float, float]:
    """(|Tf|_p, |f|_{np/(n+2p)}) with p = 2n/(n-2), for comparing both sides.

    The sharp constant is not asserted; callers inspect the ratio.
    """
    n = config.n
    p = 2.0 * n / (n - 2.0)
    q = n * p / (n + 2.0 * p)
    f = np.asarray(f, dtype=float)
    if np.max(np.abs(f)) == 0.0:
        return 0.0, 0.0
    tf = apply_hls_operator(f, grid, n)
    lhs = lp_norm_radial(tf, grid, p, n).value
    rhs = lp_norm_radial(f, grid, q, n).value
    return float(lhs), float(rhs)
