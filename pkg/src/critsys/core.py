"""Domain types, configuration validation, radial grids, and norm utilities.

All types are immutable after construction and all operations are pure, so
everything here is safe to share across workers.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CriticalityViolated,
    DimensionTooSmall,
    ExponentOutOfRange,
    GridTooCoarse,
    InfeasibleHypothesis,
)

CRITICALITY_TOL = 1e-12

# default geometric grid (decades of scale are needed because bound states
# decay like r^-(n-2))
DEFAULT_R0 = 1e-6
DEFAULT_RMAX = 1e4
DEFAULT_NODES = 4000


def unit_sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class ExponentConfig:
    """Dimension and nonlinearity exponents, constrained to the critical sum.

    ``uniqueness_applicable`` is true exactly when alpha < beta, the regime
    in which the off-diagonal shooting sweep is meaningful.
    """

    n: int
    alpha: float
    beta: float

    @property
    def critical_sum(self) -> float:
        return (self.n + 2.0) / (self.n - 2.0)

    @property
    def uniqueness_applicable(self) -> bool:
        return self.alpha < self.beta


def validate_config(n: int, alpha: float, beta: float) -> ExponentConfig:
    """Validate (n, alpha, beta) and return an ExponentConfig.

    Raises DimensionTooSmall, ExponentOutOfRange, InfeasibleHypothesis or
    CriticalityViolated.  For n >= 6 the ordered case alpha < beta is
    impossible under the critical constraint, so an equal-exponent config is
    accepted with a warning.
    """
    n = int(n)
    if n < 3:
        raise DimensionTooSmall(f"need n >= 3, got n = {n}")
    alpha = float(alpha)
    beta = float(beta)
    if alpha < 1.0 or beta < 1.0:
        raise ExponentOutOfRange(f"need alpha, beta >= 1, got ({alpha}, {beta})")
    crit = (n + 2.0) / (n - 2.0)
    if alpha < beta and 2.0 * alpha >= crit - CRITICALITY_TOL:
        # alpha < beta forces alpha + beta > 2*alpha >= critical sum
        raise InfeasibleHypothesis(
            f"alpha < beta is impossible at n = {n}: 2*alpha = {2 * alpha} "
            f">= (n+2)/(n-2) = {crit}"
        )
    if abs(alpha + beta - crit) > CRITICALITY_TOL:
        raise CriticalityViolated(
            f"alpha + beta = {alpha + beta} must equal (n+2)/(n-2) = {crit}"
        )
    if n >= 6:
        warnings.warn(
            f"n = {n} admits only alpha = beta = {crit / 2}; the ordered "
            "uniqueness experiments do not apply",
            stacklevel=2,
        )
    return ExponentConfig(n=n, alpha=alpha, beta=beta)


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing positive radii with a growth descriptor."""

    nodes: np.ndarray
    growth: str = "geometric"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or len(nodes) < 3:
            raise GridTooCoarse("grid needs at least 3 nodes")
        if nodes[0] <= 0.0 or np.any(np.diff(nodes) <= 0.0):
            raise ValueError("grid nodes must be positive and strictly increasing")
        if nodes[0] > 1e-4:
            raise ValueError(f"first node must be <= 1e-4, got {nodes[0]}")

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def r0(self) -> float:
        return float(self.nodes[0])

    @property
    def rmax(self) -> float:
        return float(self.nodes[-1])

    @classmethod
    def geometric(cls, r0: float = DEFAULT_R0, rmax: float = DEFAULT_RMAX,
                  num: int = DEFAULT_NODES) -> "RadialGrid":
        return cls(np.geomspace(r0, rmax, num), growth="geometric")

    @classmethod
    def default(cls) -> "RadialGrid":
        return cls.geometric()

    def coarsened(self) -> "RadialGrid":
        """Every other node (endpoints kept), for Richardson comparisons."""
        idx = np.unique(np.r_[np.arange(0, len(self.nodes), 2), len(self.nodes) - 1])
        return RadialGrid(self.nodes[idx], growth=self.growth)

    def refined(self) -> "RadialGrid":
        """Geometric midpoints inserted between all node pairs."""
        mids = np.sqrt(self.nodes[:-1] * self.nodes[1:])
        merged = np.sort(np.concatenate([self.nodes, mids]))
        return RadialGrid(merged, growth=self.growth)


@dataclass(frozen=True)
class RadialProfilePair:
    """Sampled (u, v) pair on a radial grid with derivative data."""

    grid: RadialGrid
    u: np.ndarray
    v: np.ndarray
    du: np.ndarray
    dv: np.ndarray

    def __post_init__(self):
        for name in ("u", "v", "du", "dv"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != self.grid.nodes.shape:
                raise ValueError(f"{name} must match grid length {len(self.grid)}")
        if np.any(self.u < -1e-12) or np.any(self.v < -1e-12):
            raise ValueError("profile samples must be nonnegative")
        # loose guard for u'(0) = v'(0) = 0: the slope at r0 must be O(r0)
        r0 = self.grid.r0
        scale = (1.0 + self.u[0] + self.v[0]) ** 5
        bound = 100.0 * r0 * scale
        if abs(self.du[0]) > bound or abs(self.dv[0]) > bound:
            raise ValueError(
                "derivative at first node inconsistent with a regular origin"
            )


@dataclass(frozen=True)
class LpNorm:
    """An L^p norm value tagged with its integration domain."""

    p: float
    value: float
    domain_tag: str = "R^n"

    def __post_init__(self):
        if self.p <= 1.0:
            raise ValueError(f"need p > 1, got {self.p}")
        if self.value < 0.0:
            raise ValueError("norm value must be nonnegative")


def _trapz_weights(nodes: np.ndarray) -> np.ndarray:
    h = np.diff(nodes)
    w = np.zeros_like(nodes)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def lp_norm_radial(profile: np.ndarray, grid: RadialGrid, p: float, n: int,
                   domain_tag: str = "R^n",
                   check_tol: float | None = None) -> LpNorm:
    """L^p norm of a radial function sampled on the grid.

    Composite trapezoid of |f|^p * omega_{n-1} * r^{n-1}.  When ``check_tol``
    is given, a half-resolution Richardson comparison estimates the relative
    quadrature error and GridTooCoarse is raised if it exceeds the tolerance.
    """
    if p <= 1.0:
        raise ValueError(f"need p > 1, got {p}")
    f = np.abs(np.asarray(profile, dtype=float))
    integrand = f ** p * grid.nodes ** (n - 1)
    omega = unit_sphere_area(n)
    integral = omega * float(np.trapezoid(integrand, grid.nodes))
    if check_tol is not None and integral > 0.0:
        coarse = grid.coarsened()
        idx = np.searchsorted(grid.nodes, coarse.nodes)
        integral_half = omega * float(np.trapezoid(integrand[idx], coarse.nodes))
        # second-order rule: error ~ |I - I_half| / 3
        rel_err = abs(integral - integral_half) / (3.0 * integral)
        if rel_err > check_tol:
            raise GridTooCoarse(
                f"estimated relative quadrature error {rel_err:.2e} > {check_tol}"
            )
    return LpNorm(p=p, value=integral ** (1.0 / p), domain_tag=domain_tag)


def fd_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Weights differentiating m times at x0 from samples at nodes x.

    Solves the local Vandermonde system so that the weights are exact for
    polynomials up to degree len(x)-1 (Fornberg-style weights).
    """
    x = np.asarray(x, dtype=float) - x0
    scale = np.max(np.abs(x))
    x = x / scale  # conditioning: solve on O(1) offsets
    k = len(x)
    A = np.vander(x, k, increasing=True).T  # A[i, j] = x_j ** i
    b = np.zeros(k)
    b[m] = math.factorial(m)
    return np.linalg.solve(A, b) / scale ** m


def radial_derivatives(samples: np.ndarray, grid: RadialGrid,
                       stencil: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives of grid samples via local FD stencils.

    Interior nodes get centered stencils of the requested width; stencils are
    shifted one-sidedly near the boundaries.
    """
    r = grid.nodes
    samples = np.asarray(samples, dtype=float)
    k = len(r)
    if k < stencil:
        raise GridTooCoarse(f"grid has {k} nodes, stencil needs {stencil}")
    half = stencil // 2
    lo = np.clip(np.arange(k) - half, 0, k - stencil)
    idx = lo[:, None] + np.arange(stencil)[None, :]
    x = r[idx] - r[:, None]
    scale = np.max(np.abs(x), axis=1, keepdims=True)
    xs = x / scale
    # batched Vandermonde solve, exact for local polynomials of degree < stencil
    A = np.swapaxes(xs[:, :, None] ** np.arange(stencil)[None, None, :], 1, 2)
    b = np.zeros((k, stencil, 2))
    b[:, 1, 0] = 1.0
    b[:, 2, 1] = 2.0
    w = np.linalg.solve(A, b)
    vals = samples[idx]
    d1 = np.einsum("ij,ij->i", w[:, :, 0], vals) / scale[:, 0]
    d2 = np.einsum("ij,ij->i", w[:, :, 1], vals) / scale[:, 0] ** 2
    return d1, d2


def radial_laplacian(samples: np.ndarray, grid: RadialGrid, n: int,
                     stencil: int = 5) -> np.ndarray:
    """u'' + (n-1) u'/r computed by finite differences on the grid."""
    d1, d2 = radial_derivatives(samples, grid, stencil=stencil)
    return d2 + (n - 1) * d1 / grid.nodes
