"""Desk-scale verification suite exercising every module.

Each check returns (passed, detail).  The pytest acceptance module and the
CLI ``verify-all`` subcommand both run this list.
"""
from __future__ import annotations

import numpy as np

from . import bubble as bb
from . import moving_plane as mp
from . import potential as pot
from . import shooting as sh
from .core import (
    ExponentConfig,
    RadialGrid,
    RadialProfilePair,
    validate_config,
)

DEFAULT_SEED = 1234


def _bubble_profile(params: bb.BubbleParams, grid: RadialGrid) -> RadialProfilePair:
    r = grid.nodes
    n = params.n
    phi = bb.eval_bubble_radial(params, r)
    dphi = -(n - 2.0) * phi * r / (params.t ** 2 + r ** 2)
    return RadialProfilePair(grid, phi, phi, dphi, dphi)


def check_bubble_residual() -> tuple[bool, str]:
    """Amplitude constant certified by the FD residual for all (n, t)."""
    grid = RadialGrid.default()
    worst = 0.0
    for n in (3, 4, 5):
        crit = (n + 2.0) / (n - 2.0)
        cfg = ExponentConfig(n, crit / 2.0, crit / 2.0)
        for t in (0.5, 1.0, 2.0):
            res = bb.bubble_residual(bb.make_bubble(cfg, t=t), cfg, grid)
            worst = max(worst, res)
    return worst <= 1e-6, f"max residual {worst:.3e} (tol 1e-6)"


def check_system_closure() -> tuple[bool, str]:
    """(phi, phi) satisfies both coupled equations at three configs."""
    grid = RadialGrid.default()
    worst = 0.0
    for n, alpha, beta in [(3, 2.0, 3.0), (4, 1.0, 2.0), (5, 1.0, 4.0 / 3.0)]:
        cfg = validate_config(n, alpha, beta)
        ru, rv = bb.pair_residual(bb.make_bubble(cfg, t=1.0), cfg, grid)
        worst = max(worst, ru, rv)
    return worst <= 1e-6, f"max pair residual {worst:.3e} (tol 1e-6)"


def check_shooting_oracle() -> tuple[bool, str]:
    """Diagonal shots reproduce phi_{0,t} to relative 1e-6 on [0, 50]."""
    cfg = ExponentConfig(3, 2.0, 3.0)
    c = bb.amplitude_constant(3)
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        u0 = c * t ** -0.5
        prof = sh.integrate_radial(sh.ShootInput(cfg, u0, u0, r_max=50.0))
        phi = bb.eval_bubble_radial(bb.make_bubble(cfg, t=t), prof.grid.nodes)
        worst = max(worst, float(np.max(np.abs(prof.u - phi) / phi)))
    return worst <= 1e-6, f"max relative error {worst:.3e} (tol 1e-6)"


_SWEEP_RATIOS = (0.5, 0.8, 0.9, 1.0, 1.1, 1.25, 2.0)
_sweep_cache: list | None = None


def _sweep_rows() -> list:
    global _sweep_cache
    if _sweep_cache is None:
        cfg = ExponentConfig(3, 2.0, 3.0)
        _sweep_cache = sh.uniqueness_sweep(cfg, _SWEEP_RATIOS, base=1.0)
    return _sweep_cache


def check_uniqueness_witness() -> tuple[bool, str]:
    """BoundState occurs exactly at ratio 1 across the sweep."""
    rows = _sweep_rows()
    ok = sh.sweep_consistent(rows)
    table = ", ".join(f"{r.ratio}:{r.kind.value}" for r in rows)
    return ok, table


def check_sign_lemma() -> tuple[bool, str]:
    """u^a v^b > u^b v^a at every swept node with 0 < u < v."""
    cfg = ExponentConfig(3, 2.0, 3.0)
    violations = 0
    checked = 0
    for row in _sweep_rows():
        u, v = row.profile.u, row.profile.v
        mask = (u > 0.0) & (v > 0.0) & (u < v)
        checked += int(np.sum(mask))
        term = (u[mask] ** cfg.alpha * v[mask] ** cfg.beta
                - u[mask] ** cfg.beta * v[mask] ** cfg.alpha)
        violations += int(np.sum(term <= 0.0))
    return violations == 0, f"{checked} ordered nodes, {violations} violations"


def check_integral_identity() -> tuple[bool, str]:
    """Nested-integral identity gap and its second-order convergence."""
    cfg = ExponentConfig(3, 2.0, 3.0)
    params = bb.make_bubble(cfg, t=1.0)
    radii = (0.1, 1.0, 10.0)
    gaps = []
    for num in (4000, 8000):
        grid = RadialGrid.geometric(num=num)
        rep = sh.check_integral_identity(_bubble_profile(params, grid), cfg, radii)
        gaps.append(rep.max_abs_gap)
    factor = gaps[0] / gaps[1]
    ok = gaps[0] <= 1e-5 and factor >= 3.5
    return ok, f"gap {gaps[0]:.3e} (tol 1e-5), refinement factor {factor:.2f} (>= 3.5)"


def check_newton_potential() -> tuple[bool, str]:
    """Unit-ball source: interior value 1/2 and the exterior 1/r law."""
    base = np.geomspace(1e-6, 1e4, 9000)
    grid = RadialGrid(np.unique(np.concatenate([base, [1.0, 1.0 + 1e-9]])))
    f = (grid.nodes <= 1.0).astype(float)
    u = pot.newton_potential_radial(f, grid, 3)
    err0 = abs(u[0] - 0.5)
    mass = 1.0 / 3.0
    ext = grid.nodes > 1.0
    err_ext = float(np.max(np.abs(u[ext] - mass / grid.nodes[ext])))
    ok = err0 <= 1e-6 and err_ext <= 1e-6
    return ok, f"u(0) error {err0:.3e}, exterior error {err_ext:.3e} (tol 1e-6)"


def check_picard_fixed_point() -> tuple[bool, str]:
    """The bubble pair is a fixed point of the integral map."""
    cfg = ExponentConfig(3, 2.0, 3.0)
    grid = RadialGrid.default()
    prof = _bubble_profile(bb.make_bubble(cfg, t=1.0), grid)
    state = pot.picard_step(pot.PicardState(prof, residual=np.inf, step=0), cfg)
    return state.residual <= 1e-4, f"residual {state.residual:.3e} (tol 1e-4)"


def check_moving_plane_symmetry() -> tuple[bool, str]:
    """Critical plane position recovers the bubble center within one cell."""
    cfg = ExponentConfig(3, 2.0, 3.0)
    sampler = mp.CartesianSampler(L=10.0, m=64)
    lambdas = np.linspace(-2.0, 3.0, 41)
    details = []
    ok = True
    for center_x1 in (0.0, 1.0):
        params = bb.make_bubble(cfg, center=(center_x1, 0.0, 0.0), t=1.0)
        field = bb.bubble_field(params)
        res = mp.critical_plane_scan(field, field, sampler, lambdas)
        good = abs(res.lambda0 - center_x1) <= sampler.cell
        # sets must stay empty strictly above lambda0 + one cell
        for lam in lambdas[lambdas > res.lambda0 + sampler.cell]:
            measure, _ = mp.exceedance_sets(field, mp.PlaneParam(float(lam)), sampler)
            good &= measure == 0.0
        ok &= good
        details.append(f"center {center_x1}: lambda0 {res.lambda0:+.4f}")
    return ok, "; ".join(details) + f" (cell {sampler.cell})"


def check_greens_identity() -> tuple[bool, str]:
    """Reflection identity: closed form vs half-space quadrature within 2%."""
    cfg = ExponentConfig(3, 2.0, 3.0)
    params = bb.make_bubble(cfg, center=(1.0, 0.0, 0.0), t=1.0)
    worst = 0.0
    for lam, x1 in [(0.0, -1.0), (0.5, -0.5), (1.5, 0.0)]:
        lhs, rhs = mp.greens_reflection_identity(
            params, mp.PlaneParam(lam), np.array([x1, 0.0, 0.0]), cfg)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    return worst <= 0.02, f"max relative disagreement {worst:.4f} (tol 0.02)"


def check_hls_invariance() -> tuple[bool, str]:
    """Conformal invariance in t and exact homogeneity of the HLS ratio."""
    cfg = ExponentConfig(3, 2.0, 3.0)
    grid = RadialGrid.default()
    kernel = pot.KernelSpec(3, 1.0)
    vals = []
    for t in (0.5, 1.0, 2.0):
        f = bb.eval_bubble_radial(bb.make_bubble(cfg, t=t), grid.nodes) ** 5
        vals.append(pot.hls_functional(f, f, grid, kernel, 6.0 / 5.0, 6.0 / 5.0))
    spread = (max(vals) - min(vals)) / np.mean(vals)
    f = bb.eval_bubble_radial(bb.make_bubble(cfg, t=1.0), grid.nodes) ** 5
    base = pot.hls_functional(f, f, grid, kernel, 6.0 / 5.0, 6.0 / 5.0)
    hom = max(abs(pot.hls_functional(c1 * f, c2 * f, grid, kernel,
                                     6.0 / 5.0, 6.0 / 5.0) - base)
              for c1 in (2.0, 10.0) for c2 in (2.0, 10.0))
    ok = spread <= 1e-4 and hom <= 1e-12
    return ok, f"t-spread {spread:.3e} (tol 1e-4), homogeneity {hom:.3e} (tol 1e-12)"


def check_property_suites(seed: int = DEFAULT_SEED) -> tuple[bool, str]:
    """Randomized involution, swap, equal-start, and kernel positivity runs."""
    rng = np.random.default_rng(seed)
    cfg = ExponentConfig(3, 2.0, 3.0)
    cases = 100
    fails = []

    # reflect is an exact involution
    x = rng.normal(size=(cases, 3)) * 5.0
    for i in range(cases):
        d = rng.normal(size=3)
        plane = mp.PlaneParam(float(rng.normal() * 3.0), d / np.linalg.norm(d))
        if not np.allclose(mp.reflect(mp.reflect(x[i], plane), plane), x[i],
                           atol=1e-12):
            fails.append("involution")
            break

    # kernel-difference positivity on H_lam x H_lam
    for _ in range(cases):
        lam = float(rng.normal())
        plane = mp.PlaneParam(lam, n=3)
        p, q = rng.normal(size=3), rng.normal(size=3)
        p[0] = lam - abs(p[0]) - 1e-6
        q[0] = lam - abs(q[0]) - 1e-6
        if np.allclose(p, q):
            continue
        ql = mp.reflect(q, plane)
        diff = np.linalg.norm(p - q) ** -1.0 - np.linalg.norm(p - ql) ** -1.0
        if diff <= 0.0:
            fails.append("kernel-positivity")
            break

    # swap antisymmetry and equal-start collapse of the shooting map
    for i in range(cases):
        u0 = float(rng.uniform(0.5, 2.0))
        v0 = float(rng.uniform(0.5, 2.0))
        a = sh.integrate_radial(sh.ShootInput(cfg, u0, v0, r_max=50.0))
        b = sh.integrate_radial(sh.ShootInput(cfg, v0, u0, r_max=50.0))
        if (np.max(np.abs(a.u - b.v)) > 1e-7 or np.max(np.abs(a.v - b.u)) > 1e-7):
            fails.append("swap-antisymmetry")
            break
        if i < cases:  # equal-start from the same draws
            c = sh.integrate_radial(sh.ShootInput(cfg, u0, u0, r_max=50.0))
            if np.max(np.abs(c.u - c.v)) > 1e-10:
                fails.append("equal-start-collapse")
                break

    return not fails, "no violations" if not fails else f"failed: {fails}"


ALL_CRITERIA = [
    ("bubble residual", check_bubble_residual),
    ("system closure", check_system_closure),
    ("shooting-oracle agreement", check_shooting_oracle),
    ("uniqueness witness", check_uniqueness_witness),
    ("sign lemma", check_sign_lemma),
    ("integral identity", check_integral_identity),
    ("newtonian potential exactness", check_newton_potential),
    ("picard fixed point", check_picard_fixed_point),
    ("moving-plane symmetry", check_moving_plane_symmetry),
    ("greens reflection identity", check_greens_identity),
    ("hls conformal invariance", check_hls_invariance),
    ("property suites", check_property_suites),
]


def run_all(printer=print) -> bool:
    """Run every criterion, print one line each, return overall success."""
    all_ok = True
    for name, fn in ALL_CRITERIA:
        ok, detail = fn()
        all_ok &= ok
        printer(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
