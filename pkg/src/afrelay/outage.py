"""Outage probabilities for both forwarding protocols.

Variable gain has an exact closed form built on K1. Fixed gain is computed
semi-analytically: conditioned on the first-hop gain the outage event in the
second hop is an exponential CDF with a closed-form threshold, and the
remaining one-dimensional integral is done with the adaptive quadrature. The
same conditional construction adapted to variable gain doubles as an
independent oracle for the closed form.

Source distortion enters through an effective threshold map: a network whose
source also clips behaves like a relay-distortion-only network at
gamma * p_s / (sigma_S^2 zeta_S^2 - gamma eta_S), and once that denominator
is exhausted outage is sure at any power.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError
from .link_budget import LinkBudget, NetworkConfig, asymptotic_sndr, build_budget, normalize_protocol
from .special_math import integrate_semi_infinite, one_minus_x_k1


class _SureOutage:
    """Sentinel for threshold maps that leave no feasible operating point."""

    __slots__ = ()

    def __repr__(self):
        return "SURE_OUTAGE"


SURE_OUTAGE = _SureOutage()


@dataclass(frozen=True)
class OutagePoint:
    gamma_th: float
    p_outage: float
    method: str


@dataclass(frozen=True)
class DiversityFit:
    """Fitted high-power slope of log outage versus log source power."""

    slope: float
    power_grid: tuple
    r_squared: float


def gamma_map_source_distortion(gamma_th: float, budget: LinkBudget):
    """Effective threshold seen by a relay-distortion-only analysis.

    Returns SURE_OUTAGE when gamma_th >= sigma_S^2 zeta_S^2 / eta_S, the
    point past which no second hop can help.
    """
    if gamma_th < 0.0:
        raise DomainError("gamma_th must be non-negative")
    s = budget.sel_s
    den = s.sigma_sq * s.zeta**2 - gamma_th * s.eta
    if den <= 0.0:
        return SURE_OUTAGE
    return gamma_th * budget.p_s / den


def _clamp01(p: float) -> float:
    return min(1.0, max(0.0, p))


def outage_vg(gamma_th: float, budget: LinkBudget) -> OutagePoint:
    """Exact variable-gain outage probability."""
    if gamma_th < 0.0:
        raise DomainError("gamma_th must be non-negative")
    p = _outage_vg_value(gamma_th, budget)
    return OutagePoint(gamma_th=gamma_th, p_outage=p, method="exact_vg")


def _outage_vg_value(gamma_th: float, budget: LinkBudget) -> float:
    g = gamma_map_source_distortion(gamma_th, budget)
    if g is SURE_OUTAGE:
        return 1.0
    if g == 0.0:
        return 0.0
    r = budget.sel_r
    if r.sigma_sq * r.zeta**2 <= g * r.eta:
        return 1.0
    if budget.n0 == 0.0:
        # noiseless network: the SNDR equals its distortion limit exactly
        return outage_floor("vg", gamma_th, budget)
    s_r = budget.sigma_r_bar(g)
    if s_r <= 0.0:
        return 1.0
    s1, s2 = budget.sigma1_bar, budget.sigma2_bar
    big_r = g / (s1 * s_r) * (1.0 + s2 * g / s_r)
    big_q = g / s_r * (1.0 + s2 / s1)
    z = 2.0 * math.sqrt(big_r)
    # 1 - e^{-Q} z K1(z), summed as two positive pieces so tiny outage
    # probabilities keep full relative precision
    p = -math.expm1(-big_q) + math.exp(-big_q) * one_minus_x_k1(z)
    return _clamp01(p)


def _fg_constants(gamma_th: float, budget: LinkBudget):
    """Coefficients A, B, C with conditional second-hop threshold
    y*(x) = gamma N0 / (A x - gamma (B + C x))."""
    s, r = budget.sel_s, budget.sel_r
    cfg = budget.config
    g2 = r.sigma_sq / (cfg.p_s * cfg.mu1 + cfg.n0)
    g2zr2 = g2 * r.zeta**2
    a = g2zr2 * s.sigma_sq * s.zeta**2
    b = g2zr2 * cfg.n0 + r.eta
    c = g2zr2 * s.eta
    return a, b, c


def outage_fg(gamma_th: float, budget: LinkBudget, tol: float = 1e-10) -> OutagePoint:
    """Fixed-gain outage probability by conditional-CDF quadrature.

    Absolute error is bounded by `tol` (quadrature budget errors propagate as
    ConvergenceError). gamma values at or past the source sure-outage point
    return exactly 1.
    """
    if gamma_th < 0.0:
        raise DomainError("gamma_th must be non-negative")
    if not (tol > 0.0):
        raise DomainError("tol must be positive")
    p = _outage_fg_value(gamma_th, budget, tol)
    return OutagePoint(gamma_th=gamma_th, p_outage=p, method="quadrature_fg")


def _outage_fg_value(gamma_th: float, budget: LinkBudget, tol: float) -> float:
    if gamma_th == 0.0:
        return 0.0
    if budget.n0 == 0.0:
        return outage_floor("fg", gamma_th, budget)
    a, b, c = _fg_constants(gamma_th, budget)
    slope = a - gamma_th * c
    if slope <= 0.0:
        return 1.0
    mu1, mu2 = budget.config.mu1, budget.config.mu2
    x0 = gamma_th * b / slope
    kappa = gamma_th * budget.n0 / (slope * mu2)

    def knee(u):
        u = np.maximum(u, 1e-320)
        return np.exp(-u / mu1) / mu1 * -np.expm1(-kappa / u)

    res = integrate_semi_infinite(knee, tol=tol, max_evals=400_000)
    p = -math.expm1(-x0 / mu1) + math.exp(-x0 / mu1) * res.value
    return _clamp01(p)


def outage_vg_quadrature(gamma_th: float, budget: LinkBudget, tol: float = 1e-10) -> OutagePoint:
    """Variable-gain outage via the same conditional-CDF route as fixed gain.

    Independent of the closed form (no Bessel evaluation); used to cross
    check it.
    """
    if gamma_th < 0.0:
        raise DomainError("gamma_th must be non-negative")
    if gamma_th == 0.0:
        return OutagePoint(0.0, 0.0, "quadrature_vg")
    if budget.n0 == 0.0:
        return OutagePoint(gamma_th, outage_floor("vg", gamma_th, budget), "quadrature_vg")
    s, r = budget.sel_s, budget.sel_r
    cfg = budget.config
    srz = r.sigma_sq * r.zeta**2
    s_slope = s.sigma_sq * s.zeta**2 - gamma_th * s.eta
    # conditional coefficient of |h2|^2: W(x) = srz (x s_slope - g N0)/(P_S x + N0) - g eta_R
    d_inf = srz * s_slope - gamma_th * r.eta * cfg.p_s
    if d_inf <= 0.0:
        return OutagePoint(gamma_th, 1.0, "quadrature_vg")
    x0 = gamma_th * cfg.n0 * (srz + r.eta) / d_inf
    mu1, mu2 = cfg.mu1, cfg.mu2
    g_n0 = gamma_th * cfg.n0

    def knee(u):
        x = x0 + np.maximum(u, 0.0)
        w = srz * (x * s_slope - g_n0) / (cfg.p_s * x + cfg.n0) - gamma_th * r.eta
        w = np.maximum(w, 1e-320)
        return np.exp(-x / mu1) / mu1 * -np.expm1(-g_n0 / (mu2 * w))

    res = integrate_semi_infinite(knee, tol=tol, max_evals=400_000)
    p = -math.expm1(-x0 / mu1) + res.value
    return OutagePoint(gamma_th, _clamp01(p), "quadrature_vg")


def outage_fg_floor(gamma_th: float, budget: LinkBudget) -> float:
    """High-power floor of the fixed-gain outage (CDF of its SNDR limit)."""
    if gamma_th < 0.0:
        raise DomainError("gamma_th must be non-negative")
    b = budget
    s_slope = b.tilde_sigma_s_sq * b.sel_s.zeta**2 - gamma_th * b.tilde_eta_s
    if s_slope <= 0.0:
        return 1.0
    if b.tilde_eta_r == 0.0:
        return 0.0
    srz = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    return -math.expm1(-b.tilde_eta_r * gamma_th / (s_slope * srz))


def outage_floor(protocol: str, gamma_th: float, budget: LinkBudget) -> float:
    """Distortion-limited outage floor for either protocol.

    Fixed gain keeps a fading-dependent limit, hence a smooth floor; variable
    gain's limit is deterministic, so the floor is a step at the critical
    threshold.
    """
    protocol = normalize_protocol(protocol)
    if protocol == "fg":
        return outage_fg_floor(gamma_th, budget)
    if gamma_th < 0.0:
        raise DomainError("gamma_th must be non-negative")
    if max(budget.tilde_eta_s, budget.tilde_eta_r) == 0.0:
        return 0.0
    return 0.0 if gamma_th < asymptotic_sndr("vg", 1.0, budget) else 1.0


def _g_fg(gamma_th: float, budget: LinkBudget) -> float:
    """First-order constant of the fixed-gain high-power expansion."""
    b = budget
    s_slope = b.tilde_sigma_s_sq * b.sel_s.zeta**2 - gamma_th * b.tilde_eta_s
    srz = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    expo = b.tilde_eta_r * gamma_th / (srz * s_slope)
    return srz * b.config.mu2 * s_slope / (b.n0 * gamma_th) * math.exp(expo)


def _g_vg(gamma_th: float, budget: LinkBudget) -> float:
    """First-order constant of the variable-gain high-power expansion."""
    b = budget
    s_slope = b.tilde_sigma_s_sq * b.sel_s.zeta**2 - gamma_th * b.tilde_eta_s
    srz = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    g_eff = gamma_th / s_slope
    mu1, mu2 = b.config.mu1, b.config.mu2
    return (srz - g_eff * b.tilde_eta_r) * mu1 * mu2 / (
        b.n0 * g_eff * (mu1 + b.config.p_ratio * mu2)
    )


def outage_asymptotic(protocol: str, gamma_th: float, p_s_grid, cfg: NetworkConfig):
    """First-order high-power outage expansion on a grid of source powers.

    Fixed gain tends to its floor plus a log(p)/p correction; variable gain
    decays like 1/p. Values are clamped to [0, 1].
    """
    protocol = normalize_protocol(protocol)
    if gamma_th < 0.0:
        raise DomainError("gamma_th must be non-negative")
    ref = build_budget(_with_ps(cfg, 1.0))
    s_slope = ref.tilde_sigma_s_sq * ref.sel_s.zeta**2 - gamma_th * ref.tilde_eta_s
    if s_slope <= 0.0:
        raise DomainError("gamma_th is at or past the source sure-outage point")
    out = []
    if protocol == "fg":
        floor = outage_fg_floor(gamma_th, ref)
        g = _g_fg(gamma_th, ref)
        for p_s in p_s_grid:
            val = floor + math.log(p_s) / (g * p_s)
            out.append(OutagePoint(gamma_th, _clamp01(val), "asymptotic"))
    else:
        if ref.tilde_sigma_r_sq * ref.sel_r.zeta**2 - (gamma_th / s_slope) * ref.tilde_eta_r <= 0.0:
            # past the variable-gain threshold the expansion constant is gone
            for p_s in p_s_grid:
                out.append(OutagePoint(gamma_th, 1.0, "asymptotic"))
            return out
        g = _g_vg(gamma_th, ref)
        for p_s in p_s_grid:
            out.append(OutagePoint(gamma_th, _clamp01(1.0 / (g * p_s)), "asymptotic"))
    return out


def _with_ps(cfg: NetworkConfig, p_s: float) -> NetworkConfig:
    return NetworkConfig(
        mu1=cfg.mu1, mu2=cfg.mu2, n0=cfg.n0, p_s=p_s, p_ratio=cfg.p_ratio,
        clip_ratio_s=cfg.clip_ratio_s, clip_ratio_r=cfg.clip_ratio_r,
        n_subcarriers=cfg.n_subcarriers, n_taps=cfg.n_taps,
    )


def exact_outage(protocol: str, gamma_th: float, budget: LinkBudget, tol: float = 1e-10) -> float:
    protocol = normalize_protocol(protocol)
    if protocol == "vg":
        return _outage_vg_value(gamma_th, budget)
    return _outage_fg_value(gamma_th, budget, tol)


def diversity_fit(protocol: str, gamma_th: float, cfg: NetworkConfig, p_s_grid) -> DiversityFit:
    """Least-squares slope of -log outage vs log source power.

    The fit uses the top decade of the grid, where the expansion regime is
    cleanest. Points that underflow are dropped with a warning.
    """
    protocol = normalize_protocol(protocol)
    grid = np.asarray(sorted(float(p) for p in p_s_grid))
    if grid.size < 3 or grid[-1] / grid[0] < 1e3:
        raise DomainError("power grid must span at least three decades")
    top = grid[grid >= grid[-1] / 10.0]
    if top.size < 3:
        top = grid[-3:]
    ps, vals = [], []
    for p_s in top:
        budget = build_budget(_with_ps(cfg, p_s))
        p = exact_outage(protocol, gamma_th, budget, tol=1e-12)
        if p < 1e-300:
            warnings.warn(f"outage underflow at p_s={p_s:g}; point dropped from diversity fit")
            continue
        ps.append(math.log(p_s))
        vals.append(math.log(p))
    if len(ps) < 2:
        raise DomainError("too few usable points for a diversity fit")
    ps = np.asarray(ps)
    vals = np.asarray(vals)
    slope_b, intercept = np.polyfit(ps, vals, 1)
    pred = slope_b * ps + intercept
    ss_res = float(np.sum((vals - pred) ** 2))
    ss_tot = float(np.sum((vals - np.mean(vals)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return DiversityFit(slope=-float(slope_b), power_grid=tuple(np.exp(ps)), r_squared=r2)


def small_gamma_expansion(protocol: str, gamma_th: float, budget: LinkBudget) -> float:
    """First-order outage expansion about gamma_th = 0.

    Valid while Z*gamma (times 1 + sigma1_bar for fixed gain) stays well below
    one; outside that region a RegimeError is raised.
    """
    protocol = normalize_protocol(protocol)
    if not (gamma_th > 0.0):
        raise DomainError("gamma_th must be positive")
    b = budget
    if b.n0 == 0.0:
        raise DomainError("small-gamma expansion requires positive noise power")
    euler_c = float(np.euler_gamma)
    z_const = 1.0 / (
        (b.sel_s.sigma_sq * b.sel_s.zeta**2 * b.config.mu1 / b.n0)
        * (b.sel_r.sigma_sq * b.sel_r.zeta**2 * b.config.mu2 / b.n0)
    )
    zg = z_const * gamma_th
    s1, s2 = b.sigma1_bar, b.sigma2_bar
    if protocol == "vg":
        if zg >= 1.0:
            raise RegimeError("expansion region exceeded: Z*gamma >= 1")
        return zg * (1.0 - 2.0 * euler_c + s1 + s2 - math.log(zg))
    arg = zg * (1.0 + s1)
    if arg >= 1.0:
        raise RegimeError("expansion region exceeded: Z*gamma*(1+sigma1_bar) >= 1")
    mu2_over_eps_r = 0.0 if b.eps_r == math.inf else b.config.mu2 / b.eps_r
    return zg * (
        s2 + s1 * mu2_over_eps_r + (1.0 + s1) * (1.0 - 2.0 * euler_c - math.log(arg))
    )
