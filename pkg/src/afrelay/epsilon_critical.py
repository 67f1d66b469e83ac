"""Critical SNDR thresholds and the distortion-limited phase transition.

When the noise-to-distortion ratio eps_star is small, the outage probability
jumps between a small value and one across a critical protection threshold.
This module computes those thresholds for both protocols, the gap between
them, the leading-order ordinate of the drop, and the bounded factor by which
fixed gain can beat variable gain inside the gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, RegimeError
from .link_budget import LinkBudget, normalize_protocol
from .outage import exact_outage


@dataclass(frozen=True)
class PhaseTransitionReport:
    protocol: str
    gamma_crit: float
    gamma_crit_db: float
    ordinate: float | None
    eps_star: float
    threshold_gap: float | None
    fg_advantage_factor: float | None
    no_phase_transition: bool
    exact_outage_below: float | None = None


def _to_db(x: float) -> float:
    return 10.0 * math.log10(x) if 0.0 < x < math.inf else math.inf


def threshold(protocol: str, budget: LinkBudget) -> float:
    """Critical threshold; +inf when the protocol has no phase transition."""
    protocol = normalize_protocol(protocol)
    b = budget
    num_s = b.tilde_sigma_s_sq * b.sel_s.zeta**2
    if protocol == "fg":
        return num_s / b.tilde_eta_s if b.tilde_eta_s > 0.0 else math.inf
    srz = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    den = b.tilde_eta_r + srz * b.tilde_eta_s
    return num_s * srz / den if den > 0.0 else math.inf


def threshold_gap(budget: LinkBudget) -> float:
    """threshold(fg) - threshold(vg) in closed form; needs source distortion."""
    b = budget
    if b.tilde_eta_s <= 0.0:
        raise DomainError("threshold gap is undefined for a distortion-free source")
    srz = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    num_s = b.tilde_sigma_s_sq * b.sel_s.zeta**2
    return num_s * b.tilde_eta_r / (b.tilde_eta_s * (b.tilde_eta_r + srz * b.tilde_eta_s))


def ordinate(protocol: str, budget: LinkBudget, eps_star: float | None = None) -> float:
    """Leading-order outage just below the critical threshold.

    eps_star defaults to the budget's own value but can be overridden to
    study the scaling law; the relay's eps then scales consistently. The
    formula only holds deep in the distortion-limited regime, hence a
    RegimeError once its log argument is no longer above one.
    """
    protocol = normalize_protocol(protocol)
    b = budget
    eta_max = max(b.tilde_eta_s, b.tilde_eta_r)
    if eta_max <= 0.0:
        raise DomainError("ordinate is undefined for a linear network")
    eps = b.eps_star if eps_star is None else float(eps_star)
    if not (0.0 < eps < math.inf):
        raise DomainError(f"eps_star must be positive and finite, got {eps!r}")
    srz = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    mu1, mu2 = b.config.mu1, b.config.mu2
    if protocol == "fg":
        if b.tilde_eta_s <= 0.0:
            raise DomainError("fixed-gain ordinate requires source distortion")
        scale = eps * eta_max / (b.tilde_eta_s * srz * mu2)
        arg = b.tilde_eta_s * srz * mu2 / (eps * eta_max)
        if arg <= 1.0:
            raise RegimeError("eps_star too large for the ordinate expansion")
        # relay eps scales with the same noise level: mu2/eps_R = mu2 eta_R/(eps eta_max)
        mu2_over_eps_r = mu2 * b.tilde_eta_r / (eps * eta_max)
        return scale * (mu2_over_eps_r + math.log(arg))
    a_vg = (b.tilde_eta_r + srz * b.tilde_eta_s) / eta_max
    arg = a_vg * mu1 * mu2 / (eps * eps * eta_max)
    if arg <= 1.0:
        raise RegimeError("eps_star too large for the ordinate expansion")
    return (eps * eps * eta_max) / (a_vg * mu1 * mu2) * math.log(arg)


def fg_advantage_factor(gamma_th: float, budget: LinkBudget) -> float:
    """Largest distortion-limited edge of fixed over variable gain.

    Only meaningful for thresholds strictly inside the inter-threshold gap,
    where variable gain is already in sure outage but fixed gain still sees
    its floor.
    """
    b = budget
    th_vg = threshold("vg", b)
    th_fg = threshold("fg", b)
    if not (th_vg < gamma_th < th_fg):
        raise DomainError(
            f"gamma_th must lie strictly between the thresholds ({th_vg:g}, {th_fg:g})"
        )
    srz = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    s_slope = b.tilde_sigma_s_sq * b.sel_s.zeta**2 - gamma_th * b.tilde_eta_s
    return -math.expm1(-b.tilde_eta_r * th_vg / (s_slope * srz))


def report(budget: LinkBudget, include_exact_outage: bool = False) -> dict:
    """Phase-transition summary for both protocols.

    Quantities that do not exist for a configuration (a linear node, an out of
    regime ordinate) come back as None rather than raising. When asked, the
    exact outage evaluated just below each finite threshold (at 0.99x) is
    attached for comparison against the leading-order ordinate.
    """
    out = {}
    gap = None
    if budget.tilde_eta_s > 0.0:
        gap = threshold_gap(budget)
    adv = None
    th_fg = threshold("fg", budget)
    th_vg = threshold("vg", budget)
    if th_vg < th_fg < math.inf:
        adv = fg_advantage_factor(0.5 * (th_vg + th_fg), budget)
    for proto, th in (("fg", th_fg), ("vg", th_vg)):
        try:
            o = ordinate(proto, budget)
        except (DomainError, RegimeError):
            o = None
        exact_below = None
        if include_exact_outage and th < math.inf and budget.n0 > 0.0:
            exact_below = exact_outage(proto, 0.99 * th, budget)
        out[proto] = PhaseTransitionReport(
            protocol=proto,
            gamma_crit=th,
            gamma_crit_db=_to_db(th),
            ordinate=o,
            eps_star=budget.eps_star,
            threshold_gap=gap,
            fg_advantage_factor=adv,
            no_phase_transition=not (th < math.inf),
            exact_outage_below=exact_below,
        )
    return out
