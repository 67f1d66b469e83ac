"""Network parameterization and the per-subcarrier SNDR.

A two-hop amplify-and-forward link: the source transmits an OFDM waveform
through a soft limiter, hop 1 adds Rayleigh fading and noise, the relay
amplifies (fixed gain from the average received power, or variable gain from
the instantaneous per-subcarrier gain), passes through its own limiter, and
hop 2 delivers to the destination. Everything downstream (outage, critical
thresholds) consumes the LinkBudget built here.

Conventions: gamma values and channel gains are linear, powers in watts.
Under fixed clip ratios all node powers scale with the source power p_s, so
the tilde fields (quantities divided by p_s) are scale invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bussgang import SelParams, sel_params, sigma_for_target_power
from .errors import DomainError

PROTOCOLS = ("fg", "vg")


def normalize_protocol(protocol: str) -> str:
    p = str(protocol).lower()
    if p not in PROTOCOLS:
        raise DomainError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")
    return p


@dataclass(frozen=True)
class NetworkConfig:
    """Static network parameters.

    mu1/mu2 are per-hop mean channel gains, n0 the noise power, p_s the source
    average transmit power, p_ratio the relay-to-source power ratio, and the
    clip ratios are p_max/sigma_sq at each node (inf = no clipping).
    """

    mu1: float = 1.0
    mu2: float = 1.0
    n0: float = 1.0
    p_s: float = 1.0
    p_ratio: float = 1.0
    clip_ratio_s: float = math.inf
    clip_ratio_r: float = math.inf
    n_subcarriers: int = 512
    n_taps: int = 32

    def __post_init__(self):
        for name in ("mu1", "mu2", "p_s", "p_ratio"):
            if not (getattr(self, name) > 0.0):
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not (self.n0 >= 0.0):
            raise DomainError(f"n0 must be non-negative, got {self.n0!r}")
        for name in ("clip_ratio_s", "clip_ratio_r"):
            if not (getattr(self, name) > 0.0):
                raise DomainError(f"{name} must be positive or inf, got {getattr(self, name)!r}")
        if self.n_subcarriers < 1 or self.n_taps < 1:
            raise DomainError("n_subcarriers and n_taps must be at least 1")


@dataclass(frozen=True)
class LinkBudget:
    """Every derived symbol of a configured network.

    sigma1_bar/sigma2_bar are the average per-hop SNRs, eps_s/eps_r the
    noise-to-distortion ratios per node (inf for a linear node), eps_star
    their minimum. The gamma-dependent critical second-hop SNR is exposed as
    the method sigma_r_bar.
    """

    config: NetworkConfig
    sel_s: SelParams
    sel_r: SelParams
    sigma1_bar: float
    sigma2_bar: float
    eps_s: float
    eps_r: float
    eps_star: float
    tilde_sigma_s_sq: float
    tilde_sigma_r_sq: float
    tilde_eta_s: float
    tilde_eta_r: float

    @property
    def p_s(self) -> float:
        return self.config.p_s

    @property
    def p_r(self) -> float:
        return self.config.p_ratio * self.config.p_s

    @property
    def n0(self) -> float:
        return self.config.n0

    def sigma_r_bar(self, gamma_th: float) -> float:
        """Average critical second-hop SNR; outage is sure once this is <= 0."""
        if self.eps_r == math.inf:
            return self.sigma2_bar
        return self.sigma2_bar - (1.0 + gamma_th) * self.config.mu2 / self.eps_r


def build_budget(cfg: NetworkConfig) -> LinkBudget:
    """Derive limiter triples and normalized quantities from a configuration.

    Each node's limiter input power is sized so its average transmit power
    hits the configured target (p_s at the source, p_ratio*p_s at the relay).
    """
    p_r = cfg.p_ratio * cfg.p_s
    sigma_s_sq = sigma_for_target_power(cfg.p_s, cfg.clip_ratio_s)
    sigma_r_sq = sigma_for_target_power(p_r, cfg.clip_ratio_r)
    sel_s = sel_params(sigma_s_sq, cfg.clip_ratio_s * sigma_s_sq)
    sel_r = sel_params(sigma_r_sq, cfg.clip_ratio_r * sigma_r_sq)
    eps_s = cfg.n0 / sel_s.eta if sel_s.eta > 0.0 else math.inf
    eps_r = cfg.n0 / sel_r.eta if sel_r.eta > 0.0 else math.inf
    return LinkBudget(
        config=cfg,
        sel_s=sel_s,
        sel_r=sel_r,
        sigma1_bar=cfg.p_s * cfg.mu1 / cfg.n0 if cfg.n0 > 0.0 else math.inf,
        sigma2_bar=p_r * cfg.mu2 / cfg.n0 if cfg.n0 > 0.0 else math.inf,
        eps_s=eps_s,
        eps_r=eps_r,
        eps_star=min(eps_s, eps_r),
        tilde_sigma_s_sq=sigma_s_sq / cfg.p_s,
        tilde_sigma_r_sq=sigma_r_sq / cfg.p_s,
        tilde_eta_s=sel_s.eta / cfg.p_s,
        tilde_eta_r=sel_r.eta / cfg.p_s,
    )


def gain_fg(budget: LinkBudget) -> float:
    """Fixed relay amplification, sized from the average received power."""
    cfg = budget.config
    return math.sqrt(budget.sel_r.sigma_sq / (cfg.p_s * cfg.mu1 + cfg.n0))


def gain_vg(budget: LinkBudget, h1_gain):
    """Variable relay amplification for instantaneous first-hop gain |h1|^2."""
    h1_gain = np.asarray(h1_gain, dtype=float)
    if np.any(h1_gain < 0.0):
        raise DomainError("h1_gain must be non-negative")
    cfg = budget.config
    out = np.sqrt(budget.sel_r.sigma_sq / (cfg.p_s * h1_gain + cfg.n0))
    return float(out) if out.ndim == 0 else out


def sndr(protocol: str, h1_gain, h2_gain, budget: LinkBudget):
    """Instantaneous per-subcarrier SNDR for given channel gains.

    Accepts scalars or broadcastable arrays. Written with the inverse relay
    gain so zero-gain and zero-noise corners produce no intermediate
    infinities; the degenerate all-zero case returns 0 rather than faulting.
    """
    protocol = normalize_protocol(protocol)
    x = np.asarray(h1_gain, dtype=float)
    y = np.asarray(h2_gain, dtype=float)
    if np.any(x < 0.0) or np.any(y < 0.0):
        raise DomainError("channel gains must be non-negative")
    s, r = budget.sel_s, budget.sel_r
    cfg = budget.config
    n0 = cfg.n0
    if protocol == "fg":
        inv_g2 = (cfg.p_s * cfg.mu1 + n0) / r.sigma_sq
    else:
        inv_g2 = (cfg.p_s * x + n0) / r.sigma_sq
    zr2 = r.zeta**2
    num = s.sigma_sq * s.zeta**2 * zr2 * x * y
    den = y * (n0 + s.eta * x) * zr2 + (y * r.eta + n0) * inv_g2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.asarray(num / den)
    # den = 0 means a noiseless, distortion-free path: infinite SNDR when any
    # signal gets through, 0 for the all-zero degenerate case.
    out = np.where(den > 0.0, out, np.where(num > 0.0, np.inf, 0.0))
    return float(out) if out.ndim == 0 else out


def normalized_sndr_coeffs(protocol: str, h1_gain, h2_gain, budget: LinkBudget):
    """Coefficients (a, lcoef, q, numerator_scale) of the eps_star-normalized SNDR.

    The SNDR factorizes as numerator_scale / (a + lcoef*eps_star + q*eps_star^2)
    exactly, which isolates how performance degrades as the network leaves the
    distortion-limited regime. Undefined when both nodes are linear.
    """
    protocol = normalize_protocol(protocol)
    x = float(h1_gain)
    y = float(h2_gain)
    if x < 0.0 or y < 0.0:
        raise DomainError("channel gains must be non-negative")
    b = budget
    eta_max = max(b.tilde_eta_s, b.tilde_eta_r)
    if eta_max <= 0.0:
        raise DomainError("normalized SNDR requires distortion at one node")
    sr2zr2 = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    num_core = b.tilde_sigma_s_sq * b.sel_s.zeta**2 * sr2zr2
    mu1 = b.config.mu1
    p_ratio = b.config.p_ratio
    if protocol == "fg":
        a = b.tilde_eta_r / eta_max + sr2zr2 * x * b.tilde_eta_s / (eta_max * mu1)
        lcoef = 1.0 / y + p_ratio / mu1
        q = eta_max / (mu1 * y)
        scale = num_core * x / (mu1 * eta_max)
    else:
        a = (b.tilde_eta_r + sr2zr2 * b.tilde_eta_s) / eta_max
        lcoef = 1.0 / y + p_ratio / x
        q = eta_max / (x * y)
        scale = num_core / eta_max
    return a, lcoef, q, scale


def asymptotic_sndr(protocol: str, h1_gain, budget: LinkBudget):
    """Distortion-limited SNDR limit (noise power to zero at fixed clip ratios).

    Deterministic for the variable-gain protocol; for fixed gain it keeps a
    first-hop dependence unless the relay is the only distorting node.
    """
    protocol = normalize_protocol(protocol)
    b = budget
    if max(b.tilde_eta_s, b.tilde_eta_r) <= 0.0:
        raise DomainError("asymptotic SNDR is infinite for a linear network")
    sr2zr2 = b.tilde_sigma_r_sq * b.sel_r.zeta**2
    num_core = b.tilde_sigma_s_sq * b.sel_s.zeta**2 * sr2zr2
    if protocol == "vg":
        return num_core / (b.tilde_eta_r + sr2zr2 * b.tilde_eta_s)
    x = np.asarray(h1_gain, dtype=float)
    if np.any(x < 0.0):
        raise DomainError("h1_gain must be non-negative")
    mu1 = b.config.mu1
    den = (b.tilde_eta_r + sr2zr2 * b.tilde_eta_s * x / mu1) * mu1
    out = np.divide(num_core * x, den, out=np.zeros_like(num_core * x + den), where=den > 0.0)
    return float(out) if out.ndim == 0 else out
