"""Monte Carlo ground truth.

Two levels of fidelity:

* channel-level trials draw per-subcarrier fading gains and evaluate the
  SNDR expression directly (fast, used to validate the closed forms);
* waveform-level trials run full OFDM blocks through both limiters, the
  tapped channels and the additive noise, with cyclic-prefix handling at the
  source and destination only (used to validate the Bussgang model itself).

Randomness is counter based: every (seed, stream_id) pair indexes an
independent Philox stream, trials are pre-partitioned into fixed chunks with
their own streams, and reductions are order insensitive. Results are
therefore bit identical no matter how work is scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bussgang import sel_apply
from .errors import ConfigError, DomainError
from .link_budget import LinkBudget, gain_fg, gain_vg, normalize_protocol, sndr
from .special_math import unitary_dft, unitary_idft

_CHUNK = 1 << 16
# spacing between derived stream ids; keeps nested derivations collision free
_STREAM_STRIDE = 0x1000


@dataclass(frozen=True)
class Rng:
    """Counter-based stream address: same (seed, stream_id) -> same draws."""

    seed: int
    stream_id: int = 0


def generator(rng: Rng) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=[rng.seed & 0xFFFFFFFFFFFFFFFF, rng.stream_id & 0xFFFFFFFFFFFFFFFF])
    )


def substream(rng: Rng, index: int) -> Rng:
    return Rng(seed=rng.seed, stream_id=rng.stream_id * _STREAM_STRIDE + index + 1)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-hop tap vectors and their per-subcarrier frequency responses."""

    taps_h1: np.ndarray
    taps_h2: np.ndarray
    freq_h1: np.ndarray
    freq_h2: np.ndarray
    normalization_mode: str


@dataclass(frozen=True)
class SimStats:
    n_trials: int
    n_outages: int
    p_hat: float
    ci_low: float
    ci_high: float
    zeta_hat: float | None = None
    eta_hat: float | None = None
    resid_corr: float | None = None


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% score interval; stays sane at p_hat near 0 or 1."""
    if n <= 0:
        return 0.0, 1.0
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


def _cgauss(gen, shape, var):
    if var == 0.0:
        return np.zeros(shape, dtype=complex)
    s = math.sqrt(var / 2.0)
    return s * (gen.standard_normal(shape) + 1j * gen.standard_normal(shape))


def gen_channel(l: int, n: int, mu1: float, mu2: float, mode: str = "statistical",
                rng: Rng = Rng(0)) -> ChannelRealization:
    """Draw one quasi-static channel pair with l taps over n subcarriers.

    statistical mode makes each subcarrier response exactly CN(0, mu); the
    unit_norm mode instead hard-normalizes the tap vector to total power n/l,
    which is kept for fidelity experiments despite biasing the per-subcarrier
    power to 1/l.
    """
    if not (1 <= l <= n):
        raise DomainError(f"need 1 <= l <= n, got l={l}, n={n}")
    if n & (n - 1):
        raise DomainError(f"n must be a power of two, got {n}")
    if mode not in ("statistical", "unit_norm"):
        raise DomainError(f"unknown normalization mode {mode!r}")
    gen = generator(rng)
    taps = []
    for mu in (mu1, mu2):
        if mode == "statistical":
            t = _cgauss(gen, l, n * mu / l)
        else:
            v = _cgauss(gen, l, mu / l)
            t = math.sqrt(n / l) * v / np.linalg.norm(v)
        taps.append(t)
    pad = np.zeros(n, dtype=complex)
    freqs = []
    for t in taps:
        buf = pad.copy()
        buf[:l] = t
        freqs.append(unitary_dft(buf))
    return ChannelRealization(
        taps_h1=taps[0], taps_h2=taps[1], freq_h1=freqs[0], freq_h2=freqs[1],
        normalization_mode=mode,
    )


def gen_qpsk_block(n: int, sigma_sq: float, rng: Rng) -> np.ndarray:
    if n < 1:
        raise DomainError("block length must be at least 1")
    gen = generator(rng)
    return _qpsk(gen, (n,), sigma_sq)


_QPSK_POINTS = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])


def _qpsk(gen, shape, sigma_sq):
    idx = gen.integers(0, 4, shape)
    return math.sqrt(sigma_sq / 2.0) * _QPSK_POINTS[idx]


def _convolve_taps(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Linear convolution along the last axis; taps loop keeps it vectorized."""
    l = taps.shape[0]
    out = np.zeros(x.shape[:-1] + (x.shape[-1] + l - 1,), dtype=complex)
    for m in range(l):
        out[..., m : m + x.shape[-1]] += taps[m] * x
    return out


def _cp_extend(block: np.ndarray, cp: int) -> np.ndarray:
    """Prepend the circular prefix; handles cp longer than the block."""
    n = block.shape[-1]
    reps, rem = divmod(cp, n)
    parts = ([block[..., n - rem :]] if rem else []) + [block] * (reps + 1)
    return np.concatenate(parts, axis=-1)


def waveform_chain(x_freq: np.ndarray, channel: ChannelRealization, budget: LinkBudget,
                   protocol: str, gen: np.random.Generator, cp_len: int | None = None) -> np.ndarray:
    """Push frequency-domain blocks (..., n) through the full two-hop chain.

    The cyclic prefix is long enough to absorb both hops, so only the source
    and destination touch it. The relay sees its received window, applies its
    gain per subcarrier (a scalar for fixed gain), rebuilds the prefix and
    clips; physically its gain stage is an idealized frequency-domain
    operation, which is the standard per-subcarrier model.
    """
    protocol = normalize_protocol(protocol)
    n = x_freq.shape[-1]
    l = channel.taps_h1.shape[0]
    if cp_len is None:
        cp_len = 2 * l + 1
    if cp_len <= 2 * l:
        raise ConfigError(f"cyclic prefix must exceed 2l = {2 * l} samples, got {cp_len}")
    cfg = budget.config
    n0 = cfg.n0
    # physical impulse responses; the 1/sqrt(n) makes the window DFT see
    # exactly freq_h as the per-subcarrier gain
    g1 = channel.taps_h1 / math.sqrt(n)
    g2 = channel.taps_h2 / math.sqrt(n)

    tx = _cp_extend(unitary_idft(x_freq), cp_len)
    tx = sel_apply(tx, budget.sel_s.p_max)
    rx1 = _convolve_taps(tx, g1)
    rx1 = rx1 + _cgauss(gen, rx1.shape, n0)

    window = rx1[..., cp_len : cp_len + n]
    if protocol == "fg":
        gains = gain_fg(budget)
    else:
        gains = gain_vg(budget, np.abs(channel.freq_h1) ** 2)
    relay_freq = gains * unitary_dft(window)
    relay_block = unitary_idft(relay_freq)
    relay_tx = sel_apply(_cp_extend(relay_block, cp_len), budget.sel_r.p_max)

    rx2 = _convolve_taps(relay_tx, g2)
    rx2 = rx2 + _cgauss(gen, rx2.shape, n0)
    return unitary_dft(rx2[..., cp_len : cp_len + n])


def run_waveform_trial(protocol: str, channel: ChannelRealization, budget: LinkBudget,
                       rng: Rng, cp_len: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """One OFDM block end to end; returns (sent symbols, received symbols)."""
    gen = generator(rng)
    n = channel.freq_h1.shape[0]
    x = _qpsk(gen, (1, n), budget.sel_s.sigma_sq)
    y = waveform_chain(x, channel, budget, protocol, gen, cp_len=cp_len)
    return x[0], y[0]


def estimate_bussgang(input_samples, output_samples) -> tuple[float, float, float]:
    """Least-squares gain, residual power, and leftover correlation.

    The residual correlation is zero by construction of the projection and is
    returned as a sanity figure.
    """
    x = np.asarray(input_samples, dtype=complex).ravel()
    y = np.asarray(output_samples, dtype=complex).ravel()
    if x.shape != y.shape or x.size < 2:
        raise DomainError("need two equal-length sample vectors of size >= 2")
    px = float(np.vdot(x, x).real)
    if px <= 0.0:
        raise DomainError("input power is zero")
    zeta_hat = complex(np.vdot(x, y)) / px
    resid = y - zeta_hat * x
    eta_hat = float(np.mean(np.abs(resid) ** 2))
    norm = np.linalg.norm(resid) * math.sqrt(px)
    resid_corr = float(abs(np.vdot(x, resid)) / norm) if norm > 0.0 else 0.0
    return float(zeta_hat.real), eta_hat, resid_corr


def measure_sndr(channel: ChannelRealization, budget: LinkBudget, protocol: str,
                 n_blocks: int, rng: Rng, batch: int = 256) -> np.ndarray:
    """Per-subcarrier SNDR of a fixed channel, measured over n_blocks blocks.

    Splits each subcarrier's received symbols into a projection onto the sent
    symbols (signal) and the residual (noise plus distortion).
    """
    if n_blocks < 100:
        raise DomainError("need at least 100 blocks for a stable split")
    n = channel.freq_h1.shape[0]
    sigma_sq = budget.sel_s.sigma_sq
    acc_xy = np.zeros(n, dtype=complex)
    acc_xx = np.zeros(n)
    acc_yy = np.zeros(n)
    done = 0
    idx = 0
    while done < n_blocks:
        b = min(batch, n_blocks - done)
        gen = generator(substream(rng, idx))
        x = _qpsk(gen, (b, n), sigma_sq)
        y = waveform_chain(x, channel, budget, protocol, gen)
        acc_xy += np.sum(np.conj(x) * y, axis=0)
        acc_xx += np.sum(np.abs(x) ** 2, axis=0)
        acc_yy += np.sum(np.abs(y) ** 2, axis=0)
        done += b
        idx += 1
    c = acc_xy / acc_xx
    # least-squares split; the projection eats one block of freedom
    resid_power = (acc_yy - np.abs(c) ** 2 * acc_xx) / (n_blocks - 1)
    resid_power = np.maximum(resid_power, 1e-300)
    return np.abs(c) ** 2 * sigma_sq / resid_power


def model_sndr(channel: ChannelRealization, budget: LinkBudget, protocol: str) -> np.ndarray:
    """Analytic per-subcarrier SNDR for a given channel realization."""
    return sndr(protocol, np.abs(channel.freq_h1) ** 2, np.abs(channel.freq_h2) ** 2, budget)


def _mc_counts(protocol, gammas, budget, n_trials, rng):
    """Outage counts per gamma over chunked, independently seeded draws."""
    gammas = np.asarray(gammas, dtype=float)
    counts = np.zeros(gammas.shape, dtype=np.int64)
    mu1, mu2 = budget.config.mu1, budget.config.mu2
    done = 0
    idx = 0
    while done < n_trials:
        m = min(_CHUNK, n_trials - done)
        gen = generator(substream(rng, idx))
        x = gen.exponential(mu1, m)
        y = gen.exponential(mu2, m)
        lam = sndr(protocol, x, y, budget)
        counts += np.count_nonzero(lam[None, :] <= gammas[:, None], axis=1)
        done += m
        idx += 1
    return counts


def mc_outage(protocol: str, gamma_th: float, budget: LinkBudget, n_trials: int,
              rng: Rng) -> SimStats:
    """Channel-level outage estimate with a Wilson 95% interval.

    Deterministic given (seed, stream partitioning); reusing the same rng
    across gamma values couples the draws, so estimates are monotone in
    gamma_th.
    """
    protocol = normalize_protocol(protocol)
    if n_trials < 1:
        raise DomainError("n_trials must be at least 1")
    if gamma_th < 0.0:
        raise DomainError("gamma_th must be non-negative")
    k = int(_mc_counts(protocol, [gamma_th], budget, n_trials, rng)[0])
    lo, hi = wilson_interval(k, n_trials)
    return SimStats(n_trials=n_trials, n_outages=k, p_hat=k / n_trials, ci_low=lo, ci_high=hi)


def mc_outage_sweep(protocol: str, gammas, budget: LinkBudget, n_trials: int,
                    rng: Rng) -> list[SimStats]:
    """Outage estimates for a whole gamma grid from one shared draw set."""
    protocol = normalize_protocol(protocol)
    if n_trials < 1:
        raise DomainError("n_trials must be at least 1")
    counts = _mc_counts(protocol, gammas, budget, n_trials, rng)
    out = []
    for k in counts:
        lo, hi = wilson_interval(int(k), n_trials)
        out.append(SimStats(n_trials=n_trials, n_outages=int(k), p_hat=int(k) / n_trials,
                            ci_low=lo, ci_high=hi))
    return out


def _pilot_sndr(channel: ChannelRealization, budget: LinkBudget, protocol: str,
                n_blocks: int, rng: Rng) -> np.ndarray:
    """Per-subcarrier SNDR with the signal coefficient taken from the model.

    Everything not captured by the linear coefficient (noise, distortion, and
    any model error in the coefficient itself) lands in the residual, so this
    split is conservative. The residual-power estimate carries an exact
    Gamma(n_blocks) kernel, which waveform_outage undoes on the analytic side.
    """
    n = channel.freq_h1.shape[0]
    gen = generator(rng)
    sigma_sq = budget.sel_s.sigma_sq
    if protocol == "fg":
        gains = gain_fg(budget)
    else:
        gains = gain_vg(budget, np.abs(channel.freq_h1) ** 2)
    c = budget.sel_s.zeta * budget.sel_r.zeta * gains * channel.freq_h1 * channel.freq_h2
    x = _qpsk(gen, (n_blocks, n), sigma_sq)
    y = waveform_chain(x, channel, budget, protocol, gen)
    resid = np.sum(np.abs(y - c * x) ** 2, axis=0)
    resid = np.maximum(resid, 1e-300)
    return np.abs(c) ** 2 * sigma_sq * n_blocks / resid


def estimator_consistent_outage(p_of_gamma, gamma: float, n_blocks: int) -> float:
    """Expected measured outage given the residual estimator's Gamma kernel.

    The measured SNDR is the true one divided by u/n_blocks with
    u ~ Gamma(n_blocks), so the prediction smears the analytic curve with
    that kernel.
    """
    b = float(n_blocks)
    half_width = 8.0 * math.sqrt(b)
    u = np.linspace(max(b - half_width, 1e-9), b + half_width, 401)
    log_pdf = (b - 1.0) * np.log(u) - u - math.lgamma(b)
    w = np.exp(log_pdf - np.max(log_pdf))
    w /= np.sum(w)
    return float(np.sum(w * np.array([p_of_gamma(gamma * ui / b) for ui in u])))


def waveform_outage(protocol: str, gammas, budget: LinkBudget, n_draws: int,
                    n_blocks: int, rng: Rng, l: int | None = None) -> list[SimStats]:
    """Full-waveform outage: measured per-subcarrier SNDR against thresholds.

    Each channel draw contributes the outage fraction across its subcarriers;
    the interval is a normal one on the draw-level means, which respects the
    within-draw correlation.
    """
    protocol = normalize_protocol(protocol)
    gammas = np.asarray(gammas, dtype=float)
    cfg = budget.config
    n = cfg.n_subcarriers
    l = cfg.n_taps if l is None else l
    sums = np.zeros(gammas.shape)
    sq_sums = np.zeros(gammas.shape)
    total = np.zeros(gammas.shape, dtype=np.int64)
    for d in range(n_draws):
        draw_rng = substream(rng, d)
        ch = gen_channel(l, n, cfg.mu1, cfg.mu2, rng=substream(draw_rng, 0))
        lam = _pilot_sndr(ch, budget, protocol, n_blocks, substream(draw_rng, 1))
        hits = lam[None, :] <= gammas[:, None]
        frac = np.mean(hits, axis=1)
        sums += frac
        sq_sums += frac * frac
        total += np.count_nonzero(hits, axis=1)
    mean = sums / n_draws
    var = np.maximum(sq_sums / n_draws - mean**2, 0.0)
    half = 1.959963984540054 * np.sqrt(var / n_draws)
    out = []
    for g_i in range(gammas.size):
        out.append(
            SimStats(
                n_trials=n_draws * n,
                n_outages=int(total[g_i]),
                p_hat=float(mean[g_i]),
                ci_low=float(max(0.0, mean[g_i] - half[g_i])),
                ci_high=float(min(1.0, mean[g_i] + half[g_i])),
            )
        )
    return out


def fg_stationarity_check(l: int, budget: LinkBudget, n_realizations: int, rng: Rng) -> float:
    """Spread of the relay limiter's input power across channel draws.

    Returns the coefficient of variation of the per-block mean power after
    fixed-gain amplification. Flat channels leave the full first-hop fading
    in this power; many taps average it away, which is what makes the
    stationary-Gaussian model of the relay input accurate.
    """
    if l < 1 or n_realizations < 2:
        raise DomainError("need l >= 1 and at least 2 realizations")
    cfg = budget.config
    n = cfg.n_subcarriers
    g = gain_fg(budget)
    powers = np.empty(n_realizations)
    for i in range(n_realizations):
        r = substream(rng, i)
        ch = gen_channel(l, n, cfg.mu1, cfg.mu2, rng=substream(r, 0))
        gen = generator(substream(r, 1))
        x = _qpsk(gen, (1, n), budget.sel_s.sigma_sq)
        cp = 2 * l + 1
        tx = sel_apply(_cp_extend(unitary_idft(x), cp), budget.sel_s.p_max)
        rx = _convolve_taps(tx, ch.taps_h1 / math.sqrt(n))
        rx = rx + _cgauss(gen, rx.shape, cfg.n0)
        window = g * rx[..., cp : cp + n]
        powers[i] = float(np.mean(np.abs(window) ** 2))
    return float(np.std(powers) / np.mean(powers))
