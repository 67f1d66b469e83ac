"""Critical thresholds, gap, ordinates, and the transition itself."""

import math

import numpy as np
import pytest

from afrelay.errors import DomainError
from afrelay.epsilon_critical import (
    fg_advantage_factor,
    ordinate,
    report,
    threshold,
    threshold_gap,
)
from afrelay.link_budget import NetworkConfig, build_budget
from afrelay.outage import outage_fg_floor, outage_vg, small_gamma_expansion

FIG2_CFG = NetworkConfig(clip_ratio_s=5.0, clip_ratio_r=8.0)
FIG3_CFG = NetworkConfig(clip_ratio_s=math.inf, clip_ratio_r=5.0)


def scaled(cfg, p_s):
    return NetworkConfig(
        mu1=cfg.mu1, mu2=cfg.mu2, n0=cfg.n0, p_s=p_s, p_ratio=cfg.p_ratio,
        clip_ratio_s=cfg.clip_ratio_s, clip_ratio_r=cfg.clip_ratio_r,
    )


class TestThreshold:
    def test_reference_values(self):
        # frozen pre-build by composing the limiter oracle values
        b2 = build_budget(FIG2_CFG)
        assert threshold("fg", b2) == pytest.approx(1907.188685, rel=1e-8)
        assert threshold("vg", b2) == pytest.approx(1844.246194, rel=1e-8)
        assert 10 * math.log10(threshold("fg", b2)) == pytest.approx(32.8039, abs=1e-3)
        assert 10 * math.log10(threshold("vg", b2)) == pytest.approx(32.6582, abs=1e-3)
        b3 = build_budget(FIG3_CFG)
        assert threshold("fg", b3) == math.inf
        assert threshold("vg", b3) == pytest.approx(1907.188685, rel=1e-8)

    def test_relay_linear_thresholds_coincide(self):
        b = build_budget(NetworkConfig(clip_ratio_s=5.0))
        assert threshold("fg", b) == pytest.approx(threshold("vg", b), rel=1e-12)

    def test_invariant_to_power_scaling(self):
        for p_s in (1.0, 100.0, 1e7):
            b = build_budget(scaled(FIG2_CFG, p_s))
            assert threshold("vg", b) == pytest.approx(1844.246194, rel=1e-8)

    def test_vg_below_fg_randomized(self):
        rng = np.random.default_rng(61)
        for _ in range(200):
            cfg = NetworkConfig(
                mu1=float(rng.uniform(0.2, 4.0)),
                mu2=float(rng.uniform(0.2, 4.0)),
                p_s=float(rng.uniform(0.1, 50.0)),
                p_ratio=float(rng.uniform(0.2, 5.0)),
                clip_ratio_s=float(rng.uniform(0.5, 12.0)),
                clip_ratio_r=float(rng.uniform(0.5, 12.0)),
            )
            b = build_budget(cfg)
            assert threshold("vg", b) <= threshold("fg", b) + 1e-9


class TestGap:
    def test_equals_threshold_difference(self):
        rng = np.random.default_rng(62)
        for _ in range(100):
            cfg = NetworkConfig(
                p_ratio=float(rng.uniform(0.2, 5.0)),
                clip_ratio_s=float(rng.uniform(0.5, 12.0)),
                clip_ratio_r=float(rng.uniform(0.5, 12.0)),
            )
            b = build_budget(cfg)
            diff = threshold("fg", b) - threshold("vg", b)
            assert threshold_gap(b) == pytest.approx(diff, rel=1e-10)

    def test_reference_value(self):
        assert threshold_gap(build_budget(FIG2_CFG)) == pytest.approx(62.942492, rel=1e-6)

    def test_zero_when_relay_linear(self):
        assert threshold_gap(build_budget(NetworkConfig(clip_ratio_s=5.0))) == 0.0

    def test_nonnegative(self):
        rng = np.random.default_rng(63)
        for _ in range(100):
            cfg = NetworkConfig(
                clip_ratio_s=float(rng.uniform(0.5, 15.0)),
                clip_ratio_r=float(rng.uniform(0.5, 15.0)),
            )
            assert threshold_gap(build_budget(cfg)) >= 0.0

    def test_linear_source_rejected(self):
        with pytest.raises(DomainError):
            threshold_gap(build_budget(FIG3_CFG))


class TestOrdinate:
    def test_vg_scaling_law(self):
        # ordinate ~ eps^2 log(1/eps^2): log-log slope just under 2
        b = build_budget(FIG2_CFG)
        eps = np.array([1e-2, 1e-3, 1e-4])
        vals = np.array([ordinate("vg", b, eps_star=float(e)) for e in eps])
        slope = np.polyfit(np.log(eps), np.log(vals), 1)[0]
        assert 1.8 <= slope <= 2.1

    def test_fg_linear_relay_scaling(self):
        # relay linear: the log term is all there is, O(eps log(1/eps))
        b = build_budget(NetworkConfig(clip_ratio_s=5.0))
        v1 = ordinate("fg", b, eps_star=1e-3)
        v2 = ordinate("fg", b, eps_star=1e-4)
        slope = (math.log(v1) - math.log(v2)) / (math.log(1e-3) - math.log(1e-4))
        assert 0.85 <= slope <= 1.0

    def test_fg_finite_relay_eps_flattens(self):
        # relay-dominant distortion: the mu2/eps_R term is eps-free
        b = build_budget(NetworkConfig(clip_ratio_s=8.0, clip_ratio_r=5.0))
        vals = [ordinate("fg", b, eps_star=e) for e in (1e-2, 1e-3, 1e-4)]
        assert max(vals) / min(vals) < 1.2

    def test_out_of_regime(self):
        b = build_budget(FIG2_CFG)
        with pytest.raises(Exception):
            ordinate("vg", b, eps_star=1e3)

    def test_fg_requires_source_distortion(self):
        with pytest.raises(DomainError):
            ordinate("fg", build_budget(FIG3_CFG), eps_star=1e-3)


class TestAdvantageFactor:
    def test_in_unit_interval_and_matches_floor(self):
        b = build_budget(FIG2_CFG)
        th_vg = threshold("vg", b)
        g = th_vg * 1.001
        f = fg_advantage_factor(g, b)
        assert 0.0 < f < 1.0
        # near the lower edge the factor is the fixed-gain floor evaluated there
        assert f == pytest.approx(outage_fg_floor(g, b), rel=5e-3)

    def test_increasing_in_gamma(self):
        b = build_budget(FIG2_CFG)
        th_vg, th_fg = threshold("vg", b), threshold("fg", b)
        gs = np.linspace(th_vg * 1.001, th_fg * 0.999, 20)
        vals = [fg_advantage_factor(float(g), b) for g in gs]
        assert all(y > x for x, y in zip(vals, vals[1:]))

    def test_outside_interval_rejected(self):
        b = build_budget(FIG2_CFG)
        with pytest.raises(DomainError):
            fg_advantage_factor(threshold("vg", b) * 0.5, b)
        with pytest.raises(DomainError):
            fg_advantage_factor(threshold("fg", b) * 1.5, b)


class TestReport:
    def test_linear_network_flags(self):
        rep = report(build_budget(NetworkConfig()))
        assert rep["fg"].no_phase_transition and rep["vg"].no_phase_transition
        assert rep["fg"].gamma_crit == math.inf
        assert rep["fg"].ordinate is None

    def test_clipped_network(self):
        rep = report(build_budget(scaled(FIG2_CFG, 1e7)))
        assert rep["fg"].gamma_crit == pytest.approx(1907.188685, rel=1e-8)
        assert rep["vg"].gamma_crit == pytest.approx(1844.246194, rel=1e-8)
        assert rep["vg"].ordinate is not None and rep["vg"].ordinate > 0.0
        assert rep["fg"].threshold_gap == pytest.approx(62.942492, rel=1e-6)
        assert 0.0 < rep["fg"].fg_advantage_factor < 1.0

    def test_relay_only_clipping(self):
        rep = report(build_budget(scaled(FIG3_CFG, 1e6)))
        assert rep["fg"].no_phase_transition
        assert not rep["vg"].no_phase_transition
        assert rep["fg"].threshold_gap is None

    def test_exact_outage_attachment(self):
        rep = report(build_budget(scaled(FIG2_CFG, 1e7)), include_exact_outage=True)
        assert 0.0 < rep["vg"].exact_outage_below < 1.0


class TestPhaseTransition:
    """The transition on both sides of the variable-gain threshold.

    Above the threshold outage is identically 1 at every noise level. Below,
    the outage falls toward the small-gamma line's scale as eps_star shrinks
    (at 40 dB eps_star ~ 0.19 and the drop has not yet formed, which is the
    expected picture).
    """

    @pytest.mark.parametrize("snr_db", [40, 60, 80])
    def test_above_threshold_sure_outage(self, snr_db):
        b = build_budget(scaled(FIG2_CFG, 10.0 ** (snr_db / 10.0)))
        assert outage_vg(threshold("vg", b) * 1.05, b).p_outage == 1.0

    @pytest.mark.parametrize("snr_db", [60, 80])
    def test_below_threshold_drops_to_line_scale(self, snr_db):
        b = build_budget(scaled(FIG2_CFG, 10.0 ** (snr_db / 10.0)))
        th = threshold("vg", b)
        below = outage_vg(th * 0.95, b).p_outage
        line = small_gamma_expansion("vg", th * 0.95, b)
        # the 0.95 offset costs a factor ~(1-d)/d ~ 19 against the line
        assert below <= 25.0 * line
        assert below < 0.1

    def test_below_value_shrinks_with_snr(self):
        th = threshold("vg", build_budget(FIG2_CFG))
        vals = []
        for snr_db in (40, 60, 80):
            b = build_budget(scaled(FIG2_CFG, 10.0 ** (snr_db / 10.0)))
            vals.append(outage_vg(th * 0.95, b).p_outage)
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 1e-3
