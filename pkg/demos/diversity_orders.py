"""High-power outage slopes: where clipping destroys diversity.

Relay distortion pins the fixed-gain outage to a floor (slope 0) while
variable gain keeps decaying with slope 1; source-only distortion leaves
slope 1 for both. The script fits the slopes over the top decade of a
40..80 dB power sweep and shows the fixed-gain floor forming.

Run: python demos/diversity_orders.py
"""

import numpy as np

from afrelay import NetworkConfig, build_budget, diversity_fit, exact_outage, outage_fg_floor


def main():
    grid = 10.0 ** (np.arange(40.0, 80.1, 2.5) / 10.0)
    gamma = 1.0
    cases = [
        ("vg, relay clipping (r=5)", "vg", NetworkConfig(clip_ratio_r=5.0)),
        ("vg, source clipping (r=5)", "vg", NetworkConfig(clip_ratio_s=5.0)),
        ("fg, relay clipping (r=5)", "fg", NetworkConfig(clip_ratio_r=5.0)),
        ("fg, source clipping (r=5)", "fg", NetworkConfig(clip_ratio_s=5.0)),
    ]
    print(f"{'case':<28} {'slope':>7} {'r^2':>7}")
    for name, proto, cfg in cases:
        fit = diversity_fit(proto, gamma, cfg, grid)
        print(f"{name:<28} {fit.slope:7.3f} {fit.r_squared:7.4f}")

    print()
    print("fixed-gain floor with relay clipping (gamma = 0 dB):")
    cfg = NetworkConfig(clip_ratio_r=5.0)
    floor = outage_fg_floor(gamma, build_budget(cfg))
    print(f"{'P_S/N_0 [dB]':>13} {'P_o':>12}   floor = {floor:.4e}")
    for snr_db in (40.0, 50.0, 60.0, 70.0, 80.0):
        b = build_budget(NetworkConfig(clip_ratio_r=5.0, p_s=10.0 ** (snr_db / 10.0)))
        print(f"{snr_db:13.0f} {exact_outage('fg', gamma, b):12.4e}")


if __name__ == "__main__":
    main()
