"""Soft-limiter characterization: Bussgang triple vs clip ratio.

The limiter caps the envelope at sqrt(p_max) and keeps the phase. For a
Gaussian input the output is a scaled replica plus uncorrelated distortion;
this script tabulates the closed-form gain/distortion/average-power triple
against estimates from sampled waveforms, and shows the residual really is
uncorrelated with the input.

Run: python demos/limiter_coefficients.py
"""

import numpy as np

from afrelay import Rng, estimate_bussgang, sel_apply, sel_params
from afrelay.simulator import generator


def main():
    n = 1 << 20
    gen = generator(Rng(2024, 0))
    x = (gen.standard_normal(n) + 1j * gen.standard_normal(n)) / np.sqrt(2.0)

    print("clip ratio r = p_max/sigma^2, unit input power, 2^20 samples")
    print(f"{'r':>6} {'zeta':>10} {'zeta_hat':>10} {'eta':>12} {'eta_hat':>12} {'|corr|':>9}")
    for r in (0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0):
        p = sel_params(1.0, r)
        y = sel_apply(x, r)
        zeta_hat, eta_hat, corr = estimate_bussgang(x, y)
        print(f"{r:6.1f} {p.zeta:10.6f} {zeta_hat:10.6f} "
              f"{p.eta:12.4e} {eta_hat:12.4e} {corr:9.1e}")

    print()
    print("sanity: average transmit power never exceeds the clip power")
    for r in (0.5, 2.0, 8.0):
        p = sel_params(3.0, 3.0 * r)
        print(f"  r={r:4.1f}: p_avg={p.p_avg:.4f}  min(sigma^2, p_max)={min(p.sigma_sq, p.p_max):.4f}")


if __name__ == "__main__":
    main()
