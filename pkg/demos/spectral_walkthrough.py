"""Walk through the Fourier codec on one synthetic activation matrix.

Run:  python demos/spectral_walkthrough.py
"""

import numpy as np

from actcomp.fourier import CodecConfig, compress_fourier, decompress_fourier, passband_mask
from actcomp.metrics import energy_captured, reconstruction_error, spectral_profile
from actcomp.spectral import fft2
from actcomp.tensor import SynthSpec, generate_synthetic


def main():
    # A smooth 256 x 512 "activation": 8 low-frequency modes plus a little noise.
    A = generate_synthetic(256, 512, SynthSpec(mode_count=8, decay_exponent=2.0, noise_sigma=0.01, seed=3))
    print(f"activation {A.rows}x{A.cols}, {A.nbytes} bytes")

    # Most of the energy sits in a small low-frequency block.
    print("\nblock fraction -> energy fraction")
    for frac, energy in spectral_profile(A, 8):
        print(f"  {frac:5.3f}  {energy:.6f}")

    # Compress at a few ratios. The identity rel_err^2 = 1 - captured energy
    # holds up to float32 rounding of the stored coefficients.
    spec = fft2(A)
    print("\nratio  block      bytes    rel_err   sqrt(1-E)")
    for r in (4, 8, 16, 32):
        p = compress_fourier(A, CodecConfig(r))
        err = reconstruction_error(A, decompress_fourier(p))
        e = energy_captured(spec, passband_mask(A.rows, A.cols, p.ks, p.kd))
        print(f"{r:5d}  {p.ks:3d}x{p.kd:<4d} {p.nbytes:8d}  {err:.6f}  {np.sqrt(max(0.0, 1 - e)):.6f}")


if __name__ == "__main__":
    main()
