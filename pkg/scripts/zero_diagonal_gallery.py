"""Sample zero-diagonal wavepackets and their phase-space portraits to CSV.

Produces, for each index in a small gallery:

* wavepacket_<n1><n2>.csv      time-domain samples (t1, t2, re, im, abs)
* spectrogram_<n1><n2>.csv     |STFT|^2 against the ground wavepacket on a
                               coarse 4-axis grid slice (x1, x2, w1, w2 fixed
                               to the w = 0 plane for plotting)

The wavepacket moduli depend on the quadratic form xi = t1^2 - sqrt(2) t1 t2
+ t2^2 alone, which the gallery makes visible.
"""

import numpy as np

from locspec.hagedorn import wavepacket_eval, zero_diagonal_frame
from locspec.phasespace import hagedorn_stft_closed


def main() -> None:
    frame = zero_diagonal_frame()
    ax = np.linspace(-3.0, 3.0, 121)
    mesh = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1)
    flat = mesh.reshape(-1, 2)
    for n in [(0, 0), (1, 0), (2, 1), (3, 1)]:
        vals = wavepacket_eval((frame, n), flat)
        name = f"wavepacket_{n[0]}{n[1]}.csv"
        with open(name, "w") as fh:
            fh.write("t1,t2,re,im,abs\n")
            for p, v in zip(flat, vals):
                fh.write(f"{p[0]:.17g},{p[1]:.17g},{v.real:.17g},"
                         f"{v.imag:.17g},{abs(v):.17g}\n")
        print("wrote", name)

        z = np.zeros(flat.shape, dtype=complex)
        z[:, 0] = flat[:, 0] + 0j
        z[:, 1] = flat[:, 1] + 0j
        spec = np.abs(hagedorn_stft_closed(n, (0, 0), frame, z)) ** 2
        name = f"spectrogram_{n[0]}{n[1]}.csv"
        with open(name, "w") as fh:
            fh.write("x1,x2,spectrogram\n")
            for p, v in zip(flat, spec):
                fh.write(f"{p[0]:.17g},{p[1]:.17g},{v:.17g}\n")
        print("wrote", name)


if __name__ == "__main__":
    main()
