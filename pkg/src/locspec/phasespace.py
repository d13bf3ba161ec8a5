"""Phase-space transforms on grids and their Laguerre-type closed forms.

Conventions (fixed throughout, phases included):

* STFT          V_g f(x, omega) = int f(t) conj(g(t - x)) e^{-2 pi i omega t} dt
* Wigner        W(f, g)(x, omega) = 2^d e^{4 pi i <x, omega>} V_{check g} f(2x, 2 omega)
* Hermite STFT  V_{phi_k} phi_n(z) = prod_j e^{-i pi x_j omega_j}
                  e^{-pi |z_j|^2 / 2} conj(H_{n_j, k_j}(z_j))
* Cohen class   Q_a(f, g) = W(f, g) * a      (FFT convolution, zero-padded)
* Weyl pairing  <L_F phi_n, phi_m> = int F(z) W(phi_n, phi_m)(z) dz
* Fourier-Wigner  FW(S)(z) = e^{-pi i <x, omega>} tr(pi(-z) S)

Grid transforms are provided for d <= 2; the closed forms work in any
dimension.  Grid STFT/Wigner use direct kernel contraction against the
sampled signals (the uniform Riemann sum is spectrally accurate for the
fast-decaying inputs used here).
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .grids import GridFunction, PhaseGrid
from .specfun import DomainError, as_multi_index, complex_hermite, index_order, laguerre
from .symplectic import LagrangianFrame

__all__ = [
    "BoundaryMassWarning", "sample_time", "hermite_samples", "wavepacket_samples",
    "stft", "wigner", "stft_radial", "hermite_stft_closed", "hermite_wigner_closed",
    "hagedorn_stft_closed", "hagedorn_wigner_closed", "cohen_class",
    "weyl_matrix_element", "fourier_wigner", "heat_convolution_closed",
    "spectrogram_point", "gaussian_symbol",
]


class BoundaryMassWarning(UserWarning):
    """Integrand carries non-negligible mass on the grid boundary."""


def _axis_points(z, d):
    """Normalize z to complex array of shape (..., d)."""
    z = np.asarray(z, dtype=complex)
    if d == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.shape[-1] != d:
        raise DomainError(f"points have {z.shape[-1]} complex coordinates, need {d}")
    return z


def sample_time(fn, grid: PhaseGrid) -> np.ndarray:
    """Sample a time-domain callable on the grid's time lattice ((N,)*d array)."""
    ax = grid.axis()
    if grid.d == 1:
        return np.asarray(fn(ax), dtype=complex)
    mesh = np.stack(np.meshgrid(*([ax] * grid.d), indexing="ij"), axis=-1)
    return np.asarray(fn(mesh), dtype=complex)


def hermite_samples(k, grid: PhaseGrid) -> np.ndarray:
    """Product Hermite function phi_k sampled on the time lattice."""
    from .specfun import hermite_product
    k = as_multi_index(k)
    return sample_time(lambda t: hermite_product(k, t), grid)


def wavepacket_samples(frame: LagrangianFrame, k, grid: PhaseGrid) -> np.ndarray:
    from .hagedorn import wavepacket_eval
    return sample_time(lambda t: wavepacket_eval((frame, k), t), grid)


def _shift_matrix(values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """values[offsets] with out-of-range offsets reading as zero."""
    n = values.shape[0]
    valid = (offsets >= 0) & (offsets < n)
    picked = values[np.clip(offsets, 0, n - 1)]
    return np.where(valid, picked, 0.0)


def _boundary_report(out: GridFunction, what: str) -> GridFunction:
    """Attach the boundary-mass diagnostic: warn when a transform's result
    keeps mass on the outermost grid ring (insufficient extent or aliasing)."""
    bmass = out.boundary_mass()
    if bmass > 1e-6:
        warnings.warn(f"{what} keeps {bmass:.2e} of its mass on the grid "
                      "boundary; increase the extent", BoundaryMassWarning)
    return out


def stft(f, g, grid: PhaseGrid) -> GridFunction:
    """Grid STFT of sampled f against sampled window g (d <= 2).

    f and g live on the time lattice grid.axis()^d; the result is sampled on
    the full 2d phase grid.  Shifted windows are zero-extended, which is
    exact at the stated extents for the Gaussian-decay signals this library
    produces.  A boundary-mass diagnostic is reported with the result.
    """
    if grid.d > 2:
        raise DomainError("grid STFT implemented for d <= 2")
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != (grid.points,) * grid.d or g.shape != f.shape:
        raise DomainError(
            f"signals must have shape {(grid.points,) * grid.d}, got {f.shape}/{g.shape}")
    n = grid.points
    t = grid.axis()
    kernel = np.exp(-2j * np.pi * np.outer(t, t))  # (time, frequency)
    idx = np.arange(n)
    if grid.d == 1:
        offsets = idx[None, :] - idx[:, None] + n // 2        # (x, time)
        windows = _shift_matrix(g, offsets)
        amplitude = f[None, :] * np.conj(windows)
        values = grid.step * amplitude @ kernel
        return _boundary_report(GridFunction(grid=grid, values=values), "STFT")
    # d = 2: iterate the first position axis, contract the rest with BLAS
    out = np.empty(grid.shape, dtype=complex)
    off = idx[None, :] - idx[:, None] + n // 2                # (shift, time)
    for i1 in range(n):
        rows = _shift_matrix(g, off[i1])                      # g[t1 - x1, t2]
        gathered = np.empty((n, n, n), dtype=complex)         # (x2, t1, t2)
        for i2 in range(n):
            gathered[i2] = _shift_matrix(rows.T, off[i2]).T   # g[t1 - x1, t2 - x2]
        amp = np.conj(gathered) * f[None, :, :]
        tmp = np.tensordot(amp, kernel, axes=(1, 0))          # (x2, t2, w1)
        out[i1] = (grid.step ** 2) * np.tensordot(tmp, kernel, axes=(1, 0))
    return _boundary_report(GridFunction(grid=grid, values=out), "STFT")


def wigner(f, g, grid: PhaseGrid) -> GridFunction:
    """Cross-Wigner distribution of sampled f, g through the STFT identity."""
    if grid.d > 2:
        raise DomainError("grid Wigner implemented for d <= 2")
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    n = grid.points
    t = grid.axis()
    kernel2 = np.exp(-4j * np.pi * np.outer(t, t))            # doubled frequencies
    idx = np.arange(n)
    phase1 = np.exp(4j * np.pi * np.outer(t, t))
    if grid.d == 1:
        offsets = 2 * idx[:, None] - idx[None, :]             # g(2x - t)
        windows = _shift_matrix(g, offsets)
        amplitude = f[None, :] * np.conj(windows)
        values = 2.0 * grid.step * phase1 * (amplitude @ kernel2)
        return _boundary_report(GridFunction(grid=grid, values=values),
                                "Wigner distribution")
    out = np.empty(grid.shape, dtype=complex)
    off = 2 * idx[:, None] - idx[None, :]
    for i1 in range(n):
        rows = _shift_matrix(g, off[i1])                      # g[2x1 - t1, t2]
        gathered = np.empty((n, n, n), dtype=complex)         # (x2, t1, t2)
        for i2 in range(n):
            gathered[i2] = _shift_matrix(rows.T, off[i2]).T   # g[2x1 - t1, 2x2 - t2]
        amp = np.conj(gathered) * f[None, :, :]
        tmp = np.tensordot(amp, kernel2, axes=(1, 0))         # (x2, t2, w1)
        out[i1] = (grid.step ** 2) * np.tensordot(tmp, kernel2, axes=(1, 0))
    out = 4.0 * out * phase1[:, None, :, None] * phase1[None, :, None, :]
    return _boundary_report(GridFunction(grid=grid, values=out),
                            "Wigner distribution")


def stft_radial(n: int, k: int, r):
    """Radial profile rho_{n,k}(r) of the Hermite-window STFT of a Hermite function.

    rho_{n,k}(r) = sqrt(lo!/hi! pi^{hi-lo}) r^{hi-lo} L_lo^{hi-lo}(pi r^2)
    e^{-pi r^2/2} with lo = min(n,k), hi = max(n,k); |V_{phi_k} phi_n(z)|
    equals |rho_{n,k}(|z|)| in each coordinate.
    """
    lo, hi = min(n, k), max(n, k)
    r = np.asarray(r, dtype=float)
    amp = math.sqrt(math.factorial(lo) / math.factorial(hi) * math.pi ** (hi - lo))
    out = amp * r ** (hi - lo) * laguerre(lo, float(hi - lo), np.pi * r * r) \
        * np.exp(-np.pi * r * r / 2.0)
    return out if out.shape else float(out)


def hermite_stft_closed(n, k, z):
    """V_{phi_k} phi_n(z) in closed form, tensorized per complex coordinate."""
    n = as_multi_index(n)
    k = as_multi_index(k)
    if len(n) != len(k):
        raise DomainError("index lengths differ")
    z = _axis_points(z, len(n))
    out = np.ones(z.shape[:-1], dtype=complex)
    for j in range(len(n)):
        zj = z[..., j]
        x, w = zj.real, zj.imag
        out = out * np.exp(-1j * np.pi * x * w) \
            * np.exp(-np.pi * np.abs(zj) ** 2 / 2.0) \
            * np.conj(complex_hermite(n[j], k[j], zj))
    return out if np.asarray(out).shape else complex(out)


def hermite_wigner_closed(n, m, z):
    """Cross-Wigner W(phi_n, phi_m)(z) = 2^d (-1)^{|m|} e^{-2 pi |z|^2}
    prod_j conj(H_{n_j, m_j}(2 z_j))."""
    n = as_multi_index(n)
    m = as_multi_index(m)
    z = _axis_points(z, len(n))
    out = np.full(z.shape[:-1], 2.0 ** len(n) * (-1.0) ** index_order(m),
                  dtype=complex)
    for j in range(len(n)):
        zj = z[..., j]
        out = out * np.exp(-2.0 * np.pi * np.abs(zj) ** 2) \
            * np.conj(complex_hermite(n[j], m[j], 2.0 * zj))
    return out if np.asarray(out).shape else complex(out)


def _to_warped(frame: LagrangianFrame, z):
    """zeta = T^{-1} z as complex coordinates, for T the frame's symplectic matrix."""
    from .symplectic import frame_to_symplectic
    d = frame.d
    z = _axis_points(z, d)
    T_inv = frame_to_symplectic(frame).inv()
    real = np.concatenate([z.real, z.imag], axis=-1)
    warped = np.einsum("ij,...j->...i", T_inv, real)
    return z, warped[..., :d] + 1j * warped[..., d:]


def hagedorn_stft_closed(n, k, frame: LagrangianFrame, z):
    """STFT of the n-th against the k-th wavepacket of a common frame.

    Equals e^{-pi i <x, omega>} e^{-pi |zeta|^2 / 2} prod_j conj(H_{n_j,k_j}(zeta_j))
    with zeta = T^{-1} z; up to the leading phase this is the Hermite-window
    STFT precomposed with T^{-1}.
    """
    n = as_multi_index(n)
    k = as_multi_index(k)
    z, zeta = _to_warped(frame, z)
    xw = np.einsum("...j,...j->...", z.real, z.imag)
    out = np.exp(-1j * np.pi * xw).astype(complex)
    for j in range(frame.d):
        zj = zeta[..., j]
        out = out * np.exp(-np.pi * np.abs(zj) ** 2 / 2.0) \
            * np.conj(complex_hermite(n[j], k[j], zj))
    return out if np.asarray(out).shape else complex(out)


def hagedorn_wigner_closed(n, k, frame: LagrangianFrame, z):
    """Cross-Wigner of two wavepackets of a common frame.

    Equals 2^d (-1)^{|k|} e^{-2 pi |zeta|^2} prod_j conj(H_{n_j,k_j}(2 zeta_j)),
    zeta = T^{-1} z.  (The doubled argument is forced by the W <-> STFT
    identity together with the closed STFT above.)
    """
    n = as_multi_index(n)
    k = as_multi_index(k)
    z, zeta = _to_warped(frame, z)
    out = np.full(zeta.shape[:-1],
                  2.0 ** frame.d * (-1.0) ** index_order(k), dtype=complex)
    for j in range(frame.d):
        zj = zeta[..., j]
        out = out * np.exp(-2.0 * np.pi * np.abs(zj) ** 2) \
            * np.conj(complex_hermite(n[j], k[j], 2.0 * zj))
    return out if np.asarray(out).shape else complex(out)


def cohen_class(f, g, symbol: GridFunction) -> GridFunction:
    """Polarized Cohen-class distribution Q(f, g) = W(f, g) * symbol.

    FFT convolution with zero padding to 2N per axis (no circular wrap).
    Provided for d = 1 grids; higher-dimensional symbols are handled through
    the closed forms instead (a padded 4-axis FFT does not fit in memory).
    """
    grid = symbol.grid
    if grid.d != 1:
        raise DomainError("grid Cohen-class convolution is implemented for d = 1")
    w = wigner(f, g, grid)
    return convolve_fields(w, symbol)


def convolve_fields(a: GridFunction, b: GridFunction) -> GridFunction:
    """Continuous convolution (a * b) sampled on the common grid (d = 1)."""
    grid = a.grid
    if grid.d != 1 or b.grid.d != 1:
        raise DomainError("field convolution is implemented for d = 1")
    if (b.grid.points, b.grid.extent) != (grid.points, grid.extent):
        raise DomainError("grid mismatch between convolution factors")
    n = grid.points
    pa = np.zeros((2 * n, 2 * n), dtype=complex)
    pb = np.zeros((2 * n, 2 * n), dtype=complex)
    pa[:n, :n] = a.values
    pb[:n, :n] = b.values
    conv = np.fft.ifft2(np.fft.fft2(pa) * np.fft.fft2(pb))
    half = n // 2
    values = conv[half: half + n, half: half + n] * grid.cell
    return _boundary_report(GridFunction(grid=grid, values=values),
                            "convolution")


def weyl_matrix_element(F: GridFunction, n, m) -> complex:
    """<L_F phi_n, phi_m> = int F(z) W(phi_n, phi_m)(z) dz by grid quadrature.

    Warns (BoundaryMassWarning) when the symbol F keeps more than 1e-6 of its
    absolute mass on the outermost grid ring (non-decaying F: the pairing may
    still converge through the Wigner factor, but truncation is unchecked).
    """
    grid = F.grid
    bmass = F.boundary_mass()
    if bmass > 1e-6:
        warnings.warn(
            f"boundary carries {bmass:.2e} of the symbol's mass; "
            "F does not decay on this grid", BoundaryMassWarning)
    z = grid.complex_points()
    wv = hermite_wigner_closed(n, m, z)
    return GridFunction(grid=grid, values=F.values * wv).integral()


def fourier_wigner(coeffs, grid: PhaseGrid, indices=None) -> GridFunction:
    """Fourier-Wigner transform of S = sum c_ab phi_{i_a} (x) phi_{i_b}.

    FW(S)(z) = e^{-pi i <x, omega>} sum_ab c_ab conj(V_{phi_{i_a}} phi_{i_b}(-z));
    at z = 0 this is tr(S).  `indices` lists the multi-indices of the finite
    Hermite block; for d = 1 it defaults to 0..K-1.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 2 or coeffs.shape[0] != coeffs.shape[1]:
        raise DomainError(f"coefficient block must be square, got {coeffs.shape}")
    size = coeffs.shape[0]
    if indices is None:
        if grid.d != 1:
            raise DomainError("explicit multi-indices are required for d > 1")
        indices = [(i,) for i in range(size)]
    indices = [as_multi_index(i) for i in indices]
    if len(indices) != size:
        raise DomainError(
            f"rank {size} exceeds the listed basis truncation {len(indices)}")
    z = grid.complex_points()
    neg = -z
    out = np.zeros(grid.shape, dtype=complex)
    for a in range(size):
        for b in range(size):
            c = coeffs[a, b]
            if c == 0:
                continue
            out += c * np.conj(hermite_stft_closed(indices[b], indices[a], neg))
    xw = np.einsum("...j,...j->...", z.real, z.imag)
    return GridFunction(grid=grid, values=np.exp(-1j * np.pi * xw) * out)


def heat_convolution_closed(n: int, E: float, z):
    """(gamma_E * W(phi_n))(z) for the planar heat kernel gamma_E = e^{-pi|z|^2/E}/E.

    Closed form ((E - 1/2)/(E + 1/2))^n L_n^0(pi |z|^2 / (1/4 - E^2))
    gamma_{E+1/2}(z); requires E > 1/2 (the E -> 1/2 limit is the
    spectrogram value, see :func:`spectrogram_point`).  The Laguerre argument
    is negative, so the value is strictly positive.
    """
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")
    if E <= 0.5:
        raise DomainError(f"heat parameter must exceed 1/2, got {E}")
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    shifted = E + 0.5
    ratio = (E - 0.5) / shifted
    gamma = np.exp(-np.pi * r2 / shifted) / shifted
    out = ratio ** n * laguerre(n, 0.0, np.pi * r2 / (0.25 - E * E)) * gamma
    return out if np.asarray(out).shape else float(out)


def spectrogram_point(n: int, z):
    """|V_{phi_0} phi_n(z)|^2 = (pi |z|^2)^n / n! e^{-pi |z|^2}: the E -> 1/2 limit."""
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")
    z = np.asarray(z, dtype=complex)
    r2 = np.abs(z) ** 2
    out = (np.pi * r2) ** n / math.factorial(n) * np.exp(-np.pi * r2)
    return out if np.asarray(out).shape else float(out)


def gaussian_symbol(M, grid: PhaseGrid) -> GridFunction:
    """Centered Gaussian g_M(z) = (2 pi)^{-d} det(M^{-1})^{1/2} e^{-<M^{-1} z, z>/2}."""
    from .symplectic import CovarianceMatrix
    if isinstance(M, CovarianceMatrix):
        M = M.M
    M = np.asarray(M, dtype=float)
    d = grid.d
    if M.shape != (2 * d, 2 * d):
        raise DomainError(f"covariance shape {M.shape} does not match grid d={d}")
    Minv = np.linalg.inv(M)
    z = grid.complex_points()
    vec = np.concatenate([z.real, z.imag], axis=-1)
    quad = np.einsum("...i,ij,...j->...", vec, Minv, vec)
    amp = (2.0 * np.pi) ** (-d) * math.sqrt(np.linalg.det(Minv))
    return GridFunction(grid=grid, values=amp * np.exp(-0.5 * quad).astype(complex))
