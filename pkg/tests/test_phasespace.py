import math

import numpy as np
import pytest

from locspec.grids import GridFunction, delta_symbol, sample_plane
from locspec.hagedorn import hermite_frame, zero_diagonal_frame
from locspec.phasespace import (BoundaryMassWarning, cohen_class,
                                convolve_fields, fourier_wigner,
                                hagedorn_stft_closed, hagedorn_wigner_closed,
                                heat_convolution_closed, hermite_samples,
                                hermite_stft_closed, hermite_wigner_closed,
                                spectrogram_point, stft, stft_radial,
                                gaussian_symbol, wavepacket_samples,
                                weyl_matrix_element, wigner)
from locspec.specfun import DomainError
from locspec.symplectic import frame_to_symplectic, thermal_covariance


@pytest.fixture(scope="module")
def z1(grid1):
    return grid1.complex_points()[..., 0]


class TestGridStft:
    def test_gaussian_matches_closed_form(self, grid1, z1):
        f0 = hermite_samples(0, grid1)
        V = stft(f0, f0, grid1)
        ref = np.exp(-1j * np.pi * z1.real * z1.imag) \
            * np.exp(-np.pi * np.abs(z1) ** 2 / 2)
        assert np.abs(V.values - ref).max() < 1e-6

    def test_center_value_is_inner_product(self, grid1):
        f = hermite_samples(2, grid1) + 0.3 * hermite_samples(0, grid1)
        g = hermite_samples(0, grid1)
        V = stft(f, g, grid1)
        c = grid1.points // 2
        inner = (f * np.conj(g)).sum() * grid1.step
        assert V.values[c, c] == pytest.approx(inner, abs=1e-10)

    def test_moyal_norm(self, grid1):
        f = hermite_samples(3, grid1)
        g = hermite_samples(1, grid1)
        assert stft(f, g, grid1).norm2() == pytest.approx(1.0, abs=1e-6)

    def test_moyal_inner_products(self, grid1):
        # <V_{g1} f1, V_{g2} f2> = <f1, f2> conj(<g1, g2>) for Hermite inputs
        cases = [((1, 0), (1, 0), 1.0), ((2, 0), (3, 0), 0.0),
                 ((4, 1), (4, 1), 1.0), ((3, 2), (3, 1), 0.0)]
        for (a, b), (c, d), expected in cases:
            Vab = stft(hermite_samples(a, grid1), hermite_samples(b, grid1), grid1)
            Vcd = stft(hermite_samples(c, grid1), hermite_samples(d, grid1), grid1)
            inner = (Vab.values * np.conj(Vcd.values)).sum() * grid1.cell
            assert inner == pytest.approx(expected, abs=1e-6)

    def test_shape_mismatch_rejected(self, grid1):
        with pytest.raises(DomainError):
            stft(np.zeros(10), np.zeros(10), grid1)


class TestGridWigner:
    def test_gaussian_wigner(self, grid1, z1):
        f0 = hermite_samples(0, grid1)
        W = wigner(f0, f0, grid1)
        ref = 2.0 * np.exp(-2 * np.pi * np.abs(z1) ** 2)
        assert np.abs(W.values - ref).max() < 1e-6

    def test_marginal_normalization(self, grid1):
        f = hermite_samples(2, grid1)
        assert wigner(f, f, grid1).integral() == pytest.approx(1.0, abs=1e-8)

    def test_first_hermite_at_origin(self, grid1):
        f = hermite_samples(1, grid1)
        W = wigner(f, f, grid1)
        c = grid1.points // 2
        assert W.values[c, c] == pytest.approx(-2.0, abs=1e-8)


class TestHermiteClosedForms:
    def test_ground_formula(self, rng):
        z = rng.normal(size=12) + 1j * rng.normal(size=12)
        got = hermite_stft_closed(0, 0, z)
        ref = np.exp(-1j * np.pi * z.real * z.imag) \
            * np.exp(-np.pi * np.abs(z) ** 2 / 2)
        assert np.abs(got - ref).max() < 1e-15

    def test_gaussian_window_modulus(self, rng):
        # |V_{phi_0} phi_n(z)| = sqrt(pi^n / n!) |z|^n e^{-pi |z|^2 / 2}
        z = rng.normal(size=9) + 1j * rng.normal(size=9)
        for n in range(5):
            got = np.abs(hermite_stft_closed(n, 0, z))
            ref = np.sqrt(np.pi ** n / math.factorial(n)) * np.abs(z) ** n \
                * np.exp(-np.pi * np.abs(z) ** 2 / 2)
            assert np.abs(got - ref).max() < 1e-13

    def test_matches_grid_stft(self, grid1, z1):
        for n, k in [(0, 1), (2, 1), (3, 3), (1, 2), (3, 0)]:
            V = stft(hermite_samples(n, grid1), hermite_samples(k, grid1), grid1)
            ref = hermite_stft_closed(n, k, z1)
            assert np.abs(V.values - ref).max() < 1e-5

    def test_radial_profile_consistency(self, rng):
        z = rng.normal(size=8) + 1j * rng.normal(size=8)
        for n, k in [(3, 1), (1, 3), (2, 2)]:
            assert np.abs(np.abs(hermite_stft_closed(n, k, z))
                          - np.abs(stft_radial(n, k, np.abs(z)))).max() < 1e-13

    def test_wigner_closed_matches_grid(self, grid1, z1):
        for n, m in [(0, 0), (2, 2), (2, 0)]:
            W = wigner(hermite_samples(n, grid1), hermite_samples(m, grid1), grid1)
            ref = hermite_wigner_closed(n, m, z1)
            assert np.abs(W.values - ref).max() < 1e-5


class TestHagedornClosedForms:
    def test_identity_frame_reduces_to_hermite(self, rng):
        fr = hermite_frame(2)
        z = rng.normal(size=(10, 2)) + 1j * rng.normal(size=(10, 2))
        for n, k in [((1, 0), (0, 0)), ((2, 1), (1, 1))]:
            a = hagedorn_stft_closed(n, k, fr, z)
            b = hermite_stft_closed(n, k, z)
            assert np.abs(a - b).max() < 1e-14

    def test_modulus_is_warped_hermite_modulus(self, rng):
        # |V_k n(z)| = |V_{phi_k} phi_n(T^{-1} z)| pointwise to 1e-10
        fr = zero_diagonal_frame()
        Tinv = frame_to_symplectic(fr).inv()
        z = rng.normal(size=(40, 2)) + 1j * rng.normal(size=(40, 2))
        vec = np.concatenate([z.real, z.imag], axis=-1)
        warped = np.einsum("ij,pj->pi", Tinv, vec)
        zeta = warped[:, :2] + 1j * warped[:, 2:]
        for n, k in [((2, 1), (0, 0)), ((1, 1), (1, 0)), ((2, 2), (2, 2))]:
            a = np.abs(hagedorn_stft_closed(n, k, fr, z))
            b = np.abs(hermite_stft_closed(n, k, zeta))
            assert np.abs(a - b).max() < 1e-10

    def test_matches_grid_stft_d2(self, grid2):
        # compared on the centered sub-box: the d=2 default grid has alias
        # images near the outer frequency rows at the 1e-4 scale, which the
        # boundary-mass diagnostic duly reports
        fr = zero_diagonal_frame()
        ax = grid2.axis()
        sub = np.abs(ax) <= 2.0
        box = np.ix_(sub, sub, sub, sub)
        z = grid2.complex_points()
        for n, k in [((2, 2), (0, 0)), ((1, 2), (0, 1))]:
            with pytest.warns(BoundaryMassWarning):
                V = stft(wavepacket_samples(fr, n, grid2),
                         wavepacket_samples(fr, k, grid2), grid2)
            ref = hagedorn_stft_closed(n, k, fr, z)
            assert np.abs(V.values[box] - ref[box]).max() < 1e-4

    def test_wigner_identity_with_stft(self, rng):
        # W(n,k)(z) = 2^d (-1)^{|k|} e^{4 pi i <x,w>} V_k n(2z)
        fr = zero_diagonal_frame()
        z = rng.normal(size=(30, 2)) * 0.8 + 1j * rng.normal(size=(30, 2)) * 0.8
        for n, k in [((1, 0), (0, 1)), ((2, 2), (1, 1)), ((0, 0), (0, 0))]:
            lhs = hagedorn_wigner_closed(n, k, fr, z)
            xw = np.einsum("pj,pj->p", z.real, z.imag)
            rhs = 4.0 * (-1.0) ** (k[0] + k[1]) * np.exp(4j * np.pi * xw) \
                * hagedorn_stft_closed(n, k, fr, 2.0 * z)
            assert np.abs(lhs - rhs).max() < 1e-10

    def test_ground_wigner_reduces(self, rng):
        fr = hermite_frame(2)
        z = rng.normal(size=(10, 2)) + 1j * rng.normal(size=(10, 2))
        got = hagedorn_wigner_closed((0, 0), (0, 0), fr, z)
        ref = 4.0 * np.exp(-2 * np.pi * (np.abs(z) ** 2).sum(axis=-1))
        assert np.abs(got - ref).max() < 1e-13

    def test_matches_grid_wigner_d1(self, grid1, z1):
        # d = 1 wavepackets are rotated/scaled Hermites; use a squeezed frame
        from locspec.symplectic import validate_frame
        fr = validate_frame(np.array([[1.5]]), np.array([[0.3 + 1 / 1.5 * 1j]]))
        for n, k in [((1,), (0,)), ((2,), (2,))]:
            W = wigner(wavepacket_samples(fr, n, grid1),
                       wavepacket_samples(fr, k, grid1), grid1)
            ref = hagedorn_wigner_closed(n, k, fr, z1)
            sub = np.abs(grid1.axis()) <= 3.0
            box = np.ix_(sub, sub)
            assert np.abs(W.values[box] - ref[box]).max() < 1e-4


class TestCohenClass:
    def test_delta_symbol_recovers_wigner(self, grid1):
        f = hermite_samples(1, grid1)
        q = cohen_class(f, f, delta_symbol(grid1))
        w = wigner(f, f, grid1)
        assert np.abs(q.values - w.values).max() < 1e-8

    def test_gaussian_symbol_matches_heat_closed_form(self, grid1, z1):
        E = 1.0
        sym = sample_plane(lambda z: np.exp(-np.pi * np.abs(z) ** 2 / E) / E, grid1)
        f0 = hermite_samples(0, grid1)
        q = cohen_class(f0, f0, sym)
        ref = heat_convolution_closed(0, E, z1)
        assert np.abs(q.values - ref).max() < 1e-6

    def test_spectrogram_case(self, grid1, z1):
        # symbol = Wigner of the reflected window turns Q into |V_g f|^2
        f = hermite_samples(0, grid1)
        g = hermite_samples(1, grid1)
        sym = GridFunction(grid=grid1, values=hermite_wigner_closed(1, 1, z1))
        q = cohen_class(f, f, sym)
        ref = np.abs(hermite_stft_closed(0, 1, z1)) ** 2
        assert np.abs(q.values - ref).max() < 1e-6

    def test_d2_not_supported(self, grid2):
        with pytest.raises(DomainError):
            cohen_class(None, None, GridFunction(
                grid=grid2, values=np.zeros(grid2.shape)))


class TestWeylMatrixElements:
    def test_harmonic_oscillator_diagonal(self, grid1, z1):
        # Weyl symbol |z|^2 / 2 pairs to eigenvalues (2n+1) / (4 pi); the
        # symbol grows, so the non-decay diagnostic fires (values still
        # converge through the Wigner factor)
        F = GridFunction(grid=grid1, values=(np.abs(z1) ** 2 / 2).astype(complex))
        with pytest.warns(BoundaryMassWarning):
            for n in range(5):
                val = weyl_matrix_element(F, (n,), (n,))
                assert val == pytest.approx((2 * n + 1) / (4 * np.pi), rel=1e-9)
            assert abs(weyl_matrix_element(F, (0,), (2,))) < 1e-10

    def test_constant_symbol_is_identity(self, grid1):
        F = sample_plane(lambda z: np.ones_like(z, dtype=complex), grid1)
        with pytest.warns(BoundaryMassWarning):
            # constant symbol does not decay; the diagnostic must fire even
            # though the Wigner factor makes the integral converge
            v00 = weyl_matrix_element(F, (0,), (0,))
        assert v00 == pytest.approx(1.0, abs=1e-8)

    def test_thermal_symbol_diagonal_weights(self, grid1):
        E = 1.0
        F = gaussian_symbol(thermal_covariance(E, d=1), grid1)
        for n in range(6):
            val = weyl_matrix_element(F, (n,), (n,))
            assert val == pytest.approx(E ** n / (E + 1) ** (n + 1), abs=1e-10)
        assert abs(weyl_matrix_element(F, (3,), (1,))) < 1e-12


class TestFourierWigner:
    def test_rank_one_gaussian_ambiguity(self, grid1, z1):
        F = fourier_wigner(np.array([[1.0]]), grid1)
        assert np.abs(np.abs(F.values)
                      - np.exp(-np.pi * np.abs(z1) ** 2 / 2)).max() < 1e-12

    def test_identity_truncation_peak_is_trace(self, grid1):
        K = 5
        F = fourier_wigner(np.eye(K), grid1)
        c = grid1.points // 2
        assert F.values[c, c] == pytest.approx(K, rel=1e-12)
        assert np.abs(F.values).max() == pytest.approx(K, rel=1e-10)

    @staticmethod
    def _modulus_on_ray(coeffs, r, theta):
        # exact re-evaluation of |FW| at r e^{i theta}: no interpolation, so
        # the kinks of the modulus at its zeros cannot pollute the check
        z = r * np.exp(1j * theta)
        out = np.zeros_like(z, dtype=complex)
        for n in range(coeffs.shape[0]):
            out += coeffs[n, n] * np.conj(hermite_stft_closed((n,), (n,), -z))
        return np.abs(np.exp(-1j * np.pi * z.real * z.imag) * out)

    def test_thermal_state_is_polyradial(self, grid1):
        from locspec.reinhardt import polyradial_check
        E = 1.0
        w = np.diag([E ** n / (E + 1) ** (n + 1) for n in range(12)])
        F = fourier_wigner(w, grid1)
        assert polyradial_check(F) < 1e-6
        r = np.linspace(0.0, 4.0, 81)
        base = self._modulus_on_ray(w, r, 0.0)
        for theta in (0.9, 2.3, np.pi / 2):
            dev = np.abs(self._modulus_on_ray(w, r, theta) - base).max()
            assert dev < 1e-6 * base.max()

    def test_hermite_pure_states_are_polyradial(self, grid1):
        from locspec.reinhardt import polyradial_check
        for n in (0, 2):
            c = np.zeros((4, 4))
            c[n, n] = 1.0
            F = fourier_wigner(c, grid1)
            assert polyradial_check(F) < 1e-6
            r = np.linspace(0.0, 4.0, 81)
            base = self._modulus_on_ray(c, r, 0.0)
            dev = np.abs(self._modulus_on_ray(c, r, 1.3) - base).max()
            assert dev < 1e-6 * base.max()

    def test_d2_rank_one_ambiguity(self, grid2):
        F = fourier_wigner(np.array([[1.0]]), grid2, indices=[(0, 0)])
        z = grid2.complex_points()
        ref = np.exp(-np.pi * (np.abs(z) ** 2).sum(axis=-1) / 2)
        assert np.abs(np.abs(F.values) - ref).max() < 1e-12

    def test_rank_mismatch_rejected(self, grid1):
        with pytest.raises(DomainError):
            fourier_wigner(np.eye(3), grid1, indices=[(0,), (1,)])


class TestHeatConvolution:
    def test_order_zero_is_heat_semigroup(self, rng):
        z = rng.normal(size=6) + 1j * rng.normal(size=6)
        for E in (0.75, 2.0):
            got = heat_convolution_closed(0, E, z)
            ref = np.exp(-np.pi * np.abs(z) ** 2 / (E + 0.5)) / (E + 0.5)
            assert np.abs(got - ref).max() < 1e-14

    def test_spot_value_against_direct_integral(self):
        # independent oracle: (gamma_1 * W(phi_1))(0) by polar quadrature
        from numpy.polynomial.legendre import leggauss
        x, w = leggauss(200)
        r = 4.0 * (x + 1) / 2
        wr = 4.0 * w / 2
        integrand = (np.exp(-np.pi * r ** 2)
                     * (-2.0) * (1 - 4 * np.pi * r ** 2)
                     * np.exp(-2 * np.pi * r ** 2) * 2 * np.pi * r)
        oracle = float((integrand * wr).sum())
        assert oracle == pytest.approx(2.0 / 9.0, abs=1e-12)
        assert heat_convolution_closed(1, 1.0, 0.0) == pytest.approx(
            2.0 / 9.0, abs=1e-8)

    def test_spectrogram_limit(self, rng):
        z = rng.normal(size=5) + 1j * rng.normal(size=5)
        for n in (0, 1, 3):
            near = heat_convolution_closed(n, 0.5 + 1e-9, z)
            limit = spectrogram_point(n, z)
            assert np.abs(near - limit).max() < 1e-6

    def test_matches_fft_convolution(self, grid1, z1):
        # on-grid agreement with gamma_E * W(phi_n), relative to the peak
        for E in (0.75, 1.0, 2.0):
            gam = sample_plane(
                lambda z: np.exp(-np.pi * np.abs(z) ** 2 / E) / E, grid1)
            for n in range(5):
                w = GridFunction(grid=grid1,
                                 values=hermite_wigner_closed(n, n, z1))
                conv = convolve_fields(gam, w)
                ref = heat_convolution_closed(n, E, z1)
                rel = np.abs(conv.values - ref).max() / np.abs(ref).max()
                assert rel < 1e-4

    def test_everywhere_positive(self, rng):
        # negative Laguerre argument forces positivity
        z = rng.normal(size=200, scale=2.0) + 1j * rng.normal(size=200, scale=2.0)
        for n in (1, 4, 7):
            assert heat_convolution_closed(n, 0.8, z).min() > 0.0

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            heat_convolution_closed(2, 0.5, 0.1)
        with pytest.raises(DomainError):
            heat_convolution_closed(-1, 1.0, 0.1)
