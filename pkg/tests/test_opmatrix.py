import json
import math

import numpy as np
import pytest

from locspec.eigenvalues import eig_disc, eig_mixed, eig_reinhardt, eig_weighted
from locspec.grids import default_grid
from locspec.hagedorn import zero_diagonal_frame
from locspec.opmatrix import (OperatorMatrix, assemble_localization,
                              assemble_mixed, diagonalize, state_matrix,
                              verify_double_orthogonality)
from locspec.phasespace import gaussian_symbol
from locspec.reinhardt import (complement_mask, fubini_study_mask, full_mask,
                               mask_from_shadow, shadow_of, square_mask)
from locspec.specfun import DomainError
from locspec.symplectic import thermal_covariance

R_UNIT = 1.0 / math.sqrt(math.pi)


def disc_mask(R=R_UNIT):
    return mask_from_shadow(shadow_of("ball", R=R, d=1))


class TestAssembleLocalization:
    def test_disc_gaussian_window_is_diagonal_with_known_entries(self):
        op = assemble_localization(disc_mask(), ("hermite", (0,)), 12)
        off = op.matrix - np.diag(np.diag(op.matrix))
        assert np.abs(off).max() < 1e-12
        for n in range(12):
            assert op.matrix[n, n].real == pytest.approx(
                eig_disc(n, 0, R_UNIT), abs=1e-6)

    def test_full_plane_mask_gives_identity(self):
        op = assemble_localization(full_mask(d=1), ("hermite", (0,)), 8)
        assert np.abs(op.matrix - np.eye(8)).max() < 1e-12

    def test_square_mask_fourth_offdiagonals(self):
        op = assemble_localization(square_mask(1.0), ("hermite", (0,)), 16)
        assert abs(op.matrix[0, 4]) > 1e-4
        for m in (1, 2, 3, 5, 6, 7):
            assert abs(op.matrix[0, m]) < 1e-7
        assert abs(op.matrix[0, 8]) > 1e-4   # every fourth, not only the first

    def test_hagedorn_window_matches_transported_spectrum(self):
        ball = mask_from_shadow(shadow_of("ball", R=1.0, d=2))
        frame = zero_diagonal_frame()
        op_w = assemble_localization(ball, ("hagedorn", frame, (0, 0)), 4)
        op_h = assemble_localization(ball, ("hermite", (0, 0)), 4)
        sw = np.sort(np.linalg.eigvalsh(op_w.matrix))
        sh = np.sort(np.linalg.eigvalsh(op_h.matrix))
        assert np.abs(sw - sh).max() < 1e-4

    def test_basis_cap_enforced(self):
        with pytest.raises(DomainError):
            assemble_localization(disc_mask(), ("hermite", (0,)), 33)
        with pytest.raises(DomainError):
            assemble_localization(mask_from_shadow(shadow_of("ball", R=1, d=2)),
                                  ("hermite", (0, 0)), 9)

    def test_truncation_leakage_diagnostic(self):
        # polyradial masks cannot couple out of the truncation box (angular
        # orthogonality); the square leaks through its fourth off-diagonals
        clean = assemble_localization(disc_mask(), ("hermite", (0,)), 8)
        assert clean.diagnostics["truncation_leakage"] < 1e-12
        leaky = assemble_localization(square_mask(1.0), ("hermite", (0,)), 8)
        assert leaky.diagnostics["truncation_leakage"] > 1e-4

    def test_csv_dump_with_sidecar(self, tmp_path):
        op = assemble_localization(disc_mask(), ("hermite", (0,)), 4)
        path = tmp_path / "op.csv"
        op.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("re[0],im[0],re[1],im[1]")
        assert len(lines) == 1 + 4
        sidecar = json.loads((tmp_path / "op.csv.json").read_text())
        assert sidecar["basis"].startswith("hermite")
        assert "quad_error" in sidecar and "hermiticity" in sidecar


class TestAssembleMixed:
    def test_parity_ball_diagonal_wigner_integrals(self):
        mask = disc_mask(0.8)
        op = assemble_mixed(mask, "parity", 10)
        off = op.matrix - np.diag(np.diag(op.matrix))
        assert np.abs(off).max() < 1e-12
        for n in range(10):
            assert op.matrix[n, n].real == pytest.approx(
                eig_mixed((n,), mask, "parity"), abs=1e-9)

    def test_thermal_disc_matches_geometric_mixture(self):
        mask = disc_mask()
        op = assemble_mixed(mask, ("thermal", 1.0), 12)
        for n in range(12):
            mixture = sum(0.5 ** (j + 1) * eig_disc(n, j, R_UNIT)
                          for j in range(60))
            assert op.matrix[n, n].real == pytest.approx(mixture, abs=1e-5)
        off = op.matrix - np.diag(np.diag(op.matrix))
        assert np.abs(off).max() < 1e-10

    def test_uniform_gaussian_covariance_equals_thermal(self):
        mask = disc_mask(0.8)
        E = 1.0
        a = assemble_mixed(mask, ("thermal", E), 8)
        b = assemble_mixed(mask, ("gaussian", thermal_covariance(E, d=1)), 8)
        assert np.abs(a.matrix - b.matrix).max() < 1e-12

    def test_non_uniform_gaussian_rejected(self):
        M = np.diag([0.3, 0.2])
        with pytest.raises(DomainError, match="uniform"):
            assemble_mixed(disc_mask(0.8), ("gaussian", M), 6)

    def test_shifted_symbol_breaks_diagonality(self):
        # negative control: non-polyradial state leaves off-diagonal mass
        grid = default_grid(1)
        sym = gaussian_symbol(thermal_covariance(1.0, d=1), grid)
        from locspec.grids import GridFunction
        shifted = GridFunction(grid=grid, values=np.roll(sym.values, 8, axis=0))
        op = assemble_mixed(disc_mask(0.8), shifted, 8)
        off = op.matrix - np.diag(np.diag(op.matrix))
        assert np.abs(off).max() > 1e-4

    def test_grid_route_reproduces_polyradial_case(self):
        grid = default_grid(1)
        sym = gaussian_symbol(thermal_covariance(1.0, d=1), grid)
        op = assemble_mixed(disc_mask(), sym, 6)
        ref = assemble_mixed(disc_mask(), ("thermal", 1.0), 6)
        assert np.abs(np.diag(op.matrix) - np.diag(ref.matrix)).max() < 2e-2


class TestStateMatrix:
    def test_thermal_weights_recovered_through_grid(self):
        op = state_matrix(("thermal", 1.0), 10)
        off = op.matrix - np.diag(np.diag(op.matrix))
        assert np.abs(off).max() < 1e-10
        for n in range(10):
            assert op.matrix[n, n].real == pytest.approx(0.5 ** (n + 1),
                                                         abs=1e-6)


class TestDiagonalize:
    def test_diagonal_input_passthrough(self):
        mat = np.diag([3.0, 1.0, 2.0]).astype(complex)
        op = OperatorMatrix(indices=[(0,), (1,), (2,)], matrix=mat,
                            basis="hermite", mask="diag")
        dg = diagonalize(op)
        assert np.allclose(dg.table.values, [3.0, 2.0, 1.0])
        assert dg.dominant == [(0,), (2,), (1,)]
        assert np.abs(np.abs(dg.vectors).max(axis=0) - 1.0).max() < 1e-14

    def test_disc_eigenvectors_are_standard_basis(self):
        op = assemble_localization(disc_mask(), ("hermite", (0,)), 16)
        dg = diagonalize(op)
        assert dg.residual < 1e-9
        # subspace angle of each eigenvector against its basis vector
        for i, idx in enumerate(dg.dominant):
            overlap = abs(dg.vectors[op.indices.index(idx), i])
            assert math.acos(min(overlap, 1.0)) < 1e-4

    def test_square_leading_eigenvector_mixes_hermites(self):
        op = assemble_localization(square_mask(1.0), ("hermite", (0,)), 16)
        dg = diagonalize(op)
        leading = dg.vectors[:, 0]
        assert (np.abs(leading) > 1e-3).sum() >= 2

    def test_non_hermitian_rejected(self):
        mat = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
        with pytest.raises(DomainError, match="Hermitian"):
            diagonalize(OperatorMatrix(indices=[(0,), (1,)], matrix=mat,
                                       basis="hermite", mask="bad"))

    def test_edge_flags(self):
        op = assemble_localization(disc_mask(), ("hermite", (0,)), 8)
        dg = diagonalize(op)
        for i, idx in enumerate(dg.dominant):
            assert dg.untrusted[i] == (idx[0] > 5)
        assert set(dg.by_index()) == {(n,) for n in range(6)}


class TestVerifyDoubleOrthogonality:
    def test_hermite_disc_passes_with_disc_eigenvalues(self):
        rep = verify_double_orthogonality(("hermite", (0,)), disc_mask(), 10)
        assert rep.passed(1e-6, 1e-6)
        for n in range(10):
            assert rep.diagonal_mask[n] == pytest.approx(eig_disc(n, 0, R_UNIT),
                                                         abs=1e-8)

    def test_hagedorn_family_with_transported_mask(self):
        frame = zero_diagonal_frame()
        ball = mask_from_shadow(shadow_of("ball", R=1.0, d=2))
        rep = verify_double_orthogonality(("hagedorn", frame, (0, 0)), ball, 3)
        assert rep.offdiag_plane < 1e-5
        assert rep.offdiag_mask < 1e-5
        for i, idx in enumerate(rep.indices):
            assert rep.diagonal_mask[i] == pytest.approx(
                eig_reinhardt(idx, (0, 0), ball.region), abs=1e-6)

    def test_square_family_fails_at_zero_four(self):
        rep = verify_double_orthogonality(("hermite", (0,)), square_mask(1.0), 8)
        assert not rep.passed(1e-6, 1e-6)
        assert rep.offdiag_plane < 1e-6          # Moyal side still clean
        i0 = rep.indices.index((0,))
        i4 = rep.indices.index((4,))
        assert abs(rep.gram_mask[i0, i4]) > 1e-4


class TestSpectralInvariants:
    @pytest.mark.parametrize("mask_fn,window", [
        (lambda: disc_mask(), (0,)),
        (lambda: disc_mask(0.9), (1,)),
        (lambda: fubini_study_mask(), (0,)),
        (lambda: complement_mask(shadow_of("ball", R=0.9, d=1)), (2,)),
    ])
    def test_matrix_route_matches_closed_route(self, mask_fn, window):
        mask = mask_fn()
        op = assemble_localization(mask, ("hermite", window), 14)
        by_idx = diagonalize(op).by_index()
        for n in range(7):
            closed = eig_weighted((n,), window, mask)
            assert by_idx[(n,)] == pytest.approx(closed, abs=1e-5)

    def test_table_mask_matrix_route_matches_closed_route(self):
        from locspec.reinhardt import table_mask
        mask = table_mask([[0.0, 1.0], [0.8, 0.6], [2.0, 0.0]])
        op = assemble_localization(mask, ("hermite", (0,)), 12)
        by_idx = diagonalize(op).by_index()
        for n in range(6):
            closed = eig_weighted((n,), (0,), mask)
            assert by_idx[(n,)] == pytest.approx(closed, abs=1e-5)

    def test_d2_parity_matches_closed_route(self):
        ball = mask_from_shadow(shadow_of("ball", R=1.0, d=2))
        op = assemble_mixed(ball, "parity", 3)
        off = op.matrix - np.diag(np.diag(op.matrix))
        assert np.abs(off).max() < 1e-10
        for i, idx in enumerate(op.indices):
            assert op.matrix[i, i].real == pytest.approx(
                eig_mixed(idx, ball, "parity"), abs=1e-7)

    def test_mixed_route_matches_closed_route(self):
        mask = disc_mask(0.8)
        for state in ("parity", ("thermal", 0.7)):
            op = assemble_mixed(mask, state, 12)
            by_idx = diagonalize(op).by_index()
            for n in range(6):
                assert by_idx[(n,)] == pytest.approx(
                    eig_mixed((n,), mask, state), abs=1e-5)

    def test_efg_constant_shift_is_exact(self):
        base = disc_mask(0.9)
        shifted = mask_from_shadow(shadow_of("ball", R=0.9, d=1), constant=0.35)
        a = np.linalg.eigvalsh(assemble_localization(
            base, ("hermite", (0,)), 10).matrix)
        b = np.linalg.eigvalsh(assemble_localization(
            shifted, ("hermite", (0,)), 10).matrix)
        assert np.abs(np.sort(b) - np.sort(a) - 0.35).max() < 1e-8

    def test_positive_problems_are_psd(self):
        cases = [
            assemble_localization(disc_mask(), ("hermite", (1,)), 12),
            assemble_localization(fubini_study_mask(), ("hermite", (0,)), 12),
            assemble_localization(square_mask(1.0), ("hermite", (0,)), 12),
            assemble_mixed(disc_mask(), ("thermal", 1.0), 10),
        ]
        for op in cases:
            assert np.linalg.eigvalsh(op.matrix).min() >= -1e-8

    def test_d2_shadow_kinds_matrix_route(self):
        # weighted-quadratic and p-ball shadows: closed route vs assembly
        for shadow in (shadow_of("weighted", alpha=(1, 2), R=1.0),
                       shadow_of("pball", p=1.5, R=1.0, d=2)):
            mask = mask_from_shadow(shadow)
            op = assemble_localization(mask, ("hermite", (0, 0)), 3)
            off = op.matrix - np.diag(np.diag(op.matrix))
            assert np.abs(off).max() < 1e-10
            for i, idx in enumerate(op.indices):
                closed = eig_reinhardt(idx, (0, 0), shadow)
                assert op.matrix[i, i].real == pytest.approx(closed, abs=1e-5)

    def test_symplectic_covariance_of_spectra(self):
        frame = zero_diagonal_frame()
        for shadow in (shadow_of("ball", R=1.0, d=2),
                       shadow_of("polydisc", radii=(0.8, 1.1))):
            mask = mask_from_shadow(shadow)
            sw = np.sort(np.linalg.eigvalsh(assemble_localization(
                mask, ("hagedorn", frame, (1, 0)), 3).matrix))
            sh = np.sort(np.linalg.eigvalsh(assemble_localization(
                mask, ("hermite", (1, 0)), 3).matrix))
            assert np.abs(sw - sh).max() < 1e-4
