"""Dense localization-operator matrices in truncated bases, and their spectra.

The matrix of the operator with mask F and window g in a basis {psi_n} is

    A[m, n] = <A_F^g psi_n, psi_m> = c delta_{mn} ||g||^2
              + int F_0(tau(z)) V_g psi_n(z) conj(V_g psi_m(z)) dz,

assembled from closed-form STFT integrands on polycylindrical quadrature
nodes (radial sections x exact trapezoid angles) for polyradial masks, and
on Cartesian Gauss-Legendre boxes for the planar square mask.  Mixed-state
matrices pair the mask against the polarized Cohen-class distribution of
the state: the Wigner kernel for the parity state, a geometric mixture of
Hermite-window problems for thermal/uniform Gaussian states, and a grid FFT
convolution for sampled Weyl symbols.

Diagonalization is a dense Hermitian eigendecomposition; eigenvalues are
returned descending, ties broken by the lexicographic index of the dominant
basis coefficient, and eigenpairs within two indices of the truncation edge
are flagged untrusted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .eigenvalues import EigenvalueTable, indices_upto
from .grids import GridFunction, default_grid
from .phasespace import (convolve_fields, hagedorn_stft_closed,
                         hermite_stft_closed, hermite_wigner_closed, stft_radial)
from .quadrature import angular_nodes, composite_gl, exp_tail_cut, gl_nodes
from .reinhardt import MaskSpec, PlanarMask
from .specfun import DomainError, as_multi_index
from .symplectic import CovarianceMatrix, LagrangianFrame, frame_to_symplectic

__all__ = [
    "OperatorMatrix", "DiagonalizedOperator", "OrthogonalityReport",
    "assemble_localization", "assemble_mixed", "diagonalize",
    "verify_double_orthogonality", "state_matrix",
]

BASIS_CAP = {1: 32, 2: 8}


@dataclass(eq=False)
class OperatorMatrix:
    """Hermitian matrix of a localization operator in a truncated basis."""
    indices: list
    matrix: np.ndarray
    basis: str
    mask: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.indices)

    def hermiticity(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def to_csv(self, path) -> None:
        """Complex entries as interleaved re, im columns; diagnostics sidecar."""
        with open(path, "w") as fh:
            header = []
            for n in self.indices:
                tag = "-".join(str(v) for v in n)
                header += [f"re[{tag}]", f"im[{tag}]"]
            fh.write(",".join(header) + "\n")
            for row in self.matrix:
                cells = []
                for v in row:
                    cells += [f"{v.real:.17g}", f"{v.imag:.17g}"]
                fh.write(",".join(cells) + "\n")
        sidecar = dict(self.diagnostics)
        sidecar.update({"basis": self.basis, "mask": self.mask,
                        "indices": [list(i) for i in self.indices],
                        "hermiticity": self.hermiticity()})
        with open(str(path) + ".json", "w") as fh:
            json.dump(sidecar, fh, indent=1, default=float)


def _check_basis(n_basis: int, d: int) -> list:
    cap = BASIS_CAP.get(d)
    if cap is None:
        raise DomainError("matrix assembly implemented for d <= 2")
    if not 1 <= n_basis <= cap:
        raise DomainError(f"n_basis for d={d} must be in 1..{cap}, got {n_basis}")
    return indices_upto(n_basis - 1, d)


def _angular_factor(delta: int) -> float:
    """int_0^{2pi} e^{i delta theta} d theta by exact trapezoid (2pi or 0)."""
    theta, w = angular_nodes(2 * abs(delta) + 4)
    return float(np.real((np.exp(1j * delta * theta) * w).sum()))


def _mask_radial_integral(mask: MaskSpec, axis_fns, degree: int) -> tuple:
    """integral over V^d of F_0(r) prod_j axis_fns[j](r_j), with error estimate."""
    d = mask.d

    def product(r):
        out = np.ones(r.shape[:-1], dtype=float)
        for j in range(d):
            out = out * axis_fns[j](r[..., j])
        return out

    total, err = 0.0, 0.0
    if mask.region is not None:
        from .reinhardt import shadow_quadrature
        res = shadow_quadrature(mask.region, product, assume_gaussian_decay=True,
                                tail_degree=degree)
        total += mask.region_sign * res.value
        err += res.est_error
    if mask.smooth is not None:
        cap = math.sqrt(exp_tail_cut(degree) / math.pi)
        x1, w1 = composite_gl(0.0, cap, 14, 20)
        x0, w0 = composite_gl(0.0, cap, 7, 20)

        def tensor(x, w):
            if d == 1:
                vals = product(x[:, None]) * mask.smooth(x[:, None])
                return float(np.dot(w, vals))
            X1, X2 = np.meshgrid(x, x, indexing="ij")
            pts = np.stack([X1.ravel(), X2.ravel()], axis=-1)
            return float((np.outer(w, w).ravel() * product(pts)
                          * mask.smooth(pts)).sum())

        v1, v0 = tensor(x1, w1), tensor(x0, w0)
        total += v1
        err += abs(v1 - v0)
    return total, err


def _hermite_pair_entry(mask: MaskSpec, k, m, n) -> tuple:
    """Single pairing int F_0 V_{phi_k} phi_n conj(V_{phi_k} phi_m) dz."""
    d = mask.d
    ang = math.prod(_angular_factor(m[j] - n[j]) for j in range(d))
    if ang == 0.0:
        return 0.0 + 0.0j, 0.0
    axis_fns = [
        (lambda j: (lambda r: stft_radial(n[j], k[j], r)
                    * stft_radial(m[j], k[j], r) * r))(j)
        for j in range(d)
    ]
    degree = sum(n) + sum(m) + 2 * sum(k) + 2 * d + 4
    val, err = _mask_radial_integral(mask, axis_fns, degree)
    return ang * val, err


def _hermite_entries_polyradial(mask: MaskSpec, k, indices) -> tuple:
    """Entries int F_0 V_{phi_k} phi_n conj(V_{phi_k} phi_m) dz for all pairs."""
    size = len(indices)
    out = np.zeros((size, size), dtype=complex)
    max_err = 0.0
    for a in range(size):
        for b in range(a, size):
            val, err = _hermite_pair_entry(mask, k, indices[a], indices[b])
            max_err = max(max_err, err)
            out[a, b] = val
            out[b, a] = np.conj(val)
    return out, max_err


def _beyond_edge(indices):
    """First excluded indices past the truncation box, per axis.

    Steps reach to +4 so masks with four-fold (but not full) rotational
    symmetry, whose couplings are 4-periodic, cannot hide their leakage.
    """
    top = indices[-1]
    d = len(top)
    out = []
    for axis in range(d):
        for step in (1, 2, 3, 4):
            up = list(top)
            up[axis] += step
            out.append(tuple(up))
    return top, out


def _wigner_entries_polyradial(mask: MaskSpec, indices) -> tuple:
    """Entries int F_0(tau(z)) W(phi_n, phi_m)(z) dz (parity-state kernel)."""
    d = mask.d
    size = len(indices)
    out = np.zeros((size, size), dtype=complex)
    max_err = 0.0
    for a in range(size):
        for b in range(a, size):
            m, n = indices[a], indices[b]
            ang = math.prod(_angular_factor(m[j] - n[j]) for j in range(d))
            if ang == 0.0:
                continue
            sign = math.prod((-1.0) ** min(n[j], m[j]) for j in range(d))

            axis_fns = [
                (lambda j: (lambda r: 2.0 * stft_radial(n[j], m[j], 2.0 * r) * r))(j)
                for j in range(d)
            ]
            degree = sum(n) + sum(m) + 2 * d + 4
            val, err = _mask_radial_integral(mask, axis_fns, degree)
            max_err = max(max_err, err)
            out[a, b] = sign * ang * val
            out[b, a] = np.conj(out[a, b])
    return out, max_err


def _planar_nodes(mask: PlanarMask, order: int = 160):
    x, w = gl_nodes(-mask.a, mask.a, order)
    X, Y = np.meshgrid(x, x, indexing="ij")
    z = (X + 1j * Y).ravel()
    wt = np.outer(w, w).ravel()
    return z, wt


def _planar_gram(mask: PlanarMask, values_fn, indices) -> np.ndarray:
    """Gram over an explicit planar region from closed-form field samples."""
    z, wt = _planar_nodes(mask)
    stack = np.stack([values_fn(idx, z) for idx in indices], axis=0)
    return (stack * wt[None, :]) @ stack.conj().T


def assemble_localization(mask, window, n_basis: int) -> OperatorMatrix:
    """Matrix of the localization operator with the given mask and window.

    window: ``("hermite", k)`` for the product Hermite window phi_k, or
    ``("hagedorn", frame, k)`` for a wavepacket window -- the mask is then
    transported by the frame's symplectic matrix (mask o T^{-1}), which is
    the problem whose eigenfunctions are the frame's wavepackets.

    The assembled matrix always carries every off-diagonal entry; nothing is
    zeroed by fiat, so diagonality is an outcome, not an assumption.
    """
    kind = window[0]
    if kind == "hermite":
        k = as_multi_index(window[1])
        d = len(k)
        if getattr(mask, "d", d) != d:
            raise DomainError(
                f"mask dimension {mask.d} does not match window index length {d}")
        indices = _check_basis(n_basis, d)
        top, beyond = _beyond_edge(indices)
        if isinstance(mask, PlanarMask):
            if d != 1:
                raise DomainError("planar masks are d = 1 objects")
            gram = _planar_gram(
                mask, lambda idx, z: hermite_stft_closed(idx, k, z), indices)
            entries, err = gram, 1e-14
            z, wt = _planar_nodes(mask)
            v_top = hermite_stft_closed(top, k, z)
            leakage = max(
                abs(((hermite_stft_closed(b, k, z).conj() * v_top) * wt).sum())
                for b in beyond)
        else:
            entries, err = _hermite_entries_polyradial(mask, k, indices)
            leakage = max(abs(_hermite_pair_entry(mask, k, b, top)[0])
                          for b in beyond)
        entries = entries + mask.constant * np.eye(len(indices))
        return OperatorMatrix(
            indices=indices, matrix=entries, basis=f"hermite[k={list(k)}]",
            mask=getattr(mask, "label", "mask"),
            diagnostics={"quad_error": err, "n_basis": n_basis,
                         "truncation_leakage": leakage})
    if kind == "hagedorn":
        frame, k = window[1], as_multi_index(window[2])
        d = frame.d
        if len(k) != d:
            raise DomainError("window index length must match the frame dimension")
        if isinstance(mask, PlanarMask):
            raise DomainError("planar masks pair with Hermite windows only")
        if mask.d != d:
            raise DomainError(
                f"mask dimension {mask.d} does not match frame dimension {d}")
        indices = _check_basis(n_basis, d)
        entries, err = _hagedorn_entries(mask, frame, k, indices)
        entries = entries + mask.constant * np.eye(len(indices))
        return OperatorMatrix(
            indices=indices, matrix=entries, basis=f"hagedorn[k={list(k)}]",
            mask=f"{getattr(mask, 'label', 'mask')} o T^-1",
            diagnostics={"quad_error": err, "n_basis": n_basis})
    raise DomainError(f"unknown window descriptor {window!r}")


def _hagedorn_entries(mask: MaskSpec, frame: LagrangianFrame, k, indices) -> tuple:
    """Entries of the transported problem by quadrature in warped coordinates.

    The mask of the operator is F o T^{-1}; substituting z = T zeta (unit
    Jacobian) leaves the mask evaluated on absolute coordinates of zeta while
    the closed-form wavepacket STFTs are evaluated at the physical points
    T zeta.  Polycylindrical nodes in zeta keep the mask exactly resolved.
    """
    d = frame.d
    if mask.region is not None and mask.smooth is not None:
        raise DomainError("combined indicator + smooth masks are not assembled "
                          "in wavepacket bases")
    T = frame_to_symplectic(frame).T
    nmax = max(max(idx) for idx in indices)
    n_theta = 2 * nmax + 6
    theta, w_theta = angular_nodes(n_theta)

    # radial nodes: resolve the mask region boundary by sections
    if mask.region is not None and mask.smooth is None:
        region = mask.region
    else:
        region = None
    cap = math.sqrt(exp_tail_cut(4 * nmax + 8) / math.pi)

    if d == 1:
        if region is not None:
            from .reinhardt import _axis_sections
            secs = _axis_sections(region, [()], cap)[0]
        else:
            secs = [(0.0, cap)]
        r_nodes, r_w = [], []
        for lo, hi in secs:
            x, w = composite_gl(lo, hi, 8, 24)
            r_nodes.append(x)
            r_w.append(w)
        r_nodes = np.concatenate(r_nodes)
        r_w = np.concatenate(r_w)
        R, TH = np.meshgrid(r_nodes, theta, indexing="ij")
        zeta = (R * np.exp(1j * TH)).ravel()[:, None]
        weights = (np.outer(r_w * r_nodes, w_theta)).ravel()
        prof = (mask.region_sign * np.ones(r_nodes.size) if region is not None
                else mask.profile_value(r_nodes[:, None]))
        prof_full = np.repeat(prof, theta.size)
    else:
        outer_x, outer_w = composite_gl(0.0, min(mask.region.box[0], cap)
                                        if mask.region is not None else cap, 6, 16)
        pieces, wts, profs = [], [], []
        from .reinhardt import _axis_sections
        for v, wv in zip(outer_x, outer_w):
            if mask.region is not None:
                secs = _axis_sections(mask.region, [(v,)], cap)[0]
            else:
                secs = [(0.0, cap)]
            for lo, hi in secs:
                x, w = gl_nodes(lo, hi, 32)
                pieces.append(np.stack([np.full_like(x, v), x], axis=-1))
                wts.append(wv * w * v * x)
        if not pieces:
            raise DomainError("mask region has empty absolute-space sections")
        r_pts = np.concatenate(pieces, axis=0)
        r_wts = np.concatenate(wts)
        if mask.region is not None and mask.smooth is None:
            prof = mask.region_sign * np.ones(r_pts.shape[0])
        else:
            prof = mask.profile_value(r_pts)
        TH1, TH2 = np.meshgrid(theta, theta, indexing="ij")
        phase = np.stack([np.exp(1j * TH1).ravel(), np.exp(1j * TH2).ravel()], axis=-1)
        zeta = (r_pts[:, None, :] * phase[None, :, :]).reshape(-1, 2)
        weights = (r_wts[:, None] * np.outer(w_theta, w_theta).ravel()[None, :]).ravel()
        prof_full = np.repeat(prof, phase.shape[0])

    real = np.concatenate([zeta.real, zeta.imag], axis=-1)
    z_phys = np.einsum("ij,...j->...i", T, real)
    z_cplx = z_phys[..., :d] + 1j * z_phys[..., d:]
    stack = np.stack([hagedorn_stft_closed(idx, k, frame, z_cplx)
                      for idx in indices], axis=0)
    weighted = stack * (weights * prof_full)[None, :]
    gram = weighted @ stack.conj().T
    return gram, 1e-10


def state_matrix(state, n_basis: int, grid=None) -> OperatorMatrix:
    """Matrix <S phi_n, phi_m> of a state S through its Weyl symbol on a grid.

    Equivalent to the mixed-state matrix with a delta mask (F * S = S for
    F = delta); used to recover state spectra, e.g. the geometric thermal
    weights, through the grid pipeline alone.
    """
    from .phasespace import gaussian_symbol, weyl_matrix_element
    from .symplectic import thermal_covariance
    if grid is None:
        grid = default_grid(1)
    if isinstance(state, GridFunction):
        symbol, label = state, "weyl-grid"
        grid = state.grid
    else:
        tag = state if isinstance(state, str) else state[0]
        if tag == "thermal":
            symbol = gaussian_symbol(thermal_covariance(float(state[1]),
                                                        d=grid.d), grid)
            label = f"thermal[E={state[1]}]"
        elif tag == "gaussian":
            M = state[1].M if isinstance(state[1], CovarianceMatrix) else state[1]
            symbol = gaussian_symbol(M, grid)
            label = "gaussian"
        else:
            raise DomainError(f"state {state!r} has no grid Weyl symbol here")
    indices = _check_basis(n_basis, grid.d)
    size = len(indices)
    out = np.zeros((size, size), dtype=complex)
    import warnings
    from .phasespace import BoundaryMassWarning
    for a in range(size):
        for b in range(a, size):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", BoundaryMassWarning)
                out[a, b] = weyl_matrix_element(symbol, indices[b], indices[a])
            out[b, a] = np.conj(out[a, b])
    return OperatorMatrix(indices=indices, matrix=out, basis="hermite[k=0] (weyl)",
                          mask="delta", diagnostics={"n_basis": n_basis,
                                                     "route": "grid-weyl"})


def assemble_mixed(mask, state, n_basis: int) -> OperatorMatrix:
    """Matrix of the mixed-state localization operator F * S.

    Entries pair the mask against the polarized Cohen-class distribution of
    the state:

    * ``"parity"``        Q_S = W(phi_n, phi_m) exactly (closed form)
    * ``("thermal", E)``  geometric mixture of Hermite-window problems,
                          truncated where the weight drops below 1e-14
    * ``("gaussian", M)`` same route after checking M = k Id (polyradial);
                          non-uniform covariances are rejected
    * GridFunction        FFT convolution of the sampled Weyl symbol with
                          closed-form Wigner kernels (d = 1, lower accuracy;
                          also the negative-control route for non-polyradial
                          symbols)
    """
    tag = state if isinstance(state, str) else \
        (state[0] if not isinstance(state, GridFunction) else "grid")

    if tag == "parity":
        d = getattr(mask, "d", 1)
        indices = _check_basis(n_basis, d)
        if isinstance(mask, PlanarMask):
            z, wt = _planar_nodes(mask)
            size = len(indices)
            entries = np.zeros((size, size), dtype=complex)
            for a in range(size):
                for b in range(size):
                    vals = hermite_wigner_closed(indices[b], indices[a], z)
                    entries[a, b] = (vals * wt).sum()
            err = 1e-13
        else:
            entries, err = _wigner_entries_polyradial(mask, indices)
        entries = entries + mask.constant * np.eye(len(indices))
        return OperatorMatrix(indices=indices, matrix=entries, basis="hermite",
                              mask=getattr(mask, "label", "mask"),
                              diagnostics={"quad_error": err, "state": "parity",
                                           "n_basis": n_basis})

    if tag == "thermal" or tag == "gaussian":
        if isinstance(mask, PlanarMask):
            raise DomainError("mixed-state assembly with planar masks is not provided")
        d = mask.d
        if tag == "thermal":
            E = float(state[1])
        else:
            M = state[1].M if isinstance(state[1], CovarianceMatrix) else \
                np.asarray(state[1], dtype=float)
            if M.shape != (2 * d, 2 * d):
                raise DomainError("covariance dimension does not match the mask")
            k = M[0, 0]
            if np.abs(M - k * np.eye(2 * d)).max() > 1e-12 * max(1.0, abs(k)):
                raise DomainError(
                    "only uniform-diagonal (polyradial) Gaussian covariances are "
                    "assembled in the Hermite basis; transport others by their "
                    "Williamson frame")
            E = 2.0 * math.pi * k - 0.5
            if E < -1e-12:
                raise DomainError("covariance below the admissibility boundary")
            E = max(E, 0.0)
        indices = _check_basis(n_basis, d)
        size = len(indices)
        entries = np.zeros((size, size), dtype=complex)
        max_err = 0.0
        ratio = E / (E + 1.0)
        j = 0
        windows = []
        while True:
            w = E ** j / (E + 1.0) ** (j + 1) if E > 0 else (1.0 if j == 0 else 0.0)
            if w < 1e-14:
                break
            windows.append((j, w))
            j += 1
            if E == 0 and j > 0:
                break
        for jd, w in _tensor_windows(windows, d):
            block, err = _hermite_entries_polyradial(mask, jd, indices)
            entries += w * block
            max_err = max(max_err, err)
        entries = entries + mask.constant * np.eye(size)  # c * tr(S), tr(S) = 1
        return OperatorMatrix(
            indices=indices, matrix=entries, basis="hermite",
            mask=getattr(mask, "label", "mask"),
            diagnostics={"quad_error": max_err, "state": f"{tag}[E={E:.6g}]",
                         "terms": len(windows) ** d, "n_basis": n_basis})

    if tag == "grid":
        symbol = state
        if symbol.grid.d != 1 or getattr(mask, "d", 1) != 1:
            raise DomainError("grid-symbol assembly is implemented for d = 1")
        indices = _check_basis(n_basis, 1)
        size = len(indices)
        grid = symbol.grid
        z = grid.complex_points()[..., 0]
        mask_vals = mask.value(z) if not isinstance(mask, PlanarMask) \
            else mask.value(z)
        flipped = np.roll(symbol.values[::-1, ::-1], 1, axis=(0, 1))
        checked = GridFunction(grid=grid, values=flipped)   # symbol of PSP
        entries = np.zeros((size, size), dtype=complex)
        for a in range(size):
            for b in range(a, size):
                wv = hermite_wigner_closed(indices[b], indices[a], z)
                q = convolve_fields(GridFunction(grid=grid, values=wv), checked)
                entries[a, b] = (mask_vals * q.values).sum() * grid.cell
                entries[b, a] = np.conj(entries[a, b])
        return OperatorMatrix(indices=indices, matrix=entries, basis="hermite",
                              mask=getattr(mask, "label", "mask"),
                              diagnostics={"state": "weyl-grid", "n_basis": n_basis,
                                           "route": "fft-convolution"})

    raise DomainError(f"unknown state descriptor {state!r}")


def _tensor_windows(windows, d):
    """Tensorize 1-axis (index, weight) pairs into d-axis multi-windows."""
    if d == 1:
        for j, w in windows:
            yield (j,), w
    else:
        for j1, w1 in windows:
            for j2, w2 in windows:
                yield (j1, j2), w1 * w2


@dataclass(eq=False)
class DiagonalizedOperator:
    """Spectral data of an assembled matrix."""
    table: EigenvalueTable
    vectors: np.ndarray          # columns are eigenvectors, same order as table
    dominant: list               # dominant basis multi-index per eigenvector
    untrusted: np.ndarray        # True where the eigenpair leans on the edge
    residual: float

    def by_index(self) -> dict:
        """Eigenvalue keyed by dominant basis index (trusted entries only)."""
        out = {}
        for i, idx in enumerate(self.dominant):
            if not self.untrusted[i] and idx not in out:
                out[idx] = float(self.table.values[i])
        return out


def diagonalize(op: OperatorMatrix) -> DiagonalizedOperator:
    """Full eigen-decomposition of a Hermitian operator matrix.

    Eigenvalues descend; exact ties order by the lexicographic dominant
    coefficient index.  The residual max_i ||A v_i - lambda_i v_i|| must stay
    below 1e-9 * ||A||.
    """
    herm = op.hermiticity()
    if herm > 1e-10 * max(1.0, float(np.abs(op.matrix).max())):
        raise DomainError(f"matrix is not Hermitian (residual {herm:.2e})")
    H = (op.matrix + op.matrix.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(H)
    dominant = [op.indices[int(np.argmax(np.abs(vecs[:, i])))]
                for i in range(vals.size)]
    order = np.lexsort(tuple(
        np.array([dom[axis] for dom in dominant])
        for axis in reversed(range(len(op.indices[0])))) + (-vals,))
    vals = vals[order]
    vecs = vecs[:, order]
    dominant = [dominant[i] for i in order]
    residual = float(max(np.linalg.norm(H @ vecs[:, i] - vals[i] * vecs[:, i])
                         for i in range(vals.size)))
    scale = max(1.0, float(np.abs(H).max()))
    if residual > 1e-9 * scale:
        raise ArithmeticError(f"eigenpair residual {residual:.2e} out of contract")
    per_axis_max = [max(idx[a] for idx in op.indices)
                    for a in range(len(op.indices[0]))]
    untrusted = np.array([
        any(idx[a] > per_axis_max[a] - 2 for a in range(len(idx)))
        for idx in dominant])
    table = EigenvalueTable(
        indices=dominant, values=vals, window=op.basis,
        mask=op.mask, method="matrix",
        errors=np.full(vals.size, op.diagnostics.get("quad_error", 0.0)))
    return DiagonalizedOperator(table=table, vectors=vecs, dominant=dominant,
                                untrusted=untrusted, residual=residual)


@dataclass(eq=False)
class OrthogonalityReport:
    """Gram matrices of a transform family for dz and for F(z) dz."""
    indices: list
    gram_plane: np.ndarray
    gram_mask: np.ndarray
    offdiag_plane: float
    offdiag_mask: float
    diagonal_mask: np.ndarray

    def passed(self, tol_plane: float = 1e-6, tol_mask: float = 1e-6) -> bool:
        return self.offdiag_plane <= tol_plane and self.offdiag_mask <= tol_mask

    def summary(self) -> str:
        return (f"plane off-diagonal max {self.offdiag_plane:.3e}, "
                f"mask off-diagonal max {self.offdiag_mask:.3e}")


def verify_double_orthogonality(family, mask, n_basis: int) -> OrthogonalityReport:
    """Gram matrices of {V_g psi_n} under dz and under F(z) dz.

    family: ``("hermite", k)`` or ``("hagedorn", frame, k)``.  Diagonal
    mask-Grams certify the family as eigenfunctions of the localization
    operator with that mask; the diagonal holds the candidate eigenvalues.
    """
    kind = family[0]
    if kind == "hermite":
        k = as_multi_index(family[1])
        d = len(k)
        if getattr(mask, "d", d) != d:
            raise DomainError(
                f"mask dimension {mask.d} does not match family index length {d}")
        full = MaskSpec(d=d, constant=0.0, smooth=lambda r: np.ones(r.shape[:-1]),
                        label="plane")
        indices = _check_basis(n_basis, d)
        gram_plane, _ = _hermite_entries_polyradial(full, k, indices)
        if isinstance(mask, PlanarMask):
            gram_mask = _planar_gram(
                mask, lambda idx, z: hermite_stft_closed(idx, k, z), indices)
            gram_mask = gram_mask + mask.constant * np.eye(len(indices))
        else:
            gram_mask, _ = _hermite_entries_polyradial(mask, k, indices)
            gram_mask = gram_mask + mask.constant * np.eye(len(indices))
    elif kind == "hagedorn":
        frame, k = family[1], as_multi_index(family[2])
        if isinstance(mask, PlanarMask):
            raise DomainError("planar masks pair with Hermite windows only")
        d = frame.d
        if mask.d != d or len(k) != d:
            raise DomainError(
                f"mask dimension {mask.d} / index length {len(k)} must match "
                f"frame dimension {d}")
        indices = _check_basis(n_basis, d)
        full = MaskSpec(d=d, constant=0.0, smooth=lambda r: np.ones(r.shape[:-1]),
                        label="plane")
        gram_plane, _ = _hagedorn_entries(full, frame, k, indices)
        gram_mask, _ = _hagedorn_entries(mask, frame, k, indices)
        gram_mask = gram_mask + mask.constant * np.eye(len(indices))
    else:
        raise DomainError(f"unknown family {family!r}")
    off = ~np.eye(len(indices), dtype=bool)
    return OrthogonalityReport(
        indices=indices,
        gram_plane=gram_plane, gram_mask=gram_mask,
        offdiag_plane=float(np.abs(gram_plane[off]).max()),
        offdiag_mask=float(np.abs(gram_mask[off]).max()),
        diagonal_mask=np.real(np.diag(gram_mask)))
