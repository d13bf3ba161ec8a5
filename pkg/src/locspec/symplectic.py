"""Lagrangian frames, their symplectic companions, and Williamson normal form.

A Lagrangian frame is a pair of invertible complex d x d matrices (Q, P) with

    Q^T P - P^T Q = 0,        Q* P - P* Q = 2i Id,

equivalently: the real 2d x 2d matrix T = [[Re Q, Im Q], [Re P, Im P]] is
symplectic (T^T J T = J with J = [[0, Id], [-Id, 0]]).  The module also
provides the Williamson diagonalization M = T K T^T of a symmetric
positive-definite covariance matrix and the admissibility test
"M + (i/4pi) J positive semidefinite" for Gaussian quantum states.

File interchange: frames are stored as JSON objects with keys
"d", "Q_re", "Q_im", "P_re", "P_im" (row-major lists); covariance matrices
as JSON objects with key "M".
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur, sqrtm

__all__ = [
    "FrameError", "LagrangianFrame", "SymplecticMatrix", "CovarianceMatrix",
    "standard_j", "validate_frame", "frame_to_symplectic", "symplectic_to_frame",
    "williamson", "symplectic_eigenvalues", "gaussian_admissible",
    "thermal_covariance", "random_symplectic",
    "load_frame", "save_frame", "load_covariance", "save_covariance",
]

SYMPLECTIC_TOL = 1e-10
FRAME_TOL = 1e-8


class FrameError(ValueError):
    """Frame/symplectic validation failure; carries the residual norms."""

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


def standard_j(d: int) -> np.ndarray:
    """The 2d x 2d symplectic form J = [[0, Id], [-Id, 0]]."""
    z = np.zeros((d, d))
    i = np.eye(d)
    return np.block([[z, i], [-i, z]])


@dataclass(frozen=True, eq=False)
class LagrangianFrame:
    """Validated pair (Q, P); construct through :func:`validate_frame`."""
    Q: np.ndarray
    P: np.ndarray

    @property
    def d(self) -> int:
        return self.Q.shape[0]

    @property
    def q_inv(self) -> np.ndarray:
        return np.linalg.inv(self.Q)

    @property
    def prefactor_matrix(self) -> np.ndarray:
        """Q^{-1} conj(Q): the only frame data the polynomial prefactors see."""
        return self.q_inv @ np.conj(self.Q)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """Real 2d x 2d symplectic matrix with named d x d blocks [[A, B], [C, D]]."""
    T: np.ndarray

    @property
    def d(self) -> int:
        return self.T.shape[0] // 2

    @property
    def A(self) -> np.ndarray:
        return self.T[: self.d, : self.d]

    @property
    def B(self) -> np.ndarray:
        return self.T[: self.d, self.d:]

    @property
    def C(self) -> np.ndarray:
        return self.T[self.d:, : self.d]

    @property
    def D(self) -> np.ndarray:
        return self.T[self.d:, self.d:]

    def inv(self) -> np.ndarray:
        # J^{-1} T^T J, exact for symplectic T
        J = standard_j(self.d)
        return -J @ self.T.T @ J


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Symmetric positive-definite 2d x 2d covariance matrix."""
    M: np.ndarray

    @property
    def d(self) -> int:
        return self.M.shape[0] // 2


def _require_square(X, name):
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise FrameError(f"{name} must be a square matrix, got shape {X.shape}")
    return X


def validate_frame(Q, P, tol: float = FRAME_TOL) -> LagrangianFrame:
    """Check the Lagrangian-frame conditions and return a validated frame.

    Raises :class:`FrameError` naming the failing condition with residual
    norms: invertibility of Q and P, symmetry relation Q^T P - P^T Q = 0,
    normalization Q* P - P* Q = 2i Id, and positivity of Im(P Q^{-1}).
    """
    Q = _require_square(Q, "Q")
    P = _require_square(P, "P")
    if Q.shape != P.shape:
        raise FrameError(f"Q and P must share shape, got {Q.shape} vs {P.shape}")
    d = Q.shape[0]
    residuals = {}
    for name, X in (("Q", Q), ("P", P)):
        if np.linalg.matrix_rank(X) < d:
            raise FrameError(f"{name} is singular", residuals)
    residuals["sym"] = float(np.abs(Q.T @ P - P.T @ Q).max())
    residuals["norm"] = float(np.abs(Q.conj().T @ P - P.conj().T @ Q
                                     - 2j * np.eye(d)).max())
    if residuals["sym"] > tol:
        raise FrameError(
            f"Q^T P - P^T Q = 0 violated (residual {residuals['sym']:.3e})", residuals)
    if residuals["norm"] > tol:
        raise FrameError(
            f"Q* P - P* Q = 2i Id violated (residual {residuals['norm']:.3e})", residuals)
    im_b = np.linalg.eigvalsh((np.imag(P @ np.linalg.inv(Q))
                               + np.imag(P @ np.linalg.inv(Q)).T) / 2.0)
    residuals["im_min"] = float(im_b.min())
    if residuals["im_min"] <= 0:
        raise FrameError("Im(P Q^{-1}) is not positive definite", residuals)
    return LagrangianFrame(Q=Q, P=P)


def frame_to_symplectic(frame: LagrangianFrame) -> SymplecticMatrix:
    """Assemble T = [[Re Q, Im Q], [Re P, Im P]] and assert T^T J T = J."""
    T = np.block([[np.real(frame.Q), np.imag(frame.Q)],
                  [np.real(frame.P), np.imag(frame.P)]])
    J = standard_j(frame.d)
    res = float(np.abs(T.T @ J @ T - J).max())
    if res > SYMPLECTIC_TOL:
        raise FrameError(f"assembled matrix is not symplectic (residual {res:.3e})",
                         {"symplectic": res})
    return SymplecticMatrix(T=T)


def symplectic_to_frame(T) -> LagrangianFrame:
    """Recover the canonical frame Q = A + iB, P = C + iD from a symplectic T.

    Other completions P exist for the same Q; only the canonical one is
    returned.
    """
    if isinstance(T, SymplecticMatrix):
        T = T.T
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    if n % 2 != 0 or T.shape != (n, n):
        raise FrameError(f"expected a 2d x 2d matrix, got shape {T.shape}")
    d = n // 2
    J = standard_j(d)
    res = float(np.abs(T.T @ J @ T - J).max())
    if res > SYMPLECTIC_TOL:
        raise FrameError(f"input is not symplectic (residual {res:.3e})",
                         {"symplectic": res})
    Q = T[:d, :d] + 1j * T[:d, d:]
    P = T[d:, :d] + 1j * T[d:, d:]
    return validate_frame(Q, P)


def williamson(M, tol: float = 1e-10):
    """Williamson normal form M = T K T^T of a positive-definite symmetric M.

    Returns (SymplecticMatrix, k) where k holds the d symplectic eigenvalues
    in ascending order and K = diag(k_1..k_d, k_1..k_d).

    The construction: with R = M^{1/2}, the matrix R J R is skew-symmetric;
    its real Schur form consists of 2 x 2 rotations encoding the k_j, and
    T = R O K^{-1/2} after permuting the Schur basis into (x..., omega...)
    order with positive upper-right block entries.
    """
    if isinstance(M, CovarianceMatrix):
        M = M.M
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n % 2 != 0 or M.shape != (n, n):
        raise FrameError(f"covariance must be 2d x 2d, got shape {M.shape}")
    if np.abs(M - M.T).max() > tol * max(1.0, np.abs(M).max()):
        raise FrameError("covariance matrix is not symmetric")
    if np.linalg.eigvalsh(M).min() <= 0:
        raise FrameError("covariance matrix is not positive definite")
    d = n // 2
    J = standard_j(d)
    root = np.real(sqrtm(M))
    skew = root @ J @ root
    skew = (skew - skew.T) / 2.0
    S, O = schur(skew)
    ks = []
    cols_x, cols_omega = [], []
    for i in range(d):
        block = S[2 * i: 2 * i + 2, 2 * i: 2 * i + 2]
        ks.append(abs(block[0, 1]))
        if block[0, 1] > 0:
            cols_x.append(2 * i)
            cols_omega.append(2 * i + 1)
        else:
            cols_x.append(2 * i + 1)
            cols_omega.append(2 * i)
    order = np.argsort(ks, kind="stable")
    ks = np.asarray(ks, dtype=float)[order]
    cols = [cols_x[i] for i in order] + [cols_omega[i] for i in order]
    Op = O[:, cols]
    scale = np.concatenate([ks, ks])
    T = root @ Op / np.sqrt(scale)[None, :]
    K = np.diag(scale)
    res_m = float(np.abs(T @ K @ T.T - M).max())
    res_j = float(np.abs(T.T @ J @ T - J).max())
    if res_j > 1e-8 or res_m > 1e-8 * max(1.0, np.abs(M).max()):
        raise FrameError("Williamson factorization failed to converge",
                         {"M": res_m, "J": res_j})
    return SymplecticMatrix(T=T), ks


def symplectic_eigenvalues(M) -> np.ndarray:
    """The d symplectic eigenvalues of M (moduli of eigenvalues of J M), ascending."""
    if isinstance(M, CovarianceMatrix):
        M = M.M
    M = np.asarray(M, dtype=float)
    d = M.shape[0] // 2
    ev = np.linalg.eigvals(standard_j(d) @ M)
    # spectrum is {+i k_j, -i k_j}; sorted moduli pair up
    return np.sort(np.abs(ev.imag))[::2]


def gaussian_admissible(M, tol: float = 1e-12) -> bool:
    """True iff M + (i/4pi) J is positive semidefinite.

    This is the condition for the centered Gaussian with covariance M to be
    the phase-space symbol of a positive trace-class operator; it is
    equivalent to every symplectic eigenvalue being >= 1/(4pi).
    """
    if isinstance(M, CovarianceMatrix):
        M = M.M
    M = np.asarray(M, dtype=float)
    d = M.shape[0] // 2
    H = M.astype(complex) + 1j / (4.0 * np.pi) * standard_j(d)
    return bool(np.linalg.eigvalsh(H).min() >= -tol)


def thermal_covariance(E: float, d: int = 1) -> CovarianceMatrix:
    """Covariance (1/4pi + E/2pi) Id of the energy-E thermal state."""
    if E < 0:
        raise FrameError(f"thermal energy must be >= 0, got {E}")
    m = 1.0 / (4.0 * np.pi) + E / (2.0 * np.pi)
    return CovarianceMatrix(M=m * np.eye(2 * d))


def random_symplectic(d: int, rng, scale: float = 0.4) -> np.ndarray:
    """Random symplectic 2d x 2d matrix exp(J S) with S symmetric."""
    from scipy.linalg import expm
    S = rng.normal(size=(2 * d, 2 * d)) * scale
    S = (S + S.T) / 2.0
    return expm(standard_j(d) @ S)


def save_frame(frame: LagrangianFrame, path) -> None:
    payload = {
        "d": frame.d,
        "Q_re": np.real(frame.Q).ravel().tolist(),
        "Q_im": np.imag(frame.Q).ravel().tolist(),
        "P_re": np.real(frame.P).ravel().tolist(),
        "P_im": np.imag(frame.P).ravel().tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_frame(path) -> LagrangianFrame:
    """Read a frame from its JSON file format and validate it."""
    with open(path) as fh:
        payload = json.load(fh)
    d = int(payload["d"])
    def mat(re_key, im_key):
        re = np.asarray(payload[re_key], dtype=float).reshape(d, d)
        im = np.asarray(payload[im_key], dtype=float).reshape(d, d)
        return re + 1j * im
    return validate_frame(mat("Q_re", "Q_im"), mat("P_re", "P_im"))


def save_covariance(cov: CovarianceMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump({"M": np.asarray(cov.M, dtype=float).tolist()}, fh, indent=1)


def load_covariance(path) -> CovarianceMatrix:
    """Read a covariance matrix from JSON ({"M": nested or flat row-major})."""
    with open(path) as fh:
        payload = json.load(fh)
    M = np.asarray(payload["M"], dtype=float)
    if M.ndim == 1:
        n = int(round(M.size ** 0.5))
        M = M.reshape(n, n)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2 != 0:
        raise FrameError(f"covariance must be square 2d x 2d, got shape {M.shape}")
    return CovarianceMatrix(M=M)
