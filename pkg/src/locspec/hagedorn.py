"""Hagedorn wavepackets built on a Lagrangian frame (Q, P).

The ground state is the generalized Gaussian

    phi_0[Q,P](t) = 2^{d/4} det(Q)^{-1/2} e^{i pi <t, P Q^{-1} t>},

and the k-th wavepacket is phi_k = (2^{|k|} k!)^{-1/2} p_k(t) phi_0(t) with
polynomial prefactors generated by the vector three-term recurrence

    (p_{k+e_j})_j = 2 sqrt(2 pi) (Q^{-1} t) p_k - 2 Q^{-1} conj(Q) (k_j p_{k-e_j})_j.

With Q = Id, P = i Id these are exactly the product Hermite functions.  The
zero-diagonal family (Q^{-1} conj(Q) having zero diagonal) admits a Laguerre
closed form used for cross-checking.

The branch of det(Q)^{-1/2} is the reciprocal principal square root; the
global phase it fixes never enters any modulus or spectral quantity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .specfun import DomainError, as_multi_index, index_order, laguerre
from .symplectic import LagrangianFrame, validate_frame

__all__ = [
    "Wavepacket", "LadderCheck", "gaussian_ground", "polynomial_prefactor",
    "prefactor_family", "wavepacket_eval", "apply_lowering", "ladder_lower",
    "zero_diagonal_frame", "zero_diagonal_abs", "hermite_frame",
]


@dataclass(frozen=True, eq=False)
class Wavepacket:
    """Immutable descriptor of phi_k[Q,P]."""
    frame: LagrangianFrame
    index: tuple

    @property
    def dim(self) -> int:
        return self.frame.d

    def __post_init__(self):
        object.__setattr__(self, "index", as_multi_index(self.index))
        if len(self.index) != self.frame.d:
            raise DomainError(
                f"index length {len(self.index)} != frame dimension {self.frame.d}")

    def __call__(self, t):
        return wavepacket_eval(self, t)


def hermite_frame(d: int) -> LagrangianFrame:
    """The frame (Id, i Id) whose wavepackets are the product Hermite functions."""
    return validate_frame(np.eye(d), 1j * np.eye(d))


def _points(t, d: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if d == 1 and (t.ndim == 0 or t.shape[-1] != 1):
        t = t[..., None]
    if t.shape[-1] != d:
        raise DomainError(f"points have dimension {t.shape[-1]}, frame has {d}")
    return t


def gaussian_ground(frame: LagrangianFrame, t):
    """Ground-state value phi_0[Q,P](t); t has shape (..., d)."""
    t = _points(t, frame.d)
    b = frame.P @ frame.q_inv
    quad = np.einsum("...i,ij,...j->...", t, b, t)
    det_root = np.sqrt(np.linalg.det(frame.Q))  # principal branch
    out = 2.0 ** (frame.d / 4.0) / det_root * np.exp(1j * np.pi * quad)
    return out if out.shape else complex(out)


def prefactor_family(frame: LagrangianFrame, k, t) -> dict:
    """All prefactors p_j(t) for j <= k componentwise, keyed by multi-index.

    Evaluates the recurrence once over the whole rectangle of indices, which
    is what grid sampling and Gram assembly need.
    """
    k = as_multi_index(k)
    d = frame.d
    if len(k) != d:
        raise DomainError(f"index length {len(k)} != frame dimension {d}")
    t = _points(t, d)
    base = t.shape[:-1]
    lead = 2.0 * math.sqrt(2.0 * math.pi) * np.einsum(
        "ij,...j->...i", frame.q_inv, t.astype(complex))
    M = frame.prefactor_matrix
    zero = (0,) * d
    values = {zero: np.ones(base, dtype=complex)}

    def lower(idx, j):
        out = list(idx)
        out[j] -= 1
        return tuple(out)

    # fill the index rectangle level by level so every neighbor exists
    for level in range(sum(k)):
        for idx in _level_indices(k, level):
            if idx not in values:
                continue
            p_here = values[idx]
            stack = np.stack(
                [idx[l] * values.get(lower(idx, l), np.zeros(base, dtype=complex))
                 for l in range(d)], axis=0)
            correction = np.tensordot(M, stack, axes=(1, 0))
            for j in range(d):
                up = list(idx)
                up[j] += 1
                up = tuple(up)
                if all(u <= kk for u, kk in zip(up, k)) and up not in values:
                    values[up] = lead[..., j] * p_here - 2.0 * correction[j]
    return values


def _level_indices(k, level):
    def rec(prefix, remaining, budget):
        if not remaining:
            if budget == 0:
                yield tuple(prefix)
            return
        cap = min(remaining[0], budget)
        for v in range(cap + 1):
            yield from rec(prefix + [v], remaining[1:], budget - v)
    yield from rec([], list(k), level)


def polynomial_prefactor(frame: LagrangianFrame, k, t):
    """Prefactor polynomial p_k(t); depends on Q only through Q^{-1} and Q^{-1} conj(Q)."""
    k = as_multi_index(k)
    out = prefactor_family(frame, k, t)[k]
    return out if out.shape else complex(out)


def wavepacket_eval(wp, t):
    """Pointwise value of phi_k[Q,P] at t (shape (..., d))."""
    frame, k = (wp.frame, wp.index) if isinstance(wp, Wavepacket) else wp
    k = as_multi_index(k)
    norm = math.sqrt(2.0 ** index_order(k)
                     * math.prod(math.factorial(v) for v in k))
    out = polynomial_prefactor(frame, k, t) / norm * gaussian_ground(frame, t)
    return out if np.asarray(out).shape else complex(out)


def apply_lowering(frame: LagrangianFrame, j: int, f: Callable, t, step: float = 1e-4):
    """Lowering operator component A_j applied to a callable f at points t.

    A_j f = -sqrt(pi) i ( sum_l P_{lj} t_l f(t) + (i / 2 pi) sum_l Q_{lj} d_l f(t) );
    the gradient is taken by central differences with the given step.
    """
    d = frame.d
    t = _points(t, d)
    fval = np.asarray(f(t), dtype=complex)
    mult = np.zeros(t.shape[:-1], dtype=complex)
    grad_term = np.zeros(t.shape[:-1], dtype=complex)
    for l in range(d):
        e = np.zeros(d)
        e[l] = step
        dl = (np.asarray(f(t + e), dtype=complex)
              - np.asarray(f(t - e), dtype=complex)) / (2.0 * step)
        mult += frame.P[l, j] * t[..., l] * fval
        grad_term += frame.Q[l, j] * dl
    return -math.sqrt(math.pi) * 1j * (mult + 1j / (2.0 * math.pi) * grad_term)


class LadderCheck(NamedTuple):
    residual: float
    tolerance: float
    ok: bool


def ladder_lower(wp: Wavepacket, j: int, points=None, step: float = 1e-4) -> LadderCheck:
    """Numerically verify A_j phi_k = sqrt(k_j) phi_{k - e_j} on a point grid.

    For k_j = 0 the operator annihilates and the residual is checked against
    zero instead.  The tolerance scales with |k| (finite-difference error
    grows with the polynomial degree).
    """
    frame, k = wp.frame, wp.index
    d = frame.d
    if not 0 <= j < d:
        raise DomainError(f"axis {j} out of range for dimension {d}")
    if points is None:
        ax = np.linspace(-2.0, 2.0, 9)
        points = np.stack(np.meshgrid(*([ax] * d), indexing="ij"),
                          axis=-1).reshape(-1, d)
    lhs = apply_lowering(frame, j, lambda t: wavepacket_eval((frame, k), t),
                         points, step=step)
    if k[j] == 0:
        rhs = np.zeros_like(lhs)
    else:
        low = list(k)
        low[j] -= 1
        rhs = math.sqrt(k[j]) * wavepacket_eval((frame, tuple(low)), points)
    residual = float(np.abs(lhs - rhs).max())
    tol = 1e-5 * (1.0 + index_order(k)) ** 2
    return LadderCheck(residual=residual, tolerance=tol, ok=residual <= tol)


def zero_diagonal_frame() -> LagrangianFrame:
    """The explicit 2-D zero-diagonal frame with q1 = q2 = 1, theta = pi/4.

    Q = [[1, (1-i)/sqrt2], [(1-i)/sqrt2, 1]], P = (i-1) Id; the prefactor
    matrix Q^{-1} conj(Q) is [[0, e^{i pi/4}], [e^{i pi/4}, 0]].
    """
    s = 1.0 / math.sqrt(2.0)
    Q = np.array([[1.0, (1.0 - 1j) * s], [(1.0 - 1j) * s, 1.0]], dtype=complex)
    P = np.array([[1j - 1.0, 0.0], [0.0, 1j - 1.0]], dtype=complex)
    return validate_frame(Q, P)


def zero_diagonal_abs(frame: LagrangianFrame, n, t):
    """|phi_n[Q,P]| in Laguerre closed form, valid for zero-diagonal frames.

    With xi(t) = <(Q Q*)^{-1} t, t> and m = min(n), M = max(n) (d = 2):

        |phi_n(t)| = 2^{1/4} sqrt(m!/M!) (2 pi xi)^{(M-m)/2}
                     |L_m^{M-m}(2 pi xi)| e^{-pi xi}.
    """
    n = as_multi_index(n)
    if len(n) != 2:
        raise DomainError("zero-diagonal closed form is for d = 2")
    off = frame.prefactor_matrix
    if np.abs(np.diag(off)).max() > 1e-10:
        raise DomainError("frame is not zero-diagonal")
    t = _points(t, 2)
    cov_inv = np.linalg.inv(frame.Q @ frame.Q.conj().T).real
    xi = np.einsum("...i,ij,...j->...", t, cov_inv, t)
    lo, hi = min(n), max(n)
    amp = 2.0 ** 0.25 * math.sqrt(math.factorial(lo) / math.factorial(hi))
    arg = 2.0 * np.pi * xi
    out = amp * arg ** ((hi - lo) / 2.0) * np.abs(laguerre(lo, float(hi - lo), arg)) \
        * np.exp(-np.pi * xi)
    return out if np.asarray(out).shape else float(out)
