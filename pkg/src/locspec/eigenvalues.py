"""Closed-form eigenvalues of (mixed-state) localization operators.

For a Hermite window phi_k and a polyradial mask, the eigenvalue attached to
phi_n is an integral over absolute space:

* disc, d = 1:      c_{n,k}(R) = (lo!/hi!) int_0^{pi R^2} t^{hi-lo}
                     (L_lo^{hi-lo}(t))^2 e^{-t} dt,  lo = min(n,k), hi = max(n,k)
* Reinhardt shadow: c_{n,k}(W) = int_W prod_j 2 pi r_j rho_{n_j,k_j}(r_j)^2 dr
* weighted (EFG):   c_{n,k}(F) = c + int_{V^d} prod_j u_j^{|n_j-k_j|} e^{-u_j}
                     (L^{..}_{..}(u_j))^2 (lo_j!/hi_j!) F_0(sqrt(u/pi)) du
* polyradial state: lambda_n = (-1)^{|n|} (4 pi)^d int F_0(r)
                     prod_j r_j L_{n_j}^0(4 pi r_j^2) e^{-2 pi r_j^2} dr  (+ c)
* Gaussian state:   lambda_n = c + (2 pi)^d int F_0(r) prod_j r_j
                     (gamma_{E_j} * W_j)(r_j) dr with E_j = 2 pi k_j through
                     the planar heat-kernel closed form; k_j are the
                     Williamson (symplectic) eigenvalues of the covariance.

Negative index differences are reduced componentwise through the Laguerre
reflection identity before integrating, so integrands never carry negative
powers.  All u-space integrals are truncated where the e^{-u} tail with the
relevant polynomial growth drops below 1e-13.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import GridFunction
from .phasespace import (heat_convolution_closed, hermite_wigner_closed,
                         stft_radial, convolve_fields)
from .quadrature import adaptive_gl, composite_gl, exp_tail_cut
from .reinhardt import MaskSpec, ShadowRegion, polyradial_check, shadow_quadrature
from .specfun import DomainError, as_multi_index, index_order, laguerre
from .symplectic import CovarianceMatrix, gaussian_admissible, williamson

__all__ = [
    "EigenvalueTable", "eig_disc", "eig_reinhardt", "eig_weighted",
    "eig_mixed", "eig_gaussian", "indices_upto", "NonPolyradialError",
]

BOUNDARY_K = 1.0 / (4.0 * math.pi)


class NonPolyradialError(ValueError):
    """State/symbol fails the rotation-invariance gate; carries the deviation."""

    def __init__(self, deviation: float):
        super().__init__(
            f"Weyl symbol deviates from polyradial by {deviation:.3e}; "
            "the Hermite functions are not eigenfunctions of this operator")
        self.deviation = deviation


def indices_upto(nmax: int, d: int, total: bool = False):
    """Multi-indices with every entry <= nmax (or |n| <= nmax when total)."""
    out = []

    def rec(prefix):
        if len(prefix) == d:
            out.append(tuple(prefix))
            return
        cap = nmax - sum(prefix) if total else nmax
        for v in range(cap + 1):
            rec(prefix + [v])
    rec([])
    return out


@dataclass
class EigenvalueTable:
    """Eigenvalues tagged by multi-index, window/state, mask, and method."""
    indices: list
    values: np.ndarray
    window: str
    mask: str
    method: str
    errors: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    def to_csv(self, path, comment: str | None = None) -> None:
        d = len(self.indices[0])
        cols = [f"n{j+1}" for j in range(d)] + ["window", "lambda", "est_error",
                                                "method"]
        with open(path, "w") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write(",".join(cols) + "\n")
            tag = self.window.replace(",", "/")   # keep the CSV rectangular
            for i, idx in enumerate(self.indices):
                err = self.errors[i] if self.errors is not None else 0.0
                row = [str(v) for v in idx] + [
                    tag, f"{self.values[i]:.17g}", f"{err:.3g}", self.method]
                fh.write(",".join(row) + "\n")


def _split_pair(n: int, k: int):
    return min(n, k), max(n, k)


def eig_disc(n: int, k: int, R: float) -> float:
    """Localization eigenvalue of phi_n for a radius-R disc mask, window phi_k (d=1).

    The k = 0 row reproduces the Gaussian-window values
    (1/n!) int_0^{pi R^2} t^n e^{-t} dt; R -> infinity gives 1 for every pair.
    """
    if n < 0 or k < 0:
        raise DomainError("indices must be >= 0")
    if R <= 0:
        raise DomainError(f"radius must be positive, got {R}")
    lo, hi = _split_pair(n, k)
    a = math.pi * R * R
    amp = math.factorial(lo) / math.factorial(hi)
    diff = hi - lo

    def f(t):
        return amp * t ** diff * laguerre(lo, float(diff), t) ** 2 * np.exp(-t)

    cap = min(a, exp_tail_cut(diff + 2 * lo + 2))
    res = adaptive_gl(f, 0.0, cap, rel_tol=1e-13)
    return res.value


def _radial_sq(n: int, k: int, r: np.ndarray) -> np.ndarray:
    """2 pi r rho_{n,k}(r)^2: the per-axis density of the shadow integrals."""
    rho = stft_radial(n, k, r)
    return 2.0 * np.pi * r * rho * rho


def eig_reinhardt(n, k, shadow: ShadowRegion, rel_tol: float | None = None) -> float:
    """Localization eigenvalue for the lifted-shadow mask chi_{tau^{-1}(W)}.

    Componentwise Laguerre reflection is applied inside :func:`stft_radial`,
    so any (n, k) ordering is accepted.  Bounded shadows integrate to 1e-8
    relative; unbounded ones use the Gaussian-decay truncation.
    """
    n = as_multi_index(n)
    k = as_multi_index(k)
    if len(n) != len(k) or len(n) != shadow.d:
        raise DomainError("index lengths must match the shadow dimension")

    def integrand(r):
        out = np.ones(r.shape[:-1], dtype=float)
        for j in range(shadow.d):
            out = out * _radial_sq(n[j], k[j], r[..., j])
        return out

    res = shadow_quadrature(shadow, integrand, rel_tol=rel_tol,
                            assume_gaussian_decay=True)
    if not res.converged:
        raise ArithmeticError(
            f"shadow quadrature did not reach tolerance (estimate {res.est_error:.2e})")
    return res.value


def _orthant_quadrature(fn, d: int, cap: float, order: int = 24, panels: int = 12):
    """Tensor composite Gauss-Legendre over [0, cap]^d with a halved-rule error."""
    x1, w1 = composite_gl(0.0, cap, panels, order)
    x0, w0 = composite_gl(0.0, cap, max(panels // 2, 1), order)

    def tensor(x, w):
        if d == 1:
            return float(np.dot(w, fn(x[:, None])))
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        pts = np.stack([X1.ravel(), X2.ravel()], axis=-1)
        return float((np.outer(w, w).ravel() * fn(pts)).sum())

    v1 = tensor(x1, w1)
    v0 = tensor(x0, w0)
    return v1, abs(v1 - v0)


def eig_weighted(n, k, mask: MaskSpec) -> float:
    """Eigenvalue c_{n,k}(F) for an EFG mask F = c + F_0(tau(.)).

    The constant contributes c (unit-norm window); the indicator part is
    routed through :func:`eig_reinhardt`; a smooth radial profile is
    integrated in the u = pi r^2 coordinates where the Gaussian weight is
    exactly e^{-u}.
    """
    n = as_multi_index(n)
    k = as_multi_index(k)
    d = mask.d
    if len(n) != d or len(k) != d:
        raise DomainError("index lengths must match the mask dimension")
    total = float(mask.constant)
    if mask.region is not None:
        total += mask.region_sign * eig_reinhardt(n, k, mask.region)
    if mask.smooth is not None:
        los = [min(a, b) for a, b in zip(n, k)]
        diffs = [abs(a - b) for a, b in zip(n, k)]
        amps = [math.factorial(lo) / math.factorial(lo + df)
                for lo, df in zip(los, diffs)]

        def fn(u):
            out = np.ones(u.shape[0], dtype=float)
            for j in range(d):
                uj = u[:, j]
                out = out * (amps[j] * uj ** diffs[j]
                             * laguerre(los[j], float(diffs[j]), uj) ** 2
                             * np.exp(-uj))
            return out * mask.smooth(np.sqrt(u / math.pi))

        degree = max(df + 2 * lo for df, lo in zip(diffs, los)) + 2
        cap = exp_tail_cut(degree)
        value, err = _orthant_quadrature(fn, d, cap)
        if err > 1e-8 * max(abs(value), 1e-12):
            value, err = _orthant_quadrature(fn, d, cap, order=32, panels=24)
        total += value
    return total


def eig_mixed(n, mask: MaskSpec, state, form: str = "auto") -> float:
    """Eigenvalue of phi_n under the mixed-state localization operator F * S.

    `state` selects the phase-space symbol of S:

    * ``"parity"``              delta symbol (S = 2^d P, Wigner pairing)
    * ``("hermite", k)``        pure state phi_k x phi_k
    * ``("thermal", E)``        thermal mixture at energy E (d = 1 axes)
    * ``("gaussian", M)``       admissible Gaussian covariance M
    * a :class:`GridFunction`   sampled Weyl symbol (d = 1; gated by a
      polyradiality check, deviation reported on failure)

    `form` picks among the equivalent pairings for the parity/grid routes:
    "absolute-space" reduces to an integral over V^d, "grid" integrates
    F (z) W(phi_n)(z) (resp. the FFT convolution) over the sampled plane.
    """
    n = as_multi_index(n)
    d = mask.d

    if isinstance(state, GridFunction):
        deviation = polyradial_check(state)
        if deviation > 1e-3:
            raise NonPolyradialError(deviation)
        if d != 1 or state.grid.d != 1:
            raise DomainError("grid-symbol route is implemented for d = 1")
        conv = convolve_fields(mask.on_grid(state.grid), state)
        z = state.grid.complex_points()[..., 0]
        wig = hermite_wigner_closed(n, n, z)
        return float(np.real((conv.values * wig).sum() * state.grid.cell))

    tag = state if isinstance(state, str) else state[0]
    if tag == "parity":
        if len(n) != d:
            raise DomainError("index length must match the mask dimension")
        if form in ("auto", "absolute-space"):
            sign = (-1.0) ** index_order(n)

            def integrand(r):
                out = np.full(r.shape[:-1], sign * (4.0 * math.pi) ** d)
                for j in range(d):
                    rj = r[..., j]
                    out = out * (rj * laguerre(n[j], 0.0, 4.0 * math.pi * rj * rj)
                                 * np.exp(-2.0 * math.pi * rj * rj))
                return out

            total = float(mask.constant)
            if mask.region is not None:
                res = shadow_quadrature(mask.region, integrand,
                                        assume_gaussian_decay=True)
                total += mask.region_sign * res.value
            if mask.smooth is not None:
                def fn(r):
                    return integrand(r) * mask.smooth(r)
                cap = math.sqrt(exp_tail_cut(2 * index_order(n) + 4) / (2 * math.pi))
                value, err = _orthant_quadrature(fn, d, cap)
                total += value
            return total
        if form == "grid":
            from .grids import default_grid
            grid = default_grid(d)
            if d != 1:
                raise DomainError("grid form is implemented for d = 1")
            z = grid.complex_points()[..., 0]
            F = mask.value(z)
            wig = hermite_wigner_closed(n, n, z)
            return float(np.real((F * wig).sum() * grid.cell))
        raise DomainError(f"unknown form {form!r}")

    if tag == "hermite":
        k = as_multi_index(state[1])
        return eig_weighted(n, k, mask)

    if tag == "thermal":
        E = float(state[1])
        if E < 0:
            raise DomainError(f"thermal energy must be >= 0, got {E}")
        ks = (BOUNDARY_K + E / (2.0 * math.pi),) * d
        return eig_gaussian(n, mask, ks)

    if tag == "gaussian":
        M = state[1]
        if isinstance(M, CovarianceMatrix):
            M = M.M
        if not gaussian_admissible(M):
            raise DomainError("covariance is not admissible: M + iJ/(4 pi) has "
                              "a negative eigenvalue")
        _, ks = williamson(M)
        if len(ks) != d:
            raise DomainError("covariance dimension does not match the mask")
        return eig_gaussian(n, mask, tuple(ks))

    raise DomainError(f"unknown state descriptor {state!r}")


def eig_gaussian(n, mask: MaskSpec, ks, boundary_tol: float = 1e-9) -> float:
    """Eigenvalue of phi_n for a Gaussian state with Williamson eigenvalues ks.

    Each axis contributes the planar heat-kernel convolution
    (gamma_{2 pi k_j} * W(phi_{n_j}))(r_j); admissibility requires
    k_j >= 1/(4 pi).  Exactly at the boundary the state degenerates to the
    Gaussian pure state and the value is the spectrogram eigenvalue
    c_{n,0}(F) (handled explicitly)."""
    n = as_multi_index(n)
    d = mask.d
    ks = tuple(float(v) for v in ks)
    if len(n) != d or len(ks) != d:
        raise DomainError("index/eigenvalue lengths must match the mask dimension")
    if any(k < BOUNDARY_K - boundary_tol for k in ks):
        raise DomainError(
            f"symplectic eigenvalues {ks} below the admissibility bound 1/(4 pi)")
    if all(abs(k - BOUNDARY_K) <= boundary_tol for k in ks):
        return eig_weighted(n, (0,) * d, mask)
    if any(abs(k - BOUNDARY_K) <= boundary_tol for k in ks):
        raise DomainError("mixed boundary/interior Williamson eigenvalues are not "
                          "supported; perturb the boundary axes")
    es = [2.0 * math.pi * k for k in ks]

    def integrand(r):
        out = np.full(r.shape[:-1], (2.0 * math.pi) ** d)
        for j in range(d):
            rj = r[..., j]
            out = out * rj * heat_convolution_closed(n[j], es[j], rj)
        return out

    # slowest Gaussian factor decays like e^{-pi r^2 / (E + 1/2)}
    spread = max(es) + 0.5
    rmax = math.sqrt(exp_tail_cut(2 * index_order(n) + 4) * spread / math.pi)
    total = float(mask.constant)   # constant shifts by c * tr(S) = c
    if mask.region is not None:
        res = shadow_quadrature(mask.region, integrand,
                                assume_gaussian_decay=True, rmax=rmax)
        total += mask.region_sign * res.value
    if mask.smooth is not None:
        def fn(r):
            return integrand(r) * mask.smooth(r)
        value, err = _orthant_quadrature(fn, d, rmax)
        if err > 1e-8 * max(abs(value), 1e-12):
            value, err = _orthant_quadrature(fn, d, rmax, order=32, panels=24)
        total += value
    return total
