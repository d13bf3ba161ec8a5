"""Hermite functions, generalized Laguerre polynomials and complex Hermite polynomials.

Everything is evaluated by exact three-term recurrences:

* Hermite functions ``phi_n`` seeded with ``phi_0(t) = 2^{1/4} e^{-pi t^2}``
  and stepped through ``t phi_n = (sqrt(n/pi) phi_{n-1} + sqrt((n+1)/pi) phi_{n+1}) / 2``,
* generalized Laguerre polynomials ``L_k^a`` stepped through
  ``(k+1) L_{k+1}^a = (2k+1+a-t) L_k^a - (k+a) L_{k-1}^a``,
* complex Hermite polynomials ``H_{n,k}(z) = sqrt(k!/n!) pi^{(n-k)/2} z^{n-k} L_k^{n-k}(pi |z|^2)``
  for ``k <= n``, with the other branch obtained from the Laguerre reflection
  identity ``((-t)^n / n!) L_j^{n-j}(t) = ((-t)^j / j!) L_n^{j-n}(t)``.

Accuracy envelope: orders up to ~50.  Above order 30 the recurrences
accumulate in extended precision (``np.longdouble``) to limit cancellation.
No asymptotic (large-order) regimes are provided.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

__all__ = [
    "DomainError", "PolyEval", "as_multi_index", "index_order", "index_factorial",
    "hermite", "hermite_product", "laguerre", "laguerre_direct",
    "laguerre_rescale", "complex_hermite", "laguerre_eval", "complex_hermite_eval",
]

#: recurrences switch to extended-precision accumulation above this order
EXTENDED_PRECISION_FROM = 30
#: documented accuracy envelope for all recurrences
ORDER_ENVELOPE = 50


class DomainError(ValueError):
    """Raised for negative orders or mismatched multi-index dimensions."""


class PolyEval(NamedTuple):
    """A polynomial-family evaluation together with its defining degree."""
    value: complex
    degree: int


def as_multi_index(k) -> tuple:
    """Normalize k to a tuple of non-negative ints (scalars become 1-tuples)."""
    if np.isscalar(k):
        k = (k,)
    out = tuple(int(v) for v in k)
    if any(v < 0 for v in out):
        raise DomainError(f"multi-index entries must be >= 0, got {out}")
    return out


def index_order(k) -> int:
    """|k| = sum of the entries."""
    return int(sum(as_multi_index(k)))


def index_factorial(k) -> float:
    """k! = product of factorials of the entries."""
    return float(math.prod(math.factorial(v) for v in as_multi_index(k)))


def _check_order(n: int, name: str) -> int:
    n = int(n)
    if n < 0:
        raise DomainError(f"{name} must be >= 0, got {n}")
    return n


def hermite(n: int, t):
    """n-th L2-normalized Hermite function at t (scalar or array).

    phi_0(t) = 2^{1/4} e^{-pi t^2}; higher orders follow the stable upward
    recurrence phi_{n+1} = 2 t sqrt(pi/(n+1)) phi_n - sqrt(n/(n+1)) phi_{n-1}.
    """
    n = _check_order(n, "hermite order")
    t_in = np.asarray(t, dtype=float)
    dtype = np.longdouble if n > EXTENDED_PRECISION_FROM else np.float64
    x = t_in.astype(dtype)
    p_prev = np.asarray(2.0 ** 0.25 * np.exp(-np.pi * x * x), dtype=dtype)
    if n == 0:
        out = p_prev
    else:
        p_cur = 2.0 * np.sqrt(np.pi) * x * p_prev
        for m in range(1, n):
            p_next = (2.0 * np.sqrt(np.pi / (m + 1.0)) * x * p_cur
                      - np.sqrt(m / (m + 1.0)) * p_prev)
            p_prev, p_cur = p_cur, p_next
        out = p_cur
    out = np.asarray(out, dtype=float)
    return out if out.shape else float(out)


def hermite_product(k, t):
    """Product Hermite function: prod_j phi_{k_j}(t_j).

    t has shape (..., d) with d = len(k); the last axis is the coordinate.
    """
    k = as_multi_index(k)
    t = np.asarray(t, dtype=float)
    if len(k) == 1 and (t.ndim == 0 or t.shape[-1] != 1):
        t = t[..., None]
    if t.shape[-1] != len(k):
        raise DomainError(
            f"point dimension {t.shape[-1]} does not match index length {len(k)}")
    out = np.ones(t.shape[:-1], dtype=float)
    for j, kj in enumerate(k):
        out = out * hermite(kj, t[..., j])
    return out if out.shape else float(out)


def laguerre(k: int, alpha: float, t):
    """Generalized Laguerre polynomial L_k^alpha(t) by the three-term recurrence.

    Valid for any real alpha (including the negative integer upper indices
    that appear through the reflection identity) and for complex arguments t
    (the polynomial recurrence holds verbatim over C).
    """
    k = _check_order(k, "laguerre degree")
    t_in = np.asarray(t)
    is_complex = np.iscomplexobj(t_in)
    if is_complex:
        dtype = np.clongdouble if k > EXTENDED_PRECISION_FROM else np.complex128
    else:
        dtype = np.longdouble if k > EXTENDED_PRECISION_FROM else np.float64
    x = t_in.astype(dtype)
    p_prev = np.ones_like(x)
    if k == 0:
        out = p_prev
    else:
        p_cur = 1.0 + alpha - x
        for m in range(1, k):
            p_next = ((2.0 * m + 1.0 + alpha - x) * p_cur
                      - (m + alpha) * p_prev) / (m + 1.0)
            p_prev, p_cur = p_cur, p_next
        out = p_cur
    out = np.asarray(out, dtype=complex if is_complex else float)
    if out.shape:
        return out
    return complex(out) if is_complex else float(out)


def laguerre_direct(k: int, alpha: float, t):
    """L_k^alpha(t) from the defining sum sum_j (-1)^j C(k+alpha, k-j) t^j / j!.

    Slower than the recurrence; kept as the independent second route.
    """
    k = _check_order(k, "laguerre degree")
    x = np.asarray(t, dtype=float)
    out = np.zeros_like(x)
    for j in range(k + 1):
        coeff = (-1.0) ** j / math.factorial(j) * _binom(k + alpha, k - j)
        out = out + coeff * x ** j
    return out if out.shape else float(out)


def _binom(a: float, m: int) -> float:
    # C(a, m) for real a, integer m >= 0
    out = 1.0
    for i in range(m):
        out *= (a - i) / (m - i)
    return out


def laguerre_rescale(n: int, b: float, t):
    """Binomial rescaling sum_j C(n,j) b^j (1-b)^{n-j} L_j^0(t).

    Equals L_n^0(b*t); the equality is asserted to 1e-10 relative as a
    self-check of both evaluation paths.
    """
    n = _check_order(n, "rescale degree")
    x = np.asarray(t, dtype=float)
    out = np.zeros_like(x)
    for j in range(n + 1):
        w = math.comb(n, j) * b ** j * (1.0 - b) ** (n - j)
        if w != 0.0:
            out = out + w * laguerre(j, 0.0, x)
    direct = laguerre(n, 0.0, b * x)
    scale = np.maximum(np.abs(direct), 1.0)
    if not np.all(np.abs(out - direct) <= 1e-10 * scale):
        raise AssertionError("Laguerre rescaling identity violated beyond tolerance")
    return out if out.shape else float(out)


def complex_hermite(n: int, k: int, z):
    """Complex Hermite polynomial H_{n,k}(z) (scalar or complex array).

    Only the k <= n branch is evaluated directly; the other case is mapped
    through the reflection identity, H_{n,k} = (-1)^{k-n} conj(H_{k,n}).
    """
    n = _check_order(n, "complex hermite index n")
    k = _check_order(k, "complex hermite index k")
    z = np.asarray(z, dtype=complex)
    if k > n:
        out = (-1.0) ** (k - n) * np.conj(complex_hermite(k, n, z))
    else:
        d = n - k
        amp = math.sqrt(math.factorial(k) / math.factorial(n)) * np.pi ** (d / 2.0)
        out = amp * z ** d * laguerre(k, float(d), np.pi * np.abs(z) ** 2)
    out = np.asarray(out, dtype=complex)
    return out if out.shape else complex(out)


def laguerre_eval(k: int, alpha: float, t: float) -> PolyEval:
    """Scalar Laguerre evaluation carrying its degree."""
    return PolyEval(complex(laguerre(k, alpha, t)), int(k))


def complex_hermite_eval(n: int, k: int, z: complex) -> PolyEval:
    """Scalar complex-Hermite evaluation carrying its total degree n + k."""
    return PolyEval(complex(complex_hermite(n, k, z)), int(n) + int(k))
