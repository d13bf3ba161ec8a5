"""Shared Gauss-Legendre machinery: cached nodes, composite panels, adaptive 1-D rules.

All integrands are expected to be numpy-vectorized callables.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np


@lru_cache(maxsize=64)
def _leggauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def gl_nodes(a: float, b: float, order: int = 32):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gl(a: float, b: float, panels: int, order: int = 16):
    """Nodes/weights of a composite Gauss-Legendre rule with equal panels."""
    edges = np.linspace(a, b, panels + 1)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gl_nodes(lo, hi, order)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


class QuadResult(NamedTuple):
    value: float
    est_error: float
    converged: bool


def adaptive_gl(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                rel_tol: float = 1e-10, abs_floor: float = 1e-300,
                order: int = 24, max_splits: int = 2000) -> QuadResult:
    """Adaptive panel-splitting Gauss-Legendre integration of a vectorized f.

    The per-panel error estimate is the difference between the order-`order`
    and order-`2*order` rules; panels are split at the midpoint until the
    summed estimate meets `rel_tol` relative to the accumulated integral.
    """
    panels = [(float(a), float(b))]
    values = {}
    errors = {}

    def eval_panel(lo, hi):
        x1, w1 = gl_nodes(lo, hi, order)
        x2, w2 = gl_nodes(lo, hi, 2 * order)
        v1 = float(np.real(np.dot(w1, f(x1))))
        v2 = float(np.real(np.dot(w2, f(x2))))
        values[(lo, hi)] = v2
        errors[(lo, hi)] = abs(v2 - v1)

    eval_panel(a, b)
    for _ in range(max_splits):
        total = sum(values.values())
        err = sum(errors.values())
        scale = max(abs(total), abs_floor)
        if err <= rel_tol * scale:
            return QuadResult(total, err, True)
        worst = max(panels, key=lambda p: errors[p])
        lo, hi = worst
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        panels.remove(worst)
        values.pop(worst)
        errors.pop(worst)
        panels.extend([(lo, mid), (mid, hi)])
        eval_panel(lo, mid)
        eval_panel(mid, hi)
    total = sum(values.values())
    err = sum(errors.values())
    return QuadResult(total, err, err <= rel_tol * max(abs(total), abs_floor))


def exp_tail_cut(poly_degree: int, tol: float = 1e-13) -> float:
    """Smallest U with u^m e^{-u} integrable tail below tol * m! past U.

    Used to truncate integrals of polynomial * e^{-u} over [0, inf).
    """
    m = max(poly_degree, 0)
    target = tol * math.factorial(min(m, 150)) if m <= 150 else tol * math.exp(
        math.lgamma(m + 1))
    u = float(m + 30)
    # Gamma(m+1, u) <= 2 u^m e^{-u} for u >= 2m; iterate a few times
    for _ in range(60):
        tail = math.exp(m * math.log(u) - u) if u > 0 else 1.0
        if 2.0 * tail <= target:
            return u
        u += 5.0
    return u


def angular_nodes(count: int):
    """Uniform angles on [0, 2pi) with trapezoid weights.

    Exact for trigonometric polynomials of degree < count.
    """
    theta = 2.0 * np.pi * np.arange(count) / count
    w = np.full(count, 2.0 * np.pi / count)
    return theta, w
