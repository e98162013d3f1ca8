"""Vectorized adaptive Gauss-Kronrod (G7/K15) quadrature for complex integrands.

All panels that miss their share of the tolerance are bisected together, so
the integrand is called on large node batches.  Panel order is fixed, which
makes results bit-reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Kronrod abscissae (non-negative half) and weights; Gauss weights at the odd nodes
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

NODES = np.concatenate((-_XGK[:-1], _XGK[::-1]))  # 15 nodes in increasing order
K_WEIGHTS = np.concatenate((_WGK[:-1], _WGK[::-1]))
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[1:7:2] = _WG[:3]
G_WEIGHTS[9:14:2] = _WG[2::-1]
G_WEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    panels: int
    evaluations: int
    converged: bool


class QuadratureError(RuntimeError):
    pass


def _rule(f, a: np.ndarray, b: np.ndarray):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("integrand returned non-finite values")
    k = half * (fx @ K_WEIGHTS)
    g = half * (fx @ G_WEIGHTS)
    return k, np.abs(k - g)


def integrate(f, a: float, b: float, *, atol: float = 0.0, rtol: float = 1e-12,
              initial_panels: int = 8, max_panels: int = 20000, breakpoints=()) -> QuadResult:
    """Integrate vectorized ``f`` over ``[a, b]``.

    Converges when the summed error estimate is below ``max(atol, rtol*|I|)``.
    ``breakpoints`` are included in the initial panel edges.
    """
    if not b > a:
        if b == a:
            return QuadResult(0j, 0.0, 0, 0, True)
        raise ValueError("integrate needs a < b")
    edges = np.unique(np.concatenate((np.linspace(a, b, initial_panels + 1),
                                      [x for x in breakpoints if a < x < b])))
    lo, hi = edges[:-1], edges[1:]
    val, err = _rule(f, lo, hi)
    evals = 15 * len(lo)
    # converged panels are frozen and summed once
    done_val, done_err = 0j, 0.0
    while True:
        total = done_val + val.sum()
        tol = max(atol, rtol * abs(total))
        total_err = done_err + err.sum()
        if total_err <= tol:
            return QuadResult(complex(total), float(total_err), len(lo), evals, True)
        share = tol / max(1, len(lo))
        bad = err > share
        if not np.any(bad):
            bad = err >= np.max(err)
        if len(lo) + bad.sum() > max_panels:
            return QuadResult(complex(total), float(total_err), len(lo), evals, False)
        keep = ~bad
        # panels far below their share are retired
        retire = keep & (err < 1e-3 * share)
        done_val += val[retire].sum()
        done_err += err[retire].sum()
        keep &= ~retire
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate((lo[bad], mid))
        new_hi = np.concatenate((mid, hi[bad]))
        nv, ne = _rule(f, new_lo, new_hi)
        evals += 15 * len(new_lo)
        order = np.argsort(np.concatenate((lo[keep], new_lo)), kind="stable")
        lo = np.concatenate((lo[keep], new_lo))[order]
        hi = np.concatenate((hi[keep], new_hi))[order]
        val = np.concatenate((val[keep], nv))[order]
        err = np.concatenate((err[keep], ne))[order]
