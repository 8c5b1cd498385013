"""
Vectorised adaptive Gauss-Kronrod quadrature and monotone inversion.

Every panel of a batch is refined independently, so integrating from one
grid node to thousands of query points costs a handful of numpy calls.
Callers are expected to have removed endpoint singularities by a change of
variables and to pass kinks of the integrand as panel boundaries.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureFailure

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights live on the odd-indexed Kronrod nodes.
_WG = np.array([
    0.0, 0.129484966168869693270611432679082,
    0.0, 0.279705391489276667901467771423780,
    0.0, 0.381830050505118944950369775488975,
    0.0, 0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])


def gauss_kronrod(f, a, b, rtol=1e-10, atol=0.0, max_rounds=80, max_panels=4_000_000):
    """
    Integrate ``f`` over each interval ``[a_i, b_i]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand; receives an array of any shape and must return
        an array of the same shape.
    a, b : array_like
        Interval endpoints, broadcast against each other.
    rtol, atol : float
        A panel is accepted once ``|K15 - G7| <= max(rtol * |K15|, atol)``.

    Returns
    -------
    ndarray
        Integral per interval, shaped like the broadcast of ``a`` and ``b``.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    shape = a.shape
    lo = a.ravel().copy()
    hi = b.ravel().copy()
    result = np.zeros(lo.size)
    owner = np.arange(lo.size)

    keep = hi != lo
    lo, hi, owner = lo[keep], hi[keep], owner[keep]

    for _ in range(max_rounds):
        if lo.size == 0:
            return result.reshape(shape)
        if lo.size > max_panels:
            break
        centre = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        with np.errstate(invalid="ignore", divide="ignore"):
            fx = f(centre[:, None] + half[:, None] * NODES[None, :])
        kronrod = half * (fx @ KRONROD_WEIGHTS)
        gauss = half * (fx @ GAUSS_WEIGHTS)
        err = np.abs(kronrod - gauss)
        if not np.all(np.isfinite(kronrod)):
            raise QuadratureFailure("integrand is not finite on a quadrature node")
        done = (err <= rtol * np.abs(kronrod)) | (err <= atol)
        np.add.at(result, owner[done], kronrod[done])

        todo = ~done
        lo, hi, owner, centre = lo[todo], hi[todo], owner[todo], centre[todo]
        if np.any((centre == lo) | (centre == hi)):
            break
        lo, hi = np.concatenate([lo, centre]), np.concatenate([centre, hi])
        owner = np.concatenate([owner, owner])

    raise QuadratureFailure(
        f"adaptive quadrature did not reach rtol={rtol:g} ({lo.size} panels unresolved)"
    )


class CumulativeIntegral:
    """
    Running integral of ``f`` from ``nodes[0]``, tabulated on ``nodes``.

    Evaluating at an arbitrary point integrates only from the nearest node at
    or below it, so any kink of ``f`` must be one of the nodes.
    """

    def __init__(self, f, nodes, rtol=1e-10):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        self.f = f
        self.nodes = nodes
        self.rtol = rtol
        panels = gauss_kronrod(f, nodes[:-1], nodes[1:], rtol=rtol)
        self.table = np.concatenate([[0.0], np.cumsum(panels)])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.searchsorted(self.nodes, x, side="right") - 1
        j = np.clip(j, 0, self.nodes.size - 1)
        out = self.table[j] + gauss_kronrod(self.f, self.nodes[j], x, rtol=self.rtol)
        return out if out.ndim else float(out)

    def bracket(self, value):
        """Node interval ``[lo, hi]`` whose tabulated integrals straddle ``value``.

        ``hi`` is ``nan`` when ``value`` lies beyond the last tabulated node.
        """
        value = np.asarray(value, dtype=float)
        j = np.searchsorted(self.table, value, side="right") - 1
        j = np.clip(j, 0, self.nodes.size - 1)
        lo = self.nodes[j]
        hi = np.where(j + 1 < self.nodes.size, self.nodes[np.minimum(j + 1, self.nodes.size - 1)], np.nan)
        return lo, hi


def invert_monotone(func, deriv, target, lo, hi, ftol, maxiter=200):
    """
    Solve ``func(x) = target`` for increasing ``func`` on brackets ``[lo, hi]``.

    Safeguarded Newton: a Newton step is taken when it stays strictly inside
    the current bracket, otherwise the bracket is bisected. Works elementwise
    on arrays. ``deriv`` may return non-finite values (for example at a
    horizon), which simply force bisection.
    """
    target = np.atleast_1d(np.asarray(target, dtype=float)).copy()
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    ftol = np.broadcast_to(np.asarray(ftol, dtype=float), target.shape)
    x = 0.5 * (lo + hi)
    active = np.ones(target.shape, dtype=bool)

    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return x
        xi = x[idx]
        resid = np.asarray(func(xi)) - target[idx]
        ok = np.abs(resid) <= ftol[idx]
        below = resid < 0
        lo[idx] = np.where(below, xi, lo[idx])
        hi[idx] = np.where(below, hi[idx], xi)

        with np.errstate(divide="ignore", invalid="ignore"):
            step = xi - resid / np.asarray(deriv(xi))
        inside = np.isfinite(step) & (step > lo[idx]) & (step < hi[idx])
        x[idx] = np.where(ok, xi, np.where(inside, step, 0.5 * (lo[idx] + hi[idx])))

        width = hi[idx] - lo[idx]
        tiny = width <= 4 * np.finfo(float).eps * np.maximum(np.abs(hi[idx]), np.abs(lo[idx]))
        active[idx] = ~(ok | tiny)

    raise QuadratureFailure("monotone inversion did not converge")
