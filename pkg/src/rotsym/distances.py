"""
Upper bounds on the Lipschitz and intrinsic flat distances to the model.

Two intrinsic flat estimates are provided.  Both take a bi-Lipschitz
constant between two Riemannian manifolds together with diameter, volume
and boundary-area bounds.  :func:`tube_comparison` feeds them the
neighbourhoods of a symmetric sphere in ``M`` and in the appended model.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .comparison import model_sigma, phi, setup
from .errors import TubeEscapesRegion

LAKZIAN_GAP_MARGIN = 1e-6


def ifd_bound_sorwen(n, d_lip, D1, D2, V1, A1):
    """``((n+1)/2) lam^(n-1) (lam - 1) max(D1, D2) (V1 + A1)`` with ``lam = exp(d_lip)``."""
    lam = math.exp(d_lip)
    return 0.5 * (n + 1) * lam ** (n - 1) * math.expm1(d_lip) * max(D1, D2) * (V1 + A1)


def ifd_bound_lakzian(eps, D1, D2, V1, V2, A1, A2):
    """Return ``(t_gap, bound)`` for metrics comparable up to ``1 + eps``.

    ``t_gap`` is the infimum of the admissible filling heights; the bound is
    evaluated slightly above it because the gap condition is strict.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    t_gap = math.acos(1.0 / (1.0 + eps)) / math.pi * max(D1, D2)
    bound = 2.0 * t_gap * (1.0 + LAKZIAN_GAP_MARGIN) * (V1 + V2 + A1 + A2)
    return t_gap, bound


def filling_metric_lower(eps, t, t_i, D_i):
    """Cosine warp factor of the explicit filling at height ``t``."""
    return math.cos((t - t_i) * math.pi / D_i) ** 2


@dataclass(frozen=True)
class DistanceBounds:
    delta: float
    depth: float
    lip_bound: float
    lip_tube: float
    scale_in: float
    scale_out: float
    eps: float
    t_gap: float
    ifd_sorwen: float
    ifd_lakzian: float
    D1: float
    D2: float
    V1: float
    V2: float
    A1: float
    A2: float

    def to_dict(self):
        return asdict(self)


def _scale(target, image):
    if image == 0:
        return 1.0
    return target / image


def tube_comparison(M, A0, A1, D, rdelta_exponent=0.5, C=None):
    """Distance bounds between the ``D``-tubes about the spheres of area ``A1``.

    ``D1, V1, A1`` describe the tube in the appended model and
    ``D2, V2, A2`` the tube in ``M``.
    """
    if C is None:
        C = setup(M, rdelta_exponent)
    if A0 is not None and not math.isclose(A0, M.boundary_area, rel_tol=1e-9):
        raise ValueError(f"A0={A0!r} differs from the boundary area {M.boundary_area!r}")
    if not D > 0:
        raise ValueError("tube radius D must be positive")
    if not A1 > C.A_delta:
        raise TubeEscapesRegion(
            f"A1={A1!r} must exceed A_delta={C.A_delta!r} so the central sphere is preserved"
        )

    tube_m = M.tube(A1, D)
    tube_s = C.model.tube(A1, D)

    if C.delta == 0:
        # m_H is constant, so M is the model and phi is the identity
        scale_in = scale_out = 1.0
    else:
        # phi keeps the central sphere; measure where it sends the tube ends
        r_lo, r_hi = tube_m.r_interval
        sig_lo, sig_c, sig_hi = model_sigma(C, phi(C, np.array([r_lo, tube_m.center_r, r_hi])))
        s_lo, s_hi = tube_s.s_interval
        scale_in = _scale(tube_s.center_s - s_lo, sig_c - sig_lo)
        scale_out = _scale(s_hi - tube_s.center_s, sig_hi - sig_c)
    lip_tube = C.lip_bound + abs(math.log(scale_in)) + abs(math.log(scale_out))

    D1, D2 = C.model.tube_diameter_bound(tube_s), M.tube_diameter_bound(tube_m)
    V1, V2 = C.model.tube_volume(tube_s), M.tube_volume(tube_m)
    B1, B2 = C.model.tube_boundary_area(tube_s), M.tube_boundary_area(tube_m)
    eps = math.expm1(lip_tube)
    t_gap, lak = ifd_bound_lakzian(eps, D1, D2, V1, V2, B1, B2)
    return DistanceBounds(
        delta=C.delta, depth=C.depth, lip_bound=C.lip_bound, lip_tube=lip_tube,
        scale_in=scale_in, scale_out=scale_out, eps=eps, t_gap=t_gap,
        ifd_sorwen=ifd_bound_sorwen(M.n, lip_tube, D1, D2, V1, B1), ifd_lakzian=lak,
        D1=D1, D2=D2, V1=V1, V2=V2, A1=B1, A2=B2,
    )
