"""
Metric data of the manifold generated by a Hawking mass profile.

In geodesic coordinates ``g = ds^2 + r(s)^2 g0`` with
``(dr/ds)^2 = 1 - 2 m_H / r^(n-2)``.  The integrals for ``s(r)``, the graph
height ``z(r)`` and enclosed volume all have an inverse square root
singularity at the horizon, so they are computed in ``u = sqrt(r - r0)``
where the integrands are smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalDomain, OutOfDomain, SingularAtHorizon, UnboundedTail
from .profiles import require_admissible, sphere_area
from .quadrature import CumulativeIntegral, invert_monotone

RADICAND_CLAMP = 1e-14


def _scalar_or_array(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class Tube:
    """Closed metric neighbourhood of radius ``radius`` around a symmetric sphere."""

    center_area: float
    radius: float
    r_interval: tuple
    clipped_at_boundary: bool
    s_interval: tuple
    center_r: float
    center_s: float


class RotSymManifold:
    """
    Rotationally symmetric manifold with horizon boundary.

    Parameters
    ----------
    profile : AdmissibleProfile
        Generating Hawking mass function.
    r_max : float, optional
        Outer end of the cached coordinate tables.  Queries beyond it are
        still answered, just more slowly.
    quad_tol : float
        Relative tolerance of every quadrature.
    grid_size : int
        Number of log-spaced samples of ``r - r0`` in the tables; the piece
        boundaries of the profile are added to them.
    validate : bool
        Refuse inadmissible profiles.  Tests switch this off to build
        deliberately broken manifolds.
    """

    def __init__(self, profile, r_max=None, quad_tol=1e-10, grid_size=2048, validate=True):
        if validate:
            require_admissible(profile)
        self.profile = profile
        self.n = profile.n
        self.r0 = profile.r0
        self.quad_tol = quad_tol
        self.omega = sphere_area(self.n)
        self.r_max = self._default_r_max() if r_max is None else float(r_max)

        span = self.r_max - self.r0
        offsets = np.concatenate([
            [0.0],
            np.geomspace(1e-6 * span, span, grid_size - 1),
            [b - self.r0 for b in profile.breakpoints if b <= self.r_max],
        ])
        u_nodes = np.unique(np.sqrt(offsets))
        self._s = CumulativeIntegral(self._ds_du, u_nodes, quad_tol)
        self._z = CumulativeIntegral(self._dz_du, u_nodes, quad_tol)
        self._vol = CumulativeIntegral(self._dvol_du, u_nodes, quad_tol)
        self.grid = self.r0 + u_nodes ** 2
        self.grid[0] = self.r0

    def _default_r_max(self):
        k = self.n - 2
        m0 = 0.5 * self.r0 ** k
        candidates = [2.0 * b for b in self.profile.breakpoints] + [10.0 * self.r0]
        m_adm = self.profile.adm_mass
        if m_adm is not None:
            delta = max(m_adm / m0 - 1.0, 0.0)
            candidates.append(10.0 * (2.0 * m_adm) ** (1.0 / k))
            candidates.append(10.0 * self.r0 * (1.0 + math.sqrt(delta)) ** (1.0 / k))
        return max(candidates)

    # integrands in u = sqrt(r - r0)
    def _rad_u(self, u):
        t = u * u
        return self.profile.radicand(self.r0 + t, offset=t)

    def _ds_du(self, u):
        return 2.0 * u / np.sqrt(self._rad_u(u))

    def _q(self, r):
        # 2 m_H / r^(n-2) directly; 1 - radicand cancels far out
        return 2.0 * np.asarray(self.profile.m_hawking(r)) / np.power(r, self.n - 2)

    def _dz_du(self, u):
        return 2.0 * u * np.sqrt(self._q(self.r0 + u * u) / self._rad_u(u))

    def _dvol_du(self, u):
        r = self.r0 + u * u
        return self.omega * np.power(r, self.n - 1) * 2.0 * u / np.sqrt(self._rad_u(u))

    def _u(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r0):
            raise OutOfDomain(f"r must be >= r0={self.r0!r}")
        return np.sqrt(r - self.r0)

    @property
    def boundary_area(self):
        return self.omega * self.r0 ** (self.n - 1)

    @property
    def s_grid(self):
        return self._s.table

    @property
    def z_grid(self):
        return self._z.table

    def drds(self, r):
        """``dr/ds`` at areal radius ``r``; zero at the horizon."""
        rad = np.asarray(self.profile.radicand(r))
        if np.any(rad < -RADICAND_CLAMP):
            raise NumericalDomain("2 m_H / r^(n-2) exceeds 1: profile is supercritical")
        return _scalar_or_array(np.sqrt(np.maximum(rad, 0.0)))

    def dzdr(self, r):
        """Slope of the embedding graph ``z(r)``."""
        r = np.asarray(r, dtype=float)
        if np.any(r == self.r0):
            raise SingularAtHorizon("dz/dr diverges at the horizon")
        rad = np.asarray(self.profile.radicand(r))
        if np.any(rad <= 0):
            raise NumericalDomain("2 m_H / r^(n-2) reaches 1 away from the horizon")
        return _scalar_or_array(np.sqrt(self._q(r) / rad))

    def arclength(self, r):
        """Distance ``s(r)`` from the boundary to the sphere of radius ``r``."""
        return self._s(self._u(r))

    def height(self, r):
        """Embedding height ``z(r)`` with ``z(r0) = 0``."""
        return self._z(self._u(r))

    def enclosed_volume(self, r):
        """Volume of the region between the boundary and the sphere of radius ``r``."""
        return self._vol(self._u(r))

    def radius_at_arclength(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0):
            raise OutOfDomain("arclength must be nonnegative")
        flat = np.atleast_1d(s).ravel()
        lo, hi = self._s.bracket(flat)
        hi = np.where(np.isnan(hi), np.sqrt(np.maximum(flat, lo * lo)), hi)
        u = invert_monotone(self._s, self._ds_du, flat, lo, hi,
                            ftol=1e-2 * self.quad_tol * (1.0 + flat))
        r = np.where(flat == 0, self.r0, self.r0 + u * u)
        return _scalar_or_array(r.reshape(s.shape))

    def radius_at_height(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z < 0):
            raise OutOfDomain("height must be nonnegative")
        flat = np.atleast_1d(z).ravel()
        lo, hi = self._z.bracket(flat)
        beyond = np.isnan(hi)
        if np.any(beyond):
            top = np.full(flat.shape, self._z.nodes[-1])
            for _ in range(60):
                short = beyond & (np.asarray(self._z(top)) < flat)
                if not np.any(short):
                    break
                top = np.where(short, 2.0 * top, top)
            else:
                raise OutOfDomain("height exceeds the supremum of the embedding")
            hi = np.where(beyond, top, hi)
        u = invert_monotone(self._z, self._dz_du, flat, lo, hi,
                            ftol=1e-2 * self.quad_tol * (1.0 + flat))
        r = np.where(flat == 0, self.r0, self.r0 + u * u)
        return _scalar_or_array(r.reshape(z.shape))

    def scalar_curvature(self, r, side=None):
        """``R = 2 (n-1) m_H'(r) / r^(n-1)``; pass ``side`` at kinks."""
        r = np.asarray(r, dtype=float)
        dm = np.asarray(self.profile.dm_dr(r, side=side))
        return _scalar_or_array(2.0 * (self.n - 1) * dm / np.power(r, self.n - 1))

    def sup_abs_curvature(self, samples_per_piece=4097):
        """Sampled ``sup |R|`` taking one-sided values inside each piece."""
        prof = self.profile
        best = 0.0
        for i, p in enumerate(prof.pieces):
            hi = min(p.r_hi, max(self.r_max, p.r_lo))
            r = np.linspace(p.r_lo, hi, samples_per_piece)
            dm = np.asarray(prof._piece_slope(i, r))
            R = 2.0 * (self.n - 1) * dm / np.power(r, self.n - 1)
            best = max(best, float(np.max(np.abs(R))))
        return best

    def m_hawking(self, r):
        return self.profile.m_hawking(r)

    def adm_mass(self):
        m = self.profile.adm_mass
        if m is None:
            raise UnboundedTail("profile declares no finite limit at infinity")
        return m

    def area_of_sphere(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r0):
            raise OutOfDomain(f"r must be >= r0={self.r0!r}")
        return _scalar_or_array(self.omega * np.power(r, self.n - 1))

    def radius_of_area(self, area):
        area = np.asarray(area, dtype=float)
        if np.any(area < self.boundary_area * (1.0 - 1e-12)):
            raise OutOfDomain("area is smaller than the boundary area")
        r = np.maximum(np.power(area / self.omega, 1.0 / (self.n - 1)), self.r0)
        return _scalar_or_array(r)

    def sphere_distance(self, area_a, area_b):
        """Distance between the symmetric spheres of the two given areas."""
        s = self.arclength(self.radius_of_area([area_a, area_b]))
        return float(abs(s[1] - s[0]))

    def tube(self, area, radius):
        if radius < 0:
            raise ValueError("tube radius must be nonnegative")
        r_c = float(self.radius_of_area(area))
        s_c = float(self.arclength(r_c))
        s_lo, s_hi = max(s_c - radius, 0.0), s_c + radius
        if radius == 0:
            r_lo = r_hi = r_c
        else:
            r_lo, r_hi = self.radius_at_arclength(np.array([s_lo, s_hi]))
        return Tube(
            center_area=float(area), radius=float(radius),
            r_interval=(float(r_lo), float(r_hi)),
            clipped_at_boundary=s_c - radius < 0,
            s_interval=(s_lo, s_hi), center_r=r_c, center_s=s_c,
        )

    def tube_volume(self, tube):
        r_lo, r_hi = tube.r_interval
        vols = self.enclosed_volume(np.array([r_lo, r_hi]))
        return float(vols[1] - vols[0])

    def tube_boundary_area(self, tube):
        """Both boundary spheres; a clipped tube keeps the horizon as inner boundary."""
        return float(np.sum(self.area_of_sphere(np.array(tube.r_interval))))

    def tube_diameter_bound(self, tube):
        """Upper bound on the diameter from radial segments plus a half great circle."""
        return tube_diameter_bound(tube.s_interval, tube.center_s, tube.r_interval[1], tube.center_r)

    def embedding_rows(self, z_offset=0.0):
        """Rows ``(r, s, z, drds, m_hawking, scalar_curvature)`` on the cached grid."""
        r = self.grid
        return np.column_stack([
            r, self._s.table, self._z.table + z_offset, self.drds(r),
            self.profile.m_hawking(r), self.scalar_curvature(r, side="right"),
        ])


EMBEDDING_COLUMNS = ("r", "s", "z", "drds", "m_hawking", "scalar_curvature")


def tube_diameter_bound(s_interval, s_center, r_outer, r_center):
    # any two points reach each other radially then along half a great
    # circle, either on the sphere of one of them or on the central sphere
    s_lo, s_hi = s_interval
    through_level = (s_hi - s_lo) + math.pi * r_outer
    through_center = 2.0 * max(s_center - s_lo, s_hi - s_center) + math.pi * r_center
    return min(through_level, through_center)
