"""
Riemannian Schwarzschild space and its extension by a cylinder.

The appended space glues ``[-L, 0] x S^(n-1)`` with the round metric of
radius ``r0`` to the horizon of Schwarzschild space of mass ``m``.  Points are
addressed either by the graph height ``z`` (cylinder at ``z < 0``) or by the
arclength ``sigma = z + L`` from the bottom of the cylinder.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import OutOfDomain, SingularAtHorizon
from .geometry import RotSymManifold, Tube, _scalar_or_array, tube_diameter_bound
from .profiles import schwarzschild_profile, sphere_area


class AppendedSchwarzschild:
    """Schwarzschild space of mass ``m`` with a cylinder of length ``L`` below the horizon."""

    def __init__(self, n, m, L=0.0, quad_tol=1e-10, r_max=None, exterior=None):
        if not L >= 0:
            raise ValueError("cylinder length must be nonnegative")
        self.n = n
        self.m = float(m)
        self.L = float(L)
        self.k = n - 2
        self.quad_tol = quad_tol
        self.r_max = r_max
        self.profile = schwarzschild_profile(n, m)
        self.r0 = self.profile.r0
        self.omega = sphere_area(n)
        if exterior is not None:
            self.__dict__["exterior"] = exterior

    @cached_property
    def exterior(self):
        """The Schwarzschild part as a :class:`RotSymManifold`."""
        return RotSymManifold(self.profile, r_max=self.r_max, quad_tol=self.quad_tol, validate=False)

    def with_length(self, L):
        """Same exterior, different cylinder; the coordinate tables are shared."""
        return AppendedSchwarzschild(self.n, self.m, L, self.quad_tol, self.r_max, self.exterior)

    @property
    def boundary_area(self):
        return self.omega * self.r0 ** (self.n - 1)

    def _check_r(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r0):
            raise OutOfDomain(f"r must be >= r0={self.r0!r}")
        return r

    def z_sch(self, r):
        """Graph height of the sphere of radius ``r``, zero at the horizon."""
        r = self._check_r(r)
        if self.k == 1:
            return _scalar_or_array(np.sqrt(8.0 * self.m * (r - self.r0)))
        return self.exterior.height(r)

    def r_sch(self, z):
        """Areal radius at height ``z``; the cylinder has radius ``r0``."""
        z = np.asarray(z, dtype=float)
        if np.any(z < -self.L):
            raise OutOfDomain(f"z must be >= -L={-self.L!r}")
        zp = np.maximum(z, 0.0)
        if self.k == 1:
            r = self.r0 + zp * zp / (8.0 * self.m)
        else:
            r = np.asarray(self.exterior.radius_at_height(zp))
        return _scalar_or_array(np.where(z <= 0, self.r0, r))

    def metric_coeff_radial(self, r):
        """``g_rr = (1 - 2m / r^(n-2))^(-1)`` on the Schwarzschild part."""
        r = self._check_r(r)
        if np.any(r == self.r0):
            raise SingularAtHorizon("g_rr diverges at the horizon")
        return _scalar_or_array(1.0 / np.asarray(self.profile.radicand(r)))

    def metric_coeff_vertical(self, z):
        """``g_zz``: ``r(z)^(n-2) / (2m)`` above the horizon, 1 on the cylinder."""
        z = np.asarray(z, dtype=float)
        r = np.asarray(self.r_sch(z))
        return _scalar_or_array(np.where(z < 0, 1.0, np.power(r, self.k) / (2.0 * self.m)))

    def sphere_radius(self, z):
        return self.r_sch(z)

    def scalar_curvature_at_height(self, z):
        """Curvature of the cylinder below the horizon, zero on Schwarzschild."""
        z = np.asarray(z, dtype=float)
        cyl = (self.n - 1) * (self.n - 2) / self.r0 ** 2
        return _scalar_or_array(np.where(z < 0, cyl, 0.0))

    # arclength sigma measured from the bottom of the cylinder
    def sigma_of_radius(self, r):
        return self.L + self.exterior.arclength(self._check_r(r))

    def radius_at_sigma(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        if np.any(sigma < 0):
            raise OutOfDomain("arclength must be nonnegative")
        above = np.maximum(sigma - self.L, 0.0)
        r = np.asarray(self.exterior.radius_at_arclength(above))
        return _scalar_or_array(np.where(sigma <= self.L, self.r0, r))

    def volume_to_sigma(self, sigma):
        """Volume between the bottom of the cylinder and level ``sigma``."""
        sigma = np.asarray(sigma, dtype=float)
        cyl = np.minimum(sigma, self.L) * self.boundary_area
        r = np.asarray(self.radius_at_sigma(sigma))
        return _scalar_or_array(cyl + np.asarray(self.exterior.enclosed_volume(r)))

    def tube(self, area, radius):
        """Tube of radius ``radius`` around the sphere of the given area."""
        if radius < 0:
            raise ValueError("tube radius must be nonnegative")
        r_c = float(self.exterior.radius_of_area(area))
        sig_c = float(self.sigma_of_radius(r_c))
        sig_lo, sig_hi = max(sig_c - radius, 0.0), sig_c + radius
        if radius == 0:
            r_lo = r_hi = r_c
        else:
            r_lo, r_hi = self.radius_at_sigma(np.array([sig_lo, sig_hi]))
        return Tube(
            center_area=float(area), radius=float(radius),
            r_interval=(float(r_lo), float(r_hi)),
            clipped_at_boundary=sig_c - radius < 0,
            s_interval=(sig_lo, sig_hi), center_r=r_c, center_s=sig_c,
        )

    def tube_volume(self, tube):
        v = self.volume_to_sigma(np.array(tube.s_interval))
        return float(v[1] - v[0])

    def tube_boundary_area(self, tube):
        return float(self.omega * sum(r ** (self.n - 1) for r in tube.r_interval))

    def tube_diameter_bound(self, tube):
        return tube_diameter_bound(tube.s_interval, tube.center_s, tube.r_interval[1], tube.center_r)

    def embedding_rows(self, cylinder_rows=64):
        """Embedding table with ``cylinder_rows`` extra rows at negative ``z``."""
        ext = self.exterior.embedding_rows()
        ext[:, 1] += self.L
        if self.k == 1:
            ext[:, 2] = np.sqrt(8.0 * self.m * (ext[:, 0] - self.r0))
        if self.L == 0:
            return ext
        z = np.linspace(-self.L, 0.0, cylinder_rows, endpoint=False)
        cyl = np.column_stack([
            np.full(z.shape, self.r0), z + self.L, z, np.zeros(z.shape),
            np.full(z.shape, self.m),
            np.full(z.shape, (self.n - 1) * (self.n - 2) / self.r0 ** 2),
        ])
        return np.vstack([cyl, ext])

