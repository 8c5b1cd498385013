"""
Bi-Lipschitz comparison of a manifold with Schwarzschild space plus a cylinder.

The comparison map ``phi`` keeps the areal radius outside the sphere
``r = r_delta`` and keeps the (anchored) graph height inside it, sending the
collar near the horizon onto the cylinder of the appended model.  Both pieces
preserve the sphere coordinates, so the pullback of the model metric is
diagonal and the metric distortion is controlled by one radial and one
tangential ratio per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DeltaOutOfRange, NumericalDomain, OutOfDomain
from .schwarzschild import AppendedSchwarzschild

DELTA_CLAMP = 1e-12
DEPTH_CLAMP = 1e-9
CERTIFY_SLACK = 1e-9


def h_delta(delta, n, exponent=0.5):
    """Metric distortion bound for mass excess ``delta``.

    With ``r_delta = (1 + delta**p)**(1/(n-2)) r0`` the three branches bound
    the inner tangential, inner radial and outer radial ratios.
    """
    if not 0 <= delta < 1:
        raise DeltaOutOfRange(f"delta must lie in [0, 1), got {delta!r}")
    if delta == 0:
        return 1.0
    a = delta ** exponent
    return max(
        (1.0 + a) ** (2.0 / (n - 2)),
        (1.0 + a) * (1.0 + delta),
        1.0 / (1.0 - delta ** (1.0 - exponent)),
    )


def lipschitz_bound(delta, n, exponent=0.5):
    return math.log(h_delta(delta, n, exponent))


@dataclass(frozen=True)
class ComparisonSetup:
    """Constants tying a manifold to its comparison model."""

    M: object
    n: int
    delta: float
    m0: float
    r0: float
    r1: float
    r_delta: float
    A_delta: float
    z_anchor: float
    exponent: float
    model: AppendedSchwarzschild = field(repr=False)

    @property
    def depth(self):
        return self.model.L

    @property
    def h_delta(self):
        return h_delta(self.delta, self.n, self.exponent)

    @property
    def lip_bound(self):
        return math.log(self.h_delta)


def setup(M, rdelta_exponent=0.5):
    """Comparison constants and the appended model for manifold ``M``."""
    if not 0 < rdelta_exponent < 1:
        raise ValueError("r_delta exponent must lie in (0, 1)")
    n, r0 = M.n, M.r0
    k = n - 2
    m0 = 0.5 * r0 ** k
    m_adm = M.adm_mass()
    delta = m_adm / m0 - 1.0
    if delta >= 1.0 or delta < -DELTA_CLAMP:
        raise DeltaOutOfRange(f"delta={delta!r} outside [0, 1)")
    delta = max(delta, 0.0)
    r1 = r0 * (1.0 + delta) ** (1.0 / k)
    r_delta = r0 * (1.0 + delta ** rdelta_exponent) ** (1.0 / k)

    exterior = AppendedSchwarzschild(n, m0, 0.0, quad_tol=M.quad_tol, r_max=M.r_max)
    if delta == 0:
        z_anchor = 0.0
    else:
        z_anchor = float(exterior.z_sch(r_delta)) - float(M.height(r_delta))
    depth = -z_anchor
    if depth < -DEPTH_CLAMP:
        raise NumericalDomain(f"negative depth {depth!r}: manifold rises above Schwarzschild")
    depth = depth if depth > 0 else 0.0
    return ComparisonSetup(
        M=M, n=n, delta=delta, m0=m0, r0=r0, r1=r1, r_delta=r_delta,
        A_delta=M.omega * r_delta ** (n - 1), z_anchor=-depth if depth else 0.0,
        exponent=rdelta_exponent, model=exterior.with_length(depth),
    )


def depth(C):
    """Length of the cylinder needed below the model's horizon."""
    return C.model.L


@dataclass(frozen=True)
class Image:
    """Model data at ``phi(r)``: height, areal radius, ``g_zz`` and cylinder flag."""

    z: np.ndarray
    r: np.ndarray
    g_zz: np.ndarray
    on_cylinder: np.ndarray


def phi(C, r):
    """Image under the comparison map of the spheres of radius ``r``."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r < C.r0):
        raise OutOfDomain("r must be >= r0")
    z = np.empty(r.shape)
    r_img = r.copy()
    outer = r >= C.r_delta
    if np.any(outer):
        z[outer] = np.asarray(C.model.z_sch(r[outer]))
    inner = ~outer
    if np.any(inner):
        z_in = np.asarray(C.M.height(r[inner])) + C.z_anchor
        z_in = np.maximum(z_in, -C.depth)
        z[inner] = z_in
        r_img[inner] = np.asarray(C.model.r_sch(z_in))
    on_cyl = z < 0
    g_zz = np.where(on_cyl, 1.0, np.power(r_img, C.n - 2) / (2.0 * C.m0))
    return Image(z=z, r=r_img, g_zz=g_zz, on_cylinder=on_cyl)


def model_sigma(C, image):
    """Model arclength from the bottom of the cylinder to the image points."""
    sig = np.where(image.on_cylinder, image.z + C.depth, 0.0)
    above = ~image.on_cylinder
    if np.any(above):
        sig[above] = np.asarray(C.model.sigma_of_radius(image.r[above]))
    return sig


def metric_pair(C, r):
    """Diagonal entries of ``g`` and of the pulled-back model metric at ``r``.

    Returns ``(g_rad, g_tan, model_rad, model_tan)``.  Radial entries are
    taken in ``d/dr`` outside ``r_delta`` and in ``d/dz`` inside, the
    coordinate each half of ``phi`` preserves.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    k = C.n - 2
    g_rad = np.empty(r.shape)
    model_rad = np.empty(r.shape)
    r_img = r.copy()
    outer = r >= C.r_delta
    if np.any(outer & (r == C.r0)):
        raise OutOfDomain("radial ratio is undefined at the horizon when r_delta = r0")
    if np.any(outer):
        ro = r[outer]
        g_rad[outer] = 1.0 / np.asarray(C.M.profile.radicand(ro))
        model_rad[outer] = 1.0 / np.asarray(C.model.profile.radicand(ro))
    inner = ~outer
    if np.any(inner):
        ri = r[inner]
        img = phi(C, ri)
        g_rad[inner] = np.power(ri, k) / (2.0 * np.asarray(C.M.m_hawking(ri)))
        model_rad[inner] = img.g_zz
        r_img[inner] = img.r
    return g_rad, r * r, model_rad, r_img * r_img


def distortion_ratios(C, r):
    """Radial and tangential ratios ``g(v, v) / g_model(phi_* v, phi_* v)``."""
    g_rad, g_tan, model_rad, model_tan = metric_pair(C, r)
    return g_rad / model_rad, g_tan / model_tan


@dataclass
class DistortionReport:
    delta: float
    h_delta: float
    lip_bound: float
    depth: float
    max_ratio: float
    min_ratio: float
    certified: bool
    mixed_between: bool
    worst_sample: dict
    samples: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "delta": self.delta,
            "h_delta": self.h_delta,
            "lip_bound": self.lip_bound,
            "depth": self.depth,
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "certified": self.certified,
            "worst_sample": self.worst_sample,
        }


def sample_radii(C, points=4096):
    """Sample radii for the outer and inner regions of ``phi``."""
    M = C.M
    outer = np.geomspace(C.r_delta, max(M.r_max, 2.0 * C.r_delta), points)
    if C.r_delta == C.r0:
        outer = outer[1:]
        inner = np.empty(0)
    else:
        # r_delta itself belongs to the outer samples
        inner = np.linspace(C.r0, C.r_delta, points, endpoint=False)
    return outer, inner


def certify(C, points=4096, directions=64, seed=0, keep_samples=False):
    """Sample the distortion of ``phi`` and compare it with ``h_delta``."""
    rng = np.random.default_rng(seed)
    h = C.h_delta
    max_ratio, min_ratio = 1.0, 1.0
    worst = {"region": None, "r": None, "direction": None, "ratio": 1.0}
    worst_dev = 0.0
    mixed_ok = True
    samples = []

    for region, r in zip(("outer", "inner"), sample_radii(C, points)):
        if r.size == 0:
            continue
        g_rr, g_tt, gi_rr, gi_tt = metric_pair(C, r)
        radial, tangential = g_rr / gi_rr, g_tt / gi_tt
        ab = rng.standard_normal((directions, 2, r.size)) ** 2
        mixed = ((ab[:, 0] * g_rr + ab[:, 1] * g_tt)
                 / (ab[:, 0] * gi_rr + ab[:, 1] * gi_tt))
        lo = np.minimum(radial, tangential)
        hi = np.maximum(radial, tangential)
        tol = 1e-12 * hi
        mixed_ok &= bool(np.all((mixed >= lo - tol) & (mixed <= hi + tol)))

        for name, vals in (("radial", radial), ("tangential", tangential),
                           ("mixed", mixed.max(axis=0)), ("mixed", mixed.min(axis=0))):
            max_ratio = max(max_ratio, float(vals.max()))
            min_ratio = min(min_ratio, float(vals.min()))
            dev = np.abs(np.log(vals))
            i = int(np.argmax(dev))
            if dev[i] > worst_dev:
                worst_dev = float(dev[i])
                worst = {"region": region, "r": float(r[i]), "direction": name,
                         "ratio": float(vals[i])}
        if keep_samples:
            samples.extend((region, float(x), "radial", float(v)) for x, v in zip(r, radial))
            samples.extend((region, float(x), "tangential", float(v))
                           for x, v in zip(r, tangential))

    certified = (max_ratio <= h + CERTIFY_SLACK) and (min_ratio >= 1.0 / h - CERTIFY_SLACK)
    return DistortionReport(
        delta=C.delta, h_delta=h, lip_bound=math.log(h), depth=C.depth,
        max_ratio=max_ratio, min_ratio=min_ratio, certified=bool(certified),
        mixed_between=mixed_ok, worst_sample=worst, samples=samples,
    )
