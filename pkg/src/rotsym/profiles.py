"""
Hawking mass profiles.

A rotationally symmetric manifold with an outermost minimal boundary is
determined by its Hawking mass as a function of the areal radius ``r``.  The
admissible functions start critical at the horizon, never decrease and stay
strictly below ``r**(n-2) / 2``.  They are stored here as a list of pieces
that tile ``[r0, inf)``:

* :class:`Constant` -- ``m_H = m``;
* :class:`FractionOfMax` -- ``m_H = (1 - epsilon) r**(n-2) / 2``, on which
  ``dr/ds = sqrt(epsilon)``;
* :class:`MollifiedJoin` -- a cubic Hermite blend matching value and slope of
  both neighbours, giving a C1 transition.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .errors import (
    CornerDerivative,
    InadmissibleProfile,
    InfeasibleParameters,
    MalformedPieces,
    OutOfDomain,
)

# Relative tolerance for "exact" equalities between independently rounded floats.
EXACT_RTOL = 1e-12


def sphere_area(n):
    """Area of the unit (n-1)-sphere in R^n."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def areal_radius(area, n):
    return (area / sphere_area(n)) ** (1.0 / (n - 1))


@dataclass(frozen=True)
class Constant:
    m: float
    r_lo: float
    r_hi: float = math.inf
    kind: ClassVar[str] = "constant"

    def value(self, r, n):
        return np.full(np.shape(r), float(self.m))

    def slope(self, r, n):
        return np.zeros(np.shape(r))


@dataclass(frozen=True)
class FractionOfMax:
    epsilon: float
    r_lo: float
    r_hi: float = math.inf
    kind: ClassVar[str] = "fraction_of_max"

    def value(self, r, n):
        return 0.5 * np.power(r, n - 2) * (1.0 - self.epsilon)

    def slope(self, r, n):
        return 0.5 * (n - 2) * np.power(r, n - 3) * (1.0 - self.epsilon)


@dataclass(frozen=True)
class MollifiedJoin:
    width: float
    r_lo: float
    r_hi: float
    kind: ClassVar[str] = "mollified_join"


Piece = Constant | FractionOfMax | MollifiedJoin


@dataclass(frozen=True)
class _Hermite:
    a: float
    w: float
    y0: float
    d0: float
    y1: float
    d1: float

    def value(self, r):
        t = (r - self.a) / self.w
        t2, t3 = t * t, t * t * t
        return ((2 * t3 - 3 * t2 + 1) * self.y0 + (t3 - 2 * t2 + t) * self.w * self.d0
                + (-2 * t3 + 3 * t2) * self.y1 + (t3 - t2) * self.w * self.d1)

    def slope(self, r):
        t = (r - self.a) / self.w
        t2 = t * t
        return ((6 * t2 - 6 * t) * self.y0 / self.w + (3 * t2 - 4 * t + 1) * self.d0
                + (-6 * t2 + 6 * t) * self.y1 / self.w + (3 * t2 - 2 * t) * self.d1)


@dataclass(frozen=True)
class AdmissibleProfile:
    """Piecewise Hawking mass function ``m_H(r)`` on ``[r0, inf)``.

    Construction only checks structure (tiling, finite values, join
    placement) and raises :class:`MalformedPieces`.  Admissibility is a
    separate question answered by :func:`validate_profile`.
    """

    n: int
    r0: float
    pieces: tuple
    tail_mass: float | None = None
    _edges: np.ndarray = field(init=False, repr=False, compare=False)
    _joins: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        _check_structure(self)
        object.__setattr__(self, "_edges", np.array([p.r_lo for p in self.pieces]))
        joins = {}
        for i, p in enumerate(self.pieces):
            if isinstance(p, MollifiedJoin):
                left, right = self.pieces[i - 1], self.pieces[i + 1]
                a, b = p.r_lo, p.r_hi
                joins[i] = _Hermite(
                    a=a, w=b - a,
                    y0=float(left.value(a, self.n)), d0=float(left.slope(a, self.n)),
                    y1=float(right.value(b, self.n)), d1=float(right.slope(b, self.n)),
                )
        object.__setattr__(self, "_joins", joins)

    @property
    def k(self):
        return self.n - 2

    @property
    def breakpoints(self):
        """Interior piece boundaries, in increasing order."""
        return [p.r_lo for p in self.pieces[1:]]

    @property
    def adm_mass(self):
        """Limit of ``m_H`` at infinity, or ``None`` if the tail is unbounded."""
        if self.tail_mass is not None:
            return float(self.tail_mass)
        last = self.pieces[-1]
        return float(last.m) if isinstance(last, Constant) else None

    def _locate(self, r):
        idx = np.searchsorted(self._edges, r, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def _piece_value(self, i, r):
        if i in self._joins:
            return self._joins[i].value(r)
        return self.pieces[i].value(r, self.n)

    def _piece_slope(self, i, r):
        if i in self._joins:
            return self._joins[i].slope(r)
        return self.pieces[i].slope(r, self.n)

    def _checked(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r0):
            raise OutOfDomain(f"r must be >= r0={self.r0!r}")
        return r

    def m_hawking(self, r):
        """Hawking mass of the symmetric sphere of areal radius ``r``."""
        r = self._checked(r)
        idx = self._locate(r)
        out = np.empty(r.shape)
        for i in np.unique(idx):
            mask = idx == i
            out[mask] = self._piece_value(i, r[mask])
        return out if out.ndim else float(out)

    def dm_dr(self, r, side=None):
        """Derivative of ``m_H``; ``side`` picks a one-sided value at kinks."""
        if side not in (None, "left", "right"):
            raise ValueError("side must be None, 'left' or 'right'")
        r = self._checked(r)
        idx = self._locate(r)
        right = np.empty(r.shape)
        for i in np.unique(idx):
            mask = idx == i
            right[mask] = self._piece_slope(i, r[mask])

        at_edge = (idx > 0) & (r == self._edges[idx])
        if not np.any(at_edge) or side == "right":
            return right if right.ndim else float(right)
        left = right.copy()
        for i in np.unique(idx[at_edge]):
            mask = at_edge & (idx == i)
            left[mask] = self._piece_slope(i - 1, r[mask])
        if side == "left":
            return left if left.ndim else float(left)
        scale = np.abs(left) + np.abs(right) + np.finfo(float).tiny
        if np.any(np.abs(left - right) > EXACT_RTOL * scale):
            raise CornerDerivative("dm_H/dr requested at a kink; pass side='left' or 'right'")
        return right if right.ndim else float(right)

    def radicand(self, r, offset=None):
        """``(dr/ds)**2 = 1 - 2 m_H(r) / r**(n-2)``, computed without cancellation.

        ``offset`` is ``r - r0`` when the caller knows it more accurately
        than the rounded ``r`` does (quadrature in ``u = sqrt(r - r0)``).
        """
        r = self._checked(r)
        t = r - self.r0 if offset is None else np.asarray(offset, dtype=float)
        k = self.k
        r0k = self.r0 ** k
        gap = r0k * np.expm1(k * np.log1p(t / self.r0))
        excess = 2.0 * self.m_hawking(r) - r0k
        out = (gap - excess) / np.power(r, k)
        idx = self._locate(r)
        for i, p in enumerate(self.pieces):
            if isinstance(p, FractionOfMax):
                out = np.where(idx == i, p.epsilon, out)
        return out if np.ndim(out) else float(out)

    def to_dict(self):
        out = {"n": self.n, "r0": self.r0, "pieces": [_piece_to_dict(p) for p in self.pieces]}
        if self.tail_mass is not None:
            out["tail_mass"] = self.tail_mass
        return out


def _check_structure(p):
    if not isinstance(p.n, (int, np.integer)) or isinstance(p.n, bool) or p.n < 3:
        raise MalformedPieces(f"dimension n must be an integer >= 3, got {p.n!r}")
    if not (math.isfinite(p.r0) and p.r0 > 0):
        raise MalformedPieces(f"r0 must be positive and finite, got {p.r0!r}")
    if not p.pieces:
        raise MalformedPieces("profile needs at least one piece")
    if p.pieces[0].r_lo != p.r0:
        raise MalformedPieces("first piece must start at r0")
    if p.pieces[-1].r_hi != math.inf:
        raise MalformedPieces("last piece must extend to infinity")
    for i, piece in enumerate(p.pieces):
        if not isinstance(piece, (Constant, FractionOfMax, MollifiedJoin)):
            raise MalformedPieces(f"unknown piece type {type(piece).__name__}")
        if not (math.isfinite(piece.r_lo) and piece.r_lo < piece.r_hi):
            raise MalformedPieces(f"piece {i}: need finite r_lo < r_hi")
        if i + 1 < len(p.pieces):
            if not math.isfinite(piece.r_hi):
                raise MalformedPieces(f"piece {i}: only the last piece may be unbounded")
            if piece.r_hi != p.pieces[i + 1].r_lo:
                raise MalformedPieces(f"gap or overlap between pieces {i} and {i + 1}")
        if isinstance(piece, Constant) and not math.isfinite(piece.m):
            raise MalformedPieces(f"piece {i}: mass must be finite")
        if isinstance(piece, FractionOfMax) and not 0.0 < piece.epsilon < 1.0:
            raise MalformedPieces(f"piece {i}: epsilon must lie in (0, 1)")
        if isinstance(piece, MollifiedJoin):
            if i == 0 or i == len(p.pieces) - 1:
                raise MalformedPieces("a mollified join needs a neighbour on each side")
            if isinstance(p.pieces[i - 1], MollifiedJoin) or isinstance(p.pieces[i + 1], MollifiedJoin):
                raise MalformedPieces("adjacent mollified joins are not supported")
            span = piece.r_hi - piece.r_lo
            if not (piece.width > 0 and abs(span - piece.width) <= EXACT_RTOL * max(piece.r_hi, 1.0)):
                raise MalformedPieces(f"piece {i}: width does not match r_hi - r_lo")
    if p.tail_mass is not None and not math.isfinite(p.tail_mass):
        raise MalformedPieces("tail_mass must be finite")


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: dict

    @property
    def valid(self):
        return all(c.passed for c in self.checks.values())

    def failures(self):
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self):
        return {
            "valid": self.valid,
            "checks": {k: {"passed": c.passed, "detail": c.detail} for k, c in self.checks.items()},
        }


def _sample_grid(profile, i, samples):
    p = profile.pieces[i]
    hi = p.r_hi if math.isfinite(p.r_hi) else 10.0 * max(p.r_lo, profile.r0)
    return np.linspace(p.r_lo, hi, samples)


def validate_profile(profile, samples_per_piece=10_000):
    """Check the four admissibility conditions of a Hawking mass profile.

    Each piece is checked analytically where its kind allows it and on a
    dense grid otherwise; the grid is also used for sampled differences
    across the whole profile.
    """
    n, k, r0 = profile.n, profile.k, profile.r0
    checks = {}

    crit = 0.5 * r0 ** k
    m_r0 = profile.m_hawking(r0)
    ok = abs(m_r0 - crit) <= EXACT_RTOL * crit
    checks["boundary_condition"] = Check(ok, f"m_H(r0)={m_r0!r}, r0^(n-2)/2={crit!r}")

    jumps = []
    for i in range(1, len(profile.pieces)):
        b = profile.pieces[i].r_lo
        left = float(profile._piece_value(i - 1, np.asarray(b)))
        right = float(profile._piece_value(i, np.asarray(b)))
        if abs(left - right) > EXACT_RTOL * max(abs(left), abs(right), 1.0):
            jumps.append(f"r={b!r}: {left!r} -> {right!r}")
    checks["continuous"] = Check(not jumps, "; ".join(jumps))

    grids = [_sample_grid(profile, i, samples_per_piece) for i in range(len(profile.pieces))]
    r_all = np.unique(np.concatenate(grids))
    values = profile.m_hawking(r_all)
    decreasing = []
    for i, p in enumerate(profile.pieces):
        if isinstance(p, MollifiedJoin):
            slopes = profile._piece_slope(i, grids[i])
            if np.min(slopes) < -EXACT_RTOL * max(np.max(np.abs(slopes)), 1e-300):
                decreasing.append(f"join {i} has negative slope {np.min(slopes)!r}")
    diffs = np.diff(values)
    worst = int(np.argmin(diffs))
    if diffs[worst] < -EXACT_RTOL * max(abs(values[worst]), 1.0):
        decreasing.append(f"m_H drops by {-diffs[worst]!r} near r={r_all[worst]!r}")
    checks["nondecreasing"] = Check(not decreasing, "; ".join(decreasing))

    bad = []
    for i, p in enumerate(profile.pieces):
        if isinstance(p, FractionOfMax):
            continue
        r = grids[i]
        if i == 0:
            r = r[1:]
        elif isinstance(p, Constant):
            r = r[:1]  # radicand increases along a constant piece
        rad = profile.radicand(r)
        if np.min(rad) <= 0.0:
            j = int(np.argmin(rad))
            bad.append(f"piece {i}: 2 m_H / r^(n-2) >= 1 at r={r[j]!r}")
    checks["subcritical"] = Check(not bad, "; ".join(bad))
    return ValidationReport(checks)


def require_admissible(profile, **kwargs):
    report = validate_profile(profile, **kwargs)
    if not report.valid:
        raise InadmissibleProfile(report)
    return profile


# -- generators ---------------------------------------------------------------

def schwarzschild_profile(n, m):
    """Constant Hawking mass ``m``; horizon at ``r0 = (2m)**(1/(n-2))``."""
    if not m > 0:
        raise ValueError("mass must be positive")
    k = n - 2
    r0 = 2.0 * m if k == 1 else (2.0 * m) ** (1.0 / k)
    return AdmissibleProfile(n=n, r0=r0, pieces=(Constant(m, r0),))


def well_separation_bound(r0, n, delta, epsilon):
    """Lower bound on ``d(boundary, Sigma_1)`` from the flat-slope piece alone."""
    k = n - 2
    growth = math.expm1(math.log1p(delta) / k)
    return r0 / math.sqrt(epsilon) * growth / (1.0 - epsilon) ** (1.0 / k)


def deep_well_profile(n, A0, A1, L, delta):
    """Three-piece profile whose horizon is more than ``L`` from the sphere of area ``A1``.

    The middle piece keeps ``dr/ds = sqrt(epsilon)``; ``epsilon`` is the
    largest value for which the separation bound still exceeds ``L`` while
    the well closes before the sphere of area ``A1``.
    """
    if not (0 < A0 < A1 and L > 0 and 0 < delta < 1):
        raise ValueError("need 0 < A0 < A1, L > 0 and 0 < delta < 1")
    k = n - 2
    r0 = areal_radius(A0, n)
    r1 = areal_radius(A1, n)
    eps_max = 1.0 - (1.0 + delta) * (r0 / r1) ** k
    if eps_max <= 0:
        raise InfeasibleParameters("A1 too small: the well cannot close before Sigma_1")
    # the bound decreases in epsilon up to k / (k + 2), then increases again
    eps_cap = min(k / (k + 2.0), eps_max)
    target = L * (1.0 + 1e-9)

    def bound(eps):
        return well_separation_bound(r0, n, delta, eps)

    if bound(eps_cap) > target:
        eps = eps_cap
    else:
        lo = min(eps_cap, (r0 * math.expm1(math.log1p(delta) / k) / target) ** 2)
        while bound(lo) <= target:
            lo *= 0.25
        hi = eps_cap
        while hi - lo > 1e-12 * lo:
            mid = math.sqrt(lo * hi)
            if bound(mid) > target:
                lo = mid
            else:
                hi = mid
        eps = lo

    r_in = r0 * math.exp(-math.log1p(-eps) / k)
    r_out = r0 * math.exp((math.log1p(delta) - math.log1p(-eps)) / k)
    if not r0 < r_in < r_out:
        raise InfeasibleParameters(f"epsilon={eps:g} is below double precision resolution")
    m0 = 0.5 * r0 ** k
    pieces = (
        Constant(m0, r0, r_in),
        FractionOfMax(eps, r_in, r_out),
        Constant(m0 * (1.0 + delta), r_out),
    )
    return AdmissibleProfile(n=n, r0=r0, pieces=pieces)


def sharp_turn_profile(n, m0, m_j, slope):
    """Schwarzschild on ``[r0, 2 r0]``, then a smoothstep rise to ``m_j``.

    The rise starts at ``2 r0`` and its peak slope is at least ``slope``;
    it is over before ``3 r0``.
    """
    if not m0 > 0:
        raise ValueError("m0 must be positive")
    if m_j == m0:
        return schwarzschild_profile(n, m0)
    if not (m_j > m0 and slope > 0):
        raise ValueError("need m_j >= m0 > 0 and slope > 0")
    base = schwarzschild_profile(n, m0)
    r0 = base.r0
    rise = m_j - m0
    if rise / slope > r0:
        raise InfeasibleParameters("the turn does not fit inside (2 r0, 3 r0)")
    # smoothstep peak slope is 1.5 * rise / width; keep a margin above
    # ``slope`` that survives rounding
    width = min(1.4 * rise / slope, r0)
    a, b = 2.0 * r0, 2.0 * r0 + width
    profile = AdmissibleProfile(
        n=n, r0=r0,
        pieces=(Constant(m0, r0, a), MollifiedJoin(b - a, a, b), Constant(m_j, b)),
    )
    report = validate_profile(profile)
    if not report.valid:
        raise InfeasibleParameters(f"sharp turn is not admissible: {report.failures()}")
    return profile


def sharp_turn_sequence(n, m0, slopes, excess=0.5):
    """Sharp-turn profiles with ``m_j = m0 (1 + excess / sqrt(slope_j))``."""
    return [sharp_turn_profile(n, m0, m0 * (1.0 + excess / math.sqrt(s)), s) for s in slopes]


def mollify_corners(profile, width):
    """Replace every kink between two plain pieces by a centred C1 join.

    Near each corner the join is narrowed to at most half of either
    neighbour so the neighbours keep positive length.
    """
    n = profile.n
    pieces = list(profile.pieces)
    cuts = []
    for i in range(1, len(pieces)):
        left, right = pieces[i - 1], pieces[i]
        if isinstance(left, MollifiedJoin) or isinstance(right, MollifiedJoin):
            continue
        b = right.r_lo
        if left.slope(b, n) == right.slope(b, n):
            continue
        w = min(width, 0.5 * (left.r_hi - left.r_lo), 0.5 * (right.r_hi - right.r_lo))
        cuts.append((i, b, w))
    if not cuts:
        return profile

    lo_shift = {i: b + 0.5 * w for i, b, w in cuts}
    hi_shift = {i - 1: b - 0.5 * w for i, b, w in cuts}
    out = []
    for i, p in enumerate(pieces):
        if i in lo_shift:
            a, c = out[-1].r_hi, lo_shift[i]
            out.append(MollifiedJoin(c - a, a, c))
        r_lo = lo_shift.get(i, p.r_lo)
        r_hi = hi_shift.get(i, p.r_hi)
        out.append(_replace_bounds(p, r_lo, r_hi))
    return AdmissibleProfile(n=n, r0=profile.r0, pieces=out, tail_mass=profile.tail_mass)


def _replace_bounds(p, r_lo, r_hi):
    if isinstance(p, Constant):
        return Constant(p.m, r_lo, r_hi)
    if isinstance(p, FractionOfMax):
        return FractionOfMax(p.epsilon, r_lo, r_hi)
    return MollifiedJoin(r_hi - r_lo, r_lo, r_hi)


def random_admissible_profile(rng, n=3, r0=1.0, delta=None, max_steps=3, smooth=False,
                              max_tries=200):
    """Random staircase profile with ADM mass ``(1 + delta) r0**(n-2) / 2``.

    Each rise is either a critical-slope piece or a smoothstep join between
    two constants.  With ``smooth=True`` the remaining corners are mollified.
    """
    k = n - 2
    m0 = 0.5 * r0 ** k
    for _ in range(max_tries):
        d = rng.uniform(0.005, 0.25) if delta is None else delta
        steps = int(rng.integers(1, max_steps + 1))
        cuts = np.sort(rng.uniform(0.1, 0.9, steps - 1))
        targets = m0 * (1.0 + d * np.append(cuts, 1.0))

        pieces = []
        # floor: (dr/ds)^2 at the start of the current constant piece
        r_cur, m_cur, floor = r0, m0, 0.0
        for m_next in map(float, targets):
            if rng.random() < 0.5:
                eps = floor + (min(0.95, floor + 0.6) - floor) * rng.uniform(0.05, 1.0)
                a = (2.0 * m_cur / (1.0 - eps)) ** (1.0 / k)
                b = (2.0 * m_next / (1.0 - eps)) ** (1.0 / k)
                pieces += [Constant(m_cur, r_cur, a), FractionOfMax(eps, a, b)]
            else:
                a = max(r_cur * (1.0 + rng.uniform(0.01, 0.3)),
                        (2.0 * m_next) ** (1.0 / k) * (1.0 + rng.uniform(0.01, 0.2)))
                b = a * (1.0 + rng.uniform(0.02, 0.5))
                pieces += [Constant(m_cur, r_cur, a), MollifiedJoin(b - a, a, b)]
            r_cur, m_cur = b, m_next
            floor = 1.0 - 2.0 * m_cur / r_cur ** k
        pieces.append(Constant(m_cur, r_cur))
        try:
            profile = AdmissibleProfile(n=n, r0=r0, pieces=pieces)
            if smooth:
                profile = mollify_corners(profile, 0.05 * r0)
        except MalformedPieces:
            continue
        if validate_profile(profile, samples_per_piece=2000).valid:
            return profile
    raise InfeasibleParameters("could not draw an admissible profile")


# -- JSON ---------------------------------------------------------------------

def _piece_to_dict(p):
    r_hi = None if math.isinf(p.r_hi) else p.r_hi
    if isinstance(p, Constant):
        return {"kind": "constant", "m": p.m, "r_lo": p.r_lo, "r_hi": r_hi}
    if isinstance(p, FractionOfMax):
        return {"kind": "fraction_of_max", "epsilon": p.epsilon, "r_lo": p.r_lo, "r_hi": r_hi}
    return {"kind": "mollified_join", "width": p.width, "r_lo": p.r_lo, "r_hi": r_hi}


def _piece_from_dict(d):
    kind = d["kind"]
    r_lo = float(d["r_lo"])
    r_hi = d.get("r_hi")
    r_hi = math.inf if r_hi is None else float(r_hi)
    if kind == "constant":
        return Constant(float(d["m"]), r_lo, r_hi)
    if kind == "fraction_of_max":
        return FractionOfMax(float(d["epsilon"]), r_lo, r_hi)
    if kind == "mollified_join":
        return MollifiedJoin(float(d["width"]), r_lo, r_hi)
    raise MalformedPieces(f"unknown piece kind {kind!r}")


def profile_from_dict(data):
    try:
        n = data["n"]
        if isinstance(n, float) and n.is_integer():
            n = int(n)
        pieces = [_piece_from_dict(d) for d in data["pieces"]]
        tail = data.get("tail_mass")
        return AdmissibleProfile(
            n=n, r0=float(data["r0"]), pieces=pieces,
            tail_mass=None if tail is None else float(tail),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, MalformedPieces):
            raise
        raise MalformedPieces(f"bad profile document: {exc}") from exc


def load_profile(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedPieces(f"{path}: invalid JSON ({exc})") from exc
    return profile_from_dict(data)


def dump_profile(profile, path):
    with open(path, "w") as fh:
        json.dump(profile.to_dict(), fh, indent=2)
        fh.write("\n")
