import math

import numpy as np
import pytest

from conftest import A0, A1
from rotsym import comparison
from rotsym.errors import DeltaOutOfRange
from rotsym.geometry import RotSymManifold
from rotsym.profiles import (
    AdmissibleProfile,
    Constant,
    MollifiedJoin,
    deep_well_profile,
    schwarzschild_profile,
    sharp_turn_profile,
)


def _excess_profile(delta, n=3):
    """Constant r0 = 1, then a smooth rise to (1 + delta) m0 well outside the horizon."""
    m0 = 0.5
    return AdmissibleProfile(n=n, r0=1.0, pieces=(
        Constant(m0, 1.0, 3.0), MollifiedJoin(1.0, 3.0, 4.0), Constant(m0 * (1 + delta), 4.0)))


def test_h_delta_values():
    assert comparison.h_delta(0.0, 3) == 1.0
    assert comparison.h_delta(0.01, 3) == pytest.approx(1.21)
    # the outer radial branch 1/0.9 edges out (1.1)(1.01) = 1.111
    assert comparison.h_delta(0.01, 6) == pytest.approx(1 / 0.9)
    with pytest.raises(DeltaOutOfRange):
        comparison.h_delta(1.0, 3)


def test_h_delta_exponent_third():
    d = 0.001
    assert comparison.h_delta(d, 3, exponent=1 / 3) == pytest.approx(
        max((1 + d ** (1 / 3)) ** 2, (1 + d ** (1 / 3)) * (1 + d), 1 / (1 - d ** (2 / 3))))


def test_lip_bound_decreases():
    vals = [comparison.lipschitz_bound(d, 3) for d in (0.1, 0.01, 0.001)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_setup_schwarzschild(sch3):
    C = comparison.setup(sch3)
    assert C.delta == 0.0
    assert C.r_delta == C.r0
    assert C.depth == 0.0
    rep = comparison.certify(C)
    assert rep.max_ratio == rep.min_ratio == 1.0
    assert rep.certified


def test_setup_radii():
    C = comparison.setup(RotSymManifold(_excess_profile(0.04)))
    assert C.r_delta == pytest.approx(1.2, rel=1e-14)
    assert C.r1 == pytest.approx(1.04, rel=1e-14)
    assert C.A_delta == pytest.approx(4 * math.pi * 1.44)


def test_setup_deep_well(well3):
    C = comparison.setup(well3)
    assert C.delta == pytest.approx(0.05, abs=1e-12)
    assert C.depth > 0
    assert C.z_anchor == -C.depth


def test_delta_out_of_range():
    with pytest.raises(DeltaOutOfRange):
        comparison.setup(RotSymManifold(_excess_profile(1.5)))


def test_depth_grows_as_epsilon_shrinks():
    depths = [comparison.setup(RotSymManifold(deep_well_profile(3, A0, A1, L, 0.05))).depth
              for L in (5.0, 10.0, 20.0)]
    assert depths[0] < depths[1] < depths[2]


def test_phi_fixed_points(well3):
    C = comparison.setup(well3)
    img = comparison.phi(C, np.array([C.r_delta, C.r0, 6.0]))
    # anchoring sphere is fixed, boundary goes to the bottom of the cylinder
    assert img.r[0] == pytest.approx(C.r_delta, rel=1e-10)
    assert img.z[0] == pytest.approx(C.model.z_sch(C.r_delta), abs=1e-10)
    assert img.z[1] == pytest.approx(-C.depth)
    assert img.on_cylinder[1]
    assert img.r[2] == 6.0
    sig = comparison.model_sigma(C, img)
    assert sig[1] == pytest.approx(0.0, abs=1e-9)


def test_phi_continuous_at_r_delta(well3):
    C = comparison.setup(well3)
    r = C.r_delta * np.array([1 - 1e-9, 1 + 1e-9])
    img = comparison.phi(C, r)
    assert img.z[0] == pytest.approx(img.z[1], abs=1e-6)
    assert img.r[0] == pytest.approx(img.r[1], rel=1e-6)


def test_phi_inverse_recovers_points(well3):
    C = comparison.setup(well3)
    r = np.linspace(C.r0 * (1 + 1e-6), C.r_delta, 200)[:-1]
    img = comparison.phi(C, r)
    above = ~img.on_cylinder
    z_back = img.z[above] - C.z_anchor
    assert well3.radius_at_height(z_back) == pytest.approx(r[above], rel=1e-8)


def test_ratios_obey_proof_chains(well3):
    C = comparison.setup(well3)
    d = C.delta
    a = math.sqrt(d)
    outer, inner = comparison.sample_radii(C, 2000)
    rad, tan = comparison.distortion_ratios(C, outer)
    assert np.all(tan == 1.0)
    assert np.all((rad >= 1 - 1e-12) & (rad <= 1 / (1 - a) + 1e-12))
    # the outer radial ratio peaks on the sphere r = r_delta
    assert np.argmax(rad) == 0
    rad, tan = comparison.distortion_ratios(C, inner)
    assert np.all((tan >= (1 + a) ** -2 - 1e-12) & (tan <= (1 + a) ** 2 + 1e-12))
    assert np.all((rad >= 1 / ((1 + d) * (1 + a)) - 1e-12) & (rad <= 1 + a + 1e-12))


def test_pinching_chain(well3):
    C = comparison.setup(well3)
    r = well3.grid[well3.grid >= C.r_delta]
    k = well3.n - 2
    drds2 = well3.drds(r) ** 2
    assert np.all(1 - (C.r0 / r) ** k >= drds2 - 1e-15)
    assert np.all(drds2 >= 1 - (C.r1 / r) ** k - 1e-15)
    assert np.all(1 - (C.r1 / r) ** k > 0)


def test_certify_deep_well():
    M = RotSymManifold(deep_well_profile(3, A0, A1, 10.0, 0.05))
    rep = comparison.certify(comparison.setup(M), points=1000, directions=16)
    assert rep.certified
    assert rep.mixed_between
    d = rep.to_dict()
    assert set(d) == {"delta", "h_delta", "lip_bound", "depth", "max_ratio", "min_ratio",
                      "certified", "worst_sample"}
    assert d["worst_sample"]["direction"] in {"radial", "tangential", "mixed"}


def test_certify_is_deterministic(well3):
    C = comparison.setup(well3)
    a = comparison.certify(C, points=500, directions=8, seed=3).to_dict()
    b = comparison.certify(C, points=500, directions=8, seed=3).to_dict()
    assert a == b


def test_certify_keeps_samples(well3):
    C = comparison.setup(well3)
    rep = comparison.certify(C, points=50, directions=2, keep_samples=True)
    tags = {s[2] for s in rep.samples}
    assert tags == {"radial", "tangential"}
    assert all(s[3] > 0 for s in rep.samples)


def test_exponent_third_is_certified(well3):
    C = comparison.setup(well3, rdelta_exponent=1 / 3)
    assert C.r_delta == pytest.approx(C.r0 * (1 + 0.05 ** (1 / 3)), rel=1e-12)
    assert comparison.certify(C, points=1000, directions=8).certified


def test_sharp_turn_has_zero_depth():
    M = RotSymManifold(sharp_turn_profile(3, 1.0, 1.1, 20.0))
    assert abs(comparison.setup(M).depth) <= 1e-9


def test_lip_bound_to_zero_along_sweep():
    bounds = [comparison.certify(comparison.setup(RotSymManifold(_excess_profile(d))),
                                 points=200, directions=4).lip_bound
              for d in (0.1, 0.01, 0.001, 1e-4)]
    assert all(np.diff(bounds) < 0)
    assert bounds[-1] < 0.03
