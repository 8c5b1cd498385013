import math

import numpy as np
import pytest

import oracles
from conftest import A1
from rotsym.errors import OutOfDomain, SingularAtHorizon
from rotsym.geometry import RotSymManifold
from rotsym.profiles import schwarzschild_profile
from rotsym.schwarzschild import AppendedSchwarzschild


@pytest.fixture(scope="module")
def S():
    return AppendedSchwarzschild(3, 1.0, L=5.0)


def test_z_and_r_n3(S):
    assert S.z_sch(S.r0) == 0.0
    assert S.z_sch(4.0) == pytest.approx(4.0, abs=1e-9)
    assert S.z_sch(2.5) == pytest.approx(2.0, abs=1e-9)
    assert S.r_sch(0.0) == S.r0
    assert S.r_sch(4.0) == pytest.approx(4.0, abs=1e-8)
    assert S.r_sch(-2.5) == S.r0
    with pytest.raises(OutOfDomain):
        S.r_sch(-5.5)


def test_closed_form_agrees_with_quadrature(S):
    r = np.geomspace(2.0 + 1e-9, 500.0, 50)
    assert S.exterior.height(r) == pytest.approx(S.z_sch(r), rel=1e-10)


@pytest.mark.parametrize("n,m", [(4, 0.5), (5, 0.5), (6, 2.0)])
def test_higher_dimensions_inverse_pair(n, m):
    S = AppendedSchwarzschild(n, m)
    r = S.exterior.grid[1::37]
    z = S.z_sch(r)
    assert np.max(np.abs(S.z_sch(S.r_sch(z)) - z)) <= 1e-8
    assert np.max(np.abs(S.r_sch(z) - r)) <= 1e-8 * np.max(r)
    r_test = 3.0 * S.r0
    assert S.z_sch(r_test) == pytest.approx(oracles.height(S.profile, r_test), rel=1e-9)


def test_metric_coefficients(S):
    assert S.metric_coeff_radial(4.0) == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(SingularAtHorizon):
        S.metric_coeff_radial(S.r0)
    assert S.metric_coeff_vertical(-1.0) == 1.0
    assert S.metric_coeff_vertical(0.0) == pytest.approx(1.0)
    # continuity across the gluing sphere
    assert S.metric_coeff_vertical(1e-12) == pytest.approx(1.0, abs=1e-12)
    assert S.sphere_radius(-1.0) == S.sphere_radius(0.0) == S.r0
    assert S.metric_coeff_vertical(4.0) == pytest.approx(2.0, rel=1e-12)
    assert S.scalar_curvature_at_height(-1.0) == pytest.approx(2 / 4)
    assert S.scalar_curvature_at_height(1.0) == 0.0


def test_radial_coefficient_matches_geometry():
    for n, m in [(3, 1.0), (4, 0.5), (5, 3.0)]:
        S = AppendedSchwarzschild(n, m)
        M = RotSymManifold(schwarzschild_profile(n, m))
        r = M.grid[1:]
        assert 1 / M.drds(r) ** 2 == pytest.approx(S.metric_coeff_radial(r), rel=1e-10)


def test_tube_inside_cylinder():
    S = AppendedSchwarzschild(3, 1.0, L=20.0)
    # sphere at the middle of the cylinder has the boundary area; pick it by sigma
    t_area = S.boundary_area
    tube = S.tube(t_area, 0.0)
    assert tube.center_s == pytest.approx(20.0)
    # a tube fully in the cylinder: volume is a product
    v = S.volume_to_sigma(np.array([5.0, 7.0]))
    assert v[1] - v[0] == pytest.approx(2.0 * S.boundary_area, rel=1e-14)


def test_zero_length_reduces_to_schwarzschild():
    S = AppendedSchwarzschild(3, 1.0, L=0.0)
    M = RotSymManifold(schwarzschild_profile(3, 1.0))
    tS, tM = S.tube(A1, 1.0), M.tube(A1, 1.0)
    assert tS.r_interval == pytest.approx(tM.r_interval, rel=1e-14)
    assert S.tube_volume(tS) == pytest.approx(M.tube_volume(tM), rel=1e-13)


def test_tube_volume_oracle():
    S = AppendedSchwarzschild(3, 1.0, L=0.5)
    tube = S.tube(A1, 1.0)
    assert not tube.clipped_at_boundary
    vol = S.tube_volume(tube)
    assert vol == pytest.approx(oracles.volume(S.profile, *tube.r_interval), rel=1e-6)
    deep = S.tube(A1, 6.0)
    cyl = 0.5 * S.boundary_area
    assert deep.clipped_at_boundary
    expected = cyl + oracles.volume(S.profile, S.r0, deep.r_interval[1])
    assert S.tube_volume(deep) == pytest.approx(expected, rel=1e-8)


def test_with_length_shares_exterior(S):
    other = S.with_length(2.0)
    assert other.exterior is S.exterior
    assert other.sigma_of_radius(4.0) == pytest.approx(S.sigma_of_radius(4.0) - 3.0)


def test_embedding_rows_include_cylinder(S):
    rows = S.embedding_rows(cylinder_rows=10)
    assert rows[0, 2] == -5.0
    assert np.sum(rows[:, 2] < 0) == 10
    assert np.all(np.diff(rows[:, 1]) > 0)
    assert np.all(np.diff(rows[:, 2]) > 0)
