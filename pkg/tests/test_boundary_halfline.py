"""Boundary data on the half-line: detachment set, angles, boundary map."""

import numpy as np
import pytest
from hypothesis import given, settings

from freemult.boundary_halfline import (
    BoundaryCurveR,
    angle_a_t,
    build_curve_r,
    g_polar,
    g_radial,
    h_t_r,
    vt_plus_r,
)
from freemult.errors import PhaseError
from freemult.herglotz import closed_form_rho_atomic_r, extract_rep_r, log_kappa
from freemult.measures import HalfLineMeasure

from test_herglotz import atomic_halfline

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")

TWO_ATOM = HalfLineMeasure(atom_positions=[1.0, 4.0], atom_masses=[0.5, 0.5])
POINT = HalfLineMeasure(atom_positions=[3.0], atom_masses=[1.0])


@pytest.fixture(scope="module")
def two_atom_rep():
    return closed_form_rho_atomic_r(TWO_ATOM)


@pytest.fixture(scope="module")
def pl_setup():
    mu = HalfLineMeasure(
        atom_positions=[2.0],
        atom_masses=[0.5],
        grid=np.linspace(1.0, 3.0, 257),
        values=np.full(257, 0.25),
    )
    return mu, extract_rep_r(mu)


def two_atom_g(r):
    # rational closed form for rho of (delta_1 + delta_4)/2
    return (9.0 / 40.0) * r / ((r - 0.4) * (r - 0.625))


class TestGRadial:
    def test_matches_rational_form(self, two_atom_rep):
        for r in (0.05, 0.2, 0.25, 0.31, 0.7, 1.0, 2.5, 30.0):
            assert g_radial(two_atom_rep, r) == pytest.approx(two_atom_g(r), rel=1e-12)

    def test_unit_values_at_detachment_endpoints(self, two_atom_rep):
        assert g_radial(two_atom_rep, 0.25) == pytest.approx(1.0, abs=1e-13)
        assert g_radial(two_atom_rep, 1.0) == pytest.approx(1.0, abs=1e-13)

    def test_infinite_on_support(self, two_atom_rep):
        assert np.isinf(g_radial(two_atom_rep, 0.5))
        assert np.isinf(g_radial(two_atom_rep, 0.4))
        assert np.isinf(g_radial(two_atom_rep, 0.625))

    def test_infinite_at_rho_atom(self):
        mu = HalfLineMeasure(atom_positions=[2.0], atom_masses=[0.6], mass_at_zero=0.4)
        rep = closed_form_rho_atomic_r(mu)
        # unbounded interval (1.25, inf) from the atom at the origin
        assert np.isinf(g_radial(rep, 1.25))
        assert np.isinf(g_radial(rep, 100.0))
        assert np.isfinite(g_radial(rep, 1.0))

    def test_extracted_rep_matches_closed_form(self, two_atom_rep):
        rep_num = extract_rep_r(TWO_ATOM)
        for r in (0.1, 0.25, 0.9, 1.0, 3.0):
            assert g_radial(rep_num, r) == pytest.approx(
                g_radial(two_atom_rep, r), rel=1e-4, abs=1e-6
            )

    def test_extracted_rep_infinite_inside_density(self, pl_setup):
        mu, rep = pl_setup
        # rho support sits inside the reciprocal hull of supp(mu)
        vt = vt_plus_r(rep, 2.0)
        mid = 0.5 * (vt[0][0] + vt[0][1])
        assert np.isinf(g_radial(rep, mid))


class TestGPolar:
    def test_small_angle_limit_is_g(self, two_atom_rep):
        for r in (0.3, 0.5, 0.9):
            lim = g_polar(TWO_ATOM, r, 1e-7)
            tgt = g_radial(two_atom_rep, r)
            if np.isinf(tgt):
                assert lim > 1e3
            else:
                assert lim == pytest.approx(tgt, rel=1e-5)

    def test_decreasing_in_angle(self):
        thetas = np.linspace(0.05, np.pi - 0.05, 40)
        vals = g_polar(TWO_ATOM, np.full(40, 0.5), thetas)
        assert np.all(np.diff(vals) <= 1e-12)

    def test_vanishes_at_pi(self):
        assert g_polar(TWO_ATOM, 0.5, np.pi - 1e-9) == pytest.approx(0.0, abs=1e-6)


class TestAngle:
    def test_zero_at_detachment_endpoints(self, two_atom_rep):
        assert angle_a_t(TWO_ATOM, two_atom_rep, 2.0, 0.25) == 0.0
        assert angle_a_t(TWO_ATOM, two_atom_rep, 2.0, 1.0) == 0.0

    def test_positive_inside_with_residual(self, two_atom_rep):
        a = angle_a_t(TWO_ATOM, two_atom_rep, 2.0, 0.5)
        assert a > 0.1
        z = 0.5 * np.exp(1j * a)
        resid = abs(log_kappa(TWO_ATOM, np.array([z]))[0].imag + a)
        assert resid < 1e-8

    def test_point_mass_angle_zero_everywhere(self):
        rep = closed_form_rho_atomic_r(POINT)
        for r in (0.1, 1.0, 3.0, 10.0):
            assert angle_a_t(POINT, rep, 2.0, r) == 0.0

    def test_rejects_t_at_most_one(self, two_atom_rep):
        with pytest.raises(ValueError):
            angle_a_t(TWO_ATOM, two_atom_rep, 1.0, 0.5)

    def test_angle_grows_with_t(self, two_atom_rep):
        a2 = angle_a_t(TWO_ATOM, two_atom_rep, 2.0, 0.5)
        a4 = angle_a_t(TWO_ATOM, two_atom_rep, 4.0, 0.5)
        a8 = angle_a_t(TWO_ATOM, two_atom_rep, 8.0, 0.5)
        assert 0 < a2 < a4 < a8 < np.pi


class TestVtPlus:
    def test_two_atom_endpoints(self, two_atom_rep):
        vt = vt_plus_r(two_atom_rep, 2.0)
        assert len(vt) == 1
        assert vt[0][0] == pytest.approx(0.25, abs=1e-6)
        assert vt[0][1] == pytest.approx(1.0, abs=1e-6)

    def test_contains_rho_support(self, two_atom_rep):
        for t in (1.2, 1.5, 2.0, 4.0):
            vt = vt_plus_r(two_atom_rep, t)
            covered = any(lo <= 0.4 and 0.625 <= hi for lo, hi in vt)
            assert covered

    def test_nested_in_t(self, two_atom_rep):
        prev = None
        for t in (1.5, 2.0, 4.0, 8.0):
            vt = vt_plus_r(two_atom_rep, t)
            assert len(vt) == 1
            if prev is not None:
                assert vt[0][0] < prev[0] and vt[0][1] > prev[1]
            prev = vt[0]

    def test_unbounded_component(self):
        mu = HalfLineMeasure(atom_positions=[2.0], atom_masses=[0.6], mass_at_zero=0.4)
        rep = closed_form_rho_atomic_r(mu)
        vt = vt_plus_r(rep, 2.0)
        assert len(vt) == 1
        assert np.isinf(vt[0][1])
        assert vt[0][0] == pytest.approx(0.625, abs=1e-9)

    def test_point_mass_empty(self):
        rep = closed_form_rho_atomic_r(POINT)
        assert vt_plus_r(rep, 2.0) == []

    def test_two_components_close_to_one(self):
        mu = HalfLineMeasure(atom_positions=[1.0, 2.0, 3.0],
                             atom_masses=[1 / 3, 1 / 3, 1 / 3])
        rep = closed_form_rho_atomic_r(mu)
        # two separate islands just above t = 1, merged for large t
        vt_small = vt_plus_r(rep, 1.05)
        vt_large = vt_plus_r(rep, 8.0)
        assert len(vt_small) == 2
        assert len(vt_large) == 1


class TestBoundaryMap:
    def test_frozen_two_atom_values(self, two_atom_rep):
        assert h_t_r(TWO_ATOM, two_atom_rep, 2.0, 0.25) == pytest.approx(0.0625, abs=1e-12)
        assert h_t_r(TWO_ATOM, two_atom_rep, 2.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_point_mass_scaling_law(self):
        c = 3.0
        rep = closed_form_rho_atomic_r(POINT)
        for t in (1.5, 2.0, 4.0):
            for r in (0.1, 1.0, 7.0):
                want = r * c ** (-(t - 1.0))
                assert h_t_r(POINT, rep, t, r) == pytest.approx(want, rel=1e-12)

    def test_strictly_increasing(self, two_atom_rep):
        rs = np.geomspace(0.01, 50.0, 300)
        hs = np.array([h_t_r(TWO_ATOM, two_atom_rep, 2.0, r) for r in rs])
        assert np.all(np.diff(hs) > 0)


class TestCurve:
    def test_fields_and_set_flags(self, two_atom_rep):
        curve = build_curve_r(TWO_ATOM, two_atom_rep, 2.0, n_grid=256)
        assert isinstance(curve, BoundaryCurveR)
        assert curve.r_grid.size == 256
        inside = curve.in_set()
        lo, hi = curve.vt_plus[0]
        strict = (curve.r_grid > lo + 1e-9) & (curve.r_grid < hi - 1e-9)
        assert np.all(inside[strict])
        assert np.all(curve.angles[~inside] == 0)

    def test_residuals_on_set(self, pl_setup):
        mu, rep = pl_setup
        curve = build_curve_r(mu, rep, 2.0, n_grid=256)
        ins = curve.in_set()
        z = curve.r_grid[ins] * np.exp(1j * curve.angles[ins])
        resid = np.abs(log_kappa(mu, z).imag + curve.angles[ins])
        assert resid.max() < 1e-8

    def test_h_monotone_across_regimes(self, pl_setup):
        mu, rep = pl_setup
        curve = build_curve_r(mu, rep, 2.0, n_grid=256)
        assert np.all(np.diff(curve.h_values) > 0)

    def test_g_convex_off_support(self, two_atom_rep):
        for lo, hi in ((0.02, 0.2), (0.65, 0.95), (1.2, 20.0)):
            rs = np.geomspace(lo, hi, 60)
            gs = np.array([g_radial(two_atom_rep, r) for r in rs])
            d1 = np.diff(gs) / np.diff(rs)
            d2 = np.diff(d1) / (rs[2:] - rs[:-2])
            assert np.all(d2 >= -1e-9)

    def test_csv_shape_and_determinism(self, two_atom_rep):
        curve = build_curve_r(TWO_ATOM, two_atom_rep, 2.0, n_grid=64)
        text = curve.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "r,angle,g,h,in_vt_plus"
        assert len(lines) == 65
        assert text == curve.to_csv()
        flags = [int(row.split(",")[-1]) for row in lines[1:]]
        assert set(flags) <= {0, 1}


@settings(max_examples=25, deadline=None)
@given(mu=atomic_halfline())
def test_vt_plus_covers_rho_intervals(mu):
    rep = closed_form_rho_atomic_r(mu)
    vt = vt_plus_r(rep, 2.0)
    for lo, hi in rep.intervals:
        mid = 0.5 * (lo + hi) if np.isfinite(hi) else 2 * lo
        assert any(a <= mid <= b for a, b in vt)


@settings(max_examples=15, deadline=None)
@given(mu=atomic_halfline())
def test_boundary_map_increasing_property(mu):
    rep = closed_form_rho_atomic_r(mu)
    lo, hi = mu.support_hull()
    rs = np.geomspace(lo / 5.0, hi * 5.0, 40)
    hs = np.array([h_t_r(mu, rep, 2.0, r) for r in rs])
    assert np.all(np.diff(hs) > 0)
