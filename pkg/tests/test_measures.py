"""Transform evaluations, membership checks, inversion, and serialization."""

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freemult.errors import DomainError, SchemaError
from freemult.measures import (
    CircleMeasure,
    HalfLineMeasure,
    invert_poisson,
    invert_stieltjes,
    measure_from_json,
    measure_to_json,
)


def two_atom():
    return HalfLineMeasure(atom_positions=[1.0, 4.0], atom_masses=[0.5, 0.5])


def haar_mix(s=0.5, n=512):
    grid = np.linspace(-np.pi, np.pi, n + 1)[:-1]
    return CircleMeasure(
        atom_angles=[0.0], atom_masses=[1 - s], grid=grid, values=np.full(n, s / (2 * np.pi))
    )


class TestHalfLineTransforms:
    def test_point_mass_psi_at_minus_one(self):
        for c in (0.5, 1.0, 3.0):
            mu = HalfLineMeasure(atom_positions=[c], atom_masses=[1.0])
            assert abs(mu.psi(np.array([-1.0 + 0j]))[0] - (-c / (1 + c))) < 1e-15

    def test_point_mass_eta_is_linear(self):
        mu = HalfLineMeasure(atom_positions=[3.0], atom_masses=[1.0])
        zs = np.array([-0.2 + 0j, 0.1 + 0.3j, -1 + 1j])
        assert np.max(np.abs(mu.eta(zs) - 3.0 * zs)) < 1e-14
        assert np.max(np.abs(mu.kappa(zs) - 1 / 3)) < 1e-14

    def test_two_atom_rational_forms(self):
        mu = two_atom()
        zs = np.array([-1 + 0j, 0.3 + 0.7j, -2.5 + 0.01j, 2 + 3j, 1e-4 + 1e-4j])
        psi = zs * (5 - 8 * zs) / (2 * (1 - zs) * (1 - 4 * zs))
        eta = zs * (5 - 8 * zs) / (2 - 5 * zs)
        assert np.max(np.abs(mu.psi(zs) - psi)) < 1e-13
        assert np.max(np.abs(mu.eta(zs) - eta)) < 1e-13
        assert np.max(np.abs(mu.kappa(zs) - (2 - 5 * zs) / (5 - 8 * zs))) < 1e-12

    def test_two_atom_eta_prime_at_zero_is_mean(self):
        mu = two_atom()
        d = mu.eta_prime(np.array([-1e-9 + 0j]))[0]
        assert abs(d - 2.5) < 1e-6
        assert mu.mean() == 2.5

    def test_mixed_measure_moments(self):
        mu = HalfLineMeasure(
            atom_positions=[2.0], atom_masses=[0.5],
            grid=np.array([1.0, 3.0]), values=np.array([0.25, 0.25]),
        )
        assert abs(mu.moment(0) - 1.0) < 1e-14
        assert abs(mu.mean() - (1.0 + 0.5 * 2.0)) < 1e-14  # uniform part mean = 2
        assert abs(mu.moment(2) - (0.5 * 4 + 0.5 * 13 / 3)) < 1e-14

    def test_sigma_point_mass(self):
        mu = HalfLineMeasure(atom_positions=[3.0], atom_masses=[1.0])
        assert abs(mu.sigma(-0.1) - 1 / 3) < 1e-13

    def test_sigma_residual(self):
        mu = two_atom()
        z = -0.05
        w = z * mu.sigma(z)
        assert abs(mu.eta(np.array([complex(w)]))[0] - z) < 1e-10

    def test_domain_rejections(self):
        mu = two_atom()
        for z in (0.5 + 0j, 0.0 + 0j, 2.0 + 1e-14j, np.inf + 1j):
            with pytest.raises(DomainError):
                mu.psi(np.array([z]))


class TestCircleTransforms:
    def test_haar_mixture_closed_forms(self):
        s = 0.5
        cm = haar_mix(s)
        zs = np.array([0.3 + 0.2j, -0.5 + 0.1j, 0.7j, 0.95 + 0j])
        assert np.max(np.abs(cm.psi(zs) - (1 - s) * zs / (1 - zs))) < 1e-12
        assert np.max(np.abs(cm.eta(zs) - (1 - s) * zs / (1 - s * zs))) < 1e-12
        assert np.max(np.abs(cm.kappa(zs) - (1 - s * zs) / (1 - s))) < 1e-12
        assert abs(cm.mean() - s * 0 - (1 - s)) < 1e-13

    def test_rotated_point_mass(self):
        beta = 0.7
        cm = CircleMeasure(atom_angles=[beta], atom_masses=[1.0])
        zs = np.array([0.2 + 0.1j, -0.4j])
        assert np.max(np.abs(cm.eta(zs) - np.exp(1j * beta) * zs)) < 1e-14

    def test_sigma_haar_mixture_quadratic(self):
        # eta(w) = (1-s)w/(1-sw) inverts to w = z/((1-s) + sz)
        s = 0.5
        cm = haar_mix(s)
        z = 0.08 - 0.03j
        w_exact = z / ((1 - s) + s * z)
        assert abs(z * cm.sigma(z) - w_exact) < 1e-11

    def test_domain_rejections(self):
        cm = haar_mix()
        with pytest.raises(DomainError):
            cm.psi(np.array([1.0 + 0j]))
        with pytest.raises(DomainError):
            cm.eta(np.array([1.2 * np.exp(1j)]))


class TestMembership:
    def test_half_line_members(self):
        assert two_atom().membership_report().member
        mu = HalfLineMeasure(
            atom_positions=[2.0], atom_masses=[0.5],
            grid=np.array([1.0, 3.0]), values=np.array([0.25, 0.25]),
        )
        assert mu.membership_report().member

    def test_point_mass_at_zero_excluded(self):
        rep = HalfLineMeasure(mass_at_zero=1.0).membership_report()
        assert not rep.member
        assert any("excluded point" in r for r in rep.reasons)

    def test_circle_members(self):
        assert CircleMeasure(atom_angles=[0.7], atom_masses=[1.0]).membership_report().member
        rep = haar_mix(0.5).membership_report()
        assert rep.member
        assert rep.checks["winding"] == 0

    def test_two_circle_atoms_fail_by_winding(self):
        # eta(z) = z(1+2z)/(2+z) vanishes at z = -1/2
        bad = CircleMeasure(atom_angles=[0.0, np.pi], atom_masses=[0.75, 0.25])
        rep = bad.membership_report()
        assert not rep.member
        assert rep.checks["winding"] == 1

    def test_zero_mean_fails(self):
        bad = CircleMeasure(atom_angles=[0.0, np.pi], atom_masses=[0.5, 0.5])
        rep = bad.membership_report()
        assert not rep.member
        assert any("first moment" in r for r in rep.reasons)


class TestInversion:
    def test_stieltjes_constant_for_zero_eta(self):
        x = np.linspace(0.5, 2.0, 11)
        p = invert_stieltjes(lambda z: np.zeros_like(z), x, 1e-3)
        # Im(z)/pi = eps/pi before the reciprocal-variable conversion
        assert np.max(np.abs(p - 1e-3 / np.pi / x ** 2)) < 1e-18

    def test_stieltjes_point_mass_concentrates(self):
        c = 2.0
        mu = HalfLineMeasure(atom_positions=[c], atom_masses=[1.0])
        eps = 1e-6
        x = np.linspace(1 / c - 1e-3, 1 / c + 1e-3, 4001)
        p = invert_stieltjes(lambda z: mu.eta(z), x, eps)
        window_mass = np.trapezoid(p, x)
        assert window_mass > 0.995
        assert abs(x[np.argmax(p)] - 1 / c) < 1e-5

    def test_poisson_haar_is_flat(self):
        th = np.linspace(-np.pi, np.pi, 64)
        q = invert_poisson(lambda z: np.zeros_like(z), th, 0.9)
        assert np.max(np.abs(q - 1 / (2 * np.pi))) < 1e-15

    def test_poisson_point_mass_peaks_at_conjugate_angle(self):
        beta = 0.7
        cm = CircleMeasure(atom_angles=[beta], atom_masses=[1.0])
        th = np.linspace(-np.pi, np.pi, 8192, endpoint=False)
        q = invert_poisson(lambda z: cm.eta(z), th, 0.999)
        assert abs(th[np.argmax(q)] - (-beta)) < 2e-3
        assert abs(np.sum(q) * (th[1] - th[0]) - 1.0) < 1e-3

    def test_poisson_haar_mixture_normalizes(self):
        # the atom's Poisson peak has width 1 - r, so the grid must resolve it
        cm = haar_mix(0.5)
        th = np.linspace(-np.pi, np.pi, 8192, endpoint=False)
        q = invert_poisson(lambda z: cm.eta(z), th, 0.999)
        assert abs(np.sum(q) * (th[1] - th[0]) - 1.0) < 1e-3


class TestSerialization:
    def test_round_trip_halfline(self):
        mu = HalfLineMeasure(
            atom_positions=[2.0], atom_masses=[0.4], mass_at_zero=0.1,
            grid=np.array([1.0, 3.0]), values=np.array([0.25, 0.25]),
        )
        doc = measure_to_json(mu)
        mu2 = measure_from_json(json.dumps(doc))
        assert doc == measure_to_json(mu2)
        z = np.array([-1 + 0.5j])
        assert abs(mu.psi(z)[0] - mu2.psi(z)[0]) < 1e-15

    def test_round_trip_circle(self):
        cm = haar_mix(0.3, n=64)
        doc = measure_to_json(cm)
        cm2 = measure_from_json(doc)
        z = np.array([0.3 + 0.4j])
        assert abs(cm.psi(z)[0] - cm2.psi(z)[0]) < 1e-15

    @pytest.mark.parametrize(
        "doc",
        [
            {"space": "nowhere", "atoms": []},
            {"space": "T", "atoms": [{"pos": 0.0, "mass": 1.0}], "mass_at_zero": 0.1},
            {"space": "Rplus", "atoms": [{"pos": 1.0}]},
            {"space": "Rplus", "atoms": [{"pos": 1.0, "mass": 0.5}]},  # mass deficit
            {"space": "Rplus", "atoms": "oops"},
        ],
    )
    def test_schema_rejections(self, doc):
        with pytest.raises(SchemaError):
            measure_from_json(doc)

    def test_validation_rejections(self):
        with pytest.raises(SchemaError):
            HalfLineMeasure(atom_positions=[1.0, 1.0], atom_masses=[0.5, 0.5])
        with pytest.raises(SchemaError):
            HalfLineMeasure(atom_positions=[-1.0], atom_masses=[1.0])
        with pytest.raises(SchemaError):
            HalfLineMeasure(
                atom_positions=[], atom_masses=[],
                grid=np.array([1.0, 2.0]), values=np.array([-0.5, 2.5]),
            )


@st.composite
def halfline_atom_measures(draw):
    n = draw(st.integers(1, 4))
    pos = draw(
        st.lists(st.floats(0.05, 20.0), min_size=n, max_size=n, unique_by=lambda x: round(x, 3))
    )
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    masses = np.array(raw) / np.sum(raw)
    return HalfLineMeasure(atom_positions=np.array(pos), atom_masses=masses)


@st.composite
def circle_atom_measures(draw):
    n = draw(st.integers(1, 4))
    ang = draw(
        st.lists(
            st.floats(-3.1, 3.1), min_size=n, max_size=n, unique_by=lambda x: round(x, 3)
        )
    )
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    masses = np.array(raw) / np.sum(raw)
    return CircleMeasure(atom_angles=np.array(ang), atom_masses=masses)


@given(halfline_atom_measures(), st.complex_numbers(max_magnitude=50.0))
@settings(max_examples=120, deadline=None)
def test_conjugate_symmetry(mu, z):
    if abs(z.imag) < 1e-6:
        z = z + 0.5j
    zs = np.array([z, np.conj(z)])
    p = mu.psi(zs)
    assert abs(p[1] - np.conj(p[0])) < 1e-12 * max(1.0, abs(p[0]))


@given(circle_atom_measures(), st.floats(0.01, 0.999), st.floats(-np.pi, np.pi))
@settings(max_examples=120, deadline=None)
def test_schwarz_bound(cm, r, th):
    z = r * np.exp(1j * th)
    assert abs(cm.eta(np.array([z]))[0]) <= r + 1e-12


@given(halfline_atom_measures(), st.floats(0.01, 100.0), st.floats(0.05, np.pi - 0.05))
@settings(max_examples=120, deadline=None)
def test_argument_monotonicity(mu, r, theta):
    e = mu.eta(np.array([r * np.exp(1j * theta)]))[0]
    assert np.angle(e) >= theta - 1e-9
