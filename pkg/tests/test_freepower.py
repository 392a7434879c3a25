"""End-to-end assembly: densities, atoms, support components, sweeps."""

import json

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from freemult.boundary_circle import build_curve_t
from freemult.boundary_halfline import build_curve_r
from freemult.errors import DomainError, LocateError
from freemult.freepower import (
    PowerResult,
    _mass_sqrt_edges,
    assemble,
    atom_identity_check,
    atoms_r,
    atoms_t,
    component_count_sweep,
    density_r,
    density_t,
)
from freemult.herglotz import closed_form_rho_atomic_r, extract_rep_r, extract_rep_t
from freemult.measures import CircleMeasure, HalfLineMeasure

pytestmark = pytest.mark.filterwarnings("ignore::UserWarning")

TWO_ATOM = HalfLineMeasure(atom_positions=[1.0, 4.0], atom_masses=[0.5, 0.5])
POINT = HalfLineMeasure(atom_positions=[1.7], atom_masses=[1.0])
THREE_EQUAL = HalfLineMeasure(
    atom_positions=[1.0, 2.0, 3.0], atom_masses=[1 / 3, 1 / 3, 1 / 3]
)
SPREAD = HalfLineMeasure(
    atom_positions=[0.1, 0.2, 5.0, 10.0], atom_masses=[0.25] * 4
)


def haar_mix(s, atom_angle=0.0, n=1024):
    grid = np.linspace(-np.pi, np.pi, n, endpoint=False)
    return CircleMeasure(
        atom_angles=[atom_angle],
        atom_masses=[1.0 - s],
        grid=grid,
        values=np.full(n, s / (2 * np.pi)),
    )


@pytest.fixture(scope="module")
def pl_mix():
    mu = HalfLineMeasure(
        atom_positions=[2.0],
        atom_masses=[0.5],
        grid=np.linspace(1.0, 3.0, 257),
        values=np.full(257, 0.25),
    )
    return mu, extract_rep_r(mu)


@pytest.fixture(scope="module")
def skew_mix():
    mu = haar_mix(0.2)
    return mu, extract_rep_t(mu)


@pytest.fixture(scope="module")
def skew_curve(skew_mix):
    mu, rep = skew_mix
    return build_curve_t(mu, rep, 2.0)


class TestAtomMaps:
    def test_survival_is_strict(self):
        mu = HalfLineMeasure(atom_positions=[2.0], atom_masses=[0.5],
                             grid=np.linspace(1.0, 3.0, 9),
                             values=np.full(9, 0.25))
        assert atoms_r(mu, 2.0) == []

    def test_halfline_image_and_mass(self):
        mu = HalfLineMeasure(atom_positions=[1.3], atom_masses=[0.9],
                             grid=np.linspace(0.5, 2.0, 9),
                             values=np.full(9, 0.1 / 1.5))
        ((pos, m),) = atoms_r(mu, 3.0)
        assert pos == pytest.approx(1.3 ** 3, rel=1e-15)
        assert m == pytest.approx(0.7, abs=1e-12)

    def test_mass_at_zero_passes_through(self):
        mu = HalfLineMeasure(atom_positions=[2.0], atom_masses=[0.8],
                             mass_at_zero=0.2)
        out = atoms_r(mu, 1.5)
        assert out[0] == (0.0, 0.2)
        assert out[1][0] == pytest.approx(2.0 ** 1.5, rel=1e-15)
        assert out[1][1] == pytest.approx(0.7, abs=1e-12)

    def test_circle_image_wraps(self):
        mu = CircleMeasure(atom_angles=[2.0], atom_masses=[1.0])
        ((ang, m),) = atoms_t(mu, 4.0)
        assert ang == pytest.approx(8.0 - 2 * np.pi, abs=1e-12)
        assert m == pytest.approx(1.0)

    def test_circle_threshold(self):
        mu = CircleMeasure(atom_angles=[0.4], atom_masses=[0.6],
                           grid=np.linspace(-np.pi, np.pi, 16, endpoint=False),
                           values=np.full(16, 0.4 / (2 * np.pi)))
        assert atoms_t(mu, 4.0) == []
        ((ang, m),) = atoms_t(mu, 2.0)
        assert ang == pytest.approx(0.8, abs=1e-12)
        assert m == pytest.approx(0.2, abs=1e-12)

    def test_rep_validation_accepts_embedded_atom(self, skew_mix):
        mu, rep = skew_mix
        ((ang, m),) = atoms_t(mu, 2.0, rep=rep)
        assert (ang, m) == (0.0, pytest.approx(0.6, abs=1e-12))

    def test_rep_validation_rejects_contradiction(self, skew_mix):
        _, rep = skew_mix
        # claims an atom the rep knows nothing about: g is infinite there
        fake = CircleMeasure(atom_angles=[1.3], atom_masses=[0.9],
                             grid=np.linspace(-np.pi, np.pi, 16, endpoint=False),
                             values=np.full(16, 0.1 / (2 * np.pi)))
        with pytest.raises(LocateError):
            atoms_t(fake, 2.0, rep=rep)


class TestAtomIdentity:
    def test_exact_rep_on_atoms(self):
        rep = closed_form_rho_atomic_r(TWO_ATOM)
        assert atom_identity_check(TWO_ATOM, rep, 1.0) < 1e-12
        assert atom_identity_check(TWO_ATOM, rep, 0.25) < 1e-12

    def test_no_atom_gives_inf(self):
        rep = closed_form_rho_atomic_r(TWO_ATOM)
        assert atom_identity_check(TWO_ATOM, rep, 0.5) == np.inf

    def test_circle_orientation(self):
        mu = haar_mix(0.2, atom_angle=0.7)
        rep = extract_rep_t(mu)
        # the atom at +0.7 pairs with the test point -0.7, not +0.7
        assert atom_identity_check(mu, rep, -0.7) < 1e-4
        assert atom_identity_check(mu, rep, 0.7) == np.inf


class TestPointMass:
    def test_power_of_point_mass(self):
        res = assemble(POINT, 3.0)
        assert res.atoms == ((1.7 ** 3, 1.0),)
        assert res.component_count == 1
        assert res.mass_balance == 1.0
        assert res.density_samples.shape == (0, 2)

    def test_circle_rotation(self):
        mu = CircleMeasure(atom_angles=[0.7], atom_masses=[1.0])
        res = assemble(mu, 2.0)
        assert res.atoms == ((pytest.approx(1.4, abs=1e-15), 1.0),)
        assert res.component_count == 1
        assert res.mass_balance == 1.0


class TestTwoAtomHalfLine:
    def test_merged_support_at_two(self):
        res = assemble(TWO_ATOM, 2.0)
        assert res.atoms == ()
        assert res.component_count == 1
        (lo, hi), = res.support_components
        assert lo == pytest.approx(1.0, abs=2e-9)
        assert hi == pytest.approx(16.0, abs=2e-8)
        assert abs(res.mass_balance - 1.0) < 1e-3
        assert np.all(res.density_samples[:, 1] >= 0.0)
        assert np.all(np.diff(res.density_samples[:, 0]) > 0)

    def test_surviving_atoms_below_two(self):
        res = assemble(TWO_ATOM, 1.5)
        assert res.atoms == ((1.0, 0.25), (8.0, 0.25))
        assert res.component_count == 3
        assert abs(res.mass_balance - 1.0) < 1e-3

    def test_borderline_triple(self):
        res = assemble(THREE_EQUAL, 1.5)
        assert res.atoms == ()
        assert res.component_count == 2
        (a0, b0), (a1, b1) = res.support_components
        assert a0 == pytest.approx(1.0, abs=1e-6)
        assert a1 == pytest.approx(2.0 ** 1.5, abs=1e-4)
        assert b1 == pytest.approx(3.0 ** 1.5, abs=1e-6)
        assert abs(res.mass_balance - 1.0) < 1e-3

    def test_zero_atom_component(self):
        mu = HalfLineMeasure(atom_positions=[2.0], atom_masses=[0.8],
                             mass_at_zero=0.2)
        res = assemble(mu, 1.5)
        assert res.atoms[0] == (0.0, 0.2)
        assert res.component_count == 2
        assert res.support_components[0][0] == 0.0
        assert abs(res.mass_balance - 1.0) < 1e-3


class TestMixedHalfLine:
    @pytest.mark.parametrize("t", [1.5, 2.0, 3.0])
    def test_mass_balance(self, pl_mix, t):
        mu, rep = pl_mix
        res = assemble(mu, t, rep=rep)
        assert res.component_count == 1
        assert abs(res.mass_balance - 1.0) < 5e-4

    def test_borderline_atom_dies_at_two(self, pl_mix):
        mu, rep = pl_mix
        assert assemble(mu, 2.0, rep=rep).atoms == ()

    def test_surviving_atom_is_embedded(self, pl_mix):
        mu, rep = pl_mix
        res = assemble(mu, 1.5, rep=rep)
        ((pos, m),) = res.atoms
        assert pos == pytest.approx(2.0 ** 1.5, rel=1e-12)
        assert m == pytest.approx(0.25, abs=1e-12)
        (lo, hi), = res.support_components
        assert lo < pos < hi


class TestCircleAssembly:
    def test_knife_edge_balances(self):
        mu = haar_mix(0.5)
        res = assemble(mu, 2.0)
        assert res.atoms == ()
        assert res.component_count == 1
        assert res.support_components == ((-np.pi, np.pi),)
        assert abs(res.mass_balance - 1.0) < 1e-3

    def test_embedded_atom(self, skew_mix):
        mu, rep = skew_mix
        res = assemble(mu, 2.0, rep=rep)
        ((ang, m),) = res.atoms
        assert ang == 0.0
        assert m == pytest.approx(0.6, abs=1e-12)
        assert res.component_count == 1
        assert res.support_components == ((-np.pi, np.pi),)
        assert abs(res.mass_balance - 1.0) < 1e-3

    def test_conjugation_equivariance(self):
        plus = assemble(haar_mix(0.2, atom_angle=0.9), 2.0)
        minus = assemble(haar_mix(0.2, atom_angle=-0.9), 2.0)
        assert plus.atoms[0][0] == pytest.approx(1.8, abs=1e-12)
        assert minus.atoms[0][0] == pytest.approx(-1.8, abs=1e-12)
        assert plus.atoms[0][1] == minus.atoms[0][1]
        assert plus.component_count == minus.component_count == 1
        assert plus.mass_balance == pytest.approx(minus.mass_balance, abs=1e-9)

    def test_density_nonnegative(self, skew_mix):
        mu, rep = skew_mix
        res = assemble(mu, 2.0, rep=rep)
        assert np.all(res.density_samples[:, 1] >= 0.0)
        assert np.all(np.diff(res.density_samples[:, 0]) > 0)


class TestPointDensities:
    def test_halfline_point_value(self):
        rep = closed_form_rho_atomic_r(TWO_ATOM)
        curve = build_curve_r(TWO_ATOM, rep, 2.0)
        x, p = density_r(TWO_ATOM, rep, curve, 0.5)
        assert x == pytest.approx(4.0, abs=1e-9)
        assert p > 0.0

    def test_halfline_outside_raises(self):
        rep = closed_form_rho_atomic_r(TWO_ATOM)
        curve = build_curve_r(TWO_ATOM, rep, 2.0)
        with pytest.raises(DomainError):
            density_r(TWO_ATOM, rep, curve, 2.0)

    def test_circle_point_value(self, skew_mix, skew_curve):
        mu, rep = skew_mix
        zeta, p = density_t(mu, rep, skew_curve, 1.0)
        assert abs(abs(zeta) - 1.0) < 1e-9
        assert p >= 0.0

    def test_circle_detached_direction_raises(self, skew_mix, skew_curve):
        mu, rep = skew_mix
        with pytest.raises(DomainError):
            density_t(mu, rep, skew_curve, 0.0)


class TestIdentityPower:
    def test_halfline(self, pl_mix):
        mu, _ = pl_mix
        res = assemble(mu, 1.0)
        assert res.t == 1.0
        assert res.atoms == ((2.0, 0.5),)
        assert np.array_equal(res.density_samples[:, 0], mu.grid)
        assert np.array_equal(res.density_samples[:, 1], mu.values)
        assert res.mass_balance == pytest.approx(mu.total_mass(), abs=1e-12)

    def test_circle(self):
        mu = haar_mix(0.5)
        res = assemble(mu, 1.0)
        assert res.atoms == ((0.0, 0.5),)
        assert res.component_count == 1
        assert res.mass_balance == pytest.approx(1.0, abs=1e-9)


class TestValidation:
    def test_power_below_one(self):
        with pytest.raises(ValueError):
            assemble(TWO_ATOM, 0.5)

    def test_wrong_type(self):
        with pytest.raises(TypeError):
            assemble(np.array([1.0]), 2.0)

    def test_sweep_wants_ascending(self):
        with pytest.raises(ValueError):
            component_count_sweep(TWO_ATOM, [2.0, 1.5])
        with pytest.raises(ValueError):
            component_count_sweep(TWO_ATOM, [1.0, 2.0])


class TestComponentSweep:
    def test_two_atom(self):
        assert component_count_sweep(TWO_ATOM, [2.0, 3.0]) == [1, 1]
        assert component_count_sweep(TWO_ATOM, [1.5]) == [3]

    def test_spread_atoms(self):
        counts = component_count_sweep(SPREAD, [1.2, 1.5, 2.0, 4.0, 8.0])
        assert counts == [7, 1, 1, 1, 1]

    def test_spread_matches_assembly(self):
        res = assemble(SPREAD, 1.2)
        assert res.component_count == 7
        assert len(res.atoms) == 4
        assert abs(res.mass_balance - 1.0) < 1e-3

    def test_circle_mix(self, skew_mix):
        mu, rep = skew_mix
        counts = component_count_sweep(mu, [1.2, 1.5, 2.0, 4.0, 8.0], rep=rep)
        assert counts == [1, 1, 1, 1, 1]


class TestSerialization:
    def test_json_shape_and_determinism(self, pl_mix):
        mu, rep = pl_mix
        res = assemble(mu, 2.0, rep=rep)
        obj = res.to_json_obj()
        assert set(obj) == {"t", "space", "atoms", "components", "density",
                            "mass_balance", "component_count"}
        assert obj["space"] == "halfline"
        assert len(obj["density"]["locations"]) == len(obj["density"]["values"])
        again = assemble(mu, 2.0, rep=rep).to_json_obj()
        assert json.dumps(obj, sort_keys=True) == json.dumps(again, sort_keys=True)

    def test_csv_layout(self, pl_mix):
        mu, rep = pl_mix
        res = assemble(mu, 2.0, rep=rep)
        text = res.density_csv()
        lines = text.strip().split("\n")
        assert lines[0] == "x,density"
        assert len(lines) == res.density_samples.shape[0] + 1
        assert res.density_csv() == text

    def test_circle_csv_header(self):
        res = assemble(CircleMeasure(atom_angles=[0.7], atom_masses=[1.0]), 2.0)
        assert res.density_csv().startswith("angle,density")


class TestEdgeQuadrature:
    def test_arcsine_spikes(self):
        # density with inverse square root blowup at both ends
        k = np.arange(1, 257)
        xs = 0.5 * (1.0 - np.cos(np.pi * k / 257.0))
        ps = 1.0 / (np.pi * np.sqrt(xs * (1.0 - xs)))
        assert _mass_sqrt_edges(xs, ps, 0.0, 1.0) == pytest.approx(1.0, abs=1e-4)


@st.composite
def atomic_measures(draw):
    k = draw(st.integers(min_value=2, max_value=4))
    base = draw(st.floats(min_value=0.3, max_value=1.2))
    ratios = [draw(st.floats(min_value=1.4, max_value=2.5)) for _ in range(k - 1)]
    positions = [base]
    for r in ratios:
        positions.append(positions[-1] * r)
    weights = [draw(st.floats(min_value=0.1, max_value=1.0)) for _ in range(k)]
    total = sum(weights)
    masses = [w / total for w in weights]
    assume(min(masses) > 0.05)
    return HalfLineMeasure(atom_positions=positions, atom_masses=masses)


class TestRandomAtomic:
    @given(mu=atomic_measures(), t=st.floats(min_value=1.15, max_value=4.0))
    @settings(max_examples=20, deadline=None)
    def test_assembly_invariants(self, mu, t):
        res = assemble(mu, t)
        assert abs(res.mass_balance - 1.0) < 1e-2
        assert res.component_count == len(res.support_components)
        assert np.all(res.density_samples[:, 1] >= 0.0)
        assert np.all(np.diff(res.density_samples[:, 0]) > 0)
        thr = (t - 1.0) / t
        expected = sorted(
            (p ** t, t * m - (t - 1.0))
            for p, m in zip(mu.atom_positions, mu.atom_masses)
            if m > thr
        )
        got = sorted(res.atoms)
        assert len(got) == len(expected)
        for (ga, gm), (ea, em) in zip(got, expected):
            assert ga == pytest.approx(ea, rel=1e-9)
            assert gm == pytest.approx(em, abs=1e-9)

    @given(mu=atomic_measures())
    @settings(max_examples=10, deadline=None)
    def test_counts_nonincreasing(self, mu):
        counts = component_count_sweep(mu, [1.2, 1.7, 2.5, 5.0])
        assert all(a >= b for a, b in zip(counts, counts[1:]))
