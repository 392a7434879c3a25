"""Probability measures on (0, infinity) and on the unit circle.

A measure is a finite list of atoms plus an optional absolutely continuous
part sampled on a grid (piecewise-linear interpolation between nodes).  The
classes evaluate the moment-generating transform psi, the eta-transform
eta = psi/(1 + psi), kappa = z/eta, and the local inverse Sigma, and check
membership in the classes where multiplicative free convolution powers are
defined: on the half-line everything except the point mass at zero, on the
circle measures with nonzero mean whose eta-transform never vanishes on the
punctured disc.

Variable conventions for the inversion helpers are documented on the
functions themselves; both recover the measure in a reciprocal variable and
the caller converts back (see `invert_stieltjes` and `invert_poisson`).
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from . import _kernels as K
from .errors import (
    DomainError,
    InversionError,
    PoleError,
    SchemaError,
    WindingAmbiguity,
    ZeroEtaError,
)

MASS_TOL = 5e-6
EDGE_GUARD = 1e-12


def _as_sorted_atoms(positions, masses, what):
    pos = np.asarray(positions, dtype=float).ravel()
    mas = np.asarray(masses, dtype=float).ravel()
    if pos.size != mas.size:
        raise SchemaError(f"{what}: {pos.size} positions vs {mas.size} masses")
    if pos.size == 0:
        return pos, mas
    order = np.argsort(pos)
    pos, mas = pos[order], mas[order]
    if np.any(np.diff(pos) <= 0):
        raise SchemaError(f"{what}: atom positions must be pairwise distinct")
    if np.any(mas <= 0) or np.any(mas > 1):
        raise SchemaError(f"{what}: atom masses must lie in (0, 1]")
    return pos, mas


def _check_density(grid, values, what):
    grid = np.asarray(grid, dtype=float).ravel()
    values = np.asarray(values, dtype=float).ravel()
    if grid.size != values.size or grid.size < 2:
        raise SchemaError(f"{what}: density grid needs >= 2 nodes matching values")
    if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
        raise SchemaError(f"{what}: nonfinite density data")
    if np.any(np.diff(grid) <= 0):
        raise SchemaError(f"{what}: density grid must be strictly increasing")
    if np.any(values < -1e-12):
        raise SchemaError(f"{what}: density values must be nonnegative")
    return grid, np.maximum(values, 0.0)


class _Transforms:
    """Shared psi/eta algebra; subclasses provide _psi_parts and _dpsi_parts."""

    def psi(self, z):
        z = self._domain(z)
        return self._psi_parts(z)

    def psi_prime(self, z):
        z = self._domain(z)
        return self._dpsi_parts(z)

    def eta(self, z):
        z = self._domain(z)
        p = self._psi_parts(z)
        d = 1.0 + p
        if np.any(np.abs(d) < EDGE_GUARD):
            raise PoleError("1 + psi vanishes at an evaluation point")
        return p / d

    def eta_prime(self, z):
        z = self._domain(z)
        p = self._psi_parts(z)
        d = 1.0 + p
        if np.any(np.abs(d) < EDGE_GUARD):
            raise PoleError("1 + psi vanishes at an evaluation point")
        return self._dpsi_parts(z) / (d * d)

    def kappa(self, z):
        e = self.eta(z)
        if np.any(np.abs(e) < 1e-250):
            raise ZeroEtaError("eta vanishes; kappa undefined (use the z=0 limit)")
        return np.asarray(z, dtype=complex) / e

    def sigma(self, z, tol=1e-12, maxiter=60):
        """Sigma-transform: eta^{-1}(z)/z by damped Newton near 0."""
        m1 = self.mean()
        if abs(m1) < 1e-12:
            raise InversionError("mean vanishes; eta has no local inverse at 0")
        z = complex(z)
        if z == 0:
            return 1.0 / m1
        w = z / m1
        r = self.eta(np.array([w]))[0] - z
        for _ in range(maxiter):
            if abs(r) <= tol * max(1.0, abs(z)):
                sig = w / z
                return sig.real if abs(sig.imag) < 1e-13 * abs(sig) else sig
            dw = r / self.eta_prime(np.array([w]))[0]
            step = 1.0
            for _ in range(40):
                cand = w - step * dw
                try:
                    rc = self.eta(np.array([cand]))[0] - z
                except (DomainError, PoleError):
                    step *= 0.5
                    continue
                if abs(rc) < abs(r):
                    w, r = cand, rc
                    break
                step *= 0.5
            else:
                raise InversionError("Newton stalled inverting eta")
        raise InversionError("Newton budget exhausted inverting eta")


@dataclasses.dataclass(frozen=True, eq=False)
class HalfLineMeasure(_Transforms):
    """Probability measure on [0, infinity): atoms + piecewise-linear density.

    `mass_at_zero` carries an atom at the origin separately because the
    origin is excluded from `atom_positions` (transforms treat it specially
    and the point mass at zero is not in the multiplicative class).
    """

    atom_positions: np.ndarray = ()
    atom_masses: np.ndarray = ()
    mass_at_zero: float = 0.0
    grid: np.ndarray | None = None
    values: np.ndarray | None = None
    quadrature_hint: int = 2048

    def __post_init__(self):
        pos, mas = _as_sorted_atoms(self.atom_positions, self.atom_masses, "HalfLineMeasure")
        if pos.size and pos[0] <= 0:
            raise SchemaError("HalfLineMeasure: atom positions must be strictly positive")
        if not 0.0 <= self.mass_at_zero <= 1.0:
            raise SchemaError("HalfLineMeasure: mass_at_zero outside [0, 1]")
        object.__setattr__(self, "atom_positions", pos)
        object.__setattr__(self, "atom_masses", mas)
        if (self.grid is None) != (self.values is None):
            raise SchemaError("HalfLineMeasure: grid and values must come together")
        if self.grid is not None:
            grid, values = _check_density(self.grid, self.values, "HalfLineMeasure")
            if grid[0] <= 0:
                raise SchemaError("HalfLineMeasure: density grid must be strictly positive")
            object.__setattr__(self, "grid", grid)
            object.__setattr__(self, "values", values)
            cells = K.cell_arrays(grid, values)
        else:
            cells = K.cell_arrays(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
        object.__setattr__(self, "_cells", cells)
        total = self.total_mass()
        if abs(total - 1.0) > MASS_TOL:
            raise SchemaError(f"HalfLineMeasure: total mass {total:.8f} != 1")

    # -- bookkeeping ---------------------------------------------------

    def total_mass(self):
        return float(self.mass_at_zero + self.atom_masses.sum() + K.pl_mass(*self._cells))

    @property
    def has_ac(self):
        return self._cells[0].size > 0

    def support_hull(self):
        """(min, max) of the support, excluding a possible atom at zero."""
        lo, hi = np.inf, 0.0
        if self.atom_positions.size:
            lo = min(lo, self.atom_positions[0])
            hi = max(hi, self.atom_positions[-1])
        if self.has_ac:
            a, b, _, _ = self._cells
            lo = min(lo, a[0])
            hi = max(hi, b[-1])
        if not np.isfinite(lo):
            raise DomainError("measure has no mass off the origin")
        return float(lo), float(hi)

    def mean(self):
        m = float(np.sum(self.atom_masses * self.atom_positions))
        return m + K.moment_pl_halfline(*self._cells, k=1)

    def moment(self, k):
        m = float(np.sum(self.atom_masses * self.atom_positions ** k))
        return m + K.moment_pl_halfline(*self._cells, k=k)

    # -- transforms ----------------------------------------------------

    def _domain(self, z):
        z = np.asarray(z, dtype=complex)
        if not np.all(np.isfinite(z)):
            raise DomainError("nonfinite evaluation point")
        on_ray = (np.abs(z.imag) < EDGE_GUARD) & (z.real > -EDGE_GUARD)
        if np.any(on_ray):
            raise DomainError("evaluation point within 1e-12 of [0, infinity)")
        return z

    def _psi_parts(self, z):
        zc = z[..., None] if z.ndim else z.reshape(1)[..., None]
        zs = zc * self.atom_positions
        atom = np.sum(self.atom_masses * zs / (1.0 - zs), axis=-1)
        out = atom + K.psi_pl_halfline(z if z.ndim else z.reshape(1), *self._cells)
        return out if z.ndim else out[0]

    def _dpsi_parts(self, z):
        zc = z[..., None] if z.ndim else z.reshape(1)[..., None]
        zs = zc * self.atom_positions
        atom = np.sum(self.atom_masses * self.atom_positions / (1.0 - zs) ** 2, axis=-1)
        out = atom + K.dpsi_pl_halfline(z if z.ndim else z.reshape(1), *self._cells)
        return out if z.ndim else out[0]

    # -- membership ----------------------------------------------------

    def membership_report(self, rays=5, points_per_ray=24):
        """Sampling check of the half-line class: mu != delta_0, eta(0-) = 0,
        and arg eta(z) in [arg z, pi) on rays in the upper half-plane."""
        reasons = []
        if self.mass_at_zero >= 1.0 - 1e-15:
            return MembershipReport(False, ["excluded point measure (all mass at zero)"], {})
        checks = {}
        xs = -np.logspace(-8, -2, 7)
        eta_neg = self.eta(xs)
        checks["eta_zero_minus"] = float(np.abs(eta_neg[0]))
        if np.abs(eta_neg[0]) > 1e-4:
            reasons.append("eta(0-) does not vanish")
        if np.any(np.abs(eta_neg.imag) > 1e-10):
            reasons.append("eta not real on the negative axis")
        worst = 0.0
        for theta in np.linspace(np.pi / 6, 5 * np.pi / 6, rays):
            r = np.logspace(-3, 3, points_per_ray)
            e = self.eta(r * np.exp(1j * theta))
            defect = theta - np.angle(e)
            worst = max(worst, float(defect.max()))
        checks["worst_arg_defect"] = worst
        if worst > 1e-9:
            reasons.append("arg eta(z) < arg z somewhere in the upper half-plane")
        return MembershipReport(not reasons, reasons, checks)


@dataclasses.dataclass(frozen=True, eq=False)
class CircleMeasure(_Transforms):
    """Probability measure on the unit circle: atoms at angles + density in angle.

    Angles live in (-pi, pi].  The density grid covers at most one full turn
    and closes periodically (a wrap cell joins the last node to the first).
    """

    atom_angles: np.ndarray = ()
    atom_masses: np.ndarray = ()
    grid: np.ndarray | None = None
    values: np.ndarray | None = None
    quadrature_hint: int = 2048

    def __post_init__(self):
        ang = np.asarray(self.atom_angles, dtype=float).ravel()
        ang = np.where(ang <= -np.pi, ang + 2 * np.pi, ang)
        ang = np.where(ang > np.pi, ang - 2 * np.pi, ang)
        ang, mas = _as_sorted_atoms(ang, self.atom_masses, "CircleMeasure")
        object.__setattr__(self, "atom_angles", ang)
        object.__setattr__(self, "atom_masses", mas)
        if (self.grid is None) != (self.values is None):
            raise SchemaError("CircleMeasure: grid and values must come together")
        if self.grid is not None:
            grid, values = _check_density(self.grid, self.values, "CircleMeasure")
            if grid[-1] - grid[0] >= 2 * np.pi:
                raise SchemaError("CircleMeasure: density grid spans more than one turn")
            object.__setattr__(self, "grid", grid)
            object.__setattr__(self, "values", values)
            cells = K.cell_arrays_circular(grid, values)
            nodes = K.circle_nodes(grid, values)
        else:
            cells = K.cell_arrays(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
            nodes = (np.empty(0), np.empty(0))
        object.__setattr__(self, "_cells", cells)
        object.__setattr__(self, "_nodes", nodes)
        total = self.total_mass()
        if abs(total - 1.0) > MASS_TOL:
            raise SchemaError(f"CircleMeasure: total mass {total:.8f} != 1")

    # -- bookkeeping ---------------------------------------------------

    def total_mass(self):
        return float(self.atom_masses.sum() + K.pl_mass(*self._cells))

    @property
    def has_ac(self):
        return self._cells[0].size > 0

    def mean(self):
        m = complex(np.sum(self.atom_masses * np.exp(1j * self.atom_angles)))
        return m + K.mean_pl_circle(*self._cells)

    # -- transforms ----------------------------------------------------

    def _domain(self, z):
        z = np.asarray(z, dtype=complex)
        if not np.all(np.isfinite(z)):
            raise DomainError("nonfinite evaluation point")
        if np.any(np.abs(z) > 1.0 - EDGE_GUARD):
            raise DomainError("evaluation point within 1e-12 of the unit circle")
        return z

    def _psi_parts(self, z):
        zc = z[..., None] if z.ndim else z.reshape(1)[..., None]
        zz = zc * np.exp(1j * self.atom_angles)
        atom = np.sum(self.atom_masses * zz / (1.0 - zz), axis=-1)
        out = atom + K.psi_pl_circle(z if z.ndim else z.reshape(1), *self._nodes)
        return out if z.ndim else out[0]

    def _dpsi_parts(self, z):
        zc = z[..., None] if z.ndim else z.reshape(1)[..., None]
        zeta = np.exp(1j * self.atom_angles)
        atom = np.sum(self.atom_masses * zeta / (1.0 - zc * zeta) ** 2, axis=-1)
        out = atom + K.dpsi_pl_circle(z if z.ndim else z.reshape(1), *self._nodes)
        return out if z.ndim else out[0]

    # -- membership ----------------------------------------------------

    def membership_report(self, radius=1.0 - 1e-3, samples=4096, max_samples=1 << 17):
        """Circle-class check: nonzero mean and eta zero-free on the punctured disc.

        Zeros of eta(z)/z inside |z| < radius are counted by the winding
        number of the sampled boundary image; sampling doubles until the
        winding integral is within 1e-3 of an integer.
        """
        reasons = []
        checks = {}
        m1 = self.mean()
        checks["mean_abs"] = abs(m1)
        if abs(m1) < 1e-9:
            reasons.append("first moment vanishes")
        # numerical derivative of eta at 0 should agree with the mean
        h = 1e-6
        probes = h * np.exp(2j * np.pi * np.arange(4) / 4)
        d_est = np.mean(self.eta(probes) / probes)
        checks["eta_prime0_consistency"] = abs(d_est - m1)
        n = samples
        while True:
            th = 2 * np.pi * np.arange(n) / n
            w = self.eta(radius * np.exp(1j * th))
            w = w / (radius * np.exp(1j * th))
            if np.any(np.abs(w) < 1e-14):
                winding = None
                zero_hit = True
                break
            zero_hit = False
            steps = np.angle(np.roll(w, -1) / w)
            raw = float(steps.sum() / (2 * np.pi))
            if abs(raw - round(raw)) < 1e-3:
                winding = int(round(raw))
                break
            n *= 2
            if n > max_samples:
                raise WindingAmbiguity(
                    f"winding integral {raw:.6f} not close to an integer at {n // 2} samples"
                )
        checks["winding"] = winding
        if zero_hit:
            reasons.append("eta vanishes on the sampling circle")
        elif winding != 0:
            reasons.append(f"eta has {winding} zero(s) in the punctured disc")
        return MembershipReport(not reasons, reasons, checks)


@dataclasses.dataclass(frozen=True)
class MembershipReport:
    member: bool
    reasons: list
    checks: dict

    def __bool__(self):
        return self.member


# ----------------------------------------------------------------------
# recovering measures from boundary values of eta
# ----------------------------------------------------------------------


def invert_stieltjes(eta_fn, xgrid, eps):
    """Smoothed density at `xgrid` of the reciprocal pushforward nu = mu o (1/.).

    `eta_fn` evaluates the eta-transform of mu just above the positive axis.
    The returned samples integrate to 1 - mu({0}) as eps -> 0.  The density
    of mu itself in its original variable is p_mu(y) = p_nu(1/y) / y**2.
    """
    x = np.asarray(xgrid, dtype=float)
    if np.any(x <= 0) or eps <= 0:
        raise DomainError("stieltjes inversion needs x > 0 and eps > 0")
    z = x + 1j * eps
    f = np.imag(z / (1.0 - eta_fn(z))) / np.pi
    return f / (x * x)


def invert_poisson(eta_fn, theta_grid, r):
    """Smoothed circle density at `theta_grid` of the conjugated pushforward.

    `eta_fn` evaluates the eta-transform of mu on the circle of radius r < 1.
    The output is the density of mu o conj (angles negated); it integrates
    to 1.  The density of mu itself at angle beta is the value at -beta.
    """
    th = np.asarray(theta_grid, dtype=float)
    if not 0 < r < 1:
        raise DomainError("poisson inversion needs 0 < r < 1")
    w = eta_fn(r * np.exp(1j * th))
    return (1.0 - np.abs(w) ** 2) / (2 * np.pi * np.abs(1.0 - w) ** 2)


# ----------------------------------------------------------------------
# JSON schema
# ----------------------------------------------------------------------


def measure_from_json(obj):
    """Parse the measure interchange schema into a measure object.

    Schema: {"space": "Rplus" | "T", "atoms": [{"pos": x, "mass": m}, ...],
    "mass_at_zero": m (Rplus only), "ac": {"grid": [...], "values": [...]}}.
    Circle atom positions are angles in radians in (-pi, pi].
    """
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise SchemaError("measure document must be a JSON object")
    space = obj.get("space")
    if space not in ("Rplus", "T"):
        raise SchemaError(f"unknown space {space!r}; expected 'Rplus' or 'T'")
    atoms = obj.get("atoms", [])
    if not isinstance(atoms, list):
        raise SchemaError("'atoms' must be a list")
    try:
        pos = [float(a["pos"]) for a in atoms]
        mas = [float(a["mass"]) for a in atoms]
    except (TypeError, KeyError) as exc:
        raise SchemaError("each atom needs numeric 'pos' and 'mass'") from exc
    ac = obj.get("ac")
    grid = values = None
    if ac is not None:
        if not isinstance(ac, dict) or "grid" not in ac or "values" not in ac:
            raise SchemaError("'ac' must carry 'grid' and 'values' arrays")
        grid = np.asarray(ac["grid"], dtype=float)
        values = np.asarray(ac["values"], dtype=float)
    hint = int(obj.get("quadrature_hint", 2048))
    if space == "Rplus":
        return HalfLineMeasure(
            atom_positions=pos,
            atom_masses=mas,
            mass_at_zero=float(obj.get("mass_at_zero", 0.0)),
            grid=grid,
            values=values,
            quadrature_hint=hint,
        )
    if "mass_at_zero" in obj:
        raise SchemaError("'mass_at_zero' is meaningless for circle measures")
    return CircleMeasure(
        atom_angles=pos, atom_masses=mas, grid=grid, values=values, quadrature_hint=hint
    )


def measure_to_json(mu):
    """Inverse of `measure_from_json`; returns a plain dict."""
    if isinstance(mu, HalfLineMeasure):
        out = {
            "space": "Rplus",
            "atoms": [
                {"pos": float(p), "mass": float(m)}
                for p, m in zip(mu.atom_positions, mu.atom_masses)
            ],
            "mass_at_zero": float(mu.mass_at_zero),
        }
    elif isinstance(mu, CircleMeasure):
        out = {
            "space": "T",
            "atoms": [
                {"pos": float(p), "mass": float(m)}
                for p, m in zip(mu.atom_angles, mu.atom_masses)
            ],
        }
    else:
        raise SchemaError(f"not a measure: {type(mu).__name__}")
    if mu.grid is not None:
        out["ac"] = {"grid": [float(x) for x in mu.grid], "values": [float(v) for v in mu.values]}
    if mu.quadrature_hint != 2048:
        out["quadrature_hint"] = int(mu.quadrature_hint)
    return out
