"""Integral representations of log kappa.

On the half-line, log kappa is a Nevanlinna function that is real on
(-infinity, 0), which forces the form

    a + integral (1 + z s)/(z - s) drho(s),    rho >= 0 finite on [0, infinity)

(no linear term).  On the circle it is a Herglotz function of the disc,

    i alpha + integral (zeta + z)/(zeta - z) drho(zeta),    rho >= 0 on the circle,

with rho(circle) = -log|eta'(0)| and alpha = -arg eta'(0).  Everything
downstream (detachment sets, boundary curves, densities of convolution
powers) is computed from (a, rho) or (alpha, rho), so this module is the
heart of the pipeline: it extracts rho from boundary values of log kappa,
provides an exact closed form for purely atomic half-line measures, and
evaluates the representation back.
"""

from __future__ import annotations

import dataclasses
import warnings

import numpy as np
from scipy.optimize import brentq, nnls

from . import _kernels as K
from .errors import (
    BranchError,
    DomainError,
    ExtrapolationError,
    RootIsolationError,
)
from .measures import CircleMeasure, HalfLineMeasure

TWO_PI = 2.0 * np.pi


def unwind(values, reference):
    """Shift Im(values) by multiples of 2 pi to land nearest Im(reference)."""
    k = np.round((np.imag(reference) - np.imag(values)) / TWO_PI)
    return values + 2j * np.pi * k


# ----------------------------------------------------------------------
# branch-tracked log kappa
# ----------------------------------------------------------------------


def log_kappa(mu, z):
    """Continuous branch of log kappa_mu at z (scalar or array).

    Half-line: the principal log is already the right branch on the slit
    plane, because arg kappa stays in (-pi, 0) on the upper half-plane,
    in (0, pi) below, and kappa > 0 on (-infinity, 0).

    Circle: the branch is pinned at z = 0 by log kappa(0) = -Log eta'(0)
    (principal) and continued radially outward, unwinding phase jumps.
    """
    if isinstance(mu, HalfLineMeasure):
        return np.log(mu.kappa(z))
    return _log_kappa_disc(mu, z)


def _log_kappa_at_zero(mu):
    m1 = mu.mean()
    if abs(m1) < 1e-12:
        raise DomainError("mean vanishes; kappa(0) undefined")
    return -np.log(complex(m1))


def _log_kappa_disc(mu, z, ladder_ratio=1.25, r_base=1e-2):
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    out = np.empty(zf.size, dtype=complex)
    u0 = _log_kappa_at_zero(mu)
    zero = zf == 0
    out[zero] = u0
    tiny = (np.abs(zf) < r_base) & ~zero
    if np.any(tiny):
        # near the origin kappa is within a factor (1 + O(r)) of kappa(0),
        # so the principal log unwound against u(0) is the right branch
        w = np.log(mu.kappa(zf[tiny]))
        out[tiny] = unwind(w, u0)
    rest = ~tiny & ~zero
    if np.any(rest):
        out[rest] = _radial_ladder(mu, zf[rest], u0, ladder_ratio, r_base)
    return out.reshape(shape)


def _radial_ladder(mu, z, u0, ratio, r_base, _retry=True):
    rmax = float(np.max(np.abs(z)))
    nsteps = max(8, int(np.ceil(np.log(rmax / r_base) / np.log(ratio))))
    s = np.arange(nsteps + 1) / nsteps
    radii = r_base ** (1 - s[:, None]) * np.abs(z)[None, :] ** s[:, None]
    pts = radii * np.exp(1j * np.angle(z))[None, :]
    w = np.log(mu.kappa(pts))
    u_prev = unwind(w[0], u0)
    worst = 0.0
    for k in range(1, nsteps + 1):
        u_k = unwind(w[k], u_prev)
        worst = max(worst, float(np.max(np.abs(np.imag(u_k - u_prev)))))
        u_prev = u_k
    if worst > np.pi / 2:
        if _retry:
            return _radial_ladder(mu, z, u0, ratio ** (1 / 3), r_base, _retry=False)
        raise BranchError(f"phase step {worst:.3f} > pi/2 on the radial ladder")
    return u_prev


def log_kappa_circle_grid(mu, r, theta_grid):
    """log kappa on the full circle of radius r, branch-continuous in theta.

    The grid must be fine enough that Im log kappa moves less than pi
    between neighbors; the global branch is anchored by a radial
    continuation at theta_grid[0].
    """
    th = np.asarray(theta_grid, dtype=float)
    w = np.log(mu.kappa(r * np.exp(1j * th)))
    im = np.unwrap(w.imag)
    anchor = _log_kappa_disc(mu, r * np.exp(1j * th[0]))
    offset = TWO_PI * np.round((anchor.imag - im[0]) / TWO_PI)
    im = im + offset
    if abs(im[0] - anchor.imag) > np.pi / 2:
        raise BranchError("angular unwrapping disagrees with radial continuation")
    return w.real + 1j * im


# ----------------------------------------------------------------------
# representation containers
# ----------------------------------------------------------------------


@dataclasses.dataclass(frozen=True, eq=False)
class NevanlinnaRep:
    """(a, rho) with u(z) = a + integral (1+zs)/(z-s) drho(s).

    rho is carried in three parts: point masses, a piecewise-linear density,
    and exact intervals on which the density is 1/(1+x^2) (the boundary
    value produced by purely atomic measures; hi may be inf).
    """

    a: float
    atom_positions: np.ndarray = ()
    atom_masses: np.ndarray = ()
    grid: np.ndarray | None = None
    values: np.ndarray | None = None
    intervals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atom_positions", np.asarray(self.atom_positions, float).ravel())
        object.__setattr__(self, "atom_masses", np.asarray(self.atom_masses, float).ravel())
        if self.grid is not None:
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            object.__setattr__(self, "grid", g)
            object.__setattr__(self, "values", v)
            cells = K.cell_arrays(g, v)
        else:
            cells = K.cell_arrays(np.array([1.0, 2.0]), np.array([0.0, 0.0]))
        object.__setattr__(self, "_cells", cells)

    def total_mass(self):
        m = float(self.atom_masses.sum()) + K.pl_mass(*self._cells)
        for lo, hi in self.intervals:
            top = np.pi / 2 if np.isinf(hi) else np.arctan(hi)
            m += top - np.arctan(lo)
        return m

    def eval(self, z):
        """u(z) for z off the closed support of rho."""
        z = np.asarray(z, dtype=complex)
        zc = z[..., None] if z.ndim else z.reshape(1)[..., None]
        atom = np.sum(self.atom_masses * (1.0 + zc * self.atom_positions)
                      / (zc - self.atom_positions), axis=-1)
        out = self.a + atom + K.nev_pl(z if z.ndim else z.reshape(1), *self._cells)
        for lo, hi in self.intervals:
            if np.isinf(hi):
                out = out + K.nev_interval_unbounded(z if z.ndim else z.reshape(1), lo)
            else:
                out = out + K.nev_interval(z if z.ndim else z.reshape(1), lo, hi)
        return out if z.ndim else out[0]

    def detachment_integral(self, r):
        """g(r) = integral r (s^2+1)/(r-s)^2 drho(s), scalar r off supp rho."""
        g = 0.0
        if self.atom_positions.size:
            g += float(np.sum(self.atom_masses * r * (self.atom_positions ** 2 + 1)
                              / (r - self.atom_positions) ** 2))
        g += K.g_pl_halfline(r, *self._cells)
        for lo, hi in self.intervals:
            if np.isinf(hi):
                # limit of r(hi-lo)/((r-lo)(r-hi)) as hi -> inf
                g += -r / (r - lo)
            else:
                g += K.g_interval_halfline(r, lo, hi)
        return float(g)

    def support_pieces(self):
        """Sorted closed intervals carrying rho (atoms widen to points)."""
        pieces = []
        if self.grid is not None:
            a, b, _, _ = self._cells
            if a.size:
                # merge contiguous cells
                lo = a[0]
                hi = b[0]
                for aa, bb in zip(a[1:], b[1:]):
                    if aa <= hi + 1e-12:
                        hi = bb
                    else:
                        pieces.append((lo, hi))
                        lo, hi = aa, bb
                pieces.append((lo, hi))
        pieces.extend((lo, hi) for lo, hi in self.intervals)
        pieces.extend((p, p) for p in self.atom_positions)
        return sorted(pieces)

    def to_json_obj(self, interval_nodes=128):
        """Export as {"a": ..., "rho": {...}}; exact intervals are rasterized."""
        grid, values = self.grid, self.values
        if self.intervals:
            chunks = [] if grid is None else [(np.asarray(grid), np.asarray(values))]
            for lo, hi in self.intervals:
                top = hi if np.isfinite(hi) else max(1e10, 100.0 / lo)
                g = np.geomspace(lo, top, interval_nodes)
                chunks.append((g, 1.0 / (1.0 + g * g)))
            chunks.sort(key=lambda c: c[0][0])
            grid = np.concatenate([c[0] for c in chunks])
            values = np.concatenate([c[1] for c in chunks])
        out = {
            "a": float(self.a),
            "rho": {
                "atoms": [
                    {"pos": float(p), "mass": float(m)}
                    for p, m in zip(self.atom_positions, self.atom_masses)
                ],
                "grid": [] if grid is None else [float(x) for x in grid],
                "values": [] if values is None else [float(v) for v in values],
            },
        }
        return out


@dataclasses.dataclass(frozen=True, eq=False)
class HerglotzRep:
    """(alpha, rho) with u(z) = i alpha + integral (zeta+z)/(zeta-z) drho(zeta).

    total_mass is the exact rho(circle) = -log|eta'(0)| = Re u(0);
    mass_deficit = total_mass - (grid + atom) mass is the unaccounted
    singular part, reported as a diagnostic.
    """

    alpha: float
    atom_angles: np.ndarray = ()
    atom_masses: np.ndarray = ()
    grid: np.ndarray | None = None
    values: np.ndarray | None = None
    total_mass: float = 0.0
    mass_deficit: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "atom_angles", np.asarray(self.atom_angles, float).ravel())
        object.__setattr__(self, "atom_masses", np.asarray(self.atom_masses, float).ravel())
        if self.grid is not None:
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            object.__setattr__(self, "grid", g)
            object.__setattr__(self, "values", v)
            cells = K.cell_arrays_circular(g, v)
            nodes = K.circle_nodes(g, v)
        else:
            cells = K.cell_arrays(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
            nodes = (np.empty(0), np.empty(0))
        object.__setattr__(self, "_cells", cells)
        object.__setattr__(self, "_nodes", nodes)
        object.__setattr__(self, "_pl_mass", K.pl_mass(*self._cells))

    def eval(self, z):
        """u(z) on the open disc."""
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > 1 - 1e-12):
            raise DomainError("representation evaluated too close to the circle")
        zc = z[..., None] if z.ndim else z.reshape(1)[..., None]
        zeta = np.exp(1j * self.atom_angles)
        atom = np.sum(self.atom_masses * (zeta + zc) / (zeta - zc), axis=-1)
        pl = self._pl_mass + K.herg_pl(z if z.ndim else z.reshape(1), *self._nodes)
        out = 1j * self.alpha + atom + pl
        return out if z.ndim else out[0]

    def eval_with_prime(self, z):
        """(u(z), u'(z)) sharing the expensive node products."""
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > 1 - 1e-12):
            raise DomainError("representation evaluated too close to the circle")
        zf = z if z.ndim else z.reshape(1)
        zc = zf[..., None]
        zeta = np.exp(1j * self.atom_angles)
        atom = np.sum(self.atom_masses * (zeta + zc) / (zeta - zc), axis=-1)
        datom = np.sum(self.atom_masses * 2.0 * zeta / (zeta - zc) ** 2, axis=-1)
        pl, dpl = K.herg_pl_both(zf, *self._nodes)
        u = 1j * self.alpha + atom + self._pl_mass + pl
        du = datom + dpl
        if not z.ndim:
            return u[0], du[0]
        return u, du

    def grid_mass(self):
        return float(self.atom_masses.sum()) + self._pl_mass

    def to_json_obj(self):
        return {
            "alpha": float(self.alpha),
            "rho": {
                "atoms": [
                    {"pos": float(p), "mass": float(m)}
                    for p, m in zip(self.atom_angles, self.atom_masses)
                ],
                "grid": [] if self.grid is None else [float(x) for x in self.grid],
                "values": [] if self.values is None else [float(v) for v in self.values],
            },
        }


def eval_u_from_rep(rep, z):
    return rep.eval(z)


# ----------------------------------------------------------------------
# extraction from boundary values
# ----------------------------------------------------------------------


def _richardson_pair(f1, f2, e1, e2):
    return (f2 * e1 - f1 * e2) / (e1 - e2)


def extract_rep_r(mu, grid=None, eps_sequence=(1e-2, 1e-3, 1e-4), defect_iters=2):
    """Recover (a, rho) from Im log kappa just above the positive axis.

    The density of rho at x is -(1/pi) Im u(x + i eps) / (1 + x^2) in the
    eps -> 0 limit; the sequence is extrapolated pairwise (first order).
    Points where eps * |Im u| stays above 1e-3 across the whole schedule
    are split off as rho-atoms.

    The extrapolated estimate is then polished by defect correction: the
    candidate density's own boundary values are evaluated at a height
    matched to the local grid spacing and the discrepancy fed back, which
    cancels the smearing bias near density jumps to higher order.
    """
    if len(eps_sequence) < 3:
        raise ValueError("need at least three eps values")
    if grid is None:
        grid = np.geomspace(1e-3, 1e3, 2048)
    grid = np.asarray(grid, dtype=float)
    ims = []
    for eps in eps_sequence:
        u = log_kappa(mu, grid + 1j * eps)
        ims.append(u.imag)
    ims = np.asarray(ims)
    dens = -ims / (np.pi * (1.0 + grid * grid))

    # contraction of the raw estimates guards the extrapolation
    d_prev = np.max(np.abs(dens[1] - dens[0]))
    d_last = np.max(np.abs(dens[2] - dens[1]))
    if d_last > 1e-12 and d_last > d_prev:
        raise ExtrapolationError(
            f"boundary estimates not contracting: {d_prev:.3e} -> {d_last:.3e}"
        )

    e = np.asarray(eps_sequence, dtype=float)
    rich = _richardson_pair(dens[1], dens[2], e[1], e[2])

    flagged = np.ones(grid.size, dtype=bool)
    for eps, im in zip(eps_sequence, ims):
        flagged &= eps * np.abs(im) > 1e-3
    atom_pos = []
    atom_mass = []
    if np.any(flagged):
        idx = np.flatnonzero(flagged)
        splits = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
        fine = eps_sequence[-1]
        for run in splits:
            j = run[np.argmax(np.abs(ims[-1][run]))]
            x0 = grid[j]
            atom_pos.append(x0)
            atom_mass.append(fine * abs(ims[-1][j]) / (1.0 + x0 * x0))
            rich[run] = 0.0

    low = rich < -1e-9
    if np.any(low):
        warnings.warn(
            f"extracted density dipped to {rich.min():.2e}; clipping to 0", stacklevel=2
        )
    rich = np.maximum(rich, 0.0)

    # defect sweeps re-sharpen the smeared jumps enough for the steep-cell
    # detector; the final collocation solve then pins the density exactly
    # at one probe per node
    rich = _defect_polish(mu, grid, rich, atom_pos, atom_mass, defect_iters)
    for _ in range(4):
        grid, rich, grew = _refine_steep_cells(grid, rich)
        if not grew:
            break
        rich = _defect_polish(mu, grid, rich, atom_pos, atom_mass, defect_iters)
    rich = _collocation_solve(mu, grid, rich, atom_pos, atom_mass)

    probe = np.array([-1.0 + 0j])
    base = NevanlinnaRep(0.0, atom_pos, atom_mass, grid, rich)
    a = float((log_kappa(mu, probe)[0] - base.eval(probe)[0]).real)
    return NevanlinnaRep(a, atom_pos, atom_mass, grid, rich)


def _boundary_probes(grid):
    # kernel evaluations are closed-form at any height, so each probe can
    # sit at the scale of its own cell and still be exact
    width = np.empty_like(grid)
    width[1:-1] = 0.5 * (grid[2:] - grid[:-2])
    width[0] = grid[1] - grid[0]
    width[-1] = grid[-1] - grid[-2]
    return grid + 1j * width


def _boundary_target(mu, probes, atom_pos, atom_mass):
    target = log_kappa(mu, probes).imag
    if len(atom_pos):
        za = probes[:, None]
        pa = np.asarray(atom_pos)
        ma = np.asarray(atom_mass)
        target = target - np.sum(ma * ((1.0 + za * pa) / (za - pa)).imag, axis=-1)
    return target


def _defect_polish(mu, grid, values, atom_pos, atom_mass, iters):
    probes = _boundary_probes(grid)
    target = _boundary_target(mu, probes, atom_pos, atom_mass)
    out = values
    for _ in range(iters):
        cells = K.cell_arrays(grid, out)
        model = K.nev_pl(probes, *cells).imag
        out = np.maximum(out - (target - model) / (np.pi * (1.0 + grid * grid)), 0.0)
    return out


def _collocation_solve(mu, grid, values, atom_pos, atom_mass):
    """Pin the node values near steep cells by a local linear solve.

    The boundary data is linear in the density, so solving the collocation
    system replaces the slowly-converging tail of the defect iteration.
    The solve is restricted to a window around steep cells: the full system
    is ill-posed (far-field hat columns are nearly collinear), while inside
    the window each probe sits at the scale of its own cell.
    """
    dv = np.abs(np.diff(values))
    span = values.max() - values.min()
    if span < 1e-10:
        return values
    idx = np.flatnonzero(dv > 0.04 * span)
    if idx.size == 0:
        return _defect_polish(mu, grid, values, atom_pos, atom_mass, 2)
    window = np.zeros(grid.size, dtype=bool)
    for i in idx:
        window[max(0, i - 3) : i + 5] = True
    w = np.flatnonzero(window)

    probes = _boundary_probes(grid)
    target = _boundary_target(mu, probes, atom_pos, atom_mass)
    mat = K.nev_hat_matrix(probes[w], grid)
    rhs = target[w] - mat[:, ~window] @ values[~window]
    sol, _ = nnls(mat[:, window], rhs)
    out = values.copy()
    out[w] = sol
    return _defect_polish(mu, grid, out, atom_pos, atom_mass, 2)


def _refine_steep_cells(grid, values, rel_jump=0.04, min_rel_width=1e-5, split=8):
    """Insert nodes in cells where the density moves a large fraction of its
    range, until the cell is narrow relative to its location."""
    dv = np.abs(np.diff(values))
    span = values.max() - values.min()
    if span < 1e-10:
        return grid, values, False
    mid = 0.5 * (grid[:-1] + grid[1:])
    steep = (dv > rel_jump * span) & (np.diff(grid) > min_rel_width * mid)
    if not np.any(steep):
        return grid, values, False
    pieces = [grid[:1]]
    for i in np.flatnonzero(steep):
        pieces.append(np.geomspace(grid[i], grid[i + 1], split + 1)[1:-1])
    new = np.unique(np.concatenate(pieces + [grid]))
    return new, np.interp(new, grid, values), True


def extract_rep_t(mu, theta_grid=None, delta_sequence=(1e-2, 1e-3, 1e-4)):
    """Recover (alpha, rho) from Re log kappa on circles of radius 1 - delta.

    rho's density at angle theta is (1/2 pi) Re u(r e^{i theta}) as r -> 1.
    alpha = Im u(0) and the exact total mass Re u(0) come from the value at
    the origin (the mean-value property makes them radius-independent), so
    the difference between Re u(0) and the recovered grid mass diagnoses
    singular parts of rho.
    """
    if theta_grid is None:
        theta_grid = np.linspace(-np.pi, np.pi, 2048, endpoint=False)
    th = np.asarray(theta_grid, dtype=float)
    res = []
    for delta in delta_sequence:
        u = log_kappa_circle_grid(mu, 1.0 - delta, th)
        res.append(u.real / TWO_PI)
    res = np.asarray(res)

    d_prev = np.max(np.abs(res[1] - res[0]))
    d_last = np.max(np.abs(res[2] - res[1]))
    scale = max(np.max(np.abs(res[2])), 1e-12)
    if d_last > max(d_prev, 1e-9 * scale):
        raise ExtrapolationError(
            f"boundary estimates not contracting: {d_prev:.3e} -> {d_last:.3e}"
        )

    e = np.asarray(delta_sequence, dtype=float)
    rich = _richardson_pair(res[1], res[2], e[1], e[2])

    # Poisson kernel against a rho-atom grows like 2/delta at the atom
    flagged = np.ones(th.size, dtype=bool)
    for delta, re in zip(delta_sequence, res):
        flagged &= delta * np.abs(re * TWO_PI) > 1e-3
    atom_ang = []
    atom_mass = []
    if np.any(flagged):
        idx = np.flatnonzero(flagged)
        splits = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
        fine = delta_sequence[-1]
        for run in splits:
            j = run[np.argmax(res[-1][run])]
            atom_ang.append(th[j])
            atom_mass.append(fine * res[-1][j] * TWO_PI / 2.0)
            rich[run] = 0.0

    if np.any(rich < -1e-9):
        warnings.warn(
            f"extracted density dipped to {rich.min():.2e}; clipping to 0", stacklevel=2
        )
    rich = np.maximum(rich, 0.0)

    u0 = _log_kappa_at_zero(mu)
    alpha = float(u0.imag)
    total = float(u0.real)
    width = np.diff(np.append(th, th[0] + TWO_PI))
    grid_mass = float(np.sum(atom_mass)) + float(np.sum(rich * width))
    return HerglotzRep(
        alpha, atom_ang, atom_mass, th, rich,
        total_mass=total, mass_deficit=total - grid_mass,
    )


# ----------------------------------------------------------------------
# exact representation for purely atomic half-line measures
# ----------------------------------------------------------------------


def _psi_atomic_real(mu, x):
    xs = x * mu.atom_positions
    return float(np.sum(mu.atom_masses * xs / (1.0 - xs)))


def closed_form_rho_atomic_r(mu):
    """Exact (a, rho) when mu is purely atomic on (0, infinity).

    kappa is then a rational function that is real on the axis; rho has
    density exactly 1/(1+x^2) on the intervals where kappa < 0 (where psi
    runs through (-1, 0)) and vanishes elsewhere.  Those intervals sit
    strictly between consecutive reciprocals of atom positions, and a
    final unbounded one appears when there is mass at zero.
    """
    if mu.has_ac:
        raise DomainError("closed form requires a purely atomic measure")
    if mu.atom_positions.size == 0:
        raise DomainError("measure carries no atoms off the origin")
    poles = np.sort(1.0 / mu.atom_positions)
    guard = 1e-11
    intervals = []
    for qa, qb in zip(poles[:-1], poles[1:]):
        lo_bracket = (qa * (1 + guard) + 1e-300, qb * (1 - guard))
        f_lo = lambda x: _psi_atomic_real(mu, x) + 1.0
        f_hi = lambda x: _psi_atomic_real(mu, x)
        if f_lo(lo_bracket[0]) >= 0 or f_lo(lo_bracket[1]) <= 0:
            raise RootIsolationError("psi = -1 not bracketed between poles")
        left = brentq(f_lo, *lo_bracket, xtol=1e-15, rtol=8.9e-16)
        if f_hi(left) >= 0 or f_hi(lo_bracket[1]) <= 0:
            raise RootIsolationError("psi = 0 not bracketed between poles")
        right = brentq(f_hi, left, lo_bracket[1], xtol=1e-15, rtol=8.9e-16)
        intervals.append((left, right))
    if mu.mass_at_zero > 0:
        # psi increases from -inf to -(1 - mass_at_zero) past the last pole
        lo = poles[-1] * (1 + guard)
        hi = poles[-1] * 1e8
        f = lambda x: _psi_atomic_real(mu, x) + 1.0
        if f(lo) >= 0 or f(hi) <= 0:
            raise RootIsolationError("psi = -1 not bracketed on the tail")
        left = brentq(f, lo, hi, xtol=1e-15, rtol=8.9e-16)
        intervals.append((left, np.inf))
    base = NevanlinnaRep(0.0, intervals=tuple(intervals))
    probe = np.array([-1.0 + 0j])
    a = float((log_kappa(mu, probe)[0] - base.eval(probe)[0]).real)
    return NevanlinnaRep(a, intervals=tuple(intervals))
