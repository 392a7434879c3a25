"""Boundary data of the half-line power map.

For t > 1 the multiplicative power is computed by restricting Phi_t(z) =
z exp[(t-1) u(z)] to a region whose boundary detaches from the positive
axis exactly on the set V_t+ = {r : g(r) > 1/(t-1)}, where g is the
quadratic-kernel integral of the representing measure rho.  On V_t+ the
boundary angle A_t(r) solves Im u(r e^{i theta}) = -theta/(t-1), off it
A_t = 0, and h_t(r) = Phi_t(r e^{i A_t(r)}) is an increasing homeomorphism
of (0, infinity) whose image of V_t+ carries the absolutely continuous
part of the power.
"""

from __future__ import annotations

import dataclasses
import io

import numpy as np

from . import _kernels as K
from .errors import BracketError, PhaseError
from .herglotz import log_kappa
from .measures import HalfLineMeasure

SUPPORT_FLOOR = 1e-8
ANGLE_TOL = 1e-10
RESIDUAL_TOL = 1e-8


# ----------------------------------------------------------------------
# the detachment integral g(r)
# ----------------------------------------------------------------------


def _singular_pieces(rep):
    """Closed intervals where g diverges: positive-density cells, exact
    intervals, and rho-atoms."""
    pieces = []
    a, b, va, vb = rep._cells
    if a.size:
        keep = np.maximum(va, vb) > SUPPORT_FLOOR
        lo = None
        for aa, bb, k in zip(a, b, keep):
            if k:
                if lo is None:
                    lo, hi = aa, bb
                elif aa <= hi + 1e-12:
                    hi = bb
                else:
                    pieces.append((lo, hi))
                    lo, hi = aa, bb
            elif lo is not None:
                pieces.append((lo, hi))
                lo = None
        if lo is not None:
            pieces.append((lo, hi))
    pieces.extend(rep.intervals)
    pieces.extend((p, p) for p in rep.atom_positions)
    return pieces


def g_radial(rep, r):
    """g(r) = integral r (s^2+1)/(r-s)^2 drho(s); +inf on supp rho.

    The divergence on the closed support is structural (the kernel is not
    integrable there), so membership is decided geometrically rather than
    by letting the quadrature overflow.
    """
    r = float(r)
    for lo, hi in _singular_pieces(rep):
        if lo - 1e-14 <= r <= hi + 1e-14:
            return np.inf
    g = 0.0
    if rep.atom_positions.size:
        g += float(np.sum(rep.atom_masses * r * (rep.atom_positions ** 2 + 1)
                          / (r - rep.atom_positions) ** 2))
    a, b, va, vb = rep._cells
    if a.size:
        # noise cells under the support floor may still straddle r; their
        # mass is bounded by floor * width, so dropping them is harmless
        inside = (a <= r) & (r <= b)
        if np.any(inside):
            keep = ~inside
            a, b, va, vb = a[keep], b[keep], va[keep], vb[keep]
        g += K.g_pl_halfline(r, a, b, va, vb)
    for lo, hi in rep.intervals:
        if np.isinf(hi):
            g += -r / (r - lo)
        else:
            g += K.g_interval_halfline(r, lo, hi)
    return float(g)


def g_polar(mu, r, theta):
    """g(r, theta) = -Im u(r e^{i theta})/theta, nonincreasing in theta."""
    u = log_kappa(mu, np.asarray(r) * np.exp(1j * np.asarray(theta)))
    return -u.imag / theta


# ----------------------------------------------------------------------
# the boundary angle A_t
# ----------------------------------------------------------------------


def _angles_bisect(mu, t, rs):
    """Vectorized bisection for the boundary angle at each r in rs.

    theta -> g(r, theta) is nonincreasing with limits g(r) > 1/(t-1) at 0
    and 0 at pi, so the crossing is unique.
    """
    thr = 1.0 / (t - 1.0)
    # floor keeps r e^{i theta} clear of the measure's axis guard even when
    # the crossing sits at a detachment-interval endpoint (theta -> 0)
    lo = np.maximum(1e-9, 2e-12 / rs)
    hi = np.full(rs.shape, np.pi - 1e-9)
    g_hi = g_polar(mu, rs, hi)
    if np.any(g_hi > thr):
        raise BracketError("g(r, theta) still above threshold at theta near pi")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        above = g_polar(mu, rs, mid) > thr
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    ang = 0.5 * (lo + hi)
    resid = np.abs(log_kappa(mu, rs * np.exp(1j * ang)).imag + ang / (t - 1.0))
    if np.any(resid > RESIDUAL_TOL):
        raise BracketError(
            f"angle equation residual {resid.max():.2e} exceeds {RESIDUAL_TOL}"
        )
    return ang


def angle_a_t(mu, rep, t, r):
    """Boundary angle A_t(r): zero off V_t+, otherwise the root of
    Im u(r e^{i theta}) = -theta/(t-1)."""
    if t <= 1:
        raise ValueError("power index must exceed 1")
    if g_radial(rep, r) <= 1.0 / (t - 1.0):
        return 0.0
    return float(_angles_bisect(mu, t, np.array([float(r)]))[0])


# ----------------------------------------------------------------------
# the detachment set V_t+
# ----------------------------------------------------------------------


def _default_grid_from_rep(rep):
    pieces = rep.support_pieces()
    if not pieces:
        return None
    lo = min(p[0] for p in pieces)
    finite = [p[1] for p in pieces if np.isfinite(p[1])] + [p[0] for p in pieces]
    hi = max(finite)
    return np.geomspace(lo / 10.0, max(hi, lo) * 10.0, 1024)


def vt_plus_r(rep, t, r_grid=None, g_values=None):
    """Connected components of {g > 1/(t-1)}, endpoints refined by bisection.

    Passing precomputed g_values (matching r_grid) skips the evaluation
    sweep and the outward grid expansion; the caller then owns making the
    grid wide enough.
    """
    if t <= 1:
        raise ValueError("power index must exceed 1")
    thr = 1.0 / (t - 1.0)
    if r_grid is None:
        r_grid = _default_grid_from_rep(rep)
        if r_grid is None:
            return []
    grid = np.asarray(r_grid, dtype=float)

    if g_values is not None:
        g = np.asarray(g_values, dtype=float)
    else:
        # the set is bounded: extend the grid until g is safely small outside
        g = np.array([g_radial(rep, r) for r in grid])
        for _ in range(40):
            if g[0] <= 0.5 * thr or grid[0] < 1e-12:
                break
            grid = np.concatenate([[grid[0] / 2.0], grid])
            g = np.concatenate([[g_radial(rep, grid[0])], g])
        for _ in range(40):
            if g[-1] <= 0.5 * thr or grid[-1] > 1e15:
                break
            grid = np.concatenate([grid, [grid[-1] * 2.0]])
            g = np.concatenate([g, [g_radial(rep, grid[-1])]])

    inside = g > thr
    if not np.any(inside):
        return []
    intervals = []
    idx = np.flatnonzero(inside)
    runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
    for run in runs:
        i0, i1 = run[0], run[-1]
        if i0 == 0:
            lo = grid[0]
        else:
            lo = _refine_crossing(rep, thr, grid[i0 - 1], grid[i0])
        if i1 == grid.size - 1:
            # expansion gave up: an unbounded interval in rho keeps g = inf
            hi = np.inf if np.isinf(g[-1]) else grid[-1]
        else:
            hi = _refine_crossing(rep, thr, grid[i1 + 1], grid[i1])
        intervals.append((lo, hi))
    return intervals


def _refine_crossing(rep, thr, outside, inside):
    for _ in range(60):
        mid = 0.5 * (outside + inside)
        if g_radial(rep, mid) > thr:
            inside = mid
        else:
            outside = mid
    return 0.5 * (outside + inside)


# ----------------------------------------------------------------------
# the boundary map h_t
# ----------------------------------------------------------------------


def _u_real_off_axis_set(mu, r):
    """u(r) for real r > 0 off the closed support of rho (kappa > 0 there).

    kappa = z (1 + psi)/psi is written as z + z/psi so that poles of psi
    (the reciprocals of atom positions, which can be detachment-set
    endpoints) evaluate to the correct limit kappa = z.
    """
    z = np.asarray(r, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        psi = mu._psi_parts(z)
        kappa = (z + z / psi).real
    kappa = np.where(np.isinf(psi.real), z.real, kappa)
    if not np.all(kappa > 0):
        raise PhaseError("kappa not positive on the axis; point is not off V_t+")
    return np.log(kappa)


def h_t_r(mu, rep, t, r):
    """h_t(r) = Phi_t(r e^{i A_t(r)}), the increasing boundary map."""
    ang = angle_a_t(mu, rep, t, r)
    if ang == 0.0:
        return float(r * np.exp((t - 1.0) * _u_real_off_axis_set(mu, np.array([r]))[0]))
    z = r * np.exp(1j * ang)
    phi = z * np.exp((t - 1.0) * log_kappa(mu, np.array([z]))[0])
    if abs(phi.imag) > RESIDUAL_TOL * abs(phi):
        raise PhaseError(f"boundary image not real: {phi}")
    return float(phi.real)


# ----------------------------------------------------------------------
# assembled curve
# ----------------------------------------------------------------------


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryCurveR:
    t: float
    r_grid: np.ndarray
    angles: np.ndarray
    g_values: np.ndarray
    h_values: np.ndarray
    vt_plus: tuple

    def in_set(self):
        return self.angles > 0

    def to_csv(self):
        buf = io.StringIO()
        buf.write("r,angle,g,h,in_vt_plus\n")
        for r, a, g, h in zip(self.r_grid, self.angles, self.g_values, self.h_values):
            gtxt = "inf" if np.isinf(g) else f"{g:.17g}"
            buf.write(f"{r:.17g},{a:.17g},{gtxt},{h:.17g},{int(a > 0)}\n")
        return buf.getvalue()


def build_curve_r(mu, rep, t, r_grid=None, n_grid=1024):
    """Sample angles, g, and the boundary map over a log-spaced r grid."""
    if t <= 1:
        raise ValueError("power index must exceed 1")
    if r_grid is None:
        lo, hi = mu.support_hull()
        r_grid = np.geomspace(lo / 10.0, hi * 10.0, n_grid)
    grid = np.asarray(r_grid, dtype=float)
    thr = 1.0 / (t - 1.0)

    g = np.array([g_radial(rep, r) for r in grid])
    vt = vt_plus_r(rep, t, r_grid=grid)

    angles = np.zeros(grid.size)
    inside = g > thr
    if np.any(inside):
        angles[inside] = _angles_bisect(mu, t, grid[inside])

    h = np.empty(grid.size)
    if np.any(~inside):
        h[~inside] = grid[~inside] * np.exp(
            (t - 1.0) * _u_real_off_axis_set(mu, grid[~inside])
        )
    if np.any(inside):
        z = grid[inside] * np.exp(1j * angles[inside])
        phi = z * np.exp((t - 1.0) * log_kappa(mu, z))
        bad = np.abs(phi.imag) > RESIDUAL_TOL * np.abs(phi)
        if np.any(bad):
            raise PhaseError(
                f"boundary image not real at {np.count_nonzero(bad)} nodes"
            )
        h[inside] = phi.real
    return BoundaryCurveR(
        t=float(t), r_grid=grid, angles=angles, g_values=g, h_values=h,
        vt_plus=tuple(vt),
    )
