"""Boundary data of the circle power map.

The circle analogue replaces the detachment angle by a detachment radius:
for t > 1 the region Omega_t is star-shaped around the origin and its
boundary in direction theta sits at R_t(theta), the radius where the
increasing kernel integral r -> integral T(r, theta - phi) drho(phi)
crosses 1/(t-1).  Off the detachment set the radius is 1.  The boundary
map h_t(theta) = Phi_t(R_t(theta) e^{i theta}) is unimodular and winds
once around the circle.

The kernel integral never needs its own quadrature: with lam = log(1/r),

    integral T(r, theta - phi) drho(phi) = Re u(r e^{i theta}) / lam,

so root-finding in r runs on the single-valued harmonic function Re u.
"""

from __future__ import annotations

import dataclasses
import functools
import io

import numpy as np

from . import _kernels as K
from .errors import BracketError, ModulusError
from .herglotz import HerglotzRep

DENSITY_FLOOR = 1e-10
RESIDUAL_TOL = 1e-8
FIT_REL_TOL = 0.1
EDGE_RADIUS = 1.0 - 1e-9


def t_kernel(r, theta):
    """T(r, theta) = (r^2 - 1)/log r * 1/(1 - 2 r cos theta + r^2).

    Strictly increasing in r on (0, 1] for every theta != 0; the r = 1
    limit is 1/(1 - cos theta) and the r -> 0 limit vanishes.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    r, theta = np.broadcast_arrays(r, theta)
    at_one = np.abs(r - 1.0) < 1e-14
    # stable form of 1 - 2 r cos(theta) + r^2, exact near r = 1
    denom = (1.0 - r) ** 2 + 4.0 * r * np.sin(0.5 * theta) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(at_one, 2.0, (r ** 2 - 1.0) / np.log(np.where(at_one, 0.5, r)))
        out = out / denom
    out = np.where(r == 0.0, 0.0, out)
    if out.ndim == 0:
        return float(out)
    return out


def _wrap(x):
    return np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi


@functools.lru_cache(maxsize=1)
def _gauss64():
    return np.polynomial.legendre.leggauss(64)


def _singular_model_integral(lo, hi):
    """integral of x^2/(1 - cos x) over [lo, hi]; the integrand is analytic."""
    x0, w0 = _gauss64()
    x = 0.5 * (hi - lo) * x0 + 0.5 * (hi + lo)
    f = np.where(np.abs(x) < 1e-8, 2.0 + x ** 2 / 6.0, x ** 2 / (1.0 - np.cos(x)))
    return 0.5 * (hi - lo) * float(np.sum(w0 * f))


def g_circle(rep, theta):
    """g(theta) = integral drho(phi)/(1 - cos(theta - phi)), possibly +inf.

    Finiteness requires rho to vanish at least quadratically at theta: the
    density on a small window around theta is fitted by c (phi - theta)^2
    and declared non-integrable when the fit leaves a relative residual
    above 10 percent or an atom sits in the window.  The window integral
    uses the fitted model; cells outside it integrate in closed form.
    """
    theta = float(_wrap(theta))
    a, b, va, vb = rep._cells

    if rep.atom_angles.size:
        dist = np.abs(_wrap(rep.atom_angles - theta))
    else:
        dist = np.array([])

    if a.size:
        width = np.median(b - a)
        w_core = max(1e-3, 3.5 * width)
    else:
        w_core = 1e-3

    if dist.size and np.any(dist <= w_core):
        return np.inf

    g = 0.0
    if dist.size:
        g += float(np.sum(rep.atom_masses / (1.0 - np.cos(dist))))

    if not a.size:
        return g

    # split cells into the core window around theta and the exact remainder
    mid = _wrap(0.5 * (a + b) - theta)
    half = 0.5 * (b - a)
    core = np.abs(mid) <= w_core + half
    if np.any(core):
        order = np.argsort(_wrap(a[core] - theta))
        ca, cb = a[core][order], b[core][order]
        cva, cvb = va[core][order], vb[core][order]
        xs = np.append(_wrap(ca - theta), _wrap(cb[-1] - theta))
        fs = np.append(cva, cvb[-1])
        fmax = float(fs.max())
        if fmax > DENSITY_FLOOR:
            s4 = float(np.sum(xs ** 4))
            c = float(np.sum(fs * xs ** 2)) / s4 if s4 > 0 else 0.0
            resid = fs - c * xs ** 2
            if c < -DENSITY_FLOOR or np.max(np.abs(resid)) > FIT_REL_TOL * fmax:
                return np.inf
            g += c * _singular_model_integral(xs[0], xs[-1])
            with np.errstate(divide="ignore", invalid="ignore"):
                rint = np.where(np.abs(xs) < 1e-12, 0.0, resid / (1.0 - np.cos(xs)))
            g += float(np.trapezoid(rint, xs))
    if np.any(~core):
        g += float(K.g_pl_circle(theta, a[~core], b[~core], va[~core], vb[~core]))
    return g


# ----------------------------------------------------------------------
# the detachment radius R_t
# ----------------------------------------------------------------------


def _root_residual(rep, thr, lam, theta):
    """F(lam) = Re u(e^{-lam} e^{i theta}) - thr * lam, decreasing in lam."""
    z = np.exp(-lam) * np.exp(1j * np.asarray(theta))
    return rep.eval(z).real - thr * lam


def radius_r_t(rep, t, theta):
    """Detachment radius: 1 off the set, else the root of the kernel
    integral crossing 1/(t-1)."""
    if t <= 1:
        raise ValueError("power index must exceed 1")
    thr = 1.0 / (t - 1.0)
    if g_circle(rep, theta) <= thr:
        return 1.0
    lam_lo = -np.log(EDGE_RADIUS)
    lam_hi = max(4.0, 4.0 * rep.total_mass / thr)
    f_lo = float(_root_residual(rep, thr, np.array([lam_lo]), [theta])[0])
    f_hi = float(_root_residual(rep, thr, np.array([lam_hi]), [theta])[0])
    if f_lo <= 0.0:
        # crossing collapses onto the boundary circle
        return 1.0
    if f_hi >= 0.0:
        raise BracketError("kernel integral never drops below the threshold")
    for _ in range(80):
        mid = 0.5 * (lam_lo + lam_hi)
        if float(_root_residual(rep, thr, np.array([mid]), [theta])[0]) > 0.0:
            lam_lo = mid
        else:
            lam_hi = mid
    lam = 0.5 * (lam_lo + lam_hi)
    resid = abs(float(_root_residual(rep, thr, np.array([lam]), [theta])[0]))
    if resid > RESIDUAL_TOL:
        raise BracketError(f"radius equation residual {resid:.2e}")
    return float(np.exp(-lam))


# ----------------------------------------------------------------------
# the detachment set (arcs with wrap-around)
# ----------------------------------------------------------------------


def default_theta_grid(n=2048):
    return np.linspace(-np.pi, np.pi, n, endpoint=False)


def vt_plus_t(rep, t, theta_grid=None, g_values=None):
    """Arcs of {g > 1/(t-1)}; an arc (start, end) may have end > pi when it
    crosses the cut, and (-pi, pi) denotes the full circle."""
    if t <= 1:
        raise ValueError("power index must exceed 1")
    thr = 1.0 / (t - 1.0)
    grid = default_theta_grid() if theta_grid is None else np.asarray(theta_grid)
    if g_values is None:
        g_values = np.array([g_circle(rep, th) for th in grid])
    inside = g_values > thr
    n = grid.size
    if not np.any(inside):
        return []
    if np.all(inside):
        return [(-np.pi, np.pi)]

    starts = np.flatnonzero(inside & ~np.roll(inside, 1))
    arcs = []
    for i0 in starts:
        i1 = i0
        while inside[(i1 + 1) % n]:
            i1 += 1
        lo = _refine_arc_edge(rep, thr, grid[(i0 - 1) % n], grid[i0 % n])
        hi = _refine_arc_edge(rep, thr, grid[(i1 + 1) % n], grid[i1 % n])
        start = float(_wrap(lo))
        span = float(np.mod(hi - lo, 2.0 * np.pi))
        arcs.append((start, start + span))
    arcs.sort()
    return arcs


def _refine_arc_edge(rep, thr, out_angle, in_angle):
    # walk along the shorter arc between the two nodes
    delta = _wrap(in_angle - out_angle)
    lo, hi = 0.0, float(delta)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if g_circle(rep, out_angle + mid) > thr:
            hi = mid
        else:
            lo = mid
    return float(out_angle + 0.5 * (lo + hi))


# ----------------------------------------------------------------------
# the boundary map
# ----------------------------------------------------------------------


def h_t_t(mu, rep, t, theta):
    """h_t(theta) = Phi_t(R_t(theta) e^{i theta}), unimodular."""
    r = radius_r_t(rep, t, theta)
    z = min(r, EDGE_RADIUS) * np.exp(1j * theta)
    u = rep.eval(np.array([z]))[0]
    if r >= 1.0:
        # off the set Re u vanishes on the boundary; keep the phase only
        return complex(np.exp(1j * (theta + (t - 1.0) * u.imag)))
    h = z * np.exp((t - 1.0) * u)
    if abs(abs(h) - 1.0) > 1e-8:
        raise ModulusError(f"boundary image off the unit circle: |h| = {abs(h)}")
    return complex(h)


# ----------------------------------------------------------------------
# assembled curve
# ----------------------------------------------------------------------


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryCurveT:
    t: float
    theta_grid: np.ndarray
    radii: np.ndarray
    g_values: np.ndarray
    h_angles: np.ndarray
    vt_plus: tuple

    def in_set(self):
        return self.radii < 1.0

    def to_csv(self):
        buf = io.StringIO()
        buf.write("theta,radius,g_finite,g,arg_h,in_vt_plus\n")
        for th, r, g, ha in zip(self.theta_grid, self.radii, self.g_values,
                                self.h_angles):
            fin = int(np.isfinite(g))
            gtxt = f"{g:.17g}" if fin else "inf"
            buf.write(
                f"{th:.17g},{r:.17g},{fin},{gtxt},{ha:.17g},{int(r < 1.0)}\n"
            )
        return buf.getvalue()


def _poisson_field(rep, r, grid):
    """Re u(r e^{i theta}) on a uniform grid by circular convolution."""
    n = grid.size
    out = np.zeros(n)
    if rep.grid is not None and rep.grid.size:
        h = 2.0 * np.pi / n
        x = grid - grid[0]
        pois = (1.0 - r ** 2) / ((1.0 - r) ** 2 + 4.0 * r * np.sin(0.5 * x) ** 2)
        if rep.grid.size == n and np.allclose(rep.grid, grid):
            vals = rep.values
        else:
            vals = np.interp(
                np.mod(grid - rep.grid[0], 2.0 * np.pi) + rep.grid[0],
                np.append(rep.grid, rep.grid[0] + 2.0 * np.pi),
                np.append(rep.values, rep.values[0]),
            )
        out += np.fft.irfft(np.fft.rfft(vals) * np.fft.rfft(pois), n) * h
    if rep.atom_angles.size:
        d = grid[:, None] - rep.atom_angles[None, :]
        pois = (1.0 - r ** 2) / ((1.0 - r) ** 2 + 4.0 * r * np.sin(0.5 * d) ** 2)
        out += pois @ rep.atom_masses
    return out


def _polish_radii(rep, thr, theta, lam_seed, lam_lo, lam_hi):
    """Newton-bisection on F(lam) per node, vectorized.

    Seeds come from the convolution ladder; every exact evaluation also
    narrows a sign bracket so a biased seed degrades to bisection instead
    of escaping.  F' = -Re(z u'(z)) - thr stays below -thr, so steps are
    bounded.  Nodes pinned at the boundary guard radius with F <= 0 are
    grazing the set and collapse to radius 1.
    """
    lam_min = -np.log(EDGE_RADIUS)
    n = theta.size
    lam = np.clip(lam_seed, lam_min, None)
    lam_lo = np.minimum(lam_lo, lam)
    lam_hi = np.maximum(lam_hi, lam)
    collapsed = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    ray = np.exp(1j * theta)
    for _ in range(50):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        z = np.exp(-lam[idx]) * ray[idx]
        u, du = rep.eval_with_prime(z)
        f = u.real - thr * lam[idx]
        fp = -np.real(z * du) - thr
        pos = f > 0.0
        lam_lo[idx] = np.where(pos, lam[idx], lam_lo[idx])
        lam_hi[idx] = np.where(pos, lam_hi[idx], lam[idx])
        graze = ~pos & (lam[idx] <= lam_min * (1.0 + 1e-9))
        collapsed[idx[graze]] = True
        done = (np.abs(f) < 1e-12) | graze
        active[idx[done]] = False
        keep = ~done
        if not np.any(keep):
            continue
        ii = idx[keep]
        # a ladder bracket biased past the true root collapses to a point;
        # re-open it fully on the side the residual still points to
        width = lam_hi[ii] - lam_lo[ii]
        shut = width <= 1e-15 * np.maximum(1.0, lam_hi[ii])
        lam_lo[ii] = np.where(shut & ~pos[keep], lam_min, lam_lo[ii])
        lam_hi[ii] = np.where(shut & pos[keep], 4.0 * lam_hi[ii] + 4.0, lam_hi[ii])
        cand = lam[ii] - f[keep] / fp[keep]
        ok = np.isfinite(cand) & (cand > lam_lo[ii]) & (cand < lam_hi[ii])
        cand = np.where(ok, cand, 0.5 * (lam_lo[ii] + lam_hi[ii]))
        lam[ii] = np.maximum(cand, lam_min)
    if np.any(active):
        raise BracketError(
            f"radius iteration failed to converge at {int(active.sum())} nodes"
        )
    return lam, collapsed


def build_curve_t(mu, rep, t, theta_grid=None, n_grid=2048):
    """Sample g, the detachment radius, and the boundary phase on a uniform
    angular grid.  Radii are bracketed on a Poisson-convolution ladder and
    polished against the exact representation."""
    if t <= 1:
        raise ValueError("power index must exceed 1")
    thr = 1.0 / (t - 1.0)
    grid = default_theta_grid(n_grid) if theta_grid is None else np.asarray(theta_grid)
    n = grid.size

    g_values = np.array([g_circle(rep, th) for th in grid])
    arcs = vt_plus_t(rep, t, theta_grid=grid, g_values=g_values)
    inside = g_values > thr

    radii = np.ones(n)
    if np.any(inside):
        lam_max = max(4.0, 4.0 * rep.total_mass / thr)
        ladder = np.geomspace(-np.log(EDGE_RADIUS), lam_max, 160)
        lam_lo = np.full(n, ladder[0])
        lam_hi = np.full(n, ladder[-1])
        seed = np.full(n, ladder[0])
        found = np.zeros(n, dtype=bool)
        f_prev = _poisson_field(rep, float(np.exp(-ladder[0])), grid) - thr * ladder[0]
        lam_prev = ladder[0]
        for lam in ladder[1:]:
            field = _poisson_field(rep, float(np.exp(-lam)), grid) - thr * lam
            crossed = (f_prev > 0.0) & (field <= 0.0) & ~found
            lam_lo[crossed] = lam_prev
            lam_hi[crossed] = lam
            with np.errstate(divide="ignore", invalid="ignore"):
                interp = (lam_prev * field - lam * f_prev) / (field - f_prev)
            good = crossed & np.isfinite(interp)
            seed[good] = interp[good]
            seed[crossed & ~np.isfinite(interp)] = 0.5 * (lam_prev + lam)
            found[crossed] = True
            f_prev = field
            lam_prev = lam
        lam, collapsed = _polish_radii(
            rep, thr, grid[inside], seed[inside], lam_lo[inside], lam_hi[inside]
        )
        idx = np.flatnonzero(inside)
        radii[idx] = np.exp(-lam)
        radii[idx[collapsed]] = 1.0

    # phases: off the set at the boundary guard radius, on it at R_t
    z = np.minimum(radii, EDGE_RADIUS) * np.exp(1j * grid)
    u = rep.eval(z)
    h_angles = np.where(
        radii >= 1.0,
        np.angle(np.exp(1j * (grid + (t - 1.0) * u.imag))),
        np.angle(np.exp(1j * grid) * radii * np.exp((t - 1.0) * u)),
    )
    onset = radii < 1.0
    if np.any(onset):
        mod = radii[onset] * np.exp((t - 1.0) * u.real[onset])
        bad = np.abs(mod - 1.0) > 1e-8
        if np.any(bad):
            raise ModulusError(
                f"boundary image off the unit circle at {int(bad.sum())} nodes"
            )
    return BoundaryCurveT(
        t=float(t), theta_grid=grid, radii=radii, g_values=g_values,
        h_angles=h_angles, vt_plus=tuple(arcs),
    )
