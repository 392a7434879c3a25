"""Assembly of free multiplicative convolution powers.

For t > 1 the t-th power of a measure mu (on the positive half-line or
the unit circle) splits into finitely many absolutely continuous pieces
plus atoms.  This module evaluates the closed-form density along the
detachment-set boundary, applies the strict atom criterion, and merges
everything into a PowerResult carrying support components, a component
count, and a mass-balance diagnostic.

Locations are reported in the variable of the power measure itself: the
detachment component at parameter r (half-line) carries density at
x = 1/h_t(r); on the circle the location is conj(h_t(e^{i theta})).
The auxiliary radius is the modulus of the subordinate point
eta(boundary): l_t(r) = r exp(-Re u) on the half-line and
l_t(theta) = R_t(theta)^{t/(t-1)} on the circle.  Atom images have the
exact closed forms r^t and t*beta: psi blows up along an atom
direction, so kappa degenerates to z there and h_t follows suit.
"""

import dataclasses

import numpy as np

from . import boundary_circle as bcirc
from . import boundary_halfline as bhalf
from .errors import DomainError, FreemultError, LocateError, QuadratureError
from .herglotz import closed_form_rho_atomic_r, extract_rep_r, extract_rep_t, log_kappa
from .measures import CircleMeasure, HalfLineMeasure

# mass-balance window asserted downstream; assemble itself only raises
# beyond the looser guard (a genuine pipeline failure, not grid noise)
BALANCE_TOL = 1e-3
BALANCE_GUARD = 1e-2

_TWO_PI = 2.0 * np.pi


def _wrap_angle(x):
    y = np.mod(x, _TWO_PI)
    return y - _TWO_PI if y > np.pi else y


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except FreemultError as exc:
        raise type(exc)(f"[{name}] {exc}") from exc


# ----------------------------------------------------------------------
# density along the detachment set
# ----------------------------------------------------------------------


def _profile_r(mu, t, rs):
    """Vectorised density profile; rs must lie strictly inside V_t+.

    Returns (x, p, angle, h, ell); x = 1/h decreases in r.
    """
    rs = np.asarray(rs, dtype=float)
    ang = bhalf._angles_bisect(mu, t, rs)
    z = rs * np.exp(1j * ang)
    u = log_kappa(mu, z)
    h = rs * np.exp((t - 1.0) * u.real)
    ell = rs * np.exp(-u.real)
    th = t * ang / (t - 1.0)
    den = 1.0 - 2.0 * ell * np.cos(th) + ell * ell
    p = h * ell * np.sin(th) / (np.pi * den)
    return 1.0 / h, p, ang, h, ell


def density_r(mu, rep, curve, r):
    """Density of the power measure at x = 1/h_t(r).

    Returns (x, p).  r must lie strictly inside a V_t+ component; the
    value can exceed any bound near component endpoints where an atom
    of mu sits exactly at the survival threshold.
    """
    t = curve.t
    if bhalf.g_radial(rep, float(r)) <= 1.0 / (t - 1.0):
        raise DomainError("r lies outside the detachment set; no density there")
    x, p = _profile_r(mu, t, np.array([float(r)]))[:2]
    return float(x[0]), float(p[0])


def _values_t(rep, t, thetas, radii):
    """Location angles and density values from solved radial roots."""
    r_eval = np.minimum(radii, bcirc.EDGE_RADIUS)
    u = rep.eval(r_eval * np.exp(1j * thetas))
    ell = radii ** (t / (t - 1.0))
    alpha = thetas - u.imag
    den = 1.0 - 2.0 * ell * np.cos(alpha) + ell * ell
    with np.errstate(divide="ignore", invalid="ignore"):
        p = (1.0 - ell * ell) / (_TWO_PI * den)
    p = np.where(ell >= 1.0, 0.0, p)
    beta = -(thetas + (t - 1.0) * u.imag)
    return beta, p


def density_t(mu, rep, curve, theta):
    """Density of the power measure at conj(h_t(e^{i theta})).

    Returns (zeta, p) with zeta the unit-modulus location.
    """
    t = curve.t
    radius = bcirc.radius_r_t(rep, t, float(theta))
    if radius >= 1.0:
        raise DomainError("theta lies outside the detachment set; no density there")
    beta, p = _values_t(rep, t, np.array([float(theta)]), np.array([radius]))
    return complex(np.exp(1j * beta[0])), float(p[0])


# ----------------------------------------------------------------------
# atoms
# ----------------------------------------------------------------------


def atoms_r(mu, t):
    """Atoms of the power measure: (r, m) survives iff m > (t-1)/t, strictly.

    Survivors land at r^t with mass t m - (t - 1); an atom at zero keeps
    its mass for every t.
    """
    out = []
    if mu.mass_at_zero > 0.0:
        out.append((0.0, float(mu.mass_at_zero)))
    thr = (t - 1.0) / t
    for pos, m in zip(mu.atom_positions, mu.atom_masses):
        if m > thr:
            out.append((float(pos) ** t, t * float(m) - (t - 1.0)))
    return out


def atoms_t(mu, t, curve=None, rep=None):
    """Atoms of the power measure on the circle, angles in (-pi, pi].

    An atom of mu at angle beta maps to angle t beta with mass
    t m - (t - 1).  A surviving atom's preimage angle -beta must carry
    g < 1/(t-1); when a rep is supplied this is checked directly (the
    quadratic-zero classifier works at off-grid angles).  A curve alone
    can only test arc membership up to its grid resolution, so that
    check skips preimages within a couple of cells of an arc end and
    skips full-circle arcs, where the detached direction is a single
    point the grid cannot see.
    """
    thr = (t - 1.0) / t
    out = []
    for ang, m in zip(mu.atom_angles, mu.atom_masses):
        if m <= thr:
            continue
        pre = _wrap_angle(-float(ang))
        if rep is not None:
            g = bcirc.g_circle(rep, pre)
            if not g < 1.0 / (t - 1.0):
                raise LocateError(
                    f"g({pre:.6f}) = {g:.6g} contradicts survival of the "
                    f"atom at angle {float(ang):.6f}"
                )
        elif curve is not None:
            cell = _TWO_PI / curve.theta_grid.size
            if _inside_arcs(pre, curve.vt_plus, edge_tol=2.0 * cell):
                raise LocateError(
                    f"atom preimage angle {pre:.6f} fell inside a detachment arc"
                )
        out.append((_wrap_angle(t * float(ang)), t * float(m) - (t - 1.0)))
    return out


def _inside_arcs(angle, arcs, edge_tol=1e-9):
    for start, end in arcs:
        span = end - start
        if span >= _TWO_PI - 1e-8:
            continue
        d = np.mod(angle - start, _TWO_PI)
        if edge_tol < d < span - edge_tol:
            return True
    return False


def atom_identity_check(mu, rep, point):
    """|1 + g(point) - 1/mu(atom)| at an atom's boundary preimage.

    The atom of mu pairs with the reciprocal location: 1/point on the
    half-line, e^{-i point} on the circle.  Returns inf when mu carries
    no atom there.
    """
    if isinstance(mu, HalfLineMeasure):
        lhs = 1.0 + bhalf.g_radial(rep, float(point))
        sel = np.isclose(mu.atom_positions, 1.0 / float(point), rtol=1e-9, atol=1e-12)
    elif isinstance(mu, CircleMeasure):
        lhs = 1.0 + bcirc.g_circle(rep, float(point))
        diff = np.mod(mu.atom_angles + float(point) + np.pi, _TWO_PI) - np.pi
        sel = np.abs(diff) <= 1e-9
    else:
        raise TypeError("expected HalfLineMeasure or CircleMeasure")
    if not np.any(sel):
        return np.inf
    return abs(lhs - 1.0 / float(np.asarray(mu.atom_masses)[sel][0]))


# ----------------------------------------------------------------------
# quadrature and support bookkeeping
# ----------------------------------------------------------------------


def _mass_sqrt_edges(xs, ps, a, b):
    """integral of p dx over [a, b] from samples ordered ascending.

    The density may blow up like an inverse square root at either
    endpoint (an atom of mu exactly at the survival threshold), so each
    half is integrated in the variable y = sqrt(|x - endpoint|), where
    the integrand 2 y p(y) is bounded; the split node is shared so no
    panel is dropped.
    """
    if xs.size < 4:
        return float(np.trapezoid(ps, xs))
    k = int(np.clip(np.searchsorted(xs, 0.5 * (a + b)), 1, xs.size - 1))
    total = 0.0
    halves = ((xs[: k + 1], ps[: k + 1], a), (xs[k:][::-1], ps[k:][::-1], b))
    for side_x, side_p, anchor in halves:
        y = np.sqrt(np.abs(side_x - anchor))
        f = 2.0 * y * side_p
        order = np.argsort(y)
        y, f = y[order], f[order]
        if y.size >= 2 and y[0] > 0.0:
            f0 = max(0.0, f[0] - y[0] * (f[1] - f[0]) / (y[1] - y[0]))
            y = np.concatenate([[0.0], y])
            f = np.concatenate([[f0], f])
        total += np.trapezoid(f, y)
    return float(total)


def _merge_line(items):
    """Merge intervals/points (lo, hi, pad_lo, pad_hi) on the line.

    Adjacent pieces whose gap is below either facing pad (or a relative
    floor) fuse; returns (lo, hi) tuples.
    """
    if not items:
        return []
    items = sorted((float(a), float(b), float(pa), float(pb)) for a, b, pa, pb in items)
    out = [list(items[0])]
    for lo, hi, pad_lo, pad_hi in items[1:]:
        cur = out[-1]
        tol = max(cur[3], pad_lo, 1e-9 * max(abs(cur[1]), abs(lo), 1.0))
        if lo - cur[1] <= tol:
            if hi > cur[1]:
                cur[1], cur[3] = hi, pad_hi
        else:
            out.append([lo, hi, pad_lo, pad_hi])
    return [(a, b) for a, b, _, _ in out]


def _merge_arcs(items):
    """Circular variant of _merge_line; items are (start, end, pads) with
    end - start in [0, 2 pi].  A covering within tolerance of the full
    circle collapses to [(-pi, pi)]."""
    if not items:
        return []
    if any(float(e) - float(s) >= _TWO_PI - 1e-8 for s, e, _, _ in items):
        return [(-np.pi, np.pi)]
    norm = []
    for s, e, pa, pb in items:
        s0 = _wrap_angle(float(s))
        norm.append((s0, s0 + (float(e) - float(s)), float(pa), float(pb)))
    norm.sort()
    out = [list(norm[0])]
    for s, e, pa, pb in norm[1:]:
        cur = out[-1]
        if s - cur[1] <= max(cur[3], pa, 1e-9):
            if e > cur[1]:
                cur[1], cur[3] = e, pb
        else:
            out.append([s, e, pa, pb])
    if len(out) > 1:
        first, last = out[0], out[-1]
        if (first[0] + _TWO_PI) - last[1] <= max(last[3], first[2], 1e-9):
            first[0] = last[0] - _TWO_PI
            first[2] = last[2]
            if last[1] - _TWO_PI > first[1]:
                first[1], first[3] = last[1] - _TWO_PI, last[3]
            out.pop()
    s, e, pa, pb = out[0]
    if len(out) == 1 and (s + _TWO_PI) - e <= max(pa, pb, 1e-8):
        return [(-np.pi, np.pi)]
    return [(s, e) for s, e, _, _ in out]


# ----------------------------------------------------------------------
# the assembled result
# ----------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PowerResult:
    """Decomposition of a free multiplicative power.

    density_samples holds (location, value) rows, ascending in location
    (half-line x, circle angle).  support_components are intervals or
    arcs (start, end); an arc crossing the cut keeps end > pi.  atoms
    are (location, mass).  mass_balance sums atoms and the integrated
    density and should be 1 within tolerance.
    """

    t: float
    space: str
    density_samples: np.ndarray
    atoms: tuple
    support_components: tuple
    component_count: int
    mass_balance: float
    debug: dict = dataclasses.field(default_factory=dict, repr=False, compare=False)

    def to_json_obj(self):
        has = self.density_samples.size > 0
        return {
            "t": float(self.t),
            "space": self.space,
            "atoms": [[float(a), float(m)] for a, m in self.atoms],
            "components": [[float(lo), float(hi)] for lo, hi in self.support_components],
            "density": {
                "locations": [float(v) for v in self.density_samples[:, 0]] if has else [],
                "values": [float(v) for v in self.density_samples[:, 1]] if has else [],
            },
            "mass_balance": float(self.mass_balance),
            "component_count": int(self.component_count),
        }

    def density_csv(self):
        label = "x" if self.space == "halfline" else "angle"
        lines = [f"{label},density"]
        for loc, val in self.density_samples:
            lines.append(f"{loc:.17g},{val:.17g}")
        return "\n".join(lines) + "\n"


def assemble(mu, t, rep=None, curve=None, n_samples=512):
    """Full pipeline: membership, representation, boundary curve,
    density, atoms, support merge.

    t = 1 returns mu repackaged unchanged; rep and curve may be passed
    in to reuse work across several t.  Raises QuadratureError when the
    mass balance misses 1 beyond the coarse guard.
    """
    t = float(t)
    if t < 1.0:
        raise ValueError("power index below 1 is undefined")
    if isinstance(mu, HalfLineMeasure):
        if t == 1.0:
            return _identity_result(mu, "halfline")
        return _assemble_r(mu, t, rep, curve, n_samples)
    if isinstance(mu, CircleMeasure):
        if t == 1.0:
            return _identity_result(mu, "circle")
        return _assemble_t(mu, t, rep, curve, n_samples)
    raise TypeError("expected HalfLineMeasure or CircleMeasure")


def _check_membership(mu):
    report = mu.membership_report()
    if not report:
        raise DomainError("[membership] " + "; ".join(report.reasons))
    return report


def _finish(t, space, atoms, pieces, extra_debug):
    items = []
    chunks = []
    ac_mass = 0.0
    for piece in pieces:
        lo, hi = piece["support"]
        pad_lo, pad_hi = piece["pad"]
        items.append((lo, hi, pad_lo, pad_hi))
        chunks.append(np.column_stack([piece["loc"], piece["val"]]))
        ac_mass += piece["mass"]
    for pos, _ in atoms:
        items.append((pos, pos, 0.0, 0.0))
    comps = _merge_arcs(items) if space == "circle" else _merge_line(items)
    if chunks:
        density = np.concatenate(chunks)
        density = density[np.argsort(density[:, 0])]
    else:
        density = np.empty((0, 2))
    balance = ac_mass + sum(m for _, m in atoms)
    if abs(balance - 1.0) > BALANCE_GUARD:
        raise QuadratureError(
            f"[balance] mass balance {balance:.6f} is too far from 1; "
            "no singular part is ever attributed"
        )
    return PowerResult(
        t=t,
        space=space,
        density_samples=density,
        atoms=tuple(atoms),
        support_components=tuple(comps),
        component_count=len(comps),
        mass_balance=float(balance),
        debug=dict(extra_debug, pieces=pieces, ac_mass=ac_mass),
    )


# -- half-line ---------------------------------------------------------


def _cheb_nodes(n):
    k = np.arange(1, n + 1)
    return 0.5 * (1.0 - np.cos(np.pi * k / (n + 1)))


def _assemble_r(mu, t, rep, curve, n_samples):
    report = _stage("membership", _check_membership, mu)
    if rep is None:
        rep = _stage(
            "representation",
            extract_rep_r if mu.has_ac else closed_form_rho_atomic_r,
            mu,
        )
    atoms = atoms_r(mu, t)
    pieces = []
    if rep.total_mass() > 1e-12:
        if curve is None:
            curve = _stage("boundary", bhalf.build_curve_r, mu, rep, t)
        for lo, hi in curve.vt_plus:
            pieces.append(_stage("density", _density_piece_r, mu, rep, t, lo, hi, n_samples))
    return _finish(t, "halfline", atoms, pieces, {"curve": curve, "rep": rep, "membership": report})


def _spike_radii_r(mu, rep, t, lo, hi):
    """Interior radii where the density blows up like an inverse square
    root: preimages of atoms sitting near the survival borderline, plus
    directions where g dips down to graze the threshold."""
    hi_eff = lo * 1e8 if np.isinf(hi) else hi
    cuts = []
    for pos, m in zip(mu.atom_positions, mu.atom_masses):
        if abs(t * m - (t - 1.0)) <= 0.05 * (t - 1.0):
            cuts.append(1.0 / pos)
    grid = np.geomspace(lo, hi_eff, 1025)
    g = np.array([bhalf.g_radial(rep, r) for r in grid[1:-1]])
    thr = 1.0 / (t - 1.0)
    finite = np.isfinite(g)
    inner = (
        finite
        & np.r_[True, g[1:] < g[:-1]]
        & np.r_[g[:-1] < g[1:], True]
        & (g - thr <= GRAZE_MARGIN * thr)
        & (g > thr)
    )
    for j in np.flatnonzero(inner):
        y0, y1, y2 = (
            g[j - 1] if j > 0 else np.inf,
            g[j],
            g[j + 1] if j < g.size - 1 else np.inf,
        )
        r_min = grid[j + 1]
        if np.isfinite(y0) and np.isfinite(y2):
            denom = y0 - 2.0 * y1 + y2
            if denom > 0:
                step = np.log(grid[1] / grid[0])
                shift = np.clip(0.5 * (y0 - y2) / denom, -1.0, 1.0)
                r_min = r_min * np.exp(shift * step)
        cuts.append(float(r_min))
    gap = 1e-4
    keep = sorted(c for c in cuts if lo * (1 + gap) < c < hi_eff * (1 - gap))
    out = []
    for c in keep:
        if not out or c > out[-1] * (1 + gap):
            out.append(c)
    return out


def _density_piece_r(mu, rep, t, lo, hi, n):
    unbounded = np.isinf(hi)
    hi_eff = lo * 1e8 if unbounded else hi
    cuts = _spike_radii_r(mu, rep, t, lo, hi)
    bounds = [lo] + cuts + [hi_eff]
    spans = np.diff(np.log(bounds)) if unbounded else np.diff(bounds)
    counts = np.maximum(64, np.rint(n * spans / spans.sum()).astype(int))
    # anchor images: h is increasing, x = 1/h reverses the order
    anchors = [0.0 if unbounded else 1.0 / bhalf.h_t_r(mu, rep, t, hi)]
    anchors += [1.0 / bhalf.h_t_r(mu, rep, t, c) for c in reversed(cuts)]
    anchors.append(1.0 / bhalf.h_t_r(mu, rep, t, lo))
    rs_parts, seg_samples = [], []
    for (a, b), m in zip(zip(bounds[:-1], bounds[1:]), counts):
        w = _cheb_nodes(int(m))
        rs = a * (b / a) ** w if unbounded else a + (b - a) * w
        x, p, ang, h, ell = _profile_r(mu, t, rs)
        rs_parts.append((rs, ang, h, ell))
        order = np.argsort(x)
        seg_samples.append((x[order], p[order]))
    mass = 0.0
    for k, (xs, ps) in enumerate(reversed(seg_samples)):
        mass += _mass_sqrt_edges(xs, ps, anchors[k], anchors[k + 1])
    locs = np.concatenate([xs for xs, _ in reversed(seg_samples)])
    vals = np.concatenate([ps for _, ps in reversed(seg_samples)])
    x_left, x_right = anchors[0], anchors[-1]
    return {
        "r": np.concatenate([part[0] for part in rs_parts]),
        "angle": np.concatenate([part[1] for part in rs_parts]),
        "h": np.concatenate([part[2] for part in rs_parts]),
        "ell": np.concatenate([part[3] for part in rs_parts]),
        "loc": locs,
        "val": vals,
        "support": (x_left, x_right),
        "pad": (
            max(locs[0] - x_left, locs[1] - locs[0]),
            max(x_right - locs[-1], locs[-1] - locs[-2]),
        ),
        "mass": mass,
    }


# -- circle ------------------------------------------------------------


def _assemble_t(mu, t, rep, curve, n_samples):
    report = _stage("membership", _check_membership, mu)
    if rep is None:
        rep = _stage("representation", extract_rep_t, mu)
    if curve is None:
        curve = _stage("boundary", bcirc.build_curve_t, mu, rep, t)
    atoms = _stage("atoms", atoms_t, mu, t, curve, rep)
    pieces = []
    for arc in curve.vt_plus:
        pieces.append(_stage("density", _density_piece_t, mu, rep, t, arc, curve, n_samples))
    return _finish(t, "circle", atoms, pieces, {"curve": curve, "rep": rep, "membership": report})


def _interp_lambda(curve, thetas):
    grid = curve.theta_grid
    lam = -np.log(np.minimum(curve.radii, 1.0))
    ext_grid = np.concatenate([grid, grid[:1] + _TWO_PI])
    ext_lam = np.concatenate([lam, lam[:1]])
    th = np.mod(thetas - grid[0], _TWO_PI) + grid[0]
    return np.interp(th, ext_grid, ext_lam)


# a direction where g exceeds the threshold by less than this relative
# margin is a near-graze: the radial root almost touches the circle and
# the density spikes like an inverse square root there, so the mass
# quadrature must anchor on it rather than sample across it
GRAZE_MARGIN = 5e-3


def _graze_directions(curve, a0, a1, thr):
    """Interior local minima of g within GRAZE_MARGIN of the threshold."""
    grid = curve.theta_grid
    span = a1 - a0
    off = np.mod(grid - a0, _TWO_PI)
    cell = _TWO_PI / grid.size
    inside = (off > 3 * cell) & (off < span - 3 * cell)
    idx = np.flatnonzero(inside)
    if idx.size < 3:
        return []
    idx = idx[np.argsort(off[idx])]  # spatial order even across the wrap
    g = curve.g_values[idx]
    pos = off[idx]
    found = []
    for j in range(1, idx.size - 1):
        if not (np.isfinite(g[j]) and g[j] <= g[j - 1] and g[j] <= g[j + 1]):
            continue
        if g[j] - thr > GRAZE_MARGIN * thr:
            continue
        # parabolic vertex through the three nodes, clamped to the cell
        if np.isfinite(g[j - 1]) and np.isfinite(g[j + 1]):
            d1, d2 = g[j + 1] - g[j - 1], g[j + 1] - 2 * g[j] + g[j - 1]
            shift = -0.5 * d1 / d2 if d2 > 0 else 0.0
        else:
            shift = 0.0
        found.append(a0 + pos[j] + np.clip(shift, -1.0, 1.0) * cell)
    return sorted(found)


def _segment_values_t(mu, rep, t, curve, th_lo, th_hi, n):
    """Density samples over one theta segment, anchored at both ends.

    Ends must be either detachment-arc edges or near-graze directions;
    the boundary image is unimodular at both, so the end anchors come
    from the off-curve phase formula.
    """
    thr = 1.0 / (t - 1.0)
    lam_min = -np.log(bcirc.EDGE_RADIUS)
    thetas = th_lo + (th_hi - th_lo) * _cheb_nodes(n)
    seed = np.maximum(_interp_lambda(curve, thetas), 2.0 * lam_min)
    lam, collapsed = bcirc._polish_radii(
        rep, thr, thetas, seed,
        np.full(thetas.size, lam_min), np.maximum(2.0 * seed, 1.0),
    )
    radii = np.exp(-lam)
    radii[collapsed] = 1.0
    beta, p = _values_t(rep, t, thetas, radii)
    beta = np.unwrap(beta)
    # each anchor aligns to the 2 pi branch of its own end of the sample
    # run; on a once-around segment the two ends sit a full turn apart
    ends = []
    for edge, ref in ((th_lo, beta[0]), (th_hi, beta[-1])):
        raw = -np.angle(bcirc.h_t_t(mu, rep, t, _wrap_angle(edge)))
        ends.append(raw + _TWO_PI * np.round((ref - raw) / _TWO_PI))
    b_lo, b_hi = min(ends), max(ends)
    order = np.argsort(beta)
    mass = _mass_sqrt_edges(beta[order], p[order], b_lo, b_hi)
    return {
        "theta": thetas,
        "radii": radii,
        "beta": beta,
        "val": p,
        "ends": (b_lo, b_hi),
        "mass": mass,
        "pad": (
            max(beta[order][0] - b_lo, float(beta[order][1] - beta[order][0])),
            max(b_hi - beta[order][-1], float(beta[order][-1] - beta[order][-2])),
        ),
    }


def _density_piece_t(mu, rep, t, arc, curve, n):
    a0, a1 = arc
    span = a1 - a0
    full = span >= _TWO_PI - 1e-12
    thr = 1.0 / (t - 1.0)
    grazes = _graze_directions(curve, a0, a1, thr)
    if full and not grazes:
        # smooth loop: plain periodic trapezoid
        thetas = np.linspace(a0, a0 + _TWO_PI, n + 1)
        lam_min = -np.log(bcirc.EDGE_RADIUS)
        seed = np.maximum(_interp_lambda(curve, thetas), 2.0 * lam_min)
        lam, collapsed = bcirc._polish_radii(
            rep, thr, thetas, seed,
            np.full(thetas.size, lam_min), np.maximum(2.0 * seed, 1.0),
        )
        radii = np.exp(-lam)
        radii[collapsed] = 1.0
        beta, p = _values_t(rep, t, thetas, radii)
        beta = np.unwrap(beta)
        return {
            "theta": thetas,
            "radii": radii,
            "beta": beta,
            "loc": np.array([_wrap_angle(b) for b in beta]),
            "val": p,
            "support": (-np.pi, np.pi),
            "pad": (0.0, 0.0),
            "mass": abs(float(np.trapezoid(p, beta))),
        }
    if full:
        # segment the loop at the graze directions
        cuts = list(zip(grazes, grazes[1:] + [grazes[0] + _TWO_PI]))
    else:
        cuts = list(zip([a0] + grazes, grazes + [a1]))
    segs = []
    for lo, hi in cuts:
        n_seg = max(64, int(round(n * (hi - lo) / span)))
        segs.append(_segment_values_t(mu, rep, t, curve, lo, hi, n_seg))
    mass = sum(s["mass"] for s in segs)
    if full:
        support = (-np.pi, np.pi)
        pad = (0.0, 0.0)
    else:
        ends = np.array([s["ends"] for s in segs])
        support = (float(ends[:, 0].min()), float(ends[:, 1].max()))
        # floored at a curve cell: arc ends retreat by about that much
        # from a detachment boundary the grid resolves only as a point
        cell = _TWO_PI / curve.theta_grid.size
        pad = (
            max(segs[int(np.argmin(ends[:, 0]))]["pad"][0], cell),
            max(segs[int(np.argmax(ends[:, 1]))]["pad"][1], cell),
        )
    return {
        "theta": np.concatenate([s["theta"] for s in segs]),
        "radii": np.concatenate([s["radii"] for s in segs]),
        "beta": np.concatenate([s["beta"] for s in segs]),
        "loc": np.array([_wrap_angle(b) for s in segs for b in s["beta"]]),
        "val": np.concatenate([s["val"] for s in segs]),
        "support": support,
        "pad": pad,
        "mass": mass,
    }


# -- t = 1 identity ------------------------------------------------------


def _positive_runs(grid, values, circular):
    floor = 1e-12 * max(values.max(initial=0.0), 1.0)
    pos = values > floor
    if not pos.any():
        return []
    if circular and pos.all():
        return [(-np.pi, np.pi)]
    runs = []
    start = None
    for i, flag in enumerate(pos):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            runs.append((grid[start], grid[i]))
            start = None
    if start is not None:
        runs.append((grid[start], grid[-1]))
    return runs


def _identity_result(mu, space):
    circular = space == "circle"
    if circular:
        atoms = [(float(a), float(m)) for a, m in zip(mu.atom_angles, mu.atom_masses)]
    else:
        atoms = []
        if mu.mass_at_zero > 0.0:
            atoms.append((0.0, float(mu.mass_at_zero)))
        atoms += [(float(a), float(m)) for a, m in zip(mu.atom_positions, mu.atom_masses)]
    items = [(a, a, 0.0, 0.0) for a, _ in atoms]
    if mu.has_ac:
        density = np.column_stack([mu.grid, mu.values])
        cell = float(np.diff(mu.grid).max())
        for lo, hi in _positive_runs(mu.grid, mu.values, circular):
            items.append((lo, hi, cell, cell))
    else:
        density = np.empty((0, 2))
    comps = _merge_arcs(items) if circular else _merge_line(items)
    return PowerResult(
        t=1.0,
        space=space,
        density_samples=density,
        atoms=tuple(atoms),
        support_components=tuple(comps),
        component_count=len(comps),
        mass_balance=float(mu.total_mass()),
        debug={"identity": True},
    )


# ----------------------------------------------------------------------
# component count sweep
# ----------------------------------------------------------------------


def component_count_sweep(mu, t_list, rep=None):
    """Support component counts across ascending powers.

    Counting happens on the parameter side (detachment intervals or
    arcs plus surviving-atom preimages); the boundary map is a
    homeomorphism, so adjacency there matches adjacency of the actual
    supports.  The counts should be nonincreasing in t.
    """
    ts = [float(v) for v in t_list]
    if any(v <= 1.0 for v in ts):
        raise ValueError("all powers must exceed 1")
    if sorted(ts) != ts:
        raise ValueError("t_list must be ascending")
    if isinstance(mu, HalfLineMeasure):
        return _sweep_r(mu, ts, rep)
    if isinstance(mu, CircleMeasure):
        return _sweep_t(mu, ts, rep)
    raise TypeError("expected HalfLineMeasure or CircleMeasure")


def _sweep_r(mu, ts, rep):
    if rep is None:
        rep = extract_rep_r(mu) if mu.has_ac else closed_form_rho_atomic_r(mu)
    pure_atom = rep.total_mass() <= 1e-12
    rel_cell = _sweep_cell_r(rep)
    counts = []
    for t in ts:
        thr = (t - 1.0) / t
        items = [
            (1.0 / p, 1.0 / p, 0.0, 0.0)
            for p, m in zip(mu.atom_positions, mu.atom_masses)
            if m > thr
        ]
        if not pure_atom:
            # pads at the support-detection resolution: where rho's
            # density dies quadratically (an embedded atom preimage) the
            # computed set retreats by about a grid cell even though the
            # true complement is a single point
            for lo, hi in bhalf.vt_plus_r(rep, t):
                pad_hi = hi * rel_cell if np.isfinite(hi) else np.inf
                items.append((lo, hi, lo * rel_cell, pad_hi))
        merged = _merge_line(items)
        n = len(merged)
        if mu.mass_at_zero > 0.0 and not any(np.isinf(b) for _, b in merged):
            # the zero atom's preimage sits at r = inf, beyond every item
            n += 1
        counts.append(n)
    return counts


def _sweep_cell_r(rep):
    pieces = bhalf._singular_pieces(rep)
    if not pieces:
        return 1e-6
    finite = [p[1] for p in pieces if np.isfinite(p[1])] + [p[0] for p in pieces]
    lo, hi = min(p[0] for p in pieces) / 10.0, max(finite) * 10.0
    return (hi / lo) ** (1.0 / 1023.0) - 1.0


def _sweep_t(mu, ts, rep):
    if rep is None:
        rep = extract_rep_t(mu)
    grid = bcirc.default_theta_grid()
    g = np.array([bcirc.g_circle(rep, th) for th in grid])
    # cell-sized pads, matching the support-detection resolution
    cell = _TWO_PI / grid.size
    counts = []
    for t in ts:
        arcs = bcirc.vt_plus_t(rep, t, grid, g)
        items = [(a, b, cell, cell) for a, b in arcs]
        thr = (t - 1.0) / t
        for ang, m in zip(mu.atom_angles, mu.atom_masses):
            if m > thr:
                pre = _wrap_angle(-float(ang))
                items.append((pre, pre, 0.0, 0.0))
        counts.append(len(_merge_arcs(items)))
    return counts
