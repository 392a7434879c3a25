"""Subordination oracle for cross-validating the closed-form pipeline.

The production path reads densities off the detachment-set boundary
curve.  This module never looks at that curve: it solves the
subordination equation Phi_t(w) = z directly, with Phi_t(w) =
w exp[(t-1) u(w)], by modulus continuation from the origin and damped
Newton steps; evaluates the power measure's eta-transform as
eta_mu(omega_t(z)); and recovers densities through the smoothed
Stieltjes and Poisson inversions.  The two routes share nothing beyond
the exact transforms of mu, so their agreement is a genuine check.

Every accepted root carries a certificate: residual |Phi_t(w) - z| at
most RESIDUAL_TOL together with the domain inequalities that single out
the principal branch (|w| <= |z| on the disc; arg w in [arg z, pi)
above the half-line, mirrored below; w < 0 for negative real probes).
Phi_t(w) = z has other roots, and they are rejected.
"""

import dataclasses
import io
import logging
import warnings

import numpy as np

from .errors import (
    ContinuationError,
    DomainError,
    FreemultError,
    InversionError,
    NonUniqueWarning,
)
from .herglotz import log_kappa
from .measures import CircleMeasure, invert_poisson, invert_stieltjes

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
LADDER_RATIO = 1.25
LADDER_BASE = 1e-2

# iterates must stay clear of the transforms' own domain guards (1e-12)
_SLIT_GUARD = 1e-11
_DISC_GUARD = 1e-12


def _space(mu):
    return "T" if isinstance(mu, CircleMeasure) else "Rplus"


def _check_probe(mu, z):
    if not np.isfinite(z):
        raise DomainError("nonfinite probe")
    if isinstance(mu, CircleMeasure):
        if abs(z) >= 1.0 - _DISC_GUARD:
            raise DomainError("probe outside the open unit disc")
    elif abs(z.imag) <= _SLIT_GUARD and z.real > -_SLIT_GUARD:
        raise DomainError("probe on the excluded ray [0, infinity)")


def _u_origin(mu):
    m1 = complex(mu.mean())
    if abs(m1) < 1e-12:
        raise DomainError("mean vanishes; the subordination seed at 0 is undefined")
    return -np.log(m1)


# ----------------------------------------------------------------------
# the subordination equation
# ----------------------------------------------------------------------


def _phi(mu, t, w):
    """Phi_t(w) = w exp[(t-1) u(w)] with the branch-tracked u = log kappa."""
    return complex(w * np.exp((t - 1.0) * complex(log_kappa(mu, w))))


def _phi_ratio(mu, t, w):
    """Phi_t'/Phi_t = t/w - (t-1) eta'/eta; log derivative, so branch-free."""
    ev = complex(mu.eta(w))
    ep = complex(mu.eta_prime(w))
    return t / w - (t - 1.0) * ep / ev


def _feasible(mu, w):
    if w == 0 or not np.isfinite(w):
        return False
    if isinstance(mu, CircleMeasure):
        return abs(w) < 1.0 - _DISC_GUARD
    return not (abs(w.imag) <= _SLIT_GUARD and w.real > -_SLIT_GUARD)


def _image_ok(mu, z_k, phi_val):
    # damping keeps the Phi image in the probe's half of the plane
    # (inside the disc on the circle); leaving it means the wrong branch
    if isinstance(mu, CircleMeasure):
        return abs(phi_val) < 1.0
    if abs(z_k.imag) <= 1e-12 * abs(z_k):
        return True
    return phi_val.imag * z_k.imag > 0.0


def _admissible_z(space, z, w):
    """Domain inequalities selecting the principal subordination branch."""
    if space == "T":
        return abs(w) <= abs(z) * (1.0 + 1e-9)
    if abs(z.imag) <= 1e-12 * abs(z):
        return w.real < 0.0 and abs(w.imag) <= 1e-8 * abs(w)
    if z.imag < 0.0:
        z, w = z.conjugate(), w.conjugate()
    return np.angle(w) >= np.angle(z) - 1e-9 and w.imag >= -1e-15 * abs(w)


def _admissible(mu, z, w):
    return _admissible_z(_space(mu), z, w)


def _newton(mu, t, z_k, w, itmax=60):
    """Damped Newton for Phi_t(w) = z_k from the given seed.

    Returns (root, residual, iterations, min_step) or None on a stall.
    """
    try:
        f = _phi(mu, t, w) - z_k
    except FreemultError:
        return None
    tol = 1e-12 * max(1.0, abs(z_k))
    min_step = 1.0
    done = 0
    for done in range(1, itmax + 1):
        if abs(f) <= tol:
            return w, abs(f), done - 1, min_step
        try:
            deriv = (f + z_k) * _phi_ratio(mu, t, w)
        except FreemultError:
            return None
        if deriv == 0 or not np.isfinite(deriv):
            return None
        dw = f / deriv
        step = 1.0
        moved = False
        while step > 2.0 ** -40:
            cand = w - step * dw
            if _feasible(mu, cand):
                try:
                    fc = _phi(mu, t, cand) - z_k
                except FreemultError:
                    fc = None
                if fc is not None and abs(fc) < abs(f) and _image_ok(mu, z_k, fc + z_k):
                    w, f = cand, fc
                    min_step = min(min_step, step)
                    moved = True
                    break
            step *= 0.5
        if not moved:
            break
    return (w, abs(f), done, min_step) if abs(f) <= RESIDUAL_TOL else None


def _rungs(mu, t, z, factor):
    """Probe ladder from small modulus out to z along its ray.

    Equal log spacing under the factor cap; stall recovery re-enters with
    the square root of the factor, densifying the same ladder.
    """
    base = min(abs(z), LADDER_BASE, 0.5 * abs(complex(mu.mean())) ** (t - 1.0))
    m = abs(z)
    if m <= base or base == 0.0:
        return [z]
    n = int(np.ceil(np.log(m / base) / np.log(factor)))
    radii = base * (m / base) ** (np.arange(n + 1) / n)
    return list(radii / m * z)


def _continue_to(mu, t, z, depth=0):
    """Path-follow the root from the origin seed; raises ContinuationError."""
    u0 = _u_origin(mu)
    rungs = _rungs(mu, t, z, LADDER_RATIO ** (0.5 ** depth))
    w = rungs[0] * np.exp(-(t - 1.0) * u0)
    if not _feasible(mu, w):
        w = 0.5 * rungs[0]
    total, min_step, sol = 0, 1.0, None
    for z_k in rungs:
        sol = _newton(mu, t, z_k, w)
        if sol is None:
            if depth >= 3:
                raise ContinuationError(
                    f"subordination path to z = {z:.6g} stalled at |z| = {abs(z_k):.3e}"
                )
            return _continue_to(mu, t, z, depth + 1)
        w = sol[0]
        total += sol[2]
        min_step = min(min_step, sol[3])
    return w, sol[1], total, min_step


def _certified(mu, t, z):
    sol = _continue_to(mu, t, z)
    if not _admissible(mu, z, sol[0]):
        raise ContinuationError(
            f"root {sol[0]:.6g} at z = {z:.6g} violates the subordination domain bounds"
        )
    return sol


def _second_root(mu, t, z, w):
    # the circle equation has t-fold branch structure; rotated and scaled
    # reseeds hunt for admissible roots other than the continued one
    seeds = [w * np.exp(2j * np.pi / t), w * np.exp(-2j * np.pi / t), 0.6 * w, 1.4 * w]
    for seed in seeds:
        seed = complex(seed)
        if abs(seed - w) <= 1e-8 * abs(w) or not _feasible(mu, seed):
            continue
        sol = _newton(mu, t, z, seed)
        if sol is None:
            continue
        root = sol[0]
        if abs(root - w) > 1e-6 * max(abs(w), 1e-30) and _admissible(mu, z, root):
            return root
    return None


def solve_omega(mu, rep, t, z, check_unique=True):
    """omega_t(z): the root of Phi_t(w) = z continued from the origin.

    `rep` is accepted for call-site symmetry with the pipeline stages; the
    solve itself uses exact transforms of mu only, which is what keeps
    the oracle independent of the extraction stage.  The returned root is
    certified by the residual bound and by the domain inequalities.  With
    check_unique, perturbed reseeds hunt for a second admissible root;
    finding one emits NonUniqueWarning and keeps the continued root.
    """
    t = float(t)
    if t < 1.0:
        raise ValueError("power index must be at least 1")
    z = complex(z)
    _check_probe(mu, z)
    if z == 0.0:
        return 0j
    if t == 1.0:
        return z
    w = _certified(mu, t, z)[0]
    if check_unique:
        other = _second_root(mu, t, z, w)
        if other is not None:
            warnings.warn(
                f"second admissible root {other:.6g} besides {w:.6g} at z = {z:.6g}; "
                "keeping the branch continued from the origin",
                NonUniqueWarning,
                stacklevel=2,
            )
    return w


# ----------------------------------------------------------------------
# probe sets and diagnostics
# ----------------------------------------------------------------------


def _omega_grid(mu, t, zs, collect=None):
    """omega_t over an array of probes, warm-seeded in the given order.

    Falls back to a cold continuation whenever the warm seed stalls or
    lands on an inadmissible branch.  `collect`, when given, receives one
    (z, omega, residual, iterations, min_step) tuple per probe.
    """
    zf = np.ravel(np.asarray(zs, dtype=complex))
    out = np.empty(zf.shape, dtype=complex)
    prev = None
    for i, zv in enumerate(zf):
        zv = complex(zv)
        _check_probe(mu, zv)
        if zv == 0.0 or t == 1.0:
            out[i] = sol_w = 0j if zv == 0.0 else zv
            if collect is not None:
                collect.append((zv, sol_w, 0.0, 0, 1.0))
            prev = None if zv == 0.0 else (zv, zv)
            continue
        sol = None
        if prev is not None:
            zp, wp = prev
            seed = wp * (zv / zp)
            if _feasible(mu, seed):
                sol = _newton(mu, t, zv, seed)
                if sol is not None and not _admissible(mu, zv, sol[0]):
                    sol = None
        if sol is None:
            sol = _certified(mu, t, zv)
        out[i] = sol[0]
        if collect is not None:
            collect.append((zv, sol[0], sol[1], sol[2], sol[3]))
        prev = (zv, sol[0])
    return out.reshape(np.shape(zs))


def _lipschitz_margin(t, zs, ws):
    """min over consecutive pairs of |dlog omega| - |dlog z| / (2(t+1)).

    The subordination map expands log-coordinate distances by at least
    1/(2(t+1)); a negative margin flags a continuation jump.  Meaningful
    only when the probes form a path (a ray or a ring).
    """
    margin = np.inf
    for a, b, wa, wb in zip(zs[:-1], zs[1:], ws[:-1], ws[1:]):
        if 0 in (a, b, wa, wb):
            continue
        dz = abs(np.log(b / a))
        dw = abs(np.log(wb / wa))
        margin = min(margin, dw - dz / (2.0 * (t + 1.0)))
    return None if np.isinf(margin) else float(margin)


@dataclasses.dataclass(frozen=True, eq=False)
class OracleTrace:
    """Subordination diagnostics over a probe set.

    Construction re-checks the certificates: residuals at RESIDUAL_TOL
    and the domain inequalities per probe.  Density fields are filled
    when the trace comes out of oracle_density.
    """

    t: float
    space: str
    probes: np.ndarray
    omegas: np.ndarray
    residuals: np.ndarray
    iterations: np.ndarray
    min_steps: np.ndarray
    density_locations: np.ndarray | None = None
    density_values: np.ndarray | None = None
    lipschitz_margin: float | None = None

    def __post_init__(self):
        if np.any(self.residuals > RESIDUAL_TOL):
            raise ContinuationError("trace holds an uncertified residual")
        for zv, wv in zip(self.probes, self.omegas):
            if zv != 0 and not _admissible_z(self.space, complex(zv), complex(wv)):
                raise ContinuationError(
                    f"trace violates the domain inequalities at z = {complex(zv):.6g}"
                )

    def to_csv(self):
        buf = io.StringIO()
        buf.write("probe_re,probe_im,omega_re,omega_im,residual,iterations\n")
        for zv, wv, res, it in zip(self.probes, self.omegas, self.residuals, self.iterations):
            buf.write(
                f"{zv.real:.17g},{zv.imag:.17g},{wv.real:.17g},{wv.imag:.17g},"
                f"{res:.17g},{int(it)}\n"
            )
        return buf.getvalue()


def oracle_trace(mu, rep, t, probes):
    """Solve across `probes` in order and collect an OracleTrace."""
    t = float(t)
    if t < 1.0:
        raise ValueError("power index must be at least 1")
    zs = np.ravel(np.asarray(probes, dtype=complex))
    recs = []
    _omega_grid(mu, t, zs, collect=recs)
    omegas = np.array([r[1] for r in recs], dtype=complex)
    residuals = np.array([r[2] for r in recs])
    margin = _lipschitz_margin(t, zs, omegas)
    log.debug(
        "subordination trace: %d probes, worst residual %.3e, lipschitz margin %s",
        zs.size,
        float(residuals.max(initial=0.0)),
        "n/a" if margin is None else f"{margin:.3e}",
    )
    return OracleTrace(
        t=t,
        space=_space(mu),
        probes=zs,
        omegas=omegas,
        residuals=residuals,
        iterations=np.array([r[3] for r in recs], dtype=int),
        min_steps=np.array([r[4] for r in recs]),
        lipschitz_margin=margin,
    )


# ----------------------------------------------------------------------
# densities and the sigma multiplicativity check
# ----------------------------------------------------------------------


def oracle_density(mu, rep, t, grid, smoothing=None, trace=False):
    """Density of the power measure on `grid` via the composed transform.

    Half-line: `grid` holds original-variable points x > 0 and
    `smoothing` is the imaginary offset eps (default 1e-6) of the
    Stieltjes inversion.  Circle: `grid` holds angles of the power
    measure and `smoothing` is the Poisson radius (default 1 - 1e-4).
    Either way the samples follow the PowerResult variable convention,
    Richardson-corrected in the smoothing parameter; values near atom
    images show the smeared point mass rather than the ac density.

    With trace=True returns (values, OracleTrace) where the trace holds
    the probe diagnostics of the fine inversion pass.
    """
    t = float(t)
    if t < 1.0:
        raise ValueError("power index must be at least 1")
    recs = [] if trace else None

    def eta_fn(zz, _c=None):
        return mu.eta(_omega_grid(mu, t, zz, collect=_c))

    if isinstance(mu, CircleMeasure):
        beta = np.asarray(grid, dtype=float)
        r = 1.0 - 1e-4 if smoothing is None else float(smoothing)
        if not 0.0 < r < 1.0:
            raise DomainError("circle smoothing must be a radius in (0, 1)")
        th = -beta
        coarse = invert_poisson(lambda zz: eta_fn(zz), th, r)
        fine = invert_poisson(lambda zz: eta_fn(zz, recs), th, 1.0 - 0.5 * (1.0 - r))
        vals = 2.0 * fine - coarse
        locs = beta
    else:
        x = np.asarray(grid, dtype=float)
        if x.size == 0 or np.any(x <= 0):
            raise DomainError("half-line grid must hold positive points")
        eps = 1e-6 if smoothing is None else float(smoothing)
        if eps <= 0:
            raise DomainError("half-line smoothing must be a positive offset")
        xg = 1.0 / x
        coarse = invert_stieltjes(lambda zz: eta_fn(zz), xg, eps)
        fine = invert_stieltjes(lambda zz: eta_fn(zz, recs), xg, 0.5 * eps)
        # invert_stieltjes returns the reciprocal-variable density at 1/x;
        # the original-variable density needs the Jacobian once more
        vals = (2.0 * fine - coarse) / (x * x)
        locs = x
    if not trace:
        return vals
    zs = np.array([r_[0] for r_ in recs], dtype=complex)
    omegas = np.array([r_[1] for r_ in recs], dtype=complex)
    tr = OracleTrace(
        t=t,
        space=_space(mu),
        probes=zs,
        omegas=omegas,
        residuals=np.array([r_[2] for r_ in recs]),
        iterations=np.array([r_[3] for r_ in recs], dtype=int),
        min_steps=np.array([r_[4] for r_ in recs]),
        density_locations=locs,
        density_values=vals,
        lipschitz_margin=_lipschitz_margin(t, zs, omegas),
    )
    return vals, tr


def _invert_eta_power(mu, t, z, tol=1e-12, itmax=60):
    """Local inverse of eta_mu o omega_t at z by damped Newton."""
    m1 = complex(mu.mean())
    if abs(m1) < 1e-12:
        raise InversionError("mean vanishes; eta has no local inverse at 0")
    y = z / m1 ** t
    if not _feasible(mu, y):
        raise InversionError("probe outside the local-inversion neighborhood")
    state = [None]

    def eta_t(yv):
        sol = None
        if state[0] is not None:
            yp, wp = state[0]
            seed = wp * (yv / yp)
            if _feasible(mu, seed):
                sol = _newton(mu, t, yv, seed)
        if sol is None:
            sol = _certified(mu, t, yv)
        state[0] = (yv, sol[0])
        return complex(mu.eta(sol[0])), sol[0]

    val, w = eta_t(y)
    r = val - z
    for _ in range(itmax):
        if abs(r) <= tol * max(1.0, abs(z)):
            return y
        ev = complex(mu.eta(w))
        ep = complex(mu.eta_prime(w))
        # chain rule through the subordination equation: omega' = 1/Phi'
        deta = ep / (y * (t / w - (t - 1.0) * ep / ev))
        if deta == 0 or not np.isfinite(deta):
            raise InversionError("degenerate derivative inverting the power eta")
        dy = r / deta
        step = 1.0
        for _ in range(40):
            cand = y - step * dy
            if _feasible(mu, cand):
                try:
                    vc, wc = eta_t(cand)
                except FreemultError:
                    vc = None
                if vc is not None and abs(vc - z) < abs(r):
                    y, r, w = cand, vc - z, wc
                    break
            step *= 0.5
        else:
            raise InversionError("Newton stalled inverting the power eta")
    raise InversionError("Newton budget exhausted inverting the power eta")


def sigma_power_check(mu, t, z_list):
    """Max |Sigma-power residual| over z_list: the multiplicativity check.

    The sigma-transform of the power measure is computed from the oracle
    side (local inversion of eta_mu o omega_t at z, divided by z) and
    compared against sigma_mu(z) ** t with the principal power, valid for
    probes near the origin.  delta_c gives 0 analytically; anything above
    solver tolerance indicates a wrong subordination branch.
    """
    t = float(t)
    if t < 1.0:
        raise ValueError("power index must be at least 1")
    worst = 0.0
    for zv in np.ravel(np.asarray(z_list, dtype=complex)):
        zv = complex(zv)
        _check_probe(mu, zv)
        if zv == 0.0:
            continue
        lhs = _invert_eta_power(mu, t, zv) / zv
        rhs = complex(mu.sigma(zv)) ** t
        worst = max(worst, abs(lhs - rhs))
    return worst
