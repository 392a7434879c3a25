"""Reference measures exercised by the tests, demos, and CLI examples.

Builders return fresh measure objects.  CORPUS_R and CORPUS_T pair a
short name with a zero-argument builder; SWEEP_R and SWEEP_T are the two
measures whose component counts are tracked across a t sweep.  The
rejected_two_atom_haar builder is deliberately outside the admissible
class (its eta-transform has a zero in the punctured disc) and exists so
tests can assert that membership screening catches it.
"""

import numpy as np

from .herglotz import HerglotzRep
from .measures import CircleMeasure, HalfLineMeasure, invert_poisson

TWO_PI = 2.0 * np.pi


# ----------------------------------------------------------------------
# half-line corpus
# ----------------------------------------------------------------------


def point_half(c):
    return HalfLineMeasure(atom_positions=[float(c)], atom_masses=[1.0])


def two_atom():
    return HalfLineMeasure(atom_positions=[1.0, 4.0], atom_masses=[0.5, 0.5])


def three_equal():
    return HalfLineMeasure(atom_positions=[1.0, 2.0, 3.0], atom_masses=[1 / 3, 1 / 3, 1 / 3])


def skewed_pair():
    return HalfLineMeasure(atom_positions=[1.0, 4.0], atom_masses=[0.8, 0.2])


def atom_uniform_heavy(n=257):
    """0.5 delta_2 + 0.5 U[1, 3]."""
    grid = np.linspace(1.0, 3.0, n)
    return HalfLineMeasure(
        atom_positions=[2.0],
        atom_masses=[0.5],
        grid=grid,
        values=np.full(n, 0.25),
    )


def atom_uniform_light(n=2001):
    """0.3 delta_1 + 0.7 U[0.5, 2]."""
    grid = np.linspace(0.5, 2.0, n)
    return HalfLineMeasure(
        atom_positions=[1.0],
        atom_masses=[0.3],
        grid=grid,
        values=np.full(n, 0.7 / 1.5),
    )


def sweep_cross():
    """Four well-separated equal atoms; the component-sweep workhorse."""
    return HalfLineMeasure(
        atom_positions=[0.1, 0.2, 5.0, 10.0],
        atom_masses=[0.25, 0.25, 0.25, 0.25],
    )


CORPUS_R = (
    ("point_0.5", lambda: point_half(0.5)),
    ("point_2", lambda: point_half(2.0)),
    ("two_atom", two_atom),
    ("three_equal", three_equal),
    ("skewed_pair", skewed_pair),
    ("atom_uniform_heavy", atom_uniform_heavy),
    ("atom_uniform_light", atom_uniform_light),
    ("sweep_cross", sweep_cross),
)

SWEEP_R = sweep_cross


# ----------------------------------------------------------------------
# circle corpus
# ----------------------------------------------------------------------


def point_circle(beta):
    return CircleMeasure(atom_angles=[float(beta)], atom_masses=[1.0])


def haar_mix(s, atom_angle=0.0, n=1024):
    """(1 - s) delta at the given angle plus s times Haar measure."""
    grid = np.linspace(-np.pi, np.pi, n, endpoint=False)
    return CircleMeasure(
        atom_angles=[float(atom_angle)],
        atom_masses=[1.0 - s],
        grid=grid,
        values=np.full(n, s / TWO_PI),
    )


CORPUS_T = (
    ("point_e0.7i", lambda: point_circle(0.7)),
    ("haar_mix_0.3", lambda: haar_mix(0.3)),
    ("haar_mix_0.5", lambda: haar_mix(0.5)),
    ("haar_mix_0.7", lambda: haar_mix(0.7)),
    ("haar_mix_0.2", lambda: haar_mix(0.2)),
    ("two_bump", lambda: two_bump_circle()),
)


def rejected_two_atom_haar():
    """0.4 delta_{e^{2i}} + 0.4 delta_{e^{-2i}} + 0.2 Haar.

    The Haar block contributes nothing to psi, so eta inherits the zero
    of the two-atom part inside the punctured disc and the measure fails
    the circle-class membership check.  Kept as a negative example.
    """
    n = 1024
    grid = np.linspace(-np.pi, np.pi, n, endpoint=False)
    return CircleMeasure(
        atom_angles=[2.0, -2.0],
        atom_masses=[0.4, 0.4],
        grid=grid,
        values=np.full(n, 0.2 / TWO_PI),
    )


def two_bump_circle(n=2048, radius=1.0 - 1e-3):
    """Circle-class measure with two separated density bumps and one
    dominant atom; the circle component-sweep workhorse.

    Built from the Herglotz side so membership holds by construction:
    rho is a pair of compactly supported bumps at +-1.8 rad (total mass
    0.8), eta = z exp(-u) is therefore zero-free, and the measure is
    recovered by Poisson inversion.  The atom at angle 0 has mass
    1/eta'(1) by the angular-derivative formula; its Poisson kernel is
    subtracted from the inverted density before renormalizing.

    The bump edges stop short of both 0 and pi, leaving two genuine
    gaps that close one after the other as t grows.
    """
    phi = np.linspace(-np.pi, np.pi, 4096, endpoint=False)

    def bump(x, center, width=0.5, cut=1.1):
        d = x - center
        return np.where(np.abs(d) < cut, np.exp(-0.5 * (d / width) ** 2), 0.0)

    rho = bump(phi, 1.8) + bump(phi, -1.8)
    rho *= 0.8 / (np.sum(rho) * (phi[1] - phi[0]))
    rep = HerglotzRep(alpha=0.0, grid=phi, values=rho, total_mass=0.8)

    # angular derivative at the fixed direction: eta'(1) = 1 + I with
    # I = integral of rho / (2 sin^2(phi/2)); the bumps vanish near 0 so
    # the integrand is bounded (0/0 at phi = 0 is a true zero)
    half_sin = 2.0 * np.sin(phi / 2.0) ** 2
    integrand = np.divide(rho, half_sin, out=np.zeros_like(rho), where=rho > 0)
    atom_mass = 1.0 / (1.0 + np.sum(integrand) * (phi[1] - phi[0]))

    def eta_fn(z):
        return z * np.exp(-rep.eval(z))

    beta = np.linspace(-np.pi, np.pi, n, endpoint=False)
    smeared = invert_poisson(eta_fn, -beta, radius)
    kernel = (1.0 - radius ** 2) / (TWO_PI * (1.0 - 2.0 * radius * np.cos(beta) + radius ** 2))
    dens = np.maximum(smeared - atom_mass * kernel, 0.0)
    # the true density is positive exactly where rho is (|eta| = 1 on the
    # complementary arcs), so everything outside the mirrored bump arcs
    # is Poisson smearing and must go back to an exact zero, or it would
    # regenerate a spurious rho background after re-extraction
    dens[np.abs(np.abs(beta) - 1.8) > 1.12] = 0.0
    dens *= (1.0 - atom_mass) / (np.sum(dens) * (beta[1] - beta[0]))
    return CircleMeasure(
        atom_angles=[0.0],
        atom_masses=[atom_mass],
        grid=beta,
        values=dens,
    )


SWEEP_T = two_bump_circle
