"""Cantilever-to-pendulum parameter map and classical pendulum orbits."""

from dataclasses import dataclass

import numpy as np

from .errors import NoResonantAction, SeparatrixEnergy

AGM_TOL = 1e-14


@dataclass(frozen=True)
class CantileverParams:
    m: float
    omega_r: float
    beta: float
    mu: float
    V0: float
    omega: float
    g: float
    omega_R: float
    delta_spin: float

    def __post_init__(self):
        if self.m <= 0 or self.omega_r <= 0:
            raise ValueError("mass and oscillator frequency must be positive")

    @property
    def alpha(self):
        # tan(alpha) = -omega_R / delta on the branch (-pi/2, pi/2]
        if self.delta_spin == 0:
            return np.pi / 2
        return float(np.arctan(-self.omega_R / self.delta_spin))

    @property
    def omega0(self):
        return float(np.hypot(self.omega_R, self.delta_spin))


@dataclass(frozen=True)
class PendulumParams:
    I0: float
    omega_p: float
    U: float
    l: float
    Q: float


@dataclass(frozen=True)
class ClassicalOrbit:
    E: float
    U: float
    omega_p: float
    nu: float = 0.0

    @property
    def k(self):
        return float(np.sqrt(2 * self.U / (self.E + self.U)))


def nonlinear_slope(p):
    return 6 * np.pi * p.mu / (p.m**2 * p.omega_r**2)


def map_to_pendulum(p):
    slope = nonlinear_slope(p)
    if slope == 0:
        raise NoResonantAction("mu = 0: the resonance condition has no action dependence")
    I0 = (p.omega - p.omega_r) / slope
    if not I0 > 0:
        raise NoResonantAction(f"resonant action I0 = {I0:g} is not positive")
    scale = np.sqrt(I0 / (p.m * p.omega_r))
    U = p.V0 * scale
    return PendulumParams(I0=I0, omega_p=slope, U=U, l=8 * U / slope, Q=p.g * scale)


def nonlinearity_criterion(I, p, eps=0.1):
    """Return (A, moderate) with A = |I/Omega dOmega/dI| and moderate = eps < A < 1/eps."""
    slope = nonlinear_slope(p)
    A = abs(I * slope / (p.omega_r + slope * I))
    return A, bool(eps < A < 1 / eps)


def _agm_ladder(m):
    a, b, c = [1.0], [np.sqrt(1.0 - m)], [np.sqrt(m)]
    while abs(c[-1]) > AGM_TOL and len(a) < 64:
        a.append(0.5 * (a[-1] + b[-1]))
        b.append(np.sqrt(a[-2] * b[-1]))
        c.append(0.5 * (a[-2] - b[-2]))
    return a, c


def ellipk(m):
    """Complete elliptic integral K(m), parameter m = k^2 < 1."""
    a, _ = _agm_ladder(m)
    return np.pi / (2 * a[-1])


def ellipj(u, m):
    """Jacobi (sn, cn, dn) by the descending Landen / AGM scheme, 0 <= m <= 1."""
    u = np.asarray(u, dtype=float)
    if not 0 <= m <= 1:
        raise ValueError("parameter m must lie in [0, 1]")
    if m == 0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if m == 1:
        sech = 1 / np.cosh(u)
        return np.tanh(u), sech, sech
    a, c = _agm_ladder(m)
    N = len(a) - 1
    phi = (2.0**N) * a[N] * u
    for j in range(N, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] * np.sin(phi) / a[j]))
    sn, cn = np.sin(phi), np.cos(phi)
    # dn > 0 for m < 1; the cn / cos(phi_{j+1} - phi_j) ratio loses digits near cn = 0
    return sn, cn, np.sqrt(1.0 - m * sn * sn)


def classical_orbit(orbit, t, guard=1e-12):
    """Action deviation on a rotation (E > U, dn) or libration (E < U, cn) orbit."""
    E, U, w = orbit.E, orbit.U, orbit.omega_p
    if abs(E - U) <= guard * abs(U):
        raise SeparatrixEnergy("E = U lies on the separatrix; use instanton()")
    t = np.asarray(t, dtype=float)
    amp = np.sqrt((E + U) / w)
    m = 2 * U / (E + U)
    if E > U:
        return amp * ellipj(w * amp * t, m)[2]
    # libration: modulus 1/k, argument k * omega' * amp * t = sqrt(2 U omega') t
    return amp * ellipj(np.sqrt(2 * U * w) * t, 1 / m)[1]


def orbit_period(orbit):
    """Period in t of the rotation-branch action oscillation."""
    E, U, w = orbit.E, orbit.U, orbit.omega_p
    return 2 * ellipk(2 * U / (E + U)) / np.sqrt(w * (E + U))


def instanton(U, omega_p, t):
    t = np.asarray(t, dtype=float)
    return np.sqrt(2 * U / omega_p) / np.cosh(np.sqrt(2 * U * omega_p) * t)


def tangle_width(E, U, omega_p, nu):
    """(lhs, bound, satisfied) for the homoclinic tangle width estimate."""
    lhs = abs(E - U / omega_p) / U
    bound = float(np.exp(-np.pi * nu * np.sqrt(omega_p) / np.sqrt(U)))
    return lhs, bound, bool(lhs <= bound)
