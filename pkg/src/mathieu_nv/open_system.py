"""Dissipative spin dynamics: a Markovian dephasing channel and an N-reservoir bath."""

from dataclasses import dataclass

import numpy as np

from .dynamics import DensityMatrix
from .errors import StepTooLarge, UnnormalizedInput


@dataclass(frozen=True)
class LindbladParams:
    gamma: float
    b: float
    c: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")

    @property
    def kappa(self):
        return float(np.hypot(self.b, self.c))


def lindblad_generator(p):
    """Linear generator acting on (rho11, rho12, rho21, rho22)."""
    g, b, c = p.gamma, p.b, p.c
    ic = 1j * c
    return np.array([
        [-g, ic, -ic, 0],
        [ic, -g / 2 - 2j * b, 0, -ic],
        [-ic, 0, -g / 2 + 2j * b, ic],
        [g, -ic, ic, 0],
    ], dtype=complex)


def max_step(p):
    return min(0.01 / max(p.kappa, 1e-9), 0.01 / max(p.gamma, 1e-9))


def _rk4_propagator(L, h):
    # one classical RK4 step of a linear system is this fixed matrix
    A = h * L
    A2 = A @ A
    A3 = A2 @ A
    return np.eye(4) + A + A2 / 2 + A3 / 6 + A3 @ A / 24


def lindblad_integrate(p, t, step=None):
    """RK4 solution on the increasing grid t, starting from diag(1, 0).

    Returns an array of shape (len(t), 2, 2).  The default internal step is a
    quarter of the stability bound; steps above the bound raise StepTooLarge.
    """
    t = np.asarray(t, dtype=float)
    bound = max_step(p)
    if step is None:
        step = 0.25 * bound
    elif step > bound * (1 + 1e-12):
        raise StepTooLarge(f"step {step:g} exceeds bound {bound:g}")
    L = lindblad_generator(p)
    y = np.array([1, 0, 0, 0], dtype=complex)
    out = np.empty((len(t), 4), dtype=complex)
    cache = {}
    t_prev = 0.0
    for i, ti in enumerate(t):
        dt = ti - t_prev
        if dt < 0:
            raise ValueError("time grid must be increasing and start at t >= 0")
        if dt > 0:
            nsteps = int(np.ceil(dt / step - 1e-9))
            key = (round(dt, 12), nsteps)
            if key not in cache:
                cache[key] = np.linalg.matrix_power(_rk4_propagator(L, dt / nsteps), nsteps)
            y = cache[key] @ y
        out[i] = y
        t_prev = ti
    return out.reshape(len(t), 2, 2)


def lindblad_closed_form(p, t):
    """Exponentially damped approximate solution with shape (..., 2, 2).

    Its coherence uses the opposite phase convention to lindblad_integrate.
    """
    b, c, g = p.b, p.c, p.gamma
    t = np.asarray(t, dtype=float)
    k2 = b * b + c * c
    k = np.sqrt(k2)
    decay = np.exp(-g * t)
    r11 = (b * b + c * c * np.cos(k * t) ** 2) / k2 * decay
    r12 = c * (b - b * np.cos(2 * k * t) - 1j * k * np.sin(2 * k * t)) / (2 * k2) * np.exp(-g * t / 2)
    r22 = 1 + (c * c * np.sin(k * t) ** 2 / k2 - 1) * decay
    rho = np.empty(t.shape + (2, 2), dtype=complex)
    rho[..., 0, 0] = r11
    rho[..., 0, 1] = r12
    rho[..., 1, 0] = np.conj(r12)
    rho[..., 1, 1] = r22
    return rho


def lindblad_purity_formula(p, t):
    b, c, g = p.b, p.c, p.gamma
    t = np.asarray(t, dtype=float)
    k2 = b * b + c * c
    k = np.sqrt(k2)
    eg = np.exp(g * t)
    A = 8 * b * b * k2 + 3 * c**4
    num = (A - A * eg + 4 * k2 * k2 * eg**2
           + c * c * (-1 + eg) * (-4 * (b * b + k2) * np.cos(2 * k * t) - c * c * np.cos(4 * k * t)))
    return num / (4 * k2 * k2) * np.exp(-2 * g * t)


def purity(rho):
    rho = np.asarray(rho)
    return np.real(np.einsum("...ij,...ji->...", rho, rho))


def spin_entropy(rho):
    """Base-2 von Neumann entropy for a stack of qubit states."""
    w = np.clip(np.linalg.eigvalsh(np.asarray(rho)), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, -w * np.log2(np.where(w > 0, w, 1.0)), 0.0)
    return np.abs(terms.sum(axis=-1))


@dataclass(frozen=True)
class ReservoirParams:
    N: int
    tau: float
    g: float
    delta: float

    def __post_init__(self):
        if self.N < 1 or self.tau < 0 or self.g < 0:
            raise ValueError("need N >= 1, tau >= 0, g >= 0")

    @property
    def s(self):
        return complex(self.tau, -self.delta)

    @property
    def kappa_x(self):
        # principal root: real part >= 0
        return complex(np.sqrt(self.s**2 - 2 * self.N * self.g * self.tau))

    @property
    def kappa_parts(self):
        """(kappa', kappa'', kappa1, kappa2) with kappa'' = -Im kappa_x."""
        kx = self.kappa_x
        kp, kpp = kx.real, -kx.imag
        return kp, kpp, self.tau * kp + self.delta * kpp, self.delta * kp - self.tau * kpp


_KAPPA_EPS = 1e-12


def bath_c1(p, c1_0, t):
    t = np.asarray(t, dtype=float)
    s, kx = p.s, p.kappa_x
    env = c1_0 * np.exp(-s * t / 2)
    if abs(kx) < _KAPPA_EPS:
        return env * (1 + s * t / 2)
    x = kx * t / 2
    return env * (np.cosh(x) + s / kx * np.sinh(x))


def bath_c1_dot(p, c1_0, t):
    t = np.asarray(t, dtype=float)
    s, kx = p.s, p.kappa_x
    gain = p.N * p.g * p.tau
    env = c1_0 * np.exp(-s * t / 2)
    if abs(kx) < _KAPPA_EPS:
        return -env * gain * t / 2
    return -env * np.sinh(kx * t / 2) * gain / kx


def bath_c1_abs2_expanded(p, c1_0, t):
    """|c1|^2 from the real cosh/sinh expansion."""
    t = np.asarray(t, dtype=float)
    kp, kpp, k1, k2 = p.kappa_parts
    K = kp * kp + kpp * kpp
    ch, sh = np.cosh(kp * t / 2), np.sinh(kp * t / 2)
    co, si = np.cos(kpp * t / 2), np.sin(kpp * t / 2)
    X = ch * co + k1 / K * sh * co - k2 / K * ch * si
    Y = sh * si + k1 / K * ch * si + k2 / K * sh * co
    return abs(c1_0) ** 2 * np.exp(-p.tau * t) * (X * X + Y * Y)


def bath_F(p, t, c1_0=1.0):
    """d|c1|/dt from the complex closed form (zero where c1 vanishes)."""
    c1 = bath_c1(p, c1_0, t)
    dc = bath_c1_dot(p, c1_0, t)
    mag = np.abs(c1)
    num = np.real(np.conj(c1) * dc)
    return np.divide(num, mag, out=np.zeros_like(mag), where=mag > 0)


def bath_F_expanded(p, t, c1_0=1.0):
    """d|c1|/dt from the real expansion, differentiated term by term."""
    t = np.asarray(t, dtype=float)
    kp, kpp, k1, k2 = p.kappa_parts
    K = kp * kp + kpp * kpp
    a1, a2 = k1 / K, k2 / K
    ch, sh = np.cosh(kp * t / 2), np.sinh(kp * t / 2)
    co, si = np.cos(kpp * t / 2), np.sin(kpp * t / 2)
    X = ch * co + a1 * sh * co - a2 * ch * si
    Y = sh * si + a1 * ch * si + a2 * sh * co
    dX = kp / 2 * (sh * co + a1 * ch * co - a2 * sh * si) \
        + kpp / 2 * (-ch * si - a1 * sh * si - a2 * ch * co)
    dY = kp / 2 * (ch * si + a1 * sh * si + a2 * ch * co) \
        + kpp / 2 * (sh * co + a1 * ch * co - a2 * sh * si)
    c0sq = abs(c1_0) ** 2
    mag = np.sqrt(c0sq * np.exp(-p.tau * t) * (X * X + Y * Y))
    corr = c0sq * np.exp(-p.tau * t) * (X * dX + Y * dY)
    return -p.tau / 2 * mag + np.divide(corr, mag, out=np.zeros_like(mag), where=mag > 0)


def _check_norm(c0_0, c1_0):
    if abs(abs(c0_0) ** 2 + abs(c1_0) ** 2 - 1) > 1e-12:
        raise UnnormalizedInput("|c0|^2 + |c1|^2 must equal 1")


def bath_rho(p, c0_0, c1_0, t):
    _check_norm(c0_0, c1_0)
    c1 = complex(bath_c1(p, c1_0, float(t)))
    x = abs(c1) ** 2
    off = c0_0 * np.conj(c1)
    return DensityMatrix(np.array([[1 - x, off], [np.conj(off), x]], dtype=complex))


def bath_purity(p, c0_0, c1_0, t):
    _check_norm(c0_0, c1_0)
    x = np.abs(bath_c1(p, c1_0, t)) ** 2
    return 1 + 2 * x * (x + abs(c0_0) ** 2 - 1)


def critical_reservoirs(tau, g, delta, t_max=50.0, dt=0.01, n_max=200):
    """floor(tau/2g + 1) on resonance; otherwise the last N of the Markovian run by scan."""
    if g <= 0:
        raise ValueError("g must be positive")
    if delta == 0:
        return int(np.floor(tau / (2 * g) + 1))
    t = np.arange(1, int(round(t_max / dt)) + 1) * dt
    last = 0
    for N in range(1, n_max + 1):
        if bath_F(ReservoirParams(N, tau, g, delta), t).max() > 0:
            break
        last = N
    return last


def max_F(N, tau, g, delta, t_max=50.0, dt=0.01):
    t = np.arange(1, int(round(t_max / dt)) + 1) * dt
    return float(bath_F(ReservoirParams(N, tau, g, delta), t).max())


def revival_time(t, purity_values, level=0.95):
    """First time after the purity minimum at which purity climbs back to `level`."""
    t = np.asarray(t)
    pv = np.asarray(purity_values)
    i0 = int(np.argmin(pv))
    hits = np.flatnonzero(pv[i0:] >= level)
    return float(t[i0 + hits[0]]) if len(hits) else float("inf")
