"""Coherence generated by a sudden Zeeman quench from a mixed G0 state.

The pre-quench state is p1 |phi1><phi1| + p2 |phi2><phi2| in the eigenbasis of
the G0 Hamiltonian; the quench adds dw0 * sigma_z.  Everything is returned in
the eigenbasis {psi1, psi2} of the quenched Hamiltonian.  Logs are natural.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import NonOrthonormalBasis, SingularLambda
from .hamiltonians import DEFAULT_ALPHA
from .mathieu_core import Parity, mode, overlap_cos2

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuenchSpec:
    p1: float
    p2: float
    dw0: float
    omega0: float
    alpha: float
    Q: float
    n: int
    l: float
    E1: float
    E2: float
    alpha1: float
    beta1: float
    lam: float
    J: float
    Y: float
    L: float
    zeta1: float
    zeta2: float
    theta: float
    EH1: float
    EH2: float

    @property
    def omega12(self):
        return self.EH1 - self.EH2

    @property
    def hamiltonian(self):
        """Quenched Hamiltonian in the pre-quench eigenbasis {phi1, phi2}."""
        return np.array([[self.E1 + self.J, self.Y], [self.Y, self.E2 - self.J]])

    def nu(self, t):
        """Eigenvector coefficients (nu1, nu2) of rho(t) in the psi basis."""
        tn = np.tan(self.theta)
        norm = np.sqrt(tn * tn + 1)
        return -tn * np.exp(-1j * self.omega12 * t) / norm, 1 / norm


def _weights(p1, p2):
    if min(p1, p2) < 0 or abs(p1 + p2 - 1) > 1e-12:
        raise ValueError("p1, p2 must be non-negative and sum to 1")


def _spin_vector(b, c, strict):
    """(alpha1, beta1, lambda) for the upper eigenvector beta1|0> + alpha1|1>."""
    k = np.hypot(b, c)
    if c == 0:
        if strict:
            raise SingularLambda("c = 0 makes lambda infinite")
        return (0.0, 1.0, np.inf) if b >= 0 else (1.0, 0.0, 0.0)
    # b + kappa without cancellation when b < 0
    s = b + k if b >= 0 else c * c / (k - b)
    norm = np.hypot(s, c)
    return abs(c) / norm, np.sign(c) * s / norm, s / c


def quench_from_coefficients(a0, b, c, p1, p2, dw0, strict=False, **inputs):
    """Quench eigensystem from the G0 coefficients (a, b, c)."""
    _weights(p1, p2)
    k = np.hypot(b, c)
    E1, E2 = a0 + k, a0 - k
    al1, be1, lam = _spin_vector(b, c, strict)
    J = -dw0 * (al1**2 - be1**2)
    Y = -2 * dw0 * al1 * be1
    D = E1 - E2 + 2 * J
    R = np.hypot(2 * Y, D)
    if Y == 0:
        L, z1, z2 = np.inf, 1.0, 0.0
    else:
        # D + R loses precision for D < 0; use 4Y^2 / (R - D) instead
        num = D + R if D >= 0 else 4 * Y * Y / (R - D)
        with np.errstate(over="ignore"):
            L = num / (2 * Y)  # inf for subnormal Y, like the Y = 0 branch
        h = np.hypot(num, 2 * Y)
        z1, z2 = np.sign(Y) * num / h, abs(2 * Y) / h
    mid = (E1 + E2) / 2
    defaults = dict(omega0=np.nan, alpha=np.nan, Q=np.nan, n=-1, l=np.nan)
    defaults.update(inputs)
    f = float
    return QuenchSpec(p1=f(p1), p2=f(p2), dw0=f(dw0), E1=f(E1), E2=f(E2), alpha1=f(al1),
                      beta1=f(be1), lam=f(lam), J=f(J), Y=f(Y), L=f(L), zeta1=f(z1),
                      zeta2=f(z2), theta=f(np.arctan2(z1, z2)), EH1=f(mid + R / 2),
                      EH2=f(mid - R / 2), **defaults)


def quench_eigensystem(p1, p2, dw0, omega0, alpha, Q, n, l, strict=False):
    md = mode(Parity.CE, n, l)
    e = overlap_cos2(md, md)
    b = omega0 / 2 + Q / 2 * e * np.cos(alpha)
    c = Q / 2 * e * np.sin(alpha)
    return quench_from_coefficients(md.characteristic, b, c, p1, p2, dw0, strict=strict,
                                    omega0=omega0, alpha=alpha, Q=Q, n=n, l=l)


def rho_quench(spec, t):
    """Propagated state in the {psi1, psi2} basis."""
    p1, p2, z1, z2 = spec.p1, spec.p2, spec.zeta1, spec.zeta2
    off = np.exp(-1j * spec.omega12 * t) * z1 * z2 * (p1 - p2)
    return np.array([[p1 * z1**2 + p2 * z2**2, off],
                     [np.conj(off), p1 * z2**2 + p2 * z1**2]], dtype=complex)


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def coherence_relative_entropy(spec):
    s2 = np.sin(spec.theta) ** 2
    c2 = np.cos(spec.theta) ** 2
    p1, p2 = spec.p1, spec.p2
    if p1 == p2:
        return 0.0
    w1 = p1 * s2 + p2 * c2
    w2 = p1 * c2 + p2 * s2
    # non-negative by concavity; clip rounding noise
    return max(0.0, float(_xlogx(p1) + _xlogx(p2) - _xlogx(w1) - _xlogx(w2)))


def _entropy(rho):
    w = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    return float(-_xlogx(w).sum())


def coherence_generic(rho, basis=None):
    """S(rho_d) - S(rho) with rho_d the diagonal part in `basis` (columns)."""
    rho = np.asarray(rho, dtype=complex)
    if basis is not None:
        B = np.asarray(basis, dtype=complex)
        if np.abs(B.conj().T @ B - np.eye(B.shape[1])).max() > 1e-10:
            raise NonOrthonormalBasis("basis columns are not orthonormal")
        rho = B.conj().T @ rho @ B
    diag = np.clip(np.real(np.diag(rho)), 0.0, None)
    return max(0.0, float(-_xlogx(diag).sum()) - _entropy(rho))


def purity_bound_check(rho):
    rho = np.asarray(rho, dtype=complex)
    C = coherence_generic(rho)
    P = float(np.real(np.trace(rho @ rho)))
    bound = float(np.sqrt(max(2 * P - 1, 0.0)))
    return C, bound, bool(C <= bound + 1e-12)


def homoclinic_terms(n, l):
    """(a_{2n+1}/l, coefficient sum term, direct quadrature term) for order 2n+1."""
    if l <= 0:
        raise ValueError("barrier l must be positive")
    md = mode(Parity.CE, 2 * n + 1, l)
    A = md.coeffs
    lower = np.concatenate([[A[0]], A[:-1]])  # A_{-1} taken as A_1
    upper = np.concatenate([A[1:], [0.0]])
    series = 0.25 * float(np.sum(A * (upper + lower)))
    direct = 2 * overlap_cos2(md, md) / np.pi
    return md.characteristic / l, series, direct


def homoclinic_distance(n, l):
    head, series, direct = homoclinic_terms(n, l)
    if series != 0:
        log.debug("R_%d(l=%g): direct/series = %.12g", 2 * n + 1, l, direct / series)
    return head - series


def quench_sweep(n, ls, p1=0.9, p2=0.1, dw0=0.8, omega0=1.0, alpha=DEFAULT_ALPHA, Q=5.0):
    """Coherence and homoclinic distance over a barrier grid."""
    C = np.array([coherence_relative_entropy(
        quench_eigensystem(p1, p2, dw0, omega0, alpha, Q, n, l)) for l in ls])
    R = np.array([homoclinic_distance(n, l) for l in ls])
    return C, R


WINDOWS = {2: (0.3, 7.51), 3: (1.15, 13.93), 4: (3.18, 18.4)}
