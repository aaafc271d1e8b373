"""Spin dynamics: closed forms for G0 and G-, diagonalization for the multilevel case.

Evolution is psi(t) = exp(-iHt) psi(0) throughout; times are in units of 1/omega0.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrequency, NonHermitian

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def purity(self):
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    @property
    def entropy(self):
        return von_neumann(self.matrix, base=2)

    def validate(self, tol=1e-12, psd_tol=1e-10):
        m = self.matrix
        assert np.abs(m - m.conj().T).max() < tol, "not Hermitian"
        assert abs(np.trace(m) - 1) < tol, "trace differs from 1"
        assert np.linalg.eigvalsh(m).min() > -psd_tol, "not positive semidefinite"
        return self


@dataclass(frozen=True)
class SpinObservables:
    t: float
    sx: float
    sy: float
    sz: float
    purity: float
    entropy: float


@dataclass(frozen=True)
class SpinTrajectory:
    t: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    purity: np.ndarray
    entropy: np.ndarray

    def columns(self):
        return {"t": self.t, "sx": self.sx, "sy": self.sy, "sz": self.sz,
                "purity": self.purity, "entropy": self.entropy}


def von_neumann(rho, base=2):
    """-Tr rho log rho with 0 log 0 = 0 (base 2 or e)."""
    p = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    p = p[p > 0]
    logp = np.log2(p) if base == 2 else np.log(p)
    return float(max(0.0, -np.sum(p * logp)))


def _qubit_entropy(purity):
    # eigenvalues of a qubit state follow from its purity
    disc = np.sqrt(np.clip(2 * purity - 1, 0.0, 1.0))
    p = np.stack([(1 + disc) / 2, (1 - disc) / 2])
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return np.abs(terms.sum(axis=0))


def observables(rho, t=0.0):
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    sx = float(np.real(np.trace(m @ SX)))
    sy = float(np.real(np.trace(m @ SY)))
    sz = float(np.real(np.trace(m @ SZ)))
    d = DensityMatrix(m)
    return SpinObservables(t, sx, sy, sz, d.purity, d.entropy)


def _trajectory_from_elements(t, r00, r11, r01):
    sx = 2 * np.real(r01)
    sy = -2 * np.imag(r01)
    sz = np.real(r00 - r11)
    purity = np.real(r00**2 + r11**2) + 2 * np.abs(r01) ** 2
    return SpinTrajectory(np.asarray(t, float), sx, sy, sz, purity, _qubit_entropy(purity))


def _rho(r00, r11, r01):
    return DensityMatrix(np.array([[r00, r01], [np.conj(r01), r11]], dtype=complex))


def _g0_elements(b, c, t):
    t = np.asarray(t, dtype=float)
    k2 = b * b + c * c
    if k2 == 0:
        one = np.ones_like(t)
        return one, 0 * one, 0j * one
    k = np.sqrt(k2)
    r00 = (b * b + c * c * np.cos(k * t) ** 2) / k2
    r11 = c * c * np.sin(k * t) ** 2 / k2
    r01 = c * (b * (1 - np.cos(2 * k * t)) + 1j * k * np.sin(2 * k * t)) / (2 * k2)
    return r00, r11, r01


def _g0_bc(h):
    c = h.coeffs
    return (c["b"], c["c"]) if "b" in c else (c["b_x"], c["c_x"])


def g0_trajectory(h, t):
    b, c = _g0_bc(h)
    return _trajectory_from_elements(t, *_g0_elements(b, c, t))


def propagate_g0(h, t):
    """Reduced spin state and observables at time t from |P>|0>."""
    b, c = _g0_bc(h)
    r00, r11, r01 = (complex(x) for x in _g0_elements(b, c, float(t)))
    rho = _rho(r00.real, r11.real, r01)
    return rho, observables(rho, t)


def g0_amplitude_frequency(h):
    """Amplitude bc/kappa^2 of <sx> about its mean, and frequency kappa/pi."""
    b, c = _g0_bc(h)
    k2 = b * b + c * c
    if k2 == 0:
        raise DegenerateFrequency("b = c = 0")
    return b * c / k2, np.sqrt(k2) / np.pi


def _sinc_over(lam, t):
    # sin(lam t)/lam, finite as lam -> 0
    return t * np.sinc(lam * t / np.pi)


def gminus_zeta(h, t):
    c = h.coeffs
    b1, c1, d1, e1 = c["b1"], c["c1"], c["d1"], c["e1"]
    l1, l2 = c["lambda1"], c["lambda2"]
    t = np.asarray(t, dtype=float)
    ph = np.exp(-1j * c["a1"] * t)
    s1, s2 = _sinc_over(l1, t), _sinc_over(l2, t)
    c1t, c2t = np.cos(l1 * t), np.cos(l2 * t)
    z1 = ph * (0.5 * c1t + 0.5 * c2t - 0.5j * b1 * (s1 + s2) + 0.5j * c1 * (s1 - s2))
    z2 = ph * (-0.5j * e1 * (s1 + s2) + 0.5j * d1 * (s1 - s2))
    z3 = ph * (-0.5j * c1 * (s1 + s2) + 0.5 * c2t - 0.5 * c1t + 0.5j * b1 * (s1 - s2))
    z4 = ph * (-0.5j * d1 * (s1 + s2) + 0.5j * e1 * (s1 - s2))
    return np.stack([z1, z2, z3, z4], axis=-1)


def reduce_spin(psi):
    """Elements (rho00, rho11, rho01) of the spin state for 4-vectors (P0, P1, P'0, P'1)."""
    psi = np.asarray(psi)
    r00 = np.abs(psi[..., 0]) ** 2 + np.abs(psi[..., 2]) ** 2
    r11 = np.abs(psi[..., 1]) ** 2 + np.abs(psi[..., 3]) ** 2
    r01 = psi[..., 0] * np.conj(psi[..., 1]) + psi[..., 2] * np.conj(psi[..., 3])
    return r00, r11, r01


def gminus_trajectory(h, t):
    return _trajectory_from_elements(t, *reduce_spin(gminus_zeta(h, t)))


def propagate_gminus(h, t):
    z = gminus_zeta(h, float(t))
    r00, r11, r01 = reduce_spin(z)
    rho = _rho(float(r00), float(r11), complex(r01))
    return z, rho, observables(rho, t)


def gminus_sx_approx(h, t):
    """Small-coupling approximation 2(b1 e1 + c1 d1) sin^2(lambda2 t)/lambda2^2."""
    c = h.coeffs
    t = np.asarray(t, dtype=float)
    return 2 * (c["b1"] * c["e1"] + c["c1"] * c["d1"]) * _sinc_over(c["lambda2"], t) ** 2


def _check_hermitian(H):
    H = np.asarray(H, dtype=complex)
    scale = max(1.0, np.abs(H).max())
    if H.ndim != 2 or H.shape[0] != H.shape[1] or np.abs(H - H.conj().T).max() > 1e-12 * scale:
        raise NonHermitian("matrix is not Hermitian")
    return H


def unitary_oracle(H, psi0, t):
    """exp(-iHt) psi0 by spectral decomposition; t may be an array."""
    H = _check_hermitian(H)
    w, V = np.linalg.eigh(H)
    coef = V.conj().T @ np.asarray(psi0, dtype=complex)
    t = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t, w))
    return (phases * coef) @ V.T


def multilevel_amplitudes(h, t):
    psi0 = np.array([1, 0, 0, 0], dtype=complex)
    return unitary_oracle(h.matrix, psi0, t)


def multilevel_trajectory(h, t):
    return _trajectory_from_elements(t, *reduce_spin(multilevel_amplitudes(h, t)))


def propagate_multilevel(h, t):
    S = multilevel_amplitudes(h, float(t))
    r00, r11, r01 = reduce_spin(S)
    rho = _rho(float(r00), float(r11), complex(r01))
    return S, rho, observables(rho, t)
