"""Region Hamiltonians for the spin coupled to the quantum pendulum.

Spin basis is (|0>, |1>) with sigma_z = diag(1, -1).  Four-level Hamiltonians
use the ordering (P|0>, P|1>, P'|0>, P'|1>) for the two pendulum states P, P'.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .mathieu_core import (Domain, Parity, Region, a, b, classify_region,
                           coupling_coefficients, mode, overlap_cos2)


# tan(alpha) = -omega_R/delta with delta/omega_R = 1/(2000 pi), taken near +pi/2
DEFAULT_ALPHA = np.pi / 2 - 1 / (2000 * np.pi)


class RegionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RegionHamiltonian:
    kind: str  # g0_ce, g0_se, gminus, gplus, multilevel
    region: Region
    matrix: np.ndarray
    coeffs: dict
    inputs: dict
    eigenvalues: np.ndarray | None = None
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self):
        return self.matrix.shape[0]


def _check_region(n, l, expected, eps_deg):
    label = classify_region(n, l, eps_deg)
    if label.region is not expected:
        warnings.warn(f"(n={n}, l={l}) classifies as {label.region.value}, "
                      f"not {expected.value}", RegionWarning, stacklevel=3)


def _hermitian(m):
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


def _spin_block(beta, eps):
    """Eigenpairs of [[beta, eps], [eps, -beta]], ascending."""
    lam = np.hypot(beta, eps)
    if lam == 0:
        return np.array([0.0, 0.0]), np.eye(2)
    if beta >= 0:
        up = np.array([beta + lam, eps])
        up /= np.linalg.norm(up)
        down = np.array([-up[1], up[0]])
    else:
        down = np.array([beta - lam, eps])
        down /= np.linalg.norm(down)
        up = np.array([down[1], -down[0]])
    return np.array([-lam, lam]), np.column_stack([down, up])


def h_g0(branch, n, l, omega0, alpha, Q, eps_deg=0.05, check_region=True):
    branch = Parity(branch)
    if check_region:
        _check_region(n, l, Region.G_ZERO, eps_deg)
    md = mode(branch, n, l)
    ov = overlap_cos2(md, md)
    diag = md.characteristic
    bb = float(omega0 / 2 + Q / 2 * ov * np.cos(alpha))
    c = float(Q / 2 * ov * np.sin(alpha))
    mat = _hermitian([[diag + bb, c], [c, diag - bb]])
    kappa = np.hypot(bb, c)
    if branch is Parity.CE:
        coeffs = {"a": diag, "b": bb, "c": c, "e": ov}
    else:
        coeffs = {"a_x": diag, "b_x": bb, "c_x": c, "f": ov}
    _, vecs = _spin_block(bb, c)
    return RegionHamiltonian(
        kind=f"g0_{branch.value}", region=Region.G_ZERO, matrix=mat, coeffs=coeffs,
        inputs=dict(n=n, l=l, omega0=omega0, alpha=alpha, Q=Q),
        eigenvalues=diag + np.array([-kappa, kappa]), eigenvectors=vecs)


def _four_level(E, b1, c1, d1, e1):
    mat = _hermitian([[E + b1, e1, c1, d1],
                      [e1, E - b1, d1, -c1],
                      [c1, d1, E + b1, e1],
                      [d1, -c1, e1, E - b1]])
    lam1 = np.hypot(b1 - c1, d1 - e1)
    lam2 = np.hypot(b1 + c1, d1 + e1)
    # pendulum combinations (P - P')/sqrt2 and (P + P')/sqrt2 decouple the spin blocks
    v1, w1 = _spin_block(b1 - c1, e1 - d1)
    v2, w2 = _spin_block(b1 + c1, e1 + d1)
    minus = np.array([1.0, -1.0]) / np.sqrt(2)
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    vecs = np.column_stack([np.kron(minus, w1[:, 0]), np.kron(minus, w1[:, 1]),
                            np.kron(plus, w2[:, 0]), np.kron(plus, w2[:, 1])])
    vals = E + np.array([v1[0], v1[1], v2[0], v2[1]])
    order = np.argsort(vals, kind="stable")
    return mat, lam1, lam2, vals[order], vecs[:, order]


def _doublet(kind, region, E, r, f1, n, l, omega0, alpha, Q, extra):
    b1 = float(omega0 / 2 + Q / 4 * r * np.cos(alpha))
    c1 = float(Q / 4 * f1 * np.cos(alpha))
    d1 = float(Q / 4 * f1 * np.sin(alpha))
    e1 = float(Q / 4 * r * np.sin(alpha))
    mat, lam1, lam2, vals, vecs = _four_level(E, b1, c1, d1, e1)
    coeffs = {"a1": E, "b1": b1, "c1": c1, "d1": d1, "e1": e1,
              "lambda1": lam1, "lambda2": lam2, "r": r, "f1": f1, **extra}
    return RegionHamiltonian(kind=kind, region=region, matrix=mat, coeffs=coeffs,
                             inputs=dict(n=n, l=l, omega0=omega0, alpha=alpha, Q=Q),
                             eigenvalues=vals, eigenvectors=vecs)


def h_gminus(n, l, omega0, alpha, Q, eps_deg=0.05, check_region=True,
             gminus_diagonal_mean=False):
    """Degenerate doublet (ce_n, se_n).  Diagonal a_n + b_n unless the mean is requested."""
    if check_region:
        _check_region(n, l, Region.G_MINUS, eps_deg)
    cc = coupling_coefficients(Region.G_MINUS, n, l)
    E = a(n, l) + b(n, l)
    if gminus_diagonal_mean:
        E /= 2
    return _doublet("gminus", Region.G_MINUS, E, cc["r"], cc["f1"], n, l, omega0, alpha, Q,
                    {"e": cc["e"], "f": cc["f"]})


def h_gplus(n, l, omega0, alpha, Q, eps_deg=0.05, check_region=True):
    """Well doublet (ce_n, se_{n+1}), same element pattern with r = e + g, f1 = e - g."""
    if check_region:
        _check_region(n, l, Region.G_PLUS, eps_deg)
    cc = coupling_coefficients(Region.G_PLUS, n, l)
    E = a(n, l) + b(n + 1, l)
    h = _doublet("gplus", Region.G_PLUS, E, cc["r"], cc["f1"], n, l, omega0, alpha, Q,
                 {"e": cc["e"], "g": cc["g"]})
    assert np.array_equal(h.matrix, h.matrix.conj().T)
    return h


def h_multilevel(n, l, omega0, alpha, Q, domain=Domain.FULL_2PI):
    cc = coupling_coefficients("multilevel", n, l, Domain(domain))
    r2, t2, s2 = cc["r2"], cc["t2"], cc["s2"]
    a2, f2 = a(n, l), b(n + 1, l)
    ca, sa = np.cos(alpha), np.sin(alpha)
    b2 = omega0 / 2 + Q / 2 * r2 * ca
    c2 = Q / 2 * r2 * sa
    d2 = Q / 2 * s2 * ca
    e2 = Q / 2 * s2 * sa
    g2 = omega0 / 2 + Q / 2 * t2 * ca
    h2 = Q / 2 * t2 * sa
    mat = _hermitian([[a2 + b2, c2, d2, e2],
                      [c2, a2 - b2, e2, -d2],
                      [d2, e2, f2 + g2, h2],
                      [e2, -d2, h2, f2 - g2]])
    vals = None
    if s2 == 0:
        k1, k2 = np.hypot(b2, c2), np.hypot(g2, h2)
        vals = np.sort([a2 - k1, a2 + k1, f2 - k2, f2 + k2])
    coeffs = {"a2": a2, "b2": b2, "c2": c2, "d2": d2, "e2": e2, "f2": f2, "g2": g2,
              "h2": h2, "r2": r2, "t2": t2, "s2": s2, "domain": Domain(domain).value}
    return RegionHamiltonian(kind="multilevel", region=Region.G_ZERO, matrix=mat,
                             coeffs=coeffs,
                             inputs=dict(n=n, l=l, omega0=omega0, alpha=alpha, Q=Q),
                             eigenvalues=vals)


def numeric_eigh(matrix):
    return np.linalg.eigh(matrix)
