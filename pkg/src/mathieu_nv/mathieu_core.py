"""Mathieu characteristic values, Fourier coefficients and overlap integrals.

The equation is psi'' + (E - 2 l cos 2phi) psi = 0.  Periodic solutions come in
four families (even/odd order, cosine/sine series), each reduced to a
symmetric tridiagonal eigenproblem for its Fourier coefficients.

Normalization: the integral of ce_n^2 (or se_n^2) over [0, 2pi] equals pi.  For
even cosine orders this means 2 A_0^2 + sum A_2r^2 = 1; otherwise the
coefficient vector has unit norm.  The first nonzero coefficient is positive.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import InvalidOrder, MismatchedBarrier, NonConverged

CONV_TOL = 1e-10
M_CEILING = 4096


class Parity(Enum):
    CE = "ce"
    SE = "se"


class Domain(Enum):
    FULL_2PI = "full"
    HALF_PI = "half"  # the interval [0, pi]


class Region(Enum):
    G_MINUS = "G-"
    G_ZERO = "G0"
    G_PLUS = "G+"


@dataclass(frozen=True)
class RegionLabel:
    region: Region
    degeneracy_gap: float


@dataclass(frozen=True)
class MathieuMode:
    parity: Parity
    n: int
    l: float
    M: int
    characteristic: float
    coeffs: np.ndarray
    wavenumbers: np.ndarray

    def __call__(self, phi):
        return eval_mode(self, phi)


def default_truncation(n):
    return max(48, n + 32)


def _family(parity, n, l, M):
    """Diagonal, off-diagonal, harmonic numbers and eigen-index for one family."""
    r = np.arange(M)
    if parity is Parity.CE and n % 2 == 0:
        k = 2 * r
        diag = k.astype(float) ** 2
        off = np.full(M - 1, float(l))
        off[0] *= np.sqrt(2.0)
        idx = n // 2
    elif parity is Parity.CE:
        k = 2 * r + 1
        diag = k.astype(float) ** 2
        diag[0] += l
        off = np.full(M - 1, float(l))
        idx = (n - 1) // 2
    elif n % 2 == 1:
        k = 2 * r + 1
        diag = k.astype(float) ** 2
        diag[0] -= l
        off = np.full(M - 1, float(l))
        idx = (n - 1) // 2
    else:
        k = 2 * r + 2
        diag = k.astype(float) ** 2
        off = np.full(M - 1, float(l))
        idx = (n - 2) // 2
    return diag, off, k, idx


def _check_args(parity, n, l, M):
    parity = Parity(parity)
    if n < 0 or (parity is Parity.SE and n == 0):
        raise InvalidOrder(f"no {parity.value}_{n} solution")
    if l < 0:
        raise ValueError("barrier l must be non-negative")
    if M is None:
        M = default_truncation(n)
    if M < n + 16:
        raise ValueError(f"truncation M={M} too small for order {n}")
    return parity, int(n), float(l), int(M)


@lru_cache(maxsize=8192)
def _solve(parity, n, l, M):
    diag, off, k, idx = _family(parity, n, l, M)
    w, v = eigh_tridiagonal(diag, off, select="i", select_range=(idx, idx),
                            lapack_driver="stemr")
    vec = v[:, 0].copy()
    if parity is Parity.CE and n % 2 == 0:
        vec[0] /= np.sqrt(2.0)
    big = np.abs(vec).max()
    first = np.flatnonzero(np.abs(vec) > 1e-13 * big)[0]
    if vec[first] < 0:
        vec = -vec
    return float(w[0]), vec, k


@lru_cache(maxsize=8192)
def _converged(parity, n, l, M):
    m = M
    while 2 * m <= M_CEILING:
        a1 = _solve(parity, n, l, m)[0]
        a2 = _solve(parity, n, l, 2 * m)[0]
        if abs(a2 - a1) < CONV_TOL * max(1.0, abs(a1)):
            return m
        m *= 2
    raise NonConverged(f"{parity.value}_{n}(l={l}) did not converge up to M={M_CEILING}")


def characteristic(parity, n, l, M=None):
    """a_n(l) for CE, b_n(l) for SE."""
    parity, n, l, M = _check_args(parity, n, l, M)
    m = _converged(parity, n, l, M)
    return _solve(parity, n, l, m)[0]


def mode(parity, n, l, M=None):
    parity, n, l, M = _check_args(parity, n, l, M)
    m = _converged(parity, n, l, M)
    value, vec, k = _solve(parity, n, l, m)
    coeffs = vec.copy()
    coeffs.flags.writeable = False
    k = k.copy()
    k.flags.writeable = False
    return MathieuMode(parity, n, l, m, value, coeffs, k)


def a(n, l, M=None):
    return characteristic(Parity.CE, n, l, M)


def b(n, l, M=None):
    return characteristic(Parity.SE, n, l, M)


def eval_mode(md, phi, derivative=0):
    """Series value (or its first/second derivative) at phi."""
    phi = np.asarray(phi, dtype=float)
    arg = np.multiply.outer(phi, md.wavenumbers)
    k = md.wavenumbers.astype(float)
    if md.parity is Parity.CE:
        basis = [np.cos(arg), -k * np.sin(arg), -k**2 * np.cos(arg)][derivative]
    else:
        basis = [np.sin(arg), k * np.cos(arg), -k**2 * np.sin(arg)][derivative]
    return basis @ md.coeffs


def _int_cos(m, length):
    # integral of cos(m phi) over [0, length] for integer arrays m
    return np.where(m == 0, length, 0.0)


def _int_sin(m, length):
    if length == 2 * np.pi:
        return np.zeros(m.shape)
    mm = np.where(m == 0, 1, m)
    return np.where(m % 2 != 0, 2.0 / mm, 0.0)


def _weighted_integral(ma, mb, shift, domain):
    """Integral of modeA * cos(shift*phi) * modeB over the domain, from coefficients."""
    length = 2 * np.pi if Domain(domain) is Domain.FULL_2PI else np.pi
    j = ma.wavenumbers[:, None]
    k = mb.wavenumbers[None, :]
    s = shift
    pa, pb = ma.parity, mb.parity
    if pa is Parity.CE and pb is Parity.CE:
        t = (_int_cos(j + k + s, length) + _int_cos(j + k - s, length)
             + _int_cos(j - k + s, length) + _int_cos(j - k - s, length))
    elif pa is Parity.SE and pb is Parity.SE:
        t = (_int_cos(j - k + s, length) + _int_cos(j - k - s, length)
             - _int_cos(j + k + s, length) - _int_cos(j + k - s, length))
    else:
        # cos(c phi) sin(w phi) cos(s phi)
        c, w = (j, k) if pa is Parity.CE else (k, j)
        t = (_int_sin(w + c + s, length) + _int_sin(w + c - s, length)
             + _int_sin(w - c + s, length) + _int_sin(w - c - s, length))
    return float(ma.coeffs @ (0.25 * t) @ mb.coeffs)


def _same_barrier(ma, mb):
    if ma.l != mb.l:
        raise MismatchedBarrier(f"l={ma.l} vs l={mb.l}")


def overlap_cos2(mode_a, mode_b, domain=Domain.FULL_2PI):
    """Closed-form integral of mode_a * cos(2 phi) * mode_b over the domain."""
    _same_barrier(mode_a, mode_b)
    return _weighted_integral(mode_a, mode_b, 2, domain)


def inner(mode_a, mode_b, domain=Domain.FULL_2PI):
    _same_barrier(mode_a, mode_b)
    return _weighted_integral(mode_a, mode_b, 0, domain)


def coupling_coefficients(region, n, l, domain=Domain.FULL_2PI, M=None):
    """Named overlap coefficients feeding the region Hamiltonians.

    region is a Region member or the string "multilevel".
    """
    ce = mode(Parity.CE, n, l, M)
    e = overlap_cos2(ce, ce)
    if region == "multilevel":
        se1 = mode(Parity.SE, n + 1, l, M)
        return {"r2": e, "t2": overlap_cos2(se1, se1),
                "s2": overlap_cos2(ce, se1, domain)}
    region = Region(region)
    if region is Region.G_PLUS:
        se1 = mode(Parity.SE, n + 1, l, M)
        g = overlap_cos2(se1, se1)
        return {"e": e, "g": g, "r": e + g, "f1": e - g}
    se = mode(Parity.SE, n, l, M)
    f = overlap_cos2(se, se)
    if region is Region.G_ZERO:
        return {"e": e, "f": f}
    return {"e": e, "f": f, "r": e + f, "f1": e - f}


def classify_region(n, l, eps_deg=0.05, M=None):
    if n < 1:
        raise InvalidOrder("region classification needs n >= 1")
    an = a(n, l, M)
    gap_minus = abs(an - b(n, l, M))
    gap_plus = abs(an - b(n + 1, l, M))
    if gap_minus < eps_deg:
        region = Region.G_MINUS
    elif gap_plus < eps_deg:
        region = Region.G_PLUS
    else:
        region = Region.G_ZERO
    return RegionLabel(region, min(gap_minus, gap_plus))
