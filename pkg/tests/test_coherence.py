import logging

import numpy as np
import pytest

import oracles
from mathieu_nv.coherence import (WINDOWS, coherence_generic, coherence_relative_entropy,
                                  homoclinic_distance, homoclinic_terms, purity_bound_check,
                                  quench_eigensystem, quench_from_coefficients, quench_sweep,
                                  rho_quench)
from mathieu_nv.errors import NonOrthonormalBasis, SingularLambda
from mathieu_nv.hamiltonians import DEFAULT_ALPHA

BASE = dict(p1=0.9, p2=0.1, dw0=0.8, omega0=1.0, alpha=DEFAULT_ALPHA, Q=5.0)

SPEC_FIXTURE = dict(
    E1=17.075321959829722, E2=10.544533332733366, alpha1=0.6506619173366289,
    beta1=0.7593675456113607, lam=1.1670692957099735, J=0.12262251092451507,
    Y=-0.7905464691051167, L=-8.68645053278325, zeta1=-0.9934386301948883,
    zeta2=0.11436646377546088, theta=-1.456179071126439, EH1=17.28895361955691,
    EH2=10.33090167300618)
C_FIXTURE = 0.022400848569539


def _g0_coefficients(n, l, omega0, alpha, Q):
    a0, _, _ = oracles.mathieu_dense("ce", n, l)
    e = oracles.trapezoid_overlap("ce", n, "ce", n, l, lambda p: np.cos(2 * p), 0, 2 * np.pi)
    return a0, omega0 / 2 + Q / 2 * e * np.cos(alpha), Q / 2 * e * np.sin(alpha)


def test_quench_fixture():
    spec = quench_eigensystem(n=3, l=7.535, **BASE)
    for key, val in SPEC_FIXTURE.items():
        assert getattr(spec, key) == pytest.approx(val, abs=1e-10), key
    assert coherence_relative_entropy(spec) == pytest.approx(C_FIXTURE, abs=1e-12)


def test_quench_against_dense_evolution():
    a0, b, c = _g0_coefficients(3, 7.535, 1.0, DEFAULT_ALPHA, 5.0)
    w, rho, C = oracles.quench_dense(a0, b, c, 0.9, 0.1, 0.8, 7.3)
    assert abs(C - C_FIXTURE) < 1e-9
    spec = quench_eigensystem(n=3, l=7.535, **BASE)
    assert np.allclose([spec.EH2, spec.EH1], w, atol=1e-9)
    mine = rho_quench(spec, 7.3)
    # basis order is (psi1, psi2) = (upper, lower); phases of basis vectors are free
    assert np.allclose(np.diag(mine).real, np.diag(rho)[::-1].real, atol=1e-9)
    assert abs(abs(mine[0, 1]) - abs(rho[0, 1])) < 1e-9
    assert np.allclose(np.linalg.eigvalsh(mine), [0.1, 0.9], atol=1e-12)


@pytest.mark.parametrize("n,l,p1,dw0", [(2, 3.855, 0.7, 0.3), (4, 10.785, 0.95, 2.0),
                                        (3, 1.2, 0.6, -0.5)])
def test_coherence_against_dense(n, l, p1, dw0):
    a0, b, c = _g0_coefficients(n, l, 1.0, DEFAULT_ALPHA, 5.0)
    C_ref = oracles.quench_dense(a0, b, c, p1, 1 - p1, dw0, 2.0)[2]
    spec = quench_eigensystem(p1, 1 - p1, dw0, 1.0, DEFAULT_ALPHA, 5.0, n, l)
    assert abs(coherence_relative_entropy(spec) - C_ref) < 1e-9


def test_equal_weights_give_no_coherence():
    spec = quench_eigensystem(0.5, 0.5, 0.8, 1.0, DEFAULT_ALPHA, 5.0, 3, 7.535)
    assert coherence_relative_entropy(spec) == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(rho_quench(spec, 3.0), np.eye(2) / 2)


def test_no_quench_gives_no_coherence():
    spec = quench_eigensystem(0.9, 0.1, 0.0, 1.0, DEFAULT_ALPHA, 5.0, 3, 7.535)
    assert (spec.zeta1, spec.zeta2) == (1.0, 0.0)
    assert coherence_relative_entropy(spec) == pytest.approx(0.0, abs=1e-15)


def test_closed_form_matches_generic_entropy():
    rng = np.random.default_rng(11)
    for _ in range(100):
        p1 = rng.uniform(0, 1)
        spec = quench_from_coefficients(rng.normal() * 5, rng.normal(), rng.normal(),
                                        p1, 1 - p1, rng.normal())
        rho = rho_quench(spec, rng.uniform(0, 10))
        assert abs(coherence_generic(rho) - coherence_relative_entropy(spec)) < 1e-10


def test_theta_branch_is_irrelevant():
    spec = quench_eigensystem(n=3, l=7.535, **BASE)
    flipped = np.pi + spec.theta
    s2, c2 = np.sin(flipped) ** 2, np.cos(flipped) ** 2
    assert s2 == pytest.approx(np.sin(spec.theta) ** 2, abs=1e-15)
    assert c2 == pytest.approx(np.cos(spec.theta) ** 2, abs=1e-15)


def test_plus_state_coherence():
    plus = np.full((2, 2), 0.5)
    assert coherence_generic(plus) == pytest.approx(np.log(2), abs=1e-12)
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert coherence_generic(plus, H) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(NonOrthonormalBasis):
        coherence_generic(plus, np.array([[1, 1], [0, 1]]))


def test_purity_bound():
    C, bound, ok = purity_bound_check(rho_quench(quench_eigensystem(n=3, l=7.535, **BASE), 7.3))
    assert C == pytest.approx(C_FIXTURE, abs=1e-12)
    assert bound == pytest.approx(0.8, abs=1e-12)
    assert ok


def test_strict_singular_lambda():
    with pytest.raises(SingularLambda):
        quench_from_coefficients(1.0, 0.5, 0.0, 0.9, 0.1, 0.3, strict=True)
    spec = quench_from_coefficients(1.0, 0.5, 0.0, 0.9, 0.1, 0.3)
    assert spec.Y == 0 and coherence_relative_entropy(spec) == 0.0


def test_weights_validated():
    with pytest.raises(ValueError):
        quench_from_coefficients(1.0, 0.5, 0.2, 0.9, 0.2, 0.3)


def test_homoclinic_fixture(caplog):
    head, series, direct = homoclinic_terms(1, 10.0)
    assert head == pytest.approx(1.5502784369732576, abs=1e-12)
    assert series == pytest.approx(0.13336575198701955, abs=1e-12)
    assert direct == pytest.approx(0.5334630079480782, abs=1e-12)
    with caplog.at_level(logging.DEBUG, logger="mathieu_nv.coherence"):
        assert homoclinic_distance(1, 10.0) == pytest.approx(1.4169126849862381, abs=1e-12)
    assert "direct/series = 4" in caplog.text


def test_homoclinic_series_against_quadrature():
    # the coefficient sum is a quarter of (2/pi) * <ce|cos 2phi|ce> with the A_{-1} = A_1 fold
    for n, l in [(1, 10.0), (2, 4.0), (3, 12.0)]:
        _, series, _ = homoclinic_terms(n, l)
        e = oracles.trapezoid_overlap("ce", 2 * n + 1, "ce", 2 * n + 1, l,
                                      lambda p: np.cos(2 * p), 0, 2 * np.pi)
        assert abs(series - e / (2 * np.pi)) < 1e-9
    with pytest.raises(ValueError):
        homoclinic_terms(1, 0.0)


@pytest.mark.parametrize("n", sorted(WINDOWS))
def test_distance_decreases_across_window(n):
    ls = np.linspace(*WINDOWS[n], 60)
    C, R = quench_sweep(n, ls)
    assert np.all(np.diff(R) < 0)
    assert np.all(C >= 0)
