import numpy as np
from hypothesis import given, settings, strategies as st

from mathieu_nv.coherence import (coherence_generic, coherence_relative_entropy,
                                  purity_bound_check, quench_from_coefficients, rho_quench)
from mathieu_nv.dynamics import (g0_trajectory, gminus_trajectory, gminus_zeta, observables,
                                 unitary_oracle)
from mathieu_nv.hamiltonians import h_g0, h_gminus, h_gplus, h_multilevel, numeric_eigh
from mathieu_nv.mathieu_core import (Domain, Parity, a, b, characteristic, classify_region,
                                     eval_mode, inner, mode)
from mathieu_nv.open_system import (LindbladParams, ReservoirParams, bath_c1,
                                    bath_c1_abs2_expanded, bath_purity, bath_rho,
                                    lindblad_closed_form, lindblad_integrate,
                                    lindblad_purity_formula, purity)
from mathieu_nv.pendulum_map import (CantileverParams, ClassicalOrbit, classical_orbit, ellipj,
                                     map_to_pendulum, orbit_period)

orders = st.integers(min_value=1, max_value=8)
barriers = st.floats(min_value=0.0, max_value=30.0)
angles = st.floats(min_value=0.0, max_value=np.pi)
couplings = st.floats(min_value=0.0, max_value=5.0)
parities = st.sampled_from([Parity.CE, Parity.SE])
FAST = settings(max_examples=40, deadline=None)


# ---- Mathieu ---------------------------------------------------------------

@FAST
@given(parities, orders, barriers)
def test_mode_normalization_and_sign(parity, n, l):
    md = mode(parity, n, l)
    A = md.coeffs
    norm = 2 * A[0] ** 2 + np.sum(A[1:] ** 2) if md.wavenumbers[0] == 0 else np.sum(A**2)
    assert abs(norm - 1) < 1e-12
    first = A[np.flatnonzero(np.abs(A) > 1e-13 * np.abs(A).max())[0]]
    assert first > 0


@FAST
@given(parities, orders, barriers)
def test_ode_residual(parity, n, l):
    md = mode(parity, n, l)
    phi = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    res = eval_mode(md, phi, 2) + (md.characteristic - 2 * l * np.cos(2 * phi)) * md(phi)
    assert np.sqrt(np.mean(res**2)) < 1e-8


@FAST
@given(st.floats(min_value=1e-3, max_value=30.0))
def test_interlacing(l):
    seq = [a(0, l)]
    for n in range(1, 9):
        seq += [b(n, l), a(n, l)]
    diffs = np.diff(seq)
    assert np.all(diffs[0::2] > 0)  # a_{n-1} < b_n
    assert np.all(diffs[1::2] > -1e-12)  # b_n <= a_n


@FAST
@given(parities, orders, barriers)
def test_truncation_doubling(parity, n, l):
    M = max(48, n + 32)
    assert abs(characteristic(parity, n, l, M) - characteristic(parity, n, l, 2 * M)) < 1e-10


@FAST
@given(orders, orders, barriers)
def test_orthogonality(m, n, l):
    ce_m, ce_n, se_n = mode(Parity.CE, m, l), mode(Parity.CE, n, l), mode(Parity.SE, n, l)
    assert abs(inner(ce_m, ce_n) - np.pi * (m == n)) < 1e-10
    assert abs(inner(ce_m, se_n)) < 1e-10


@FAST
@given(orders, barriers, st.floats(min_value=1e-6, max_value=1.0))
def test_region_label_rule(n, l, eps):
    label = classify_region(n, l, eps).region.value
    if abs(a(n, l) - b(n, l)) < eps:
        assert label == "G-"
    elif abs(a(n, l) - b(n + 1, l)) < eps:
        assert label == "G+"
    else:
        assert label == "G0"


# ---- Hamiltonians ----------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.floats(0.0, 20.0), couplings, angles,
       st.sampled_from(["g0", "gminus", "gplus"]))
def test_closed_form_eigenvalues(n, l, Q, alpha, kind):
    build = {"g0": lambda: h_g0("ce", n, l, 1.0, alpha, Q, check_region=False),
             "gminus": lambda: h_gminus(n, l, 1.0, alpha, Q, check_region=False),
             "gplus": lambda: h_gplus(n, l, 1.0, alpha, Q, check_region=False)}[kind]
    h = build()
    assert np.array_equal(h.matrix, h.matrix.conj().T)
    assert np.allclose(np.sort(h.eigenvalues), numeric_eigh(h.matrix)[0], atol=1e-12, rtol=0)


@FAST
@given(st.integers(1, 5), st.floats(0.0, 20.0), couplings, angles,
       st.sampled_from(list(Domain)))
def test_multilevel_hermitian(n, l, Q, alpha, domain):
    h = h_multilevel(n, l, 1.0, alpha, Q, domain)
    assert np.array_equal(h.matrix, h.matrix.conj().T)


# ---- Dynamics --------------------------------------------------------------

@FAST
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_bloch_identity_pure(x0, y0, x1, y1):
    psi = np.array([x0 + 1j * y0, x1 + 1j * y1])
    nrm = np.linalg.norm(psi)
    if nrm < 1e-3:
        return
    psi = psi / nrm
    obs = observables(np.outer(psi, psi.conj()))
    assert abs(obs.sx**2 + obs.sy**2 + obs.sz**2 - 1) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.floats(0.0, 20.0), couplings, angles)
def test_g0_closed_form_vs_oracle(n, l, Q, alpha):
    h = h_g0("ce", n, l, 1.0, alpha, Q, check_region=False)
    t = np.linspace(0, 100, 201)
    tr = g0_trajectory(h, t)
    psi = unitary_oracle(h.matrix, [1, 0], t)
    r01 = psi[:, 0] * psi[:, 1].conj()
    assert np.abs(tr.sx - 2 * r01.real).max() < 1e-8
    assert np.abs(tr.sz - (np.abs(psi[:, 0]) ** 2 - np.abs(psi[:, 1]) ** 2)).max() < 1e-8
    assert np.abs(tr.purity - 1).max() < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.floats(0.0, 5.0), couplings, angles)
def test_gminus_closed_form_vs_oracle(n, l, Q, alpha):
    h = h_gminus(n, l, 1.0, alpha, Q, check_region=False)
    t = np.linspace(0, 100, 201)
    z = gminus_zeta(h, t)
    assert np.abs(z - unitary_oracle(h.matrix, [1, 0, 0, 0], t)).max() < 1e-8
    assert np.abs(np.sum(np.abs(z) ** 2, axis=1) - 1).max() < 1e-10
    tr = gminus_trajectory(h, t)
    assert np.all(tr.sx**2 + tr.sy**2 + tr.sz**2 <= 1 + 1e-10)


# ---- Open system -----------------------------------------------------------

lindblad_params = st.builds(LindbladParams, st.floats(0.0, 0.2), st.floats(-2, 2),
                            st.floats(0.05, 2))


@settings(max_examples=15, deadline=None)
@given(lindblad_params)
def test_lindblad_trace_and_psd(p):
    rho = lindblad_integrate(p, np.linspace(0, 50, 51))
    assert np.abs(np.trace(rho, axis1=1, axis2=2) - 1).max() < 1e-9
    assert np.linalg.eigvalsh(rho).min() > -1e-9


@settings(max_examples=200, deadline=None)
@given(lindblad_params, st.floats(0.0, 200.0))
def test_purity_formula_identity(p, t):
    rho = lindblad_closed_form(p, t)
    assert abs(np.trace(rho) - 1) < 1e-12
    assert abs(lindblad_purity_formula(p, t) - purity(rho)) < 1e-12


reservoirs = st.builds(ReservoirParams, st.integers(1, 10), st.floats(0.0, 3.0),
                       st.floats(0.0, 1.0), st.floats(-1.0, 1.0))


@settings(max_examples=200, deadline=None)
@given(reservoirs, st.floats(0.0, 30.0))
def test_c1_complex_vs_expanded(p, t):
    if abs(p.kappa_x) < 1e-6:
        return
    assert abs(abs(bath_c1(p, 1.0, t)) ** 2 - bath_c1_abs2_expanded(p, 1.0, t)) < 1e-10


@FAST
@given(reservoirs, st.floats(0.0, 30.0))
def test_c1_branch_invariant(p, t):
    kx = p.kappa_x
    if abs(kx) < 1e-6:
        return
    s, x = p.s, kx * t / 2
    plus = np.cosh(x) + s / kx * np.sinh(x)
    minus = np.cosh(-x) + s / (-kx) * np.sinh(-x)
    assert abs(plus - minus) <= 1e-12 * max(1.0, abs(plus))


@FAST
@given(reservoirs, st.floats(0, 1), st.floats(0.0, 30.0))
def test_bath_purity_identity(p, w, t):
    c0, c1 = np.sqrt(w), np.sqrt(1 - w)
    rho = bath_rho(p, c0, c1, t).matrix
    assert abs(bath_purity(p, c0, c1, t) - purity(rho)) < 1e-12


# ---- Coherence -------------------------------------------------------------

@st.composite
def quench_specs(draw):
    p1 = draw(st.floats(0, 1))
    return quench_from_coefficients(draw(st.floats(-10, 10)), draw(st.floats(-3, 3)),
                                    draw(st.floats(-3, 3)), p1, 1 - p1, draw(st.floats(-3, 3)))


@settings(max_examples=100, deadline=None)
@given(quench_specs(), st.lists(st.floats(0, 50), min_size=10, max_size=10))
def test_quench_invariants(spec, times):
    assert abs(spec.zeta1**2 + spec.zeta2**2 - 1) < 1e-12
    assert spec.omega12 >= 0
    C = coherence_relative_entropy(spec)
    assert C >= 0
    for t in times:
        rho = rho_quench(spec, t)
        assert np.allclose(np.linalg.eigvalsh(rho), sorted([spec.p1, spec.p2]), atol=1e-10)
        assert abs(coherence_generic(rho) - C) < 1e-10
        assert purity_bound_check(rho)[2]


@FAST
@given(quench_specs())
def test_zero_coherence_condition(spec):
    C = coherence_relative_entropy(spec)
    if spec.p1 == spec.p2 or np.sin(2 * spec.theta) == 0:
        assert C < 1e-12


# ---- Pendulum --------------------------------------------------------------

@FAST
@given(st.sampled_from([0.1, 0.5, 0.9, 0.99]))
def test_elliptic_identities(k):
    u = np.linspace(0, 10, 401)
    sn, cn, dn = ellipj(u, k * k)
    assert np.abs(sn**2 + cn**2 - 1).max() < 1e-12
    assert np.abs(dn**2 + k * k * sn**2 - 1).max() < 1e-12


@FAST
@given(st.floats(0.01, 10), st.floats(0.01, 10), st.floats(0.5, 5))
def test_map_scaling(sv, sg, base):
    kw = dict(m=1.0, omega_r=1.0, beta=0.3, mu=0.2, omega=1.5, omega_R=2.0,
              delta_spin=0.1)
    p = map_to_pendulum(CantileverParams(V0=base, g=base, **kw))
    q = map_to_pendulum(CantileverParams(V0=sv * base, g=sg * base, **kw))
    assert np.isclose(q.U, sv * p.U, rtol=1e-13)
    assert np.isclose(q.l, sv * p.l, rtol=1e-13)
    assert np.isclose(q.Q, sg * p.Q, rtol=1e-13)


@FAST
@given(st.floats(1.05, 10), st.floats(0.1, 3), st.floats(0.2, 3))
def test_rotation_periodic(ratio, U, w):
    orbit = ClassicalOrbit(ratio * U, U, w)
    T = orbit_period(orbit)
    t = np.linspace(0, 3, 31)
    assert np.abs(classical_orbit(orbit, t + T) - classical_orbit(orbit, t)).max() < 1e-9
