import numpy as np
import pytest
from scipy.special import dawsn

from biortho import emission as em
from biortho import propagators as pr
from biortho.lattice import UnitSystem, build_lattice

U0 = UnitSystem(mass=0.0)


def _g(a, s):
    return np.exp(-0.5 * (a / s) ** 2)


def commutator_m0(t, r, s):
    """Smeared massless commutator function in closed form (c = 1)."""
    return -np.sqrt(np.pi / 2) / (4 * np.pi**2 * r * s) * (_g(r - t, s) - _g(r + t, s))


def wightman_plus_m0(t, r, s):
    """Smeared massless G+ (c = 1): the real part is a Dawson-function
    principal-value term, the imaginary part is half the commutator."""
    re = np.sqrt(2) / (8 * np.pi**2 * r * s) * (dawsn((r + t) / (np.sqrt(2) * s))
                                               + dawsn((r - t) / (np.sqrt(2) * s)))
    return re + 0.5j * commutator_m0(t, r, s)


def psi_plus_m0(t, r, s, hbar=1.0):
    """Massless positive-frequency localized state, smeared, in closed form."""
    def ksin(a):  # int_0^inf k sin(a k) exp(-k^2 s^2/2) dk
        return np.sqrt(np.pi / 2) * a / s**3 * _g(a, s)

    def kcos(a):  # int_0^inf k cos(a k) exp(-k^2 s^2/2) dk
        z = a / (np.sqrt(2) * s)
        return (1 - 2 * z * dawsn(z)) / s**2

    pref = hbar / (8 * np.pi**2 * r)
    return pref * (ksin(r + t) + ksin(r - t)) - 1j * pref * (kcos(r - t) - kcos(r + t))


def test_request_validation():
    with pytest.raises(ValueError):
        pr.PropagatorRequest("feynman")
    with pytest.raises(ValueError):
        pr.PropagatorRequest("hadamard", mass=-1)
    with pytest.raises(ValueError):
        pr.PropagatorRequest("hadamard", smearing=-0.1)
    with pytest.raises(ValueError):
        pr.PropagatorRequest("hadamard", points=[(0.0, -1.0)])
    with pytest.raises(ValueError):  # sigma is required for pointwise values
        pr.evaluate_propagator(pr.PropagatorRequest("hadamard", 0.0, 0.0, [(1.0, 1.0)], U0))
    assert pr.evaluate_propagator(pr.PropagatorRequest("hadamard", smearing=0.3)).size == 0


def test_massless_closed_forms():
    rng = np.random.default_rng(5)
    s = 0.3
    pts = list(zip(rng.uniform(-3, 3, 12), rng.uniform(0.2, 5, 12)))
    t, r = np.array(pts).T
    G = pr.evaluate_propagator(pr.PropagatorRequest("commutator", 0.0, s, pts, U0))
    Gp = pr.evaluate_propagator(pr.PropagatorRequest("wightman_plus", 0.0, s, pts, U0))
    scale = 1 / s**3
    assert np.max(np.abs(G - commutator_m0(t, r, s))) <= 1e-9 * scale
    assert np.max(np.abs(Gp - wightman_plus_m0(t, r, s))) <= 1e-9 * scale


@pytest.mark.parametrize("m", [0.0, 1.0])
def test_linear_identities(m):
    u = UnitSystem(mass=m)
    rng = np.random.default_rng(7)
    pts = list(zip(rng.uniform(-3, 3, 20), rng.uniform(0, 5, 20)))
    v = {k: pr.evaluate_propagator(pr.PropagatorRequest(k, m, 0.3, pts, u)) for k in pr.KINDS}
    assert np.max(np.abs(1j * v["commutator"] - (v["wightman_plus"] - v["wightman_minus"]))) <= 1e-8
    assert np.max(np.abs(v["hadamard"] - (v["wightman_plus"] + v["wightman_minus"]))) <= 1e-8


@pytest.mark.parametrize("m", [0.0, 1.0])
def test_equal_time_commutator_vanishes(m):
    pts = [(0.0, r) for r in (0.5, 1.0, 2.0, 4.0)]
    G = pr.evaluate_propagator(pr.PropagatorRequest("commutator", m, 0.3, pts, UnitSystem(mass=m)))
    assert np.max(np.abs(G)) <= 1e-12


def test_massless_light_cone_support():
    s, t = 0.25, 2.0
    r = np.linspace(0.1, 6, 120)
    off = np.abs(r - t) > 5 * s
    G = pr.evaluate_propagator(pr.PropagatorRequest("commutator", 0.0, s, [(t, x) for x in r], U0))
    # Gaussian shells: exp(-12.5) at the 5 sigma edge
    assert np.max(np.abs(G[off])) <= 1e-4 * np.max(np.abs(G))


@pytest.mark.parametrize("m", [0.0, 1.0])
def test_equal_time_slope(m):
    s = 0.3
    r = np.linspace(0, 10 * s, 801)
    slope = pr.equal_time_commutator_slope(m, r, s, units=UnitSystem(mass=m))
    d = pr.smeared_delta(r, s)
    l1 = np.trapezoid(r**2 * np.abs(slope + d), r) / np.trapezoid(r**2 * d, r)
    assert l1 <= 0.01
    assert -4 * np.pi * np.trapezoid(r**2 * slope, r) == pytest.approx(1, rel=0.01)


def test_slope_step_too_large():
    with pytest.raises(ValueError):
        pr.equal_time_commutator_slope(0.0, np.linspace(0, 3, 50), 0.3, h=2.0, units=U0)


def test_localized_state_closed_form():
    s = 0.3
    r = np.linspace(0.05, 4, 60)
    for t in (0.0, 1.2):
        v = pr.localized_state_values("plus", 0.0, t, r, s, U0)
        assert np.max(np.abs(v - psi_plus_m0(t, r, s))) <= 1e-9 / s**3


def test_localized_state_t0_real_and_concentrated():
    s = 0.3
    r = np.linspace(0, 6, 2001)
    prof = pr.localized_state_profile("plus", 0.0, 0.0, r, s, U0)
    assert np.max(np.abs(prof.values.imag)) <= 1e-12 * np.max(np.abs(prof.values))
    assert prof.samples[0][0] == 0.0 and len(prof.samples) == r.size
    delta = 0.5 * pr.smeared_delta(r, s)  # hbar/2 times the smeared delta
    assert np.allclose(prof.values.real, delta, atol=1e-10 * delta.max())


def test_causal_combinations():
    s = 0.3
    r = np.linspace(0.05, 4, 40)
    t = 1.0
    p = pr.localized_state_values("plus", 0.0, t, r, s, U0)
    m = pr.localized_state_values("minus", 0.0, t, r, s, U0)
    c = pr.localized_state_values("causal_psi_c", 0.0, t, r, s, U0)
    a = pr.localized_state_values("causal_psi", 0.0, t, r, s, U0)
    assert np.allclose(c, (p + m) / np.sqrt(2), atol=1e-12)
    assert np.allclose(a, (p - m) / np.sqrt(2), atol=1e-12)
    assert np.allclose(m, np.conj(p), atol=1e-12)
    off = np.abs(r - t) > 5 * s
    # the single-frequency state has a nonlocal imaginary part off the shell
    assert np.max(np.abs(p.imag[off])) > 1e-3 * np.max(np.abs(p))
    with pytest.raises(ValueError):
        pr.localized_state_values("psi_d", 0.0, t, r, s, U0)


def test_shell_fraction_bound():
    """The shell of psi_c is shaped like a exp(-a^2 / 2 sigma^2) in a = r - ct, so
    its L1 weight within 3 sigma tends to 1 - exp(-4.5) at large ct."""
    s = 0.5
    r = np.linspace(0, 16, 4001)
    fr = [pr.localized_state_profile("causal_psi_c", 0.0, ct, r, s, U0).l1_shell_fraction
          for ct in (1.6, 4.8)]
    assert all(0.985 < f < 1 - np.exp(-4.5) + 1e-3 for f in fr)


def test_hegerfeldt_tail():
    s = 0.5
    r = np.linspace(0, 16, 4001)
    tail = pr.hegerfeldt_tail(0.0, 1.6, r, s, U0)
    assert tail["positive"] > 0
    assert tail["ratio"] >= 10
    t0 = pr.hegerfeldt_tail(0.0, 0.0, r, s, U0)
    assert t0["positive"] == pytest.approx(t0["causal"], abs=1e-12)
    with pytest.raises(ValueError):
        pr.hegerfeldt_tail(0.0, -1.0, r, s, U0)


def test_l1_fraction():
    r = np.linspace(0, 1, 11)
    assert pr.l1_fraction(r, np.ones(11), r >= 0) == pytest.approx(1)
    assert pr.l1_fraction(r, np.zeros(11), r >= 0) == 0.0


def test_lattice_localized_state_t0_delta():
    lat = build_lattice(16, 1.0, UnitSystem())
    v = pr.lattice_localized_state(lat, "causal_psi_c", 0.0, 1e-9)
    expect = np.zeros(lat.shape)
    expect[0, 0, 0] = lat.units.hbar / (np.sqrt(2) * lat.dx**3)
    assert np.allclose(v, expect, atol=1e-12)


def test_lattice_vs_radial():
    s = 1.0
    lat = build_lattice(64, 0.5, UnitSystem(mass=0.0))
    v = pr.lattice_localized_state(lat, "causal_psi_c", 3.0, s)
    R = lat.radius
    sel = R < 10
    key = np.rint(R[sel] ** 2 / lat.dx**2).astype(int)
    uniq, inv = np.unique(key, return_inverse=True)
    q = pr.localized_state_values("causal_psi_c", 0.0, 3.0, np.sqrt(uniq) * lat.dx, s, lat.units)
    assert np.max(np.abs(v[sel] - q[inv])) / np.max(np.abs(q)) <= 0.02


def test_microcausality(lat16):
    on = lat16.units.hbar / (2 * lat16.dx**3)
    tp, tm, tot = pr.microcausality_split(lat16, (1, 2, 3), (1, 2, 3), 0.4)
    assert tp == pytest.approx(on, rel=1e-12) and tm == pytest.approx(on, rel=1e-12)
    assert tot == pytest.approx(pr.canonical_commutator(lat16, (1, 2, 3), (1, 2, 3)) / 1j, rel=1e-12)
    assert pr.canonical_commutator(lat16, (0, 0, 0), (0, 0, 0)) == pytest.approx(1j / lat16.dx**3)
    a, b, s = pr.microcausality_split(lat16, (0, 0, 0), (3, -1, 2), 0.4)
    assert abs(s) <= 1e-10 * on
    assert b == pytest.approx(np.conj(a), abs=1e-12 * on)
    assert abs(a) <= 1e-10 * on  # each sign sector is already local


def test_point_source_validation():
    with pytest.raises(ValueError):
        pr.PointSource([0, 1, 3], [1, 1, 1])
    with pytest.raises(ValueError):
        pr.PointSource([0, 1], [1])
    src = pr.PointSource([0.0, 0.5, 1.0], [1, 1, 1])
    with pytest.raises(ValueError):
        pr.source_convolution(src, (1, 0, 0), 2.0, 0.3, 0.0, U0)


def test_source_convolution_matches_causal_model():
    p = em.AtomParams(1.0)
    dt, s = 0.02, 0.3
    ts = np.arange(0, 8 + dt / 2, dt)
    src = pr.PointSource(ts, np.exp(-1j * p.big_omega * ts))
    ratios = []
    for r, tx in [(2.0, 5.0), (3.0, 6.0), (1.5, 7.0)]:
        v = pr.source_convolution(src, (r, 0, 0), tx, s, 0.0, U0)
        ratios.append(-4 * np.pi * r * v / em.causal_source_field(p, (r, 0, 0), tx))
    ratios = np.array(ratios)
    # smearing multiplies the response by exp(-omega0^2 sigma^2/2)
    assert np.allclose(ratios, np.exp(-0.5 * (p.omega0 * s) ** 2), rtol=0.02)
    assert np.max(np.abs(ratios - ratios[0])) <= 1e-4
    assert pr.source_convolution(src, (0.5, 0, 0), 0.4, s, 0.0, U0) != 0
    assert em.causal_source_field(p, (5.0, 0, 0), 4.0) == 0


def test_source_convolution_impulse_and_linearity():
    s = 0.2
    ts = np.arange(0, 3, 0.005)
    imp = pr.PointSource(ts, np.exp(-0.5 * ((ts - 0.2) / 0.02) ** 2))
    r = np.linspace(0.2, 5, 40)
    vals = np.array([pr.source_convolution(imp, (x, 0, 0), 2.5, s, 0.0, U0) for x in r])
    off = np.abs(r - 2.3) > 6 * s
    assert np.max(np.abs(vals[off])) <= 1e-5 * np.max(np.abs(vals))
    z = pr.PointSource([0.0, 0.1], [0.0, 0.0])
    assert pr.source_convolution(z, (1.0, 0, 0), 0.1, s, 0.0, U0) == 0
    t = np.linspace(0, 2, 21)
    a = pr.PointSource(t, np.sin(t))
    b = pr.PointSource(t, np.exp(-t) * 1j)
    ab = pr.PointSource(t, np.sin(t) + np.exp(-t) * 1j)
    x = (1.3, 0.4, 0)
    va = pr.source_convolution(a, x, 2.0, s, 1.0)
    vb = pr.source_convolution(b, x, 2.0, s, 1.0)
    assert abs(pr.source_convolution(ab, x, 2.0, s, 1.0) - (va + vb)) <= 1e-12 * max(abs(va), abs(vb))
