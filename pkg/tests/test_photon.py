import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biortho import photon as ph
from biortho.lattice import LatticeMismatchError, UnitSystem, build_lattice


@pytest.fixture(scope="module")
def plat():
    return build_lattice(16, 0.8, UnitSystem(hbar=1.3, c=1.7, eps0=0.7, mass=0.0))


@pytest.fixture(scope="module")
def plat8():
    return build_lattice(8, 1.0, UnitSystem(mass=0.0))


def test_requires_massless(lat16):
    with pytest.raises(ValueError):
        ph.HelicityState.zeros(lat16)


def test_frame_pole_convention(plat):
    fr = ph.build_helicity_frame(plat)
    up, down = (0, 0, 1), (0, 0, plat.n - 1)
    assert np.allclose(fr.e_theta[(slice(None),) + up], [1, 0, 0])
    assert np.allclose(fr.e_phi[(slice(None),) + up], [0, 1, 0])
    assert np.allclose(fr.e_phi[(slice(None),) + down], [0, -1, 0])
    for lam in (1, -1):
        assert np.allclose(fr.e(lam)[(slice(None),) + up], np.array([1, 1j * lam, 0]) / np.sqrt(2))


def test_frame_invariants(plat):
    fr = ph.build_helicity_frame(plat)
    mask = plat.mode_mask
    k = plat.kvec
    for lam in (1, -1):
        e = fr.e(lam)
        assert np.max(np.abs(np.sum(e * k, axis=0))[mask] / plat.kmag[mask]) <= 1e-14
        assert np.allclose(np.sum(np.conj(e) * e, axis=0)[mask], 1, atol=1e-14)
        assert np.allclose(np.conj(e), fr.e(-lam), atol=1e-15)
    assert np.max(np.abs(np.sum(np.conj(fr.e(1)) * fr.e(-1), axis=0))) <= 1e-14
    kh = fr.e_k
    assert np.allclose(np.cross(fr.e_theta, fr.e_phi, axis=0)[:, mask], kh[:, mask], atol=1e-14)


def test_zero_mode_dropped(plat):
    c = np.ones((2, 2) + plat.shape, complex)
    assert ph.HelicityState(plat, c).c[..., 0, 0, 0].sum() == 0


def test_product_positivity_and_orthogonality(plat, rng):
    s = ph.random_photon_state(plat, rng)
    assert ph.photon_product(s, s).real > 0
    a = s.replace(np.where(np.arange(2)[:, None, None, None, None] == 0, s.c, 0))
    b = s.replace(np.where(np.arange(2)[:, None, None, None, None] == 1, s.c, 0))
    assert abs(ph.photon_product(a, b)) <= 1e-12 * ph.photon_product(s, s).real
    p = s.replace(np.where(np.arange(2)[None, :, None, None, None] == 0, s.c, 0))
    m = s.replace(np.where(np.arange(2)[None, :, None, None, None] == 1, s.c, 0))
    assert ph.photon_product(p, m) == 0


def test_product_lattice_mismatch(plat, plat8):
    with pytest.raises(LatticeMismatchError):
        ph.photon_product(ph.HelicityState.zeros(plat), ph.HelicityState.zeros(plat8))


@pytest.mark.parametrize("lam,eps", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_position_state_biorthogonality(plat, lam, eps):
    u = plat.units
    on = u.hbar / (2 * u.eps0 * plat.dx**3)
    x, y = (0, 0, 0), (plat.dx, 0, 0)
    E = ph.make_photon_position_state(plat, x, lam, eps, "E", 0.3)
    A = ph.make_photon_position_state(plat, x, lam, eps, "A", 0.3)
    # the k = 0 cell is missing, hence the 1/N^3 offset from the continuum delta
    N = plat.n_sites
    assert ph.photon_bracket(E, A) / on == pytest.approx(1 - 1 / N, rel=1e-12)
    Ay = ph.make_photon_position_state(plat, y, lam, eps, "A", 0.3)
    assert ph.photon_bracket(E, Ay) / on == pytest.approx(-1 / N, abs=1e-12)
    other = ph.make_photon_position_state(plat, x, -lam, eps, "A", 0.3)
    assert abs(ph.photon_bracket(E, other)) <= 1e-12 * on
    assert ph.photon_product(A, A).real > 0


def test_position_state_errors(plat):
    with pytest.raises(ValueError):
        ph.make_photon_position_state(plat, (0.1, 0, 0), 1, 1)
    with pytest.raises(ValueError):
        ph.make_photon_position_state(plat, (0, 0, 0), 1, 1, "B")


def test_gram_block(plat):
    u = plat.units
    on = u.hbar / (2 * u.eps0 * plat.dx**3)
    sites = [tuple(plat.dx * np.array(s)) for s in itertools.product(range(2), repeat=3)]
    G = ph.photon_gram(plat, sites, 0.2) / on
    proj = np.eye(len(G)) - np.kron(np.eye(4), np.ones((8, 8))) / plat.n_sites
    assert np.max(np.abs(G - proj)) <= 1e-10


def test_completeness_and_projector(plat, rng):
    s = ph.random_photon_state(plat, rng, t=0.7)
    r = ph.resolve_transverse_identity(s)
    assert np.max(np.abs(r.c - s.c)) <= 1e-10 * np.max(np.abs(s.c))
    fr = ph.build_helicity_frame(plat)
    P = ph.transverse_projector(fr)
    kh = fr.e_k
    target = np.eye(3)[:, :, None, None, None] - kh[:, None] * kh[None]
    assert np.max(np.abs(P - target)[..., plat.mode_mask]) <= 1e-12
    longitudinal = np.stack([kh, kh]).astype(complex)
    z = ph.from_cartesian(longitudinal, fr)
    assert np.max(np.abs(z.c)) <= 1e-12


def test_cartesian_roundtrip(plat, rng):
    s = ph.random_photon_state(plat, rng)
    back = ph.from_cartesian(ph.to_cartesian(s), s.frame, s.t)
    assert np.allclose(back.c, s.c, atol=1e-13)


def test_wave_function_cases(plat):
    s = ph.photon_mode(plat, (1, 2, 0), lam=1)
    psi = ph.photon_wave_function(s)
    mag = np.sqrt(np.sum(np.abs(psi[0, 0]) ** 2, axis=0))
    assert np.allclose(mag, mag.mean(), rtol=1e-12)
    assert not np.any(psi[1])
    A = ph.make_photon_position_state(plat, (2 * plat.dx, 0, 0), 1, 1, "A")
    amp = ph.photon_amplitude_function(A)[0, 0]
    assert np.unravel_index(np.argmax(np.abs(amp)), plat.shape) == (2, 0, 0)
    assert not np.any(ph.photon_wave_function(ph.HelicityState.zeros(plat)))


def test_glauber_density(plat, rng):
    s = ph.normalize_photon(ph.random_photon_state(plat, rng))
    g = ph.glauber_density(s)
    assert np.sum(g.spatial) * plat.cell_volume == pytest.approx(1, abs=1e-10)
    assert np.sum(g.spectral) * plat.dk**3 == pytest.approx(1, abs=1e-10)
    assert g.total_spatial == pytest.approx(g.total_spectral, rel=1e-10)
    one = ph.normalize_photon(ph.photon_mode(plat, (1, 0, 0), -1) + ph.photon_mode(plat, (0, 3, 1), -1))
    g1 = ph.glauber_density(one)
    assert not np.any(g1.spatial[0]) and not np.any(g1.spectral[0])
    with pytest.raises(ValueError):
        ph.glauber_density(ph.HelicityState.zeros(plat))


def test_glauber_beat_pattern(plat):
    # two modes along x, 2 dk apart: the density repeats every half box along x
    s = ph.photon_mode(plat, (1, 0, 0), 1) + ph.photon_mode(plat, (3, 0, 0), 1, amplitude=0.6)
    p = ph.glauber_density(s).spatial[0, 0]
    assert np.allclose(p, np.roll(p, plat.n // 2, axis=0), rtol=1e-10)
    assert np.ptp(p) > 0.1 * p.max()
    assert np.allclose(p, p[:, :1, :1], rtol=1e-10)  # uniform across y and z


def test_photon_number(plat, rng):
    s = ph.normalize_photon(ph.photon_mode(plat, (2, 1, 0), 1))
    n = ph.photon_number(s)
    assert n[1] == pytest.approx(1, abs=1e-12) and n[-1] == 0
    assert ph.photon_number(2 * s)[1] == pytest.approx(4, rel=1e-12)
    assert ph.photon_number(ph.HelicityState.zeros(plat)) == {1: 0.0, -1: 0.0}
    r = ph.normalize_photon(ph.random_photon_state(plat, rng))
    n0 = ph.photon_number(r)
    n1 = ph.photon_number(ph.evolve_photon(r, 3.7))
    assert all(abs(n0[k] - n1[k]) <= 1e-12 for k in n0)
    assert sum(n0.values()) == pytest.approx(1, abs=1e-12)


def test_transversality_preserved(plat, rng):
    s = ph.random_photon_state(plat, rng, t=1.1)
    for state in (s, ph.evolve_photon(s, 0.4), ph.apply_photon_position_operator(s, 2),
                  ph.resolve_transverse_identity(s)):
        assert ph.transversality_residual(ph.synthesize_transverse(state)) <= 1e-12


def test_real_state_gives_real_field(plat, rng):
    s = ph.random_photon_state(plat, rng, real=True)
    assert s.is_real()
    f = ph.synthesize_transverse(s)
    assert np.max(np.abs(f.A.imag)) <= 1e-12 * np.max(np.abs(f.A))


def test_field_relation_E_minus_dA_dt(plat, rng):
    s = ph.random_photon_state(plat, rng, t=0.5)
    h = 1e-4
    a1 = ph.synthesize_transverse(s.replace(t=0.5 - h)).A
    a2 = ph.synthesize_transverse(s.replace(t=0.5 + h)).A
    E = ph.synthesize_transverse(s).E
    assert np.max(np.abs(E + (a2 - a1) / (2 * h))) <= 1e-6 * np.max(np.abs(E))


def test_frame_gauge_covariance(plat, rng):
    s = ph.normalize_photon(ph.random_photon_state(plat, rng))
    chi = rng.uniform(0, 2 * np.pi, plat.shape)
    fr2 = s.frame.rotated(chi)
    s2 = ph.from_cartesian(ph.to_cartesian(s), fr2, s.t)
    for il, lam in enumerate(ph.HELICITIES):
        m = plat.mode_mask
        assert np.allclose(s2.c[il, 0][m], (np.exp(1j * lam * chi) * s.c[il, 0])[m], atol=1e-12)
        assert np.allclose(s2.c[il, 1][m], (np.exp(-1j * lam * chi) * s.c[il, 1])[m], atol=1e-12)
    other = ph.random_photon_state(plat, rng)
    assert np.isclose(ph.photon_product(s2, other), ph.photon_product(s, other), rtol=1e-12)
    g, g2 = ph.glauber_density(s), ph.glauber_density(s2)
    assert np.allclose(g.spatial, g2.spatial, atol=1e-12 * g.spatial.max())
    assert np.allclose(g.spectral, g2.spectral, atol=1e-12 * g.spectral.max())
    assert ph.photon_number(s2)[1] == pytest.approx(ph.photon_number(s)[1], rel=1e-12)


def test_two_photon_product_factorizes(plat8, rng):
    a = ph.random_photon_state(plat8, rng)
    b = ph.random_photon_state(plat8, rng)
    a.c[:, 1] = 0
    b.c[:, 1] = 0
    prod = ph.ProductAmplitude(a, b)
    dense = np.einsum("iabc,jdef->ijabcdef", a.c[:, 0], b.c[:, 0])
    x1, x2 = (1, 0, 2), (3, 3, 0)
    for l1, l2 in [(1, 1), (1, -1), (-1, 1)]:
        fast = ph.two_photon_amplitude(prod, plat8, x1, x2, l1, l2)
        slow = ph.two_photon_amplitude(dense, plat8, x1, x2, l1, l2)
        assert np.max(np.abs(fast - slow)) <= 1e-12 * np.max(np.abs(slow))
        w1 = ph.photon_wave_function(a)[ph.HELICITIES.index(l1), 0][(slice(None),) + x1]
        w2 = ph.photon_wave_function(b)[ph.HELICITIES.index(l2), 0][(slice(None),) + x2]
        assert np.allclose(fast, np.outer(w1, w2), rtol=1e-12)
    z = np.zeros_like(dense)
    assert not np.any(ph.two_photon_amplitude(z, plat8, x1, x2, 1, 1))


def test_two_photon_entangled_schmidt_rank(plat8):
    n = plat8.n
    q1, q2 = (1, 0, 0), (0, 2, 1)
    c = np.zeros((2, 2) + (n,) * 6, complex)
    c[(0, 0) + q1 + q2] = 1.0
    c[(0, 0) + q2 + q1] = 1.0
    N = plat8.n_sites

    probe = np.random.default_rng(0).standard_normal((3 * N, 6))

    def flat(psi):
        # rows (i, x1), columns (j, x2); a random sketch keeps the rank and
        # avoids a full SVD of the 3N x 3N matrix
        return psi.transpose(0, 2, 1, 3).reshape(3 * N, 3 * N) @ probe

    s = np.linalg.svd(flat(ph.two_photon_wave_function(c, plat8, 1, 1)), compute_uv=False)
    assert np.sum(s > 1e-10 * s[0]) == 2
    prod = np.zeros_like(c)
    prod[(0, 0) + q1 + q2] = 1.0
    s1 = np.linalg.svd(flat(ph.two_photon_wave_function(prod, plat8, 1, 1)), compute_uv=False)
    assert np.sum(s1 > 1e-10 * s1[0]) == 1


def test_two_photon_dense_limit():
    big = build_lattice(16, 1.0, UnitSystem(mass=0.0))
    with pytest.raises(ValueError):
        ph.two_photon_wave_function(np.zeros(1), big, 1, 1)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(-10, 10))
def test_photon_properties(seed, t):
    lat = build_lattice(8, 0.9, UnitSystem(hbar=0.8, c=1.3, eps0=2.0, mass=0.0))
    r = np.random.default_rng(seed)
    s = ph.normalize_photon(ph.random_photon_state(lat, r, t=t))
    assert abs(sum(ph.photon_number(ph.evolve_photon(s, t)).values()) - 1) <= 1e-12
    assert np.max(np.abs(ph.resolve_transverse_identity(s).c - s.c)) <= 1e-10 * np.max(np.abs(s.c))
