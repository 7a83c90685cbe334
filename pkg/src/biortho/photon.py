"""Transverse photons in the Coulomb gauge on the momentum lattice.

Amplitudes ``c[l, e, ...]`` are stored for helicity index ``l`` (0: lambda=+1,
1: lambda=-1) and frequency index ``e`` (0: eps=+, 1: eps=-).  The Cartesian
vector amplitude of sector eps is

    A^+(k) = sum_lambda e_lambda(k) c_lambda^+(k)
    A^-(k) = sum_lambda conj(e_lambda(k)) c_lambda^-(k)

so the vector potential is real iff c^- = conj(c^+).  The k = 0 cell has no
transverse frame and carries no amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lattice import MomentumLattice
from .position import k_gradient

__all__ = [
    "HELICITIES",
    "DENSE_MAX_SITES",
    "HelicityFrame",
    "HelicityState",
    "TransverseConfigField",
    "GlauberDensity",
    "ProductAmplitude",
    "build_helicity_frame",
    "to_cartesian",
    "from_cartesian",
    "photon_product",
    "photon_bracket",
    "evolve_photon",
    "make_photon_position_state",
    "photon_wave_function",
    "resolve_transverse_identity",
    "transverse_projector",
    "synthesize_transverse",
    "transversality_residual",
    "glauber_density",
    "photon_number",
    "normalize_photon",
    "random_photon_state",
    "photon_mode",
    "apply_photon_position_operator",
    "photon_gram",
    "photon_amplitude_function",
    "two_photon_wave_function",
    "two_photon_amplitude",
]

HELICITIES = (1, -1)
EPS = (1, -1)
# dense two-photon amplitudes hold (n^3)^2 complex numbers per helicity pair
DENSE_MAX_SITES = 512


@dataclass(frozen=True, eq=False)
class HelicityFrame:
    """Spherical-polar triad (e_k, e_theta, e_phi) at every k, shape (3, n, n, n).

    On the polar axis e_theta = (1, 0, 0) and e_phi = (0, +-1, 0) for k along
    +-z.  All vectors vanish at k = 0.
    """

    lattice: MomentumLattice
    e_k: np.ndarray
    e_theta: np.ndarray
    e_phi: np.ndarray

    def e(self, lam: int) -> np.ndarray:
        """Helicity vector e_lambda = (e_theta + i lambda e_phi) / sqrt(2)."""
        return (self.e_theta + 1j * lam * self.e_phi) / np.sqrt(2)

    def vector(self, lam: int, eps: int) -> np.ndarray:
        """Cartesian polarization carried by c_lambda^eps."""
        v = self.e(lam)
        return v if eps > 0 else np.conj(v)

    def rotated(self, chi: np.ndarray) -> "HelicityFrame":
        """Rotate (e_theta, e_phi) about e_k by angle ``chi(k)``.

        In the rotated frame e_lambda picks up the phase exp(-i lambda chi).
        """
        c, s = np.cos(chi), np.sin(chi)
        return HelicityFrame(self.lattice, self.e_k,
                             c * self.e_theta + s * self.e_phi,
                             -s * self.e_theta + c * self.e_phi)


@lru_cache(maxsize=8)
def build_helicity_frame(lattice: MomentumLattice) -> HelicityFrame:
    k = lattice.kvec
    kmag = lattice.kmag
    nz = kmag > 0
    safe = np.where(nz, kmag, 1.0)
    e_k = np.where(nz, k / safe, 0.0)
    rho = np.hypot(k[0], k[1])
    cos_t = np.where(nz, k[2] / safe, 1.0)
    sin_t = rho / safe
    phi = np.arctan2(k[1], k[0])
    cp, sp = np.cos(phi), np.sin(phi)
    e_theta = np.stack([cos_t * cp, cos_t * sp, -sin_t])
    e_phi = np.stack([-sp, cp, np.zeros_like(cp)])
    pole = nz & (rho == 0)
    sign = np.sign(k[2])
    e_theta[:, pole] = np.array([1.0, 0.0, 0.0])[:, None]
    e_phi[:, pole] = np.stack([np.zeros_like(sign[pole]), sign[pole], np.zeros_like(sign[pole])])
    e_theta[:, ~nz] = 0.0
    e_phi[:, ~nz] = 0.0
    return HelicityFrame(lattice, e_k, e_theta, e_phi)


@dataclass(frozen=True, eq=False)
class HelicityState:
    lattice: MomentumLattice
    c: np.ndarray  # (2 helicities, 2 frequencies, n, n, n)
    t: float = 0.0
    frame: HelicityFrame | None = field(default=None)

    def __post_init__(self):
        if not self.lattice.massless:
            raise ValueError("photon states need a massless lattice (units.mass = 0)")
        c = np.array(self.c, dtype=complex)
        if c.shape != (2, 2) + self.lattice.shape:
            raise ValueError(f"c has shape {c.shape}, expected {(2, 2) + self.lattice.shape}")
        c[..., 0, 0, 0] = 0.0
        object.__setattr__(self, "c", c)
        if self.frame is None:
            object.__setattr__(self, "frame", build_helicity_frame(self.lattice))

    @classmethod
    def zeros(cls, lattice, t=0.0, frame=None) -> "HelicityState":
        return cls(lattice, np.zeros((2, 2) + lattice.shape, dtype=complex), t, frame)

    def amp(self, lam: int, eps: int) -> np.ndarray:
        return self.c[HELICITIES.index(lam), EPS.index(eps)]

    def replace(self, c=None, t=None, frame=None) -> "HelicityState":
        return HelicityState(self.lattice, self.c if c is None else c,
                             self.t if t is None else t, frame or self.frame)

    def is_real(self, rtol: float = 1e-12) -> bool:
        scale = max(float(np.max(np.abs(self.c))), 1e-300)
        return bool(np.max(np.abs(self.c[:, 1] - np.conj(self.c[:, 0]))) <= rtol * scale)

    def __add__(self, other):
        self.lattice.check_same(other.lattice)
        if other.frame is not self.frame:
            other = from_cartesian(to_cartesian(other), self.frame, other.t)
        return self.replace(self.c + other.c)

    def __mul__(self, a):
        return self.replace(a * self.c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class TransverseConfigField:
    lattice: MomentumLattice
    A: np.ndarray  # (3, n, n, n)
    E: np.ndarray  # (3, n, n, n), E = -dA/dt
    t: float


@dataclass(frozen=True, eq=False)
class GlauberDensity:
    spatial: np.ndarray   # (2, 2, n, n, n), sums to 1 with dx^3
    spectral: np.ndarray  # (2, 2, n, n, n), sums to 1 with dk^3
    total_spatial: float  # unnormalized totals, equal by Parseval
    total_spectral: float


def to_cartesian(s: HelicityState) -> np.ndarray:
    """Cartesian vector amplitudes, shape (2 frequencies, 3, n, n, n)."""
    fr = s.frame
    out = np.zeros((2, 3) + s.lattice.shape, dtype=complex)
    for ie, eps in enumerate(EPS):
        for il, lam in enumerate(HELICITIES):
            out[ie] += fr.vector(lam, eps) * s.c[il, ie][None]
    return out


def from_cartesian(vec: np.ndarray, frame: HelicityFrame, t: float = 0.0) -> HelicityState:
    """Project Cartesian amplitudes (2, 3, n, n, n) onto the helicity basis.

    Longitudinal components are discarded.
    """
    lat = frame.lattice
    c = np.zeros((2, 2) + lat.shape, dtype=complex)
    for ie, eps in enumerate(EPS):
        for il, lam in enumerate(HELICITIES):
            c[il, ie] = np.sum(np.conj(frame.vector(lam, eps)) * vec[ie], axis=0)
    return HelicityState(lat, c, t, frame)


def _cart_dot(s1: HelicityState, s2: HelicityState, weight: np.ndarray) -> complex:
    s1.lattice.check_same(s2.lattice)
    a, b = to_cartesian(s1), to_cartesian(s2)
    return complex(np.vdot(weight[None, None] * a, b))


def photon_product(s1: HelicityState, s2: HelicityState) -> complex:
    """(eps0/hbar) sum_eps sum_k measure conj(A1^eps(k)) . A2^eps(k)."""
    u = s1.lattice.units
    return u.eps0 / u.hbar * _cart_dot(s1, s2, s1.lattice.measure)


def photon_bracket(s1: HelicityState, s2: HelicityState) -> complex:
    """(hbar/eps0) sum_eps sum_k measure conj(A1^eps) . A2^eps: the bracket in
    which <E^eps_lambda(x)|A^eps'_sigma(y)> = hbar/(2 eps0) delta / dx^3."""
    u = s1.lattice.units
    return u.hbar / u.eps0 * _cart_dot(s1, s2, s1.lattice.measure)


def evolve_photon(s: HelicityState, dt: float) -> HelicityState:
    ph = np.exp(-1j * s.lattice.omega * dt)
    c = s.c.copy()
    c[:, 0] *= ph
    c[:, 1] *= np.conj(ph)
    return s.replace(c)


def photon_number(s: HelicityState) -> dict[int, float]:
    """N_lambda = (eps0/hbar) sum_eps sum_k measure |c_lambda^eps|^2."""
    u = s.lattice.units
    m = s.lattice.measure
    return {lam: float(u.eps0 / u.hbar * np.sum(m * np.abs(s.c[il]) ** 2))
            for il, lam in enumerate(HELICITIES)}


def normalize_photon(s: HelicityState) -> HelicityState:
    n = photon_product(s, s).real
    if not n > 0:
        raise ValueError("cannot normalize a zero photon state")
    return s * (1 / np.sqrt(n))


def random_photon_state(lattice: MomentumLattice, rng: np.random.Generator,
                        real: bool = False, t: float = 0.0) -> HelicityState:
    shape = (2, 2) + lattice.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if real:
        c[:, 1] = np.conj(c[:, 0])
    return HelicityState(lattice, c, t)


def photon_mode(lattice: MomentumLattice, index, lam: int = 1, eps: int = 1,
                amplitude: complex = 1.0) -> HelicityState:
    """Single photon mode at wavevector ``index`` (integer triple)."""
    s = HelicityState.zeros(lattice)
    j = tuple(int(i) % lattice.n for i in index)
    if j == (0, 0, 0):
        raise ValueError("k = 0 carries no transverse mode")
    s.amp(lam, eps)[j] = amplitude
    return s


def make_photon_position_state(lattice: MomentumLattice, x, lam: int, eps: int,
                               flavor: str = "A", t: float = 0.0) -> HelicityState:
    """Photon position state: c = exp(i eps (omega t - k.x)), times omega for
    ``flavor='E'``; only helicity ``lam`` and frequency ``eps`` populated."""
    if flavor not in ("A", "E"):
        raise ValueError(f"flavor must be 'A' or 'E', got {flavor!r}")
    idx = lattice.site_index(x)
    site = np.array([lattice.x_axis[i] for i in idx])
    kx = np.tensordot(site, lattice.kvec, axes=1)
    amp = np.exp(1j * eps * (lattice.omega * t - kx))
    if flavor == "E":
        amp = lattice.omega * amp
    s = HelicityState.zeros(lattice, t)
    s.c[HELICITIES.index(lam), EPS.index(eps)] = amp
    s.c[..., 0, 0, 0] = 0
    return s


def photon_wave_function(s: HelicityState, t: float | None = None) -> np.ndarray:
    """psi_lambda^eps(x) = <E_lambda^eps(x)|s>, shape (2, 2, 3, n, n, n).

    psi = (hbar/eps0) sum_k [dk^3/((2pi)^3 2)] v_lambda^eps(k) c exp(-i eps (omega t - k.x)).
    """
    t = s.t if t is None else t
    lat = s.lattice
    u = lat.units
    pref = u.hbar / u.eps0 * lat.flat_measure
    out = np.empty((2, 2, 3) + lat.shape, dtype=complex)
    for il, lam in enumerate(HELICITIES):
        for ie, eps in enumerate(EPS):
            a = s.frame.vector(lam, eps) * (s.c[il, ie] * np.exp(-1j * eps * lat.omega * t))[None]
            if eps > 0:
                out[il, ie] = pref * lat.n_sites * np.fft.ifftn(a, axes=(1, 2, 3))
            else:
                out[il, ie] = pref * np.fft.fftn(a, axes=(1, 2, 3))
    return out


def resolve_transverse_identity(s: HelicityState) -> HelicityState:
    """Apply (2 eps0/hbar) sum sum_x dx^3 |A(x)><E(x)| through configuration space."""
    lat = s.lattice
    u = lat.units
    psi = photon_wave_function(s)
    pref = 2 * u.eps0 / u.hbar * lat.cell_volume
    c = np.zeros_like(s.c)
    for il, lam in enumerate(HELICITIES):
        for ie, eps in enumerate(EPS):
            ph = np.exp(1j * eps * lat.omega * s.t)
            if eps > 0:
                back = np.fft.fftn(psi[il, ie], axes=(1, 2, 3))
            else:
                back = lat.n_sites * np.fft.ifftn(psi[il, ie], axes=(1, 2, 3))
            v = np.conj(s.frame.vector(lam, eps))
            c[il, ie] = pref * ph * np.sum(v * back, axis=0)
    return s.replace(c)


def transverse_projector(frame: HelicityFrame) -> np.ndarray:
    """sum_lambda e_lambda e_lambda^dagger at every k, shape (3, 3, n, n, n)."""
    P = 0
    for lam in HELICITIES:
        e = frame.e(lam)
        P = P + e[:, None] * np.conj(e)[None, :]
    return P


def synthesize_transverse(s: HelicityState) -> TransverseConfigField:
    """A(x) and E = -dA/dt at time ``s.t``."""
    lat = s.lattice
    vec = to_cartesian(s)
    w = lat.omega
    a_p = lat.measure * vec[0] * np.exp(-1j * w * s.t)
    a_m = lat.measure * vec[1] * np.exp(1j * w * s.t)
    ax = (1, 2, 3)
    A = lat.n_sites * np.fft.ifftn(a_p, axes=ax) + np.fft.fftn(a_m, axes=ax)
    E = lat.n_sites * np.fft.ifftn(1j * w * a_p, axes=ax) + np.fft.fftn(-1j * w * a_m, axes=ax)
    return TransverseConfigField(lat, A, E, s.t)


def transversality_residual(field_: TransverseConfigField) -> float:
    """max |k . A~(k)| / (max |A~| max |k|) over the lattice.

    Cells on a Nyquist plane are skipped: there k and -k alias to the same
    lattice wavevector, so the direction that A~ must be transverse to is
    ambiguous.
    """
    lat = field_.lattice
    Ak = np.fft.fftn(field_.A, axes=(1, 2, 3))
    div = np.sum(lat.kvec * Ak, axis=0)
    nyq = np.any(lat.kvec == lat.k_axis[lat.n // 2], axis=0)
    scale = max(float(np.max(np.abs(Ak)) * np.max(lat.kmag)), 1e-300)
    return float(np.max(np.abs(div[~nyq])) / scale)


def glauber_density(s: HelicityState) -> GlauberDensity:
    """Spatial (2 eps0/hbar)|psi|^2 and spectral (hbar/eps0)|c|^2/((2pi)^3 2)
    detection densities, each normalized to unit total."""
    lat = s.lattice
    u = lat.units
    psi = photon_wave_function(s)
    ps = 2 * u.eps0 / u.hbar * np.sum(np.abs(psi) ** 2, axis=2)
    pk = u.hbar / u.eps0 * np.abs(s.c) ** 2 / ((2 * np.pi) ** 3 * 2)
    ts = float(np.sum(ps) * lat.cell_volume)
    tk = float(np.sum(pk) * lat.dk**3)
    if not (ts > 0 and tk > 0):
        raise ValueError("Glauber density of a zero-norm state")
    return GlauberDensity(ps / ts, pk / tk, ts, tk)


def apply_photon_position_operator(s: HelicityState, axis: int = 0) -> HelicityState:
    """Photon position operator along ``axis``: eps i d/dk on the Cartesian
    transverse components, followed by the transverse projection."""
    vec = to_cartesian(s)
    out = np.empty_like(vec)
    for ie, eps in enumerate(EPS):
        out[ie] = eps * 1j * k_gradient(vec[ie], s.lattice, axis)
    return from_cartesian(out, s.frame, s.t)


def photon_amplitude_function(s: HelicityState, t: float | None = None) -> np.ndarray:
    """Scalar <E_lambda^eps(x)|s> for every site, shape (2, 2, n, n, n).

    Equals (hbar/eps0) sum_k [dk^3/((2pi)^3 2)] c_lambda^eps(k) exp(-i eps (omega t - k.x)),
    i.e. the helicity component of :func:`photon_wave_function` with the
    polarization vector stripped.
    """
    t = s.t if t is None else t
    lat = s.lattice
    u = lat.units
    pref = u.hbar / u.eps0 * lat.flat_measure
    out = np.empty(s.c.shape, dtype=complex)
    for ie, eps in enumerate(EPS):
        a = s.c[:, ie] * np.exp(-1j * eps * lat.omega * t)[None]
        ax = (1, 2, 3)
        out[:, ie] = pref * (lat.n_sites * np.fft.ifftn(a, axes=ax) if eps > 0 else np.fft.fftn(a, axes=ax))
    return out


def photon_gram(lattice: MomentumLattice, sites, t: float = 0.0) -> np.ndarray:
    """<E_lambda^eps(x_i)|A_sigma^eps'(x_j)> over sites x helicities x frequencies.

    Index ordering is label-major, label = (lambda, eps) in the order
    (+,+), (+,-), (-,+), (-,-); entry ``label * len(sites) + site``.
    """
    sites = list(sites)
    ns = len(sites)
    idx = [lattice.site_index(x) for x in sites]
    labels = [(lam, eps) for lam in HELICITIES for eps in EPS]
    G = np.zeros((4 * ns, 4 * ns), dtype=complex)
    for b, (sig, ep) in enumerate(labels):
        for j, y in enumerate(sites):
            ket = make_photon_position_state(lattice, y, sig, ep, "A", t)
            vals = photon_amplitude_function(ket, t).reshape(4, *lattice.shape)
            for a in range(4):
                for i, ix in enumerate(idx):
                    G[a * ns + i, b * ns + j] = vals[a][ix]
    return G


class ProductAmplitude:
    """Two-photon amplitude c(k1, k2) = a(k1) b(k2) of positive frequency."""

    def __init__(self, first: HelicityState, second: HelicityState):
        first.lattice.check_same(second.lattice)
        self.first, self.second = first, second
        self.lattice = first.lattice


def _dense_check(lattice: MomentumLattice):
    if lattice.n_sites > DENSE_MAX_SITES:
        raise ValueError(
            f"dense two-photon path limited to {DENSE_MAX_SITES} sites, lattice has {lattice.n_sites}"
        )


def two_photon_wave_function(amp, lattice: MomentumLattice, lam1: int, lam2: int,
                             t: float = 0.0) -> np.ndarray:
    """psi_{l1 l2}(x1, x2) for all site pairs, shape (3, 3, N, N), N = n^3.

    ``amp`` is a dense positive-frequency amplitude of shape (2, 2) + 6 lattice
    axes indexed by helicity (see :data:`HELICITIES`), or a
    :class:`ProductAmplitude`.
    """
    u = lattice.units
    pref = u.hbar / u.eps0 * lattice.flat_measure * lattice.n_sites
    if isinstance(amp, ProductAmplitude):
        p1 = photon_wave_function(amp.first, t)[HELICITIES.index(lam1), 0]
        p2 = photon_wave_function(amp.second, t)[HELICITIES.index(lam2), 0]
        N = lattice.n_sites
        return np.einsum("ia,jb->ijab", p1.reshape(3, N), p2.reshape(3, N))
    _dense_check(lattice)
    fr = build_helicity_frame(lattice)
    e1, e2 = fr.e(lam1), fr.e(lam2)
    ph = np.exp(-1j * lattice.omega * t)
    c = amp[HELICITIES.index(lam1), HELICITIES.index(lam2)]
    c = c * ph[(...,) + (None,) * 3] * ph[(None,) * 3]
    N = lattice.n_sites
    out = np.empty((3, 3, N, N), dtype=complex)
    ax = tuple(range(6))
    for i in range(3):
        for j in range(3):
            a = e1[i][(...,) + (None,) * 3] * e2[j][(None,) * 3] * c
            out[i, j] = (pref**2 * np.fft.ifftn(a, axes=ax)).reshape(N, N)
    return out


def two_photon_amplitude(amp, lattice: MomentumLattice, x1, x2, lam1: int, lam2: int,
                         t: float = 0.0) -> np.ndarray:
    """3x3 tensor psi_{l1 l2, ij}(x1, x2, t): double projection onto E-states."""
    i1 = np.ravel_multi_index(lattice.site_index(x1), lattice.shape)
    i2 = np.ravel_multi_index(lattice.site_index(x2), lattice.shape)
    if isinstance(amp, ProductAmplitude):
        a = photon_wave_function(amp.first, t)[HELICITIES.index(lam1), 0].reshape(3, -1)[:, i1]
        b = photon_wave_function(amp.second, t)[HELICITIES.index(lam2), 0].reshape(3, -1)[:, i2]
        return np.outer(a, b)
    return two_photon_wave_function(amp, lattice, lam1, lam2, t)[:, :, i1, i2]
