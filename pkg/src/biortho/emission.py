"""Single photon emitted by a two-level atom, to first order in the coupling.

The ground-state amplitude is

    c_{g,lambda}(k, t) = M_lambda(k) (1 - exp(i (omega_k - omega0) t)) / (hbar (omega_k - omega0))

with ``M_lambda = conj(e_lambda(k)) . d exp(-i k . x_atom)`` for a constant
dipole matrix element ``d``.  It is stored as the positive-frequency photon
amplitude; the conventional factor -i relating it to c_lambda^+ is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import spherical_jn

from .lattice import MomentumLattice, UnitSystem
from .photon import HELICITIES, HelicityState, build_helicity_frame, photon_product
from .quadrature import panel_quad

__all__ = [
    "AtomParams",
    "EmissionResult",
    "resonance_factor",
    "emission_amplitude",
    "emission_wave_function",
    "line_shape",
    "line_fwhm",
    "norm_ratio",
    "norm_ratio_scan",
    "radial_density_oracle",
    "spherical_average",
    "lattice_oracle_comparison",
    "causal_source_field",
]


@dataclass(frozen=True)
class AtomParams:
    omega0: float
    dipole: tuple = (0.0, 0.0, 1.0)
    gamma: float = 0.0
    omega_ls: float = 0.0
    position: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0!r}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma!r}")
        d = np.asarray(self.dipole, dtype=complex)
        if d.shape != (3,):
            raise ValueError("dipole must be a 3-vector")
        object.__setattr__(self, "dipole", tuple(d.tolist()))
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))

    @property
    def d(self) -> np.ndarray:
        return np.asarray(self.dipole, dtype=complex)

    @property
    def big_omega(self) -> complex:
        """Complex frequency omega0 + omega_LS - i Gamma / 2."""
        return self.omega0 + self.omega_ls - 0.5j * self.gamma


@dataclass(frozen=True, eq=False)
class EmissionResult:
    state: HelicityState
    norm_dual: float   # <psi_perp|psi~_perp>
    norm_plain: float  # <psi_perp|psi_perp>
    t: float
    params: AtomParams = field(repr=False)

    @property
    def ratio(self) -> float:
        """norm_dual / (norm_plain omega0); tends to 1 for a narrow line."""
        return norm_ratio(self.norm_dual, self.norm_plain, self.params.omega0)


def resonance_factor(omega, omega0: float, t: float, hbar: float = 1.0):
    """(1 - exp(i (omega - omega0) t)) / (hbar (omega - omega0)).

    Written as -i t exp(i delta t / 2) sinc(delta t / 2) / hbar, which is the
    same function and takes the limit value -i t / hbar at resonance.
    """
    delta = np.asarray(omega, dtype=float) - omega0
    x = 0.5 * delta * t
    return -1j * t * np.exp(1j * x) * np.sinc(x / np.pi) / hbar


def emission_amplitude(p: AtomParams, t: float, lattice: MomentumLattice) -> EmissionResult:
    """Emitted one-photon amplitude c_{g,lambda}(k, t) on ``lattice`` (massless)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    u = lattice.units
    fr = build_helicity_frame(lattice)
    kx = np.tensordot(np.asarray(p.position), lattice.kvec, axes=1)
    g = resonance_factor(lattice.omega, p.omega0, t, u.hbar) * np.exp(-1j * kx)
    s = HelicityState.zeros(lattice, t)
    d = p.d
    for il, lam in enumerate(HELICITIES):
        M = np.tensordot(d, np.conj(fr.e(lam)), axes=(0, 0))
        s.c[il, 0] = M * g
    s.c[..., 0, 0, 0] = 0
    plain = photon_product(s, s).real
    dual = float(u.eps0 / u.hbar * lattice.flat_measure * np.sum(np.abs(s.c) ** 2))
    return EmissionResult(s, dual, plain, t, p)


def emission_wave_function(r: EmissionResult, sigma: float | None = None) -> np.ndarray:
    """psi_lambda^+(x) = i sqrt(hbar/eps0) sum_k [dk^3/((2pi)^3 2)] e_lambda c e^{-i(omega t - k.x)}.

    Returns shape (2, 3, n, n, n).  ``sigma`` applies optional Gaussian UV
    smearing exp(-k^2 sigma^2/2) for display and cross-validation.
    """
    s = r.state
    lat = s.lattice
    u = lat.units
    pref = 1j * np.sqrt(u.hbar / u.eps0) * lat.flat_measure * lat.n_sites
    ph = np.exp(-1j * lat.omega * s.t)
    if sigma:
        ph = ph * np.exp(-0.5 * lat.k2 * sigma**2)
    out = np.empty((2, 3) + lat.shape, dtype=complex)
    for il, lam in enumerate(HELICITIES):
        a = s.frame.e(lam) * (s.c[il, 0] * ph)[None]
        out[il] = pref * np.fft.ifftn(a, axes=(1, 2, 3))
    return out


def line_shape(omega, omega0: float, t: float) -> np.ndarray:
    """|c|^2 per unit |M|^2/hbar^2: sin^2(delta t/2) / (delta/2)^2."""
    return np.abs(resonance_factor(omega, omega0, t)) ** 2


def line_fwhm(omega0: float, t: float, samples: int = 20001) -> float:
    """Full width at half maximum of :func:`line_shape` by grid scan.

    Half-maximum crossings are located by linear interpolation between the
    bracketing samples.
    """
    if not t > 0:
        raise ValueError("t must be > 0")
    half_span = 4 * np.pi / t
    w = np.linspace(omega0, omega0 + half_span, samples)
    y = line_shape(w, omega0, t)
    half = 0.5 * y[0]
    i = int(np.argmax(y < half))
    x0, x1, y0, y1 = w[i - 1], w[i], y[i - 1], y[i]
    right = x0 + (half - y0) * (x1 - x0) / (y1 - y0)
    return 2 * (right - omega0)


def norm_ratio(norm_dual: float, norm_plain: float, omega0: float) -> float:
    if not norm_plain > 0:
        raise ValueError("zero-norm emission state")
    return norm_dual / (norm_plain * omega0)


def norm_ratio_scan(p: AtomParams, times, band: float | None = None):
    """Normalized norm ratio <psi|psi~> / (<psi|psi> omega0) versus time.

    The dipole coupling is k-independent, so both norms reduce to 1D integrals
    over the line shape S(omega): the plain norm weights S by omega, the dual
    by omega^2.  The band is omega0 +- ``band`` (default omega0).

    Returns a list of ``(t, value)`` pairs.
    """
    times = [float(t) for t in times]
    if not times:
        raise ValueError("times must be non-empty")
    if any(t <= 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times must be positive and increasing")
    w0 = p.omega0
    half = w0 if band is None else float(band)
    lo, hi = max(0.0, w0 - half), w0 + half
    out = []
    for t in times:
        def f(w, t=t):
            s = line_shape(w, w0, t)
            return np.stack([w * s, w * w * s])
        (plain, dual), _ = panel_quad(f, lo, hi, period=2 * np.pi / t, rtol=1e-12)
        out.append((t, float(dual / (plain * w0))))
    return out


def radial_density_oracle(p: AtomParams, t: float, radii, sigma: float,
                          units=None, kmax: float | None = None) -> np.ndarray:
    """Sphere-averaged |psi_lambda^+|^2 at ``radii`` by 1D radial quadrature.

    With F(k) the radial part of the integrand, A = 4 pi int F k^2 (j0 - j1/(kr)),
    B = 4 pi int F k^2 j2, C = 4 pi int F k^2 i j1, and

        <|psi_lambda|^2> = |d|^2/3 * (2|A|^2 + |A + B|^2 + 2|C|^2) / 4,

    the same for both helicities.  Requires ``sigma > 0``.
    """
    u = units or UnitSystem(mass=0.0)
    if not sigma > 0:
        raise ValueError("sigma must be > 0 for pointwise profiles")
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(r <= 0):
        raise ValueError("radii must be > 0")
    kmax = 9.0 / sigma if kmax is None else kmax
    pref = 1j * np.sqrt(u.hbar / u.eps0) / ((2 * np.pi) ** 3 * 2)

    def F(k):
        w = u.c * k
        return (pref * np.exp(-1j * w * t) * resonance_factor(w, p.omega0, t, u.hbar)
                * np.exp(-0.5 * (k * sigma) ** 2))

    def integrand(k):
        kr = r[:, None] * k[None]
        f = 4 * np.pi * F(k)[None] * k[None] ** 2
        j0 = spherical_jn(0, kr)
        j1 = spherical_jn(1, kr)
        j2 = spherical_jn(2, kr)
        return np.stack([f * (j0 - j1 / kr), f * j2, 1j * f * j1])

    period = 2 * np.pi / (r.max() + 2 * u.c * t + 1.0 / kmax)
    (A, B, C), _ = panel_quad(integrand, 0.0, kmax, period=period, rtol=1e-10)
    d2 = float(np.sum(np.abs(p.d) ** 2))
    return d2 / 3 * 0.25 * (2 * np.abs(A) ** 2 + np.abs(A + B) ** 2 + 2 * np.abs(C) ** 2)


def spherical_average(values: np.ndarray, lattice: MomentumLattice, edges,
                      center=(0.0, 0.0, 0.0)):
    """Mean of ``values`` in radial shells [edges[i], edges[i+1]).

    Returns (mean radius per shell, mean value per shell); empty shells give nan.
    """
    c = np.asarray(center, dtype=float).reshape(3, 1, 1, 1)
    L = lattice.box
    d = (lattice.xvec - c + L / 2) % L - L / 2
    rr = np.sqrt(np.sum(d**2, axis=0)).ravel()
    v = np.asarray(values).ravel()
    edges = np.asarray(edges, dtype=float)
    which = np.digitize(rr, edges) - 1
    n = len(edges) - 1
    ok = (which >= 0) & (which < n)
    cnt = np.bincount(which[ok], minlength=n).astype(float)
    rs = np.bincount(which[ok], weights=rr[ok], minlength=n)
    vs = np.bincount(which[ok], weights=v[ok], minlength=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        return rs / cnt, vs / cnt


def lattice_oracle_comparison(r: EmissionResult, sigma: float, edges, lam: int = 1):
    """Shell-averaged |psi_lambda^+|^2 from the lattice and from the radial oracle.

    The oracle is evaluated at every distinct lattice radius inside the shells
    and averaged with the same binning, so both paths sample identical points.
    Returns (mean radius, lattice average, oracle average) per shell.
    """
    lat = r.state.lattice
    psi = emission_wave_function(r, sigma)[HELICITIES.index(lam)]
    dens = np.sum(np.abs(psi) ** 2, axis=0)
    edges = np.asarray(edges, dtype=float)
    c = np.asarray(r.params.position, dtype=float).reshape(3, 1, 1, 1)
    L = lat.box
    R = np.sqrt(np.sum(((lat.xvec - c + L / 2) % L - L / 2) ** 2, axis=0))
    sel = (R >= edges[0]) & (R < edges[-1]) & (R > 0)
    key = np.rint(R[sel] ** 2 / lat.dx**2).astype(np.int64)
    uniq, inv = np.unique(key, return_inverse=True)
    orc = radial_density_oracle(r.params, r.t, np.sqrt(uniq) * lat.dx, sigma, lat.units)
    ov = np.full(lat.shape, np.nan)
    ov[sel] = orc[inv]
    rm, la = spherical_average(dens, lat, edges, r.params.position)
    _, oa = spherical_average(np.nan_to_num(ov), lat, edges, r.params.position)
    return rm, la, oa


def causal_source_field(p: AtomParams, x, t_x: float, c: float = 1.0,
                        strength: complex = 1.0) -> complex:
    """Model field strength * Theta(tau) exp(-i Omega0 tau), tau = t_x - |x - x_atom|/c.

    Exactly zero outside the forward light cone of the atom's excitation.
    """
    if t_x < 0:
        raise ValueError("t_x must be >= 0")
    r = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(p.position)))
    tau = t_x - r / c
    if tau < 0:
        return 0j
    return complex(strength * np.exp(-1j * p.big_omega * tau))
