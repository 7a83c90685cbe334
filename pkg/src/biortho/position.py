"""Biorthogonal position eigenvectors, wave functions and position operators.

The bracket between a bra state ``f`` and a ket state ``g`` is

    <f|g> = hbar sum_eps sum_k measure(k) conj(f^eps(k)) g^eps(k)

so that with the eigenvector amplitudes

    phi-flavor:  amp^eps(k) = exp(i eps (omega t - k.x))
    pi-flavor:   amp^eps(k) = omega_k exp(i eps (omega t - k.x))

one has <pi^eps(x)|phi^eps'(y)> = (hbar/2) delta_{eps eps'} delta_xy / dx^3,
the lattice form of the continuum delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import MomentumLattice, SpectralField

__all__ = [
    "PositionEigenvector",
    "WaveFunction",
    "bracket",
    "make_position_state",
    "wave_function",
    "resolve_identity",
    "from_wave_function",
    "probability_density",
    "position_expectation",
    "biorthogonality_gram",
    "k_gradient",
    "apply_position_operator_kspace",
    "apply_position_operator_config",
    "apply_position_adjoint_config",
    "tail_fraction",
]

EPS = (1, -1)


@dataclass(frozen=True, eq=False)
class PositionEigenvector:
    site: tuple[float, float, float]
    eps: int
    flavor: str
    t: float
    backing: SpectralField

    @property
    def index(self) -> tuple[int, int, int]:
        return self.backing.lattice.site_index(self.site)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """psi^eps(x) for eps = +, - stacked along axis 0 (index 0 is eps = +)."""

    lattice: MomentumLattice
    values: np.ndarray
    t: float
    norm_dual: float

    def component(self, eps: int) -> np.ndarray:
        return self.values[0 if eps > 0 else 1]


def bracket(f: SpectralField, g: SpectralField) -> complex:
    f.lattice.check_same(g.lattice)
    m = f.lattice.measure
    s = np.vdot(m * f.amp_plus, g.amp_plus) + np.vdot(m * f.amp_minus, g.amp_minus)
    return complex(f.lattice.units.hbar * s)


def _phase(lattice: MomentumLattice, x, eps: int, t: float) -> np.ndarray:
    kx = np.tensordot(np.asarray(x, dtype=float), lattice.kvec, axes=1)
    return np.exp(1j * eps * (lattice.omega * t - kx))


def make_position_state(lattice: MomentumLattice, x, eps: int, flavor: str = "phi",
                        t: float = 0.0) -> PositionEigenvector:
    """Position eigenvector |phi^eps(x)> or its dual |pi^eps(x)> at time ``t``.

    ``x`` must be a lattice site (coordinates are reduced modulo the box).
    """
    if eps not in EPS:
        raise ValueError(f"eps must be +1 or -1, got {eps!r}")
    if flavor not in ("phi", "pi"):
        raise ValueError(f"flavor must be 'phi' or 'pi', got {flavor!r}")
    idx = lattice.site_index(x)
    site = tuple(float(lattice.x_axis[i]) for i in idx)
    amp = _phase(lattice, site, eps, t)
    if flavor == "pi":
        amp = lattice.omega * amp
    z = np.zeros(lattice.shape, dtype=complex)
    f = SpectralField(lattice, amp, z, t) if eps > 0 else SpectralField(lattice, z, amp, t)
    return PositionEigenvector(site, eps, flavor, t, f)


def _wf_values(f: SpectralField, t: float) -> np.ndarray:
    lat = f.lattice
    mask = lat.mode_mask
    w = lat.omega
    pref = lat.units.hbar * lat.flat_measure
    plus = np.where(mask, f.amp_plus * np.exp(-1j * w * t), 0)
    minus = np.where(mask, f.amp_minus * np.exp(1j * w * t), 0)
    return pref * np.stack([lat.n_sites * np.fft.ifftn(plus), np.fft.fftn(minus)])


def wave_function(f: SpectralField, t: float | None = None) -> WaveFunction:
    """psi^eps(x) = <pi^eps(x)|f> on every site, position states taken at ``t``."""
    t = f.t if t is None else t
    lat = f.lattice
    vals = _wf_values(f, t)
    norm = 2.0 / lat.units.hbar * lat.cell_volume * float(np.sum(np.abs(vals) ** 2))
    return WaveFunction(lat, vals, t, norm)


def from_wave_function(w: WaveFunction) -> SpectralField:
    """Rebuild amplitudes as (2/hbar) sum_eps sum_x dx^3 |phi^eps(x)> psi^eps(x)."""
    lat = w.lattice
    mask = lat.mode_mask
    pref = 2.0 / lat.units.hbar * lat.cell_volume
    ph = np.exp(1j * lat.omega * w.t)
    plus = pref * ph * np.fft.fftn(w.values[0])
    minus = pref * np.conj(ph) * lat.n_sites * np.fft.ifftn(w.values[1])
    return SpectralField(lat, np.where(mask, plus, 0), np.where(mask, minus, 0), w.t)


def resolve_identity(f: SpectralField) -> SpectralField:
    """Apply the completeness sum (2/hbar) sum |phi^eps(x)><pi^eps(x)| to ``f``."""
    out = from_wave_function(wave_function(f))
    return out.replace(t=f.t)


def probability_density(w: WaveFunction) -> np.ndarray:
    """p^eps(x) = (2/hbar)|psi^eps(x)|^2 / norm_dual, shape (2, n, n, n)."""
    if not w.norm_dual > 0:
        raise ValueError("probability density of a zero-norm state")
    return 2.0 / w.lattice.units.hbar * np.abs(w.values) ** 2 / w.norm_dual


def position_expectation(f: SpectralField) -> np.ndarray:
    """Expectation of x with the density p^eps; coordinates are minimum-image."""
    w = wave_function(f)
    p = probability_density(w).sum(axis=0)
    lat = f.lattice
    return np.array([np.sum(lat.xvec[i] * p) for i in range(3)]) * lat.cell_volume


def biorthogonality_gram(lattice: MomentumLattice, sites, t: float = 0.0) -> np.ndarray:
    """Matrix <pi^eps(x_i)|phi^eps'(x_j)> over ``sites`` x {+, -}.

    Ordering is eps-major: index ``e * len(sites) + i``.
    """
    sites = list(sites)
    ns = len(sites)
    idx = [lattice.site_index(s) for s in sites]
    G = np.zeros((2 * ns, 2 * ns), dtype=complex)
    for ej, e in enumerate(EPS):
        for j, y in enumerate(sites):
            ket = make_position_state(lattice, y, e, "phi", t).backing
            vals = _wf_values(ket, t)  # <pi^eps(x)|ket> for all x and eps
            for ei in range(2):
                for i, ix in enumerate(idx):
                    G[ei * ns + i, ej * ns + j] = vals[ei][ix]
    return G


# -- position operators -------------------------------------------------------

def k_gradient(a: np.ndarray, lattice: MomentumLattice, axis: int) -> np.ndarray:
    """d a / d k_axis by centered differences on the sorted k-grid.

    Second-order one-sided stencils are used at the Brillouin-zone edges; the
    grid is not treated as periodic in k.
    """
    ax = a.ndim - 3 + axis
    s = np.fft.fftshift(a, axes=ax)
    d = np.gradient(s, lattice.dk, axis=ax, edge_order=2)
    return np.fft.ifftshift(d, axes=ax)


def apply_position_operator_kspace(f: SpectralField, variant: str = "covariant",
                                   axis: int = 0) -> SpectralField:
    """k-space position operator along ``axis``.

    ``covariant``: eps i d/dk acting on amp^eps.
    ``newton_wigner``: omega^{1/2} (eps i d/dk) omega^{-1/2}, which equals
    eps i d/dk - i eps c^2 k / (2 omega^2).
    """
    lat = f.lattice
    if variant not in ("covariant", "newton_wigner"):
        raise ValueError(f"unknown variant {variant!r}")
    out = []
    w = np.where(lat.mode_mask, lat.omega, 1.0)
    for eps in EPS:
        a = f.amp(eps)
        if variant == "newton_wigner":
            a = a / np.sqrt(w)
        d = eps * 1j * k_gradient(a, lat, axis)
        if variant == "newton_wigner":
            d = np.sqrt(w) * d
        out.append(np.where(lat.mode_mask, d, 0))
    return f.replace(*out)


def _x_multiply(f: SpectralField, axis: int) -> SpectralField:
    w = wave_function(f)
    x = w.lattice.xvec[axis]
    return from_wave_function(WaveFunction(w.lattice, w.values * x[None], w.t, w.norm_dual))


def apply_position_operator_config(f: SpectralField, axis: int = 0) -> SpectralField:
    """x-hat through the position basis: multiply psi^eps(x) by x and resolve."""
    return _x_multiply(f, axis).replace(t=f.t)


def apply_position_adjoint_config(g: SpectralField, axis: int = 0) -> SpectralField:
    """Adjoint of x-hat with respect to :func:`bracket`: omega x-hat omega^{-1}.

    The pi-flavor eigenvectors satisfy x-hat-dagger |pi(x)> = x |pi(x)>.
    """
    lat = g.lattice
    w = np.where(lat.mode_mask, lat.omega, 1.0)
    inner = g.replace(g.amp_plus / w, g.amp_minus / w)
    h = _x_multiply(inner, axis)
    return g.replace(np.where(lat.mode_mask, w * h.amp_plus, 0),
                     np.where(lat.mode_mask, w * h.amp_minus, 0))


def tail_fraction(values: np.ndarray, lattice: MomentumLattice, radius: float,
                  center=(0.0, 0.0, 0.0), power: int = 1) -> float:
    """Fraction of sum |v|^power lying farther than ``radius`` from ``center``.

    Distances use the minimum-image convention on the periodic box.
    """
    c = np.asarray(center, dtype=float).reshape(3, 1, 1, 1)
    L = lattice.box
    d = (lattice.xvec - c + L / 2) % L - L / 2
    r = np.sqrt(np.sum(d**2, axis=0))
    mass = np.abs(values) ** power
    tot = float(np.sum(mass))
    return float(np.sum(mass[r > radius + 1e-12 * lattice.dx]) / tot) if tot > 0 else 0.0
