"""Klein-Gordon scalar products, conjugate fields, currents and evolution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (
    ConfigField,
    MomentumLattice,
    SpectralField,
    ZeroModeError,
    analyze,
    synthesize,
)

__all__ = [
    "FourCurrent",
    "Hyperplane",
    "conjugate_field",
    "conjugate_spectral",
    "mostafazadeh_product",
    "kg_product",
    "flat_product",
    "mostafazadeh_product_config",
    "kg_product_config",
    "sp_product_config",
    "four_current",
    "kg_charge_current",
    "total_density",
    "continuity_residual",
    "spectral_gradient",
    "evolve",
    "nw_map",
    "two_mode_negative_witness",
]


@dataclass(frozen=True, eq=False)
class FourCurrent:
    j0: np.ndarray
    jvec: np.ndarray  # shape (3, n, n, n)
    t: float
    lattice: MomentumLattice


@dataclass(frozen=True)
class Hyperplane:
    """Equal-time Cauchy surface t = t0; the normal is always (1, 0, 0, 0)."""

    t0: float = 0.0

    @property
    def normal(self) -> tuple[float, float, float, float]:
        return (1.0, 0.0, 0.0, 0.0)


def _check(f1, f2):
    f1.lattice.check_same(f2.lattice)


# -- spectral-side operations ------------------------------------------------

def conjugate_spectral(f: SpectralField) -> SpectralField:
    """phi_c = phi+ - phi-: flip the sign of the negative-frequency sector."""
    return f.replace(f.amp_plus.copy(), -f.amp_minus)


def conjugate_field(c: ConfigField) -> ConfigField:
    """Conjugate field phi_c = i D^{-1/2} d_{ct} phi, evaluated spectrally.

    Raises ``ZeroModeError`` for a massless field with a nonzero k = 0 part.
    """
    return synthesize(conjugate_spectral(analyze(c)))


def mostafazadeh_product(f1: SpectralField, f2: SpectralField) -> complex:
    """Positive-definite product (1/hbar) sum_eps sum_k measure conj(pi1) pi2."""
    _check(f1, f2)
    lat = f1.lattice
    m = lat.measure
    s = np.vdot(m * f1.amp_plus, f2.amp_plus) + np.vdot(m * f1.amp_minus, f2.amp_minus)
    return complex(s / lat.units.hbar)


def kg_product(f1: SpectralField, f2: SpectralField) -> complex:
    """Indefinite Klein-Gordon product (i/hbar) int phi1* <-d_t-> phi2.

    In k-space the negative-frequency sector enters with a minus sign;
    cross terms between sectors cancel exactly at equal times.
    """
    _check(f1, f2)
    lat = f1.lattice
    m = lat.measure
    s = np.vdot(m * f1.amp_plus, f2.amp_plus) - np.vdot(m * f1.amp_minus, f2.amp_minus)
    return complex(s / lat.units.hbar)


def flat_product(f1: SpectralField, f2: SpectralField) -> complex:
    """(1/hbar) sum dk^3/((2pi)^3 2) conj(a1) a2: the product of NW amplitudes."""
    _check(f1, f2)
    lat = f1.lattice
    mask = lat.mode_mask
    s = np.vdot(f1.amp_plus[mask], f2.amp_plus[mask]) + np.vdot(f1.amp_minus[mask], f2.amp_minus[mask])
    return complex(s * lat.flat_measure / lat.units.hbar)


def evolve(f: SpectralField, dt: float) -> SpectralField:
    """Exact free evolution: amp^eps <- exp(-i eps omega dt) amp^eps.

    This is U(dt) = exp(-i omega_hat dt) acting on the amplitudes; the
    evaluation time ``f.t`` is unchanged, so the synthesized field equals the
    original one evaluated at ``f.t + dt``.
    """
    if dt == 0:
        return f
    ph = np.exp(-1j * f.lattice.omega * dt)
    return f.replace(ph * f.amp_plus, np.conj(ph) * f.amp_minus)


def nw_map(f: SpectralField, direction: str = "to_nw") -> SpectralField:
    """Similarity map to (``to_nw``) or from (``from_nw``) Newton-Wigner amplitudes.

    ``to_nw`` multiplies by omega^{-1/2}, so that :func:`mostafazadeh_product`
    of the inputs equals :func:`flat_product` of the outputs.
    """
    lat = f.lattice
    if direction not in ("to_nw", "from_nw"):
        raise ValueError(f"direction must be 'to_nw' or 'from_nw', got {direction!r}")
    if lat.massless and direction == "to_nw":
        zero = max(abs(f.amp_plus[0, 0, 0]), abs(f.amp_minus[0, 0, 0]))
        if zero > 1e-12 * max(f.scale(), 1e-300):
            raise ZeroModeError("NW map on a nonzero massless k = 0 amplitude")
    w = np.where(lat.mode_mask, lat.omega, 1.0)
    p = -0.5 if direction == "to_nw" else 0.5
    factor = np.where(lat.mode_mask, w**p, 0.0)
    return f.replace(factor * f.amp_plus, factor * f.amp_minus)


# -- configuration-space cross checks ---------------------------------------

def _at(f: SpectralField, plane: Hyperplane | None) -> ConfigField:
    return synthesize(f if plane is None else f.replace(t=plane.t0))


def mostafazadeh_product_config(f1: SpectralField, f2: SpectralField,
                                plane: Hyperplane | None = None) -> complex:
    """(i/hbar) sum_x dx^3 phi1* <-d_t-> phi2c on an equal-time slice."""
    _check(f1, f2)
    a = _at(f1, plane)
    b = _at(conjugate_spectral(f2), plane)
    lat = f1.lattice
    s = np.vdot(a.phi, b.dphi_dt) - np.vdot(a.dphi_dt, b.phi)
    return complex(1j * s * lat.cell_volume / lat.units.hbar)


def kg_product_config(f1: SpectralField, f2: SpectralField,
                      plane: Hyperplane | None = None) -> complex:
    """(i/hbar) sum_x dx^3 phi1* <-d_t-> phi2 on an equal-time slice."""
    _check(f1, f2)
    a, b = _at(f1, plane), _at(f2, plane)
    lat = f1.lattice
    s = np.vdot(a.phi, b.dphi_dt) - np.vdot(a.dphi_dt, b.phi)
    return complex(1j * s * lat.cell_volume / lat.units.hbar)


def sp_product_config(f1: SpectralField, f2: SpectralField,
                      plane: Hyperplane | None = None) -> complex:
    """(2c/hbar) sum_eps <phi1^eps | D^{1/2} phi2^eps> with a dx^3 site sum."""
    _check(f1, f2)
    lat = f1.lattice
    u = lat.units
    total = 0j
    for eps in (1, -1):
        g1 = _sector(f1, eps)
        g2 = _sector(f2, eps)
        c1, c2 = _at(g1, plane), _at(_d_half(g2), plane)
        total += np.vdot(c1.phi, c2.phi)
    return complex(2 * u.c * total * lat.cell_volume / u.hbar)


def _sector(f: SpectralField, eps: int) -> SpectralField:
    z = np.zeros_like(f.amp_plus)
    return f.replace(f.amp_plus, z) if eps > 0 else f.replace(z, f.amp_minus)


def _d_half(f: SpectralField) -> SpectralField:
    # D^{1/2} = omega / c on every mode
    w = f.lattice.omega / f.lattice.units.c
    return f.replace(w * f.amp_plus, w * f.amp_minus)


# -- currents ----------------------------------------------------------------

def spectral_gradient(a: np.ndarray, lattice: MomentumLattice) -> np.ndarray:
    """Gradient of a periodic array via FFT; returns shape (3, n, n, n)."""
    ah = np.fft.fftn(a)
    return np.stack([np.fft.ifftn(1j * lattice.kvec[i] * ah) for i in range(3)])


def _current(p1: ConfigField, p2: ConfigField, pref0: complex, prefi: complex) -> FourCurrent:
    lat = p1.lattice
    g1 = spectral_gradient(p1.phi, lat)
    g2 = spectral_gradient(p2.phi, lat)
    a1 = np.conj(p1.phi)
    j0 = pref0 * (a1 * p2.dphi_dt - np.conj(p1.dphi_dt) * p2.phi)
    jv = prefi * (a1[None] * g2 - np.conj(g1) * p2.phi[None])
    return FourCurrent(np.real(j0), np.real(jv), p1.t, lat)


def four_current(f1: ConfigField, f2: ConfigField) -> FourCurrent:
    """J^mu = (i/hbar) phi1* <-d^mu-> phi2c with mostly-minus metric.

    Returns real parts; for f1 = f2 the current is real analytically.
    """
    _check(f1, f2)
    if f1.t != f2.t:
        raise ValueError(f"fields at different times {f1.t} and {f2.t}")
    u = f1.lattice.units
    f2c = conjugate_field(f2)
    return _current(f1, f2c, 1j / (u.hbar * u.c), -1j / u.hbar)


def kg_charge_current(f: ConfigField, q: float = 1.0) -> FourCurrent:
    """Charge current i g phi* <-d^mu-> phi with g = q c / hbar."""
    u = f.lattice.units
    g = q * u.c / u.hbar
    return _current(f, f, 1j * g / u.c, -1j * g)


def total_density(j: FourCurrent) -> float:
    """sum_x dx^3 J^0."""
    return float(np.sum(j.j0) * j.lattice.cell_volume)


def continuity_residual(j_prev: FourCurrent, j_mid: FourCurrent, j_next: FourCurrent,
                        norm: str = "max") -> float:
    """Size of d_{ct} J^0 + div J, centered time difference around ``j_mid``.

    ``norm="l2"`` returns (sum_x dx^3 |r|^2)^{1/2}, which for band-limited
    currents does not depend on the sampling grid, so residuals on a coarse and
    a refined lattice compare like for like; ``norm="max"`` is the pointwise
    maximum over the sites of this lattice.
    """
    lat = j_mid.lattice
    for j in (j_prev, j_next):
        lat.check_same(j.lattice)
    dt_a = j_mid.t - j_prev.t
    dt_b = j_next.t - j_mid.t
    if dt_a <= 0 or not np.isclose(dt_a, dt_b, rtol=1e-9, atol=0):
        raise ValueError("slices must be equally spaced and increasing in time")
    c = lat.units.c
    dj0 = (j_next.j0 - j_prev.j0) / (2 * c * dt_a)
    div = sum(np.real(spectral_gradient(j_mid.jvec[i], lat)[i]) for i in range(3))
    r = dj0 + div
    if norm == "max":
        return float(np.max(np.abs(r)))
    if norm != "l2":
        raise ValueError(f"unknown norm {norm!r}")
    return float(np.sqrt(np.sum(np.abs(r) ** 2) * lat.cell_volume))


def two_mode_negative_witness(lattice: MomentumLattice) -> SpectralField:
    """A field with one positive- and one heavier negative-frequency mode.

    Its Klein-Gordon norm is negative while its Mostafazadeh norm is positive.
    """
    n = lattice.n
    f = SpectralField.zeros(lattice)
    i1, i2 = (1, 0, 0), (min(3, n // 2 - 1), 0, 0)
    f.amp_plus[i1] = 1.0 / lattice.measure[i1]
    f.amp_minus[i2] = 2.0 / lattice.measure[i2]
    return f
