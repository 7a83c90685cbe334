"""Periodic momentum lattice, spectral fields and the covariant transform.

A field on the lattice is stored as two amplitude arrays ``amp_plus`` and
``amp_minus`` (the epsilon = +/- sectors) in standard FFT ordering.  The
configuration-space field at time ``t`` is

    phi(x) = sum_eps sum_k measure(k) amp_eps(k) exp(-i eps (omega_k t - k.x))

with ``measure = dk^3 / ((2 pi)^3 2 omega_k)``.  Amplitudes carry no factor of
sqrt(hbar); hbar is reinstated by the scalar products and brackets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "LatticeMismatchError",
    "ZeroModeError",
    "UnitSystem",
    "MomentumLattice",
    "SpectralField",
    "ConfigField",
    "build_lattice",
    "apply_spectral_power",
    "synthesize",
    "analyze",
    "reflect",
    "gaussian_smearing",
    "plane_wave",
    "random_field",
    "refine",
]

ZERO_MODE_RTOL = 1e-12


class LatticeMismatchError(ValueError):
    """Raised when two objects living on different lattices are combined."""


class ZeroModeError(ValueError):
    """Raised when the massless k = 0 mode would need a singular factor."""


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    c: float = 1.0
    eps0: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "c", "eps0"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if not (np.isfinite(self.mass) and self.mass >= 0):
            raise ValueError(f"mass must be finite and >= 0, got {self.mass!r}")

    @property
    def inverse_compton(self) -> float:
        """m c / hbar, the mass term of the operator D = -lap + (mc/hbar)^2."""
        return self.mass * self.c / self.hbar

    def with_mass(self, mass: float) -> "UnitSystem":
        return UnitSystem(self.hbar, self.c, self.eps0, mass)


@dataclass(frozen=True, eq=False)
class MomentumLattice:
    """Cubic periodic lattice of ``n`` sites per axis with spacing ``dx``.

    All derived arrays are computed once.  For ``mass == 0`` the k = 0 cell is
    the zero mode: ``omega`` and ``measure`` are 0 there and the cell is
    excluded from every sum (see ``mode_mask``).
    """

    n: int
    dx: float
    units: UnitSystem = field(default_factory=UnitSystem)

    @property
    def n_per_axis(self) -> int:
        return self.n

    @property
    def k_values(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.k_axis,) * 3

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def n_sites(self) -> int:
        return self.n**3

    @property
    def box(self) -> float:
        return self.n * self.dx

    @property
    def volume(self) -> float:
        return self.box**3

    @property
    def dk(self) -> float:
        return 2 * np.pi / (self.n * self.dx)

    @property
    def cell_volume(self) -> float:
        return self.dx**3

    @property
    def massless(self) -> bool:
        return self.units.mass == 0

    @cached_property
    def k_axis(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n, self.dx)

    @cached_property
    def x_axis(self) -> np.ndarray:
        """Site coordinates in FFT ordering, wrapped into [-L/2, L/2)."""
        i = np.arange(self.n)
        return self.dx * np.where(i < self.n // 2, i, i - self.n)

    @cached_property
    def kvec(self) -> np.ndarray:
        return np.stack(np.meshgrid(self.k_axis, self.k_axis, self.k_axis, indexing="ij"))

    @cached_property
    def xvec(self) -> np.ndarray:
        return np.stack(np.meshgrid(self.x_axis, self.x_axis, self.x_axis, indexing="ij"))

    @cached_property
    def k2(self) -> np.ndarray:
        return np.sum(self.kvec**2, axis=0)

    @cached_property
    def kmag(self) -> np.ndarray:
        return np.sqrt(self.k2)

    @cached_property
    def radius(self) -> np.ndarray:
        """Minimum-image distance of every site from the origin."""
        return np.sqrt(np.sum(self.xvec**2, axis=0))

    @cached_property
    def omega(self) -> np.ndarray:
        u = self.units
        w = np.sqrt(self.k2 * u.c**2 + (u.mass * u.c**2 / u.hbar) ** 2)
        if self.massless:
            w = u.c * self.kmag
        return w

    @cached_property
    def mode_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        if self.massless:
            mask[0, 0, 0] = False
        return mask

    @cached_property
    def measure(self) -> np.ndarray:
        """dk^3 / ((2 pi)^3 2 omega), zero at an excluded zero mode."""
        w = np.where(self.mode_mask, self.omega, 1.0)
        return np.where(self.mode_mask, self.flat_measure / w, 0.0)

    @property
    def flat_measure(self) -> float:
        """dk^3 / ((2 pi)^3 2), the measure without the 1/omega factor."""
        return self.dk**3 / ((2 * np.pi) ** 3 * 2)

    @cached_property
    def d_eigen(self) -> np.ndarray:
        """Eigenvalues k^2 + (mc/hbar)^2 of D = -lap + (mc/hbar)^2."""
        return self.k2 + self.units.inverse_compton**2

    def site_index(self, x) -> tuple[int, int, int]:
        """Index triple of the lattice site at coordinate ``x``.

        Coordinates are taken modulo the box.  Raises ``ValueError`` when ``x``
        is not a lattice point.
        """
        x = np.asarray(x, dtype=float).reshape(3)
        q = x / self.dx
        j = np.rint(q)
        if np.any(np.abs(q - j) > 1e-9 * max(1.0, np.max(np.abs(q)))):
            raise ValueError(f"point {x.tolist()} is not on the lattice (dx={self.dx})")
        return tuple(int(v) % self.n for v in j)

    def same_as(self, other: "MomentumLattice") -> bool:
        return self is other or (
            self.n == other.n and self.dx == other.dx and self.units == other.units
        )

    def check_same(self, other: "MomentumLattice"):
        if not self.same_as(other):
            raise LatticeMismatchError(
                f"lattice mismatch: n={self.n}, dx={self.dx}, {self.units} vs "
                f"n={other.n}, dx={other.dx}, {other.units}"
            )

    def header(self) -> dict:
        u = self.units
        return {"n": self.n, "dx": self.dx, "m": u.mass, "hbar": u.hbar, "c": u.c,
                "eps0": u.eps0, "ordering": "standard-fft"}


def build_lattice(n_per_axis: int, dx: float, units: UnitSystem | None = None) -> MomentumLattice:
    """Build a lattice; ``n_per_axis`` must be a power of two >= 8 and ``dx > 0``."""
    n = int(n_per_axis)
    if n != n_per_axis or n < 8 or n & (n - 1):
        raise ValueError(f"n_per_axis must be a power of two >= 8, got {n_per_axis!r}")
    if not (np.isfinite(dx) and dx > 0):
        raise ValueError(f"dx must be > 0, got {dx!r}")
    return MomentumLattice(n, float(dx), units or UnitSystem())


@dataclass(frozen=True, eq=False)
class SpectralField:
    lattice: MomentumLattice
    amp_plus: np.ndarray
    amp_minus: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("amp_plus", "amp_minus"):
            a = np.asarray(getattr(self, name), dtype=complex)
            if a.shape != self.lattice.shape:
                raise ValueError(f"{name} has shape {a.shape}, lattice is {self.lattice.shape}")
            object.__setattr__(self, name, a)

    @classmethod
    def zeros(cls, lattice: MomentumLattice, t: float = 0.0) -> "SpectralField":
        z = np.zeros(lattice.shape, dtype=complex)
        return cls(lattice, z, z.copy(), t)

    def amp(self, eps: int) -> np.ndarray:
        return self.amp_plus if eps > 0 else self.amp_minus

    def replace(self, amp_plus=None, amp_minus=None, t=None) -> "SpectralField":
        return SpectralField(
            self.lattice,
            self.amp_plus if amp_plus is None else amp_plus,
            self.amp_minus if amp_minus is None else amp_minus,
            self.t if t is None else t,
        )

    def is_real(self, rtol: float = 1e-12) -> bool:
        """True iff amp_minus == conj(amp_plus), i.e. phi(x) is real."""
        scale = max(np.max(np.abs(self.amp_plus)), np.max(np.abs(self.amp_minus)), 1e-300)
        return bool(np.max(np.abs(self.amp_minus - np.conj(self.amp_plus))) <= rtol * scale)

    def scale(self) -> float:
        return float(max(np.max(np.abs(self.amp_plus)), np.max(np.abs(self.amp_minus))))

    def _check(self, other):
        self.lattice.check_same(other.lattice)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return self.replace(self.amp_plus + other.amp_plus, self.amp_minus + other.amp_minus)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return self.replace(self.amp_plus - other.amp_plus, self.amp_minus - other.amp_minus)

    def __mul__(self, a: complex) -> "SpectralField":
        return self.replace(a * self.amp_plus, a * self.amp_minus)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ConfigField:
    lattice: MomentumLattice
    phi: np.ndarray
    dphi_dt: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("phi", "dphi_dt"):
            a = np.asarray(getattr(self, name), dtype=complex)
            if a.shape != self.lattice.shape:
                raise ValueError(f"{name} has shape {a.shape}, lattice is {self.lattice.shape}")
            object.__setattr__(self, name, a)


def reflect(a: np.ndarray, axes=(-3, -2, -1)) -> np.ndarray:
    """Return ``b`` with ``b[k] = a[-k]`` in FFT ordering."""
    return np.roll(np.flip(a, axis=axes), 1, axis=axes)


def apply_spectral_power(f: SpectralField, s: float) -> SpectralField:
    """Apply D**s, D = -lap + (mc/hbar)^2, to both frequency sectors."""
    if s == 0:
        return f.replace(f.amp_plus.copy(), f.amp_minus.copy())
    lat = f.lattice
    eig = lat.d_eigen
    if s < 0 and lat.massless:
        zero = max(abs(f.amp_plus[0, 0, 0]), abs(f.amp_minus[0, 0, 0]))
        if zero > ZERO_MODE_RTOL * max(f.scale(), 1e-300):
            raise ZeroModeError("negative power of D on a nonzero massless k = 0 amplitude")
    with np.errstate(divide="ignore"):
        factor = np.where(eig > 0, np.where(eig > 0, eig, 1.0) ** s, 0.0)
    return f.replace(factor * f.amp_plus, factor * f.amp_minus)


def synthesize(f: SpectralField) -> ConfigField:
    """Evaluate phi and d(phi)/dt at time ``f.t`` by FFT."""
    lat = f.lattice
    w, meas, N = lat.omega, lat.measure, lat.n_sites
    a = meas * f.amp_plus * np.exp(-1j * w * f.t)
    b = meas * f.amp_minus * np.exp(1j * w * f.t)
    phi = N * np.fft.ifftn(a) + np.fft.fftn(b)
    dphi = N * np.fft.ifftn(-1j * w * a) + np.fft.fftn(1j * w * b)
    return ConfigField(lat, phi, dphi, f.t)


def analyze(cfg: ConfigField, rtol: float = 1e-10) -> SpectralField:
    """Inverse of :func:`synthesize`: split a configuration field into its
    positive and negative frequency amplitudes.

    For a massless lattice the k = 0 Fourier coefficients of phi and
    d(phi)/dt cannot be represented; a ``ZeroModeError`` is raised when either
    exceeds ``rtol`` times the field scale.
    """
    lat = cfg.lattice
    N = lat.n_sites
    ph = np.fft.fftn(cfg.phi) / N
    dph = np.fft.fftn(cfg.dphi_dt) / N
    mask = lat.mode_mask
    if lat.massless:
        scale = max(np.max(np.abs(ph)), np.max(np.abs(dph)) / max(np.max(lat.omega), 1e-300), 1e-300)
        if abs(ph[0, 0, 0]) > rtol * scale or abs(dph[0, 0, 0]) > rtol * scale * np.max(lat.omega):
            raise ZeroModeError("massless field has a nonzero spatial mean or mean velocity")
    w = np.where(mask, lat.omega, 1.0)
    a = 0.5 * (ph + 1j * dph / w)
    bneg = 0.5 * (ph - 1j * dph / w)
    meas = np.where(mask, lat.measure, 1.0)
    plus = np.where(mask, a * np.exp(1j * lat.omega * cfg.t) / meas, 0)
    minus = np.where(mask, reflect(bneg) * np.exp(-1j * lat.omega * cfg.t) / meas, 0)
    return SpectralField(lat, plus, minus, cfg.t)


def gaussian_smearing(lattice: MomentumLattice, sigma: float | None = None) -> np.ndarray:
    """UV factor exp(-k^2 sigma^2 / 2); ``sigma`` defaults to 2 dx."""
    sigma = 2 * lattice.dx if sigma is None else sigma
    return np.exp(-0.5 * lattice.k2 * sigma**2)


def plane_wave(lattice: MomentumLattice, index, eps: int = 1, amplitude: complex = 1.0,
               t: float = 0.0) -> SpectralField:
    """Single-mode field at lattice wavevector ``index`` (integer triple).

    The amplitude is scaled by the lattice delta ``(2 pi)^3 2 omega / dk^3`` so
    the synthesized field is ``amplitude * exp(-i eps (omega t - q.x))``.
    """
    f = SpectralField.zeros(lattice, t)
    j = tuple(int(i) % lattice.n for i in index)
    if not lattice.mode_mask[j]:
        raise ZeroModeError("the massless k = 0 mode carries no amplitude")
    f.amp(eps)[j] = amplitude / lattice.measure[j]
    return f


def random_field(lattice: MomentumLattice, rng: np.random.Generator, real: bool = False,
                 bandlimit: float | None = None, t: float = 0.0) -> SpectralField:
    """Gaussian random amplitudes of unit scale in both sectors.

    ``bandlimit`` keeps only modes with every |k_i| < bandlimit;
    ``real=True`` enforces amp_minus = conj(amp_plus).
    """
    shape = (2,) + lattice.shape
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    mask = lattice.mode_mask.copy()
    if bandlimit is not None:
        mask &= np.all(np.abs(lattice.kvec) < bandlimit, axis=0)
    plus = np.where(mask, z[0], 0)
    minus = np.conj(plus) if real else np.where(mask, z[1], 0)
    return SpectralField(lattice, plus, minus, t)


def refine(f: SpectralField, factor: int = 2) -> SpectralField:
    """Embed ``f`` on a lattice with ``factor`` times more sites in the same box.

    Amplitudes are copied to the same wavevectors; the synthesized field at
    the original sites is unchanged for fields without Nyquist content.
    """
    lat = f.lattice
    fine = build_lattice(lat.n * factor, lat.dx / factor, lat.units)
    idx = np.fft.fftfreq(lat.n, 1.0 / lat.n).astype(int) % fine.n
    ix = np.ix_(idx, idx, idx)
    out = SpectralField.zeros(fine, f.t)
    # measure is identical at shared wavevectors: same dk and omega
    out.amp_plus[ix] = f.amp_plus
    out.amp_minus[ix] = f.amp_minus
    return out
