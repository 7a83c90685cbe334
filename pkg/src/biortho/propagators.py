"""Klein-Gordon Green functions, localized causal states and microcausality.

Every spherically symmetric quantity reduces to a radial momentum integral

    G_f(t, r) = c/(4 pi^2) int_0^inf dk k^2/omega_k j0(k r)
                [f_+ exp(-i omega t) + f_- exp(i omega t)] exp(-k^2 sigma^2/2)

with (f_+, f_-) = (1, 0) for the positive-frequency Wightman function G+,
(0, 1) for G-, (-i, i) for the commutator function G and (1, 1) for the
Hadamard function G1.  The normalization is fixed by d_{ct} G |_{t=0} = -delta.
Each kind is integrated on its own so that iG = G+ - G- and G1 = G+ + G- are
genuine numerical checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import MomentumLattice, UnitSystem
from .position import bracket, make_position_state
from .quadrature import QuadratureError, panel_quad

__all__ = [
    "KINDS",
    "PropagatorRequest",
    "LocalizedStateProfile",
    "evaluate_propagator",
    "equal_time_commutator_slope",
    "smeared_delta",
    "localized_state_values",
    "localized_state_profile",
    "l1_fraction",
    "hegerfeldt_tail",
    "lattice_localized_state",
    "microcausality_split",
    "canonical_commutator",
    "PointSource",
    "source_convolution",
    "QuadratureError",
]

KINDS = {
    "wightman_plus": (1.0, 0.0),
    "wightman_minus": (0.0, 1.0),
    "commutator": (-1j, 1j),
    "hadamard": (1.0, 1.0),
}
PROFILE_TAGS = ("plus", "minus", "causal_psi", "causal_psi_c")
# exp(-k^2 sigma^2 / 2) < 1e-17 beyond this many 1/sigma
KMAX_SIGMAS = 9.0
MAX_CHUNK = 4_000_000


@dataclass(frozen=True)
class PropagatorRequest:
    kind: str
    mass: float = 0.0
    smearing: float = 0.0
    points: tuple = ()
    units: UnitSystem = field(default_factory=lambda: UnitSystem(mass=0.0))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown propagator kind {self.kind!r}; expected one of {sorted(KINDS)}")
        if not self.mass >= 0:
            raise ValueError("mass must be >= 0")
        if not self.smearing >= 0:
            raise ValueError("smearing must be >= 0")
        pts = tuple((float(t), float(r)) for t, r in self.points)
        if any(r < 0 for _, r in pts):
            raise ValueError("r must be >= 0")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True, eq=False)
class LocalizedStateProfile:
    eps: str
    t: float
    r: np.ndarray
    values: np.ndarray
    sigma: float
    l1_shell_fraction: float

    @property
    def samples(self):
        return [(self.t, float(r), complex(v)) for r, v in zip(self.r, self.values)]


def _omega(k, mass, u: UnitSystem):
    return np.sqrt((k * u.c) ** 2 + (mass * u.c**2 / u.hbar) ** 2)


def _j0(x):
    return np.sinc(x / np.pi)


def _radial(t, r, weight, sigma, mass, u, rtol=1e-12, atol=None):
    """int_0^kmax dk k^2 j0(kr) S(k) weight(k, omega, t) for arrays t, r.

    The default absolute tolerance is 1e-14 of int k^2 S dk ~ sigma^-3
    (times sigma/c for the 1/omega kernels), so chunks whose values all
    vanish to roundoff still converge.
    """
    if not sigma > 0:
        raise ValueError("smearing sigma > 0 is required for pointwise evaluation")
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    kmax = KMAX_SIGMAS / sigma
    if atol is None:
        atol = 1e-14 * sigma**-3 * max(1.0, sigma / u.c)
    out = np.empty(t.shape, dtype=complex)
    if t.size == 0:
        return out
    span = float(np.max(r) + u.c * np.max(np.abs(t)))
    # node count at the deepest doubling we expect to need
    npts = int(np.ceil(kmax * (span + sigma) / np.pi)) * 24 * 2**4
    chunk = max(1, MAX_CHUNK // npts)
    tf, rf, of = t.ravel(), r.ravel(), out.reshape(-1)
    for s in range(0, tf.size, chunk):
        tt, rr = tf[s:s + chunk, None], rf[s:s + chunk, None]

        def f(k):
            w = _omega(k, mass, u)[None]
            return (k[None] ** 2 * _j0(k[None] * rr) * np.exp(-0.5 * (k[None] * sigma) ** 2)
                    * weight(k[None], w, tt))

        span_c = float(np.max(rr) + u.c * np.max(np.abs(tt)))
        val, _ = panel_quad(f, 0.0, kmax, period=2 * np.pi / (span_c + sigma), rtol=rtol, atol=atol)
        of[s:s + chunk] = val
    return out


def _kernel(kind):
    fp, fm = KINDS[kind]

    def weight(k, w, t):
        # Gauss-Legendre nodes are interior, so 1/omega is finite even for m = 0
        out = 0
        if fp:
            out = out + fp * np.exp(-1j * w * t)
        if fm:
            out = out + fm * np.exp(1j * w * t)
        return out / w

    return weight


def evaluate_propagator(req: PropagatorRequest) -> np.ndarray:
    """Values of the requested Green function at ``req.points`` = [(t, r), ...]."""
    u = req.units
    if not req.points:
        return np.zeros(0, dtype=complex)
    t, r = np.array(req.points).T
    val = _radial(t, r, _kernel(req.kind), req.smearing, req.mass, u)
    return u.c / (4 * np.pi**2) * val


def smeared_delta(r, sigma: float) -> np.ndarray:
    """3D Gaussian (2 pi sigma^2)^{-3/2} exp(-r^2 / (2 sigma^2))."""
    r = np.asarray(r, dtype=float)
    return (2 * np.pi * sigma**2) ** -1.5 * np.exp(-0.5 * (r / sigma) ** 2)


def _radial_l1(r, v):
    return float(np.trapezoid(r**2 * np.abs(v), r))


def equal_time_commutator_slope(m: float, r_grid, sigma: float, h: float | None = None,
                                units: UnitSystem | None = None, rtol: float = 1e-3) -> np.ndarray:
    """Centered difference (G(h, r) - G(-h, r)) / (2 c h) of the commutator function.

    The step is halved once; if the two estimates differ by more than ``rtol``
    in relative L1 norm the step is deemed too large and ``ValueError`` is
    raised.
    """
    u = units or UnitSystem(mass=m)
    r = np.asarray(r_grid, dtype=float)
    h = 0.01 * sigma / u.c if h is None else float(h)

    def slope(hh):
        pts = [(hh, x) for x in r] + [(-hh, x) for x in r]
        g = evaluate_propagator(PropagatorRequest("commutator", m, sigma, pts, u)).real
        return (g[: len(r)] - g[len(r):]) / (2 * u.c * hh)

    s1, s2 = slope(h), slope(h / 2)
    denom = max(_radial_l1(r, s2), 1e-300)
    if _radial_l1(r, s1 - s2) / denom > rtol:
        raise ValueError(f"time step h={h} too large for the slope estimate")
    return s2


def localized_state_values(eps_tag: str, m: float, t: float, r, sigma: float,
                           units: UnitSystem | None = None) -> np.ndarray:
    """Wave function of a state localized at the origin at t = 0.

    psi^eps(t, r) = (hbar/2) / (2 pi^2) int dk k^2 j0(kr) exp(-i eps omega t) S(k);
    ``causal_psi_c`` is (psi+ + psi-)/sqrt(2) and ``causal_psi`` is
    (psi+ - psi-)/sqrt(2).
    """
    if eps_tag not in PROFILE_TAGS:
        raise ValueError(f"unknown profile tag {eps_tag!r}; expected one of {PROFILE_TAGS}")
    u = units or UnitSystem(mass=m)
    r = np.asarray(r, dtype=float)
    tt = np.full(r.shape, float(t))
    coef = {"plus": (1.0, 0.0), "minus": (0.0, 1.0),
            "causal_psi_c": (2**-0.5, 2**-0.5), "causal_psi": (2**-0.5, -(2**-0.5))}[eps_tag]

    def weight(k, w, tm):
        out = 0
        if coef[0]:
            out = out + coef[0] * np.exp(-1j * w * tm)
        if coef[1]:
            out = out + coef[1] * np.exp(1j * w * tm)
        return out

    return u.hbar / 2 / (2 * np.pi**2) * _radial(tt, r, weight, sigma, m, u)


def l1_fraction(r, values, inside) -> float:
    """Fraction of the 3D L1 mass int r^2 |v| dr on the boolean mask ``inside``."""
    r = np.asarray(r, dtype=float)
    w = r**2 * np.abs(values)
    tot = np.trapezoid(w, r)
    return float(np.trapezoid(np.where(inside, w, 0.0), r) / tot) if tot > 0 else 0.0


def localized_state_profile(eps_tag: str, m: float, t: float, r_grid, sigma: float,
                            units: UnitSystem | None = None) -> LocalizedStateProfile:
    """Profile plus the L1 fraction within |r - c|t|| <= 3 sigma."""
    u = units or UnitSystem(mass=m)
    r = np.asarray(r_grid, dtype=float)
    v = localized_state_values(eps_tag, m, t, r, sigma, u)
    frac = l1_fraction(r, v, np.abs(r - u.c * abs(t)) <= 3 * sigma)
    return LocalizedStateProfile(eps_tag, float(t), r, v, float(sigma), frac)


def hegerfeldt_tail(m: float, t_small: float, r_grid, sigma: float,
                    units: UnitSystem | None = None) -> dict:
    """L1 fractions beyond r = c t + 5 sigma for the positive-frequency and the
    causal (psi_c) localized states, and their ratio."""
    if t_small < 0:
        raise ValueError("t_small must be >= 0")
    u = units or UnitSystem(mass=m)
    r = np.asarray(r_grid, dtype=float)
    outside = r > u.c * t_small + 5 * sigma
    vp = localized_state_values("plus", m, t_small, r, sigma, u)
    vc = localized_state_values("causal_psi_c", m, t_small, r, sigma, u)
    fp, fc = l1_fraction(r, vp, outside), l1_fraction(r, vc, outside)
    return {"positive": fp, "causal": fc, "ratio": fp / fc if fc > 0 else np.inf}


def lattice_localized_state(lattice: MomentumLattice, eps_tag: str, t: float,
                            sigma: float) -> np.ndarray:
    """The same localized-state wave functions on the 3D lattice.

    psi^eps(x) = <pi^eps(x)| evolved |phi^eps(0)>, with the UV factor S(k).
    """
    lat = lattice
    u = lat.units
    S = np.exp(-0.5 * lat.k2 * sigma**2) * lat.mode_mask
    pref = u.hbar * lat.flat_measure
    plus = pref * lat.n_sites * np.fft.ifftn(S * np.exp(-1j * lat.omega * t))
    minus = pref * np.fft.fftn(S * np.exp(1j * lat.omega * t))
    return {"plus": plus, "minus": minus,
            "causal_psi_c": (plus + minus) / np.sqrt(2),
            "causal_psi": (plus - minus) / np.sqrt(2)}[eps_tag]


def microcausality_split(lattice: MomentumLattice, x, y, t: float = 0.0):
    """(<phi+(x)|pi+(y)>, <phi-(x)|pi-(y)>, sum) on the equal-time slice t."""
    tp = bracket(make_position_state(lattice, x, 1, "phi", t).backing,
                 make_position_state(lattice, y, 1, "pi", t).backing)
    tm = bracket(make_position_state(lattice, x, -1, "phi", t).backing,
                 make_position_state(lattice, y, -1, "pi", t).backing)
    return tp, tm, tp + tm


def canonical_commutator(lattice: MomentumLattice, x, y) -> complex:
    """[phi(x), pi(y)] of the free lattice field, from its mode expansion.

    phi = sum_k V^{-1/2} sqrt(hbar/(2 omega)) (a_k e^{ik.x} + h.c.), pi = d_t phi;
    the commutator is sum_k V^{-1} (hbar/(2 omega)) i omega (e^{ik.(x-y)} + c.c.).
    """
    lat = lattice
    ix, iy = lat.site_index(x), lat.site_index(y)
    d = np.array([lat.x_axis[a] - lat.x_axis[b] for a, b in zip(ix, iy)])
    kd = np.tensordot(d, lat.kvec, axes=1)
    w = np.where(lat.mode_mask, lat.omega, 1.0)
    hb = lat.units.hbar
    terms = lat.mode_mask * (hb / (2 * w)) * 1j * w * 2 * np.cos(kd)
    return complex(np.sum(terms) / lat.volume)


@dataclass(frozen=True, eq=False)
class PointSource:
    """Source j(t) at a fixed point, sampled on a uniform time grid.

    The source vanishes before ``times[0]``; it is unknown after ``times[-1]``.
    """

    times: np.ndarray
    values: np.ndarray
    position: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or t.shape != v.shape or t.size < 1:
            raise ValueError("times and values must be equal-length 1D arrays")
        if t.size > 1 and not np.allclose(np.diff(t), t[1] - t[0], rtol=1e-9, atol=0):
            raise ValueError("source time grid must be uniform")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 1.0


def source_convolution(src: PointSource, x, t_x: float, sigma: float, mass: float = 0.0,
                       units: UnitSystem | None = None) -> complex:
    """phi(x) = c int dt_y G(t_x - t_y, |x - y|) j(t_y), trapezoid rule in t_y.

    Uses the sigma-smeared commutator function.  Raises ``ValueError`` when
    ``t_x`` lies beyond the sampled source window.
    """
    u = units or UnitSystem(mass=mass)
    if t_x > src.times[-1] + 1e-12 * max(1.0, abs(t_x)):
        raise ValueError(f"t_x={t_x} beyond the source window ending at {src.times[-1]}")
    r = float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(src.position)))
    sel = src.times <= t_x
    ty, jy = src.times[sel], src.values[sel]
    if ty.size == 0 or not np.any(jy):
        return 0j
    w = np.full(ty.size, src.dt)
    if ty.size > 1:
        w[0] *= 0.5
        if ty[-1] == t_x:
            w[-1] *= 0.5
    pts = [(t_x - s, r) for s in ty]
    g = evaluate_propagator(PropagatorRequest("commutator", mass, sigma, pts, u))
    return complex(u.c * np.sum(w * g * jy))
