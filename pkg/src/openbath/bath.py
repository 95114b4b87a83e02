"""Complex band structures, dissipative density of states, and self-energies.

The bath enters the emitter propagator only through the momentum integral
``Sigma(w) = Omega^2 int d^dk/(2pi)^d 1/(w - eps_k + i gamma_k)``.  For the
1D cosine dissipation band this integral has a closed continuation obtained
by collapsing the elliptical continuum onto a straight cut: the bath is
replaced by an auxiliary one with constant decay Gamma and bandwidth
``2 J_eff``, ``J_eff = sqrt(|J^2 - Gamma^2/4|)``.  All closed forms below are
expressed through the roots z of ``B z^2 + 2 A z + B = 0`` with
``A = w + i(Gamma + gamma0)`` and ``B = 2 J_eff`` (dispersive, Gamma < 2J) or
``B = 2i J_eff`` (dissipative, Gamma > 2J); the roots satisfy ``z+ z- = 1``
and the contour integral keeps the one inside the unit circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import hyp2f1

from .errors import (
    BranchPoint,
    DegenerateCircle,
    InvalidExponent,
    OnBranchCut,
    OutOfBand,
    UnclassifiedEdge,
)
from .model import BathParams, EmitterConfig

_DEGENERATE_NUDGE = 1e-9  # relative Gamma perturbation at Gamma = 2J


@dataclass(frozen=True)
class FictitiousBath:
    """Auxiliary constant-decay bath that continues the physical self-energy."""

    J_eff: float
    regime: str  # dispersive (Gamma < 2J) | dissipative (Gamma > 2J)
    z_max: float
    Gamma: float
    gamma0: float
    degenerate_perturbed: bool = False

    @property
    def cut_halfwidth(self) -> float:
        return 2.0 * self.J_eff


@dataclass(frozen=True)
class DissipationBandModel:
    """Local power-law model of a dissipation band edge.

    gamma(k) ~ gamma_min + c * Gamma * |k - k0|^mu near the edge, with an
    integration cutoff Lambda and edge degeneracy (number of equivalent
    band-edge points in the Brillouin zone).
    """

    gamma_min: float
    k0: tuple
    mu: float
    c: float
    Lambda: float
    dim: int
    Gamma: float
    degeneracy: int = 1

    @property
    def beta(self) -> float:
        """Edge exponent ratio d/mu controlling the dDOS divergence."""
        return self.dim / self.mu


def fictitious_bath(p: BathParams) -> FictitiousBath:
    Gamma, J = p.Gamma, p.J
    perturbed = False
    if J > 0 and abs(Gamma - 2 * J) <= 1e-12 * max(Gamma, 2 * J):
        # J_eff = 0 makes the closed forms 0/0; nudge Gamma off the circle
        Gamma = Gamma * (1.0 + _DEGENERATE_NUDGE)
        perturbed = True
    J_eff = math.sqrt(abs(J * J - Gamma * Gamma / 4.0))
    regime = "dispersive" if Gamma < 2 * J else "dissipative"
    denom = J - Gamma / 2.0
    z_max = abs((J + Gamma / 2.0) / denom) if denom != 0 else math.inf
    return FictitiousBath(J_eff=J_eff, regime=regime, z_max=z_max,
                          Gamma=Gamma, gamma0=p.gamma0, degenerate_perturbed=perturbed)


# ---------------------------------------------------------------------------
# band structure


def eps_k(k, p: BathParams):
    """Dispersion of the bath band (array-safe)."""
    if p.band_kind in ("cosine_1d", "gapped_cosine_1d", "sqrt_sin_1d", "custom_grid"):
        return 2.0 * p.J * np.cos(np.asarray(k) + p.theta_value)
    if p.band_kind == "cosine_3d":
        return np.zeros(np.shape(np.asarray(k)[..., 0]))
    raise ValueError(p.band_kind)


def gamma_k(k, p: BathParams):
    """Dissipation band (array-safe; k has shape (..., dim) for dim > 1)."""
    k = np.asarray(k, dtype=float)
    if p.band_kind in ("cosine_1d", "gapped_cosine_1d"):
        return p.gamma0 + p.Gamma * (1.0 + np.cos(k))
    if p.band_kind == "sqrt_sin_1d":
        return p.gamma0 + (p.Gamma / 3.0) * np.sqrt(np.abs(np.sin(k)))
    if p.band_kind == "cosine_3d":
        return p.gamma0 + p.Gamma * (3.0 + np.cos(k[..., 0]) + np.cos(k[..., 1]) + np.cos(k[..., 2]))
    if p.band_kind == "custom_grid":
        grid = np.asarray(p.gamma_grid, dtype=float)
        n = grid.shape[0]
        idx = np.rint((k + math.pi) / (2 * math.pi) * n).astype(int) % n
        return grid[idx]
    raise ValueError(p.band_kind)


def complex_band(k, p: BathParams):
    """eps_k - i gamma_k for the configured band."""
    return eps_k(k, p) - 1j * gamma_k(k, p)


def gamma_band_range(p: BathParams) -> tuple:
    """(min, max) of the dissipation band."""
    if p.band_kind in ("cosine_1d", "gapped_cosine_1d"):
        return p.gamma0, p.gamma0 + 2 * p.Gamma
    if p.band_kind == "sqrt_sin_1d":
        return p.gamma0, p.gamma0 + p.Gamma / 3.0
    if p.band_kind == "cosine_3d":
        return p.gamma0, p.gamma0 + 6 * p.Gamma
    if p.band_kind == "custom_grid":
        g = np.asarray(p.gamma_grid, float)
        return float(g.min()), float(g.max())
    raise ValueError(p.band_kind)


def ddos(gamma, p: BathParams, bins: int = 2000):
    """Dissipative density of states D_s(gamma) = int d^dk/(2pi)^d delta(gamma - gamma_k).

    Closed form for the 1D cosine and sqrt-sine bands; k-grid histogram with
    ``bins`` uniform bins otherwise.  Normalized so that the integral over the
    band equals 1.
    """
    gamma = np.asarray(gamma, dtype=float)
    lo, hi = gamma_band_range(p)
    if np.any(gamma < lo - 1e-12) or np.any(gamma > hi + 1e-12):
        raise OutOfBand(f"gamma outside band [{lo}, {hi}]")
    if p.band_kind in ("cosine_1d", "gapped_cosine_1d"):
        u = gamma - p.gamma0
        val = 1.0 / (math.pi * np.sqrt(np.maximum(u * (2 * p.Gamma - u), 0.0)))
        return val
    if p.band_kind == "sqrt_sin_1d":
        u = (3.0 * (gamma - p.gamma0) / p.Gamma) ** 2
        return (36.0 * (gamma - p.gamma0) / (math.pi * p.Gamma**2)) / np.sqrt(np.maximum(1.0 - u * u, 0.0))
    # histogram route
    centers, dens = ddos_histogram(p, bins)
    return np.interp(gamma, centers, dens)


def ddos_histogram(p: BathParams, bins: int = 2000, n_k: int = 0):
    """k-grid histogram estimate of the dDOS; returns (bin centers, density)."""
    lo, hi = gamma_band_range(p)
    if p.dim == 1:
        n = n_k or 2_000_000
        k = -math.pi + 2 * math.pi * (np.arange(n) + 0.5) / n
        g = gamma_k(k, p)
    else:
        n = n_k or 192
        axis = -math.pi + 2 * math.pi * (np.arange(n) + 0.5) / n
        kx, ky, kz = np.meshgrid(axis, axis, axis, indexing="ij", sparse=True)
        g = (p.gamma0 + p.Gamma * (3.0 + np.cos(kx) + np.cos(ky) + np.cos(kz))).ravel()
    hist, edges = np.histogram(g, bins=bins, range=(lo, hi))
    width = edges[1] - edges[0]
    dens = hist / (g.size * width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, dens


# ---------------------------------------------------------------------------
# quadrature self-energies (physical band, first sheet)

_QUAD_START = 64
_QUAD_CAP_1D = 2**20
_QUAD_CAP_AXIS_3D = 256
_QUAD_RTOL = 1e-10


def _branch_curve_distance(omega: complex, p: BathParams, n: int = 4096) -> float:
    k = -math.pi + 2 * math.pi * (np.arange(n) + 0.5) / n
    if p.dim == 1:
        curve = complex_band(k, p)
        return float(np.min(np.abs(omega - curve)))
    # purely dissipative 3D band: continuum on the negative imaginary axis
    lo, hi = gamma_band_range(p)
    if -omega.imag < lo or -omega.imag > hi:
        return min(abs(omega.imag + lo), abs(omega.imag + hi), abs(omega.real) + abs(omega.imag + lo))
    return abs(omega.real)


def self_energy_quadrature(omega: complex, p: BathParams, emitter: EmitterConfig,
                           rtol: float = _QUAD_RTOL, offset: int = 0) -> complex:
    """Sigma(w) by adaptive periodic-trapezoid quadrature of the physical band.

    ``offset`` adds a phase factor exp(i k offset) to the integrand (used for
    real-space / two-emitter matrix elements).  Raises OnBranchCut when w is
    too close to the continuum curve (eps_k, -gamma_k).
    """
    scale = max(abs(omega), p.Gamma + p.gamma0, 2 * p.J, 1.0)
    if _branch_curve_distance(omega, p) < 1e-9 * scale:
        raise OnBranchCut(f"omega={omega} within tolerance of the branch curve")
    om2 = emitter.Omega**2
    if om2 == 0.0:
        return 0.0 + 0.0j

    if p.dim == 1:
        n = _QUAD_START
        prev = None
        while n <= _QUAD_CAP_1D:
            k = -math.pi + 2 * math.pi * (np.arange(n) + 0.5) / n
            integrand = 1.0 / (omega - complex_band(k, p))
            if offset:
                integrand = integrand * np.exp(1j * k * offset)
            val = om2 * np.mean(integrand)
            if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1e-300):
                return complex(val)
            prev = val
            n *= 2
        return complex(prev)

    # 3D tensor product grid with per-axis doubling
    n = 32
    prev = None
    while n <= _QUAD_CAP_AXIS_3D:
        axis = -math.pi + 2 * math.pi * (np.arange(n) + 0.5) / n
        kx, ky, kz = np.meshgrid(axis, axis, axis, indexing="ij", sparse=True)
        gam = p.gamma0 + p.Gamma * (3.0 + np.cos(kx) + np.cos(ky) + np.cos(kz))
        val = om2 * np.mean(1.0 / (omega + 1j * gam))
        if prev is not None and abs(val - prev) <= max(rtol, 1e-8) * max(abs(val), 1e-300):
            return complex(val)
        prev = val
        n *= 2
    return complex(prev)


def self_energy_matrix_quadrature(omega: complex, p: BathParams, emitter: EmitterConfig) -> np.ndarray:
    """2x2 self-energy matrix of two emitters, by direct quadrature with phases."""
    d = emitter.d
    s0 = self_energy_quadrature(omega, p, emitter)
    s12 = self_energy_quadrature(omega, p, emitter, offset=+d)
    s21 = self_energy_quadrature(omega, p, emitter, offset=-d)
    return np.array([[s0, s12], [s21, s0]], dtype=complex)


# ---------------------------------------------------------------------------
# closed-form continued self-energies


def _AB(omega: complex, p: BathParams, fb: Optional[FictitiousBath] = None):
    """A, B of the quadratic B z^2 + 2 A z + B = 0 plus stable (A-B, A+B).

    Near the cut the product (A - B)(A + B) must be formed without the
    catastrophic cancellation of A^2 - B^2; in the dissipative regime the
    narrow gap Gamma - 2 J_eff is computed as 4 J^2 / (Gamma + 2 J_eff).
    """
    fb = fb or fictitious_bath(p)
    Gp = fb.Gamma + fb.gamma0
    A = omega + 1j * Gp
    if fb.regime == "dissipative":
        B = 2j * fb.J_eff
        gap = fb.gamma0 + 4.0 * p.J**2 / (fb.Gamma + 2.0 * fb.J_eff)
        amb = omega + 1j * gap
        apb = omega + 1j * (Gp + 2.0 * fb.J_eff)
    else:
        B = 2.0 * fb.J_eff
        amb = (omega - 2.0 * fb.J_eff) + 1j * Gp
        apb = (omega + 2.0 * fb.J_eff) + 1j * Gp
    return A, B, amb, apb, fb


def _inner_root(A: complex, B: complex, amb: Optional[complex] = None,
                apb: Optional[complex] = None, tol: float = 1e-12):
    """Root of B z^2 + 2 A z + B inside the unit circle, and s = B z_in + A.

    s equals the branch of sqrt((A-B)(A+B)) consistent with the kept root;
    the closed self-energy is Omega^2 / s.  The two roots satisfy z+ z- = 1,
    and z = -B/(A + sq) (for s = +sq) or -(A + sq)/B (for s = -sq) are the
    cancellation-free evaluations.
    """
    if B == 0:
        raise DegenerateCircle("J_eff = 0; Gamma = 2J handled by perturbation upstream")
    if amb is None:
        amb, apb = A - B, A + B
    sq = np.sqrt(amb * apb)
    if abs(sq) <= 1e-14 * max(abs(A), abs(B)):
        raise BranchPoint(f"omega at a branch point (A^2 = B^2), A={A}")
    t1 = A + sq
    t2 = A - sq
    if abs(t1) >= abs(t2):
        t, sigma = t1, 1.0
    else:
        t, sigma = t2, -1.0
    at, ab = abs(t), abs(B)
    if abs(at - ab) <= tol * max(at, ab):
        raise OnBranchCut("both roots on the unit circle: omega lies on the collapsed cut")
    if at > ab:
        return -B / t, sigma * sq
    return -t / B, -sigma * sq


def self_energy_f(omega: complex, p: BathParams, emitter: EmitterConfig) -> complex:
    """Closed-form continuation of the single-emitter self-energy.

    Agrees with ``self_energy_quadrature`` everywhere off the physical
    continuum (in particular on the whole closed upper half plane) and
    continues it smoothly through the collapsed cut, where the quasibound
    poles live.
    """
    if emitter.Omega == 0.0:
        return 0.0 + 0.0j
    A, B, amb, apb, _ = _AB(omega, p)
    _, s = _inner_root(A, B, amb, apb)
    return emitter.Omega**2 / s


def self_energy_f_deriv(omega: complex, p: BathParams, emitter: EmitterConfig) -> complex:
    """Analytic d Sigma_f / d omega (used for Newton steps and residues)."""
    if emitter.Omega == 0.0:
        return 0.0 + 0.0j
    A, B, amb, apb, _ = _AB(omega, p)
    _, s = _inner_root(A, B, amb, apb)
    return -emitter.Omega**2 * A / s**3


def self_energy_channels(omega: complex, d: int, p: BathParams, emitter: EmitterConfig) -> tuple:
    """Even/odd channel self-energies (Sigma_plus, Sigma_minus) of two emitters.

    Sigma_pm = Omega^2 (1 +- z_in^d) / s; their sum is twice the single-emitter
    value for every separation d.
    """
    if emitter.Omega == 0.0:
        return 0.0 + 0.0j, 0.0 + 0.0j
    A, B, amb, apb, _ = _AB(omega, p)
    z_in, s = _inner_root(A, B, amb, apb)
    zd = z_in**d
    om2 = emitter.Omega**2
    return om2 * (1.0 + zd) / s, om2 * (1.0 - zd) / s


def self_energy_channels_deriv(omega: complex, d: int, p: BathParams, emitter: EmitterConfig) -> tuple:
    """Analytic omega-derivatives of (Sigma_plus, Sigma_minus)."""
    A, B, amb, apb, _ = _AB(omega, p)
    z_in, s = _inner_root(A, B, amb, apb)
    zd = z_in**d
    om2 = emitter.Omega**2
    # z' = -z/s, s' = A/s
    dplus = om2 * (-d * zd - (1.0 + zd) * A / s) / s**2
    dminus = om2 * (+d * zd - (1.0 - zd) * A / s) / s**2
    return dplus, dminus


def self_energy_realspace(omega: complex, j: int, p: BathParams, emitter: EmitterConfig) -> complex:
    """Continued self-energy matrix element Sigma_{j0}(w) at site offset j.

    Only defined in the dissipative regime (Gamma > 2J).  The amplitude decays
    geometrically away from the emitter, with different left/right rates when
    J != 0 (the band is chiral).
    """
    fb = fictitious_bath(p)
    if fb.regime != "dissipative":
        raise OnBranchCut("real-space closed form requires the dissipative regime Gamma > 2J")
    if j == 0:
        return self_energy_f(omega, p, emitter)
    A, B, amb, apb, _ = _AB(omega, p, fb)
    z_in, s = _inner_root(A, B, amb, apb)
    # beta_pm = z_tilde / sqrt(z_max)^{+-1} with z_tilde the kept root of the
    # dissipative quadratic; Gamma + 2J = 2 J_eff sqrt(z_max) and
    # Gamma - 2J = 2 J_eff / sqrt(z_max) recover the asymmetric decays.
    Gp = fb.Gamma + fb.gamma0  # uniform offset shifts omega only
    num = 1j * (omega + 1j * Gp) + np.sqrt(-((omega + 1j * Gp) ** 2) - 4 * fb.J_eff**2)
    denom_p = p.Gamma + 2 * p.J
    denom_m = p.Gamma - 2 * p.J
    beta_p = num / denom_p
    beta_m = num / denom_m
    if abs(beta_p) > 1.0 or abs(beta_m) > 1.0:
        # principal sqrt picked the growing root; switch to the other branch
        num = 1j * (omega + 1j * Gp) - np.sqrt(-((omega + 1j * Gp) ** 2) - 4 * fb.J_eff**2)
        beta_p = num / denom_p
        beta_m = num / denom_m
    base = self_energy_f(omega, p, emitter)
    if j > 0:
        return base * beta_p**j
    return base * beta_m ** (-j)


# ---------------------------------------------------------------------------
# band-edge models and the hypergeometric scaling self-energy

_EDGE_A = {1: 2.0, 2: 2 * math.pi, 3: 4 * math.pi}


def band_edge_model(p: BathParams, Lambda: Optional[float] = None) -> DissipationBandModel:
    """Edge power-law model of the configured band.

    Analytic for the built-in bands; extracted by a log-log fit over the 5%
    of the Brillouin zone nearest the edge for custom grids (UnclassifiedEdge
    if the fit has r^2 < 0.99).  Lambda defaults to the band maximum.
    """
    lo, hi = gamma_band_range(p)
    if Lambda is None:
        Lambda = hi
    if p.band_kind in ("cosine_1d", "gapped_cosine_1d"):
        return DissipationBandModel(gamma_min=p.gamma0, k0=(math.pi,), mu=2.0, c=0.5,
                                    Lambda=Lambda, dim=1, Gamma=p.Gamma, degeneracy=1)
    if p.band_kind == "sqrt_sin_1d":
        # gapless edges at k = 0 and k = pi
        return DissipationBandModel(gamma_min=p.gamma0, k0=(0.0,), mu=0.5, c=1.0 / 3.0,
                                    Lambda=Lambda, dim=1, Gamma=p.Gamma, degeneracy=2)
    if p.band_kind == "cosine_3d":
        return DissipationBandModel(gamma_min=p.gamma0, k0=(math.pi,) * 3, mu=2.0, c=0.5,
                                    Lambda=Lambda, dim=3, Gamma=p.Gamma, degeneracy=1)
    # custom 1D grid: locate the edge and fit the local power law
    grid = np.asarray(p.gamma_grid, float)
    n = grid.shape[0]
    k = -math.pi + 2 * math.pi * np.arange(n) / n
    i0 = int(np.argmin(grid))
    gamma_min = float(grid[i0])
    k0 = float(k[i0])
    span = max(3, int(0.05 * n / 2))
    dk, dg = [], []
    for s in range(1, span):
        for sgn in (-1, 1):
            gi = grid[(i0 + sgn * s) % n]
            if gi > gamma_min:
                dk.append(abs(s) * 2 * math.pi / n)
                dg.append(gi - gamma_min)
    dk, dg = np.log(np.asarray(dk)), np.log(np.asarray(dg))
    slope, intercept = np.polyfit(dk, dg, 1)
    resid = dg - (slope * dk + intercept)
    r2 = 1.0 - np.sum(resid**2) / max(np.sum((dg - dg.mean()) ** 2), 1e-300)
    if r2 < 0.99:
        raise UnclassifiedEdge(f"edge fit r^2 = {r2:.4f} < 0.99")
    mu = float(slope)
    c = float(np.exp(intercept) / p.Gamma)
    return DissipationBandModel(gamma_min=gamma_min, k0=(k0,), mu=mu, c=c,
                                Lambda=Lambda, dim=p.dim, Gamma=p.Gamma, degeneracy=1)


def scaling_self_energy(s: complex, model: DissipationBandModel, Omega: float) -> complex:
    """Self-energy of the edge power-law model at Laplace frequency s = -i w.

    Sigma(s) = C (Lambda'/Gamma)^beta (1/s') F(1, beta; beta+1; -Lambda'/s')
    with s' = s + gamma_min, Lambda' = Lambda - gamma_min, beta = d/mu, and
    C collecting the edge dDOS coefficient.
    """
    beta = model.beta
    if not (0.0 < beta <= 3.0):
        raise InvalidExponent(f"d/mu = {beta} outside (0, 3]")
    d = model.dim
    A = _EDGE_A[d] * model.degeneracy
    C = A * Omega**2 / ((2 * math.pi) ** d * d * model.c**beta)
    sp = s + model.gamma_min
    Lp = model.Lambda - model.gamma_min
    if sp == 0:
        raise InvalidExponent("s at the band edge")
    F = hyp2f1(1.0, beta, beta + 1.0, complex(-Lp / sp))
    return C * (Lp / model.Gamma) ** beta * F / sp
