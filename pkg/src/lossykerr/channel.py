"""Lossy Kerr channel in the interaction picture.

Closed-form output state of a coherent pulse propagating through a medium
with distributed linear loss (rate alpha) and Kerr self-phase modulation
(strength mu), together with the Gaussian phase-diffusion model that
approximates it and an independent Runge-Kutta integrator of the
elementwise master equation used to cross-check the closed form.

All states produced here exclude the reversible Kerr phase factor
exp(i mu z n^2); apply_kerr_phase composes it back for phase-space
rendering of the physical state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import (
    CoherentAmplitude,
    DEFAULT_TAIL_TOL,
    DensityOperator,
    FockDim,
    _as_amplitude,
    check_tail,
    coherent_state_vector,
)


class ConvergenceError(RuntimeError):
    """Step doubling failed to bring the integrator below its tolerance."""


@dataclass(frozen=True)
class MediumParams:
    """Bulk medium: loss coefficient alpha and nonlinearity strength mu (1/length)."""

    alpha: float
    mu: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha}")
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"mu must be finite and >= 0, got {self.mu}")

    @property
    def kappa(self) -> float:
        """Dimensionless nonlinearity-to-loss ratio mu / alpha."""
        return self.mu / self.alpha

    @classmethod
    def from_kappa(cls, kappa: float, alpha: float = 1.0) -> "MediumParams":
        return cls(alpha=alpha, mu=kappa * alpha)


@dataclass(frozen=True)
class ChannelGeometry:
    """Propagation length z and the resulting power transmission tau."""

    z: float
    tau: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.z) and self.z >= 0):
            raise ValueError(f"z must be finite and >= 0, got {self.z}")
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")

    @classmethod
    def from_length(cls, medium: MediumParams, z: float) -> "ChannelGeometry":
        return cls(z=z, tau=math.exp(-medium.alpha * z))

    @classmethod
    def from_transmission(cls, medium: MediumParams, tau: float) -> "ChannelGeometry":
        if not (0.0 < tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {tau}")
        return cls(z=-math.log(tau) / medium.alpha, tau=tau)


@dataclass(frozen=True)
class PhaseDiffusionParams:
    """Gaussian phase noise: deterministic shift phi0 and variance sigma2."""

    phi0: float
    sigma2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.phi0) and math.isfinite(self.sigma2)):
            raise ValueError("phase-diffusion parameters must be finite")
        if self.sigma2 < 0:
            raise ValueError(f"sigma2 must be >= 0, got {self.sigma2}")


@dataclass(frozen=True)
class FiberSpec:
    """Fiber-link parameters fixing the dimensionless nonlinearity.

    gamma_nl in 1/(length * W), alpha in 1/length (same length unit),
    photon_energy in J, pulse_duration in s.
    """

    gamma_nl: float
    photon_energy: float
    alpha: float
    pulse_duration: float

    def __post_init__(self) -> None:
        for name in ("gamma_nl", "photon_energy", "alpha", "pulse_duration"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v}")


def make_channel(tau: float, kappa: float, alpha: float = 1.0) -> tuple[MediumParams, ChannelGeometry]:
    """Medium and geometry for a given (tau, kappa) working point.

    The output state depends on the medium only through tau and kappa, so
    alpha is a free scale; alpha=1 puts z in units of 1/alpha.
    """
    medium = MediumParams.from_kappa(kappa, alpha=alpha)
    return medium, ChannelGeometry.from_transmission(medium, tau)


def decoherence_exponent(tau: float, kappa_arg):
    """Loss-nonlinearity decoherence exponent of the channel.

    The off-diagonal element (m, n) of the output state is damped by
    exp(-nbar * decoherence_exponent(tau, (m - n) * kappa)), with

        1 - tau - (1 - tau^(1 - 2 i x)) / (1 - 2 i x)

    evaluated at x = kappa_arg via the principal real log of tau. Returns
    exactly 0 at kappa_arg = 0 and for tau = 1. Vectorized in kappa_arg.
    """
    if not (math.isfinite(tau) and 0.0 < tau <= 1.0):
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    x = np.asarray(kappa_arg, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("kappa_arg must be finite")
    denom = 1.0 - 2j * x
    powered = np.exp(denom * math.log(tau))
    f = (1.0 - tau) - (1.0 - powered) / denom
    # exact zero on the diagonal; avoids nbar-amplified round-off of exp(log tau)
    f = np.where(x == 0.0, 0.0 + 0.0j, f)
    if np.ndim(kappa_arg) == 0:
        return complex(f)
    return f


def decoherence_exponent_quadratic(tau: float, kappa_arg):
    """Second-order expansion of decoherence_exponent around kappa_arg = 0.

    -2i (1 - tau + tau log tau) x + [4 - 2 tau - 2 tau (1 - log tau)^2] x^2.
    """
    if not (math.isfinite(tau) and 0.0 < tau <= 1.0):
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    x = np.asarray(kappa_arg, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("kappa_arg must be finite")
    lt = math.log(tau)
    lin = 1.0 - tau + tau * lt
    quad = 4.0 - 2.0 * tau - 2.0 * tau * (1.0 - lt) ** 2
    f = -2j * lin * x + quad * x * x
    if np.ndim(kappa_arg) == 0:
        return complex(f)
    return f


def phase_diffusion_params(medium: MediumParams, geom: ChannelGeometry,
                           input_amplitude) -> PhaseDiffusionParams:
    """Gaussian noise pair (phi0, sigma2) of the effective phase-diffusion channel.

    phi0   = 2 kappa nbar (1 - tau + tau log tau)
    sigma2 = 4 kappa^2 nbar [2 - tau - tau (1 - log tau)^2]
    """
    amp = _as_amplitude(input_amplitude)
    kappa = medium.kappa
    tau = geom.tau
    n_bar = amp.mean_photon_number
    lt = math.log(tau)
    phi0 = 2.0 * kappa * n_bar * (1.0 - tau + tau * lt)
    sigma2 = 4.0 * kappa * kappa * n_bar * (2.0 - tau - tau * (1.0 - lt) ** 2)
    return PhaseDiffusionParams(phi0=phi0, sigma2=max(sigma2, 0.0))


def _offdiagonal_factors(tau: float, kappa: float, n_bar: float, size: int) -> np.ndarray:
    """exp(-nbar * f(j kappa)) for j = -(size-1)..(size-1), conjugate-symmetric.

    Only j >= 0 is evaluated; negative j follows from Hermiticity. Underflow
    of strongly damped far off-diagonals flushes to zero silently.
    """
    j = np.arange(size, dtype=float)
    with np.errstate(under="ignore"):
        pos = np.exp(-n_bar * decoherence_exponent(tau, j * kappa))
    return np.concatenate([pos[:0:-1].conj(), pos])


def exact_output_state(medium: MediumParams, geom: ChannelGeometry,
                       input_amplitude, dim: FockDim,
                       tail_tol: float = DEFAULT_TAIL_TOL) -> DensityOperator:
    """Interaction-picture output state of the lossy Kerr channel.

    Element (m, n) is the attenuated coherent projector onto
    |sqrt(tau) zeta0> damped by exp(-nbar f((m - n) kappa)). The diagonal is
    the Poisson distribution with mean tau * nbar; the reversible Kerr phase
    is excluded (see apply_kerr_phase).
    """
    amp = _as_amplitude(input_amplitude)
    n_bar = amp.mean_photon_number
    out_amp = CoherentAmplitude(math.sqrt(geom.tau) * amp.value)
    check_tail(out_amp.mean_photon_number, dim, tail_tol)
    v = coherent_state_vector(out_amp, dim, tail_tol)
    factors = _offdiagonal_factors(geom.tau, medium.kappa, n_bar, dim.size)
    idx = np.arange(dim.size, dtype=np.int64)
    jmat = idx[:, None] - idx[None, :] + (dim.size - 1)
    elements = np.outer(v, v.conj()) * factors[jmat]
    return DensityOperator(dim, elements)


def phase_diffused_state(zeta, noise: PhaseDiffusionParams, dim: FockDim,
                         tail_tol: float = DEFAULT_TAIL_TOL) -> DensityOperator:
    """Coherent state |zeta> averaged over a Gaussian random phase.

    Built directly from the closed-form elements
    <m|zeta><zeta|n> exp[i (m-n) phi0 - (m-n)^2 sigma2 / 2]; no numerical
    phase integral is performed.
    """
    amp = _as_amplitude(zeta)
    check_tail(amp.mean_photon_number, dim, tail_tol)
    v = coherent_state_vector(amp, dim, tail_tol)
    j = np.arange(-(dim.size - 1), dim.size, dtype=float)
    with np.errstate(under="ignore"):
        factors = np.exp(1j * j * noise.phi0 - 0.5 * j * j * noise.sigma2)
    idx = np.arange(dim.size, dtype=np.int64)
    jmat = idx[:, None] - idx[None, :] + (dim.size - 1)
    elements = np.outer(v, v.conj()) * factors[jmat]
    return DensityOperator(dim, elements)


def apply_kerr_phase(rho: DensityOperator, medium: MediumParams,
                     geom: ChannelGeometry) -> DensityOperator:
    """Compose the reversible Kerr factor exp(i mu z n^2) back onto a state.

    Multiplies element (m, n) by exp(i mu z (m^2 - n^2)), recovering the
    physical (Schroedinger-picture) state for phase-space rendering.
    """
    m = np.arange(rho.dim.size, dtype=float)
    phase = np.exp(1j * medium.mu * geom.z * m * m)
    elements = phase[:, None] * rho.elements * phase.conj()[None, :]
    return DensityOperator(rho.dim, elements)


def offdiagonal_decay_factor(medium: MediumParams, geom: ChannelGeometry,
                             n_bar: float, j: int) -> complex:
    """Solution of the per-off-diagonal master-equation ODE after distance z.

    For the ansatz splitting the density matrix into a coherent prefactor
    and a factor depending only on j = m - n, the ODE integrates to

        exp(-(nbar tau / (1 - 2 i kappa j)) tau^(-2 i kappa j) + A0)

    with A0 fixed by the initial coherent projector. Dividing by the
    j-independent normalization exp(-nbar tau) recovers
    exp(-nbar f(j kappa)).
    """
    if not (math.isfinite(n_bar) and n_bar >= 0):
        raise ValueError(f"n_bar must be finite and >= 0, got {n_bar}")
    tau = geom.tau
    kappa = medium.kappa
    denom = 1.0 - 2j * kappa * j
    powered = np.exp(-2j * kappa * j * math.log(tau))
    a0 = n_bar / denom - n_bar
    return complex(np.exp(-(n_bar * tau / denom) * powered + a0))


def dimensionless_nonlinearity(fiber: FiberSpec) -> float:
    """Nonlinearity-to-loss ratio of a fiber link, gamma_nl E_photon / (alpha T)."""
    return fiber.gamma_nl * fiber.photon_energy / (fiber.alpha * fiber.pulse_duration)


@dataclass(frozen=True)
class IntegrationInfo:
    """Step-doubling record of integrate_master_equation."""

    steps: int
    doublings: int
    max_change: float


def _rk4_run(alpha: float, mu: float, z_final: float, v0: np.ndarray,
             steps: int) -> np.ndarray:
    """Fixed-step classical RK4 for the elementwise master equation.

    d rho_{mn}/dz = alpha/2 [2 rho_{m+1,n+1} sqrt((m+1)(n+1)) e^{2 i mu z (m-n)}
                             - (m + n) rho_{mn}]
    """
    size = v0.size
    m = np.arange(size, dtype=float)
    sum_mn = m[:, None] + m[None, :]
    diff_mn = m[:, None] - m[None, :]
    lift = np.sqrt(np.outer(m[1:], m[1:]))
    diff_src = diff_mn[1:, 1:]

    def rhs(z: float, p: np.ndarray) -> np.ndarray:
        out = (-0.5 * alpha) * sum_mn * p
        out[:-1, :-1] += alpha * lift * p[1:, 1:] * np.exp(2j * mu * z * diff_src)
        return out

    rho = np.outer(v0, v0.conj())
    h = z_final / steps
    z = 0.0
    for _ in range(steps):
        k1 = rhs(z, rho)
        k2 = rhs(z + 0.5 * h, rho + 0.5 * h * k1)
        k3 = rhs(z + 0.5 * h, rho + 0.5 * h * k2)
        k4 = rhs(z + h, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        z += h
    return rho


def integrate_master_equation(medium: MediumParams, z_final: float,
                              input_amplitude, dim: FockDim,
                              steps: int | None = None, *,
                              headroom: int = 20,
                              tol: float = 1e-9,
                              max_doublings: int = 12,
                              tail_tol: float = DEFAULT_TAIL_TOL,
                              full_output: bool = False):
    """Integrate the interaction-picture master equation by classical RK4.

    Starts from the coherent projector at z=0 on a grid enlarged by
    `headroom` rows (elements flow downward from higher indices, so the top
    of the grid is polluted by truncation) and truncates afterwards. The
    step count doubles until the returned block changes by less than `tol`
    elementwise; exceeding `max_doublings` raises ConvergenceError.

    Returns the DensityOperator, or (DensityOperator, IntegrationInfo) when
    full_output is set.
    """
    if not (math.isfinite(z_final) and z_final >= 0):
        raise ValueError(f"z_final must be finite and >= 0, got {z_final}")
    amp = _as_amplitude(input_amplitude)
    check_tail(amp.mean_photon_number, dim, tail_tol)
    big = dim.size + headroom
    v0 = coherent_state_vector(amp, FockDim(big - 1), tail_tol)
    if steps is None:
        # RK4 absolute stability needs h * alpha * (size - 1) below ~2.8;
        # start well inside and let accuracy doubling take over.
        steps = max(128, math.ceil(medium.alpha * z_final * big))
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")

    sl = slice(0, dim.size)
    current = _rk4_run(medium.alpha, medium.mu, z_final, v0, steps)[sl, sl]
    doublings = 0
    while True:
        refined = _rk4_run(medium.alpha, medium.mu, z_final, v0, 2 * steps)[sl, sl]
        change = float(np.max(np.abs(refined - current)))
        if math.isfinite(change) and change < tol:
            break
        doublings += 1
        if doublings > max_doublings:
            raise ConvergenceError(
                f"RK4 not converged after {doublings - 1} doublings "
                f"({steps} steps, last change {change:.3e} >= {tol:.1e})"
            )
        current, steps = refined, 2 * steps
    result = DensityOperator(dim, refined)
    if full_output:
        return result, IntegrationInfo(steps=2 * steps, doublings=doublings,
                                       max_change=change)
    return result
