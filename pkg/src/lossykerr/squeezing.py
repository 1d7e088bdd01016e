"""Linearized quadrature statistics of Kerr squeezing under phase diffusion.

Closed-form first and second moments of the output quadratures for a
phase-diffused coherent state, the optimal measurement angle, the
attainable minimum variance, and the distributed-loss excess-noise factor
that sets the squeezing floor near (1 - tau) / 3. Vacuum quadrature
variance is normalized to 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sweep import SweepResult, sweep_metadata


@dataclass(frozen=True)
class SqueezingInput:
    """Working point: output intensity zeta2, squeezing parameter r, phase variance.

    When built from physical channel parameters, sinh r = 2 mu z zeta2 with
    zeta2 = tau * nbar.
    """

    zeta2: float
    r: float
    sigma2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.zeta2) and self.zeta2 >= 0):
            raise ValueError(f"zeta2 must be finite and >= 0, got {self.zeta2}")
        if not (math.isfinite(self.r) and self.r >= 0):
            raise ValueError(f"r must be finite and >= 0, got {self.r}")
        if not (math.isfinite(self.sigma2) and self.sigma2 >= 0):
            raise ValueError(f"sigma2 must be finite and >= 0, got {self.sigma2}")

    @classmethod
    def from_channel(cls, tau: float, kappa: float, n_bar: float) -> "SqueezingInput":
        """Assemble the working point from (tau, kappa, nbar).

        Uses sinh r = 2 kappa (-log tau) tau nbar and the Gaussian phase
        variance of the lossy Kerr channel.
        """
        if not (0.0 < tau < 1.0):
            raise ValueError(f"tau must lie in (0, 1), got {tau}")
        lt = math.log(tau)
        zeta2 = tau * n_bar
        sinh_r = 2.0 * kappa * (-lt) * zeta2
        sigma2 = 4.0 * kappa * kappa * n_bar * (2.0 - tau - tau * (1.0 - lt) ** 2)
        return cls(zeta2=zeta2, r=math.asinh(sinh_r), sigma2=max(sigma2, 0.0))


@dataclass(frozen=True)
class QuadratureStats:
    """First and second moments of the output quadratures q and p."""

    mean_q: float
    mean_p: float
    var_q: float
    var_p: float
    cov_qp: float
    theta_opt: float
    var_min: float


def phase_moments(sigma2: float) -> tuple[float, float]:
    """(<cos phi>, <cos 2 phi>) over the zero-mean Gaussian phase: (e^-s2/2, e^-2s2)."""
    if not (math.isfinite(sigma2) and sigma2 >= 0):
        raise ValueError(f"sigma2 must be finite and >= 0, got {sigma2}")
    return math.exp(-0.5 * sigma2), math.exp(-2.0 * sigma2)


def optimal_angle(inp: SqueezingInput) -> float:
    """Quadrature angle minimizing the variance, in (-pi/4, 0].

    tan 2 theta = -sinh r / (sinh^2 r + zeta2 (e^(sigma2) - 1)); the branch
    follows the negative covariance. The degenerate isotropic case
    (r = 0 with no noise-intensity product) returns 0.
    """
    s = math.sinh(inp.r)
    try:
        grow = inp.zeta2 * math.expm1(inp.sigma2)
    except OverflowError:
        grow = math.inf if inp.zeta2 > 0 else 0.0
    return 0.5 * math.atan2(-s, s * s + grow)


def quadrature_stats(inp: SqueezingInput) -> QuadratureStats:
    """Closed-form quadrature moments of the phase-diffused squeezed output.

    var_q = 1 + 2 (1 - e^-sigma2)^2 zeta2 + 2 (1 - e^-2sigma2) sinh^2 r
    var_p = 1 + 2 (1 - e^-2sigma2) zeta2 + 2 (1 + e^-2sigma2) sinh^2 r
    cov   = 2 e^-2sigma2 sinh r
    with mean_q = 2 zeta <cos phi> and mean_p = 0 (the phase density is even).
    """
    cos_phi, _ = phase_moments(inp.sigma2)
    u1 = math.exp(-inp.sigma2)
    u2 = math.exp(-2.0 * inp.sigma2)
    s = math.sinh(inp.r)
    s2 = s * s
    zeta = math.sqrt(inp.zeta2)
    var_q = 1.0 + 2.0 * (1.0 - u1) ** 2 * inp.zeta2 + 2.0 * (1.0 - u2) * s2
    var_p = 1.0 + 2.0 * (1.0 - u2) * inp.zeta2 + 2.0 * (1.0 + u2) * s2
    cov = 2.0 * u2 * s
    return QuadratureStats(
        mean_q=2.0 * zeta * cos_phi,
        mean_p=0.0,
        var_q=var_q,
        var_p=var_p,
        cov_qp=cov,
        theta_opt=optimal_angle(inp),
        var_min=min_variance(inp),
    )


def min_variance(inp: SqueezingInput) -> float:
    """Minimum quadrature variance over all angles.

    Closed form: 1 + 2 zeta2 (1 - e^-s2) + 2 sinh^2 r
    - 2 e^-2s2 sqrt(sinh^2 r + [sinh^2 r + zeta2 (e^s2 - 1)]^2),
    evaluated as the equivalent ratio whose numerator and denominator are
    sums of nonnegative terms, so the e^-2r regime is not lost to
    cancellation and large sigma2 cannot overflow.
    """
    u = math.exp(-inp.sigma2)
    w = -math.expm1(-inp.sigma2)  # 1 - e^-sigma2
    s = math.sinh(inp.r)
    s2 = s * s
    p = inp.zeta2 * w
    # rationalized form: (A^2 - 4 D^2) / (A + 2 D) with A, D the closed-form terms
    num = (1.0 + 4.0 * p
           + 4.0 * p * p * (1.0 + u) * w
           + 8.0 * p * s2 * (1.0 + u + u * u) * w
           + 4.0 * s2 * (1.0 + s2) * (1.0 + u) * (1.0 + u * u) * w)
    d = math.sqrt(u ** 4 * s2 + (u * u * s2 + p * u) ** 2)
    den = 1.0 + 2.0 * p + 2.0 * s2 + 2.0 * d
    return num / den


def variance_at_angle(stats: QuadratureStats, theta: float) -> float:
    """Variance of the rotated quadrature q cos(theta) + p sin(theta)."""
    c, s = math.cos(theta), math.sin(theta)
    return stats.var_q * c * c + stats.var_p * s * s + 2.0 * stats.cov_qp * c * s


def excess_noise_factor(tau: float) -> float:
    """Distributed-loss excess-noise factor g(tau).

    g(tau) = (2 - tau - tau (1 - log tau)^2) / (tau log^2 tau), positive on
    (0, 1) and approaching (1 - tau) / 3 as tau -> 1. The endpoint tau = 1
    is rejected (0/0).
    """
    if not (math.isfinite(tau) and 0.0 < tau < 1.0):
        raise ValueError(f"tau must lie in the open interval (0, 1), got {tau}")
    lt = math.log(tau)
    return (2.0 - tau - tau * (1.0 - lt) ** 2) / (tau * lt * lt)


def approx_min_variance(tau: float, r: float) -> float:
    """Low-attenuation estimate e^-2r + g(tau) (1 - e^-2r) tanh r.

    For r >> 1 this approaches g(tau), approximately (1 - tau) / 3 for tau
    close to one: the squeezing floor set by distributed loss.
    """
    if not (math.isfinite(r) and r >= 0):
        raise ValueError(f"r must be finite and >= 0, got {r}")
    e = math.exp(-2.0 * r)
    return e + excess_noise_factor(tau) * (1.0 - e) * math.tanh(r)


def squeezing_curve(n_bar: float, taus, kappas) -> SweepResult:
    """Attainable squeezing sweep: rows (tau, kappa, sinh_r, var_min, plateau).

    For each working point the phase variance follows the lossy Kerr
    channel, sinh r = 2 kappa (-log tau) tau nbar, and the plateau column
    carries the (1 - tau) / 3 floor estimate.
    """
    if not (math.isfinite(n_bar) and n_bar > 0):
        raise ValueError(f"n_bar must be finite and > 0, got {n_bar}")
    taus = [float(t) for t in taus]
    kappas = [float(k) for k in kappas]
    rows = []
    for tau in taus:
        plateau = (1.0 - tau) / 3.0
        for kappa in kappas:
            inp = SqueezingInput.from_channel(tau, kappa, n_bar)
            rows.append((tau, kappa, math.sinh(inp.r), min_variance(inp), plateau))
    return SweepResult(
        inputs={"n_bar": n_bar, "tau": taus, "kappa": kappas},
        columns=("tau", "kappa", "sinh_r", "var_min", "plateau_estimate"),
        rows=tuple(rows),
        metadata=sweep_metadata(kind="squeezing"),
    )
