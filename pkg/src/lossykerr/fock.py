"""Truncated Fock-space primitives.

Coherent-state amplitudes, Poisson photon statistics, and dense
density-operator storage with validation of the physical invariants
(Hermiticity, unit trace, positive semidefiniteness).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

DEFAULT_TAIL_TOL = 1e-12
HERMITICITY_ATOL = 1e-12
PSD_EIGEN_FLOOR = -1e-10

# Hard floor on the retained Fock cutoff; keeps even vacuum-scale states on a
# grid large enough for phase-space rendering and entropy sums.
MIN_N_MAX = 29


class DimensionTooSmallError(ValueError):
    """The requested Fock cutoff cannot hold the state within the tail tolerance."""


@dataclass(frozen=True)
class FockDim:
    """Fock-space truncation keeping number states 0..n_max."""

    n_max: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_max, (int, np.integer)) or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def size(self) -> int:
        """Matrix dimension n_max + 1."""
        return self.n_max + 1


@dataclass(frozen=True)
class CoherentAmplitude:
    """Complex field amplitude of a coherent state."""

    value: complex

    def __post_init__(self) -> None:
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError("coherent amplitude must be finite")
        object.__setattr__(self, "value", v)

    @property
    def mean_photon_number(self) -> float:
        """|value|^2, the Poisson mean of the photon-number distribution."""
        return abs(self.value) ** 2


@dataclass(frozen=True)
class PoissonWeights:
    """Photon-number probabilities of a coherent state, p_k = e^-m m^k / k!."""

    mean: float
    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class DensityOperator:
    """Density matrix in the truncated Fock basis, entry (m, n) = <m|rho|n>."""

    dim: FockDim
    elements: np.ndarray

    def __post_init__(self) -> None:
        el = np.array(self.elements, dtype=complex, copy=True)
        if el.shape != (self.dim.size, self.dim.size):
            raise ValueError(
                f"elements shape {el.shape} does not match dimension {self.dim.size}"
            )
        if not np.all(np.isfinite(el.view(float))):
            raise ValueError("density matrix entries must be finite")
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)

    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def diagonal(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()


@dataclass(frozen=True)
class ValidationReport:
    """Diagnostics from validate_density_operator."""

    hermiticity_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    hermitian_ok: bool
    trace_ok: bool
    psd_ok: bool

    @property
    def ok(self) -> bool:
        return self.hermitian_ok and self.trace_ok and self.psd_ok


def _as_amplitude(zeta) -> CoherentAmplitude:
    if isinstance(zeta, CoherentAmplitude):
        return zeta
    return CoherentAmplitude(complex(zeta))


def poisson_tail(mean: float, n_max: int) -> float:
    """Probability mass of Poisson(mean) beyond n_max, P(X > n_max)."""
    if mean < 0 or not math.isfinite(mean):
        raise ValueError(f"mean must be finite and nonnegative, got {mean}")
    if mean == 0.0:
        return 0.0
    # P(X <= k) = Q(k+1, mean); the tail is the regularized lower gamma.
    return float(gammainc(n_max + 1, mean))


def truncation_dimension(mean_photon: float, tail_tol: float = DEFAULT_TAIL_TOL,
                         cap: int | None = None) -> FockDim:
    """Smallest usable Fock cutoff for a state with the given Poisson mean.

    Starts from max(29, ceil(mean + 10 sqrt(mean))) and grows until the
    neglected Poisson tail drops below tail_tol.
    """
    if not math.isfinite(mean_photon) or mean_photon < 0:
        raise ValueError(f"mean_photon must be finite and >= 0, got {mean_photon}")
    if not (0.0 < tail_tol <= 1e-3):
        raise ValueError(f"tail_tol must lie in (0, 1e-3], got {tail_tol}")
    n = max(MIN_N_MAX, math.ceil(mean_photon + 10.0 * math.sqrt(mean_photon)))
    while poisson_tail(mean_photon, n) >= tail_tol:
        n += 1
    if cap is not None and n > cap:
        raise DimensionTooSmallError(
            f"cutoff {n} needed for mean {mean_photon} exceeds cap {cap}"
        )
    return FockDim(n)


def check_tail(mean_photon: float, dim: FockDim, tail_tol: float = DEFAULT_TAIL_TOL) -> None:
    """Raise DimensionTooSmallError unless dim holds Poisson(mean) within tail_tol."""
    t = poisson_tail(mean_photon, dim.n_max)
    if t >= tail_tol:
        raise DimensionTooSmallError(
            f"n_max={dim.n_max} leaves Poisson tail {t:.3e} >= {tail_tol:.3e} "
            f"for mean photon number {mean_photon}"
        )


def coherent_state_vector(zeta, dim: FockDim, tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
    """Fock amplitudes of |zeta>: component k = e^{-|z|^2/2} z^k / sqrt(k!).

    Magnitudes are evaluated in log space (log-gamma for k!) so that large
    mean photon numbers do not overflow.
    """
    amp = _as_amplitude(zeta)
    check_tail(amp.mean_photon_number, dim, tail_tol)
    return _coherent_column(np.array([amp.value]), dim.size, extended=True)[0]


def _log_poisson(means: np.ndarray, size: int, extended: bool = False) -> np.ndarray:
    """log Poisson pmf rows, log p_k = -mean + k log mean - log k!.

    Shared by poisson_weights and the coherent-state magnitudes (half this
    value) so the two agree to round-off componentwise. With `extended` the
    mean-dependent terms are carried in x86 extended precision: the pmf in
    the far tail is exponentially sensitive to the mean, and double-only
    log-space arithmetic would not keep the two routes consistent to the
    promised 1e-14. Rows with mean 0 come out as the point mass at k = 0.
    """
    dtype = np.longdouble if extended else np.float64
    means = np.asarray(means).astype(dtype)
    k = np.arange(size, dtype=dtype)
    safe = np.where(means > 0.0, means, dtype(1.0))
    logp = -means[:, None] + k[None, :] * np.log(safe)[:, None] \
        - gammaln(np.arange(size) + 1.0).astype(dtype)[None, :]
    zero = means == 0.0
    if np.any(zero):
        logp[zero, :] = -np.inf
        logp[zero, 0] = 0.0
    return logp


def _coherent_column(zetas: np.ndarray, size: int, extended: bool = False) -> np.ndarray:
    """Vectorized coherent-state amplitudes, one row per input amplitude."""
    zetas = np.asarray(zetas, dtype=complex)
    k = np.arange(size, dtype=float)
    log_mag = 0.5 * _log_poisson(np.abs(zetas) ** 2, size, extended)
    with np.errstate(under="ignore"):
        mag = np.exp(log_mag).astype(float)
        return mag * np.exp(1j * k[None, :] * np.angle(zetas)[:, None])


def coherent_projector(zeta, dim: FockDim, tail_tol: float = DEFAULT_TAIL_TOL) -> DensityOperator:
    """Pure-state density operator |zeta><zeta| on the truncated space."""
    v = coherent_state_vector(zeta, dim, tail_tol)
    return DensityOperator(dim, np.outer(v, v.conj()))


def poisson_weights(mean: float, dim: FockDim) -> PoissonWeights:
    """Poisson(mean) probabilities on 0..n_max, in log space for stability."""
    if not math.isfinite(mean) or mean < 0:
        raise ValueError(f"mean must be finite and >= 0, got {mean}")
    with np.errstate(under="ignore"):
        w = np.exp(_log_poisson(np.array([mean]), dim.size, extended=True)[0])
    return PoissonWeights(mean, w.astype(float))


def validate_density_operator(rho: DensityOperator,
                              trace_tol: float = DEFAULT_TAIL_TOL,
                              hermiticity_tol: float = HERMITICITY_ATOL,
                              eigen_floor: float = PSD_EIGEN_FLOOR) -> ValidationReport:
    """Diagnostic check of the density-operator invariants.

    Reports the worst per-entry Hermiticity deviation, the trace deviation
    from one, and the smallest eigenvalue, flagging each against its
    tolerance. Never raises; purely diagnostic.
    """
    el = rho.elements
    herm_dev = float(np.max(np.abs(el - el.conj().T))) if el.size else 0.0
    trace_dev = abs(float(np.trace(el).real) - 1.0)
    herm = 0.5 * (el + el.conj().T)
    min_eig = float(np.linalg.eigvalsh(herm)[0])
    return ValidationReport(
        hermiticity_deviation=herm_dev,
        trace_deviation=trace_dev,
        min_eigenvalue=min_eig,
        hermitian_ok=herm_dev <= hermiticity_tol,
        trace_ok=trace_dev <= trace_tol,
        psd_ok=min_eig >= eigen_floor,
    )
