"""Single-mode Fock-basis states: coherent, squeezed coherent, squeezed even cat.

Squeeze convention: S(r) is realized so that S^dag a S = cosh(r) a - sinh(r) a^dag.
With real beta the squeezed coherent state S(r)|beta> then has mean photon
number beta^2 e^{-2r} + sinh^2 r and, for large beta, variance beta^2 e^{-4r};
negative r stretches the photon-number distribution.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from src.utils.errors import DomainError, TruncationError

logger = logging.getLogger("nm-spdc")

DEFAULT_TAIL_EPS = 1e-12
CAT_NORM_TOL = 1e-9
# Running amplitudes are rescaled by this factor to stay inside float range.
_RESCALE = 1e150
# -log(1e-12)
_TAIL_LOG = 27.7


@dataclass(frozen=True)
class FockVector:
    amplitudes: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0:
            raise DomainError("Fock amplitudes must be a non-empty 1-d array")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.size - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(self.probabilities.sum()))

    def padded(self, cutoff: int) -> np.ndarray:
        if cutoff < self.cutoff:
            raise DomainError(f"cannot pad cutoff {self.cutoff} down to {cutoff}")
        out = np.zeros(cutoff + 1, dtype=np.complex128)
        out[: self.amplitudes.size] = self.amplitudes
        return out

    def normalized(self) -> FockVector:
        norm = self.norm()
        if norm == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return FockVector(self.amplitudes / norm)


@dataclass(frozen=True)
class SqueezedCatParams:
    beta: float
    r: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.beta) and math.isfinite(self.r)):
            raise DomainError(f"cat parameters must be finite, got beta={self.beta}, r={self.r}")
        if self.beta < 0:
            raise DomainError(f"cat amplitude beta must be >= 0, got {self.beta}")


def coherent_cutoff(beta: float, tail_eps: float = DEFAULT_TAIL_EPS) -> int:
    """Smallest n with Poisson(beta^2) mass above n at most tail_eps."""
    if not 0.0 < tail_eps < 1.0:
        raise DomainError(f"tail_eps must lie in (0, 1), got {tail_eps}")
    if beta == 0.0:
        return 0
    mu = beta * beta
    n = max(0, int(poisson.isf(tail_eps, mu)))
    while poisson.sf(n, mu) > tail_eps:
        n += 1
    while n > 0 and poisson.sf(n - 1, mu) <= tail_eps:
        n -= 1
    return n


def coherent_log_amplitudes(beta: float, n: np.ndarray) -> np.ndarray:
    """log(e^{-beta^2/2} beta^n / sqrt(n!)) for beta > 0."""
    return -0.5 * beta * beta + n * math.log(beta) - 0.5 * gammaln(n + 1)


def coherent_amplitudes(beta: float, tail_eps: float = DEFAULT_TAIL_EPS) -> FockVector:
    if beta < 0:
        raise DomainError(f"coherent amplitude must be >= 0, got {beta}")
    cutoff = coherent_cutoff(beta, tail_eps)
    if beta == 0.0:
        return FockVector(np.ones(1))
    n = np.arange(cutoff + 1, dtype=np.float64)
    return FockVector(np.exp(coherent_log_amplitudes(beta, n)))


def cat_cutoff(params: SqueezedCatParams) -> int:
    """Default truncation for the squeezed cat: mean plus 12 envelope widths.

    The squeezed-vacuum part decays like tanh^2(r) per two levels, which
    dominates when beta is small.
    """
    stretch = math.exp(-2.0 * params.r)
    mean = params.beta**2 * stretch + math.sinh(params.r) ** 2
    tail = 0.0
    ratio = math.tanh(abs(params.r)) ** 2
    if ratio > 0.0:
        tail = 2.0 * math.ceil(_TAIL_LOG / -math.log(ratio))
    return int(math.ceil(mean + 12.0 * params.beta * max(1.0, stretch) + 20.0 + tail))


def squeezed_coherent_amplitudes(beta: float, r: float, cutoff: int) -> np.ndarray:
    """Real Fock amplitudes of S(r)|beta> for real beta, levels 0..cutoff.

    S(r)|beta> is an eigenstate of cosh(r) a + sinh(r) a^dag with eigenvalue
    beta, so the amplitudes obey a three-term recurrence in n seeded by
    <0|S(r)|beta> = exp(-gamma^2 (1 + tanh r) / 2) / sqrt(cosh r), gamma = beta e^{-r}.
    """
    if cutoff < 0:
        raise DomainError(f"cutoff must be >= 0, got {cutoff}")
    ch, sh = math.cosh(r), math.sinh(r)
    gamma = beta * math.exp(-r)
    log_c0 = -0.5 * gamma * gamma * (1.0 + math.tanh(r)) - 0.5 * math.log(ch)

    c = np.zeros(cutoff + 1)
    c[0] = 1.0
    log_shift = 0.0
    sqrt_n = np.sqrt(np.arange(cutoff + 2, dtype=np.float64))
    for n in range(cutoff):
        prev = sh * sqrt_n[n] * c[n - 1] if n > 0 else 0.0
        c[n + 1] = (beta * c[n] - prev) / (ch * sqrt_n[n + 1])
        if abs(c[n + 1]) > _RESCALE:
            c[: n + 2] /= _RESCALE
            log_shift += math.log(_RESCALE)

    out = np.zeros(cutoff + 1)
    nz = c != 0.0
    out[nz] = np.sign(c[nz]) * np.exp(np.log(np.abs(c[nz])) + log_c0 + log_shift)
    return out


def squeezed_cat_amplitudes(params: SqueezedCatParams, cutoff: int | None = None) -> FockVector:
    """S(r)(|beta> + |-beta>) / sqrt(2(1 + e^{-2 beta^2})) in the Fock basis."""
    if cutoff is None:
        cutoff = cat_cutoff(params)
    psi = squeezed_coherent_amplitudes(params.beta, params.r, cutoff)
    # S(r)|-beta> has amplitudes (-1)^n psi_n; odd levels cancel exactly.
    amps = np.zeros(cutoff + 1)
    norm = math.sqrt(2.0 * (1.0 + math.exp(-2.0 * params.beta**2)))
    amps[0::2] = 2.0 * psi[0::2] / norm
    deficit = 1.0 - float(np.sum(amps * amps))
    if deficit > CAT_NORM_TOL:
        raise TruncationError(
            f"cutoff {cutoff} too small for squeezed cat beta={params.beta:.6g}, r={params.r:.6g}",
            deficit,
        )
    return FockVector(amps)


def simple_cat_amplitudes(alpha: float, cutoff: int | None = None) -> FockVector:
    """Unsqueezed even cat (|alpha> + |-alpha>) / norm."""
    return squeezed_cat_amplitudes(SqueezedCatParams(alpha, 0.0), cutoff)


def phase_rotate(state: FockVector, phi: float) -> FockVector:
    """Apply R(phi) = exp(-i phi n)."""
    n = np.arange(state.amplitudes.size)
    return FockVector(state.amplitudes * np.exp(-1j * phi * n))


def fix_global_phase(state: FockVector) -> FockVector:
    """Largest-magnitude amplitude made real positive."""
    peak = state.amplitudes[int(np.argmax(np.abs(state.amplitudes)))]
    if peak == 0:
        raise DomainError("zero vector has no phase")
    return FockVector(state.amplitudes * (abs(peak) / peak))


def fidelity(a: FockVector, b: FockVector) -> float:
    """|<a|b>|^2 / (|a|^2 |b|^2), zero-padding the shorter vector."""
    cutoff = max(a.cutoff, b.cutoff)
    va, vb = a.padded(cutoff), b.padded(cutoff)
    na, nb = np.vdot(va, va).real, np.vdot(vb, vb).real
    if na == 0.0 or nb == 0.0:
        raise DomainError("fidelity with the zero vector is undefined")
    return float(min(1.0, abs(np.vdot(va, vb)) ** 2 / (na * nb)))


def mean_photon(state: FockVector) -> float:
    p = state.probabilities
    return float(np.dot(np.arange(p.size), p) / p.sum())


def photon_variance(state: FockVector) -> float:
    p = state.probabilities / state.probabilities.sum()
    n = np.arange(p.size, dtype=np.float64)
    mean = float(np.dot(n, p))
    return float(np.dot((n - mean) ** 2, p))


def v_moment(beta: float, alpha: float, r: float) -> float:
    """<beta| S^dag(r) n S(r) |alpha> for real beta, alpha."""
    overlap = math.exp(-0.5 * (alpha - beta) ** 2)
    return overlap * (
        -(alpha**2 + beta**2) * math.sinh(2 * r) / 2
        + alpha * beta * math.cosh(2 * r)
        + math.sinh(r) ** 2
    )


def cat_mean_photon_exact(params: SqueezedCatParams) -> float:
    b, r = params.beta, params.r
    total = v_moment(b, b, r) + v_moment(b, -b, r) + v_moment(-b, b, r) + v_moment(-b, -b, r)
    return total / (2.0 * (1.0 + math.exp(-2.0 * b * b)))


def cat_mean_photon_approx(params: SqueezedCatParams) -> float:
    return params.beta**2 * math.exp(-2 * params.r) + math.sinh(params.r) ** 2


def cat_variance_approx(params: SqueezedCatParams) -> float:
    return params.beta**2 * math.exp(-4 * params.r)


def moment_report(params: SqueezedCatParams) -> dict[str, float]:
    """Numeric moments of the constructed cat next to the closed forms."""
    cat = squeezed_cat_amplitudes(params)
    mean, var = mean_photon(cat), photon_variance(cat)
    exact = cat_mean_photon_exact(params)
    leading_mean = params.beta**2 * math.exp(-2 * params.r)
    approx_var = cat_variance_approx(params)
    return {
        "beta": params.beta,
        "r": params.r,
        "mean_numeric": mean,
        "mean_exact": exact,
        "mean_leading": leading_mean,
        "variance_numeric": var,
        "variance_law": approx_var,
        "mean_rel_gap": abs(mean - exact) / exact if exact else abs(mean),
        "mean_leading_rel_gap": abs(mean - leading_mean) / leading_mean if leading_mean else abs(mean),
        "variance_rel_gap": abs(var - approx_var) / approx_var if approx_var else abs(var),
    }
