"""Continuous-variable measurement effects on the two-level Fock subspace.

Homodyne detection with a binned quadrature outcome and displacement-based
on/off photodetection both reduce, on the span of |0> and |1>, to dichotomic
qubit effects with closed-form matrix elements.  This module builds those
effects, the +/-1 observables derived from them, and the amplitude-damping
channel that models finite detection efficiency.

The homodyne matrix elements follow from integrating products of the n = 0, 1
harmonic-oscillator wavefunctions

    psi_0(x) = pi**-0.25 * exp(-x**2 / 2),
    psi_1(x) = sqrt(2) * x * pi**-0.25 * exp(-x**2 / 2)

over the acceptance bin, which for this subspace reduces to error functions
and Gaussians.  A composite Gauss-Legendre quadrature of the same integrals
is kept as an independent numerical cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qubit import IDENTITY, TWO_PI, is_density_matrix

_SQRT_PI = math.sqrt(math.pi)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class HomodyneSetting:
    """Quadrature phase and acceptance bin of a binned homodyne measurement.

    The outcome is +1 when the quadrature result falls in [bin_lo, bin_hi]
    and -1 otherwise.  Bins are single intervals; the optimizer confines
    them to [-5, 5], where the n <= 1 wavefunctions have decayed to
    negligible weight, so [-5, 5] acts as the full line.  theta is stored
    modulo 2*pi (the effect is periodic in the local-oscillator phase).
    """

    theta: float
    bin_lo: float
    bin_hi: float

    def __post_init__(self) -> None:
        if self.bin_lo > self.bin_hi:
            raise ValueError(f"bin_lo must not exceed bin_hi, got [{self.bin_lo}, {self.bin_hi}]")
        object.__setattr__(self, "theta", math.fmod(self.theta, TWO_PI) % TWO_PI)


@dataclass(frozen=True)
class DisplacementSetting:
    """Magnitude and phase of the displacement before an on/off detector."""

    r: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"displacement magnitude must lie in [0, 1], got {self.r}")
        object.__setattr__(self, "phi", math.fmod(self.phi, TWO_PI) % TWO_PI)


def homodyne_effect(setting: HomodyneSetting) -> np.ndarray:
    """Projector onto quadrature outcomes in the bin, on the |0>,|1> subspace.

    Matrix elements (a = bin_lo, b = bin_hi, theta = quadrature phase):

        <0|Pi|0> = (erf(b) - erf(a)) / 2
        <1|Pi|1> = <0|Pi|0> + (a exp(-a^2) - b exp(-b^2)) / sqrt(pi)
        <0|Pi|1> = exp(-i theta) (exp(-a^2) - exp(-b^2)) / sqrt(2 pi)

    The result is Hermitian with eigenvalues in [0, 1].
    """
    a, b = setting.bin_lo, setting.bin_hi
    m00 = 0.5 * (math.erf(b) - math.erf(a))
    m11 = m00 + (a * math.exp(-a * a) - b * math.exp(-b * b)) / _SQRT_PI
    k01 = (math.exp(-a * a) - math.exp(-b * b)) / _SQRT_TWO_PI
    off = k01 * np.exp(-1j * setting.theta)
    return np.array([[m00, off], [off.conjugate(), m11]], dtype=complex)


def homodyne_observable(setting: HomodyneSetting) -> np.ndarray:
    """+/-1 observable 2*Pi - I of the binned homodyne measurement."""
    return 2.0 * homodyne_effect(setting) - IDENTITY


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


def homodyne_effect_numeric(setting: HomodyneSetting, panels: int = 8) -> np.ndarray:
    """Quadrature-based evaluation of the binned homodyne projector.

    Numerically integrates psi_n(x) psi_m(x) over the bin with composite
    64-node Gauss-Legendre panels.  Kept deliberately independent of the
    closed forms in :func:`homodyne_effect` so the two paths can check each
    other.
    """
    a, b = setting.bin_lo, setting.bin_hi
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    gauss = np.exp(-x * x)
    i00 = float(np.sum(w * gauss) / _SQRT_PI)
    i11 = float(np.sum(w * 2.0 * x * x * gauss) / _SQRT_PI)
    i01 = float(np.sum(w * math.sqrt(2.0) * x * gauss) / _SQRT_PI)
    off = i01 * np.exp(-1j * setting.theta)
    return np.array([[i00, off], [off.conjugate(), i11]], dtype=complex)


def displacement_effect(setting: DisplacementSetting) -> np.ndarray:
    """No-click effect |alpha><alpha| of displaced on/off detection.

    For alpha = r exp(i phi) the coherent-state projector restricted to the
    |0>,|1> subspace reads exp(-r^2) [[1, r e^{-i phi}], [r e^{i phi}, r^2]].
    """
    r, phi = setting.r, setting.phi
    scale = math.exp(-r * r)
    off = scale * r * np.exp(-1j * phi)
    return np.array([[scale, off], [off.conjugate(), scale * r * r]], dtype=complex)


def displacement_observable(setting: DisplacementSetting) -> np.ndarray:
    """+/-1 observable 2|alpha><alpha| - I (no-click minus click)."""
    return 2.0 * displacement_effect(setting) - IDENTITY


def kraus_operators(eta: float) -> tuple[np.ndarray, np.ndarray]:
    """Kraus pair of the amplitude-damping channel with efficiency eta."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"detection efficiency must lie in [0, 1], got {eta}")
    e0 = np.array([[1.0, 0.0], [0.0, math.sqrt(eta)]], dtype=complex)
    e1 = np.array([[0.0, math.sqrt(1.0 - eta)], [0.0, 0.0]], dtype=complex)
    return e0, e1


def amplitude_damp(rho: np.ndarray, eta: float) -> np.ndarray:
    """Amplitude-damping channel: |1> decays to |0> with probability 1 - eta.

    Trace preserving and positivity preserving for any density matrix.
    eta = 1 is the identity channel; eta = 0 maps everything to |0><0|.
    """
    if not is_density_matrix(np.asarray(rho)):
        raise ValueError("amplitude_damp expects a valid density matrix")
    e0, e1 = kraus_operators(eta)
    return e0 @ rho @ e0.conj().T + e1 @ rho @ e1.conj().T
