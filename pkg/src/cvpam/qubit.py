"""Two-level state and measurement algebra for prepare-and-measure scenarios.

Everything in this package lives on the qubit spanned by the two lowest Fock
states |0> and |1>.  This module provides the parametrized pure preparations,
rank-1 projective effects, Bloch-vector conversions, Born-rule behaviors and
the brute-force classical bound used as an exact oracle throughout.

Conventions
-----------
- States: |phi> = cos(alpha/2)|0> + e^{i eta} sin(alpha/2)|1>, with
  alpha in [0, pi] (polar angle) and eta in [0, 2*pi) (phase).
- Effects: a dichotomic measurement is represented by its outcome-0 element
  M0; the outcome-1 element is I - M0.
- Correlators: E_xy = p(0|x,y) - p(1|x,y), always computed from the Born
  rule.  Formulas quoted elsewhere with the opposite sign are absorbed by
  outcome relabelings.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from .witnesses import Witness

# Tolerances used across the package: algebraic identities should hold to
# ATOL_ALGEBRA, quantities accumulated through floating arithmetic to
# ATOL_ACCUMULATED.
ATOL_ALGEBRA = 1e-12
ATOL_ACCUMULATED = 1e-10

TWO_PI = 2.0 * np.pi

IDENTITY = np.eye(2, dtype=complex)
IDENTITY.setflags(write=False)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
for _p in (PAULI_X, PAULI_Y, PAULI_Z):
    _p.setflags(write=False)


@dataclass(frozen=True)
class PreparationAngles:
    """Polar/phase parametrization of a pure qubit preparation."""

    alpha: float
    eta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= np.pi:
            raise ValueError(f"alpha must lie in [0, pi], got {self.alpha}")
        if not 0.0 <= self.eta < TWO_PI:
            raise ValueError(f"eta must lie in [0, 2*pi), got {self.eta}")


@dataclass(frozen=True)
class ProjectiveAngles:
    """Polar/phase parametrization of a rank-1 projective effect."""

    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= np.pi:
            raise ValueError(f"beta must lie in [0, pi], got {self.beta}")
        if not 0.0 <= self.gamma < TWO_PI:
            raise ValueError(f"gamma must lie in [0, 2*pi), got {self.gamma}")


def state_from_angles(prep: PreparationAngles) -> np.ndarray:
    """Density matrix |phi><phi| of the pure state with the given angles."""
    half = 0.5 * prep.alpha
    c, s = np.cos(half), np.sin(half)
    phase = np.exp(1j * prep.eta)
    ket = np.array([c, phase * s], dtype=complex)
    return np.outer(ket, ket.conj())


def projector_from_angles(meas: ProjectiveAngles) -> np.ndarray:
    """Outcome-0 projector M0 for the given measurement angles.

    The outcome-1 element is I - M0.  (beta, gamma) = (0, 0) is the
    projector onto |0>, i.e. a measurement fixed along the z axis.
    """
    half = 0.5 * meas.beta
    c2, s2 = np.cos(half) ** 2, np.sin(half) ** 2
    off = 0.5 * np.sin(meas.beta) * np.exp(-1j * meas.gamma)
    return np.array([[c2, off], [off.conjugate(), s2]], dtype=complex)


def is_hermitian(m: np.ndarray, atol: float = ATOL_ALGEBRA) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= atol)


def is_positive_semidefinite(m: np.ndarray, atol: float = ATOL_ACCUMULATED) -> bool:
    """Both eigenvalues of the (Hermitian) matrix are >= -atol."""
    return bool(np.min(np.linalg.eigvalsh(m)) >= -atol)


def is_density_matrix(m: np.ndarray, atol: float = ATOL_ACCUMULATED) -> bool:
    return (
        m.shape == (2, 2)
        and is_hermitian(m, atol)
        and abs(np.trace(m).real - 1.0) <= atol
        and is_positive_semidefinite(m, atol)
    )


def is_effect(m: np.ndarray, atol: float = ATOL_ACCUMULATED) -> bool:
    """0 <= M <= I within tolerance (eigenvalue check)."""
    if m.shape != (2, 2) or not is_hermitian(m, atol):
        return False
    eigs = np.linalg.eigvalsh(m)
    return bool(eigs[0] >= -atol and eigs[-1] <= 1.0 + atol)


def bloch_vector(m: np.ndarray) -> np.ndarray:
    """Bloch components (x, y, z) of a Hermitian 2x2 matrix M = (tr(M) I + v.sigma)/2."""
    return np.array(
        [
            2.0 * m[1, 0].real,
            2.0 * m[1, 0].imag,
            (m[0, 0] - m[1, 1]).real,
        ]
    )


def state_from_bloch(v: Sequence[float]) -> np.ndarray:
    """Density matrix (I + v.sigma)/2; v must satisfy |v| <= 1."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("Bloch vector must have three components")
    if np.linalg.norm(v) > 1.0 + ATOL_ALGEBRA:
        raise ValueError(f"state Bloch vector must have norm <= 1, got {np.linalg.norm(v)}")
    return 0.5 * (IDENTITY + v[0] * PAULI_X + v[1] * PAULI_Y + v[2] * PAULI_Z)


def effect_from_bloch(v: Sequence[float]) -> np.ndarray:
    """Rank-1 projective effect (I + v.sigma)/2; v must be a unit vector."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("Bloch vector must have three components")
    if abs(np.linalg.norm(v) - 1.0) > ATOL_ALGEBRA:
        raise ValueError(f"projective effect requires a unit Bloch vector, got norm {np.linalg.norm(v)}")
    return 0.5 * (IDENTITY + v[0] * PAULI_X + v[1] * PAULI_Y + v[2] * PAULI_Z)


@dataclass(frozen=True)
class Behavior:
    """Conditional-probability tensor p(b|x,y) of a dichotomic scenario.

    probs has shape (2, n_x, n_y); probs[b, x, y] = p(b|x,y).  Entries are
    clamped to [0, 1] after validating they were within numerical noise of
    that interval, and each (x, y) column is checked for normalization.
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 3 or p.shape[0] != 2:
            raise ValueError(f"probability tensor must have shape (2, n_x, n_y), got {p.shape}")
        if np.min(p) < -ATOL_ALGEBRA or np.max(p) > 1.0 + ATOL_ALGEBRA:
            raise ValueError("probabilities outside [0, 1] beyond tolerance")
        totals = p.sum(axis=0)
        if np.max(np.abs(totals - 1.0)) > ATOL_ACCUMULATED:
            raise ValueError("outcome probabilities do not sum to 1")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n_x(self) -> int:
        return self.probs.shape[1]

    @property
    def n_y(self) -> int:
        return self.probs.shape[2]

    def correlators(self) -> np.ndarray:
        """E[x, y] = p(0|x,y) - p(1|x,y)."""
        return self.probs[0] - self.probs[1]


def behavior_from_strategy(
    states: Sequence[np.ndarray], effects: Sequence[np.ndarray]
) -> Behavior:
    """Born-rule behavior p(b|x,y) = tr(rho_x M_{b|y}).

    `effects` holds the outcome-0 element per setting; outcome 1 uses the
    complement I - M0.
    """
    for rho in states:
        if not is_density_matrix(np.asarray(rho)):
            raise ValueError("invalid density matrix among preparations")
    for m0 in effects:
        if not is_effect(np.asarray(m0)):
            raise ValueError("invalid effect: need 0 <= M0 <= I")
    n_x, n_y = len(states), len(effects)
    p = np.empty((2, n_x, n_y))
    for x, rho in enumerate(states):
        for y, m0 in enumerate(effects):
            p0 = np.trace(rho @ m0).real
            p[0, x, y] = p0
            p[1, x, y] = np.trace(rho @ (IDENTITY - m0)).real
    return Behavior(p)


def classical_max(witness: "Witness") -> float:
    """Exact classical bound of a correlator witness for one communicated bit.

    Enumerates every deterministic strategy: Alice's encodings x -> a in
    {0, 1} (2**n_x maps) and Bob's decodings (a, y) -> b (2**(2 n_y) maps),
    and returns the maximal witness value over all products.  Exhaustive,
    hence an exact oracle for the stored classical bounds.
    """
    coeff = witness.coefficients
    n_x, n_y = coeff.shape
    best = -np.inf
    signs = (1.0, -1.0)  # b = 0 -> E contribution +1, b = 1 -> -1
    for alice in product((0, 1), repeat=n_x):
        for bob in product((0, 1), repeat=2 * n_y):
            value = 0.0
            for x in range(n_x):
                a = alice[x]
                for y in range(n_y):
                    value += coeff[x, y] * signs[bob[a * n_y + y]]
            if value > best:
                best = value
    return float(best)
