"""Correlator witnesses for the (3,2), (4,2) and (3,3) dichotomic scenarios.

Every witness used here is a linear functional of the correlators
E_xy = p(0|x,y) - p(1|x,y),

    W = sum_xy c[x, y] * E_xy  <=  classical bound,

so witnesses are stored directly in correlator form.  The classical bounds
are reproduced exactly by the deterministic-strategy enumeration in
:func:`cvpam.qubit.classical_max`, and the quantum bounds by optimization
over general projective measurements; both checks live in the test suite.
The quantum bound is metadata (for normalized violation axes), never a
constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qubit import Behavior


@dataclass(frozen=True)
class Witness:
    """Correlator-form witness with its classical and quantum bounds.

    `tilt` records the weight parameter for members of the tilted family
    and is None for the fixed witnesses.
    """

    name: str
    coefficients: np.ndarray
    classical_bound: float
    quantum_bound: float | None = None
    tilt: float | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 2:
            raise ValueError("coefficients must be an (n_x, n_y) matrix")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def n_x(self) -> int:
        return self.coefficients.shape[0]

    @property
    def n_y(self) -> int:
        return self.coefficients.shape[1]


def eval_witness(witness: Witness, behavior: Behavior) -> float:
    """Witness value sum_xy c[x, y] (p(0|x,y) - p(1|x,y)) of a behavior."""
    if (behavior.n_x, behavior.n_y) != witness.coefficients.shape:
        raise ValueError(
            f"behavior dimensions {(behavior.n_x, behavior.n_y)} do not match "
            f"witness {witness.coefficients.shape}"
        )
    return float(np.sum(witness.coefficients * behavior.correlators()))


def to_dict(witness: Witness) -> dict:
    """Plain-data form of a witness, as stored in CLI config files."""
    payload = {
        "name": witness.name,
        "coefficients": witness.coefficients.tolist(),
        "classical_bound": witness.classical_bound,
    }
    if witness.quantum_bound is not None:
        payload["quantum_bound"] = witness.quantum_bound
    if witness.tilt is not None:
        payload["tilt"] = witness.tilt
    return payload


def from_dict(payload: dict) -> Witness:
    """Rebuild a witness from its plain-data form."""
    return Witness(
        name=str(payload["name"]),
        coefficients=np.asarray(payload["coefficients"], dtype=float),
        classical_bound=float(payload["classical_bound"]),
        quantum_bound=(
            None if payload.get("quantum_bound") is None else float(payload["quantum_bound"])
        ),
        tilt=None if payload.get("tilt") is None else float(payload["tilt"]),
    )


def s3() -> Witness:
    """E11 + E12 + E21 - E22 - E31 <= 3, quantum maximum 1 + 2*sqrt(2)."""
    coeff = [[1.0, 1.0], [1.0, -1.0], [-1.0, 0.0]]
    return Witness("s3", np.array(coeff), 3.0, 1.0 + 2.0 * math.sqrt(2.0))


def s4() -> Witness:
    """Four-preparation facet witness; classical bound 4, quantum 4*sqrt(2).

    The coefficient rows run through all four sign patterns (+,+), (+,-),
    (-,+), (-,-), the structure of a 2->1 random-access code: with one
    communicated bit only two of the four rows can be decoded perfectly,
    which is what pins the classical bound at 4 rather than the trivial 8.
    """
    coeff = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
    return Witness("s4", np.array(coeff), 4.0, 4.0 * math.sqrt(2.0))


def s33_1() -> Witness:
    """E11 + E12 - E22 + E23 - E31 - E33 <= 4, quantum maximum 3*sqrt(3)."""
    coeff = [[1.0, 1.0, 0.0], [0.0, -1.0, 1.0], [-1.0, 0.0, -1.0]]
    return Witness("s33_1", np.array(coeff), 4.0, 3.0 * math.sqrt(3.0))


def s33_2() -> Witness:
    """Nine-correlator facet of the (3,3) scenario; classical 5, quantum 6."""
    coeff = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0]]
    return Witness("s33_2", np.array(coeff), 5.0, 6.0)


def s3_tilted(w: float) -> Witness:
    """One-parameter reweighting of s3, sensitive to preparation asymmetry.

    S3(w) = w (E11 + E21 - E31) + (1 - w)(E12 - E22) with classical bound
    max(2 - w, 3 w) and quantum maximum 2 sqrt(w^2 + (1-w)^2) + w.  At
    w = 1/2 this is half of s3.
    """
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"tilt parameter must lie in [0, 1], got {w}")
    coeff = [[w, 1.0 - w], [w, -(1.0 - w)], [-w, 0.0]]
    classical = max(2.0 - w, 3.0 * w)
    quantum = 2.0 * math.sqrt(w * w + (1.0 - w) ** 2) + w
    return Witness(f"s3t({w:g})", np.array(coeff), classical, quantum, tilt=w)
