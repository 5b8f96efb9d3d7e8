"""Guessing probabilities, min-entropy and the witness-to-randomness map.

Certified randomness is quantified by the adversary's best single-shot
guessing probability compatible with an observed witness value: maximize a
guessing functional over all qubit realizations (pure preparations, rank-1
projective measurements) subject to the witness evaluating to the target.
The min-entropy H = -log2(p*) of the constrained optimum is the certified
randomness per round.

Four guessing functionals are supported:

- "global": max over all outcomes and settings of p(b|x,y);
- "conditional": max_b p(b|x,y) at one fixed setting pair;
- "average": sum_xy p(x) p(y) max_b p(b|x,y) for given input distributions;
- "uniform": the average with uniform p(x), p(y).

The equality constraint is handled by an exterior quadratic penalty with an
escalating weight; the first measurement is gauge-fixed to the projector
onto |0> to remove the global rotational freedom, which the penalty surface
would otherwise inherit as a flat direction.

For the tilted three-preparation witness there is also a closed-form upper
bound F on the uniform average guessing probability as a function of the
witness value; it lower-bounds the certified min-entropy independently of
any numerical optimization.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from .optimize import OptimizerConfig
from .qubit import Behavior, PreparationAngles, ProjectiveAngles
from .simplex import Coordinate, nelder_mead, random_start
from .witnesses import Witness

# Exterior-penalty escalation ladder.  Near the quantum maximum the
# constrained guessing optimum approaches its limit like sqrt(distance), so
# the equilibrium constraint violation scales as (1/mu)^(2/3); weights up to
# 1e9 are needed to land within the 1e-6 feasibility tolerance there.
PENALTY_WEIGHTS = (1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9)
FEASIBILITY_TOL = 1e-6


class BoundClampWarning(UserWarning):
    """Emitted when the analytic bound's square-root argument is clamped."""


def min_entropy(p: float) -> float:
    """Min-entropy -log2(p) of a guessing probability p in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"guessing probability must lie in (0, 1], got {p}")
    return -math.log2(p) + 0.0  # + 0.0 normalizes -0.0 at p = 1


def _validate_weights(weights: Sequence[float], n: int, label: str) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"{label} must have length {n}")
    if np.min(w) < 0.0 or abs(float(np.sum(w)) - 1.0) > 1e-12:
        raise ValueError(f"{label} must be a probability vector")
    return w


def guessing_probability(
    behavior: Behavior,
    mode: str = "global",
    *,
    x: int | None = None,
    y: int | None = None,
    weights_x: Sequence[float] | None = None,
    weights_y: Sequence[float] | None = None,
) -> float:
    """Guessing probability of a behavior under the chosen functional."""
    p = behavior.probs
    if mode == "global":
        return float(np.max(p))
    if mode == "conditional":
        if x is None or y is None:
            raise ValueError("conditional mode needs explicit x and y")
        return float(np.max(p[:, x, y]))
    best = np.max(p, axis=0)  # max_b p(b|x,y), shape (n_x, n_y)
    if mode == "uniform":
        return float(np.mean(best))
    if mode == "average":
        if weights_x is None or weights_y is None:
            raise ValueError("average mode needs weights_x and weights_y")
        wx = _validate_weights(weights_x, behavior.n_x, "weights_x")
        wy = _validate_weights(weights_y, behavior.n_y, "weights_y")
        return float(wx @ best @ wy)
    raise ValueError(f"unknown guessing mode {mode!r}")


def analytic_guessing_bound(value: float, w: float) -> float:
    """Closed-form upper bound F on the uniform average guessing probability.

    Valid for the tilted three-preparation witness with two measurements and
    tilt weight w strictly inside (0, 1).  With A = w^2 + (1-w)^2 and
    B = 2 w (1-w),

        F = 1/2 + 1/2 sqrt(1/2 + (A^2 - ((value - w)^2 / 2 - A)^2) / (2 B^2)).

    The square-root argument is clamped at zero; a clamp beyond numerical
    noise (below -1e-9) additionally raises :class:`BoundClampWarning`.
    At the classical bound F = 1 (nothing certified); at the quantum maximum
    F = 1/2 + 1/(2 sqrt(2)).
    """
    if not 0.0 < w < 1.0:
        raise ValueError(f"tilt weight must lie strictly inside (0, 1), got {w}")
    a = w * w + (1.0 - w) ** 2
    b = 2.0 * w * (1.0 - w)
    quantum = 2.0 * math.sqrt(a) + w
    if value > quantum + 1e-9:
        raise ValueError(f"witness value {value} exceeds the quantum maximum {quantum}")
    bracket = 0.5 * (value - w) ** 2 - a
    arg = 0.5 + (a * a - bracket * bracket) / (2.0 * b * b)
    if arg < 0.0:
        if arg < -1e-9:
            warnings.warn(
                f"clamped square-root argument {arg:.3e} for value={value}, w={w}",
                BoundClampWarning,
                stacklevel=2,
            )
        arg = 0.0
    # rounding can push the bound a few ulp past 1 at the classical bound
    return min(1.0, 0.5 + 0.5 * math.sqrt(arg))


@dataclass(frozen=True)
class GuessingResult:
    """Outcome of one constrained guessing maximization."""

    p_guess: float
    witness_value: float
    feasible: bool
    preparations: tuple[PreparationAngles, ...]
    measurements: tuple[ProjectiveAngles, ...]
    best_restart: int

    @property
    def min_entropy(self) -> float:
        return min_entropy(self.p_guess)


def _coordinates(n_x: int, n_y: int) -> list[Coordinate]:
    coords = []
    for _ in range(n_x):
        coords.append(Coordinate(0.0, math.pi))
        coords.append(Coordinate(0.0, 2.0 * math.pi, periodic=True))
    for _ in range(n_y - 1):  # first measurement gauge-fixed to |0><0|
        coords.append(Coordinate(0.0, math.pi))
        coords.append(Coordinate(0.0, 2.0 * math.pi, periodic=True))
    return coords


def _make_probability_fn(n_x: int, n_y: int) -> Callable[[list[float]], list[float]]:
    """p(0|x,y) for all setting pairs, flattened as x * n_y + y."""
    base = 2 * n_x

    def probabilities(vec: list[float]) -> list[float]:
        out = [0.0] * (n_x * n_y)
        effects = [(1.0, 0.0, 0.0, 0.0)]  # gauge-fixed projector onto |0>
        for j in range(n_y - 1):
            half = 0.5 * vec[base + 2 * j]
            cb, sb = math.cos(half), math.sin(half)
            effects.append((cb * cb, sb * sb, cb * sb, vec[base + 2 * j + 1]))
        for x in range(n_x):
            half = 0.5 * vec[2 * x]
            c, s = math.cos(half), math.sin(half)
            r00, r11, cs, eta = c * c, s * s, c * s, vec[2 * x + 1]
            for y, (m00, m11, k01, phase) in enumerate(effects):
                out[x * n_y + y] = (
                    r00 * m00 + r11 * m11 + 2.0 * cs * k01 * math.cos(phase - eta)
                )
        return out

    return probabilities


def _guessing_fn(
    mode: str,
    n_x: int,
    n_y: int,
    x: int | None,
    y: int | None,
    weights_x: Sequence[float] | None,
    weights_y: Sequence[float] | None,
) -> Callable[[list[float]], float]:
    if mode == "global":
        return lambda p0s: max(max(p0s), 1.0 - min(p0s))
    if mode == "conditional":
        if x is None or y is None:
            raise ValueError("conditional mode needs explicit x and y")
        idx = x * n_y + y
        return lambda p0s: max(p0s[idx], 1.0 - p0s[idx])
    if mode == "uniform":
        scale = 1.0 / (n_x * n_y)
        return lambda p0s: scale * sum(max(p, 1.0 - p) for p in p0s)
    if mode == "average":
        wx = _validate_weights(weights_x, n_x, "weights_x")
        wy = _validate_weights(weights_y, n_y, "weights_y")
        flat = [float(wx[i] * wy[j]) for i in range(n_x) for j in range(n_y)]
        return lambda p0s: sum(
            wgt * max(p, 1.0 - p) for wgt, p in zip(flat, p0s)
        )
    raise ValueError(f"unknown guessing mode {mode!r}")


def max_guessing_given_witness(
    witness: Witness,
    target: float,
    config: OptimizerConfig = OptimizerConfig(),
    mode: str = "uniform",
    *,
    x: int | None = None,
    y: int | None = None,
    weights_x: Sequence[float] | None = None,
    weights_y: Sequence[float] | None = None,
) -> GuessingResult:
    """Maximal guessing probability at a fixed witness value.

    Maximizes the chosen guessing functional over pure preparations and
    rank-1 projective measurements (the first fixed along z) subject to
    eval_witness = target, via an exterior penalty g - mu (W - target)^2
    with mu escalated over {1e2, ..., 1e9}.  A restart is feasible when its
    final witness value sits within 1e-6 of the target; the best feasible
    restart wins.
    """
    n_x, n_y = witness.coefficients.shape
    coeff = witness.coefficients
    terms = [
        (x_ * n_y + y_, float(coeff[x_, y_]))
        for x_ in range(n_x)
        for y_ in range(n_y)
        if coeff[x_, y_] != 0.0
    ]
    probabilities = _make_probability_fn(n_x, n_y)
    guessing = _guessing_fn(mode, n_x, n_y, x, y, weights_x, weights_y)

    def witness_value(p0s: list[float]) -> float:
        return sum(c * (2.0 * p0s[i] - 1.0) for i, c in terms)

    coords = _coordinates(n_x, n_y)
    best_feasible = None  # maximal p_guess among runs meeting the constraint
    best_infeasible = None  # smallest constraint violation otherwise
    for restart in range(config.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(restart,)))
        vec = random_start(rng, coords)
        for mu in PENALTY_WEIGHTS:

            def objective(v: list[float], mu: float = mu) -> float:
                p0s = probabilities(v)
                gap = witness_value(p0s) - target
                return -(guessing(p0s) - mu * gap * gap)

            vec, _, _ = nelder_mead(
                objective, vec, coords, max_iterations=config.max_iterations, ftol=config.tol
            )
        p0s = probabilities(list(vec))
        achieved = witness_value(p0s)
        gap = abs(achieved - target)
        entry = (guessing(p0s), achieved, vec, restart)
        if gap <= FEASIBILITY_TOL:
            if best_feasible is None or entry[0] > best_feasible[0]:
                best_feasible = entry
        elif best_infeasible is None or gap < abs(best_infeasible[1] - target):
            best_infeasible = entry
    if best_feasible is None and best_infeasible is None:
        raise ValueError("config.restarts must be at least 1")

    feasible = best_feasible is not None
    p_guess, achieved, vec, restart = best_feasible if feasible else best_infeasible
    preps = tuple(
        PreparationAngles(float(vec[2 * i]), float(vec[2 * i + 1])) for i in range(n_x)
    )
    meas = (ProjectiveAngles(0.0, 0.0),) + tuple(
        ProjectiveAngles(float(vec[2 * n_x + 2 * j]), float(vec[2 * n_x + 2 * j + 1]))
        for j in range(n_y - 1)
    )
    return GuessingResult(p_guess, achieved, feasible, preps, meas, restart)


@dataclass(frozen=True)
class CurvePoint:
    """One point of a min-entropy curve."""

    w_star: float
    normalized: float | None
    p_guess: float
    h_min: float
    f_bound: float | None
    h_min_analytic: float | None
    feasible: bool


@dataclass(frozen=True)
class EntropyCurve:
    """Min-entropy versus witness value, with the analytic bound alongside."""

    witness_name: str
    points: tuple[CurvePoint, ...]

    CSV_COLUMNS = ("W_star", "normalized", "p_guess", "H_min", "F_bound", "H_min_analytical")

    def to_csv(self, stream: TextIO) -> None:
        stream.write(",".join(self.CSV_COLUMNS) + "\n")
        for pt in self.points:
            cells = [
                f"{pt.w_star:.12g}",
                "" if pt.normalized is None else f"{pt.normalized:.12g}",
                f"{pt.p_guess:.12g}",
                f"{pt.h_min:.12g}",
                "" if pt.f_bound is None else f"{pt.f_bound:.12g}",
                "" if pt.h_min_analytic is None else f"{pt.h_min_analytic:.12g}",
            ]
            stream.write(",".join(cells) + "\n")


def normalized_violation(witness: Witness, value: float) -> float | None:
    """(value - classical) / (quantum - classical), when the quantum bound is known."""
    if witness.quantum_bound is None:
        return None
    span = witness.quantum_bound - witness.classical_bound
    if span <= 0.0:
        return None
    return (value - witness.classical_bound) / span


def min_entropy_curve(
    witness: Witness,
    targets: Iterable[float],
    config: OptimizerConfig = OptimizerConfig(),
    mode: str = "uniform",
    **mode_kwargs,
) -> EntropyCurve:
    """Constrained guessing optimization over a grid of witness values.

    Each grid point is solved independently (deterministic sub-seeds), and
    infeasible points are reported inline through their `feasible` flag.
    For tilted witnesses the closed-form bound F and its min-entropy are
    attached per point.
    """
    points = []
    for target in targets:
        result = max_guessing_given_witness(witness, float(target), config, mode, **mode_kwargs)
        f_bound = None
        h_analytic = None
        in_domain = witness.quantum_bound is None or target <= witness.quantum_bound + 1e-9
        if witness.tilt is not None and 0.0 < witness.tilt < 1.0 and in_domain:
            f_bound = analytic_guessing_bound(float(target), witness.tilt)
            h_analytic = min_entropy(f_bound)
        points.append(
            CurvePoint(
                w_star=float(target),
                normalized=normalized_violation(witness, float(target)),
                p_guess=result.p_guess,
                h_min=min_entropy(result.p_guess),
                f_bound=f_bound,
                h_min_analytic=h_analytic,
                feasible=result.feasible,
            )
        )
    return EntropyCurve(witness.name, tuple(points))
