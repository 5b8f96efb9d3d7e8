"""Multistart maximization of witness values over states and measurements.

The objective - a witness value as a function of preparation angles and
scheme-constrained measurement parameters - is smooth, low-dimensional and
multimodal, so it is maximized by Nelder-Mead refinement from uniformly
random restarts over the box-constrained parameter space.  Each restart
draws its start point from a deterministic sub-seed derived from
(seed, restart index); the merge is an associative max, so results do not
depend on evaluation order.

Measurement settings are typed per scenario input y:

- "H": binned homodyne, parameters (theta, bin_lo, bin_hi), lossless;
- "D": displaced on/off detection, parameters (r, phi), with an optional
  per-setting detection efficiency applied by damping the state before
  that setting's Born rule;
- "P": general rank-1 projective effect, parameters (beta, gamma), lossless.

Homodyne acceptance bins are searched over intervals anchored at the
origin, bin_lo in [-5, 0] and bin_hi in [0, 5]: this makes the ordering
constraint structural, and it is the family the reference optima belong to
(their bins all cross or touch zero, several pinned exactly at it).  Wider
bins remain valid settings for evaluation; they are just not part of the
search space.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import cvmeasure, qubit, witnesses
from .simplex import Coordinate, nelder_mead, random_start

logger = logging.getLogger(__name__)

_SQRT_PI = math.sqrt(math.pi)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

BIN_LIMIT = 5.0  # quadrature window; outside it the n <= 1 wavefunctions are negligible


@dataclass(frozen=True)
class MeasurementScheme:
    """Measurement kind ('H', 'D' or 'P') and detection efficiency per setting."""

    kinds: tuple[str, ...]
    etas: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.kinds) != len(self.etas):
            raise ValueError("kinds and etas must have equal length")
        for k in self.kinds:
            if k not in ("H", "D", "P"):
                raise ValueError(f"unknown measurement kind {k!r}; expected 'H', 'D' or 'P'")
        for k, e in zip(self.kinds, self.etas):
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"efficiency must lie in [0, 1], got {e}")
            if k != "D" and e != 1.0:
                raise ValueError("loss applies to displacement settings only")

    @property
    def n_settings(self) -> int:
        return len(self.kinds)

    def with_eta(self, eta: float) -> "MeasurementScheme":
        """Same kinds with `eta` applied to every displacement setting."""
        return MeasurementScheme(
            self.kinds, tuple(eta if k == "D" else 1.0 for k in self.kinds)
        )


def scheme(kinds: str, eta: float = 1.0) -> MeasurementScheme:
    """Build a scheme from a string like "HH", "DD" or "DHP"."""
    kinds = kinds.upper()
    return MeasurementScheme(
        tuple(kinds), tuple(eta if k == "D" else 1.0 for k in kinds)
    )


@dataclass(frozen=True)
class OptimizerConfig:
    """Restart budget, per-restart iteration cap, tolerance and seed."""

    restarts: int = 200
    max_iterations: int = 2000
    tol: float = 1e-9
    seed: int = 0

    def __post_init__(self) -> None:
        if self.restarts < 0 or self.max_iterations <= 0 or self.tol <= 0.0:
            raise ValueError("restarts must be nonnegative, max_iterations and tol positive")


@dataclass(frozen=True)
class OptimizationResult:
    """Best value found, the parameters achieving it and search metadata."""

    best_value: float
    preparations: tuple[qubit.PreparationAngles, ...]
    settings: tuple
    best_restart: int
    iterations: int


def _coordinates(n_x: int, scheme: MeasurementScheme) -> list[Coordinate]:
    coords = []
    for _ in range(n_x):
        coords.append(Coordinate(0.0, math.pi))          # alpha
        coords.append(Coordinate(0.0, 2.0 * math.pi, periodic=True))  # eta
    for kind in scheme.kinds:
        if kind == "H":
            coords.append(Coordinate(0.0, math.pi))       # theta
            coords.append(Coordinate(-BIN_LIMIT, 0.0))    # bin_lo
            coords.append(Coordinate(0.0, BIN_LIMIT))     # bin_hi
        elif kind == "D":
            coords.append(Coordinate(0.0, 1.0))           # r
            coords.append(Coordinate(0.0, 2.0 * math.pi, periodic=True))  # phi
        else:
            coords.append(Coordinate(0.0, math.pi))       # beta
            coords.append(Coordinate(0.0, 2.0 * math.pi, periodic=True))  # gamma
    return coords


def _make_value_fn(
    coeff: np.ndarray, scheme: MeasurementScheme
) -> Callable[[np.ndarray], float]:
    """Scalar fast path for the witness value at a packed parameter vector.

    Kept in plain math-module arithmetic: the optimizer calls this tens of
    thousands of times per restart batch and 2x2 numpy matrices would
    dominate the runtime.  The matrix path in :func:`evaluate_strategy`
    reproduces it through the validated public constructors.
    """
    n_x, n_y = coeff.shape
    terms = [
        (x, y, float(coeff[x, y]))
        for x in range(n_x)
        for y in range(n_y)
        if coeff[x, y] != 0.0
    ]
    kinds, etas = scheme.kinds, scheme.etas
    base = 2 * n_x

    def value(vec: np.ndarray) -> float:
        states = []
        for x in range(n_x):
            half = 0.5 * vec[2 * x]
            c, s = math.cos(half), math.sin(half)
            states.append((c * c, s * s, c * s, vec[2 * x + 1]))
        effects = []
        i = base
        for y in range(n_y):
            kind = kinds[y]
            if kind == "H":
                theta, a, b = vec[i], vec[i + 1], vec[i + 2]
                i += 3
                ea, eb = math.exp(-a * a), math.exp(-b * b)
                m00 = 0.5 * (math.erf(b) - math.erf(a))
                effects.append(
                    (m00, m00 + (a * ea - b * eb) / _SQRT_PI, (ea - eb) / _SQRT_TWO_PI, theta, 1.0)
                )
            elif kind == "D":
                r, phi = vec[i], vec[i + 1]
                i += 2
                sc = math.exp(-r * r)
                effects.append((sc, sc * r * r, sc * r, phi, etas[y]))
            else:
                half = 0.5 * vec[i]
                gamma = vec[i + 1]
                i += 2
                cb, sb = math.cos(half), math.sin(half)
                effects.append((cb * cb, sb * sb, cb * sb, gamma, 1.0))
        total = 0.0
        for x, y, cxy in terms:
            r00, r11, cs, eta_x = states[x]
            m00, m11, k01, phase, loss = effects[y]
            if loss != 1.0:
                p0 = (
                    (r00 + (1.0 - loss) * r11) * m00
                    + loss * r11 * m11
                    + 2.0 * math.sqrt(loss) * cs * k01 * math.cos(phase - eta_x)
                )
            else:
                p0 = r00 * m00 + r11 * m11 + 2.0 * cs * k01 * math.cos(phase - eta_x)
            total += cxy * (2.0 * p0 - 1.0)
        return total

    return value


def _unpack(
    vec: np.ndarray, n_x: int, scheme: MeasurementScheme
) -> tuple[tuple[qubit.PreparationAngles, ...], tuple]:
    preps = tuple(
        qubit.PreparationAngles(float(vec[2 * x]), float(vec[2 * x + 1]))
        for x in range(n_x)
    )
    settings = []
    i = 2 * n_x
    for kind in scheme.kinds:
        if kind == "H":
            settings.append(
                cvmeasure.HomodyneSetting(float(vec[i]), float(vec[i + 1]), float(vec[i + 2]))
            )
            i += 3
        elif kind == "D":
            settings.append(cvmeasure.DisplacementSetting(float(vec[i]), float(vec[i + 1])))
            i += 2
        else:
            settings.append(qubit.ProjectiveAngles(float(vec[i]), float(vec[i + 1])))
            i += 2
    return preps, tuple(settings)


def _pack(
    preparations: Sequence[qubit.PreparationAngles],
    settings: Sequence,
    scheme: MeasurementScheme,
) -> np.ndarray:
    vec = []
    for p in preparations:
        vec.extend((p.alpha, p.eta))
    for kind, s in zip(scheme.kinds, settings):
        if kind == "H":
            vec.extend((s.theta, s.bin_lo, s.bin_hi))
        elif kind == "D":
            vec.extend((s.r, s.phi))
        else:
            vec.extend((s.beta, s.gamma))
    return np.array(vec)


def evaluate_strategy(
    witness: witnesses.Witness,
    scheme: MeasurementScheme,
    preparations: Sequence[qubit.PreparationAngles],
    settings: Sequence,
) -> float:
    """Witness value of explicit parameters through the validated matrix path.

    Rebuilds states and effects with the public constructors, applies the
    damping channel to the state for lossy displacement settings, and
    evaluates the witness on the resulting behavior.  Used to confirm every
    optimizer output is reproducible outside the optimizer's own fast path.
    """
    if len(settings) != scheme.n_settings or scheme.n_settings != witness.n_y:
        raise ValueError("scheme, settings and witness dimensions must agree")
    if len(preparations) != witness.n_x:
        raise ValueError("need one preparation per witness input")
    states = [qubit.state_from_angles(p) for p in preparations]
    probs = np.empty((2, witness.n_x, witness.n_y))
    for y, (kind, setting) in enumerate(zip(scheme.kinds, settings)):
        if kind == "H":
            m0 = cvmeasure.homodyne_effect(setting)
        elif kind == "D":
            m0 = cvmeasure.displacement_effect(setting)
        else:
            m0 = qubit.projector_from_angles(setting)
        eta = scheme.etas[y]
        for x, rho in enumerate(states):
            rho_eff = cvmeasure.amplitude_damp(rho, eta) if eta != 1.0 else rho
            p0 = np.trace(rho_eff @ m0).real
            probs[0, x, y] = p0
            probs[1, x, y] = 1.0 - p0
    return witnesses.eval_witness(witness, qubit.Behavior(probs))


def _multistart_max(
    value_fn: Callable[[np.ndarray], float],
    coords: Sequence[Coordinate],
    config: OptimizerConfig,
    warm_starts: Iterable[np.ndarray] = (),
) -> tuple[np.ndarray, float, int, int]:
    neg = lambda v: -value_fn(v)
    best_vec, best_val, best_restart = None, -np.inf, -1
    total_iterations = 0
    starts: list[np.ndarray] = []
    for i in range(config.restarts):
        rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(i,)))
        starts.append(random_start(rng, coords))
    starts.extend(np.asarray(w, dtype=float) for w in warm_starts)
    for index, x0 in enumerate(starts):
        x, fval, iters = nelder_mead(
            neg, x0, coords, max_iterations=config.max_iterations, ftol=config.tol
        )
        total_iterations += iters
        if -fval > best_val:
            best_vec, best_val, best_restart = x, -fval, index
    if best_vec is None:
        raise ValueError("no restarts requested and no warm starts supplied")
    return best_vec, best_val, best_restart, total_iterations


def max_witness(
    witness: witnesses.Witness,
    scheme: MeasurementScheme,
    config: OptimizerConfig = OptimizerConfig(),
    warm_starts: Iterable[np.ndarray] = (),
) -> OptimizationResult:
    """Best witness value over preparations and scheme-allowed settings."""
    if scheme.n_settings != witness.n_y:
        raise ValueError(
            f"scheme has {scheme.n_settings} settings but witness expects {witness.n_y}"
        )
    coords = _coordinates(witness.n_x, scheme)
    value_fn = _make_value_fn(witness.coefficients, scheme)
    vec, val, restart, iters = _multistart_max(value_fn, coords, config, warm_starts)
    preps, settings = _unpack(vec, witness.n_x, scheme)
    return OptimizationResult(val, preps, settings, restart, iters)


def max_witness_tilted_curve(
    w_grid: Sequence[float],
    scheme: MeasurementScheme,
    config: OptimizerConfig = OptimizerConfig(),
) -> list[tuple[float, float]]:
    """Optimal tilted-witness value per tilt weight."""
    return [
        (float(w), max_witness(witnesses.s3_tilted(w), scheme, config).best_value)
        for w in w_grid
    ]


def efficiency_curve(
    witness: witnesses.Witness,
    scheme: MeasurementScheme,
    etas: Sequence[float],
    config: OptimizerConfig = OptimizerConfig(),
    polish_passes: int = 2,
) -> list[tuple[float, OptimizationResult]]:
    """Maximal witness value on a grid of displacement efficiencies.

    After the independent per-eta multistarts, each grid point is polished
    with warm starts taken from every other point's optimum.  The extra
    refinements remove restart noise that would otherwise distort the shape
    of the curve (monotone for purely displacement-based schemes, where
    extra loss provably only degrades; hybrid schemes can genuinely dip at
    low efficiency, where vanishing displacement magnitudes decouple those
    outcomes from the preparations).
    """
    etas = [float(e) for e in etas]
    coords = _coordinates(witness.n_x, scheme)
    results: dict[float, tuple[np.ndarray, OptimizationResult]] = {}
    for eta in etas:
        sch = scheme.with_eta(eta)
        res = max_witness(witness, sch, config)
        results[eta] = (_pack(res.preparations, res.settings, sch), res)
    polish_config = OptimizerConfig(0, config.max_iterations, config.tol, config.seed)
    for _ in range(polish_passes):
        improved = False
        for eta in etas:
            sch = scheme.with_eta(eta)
            warm = [vec for e2, (vec, _) in results.items() if e2 != eta]
            value_fn = _make_value_fn(witness.coefficients, sch)
            vec, val, restart, iters = _multistart_max(value_fn, coords, polish_config, warm)
            if val > results[eta][1].best_value + 1e-12:
                preps, settings = _unpack(vec, witness.n_x, sch)
                results[eta] = (
                    vec,
                    OptimizationResult(val, preps, settings, restart, iters),
                )
                improved = True
        if not improved:
            break
    return [(eta, results[eta][1]) for eta in etas]


def _check_monotone_trace(trace: dict[float, float]) -> None:
    etas = sorted(trace)
    values = [trace[e] for e in etas]
    for lo, hi in zip(values, values[1:]):
        if lo > hi + 1e-6:
            warnings.warn(
                "witness maximum decreased with increasing efficiency; "
                f"bisection trace {list(zip(etas, values))}",
                RuntimeWarning,
                stacklevel=3,
            )
            return


def critical_efficiency(
    witness: witnesses.Witness,
    scheme: MeasurementScheme,
    config: OptimizerConfig = OptimizerConfig(),
    width: float = 1e-3,
) -> float | None:
    """Smallest displacement efficiency at which the witness still violates.

    Bisects the violation gap g(eta) = max value - classical bound, treating
    it as nondecreasing in eta (the damping channel only degrades; the trace
    is checked and a non-monotone observation raises a warning).  Returns
    None when even the lossless optimum does not violate.
    """
    if "D" not in scheme.kinds:
        raise ValueError("critical efficiency needs at least one displacement setting")
    coords = _coordinates(witness.n_x, scheme)
    trace: dict[float, float] = {}
    packs: dict[float, np.ndarray] = {}

    def value_at(eta: float) -> float:
        sch = scheme.with_eta(eta)
        warm = [packs[e] for e in sorted(packs, key=lambda e: abs(e - eta))[:3]]
        res = max_witness(witness, sch, config, warm_starts=warm)
        trace[eta] = res.best_value
        packs[eta] = _pack(res.preparations, res.settings, sch)
        logger.debug("critical_efficiency: eta=%.6f max=%.9f", eta, res.best_value)
        return res.best_value

    bound = witness.classical_bound
    if value_at(1.0) <= bound + 1e-9:
        return None
    if value_at(0.0) > bound:
        _check_monotone_trace(trace)
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if value_at(mid) > bound:
            hi = mid
        else:
            lo = mid
    _check_monotone_trace(trace)
    return 0.5 * (lo + hi)


def crossover_efficiency(
    witness: witnesses.Witness,
    scheme: MeasurementScheme,
    config: OptimizerConfig = OptimizerConfig(),
    width: float = 1e-3,
) -> float | None:
    """Smallest efficiency at which the scheme matches full lossless homodyne.

    Returns None when the scheme never reaches the all-homodyne value, and
    0.0 when it dominates at every efficiency (e.g. comparing homodyne
    against itself).
    """
    all_homodyne = MeasurementScheme(("H",) * witness.n_y, (1.0,) * witness.n_y)
    reference = max_witness(witness, all_homodyne, config).best_value
    packs: dict[float, np.ndarray] = {}

    def value_at(eta: float) -> float:
        sch = scheme.with_eta(eta)
        warm = [packs[e] for e in sorted(packs, key=lambda e: abs(e - eta))[:3]]
        res = max_witness(witness, sch, config, warm_starts=warm)
        packs[eta] = _pack(res.preparations, res.settings, sch)
        logger.debug("crossover_efficiency: eta=%.6f max=%.9f ref=%.9f", eta, res.best_value, reference)
        return res.best_value

    if value_at(1.0) < reference:
        return None
    if value_at(0.0) >= reference:
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if value_at(mid) >= reference:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
