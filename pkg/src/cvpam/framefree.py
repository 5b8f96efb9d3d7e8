"""Witness violations without a shared reference frame.

Two protocols quantify how robust the three-preparation witness violation is
when Bob's measurement frame is unknown:

- a projective Monte-Carlo protocol: Bob's Bloch vectors are rotated by
  random SO(3) elements, and for each rotation the witness is maximized
  over all relabelings of a fixed catalog of four preparations and three
  measurements;
- a continuous-variable phase sweep: the optimal displacement or homodyne
  strategy, extended by a small pool of extra settings, is evaluated under
  a common phase offset gamma added to every measurement, again maximized
  over relabelings of every ordered setting pair.

Relabelings are ordered triples of distinct preparations, ordered pairs of
distinct measurements, and independent outcome flips of the two chosen
measurements; correlators always come from the Born rule as 2 p(0|x,y) - 1,
so any sign-convention ambiguity is absorbed by the flip enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Sequence, TextIO

import numpy as np

from . import fixtures
from .cvmeasure import DisplacementSetting, HomodyneSetting
from .optimize import BIN_LIMIT, OptimizerConfig
from .qubit import PreparationAngles, TWO_PI
from .simplex import Coordinate, nelder_mead, random_start

_SQRT_PI = math.sqrt(math.pi)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)

QUANTUM_MAX = 1.0 + 2.0 * math.sqrt(2.0)
CLASSICAL_BOUND = 3.0

# Bloch catalogs for the projective protocol: the optimal strategy's three
# preparations and two measurements, each extended by the z axis so that
# relabelings can probe genuinely three-dimensional rotations.
PREPARATION_CATALOG = np.array(
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [-1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0), 0.0],
        [0.0, 0.0, 1.0],
    ]
)
MEASUREMENT_CATALOG = np.array(
    [
        [1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0), 0.0],
        [1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0), 0.0],
        [0.0, 0.0, 1.0],
    ]
)


@lru_cache(maxsize=None)
def _relabeling_arrays(n_prep: int, n_meas: int) -> tuple[np.ndarray, ...]:
    """Index arrays enumerating every relabeling of the generic witness form.

    A relabeling assigns an ordered triple (x, x', x'') of distinct
    preparations, an ordered pair (y, y') of distinct measurements, and
    outcome-flip signs for the two measurements.  For four preparations and
    three measurements this gives 24 * 6 * 4 = 576 relabelings.
    """
    rows = [
        (x, xp, xpp, y, yp, sy, syp)
        for (x, xp, xpp) in permutations(range(n_prep), 3)
        for (y, yp) in permutations(range(n_meas), 2)
        for sy, syp in product((1.0, -1.0), repeat=2)
    ]
    arr = np.array(rows)
    xs, xps, xpps = arr[:, 0].astype(int), arr[:, 1].astype(int), arr[:, 2].astype(int)
    ys, yps = arr[:, 3].astype(int), arr[:, 4].astype(int)
    sy, syp = arr[:, 5], arr[:, 6]
    return xs, xps, xpps, ys, yps, sy, syp


def relabeled_max(correlators: np.ndarray) -> np.ndarray:
    """Maximal witness value over all relabelings of a correlator matrix.

    `correlators` has shape (..., n_prep, n_meas) with n_prep >= 3 and
    n_meas >= 2; the maximization is performed independently over leading
    axes.
    """
    n_prep, n_meas = correlators.shape[-2], correlators.shape[-1]
    xs, xps, xpps, ys, yps, sy, syp = _relabeling_arrays(n_prep, n_meas)
    values = (
        sy * correlators[..., xs, ys]
        + syp * correlators[..., xs, yps]
        + sy * correlators[..., xps, ys]
        - syp * correlators[..., xps, yps]
        - sy * correlators[..., xpps, ys]
    )
    return np.max(values, axis=-1)


def haar_rotations(count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform SO(3) rotation matrices via normalized Gaussian quaternions."""
    q = rng.standard_normal((count, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    rot = np.empty((count, 3, 3))
    rot[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    rot[:, 0, 1] = 2.0 * (x * y - z * w)
    rot[:, 0, 2] = 2.0 * (x * z + y * w)
    rot[:, 1, 0] = 2.0 * (x * y + z * w)
    rot[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    rot[:, 1, 2] = 2.0 * (y * z - x * w)
    rot[:, 2, 0] = 2.0 * (x * z - y * w)
    rot[:, 2, 1] = 2.0 * (y * z + x * w)
    rot[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return rot


def euler_rotations(count: int, rng: np.random.Generator) -> np.ndarray:
    """Rotations R_z(a) R_y(b) R_z(g) with independently uniform Euler angles.

    a, g ~ U[0, 2 pi) and b ~ U[0, pi).  This is not the rotation-invariant
    measure (that would weight b by sin b), but it is the ensemble whose
    relabeled-maximum statistics the reference band fractions correspond to,
    so it is the default for :func:`projective_framefree`.
    """
    a = rng.uniform(0.0, TWO_PI, count)
    b = rng.uniform(0.0, math.pi, count)
    g = rng.uniform(0.0, TWO_PI, count)
    ca, sa = np.cos(a), np.sin(a)
    cb, sb = np.cos(b), np.sin(b)
    cg, sg = np.cos(g), np.sin(g)
    rot = np.empty((count, 3, 3))
    rot[:, 0, 0] = ca * cb * cg - sa * sg
    rot[:, 0, 1] = -ca * cb * sg - sa * cg
    rot[:, 0, 2] = ca * sb
    rot[:, 1, 0] = sa * cb * cg + ca * sg
    rot[:, 1, 1] = -sa * cb * sg + ca * cg
    rot[:, 1, 2] = sa * sb
    rot[:, 2, 0] = -sb * cg
    rot[:, 2, 1] = sb * sg
    rot[:, 2, 2] = cb
    return rot


ROTATION_SAMPLERS = {"euler": euler_rotations, "haar": haar_rotations}


@dataclass(frozen=True)
class Histogram:
    """Conditional probability density of violating witness maxima.

    Covers values strictly above the classical bound only; densities are
    normalized so that sum(density) * bin_width = 1 over those bins.  Empty
    (no bins) when no value violates.
    """

    bin_edges: np.ndarray
    densities: np.ndarray
    n_violating: int
    bin_width: float

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def conditional_pdf(values: Sequence[float], bin_width: float) -> Histogram:
    """Histogram of values above the classical bound, normalized as a PDF."""
    if bin_width <= 0.0:
        raise ValueError(f"bin width must be positive, got {bin_width}")
    values = np.asarray(values, dtype=float)
    violating = values[values > CLASSICAL_BOUND]
    if violating.size == 0:
        return Histogram(np.empty(0), np.empty(0), 0, bin_width)
    n_bins = max(1, int(math.ceil((float(np.max(violating)) - CLASSICAL_BOUND) / bin_width)))
    edges = CLASSICAL_BOUND + bin_width * np.arange(n_bins + 1)
    counts, _ = np.histogram(violating, bins=edges)
    densities = counts / (violating.size * bin_width)
    return Histogram(edges, densities, int(violating.size), bin_width)


def wilson_interval(successes: int, total: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial fraction."""
    if total <= 0:
        raise ValueError("total must be positive")
    phat = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (phat + z2 / (2.0 * total)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / total + z2 / (4.0 * total * total)) / denom
    return (center - half, center + half)


@dataclass(frozen=True)
class FrameFreeReport:
    """Violation statistics over an ensemble of random measurement frames.

    Band fractions refer to the intervals [3.0, 3.4), [3.4, 3.6] and
    (3.6, 1 + 2 sqrt(2)] as fractions of all sampled rotations; each comes
    with its 95% Wilson interval since the estimate is Monte Carlo.
    """

    samples: int
    s_max: np.ndarray
    nonviolating_fraction: float
    band_fractions: tuple[float, float, float]
    band_intervals: tuple[tuple[float, float], ...]
    histogram: Histogram

    def to_csv(self, stream: TextIO) -> None:
        stream.write("bin_center,density\n")
        for center, density in zip(self.histogram.bin_centers, self.histogram.densities):
            stream.write(f"{center:.12g},{density:.12g}\n")


def projective_framefree(
    samples: int,
    seed: int,
    bin_width: float = 0.01,
    chunk: int = 8192,
    sampler: str = "euler",
) -> FrameFreeReport:
    """Monte-Carlo relabeled-maximum statistics under random frames.

    For each rotation R the correlators E[x, y] = a_x . (R b_y) over the
    preparation and measurement catalogs are maximized over all 576
    relabelings, and the resulting maxima are summarized as the fraction of
    non-violating rotations, the conditional PDF above the classical bound,
    and the three band fractions.

    `sampler` picks the rotation ensemble: "euler" (independently uniform
    Euler angles, the ensemble the reference band fractions correspond to)
    or "haar" (the rotation-invariant measure, which shifts the bands by
    several percentage points).
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    try:
        draw = ROTATION_SAMPLERS[sampler]
    except KeyError:
        raise ValueError(f"sampler must be one of {sorted(ROTATION_SAMPLERS)}, got {sampler!r}")
    rng = np.random.default_rng(seed)
    s_max = np.empty(samples)
    done = 0
    while done < samples:
        block = min(chunk, samples - done)
        rotations = draw(block, rng)
        correlators = np.einsum(
            "xi,nij,yj->nxy", PREPARATION_CATALOG, rotations, MEASUREMENT_CATALOG
        )
        s_max[done : done + block] = relabeled_max(correlators)
        done += block

    nonviolating = int(np.sum(s_max <= CLASSICAL_BOUND))
    band_counts = (
        int(np.sum((s_max >= 3.0) & (s_max < 3.4))),
        int(np.sum((s_max >= 3.4) & (s_max <= 3.6))),
        int(np.sum(s_max > 3.6)),
    )
    return FrameFreeReport(
        samples=samples,
        s_max=s_max,
        nonviolating_fraction=nonviolating / samples,
        band_fractions=tuple(c / samples for c in band_counts),
        band_intervals=tuple(wilson_interval(c, samples) for c in band_counts),
        histogram=conditional_pdf(s_max, bin_width),
    )


# --- continuous-variable phase sweep ---------------------------------------


def _state_scalars(preparations: Sequence[PreparationAngles]) -> list[tuple[float, float, float, float]]:
    out = []
    for p in preparations:
        half = 0.5 * p.alpha
        c, s = math.cos(half), math.sin(half)
        out.append((c * c, s * s, c * s, p.eta))
    return out


def _effect_scalars(setting) -> tuple[float, float, float, float]:
    """(m00, m11, k01, phase) of a dichotomic CV effect; the phase is the
    coordinate shifted by the frame offset."""
    if isinstance(setting, DisplacementSetting):
        scale = math.exp(-setting.r * setting.r)
        return (scale, scale * setting.r * setting.r, scale * setting.r, setting.phi)
    if isinstance(setting, HomodyneSetting):
        a, b = setting.bin_lo, setting.bin_hi
        ea, eb = math.exp(-a * a), math.exp(-b * b)
        m00 = 0.5 * (math.erf(b) - math.erf(a))
        m11 = m00 + (a * ea - b * eb) / _SQRT_PI
        return (m00, m11, (ea - eb) / _SQRT_TWO_PI, setting.theta)
    raise TypeError(f"unsupported setting type {type(setting).__name__}")


def _cosine_tables(
    preparations: Sequence[PreparationAngles], settings: Sequence
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tables (base, amplitude, phase) with E[x, j](gamma) =
    base[x, j] + amplitude[x, j] * cos(phase[x, j] + gamma)."""
    states = _state_scalars(preparations)
    n_x, n_j = len(states), len(settings)
    base = np.empty((n_x, n_j))
    amp = np.empty((n_x, n_j))
    phase = np.empty((n_x, n_j))
    for j, setting in enumerate(settings):
        m00, m11, k01, ph = _effect_scalars(setting)
        for x, (r00, r11, cs, eta) in enumerate(states):
            base[x, j] = 2.0 * (r00 * m00 + r11 * m11) - 1.0
            amp[x, j] = 4.0 * cs * k01
            phase[x, j] = ph - eta
    return base, amp, phase


def _sweep_max(
    base: np.ndarray, amp: np.ndarray, phase: np.ndarray, gammas: np.ndarray
) -> np.ndarray:
    correlators = base[None, :, :] + amp[None, :, :] * np.cos(
        phase[None, :, :] + gammas[:, None, None]
    )
    return relabeled_max(correlators)


def _reduce_gammas(gammas: Sequence[float]) -> np.ndarray:
    # fmod keeps the sweep exactly 2*pi-periodic where the offset is
    # representable: the reduced value, not the raw one, enters the cosines.
    return np.array([math.fmod(g, TWO_PI) % TWO_PI for g in gammas])


@dataclass(frozen=True)
class PhaseSweep:
    """Relabeled witness maximum versus the common measurement phase offset."""

    kind: str
    preparations: tuple[PreparationAngles, ...]
    pool: tuple
    gammas: np.ndarray
    s_max: np.ndarray

    @property
    def violated(self) -> np.ndarray:
        return self.s_max > CLASSICAL_BOUND

    def points(self) -> list[tuple[float, float]]:
        return [(float(g), float(s)) for g, s in zip(self.gammas, self.s_max)]

    def to_csv(self, stream: TextIO) -> None:
        stream.write("gamma,S_max,violated_flag\n")
        for g, s in zip(self.gammas, self.s_max):
            stream.write(f"{g:.12g},{s:.12g},{int(s > CLASSICAL_BOUND)}\n")


def _choose_displacement_extras(
    preparations: Sequence[PreparationAngles],
    pool: list[DisplacementSetting],
    count: int,
    gammas: np.ndarray,
    config: OptimizerConfig,
    restarts: int,
) -> list[DisplacementSetting]:
    """Greedy extra settings maximizing the worst-case violation over gamma.

    Each stage picks the (r, phi) whose addition to the pool maximizes
    min_gamma S_max(gamma), i.e. the post-relabeling violation in the least
    favorable frame.
    """
    coords = [Coordinate(0.0, 1.0), Coordinate(0.0, TWO_PI, periodic=True)]
    chosen = list(pool)
    for stage in range(count):
        base_p, amp_p, phase_p = _cosine_tables(preparations, chosen)
        states = _state_scalars(preparations)

        def objective(v: list[float]) -> float:
            r, phi = v
            scale = math.exp(-r * r)
            m00, m11, k01 = scale, scale * r * r, scale * r
            cand = np.empty((len(states), 1))
            amp_c = np.empty((len(states), 1))
            phase_c = np.empty((len(states), 1))
            for x, (r00, r11, cs, eta) in enumerate(states):
                cand[x, 0] = 2.0 * (r00 * m00 + r11 * m11) - 1.0
                amp_c[x, 0] = 4.0 * cs * k01
                phase_c[x, 0] = phi - eta
            worst = np.min(
                _sweep_max(
                    np.concatenate([base_p, cand], axis=1),
                    np.concatenate([amp_p, amp_c], axis=1),
                    np.concatenate([phase_p, phase_c], axis=1),
                    gammas,
                )
            )
            return -float(worst)

        best_vec, best_val = None, math.inf
        for i in range(restarts):
            rng = np.random.default_rng(
                np.random.SeedSequence(config.seed, spawn_key=(1000 + stage, i))
            )
            x0 = random_start(rng, coords)
            vec, fval, _ = nelder_mead(
                objective, x0, coords, max_iterations=config.max_iterations, ftol=1e-7
            )
            if fval < best_val:
                best_vec, best_val = vec, fval
        chosen.append(DisplacementSetting(float(best_vec[0]), float(best_vec[1])))
    return chosen[len(pool) :]


def _choose_homodyne_extras(
    existing_thetas: Sequence[float], count: int
) -> list[float]:
    """Extra quadrature angles spread over [0, pi] by max-min separation.

    Candidates are the interval endpoints and the midpoints of gaps between
    already chosen angles; each stage picks the candidate farthest from the
    current set (ties resolved toward the smaller angle).
    """
    angles = sorted(existing_thetas)
    chosen = []
    for _ in range(count):
        candidates = {0.0, math.pi}
        for lo, hi in zip(angles, angles[1:]):
            candidates.add(0.5 * (lo + hi))
        best_angle, best_dist = None, -1.0
        for cand in sorted(candidates):
            dist = min(abs(cand - a) for a in angles)
            if dist > best_dist + 1e-15:
                best_angle, best_dist = cand, dist
        chosen.append(best_angle)
        angles = sorted(angles + [best_angle])
    return chosen


def cv_framefree(
    kind: str,
    pool_size: int,
    gammas: Sequence[float],
    config: OptimizerConfig = OptimizerConfig(),
    pool_restarts: int = 24,
) -> PhaseSweep:
    """Relabeled maximum versus frame offset for a pool of CV measurements.

    The pool starts from the two optimal settings of the displacement-only
    or homodyne-only strategy and grows to `pool_size` with extra settings:
    displacement extras maximize the worst-case post-relabeling violation
    over the gamma grid, homodyne extras sit at maximal angular separation
    from the pooled quadrature angles (with a sign bin [0, 5]).  For each
    gamma the offset is added to every pooled phase and the witness is
    maximized over relabelings of all ordered setting pairs.
    """
    if pool_size < 2:
        raise ValueError("pool must contain at least the two optimal settings")
    gammas = _reduce_gammas(gammas)
    if kind == "displacement":
        fixture = fixtures.S3_STRATEGIES["DD"]
        preparations = fixture.preparations()
        pool = list(fixture.measurement_settings())
        pool += _choose_displacement_extras(
            preparations, pool, pool_size - 2, gammas, config, pool_restarts
        )
    elif kind == "homodyne":
        fixture = fixtures.S3_STRATEGIES["HH"]
        preparations = fixture.preparations()
        pool = list(fixture.measurement_settings())
        extra_thetas = _choose_homodyne_extras([s.theta for s in pool], pool_size - 2)
        pool += [HomodyneSetting(theta, 0.0, BIN_LIMIT) for theta in extra_thetas]
    else:
        raise ValueError(f"kind must be 'displacement' or 'homodyne', got {kind!r}")

    base, amp, phase = _cosine_tables(preparations, pool)
    s_max = _sweep_max(base, amp, phase, gammas)
    return PhaseSweep(kind, tuple(preparations), tuple(pool), gammas, s_max)
