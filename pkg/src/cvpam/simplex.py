"""Derivative-free simplex minimizer with reflection at box bounds.

A plain Nelder-Mead implementation tailored to the smooth, low-dimensional
(<= ~15 parameter) objectives in this package.  Box constraints are handled
by folding coordinates back into range before evaluation: periodic
coordinates wrap modulo their period, bounded coordinates reflect off the
walls (a triangle-wave fold).  The simplex itself moves in unconstrained
space, so no constraint machinery is needed and the search stays smooth
across the boundary.

The objective is called with a plain list of floats; the inner loop avoids
numpy scalar extraction, which would otherwise dominate the runtime of the
cheap closed-form objectives optimized here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Coordinate:
    """One search dimension: its range and whether it is periodic."""

    lo: float
    hi: float
    periodic: bool = False

    @property
    def width(self) -> float:
        return self.hi - self.lo


def make_fold(coords: Sequence[Coordinate]) -> Callable[[list[float]], list[float]]:
    """Folding map into the box: wrap periodic coordinates, reflect the rest."""
    lo = [c.lo for c in coords]
    width = [c.width for c in coords]
    periodic = [c.periodic for c in coords]
    n = len(coords)

    def fold(x: list[float]) -> list[float]:
        out = [0.0] * n
        for i in range(n):
            w = width[i]
            if w <= 0.0:
                out[i] = lo[i]
            elif periodic[i]:
                out[i] = (x[i] - lo[i]) % w + lo[i]
            else:
                u = (x[i] - lo[i]) % (2.0 * w)
                out[i] = lo[i] + (w - abs(u - w))
        return out

    return fold


def fold(vec: Sequence[float], coords: Sequence[Coordinate]) -> np.ndarray:
    """Array-in, array-out convenience wrapper around :func:`make_fold`."""
    return np.array(make_fold(coords)(list(np.asarray(vec, dtype=float))))


def nelder_mead(
    f: Callable[[list[float]], float],
    x0: Sequence[float],
    coords: Sequence[Coordinate],
    max_iterations: int = 2000,
    ftol: float = 1e-9,
) -> tuple[np.ndarray, float, int]:
    """Minimize f from x0; returns (folded best point, best value, iterations).

    Standard reflection/expansion/contraction/shrink moves with coefficients
    (1, 2, 0.5, 0.5).  Terminates when the objective spread over the simplex
    falls below ftol, or at max_iterations.  A simplex-diameter criterion is
    deliberately not used: the objectives here carry an exact flat direction
    (a global phase common to all states and measurement phases), along
    which the simplex need not contract.

    Accepted points are stored folded in the reflecting dimensions.  Without
    this, a simplex straddling a wall can hold two mirror images of the same
    feasible point, whose equal values stop the search prematurely.
    Periodic dimensions are kept raw: wrapping them would tear simplices
    that straddle the wrap seam, where optima routinely sit.
    """
    n = len(x0)
    fold_point = make_fold(coords)
    box_dims = [i for i, c in enumerate(coords) if not c.periodic]

    def eval_at(x: np.ndarray) -> float:
        return f(fold_point(x.tolist()))

    def box_fold(x: np.ndarray) -> np.ndarray:
        folded = fold_point(x.tolist())
        out = x.copy()
        for i in box_dims:
            out[i] = folded[i]
        return out

    simplex = np.empty((n + 1, n))
    simplex[0] = box_fold(np.asarray(x0, dtype=float))
    for i in range(n):
        step = 0.05 * coords[i].width if coords[i].width > 0.0 else 0.05
        simplex[i + 1] = box_fold(simplex[0] + step * np.eye(n)[i])
    values = np.array([eval_at(p) for p in simplex])

    iterations = 0
    while iterations < max_iterations:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        if values[-1] - values[0] <= ftol:
            break
        iterations += 1

        centroid = np.add.reduce(simplex[:-1]) * (1.0 / n)
        reflected = 2.0 * centroid - simplex[-1]
        f_reflected = eval_at(reflected)
        if f_reflected < values[0]:
            expanded = centroid + 2.0 * (reflected - centroid)
            f_expanded = eval_at(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = box_fold(expanded), f_expanded
            else:
                simplex[-1], values[-1] = box_fold(reflected), f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = box_fold(reflected), f_reflected
        else:
            if f_reflected < values[-1]:
                # outside contraction
                contracted = centroid + 0.5 * (reflected - centroid)
            else:
                # inside contraction
                contracted = centroid + 0.5 * (simplex[-1] - centroid)
            f_contracted = eval_at(contracted)
            if f_contracted < min(f_reflected, values[-1]):
                simplex[-1], values[-1] = box_fold(contracted), f_contracted
            else:
                best = simplex[0]
                for k in range(1, n + 1):
                    simplex[k] = box_fold(best + 0.5 * (simplex[k] - best))
                    values[k] = eval_at(simplex[k])

    best_index = int(np.argmin(values))
    best = np.array(fold_point(simplex[best_index].tolist()))
    return best, float(values[best_index]), iterations


def random_start(rng: np.random.Generator, coords: Sequence[Coordinate]) -> np.ndarray:
    """Uniform sample of the box, one coordinate per dimension."""
    return np.array([rng.uniform(c.lo, c.hi) for c in coords])
