"""Dimension-witness violations and certified randomness for qubit-encoded
continuous-variable prepare-and-measure setups.

The package is organized around a small pipeline:

- :mod:`cvpam.qubit` - two-level states, projective effects, behaviors and
  the exact classical bound;
- :mod:`cvpam.cvmeasure` - binned homodyne and displaced on/off effects on
  the two-level Fock subspace plus the amplitude-damping loss channel;
- :mod:`cvpam.witnesses` - the correlator witnesses and their bounds;
- :mod:`cvpam.optimize` - multistart maximization of witness values over
  schemes, with critical- and crossover-efficiency searches;
- :mod:`cvpam.randomness` - guessing probabilities, constrained guessing
  maximization, min-entropy curves and the closed-form guessing bound;
- :mod:`cvpam.framefree` - violation statistics without a shared reference
  frame;
- :mod:`cvpam.fixtures` - published optimal strategies kept as regression
  fixtures;
- :mod:`cvpam.cli` - the reproduction command-line driver.
"""

from .qubit import (
    Behavior,
    PreparationAngles,
    ProjectiveAngles,
    behavior_from_strategy,
    classical_max,
    projector_from_angles,
    state_from_angles,
)
from .cvmeasure import (
    DisplacementSetting,
    HomodyneSetting,
    amplitude_damp,
    displacement_effect,
    displacement_observable,
    homodyne_effect,
    homodyne_observable,
)
from .witnesses import Witness, eval_witness, s3, s3_tilted, s33_1, s33_2, s4
from .optimize import (
    MeasurementScheme,
    OptimizationResult,
    OptimizerConfig,
    critical_efficiency,
    crossover_efficiency,
    efficiency_curve,
    evaluate_strategy,
    max_witness,
    max_witness_tilted_curve,
    scheme,
)

__version__ = "0.1.0"

__all__ = [
    "Behavior",
    "DisplacementSetting",
    "HomodyneSetting",
    "MeasurementScheme",
    "OptimizationResult",
    "OptimizerConfig",
    "PreparationAngles",
    "ProjectiveAngles",
    "Witness",
    "amplitude_damp",
    "behavior_from_strategy",
    "classical_max",
    "critical_efficiency",
    "crossover_efficiency",
    "displacement_effect",
    "displacement_observable",
    "efficiency_curve",
    "eval_witness",
    "evaluate_strategy",
    "homodyne_effect",
    "homodyne_observable",
    "max_witness",
    "max_witness_tilted_curve",
    "projector_from_angles",
    "s3",
    "s3_tilted",
    "s33_1",
    "s33_2",
    "s4",
    "scheme",
    "state_from_angles",
]
