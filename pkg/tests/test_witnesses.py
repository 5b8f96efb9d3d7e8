import math

import numpy as np
import pytest

from cvpam import witnesses
from cvpam.framefree import relabeled_max
from cvpam.qubit import Behavior, classical_max
from cvpam.witnesses import eval_witness


def behavior_from_probs(p0):
    p0 = np.asarray(p0, dtype=float)
    return Behavior(np.stack([p0, 1.0 - p0]))


class TestCatalog:
    def test_classical_bounds(self):
        assert witnesses.s3().classical_bound == 3.0
        assert witnesses.s4().classical_bound == 4.0
        assert witnesses.s33_1().classical_bound == 4.0
        assert witnesses.s33_2().classical_bound == 5.0

    def test_quantum_bounds(self):
        assert witnesses.s3().quantum_bound == pytest.approx(1.0 + 2.0 * math.sqrt(2.0))
        assert witnesses.s4().quantum_bound == pytest.approx(4.0 * math.sqrt(2.0))
        assert witnesses.s33_1().quantum_bound == pytest.approx(3.0 * math.sqrt(3.0))
        assert witnesses.s33_2().quantum_bound == pytest.approx(6.0)

    def test_stored_bounds_match_enumeration(self):
        for w in (witnesses.s3(), witnesses.s4(), witnesses.s33_1(), witnesses.s33_2()):
            assert classical_max(w) == w.classical_bound


class TestTilted:
    def test_half_is_half_s3(self):
        half = witnesses.s3_tilted(0.5)
        np.testing.assert_allclose(half.coefficients, 0.5 * witnesses.s3().coefficients)
        assert half.quantum_bound == pytest.approx(math.sqrt(2.0) + 0.5)

    def test_endpoint_no_advantage(self):
        flat = witnesses.s3_tilted(0.0)
        assert flat.classical_bound == 2.0
        assert flat.quantum_bound == pytest.approx(2.0)

    def test_intermediate_bounds(self):
        w = witnesses.s3_tilted(0.3)
        assert w.classical_bound == pytest.approx(1.7)
        assert w.quantum_bound == pytest.approx(2.0 * math.sqrt(0.09 + 0.49) + 0.3, abs=1e-12)
        assert w.quantum_bound == pytest.approx(1.82315, abs=1e-5)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            witnesses.s3_tilted(1.1)


class TestEvalWitness:
    def test_uniform_behavior_vanishes(self):
        beh = behavior_from_probs(np.full((3, 2), 0.5))
        assert eval_witness(witnesses.s3(), beh) == pytest.approx(0.0, abs=1e-15)

    def test_best_deterministic_strategy(self):
        # E matrix of an optimal classical strategy: message a(x) = (0, 1, 1),
        # decodings epsilon(0, .) = (+, +) and epsilon(1, .) = (+, -)
        e = np.array([[1.0, 1.0], [1.0, -1.0], [1.0, -1.0]])
        beh = behavior_from_probs(0.5 * (1.0 + e))
        assert eval_witness(witnesses.s3(), beh) == pytest.approx(3.0, abs=1e-12)
        assert classical_max(witnesses.s3()) == pytest.approx(3.0)

    def test_optimal_bloch_strategy_after_relabeling(self):
        # the known optimal Bloch vectors reach 1 + 2 sqrt(2) only after
        # maximizing over input/outcome relabelings
        a = np.array(
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0 / math.sqrt(2), -1.0 / math.sqrt(2), 0.0]]
        )
        b = np.array(
            [[1.0 / math.sqrt(2), -1.0 / math.sqrt(2), 0.0], [1.0 / math.sqrt(2), 1.0 / math.sqrt(2), 0.0]]
        )
        correlators = a @ b.T
        raw = eval_witness(witnesses.s3(), behavior_from_probs(0.5 * (1.0 + correlators)))
        assert abs(raw) < 1e-9  # the unrelabeled value is far from optimal
        assert relabeled_max(correlators) == pytest.approx(1.0 + 2.0 * math.sqrt(2.0), abs=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(17)
        w = witnesses.s33_2()
        p = rng.uniform(0.0, 1.0, size=(3, 3))
        q = rng.uniform(0.0, 1.0, size=(3, 3))
        for lam in (0.0, 0.25, 0.7, 1.0):
            mixed = behavior_from_probs(lam * p + (1.0 - lam) * q)
            expected = lam * eval_witness(w, behavior_from_probs(p)) + (1.0 - lam) * eval_witness(
                w, behavior_from_probs(q)
            )
            assert eval_witness(w, mixed) == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self):
        beh = behavior_from_probs(np.full((3, 2), 0.5))
        with pytest.raises(ValueError):
            eval_witness(witnesses.s33_1(), beh)
