import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvpam.cvmeasure import (
    DisplacementSetting,
    HomodyneSetting,
    amplitude_damp,
    displacement_effect,
    displacement_observable,
    homodyne_effect,
    homodyne_effect_numeric,
    homodyne_observable,
    kraus_operators,
)
from cvpam.qubit import IDENTITY, PreparationAngles, state_from_angles

IDENTITY2 = np.eye(2)


class TestHomodyneEffect:
    def test_full_line_is_identity(self):
        for theta in (0.0, 1.0, 3.0):
            pi_full = homodyne_effect(HomodyneSetting(theta, -5.0, 5.0))
            np.testing.assert_allclose(pi_full, IDENTITY2, atol=1e-9)

    def test_positive_half_line(self):
        # frozen closed-form values for theta=0, bin [0, 5]
        m = homodyne_effect(HomodyneSetting(0.0, 0.0, 5.0))
        assert m[0, 0].real == pytest.approx(0.5, abs=1e-6)
        assert m[1, 1].real == pytest.approx(0.5, abs=1e-6)
        assert m[0, 1] == pytest.approx(0.398942, abs=1e-6)

    def test_phase_factor(self):
        base = homodyne_effect(HomodyneSetting(0.0, 0.0, 5.0))
        rotated = homodyne_effect(HomodyneSetting(math.pi / 2.0, 0.0, 5.0))
        assert rotated[0, 1] == pytest.approx(base[0, 1] * np.exp(-1j * math.pi / 2.0), abs=1e-12)
        np.testing.assert_allclose(np.diag(rotated), np.diag(base), atol=1e-15)

    def test_matches_quadrature_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(25):
            a = rng.uniform(-5.0, 5.0)
            setting = HomodyneSetting(rng.uniform(0.0, math.pi), a, rng.uniform(a, 5.0))
            np.testing.assert_allclose(
                homodyne_effect(setting), homodyne_effect_numeric(setting), atol=1e-9
            )

    def test_bin_additivity(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            pts = np.sort(rng.uniform(-5.0, 5.0, size=3))
            a, b, c = pts
            theta = rng.uniform(0.0, math.pi)
            whole = homodyne_effect(HomodyneSetting(theta, a, c))
            parts = homodyne_effect(HomodyneSetting(theta, a, b)) + homodyne_effect(
                HomodyneSetting(theta, b, c)
            )
            np.testing.assert_allclose(whole, parts, atol=1e-9)

    @given(
        st.floats(0.0, 2.0 * math.pi, allow_nan=False),
        st.floats(-5.0, 5.0, allow_nan=False),
        st.floats(0.0, 10.0, allow_nan=False),
    )
    @settings(max_examples=80, deadline=None)
    def test_spectrum_in_unit_interval(self, theta, lo, width):
        setting = HomodyneSetting(theta, lo, min(lo + width, 5.0))
        eigs = np.linalg.eigvalsh(homodyne_effect(setting))
        assert eigs[0] >= -1e-12 and eigs[-1] <= 1.0 + 1e-12

    def test_reversed_bin_rejected(self):
        with pytest.raises(ValueError):
            HomodyneSetting(0.0, 1.0, 0.0)


class TestHomodyneObservable:
    def test_full_line(self):
        np.testing.assert_allclose(
            homodyne_observable(HomodyneSetting(0.7, -5.0, 5.0)), IDENTITY2, atol=1e-9
        )

    def test_empty_bin(self):
        np.testing.assert_allclose(
            homodyne_observable(HomodyneSetting(0.7, 1.3, 1.3)), -IDENTITY2, atol=1e-15
        )

    def test_linear_in_effect(self):
        setting = HomodyneSetting(0.0, 0.0, 5.0)
        np.testing.assert_allclose(
            homodyne_observable(setting),
            2.0 * homodyne_effect(setting) - IDENTITY,
            atol=1e-15,
        )


class TestDisplacementEffect:
    def test_vacuum_projector(self):
        for phi in (0.0, 2.0, 5.0):
            np.testing.assert_allclose(
                displacement_effect(DisplacementSetting(0.0, phi)), np.diag([1.0, 0.0]), atol=1e-15
            )

    def test_unit_displacement(self):
        m = displacement_effect(DisplacementSetting(1.0, 0.0))
        np.testing.assert_allclose(m, math.exp(-1.0) * np.ones((2, 2)), atol=1e-15)
        assert np.linalg.eigvalsh(m)[0] >= -1e-12
        assert np.trace(m).real == pytest.approx(2.0 * math.exp(-1.0), abs=1e-15)

    def test_half_displacement_opposite_phase(self):
        m = displacement_effect(DisplacementSetting(0.5, math.pi))
        expected = math.exp(-0.25) * np.array([[1.0, -0.5], [-0.5, 0.25]])
        np.testing.assert_allclose(m, expected, atol=1e-12)

    def test_spectrum_bounds(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            m = displacement_effect(
                DisplacementSetting(rng.uniform(0.0, 1.0), rng.uniform(0.0, 2.0 * math.pi))
            )
            eigs = np.linalg.eigvalsh(m)
            assert eigs[0] >= -1e-12 and eigs[-1] <= 1.0 + 1e-12

    def test_magnitude_out_of_range(self):
        with pytest.raises(ValueError):
            DisplacementSetting(1.2, 0.0)


class TestDisplacementObservable:
    def test_vacuum_is_sigma_z(self):
        np.testing.assert_allclose(
            displacement_observable(DisplacementSetting(0.0, 0.3)), np.diag([1.0, -1.0]), atol=1e-15
        )

    def test_unit_displacement(self):
        expected = 2.0 * math.exp(-1.0) * np.ones((2, 2)) - IDENTITY2
        np.testing.assert_allclose(
            displacement_observable(DisplacementSetting(1.0, 0.0)), expected, atol=1e-15
        )

    def test_hermitian_for_random_settings(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            m = displacement_observable(
                DisplacementSetting(rng.uniform(0.0, 1.0), rng.uniform(0.0, 2.0 * math.pi))
            )
            np.testing.assert_allclose(m, m.conj().T, atol=1e-15)


class TestAmplitudeDamping:
    def test_identity_channel(self):
        rho = state_from_angles(PreparationAngles(1.2, 0.4))
        np.testing.assert_allclose(amplitude_damp(rho, 1.0), rho, atol=1e-15)

    def test_full_decay(self):
        rho = state_from_angles(PreparationAngles(2.1, 1.9))
        np.testing.assert_allclose(amplitude_damp(rho, 0.0), np.diag([1.0, 0.0]), atol=1e-15)

    def test_excited_state_partial_decay(self):
        rho = np.diag([0.0, 1.0]).astype(complex)
        np.testing.assert_allclose(
            amplitude_damp(rho, 0.458), np.diag([0.542, 0.458]), atol=1e-15
        )

    def test_kraus_completeness(self):
        for eta in (0.0, 0.3, 0.458, 0.9, 1.0):
            e0, e1 = kraus_operators(eta)
            np.testing.assert_allclose(
                e0.conj().T @ e0 + e1.conj().T @ e1, IDENTITY2, atol=1e-15
            )

    def test_trace_and_positivity_preserved(self):
        rng = np.random.default_rng(21)
        for _ in range(1000):
            rho = state_from_angles(
                PreparationAngles(rng.uniform(0.0, math.pi), rng.uniform(0.0, 2.0 * math.pi))
            )
            out = amplitude_damp(rho, rng.uniform(0.0, 1.0))
            assert abs(np.trace(out).real - 1.0) < 1e-12
            assert np.linalg.eigvalsh(out)[0] >= -1e-12

    def test_invalid_inputs(self):
        rho = state_from_angles(PreparationAngles(1.0, 0.0))
        with pytest.raises(ValueError):
            amplitude_damp(rho, 1.5)
        with pytest.raises(ValueError):
            amplitude_damp(2.0 * rho, 0.5)
