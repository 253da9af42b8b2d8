import math

import numpy as np
import pytest

from conftest import finite_difference
from vqcmon.circuit import (
    CircuitSpec,
    EncoderSpec,
    ParameterVector,
    PqcGateSlot,
    forward,
    random_layers,
)
from vqcmon.errors import InputError
from vqcmon.gradients import expectation_gradient, loss_gradient
from vqcmon.simulator import GateKind


def single_ry_circuit() -> CircuitSpec:
    return CircuitSpec(
        1, EncoderSpec(), (PqcGateSlot(GateKind.RY, 0, param_index=0),), (0,)
    )


class TestExpectationGradient:
    def test_zero_at_theta_zero(self):
        spec = single_ry_circuit()
        g = expectation_gradient(spec, ParameterVector((0.0,)), [0.0], 0, 0)
        assert g == pytest.approx(0.0, abs=1e-12)

    def test_minus_one_at_half_pi(self):
        # <Z> = cos(theta), derivative -sin(pi/2) = -1
        spec = single_ry_circuit()
        g = expectation_gradient(spec, ParameterVector((math.pi / 2,)), [0.0], 0, 0)
        assert g == pytest.approx(-1.0, abs=1e-12)

    def test_matches_finite_difference(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            n = int(rng.integers(2, 5))
            spec = random_layers(n, 2, n, seed=int(rng.integers(10_000)))
            params = ParameterVector(tuple(rng.uniform(0, 2 * math.pi, spec.n_params)))
            features = list(rng.uniform(0, math.pi, n))
            k = int(rng.integers(0, spec.n_params))

            def f(theta):
                return forward(spec, params.replaced(k, theta), features)[0]

            analytic = expectation_gradient(spec, params, features, 0, k)
            numeric = finite_difference(f, params.values[k])
            assert analytic == pytest.approx(numeric, abs=1e-6)

    def test_disconnected_wire_has_zero_gradient(self):
        # rotation on wire 1, measured wire 0, no entangler between them
        spec = CircuitSpec(
            2, EncoderSpec(), (PqcGateSlot(GateKind.RY, 1, param_index=0),), (0,)
        )
        g = expectation_gradient(
            spec, ParameterVector((1.234,)), [0.3, 0.8], 0, 0
        )
        assert g == pytest.approx(0.0, abs=1e-12)

    def test_index_out_of_range(self):
        with pytest.raises(InputError):
            expectation_gradient(
                single_ry_circuit(), ParameterVector((0.0,)), [0.0], 0, 1
            )


class TestLossGradient:
    def test_zero_residual_means_zero_loss_and_grads(self):
        # theta = 0 keeps |0>, <Z> = 1 = label
        spec = single_ry_circuit()
        loss, mean_grads, samples = loss_gradient(
            spec, ParameterVector((0.0,)), [((0.0,), 1)]
        )
        assert loss == pytest.approx(0.0, abs=1e-20)
        assert mean_grads[0] == pytest.approx(0.0, abs=1e-12)
        assert len(samples) == 1

    def test_duplicated_sample_equals_singleton(self):
        spec = single_ry_circuit()
        params = ParameterVector((0.7,))
        single = loss_gradient(spec, params, [((0.2,), -1)])
        double = loss_gradient(spec, params, [((0.2,), -1), ((0.2,), -1)])
        assert double[0] == pytest.approx(single[0], abs=1e-15)
        assert double[1][0] == pytest.approx(single[1][0], abs=1e-15)

    def test_mean_grads_match_loss_finite_difference(self):
        rng = np.random.default_rng(23)
        spec = random_layers(4, 2, 4, seed=7)
        params = ParameterVector(tuple(rng.uniform(0, 2 * math.pi, 8)))
        batch = [
            (tuple(rng.uniform(0, math.pi, 4)), int(rng.choice([-1, 1])))
            for _ in range(8)
        ]
        _, mean_grads, _ = loss_gradient(spec, params, batch)
        for k in range(8):

            def total_loss(theta):
                p = params.replaced(k, theta)
                return sum(
                    (forward(spec, p, f)[0] - y) ** 2 for f, y in batch
                ) / len(batch)

            assert mean_grads[k] == pytest.approx(
                finite_difference(total_loss, params.values[k]), abs=1e-6
            )

    def test_batch_order_invariance_in_value(self):
        rng = np.random.default_rng(31)
        spec = random_layers(3, 1, 3, seed=2)
        params = ParameterVector(tuple(rng.uniform(0, 2 * math.pi, 3)))
        batch = [
            (tuple(rng.uniform(0, math.pi, 3)), int(rng.choice([-1, 1])))
            for _ in range(6)
        ]
        loss_a, grads_a, _ = loss_gradient(spec, params, batch)
        loss_b, grads_b, _ = loss_gradient(spec, params, batch[::-1])
        assert loss_a == pytest.approx(loss_b, abs=1e-12)
        np.testing.assert_allclose(grads_a, grads_b, atol=1e-12)

    def test_per_sample_ordering(self):
        spec = single_ry_circuit()
        _, _, samples = loss_gradient(
            spec, ParameterVector((0.5,)), [((0.1,), 1), ((0.2,), -1)], epoch=3
        )
        assert [s.sample_id for s in samples] == [0, 1]
        assert all(s.epoch == 3 for s in samples)

    def test_empty_batch(self):
        with pytest.raises(InputError):
            loss_gradient(single_ry_circuit(), ParameterVector((0.0,)), [])
