"""Analytic gradients via the parameter-shift rule.

For a single RX/RY/RZ generator, d<Z>/dtheta = (f(theta + pi/2) - f(theta - pi/2)) / 2
exactly, so gradients cost two circuit evaluations per parameter and need no
autodiff framework. Loss is mean squared error between <Z> on the decision
wire (the first measured wire) and a +/-1 label.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import pi
from typing import Sequence

from .circuit import CircuitSpec, ParameterVector, apply_pqc, encode
from .errors import InputError
from .simulator import expectation_pauli_z

SHIFT = pi / 2


@dataclass(frozen=True)
class GradientSample:
    epoch: int
    sample_id: int
    grads: tuple[float, ...]  # dLoss/dtheta_k for each parameter


def _expectation(
    spec: CircuitSpec,
    params: ParameterVector,
    features: Sequence[float],
    wire: int,
) -> float:
    state = apply_pqc(encode(features, spec), spec, params)
    return expectation_pauli_z(state, wire)


def expectation_gradient(
    spec: CircuitSpec,
    params: ParameterVector,
    features: Sequence[float],
    measured_wire: int,
    param_index: int,
) -> float:
    """d<Z_measured_wire>/dtheta_k by the two-point shift rule."""
    if not 0 <= param_index < spec.n_params:
        raise InputError(f"param_index {param_index} out of range")
    theta = params.values[param_index]
    plus = _expectation(
        spec, params.replaced(param_index, theta + SHIFT), features, measured_wire
    )
    minus = _expectation(
        spec, params.replaced(param_index, theta - SHIFT), features, measured_wire
    )
    return (plus - minus) / 2.0


def loss_gradient(
    spec: CircuitSpec,
    params: ParameterVector,
    batch: Sequence[tuple[Sequence[float], int]],
    epoch: int = 0,
) -> tuple[float, list[float], list[GradientSample]]:
    """MSE loss, batch-mean gradients, and per-sample gradients.

    Samples are processed in batch order (sample_id ascending) and the mean
    reduced in fixed index order so results are bitwise reproducible.
    """
    if not batch:
        raise InputError("batch must be nonempty")
    n_params = spec.n_params
    decision_wire = spec.measured_wires[0]
    loss_sum = 0.0
    grad_sums = [0.0] * n_params
    per_sample: list[GradientSample] = []
    for sample_id, (features, label) in enumerate(batch):
        z = _expectation(spec, params, features, decision_wire)
        residual = z - label
        loss_sum += residual * residual
        grads = tuple(
            2.0
            * residual
            * expectation_gradient(spec, params, features, decision_wire, k)
            for k in range(n_params)
        )
        for k in range(n_params):
            grad_sums[k] += grads[k]
        per_sample.append(GradientSample(epoch, sample_id, grads))
    n = len(batch)
    return loss_sum / n, [g / n for g in grad_sums], per_sample
