"""Shared independent oracles.

These deliberately avoid the package's fast simulation path: the forward
oracle builds full 2^n x 2^n unitaries with Kronecker products, and the
gradient oracle is a central finite difference. They exist to cross-check
the production implementations, so keep them dumb.
"""
from __future__ import annotations

import math

import numpy as np

from vqcmon.circuit import CircuitSpec, ParameterVector


def _kron_at(matrix: np.ndarray, wire: int, n: int) -> np.ndarray:
    ops = [np.eye(2, dtype=complex)] * n
    ops[wire] = matrix
    out = ops[0]
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def _rotation(kind: str, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]])
    if kind == "RZ":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    raise ValueError(kind)


def _cnot(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    U = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        out = b ^ (1 << (n - 1 - target)) if (b >> (n - 1 - control)) & 1 else b
        U[out, b] = 1
    return U


def oracle_forward(spec: CircuitSpec, params, features) -> list[float]:
    """Full-matrix reference for circuit.forward (wire 0 = MSB)."""
    n = spec.n_wires
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1
    for i, x in enumerate(features):
        psi = _kron_at(_rotation("RY", spec.encoder.feature_scale * x), i, n) @ psi
    values = list(params.values if isinstance(params, ParameterVector) else params)
    for slot in spec.pqc:
        if slot.param_index is not None:
            psi = _kron_at(_rotation(slot.kind.name, values[slot.param_index]), slot.target, n) @ psi
        else:
            psi = _cnot(slot.control, slot.target, n) @ psi
    z = np.diag([1.0, -1.0]).astype(complex)
    return [float(np.real(psi.conj() @ _kron_at(z, w, n) @ psi)) for w in spec.measured_wires]


def finite_difference(f, theta: float, h: float = 1e-5) -> float:
    """Central difference of a scalar function of one angle."""
    return (f(theta + h) - f(theta - h)) / (2 * h)


def two_pass_variance(values) -> float:
    """Textbook two-pass population variance, the oracle for monitor.variance."""
    mean = sum(values) / len(values)
    return sum((v - mean) ** 2 for v in values) / len(values)
