"""Dense statevector simulation for small qubit registers.

Conventions (fixed, since they matter for reproducibility):
- Wire 0 is the most significant bit of the basis index, so for 2 wires the
  amplitude order is |00>, |01>, |10>, |11>.
- Rotation gates are RX(t) = exp(-i t X / 2) and likewise for RY/RZ.
- States are immutable values: apply_gate returns a fresh StateVector and
  callers must not rely on aliasing either way.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import cos, sin, sqrt
from typing import Optional

import numpy as np

from .errors import CircuitError, ConfigurationError

MAX_WIRES = 20  # 2^20 complex doubles = 16 MiB; plenty for desk-scale VQCs

_H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / sqrt(2)


class GateKind(Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CNOT = "cnot"
    HADAMARD = "h"


ROTATION_KINDS = (GateKind.RX, GateKind.RY, GateKind.RZ)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    target: int
    control: Optional[int] = None
    angle: Optional[float] = None

    def __post_init__(self):
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise CircuitError(f"{self.kind.name} requires an angle")
            if self.control is not None:
                raise CircuitError(f"{self.kind.name} takes no control wire")
        elif self.kind is GateKind.CNOT:
            if self.control is None:
                raise CircuitError("CNOT requires a control wire")
            if self.control == self.target:
                raise CircuitError("CNOT control and target must differ")
            if self.angle is not None:
                raise CircuitError("CNOT takes no angle")
        else:  # HADAMARD
            if self.control is not None or self.angle is not None:
                raise CircuitError("HADAMARD takes no control wire or angle")


@dataclass(frozen=True)
class StateVector:
    n_wires: int
    amplitudes: np.ndarray  # shape (2**n_wires,), complex128

    def __post_init__(self):
        if len(self.amplitudes) != 2**self.n_wires:
            raise CircuitError(
                f"expected {2**self.n_wires} amplitudes, got {len(self.amplitudes)}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def zero_state(n_wires: int) -> StateVector:
    """|0...0> on n_wires qubits."""
    if not 1 <= n_wires <= MAX_WIRES:
        raise ConfigurationError(
            f"n_wires must be in [1, {MAX_WIRES}], got {n_wires}"
        )
    amps = np.zeros(2**n_wires, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_wires, amps)


def _rotation_matrix(kind: GateKind, angle: float) -> np.ndarray:
    c, s = cos(angle / 2), sin(angle / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    # RZ
    return np.array(
        [[complex(c, -s), 0], [0, complex(c, s)]], dtype=np.complex128
    )


def _check_wire(wire: int, n_wires: int) -> None:
    if not 0 <= wire < n_wires:
        raise CircuitError(f"wire {wire} out of range for {n_wires} wires")


def _apply_single_qubit(
    amps: np.ndarray, matrix: np.ndarray, wire: int, n: int
) -> np.ndarray:
    psi = amps.reshape([2] * n)
    psi = np.moveaxis(psi, wire, -1)
    psi = psi @ matrix.T
    return np.moveaxis(psi, -1, wire).reshape(-1)


def _apply_cnot(amps: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    psi = amps.reshape([2] * n).copy()
    sel = [slice(None)] * n
    sel[control] = 1
    block = psi[tuple(sel)]
    psi[tuple(sel)] = np.flip(block, axis=target if target < control else target - 1)
    return psi.reshape(-1)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate; returns the post-state, input untouched."""
    n = state.n_wires
    _check_wire(gate.target, n)
    if gate.kind is GateKind.CNOT:
        _check_wire(gate.control, n)
        amps = _apply_cnot(state.amplitudes, gate.control, gate.target, n)
    elif gate.kind is GateKind.HADAMARD:
        amps = _apply_single_qubit(state.amplitudes, _H_MATRIX, gate.target, n)
    else:
        matrix = _rotation_matrix(gate.kind, gate.angle)
        amps = _apply_single_qubit(state.amplitudes, matrix, gate.target, n)
    return StateVector(n, amps)


def expectation_pauli_z(state: StateVector, wire: int) -> float:
    """<Z> on one wire: +1 weight where the wire's bit is 0, -1 where it is 1."""
    n = state.n_wires
    _check_wire(wire, n)
    probs = np.abs(state.amplitudes) ** 2
    probs = probs.reshape([2] * n)
    other_axes = tuple(a for a in range(n) if a != wire)
    p0, p1 = probs.sum(axis=other_axes)
    return float(p0 - p1)
