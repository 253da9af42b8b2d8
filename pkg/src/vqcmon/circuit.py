"""VQC construction: angle encoder, randomized PQC layers, forward evaluation,
and the plain-text circuit file format.

The random-layer generator draws from numpy's PCG64 stream, which is stable
across platforms for a fixed seed, so generated circuits (and every golden
test downstream) are reproducible anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CircuitError, CircuitParseError, ConfigurationError, InputError
from .simulator import (
    Gate,
    GateKind,
    StateVector,
    apply_gate,
    expectation_pauli_z,
    zero_state,
)

ROTATION_KINDS = (GateKind.RX, GateKind.RY, GateKind.RZ)


@dataclass(frozen=True)
class EncoderSpec:
    scheme: str = "angle_ry"
    feature_scale: float = 1.0

    def __post_init__(self):
        if self.scheme != "angle_ry":
            raise ConfigurationError(f"unknown encoder scheme {self.scheme!r}")
        if self.feature_scale <= 0:
            raise ConfigurationError("feature_scale must be positive")


@dataclass(frozen=True)
class PqcGateSlot:
    kind: GateKind
    target: int
    control: Optional[int] = None
    param_index: Optional[int] = None

    def __post_init__(self):
        if self.kind in ROTATION_KINDS:
            if self.param_index is None or self.control is not None:
                raise CircuitError(
                    "rotation slots need a param_index and no control"
                )
        elif self.kind is GateKind.CNOT:
            if self.control is None or self.param_index is not None:
                raise CircuitError("CNOT slots need a control and no param_index")
        else:
            raise CircuitError(f"unsupported PQC gate kind {self.kind}")


@dataclass(frozen=True)
class CircuitSpec:
    n_wires: int
    encoder: EncoderSpec
    pqc: tuple[PqcGateSlot, ...]
    measured_wires: tuple[int, ...]

    def __post_init__(self):
        if self.n_wires < 1:
            raise ConfigurationError("n_wires must be positive")
        for slot in self.pqc:
            if not 0 <= slot.target < self.n_wires:
                raise CircuitError(f"slot target {slot.target} out of range")
            if slot.control is not None and not 0 <= slot.control < self.n_wires:
                raise CircuitError(f"slot control {slot.control} out of range")
        if not self.measured_wires:
            raise CircuitError("measured_wires must be nonempty")
        if len(set(self.measured_wires)) != len(self.measured_wires):
            raise CircuitError("measured_wires must be deduplicated")
        for w in self.measured_wires:
            if not 0 <= w < self.n_wires:
                raise CircuitError(f"measured wire {w} out of range")
        indices = sorted(
            s.param_index for s in self.pqc if s.param_index is not None
        )
        if indices != list(range(len(indices))):
            raise CircuitError(
                "rotation param indices must form a contiguous 0..P-1 range"
            )

    @property
    def n_params(self) -> int:
        return sum(1 for s in self.pqc if s.param_index is not None)

    def param_kinds(self) -> list[GateKind]:
        """Gate kind per parameter index, sorted by index."""
        by_index = {
            s.param_index: s.kind for s in self.pqc if s.param_index is not None
        }
        return [by_index[k] for k in range(len(by_index))]


@dataclass(frozen=True)
class ParameterVector:
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)

    def replaced(self, index: int, value: float) -> "ParameterVector":
        vals = list(self.values)
        vals[index] = value
        return ParameterVector(tuple(vals))


def random_layers(
    n_wires: int, n_layers: int, rotations_per_layer: int, seed: int
) -> CircuitSpec:
    """Randomized hardware-efficient ansatz: per layer, `rotations_per_layer`
    rotations of uniformly random kind/wire, then a nearest-neighbor CNOT ring.

    Single-wire circuits get no entanglers (a ring needs >= 2 wires).
    Measures every wire; wire 0 carries the classifier decision.
    """
    if n_wires < 1 or n_layers < 1 or rotations_per_layer < 1:
        raise ConfigurationError(
            "n_wires, n_layers and rotations_per_layer must be positive"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    slots: list[PqcGateSlot] = []
    param_index = 0
    for _ in range(n_layers):
        for _ in range(rotations_per_layer):
            kind = ROTATION_KINDS[rng.integers(0, 3)]
            wire = int(rng.integers(0, n_wires))
            slots.append(PqcGateSlot(kind, wire, param_index=param_index))
            param_index += 1
        if n_wires >= 2:
            for i in range(n_wires):
                slots.append(
                    PqcGateSlot(GateKind.CNOT, (i + 1) % n_wires, control=i)
                )
    return CircuitSpec(
        n_wires=n_wires,
        encoder=EncoderSpec(),
        pqc=tuple(slots),
        measured_wires=tuple(range(n_wires)),
    )


def encode(features: Sequence[float], spec: CircuitSpec) -> StateVector:
    """Angle-encode features: RY(scale * x_i) on wire i, starting from |0...0>."""
    if len(features) != spec.n_wires:
        raise InputError(
            f"expected {spec.n_wires} features, got {len(features)}"
        )
    state = zero_state(spec.n_wires)
    for i, x in enumerate(features):
        state = apply_gate(
            state, Gate(GateKind.RY, i, angle=spec.encoder.feature_scale * x)
        )
    return state


def apply_pqc(
    state: StateVector, spec: CircuitSpec, params: ParameterVector
) -> StateVector:
    if len(params) != spec.n_params:
        raise InputError(
            f"expected {spec.n_params} parameters, got {len(params)}"
        )
    for slot in spec.pqc:
        if slot.param_index is not None:
            gate = Gate(slot.kind, slot.target, angle=params.values[slot.param_index])
        else:
            gate = Gate(slot.kind, slot.target, control=slot.control)
        state = apply_gate(state, gate)
    return state


def forward(
    spec: CircuitSpec, params: ParameterVector, features: Sequence[float]
) -> list[float]:
    """<Z> on each measured wire after encoder + PQC."""
    state = apply_pqc(encode(features, spec), spec, params)
    return [expectation_pauli_z(state, w) for w in spec.measured_wires]


_KIND_NAMES = {
    GateKind.RX: "rx",
    GateKind.RY: "ry",
    GateKind.RZ: "rz",
}
_NAME_KINDS = {v: k for k, v in _KIND_NAMES.items()}


def serialize_circuit(spec: CircuitSpec) -> str:
    """Emit the line-oriented circuit format; parse(serialize(s)) == s."""
    lines = [f"wires {spec.n_wires}"]
    lines.append(f"encoder angle_ry scale {spec.encoder.feature_scale}")
    for slot in spec.pqc:
        if slot.param_index is not None:
            lines.append(
                f"{_KIND_NAMES[slot.kind]} {slot.target} p{slot.param_index}"
            )
        else:
            lines.append(f"cnot {slot.control} {slot.target}")
    lines.append("measure " + " ".join(str(w) for w in spec.measured_wires))
    return "\n".join(lines) + "\n"


def parse_circuit_file(text: str) -> CircuitSpec:
    """Parse the circuit file format; errors carry 1-based line numbers."""
    n_wires: Optional[int] = None
    encoder: Optional[EncoderSpec] = None
    slots: list[PqcGateSlot] = []
    measured: Optional[tuple[int, ...]] = None
    seen_params: set[int] = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]

        def fail(msg: str):
            raise CircuitParseError(lineno, msg)

        if keyword == "wires":
            if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                fail("expected: wires <positive integer>")
            n_wires = int(tokens[1])
        elif keyword == "encoder":
            if len(tokens) != 4 or tokens[1] != "angle_ry" or tokens[2] != "scale":
                fail("expected: encoder angle_ry scale <float>")
            try:
                encoder = EncoderSpec(feature_scale=float(tokens[3]))
            except (ValueError, ConfigurationError) as exc:
                fail(f"bad encoder scale: {exc}")
        elif keyword in _NAME_KINDS:
            if len(tokens) != 3 or not tokens[2].startswith("p"):
                fail(f"expected: {keyword} <wire> p<k>")
            try:
                wire = int(tokens[1])
                pidx = int(tokens[2][1:])
            except ValueError:
                fail(f"expected: {keyword} <wire> p<k>")
            if n_wires is None or not 0 <= wire < n_wires:
                fail(f"wire {tokens[1]} out of range")
            if pidx in seen_params:
                fail(f"duplicate param index p{pidx}")
            seen_params.add(pidx)
            slots.append(PqcGateSlot(_NAME_KINDS[keyword], wire, param_index=pidx))
        elif keyword == "cnot":
            if len(tokens) != 3:
                fail("expected: cnot <control> <target>")
            try:
                control, target = int(tokens[1]), int(tokens[2])
            except ValueError:
                fail("expected: cnot <control> <target>")
            if n_wires is None or not (
                0 <= control < n_wires and 0 <= target < n_wires
            ):
                fail("cnot wire out of range")
            if control == target:
                fail("cnot control equals target")
            slots.append(PqcGateSlot(GateKind.CNOT, target, control=control))
        elif keyword == "measure":
            if len(tokens) < 2:
                fail("expected: measure <wire> [<wire> ...]")
            try:
                wires = tuple(int(t) for t in tokens[1:])
            except ValueError:
                fail("expected: measure <wire> [<wire> ...]")
            if n_wires is None or any(not 0 <= w < n_wires for w in wires):
                fail("measured wire out of range")
            if len(set(wires)) != len(wires):
                fail("duplicate measured wire")
            measured = wires
        else:
            fail(f"unknown keyword {keyword!r}")

    if n_wires is None:
        raise CircuitParseError(1, "missing 'wires' statement")
    if measured is None:
        raise CircuitParseError(1, "missing 'measure' statement")
    if encoder is None:
        encoder = EncoderSpec()
    try:
        return CircuitSpec(n_wires, encoder, tuple(slots), measured)
    except (CircuitError, ConfigurationError) as exc:
        raise CircuitParseError(1, str(exc)) from exc
