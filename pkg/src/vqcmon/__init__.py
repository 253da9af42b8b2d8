"""Variational quantum classifier training engine with live gradient-variance
(barren plateau) monitoring and streaming telemetry."""

from .circuit import (
    CircuitSpec,
    EncoderSpec,
    ParameterVector,
    PqcGateSlot,
    forward,
    parse_circuit_file,
    random_layers,
    serialize_circuit,
)
from .gradients import GradientSample, expectation_gradient, loss_gradient
from .monitor import (
    PlateauEvent,
    PlateauMonitor,
    VarianceReport,
    build_report,
    detect,
    variance,
)
from .simulator import (
    Gate,
    GateKind,
    StateVector,
    apply_gate,
    expectation_pauli_z,
    zero_state,
)
from .sweep import fit_decay, sweep_variance
from .telemetry import TelemetryEvent, TelemetryRecorder, read_run_log
from .trainer import EpochResult, TrainConfig, TrainingEngine, make_dataset, run

__version__ = "0.1.0"
