"""Training loop: synthetic two-blob classification data, plain gradient
descent on the VQC, and per-epoch variance analysis + telemetry.

Everything stochastic flows from the config seed through PCG64 streams, and
all reductions happen in fixed order, so a full run is bitwise reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .circuit import CircuitSpec, ParameterVector, forward, random_layers
from .errors import ConfigurationError
from .gradients import loss_gradient
from .monitor import (
    DEFAULT_THRESHOLD,
    PlateauEvent,
    PlateauMonitor,
    VarianceReport,
)
from .telemetry import TelemetryRecorder, scalar_event, text_event

Sample = tuple[tuple[float, ...], int]

BLOB_LOW_MEAN = 0.25 * math.pi  # label +1 (<Z0> stays positive there)
BLOB_HIGH_MEAN = 0.75 * math.pi  # label -1
BLOB_STD = 0.1 * math.pi
TRAIN_FRACTION = 0.8


@dataclass(frozen=True)
class TrainConfig:
    n_wires: int = 4
    n_layers: int = 2
    rotations_per_layer: int = 4
    seed: int = 7
    epochs: int = 40
    batch_size: int = 16
    learning_rate: float = 0.1
    threshold: float = DEFAULT_THRESHOLD
    dataset_size: int = 100
    stream_interval_seconds: float = 30.0

    def __post_init__(self):
        positives = {
            "n_wires": self.n_wires,
            "n_layers": self.n_layers,
            "rotations_per_layer": self.rotations_per_layer,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "dataset_size": self.dataset_size,
            "stream_interval_seconds": self.stream_interval_seconds,
        }
        for name, value in positives.items():
            if value <= 0:
                raise ConfigurationError(f"{name} must be positive, got {value}")
        # lr 0 (no updates) and threshold 0 (no events) are legal: both turn
        # the run into pure observation, which the invariants rely on
        if self.learning_rate < 0:
            raise ConfigurationError("learning_rate must be nonnegative")
        if self.threshold < 0:
            raise ConfigurationError("threshold must be nonnegative")
        if self.batch_size > self.dataset_size:
            raise ConfigurationError("batch_size must not exceed dataset_size")


@dataclass(frozen=True)
class EpochResult:
    epoch: int
    train_loss: float
    test_accuracy: float
    report: VarianceReport
    event: Optional[PlateauEvent]
    params_after: ParameterVector


def make_dataset(
    n_wires: int, dataset_size: int, seed: int
) -> tuple[list[Sample], list[Sample]]:
    """Two Gaussian blobs in [0, pi]^n_wires, labels alternating +1/-1 by
    index so the 80/20 index split stays class-balanced. Returns
    (train, test)."""
    if dataset_size % 2 != 0:
        raise ConfigurationError("dataset_size must be even")
    rng = np.random.Generator(np.random.PCG64(seed))
    samples: list[Sample] = []
    for i in range(dataset_size):
        label = 1 if i % 2 == 0 else -1
        mean = BLOB_LOW_MEAN if label == 1 else BLOB_HIGH_MEAN
        features = np.clip(rng.normal(mean, BLOB_STD, size=n_wires), 0.0, math.pi)
        samples.append((tuple(float(x) for x in features), label))
    split = int(dataset_size * TRAIN_FRACTION)
    return samples[:split], samples[split:]


def init_params(n_params: int, seed: int) -> ParameterVector:
    """Uniform angles in [0, 2*pi) from the seeded stream."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return ParameterVector(
        tuple(float(x) for x in rng.uniform(0.0, 2.0 * math.pi, size=n_params))
    )


class TrainingEngine:
    """Owns parameters, data and the plateau monitor for one run."""

    def __init__(
        self,
        config: TrainConfig,
        circuit: Optional[CircuitSpec] = None,
        recorder: Optional[TelemetryRecorder] = None,
    ):
        self.config = config
        if circuit is not None and circuit.n_wires != config.n_wires:
            raise ConfigurationError(
                f"circuit has {circuit.n_wires} wires, config says {config.n_wires}"
            )
        self.spec = circuit or random_layers(
            config.n_wires, config.n_layers, config.rotations_per_layer, config.seed
        )
        self.train_set, self.test_set = make_dataset(
            config.n_wires, config.dataset_size, config.seed
        )
        self.params = init_params(self.spec.n_params, config.seed)
        self.monitor = PlateauMonitor(threshold=config.threshold)
        self.recorder = recorder
        self.epoch = 0
        self.on_epoch: Optional[Callable[[EpochResult], None]] = None

    def set_threshold(self, value: float) -> float:
        """Command-channel entry point; lands at the next epoch boundary."""
        return self.monitor.set_threshold(value)

    def _minibatches(self) -> list[list[Sample]]:
        bs = self.config.batch_size
        return [
            self.train_set[i : i + bs] for i in range(0, len(self.train_set), bs)
        ]

    def _test_accuracy(self) -> float:
        correct = 0
        for features, label in self.test_set:
            # first measured wire is the decision output
            z = forward(self.spec, self.params, features)[0]
            predicted = 1 if z >= 0 else -1  # sign(0) counts as +1
            if predicted == label:
                correct += 1
        return correct / len(self.test_set)

    def train_epoch(self) -> EpochResult:
        epoch = self.epoch
        threshold_in_effect = self.monitor.begin_epoch()
        lr = self.config.learning_rate
        for batch in self._minibatches():
            _, mean_grads, _ = loss_gradient(self.spec, self.params, batch, epoch)
            self.params = ParameterVector(
                tuple(
                    theta - lr * g
                    for theta, g in zip(self.params.values, mean_grads)
                )
            )
        # variance population: one full-train-set gradient pass at epoch end
        train_loss, _, per_sample = loss_gradient(
            self.spec, self.params, self.train_set, epoch
        )
        report, event = self.monitor.analyze(epoch, per_sample, self.spec)
        result = EpochResult(
            epoch=epoch,
            train_loss=train_loss,
            test_accuracy=self._test_accuracy(),
            report=report,
            event=event,
            params_after=self.params,
        )
        self._emit(result, threshold_in_effect)
        self.epoch += 1
        return result

    def _emit(self, result: EpochResult, threshold: float) -> None:
        if self.recorder is None:
            return
        step = result.epoch
        self.recorder.record(scalar_event("train_loss", step, result.train_loss))
        self.recorder.record(
            scalar_event("test_accuracy", step, result.test_accuracy)
        )
        for kind, value in result.report.per_kind.items():
            self.recorder.record(
                scalar_event(f"bp_variance.{kind.name}", step, value)
            )
        for entry in result.report.per_param:
            self.recorder.record(
                scalar_event(
                    f"bp_variance.param.{entry.param_index}", step, entry.variance
                )
            )
        self.recorder.record(scalar_event("threshold", step, threshold))
        if result.event is not None:
            self.recorder.record(
                text_event("model_feedback", step, result.event.message)
            )

    def run_all(self) -> list[EpochResult]:
        results = []
        for _ in range(self.config.epochs):
            result = self.train_epoch()
            results.append(result)
            if self.on_epoch is not None:
                self.on_epoch(result)
        return results


def run(
    config: TrainConfig,
    circuit: Optional[CircuitSpec] = None,
    recorder: Optional[TelemetryRecorder] = None,
) -> list[EpochResult]:
    """Train for config.epochs epochs, emitting telemetry per epoch."""
    return TrainingEngine(config, circuit=circuit, recorder=recorder).run_all()
