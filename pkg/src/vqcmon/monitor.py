"""Gradient-variance analysis: per-parameter variance reports, the
threshold test, and operator-facing feedback text.

Variance is the population variance of one parameter's gradient across the
epoch's per-sample gradients; per-gate-kind means are derived from that for
trace plots. The plateau event fires only when EVERY parameter's variance
sits below the threshold.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .circuit import CircuitSpec
from .errors import ConfigurationError, InputError
from .gradients import GradientSample
from .simulator import GateKind

DEFAULT_THRESHOLD = 1e-5

FEEDBACK_LINE = (
    "epoch={epoch} param_index={index} param_type={kind} "
    "barren_plateau_value={value:.1e}"
)


@dataclass(frozen=True)
class ParamVariance:
    param_index: int
    gate_kind: GateKind
    variance: float


@dataclass(frozen=True)
class VarianceReport:
    epoch: int
    per_param: tuple[ParamVariance, ...]
    per_kind: dict[GateKind, float]
    threshold: float
    all_below: bool


@dataclass(frozen=True)
class PlateauEvent:
    epoch: int
    entries: tuple[ParamVariance, ...]
    message: str


def variance(values: Sequence[float]) -> float:
    """Population variance; a single value has zero spread by definition."""
    if len(values) == 0:
        raise InputError("variance of empty sequence")
    if len(values) == 1:
        return 0.0
    return statistics.pvariance(values)


def build_report(
    epoch: int,
    samples: Sequence[GradientSample],
    spec: CircuitSpec,
    threshold: float,
) -> VarianceReport:
    if not samples:
        raise InputError("no gradient samples")
    # threshold 0 is legal here: the strict < test then never fires, which
    # turns monitoring into pure observation.
    if threshold < 0:
        raise ConfigurationError("threshold must be nonnegative")
    n_params = spec.n_params
    for s in samples:
        if len(s.grads) != n_params:
            raise InputError(
                f"gradient sample has {len(s.grads)} entries, expected {n_params}"
            )
    kinds = spec.param_kinds()
    per_param = tuple(
        ParamVariance(k, kinds[k], variance([s.grads[k] for s in samples]))
        for k in range(n_params)
    )
    per_kind: dict[GateKind, float] = {}
    for kind in (GateKind.RX, GateKind.RY, GateKind.RZ):
        members = [p.variance for p in per_param if p.gate_kind is kind]
        if members:
            per_kind[kind] = sum(members) / len(members)
    all_below = all(p.variance < threshold for p in per_param)
    return VarianceReport(epoch, per_param, per_kind, threshold, all_below)


def format_feedback(epoch: int, entries: Sequence[ParamVariance]) -> str:
    return "\n".join(
        FEEDBACK_LINE.format(
            epoch=epoch, index=e.param_index, kind=e.gate_kind.name, value=e.variance
        )
        for e in entries
    )


def detect(report: VarianceReport) -> Optional[PlateauEvent]:
    """Plateau event iff every parameter's variance is below threshold."""
    if not report.all_below:
        return None
    return PlateauEvent(
        epoch=report.epoch,
        entries=report.per_param,
        message=format_feedback(report.epoch, report.per_param),
    )


@dataclass
class PlateauMonitor:
    """Owns the active threshold; runtime changes land at epoch boundaries."""

    threshold: float = DEFAULT_THRESHOLD
    _pending: Optional[float] = field(default=None, repr=False)

    def set_threshold(self, new_threshold: float) -> float:
        if not new_threshold > 0:
            raise ConfigurationError("threshold must be positive")
        self._pending = float(new_threshold)
        return self._pending

    def begin_epoch(self) -> float:
        """Apply any pending threshold; call at each epoch boundary."""
        if self._pending is not None:
            self.threshold = self._pending
            self._pending = None
        return self.threshold

    def analyze(
        self, epoch: int, samples: Sequence[GradientSample], spec: CircuitSpec
    ) -> tuple[VarianceReport, Optional[PlateauEvent]]:
        report = build_report(epoch, samples, spec, self.threshold)
        return report, detect(report)
