"""Gradient-variance scaling experiment: variance of the first parameter's
gradient for random circuits, swept over qubit count.

Protocol per qubit count n: build random layers with seed (base_seed + n),
draw independent uniform parameter vectors, and measure the population
variance of d<Z_0>/dtheta_0. The input is RY(pi/4) on every wire (features
pi/4 through the angle encoder), the usual choice for this measurement: a
computational-basis input would make the statistic identically zero whenever
the first slot happens to be an RZ, which says nothing about plateau
physics. Layer count is held fixed across n so depth is not a confound.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
import warnings

import numpy as np

from .circuit import ParameterVector, random_layers
from .errors import ConfigurationError, FitError
from .gradients import expectation_gradient
from .monitor import variance

MIN_SAMPLES = 30
MAX_SWEEP_WIRES = 14

CSV_HEADER = ["n_wires", "n_layers", "samples", "variance", "log10_variance"]


@dataclass(frozen=True)
class SweepRow:
    n_wires: int
    n_layers: int
    n_param_samples: int
    variance_of_target_grad: float

    @property
    def log10_variance(self) -> float:
        return math.log10(self.variance_of_target_grad)


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float


def sweep_variance(
    n_range: Sequence[int], n_layers: int, samples: int, seed: int
) -> SweepResult:
    if samples < MIN_SAMPLES:
        raise ConfigurationError(f"need at least {MIN_SAMPLES} samples for a stable variance")
    if any(n < 2 for n in n_range):
        raise ConfigurationError("qubit counts must be >= 2")
    if any(n > MAX_SWEEP_WIRES for n in n_range):
        raise ConfigurationError(f"qubit counts must be <= {MAX_SWEEP_WIRES}")
    rows = []
    for n in sorted(n_range):
        spec = random_layers(n, n_layers, n, seed + n)
        rng = np.random.Generator(np.random.PCG64(seed + n))
        features = [math.pi / 4] * n
        grads = []
        for _ in range(samples):
            params = ParameterVector(
                tuple(float(x) for x in rng.uniform(0.0, 2.0 * math.pi, spec.n_params))
            )
            grads.append(
                expectation_gradient(spec, params, features, measured_wire=0, param_index=0)
            )
        rows.append(SweepRow(n, n_layers, samples, variance(grads)))
    return SweepResult(tuple(rows))


def fit_decay(result: SweepResult) -> DecayFit:
    """OLS of log10(variance) against n_wires; zero-variance rows are
    excluded (log undefined) with a warning."""
    usable = [r for r in result.rows if r.variance_of_target_grad > 0]
    excluded = len(result.rows) - len(usable)
    if excluded:
        warnings.warn(f"excluded {excluded} zero-variance row(s) from decay fit")
    if len(usable) < 3:
        raise FitError(f"need at least 3 usable rows, have {len(usable)}")
    x = np.array([r.n_wires for r in usable], dtype=float)
    y = np.array([r.log10_variance for r in usable], dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(float(slope), float(intercept), r_squared)


def write_csv(result: SweepResult, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in result.rows:
            log10_var = (
                r.log10_variance if r.variance_of_target_grad > 0 else float("-inf")
            )
            writer.writerow(
                [r.n_wires, r.n_layers, r.n_param_samples, r.variance_of_target_grad, log10_var]
            )
