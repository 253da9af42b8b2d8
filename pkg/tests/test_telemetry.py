import json
import math
import threading
import time

import numpy as np
import pytest

from vqcmon.errors import InputError
from vqcmon.telemetry import (
    SCALAR,
    TEXT,
    StreamEmitter,
    TelemetryEvent,
    TelemetryRecorder,
    read_run_log,
    scalar_event,
    text_event,
)


def random_event(rng) -> TelemetryEvent:
    if rng.random() < 0.2:
        return TelemetryEvent(
            TEXT, "model_feedback", int(rng.integers(0, 1000)),
            "epoch=1 param_index=0 param_type=RX barren_plateau_value=1.0e-08",
            float(rng.uniform(1e9, 2e9)),
        )
    tag = rng.choice(
        ["train_loss", "test_accuracy", "bp_variance.RX", "bp_variance.param.3", "threshold"]
    )
    return TelemetryEvent(
        SCALAR, str(tag), int(rng.integers(0, 1000)),
        float(rng.normal()), float(rng.uniform(1e9, 2e9)),
    )


class TestEventValidation:
    def test_unknown_tag(self):
        with pytest.raises(InputError):
            TelemetryEvent(SCALAR, "bogus", 0, 1.0, 0.0)

    def test_param_tag_pattern(self):
        TelemetryEvent(SCALAR, "bp_variance.param.12", 0, 1.0, 0.0)
        with pytest.raises(InputError):
            TelemetryEvent(SCALAR, "bp_variance.param.x", 0, 1.0, 0.0)

    def test_nan_rejected(self):
        with pytest.raises(InputError):
            scalar_event("train_loss", 0, math.nan)

    def test_infinite_rejected(self):
        with pytest.raises(InputError):
            scalar_event("train_loss", 0, math.inf)

    def test_negative_step(self):
        with pytest.raises(InputError):
            scalar_event("train_loss", -1, 0.5)

    def test_text_needs_string(self):
        with pytest.raises(InputError):
            TelemetryEvent(TEXT, "model_feedback", 0, 3.0, 0.0)


class TestRecorder:
    def test_log_line_format(self, tmp_path):
        rec = TelemetryRecorder(tmp_path)
        rec.record(TelemetryEvent(SCALAR, "train_loss", 0, 0.8, 1234.5))
        rec.close()
        line = (tmp_path / "events.jsonl").read_text().strip()
        assert json.loads(line) == {
            "kind": "scalar",
            "tag": "train_loss",
            "step": 0,
            "value": 0.8,
            "wall_time": 1234.5,
        }

    def test_append_order(self, tmp_path):
        rec = TelemetryRecorder(tmp_path)
        assert rec.record(scalar_event("train_loss", 0, 0.5)) == 0
        assert rec.record(scalar_event("train_loss", 1, 0.4)) == 1
        rec.close()
        lines = (tmp_path / "events.jsonl").read_text().splitlines()
        assert [json.loads(l)["step"] for l in lines] == [0, 1]

    def test_write_through(self, tmp_path):
        rec = TelemetryRecorder(tmp_path)
        rec.record(scalar_event("train_loss", 0, 0.5))
        # visible on disk before close
        assert len((tmp_path / "events.jsonl").read_text().splitlines()) == 1
        rec.close()


class TestRunLogRoundTrip:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(7)
        rec = TelemetryRecorder(tmp_path)
        events = [random_event(rng) for _ in range(50)]
        for e in events:
            rec.record(e)
        rec.close()
        result = read_run_log(tmp_path / "events.jsonl")
        assert result.skipped == 0
        assert result.events == events

    def test_corrupt_line_skipped(self, tmp_path):
        path = tmp_path / "events.jsonl"
        good = scalar_event("train_loss", 0, 0.5).to_json()
        path.write_text(f"{good}\n{good}\nnot json at all\n{good}\n{good}\n")
        result = read_run_log(path)
        assert len(result.events) == 4
        assert result.skipped == 1

    def test_empty_file(self, tmp_path):
        path = tmp_path / "events.jsonl"
        path.write_text("")
        result = read_run_log(path)
        assert result.events == [] and result.skipped == 0

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_run_log(tmp_path / "nope.jsonl")


class TestStreaming:
    def test_replay_then_tail(self, tmp_path):
        rec = TelemetryRecorder(tmp_path)
        history = [scalar_event("train_loss", i, 1.0 / (i + 1)) for i in range(10)]
        for e in history:
            rec.record(e)
        rec.flush_stream()
        sub = rec.subscribe()  # late joiner
        batch, dropped = sub.pop(timeout=0.1)
        assert dropped == 0
        assert batch == history
        live = scalar_event("train_loss", 10, 0.05)
        rec.record(live)
        rec.flush_stream()
        batch, _ = sub.pop(timeout=0.1)
        assert batch == [live]
        rec.close()

    def test_empty_flush_delivers_nothing(self, tmp_path):
        rec = TelemetryRecorder(tmp_path)
        rec.record(scalar_event("train_loss", 0, 0.5))
        rec.flush_stream()
        sub = rec.subscribe()
        sub.pop(timeout=0.05)  # history
        assert rec.flush_stream() == []
        batch, _ = sub.pop(timeout=0.05)
        assert batch is None
        rec.close()

    def test_slow_consumer_drops_oldest_with_gap(self, tmp_path):
        rec = TelemetryRecorder(tmp_path)
        sub = rec.subscribe(max_batches=2)
        for i in range(5):
            rec.record(scalar_event("train_loss", i, float(i)))
            rec.flush_stream()
        # buffer holds 2 batches; 3 batches of 1 event were dropped
        batch, dropped = sub.pop(timeout=0.1)
        assert dropped == 3
        assert batch[0].step == 3
        batch, dropped = sub.pop(timeout=0.1)
        assert dropped == 0
        assert batch[0].step == 4
        rec.close()

    def test_recorder_unaffected_by_stalled_consumer(self, tmp_path):
        rec = TelemetryRecorder(tmp_path / "a")
        n = 2000

        def record_all(r):
            start = time.perf_counter()
            for i in range(n):
                r.record(scalar_event("train_loss", i, float(i)))
                if i % 50 == 0:
                    r.flush_stream()
            return time.perf_counter() - start

        baseline = record_all(rec)
        rec.close()
        rec2 = TelemetryRecorder(tmp_path / "b")
        rec2.subscribe(max_batches=4)  # stalled: never pops
        stalled = record_all(rec2)
        rec2.close()
        assert stalled < baseline * 3 + 0.05  # bounded buffer, no backpressure

    def test_emitter_latency(self, tmp_path):
        rec = TelemetryRecorder(tmp_path)
        emitter = StreamEmitter(rec, interval_seconds=0.05)
        sub = rec.subscribe()
        emitter.start()
        try:
            sent = scalar_event("train_loss", 0, 0.1)
            t0 = time.perf_counter()
            rec.record(sent)
            batch, _ = sub.pop(timeout=0.5)
            latency = time.perf_counter() - t0
            assert batch == [sent]
            assert latency < 0.5
        finally:
            emitter.stop()
            rec.close()

    def test_step_monotone_per_tag_in_real_run(self, tmp_path):
        import dataclasses
        from vqcmon.trainer import TrainConfig, run

        config = TrainConfig(
            n_wires=2, n_layers=1, rotations_per_layer=2, seed=3,
            epochs=3, batch_size=8, dataset_size=16,
        )
        rec = TelemetryRecorder(tmp_path)
        run(config, recorder=rec)
        rec.close()
        by_tag = {}
        for e in read_run_log(tmp_path / "events.jsonl").events:
            by_tag.setdefault(e.tag, []).append(e.step)
        assert by_tag  # at least train_loss
        for steps in by_tag.values():
            assert steps == sorted(steps)
