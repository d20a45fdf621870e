"""Smoke tests for the python bindings.

Run against an installed wheel, or a local CMake build via
PYTHONPATH=build/python (cmake -DTHROWSENSE_PYTHON=ON).
"""

import json
import math

import pytest

throwsense = pytest.importorskip("throwsense")


def test_version():
    assert throwsense.__version__.startswith("throwsense/")


def test_interpolation_fills_gaps():
    assert throwsense.interpolate_missing([1.0, None, 3.0]) == [1.0, 2.0, 3.0]
    assert throwsense.interpolate_missing([None, None, 5.0, 7.0]) == [5.0, 5.0, 5.0, 7.0]


def test_butterworth_preserves_dc():
    out = throwsense.butterworth_lowpass([5.0] * 40)
    assert len(out) == 40
    assert all(abs(v - 5.0) < 1e-6 for v in out)


def test_savgol_is_exact_on_quadratics():
    values = [float(i * i) for i in range(30)]
    deriv = throwsense.savgol_derivative(values)
    assert all(abs(deriv[i] - 2.0 * i) < 1e-9 for i in range(30))


def test_frontal_scores_contract():
    speeds = [0.0, 1.0, 2.0, 1.0] + [0.5] * 16
    scores, throw_frame, (lo, hi) = throwsense.frontal_scores(speeds)
    assert scores[2] == 0.0
    assert throw_frame == 2
    assert lo <= throw_frame <= hi
    assert all(s <= 0.0 for s in scores)


def test_metrics_and_class_weights():
    metrics = throwsense.compute_metrics([[370, 0], [630, 0]])
    assert metrics["mcc"] == 0.0
    assert abs(metrics["macro_f1"] - 0.27) < 0.01

    weights = throwsense.class_weights([1] * 63 + [0] * 37, 2)
    assert abs(weights[1] - 0.794) < 1e-3
    assert abs(weights[0] - 1.351) < 1e-3


def test_generate_detect_prior_roundtrip(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"schema": "throwsense.generator.v1", "n_subjects": 2, "rounds_per_subject": 2})
    )
    out = tmp_path / "ds"
    n = throwsense.generate_dataset(str(out), seed=13, config_path=str(cfg))
    assert n == 36

    manifest = json.loads((out / "manifest.json").read_text())
    pose_ref = manifest["records"][0]["pose_ref"]
    frame = throwsense.detect_throw_frame(str(out / pose_ref), view=manifest["records"][0]["view"])
    assert 20 < frame < 100

    rows = throwsense.build_prior(str(out / "manifest.json"))
    assert len(rows) == 9
    for outcome, row in enumerate(rows, start=1):
        assert math.isclose(sum(row), 1.0, abs_tol=1e-9)
        assert row[outcome - 1] == 0.0


def test_evaluate_runs_the_protocol(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"schema": "throwsense.generator.v1", "n_subjects": 3, "rounds_per_subject": 3})
    )
    out = tmp_path / "ds"
    throwsense.generate_dataset(str(out), seed=29, config_path=str(cfg))

    report = throwsense.evaluate(
        str(out / "manifest.json"), task="intent", folds=5, seed=3, max_epochs=5
    )
    assert len(report["per_fold"]) == 5
    assert "intent_accuracy_uniform" in report["mean"]
    assert 0.0 <= report["mean"]["intent_accuracy_uniform"] <= 0.5


def test_errors_surface_as_exceptions(tmp_path):
    with pytest.raises(throwsense.ThrowsenseError):
        throwsense.detect_throw_frame(str(tmp_path / "missing.json"))
    with pytest.raises(throwsense.ThrowsenseError):
        throwsense.butterworth_lowpass([1.0, 2.0, 3.0])  # too short
