"""End-to-end tests of the command-line interface"""

import json
import logging

import pandas as pd
import pytest

from app.errors import EXIT_CONSISTENCY_ERROR, EXIT_DETECTED, EXIT_INPUT_ERROR, EXIT_OK
from app.iqcore.iq_file import sidecar_path
from main import main

SMALL = ["--segment-length", "64"]


def _files(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir()) if p.is_file()}


def _synth_dataset(out, *extra):
    return main(
        ["synth", "--dataset", "--sir-list", "0,20", "--segments-per-point", "10", "--out", str(out), *extra]
    )


class TestSynth:
    def test_dataset_manifest(self, tmp_path):
        assert _synth_dataset(tmp_path) == EXIT_OK

        records = json.loads((tmp_path / "manifest.json").read_text())
        assert len(records) == 60
        assert [r["class"] for r in records[:3]] == ["LTE", "UMTS", "GSM"]
        assert {r["sir_db"] for r in records} == {0.0, 20.0}
        assert (tmp_path / records[0]["file"]).stat().st_size == 8 * 512
        assert json.loads((tmp_path / "run_config.json").read_text())["tool"] == "satint"

    def test_reruns_are_byte_identical(self, tmp_path):
        _synth_dataset(tmp_path / "a", "--seed", "4")
        _synth_dataset(tmp_path / "b", "--seed", "4")
        assert _files(tmp_path / "a") == _files(tmp_path / "b")

    def test_dataset_with_psd(self, tmp_path):
        code = main(
            ["synth", "--dataset", "--sir-list", "10", "--segments-per-point", "1", "--with-psd", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        for kind in ("dvbs2_like", "lte_like", "umts_like", "gsm_like"):
            assert len(pd.read_csv(tmp_path / f"psd_{kind}.csv")) == 512

    def test_single_waveform_with_interferer(self, tmp_path):
        code = main(
            [
                "synth", "--num-samples", "1024", "--interferer-kind", "gsm_like", "--sir-db", "10",
                "--name", "rx.cf32", "--out", str(tmp_path),
            ]
        )
        assert code == EXIT_OK
        report = json.loads((tmp_path / "rx.cf32.synth.json").read_text())
        assert report["interferer_kind"] == "gsm_like"
        assert report["beta"] == pytest.approx(0.1)
        assert json.loads(sidecar_path(tmp_path / "rx.cf32").read_text())["num_samples"] == 1024

    def test_invalid_kind_is_a_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["synth", "--kind", "wifi_like", "--num-samples", "10", "--out", str(tmp_path)])
        assert exc.value.code == 2

    def test_intended_kind_as_class(self, tmp_path):
        assert _synth_dataset(tmp_path, "--classes", "dvbs2_like") == EXIT_INPUT_ERROR

    def test_missing_length(self, tmp_path):
        assert main(["synth", "--out", str(tmp_path)]) == EXIT_INPUT_ERROR

    def test_sir_without_interferer(self, tmp_path):
        assert main(["synth", "--num-samples", "64", "--sir-db", "3", "--out", str(tmp_path)]) == EXIT_INPUT_ERROR


class TestPsd:
    def _tone(self, out):
        main(
            [
                "synth", "--kind", "tone", "--tone-offset-hz", "6250000", "--num-samples", "8192",
                "--no-channel", "--name", "tone.cf32", "--out", str(out),
            ]
        )
        return out / "tone.cf32"

    def test_tone_peak(self, tmp_path):
        tone = self._tone(tmp_path)
        assert main(["psd", "--input", str(tone), "--nfft", "256", "--out", str(tmp_path)]) == EXIT_OK

        frame = pd.read_csv(tmp_path / "psd.csv")
        assert len(frame) == 256
        assert frame["frequency_hz"].iloc[frame["power_db"].idxmax()] == pytest.approx(6.25e6)

    def test_reruns_are_byte_identical(self, tmp_path):
        tone = self._tone(tmp_path)
        main(["psd", "--input", str(tone), "--out", str(tmp_path / "a")])
        main(["psd", "--input", str(tone), "--out", str(tmp_path / "b")])
        assert _files(tmp_path / "a") == _files(tmp_path / "b")

    def test_generated_kind(self, tmp_path):
        assert main(["psd", "--kind", "lte_like", "--nfft", "128", "--out", str(tmp_path)]) == EXIT_OK
        assert len(pd.read_csv(tmp_path / "psd.csv")) == 128

    def test_config_file_and_flag_precedence(self, tmp_path):
        config = tmp_path / "c.json"
        config.write_text(json.dumps({"WELCH_NFFT": 128}))
        main(["psd", "--kind", "awgn", "--config", str(config), "--name", "file.csv", "--out", str(tmp_path)])
        main(["psd", "--kind", "awgn", "--config", str(config), "--nfft", "64", "--name", "flag.csv", "--out", str(tmp_path)])
        assert len(pd.read_csv(tmp_path / "file.csv")) == 128
        assert len(pd.read_csv(tmp_path / "flag.csv")) == 64

    def test_unknown_config_key(self, tmp_path):
        config = tmp_path / "c.json"
        config.write_text(json.dumps({"NFFT": 128}))
        assert main(["psd", "--kind", "awgn", "--config", str(config), "--out", str(tmp_path)]) == EXIT_INPUT_ERROR

    def test_malformed_input(self, tmp_path):
        tone = self._tone(tmp_path)
        tone.write_bytes(tone.read_bytes()[:12])
        assert main(["psd", "--input", str(tone), "--out", str(tmp_path)]) == EXIT_INPUT_ERROR


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Clean training/calibration captures, an interfered capture, a trained detector and classifier"""
    root = tmp_path_factory.mktemp("pipeline")
    for name, seed, extra in (
        ("train.cf32", "1", []),
        ("calib.cf32", "2", []),
        ("interfered.cf32", "3", ["--interferer-kind", "lte_like", "--sir-db", "0"]),
    ):
        code = main(["synth", "--num-samples", "2560", "--seed", seed, "--name", name, "--out", str(root), *extra])
        assert code == EXIT_OK

    detector = root / "detector"
    assert main(
        [
            "detect", "train", "--input", str(root / "train.cf32"), "--hidden-size", "8",
            "--max-iters", "20", "--out", str(detector), *SMALL,
        ]
    ) == EXIT_OK
    assert main(
        [
            "detect", "calibrate", "--model", str(detector / "ae_model.json"),
            "--input", str(root / "calib.cf32"), "--out", str(detector), *SMALL,
        ]
    ) == EXIT_OK

    data = root / "data"
    assert main(
        ["synth", "--dataset", "--sir-list", "0,10", "--segments-per-point", "4", "--out", str(data), *SMALL]
    ) == EXIT_OK
    classifier = root / "classifier"
    assert main(
        [
            "classify", "train", "--manifest", str(data / "manifest.json"), "--hidden-size", "4",
            "--epochs", "1", "--batch-size", "8", "--out", str(classifier), *SMALL,
        ]
    ) == EXIT_OK
    return root


class TestDetect:
    def test_training_artifacts(self, workspace):
        detector = workspace / "detector"
        model = json.loads((detector / "ae_model.json").read_text())
        assert model["d"] == 128 and model["h"] == 8
        assert model["provenance"]["config"]["AE_HIDDEN_SIZE"] == 8
        loss = pd.read_csv(detector / "scg_loss.csv")
        assert loss["iteration"].iloc[0] == 0
        assert loss["loss"].is_monotonic_decreasing

    def test_calibration_data_reads_clean(self, workspace, tmp_path):
        detector = workspace / "detector"
        code = main(
            [
                "detect", "run", "--model", str(detector / "ae_model.json"),
                "--calibration", str(detector / "calibration.json"),
                "--input", str(workspace / "calib.cf32"), "--out", str(tmp_path), *SMALL,
            ]
        )
        assert code == EXIT_OK
        report = json.loads((tmp_path / "detection.json").read_text())
        assert report["interference_detected"] is False
        assert report["relative_increase"]["variance"] == 0.0
        assert len(pd.read_csv(tmp_path / "mse_vector.csv")) == 40
        assert len(pd.read_csv(tmp_path / "mse_distribution.csv")) == 50
        assert pd.read_csv(tmp_path / "mse_cdf.csv")["cdf"].iloc[-1] == 1.0

    def test_exit_code_matches_report(self, workspace, tmp_path):
        detector = workspace / "detector"
        code = main(
            [
                "detect", "run", "--model", str(detector / "ae_model.json"),
                "--calibration", str(detector / "calibration.json"),
                "--input", str(workspace / "interfered.cf32"), "--out", str(tmp_path), *SMALL,
            ]
        )
        report = json.loads((tmp_path / "detection.json").read_text())
        assert code == (EXIT_DETECTED if report["interference_detected"] else EXIT_OK)

    def test_calibrate_before_train(self, workspace, tmp_path, caplog):
        with caplog.at_level(logging.ERROR):
            code = main(
                [
                    "detect", "calibrate", "--model", str(tmp_path / "ae_model.json"),
                    "--input", str(workspace / "calib.cf32"), "--out", str(tmp_path),
                ]
            )
        assert code == EXIT_INPUT_ERROR
        assert "model not found" in caplog.text

    def test_segment_length_mismatch(self, workspace, tmp_path):
        detector = workspace / "detector"
        code = main(
            [
                "detect", "run", "--model", str(detector / "ae_model.json"),
                "--calibration", str(detector / "calibration.json"),
                "--input", str(workspace / "calib.cf32"), "--out", str(tmp_path), "--segment-length", "128",
            ]
        )
        assert code == EXIT_INPUT_ERROR


class TestClassify:
    def test_eval_outputs(self, workspace, tmp_path):
        code = main(
            [
                "classify", "eval", "--model", str(workspace / "classifier" / "lstm_model.json"),
                "--manifest", str(workspace / "data" / "manifest.json"), "--out", str(tmp_path), *SMALL,
            ]
        )
        assert code == EXIT_OK

        report = json.loads((tmp_path / "classification_report.json").read_text())
        assert report["num_segments"] == 24
        confusion = pd.read_csv(tmp_path / "confusion_matrix.csv")
        assert confusion["true_class"].tolist() == ["LTE", "UMTS", "GSM"]
        assert confusion[["LTE", "UMTS", "GSM"]].sum(axis=1).tolist() == [8, 8, 8]
        assert (tmp_path / "confusion_sir_0dB.csv").exists()
        assert (tmp_path / "confusion_sir_10dB.csv").exists()

    def test_history(self, workspace):
        history = pd.read_csv(workspace / "classifier" / "training_history.csv")
        assert history["epoch"].tolist() == [1]

    def test_sweep(self, workspace, tmp_path):
        code = main(
            [
                "classify", "sweep", "--model", str(workspace / "classifier" / "lstm_model.json"),
                "--sir-list", "0,20", "--segments-per-point", "2", "--out", str(tmp_path), *SMALL,
            ]
        )
        assert code == EXIT_OK
        table = pd.read_csv(tmp_path / "sweep.csv")
        assert len(table) == 8
        assert list(table.columns) == ["sir_db", "class", "accuracy", "rmse"]
        assert len(json.loads((tmp_path / "sweep_report.json").read_text())["points"]) == 2

    def test_unknown_label_in_manifest(self, workspace, tmp_path):
        records = json.loads((workspace / "data" / "manifest.json").read_text())
        records[0]["class"] = "WIFI"
        for record in records:
            record["file"] = str(workspace / "data" / record["file"])
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps(records))

        code = main(
            [
                "classify", "eval", "--model", str(workspace / "classifier" / "lstm_model.json"),
                "--manifest", str(manifest), "--out", str(tmp_path), *SMALL,
            ]
        )
        assert code == EXIT_CONSISTENCY_ERROR


def test_triage(workspace, tmp_path):
    code = main(
        [
            "triage", "--ae-model", str(workspace / "detector" / "ae_model.json"),
            "--calibration", str(workspace / "detector" / "calibration.json"),
            "--lstm-model", str(workspace / "classifier" / "lstm_model.json"),
            "--input", str(workspace / "interfered.cf32"), "--out", str(tmp_path), *SMALL,
        ]
    )
    report = json.loads((tmp_path / "triage.json").read_text())
    detected = report["detection"]["interference_detected"]
    assert code == (EXIT_DETECTED if detected else EXIT_OK)
    assert (report["predicted_class"] is not None) == detected
