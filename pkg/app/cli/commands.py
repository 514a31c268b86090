"""Command handlers: each takes parsed args and resolved settings and returns an exit code"""

import argparse
import logging
import math
from typing import Callable, Dict, List, Sequence

import pandas as pd

from app.artifacts.models import (
    AutoencoderFile,
    CalibrationFile,
    LstmModelFile,
    SweepReportFile,
    SynthReport,
)
from app.autodetect.detector import DetectorCalibration, calibrate, detect
from app.autodetect.distribution import mse_ecdf, mse_pdf, mse_table
from app.autodetect.model import SparseAutoencoder
from app.autodetect.training import train_autoencoder
from app.config.settings import Settings
from app.errors import EXIT_DETECTED, EXIT_OK, InvalidInputError
from app.iqcore.iq_file import read_iq_file
from app.iqcore.signal import IqSegment, segment
from app.iqcore.spectral import PsdEstimate, welch_psd, write_psd_csv
from app.lstmclass.evaluation import ClassificationReport, confusion_table, evaluate, sir_sweep, sweep_table
from app.lstmclass.network import LstmModel
from app.lstmclass.trainer import train_classifier
from app.pipeline.triage import triage
from app.storage.artifacts import ArtifactStore, load_artifact
from app.wavegen.dataset import build_dataset, derive_seed, load_manifest, manifest_payload, manifest_records
from app.wavegen.kinds import WaveformKind, class_label_for, parse_kind
from app.wavegen.mixer import MixSpec, mix
from app.wavegen.waveforms import WaveformSpec, generate, spec_from_settings

logger = logging.getLogger(__name__)

PSD_LENGTH_FACTOR = 64

Handler = Callable[[argparse.Namespace, Settings], int]


def _store(args: argparse.Namespace, s: Settings) -> ArtifactStore:
    return ArtifactStore(args.out, s)


def _read_segments(paths: Sequence[str], s: Settings, limit: int = 0) -> List[IqSegment]:
    segs: List[IqSegment] = []
    for path in paths:
        segs.extend(segment(read_iq_file(path), s.SEGMENT_LENGTH, s.SEGMENT_HOP))
    if limit and len(segs) > limit:
        logger.info(f"Using the first {limit} of {len(segs)} segments")
        segs = segs[:limit]
    logger.info(f"Loaded {len(segs)} segments of {s.SEGMENT_LENGTH} samples from {len(paths)} file(s)")
    return segs


def _class_specs(classes: str, s: Settings) -> List[WaveformSpec]:
    kinds = [parse_kind(name.strip()) for name in classes.split(",") if name.strip()]
    if not kinds:
        raise InvalidInputError("no interferer classes given")
    for kind in kinds:
        class_label_for(kind)
    return [spec_from_settings(kind, s.SEGMENT_LENGTH, 0, s) for kind in kinds]


def _psd(sig: IqSegment, s: Settings) -> PsdEstimate:
    return welch_psd(sig, nfft=s.WELCH_NFFT, overlap_fraction=s.WELCH_OVERLAP, floor_db=s.DB_FLOOR)


def _sir_tag(sir_db: float) -> str:
    return f"{sir_db:g}dB"


def _load_autoencoder(path: str) -> SparseAutoencoder:
    return SparseAutoencoder.from_file(load_artifact(path, AutoencoderFile, "model"))


def _load_calibration(path: str) -> DetectorCalibration:
    return DetectorCalibration.from_file(load_artifact(path, CalibrationFile, "calibration"))


def _load_classifier(path: str) -> LstmModel:
    return LstmModel.from_file(load_artifact(path, LstmModelFile, "model"))


def _write_report_csvs(store: ArtifactStore, report: ClassificationReport) -> None:
    store.write_csv("confusion_matrix.csv", confusion_table(report.confusion_matrix, report.class_labels))
    for sir, metrics in report.per_sir:
        store.write_csv(
            f"confusion_sir_{_sir_tag(sir)}.csv",
            confusion_table(metrics.confusion_matrix, report.class_labels),
        )


def cmd_synth(args: argparse.Namespace, s: Settings) -> int:
    """Write one waveform (optionally mixed) or a labeled dataset with its manifest"""
    store = _store(args, s)
    store.write_run_config()

    if args.dataset:
        intended = spec_from_settings(parse_kind(args.kind), s.SEGMENT_LENGTH, 0, s)
        classes = _class_specs(args.classes, s)
        dataset = build_dataset(classes, intended, s.SIR_LIST_DB, s.SEGMENTS_PER_POINT, s.SEED, snr_db=s.SNR_DB)
        names = [f"seg_{i:05d}.cf32" for i in range(len(dataset))]
        for name, item in zip(names, dataset):
            store.write_iq(name, item.segment)
        store.write_json("manifest.json", manifest_payload(manifest_records(dataset, names)))
        logger.info(f"Wrote {len(dataset)} segments and manifest.json to {store.out_dir}")

        if args.with_psd:
            n = PSD_LENGTH_FACTOR * s.WELCH_NFFT
            for k, spec in enumerate([intended] + classes):
                wave = generate(spec.model_copy(update={"num_samples": n, "seed": derive_seed(s.SEED, 3, k)}))
                write_psd_csv(_psd(wave, s), store.path(f"psd_{spec.kind.value}.csv"))
        return EXIT_OK

    if args.num_samples is None:
        raise InvalidInputError("--num-samples is required for single-waveform synthesis")
    if args.sir_db is not None and args.interferer_kind is None:
        raise InvalidInputError("--sir-db needs --interferer-kind")
    if args.interferer_kind is not None and args.sir_db is None:
        raise InvalidInputError("--interferer-kind needs --sir-db")

    kind = parse_kind(args.kind)
    signal = generate(spec_from_settings(kind, args.num_samples, derive_seed(s.SEED, 0), s))
    report = SynthReport(kind=kind.value, num_samples=args.num_samples, file=args.name)

    if args.interferer_kind is not None:
        if args.no_channel:
            raise InvalidInputError("--no-channel cannot be combined with an interferer")
        ikind = parse_kind(args.interferer_kind)
        interference = generate(spec_from_settings(ikind, args.num_samples, derive_seed(s.SEED, 1), s))
        signal, beta = mix(signal, interference, MixSpec(snr_db=s.SNR_DB, sir_db=args.sir_db), derive_seed(s.SEED, 2))
        report = report.model_copy(
            update={"interferer_kind": ikind.value, "sir_db": args.sir_db, "snr_db": s.SNR_DB, "beta": beta}
        )
    elif not args.no_channel:
        signal, beta = mix(signal, signal, MixSpec(snr_db=s.SNR_DB, sir_db=math.inf), derive_seed(s.SEED, 2))
        report = report.model_copy(update={"snr_db": s.SNR_DB, "beta": beta})

    store.write_iq(args.name, signal)
    store.write_json(args.name + ".synth.json", report)
    if args.with_psd:
        write_psd_csv(_psd(signal, s), store.path(args.name + ".psd.csv"))
    logger.info(f"Wrote {args.num_samples} samples of {kind.value} to {store.path(args.name)}")
    return EXIT_OK


def cmd_detect_train(args: argparse.Namespace, s: Settings) -> int:
    store = _store(args, s)
    segs = _read_segments(args.input, s, s.AE_TRAIN_SEGMENTS)
    model, result = train_autoencoder(segs, s, s.SEED)
    store.write_json("ae_model.json", model.to_file())
    store.write_csv("scg_loss.csv", _loss_frame(result.history_iterations, result.loss_history))
    store.write_run_config()
    return EXIT_OK


def _loss_frame(iterations: Sequence[int], losses: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame({"iteration": list(iterations), "loss": list(losses)})


def cmd_detect_calibrate(args: argparse.Namespace, s: Settings) -> int:
    model = _load_autoencoder(args.model)
    store = _store(args, s)
    segs = _read_segments(args.input, s, s.AE_CALIBRATION_SEGMENTS)
    calibration = calibrate(model, segs, s.DETECT_VARIANCE_THRESHOLD, s.DETECT_SKEWNESS_THRESHOLD)
    store.write_json("calibration.json", calibration.to_file())
    return EXIT_OK


def cmd_detect_run(args: argparse.Namespace, s: Settings) -> int:
    """Write the decision and MSE distribution; exit 10 when interference is detected"""
    model = _load_autoencoder(args.model)
    calibration = _load_calibration(args.calibration)
    store = _store(args, s)
    decision = detect(model, calibration, _read_segments(args.input, s))

    store.write_json("detection.json", decision.to_report(calibration))
    store.write_csv("mse_vector.csv", mse_table(decision.mse))
    store.write_csv("mse_distribution.csv", mse_pdf(decision.mse, s.MSE_HISTOGRAM_BINS))
    store.write_csv("mse_cdf.csv", mse_ecdf(decision.mse))
    store.write_run_config()
    return EXIT_DETECTED if decision.interference_detected else EXIT_OK


def cmd_classify_train(args: argparse.Namespace, s: Settings) -> int:
    dataset = load_manifest(args.manifest)
    store = _store(args, s)
    model, history = train_classifier(dataset, s, s.SEED, s.SEGMENT_LENGTH)
    store.write_json("lstm_model.json", model.to_file())
    store.write_csv("training_history.csv", history.to_frame())
    store.write_run_config()
    return EXIT_OK


def cmd_classify_eval(args: argparse.Namespace, s: Settings) -> int:
    model = _load_classifier(args.model)
    dataset = load_manifest(args.manifest)
    store = _store(args, s)
    report = evaluate(model, dataset, s.SEGMENT_LENGTH)
    store.write_json("classification_report.json", report.to_file())
    _write_report_csvs(store, report)
    store.write_run_config()
    return EXIT_OK


def cmd_classify_sweep(args: argparse.Namespace, s: Settings) -> int:
    """Accuracy/RMSE versus SIR, overall and per class"""
    model = _load_classifier(args.model)
    store = _store(args, s)
    intended = spec_from_settings(WaveformKind.DVBS2_LIKE, s.SEGMENT_LENGTH, 0, s)
    results = sir_sweep(
        model, _class_specs(args.classes, s), intended, s.SIR_LIST_DB, s.SEGMENTS_PER_POINT, s.SEED, snr_db=s.SNR_DB
    )

    store.write_csv("sweep.csv", sweep_table(results))
    for sir, report in results:
        store.write_csv(f"confusion_sir_{_sir_tag(sir)}.csv", confusion_table(report.confusion_matrix, report.class_labels))
    store.write_json(
        "sweep_report.json",
        SweepReportFile(
            sir_list_db=[sir for sir, _ in results],
            segments_per_point=s.SEGMENTS_PER_POINT,
            points=[report.to_file() for _, report in results],
        ),
    )
    store.write_run_config()
    return EXIT_OK


def cmd_psd(args: argparse.Namespace, s: Settings) -> int:
    store = _store(args, s)
    if args.input is not None:
        sig = read_iq_file(args.input)
    else:
        n = args.num_samples or PSD_LENGTH_FACTOR * s.WELCH_NFFT
        sig = generate(spec_from_settings(parse_kind(args.kind), n, s.SEED, s))
    psd = _psd(sig, s)
    write_psd_csv(psd, store.path(args.name))
    store.write_run_config()
    logger.info(f"PSD peak at {psd.peak_frequency_hz:.6g} Hz")
    return EXIT_OK


def cmd_triage(args: argparse.Namespace, s: Settings) -> int:
    """Detection-gated classification; exit 10 when interference is detected"""
    detector_model = _load_autoencoder(args.ae_model)
    calibration = _load_calibration(args.calibration)
    classifier = _load_classifier(args.lstm_model)
    store = _store(args, s)
    result = triage(detector_model, calibration, classifier, _read_segments(args.input, s))
    store.write_json("triage.json", result.to_report(calibration))
    return EXIT_DETECTED if result.decision.interference_detected else EXIT_OK


HANDLERS: Dict[str, Handler] = {
    "synth": cmd_synth,
    "detect_train": cmd_detect_train,
    "detect_calibrate": cmd_detect_calibrate,
    "detect_run": cmd_detect_run,
    "classify_train": cmd_classify_train,
    "classify_eval": cmd_classify_eval,
    "classify_sweep": cmd_classify_sweep,
    "psd": cmd_psd,
    "triage": cmd_triage,
}
