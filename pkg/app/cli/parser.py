"""Command-line parser

Flags whose destination is an UPPER_CASE settings name override the JSON
config file and the environment; everything else is command input.
"""

import argparse
from typing import Any, Dict, List

from app import __version__
from app.wavegen.kinds import WaveformKind

KIND_CHOICES = [k.value for k in WaveformKind]


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got '{text}'")
    if not 0 <= value <= 2**64 - 1:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64 - 1]")
    return value


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON config file (UPPER_CASE setting names)")
    common.add_argument("--seed", dest="SEED", type=_seed, default=None, help="master seed (default 0)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--verbose", action="store_true", help="debug logging and tracebacks")
    return common


def _waveform_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("waveform")
    g.add_argument("--sample-rate", dest="SAMPLE_RATE_HZ", type=float, default=None)
    g.add_argument("--segment-length", dest="SEGMENT_LENGTH", type=int, default=None)
    g.add_argument("--rolloff", dest="DVBS2_ROLLOFF", type=float, default=None)
    g.add_argument("--samples-per-symbol", dest="DVBS2_SAMPLES_PER_SYMBOL", type=int, default=None)
    g.add_argument("--fft-size", dest="LTE_FFT_SIZE", type=int, default=None)
    g.add_argument("--active-subcarriers", dest="LTE_ACTIVE_SUBCARRIERS", type=int, default=None)
    g.add_argument("--cp-length", dest="LTE_CP_LENGTH", type=int, default=None)
    g.add_argument("--spreading-factor", dest="UMTS_SPREADING_FACTOR", type=int, default=None)
    g.add_argument("--bt", dest="GSM_BT", type=float, default=None)
    g.add_argument("--tone-offset-hz", dest="TONE_OFFSET_HZ", type=float, default=None)
    g.add_argument("--snr-db", dest="SNR_DB", type=float, default=None)


def _dataset_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--classes",
        default="lte_like,umts_like,gsm_like",
        help="comma-separated interferer kinds, in label cycling order",
    )
    p.add_argument("--sir-list", dest="SIR_LIST_DB", type=_float_list, default=None)
    p.add_argument("--segments-per-point", dest="SEGMENTS_PER_POINT", type=int, default=None)


def _segment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--segment-length", dest="SEGMENT_LENGTH", type=int, default=None)
    p.add_argument("--segment-hop", dest="SEGMENT_HOP", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    """Parser for synth, detect, classify, psd and triage"""
    common = _common()
    parser = argparse.ArgumentParser(
        prog="satint",
        description="Satellite downlink interference detection and classification",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    # synth
    synth = commands.add_parser("synth", parents=[common], help="synthesize waveforms or a labeled dataset")
    synth.add_argument("--kind", choices=KIND_CHOICES, default="dvbs2_like", help="intended waveform kind")
    synth.add_argument("--num-samples", type=int, default=None, help="single-waveform length")
    synth.add_argument("--interferer-kind", choices=KIND_CHOICES, default=None)
    synth.add_argument("--sir-db", type=float, default=None, help="SIR of the interferer (dB)")
    synth.add_argument("--no-channel", action="store_true", help="write the bare waveform, no noise")
    synth.add_argument("--name", default="signal.cf32", help="single-waveform output file name")
    synth.add_argument("--dataset", action="store_true", help="write a labeled dataset and manifest")
    synth.add_argument("--with-psd", action="store_true", help="also write Welch PSD CSVs")
    _waveform_flags(synth)
    _dataset_flags(synth)
    synth.set_defaults(handler="synth")

    # detect
    detect = commands.add_parser("detect", help="autoencoder interference detection")
    detect_cmds = detect.add_subparsers(dest="action", required=True)

    d_train = detect_cmds.add_parser("train", parents=[common], help="train the autoencoder on clean IQ")
    d_train.add_argument("--input", nargs="+", required=True, help="clean IQ files")
    d_train.add_argument("--hidden-size", dest="AE_HIDDEN_SIZE", type=int, default=None)
    d_train.add_argument("--l2-weight", dest="AE_L2_WEIGHT", type=float, default=None)
    d_train.add_argument("--sparsity-proportion", dest="AE_SPARSITY_PROPORTION", type=float, default=None)
    d_train.add_argument("--sparsity-weight", dest="AE_SPARSITY_WEIGHT", type=float, default=None)
    d_train.add_argument("--max-iters", dest="AE_MAX_ITERS", type=int, default=None)
    d_train.add_argument("--grad-tol", dest="AE_GRAD_TOL", type=float, default=None)
    d_train.add_argument("--max-segments", dest="AE_TRAIN_SEGMENTS", type=int, default=None)
    _segment_flags(d_train)
    d_train.set_defaults(handler="detect_train")

    d_cal = detect_cmds.add_parser("calibrate", parents=[common], help="baseline moments from clean IQ")
    d_cal.add_argument("--model", required=True, help="autoencoder JSON")
    d_cal.add_argument("--input", nargs="+", required=True, help="clean IQ files")
    d_cal.add_argument("--variance-threshold", dest="DETECT_VARIANCE_THRESHOLD", type=float, default=None)
    d_cal.add_argument("--skewness-threshold", dest="DETECT_SKEWNESS_THRESHOLD", type=float, default=None)
    d_cal.add_argument("--max-segments", dest="AE_CALIBRATION_SEGMENTS", type=int, default=None)
    _segment_flags(d_cal)
    d_cal.set_defaults(handler="detect_calibrate")

    d_run = detect_cmds.add_parser("run", parents=[common], help="detect interference (exit 10 when found)")
    d_run.add_argument("--model", required=True, help="autoencoder JSON")
    d_run.add_argument("--calibration", required=True, help="calibration JSON")
    d_run.add_argument("--input", nargs="+", required=True, help="IQ files under test")
    d_run.add_argument("--bins", dest="MSE_HISTOGRAM_BINS", type=int, default=None)
    _segment_flags(d_run)
    d_run.set_defaults(handler="detect_run")

    # classify
    classify = commands.add_parser("classify", help="LSTM interference classification")
    classify_cmds = classify.add_subparsers(dest="action", required=True)

    c_train = classify_cmds.add_parser("train", parents=[common], help="train the classifier on a manifest")
    c_train.add_argument("--manifest", required=True, help="dataset manifest JSON")
    c_train.add_argument("--hidden-size", dest="LSTM_HIDDEN_SIZE", type=int, default=None)
    c_train.add_argument("--epochs", dest="LSTM_EPOCHS", type=int, default=None)
    c_train.add_argument("--batch-size", dest="LSTM_BATCH_SIZE", type=int, default=None)
    c_train.add_argument("--holdout-fraction", dest="LSTM_HOLDOUT_FRACTION", type=float, default=None)
    c_train.add_argument("--learning-rate", dest="ADAM_LEARNING_RATE", type=float, default=None)
    c_train.add_argument("--grad-clip", dest="LSTM_GRAD_CLIP", type=float, default=None, help="global gradient-norm ceiling, 0 disables")
    c_train.add_argument("--segment-length", dest="SEGMENT_LENGTH", type=int, default=None)
    c_train.set_defaults(handler="classify_train")

    c_eval = classify_cmds.add_parser("eval", parents=[common], help="evaluate the classifier on a manifest")
    c_eval.add_argument("--model", required=True, help="LSTM model JSON")
    c_eval.add_argument("--manifest", required=True, help="dataset manifest JSON")
    c_eval.add_argument("--segment-length", dest="SEGMENT_LENGTH", type=int, default=None)
    c_eval.set_defaults(handler="classify_eval")

    c_sweep = classify_cmds.add_parser("sweep", parents=[common], help="accuracy and RMSE versus SIR")
    c_sweep.add_argument("--model", required=True, help="LSTM model JSON")
    _waveform_flags(c_sweep)
    _dataset_flags(c_sweep)
    c_sweep.set_defaults(handler="classify_sweep")

    # psd
    psd = commands.add_parser("psd", parents=[common], help="Welch PSD of an IQ file or a generated waveform")
    source = psd.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="IQ file")
    source.add_argument("--kind", choices=KIND_CHOICES, help="generate this waveform instead")
    psd.add_argument("--num-samples", type=int, default=None, help="generated length (default 64 * nfft)")
    psd.add_argument("--nfft", dest="WELCH_NFFT", type=int, default=None)
    psd.add_argument("--overlap", dest="WELCH_OVERLAP", type=float, default=None)
    psd.add_argument("--name", default="psd.csv", help="output CSV name")
    _waveform_flags(psd)
    psd.set_defaults(handler="psd")

    # triage
    tri = commands.add_parser("triage", parents=[common], help="detect, then classify when detected")
    tri.add_argument("--ae-model", required=True, help="autoencoder JSON")
    tri.add_argument("--calibration", required=True, help="calibration JSON")
    tri.add_argument("--lstm-model", required=True, help="LSTM model JSON")
    tri.add_argument("--input", nargs="+", required=True, help="IQ files under test")
    _segment_flags(tri)
    tri.set_defaults(handler="triage")

    return parser


def settings_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Flag values destined for Settings fields"""
    return {k: v for k, v in vars(args).items() if k.isupper() and v is not None}
