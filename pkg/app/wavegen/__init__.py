"""Seeded surrogate waveform generators, interference mixer and labeled datasets"""

from app.wavegen.kinds import CLASS_ORDER, ClassLabel, WaveformKind, parse_kind, parse_label
from app.wavegen.waveforms import WaveformSpec, generate, make_rng, spec_from_settings
from app.wavegen.mixer import MixSpec, mix, scale_for_sir
from app.wavegen.dataset import (
    LabeledDataset,
    LabeledSegment,
    build_dataset,
    derive_seed,
    load_manifest,
    manifest_records,
)

__all__ = [
    "CLASS_ORDER",
    "ClassLabel",
    "WaveformKind",
    "parse_kind",
    "parse_label",
    "WaveformSpec",
    "generate",
    "make_rng",
    "spec_from_settings",
    "MixSpec",
    "mix",
    "scale_for_sir",
    "LabeledDataset",
    "LabeledSegment",
    "build_dataset",
    "derive_seed",
    "load_manifest",
    "manifest_records",
]
