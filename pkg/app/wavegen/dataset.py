"""Labeled mixed-segment datasets and their on-disk manifests"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import TypeAdapter, ValidationError

from app.artifacts.models import ManifestRecord
from app.errors import InvalidInputError, MissingMetadataError
from app.iqcore.iq_file import read_iq_file
from app.iqcore.signal import IqSegment
from app.wavegen.kinds import CLASS_ORDER, ClassLabel, class_label_for, parse_label
from app.wavegen.mixer import MixSpec, mix
from app.wavegen.waveforms import WaveformSpec, generate, make_rng

logger = logging.getLogger(__name__)

_MANIFEST_ADAPTER = TypeAdapter(List[ManifestRecord])


def derive_seed(master_seed: int, *counter: int) -> int:
    """Per-item 64-bit seed derived from a master seed and a counter path"""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(c) for c in counter))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class LabeledSegment:
    """Mixed segment tagged with its interferer class, SIR and seed"""

    segment: IqSegment
    label: ClassLabel
    sir_db: float
    seed: int


@dataclass(frozen=True)
class LabeledDataset:
    """Ordered, immutable collection of labeled segments"""

    items: Tuple[LabeledSegment, ...]

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[LabeledSegment]:
        return iter(self.items)

    def __getitem__(self, idx: int) -> LabeledSegment:
        return self.items[idx]

    @property
    def labels(self) -> List[ClassLabel]:
        return [item.label for item in self.items]

    @property
    def sir_values(self) -> List[float]:
        """Distinct SIR tags in first-appearance order"""
        seen: Dict[float, None] = {}
        for item in self.items:
            seen.setdefault(item.sir_db, None)
        return list(seen)

    def class_counts(self) -> Dict[ClassLabel, int]:
        counts = {label: 0 for label in CLASS_ORDER}
        for item in self.items:
            counts[item.label] += 1
        return counts

    def shuffled(self, seed: int) -> "LabeledDataset":
        """Deterministic permutation"""
        order = make_rng(seed).permutation(len(self.items))
        return LabeledDataset(tuple(self.items[i] for i in order))

    def subset_by_sir(self, sir_db: float) -> "LabeledDataset":
        return LabeledDataset(tuple(item for item in self.items if item.sir_db == sir_db))

    def split(self, holdout_fraction: float, seed: int) -> Tuple["LabeledDataset", "LabeledDataset"]:
        """
        Stratified split into (train, holdout)

        Args:
            holdout_fraction: Fraction of each class moved to the holdout part
            seed: Shuffle seed

        Returns:
            Tuple of (train, holdout) datasets, each preserving original order
        """
        if not 0.0 <= holdout_fraction < 1.0:
            raise InvalidInputError("holdout_fraction must lie in [0, 1)")

        rng = make_rng(seed)
        holdout_idx: List[int] = []
        for label in CLASS_ORDER:
            idx = np.array([i for i, item in enumerate(self.items) if item.label == label], dtype=int)
            if idx.size == 0:
                continue
            n_hold = int(np.floor(holdout_fraction * idx.size))
            holdout_idx.extend(rng.permutation(idx)[:n_hold].tolist())

        held = set(holdout_idx)
        train = tuple(item for i, item in enumerate(self.items) if i not in held)
        holdout = tuple(item for i, item in enumerate(self.items) if i in held)
        return LabeledDataset(train), LabeledDataset(holdout)


def build_dataset(
    classes: Sequence[WaveformSpec],
    intended: WaveformSpec,
    sir_list_db: Sequence[float],
    segments_per_point: int,
    seed: int,
    snr_db: float = 20.0,
) -> LabeledDataset:
    """
    Emit mixed segments cycling through the interferer classes at every SIR

    Args:
        classes: One waveform spec per interferer class, in cycling order
        intended: Intended-signal spec; its num_samples is the segment length
        sir_list_db: SIR points
        segments_per_point: Segments per (class, SIR) pair
        seed: Master seed; per-segment seeds are derived by counter
        snr_db: SNR applied to every segment

    Returns:
        Dataset of len(classes) * len(sir_list_db) * segments_per_point segments
    """
    if not classes:
        raise InvalidInputError("at least one interferer class is required")
    if not sir_list_db:
        raise InvalidInputError("at least one SIR point is required")
    if segments_per_point < 1:
        raise InvalidInputError("segments_per_point must be positive")
    if not all(np.isfinite(sir) for sir in sir_list_db):
        raise InvalidInputError("labeled datasets need finite SIR points")

    labels = [class_label_for(spec.kind) for spec in classes]
    for spec in classes:
        if spec.num_samples != intended.num_samples or spec.sample_rate_hz != intended.sample_rate_hz:
            raise InvalidInputError("class specs must match the intended segment length and sample rate")

    items: List[LabeledSegment] = []
    counter = 0
    for sir_db in sir_list_db:
        mix_spec = MixSpec(snr_db=snr_db, sir_db=sir_db)
        for _ in range(segments_per_point):
            for spec, label in zip(classes, labels):
                seg_seed = derive_seed(seed, counter)
                x = generate(intended.with_seed(derive_seed(seg_seed, 0)))
                i = generate(spec.with_seed(derive_seed(seg_seed, 1)))
                y, _ = mix(x, i, mix_spec, derive_seed(seg_seed, 2))
                items.append(LabeledSegment(segment=y, label=label, sir_db=float(sir_db), seed=seg_seed))
                counter += 1

    logger.info(
        f"Built dataset: {len(items)} segments, {len(classes)} classes, {len(sir_list_db)} SIR points"
    )
    return LabeledDataset(tuple(items))


def manifest_records(dataset: LabeledDataset, file_names: Sequence[str]) -> List[ManifestRecord]:
    """Manifest records pairing each segment with the IQ file holding it"""
    if len(file_names) != len(dataset):
        raise InvalidInputError("one file name per segment is required")
    return [
        ManifestRecord(class_label=item.label.value, sir_db=item.sir_db, seed=item.seed, file=name)
        for item, name in zip(dataset, file_names)
    ]


def manifest_payload(records: Sequence[ManifestRecord]) -> list:
    return [r.model_dump(mode="json", by_alias=True) for r in records]


def load_manifest(path: Union[str, Path], sample_rate_hz: Optional[float] = None) -> LabeledDataset:
    """
    Read a manifest and the IQ files it references (paths relative to the manifest)

    Args:
        path: Manifest JSON path
        sample_rate_hz: Optional expected sample rate; mismatching files are rejected

    Returns:
        Dataset in manifest order
    """
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"manifest not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            records = _MANIFEST_ADAPTER.validate_python(json.load(f))
    except (json.JSONDecodeError, ValidationError) as e:
        raise MissingMetadataError(f"invalid manifest {path}: {e}")

    items = []
    for record in records:
        seg = read_iq_file(path.parent / record.file)
        if sample_rate_hz is not None and seg.sample_rate_hz != sample_rate_hz:
            raise InvalidInputError(f"{record.file}: sample rate {seg.sample_rate_hz} != {sample_rate_hz}")
        items.append(
            LabeledSegment(segment=seg, label=parse_label(record.class_label), sir_db=record.sir_db, seed=record.seed)
        )
    return LabeledDataset(tuple(items))
