"""Raw cf32le IQ files with a mandatory JSON sidecar"""

import json
import logging
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from app.artifacts.models import IqSidecar
from app.errors import MalformedIqFileError, MissingMetadataError
from app.iqcore.signal import IqSegment

logger = logging.getLogger(__name__)

RECORD_BYTES = 8  # float32 I + float32 Q
SAMPLE_DTYPE = np.dtype("<f4")

PathLike = Union[str, Path]


def sidecar_path(path: PathLike) -> Path:
    """Sidecar metadata path for a raw IQ file (``capture.cf32`` -> ``capture.cf32.json``)"""
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_iq_file(path: PathLike, seg: IqSegment) -> str:
    """
    Write interleaved little-endian float32 I/Q plus sidecar metadata

    Args:
        path: Raw output path
        seg: Segment to store (samples are rounded to 32-bit floats)

    Returns:
        Path of the raw file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    interleaved = np.empty(2 * len(seg), dtype=SAMPLE_DTYPE)
    interleaved[0::2] = seg.samples.real
    interleaved[1::2] = seg.samples.imag
    with open(path, "wb") as f:
        f.write(interleaved.tobytes())

    meta = IqSidecar(sample_rate_hz=seg.sample_rate_hz, num_samples=len(seg))
    with open(sidecar_path(path), "w", encoding="utf-8") as f:
        f.write(meta.model_dump_json())
    logger.debug(f"Wrote {len(seg)} samples to {path}")
    return str(path)


def read_iq_file(path: PathLike) -> IqSegment:
    """
    Read a cf32le IQ file and its sidecar

    Args:
        path: Raw file path

    Returns:
        Segment with 64-bit samples and the declared sample rate
    """
    path = Path(path)
    meta_path = sidecar_path(path)

    try:
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = IqSidecar.model_validate_json(f.read())
    except FileNotFoundError:
        raise MissingMetadataError(f"missing metadata: {meta_path}")
    except ValidationError as e:
        raise MissingMetadataError(f"missing metadata: invalid sidecar {meta_path}: {e}")

    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise MalformedIqFileError(f"malformed IQ file: {path} does not exist")

    if len(raw) == 0 or len(raw) % RECORD_BYTES != 0:
        raise MalformedIqFileError(
            f"malformed IQ file: {path} has {len(raw)} bytes, not a multiple of {RECORD_BYTES}"
        )

    interleaved = np.frombuffer(raw, dtype=SAMPLE_DTYPE).astype(np.float64)
    samples = interleaved[0::2] + 1j * interleaved[1::2]
    if samples.size != meta.num_samples:
        raise MalformedIqFileError(
            f"malformed IQ file: {path} holds {samples.size} samples, sidecar declares {meta.num_samples}"
        )
    return IqSegment(samples, meta.sample_rate_hz)
