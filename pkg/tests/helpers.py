"""Signal builders shared by the test modules"""

from typing import List

import numpy as np

from app.config.settings import Settings
from app.iqcore.signal import IqSegment
from app.wavegen.kinds import WaveformKind
from app.wavegen.mixer import MixSpec, mix
from app.wavegen.waveforms import generate, spec_from_settings

FS = 50e6


def noisy_segments(
    kind: WaveformKind,
    count: int,
    length: int,
    seed: int,
    s: Settings,
    snr_db: float = 20.0,
) -> List[IqSegment]:
    """Interference-free received segments of one waveform kind"""
    out = []
    for k in range(count):
        x = generate(spec_from_settings(kind, length, seed + 3 * k, s))
        y, _ = mix(x, x, MixSpec(snr_db=snr_db, sir_db=float("inf")), seed + 3 * k + 1)
        out.append(y)
    return out


def random_segment(rng: np.random.Generator, length: int, fs: float = FS) -> IqSegment:
    return IqSegment(rng.standard_normal(length) + 1j * rng.standard_normal(length), fs)
