"""Seeded surrogate baseband waveform generators"""

import logging
import math
from typing import Callable, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt
from scipy import signal as sp_signal
from scipy.linalg import hadamard

from app.config.settings import Settings
from app.errors import InvalidInputError
from app.iqcore.signal import IqSegment, measure_power
from app.wavegen.kinds import WaveformKind

logger = logging.getLogger(__name__)

SEED_MAX = 2**64 - 1

QPSK_CONSTELLATION = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2.0)


class WaveformSpec(BaseModel):
    """Parameters of one surrogate waveform realisation"""
    model_config = ConfigDict(frozen=True)

    kind: WaveformKind
    num_samples: PositiveInt
    sample_rate_hz: PositiveFloat
    seed: int = Field(0, ge=0, le=SEED_MAX)

    # dvbs2_like (and RRC span shared with umts_like)
    rolloff: float = Field(0.25, gt=0.0, le=1.0)
    samples_per_symbol: PositiveInt = 4
    rrc_span_symbols: PositiveInt = 8

    # lte_like
    fft_size: PositiveInt = 128
    active_subcarriers: PositiveInt = 64
    cp_length: int = Field(9, ge=0)

    # umts_like
    spreading_factor: PositiveInt = 8
    chip_rate_hz: Optional[PositiveFloat] = None  # None -> sample_rate / 2
    umts_rolloff: float = Field(0.22, gt=0.0, le=1.0)

    # gsm_like
    bt: PositiveFloat = 0.3
    gsm_samples_per_symbol: PositiveInt = 4

    # tone
    tone_offset_hz: float = 0.0

    def with_seed(self, seed: int) -> "WaveformSpec":
        return self.model_copy(update={"seed": int(seed)})


def spec_from_settings(
    kind: WaveformKind,
    num_samples: int,
    seed: int,
    s: Settings,
    **overrides,
) -> WaveformSpec:
    """
    Build a waveform spec whose kind-specific parameters come from settings

    Args:
        kind: Waveform family
        num_samples: Output length
        seed: Generator seed
        s: Resolved settings
        **overrides: Explicit field values taking precedence over settings

    Returns:
        Validated waveform spec
    """
    values = {
        "kind": kind,
        "num_samples": num_samples,
        "sample_rate_hz": s.SAMPLE_RATE_HZ,
        "seed": seed,
        "rolloff": s.DVBS2_ROLLOFF,
        "samples_per_symbol": s.DVBS2_SAMPLES_PER_SYMBOL,
        "rrc_span_symbols": s.RRC_SPAN_SYMBOLS,
        "fft_size": s.LTE_FFT_SIZE,
        "active_subcarriers": s.LTE_ACTIVE_SUBCARRIERS,
        "cp_length": s.LTE_CP_LENGTH,
        "spreading_factor": s.UMTS_SPREADING_FACTOR,
        "chip_rate_hz": s.UMTS_CHIP_RATE_RATIO * s.SAMPLE_RATE_HZ,
        "umts_rolloff": s.UMTS_ROLLOFF,
        "bt": s.GSM_BT,
        "gsm_samples_per_symbol": s.GSM_SAMPLES_PER_SYMBOL,
        "tone_offset_hz": s.TONE_OFFSET_HZ,
    }
    values.update(overrides)
    try:
        return WaveformSpec(**values)
    except ValueError as e:
        raise InvalidInputError(f"invalid waveform spec: {e}")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; the bit stream is portable across platforms for a given seed"""
    return np.random.Generator(np.random.PCG64(int(seed)))


def rrc_taps(rolloff: float, span: int, sps: int) -> np.ndarray:
    """Root-raised-cosine FIR taps with unit energy, span symbols long"""
    n = span * sps
    t = np.arange(-n / 2, n / 2 + 1) / sps
    h = np.zeros_like(t)

    for i, ti in enumerate(t):
        if abs(ti) < 1e-12:
            h[i] = 1.0 + rolloff * (4.0 / np.pi - 1.0)
        elif abs(abs(4.0 * rolloff * ti) - 1.0) < 1e-8:
            h[i] = (rolloff / np.sqrt(2.0)) * (
                (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * rolloff))
                + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * rolloff))
            )
        else:
            num = np.sin(np.pi * ti * (1.0 - rolloff)) + 4.0 * rolloff * ti * np.cos(np.pi * ti * (1.0 + rolloff))
            den = np.pi * ti * (1.0 - (4.0 * rolloff * ti) ** 2)
            h[i] = num / den

    return h / np.sqrt(np.sum(h**2))


def qpsk_symbols(rng: np.random.Generator, count: int) -> np.ndarray:
    return QPSK_CONSTELLATION[rng.integers(0, 4, size=count)]


def shape_symbols(symbols: np.ndarray, taps: np.ndarray, sps: int, num_samples: int) -> np.ndarray:
    """Upsample and filter, dropping the filter start-up transient"""
    shaped = sp_signal.upfirdn(taps, symbols, up=sps)
    start = len(taps) - 1
    out = shaped[start : start + num_samples]
    if out.size < num_samples:
        raise InvalidInputError("internal error: not enough shaped samples")
    return out


def _dvbs2_like(spec: WaveformSpec, rng: np.random.Generator) -> np.ndarray:
    sps = spec.samples_per_symbol
    occupied = (1.0 + spec.rolloff) * spec.sample_rate_hz / sps
    if occupied > spec.sample_rate_hz:
        raise InvalidInputError(
            f"dvbs2_like occupied bandwidth {occupied:.6g} Hz exceeds sample rate {spec.sample_rate_hz:.6g} Hz"
        )
    taps = rrc_taps(spec.rolloff, spec.rrc_span_symbols, sps)
    num_symbols = math.ceil(spec.num_samples / sps) + 2 * spec.rrc_span_symbols
    return shape_symbols(qpsk_symbols(rng, num_symbols), taps, sps, spec.num_samples)


def _lte_like(spec: WaveformSpec, rng: np.random.Generator) -> np.ndarray:
    n_fft = spec.fft_size
    active = spec.active_subcarriers
    if active % 2 != 0 or active >= n_fft:
        raise InvalidInputError(
            f"lte_like needs an even number of active subcarriers below fft_size "
            f"(got {active} of {n_fft}); occupied bandwidth would exceed the sample rate"
        )

    # DC left empty, active bins split evenly either side
    half = active // 2
    bins = np.concatenate([np.arange(1, half + 1), np.arange(n_fft - half, n_fft)])

    symbol_len = n_fft + spec.cp_length
    tx_filter = sp_signal.firwin(129, (half + 2) / n_fft * 2.0)
    num_symbols = math.ceil((spec.num_samples + len(tx_filter)) / symbol_len) + 1

    grid = np.zeros((num_symbols, n_fft), dtype=np.complex128)
    grid[:, bins] = qpsk_symbols(rng, num_symbols * active).reshape(num_symbols, active)
    body = np.fft.ifft(grid, axis=1) * np.sqrt(n_fft)
    with_cp = np.concatenate([body[:, n_fft - spec.cp_length :], body], axis=1)
    stream = with_cp.ravel()

    # Transmit low-pass keeps out-of-band emission well below the occupied band
    filtered = sp_signal.lfilter(tx_filter, 1.0, stream)
    start = len(tx_filter) - 1
    return filtered[start : start + spec.num_samples]


def _umts_like(spec: WaveformSpec, rng: np.random.Generator) -> np.ndarray:
    chip_rate = spec.chip_rate_hz or spec.sample_rate_hz / 2.0
    occupied = chip_rate * (1.0 + spec.umts_rolloff)
    if occupied > spec.sample_rate_hz:
        raise InvalidInputError(
            f"umts_like occupied bandwidth {occupied:.6g} Hz exceeds sample rate {spec.sample_rate_hz:.6g} Hz"
        )
    ratio = spec.sample_rate_hz / chip_rate
    samples_per_chip = int(round(ratio))
    if samples_per_chip < 1 or abs(ratio - samples_per_chip) > 1e-9:
        raise InvalidInputError("umts_like needs an integer number of samples per chip")

    sf = spec.spreading_factor
    if sf & (sf - 1):
        raise InvalidInputError("umts_like spreading factor must be a power of two")
    channel_code = hadamard(sf)[min(1, sf - 1)].astype(np.float64)

    num_chips = math.ceil(spec.num_samples / samples_per_chip) + 2 * spec.rrc_span_symbols
    num_symbols = math.ceil(num_chips / sf)
    chips = np.repeat(qpsk_symbols(rng, num_symbols), sf) * np.tile(channel_code, num_symbols)
    chips = chips * qpsk_symbols(rng, chips.size)  # complex scrambling code

    taps = rrc_taps(spec.umts_rolloff, spec.rrc_span_symbols, samples_per_chip)
    return shape_symbols(chips, taps, samples_per_chip, spec.num_samples)


def _gsm_like(spec: WaveformSpec, rng: np.random.Generator) -> np.ndarray:
    sps = spec.gsm_samples_per_symbol
    if sps < 2:
        raise InvalidInputError("gsm_like occupied bandwidth exceeds sample rate (need >= 2 samples per symbol)")

    # Gaussian frequency pulse, two symbols either side
    sigma = sps * np.sqrt(np.log(2.0)) / (2.0 * np.pi * spec.bt)
    kernel = sp_signal.windows.gaussian(4 * sps + 1, std=sigma)
    kernel /= np.sum(kernel)

    num_bits = math.ceil(spec.num_samples / sps) + 8
    nrz = 2.0 * rng.integers(0, 2, size=num_bits) - 1.0
    freq = np.convolve(np.repeat(nrz, sps), kernel, mode="full")

    # modulation index 1/2: pi/2 phase advance per bit
    phase = 0.5 * np.pi * np.cumsum(freq) / sps
    phase0 = rng.uniform(0.0, 2.0 * np.pi)
    start = len(kernel) - 1
    return np.exp(1j * (phase[start : start + spec.num_samples] + phase0))


def _tone(spec: WaveformSpec, rng: np.random.Generator) -> np.ndarray:
    if abs(spec.tone_offset_hz) > spec.sample_rate_hz / 2.0:
        raise InvalidInputError(
            f"tone offset {spec.tone_offset_hz:.6g} Hz is outside the +/- fs/2 band"
        )
    n = np.arange(spec.num_samples)
    phase0 = rng.uniform(0.0, 2.0 * np.pi)
    return np.exp(1j * (2.0 * np.pi * spec.tone_offset_hz * n / spec.sample_rate_hz + phase0))


def complex_awgn(rng: np.random.Generator, count: int) -> np.ndarray:
    """Circularly-symmetric complex Gaussian noise, unit variance split across I and Q"""
    return (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / np.sqrt(2.0)


def _awgn(spec: WaveformSpec, rng: np.random.Generator) -> np.ndarray:
    return complex_awgn(rng, spec.num_samples)


GENERATORS: Dict[WaveformKind, Callable[[WaveformSpec, np.random.Generator], np.ndarray]] = {
    WaveformKind.DVBS2_LIKE: _dvbs2_like,
    WaveformKind.LTE_LIKE: _lte_like,
    WaveformKind.UMTS_LIKE: _umts_like,
    WaveformKind.GSM_LIKE: _gsm_like,
    WaveformKind.TONE: _tone,
    WaveformKind.AWGN: _awgn,
}


def generate(spec: WaveformSpec) -> IqSegment:
    """
    Generate a unit-mean-power surrogate waveform

    Args:
        spec: Waveform parameters including seed

    Returns:
        num_samples complex samples; identical specs give bitwise-identical output
    """
    try:
        generator = GENERATORS[WaveformKind(spec.kind)]
    except (KeyError, ValueError):
        raise InvalidInputError(f"unknown waveform kind '{spec.kind}'")

    samples = generator(spec, make_rng(spec.seed))
    raw = IqSegment(samples, spec.sample_rate_hz)
    power = measure_power(raw).mean_power
    if power <= 0:
        raise InvalidInputError(f"{spec.kind.value} generator produced a zero-power waveform")
    return raw.scaled(1.0 / np.sqrt(power))
