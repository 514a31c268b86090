"""Waveform kinds and interferer class labels"""

import enum
from typing import List

from app.errors import InvalidInputError, LabelMismatchError


class WaveformKind(str, enum.Enum):
    """Surrogate waveform families"""
    DVBS2_LIKE = "dvbs2_like"
    LTE_LIKE = "lte_like"
    UMTS_LIKE = "umts_like"
    GSM_LIKE = "gsm_like"
    TONE = "tone"
    AWGN = "awgn"


class ClassLabel(str, enum.Enum):
    """Terrestrial interferer classes, in dataset cycling order"""
    LTE = "LTE"
    UMTS = "UMTS"
    GSM = "GSM"


CLASS_ORDER: List[ClassLabel] = [ClassLabel.LTE, ClassLabel.UMTS, ClassLabel.GSM]

INTERFERER_KINDS = {
    WaveformKind.LTE_LIKE: ClassLabel.LTE,
    WaveformKind.UMTS_LIKE: ClassLabel.UMTS,
    WaveformKind.GSM_LIKE: ClassLabel.GSM,
}


def parse_kind(name: str) -> WaveformKind:
    """Parse a waveform kind name, raising InvalidInputError for unknown names"""
    try:
        return WaveformKind(name)
    except ValueError:
        valid = ", ".join(k.value for k in WaveformKind)
        raise InvalidInputError(f"unknown waveform kind '{name}' (expected one of: {valid})")


def class_label_for(kind: WaveformKind) -> ClassLabel:
    """Interferer class of a waveform kind"""
    try:
        return INTERFERER_KINDS[WaveformKind(kind)]
    except KeyError:
        raise InvalidInputError(f"waveform kind '{WaveformKind(kind).value}' is not an interferer class")


def parse_label(name: str) -> ClassLabel:
    """Parse a class label name"""
    try:
        return ClassLabel(name)
    except ValueError:
        valid = ", ".join(c.value for c in ClassLabel)
        raise LabelMismatchError(f"unknown class label '{name}' (expected one of: {valid})")
