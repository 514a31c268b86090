"""Complex baseband containers, spectral transforms and IQ file I/O"""

from app.iqcore.signal import IqSegment, PowerMeasurement, segment, measure_power
from app.iqcore.spectral import PsdEstimate, dft, welch_psd, write_psd_csv
from app.iqcore.iq_file import read_iq_file, write_iq_file

__all__ = [
    "IqSegment",
    "PowerMeasurement",
    "PsdEstimate",
    "segment",
    "measure_power",
    "dft",
    "welch_psd",
    "write_psd_csv",
    "read_iq_file",
    "write_iq_file",
]
