"""Tests for waveform generators, the mixer and labeled datasets"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.errors import InvalidInputError, LabelMismatchError
from app.iqcore.signal import IqSegment, measure_power
from app.iqcore.spectral import welch_psd
from app.storage.artifacts import ArtifactStore
from app.wavegen.dataset import build_dataset, derive_seed, load_manifest, manifest_payload, manifest_records
from app.wavegen.kinds import CLASS_ORDER, ClassLabel, WaveformKind, class_label_for, parse_kind, parse_label
from app.wavegen.mixer import MixSpec, mix, scale_for_sir
from app.wavegen.waveforms import complex_awgn, generate, make_rng, spec_from_settings
from tests.helpers import FS

INTERFERERS = [WaveformKind.LTE_LIKE, WaveformKind.UMTS_LIKE, WaveformKind.GSM_LIKE]


def _classes(run_settings, length=512):
    return [spec_from_settings(kind, length, 0, run_settings) for kind in INTERFERERS]


def _intended(run_settings, length=512):
    return spec_from_settings(WaveformKind.DVBS2_LIKE, length, 0, run_settings)


class TestKinds:
    def test_parse_kind(self):
        assert parse_kind("gsm_like") is WaveformKind.GSM_LIKE

    def test_unknown_kind(self):
        with pytest.raises(InvalidInputError):
            parse_kind("wifi_like")

    def test_intended_is_not_a_class(self):
        with pytest.raises(InvalidInputError):
            class_label_for(WaveformKind.DVBS2_LIKE)

    def test_unknown_label(self):
        with pytest.raises(LabelMismatchError):
            parse_label("WIFI")


class TestGenerators:
    @pytest.mark.parametrize("kind", list(WaveformKind))
    def test_deterministic(self, run_settings, kind):
        spec = spec_from_settings(kind, 2048, 99, run_settings)
        np.testing.assert_array_equal(generate(spec).samples, generate(spec).samples)

    @pytest.mark.parametrize("kind", list(WaveformKind))
    def test_unit_power(self, run_settings, kind):
        seg = generate(spec_from_settings(kind, 4096, 5, run_settings))
        assert len(seg) == 4096
        assert seg.sample_rate_hz == run_settings.SAMPLE_RATE_HZ
        assert measure_power(seg).mean_power == pytest.approx(1.0, abs=1e-6)

    def test_seed_changes_output(self, run_settings):
        a = generate(spec_from_settings(WaveformKind.LTE_LIKE, 512, 1, run_settings))
        b = generate(spec_from_settings(WaveformKind.LTE_LIKE, 512, 2, run_settings))
        assert not np.array_equal(a.samples, b.samples)

    def test_gsm_constant_envelope(self, run_settings):
        seg = generate(spec_from_settings(WaveformKind.GSM_LIKE, 8192, 3, run_settings))
        envelope = np.abs(seg.samples)
        assert np.ptp(envelope) / np.mean(envelope) < 0.01

    def test_lte_spectrum_is_band_limited(self, run_settings):
        seg = generate(spec_from_settings(WaveformKind.LTE_LIKE, 2**15, 4, run_settings))
        psd = welch_psd(seg, nfft=512, overlap_fraction=0.5, floor_db=-300.0)
        rel = np.abs(psd.frequencies_hz) / FS
        in_band = np.mean(psd.power_db[rel <= 0.2])
        out_of_band = np.mean(psd.power_db[rel >= 0.3])
        assert in_band - out_of_band >= 20.0

    def test_tone_frequency(self, run_settings):
        spec = spec_from_settings(WaveformKind.TONE, 8192, 0, run_settings, tone_offset_hz=FS / 8)
        psd = welch_psd(generate(spec), nfft=512, overlap_fraction=0.5, floor_db=-300.0)
        assert psd.peak_frequency_hz == pytest.approx(FS / 8)

    def test_tone_outside_band(self, run_settings):
        spec = spec_from_settings(WaveformKind.TONE, 64, 0, run_settings, tone_offset_hz=FS)
        with pytest.raises(InvalidInputError):
            generate(spec)

    def test_dvbs2_bandwidth_exceeds_rate(self, run_settings):
        spec = spec_from_settings(WaveformKind.DVBS2_LIKE, 512, 0, run_settings, samples_per_symbol=1)
        with pytest.raises(InvalidInputError):
            generate(spec)

    def test_lte_too_many_subcarriers(self, run_settings):
        spec = spec_from_settings(WaveformKind.LTE_LIKE, 512, 0, run_settings, active_subcarriers=128)
        with pytest.raises(InvalidInputError):
            generate(spec)

    def test_invalid_spec_values(self, run_settings):
        with pytest.raises(InvalidInputError):
            spec_from_settings(WaveformKind.LTE_LIKE, 0, 0, run_settings)


class TestMixer:
    def test_scale_for_sir(self):
        assert scale_for_sir(1.0, 1.0, 0.0) == pytest.approx(1.0)
        assert scale_for_sir(1.0, 1.0, 20.0) == pytest.approx(0.01)
        assert scale_for_sir(1.0, 1.0, math.inf) == 0.0

    def test_zero_power_interferer(self):
        with pytest.raises(InvalidInputError):
            scale_for_sir(1.0, 0.0, 10.0)

    def test_realised_spec_carries_beta(self):
        spec = MixSpec(snr_db=20.0, sir_db=20.0)
        assert spec.beta is None
        assert spec.realised(1.0, 1.0).beta == pytest.approx(0.01)
        assert spec.realised(2.0, 0.5).snr_db == 20.0
        assert MixSpec(snr_db=20.0, sir_db=math.inf).realised(1.0, 1.0).beta == 0.0

    @pytest.mark.parametrize("sir_db, beta", [(0.0, 0.0), (math.inf, 1.0), (0.0, -1.0), (0.0, math.nan)])
    def test_beta_must_match_sir(self, sir_db, beta):
        with pytest.raises(ValidationError):
            MixSpec(snr_db=20.0, sir_db=sir_db, beta=beta)

    def test_silent_intended_signal_cannot_set_sir(self):
        with pytest.raises(InvalidInputError):
            MixSpec(snr_db=20.0, sir_db=10.0).realised(0.0, 1.0)

    def test_interference_free_channel(self, run_settings):
        x = generate(spec_from_settings(WaveformKind.DVBS2_LIKE, 1024, 1, run_settings))
        i = generate(spec_from_settings(WaveformKind.LTE_LIKE, 1024, 2, run_settings))
        y, beta = mix(x, i, MixSpec(snr_db=10.0, sir_db=math.inf), seed=3)

        assert beta == 0.0
        noise = complex_awgn(make_rng(3), 1024)
        np.testing.assert_allclose(y.samples, np.sqrt(10.0) * x.samples + noise, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("sir_db", [0.0, 7.5, 20.0])
    def test_realised_sir(self, run_settings, sir_db):
        x = generate(spec_from_settings(WaveformKind.DVBS2_LIKE, 4096, 1, run_settings))
        i = generate(spec_from_settings(WaveformKind.UMTS_LIKE, 4096, 2, run_settings))
        _, beta = mix(x, i, MixSpec(snr_db=20.0, sir_db=sir_db), seed=3)

        p_x = measure_power(x).mean_power
        p_i = measure_power(i.scaled(np.sqrt(beta))).mean_power
        assert 10 * np.log10(p_x / p_i) == pytest.approx(sir_db, abs=1e-9)

    def test_realised_snr(self, run_settings):
        x = generate(spec_from_settings(WaveformKind.DVBS2_LIKE, 100_000, 1, run_settings))
        y, _ = mix(x, x, MixSpec(snr_db=15.0, sir_db=math.inf), seed=8)

        signal = np.sqrt(10 ** 1.5) * x.samples
        noise = IqSegment(y.samples - signal, FS)
        snr = 10 * np.log10(measure_power(IqSegment(signal, FS)).mean_power / measure_power(noise).mean_power)
        assert snr == pytest.approx(15.0, abs=0.1)

    def test_length_mismatch(self, run_settings):
        x = generate(spec_from_settings(WaveformKind.DVBS2_LIKE, 512, 1, run_settings))
        i = generate(spec_from_settings(WaveformKind.LTE_LIKE, 256, 2, run_settings))
        with pytest.raises(InvalidInputError):
            mix(x, i, MixSpec(snr_db=20.0, sir_db=0.0), seed=0)

    def test_rate_mismatch(self):
        x = IqSegment(np.ones(8), FS)
        i = IqSegment(np.ones(8), 2 * FS)
        with pytest.raises(InvalidInputError):
            mix(x, i, MixSpec(snr_db=20.0, sir_db=0.0), seed=0)

    def test_rejects_nan_sir(self):
        with pytest.raises(ValueError):
            MixSpec(snr_db=20.0, sir_db=float("nan"))


class TestDataset:
    def test_derive_seed_is_stable(self):
        assert derive_seed(0, 1) == derive_seed(0, 1)
        assert derive_seed(0, 1) != derive_seed(0, 2)
        assert derive_seed(0, 1) != derive_seed(1, 1)
        assert 0 <= derive_seed(2**64 - 1, 5) < 2**64

    def test_counts_and_label_cycle(self, run_settings):
        data = build_dataset(_classes(run_settings), _intended(run_settings), [0.0, 20.0], 10, seed=1)

        assert len(data) == 60
        assert data.labels[:3] == CLASS_ORDER
        assert data.sir_values == [0.0, 20.0]
        for sir in (0.0, 20.0):
            counts = data.subset_by_sir(sir).class_counts()
            assert all(n == 10 for n in counts.values())

    def test_deterministic(self, run_settings):
        a = build_dataset(_classes(run_settings), _intended(run_settings), [10.0], 2, seed=5)
        b = build_dataset(_classes(run_settings), _intended(run_settings), [10.0], 2, seed=5)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.segment.samples, y.segment.samples)
            assert x.seed == y.seed

    def test_shuffle_is_deterministic(self, run_settings):
        data = build_dataset(_classes(run_settings), _intended(run_settings), [10.0], 4, seed=5)
        assert [it.seed for it in data.shuffled(3)] == [it.seed for it in data.shuffled(3)]
        assert sorted(it.seed for it in data.shuffled(3)) == sorted(it.seed for it in data)

    def test_stratified_split(self, run_settings):
        data = build_dataset(_classes(run_settings), _intended(run_settings), [10.0], 10, seed=5)
        train, holdout = data.split(0.2, seed=9)

        assert len(train) + len(holdout) == len(data)
        assert all(n == 2 for n in holdout.class_counts().values())
        assert not {it.seed for it in train} & {it.seed for it in holdout}

    def test_rejects_infinite_sir(self, run_settings):
        with pytest.raises(InvalidInputError):
            build_dataset(_classes(run_settings), _intended(run_settings), [math.inf], 1, seed=0)

    def test_rejects_length_mismatch(self, run_settings):
        with pytest.raises(InvalidInputError):
            build_dataset(_classes(run_settings, 256), _intended(run_settings), [0.0], 1, seed=0)

    def test_manifest_round_trip(self, run_settings, tmp_path):
        data = build_dataset(_classes(run_settings), _intended(run_settings), [0.0, 5.0], 1, seed=2)
        store = ArtifactStore(tmp_path, run_settings)
        names = [f"seg_{k:05d}.cf32" for k in range(len(data))]
        for name, item in zip(names, data):
            store.write_iq(name, item.segment)
        store.write_json("manifest.json", manifest_payload(manifest_records(data, names)))

        back = load_manifest(tmp_path / "manifest.json")
        assert back.labels == data.labels
        assert [it.sir_db for it in back] == [it.sir_db for it in data]
        for a, b in zip(back, data):
            np.testing.assert_allclose(a.segment.samples, b.segment.samples, rtol=1e-6, atol=1e-5)

    def test_manifest_with_unknown_label(self, run_settings, tmp_path):
        data = build_dataset(_classes(run_settings), _intended(run_settings), [0.0], 1, seed=2)
        store = ArtifactStore(tmp_path, run_settings)
        store.write_iq("a.cf32", data[0].segment)
        store.write_json("manifest.json", [{"class": "WIFI", "sir_db": 0.0, "seed": 1, "file": "a.cf32"}])
        with pytest.raises(LabelMismatchError):
            load_manifest(tmp_path / "manifest.json")

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(InvalidInputError):
            load_manifest(tmp_path / "nope.json")

    def test_single_class_labels(self, run_settings):
        data = build_dataset(_classes(run_settings)[:1], _intended(run_settings), [0.0], 3, seed=2)
        assert data.labels == [ClassLabel.LTE] * 3
