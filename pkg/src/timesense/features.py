"""Extraction of the 24 biomarkers: 13 from PPG, 6 from EDA, 5 from temperature.

All standard deviations are population (ddof=0) statistics. pNN thresholds use
strict inequality. The tonic/phasic split, SCR threshold and sympathetic band
follow common toolkit conventions and are fixed here as the contract.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal as sps
from scipy.interpolate import CubicSpline

from . import dsp
from .errors import (
    DegenerateGeometry,
    FeatureExtractionError,
    LengthMismatch,
    NoBeatsDetected,
    TooFewBeats,
    TooShort,
)
from .model import (
    EDA_FEATURES,
    PPG_FEATURES,
    TEMP_FEATURES,
    FeatureVector,
    SessionRecord,
    TimeSeries,
    validate_session,
)

BASELINE = "baseline"
TASK = "task"

# Plausible heart-rate band; RR intervals outside it are rejected.
MIN_BPM = 42.0
MAX_BPM = 210.0
RR_MIN_MS = 60000.0 / MAX_BPM
RR_MAX_MS = 60000.0 / MIN_BPM


@dataclass(frozen=True)
class ExtractionConfig:
    """Knobs of the per-channel preprocessing chain."""

    ppg_band_hz: tuple = (0.7, 3.5)
    ppg_filter_order: int = 3
    ppg_resample_hz: float = 100.0
    eda_resample_hz: float = 100.0
    eda_min_duration_s: float = 10.0
    eda_clean_cutoff_hz: float = 3.0
    tonic_cutoff_hz: float = 0.05
    scr_min_amplitude_us: float = 0.01
    scr_min_separation_s: float = 1.0
    scr_onset_window_s: float = 5.0
    sympathetic_band_hz: tuple = (0.045, 0.25)
    sympathetic_rate_hz: float = 2.0
    autocorr_lag_s: float = 4.0
    breathing_band_hz: tuple = (0.1, 0.4)
    tachogram_rate_hz: float = 4.0


DEFAULT_EXTRACTION = ExtractionConfig()


@dataclass(frozen=True)
class BeatSequence:
    """Detected heartbeats with artifact-filtered RR intervals.

    ``rr_ms`` holds only the intervals that survived plausibility filtering;
    ``successive_diffs_ms`` holds differences between originally adjacent
    surviving intervals (a rejected interval breaks the adjacency chain).
    """

    peak_times_s: np.ndarray
    rr_ms: np.ndarray
    successive_diffs_ms: np.ndarray

    def __post_init__(self):
        for name in ("peak_times_s", "rr_ms", "successive_diffs_ms"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @classmethod
    def from_peak_times(cls, peak_times_s, max_local_deviation=0.30) -> "BeatSequence":
        """Build from raw peak times, rejecting implausible RR intervals.

        An interval is rejected when it leaves the 42-210 bpm band or deviates
        more than ``max_local_deviation`` from the local (5-wide) median.
        """
        times = np.asarray(peak_times_s, dtype=float)
        if len(times) < 4:
            raise TooFewBeats("need at least 4 peaks")
        rr = np.diff(times) * 1000.0
        keep = (rr >= RR_MIN_MS) & (rr <= RR_MAX_MS)
        # local median over a 5-interval window, computed on the raw series
        local_med = np.empty_like(rr)
        for i in range(len(rr)):
            lo, hi = max(0, i - 2), min(len(rr), i + 3)
            local_med[i] = np.median(rr[lo:hi])
        keep &= np.abs(rr - local_med) <= max_local_deviation * local_med
        if keep.sum() < 3:
            raise TooFewBeats("fewer than 3 plausible RR intervals")
        adjacent = keep[:-1] & keep[1:]
        diffs = np.diff(rr)[adjacent]
        return cls(times, rr[keep], diffs)

    @classmethod
    def from_rr(cls, rr_ms) -> "BeatSequence":
        """Build directly from RR intervals (all treated as plausible)."""
        rr = np.asarray(rr_ms, dtype=float)
        times = np.concatenate([[0.0], np.cumsum(rr) / 1000.0])
        return cls(times, rr, np.diff(rr))


def detect_ppg_peaks(series: TimeSeries) -> BeatSequence:
    """Adaptive-threshold peak detection on a bandpassed PPG waveform.

    Scans a family of thresholds above a moving-average envelope and keeps
    the one whose detected rhythm is plausible with minimal RR spread.
    """
    if series.duration_s < 5.0:
        raise TooShort("need at least 5 s of PPG")
    x = series.values - np.mean(series.values)
    fs = series.sampling_rate_hz
    win = max(3, int(round(0.75 * fs)) | 1)
    envelope = _moving_average(x, win)
    spread = np.std(x)
    if spread == 0:
        raise NoBeatsDetected("flat signal")
    min_dist = max(1, int(round(fs * 60.0 / MAX_BPM)))

    best = None
    for frac in (0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0, 1.5):
        peaks, _ = sps.find_peaks(x, height=envelope + frac * spread, distance=min_dist)
        if len(peaks) < 4:
            continue
        bpm = 60.0 / np.mean(np.diff(peaks) / fs)
        if not MIN_BPM <= bpm <= MAX_BPM:
            continue
        score = np.std(np.diff(peaks) / fs)
        if best is None or score < best[0]:
            best = (score, peaks)
    if best is None:
        raise NoBeatsDetected("no plausible beat rhythm at any threshold")
    return BeatSequence.from_peak_times(best[1] / fs)


def _moving_average(x, win):
    kernel = np.ones(win) / win
    pad = win // 2
    padded = np.concatenate([np.full(pad, x[0]), x, np.full(pad, x[-1])])
    return np.convolve(padded, kernel, mode="valid")[: len(x)]


def time_domain_stats(rr_ms: np.ndarray, diffs_ms: np.ndarray) -> dict:
    """The 12 closed-form time-domain / Poincare statistics.

    Raises DegenerateGeometry when the Poincare long axis collapses to zero
    (constant RR), because sd1/sd2 is then undefined.
    """
    rr = np.asarray(rr_ms, dtype=float)
    diffs = np.asarray(diffs_ms, dtype=float)
    if len(rr) < 3 or len(diffs) < 2:
        raise TooFewBeats("need >= 3 RR intervals and >= 2 successive differences")
    out = {}
    out["bpm"] = 60000.0 / np.mean(rr)
    out["ibi_ms"] = float(np.mean(rr))
    sdnn = float(np.std(rr))
    sdsd = float(np.std(diffs))
    out["sdnn_ms"] = sdnn
    out["sdsd_ms"] = sdsd
    out["rmssd_ms"] = float(np.sqrt(np.mean(diffs**2)))
    out["pnn20"] = float(np.mean(np.abs(diffs) > 20.0))
    out["pnn50"] = float(np.mean(np.abs(diffs) > 50.0))
    out["hr_mad_ms"] = float(np.median(np.abs(rr - np.median(rr))))
    sd1 = math.sqrt(0.5 * sdsd**2)
    sd2 = math.sqrt(max(0.0, 2.0 * sdnn**2 - 0.5 * sdsd**2))
    out["sd1_ms"] = sd1
    out["sd2_ms"] = sd2
    out["s_ms2"] = math.pi * sd1 * sd2
    if sd2 == 0.0:
        raise DegenerateGeometry("sd2 = 0; sd1/sd2 ratio undefined")
    out["sd1_sd2_ratio"] = sd1 / sd2
    return out


def breathing_rate(beats: BeatSequence, config: ExtractionConfig = DEFAULT_EXTRACTION) -> float:
    """Respiratory-sinus-arrhythmia peak of the RR tachogram spectrum.

    The tachogram is cubic-spline interpolated, resampled at 4 Hz, and the
    Welch-PSD argmax inside the breathing band is returned.
    """
    t = beats.peak_times_s[1 : len(beats.peak_times_s)]
    rr_full = np.diff(beats.peak_times_s) * 1000.0
    if len(rr_full) < 4:
        raise TooFewBeats("need >= 4 RR intervals for the tachogram")
    spline = CubicSpline(t, rr_full)
    rate = config.tachogram_rate_hz
    grid = np.arange(t[0], t[-1], 1.0 / rate)
    if len(grid) < 16:
        raise TooShort("tachogram too short for spectral estimation")
    tach = spline(grid)
    tach = tach - np.mean(tach)
    ts = TimeSeries(tach, rate, "tachogram")
    spec = dsp.welch_psd(ts, segment_len=min(len(grid), 256))
    lo, hi = config.breathing_band_hz
    return spec.peak_frequency(lo, hi)


def ppg_features(beats: BeatSequence, config: ExtractionConfig = DEFAULT_EXTRACTION) -> dict:
    """All 13 PPG features in canonical naming."""
    out = time_domain_stats(beats.rr_ms, beats.successive_diffs_ms)
    out["breathing_rate_hz"] = breathing_rate(beats, config)
    return {name: out[name] for name in PPG_FEATURES}


@dataclass(frozen=True)
class EdaDecomposition:
    tonic: TimeSeries
    phasic: TimeSeries
    scr_peaks: tuple  # of (time_s, amplitude_us)


def eda_decompose(series: TimeSeries, config: ExtractionConfig = DEFAULT_EXTRACTION) -> EdaDecomposition:
    """Split skin conductance into tonic level and phasic responses.

    Tonic is a zero-phase order-2 low-pass of the input; phasic is the
    residual. SCR peaks are phasic local maxima whose prominence within a
    short onset window exceeds the amplitude threshold and that sit at least
    the minimum separation apart. The local window rejects the slow recovery
    bumps left behind by the low-pass split, which rise over tens of seconds
    rather than the 1-3 s of a genuine response. Amplitude is onset-to-peak,
    with the onset at the preceding trough inside the window.
    """
    if series.duration_s < config.eda_min_duration_s:
        raise TooShort(f"need at least {config.eda_min_duration_s} s of EDA")
    tonic = dsp.lowpass(series, config.tonic_cutoff_hz, order=2)
    phasic_vals = series.values - tonic.values
    phasic = TimeSeries(phasic_vals, series.sampling_rate_hz, "eda_phasic")
    fs = series.sampling_rate_hz
    distance = max(1, int(round(config.scr_min_separation_s * fs)))
    wlen = max(3, int(round(2 * config.scr_onset_window_s * fs)))
    peaks, props = sps.find_peaks(
        phasic_vals,
        distance=distance,
        prominence=config.scr_min_amplitude_us,
        wlen=wlen,
    )
    scrs = []
    for p, onset in zip(peaks, props["left_bases"]):
        amplitude = float(phasic_vals[p] - phasic_vals[onset])
        scrs.append((p / fs, amplitude))
    return EdaDecomposition(tonic, phasic, tuple(scrs))


def eda_features(series: TimeSeries, config: ExtractionConfig = DEFAULT_EXTRACTION) -> dict:
    """The 6 EDA features in canonical naming."""
    decomp = eda_decompose(series, config)
    out = {}
    amplitudes = [a for _, a in decomp.scr_peaks]
    out["scr_peaks_n"] = float(len(amplitudes))
    out["scr_peaks_amplitude_mean_us"] = float(np.mean(amplitudes)) if amplitudes else 0.0
    out["eda_tonic_sd_us"] = float(np.std(decomp.tonic.values))

    slow = dsp.resample_fourier(series, config.sympathetic_rate_hz)
    centered = TimeSeries(slow.values - np.mean(slow.values), slow.sampling_rate_hz)
    spec = dsp.welch_psd(centered, segment_len=min(len(centered), 128))
    lo, hi = config.sympathetic_band_hz
    band = spec.band_power(lo, hi)
    total = spec.total_power()
    out["eda_sympathetic"] = band
    out["eda_sympathetic_n"] = band / total if total > 0 else 0.0

    lag = int(round(config.autocorr_lag_s * series.sampling_rate_hz))
    out["eda_autocorrelation"] = _lag_correlation(series.values, lag)
    return {name: out[name] for name in EDA_FEATURES}


def _lag_correlation(x, lag):
    """Pearson correlation of x[t] with x[t+lag]; 0 when undefined."""
    if lag <= 0 or lag >= len(x) - 1:
        return 0.0
    a, b = x[:-lag], x[lag:]
    sa, sb = np.std(a), np.std(b)
    if sa == 0 or sb == 0:
        return 0.0
    return float(np.mean((a - np.mean(a)) * (b - np.mean(b))) / (sa * sb))


def temp_features(thermopile: TimeSeries, reference: TimeSeries) -> dict:
    """The 5 temperature features: diff statistics plus the channel means.

    The difference signal is reference minus thermopile.
    """
    if len(thermopile) != len(reference):
        raise LengthMismatch("thermopile and reference lengths differ")
    if abs(thermopile.sampling_rate_hz - reference.sampling_rate_hz) > 1e-9:
        raise LengthMismatch("thermopile and reference rates differ")
    diff = reference.values - thermopile.values
    rate = thermopile.sampling_rate_hz
    out = {
        "temp_diff_mean_c": float(np.mean(diff)),
        "thermopile_mean_c": float(np.mean(thermopile.values)),
        "reference_mean_c": float(np.mean(reference.values)),
        "temp_gradient_mean_c_per_s": float(np.mean(np.gradient(diff, 1.0 / rate))),
    }
    centered = TimeSeries(diff - np.mean(diff), rate)
    spec = dsp.welch_psd(centered, segment_len=min(len(centered), 256))
    out["temp_psd_power"] = spec.total_power()
    return {name: out[name] for name in TEMP_FEATURES}


def _window_bounds(session: SessionRecord, window: str):
    if window == BASELINE:
        return 0.0, session.task_start_s
    if window == TASK:
        return session.task_start_s, session.task_end_s
    raise ValueError(f"unknown window {window!r}")


def extract_all(session: SessionRecord, window: str,
                config: ExtractionConfig = DEFAULT_EXTRACTION) -> FeatureVector:
    """Run the full per-channel chain for one window and assemble 24 features."""
    violations = validate_session(session)
    if violations:
        raise FeatureExtractionError("session", window, "; ".join(violations))
    start, end = _window_bounds(session, window)
    values = {}

    try:
        ppg = dsp.bandpass(session.ppg, *config.ppg_band_hz, order=config.ppg_filter_order)
        ppg = dsp.resample_fourier(ppg, config.ppg_resample_hz)
        ppg = dsp.segment(ppg, start, min(end, ppg.duration_s))
        beats = detect_ppg_peaks(ppg)
        values.update(ppg_features(beats, config))
    except Exception as exc:
        raise FeatureExtractionError("ppg", window, exc) from exc

    try:
        eda = dsp.resample_fourier(session.eda, config.eda_resample_hz)
        eda = dsp.segment(eda, start, min(end, eda.duration_s))
        eda = dsp.extend_to_minimum(eda, config.eda_min_duration_s)
        eda = dsp.lowpass(eda, config.eda_clean_cutoff_hz, order=2)
        values.update(eda_features(eda, config))
    except Exception as exc:
        raise FeatureExtractionError("eda", window, exc) from exc

    try:
        thermo = dsp.segment(session.thermopile, start, min(end, session.thermopile.duration_s))
        ref = dsp.segment(session.reference_temp, start, min(end, session.reference_temp.duration_s))
        n = min(len(thermo), len(ref))
        thermo = TimeSeries(thermo.values[:n], thermo.sampling_rate_hz, thermo.label)
        ref = TimeSeries(ref.values[:n], ref.sampling_rate_hz, ref.label)
        values.update(temp_features(thermo, ref))
    except Exception as exc:
        raise FeatureExtractionError("temperature", window, exc) from exc

    return FeatureVector.from_dict(values)
