"""Direct/reverberant separation of Ambisonics signals.

The direct sound is captured by an axis-symmetric beamformer steered at a
predetermined direction of arrival, spatialized back onto the spherical
harmonic channels with the bare SH pattern of that direction, and
subtracted channel-wise to leave the reverberant residual.

All three operations reduce to per-channel scalar weights and are applied
identically to time-domain streams and frequency-domain spectra.  They are
pure functions over immutable signals; evaluation order is fixed so results
are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spherical import Direction, num_channels, sh_vector


@dataclass(frozen=True)
class AmbisonicSignal:
    """Multichannel signal indexed by (order, degree) in ACN order.

    Parameters
    ----------
    data : ndarray, shape ((N+1)^2, T) or ((N+1)^2, F)
        Real samples (time domain) or complex spectra (frequency domain).
    sample_rate : float
        Sample rate in Hz.
    domain : str
        ``"time"`` or ``"freq"``.
    fft_len : int or None
        FFT length behind a frequency-domain signal (rfft bins).
    """

    data: np.ndarray
    sample_rate: float
    domain: str = "time"
    fft_len: int | None = None

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise ValueError("ambisonic data must have shape (channels, samples)")
        order = int(np.sqrt(data.shape[0])) - 1
        if num_channels(order) != data.shape[0]:
            raise ValueError(
                f"channel count {data.shape[0]} is not a square (N+1)^2"
            )
        if self.domain not in ("time", "freq"):
            raise ValueError(f"unknown signal domain {self.domain!r}")
        if self.domain == "freq" and self.fft_len is None:
            raise ValueError("frequency-domain signals need fft_len")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def order(self) -> int:
        return int(np.sqrt(self.data.shape[0])) - 1

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class BeamformedSignal:
    """Mono output of the steered beamformer."""

    data: np.ndarray
    doa: Direction
    sample_rate: float
    domain: str = "time"
    fft_len: int | None = None

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 1:
            raise ValueError("beamformed signal must be mono")
        if self.domain == "time" and not np.all(np.isfinite(data)):
            raise ValueError("beamformed signal must be finite")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)


def beamformer_norm(max_order: int) -> float:
    """Distortionless-response constant sum_n (2n+1)/(4*pi) = (N+1)^2/(4*pi)."""
    return num_channels(max_order) / (4.0 * np.pi)


def beamform(
    signal: AmbisonicSignal, doa: Direction, normalize: bool = True
) -> BeamformedSignal:
    """Steer the maximum-directivity axis-symmetric beamformer at ``doa``.

    Computes sum_nm A_nm Y_nm(doa); with ``normalize`` the output is divided
    by (N+1)^2/(4*pi) so a signal spatialized with the bare SH pattern of
    ``doa`` (see :func:`spatialize_direct`) is returned unchanged.
    """
    if signal.data.shape[1] == 0:
        raise ValueError("cannot beamform an empty signal")
    weights = sh_vector(signal.order, doa)
    out = weights @ signal.data
    if normalize:
        out = out / beamformer_norm(signal.order)
    return BeamformedSignal(
        out, doa, signal.sample_rate, signal.domain, signal.fft_len
    )


def spatialize_direct(bf: BeamformedSignal, max_order: int) -> AmbisonicSignal:
    """Spread a beamformed signal back over SH channels with its DOA pattern.

    Channel (n, m) carries ``bf`` scaled by Y_n^m(doa); no radial or
    per-order phase factors are applied.
    """
    pattern = sh_vector(max_order, bf.doa)
    return AmbisonicSignal(
        pattern[:, None] * bf.data[None, :],
        bf.sample_rate,
        bf.domain,
        bf.fft_len,
    )


def subtract_reverb(
    signal: AmbisonicSignal, spatialized: AmbisonicSignal
) -> AmbisonicSignal:
    """Channel-wise residual after removing the spatialized direct sound."""
    if signal.data.shape != spatialized.data.shape:
        raise ValueError(
            f"shape mismatch: {signal.data.shape} vs {spatialized.data.shape}"
        )
    if signal.sample_rate != spatialized.sample_rate or signal.domain != spatialized.domain:
        raise ValueError("signals must share sample rate and domain")
    return AmbisonicSignal(
        signal.data - spatialized.data,
        signal.sample_rate,
        signal.domain,
        signal.fft_len,
    )


def separate(
    signal: AmbisonicSignal, doa: Direction, normalize: bool = True
) -> tuple[BeamformedSignal, AmbisonicSignal]:
    """Beamform, spatialize and subtract in one step.

    Returns the beamformed direct signal and the reverberant residual; the
    residual plus the spatialized direct signal reassembles the input.
    """
    bf = beamform(signal, doa, normalize=normalize)
    residual = subtract_reverb(signal, spatialize_direct(bf, signal.order))
    return bf, residual
