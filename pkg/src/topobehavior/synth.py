"""Synthetic time series: periodic toys and labeled posture corpora.

Everything here is deterministic under a fixed seed so corpora and the
artifacts derived from them are reproducible bit-exactly.

The four posture classes are traveling body waves with fixed parameters
(see ``CLASS_PARAMS``); increasing class id means lower wave amplitude, more
harmonic content, and more frequent switching between forward and backward
propagation, so higher classes produce smaller dominant loops but more of
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .ingest import TimeSeries

_KINDS = ("sine", "figure_eight", "posture_class", "composite")


def _rng_for(seed, *stream):
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + stream))


def _require_seed(noise: float, seed) -> None:
    if noise > 0 and seed is None:
        raise ConfigError("noisy generation is stochastic; a seed is required")


def gen_sine(
    n: int,
    period: float,
    amplitude: float = 1.0,
    noise: float = 0.0,
    seed: int | None = None,
) -> TimeSeries:
    """One-dimensional sampled sine wave x_t = A sin(2 pi t / period) + noise.

    ``period`` is in samples and must be at least 4 so a full oscillation is
    visible to a short sliding window.
    """
    if n < 1:
        raise ConfigError(f"need at least one sample, got {n}")
    if period < 4:
        raise ConfigError(f"period must be at least 4 samples, got {period}")
    if noise < 0:
        raise ConfigError(f"noise must be non-negative, got {noise}")
    _require_seed(noise, seed)
    t = np.arange(n, dtype=np.float64)
    x = amplitude * np.sin(2.0 * np.pi * t / period)
    if noise > 0:
        x = x + noise * _rng_for(seed).normal(size=n)
    return TimeSeries(x[:, None], sample_id=f"sine-p{period:g}-n{n}")


def gen_figure_eight(
    n: int,
    noise: float = 0.0,
    seed: int | None = None,
    periods: int = 1,
) -> TimeSeries:
    """Planar lemniscate traversal (sin t, sin t cos t), sampled uniformly.

    The path self-intersects at the origin, so the raw planar cloud carries
    two loops. With ``periods`` > 1 the same curve is traversed repeatedly.
    The zero-noise cloud is symmetric about both axes, which makes the two
    loops' persistence pairs exactly equal.
    """
    if n < 16:
        raise ConfigError(f"need at least 16 samples to resolve both lobes, got {n}")
    if periods < 1:
        raise ConfigError(f"periods must be positive, got {periods}")
    if noise < 0:
        raise ConfigError(f"noise must be non-negative, got {noise}")
    _require_seed(noise, seed)
    t = 2.0 * np.pi * periods * np.arange(n, dtype=np.float64) / n
    xy = np.c_[np.sin(t), np.sin(t) * np.cos(t)]
    if noise > 0:
        xy = xy + noise * _rng_for(seed).normal(size=xy.shape)
    return TimeSeries(xy, sample_id=f"figure-eight-n{n}-p{periods}")


@dataclass(frozen=True)
class ClassParams:
    """Fixed generation constants for one synthetic posture class."""

    amplitude: float
    harmonics: tuple[float, ...]  # relative amplitude per overtone of the wave
    cycles_per_frame: float  # base temporal frequency
    body_waves: float  # spatial wavenumber along the posture vector
    switches: int  # direction reversals per recording
    noise: float


CLASS_PARAMS: dict[int, ClassParams] = {
    1: ClassParams(1.00, (1.0,), 1 / 24, 1.5, 0, 0.010),
    2: ClassParams(0.80, (1.0, 0.40), 1 / 26, 1.5, 1, 0.015),
    3: ClassParams(0.60, (1.0, 0.45, 0.25), 1 / 28, 1.5, 2, 0.020),
    4: ClassParams(0.40, (1.0, 0.50, 0.30), 1 / 30, 1.5, 4, 0.025),
}


def _travelling_wave(params: ClassParams, n_frames: int, dim: int, rng) -> np.ndarray:
    # phase advances frame by frame; sign flips at the switch points, which
    # are drawn away from the ends so every regime lasts a while
    direction = np.ones(n_frames)
    if params.switches:
        cuts = rng.integers(n_frames // 6, 5 * n_frames // 6, params.switches)
        for c in np.sort(cuts):
            direction[c:] *= -1.0
    phase = 2.0 * np.pi * params.cycles_per_frame * np.cumsum(direction)
    body = 2.0 * np.pi * params.body_waves * np.arange(dim) / dim
    frames = np.zeros((n_frames, dim))
    for h, rel in enumerate(params.harmonics, start=1):
        psi = rng.uniform(0.0, 2.0 * np.pi)
        frames += (
            params.amplitude
            * rel
            * np.sin(h * (phase[:, None] - body[None, :]) + psi)
        )
    frames += params.noise * rng.normal(size=frames.shape)
    return frames


def gen_posture_class(
    class_id: int,
    n_samples: int,
    n_frames: int,
    dim: int = 100,
    seed: int | None = None,
) -> list[TimeSeries]:
    """Generate labeled posture recordings for one synthetic class.

    Each sample is an independent draw of a traveling body wave with the
    fixed per-class constants in ``CLASS_PARAMS``: class 1 is a large clean
    wave, class 4 a small multi-harmonic wave that keeps reversing direction.
    Labels are ``"class<k>"``.
    """
    if class_id not in CLASS_PARAMS:
        raise ConfigError(
            f"class_id must be one of {sorted(CLASS_PARAMS)}, got {class_id}"
        )
    if n_samples < 1 or n_frames < 2 or dim < 1:
        raise ConfigError(
            f"need n_samples >= 1, n_frames >= 2, dim >= 1; "
            f"got {n_samples}, {n_frames}, {dim}"
        )
    if seed is None:
        raise ConfigError("corpus generation is stochastic; a seed is required")
    params = CLASS_PARAMS[class_id]
    label = f"class{class_id}"
    out = []
    for k in range(n_samples):
        rng = _rng_for(seed, class_id, k)
        frames = _travelling_wave(params, n_frames, dim, rng)
        out.append(
            TimeSeries(
                frames,
                label=label,
                sample_id=f"{label}-s{k:02d}",
            )
        )
    return out


def gen_composite(
    n_segment: int = 80,
    dim: int = 8,
    noise: float = 0.12,
    pause_amplitude: float = 0.35,
    seed: int | None = None,
) -> TimeSeries:
    """Forward / backward / pause / backward composite recording.

    Four consecutive regimes of ``n_segment`` frames each: a forward
    traveling wave, the same wave run backward, a pause in which the wave
    collapses to ``pause_amplitude`` and its phase creeps slowly, and
    full-amplitude backward crawling again.

    The raw point cloud is blind to traversal speed and direction, so it
    shows the posture cycle plus the pause's inner amplitude wedge. A
    sliding-window embedding also separates the forward from the backward
    traversal (their windows are time-reversed) and pulls the slow pause
    into its own detour, for exactly one more significant loop than the raw
    cloud at the default settings.
    """
    if n_segment < 24:
        raise ConfigError(f"segments need at least 24 frames, got {n_segment}")
    if dim < 2:
        raise ConfigError(f"need at least 2 posture coordinates, got {dim}")
    if not 0 < pause_amplitude < 1:
        raise ConfigError(
            f"pause_amplitude must lie strictly between 0 and 1, got {pause_amplitude}"
        )
    if noise < 0:
        raise ConfigError(f"noise must be non-negative, got {noise}")
    _require_seed(noise, seed)
    omega = 2.0 * np.pi / 40.0  # one wave cycle per 40 frames
    creep = 0.15  # phase keeps moving at 15% speed during the pause
    ramp = n_segment // 8  # frames to fade the amplitude in and out
    rate = np.concatenate(
        [
            np.full(n_segment, omega),  # forward
            np.full(n_segment, -omega),  # backward
            np.full(n_segment, -creep * omega),  # pause
            np.full(n_segment, -omega),  # backward again
        ]
    )
    envelope = np.ones(4 * n_segment)
    fade = np.linspace(1.0, pause_amplitude, ramp)
    envelope[2 * n_segment : 2 * n_segment + ramp] = fade
    envelope[2 * n_segment + ramp : 3 * n_segment - ramp] = pause_amplitude
    envelope[3 * n_segment - ramp : 3 * n_segment] = fade[::-1]
    phase = np.cumsum(rate)
    body = 2.0 * np.pi * 1.5 * np.arange(dim) / dim
    frames = envelope[:, None] * np.sin(phase[:, None] - body[None, :])
    if noise > 0:
        frames = frames + noise * _rng_for(seed).normal(size=frames.shape)
    return TimeSeries(frames, sample_id=f"composite-n{4 * n_segment}")


@dataclass(frozen=True)
class SynthSpec:
    """A named generator plus its keyword parameters and seed.

    ``params`` holds the generator's own arguments (n, period, noise_sigma,
    class_id, ...); the seed is kept separate so callers can re-seed a spec
    without touching the shape parameters.
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"kind must be one of {_KINDS}, got {self.kind!r}")

    def generate(self) -> TimeSeries | list[TimeSeries]:
        """Run the generator; a ``posture_class`` spec yields a sample list."""
        fn = {
            "sine": gen_sine,
            "figure_eight": gen_figure_eight,
            "posture_class": gen_posture_class,
            "composite": gen_composite,
        }[self.kind]
        try:
            return fn(seed=self.seed, **self.params)
        except TypeError as exc:
            raise ConfigError(f"bad parameters for {self.kind}: {exc}") from None
