"""Line-network geometry, path loss, Rayleigh fading and the two-stage noise model."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Geometry:
    """Relays on the straight source-destination line.

    ``d_sr`` lists the source-relay distance of every relay; the
    relay-destination distance follows as d_sd - d_sr.
    """

    d_sd: float
    d_sr: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "d_sr", tuple(float(d) for d in self.d_sr))
        if not (np.isfinite(self.d_sd) and self.d_sd > 0):
            raise DomainError("d_sd must be positive")
        for d in self.d_sr:
            if not (0 < d < self.d_sd):
                raise DomainError(f"relay distance {d} must lie strictly between 0 and d_sd={self.d_sd}")

    @property
    def K(self) -> int:
        return len(self.d_sr)

    @property
    def d_rd(self) -> tuple:
        return tuple(self.d_sd - d for d in self.d_sr)


@dataclass(frozen=True)
class PathLossModel:
    """``bounded``: 1/(1+d^exp).  ``indoor``: same law minus a partition loss in dB."""

    kind: str = "bounded"
    exponent: float = 4.0
    partition_loss_db: float = 3.4

    def __post_init__(self):
        if self.kind not in ("bounded", "indoor"):
            raise DomainError(f"unknown path-loss model {self.kind!r}")
        if not (self.exponent > 0):
            raise DomainError("path-loss exponent must be positive")


def path_loss(model: PathLossModel, d):
    """Linear power gain at distance ``d`` (scalar or array)."""
    d = np.asarray(d, dtype=float)
    if np.any(~np.isfinite(d)) or np.any(d <= 0):
        raise DomainError("distance must be positive")
    gain = 1.0 / (1.0 + d ** model.exponent)
    if model.kind == "indoor":
        gain = gain * 10.0 ** (-model.partition_loss_db / 10.0)
    return float(gain) if gain.ndim == 0 else gain


@dataclass(frozen=True)
class NoiseModel:
    """Per-node noise of total variance ``sigma0sq``; ``split`` goes to the antenna stage."""

    sigma0sq: float = 1.0
    split: float = 0.5

    def __post_init__(self):
        if not (self.sigma0sq > 0):
            raise DomainError("sigma0sq must be positive")
        if not (0 < self.split < 1):
            raise DomainError("split must lie in (0, 1)")

    @property
    def antenna(self) -> float:
        return self.split * self.sigma0sq

    @property
    def circuit(self) -> float:
        return (1.0 - self.split) * self.sigma0sq


@dataclass(frozen=True)
class FadingDraw:
    """Block-fading coefficients for n independent blocks.

    Shapes: h_sd (n,), h_sr (n, K), h_rd (n, K).
    """

    h_sd: np.ndarray
    h_sr: np.ndarray
    h_rd: np.ndarray

    @property
    def n(self) -> int:
        return self.h_sd.shape[0]


def cscg(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with variance ``var``."""
    shape = (shape,) if np.ndim(shape) == 0 else tuple(shape)
    z = rng.standard_normal((*shape, 2))
    return np.sqrt(var / 2.0) * (z[..., 0] + 1j * z[..., 1])


def draw_fading(geometry: Geometry, rng: np.random.Generator, n: int = 1) -> FadingDraw:
    """Draw 2K+1 unit-variance Rayleigh coefficients for each of ``n`` blocks."""
    K = geometry.K
    return FadingDraw(cscg(rng, (n,)), cscg(rng, (n, K)), cscg(rng, (n, K)))

