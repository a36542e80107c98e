"""SWIPT parameterisation of the PS, TS and grid-powered AF protocols.

Link SNRs are computed from their closed forms with the symbol time
eliminated through the information rate.  The explicit amplifying gains are
kept separately (``amplifying_gain``) because the raw signal generator
needs them and because they give an independent route to the second-hop SNR.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import Geometry, NoiseModel, PathLossModel, path_loss
from .errors import DomainError

PROTOCOLS = ("ps", "ts", "grid")
MODULATIONS = ("dpsk", "fsk")


@dataclass(frozen=True)
class ProtocolConfig:
    kind: str
    modulation: str
    M: int
    K: int
    rate: float
    p0: float
    rho: Optional[float] = None
    alpha: Optional[float] = None
    eta: float = 0.6

    def __post_init__(self):
        if self.kind not in PROTOCOLS:
            raise DomainError(f"protocol must be one of {PROTOCOLS}, got {self.kind!r}")
        if self.modulation not in MODULATIONS:
            raise DomainError(f"modulation must be one of {MODULATIONS}, got {self.modulation!r}")
        M = int(self.M)
        if M != self.M or M < 2 or M & (M - 1):
            raise DomainError("M must be a power of two, at least 2")
        if int(self.K) != self.K or self.K < 0:
            raise DomainError("K must be a nonnegative integer")
        if not (np.isfinite(self.rate) and self.rate > 0):
            raise DomainError("rate must be positive")
        if not (np.isfinite(self.p0) and self.p0 >= 0):
            raise DomainError("p0 must be nonnegative")
        if not (0 < self.eta <= 1):
            raise DomainError("eta must lie in (0, 1]")
        if self.kind == "ps" and (self.rho is None or not 0 < self.rho < 1):
            raise DomainError("PS needs 0 < rho < 1")
        if self.kind == "ts" and (self.alpha is None or not 0 < self.alpha < 1):
            raise DomainError("TS needs 0 < alpha < 1")

    @property
    def xi(self) -> int:
        return 1 if self.modulation == "dpsk" else self.M

    @property
    def bits(self) -> float:
        return float(np.log2(self.M))


@dataclass(frozen=True)
class LinkBudget:
    """Derived per-scenario link quantities; relay entries have shape (K,)."""

    gamma_sd: float
    gamma_sr: np.ndarray
    gamma_rd: np.ndarray
    sigma_sd_sq: float
    sigma_sr_sq: np.ndarray
    sigma_rd_sq: np.ndarray
    xi: int
    M: int
    modulation: str

    @property
    def K(self) -> int:
        return self.gamma_sr.shape[0]

    def clamped(self, gamma: float) -> "LinkBudget":
        """Copy with every link SNR replaced by ``gamma`` (diagnostics)."""
        K = self.K
        return LinkBudget(float(gamma), np.full(K, float(gamma)), np.full(K, float(gamma)),
                          self.sigma_sd_sq, self.sigma_sr_sq, self.sigma_rd_sq, self.xi, self.M,
                          self.modulation)


@dataclass(frozen=True)
class SymbolTiming:
    """Symbol time implied by the rate under unit block time."""

    ts: float
    ts_ratio_to_ps: float


def source_power(config: ProtocolConfig) -> float:
    """Transmit power of the source during its ID sub-block."""
    return config.p0 / (config.K + 1) if config.kind == "grid" else config.p0


def harvested_power(config: ProtocolConfig, pathloss_sr):
    """Average relay transmit power; the grid baseline gets a fixed P0/(K+1)."""
    L = np.asarray(pathloss_sr, dtype=float)
    if config.kind == "ps":
        P = config.eta * config.rho * config.p0 * L
    elif config.kind == "ts":
        a = config.alpha
        P = (config.K + 1) * config.eta * config.p0 * L * a / (1.0 - a)
    else:
        P = np.full_like(L, config.p0 / (config.K + 1))
    return float(P) if P.ndim == 0 else P


def effective_noise(config: ProtocolConfig, noise: NoiseModel):
    """(sigma_sd^2, sigma_sr^2, sigma_rd^2) after power splitting."""
    full = noise.antenna + noise.circuit
    if config.kind == "ps":
        sr = (1.0 - config.rho) * noise.antenna + noise.circuit
    else:
        sr = full
    return full, sr, full


def info_rate_check(config: ProtocolConfig) -> SymbolTiming:
    ps_ts = config.bits / ((config.K + 1) * config.rate)
    if config.kind == "ts":
        ratio = 1.0 - config.alpha
    else:
        ratio = 1.0
    ts = ratio * ps_ts
    if not (np.isfinite(ts) and ts > 0):
        raise DomainError("rate implies a non-positive symbol time")
    return SymbolTiming(ts, ratio)


def link_budget(config: ProtocolConfig, geometry: Geometry, pathloss: PathLossModel,
                noise: NoiseModel) -> LinkBudget:
    if geometry.K != config.K:
        raise DomainError(f"geometry has {geometry.K} relays, config has K={config.K}")
    info_rate_check(config)
    K1, R, b, xi, eta, P0 = config.K + 1, config.rate, config.bits, config.xi, config.eta, config.p0
    L_sd = path_loss(pathloss, geometry.d_sd)
    L_sr = np.atleast_1d(path_loss(pathloss, np.array(geometry.d_sr))) if config.K else np.zeros(0)
    L_rd = np.atleast_1d(path_loss(pathloss, np.array(geometry.d_rd))) if config.K else np.zeros(0)
    s_sd, s_sr, s_rd = effective_noise(config, noise)

    if config.kind == "ps":
        rho = config.rho
        g_sd = P0 * L_sd * b / (K1 * s_sd * R)
        g_sr = (1 - rho) * P0 * L_sr * b / (K1 * s_sr * R)
        g_rd = rho * eta * P0 * L_sr * L_rd * b / (((1 - rho) * P0 * L_sr * b + K1 * s_sr * R * xi) * s_rd)
    elif config.kind == "ts":
        a = config.alpha
        g_sd = (1 - a) * P0 * L_sd * b / (K1 * s_sd * R)
        g_sr = (1 - a) * P0 * L_sr * b / (K1 * s_sr * R)
        g_rd = K1 * a * eta * P0 * L_sr * L_rd * b / (((1 - a) * P0 * L_sr * b + K1 * s_sr * R * xi) * s_rd)
    else:
        # every terminal, source included, transmits with P0/(K+1)
        P = P0 / K1
        g_sd = P * L_sd * b / (K1 * s_sd * R)
        g_sr = P * L_sr * b / (K1 * s_sr * R)
        g_rd = P * L_rd * b / ((P * L_sr * b + K1 * s_sr * R * xi) * s_rd)

    K = config.K
    return LinkBudget(
        gamma_sd=float(g_sd),
        gamma_sr=np.broadcast_to(np.asarray(g_sr, dtype=float), (K,)).copy(),
        gamma_rd=np.broadcast_to(np.asarray(g_rd, dtype=float), (K,)).copy(),
        sigma_sd_sq=float(s_sd),
        sigma_sr_sq=np.full(K, s_sr),
        sigma_rd_sq=np.full(K, s_rd),
        xi=xi,
        M=config.M,
        modulation=config.modulation,
    )


def amplifying_gain(config: ProtocolConfig, pathloss_sr, noise: NoiseModel):
    """Relay gain that holds the relay's average transmit power at its budget.

    Written per protocol with the split noises and an explicit symbol time,
    independent of the unified SNR expressions.
    """
    L = np.asarray(pathloss_sr, dtype=float)
    Ts = info_rate_check(config).ts
    P0, eta, M = config.p0, config.eta, config.M
    n1, n2 = noise.antenna, noise.circuit
    fsk = config.modulation == "fsk"
    if config.kind == "ps":
        rho = config.rho
        noise_term = (1 - rho) * n1 + n2
        if fsk:
            noise_term = M * noise_term
        G2 = eta * rho * P0 * Ts * L / ((1 - rho) * P0 * Ts * L + noise_term)
    elif config.kind == "ts":
        a, K1 = config.alpha, config.K + 1
        if fsk:
            G2 = K1 * eta * P0 * Ts * L * a / ((1 - a) * (P0 * Ts * L + M * (n1 + n2)))
        else:
            G2 = K1 * eta * P0 * Ts * L * a / ((1 - a) * (P0 * Ts * L + n1 + n2))
    else:
        P = config.p0 / (config.K + 1)
        noise_term = (M if fsk else 1) * (n1 + n2)
        G2 = P * Ts / (P * Ts * L + noise_term)
    G = np.sqrt(G2)
    return float(G) if G.ndim == 0 else G
