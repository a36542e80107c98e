"""Modulation and destination observations.

All generators are batched: ``m`` is an integer array of n hypotheses and
each block field carries a leading axis of length n.  Relay observations are
stacked along axis 1 (one row per relay).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import FadingDraw, Geometry, NoiseModel, PathLossModel, cscg, path_loss
from .errors import ContractError, DomainError
from .protocol import LinkBudget, ProtocolConfig, amplifying_gain, info_rate_check, source_power


@dataclass(frozen=True)
class DpskBlock:
    """y_sd: (n, 2) with columns [l-1, l]; y_rd: (n, K, 2)."""

    y_sd: np.ndarray
    y_rd: np.ndarray


@dataclass(frozen=True)
class FskBlock:
    """y_sd: (n, M); y_rd: (n, K, M)."""

    y_sd: np.ndarray
    y_rd: np.ndarray


def dpsk_encode(m, s_prev, M: int):
    """Differentially encode message(s) ``m`` onto the previous symbol."""
    m = np.asarray(m)
    if np.any(m < 0) or np.any(m >= M) or np.any(m != np.floor(m)):
        raise DomainError(f"message must be an integer in [0, {M - 1}]")
    s_prev = np.asarray(s_prev, dtype=complex)
    if not np.allclose(np.abs(s_prev), 1.0):
        raise DomainError("previous symbol must have unit modulus")
    out = s_prev * np.exp(2j * np.pi * m / M)
    return complex(out) if out.ndim == 0 else out


def _check_messages(m, M):
    m = np.atleast_1d(np.asarray(m))
    if m.ndim != 1 or np.any(m < 0) or np.any(m >= M):
        raise DomainError(f"messages must be a 1-D array of integers in [0, {M - 1}]")
    return m.astype(np.int64)


def _dpsk_pairs(m, M, rng, s_prev):
    n = m.size
    if s_prev is None:
        s_prev = np.exp(2j * np.pi * rng.integers(0, M, n) / M)
    s_prev = np.broadcast_to(np.asarray(s_prev, dtype=complex), (n,))
    return np.stack([s_prev, dpsk_encode(m, s_prev, M)], axis=1)


def _tones(m, M):
    return np.eye(M)[m].astype(complex)


def _check_fading(fading: FadingDraw, n: int, K: int):
    if fading.h_sd.shape != (n,) or fading.h_sr.shape != (n, K) or fading.h_rd.shape != (n, K):
        raise ContractError("fading draw does not match the number of blocks or relays")


def _unified(x, budget: LinkBudget, fading: FadingDraw, rng):
    """Apply the unified direct/relayed model to transmitted vectors ``x`` (n, L)."""
    n, L = x.shape
    K = budget.K
    _check_fading(fading, n, K)
    s_sd = np.sqrt(budget.sigma_sd_sq)
    y_sd = s_sd * (np.sqrt(budget.gamma_sd) * fading.h_sd[:, None] * x + cscg(rng, (n, L)))
    s_sr = np.sqrt(budget.sigma_sr_sq)[None, :, None]
    s_rd = np.sqrt(budget.sigma_rd_sq)[None, :, None]
    g_sr = budget.gamma_sr[None, :, None]
    g_rd = budget.gamma_rd[None, :, None]
    h_sr = fading.h_sr[:, :, None]
    h_rd = fading.h_rd[:, :, None]
    n_sr = cscg(rng, (n, K, L))
    n_rd = cscg(rng, (n, K, L))
    y_rd = (s_sr * s_rd * np.sqrt(g_sr * g_rd) * h_sr * h_rd * x[:, None, :]
            + s_sr * s_rd * np.sqrt(g_rd) * h_rd * n_sr
            + s_rd * n_rd)
    return y_sd, y_rd


def generate_block_dpsk(m, budget: LinkBudget, fading: FadingDraw, rng: np.random.Generator,
                        s_prev=None) -> DpskBlock:
    """Observations of the symbol pair carrying ``m``.

    ``s_prev`` defaults to a reference symbol drawn uniformly from the
    constellation for every block.
    """
    m = _check_messages(m, budget.M)
    x = _dpsk_pairs(m, budget.M, rng, s_prev)
    return DpskBlock(*_unified(x, budget, fading, rng))


def generate_block_fsk(m, budget: LinkBudget, fading: FadingDraw, rng: np.random.Generator) -> FskBlock:
    m = _check_messages(m, budget.M)
    return FskBlock(*_unified(_tones(m, budget.M), budget, fading, rng))


def generate_block_raw(m, config: ProtocolConfig, geometry: Geometry, pathloss: PathLossModel,
                       noise: NoiseModel, fading: FadingDraw, rng: np.random.Generator,
                       s_prev=None, return_relay_tx: bool = False):
    """Observations from the per-protocol signal equations.

    Uses the explicit symbol time, amplifying gain and separate antenna /
    circuit noises rather than the unified SNR parameterisation.  With
    ``return_relay_tx`` the relay transmit signals G_r y_0r (n, K, L) are
    returned as well.
    """
    M = config.M
    m = _check_messages(m, M)
    n, K = m.size, config.K
    _check_fading(fading, n, K)
    x = _dpsk_pairs(m, M, rng, s_prev) if config.modulation == "dpsk" else _tones(m, M)
    L = x.shape[1]
    Ts = info_rate_check(config).ts
    Ps = source_power(config)
    split = 1.0 - config.rho if config.kind == "ps" else 1.0
    a1, a2 = noise.antenna, noise.circuit
    L_sd = path_loss(pathloss, geometry.d_sd)

    y_sd = (np.sqrt(Ps * Ts * L_sd) * fading.h_sd[:, None] * x
            + cscg(rng, (n, L), a1) + cscg(rng, (n, L), a2))
    if K:
        L_sr = np.atleast_1d(path_loss(pathloss, np.array(geometry.d_sr)))[None, :, None]
        L_rd = np.atleast_1d(path_loss(pathloss, np.array(geometry.d_rd)))[None, :, None]
        G = np.atleast_1d(amplifying_gain(config, L_sr[0, :, 0], noise))[None, :, None]
    else:
        L_sr = L_rd = G = np.zeros((1, 0, 1))
    u_sr = cscg(rng, (n, K, L), a1)
    v_sr = cscg(rng, (n, K, L), a2)
    y_sr = (np.sqrt(split * Ps * Ts * L_sr) * fading.h_sr[:, :, None] * x[:, None, :]
            + np.sqrt(split) * u_sr + v_sr)
    relay_tx = G * y_sr
    y_rd = (np.sqrt(L_rd) * fading.h_rd[:, :, None] * relay_tx
            + cscg(rng, (n, K, L), a1) + cscg(rng, (n, K, L), a2))
    block = DpskBlock(y_sd, y_rd) if config.modulation == "dpsk" else FskBlock(y_sd, y_rd)
    if return_relay_tx:
        return block, relay_tx
    return block
