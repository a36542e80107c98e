"""Noncoherent ML and Gauss-Legendre detectors for M-DPSK and M-FSK.

Metrics drop every hypothesis-independent constant, so values are only
comparable between hypotheses of the same block.  ``np.argmax`` returns the
first maximiser, which breaks ties toward the smallest message index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError
from .numerics import DEFAULT_TOL, IntegralArgs, log_integral_I
from .protocol import LinkBudget
from .transceiver import DpskBlock, FskBlock


@dataclass(frozen=True)
class DetectorKind:
    family: str = "gld"
    integration_tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.family not in ("mld", "gld"):
            raise DomainError(f"detector family must be 'mld' or 'gld', got {self.family!r}")
        if not (0 < self.integration_tol <= 1e-6):
            raise DomainError("integration_tol must lie in (0, 1e-6]")

    @property
    def mode(self) -> str:
        return "exact" if self.family == "mld" else "gl5"


MLD = DetectorKind("mld")
GLD = DetectorKind("gld")


def _check(block, budget: LinkBudget, width: int):
    y_sd, y_rd = np.asarray(block.y_sd), np.asarray(block.y_rd)
    if y_sd.ndim != 2 or y_sd.shape[1] != width:
        raise ContractError(f"direct observation must have shape (n, {width}), got {y_sd.shape}")
    if y_rd.shape != (y_sd.shape[0], budget.K, width):
        raise ContractError(f"relay observations must have shape {(y_sd.shape[0], budget.K, width)}, got {y_rd.shape}")
    return y_sd, y_rd


def _relay_terms(beta1, beta2, eps1, eps2, lam, kind):
    # beta arrays (n, K, M); eps arrays (K,)
    args = IntegralArgs(eps1[None, :, None], eps2[None, :, None], beta1, beta2, lam)
    return log_integral_I(args, kind.mode, kind.integration_tol).sum(axis=1)


def dpsk_metrics(block: DpskBlock, budget: LinkBudget, kind: DetectorKind = GLD) -> np.ndarray:
    """Per-hypothesis log-likelihoods, shape (n, M)."""
    M = budget.M
    y_sd, y_rd = _check(block, budget, 2)
    rot = np.exp(2j * np.pi * np.arange(M) / M)
    g = budget.gamma_sd
    corr = y_sd[:, 0] * np.conj(y_sd[:, 1])
    metric = (2 * g / (1 + 2 * g)) * np.real(corr[:, None] * rot[None, :]) / budget.sigma_sd_sq
    if budget.K:
        prev = y_rd[:, :, 0, None] * rot[None, None, :]
        cur = y_rd[:, :, 1, None]
        two_s = 2.0 * budget.sigma_rd_sq[None, :, None]
        beta1 = np.abs(cur - prev) ** 2 / two_s
        beta2 = np.abs(cur + prev) ** 2 / two_s
        eps1 = budget.sigma_sr_sq * budget.gamma_rd
        eps2 = (1 + 2 * budget.gamma_sr) * eps1
        metric = metric + _relay_terms(beta1, beta2, eps1, eps2, 1.0, kind)
    return metric


def fsk_metrics(block: FskBlock, budget: LinkBudget, kind: DetectorKind = GLD) -> np.ndarray:
    """Per-hypothesis log-likelihoods, shape (n, M)."""
    M = budget.M
    y_sd, y_rd = _check(block, budget, M)
    g = budget.gamma_sd
    metric = (g / (1 + g)) * np.abs(y_sd) ** 2 / budget.sigma_sd_sq
    if budget.K:
        tone = np.abs(y_rd) ** 2
        s_rd = budget.sigma_rd_sq[None, :, None]
        beta2 = tone / s_rd
        beta1 = np.maximum(tone.sum(axis=2, keepdims=True) - tone, 0.0) / s_rd
        eps1 = budget.sigma_sr_sq * budget.gamma_rd
        eps2 = (1 + budget.gamma_sr) * eps1
        metric = metric + _relay_terms(beta1, beta2, eps1, eps2, M - 1.0, kind)
    return metric


def detect_dpsk(block: DpskBlock, budget: LinkBudget, kind: DetectorKind = GLD) -> np.ndarray:
    return np.argmax(dpsk_metrics(block, budget, kind), axis=1)


def detect_fsk(block: FskBlock, budget: LinkBudget, kind: DetectorKind = GLD) -> np.ndarray:
    return np.argmax(fsk_metrics(block, budget, kind), axis=1)


def detect(block, budget: LinkBudget, kind: DetectorKind = GLD) -> np.ndarray:
    if isinstance(block, DpskBlock):
        return detect_dpsk(block, budget, kind)
    if isinstance(block, FskBlock):
        return detect_fsk(block, budget, kind)
    raise ContractError(f"unsupported block type {type(block).__name__}")
