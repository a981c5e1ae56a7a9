"""Instantaneous SINR and mutual information of the two transmission phases.

Phase I is the full-duplex AF round: the destination sees the direct copy and
the relayed copy delayed by ``tau`` channel uses, which after cyclic-prefix
removal turns into a per-tone SINR with a cosine ripple across the ``T`` tones.
Phase III is the retransmission, maximum-ratio combined with the stored Phase-I
signal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import ChannelDraw, LinkSnrs
from .config import SystemParams, amplification_factor, relay_interference


REDRAW_POLICIES = ("reuse", "fresh", "mixed")


class Retransmitter(enum.Enum):
    NONE = "none"
    RELAY = "relay"
    SOURCE = "source"


@dataclass(frozen=True)
class PhaseISinr:
    rho_i: np.ndarray | float
    mu_abs: np.ndarray | float
    theta: np.ndarray | float


@dataclass(frozen=True)
class PhaseIIISinr:
    rho_iii: np.ndarray | float
    retransmitter: Retransmitter


def _phase1_denominator(params: SystemParams, beta, h_rd):
    return beta**2 * np.abs(h_rd) ** 2 * relay_interference(params) + params.n_d


def tone_phases(params: SystemParams) -> np.ndarray:
    """2πiτ/T for i = 0..T-1."""
    i = np.arange(params.t_codewords)
    return 2.0 * np.pi * i * params.tau / params.t_codewords


def per_tone_sinr(params: SystemParams, d: ChannelDraw, tone_index):
    """SINR of tone ``tone_index`` computed from the frequency-domain gain λ_i.

    ``tone_index`` may be an array; draws broadcast against it.
    """
    beta = amplification_factor(params, np.abs(d.h_sr) ** 2)
    phase = 2.0 * np.pi * np.asarray(tone_index) * params.tau / params.t_codewords
    sqrt_ps = np.sqrt(params.p_s)
    lam = sqrt_ps * d.h_sd + beta * sqrt_ps * d.h_rd * d.h_sr * np.exp(-1j * phase)
    return np.abs(lam) ** 2 / _phase1_denominator(params, beta, d.h_rd)


def per_tone_sinrs(params: SystemParams, d: ChannelDraw) -> np.ndarray:
    """All ``T`` tone SINRs, tones along the last axis."""
    expand = lambda h: np.asarray(h)[..., None]
    d = ChannelDraw(*(expand(h) for h in (d.h_sd, d.h_sr, d.h_rd, d.h_sd_iii, d.h_rd_iii)))
    return per_tone_sinr(params, d, np.arange(params.t_codewords))


def phase1_sinr(params: SystemParams, d: ChannelDraw) -> PhaseISinr:
    h_sr_sq = np.abs(d.h_sr) ** 2
    beta = amplification_factor(params, h_sr_sq)
    den = _phase1_denominator(params, beta, d.h_rd)
    num = params.p_s * np.abs(d.h_sd) ** 2 + beta**2 * params.p_s * h_sr_sq * np.abs(d.h_rd) ** 2
    mu = beta * params.p_s * np.abs(d.h_sd * d.h_rd * d.h_sr) / den
    theta = np.angle(d.h_sd * np.conj(d.h_rd * d.h_sr))
    return PhaseISinr(num / den, mu, theta)


def per_tone_from_phase1(params: SystemParams, s: PhaseISinr, tone_index):
    """The same tone SINR, written as ρ_I + 2|μ_I| cos(2πiτ/T + θ)."""
    phase = 2.0 * np.pi * np.asarray(tone_index) * params.tau / params.t_codewords
    return s.rho_i + 2.0 * s.mu_abs * np.cos(phase + s.theta)


def rho_i_from_links(snrs: LinkSnrs):
    """Phase-I SINR in terms of the three link SINRs.

    >>> rho_i_from_links(LinkSnrs(g_sd=1.0, g_sr=2.0, g_rd=3.0, theta=0.0))
    1.5
    """
    g_sd, g_sr, g_rd = snrs.g_sd, snrs.g_sr, snrs.g_rd
    return (g_sr * g_rd + g_sd * g_sr + g_sd) / (1.0 + g_sr + g_rd)


def mutual_info_exact(params: SystemParams, d: ChannelDraw):
    """Bits per channel use, counting the ``tau`` cyclic-prefix uses."""
    g = per_tone_sinrs(params, d)
    return np.sum(np.log2(1.0 + g), axis=-1) / (params.t_codewords + params.tau)


def mutual_info_approx(params: SystemParams, d: ChannelDraw):
    """First-order approximation dropping the zero-mean cosine ripple."""
    rho = phase1_sinr(params, d).rho_i
    return params.t_codewords / (params.t_codewords + params.tau) * np.log2(1.0 + rho)


def retransmission_snr(params: SystemParams, d: ChannelDraw, snrs: LinkSnrs,
                       retransmitter: Retransmitter, redraw: str = "reuse"):
    """SINR contributed by the Phase-III copy alone.

    ``redraw`` decides whether the retransmitting link keeps its Phase-I gain:
    ``"reuse"`` keeps it for both retransmitters, ``"fresh"`` redraws both,
    and ``"mixed"`` keeps the relay link but redraws the source link.
    """
    if redraw not in REDRAW_POLICIES:
        raise ValueError(f"unknown redraw policy {redraw!r}")
    if retransmitter is Retransmitter.NONE:
        return np.zeros_like(np.asarray(snrs.g_sd, dtype=float))
    if retransmitter is Retransmitter.RELAY:
        if redraw in ("reuse", "mixed"):
            return snrs.g_rd
        return params.p_r * np.abs(d.h_rd_iii) ** 2 / params.n_d
    if redraw == "reuse":
        return snrs.g_sd
    return params.p_s * np.abs(d.h_sd_iii) ** 2 / params.n_d


def phase3_sinr(params: SystemParams, d: ChannelDraw, snrs: LinkSnrs,
                retransmitter: Retransmitter, redraw: str = "reuse") -> PhaseIIISinr:
    rho = rho_i_from_links(snrs) + retransmission_snr(params, d, snrs, retransmitter, redraw)
    return PhaseIIISinr(rho, retransmitter)
