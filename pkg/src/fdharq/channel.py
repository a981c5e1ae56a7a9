"""Block-fading channel draws and the per-link SINRs they induce.

Gains are zero-mean circularly-symmetric complex Gaussians. Every function
broadcasts, so a single draw and a batch of ``size`` draws share the same code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemParams, relay_interference

# Trials are generated in fixed-size chunks; chunk ``c`` of seed ``s`` always
# gets the same stream, whatever the number of workers.
CHUNK_TRIALS = 1 << 17


def stream(seed: int, chunk: int = 0, lane: int = 0) -> np.random.Generator:
    """Independent generator for (seed, chunk, lane).

    ``lane`` separates auxiliary streams (e.g. independent phase draws) from
    the main one so that enabling them never perturbs the main draws.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk, lane))
    return np.random.Generator(np.random.PCG64(ss))


def complex_gaussian(rng: np.random.Generator, variance: float, size=None):
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return scale * (re + 1j * im)


@dataclass(frozen=True)
class ChannelDraw:
    """One block realization (or a batch of them).

    ``h_sd_iii`` and ``h_rd_iii`` are always fresh, independent gains. Whether
    a retransmission actually uses them or reuses the Phase-I gains is decided
    where the Phase-III SINR is formed (see :func:`fdharq.sinr.phase3_sinr`).
    """

    h_sd: np.ndarray | complex
    h_sr: np.ndarray | complex
    h_rd: np.ndarray | complex
    h_sd_iii: np.ndarray | complex
    h_rd_iii: np.ndarray | complex


@dataclass(frozen=True)
class LinkSnrs:
    g_sd: np.ndarray | float
    g_sr: np.ndarray | float
    g_rd: np.ndarray | float
    theta: np.ndarray | float


def draw(params: SystemParams, rng: np.random.Generator, size=None) -> ChannelDraw:
    h_sd = complex_gaussian(rng, params.var_sd, size)
    h_sr = complex_gaussian(rng, params.var_sr, size)
    h_rd = complex_gaussian(rng, params.var_rd, size)
    h_sd_iii = complex_gaussian(rng, params.var_sd, size)
    h_rd_iii = complex_gaussian(rng, params.var_rd, size)
    return ChannelDraw(h_sd, h_sr, h_rd, h_sd_iii, h_rd_iii)


def link_snrs(params: SystemParams, d: ChannelDraw) -> LinkSnrs:
    g_sd = params.p_s * np.abs(d.h_sd) ** 2 / params.n_d
    g_rd = params.p_r * np.abs(d.h_rd) ** 2 / params.n_d
    g_sr = params.p_s * np.abs(d.h_sr) ** 2 / relay_interference(params)
    # Phase of the direct/relayed cross term of the per-tone SINR; it must
    # include arg(h_SR) for the cosine form to be exact.
    theta = np.angle(d.h_sd * np.conj(d.h_rd * d.h_sr))
    return LinkSnrs(g_sd, g_sr, g_rd, theta)
