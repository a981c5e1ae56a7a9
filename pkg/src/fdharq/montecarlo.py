"""Monte Carlo outage estimation.

Trials are simulated in fixed-size chunks, each with its own seeded stream,
so results depend on ``(seed, n_trials)`` only and never on the number of
worker processes. All schemes are evaluated on the same draws, which keeps
path-wise comparisons (Enhanced vs Conventional) exact and makes sweep curves
smooth.

Two couplings between the protocol phases are offered:

``"joint"``
    One channel draw drives the whole block: the Phase-I test, the relay
    decoding test and the Phase-III combining all see the same gains.
``"independent"``
    The Phase-I test, the relay decoding test and the Phase-III test each use
    their own independent draw. Outage is then exactly the product of the
    per-phase probabilities, which is the structure of
    :func:`fdharq.analytic.system_outage`.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import CHUNK_TRIALS, ChannelDraw, LinkSnrs, draw, link_snrs, stream
from .config import PROCEDURES, Scheme, SystemParams, thresholds, validate
from .sinr import (
    REDRAW_POLICIES,
    Retransmitter,
    mutual_info_exact,
    per_tone_sinrs,
    retransmission_snr,
    rho_i_from_links,
)

COUPLINGS = ("joint", "independent")
LOW_CONFIDENCE_FAILURES = 100
ALL_SCHEMES = tuple(Scheme)


@dataclass(frozen=True)
class TrialOutcome:
    phase1_ok: bool
    sr_ok: bool
    retransmitter: Retransmitter
    final_ok: bool


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    stderr: float
    n_trials: int
    failures: int
    low_confidence: bool

    @classmethod
    def from_counts(cls, failures: int, n_trials: int) -> "Estimate":
        p = failures / n_trials
        return cls(p, math.sqrt(p * (1.0 - p) / n_trials), n_trials, failures,
                   failures < LOW_CONFIDENCE_FAILURES)


@dataclass(frozen=True)
class SimulationResult:
    estimates: dict
    relay_retx: dict
    source_retx: dict
    n_trials: int

    def cooperation(self, procedure: Scheme) -> dict:
        procedure = Scheme(procedure)
        n = self.n_trials
        return {
            "relay_pct": 100.0 * self.relay_retx.get(procedure, 0) / n,
            "source_pct": 100.0 * self.source_retx.get(procedure, 0) / n,
        }

    def cooperation_estimates(self, procedure: Scheme) -> dict:
        procedure = Scheme(procedure)
        return {
            "relay": Estimate.from_counts(self.relay_retx.get(procedure, 0), self.n_trials),
            "source": Estimate.from_counts(self.source_retx.get(procedure, 0), self.n_trials),
        }


@dataclass(frozen=True)
class _Options:
    schemes: tuple
    redraw: str = "reuse"
    coupling: str = "joint"
    exact_mi: bool = False


@dataclass
class _Counts:
    failures: dict = field(default_factory=dict)
    relay: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)

    def add(self, other: "_Counts") -> None:
        for mine, theirs in ((self.failures, other.failures), (self.relay, other.relay),
                             (self.source, other.source)):
            for k, v in theirs.items():
                mine[k] = mine.get(k, 0) + v


# --- Per-draw decisions -------------------------------------------------------

def _phase1_ok(params, d, snrs, exact_mi):
    if exact_mi:
        return mutual_info_exact(params, d) >= params.rate
    return rho_i_from_links(snrs) >= thresholds(params).eta_i


def _phase3_ok(params, d, snrs, retransmitter, redraw, exact_mi):
    extra = retransmission_snr(params, d, snrs, retransmitter, redraw)
    if exact_mi:
        tones = per_tone_sinrs(params, d) + np.asarray(extra)[..., None]
        bits = np.sum(np.log2(1.0 + tones), axis=-1) / (2 * params.t_codewords)
        return bits >= params.rate
    return rho_i_from_links(snrs) + extra >= thresholds(params).eta_iii


def _s2d_gains(params: SystemParams, d: ChannelDraw):
    scale = params.s2d_power / params.n_d
    return scale * np.abs(d.h_sd) ** 2, scale * np.abs(d.h_sd_iii) ** 2


def _outcomes(params: SystemParams, scheme: Scheme, views, opts: _Options):
    """Boolean arrays (final_ok, relay_retx, source_retx) for one scheme.

    ``views`` holds (draw, link SNRs) for the Phase-I test, the relay decoding
    test and the Phase-III test; under joint coupling all three are the same.
    """
    (d1, s1), (d2, s2), (d3, s3) = views
    th = thresholds(params)
    none = np.zeros(np.shape(s1.g_sd), dtype=bool)
    if scheme is Scheme.S2D1:
        g, _ = _s2d_gains(params, d1)
        return g >= th.eta, none, none
    if scheme is Scheme.S2D2:
        g, g2 = _s2d_gains(params, d1)
        first = g >= th.eta
        return first | (g + g2 >= th.eta_iii), none, ~first
    if scheme is Scheme.SDF:
        sr_ok = s1.g_sr >= th.eta
        combined = np.where(sr_ok, s1.g_sd + s1.g_rd, s1.g_sd)
        return combined >= th.eta, none, none
    p1 = _phase1_ok(params, d1, s1, opts.exact_mi)
    if scheme is Scheme.AF:
        return p1, none, none
    sr_ok = s2.g_sr >= th.eta
    relay = ~p1 & sr_ok
    relay_ok = _phase3_ok(params, d3, s3, Retransmitter.RELAY, opts.redraw, opts.exact_mi)
    final = p1 | (relay & relay_ok)
    if scheme is Scheme.CONVENTIONAL:
        return final, relay, none
    source = ~p1 & ~sr_ok
    source_ok = _phase3_ok(params, d3, s3, Retransmitter.SOURCE, opts.redraw, opts.exact_mi)
    return final | (source & source_ok), relay, source


def _views(params, seed, chunk, size, coupling):
    d = draw(params, stream(seed, chunk, 0), size)
    v = (d, link_snrs(params, d))
    if coupling == "joint":
        return v, v, v
    d2 = draw(params, stream(seed, chunk, 1), size)
    d3 = draw(params, stream(seed, chunk, 2), size)
    return v, (d2, link_snrs(params, d2)), (d3, link_snrs(params, d3))


def _run_chunk(args) -> _Counts:
    params, seed, chunk, size, opts = args
    views = _views(params, seed, chunk, size, opts.coupling)
    counts = _Counts()
    for scheme in opts.schemes:
        ok, relay, source = _outcomes(params, scheme, views, opts)
        counts.failures[scheme] = int(np.count_nonzero(~ok))
        counts.relay[scheme] = int(np.count_nonzero(relay))
        counts.source[scheme] = int(np.count_nonzero(source))
    return counts


def _chunks(n_trials: int):
    full, rest = divmod(n_trials, CHUNK_TRIALS)
    sizes = [CHUNK_TRIALS] * full + ([rest] if rest else [])
    return list(enumerate(sizes))


# --- Public API ----------------------------------------------------------------

def trial(params: SystemParams, scheme: Scheme, d: ChannelDraw, *, redraw: str = "reuse",
          exact_mi: bool = False) -> TrialOutcome:
    """Outcome of one block for one scheme on the given draw."""
    scheme = Scheme(scheme)
    snrs = link_snrs(params, d)
    th = thresholds(params)
    v = (d, snrs)
    ok, relay, source = _outcomes(params, scheme, (v, v, v),
                                  _Options((scheme,), redraw, "joint", exact_mi))
    if scheme in (Scheme.S2D1, Scheme.S2D2):
        phase1 = bool(_s2d_gains(params, d)[0] >= th.eta)
    elif scheme is Scheme.SDF:
        phase1 = bool(ok)
    else:
        phase1 = bool(_phase1_ok(params, d, snrs, exact_mi))
    if bool(relay):
        who = Retransmitter.RELAY
    elif bool(source):
        who = Retransmitter.SOURCE
    else:
        who = Retransmitter.NONE
    return TrialOutcome(phase1, bool(snrs.g_sr >= th.eta), who, bool(ok))


def simulate(params: SystemParams, schemes=ALL_SCHEMES, n_trials: int = 10**6,
             seed: int = 0, *, redraw: str = "reuse", coupling: str = "joint",
             exact_mi: bool = False, workers: int = 1) -> SimulationResult:
    """Estimate outage of several schemes on shared draws."""
    validate(params)
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    if redraw not in REDRAW_POLICIES:
        raise ValueError(f"unknown redraw policy {redraw!r}")
    if coupling not in COUPLINGS:
        raise ValueError(f"unknown coupling {coupling!r}")
    schemes = tuple(Scheme(s) for s in schemes)
    if not schemes:
        raise ValueError("no schemes requested")
    opts = _Options(schemes, redraw, coupling, exact_mi)
    jobs = [(params, seed, c, size, opts) for c, size in _chunks(n_trials)]
    total = _Counts()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for counts in pool.map(_run_chunk, jobs):
                total.add(counts)
    else:
        for job in jobs:
            total.add(_run_chunk(job))
    estimates = {s: Estimate.from_counts(total.failures[s], n_trials) for s in schemes}
    return SimulationResult(estimates, total.relay, total.source, n_trials)


def estimate_outage(params: SystemParams, scheme: Scheme, n_trials: int, seed: int = 0,
                    **kwargs) -> Estimate:
    scheme = Scheme(scheme)
    return simulate(params, (scheme,), n_trials, seed, **kwargs).estimates[scheme]


def estimate_cooperation(params: SystemParams, procedure: Scheme, n_trials: int,
                         seed: int = 0, **kwargs) -> dict:
    """Percentages of blocks in which the relay / the source retransmits."""
    procedure = Scheme(procedure)
    if procedure not in PROCEDURES + (Scheme.S2D2,):
        raise ValueError(f"{procedure} has no retransmission phase")
    return simulate(params, (procedure,), n_trials, seed, **kwargs).cooperation(procedure)


__all__ = [
    "COUPLINGS",
    "Estimate",
    "SimulationResult",
    "TrialOutcome",
    "estimate_cooperation",
    "estimate_outage",
    "simulate",
    "trial",
]
