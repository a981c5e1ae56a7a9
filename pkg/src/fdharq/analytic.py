"""Outage probabilities by numerical integration.

Every probability here is an expectation over the three exponential link
SINRs ``γ_SD ~ Exp(α_SD)``, ``γ_SR ~ Exp(α_SR)`` (variable ``y``) and
``γ_RD ~ Exp(α_RD)`` (variable ``z``). The Phase-I SINR is affine in γ_SD,

    ρ_I = c(y, z) + w(y, z) γ_SD,   c = yz / (1+y+z),   w = (1+y) / (1+y+z),

so "Phase-I SINR below x" becomes ``γ_SD < bound(y, z)`` and its probability
is a 2-D integral of ``1 - exp(-α_SD bound)`` over the region where the bound
is positive. Retransmission events add one more exponential copy and are
handled the same way with a closed-form conditional probability. These region
integrals are the *direct* paths: finite, singularity free, and always the
returned values.

The *fast* paths close one more variable analytically and serve as
cross-checks:

* the Phase-I CDF with the ``1/(α_RD + α_SD (x-y)/(1+y))`` kernel, which has a
  removable pole when ``α_SD > α_RD``;
* the relay retransmission with a shared γ_RD, via an erfi inner integral;
* the source retransmission with a fresh γ_SD, via a K1 term convolved with
  the Phase-I kernel;
* the source retransmission with a shared γ_SD, conditioning on γ_SD first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import (
    PROCEDURES,
    RateParams,
    Scheme,
    SystemParams,
    rate_params,
    relay_interference,
    thresholds,
    validate,
)
from .quadrature import (
    FALLBACK_2D,
    QuadratureError,
    QuadratureSpec,
    integrate1d,
)
from .sinr import REDRAW_POLICIES
from .special import bessel_k1, erfi_scaled

DEFAULT_SPEC = QuadratureSpec()
_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class Evaluation:
    """A probability with its provenance.

    ``path`` is ``"direct"`` when the 2-D value is returned after a successful
    cross-check (or without one), ``"fallback-2d"`` when the fast path was
    skipped because of an in-range pole, and ``"disagree"`` when the fast path
    ran but differed by more than ``spec.agreement_tol``.
    """

    value: float
    direct: float
    fast: float | None
    path: str


@dataclass(frozen=True)
class OutageBreakdown:
    p_out_phase1: float
    p_out_sr: float
    p_out_srd: float
    p_out_ssd: float
    p_out_system: float
    procedure: Scheme


def _clip(p: float) -> float:
    return min(1.0, max(0.0, p))


def _region_integral(bound, zmax, r: RateParams, spec: QuadratureSpec, *,
                     y_points=(), y_scale=1.0) -> float:
    """E[1 - exp(-α_SD bound(y, z))] over ``0 <= z < zmax(y)``.

    ``bound`` must be positive inside the region and vanish on its edge.
    """
    a_sd, a_sr, a_rd = r.alpha_sd, r.alpha_sr, r.alpha_rd
    z_cut = spec.upper(0.0, a_rd)
    z_scale = min(1.0 / a_rd, 1.0)

    def inner(y):
        top = min(zmax(y), z_cut)
        if top <= 0.0:
            return 0.0
        g = lambda z: a_rd * math.exp(-a_rd * z) * -math.expm1(-a_sd * max(bound(y, z), 0.0))
        return integrate1d(g, 0.0, top, spec, scale=min(z_scale, top / 4.0))

    outer = lambda y: a_sr * math.exp(-a_sr * y) * inner(y)
    return integrate1d(outer, 0.0, spec.upper(0.0, a_sr), spec, scale=_scale(y_scale, a_sr),
                       points=y_points)


def _scale(hint: float, rate: float) -> float:
    """First panel width: the feature size ``hint`` or the envelope 1/rate."""
    return min(max(hint, 1e-3), 1.0 / rate)


def _phase1_zmax(x):
    return lambda y: math.inf if y <= x else x * (1.0 + y) / (y - x)


def _retx_zmax(eta3):
    """Largest γ_RD with ρ_I + γ_RD < eta3 still possible, for γ_SR = y."""

    def zmax(y):
        q = 2.0 * y + 1.0 - eta3
        disc = math.sqrt(q * q + 4.0 * eta3 * (1.0 + y))
        if q <= 0.0:
            return 0.5 * (disc - q)
        return 2.0 * eta3 * (1.0 + y) / (disc + q)

    return zmax


# --- Phase I ---------------------------------------------------------------

def rho_i_cdf_direct(x: float, r: RateParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Pr(ρ_I < x) by 2-D integration over the region Δ >= 0."""
    if x <= 0.0:
        return 0.0

    def bound(y, z):
        return x + z * (x - y) / (1.0 + y)

    return _clip(_region_integral(bound, _phase1_zmax(x), r, spec, y_points=(x,),
                                  y_scale=max(x, 1e-3)))


def pole_location(x: float, r: RateParams) -> float | None:
    """y* where α_RD + α_SD (x-y)/(1+y) vanishes, if it exists."""
    if r.alpha_sd <= r.alpha_rd:
        return None
    return (r.alpha_sd * x + r.alpha_rd) / (r.alpha_sd - r.alpha_rd)


def _one_minus_exp_over(k: float, length: float) -> float:
    """(1 - exp(-k L)) / k, finite at k = 0 and for L = inf (k > 0)."""
    if math.isinf(length):
        return 1.0 / k
    t = k * length
    if abs(t) < 1e-12:
        return length
    return -math.expm1(-t) / k


def _relay_kernel(x: float, r: RateParams, spec: QuadratureSpec, split: bool) -> float:
    """exp(-α_SD x) J0(x) - J1(x), with

    J0 = ∫_0^∞ exp(-α_SR y) / k(y) dy,
    J1 = ∫_x^∞ exp(-α_SR y - α_RD zmax(y)) / k(y) dy,
    k(y) = α_RD + α_SD (x - y)/(1 + y).

    With ``split`` the two integrals are merged on ``[x, ∞)`` so the pole
    cancels, and the range is broken at the pole.
    """
    a_sd, a_sr, a_rd = r.alpha_sd, r.alpha_sr, r.alpha_rd
    kk = lambda y: a_rd + a_sd * (x - y) / (1.0 + y)
    zmax = _phase1_zmax(x)
    top = spec.upper(x, a_sr)
    damp = math.exp(-a_sd * x)
    scale = _scale(x, a_sr)

    head = integrate1d(lambda y: math.exp(-a_sr * y) / kk(y), 0.0, x, spec, scale=scale)
    if split:
        ys = pole_location(x, r)
        f = lambda y: math.exp(-a_sr * y) * damp * _one_minus_exp_over(kk(y), zmax(y))
        tail = integrate1d(f, x, top, spec, scale=scale,
                           points=() if ys is None else (ys,))
        return damp * head + tail
    j0_tail = integrate1d(lambda y: math.exp(-a_sr * y) / kk(y), x, top, spec, scale=scale)
    j1 = integrate1d(lambda y: math.exp(-a_sr * y - a_rd * zmax(y)) / kk(y), x, top, spec,
                     scale=scale)
    return damp * (head + j0_tail) - j1


def rho_i_cdf_fast(x: float, r: RateParams, spec: QuadratureSpec = DEFAULT_SPEC,
                   split: bool | None = None) -> float:
    """Pr(ρ_I < x) as three 1-D integrals in γ_SR.

    ``split=None`` splits only when the pole lies in range.
    """
    if x <= 0.0:
        return 0.0
    a_sr, a_rd = r.alpha_sr, r.alpha_rd
    if split is None:
        split = pole_location(x, r) is not None
    zmax = _phase1_zmax(x)
    first = a_sr * integrate1d(lambda y: math.exp(-a_sr * y - a_rd * zmax(y)), x,
                               spec.upper(x, a_sr), spec, scale=_scale(x, a_sr))
    return 1.0 - first - a_sr * a_rd * _relay_kernel(x, r, spec, split)


def relay_silent_tail(x: float, r: RateParams) -> float:
    """Pr(γ_SR > x, γ_RD > zmax(γ_SR)) in closed form, via K1."""
    a = r.alpha_sr * r.alpha_rd * (1.0 + x) * x
    if a == 0.0:
        return math.exp(-r.alpha_sr * x)
    root = math.sqrt(a)
    return 2.0 * math.exp(-(r.alpha_sr + r.alpha_rd) * x) * root * bessel_k1(2.0 * root)


def _checked(direct: float, fast_fn, pole: bool, spec: QuadratureSpec) -> Evaluation:
    if not spec.cross_check:
        return Evaluation(direct, direct, None, "direct")
    if pole and spec.singularity_policy == FALLBACK_2D:
        return Evaluation(direct, direct, None, "fallback-2d")
    fast = fast_fn()
    path = "direct" if abs(fast - direct) <= spec.agreement_tol else "disagree"
    return Evaluation(direct, direct, fast, path)


def evaluate_phase1(params: SystemParams, spec: QuadratureSpec = DEFAULT_SPEC,
                    alpha_sr_variant: str = "rsi") -> Evaluation:
    validate(params)
    r = rate_params(params, alpha_sr_variant)
    x = thresholds(params).eta_i
    direct = rho_i_cdf_direct(x, r, spec)
    pole = pole_location(x, r) is not None
    return _checked(direct, lambda: rho_i_cdf_fast(x, r, spec), pole, spec)


def outage_phase1(params: SystemParams, spec: QuadratureSpec = DEFAULT_SPEC,
                  alpha_sr_variant: str = "rsi") -> float:
    """One-round outage, Pr(ρ_I < η_I)."""
    return evaluate_phase1(params, spec, alpha_sr_variant).value


baseline_af = outage_phase1


# --- S -> R ------------------------------------------------------------------

def outage_sr(params: SystemParams) -> float:
    """Pr(γ_SR < η): the relay fails to decode."""
    eta = thresholds(params).eta
    return -math.expm1(-eta * relay_interference(params) / (params.p_s * params.var_sr))


# --- Phase III: ρ_I plus the retransmitted copy ------------------------------
#
# The retransmitted link either keeps its Phase-I gain (``reuse``) or is an
# independent draw (``fresh``); ``mixed`` reuses the relay link and redraws the
# source link. Conditioned on (y, z) each case is Pr(slope·γ_SD + S < t0) with
# S an Erlang sum of the fresh copies, which _exp_plus_erlang_cdf evaluates.

def _check_redraw(redraw: str) -> str:
    if redraw not in REDRAW_POLICIES:
        raise ValueError(f"unknown redraw policy {redraw!r}")
    return redraw


def _reuses(redraw: str, by_relay: bool) -> bool:
    return redraw == "reuse" or (redraw == "mixed" and by_relay)


def _combined_outage(th: float, r: RateParams, spec: QuadratureSpec, *, by_relay: bool,
                     reuse: bool, extra: int = 0) -> float:
    """Pr(ρ_I + retransmitted copies < th), 2-D region integral over (y, z).

    ``extra`` counts further fresh copies of the same link beyond the first
    retransmission.
    """
    if th <= 0.0:
        return 0.0
    a_sd, a_sr, a_rd = r.alpha_sd, r.alpha_sr, r.alpha_rd
    beta = a_rd if by_relay else a_sd
    shared_z = by_relay and reuse
    zmax = _retx_zmax(th) if shared_z else _phase1_zmax(th)
    m = extra if reuse else extra + 1
    z_cut = spec.upper(0.0, a_rd)

    def inner(y):
        top = min(zmax(y), z_cut)
        if top <= 0.0:
            return 0.0

        def g(z):
            c = y * z / (1.0 + y + z)
            w = (1.0 + y) / (1.0 + y + z)
            if shared_z:
                p = _exp_plus_erlang_cdf(th - c - z, w, a_sd, beta, m, spec)
            elif reuse:
                p = _exp_plus_erlang_cdf(th - c, 1.0 + w, a_sd, beta, m, spec)
            else:
                p = _exp_plus_erlang_cdf(th - c, w, a_sd, beta, m, spec)
            return a_rd * math.exp(-a_rd * z) * p

        return integrate1d(g, 0.0, top, spec, scale=min(1.0 / a_rd, 1.0, top / 4.0))

    outer = lambda y: a_sr * math.exp(-a_sr * y) * inner(y)
    return _clip(integrate1d(outer, 0.0, spec.upper(0.0, a_sr), spec, scale=_scale(th, a_sr),
                             points=(th,)))


def _evaluate_retx(params, spec, alpha_sr_variant, redraw, by_relay, fast_for):
    _check_redraw(redraw)
    r = rate_params(params, alpha_sr_variant)
    eta3 = thresholds(params).eta_iii
    reuse = _reuses(redraw, by_relay)
    direct = _combined_outage(eta3, r, spec, by_relay=by_relay, reuse=reuse)
    fast_fn, pole = fast_for(eta3, r, reuse)
    if fast_fn is None:
        return Evaluation(direct, direct, None, "direct")
    return _checked(direct, fast_fn, pole, spec)


# --- Relay retransmission ----------------------------------------------------

def srd_direct(eta3: float, r: RateParams, spec: QuadratureSpec = DEFAULT_SPEC,
               redraw: str = "reuse") -> float:
    """Pr(ρ_I + γ_RD < eta3) as a 2-D region integral."""
    reuse = _reuses(_check_redraw(redraw), True)
    return _combined_outage(eta3, r, spec, by_relay=True, reuse=reuse)


def srd_fast(eta3: float, r: RateParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Pr(ρ_I + γ_RD < eta3), shared γ_RD, as a 1-D integral with an erfi
    inner term."""
    if eta3 <= 0.0:
        return 0.0
    a_sd, a_sr, a_rd = r.alpha_sd, r.alpha_sr, r.alpha_rd
    zmax = _retx_zmax(eta3)

    def survive(y):
        zm = zmax(y)
        a = a_sd / (1.0 + y)
        b = a_sd * (2.0 * y + 1.0 - eta3) / (1.0 + y) - a_rd
        sa = math.sqrt(a)
        u0 = b / (2.0 * sa)
        u1 = sa * zm + u0
        s = u0 * u0 + a_sd * eta3
        gauss = _SQRT_PI / (2.0 * sa) * (erfi_scaled(u1, s) - erfi_scaled(u0, s))
        return math.exp(-a_rd * zm) + a_rd * gauss

    f = lambda y: a_sr * math.exp(-a_sr * y) * survive(y)
    return 1.0 - integrate1d(f, 0.0, spec.upper(0.0, a_sr), spec, scale=_scale(eta3, a_sr))


def evaluate_srd(params: SystemParams, spec: QuadratureSpec = DEFAULT_SPEC,
                 alpha_sr_variant: str = "rsi", redraw: str = "reuse") -> Evaluation:
    def fast_for(eta3, r, reuse):
        if not reuse:
            return None, False
        return (lambda: srd_fast(eta3, r, spec)), False

    return _evaluate_retx(params, spec, alpha_sr_variant, redraw, True, fast_for)


def outage_srd(params: SystemParams, spec: QuadratureSpec = DEFAULT_SPEC,
               alpha_sr_variant: str = "rsi", redraw: str = "reuse") -> float:
    """Combined outage when the relay retransmits, Pr(ρ_I + γ_RD < η_III)."""
    return evaluate_srd(params, spec, alpha_sr_variant, redraw).value


# --- Source retransmission ---------------------------------------------------

def ssd_direct(eta3: float, r: RateParams, spec: QuadratureSpec = DEFAULT_SPEC,
               redraw: str = "reuse") -> float:
    """Pr(ρ_I + γ_SD < eta3) as a 2-D region integral."""
    reuse = _reuses(_check_redraw(redraw), False)
    return _combined_outage(eta3, r, spec, by_relay=False, reuse=reuse)


def ssd_nested(eta3: float, r: RateParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """∫ F_ρI(eta3 - x) f_SD(x) dx with the 2-D Phase-I kernel inside.

    This convolution treats the retransmitted γ_SD as independent of the one
    inside ρ_I, so it is the ``fresh`` outage. A slow, literal oracle.
    """
    a_sd = r.alpha_sd
    f = lambda x: rho_i_cdf_direct(eta3 - x, r, spec) * a_sd * math.exp(-a_sd * x)
    return integrate1d(f, 0.0, eta3, spec)


def ssd_fast(eta3: float, r: RateParams, spec: QuadratureSpec = DEFAULT_SPEC,
             split: bool | None = None) -> float:
    """Fresh-copy Pr(ρ_I + γ'_SD < eta3) with the Bessel-K1 term and nested
    1-D kernels."""
    if eta3 <= 0.0:
        return 0.0
    a_sd, a_sr, a_rd = r.alpha_sd, r.alpha_sr, r.alpha_rd
    if split is None:
        split = pole_location(0.0, r) is not None

    def bessel_term(x):
        a = a_sr * a_rd * (1.0 + eta3 - x) * (eta3 - x)
        kernel = 0.5 if a <= 0.0 else math.sqrt(a) * bessel_k1(2.0 * math.sqrt(a))
        return kernel * math.exp(-(a_sr + a_rd) * (eta3 - x) - a_sd * x)

    bessel = 2.0 * a_sd * integrate1d(bessel_term, 0.0, eta3, spec)
    relay = integrate1d(lambda x: math.exp(-a_sd * x) * _relay_kernel(eta3 - x, r, spec, split),
                        0.0, eta3, spec)
    return -math.expm1(-a_sd * eta3) - bessel - a_sr * a_rd * a_sd * relay


def ssd_conditional(eta3: float, r: RateParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Shared-γ_SD Pr(ρ_I + γ_SD < eta3), conditioning on γ_SD = g first.

    For g < eta3/2 the (y, z) probability closes to a K1 term; for larger g
    only the strip y < eta3 - g with large z contributes, leaving one
    smooth inner integral.
    """
    if eta3 <= 0.0:
        return 0.0
    a_sd, a_sr, a_rd = r.alpha_sd, r.alpha_sr, r.alpha_rd
    half = 0.5 * eta3

    def low(g):
        x, d = eta3 - g, eta3 - 2.0 * g
        a = a_sr * a_rd * d * (1.0 + x)
        kernel = 0.5 if a <= 0.0 else math.sqrt(a) * bessel_k1(2.0 * math.sqrt(a))
        ok = 2.0 * math.exp(-a_sr * x - a_rd * d) * kernel
        return a_sd * math.exp(-a_sd * g) * (1.0 - ok)

    def high(g):
        x, e = eta3 - g, 2.0 * g - eta3
        if x <= 0.0 or e <= 0.0:
            return 0.0

        def f(v):
            u = x - v
            if u <= 0.0:
                return 0.0
            return a_sr * math.exp(-a_sr * v - a_rd * e * ((1.0 + x) / u - 1.0))

        return a_sd * math.exp(-a_sd * g) * integrate1d(f, 0.0, x, spec, scale=_scale(x, a_sr))

    return _clip(integrate1d(low, 0.0, half, spec) + integrate1d(high, half, eta3, spec))


def evaluate_ssd(params: SystemParams, spec: QuadratureSpec = DEFAULT_SPEC,
                 alpha_sr_variant: str = "rsi", redraw: str = "reuse") -> Evaluation:
    def fast_for(eta3, r, reuse):
        if reuse:
            return (lambda: ssd_conditional(eta3, r, spec)), False
        pole = pole_location(0.0, r) is not None
        return (lambda: ssd_fast(eta3, r, spec)), pole

    return _evaluate_retx(params, spec, alpha_sr_variant, redraw, False, fast_for)


def outage_ssd(params: SystemParams, spec: QuadratureSpec = DEFAULT_SPEC,
               alpha_sr_variant: str = "rsi", redraw: str = "reuse") -> float:
    """Combined outage when the source retransmits, Pr(ρ_I + γ_SD < η_III)."""
    return evaluate_ssd(params, spec, alpha_sr_variant, redraw).value


# --- Assembly ----------------------------------------------------------------

def system_outage(params: SystemParams, spec: QuadratureSpec = DEFAULT_SPEC,
                  procedure: Scheme = Scheme.ENHANCED,
                  alpha_sr_variant: str = "rsi", redraw: str = "reuse") -> OutageBreakdown:
    """Phase-I outage times Phase-III outage for one HARQ procedure."""
    procedure = Scheme(procedure)
    if procedure not in PROCEDURES:
        raise ValueError(f"{procedure} is not a HARQ procedure")
    p1 = outage_phase1(params, spec, alpha_sr_variant)
    p_sr = outage_sr(params)
    p_srd = outage_srd(params, spec, alpha_sr_variant, redraw)
    p_ssd = outage_ssd(params, spec, alpha_sr_variant, redraw)
    x = 1.0 if procedure is Scheme.CONVENTIONAL else p_ssd
    p3 = p_sr * x + p_srd * (1.0 - p_sr)
    return OutageBreakdown(p1, p_sr, p_srd, p_ssd, p1 * p3, procedure)


def assemble(breakdown: OutageBreakdown, procedure: Scheme) -> OutageBreakdown:
    """Re-assemble an existing breakdown for another procedure."""
    b = breakdown
    x = 1.0 if Scheme(procedure) is Scheme.CONVENTIONAL else b.p_out_ssd
    p3 = b.p_out_sr * x + b.p_out_srd * (1.0 - b.p_out_sr)
    return OutageBreakdown(b.p_out_phase1, b.p_out_sr, b.p_out_srd, b.p_out_ssd,
                           b.p_out_phase1 * p3, Scheme(procedure))


# --- Baselines ---------------------------------------------------------------

def s2d_alpha(params: SystemParams) -> float:
    return params.n_d / (params.s2d_power * params.var_sd)


def baseline_s2d(params: SystemParams, rounds: int = 1) -> float:
    """Relay-free outage with one or two rounds (joint event, MRC)."""
    t = thresholds(params)
    a = s2d_alpha(params)
    if rounds == 1:
        return -math.expm1(-a * t.eta)
    if rounds == 2:
        # Pr(γ1 < η, γ1 + γ2 < η_III), η <= η_III
        return -math.expm1(-a * t.eta) - a * t.eta * math.exp(-a * t.eta_iii)
    raise ValueError("rounds must be 1 or 2")


def cooperation_percentages(params: SystemParams, spec: QuadratureSpec = DEFAULT_SPEC,
                            procedure: Scheme = Scheme.ENHANCED,
                            breakdown: OutageBreakdown | None = None) -> dict:
    """Share of blocks (in %) in which each node transmits in the second round.

    ``procedure`` may also be ``Scheme.S2D2`` for the relay-free reference.
    """
    procedure = Scheme(procedure)
    if procedure in (Scheme.S2D1, Scheme.S2D2):
        return {"relay_pct": 0.0, "source_pct": 100.0 * baseline_s2d(params, 1)}
    p1 = breakdown.p_out_phase1 if breakdown else outage_phase1(params, spec)
    p_sr = breakdown.p_out_sr if breakdown else outage_sr(params)
    relay = 100.0 * (1.0 - p_sr) * p1
    source = 100.0 * p_sr * p1 if procedure is Scheme.ENHANCED else 0.0
    return {"relay_pct": relay, "source_pct": source}


# --- More than one retransmission -------------------------------------------

def round_threshold(rate: float, rounds: int) -> float:
    """SINR threshold after ``rounds`` transmissions combined by MRC."""
    return 2.0 ** (rounds * rate) - 1.0


def s2d_outage_rounds(params: SystemParams, k: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Relay-free outage with ``k`` retransmissions: every partial MRC sum
    fails its threshold. Fresh fading per round."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    a = s2d_alpha(params)
    th = [round_threshold(params.rate, j + 1) for j in range(k + 1)]
    if k == 0:
        return -math.expm1(-a * th[0])
    if k == 1:
        return -math.expm1(-a * th[0]) - a * th[0] * math.exp(-a * th[1])

    def remaining(j, s):
        # probability that rounds j..k all fail given partial sum s
        if j == k:
            return -math.expm1(-a * (th[k] - s))
        f = lambda g: a * math.exp(-a * g) * remaining(j + 1, s + g)
        return integrate1d(f, 0.0, th[j] - s, spec)

    return remaining(0, 0.0)


def _exp_plus_erlang_cdf(t0: float, slope: float, a_g: float, beta: float, m: int,
                         spec: QuadratureSpec) -> float:
    """Pr(slope * G + S < t0) with G ~ Exp(a_g), S ~ Erlang(m, beta)."""
    if t0 <= 0.0:
        return 0.0
    g1 = t0 / slope
    if m == 0:
        return -math.expm1(-a_g * g1)
    if m == 1:
        delta = beta * slope - a_g
        if abs(delta * g1) > 1e-6:
            tail = (math.exp(-a_g * g1) - math.exp(-beta * t0)) / delta
        else:
            tail = math.exp(-beta * t0) * g1 * (1.0 + 0.5 * delta * g1)
        return -math.expm1(-a_g * g1) - a_g * tail
    from scipy.special import gammainc

    f = lambda g: a_g * math.exp(-a_g * g) * gammainc(m, beta * (t0 - slope * g))
    return integrate1d(f, 0.0, g1, spec)


def retransmission_outage_rounds(params: SystemParams, k: int, retransmitter: Scheme,
                                 spec: QuadratureSpec = DEFAULT_SPEC,
                                 alpha_sr_variant: str = "rsi",
                                 redraw: str = "reuse") -> float:
    """Phase-III outage after ``k >= 1`` retransmissions by one node.

    The first retransmission follows ``redraw``; the remaining ``k - 1`` are
    fresh draws. All copies are MRC-combined against ``2^((k+1)R) - 1``.
    ``retransmitter`` is ``Scheme.AF`` for the relay and ``Scheme.S2D1`` for
    the source.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    by_relay = Scheme(retransmitter) is Scheme.AF
    r = rate_params(params, alpha_sr_variant)
    th = round_threshold(params.rate, k + 1)
    reuse = _reuses(_check_redraw(redraw), by_relay)
    return _combined_outage(th, r, spec, by_relay=by_relay, reuse=reuse, extra=k - 1)


def outage_with_rounds(params: SystemParams, scheme: Scheme, k: int,
                       spec: QuadratureSpec = DEFAULT_SPEC, redraw: str = "reuse") -> float:
    """Outage of ``scheme`` when up to ``k`` retransmissions are allowed.

    S2D uses the joint multi-round event. The relay procedures keep the
    product structure Phase-I outage times Phase-III outage.
    """
    scheme = Scheme(scheme)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if scheme in (Scheme.S2D1, Scheme.S2D2):
        return s2d_outage_rounds(params, k, spec)
    p1 = outage_phase1(params, spec)
    if k == 0 or scheme is Scheme.AF:
        return p1
    if scheme not in PROCEDURES:
        raise ValueError(f"no multi-round model for {scheme}")
    p_sr = outage_sr(params)
    p_relay = retransmission_outage_rounds(params, k, Scheme.AF, spec, redraw=redraw)
    if scheme is Scheme.CONVENTIONAL:
        x = 1.0
    else:
        x = retransmission_outage_rounds(params, k, Scheme.S2D1, spec, redraw=redraw)
    return p1 * (p_sr * x + p_relay * (1.0 - p_sr))


__all__ = [
    "DEFAULT_SPEC",
    "Evaluation",
    "OutageBreakdown",
    "QuadratureError",
    "QuadratureSpec",
    "assemble",
    "baseline_af",
    "baseline_s2d",
    "cooperation_percentages",
    "evaluate_phase1",
    "evaluate_srd",
    "evaluate_ssd",
    "outage_phase1",
    "outage_sr",
    "outage_srd",
    "outage_ssd",
    "outage_with_rounds",
    "pole_location",
    "relay_silent_tail",
    "rho_i_cdf_direct",
    "rho_i_cdf_fast",
    "s2d_outage_rounds",
    "srd_direct",
    "srd_fast",
    "ssd_direct",
    "ssd_conditional",
    "ssd_fast",
    "ssd_nested",
    "system_outage",
]
