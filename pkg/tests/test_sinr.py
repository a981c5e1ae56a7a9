import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdharq.channel import ChannelDraw, LinkSnrs, draw, link_snrs, stream
from fdharq.config import SystemParams, from_db
from fdharq.sinr import (
    Retransmitter,
    mutual_info_approx,
    mutual_info_exact,
    per_tone_from_phase1,
    per_tone_sinrs,
    phase1_sinr,
    phase3_sinr,
    retransmission_snr,
    rho_i_from_links,
    tone_phases,
)


def _draws(p, n, seed=1):
    return draw(p, stream(seed), n)


def test_arithmetic_geometric_mean_bound():
    p = from_db(p_db=5.0, var_sd_db=5.0, var_sr_rd_db=10.0, var_rr_db=-10.0)
    s = phase1_sinr(p, _draws(p, 10**6))
    assert np.all(s.rho_i >= 2.0 * s.mu_abs * (1 - 1e-12))


@pytest.mark.parametrize("tau", [0, 1, 4, 13])
def test_per_tone_forms_agree(tau):
    p = from_db(p_db=7.0, var_sd_db=0.0, var_sr_rd_db=10.0, var_rr_db=-5.0, tau=tau)
    d = _draws(p, 10**5, seed=tau)
    direct = per_tone_sinrs(p, d)
    s = phase1_sinr(p, d)
    tones = np.arange(p.t_codewords)
    column = type(s)(s.rho_i[:, None], s.mu_abs[:, None], s.theta[:, None])
    via_cos = per_tone_from_phase1(p, column, tones)
    # relative to rho_i: a tone in a deep fade is a cancellation of O(rho_i) terms
    assert np.all(np.abs(via_cos - direct) <= 1e-12 * s.rho_i[:, None])


@pytest.mark.parametrize("tau", [1, 3, 4, 17, 32])
def test_cosine_ripple_sums_to_zero(tau):
    p = SystemParams(tau=tau)
    assert abs(np.sum(np.cos(tone_phases(p) + 0.37))) < 1e-9


def test_rho_from_links_matches_channel_form():
    p = from_db(p_db=3.0, var_sd_db=2.0, var_sr_rd_db=8.0, var_rr_db=-3.0, n_d=1.7, n_r=0.6)
    d = _draws(p, 10**4)
    np.testing.assert_allclose(rho_i_from_links(link_snrs(p, d)), phase1_sinr(p, d).rho_i,
                               rtol=1e-12)


@given(g=st.tuples(*[st.floats(0, 1e4)] * 3), extra=st.floats(0, 1e4))
def test_retransmission_never_hurts(g, extra):
    s = LinkSnrs(g[0], g[1], g[2], 0.0)
    rho = rho_i_from_links(s)
    assert rho + extra >= rho


@pytest.mark.parametrize("who", [Retransmitter.RELAY, Retransmitter.SOURCE])
@pytest.mark.parametrize("redraw", ["reuse", "fresh", "mixed"])
def test_phase_three_sinr_dominates_phase_one(who, redraw):
    p = from_db(p_db=0.0, var_rr_db=-10.0)
    d = _draws(p, 10**4)
    s = link_snrs(p, d)
    rho3 = phase3_sinr(p, d, s, who, redraw).rho_iii
    rho1 = rho_i_from_links(s)
    assert np.all(rho3 >= rho1)
    assert np.all(rho3[retransmission_snr(p, d, s, who, redraw) > 0] > rho1[
        retransmission_snr(p, d, s, who, redraw) > 0])


def test_redraw_policies_pick_the_right_gain():
    p = SystemParams(p_s=2.0, p_r=3.0)
    d = ChannelDraw(1.0, 1.0, 1.0, 2.0, 3.0)
    s = link_snrs(p, d)
    relay = Retransmitter.RELAY
    source = Retransmitter.SOURCE
    assert retransmission_snr(p, d, s, relay, "reuse") == s.g_rd
    assert retransmission_snr(p, d, s, relay, "mixed") == s.g_rd
    assert retransmission_snr(p, d, s, relay, "fresh") == pytest.approx(3.0 * 9.0)
    assert retransmission_snr(p, d, s, source, "reuse") == s.g_sd
    assert retransmission_snr(p, d, s, source, "mixed") == pytest.approx(2.0 * 4.0)
    assert retransmission_snr(p, d, s, Retransmitter.NONE, "fresh") == 0.0
    with pytest.raises(ValueError):
        retransmission_snr(p, d, s, relay, "sometimes")


def test_first_order_mutual_information_gap_is_frozen():
    # Regression pin, measured once on this stream. With comparable direct and
    # relayed paths the tone ripple costs a few percent of the rate.
    p = from_db(p_db=5.0, var_sd_db=5.0, var_sr_rd_db=10.0, var_rr_db=-10.0)
    d = _draws(p, 10**5, seed=9)
    exact = mutual_info_exact(p, d)
    rel = np.abs(exact - mutual_info_approx(p, d)) / exact
    assert np.median(rel) == pytest.approx(0.07317, abs=5e-4)
    assert np.percentile(rel, 99) == pytest.approx(0.16694, abs=5e-4)


def test_exact_mutual_information_never_exceeds_approximation():
    # Jensen: the mean of log over tones is below log of the mean SINR
    p = from_db(p_db=5.0, var_sd_db=5.0, var_sr_rd_db=10.0, var_rr_db=-10.0)
    d = _draws(p, 10**4, seed=4)
    assert np.all(mutual_info_exact(p, d) <= mutual_info_approx(p, d) + 1e-12)
