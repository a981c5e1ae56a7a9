"""Closed-form outage at one operating point, term by term.

Each retransmission probability is a region integral over the three link
SNRs. It is evaluated directly in two dimensions and checked against a
faster one-dimensional route. The three policies for the channel seen by a
retransmitting node give visibly different answers.

    python demos/02_outage_integrals.py
"""

from fdharq import analytic as A
from fdharq.config import Scheme, from_db, rate_params, thresholds

params = from_db(p_db=5.0, var_sd_db=5.0, var_sr_rd_db=10.0, var_rr_db=-10.0, rate=1.0)
r, t = rate_params(params), thresholds(params)


def _fmt(v):
    return "skipped" if v is None else f"{v:.6e}"


print(f"thresholds: eta={t.eta:.4f}  eta_I={t.eta_i:.4f}  eta_III={t.eta_iii:.4f}")
print(f"Phase-I outage     direct {A.rho_i_cdf_direct(t.eta_i, r):.6e}"
      f"   fast {A.rho_i_cdf_fast(t.eta_i, r):.6e}")
print(f"relay decoding     {A.outage_sr(params):.6e}")

print("\nretransmission outage under each redraw policy")
for redraw in ("reuse", "fresh", "mixed"):
    srd = A.evaluate_srd(params, redraw=redraw)
    ssd = A.evaluate_ssd(params, redraw=redraw)
    print(f"  {redraw:5s}  relay {srd.value:.6e} (fast {_fmt(srd.fast)}, {srd.path})"
          f"   source {ssd.value:.6e} (fast {_fmt(ssd.fast)}, {ssd.path})")

print("\nsystem outage")
for redraw in ("reuse", "fresh"):
    b = A.system_outage(params, redraw=redraw)
    conv = A.assemble(b, Scheme.CONVENTIONAL)
    print(f"  {redraw:5s}  Conventional {conv.p_out_system:.4e}   Enhanced {b.p_out_system:.4e}")
print(f"  relay-free: one round {A.baseline_s2d(params, 1):.4e}, "
      f"two rounds {A.baseline_s2d(params, 2):.4e}")

coop = A.cooperation_percentages(params)
print(f"\nsecond round taken by relay {coop['relay_pct']:.2f}% / source {coop['source_pct']:.2f}%")
