"""Monte Carlo against the closed forms.

With one channel draw per block, the Phase-I failure and the Phase-III
failure are strongly correlated and the simulated outage sits far above the
product of per-phase probabilities. Drawing the phases independently
recovers the product exactly. Both couplings run on the same seed.

    python demos/03_monte_carlo_check.py [trials]
"""

import sys

from fdharq import analytic as A
from fdharq import montecarlo as M
from fdharq.config import Scheme, from_db
from fdharq.experiments import z_score

n = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
params = from_db(p_db=5.0, var_sd_db=5.0, var_sr_rd_db=10.0, var_rr_db=-10.0, rate=1.0)

b = A.system_outage(params)
closed = {
    Scheme.AF: A.outage_phase1(params),
    Scheme.CONVENTIONAL: A.assemble(b, Scheme.CONVENTIONAL).p_out_system,
    Scheme.ENHANCED: b.p_out_system,
    Scheme.S2D2: A.baseline_s2d(params, 2),
}

for coupling in ("joint", "independent"):
    res = M.simulate(params, tuple(closed), n, seed=11, coupling=coupling)
    print(f"{coupling} coupling, {n} trials")
    for s, p in closed.items():
        e = res.estimates[s]
        z = z_score(p, e.p_hat, n)
        print(f"  {s.value:13s} closed {p:.4e}   MC {e.p_hat:.4e} ± {e.stderr:.1e}   z {z:+7.2f}")
    coop = res.cooperation(Scheme.ENHANCED)
    print(f"  Enhanced second round: relay {coop['relay_pct']:.2f}%, "
          f"source {coop['source_pct']:.2f}%")
