"""HARQ timing: rounds per latency budget, a four-process schedule and the
lowest SNR at which each scheme meets a reliability target in time.

    python demos/04_harq_timeline.py
"""

from fdharq import timeline as T
from fdharq.config import Scheme
from fdharq.experiments import builtin_figures

model = T.RttModel()
print(f"round-trip time {model.rtt} TTIs of 125 us")
for k in range(3):
    print(f"  decision after {k} retransmissions: {T.latency_ttis(model, k)} TTIs"
          f" = {T.latency_for_rounds(model, k):.3f} ms")
for budget in (0.2, 1.0, 1.5):
    print(f"  budget {budget} ms allows {T.max_rounds(model, budget)} retransmissions")

print("\nfour interleaved processes, first 12 TTIs")
print(T.schedule_to_csv(T.multiprocess_schedule(model, 4, 12)), end="")
for n in (1, 4):
    print(f"blocks per TTI with {n} process(es): {T.decoded_blocks_per_tti(model, n, 400):.3f}")
try:
    T.multiprocess_schedule(model, 5, 12)
except T.ScheduleConflict as exc:
    print(f"five processes: {exc}")

params = builtin_figures()["fig5"].base_params
print("\nlowest SNR meeting outage 1e-5 within the budget (1 dB grid)")
for budget in (1.0, 1.5):
    for s in (Scheme.ENHANCED, Scheme.CONVENTIONAL, Scheme.S2D2):
        pts = T.latency_at_reliability(params, s, 1e-5, budget, range(0, 31))
        first = next((p for p in pts if p.feasible), None)
        where = "never" if first is None else f"{first.snr_db:.0f} dB ({first.latency_ms} ms)"
        print(f"  {budget} ms  {s.value:13s} {where}")
