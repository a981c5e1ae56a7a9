"""HARQ timing: round-trip arithmetic, multi-process schedules and the
latency reached at a reliability target."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from . import analytic
from .config import Scheme, SystemParams, db2lin, validate


class ScheduleConflict(RuntimeError):
    """Two events of one node fell on the same TTI."""


@dataclass(frozen=True)
class RttModel:
    """Durations, in TTIs, of the four steps of one HARQ round."""

    tx_ttis: int = 1
    rx_proc_ttis: int = 1
    feedback_ttis: int = 1
    nack_proc_ttis: int = 1

    def __post_init__(self):
        for name in ("tx_ttis", "rx_proc_ttis", "feedback_ttis", "nack_proc_ttis"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer")

    @property
    def rtt(self) -> int:
        return self.tx_ttis + self.rx_proc_ttis + self.feedback_ttis + self.nack_proc_ttis

    @property
    def feedback_delay(self) -> int:
        """TTIs from the end of an assignment to the start of its ACK/NACK."""
        return self.rx_proc_ttis + 1


def latency_ttis(model: RttModel, k: int) -> int:
    """TTIs until the decoding decision of the round after ``k`` retransmissions."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return model.tx_ttis + model.rx_proc_ttis + k * model.rtt


def latency_for_rounds(model: RttModel, k: int, tti_us: float = 125.0) -> float:
    """Latency in milliseconds."""
    return latency_ttis(model, k) * tti_us / 1000.0


def max_rounds(model: RttModel, budget_ms: float, tti_us: float = 125.0) -> int | None:
    """Largest number of retransmissions that fits ``budget_ms``, or ``None``
    when not even the first transmission does."""
    if not budget_ms > 0:
        raise ValueError("budget_ms must be positive")
    # The small slack keeps exact boundaries such as 1.5 ms / 125 us inclusive.
    budget_ttis = budget_ms * 1000.0 / tti_us
    base = model.tx_ttis + model.rx_proc_ttis
    if base > budget_ttis + 1e-9:
        return None
    return int((budget_ttis - base + 1e-9) // model.rtt)


@dataclass(frozen=True)
class TimelineResult:
    model: RttModel
    tti_us: float = 125.0

    def latency_ttis(self, k: int) -> int:
        return latency_ttis(self.model, k)

    def latency_ms(self, k: int) -> float:
        return latency_for_rounds(self.model, k, self.tti_us)

    def k_max(self, budget_ms: float) -> int | None:
        return max_rounds(self.model, budget_ms, self.tti_us)


# --- Multi-process scheduling ----------------------------------------------

@dataclass(frozen=True)
class ScheduleEntry:
    tti_index: int
    node: str
    action: str
    block_id: int


def multiprocess_schedule(model: RttModel, n_processes: int, horizon_ttis: int, *,
                          retransmitter: str = "relay") -> list[ScheduleEntry]:
    """Events of ``n_processes`` HARQ processes on consecutive TTIs.

    Process ``u`` owns TTIs ``u, u + rtt, u + 2 rtt, ...`` and alternates
    between a new block and the slot reserved for that block's
    retransmission. The destination answers ``feedback_delay`` TTIs after each
    assignment ends. Entries at or past ``horizon_ttis`` are dropped.

    Raises :class:`ScheduleConflict` when two events collide, which happens as
    soon as ``n_processes`` exceeds the RTT.
    """
    if n_processes < 1:
        raise ValueError("n_processes must be at least 1")
    if horizon_ttis < 0:
        raise ValueError("horizon_ttis must be nonnegative")
    rtt = model.rtt
    entries: list[ScheduleEntry] = []
    block = 0
    for start in range(0, max(horizon_ttis, 1), 2 * rtt):
        for u in range(n_processes):
            t = start + u
            for at, node, action in ((t, "source", "transmit"),
                                     (t + rtt, retransmitter, "retransmit")):
                entries.append(ScheduleEntry(at, node, action, block))
                entries.append(ScheduleEntry(at + model.tx_ttis - 1 + model.feedback_delay,
                                             "destination", "feedback", block))
            block += 1
    entries = [e for e in entries if e.tti_index < horizon_ttis]
    _check_conflicts(entries)
    return sorted(entries, key=lambda e: (e.tti_index, e.block_id, e.node))


def _check_conflicts(entries) -> None:
    seen: dict = {}
    for e in entries:
        key = (e.tti_index, e.node)
        if key in seen:
            raise ScheduleConflict(
                f"TTI {e.tti_index}: {e.node} has both {seen[key]} and "
                f"{e.action} of block {e.block_id}")
        seen[key] = f"{e.action} of block {e.block_id}"
    # The source and the relay share the channel in Phase III.
    tx = {}
    for e in entries:
        if e.action in ("transmit", "retransmit"):
            if e.tti_index in tx:
                raise ScheduleConflict(
                    f"TTI {e.tti_index}: {tx[e.tti_index]} and {e.action} of block "
                    f"{e.block_id} overlap")
            tx[e.tti_index] = f"{e.action} of block {e.block_id}"


def schedule_to_csv(entries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["tti_index", "node", "action", "block_id"])
    for e in entries:
        w.writerow([e.tti_index, e.node, e.action, e.block_id])
    return buf.getvalue()


def decoded_blocks_per_tti(model: RttModel, n_processes: int, horizon_ttis: int) -> float:
    """Throughput in blocks per TTI when every block decodes at once.

    Every ACKed process reuses its reserved slot for a new block, so each
    process starts one block per RTT.
    """
    if horizon_ttis < 1:
        raise ValueError("horizon_ttis must be positive")
    if not 1 <= n_processes <= model.rtt:
        raise ScheduleConflict(f"{n_processes} processes do not fit an RTT of {model.rtt}")
    full, rest = divmod(horizon_ttis, model.rtt)
    return (full * n_processes + min(rest, n_processes)) / horizon_ttis


# --- Latency at a reliability target ----------------------------------------

@dataclass(frozen=True)
class LatencyPoint:
    snr_db: float
    rounds: int | None
    latency_ms: float | None
    outage: float | None

    @property
    def feasible(self) -> bool:
        return self.rounds is not None


def latency_at_reliability(params: SystemParams, scheme: Scheme, target_outage: float,
                           budget_ms: float, snr_grid_db, *, spec=None,
                           model: RttModel = RttModel(), redraw: str = "fresh",
                           outage_fn=None) -> list[LatencyPoint]:
    """Smallest latency meeting ``target_outage`` at each transmit SNR.

    The SNR sets ``P_S = P_R = P``; the relay-free reference keeps its default
    power ``p_s2d``. ``outage_fn(params, scheme, k)`` defaults to the analytic
    multi-round model; every retransmission there sees a fresh gain unless
    ``redraw`` says otherwise.
    """
    if not 0.0 < target_outage < 1.0:
        raise ValueError("target_outage must be in (0, 1)")
    k_budget = max_rounds(model, budget_ms, params.tti_us)
    spec = spec or analytic.DEFAULT_SPEC
    if outage_fn is None:
        outage_fn = lambda p, s, k: analytic.outage_with_rounds(p, s, k, spec, redraw)
    points = []
    for snr in snr_grid_db:
        p = validate(params.with_(p_s=db2lin(snr), p_r=db2lin(snr)))
        found = None
        if k_budget is not None:
            for k in range(k_budget + 1):
                out = outage_fn(p, Scheme(scheme), k)
                if out <= target_outage:
                    found = (k, out)
                    break
        if found is None:
            points.append(LatencyPoint(float(snr), None, None, None))
        else:
            k, out = found
            points.append(LatencyPoint(float(snr), k, latency_for_rounds(model, k, params.tti_us),
                                       out))
    return points


def first_feasible_snr(points) -> float | None:
    for pt in points:
        if pt.feasible:
            return pt.snr_db
    return None
