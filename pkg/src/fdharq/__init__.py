"""Outage and latency of full-duplex amplify-and-forward relaying with HARQ.

The package is split into parameter handling (:mod:`~fdharq.config`), channel
sampling (:mod:`~fdharq.channel`), instantaneous SINRs (:mod:`~fdharq.sinr`),
numerical outage integrals (:mod:`~fdharq.analytic`), a Monte Carlo oracle
(:mod:`~fdharq.montecarlo`), HARQ timing (:mod:`~fdharq.timeline`) and sweep
tooling (:mod:`~fdharq.experiments`, :mod:`~fdharq.cli`).
"""

from .config import ConfigError, Scheme, SystemParams, from_db

__all__ = ["ConfigError", "Scheme", "SystemParams", "from_db"]
__version__ = "0.1.0"
