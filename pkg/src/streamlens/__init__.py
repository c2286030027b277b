"""Forensic analysis toolkit for archived tweet streams.

Submodules split by pipeline stage: ingest (stream parsing), network
(conversation graphs), botcal (detector score calibration), audit
(account status checks), characterize (content and account profiles),
topics (hashtag topics and similarity expansion), synth (reproducible
test corpora), snapshot (pipeline orchestration and persistence), and
server (read-only HTTP views over snapshots).
"""
from . import audit, botcal, characterize, ingest, network, snapshot, synth, topics
from .snapshot import AnalysisConfig, SnapshotStore, load_config, snapshot_build

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "SnapshotStore",
    "__version__",
    "audit",
    "botcal",
    "characterize",
    "ingest",
    "load_config",
    "network",
    "snapshot",
    "snapshot_build",
    "synth",
    "topics",
]
