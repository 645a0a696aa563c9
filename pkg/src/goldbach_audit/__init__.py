"""Computational checks around a claimed proof of the Goldbach conjecture.

Builds the objects the argument works with (type-P/Q primes, type-P
composites, the G-system), counts Goldbach partitions, evaluates the
explicit pi/phi bounds and audits the inequality chains numerically.
"""
from .bounds import (
    AnalyticConstants,
    BoundReport,
    check_eq1,
    check_phi_bound,
    check_pi_bound,
    f_of,
    scan_f_monotonic,
)
from .classification import (
    Classification,
    CountSummary,
    EvenTarget,
    bertrand_witness,
    classify,
    fast_counts,
)
from .gsystem import (
    ChainAuditReport,
    GEquation,
    GSystem,
    PartitionCount,
    audit_chain,
    build_gsystem,
    count_partitions,
    has_distinct_odd_partition,
    partition_counts_range,
)
from .scan import Checkpoint, ScanConfig, ScanSummary, checkpoint_load, checkpoint_save, emit_report, scan_range
from .sieve import Factorization, SieveTable, SpfTable, build_sieve, build_spf

__version__ = "0.1.0"
