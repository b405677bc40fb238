"""Sparse-representation bit accounting vs ship-only-complex, on identical
syndrome streams.

The sparse scheme spends one flag bit on an all-zero vector and otherwise
1 + k * ceil(log2 N) bits for k set bits (index list, framing-delimited);
the local-triage scheme ships nothing unless a cycle classifies Complex, in
which case the full raw decode window goes off-chip.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import montecarlo
from .bandwidth import request_payload_bits

AFS = "AFS"
CLIQUE = "CliqueShipOnComplex"
RAW = "Raw"


@dataclass
class BitsAccount:
    scheme: str
    avg_bits_per_cycle: float
    reduction_vs_raw: float


def afs_bits(syndrome) -> int:
    """Sparse-representation size of one bit vector."""
    bits = np.asarray(syndrome)
    n = bits.size
    if n < 1:
        raise ValueError("empty syndrome")
    k = int(np.count_nonzero(bits))
    return afs_bits_from_count(k, n)


def afs_bits_from_count(k, n) -> int:
    if k == 0:
        return 1
    return 1 + k * math.ceil(math.log2(n))


def clique_bits(outcome_class, n_window) -> int:
    """Shipped bits for one cycle: nothing unless the decode goes off-chip."""
    if outcome_class in ("AllZero", "Trivial", 0, 1):
        return 0
    if outcome_class in ("Complex", 2):
        return int(n_window)
    raise ValueError(f"unknown class: {outcome_class}")


def compare(d, p, cycles, seed, workers=1):
    """Account both schemes on one stream; ratio = afs.avg / clique.avg."""
    stats, classes, set_bits = montecarlo.classify_cycles(
        d, p, cycles, seed, workers=workers, collect=True
    )
    n = d * d - 1  # combined per-round syndrome length
    window = request_payload_bits(d)
    index_bits = math.ceil(math.log2(n))

    k_total = set_bits.sum(axis=0).astype(np.int64)
    afs_total = int(cycles + (k_total * index_bits).sum())  # 1 flag bit per cycle
    clique_total = int((classes == 2).sum()) * window

    afs_avg = afs_total / cycles
    clique_avg = clique_total / cycles
    accounts = {
        "afs": BitsAccount(AFS, afs_avg, n / afs_avg),
        "clique": BitsAccount(CLIQUE, clique_avg, n / clique_avg if clique_avg else math.inf),
        "raw": BitsAccount(RAW, float(n), 1.0),
    }
    ratio = afs_avg / clique_avg if clique_avg else math.inf
    return {**accounts, "ratio": ratio, "stats": stats}
