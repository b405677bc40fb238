"""Off-chip decode bandwidth: percentile provisioning, carryover backlog and
decode-overflow stalling for a many-logical-qubit device.

Each cycle every logical qubit independently produces an off-chip decode
request with probability q (or a trace supplies per-cycle request counts).
The link serves up to B requests per cycle; any end-of-cycle backlog stalls
the next cycle, and stalled cycles keep generating new errors, so demand
never pauses.  Provisioning at the mean diverges (zero-drift reflected walk);
provisioning at a high percentile yields rare, isolated stalls.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sstats

from .rng import substream


@dataclass
class DemandModel:
    num_qubits: int
    q_complex: float = None  # Bernoulli mode
    trace: np.ndarray = None  # per-cycle request counts (trace mode)

    def __post_init__(self):
        if (self.q_complex is None) == (self.trace is None):
            raise ValueError("exactly one of q_complex or trace required")
        if self.q_complex is not None and not 0 <= self.q_complex <= 1:
            raise ValueError("q_complex out of range")

    def draw(self, cycles, rng):
        if self.trace is not None:
            if len(self.trace) < cycles:
                raise ValueError("trace shorter than simulated cycles")
            return np.asarray(self.trace[:cycles], dtype=np.int64)
        return rng.binomial(self.num_qubits, self.q_complex, size=cycles).astype(np.int64)


@dataclass
class BandwidthTrace:
    provisioned_B: int
    new: np.ndarray
    carryover: np.ndarray
    served: np.ndarray
    is_stall: np.ndarray
    stall_fraction: float = field(init=False)
    exec_time_overhead: float = field(init=False)
    max_backlog: int = field(init=False)

    def __post_init__(self):
        cycles = len(self.new)
        stalls = int(self.is_stall.sum())
        work = cycles - stalls
        self.stall_fraction = stalls / cycles
        self.exec_time_overhead = stalls / work if work else math.inf
        self.max_backlog = int((self.carryover + self.new - self.served).max())


def percentile_provision(model: DemandModel, percentile, sample_cycles=100_000, seed=0):
    """Smallest B with P(new requests per cycle <= B) >= percentile/100."""
    if not 0 <= percentile <= 100:
        raise ValueError("percentile out of range")
    if model.trace is not None:
        sample = np.asarray(model.trace)
    elif percentile == 100:
        return int(model.num_qubits)
    else:
        return int(sstats.binom.ppf(percentile / 100, model.num_qubits, model.q_complex))
    return int(np.quantile(sample, percentile / 100, method="inverted_cdf"))


def simulate(model: DemandModel, B, cycles, seed=0) -> BandwidthTrace:
    """Queue evolution: serve up to B per cycle; end-of-cycle backlog stalls
    the next cycle; stall cycles generate demand like work cycles."""
    if B < 0 or cycles < 1:
        raise ValueError("need B >= 0 and cycles >= 1")
    new = model.draw(cycles, substream(seed, 0))
    carryover = np.zeros(cycles, dtype=np.int64)
    served = np.zeros(cycles, dtype=np.int64)
    is_stall = np.zeros(cycles, dtype=bool)
    backlog = 0
    for t in range(cycles):
        is_stall[t] = backlog > 0
        carryover[t] = backlog
        avail = backlog + int(new[t])
        served[t] = min(B, avail)
        backlog = avail - served[t]
    return BandwidthTrace(
        provisioned_B=int(B), new=new, carryover=carryover, served=served, is_stall=is_stall
    )


def request_payload_bits(d, rounds=None):
    """Raw syndrome bits of one shipped decode window: (d^2 - 1) per round."""
    rounds = d if rounds is None else rounds
    return (d * d - 1) * rounds


def tradeoff_curve(model: DemandModel, percentile_grid, cycles, seed=0, payload_bits=1):
    """Bandwidth-reduction factor vs execution-time increase per percentile.

    Reduction compares against shipping every qubit's window every cycle:
    (L x payload) / (B x payload) = L / B.
    """
    if not len(percentile_grid):
        raise ValueError("empty percentile grid")
    rows = []
    for pct in percentile_grid:
        B = max(1, percentile_provision(model, pct, seed=seed))
        trace = simulate(model, B, cycles, seed=seed)
        raw = model.num_qubits * payload_bits
        rows.append(
            {
                "percentile": pct,
                "B": B,
                "bandwidth_reduction_factor": raw / (B * payload_bits),
                "exec_time_increase": trace.exec_time_overhead,
                "stall_fraction": trace.stall_fraction,
            }
        )
    return rows
