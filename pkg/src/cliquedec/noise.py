"""Phenomenological noise: independent data-qubit flips and measurement-bit
flips each round, one Pauli sector per frame.

Data errors toggle and persist across rounds until corrected; measurement
errors corrupt only the round they land in.  X-type and Z-type errors are
corrected independently, so a frame is bound to one ancilla type and
combined statistics come from composing two independent simulations.
"""

from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice
from .rng import substream


@dataclass
class NoiseParams:
    p_data: float
    p_meas: float = None  # defaults to p_data (single-parameter model)
    seed: int = 0

    def __post_init__(self):
        if self.p_meas is None:
            self.p_meas = self.p_data
        for p in (self.p_data, self.p_meas):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability out of range: {p}")


@dataclass
class ErrorFrame:
    type: str
    data_errors: np.ndarray  # uint8 per data qubit, accumulated
    meas_errors_this_round: np.ndarray  # uint8 per ancilla of the type


@dataclass
class BlockResult:
    rounds: list  # reported syndrome per round
    final_frame: ErrorFrame


_h_cache = {}


def check_matrix(lat: Lattice, type) -> np.ndarray:
    """Dense (n_ancillas, n_data) incidence matrix of the type."""
    key = (id(lat), lat.distance, type)
    if key not in _h_cache:
        h = np.zeros((lat.n_ancillas(type), lat.n_data), dtype=np.uint8)
        for aid in lat.type_ancillas[type]:
            a = lat.ancillas[aid]
            for q in a.support:
                h[a.index, q] = 1
        _h_cache[key] = h
    return _h_cache[key]


def new_frame(lat: Lattice, type) -> ErrorFrame:
    return ErrorFrame(
        type=type,
        data_errors=np.zeros(lat.n_data, dtype=np.uint8),
        meas_errors_this_round=np.zeros(lat.n_ancillas(type), dtype=np.uint8),
    )


def true_syndrome(lat: Lattice, frame: ErrorFrame) -> np.ndarray:
    return (check_matrix(lat, frame.type) @ frame.data_errors) & 1


def step(lat: Lattice, frame: ErrorFrame, params: NoiseParams, rng) -> np.ndarray:
    """One noisy round: flip data qubits, read stabilizers, corrupt readout.

    Draw order (data flips then measurement flips) is part of the
    reproducibility contract shared with the stream kernels.
    """
    flips = (rng.random(lat.n_data) < params.p_data).astype(np.uint8)
    frame.data_errors ^= flips
    meas = (rng.random(lat.n_ancillas(frame.type)) < params.p_meas).astype(np.uint8)
    frame.meas_errors_this_round = meas
    return true_syndrome(lat, frame) ^ meas


def run_block(
    lat: Lattice, params: NoiseParams, rounds, perfect_final, type="X", rng=None
) -> BlockResult:
    """A block of noisy rounds, optionally closed with one perfect readout."""
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if rng is None:
        rng = substream(params.seed)
    frame = new_frame(lat, type)
    reported = [step(lat, frame, params, rng) for _ in range(rounds)]
    if perfect_final:
        reported.append(true_syndrome(lat, frame))
        frame.meas_errors_this_round = np.zeros(lat.n_ancillas(type), dtype=np.uint8)
    return BlockResult(rounds=reported, final_frame=frame)
