"""Kernel backend selection for the lifetime classification stream.

The hot loop (per-cycle noise draw, detection-bit assembly, coverable-vs-
complex classification) runs over millions of cycles, so it is implemented
twice with one draw-order contract: a Cython extension (`_stream`) and a
vectorized numpy fallback (`_stream_py`), selected at import.  Both consume
the generator stream identically -- per cycle, n_data + n_X + n_data + n_Z
uniform doubles in that column order -- so tallies and per-cycle outputs are
bit-identical across backends.

Set CLIQUEDEC_PURE=1 to force the fallback.
"""

import os
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice


@dataclass
class PackedType:
    name: str
    n_anc: int
    data_anc: np.ndarray  # (n_data, 2) int32, type-local ancilla indices, -1 pad
    nbrs: np.ndarray  # (n_anc, 4) int32, type-local neighbor indices, -1 pad
    disch: np.ndarray  # (n_anc,) uint8, has a discharge qubit


@dataclass
class Geometry:
    distance: int
    n_data: int
    types: tuple  # (PackedType, PackedType) for X, Z
    width: int  # doubles consumed per draw cycle


def _pack_type(lat: Lattice, t) -> PackedType:
    n_anc = lat.n_ancillas(t)
    data_anc = np.full((lat.n_data, 2), -1, dtype=np.int32)
    for q in lat.data_sites:
        for slot, aid in enumerate(lat.supports_of(q, t)):
            data_anc[q, slot] = lat.ancillas[aid].index
    nbrs = np.full((n_anc, 4), -1, dtype=np.int32)
    disch = np.zeros(n_anc, dtype=np.uint8)
    for aid in lat.type_ancillas[t]:
        a = lat.ancillas[aid]
        for slot, b in enumerate(sorted(lat.same_type_neighbors[aid])):
            nbrs[a.index, slot] = lat.ancillas[b].index
        disch[a.index] = 1 if aid in lat.boundary_discharge else 0
    return PackedType(name=t, n_anc=n_anc, data_anc=data_anc, nbrs=nbrs, disch=disch)


def make_geometry(lat: Lattice) -> Geometry:
    x, z = _pack_type(lat, "X"), _pack_type(lat, "Z")
    return Geometry(
        distance=lat.distance,
        n_data=lat.n_data,
        types=(x, z),
        width=2 * lat.n_data + x.n_anc + z.n_anc,
    )


@dataclass
class SegmentStats:
    """Tallies over one stream segment; class codes 0=AllZero 1=Trivial 2=Complex."""

    counts: np.ndarray  # (2, 3) per-type cycle class counts
    combined: np.ndarray  # (3,) both-type composition (complex dominates)
    overflow: int  # cycles classified Complex because the cover search hit its budget
    classes: np.ndarray = None  # uint8 per cycle, when collected
    set_bits: np.ndarray = None  # (2, cycles) uint16 detection-bit counts per type


if os.environ.get("CLIQUEDEC_PURE"):
    from . import _stream_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _stream as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _stream_py as _impl

        BACKEND = "pure"


def classify_segment(geom: Geometry, p_data, p_meas, n_cycles, rng, collect=False) -> SegmentStats:
    """Classify `n_cycles` decode cycles of one noise stream segment.

    Per cycle and type, the detection vector is the syndrome of that cycle's
    new data errors XOR sticking-measurement ghost bits (a measurement error
    repeating in the next round); the class is AllZero, Trivial when the
    vector is coverable by disjoint single-error footprints, else Complex.
    """
    if n_cycles < 1:
        raise ValueError("n_cycles must be >= 1")
    return _impl.classify_segment(geom, float(p_data), float(p_meas), int(n_cycles), rng, collect)
