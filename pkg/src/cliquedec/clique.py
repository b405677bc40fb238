"""Local triage decoder: two-round measurement filtering plus per-clique
parity checks that split decode cycles into all-zero / trivial / complex.

The filter works on flip vectors (XORs of consecutive raw syndrome rounds).
A flip that appears at round t and is silent in the rounds either side is
persistent data-error evidence; a flip followed by a flip on the same
ancilla one round later is a transient measurement artifact and both are
cancelled on the spot.

Triage then inspects every set ancilla of the filtered vector: with n set
same-type clique neighbors the local pattern is trivial iff n is odd, or
n = 0 and the ancilla has a boundary discharge qubit.  One even/empty clique
anywhere makes the whole cycle complex.  Trivial corrections are the shared
qubits of set neighbor pairs plus one discharge qubit per lone set ancilla.
"""

from dataclasses import dataclass, field

import numpy as np

from .lattice import Lattice, syndrome_of

ALL_ZERO = "AllZero"
TRIVIAL = "Trivial"
COMPLEX = "Complex"


@dataclass
class EffectiveSyndrome:
    bits: np.ndarray  # uint8 over one type's ancillas
    cancelled_pairs: int = 0


@dataclass
class TriageOutcome:
    klass: str
    corrections: set = field(default_factory=set)
    complex_cliques: set = field(default_factory=set)


def filter_rounds(flips_prev, flips_curr, flips_next) -> EffectiveSyndrome:
    """Keep flips that stick: set at t, silent at t-1 and t+1.

    Vertical pairs (set at t and t+1) are dropped as measurement errors and
    counted, so the caller can account for defects consumed on-chip.
    """
    prev = np.asarray(flips_prev, dtype=np.uint8)
    curr = np.asarray(flips_curr, dtype=np.uint8)
    nxt = np.asarray(flips_next, dtype=np.uint8)
    eff = curr & ~prev & ~nxt & 1
    cancelled = int(np.count_nonzero(curr & nxt))
    return EffectiveSyndrome(bits=eff.astype(np.uint8), cancelled_pairs=cancelled)


def correction_lines(lat: Lattice, bits, type) -> set:
    """Data qubits fired by the AND-gate semantics on a filtered vector:
    the shared qubit of every set adjacent pair, plus the lowest-id discharge
    qubit of every set ancilla with no set neighbor.
    """
    ids = lat.type_ancillas[type]
    set_ids = [ids[i] for i in np.flatnonzero(bits)]
    set_lookup = set(set_ids)
    fired = set()
    for a in set_ids:
        hot = lat.same_type_neighbors[a] & set_lookup
        for b in hot:
            fired.add(lat.shared_qubit[frozenset((a, b))])
        if not hot and a in lat.boundary_discharge:
            fired.add(lat.boundary_discharge[a][0])
    return fired


def triage(lat: Lattice, eff: EffectiveSyndrome, type) -> TriageOutcome:
    """Classify one filtered round and emit local corrections when trivial."""
    bits = np.asarray(eff.bits if isinstance(eff, EffectiveSyndrome) else eff)
    if not bits.any():
        return TriageOutcome(ALL_ZERO)

    ids = lat.type_ancillas[type]
    set_ids = [ids[i] for i in np.flatnonzero(bits)]
    set_lookup = set(set_ids)
    bad = set()
    for a in set_ids:
        n = len(lat.same_type_neighbors[a] & set_lookup)
        trivial = (n % 2 == 1) or (n == 0 and a in lat.boundary_discharge)
        if not trivial:
            bad.add(a)
    if bad:
        return TriageOutcome(COMPLEX, complex_cliques=bad)
    return TriageOutcome(TRIVIAL, corrections=correction_lines(lat, bits, type))


def signature_class(lat: Lattice, bits, type) -> str:
    """Classify a detection vector by what a local scheme can in principle
    decode: trivial iff the set bits are coverable by disjoint single-error
    footprints (adjacent set pairs, or a lone dischargeable ancilla).

    Equivalent to triage_oracle but polynomial: per connected component of
    the set-ancilla graph, search a pairing that leaves only dischargeable
    vertices single.  The gate-level triage rule is conservative relative to
    this notion (it hands off some coverable patterns), so coverage and
    bandwidth accounting use this classifier.
    """
    bits = np.asarray(bits)
    if not bits.any():
        return ALL_ZERO
    ids = lat.type_ancillas[type]
    set_ids = [ids[i] for i in np.flatnonzero(bits)]
    return TRIVIAL if coverable(lat, set_ids) else COMPLEX


def coverable(lat: Lattice, set_ids) -> bool:
    """True iff every set ancilla can be consumed by a disjoint footprint:
    paired with an adjacent set ancilla, or left alone when dischargeable."""
    remaining = set(set_ids)

    def consume(verts):
        if not verts:
            return True
        v = min(verts)
        rest = verts - {v}
        if v in lat.boundary_discharge and consume(rest):
            return True
        for w in lat.same_type_neighbors[v] & rest:
            if consume(rest - {w}):
                return True
        return False

    # component by component keeps the recursion tiny
    while remaining:
        comp = set()
        stack = [min(remaining)]
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(lat.same_type_neighbors[v] & remaining - comp)
        remaining -= comp
        if not consume(frozenset(comp)):
            return False
    return True


def triage_oracle(lat: Lattice, eff, type) -> str:
    """Reference classifier: trivial iff the bits are exactly explainable by
    isolated single data errors (no ancilla flipped twice).

    Brute-force exact cover by single-error footprints; restricted to small
    instances.
    """
    bits = np.asarray(eff.bits if isinstance(eff, EffectiveSyndrome) else eff)
    k = int(np.count_nonzero(bits))
    if lat.distance > 5 and k > 8:
        raise ValueError("oracle restricted to d <= 5 or <= 8 set bits")
    if k == 0:
        return ALL_ZERO

    ids = lat.type_ancillas[type]
    target = frozenset(ids[i] for i in np.flatnonzero(bits))
    # Footprint of each candidate single error, kept only if it lands in the
    # target (an isolated error may not touch a clean ancilla).
    tiles = {}
    for q in lat.data_sites:
        foot = frozenset(lat.supports_of(q, type))
        if foot <= target:
            tiles.setdefault(foot, q)

    def cover(remaining):
        if not remaining:
            return True
        a = min(remaining)
        for foot in tiles:
            if a in foot and foot <= remaining:
                if cover(remaining - foot):
                    return True
        return False

    return TRIVIAL if cover(target) else COMPLEX


def verify_soundness(lat: Lattice, eff, outcome: TriageOutcome, type) -> bool:
    """Trivial corrections must reproduce the effective syndrome exactly."""
    if outcome.klass != TRIVIAL:
        return True
    bits = np.asarray(eff.bits if isinstance(eff, EffectiveSyndrome) else eff)
    return bool(np.array_equal(syndrome_of(lat, outcome.corrections, type), bits))
