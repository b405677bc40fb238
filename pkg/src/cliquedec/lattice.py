"""Rotated surface code geometry.

Data qubits sit at integer points (i, j) with 0 <= i, j < d and are indexed
row-major.  Stabilizers sit on plaquette centers (r, c) covering the corner
data qubits {(r,c), (r,c+1), (r+1,c), (r+1,c+1)} clipped to the grid, with a
checkerboard type assignment: X if (r + c) is even, else Z.  Weight-2 boundary
stabilizers alternate along the edges, X on top/bottom and Z on left/right,
giving d^2 data qubits and d^2 - 1 stabilizers total.

Two same-type stabilizers are "clique neighbors" when their supports share
exactly one data qubit (diagonal plaquettes).  A support qubit covered by no
other same-type stabilizer is a "discharge" qubit: flipping it flips only
that one stabilizer of the type, which is how unpaired boundary defects are
explained by a single error.
"""

from dataclasses import dataclass, field

import numpy as np

TYPES = ("X", "Z")


@dataclass(frozen=True)
class Ancilla:
    id: int
    type: str
    pos: tuple  # plaquette (row, col); boundary rows/cols may be -1 or d-1
    index: int  # position within this type's bit vectors
    support: tuple  # sorted data-qubit ids


@dataclass
class CliqueView:
    """One ancilla with its same-type neighborhood, as seen by the triage logic."""

    center: int
    neighbors: tuple  # same-type ancilla ids
    shared_qubits: dict  # neighbor ancilla id -> the one shared data qubit
    discharge_qubits: tuple  # sorted data ids flipping only the center (among its type)


@dataclass
class Lattice:
    distance: int
    data_sites: list  # data ids, 0..d^2-1 (row-major coordinates)
    ancillas: list  # Ancilla records, X block first, then Z
    same_type_neighbors: dict  # ancilla id -> frozenset of same-type ancilla ids
    shared_qubit: dict  # frozenset({a, b}) -> data id
    boundary_discharge: dict  # ancilla id -> tuple of data ids
    logical_operator: dict  # type -> frozenset of data ids
    type_ancillas: dict = field(default_factory=dict)  # type -> list of ancilla ids

    def data_coord(self, q):
        d = self.distance
        return divmod(q, d)

    def data_id(self, i, j):
        return i * self.distance + j

    @property
    def n_data(self):
        return len(self.data_sites)

    def n_ancillas(self, type=None):
        if type is None:
            return len(self.ancillas)
        return len(self.type_ancillas[type])

    def ancilla(self, aid) -> Ancilla:
        return self.ancillas[aid]

    def supports_of(self, q, type):
        """Ancilla ids of the given type whose support contains data qubit q."""
        return self._data_to_anc[type][q]

    def __post_init__(self):
        self._data_to_anc = {t: {q: [] for q in self.data_sites} for t in TYPES}
        for a in self.ancillas:
            for q in a.support:
                self._data_to_anc[a.type][q].append(a.id)


def _plaquette_corners(r, c, d):
    corners = []
    for dr, dc in ((0, 0), (0, 1), (1, 0), (1, 1)):
        i, j = r + dr, c + dc
        if 0 <= i < d and 0 <= j < d:
            corners.append(i * d + j)
    return tuple(sorted(corners))


def _plaquette_type(r, c):
    return "X" if (r + c) % 2 == 0 else "Z"


def build(d) -> Lattice:
    """Construct the distance-d lattice with all adjacency structures.

    Deterministic and pure: equal d gives structurally identical lattices.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError(f"code distance must be an odd integer >= 3, got {d}")

    positions = []
    for r in range(d - 1):
        for c in range(d - 1):
            positions.append((r, c))
    for c in range(d - 1):  # top/bottom edges carry X
        if _plaquette_type(-1, c) == "X":
            positions.append((-1, c))
        if _plaquette_type(d - 1, c) == "X":
            positions.append((d - 1, c))
    for r in range(d - 1):  # left/right edges carry Z
        if _plaquette_type(r, -1) == "Z":
            positions.append((r, -1))
        if _plaquette_type(r, d - 1) == "Z":
            positions.append((r, d - 1))

    by_type = {"X": [], "Z": []}
    for pos in positions:
        by_type[_plaquette_type(*pos)].append(pos)
    for t in TYPES:
        by_type[t].sort()

    ancillas = []
    type_ancillas = {t: [] for t in TYPES}
    for t in TYPES:
        for pos in by_type[t]:
            aid = len(ancillas)
            ancillas.append(
                Ancilla(
                    id=aid,
                    type=t,
                    pos=pos,
                    index=len(type_ancillas[t]),
                    support=_plaquette_corners(*pos, d),
                )
            )
            type_ancillas[t].append(aid)

    # Same-type neighbor relation: supports sharing exactly one data qubit.
    neighbors = {a.id: set() for a in ancillas}
    shared = {}
    for t in TYPES:
        ids = type_ancillas[t]
        for i, a in enumerate(ids):
            sa = set(ancillas[a].support)
            for b in ids[i + 1 :]:
                common = sa.intersection(ancillas[b].support)
                if len(common) == 1:
                    neighbors[a].add(b)
                    neighbors[b].add(a)
                    shared[frozenset((a, b))] = next(iter(common))

    # Discharge qubits: support members covered by no other same-type stabilizer.
    coverage = {t: {} for t in TYPES}
    for a in ancillas:
        for q in a.support:
            coverage[a.type].setdefault(q, []).append(a.id)
    discharge = {}
    for a in ancillas:
        solo = [q for q in a.support if len(coverage[a.type][q]) == 1]
        if solo:
            discharge[a.id] = tuple(sorted(solo))

    mid = (d - 1) // 2
    logical = {
        # Column of length d: even overlap with every Z support, so in the
        # X-ancilla sector its overlap parity with a residual error set is
        # stabilizer-invariant and flags a logical flip.
        "X": frozenset(i * d + mid for i in range(d)),
        # Row of length d for the Z-ancilla sector, crossing the column once.
        "Z": frozenset(mid * d + j for j in range(d)),
    }

    lat = Lattice(
        distance=d,
        data_sites=list(range(d * d)),
        ancillas=ancillas,
        same_type_neighbors={a: frozenset(n) for a, n in neighbors.items()},
        shared_qubit=shared,
        boundary_discharge=discharge,
        logical_operator=logical,
        type_ancillas=type_ancillas,
    )
    _check(lat)
    return lat


def _check(lat: Lattice):
    d = lat.distance
    assert len(lat.data_sites) == d * d
    for t in TYPES:
        assert len(lat.type_ancillas[t]) == (d * d - 1) // 2
    for a in lat.ancillas:
        assert len(a.support) in (2, 4)
        m = len(lat.same_type_neighbors[a.id])
        assert 1 <= m <= 4
        # Every clique with no even-parity escape must be dischargeable
        # (the triage rule relies on it for the always-trivial m=1 case).
        if m == 1:
            assert a.id in lat.boundary_discharge
    for q in lat.data_sites:
        for t in TYPES:
            assert 1 <= len(lat.supports_of(q, t)) <= 2


def syndrome_of(lat: Lattice, error_set, type) -> np.ndarray:
    """Bit vector over the type's ancillas: parity of |support ∩ error_set|.

    Linear over symmetric difference of error sets.
    """
    bits = np.zeros(lat.n_ancillas(type), dtype=np.uint8)
    for q in error_set:
        for aid in lat.supports_of(q, type):
            bits[lat.ancillas[aid].index] ^= 1
    return bits


def clique_of(lat: Lattice, aid) -> CliqueView:
    nbrs = tuple(sorted(lat.same_type_neighbors[aid]))
    return CliqueView(
        center=aid,
        neighbors=nbrs,
        shared_qubits={b: lat.shared_qubit[frozenset((aid, b))] for b in nbrs},
        discharge_qubits=lat.boundary_discharge.get(aid, ()),
    )
