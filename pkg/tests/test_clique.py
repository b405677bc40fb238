import itertools

import numpy as np
import pytest

from cliquedec.clique import (
    ALL_ZERO,
    COMPLEX,
    TRIVIAL,
    EffectiveSyndrome,
    correction_lines,
    coverable,
    filter_rounds,
    signature_class,
    triage,
    triage_oracle,
    verify_soundness,
)
from cliquedec.lattice import TYPES, build, syndrome_of


def footprint(lat, q, t):
    return frozenset(lat.supports_of(q, t))


def isolated_singles_sets(lat, t, max_qubits=None):
    """All error sets whose single-error footprints are pairwise disjoint."""
    n = lat.n_data if max_qubits is None else max_qubits
    for r in range(n + 1):
        for combo in itertools.combinations(range(lat.n_data), r):
            feet = [footprint(lat, q, t) for q in combo]
            if all(f1.isdisjoint(f2) for f1, f2 in itertools.combinations(feet, 2)):
                yield set(combo)


def sample_isolated_singles(lat, t, rng, max_errors=4):
    errors, used = set(), set()
    for q in rng.permutation(lat.n_data):
        if len(errors) >= rng.integers(0, max_errors + 1):
            break
        foot = footprint(lat, int(q), t)
        if foot.isdisjoint(used):
            errors.add(int(q))
            used |= foot
    return errors


def test_filter_isolated_flip_sticks():
    zero = np.zeros(4, dtype=np.uint8)
    curr = np.array([0, 1, 0, 0], dtype=np.uint8)
    eff = filter_rounds(zero, curr, zero)
    assert np.array_equal(eff.bits, curr)
    assert eff.cancelled_pairs == 0


def test_filter_vertical_pair_cancelled():
    zero = np.zeros(4, dtype=np.uint8)
    flip = np.array([0, 1, 0, 0], dtype=np.uint8)
    eff = filter_rounds(zero, flip, flip)
    assert not eff.bits.any()
    assert eff.cancelled_pairs == 1


def test_filter_tail_of_prior_flip_suppressed():
    zero = np.zeros(3, dtype=np.uint8)
    flip = np.array([1, 0, 0], dtype=np.uint8)
    eff = filter_rounds(flip, flip, zero)
    assert not eff.bits.any()


def test_filter_all_zero():
    zero = np.zeros(5, dtype=np.uint8)
    eff = filter_rounds(zero, zero, zero)
    assert not eff.bits.any()
    assert eff.cancelled_pairs == 0


def test_triage_all_zero():
    lat = build(3)
    out = triage(lat, EffectiveSyndrome(np.zeros(4, dtype=np.uint8)), "X")
    assert out.klass == ALL_ZERO
    assert not out.corrections


def test_triage_adjacent_pair_gives_shared_qubit():
    lat = build(5)
    for t in TYPES:
        for q in lat.data_sites:
            owners = lat.supports_of(q, t)
            if len(owners) != 2:
                continue
            eff = EffectiveSyndrome(syndrome_of(lat, {q}, t))
            out = triage(lat, eff, t)
            assert out.klass == TRIVIAL
            assert out.corrections == {q}
            assert verify_soundness(lat, eff, out, t)


def test_triage_lone_interior_ancilla_complex():
    lat = build(5)
    # m=4 ancilla with no discharge qubits: lone set bit has no local story
    aid = next(
        a.id
        for a in lat.ancillas
        if len(lat.same_type_neighbors[a.id]) == 4 and a.id not in lat.boundary_discharge
    )
    bits = np.zeros(lat.n_ancillas(lat.ancillas[aid].type), dtype=np.uint8)
    bits[lat.ancillas[aid].index] = 1
    out = triage(lat, EffectiveSyndrome(bits), lat.ancillas[aid].type)
    assert out.klass == COMPLEX
    assert out.complex_cliques == {aid}
    assert not out.corrections


def test_triage_two_discharge_choices_equivalent():
    # set ancilla with both neighbors unset and two discharge qubits: either
    # correction differs by a weight-2 stabilizer of the opposite type
    found = 0
    for d in (3, 7):
        lat = build(d)
        for aid, qubits in lat.boundary_discharge.items():
            if len(qubits) < 2:
                continue
            found += 1
            a = lat.ancillas[aid]
            bits = np.zeros(lat.n_ancillas(a.type), dtype=np.uint8)
            bits[a.index] = 1
            out = triage(lat, EffectiveSyndrome(bits), a.type)
            assert out.klass == TRIVIAL
            assert len(out.corrections) == 1 and next(iter(out.corrections)) in qubits
            # both choices explain the bit, and their difference is a stabilizer:
            # zero syndrome in this sector and even overlap with the logical
            q1, q2 = qubits[0], qubits[1]
            assert np.array_equal(syndrome_of(lat, {q1}, a.type), bits)
            assert np.array_equal(syndrome_of(lat, {q2}, a.type), bits)
            assert not syndrome_of(lat, {q1, q2}, a.type).any()
            assert len({q1, q2} & lat.logical_operator[a.type]) % 2 == 0
    assert found >= 2


def test_oracle_examples():
    lat = build(3)
    t = "X"
    interior = next(q for q in lat.data_sites if len(lat.supports_of(q, t)) == 2)
    eff = EffectiveSyndrome(syndrome_of(lat, {interior}, t))
    assert triage_oracle(lat, eff, t) == TRIVIAL
    assert triage_oracle(lat, EffectiveSyndrome(np.zeros(4, dtype=np.uint8)), t) == ALL_ZERO


def test_oracle_rejects_interior_chain():
    # a two-error chain whose endpoints sit on non-dischargeable ancillas has
    # no isolated-singles explanation (at d=3 discharge escapes exist everywhere,
    # so this needs d=5 interior qubits)
    lat = build(5)
    t = "X"
    checked = 0
    for q1, q2 in itertools.combinations(lat.data_sites, 2):
        f1, f2 = footprint(lat, q1, t), footprint(lat, q2, t)
        if len(f1) != 2 or len(f2) != 2 or len(f1 & f2) != 1:
            continue
        ends = f1 ^ f2
        if any(a in lat.boundary_discharge for a in ends):
            continue
        eff = EffectiveSyndrome(syndrome_of(lat, {q1, q2}, t))
        assert triage_oracle(lat, eff, t) == COMPLEX
        checked += 1
    assert checked > 0


def test_soundness_on_arbitrary_bit_patterns():
    lat = build(5)
    rng = np.random.default_rng(11)
    for t in TYPES:
        n = lat.n_ancillas(t)
        for _ in range(300):
            bits = (rng.random(n) < 0.15).astype(np.uint8)
            eff = EffectiveSyndrome(bits)
            out = triage(lat, eff, t)
            assert verify_soundness(lat, eff, out, t)
            if out.klass == TRIVIAL:
                assert out.corrections
            else:
                assert not out.corrections


def min_weight_table(lat, t):
    """Brute-force map syndrome -> minimum error weight producing it."""
    table = {}
    for r in range(lat.n_data + 1):
        new = 0
        for combo in itertools.combinations(range(lat.n_data), r):
            key = syndrome_of(lat, set(combo), t).tobytes()
            if key not in table:
                table[key] = r
                new += 1
        if new == 0 and r > 0:
            break
    return table


@pytest.mark.parametrize("t", TYPES)
def test_stabilizer_equivalence_exhaustive_d3(t):
    # for every minimum-weight isolated-singles error set the parity rule
    # corrects, the correction differs from the truth by a stabilizer: no
    # residual flips and even overlap with the logical string.  Non-minimal
    # sets share a syndrome with a lighter error, and failing on those is
    # forced physics for any decoder, so they are excluded.
    lat = build(3)
    table = min_weight_table(lat, t)
    for errors in isolated_singles_sets(lat, t):
        bits = syndrome_of(lat, errors, t)
        if table[bits.tobytes()] < len(errors):
            continue
        out = triage(lat, EffectiveSyndrome(bits), t)
        if out.klass != TRIVIAL:
            continue
        residual = errors ^ out.corrections
        assert not syndrome_of(lat, residual, t).any()
        assert len(residual & lat.logical_operator[t]) % 2 == 0


@pytest.mark.parametrize("t", TYPES)
def test_signature_class_matches_oracle_exhaustive_d3(t):
    lat = build(3)
    for errors in isolated_singles_sets(lat, t):
        bits = syndrome_of(lat, errors, t)
        assert signature_class(lat, bits, t) == triage_oracle(lat, EffectiveSyndrome(bits), t)
        # isolated-singles sets are trivially coverable by construction
        if errors:
            assert signature_class(lat, bits, t) == TRIVIAL


def test_signature_class_matches_oracle_random_patterns():
    rng = np.random.default_rng(23)
    for d in (3, 5):
        lat = build(d)
        for t in TYPES:
            n = lat.n_ancillas(t)
            for _ in range(400):
                bits = np.zeros(n, dtype=np.uint8)
                k = rng.integers(0, min(7, n + 1))
                bits[rng.choice(n, size=k, replace=False)] = 1
                assert signature_class(lat, bits, t) == triage_oracle(
                    lat, EffectiveSyndrome(bits), t
                )


def test_triage_is_conservative_not_equal_to_oracle():
    # documented divergence: the gate-level parity rule ships some coverable
    # patterns off-chip (two isolated errors in adjacent cliques), which is
    # safe; the classifier used for coverage follows the coverable notion
    lat = build(3)
    errors = {1, 7}
    feet = [footprint(lat, q, "X") for q in errors]
    assert feet[0].isdisjoint(feet[1])
    bits = syndrome_of(lat, errors, "X")
    eff = EffectiveSyndrome(bits)
    assert triage(lat, eff, "X").klass == COMPLEX
    assert triage_oracle(lat, eff, "X") == TRIVIAL
    assert signature_class(lat, bits, "X") == TRIVIAL


def test_triage_locality():
    # a set ancilla's local verdict ignores toggles outside its clique
    lat = build(5)
    rng = np.random.default_rng(5)
    for t in TYPES:
        ids = lat.type_ancillas[t]
        n = len(ids)
        for _ in range(100):
            bits = (rng.random(n) < 0.2).astype(np.uint8)
            out = triage(lat, EffectiveSyndrome(bits), t)
            set_idx = np.flatnonzero(bits)
            if not len(set_idx):
                continue
            a = ids[set_idx[0]]
            clique = {a} | set(lat.same_type_neighbors[a])
            far = [x for x in ids if x not in clique]
            b = far[rng.integers(len(far))]
            toggled = bits.copy()
            toggled[lat.ancillas[b].index] ^= 1
            out2 = triage(lat, EffectiveSyndrome(toggled), t)
            assert (a in out.complex_cliques) == (a in out2.complex_cliques)


def test_correction_lines_pair_semantics():
    # corrections are exactly the shared qubits of set adjacent pairs plus
    # discharge choices for lone set ancillas
    lat = build(5)
    rng = np.random.default_rng(77)
    for t in TYPES:
        ids = lat.type_ancillas[t]
        for _ in range(200):
            bits = (rng.random(len(ids)) < 0.2).astype(np.uint8)
            fired = correction_lines(lat, bits, t)
            set_ids = {ids[i] for i in np.flatnonzero(bits)}
            expect = set()
            for a in set_ids:
                hot = lat.same_type_neighbors[a] & set_ids
                for b in hot:
                    expect.add(lat.shared_qubit[frozenset((a, b))])
                if not hot and a in lat.boundary_discharge:
                    expect.add(lat.boundary_discharge[a][0])
            assert fired == expect


def test_coverable_matches_bruteforce_sampled_d5():
    lat = build(5)
    rng = np.random.default_rng(3)
    for t in TYPES:
        for _ in range(500):
            errors = sample_isolated_singles(lat, t, rng)
            bits = syndrome_of(lat, errors, t)
            ids = lat.type_ancillas[t]
            set_ids = [ids[i] for i in np.flatnonzero(bits)]
            assert coverable(lat, set_ids)
