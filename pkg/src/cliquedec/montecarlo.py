"""Lifetime Monte Carlo: signature-class distributions (coverage) and
logical error rates for the matching baseline vs. local triage + matching.

Coverage streams are segmented with per-segment generator substreams and
fixed segment length, so tallies are identical for any worker count.  LER
trials get one substream each for the same reason.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import backend, clique, lattice, matching, noise
from .rng import substream

SEGMENT = 65_536
BASELINE = "baseline"
CLIQUE_BASELINE = "clique+baseline"

ALL_ZERO, LOCAL_ONES, COMPLEX = 0, 1, 2


@dataclass
class CoverageStats:
    distance: int
    p: float
    cycles: int
    frac_all0: float
    frac_local1: float
    frac_complex: float
    per_type: dict  # type -> (frac_all0, frac_local1, frac_complex)
    overflow: int = 0

    @property
    def coverage(self):
        return self.frac_all0 + self.frac_local1


@dataclass
class LerResult:
    distance: int
    p: float
    trials: int
    logical_failures: int
    mode: str

    @property
    def ler(self):
        return self.logical_failures / self.trials

    @property
    def wilson_ci(self):
        return wilson_interval(self.logical_failures, self.trials)


def wilson_interval(failures, trials, z=1.959963984540054):
    if trials == 0:
        return (0.0, 1.0)
    phat = failures / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@lru_cache(maxsize=None)
def _lattice(d):
    return lattice.build(d)


@lru_cache(maxsize=None)
def _geometry(d):
    return backend.make_geometry(_lattice(d))


def _segments(cycles):
    segs = []
    start = 0
    while start < cycles:
        segs.append(min(SEGMENT, cycles - start))
        start += SEGMENT
    return segs


def _coverage_segment(args):
    d, p, n, seed, path, collect = args
    stats = backend.classify_segment(_geometry(d), p, p, n, substream(seed, *path), collect)
    return stats


def classify_cycles(d, p, cycles, seed, workers=1, collect=False, stream=()):
    """Stream `cycles` decode cycles, tallying AllZero / Local-1s / Complex.

    With collect=True also returns the per-cycle combined class and per-type
    detection-bit counts (concatenated in segment order).  `stream` prefixes
    the substream address, so distinct logical qubits can share one root seed.
    """
    segs = _segments(cycles)
    tasks = [(d, p, n, seed, tuple(stream) + (i,), collect) for i, n in enumerate(segs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_coverage_segment, tasks))
    else:
        results = [_coverage_segment(t) for t in tasks]

    counts = sum(r.counts for r in results)
    combined = sum(r.combined for r in results)
    overflow = sum(r.overflow for r in results)
    per_type = {t: tuple(counts[ti] / cycles) for ti, t in enumerate(("X", "Z"))}
    stats = CoverageStats(
        distance=d,
        p=p,
        cycles=cycles,
        frac_all0=combined[ALL_ZERO] / cycles,
        frac_local1=combined[LOCAL_ONES] / cycles,
        frac_complex=combined[COMPLEX] / cycles,
        per_type=per_type,
        overflow=overflow,
    )
    if collect:
        classes = np.concatenate([r.classes for r in results])
        set_bits = np.concatenate([r.set_bits for r in results], axis=1)
        return stats, classes, set_bits
    return stats


def demand_trace(d, p, cycles, num_qubits, seed, workers=1):
    """Per-cycle off-chip request counts from num_qubits independent logical
    qubits, for the bandwidth simulator's trace mode."""
    counts = np.zeros(cycles, dtype=np.int64)
    for q in range(num_qubits):
        _, classes, _ = classify_cycles(
            d, p, cycles, seed, workers=workers, collect=True, stream=(q,)
        )
        counts += classes == COMPLEX
    return counts


def _block_flips(rounds):
    flips = [rounds[0].copy()]
    for t in range(1, len(rounds)):
        flips.append(rounds[t] ^ rounds[t - 1])
    return flips


def _defects_of(lat, type, flips):
    ids = lat.type_ancillas[type]
    return [
        (ids[i], t) for t, f in enumerate(flips) for i in np.flatnonzero(f)
    ]


def _logical_failure(lat, type, residual):
    return len(residual & lat.logical_operator[type]) % 2 == 1


def run_trial(lat, params, mode, rng):
    """One memory block: d noisy rounds + perfect readout, decoded per mode.

    Returns (failure, complex_block): failure means the residual error after
    all corrections anticommutes with either logical string.
    """
    d = lat.distance
    blocks = {t: noise.run_block(lat, params, d, True, type=t, rng=rng) for t in ("X", "Z")}
    flips = {t: _block_flips(blocks[t].rounds) for t in ("X", "Z")}
    defects = {t: _defects_of(lat, t, flips[t]) for t in ("X", "Z")}

    corrections = {t: set() for t in ("X", "Z")}
    complex_block = False

    if mode == BASELINE:
        for t in ("X", "Z"):
            if defects[t]:
                out = matching.decode(
                    lat, matching.SpacetimeDefectSet(defects[t], window=d, type=t)
                )
                corrections[t] = out.corrections
        complex_block = any(defects.values())
    elif mode == CLIQUE_BASELINE:
        consumed = {t: set() for t in ("X", "Z")}
        for t in ("X", "Z"):
            f = flips[t]
            ids = lat.type_ancillas[t]
            zero = np.zeros_like(f[0])
            for r in range(d):  # noisy rounds; the perfect round only confirms
                prev = f[r - 1] if r >= 1 else zero
                eff = clique.filter_rounds(prev, f[r], f[r + 1])
                # vertical pairs cancelled on-chip as measurement errors
                for i in np.flatnonzero(f[r] & f[r + 1]):
                    head = (ids[i], r)
                    if head not in consumed[t]:
                        consumed[t].add(head)
                        consumed[t].add((ids[i], r + 1))
                out = clique.triage(lat, eff, t)
                if out.klass == clique.COMPLEX:
                    complex_block = True
                elif out.klass == clique.TRIVIAL:
                    corrections[t] ^= out.corrections
                    for i in np.flatnonzero(eff.bits):
                        key = (ids[i], r)
                        assert key not in consumed[t], "defect consumed twice"
                        consumed[t].add(key)
        if complex_block:
            # Complex blocks ship the raw rounds off-chip: matching decodes the
            # full defect set and the tentative local corrections are revoked
            # (the correction record is classical, so revising it is free).
            # Keeping on-chip guesses while matching sees only leftovers breaks
            # degenerate cases where a data chain masquerades as a vertical
            # measurement pair.
            for t in ("X", "Z"):
                corrections[t] = set()
                if defects[t]:
                    out = matching.decode(
                        lat, matching.SpacetimeDefectSet(defects[t], window=d, type=t)
                    )
                    corrections[t] = out.corrections
    else:
        raise ValueError(f"unknown mode: {mode}")

    failure = False
    for t in ("X", "Z"):
        err = set(np.flatnonzero(blocks[t].final_frame.data_errors).tolist())
        failure |= _logical_failure(lat, t, err ^ corrections[t])
    return failure, complex_block


def _ler_chunk(args):
    d, p, mode, seed, start, count = args
    lat = _lattice(d)
    params = noise.NoiseParams(p, seed=seed)
    failures = 0
    complexes = 0
    for i in range(start, start + count):
        fail, cplx = run_trial(lat, params, mode, substream(seed, i))
        failures += int(fail)
        complexes += int(cplx)
    return failures, complexes


def estimate_ler(d, p, trials, mode, seed, workers=1, chunk=2048):
    """Logical error rate per block over independent seeded trials."""
    tasks = []
    start = 0
    while start < trials:
        n = min(chunk, trials - start)
        tasks.append((d, p, mode, seed, start, n))
        start += n
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_ler_chunk, tasks))
    else:
        results = [_ler_chunk(t) for t in tasks]
    failures = sum(r[0] for r in results)
    return LerResult(distance=d, p=p, trials=trials, logical_failures=failures, mode=mode)
