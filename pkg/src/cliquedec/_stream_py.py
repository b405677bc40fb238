"""Pure-numpy stream kernel: vectorized draws and detection assembly, with a
per-cycle cover search only where set bits actually touch.

Mirrors the compiled kernel's draw order exactly; see backend.py.
"""

import numpy as np
from scipy import sparse

_CHUNK = 4096
_COVER_BUDGET = 200_000


def _csr_cache(ptype):
    if not hasattr(ptype, "_csr"):
        n_data = ptype.data_anc.shape[0]
        rows, cols = [], []
        for q in range(n_data):
            for a in ptype.data_anc[q]:
                if a >= 0:
                    rows.append(q)
                    cols.append(int(a))
        h = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.uint8), (rows, cols)),
            shape=(n_data, ptype.n_anc),
        )
        arows, acols = [], []
        for a in range(ptype.n_anc):
            for b in ptype.nbrs[a]:
                if b >= 0:
                    arows.append(a)
                    acols.append(int(b))
        adj = sparse.csr_matrix(
            (np.ones(len(arows), dtype=np.uint8), (arows, acols)),
            shape=(ptype.n_anc, ptype.n_anc),
        )
        ptype._csr = (h, adj)
    return ptype._csr


def _coverable(set_ids, nbrs, disch, counter):
    """Disjoint-footprint cover search over one cycle's set ancillas."""

    def go(remaining):
        counter[0] -= 1
        if counter[0] <= 0:
            counter[1] = True
            return False
        if not remaining:
            return True
        v = min(remaining)
        rest = remaining - {v}
        if disch[v] and go(rest):
            return True
        for w in nbrs[v]:
            w = int(w)
            if w >= 0 and w in rest and go(rest - {w}):
                return True
        return False

    return go(frozenset(int(i) for i in set_ids))


def _classify_rows(eff, nb_count, ptype):
    """Class code per cycle row; returns (codes uint8, overflow count)."""
    codes = np.zeros(eff.shape[0], dtype=np.uint8)
    hot = eff.astype(bool)
    nonzero = hot.any(axis=1)
    codes[nonzero] = 1
    # a set bit with no set neighbor and no discharge escape kills the cover
    lonely_bad = (hot & (nb_count == 0) & (ptype.disch == 0)).any(axis=1)
    codes[lonely_bad] = 2
    has_edge = (hot & (nb_count > 0)).any(axis=1)
    overflow = 0
    for i in np.flatnonzero(has_edge & ~lonely_bad):
        set_ids = np.flatnonzero(eff[i])
        if len(set_ids) > 64:  # matches the compiled kernel's bitmask cap
            codes[i] = 2
            overflow += 1
            continue
        counter = [_COVER_BUDGET, False]
        ok = _coverable(set_ids, ptype.nbrs, ptype.disch, counter)
        codes[i] = 1 if ok else 2
        if counter[1]:
            overflow += 1
    return codes, overflow


def classify_segment(geom, p_data, p_meas, n_cycles, rng, collect=False):
    from .backend import SegmentStats

    x, z = geom.types
    n_data = geom.n_data
    draw_cycles = n_cycles + 1  # lookahead row for ghost confirmation

    data_bits = {t.name: np.empty((draw_cycles, n_data), dtype=bool) for t in (x, z)}
    meas_bits = {t.name: np.empty((draw_cycles, t.n_anc), dtype=bool) for t in (x, z)}

    lo = 0
    while lo < draw_cycles:
        hi = min(lo + _CHUNK, draw_cycles)
        u = rng.random((hi - lo, geom.width))
        c0 = 0
        for t in (x, z):
            data_bits[t.name][lo:hi] = u[:, c0 : c0 + n_data] < p_data
            c0 += n_data
            meas_bits[t.name][lo:hi] = u[:, c0 : c0 + t.n_anc] < p_meas
            c0 += t.n_anc
        lo = hi

    counts = np.zeros((2, 3), dtype=np.int64)
    per_type_codes = []
    k_arrays = []
    overflow = 0
    for ti, t in enumerate((x, z)):
        h, adj = _csr_cache(t)
        data = data_bits[t.name][:n_cycles].astype(np.uint8)
        syn = np.asarray((h.T @ data.T).T, dtype=np.uint8) & 1
        m = meas_bits[t.name]
        # a measurement-error run of >= 2 rounds defeats the two-round filter
        # at both edges: a ghost defect where it enters and where it exits
        entry = m[:n_cycles] & m[1 : n_cycles + 1]
        entry[1:] &= ~m[: n_cycles - 1]
        exit_ = np.zeros_like(entry)
        exit_[2:] = m[1 : n_cycles - 1] & m[: n_cycles - 2] & ~m[2:n_cycles]
        eff = syn ^ (entry | exit_).astype(np.uint8)
        nb_count = np.asarray((adj @ eff.T).T)
        codes, ovf = _classify_rows(eff, nb_count, t)
        overflow += ovf
        per_type_codes.append(codes)
        k_arrays.append(eff.sum(axis=1).astype(np.uint16))
        counts[ti] = np.bincount(codes, minlength=3)

    combined_codes = np.maximum(per_type_codes[0], per_type_codes[1])
    combined = np.bincount(combined_codes, minlength=3).astype(np.int64)
    return SegmentStats(
        counts=counts,
        combined=combined,
        overflow=overflow,
        classes=combined_codes if collect else None,
        set_bits=np.stack(k_arrays) if collect else None,
    )
