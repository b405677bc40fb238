# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled stream kernel.

Mirrors _stream_py draw-for-draw: per cycle the generator supplies
n_data + n_X + n_data + n_Z uniform doubles in that column order, so both
backends produce identical tallies, classes and set-bit counts from the
same generator state.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

cnp.import_array()

DEF MAXSET = 64

cdef long COVER_BUDGET = 200_000


cdef inline int _lowbit(unsigned long long x) noexcept:
    cdef int i = 0
    while not (x >> i) & 1ULL:
        i += 1
    return i


cdef int _go(unsigned long long remaining, signed char* loc_nbrs,
             unsigned char* loc_disch, long* budget, unsigned char* overflow) noexcept:
    budget[0] -= 1
    if budget[0] <= 0:
        overflow[0] = 1
        return 0
    if remaining == 0:
        return 1
    cdef int v = _lowbit(remaining)
    cdef unsigned long long rest = remaining & (remaining - 1)
    if loc_disch[v] and _go(rest, loc_nbrs, loc_disch, budget, overflow):
        return 1
    cdef int s, w
    for s in range(4):
        w = loc_nbrs[4 * v + s]
        if w >= 0 and (rest >> w) & 1ULL:
            if _go(rest & ~(1ULL << w), loc_nbrs, loc_disch, budget, overflow):
                return 1
    return 0


cdef int _classify(int* sset, int k, const int[:, ::1] nbrs,
                   const unsigned char[::1] disch, unsigned char* eff,
                   int* loc_of, long* overflow_cycles) noexcept:
    """Class code for one cycle and type: 0 AllZero, 1 Trivial, 2 Complex."""
    if k == 0:
        return 0
    cdef int i, s, j, nb
    cdef bint has_edge = 0, lonely_bad = 0
    for i in range(k):
        nb = 0
        for s in range(4):
            j = nbrs[sset[i], s]
            if j >= 0 and eff[j]:
                nb += 1
        if nb > 0:
            has_edge = 1
        elif not disch[sset[i]]:
            lonely_bad = 1
    if lonely_bad:
        return 2
    if not has_edge:
        return 1
    if k > MAXSET:
        overflow_cycles[0] += 1
        return 2

    cdef signed char loc_nbrs[4 * MAXSET]
    cdef unsigned char loc_disch[MAXSET]
    for i in range(k):
        loc_of[sset[i]] = i
    for i in range(k):
        loc_disch[i] = disch[sset[i]]
        for s in range(4):
            j = nbrs[sset[i], s]
            if j >= 0 and eff[j]:
                loc_nbrs[4 * i + s] = <signed char> loc_of[j]
            else:
                loc_nbrs[4 * i + s] = -1

    cdef long budget = COVER_BUDGET
    cdef unsigned char ovf = 0
    cdef unsigned long long full
    if k == 64:
        full = <unsigned long long> (-1)
    else:
        full = (1ULL << k) - 1
    cdef int ok = _go(full, loc_nbrs, loc_disch, &budget, &ovf)
    if ovf:
        overflow_cycles[0] += 1
    return 1 if ok else 2


def classify_segment(geom, double p_data, double p_meas, int n_cycles, rng, collect=False):
    from .backend import SegmentStats

    x, z = geom.types
    cdef int n_data = geom.n_data
    cdef const int[:, ::1] danc_x = x.data_anc
    cdef const int[:, ::1] danc_z = z.data_anc
    cdef const int[:, ::1] nbrs_x = x.nbrs
    cdef const int[:, ::1] nbrs_z = z.nbrs
    cdef const unsigned char[::1] disch_x = x.disch
    cdef const unsigned char[::1] disch_z = z.disch
    cdef int nx = x.n_anc
    cdef int nz = z.n_anc
    cdef int nmax = nx if nx > nz else nz

    capsule = rng.bit_generator.capsule
    cdef bitgen_t* gen = <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")

    # ping-pong detection buffers plus touch lists; measurement ring of 3
    eff_np = np.zeros((2, 2, nmax), dtype=np.uint8)  # [type][parity][ancilla]
    touched_np = np.zeros((2, 2, 2 * n_data + nmax + 8), dtype=np.int32)
    tcount_np = np.zeros((2, 2), dtype=np.int32)
    meas_np = np.zeros((2, 4, nmax), dtype=np.uint8)  # ring: rounds T .. T-3
    sset_np = np.zeros(nmax, dtype=np.int32)
    loc_np = np.zeros(nmax, dtype=np.int32)
    counts_np = np.zeros((2, 3), dtype=np.int64)
    combined_np = np.zeros(3, dtype=np.int64)
    classes_np = np.zeros(n_cycles if collect else 1, dtype=np.uint8)
    kbits_np = np.zeros((2, n_cycles if collect else 1), dtype=np.uint16)

    cdef unsigned char[:, :, ::1] eff = eff_np
    cdef int[:, :, ::1] touched = touched_np
    cdef int[:, ::1] tcount = tcount_np
    cdef unsigned char[:, :, ::1] meas = meas_np
    cdef int[::1] sset = sset_np
    cdef int[::1] loc_of = loc_np
    cdef long[:, ::1] counts = counts_np
    cdef long[::1] combined = combined_np
    cdef unsigned char[::1] classes = classes_np
    cdef unsigned short[:, ::1] kbits = kbits_np

    cdef long overflow = 0
    cdef int T, t, q, a, s, i, j, k, ti, cur, prev, code_x, code_z, code, ghost
    cdef int do_collect = 1 if collect else 0
    cdef double u

    for T in range(n_cycles + 1):
        cur = T & 1
        # draw order: data X, meas X, data Z, meas Z
        for ti in range(2):
            for q in range(n_data):
                u = gen.next_double(gen.state)
                if u < p_data:
                    for s in range(2):
                        a = danc_x[q, s] if ti == 0 else danc_z[q, s]
                        if a >= 0:
                            eff[ti, cur, a] ^= 1
                            touched[ti, cur, tcount[ti, cur]] = a
                            tcount[ti, cur] += 1
            j = nx if ti == 0 else nz
            for a in range(j):
                u = gen.next_double(gen.state)
                meas[ti, T & 3, a] = 1 if u < p_meas else 0

        if T == 0:
            continue
        t = T - 1
        prev = t & 1
        code_x = 0
        code_z = 0
        for ti in range(2):
            j = nx if ti == 0 else nz
            # a measurement-error run of >= 2 rounds defeats the two-round
            # filter at both edges: ghost defects where it enters and exits
            for a in range(j):
                if meas[ti, t & 3, a] and meas[ti, T & 3, a]:
                    ghost = 0 if (t >= 1 and meas[ti, (t - 1) & 3, a]) else 1
                elif (t >= 2 and not meas[ti, t & 3, a]
                      and meas[ti, (t - 1) & 3, a] and meas[ti, (t - 2) & 3, a]):
                    ghost = 1
                else:
                    ghost = 0
                if ghost:
                    eff[ti, prev, a] ^= 1
                    touched[ti, prev, tcount[ti, prev]] = a
                    tcount[ti, prev] += 1
            # collect set ancillas, sorted and deduplicated
            k = 0
            for i in range(tcount[ti, prev]):
                a = touched[ti, prev, i]
                if eff[ti, prev, a] == 1:
                    eff[ti, prev, a] = 2  # mark collected
                    sset[k] = a
                    k += 1
            for i in range(k):
                eff[ti, prev, sset[i]] = 1
            # insertion sort (k is small)
            for i in range(1, k):
                a = sset[i]
                s = i - 1
                while s >= 0 and sset[s] > a:
                    sset[s + 1] = sset[s]
                    s -= 1
                sset[s + 1] = a

            if ti == 0:
                code = _classify(&sset[0] if k else NULL, k, nbrs_x, disch_x,
                                 &eff[0, prev, 0], &loc_of[0], &overflow)
                code_x = code
            else:
                code = _classify(&sset[0] if k else NULL, k, nbrs_z, disch_z,
                                 &eff[1, prev, 0], &loc_of[0], &overflow)
                code_z = code
            counts[ti, code] += 1
            if do_collect:
                kbits[ti, t] = <unsigned short> k
            # reset this parity's buffer for reuse two cycles later
            for i in range(tcount[ti, prev]):
                eff[ti, prev, touched[ti, prev, i]] = 0
            tcount[ti, prev] = 0

        code = code_x if code_x > code_z else code_z
        combined[code] += 1
        if do_collect:
            classes[t] = <unsigned char> code

    return SegmentStats(
        counts=counts_np,
        combined=combined_np,
        overflow=int(overflow),
        classes=classes_np if collect else None,
        set_bits=kbits_np if collect else None,
    )
