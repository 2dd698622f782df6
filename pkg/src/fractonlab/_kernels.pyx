# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Semantics mirror ``_pykernels`` draw-for-draw."""

import numpy as np
from libc.stdint cimport uint64_t, int64_t, int8_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _draw(uint64_t key, uint64_t *counter) nogil:
    cdef uint64_t z
    counter[0] += 1
    z = key + counter[0] * GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline void _shuffle(int64_t[::1] order, uint64_t key, uint64_t *counter) nogil:
    cdef Py_ssize_t n = order.shape[0], i, j
    cdef int64_t tmp
    for i in range(n):
        order[i] = i
    for i in range(n - 1, 0, -1):
        j = <Py_ssize_t>(((_draw(key, counter) >> 32) * <uint64_t>(i + 1)) >> 32)
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp


cdef inline int64_t _local_sum(int8_t[::1] bond, const int64_t[::1] sp_ptr,
                               const int64_t[::1] sp_cpl, Py_ssize_t i) nogil:
    cdef int64_t s = 0
    cdef Py_ssize_t a
    for a in range(sp_ptr[i], sp_ptr[i + 1]):
        s += bond[sp_cpl[a]]
    return s


cdef inline void _flip(int8_t[::1] spins, int8_t[::1] bond, const int64_t[::1] sp_ptr,
                       const int64_t[::1] sp_cpl, Py_ssize_t i) nogil:
    cdef Py_ssize_t a
    spins[i] = -spins[i]
    for a in range(sp_ptr[i], sp_ptr[i + 1]):
        bond[sp_cpl[a]] = -bond[sp_cpl[a]]


def sweeps(int8_t[::1] spins, int8_t[::1] bond, const int64_t[::1] sp_ptr,
           const int64_t[::1] sp_cpl, const double[::1] accept, uint64_t key, uint64_t counter,
           Py_ssize_t n_sweeps, Py_ssize_t n_micro, int64_t energy,
           int64_t[::1] energy_out, int64_t[::1] order):
    """Run ``n_sweeps`` Metropolis sweeps, each followed by ``n_micro``
    zero-cost sweeps. Returns (energy, counter, accepted, micro_flips)."""
    cdef Py_ssize_t n = spins.shape[0], t, m, k, i
    cdef Py_ssize_t record = energy_out.shape[0] > 0
    cdef int64_t s, accepted = 0, flips = 0
    cdef double u
    with nogil:
        for t in range(n_sweeps):
            _shuffle(order, key, &counter)
            for k in range(n):
                i = order[k]
                s = _local_sum(bond, sp_ptr, sp_cpl, i)
                u = (_draw(key, &counter) >> 11) * INV_2_53
                if s <= 0 or u < accept[s]:
                    _flip(spins, bond, sp_ptr, sp_cpl, i)
                    energy += 2 * s
                    accepted += 1
            for m in range(n_micro):
                _shuffle(order, key, &counter)
                for k in range(n):
                    i = order[k]
                    if _local_sum(bond, sp_ptr, sp_cpl, i) == 0:
                        _flip(spins, bond, sp_ptr, sp_cpl, i)
                        flips += 1
            if record:
                energy_out[t] = energy
    return energy, counter, accepted, flips


def micro_sweeps(int8_t[::1] spins, int8_t[::1] bond, const int64_t[::1] sp_ptr,
                 const int64_t[::1] sp_cpl, uint64_t key, uint64_t counter,
                 Py_ssize_t n_sweeps, int64_t[::1] order):
    """Zero-cost flips only. Returns (counter, flips)."""
    cdef Py_ssize_t n = spins.shape[0], t, k, i
    cdef int64_t flips = 0
    with nogil:
        for t in range(n_sweeps):
            _shuffle(order, key, &counter)
            for k in range(n):
                i = order[k]
                if _local_sum(bond, sp_ptr, sp_cpl, i) == 0:
                    _flip(spins, bond, sp_ptr, sp_cpl, i)
                    flips += 1
    return counter, flips


def energy_spectrum(Py_ssize_t n_spins, const int64_t[::1] sp_ptr, const int64_t[::1] sp_cpl,
                    const int8_t[::1] eta, int64_t[::1] counts):
    """Gray-code walk over all 2**n_spins states starting from all-up.

    ``counts[(E + n_couplings) // 2]`` is incremented for every state."""
    cdef Py_ssize_t nc = eta.shape[0], c, i
    cdef uint64_t t, total = (<uint64_t>1) << n_spins
    cdef int64_t energy = 0, s
    cdef int8_t[::1] bond = np.array(eta, dtype=np.int8)
    for c in range(nc):
        energy -= bond[c]
    with nogil:
        counts[(energy + nc) // 2] += 1
        for t in range(1, total):
            i = 0
            while not ((t >> i) & 1):
                i += 1
            s = 0
            for c in range(sp_ptr[i], sp_ptr[i + 1]):
                s += bond[sp_cpl[c]]
                bond[sp_cpl[c]] = -bond[sp_cpl[c]]
            energy += 2 * s
            counts[(energy + nc) // 2] += 1


def gf2_rank(uint64_t[:, ::1] rows, Py_ssize_t n_cols):
    """Rank over GF(2) of bit-packed rows (modified in place)."""
    cdef Py_ssize_t m = rows.shape[0], nw = rows.shape[1]
    cdef Py_ssize_t r = 0, col, w, p, i, k
    cdef uint64_t bit, tmp
    with nogil:
        for col in range(n_cols):
            if r >= m:
                break
            w = col >> 6
            bit = (<uint64_t>1) << (col & 63)
            p = r
            while p < m and not (rows[p, w] & bit):
                p += 1
            if p == m:
                continue
            if p != r:
                for k in range(w, nw):
                    tmp = rows[p, k]
                    rows[p, k] = rows[r, k]
                    rows[r, k] = tmp
            for i in range(r + 1, m):
                if rows[i, w] & bit:
                    for k in range(w, nw):
                        rows[i, k] ^= rows[r, k]
            r += 1
    return r
