"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

Used when the extension is unavailable or ``FRACTONLAB_PURE_PYTHON`` is set.
Every function consumes the random stream exactly like its compiled twin, so
trajectories are bit-identical across backends.
"""

from __future__ import annotations

from .rng import GOLDEN, INV_2_53, MASK64, mix64


def _shuffle(order, key, counter):
    n = len(order)
    for i in range(n):
        order[i] = i
    for i in range(n - 1, 0, -1):
        counter += 1
        j = ((mix64(key + counter * GOLDEN) >> 32) * (i + 1)) >> 32
        order[i], order[j] = order[j], order[i]
    return counter


def sweeps(spins, bond, sp_ptr, sp_cpl, accept, key, counter, n_sweeps, n_micro,
           energy, energy_out, order):
    n = len(spins)
    record = len(energy_out) > 0
    ptr = sp_ptr.tolist()
    cpl = sp_cpl.tolist()
    acc = accept.tolist()
    sp = spins.tolist()
    bd = bond.tolist()
    ordr = [0] * n
    key = int(key) & MASK64
    counter = int(counter)
    energy = int(energy)
    accepted = 0
    flips = 0
    for t in range(n_sweeps):
        counter = _shuffle(ordr, key, counter)
        for i in ordr:
            incident = cpl[ptr[i]:ptr[i + 1]]
            s = 0
            for c in incident:
                s += bd[c]
            counter += 1
            u = (mix64(key + counter * GOLDEN) >> 11) * INV_2_53
            if s <= 0 or u < acc[s]:
                sp[i] = -sp[i]
                for c in incident:
                    bd[c] = -bd[c]
                energy += 2 * s
                accepted += 1
        for _ in range(n_micro):
            counter = _shuffle(ordr, key, counter)
            for i in ordr:
                incident = cpl[ptr[i]:ptr[i + 1]]
                if sum(bd[c] for c in incident) == 0:
                    sp[i] = -sp[i]
                    for c in incident:
                        bd[c] = -bd[c]
                    flips += 1
        if record:
            energy_out[t] = energy
    spins[:] = sp
    bond[:] = bd
    order[:] = ordr
    return energy, counter, accepted, flips


def micro_sweeps(spins, bond, sp_ptr, sp_cpl, key, counter, n_sweeps, order):
    n = len(spins)
    ptr = sp_ptr.tolist()
    cpl = sp_cpl.tolist()
    sp = spins.tolist()
    bd = bond.tolist()
    ordr = [0] * n
    key = int(key) & MASK64
    counter = int(counter)
    flips = 0
    for _ in range(n_sweeps):
        counter = _shuffle(ordr, key, counter)
        for i in ordr:
            incident = cpl[ptr[i]:ptr[i + 1]]
            if sum(bd[c] for c in incident) == 0:
                sp[i] = -sp[i]
                for c in incident:
                    bd[c] = -bd[c]
                flips += 1
    spins[:] = sp
    bond[:] = bd
    order[:] = ordr
    return counter, flips


def energy_spectrum(n_spins, sp_ptr, sp_cpl, eta, counts):
    ptr = sp_ptr.tolist()
    cpl = sp_cpl.tolist()
    bd = eta.tolist()
    nc = len(bd)
    energy = -sum(bd)
    tally = [0] * len(counts)
    tally[(energy + nc) // 2] += 1
    for t in range(1, 1 << n_spins):
        i = (t & -t).bit_length() - 1
        s = 0
        for c in cpl[ptr[i]:ptr[i + 1]]:
            s += bd[c]
            bd[c] = -bd[c]
        energy += 2 * s
        tally[(energy + nc) // 2] += 1
    for k, v in enumerate(tally):
        counts[k] += v


def gf2_rank(rows, n_cols):
    """Rank of bit-packed uint64 rows, via Python big-int elimination."""
    n_words = rows.shape[1]
    pivots: dict[int, int] = {}
    for packed in rows:
        row = 0
        for w in range(n_words - 1, -1, -1):
            row = (row << 64) | int(packed[w])
        while row:
            lead = row.bit_length() - 1
            other = pivots.get(lead)
            if other is None:
                pivots[lead] = row
                break
            row ^= other
    return len(pivots)
