# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cython gate-application kernel: the hot inner loop of the simulator.

Amplitude indices touched by a gate are enumerated as submasks of the
free-bit mask (bits not fixed by controls or targets).  The contiguous run
of low free bits is peeled into a straight inner loop, so the common case
(gates controlled on high ancilla wires) walks memory linearly.
"""

BACKEND = "cython"


cdef inline long long _trailing_ones(long long mask):
    cdef long long r = 0
    while mask & 1:
        r += 1
        mask >>= 1
    return r


def apply_ops(double complex[::1] amps, int width, py_ops, arrays):
    kinds_o, us_o, tsh1_o, tsh2_o, cval_o, fmask_o = arrays
    cdef const signed char[::1] kinds = kinds_o
    cdef const double complex[:, :, ::1] us = us_o
    cdef const long long[::1] tsh1 = tsh1_o
    cdef const long long[::1] tsh2 = tsh2_o
    cdef const long long[::1] cval = cval_o
    cdef const long long[::1] fmask = fmask_o

    cdef Py_ssize_t g, ngates = kinds.shape[0]
    cdef long long s, i, j, b1, b2, base, fm, cv, hi_mask, run, low_len, stop
    cdef double complex u00, u01, u10, u11, a0, a1

    for g in range(ngates):
        fm = fmask[g]
        cv = cval[g]
        b1 = (<long long> 1) << tsh1[g]
        run = _trailing_ones(fm)
        low_len = (<long long> 1) << run
        hi_mask = fm & ~(low_len - 1)
        if kinds[g] == 0:
            u00 = us[g, 0, 0]
            u01 = us[g, 0, 1]
            u10 = us[g, 1, 0]
            u11 = us[g, 1, 1]
            s = hi_mask
            while True:
                base = s | cv
                stop = base + low_len
                for i in range(base, stop):
                    j = i | b1
                    a0 = amps[i]
                    a1 = amps[j]
                    amps[i] = u00 * a0 + u01 * a1
                    amps[j] = u10 * a0 + u11 * a1
                if s == 0:
                    break
                s = (s - 1) & hi_mask
        else:
            b2 = (<long long> 1) << tsh2[g]
            s = hi_mask
            while True:
                base = s | cv
                stop = base + low_len
                for i in range(base, stop):
                    a0 = amps[i | b1]
                    amps[i | b1] = amps[i | b2]
                    amps[i | b2] = a0
                if s == 0:
                    break
                s = (s - 1) & hi_mask
