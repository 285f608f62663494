# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled duel-sampling loop.

Mirrors _duelpy.run_duel exactly: one next_double per sample from the pair's
BitGenerator, counts carried in an int64[3] array, stopping decided by the
precomputed integer stop table.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t


def run_duel(bit_generator, double c1, double c2, bint rev,
             long long[::1] counts, const long long[::1] boundary,
             long long budget):
    """Same contract as _duelpy.run_duel; see there."""
    cdef bitgen_t *rng
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("expected a BitGenerator capsule")
    rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")

    cdef long long s1 = counts[0]
    cdef long long s2 = counts[1]
    cdef long long s3 = counts[2]
    cdef long long total = s1 + s2 + s3
    cdef Py_ssize_t blen = boundary.shape[0]
    cdef double u
    cdef int k
    cdef long long a, b
    cdef int status = 0

    with nogil:
        while True:
            if budget >= 0 and total >= budget:
                status = -1
                break
            u = rng.next_double(rng.state)
            if u < c1:
                k = 1
            elif u < c2:
                k = 2
            else:
                k = 3
            if rev:
                k = 4 - k
            if k == 1:
                s1 += 1
            elif k == 2:
                s2 += 1
            else:
                s3 += 1
            total += 1
            if s1 >= s2:
                if s2 >= s3:
                    a = s1; b = s2
                elif s1 >= s3:
                    a = s1; b = s3
                else:
                    a = s3; b = s1
            elif s1 >= s3:
                a = s2; b = s1
            elif s2 >= s3:
                a = s2; b = s3
            else:
                a = s3; b = s2
            if b >= blen:
                status = 0
                break
            if a >= boundary[b]:
                status = 1
                break

    counts[0] = s1
    counts[1] = s2
    counts[2] = s3
    return status
