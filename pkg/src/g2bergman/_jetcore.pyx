# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled truncated product for dense order-4 jets."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef int MAXPAIRS = 1024
cdef int _npairs = 0
cdef int _out[1024]
cdef int _left[1024]
cdef int _right[1024]


def set_pairs(pair_out, pair_left, pair_right):
    """Install the (output, left, right) index triples once at import."""
    global _npairs
    n = len(pair_out)
    if n > MAXPAIRS:
        raise ValueError("too many product pairs")
    for p in range(n):
        _out[p] = pair_out[p]
        _left[p] = pair_left[p]
        _right[p] = pair_right[p]
    _npairs = n


def jet_mul(cnp.ndarray a, cnp.ndarray b):
    """Truncated product of two contiguous complex128 coefficient arrays."""
    if (a.dtype.num != cnp.NPY_CDOUBLE or b.dtype.num != cnp.NPY_CDOUBLE
            or not cnp.PyArray_IS_C_CONTIGUOUS(a) or not cnp.PyArray_IS_C_CONTIGUOUS(b)):
        a = np.ascontiguousarray(a, dtype=np.complex128)
        b = np.ascontiguousarray(b, dtype=np.complex128)
    if a.shape[0] != b.shape[0]:
        raise ValueError("jet sizes differ")
    cdef cnp.ndarray out = cnp.PyArray_ZEROS(1, a.shape, cnp.NPY_CDOUBLE, 0)
    # interleaved (re, im) doubles; explicit arithmetic avoids the C99
    # complex multiply helper, which dominates otherwise
    cdef double* pa = <double*> cnp.PyArray_DATA(a)
    cdef double* pb = <double*> cnp.PyArray_DATA(b)
    cdef double* po = <double*> cnp.PyArray_DATA(out)
    cdef int p, i, j, k
    for p in range(_npairs):
        k = 2 * _out[p]
        i = 2 * _left[p]
        j = 2 * _right[p]
        po[k] += pa[i] * pb[j] - pa[i + 1] * pb[j + 1]
        po[k + 1] += pa[i] * pb[j + 1] + pa[i + 1] * pb[j]
    return out
