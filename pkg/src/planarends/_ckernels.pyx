# cython: language_level=3
"""Compiled twins of the kernels in ``_pykernels``.

Same flat layout and return values; see that module for the conventions.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport frexp, log, INFINITY

cdef double LN2 = 0.6931471805599453

cnp.import_array()

BACKEND = "cython"

ctypedef double complex cplx


cdef inline double cabs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


def force_sums(points, level_ptr):
    cdef cplx[::1] p = np.ascontiguousarray(points, dtype=np.complex128)
    cdef long long[::1] ptr = np.ascontiguousarray(level_ptr, dtype=np.int64)
    cdef Py_ssize_t nlev = ptr.shape[0] - 1
    F_arr = np.zeros(p.shape[0], dtype=np.complex128)
    G_arr = np.zeros(nlev, dtype=np.complex128)
    cdef cplx[::1] F = F_arr
    cdef cplx[::1] G = G_arr
    cdef Py_ssize_t k, i, j
    cdef double ck, cu, cl
    cdef cplx acc, gacc, pi
    with nogil:
        for k in range(nlev):
            ck = 1.0 / (ptr[k + 1] - ptr[k])
            gacc = 0
            for i in range(ptr[k], ptr[k + 1]):
                pi = p[i]
                acc = 0
                for j in range(ptr[k], ptr[k + 1]):
                    if j != i:
                        acc = acc + 2.0 * ck * ck / (pi - p[j])
                if k + 1 < nlev:
                    cu = 1.0 / (ptr[k + 2] - ptr[k + 1])
                    for j in range(ptr[k + 1], ptr[k + 2]):
                        acc = acc - ck * cu / (pi - p[j])
                if k > 0:
                    cl = 1.0 / (ptr[k] - ptr[k - 1])
                    for j in range(ptr[k - 1], ptr[k]):
                        acc = acc - ck * cl / (pi - p[j])
                        gacc = gacc + ck * cl / (pi - p[j])
                F[i] = acc
            G[k] = gacc
    return F_arr, G_arr


def force_jacobian(points, level_ptr):
    cdef cplx[::1] p = np.ascontiguousarray(points, dtype=np.complex128)
    cdef long long[::1] ptr = np.ascontiguousarray(level_ptr, dtype=np.int64)
    cdef Py_ssize_t nlev = ptr.shape[0] - 1
    cdef Py_ssize_t npts = p.shape[0]
    indptr_arr = np.zeros(npts + 1, dtype=np.int64)
    cdef long long[::1] indptr = indptr_arr
    cdef Py_ssize_t k, r, j, lo, hi, pos
    for k in range(nlev):
        lo = ptr[k - 1] if k > 0 else ptr[0]
        hi = ptr[k + 2] if k + 2 <= nlev else ptr[nlev]
        for r in range(ptr[k], ptr[k + 1]):
            indptr[r + 1] = indptr[r] + (hi - lo)
    indices_arr = np.empty(indptr[npts], dtype=np.int64)
    data_arr = np.empty(indptr[npts], dtype=np.complex128)
    cdef long long[::1] indices = indices_arr
    cdef cplx[::1] data = data_arr
    cdef double ck, cu, cl
    cdef cplx diag, w, pr
    with nogil:
        for k in range(nlev):
            ck = 1.0 / (ptr[k + 1] - ptr[k])
            lo = ptr[k - 1] if k > 0 else ptr[0]
            hi = ptr[k + 2] if k + 2 <= nlev else ptr[nlev]
            for r in range(ptr[k], ptr[k + 1]):
                pr = p[r]
                pos = indptr[r]
                diag = 0
                for j in range(lo, hi):
                    indices[pos + j - lo] = j
                    data[pos + j - lo] = 0
                for j in range(ptr[k], ptr[k + 1]):
                    if j != r:
                        w = 2.0 * ck * ck / ((pr - p[j]) * (pr - p[j]))
                        data[pos + j - lo] = w
                        diag = diag - w
                if k + 1 < nlev:
                    cu = 1.0 / (ptr[k + 2] - ptr[k + 1])
                    for j in range(ptr[k + 1], ptr[k + 2]):
                        w = ck * cu / ((pr - p[j]) * (pr - p[j]))
                        data[pos + j - lo] = -w
                        diag = diag + w
                if k > 0:
                    cl = 1.0 / (ptr[k] - ptr[k - 1])
                    for j in range(ptr[k - 1], ptr[k]):
                        w = ck * cl / ((pr - p[j]) * (pr - p[j]))
                        data[pos + j - lo] = -w
                        diag = diag + w
                data[pos + r - lo] = diag
    return indptr_arr, indices_arr, data_arr


def gvalue_jacobian(points, level_ptr):
    cdef cplx[::1] p = np.ascontiguousarray(points, dtype=np.complex128)
    cdef long long[::1] ptr = np.ascontiguousarray(level_ptr, dtype=np.int64)
    cdef Py_ssize_t nlev = ptr.shape[0] - 1
    indptr_arr = np.zeros(nlev + 1, dtype=np.int64)
    cdef long long[::1] indptr = indptr_arr
    cdef Py_ssize_t k, i, j, s, nlow
    for k in range(nlev):
        indptr[k + 1] = indptr[k] + ((ptr[k + 1] - ptr[k - 1]) if k > 0 else 0)
    indices_arr = np.empty(indptr[nlev], dtype=np.int64)
    data_arr = np.zeros(indptr[nlev], dtype=np.complex128)
    cdef long long[::1] indices = indices_arr
    cdef cplx[::1] data = data_arr
    cdef double ck, cl
    cdef cplx w
    with nogil:
        for k in range(1, nlev):
            ck = 1.0 / (ptr[k + 1] - ptr[k])
            cl = 1.0 / (ptr[k] - ptr[k - 1])
            s = indptr[k]
            nlow = ptr[k] - ptr[k - 1]
            for j in range(ptr[k - 1], ptr[k + 1]):
                indices[s + j - ptr[k - 1]] = j
            for i in range(ptr[k], ptr[k + 1]):
                for j in range(ptr[k - 1], ptr[k]):
                    w = ck * cl / ((p[i] - p[j]) * (p[i] - p[j]))
                    data[s + j - ptr[k - 1]] = data[s + j - ptr[k - 1]] + w
                    data[s + nlow + i - ptr[k]] = data[s + nlow + i - ptr[k]] - w
    return indptr_arr, indices_arr, data_arr


def min_separation(points, level_ptr):
    cdef cplx[::1] p = np.ascontiguousarray(points, dtype=np.complex128)
    cdef long long[::1] ptr = np.ascontiguousarray(level_ptr, dtype=np.int64)
    cdef Py_ssize_t nlev = ptr.shape[0] - 1
    cdef Py_ssize_t k, i, j, hi
    cdef Py_ssize_t bi = -1, bj = -1
    cdef double best = INFINITY, d
    with nogil:
        for k in range(nlev):
            hi = ptr[k + 2] if k + 2 <= nlev else ptr[nlev]
            for i in range(ptr[k], ptr[k + 1]):
                for j in range(i + 1, hi):
                    d = cabs2(p[i] - p[j])
                    if d < best:
                        best = d
                        bi = i
                        bj = j
    if bi < 0:
        return (float("inf"), -1, -1)
    return (best ** 0.5, int(bi), int(bj))


def log_potential(x, centers, weights):
    x_arr = np.asarray(x, dtype=np.complex128)
    shape = x_arr.shape
    c_arr = np.asarray(centers, dtype=np.complex128).ravel()
    w_arr = np.asarray(weights, dtype=np.float64).ravel()
    # centres sharing a weight are folded into one product, kept as mantissa
    # and exponent, so each group costs a single log per point
    wu, inv = np.unique(w_arr, return_inverse=True)
    order = np.argsort(inv, kind="stable")
    cdef cplx[::1] xs = np.ascontiguousarray(x_arr.ravel())
    cdef cplx[::1] cs = np.ascontiguousarray(c_arr[order])
    cdef double[::1] gw = np.ascontiguousarray(wu)
    cdef long[::1] gptr = np.concatenate([[0], np.cumsum(np.bincount(inv, minlength=len(wu)))]
                                         ).astype(np.int_)
    out_arr = np.zeros(xs.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t m, j, g
    cdef double acc, prod
    cdef int e, ei
    with nogil:
        for m in range(xs.shape[0]):
            acc = 0.0
            for g in range(gw.shape[0]):
                prod = 1.0
                e = 0
                for j in range(gptr[g], gptr[g + 1]):
                    prod = prod * cabs2(xs[m] - cs[j])
                    if prod > 1e150 or prod < 1e-150:
                        prod = frexp(prod, &ei)
                        e = e + ei
                acc = acc + 0.5 * gw[g] * (log(prod) + e * LN2)
            out[m] = acc
    return out_arr.reshape(shape)
