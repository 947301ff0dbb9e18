# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the dense network hot path.

Matrix products go through BLAS dgemm; the bias/relu passes are fused C
loops.  Semantically identical to the pure-numpy backend in _pybackend.
"""

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

NAME = "cython"


cdef void _gemm_rowmajor(bint trans_a, bint trans_b,
                         int m, int n, int k, double alpha,
                         double* a, int lda, double* b, int ldb,
                         double beta, double* c, int ldc) nogil:
    # Row-major C(m,n) = alpha*op(A)op(B) + beta*C via the column-major
    # identity C^T = op(B)^T op(A)^T.
    cdef char ta = b'T' if trans_a else b'N'
    cdef char tb = b'T' if trans_b else b'N'
    dgemm(&tb, &ta, &n, &m, &k, &alpha, b, &ldb, a, &lda, &beta, c, &ldc)


def linear_forward(double[:, ::1] x, double[:, ::1] w, double[::1] b):
    cdef int n = x.shape[0], d_in = x.shape[1], d_out = w.shape[0]
    out = np.empty((n, d_out), dtype=np.float64)
    cdef double[:, ::1] z = out
    cdef int i, j
    with nogil:
        for i in range(n):
            for j in range(d_out):
                z[i, j] = b[j]
        if n > 0 and d_in > 0 and d_out > 0:
            # z += x @ w.T
            _gemm_rowmajor(0, 1, n, d_out, d_in, 1.0,
                           &x[0, 0], d_in, &w[0, 0], d_in, 1.0, &z[0, 0], d_out)
    return out


def relu(double[:, ::1] z):
    out = np.empty((z.shape[0], z.shape[1]), dtype=np.float64)
    cdef double[:, ::1] a = out
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(z.shape[0]):
            for j in range(z.shape[1]):
                a[i, j] = z[i, j] if z[i, j] > 0.0 else 0.0
    return out


def relu_grad(double[:, ::1] d_a, double[:, ::1] z):
    out = np.empty((z.shape[0], z.shape[1]), dtype=np.float64)
    cdef double[:, ::1] d_z = out
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(z.shape[0]):
            for j in range(z.shape[1]):
                d_z[i, j] = d_a[i, j] if z[i, j] > 0.0 else 0.0
    return out


def grad_weights(double[:, ::1] d_z, double[:, ::1] x):
    cdef int n = x.shape[0], d_in = x.shape[1], d_out = d_z.shape[1]
    out = np.zeros((d_out, d_in), dtype=np.float64)
    cdef double[:, ::1] dw = out
    if n > 0 and d_in > 0 and d_out > 0:
        with nogil:
            _gemm_rowmajor(1, 0, d_out, d_in, n, 1.0,
                           &d_z[0, 0], d_out, &x[0, 0], d_in, 0.0, &dw[0, 0], d_in)
    return out


def grad_bias(double[:, ::1] d_z):
    out = np.zeros(d_z.shape[1], dtype=np.float64)
    cdef double[::1] db = out
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(d_z.shape[0]):
            for j in range(d_z.shape[1]):
                db[j] += d_z[i, j]
    return out


def grad_input(double[:, ::1] d_z, double[:, ::1] w):
    cdef int n = d_z.shape[0], d_out = w.shape[0], d_in = w.shape[1]
    out = np.zeros((n, d_in), dtype=np.float64)
    cdef double[:, ::1] dx = out
    if n > 0 and d_in > 0 and d_out > 0:
        with nogil:
            _gemm_rowmajor(0, 0, n, d_in, d_out, 1.0,
                           &d_z[0, 0], d_out, &w[0, 0], d_in, 0.0, &dx[0, 0], d_in)
    return out
