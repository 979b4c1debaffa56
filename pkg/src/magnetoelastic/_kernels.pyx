# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Fused pointwise kernels of the right-hand sides (compiled twin of the
numpy implementations in kernels.py; same signatures, same layouts)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.float64_t f64


def cross3(cnp.ndarray a_in, cnp.ndarray b_in):
    cdef cnp.ndarray[f64, ndim=3] a = np.ascontiguousarray(a_in)
    cdef cnp.ndarray[f64, ndim=3] b = np.ascontiguousarray(b_in)
    cdef Py_ssize_t nx = a.shape[1], ny = a.shape[2], i, j
    cdef cnp.ndarray[f64, ndim=3] out = np.empty_like(a)
    cdef f64 a0, a1, a2, b0, b1, b2
    with nogil:
        for i in range(nx):
            for j in range(ny):
                a0 = a[0, i, j]; a1 = a[1, i, j]; a2 = a[2, i, j]
                b0 = b[0, i, j]; b1 = b[1, i, j]; b2 = b[2, i, j]
                out[0, i, j] = a1 * b2 - a2 * b1
                out[1, i, j] = a2 * b0 - a0 * b2
                out[2, i, j] = a0 * b1 - a1 * b0
    return out


def advect(cnp.ndarray v_in, cnp.ndarray grad_in):
    """(v . grad) X from grad[c, a] = d_a X_c."""
    cdef cnp.ndarray[f64, ndim=3] v = np.ascontiguousarray(v_in)
    cdef cnp.ndarray[f64, ndim=4] grad = np.ascontiguousarray(grad_in)
    cdef Py_ssize_t nc = grad.shape[0], nx = grad.shape[2], ny = grad.shape[3], c, i, j
    cdef cnp.ndarray[f64, ndim=3] out = np.empty((nc, nx, ny))
    with nogil:
        for c in range(nc):
            for i in range(nx):
                for j in range(ny):
                    out[c, i, j] = v[0, i, j] * grad[c, 0, i, j] + v[1, i, j] * grad[c, 1, i, j]
    return out


def odot(cnp.ndarray gradM_in):
    """(grad M (.) grad M)_{ij} = sum_k d_i M_k d_j M_k, row-major (4, ...)."""
    cdef cnp.ndarray[f64, ndim=4] g = np.ascontiguousarray(gradM_in)
    cdef Py_ssize_t nk = g.shape[0], nx = g.shape[2], ny = g.shape[3], k, i, j
    cdef cnp.ndarray[f64, ndim=3] out = np.zeros((4, nx, ny))
    cdef f64 g0, g1
    with nogil:
        for k in range(nk):
            for i in range(nx):
                for j in range(ny):
                    g0 = g[k, 0, i, j]; g1 = g[k, 1, i, j]
                    out[0, i, j] += g0 * g0
                    out[1, i, j] += g0 * g1
                    out[3, i, j] += g1 * g1
        for i in range(nx):
            for j in range(ny):
                out[2, i, j] = out[1, i, j]
    return out


def ff_t(cnp.ndarray F_in, double c):
    """c * F F^T pointwise for row-major F."""
    cdef cnp.ndarray[f64, ndim=3] F = np.ascontiguousarray(F_in)
    cdef Py_ssize_t nx = F.shape[1], ny = F.shape[2], i, j
    cdef cnp.ndarray[f64, ndim=3] out = np.empty((4, nx, ny))
    cdef f64 f00, f01, f10, f11
    with nogil:
        for i in range(nx):
            for j in range(ny):
                f00 = F[0, i, j]; f01 = F[1, i, j]
                f10 = F[2, i, j]; f11 = F[3, i, j]
                out[0, i, j] = c * (f00 * f00 + f01 * f01)
                out[1, i, j] = c * (f00 * f10 + f01 * f11)
                out[2, i, j] = c * (f10 * f00 + f11 * f01)
                out[3, i, j] = c * (f10 * f10 + f11 * f11)
    return out


def gradv_f(cnp.ndarray gradv_in, cnp.ndarray F_in):
    """(grad v F)_{ij} = sum_k (d_k v_i) F_{kj}, gradv[i, k] = d_k v_i."""
    cdef cnp.ndarray[f64, ndim=4] gv = np.ascontiguousarray(gradv_in)
    cdef cnp.ndarray[f64, ndim=3] F = np.ascontiguousarray(F_in)
    cdef Py_ssize_t nx = F.shape[1], ny = F.shape[2], i, j
    cdef cnp.ndarray[f64, ndim=3] out = np.empty((4, nx, ny))
    cdef f64 v00, v01, v10, v11, f00, f01, f10, f11
    with nogil:
        for i in range(nx):
            for j in range(ny):
                v00 = gv[0, 0, i, j]; v01 = gv[0, 1, i, j]
                v10 = gv[1, 0, i, j]; v11 = gv[1, 1, i, j]
                f00 = F[0, i, j]; f01 = F[1, i, j]
                f10 = F[2, i, j]; f11 = F[3, i, j]
                out[0, i, j] = v00 * f00 + v01 * f10
                out[1, i, j] = v00 * f01 + v01 * f11
                out[2, i, j] = v10 * f00 + v11 * f10
                out[3, i, j] = v10 * f01 + v11 * f11
    return out


def transport_f(cnp.ndarray v_in, cnp.ndarray gradF_in, cnp.ndarray gradv_in,
                cnp.ndarray F_in):
    """-(v . grad) F + grad v F, fused."""
    cdef cnp.ndarray[f64, ndim=3] v = np.ascontiguousarray(v_in)
    cdef cnp.ndarray[f64, ndim=4] gF = np.ascontiguousarray(gradF_in)
    cdef cnp.ndarray[f64, ndim=4] gv = np.ascontiguousarray(gradv_in)
    cdef cnp.ndarray[f64, ndim=3] F = np.ascontiguousarray(F_in)
    cdef Py_ssize_t nx = F.shape[1], ny = F.shape[2], i, j
    cdef cnp.ndarray[f64, ndim=3] out = np.empty((4, nx, ny))
    cdef f64 vx, vy, v00, v01, v10, v11, f00, f01, f10, f11
    with nogil:
        for i in range(nx):
            for j in range(ny):
                vx = v[0, i, j]; vy = v[1, i, j]
                v00 = gv[0, 0, i, j]; v01 = gv[0, 1, i, j]
                v10 = gv[1, 0, i, j]; v11 = gv[1, 1, i, j]
                f00 = F[0, i, j]; f01 = F[1, i, j]
                f10 = F[2, i, j]; f11 = F[3, i, j]
                out[0, i, j] = -(vx * gF[0, 0, i, j] + vy * gF[0, 1, i, j]) + v00 * f00 + v01 * f10
                out[1, i, j] = -(vx * gF[1, 0, i, j] + vy * gF[1, 1, i, j]) + v00 * f01 + v01 * f11
                out[2, i, j] = -(vx * gF[2, 0, i, j] + vy * gF[2, 1, i, j]) + v10 * f00 + v11 * f10
                out[3, i, j] = -(vx * gF[3, 0, i, j] + vy * gF[3, 1, i, j]) + v10 * f01 + v11 * f11
    return out


def llg_cross_rhs(cnp.ndarray v_in, cnp.ndarray gradM_in, cnp.ndarray M_in,
                  cnp.ndarray H_in, double gamma, double lam):
    """-(v . grad) M - gamma M x H - lam M x (M x H), fused."""
    cdef cnp.ndarray[f64, ndim=3] v = np.ascontiguousarray(v_in)
    cdef cnp.ndarray[f64, ndim=4] gM = np.ascontiguousarray(gradM_in)
    cdef cnp.ndarray[f64, ndim=3] M = np.ascontiguousarray(M_in)
    cdef cnp.ndarray[f64, ndim=3] H = np.ascontiguousarray(H_in)
    cdef Py_ssize_t nx = M.shape[1], ny = M.shape[2], i, j
    cdef cnp.ndarray[f64, ndim=3] out = np.empty((3, nx, ny))
    cdef f64 vx, vy, m0, m1, m2, h0, h1, h2, c0, c1, c2, d0, d1, d2
    with nogil:
        for i in range(nx):
            for j in range(ny):
                vx = v[0, i, j]; vy = v[1, i, j]
                m0 = M[0, i, j]; m1 = M[1, i, j]; m2 = M[2, i, j]
                h0 = H[0, i, j]; h1 = H[1, i, j]; h2 = H[2, i, j]
                c0 = m1 * h2 - m2 * h1
                c1 = m2 * h0 - m0 * h2
                c2 = m0 * h1 - m1 * h0
                d0 = m1 * c2 - m2 * c1
                d1 = m2 * c0 - m0 * c2
                d2 = m0 * c1 - m1 * c0
                out[0, i, j] = -(vx * gM[0, 0, i, j] + vy * gM[0, 1, i, j]) - gamma * c0 - lam * d0
                out[1, i, j] = -(vx * gM[1, 0, i, j] + vy * gM[1, 1, i, j]) - gamma * c1 - lam * d1
                out[2, i, j] = -(vx * gM[2, 0, i, j] + vy * gM[2, 1, i, j]) - gamma * c2 - lam * d2
    return out


def llg_expanded_nonstiff(cnp.ndarray v_in, cnp.ndarray gradM_in, cnp.ndarray M_in,
                          cnp.ndarray lapM_in, cnp.ndarray H_in):
    """-(v . grad) M - M x (lapM + H) + |grad M|^2 M - M (M . H) + H, fused."""
    cdef cnp.ndarray[f64, ndim=3] v = np.ascontiguousarray(v_in)
    cdef cnp.ndarray[f64, ndim=4] gM = np.ascontiguousarray(gradM_in)
    cdef cnp.ndarray[f64, ndim=3] M = np.ascontiguousarray(M_in)
    cdef cnp.ndarray[f64, ndim=3] L = np.ascontiguousarray(lapM_in)
    cdef cnp.ndarray[f64, ndim=3] H = np.ascontiguousarray(H_in)
    cdef Py_ssize_t nx = M.shape[1], ny = M.shape[2], i, j, k
    cdef cnp.ndarray[f64, ndim=3] out = np.empty((3, nx, ny))
    cdef f64 vx, vy, m0, m1, m2, b0, b1, b2, g2, mh
    with nogil:
        for i in range(nx):
            for j in range(ny):
                vx = v[0, i, j]; vy = v[1, i, j]
                m0 = M[0, i, j]; m1 = M[1, i, j]; m2 = M[2, i, j]
                b0 = L[0, i, j] + H[0, i, j]
                b1 = L[1, i, j] + H[1, i, j]
                b2 = L[2, i, j] + H[2, i, j]
                g2 = 0.0
                for k in range(3):
                    g2 += gM[k, 0, i, j] * gM[k, 0, i, j] + gM[k, 1, i, j] * gM[k, 1, i, j]
                mh = m0 * H[0, i, j] + m1 * H[1, i, j] + m2 * H[2, i, j]
                out[0, i, j] = (-(vx * gM[0, 0, i, j] + vy * gM[0, 1, i, j])
                                - (m1 * b2 - m2 * b1) + g2 * m0 - mh * m0 + H[0, i, j])
                out[1, i, j] = (-(vx * gM[1, 0, i, j] + vy * gM[1, 1, i, j])
                                - (m2 * b0 - m0 * b2) + g2 * m1 - mh * m1 + H[1, i, j])
                out[2, i, j] = (-(vx * gM[2, 0, i, j] + vy * gM[2, 1, i, j])
                                - (m0 * b1 - m1 * b0) + g2 * m2 - mh * m2 + H[2, i, j])
    return out
