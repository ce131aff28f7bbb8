# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled force/energy kernels; same contract as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, pow, fabs

cnp.import_array()


cdef inline double _phi(double d, double x) nogil:
    if x == -1.0:
        return log(d)
    return pow(d, x + 1.0) / (x + 1.0)


cdef inline double _force_scale(double dist, double sq, double x) nogil:
    """``dist ** (x - 1)`` with the common exponents spelled out."""
    if x == -1.0:
        return 1.0 / sq
    if x == 0.0:
        return 1.0 / dist
    if x == 1.0:
        return 1.0
    if x == 2.0:
        return dist
    return pow(dist, x - 1.0)


def attraction(const double[:, ::1] pos, const long[::1] eu, const long[::1] ev,
               const double[::1] ew, double a, double alpha):
    cdef Py_ssize_t n = pos.shape[0], d = pos.shape[1], m = eu.shape[0]
    cdef Py_ssize_t k, c, u, v
    cdef double dist, s, f, energy = 0.0
    cdef long zi = -1, zj = -1
    forces_arr = np.zeros((n, d))
    cdef double[:, ::1] forces = forces_arr
    for k in range(m):
        u = eu[k]
        v = ev[k]
        if u == v:
            continue
        s = 0.0
        for c in range(d):
            s += (pos[v, c] - pos[u, c]) * (pos[v, c] - pos[u, c])
        dist = sqrt(s)
        if dist == 0.0:
            if zi < 0:
                zi = u
                zj = v
            continue
        f = alpha * ew[k] * _force_scale(dist, s, a)
        for c in range(d):
            forces[u, c] += f * (pos[v, c] - pos[u, c])
            forces[v, c] -= f * (pos[v, c] - pos[u, c])
        energy += alpha * ew[k] * _phi(dist, a)
    return forces_arr, energy, zi, zj


def repulsion_exact(const double[:, ::1] pos, const double[::1] w, double r, double beta):
    cdef Py_ssize_t n = pos.shape[0], d = pos.shape[1]
    cdef Py_ssize_t i, j, c
    cdef double s, dist, ww, f, energy = 0.0
    cdef long zi = -1, zj = -1
    forces_arr = np.zeros((n, d))
    cdef double[:, ::1] forces = forces_arr
    for i in range(n):
        if w[i] <= 0.0:
            continue
        for j in range(i + 1, n):
            ww = w[i] * w[j]
            if ww <= 0.0:
                continue
            s = 0.0
            for c in range(d):
                s += (pos[i, c] - pos[j, c]) * (pos[i, c] - pos[j, c])
            dist = sqrt(s)
            if dist == 0.0:
                if zi < 0:
                    zi = i
                    zj = j
                continue
            f = beta * ww * _force_scale(dist, s, r)
            for c in range(d):
                forces[i, c] += f * (pos[i, c] - pos[j, c])
                forces[j, c] -= f * (pos[i, c] - pos[j, c])
            energy -= beta * ww * _phi(dist, r)
    return forces_arr, energy, zi, zj


def bh_repulsion(tree, const double[:, ::1] pos, const double[::1] w, double r,
                 double beta, double theta):
    cdef const double[:, ::1] center = tree.center
    cdef const double[::1] half = tree.half
    cdef const double[::1] mass = tree.mass
    cdef const double[:, ::1] com = tree.com
    cdef const long[::1] child_ptr = tree.child_ptr
    cdef const long[::1] child_idx = tree.child_idx
    cdef const long[::1] leaf_ptr = tree.leaf_ptr
    cdef const long[::1] leaf_pts = tree.leaf_pts
    cdef Py_ssize_t n = pos.shape[0], d = pos.shape[1]
    cdef Py_ssize_t N = half.shape[0]
    cdef Py_ssize_t i, j, c, k, p, top
    cdef double s, g, dist, ww, f, energy = 0.0
    cdef long zi = -1, zj = -1
    forces_arr = np.zeros((n, d))
    cdef double[:, ::1] forces = forces_arr
    stack_arr = np.empty(N + 1, dtype=np.int64)
    cdef long[::1] stack = stack_arr

    for i in range(n):
        if w[i] <= 0.0:
            continue
        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            k = stack[top]
            if mass[k] <= 0.0:
                continue
            # distance from vertex to the nearest point of the box
            s = 0.0
            for c in range(d):
                g = fabs(pos[i, c] - center[k, c]) - half[k]
                if g > 0.0:
                    s += g * g
            if 2.0 * half[k] < theta * sqrt(s):
                s = 0.0
                for c in range(d):
                    s += (pos[i, c] - com[k, c]) * (pos[i, c] - com[k, c])
                dist = sqrt(s)
                ww = w[i] * mass[k]
                f = beta * ww * _force_scale(dist, s, r)
                for c in range(d):
                    forces[i, c] += f * (pos[i, c] - com[k, c])
                energy -= beta * ww * _phi(dist, r)
                continue
            if child_ptr[k] == child_ptr[k + 1]:
                for p in range(leaf_ptr[k], leaf_ptr[k + 1]):
                    j = leaf_pts[p]
                    if j == i or w[j] <= 0.0:
                        continue
                    s = 0.0
                    for c in range(d):
                        s += (pos[i, c] - pos[j, c]) * (pos[i, c] - pos[j, c])
                    dist = sqrt(s)
                    if dist == 0.0:
                        if zi < 0:
                            zi = i
                            zj = j
                        continue
                    ww = w[i] * w[j]
                    f = beta * ww * _force_scale(dist, s, r)
                    for c in range(d):
                        forces[i, c] += f * (pos[i, c] - pos[j, c])
                    energy -= beta * ww * _phi(dist, r)
            else:
                for p in range(child_ptr[k], child_ptr[k + 1]):
                    stack[top] = child_idx[p]
                    top += 1
    return forces_arr, 0.5 * energy, zi, zj
