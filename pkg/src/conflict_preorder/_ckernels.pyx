# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled LC kernels; see ``_pykernels`` for the reference semantics."""

from libc.stdlib cimport malloc, free
from libc.string cimport memset


cdef void _closure(int n, int nb, const int[::1] pred_ptr, const int[::1] pred_src,
                   const int[::1] pred_lab, const int[::1] rb_ptr, const int[::1] rb_src,
                   const unsigned char[::1] member, const int[::1] level, int base,
                   unsigned char *mc, int *stack) noexcept nogil:
    cdef Py_ssize_t top = 0
    cdef int x, q, y, k, p, r, j, off, u, t
    memset(mc, 0, <size_t>n * nb)
    if base >= 0:
        off = base * nb
        for x in range(nb):
            mc[off + x] = 1
            stack[top] = off + x
            top += 1
    while top > 0:
        top -= 1
        t = stack[top]
        q = t // nb
        y = t - q * nb
        for k in range(pred_ptr[q], pred_ptr[q + 1]):
            p = pred_src[k]
            if level[p] >= 0:
                continue
            r = pred_lab[k] * nb + y
            off = p * nb
            for j in range(rb_ptr[r], rb_ptr[r + 1]):
                u = off + rb_src[j]
                if member[u] and not mc[u]:
                    mc[u] = 1
                    stack[top] = u
                    top += 1


cdef int _iterate(int n, int nb, const unsigned char[::1] member, const unsigned char *mc,
                  int[::1] level, const unsigned char[::1] b_subset, int new_level,
                  int[::1] witness) noexcept nogil:
    cdef int count = 0
    cdef int p, x, off
    for p in range(n):
        if level[p] >= 0 or not b_subset[p]:
            continue
        off = p * nb
        for x in range(nb):
            if member[off + x] and not mc[off + x]:
                level[p] = new_level
                witness[p] = x
                count += 1
                break
    return count


def mc_closure(int n, int nb, const int[::1] pred_ptr, const int[::1] pred_src,
               const int[::1] pred_lab, const int[::1] rb_ptr, const int[::1] rb_src,
               const unsigned char[::1] member, const int[::1] level, int base):
    cdef Py_ssize_t size = <Py_ssize_t>n * nb
    out = bytearray(size)
    if size == 0:
        return out
    cdef unsigned char[::1] mc = out
    cdef int *stack = <int *>malloc(size * sizeof(int))
    if stack == NULL:
        raise MemoryError()
    try:
        with nogil:
            _closure(n, nb, pred_ptr, pred_src, pred_lab, rb_ptr, rb_src, member, level, base,
                     &mc[0], stack)
    finally:
        free(stack)
    return out


def lc_iterate(int n, int nb, const unsigned char[::1] member, const unsigned char[::1] mc,
               int[::1] level, const unsigned char[::1] b_subset, int new_level, int[::1] witness):
    if <Py_ssize_t>n * nb == 0:
        return 0
    return _iterate(n, nb, member, &mc[0], level, b_subset, new_level, witness)


def lc_fixpoint(int n, int nb, const int[::1] pred_ptr, const int[::1] pred_src,
                const int[::1] pred_lab, const int[::1] rb_ptr, const int[::1] rb_src,
                const unsigned char[::1] member, const unsigned char[::1] b_subset,
                int[::1] level, int[::1] witness, int base):
    cdef Py_ssize_t size = <Py_ssize_t>n * nb
    cdef int rnd = 0
    if size == 0:
        return 0
    cdef unsigned char *mc = <unsigned char *>malloc(size)
    cdef int *stack = <int *>malloc(size * sizeof(int))
    if mc == NULL or stack == NULL:
        free(mc)
        free(stack)
        raise MemoryError()
    try:
        with nogil:
            while True:
                _closure(n, nb, pred_ptr, pred_src, pred_lab, rb_ptr, rb_src, member, level,
                         base, mc, stack)
                if _iterate(n, nb, member, mc, level, b_subset, rnd + 1, witness) == 0:
                    break
                rnd += 1
    finally:
        free(mc)
        free(stack)
    return rnd
