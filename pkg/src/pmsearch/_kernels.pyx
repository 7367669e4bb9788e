# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled table kernels; same contract and scan order as ``_kernels_py``."""

ctypedef unsigned long long mask_t

cdef enum:
    MAXN = 62


def smi(const double[::1] t, int n, mask_t l_mask, int k):
    cdef double best = 0.0, fa, acc2, phi
    cdef mask_t best_s = 0, best_a = 0, a = 0, s2
    cdef int m, x, j, size, top
    cdef mask_t bits[MAXN]
    cdef double gains[MAXN]
    # explicit pre-order stack; depth is bounded by 2 * (n + 1)
    cdef int st_j[2 * MAXN + 4]
    cdef int st_size[2 * MAXN + 4]
    cdef mask_t st_s[2 * MAXN + 4]
    cdef double st_acc[2 * MAXN + 4]
    if n > MAXN:
        raise ValueError("ground set too large for the table kernels")
    if k < 2:
        return best, best_s, best_a
    while True:
        fa = t[a]
        m = 0
        for x in range(n):
            if not (a >> x) & 1:
                bits[m] = (<mask_t>1) << x
                gains[m] = t[a | bits[m]] - fa
                m += 1
        top = 0
        st_j[0] = 0
        st_s[0] = 0
        st_acc[0] = 0.0
        st_size[0] = 0
        top = 1
        while top > 0:
            top -= 1
            j = st_j[top]
            if j >= m:
                continue
            s2 = st_s[top]
            size = st_size[top]
            acc2 = st_acc[top]
            # sibling: skip index j
            st_j[top] = j + 1
            top += 1
            s2 = s2 | bits[j]
            acc2 = acc2 + gains[j]
            if size >= 1:
                phi = acc2 - (t[a | s2] - fa)
                if phi < best:
                    best = phi
                    best_s = s2
                    best_a = a
            if size + 1 < k:
                st_j[top] = j + 1
                st_s[top] = s2
                st_acc[top] = acc2
                st_size[top] = size + 1
                top += 1
        if a == l_mask:
            break
        a = (a - l_mask) & l_mask
    return best, best_s, best_a


def submodular_violation(const double[::1] t, int n, double tol):
    cdef mask_t x, be, by, full = (<mask_t>1) << n
    cdef int e, y
    cdef double fx, lhs, rhs
    if n > MAXN:
        raise ValueError("ground set too large for the table kernels")
    x = 0
    while x < full:
        fx = t[x]
        for e in range(n):
            be = (<mask_t>1) << e
            if x & be:
                continue
            lhs = t[x | be] - fx
            for y in range(e + 1, n):
                by = (<mask_t>1) << y
                if x & by:
                    continue
                rhs = t[x | by | be] - t[x | by]
                if lhs < rhs - tol:
                    return x, y, e
        x += 1
    return None


def monotone_violation(const double[::1] t, int n, double tol):
    cdef mask_t x, be, full = (<mask_t>1) << n
    cdef int e
    cdef double fx
    if n > MAXN:
        raise ValueError("ground set too large for the table kernels")
    x = 0
    while x < full:
        fx = t[x]
        for e in range(n):
            be = (<mask_t>1) << e
            if not (x & be) and t[x | be] < fx - tol:
                return x, e
        x += 1
    return None
