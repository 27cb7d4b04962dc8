# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.  Signatures mirror ``_kernels_py``."""

import math

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, pow, fabs
from libc.stdint cimport uint64_t, int64_t, int32_t, int8_t, uint8_t
from libc.string cimport memset

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    RADEMACHER = 0
    GAUSSIAN = 1
    CENTERED_UNIFORM = 2
    TWO_POINT = 3

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _horner8(const double* c, double r) noexcept nogil:
    return ((((((c[7] * r + c[6]) * r + c[5]) * r + c[4]) * r + c[3]) * r
             + c[2]) * r + c[1]) * r + c[0]


cdef double _A[8]
cdef double _B[8]
cdef double _C[8]
cdef double _D[8]
cdef double _E[8]
cdef double _F[8]
_A[:] = [3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
         1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
         3.3430575583588128105e4, 2.5090809287301226727e3]
_B[:] = [1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
         2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
         5.2264952788528545610e3]
_C[:] = [1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
         3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
         2.27238449892691845833e-2, 7.74545014278341407640e-4]
_D[:] = [1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
         1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
         1.05075007164441684324e-9]
_E[:] = [6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
         2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
         2.71155556874348757815e-5, 2.01033439929228813265e-7]
_F[:] = [1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
         7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
         2.04426310338993978564e-15]


cdef inline double _ppnd16(double u) noexcept nogil:
    cdef double q = u - 0.5
    cdef double r, val
    if fabs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _horner8(_A, r) / _horner8(_B, r)
    r = u if q < 0 else 1.0 - u
    r = sqrt(-log(r))
    if r <= 5.0:
        r -= 1.6
        val = _horner8(_C, r) / _horner8(_D, r)
    else:
        r -= 5.0
        val = _horner8(_E, r) / _horner8(_F, r)
    return -val if q < 0 else val


cdef inline double _eta(uint64_t key, int kind, double a, double b, double q,
                        double scale, int64_t p) noexcept nogil:
    cdef uint64_t bits = _mix64(key ^ (<uint64_t>p * GOLDEN))
    cdef double u
    if kind == RADEMACHER:
        return scale if (bits >> 63) else -scale
    u = (<double>(bits >> 11) + 0.5) * INV_2_53
    if kind == GAUSSIAN:
        return scale * _ppnd16(u)
    if kind == CENTERED_UNIFORM:
        return scale * (2.0 * u - 1.0)
    return a if u < q else b


def noise_bits(uint64_t key, primes):
    cdef const int64_t[::1] p = np.ascontiguousarray(primes, dtype=np.int64)
    cdef Py_ssize_t i, n = p.shape[0]
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _mix64(key ^ (<uint64_t>p[i] * GOLDEN))
    return out


def normal_quantile(u):
    cdef const double[::1] x = np.ascontiguousarray(np.atleast_1d(u), dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _ppnd16(x[i])
    return out


def eta_values(uint64_t key, int kind, double a, double b, double q,
               double scale, primes):
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown noise kind code {kind}")
    cdef const int64_t[::1] p = np.ascontiguousarray(primes, dtype=np.int64)
    cdef Py_ssize_t i, n = p.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _eta(key, kind, a, b, q, scale, p[i])
    return out


def compensated_sum(values):
    cdef const double[::1] x = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double s = 0.0, c = 0.0, t, v
    with nogil:
        for i in range(n):
            v = x[i]
            t = s + v
            if fabs(s) >= fabs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
    return s + c


def power_sum(primes, double exponent):
    cdef const int64_t[::1] p = np.ascontiguousarray(primes, dtype=np.int64)
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double s = 0.0, c = 0.0, t, v
    with nogil:
        for i in range(n):
            v = pow(<double>p[i], -exponent)
            t = s + v
            if fabs(s) >= fabs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
    return s + c


def weighted_noise_sums(uint64_t key, int kind, double a, double b, double q,
                        double scale, primes, weights):
    if kind < 0 or kind > 3:
        raise ValueError(f"unknown noise kind code {kind}")
    cdef const int64_t[::1] p = np.ascontiguousarray(primes, dtype=np.int64)
    cdef const double[:, ::1] w = np.ascontiguousarray(np.atleast_2d(weights), dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], m = w.shape[0], i, j
    if w.shape[1] != n:
        raise ValueError("weights must have one column per prime")
    acc = np.zeros(m, dtype=np.float64)
    comp = np.zeros(m, dtype=np.float64)
    cdef double[::1] s = acc
    cdef double[::1] c = comp
    cdef double eta, v, t
    with nogil:
        for i in range(n):
            eta = _eta(key, kind, a, b, q, scale, p[i])
            for j in range(m):
                v = eta * w[j, i]
                t = s[j] + v
                if fabs(s[j]) >= fabs(v):
                    c[j] += (s[j] - t) + v
                else:
                    c[j] += (v - t) + s[j]
                s[j] = t
    return acc + comp


def _small_sieve(int64_t limit):
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_primes(int64_t limit, int64_t segment_bits=1 << 20):
    """Odd-only segmented sieve, one bit per odd number in each segment."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    if segment_bits % 8:
        segment_bits += 8 - segment_bits % 8
    base_arr = _small_sieve(math.isqrt(limit))[1:]
    cdef const int64_t[::1] base = base_arr
    nxt_arr = (base_arr * base_arr - 1) // 2
    cdef int64_t[::1] nxt = nxt_arr
    cdef Py_ssize_t nb = base.shape[0]
    # Rosser-Schoenfeld style upper bound on pi(limit)
    cdef int64_t cap = 10 + <int64_t>(1.25506 * limit / math.log(limit)) if limit > 16 else 16
    out_arr = np.empty(cap, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    seg_arr = np.empty(segment_bits // 8, dtype=np.uint8)
    cdef uint8_t[::1] seg = seg_arr
    cdef int64_t last = (limit - 1) // 2
    cdef int64_t lo = 1, hi, j, p, width, nbytes, byte_i, bit
    cdef Py_ssize_t k, count = 1
    cdef uint8_t byte
    out[0] = 2
    with nogil:
        while lo <= last:
            hi = lo + segment_bits
            if hi > last + 1:
                hi = last + 1
            width = hi - lo
            nbytes = (width + 7) >> 3
            memset(&seg[0], 0, nbytes)
            for k in range(nb):
                p = base[k]
                j = nxt[k]
                while j < hi:
                    seg[(j - lo) >> 3] |= <uint8_t>(1 << ((j - lo) & 7))
                    j += p
                nxt[k] = j
            for byte_i in range(nbytes):
                byte = seg[byte_i]
                if byte == 0xFF:
                    continue
                for bit in range(8):
                    if not (byte >> bit) & 1:
                        j = (byte_i << 3) + bit
                        if j < width:
                            out[count] = 2 * (lo + j) + 1
                            count += 1
            lo = hi
    return out_arr[:count].copy()


def spf_table(int64_t n):
    """Smallest prime factor for 0..n via a linear sieve (entries 0, 1 are 0)."""
    spf_arr = np.zeros(n + 1, dtype=np.int32)
    cdef int32_t[::1] spf = spf_arr
    cap = 16 if n < 17 else 10 + int(1.25506 * n / math.log(n))
    primes_arr = np.empty(cap, dtype=np.int32)
    cdef int32_t[::1] pr = primes_arr
    cdef Py_ssize_t np_ = 0, k
    cdef int64_t i, m
    cdef int32_t sp
    with nogil:
        for i in range(2, n + 1):
            if spf[i] == 0:
                spf[i] = <int32_t>i
                pr[np_] = <int32_t>i
                np_ += 1
            sp = spf[i]
            for k in range(np_):
                if pr[k] > sp:
                    break
                m = i * pr[k]
                if m > n:
                    break
                spf[m] = pr[k]
    return spf_arr


def mult_table(spf_in, signs_in, int k):
    """f(n) for n <= N from the spf table and f(p) stored at signs[p]."""
    cdef const int32_t[::1] spf = np.ascontiguousarray(spf_in, dtype=np.int32)
    cdef const int8_t[::1] sg = np.ascontiguousarray(signs_in, dtype=np.int8)
    cdef Py_ssize_t n_max = spf.shape[0] - 1
    f_arr = np.zeros(n_max + 1, dtype=np.int8)
    e_arr = np.zeros(n_max + 1, dtype=np.uint8)
    cdef int8_t[::1] f = f_arr
    cdef uint8_t[::1] e = e_arr
    cdef Py_ssize_t n, m
    cdef int32_t p
    if n_max >= 1:
        f[1] = 1
    with nogil:
        for n in range(2, n_max + 1):
            p = spf[n]
            m = n // p
            # exponent of p in n, saturated at k
            if m > 1 and spf[m] == p:
                e[n] = e[m] + 1 if e[m] < k else <uint8_t>k
            else:
                e[n] = 1
            if e[n] >= k or f[m] == 0:
                f[n] = 0
            else:
                f[n] = f[m] * sg[p]
    return f_arr
