# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels for the counting engine.

Same contract as diagcount._kernels_py: int64 in, int64 out, caller has
already established overflow-safety.  Keep the two implementations in
lockstep; the test suite compares them element for element.
"""

from cython.operator cimport dereference as deref, preincrement as inc
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libcpp.algorithm cimport sort as cpp_sort

import numpy as np

BACKEND_NAME = "compiled"

ctypedef long long i64


def enum_product_powers(bounds, int degree):
    cdef list bs = [int(b) for b in bounds]
    cdef Py_ssize_t total = 1
    for b in bs:
        total *= b
    out_arr = np.empty(total, dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef Py_ssize_t k = len(bs)
    cdef vector[i64] cur, limit
    cdef Py_ssize_t i
    for i in range(k):
        cur.push_back(1)
        limit.push_back(<i64> bs[i])
    cdef i64 prod, base
    cdef Py_ssize_t pos = 0
    cdef int j, t
    while True:
        prod = 1
        for i in range(k):
            prod *= cur[i]
        if degree > 1:
            base = prod
            for t in range(degree - 1):
                prod *= base
        out[pos] = prod
        pos += 1
        j = <int> k - 1
        while j >= 0:
            cur[j] += 1
            if cur[j] <= limit[j]:
                break
            cur[j] = 1
            j -= 1
        if j < 0:
            break
    return out_arr


def value_counts(values):
    return np.unique(values, return_counts=True)


def fold_dense(acc_arr, acc_lo, vals_arr, cnts_arr, out_lo, out_len):
    out_arr = np.zeros(int(out_len), dtype=np.int64)
    cdef i64[::1] out = out_arr
    cdef i64[::1] acc = np.ascontiguousarray(acc_arr, dtype=np.int64)
    cdef i64[::1] vals = np.ascontiguousarray(vals_arr, dtype=np.int64)
    cdef i64[::1] cnts = np.ascontiguousarray(cnts_arr, dtype=np.int64)
    cdef Py_ssize_t n = acc.shape[0]
    cdef Py_ssize_t m = vals.shape[0]
    cdef i64 base = <i64> acc_lo - <i64> out_lo
    cdef Py_ssize_t i, u
    cdef i64 c, pos
    for i in range(m):
        c = cnts[i]
        pos = base + vals[i]
        for u in range(n):
            out[pos + u] += acc[u] * c
    return out_arr


def dot_opposite(a_arr, a_lo, b_arr, b_lo):
    cdef i64[::1] a = np.ascontiguousarray(a_arr, dtype=np.int64)
    cdef i64[::1] b = np.ascontiguousarray(b_arr, dtype=np.int64)
    cdef i64 alo = a_lo, blo = b_lo
    cdef i64 v_min = alo
    cdef i64 cand = -(blo + <i64> b.shape[0] - 1)
    if cand > v_min:
        v_min = cand
    cdef i64 v_max = alo + <i64> a.shape[0] - 1
    if -blo < v_max:
        v_max = -blo
    if v_min > v_max:
        return 0
    cdef i64 total = 0
    cdef i64 v
    for v in range(v_min, v_max + 1):
        total += a[v - alo] * b[(-v) - blo]
    return int(total)


def fold_sparse(keys_arr, cnts_arr, deltas_arr, vcnts_arr):
    cdef i64[::1] keys = np.ascontiguousarray(keys_arr, dtype=np.int64)
    cdef i64[::1] cnts = np.ascontiguousarray(cnts_arr, dtype=np.int64)
    cdef i64[::1] deltas = np.ascontiguousarray(deltas_arr, dtype=np.int64)
    cdef i64[::1] vcnts = np.ascontiguousarray(vcnts_arr, dtype=np.int64)
    cdef unordered_map[i64, i64] table
    table.reserve(<size_t> (keys.shape[0] * 2 + 16))
    cdef Py_ssize_t i, j
    cdef i64 k, c
    for i in range(keys.shape[0]):
        k = keys[i]
        c = cnts[i]
        for j in range(deltas.shape[0]):
            table[k + deltas[j]] += c * vcnts[j]
    cdef vector[i64] ks
    ks.reserve(table.size())
    cdef unordered_map[i64, i64].iterator it = table.begin()
    while it != table.end():
        ks.push_back(deref(it).first)
        inc(it)
    cpp_sort(ks.begin(), ks.end())
    out_k = np.empty(<Py_ssize_t> ks.size(), dtype=np.int64)
    out_c = np.empty(<Py_ssize_t> ks.size(), dtype=np.int64)
    cdef i64[::1] vk = out_k
    cdef i64[::1] vc = out_c
    for i in range(<Py_ssize_t> ks.size()):
        vk[i] = ks[i]
        vc[i] = table[ks[i]]
    return out_k, out_c


def join_sparse(keys1_arr, cnts1_arr, keys2_arr, cnts2_arr):
    cdef i64[::1] keys1 = np.ascontiguousarray(keys1_arr, dtype=np.int64)
    cdef i64[::1] cnts1 = np.ascontiguousarray(cnts1_arr, dtype=np.int64)
    cdef i64[::1] keys2 = np.ascontiguousarray(keys2_arr, dtype=np.int64)
    cdef i64[::1] cnts2 = np.ascontiguousarray(cnts2_arr, dtype=np.int64)
    cdef unordered_map[i64, i64] table
    table.reserve(<size_t> (keys2.shape[0] * 2 + 16))
    cdef Py_ssize_t i
    for i in range(keys2.shape[0]):
        table[keys2[i]] = cnts2[i]
    cdef i64 total = 0
    cdef unordered_map[i64, i64].iterator hit
    for i in range(keys1.shape[0]):
        hit = table.find(-keys1[i])
        if hit != table.end():
            total += cnts1[i] * deref(hit).second
    return int(total)


def residue_power_counts(int q, int degree, int k):
    dist_arr = np.ones(q, dtype=np.int64)
    cdef i64[::1] dist = dist_arr
    cdef i64[::1] nxt
    cdef Py_ssize_t step, r, b
    cdef i64 c
    for step in range(k - 1):
        nxt_arr = np.zeros(q, dtype=np.int64)
        nxt = nxt_arr
        for r in range(q):
            c = dist[r]
            if c:
                for b in range(q):
                    nxt[(r * b) % q] += c
        dist_arr = nxt_arr
        dist = dist_arr
    out_arr = np.zeros(q, dtype=np.int64)
    cdef i64[::1] out = out_arr
    for r in range(q):
        if dist[r]:
            out[pow(r, degree, q)] += dist[r]
    return out_arr


def congruence_count(int q, dist_arr, columns):
    """Solutions mod q of the simultaneous congruences; see the fallback."""
    cdef i64[::1] dist = np.ascontiguousarray(dist_arr, dtype=np.int64)
    cdef int R = len(columns[0])
    cdef Py_ssize_t size = 1
    cdef int i
    for i in range(R):
        size *= q
    state_arr = np.zeros(size, dtype=np.int64)
    cdef i64[::1] state = state_arr
    state[0] = 1
    cdef i64[::1] nxt
    cdef vector[i64] strides
    strides.resize(R)
    cdef i64 st = 1
    for i in range(R - 1, -1, -1):
        strides[i] = st
        st *= q
    cdef vector[i64] shift
    shift.resize(R)
    cdef Py_ssize_t idx, r
    cdef i64 c, target, digit, rem
    for col in columns:
        nxt_arr = np.zeros(size, dtype=np.int64)
        nxt = nxt_arr
        for r in range(q):
            c = dist[r]
            if c == 0:
                continue
            for i in range(R):
                shift[i] = (<i64> col[i] * r) % q
                if shift[i] < 0:
                    shift[i] += q
            for idx in range(size):
                if state[idx] == 0:
                    continue
                rem = idx
                target = 0
                for i in range(R):
                    digit = rem / strides[i]
                    rem -= digit * strides[i]
                    digit += shift[i]
                    if digit >= q:
                        digit -= q
                    target += digit * strides[i]
                nxt[target] += state[idx] * c
        state_arr = nxt_arr
        state = state_arr
    return int(state[0])
