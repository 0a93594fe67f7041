"""Fallback kernels built on numpy.

These mirror diagcount._ckernels exactly; the dispatcher in
diagcount.kernels picks whichever is available (compiled preferred).
Every function works on int64 and assumes the caller has already proved
that neither values nor multiplicities can overflow int64; the counting
layer performs those bound checks and reroutes to arbitrary-precision
Python integers when they fail.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

_CHUNK = 1 << 22  # elements per temporary in chunked operations


def enum_product_powers(bounds, degree: int) -> np.ndarray:
    """All values (x_1*...*x_k)^degree for x_i in 1..bounds[i], flattened.

    Length is prod(bounds); order is not specified.
    """
    acc = np.arange(1, bounds[0] + 1, dtype=np.int64)
    for b in bounds[1:]:
        nxt = np.arange(1, b + 1, dtype=np.int64)
        acc = np.multiply.outer(acc, nxt).ravel()
    if degree > 1:
        out = acc.copy()
        for _ in range(degree - 1):
            out *= acc
        return out
    return acc


def value_counts(values: np.ndarray):
    """Sorted distinct values and their multiplicities."""
    return np.unique(values, return_counts=True)


def fold_dense(acc: np.ndarray, acc_lo: int, vals: np.ndarray,
               cnts: np.ndarray, out_lo: int, out_len: int) -> np.ndarray:
    """Dense fold for one linear form: out[(u+v) - out_lo] += acc[u-acc_lo]*c_v.

    vals are the (already coefficient-scaled) column values, cnts their
    multiplicities.  The caller sizes the output so every index is in range.
    """
    out = np.zeros(out_len, dtype=np.int64)
    n = len(acc)
    base = acc_lo - out_lo
    for v, c in zip(vals.tolist(), cnts.tolist()):
        pos = base + v
        out[pos:pos + n] += acc * c
    return out


def dot_opposite(a: np.ndarray, a_lo: int, b: np.ndarray, b_lo: int) -> int:
    """sum over v of a[v - a_lo] * b[(-v) - b_lo] where both indices exist."""
    # v ranges over [a_lo, a_lo+len(a)) intersect [-b_lo-len(b)+1, -b_lo]
    v_min = max(a_lo, -(b_lo + len(b) - 1))
    v_max = min(a_lo + len(a) - 1, -b_lo)
    if v_min > v_max:
        return 0
    aseg = a[v_min - a_lo: v_max - a_lo + 1]
    # b index for v = v_min..v_max is (-v - b_lo), decreasing
    hi = -v_min - b_lo
    lo = -v_max - b_lo
    bseg = b[lo: hi + 1][::-1]
    return int(np.dot(aseg, bseg))


def fold_sparse(keys: np.ndarray, cnts: np.ndarray, deltas: np.ndarray,
                vcnts: np.ndarray):
    """Sparse fold on packed keys: accumulate (key+delta, cnt*vcnt) pairs.

    Returns (sorted unique keys, counts).  Chunked to bound temporaries.
    """
    nk, nd = len(keys), len(deltas)
    pieces_k = []
    pieces_c = []
    rows_per_chunk = max(1, _CHUNK // max(nd, 1))
    for start in range(0, nk, rows_per_chunk):
        kk = keys[start:start + rows_per_chunk]
        cc = cnts[start:start + rows_per_chunk]
        newk = (kk[:, None] + deltas[None, :]).ravel()
        newc = (cc[:, None] * vcnts[None, :]).ravel()
        uk, inv = np.unique(newk, return_inverse=True)
        out = np.zeros(len(uk), dtype=np.int64)
        np.add.at(out, inv, newc)
        pieces_k.append(uk)
        pieces_c.append(out)
    if len(pieces_k) == 1:
        return pieces_k[0], pieces_c[0]
    allk = np.concatenate(pieces_k)
    allc = np.concatenate(pieces_c)
    uk, inv = np.unique(allk, return_inverse=True)
    out = np.zeros(len(uk), dtype=np.int64)
    np.add.at(out, inv, allc)
    return uk, out


def join_sparse(keys1: np.ndarray, cnts1: np.ndarray,
                keys2: np.ndarray, cnts2: np.ndarray) -> int:
    """sum of cnts1[i]*cnts2[j] over pairs with keys1[i] + keys2[j] == 0.

    keys2 must be sorted ascending (fold_sparse output is).
    """
    targets = -keys1
    pos = np.searchsorted(keys2, targets)
    ok = (pos < len(keys2))
    pos_c = np.where(ok, pos, 0)
    ok &= keys2[pos_c] == targets
    if not ok.any():
        return 0
    return int(np.dot(cnts1[ok], cnts2[pos_c[ok]]))


def residue_power_counts(q: int, degree: int, k: int) -> np.ndarray:
    """counts[r] = #{x in (Z/q)^k : (x_1*...*x_k)^degree = r (mod q)}."""
    dist = np.ones(q, dtype=np.int64)
    idx = np.arange(q, dtype=np.int64)
    for _ in range(k - 1):
        nxt = np.zeros(q, dtype=np.int64)
        for r in range(q):
            c = dist[r]
            if c:
                np.add.at(nxt, (r * idx) % q, c)
        dist = nxt
    out = np.zeros(q, dtype=np.int64)
    for r in range(q):
        if dist[r]:
            out[pow(r, degree, q)] += dist[r]
    return out


def congruence_count(q: int, dist: np.ndarray, columns) -> int:
    """Number of solutions mod q of the R simultaneous congruences.

    dist is the per-column monomial residue distribution; columns is a
    sequence of R-tuples of coefficients.  State space is (Z/q)^R.
    """
    R = len(columns[0])
    state = np.zeros((q,) * R, dtype=np.int64)
    state.flat[0] = 1
    support = [int(r) for r in range(q) if dist[r]]
    for col in columns:
        nxt = np.zeros_like(state)
        for r in support:
            shift = tuple(int(c * r) % q for c in col)
            nxt += int(dist[r]) * np.roll(state, shift, axis=tuple(range(R)))
        state = nxt
    return int(state.flat[0])
