"""Prime-field linear algebra and witness-producing matrix products.

Field matrices are plain ``numpy.uint64`` arrays; arithmetic goes through a
:class:`Field`, which supports the Mersenne prime 2**61 - 1 (the default) and
any prime below 2**32 (handy for forcing collisions in tests).

The three products (boolean, bounded min-plus, approximate min-plus) are
naive cubic loops vectorised over the outer dimensions; every output entry
comes with the *smallest* inner index realising it.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import (BadEpsilon, DimensionMismatch, EntryOutOfRange, Singular)

MERSENNE61 = (1 << 61) - 1
_M61 = np.uint64(MERSENNE61)
_MASK32 = np.uint64(0xFFFFFFFF)
_MASK29 = np.uint64((1 << 29) - 1)
_U29 = np.uint64(29)
_U32 = np.uint64(32)
_U61 = np.uint64(61)
_U3 = np.uint64(3)
_TWO_M61 = np.uint64(2 * MERSENNE61)

INT_INF = np.int64(1 << 60)   # sentinel for bounded min-plus; two of them still fit in int64
NO_WITNESS = -1
_CHUNK = 1 << 21   # candidate entries materialised at once by the bounded product


def _reduce61(x):
    x = (x & _M61) + (x >> _U61)
    return np.where(x >= _M61, x - _M61, x)


def _mul61(a, b):
    a0 = a & _MASK32
    a1 = a >> _U32
    b0 = b & _MASK32
    b1 = b >> _U32
    lo = a0 * b0
    mid = a1 * b0 + a0 * b1
    hi = a1 * b1
    s = (hi << _U3) + (mid >> _U29) + ((mid & _MASK29) << _U32) + (lo & _M61) + (lo >> _U61)
    return _reduce61(s)


class Field:
    """Arithmetic in Z/pZ on uint64 arrays."""

    def __init__(self, p: int = MERSENNE61):
        if p != MERSENNE61 and not (2 <= p < (1 << 32)):
            raise ValueError("supported primes: 2**61 - 1 or any prime below 2**32")
        self.p = int(p)
        self._P = np.uint64(p)
        self._mersenne = p == MERSENNE61

    def __repr__(self):
        return f"Field(p={self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(self.p)

    def asarray(self, x):
        arr = np.asarray(x, dtype=object) % self.p
        return arr.astype(np.uint64)

    def add(self, a, b):
        s = np.asarray(a, dtype=np.uint64) + np.asarray(b, dtype=np.uint64)
        return np.where(s >= self._P, s - self._P, s)

    def neg(self, a):
        a = np.asarray(a, dtype=np.uint64)
        return np.where(a == 0, a, self._P - a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.uint64)
        b = np.asarray(b, dtype=np.uint64)
        if self._mersenne:
            return _mul61(a, b)
        return (a * b) % self._P

    def sub_outer(self, N, col, row):
        """``N - col row^T`` entrywise mod p, fused for the Mersenne prime."""
        if not self._mersenne:
            return self.sub(N, self.mul(col[:, None], row[None, :]))
        a = col[:, None]
        b = row[None, :]
        a0 = a & _MASK32
        a1 = a >> _U32
        b0 = b & _MASK32
        b1 = b >> _U32
        lo = a0 * b0
        mid = a1 * b0
        mid += a0 * b1
        hi = a1 * b1
        hi <<= _U3
        s = mid >> _U29
        mid &= _MASK29
        mid <<= _U32
        s += mid
        s += hi
        s += lo >> _U61
        lo &= _M61
        s += lo
        t = s >> _U61
        s &= _M61
        s += t
        out = N + _TWO_M61
        out -= s
        for _ in range(2):
            t = out >> _U61
            out &= _M61
            out += t
        out[out == _M61] = 0
        return out

    def inv(self, x: int) -> int:
        x = int(x) % self.p
        if x == 0:
            raise Singular("zero has no inverse")
        return pow(x, -1, self.p)

    def scale(self, vec, c: int):
        """``c * vec`` mod p for a Python-int scalar."""
        p = self.p
        c = int(c) % p
        return np.array([b * c % p for b in np.asarray(vec).tolist()], dtype=np.uint64)

    def matmul(self, A, B):
        """Exact product over the field (cubic, used only by checks)."""
        A = np.asarray(A, dtype=np.uint64)
        B = np.asarray(B, dtype=np.uint64)
        if A.shape[1] != B.shape[0]:
            raise DimensionMismatch(f"{A.shape} @ {B.shape}")
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.uint64)
        for k in range(A.shape[1]):
            out = self.add(out, self.mul(A[:, k][:, None], B[k, :][None, :]))
        return out

    def identity(self, n):
        return np.eye(n, dtype=np.uint64)


DEFAULT_FIELD = Field()


def invert(M, field: Field = DEFAULT_FIELD):
    """Inverse of a square field matrix by Gauss-Jordan elimination.

    Raises :class:`Singular` if ``M`` is not invertible.
    """
    M = np.asarray(M, dtype=np.uint64)
    n, m = M.shape
    if n != m:
        raise DimensionMismatch(f"cannot invert a {n}x{m} matrix")
    aug = np.concatenate([M.copy(), np.eye(n, dtype=np.uint64)], axis=1)
    for c in range(n):
        nz = np.nonzero(aug[c:, c])[0]
        if nz.size == 0:
            raise Singular(f"matrix is singular (column {c})")
        r = c + int(nz[0])
        if r != c:
            aug[[c, r]] = aug[[r, c]]
        piv_inv = field.inv(aug[c, c])
        aug[c] = field.mul(aug[c], np.uint64(piv_inv))
        factors = aug[:, c].copy()
        factors[c] = 0
        aug = field.sub(aug, field.mul(factors[:, None], aug[c][None, :]))
    return aug[:, n:].copy()


def rank1_update(Ninv, i: int, j: int, delta: int, field: Field = DEFAULT_FIELD, rows=None):
    """Inverse of ``M + delta * e_i e_j^T`` given ``Ninv = M^{-1}``.

    Sherman-Morrison in O(n^2) field operations.  With ``rows`` given, only
    that row block of the new inverse is returned, computed as
    ``N[R, :] + (B^{-1} - I)[R, j'] * N[j, :]`` -- it needs nothing but the
    j-th row of the old inverse besides the block itself.
    """
    Ninv = np.asarray(Ninv, dtype=np.uint64)
    delta = int(delta) % field.p
    if delta == 0:
        return Ninv.copy() if rows is None else Ninv[list(rows)].copy()
    denom = (1 + delta * int(Ninv[j, i])) % field.p
    if denom == 0:
        raise Singular(f"rank-1 update at ({i}, {j}) makes the matrix singular")
    coef = delta * field.inv(denom) % field.p
    col = Ninv[:, i] if rows is None else Ninv[list(rows), i]
    base = Ninv if rows is None else Ninv[list(rows)]
    return field.sub_outer(base, col, field.scale(Ninv[j, :], coef))


# --------------------------------------------------------------------------
# products with witnesses


def bool_product_witness(A, B):
    """Boolean product and, per entry, the smallest witnessing inner index (or -1)."""
    A = np.asarray(A, dtype=bool)
    B = np.asarray(B, dtype=bool)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise DimensionMismatch(f"{A.shape} x {B.shape}")
    rows, mid = A.shape
    cols = B.shape[1]
    W = np.full((rows, cols), NO_WITNESS, dtype=np.int64)
    for k in range(mid - 1, -1, -1):
        hit = A[:, k][:, None] & B[k, :][None, :]
        W[hit] = k
    return W >= 0, W


def _check_bounded(X, h):
    fin = X[X < INT_INF]
    if fin.size and (fin.min() < 0 or fin.max() > h):
        raise EntryOutOfRange(f"finite entries must lie in [0, {h}]")


def minplus_bounded(A, B, h: int):
    """Min-plus product clipped at ``h``: entries above h become ``INT_INF``.

    Inputs are int64 arrays whose finite entries are integers in [0, h] and
    whose missing entries equal :data:`INT_INF`.  Returns ``(D, W)`` with the
    smallest minimising inner index in W (-1 where D is infinite).
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise DimensionMismatch(f"{A.shape} x {B.shape}")
    h = int(h)
    _check_bounded(A, h)
    _check_bounded(B, h)
    rows, mid = A.shape
    cols = B.shape[1]
    D = np.full((rows, cols), INT_INF, dtype=np.int64)
    W = np.full((rows, cols), NO_WITNESS, dtype=np.int64)
    if mid == 0:
        return D, W
    # rows x mid x cols candidates, in row chunks to bound memory;
    # argmin returns the first minimum, i.e. the smallest witness
    step = max(1, _CHUNK // max(1, mid * cols))
    for r0 in range(0, rows, step):
        cand = A[r0:r0 + step, :, None] + B[None, :, :]
        k = cand.argmin(axis=1)
        D[r0:r0 + step] = np.take_along_axis(cand, k[:, None, :], axis=1)[:, 0, :]
        W[r0:r0 + step] = k
    over = D > h
    D[over] = INT_INF
    W[over] = NO_WITNESS
    return D, W


def minplus_exact(A, B):
    """Plain (unclipped) float min-plus product with smallest-index witnesses."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise DimensionMismatch(f"{A.shape} x {B.shape}")
    rows, mid = A.shape
    D = np.full((rows, B.shape[1]), np.inf)
    W = np.full(D.shape, NO_WITNESS, dtype=np.int64)
    for k in range(mid):
        cand = A[:, k][:, None] + B[k, :][None, :]
        better = cand < D
        D[better] = cand[better]
        W[better] = k
    return D, W


def _check_approx_entries(X):
    fin = X[np.isfinite(X)]
    if fin.size and ((fin < 0).any() or ((fin > 0) & (fin < 1)).any()):
        raise EntryOutOfRange("finite entries must be 0 or at least 1")


def minplus_approx(A, B, eps: float):
    """(1+eps)-approximate min-plus product with exact witnesses.

    For every entry, ``exact <= D[i, j] = A[i, w] + B[w, j] <= (1 + eps) * exact``.
    Works scale by scale: at scale r (a power of two up to the largest
    entry) every entry <= r is rounded up to a multiple of ``eps * r / 4`` and
    an integer bounded product is run; the best *unrounded* value over all
    scales is kept.  Zero entries (as on a min-plus identity diagonal) are
    kept exact.
    """
    if not (0 < eps <= 1) or math.isnan(eps):
        raise BadEpsilon(f"eps must lie in (0, 1], got {eps}")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise DimensionMismatch(f"{A.shape} x {B.shape}")
    _check_approx_entries(A)
    _check_approx_entries(B)
    rows, mid = A.shape
    cols = B.shape[1]
    D = np.full((rows, cols), np.inf)
    W = np.full((rows, cols), NO_WITNESS, dtype=np.int64)
    finite = np.concatenate([A[np.isfinite(A)], B[np.isfinite(B)]])
    top = float(finite.max()) if finite.size else 0.0
    per_side = math.ceil(4.0 / eps) + 1
    h = 2 * per_side
    r = 1.0
    while True:
        step = eps * r / 4.0
        Ai = np.where(A <= r, np.ceil(A / step), np.inf)
        Bi = np.where(B <= r, np.ceil(B / step), np.inf)
        Ai = np.where(np.isfinite(Ai), Ai, INT_INF).astype(np.int64)
        Bi = np.where(np.isfinite(Bi), Bi, INT_INF).astype(np.int64)
        _, Wr = minplus_bounded(Ai, Bi, h)
        ii, jj = np.nonzero(Wr >= 0)
        if ii.size:
            ww = Wr[ii, jj]
            vals = A[ii, ww] + B[ww, jj]
            better = vals < D[ii, jj]
            D[ii[better], jj[better]] = vals[better]
            W[ii[better], jj[better]] = ww[better]
        if r >= top:
            break
        r *= 2.0
    return D, W


# --------------------------------------------------------------------------


def greedy_hitting_set(paths, n: int) -> list[int]:
    """Greedy hitting set: repeatedly take the vertex on most unhit paths.

    Ties go to the smaller vertex id.  If every path has at least k vertices,
    the result has at most ``(n / k) * (1 + ln(#paths))`` elements, which is
    asserted on the way out.
    """
    paths = [tuple(p) for p in paths]
    if not paths:
        return []
    for p in paths:
        if len(p) < 1:
            raise ValueError("paths must be non-empty vertex lists")
    containing: list[list[int]] = [[] for _ in range(n)]
    for idx, p in enumerate(paths):
        for v in set(p):
            containing[v].append(idx)
    count = [len(c) for c in containing]
    hit = [False] * len(paths)
    left = len(paths)
    chosen = []
    while left:
        best = max(range(n), key=lambda v: (count[v], -v))
        chosen.append(best)
        for idx in containing[best]:
            if not hit[idx]:
                hit[idx] = True
                left -= 1
                for v in set(paths[idx]):
                    count[v] -= 1
    k = min(len(set(p)) for p in paths)
    bound = (n / k) * (1.0 + math.log(len(paths)))
    assert len(chosen) <= bound + 1e-9, (len(chosen), bound)
    return sorted(chosen)
