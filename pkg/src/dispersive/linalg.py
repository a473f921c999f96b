"""Dense real-symmetric eigensolvers, matrix exponential and norms.

Two eigensolvers are provided: cyclic Jacobi for small matrices and
Householder tridiagonalization followed by implicit-shift QL for larger
ones. Both are compiled with numba; the kernels release the GIL so
independent calls can run on threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numba
import numpy as np

from .errors import NonConvergenceError, NumericalError
from .operators import Operator, Symmetry

JACOBI_MAX_DIM = 64
MAX_JACOBI_SWEEPS = 100
MAX_QL_ITERATIONS = 60
EXPM_SCALE_TARGET = 0.5
EXPM_TAYLOR_DEGREE = 18


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    dim: int

    def __iter__(self):
        return iter((self.eigenvalues, self.eigenvectors))


@numba.njit(cache=True, nogil=True)
def _jacobi_kernel(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if off <= tol * tol:
            return v, sweep, math.sqrt(off)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    off = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            off += a[p, q] * a[p, q]
    return v, -1, math.sqrt(off)


@numba.njit(cache=True, nogil=True)
def _tred2(v, d, e):
    # Householder reduction to tridiagonal form; v holds the accumulated transform.
    n = v.shape[0]
    for j in range(n):
        d[j] = v[n - 1, j]
    for i in range(n - 1, 0, -1):
        scale = 0.0
        h = 0.0
        for k in range(i):
            scale += abs(d[k])
        if scale == 0.0:
            e[i] = d[i - 1]
            for j in range(i):
                d[j] = v[i - 1, j]
                v[i, j] = 0.0
                v[j, i] = 0.0
        else:
            for k in range(i):
                d[k] /= scale
                h += d[k] * d[k]
            f = d[i - 1]
            g = math.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            for j in range(i):
                e[j] = 0.0
            for j in range(i):
                f = d[j]
                v[j, i] = f
                g = e[j] + v[j, j] * f
                for k in range(j + 1, i):
                    g += v[k, j] * d[k]
                    e[k] += v[k, j] * f
                e[j] = g
            f = 0.0
            for j in range(i):
                e[j] /= h
                f += e[j] * d[j]
            hh = f / (h + h)
            for j in range(i):
                e[j] -= hh * d[j]
            for j in range(i):
                f = d[j]
                g = e[j]
                for k in range(j, i):
                    v[k, j] -= f * e[k] + g * d[k]
                d[j] = v[i - 1, j]
                v[i, j] = 0.0
        d[i] = h
    for i in range(n - 1):
        v[n - 1, i] = v[i, i]
        v[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            for k in range(i + 1):
                d[k] = v[k, i + 1] / h
            for j in range(i + 1):
                g = 0.0
                for k in range(i + 1):
                    g += v[k, i + 1] * v[k, j]
                for k in range(i + 1):
                    v[k, j] -= g * d[k]
        for k in range(i + 1):
            v[k, i + 1] = 0.0
    for j in range(n):
        d[j] = v[n - 1, j]
        v[n - 1, j] = 0.0
    v[n - 1, n - 1] = 1.0
    e[0] = 0.0


@numba.njit(cache=True, nogil=True)
def _tql2(v, d, e, max_iter):
    # Implicit-shift QL on the tridiagonal (d, e); rotations accumulated into v.
    # Returns -1 on success, else the index of the eigenvalue that did not converge.
    n = v.shape[0]
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    f = 0.0
    tst1 = 0.0
    eps = 2.0**-52
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n - 1:
            if abs(e[m]) <= eps * tst1:
                break
            m += 1
        if m > l:
            it = 0
            while True:
                it += 1
                if it > max_iter:
                    return l
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = math.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                for i in range(l + 2, n):
                    d[i] -= h
                f += h
                p = d[m]
                c = 1.0
                c2 = c
                c3 = c
                el1 = e[l + 1]
                s = 0.0
                s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = math.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    for k in range(n):
                        h = v[k, i + 1]
                        v[k, i + 1] = s * v[k, i] + c * h
                        v[k, i] = c * v[k, i] - s * h
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= eps * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    return -1


def _as_symmetric_array(a) -> np.ndarray:
    if isinstance(a, Operator):
        if a.symmetry is not Symmetry.SYMMETRIC:
            raise ValueError(f"eig_sym needs a symmetric operator, got {a.symmetry.value}")
        return np.array(a.data, dtype=float)
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    scale = max(np.abs(arr).max(initial=0.0), 1.0)
    if np.abs(arr - arr.T).max(initial=0.0) > 1e-12 * scale:
        raise ValueError("eig_sym needs a symmetric matrix")
    return 0.5 * (arr + arr.T)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    # Largest-magnitude component of each eigenvector made positive (first one on ties).
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def eig_sym(a, method: str = "auto") -> EigenDecomposition:
    """Full eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    a : Operator or array_like
        Symmetric input. Operators must carry the symmetric flag.
    method : {"auto", "jacobi", "ql"}
        ``auto`` picks Jacobi up to dimension 64 and Householder/QL above.

    Returns
    -------
    EigenDecomposition
        Ascending eigenvalues and orthonormal eigenvector columns.
    """
    arr = _as_symmetric_array(a)
    if not np.all(np.isfinite(arr)):
        raise NumericalError("non-finite entries in eig_sym input")
    n = arr.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0)), 0)
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_DIM else "ql"
    if method == "jacobi":
        scale = np.linalg.norm(arr)
        work = np.ascontiguousarray(arr)
        vecs, sweeps, off = _jacobi_kernel(work, 1e-15 * scale, MAX_JACOBI_SWEEPS)
        if sweeps < 0:
            raise NonConvergenceError(
                f"Jacobi did not converge in {MAX_JACOBI_SWEEPS} sweeps", float(np.abs(np.triu(work, 1)).max())
            )
        vals = np.diag(work).copy()
    elif method == "ql":
        vecs = np.ascontiguousarray(arr)
        vals = np.zeros(n)
        off = np.zeros(n)
        _tred2(vecs, vals, off)
        failed = _tql2(vecs, vals, off, MAX_QL_ITERATIONS)
        if failed >= 0:
            raise NonConvergenceError(
                f"QL iteration did not converge for eigenvalue {failed}", float(np.abs(off).max())
            )
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = _fix_signs(vecs[:, order])
    return EigenDecomposition(vals, vecs, n)


def _one_norm(a: np.ndarray) -> float:
    return float(np.abs(a).sum(axis=0).max(initial=0.0))


def expm(g) -> Operator | np.ndarray:
    """Matrix exponential by scaling and squaring around a Taylor core.

    The argument is scaled by ``2**-s`` so its 1-norm is at most 0.5, the
    degree-18 Taylor polynomial is evaluated by Horner's rule, and the
    result is squared ``s`` times. Returns the same type it was given.
    """
    arr = np.array(g.data if isinstance(g, Operator) else g, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NumericalError("non-finite entries in expm input")
    n = arr.shape[0]
    norm = _one_norm(arr)
    s = max(0, math.ceil(math.log2(norm / EXPM_SCALE_TARGET))) if norm > 0 else 0
    x = arr / 2.0**s
    eye = np.eye(n)
    out = eye.copy()
    for k in range(EXPM_TAYLOR_DEGREE, 0, -1):
        out = eye + (x @ out) / k
    for _ in range(s):
        out = out @ out
    if isinstance(g, Operator):
        return Operator(g.basis, out)
    return out


class Norms(NamedTuple):
    frobenius: float
    max_abs: float
    spectral_est: float


def norms(a, iterations: int = 500) -> Norms:
    """Frobenius, max-abs and a power-method estimate of the spectral norm.

    The spectral norm is estimated by power iteration on ``A^T A`` from a
    fixed start vector; it is a lower bound that is usually tight.
    """
    arr = np.asarray(a.data if isinstance(a, Operator) else a, dtype=float)
    fro = float(np.sqrt(np.sum(arr * arr)))
    mx = float(np.abs(arr).max(initial=0.0))
    if mx == 0.0:
        return Norms(fro, mx, 0.0)
    n = arr.shape[1]
    x = 1.0 + np.arange(n) / max(n, 1)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iterations):
        y = arr.T @ (arr @ x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            break
        new = math.sqrt(ny)
        x = y / ny
        if abs(new - est) <= 1e-14 * new:
            est = new
            break
        est = new
    return Norms(fro, mx, est)
