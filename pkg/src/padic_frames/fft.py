"""Radix-p transforms whose output comes out in digit-reversed order.

The group Fourier transform on a window of length ``L`` is

    y[u] = sum_w x[w] exp(-2 pi i rev(u) w / p^L)

which is a length ``p^L`` DFT read at the digit-reversed frequency.  A
decimation-in-frequency radix-p FFT produces exactly this ordering without a
final permutation, so the digit-reversal structure of the pairing becomes the
natural output order of the kernel.
"""
from __future__ import annotations

import numpy as np

from .group import digit_reverse_array, unit_roots


def _log_p(n: int, p: int) -> int:
    L = 0
    m = 1
    while m < n:
        m *= p
        L += 1
    if m != n:
        raise ValueError(f"length {n} is not a power of {p}")
    return L


def reversed_dft_direct(x: np.ndarray, p: int) -> np.ndarray:
    """Quadratic-time evaluation of ``y[u] = sum_w x[w] w_n^(rev(u) w)``."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    L = _log_p(n, p)
    rev = digit_reverse_array(L, p)
    w = np.arange(n, dtype=np.int64)
    expo = np.mod(np.outer(rev, w), n)
    return unit_roots(-expo, n) @ x if x.ndim == 1 else x @ unit_roots(-expo, n).T


def reversed_idft_direct(y: np.ndarray, p: int) -> np.ndarray:
    """Quadratic-time adjoint: ``x[w] = sum_u y[u] w_n^(-rev(u) w)``."""
    y = np.asarray(y, dtype=complex)
    n = y.shape[-1]
    L = _log_p(n, p)
    rev = digit_reverse_array(L, p)
    w = np.arange(n, dtype=np.int64)
    expo = np.mod(np.outer(w, rev), n)
    return unit_roots(expo, n) @ y if y.ndim == 1 else y @ unit_roots(expo, n).T


def fft_dif(x: np.ndarray, p: int) -> np.ndarray:
    """Radix-p decimation-in-frequency FFT, natural input, digit-reversed output.

    Works on the last axis, so a stack of signals can be transformed at once.
    """
    x = np.asarray(x, dtype=complex)
    lead = x.shape[:-1]
    n = x.shape[-1]
    _log_p(n, p)
    a = x.reshape(-1, n)
    batch = a.shape[0]
    k = np.arange(p)
    butterfly = unit_roots(-np.outer(k, k), p)
    blocks, m = 1, n
    while m > 1:
        q = m // p
        a = a.reshape(batch, blocks, p, q)
        y = np.einsum("ca,zbaq->zbcq", butterfly, a)
        y *= unit_roots(-np.outer(k, np.arange(q)), m)
        a = y.reshape(batch, blocks * p, q)
        blocks *= p
        m = q
    return a.reshape(*lead, n)


def ifft_dit(y: np.ndarray, p: int) -> np.ndarray:
    """Adjoint of :func:`fft_dif`: digit-reversed input, natural output."""
    y = np.asarray(y, dtype=complex)
    n = y.shape[-1]
    perm = digit_reverse_array(_log_p(n, p), p)
    # conj(DFT) applied to the frequency-ordered input, via the forward kernel.
    natural = np.conj(y)[..., perm]
    return np.conj(fft_dif(natural, p)[..., perm])


def reversed_dft(x: np.ndarray, p: int, method: str = "fft") -> np.ndarray:
    if method == "fft":
        return fft_dif(x, p)
    if method == "direct":
        return reversed_dft_direct(x, p)
    raise ValueError(f"unknown method {method!r}")


def reversed_idft(y: np.ndarray, p: int, method: str = "fft") -> np.ndarray:
    if method == "fft":
        return ifft_dit(y, p)
    if method == "direct":
        return reversed_idft_direct(y, p)
    raise ValueError(f"unknown method {method!r}")
