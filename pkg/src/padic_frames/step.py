"""Step functions on the group and on its dual, and the transform between them.

A :class:`StepSignal` with window ``(J, K)`` lives in ``D_K(G_{-J})``: it is
supported in ``G_{-J}`` and constant on cosets of ``G_K``.  A
:class:`Spectrum` with window ``(N, M)`` lives in ``D_{-N}(G_M^perp)``.
Value vectors are indexed by the digit encodings of :mod:`padic_frames.group`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShiftOutOfWindow
from .fft import reversed_dft, reversed_idft
from .group import CharCoset, PointIndex, ShiftIndex, coset_cells


@dataclass(frozen=True, eq=False)
class StepSignal:
    p: int
    J: int
    K: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if self.J + self.K < 0:
            raise ValueError("window length J+K must be >= 0")
        if vals.shape != (self.p ** (self.J + self.K),):
            raise ValueError(f"expected {self.p ** (self.J + self.K)} values, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int:
        return self.J + self.K

    @property
    def cell_measure(self) -> float:
        return float(self.p) ** (-self.K)


@dataclass(frozen=True, eq=False)
class Spectrum:
    p: int
    N: int
    M: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if self.N + self.M < 0:
            raise ValueError("window length N+M must be >= 0")
        if vals.shape != (self.p ** (self.N + self.M),):
            raise ValueError(f"expected {self.p ** (self.N + self.M)} values, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def length(self) -> int:
        return self.N + self.M

    @property
    def cell_measure(self) -> float:
        return float(self.p) ** (-self.N)

    def __mul__(self, scalar):
        return Spectrum(self.p, self.N, self.M, self.values * scalar)

    __rmul__ = __mul__


def fourier(f: StepSignal, method: str = "fft") -> Spectrum:
    """``f^(chi) = integral f(x) conj(chi, x) dmu(x)``, exact for step functions."""
    vals = reversed_dft(f.values, f.p, method) * f.cell_measure
    return Spectrum(f.p, f.J, f.K, vals)


def inverse_fourier(F: Spectrum, method: str = "fft") -> StepSignal:
    """``f(x) = integral f^(chi) (chi, x) dnu(chi)``."""
    vals = reversed_idft(F.values, F.p, method) * F.cell_measure
    return StepSignal(F.p, F.N, F.M, vals)


def norm_sq(obj: StepSignal | Spectrum) -> float:
    """Squared L2 norm with the cell measure of the object's window."""
    return float(np.sum(np.abs(obj.values) ** 2) * obj.cell_measure)


def inner(a: StepSignal | Spectrum, b: StepSignal | Spectrum) -> complex:
    if type(a) is not type(b) or a.values.shape != b.values.shape:
        raise ValueError("inner product needs objects on the same window")
    return complex(np.vdot(b.values, a.values) * a.cell_measure)


def refine_signal(f: StepSignal, J: int, K: int) -> StepSignal:
    """Re-express ``f`` on a wider window ``J >= f.J``, ``K >= f.K``."""
    if J < f.J or K < f.K:
        raise ValueError("refinement must not shrink the window")
    p = f.p
    w = np.arange(p ** (J + K), dtype=np.int64)
    low = p ** (J - f.J)
    inside = w % low == 0
    old = (w // low) % p**f.length
    vals = np.where(inside, f.values[old], 0)
    return StepSignal(p, J, K, vals)


def refine_spectrum(F: Spectrum, N: int, M: int) -> Spectrum:
    """Re-express ``F`` on a wider window ``N >= F.N``, ``M >= F.M``."""
    if N < F.N or M < F.M:
        raise ValueError("refinement must not shrink the window")
    p = F.p
    u = np.arange(p ** (N + M), dtype=np.int64)
    old = u // p ** (N - F.N)
    inside = old < p**F.length
    vals = np.where(inside, F.values[np.minimum(old, p**F.length - 1)], 0)
    return Spectrum(p, N, M, vals)


def common_window(*objs):
    """Embed step objects of one kind into their common refinement."""
    if isinstance(objs[0], StepSignal):
        J = max(o.J for o in objs)
        K = max(o.K for o in objs)
        return [refine_signal(o, J, K) for o in objs]
    N = max(o.N for o in objs)
    M = max(o.M for o in objs)
    return [refine_spectrum(o, N, M) for o in objs]


def evaluate(f: StepSignal, X: int, D: int) -> complex:
    """Value of ``f`` at the point ``x = X / p^D`` (``X`` any integer).

    ``X`` is read p-adically, so negative integers stand for elements with an
    infinite tail of ``p-1`` digits.
    """
    p = f.p
    if D >= f.J:
        step = p ** (D - f.J)
        if X % step:
            return 0j
        w = (X // step) % p**f.length
    else:
        w = (X * p ** (f.J - D)) % p**f.length
    return complex(f.values[w])


def translate(f: StepSignal, h: ShiftIndex | PointIndex) -> StepSignal:
    """``g(x) = f(x - h)`` with p-adic carries."""
    n = f.p**f.length
    if isinstance(h, ShiftIndex):
        if h.s > f.J:
            raise ShiftOutOfWindow(f"shift depth {h.s} exceeds support depth {f.J}")
        wh = h.n * f.p ** (f.J - h.s)
    else:
        if h.J > f.J:
            raise ShiftOutOfWindow(f"shift depth {h.J} exceeds support depth {f.J}")
        wh = h.w * f.p ** (f.J - h.J)
    idx = (np.arange(n, dtype=np.int64) - wh) % n
    return StepSignal(f.p, f.J, f.K, f.values[idx])


def dilate_signal(f: StepSignal, n: int) -> StepSignal:
    """``g(x) = f(A^n x)`` where ``A`` shifts every digit down one level.

    Only the window changes: ``(J, K) -> (J - n, K + n)``.
    """
    return StepSignal(f.p, f.J - n, f.K + n, f.values)


def dilate_spectrum(F: Spectrum, t: int) -> Spectrum:
    """``G(chi) = F(chi A^-t)``; the window becomes ``(N - t, M + t)``."""
    return Spectrum(F.p, F.N - t, F.M + t, F.values)


def indicator_ball(p: int, n: int, J: int, K: int) -> StepSignal:
    """``1_{G_n}`` on the window ``(J, K)``; requires ``-J <= n <= K``."""
    if not -J <= n <= K:
        raise ValueError("G_n is not representable on this window")
    w = np.arange(p ** (J + K), dtype=np.int64)
    return StepSignal(p, J, K, (w % p ** (n + J) == 0).astype(complex))


def indicator_spectrum(c: CharCoset, N: int, M: int) -> Spectrum:
    """``1_c`` on the window ``(N, M)``; ``c`` must be a union of cells."""
    vals = np.zeros(c.p ** (N + M), dtype=complex)
    vals[coset_cells(c, -N, M)] = 1
    return Spectrum(c.p, N, M, vals)


def coset_energy(F: Spectrum, c: CharCoset) -> float:
    """``integral_c |F|^2 dnu`` for a dual coset ``c``."""
    p = F.p
    lead = c.leading_level
    if lead is not None and lead >= F.M:
        return 0.0
    if c.base >= F.M:
        return norm_sq(F)
    if c.base >= -F.N:
        cells = coset_cells(c, -F.N, F.M)
        return float(np.sum(np.abs(F.values[cells]) ** 2) * F.cell_measure)
    # c is finer than one cell of F: locate the containing cell
    u = sum(c.digit_at(k) * p ** (k + F.N) for k in range(-F.N, F.M))
    return float(abs(F.values[u]) ** 2 * c.measure)


def ring_energy(F: Spectrum, n: int) -> float:
    """Energy of ``F`` on the ring ``G_{n+1}^perp \\ G_n^perp``."""
    p = F.p
    if n >= F.M:
        return 0.0
    if n < -F.N:
        return float(abs(F.values[0]) ** 2 * (float(p) ** (n + 1) - float(p) ** n))
    lo = p ** (n + F.N)
    hi = p ** (n + 1 + F.N)
    return float(np.sum(np.abs(F.values[lo:hi]) ** 2) * F.cell_measure)


def identity_cell_energy(F: Spectrum) -> float:
    """Energy on the cell ``G_{-N}^perp`` containing the trivial character."""
    return float(abs(F.values[0]) ** 2 * F.cell_measure)


def cell_levels(N: int, M: int, p: int) -> np.ndarray:
    """Ring level of each cell: ``chi`` in ``G_n^perp \\ G_{n-1}^perp`` gives ``n``.

    The identity cell gets ``-N`` (its top level); callers treat it separately.
    """
    u = np.arange(p ** (N + M), dtype=np.int64)
    lvl = np.full(u.shape, -N, dtype=np.int64)
    for k in range(N + M):
        lvl[u >= p**k] = k + 1 - N
    return lvl
