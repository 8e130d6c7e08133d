"""Frame analysis and synthesis on step spectra.

The region of wavelet ``j`` at scale ``n`` is ``E_j A^n``.  With ``E_j`` a
coset of ``G_{-s}^perp`` whose leading digit sits at level ``M - t``, the
region is a coset of ``G_{n-s}^perp`` inside the ring with index
``M - t + n`` (ring ``k`` means ``G_{k+1}^perp \\ G_k^perp``).  A region is
either disjoint from the identity cell ``G_{-N_F}^perp`` of a spectrum or
contained in it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WindowTooSmall
from .frame import FrameSystem
from .group import TAU_EQ, TAU_ZERO, CharCoset, ShiftIndex, coset_cells, coset_dilate, digit_reverse_array
from .step import (
    Spectrum,
    StepSignal,
    coset_energy,
    dilate_signal,
    identity_cell_energy,
    inner,
    inverse_fourier,
    norm_sq,
    refine_signal,
    refine_spectrum,
    translate,
)

_INT64_SAFE = 2**62


@dataclass
class CoefficientBlock:
    j: int
    n: int
    S: int  # shifts h = n_h / p^S, n_h in [0, p^S)
    coeffs: np.ndarray

    def energy(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def as_map(self, p: int) -> dict:
        return {ShiftIndex(self.S, k, p): complex(c) for k, c in enumerate(self.coeffs)}


def region(fs: FrameSystem, j: int, n: int) -> CharCoset:
    return coset_dilate(fs.wavelets[j].E, n)


def region_ring(fs: FrameSystem, j: int, n: int) -> int:
    return fs.params.M - fs.wavelets[j].t + n


def scale_range(F: Spectrum, fs: FrameSystem, j: int) -> range:
    """Scales ``n`` whose region for wavelet ``j`` lies in ``supp F`` outside the identity cell."""
    t = fs.wavelets[j].t
    M = fs.params.M
    return range(-F.N - M + t, F.M - M + t)


def regions_in_window(F: Spectrum, fs: FrameSystem):
    return [(j, n) for j in range(fs.q) for n in scale_range(F, fs, j)]


def _phases(xi: np.ndarray, nh: np.ndarray, den_exp: int, p: int) -> np.ndarray:
    """``exp(2 pi i xi * nh / p^den_exp)`` as a (len(xi), len(nh)) matrix."""
    if den_exp <= 0:
        return np.ones((xi.size, nh.size), dtype=complex)
    den = p**den_exp
    if den * den < _INT64_SAFE:
        prod = np.outer(np.mod(xi, den), np.mod(nh, den)) % den
        prod = np.where(2 * prod > den, prod - den, prod)
        return np.exp(2j * np.pi * (prod / den))
    xo = np.mod(xi.astype(object), den)
    no = np.mod(nh.astype(object), den)
    prod = np.mod(np.outer(xo, no), den)
    prod = np.where(2 * prod > den, prod - den, prod)
    return np.exp(2j * np.pi * np.array([[float(v) / den for v in row] for row in prod]))


def required_shift_depth(F: Spectrum, fs: FrameSystem, j: int, n: int) -> int:
    return max(F.N + n, fs.wavelets[j].s, 0)


def _region_cells(F: Spectrum, R: CharCoset, c: int):
    """Values of F on the cells of R at granularity ``c`` and their xi numerators."""
    T = F.M
    G = refine_spectrum(F, -c, T) if -c > F.N else F
    cells = coset_cells(R, c, T)
    xi = digit_reverse_array(T - c, F.p)[cells]
    return G.values[cells], xi


def analysis_coeffs(F: Spectrum, fs: FrameSystem, j: int, n: int, S: int | None = None) -> CoefficientBlock:
    """``c_h = <f, psi_{n,h}>`` for every shift of depth ``S``.

    ``S`` defaults to the smallest depth carrying every nonzero coefficient.
    A smaller ``S`` raises :class:`WindowTooSmall` if it would drop a
    coefficient above ``tau_zero``.
    """
    p = F.p
    w = fs.wavelets[j]
    S_req = required_shift_depth(F, fs, j, n)
    R = region(fs, j, n)
    lead = R.leading_level
    if lead is not None and lead >= F.M:
        full = np.zeros(p**S_req, dtype=complex)
    else:
        c = min(-F.N, n - w.s)
        vals, xi = _region_cells(F, R, c)
        nh = np.arange(p**S_req, dtype=np.int64)
        ph = _phases(xi, nh, F.M + S_req - n, p)
        full = float(p) ** (-n / 2) * float(p) ** c * (vals @ ph)
    if S is None or S == S_req:
        return CoefficientBlock(j, n, S_req, full)
    if S > S_req:
        out = np.zeros(p**S, dtype=complex)
        out[:: p ** (S - S_req)] = full
        return CoefficientBlock(j, n, S, out)
    keep = np.zeros(full.size, dtype=bool)
    keep[:: p ** (S_req - S)] = True
    dropped = np.abs(full[~keep])
    if dropped.size and dropped.max() > TAU_ZERO:
        raise WindowTooSmall(f"shift depth {S} drops a coefficient of size {dropped.max():.3e}")
    return CoefficientBlock(j, n, S, full[keep])


def coefficient_oracle(f: StepSignal, fs: FrameSystem, j: int, n: int, h: ShiftIndex) -> complex:
    """``<f, p^(n/2) psi(A^n . - h)>`` assembled in the time domain."""
    psi = inverse_fourier(fs.wavelets[j].psi_hat)
    J = max(psi.J, h.s)
    psi = refine_signal(psi, J, psi.K)
    g = dilate_signal(translate(psi, h), n)
    a, b = f, g
    Jc, Kc = max(a.J, b.J), max(a.K, b.K)
    a, b = refine_signal(a, Jc, Kc), refine_signal(b, Jc, Kc)
    return inner(a, b) * float(f.p) ** (n / 2)


def lemma31_check(F: Spectrum, fs: FrameSystem, j: int, n: int):
    lhs = analysis_coeffs(F, fs, j, n).energy()
    rhs = coset_energy(F, region(fs, j, n))
    return lhs, rhs, abs(lhs - rhs)


@dataclass
class PartitionReport:
    ok: bool
    V: int
    W: int
    granularity: int
    n_cells: int
    uncovered: list
    multiple: list

    def as_dict(self):
        return {
            "ok": self.ok, "V": self.V, "W": self.W, "granularity": self.granularity,
            "cells": self.n_cells, "uncovered": self.uncovered, "multiple": self.multiple,
        }


def partition_check(fs: FrameSystem, V: int, W: int) -> PartitionReport:
    """Count how many regions cover each cell of ``G_W^perp \\ G_{-V}^perp``."""
    if V < 1 or W < 1:
        raise ValueError("V and W must be >= 1")
    P = fs.params
    p, M = P.p, P.M
    pairs = []
    for j, w in enumerate(fs.wavelets):
        # ring index M - t + n must fall in [-V, W)
        for n in range(-V - M + w.t, W - M + w.t):
            pairs.append((j, n))
    c = min([-V] + [n - fs.wavelets[j].s for j, n in pairs])
    counts = np.zeros(p ** (W - c), dtype=np.int64)
    for j, n in pairs:
        counts[coset_cells(region(fs, j, n), c, W)] += 1
    inner_cells = p ** (-V - c)
    ring = counts[inner_cells:]
    unc = (np.flatnonzero(ring == 0) + inner_cells)[:16].tolist()
    mult = (np.flatnonzero(ring > 1) + inner_cells)[:16].tolist()
    leaked = np.flatnonzero(counts[:inner_cells])[:16].tolist()
    ok = bool(not unc and not mult and not leaked)
    return PartitionReport(ok, V, W, c, int(ring.size), unc, mult + leaked)


@dataclass
class ParsevalResult:
    sum_energies: float
    norm_sq: float
    tail: float
    gap: float
    sum_coeffs: float | None = None

    @property
    def ok(self) -> bool:
        ok = self.gap <= TAU_EQ
        if self.sum_coeffs is not None:
            ok = ok and abs(self.sum_coeffs + self.tail - self.norm_sq) <= TAU_EQ
        return ok


def parseval_check(F: Spectrum, fs: FrameSystem, n_range=None, use_coefficients: bool = False) -> ParsevalResult:
    """Frame energy bookkeeping for one spectrum.

    ``n_range`` is ``(lo, hi)`` inclusive; scales below ``lo`` contribute the
    tail, evaluated exactly: regions outside the identity cell by cell sums,
    regions inside it in closed form as ``|F[0]|^2 nu(E_j) sum p^n``.
    """
    p = F.p
    P = fs.params
    if n_range is None:
        lo = min(scale_range(F, fs, j).start for j in range(fs.q))
        hi = max(scale_range(F, fs, j).stop - 1 for j in range(fs.q))
    else:
        lo, hi = n_range
    total = 0.0
    coeff_total = 0.0 if use_coefficients else None
    tail = 0.0
    for j, w in enumerate(fs.wavelets):
        for n in range(lo, hi + 1):
            total += coset_energy(F, region(fs, j, n))
            if use_coefficients:
                coeff_total += analysis_coeffs(F, fs, j, n).energy()
        # scales below lo: direct sums while the region avoids the identity cell
        n_id = -F.N - 1 - P.M + w.t  # last scale whose region sits in the identity cell
        for n in range(n_id + 1, lo):
            tail += coset_energy(F, region(fs, j, n))
        top = min(lo - 1, n_id)
        tail += abs(F.values[0]) ** 2 * float(p) ** (-w.s) * float(p) ** top / (1 - 1 / p)
    nrm = norm_sq(F)
    return ParsevalResult(total, nrm, tail, abs(total + tail - nrm), coeff_total)


def remainder_energy(F: Spectrum, fs: FrameSystem, Ntilde: int) -> float:
    """``R_Ntilde``: norm of what the scales ``n > Ntilde`` carry."""
    acc = 0.0
    for j in range(fs.q):
        for n in scale_range(F, fs, j):
            if n > Ntilde:
                acc += coset_energy(F, region(fs, j, n))
    return float(np.sqrt(acc))


def _included(F, fs, Ntilde):
    return [(j, n) for j, n in regions_in_window(F, fs) if n <= Ntilde]


def _out_window(F, fs, pairs):
    return max([F.N] + [fs.wavelets[j].s - n for j, n in pairs])


def partial_reconstruct(F: Spectrum, fs: FrameSystem, Ntilde: int) -> Spectrum:
    """``sum_{n <= Ntilde, j, h} c psi^_{n,h}`` assembled coefficient by coefficient.

    Regions inside the identity cell are left out; see :func:`masked_spectrum`.
    """
    p = F.p
    T = F.M
    pairs = _included(F, fs, Ntilde)
    Nout = _out_window(F, fs, pairs)
    out = np.zeros(p ** (Nout + T), dtype=complex)
    rev = digit_reverse_array(T + Nout, p)
    for j, n in pairs:
        blk = analysis_coeffs(F, fs, j, n)
        cells = coset_cells(region(fs, j, n), -Nout, T)
        nh = np.arange(p**blk.S, dtype=np.int64)
        ph = _phases(rev[cells], nh, T + blk.S - n, p)
        out[cells] += float(p) ** (-n / 2) * (np.conj(ph) @ blk.coeffs)
    return Spectrum(p, Nout, T, out)


def masked_spectrum(F: Spectrum, fs: FrameSystem, Ntilde: int) -> Spectrum:
    """``F`` times the indicator of the regions used by :func:`partial_reconstruct`."""
    pairs = _included(F, fs, Ntilde)
    Nout = _out_window(F, fs, pairs)
    G = refine_spectrum(F, Nout, F.M)
    mask = np.zeros(G.values.size, dtype=bool)
    for j, n in pairs:
        mask[coset_cells(region(fs, j, n), -Nout, F.M)] = True
    return Spectrum(F.p, Nout, F.M, np.where(mask, G.values, 0))


def identity_region_energy(F: Spectrum) -> float:
    return identity_cell_energy(F)
