"""Coset families tiling the outer ring, and the wavelet masks they induce.

A candidate pair ``(E, t)`` is described by a mask-tree node ``v``: ``E`` is
the coset of ``G_{-s}^perp`` whose digits (levels ``-s .. M-t``) are those of
``v``.  Dilating by ``A^t`` moves ``E`` onto the ring cells whose leading
digits spell ``v``, i.e. the leaves of the subtree under ``v``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DivisionByZeroCell, NoTiling
from .exact_cover import exact_cover
from .group import TAU_EQ, TAU_ZERO, CharCoset, Params, coset_cells, coset_dilate, to_digits
from .mask import MaskSolution, node_level
from .step import Spectrum, indicator_spectrum


@dataclass(frozen=True)
class Candidate:
    t: int
    s: int
    node: int
    E: CharCoset
    cells: tuple  # cells of E at granularity -N, window top M+1
    ring: tuple  # cells of E A^t at granularity -N

    @property
    def key(self):
        return (self.t, -self.s, self.node)


@dataclass
class WaveletSpec:
    E: CharCoset
    t: int
    mask_cells: np.ndarray  # m_j on the cells of G_{M+1}^perp at granularity -N
    psi_hat: Spectrum

    @property
    def s(self) -> int:
        return -self.E.base


@dataclass
class FrameSystem:
    params: Params
    mask: MaskSolution | None
    phi_hat: Spectrum
    wavelets: list = field(default_factory=list)

    @property
    def l(self) -> int:
        return max((w.t for w in self.wavelets), default=0)

    @property
    def q(self) -> int:
        return len(self.wavelets)


def _params_of(phi_hat: Spectrum) -> Params:
    return Params(phi_hat.p, phi_hat.N, phi_hat.M)


def ring_cells(params: Params) -> np.ndarray:
    """Cells of ``G_{M+1}^perp \\ G_M^perp`` at granularity ``-N``."""
    return np.arange(params.p**params.height, params.n_nodes, dtype=np.int64)


def dilated_phi_hat(phi_hat: Spectrum) -> np.ndarray:
    """``phi^(chi A^-1)`` on the cells of ``G_{M+1}^perp``: drop the lowest digit."""
    u = np.arange(phi_hat.p ** (phi_hat.N + phi_hat.M + 1), dtype=np.int64)
    return phi_hat.values[u // phi_hat.p]


def forbidden_cells(phi_hat: Spectrum) -> np.ndarray:
    return np.flatnonzero(np.abs(dilated_phi_hat(phi_hat)) <= TAU_ZERO)


def candidates(phi_hat: Spectrum, admissible_only: bool = True) -> list[Candidate]:
    """All ``(E, t)`` pairs in search order ``(t, s descending, node)``."""
    P = _params_of(phi_hat)
    p, N, M = P.p, P.N, P.M
    bad = np.zeros(P.n_nodes, dtype=bool)
    bad[forbidden_cells(phi_hat)] = True
    out = []
    for t in range(N + 1):
        for s in range(N, -1, -1):
            level = M - t + s + 1
            if level < 1:
                continue
            for v in range(p ** (level - 1), p**level):
                E = CharCoset(-s, tuple(to_digits(v, level, p)), p)
                cells = coset_cells(E, -N, M + 1)
                if admissible_only and bad[cells].any():
                    continue
                ring = coset_cells(coset_dilate(E, t), -N, M + 1)
                out.append(Candidate(t, s, v, E, tuple(cells.tolist()), tuple(ring.tolist())))
    return out


def _no_tiling(phi_hat, why):
    forb = forbidden_cells(phi_hat)
    return NoTiling(f"{why}; forbidden cells: {forb.tolist()}", forb.tolist())


def search_tiling(phi_hat: Spectrum, strategy: str = "greedy", budget: int | None = None):
    """A family of ``(E, t)`` pairs whose dilates partition the outer ring."""
    P = _params_of(phi_hat)
    cands = candidates(phi_hat)
    if strategy == "greedy":
        return _greedy(phi_hat, P, cands)
    if strategy == "exhaustive":
        sol = exact_cover(ring_cells(P).tolist(), [c.ring for c in cands], budget)
        if sol is None:
            raise _no_tiling(phi_hat, "no admissible coset family tiles the ring")
        chosen = sorted((cands[i] for i in sol), key=lambda c: c.ring[0])
        return [(c.E, c.t) for c in chosen]
    raise ValueError(f"unknown strategy {strategy!r}")


def _greedy(phi_hat, P, cands):
    first = P.p**P.height
    covered = np.zeros(P.n_nodes - first, dtype=bool)
    by_cell: dict[int, list[Candidate]] = {}
    for c in cands:
        for r in c.ring:
            by_cell.setdefault(r, []).append(c)
    family = []
    for cell in ring_cells(P):
        if covered[cell - first]:
            continue
        pick = None
        for t in range(P.N + 1):
            options = [
                c for c in by_cell.get(int(cell), [])
                if c.t == t and not covered[np.asarray(c.ring) - first].any()
            ]
            if options:
                pick = min(options, key=lambda c: c.key)
                break
        if pick is None:
            raise _no_tiling(phi_hat, f"ring cell {int(cell)} has no admissible covering coset")
        covered[np.asarray(pick.ring) - first] = True
        family.append((pick.E, pick.t))
    return family


def build_wavelet_masks(phi_hat: Spectrum, family) -> list[WaveletSpec]:
    P = _params_of(phi_hat)
    lifted = dilated_phi_hat(phi_hat)
    out = []
    for E, t in family:
        cells = coset_cells(E, -P.N, P.M + 1)
        vals = lifted[cells]
        if np.any(np.abs(vals) <= TAU_ZERO):
            raise DivisionByZeroCell(f"coset {E} meets a cell where phi^(chi A^-1) vanishes")
        m = np.zeros(P.n_nodes, dtype=complex)
        m[cells] = 1 / vals
        out.append(WaveletSpec(E, int(t), m, indicator_spectrum(E, P.N, P.M + 1)))
    return out


def build_frame(mask: MaskSolution, phi_hat: Spectrum, strategy: str = "greedy", budget=None) -> FrameSystem:
    family = search_tiling(phi_hat, strategy, budget)
    return FrameSystem(mask.params, mask, phi_hat, build_wavelet_masks(phi_hat, family))


@dataclass
class FrameReport:
    ok: bool
    failures: list  # (check name, detail)

    def as_dict(self):
        return {"ok": self.ok, "failures": [{"check": c, "detail": d} for c, d in self.failures]}


def validate_frame_spec(fs: FrameSystem) -> FrameReport:
    P = fs.params
    p, N, M = P.p, P.N, P.M
    fail = []
    bad = set(forbidden_cells(fs.phi_hat).tolist())
    lifted = dilated_phi_hat(fs.phi_hat)
    e_count = np.zeros(P.n_nodes, dtype=np.int64)
    r_count = np.zeros(P.n_nodes, dtype=np.int64)
    for j, w in enumerate(fs.wavelets):
        E, t = w.E, w.t
        if not 0 <= t <= N:
            fail.append(("t_range", f"wavelet {j}: t={t} outside [0, {N}]"))
        if not 0 <= w.s <= N:
            fail.append(("s_range", f"wavelet {j}: s={w.s} outside [0, {N}]"))
        if E.leading_level != M - t:
            fail.append(("leading_digit", f"wavelet {j}: leading level {E.leading_level}, expected {M - t}"))
        if E.base < -N or (E.leading_level is not None and E.leading_level > M):
            fail.append(("support", f"wavelet {j}: coset not a union of cells inside G_{M + 1}^perp"))
            continue
        cells = coset_cells(E, -N, M + 1)
        hit = sorted(bad.intersection(cells.tolist()))
        if hit:
            fail.append(("forbidden", f"wavelet {j}: forbidden cells {hit}"))
        e_count[cells] += 1
        try:
            ring = coset_cells(coset_dilate(E, t), -N, M + 1)
            r_count[ring] += 1
        except Exception as exc:  # dilate escapes the window
            fail.append(("ring", f"wavelet {j}: {exc}"))
        # psi^ = phi^(chi A^-1) m_j must be the indicator of E
        prod = lifted * w.mask_cells
        ind = np.zeros(P.n_nodes)
        ind[cells] = 1
        err = np.flatnonzero(np.abs(prod - ind) > TAU_EQ)
        if err.size:
            fail.append(("psi_indicator", f"wavelet {j}: cells {err[:16].tolist()}"))
        if not np.allclose(w.psi_hat.values, ind, atol=TAU_EQ, rtol=0) or w.psi_hat.N != N:
            fail.append(("psi_hat", f"wavelet {j}: stored spectrum is not 1_E"))
    multi = np.flatnonzero(e_count > 1)
    if multi.size:
        fail.append(("disjoint_E", f"cells in several E_j: {multi[:16].tolist()}"))
    multi = np.flatnonzero(r_count > 1)
    if multi.size:
        fail.append(("disjoint_dilates", f"cells in several E_j A^t: {multi[:16].tolist()}"))
    ring = ring_cells(P)
    missing = ring[r_count[ring] == 0]
    if missing.size:
        fail.append(("partition_incomplete", f"ring cells not covered: {missing[:16].tolist()}"))
    outside = np.flatnonzero(r_count[: p**P.height] > 0)
    if outside.size:
        fail.append(("partition_outside", f"dilates land inside G_M^perp: {outside[:16].tolist()}"))
    return FrameReport(not fail, fail)


def node_of(E: CharCoset) -> int:
    """Tree node id spelled by the digits of ``E`` (inverse of the candidate map)."""
    return sum(d * E.p**i for i, d in enumerate(E.digits))


__all__ = [
    "Candidate", "WaveletSpec", "FrameSystem", "FrameReport", "forbidden_cells", "candidates",
    "search_tiling", "build_wavelet_masks", "build_frame", "validate_frame_spec", "ring_cells",
    "dilated_phi_hat", "node_of", "node_level",
]
