"""Remainder bounds for truncated frame expansions and the corpus report.

Ring levels follow ``|chi|_p = p^k`` for ``chi`` in ``G_k^perp \\ G_{k-1}^perp``.
Integrals over the identity cell ``G_{-N_F}^perp`` of a spectrum are split
into dual rings and summed in closed form.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .errors import HypothesisViolated
from .frame import FrameSystem
from .frame_ops import remainder_energy
from .step import Spectrum, cell_levels, ring_energy


@dataclass(frozen=True)
class WeightSpec:
    kind: str  # "generic" | "power" | "log"
    m: float = 1.0
    eps: float = 1.0
    gammas: tuple = ()

    def __post_init__(self):
        if self.kind not in ("generic", "power", "log"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "power" and self.m < 1:
            raise ValueError("power weight needs m >= 1")
        if self.kind == "log" and self.eps <= 0:
            raise ValueError("log weight needs eps > 0")
        if self.kind == "generic":
            g = np.asarray(self.gammas, dtype=float)
            if g.size == 0 or np.any(g < 1) or np.any(np.diff(g) < 0):
                raise ValueError("generic gammas must be nondecreasing and >= 1")

    def gamma(self, k: int, p: int) -> float:
        if k < 0:
            return 1.0
        if self.kind == "power":
            return float(p) ** (k * self.m)
        if self.kind == "log":
            return (k + 1) ** (1 + self.eps / 2)
        if k >= len(self.gammas):
            raise ValueError(f"generic weight undefined at level {k} (given up to {len(self.gammas) - 1})")
        return float(self.gammas[k])

    def tail(self, Ntilde: int, p: int) -> float:
        """``sum_{n > Ntilde} 1 / gamma_{n+1}``."""
        start = Ntilde + 2
        if start < 0:
            raise ValueError("tail is divergent for gamma = 1 at negative levels")
        if self.kind == "power":
            pm = float(p) ** self.m
            return 1.0 / ((pm - 1) * pm ** (Ntilde + 1))
        if self.kind == "log":
            return float(zeta(1 + self.eps / 2, start + 1))
        return float(sum(1.0 / g for g in self.gammas[start:]))

    def label(self) -> str:
        if self.kind == "power":
            return f"power_m{self.m:g}"
        if self.kind == "log":
            return f"log_eps{self.eps:g}"
        return "generic"


def frame_constant(fs: FrameSystem) -> float:
    P = fs.params
    return (P.N + 1) * float(P.p) ** ((P.M - 1) / 2)


def _check_hypotheses(fs: FrameSystem, Ntilde: int) -> None:
    P = fs.params
    if Ntilde <= P.N:
        warnings.warn(f"bound requires Ntilde > N; got Ntilde={Ntilde}, N={P.N}", HypothesisViolated, stacklevel=3)
    if P.M < 1:
        warnings.warn(
            f"bound derived for M >= 1; with M={P.M} the constant is {frame_constant(fs):.4g}",
            HypothesisViolated,
            stacklevel=3,
        )


def bound_thm31(F: Spectrum, fs: FrameSystem, Ntilde: int) -> float:
    """``C sum_{n > Ntilde} (energy on ring n - l)^(1/2)`` with ``C = (N+1) p^((M-1)/2)``."""
    _check_hypotheses(fs, Ntilde)
    l = fs.l
    acc = 0.0
    for n in range(Ntilde + 1, F.M + l):
        acc += math.sqrt(ring_energy(F, n - l))
    return frame_constant(fs) * acc


def bound_thm31_shifted(F: Spectrum, fs: FrameSystem, Ntilde: int) -> float:
    """Same bound with the sum re-indexed over rings ``k = n - l``."""
    l = fs.l
    acc = sum(math.sqrt(ring_energy(F, k)) for k in range(Ntilde + 1 - l, F.M))
    return frame_constant(fs) * acc


def _geom_tail(n0: int, a: float, p: int) -> float:
    """``sum_{n <= n0} p^(a n)`` for ``a > 0``."""
    return float(p) ** (a * n0) / (1 - float(p) ** (-a))


def _integral(F: Spectrum, level_weight, closed_below) -> float:
    """``integral w(chi)^2 |F|^2 dnu`` with ``w`` constant on dual rings.

    ``level_weight(k)`` gives ``w`` on ring level ``k``.  For the identity cell
    the levels ``k <= -N_F`` are summed explicitly down to ``closed_below``'s
    cut level, then ``closed_below(n0)`` supplies ``sum_{k <= n0} w_k^2 (p^k - p^{k-1})``.
    """
    p = F.p
    lv = cell_levels(F.N, F.M, p)
    w2 = np.array([level_weight(int(k)) ** 2 for k in range(-F.N, F.M + 1)])
    vals = np.abs(F.values[1:]) ** 2
    acc = float(np.sum(w2[lv[1:] + F.N] * vals) * F.cell_measure)
    cut, rest = closed_below
    k = -F.N
    inner = 0.0
    while k > cut:
        inner += level_weight(k) ** 2 * (float(p) ** k - float(p) ** (k - 1))
        k -= 1
    inner += rest(k)
    return acc + abs(F.values[0]) ** 2 * inner


def weighted_norm(F: Spectrum, w: WeightSpec, l: int) -> float:
    """``(integral gamma(chi A^l)^2 |F(chi)|^2 dnu)^(1/2)``."""
    p = F.p

    def lw(k):
        return w.gamma(k + l, p)

    # below level -l - 1 the weight is 1 and the rings add up to nu(G_k^perp)
    closed = (-l - 1, lambda k: float(p) ** k)
    return math.sqrt(_integral(F, lw, closed))


def bound_weighted(F: Spectrum, fs: FrameSystem, Ntilde: int, w: WeightSpec) -> float:
    _check_hypotheses(fs, Ntilde)
    return frame_constant(fs) * weighted_norm(F, w, fs.l) * w.tail(Ntilde, F.p)


def _power_integral(F: Spectrum, c: float, b: float) -> float:
    """``integral (1 + c |chi|^b)^2 |F|^2 dnu``."""
    p = F.p

    def lw(k):
        return 1 + c * float(p) ** (k * b)

    def rest(n0):
        # sum_{k <= n0} (1 + c p^(kb))^2 (p^k - p^(k-1))
        f = 1 - 1 / p
        return f * (_geom_tail(n0, 1, p) + 2 * c * _geom_tail(n0, b + 1, p) + c * c * _geom_tail(n0, 2 * b + 1, p))

    return _integral(F, lw, (-F.N, rest))


def bound_sobolev_power(F: Spectrum, fs: FrameSystem, Ntilde: int, m: float, literal: bool = False) -> float:
    """Power-weight remainder bound.

    The default weight is ``1 + p^(l m) |chi|^m``, which majorizes
    ``gamma(chi A^l)``.  ``literal=True`` uses ``1 + |chi|^(m+l)`` instead.
    """
    _check_hypotheses(fs, Ntilde)
    p = F.p
    l = fs.l
    pm = float(p) ** m
    coef = frame_constant(fs) / ((pm - 1) * pm ** (Ntilde + 1))
    if literal:
        integral = _power_integral(F, 1.0, m + l)
    else:
        integral = _power_integral(F, float(p) ** (l * m), m)
    return coef * math.sqrt(integral)


def log_weight_integral(F: Spectrum, eps: float, l: int) -> float:
    """``integral (1 + l + log_p^+ |chi|)^(2 + eps) |F|^2 dnu``."""
    p = F.p

    def lw(k):
        return (1 + l + (k if k > 0 else 1)) ** (1 + eps / 2)

    const = (2 + l) ** (2 + eps)
    return _integral(F, lw, (0, lambda k: const * float(p) ** k))


def bound_log(F: Spectrum, fs: FrameSystem, Ntilde: int, eps: float, literal: bool = False) -> float:
    """Log-weight remainder bound.

    The default keeps the frame constant ``(N+1) p^((M-1)/2)``; ``literal=True``
    uses ``N+1`` alone.
    """
    _check_hypotheses(fs, Ntilde)
    P = fs.params
    const = (P.N + 1) if literal else frame_constant(fs)
    return const * 2 / (eps * (1 + Ntilde) ** (eps / 2)) * math.sqrt(log_weight_integral(F, eps, fs.l))


# ---------------------------------------------------------------- corpus

CORPUS_KINDS = ("cell", "geom", "poly", "meanzero", "dense")


@dataclass
class CorpusItem:
    signal_id: str
    kind: str
    F: Spectrum


def default_horizon(fs: FrameSystem) -> tuple[int, int]:
    """Window ``(N_F, M_F)`` used by the report corpus."""
    P = fs.params
    return P.N + 1, 2 * P.M + 1


def make_corpus(p: int, NF: int, MF: int, seed: int, size: int) -> list[CorpusItem]:
    """Unit-norm test spectra cycling through :data:`CORPUS_KINDS`."""
    rng = np.random.default_rng(seed)
    n = p ** (NF + MF)
    lv = cell_levels(NF, MF, p)
    out = []
    for i in range(size):
        kind = CORPUS_KINDS[i % len(CORPUS_KINDS)]
        if kind == "cell":
            vals = np.zeros(n, dtype=complex)
            vals[int(rng.integers(1, n)) if n > 1 else 0] = np.exp(2j * np.pi * rng.random())
        else:
            z = rng.normal(size=n) + 1j * rng.normal(size=n)
            if kind in ("geom", "meanzero"):
                rate = rng.uniform(0.25, 1.5)
                vals = z * float(p) ** (-rate * (lv + NF))
            elif kind == "poly":
                power = rng.uniform(1.0, 3.0)
                vals = z / (1.0 + lv + NF) ** power
            else:
                vals = z
            if kind == "meanzero":
                vals[0] = 0
        F = Spectrum(p, NF, MF, vals)
        nrm = math.sqrt(float(np.sum(np.abs(F.values) ** 2) * F.cell_measure))
        out.append(CorpusItem(f"{kind}-{i:04d}", kind, F * (1 / nrm)))
    return out


@dataclass
class ReportRow:
    signal_id: str
    Ntilde: int
    R: float
    thm31: float
    power: dict = field(default_factory=dict)  # m -> bound
    log: dict = field(default_factory=dict)  # eps -> bound
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        bounds = [self.thm31, *self.power.values(), *self.log.values()]
        return all(dominates(self.R, b) for b in bounds)


def dominates(R: float, bound: float) -> bool:
    return R <= bound * (1 + 1e-12) + 1e-15


def default_ntilde_range(fs: FrameSystem) -> range:
    """``(N, M + l + 2]``, widened to at least one value above ``N``."""
    P = fs.params
    hi = max(P.M + fs.l + 2, P.N + 1)
    return range(P.N + 1, hi + 1)


def report_rows(item: CorpusItem, fs: FrameSystem, ntildes, m_values, eps_values) -> list[ReportRow]:
    F = item.F
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisViolated)
        for Nt in ntildes:
            row = ReportRow(item.signal_id, Nt, remainder_energy(F, fs, Nt), bound_thm31(F, fs, Nt))
            for m in m_values:
                row.power[m] = bound_sobolev_power(F, fs, Nt, m)
                row.extra[f"power_literal_m{m:g}"] = bound_sobolev_power(F, fs, Nt, m, literal=True)
                row.extra[f"weighted_power_m{m:g}"] = bound_weighted(F, fs, Nt, WeightSpec("power", m=m))
            for e in eps_values:
                row.log[e] = bound_log(F, fs, Nt, e)
                row.extra[f"log_literal_eps{e:g}"] = bound_log(F, fs, Nt, e, literal=True)
                row.extra[f"weighted_log_eps{e:g}"] = bound_weighted(F, fs, Nt, WeightSpec("log", eps=e))
            rows.append(row)
    return rows


def run_report(corpus, fs: FrameSystem, ntildes=None, m_values=(1, 2), eps_values=(0.5, 1.0), map_fn=map):
    """Rows for every corpus signal and every ``Ntilde``, sorted by (signal, Ntilde).

    ``map_fn`` lets a caller fan the per-signal work out to a pool.
    """
    ntildes = list(default_ntilde_range(fs) if ntildes is None else ntildes)
    chunks = map_fn(lambda item: report_rows(item, fs, ntildes, m_values, eps_values), corpus)
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r.signal_id, r.Ntilde))
    return rows
