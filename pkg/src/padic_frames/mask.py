"""Refinable step functions from zero placements on the p-adic mask tree.

Node ``m`` of the tree holds the mask value ``lambda_m`` on the dual coset
with digits ``m = alpha_{-N} + alpha_{-N+1} p + ... + alpha_M p^(M+N)``.
Its parent is ``m // p`` and the root ``0`` carries ``lambda_0 = 1``.  Leaves
are the ids in ``[p^(M+N), p^(M+N+1))``; they index the outer ring
``G_{M+1}^perp \\ G_M^perp`` where the scaling spectrum has to vanish.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import Infeasible, LeafNotAnnihilated, SingularSystem, ZeroSetRejected
from .fft import fft_dif
from .group import TAU_EQ, TAU_ZERO, Params, digit_reverse_array, rademacher_pair, to_digits
from .step import Spectrum, StepSignal, evaluate


class Classification(str, enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    REJECTED = "Rejected"
    NOT_COVERING = "NotCovering"


SOLVABLE = (Classification.CASE1, Classification.CASE2)


def node_level(m: int, p: int) -> int:
    """Number of base-p digits of ``m`` (the root has level 0)."""
    level = 0
    while m:
        m //= p
        level += 1
    return level


@dataclass(frozen=True)
class MaskTree:
    params: Params
    zeros: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        zs = frozenset(int(z) for z in self.zeros)
        bad = [z for z in zs if not 1 <= z < self.params.n_nodes]
        if bad:
            raise ValueError(f"node ids out of range [1, {self.params.n_nodes}): {sorted(bad)}")
        object.__setattr__(self, "zeros", zs)

    @property
    def leaves(self) -> range:
        P = self.params
        return range(P.p**P.height, P.n_nodes)

    def path(self, m: int) -> list[int]:
        """Nodes from ``m`` up to (excluding) the root."""
        out = []
        while m:
            out.append(m)
            m //= self.params.p
        return out

    def uncovered_leaves(self) -> list[int]:
        return [leaf for leaf in self.leaves if not any(n in self.zeros for n in self.path(leaf))]


def validate_zero_set(tree: MaskTree) -> Classification:
    """Classify a zero placement by the cardinality trichotomy and path cover.

    The cardinality test runs first, so an oversized set is reported as
    ``REJECTED`` even when it also fails to cover every path.
    """
    count = len(tree.zeros)
    budget = tree.params.n_beta
    if count >= budget:
        return Classification.REJECTED
    if tree.uncovered_leaves():
        return Classification.NOT_COVERING
    if count == budget - 1:
        return Classification.CASE1
    return Classification.CASE2


def q_matrix(params: Params, nodes) -> np.ndarray:
    """Rows ``q_m^n = exp(-2 pi i rev(m) n / p^(M+N+1))`` of the mask system."""
    P = params
    L = P.M + P.N + 1
    rev = digit_reverse_array(L, P.p)[np.asarray(nodes, dtype=np.int64)]
    n = np.arange(P.n_beta, dtype=np.int64)
    expo = np.mod(np.outer(rev, n), P.n_nodes)
    return np.exp(-2j * np.pi * expo / P.n_nodes)


def mask_values(beta: np.ndarray, params: Params) -> np.ndarray:
    """All ``lambda_m`` at once: a zero-padded DFT read in digit-reversed order."""
    padded = np.zeros(params.n_nodes, dtype=complex)
    padded[: params.n_beta] = beta
    return fft_dif(padded, params.p)


def mask_values_oracle(beta: np.ndarray, params: Params) -> np.ndarray:
    """``lambda_m`` by the literal product of Rademacher factors.

    Multiplies ``(r_k, g_v)^(alpha_k a_{v-1})`` factor by factor with no
    digit-reversal shortcut.
    """
    p, N, M = params.p, params.N, params.M
    L = M + N + 1
    out = np.zeros(params.n_nodes, dtype=complex)
    for m in range(params.n_nodes):
        alpha = to_digits(m, L, p)  # alpha[i] is the digit at level i - N
        total = 0j
        for n in range(params.n_beta):
            if beta[n] == 0:
                continue
            a = to_digits(n, N + 1, p)  # a[i] = a_{-N-1+i}
            phase = 1 + 0j
            for v in range(-N, 1):
                b = a[v + N]  # digit of A^{-1} h at level v is a_{v-1}
                if not b:
                    continue
                for k in range(-N, M + 1):
                    ak = alpha[k + N]
                    if ak and k - v + 1 >= 1:
                        phase *= rademacher_pair(k, v, p) ** (ak * b)
            total += beta[n] * np.conj(phase)
        out[m] = total
    return out


@dataclass
class MaskSolution:
    params: Params
    zeros: frozenset
    beta: np.ndarray
    lam: np.ndarray
    classification: Classification
    pins: dict = field(default_factory=dict)
    lam_raw: np.ndarray | None = None  # before zero nodes are snapped

    @property
    def determined(self) -> str:
        return "ExactlyDetermined" if self.classification == Classification.CASE1 else "Underdetermined"


def solve_constraints(params: Params, zeros, pins=None) -> np.ndarray:
    """Solve ``sum beta = 1``, ``lambda_v = 0`` on ``zeros``, ``lambda_v = c`` on pins.

    Square systems go through LU with partial pivoting, the rest through the
    minimum-norm least-squares solution.  Raises :class:`Infeasible` when the
    residual exceeds the zero-detection threshold.
    """
    pins = dict(pins or {})
    nodes = [0] + sorted(set(zeros)) + sorted(pins)
    rhs = np.zeros(len(nodes), dtype=complex)
    rhs[0] = 1
    for i, v in enumerate(sorted(pins)):
        rhs[1 + len(set(zeros)) + i] = pins[v]
    A = q_matrix(params, nodes)
    if A.shape[0] == A.shape[1]:
        try:
            beta = np.linalg.solve(A, rhs)
            for _ in range(2):  # iterative refinement
                beta = beta + np.linalg.solve(A, rhs - A @ beta)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
    else:
        beta = np.linalg.lstsq(A, rhs, rcond=None)[0]
    resid = np.max(np.abs(A @ beta - rhs))
    # entries of A are unimodular, so |A beta| <= ||beta||_1 sets the scale
    tol = TAU_ZERO * max(1.0, float(np.sum(np.abs(beta))))
    if not np.isfinite(resid) or resid > tol:
        raise Infeasible(f"constraint residual {resid:.3e} exceeds {tol:.3e}")
    return beta


def solve_mask(tree: MaskTree, pins=None) -> MaskSolution:
    cls = validate_zero_set(tree)
    if cls not in SOLVABLE:
        raise ZeroSetRejected(_rejection_message(tree, cls), cls)
    pins = {int(k): complex(v) for k, v in (pins or {}).items()}
    clash = set(pins) & (tree.zeros | {0})
    if clash:
        raise ValueError(f"cannot pin the root or a zero node: {sorted(clash)}")
    beta = solve_constraints(tree.params, tree.zeros, pins)
    raw = mask_values(beta, tree.params)
    # Zero rows hold exactly in exact arithmetic and were checked to tau_zero;
    # snapping keeps path products from amplifying round-off by large lambdas.
    lam = raw.copy()
    lam[sorted(tree.zeros)] = 0
    return MaskSolution(tree.params, tree.zeros, beta, lam, cls, pins, raw)


def _rejection_message(tree: MaskTree, cls: Classification) -> str:
    P = tree.params
    if cls == Classification.REJECTED:
        return (
            f"#zeros = {len(tree.zeros)} >= p^(N+1) = {P.n_beta}: "
            "too many zeros, they cannot define the mask of a refinable function"
        )
    unc = tree.uncovered_leaves()
    shown = ", ".join("->".join(map(str, tree.path(leaf))) for leaf in unc[:8])
    more = f" (+{len(unc) - 8} more)" if len(unc) > 8 else ""
    return f"{len(unc)} leaf path(s) carry no zero: {shown}{more}"


def _path_products(lam: np.ndarray, ids: np.ndarray, p: int) -> np.ndarray:
    prod = np.ones(ids.shape, dtype=complex)
    cur = ids.copy()
    while np.any(cur > 0):
        prod *= np.where(cur > 0, lam[cur], 1)
        cur //= p
    return prod * lam[0]


def leaf_products(sol: MaskSolution) -> np.ndarray:
    P = sol.params
    leaves = np.arange(P.p**P.height, P.n_nodes, dtype=np.int64)
    return _path_products(sol.lam, leaves, P.p)


def synthesize_phi_hat(sol: MaskSolution) -> Spectrum:
    """``phi^ = m0(chi) m0(chi A^-1) ... m0(chi A^-(N+M))`` on the cells of G_M^perp."""
    P = sol.params
    ids = np.arange(P.n_cells, dtype=np.int64)
    vals = _path_products(sol.lam, ids, P.p)
    if abs(vals[0] - 1) > TAU_EQ:
        raise LeafNotAnnihilated(f"phi^ at the identity is {vals[0]}, expected 1")
    leaves = leaf_products(sol)
    worst = int(np.argmax(np.abs(leaves)))
    if abs(leaves[worst]) > TAU_ZERO:
        raise LeafNotAnnihilated(
            f"leaf {P.p**P.height + worst} has product {abs(leaves[worst]):.3e} > {TAU_ZERO:g}"
        )
    return Spectrum(P.p, P.N, P.M, vals)


def refinement_check(phi: StepSignal, beta: np.ndarray, params: Params) -> float:
    """Max of ``|phi(x) - p sum_h beta_h phi(A x - h)|`` over a common refinement.

    Points are evaluated directly from their rational representation, so this
    does not reuse the translation or dilation code paths.
    """
    p, N, M = params.p, params.N, params.M
    worst = 0.0
    for w in range(p ** (N + M + 1)):
        lhs = evaluate(phi, w, N)
        # A x - h = (w - n) / p^(N+1) for h with shift index n
        rhs = p * sum(beta[n] * evaluate(phi, w - n, N + 1) for n in range(params.n_beta))
        worst = max(worst, abs(lhs - rhs))
    return worst


@dataclass(frozen=True)
class MRAStatus:
    generates_mra: bool
    orthogonal: bool


def check_mra_conditions(phi_hat: Spectrum) -> MRAStatus:
    vals = phi_hat.values
    gen = bool(abs(vals[0] - 1) <= TAU_EQ and np.max(np.abs(vals)) <= 1 + TAU_EQ)
    # cells of G_0^perp are the indices below p^N
    inside = np.arange(vals.size) < phi_hat.p**phi_hat.N
    orth = bool(np.all(np.abs(np.abs(vals) - inside) <= TAU_EQ))
    return MRAStatus(gen, orth)


def enumerate_zero_sets(params: Params, max_count: int, classification=None):
    """Covering zero sets with at most ``p^(N+1) - 1`` nodes, in lexicographic order.

    Yields :class:`MaskTree` objects, depth-first, stopping after
    ``max_count`` emissions.  ``classification`` optionally keeps only one of
    ``CASE1`` / ``CASE2``.
    """
    if max_count < 1:
        raise ValueError("max_count must be >= 1")
    p = params.p
    L = params.M + params.N + 1
    budget = params.n_beta - 1
    first_leaf = p ** (L - 1)
    n_leaves = params.n_nodes - first_leaf
    cover = np.zeros(n_leaves, dtype=np.int64)
    levels = [node_level(m, p) for m in range(params.n_nodes)]
    emitted = 0
    chosen: list[int] = []

    def span(m):
        d = L - levels[m]
        lo = m * p**d - first_leaf
        return lo, lo + p**d

    def dfs(last):
        nonlocal emitted
        if emitted >= max_count:
            return
        uncovered = np.flatnonzero(cover == 0)
        if chosen and uncovered.size == 0:
            cls = Classification.CASE1 if len(chosen) == budget else Classification.CASE2
            if classification is None or classification == cls:
                emitted += 1
                yield MaskTree(params, frozenset(chosen))
        if len(chosen) >= budget:
            return
        if uncovered.size:
            # the first uncovered leaf is the largest id on its own path
            if uncovered[0] + first_leaf <= last:
                return
            nxt = last + 1
            if nxt >= params.n_nodes:
                return
            reach = p ** (L - levels[nxt])
            if -(-uncovered.size // reach) > budget - len(chosen):
                return
        for m in range(last + 1, params.n_nodes):
            lo, hi = span(m)
            cover[lo:hi] += 1
            chosen.append(m)
            yield from dfs(m)
            chosen.pop()
            cover[lo:hi] -= 1
            if emitted >= max_count:
                return

    yield from dfs(0)


def brute_force_zero_sets(params: Params) -> list[frozenset]:
    """Every covering set within budget, by plain subset scan (test oracle)."""
    out = []
    nodes = range(1, params.n_nodes)
    for r in range(1, params.n_beta):
        for combo in itertools.combinations(nodes, r):
            tree = MaskTree(params, frozenset(combo))
            if not tree.uncovered_leaves():
                out.append(frozenset(combo))
    return out


def random_zero_set(params: Params, rng: np.random.Generator, min_level: int = 1, fill: bool = False,
                    attempts: int = 200) -> MaskTree:
    """A random covering zero set with at most ``p^(N+1) - 1`` nodes.

    Zeros are drawn on random ancestors (at tree level ``>= min_level``) of
    uncovered leaves.  With ``fill`` the set is padded with extra random nodes
    up to exactly ``p^(N+1) - 1`` (Case 1).
    """
    p = params.p
    L = params.M + params.N + 1
    budget = params.n_beta - 1
    first_leaf = p ** (L - 1)
    for attempt in range(attempts):
        # shallower zeros cover more leaves; tighten the depth after failures
        hi = max(min_level, L - attempt * (L - min_level + 1) // attempts)
        zeros: set[int] = set()
        tree_leaves = list(range(first_leaf, params.n_nodes))
        uncovered = set(tree_leaves)
        while uncovered and len(zeros) <= budget:
            leaf = sorted(uncovered)[int(rng.integers(len(uncovered)))]
            level = int(rng.integers(min_level, hi + 1))
            node = leaf // p ** (L - level)
            zeros.add(node)
            d = L - level
            uncovered -= set(range(node * p**d, (node + 1) * p**d))
        if uncovered or len(zeros) > budget:
            continue
        if fill:
            pool = [m for m in range(max(1, p ** (min_level - 1)), params.n_nodes) if m not in zeros]
            rng.shuffle(pool)
            zeros.update(pool[: budget - len(zeros)])
        return MaskTree(params, frozenset(zeros))
    raise ValueError(f"no covering zero set found within budget for {params}")
