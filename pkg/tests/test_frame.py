import itertools

import numpy as np
import pytest

from padic_frames.errors import BudgetExceeded, DivisionByZeroCell, NoTiling
from padic_frames.exact_cover import exact_cover
from padic_frames.frame import (
    FrameSystem,
    build_frame,
    build_wavelet_masks,
    candidates,
    forbidden_cells,
    node_of,
    search_tiling,
    validate_frame_spec,
)
from padic_frames.group import CharCoset, Params
from padic_frames.mask import MaskTree, random_zero_set, solve_mask, synthesize_phi_hat
from padic_frames.step import Spectrum



def test_exact_cover_small():
    subsets = [{1, 2}, {3}, {2, 3}, {1}, {1, 2, 3}]
    sol = exact_cover([1, 2, 3], subsets)
    assert sorted(e for i in sol for e in subsets[i]) == [1, 2, 3]
    assert exact_cover([1, 2, 3], [{1, 2}, {2, 3}]) is None
    assert exact_cover([], [{1}]) == []
    # subsets touching elements outside the universe are ignored
    assert exact_cover([1], [{1, 9}, {1}]) == [1]


def test_exact_cover_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(30):
        U = list(range(6))
        subsets = [set(rng.choice(6, size=rng.integers(1, 4), replace=False).tolist()) for _ in range(7)]
        found = exact_cover(U, subsets)
        brute = any(
            sorted(e for i in combo for e in subsets[i]) == U
            for r in range(1, 7) for combo in itertools.combinations(range(7), r)
        )
        assert (found is not None) == brute
        if found is not None:
            assert sorted(e for i in found for e in subsets[i]) == U


def test_exact_cover_budget():
    # an odd universe has no cover by pairs, the search has to visit many nodes
    pairs = [set(c) for c in itertools.combinations(range(7), 2)]
    with pytest.raises(BudgetExceeded):
        exact_cover(range(7), pairs, budget=5)
    assert exact_cover(range(7), pairs, budget=10**5) is None


def test_haar_families(haar2, haar3):
    assert haar2.q == 1 and haar2.l == 0
    w = haar2.wavelets[0]
    assert w.E == CharCoset(0, (1,), 2) and w.t == 0
    assert np.allclose(w.mask_cells, [0, 1])
    assert np.allclose(w.psi_hat.values, [0, 1])
    assert validate_frame_spec(haar2).ok
    assert sorted(w.E.digits for w in haar3.wavelets) == [(1,), (2,)]
    assert validate_frame_spec(haar3).ok


def test_forbidden_cells_sibling_blocks():
    # one zero at node 2 (level 2) of p=2, N=1, M=0
    fs_phi = synthesize_phi_hat(solve_mask(MaskTree(Params(2, 1, 0), frozenset({2, 3}))))
    forb = forbidden_cells(fs_phi)
    # zero cells of phi^ on level-2 leaves, lifted by one digit: blocks of p siblings
    assert len(forb) % 2 == 0
    for a, b in zip(forb[::2], forb[1::2]):
        assert b == a + 1 and a % 2 == 0


@pytest.mark.parametrize("p,N,M", [(2, 1, 0), (2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 2, 2)])
def test_greedy_and_exhaustive_agree_on_validity(p, N, M):
    P = Params(p, N, M)
    rng = np.random.default_rng(p * 100 + N * 10 + M)
    built = 0
    for k in range(30):
        sol = solve_mask(random_zero_set(P, rng, min_level=M + 1, fill=bool(k % 2)))
        phi = synthesize_phi_hat(sol)
        try:
            e = build_frame(sol, phi, "exhaustive")
        except NoTiling:
            # greedy success would exhibit a tiling
            with pytest.raises(NoTiling):
                build_frame(sol, phi, "greedy")
            continue
        assert validate_frame_spec(e).ok, validate_frame_spec(e).failures
        try:
            g = build_frame(sol, phi, "greedy")
        except NoTiling:
            continue
        assert validate_frame_spec(g).ok, validate_frame_spec(g).failures
        built += 1
    assert built > 0


def test_candidate_order_and_nodes():
    phi = synthesize_phi_hat(solve_mask(MaskTree(Params(2, 1, 1), frozenset({2, 6, 7}))))
    cands = candidates(phi)
    keys = [c.key for c in cands]
    assert keys == sorted(keys)
    for c in cands:
        assert node_of(c.E) == c.node
        assert c.E.leading_level == 1 - c.t


def test_duplicate_coset_fails_disjointness(haar3):
    w = haar3.wavelets[0]
    bad = FrameSystem(haar3.params, haar3.mask, haar3.phi_hat, haar3.wavelets + [w])
    checks = {c for c, _ in validate_frame_spec(bad).failures}
    assert {"disjoint_E", "disjoint_dilates"} <= checks


def test_missing_wavelet_fails_partition(haar3):
    bad = FrameSystem(haar3.params, haar3.mask, haar3.phi_hat, haar3.wavelets[:1])
    rep = validate_frame_spec(bad)
    assert not rep.ok and rep.failures[0][0] == "partition_incomplete"
    assert rep.as_dict()["ok"] is False


def test_wrong_mask_fails_indicator(haar2):
    w = haar2.wavelets[0]
    broken = type(w)(w.E, w.t, 2 * w.mask_cells, w.psi_hat)
    rep = validate_frame_spec(FrameSystem(haar2.params, haar2.mask, haar2.phi_hat, [broken]))
    assert [c for c, _ in rep.failures] == ["psi_indicator"]


def test_shallow_zero_has_no_tiling():
    sol = solve_mask(MaskTree(Params(2, 1, 1), frozenset({1})))
    phi = synthesize_phi_hat(sol)
    for strategy in ("greedy", "exhaustive"):
        with pytest.raises(NoTiling) as info:
            search_tiling(phi, strategy)
        assert info.value.forbidden


def test_division_by_zero_cell():
    phi = Spectrum(2, 0, 0, [0.0])
    with pytest.raises(DivisionByZeroCell):
        build_wavelet_masks(phi, [(CharCoset(0, (1,), 2), 0)])


def test_unknown_strategy(haar2):
    with pytest.raises(ValueError):
        search_tiling(haar2.phi_hat, "random")


def test_random_frames_validate(frames):
    assert len(frames) >= 10
    for fs in frames:
        rep = validate_frame_spec(fs)
        assert rep.ok, rep.failures
        assert 0 <= fs.l <= fs.params.N


def test_masks_are_reciprocals(frames):
    for fs in frames:
        p = fs.params.p
        for w in fs.wavelets:
            nz = np.flatnonzero(w.mask_cells)
            assert np.allclose(w.mask_cells[nz] * fs.phi_hat.values[nz // p], 1)
