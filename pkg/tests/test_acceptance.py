"""Acceptance suite: one test per criterion, summarized at the end of the run."""
import itertools
import os
import subprocess
import sys
import warnings

import numpy as np
import pytest

from padic_frames.approx import (
    bound_log,
    bound_sobolev_power,
    bound_thm31,
    default_horizon,
    dominates,
    make_corpus,
    run_report,
)
from padic_frames.errors import HypothesisViolated, Infeasible, NoTiling, ZeroSetRejected
from padic_frames.frame import build_frame, validate_frame_spec
from padic_frames.frame_ops import (
    lemma31_check,
    masked_spectrum,
    parseval_check,
    partial_reconstruct,
    partition_check,
    regions_in_window,
    remainder_energy,
)
from padic_frames.group import Params
from padic_frames.mask import (
    Classification,
    MaskTree,
    enumerate_zero_sets,
    leaf_products,
    q_matrix,
    random_zero_set,
    refinement_check,
    solve_constraints,
    solve_mask,
    synthesize_phi_hat,
)
from padic_frames.step import StepSignal, fourier, inverse_fourier, norm_sq

from conftest import fourier_oracle, random_spectrum, sample_frames


def grid():
    for p in (2, 3, 5):
        for J in range(-1, 4):
            for K in range(0, 4):
                if J + K >= 0 and p ** (J + K) <= 2187:
                    yield p, J, K


@pytest.mark.criterion(1, "transform roundtrip, Plancherel and pairing oracle")
def test_criterion_1_transforms():
    rng = np.random.default_rng(1)
    worst_rt = worst_pl = worst_or = 0.0
    for p, J, K in grid():
        n = p ** (J + K)
        check_oracle = n <= p**4
        for _ in range(50):
            f = StepSignal(p, J, K, rng.normal(size=n) + 1j * rng.normal(size=n))
            F = fourier(f)
            worst_rt = max(worst_rt, np.max(np.abs(inverse_fourier(F).values - f.values)))
            worst_pl = max(worst_pl, abs(norm_sq(F) - norm_sq(f)))
            if check_oracle:
                worst_or = max(worst_or, np.max(np.abs(F.values - fourier_oracle(f.values, p, J, K))))
                check_oracle = False  # one oracle comparison per grid point is enough
    assert worst_rt <= 1e-10 and worst_pl <= 1e-10 and worst_or <= 1e-12


def _trichotomy_check(tree, accepted):
    P = tree.params
    cls = None
    try:
        sol = solve_mask(tree)
    except ZeroSetRejected as exc:
        cls = exc.classification
    if len(tree.zeros) >= P.p ** (P.N + 1):
        assert cls == Classification.REJECTED
        with pytest.raises(Infeasible):
            solve_constraints(P, sorted(tree.zeros))
        return
    if cls is not None:
        return
    rows = q_matrix(P, [0] + sorted(tree.zeros)) @ sol.beta
    assert abs(rows[0] - 1) <= 1e-12 and np.max(np.abs(rows[1:]), initial=0) <= 1e-12
    if sol.classification == Classification.CASE1:
        others = [v for v in range(1, P.n_nodes) if v not in tree.zeros]
        assert np.all(np.abs(sol.lam[others]) > 1e-12)
    accepted.append(sol)


def _criterion2_masks():
    accepted = []
    for N, M in itertools.product((0, 1), (0, 1)):
        P = Params(2, N, M)
        nodes = range(1, P.n_nodes)
        for r in range(1, len(nodes) + 1):
            for zs in itertools.combinations(nodes, r):
                _trichotomy_check(MaskTree(P, frozenset(zs)), accepted)
    rng = np.random.default_rng(2)
    configs = [Params(3, N, M) for N, M in itertools.product((0, 1), (0, 1))]
    for k in range(200):
        P = configs[k % 4]
        if k % 2:
            size = int(rng.integers(1, P.n_nodes))
            zs = rng.choice(np.arange(1, P.n_nodes), size=size, replace=False).tolist()
            tree = MaskTree(P, frozenset(zs))
        else:
            tree = random_zero_set(P, rng, fill=bool(k % 4))
        _trichotomy_check(tree, accepted)
    return accepted


@pytest.fixture(scope="module")
def criterion2_masks():
    return _criterion2_masks()


@pytest.mark.criterion(2, "zero-set trichotomy")
def test_criterion_2_trichotomy(criterion2_masks):
    cls = {s.classification for s in criterion2_masks}
    assert cls == {Classification.CASE1, Classification.CASE2}


@pytest.mark.criterion(3, "refinable function validity")
def test_criterion_3_refinable(criterion2_masks):
    for sol in criterion2_masks:
        phi_hat = synthesize_phi_hat(sol)
        assert abs(phi_hat.values[0] - 1) <= 1e-12
        assert np.max(np.abs(leaf_products(sol))) <= 1e-12
        assert refinement_check(inverse_fourier(phi_hat), sol.beta, sol.params) <= 1e-10


def _full_checks(fs, rng, signals=20):
    assert validate_frame_spec(fs).ok
    assert partition_check(fs, 3, fs.params.M + 3).ok
    p, N, M = fs.params.p, fs.params.N, fs.params.M
    for _ in range(signals):
        F = random_spectrum(rng, p, N + 1, M + 2)
        assert all(lemma31_check(F, fs, j, n)[2] <= 1e-10 for j, n in regions_in_window(F, fs))
        assert parseval_check(F, fs).gap <= 1e-10


@pytest.mark.criterion(4, "Haar regression")
def test_criterion_4_haar():
    rng = np.random.default_rng(4)
    for p, zeros, beta in ((2, {1}, [0.5, 0.5]), (3, {1, 2}, [1 / 3] * 3)):
        sol = solve_mask(MaskTree(Params(p, 0, 0), frozenset(zeros)))
        assert np.allclose(sol.beta, beta, atol=1e-15, rtol=0)
        _full_checks(build_frame(sol, synthesize_phi_hat(sol)), rng)


def _criterion5_trees(p, N, M, rng):
    P = Params(p, N, M)
    if p == 2 and (N, M) != (2, 2):
        return list(enumerate_zero_sets(P, 10**5))
    trees = []
    for k in range(60):
        fill = bool(k % 4 < 2)
        try:
            trees.append(random_zero_set(P, rng, min_level=M + 1 if k % 2 == 0 else 1, fill=fill))
        except ValueError:
            trees.append(random_zero_set(P, rng, min_level=1, fill=fill))
    return trees


@pytest.mark.criterion(5, "frame validity and exact partition")
def test_criterion_5_frames():
    rng = np.random.default_rng(5)
    built = 0
    for p in (2, 3):
        for N, M in itertools.product(range(3), range(3)):
            for tree in _criterion5_trees(p, N, M, rng):
                sol = solve_mask(tree)
                try:
                    fs = build_frame(sol, synthesize_phi_hat(sol))
                except NoTiling:
                    continue
                rep = validate_frame_spec(fs)
                assert rep.ok, (tree, rep.failures)
                part = partition_check(fs, 3, M + 3)
                assert part.ok, (tree, part.as_dict())
                built += 1
    assert built > 1000


@pytest.fixture(scope="module")
def acceptance_frames():
    configs = [(2, 0, 0), (3, 0, 0), (2, 1, 0), (2, 1, 1), (3, 1, 0), (3, 1, 1), (2, 2, 0),
               (2, 2, 1), (2, 2, 2), (3, 2, 0), (3, 2, 1), (3, 2, 2)]
    return sample_frames(seed=6, per_config=2, configs=configs)


def _signals(fs, rng, count):
    p, N, M = fs.params.p, fs.params.N, fs.params.M
    NF, MF = N + 1, M + 2
    if p ** (NF + MF) > 2187:
        MF -= 1
    return [random_spectrum(rng, p, NF, MF) for _ in range(count)]


@pytest.mark.criterion(6, "coefficient energy identity on every region")
def test_criterion_6_region_energy(acceptance_frames):
    rng = np.random.default_rng(6)
    assert len(acceptance_frames) == 24
    worst = 0.0
    for fs in acceptance_frames:
        for F in _signals(fs, rng, 20):
            for j, n in regions_in_window(F, fs):
                worst = max(worst, lemma31_check(F, fs, j, n)[2])
    assert worst <= 1e-10


@pytest.mark.criterion(7, "tightness and partial reconstruction")
def test_criterion_7_tightness(acceptance_frames):
    rng = np.random.default_rng(7)
    worst_gap = worst_rec = 0.0
    for fs in acceptance_frames:
        for i, F in enumerate(_signals(fs, rng, 100)):
            worst_gap = max(worst_gap, parseval_check(F, fs).gap)
            if i < 5:
                for Nt in range(fs.params.N, fs.params.M + fs.l + 2):
                    a = partial_reconstruct(F, fs, Nt).values
                    b = masked_spectrum(F, fs, Nt).values
                    worst_rec = max(worst_rec, np.max(np.abs(a - b)))
    assert worst_gap <= 1e-10 and worst_rec <= 1e-9


def _ntildes(fs):
    P = fs.params
    return range(P.N + 1, max(P.M + fs.l + 2, P.N + 1) + 1)


@pytest.fixture(scope="module")
def corpus_rows(acceptance_frames):
    out = []
    for fs in acceptance_frames:
        NF, MF = default_horizon(fs)
        corpus = make_corpus(fs.params.p, NF, MF, 8, 100)
        out.append((fs, corpus, run_report(corpus, fs, _ntildes(fs))))
    return out


@pytest.mark.criterion(8, "remainder domination, monotone and vanishing")
def test_criterion_8_domination(corpus_rows):
    for fs, corpus, rows in corpus_rows:
        assert all(dominates(r.R, r.thm31) for r in rows)
        for item in corpus:
            Rs = [remainder_energy(item.F, fs, Nt) for Nt in range(fs.params.N, fs.params.M + fs.l + 3)]
            assert all(b <= a for a, b in zip(Rs, Rs[1:]))
            for Nt in range(fs.params.M + fs.l, fs.params.M + fs.l + 3):
                assert remainder_energy(item.F, fs, Nt) == 0.0


@pytest.mark.criterion(9, "power and log weight domination, power decay ratio")
def test_criterion_9_weighted(corpus_rows):
    for fs, corpus, rows in corpus_rows:
        for r in rows:
            assert all(dominates(r.R, r.power[m]) for m in (1, 2))
            assert all(dominates(r.R, r.log[e]) for e in (0.5, 1.0))
        p = fs.params.p
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HypothesisViolated)
            for item in corpus[:10]:
                for m in (1, 2):
                    b = [bound_sobolev_power(item.F, fs, Nt, m) for Nt in _ntildes(fs)]
                    for x, y in zip(b, b[1:]):
                        assert abs(y / x - float(p) ** (-m)) <= 1e-12 * float(p) ** (-m)
                assert bound_log(item.F, fs, _ntildes(fs)[0], 1.0) > 0
                assert bound_thm31(item.F, fs, _ntildes(fs)[0]) >= 0


def _pipeline(workdir):
    cmd = [sys.executable, "-m", "padic_frames.cli"]
    steps = [
        ["build", "-p", "3", "-N", "2", "-M", "1", "--zeros", "random:10", "--out", "mask.json"],
        ["frame", "mask.json", "--strategy", "exhaustive", "--out", "frame.json"],
        ["verify", "frame.json", "--out", "verify.json"],
        ["approx", "frame.json", "--csv", "report.csv", "--json", "report.json"],
    ]
    env = dict(os.environ, PADIC_FRAMES_THREADS="4")
    for s in steps:
        subprocess.run(cmd + s, cwd=workdir, env=env, check=True, capture_output=True)
    return {name: (workdir / name).read_bytes()
            for name in ("mask.json", "frame.json", "verify.json", "report.csv", "report.json")}


@pytest.mark.criterion(10, "byte-identical CLI reruns")
def test_criterion_10_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert _pipeline(a) == _pipeline(b)
