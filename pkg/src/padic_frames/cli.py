"""Command-line driver: build -> frame -> verify -> approx.

Exit codes: 0 success, 1 failed check or bound violation, 2 rejected input
(bad zero set, no tiling), 3 I/O error, 4 invalid configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import approx, frame, frame_ops, io as docs, mask
from .errors import BudgetExceeded, Infeasible, InvalidParams, NoTiling, ZeroSetRejected
from .group import Params

EXIT_OK, EXIT_FAIL, EXIT_REJECTED, EXIT_IO, EXIT_CONFIG = 0, 1, 2, 3, 4


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _threads() -> int:
    raw = os.environ.get("PADIC_FRAMES_THREADS", "0")
    try:
        return max(0, int(raw))
    except ValueError:
        raise ConfigError(f"PADIC_FRAMES_THREADS must be an integer, got {raw!r}")


def _mapper():
    n = _threads()
    if n <= 1:
        return map, None
    pool = ThreadPoolExecutor(max_workers=n)
    return pool.map, pool


def _write(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _read_json(path: str) -> dict:
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})")


def _params(args) -> Params:
    try:
        return Params(args.p, args.N, args.M)
    except (InvalidParams, ValueError) as exc:
        raise ConfigError(str(exc))


def _parse_pins(items) -> dict:
    pins = {}
    for item in items or []:
        try:
            node, value = item.split("=")
            pins[int(node)] = complex(value.replace(" ", "").replace("i", "j"))
        except ValueError:
            raise ConfigError(f"bad --pin {item!r}; expected NODE=COMPLEX, e.g. 5=0.5+0.1j")
    return pins


def _zero_sets(spec: str, P: Params):
    """Expand ``--zeros`` into (suffix, MaskTree) pairs."""
    spec = spec.strip()
    if spec.startswith("enumerate:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad --zeros {spec!r}")
        if k < 1:
            raise ConfigError("enumerate:<k> needs k >= 1")
        return [(f"-{i:03d}", t) for i, t in enumerate(mask.enumerate_zero_sets(P, k))]
    if spec.startswith("random:"):
        try:
            seed = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad --zeros {spec!r}")
        rng = np.random.default_rng(seed)
        try:
            tree = mask.random_zero_set(P, rng, min_level=P.M + 1, fill=True)
        except ValueError:
            tree = mask.random_zero_set(P, rng, min_level=1, fill=True)
        return [("", tree)]
    try:
        zeros = [int(z) for z in spec.replace(" ", "").split(",") if z]
    except ValueError:
        raise ConfigError(f"bad --zeros {spec!r}; expected a list like 1,2 or enumerate:k or random:seed")
    try:
        return [("", mask.MaskTree(P, frozenset(zeros)))]
    except ValueError as exc:
        raise ConfigError(str(exc))


def _suffixed(path: str, suffix: str) -> str:
    if not suffix:
        return path
    p = Path(path)
    return str(p.with_name(p.stem + suffix + p.suffix))


def cmd_build(args) -> int:
    P = _params(args)
    pins = _parse_pins(args.pin)
    trees = _zero_sets(args.zeros, P)
    status = EXIT_OK
    for suffix, tree in trees:
        try:
            sol = mask.solve_mask(tree, pins)
            phi = mask.synthesize_phi_hat(sol)
        except ZeroSetRejected as exc:
            print(f"rejected ({exc.classification.value}): {exc}", file=sys.stderr)
            status = EXIT_REJECTED
            continue
        except Infeasible as exc:
            print(f"infeasible: {exc}", file=sys.stderr)
            status = EXIT_REJECTED
            continue
        out = _suffixed(args.out, suffix)
        _write(out, docs.dumps(docs.mask_document(sol, phi)))
        print(f"{out}: {sol.classification.value} zeros={sorted(sol.zeros)}")
    return status


def cmd_frame(args) -> int:
    doc = _read_json(args.mask)
    try:
        sol, phi = docs.load_mask(doc)
    except docs.DocumentError as exc:
        raise ConfigError(str(exc))
    try:
        fs = frame.build_frame(sol, phi, args.strategy, args.budget)
    except NoTiling as exc:
        print(f"no tiling: {exc}", file=sys.stderr)
        print(json.dumps({"forbidden": exc.forbidden}), file=sys.stderr)
        return EXIT_REJECTED
    except BudgetExceeded as exc:
        print(f"search budget exhausted: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    _write(args.out, docs.dumps(docs.frame_document(fs, doc)))
    print(f"{args.out}: q={fs.q} l={fs.l}")
    return EXIT_OK


def _load_frame(path: str):
    try:
        return docs.load_frame(_read_json(path))
    except docs.DocumentError as exc:
        raise ConfigError(str(exc))


def _corpus(fs, seed, size):
    NF, MF = approx.default_horizon(fs)
    return approx.make_corpus(fs.params.p, NF, MF, seed, size)


def _verify_signal(item, fs, lemma):
    F = item.F
    lem = 0.0
    if lemma:
        lem = max((frame_ops.lemma31_check(F, fs, j, n)[2] for j, n in frame_ops.regions_in_window(F, fs)),
                  default=0.0)
    pv = frame_ops.parseval_check(F, fs)
    return item.signal_id, lem, pv


def cmd_verify(args) -> int:
    fs = _load_frame(args.frame)
    P = fs.params
    spec = frame.validate_frame_spec(fs)
    part = frame_ops.partition_check(fs, args.V, args.W if args.W is not None else P.M + 3)
    corpus = _corpus(fs, args.seed, args.corpus_size)
    n_lemma = min(args.lemma_signals, len(corpus))
    mapper, pool = _mapper()
    try:
        results = list(mapper(lambda ix: _verify_signal(ix[1], fs, ix[0] < n_lemma), enumerate(corpus)))
    finally:
        if pool:
            pool.shutdown()
    results.sort(key=lambda r: r[0])
    lemma_gap = max((r[1] for r in results), default=0.0)
    parseval_gap = max((r[2].gap for r in results), default=0.0)
    checks = [
        {"check": "frame_spec", "ok": bool(spec.ok), "failures": spec.as_dict()["failures"]},
        {"check": "partition", **part.as_dict()},
        {"check": "lemma31", "ok": bool(lemma_gap <= 1e-10), "signals": n_lemma, "max_gap": float(lemma_gap)},
        {"check": "parseval", "ok": bool(parseval_gap <= 1e-10), "signals": len(results),
         "max_gap": float(parseval_gap)},
    ]
    ok = all(c["ok"] for c in checks)
    report = {"frame": args.frame, "seed": args.seed, "corpus_size": args.corpus_size, "ok": ok, "checks": checks}
    _write(args.out, docs.dumps(report))
    for c in checks:
        print(f"{c['check']}: {'pass' if c['ok'] else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_approx(args) -> int:
    fs = _load_frame(args.frame)
    if not args.force:
        spec = frame.validate_frame_spec(fs)
        part = frame_ops.partition_check(fs, 3, fs.params.M + 3)
        if not (spec.ok and part.ok):
            print("frame failed validation; rerun with --force to report anyway", file=sys.stderr)
            return EXIT_FAIL
    m_values = args.m or [1, 2]
    eps_values = args.eps or [0.5, 1.0]
    if any(m < 1 for m in m_values) or any(e <= 0 for e in eps_values):
        raise ConfigError("--m needs values >= 1 and --eps values > 0")
    if args.ntilde:
        lo, hi = args.ntilde
        ntildes = range(lo, hi + 1)
    else:
        ntildes = approx.default_ntilde_range(fs)
    corpus = _corpus(fs, args.seed, args.corpus_size)
    mapper, pool = _mapper()
    try:
        rows = approx.run_report(corpus, fs, ntildes, m_values, eps_values, map_fn=mapper)
    finally:
        if pool:
            pool.shutdown()

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["signal_id", "Ntilde", "R_measured", "bound_thm31"]
                    + [f"bound_power_m{m:g}" for m in m_values]
                    + [f"bound_log_eps{e:g}" for e in eps_values] + ["pass"])
    for r in rows:
        writer.writerow([r.signal_id, r.Ntilde, _fmt(r.R), _fmt(r.thm31)]
                        + [_fmt(r.power[m]) for m in m_values]
                        + [_fmt(r.log[e]) for e in eps_values] + ["true" if r.passed else "false"])
    _write(args.csv, buf.getvalue())
    mirror = {
        "frame": args.frame,
        "seed": args.seed,
        "corpus_size": args.corpus_size,
        "p": fs.params.p, "N": fs.params.N, "M": fs.params.M, "l": fs.l,
        "rows": [
            {
                "signal_id": r.signal_id, "Ntilde": r.Ntilde, "R_measured": r.R, "bound_thm31": r.thm31,
                **{f"bound_power_m{m:g}": r.power[m] for m in m_values},
                **{f"bound_log_eps{e:g}": r.log[e] for e in eps_values},
                **{k: r.extra[k] for k in sorted(r.extra)},
                "pass": r.passed,
            }
            for r in rows
        ],
    }
    _write(args.json, docs.dumps(mirror))
    failed = sum(not r.passed for r in rows)
    print(f"{len(rows)} rows, {failed} violations")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_enumerate(args) -> int:
    P = _params(args)
    cls = mask.Classification(args.filter) if args.filter else None
    lines = [json.dumps(sorted(t.zeros)) for t in mask.enumerate_zero_sets(P, args.max_count, cls)]
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _number(s):
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="padic-frames", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add_params(sp):
        sp.add_argument("-p", type=int, required=True)
        sp.add_argument("-N", type=int, required=True)
        sp.add_argument("-M", type=int, required=True)

    b = sub.add_parser("build", help="solve a mask from a zero placement")
    add_params(b)
    b.add_argument("--zeros", required=True, help="1,2,... | enumerate:<k> | random:<seed>")
    b.add_argument("--pin", action="append", help="NODE=VALUE extra constraint lambda_NODE = VALUE")
    b.add_argument("--out", default="mask.json")
    b.set_defaults(fn=cmd_build)

    f = sub.add_parser("frame", help="search a coset tiling and build wavelets")
    f.add_argument("mask")
    f.add_argument("--strategy", choices=["greedy", "exhaustive"], default="greedy")
    f.add_argument("--budget", type=lambda s: int(float(s)), default=None)
    f.add_argument("--out", default="frame.json")
    f.set_defaults(fn=cmd_frame)

    v = sub.add_parser("verify", help="partition, coefficient-energy and Parseval checks")
    v.add_argument("frame")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--corpus-size", type=int, default=100)
    v.add_argument("--lemma-signals", type=int, default=20)
    v.add_argument("-V", dest="V", type=int, default=3)
    v.add_argument("-W", dest="W", type=int, default=None)
    v.add_argument("--out", default="verify.json")
    v.set_defaults(fn=cmd_verify)

    a = sub.add_parser("approx", help="remainder bounds over a seeded corpus")
    a.add_argument("frame")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--corpus-size", type=int, default=25)
    a.add_argument("--m", type=_number, action="append")
    a.add_argument("--eps", type=_number, action="append")
    a.add_argument("--ntilde", type=int, nargs=2, metavar=("LO", "HI"))
    a.add_argument("--csv", default="report.csv")
    a.add_argument("--json", default="report.json")
    a.add_argument("--force", action="store_true")
    a.set_defaults(fn=cmd_approx)

    e = sub.add_parser("enumerate-trees", help="list covering zero sets in lexicographic order")
    add_params(e)
    e.add_argument("--max-count", type=int, default=100)
    e.add_argument("--filter", choices=[c.value for c in mask.SOLVABLE])
    e.add_argument("--out")
    e.set_defaults(fn=cmd_enumerate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
