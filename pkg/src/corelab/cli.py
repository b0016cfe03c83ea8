"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 acceptance-threshold failure (so CI
can gate on experiment verdicts). Environment overrides: CORELAB_RESULTS for
the output directory, CORELAB_THREADS for worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import graphs, harness, samplers, structure, theory
from .anticonc import SliceSpec, slice_atom_mc, slice_atom_spectrum, quad_slice_atom
from .linalg import BitMatrix, ModMatrix, rank_gf2, rank_mod_p, rational_rank
from .rng import RngStream


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, default=_jsonable))


def _cmd_sample(args) -> int:
    rng = RngStream(args.seed, args.stream)
    if args.model == "gnp":
        p = args.p if args.p is not None else args.lam / args.n
        G = samplers.gnp(args.n, p, rng)
    elif args.model == "gnm":
        G = samplers.gnm(args.n, args.m, rng)
    elif args.model == "config":
        d = [int(x) for x in args.degrees.split(",")]
        G = samplers.uniform_graph_with_degrees(d, rng)
    elif args.model == "core":
        G, _, _ = samplers.sample_core(args.n, args.lam, args.k, rng)
    else:
        raise ValueError(args.model)
    out = args.out or "/dev/stdout"
    graphs.write_edgelist(G, out)
    return 0


def _cmd_kcore(args) -> int:
    G = graphs.read_edgelist(args.input)
    U, H = graphs.k_core(G, args.k)
    graphs.write_edgelist(H, args.out or "/dev/stdout")
    if args.ids:
        with open(args.ids, "w", newline="\n") as f:
            for new, old in enumerate(U):
                f.write(f"{new} {old}\n")
    return 0


def _cmd_rank(args) -> int:
    G = graphs.read_edgelist(args.input)
    if args.field == "gf2":
        r = rank_gf2(BitMatrix.from_graph(G))
        _emit({"rank": r, "corank": G.n - r, "method": "gf2", "primes": [2],
               "certainty": "gf2-exact", "shape": [G.n, G.n]})
        return 0
    adj = G.adjacency_dense()
    if args.field == "modp":
        r = rank_mod_p(ModMatrix(adj, args.p))
        _emit({"rank": r, "corank": G.n - r, "method": "mod-p", "primes": [args.p],
               "certainty": "exact" if r == G.n else "lower-bound", "shape": [G.n, G.n]})
        return 0
    cert = rational_rank(adj, args.primes, RngStream(args.seed).generator, args.prime_bits)
    print(cert.to_json())
    return 0


def _cmd_theory(args) -> int:
    rep = theory.functional_bound_report(args.k, args.alpha, args.c, args.Delta)
    tp = theory.TruncPoisson(args.k, rep.lam)
    law = theory.removal_law(tp, args.alpha, args.Delta, args.c)
    mu = theory.bulk_distribution(law)
    tmax = min(args.k + 12, law.delta.size)
    _emit({
        "k": args.k, "c": args.c, "alpha": args.alpha, "Delta": args.Delta,
        "lambda": rep.lam, "beta": rep.beta, "gamma": rep.gamma,
        "rho": [tp.pmf(t) for t in range(tmax)],
        "delta": law.delta[:tmax].tolist(),
        "delta_prime": law.delta_prime[:tmax].tolist(),
        "mu": mu.pmf[:tmax].tolist(),
        "max_m_bulk": rep.sup_m_bulk, "argmax_m_bulk": rep.argmax_m_bulk,
        "sup_m_diff": rep.sup_m_diff,
        "bound_sixteenth_ok": rep.bound_ok,
        "transfer_thirtysecond_ok": rep.transfer_ok,
        "logconc_ok": rep.logconc_ok,
    })
    return 0


def _cmd_check(args) -> int:
    G = graphs.read_edgelist(args.input)
    allv = np.arange(G.n)
    if args.which == "good":
        rep = structure.goodness(G, allv, args.theta, args.eta)
        _emit({"which": "good", "good": rep.good, "n": rep.n,
               "odd_degree_count": rep.odd_degree_count, "min_degree": rep.min_degree,
               "near_degree2_count": rep.near_degree2_count,
               "min_degree2_pair_distance": rep.min_degree2_pair_distance})
    elif args.which == "ukp":
        q = structure.build_Q(G, allv)
        rep = structure.check_ukp_f2(BitMatrix.from_graph(G), args.ell,
                                     [int(x) for x in q], args.eta)
        out = {"which": "ukp", "passed": rep.passed, "n": rep.n, "rank_gf2": rep.rank,
               "corank_gf2": rep.corank, "q_size": len(rep.Q)}
        if rep.witness:
            out["witness_weight"] = rep.witness.weight
            out["witness_level_fraction"] = rep.witness.level_fraction
            out["witness_support"] = list(rep.witness.support)
        _emit(out)
    elif args.which == "exp1":
        rep = structure.expansion1_falsify(G, args.eta, args.theta)
        _emit({"which": "exp1", "counterexample": rep.counterexample,
               "covered": rep.covered, "required": rep.required, "exact": rep.exact})
    elif args.which == "exp2":
        rep = structure.expansion2_check(G, args.eta)
        _emit({"which": "exp2", "dense_set": rep.dense_set, "ok1": rep.ok1,
               "near_four_cycle_count": rep.near_four_cycle_count, "ok2": rep.ok2,
               "pair_witness": rep.pair_witness, "ok3": rep.ok3,
               "pair_exact": rep.pair_exact})
    elif args.which == "joined":
        X = [int(x) for x in args.x.split(",")] if args.x else list(range(G.n))
        pairs = structure.joined_pairs(G, X, args.r)
        _emit({"which": "joined", "r": args.r, "pairs": pairs})
    return 0


def _cmd_anticonc(args) -> int:
    rng = RngStream(args.seed)
    ds = [int(x) for x in args.d.split(",")]
    print("d,atom,normalization,ci_lo,ci_hi")
    for d in ds:
        n = 2 * d
        v = np.arange(1, n + 1)
        spec = SliceSpec(n, d)
        if args.mode == "linear":
            eta = 1.0 - 1.0 / n  # distinct entries: max multiplicity 1
            if spec.count <= 2_000_000:
                spect = slice_atom_spectrum(list(range(1, n + 1)), spec)
                atom = max(spect.values()) / spec.count
                lo = hi = atom
            else:
                atom, lo, hi = _mc_max_atom(v, spec, args.trials, rng.substream(d))
            norm = atom * math.sqrt(eta * d)
        else:
            gen = rng.substream(1000 + d).generator
            M = gen.integers(0, 2, (n, n)) * 2 - 1
            M = np.triu(M) + np.triu(M, 1).T
            target = float(np.sort((M.sum(axis=1)))[n // 2])
            atom, lo, hi = quad_slice_atom(M, np.zeros(n), spec, target, mode="mc",
                                           trials=args.trials, rng=rng.substream(d))
            norm = atom * math.sqrt(d)
        print(f"{d},{atom!r},{norm!r},{lo!r},{hi!r}")
    return 0


def _mc_max_atom(v, spec, trials, rng):
    from collections import Counter
    gen = rng.generator
    counts: Counter = Counter()
    done = 0
    while done < trials:
        c = min(200_000, trials - done)
        keys = gen.random((c, spec.n))
        idx = np.argpartition(keys, spec.d - 1, axis=1)[:, :spec.d]
        sums = np.asarray(v)[idx].sum(axis=1)
        counts.update(sums.tolist())
        done += c
    hits = max(counts.values())
    from .anticonc import wilson_interval
    lo, hi = wilson_interval(hits, trials)
    return hits / trials, lo, hi


def _cmd_experiment(args) -> int:
    if args.action == "run":
        cfg = harness.parse_config(args.target)
        outcome = harness.run_experiment(cfg, threads=args.threads)
        for row in outcome.rows:
            print(",".join(str(row.get(c, "")) for c in
                           ("metric", "count", "mean", "ci_lo", "ci_hi", "threshold", "pass")))
        print(f"# results: {outcome.directory}")
        return 0 if outcome.ok else 2
    tables = harness.report(args.target)
    for t in tables:
        print(f"# {t.experiment}/{t.config_hash}"
              + (f" (skipped lines: {t.skipped_lines})" if t.skipped_lines else ""))
        for row in t.rows:
            print(",".join(str(row.get(c, "")) for c in
                           ("metric", "count", "mean", "ci_lo", "ci_hi", "threshold", "pass")))
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="corelab", description="rank behavior of sparse random graph cores")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("sample", help="sample a graph and emit its edge list")
    s.add_argument("--model", required=True, choices=["gnp", "gnm", "config", "core"])
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--p", type=float, default=None)
    s.add_argument("--lam", "--lambda", dest="lam", type=float, default=None)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--degrees", type=str, default="")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--stream", type=int, default=0)
    s.add_argument("--out", type=str, default=None)
    s.set_defaults(fn=_cmd_sample)

    s = sub.add_parser("kcore", help="peel a graph to its k-core")
    s.add_argument("--input", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--out", type=str, default=None)
    s.add_argument("--ids", type=str, default=None,
                   help="write the new-id to host-id map here")
    s.set_defaults(fn=_cmd_kcore)

    s = sub.add_parser("rank", help="exact rank certificate of an adjacency matrix")
    s.add_argument("--input", required=True)
    s.add_argument("--field", required=True, choices=["gf2", "modp", "rational"])
    s.add_argument("--p", type=int, default=1_073_741_789)
    s.add_argument("--primes", type=int, default=3)
    s.add_argument("--prime-bits", dest="prime_bits", type=int, default=30)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=_cmd_rank)

    s = sub.add_parser("theory", help="limit-law quantities and functional bounds")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--Delta", type=int, required=True)
    s.set_defaults(fn=_cmd_theory)

    s = sub.add_parser("check", help="structural predicates on a graph")
    s.add_argument("--which", required=True,
                   choices=["good", "ukp", "exp1", "exp2", "joined"])
    s.add_argument("--input", required=True)
    s.add_argument("--theta", type=float, default=0.05)
    s.add_argument("--eta", type=float, default=0.05)
    s.add_argument("--ell", type=int, default=2)
    s.add_argument("--r", type=int, default=6)
    s.add_argument("--x", type=str, default="")
    s.set_defaults(fn=_cmd_check)

    s = sub.add_parser("anticonc", help="atom probabilities on the Boolean slice")
    s.add_argument("--mode", required=True, choices=["linear", "quad"])
    s.add_argument("--d", type=str, default="4,8,16,32,64",
                   help="comma-separated slice weights")
    s.add_argument("--trials", type=int, default=200_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=_cmd_anticonc)

    s = sub.add_parser("experiment", help="run or report seeded experiments")
    s.add_argument("action", choices=["run", "report"])
    s.add_argument("target", help="config file (run) or results directory (report)")
    s.add_argument("--threads", type=int, default=None)
    s.set_defaults(fn=_cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, TypeError, FileNotFoundError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
