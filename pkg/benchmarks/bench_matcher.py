#!/usr/bin/env python3
"""Benchmark the compiled matching kernel against the pure Python twin.

Generates a synthetic lemma corpus, compiles a phrase set, then times
both kernels over identical encoded sentences.  Outputs are compared
while timing so a speed win can never hide a behavior drift.

    python3 benchmarks/bench_matcher.py --sentences 20000
"""

import argparse
import random
import statistics
import time

from stereomine.matcher import _pymatch, compile_phrases

try:
    from stereomine.matcher import _speedups
except ImportError:
    _speedups = None

from stereomine.lexicons import ActionPhrase


def build_workload(args):
    rng = random.Random(args.seed)
    vocab = [f"w{i}" for i in range(args.vocab)]
    phrases = []
    seen = set()
    while len(phrases) < args.phrases:
        k = rng.randint(2, 4)
        lemmas = tuple(rng.choice(vocab) for _ in range(k))
        if lemmas in seen:
            continue
        seen.add(lemmas)
        phrases.append(ActionPhrase(lemmas=lemmas, source_id=f"p{len(phrases)}"))
    automaton = compile_phrases(phrases)
    sentences = []
    for _ in range(args.sentences):
        length = rng.randint(4, args.max_len)
        sentences.append(automaton.encode([rng.choice(vocab) for _ in range(length)]))
    return automaton, sentences


def run(kernel, automaton, sentences):
    t0 = time.perf_counter()
    hits = 0
    out = []
    for ids in sentences:
        found = kernel(automaton, ids)
        hits += len(found)
        out.append(found)
    return time.perf_counter() - t0, hits, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sentences", type=int, default=20000)
    ap.add_argument("--max-len", type=int, default=25)
    ap.add_argument("--vocab", type=int, default=60)
    ap.add_argument("--phrases", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    automaton, sentences = build_workload(args)
    tokens = sum(len(ids) for ids in sentences)
    print(
        f"{args.sentences} sentences, {tokens} tokens, "
        f"{args.phrases} phrases, best of {args.repeat}"
    )

    kernels = [("pure", _pymatch.match_token_ids)]
    if _speedups is not None:
        kernels.append(("compiled", _speedups.match_token_ids))
    else:
        print("compiled kernel not built; timing the pure kernel only")

    results = {}
    outputs = {}
    for name, kernel in kernels:
        times = []
        for _ in range(args.repeat):
            elapsed, hits, out = run(kernel, automaton, sentences)
            times.append(elapsed)
        best = min(times)
        results[name] = best
        outputs[name] = out
        print(
            f"  {name:9s} {best:7.3f}s  {tokens / best / 1e6:6.2f} Mtok/s  "
            f"{hits} matches  (spread {statistics.pstdev(times):.3f}s)"
        )

    if len(outputs) == 2:
        pure_sorted = [sorted(found) for found in outputs["pure"]]
        comp_sorted = [sorted(found) for found in outputs["compiled"]]
        if pure_sorted != comp_sorted:
            raise SystemExit("kernel outputs diverge; benchmark numbers are meaningless")
        print(f"  outputs identical; speedup x{results['pure'] / results['compiled']:.1f}")


if __name__ == "__main__":
    main()
