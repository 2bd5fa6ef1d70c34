#!/usr/bin/env python3
"""Compare the compiled and pure-numpy ADMM kernels on one workload.

Grounds a seeded synthetic dataset (chains on, so components are larger
than single pairs) and times MAP inference over all components with each
kernel.  The compiled kernel is warmed once so JIT compilation is not
billed to the measurement.

Usage: python3 benchmarks/bench_solver.py [--topics N] [--repeats R]
"""

import argparse
import time

from arglogic import kernels
from arglogic.chains import build_indirect
from arglogic.grounding import ground
from arglogic.model import connected_components
from arglogic.predicates import evaluate_all
from arglogic.rules import RuleSetConfig, build_ruleset
from arglogic.solver import solve_map_admm
from arglogic.synth import SynthConfig, generate


def build_programs(n_topics, seed):
    cfg = SynthConfig(n_topics=n_topics, tree_depth=3, branching=3,
                      noise_sigma=0.5, seed=seed,
                      split_fractions={"fit": 0.0, "val": 0.0, "test": 1.0})
    graph, bundles, _ = generate(cfg)
    graph, triples = build_indirect(graph)
    vectors = {pid: evaluate_all(b) for pid, b in bundles.items()}
    rules = build_ruleset(RuleSetConfig(chains=True))
    triples_by_pair = {}
    for t in triples:
        for pid in (t.outer_pair, t.first_hop, t.second_hop):
            triples_by_pair.setdefault(pid, set()).add(t)
    programs = []
    for comp in connected_components(graph):
        comp_triples = sorted(
            {t for p in comp for t in triples_by_pair.get(p.pair_id, ())},
            key=lambda t: t.outer_pair)
        programs.append(ground(rules, comp, vectors, comp_triples,
                               task_mode="ternary"))
    return programs


def run(programs, backend):
    total_energy = 0.0
    total_iters = 0
    start = time.perf_counter()
    for prog in programs:
        a = solve_map_admm(prog, backend=backend)
        total_energy += a.energy
        total_iters += a.iterations
    return time.perf_counter() - start, total_energy, total_iters


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--topics", type=int, default=20)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    programs = build_programs(args.topics, args.seed)
    n_pots = sum(len(p.potentials) for p in programs)
    n_atoms = sum(p.n_atoms for p in programs)
    print(f"workload: {len(programs)} components, {n_atoms} atoms, "
          f"{n_pots} ground potentials")

    backends = [("numpy", kernels.solve_admm_numpy)]
    if kernels.HAVE_NUMBA:
        solve_map_admm(programs[0], backend=kernels.solve_admm_numba)  # warm JIT
        backends.append(("numba", kernels.solve_admm_numba))
    else:
        print("numba unavailable (or disabled via ARGLOGIC_NO_NUMBA); "
              "timing numpy only")

    results = {}
    for name, backend in backends:
        best = min(run(programs, backend) for _ in range(args.repeats))
        results[name] = best
        secs, energy, iters = best
        print(f"{name:>6}: {secs:8.3f}s  total energy {energy:.6f}  "
              f"{iters} ADMM iterations")

    if len(results) == 2:
        e_np, e_nb = results["numpy"][1], results["numba"][1]
        assert abs(e_np - e_nb) < 1e-6 * max(1.0, abs(e_np)), \
            "backends disagree on energy"
        print(f"speedup (numpy/numba): "
              f"{results['numpy'][0] / results['numba'][0]:.2f}x")


if __name__ == "__main__":
    main()
