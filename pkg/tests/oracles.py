"""Independent brute-force oracles the tests check library results against.

These deliberately re-derive quantities with different code paths than the
package: explicit index loops instead of the expansion helper, recursive
walk enumeration instead of matrix powers, recursive path enumeration
instead of the library's iterator.
"""

from __future__ import annotations

from mogen import END, START, MultiOrderModel, PathMultiset


def brute_force_counts(s: PathMultiset, k: int) -> dict:
    """Transition counts via explicit index arithmetic on each path."""
    counts: dict = {}

    def bump(src, dst, f):
        counts[(src, dst)] = counts.get((src, dst), 0) + f

    for p in s.paths:
        nodes, f = p.nodes, p.frequency
        l = len(nodes)
        # start transition into the first one-node prefix
        bump(START, (nodes[0],), f)
        # growing prefixes: (v1..vi) -> (v1..v_{i+1}) while i < min(k, l)
        for i in range(1, min(k, l)):
            bump(nodes[:i], nodes[: i + 1], f)
        # sliding windows once the memory is full
        for i in range(k, l):
            bump(nodes[i - k : i], nodes[i - k + 1 : i + 1], f)
        # terminal transition from the deepest reached memory
        bump(nodes[max(0, l - k) :], END, f)
    return counts


def count_walks(n: int, edges: set[tuple[int, int]], length: int) -> int:
    """Number of walks with exactly ``length`` edges, by recursive
    enumeration over all node sequences."""
    successors = {i: [j for j in range(n) if (i, j) in edges] for i in range(n)}

    def walks_from(node: int, remaining: int) -> int:
        if remaining == 0:
            return 1
        return sum(walks_from(nxt, remaining - 1) for nxt in successors[node])

    return sum(walks_from(start, length) for start in range(n))


def enumerate_paths_recursive(model: MultiOrderModel) -> dict[tuple[int, ...], float]:
    """All complete paths with probabilities, by recursion over model rows.

    Only terminates for models whose reachable state graph is acyclic.
    """
    out: dict[tuple[int, ...], float] = {}

    def walk(state, nodes: tuple[int, ...], prob: float):
        for target, p in model.rows[state].items():
            if target == END:
                out[nodes] = out.get(nodes, 0.0) + prob * p
            else:
                walk(target, nodes + (target[-1],), prob * p)

    walk(START, (), 1.0)
    return out


def empirical_path_frequencies(s: PathMultiset) -> dict[tuple[int, ...], float]:
    merged: dict[tuple[int, ...], int] = {}
    for p in s.paths:
        merged[p.nodes] = merged.get(p.nodes, 0) + p.frequency
    m = s.total_observations
    return {nodes: f / m for nodes, f in merged.items()}
