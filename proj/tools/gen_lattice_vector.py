#!/usr/bin/env python3
"""Search for an extensible base-2 Korobov generating vector z_j = a^(j-1) mod 2^20.

The candidate multiplier a is scored by the shift-averaged worst-case error P_2 of the
rank-1 lattice rules {k z / 2^m} for m = 10..14 in a weighted Korobov space with
product weights gamma_j = 0.5 j^-2, truncated to the first `--score-dim` coordinates.
The best multiplier found is expanded to `--dim` coordinates and written one integer
per line.
"""
import argparse

import numpy as np

LOG2_MAX_N = 20


def korobov_vector(a, dim):
    mod = 1 << LOG2_MAX_N
    z = np.empty(dim, dtype=np.int64)
    z[0] = 1
    for j in range(1, dim):
        z[j] = (z[j - 1] * a) % mod
    return z


def p2_error(z, m, gamma):
    n = 1 << m
    k = np.arange(n, dtype=np.int64)[:, None]
    x = ((k * (z[None, :] % n)) % n) / n
    b2 = x * x - x + 1.0 / 6.0
    terms = np.log1p(gamma[None, :] * 2.0 * np.pi ** 2 * b2)
    return np.sqrt(max(np.mean(np.exp(terms.sum(axis=1))) - 1.0, 1e-300))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=2000)
    ap.add_argument("--score-dim", type=int, default=256)
    ap.add_argument("--candidates", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20130101)
    ap.add_argument("--out", default="data/lattice_korobov_base2.txt")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    gamma = 0.5 / np.arange(1, args.score_dim + 1) ** 2
    best = None
    for _ in range(args.candidates):
        # a = 3 or 5 (mod 8) has maximal multiplicative order 2^18 modulo 2^20
        a = int(rng.integers(1, 1 << (LOG2_MAX_N - 3))) * 8 + int(rng.choice([3, 5]))
        z = korobov_vector(a, args.score_dim)
        if len(np.unique(z % (1 << 14))) < args.score_dim:
            continue
        score = np.mean([np.log2(p2_error(z, m, gamma)) for m in range(10, 15)])
        if best is None or score < best[0]:
            best = (score, a)
    score, a = best
    z = korobov_vector(a, args.dim)
    with open(args.out, "w") as out:
        for v in z:
            out.write(f"{v}\n")
    print(f"multiplier a={a} mean log2 P2={score:.4f}")


if __name__ == "__main__":
    main()
