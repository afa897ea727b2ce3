#!/usr/bin/env python3
"""Export Joe-Kuo Sobol' direction numbers (new-joe-kuo-6.21201) to the plain-text
table read by the library. Source: the copy bundled with scipy.stats.qmc.

Output format, one line per dimension d >= 2:  d s a m_1 ... m_s
"""
import argparse
import os

import numpy as np
import scipy.stats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-dim", type=int, default=2000)
    ap.add_argument("--out", default="data/sobol_joe_kuo.txt")
    args = ap.parse_args()

    path = os.path.join(os.path.dirname(scipy.stats.__file__), "_sobol_direction_numbers.npz")
    table = np.load(path)
    poly, vinit = table["poly"], table["vinit"]
    with open(args.out, "w") as out:
        out.write("d s a m_i\n")
        for d in range(2, args.max_dim + 1):
            p = int(poly[d - 1])
            s = p.bit_length() - 1
            a = (p >> 1) & ((1 << (s - 1)) - 1)
            m = " ".join(str(int(x)) for x in vinit[d - 1][:s])
            out.write(f"{d} {s} {a} {m}\n")


if __name__ == "__main__":
    main()
