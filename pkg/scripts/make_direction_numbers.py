"""Regenerate ``src/oneshot/data/sobol_directions.txt``.

The table is the Joe-Kuo ``new-joe-kuo-6`` set as bundled with scipy,
rewritten in the plain-text layout ``d s a m_1 ... m_s`` (dimension,
primitive polynomial degree, interior coefficient bits, initial direction
integers). Only the first ``MAX_DIM`` dimensions are kept.
"""
import os
import sys

import numpy as np
import scipy.stats

MAX_DIM = 1111


def main(path):
    src = os.path.join(os.path.dirname(scipy.stats.__file__), "_sobol_direction_numbers.npz")
    table = np.load(src)
    poly, vinit = table["poly"], table["vinit"]
    with open(path, "w") as fh:
        fh.write("# Sobol direction numbers (Joe-Kuo new-joe-kuo-6 layout)\n")
        fh.write(f"# max_dimension {MAX_DIM}\n")
        fh.write("# d s a m_1 ... m_s\n")
        # dimension 1 is the van der Corput sequence and carries no row
        for dim in range(2, MAX_DIM + 1):
            p = int(poly[dim - 1])
            s = p.bit_length() - 1
            a = (p >> 1) & ((1 << (s - 1)) - 1) if s > 1 else 0
            m = " ".join(str(int(v)) for v in vinit[dim - 1, :s])
            fh.write(f"{dim} {s} {a} {m}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/oneshot/data/sobol_directions.txt")
