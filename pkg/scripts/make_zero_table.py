"""Write a plain-text table of zeta zero ordinates (one gamma per line).

Dev-time helper for the test fixture; the library itself only reads tables.
Requires python-flint (Arb), which certifies each zero.

    python scripts/make_zero_table.py 10000 tests/data/zeta_zeros_10000.txt
"""
import sys

import flint


def main(count, path):
    flint.ctx.prec = 80
    zeros = flint.acb.zeta_zeros(1, count)
    with open(path, "w") as fh:
        fh.write("# imaginary parts of the first %d nontrivial zeros of zeta\n" % count)
        fh.write("# generated with python-flint %s (acb.zeta_zeros)\n" % flint.__version__)
        for z in zeros:
            fh.write(z.imag.mid().str(20, radius=False) + "\n")


if __name__ == "__main__":
    main(int(sys.argv[1]), sys.argv[2])
