"""Regenerate the shipped Faddeeva oracle table.

Writes rows `re_z im_z re_w im_w` (17+ significant digits) for a fixed
pseudo-random grid over |Re z|, |Im z| <= 50, computed with mpmath at
30 significant digits.  Points whose w(z) exceeds the double range are
skipped (the library reports those as overflow by contract).

Usage: python scripts/make_faddeeva_table.py [n_points] [out_path]
"""
import sys

import mpmath as mp
import numpy as np

mp.mp.dps = 30

FLOAT_MAX = 1.7976931348623157e308


def w(z):
    z = mp.mpc(z)
    return mp.e ** (-z * z) * mp.erfc(-1j * z)


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 10000
    out = sys.argv[2] if len(sys.argv) > 2 else "src/ditsim/data/faddeeva_oracle.txt"
    rng = np.random.default_rng(20260823)
    zr = rng.uniform(-50, 50, n)
    zi = rng.uniform(-50, 50, n)
    kept = 0
    with open(out, "w", newline="\n") as fh:
        fh.write("# re_z im_z re_w im_w  (mpmath dps=30, seed 20260823)\n")
        for a, b in zip(zr, zi):
            if b < 0 and b * b - a * a > 700.0:
                continue  # overflow region, excluded by construction
            val = w(complex(a, b))
            if abs(val) > FLOAT_MAX:
                continue
            fh.write(
                f"{float(a)!r} {float(b)!r} "
                f"{mp.nstr(val.real, 19, strip_zeros=False)} "
                f"{mp.nstr(val.imag, 19, strip_zeros=False)}\n"
            )
            kept += 1
    print(f"wrote {kept} rows to {out}")


if __name__ == "__main__":
    main()
