#!/usr/bin/env python3
"""Print the diagonal profile K(n, xi + x/tau, xi + x/tau)/K(n, xi, xi) of a
gallery measure next to the sine-kernel profile (identically 1), as a quick
text-mode convergence picture.

Usage: python scripts/plot_kernel_profile.py [measure] [n] [eta]
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np  # noqa: E402

from cdlab.measures import RegVarFn, gallery  # noqa: E402
from cdlab.oprl import rescaled_cd, stieltjes_coeffs  # noqa: E402


def main():
    name = sys.argv[1] if len(sys.argv) > 1 else "legendre"
    n = int(sys.argv[2]) if len(sys.argv) > 2 else 200
    eta = float(sys.argv[3]) if len(sys.argv) > 3 else 0.5
    rec = stieltjes_coeffs(gallery(name), n + 1)
    h = RegVarFn(scale=eta, index=1.0)
    xs = np.linspace(-3.0, 3.0, 25)
    samples = rescaled_cd(rec, 0.0, h, n, [(x, x) for x in xs])
    print(f"{name}, n = {n}, eta = {eta}: diagonal profile (limit = 1)")
    for x, s in zip(xs, samples):
        bar = "#" * int(round(40 * max(s.value.real, 0.0)))
        print(f"  x = {x:+.2f}  {s.value.real:8.4f}  {bar}")


if __name__ == "__main__":
    main()
