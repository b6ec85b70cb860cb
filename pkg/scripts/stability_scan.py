"""Spectral abscissa as a function of the wave-speed mismatch.

Varies ``b`` (and so ``k/rho1 - b/rho2``) for a chosen coupling/law pair and
records the abscissa of the dense semi-discrete operator.
"""

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from bresse.diagnostics import spectrum
from bresse.discretization import build_system
from bresse.model_catalog import SAMPLE_LAWS, CouplingPattern, ModelSpec, stability_number
from bresse.verify import DESK


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--coupling", default="SingleShear", choices=[p.name for p in CouplingPattern][:-1])
    ap.add_argument("--law", default="Fourier", choices=list(SAMPLE_LAWS))
    ap.add_argument("--N", type=int, default=12)
    ap.add_argument("--points", type=int, default=21)
    ap.add_argument("--out", type=Path, default=Path("output/stability_scan.csv"))
    args = ap.parse_args(argv)

    # equal speeds at b = k rho2 / rho1
    base = replace(DESK, k0=DESK.k)
    b_equal = base.k * base.rho2 / base.rho1
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["b", "chi1", "chi2", "abscissa"])
        for b in np.linspace(0.5 * b_equal, 1.5 * b_equal, args.points):
            c = replace(base, b=float(b))
            spec = ModelSpec(c, CouplingPattern[args.coupling], SAMPLE_LAWS[args.law])
            rep = spectrum(build_system(spec, args.N).operator)
            chi1, chi2 = stability_number(c)
            w.writerow([f"{b:.17g}", f"{chi1:.17g}", f"{chi2:.17g}", f"{rep.abscissa:.17g}"])
            print(f"b = {b:.4f}  chi1 = {chi1:+.4f}  abscissa = {rep.abscissa:.4e}")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
