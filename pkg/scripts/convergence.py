"""Empirical density and mean over growing boxes next to the analytic enclosure.

    python scripts/convergence.py --field x -d 2 --heights 10 30 100 300
    python scripts/convergence.py --field "x^2+1" -d 3 --heights 5 10 20 --mode montecarlo --samples 1000000
"""

import argparse
import time

from eisen import NumberField
from eisen.lab import BoxSpec, exhaustive_scan, monte_carlo_scan
from eisen.moments import analyze


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--field", default="x")
    ap.add_argument("-d", type=int, default=2)
    ap.add_argument("--flavor", default="plain", choices=("plain", "shifted"))
    ap.add_argument("-M", type=int, default=10_000)
    ap.add_argument("--heights", type=int, nargs="+", default=[10, 30, 100])
    ap.add_argument("--mode", default="exhaustive", choices=("exhaustive", "montecarlo"))
    ap.add_argument("--samples", type=int, default=10**6)
    ap.add_argument("--budget", type=int, default=3 * 10**8)
    args = ap.parse_args()

    F = NumberField(args.field)
    order = None if (args.flavor == "shifted" and args.d == 2) else 1
    rep = analyze(F, args.d, args.flavor, args.M, order)
    print(f"field {F}, d = {args.d}, {args.flavor}, M = {args.M}")
    for name, v in rep.quantities.items():
        print(f"  analytic {name:16s} [{float(v.lo):.8f}, {float(v.hi):.8f}]")
    print(f"{'H':>6} {'density':>12} {'mean':>12} {'std.err':>10} {'seconds':>8}")
    for H in args.heights:
        box = BoxSpec(F, H, args.d)
        t0 = time.perf_counter()
        if args.mode == "exhaustive":
            emp = exhaustive_scan(box, args.flavor, 1, budget=args.budget)
        else:
            emp = monte_carlo_scan(box, args.flavor, args.samples, max_order=1)
        q = emp.quantities()
        dt = time.perf_counter() - t0
        se = q["mean"].standard_error
        print(f"{H:>6} {float(q['density'].value):12.8f} {float(q['mean'].value):12.8f} "
              f"{'exact' if se is None else f'{se:.2e}':>10} {dt:8.2f}")


if __name__ == "__main__":
    main()
