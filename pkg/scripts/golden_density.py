"""Independent reference values for K = Q: partial Euler product and partial
sums of the local Eisenstein densities over primes p <= M.

Deliberately shares no code with the package: its own sieve, mpmath at high
precision, plain loops. Output is frozen into tests/fixtures/golden.json.

    python scripts/golden_density.py --out tests/fixtures/golden.json
"""

import argparse
import json

import mpmath


def primes_upto(n):
    flags = bytearray([1]) * (n + 1)
    flags[0:2] = b"\x00\x00"
    i = 2
    while i * i <= n:
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
        i += 1
    return [i for i in range(n + 1) if flags[i]]


def reference(d, M, shifted=False, dps=60):
    mpmath.mp.dps = dps
    prod = mpmath.mpf(1)
    total = mpmath.mpf(0)
    squares = mpmath.mpf(0)
    extra = 1 if not shifted else 0
    for p in primes_upto(M):
        s = mpmath.mpf((p - 1) ** 2) / mpmath.mpf(p) ** (d + 1 + extra)
        prod *= 1 - s
        total += s
        squares += s * s
    return {
        "field": "x",
        "d": d,
        "flavor": "shifted" if shifted else "plain",
        "M": M,
        "density_partial": mpmath.nstr(1 - prod, 40),
        "mean_partial": mpmath.nstr(total, 40),
        "sum_squares_partial": mpmath.nstr(squares, 40),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out")
    args = ap.parse_args()
    rows = [reference(2, 10**5), reference(3, 10**4), reference(3, 10**4, shifted=True), reference(2, 10**4, shifted=True)]
    text = json.dumps(rows, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)


if __name__ == "__main__":
    main()
