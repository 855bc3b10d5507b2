"""Sequence families used for code-domain MIMO separation.

Brute-force census of almost-perfect binary sequences up to length 16,
their periodic autocorrelation structure, and the polyphase reference
code the simulator defaults to.  Writes the found sequences plus an
autocorrelation table to demos/output/.
"""

import numpy as np

from pmcwnet import (
    generate_p3,
    periodic_autocorrelation,
    save_sequence,
    search_apas,
    verify_almost_perfect,
)

from _util import output_dir


def main():
    out = output_dir()

    print("almost-perfect binary sequences (canonical up to shift/negation)")
    for length in (4, 8, 12, 16):
        hits = search_apas(length)
        print(f"  L={length:2d}: {len(hits)} found")
        for i, seq in enumerate(hits):
            rep = verify_almost_perfect(seq, tolerance=0.0)
            chips = "".join("+" if c > 0 else "-" for c in seq.chips.real)
            print(
                f"    {chips}  peak={rep.peak:.0f} "
                f"half-lag={rep.half_lag_value:.0f}"
            )
            save_sequence(seq, out / f"apas_{length}_{i}.txt")

    # The default polyphase code: zero autocorrelation at every nonzero
    # lag, which is what makes the per-radar shifted copies separable.
    p3 = generate_p3(504)
    acf = periodic_autocorrelation(p3)
    worst = float(np.max(np.abs(acf[1:])))
    print(f"polyphase L=504: worst off-peak |autocorrelation| = {worst:.2e}")

    with open(out / "autocorrelation_16.csv", "w") as fh:
        fh.write("lag,apas_16,p3_16\n")
        a16 = periodic_autocorrelation(search_apas(16)[0])
        p16 = periodic_autocorrelation(generate_p3(16))
        for lag in range(16):
            fh.write(f"{lag},{a16[lag].real:.6f},{abs(p16[lag]):.6f}\n")
    print(f"wrote {out / 'autocorrelation_16.csv'}")


if __name__ == "__main__":
    main()
