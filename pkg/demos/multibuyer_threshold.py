"""Per-buyer utility when M buyers share one variant, and how many variants it takes.

The second table uses the exact law of a buyer average: the smallest N whose
expected best average reaches the threshold.  Its growth in M depends
strongly on the threshold.
"""

import numpy as np

from matchmarket.experiments import default_config, run_experiment, threshold_scan


def main():
    table = run_experiment(default_config("fig2_multibuyer", n_variants=(1000,), m_buyers=(1, 3, 10, 30, 100), realizations=3000))
    print(f"{'M':>4} {'u per buyer':>12} {'se':>7} {'single-buyer form':>18}")
    for i, m in enumerate(table["m"]):
        print(f"{int(m):4d} {table['u_per_buyer_mean'][i]:12.4f} {table['u_per_buyer_se'][i]:7.4f} {table['single_buyer_approx'][i]:18.4f}")

    print("\nsmallest N with expected best buyer average above c, M = 1..12")
    for c in (0.25, 0.5, 0.7):
        scan = threshold_scan(tuple(range(1, 13)), c)
        n_star = np.asarray(scan["n_star"], dtype=int)
        print(f"c={c:4.2f}: slope of ln N* on M {float(scan.metadata['threshold_slope']):.3f}; N* = {n_star.tolist()}")


if __name__ == "__main__":
    main()
