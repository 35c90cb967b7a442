"""Matchmaker versus a vendor that offers variants in order of its own utility."""

from matchmarket.experiments import default_config, run_experiment


def main():
    table = run_experiment(default_config("fig4_vendor_proposes", n_variants=(2, 5, 20, 100, 1000), realizations=5000))
    print(f"{'N':>5} {'total MM':>9} {'total VP':>9} {'ineq MM':>8} {'ineq VP':>8} {'no trade':>9}")
    for i, n in enumerate(table["n"]):
        print(
            f"{int(n):5d} {table['matchmaker_total_mean'][i]:9.4f} {table['vendor_proposes_total_mean'][i]:9.4f} "
            f"{table['matchmaker_inequality_mean'][i]:8.4f} {table['vendor_proposes_inequality_mean'][i]:8.4f} "
            f"{table['no_trade_fraction_mean'][i]:9.4f}"
        )


if __name__ == "__main__":
    main()
