"""Best total utility when buyer and vendor utilities are correlated.

st = -1 is a zero-sum market, st = +1 makes the two sides identical.
"""

from matchmarket.experiments import default_config, run_experiment


def main():
    st = (-1.0, -0.8, -0.4, 0.0, 0.4, 0.8, 1.0)
    table = run_experiment(default_config("fig3_correlated", n_variants=(1000,), st_values=st, realizations=4000))
    print(f"{'st':>5} {'MC mean':>9} {'se':>7} {'implicit':>9} {'explicit':>9}")
    for i, s in enumerate(table["st"]):
        print(
            f"{s:+5.1f} {table['u_max_mean'][i]:9.4f} {table['u_max_se'][i]:7.4f} "
            f"{table['implicit_root'][i]:9.4f} {table['explicit_approx'][i]:9.4f}"
        )


if __name__ == "__main__":
    main()
