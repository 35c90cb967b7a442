"""Optimal number of variants a buyer should examine at a linear search cost."""

from matchmarket import analytics as an
from matchmarket.experiments import default_config, fig5_tables


def main():
    cfg = default_config("fig5_search", beta=0.01, gamma=4.0, n_max=1000, realizations=20_000, beta_values=(0.003, 0.01, 0.03))
    curve, nopt = fig5_tables(cfg)
    meta = curve.metadata
    for dist in ("uniform", "normal", "powerlaw"):
        print(
            f"{dist:>9}: empirical N_opt {meta[f'{dist}_n_opt_empirical']:>5}, "
            f"analytic {float(meta[f'{dist}_n_opt_analytic']):8.2f}, rises then falls {meta[f'{dist}_rises_then_falls']}"
        )
    print("\nN_opt versus beta:")
    for name in nopt.columns:
        print(f"  {name:>28}: {', '.join(f'{v:g}' for v in nopt[name])}")
    print("\nexact power-law best utility at N=1000, gamma=4:")
    print(f"  mean {an.x_m_powerlaw_exact(1000, 4.0):.3f}, median {an.x_m_powerlaw_median(1000, 4.0):.3f}, mode {an.x_m_powerlaw_mode(1000, 4.0):.3f}")


if __name__ == "__main__":
    main()
