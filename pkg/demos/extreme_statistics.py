"""Mean best total utility among N variants with uniform utilities.

Compares the exact quadrature value, the large-N closed form and a
Monte Carlo estimate for a handful of N.
"""

from matchmarket import analytics as an
from matchmarket.market import UtilityRule, select_batch
from matchmarket.montecarlo import run_blocks, summarize

SEED = 1


def main():
    print(f"{'N':>6} {'exact':>9} {'closed form':>12} {'rel. err':>9} {'MC':>9} {'se':>8}")
    for n in (2, 5, 17, 100, 1000):
        def kernel(rng, count, n=n):
            x = rng.uniform(-1, 1, (count, n))
            y = rng.uniform(-1, 1, (count, n))
            return {"u": select_batch(UtilityRule.linear(), x, y).total}

        est = summarize(run_blocks(kernel, 20_000, SEED, first_index=n)["u"])
        exact = an.u_m_uniform_exact(n)
        approx = an.u_m_uniform_approx(n)
        print(f"{n:>6} {exact:9.5f} {approx:12.5f} {abs(approx / exact - 1):9.2%} {est.mean:9.5f} {est.se:8.5f}")

    print("inequality 1 - <u_m>/2 at N=1000:", round(an.delta_uniform_approx(1000), 5))


if __name__ == "__main__":
    main()
