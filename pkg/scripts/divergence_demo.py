"""Partial sums, the Bellman flip and the never-quit simulation."""

from fractions import Fraction as F

from gauntlet import divergence as dv


def main():
    print("St. Petersburg partial EV:", [str(x) for x in dv.st_petersburg_series(8).partial_sums])
    print("terms needed to exceed a price of 1000:", dv.price_witness(1000))
    for alpha in (2, 3):
        s = dv.naive_quit_flip_ev(alpha, 6)
        print(f"quit-flip alpha={alpha}:", [str(x) for x in s.partial_sums], s.caveat or "")
    sim = dv.simulate_never_quit(3, 10_000, seed=0)
    print(f"never-quit: {sim.negative_fraction:.0%} of {sim.trials} trials lose, mean turns {sim.mean_turns:.3f}")
    print("gamma*g   converges")
    for gamma in (F(1, 4), F(1, 2), F(3, 4)):
        for g in (F(3, 2), F(2), F(3)):
            v = dv.bellman_convergence(dv.BellmanSpec(gamma, g))
            print(f"{str(gamma * g):8s}  {v.converges}")


if __name__ == "__main__":
    main()
