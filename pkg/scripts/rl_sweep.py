"""Sweep every learner on every repeated dilemma and print final-behaviour counts."""

import argparse

from gauntlet import learninglab as ll


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--episodes", type=int, default=ll.TrainConfig().episodes)
    p.add_argument("--accuracy", type=float, default=1.0, help="predictor accuracy (sensitivity check)")
    args = p.parse_args()
    cfg = ll.TrainConfig(episodes=args.episodes, accuracy=args.accuracy)
    for env in ll.ENV_IDS:
        rep = ll.sweep(env, ll.LEARNER_IDS, range(args.seeds), cfg)
        for learner in ll.LEARNER_IDS:
            counts = ", ".join(f"{k}: {v}" for k, v in sorted(rep.outcomes[learner].items()))
            print(f"{env:30s} {learner:18s} {counts}")


if __name__ == "__main__":
    main()
