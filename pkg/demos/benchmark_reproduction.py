"""Benchmark reproduction: repeated-seed trials on the bundled datasets.

Compares the three representations (lESN, omESN, rmESN) under identical
reservoirs across independent seeds, reporting mean and standard
deviation of accuracy, macro F1, and per-run wall time. The converted
benchmark files live under data/; tools/make_benchmarks.py documents
exactly how they were produced from the public sources.

Usage:
    python demos/benchmark_reproduction.py --dataset jpvow --runs 10
    python demos/benchmark_reproduction.py --dataset libras --runs 10
"""

import argparse
from pathlib import Path

from rcmts import PipelineConfig, ReservoirConfig, load_dataset, repeat_trials

DATA_DIR = Path(__file__).resolve().parents[1] / "data"

FILES = {
    "jpvow": ("japanese_vowels_train.txt", "japanese_vowels_test.txt"),
    "libras": ("libras_train.txt", "libras_test.txt"),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dataset", choices=sorted(FILES), default="jpvow")
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--threads", type=int, default=8)
    args = parser.parse_args()

    train_file, test_file = FILES[args.dataset]
    train = load_dataset(DATA_DIR / train_file)
    test = load_dataset(DATA_DIR / test_file)
    print(f"{args.dataset}: {len(train)} train / {len(test)} test, "
          f"F={train.feature_dim}, C={train.num_classes}, "
          f"T_max={train.t_max}")
    print(f"{args.runs} runs per representation, seeds 0..{args.runs - 1}, "
          f"shared reservoir per seed\n")

    header = f"{'model':8s} {'accuracy':>16s} {'macro F1':>16s} " \
             f"{'sec/run':>10s}"
    print(header)
    print("-" * len(header))
    for label, kind in (("lESN", "last-state"),
                        ("omESN", "output-model"),
                        ("rmESN", "reservoir-model")):
        config = PipelineConfig(reservoir=ReservoirConfig(seed=0),
                                representation=kind, threads=args.threads)
        result = repeat_trials(config, train, test, args.runs)
        print(f"{label:8s} "
              f"{result.accuracy_mean:8.4f} +-{result.accuracy_std:6.4f} "
              f"{result.f1_mean:8.4f} +-{result.f1_std:6.4f} "
              f"{result.seconds_mean:10.2f}")


if __name__ == "__main__":
    main()
