"""Regenerate the benchmark files under data/ from their public sources.

Sources (not downloaded here; pass local copies):

  - Japanese Vowels: ``JapaneseVowels_TRAIN.ts`` / ``JapaneseVowels_TEST.ts``
    from the UEA multivariate archive (timeseriesclassification.com). The
    same files ship inside the ``sktime`` source tree under
    ``sktime/datasets/data/JapaneseVowels/``. Original recordings: UCI ML
    repository, "Japanese Vowels" (Kudo, Toyama, Shimbo). 270 train / 370
    test utterances, 12 LPC cepstrum coefficients, lengths 7..29. The official
    train/test split is kept as-is.

  - Libras Movement: ``movement_libras.tsv.gz`` from the PMLB collection
    (github.com/EpistasisLab/pmlb, datasets/movement_libras). Original data:
    UCI ML repository, "Libras Movement". 360 hand trajectories, 45 steps of
    (x, y) coordinates stored interleaved in 90 columns plus a target column,
    15 classes with 24 samples each. PMLB ships no train/test split, so this
    script draws a fixed stratified 12/12-per-class split; the seed below is
    frozen so the files are reproducible byte for byte.

Usage:
    python3 tools/make_benchmarks.py --jpvow-dir DIR --libras-file FILE \
        [--out-dir data]
"""

import argparse
import gzip
import os
import shutil
import sys
import tempfile

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from rcmts import dataset as ds_mod  # noqa: E402

LIBRAS_SPLIT_SEED = [7, 3]  # frozen; do not change, data files depend on it


def convert_japanese_vowels(jpvow_dir, out_dir):
    paths = [os.path.join(jpvow_dir, "JapaneseVowels_TRAIN.ts"),
             os.path.join(jpvow_dir, "JapaneseVowels_TEST.ts")]
    train, test = ds_mod.convert_ts(paths)
    ds_mod.save_dataset(train, os.path.join(out_dir, "japanese_vowels_train.txt"))
    ds_mod.save_dataset(test, os.path.join(out_dir, "japanese_vowels_test.txt"))
    print(f"japanese_vowels: train {len(train)} / test {len(test)}, "
          f"F={train.feature_dim}, C={train.num_classes}, "
          f"shared t_max={train.t_max}")


def convert_libras(libras_file, out_dir):
    if libras_file.endswith(".gz"):
        with gzip.open(libras_file, "rb") as src, \
                tempfile.NamedTemporaryFile("wb", suffix=".tsv",
                                            delete=False) as dst:
            shutil.copyfileobj(src, dst)
            tmp = dst.name
        try:
            full = ds_mod.convert_wide_table(
                tmp, steps=45, features=2, delimiter="\t",
                layout="interleaved", has_header=True)
        finally:
            os.unlink(tmp)
    else:
        full = ds_mod.convert_wide_table(
            libras_file, steps=45, features=2, delimiter="\t",
            layout="interleaved", has_header=True)

    # Stratified 12/12 per class, one shared generator, classes in order.
    rng = np.random.default_rng(np.random.SeedSequence(LIBRAS_SPLIT_SEED))
    tr_idx, te_idx = [], []
    for c in range(full.num_classes):
        idx = np.where(full.labels == c)[0]
        perm = rng.permutation(len(idx))
        tr_idx.extend(idx[perm[:12]])
        te_idx.extend(idx[perm[12:]])
    tr_idx = np.sort(np.array(tr_idx))
    te_idx = np.sort(np.array(te_idx))
    train = ds_mod.take(full, tr_idx)
    test = ds_mod.take(full, te_idx)
    ds_mod.save_dataset(train, os.path.join(out_dir, "libras_train.txt"))
    ds_mod.save_dataset(test, os.path.join(out_dir, "libras_test.txt"))
    print(f"libras: train {len(train)} / test {len(test)}, "
          f"F={train.feature_dim}, C={train.num_classes}, t={train.t_max}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--jpvow-dir", default=None,
                        help="directory with JapaneseVowels_{TRAIN,TEST}.ts")
    parser.add_argument("--libras-file", default=None,
                        help="movement_libras.tsv[.gz] from PMLB")
    parser.add_argument("--out-dir", default=os.path.join(
        os.path.dirname(__file__), "..", "data"))
    args = parser.parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    if args.jpvow_dir is None and args.libras_file is None:
        parser.error("nothing to do: pass --jpvow-dir and/or --libras-file")
    if args.jpvow_dir:
        convert_japanese_vowels(args.jpvow_dir, args.out_dir)
    if args.libras_file:
        convert_libras(args.libras_file, args.out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
