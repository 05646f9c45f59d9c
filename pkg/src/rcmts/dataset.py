"""Dataset model, text file format, normalization, padding, and splits.

The native dataset format is a plain text file:

    line 1 header: ``N F C T_max``
    then per sample: a line ``label T`` followed by T lines of F
    space-separated decimal reals (or ``NA`` for a missing cell).

Lines starting with ``#`` are comments and are ignored anywhere in the
file. Encoding is ASCII/UTF-8 with newline terminators. Values are written
with shortest round-trip float formatting, so save followed by load
reproduces a dataset bit for bit.

Missing cells (``NA``) are stored as 0.0 with a per-cell mask kept on the
sample; normalization statistics skip masked cells and normalization leaves
them at 0.0.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import (
    InvalidArgumentError,
    InvalidInputError,
    InvalidLabelError,
    ParseError,
)


@dataclass
class Mts:
    """One multivariate time series.

    Attributes:
        values: (rows, F) float array; rows == length unless zero padded.
        length: true number of timesteps (padding excluded), >= 1.
        mask: (rows, F) bool array, True where the cell was observed.
    """

    values: np.ndarray
    length: int
    mask: np.ndarray = None

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.mask is None:
            self.mask = np.ones(self.values.shape, dtype=bool)
        else:
            self.mask = np.asarray(self.mask, dtype=bool)
        if self.length < 1:
            raise InvalidInputError("sample length must be >= 1")
        if self.values.shape[0] < self.length:
            raise InvalidInputError("sample has fewer rows than its length")
        if self.mask.shape != self.values.shape:
            raise InvalidInputError("mask shape must match values shape")
        if not np.isfinite(self.values).all():
            raise InvalidInputError("sample contains non-finite values")


@dataclass
class Dataset:
    """A labeled collection of MTS with shared feature dimension.

    Attributes:
        samples: list of Mts.
        labels: (N,) int array, each in [0, num_classes).
        num_classes: class count C.
        feature_dim: shared feature count F.
        t_max: padding width; at least the longest sample. Train/test pairs
            written by the converter share one t_max so their padded tensors
            line up.
        class_names: optional original label names, index -> name.
    """

    samples: list
    labels: np.ndarray
    num_classes: int
    feature_dim: int
    t_max: int
    class_names: list = field(default=None)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if len(self.samples) == 0:
            raise InvalidInputError("dataset has no samples")
        if len(self.samples) != len(self.labels):
            raise InvalidInputError("labels and samples differ in count")
        if self.num_classes < 1:
            raise InvalidInputError("num_classes must be >= 1")
        if self.labels.min() < 0 or self.labels.max() >= self.num_classes:
            raise InvalidLabelError(
                f"labels must lie in [0, {self.num_classes})"
            )
        for i, s in enumerate(self.samples):
            if s.values.shape[1] != self.feature_dim:
                raise InvalidInputError(
                    f"sample {i} has {s.values.shape[1]} features, "
                    f"expected {self.feature_dim}"
                )
        longest = max(s.length for s in self.samples)
        if self.t_max < longest:
            raise InvalidInputError(
                f"t_max={self.t_max} is below the longest sample ({longest})"
            )

    def __len__(self):
        return len(self.samples)

    @property
    def lengths(self):
        """(N,) int array of true sample lengths."""
        return np.array([s.length for s in self.samples], dtype=int)

    @classmethod
    def from_arrays(cls, arrays, labels, num_classes=None, t_max=None,
                    class_names=None):
        """Build a dataset from a list of (T, F) arrays."""
        labels = np.asarray(labels, dtype=int)
        if num_classes is None:
            num_classes = int(labels.max()) + 1 if len(labels) else 0
        samples = [Mts(values=a, length=np.atleast_2d(a).shape[0])
                   for a in arrays]
        if t_max is None:
            t_max = max(s.length for s in samples)
        return cls(samples=samples, labels=labels, num_classes=num_classes,
                   feature_dim=samples[0].values.shape[1], t_max=int(t_max),
                   class_names=class_names)


def _format_value(v, observed):
    return "NA" if not observed else repr(float(v))


def save_dataset(ds, path):
    """Write a dataset in the native text format.

    Class name mappings, when present, are written as leading comments.
    """
    lines = []
    if ds.class_names is not None:
        for i, name in enumerate(ds.class_names):
            lines.append(f"# class {i} = {name}")
    lines.append(f"{len(ds)} {ds.feature_dim} {ds.num_classes} {ds.t_max}")
    for s, label in zip(ds.samples, ds.labels):
        lines.append(f"{int(label)} {s.length}")
        for t in range(s.length):
            row = " ".join(
                _format_value(s.values[t, f], s.mask[t, f])
                for f in range(ds.feature_dim)
            )
            lines.append(row)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(path):
    """Parse a native-format dataset file.

    Raises:
        ParseError: malformed header, counts that do not add up, labels out
            of range, or unparseable values; carries the line number.
    """
    class_names = {}
    tokens = []  # (line_number, text) with comments and blanks removed
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].strip().split(" = ", 1)
                head = parts[0].split()
                if len(parts) == 2 and len(head) == 2 and head[0] == "class":
                    try:
                        class_names[int(head[1])] = parts[1]
                    except ValueError:
                        pass
                continue
            tokens.append((ln, line))

    if not tokens:
        raise ParseError("empty file", line=1)
    ln, header = tokens[0]
    parts = header.split()
    if len(parts) != 4:
        raise ParseError(f"header must be 'N F C T_max', got {header!r}", line=ln)
    try:
        n, f_dim, c, t_max = (int(p) for p in parts)
    except ValueError:
        raise ParseError(f"non-integer header field in {header!r}", line=ln)
    if n < 1 or f_dim < 1 or c < 1 or t_max < 1:
        raise ParseError(f"header fields must be positive, got {header!r}", line=ln)

    samples, labels = [], []
    pos = 1
    for i in range(n):
        if pos >= len(tokens):
            raise ParseError(f"expected sample {i}, found end of file",
                             line=tokens[-1][0])
        ln, line = tokens[pos]
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"sample header must be 'label T', got {line!r}",
                             line=ln)
        try:
            label, t_len = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer sample header {line!r}", line=ln)
        if not 0 <= label < c:
            raise ParseError(f"label {label} out of range [0, {c})", line=ln)
        if not 1 <= t_len <= t_max:
            raise ParseError(f"sample length {t_len} out of range [1, {t_max}]",
                             line=ln)
        pos += 1
        values = np.zeros((t_len, f_dim))
        mask = np.ones((t_len, f_dim), dtype=bool)
        for t in range(t_len):
            if pos >= len(tokens):
                raise ParseError(f"sample {i} truncated", line=tokens[-1][0])
            ln, line = tokens[pos]
            cells = line.split()
            if len(cells) != f_dim:
                raise ParseError(
                    f"expected {f_dim} values, got {len(cells)}", line=ln)
            for j, cell in enumerate(cells):
                if cell == "NA":
                    values[t, j] = 0.0
                    mask[t, j] = False
                else:
                    try:
                        values[t, j] = float(cell)
                    except ValueError:
                        raise ParseError(f"bad value {cell!r}", line=ln)
            pos += 1
        samples.append(Mts(values=values, length=t_len, mask=mask))
        labels.append(label)
    if pos != len(tokens):
        raise ParseError("trailing content after last sample",
                         line=tokens[pos][0])

    names = None
    if class_names:
        names = [class_names.get(i, str(i)) for i in range(c)]
    return Dataset(samples=samples, labels=np.array(labels), num_classes=c,
                   feature_dim=f_dim, t_max=t_max, class_names=names)


@dataclass(frozen=True)
class ZscoreStats:
    """Per-variable normalization statistics fitted on training data."""

    mean: np.ndarray
    std: np.ndarray  # raw population std; zeros mean "pass through unscaled"


def zscore_fit(train):
    """Per-variable mean and population std over all training timesteps.

    Masked (missing) cells are excluded from the statistics. A variable
    with zero variance keeps std 0 in the stats; applying the stats then
    only subtracts the mean for that variable.
    """
    f_dim = train.feature_dim
    total = np.zeros(f_dim)
    total_sq = np.zeros(f_dim)
    count = np.zeros(f_dim)
    for s in train.samples:
        v = s.values[: s.length]
        m = s.mask[: s.length]
        total += np.where(m, v, 0.0).sum(axis=0)
        total_sq += np.where(m, v * v, 0.0).sum(axis=0)
        count += m.sum(axis=0)
    if (count == 0).any():
        raise InvalidInputError(
            "a variable has no observed cells; cannot fit normalization")
    mean = total / count
    var = total_sq / count - mean**2
    std = np.sqrt(np.maximum(var, 0.0))
    return ZscoreStats(mean=mean, std=std)


def zscore_apply(ds, stats):
    """Return a normalized copy of ``ds`` using training statistics.

    Observed cells become (x - mean) / std, with a unit divisor where the
    training std was zero. Masked cells stay 0.0.
    """
    if stats.mean.shape[0] != ds.feature_dim:
        raise InvalidArgumentError(
            f"stats cover {stats.mean.shape[0]} variables, dataset has "
            f"{ds.feature_dim}")
    divisor = np.where(stats.std == 0.0, 1.0, stats.std)
    samples = []
    for s in ds.samples:
        v = (s.values - stats.mean) / divisor
        v = np.where(s.mask, v, 0.0)
        samples.append(Mts(values=v, length=s.length, mask=s.mask.copy()))
    return Dataset(samples=samples, labels=ds.labels.copy(),
                   num_classes=ds.num_classes, feature_dim=ds.feature_dim,
                   t_max=ds.t_max, class_names=ds.class_names)


def zscore_invert(ds, stats):
    """Undo zscore_apply; observed cells only, masked cells stay 0.0."""
    divisor = np.where(stats.std == 0.0, 1.0, stats.std)
    samples = []
    for s in ds.samples:
        v = s.values * divisor + stats.mean
        v = np.where(s.mask, v, 0.0)
        samples.append(Mts(values=v, length=s.length, mask=s.mask.copy()))
    return Dataset(samples=samples, labels=ds.labels.copy(),
                   num_classes=ds.num_classes, feature_dim=ds.feature_dim,
                   t_max=ds.t_max, class_names=ds.class_names)


def zero_pad(ds):
    """Append zero rows so every sample has ds.t_max rows.

    True lengths stay recorded on each sample. Padded cells count as
    observed zeros, not as missing data.
    """
    samples = []
    for s in ds.samples:
        rows = s.values.shape[0]
        if rows == ds.t_max:
            samples.append(Mts(values=s.values.copy(), length=s.length,
                               mask=s.mask.copy()))
            continue
        values = np.zeros((ds.t_max, ds.feature_dim))
        values[:rows] = s.values
        mask = np.ones((ds.t_max, ds.feature_dim), dtype=bool)
        mask[:rows] = s.mask
        samples.append(Mts(values=values, length=s.length, mask=mask))
    return Dataset(samples=samples, labels=ds.labels.copy(),
                   num_classes=ds.num_classes, feature_dim=ds.feature_dim,
                   t_max=ds.t_max, class_names=ds.class_names)


def take(ds, idx):
    """Dataset restricted to the given sample indices, order preserved."""
    idx = np.asarray(idx, dtype=int)
    samples = [Mts(values=ds.samples[i].values.copy(),
                   length=ds.samples[i].length,
                   mask=ds.samples[i].mask.copy()) for i in idx]
    return Dataset(samples=samples, labels=ds.labels[idx].copy(),
                   num_classes=ds.num_classes, feature_dim=ds.feature_dim,
                   t_max=ds.t_max, class_names=ds.class_names)


def split(ds, fraction, seed, require_all_classes=True):
    """Deterministic shuffled train/test split.

    The test side gets floor(N * (1 - fraction)) samples. With
    ``require_all_classes`` the draw is repeated with seed+1, seed+2, ...
    (at most 10 tries) until every class appears in the train side.

    Returns:
        (train, test) datasets with sample order following the original.
    """
    if not 0.0 < fraction < 1.0:
        raise InvalidArgumentError(f"fraction must be in (0, 1), got {fraction}")
    n = len(ds)
    n_test = math.floor(n * (1.0 - fraction))
    n_train = n - n_test
    if n_train < 1 or n_test < 1:
        raise InvalidArgumentError(
            f"split {fraction} of {n} samples leaves an empty side")
    tries = 10 if require_all_classes else 1
    for attempt in range(tries):
        rng = _rng.stream(_rng.OP_SPLIT, seed + attempt)
        perm = rng.permutation(n)
        train_idx = np.sort(perm[:n_train])
        test_idx = np.sort(perm[n_train:])
        present = np.unique(ds.labels[train_idx])
        if not require_all_classes or len(present) == ds.num_classes:
            return take(ds, train_idx), take(ds, test_idx)
    raise InvalidLabelError(
        f"could not place every class in the train side after {tries} draws")


def kfold_indices(n, k, seed):
    """Deterministic k folds of range(n): disjoint, sizes differ by <= 1."""
    if k < 1:
        raise InvalidArgumentError(f"k must be >= 1, got {k}")
    if k > n:
        raise InvalidArgumentError(f"k={k} exceeds sample count {n}")
    rng = _rng.stream(_rng.OP_KFOLD, seed)
    perm = rng.permutation(n)
    return [np.sort(perm[i::k]) for i in range(k)]


def generate_synthetic(classes=2, per_class=50, t=100, f=3, noise=0.1,
                       seed=0):
    """Sinusoid dataset with class-specific frequency.

    Class c uses frequency 0.05 * (c + 1) cycles per step, identical for
    every feature; each (sample, feature) draws its own uniform phase, and
    Gaussian noise with the given standard deviation is added on top.
    Deterministic for a fixed seed.
    """
    if classes < 1 or per_class < 1 or t < 1 or f < 1:
        raise InvalidArgumentError("counts must all be >= 1")
    if noise < 0:
        raise InvalidArgumentError(f"noise must be >= 0, got {noise}")
    arrays, labels = [], []
    steps = np.arange(1, t + 1, dtype=float)[:, None]
    for c in range(classes):
        freq = 0.05 * (c + 1)
        for i in range(per_class):
            rng = _rng.stream(_rng.OP_SYNTH, seed, c, i)
            phases = rng.uniform(0.0, 2.0 * np.pi, f)
            vals = np.sin(2.0 * np.pi * freq * steps + phases[None, :])
            if noise > 0:
                vals = vals + rng.normal(0.0, noise, (t, f))
            arrays.append(vals)
            labels.append(c)
    return Dataset.from_arrays(arrays, labels, num_classes=classes)


# ---------------------------------------------------------------------------
# Converters for common external formats.

def read_ts_file(path):
    """Parse a UEA/UCR ``.ts`` sequence file.

    Returns:
        (arrays, raw_labels): list of (T, F) float arrays and the label
        strings as they appear in the file.
    """
    arrays, raw_labels = [], []
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("@") or line.startswith("#"):
                continue
            parts = line.split(":")
            if len(parts) < 2:
                raise ParseError(f"expected ':'-separated dimensions", line=ln)
            dims = []
            for p in parts[:-1]:
                try:
                    dims.append(np.array([float(v) for v in p.split(",")]))
                except ValueError:
                    raise ParseError(f"bad numeric run in {p!r}", line=ln)
            lengths = {len(d) for d in dims}
            if len(lengths) != 1:
                raise ParseError("dimensions differ in length within a sample",
                                 line=ln)
            arrays.append(np.stack(dims, axis=1))
            raw_labels.append(parts[-1].strip())
    if not arrays:
        raise ParseError("no data lines found", line=1)
    return arrays, raw_labels


def _label_sort_key(name):
    try:
        return (0, float(name), name)
    except ValueError:
        return (1, 0.0, name)


def convert_ts(paths):
    """Convert one or more related ``.ts`` files to datasets.

    All files share one label mapping (original labels sorted, numeric
    first) and one t_max, so padded tensors from a train/test pair line up.

    Returns:
        list of Dataset, one per input path.
    """
    parsed = [read_ts_file(p) for p in paths]
    all_labels = sorted({lab for _, labs in parsed for lab in labs},
                        key=_label_sort_key)
    mapping = {lab: i for i, lab in enumerate(all_labels)}
    t_max = max(a.shape[0] for arrays, _ in parsed for a in arrays)
    out = []
    for arrays, labs in parsed:
        labels = np.array([mapping[l] for l in labs])
        out.append(Dataset.from_arrays(
            arrays, labels, num_classes=len(all_labels), t_max=t_max,
            class_names=list(all_labels)))
    return out


def convert_wide_table(path, steps, features, delimiter=None,
                       layout="interleaved", has_header=True):
    """Convert a one-row-per-sample delimited table to a dataset.

    The last column is the label; the remaining steps*features columns hold
    the series. ``interleaved`` layout means the columns cycle through the
    features within each timestep (t1f1 t1f2 t2f1 t2f2 ...); ``blocked``
    means all timesteps of one feature come before the next feature.
    """
    if layout not in ("interleaved", "blocked"):
        raise InvalidArgumentError(f"unknown layout {layout!r}")
    rows = []
    header_pending = has_header
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if header_pending:
                header_pending = False
                continue
            cells = line.split(delimiter)
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise ParseError("non-numeric cell in row", line=ln)
    if not rows:
        raise ParseError("no data rows found", line=1)
    expected = steps * features + 1
    for i, r in enumerate(rows):
        if len(r) != expected:
            raise ParseError(
                f"row has {len(r)} columns, expected {expected}", line=i + 1)
    table = np.array(rows)
    raw_labels = table[:, -1]
    uniq = np.unique(raw_labels)
    mapping = {v: i for i, v in enumerate(uniq)}
    labels = np.array([mapping[v] for v in raw_labels])
    arrays = []
    for r in table[:, :-1]:
        if layout == "interleaved":
            arrays.append(r.reshape(steps, features))
        else:
            arrays.append(r.reshape(features, steps).T)
    names = [repr(v) if v != int(v) else str(int(v)) for v in uniq]
    return Dataset.from_arrays(arrays, labels, num_classes=len(uniq),
                               class_names=names)
