"""Synthetic clean data and multisource weak-label corruption.

generate_blobs supplies a clean classification dataset (Gaussian blobs
around class means on a sphere); build_multisource shuffles it, splits off
a test set, assigns disjoint chunks of the training pool to the configured
sources and resamples each weak source's labels through its transition
matrix. Same seed, same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .labelspace import SourceSpec, TransitionMatrix, sample_weak_labels


@dataclass(eq=False)
class LabeledInstance:
    features: np.ndarray
    label: int
    source_id: int


@dataclass(eq=False)
class Dataset:
    """A plain labelled dataset: features (n, d) and integer labels (n,)."""

    features: np.ndarray
    labels: np.ndarray
    c: int
    means: np.ndarray | None = None  # class means when synthetically generated

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


@dataclass(eq=False)
class SourceBlock:
    """Instances assigned to one source, with that source's labels."""

    source_id: int
    features: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return self.features.shape[0]


@dataclass(eq=False)
class MultisourceDataset:
    """Union of per-source sample blocks over a shared feature space."""

    sources: list
    c: int
    d: int

    def block(self, source_id: int) -> SourceBlock:
        for blk in self.sources:
            if blk.source_id == source_id:
                return blk
        raise KeyError(f"no source {source_id}")

    def stacked(self):
        """(features, labels, source_ids) over all sources, in source order."""
        feats = np.concatenate([b.features for b in self.sources])
        labs = np.concatenate([b.labels for b in self.sources])
        src = np.concatenate([np.full(len(b), b.source_id, dtype=np.int64)
                              for b in self.sources])
        return feats, labs, src

    def instances(self):
        for blk in self.sources:
            for i in range(len(blk)):
                yield LabeledInstance(blk.features[i], int(blk.labels[i]), blk.source_id)

    def __len__(self) -> int:
        return sum(len(b) for b in self.sources)


def generate_blobs(c: int, d: int, n_per_class: int, spread: float,
                   rng: np.random.Generator, scale: float = 1.0) -> Dataset:
    """Isotropic Gaussian blobs around seeded class means on a sphere.

    Means are seeded random directions scaled to radius `scale`, so some
    class pairs sit closer than others; features are mean + spread *
    standard normal noise. Labels are the generating component.
    """
    if c < 2 or d < 2 or n_per_class < 1 or spread <= 0:
        raise ValueError("need c >= 2, d >= 2, n_per_class >= 1, spread > 0")
    directions = rng.standard_normal((d, c))
    means = scale * (directions / np.linalg.norm(directions, axis=0)).T
    labels = np.repeat(np.arange(c), n_per_class)
    features = means[labels] + spread * rng.standard_normal((labels.shape[0], d))
    return Dataset(features, labels, c, means=means)


def build_multisource(dataset: Dataset, specs: list, seed: int):
    """Split a clean dataset and corrupt it into per-source weak-label blocks.

    The dataset is shuffled with the seed and split 80/20 into a training
    pool and a test set (test size floor(0.2 m), remainder to the pool).
    Sources draw disjoint consecutive chunks of the shuffled pool, so no
    instance is labelled by two sources; every source s >= 1 redraws its
    labels from its transition matrix rows. Returns (MultisourceDataset,
    test Dataset).
    """
    if not specs or specs[0].id != 0:
        raise ValueError("specs[0] must be the clean source (id 0)")
    m = len(dataset)
    m_test = int(np.floor(0.2 * m))
    m_train = m - m_test
    total = sum(s.count for s in specs)
    if total > m_train:
        raise ValueError(f"sources request {total} instances but the training pool has {m_train}")

    rng = np.random.default_rng(seed)
    perm = rng.permutation(m)
    pool = perm[:m_train]
    test_idx = perm[m_train:]

    blocks = []
    cursor = 0
    for spec in specs:
        idx = pool[cursor:cursor + spec.count]
        cursor += spec.count
        feats = dataset.features[idx]
        true = dataset.labels[idx]
        labs = true.copy() if spec.id == 0 else sample_weak_labels(spec.matrix, true, rng)
        blocks.append(SourceBlock(spec.id, feats, labs))
    ms = MultisourceDataset(blocks, dataset.c, dataset.d)
    test = Dataset(dataset.features[test_idx], dataset.labels[test_idx].copy(), dataset.c)
    return ms, test


def corruption_report(ms: MultisourceDataset, original: Dataset) -> dict:
    """Per-source empirical flip matrices (true label -> assigned label).

    Rows are normalised to frequencies; rows of classes a source never saw
    stay all-zero. Instances are matched back to the original dataset by
    exact feature bytes, which is reliable because corruption never touches
    features.
    """
    lookup = {original.features[i].tobytes(): int(original.labels[i])
              for i in range(len(original))}
    c = ms.c
    report = {}
    for blk in ms.sources:
        counts = np.zeros((c, c))
        for i in range(len(blk)):
            true = lookup[blk.features[i].tobytes()]
            counts[true, blk.labels[i]] += 1
        sums = counts.sum(axis=1, keepdims=True)
        report[blk.source_id] = np.divide(counts, sums, out=np.zeros_like(counts),
                                          where=sums > 0)
    return report


def save_dataset(path, ms: MultisourceDataset) -> None:
    """Text form: header `c d n`, then `source_id label f_1 ... f_d` per line."""
    with open(path, "w") as fh:
        fh.write(f"{ms.c} {ms.d} {len(ms)}\n")
        for blk in ms.sources:
            for i in range(len(blk)):
                feats = " ".join(repr(float(v)) for v in blk.features[i])
                fh.write(f"{blk.source_id} {int(blk.labels[i])} {feats}\n")


def load_dataset(path) -> MultisourceDataset:
    with open(path) as fh:
        c, d, n = (int(v) for v in fh.readline().split())
        src = np.empty(n, dtype=np.int64)
        labels = np.empty(n, dtype=np.int64)
        features = np.empty((n, d))
        for i in range(n):
            parts = fh.readline().split()
            src[i] = int(parts[0])
            labels[i] = int(parts[1])
            features[i] = [float(v) for v in parts[2:]]
    blocks = [SourceBlock(int(s), features[src == s], labels[src == s])
              for s in np.unique(src)]
    return MultisourceDataset(blocks, c, d)


def as_clean_dataset(ms: MultisourceDataset) -> Dataset:
    """Flatten a multisource dataset into a plain one, trusting its labels."""
    feats, labs, _ = ms.stacked()
    return Dataset(feats, labs, ms.c)
